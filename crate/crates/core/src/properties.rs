//! Cross-module invariants. These live in the library so that they run ahead of
//! the acceptance target, which exits non-zero while criteria are red.

use crate::dynamics::{discrete_jacobian, fd_map_jacobian, simulate, ModelProblem, StepMap};
use crate::method::{catalog, Method};
use crate::numerics::{Matrix, Vector};
use crate::region::{a1a2, margin, Kind};
use crate::tableau::{lobatto_pair, ButcherTableau, PartitionedPair};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn symplectic_catalog() -> Vec<Method<f64>> {
    let mut out = vec![catalog("symplectic-euler", None).unwrap(), catalog("midpoint", None).unwrap()];
    out.extend((2..=4).map(|s| catalog("gauss", Some(s)).unwrap()));
    out.extend((2..=4).map(|s| catalog("lobatto", Some(s)).unwrap()));
    out
}

fn problems(k: f64) -> [ModelProblem<f64>; 3] {
    [ModelProblem::elliptic(k).unwrap(), ModelProblem::hyperbolic(k).unwrap(), ModelProblem::logistic(k).unwrap()]
}

#[test]
fn equilibria_are_fixed_points_of_every_map() {
    for method in symplectic_catalog() {
        for k in [0.5, 1.0, 3.0] {
            for problem in problems(k) {
                for z in [0.05, 0.3, 0.6, 0.95] {
                    let map = StepMap::new(method.clone(), problem, z / k).unwrap();
                    for eq in problem.equilibria() {
                        let img = map.step(eq).unwrap();
                        let res = (img.0 - eq.0).abs().max((img.1 - eq.1).abs());
                        assert!(res <= 1e-10, "{} {:?} z={z}: residual {res:e}", method.name(), problem.kind);
                    }
                }
            }
        }
    }
}

#[test]
fn finite_difference_jacobian_matches_linear_propagation_matrix() {
    for method in symplectic_catalog() {
        for problem in [ModelProblem::elliptic(2.0).unwrap(), ModelProblem::hyperbolic(0.7).unwrap()] {
            for h in [0.1, 0.4, 0.9] {
                let map = StepMap::new(method.clone(), problem, h).unwrap();
                let exact = discrete_jacobian(&map, (0.0, 0.0)).unwrap();
                let fd = fd_map_jacobian(&map, (0.0, 0.0)).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        let fd_jn = (fd[(i, j)] - f64::from(u8::from(i == j))) / h;
                        assert!((fd_jn - exact[(i, j)]).abs() <= 1e-5, "{} h={h}", method.name());
                    }
                }
            }
        }
    }
}

#[test]
fn logistic_maps_preserve_area_at_random_states() {
    let mut rng = StdRng::seed_from_u64(11);
    for method in symplectic_catalog() {
        for _ in 0..20 {
            let alpha = rng.gen_range(0.5..2.0);
            let z = rng.gen_range(0.01..0.9);
            // Below p = 0 the flow blows up in finite time and implicit stages may have no real solution.
            let state = (rng.gen_range(0.0..1.0), rng.gen_range(-2.0..2.0));
            let map = StepMap::new(method.clone(), ModelProblem::logistic(alpha).unwrap(), z / alpha).unwrap();
            let j = fd_map_jacobian(&map, state).unwrap();
            let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
            assert!((det - 1.0).abs() <= 1e-6, "{} z={z} at {state:?}: det {det}", method.name());
        }
    }
}

#[test]
fn midpoint_orbit_stays_on_its_ellipse() {
    let beta = 1.0;
    let map = StepMap::new(catalog("midpoint", None).unwrap(), ModelProblem::elliptic(beta).unwrap(), 1.0).unwrap();
    let traj = simulate(&map, (1.0, 0.0), 1_000_000);
    assert!(traj.error.is_none());
    let energy = |(p, q): (f64, f64)| p * p + beta * beta * q * q;
    let e0 = energy(traj.states[0]);
    let (lo, hi) = traj.states.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &s| (lo.min(energy(s)), hi.max(energy(s))));
    assert!(hi <= e0 * (1.0 + 1e-6) && lo >= e0 / (1.0 + 1e-6), "energy range [{lo}, {hi}]");
}

#[test]
fn lobatto_pairs_are_elliptic_below_their_endpoint_only() {
    // The pair's a1 equals a2 and |a1| < 1 exactly on the principal interval.
    for s in 2..=5 {
        let pair = lobatto_pair::<f64>(s).unwrap();
        let m = Method::Prk(pair.clone());
        for k in 1..200 {
            let z = 0.02 * k as f64;
            let (a1, a2) = a1a2(&pair, z).unwrap();
            assert!((a1 - a2).abs() <= 1e-12 * a1.abs().max(1.0));
            let mg = margin(&m, Kind::Elliptic, z).unwrap();
            assert_eq!(mg > 0.0, a1.abs() < 1.0, "s={s} z={z}");
        }
    }
}

fn tableau_strategy() -> impl Strategy<Value = ButcherTableau<f64>> {
    (1usize..=4).prop_flat_map(|s| {
        (proptest::collection::vec(-2.0f64..2.0, s * s), proptest::collection::vec(0.1f64..1.0, s)).prop_map(
            move |(a, w)| {
                let total: f64 = w.iter().sum();
                let b: Vec<f64> = w.iter().map(|x| x / total).collect();
                let c: Vec<f64> = (0..s).map(|i| a[i * s..(i + 1) * s].iter().sum()).collect();
                ButcherTableau::new(Matrix::from_vec(s, s, a).unwrap(), Vector(b), Vector(c), "random", 1, false)
                    .unwrap()
            },
        )
    })
}

proptest! {
    #[test]
    fn tableau_text_round_trips(t in tableau_strategy()) {
        let back = ButcherTableau::<f64>::from_text(&t.to_text()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn pair_text_round_trips(t1 in tableau_strategy(), t2 in tableau_strategy()) {
        prop_assume!(t1.s == t2.s);
        let pair = PartitionedPair::new(t1, t2, "random-pair").unwrap();
        prop_assert_eq!(PartitionedPair::<f64>::from_text(&pair.to_text()).unwrap(), pair);
    }

    #[test]
    fn symplectic_steps_are_deterministic(p in 0.0f64..1.0, q in -3.0f64..3.0, z in 0.01f64..0.9) {
        let map = StepMap::new(catalog("gauss", Some(2)).unwrap(), ModelProblem::logistic(1.0).unwrap(), z).unwrap();
        prop_assert_eq!(map.step((p, q)).unwrap(), map.step((p, q)).unwrap());
    }
}
