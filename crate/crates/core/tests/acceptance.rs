//! Acceptance checks, one PASS/FAIL line per criterion. Detail lines are
//! indented underneath. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sympreg::dynamics::{discrete_jacobian, logistic_limit_steps};
use sympreg::region::{a1a2, lobatto_elliptic_endpoint, method_region, spectral_report};
use sympreg::{
    catalog, check_sprk_symplectic, check_srk_symplectic, gauss, lobatto_pair, CompositionScheme, Dd, Kind, Method,
    ModelProblem, Scalar, ScanConfig, StepMap,
};

const SEED: u64 = 20_260_415;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: u32, ok: bool, title: &str, details: &[String]) {
        if !ok {
            self.failures += 1;
        }
        println!("{} {id:>2}. {title}", if ok { "PASS" } else { "FAIL" });
        for d in details {
            println!("        {d}");
        }
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "MISS"
    }
}

fn criterion_1(r: &mut Report) {
    let mut ok = true;
    let mut worst_srk = 0.0f64;
    for s in 1..=5 {
        let res = check_srk_symplectic(&gauss::<f64>(s).unwrap());
        ok &= res <= 1e-10;
        worst_srk = worst_srk.max(res);
    }
    let mut worst_sprk = 0.0f64;
    for s in 2..=10 {
        let res = check_sprk_symplectic(&lobatto_pair::<f64>(s).unwrap()).unwrap();
        ok &= res <= 1e-10;
        worst_sprk = worst_sprk.max(res);
    }
    r.line(
        1,
        ok,
        "symplecticity residuals <= 1e-10",
        &[format!("gauss s=1..5 worst {worst_srk:.2e}; lobatto pair s=2..10 worst {worst_sprk:.2e}")],
    );
}

/// Principal elliptic endpoints of the Lobatto pairs for s = 2..=10, in double-double.
fn lobatto_endpoints() -> Vec<Dd> {
    (2..=10).map(|s| lobatto_elliptic_endpoint(s, ScanConfig::default().grid_n).unwrap()).collect()
}

// 3.141590 is a published endpoint, not an approximation of pi.
#[allow(clippy::approx_constant)]
fn criterion_2(r: &mut Report, ends: &[Dd]) {
    let refs = [
        (2, 2.0, 1e-9),
        (3, 8f64.sqrt(), 1e-8),
        (4, (42.0 - 6.0 * 29f64.sqrt()).sqrt(), 1e-6),
        (5, 3.140328, 1e-5),
        (10, 3.141590, 1e-5),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (s, target, tol) in refs {
        let e = ends[s - 2].as_f64();
        let hit = within(e, target, tol);
        ok &= hit;
        details.push(format!(
            "s={s:<2} computed {e:.12} reference {target:.9} |d| {:.2e} tol {tol:.0e} {}",
            (e - target).abs(),
            mark(hit)
        ));
    }
    r.line(2, ok, "Lobatto pair elliptic endpoints", &details);
}

fn criterion_3(r: &mut Report) {
    type ClosedForm = fn(f64) -> f64;
    let table: [(usize, ClosedForm); 3] = [
        (2, |z| 1.0 - z * z / 2.0),
        (3, |z| {
            let w = z * z;
            (1.0 - 11.0 / 24.0 * w + w * w / 48.0) / (1.0 + w / 24.0)
        }),
        (4, |z| {
            let w = z * z;
            (1.0 - 7.0 / 15.0 * w + 23.0 / 900.0 * w * w - w * w * w / 3600.0) / (1.0 + w / 30.0 + w * w / 1800.0)
        }),
    ];
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut ok = true;
    let mut details = Vec::new();
    for (s, closed) in table {
        let pair = lobatto_pair::<f64>(s).unwrap();
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let z: f64 = rng.gen_range(0.0..3.0);
            let expect = closed(z);
            let rel = (a1a2(&pair, z).unwrap().0 - expect).abs() / expect.abs();
            worst = worst.max(rel);
        }
        ok &= worst <= 1e-9;
        details.push(format!("s={s} worst relative deviation {worst:.2e} over 20 z in (0,3)"));
    }
    r.line(3, ok, "a1 matches the tabulated rational functions", &details);
}

fn principal(method: &Method<f64>, kind: Kind, cfg: &ScanConfig) -> f64 {
    method_region(method, kind, cfg).unwrap().principal_endpoint
}

fn criterion_4(r: &mut Report) {
    let se = catalog::<f64>("symplectic-euler", None).unwrap();
    let cfg = ScanConfig::default();
    let ell = principal(&se, Kind::Elliptic, &cfg);
    let hyp = principal(&se, Kind::Hyperbolic, &cfg);
    let ok = within(ell, 2.0, 1e-9) && within(hyp, 1.0, 1e-9);
    r.line(
        4,
        ok,
        "symplectic Euler regions (0,2) elliptic, (0,1) hyperbolic",
        &[format!("elliptic {ell:.12}, hyperbolic {hyp:.12}")],
    );
}

fn criterion_5(r: &mut Report) {
    let mid = catalog::<f64>("midpoint", None).unwrap();
    let end = principal(&mid, Kind::Hyperbolic, &ScanConfig::default());
    let g2 = catalog::<f64>("gauss", Some(2)).unwrap();
    let cfg = ScanConfig { z_max: 100.0, ..ScanConfig::default() };
    let region = method_region(&g2, Kind::Hyperbolic, &cfg).unwrap();
    let whole = region.principal_open && region.intervals.len() == 1 && region.excluded_points.is_empty();
    // Oracle: the stage determinant 1 − z/2 + z²/12 of Gauss-2 stays positive.
    let oracle = (1..=cfg.grid_n).all(|k| {
        let z = cfg.z_max * k as f64 / cfg.grid_n as f64;
        1.0 - z / 2.0 + z * z / 12.0 > 0.0
    });
    let ok = within(end, 2.0, 1e-9) && whole && oracle;
    r.line(
        5,
        ok,
        "midpoint hyperbolic region (0,2); Gauss-2 hyperbolic on all of (0,100)",
        &[
            format!("midpoint endpoint {end:.12}"),
            format!(
                "gauss-2: {} interval(s), open at z_max {}, stage-determinant oracle positive {oracle}",
                region.intervals.len(),
                region.principal_open
            ),
        ],
    );
}

fn composed(base: &str, order: usize) -> Method<f64> {
    let base = catalog::<f64>(base, None).unwrap();
    Method::Composed(Box::new(CompositionScheme::triple_jump(base, order).unwrap()))
}

fn criterion_6(r: &mut Report) {
    let cfg = ScanConfig::default();
    let c = 2f64.cbrt();
    let hyp_target = (2.0 - c) / c;
    let hyp = principal(&composed("midpoint", 4), Kind::Hyperbolic, &cfg);
    let hyp_ok = within(hyp, hyp_target, 1e-8);

    let ell_target = 2.48f64.sqrt();
    let ell4 = principal(&composed("lobatto-2", 4), Kind::Elliptic, &cfg);
    let ell4_ok = within(ell4, ell_target, 1e-3);

    // The sixth-order coefficients are not published; outside the band this
    // part is reported only.
    let ell6 = principal(&composed("lobatto-2", 6), Kind::Elliptic, &cfg);
    let ell6_in_band = within(ell6, 1.1034, 2e-2);

    r.line(
        6,
        hyp_ok && ell4_ok,
        "composition shrinkage",
        &[
            format!(
                "midpoint 4th order hyperbolic {hyp:.12} reference {hyp_target:.12} |d| {:.2e} tol 1e-8 {}",
                (hyp - hyp_target).abs(),
                mark(hyp_ok)
            ),
            format!(
                "lobatto-2 4th order elliptic {ell4:.9} reference sqrt(2.48) = {ell_target:.9} |d| {:.2e} tol 1e-3 {}",
                (ell4 - ell_target).abs(),
                mark(ell4_ok)
            ),
            format!(
                "lobatto-2 6th order elliptic {ell6:.9} reference 1.1034 tol 2e-2 {}",
                if ell6_in_band {
                    "ok"
                } else {
                    "REPORT ONLY: recursive triple-jump coefficients differ from the unpublished reference set"
                }
            ),
        ],
    );
}

fn criterion_7(r: &mut Report) {
    let mut methods: Vec<Method<f64>> = vec![catalog("symplectic-euler", None).unwrap()];
    methods.extend((2..=10).map(|s| catalog("lobatto", Some(s)).unwrap()));
    methods.extend((1..=5).map(|s| catalog("gauss", Some(s)).unwrap()));
    let problem = ModelProblem::elliptic(1.0).unwrap();
    let mut rng = StdRng::seed_from_u64(SEED + 7);
    let (mut worst_tr, mut worst_det, mut skipped) = (0.0f64, 0.0f64, 0usize);
    for method in &methods {
        let pair = method.as_pair().unwrap();
        let mut taken = 0;
        while taken < 100 {
            let z: f64 = rng.gen_range(0.0..10.0);
            let m = match StepMap::new(method.clone(), problem, z).and_then(|map| map.propagation_matrix()) {
                Ok(m) => m,
                Err(e) if e.is_excluded_point() => {
                    skipped += 1;
                    continue;
                }
                Err(e) => panic!("{}: {e}", method.name()),
            };
            let (a1, a2) = a1a2(&pair, z).unwrap();
            worst_tr = worst_tr.max((m.trace() - (a1 + a2)).abs());
            worst_det = worst_det.max((m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] - 1.0).abs());
            taken += 1;
        }
    }
    let ok = worst_tr <= 1e-9 && worst_det <= 1e-9;
    r.line(
        7,
        ok,
        "propagation-matrix trace equals a1 + a2 and det M = 1",
        &[format!(
            "{} pairs x 100 z in (0,10): worst |tr - (a1+a2)| {worst_tr:.2e}, worst |det - 1| {worst_det:.2e}, {skipped} pole samples redrawn",
            methods.len()
        )],
    );
}

fn criterion_8(r: &mut Report) {
    let mut rng = StdRng::seed_from_u64(SEED + 8);
    let mut ok = true;
    let mut details = Vec::new();
    for s in 1..=3 {
        let method = catalog::<f64>("gauss", Some(s)).unwrap();
        let (mut bad, mut excluded, mut min_im) = (0usize, 0usize, f64::INFINITY);
        for _ in 0..1000 {
            let z: f64 = rng.gen_range(0.0..100.0);
            match spectral_report(&method, z) {
                Ok(rep) => {
                    let [l1, l2] = rep.eigenvalues;
                    let conj = l1.re == l2.re && l1.im == -l2.im;
                    min_im = min_im.min(l1.im.abs());
                    if !(conj && l1.im != 0.0) {
                        bad += 1;
                    }
                }
                Err(e) if e.is_excluded_point() => excluded += 1,
                Err(e) => panic!("gauss-{s}: {e}"),
            }
        }
        ok &= bad == 0;
        details.push(format!("gauss-{s}: {bad} violations, {excluded} excluded, smallest |Im| {min_im:.3e}"));
    }
    r.line(8, ok, "Gauss methods keep the elliptic eigenvalue pair on (0,100)", &details);
}

fn criterion_9(r: &mut Report) {
    let se = catalog::<f64>("symplectic-euler", None).unwrap();
    let mut converged_inside = 0;
    let mut slowest = 0;
    for i in 0..10 {
        let z = 0.1 + 0.8 * i as f64 / 9.0;
        let problem = ModelProblem::logistic(1.0).unwrap();
        let map = StepMap::new(se.clone(), problem, z).unwrap();
        let p_hi = 2f64.min((1.0 + z) / (2.0 * z)) - 0.05;
        for j in 0..10 {
            let p0 = 0.05 + (p_hi - 0.05) * j as f64 / 9.0;
            if let Ok(Some(n)) = logistic_limit_steps(&map, (p0, 1.0), 100_000) {
                converged_inside += 1;
                slowest = slowest.max(n);
            }
        }
    }
    let mut converged_outside = 0;
    let mut outside_total = 0;
    for i in 0..8 {
        let z = 1.05 + 0.35 * i as f64 / 7.0;
        let map = StepMap::new(se.clone(), ModelProblem::logistic(1.0).unwrap(), z).unwrap();
        for p0 in [0.9, 0.95, 0.99, 1.01] {
            outside_total += 1;
            if let Ok(Some(_)) = logistic_limit_steps(&map, (p0, 1.0), 100_000) {
                converged_outside += 1;
            }
        }
    }

    let mut worst_jac = 0.0f64;
    for alpha in [1.0, 2.0] {
        for z in [0.25, 0.5, 0.75] {
            let map = StepMap::new(se.clone(), ModelProblem::logistic(alpha).unwrap(), z / alpha).unwrap();
            let expected = [((0.0, 0.0), [alpha, -alpha / (1.0 + z)]), ((1.0, 0.0), [-alpha, alpha / (1.0 - z)])];
            for (point, diag) in expected {
                let j = discrete_jacobian(&map, point).unwrap();
                for (row, col, want) in [(0, 0, diag[0]), (0, 1, 0.0), (1, 0, 0.0), (1, 1, diag[1])] {
                    worst_jac = worst_jac.max((j[(row, col)] - want).abs());
                }
            }
        }
    }

    let ok = converged_inside == 100 && converged_outside == 0 && worst_jac <= 1e-5;
    r.line(
        9,
        ok,
        "logistic limit p -> 1, q -> +inf exactly under the step condition; J_N matches",
        &[
            format!("inside condition: {converged_inside}/100 converged, slowest {slowest} steps"),
            format!("z in (1.05,1.4), p0 near 1: {converged_outside}/{outside_total} converged"),
            format!("worst J_N entry deviation {worst_jac:.2e}"),
        ],
    );
}

fn criterion_10(r: &mut Report, ends: &[Dd]) {
    let pi = Dd::new(PI, 1.224_646_799_147_353_2e-16);
    let increasing = ends.windows(2).all(|w| w[1] > w[0]);
    let below = ends.iter().all(|&e| e < pi);
    let gap = (pi - ends[ends.len() - 1]).as_f64();
    let ok = increasing && below && gap <= 3e-6;
    let gaps: Vec<String> =
        ends.iter().enumerate().map(|(i, &e)| format!("s={}: {:.3e}", i + 2, (pi - e).as_f64())).collect();
    r.line(
        10,
        ok,
        "Lobatto endpoints increase towards pi",
        &[
            format!("gaps pi - endpoint: {}", gaps.join(", ")),
            format!("strictly increasing {increasing}, all below pi {below}"),
        ],
    );
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    let ends = lobatto_endpoints();
    criterion_1(&mut r);
    criterion_2(&mut r, &ends);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r);
    criterion_10(&mut r, &ends);
    println!("{} of 10 criteria failed", r.failures);
    if r.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
