//! Structure-preservation predicates on the linear model problems and the
//! step-size regions on which they hold.
//!
//! Every predicate is expressed through a *margin*: a continuous function of
//! `z` that is positive exactly where the predicate holds. The region scan
//! works on margins so that it can detect tangential boundary touches that a
//! sign-only scan would miss.

use num_complex::Complex;
use rayon::prelude::*;

use crate::composition::CompositionScheme;
use crate::dynamics::{ModelProblem, StepMap};
use crate::error::{Error, Result};
use crate::method::{catalog, Method};
use crate::numerics::{lu_det, roots_from_invariants, Lu, Matrix, Vector};
use crate::scalar::{Dd, Scalar};
use crate::tableau::{ButcherTableau, PartitionedPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Elliptic,
    Hyperbolic,
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "elliptic" => Ok(Kind::Elliptic),
            "hyperbolic" => Ok(Kind::Hyperbolic),
            _ => Err(Error::Argument(format!("unknown kind {s:?}, expected elliptic or hyperbolic"))),
        }
    }
}

fn z_f64<T: Scalar>(z: T) -> f64 {
    z.as_f64()
}

/// Determinant that maps a singular-to-tolerance matrix to `err`.
fn guarded_det<T: Scalar>(m: &Matrix<T>, err: impl FnOnce() -> Error) -> Result<T> {
    let lu = Lu::factor(m)?;
    if lu.singular_pivot().is_some() {
        return Err(err());
    }
    Ok(lu.det())
}

fn shifted<T: Scalar>(a: &Matrix<T>, k: T) -> Matrix<T> {
    Matrix::identity(a.rows()).add(&a.scale(k))
}

/// `det(I − zA + z e bᵀ) / det(I − zA)`, without any simplification.
pub fn stability_function_general<T: Scalar>(t: &ButcherTableau<T>, z: T) -> Result<T> {
    let den = guarded_det(&shifted(&t.a, -z), || Error::Pole { z: z_f64(z) })?;
    let rank_one = Matrix::outer(&Vector::ones(t.s), &t.b).scale(z);
    let num = lu_det(&shifted(&t.a, -z).add(&rank_one))?;
    Ok(num / den)
}

/// `R(z)`; for symmetric A-stable catalog methods the equivalent form
/// `det(I + zA) / det(I − zA)` is used.
pub fn stability_function<T: Scalar>(t: &ButcherTableau<T>, z: T) -> Result<T> {
    if t.a_stable && t.is_symmetric() {
        let den = guarded_det(&shifted(&t.a, -z), || Error::Pole { z: z_f64(z) })?;
        Ok(lu_det(&shifted(&t.a, z))? / den)
    } else {
        stability_function_general(t, z)
    }
}

/// `(a₁, a₂)` with
/// `a₁ = det(I + z²A⁽²⁾(A⁽¹⁾ − e b⁽¹⁾ᵀ)) / det(I + z²A⁽²⁾A⁽¹⁾)` and `a₂` with the roles swapped.
pub fn a1a2<T: Scalar>(p: &PartitionedPair<T>, z: T) -> Result<(T, T)> {
    let (t1, t2) = (&p.first, &p.second);
    if t1.s != t2.s {
        return Err(Error::Dimension(format!("pair stage counts differ: {} vs {}", t1.s, t2.s)));
    }
    let z2 = z * z;
    let e = Vector::ones(t1.s);
    let one_side = |x: &ButcherTableau<T>, y: &ButcherTableau<T>| -> Result<T> {
        let xy = x.a.matmul(&y.a);
        let den = guarded_det(&shifted(&xy, z2), || Error::Excluded { z: z_f64(z) })?;
        let shifted_y = y.a.sub(&Matrix::outer(&e, &y.b));
        let num = lu_det(&shifted(&x.a.matmul(&shifted_y), z2))?;
        Ok(num / den)
    };
    Ok((one_side(t2, t1)?, one_side(t1, t2)?))
}

/// `2 − |a₁ + a₂|`.
pub fn elliptic_margin_pair<T: Scalar>(p: &PartitionedPair<T>, z: T) -> Result<T> {
    let (a1, a2) = a1a2(p, z)?;
    Ok(T::lit(2.0) - (a1 + a2).abs())
}

pub fn elliptic_predicate_sprk<T: Scalar>(p: &PartitionedPair<T>, z: T) -> Result<bool> {
    Ok(elliptic_margin_pair(p, z)? > T::zero())
}

fn shortcut_applies<T: Scalar>(t: &ButcherTableau<T>) -> bool {
    t.a_stable && t.is_symmetric()
}

/// `det(I − zA) > 0`, the reduced hyperbolic condition for A-stable methods.
fn shortcut_positive<T: Scalar>(t: &ButcherTableau<T>, z: T) -> Result<bool> {
    Ok(lu_det(&shifted(&t.a, -z))? > T::zero())
}

/// `min(1 − R⁽¹⁾(−z), R⁽²⁾(z) − 1)`, cross-checked against the A-stable reduction when it applies.
pub fn hyperbolic_margin_pair<T: Scalar>(t1: &ButcherTableau<T>, t2: &ButcherTableau<T>, z: T) -> Result<T> {
    let r_minus = stability_function(t1, -z)?;
    let r_plus = stability_function(t2, z)?;
    let margin = (T::one() - r_minus).min(r_plus - T::one());
    if z > T::zero() && shortcut_applies(t1) && shortcut_applies(t2) {
        let shortcut = shortcut_positive(t1, z)? && shortcut_positive(t2, z)?;
        if shortcut != (margin > T::zero()) {
            return Err(Error::RouteMismatch { z: z_f64(z) });
        }
    }
    Ok(margin)
}

pub fn hyperbolic_predicate_srk<T: Scalar>(t: &ButcherTableau<T>, z: T) -> Result<bool> {
    Ok(hyperbolic_margin_pair(t, t, z)? > T::zero())
}

pub fn hyperbolic_predicate_sprk<T: Scalar>(p: &PartitionedPair<T>, z: T) -> Result<bool> {
    Ok(hyperbolic_margin_pair(&p.first, &p.second, z)? > T::zero())
}

/// Largest tolerated `|det M − 1|`, relative to `max(1, ‖M‖²)`.
pub const COMPOSED_DET_TOL: f64 = 1e-8;

fn composed_matrix<T: Scalar>(scheme: &CompositionScheme<T>, kind: Kind, z: T) -> Result<Matrix<T>> {
    let problem = match kind {
        Kind::Elliptic => ModelProblem::elliptic(T::one())?,
        Kind::Hyperbolic => ModelProblem::hyperbolic(T::one())?,
    };
    StepMap::new(Method::Composed(Box::new(scheme.clone())), problem, z)?.propagation_matrix()
}

/// Margin of the composed-method predicate.
///
/// Elliptic: `2 − |tr M|`, after checking that `M` is area preserving.
/// Hyperbolic: `min(1 − m₁₁, m₂₂ − 1)`, further capped by `1 − |γᵢ| z` for every
/// substep when the base method has a single stage.
pub fn composed_margin<T: Scalar>(scheme: &CompositionScheme<T>, kind: Kind, z: T) -> Result<T> {
    let m = composed_matrix(scheme, kind, z)?;
    match kind {
        Kind::Elliptic => {
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let norm = m.norm_inf();
            if (det - T::one()).abs() > T::lit(COMPOSED_DET_TOL) * T::one().max(norm * norm) {
                return Err(Error::NotSymplectic { z: z_f64(z), det: det.as_f64() });
            }
            Ok(T::lit(2.0) - m.trace().abs())
        }
        Kind::Hyperbolic => {
            let mut margin = (T::one() - m[(0, 0)]).min(m[(1, 1)] - T::one());
            if scheme.base_is_one_stage() {
                for &g in scheme.gammas.iter() {
                    margin = margin.min(T::one() - g.abs() * z);
                }
            }
            Ok(margin)
        }
    }
}

pub fn composed_predicate<T: Scalar>(scheme: &CompositionScheme<T>, kind: Kind, z: T) -> Result<bool> {
    Ok(composed_margin(scheme, kind, z)? > T::zero())
}

/// Margin of `method` for the requested structure at `z`.
pub fn margin<T: Scalar>(method: &Method<T>, kind: Kind, z: T) -> Result<T> {
    match (method, kind) {
        (Method::Rk(t), Kind::Elliptic) => elliptic_margin_pair(&PartitionedPair::diagonal(t), z),
        (Method::Prk(p), Kind::Elliptic) => elliptic_margin_pair(p, z),
        (Method::Rk(t), Kind::Hyperbolic) => hyperbolic_margin_pair(t, t, z),
        (Method::Prk(p), Kind::Hyperbolic) => hyperbolic_margin_pair(&p.first, &p.second, z),
        (Method::Composed(c), _) => composed_margin(c, kind, z),
    }
}

pub fn predicate<T: Scalar>(method: &Method<T>, kind: Kind, z: T) -> Result<bool> {
    Ok(margin(method, kind, z)? > T::zero())
}

/// Spectral data of one step on the elliptic (and, where defined, hyperbolic)
/// model problem.
///
/// `trace`, `det` and `discriminant` describe the propagation matrix `M`;
/// `eigenvalues` are those of `J_N = (M − I)/h`, so `1 + h λ` are the roots of
/// `μ² − trace·μ + det`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport<T> {
    pub z: T,
    pub h: T,
    pub a1: T,
    pub a2: T,
    pub trace: T,
    pub det: T,
    pub discriminant: T,
    pub eigenvalues: [Complex<T>; 2],
    pub r_plus: Option<T>,
    pub r_minus: Option<T>,
}

fn matrix_invariants<T: Scalar>(m: &Matrix<T>) -> (T, T, T) {
    let tr = m.trace();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    (tr, det, tr * tr - T::lit(4.0) * det)
}

fn jn_eigenvalues<T: Scalar>(tr: T, det: T, h: T) -> [Complex<T>; 2] {
    // Eigenvalues of (M − I)/h from those of M.
    roots_from_invariants(tr, det).map(|mu| (mu - T::one()) / h)
}

/// Report at `z` for any method, taking `β = 1` so that `h = z`.
pub fn spectral_report<T: Scalar>(method: &Method<T>, z: T) -> Result<SpectralReport<T>> {
    let m = StepMap::new(method.clone(), ModelProblem::elliptic(T::one())?, z)?.propagation_matrix()?;
    let (trace, det, discriminant) = matrix_invariants(&m);
    let (a1, a2) = match method.as_pair() {
        Some(p) => a1a2(&p, z)?,
        None => (m[(0, 0)], m[(1, 1)]),
    };
    let (r_minus, r_plus) = match method {
        Method::Rk(t) => (stability_function(t, -z).ok(), stability_function(t, z).ok()),
        Method::Prk(p) => (stability_function(&p.first, -z).ok(), stability_function(&p.second, z).ok()),
        Method::Composed(_) => {
            let hm = StepMap::new(method.clone(), ModelProblem::hyperbolic(T::one())?, z)
                .and_then(|map| map.propagation_matrix())
                .ok();
            (hm.as_ref().map(|m| m[(0, 0)]), hm.as_ref().map(|m| m[(1, 1)]))
        }
    };
    Ok(SpectralReport {
        z,
        h: z,
        a1,
        a2,
        trace,
        det,
        discriminant,
        eigenvalues: jn_eigenvalues(trace, det, z),
        r_plus,
        r_minus,
    })
}

/// Report for an RK method on `ṗ = −β²q, q̇ = p` with step `h`, eigenvalues
/// from `D = bᵀ(I + h²β²A²)⁻¹` as `−hβ²·DAe ± iβ·De`.
pub fn elliptic_report_srk<T: Scalar>(t: &ButcherTableau<T>, beta: T, h: T) -> Result<SpectralReport<T>> {
    if !(beta > T::zero()) || !(h > T::zero()) {
        return Err(Error::Argument("beta and h must be positive".into()));
    }
    let z = beta * h;
    let k = shifted(&t.a.matmul(&t.a), z * z);
    let d = Lu::factor(&k.transpose())?.solve(&t.b).map_err(|e| match e {
        Error::Singular { .. } => Error::Excluded { z: z_f64(z) },
        other => other,
    })?;
    let e = Vector::ones(t.s);
    let de = d.dot(&e);
    let dae = d.dot(&t.a.mul_vec(&e));
    let re = -h * beta * beta * dae;
    let im = beta * de;
    let m = StepMap::new(Method::Rk(t.clone()), ModelProblem::elliptic(beta)?, h)?.propagation_matrix()?;
    let (trace, det, discriminant) = matrix_invariants(&m);
    let (a1, a2) = a1a2(&PartitionedPair::diagonal(t), z)?;
    Ok(SpectralReport {
        z,
        h,
        a1,
        a2,
        trace,
        det,
        discriminant,
        eigenvalues: [Complex::new(re, im.abs()), Complex::new(re, -im.abs())],
        r_plus: stability_function(t, z).ok(),
        r_minus: stability_function(t, -z).ok(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Number of uniform grid points on `(0, z_max]`.
    pub grid_n: usize,
    pub z_max: f64,
    /// Boundaries are bisected until the bracket is at most `rel_tol · max(1, z)` wide.
    pub rel_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { grid_n: 20_000, z_max: 10.0, rel_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionResult<T> {
    /// Maximal open intervals, sorted and disjoint.
    pub intervals: Vec<(T, T)>,
    /// Upper edge of the interval starting at the smallest grid point, or 0 if
    /// the predicate fails there.
    pub principal_endpoint: T,
    /// The principal interval runs up to `z_max` without a boundary being found.
    pub principal_open: bool,
    pub excluded_points: Vec<T>,
}

#[derive(Debug, Clone, Copy)]
enum Sample<T> {
    Value(T),
    Excluded,
}

impl<T: Scalar> Sample<T> {
    fn holds(&self) -> bool {
        matches!(self, Sample::Value(m) if *m > T::zero())
    }
}

fn evaluate<T: Scalar>(margin: &impl Fn(T) -> Result<T>, z: T) -> Result<Sample<T>> {
    match margin(z) {
        Ok(m) if m.is_nan() => Ok(Sample::Excluded),
        Ok(m) => Ok(Sample::Value(m)),
        Err(e) if e.is_excluded_point() => Ok(Sample::Excluded),
        Err(e) => Err(e),
    }
}

/// Golden-section search for the minimum of `margin` on `[lo, hi]`, returning
/// the first abscissa found where the margin is not positive.
fn tangency_probe<T: Scalar>(margin: &impl Fn(T) -> Result<T>, mut lo: T, mut hi: T) -> Result<Option<T>> {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let width_tol = T::unit_roundoff().sqrt() * T::one().max(hi.abs());
    let value = |z: T| -> Result<Option<T>> {
        Ok(match evaluate(margin, z)? {
            Sample::Value(m) => Some(m),
            Sample::Excluded => None,
        })
    };
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (value(x1)?, value(x2)?);
    for _ in 0..200 {
        let (Some(m1), Some(m2)) = (f1, f2) else {
            return Ok(None);
        };
        if m1 <= T::zero() {
            return Ok(Some(x1));
        }
        if m2 <= T::zero() {
            return Ok(Some(x2));
        }
        if hi - lo <= width_tol {
            break;
        }
        if m1 < m2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = value(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = value(x2)?;
        }
    }
    Ok(None)
}

/// Boundary between `a` (predicate `holds_a`) and `b` by bisection; the
/// midpoint of the final bracket is returned.
fn bisect_boundary<T: Scalar>(margin: &impl Fn(T) -> Result<T>, a: T, b: T, rel_tol: T) -> Result<T> {
    let holds_at_a = evaluate(margin, a)?.holds();
    let (mut lo, mut hi) = (a, b);
    let half = T::lit(0.5);
    for _ in 0..400 {
        let mid = (lo + hi) * half;
        if (hi - lo).abs() <= rel_tol * T::one().max(mid.abs()) || mid == lo || mid == hi {
            break;
        }
        if evaluate(margin, mid)?.holds() == holds_at_a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * half)
}

/// Region where `margin(z) > 0` on `(0, z_max]`.
///
/// Grid points are evaluated in parallel and merged in index order. Strict
/// local minima of the margin between passing grid points are searched for a
/// sub-grid excursion to a non-positive value, and every change of outcome is
/// refined by bisection.
pub fn find_region<T, F>(margin: F, cfg: &ScanConfig) -> Result<RegionResult<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<T> + Sync,
{
    if !(cfg.z_max > 0.0) || !cfg.z_max.is_finite() {
        return Err(Error::Argument(format!("z_max must be positive, got {}", cfg.z_max)));
    }
    if cfg.grid_n < 2 {
        return Err(Error::Argument("grid needs at least two points".into()));
    }
    if !(cfg.rel_tol > 0.0) {
        return Err(Error::Argument("rel_tol must be positive".into()));
    }
    let n = cfg.grid_n;
    let z_max = T::lit(cfg.z_max);
    let rel_tol = T::lit(cfg.rel_tol);
    let grid: Vec<T> = (1..=n).map(|k| z_max * T::from_count(k) / T::from_count(n)).collect();
    let samples: Vec<Sample<T>> = grid.par_iter().map(|&z| evaluate(&margin, z)).collect::<Result<Vec<_>>>()?;

    let excluded_points: Vec<T> =
        grid.iter().zip(&samples).filter(|(_, s)| matches!(s, Sample::Excluded)).map(|(&z, _)| z).collect();

    // Outcome sequence, with failing points found inside passing stretches spliced in.
    let mut points: Vec<(T, bool)> = Vec::with_capacity(n);
    for k in 0..n {
        points.push((grid[k], samples[k].holds()));
        if k >= 1 && k + 1 < n {
            if let (Sample::Value(a), Sample::Value(b), Sample::Value(c)) = (samples[k - 1], samples[k], samples[k + 1])
            {
                let zero = T::zero();
                if a > zero && b > zero && c > zero && b < a && b <= c {
                    if let Some(zf) = tangency_probe(&margin, grid[k - 1], grid[k + 1])? {
                        // Keep the spliced point between its grid neighbours.
                        let last = points.pop().expect("just pushed");
                        if zf < last.0 {
                            points.push((zf, false));
                            points.push(last);
                        } else {
                            points.push(last);
                            points.push((zf, false));
                        }
                    }
                }
            }
        }
    }

    let mut intervals = Vec::new();
    let mut open_start: Option<T> = if points[0].1 { Some(points[0].0) } else { None };
    for w in points.windows(2) {
        let ((za, ha), (zb, hb)) = (w[0], w[1]);
        if ha == hb {
            continue;
        }
        let edge = bisect_boundary(&margin, za, zb, rel_tol)?;
        if ha {
            intervals.push((open_start.take().expect("interval open"), edge));
        } else {
            open_start = Some(edge);
        }
    }
    let mut tail_open = false;
    if let Some(start) = open_start {
        intervals.push((start, z_max));
        tail_open = true;
    }
    let first_holds = points[0].1;
    let (principal_endpoint, principal_open) = if first_holds {
        let p = intervals[0].1;
        (p, tail_open && intervals.len() == 1)
    } else {
        (T::zero(), false)
    };
    Ok(RegionResult { intervals, principal_endpoint, principal_open, excluded_points })
}

/// Region of a plain boolean predicate (no tangency search).
pub fn find_region_predicate<T, F>(pred: F, cfg: &ScanConfig) -> Result<RegionResult<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<bool> + Sync,
{
    find_region(|z| pred(z).map(|b| if b { T::one() } else { -T::one() }), cfg)
}

pub fn method_region<T: Scalar>(method: &Method<T>, kind: Kind, cfg: &ScanConfig) -> Result<RegionResult<T>> {
    find_region(|z| margin(method, kind, z), cfg)
}

/// Bisection tolerance for the Lobatto elliptic endpoints, which are
/// computed in double-double so that sub-`f64` boundary touches are resolved.
pub const LOBATTO_REL_TOL: f64 = 1e-25;

/// Principal elliptic endpoint of the `s`-stage Lobatto IIIA–IIIB pair.
pub fn lobatto_elliptic_endpoint(s: usize, grid_n: usize) -> Result<Dd> {
    let method = catalog::<Dd>("lobatto", Some(s))?;
    let cfg = ScanConfig { grid_n, z_max: 10.0, rel_tol: LOBATTO_REL_TOL };
    Ok(method_region(&method, Kind::Elliptic, &cfg)?.principal_endpoint)
}
