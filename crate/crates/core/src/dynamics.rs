//! Discrete dynamical systems induced by one-step methods on the model
//! Hamiltonian problems, and classification of their fixed points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::method::Method;
use crate::numerics::{eig2, Lu, Matrix, Vector};
use crate::scalar::Scalar;
use crate::tableau::ButcherTableau;

pub type State<T> = (T, T);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// `ṗ = −β²q, q̇ = p`
    LinearElliptic,
    /// `ṗ = −βp, q̇ = βq`
    LinearHyperbolic,
    /// `ṗ = αp(1 − p), q̇ = α(2p − 1)q`
    NonlinearLogistic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelProblem<T> {
    pub kind: ProblemKind,
    /// β for the linear problems, α for the logistic one.
    pub parameter: T,
}

impl<T: Scalar> ModelProblem<T> {
    pub fn new(kind: ProblemKind, parameter: T) -> Result<Self> {
        if !(parameter > T::zero()) || !parameter.is_finite() {
            return Err(Error::Argument(format!("problem parameter must be positive, got {parameter}")));
        }
        Ok(Self { kind, parameter })
    }

    pub fn elliptic(beta: T) -> Result<Self> {
        Self::new(ProblemKind::LinearElliptic, beta)
    }

    pub fn hyperbolic(beta: T) -> Result<Self> {
        Self::new(ProblemKind::LinearHyperbolic, beta)
    }

    pub fn logistic(alpha: T) -> Result<Self> {
        Self::new(ProblemKind::NonlinearLogistic, alpha)
    }

    pub fn is_linear(&self) -> bool {
        self.kind != ProblemKind::NonlinearLogistic
    }

    /// Dimensionless step `z = βh` (or `αh`).
    pub fn z(&self, h: T) -> T {
        self.parameter * h
    }

    /// `(f, g)` with `ṗ = f(p, q)`, `q̇ = g(p, q)`.
    pub fn field(&self, p: T, q: T) -> (T, T) {
        let k = self.parameter;
        match self.kind {
            ProblemKind::LinearElliptic => (-k * k * q, p),
            ProblemKind::LinearHyperbolic => (-k * p, k * q),
            ProblemKind::NonlinearLogistic => (k * p * (T::one() - p), k * (p + p - T::one()) * q),
        }
    }

    /// `[[∂f/∂p, ∂f/∂q], [∂g/∂p, ∂g/∂q]]`.
    pub fn partials(&self, p: T, q: T) -> [[T; 2]; 2] {
        let k = self.parameter;
        let zero = T::zero();
        match self.kind {
            ProblemKind::LinearElliptic => [[zero, -k * k], [T::one(), zero]],
            ProblemKind::LinearHyperbolic => [[-k, zero], [zero, k]],
            ProblemKind::NonlinearLogistic => {
                let two = T::lit(2.0);
                [[k * (T::one() - two * p), zero], [two * k * q, k * (two * p - T::one())]]
            }
        }
    }

    pub fn equilibria(&self) -> Vec<State<T>> {
        let zero = T::zero();
        match self.kind {
            ProblemKind::NonlinearLogistic => vec![(zero, zero), (T::one(), zero)],
            _ => vec![(zero, zero)],
        }
    }

    pub fn continuous_jacobian(&self, point: State<T>) -> Matrix<T> {
        let j = self.partials(point.0, point.1);
        Matrix::from_fn(2, 2, |i, k| j[i][k])
    }
}

/// One step of `method` on `problem` with step `h`.
#[derive(Debug, Clone)]
pub struct StepMap<T> {
    pub method: Method<T>,
    pub problem: ModelProblem<T>,
    pub h: T,
    /// Exact one-step matrix, present for linear problems.
    pub matrix: Option<Matrix<T>>,
}

impl<T: Scalar> StepMap<T> {
    pub fn new(method: Method<T>, problem: ModelProblem<T>, h: T) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::Argument(format!("step size must be positive, got {h}")));
        }
        let mut map = Self { method, problem, h, matrix: None };
        if problem.is_linear() {
            let c1 = map.step_stages((T::one(), T::zero()))?;
            let c2 = map.step_stages((T::zero(), T::one()))?;
            map.matrix = Some(Matrix::from_fn(2, 2, |i, j| {
                let c = if j == 0 { c1 } else { c2 };
                if i == 0 {
                    c.0
                } else {
                    c.1
                }
            }));
        }
        Ok(map)
    }

    pub fn z(&self) -> T {
        self.problem.z(self.h)
    }

    pub fn step(&self, state: State<T>) -> Result<State<T>> {
        match &self.matrix {
            Some(m) => {
                let v = m.mul_vec(&[state.0, state.1]);
                Ok((v[0], v[1]))
            }
            None => self.step_stages(state),
        }
    }

    /// The step evaluated through the stage equations, bypassing the cached matrix.
    pub fn step_stages(&self, state: State<T>) -> Result<State<T>> {
        advance(&self.method, &self.problem, self.h, state)
    }

    pub fn propagation_matrix(&self) -> Result<Matrix<T>> {
        self.matrix.clone().ok_or(Error::Unsupported("the propagation matrix"))
    }
}

fn advance<T: Scalar>(method: &Method<T>, problem: &ModelProblem<T>, h: T, state: State<T>) -> Result<State<T>> {
    match method {
        Method::Rk(t) => advance_pair(t, t, problem, h, state),
        Method::Prk(p) => advance_pair(&p.first, &p.second, problem, h, state),
        Method::Composed(c) => c.gammas.iter().enumerate().try_fold(state, |x, (index, &g)| {
            advance(&c.base, problem, g * h, x).map_err(|e| Error::Substep { index, source: Box::new(e) })
        }),
    }
}

fn is_symplectic_euler<T: Scalar>(t1: &ButcherTableau<T>, t2: &ButcherTableau<T>) -> bool {
    t1.s == 1
        && t2.s == 1
        && t1.a[(0, 0)].is_zero()
        && t2.a[(0, 0)] == T::one()
        && t1.b[0] == T::one()
        && t2.b[0] == T::one()
}

fn advance_pair<T: Scalar>(
    t1: &ButcherTableau<T>,
    t2: &ButcherTableau<T>,
    problem: &ModelProblem<T>,
    h: T,
    (p, q): State<T>,
) -> Result<State<T>> {
    let z = problem.z(h);
    if problem.kind == ProblemKind::NonlinearLogistic && is_symplectic_euler(t1, t2) {
        let two_zp = (z + z) * p;
        let denom = T::one() + z - two_zp;
        let scale = T::one().max((T::one() + z).abs()).max(two_zp.abs());
        if denom.abs() <= T::pivot_tol() * scale {
            return Err(Error::Pole { z: z.as_f64() });
        }
        return Ok(((T::one() + z) * p - z * p * p, q / denom));
    }
    let s = t1.s;
    let stages = if problem.is_linear() {
        let rhs: Vec<T> = (0..2 * s).map(|i| if i < s { p } else { q }).collect();
        let k = stage_jacobian(t1, t2, problem, h, &rhs);
        Lu::factor(&k)?.solve(&rhs).map_err(|e| match e {
            Error::Singular { .. } => Error::Excluded { z: z.as_f64() },
            other => other,
        })?
    } else {
        newton_stages(t1, t2, problem, h, (p, q))?
    };
    let (mut dp, mut dq) = (T::zero(), T::zero());
    for i in 0..s {
        let (f, g) = problem.field(stages[i], stages[s + i]);
        dp = dp + t1.b[i] * f;
        dq = dq + t2.b[i] * g;
    }
    Ok((p + h * dp, q + h * dq))
}

/// Jacobian of the stage residual at stage values `x = [P; Q]`.
fn stage_jacobian<T: Scalar>(
    t1: &ButcherTableau<T>,
    t2: &ButcherTableau<T>,
    problem: &ModelProblem<T>,
    h: T,
    x: &[T],
) -> Matrix<T> {
    let s = t1.s;
    let partials: Vec<[[T; 2]; 2]> = (0..s).map(|j| problem.partials(x[j], x[s + j])).collect();
    Matrix::from_fn(2 * s, 2 * s, |r, c| {
        let (bi, i) = (r / s, r % s);
        let (bj, j) = (c / s, c % s);
        let a = if bi == 0 { t1.a[(i, j)] } else { t2.a[(i, j)] };
        let id = if r == c { T::one() } else { T::zero() };
        id - h * a * partials[j][bi][bj]
    })
}

fn stage_residual<T: Scalar>(
    t1: &ButcherTableau<T>,
    t2: &ButcherTableau<T>,
    problem: &ModelProblem<T>,
    h: T,
    (p, q): State<T>,
    x: &[T],
) -> Vector<T> {
    let s = t1.s;
    let fields: Vec<(T, T)> = (0..s).map(|j| problem.field(x[j], x[s + j])).collect();
    let mut r = Vector::zeros(2 * s);
    for i in 0..s {
        let (mut sf, mut sg) = (T::zero(), T::zero());
        for (j, &(f, g)) in fields.iter().enumerate() {
            sf = sf + t1.a[(i, j)] * f;
            sg = sg + t2.a[(i, j)] * g;
        }
        r[i] = x[i] - p - h * sf;
        r[s + i] = x[s + i] - q - h * sg;
    }
    r
}

pub const MAX_NEWTON_ITERATIONS: usize = 50;

/// Damped Newton on the 2s stage equations.
fn newton_stages<T: Scalar>(
    t1: &ButcherTableau<T>,
    t2: &ButcherTableau<T>,
    problem: &ModelProblem<T>,
    h: T,
    state: State<T>,
) -> Result<Vector<T>> {
    let s = t1.s;
    let tol = T::newton_tol() * T::one().max(state.0.abs()).max(state.1.abs());
    let mut x: Vec<T> = (0..2 * s).map(|i| if i < s { state.0 } else { state.1 }).collect();
    let mut r = stage_residual(t1, t2, problem, h, state, &x);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let rn = r.norm_inf();
        if rn <= tol {
            return Ok(Vector(x));
        }
        let jac = stage_jacobian(t1, t2, problem, h, &x);
        let neg: Vec<T> = r.iter().map(|&v| -v).collect();
        let dx = Lu::factor(&jac)?.solve(&neg)?;
        let mut lambda = T::one();
        let (mut best_x, mut best_r) = (x.clone(), r.clone());
        for _ in 0..30 {
            let trial: Vec<T> = x.iter().zip(dx.iter()).map(|(&a, &d)| a + lambda * d).collect();
            let tr = stage_residual(t1, t2, problem, h, state, &trial);
            let accept = tr.norm_inf() < rn;
            best_x = trial;
            best_r = tr;
            if accept {
                break;
            }
            lambda = lambda * T::lit(0.5);
        }
        x = best_x;
        r = best_r;
    }
    let residual = r.norm_inf();
    if residual <= tol {
        return Ok(Vector(x));
    }
    Err(Error::Solver { iterations: MAX_NEWTON_ITERATIONS, residual: residual.as_f64() })
}

/// States `x_0, …, x_m`, stopping early at the first failed step.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub states: Vec<State<T>>,
    pub error: Option<Error>,
}

pub fn simulate<T: Scalar>(map: &StepMap<T>, state0: State<T>, n: usize) -> Trajectory<T> {
    let mut states = Vec::with_capacity(n + 1);
    states.push(state0);
    let mut x = state0;
    for _ in 0..n {
        match map.step(x) {
            Ok(next) => {
                x = next;
                states.push(x);
            }
            Err(e) => return Trajectory { states, error: Some(e) },
        }
    }
    Trajectory { states, error: None }
}

/// Largest allowed `‖Φ(x) − x‖∞` at a point treated as fixed.
pub const FIXED_POINT_TOL: f64 = 1e-10;

/// `DΦ_h` at `point` by central differences with increment `1e-6·max(1, |x_j|)`.
pub fn fd_map_jacobian<T: Scalar>(map: &StepMap<T>, point: State<T>) -> Result<Matrix<T>> {
    let x = [point.0, point.1];
    let mut jac = Matrix::zeros(2, 2);
    for j in 0..2 {
        let d = T::lit(1e-6) * T::one().max(x[j].abs());
        let mut plus = x;
        let mut minus = x;
        plus[j] = plus[j] + d;
        minus[j] = minus[j] - d;
        let fp = map.step((plus[0], plus[1]))?;
        let fm = map.step((minus[0], minus[1]))?;
        jac[(0, j)] = (fp.0 - fm.0) / (d + d);
        jac[(1, j)] = (fp.1 - fm.1) / (d + d);
    }
    Ok(jac)
}

/// `J_N = (DΦ_h − I)/h` at a fixed point; exact for linear problems.
pub fn discrete_jacobian<T: Scalar>(map: &StepMap<T>, point: State<T>) -> Result<Matrix<T>> {
    let image = map.step(point)?;
    let residual = (image.0 - point.0).abs().max((image.1 - point.1).abs());
    if !(residual <= T::lit(FIXED_POINT_TOL)) {
        return Err(Error::NotFixedPoint { p: point.0.as_f64(), q: point.1.as_f64(), residual: residual.as_f64() });
    }
    let dphi = match &map.matrix {
        Some(m) => m.clone(),
        None => fd_map_jacobian(map, point)?,
    };
    Ok(dphi.sub(&Matrix::identity(2)).scale(T::one() / map.h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumClass {
    Elliptic,
    Hyperbolic,
    Degenerate,
}

/// Relative band separating genuine elliptic/hyperbolic spectra from degenerate ones.
pub const CLASSIFY_TOL: f64 = 1e-9;

pub fn classify<T: Scalar>(m: &Matrix<T>) -> Result<EquilibriumClass> {
    let [l1, l2] = eig2(m)?;
    let band = T::lit(CLASSIFY_TOL) * m.norm_inf();
    Ok(if l1.im.abs() > band {
        EquilibriumClass::Elliptic
    } else if l1.im.is_zero() && l1.re * l2.re < -(band * band) {
        EquilibriumClass::Hyperbolic
    } else {
        EquilibriumClass::Degenerate
    })
}

#[derive(Debug, Clone)]
pub struct EquilibriumReport<T> {
    pub location: State<T>,
    pub continuous_matrix: Matrix<T>,
    pub discrete_matrix: Matrix<T>,
    pub continuous_class: EquilibriumClass,
    pub discrete_class: EquilibriumClass,
    pub preserved: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Elliptic,
    Hyperbolic,
    Mixed,
}

#[derive(Debug, Clone)]
pub struct SystemReport<T> {
    pub reports: Vec<EquilibriumReport<T>>,
    /// Label of the discrete equilibria taken together.
    pub overall: Structure,
}

pub fn classify_system<T: Scalar>(problem: ModelProblem<T>, method: Method<T>, h: T) -> Result<SystemReport<T>> {
    let map = StepMap::new(method, problem, h)?;
    let mut reports = Vec::new();
    for point in problem.equilibria() {
        let continuous_matrix = problem.continuous_jacobian(point);
        let discrete_matrix = discrete_jacobian(&map, point)?;
        let continuous_class = classify(&continuous_matrix)?;
        let discrete_class = classify(&discrete_matrix)?;
        reports.push(EquilibriumReport {
            location: point,
            continuous_matrix,
            discrete_matrix,
            continuous_class,
            discrete_class,
            preserved: continuous_class == discrete_class,
        });
    }
    let all = |c: EquilibriumClass| reports.iter().all(|r| r.discrete_class == c);
    let overall = if all(EquilibriumClass::Elliptic) {
        Structure::Elliptic
    } else if all(EquilibriumClass::Hyperbolic) {
        Structure::Hyperbolic
    } else {
        Structure::Mixed
    };
    Ok(SystemReport { reports, overall })
}

/// Thresholds for declaring `p_l → 1` and `q_l → +∞` on a finite run.
pub const P_LIMIT_TOL: f64 = 1e-6;
pub const Q_DIVERGED: f64 = 1e8;

/// Iterates `map` from `state0` until `p_l` is within [`P_LIMIT_TOL`] of 1 while
/// `q` is above [`Q_DIVERGED`] and still increasing, returning the step count,
/// or `None` if that does not happen within `max_steps`.
pub fn logistic_limit_steps<T: Scalar>(map: &StepMap<T>, state0: State<T>, max_steps: usize) -> Result<Option<usize>> {
    let p_tol = T::lit(P_LIMIT_TOL);
    let q_big = T::lit(Q_DIVERGED);
    let mut x = state0;
    for l in 1..=max_steps {
        let next = map.step(x)?;
        if (next.0 - T::one()).abs() <= p_tol && x.1 >= q_big && next.1 > x.1 {
            return Ok(Some(l));
        }
        x = next;
    }
    Ok(None)
}
