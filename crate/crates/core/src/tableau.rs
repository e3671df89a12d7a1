//! Runge-Kutta and partitioned Runge-Kutta coefficient sets, the catalog of
//! symplectic methods, and algebraic symplecticity checks.
//!
//! Collocation and adjoint conditions are imposed in the Legendre basis
//! `P_k(2t - 1)` rather than in monomials. The span is identical, so the
//! resulting coefficients solve the usual `Σ_j a_ij c_j^{k-1} = c_i^k / k`
//! systems, but the Legendre–Vandermonde matrix stays well conditioned up to
//! ten or more stages.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numerics::{gauss_nodes, legendre_values, lobatto_nodes, Lu, Matrix, Vector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau<T> {
    pub s: usize,
    pub a: Matrix<T>,
    pub b: Vector<T>,
    pub c: Vector<T>,
    pub name: String,
    pub classical_order: usize,
    /// Known A-stability of the family; not derived from the coefficients.
    pub a_stable: bool,
}

/// Two tableaus sharing a stage count; `first` integrates the `p` equation,
/// `second` the `q` equation.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedPair<T> {
    pub first: ButcherTableau<T>,
    pub second: ButcherTableau<T>,
    pub name: String,
}

fn weight_sum_tol<T: Scalar>() -> T {
    T::lit(1e-12).max(T::unit_roundoff() * T::lit(100.0))
}

impl<T: Scalar> ButcherTableau<T> {
    pub fn new(
        a: Matrix<T>,
        b: Vector<T>,
        c: Vector<T>,
        name: impl Into<String>,
        classical_order: usize,
        a_stable: bool,
    ) -> Result<Self> {
        let s = b.len();
        if a.rows() != s || a.cols() != s || c.len() != s {
            return Err(Error::Dimension(format!(
                "tableau with {s} weights needs a {s}x{s} matrix and {s} abscissae, got {}x{} and {}",
                a.rows(),
                a.cols(),
                c.len()
            )));
        }
        if s == 0 {
            return Err(Error::Argument("tableau needs at least one stage".into()));
        }
        let sum = b.sum();
        if (sum - T::one()).abs() > weight_sum_tol::<T>() {
            return Err(Error::Argument(format!("weights sum to {sum}, expected 1")));
        }
        let name = name.into();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::Argument(format!("tableau name {name:?} must be a single non-empty token")));
        }
        Ok(Self { s, a, b, c, name, classical_order, a_stable })
    }

    /// Row sums of `A`, i.e. `A e_s`.
    pub fn row_sums(&self) -> Vector<T> {
        self.a.mul_vec(&Vector::ones(self.s))
    }

    /// Symmetric (self-adjoint) coefficient structure:
    /// `c_i + c_{s+1-i} = 1` and `a_ij + a_{s+1-i,s+1-j} = b_j`.
    pub fn is_symmetric(&self) -> bool {
        let s = self.s;
        let tol = T::lit(1e-12).max(T::unit_roundoff() * T::lit(1e3));
        (0..s).all(|i| (self.c[i] + self.c[s - 1 - i] - T::one()).abs() <= tol)
            && (0..s)
                .all(|i| (0..s).all(|j| (self.a[(i, j)] + self.a[(s - 1 - i, s - 1 - j)] - self.b[j]).abs() <= tol))
    }

    pub fn cast_f64(&self) -> ButcherTableau<f64> {
        ButcherTableau {
            s: self.s,
            a: self.a.cast_f64(),
            b: Vector(self.b.cast_f64()),
            c: Vector(self.c.cast_f64()),
            name: self.name.clone(),
            classical_order: self.classical_order,
            a_stable: self.a_stable,
        }
    }

    /// Plain-text table: `s name order`, then the rows of `A`, then `b`, then `c`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.s, self.name, self.classical_order);
        let mut line = |xs: &mut dyn Iterator<Item = f64>| {
            let cells: Vec<String> = xs.map(fmt17).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        };
        for i in 0..self.s {
            line(&mut self.a.row(i).iter().map(|x| x.as_f64()));
        }
        line(&mut self.b.iter().map(|x| x.as_f64()));
        line(&mut self.c.iter().map(|x| x.as_f64()));
        out
    }

    /// Inverse of [`ButcherTableau::to_text`]. `a_stable` is not part of the
    /// format and is restored only for names produced by the catalog.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let t = parse_block(&mut lines)?;
        if let Some((n, _)) = lines.next() {
            return Err(Error::Parse { line: n + 1, msg: "trailing content after tableau".into() });
        }
        Ok(t)
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_block<'a, T: Scalar>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<ButcherTableau<T>> {
    let (n0, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 3 {
        return Err(Error::Parse { line: n0 + 1, msg: "header must be `s name order`".into() });
    }
    let s: usize = head[0].parse().map_err(|e| Error::Parse { line: n0 + 1, msg: format!("stage count: {e}") })?;
    let order: usize = head[2].parse().map_err(|e| Error::Parse { line: n0 + 1, msg: format!("order: {e}") })?;
    let name = head[1].to_string();
    let mut row = |what: &str| -> Result<Vec<T>> {
        let (n, l) = lines.next().ok_or(Error::Parse { line: n0 + 1, msg: format!("missing {what}") })?;
        let vals: Vec<f64> = l
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: n + 1, msg: format!("{what}: {e}") })?;
        if vals.len() != s {
            return Err(Error::Parse { line: n + 1, msg: format!("{what} has {} entries, expected {s}", vals.len()) });
        }
        Ok(vals.into_iter().map(T::lit).collect())
    };
    let mut a = Vec::with_capacity(s * s);
    for i in 0..s {
        a.extend(row(&format!("row {} of A", i + 1))?);
    }
    let b = row("b")?;
    let c = row("c")?;
    let a_stable = catalog_a_stable(&name);
    ButcherTableau::new(Matrix::from_vec(s, s, a)?, Vector(b), Vector(c), name, order, a_stable)
}

fn catalog_a_stable(name: &str) -> bool {
    name.starts_with("gauss-")
        || name.starts_with("lobatto-iiia-")
        || name.starts_with("lobatto-iiib-")
        || name == "implicit-euler"
}

impl<T: Scalar> PartitionedPair<T> {
    pub fn new(first: ButcherTableau<T>, second: ButcherTableau<T>, name: impl Into<String>) -> Result<Self> {
        if first.s != second.s {
            return Err(Error::Dimension(format!("pair stage counts differ: {} vs {}", first.s, second.s)));
        }
        Ok(Self { first, second, name: name.into() })
    }

    /// Treat a single tableau as the pair `(t, t)`.
    pub fn diagonal(t: &ButcherTableau<T>) -> Self {
        Self { first: t.clone(), second: t.clone(), name: t.name.clone() }
    }

    pub fn s(&self) -> usize {
        self.first.s
    }

    pub fn classical_order(&self) -> usize {
        self.first.classical_order.min(self.second.classical_order)
    }

    pub fn to_text(&self) -> String {
        format!("pair {}\n{}{}", self.name, self.first.to_text(), self.second.to_text())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (n0, head) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let name = match head.split_whitespace().collect::<Vec<_>>()[..] {
            ["pair", name] => name.to_string(),
            _ => return Err(Error::Parse { line: n0 + 1, msg: "expected `pair <name>`".into() }),
        };
        let first = parse_block(&mut lines)?;
        let second = parse_block(&mut lines)?;
        if let Some((n, _)) = lines.next() {
            return Err(Error::Parse { line: n + 1, msg: "trailing content after pair".into() });
        }
        Self::new(first, second, name)
    }
}

/// `Σ_i b_i P_k(x_i) = δ_k0` with `x = 2c - 1`.
fn legendre_system<T: Scalar>(c: &[T]) -> Result<(Lu<T>, Vec<Vec<T>>)> {
    let s = c.len();
    let two = T::lit(2.0);
    let vals: Vec<Vec<T>> = c.iter().map(|&ci| legendre_values(s, two * ci - T::one())).collect();
    // Row k, column i: P_k(x_i).
    let lmat = Matrix::from_fn(s, s, |k, i| vals[i][k]);
    Ok((Lu::factor(&lmat)?, vals))
}

/// `∫_0^{c} P_k(2t - 1) dt` for k = 0..s-1, from P_0..P_s at x = 2c - 1.
fn legendre_integrals<T: Scalar>(p: &[T], x: T) -> Vec<T> {
    let s = p.len() - 1;
    let mut out = Vec::with_capacity(s);
    out.push((x + T::one()) * T::lit(0.5));
    for k in 1..s {
        let denom = T::from_count(2 * (2 * k + 1));
        out.push((p[k + 1] - p[k - 1]) / denom);
    }
    out
}

fn quadrature_weights<T: Scalar>(lu: &Lu<T>, s: usize) -> Result<Vector<T>> {
    let mut rhs = vec![T::zero(); s];
    rhs[0] = T::one();
    lu.solve(&rhs)
}

/// Collocation matrix: row `i` reproduces `∫_0^{c_i}` of every degree `< s` polynomial.
fn collocation_matrix<T: Scalar>(lu: &Lu<T>, vals: &[Vec<T>], c: &[T]) -> Result<Matrix<T>> {
    let s = c.len();
    let two = T::lit(2.0);
    let mut a = Matrix::zeros(s, s);
    for i in 0..s {
        let rhs = legendre_integrals(&vals[i], two * c[i] - T::one());
        let row = lu.solve(&rhs)?;
        for j in 0..s {
            a[(i, j)] = row[j];
        }
    }
    Ok(a)
}

/// Adjoint (`D(s)`) matrix: `Σ_i b_i φ(c_i) a_ij = b_j ∫_{c_j}^1 φ` for every degree `< s` polynomial.
fn adjoint_matrix<T: Scalar>(lu: &Lu<T>, vals: &[Vec<T>], b: &[T], c: &[T]) -> Result<Matrix<T>> {
    let s = c.len();
    let two = T::lit(2.0);
    let mut a = Matrix::zeros(s, s);
    for j in 0..s {
        let ints = legendre_integrals(&vals[j], two * c[j] - T::one());
        let rhs: Vec<T> = (0..s)
            .map(|k| {
                let full = if k == 0 { T::one() } else { T::zero() };
                b[j] * (full - ints[k])
            })
            .collect();
        let weighted = lu.solve(&rhs)?;
        for i in 0..s {
            a[(i, j)] = weighted[i] / b[i];
        }
    }
    Ok(a)
}

/// s-stage Gauss collocation method (order 2s). `gauss(1)` is the implicit midpoint rule.
pub fn gauss<T: Scalar>(s: usize) -> Result<ButcherTableau<T>> {
    let c = gauss_nodes::<T>(s)?;
    let (lu, vals) = legendre_system(&c)?;
    let b = quadrature_weights(&lu, s)?;
    let a = collocation_matrix(&lu, &vals, &c)?;
    ButcherTableau::new(a, b, c, format!("gauss-{s}"), 2 * s, true)
}

pub fn lobatto_iiia<T: Scalar>(s: usize) -> Result<ButcherTableau<T>> {
    let c = lobatto_nodes::<T>(s)?;
    let (lu, vals) = legendre_system(&c)?;
    let b = quadrature_weights(&lu, s)?;
    let a = collocation_matrix(&lu, &vals, &c)?;
    ButcherTableau::new(a, b, c, format!("lobatto-iiia-{s}"), 2 * s - 2, true)
}

pub fn lobatto_iiib<T: Scalar>(s: usize) -> Result<ButcherTableau<T>> {
    let c = lobatto_nodes::<T>(s)?;
    let (lu, vals) = legendre_system(&c)?;
    let b = quadrature_weights(&lu, s)?;
    let a = adjoint_matrix(&lu, &vals, &b, &c)?;
    ButcherTableau::new(a, b, c, format!("lobatto-iiib-{s}"), 2 * s - 2, true)
}

/// Lobatto IIIA (on `p`) paired with Lobatto IIIB (on `q`).
pub fn lobatto_pair<T: Scalar>(s: usize) -> Result<PartitionedPair<T>> {
    PartitionedPair::new(lobatto_iiia(s)?, lobatto_iiib(s)?, format!("lobatto-{s}"))
}

/// Explicit Euler on `p` with implicit Euler on `q`.
pub fn symplectic_euler<T: Scalar>() -> PartitionedPair<T> {
    let one = |x: T| Matrix::from_fn(1, 1, |_, _| x);
    let first = ButcherTableau {
        s: 1,
        a: one(T::zero()),
        b: Vector(vec![T::one()]),
        c: Vector(vec![T::zero()]),
        name: "explicit-euler".into(),
        classical_order: 1,
        a_stable: false,
    };
    let second = ButcherTableau {
        s: 1,
        a: one(T::one()),
        b: Vector(vec![T::one()]),
        c: Vector(vec![T::one()]),
        name: "implicit-euler".into(),
        classical_order: 1,
        a_stable: true,
    };
    PartitionedPair { first, second, name: "symplectic-euler".into() }
}

/// `‖B A + Aᵀ B − b bᵀ‖∞` with `B = diag(b)`.
pub fn check_srk_symplectic<T: Scalar>(t: &ButcherTableau<T>) -> T {
    let bm = Matrix::diag(&t.b);
    let ba = bm.matmul(&t.a);
    ba.add(&ba.transpose()).sub(&Matrix::outer(&t.b, &t.b)).norm_inf()
}

/// Largest of `‖B⁽²⁾A⁽¹⁾ + A⁽²⁾ᵀB⁽¹⁾ − b⁽²⁾b⁽¹⁾ᵀ‖∞` and `‖b⁽¹⁾ − b⁽²⁾‖∞`.
pub fn check_sprk_symplectic<T: Scalar>(p: &PartitionedPair<T>) -> Result<T> {
    let (t1, t2) = (&p.first, &p.second);
    if t1.s != t2.s {
        return Err(Error::Dimension(format!("pair stage counts differ: {} vs {}", t1.s, t2.s)));
    }
    let b1m = Matrix::diag(&t1.b);
    let b2m = Matrix::diag(&t2.b);
    let cond = b2m.matmul(&t1.a).add(&t2.a.transpose().matmul(&b1m)).sub(&Matrix::outer(&t2.b, &t1.b)).norm_inf();
    let weights = t1.b.iter().zip(t2.b.iter()).fold(T::zero(), |acc, (&x, &y)| acc.max((x - y).abs()));
    Ok(cond.max(weights))
}

/// Residual threshold below which a method is declared symplectic.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
