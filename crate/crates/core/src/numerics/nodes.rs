//! Gauss and Lobatto abscissae on `[0, 1]` from Legendre polynomials.
//!
//! Roots are found by Newton's method started at Chebyshev points. If an
//! iterate escapes its Bruns/interlacing bracket the root is recomputed by
//! bisection on that bracket.

use super::matrix::Vector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence. `P_{-1}` is taken as 0.
pub fn legendre_pair<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut prev = T::zero();
    let mut cur = T::one();
    for k in 0..n {
        let kk = T::from_count(k);
        let next = ((kk + kk + T::one()) * x * cur - kk * prev) / (kk + T::one());
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `P_0(x), …, P_n(x)`.
pub fn legendre_values<T: Scalar>(n: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::one());
    if n >= 1 {
        out.push(x);
    }
    for k in 1..n {
        let kk = T::from_count(k);
        let next = ((kk + kk + T::one()) * x * out[k] - kk * out[k - 1]) / (kk + T::one());
        out.push(next);
    }
    out
}

/// `P_n`, `P_n'` and `P_n''` at an interior point `|x| < 1`.
fn legendre_derivs<T: Scalar>(n: usize, x: T) -> (T, T, T) {
    let (p, pm1) = legendre_pair(n, x);
    let nn = T::from_count(n);
    let one_minus = T::one() - x * x;
    let dp = nn * (pm1 - x * p) / one_minus;
    let ddp = (x * (dp + dp) - nn * (nn + T::one()) * p) / one_minus;
    (p, dp, ddp)
}

/// Newton on `f` with derivative `df`, guarded by the bracket `(lo, hi)`.
fn bracketed_root<T: Scalar>(mut x: T, lo: T, hi: T, f: impl Fn(T) -> (T, T)) -> T {
    let tiny = T::unit_roundoff() * T::lit(4.0);
    for _ in 0..100 {
        let (v, dv) = f(x);
        if v.is_zero() {
            return x;
        }
        let next = x - v / dv;
        if !(next > lo && next < hi) {
            break;
        }
        if (next - x).abs() <= tiny {
            // One more polish step from the converged point.
            let (v, dv) = f(next);
            let last = next - v / dv;
            return if last > lo && last < hi { last } else { next };
        }
        x = next;
    }
    bisect_root(lo, hi, |t| f(t).0)
}

fn bisect_root<T: Scalar>(mut lo: T, mut hi: T, f: impl Fn(T) -> T) -> T {
    let flo = f(lo);
    let half = T::lit(0.5);
    for _ in 0..400 {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.is_zero() {
            return mid;
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * half
}

/// Roots of `P_n` on `(-1, 1)`, increasing, exactly antisymmetric.
fn legendre_roots<T: Scalar>(n: usize) -> Vec<T> {
    use std::f64::consts::PI;
    let nn = n as f64;
    let half = T::lit(0.5);
    let mut roots = Vec::with_capacity(n);
    for k in 1..=n {
        let kk = k as f64;
        // Chebyshev point of the first kind as the starting guess. Guesses and
        // brackets only steer Newton, so f64 is enough here.
        let guess = T::lit((PI * (kk - 0.5) / nn).cos());
        // Bruns: the k-th root lies at cos θ with (k-½)π/(n+½) < θ < kπ/(n+½).
        let hi = T::lit((PI * (kk - 0.5) / (nn + 0.5)).cos());
        let lo = T::lit((PI * kk / (nn + 0.5)).cos());
        let guess = if guess > lo && guess < hi { guess } else { (lo + hi) * half };
        roots.push(bracketed_root(guess, lo, hi, |x| {
            let (p, dp, _) = legendre_derivs(n, x);
            (p, dp)
        }));
    }
    roots.reverse();
    symmetrize(&mut roots);
    roots
}

fn symmetrize<T: Scalar>(xs: &mut [T]) {
    let n = xs.len();
    let half = T::lit(0.5);
    for i in 0..n / 2 {
        let a = (xs[n - 1 - i] - xs[i]) * half;
        xs[i] = -a;
        xs[n - 1 - i] = a;
    }
    if n % 2 == 1 {
        xs[n / 2] = T::zero();
    }
}

fn to_unit_interval<T: Scalar>(x: T) -> T {
    (x + T::one()) * T::lit(0.5)
}

/// Gauss–Legendre abscissae on `(0, 1)`.
pub fn gauss_nodes<T: Scalar>(s: usize) -> Result<Vector<T>> {
    if s < 1 {
        return Err(Error::Argument("Gauss nodes need s >= 1".into()));
    }
    Ok(Vector(legendre_roots::<T>(s).into_iter().map(to_unit_interval).collect()))
}

/// Lobatto abscissae on `[0, 1]`: both endpoints plus the roots of `P_{s-1}'`.
pub fn lobatto_nodes<T: Scalar>(s: usize) -> Result<Vector<T>> {
    if s < 2 {
        return Err(Error::Argument(format!("Lobatto nodes need s >= 2, got {s}")));
    }
    let n = s - 1;
    let mut interior = Vec::with_capacity(s - 2);
    if s > 2 {
        // Roots of P_n' interlace with those of P_n.
        let brackets = legendre_roots::<T>(n);
        for k in 0..s - 2 {
            let (lo, hi) = (brackets[k], brackets[k + 1]);
            // Chebyshev point of the second kind, pulled into the bracket.
            let cheb = T::lit(-(std::f64::consts::PI * (k + 1) as f64 / n as f64).cos());
            let guess = if cheb > lo && cheb < hi { cheb } else { (lo + hi) * T::lit(0.5) };
            interior.push(bracketed_root(guess, lo, hi, |x| {
                let (_, dp, ddp) = legendre_derivs(n, x);
                (dp, ddp)
            }));
        }
        symmetrize(&mut interior);
    }
    let mut out = Vec::with_capacity(s);
    out.push(T::zero());
    out.extend(interior.into_iter().map(to_unit_interval));
    out.push(T::one());
    Ok(Vector(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dd;

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn gauss_small_cases() {
        close(&gauss_nodes::<f64>(1).unwrap(), &[0.5], 0.0);
        let r3 = 3f64.sqrt() / 6.0;
        close(&gauss_nodes::<f64>(2).unwrap(), &[0.5 - r3, 0.5 + r3], 1e-15);
        let r15 = 15f64.sqrt() / 10.0;
        close(&gauss_nodes::<f64>(3).unwrap(), &[0.5 - r15, 0.5, 0.5 + r15], 1e-15);
    }

    #[test]
    fn lobatto_small_cases() {
        close(&lobatto_nodes::<f64>(2).unwrap(), &[0.0, 1.0], 0.0);
        close(&lobatto_nodes::<f64>(3).unwrap(), &[0.0, 0.5, 1.0], 0.0);
        let r5 = 1.0 / 5f64.sqrt();
        close(&lobatto_nodes::<f64>(4).unwrap(), &[0.0, (1.0 - r5) / 2.0, (1.0 + r5) / 2.0, 1.0], 1e-15);
    }

    #[test]
    fn argument_errors() {
        assert!(gauss_nodes::<f64>(0).is_err());
        assert!(lobatto_nodes::<f64>(1).is_err());
    }

    #[test]
    fn residuals_and_shape() {
        for s in 1..=12 {
            let g = gauss_nodes::<f64>(s).unwrap();
            for &c in g.iter() {
                let (p, _) = legendre_pair(s, 2.0 * c - 1.0);
                assert!(p.abs() <= 1e-14, "gauss s={s} residual {p}");
            }
            assert!(g.windows(2).all(|w| w[0] < w[1]));
            assert!(g.iter().all(|&c| c > 0.0 && c < 1.0));
        }
        for s in 2..=12 {
            let l = lobatto_nodes::<f64>(s).unwrap();
            assert!(l.windows(2).all(|w| w[0] < w[1]));
            for i in 0..s {
                assert!((l[i] + l[s - 1 - i] - 1.0).abs() <= 1e-13);
            }
            for &c in &l[1..s - 1] {
                let (_, dp, _) = legendre_derivs(s - 1, 2.0 * c - 1.0);
                assert!(dp.abs() <= 1e-12, "lobatto s={s} residual {dp}");
            }
        }
    }

    #[test]
    fn double_double_nodes_refine_f64() {
        let r15 = Dd::from(15.0).sqrt() / Dd::from(10.0);
        let g = gauss_nodes::<Dd>(3).unwrap();
        assert!((g[2] - (Dd::from(0.5) + r15)).abs() < Dd::from(1e-30));
        let r5 = Dd::from(1.0) / Dd::from(5.0).sqrt();
        let l = lobatto_nodes::<Dd>(4).unwrap();
        assert!((l[1] - (Dd::from(1.0) - r5) / Dd::from(2.0)).abs() < Dd::from(1e-30));
    }
}
