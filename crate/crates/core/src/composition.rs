//! Symmetric compositions `Ψ_h = Φ_{γ_k h} ∘ … ∘ Φ_{γ_1 h}` of a basic method.

use crate::dynamics::{ModelProblem, StepMap};
use crate::error::{Error, Result};
use crate::method::{catalog, Method};
use crate::numerics::Vector;
use crate::scalar::Scalar;
use crate::tableau::fmt17;

#[derive(Debug, Clone, PartialEq)]
pub struct CompositionScheme<T> {
    pub base: Method<T>,
    /// Substep fractions, applied first to last.
    pub gammas: Vector<T>,
    pub order: usize,
    pub name: String,
}

impl<T: Scalar> CompositionScheme<T> {
    pub fn new(base: Method<T>, gammas: Vector<T>, order: usize, name: impl Into<String>) -> Result<Self> {
        let k = gammas.len();
        if k == 0 {
            return Err(Error::Argument("composition needs at least one substep".into()));
        }
        let sym_tol = T::lit(1e-14).max(T::unit_roundoff() * T::lit(100.0));
        if (0..k).any(|i| (gammas[i] - gammas[k - 1 - i]).abs() > sym_tol) {
            return Err(Error::Argument("substep fractions are not palindromic".into()));
        }
        let sum_tol = T::lit(1e-12).max(T::unit_roundoff() * T::lit(100.0));
        let sum = gammas.sum();
        if (sum - T::one()).abs() > sum_tol {
            return Err(Error::Argument(format!("substep fractions sum to {sum}, expected 1")));
        }
        let name = name.into();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::Argument(format!("scheme name {name:?} must be a single non-empty token")));
        }
        Ok(Self { base, gammas, order, name })
    }

    /// Recursive triple jump over `base`, raising its classical order to `target_order`.
    pub fn triple_jump(base: Method<T>, target_order: usize) -> Result<Self> {
        let p = base.classical_order();
        let gammas = triple_jump(p, target_order)?;
        let name =
            if target_order == p { base.name().to_string() } else { format!("{}-tj{target_order}", base.name()) };
        Self::new(base, gammas, target_order, name)
    }

    /// Whether every substep of the base is a single-stage method.
    pub fn base_is_one_stage(&self) -> bool {
        self.base.stages() == Some(1)
    }

    /// One line: `name base γ_1 … γ_k order`.
    pub fn to_line(&self) -> String {
        let mut parts = vec![self.name.clone(), self.base.name().to_string()];
        parts.extend(self.gammas.iter().map(|g| fmt17(g.as_f64())));
        parts.push(self.order.to_string());
        parts.join(" ")
    }

    /// Inverse of [`CompositionScheme::to_line`]; the base is resolved through the catalog.
    pub fn from_line(line: &str) -> Result<Self> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |msg: String| Error::Parse { line: 1, msg };
        if toks.len() < 4 {
            return Err(parse_err("expected `name base γ… order`".into()));
        }
        let order: usize = toks[toks.len() - 1].parse().map_err(|e| parse_err(format!("order: {e}")))?;
        let gammas = toks[2..toks.len() - 1]
            .iter()
            .map(|t| t.parse::<f64>().map(T::lit))
            .collect::<std::result::Result<Vec<T>, _>>()
            .map_err(|e| parse_err(format!("fraction: {e}")))?;
        let base = catalog(toks[1], None)?;
        Self::new(base, Vector(gammas), order, toks[0])
    }
}

/// Substep fractions of the recursive triple jump from `base_order` to `target_order`.
///
/// Each level from order `p` uses `x = 2^{1/(p+1)}`, outer fraction `1/(2 − x)`
/// and middle fraction `−x/(2 − x)`.
pub fn triple_jump<T: Scalar>(base_order: usize, target_order: usize) -> Result<Vector<T>> {
    if base_order < 2 || !base_order.is_multiple_of(2) || !target_order.is_multiple_of(2) || target_order < base_order {
        return Err(Error::Argument(format!(
            "triple jump needs even orders with 2 <= base <= target, got {base_order} -> {target_order}"
        )));
    }
    let mut gammas = vec![T::one()];
    let mut p = base_order;
    while p < target_order {
        let x = T::lit(2.0).nth_root(p as u32 + 1);
        let outer = T::one() / (T::lit(2.0) - x);
        let mid = -x * outer;
        let mut next = Vec::with_capacity(3 * gammas.len());
        next.extend(gammas.iter().map(|&g| outer * g));
        next.extend(gammas.iter().map(|&g| mid * g));
        next.extend(gammas.iter().map(|&g| outer * g));
        gammas = next;
        p += 2;
    }
    Ok(Vector(gammas))
}

/// The composed one-step map of `scheme` on `problem` with step `h`.
pub fn compose_step<T: Scalar>(scheme: &CompositionScheme<T>, problem: ModelProblem<T>, h: T) -> Result<StepMap<T>> {
    StepMap::new(Method::Composed(Box::new(scheme.clone())), problem, h)
}
