//! A one-step method as used by the dynamics and region code, and lookup of
//! catalog methods by name.

use crate::composition::CompositionScheme;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tableau::{
    gauss, lobatto_iiia, lobatto_iiib, lobatto_pair, symplectic_euler, ButcherTableau, PartitionedPair,
};

/// Largest stage count the catalog builds.
pub const MAX_STAGES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Method<T> {
    Rk(ButcherTableau<T>),
    Prk(PartitionedPair<T>),
    Composed(Box<CompositionScheme<T>>),
}

impl<T: Scalar> Method<T> {
    pub fn name(&self) -> &str {
        match self {
            Method::Rk(t) => &t.name,
            Method::Prk(p) => &p.name,
            Method::Composed(c) => &c.name,
        }
    }

    pub fn classical_order(&self) -> usize {
        match self {
            Method::Rk(t) => t.classical_order,
            Method::Prk(p) => p.classical_order(),
            Method::Composed(c) => c.order,
        }
    }

    /// The method as a partitioned pair; an RK tableau becomes `(t, t)`.
    /// `None` for compositions.
    pub fn as_pair(&self) -> Option<PartitionedPair<T>> {
        match self {
            Method::Rk(t) => Some(PartitionedPair::diagonal(t)),
            Method::Prk(p) => Some(p.clone()),
            Method::Composed(_) => None,
        }
    }

    /// Stage count of a non-composed method.
    pub fn stages(&self) -> Option<usize> {
        match self {
            Method::Rk(t) => Some(t.s),
            Method::Prk(p) => Some(p.s()),
            Method::Composed(_) => None,
        }
    }
}

impl<T> From<ButcherTableau<T>> for Method<T> {
    fn from(t: ButcherTableau<T>) -> Self {
        Method::Rk(t)
    }
}

impl<T> From<PartitionedPair<T>> for Method<T> {
    fn from(p: PartitionedPair<T>) -> Self {
        Method::Prk(p)
    }
}

impl<T> From<CompositionScheme<T>> for Method<T> {
    fn from(c: CompositionScheme<T>) -> Self {
        Method::Composed(Box::new(c))
    }
}

fn split_stage_suffix(name: &str) -> (&str, Option<usize>) {
    if let Some((head, tail)) = name.rsplit_once('-') {
        if let Ok(s) = tail.parse() {
            return (head, Some(s));
        }
    }
    (name, None)
}

/// Look up a catalog method.
///
/// Accepted families: `midpoint`, `gauss`, `lobatto` (the IIIA–IIIB pair),
/// `lobatto-iiia`, `lobatto-iiib`, `symplectic-euler`. The stage count comes
/// from a `-s` suffix (`gauss-3`) or from `stages`; giving both with
/// different values is an error.
pub fn catalog<T: Scalar>(name: &str, stages: Option<usize>) -> Result<Method<T>> {
    let (family, suffix) = split_stage_suffix(name);
    let s = match (suffix, stages) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Argument(format!("{name} conflicts with stage count {b}")));
        }
        (a, b) => a.or(b),
    };
    let bounded = |lo: usize, default: Option<usize>| -> Result<usize> {
        let s = s.or(default).ok_or_else(|| Error::Argument(format!("{family} needs a stage count")))?;
        if s < lo || s > MAX_STAGES {
            return Err(Error::Argument(format!("{family} supports {lo} to {MAX_STAGES} stages, got {s}")));
        }
        Ok(s)
    };
    match family {
        "midpoint" => {
            if s.is_some_and(|s| s != 1) {
                return Err(Error::Argument("midpoint has exactly one stage".into()));
            }
            gauss(1).map(Method::Rk)
        }
        "symplectic-euler" => {
            if s.is_some_and(|s| s != 1) {
                return Err(Error::Argument("symplectic-euler has exactly one stage".into()));
            }
            Ok(Method::Prk(symplectic_euler()))
        }
        "gauss" => gauss(bounded(1, None)?).map(Method::Rk),
        "lobatto" => lobatto_pair(bounded(2, None)?).map(Method::Prk),
        "lobatto-iiia" => lobatto_iiia(bounded(2, None)?).map(Method::Rk),
        "lobatto-iiib" => lobatto_iiib(bounded(2, None)?).map(Method::Rk),
        _ => Err(Error::Argument(format!("unknown method {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        assert_eq!(catalog::<f64>("midpoint", None).unwrap().name(), "gauss-1");
        assert_eq!(catalog::<f64>("gauss", Some(3)).unwrap().name(), "gauss-3");
        assert_eq!(catalog::<f64>("gauss-3", None).unwrap().name(), "gauss-3");
        assert_eq!(catalog::<f64>("lobatto-4", None).unwrap().name(), "lobatto-4");
        assert_eq!(catalog::<f64>("lobatto-iiib-2", None).unwrap().name(), "lobatto-iiib-2");
        assert!(matches!(catalog::<f64>("symplectic-euler", None).unwrap(), Method::Prk(_)));
    }

    #[test]
    fn lookup_errors() {
        assert!(catalog::<f64>("radau", Some(2)).is_err());
        assert!(catalog::<f64>("gauss", None).is_err());
        assert!(catalog::<f64>("gauss-2", Some(3)).is_err());
        assert!(catalog::<f64>("lobatto", Some(1)).is_err());
        assert!(catalog::<f64>("gauss", Some(11)).is_err());
        assert!(catalog::<f64>("midpoint", Some(2)).is_err());
    }

    #[test]
    fn rk_as_pair_is_diagonal() {
        let m = catalog::<f64>("gauss-2", None).unwrap();
        let p = m.as_pair().unwrap();
        assert_eq!(p.first, p.second);
        assert_eq!(m.classical_order(), 4);
    }
}
