//! CSV and JSON renderings of results. Reals are written with 17 significant digits.

use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::{EquilibriumReport, State, SystemReport};
use crate::numerics::Matrix;
use crate::region::{RegionResult, SpectralReport};
use crate::scalar::Scalar;
use crate::tableau::fmt17;

/// `z_lo,z_hi,principal`, one row per interval; `principal` is 1 for the
/// interval starting at the smallest grid point.
pub fn region_csv<T: Scalar>(r: &RegionResult<T>) -> String {
    let mut out = String::from("z_lo,z_hi,principal\n");
    let has_principal = r.principal_endpoint > T::zero();
    for (i, &(lo, hi)) in r.intervals.iter().enumerate() {
        let principal = u8::from(i == 0 && has_principal);
        out.push_str(&format!("{},{},{principal}\n", fmt17(lo.as_f64()), fmt17(hi.as_f64())));
    }
    out
}

pub fn trajectory_csv<T: Scalar>(states: &[State<T>]) -> String {
    let mut out = String::from("n,p,q\n");
    for (n, (p, q)) in states.iter().enumerate() {
        out.push_str(&format!("{n},{},{}\n", fmt17(p.as_f64()), fmt17(q.as_f64())));
    }
    out
}

#[derive(Serialize)]
struct SpectralJson {
    z: f64,
    h: f64,
    a1: f64,
    a2: f64,
    trace: f64,
    det: f64,
    discriminant: f64,
    eigenvalues: [[f64; 2]; 2],
    r_plus: Option<f64>,
    r_minus: Option<f64>,
}

pub fn spectral_json<T: Scalar>(r: &SpectralReport<T>) -> Value {
    let e = |i: usize| [r.eigenvalues[i].re.as_f64(), r.eigenvalues[i].im.as_f64()];
    serde_json::to_value(SpectralJson {
        z: r.z.as_f64(),
        h: r.h.as_f64(),
        a1: r.a1.as_f64(),
        a2: r.a2.as_f64(),
        trace: r.trace.as_f64(),
        det: r.det.as_f64(),
        discriminant: r.discriminant.as_f64(),
        eigenvalues: [e(0), e(1)],
        r_plus: r.r_plus.map(|x| x.as_f64()),
        r_minus: r.r_minus.map(|x| x.as_f64()),
    })
    .expect("plain struct serializes")
}

fn matrix_json<T: Scalar>(m: &Matrix<T>) -> Value {
    json!(m.to_rows_f64())
}

pub fn equilibrium_json<T: Scalar>(r: &EquilibriumReport<T>) -> Value {
    json!({
        "location": [r.location.0.as_f64(), r.location.1.as_f64()],
        "continuous_matrix": matrix_json(&r.continuous_matrix),
        "discrete_matrix": matrix_json(&r.discrete_matrix),
        "continuous_class": r.continuous_class,
        "discrete_class": r.discrete_class,
        "preserved": r.preserved,
    })
}

pub fn system_json<T: Scalar>(r: &SystemReport<T>) -> Value {
    json!({
        "equilibria": r.reports.iter().map(equilibrium_json).collect::<Vec<_>>(),
        "overall": r.overall,
    })
}
