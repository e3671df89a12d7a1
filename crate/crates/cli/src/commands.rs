use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};
use sympreg::io::{region_csv, spectral_json, system_json, trajectory_csv};
use sympreg::region::{lobatto_elliptic_endpoint, method_region, spectral_report};
use sympreg::{
    catalog, classify_system, simulate, ButcherTableau, CompositionScheme, Dd, Kind, Method, ModelProblem, Scalar,
    ScanConfig, StepMap,
};

use crate::{CliError, Command, Format, KindArg, MethodArgs, OutArgs, ProblemArg, ProblemArgs};

type Result<T> = std::result::Result<T, CliError>;

/// Samples in the spectral sidecar written next to a region file.
const SIDECAR_POINTS: usize = 512;

/// Published principal endpoints for the Lobatto IIIA-IIIB pairs.
#[allow(clippy::approx_constant)]
fn table1_reference() -> [(usize, f64); 5] {
    [(2, 2.0), (3, 8f64.sqrt()), (4, (42.0 - 6.0 * 29f64.sqrt()).sqrt()), (5, 3.140328), (10, 3.141590)]
}

pub(crate) fn run(command: Command) -> Result<()> {
    match command {
        Command::Tableau { method, out } => tableau(&method, &out),
        Command::Region { method, kind, zmax, out } => region(&method, kind, zmax, &out),
        Command::Table1 { out } => table1(&out),
        Command::Conjecture { stages, out } => conjecture(stages, &out),
        Command::Simulate { method, problem, h, steps, p0, q0, out } => {
            simulate_cmd(&method, &problem, h, steps, (p0, q0), &out)
        }
        Command::Classify { method, problem, h, out } => classify(&method, &problem, h, &out),
        Command::Compose { method, kind, zmax, out } => compose(&method, kind, zmax, &out),
    }
}

fn build_method(args: &MethodArgs) -> Result<Method<f64>> {
    let base = catalog::<f64>(&args.method, args.stages)?;
    match args.compose {
        None => Ok(base),
        Some(order) => Ok(Method::Composed(Box::new(CompositionScheme::triple_jump(base, order)?))),
    }
}

fn build_problem(args: &ProblemArgs) -> Result<ModelProblem<f64>> {
    match args.problem {
        ProblemArg::Logistic => {
            if args.beta.is_some() {
                return Err(CliError::Usage("--beta applies to the linear problems; use --alpha".into()));
            }
            Ok(ModelProblem::logistic(args.alpha.unwrap_or(1.0))?)
        }
        linear => {
            if args.alpha.is_some() {
                return Err(CliError::Usage("--alpha applies to the logistic problem; use --beta".into()));
            }
            let beta = args.beta.unwrap_or(1.0);
            Ok(if linear == ProblemArg::Elliptic {
                ModelProblem::elliptic(beta)?
            } else {
                ModelProblem::hyperbolic(beta)?
            })
        }
    }
}

fn kind_of(k: KindArg) -> Kind {
    match k {
        KindArg::Elliptic => Kind::Elliptic,
        KindArg::Hyperbolic => Kind::Hyperbolic,
    }
}

/// Scan resolution, overridable through `SYMPREG_GRID_N`.
fn grid_n() -> Result<usize> {
    match std::env::var("SYMPREG_GRID_N") {
        Err(_) => Ok(ScanConfig::default().grid_n),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 2 => Ok(n),
            _ => Err(CliError::Usage(format!("SYMPREG_GRID_N must be an integer >= 2, got {v:?}"))),
        },
    }
}

fn scan_config(zmax: f64) -> Result<ScanConfig> {
    if !(zmax.is_finite() && zmax > 0.0) {
        return Err(CliError::Usage(format!("--zmax must be positive, got {zmax}")));
    }
    Ok(ScanConfig { grid_n: grid_n()?, z_max: zmax, ..ScanConfig::default() })
}

fn format_or(out: &OutArgs, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = out.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!("this command does not support --format {f:?}").to_lowercase()))
    }
}

fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content)?,
        None => std::io::stdout().lock().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn tableau_json(t: &ButcherTableau<f64>) -> Value {
    json!({
        "name": t.name,
        "stages": t.s,
        "order": t.classical_order,
        "a_stable": t.a_stable,
        "a": t.a.to_rows_f64(),
        "b": t.b.0,
        "c": t.c.0,
    })
}

fn scheme_json(c: &CompositionScheme<f64>) -> Value {
    json!({
        "name": c.name,
        "base": c.base.name(),
        "order": c.order,
        "gammas": c.gammas.0,
    })
}

fn tableau(args: &MethodArgs, out: &OutArgs) -> Result<()> {
    let format = format_or(out, Format::Text, &[Format::Text, Format::Json])?;
    let method = build_method(args)?;
    let text = match (&method, format) {
        (Method::Rk(t), Format::Text) => t.to_text(),
        (Method::Prk(p), Format::Text) => p.to_text(),
        (Method::Composed(c), Format::Text) => format!("{}\n", c.to_line()),
        (Method::Rk(t), _) => json_text(&tableau_json(t)),
        (Method::Prk(p), _) => {
            json_text(&json!({ "name": p.name, "first": tableau_json(&p.first), "second": tableau_json(&p.second) }))
        }
        (Method::Composed(c), _) => json_text(&scheme_json(c)),
    };
    emit(out.out.as_deref(), &text)
}

fn region(args: &MethodArgs, kind: KindArg, zmax: f64, out: &OutArgs) -> Result<()> {
    format_or(out, Format::Csv, &[Format::Csv])?;
    let method = build_method(args)?;
    let cfg = scan_config(zmax)?;
    let kind = kind_of(kind);
    let result = method_region(&method, kind, &cfg)?;
    emit(out.out.as_deref(), &region_csv(&result))?;
    if let Some(path) = &out.out {
        let samples: Vec<Value> = (1..=SIDECAR_POINTS)
            .map(|k| {
                let z = zmax * k as f64 / SIDECAR_POINTS as f64;
                match spectral_report(&method, z) {
                    Ok(r) => spectral_json(&r),
                    Err(e) => json!({ "z": z, "error": e.to_string() }),
                }
            })
            .collect();
        let sidecar = json!({
            "method": method.name(),
            "kind": format!("{kind:?}").to_lowercase(),
            "z_max": zmax,
            "grid_n": cfg.grid_n,
            "principal_endpoint": result.principal_endpoint,
            "principal_open": result.principal_open,
            "excluded_points": result.excluded_points,
            "samples": samples,
        });
        emit(Some(&path.with_extension("json")), &json_text(&sidecar))?;
    }
    eprintln!(
        "{} {}: principal endpoint {}{}",
        method.name(),
        format!("{kind:?}").to_lowercase(),
        result.principal_endpoint,
        if result.principal_open { " (open at z_max)" } else { "" }
    );
    Ok(())
}

/// Lobatto endpoints for the requested stage counts; stops at the first failure.
fn lobatto_endpoints(stages: &[usize]) -> (Vec<(usize, Dd)>, Option<CliError>) {
    let n = match grid_n() {
        Ok(n) => n,
        Err(e) => return (Vec::new(), Some(e)),
    };
    let mut done = Vec::new();
    for &s in stages {
        match lobatto_elliptic_endpoint(s, n) {
            Ok(e) => done.push((s, e)),
            Err(e) => return (done, Some(e.into())),
        }
    }
    (done, None)
}

fn table1(out: &OutArgs) -> Result<()> {
    let format = format_or(out, Format::Text, &[Format::Text, Format::Csv, Format::Json])?;
    let refs = table1_reference();
    let (ends, failure) = lobatto_endpoints(&refs.map(|r| r.0));
    let rows: Vec<(usize, f64, f64, f64)> = ends
        .iter()
        .zip(refs)
        .map(|(&(s, e), (_, reference))| {
            let e = e.as_f64();
            (s, e, reference, e - reference)
        })
        .collect();
    let text = match format {
        Format::Text => {
            let mut t = format!("{:>3}  {:>18}  {:>18}  {:>10}\n", "s", "computed", "reference", "deviation");
            for (s, e, r, d) in &rows {
                t.push_str(&format!("{s:>3}  {e:>18.15}  {r:>18.15}  {d:>10.2e}\n"));
            }
            t
        }
        Format::Csv => {
            let mut t = String::from("s,computed,reference,deviation\n");
            for (s, e, r, d) in &rows {
                t.push_str(&format!("{s},{e:.16e},{r:.16e},{d:.16e}\n"));
            }
            t
        }
        Format::Json => json_text(&Value::Array(
            rows.iter().map(|(s, e, r, d)| json!({ "s": s, "computed": e, "reference": r, "deviation": d })).collect(),
        )),
    };
    emit(out.out.as_deref(), &text)?;
    failure.map_or(Ok(()), Err)
}

fn conjecture(max_s: usize, out: &OutArgs) -> Result<()> {
    if !(2..=10).contains(&max_s) {
        return Err(CliError::Usage(format!("--stages must lie in 2..=10, got {max_s}")));
    }
    let format = format_or(out, Format::Text, &[Format::Text, Format::Csv, Format::Json])?;
    let stages: Vec<usize> = (2..=max_s).collect();
    let (ends, failure) = lobatto_endpoints(&stages);
    let pi = Dd::new(PI, 1.224_646_799_147_353_2e-16);
    let rows: Vec<(usize, Dd, Dd)> = ends.iter().map(|&(s, e)| (s, e, pi - e)).collect();
    let increasing = ends.windows(2).all(|w| w[1].1 > w[0].1);
    let text = match format {
        Format::Text => {
            let mut t = format!("{:>3}  {:>34}  {:>10}\n", "s", "endpoint", "pi - endpoint");
            for (s, e, g) in &rows {
                t.push_str(&format!("{s:>3}  {:>34}  {:>10.3e}\n", e.to_sci_string(30), g.as_f64()));
            }
            t.push_str(&format!("strictly increasing: {increasing}\n"));
            t
        }
        Format::Csv => {
            let mut t = String::from("s,endpoint,gap\n");
            for (s, e, g) in &rows {
                t.push_str(&format!("{s},{},{}\n", e.to_sci_string(30), g.to_sci_string(17)));
            }
            t
        }
        Format::Json => json_text(&json!({
            "rows": rows.iter().map(|(s, e, g)| json!({ "s": s, "endpoint": e.as_f64(), "gap": g.as_f64() })).collect::<Vec<_>>(),
            "strictly_increasing": increasing,
        })),
    };
    emit(out.out.as_deref(), &text)?;
    if let Some(e) = failure {
        return Err(e);
    }
    if !increasing {
        return Err(CliError::Numerical("Lobatto endpoints are not strictly increasing".into()));
    }
    Ok(())
}

fn simulate_cmd(
    args: &MethodArgs,
    problem: &ProblemArgs,
    h: f64,
    steps: usize,
    state0: (f64, f64),
    out: &OutArgs,
) -> Result<()> {
    let format = format_or(out, Format::Csv, &[Format::Csv, Format::Json])?;
    if !(state0.0.is_finite() && state0.1.is_finite()) {
        return Err(CliError::Usage("initial state must be finite".into()));
    }
    let map = StepMap::new(build_method(args)?, build_problem(problem)?, h)?;
    let traj = simulate(&map, state0, steps);
    let text = match format {
        Format::Json => json_text(&json!({
            "states": traj.states.iter().map(|&(p, q)| [p, q]).collect::<Vec<_>>(),
            "error": traj.error.as_ref().map(|e| e.to_string()),
        })),
        _ => trajectory_csv(&traj.states),
    };
    emit(out.out.as_deref(), &text)?;
    match traj.error {
        Some(e) => Err(CliError::Numerical(format!("step {} failed: {e}", traj.states.len()))),
        None => Ok(()),
    }
}

fn classify(args: &MethodArgs, problem: &ProblemArgs, h: f64, out: &OutArgs) -> Result<()> {
    let format = format_or(out, Format::Json, &[Format::Json, Format::Csv])?;
    let method = build_method(args)?;
    let problem = build_problem(problem)?;
    let report = classify_system(problem, method.clone(), h)?;
    let text = match format {
        Format::Json => {
            let mut v = system_json(&report);
            v["method"] = json!(method.name());
            v["problem"] = json!(problem.kind);
            v["parameter"] = json!(problem.parameter);
            v["h"] = json!(h);
            v["z"] = json!(problem.z(h));
            json_text(&v)
        }
        _ => {
            let mut t = String::from("p,q,continuous_class,discrete_class,preserved\n");
            for r in &report.reports {
                let class = |c| serde_json::to_value(c).expect("enum serializes");
                t.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.location.0,
                    r.location.1,
                    class(r.continuous_class).as_str().unwrap_or_default(),
                    class(r.discrete_class).as_str().unwrap_or_default(),
                    r.preserved
                ));
            }
            t
        }
    };
    emit(out.out.as_deref(), &text)
}

fn compose(args: &MethodArgs, kind: Option<KindArg>, zmax: f64, out: &OutArgs) -> Result<()> {
    let format = format_or(out, Format::Text, &[Format::Text, Format::Json])?;
    let order = args.compose.ok_or_else(|| CliError::Usage("compose needs --compose 2, 4 or 6".into()))?;
    let base = catalog::<f64>(&args.method, args.stages)?;
    let scheme = CompositionScheme::triple_jump(base, order)?;
    let endpoint = match kind {
        Some(k) => {
            let method = Method::Composed(Box::new(scheme.clone()));
            Some((k, method_region(&method, kind_of(k), &scan_config(zmax)?)?))
        }
        None => None,
    };
    let text = match format {
        Format::Json => {
            let mut v = scheme_json(&scheme);
            if let Some((k, r)) = &endpoint {
                v["kind"] = json!(format!("{k:?}").to_lowercase());
                v["principal_endpoint"] = json!(r.principal_endpoint);
                v["principal_open"] = json!(r.principal_open);
            }
            json_text(&v)
        }
        _ => {
            let mut t = format!("{}\n", scheme.to_line());
            if let Some((k, r)) = &endpoint {
                t.push_str(&format!(
                    "{} principal endpoint {}{}\n",
                    format!("{k:?}").to_lowercase(),
                    r.principal_endpoint,
                    if r.principal_open { " (open at z_max)" } else { "" }
                ));
            }
            t
        }
    };
    emit(out.out.as_deref(), &text)
}
