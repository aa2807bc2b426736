//! CSV and JSON writers. Every file starts with `schema_version`.

use std::fmt::Write as _;

use normprod_core::{ExperimentGrid, Method, RecoveryResult, SolverSuite, TraceRow};
use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::io::fmt_f64;

pub const SCHEMA_VERSION: u32 = 1;

const NA: &str = "NA";

/// Effective configuration of one method as a flat JSON object.
pub fn method_config(suite: &SolverSuite, method: Method) -> Map<String, Value> {
    let cfg = match method {
        Method::Np0 | Method::Np1 => serde_json::to_value(&suite.np),
        Method::Sbl => serde_json::to_value(&suite.sbl),
        Method::Irls => serde_json::to_value(&suite.irls),
        Method::Bp => serde_json::to_value(&suite.bp),
    };
    let mut map = Map::new();
    map.insert("method".into(), Value::from(method.name()));
    if let Ok(Value::Object(fields)) = cfg {
        map.extend(fields);
    }
    map
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Null => NA.into(),
        other => other.to_string(),
    }
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn seconds_json(v: f64, timing: bool) -> Value {
    if timing {
        json!(v)
    } else {
        Value::Null
    }
}

fn seconds_text(v: f64, timing: bool) -> String {
    if timing {
        fmt_f64(v)
    } else {
        NA.into()
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

pub fn recover(format: Format, config: &Map<String, Value>, result: &RecoveryResult, timing: bool) -> String {
    match format {
        Format::Json => pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "recover",
            "config": config,
            "iterations": result.iterations,
            "termination": result.termination.as_str(),
            "failure": result.failure,
            "x_hat": result.x_hat.as_slice(),
            "trace": result.trace.iter().map(|r| json!({
                "iteration": r.iteration,
                "relative_change": finite_or_null(r.relative_change),
                "relative_error": r.relative_error.map(finite_or_null),
                "seconds": seconds_json(r.elapsed.as_secs_f64(), timing),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let v = SCHEMA_VERSION;
            let mut s = String::from("schema_version,record,index,field,value\n");
            for (key, value) in config {
                let _ = writeln!(s, "{v},config,,{key},{}", scalar_text(value));
            }
            let _ = writeln!(s, "{v},summary,,iterations,{}", result.iterations);
            let _ = writeln!(s, "{v},summary,,termination,{}", result.termination.as_str());
            if let Some(f) = &result.failure {
                let _ = writeln!(s, "{v},summary,,failure,\"{}\"", f.replace('"', "'"));
            }
            for (i, x) in result.x_hat.iter().enumerate() {
                let _ = writeln!(s, "{v},x_hat,{i},value,{}", fmt_f64(*x));
            }
            for r in &result.trace {
                let t = r.iteration;
                let _ = writeln!(s, "{v},trace,{t},relative_change,{}", fmt_f64(r.relative_change));
                if let Some(e) = r.relative_error {
                    let _ = writeln!(s, "{v},trace,{t},relative_error,{}", fmt_f64(e));
                }
                if timing {
                    let _ = writeln!(s, "{v},trace,{t},seconds,{}", fmt_f64(r.elapsed.as_secs_f64()));
                }
            }
            s
        }
    }
}

pub fn phase(format: Format, grid: &ExperimentGrid, timing: bool) -> String {
    let spec = &grid.spec;
    let suite = &spec.suite;
    match format {
        Format::Json => pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "phase",
            "config": {
                "seed": spec.master_seed,
                "n": spec.n,
                "sweep_axis": spec.fixed.swept().name(),
                "fixed_axis": spec.fixed.name(),
                "fixed_value": spec.fixed_value,
                "values": spec.sweep,
                "trials": spec.trials,
                "methods": spec.methods.iter().map(|&m| method_config(suite, m)).collect::<Vec<_>>(),
            },
            "points": grid.points.iter().map(|p| json!({
                "m": p.m,
                "k": p.k,
                "method": p.method.name(),
                "trials": p.trials,
                "successes": p.successes,
                "success_rate": p.success_rate,
                "mean_mse_db": p.mean_mse_db,
                "mean_iterations": p.mean_iterations,
                "mean_seconds": seconds_json(p.mean_seconds, timing),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from(
                "schema_version,seed,n,sweep_axis,m,k,method,epsilon,t_max,alpha,beta,trials,successes,\
                 success_rate,mean_mse_db,mean_iterations,mean_seconds\n",
            );
            for p in &grid.points {
                let (eps, t_max) = suite.stop_rule(p.method);
                let (alpha, beta) = match p.method {
                    Method::Np0 | Method::Np1 => (fmt_f64(suite.np.alpha), fmt_f64(suite.np.beta)),
                    _ => (NA.into(), NA.into()),
                };
                let _ = writeln!(
                    s,
                    "{SCHEMA_VERSION},{},{},{},{},{},{},{},{t_max},{alpha},{beta},{},{},{},{},{},{}",
                    spec.master_seed,
                    spec.n,
                    spec.fixed.swept().name(),
                    p.m,
                    p.k,
                    p.method.name(),
                    fmt_f64(eps),
                    p.trials,
                    p.successes,
                    fmt_f64(p.success_rate),
                    fmt_f64(p.mean_mse_db),
                    fmt_f64(p.mean_iterations),
                    seconds_text(p.mean_seconds, timing),
                );
            }
            s
        }
    }
}

pub struct TraceContext<'a> {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub suite: &'a SolverSuite,
    pub methods: &'a [Method],
}

pub fn trace(format: Format, ctx: &TraceContext<'_>, rows: &[TraceRow], timing: bool) -> String {
    match format {
        Format::Json => pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "trace",
            "config": {
                "seed": ctx.seed,
                "n": ctx.n,
                "m": ctx.m,
                "k": ctx.k,
                "methods": ctx.methods.iter().map(|&m| method_config(ctx.suite, m)).collect::<Vec<_>>(),
            },
            "rows": rows.iter().map(|r| json!({
                "method": r.method.name(),
                "iteration": r.iteration,
                "relative_change": finite_or_null(r.relative_change),
                "relative_error": finite_or_null(r.relative_error),
                "mse_db": r.mse_db,
                "seconds": seconds_json(r.seconds, timing),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from(
                "schema_version,seed,n,m,k,method,epsilon,t_max,iteration,relative_change,relative_error,mse_db,seconds\n",
            );
            for r in rows {
                let (eps, t_max) = ctx.suite.stop_rule(r.method);
                let _ = writeln!(
                    s,
                    "{SCHEMA_VERSION},{},{},{},{},{},{},{t_max},{},{},{},{},{}",
                    ctx.seed,
                    ctx.n,
                    ctx.m,
                    ctx.k,
                    r.method.name(),
                    fmt_f64(eps),
                    r.iteration,
                    fmt_f64(r.relative_change),
                    fmt_f64(r.relative_error),
                    fmt_f64(r.mse_db),
                    seconds_text(r.seconds, timing),
                );
            }
            s
        }
    }
}
