use crate::config::{check_grid, PathConfig};
use crate::report::CliError;
use eulerci_core::pathctl::*;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

/// Builds the dyadic path, writes the manifest, node files, `holder.csv` and `path.jsonl`; returns check failures.
pub fn run(cfg: &PathConfig, out: &Path) -> Result<Vec<Value>, CliError> {
    check_grid(&cfg.grid)?;
    if cfg.depth > MAX_DEPTH {
        return Err(CliError::usage(format!("path.depth {} exceeds {MAX_DEPTH}", cfg.depth)));
    }
    let fixture = |spec: &FixtureSpec, name: &str| {
        SolutionFixture::build(cfg.grid, spec).map_err(|e| CliError::usage(format!("invalid path.{name}: {e}")))
    };
    let (u0, u1) = (fixture(&cfg.u0, "u0")?, fixture(&cfg.u1, "u1")?);
    let z0 = u0.relaxed();
    let path = dyadic_path(&z0, &u1.relaxed(), cfg.depth, &cfg.midpoint)?;
    let holder = holder_report(&path, interior_window(&z0, cfg.midpoint.eps_mollify))?;
    write_manifest(out, &path, &holder)?;

    let mut lines = std::io::BufWriter::new(std::fs::File::create(out.join("path.jsonl"))?);
    for node in path.iter().filter(|n| n.report.is_some()) {
        writeln!(lines, "{}", json!({ "index": node.index, "level": node.level, "parents": node.parents, "report": node.report }))?;
    }
    writeln!(lines, "{}", json!({ "holder": holder }))?;
    lines.flush()?;

    let mut failures = Vec::new();
    for node in &path {
        if let Some(r) = node.report.as_ref().filter(|r| !r.bound_holds) {
            failures.push(json!({
                "op": "midpoint_recursion",
                "index": node.index,
                "level": node.level,
                "distances": r.distances,
                "bound": r.bound,
                "delta_meas": r.delta_meas,
            }));
        }
    }
    if !holder.within_budget {
        failures.push(json!({ "op": "holder_budget", "constant": holder.constant, "budget": holder.budget }));
    }
    Ok(failures)
}
