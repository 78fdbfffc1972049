use crate::config::{check_grid, EngineRunConfig};
use crate::report::{num, CliError};
use eulerci_core::engine::{iterate, SubsolutionState};
use eulerci_core::relaxation::State;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

fn initial_state(cfg: &EngineRunConfig) -> Result<SubsolutionState, CliError> {
    if let Some(dir) = &cfg.checkpoint {
        let dir = Path::new(dir);
        if !dir.is_dir() {
            return Err(CliError::usage(format!("checkpoint directory {} does not exist", dir.display())));
        }
        return SubsolutionState::load(dir).map_err(|e| CliError::usage(format!("cannot load checkpoint {}: {e}", dir.display())));
    }
    check_grid(&cfg.grid)?;
    let f = &cfg.fixture;
    let z0 = State::new(f.v0.clone(), f.m0.clone(), f.q0).map_err(|e| CliError::usage(format!("invalid fixture state: {e}")))?;
    SubsolutionState::constant(cfg.grid, &z0, &f.body, f.ebar).map_err(|e| CliError::usage(format!("invalid fixture: {e}")))
}

/// Runs the engine, writing `engine.jsonl`, `j.csv` and optionally `checkpoint/`; returns check failures.
pub fn run(cfg: &EngineRunConfig, out: &Path) -> Result<Vec<Value>, CliError> {
    let s0 = initial_state(cfg)?;
    let traj = iterate(s0, &cfg.iterate)?;

    let mut lines = std::io::BufWriter::new(std::fs::File::create(out.join("engine.jsonl"))?);
    writeln!(lines, "{}", json!({ "event": "start", "j": traj.initial_j, "forcing": traj.initial_forcing }))?;
    for log in &traj.logs {
        writeln!(lines, "{}", json!({ "event": "round", "log": log }))?;
    }
    let js = traj.j_sequence();
    writeln!(lines, "{}", json!({ "event": "end", "rounds": traj.logs.len(), "j": js.last(), "stopped": traj.stopped }))?;
    lines.flush()?;

    let mut csv = csv::Writer::from_path(out.join("j.csv"))?;
    csv.write_record(["round", "j", "forcing_l2", "forcing_h_minus1", "min_margin"])?;
    csv.write_record(["0".into(), num(traj.initial_j), num(traj.initial_forcing.l2), num(traj.initial_forcing.h_minus1), String::new()])?;
    for l in &traj.logs {
        csv.write_record([l.round.to_string(), num(l.j_after), num(l.forcing.l2), num(l.forcing.h_minus1), num(l.min_margin)])?;
    }
    csv.flush()?;

    if cfg.save_checkpoint {
        let dir = out.join("checkpoint");
        std::fs::create_dir_all(&dir)?;
        traj.final_state.save(&dir)?;
    }

    let mut failures = Vec::new();
    for (k, w) in js.windows(2).enumerate() {
        if w[1] > w[0] {
            failures.push(json!({ "op": "j_nonincreasing", "round": k + 1, "j_before": w[0], "j_after": w[1] }));
        }
    }
    for l in &traj.logs {
        if !l.step.x0.pass {
            failures.push(json!({ "op": "x0_membership", "round": l.round, "witness": l.step.x0.witness }));
        }
    }
    Ok(failures)
}
