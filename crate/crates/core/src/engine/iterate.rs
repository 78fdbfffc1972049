use super::state::SubsolutionState;
use super::step::{improvement_step, StepParams, StepReport};
use crate::error::{Error, Result};
use crate::fields::{forcing_residual, j_functional, ForcingReport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub rounds: usize,
    /// Round `k` (from 1) gets the budget `eta 2^-(k-1)`.
    pub eta: f64,
    /// Stop once `J` falls to this value.
    pub j_stop: f64,
    /// Wave periods are multiplied by this factor after each round.
    pub periods_growth: f64,
    /// Keep every intermediate state in the trajectory.
    pub keep_states: bool,
    pub step: StepParams,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { rounds: 5, eta: 1.0, j_stop: 0.0, periods_growth: 1.0, keep_states: false, step: StepParams::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundLog {
    pub round: usize,
    pub alpha: f64,
    pub j_before: f64,
    pub j_after: f64,
    pub forcing: ForcingReport,
    pub h_minus1_increment: f64,
    pub budget: f64,
    pub min_margin: f64,
    pub step: StepReport,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub initial_j: f64,
    pub initial_forcing: ForcingReport,
    pub logs: Vec<RoundLog>,
    pub states: Vec<SubsolutionState>,
    pub final_state: SubsolutionState,
    /// Why iteration ended before `rounds`, if it did.
    pub stopped: Option<String>,
}

impl Trajectory {
    /// `J` before the first round followed by `J` after each round.
    pub fn j_sequence(&self) -> Vec<f64> {
        std::iter::once(self.initial_j).chain(self.logs.iter().map(|l| l.j_after)).collect()
    }

    pub fn forcing_sequence(&self) -> Vec<f64> {
        std::iter::once(self.initial_forcing.l2).chain(self.logs.iter().map(|l| l.forcing.l2)).collect()
    }
}

/// Repeated improvement steps with `alpha = J` and halving `H^-1` budgets.
pub fn iterate(s0: SubsolutionState, cfg: &EngineConfig) -> Result<Trajectory> {
    let initial_j = j_functional(&s0.z, &s0.base, &s0.bodies, &s0.ebar)?.value;
    let initial_forcing = forcing_residual(&s0.z)?;
    let mut states = if cfg.keep_states { vec![s0.clone()] } else { vec![] };
    let mut cur = s0;
    let mut logs = Vec::new();
    let mut stopped = None;
    let mut j = initial_j;
    let mut params = cfg.step.clone();
    for round in 1..=cfg.rounds {
        if j <= cfg.j_stop {
            stopped = Some(format!("J = {j:e} reached the stop level"));
            break;
        }
        params.alpha = j;
        params.eta = cfg.eta * 0.5f64.powi(round as i32 - 1);
        let (next, step) = match improvement_step(&cur, &params, round) {
            Ok(r) => r,
            Err(Error::NoActiveCubes(t)) => {
                stopped = Some(format!("no active cubes at threshold {t:e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        if step.inserted_waves == 0 {
            stopped = Some(format!("all {} active cubes dropped", step.active_cubes));
            break;
        }
        let forcing = forcing_residual(&next.z)?;
        logs.push(RoundLog {
            round,
            alpha: params.alpha,
            j_before: step.j_before,
            j_after: step.j_after,
            forcing,
            h_minus1_increment: step.h_minus1_increment,
            budget: params.eta,
            min_margin: step.min_margin,
            step,
        });
        j = logs.last().unwrap().j_after;
        params.wave_periods *= cfg.periods_growth;
        if cfg.keep_states {
            states.push(next.clone());
        }
        cur = next;
    }
    Ok(Trajectory { initial_j, initial_forcing, logs, states, final_state: cur, stopped })
}
