use crate::convex_geometry::LensBody;
use crate::engine::{iterate, EngineConfig, SubsolutionState};
use crate::error::{Error, Result, Witness};
use crate::fields::{commutator_defect, l2_norm, mollify, sup_over, FieldKind, GridField, Mollifier};
use crate::relaxation::{f_map, sym_index};
use crate::vecops::{norm, norm2};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MidpointConfig {
    pub eps_mollify: f64,
    /// Added to `R^2` on top of the measured defect.
    pub delta_slack: f64,
    /// Stop level as a fraction of the initial `J`.
    pub j_stop_ratio: f64,
    pub max_slack_retries: usize,
    pub engine: EngineConfig,
}

impl Default for MidpointConfig {
    fn default() -> Self {
        MidpointConfig { eps_mollify: 0.05, delta_slack: 1e-3, j_stop_ratio: 1e-3, max_slack_retries: 3, engine: EngineConfig::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MidpointReport {
    /// Interior slices `lo..hi` on which every norm is taken.
    pub window: (usize, usize),
    /// `sup_t ||u_1 - u_0||`.
    pub parent_gap: f64,
    /// `sup_t ||u_half - u_i||` for `i = 0, 1`.
    pub distances: [f64; 2],
    pub delta_meas: f64,
    /// `parent_gap / sqrt 2 + delta_meas`.
    pub bound: f64,
    pub bound_holds: bool,
    /// `max_node (|u_half - u_i^eps| - R)`; nonpositive when the per-node certificate holds.
    pub certificate_excess: f64,
    pub radius_l2: f64,
    pub tau_max: f64,
    /// Sup-L2 commutator defects of `u_i^a u_i^b` under mollification, per parent and component pair.
    pub commutators: Vec<f64>,
    pub mollify_error: [f64; 2],
    pub delta_slack: f64,
    pub slack_retries: usize,
    pub j_initial: f64,
    pub j_final: f64,
    pub rounds: usize,
    pub forcing_l2: f64,
    pub min_margin: f64,
    pub waves: usize,
    /// Why the engine ended early, if it did.
    pub engine_stopped: Option<String>,
    pub short_circuit: bool,
}

/// Midpoint velocity with its relaxed state and report.
#[derive(Debug, Clone)]
pub struct Midpoint {
    pub z: GridField,
    pub radius: GridField,
    pub report: MidpointReport,
}

/// Slices kept after dropping `ceil(eps / dt)` at each end.
pub fn interior_window(z: &GridField, eps: f64) -> (usize, usize) {
    let g = z.grid;
    let drop = if g.nt > 1 { (eps / g.dt() - 1e-9).ceil().max(0.0) as usize } else { 0 };
    let drop = drop.min((g.nt - 1) / 2);
    (drop, g.nt - drop)
}

/// `sup_t ||a - b||_{L2}` on velocity components over `window`; `a`, `b` may be velocity or state fields.
pub fn velocity_distance(a: &GridField, b: &GridField, window: (usize, usize)) -> Result<f64> {
    let d = a.velocity().zip_map(&b.velocity(), |x, y| x - y)?;
    sup_over(&d, window.0, window.1, |it| l2_norm(&d, it))
}

fn sup_l2_on(f: &GridField, window: (usize, usize)) -> Result<f64> {
    sup_over(f, window.0, window.1, |it| l2_norm(f, it))
}

fn max_eigenvalue(n: usize, m: impl Fn(usize, usize) -> f64) -> f64 {
    let a = DMatrix::from_fn(n, n, |i, j| m(i, j));
    a.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Lemma-style midpoint of two relaxed solution fields: mollify, average, wrap both
/// mollified velocities in a lens, and push the average toward its constraint set.
pub fn midpoint(z0: &GridField, z1: &GridField, cfg: &MidpointConfig) -> Result<Midpoint> {
    z0.check_compatible(z1)?;
    if z0.kind != FieldKind::State || z1.kind != FieldKind::State {
        return Err(Error::invalid("midpoint needs relaxed state fields"));
    }
    let g = z0.grid;
    let n = g.dim;
    let window = interior_window(z0, cfg.eps_mollify);
    let parent_gap = velocity_distance(z0, z1, window)?;
    if z0.data == z1.data {
        let report = MidpointReport {
            window,
            parent_gap: 0.0,
            distances: [0.0, 0.0],
            delta_meas: 0.0,
            bound: 0.0,
            bound_holds: true,
            certificate_excess: 0.0,
            radius_l2: 0.0,
            tau_max: 0.0,
            commutators: vec![],
            mollify_error: [0.0, 0.0],
            delta_slack: cfg.delta_slack,
            slack_retries: 0,
            j_initial: 0.0,
            j_final: 0.0,
            rounds: 0,
            forcing_l2: 0.0,
            min_margin: f64::INFINITY,
            waves: 0,
            engine_stopped: None,
            short_circuit: true,
        };
        return Ok(Midpoint { z: z0.clone(), radius: GridField::zeros(g, FieldKind::Scalar), report });
    }
    let moll = Mollifier::new(cfg.eps_mollify)?;
    let (e0, e1) = (mollify(z0, &moll)?, mollify(z1, &moll)?);
    let half = e0.zip_map(&e1, |a, b| 0.5 * (a + b))?;
    let mut commutators = Vec::new();
    for z in [z0, z1] {
        for i in 0..n {
            for j in i..n {
                commutators.push(commutator_defect(&z.component(i), &z.component(j), &moll)?);
            }
        }
    }
    // Per node: axis, separation and the defect-driven part of R^2.
    let mut delta2 = vec![0.0; g.n_nodes()];
    let mut tau = vec![0.0; g.n_nodes()];
    let mut axes = vec![vec![0.0; n]; g.n_nodes()];
    for node in 0..g.n_nodes() {
        let d: Vec<f64> = (0..n).map(|k| e1.at(node)[k] - e0.at(node)[k]).collect();
        let d2 = norm2(&d);
        let zh = half.at(node);
        let fv = f_map(&zh[..n]);
        let lam = max_eigenvalue(n, |i, j| {
            let k = sym_index(n, i, j);
            (if i == j { d2 / 4.0 } else { 0.0 }) + n as f64 * (fv[k] - zh[n + k])
        });
        tau[node] = (lam - d2 / 2.0).max(0.0);
        delta2[node] = d2;
        axes[node] = if d2 > 0.0 { d.iter().map(|x| x / d2.sqrt()).collect() } else { (0..n).map(|k| (k == 0) as u8 as f64).collect() };
    }
    let mut slack = cfg.delta_slack;
    let mut retries = 0;
    let (bodies, ebar, radius) = loop {
        let mut bodies = GridField::zeros(g, FieldKind::Body);
        let mut ebar = GridField::zeros(g, FieldKind::Scalar);
        let mut radius = GridField::zeros(g, FieldKind::Scalar);
        let mut bad = None;
        for node in 0..g.n_nodes() {
            let a = 0.5 * delta2[node].sqrt();
            let r2 = delta2[node] / 2.0 + tau[node] + slack;
            let r = r2.sqrt();
            if !(r > std::f64::consts::SQRT_2 * a) {
                bad = Some(node);
                break;
            }
            let lens = LensBody::new(&axes[node], a, r)?;
            let (unit, rmax) = lens.normalized()?;
            let p = bodies.at_mut(node);
            p[..n].copy_from_slice(unit.axis());
            p[n] = unit.half_separation();
            p[n + 1] = unit.radius();
            ebar.data[node] = rmax * rmax;
            radius.data[node] = r;
        }
        match bad {
            None => break (bodies, ebar, radius),
            Some(node) if retries < cfg.max_slack_retries => {
                let _ = node;
                slack *= 10.0;
                retries += 1;
            }
            Some(node) => {
                let (time_index, space_index) = g.split(node);
                return Err(Error::HardFailure {
                    detail: format!("lens radius not above sqrt2 times the half-separation after {retries} slack increases"),
                    witness: Some(Witness { node, time_index, space_index, detail: format!("delta_slack {slack:e}") }),
                });
            }
        }
    };
    let s0 = SubsolutionState::new(half.clone(), half, bodies, ebar)?;
    let mut ecfg = cfg.engine.clone();
    let j0 = crate::fields::j_functional(&s0.z, &s0.base, &s0.bodies, &s0.ebar)?.value;
    ecfg.j_stop = cfg.j_stop_ratio * j0;
    let traj = iterate(s0, &ecfg)?;
    let z = traj.final_state.z.clone();

    let mut excess = f64::NEG_INFINITY;
    for node in 0..g.n_nodes() {
        for e in [&e0, &e1] {
            let d: Vec<f64> = (0..n).map(|k| z.at(node)[k] - e.at(node)[k]).collect();
            excess = excess.max(norm(&d) - radius.data[node]);
        }
    }
    let radius_l2 = sup_l2_on(&radius, window)?;
    let dmoll = sup_over(&e1, window.0, window.1, |it| {
        let mut s = 0.0;
        let ns = g.n_space();
        for sp in 0..ns {
            let node = it * ns + sp;
            s += (0..n).map(|k| (e1.at(node)[k] - e0.at(node)[k]).powi(2)).sum::<f64>();
        }
        Ok((s * g.cell_volume()).sqrt())
    })?;
    let mollify_error = [velocity_distance(&e0, z0, window)?, velocity_distance(&e1, z1, window)?];
    // Triangle inequality: ||u_half - u_i|| <= ||R|| + ||u_i^eps - u_i||, and ||R|| splits against the raw gap.
    let delta_meas = (radius_l2 - dmoll / std::f64::consts::SQRT_2).max(0.0)
        + (dmoll - parent_gap).max(0.0) / std::f64::consts::SQRT_2
        + mollify_error[0].max(mollify_error[1]);
    let distances = [velocity_distance(&z, z0, window)?, velocity_distance(&z, z1, window)?];
    let bound = parent_gap / std::f64::consts::SQRT_2 + delta_meas;
    let report = MidpointReport {
        window,
        parent_gap,
        distances,
        delta_meas,
        bound,
        bound_holds: distances[0] <= bound && distances[1] <= bound,
        certificate_excess: excess,
        radius_l2,
        tau_max: tau.iter().copied().fold(0.0, f64::max),
        commutators,
        mollify_error,
        delta_slack: slack,
        slack_retries: retries,
        j_initial: traj.initial_j,
        j_final: *traj.j_sequence().last().unwrap(),
        rounds: traj.logs.len(),
        forcing_l2: traj.logs.last().map_or(traj.initial_forcing.l2, |l| l.forcing.l2),
        min_margin: traj.final_state.min_margin(),
        waves: traj.final_state.waves.len(),
        engine_stopped: traj.stopped.clone(),
        short_circuit: false,
    };
    Ok(Midpoint { z, radius, report })
}
