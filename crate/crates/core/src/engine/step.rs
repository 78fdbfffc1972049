use super::state::{check_x0, node_margin, SubsolutionState, X0Report, X0Tolerances};
use super::tiling::{build_tiling, Cube, Tiling};
use super::WaveRecord;
use crate::convex_geometry::lens_gauge;
use crate::error::{Error, Result, Witness};
use crate::fields::{j_functional, node_gap, sup_h_minus1, FieldKind, GridField, JReport};
use crate::potential::{make_frame, CutoffProfile, LocalizedWave, WaveDescriptor};
use crate::relaxation::{oscillation_direction, LambdaDirection, OscillationConfig, State};
use crate::vecops::norm;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepParams {
    pub alpha: f64,
    /// Bound on `sup_t ||z' - z||_{H^-1}`.
    pub eta: f64,
    pub eps_cube: f64,
    /// Explicit wave scale; when absent it is set from `wave_periods`.
    pub eps_wave: Option<f64>,
    /// Oscillation periods along `xi` across the spatial plateau.
    pub wave_periods: f64,
    /// Equally spaced phase candidates per cube.
    pub phases: usize,
    pub max_amplitude_halvings: usize,
    /// Wavenumber doublings allowed to meet the `H^-1` budget.
    pub max_refinements: usize,
    /// Floor for the automatic cube halving; `None` keeps `eps_cube` fixed.
    pub min_eps_cube: Option<f64>,
    pub oscillation: OscillationConfig,
    pub x0: X0Tolerances,
    /// Per-slice gains above `-gain_tol` count as nonnegative.
    pub gain_tol: f64,
}

impl Default for StepParams {
    fn default() -> Self {
        StepParams {
            alpha: 0.0,
            eta: 1.0,
            eps_cube: 0.5,
            eps_wave: None,
            wave_periods: 8.0,
            phases: 8,
            max_amplitude_halvings: 5,
            max_refinements: 3,
            min_eps_cube: None,
            oscillation: OscillationConfig::default(),
            x0: X0Tolerances::default(),
            gain_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepReport {
    pub alpha: f64,
    /// `c alpha` with `c = 1 / (30 (L / eps_cube)^n)`.
    pub threshold: f64,
    pub eps_cube: f64,
    pub cube_halvings: usize,
    /// Largest oscillation of the gap over an active cube, and its bound `alpha / (10 V)`.
    pub gap_oscillation: f64,
    pub oscillation_bound: f64,
    pub oscillation_exceeded: bool,
    pub wave_periods: f64,
    pub refinements: usize,
    pub cubes: usize,
    pub active_cubes: usize,
    pub inserted_waves: usize,
    pub dropped: Vec<(Vec<i64>, String)>,
    pub amplitude_halvings: usize,
    pub j_before: f64,
    pub j_after: f64,
    pub beta: f64,
    /// `beta / alpha^2`.
    pub kappa: f64,
    /// Per-slice decrease of the integrated gap.
    pub slice_gains: Vec<f64>,
    pub slice_gain_min: f64,
    /// `J` on nested centered windows (full, half, quarter), before and after.
    pub window_j_before: Vec<f64>,
    pub window_j_after: Vec<f64>,
    pub h_minus1_increment: f64,
    pub eta: f64,
    pub measured_c_min: f64,
    pub wave_residual_max: f64,
    pub min_margin: f64,
    pub x0: X0Report,
    pub warnings: Vec<String>,
}

struct CubeOutcome {
    active: bool,
    gap_oscillation: f64,
    dropped: Option<String>,
    wave: Option<WaveRecord>,
    increments: Vec<(usize, Vec<f64>)>,
    halvings: usize,
    warnings: Vec<String>,
}

impl CubeOutcome {
    fn inactive(osc: f64) -> Self {
        CubeOutcome { active: false, gap_oscillation: osc, dropped: None, wave: None, increments: vec![], halvings: 0, warnings: vec![] }
    }
    fn dropped(osc: f64, why: String) -> Self {
        CubeOutcome { active: true, dropped: Some(why), ..Self::inactive(osc) }
    }
}

/// Nested centered windows of slice indices: full, middle half, middle quarter.
fn window_maxima(j: &JReport) -> Vec<f64> {
    let nt = j.profile.len();
    [1usize, 2, 4]
        .iter()
        .map(|&d| {
            let w = (nt / d).max(1);
            let lo = (nt - w) / 2;
            j.profile[lo..lo + w].iter().copied().fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

struct CubeContext<'a> {
    s: &'a SubsolutionState,
    tiling: &'a Tiling,
    p: &'a StepParams,
    threshold: f64,
    periods: f64,
    round: usize,
}

impl CubeContext<'_> {
    fn center_node(&self, cube: &Cube) -> usize {
        let g = self.s.grid();
        let tc = (cube.lo[0] + 0.5 * self.tiling.eps).clamp(g.t0, g.t1);
        let it = (((tc - g.t0) / g.dt()).round() as usize).min(g.nt - 1);
        let ix: Vec<usize> = cube.lo[1..].iter().map(|&x| (((x + 0.5 * self.tiling.eps) / g.dx()).round() as usize) % g.nx).collect();
        g.node(it, &ix)
    }

    fn wave_eps(&self, xi0: f64, xi: f64, cutoff: &CutoffProfile) -> f64 {
        match self.p.eps_wave {
            Some(e) => e * xi / xi0,
            None => {
                let (lo, hi) = cutoff.plateau();
                let width = (1..lo.len()).map(|k| hi[k] - lo[k]).fold(f64::INFINITY, f64::min);
                xi * width / (2.0 * PI * self.periods)
            }
        }
    }

    fn process(&self, cube: &Cube) -> Result<CubeOutcome> {
        let s = self.s;
        let g = s.grid();
        let n = g.dim;
        let gaps: Vec<f64> =
            cube.nodes.iter().map(|&i| node_gap(&s.z.at(i)[..n], &s.base.at(i)[..n], s.bodies.at(i), s.ebar.at(i)[0])).collect();
        let osc = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max) - gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let c = self.center_node(cube);
        let e_c = s.ebar.at(c)[0];
        let gap_c = node_gap(&s.z.at(c)[..n], &s.base.at(c)[..n], s.bodies.at(c), e_c);
        if !(e_c > 0.0 && gap_c > self.threshold) {
            return Ok(CubeOutcome::inactive(0.0));
        }
        let z_c = s.z.state(c);
        let z0_c = s.base.state(c);
        let body_c = s.bodies.body(c)?;
        let osc_res = match oscillation_direction(&z_c, &body_c, &z0_c, e_c.sqrt(), &self.p.oscillation) {
            Ok(r) => r,
            Err(e @ (Error::NotInside | Error::InfeasibleAtSampling(_) | Error::Alignment)) => {
                return Ok(CubeOutcome::dropped(osc, format!("no oscillation direction: {e}")))
            }
            Err(e) => return Err(e),
        };
        let cutoff = CutoffProfile::new(cube.lo.clone(), cube.hi(self.tiling.eps), self.tiling.subcube_ratio)?;
        let coords: Vec<Vec<f64>> = cube.nodes.iter().map(|&i| g.coords(i)).collect();
        let ncomp = State::n_components(n);
        let slices: Vec<usize> = cube.nodes.iter().map(|&i| g.split(i).0).collect();
        let (slo, shi) = (*slices.iter().min().unwrap(), *slices.iter().max().unwrap());
        let dv = g.cell_volume();
        let frame0 = make_frame(&osc_res.direction.a, &osc_res.direction.b, osc_res.direction.t)?;
        let xi0 = norm(&frame0.xi);
        let mut dir: LambdaDirection = osc_res.direction.clone();
        let mut last_witness = None;
        let mut warnings = osc_res.warnings.clone();
        for h in 0..=self.p.max_amplitude_halvings {
            let frame = make_frame(&dir.a, &dir.b, dir.t)?;
            let eps = self.wave_eps(xi0, norm(&frame.xi), &cutoff);
            let make = |phase: f64| LocalizedWave::new(WaveDescriptor { frame: frame.clone(), cutoff: cutoff.clone(), eps, phase });
            let (w0, w1) = (make(0.0)?, make(0.5 * PI)?);
            if w0.too_few_periods() {
                warnings.push("wave plateau holds less than one period".into());
            }
            let basis: Vec<(Vec<f64>, Vec<f64>)> = coords
                .iter()
                .map(|p| {
                    let (mut a, mut b) = (vec![0.0; ncomp], vec![0.0; ncomp]);
                    w0.eval_into(p, &mut a);
                    w1.eval_into(p, &mut b);
                    (a, b)
                })
                .collect();
            // Best phase by smallest per-slice gain among those keeping every node inside.
            let mut best: Option<(f64, f64)> = None;
            let mut inside_any = false;
            let mut buf = vec![0.0; ncomp];
            for k in 0..self.p.phases.max(1) {
                let ph = 2.0 * PI * k as f64 / self.p.phases.max(1) as f64;
                let (cp, sp) = (ph.cos(), ph.sin());
                let mut gains = vec![0.0; shi - slo + 1];
                let mut ok = true;
                for (idx, &node) in cube.nodes.iter().enumerate() {
                    let (a, b) = &basis[idx];
                    if a.iter().chain(b).all(|&x| x == 0.0) {
                        continue;
                    }
                    let zc = s.z.at(node);
                    for q in 0..ncomp {
                        buf[q] = zc[q] + cp * a[q] + sp * b[q];
                    }
                    let e = s.ebar.at(node)[0];
                    let m = if e == 0.0 { -1.0 } else { node_margin(n, &buf, s.base.at(node), s.bodies.at(node), e) };
                    if !(m > self.p.x0.slack) {
                        ok = false;
                        if last_witness.is_none() || h == self.p.max_amplitude_halvings {
                            let (time_index, space_index) = g.split(node);
                            last_witness = Some(Witness { node, time_index, space_index, detail: format!("hull margin {m:e} after insertion") });
                        }
                        break;
                    }
                    let body = s.bodies.at(node);
                    let v0 = &s.base.at(node)[..n];
                    let before = gaps[idx];
                    let mut p = [0.0; 3];
                    (0..n).for_each(|i| p[i] = buf[i] - v0[i]);
                    let j = lens_gauge(&body[..n], body[n], body[n + 1], &p[..n]);
                    gains[slices[idx] - slo] += dv * (before - (e - j * j));
                }
                if !ok {
                    continue;
                }
                inside_any = true;
                let gmin = gains.iter().copied().fold(f64::INFINITY, f64::min);
                if best.map_or(true, |(_, b)| gmin > b) {
                    best = Some((ph, gmin));
                }
            }
            if !inside_any {
                dir = dir.rescaled(0.5);
                continue;
            }
            let (phase, gmin) = best.expect("some phase kept every node inside");
            if gmin < -self.p.gain_tol {
                return Ok(CubeOutcome::dropped(osc, format!("no phase with nonnegative slice gain (best {gmin:e})")));
            }
            let wave = make(phase)?;
            let mut increments = Vec::new();
            let mut residual_max: f64 = 0.0;
            for (p, &node) in coords.iter().zip(&cube.nodes) {
                let mut out = vec![0.0; ncomp];
                wave.eval_into(p, &mut out);
                if out.iter().any(|&x| x != 0.0) {
                    let (mom, div) = wave.residual(p);
                    residual_max = residual_max.max((mom.iter().map(|x| x * x).sum::<f64>() + div * div).sqrt());
                    increments.push((node, out));
                }
            }
            let record = WaveRecord {
                round: self.round,
                cube: cube.index.clone(),
                descriptor: wave.descriptor().clone(),
                amplitude_halvings: h,
                residual_max,
                measured_c: osc_res.measured_c,
                cone_residual: dir.cone_residual(),
                plateau_periods: wave.plateau_periods(),
                slice_gain_min: gmin,
            };
            return Ok(CubeOutcome { active: true, gap_oscillation: osc, dropped: None, wave: Some(record), increments, halvings: h, warnings });
        }
        Err(Error::HardFailure {
            detail: format!(
                "wave in cube {:?} leaves the hull after {} amplitude halvings",
                cube.index, self.p.max_amplitude_halvings
            ),
            witness: last_witness,
        })
    }
}

/// One improvement round: a frozen-center localized wave per active cube, summed in lexicographic cube order.
pub fn improvement_step(s: &SubsolutionState, p: &StepParams, round: usize) -> Result<(SubsolutionState, StepReport)> {
    let g = s.grid();
    if !(p.alpha > 0.0) || !(p.eta > 0.0) {
        return Err(Error::invalid("alpha and eta must be positive"));
    }
    let jb = j_functional(&s.z, &s.base, &s.bodies, &s.ebar)?;
    if jb.value < p.alpha * (1.0 - 1e-12) {
        return Err(Error::NoActiveCubes(p.alpha / (30.0 * (g.period / p.eps_cube).powi(g.dim as i32))));
    }
    let vol = g.volume();
    let osc_bound = p.alpha / (10.0 * vol);
    let mut eps_cube = p.eps_cube;
    let mut cube_halvings = 0;
    let mut periods = p.wave_periods;
    let mut refinements = 0;
    loop {
        let tiling = build_tiling(&g, eps_cube)?;
        let c_rho = (g.period / eps_cube).powi(g.dim as i32);
        let threshold = p.alpha / (30.0 * c_rho);
        let ctx = CubeContext { s, tiling: &tiling, p, threshold, periods, round };
        let outcomes: Vec<CubeOutcome> = tiling.cubes.par_iter().map(|c| ctx.process(c)).collect::<Result<_>>()?;
        let gap_osc = outcomes.iter().filter(|o| o.active).map(|o| o.gap_oscillation).fold(0.0, f64::max);
        if gap_osc > osc_bound {
            if let Some(floor) = p.min_eps_cube {
                if eps_cube / 2.0 >= floor * (1.0 - 1e-12) && build_tiling(&g, eps_cube / 2.0).is_ok() {
                    eps_cube /= 2.0;
                    cube_halvings += 1;
                    continue;
                }
            }
        }
        let active = outcomes.iter().filter(|o| o.active).count();
        if active == 0 {
            return Err(Error::NoActiveCubes(threshold));
        }
        let mut next = s.clone();
        let mut warnings = Vec::new();
        let mut dropped = Vec::new();
        let mut waves = Vec::new();
        for (cube, o) in tiling.cubes.iter().zip(&outcomes) {
            for (node, inc) in &o.increments {
                next.z.at_mut(*node).iter_mut().zip(inc).for_each(|(a, b)| *a += b);
            }
            if let Some(why) = &o.dropped {
                dropped.push((cube.index.clone(), why.clone()));
            }
            warnings.extend(o.warnings.iter().map(|w| format!("cube {:?}: {w}", cube.index)));
            if let Some(w) = &o.wave {
                waves.push(w.clone());
            }
        }
        let diff = next.z.zip_map(&s.z, |a, b| a - b)?;
        let hm1 = sup_h_minus1(&diff)?;
        if hm1 > p.eta && refinements < p.max_refinements && p.eps_wave.is_none() {
            periods *= 2.0;
            refinements += 1;
            continue;
        }
        if hm1 > p.eta {
            warnings.push(format!("H^-1 increment {hm1:e} exceeds the budget {:e}", p.eta));
        }
        next.waves.extend(waves.iter().cloned());
        next.refresh_margins();
        let ja = j_functional(&next.z, &next.base, &next.bodies, &next.ebar)?;
        let slice_gains: Vec<f64> = jb.profile.iter().zip(&ja.profile).map(|(b, a)| b - a).collect();
        let x0 = check_x0(&next, &p.x0)?;
        let beta = jb.value - ja.value;
        let report = StepReport {
            alpha: p.alpha,
            threshold,
            eps_cube,
            cube_halvings,
            gap_oscillation: gap_osc,
            oscillation_bound: osc_bound,
            oscillation_exceeded: gap_osc > osc_bound,
            wave_periods: periods,
            refinements,
            cubes: tiling.cubes.len(),
            active_cubes: active,
            inserted_waves: waves.len(),
            dropped,
            amplitude_halvings: outcomes.iter().map(|o| o.halvings).sum(),
            j_before: jb.value,
            j_after: ja.value,
            beta,
            kappa: beta / (p.alpha * p.alpha),
            slice_gain_min: slice_gains.iter().copied().fold(f64::INFINITY, f64::min),
            slice_gains,
            window_j_before: window_maxima(&jb),
            window_j_after: window_maxima(&ja),
            h_minus1_increment: hm1,
            eta: p.eta,
            measured_c_min: waves.iter().map(|w| w.measured_c).fold(f64::INFINITY, f64::min),
            wave_residual_max: waves.iter().map(|w| w.residual_max).fold(0.0, f64::max),
            min_margin: next.min_margin(),
            x0,
            warnings,
        };
        return Ok((next, report));
    }
}

/// Scalar field of per-node gaps `e - j^2`.
pub fn gap_field(s: &SubsolutionState) -> GridField {
    let n = s.grid().dim;
    let mut f = GridField::zeros(s.grid(), FieldKind::Scalar);
    for node in 0..s.grid().n_nodes() {
        f.data[node] = node_gap(&s.z.at(node)[..n], &s.base.at(node)[..n], s.bodies.at(node), s.ebar.at(node)[0]);
    }
    f
}
