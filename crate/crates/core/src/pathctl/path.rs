use super::midpoint::{midpoint, velocity_distance, MidpointConfig, MidpointReport};
use crate::error::{Error, Result};
use crate::fields::{write_field, GridField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const MAX_DEPTH: u32 = 5;

/// Path point at dyadic parameter `index / 2^level` (lowest terms).
#[derive(Debug, Clone)]
pub struct PathNode {
    pub index: u64,
    pub level: u32,
    pub z: GridField,
    /// Parameters of the two parents, as `(index, level)`.
    pub parents: Option<[(u64, u32); 2]>,
    pub report: Option<MidpointReport>,
}

impl PathNode {
    pub fn s(&self) -> f64 {
        self.index as f64 / (1u64 << self.level) as f64
    }

    /// Index on the finest grid `2^depth`.
    pub fn fine_index(&self, depth: u32) -> u64 {
        self.index << (depth - self.level)
    }

    pub fn recursion_holds(&self) -> bool {
        self.report.as_ref().map_or(true, |r| r.bound_holds)
    }
}

/// Reduced dyadic form of `k / 2^depth`.
fn reduce(k: u64, depth: u32) -> (u64, u32) {
    if k == 0 {
        return (0, 0);
    }
    let tz = k.trailing_zeros().min(depth);
    (k >> tz, depth - tz)
}

/// Recursive midpoints at every dyadic level up to `depth`, ordered by parameter.
pub fn dyadic_path(z0: &GridField, z1: &GridField, depth: u32, cfg: &MidpointConfig) -> Result<Vec<PathNode>> {
    if depth > MAX_DEPTH {
        return Err(Error::invalid(format!("path depth {depth} exceeds {MAX_DEPTH}")));
    }
    let mut nodes: BTreeMap<u64, PathNode> = BTreeMap::new();
    let full = 1u64 << depth;
    nodes.insert(0, PathNode { index: 0, level: 0, z: z0.clone(), parents: None, report: None });
    nodes.insert(full, PathNode { index: 1, level: 0, z: z1.clone(), parents: None, report: None });
    for level in 1..=depth {
        let step = 1u64 << (depth - level);
        let jobs: Vec<u64> = (0..(1u64 << (level - 1))).map(|l| (2 * l + 1) * step).collect();
        let made: Vec<Result<PathNode>> = jobs
            .par_iter()
            .map(|&k| {
                let (a, b) = (&nodes[&(k - step)], &nodes[&(k + step)]);
                let m = midpoint(&a.z, &b.z, cfg).map_err(|e| Error::Midpoint {
                    index: k >> (depth - level),
                    denominator: 1u64 << level,
                    source: Box::new(e),
                })?;
                let (index, lvl) = reduce(k, depth);
                Ok(PathNode {
                    index,
                    level: lvl,
                    z: m.z,
                    parents: Some([reduce(k - step, depth), reduce(k + step, depth)]),
                    report: Some(m.report),
                })
            })
            .collect();
        // Single writer, keyed by dyadic position.
        for (k, node) in jobs.into_iter().zip(made) {
            nodes.insert(k, node?);
        }
    }
    Ok(nodes.into_values().collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderRow {
    pub s: f64,
    pub s_prime: f64,
    pub distance: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderReport {
    pub rows: Vec<HolderRow>,
    pub max_quotient: f64,
    /// `||u_1 - u_0||`.
    pub endpoint_gap: f64,
    /// `max_quotient / endpoint_gap`.
    pub constant: f64,
    /// Largest `delta_meas` among midpoints created at each level `1..=depth`.
    pub level_deltas: Vec<f64>,
    /// Recursion bounds `D_k` on dyadic-neighbor distances, `D_0 = endpoint_gap`.
    pub neighbor_bounds: Vec<f64>,
    /// Measured max dyadic-neighbor distance per level.
    pub neighbor_measured: Vec<f64>,
    pub budget: f64,
    pub within_budget: bool,
}

/// Chaining budget from `D_{k+1} = D_k / sqrt 2 + delta_{k+1}`:
/// `max_{k0} 2^{(k0+1)/2} (D_{k0} + 2 sum_{k > k0} D_k) / D_0`.
pub fn holder_budget(endpoint_gap: f64, level_deltas: &[f64]) -> (Vec<f64>, f64) {
    let mut d = vec![endpoint_gap];
    for delta in level_deltas {
        d.push(d.last().unwrap() / std::f64::consts::SQRT_2 + delta);
    }
    if endpoint_gap == 0.0 {
        return (d, 0.0);
    }
    let budget = (0..d.len())
        .map(|k0| {
            let tail: f64 = d[k0 + 1..].iter().sum();
            2f64.powf((k0 as f64 + 1.0) / 2.0) * (d[k0] + 2.0 * tail) / endpoint_gap
        })
        .fold(0.0, f64::max);
    (d, budget)
}

/// All-pairs Hölder-1/2 quotients with sup-L2 distances on `window`.
pub fn holder_report(path: &[PathNode], window: (usize, usize)) -> Result<HolderReport> {
    if path.len() < 2 {
        return Err(Error::invalid("Hölder report needs at least two nodes"));
    }
    let depth = path.iter().map(|p| p.level).max().unwrap();
    let mut rows = Vec::new();
    for i in 0..path.len() {
        for j in i + 1..path.len() {
            let d = velocity_distance(&path[i].z, &path[j].z, window)?;
            let ds = (path[j].s() - path[i].s()).abs();
            rows.push(HolderRow { s: path[i].s(), s_prime: path[j].s(), distance: d, quotient: d / ds.sqrt() });
        }
    }
    let endpoint_gap = velocity_distance(&path[0].z, &path[path.len() - 1].z, window)?;
    let max_quotient = rows.iter().map(|r| r.quotient).fold(0.0, f64::max);
    let mut level_deltas = vec![0.0f64; depth as usize];
    for p in path {
        if let Some(r) = &p.report {
            let l = p.level as usize - 1;
            level_deltas[l] = level_deltas[l].max(r.delta_meas);
        }
    }
    let (neighbor_bounds, budget) = holder_budget(endpoint_gap, &level_deltas);
    let mut neighbor_measured = Vec::new();
    for k in 0..=depth {
        let members: Vec<&PathNode> = path.iter().filter(|p| p.level <= k).collect();
        let m = members
            .windows(2)
            .map(|w| velocity_distance(&w[0].z, &w[1].z, window))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        neighbor_measured.push(m);
    }
    let constant = if endpoint_gap > 0.0 { max_quotient / endpoint_gap } else { 0.0 };
    Ok(HolderReport {
        rows,
        max_quotient,
        endpoint_gap,
        constant,
        level_deltas,
        neighbor_bounds,
        neighbor_measured,
        budget,
        within_budget: constant <= budget * (1.0 + 1e-12),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub s: f64,
    pub index: u64,
    pub level: u32,
    pub file: String,
    pub parents: Option<[(u64, u32); 2]>,
    pub report: Option<MidpointReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub depth: u32,
    pub nodes: Vec<ManifestEntry>,
    pub holder: HolderReport,
}

/// Node checkpoints, `manifest.json` and `holder.csv` under `dir`.
pub fn write_manifest(dir: &Path, path: &[PathNode], holder: &HolderReport) -> Result<Manifest> {
    std::fs::create_dir_all(dir)?;
    let depth = path.iter().map(|p| p.level).max().unwrap_or(0);
    let mut nodes = Vec::new();
    for p in path {
        let file = format!("node_{:0width$}.fld", p.fine_index(depth), width = 3);
        write_field(&dir.join(&file), &p.z)?;
        nodes.push(ManifestEntry { s: p.s(), index: p.index, level: p.level, file, parents: p.parents, report: p.report.clone() });
    }
    let manifest = Manifest { depth, nodes, holder: holder.clone() };
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    let mut csv = String::from("s,s_prime,distance,quotient\n");
    for r in &holder.rows {
        csv.push_str(&format!("{},{},{:e},{:e}\n", r.s, r.s_prime, r.distance, r.quotient));
    }
    std::fs::write(dir.join("holder.csv"), csv)?;
    Ok(manifest)
}
