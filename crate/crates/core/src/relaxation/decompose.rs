use super::cone::{is_aligned, lambda_from_pair, LambdaDirection};
use super::hull::{hull_membership, HullQuery, HullTolerances, Membership};
use super::state::{f_map, sym_len, State};
use crate::convex_geometry::{sample_directions, ConvexBodyView, LensBody};
use crate::error::{Error, Result};
use crate::vecops::norm;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// Barycentric representation `sum_i w_i (atom_i, F(atom_i)) = (v, M)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub weights: Vec<f64>,
    pub atoms: Vec<Vec<f64>>,
    pub atom_indices: Vec<usize>,
    pub residual: f64,
}

/// Columns `(1, w, F(w) without its last diagonal entry)`; trace-freeness fixes the dropped entry.
fn lifted(w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let mut col = Vec::with_capacity(1 + n + sym_len(n) - 1);
    col.push(1.0);
    col.extend_from_slice(w);
    let f = f_map(w);
    col.extend_from_slice(&f[..sym_len(n) - 1]);
    col
}

fn target(z: &State) -> Vec<f64> {
    let n = z.dim();
    let mut b = Vec::with_capacity(1 + n + sym_len(n) - 1);
    b.push(1.0);
    b.extend_from_slice(&z.v);
    b.extend_from_slice(&z.m[..sym_len(n) - 1]);
    b
}

fn residual(cols: &[Vec<f64>], w: &[f64], b: &[f64]) -> f64 {
    (0..b.len())
        .map(|r| (cols.iter().zip(w).map(|(c, x)| c[r] * x).sum::<f64>() - b[r]).abs())
        .fold(0.0, f64::max)
}

/// Drops atoms along null directions until at most `rows` remain.
fn caratheodory(cols: &mut Vec<Vec<f64>>, w: &mut Vec<f64>, idx: &mut Vec<usize>, rows: usize) {
    while w.len() > rows {
        let k = w.len();
        let a = DMatrix::from_fn(rows, k, |r, c| cols[c][r]);
        let eig = SymmetricEigen::new(a.transpose() * &a);
        let (imin, _) = eig.eigenvalues.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &e)| {
            if e < acc.1 {
                (i, e)
            } else {
                acc
            }
        });
        let mut beta: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
        if beta.iter().all(|&b| b <= 0.0) {
            beta.iter_mut().for_each(|b| *b = -*b);
        }
        let mut theta = f64::INFINITY;
        let mut drop = 0;
        for i in 0..k {
            if beta[i] > 0.0 && w[i] / beta[i] < theta {
                theta = w[i] / beta[i];
                drop = i;
            }
        }
        for i in 0..k {
            w[i] -= theta * beta[i];
        }
        w[drop] = 0.0;
        let keep: Vec<bool> = w.iter().map(|&x| x > 0.0).collect();
        let mut j = 0;
        cols.retain(|_| {
            j += 1;
            keep[j - 1]
        });
        j = 0;
        idx.retain(|_| {
            j += 1;
            keep[j - 1]
        });
        w.retain(|&x| x > 0.0);
    }
}

/// Least-squares refit of the weights on a fixed support; kept only if nonnegative and better.
fn polish(cols: &[Vec<f64>], w: &mut [f64], b: &[f64]) {
    let rows = b.len();
    let k = w.len();
    let a = DMatrix::from_fn(rows, k, |r, c| cols[c][r]);
    let rhs = DVector::from_column_slice(b);
    let Ok(sol) = a.svd(true, true).solve(&rhs, 1e-14) else {
        return;
    };
    if sol.iter().all(|&x| x >= 0.0) && residual(cols, sol.as_slice(), b) < residual(cols, w, b) {
        w.copy_from_slice(sol.as_slice());
    }
}

/// Boundary atoms `v0 + r d / j_K(d)` over deterministic directions.
pub fn boundary_atoms(body: &LensBody, v0: &[f64], r: f64, n_atoms: usize, rotation: f64) -> Vec<Vec<f64>> {
    sample_directions(body.dim(), n_atoms, rotation)
        .into_iter()
        .map(|d| {
            let j = body.gauge(&d);
            d.iter().zip(v0).map(|(x, c)| c + r * x / j).collect()
        })
        .collect()
}

/// Linear feasibility over boundary atoms, followed by Carathéodory reduction and a polish.
pub fn hull_decompose(
    z: &State,
    body: &LensBody,
    z0: &State,
    r: f64,
    n_atoms: usize,
    rotation: f64,
    tol: &HullTolerances,
) -> Result<Decomposition> {
    if z.dim() != body.dim() || z0.dim() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: z.dim() });
    }
    if !(r > 0.0) || n_atoms < 3 {
        return Err(Error::invalid("decomposition needs r > 0 and at least 3 atoms"));
    }
    let atoms = boundary_atoms(body, &z0.v, r, n_atoms, rotation);
    let all_cols: Vec<Vec<f64>> = atoms.iter().map(|w| lifted(w)).collect();
    let b = target(z);
    let rows = b.len();

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..n_atoms).map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for row in 0..rows {
        let expr: Vec<_> = vars.iter().zip(&all_cols).map(|(&v, c)| (v, c[row])).collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, b[row]);
    }
    let sol = lp.solve().map_err(|_| Error::InfeasibleAtSampling(f64::INFINITY))?;

    let mut idx: Vec<usize> = (0..n_atoms).filter(|&i| sol[vars[i]] > 1e-13).collect();
    let mut w: Vec<f64> = idx.iter().map(|&i| sol[vars[i]]).collect();
    let mut cols: Vec<Vec<f64>> = idx.iter().map(|&i| all_cols[i].clone()).collect();
    caratheodory(&mut cols, &mut w, &mut idx, rows);
    polish(&cols, &mut w, &b);
    let res = residual(&cols, &w, &b);
    if res > tol.feasibility {
        return Err(Error::InfeasibleAtSampling(res));
    }
    Ok(Decomposition { atoms: idx.iter().map(|&i| atoms[i].clone()).collect(), weights: w, atom_indices: idx, residual: res })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscillationConfig {
    pub n_atoms: usize,
    /// Atom-set rotations tried when the selected pair is aligned.
    pub max_rotations: usize,
    pub max_halvings: usize,
    pub tol: HullTolerances,
}

impl Default for OscillationConfig {
    fn default() -> Self {
        OscillationConfig { n_atoms: 256, max_rotations: 3, max_halvings: 20, tol: HullTolerances::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OscillationResult {
    pub direction: LambdaDirection,
    pub decomposition: Decomposition,
    pub margin: f64,
    /// Margins of `z + lambda` and `z - lambda`.
    pub end_margins: (f64, f64),
    /// `|v_bar| / dist(v, boundary of v0 + rK)`.
    pub measured_c: f64,
    pub halvings: usize,
    pub rotations: usize,
    pub warnings: Vec<String>,
}

/// Euclidean distance from `p` to the boundary of the scaled, untranslated lens `rK`.
fn boundary_distance(body: &LensBody, p: &[f64], r: f64) -> f64 {
    body.centers()
        .iter()
        .map(|c| r * body.radius() - norm(&p.iter().zip(c).map(|(x, y)| x - r * y).collect::<Vec<_>>()))
        .fold(f64::INFINITY, f64::min)
}

/// Picks `(v_1, v_j)` from a decomposition sorted by descending weight, maximizing `alpha_j |v_j - v_1|`.
fn select_pair(d: &Decomposition, skip_aligned: bool) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..d.weights.len()).collect();
    order.sort_by(|&i, &j| d.weights[j].partial_cmp(&d.weights[i]).unwrap().then(d.atom_indices[i].cmp(&d.atom_indices[j])));
    let first = *order.first()?;
    let v1 = &d.atoms[first];
    let mut best: Option<(usize, f64)> = None;
    for &j in order.iter().skip(1) {
        if skip_aligned && is_aligned(v1, &d.atoms[j]) {
            continue;
        }
        let s = d.weights[j] * norm(&d.atoms[j].iter().zip(v1).map(|(a, b)| a - b).collect::<Vec<_>>());
        if best.map_or(true, |(_, b)| s > b) {
            best = Some((j, s));
        }
    }
    best.map(|(j, _)| (first, j))
}

/// Selection rule on a given decomposition: `lambda = (alpha_j / 2)(v_j - v_1, F(v_j) - F(v_1), ...)`.
pub fn direction_from_decomposition(d: &Decomposition) -> Result<LambdaDirection> {
    let (i, j) = select_pair(d, false).ok_or(Error::InfeasibleAtSampling(d.residual))?;
    lambda_from_pair(&d.atoms[i], &d.atoms[j], d.weights[j] / 2.0)
}

/// Wave-cone direction `lambda` with `z +- lambda` inside the hull of the translated constraint set.
pub fn oscillation_direction(
    z: &State,
    body: &LensBody,
    z0: &State,
    r: f64,
    cfg: &OscillationConfig,
) -> Result<OscillationResult> {
    let query = HullQuery::new(body.clone(), z0.clone(), r)?;
    let margin = match hull_membership(z, &query, &cfg.tol)? {
        Membership::Inside(m) => m,
        _ => return Err(Error::NotInside),
    };
    let mut warnings = Vec::new();
    let mut chosen = None;
    let mut last_decomp = None;
    for k in 0..=cfg.max_rotations {
        let rotation = 0.37 * k as f64;
        let d = hull_decompose(z, body, z0, r, cfg.n_atoms, rotation, &cfg.tol)?;
        match select_pair(&d, false) {
            Some((i, j)) if !is_aligned(&d.atoms[i], &d.atoms[j]) => {
                chosen = Some((d, i, j, k));
                break;
            }
            Some(_) => warnings.push(format!("aligned pair at atom rotation {rotation:.2}; rotating atoms")),
            None => return Err(Error::InfeasibleAtSampling(d.residual)),
        }
        last_decomp = Some(d);
    }
    let (d, i, j, rotations) = match chosen {
        Some(c) => c,
        None => {
            let d = last_decomp.expect("at least one decomposition");
            let (i, j) = select_pair(&d, true).ok_or(Error::Alignment)?;
            warnings.push("selected the best non-aligned pair instead".into());
            (d, i, j, cfg.max_rotations)
        }
    };
    let mut dir = lambda_from_pair(&d.atoms[i], &d.atoms[j], d.weights[j] / 2.0)?;
    let end_margin = |dir: &LambdaDirection| -> Result<(f64, f64)> {
        Ok((query.raw_margin(&z.add(&dir.state))?, query.raw_margin(&z.sub(&dir.state))?))
    };
    let mut halvings = 0;
    let mut ends = end_margin(&dir)?;
    while ends.0.min(ends.1) < 0.5 * margin - cfg.tol.slack {
        if halvings == cfg.max_halvings {
            return Err(Error::NotInside);
        }
        dir = dir.rescaled(0.5);
        halvings += 1;
        ends = end_margin(&dir)?;
    }
    if halvings > 0 {
        warnings.push(format!("direction halved {halvings} times to keep z +- lambda inside"));
    }
    let p: Vec<f64> = z.v.iter().zip(&z0.v).map(|(a, b)| a - b).collect();
    let dist = boundary_distance(body, &p, r);
    let measured_c = norm(&dir.state.v) / dist;
    Ok(OscillationResult {
        direction: dir,
        decomposition: d,
        margin,
        end_margins: ends,
        measured_c,
        halvings,
        rotations,
        warnings,
    })
}
