use crate::report::CliError;
use eulerci_core::convex_geometry::LensBody;
use eulerci_core::engine::EngineConfig;
use eulerci_core::fields::GridSpec;
use eulerci_core::pathctl::{FixtureSpec, MidpointConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;

pub const SEED_ENV: &str = "EULERCI_SEED";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Output directory; `--out` takes precedence.
    pub out: Option<String>,
    pub geometry: GeometryConfig,
    pub potential: PotentialConfig,
    pub engine: EngineRunConfig,
    pub path: PathConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out: None,
            geometry: GeometryConfig::default(),
            potential: PotentialConfig::default(),
            engine: EngineRunConfig::default(),
            path: PathConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Bodies swept by every check.
    pub bodies: Vec<LensBody>,
    /// Random points or pairs per sampled check.
    pub samples: usize,
    /// Uniform-convexity constant; each body's guaranteed constant when absent.
    pub convexity_c: Option<f64>,
    pub hausdorff_dirs: usize,
    pub gauge_rel_tol: f64,
    pub a_k_tol: f64,
    pub hessian_tol: f64,
    pub hessian_step: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let lens = |axis: &[f64], a: f64, r: f64| LensBody::new(axis, a, r).expect("default body");
        GeometryConfig {
            bodies: vec![
                lens(&[1.0, 0.0], 0.6, 1.0),
                lens(&[1.0, 0.0], 1.0, 2f64.sqrt()),
                lens(&[0.6, 0.8], 0.3, 0.9),
                lens(&[0.0, 0.0, 1.0], 0.5, 1.0),
                LensBody::ball(2, 1.3).expect("default ball"),
            ],
            samples: 1000,
            convexity_c: None,
            hausdorff_dirs: 4096,
            gauge_rel_tol: 1e-10,
            a_k_tol: 1e-4,
            hessian_tol: 1e-3,
            hessian_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitPair {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    /// Random non-aligned pairs drawn per dimension in `dims`.
    pub pairs: usize,
    pub dims: Vec<usize>,
    /// Range of the pair weight `t`.
    pub t_range: [f64; 2],
    /// Extra pairs checked verbatim; an aligned one is reported as a failure.
    pub explicit: Vec<ExplicitPair>,
    pub polynomial_trials: usize,
    pub wave_points: usize,
    pub cone_tol: f64,
    pub frame_tol: f64,
    pub plane_wave_tol: f64,
    pub polynomial_tol: f64,
    pub wave_residual_tol: f64,
    pub roundtrip_tol: f64,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig {
            pairs: 500,
            dims: vec![2, 3],
            t_range: [0.05, 3.0],
            explicit: Vec::new(),
            polynomial_trials: 50,
            wave_points: 500,
            cone_tol: 1e-9,
            frame_tol: 1e-10,
            plane_wave_tol: 1e-10,
            polynomial_tol: 1e-9,
            wave_residual_tol: 1e-8,
            roundtrip_tol: 1e-14,
        }
    }
}

/// Constant subsolution `z0 = (v0, M0, q0)` with one body and energy everywhere.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineFixture {
    pub v0: Vec<f64>,
    /// Upper triangle of `M0`, row-major.
    pub m0: Vec<f64>,
    pub q0: f64,
    pub body: LensBody,
    pub ebar: f64,
}

impl Default for EngineFixture {
    fn default() -> Self {
        EngineFixture {
            v0: vec![0.0, 0.0],
            m0: vec![0.0, 0.0, 0.0],
            q0: 0.0,
            body: LensBody::new(&[1.0, 0.0], 1.0, 2f64.sqrt()).expect("default body"),
            ebar: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineRunConfig {
    pub grid: GridSpec,
    pub fixture: EngineFixture,
    /// Start from a saved state directory instead of the fixture.
    pub checkpoint: Option<String>,
    pub iterate: EngineConfig,
    pub save_checkpoint: bool,
}

pub fn default_grid() -> GridSpec {
    GridSpec { dim: 2, nx: 64, nt: 16, t0: 0.0, t1: 1.0, period: 1.0 }
}

impl Default for EngineRunConfig {
    fn default() -> Self {
        EngineRunConfig {
            grid: default_grid(),
            fixture: EngineFixture::default(),
            checkpoint: None,
            iterate: EngineConfig::default(),
            save_checkpoint: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathConfig {
    pub grid: GridSpec,
    pub u0: FixtureSpec,
    pub u1: FixtureSpec,
    pub depth: u32,
    pub midpoint: MidpointConfig,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            grid: default_grid(),
            u0: FixtureSpec::Zero,
            u1: FixtureSpec::Shear { amplitude: 1.0, wavenumber: 1 },
            depth: 2,
            midpoint: MidpointConfig::default(),
        }
    }
}

/// Sets `value` at a dotted key path, creating intermediate objects.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::usage(format!("--set expects key=value, got '{assignment}'")))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(CliError::usage(format!("--set has an empty key segment in '{key}'")));
    }
    // Bare words that are not JSON become strings.
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let segments: Vec<&str> = key.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let obj = match node {
            Value::Object(map) => map,
            _ => return Err(CliError::usage(format!("--set {key}: '{}' is not an object", segments[..i].join(".")))),
        };
        if i + 1 == segments.len() {
            obj.insert(seg.to_string(), value);
            return Ok(());
        }
        node = obj.entry(seg.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("key has at least one segment")
}

/// Reads the config file, applies overrides and the seed variable, and validates.
pub fn load(path: &Path, overrides: &[String], seed_env: Option<String>) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut root: Value = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {} is not JSON: {e}", path.display())))?;
    if !root.is_object() {
        return Err(CliError::usage("config must be a JSON object"));
    }
    if !overrides.is_empty() {
        // Fill defaults first so an override never leaves a partially specified block.
        let filled: RunConfig = serde_json::from_value(root).map_err(|e| CliError::usage(format!("invalid config: {e}")))?;
        root = serde_json::to_value(&filled)?;
        for o in overrides {
            apply_override(&mut root, o)?;
        }
    }
    let mut cfg: RunConfig = serde_json::from_value(root).map_err(|e| CliError::usage(format!("invalid config: {e}")))?;
    if let Some(raw) = seed_env {
        cfg.seed = raw.trim().parse().map_err(|_| CliError::usage(format!("{SEED_ENV} must be an unsigned integer, got '{raw}'")))?;
    }
    Ok(cfg)
}

pub fn check_grid(g: &GridSpec) -> Result<(), CliError> {
    g.validate().map_err(|e| CliError::usage(format!("invalid grid: {e}")))
}
