//! Strict TOML run configuration.
//!
//! Every key is optional and falls back to the default shown by
//! [`RunConfig::default`]. Unknown keys, malformed values and out-of-range
//! numbers are rejected with the line they occur on.

use std::fmt;
use std::path::{Path, PathBuf};

use biquat_core::maxwell::CatalogName;
use biquat_core::ReversalVariant;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: cannot read config: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Invalid {
        path: String,
        line: usize,
        message: String,
    },
}

#[cfg(test)]
impl ConfigError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Read { .. } => None,
            ConfigError::Invalid { line, .. } => Some(*line),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub variant: ReversalVariant,
    pub out_dir: PathBuf,
    pub algebra: AlgebraConfig,
    pub regularity: RegularityConfig,
    pub reconstruct: ReconstructConfig,
    pub maxwell: MaxwellConfig,
    pub worldline: WorldlineConfig,
    pub lw_field: LwFieldConfig,
    pub tube: TubeConfig,
    pub constants: ConstantsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            variant: ReversalVariant::Starred,
            out_dir: PathBuf::from("biquat-out"),
            algebra: AlgebraConfig::default(),
            regularity: RegularityConfig::default(),
            reconstruct: ReconstructConfig::default(),
            maxwell: MaxwellConfig::default(),
            worldline: WorldlineConfig::default(),
            lw_field: LwFieldConfig::default(),
            tube: TubeConfig::default(),
            constants: ConstantsConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgebraConfig {
    pub samples: usize,
    pub transforms: usize,
    pub tolerance: f64,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            transforms: 1000,
            tolerance: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularityField {
    FueterKernel,
    Identity,
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegularityConfig {
    pub field: RegularityField,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub probes: usize,
    pub h: f64,
    pub tolerance: f64,
    /// Also require the residual to drop about fourfold when `h` halves.
    pub check_order: bool,
}

impl Default for RegularityConfig {
    fn default() -> Self {
        Self {
            field: RegularityField::FueterKernel,
            inner_radius: 0.5,
            outer_radius: 2.0,
            probes: 200,
            h: 1e-4,
            tolerance: 1e-5,
            check_order: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReconstructField {
    Constant,
    ExteriorKernel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructConfig {
    pub field: ReconstructField,
    /// Real quaternion used by the constant field.
    pub value: [f64; 4],
    /// Pole of the exterior kernel field.
    pub pole: [f64; 4],
    pub center: [f64; 4],
    pub radii: Vec<f64>,
    /// Evaluation points as offsets from `center` in units of each radius,
    /// so entries with norm below 1 are interior to every sphere.
    pub points: Vec<[f64; 4]>,
    /// Absolute evaluation point expected outside every sphere.
    pub exterior_point: [f64; 4],
    pub nodes: usize,
    pub tolerance: f64,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            field: ReconstructField::Constant,
            value: [1.0, 2.0, 3.0, 4.0],
            pole: [3.0, 0.0, 0.0, 0.0],
            center: [0.0; 4],
            radii: vec![1.0],
            points: vec![
                [0.0, 0.0, 0.0, 0.0],
                [0.4, 0.0, 0.0, 0.0],
                [0.0, -0.4, 0.0, 0.0],
                [0.0, 0.0, 0.24, 0.32],
                [0.2, 0.2, -0.2, 0.2],
            ],
            exterior_point: [0.0, 3.0, 0.0, 0.0],
            nodes: 32,
            tolerance: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub t: f64,
    pub extent: f64,
    /// Cell-centered samples per axis; 0 disables the field map.
    pub points_per_axis: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            t: 0.0,
            extent: 4.0,
            points_per_axis: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxwellConfig {
    pub field: CatalogName,
    pub probes: usize,
    pub extent: f64,
    pub min_radius: f64,
    pub h: f64,
    pub tolerance: f64,
    pub source_tolerance: f64,
    pub gauge_samples: usize,
    pub gauge_tolerance: f64,
    pub grid: GridConfig,
}

impl Default for MaxwellConfig {
    fn default() -> Self {
        Self {
            field: CatalogName::PlaneWave,
            probes: 50,
            extent: 2.0,
            min_radius: 0.5,
            h: 1e-4,
            tolerance: 1e-5,
            source_tolerance: 1e-4,
            gauge_samples: 100,
            gauge_tolerance: 1e-6,
            grid: GridConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorldlineKind {
    Static,
    Uniform,
    Circular,
    Table,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldlineConfig {
    pub kind: WorldlineKind,
    pub charge: f64,
    /// Position of a static charge, or the position at `t = 0` of a
    /// uniformly moving one.
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub center: [f64; 3],
    pub radius: f64,
    pub omega: f64,
    pub phase: f64,
    /// CSV with columns `tau,t,x,y,z`, relative to the config file.
    pub table: Option<PathBuf>,
}

impl Default for WorldlineConfig {
    fn default() -> Self {
        Self {
            kind: WorldlineKind::Static,
            charge: 1.0,
            position: [0.0, 0.0, 1.0],
            velocity: [0.0; 3],
            center: [0.0; 3],
            radius: 1.0,
            omega: 0.3,
            phase: 0.0,
            table: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LwFieldConfig {
    pub grid: GridConfig,
    pub h: f64,
    pub null_tolerance: f64,
    pub residual_tolerance: f64,
    pub lorenz_tolerance: f64,
    /// Grid points with a smaller retarded distance stay in the field map
    /// but are left out of the residual checks.
    pub min_xi: f64,
}

impl Default for LwFieldConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            h: 1e-3,
            null_tolerance: 1e-8,
            residual_tolerance: 1e-4,
            lorenz_tolerance: 1e-4,
            min_xi: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TubeConfig {
    pub xi0: f64,
    pub sweep: Vec<f64>,
    pub tau_range: [f64; 2],
    pub n_tau: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Finite-difference step for the self-field, relative to `xi0`.
    pub relative_step: f64,
    pub kinetic_tolerance: f64,
    pub external: CatalogName,
    pub interaction_sweep: Vec<f64>,
    pub interaction_tolerance: f64,
    pub linearity_tolerance: f64,
    /// Shell around the initial position for the volume decomposition.
    pub shell_radii: [f64; 2],
    pub shell_nodes: [usize; 4],
    pub volume_tolerance: f64,
}

impl Default for TubeConfig {
    fn default() -> Self {
        Self {
            xi0: 0.5,
            sweep: vec![0.4, 0.2, 0.1],
            tau_range: [0.0, 1.0],
            n_tau: 8,
            n_theta: 16,
            n_phi: 32,
            relative_step: 1e-3,
            kinetic_tolerance: 0.02,
            external: CatalogName::UniformE,
            interaction_sweep: vec![0.4, 0.2, 0.1, 0.05],
            interaction_tolerance: 0.03,
            linearity_tolerance: 1e-6,
            shell_radii: [0.3, 0.9],
            shell_nodes: [2, 8, 8, 8],
            volume_tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    pub alpha: f64,
    pub two_hc_expected: f64,
    pub two_hc_tolerance: f64,
    pub mass_ratio_expected: f64,
    pub mass_ratio_tolerance: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self {
            alpha: biquat_core::worldline::FINE_STRUCTURE,
            two_hc_expected: 1722.0,
            two_hc_tolerance: 0.5,
            mass_ratio_expected: 205.55,
            mass_ratio_tolerance: 0.05,
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: label.clone(),
        source,
    })?;
    let mut config = parse_config(&text, &label)?;
    if let Some(table) = &config.worldline.table {
        if table.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            config.worldline.table = Some(base.join(table));
        }
    }
    Ok(config)
}

pub fn parse_config(text: &str, label: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| line_of(text, s.start));
        ConfigError::Invalid {
            path: label.to_string(),
            line,
            message: describe(e.message()),
        }
    })?;
    validate(&config).map_err(|v| ConfigError::Invalid {
        path: label.to_string(),
        line: locate(text, v.section, v.key),
        message: format!("`{}` {}", v.qualified(), v.reason),
    })?;
    Ok(config)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Adds a "did you mean" hint to serde's unknown-field/variant messages.
fn describe(message: &str) -> String {
    let message = message.trim_end();
    let unknown = ["unknown field", "unknown variant"]
        .iter()
        .any(|p| message.starts_with(p));
    if !unknown {
        return message.to_string();
    }
    let quoted: Vec<&str> = message.split('`').skip(1).step_by(2).collect();
    let Some((name, candidates)) = quoted.split_first() else {
        return message.to_string();
    };
    let best = candidates
        .iter()
        .map(|c| (strsim::jaro_winkler(name, c), *c))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    match best {
        Some((score, c)) if score >= 0.6 => format!("{message}; did you mean `{c}`?"),
        _ => message.to_string(),
    }
}

/// First line assigning `key` inside `[section]` (or at top level for an
/// empty section); falls back to the section header, then to line 1.
fn locate(text: &str, section: &str, key: &str) -> usize {
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return i + 1;
                }
            }
        }
    }
    header.unwrap_or(1)
}

struct Violation {
    section: &'static str,
    key: &'static str,
    reason: String,
}

impl Violation {
    fn qualified(&self) -> String {
        if self.section.is_empty() {
            self.key.to_string()
        } else {
            format!("{}.{}", self.section, self.key)
        }
    }
}

struct Checker {
    section: &'static str,
}

impl Checker {
    fn fail(&self, key: &'static str, reason: impl fmt::Display) -> Violation {
        Violation {
            section: self.section,
            key,
            reason: reason.to_string(),
        }
    }

    fn positive(&self, key: &'static str, value: f64) -> Result<(), Violation> {
        if value > 0.0 && value.is_finite() {
            Ok(())
        } else {
            Err(self.fail(key, format!("must be positive and finite, got {value}")))
        }
    }

    fn nonzero(&self, key: &'static str, value: usize) -> Result<(), Violation> {
        if value > 0 {
            Ok(())
        } else {
            Err(self.fail(key, "must be at least 1"))
        }
    }

    fn finite(&self, key: &'static str, values: &[f64]) -> Result<(), Violation> {
        if values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(self.fail(key, "must be finite"))
        }
    }
}

fn validate(c: &RunConfig) -> Result<(), Violation> {
    let a = Checker { section: "algebra" };
    a.nonzero("samples", c.algebra.samples)?;
    a.nonzero("transforms", c.algebra.transforms)?;
    a.positive("tolerance", c.algebra.tolerance)?;

    let r = Checker {
        section: "regularity",
    };
    let reg = &c.regularity;
    r.positive("inner_radius", reg.inner_radius)?;
    r.positive("outer_radius", reg.outer_radius)?;
    if reg.outer_radius < reg.inner_radius {
        return Err(r.fail("outer_radius", "must not be smaller than inner_radius"));
    }
    r.nonzero("probes", reg.probes)?;
    r.positive("h", reg.h)?;
    r.positive("tolerance", reg.tolerance)?;

    let q = Checker {
        section: "reconstruct",
    };
    let rec = &c.reconstruct;
    q.finite("value", &rec.value)?;
    q.finite("pole", &rec.pole)?;
    q.finite("center", &rec.center)?;
    if rec.radii.is_empty() {
        return Err(q.fail("radii", "must list at least one radius"));
    }
    for &radius in &rec.radii {
        q.positive("radii", radius)?;
    }
    if rec.points.is_empty() {
        return Err(q.fail("points", "must list at least one point"));
    }
    for p in &rec.points {
        q.finite("points", p)?;
    }
    q.finite("exterior_point", &rec.exterior_point)?;
    q.nonzero("nodes", rec.nodes)?;
    q.positive("tolerance", rec.tolerance)?;

    let m = Checker { section: "maxwell" };
    let mx = &c.maxwell;
    m.nonzero("probes", mx.probes)?;
    m.positive("extent", mx.extent)?;
    if !(mx.min_radius >= 0.0 && mx.min_radius < mx.extent) {
        return Err(m.fail("min_radius", "must lie in [0, extent)"));
    }
    m.positive("h", mx.h)?;
    m.positive("tolerance", mx.tolerance)?;
    m.positive("source_tolerance", mx.source_tolerance)?;
    m.positive("gauge_tolerance", mx.gauge_tolerance)?;
    let g = Checker {
        section: "maxwell.grid",
    };
    g.positive("extent", mx.grid.extent)?;
    g.finite("t", &[mx.grid.t])?;

    let w = Checker {
        section: "worldline",
    };
    let wl = &c.worldline;
    w.finite("charge", &[wl.charge])?;
    w.finite("position", &wl.position)?;
    w.finite("velocity", &wl.velocity)?;
    w.finite("center", &wl.center)?;
    match wl.kind {
        WorldlineKind::Uniform => {
            let speed = wl.velocity.iter().map(|v| v * v).sum::<f64>().sqrt();
            if speed >= 1.0 {
                return Err(w.fail("velocity", format!("speed must be below 1, got {speed}")));
            }
        }
        WorldlineKind::Circular => {
            w.positive("radius", wl.radius)?;
            w.finite("omega", &[wl.omega, wl.phase])?;
            if (wl.radius * wl.omega).abs() >= 1.0 {
                return Err(w.fail("omega", "radius * omega must be below 1"));
            }
        }
        WorldlineKind::Table => {
            if wl.table.is_none() {
                return Err(w.fail("kind", "`table` requires a `table` path"));
            }
        }
        WorldlineKind::Static => {}
    }

    let l = Checker {
        section: "lw_field",
    };
    let lw = &c.lw_field;
    l.positive("h", lw.h)?;
    l.positive("null_tolerance", lw.null_tolerance)?;
    l.positive("residual_tolerance", lw.residual_tolerance)?;
    l.positive("lorenz_tolerance", lw.lorenz_tolerance)?;
    if !(lw.min_xi >= 0.0 && lw.min_xi.is_finite()) {
        return Err(l.fail("min_xi", "must be non-negative and finite"));
    }
    let lg = Checker {
        section: "lw_field.grid",
    };
    lg.positive("extent", lw.grid.extent)?;
    lg.finite("t", &[lw.grid.t])?;

    let t = Checker { section: "tube" };
    let tb = &c.tube;
    t.positive("xi0", tb.xi0)?;
    for &xi in &tb.sweep {
        t.positive("sweep", xi)?;
    }
    for &xi in &tb.interaction_sweep {
        t.positive("interaction_sweep", xi)?;
    }
    t.finite("tau_range", &tb.tau_range)?;
    if tb.tau_range[1] <= tb.tau_range[0] {
        return Err(t.fail("tau_range", "must be an increasing interval"));
    }
    t.nonzero("n_tau", tb.n_tau)?;
    t.nonzero("n_theta", tb.n_theta)?;
    t.nonzero("n_phi", tb.n_phi)?;
    t.positive("relative_step", tb.relative_step)?;
    t.positive("kinetic_tolerance", tb.kinetic_tolerance)?;
    t.positive("interaction_tolerance", tb.interaction_tolerance)?;
    t.positive("linearity_tolerance", tb.linearity_tolerance)?;
    t.positive("volume_tolerance", tb.volume_tolerance)?;
    t.positive("shell_radii", tb.shell_radii[0])?;
    if tb.shell_radii[1] <= tb.shell_radii[0] {
        return Err(t.fail("shell_radii", "must be an increasing pair"));
    }
    for &n in &tb.shell_nodes {
        t.nonzero("shell_nodes", n)?;
    }

    let k = Checker {
        section: "constants",
    };
    let cs = &c.constants;
    k.positive("alpha", cs.alpha)?;
    k.positive("two_hc_tolerance", cs.two_hc_tolerance)?;
    k.positive("mass_ratio_tolerance", cs.mass_ratio_tolerance)?;
    Ok(())
}
