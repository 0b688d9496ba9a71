//! Job configuration: a TOML document with `[job]`, `[model]`, `[post]`,
//! `[[sweep]]`, `[[points]]`, `[fit]`, `[quench]` and `[output]` sections.
//! Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    PhaseDiagram,
    Correlations,
    Entropy,
    Quench,
    Scaling,
}

impl JobKind {
    pub const ALL: [JobKind; 5] = [
        JobKind::PhaseDiagram,
        JobKind::Correlations,
        JobKind::Entropy,
        JobKind::Quench,
        JobKind::Scaling,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            JobKind::PhaseDiagram => "phase-diagram",
            JobKind::Correlations => "correlations",
            JobKind::Entropy => "entropy",
            JobKind::Quench => "quench",
            JobKind::Scaling => "scaling",
        }
    }
}

impl fmt::Display for JobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for JobKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        JobKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown job kind `{s}`")))
    }
}

/// Names accepted in sweeps, points and `[post]`.
pub const PARAM_NAMES: [&str; 5] = ["gamma", "d", "h", "alpha", "n"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSection {
    pub kind: JobKind,
    /// Stem of every output file.
    #[serde(default = "default_name")]
    pub name: String,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
}

fn default_name() -> String {
    "job".into()
}

/// Partial parameter set used by `[post]` and `[[points]]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl ParamOverride {
    pub fn apply(&self, base: &ModelParams) -> ModelParams {
        ModelParams {
            gamma: self.gamma.unwrap_or(base.gamma),
            d: self.d.unwrap_or(base.d),
            h: self.h.unwrap_or(base.h),
            alpha: self.alpha.unwrap_or(base.alpha),
            n: self.n.unwrap_or(base.n),
            kac_normalize: base.kac_normalize,
        }
    }
}

/// One grid axis: `steps` evenly spaced values from `min` to `max`, or an
/// explicit `values` list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    #[serde(default)]
    pub min: f64,
    #[serde(default)]
    pub max: f64,
    #[serde(default)]
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    /// Sweep the post-quench Hamiltonian instead of the initial one.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub post: bool,
}

impl SweepAxis {
    /// Name of the CSV column holding this coordinate.
    pub fn column(&self) -> String {
        let col = if self.param == "d" { "D" } else { self.param.as_str() };
        if self.post {
            format!("post_{col}")
        } else {
            col.to_string()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if !self.values.is_empty() {
            return self.values.clone();
        }
        if self.steps == 1 {
            return vec![self.min];
        }
        (0..self.steps)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Explicit point in parameter space, as an alternative to a grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub pre: ParamOverride,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post: Option<ParamOverride>,
}

/// Fit windows; unset bounds fall back to `R ∈ [4, N/8]`, `l ∈ [8, N/4]`,
/// `t ∈ [10, 1000]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_min: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

impl FitSection {
    pub fn r_range(&self, n: usize) -> (usize, usize) {
        (self.r_min.unwrap_or(4), self.r_max.unwrap_or(n / 8).min(n / 2))
    }

    pub fn l_range(&self, n: usize) -> (usize, usize) {
        (self.l_min.unwrap_or(8), self.l_max.unwrap_or(n / 4).min(n / 2))
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t_min.unwrap_or(10.0), self.t_max.unwrap_or(1000.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuenchObservable {
    /// `δC_mn(t)` and the relaxation exponent.
    Relaxation,
    /// Steady-state `I_R(∞)` and `C^xx_R(∞)`.
    Steady,
    /// Block entropy growth `S_t`.
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeGrid {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchSection {
    pub observable: QuenchObservable,
    #[serde(default = "default_t_start")]
    pub t_start: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_t_steps")]
    pub t_steps: usize,
    #[serde(default = "default_grid")]
    pub grid: TimeGrid,
    /// Sites of `δC_mn`.
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_nsite")]
    pub n_site: usize,
    /// Block size for entropy growth.
    #[serde(default = "default_block")]
    pub block: usize,
}

fn default_t_start() -> f64 {
    1.0
}
fn default_t_end() -> f64 {
    1000.0
}
fn default_t_steps() -> usize {
    400
}
fn default_grid() -> TimeGrid {
    TimeGrid::Log
}
fn default_m() -> usize {
    1
}
fn default_nsite() -> usize {
    2
}
fn default_block() -> usize {
    80
}

/// Extra settings of `correlations`, `entropy` and `scaling` jobs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Largest distance `R` tabulated by `correlations` (default `N/2`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<usize>,
    /// Thermodynamic-limit critical field for `scaling`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_inf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub plot: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_dir(),
            plot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub job: JobSection,
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post: Option<ParamOverride>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Point>,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quench: Option<QuenchSection>,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Resolved sweep point: parameter pair plus its sweep coordinates, keyed
/// by CSV column.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub label: Option<String>,
    pub coords: BTreeMap<String, f64>,
    pub pre: ModelParams,
    pub post: Option<ModelParams>,
}

fn set_param(p: &mut ModelParams, name: &str, v: f64) -> Result<()> {
    match name {
        "gamma" => p.gamma = v,
        "d" => p.d = v,
        "h" => p.h = v,
        "alpha" => p.alpha = v,
        "n" => {
            if v.fract() != 0.0 || v < 0.0 {
                return Err(Error::Config(format!("sweep value {v} for `n` is not a count")));
            }
            p.n = v as usize;
        }
        other => return Err(Error::Config(format!("unknown sweep parameter `{other}`"))),
    }
    Ok(())
}

impl JobConfig {
    /// Checks cross-field constraints after deserialization.
    pub fn validate(&self) -> Result<()> {
        self.model
            .validate()
            .map_err(|e| Error::Config(format!("[model]: {e}")))?;
        for axis in &self.sweep {
            if !PARAM_NAMES.contains(&axis.param.as_str()) {
                return Err(Error::Config(format!(
                    "sweep parameter `{}` is not one of {PARAM_NAMES:?}",
                    axis.param
                )));
            }
            if axis.values.is_empty() && axis.steps < 1 {
                return Err(Error::Config(format!(
                    "sweep over `{}` needs steps >= 1 or a values list",
                    axis.param
                )));
            }
            if !axis.values.is_empty() && axis.steps != 0 {
                return Err(Error::Config(format!(
                    "sweep over `{}` gives both steps and values",
                    axis.param
                )));
            }
            if axis.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!(
                    "sweep over `{}` has non-finite values",
                    axis.param
                )));
            }
            if axis.post && self.job.kind != JobKind::Quench {
                return Err(Error::Config("post-quench sweeps need a quench job".into()));
            }
        }
        if !self.sweep.is_empty() && !self.points.is_empty() {
            return Err(Error::Config("use either [[sweep]] or [[points]], not both".into()));
        }
        match self.job.kind {
            JobKind::Quench => {
                if self.quench.is_none() {
                    return Err(Error::Config("quench jobs need a [quench] section".into()));
                }
            }
            _ => {
                if self.quench.is_some() || self.post.is_some() {
                    return Err(Error::Config(
                        "[quench] and [post] only apply to quench jobs".into(),
                    ));
                }
            }
        }
        for p in self.grid()? {
            p.pre
                .validate()
                .map_err(|e| Error::Config(format!("point {:?}: {e}", p.coords)))?;
            if let Some(post) = p.post {
                post.validate()
                    .map_err(|e| Error::Config(format!("post point {:?}: {e}", p.coords)))?;
            }
        }
        Ok(())
    }

    /// Every point of the job in row-major grid order (first axis slowest).
    pub fn grid(&self) -> Result<Vec<GridPoint>> {
        let base_post = self.post.as_ref().map(|o| o.apply(&self.model));
        let quench = self.job.kind == JobKind::Quench;
        let finish = |post: Option<ModelParams>| {
            if quench {
                post.or(Some(self.model))
            } else {
                None
            }
        };
        if !self.points.is_empty() {
            return Ok(self
                .points
                .iter()
                .map(|pt| {
                    let pre = pt.pre.apply(&self.model);
                    let post = match (&pt.post, base_post) {
                        (Some(o), Some(b)) => Some(o.apply(&b)),
                        (Some(o), None) => Some(o.apply(&pre)),
                        (None, Some(b)) => Some(ParamOverride { n: Some(pre.n), ..Default::default() }.apply(&b)),
                        (None, None) => None,
                    };
                    GridPoint {
                        label: pt.label.clone(),
                        coords: BTreeMap::new(),
                        pre,
                        post: finish(post),
                    }
                })
                .collect());
        }
        let mut out = vec![GridPoint {
            label: None,
            coords: BTreeMap::new(),
            pre: self.model,
            post: finish(base_post),
        }];
        for axis in &self.sweep {
            let mut next = Vec::with_capacity(out.len() * axis.steps);
            for p in &out {
                for v in axis.values() {
                    let mut q = p.clone();
                    q.coords.insert(axis.column(), v);
                    if axis.post {
                        let mut post = q.post.unwrap_or(q.pre);
                        set_param(&mut post, &axis.param, v)?;
                        q.post = Some(post);
                    } else {
                        set_param(&mut q.pre, &axis.param, v)?;
                        // an unswept post Hamiltonian follows the initial size
                        if axis.param == "n" {
                            if let Some(post) = q.post.as_mut() {
                                post.n = q.pre.n;
                            }
                        }
                    }
                    next.push(q);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// CSV column of each sweep axis, in sweep order.
    pub fn axis_columns(&self) -> Vec<String> {
        self.sweep.iter().map(SweepAxis::column).collect()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Applies `key=value` overrides (dotted keys, TOML literals; bare words
/// are taken as strings) to a parsed document.
pub fn apply_overrides(doc: &mut toml::Table, overrides: &[String]) -> Result<()> {
    for ov in overrides {
        let (key, raw) = ov
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{ov}` is not key=value")))?;
        let value: toml::Value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        let parts: Vec<&str> = key.trim().split('.').collect();
        let (last, path) = parts
            .split_last()
            .ok_or_else(|| Error::Config(format!("empty key in `{ov}`")))?;
        let mut table = &mut *doc;
        for part in path {
            let entry = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            table = entry
                .as_table_mut()
                .ok_or_else(|| Error::Config(format!("`{part}` in `{key}` is not a table")))?;
        }
        table.insert(last.to_string(), value);
    }
    Ok(())
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<JobConfig> {
    parse_config_with(text, &[])
}

/// Like [`parse_config`] with `key=value` overrides applied first. Without
/// overrides the document is decoded directly so errors carry line numbers.
pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<JobConfig> {
    let schema = |e: toml::de::Error| Error::Config(e.to_string().trim_end().to_string());
    let cfg: JobConfig = if overrides.is_empty() {
        toml::from_str(text).map_err(schema)?
    } else {
        let mut doc: toml::Table = text.parse().map_err(schema)?;
        apply_overrides(&mut doc, overrides)?;
        toml::Value::Table(doc).try_into().map_err(schema)?
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config("[job]\nkind = \"phase-diagram\"\n").unwrap();
        assert_eq!(cfg.model.n, 512);
        assert!(cfg.model.kac_normalize);
        assert_eq!(cfg.output.dir, PathBuf::from("out"));
        assert_eq!(cfg.grid().unwrap().len(), 1);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config("[job]\nkind = \"entropy\"\n[model]\ngama = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("gama"), "{err}");
    }

    #[test]
    fn grid_is_row_major() {
        let text = r#"
[job]
kind = "phase-diagram"
[[sweep]]
param = "alpha"
min = 1.0
max = 2.0
steps = 2
[[sweep]]
param = "d"
min = 0.0
max = 1.0
steps = 3
"#;
        let g = parse_config(text).unwrap().grid().unwrap();
        let coords: Vec<(f64, f64)> = g.iter().map(|p| (p.pre.alpha, p.pre.d)).collect();
        assert_eq!(
            coords,
            vec![(1.0, 0.0), (1.0, 0.5), (1.0, 1.0), (2.0, 0.0), (2.0, 0.5), (2.0, 1.0)]
        );
    }

    #[test]
    fn overrides_apply() {
        let text = "[job]\nkind = \"entropy\"\n[model]\nh = 0.3\n";
        let cfg = parse_config_with(
            text,
            &["model.h=0.7".into(), "job.name=abc".into(), "fit.l_max=40".into()],
        )
        .unwrap();
        assert_eq!(cfg.model.h, 0.7);
        assert_eq!(cfg.job.name, "abc");
        assert_eq!(cfg.fit.l_max, Some(40));
        assert!(parse_config_with(text, &["model".into()]).is_err());
    }

    #[test]
    fn quench_requirements() {
        assert!(parse_config("[job]\nkind = \"quench\"\n").is_err());
        let ok = "[job]\nkind = \"quench\"\n[post]\nalpha = 2.0\n[quench]\nobservable = \"steady\"\n";
        let cfg = parse_config(ok).unwrap();
        let g = cfg.grid().unwrap();
        assert_eq!(g[0].post.unwrap().alpha, 2.0);
        assert!(parse_config("[job]\nkind = \"entropy\"\n[post]\nalpha = 2.0\n").is_err());
    }

    #[test]
    fn bad_sweeps_rejected() {
        let bad = "[job]\nkind = \"entropy\"\n[[sweep]]\nparam = \"beta\"\nmin = 0\nmax = 1\nsteps = 2\n";
        assert!(parse_config(bad).is_err());
        let zero = "[job]\nkind = \"entropy\"\n[[sweep]]\nparam = \"h\"\nmin = 0\nmax = 1\nsteps = 0\n";
        assert!(parse_config(zero).is_err());
    }
}
