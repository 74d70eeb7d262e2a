//! Experiment configuration: presets, TOML files and overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::schemes::{BoundaryPolicy, HeatLaplacian, Model, SchemeKind, SchemeOptions};
use crate::solutions::{node_count, BurgersExact, Exact, HeatExact};

/// Parameters of one experiment. All runs of a comparison share everything
/// except `scheme`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: Model,
    pub scheme: SchemeKind,
    pub x_min: f64,
    pub x_max: f64,
    pub h: f64,
    pub t0: f64,
    pub t_final: f64,
    pub k: f64,
    /// Heat solution parameter.
    pub c: f64,
    /// Burgers solution parameters.
    pub c1: f64,
    pub c2: f64,
    /// Replaces the closed-form solution by a constant field.
    pub constant: Option<f64>,
    pub heat_laplacian: HeatLaplacian,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Reference parameters for each model.
    pub fn preset(model: Model) -> Self {
        let base = Self {
            model,
            scheme: SchemeKind::FullyInvariant,
            x_min: 0.0,
            x_max: 0.0,
            h: 0.0,
            t0: 0.0,
            t_final: 0.0,
            k: 0.001,
            c: 0.0,
            c1: 0.0,
            c2: 1.0,
            constant: None,
            heat_laplacian: HeatLaplacian::Centered,
            out_dir: PathBuf::from("out"),
            seed: 1,
        };
        match model {
            Model::HeatLog => Self { x_min: -5.0, x_max: 5.0, h: 0.15, t0: 0.0, t_final: 1.0, ..base },
            Model::SphericalBurgers => Self { x_min: 0.0, x_max: 10.0, h: 0.5, t0: 1.0, t_final: 1.5, ..base },
        }
    }

    pub fn with_scheme(&self, scheme: SchemeKind) -> Self {
        Self { scheme, ..self.clone() }
    }

    /// Reads a TOML file of flat `key = value` pairs on top of the preset of
    /// the model named in the file (or `model` when given).
    pub fn from_file(path: &Path, model: Option<Model>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text, model)
    }

    pub fn from_toml_str(text: &str, model: Option<Model>) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid configuration: {}", e.message())))?;
        let file_model = file.model.as_deref().map(str::parse).transpose()?;
        let model = match (model, file_model) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("model '{a}' conflicts with '{b}' in configuration file")))
            }
            (Some(m), _) | (None, Some(m)) => m,
            (None, None) => return Err(Error::Config("no model given".into())),
        };
        let mut cfg = Self::preset(model);
        file.apply(&mut cfg)?;
        Ok(cfg)
    }

    pub fn options(&self) -> SchemeOptions {
        SchemeOptions { heat_laplacian: self.heat_laplacian }
    }

    pub fn exact(&self) -> Exact<f64> {
        match (self.constant, self.model) {
            (Some(v), _) => Exact::Constant(v),
            (None, Model::HeatLog) => Exact::Heat(HeatExact { c: self.c }),
            (None, Model::SphericalBurgers) => Exact::Burgers(BurgersExact { c1: self.c1, c2: self.c2 }),
        }
    }

    pub fn boundary(&self) -> BoundaryPolicy<f64> {
        BoundaryPolicy::ExactDirichlet(self.exact())
    }

    /// Checks the invariants every run relies on.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let finite = [self.x_min, self.x_max, self.h, self.t0, self.t_final, self.k, self.c, self.c1, self.c2];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("parameters must be finite".into());
        }
        if !(self.k > 0.0) {
            return bad(format!("k = {} must be positive", self.k));
        }
        if self.t_final < self.t0 {
            return bad(format!("t_final = {} precedes t0 = {}", self.t_final, self.t0));
        }
        crate::schemes::step_count(self.t0, self.t_final, self.k).map_err(|e| Error::Config(e.to_string()))?;
        node_count(self.x_min, self.x_max, self.h).map_err(|e| Error::Config(e.to_string()))?;
        match (self.model, self.constant) {
            (Model::HeatLog, Some(v)) if !(v > 0.0) => return bad(format!("heat constant field {v} must be positive")),
            (Model::SphericalBurgers, _) if !(self.t0 > 0.0) => return bad(format!("Burgers runs need t0 > 0, got {}", self.t0)),
            (Model::SphericalBurgers, None) if !(self.c2 + self.t0.ln() > 0.0) => {
                return bad(format!("c2 + ln t0 = {} must be positive", self.c2 + self.t0.ln()))
            }
            _ => {}
        }
        Ok(())
    }
}

/// On-disk form; every field optional so files only name what they change.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    model: Option<String>,
    scheme: Option<String>,
    x_min: Option<f64>,
    x_max: Option<f64>,
    h: Option<f64>,
    t0: Option<f64>,
    t_final: Option<f64>,
    k: Option<f64>,
    c: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
    constant: Option<f64>,
    boundary: Option<String>,
    laplacian: Option<String>,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
}

impl ConfigFile {
    fn apply(self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(s) = self.scheme {
            cfg.scheme = s.parse()?;
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        set!(x_min, x_max, h, t0, t_final, k, c, c1, c2, out_dir, seed);
        if self.constant.is_some() {
            cfg.constant = self.constant;
        }
        match self.boundary.as_deref() {
            None | Some("exact_dirichlet") => {}
            Some(other) => return Err(Error::Config(format!("unknown boundary policy '{other}'"))),
        }
        match self.laplacian.as_deref() {
            None => {}
            Some("centered") => cfg.heat_laplacian = HeatLaplacian::Centered,
            Some("forward") => cfg.heat_laplacian = HeatLaplacian::ForwardBiased,
            Some(other) => return Err(Error::Config(format!("unknown laplacian '{other}' (centered or forward)"))),
        }
        Ok(())
    }
}
