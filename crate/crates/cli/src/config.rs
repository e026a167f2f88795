//! Run configuration. See `docs/config.md` for the schema.

use std::f64::consts::PI;
use std::path::Path;

use alphamod::families::SymbolFamily;
use alphamod::grid::Grid1D;
use serde::{Deserialize, Serialize};

pub const CORPUS: [&str; 3] = ["cos", "abs-sin", "windowed-x"];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub grid: GridConfig,
    #[serde(default)]
    pub covering: CoveringConfig,
    #[serde(default)]
    pub certificates: Vec<CertSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// `L` directly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// `L / π`; exactly one of the two is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width_pi: Option<f64>,
    pub len: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid1D<f64>, String> {
        let l = match (self.half_width, self.half_width_pi) {
            (Some(l), None) => l,
            (None, Some(k)) => k * PI,
            _ => return Err("grid: give exactly one of half_width and half_width_pi".into()),
        };
        Grid1D::new(l, self.len).map_err(|e| format!("grid: {e}"))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringConfig {
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
}

impl Default for CoveringConfig {
    fn default() -> Self {
        Self { omega: default_omega(), delta: 1.0, c: 1.0, rho: default_rho() }
    }
}

fn default_omega() -> f64 {
    5.0
}

fn one() -> f64 {
    1.0
}

fn default_rho() -> f64 {
    0.25
}

fn full_corpus() -> Vec<String> {
    CORPUS.iter().map(|s| s.to_string()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertSpec {
    /// Trace norm against the product norm with weights `(α/2, α/2)`.
    Thm1 {
        alphas: Vec<f64>,
        family: SymbolFamily,
        /// Also synthesize every piece and record the chain.
        #[serde(default)]
        chain: bool,
        #[serde(default)]
        cap: Option<f64>,
    },
    /// Commutator trace norm against `‖∇a‖_∞` times the `(α/2, α+1)` norm.
    Thm2 {
        alphas: Vec<f64>,
        symbol: SymbolFamily,
        #[serde(default = "full_corpus")]
        corpus: Vec<String>,
        #[serde(default)]
        cap: Option<f64>,
    },
    /// `I_p` norm for `p ∈ [1, 2]`.
    SchattenP {
        p: f64,
        alphas: Vec<f64>,
        family: SymbolFamily,
        #[serde(default)]
        cap: Option<f64>,
    },
    /// Frobenius norm against `N^{-1/2} ‖σ‖_{ℓ²}`.
    HsIdentity { family: SymbolFamily },
}

impl CertSpec {
    pub fn alphas(&self) -> &[f64] {
        match self {
            CertSpec::Thm1 { alphas, .. } | CertSpec::Thm2 { alphas, .. } | CertSpec::SchattenP { alphas, .. } => alphas,
            CertSpec::HsIdentity { .. } => &[],
        }
    }

    fn validate(&self, k: usize) -> Result<(), String> {
        let at = |msg: String| Err(format!("certificates[{k}]: {msg}"));
        let family = match self {
            CertSpec::Thm1 { family, .. } | CertSpec::SchattenP { family, .. } | CertSpec::HsIdentity { family } => family,
            CertSpec::Thm2 { symbol, .. } => symbol,
        };
        if let Err(e) = family.validate() {
            return at(e.to_string());
        }
        if !matches!(self, CertSpec::HsIdentity { .. }) && self.alphas().is_empty() {
            return at("alphas is empty".into());
        }
        if let Some(a) = self.alphas().iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return at(format!("alpha = {a} outside [0, 1]"));
        }
        match self {
            CertSpec::Thm1 { cap, .. } | CertSpec::Thm2 { cap, .. } | CertSpec::SchattenP { cap, .. }
                if cap.is_some_and(|c| !(c > 0.0)) =>
            {
                at("cap must be positive".into())
            }
            CertSpec::SchattenP { p, .. } if !(1.0..=2.0).contains(p) => at(format!("p = {p} outside [1, 2]")),
            CertSpec::Thm2 { corpus, .. } => match corpus.iter().find(|c| !CORPUS.contains(&c.as_str())) {
                Some(bad) => at(format!("unknown corpus member '{bad}', expected one of {CORPUS:?}")),
                None if corpus.is_empty() => at("corpus is empty".into()),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let cfg: Config = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.grid.build()?;
        let c = &self.covering;
        if !(c.rho > 0.0 && c.rho < 0.5) {
            return Err(format!("covering: rho = {} outside (0, 1/2)", c.rho));
        }
        for (k, spec) in self.certificates.iter().enumerate() {
            spec.validate(k)?;
        }
        Ok(())
    }
}
