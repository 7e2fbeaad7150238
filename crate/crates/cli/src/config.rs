use std::path::{Path, PathBuf};

use concentra::bounds::Regime;
use concentra::funcs::FunctionSpec;
use concentra::lsi::Operator;
use concentra::models::{build_coloring, build_ergm, build_ising, subgraph_count, ErgmSpec, Graph, IsingSpec, Motif};
use concentra::space::{Measure, ProductSpace, DEFAULT_CAP};
use serde::{Deserialize, Serialize};

use crate::SchemaError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Option<ModelConfig>,
    pub function: Option<FunctionConfig>,
    pub bound: Option<BoundConfig>,
    /// Regime of the moment chain for `verify-moments`.
    pub regime: Option<Regime<f64>>,
    pub mode: Option<Mode>,
    pub samples: Option<usize>,
    pub t_grid: Option<Grid>,
    pub p_grid: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub outputs: Option<Outputs>,
    pub lsi: Option<LsiConfig>,
    pub sample: Option<SampleConfig>,
    pub suite: Option<SuiteConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub dir: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Rademacher { n: usize },
    Product { alphabets: Vec<Vec<f64>>, marginals: Vec<Vec<f64>> },
    Ising { coupling: Vec<Vec<f64>>, field: Vec<f64> },
    CurieWeiss { n: usize, beta: f64 },
    Coloring { n: usize, edges: Vec<(usize, usize)>, colors: usize },
    Ergm { n: usize, motifs: Vec<Motif>, betas: Vec<f64> },
}

impl ModelConfig {
    pub fn build(&self) -> anyhow::Result<Measure<f64>> {
        let m = match self {
            ModelConfig::Rademacher { n } => Measure::rademacher(*n),
            ModelConfig::Product { alphabets, marginals } => Measure::product(ProductSpace::new(alphabets.clone())?, marginals.clone())?,
            ModelConfig::Ising { coupling, field } => build_ising(&IsingSpec::new(coupling.clone(), field.clone())?)?.0,
            ModelConfig::CurieWeiss { n, beta } => build_ising(&IsingSpec::curie_weiss(*n, *beta))?.0,
            ModelConfig::Coloring { n, edges, colors } => build_coloring(&Graph::new(*n, edges.clone())?, *colors)?.0,
            ModelConfig::Ergm { n, motifs, betas } => {
                build_ergm(&ErgmSpec { n: *n, motifs: motifs.clone(), betas: betas.clone() })?.0
            }
        };
        Ok(m)
    }

    fn vertices(&self) -> Option<usize> {
        match self {
            ModelConfig::Ergm { n, .. } => Some(*n),
            _ => None,
        }
    }
}

/// Named functions, or any serialized function spec.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FunctionConfig {
    Builtin(Builtin),
    Spec(FunctionSpec<f64>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case", deny_unknown_fields)]
pub enum Builtin {
    Sum,
    /// Sign of the sum, 0 on ties.
    Majority,
    Product { coords: Vec<usize> },
    /// `Σ_{i<j} x_i x_j`.
    PairSum,
    /// Number of coordinates equal to `value`.
    Count { value: f64 },
    /// Triangles of an ERGM edge configuration.
    Triangles,
}

impl FunctionConfig {
    pub fn build(&self, model: &ModelConfig, measure: &Measure<f64>) -> anyhow::Result<FunctionSpec<f64>> {
        let space = measure.space();
        let spec = match self {
            FunctionConfig::Spec(s) => s.clone(),
            FunctionConfig::Builtin(b) => {
                let n = space.n();
                let f: Box<dyn Fn(&[f64]) -> f64> = match b {
                    Builtin::Sum => Box::new(|x| x.iter().sum()),
                    Builtin::Majority => Box::new(|x| x.iter().sum::<f64>().signum()),
                    Builtin::Product { coords } => {
                        if let Some(&c) = coords.iter().find(|&&c| c >= n) {
                            return Err(SchemaError(format!("product coordinate {c} out of range for n = {n}")).into());
                        }
                        let coords = coords.clone();
                        Box::new(move |x| coords.iter().map(|&i| x[i]).product())
                    }
                    Builtin::PairSum => Box::new(|x| {
                        let s: f64 = x.iter().sum();
                        let q: f64 = x.iter().map(|v| v * v).sum();
                        (s * s - q) / 2.0
                    }),
                    Builtin::Count { value } => {
                        let value = *value;
                        Box::new(move |x| x.iter().filter(|&&v| v == value).count() as f64)
                    }
                    Builtin::Triangles => {
                        let v = model
                            .vertices()
                            .ok_or_else(|| SchemaError("triangle counts need an ERGM model".into()))?;
                        Box::new(move |x| subgraph_count(&Motif::triangle(), v, x))
                    }
                };
                FunctionSpec::from_fn(space, DEFAULT_CAP, f)?
            }
        };
        spec.validate(space)?;
        Ok(spec)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundConfig {
    /// Difference-operator profile of the configured function.
    General { regime: Regime<f64> },
    /// Explicit profile `γ_1..γ_d`.
    Profile { gamma: Vec<f64>, regime: Regime<f64> },
    /// Fourier weights of the configured function on the hypercube.
    Boolean,
    /// The configured U-statistic.
    Ustat { regime: Regime<f64>, #[serde(default)] normalized: bool },
    /// The configured quadratic form with `|X_i| <= m`.
    HansonWright { m: f64, regime: Regime<f64> },
    /// Partition norms of the configured polynomial.
    Polynomial { sigma2: f64, c_user: Option<f64> },
    MomentToTail { coefficients: Vec<f64>, shift: f64 },
    ErgmTriangles { n: usize, c_s2: f64, c_e: f64, c_beta: f64 },
    SupremaOfSums { sigma2: f64, n: usize, c_sup: f64 },
}

/// Explicit values or `points + 1` equally spaced values.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> anyhow::Result<Vec<f64>> {
        let v = match self {
            Grid::Values(v) => v.clone(),
            Grid::Range { start, stop, points } => {
                if *points == 0 || !(stop >= start) {
                    return Err(SchemaError("range grid needs points > 0 and stop >= start".into()).into());
                }
                (0..=*points).map(|j| start + (stop - start) * j as f64 / *points as f64).collect()
            }
        };
        if v.is_empty() || v.iter().any(|t| !t.is_finite()) || v.windows(2).any(|w| w[1] < w[0]) {
            return Err(SchemaError("t-grid must be nonempty, finite and nondecreasing".into()).into());
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LsiConfig {
    pub operator: Operator,
    pub starts: Option<usize>,
    pub max_passes: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFormat {
    #[default]
    Csv,
    Binary,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub burn_in: Option<usize>,
    pub thinning: Option<usize>,
    #[serde(default)]
    pub format: SampleFormat,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub scale: Option<f64>,
}

pub fn load(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| SchemaError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| SchemaError(format!("{}: {e}", path.display())).into())
}

impl ExperimentConfig {
    pub fn model(&self) -> anyhow::Result<&ModelConfig> {
        self.model.as_ref().ok_or_else(|| SchemaError("config has no model".into()).into())
    }

    /// The measure and the configured function on it.
    pub fn model_and_function(&self) -> anyhow::Result<(Measure<f64>, FunctionSpec<f64>)> {
        let model = self.model()?;
        let measure = model.build().map_err(|e| SchemaError(format!("model: {e}")))?;
        let f = self
            .function
            .as_ref()
            .ok_or_else(|| SchemaError("config has no function".into()))?
            .build(model, &measure)
            .map_err(|e| SchemaError(format!("function: {e}")))?;
        Ok((measure, f))
    }
}
