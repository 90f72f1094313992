//! Configuration schema: growth parameters, epidemic parameters, the
//! vaccination plan template, and the experiment scenario wrapper.
//!
//! All documents are JSON. Unknown keys are rejected so that typos fail
//! loudly instead of silently running defaults. Every field except the
//! initial prevalences has a default matching the reference calibration;
//! the initial prevalences must be stated explicitly because no published
//! value exists for them.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The nine five-year age buckets persons are drawn from.
pub const AGE_BUCKETS: [(u8, u8); 9] = [
    (15, 19),
    (20, 24),
    (25, 29),
    (30, 34),
    (35, 39),
    (40, 44),
    (45, 49),
    (50, 54),
    (55, 59),
];

/// Reference age-bucket weights (15-19 through 55-59).
pub fn default_age_distribution() -> [f64; 9] {
    [0.221, 0.555, 0.141, 0.044, 0.018, 0.018, 0.001, 0.001, 0.001]
}

fn default_population_size() -> u32 {
    3000
}
fn default_initial_links() -> u32 {
    10
}
fn default_joins_per_step() -> u32 {
    100
}
fn default_links_per_join() -> u32 {
    2
}
fn default_fitness_floor() -> f64 {
    0.5
}
fn default_mean_age_gap() -> f64 {
    3.5
}
fn default_horizon() -> u32 {
    1000
}
fn default_female_fraction() -> f64 {
    0.59
}
fn default_gamma_shape() -> f64 {
    2.0
}
fn default_duration_mean() -> f64 {
    100.0
}

/// Parameters of the contact-network growth model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    /// Total number of persons N.
    #[serde(default = "default_population_size")]
    pub population_size: u32,
    /// Number of seeded couples m0 at day 0.
    #[serde(default = "default_initial_links")]
    pub initial_links: u32,
    /// Persons introduced per day n during Phase 1.
    #[serde(default = "default_joins_per_step")]
    pub joins_per_step: u32,
    /// Links each newly introduced person attempts, m.
    #[serde(default = "default_links_per_join")]
    pub links_per_join: u32,
    /// Additive degree offset ε in the attachment weight (k + ε)·φ.
    #[serde(default = "default_fitness_floor")]
    pub fitness_floor: f64,
    /// Population mean age gap ⟨η⟩ flooring the age-gap penalty.
    #[serde(default = "default_mean_age_gap")]
    pub mean_age_gap: f64,
    /// Number of simulated days T.
    #[serde(default = "default_horizon")]
    pub horizon: u32,
    /// Weights of the nine five-year age buckets (15-19 ... 55-59).
    #[serde(default = "default_age_distribution")]
    pub age_distribution: [f64; 9],
    /// Probability a person is female.
    #[serde(default = "default_female_fraction")]
    pub female_fraction: f64,
    /// Shape of the Gamma distribution for per-person mean relationship
    /// duration δ.
    #[serde(default = "default_gamma_shape")]
    pub gamma_shape: f64,
    /// Mean of the Gamma distribution for δ, in days.
    #[serde(default = "default_duration_mean")]
    pub duration_mean: f64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            population_size: default_population_size(),
            initial_links: default_initial_links(),
            joins_per_step: default_joins_per_step(),
            links_per_join: default_links_per_join(),
            fitness_floor: default_fitness_floor(),
            mean_age_gap: default_mean_age_gap(),
            horizon: default_horizon(),
            age_distribution: default_age_distribution(),
            female_fraction: default_female_fraction(),
            gamma_shape: default_gamma_shape(),
            duration_mean: default_duration_mean(),
        }
    }
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(Error::Config("population_size must be > 0".into()));
        }
        if self.initial_links < 1 {
            return Err(Error::Config("initial_links must be >= 1".into()));
        }
        if 2 * self.initial_links > self.population_size {
            return Err(Error::Config(format!(
                "initial_links = {} needs {} distinct persons but population_size = {}",
                self.initial_links,
                2 * self.initial_links,
                self.population_size
            )));
        }
        if self.links_per_join < 1 {
            return Err(Error::Config("links_per_join must be >= 1".into()));
        }
        if !(self.fitness_floor > 0.0) {
            return Err(Error::Config("fitness_floor must be > 0".into()));
        }
        if !(self.mean_age_gap > 0.0) {
            return Err(Error::Config("mean_age_gap must be > 0".into()));
        }
        if self.horizon < 1 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if self.age_distribution.iter().any(|w| *w < 0.0) {
            return Err(Error::Config("age_distribution weights must be >= 0".into()));
        }
        let total: f64 = self.age_distribution.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "age_distribution weights must sum to 1 (got {total})"
            )));
        }
        if !(0.0..=1.0).contains(&self.female_fraction) {
            return Err(Error::Config("female_fraction must lie in [0, 1]".into()));
        }
        if !(self.gamma_shape > 0.0) {
            return Err(Error::Config("gamma_shape must be > 0".into()));
        }
        if !(self.duration_mean > 0.0) {
            return Err(Error::Config("duration_mean must be > 0".into()));
        }
        Ok(())
    }
}

fn default_beta() -> f64 {
    0.13
}
fn default_clearance_mean() -> f64 {
    330.0
}
fn default_rho_female() -> f64 {
    0.427
}
fn default_rho_male() -> f64 {
    0.188
}
fn default_f_early() -> f64 {
    0.5
}
fn default_f_late() -> f64 {
    1.0 / 7.0
}
fn default_early_window() -> u32 {
    14
}

/// Parameters of the SIRS transmission process.
///
/// `init_prevalence_female` / `init_prevalence_male` have no defaults:
/// the transmission calibration does not publish them, so scenarios must
/// choose them explicitly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicConfig {
    /// Per-coital-act transmission probability β.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Mean of the exponential infectious-duration distribution, days.
    #[serde(default = "default_clearance_mean")]
    pub clearance_mean: f64,
    /// Probability a clearing female acquires lasting immunity.
    #[serde(default = "default_rho_female")]
    pub rho_female: f64,
    /// Probability a clearing male acquires lasting immunity.
    #[serde(default = "default_rho_male")]
    pub rho_male: f64,
    /// Fraction of females infected at day 0.
    pub init_prevalence_female: f64,
    /// Fraction of males infected at day 0.
    pub init_prevalence_male: f64,
    /// Daily coital-act probability while a link is younger than
    /// `early_window` days.
    #[serde(default = "default_f_early")]
    pub f_early: f64,
    /// Daily coital-act probability once a link is `early_window` days
    /// old or older.
    #[serde(default = "default_f_late")]
    pub f_late: f64,
    /// Age (in days) at which a link switches from f_early to f_late.
    #[serde(default = "default_early_window")]
    pub early_window: u32,
}

impl EpidemicConfig {
    /// A reference configuration for tests and the demo; prevalences are
    /// illustrative, not published values.
    pub fn with_prevalence(female: f64, male: f64) -> Self {
        EpidemicConfig {
            beta: default_beta(),
            clearance_mean: default_clearance_mean(),
            rho_female: default_rho_female(),
            rho_male: default_rho_male(),
            init_prevalence_female: female,
            init_prevalence_male: male,
            f_early: default_f_early(),
            f_late: default_f_late(),
            early_window: default_early_window(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("beta", self.beta),
            ("rho_female", self.rho_female),
            ("rho_male", self.rho_male),
            ("init_prevalence_female", self.init_prevalence_female),
            ("init_prevalence_male", self.init_prevalence_male),
            ("f_early", self.f_early),
            ("f_late", self.f_late),
        ];
        for (name, value) in probs {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Config(format!("{name} must lie in [0, 1] (got {value})")));
            }
        }
        if !(self.clearance_mean > 0.0) {
            return Err(Error::Config("clearance_mean must be > 0".into()));
        }
        Ok(())
    }
}

/// Vaccination strategies, in the canonical reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Null model: sessions run but nobody is vaccinated.
    None,
    /// Uniform random vaccination of eligible persons under 26.
    Age,
    /// Susceptible neighbors of infected nodes, hubs first.
    Ring,
    /// Highest degree centrality first.
    Degree,
    /// Highest betweenness centrality first.
    Betweenness,
    /// Highest closeness centrality first.
    Closeness,
    /// Highest percolation centrality first.
    Percolation,
    /// Highest eigenvector centrality first.
    Eigenvector,
}

impl Strategy {
    pub const ALL: [Strategy; 8] = [
        Strategy::None,
        Strategy::Age,
        Strategy::Ring,
        Strategy::Degree,
        Strategy::Betweenness,
        Strategy::Closeness,
        Strategy::Percolation,
        Strategy::Eigenvector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::None => "none",
            Strategy::Age => "age",
            Strategy::Ring => "ring",
            Strategy::Degree => "degree",
            Strategy::Betweenness => "betweenness",
            Strategy::Closeness => "closeness",
            Strategy::Percolation => "percolation",
            Strategy::Eigenvector => "eigenvector",
        }
    }

    fn valid_names() -> String {
        Strategy::ALL
            .iter()
            .map(|s| s.name())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown strategy '{s}'; valid strategies: {}",
                    Strategy::valid_names()
                ))
            })
    }
}

fn default_session_days() -> Vec<u32> {
    vec![6, 13, 20, 27]
}

fn default_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}

/// Scenario-level vaccination settings; the per-run dose arithmetic is
/// derived from these plus the sampled population.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanTemplate {
    /// Days on which vaccination sessions run (strictly increasing).
    #[serde(default = "default_session_days")]
    pub session_days: Vec<u32>,
    /// When true, non-age strategies also restrict candidates to under-26s.
    #[serde(default)]
    pub restrict_under_26: bool,
    /// Strategies evaluated by `sweep`.
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
}

impl Default for PlanTemplate {
    fn default() -> Self {
        PlanTemplate {
            session_days: default_session_days(),
            restrict_under_26: false,
            strategies: default_strategies(),
        }
    }
}

impl PlanTemplate {
    pub fn validate(&self) -> Result<()> {
        if !self.session_days.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("session_days must be strictly increasing".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("strategies must not be empty".into()));
        }
        let mut seen = self.strategies.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.strategies.len() {
            return Err(Error::Config("strategies must not repeat".into()));
        }
        Ok(())
    }
}

/// One sweep point: a named bundle of growth-parameter overrides.
/// Absent fields inherit the scenario's base growth config.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    /// Identifier reported in the summary CSV.
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub links_per_join: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitness_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_shape: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_mean: Option<f64>,
}

impl SweepPoint {
    /// The growth config this point runs with.
    pub fn apply(&self, base: &GrowthConfig) -> GrowthConfig {
        let mut cfg = base.clone();
        if let Some(m) = self.links_per_join {
            cfg.links_per_join = m;
        }
        if let Some(eps) = self.fitness_floor {
            cfg.fitness_floor = eps;
        }
        if let Some(shape) = self.gamma_shape {
            cfg.gamma_shape = shape;
        }
        if let Some(mean) = self.duration_mean {
            cfg.duration_mean = mean;
        }
        cfg
    }
}

fn default_seed() -> u64 {
    1
}
fn default_replicates() -> u32 {
    30
}

fn default_sweep() -> Vec<SweepPoint> {
    vec![SweepPoint {
        id: "base".into(),
        links_per_join: None,
        fitness_floor: None,
        gamma_shape: None,
        duration_mean: None,
    }]
}

/// Complete experiment description: one JSON document drives `generate`,
/// `simulate`, and `sweep`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub growth: GrowthConfig,
    pub epidemic: EpidemicConfig,
    #[serde(default)]
    pub plan: PlanTemplate,
    /// Base seed all run seeds are derived from.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Replicates per (sweep point, strategy).
    #[serde(default = "default_replicates")]
    pub replicates: u32,
    /// Sweep points; defaults to a single point named "base" with no
    /// overrides.
    #[serde(default = "default_sweep")]
    pub sweep: Vec<SweepPoint>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.growth.validate()?;
        self.epidemic.validate()?;
        self.plan.validate()?;
        if self.replicates < 1 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        if self.sweep.is_empty() {
            return Err(Error::Config("sweep must contain at least one point".into()));
        }
        let mut ids: Vec<&str> = self.sweep.iter().map(|p| p.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.sweep.len() {
            return Err(Error::Config("sweep point ids must be unique".into()));
        }
        for point in &self.sweep {
            point.apply(&self.growth).validate()?;
        }
        Ok(())
    }

    /// Loads and validates a scenario from a JSON file.
    pub fn load(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: ScenarioConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}
