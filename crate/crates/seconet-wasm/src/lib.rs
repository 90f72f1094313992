//! Browser bindings for the simulator: three operations that accept a
//! JSON request string and return a JSON response string. Errors come
//! back as `{"error": "..."}` objects instead of exceptions so the page
//! logic stays a plain `JSON.parse` + field check, and so the whole
//! surface is testable on native targets.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

use seconet::epidemic::DailyCounts;
use seconet::growth::{grow_network, FEMALE};
use seconet::harness::{compute_metrics, run_simulation, Metrics};
use seconet::rng::run_streams;
use seconet::topology::{self, TopologySummary};
use seconet::{EpidemicConfig, GrowthConfig, PlanTemplate, Strategy};

/// One request shape for all three operations; fields irrelevant to an
/// operation are simply ignored by it. Everything has a demo-friendly
/// default so `{}` is a valid request.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct DemoRequest {
    population: u32,
    horizon: u32,
    seed: u64,
    joins_per_step: u32,
    links_per_join: u32,
    beta: f64,
    init_prevalence_female: f64,
    init_prevalence_male: f64,
    /// Strategy for `run_epidemic`.
    strategy: String,
    /// Strategies for `compare_strategies`; empty means all eight.
    strategies: Vec<String>,
}

impl Default for DemoRequest {
    fn default() -> Self {
        DemoRequest {
            population: 600,
            horizon: 365,
            seed: 1,
            joins_per_step: 40,
            links_per_join: 2,
            beta: 0.13,
            init_prevalence_female: 0.03,
            init_prevalence_male: 0.024,
            strategy: "degree".into(),
            strategies: Vec::new(),
        }
    }
}

/// Hard ceilings so a stray form value cannot wedge the browser tab.
const MAX_POPULATION: u32 = 3000;
const MAX_HORIZON: u32 = 1000;

impl DemoRequest {
    fn parse(request_json: &str) -> Result<DemoRequest, String> {
        let request: DemoRequest =
            serde_json::from_str(request_json).map_err(|e| format!("bad request: {e}"))?;
        if !(60..=MAX_POPULATION).contains(&request.population) {
            return Err(format!(
                "population must lie in 60..={MAX_POPULATION} (got {})",
                request.population
            ));
        }
        if !(30..=MAX_HORIZON).contains(&request.horizon) {
            return Err(format!(
                "horizon must lie in 30..={MAX_HORIZON} (got {})",
                request.horizon
            ));
        }
        Ok(request)
    }

    fn growth_config(&self) -> Result<GrowthConfig, String> {
        let config = GrowthConfig {
            population_size: self.population,
            joins_per_step: self.joins_per_step,
            links_per_join: self.links_per_join,
            horizon: self.horizon,
            ..GrowthConfig::default()
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    fn epidemic_config(&self) -> Result<EpidemicConfig, String> {
        let config = EpidemicConfig {
            beta: self.beta,
            ..EpidemicConfig::with_prevalence(
                self.init_prevalence_female,
                self.init_prevalence_male,
            )
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

fn error_json(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

fn respond<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(payload) => serde_json::to_string(&payload).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(message) => error_json(&message),
    }
}

// ---------------------------------------------------------------------
// Operation 1: grow a network and describe it
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct PreviewNode {
    id: u32,
    gender: char,
    age: u8,
    degree: u32,
}

#[derive(Serialize)]
struct PreviewResponse {
    nodes: Vec<PreviewNode>,
    /// Active links as `[female_id, male_id]` pairs.
    links: Vec<[u32; 2]>,
    topology: TopologySummary,
}

fn preview_payload(request_json: &str) -> Result<PreviewResponse, String> {
    let request = DemoRequest::parse(request_json)?;
    let growth = request.growth_config()?;
    // Same stream split as a full simulation run, so the previewed
    // network is exactly the one `run_epidemic` spreads infection on.
    let mut rng = run_streams(request.seed).growth;
    let network = grow_network(&growth, &mut rng).map_err(|e| e.to_string())?;
    let nodes = network
        .persons
        .iter()
        .map(|p| PreviewNode {
            id: p.id,
            gender: if p.gender == FEMALE { 'f' } else { 'm' },
            age: p.age,
            degree: network.degree(p.id) as u32,
        })
        .collect();
    let links = network
        .active_links()
        .map(|r| [r.female, r.male])
        .collect();
    Ok(PreviewResponse {
        nodes,
        links,
        topology: topology::summarize(&network),
    })
}

/// Grows a contact network and returns its nodes, active links, and
/// topology summary as JSON.
#[wasm_bindgen]
pub fn preview_network(request_json: &str) -> String {
    respond(preview_payload(request_json))
}

// ---------------------------------------------------------------------
// Operation 2: one epidemic run under one strategy
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct SeriesResponse {
    day: Vec<u32>,
    susceptible: Vec<u32>,
    infected: Vec<u32>,
    recovered: Vec<u32>,
    vaccinated: Vec<u32>,
    new_infections: Vec<u32>,
}

#[derive(Serialize)]
struct MetricsResponse {
    peak_incidence: u32,
    peak_day: u32,
    cumulative_incidence: u32,
}

#[derive(Serialize)]
struct CohortMetricsResponse {
    overall: MetricsResponse,
    female: MetricsResponse,
    male: MetricsResponse,
}

#[derive(Serialize)]
struct SessionResponse {
    day: u32,
    doses_available: u32,
    doses_used: u32,
}

#[derive(Serialize)]
struct EpidemicResponse {
    strategy: String,
    series: SeriesResponse,
    sessions: Vec<SessionResponse>,
    metrics: CohortMetricsResponse,
}

fn series_response(series: &[DailyCounts]) -> SeriesResponse {
    SeriesResponse {
        day: series.iter().map(|d| d.day).collect(),
        susceptible: series.iter().map(|d| d.susceptible.total).collect(),
        infected: series.iter().map(|d| d.infected.total).collect(),
        recovered: series.iter().map(|d| d.recovered.total).collect(),
        vaccinated: series.iter().map(|d| d.vaccinated.total).collect(),
        new_infections: series.iter().map(|d| d.new_infections.total).collect(),
    }
}

fn metrics_response(metrics: &Metrics) -> CohortMetricsResponse {
    let convert = |m: &seconet::harness::RunMetrics| MetricsResponse {
        peak_incidence: m.peak_incidence,
        peak_day: m.peak_day,
        cumulative_incidence: m.cumulative_incidence,
    };
    CohortMetricsResponse {
        overall: convert(&metrics.overall),
        female: convert(&metrics.female),
        male: convert(&metrics.male),
    }
}

fn epidemic_payload(request_json: &str) -> Result<EpidemicResponse, String> {
    let request = DemoRequest::parse(request_json)?;
    let growth = request.growth_config()?;
    let epidemic = request.epidemic_config()?;
    let strategy: Strategy = request.strategy.parse().map_err(|e: seconet::Error| e.to_string())?;
    let template = PlanTemplate::default();
    let output = run_simulation(&growth, &epidemic, &template, strategy, request.seed)
        .map_err(|e| e.to_string())?;
    let metrics = compute_metrics(&output.series);
    Ok(EpidemicResponse {
        strategy: strategy.name().into(),
        series: series_response(&output.series),
        sessions: output
            .audits
            .iter()
            .map(|a| SessionResponse {
                day: a.day,
                doses_available: a.doses_available,
                doses_used: a.doses_used,
            })
            .collect(),
        metrics: metrics_response(&metrics),
    })
}

/// Runs one full simulation and returns the daily compartment series,
/// session audits, and summary metrics as JSON.
#[wasm_bindgen]
pub fn run_epidemic(request_json: &str) -> String {
    respond(epidemic_payload(request_json))
}

// ---------------------------------------------------------------------
// Operation 3: same seed, several strategies
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct StrategyOutcome {
    strategy: String,
    metrics: CohortMetricsResponse,
    /// Daily infected counts, for overlaying curves.
    infected: Vec<u32>,
}

#[derive(Serialize)]
struct CompareResponse {
    seed: u64,
    outcomes: Vec<StrategyOutcome>,
}

fn compare_payload(request_json: &str) -> Result<CompareResponse, String> {
    let request = DemoRequest::parse(request_json)?;
    let growth = request.growth_config()?;
    let epidemic = request.epidemic_config()?;
    let template = PlanTemplate::default();
    let strategies: Vec<Strategy> = if request.strategies.is_empty() {
        Strategy::ALL.to_vec()
    } else {
        request
            .strategies
            .iter()
            .map(|name| name.parse().map_err(|e: seconet::Error| e.to_string()))
            .collect::<Result<_, _>>()?
    };
    let mut outcomes = Vec::with_capacity(strategies.len());
    for strategy in strategies {
        let output = run_simulation(&growth, &epidemic, &template, strategy, request.seed)
            .map_err(|e| format!("{strategy}: {e}"))?;
        outcomes.push(StrategyOutcome {
            strategy: strategy.name().into(),
            metrics: metrics_response(&compute_metrics(&output.series)),
            infected: output.series.iter().map(|d| d.infected.total).collect(),
        });
    }
    Ok(CompareResponse {
        seed: request.seed,
        outcomes,
    })
}

/// Runs the same seed under several vaccination strategies and returns
/// per-strategy metrics plus infected-count curves as JSON.
#[wasm_bindgen]
pub fn compare_strategies(request_json: &str) -> String {
    respond(compare_payload(request_json))
}
