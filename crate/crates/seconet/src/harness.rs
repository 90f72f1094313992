//! Experiment orchestration: single simulation runs, replicated sweeps
//! across growth-parameter overrides and vaccination strategies, metric
//! extraction, and the canonical CSV outputs.
//!
//! Replicate seeds are derived from (base seed, sweep id, replicate) —
//! deliberately not from the strategy — so every strategy at a given
//! (sweep point, replicate) sees the identical network and identical
//! infection seeding, making strategy comparisons paired.

use crate::config::{EpidemicConfig, GrowthConfig, PlanTemplate, ScenarioConfig, Strategy};
use crate::epidemic::{run_day, seed_infection, tally, Compartment, DailyCounts};
use crate::error::Result;
use crate::growth::{sample_population, seed_links, ContactNetwork};
use crate::rng::{derive_run_seed, run_streams};
use crate::topology::{summarize, TopologySummary};
use crate::vaccination::{build_plan, SessionAudit, SessionRunner};
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Everything a single run produces.
#[derive(Debug)]
pub struct RunOutput {
    /// One row per day, 0..=horizon; day 0 carries the seeded
    /// infections as its new-infection count.
    pub series: Vec<DailyCounts>,
    /// The network as of the final day.
    pub network: ContactNetwork,
    /// Per-person health states as of the final day.
    pub final_states: Vec<crate::epidemic::HealthState>,
    /// One audit row per vaccination session.
    pub audits: Vec<SessionAudit>,
}

/// Peak/timing/cumulative metrics for one cohort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunMetrics {
    /// Largest single-day new-infection count over days ≥ 1 (seeding is
    /// not incidence).
    pub peak_incidence: u32,
    /// Earliest day (0..=horizon) on which the infected count attains
    /// its maximum; 0 for an all-zero series.
    pub peak_day: u32,
    /// Total infection events including the day-0 seeds.
    pub cumulative_incidence: u32,
}

/// Metrics for all three cohorts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub overall: RunMetrics,
    pub female: RunMetrics,
    pub male: RunMetrics,
}

/// The per-run payload of a summary row.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub topology: TopologySummary,
    pub metrics: Metrics,
}

/// One row of the sweep summary: either a completed run or the error
/// that stopped it (the sweep itself continues).
#[derive(Debug, Clone)]
pub struct SummaryRecord {
    pub sweep_id: String,
    pub seed: u64,
    pub replicate: u32,
    pub strategy: Strategy,
    pub outcome: std::result::Result<RunSummary, String>,
}

/// Executes one full run: population sampling, link seeding, infection
/// seeding, then `horizon` days of growth → transmission → clearance →
/// vaccination sessions.
pub fn run_simulation(
    growth: &GrowthConfig,
    epidemic: &EpidemicConfig,
    template: &PlanTemplate,
    strategy: Strategy,
    run_seed: u64,
) -> Result<RunOutput> {
    growth.validate()?;
    epidemic.validate()?;
    template.validate()?;

    let mut streams = run_streams(run_seed);
    let persons = sample_population(growth, &mut streams.growth)?;
    let mut network = ContactNetwork::new(persons, growth.mean_age_gap);
    seed_links(&mut network, growth.initial_links, &mut streams.growth)?;

    let mut states = seed_infection(&network.persons, epidemic, &mut streams.epidemic);
    let seeded: Vec<u32> = states
        .iter()
        .enumerate()
        .filter(|(_, s)| s.compartment == Compartment::Infected)
        .map(|(id, _)| id as u32)
        .collect();

    let plan = build_plan(&network.persons, strategy, template);
    let mut runner = SessionRunner::new(plan);
    let vaccination_rng = &mut streams.vaccination;

    let mut series = Vec::with_capacity(growth.horizon as usize + 1);
    series.push(tally(&network.persons, &states, 0, &seeded));
    let mut hook = |net: &mut ContactNetwork, states: &mut [crate::epidemic::HealthState], day: u32| {
        runner.run_if_session(net, states, day, vaccination_rng)
    };
    for day in 1..=growth.horizon {
        series.push(run_day(
            &mut network,
            &mut states,
            growth,
            epidemic,
            &mut hook,
            &mut streams.growth,
            &mut streams.epidemic,
            day,
        )?);
    }
    drop(hook);
    Ok(RunOutput {
        series,
        network,
        final_states: states,
        audits: runner.audits,
    })
}

fn cohort_metrics(
    series: &[DailyCounts],
    new_inf: impl Fn(&DailyCounts) -> u32,
    prevalence: impl Fn(&DailyCounts) -> u32,
) -> RunMetrics {
    let peak_incidence = series
        .iter()
        .filter(|c| c.day >= 1)
        .map(&new_inf)
        .max()
        .unwrap_or(0);
    let peak_prevalence = series.iter().map(&prevalence).max().unwrap_or(0);
    let peak_day = series
        .iter()
        .find(|c| prevalence(c) == peak_prevalence)
        .map(|c| c.day)
        .unwrap_or(0);
    let cumulative_incidence = series.iter().map(&new_inf).sum();
    RunMetrics {
        peak_incidence,
        peak_day,
        cumulative_incidence,
    }
}

/// Extracts the nine epidemiological metrics (three per cohort) from a
/// daily series. Peak-day ties resolve to the earliest day; day 0 is
/// the seeding day.
pub fn compute_metrics(series: &[DailyCounts]) -> Metrics {
    Metrics {
        overall: cohort_metrics(series, |c| c.new_infections.total, |c| c.infected.total),
        female: cohort_metrics(series, |c| c.new_infections.female, |c| c.infected.female),
        male: cohort_metrics(series, |c| c.new_infections.male, |c| c.infected.male),
    }
}

struct SweepTask {
    sweep_id: String,
    replicate: u32,
    strategy: Strategy,
    run_seed: u64,
    growth: GrowthConfig,
}

fn run_task(task: &SweepTask, scenario: &ScenarioConfig) -> SummaryRecord {
    let outcome = run_simulation(
        &task.growth,
        &scenario.epidemic,
        &scenario.plan,
        task.strategy,
        task.run_seed,
    )
    .map(|output| RunSummary {
        topology: summarize(&output.network),
        metrics: compute_metrics(&output.series),
    })
    .map_err(|e| e.to_string());
    if let Err(ref e) = outcome {
        log::warn!(
            "run failed (sweep {}, strategy {}, replicate {}): {e}",
            task.sweep_id,
            task.strategy.name(),
            task.replicate
        );
    }
    SummaryRecord {
        sweep_id: task.sweep_id.clone(),
        seed: task.run_seed,
        replicate: task.replicate,
        strategy: task.strategy,
        outcome,
    }
}

/// Canonical record order: (sweep id, strategy list order, seed).
fn sort_records(records: &mut [SummaryRecord]) {
    records.sort_by(|a, b| {
        a.sweep_id
            .cmp(&b.sweep_id)
            .then(a.strategy.cmp(&b.strategy))
            .then(a.seed.cmp(&b.seed))
            .then(a.replicate.cmp(&b.replicate))
    });
}

/// Runs the full experiment: every (sweep point × strategy ×
/// replicate), each with a seed derived from (base seed, sweep id,
/// replicate) so strategies are paired. Individual run failures become
/// error records and the sweep continues. `workers` > 1 distributes
/// runs across threads; the output is byte-identical regardless.
pub fn sweep(scenario: &ScenarioConfig, workers: usize) -> Result<Vec<SummaryRecord>> {
    scenario.validate()?;
    let mut tasks = Vec::new();
    for point in &scenario.sweep {
        let growth = point.apply(&scenario.growth);
        for &strategy in &scenario.plan.strategies {
            for replicate in 0..scenario.replicates {
                tasks.push(SweepTask {
                    sweep_id: point.id.clone(),
                    replicate,
                    strategy,
                    run_seed: derive_run_seed(scenario.seed, &point.id, replicate),
                    growth: growth.clone(),
                });
            }
        }
    }
    log::info!("sweep: {} runs across {workers} worker(s)", tasks.len());

    let mut records = if workers <= 1 {
        tasks.iter().map(|t| run_task(t, scenario)).collect()
    } else {
        let next = AtomicUsize::new(0);
        let results = Mutex::new(Vec::with_capacity(tasks.len()));
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(task) = tasks.get(i) else { break };
                    let record = run_task(task, scenario);
                    results.lock().expect("no panics while locked").push(record);
                });
            }
        });
        results.into_inner().expect("all workers joined")
    };
    sort_records(&mut records);
    Ok(records)
}

/// Renders a float with 6 significant digits (fixed notation; values
/// here live between 1e-4 and 1e4).
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn optional_sig6(x: Option<f64>) -> String {
    x.map(format_sig6).unwrap_or_default()
}

pub const SUMMARY_HEADER: &str = "sweep_id,seed,strategy,avg_degree,gamma,aspl,clustering_sq,clustering_tri,peak_inc,peak_day,cum_inc,peak_inc_f,peak_day_f,cum_inc_f,peak_inc_m,peak_day_m,cum_inc_m";

/// Writes the sweep summary CSV in canonical order. Failed runs keep
/// their identity columns and leave every metric field empty; their
/// error text goes to the companion error CSV (see [`write_errors`]).
pub fn write_summary(records: &[SummaryRecord], mut w: impl Write) -> Result<()> {
    let mut ordered: Vec<&SummaryRecord> = records.iter().collect();
    ordered.sort_by(|a, b| {
        a.sweep_id
            .cmp(&b.sweep_id)
            .then(a.strategy.cmp(&b.strategy))
            .then(a.seed.cmp(&b.seed))
            .then(a.replicate.cmp(&b.replicate))
    });
    writeln!(w, "{SUMMARY_HEADER}")?;
    for record in ordered {
        write!(
            w,
            "{},{},{}",
            record.sweep_id,
            record.seed,
            record.strategy.name()
        )?;
        match &record.outcome {
            Ok(summary) => {
                let t = &summary.topology;
                let m = &summary.metrics;
                writeln!(
                    w,
                    ",{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    format_sig6(t.average_degree),
                    optional_sig6(t.powerlaw_exponent),
                    optional_sig6(t.avg_shortest_path),
                    format_sig6(t.clustering_square),
                    format_sig6(t.clustering_triangle),
                    m.overall.peak_incidence,
                    m.overall.peak_day,
                    m.overall.cumulative_incidence,
                    m.female.peak_incidence,
                    m.female.peak_day,
                    m.female.cumulative_incidence,
                    m.male.peak_incidence,
                    m.male.peak_day,
                    m.male.cumulative_incidence,
                )?;
            }
            Err(_) => writeln!(w, "{}", ",".repeat(14))?,
        }
    }
    Ok(())
}

/// Writes one row per failed run: `sweep_id,seed,strategy,error` with
/// the error text CSV-quoted. No rows → header only.
pub fn write_errors(records: &[SummaryRecord], mut w: impl Write) -> Result<()> {
    writeln!(w, "sweep_id,seed,strategy,error")?;
    let mut failed: Vec<&SummaryRecord> = records
        .iter()
        .filter(|r| r.outcome.is_err())
        .collect();
    failed.sort_by(|a, b| {
        a.sweep_id
            .cmp(&b.sweep_id)
            .then(a.strategy.cmp(&b.strategy))
            .then(a.seed.cmp(&b.seed))
    });
    for record in failed {
        let error = record.outcome.as_ref().unwrap_err();
        writeln!(
            w,
            "{},{},{},\"{}\"",
            record.sweep_id,
            record.seed,
            record.strategy.name(),
            error.replace('"', "\"\"")
        )?;
    }
    Ok(())
}

pub const DAILY_HEADER: &str =
    "day,S,I,R,V,S_f,I_f,R_f,V_f,S_m,I_m,R_m,V_m,new_inf,new_inf_f,new_inf_m";

/// Writes a per-day compartment series CSV.
pub fn write_daily_series(series: &[DailyCounts], mut w: impl Write) -> Result<()> {
    writeln!(w, "{DAILY_HEADER}")?;
    for c in series {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.day,
            c.susceptible.total,
            c.infected.total,
            c.recovered.total,
            c.vaccinated.total,
            c.susceptible.female,
            c.infected.female,
            c.recovered.female,
            c.vaccinated.female,
            c.susceptible.male,
            c.infected.male,
            c.recovered.male,
            c.vaccinated.male,
            c.new_infections.total,
            c.new_infections.female,
            c.new_infections.male,
        )?;
    }
    Ok(())
}
