//! Vaccination policies: dose budgeting, session scheduling, and the
//! eight targeting strategies (none, random-under-26, ring, and five
//! centrality rankings).
//!
//! Selection is deterministic for every strategy except the age-based
//! lottery: ranked strategies break score ties by ascending person id,
//! so runs are reproducible and strategy comparisons are low-variance.
//! With `Strategy::None` (and whenever a session's selection is forced
//! — zero doses, or doses covering all eligibles) no random numbers are
//! consumed, which keeps the null strategy bit-identical to running
//! without any vaccination at all.

use crate::centrality::{
    betweenness_centrality, closeness_centrality, degree_centrality, eigenvector_centrality,
    percolation_centrality, CentralityScores, EIGEN_MAX_ITERATIONS, EIGEN_TOLERANCE,
};
use crate::config::{PlanTemplate, Strategy};
use crate::epidemic::{Compartment, HealthState};
use crate::error::{Error, Result};
use crate::growth::{ContactNetwork, Person};
use crate::rng::SimRng;
use std::collections::BTreeSet;
use std::io::Write;

/// A concrete dosing schedule for one run: how many doses exist in
/// total (10% of the under-26 population, rounded down) and how they
/// split across the session days (evenly, remainder to the earliest
/// sessions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VaccinationPlan {
    pub session_days: Vec<u32>,
    pub total_doses: u32,
    pub doses_per_session: Vec<u32>,
    pub strategy: Strategy,
    /// When set, every strategy (not just the age lottery) only
    /// considers persons under 26.
    pub restrict_under_26: bool,
}

/// Builds the dosing schedule for a population: total doses are 10% of
/// the persons under 26 (rounded down), split evenly across sessions
/// with the remainder going one each to the earliest sessions.
pub fn build_plan(persons: &[Person], strategy: Strategy, template: &PlanTemplate) -> VaccinationPlan {
    let under_26 = persons.iter().filter(|p| p.age < 26).count() as u32;
    let total_doses = under_26 / 10;
    let sessions = template.session_days.len() as u32;
    let base = total_doses / sessions;
    let remainder = total_doses % sessions;
    let doses_per_session = (0..sessions)
        .map(|s| base + u32::from(s < remainder))
        .collect();
    VaccinationPlan {
        session_days: template.session_days.clone(),
        total_doses,
        doses_per_session,
        strategy,
        restrict_under_26: template.restrict_under_26,
    }
}

/// Vaccine eligibility: susceptible, sexually active at least once, and
/// within the age filter (always for the age lottery; for other
/// strategies only when the plan restricts to under-26).
pub fn eligible(person: &Person, state: &HealthState, plan: &VaccinationPlan) -> bool {
    state.compartment == Compartment::Susceptible
        && person.ever_linked
        && (plan.strategy != Strategy::Age || person.age < 26)
        && (!plan.restrict_under_26 || person.age < 26)
}

fn eligible_ids(network: &ContactNetwork, states: &[HealthState], plan: &VaccinationPlan) -> Vec<u32> {
    network
        .persons
        .iter()
        .zip(states)
        .filter(|(p, s)| eligible(p, s, plan))
        .map(|(p, _)| p.id)
        .collect()
}

/// Uniform random subset of size min(doses, |eligibles|). Forced
/// outcomes (zero doses, or enough doses for everyone) consume no
/// randomness. Returns ascending ids.
pub fn select_age_based(eligibles: &[u32], doses: u32, rng: &mut SimRng) -> Vec<u32> {
    let doses = doses as usize;
    if doses == 0 {
        return Vec::new();
    }
    if doses >= eligibles.len() {
        return eligibles.to_vec();
    }
    let mut chosen: Vec<u32> = rand::seq::index::sample(rng, eligibles.len(), doses)
        .into_iter()
        .map(|i| eligibles[i])
        .collect();
    chosen.sort_unstable();
    chosen
}

/// Ring selection: infected nodes ranked by active degree (descending,
/// ties by ascending id); walking that ranking, each infected node
/// contributes its eligible neighbors in ascending id order, skipping
/// ids already taken, until the doses run out. Returned in priority
/// order.
pub fn select_ring(
    network: &ContactNetwork,
    states: &[HealthState],
    eligibles: &[u32],
    doses: u32,
) -> Vec<u32> {
    let eligible_set: BTreeSet<u32> = eligibles.iter().copied().collect();
    let mut infected: Vec<u32> = states
        .iter()
        .enumerate()
        .filter(|(_, s)| s.compartment == Compartment::Infected)
        .map(|(id, _)| id as u32)
        .collect();
    infected.sort_by_key(|&id| (std::cmp::Reverse(network.degree(id)), id));

    let mut chosen = Vec::new();
    let mut taken = BTreeSet::new();
    'outer: for &hub in &infected {
        let mut ring: Vec<u32> = network
            .neighbors(hub)
            .filter(|n| eligible_set.contains(n) && !taken.contains(n))
            .collect();
        ring.sort_unstable();
        for n in ring {
            if chosen.len() as u32 >= doses {
                break 'outer;
            }
            taken.insert(n);
            chosen.push(n);
        }
    }
    chosen
}

/// Deterministic top-k by score (descending, ties by ascending id).
/// Scores must have been computed this session day — stale tables are a
/// contract violation. Returned in rank order.
pub fn select_by_centrality(
    scores: &CentralityScores,
    eligibles: &[u32],
    doses: u32,
    session_day: u32,
) -> Result<Vec<u32>> {
    if scores.computed_at != session_day {
        return Err(Error::Contract(format!(
            "centrality scores computed on day {} used at session day {session_day}",
            scores.computed_at
        )));
    }
    let mut ranked: Vec<u32> = eligibles.to_vec();
    ranked.sort_by(|&a, &b| {
        scores.values[b as usize]
            .partial_cmp(&scores.values[a as usize])
            .expect("centrality scores are never NaN")
            .then(a.cmp(&b))
    });
    ranked.truncate((doses as usize).min(eligibles.len()));
    Ok(ranked)
}

/// Moves every chosen node to Vaccinated (absorbing, fully protective).
/// Choosing a non-susceptible node is a contract violation.
pub fn apply_vaccination(states: &mut [HealthState], chosen: &[u32]) -> Result<()> {
    for &id in chosen {
        if states[id as usize].compartment != Compartment::Susceptible {
            return Err(Error::Contract(format!(
                "vaccination of non-susceptible node {id}"
            )));
        }
    }
    for &id in chosen {
        states[id as usize] = HealthState {
            compartment: Compartment::Vaccinated,
            infected_since: None,
            clearance_at: None,
        };
    }
    Ok(())
}

/// What one session did, for the audit log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionAudit {
    pub day: u32,
    pub strategy: Strategy,
    pub doses_available: u32,
    pub doses_used: u32,
    pub chosen: Vec<u32>,
}

/// Drives the vaccination plan across a run: call
/// [`SessionRunner::run_if_session`] every day; it acts only on the
/// plan's session days and records one [`SessionAudit`] per session.
#[derive(Debug, Clone)]
pub struct SessionRunner {
    plan: VaccinationPlan,
    pub audits: Vec<SessionAudit>,
}

impl SessionRunner {
    pub fn new(plan: VaccinationPlan) -> Self {
        SessionRunner {
            plan,
            audits: Vec::new(),
        }
    }

    pub fn plan(&self) -> &VaccinationPlan {
        &self.plan
    }

    /// Runs the session falling on `day`, if any. Centrality scores are
    /// recomputed from the current network (and, for percolation, the
    /// current infection states) at every session.
    pub fn run_if_session(
        &mut self,
        network: &mut ContactNetwork,
        states: &mut [HealthState],
        day: u32,
        rng: &mut SimRng,
    ) -> Result<()> {
        let Some(idx) = self.plan.session_days.iter().position(|&d| d == day) else {
            return Ok(());
        };
        let doses = self.plan.doses_per_session[idx];
        let chosen = if self.plan.strategy == Strategy::None {
            Vec::new()
        } else {
            let eligibles = eligible_ids(network, states, &self.plan);
            match self.plan.strategy {
                Strategy::None => unreachable!(),
                Strategy::Age => select_age_based(&eligibles, doses, rng),
                Strategy::Ring => select_ring(network, states, &eligibles, doses),
                Strategy::Degree => {
                    select_by_centrality(&degree_centrality(network), &eligibles, doses, day)?
                }
                Strategy::Betweenness => {
                    select_by_centrality(&betweenness_centrality(network), &eligibles, doses, day)?
                }
                Strategy::Closeness => {
                    select_by_centrality(&closeness_centrality(network), &eligibles, doses, day)?
                }
                Strategy::Percolation => {
                    let chi: Vec<f64> = states
                        .iter()
                        .map(|s| f64::from(s.compartment == Compartment::Infected))
                        .collect();
                    select_by_centrality(
                        &percolation_centrality(network, &chi),
                        &eligibles,
                        doses,
                        day,
                    )?
                }
                Strategy::Eigenvector => select_by_centrality(
                    &eigenvector_centrality(network, EIGEN_TOLERANCE, EIGEN_MAX_ITERATIONS)?,
                    &eligibles,
                    doses,
                    day,
                )?,
            }
        };
        apply_vaccination(states, &chosen)?;
        self.audits.push(SessionAudit {
            day,
            strategy: self.plan.strategy,
            doses_available: doses,
            doses_used: chosen.len() as u32,
            chosen,
        });
        Ok(())
    }
}

/// Writes the session audit log:
/// `day,strategy,doses_available,doses_used,chosen_ids...` with one
/// trailing column per chosen id.
pub fn write_session_audits(mut w: impl Write, audits: &[SessionAudit]) -> Result<()> {
    writeln!(w, "day,strategy,doses_available,doses_used,chosen_ids...")?;
    for a in audits {
        write!(w, "{},{},{},{}", a.day, a.strategy.name(), a.doses_available, a.doses_used)?;
        for id in &a.chosen {
            write!(w, ",{id}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}
