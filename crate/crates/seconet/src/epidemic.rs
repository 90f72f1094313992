//! Daily SIRS transmission dynamics over the evolving contact network:
//! per-act transmission on active links, relationship-age-dependent
//! intercourse frequency, exponential clearance with gender-specific
//! immunity acquisition, and absorbing vaccination.
//!
//! All state changes within a day are synchronous: transmissions are
//! evaluated against start-of-day compartments and applied together, so
//! results do not depend on link iteration order.

use crate::config::{EpidemicConfig, GrowthConfig};
use crate::error::Result;
use crate::growth::{grow_step, ContactNetwork, Person, FEMALE};
use crate::rng::SimRng;
use rand::Rng;
use rand_distr::{Distribution, Exp};

/// SIRS-V compartment. Recovered and Vaccinated are absorbing for the
/// simulation horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compartment {
    Susceptible,
    Infected,
    Recovered,
    Vaccinated,
}

/// Per-person infection state. `clearance_at` is pre-sampled at
/// infection time (exponential clearance is memoryless, so this is
/// equivalent to a per-day hazard but faster and reproducible).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HealthState {
    pub compartment: Compartment,
    /// Day the current infection began; set iff ever infected and not
    /// yet cleared.
    pub infected_since: Option<u32>,
    /// Continuous day at which the current infection clears; set iff
    /// Infected.
    pub clearance_at: Option<f64>,
}

impl HealthState {
    pub fn susceptible() -> Self {
        HealthState {
            compartment: Compartment::Susceptible,
            infected_since: None,
            clearance_at: None,
        }
    }
}

/// A count split into total / female / male.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CohortCounts {
    pub total: u32,
    pub female: u32,
    pub male: u32,
}

impl CohortCounts {
    fn bump(&mut self, gender: i8) {
        self.total += 1;
        if gender == FEMALE {
            self.female += 1;
        } else {
            self.male += 1;
        }
    }
}

/// One day's compartment tallies and incidence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DailyCounts {
    pub day: u32,
    pub susceptible: CohortCounts,
    pub infected: CohortCounts,
    pub recovered: CohortCounts,
    pub vaccinated: CohortCounts,
    pub new_infections: CohortCounts,
}

fn sample_clearance_delay(config: &EpidemicConfig, rng: &mut SimRng) -> f64 {
    let exp = Exp::new(1.0 / config.clearance_mean).expect("clearance_mean > 0");
    loop {
        let d = exp.sample(rng);
        if d > 0.0 {
            return d;
        }
    }
}

/// Seeds initial infections across the whole population by
/// gender-specific prevalence. Persons not yet in the network can be
/// seeded too — they only transmit once linked.
pub fn seed_infection(
    persons: &[Person],
    config: &EpidemicConfig,
    rng: &mut SimRng,
) -> Vec<HealthState> {
    persons
        .iter()
        .map(|p| {
            let prevalence = if p.gender == FEMALE {
                config.init_prevalence_female
            } else {
                config.init_prevalence_male
            };
            if rng.gen_bool(prevalence) {
                HealthState {
                    compartment: Compartment::Infected,
                    infected_since: Some(0),
                    clearance_at: Some(sample_clearance_delay(config, rng)),
                }
            } else {
                HealthState::susceptible()
            }
        })
        .collect()
}

/// Per-day probability that a coital act occurs on a link of the given
/// age: the early rate strictly before `early_window`, the late rate
/// from the boundary on.
pub fn coital_act_probability(link_age: u32, config: &EpidemicConfig) -> f64 {
    if link_age < config.early_window {
        config.f_early
    } else {
        config.f_late
    }
}

/// One synchronous transmission sweep over all active links. Returns
/// the ids newly infected today, ascending. For every discordant link,
/// exactly two Bernoulli draws are consumed (act, then per-act
/// transmission) regardless of outcome, so the random stream advance is
/// a fixed function of the discordant-link set.
pub fn transmission_step(
    network: &ContactNetwork,
    states: &mut [HealthState],
    config: &EpidemicConfig,
    rng: &mut SimRng,
    day: u32,
) -> Vec<u32> {
    let mut candidates = std::collections::BTreeSet::new();
    for link in network.active_links() {
        let (cf, cm) = (
            states[link.female as usize].compartment,
            states[link.male as usize].compartment,
        );
        let target = match (cf, cm) {
            (Compartment::Infected, Compartment::Susceptible) => link.male,
            (Compartment::Susceptible, Compartment::Infected) => link.female,
            _ => continue,
        };
        let act = rng.gen_bool(coital_act_probability(day - link.created_at, config));
        let transmit = rng.gen_bool(config.beta);
        if act && transmit {
            candidates.insert(target);
        }
    }
    for &id in &candidates {
        states[id as usize] = HealthState {
            compartment: Compartment::Infected,
            infected_since: Some(day),
            clearance_at: Some(day as f64 + sample_clearance_delay(config, rng)),
        };
    }
    candidates.into_iter().collect()
}

/// Clears every infection whose sampled clearance time has arrived:
/// with the gender's immunity probability the node becomes Recovered,
/// otherwise it returns to Susceptible. Returns (recovered ids,
/// returned-to-susceptible ids), each ascending.
pub fn clearance_step(
    states: &mut [HealthState],
    persons: &[Person],
    config: &EpidemicConfig,
    rng: &mut SimRng,
    day: u32,
) -> (Vec<u32>, Vec<u32>) {
    let mut recovered = Vec::new();
    let mut susceptible_again = Vec::new();
    for (id, state) in states.iter_mut().enumerate() {
        if state.compartment != Compartment::Infected {
            continue;
        }
        let due = state.clearance_at.expect("infected nodes carry clearance_at");
        if due > day as f64 {
            continue;
        }
        let rho = if persons[id].gender == FEMALE {
            config.rho_female
        } else {
            config.rho_male
        };
        let immune = rng.gen_bool(rho);
        *state = if immune {
            HealthState {
                compartment: Compartment::Recovered,
                infected_since: None,
                clearance_at: None,
            }
        } else {
            HealthState::susceptible()
        };
        if immune {
            recovered.push(id as u32);
        } else {
            susceptible_again.push(id as u32);
        }
    }
    (recovered, susceptible_again)
}

/// Tallies compartments (and the given new-infection ids) into a
/// [`DailyCounts`] row.
pub fn tally(persons: &[Person], states: &[HealthState], day: u32, new_infected: &[u32]) -> DailyCounts {
    let mut counts = DailyCounts {
        day,
        ..DailyCounts::default()
    };
    for (person, state) in persons.iter().zip(states) {
        let slot = match state.compartment {
            Compartment::Susceptible => &mut counts.susceptible,
            Compartment::Infected => &mut counts.infected,
            Compartment::Recovered => &mut counts.recovered,
            Compartment::Vaccinated => &mut counts.vaccinated,
        };
        slot.bump(person.gender);
    }
    for &id in new_infected {
        counts.new_infections.bump(persons[id as usize].gender);
    }
    counts
}

/// Runs one simulation day in fixed order: network growth →
/// transmission → clearance → the vaccination hook → tally. The hook
/// runs every day and is expected to act only on its session days;
/// `new_infections` records today's S→I transitions.
#[allow(clippy::too_many_arguments)]
pub fn run_day(
    network: &mut ContactNetwork,
    states: &mut [HealthState],
    growth: &GrowthConfig,
    epidemic: &EpidemicConfig,
    vaccination_hook: &mut dyn FnMut(&mut ContactNetwork, &mut [HealthState], u32) -> Result<()>,
    growth_rng: &mut SimRng,
    epidemic_rng: &mut SimRng,
    day: u32,
) -> Result<DailyCounts> {
    grow_step(network, growth, day, growth_rng);
    let new_infected = transmission_step(network, states, epidemic, epidemic_rng, day);
    clearance_step(states, &network.persons, epidemic, epidemic_rng, day);
    vaccination_hook(network, states, day)?;
    Ok(tally(&network.persons, states, day, &new_infected))
}
