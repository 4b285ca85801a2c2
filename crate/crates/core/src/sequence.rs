//! Longer sequences: parties measure one after another on the same qubit,
//! each with Lüders instruments of `η_k σ_x` and `η_k σ_z`.

use std::f64::consts::SQRT_2;

use crate::analytics::equal_witness_point;
use crate::error::{Error, Result};
use crate::optimizer::charlie_best_response;
use crate::qubit::{BinaryPovm, Bloch};
use crate::scenario::{
    average_channel, rac_score, BinaryInstrument, PreparationEnsemble, WitnessPair,
};
use crate::strategies::square_ensemble;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    sharpness_profile: Vec<f64>,
}

impl ChainConfig {
    pub fn new(sharpness_profile: Vec<f64>) -> Result<Self> {
        if sharpness_profile.is_empty() {
            return Err(Error::domain("a chain needs at least one party"));
        }
        for (k, &eta) in sharpness_profile.iter().enumerate() {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::domain(format!(
                    "sharpness of party {} is {eta}, outside [0, 1]",
                    k + 1
                )));
            }
        }
        Ok(ChainConfig { sharpness_profile })
    }

    /// `parties` sharp measurements.
    pub fn sharp(parties: usize) -> Result<Self> {
        Self::new(vec![1.0; parties])
    }

    pub fn parties(&self) -> usize {
        self.sharpness_profile.len()
    }

    pub fn sharpness_profile(&self) -> &[f64] {
        &self.sharpness_profile
    }
}

/// `½(1 + √2/2^k)` for the `k`-th measuring party.
pub fn party_witness_closed_form(k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain("party index starts at 1"));
    }
    Ok(0.5 * (1.0 + SQRT_2 * 0.5f64.powi(k as i32)))
}

/// Closed-form witness of every party for an arbitrary profile:
/// `½(1 + η_k r_k/√2)` with `r_1 = 1` and `r_{k+1} = r_k (1 + √(1 − η_k²))/2`.
/// Reduces to [`party_witness_closed_form`] when every `η_k = 1`.
pub fn chain_closed_form(cfg: &ChainConfig) -> Vec<f64> {
    let mut radius = 1.0;
    cfg.sharpness_profile
        .iter()
        .map(|&eta| {
            let w = 0.5 * (1.0 + eta * radius / SQRT_2);
            radius *= (1.0 + (1.0 - eta * eta).sqrt()) / 2.0;
            w
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainStep {
    /// 1-based position in the sequence.
    pub party: usize,
    pub sharpness: f64,
    /// Success rate of the party's own outcomes.
    pub witness: f64,
    /// Best success rate any measurement could reach on the incoming states.
    pub readout_witness: f64,
    /// Bloch radius of the states entering this party.
    pub radius: f64,
}

/// Propagates the square ensemble through the chain, averaging each party's
/// instruments over settings and outcomes.
pub fn simulate_chain(cfg: &ChainConfig) -> Result<Vec<ChainStep>> {
    let mut ensemble: PreparationEnsemble = square_ensemble();
    let readout = [
        BinaryInstrument::non_interacting(),
        BinaryInstrument::non_interacting(),
    ];
    let mut steps = Vec::with_capacity(cfg.parties());
    for (k, &eta) in cfg.sharpness_profile.iter().enumerate() {
        let povms = [Bloch::x(), Bloch::z()]
            .map(|a| BinaryPovm::from_observable(0.0, &(a * eta)).expect("sharpness checked"));
        let radius = ensemble
            .states()
            .iter()
            .map(|s| s.radius())
            .fold(0.0, f64::max);
        steps.push(ChainStep {
            party: k + 1,
            sharpness: eta,
            witness: rac_score(&ensemble, [&povms[0], &povms[1]]),
            readout_witness: charlie_best_response(&ensemble, &readout)?.value,
            radius,
        });
        let instruments = povms.map(|m| BinaryInstrument::lueders(&m));
        ensemble = average_channel(&ensemble, &instruments)?;
    }
    Ok(steps)
}

/// Canonical sharpness at which both codes beat the classical 3/4 equally:
/// `η = 4/5` with `W_AB = W_AC = (5 + 2√2)/10`.
pub fn double_violation_point() -> (f64, WitnessPair) {
    let w = equal_witness_point();
    (0.8, WitnessPair::new(w, w))
}
