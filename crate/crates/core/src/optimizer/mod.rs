//! Numerical counterparts of the trade-off analysis: Charlie's exact best
//! response, the reduced three-angle problem, boundary tracing, a see-saw over
//! explicit strategies, the classical enumeration and the inequality samplers.

mod boundary;
mod checks;
mod classical;
mod seesaw;

pub use boundary::{boundary_point, trace_boundary, BoundaryPoint};
pub use checks::{
    lemma1_fin_check, lemma2_sample, run_inequality_checks, sandwiched_max_eigenvalue, tt_pair_sum,
    tt_term, InequalityReport, Lemma2Sample, LEMMA1_TOL, LEMMA2_TOL, TT_TOL,
};
pub use classical::{classical_bruteforce, ClassicalSummary};
pub use seesaw::{seesaw, seesaw_run, SeesawOutcome, SeesawRun};

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::qubit::{max_eigenpair, BinaryPovm, Bloch, ComplexMatrix2};
use crate::scenario::{input_bit, BinaryInstrument, PreparationEnsemble, Strategy};
use crate::strategies::square_ensemble_vectors;

pub const DEFAULT_SEED: u64 = 0x5e9_4ac;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Points per axis of the boundary grid search, endpoints included.
    pub grid_resolution: usize,
    /// Iteration cap for each local refinement.
    pub refinement_iterations: usize,
    pub seesaw_restarts: usize,
    /// Final step size of the local searches.
    pub convergence_epsilon: f64,
    pub rng_seed: u64,
    /// Runs the see-saw over unrestricted preparations and instruments
    /// instead of antipodal pairs and unbiased Lüders instruments.
    pub generic_seesaw: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid_resolution: 512,
            refinement_iterations: 2000,
            seesaw_restarts: 32,
            convergence_epsilon: 1e-8,
            rng_seed: DEFAULT_SEED,
            generic_seesaw: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 2 {
            return Err(Error::domain("grid_resolution must be at least 2"));
        }
        if self.refinement_iterations == 0 || self.seesaw_restarts == 0 {
            return Err(Error::domain(
                "refinement_iterations and seesaw_restarts must be positive",
            ));
        }
        let eps = self.convergence_epsilon;
        if !(eps.is_finite() && eps > 0.0 && eps < 1e-3) {
            return Err(Error::domain(format!(
                "convergence_epsilon = {eps} must lie in (0, 1e-3)"
            )));
        }
        Ok(())
    }
}

/// `γ_z = Σ_x (−1)^{x_z} ρ_x`.
pub fn gamma(ensemble: &PreparationEnsemble, z: usize) -> ComplexMatrix2 {
    ensemble
        .states()
        .iter()
        .enumerate()
        .map(|(x, s)| {
            let sign = if input_bit(x, z) == 0 { 1.0 } else { -1.0 };
            *s.matrix() * sign
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub measurements: [BinaryPovm; 2],
    /// `W_AC` attained with these measurements.
    pub value: f64,
}

/// Charlie's optimal measurements given everything upstream.
///
/// `W_AC = ½ + (1/16) Σ_z Tr[G_z C_{0|z}]` with the traceless
/// `G_z = Σ_{y,b} K_{b|y} γ_z K_{b|y}†`, so the best `C_{0|z}` projects onto
/// the top eigenvector of `G_z`. When `G_z = 0` every measurement ties and the
/// projector onto `|0⟩` is returned.
pub fn charlie_best_response(
    preparations: &PreparationEnsemble,
    instruments: &[BinaryInstrument; 2],
) -> Result<BestResponse> {
    let mut value = 0.5;
    let mut measurements = [BinaryPovm::from_observable(0.0, &Bloch::z())?; 2];
    for (z, slot) in measurements.iter_mut().enumerate() {
        let g = gamma(preparations, z);
        let gz: ComplexMatrix2 = instruments
            .iter()
            .flat_map(|inst| (0..2).map(move |b| inst.branch(b, &g)))
            .sum();
        let top = max_eigenpair(&gz)?;
        *slot = BinaryPovm::projective(&top.vector);
        value += top.value / 16.0;
    }
    Ok(BestResponse {
        measurements,
        value,
    })
}

/// Applies [`charlie_best_response`] to a strategy.
pub fn with_best_response(s: &Strategy) -> Result<(Strategy, f64)> {
    let best = charlie_best_response(s.preparations(), s.instruments())?;
    Ok((s.with_measurements(best.measurements), best.value))
}

/// The three angles of the reduced problem: `θ` between the two antipodal
/// preparation pairs, and Bob's axes `c₀ = cos φ₀ x̂`, `c₁ = cos φ₁ ẑ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParameters {
    pub theta: f64,
    pub phi0: f64,
    pub phi1: f64,
}

impl ReducedParameters {
    pub fn new(theta: f64, phi0: f64, phi1: f64) -> Result<Self> {
        for (name, v) in [("theta", theta), ("phi0", phi0), ("phi1", phi1)] {
            if !v.is_finite() || !(0.0..=FRAC_PI_2).contains(&v) {
                return Err(Error::domain(format!("{name} = {v} is outside [0, π/2]")));
            }
        }
        Ok(ReducedParameters { theta, phi0, phi1 })
    }

    /// Preparations `n⃗₀₀ = (cos θ/2, 0, sin θ/2)`, `n⃗₀₁ = (cos θ/2, 0, −sin θ/2)`
    /// and their antipodes, Lüders instruments of `cos φ₀ σ_x`, `cos φ₁ σ_z`,
    /// and Charlie's best response.
    pub fn to_strategy(&self) -> Result<Strategy> {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let n00 = Bloch::new(c, 0.0, s);
        let n01 = Bloch::new(c, 0.0, -s);
        let preparations = PreparationEnsemble::from_bloch(&[n00, n01, -n01, -n00])?;
        let instruments = [
            BinaryInstrument::lueders(&BinaryPovm::from_observable(
                0.0,
                &(Bloch::x() * self.phi0.cos()),
            )?),
            BinaryInstrument::lueders(&BinaryPovm::from_observable(
                0.0,
                &(Bloch::z() * self.phi1.cos()),
            )?),
        ];
        let best = charlie_best_response(&preparations, &instruments)?;
        Ok(Strategy::new(preparations, instruments, best.measurements))
    }
}

/// Difference vectors `m⃗₀, m⃗₁` of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedEnsembleVectors {
    pub m0: Bloch,
    pub m1: Bloch,
}

pub fn reduced_ensemble_vectors(ensemble: &PreparationEnsemble) -> ReducedEnsembleVectors {
    let [m0, m1] = ensemble.difference_vectors();
    ReducedEnsembleVectors { m0, m1 }
}

/// `½ + (cos θ/2 + sin θ/2 + cos θ/2 sin φ₁ + sin θ/2 sin φ₀)/8`: the best
/// `W_AC` for the given angles.
pub fn reduced_objective(r: &ReducedParameters) -> f64 {
    let (s, c) = (0.5 * r.theta).sin_cos();
    0.5 + (c + s + c * r.phi1.sin() + s * r.phi0.sin()) / 8.0
}

/// `(4 + 2 cos θ/2 cos φ₀ + 2 sin θ/2 cos φ₁)/8`: the `W_AB` of the angles.
pub fn reduced_constraint(r: &ReducedParameters) -> f64 {
    let (s, c) = (0.5 * r.theta).sin_cos();
    (4.0 + 2.0 * c * r.phi0.cos() + 2.0 * s * r.phi1.cos()) / 8.0
}

/// The canonical square ensemble's difference vectors, `2√2 x̂` and `2√2 ẑ`.
pub fn square_difference_vectors() -> ReducedEnsembleVectors {
    let n = square_ensemble_vectors();
    let d = (n[0] - n[3], n[1] - n[2]);
    ReducedEnsembleVectors {
        m0: d.0 + d.1,
        m1: d.0 - d.1,
    }
}
