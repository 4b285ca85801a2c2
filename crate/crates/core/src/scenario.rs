//! The prepare–transform–measure data model and the two witnesses.
//!
//! Alice's input is `x = (x₀, x₁)`, stored as the index `2·x₀ + x₁`; Bob's
//! setting `y` asks for bit `x_y`, Charlie's setting `z` for bit `x_z`.
//! Post-measurement states are kept unnormalized (`KρK†`) throughout.

use crate::error::{Error, Result};
use crate::qubit::{
    polar_decompose, state_from_bloch, validate_povm, BinaryPovm, Bloch, ComplexMatrix2, QubitState,
};
use crate::tolerance;

/// Number of Alice inputs.
pub const INPUTS: usize = 4;

/// Bit `y` of input `x`: `x₀` for `y = 0`, `x₁` for `y = 1`.
#[inline]
pub fn input_bit(x: usize, y: usize) -> usize {
    debug_assert!(x < INPUTS && y < 2);
    if y == 0 {
        x >> 1
    } else {
        x & 1
    }
}

/// Alice's four states, indexed by `2·x₀ + x₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationEnsemble {
    states: [QubitState; INPUTS],
}

impl PreparationEnsemble {
    pub fn new(states: [QubitState; INPUTS]) -> Self {
        PreparationEnsemble { states }
    }

    pub fn from_bloch(vectors: &[Bloch; INPUTS]) -> Result<Self> {
        let mut states = [QubitState::maximally_mixed(); INPUTS];
        for (x, n) in vectors.iter().enumerate() {
            states[x] = state_from_bloch(n).map_err(|e| e.at(&format!("preparations[{x}]")))?;
        }
        Ok(Self::new(states))
    }

    pub fn maximally_mixed() -> Self {
        Self::new([QubitState::maximally_mixed(); INPUTS])
    }

    pub fn state(&self, x: usize) -> &QubitState {
        &self.states[x]
    }

    pub fn states(&self) -> &[QubitState; INPUTS] {
        &self.states
    }

    pub fn blochs(&self) -> [Bloch; INPUTS] {
        self.states.map(|s| *s.bloch())
    }

    /// `m⃗_z = (n⃗₀₀ − n⃗₁₁) + (−1)^z (n⃗₀₁ − n⃗₁₀)`, the Bloch vector of
    /// `γ_z = Σ_x (−1)^{x_z} ρ_x`.
    pub fn difference_vectors(&self) -> [Bloch; 2] {
        let n = self.blochs();
        let diag = n[0] - n[3];
        let anti = n[1] - n[2];
        [diag + anti, diag - anti]
    }

    pub fn conjugated(&self, u: &ComplexMatrix2) -> Result<Self> {
        let mut states = self.states;
        for (x, s) in states.iter_mut().enumerate() {
            *s = s
                .conjugated(u)
                .map_err(|e| e.at(&format!("preparations[{x}]")))?;
        }
        Ok(Self::new(states))
    }
}

/// A two-outcome quantum instrument.
///
/// Each outcome normally carries one Kraus operator `K_b = U_b √M_b`. The
/// classical embedding also needs outcomes with two Kraus operators (a
/// measure-and-reprepare branch that forgets the input); for those the
/// unitaries are undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryInstrument {
    kraus: [Vec<ComplexMatrix2>; 2],
    povm: BinaryPovm,
    unitaries: Option<[ComplexMatrix2; 2]>,
}

impl BinaryInstrument {
    pub fn from_kraus(k0: ComplexMatrix2, k1: ComplexMatrix2) -> Result<Self> {
        Self::from_kraus_sets(vec![k0], vec![k1])
    }

    pub fn from_kraus_sets(k0: Vec<ComplexMatrix2>, k1: Vec<ComplexMatrix2>) -> Result<Self> {
        for (b, set) in [&k0, &k1].into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::invalid(format!("kraus[{b}]"), "no Kraus operators"));
            }
            for k in set {
                k.check_finite().map_err(|e| e.at(&format!("kraus[{b}]")))?;
            }
        }
        let m0: ComplexMatrix2 = k0.iter().map(|k| k.adjoint() * *k).sum();
        let m1: ComplexMatrix2 = k1.iter().map(|k| k.adjoint() * *k).sum();
        let povm = validate_povm(m0, m1).map_err(|e| e.at("povm"))?;
        let unitaries = if k0.len() == 1 && k1.len() == 1 {
            Some([
                polar_decompose(&k0[0])?.unitary,
                polar_decompose(&k1[0])?.unitary,
            ])
        } else {
            None
        };
        Ok(BinaryInstrument {
            kraus: [k0, k1],
            povm,
            unitaries,
        })
    }

    /// `K_b = U_b √M_b`. The given unitaries are kept verbatim, including
    /// their action on the kernel of a rank-deficient effect.
    pub fn with_unitaries(povm: &BinaryPovm, unitaries: [ComplexMatrix2; 2]) -> Result<Self> {
        let mut kraus: [Vec<ComplexMatrix2>; 2] = [Vec::new(), Vec::new()];
        for b in 0..2 {
            unitaries[b]
                .check_unitary()
                .map_err(|e| e.at(&format!("unitaries[{b}]")))?;
            let root = crate::qubit::matrix_sqrt_psd(povm.effect(b))?;
            kraus[b].push(unitaries[b] * root);
        }
        Ok(BinaryInstrument {
            kraus,
            povm: *povm,
            unitaries: Some(unitaries),
        })
    }

    /// The Lüders instrument `K_b = √M_b`.
    pub fn lueders(povm: &BinaryPovm) -> Self {
        Self::with_unitaries(povm, [ComplexMatrix2::identity(); 2])
            .expect("identity is unitary and effects are positive")
    }

    /// `K₀ = K₁ = 𝟙/√2`: random outcome, no disturbance.
    pub fn non_interacting() -> Self {
        Self::lueders(&BinaryPovm::from_observable(0.0, &Bloch::zeros()).expect("valid"))
    }

    pub fn povm(&self) -> &BinaryPovm {
        &self.povm
    }

    pub fn kraus(&self, outcome: usize) -> &[ComplexMatrix2] {
        &self.kraus[outcome]
    }

    pub fn unitaries(&self) -> Option<&[ComplexMatrix2; 2]> {
        self.unitaries.as_ref()
    }

    /// One Kraus operator per outcome.
    pub fn is_extremal_form(&self) -> bool {
        self.unitaries.is_some()
    }

    /// Unnormalized post-measurement operator `Σ_k K ρ K†` for outcome `b`.
    pub fn branch(&self, outcome: usize, rho: &ComplexMatrix2) -> ComplexMatrix2 {
        self.kraus[outcome].iter().map(|k| rho.sandwich(k)).sum()
    }

    /// Frame change `K ↦ V K V†`.
    pub fn conjugated(&self, v: &ComplexMatrix2) -> Result<Self> {
        let [k0, k1] = &self.kraus;
        let map = |set: &Vec<ComplexMatrix2>| set.iter().map(|k| k.sandwich(v)).collect();
        let mut out = Self::from_kraus_sets(map(k0), map(k1))?;
        if let (Some(us), Some(_)) = (self.unitaries, out.unitaries) {
            out.unitaries = Some(us.map(|u| u.sandwich(v)));
        }
        Ok(out)
    }
}

/// Preparations, Bob's two instruments and Charlie's two measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    preparations: PreparationEnsemble,
    instruments: [BinaryInstrument; 2],
    measurements: [BinaryPovm; 2],
}

impl Strategy {
    pub fn new(
        preparations: PreparationEnsemble,
        instruments: [BinaryInstrument; 2],
        measurements: [BinaryPovm; 2],
    ) -> Self {
        Strategy {
            preparations,
            instruments,
            measurements,
        }
    }

    pub fn preparations(&self) -> &PreparationEnsemble {
        &self.preparations
    }

    pub fn instruments(&self) -> &[BinaryInstrument; 2] {
        &self.instruments
    }

    pub fn instrument(&self, y: usize) -> &BinaryInstrument {
        &self.instruments[y]
    }

    pub fn measurements(&self) -> &[BinaryPovm; 2] {
        &self.measurements
    }

    pub fn measurement(&self, z: usize) -> &BinaryPovm {
        &self.measurements[z]
    }

    pub fn with_measurements(&self, measurements: [BinaryPovm; 2]) -> Self {
        Strategy {
            measurements,
            ..self.clone()
        }
    }

    pub fn with_preparations(&self, preparations: PreparationEnsemble) -> Self {
        Strategy {
            preparations,
            ..self.clone()
        }
    }

    pub fn with_instruments(&self, instruments: [BinaryInstrument; 2]) -> Self {
        Strategy {
            instruments,
            ..self.clone()
        }
    }

    /// Conjugates every state, Kraus operator and effect by the unitary `v`.
    pub fn conjugated(&self, v: &ComplexMatrix2) -> Result<Self> {
        v.check_unitary()?;
        let instruments = [
            self.instruments[0]
                .conjugated(v)
                .map_err(|e| e.at("instruments[0]"))?,
            self.instruments[1]
                .conjugated(v)
                .map_err(|e| e.at("instruments[1]"))?,
        ];
        let measurements = [
            self.measurements[0]
                .conjugated(v)
                .map_err(|e| e.at("measurements[0]"))?,
            self.measurements[1]
                .conjugated(v)
                .map_err(|e| e.at("measurements[1]"))?,
        ];
        Ok(Strategy::new(
            self.preparations.conjugated(v)?,
            instruments,
            measurements,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessPair {
    pub w_ab: f64,
    pub w_ac: f64,
}

impl WitnessPair {
    pub fn new(w_ab: f64, w_ac: f64) -> Self {
        WitnessPair { w_ab, w_ac }
    }

    /// Folds each coordinate into `[1/2, 1]`: relabelling a party's outcomes
    /// maps `w` to `1 − w`.
    pub fn symmetrized(&self) -> Self {
        WitnessPair {
            w_ab: self.w_ab.max(1.0 - self.w_ab),
            w_ac: self.w_ac.max(1.0 - self.w_ac),
        }
    }
}

/// `p(b, c | x, y, z) = Tr[K_{b|y} ρ_x K_{b|y}† C_{c|z}]`, clamped to `[0, 1]`.
pub fn joint_prob(s: &Strategy, x: usize, y: usize, z: usize, b: usize, c: usize) -> f64 {
    let out = s.instruments[y].branch(b, s.preparations.states[x].matrix());
    out.trace_product(s.measurements[z].effect(c))
        .re
        .clamp(0.0, 1.0)
}

/// All 64 probabilities, indexed `[x][y][z][b][c]`.
pub fn distribution(s: &Strategy) -> [[[[[f64; 2]; 2]; 2]; 2]; INPUTS] {
    let mut p = [[[[[0.0; 2]; 2]; 2]; 2]; INPUTS];
    for (x, px) in p.iter_mut().enumerate() {
        for (y, py) in px.iter_mut().enumerate() {
            for (z, pz) in py.iter_mut().enumerate() {
                for (b, pb) in pz.iter_mut().enumerate() {
                    for (c, pc) in pb.iter_mut().enumerate() {
                        *pc = joint_prob(s, x, y, z, b, c);
                    }
                }
            }
        }
    }
    p
}

/// `(1/8) Σ_{x,k} Tr[ρ_x E^{(k)}_{x_k}]`: the random-access-code score of an
/// ensemble read out by a pair of binary measurements, unclamped.
pub fn rac_score(ensemble: &PreparationEnsemble, readout: [&BinaryPovm; 2]) -> f64 {
    let mut total = 0.0;
    for (x, state) in ensemble.states.iter().enumerate() {
        for (k, povm) in readout.iter().enumerate() {
            total += state
                .matrix()
                .trace_product(povm.effect(input_bit(x, k)))
                .re;
        }
    }
    total / 8.0
}

fn checked(raw: f64, what: &str) -> Result<f64> {
    let tol = tolerance::herm();
    if !raw.is_finite() || raw < -tol || raw > 1.0 + tol {
        return Err(Error::invalid(
            what,
            format!("value {raw} is not a probability"),
        ));
    }
    Ok(raw.clamp(0.0, 1.0))
}

pub fn witness_ab_raw(s: &Strategy) -> f64 {
    rac_score(
        &s.preparations,
        [s.instruments[0].povm(), s.instruments[1].povm()],
    )
}

/// `W_AB = (1/8) Σ_{x,y} Tr[ρ_x M_{x_y|y}]`.
pub fn witness_ab(s: &Strategy) -> Result<f64> {
    checked(witness_ab_raw(s), "witness_ab")
}

/// `ρ̃_x = ½ Σ_{y,b} K_{b|y} ρ_x K_{b|y}†` for an ensemble and a pair of
/// instruments chosen uniformly.
pub fn average_channel(
    ensemble: &PreparationEnsemble,
    instruments: &[BinaryInstrument; 2],
) -> Result<PreparationEnsemble> {
    let mut states = [QubitState::maximally_mixed(); INPUTS];
    for (x, out) in states.iter_mut().enumerate() {
        let rho = ensemble.states[x].matrix();
        let avg: ComplexMatrix2 = instruments
            .iter()
            .flat_map(|inst| (0..2).map(move |b| inst.branch(b, rho)))
            .sum::<ComplexMatrix2>()
            * 0.5;
        *out =
            QubitState::from_matrix(avg).map_err(|e| e.at(&format!("effective_ensemble[{x}]")))?;
    }
    Ok(PreparationEnsemble::new(states))
}

pub fn effective_ensemble(s: &Strategy) -> Result<PreparationEnsemble> {
    average_channel(&s.preparations, &s.instruments)
}

pub fn witness_ac_raw(s: &Strategy) -> f64 {
    let mut total = 0.0;
    for (x, state) in s.preparations.states.iter().enumerate() {
        for inst in &s.instruments {
            for b in 0..2 {
                let out = inst.branch(b, state.matrix());
                for (z, povm) in s.measurements.iter().enumerate() {
                    total += out.trace_product(povm.effect(input_bit(x, z))).re;
                }
            }
        }
    }
    total / 16.0
}

/// `W_AC = (1/16) Σ_{x,y,b,z} Tr[K_{b|y} ρ_x K_{b|y}† C_{x_z|z}]`.
pub fn witness_ac(s: &Strategy) -> Result<f64> {
    checked(witness_ac_raw(s), "witness_ac")
}

pub fn witness_pair(s: &Strategy) -> Result<WitnessPair> {
    Ok(WitnessPair::new(witness_ab(s)?, witness_ac(s)?))
}

/// `(W_AB, W_AC)` before clamping.
pub fn witness_pair_raw(s: &Strategy) -> (f64, f64) {
    (witness_ab_raw(s), witness_ac_raw(s))
}

/// The `W_AC` computed through the effective ensemble.
pub fn witness_ac_via_ensemble(s: &Strategy) -> Result<f64> {
    let eff = effective_ensemble(s)?;
    checked(
        rac_score(&eff, [&s.measurements[0], &s.measurements[1]]),
        "witness_ac",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::canonical_strategy;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn input_bits() {
        assert_eq!((input_bit(0, 0), input_bit(0, 1)), (0, 0));
        assert_eq!((input_bit(1, 0), input_bit(1, 1)), (0, 1));
        assert_eq!((input_bit(2, 0), input_bit(2, 1)), (1, 0));
        assert_eq!((input_bit(3, 0), input_bit(3, 1)), (1, 1));
    }

    #[test]
    fn sharp_canonical_marginal_matches_bloch_oracle() {
        let s = canonical_strategy(1.0).unwrap();
        let marginal: f64 = (0..2).map(|c| joint_prob(&s, 0, 0, 0, 0, c)).sum();
        // (1 + n⃗·x̂)/2 with n⃗₀₀ = (x̂ + ẑ)/√2
        let oracle = 0.5 * (1.0 + FRAC_1_SQRT_2);
        assert!((marginal - oracle).abs() < 1e-15);
        assert!((marginal - 0.853553).abs() < 1e-6);
    }

    #[test]
    fn mixed_preparations_erase_correlation() {
        let s = canonical_strategy(0.6)
            .unwrap()
            .with_preparations(PreparationEnsemble::maximally_mixed());
        for x in 0..4 {
            for y in 0..2 {
                let p0: f64 = (0..2).map(|c| joint_prob(&s, x, y, 0, 0, c)).sum();
                assert!((p0 - 0.5).abs() < 1e-15);
            }
        }
        let w = witness_pair(&s).unwrap();
        assert!((w.w_ab - 0.5).abs() < 1e-15);
        assert!((w.w_ac - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_interacting_bob_halves_everything() {
        let s = canonical_strategy(0.0).unwrap();
        for x in 0..4 {
            for (y, z, c) in [(0, 0, 0), (1, 1, 1), (0, 1, 0)] {
                let p0 = joint_prob(&s, x, y, z, 0, c);
                let p1 = joint_prob(&s, x, y, z, 1, c);
                assert!((p0 - p1).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn canonical_witness_values() {
        let w = witness_pair(&canonical_strategy(1.0).unwrap()).unwrap();
        assert!((w.w_ab - (2.0 + SQRT_2) / 4.0).abs() < 1e-15);
        assert!((w.w_ac - (4.0 + SQRT_2) / 8.0).abs() < 1e-15);

        let w = witness_pair(&canonical_strategy(0.8).unwrap()).unwrap();
        assert!((w.w_ab - (2.0 + 0.8 * SQRT_2) / 4.0).abs() < 1e-15);

        let w = witness_pair(&canonical_strategy(FRAC_1_SQRT_2).unwrap()).unwrap();
        assert!((w.w_ab - 0.75).abs() < 1e-15);
        assert!((w.w_ac - (5.0 + SQRT_2) / 8.0).abs() < 1e-15);

        let w = witness_pair(&canonical_strategy(0.0).unwrap()).unwrap();
        assert!((w.w_ac - (2.0 + SQRT_2) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn equal_witness_canonical_point() {
        // (2 + η√2)/4 = (4 + √2 + √(2 − 2η²))/8 is solved by η = 4/5.
        let w = witness_pair(&canonical_strategy(0.8).unwrap()).unwrap();
        let v = (5.0 + 2.0 * SQRT_2) / 10.0;
        assert!((w.w_ab - v).abs() < 1e-15);
        assert!((w.w_ac - v).abs() < 1e-15);
    }

    #[test]
    fn effective_ensemble_scaling() {
        for eta in [0.0, 0.3, FRAC_1_SQRT_2, 1.0] {
            let s = canonical_strategy(eta).unwrap();
            let eff = effective_ensemble(&s).unwrap();
            let factor = 0.5 * (1.0 + (1.0 - eta * eta).sqrt());
            for x in 0..4 {
                let expected = s.preparations().state(x).bloch() * factor;
                assert!((eff.state(x).bloch() - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn both_witness_routes_agree() {
        for eta in [0.0, 0.25, 0.9, 1.0] {
            let s = canonical_strategy(eta).unwrap();
            let a = witness_ac(&s).unwrap();
            let b = witness_ac_via_ensemble(&s).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn distribution_is_normalized() {
        let s = canonical_strategy(0.4).unwrap();
        let p = distribution(&s);
        for px in p {
            for py in px {
                for pz in py {
                    let total: f64 = pz.iter().flatten().sum();
                    assert!((total - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn instrument_rejects_incomplete_kraus() {
        let k = ComplexMatrix2::identity() * 0.5;
        let err = BinaryInstrument::from_kraus(k, k).unwrap_err();
        assert!(matches!(err, Error::InvalidStrategy { ref component, .. } if component == "povm"));
    }

    #[test]
    fn symmetrized_folds_below_half() {
        let w = WitnessPair::new(0.3, 0.6).symmetrized();
        assert_eq!(w, WitnessPair::new(0.7, 0.6));
    }
}
