//! Named strategies: the canonical square/unsharp family, visibility noise
//! and the deterministic one-bit classical model.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::qubit::{validate_povm, BinaryPovm, Bloch, ComplexMatrix2, Ket, C64};
use crate::scenario::{input_bit, BinaryInstrument, PreparationEnsemble, Strategy, WitnessPair};

/// Bloch vectors of the square ensemble, indexed by `2·x₀ + x₁`.
pub fn square_ensemble_vectors() -> [Bloch; 4] {
    let n00 = Bloch::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2);
    let n01 = Bloch::new(FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2);
    [n00, n01, -n01, -n00]
}

pub fn square_ensemble() -> PreparationEnsemble {
    PreparationEnsemble::from_bloch(&square_ensemble_vectors()).expect("unit vectors")
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::domain(format!("{name} = {v} is outside [0, 1]")));
    }
    Ok(())
}

/// Square preparations, Lüders instruments of `ησ_x` and `ησ_z`, and
/// projective `σ_x`, `σ_z` readout.
pub fn canonical_strategy(eta: f64) -> Result<Strategy> {
    check_unit("eta", eta)?;
    let instruments = [Bloch::x(), Bloch::z()].map(|axis| {
        BinaryInstrument::lueders(&BinaryPovm::from_observable(0.0, &(axis * eta)).expect("η ≤ 1"))
    });
    let measurements =
        [Bloch::x(), Bloch::z()].map(|axis| BinaryPovm::from_observable(0.0, &axis).expect("unit"));
    Ok(Strategy::new(square_ensemble(), instruments, measurements))
}

/// Visibilities of Alice's preparations, Bob's instruments and Charlie's
/// measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityTriple {
    v_a: f64,
    v_b: f64,
    v_c: f64,
}

impl VisibilityTriple {
    pub fn new(v_a: f64, v_b: f64, v_c: f64) -> Result<Self> {
        check_unit("v_a", v_a)?;
        check_unit("v_b", v_b)?;
        check_unit("v_c", v_c)?;
        Ok(VisibilityTriple { v_a, v_b, v_c })
    }

    pub fn ideal() -> Self {
        VisibilityTriple {
            v_a: 1.0,
            v_b: 1.0,
            v_c: 1.0,
        }
    }

    pub fn v_a(&self) -> f64 {
        self.v_a
    }

    pub fn v_b(&self) -> f64 {
        self.v_b
    }

    pub fn v_c(&self) -> f64 {
        self.v_c
    }

    /// Component-wise product.
    pub fn compose(&self, other: &Self) -> Self {
        VisibilityTriple {
            v_a: self.v_a * other.v_a,
            v_b: self.v_b * other.v_b,
            v_c: self.v_c * other.v_c,
        }
    }
}

/// Mixes each device with its maximally mixed counterpart.
///
/// States shrink `n⃗ ↦ v_a n⃗`. For the binary observables only the Bloch
/// part shrinks (`c⃗ ↦ v c⃗`, `c₀` kept); Bob's Kraus operators are rebuilt as
/// `U_b √M′_b` with the instrument's stored unitaries, so instruments with
/// more than one Kraus operator per outcome are rejected.
pub fn apply_visibility(s: &Strategy, v: &VisibilityTriple) -> Result<Strategy> {
    let scaled = s.preparations().blochs().map(|n| n * v.v_a);
    let preparations = PreparationEnsemble::from_bloch(&scaled)?;

    let mut instruments = s.instruments().clone();
    for (y, inst) in instruments.iter_mut().enumerate() {
        let path = format!("instruments[{y}]");
        let unitaries = *inst.unitaries().ok_or_else(|| {
            Error::invalid(
                path.as_str(),
                "visibility needs a single Kraus operator per outcome",
            )
        })?;
        let povm = inst.povm();
        let noisy = BinaryPovm::from_observable(povm.offset(), &(povm.axis() * v.v_b))
            .map_err(|e| e.at(&path))?;
        *inst = BinaryInstrument::with_unitaries(&noisy, unitaries).map_err(|e| e.at(&path))?;
    }

    let mut measurements = *s.measurements();
    for (z, m) in measurements.iter_mut().enumerate() {
        *m = BinaryPovm::from_observable(m.offset(), &(m.axis() * v.v_c))
            .map_err(|e| e.at(&format!("measurements[{z}]")))?;
    }
    Ok(Strategy::new(preparations, instruments, measurements))
}

/// A deterministic one-bit classical strategy.
///
/// Each map is a four-entry truth table: `encode[x]` with `x = 2·x₀ + x₁`,
/// and `bob_out`, `relay`, `charlie_out` indexed by `2·m + setting`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassicalStrategy {
    pub encode: [u8; 4],
    pub bob_out: [u8; 4],
    pub relay: [u8; 4],
    pub charlie_out: [u8; 4],
}

/// Exact success counts: `W_AB = ab/8`, `W_AC = ac/16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassicalCounts {
    pub ab: u32,
    pub ac: u32,
}

impl ClassicalCounts {
    pub fn witness_pair(&self) -> WitnessPair {
        WitnessPair::new(self.ab as f64 / 8.0, self.ac as f64 / 16.0)
    }
}

fn table(bits: u16) -> [u8; 4] {
    std::array::from_fn(|i| ((bits >> i) & 1) as u8)
}

impl ClassicalStrategy {
    /// Number of distinct deterministic strategies, `16⁴`.
    pub const COUNT: u32 = 1 << 16;

    /// Decodes `index < 16⁴`; each nibble is one truth table.
    pub fn from_index(index: u32) -> Self {
        assert!(index < Self::COUNT, "classical strategy index out of range");
        let nibble = |k: u32| table(((index >> (4 * k)) & 0xf) as u16);
        ClassicalStrategy {
            encode: nibble(0),
            bob_out: nibble(1),
            relay: nibble(2),
            charlie_out: nibble(3),
        }
    }

    /// Alice sends `x₀`; Bob and Charlie output and forward the message.
    pub fn relay_first_bit() -> Self {
        ClassicalStrategy {
            encode: [0, 0, 1, 1],
            bob_out: [0, 0, 1, 1],
            relay: [0, 0, 1, 1],
            charlie_out: [0, 0, 1, 1],
        }
    }

    fn check(&self) -> Result<()> {
        let tables = [
            ("encode", &self.encode),
            ("bob_out", &self.bob_out),
            ("relay", &self.relay),
            ("charlie_out", &self.charlie_out),
        ];
        for (name, t) in tables {
            if t.iter().any(|&v| v > 1) {
                return Err(Error::invalid(name, "truth table entries must be 0 or 1"));
            }
        }
        Ok(())
    }

    pub fn counts(&self) -> ClassicalCounts {
        let mut ab = 0;
        let mut ac = 0;
        for x in 0..4 {
            let m = self.encode[x] as usize;
            for y in 0..2 {
                if self.bob_out[2 * m + y] as usize == input_bit(x, y) {
                    ab += 1;
                }
                let relayed = self.relay[2 * m + y] as usize;
                for z in 0..2 {
                    if self.charlie_out[2 * relayed + z] as usize == input_bit(x, z) {
                        ac += 1;
                    }
                }
            }
        }
        ClassicalCounts { ab, ac }
    }
}

pub fn witness_pair_classical(cs: &ClassicalStrategy) -> WitnessPair {
    cs.counts().witness_pair()
}

fn basis(bit: u8) -> Ket {
    if bit == 0 {
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    } else {
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
    }
}

/// Embeds the classical strategy with `σ_z`-diagonal states and effects.
///
/// Bob's outcome-`b` branch maps `|m⟩ ↦ |relay(m, y)⟩` for every message with
/// `bob_out(m, y) = b`. When both messages land on the same outcome and the
/// same relay bit the branch forgets the message, which takes two Kraus
/// operators; an outcome no message reaches gets the zero operator.
pub fn classical_to_strategy(cs: &ClassicalStrategy) -> Result<Strategy> {
    cs.check()?;
    let blochs = cs
        .encode
        .map(|m| Bloch::new(0.0, 0.0, if m == 0 { 1.0 } else { -1.0 }));
    let preparations = PreparationEnsemble::from_bloch(&blochs)?;

    let mut instruments = Vec::with_capacity(2);
    for y in 0..2 {
        let mut sets: [Vec<ComplexMatrix2>; 2] = [Vec::new(), Vec::new()];
        for b in 0..2u8 {
            let branch: Vec<ComplexMatrix2> = (0..2u8)
                .filter(|&m| cs.bob_out[2 * m as usize + y] == b)
                .map(|m| ComplexMatrix2::outer(&basis(cs.relay[2 * m as usize + y]), &basis(m)))
                .collect();
            sets[b as usize] = match branch.as_slice() {
                [] => vec![ComplexMatrix2::zero()],
                [k] => vec![*k],
                [k0, k1] if cs.relay[y] != cs.relay[2 + y] => vec![*k0 + *k1],
                _ => branch,
            };
        }
        let [k0, k1] = sets;
        instruments.push(
            BinaryInstrument::from_kraus_sets(k0, k1)
                .map_err(|e| e.at(&format!("instruments[{y}]")))?,
        );
    }

    let mut measurements = Vec::with_capacity(2);
    for z in 0..2 {
        let mut effects = [ComplexMatrix2::zero(); 2];
        for m in 0..2u8 {
            let c = cs.charlie_out[2 * m as usize + z] as usize;
            effects[c] = effects[c] + ComplexMatrix2::projector(&basis(m));
        }
        measurements.push(
            validate_povm(effects[0], effects[1])
                .map_err(|e| e.at(&format!("measurements[{z}]")))?,
        );
    }

    let [i0, i1]: [BinaryInstrument; 2] = instruments.try_into().expect("two settings");
    let [c0, c1]: [BinaryPovm; 2] = measurements.try_into().expect("two settings");
    Ok(Strategy::new(preparations, [i0, i1], [c0, c1]))
}
