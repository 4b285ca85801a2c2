//! Samplers for random qubit objects, used by property tests, soundness
//! sweeps and optimizer restarts.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qubit::{state_from_bloch, BinaryPovm, Bloch, ComplexMatrix2, QubitState, C64};
use crate::scenario::{BinaryInstrument, PreparationEnsemble, Strategy};

/// Deterministic generator for `(seed, stream)`; streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Bloch {
    loop {
        let v = Bloch::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-9 {
            return v / n;
        }
    }
}

/// Uniform in the unit ball.
pub fn random_ball_vector<R: Rng + ?Sized>(rng: &mut R) -> Bloch {
    random_unit_vector(rng) * rng.random::<f64>().cbrt()
}

/// Pure with probability ½, otherwise uniform in the Bloch ball.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> QubitState {
    let n = if rng.random_bool(0.5) {
        random_unit_vector(rng)
    } else {
        random_ball_vector(rng)
    };
    state_from_bloch(&n).expect("inside the ball")
}

pub fn random_ensemble<R: Rng + ?Sized>(rng: &mut R) -> PreparationEnsemble {
    PreparationEnsemble::new(std::array::from_fn(|_| random_state(rng)))
}

/// Binary POVM with uniform sharpness and a uniform admissible offset.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R) -> BinaryPovm {
    let sharpness = rng.random::<f64>();
    let axis = random_unit_vector(rng) * sharpness;
    let room = 1.0 - sharpness;
    let offset = if rng.random_bool(0.25) {
        0.0
    } else {
        room * (2.0 * rng.random::<f64>() - 1.0)
    };
    BinaryPovm::from_observable(offset, &axis).expect("admissible by construction")
}

/// Haar-random unitary.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix2 {
    let q = nalgebra::Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal)).normalize();
    let v = Bloch::new(q[1], q[2], q[3]);
    let su2 = ComplexMatrix2::identity() * q[0]
        - ComplexMatrix2::from_pauli(0.0, &v).scale(C64::new(0.0, 1.0));
    let phase = rng.random::<f64>() * std::f64::consts::TAU;
    su2.scale(C64::from_polar(1.0, phase))
}

pub fn random_instrument<R: Rng + ?Sized>(rng: &mut R) -> BinaryInstrument {
    let povm = random_povm(rng);
    let unitaries = if rng.random_bool(0.25) {
        [ComplexMatrix2::identity(); 2]
    } else {
        [random_unitary(rng), random_unitary(rng)]
    };
    BinaryInstrument::with_unitaries(&povm, unitaries).expect("valid by construction")
}

pub fn random_strategy<R: Rng + ?Sized>(rng: &mut R) -> Strategy {
    Strategy::new(
        random_ensemble(rng),
        [random_instrument(rng), random_instrument(rng)],
        [random_povm(rng), random_povm(rng)],
    )
}

/// Entries uniform in `[−1, 1]²`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix2 {
    let mut c = || C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
    ComplexMatrix2::new(c(), c(), c(), c())
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix2 {
    let m = random_matrix(rng);
    (m + m.adjoint()) * 0.5
}
