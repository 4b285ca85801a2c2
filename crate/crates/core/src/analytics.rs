//! Closed forms: the quantum trade-off boundary, set membership, sharpness
//! certification and the self-test report.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::qubit::{
    direction_of_ket, eigen_decomposition, matrix_sqrt_psd, polar_decompose, rotation_of_unitary,
    unitary_from_rotation, Bloch, ComplexMatrix2,
};
use crate::report::round_reported;
use crate::scenario::{witness_ab, Strategy, WitnessPair};

/// Optimal qubit value of a single random access code, `(2 + √2)/4`.
pub const QRAC_MAX: f64 = (2.0 + SQRT_2) / 4.0;
/// `W_AC` when Bob measures sharply, `(4 + √2)/8`.
pub const SHARP_WAC: f64 = (4.0 + SQRT_2) / 8.0;
/// Largest value of either witness with one classical bit.
pub const CLASSICAL_MAX: f64 = 0.75;
/// Slack on which a pair is still deemed infeasible rather than grazing.
pub const INFEASIBLE_TOL: f64 = 1e-7;
/// Slack used by the default membership tests.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

const DOMAIN_SLACK: f64 = 1e-12;

/// Largest `W_AC` compatible with `W_AB = α`:
/// `(4 + √2 + √(16α − 16α² − 2))/8`.
pub fn boundary_wac(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || !(0.5 - DOMAIN_SLACK..=QRAC_MAX + DOMAIN_SLACK).contains(&alpha) {
        return Err(Error::domain(format!(
            "alpha = {alpha} is outside [1/2, (2+√2)/4]"
        )));
    }
    let radicand = 16.0 * alpha - 16.0 * alpha * alpha - 2.0;
    Ok((4.0 + SQRT_2 + radicand.max(0.0).sqrt()) / 8.0)
}

/// The point where the boundary meets the diagonal, `(5 + 2√2)/10`.
pub fn equal_witness_point() -> f64 {
    (5.0 + 2.0 * SQRT_2) / 10.0
}

fn unlimited_lower(w_ab: f64) -> f64 {
    SQRT_2 * (2.0 * w_ab - 1.0)
}

/// `2√((2 + √2 − 4w)(2w − 1))` above `(4 + √2)/8`, else 1; zero when the
/// radicand is negative.
fn unlimited_upper(w_ac: f64) -> f64 {
    if w_ac <= SHARP_WAC {
        return 1.0;
    }
    let radicand = (2.0 + SQRT_2 - 4.0 * w_ac) * (2.0 * w_ac - 1.0);
    (2.0 * radicand.max(0.0).sqrt()).min(1.0)
}

/// Smallest sharpness compatible with `W_AB`: `max(0, √2(2W_AB − 1))`.
pub fn sharpness_lower(w_ab: f64) -> Result<f64> {
    if !w_ab.is_finite() || !(0.0..=QRAC_MAX + INFEASIBLE_TOL).contains(&w_ab) {
        return Err(Error::domain(format!(
            "w_ab = {w_ab} is outside [0, (2+√2)/4]"
        )));
    }
    Ok(unlimited_lower(w_ab).clamp(0.0, 1.0))
}

/// Largest sharpness compatible with `W_AC`.
pub fn sharpness_upper(w_ac: f64) -> Result<f64> {
    if !w_ac.is_finite() || !(0.5 - DOMAIN_SLACK..=QRAC_MAX + INFEASIBLE_TOL).contains(&w_ac) {
        return Err(Error::domain(format!(
            "w_ac = {w_ac} is outside [1/2, (2+√2)/4]"
        )));
    }
    Ok(unlimited_upper(w_ac).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessInterval {
    pub lower: f64,
    pub upper: f64,
}

impl SharpnessInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, eta: f64) -> bool {
        self.lower <= eta && eta <= self.upper
    }

    /// Endpoints rounded half away from zero.
    pub fn rounded(&self, decimals: u32) -> Self {
        SharpnessInterval {
            lower: round_reported(self.lower, decimals),
            upper: round_reported(self.upper, decimals),
        }
    }
}

/// Certified range of Bob's sharpness given an observed pair.
///
/// Coordinates below 1/2 are folded first (relabelled outcomes). Pairs beyond
/// the quantum maximum, or whose bounds cross by more than
/// [`INFEASIBLE_TOL`], are reported as [`Error::InfeasiblePair`].
pub fn certify_interval(w: &WitnessPair) -> Result<SharpnessInterval> {
    for (name, v) in [("w_ab", w.w_ab), ("w_ac", w.w_ac)] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(format!("{name} = {v} is outside [0, 1]")));
        }
    }
    let sym = w.symmetrized();
    let lower = unlimited_lower(sym.w_ab);
    let upper = unlimited_upper(sym.w_ac);
    let beyond = sym.w_ab > QRAC_MAX + INFEASIBLE_TOL || sym.w_ac > QRAC_MAX + INFEASIBLE_TOL;
    if beyond || lower > upper + INFEASIBLE_TOL {
        return Err(Error::InfeasiblePair {
            w_ab: w.w_ab,
            w_ac: w.w_ac,
            lower,
            upper,
        });
    }
    let lower = lower.clamp(0.0, 1.0);
    let upper = upper.clamp(0.0, 1.0);
    Ok(SharpnessInterval {
        lower: lower.min(upper),
        upper,
    })
}

pub fn in_quantum_set(w: &WitnessPair) -> bool {
    in_quantum_set_with_slack(w, MEMBERSHIP_SLACK)
}

/// `W_AC ≤ boundary_wac(W_AB)` after folding both coordinates to `≥ 1/2`.
pub fn in_quantum_set_with_slack(w: &WitnessPair, slack: f64) -> bool {
    if !w.w_ab.is_finite() || !w.w_ac.is_finite() {
        return false;
    }
    let sym = w.symmetrized();
    if sym.w_ab > QRAC_MAX + slack || sym.w_ac > QRAC_MAX + slack {
        return false;
    }
    let bound = boundary_wac(sym.w_ab.min(QRAC_MAX)).expect("folded into the domain");
    sym.w_ac <= bound + slack
}

pub fn in_classical_set(w: &WitnessPair) -> bool {
    in_classical_set_with_slack(w, MEMBERSHIP_SLACK)
}

pub fn in_classical_set_with_slack(w: &WitnessPair, slack: f64) -> bool {
    let sym = w.symmetrized();
    sym.w_ab <= CLASSICAL_MAX + slack && sym.w_ac <= CLASSICAL_MAX + slack
}

/// Deviations of a strategy from the optimal form, measured in its own
/// frame. Every field is zero exactly when the strategy is the canonical one
/// up to a collective unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfTestReport {
    /// `1 − |n⃗_x|`.
    pub purity_defects: [f64; 4],
    /// `|n⃗₀₀ + n⃗₁₁|`, `|n⃗₀₁ + n⃗₁₀|`.
    pub antipodality_defects: [f64; 2],
    /// Departure of the angle between the two diagonals from π/2.
    pub square_angle_defect: f64,
    /// `|c_{y0}|`.
    pub bob_offsets: [f64; 2],
    /// Distance between Bob's unit axis `ĉ_y` and the diagonal `m̂_y`.
    pub bob_axis_defects: [f64; 2],
    /// `max_y ||c⃗_y| − √2(2W_AB − 1)|`.
    pub bob_sharpness_defect: f64,
    /// `max_{y,b} min_φ ‖K_{b|y} − e^{iφ} U √M_{b|y}‖_F` for the fitted `U`.
    pub unitary_spread: f64,
    /// `|c₀| + |1 − |c⃗|| + |ĉ_z − R_U m̂_z|` for Charlie's settings.
    pub charlie_alignment_defects: [f64; 2],
    /// Sharpness implied by `W_AB`.
    pub eta_fit: f64,
    /// The collective unitary fitted to Bob's Kraus operators.
    pub fitted_unitary: ComplexMatrix2,
}

impl SelfTestReport {
    pub fn defects(&self) -> Vec<f64> {
        let mut d = Vec::with_capacity(16);
        d.extend(self.purity_defects);
        d.extend(self.antipodality_defects);
        d.push(self.square_angle_defect);
        d.extend(self.bob_offsets);
        d.extend(self.bob_axis_defects);
        d.push(self.bob_sharpness_defect);
        d.push(self.unitary_spread);
        d.extend(self.charlie_alignment_defects);
        d
    }

    pub fn max_defect(&self) -> f64 {
        self.defects().into_iter().fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_defect() <= tol
    }
}

const RANK_TOL: f64 = 1e-9;
const DIRECTION_TOL: f64 = 1e-12;

fn unit(v: &Bloch) -> Option<Bloch> {
    let n = v.norm();
    (n > DIRECTION_TOL).then(|| v / n)
}

fn unit_distance(v: &Bloch, reference: &Option<Bloch>) -> f64 {
    match (unit(v), reference) {
        (Some(a), Some(r)) => (a - r).norm(),
        _ => 1.0,
    }
}

/// Rotation minimizing `Σ |R pᵢ − qᵢ|²` over proper rotations.
fn kabsch(pairs: &[(Bloch, Bloch)]) -> Matrix3<f64> {
    if pairs.is_empty() {
        return Matrix3::identity();
    }
    let mut h = Matrix3::zeros();
    for (p, q) in pairs {
        h += p * q.transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    v * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose()
}

/// Unitary evidence from one Kraus operator: images of `x̂, ŷ, ẑ` when the
/// effect is invertible, otherwise the image of the support direction.
fn unitary_evidence(k: &ComplexMatrix2, out: &mut Vec<(Bloch, Bloch)>) -> Result<()> {
    let m = k.adjoint() * *k;
    let [top, bottom] = eigen_decomposition(&m)?;
    if top.value <= RANK_TOL {
        return Ok(());
    }
    if bottom.value > RANK_TOL {
        let r = rotation_of_unitary(&polar_decompose(k)?.unitary);
        for i in 0..3 {
            let e = Bloch::ith(i, 1.0);
            out.push((e, r * e));
        }
    } else {
        let image = k.apply(&top.vector);
        out.push((direction_of_ket(&top.vector), direction_of_ket(&image)));
    }
    Ok(())
}

/// Compares a strategy with the optimal form: pure antipodal square
/// preparations, unbiased instruments along the square's diagonals followed by
/// one collective unitary `U`, and projective readout along the rotated
/// diagonals.
pub fn selftest_report(s: &Strategy) -> Result<SelfTestReport> {
    let n = s.preparations().blochs();
    let purity_defects = n.map(|v| (1.0 - v.norm()).max(0.0));
    let antipodality_defects = [(n[0] + n[3]).norm(), (n[1] + n[2]).norm()];
    let (d0, d1) = (n[0] - n[3], n[1] - n[2]);
    let square_angle_defect = match (unit(&d0), unit(&d1)) {
        (Some(a), Some(b)) => (a.dot(&b).clamp(-1.0, 1.0).acos() - FRAC_PI_2).abs(),
        _ => FRAC_PI_2,
    };
    let diagonals = s.preparations().difference_vectors().map(|m| unit(&m));

    let eta_fit = SQRT_2 * (2.0 * witness_ab(s)? - 1.0);
    let mut bob_offsets = [0.0; 2];
    let mut bob_axis_defects = [0.0; 2];
    let mut bob_sharpness_defect: f64 = 0.0;
    let mut evidence = Vec::new();
    for (y, inst) in s.instruments().iter().enumerate() {
        let povm = inst.povm();
        bob_offsets[y] = povm.offset().abs();
        bob_axis_defects[y] = unit_distance(povm.axis(), &diagonals[y]);
        bob_sharpness_defect = bob_sharpness_defect.max((povm.sharpness() - eta_fit).abs());
        for b in 0..2 {
            match inst.kraus(b) {
                [k] => unitary_evidence(k, &mut evidence)?,
                _ => {
                    return Err(Error::invalid(
                        format!("instruments[{y}].kraus[{b}]"),
                        "the self-test needs one Kraus operator per outcome",
                    ))
                }
            }
        }
    }
    let rotation = kabsch(&evidence);
    let fitted_unitary = unitary_from_rotation(&rotation);

    let mut unitary_spread: f64 = 0.0;
    for inst in s.instruments() {
        for b in 0..2 {
            let k = inst.kraus(b)[0];
            let root = matrix_sqrt_psd(inst.povm().effect(b))?;
            unitary_spread = unitary_spread.max((fitted_unitary * root).phase_distance(&k));
        }
    }

    let mut charlie_alignment_defects = [0.0; 2];
    for (z, povm) in s.measurements().iter().enumerate() {
        let target = diagonals[z].map(|m| rotation * m);
        charlie_alignment_defects[z] = povm.offset().abs()
            + (1.0 - povm.sharpness()).abs()
            + unit_distance(povm.axis(), &target);
    }

    Ok(SelfTestReport {
        purity_defects,
        antipodality_defects,
        square_angle_defect,
        bob_offsets,
        bob_axis_defects,
        bob_sharpness_defect,
        unitary_spread,
        charlie_alignment_defects,
        eta_fit,
        fitted_unitary,
    })
}
