//! Closed-form linear algebra on a single qubit.
//!
//! Every Hermitian 2×2 matrix is `h₀𝟙 + h⃗·σ⃗`, so spectra, square roots and
//! polar decompositions reduce to a handful of real formulas. Nothing here
//! iterates.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex64;
/// Real 3-vector in the Pauli basis.
pub type Bloch = Vector3<f64>;
/// Column vector in ℂ².
pub type Ket = [C64; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix2 {
    pub entries: [[C64; 2]; 2],
}

impl fmt::Debug for ComplexMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.entries;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            e[0][0], e[0][1], e[1][0], e[1][1]
        )
    }
}

impl Default for ComplexMatrix2 {
    fn default() -> Self {
        Self::zero()
    }
}

impl ComplexMatrix2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        ComplexMatrix2 {
            entries: [[a, b], [c, d]],
        }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn pauli_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn pauli_y() -> Self {
        Self::new(ZERO, -I, I, ZERO)
    }

    pub fn pauli_z() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    /// `c₀𝟙 + c⃗·σ⃗`.
    pub fn from_pauli(c0: f64, c: &Bloch) -> Self {
        Self::new(
            C64::new(c0 + c.z, 0.0),
            C64::new(c.x, -c.y),
            C64::new(c.x, c.y),
            C64::new(c0 - c.z, 0.0),
        )
    }

    /// Pauli coordinates `(c₀, c⃗)` of the Hermitian part of the matrix.
    pub fn pauli_components(&self) -> (f64, Bloch) {
        let e = &self.entries;
        let c0 = 0.5 * (e[0][0].re + e[1][1].re);
        let cz = 0.5 * (e[0][0].re - e[1][1].re);
        let cx = 0.5 * (e[0][1].re + e[1][0].re);
        let cy = 0.5 * (e[1][0].im - e[0][1].im);
        (c0, Bloch::new(cx, cy, cz))
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &Ket, w: &Ket) -> Self {
        Self::new(
            v[0] * w[0].conj(),
            v[0] * w[1].conj(),
            v[1] * w[0].conj(),
            v[1] * w[1].conj(),
        )
    }

    pub fn projector(v: &Ket) -> Self {
        Self::outer(v, v)
    }

    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self::new(
            e[0][0].conj(),
            e[1][0].conj(),
            e[0][1].conj(),
            e[1][1].conj(),
        )
    }

    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn det(&self) -> C64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    pub fn scale(&self, s: C64) -> Self {
        let e = &self.entries;
        Self::new(e[0][0] * s, e[0][1] * s, e[1][0] * s, e[1][1] * s)
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        let e = &self.entries;
        [
            e[0][0] * v[0] + e[0][1] * v[1],
            e[1][0] * v[0] + e[1][1] * v[1],
        ]
    }

    /// `A M A†`.
    pub fn sandwich(&self, a: &ComplexMatrix2) -> Self {
        *a * *self * a.adjoint()
    }

    /// `Tr(self · other)`.
    pub fn trace_product(&self, other: &ComplexMatrix2) -> C64 {
        let a = &self.entries;
        let b = &other.entries;
        a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|M − M†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn check_hermitian(&self) -> Result<()> {
        self.check_finite()?;
        let dev = self.hermitian_deviation();
        if dev > tolerance::herm() {
            return Err(Error::NotHermitian(dev));
        }
        Ok(())
    }

    pub fn check_unitary(&self) -> Result<()> {
        self.check_finite()?;
        let dev = (self.adjoint() * *self - Self::identity()).max_abs();
        if dev > tolerance::herm() {
            return Err(Error::NotUnitary(dev));
        }
        Ok(())
    }

    /// Distance between two unitaries modulo a global phase:
    /// `min_φ ‖A − e^{iφ}B‖_F`.
    pub fn phase_distance(&self, other: &ComplexMatrix2) -> f64 {
        let overlap = self.adjoint().trace_product(other);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        (self.scale(phase) - *other).frobenius_norm()
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::new(
            a[0][0] - b[0][0],
            a[0][1] - b[0][1],
            a[1][0] - b[1][0],
            a[1][1] - b[1][1],
        )
    }
}

impl Neg for ComplexMatrix2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<f64> for ComplexMatrix2 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs.into())
    }
}

impl std::iter::Sum for ComplexMatrix2 {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::zero(), |acc, m| acc + m)
    }
}

// ---------------------------------------------------------------------------
// kets

pub fn ket_norm(v: &Ket) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// `⟨a|b⟩`.
pub fn inner(a: &Ket, b: &Ket) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// The orthogonal direction `(−v̄₁, v̄₀)`.
pub fn complement(v: &Ket) -> Ket {
    [-v[1].conj(), v[0].conj()]
}

/// Rescales to unit norm and rotates the phase so the first nonzero component
/// is real and positive.
pub fn normalize_phase(v: &Ket) -> Ket {
    let n = ket_norm(v);
    let lead = if v[0].norm() > f64::EPSILON * n {
        v[0]
    } else {
        v[1]
    };
    let phase = lead.conj() / lead.norm();
    [v[0] * phase / n, v[1] * phase / n]
}

/// Pure state with the given Bloch direction (need not be normalized).
pub fn ket_from_direction(n: &Bloch) -> Ket {
    let (_, pair) = hermitian_spectrum(0.0, n);
    pair[0].vector
}

/// Bloch vector of a (not necessarily normalized) ket's ray.
pub fn direction_of_ket(v: &Ket) -> Bloch {
    let p = ComplexMatrix2::projector(v);
    let (c0, c) = p.pauli_components();
    c / c0
}

// ---------------------------------------------------------------------------
// states

/// A qubit density matrix together with its Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    matrix: ComplexMatrix2,
    bloch: Bloch,
}

impl QubitState {
    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.matrix
    }

    pub fn bloch(&self) -> &Bloch {
        &self.bloch
    }

    /// Length of the Bloch vector; 1 for pure states.
    pub fn radius(&self) -> f64 {
        self.bloch.norm()
    }

    pub fn maximally_mixed() -> Self {
        QubitState {
            matrix: ComplexMatrix2::identity() * 0.5,
            bloch: Bloch::zeros(),
        }
    }

    /// Validates a density matrix: finite, Hermitian, unit trace, positive.
    pub fn from_matrix(m: ComplexMatrix2) -> Result<Self> {
        m.check_hermitian()?;
        let tr = m.trace();
        let tol = tolerance::herm();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::domain(format!("trace {tr} differs from 1")));
        }
        let (c0, c) = m.pauli_components();
        let lambda_min = c0 - c.norm();
        if lambda_min < -tol {
            return Err(Error::NotPsd(lambda_min));
        }
        Ok(QubitState {
            matrix: m,
            bloch: c / c0,
        })
    }

    pub fn conjugated(&self, u: &ComplexMatrix2) -> Result<Self> {
        Self::from_matrix(self.matrix.sandwich(u))
    }
}

/// `(𝟙 + n⃗·σ⃗)/2`.
pub fn state_from_bloch(n: &Bloch) -> Result<QubitState> {
    if !n.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let r = n.norm();
    if r > 1.0 + tolerance::herm() {
        return Err(Error::BlochNormExceeded(r));
    }
    Ok(QubitState {
        matrix: ComplexMatrix2::from_pauli(0.5, &(n * 0.5)),
        bloch: *n,
    })
}

pub fn bloch_from_state(s: &QubitState) -> Bloch {
    s.bloch
}

// ---------------------------------------------------------------------------
// spectra

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Ket,
}

/// Spectrum of `h₀𝟙 + h⃗·σ⃗`, largest eigenvalue first. Returns `|h⃗|` as well.
fn hermitian_spectrum(h0: f64, h: &Bloch) -> (f64, [EigenPair; 2]) {
    let r = h.x.hypot(h.y).hypot(h.z);
    let top = if r == 0.0 || r <= 4.0 * f64::EPSILON * h0.abs() {
        // Degenerate: the canonical choice |0⟩.
        [ONE, ZERO]
    } else if h.z >= 0.0 {
        normalize_phase(&[C64::new(r + h.z, 0.0), C64::new(h.x, h.y)])
    } else {
        normalize_phase(&[C64::new(h.x, -h.y), C64::new(r - h.z, 0.0)])
    };
    let bottom = normalize_phase(&complement(&top));
    (
        r,
        [
            EigenPair {
                value: h0 + r,
                vector: top,
            },
            EigenPair {
                value: h0 - r,
                vector: bottom,
            },
        ],
    )
}

/// Both eigenpairs of a Hermitian matrix, in decreasing order.
pub fn eigen_decomposition(h: &ComplexMatrix2) -> Result<[EigenPair; 2]> {
    h.check_hermitian()?;
    let (h0, hv) = h.pauli_components();
    Ok(hermitian_spectrum(h0, &hv).1)
}

/// Largest eigenvalue and its unit eigenvector.
///
/// On a degenerate spectrum the eigenvector is `(1, 0)`. Otherwise the vector
/// is phase-fixed so its first nonzero component is real and positive.
pub fn max_eigenpair(h: &ComplexMatrix2) -> Result<EigenPair> {
    Ok(eigen_decomposition(h)?[0])
}

/// Eigenvalues smaller than this multiple of the spectral radius are rounding
/// noise and are snapped to zero before taking square roots.
const SNAP: f64 = 8.0 * f64::EPSILON;

/// Positive square root of a positive semidefinite matrix.
pub fn matrix_sqrt_psd(m: &ComplexMatrix2) -> Result<ComplexMatrix2> {
    m.check_hermitian()?;
    let (h0, h) = m.pauli_components();
    let r = h.x.hypot(h.y).hypot(h.z);
    let (mut hi, mut lo) = (h0 + r, h0 - r);
    if lo < -tolerance::herm() {
        return Err(Error::NotPsd(lo));
    }
    let scale = hi.abs().max(lo.abs());
    if lo.abs() <= SNAP * scale {
        lo = 0.0;
    }
    if hi.abs() <= SNAP * scale {
        hi = 0.0;
    }
    let (s_hi, s_lo) = (hi.max(0.0).sqrt(), lo.max(0.0).sqrt());
    // Coefficient of h⃗·σ⃗ is (s_hi − s_lo)/(2r) = 1/(s_hi + s_lo) when lo ≥ 0.
    let coeff = if s_hi + s_lo == 0.0 {
        0.0
    } else if lo >= 0.0 && h0 - r >= 0.0 {
        1.0 / (s_hi + s_lo)
    } else {
        (s_hi - s_lo) / (2.0 * r)
    };
    Ok(ComplexMatrix2::from_pauli(
        0.5 * (s_hi + s_lo),
        &(h * coeff),
    ))
}

// ---------------------------------------------------------------------------
// polar decomposition

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarDecomposition {
    pub unitary: ComplexMatrix2,
    pub positive: ComplexMatrix2,
}

/// `K = U·P` with `P = √(K†K)`.
///
/// Built from the right singular vectors of `K`: the top one fixes
/// `u₁ = Kv₁/|Kv₁|`, and `u₂` is the complement of `u₁` with the phase of
/// `Kv₂`. When `K` is rank-deficient the phase is chosen so that `⟨v₂|u₂⟩`
/// is real and non-negative, so a positive `K` yields `U = 𝟙`.
pub fn polar_decompose(k: &ComplexMatrix2) -> Result<PolarDecomposition> {
    k.check_finite()?;
    let gram = k.adjoint() * *k;
    let (h0, h) = gram.pauli_components();
    let (_, [top, _]) = hermitian_spectrum(h0, &h);
    let v1 = top.vector;
    let v2 = normalize_phase(&complement(&v1));

    let kv1 = k.apply(&v1);
    let s1 = ket_norm(&kv1);
    if s1 == 0.0 {
        return Ok(PolarDecomposition {
            unitary: ComplexMatrix2::identity(),
            positive: ComplexMatrix2::zero(),
        });
    }
    let u1 = [kv1[0] / s1, kv1[1] / s1];
    let w = complement(&u1);
    let kv2 = k.apply(&v2);
    let proj = inner(&w, &kv2);
    let s2 = proj.norm();
    let u2 = if s2 > 4.0 * f64::EPSILON * s1 {
        let ph = proj / s2;
        [w[0] * ph, w[1] * ph]
    } else {
        let anchor = if inner(&v2, &w).norm() > 1e-12 {
            v2
        } else {
            v1
        };
        let ov = inner(&anchor, &w);
        let ph = if ov.norm() > 0.0 {
            ov.conj() / ov.norm()
        } else {
            ONE
        };
        [w[0] * ph, w[1] * ph]
    };
    let s2 = if s2 > 4.0 * f64::EPSILON * s1 {
        s2
    } else {
        0.0
    };

    let unitary = ComplexMatrix2::outer(&u1, &v1) + ComplexMatrix2::outer(&u2, &v2);
    let positive = ComplexMatrix2::projector(&v1) * s1 + ComplexMatrix2::projector(&v2) * s2;
    Ok(PolarDecomposition { unitary, positive })
}

// ---------------------------------------------------------------------------
// rotations

/// Unitary `exp(−i θ n̂·σ⃗/2)`, which rotates Bloch vectors by `θ` about `n̂`.
pub fn unitary_from_axis_angle(axis: &Bloch, angle: f64) -> ComplexMatrix2 {
    let n = axis.norm();
    if n == 0.0 || angle == 0.0 {
        return ComplexMatrix2::identity();
    }
    let a = axis / n;
    let (s, c) = (0.5 * angle).sin_cos();
    ComplexMatrix2::identity() * c - ComplexMatrix2::from_pauli(0.0, &(a * s)).scale(I)
}

/// The SO(3) rotation `R_ij = ½ Tr(σ_i U σ_j U†)` induced on Bloch vectors.
pub fn rotation_of_unitary(u: &ComplexMatrix2) -> Matrix3<f64> {
    let paulis = [
        ComplexMatrix2::pauli_x(),
        ComplexMatrix2::pauli_y(),
        ComplexMatrix2::pauli_z(),
    ];
    let mut r = Matrix3::zeros();
    for (j, p) in paulis.iter().enumerate() {
        let (_, col) = p.sandwich(u).pauli_components();
        r.set_column(j, &col);
    }
    r
}

/// An SU(2) element inducing the given rotation (sign is arbitrary).
pub fn unitary_from_rotation(r: &Matrix3<f64>) -> ComplexMatrix2 {
    let rot = Rotation3::from_matrix_unchecked(*r);
    let q = UnitQuaternion::from_rotation_matrix(&rot);
    let (w, v) = (q.w, q.imag());
    ComplexMatrix2::identity() * w - ComplexMatrix2::from_pauli(0.0, &v).scale(I)
}

// ---------------------------------------------------------------------------
// binary measurements

/// Two-outcome POVM `{E₀, E₁}` with observable `E₀ − E₁ = c₀𝟙 + c⃗·σ⃗`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryPovm {
    effects: [ComplexMatrix2; 2],
    offset: f64,
    axis: Bloch,
}

impl BinaryPovm {
    pub fn effects(&self) -> &[ComplexMatrix2; 2] {
        &self.effects
    }

    pub fn effect(&self, outcome: usize) -> &ComplexMatrix2 {
        &self.effects[outcome]
    }

    /// `c₀`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `c⃗`.
    pub fn axis(&self) -> &Bloch {
        &self.axis
    }

    /// Sharpness `|c⃗|`.
    pub fn sharpness(&self) -> f64 {
        self.axis.norm()
    }

    /// `E_b = (𝟙 ± (c₀𝟙 + c⃗·σ⃗))/2`; requires `|c⃗| + |c₀| ≤ 1`.
    pub fn from_observable(offset: f64, axis: &Bloch) -> Result<Self> {
        if !offset.is_finite() || !axis.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let excess = axis.norm() + offset.abs() - 1.0;
        if excess > tolerance::herm() {
            return Err(Error::NotPsd(-excess / 2.0));
        }
        let e0 = ComplexMatrix2::from_pauli(0.5 * (1.0 + offset), &(axis * 0.5));
        let e1 = ComplexMatrix2::from_pauli(0.5 * (1.0 - offset), &(axis * -0.5));
        Ok(BinaryPovm {
            effects: [e0, e1],
            offset,
            axis: *axis,
        })
    }

    /// Rank-one projective measurement whose outcome 0 projects onto `v`.
    pub fn projective(v: &Ket) -> Self {
        let n = direction_of_ket(v);
        Self::from_observable(0.0, &n).expect("unit Bloch vector")
    }

    pub fn conjugated(&self, u: &ComplexMatrix2) -> Result<Self> {
        validate_povm(self.effects[0].sandwich(u), self.effects[1].sandwich(u))
    }
}

pub fn validate_povm(e0: ComplexMatrix2, e1: ComplexMatrix2) -> Result<BinaryPovm> {
    let tol = tolerance::herm();
    for e in [&e0, &e1] {
        e.check_hermitian()?;
        let (c0, c) = e.pauli_components();
        let lambda_min = c0 - c.norm();
        if lambda_min < -tol {
            return Err(Error::NotPsd(lambda_min));
        }
    }
    let dev = (e0 + e1 - ComplexMatrix2::identity()).max_abs();
    if dev > tol {
        return Err(Error::CompletenessViolated(dev));
    }
    let (offset, axis) = (e0 - e1).pauli_components();
    Ok(BinaryPovm {
        effects: [e0, e1],
        offset,
        axis,
    })
}
