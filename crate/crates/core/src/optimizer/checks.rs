//! Samplers for the operator and trigonometric inequalities behind the
//! boundary, and the closed-form eigenvalues they rest on.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qubit::{
    matrix_sqrt_psd, max_eigenpair, validate_povm, BinaryPovm, Bloch, ComplexMatrix2,
};
use crate::random::{random_ball_vector, random_povm, random_unit_vector, stream_rng};

pub const LEMMA2_TOL: f64 = 1e-9;
pub const LEMMA1_TOL: f64 = 1e-12;
pub const TT_TOL: f64 = 1e-10;
/// Threshold on `|c⃗|²(1 − (ĉ·â)²)` below which equality is expected.
const ALIGNMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Sample {
    /// `Σ_b λ_max[√M_b (a⃗·σ⃗) √M_b]`.
    pub lhs: f64,
    /// `|a⃗|`.
    pub rhs: f64,
    /// Set when `a⃗` lies along the POVM axis (or the POVM is trivial), the
    /// case in which the two sides coincide.
    pub equality_flag: bool,
}

impl Lemma2Sample {
    pub fn excess(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// `λ_max[√M_b (a⃗·σ⃗) √M_b]` by direct eigensolve.
pub fn sandwiched_max_eigenvalue(povm: &BinaryPovm, outcome: usize, a: &Bloch) -> Result<f64> {
    let root = matrix_sqrt_psd(povm.effect(outcome))?;
    let h = ComplexMatrix2::from_pauli(0.0, a).sandwich(&root);
    Ok(max_eigenpair(&h)?.value)
}

pub fn lemma2_sample(povm: &BinaryPovm, a: &Bloch) -> Result<Lemma2Sample> {
    if !a.iter().all(|v| v.is_finite()) {
        return Err(Error::domain("vector a has non-finite entries"));
    }
    validate_povm(povm.effects()[0], povm.effects()[1])
        .map_err(|e| Error::InvalidPovm(e.to_string()))?;
    let lhs = sandwiched_max_eigenvalue(povm, 0, a)? + sandwiched_max_eigenvalue(povm, 1, a)?;
    let rhs = a.norm();
    let c = povm.axis();
    let transverse = c.norm_squared() * a.norm_squared() - c.dot(a).powi(2);
    let equality_flag = rhs == 0.0 || transverse <= ALIGNMENT_TOL * a.norm_squared();
    Ok(Lemma2Sample {
        lhs,
        rhs,
        equality_flag,
    })
}

/// `cos θ (cos²φ₀ − cos²φ₁) + sin θ cos(φ₀ − φ₁)`, which never exceeds 1.
pub fn lemma1_fin_check(theta: f64, phi0: f64, phi1: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("theta = {theta} is outside [0, π]")));
    }
    for (name, v) in [("phi0", phi0), ("phi1", phi1)] {
        if !(0.0..=FRAC_PI_2).contains(&v) {
            return Err(Error::domain(format!("{name} = {v} is outside [0, π/2]")));
        }
    }
    let (c0, c1) = (phi0.cos(), phi1.cos());
    Ok(theta.cos() * (c0 * c0 - c1 * c1) + theta.sin() * (phi0 - phi1).cos())
}

fn radicand(c0: f64, c: &Bloch, a: &Bloch, b: usize) -> f64 {
    let s = if b == 0 { 1.0 } else { -1.0 };
    let a2 = a.norm_squared();
    ((1.0 + s * c0).powi(2) * a2 - c.norm_squared() * a2 + c.dot(a).powi(2)).max(0.0)
}

/// Per-outcome closed form
/// `λ_max[√M_b (a⃗·σ⃗) √M_b] = (−1)^b (c⃗·a⃗)/2 + ½√((1 ± c₀)²|a⃗|² − |c⃗|²|a⃗|² + (c⃗·a⃗)²)`.
pub fn tt_term(c0: f64, c: &Bloch, a: &Bloch, outcome: usize) -> f64 {
    let s = if outcome == 0 { 1.0 } else { -1.0 };
    0.5 * s * c.dot(a) + 0.5 * radicand(c0, c, a, outcome).sqrt()
}

/// Sum over both outcomes:
/// `(|a⃗|/2) Σ_± √((1 ± c₀)² − |c⃗|²(1 − (ĉ·â)²))`.
pub fn tt_pair_sum(c0: f64, c: &Bloch, a: &Bloch) -> f64 {
    0.5 * (radicand(c0, c, a, 0).sqrt() + radicand(c0, c, a, 1).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InequalityReport {
    pub lemma2_samples: usize,
    /// `max (lhs − rhs)`.
    pub lemma2_max_excess: f64,
    /// `max |lhs − rhs|` over samples flagged as equality cases.
    pub lemma2_equality_max_gap: f64,
    pub lemma2_equality_cases: usize,
    pub lemma1_points: usize,
    pub lemma1_max: f64,
    pub tt_samples: usize,
    /// Largest gap between the two-outcome closed form and eigensolves.
    pub tt_pair_max_residual: f64,
    /// Largest gap between the per-outcome closed form and eigensolves.
    pub tt_term_max_residual: f64,
}

impl InequalityReport {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.lemma2_max_excess > LEMMA2_TOL {
            v.push(format!(
                "operator inequality exceeded by {:e}",
                self.lemma2_max_excess
            ));
        }
        if self.lemma2_equality_max_gap > LEMMA2_TOL {
            v.push(format!(
                "aligned case misses equality by {:e}",
                self.lemma2_equality_max_gap
            ));
        }
        if self.lemma1_max > 1.0 + LEMMA1_TOL {
            v.push(format!(
                "trigonometric inequality reaches {}",
                self.lemma1_max
            ));
        }
        if self.tt_pair_max_residual > TT_TOL || self.tt_term_max_residual > TT_TOL {
            v.push(format!(
                "closed-form eigenvalue residual {:e} / {:e}",
                self.tt_pair_max_residual, self.tt_term_max_residual
            ));
        }
        v
    }
}

/// Samples the operator inequality and the eigenvalue closed forms `samples`
/// times each, and scans the trigonometric inequality on a `grid³` lattice.
/// Every tenth operator sample places `a⃗` along the POVM axis.
pub fn run_inequality_checks(samples: usize, grid: usize, seed: u64) -> Result<InequalityReport> {
    if grid < 2 {
        return Err(Error::domain("grid must have at least 2 points per axis"));
    }
    let mut report = InequalityReport {
        lemma2_samples: samples,
        lemma2_max_excess: f64::NEG_INFINITY,
        tt_samples: samples,
        ..Default::default()
    };
    let mut rng = stream_rng(seed, 0);
    for i in 0..samples {
        let povm = random_povm(&mut rng);
        let scale = 2.0 * rng.random::<f64>();
        let a = if i % 10 == 0 {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            match povm.axis().try_normalize(1e-12) {
                Some(c) => c * (sign * scale),
                None => random_ball_vector(&mut rng) * scale,
            }
        } else {
            random_ball_vector(&mut rng) * scale
        };
        let s = lemma2_sample(&povm, &a)?;
        report.lemma2_max_excess = report.lemma2_max_excess.max(s.excess());
        if s.equality_flag {
            report.lemma2_equality_cases += 1;
            report.lemma2_equality_max_gap = report.lemma2_equality_max_gap.max(s.excess().abs());
        }

        let m = random_unit_vector(&mut rng);
        let direct = [
            sandwiched_max_eigenvalue(&povm, 0, &m)?,
            sandwiched_max_eigenvalue(&povm, 1, &m)?,
        ];
        let (c0, c) = (povm.offset(), povm.axis());
        let pair = tt_pair_sum(c0, c, &m);
        report.tt_pair_max_residual = report
            .tt_pair_max_residual
            .max((pair - direct[0] - direct[1]).abs());
        for (b, d) in direct.iter().enumerate() {
            report.tt_term_max_residual = report
                .tt_term_max_residual
                .max((tt_term(c0, c, &m, b) - d).abs());
        }
    }
    if samples == 0 {
        report.lemma2_max_excess = 0.0;
    }

    let at = |i: usize, top: f64| {
        if i + 1 == grid {
            top
        } else {
            top * i as f64 / (grid - 1) as f64
        }
    };
    report.lemma1_max = (0..grid)
        .into_par_iter()
        .map(|i| {
            let theta = at(i, PI);
            let mut best = f64::NEG_INFINITY;
            for j in 0..grid {
                for k in 0..grid {
                    let v = lemma1_fin_check(theta, at(j, FRAC_PI_2), at(k, FRAC_PI_2))
                        .expect("grid inside the domain");
                    best = best.max(v);
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    report.lemma1_points = grid * grid * grid;
    Ok(report)
}
