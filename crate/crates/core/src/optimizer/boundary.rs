//! Numerical trace of the trade-off boundary over the reduced angles.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use super::{reduced_constraint, reduced_objective, OptimizerConfig, ReducedParameters};
use crate::analytics::QRAC_MAX;
use crate::error::{Error, Result};

/// Slack on `cos φ₀ ∈ [0, 1]` after elimination.
const FEASIBILITY_TOL: f64 = 1e-12;
/// Largest allowed mismatch between the attained `W_AB` and the target.
const CONSTRAINT_TOL: f64 = 1e-10;
/// `cos φ` below which Bob's setting carries no information about `θ`.
const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub alpha: f64,
    pub wac: f64,
    pub params: ReducedParameters,
}

/// `φ₀` solving `reduced_constraint = α` for the given `θ, φ₁`, if any.
fn eliminate_phi0(alpha: f64, theta: f64, phi1: f64) -> Option<f64> {
    let (s, c) = (0.5 * theta).sin_cos();
    let cos_phi0 = (8.0 * alpha - 4.0 - 2.0 * s * phi1.cos()) / (2.0 * c);
    if !(-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&cos_phi0) {
        return None;
    }
    Some(cos_phi0.clamp(0.0, 1.0).acos())
}

fn evaluate(alpha: f64, theta: f64, phi1: f64) -> Option<(f64, ReducedParameters)> {
    let phi0 = eliminate_phi0(alpha, theta, phi1)?;
    let params = ReducedParameters { theta, phi0, phi1 };
    Some((reduced_objective(&params), params))
}

/// Maximizes the reduced objective on the slice `reduced_constraint = α`.
///
/// `φ₀` is eliminated exactly, the remaining `(θ, φ₁)` box is grid-searched
/// and the best grid point is polished by a compass search whose step halves
/// down to the configured epsilon.
pub fn boundary_point(alpha: f64, cfg: &OptimizerConfig) -> Result<BoundaryPoint> {
    cfg.validate()?;
    if !alpha.is_finite() || !(0.5..=QRAC_MAX).contains(&alpha) {
        return Err(Error::domain(format!(
            "alpha = {alpha} is outside [1/2, (2+√2)/4]"
        )));
    }
    let n = cfg.grid_resolution;
    let spacing = FRAC_PI_2 / (n - 1) as f64;
    let at = |i: usize| {
        if i + 1 == n {
            FRAC_PI_2
        } else {
            i as f64 * spacing
        }
    };

    let best = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            (0..n)
                .filter_map(|j| evaluate(alpha, at(i), at(j)))
                .max_by(|a, b| a.0.total_cmp(&b.0))
        })
        .max_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(b.1.theta.total_cmp(&a.1.theta))
                .then(b.1.phi1.total_cmp(&a.1.phi1))
        });
    let Some((mut value, mut params)) = best else {
        return Err(Error::ConvergenceFailure(format!(
            "no feasible grid point for alpha = {alpha}"
        )));
    };

    let mut step = spacing;
    let mut iterations = 0;
    while step >= cfg.convergence_epsilon {
        if iterations == cfg.refinement_iterations {
            return Err(Error::ConvergenceFailure(format!(
                "refinement at alpha = {alpha} stalled with step {step:e}"
            )));
        }
        iterations += 1;
        let mut improved = false;
        for (dt, dp) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let theta = (params.theta + dt * step).clamp(0.0, FRAC_PI_2);
            let phi1 = (params.phi1 + dp * step).clamp(0.0, FRAC_PI_2);
            if let Some((v, p)) = evaluate(alpha, theta, phi1) {
                if v > value {
                    value = v;
                    params = p;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    // With both Bob angles at π/2 the slice no longer depends on θ; report
    // the symmetric choice.
    if params.phi0.cos() < DEGENERATE_TOL && params.phi1.cos() < DEGENERATE_TOL {
        if let Some((v, p)) = evaluate(alpha, FRAC_PI_2, params.phi1) {
            value = v;
            params = p;
        }
    }

    let residual = (reduced_constraint(&params) - alpha).abs();
    if residual > CONSTRAINT_TOL {
        return Err(Error::ConvergenceFailure(format!(
            "constraint residual {residual:e} at alpha = {alpha}"
        )));
    }
    Ok(BoundaryPoint {
        alpha,
        wac: value,
        params,
    })
}

/// [`boundary_point`] for each `α`, in order.
pub fn trace_boundary(alphas: &[f64], cfg: &OptimizerConfig) -> Result<Vec<BoundaryPoint>> {
    alphas.par_iter().map(|&a| boundary_point(a, cfg)).collect()
}
