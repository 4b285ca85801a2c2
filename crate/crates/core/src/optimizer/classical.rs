//! Exhaustive enumeration of deterministic one-bit classical strategies.

use std::collections::BTreeSet;

use crate::scenario::WitnessPair;
use crate::strategies::{ClassicalCounts, ClassicalStrategy};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSummary {
    pub max_w_ab: f64,
    pub max_w_ac: f64,
    /// Largest success counts, out of 8 and 16.
    pub max_counts: ClassicalCounts,
    /// Every attainable count pair, sorted.
    pub attainable: Vec<ClassicalCounts>,
    /// Vertices of the convex hull of the attainable pairs, counter-clockwise
    /// from the lowest-left point.
    pub extremes: Vec<WitnessPair>,
    pub strategies: u32,
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain on integer points; collinear points are dropped.
fn hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    if points.len() < 3 {
        return points.to_vec();
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in points {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in points.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Enumerates all `16⁴` strategies with exact integer success counts.
pub fn classical_bruteforce() -> ClassicalSummary {
    let attainable: BTreeSet<ClassicalCounts> = (0..ClassicalStrategy::COUNT)
        .map(|i| ClassicalStrategy::from_index(i).counts())
        .collect();
    let max_ab = attainable.iter().map(|c| c.ab).max().unwrap_or(0);
    let max_ac = attainable.iter().map(|c| c.ac).max().unwrap_or(0);

    // common denominator 16
    let points: Vec<(i64, i64)> = attainable
        .iter()
        .map(|c| (2 * c.ab as i64, c.ac as i64))
        .collect();
    let extremes = hull(&points)
        .into_iter()
        .map(|(a, c)| WitnessPair::new(a as f64 / 16.0, c as f64 / 16.0))
        .collect();

    let max_counts = ClassicalCounts {
        ab: max_ab,
        ac: max_ac,
    };
    let max = max_counts.witness_pair();
    ClassicalSummary {
        max_w_ab: max.w_ab,
        max_w_ac: max.w_ac,
        max_counts,
        attainable: attainable.into_iter().collect(),
        extremes,
        strategies: ClassicalStrategy::COUNT,
    }
}
