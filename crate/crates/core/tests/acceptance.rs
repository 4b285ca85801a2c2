//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero when any of them fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use seqrac_core::analytics::{
    boundary_wac, certify_interval, in_quantum_set_with_slack, selftest_report, sharpness_lower,
    sharpness_upper, QRAC_MAX,
};
use seqrac_core::optimizer::{
    classical_bruteforce, run_inequality_checks, seesaw, trace_boundary, OptimizerConfig,
};
use seqrac_core::qubit::{
    eigen_decomposition, rotation_of_unitary, unitary_from_axis_angle, BinaryPovm, Bloch,
    ComplexMatrix2,
};
use seqrac_core::random::{random_strategy, random_unitary, stream_rng};
use seqrac_core::report::{format_reported, round_reported};
use seqrac_core::scenario::{
    witness_ab, witness_pair, BinaryInstrument, PreparationEnsemble, Strategy, WitnessPair,
};
use seqrac_core::sequence::{party_witness_closed_form, simulate_chain, ChainConfig};
use seqrac_core::strategies::{apply_visibility, canonical_strategy, VisibilityTriple};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn alpha_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| {
            if i + 1 == points {
                QRAC_MAX
            } else {
                0.5 + (QRAC_MAX - 0.5) * i as f64 / (points - 1) as f64
            }
        })
        .collect()
}

fn canonical_law(eta: f64) -> (f64, f64) {
    (
        0.5 * (1.0 + eta / SQRT_2),
        0.25 * (2.0 + (1.0 + (1.0 - eta * eta).sqrt()) / SQRT_2),
    )
}

fn optimal_qrac() -> Outcome {
    let w = witness_ab(&canonical_strategy(1.0).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let err = (w - (2.0 + SQRT_2) / 4.0).abs();
    ensure(err <= 1e-12, || format!("W_AB = {w}, error {err:e}"))?;
    Ok(format!("W_AB = {w:.15}, error {err:.1e}"))
}

fn parametric_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let eta = i as f64 / 100.0;
        let w = witness_pair(&canonical_strategy(eta).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let (ab, ac) = canonical_law(eta);
        worst = worst.max((w.w_ab - ab).abs()).max((w.w_ac - ac).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("101 sharpness values, max deviation {worst:.1e}"))
}

fn boundary_trace() -> Outcome {
    let alphas = alpha_grid(21);
    let points = trace_boundary(&alphas, &OptimizerConfig::default()).map_err(|e| e.to_string())?;
    let (mut gap, mut angle): (f64, f64) = (0.0, 0.0);
    for p in &points {
        let exact = boundary_wac(p.alpha).map_err(|e| e.to_string())?;
        gap = gap.max((p.wac - exact).abs());
        angle = angle
            .max((p.params.theta - FRAC_PI_2).abs())
            .max((p.params.phi0 - p.params.phi1).abs());
    }
    ensure(gap <= 1e-6 && angle <= 1e-4, || {
        format!("max value gap {gap:e}, max angle defect {angle:e}")
    })?;
    Ok(format!(
        "21 points, max value gap {gap:.1e}, max angle defect {angle:.1e}"
    ))
}

fn psd(m: &ComplexMatrix2) -> Result<bool, String> {
    let [_, low] = eigen_decomposition(m).map_err(|e| e.to_string())?;
    Ok(m.hermitian_deviation() <= 1e-9 && low.value >= -1e-9)
}

fn check_valid(s: &Strategy) -> Result<(), String> {
    for (x, st) in s.preparations().states().iter().enumerate() {
        let m = st.matrix();
        let trace_ok = (m.trace().re - 1.0).abs() <= 1e-9 && m.trace().im.abs() <= 1e-9;
        ensure(trace_ok && psd(m)?, || {
            format!("preparations[{x}] is not a state")
        })?;
    }
    for (y, inst) in s.instruments().iter().enumerate() {
        let total: ComplexMatrix2 = (0..2)
            .flat_map(|b| inst.kraus(b).iter().map(|k| k.adjoint() * *k))
            .sum();
        ensure(
            (total - ComplexMatrix2::identity()).max_abs() <= 1e-9,
            || format!("instruments[{y}] is not complete"),
        )?;
    }
    for (z, m) in s.measurements().iter().enumerate() {
        let [e0, e1] = m.effects();
        ensure(
            psd(e0)? && psd(e1)? && (*e0 + *e1 - ComplexMatrix2::identity()).max_abs() <= 1e-9,
            || format!("measurements[{z}] is not a POVM"),
        )?;
    }
    Ok(())
}

fn seesaw_attainability() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut lines = Vec::new();
    for alpha in [0.55, 0.65, 0.75, 0.85] {
        let out = seesaw(alpha, &cfg).map_err(|e| format!("alpha {alpha}: {e}"))?;
        check_valid(&out.strategy).map_err(|e| format!("alpha {alpha}: {e}"))?;
        let recomputed = witness_pair(&out.strategy).map_err(|e| e.to_string())?;
        let bound = boundary_wac(alpha).map_err(|e| e.to_string())?;
        let gap = bound - recomputed.w_ac;
        ensure(
            (recomputed.w_ab - alpha).abs() <= 1e-9 && (-1e-7..=1e-3).contains(&gap),
            || {
                format!(
                    "alpha {alpha}: W_AB = {}, W_AC = {}, bound {bound}",
                    recomputed.w_ab, recomputed.w_ac
                )
            },
        )?;
        lines.push(format!("{alpha}: gap {gap:.1e}"));
    }
    Ok(lines.join(", "))
}

fn classical_bound() -> Outcome {
    let s = classical_bruteforce();
    ensure(
        s.strategies == 65536
            && s.max_w_ab == 0.75
            && s.max_w_ac == 0.75
            && s.attainable
                .iter()
                .any(|c| c.witness_pair() == WitnessPair::new(0.75, 0.75)),
        || {
            format!(
                "{} strategies, maxima ({}, {})",
                s.strategies, s.max_w_ab, s.max_w_ac
            )
        },
    )?;
    Ok(format!(
        "{} strategies, maxima ({}, {}), (3/4, 3/4) attainable",
        s.strategies, s.max_w_ab, s.max_w_ac
    ))
}

fn noise_example() -> Outcome {
    let ideal = canonical_strategy(FRAC_1_SQRT_2).map_err(|e| e.to_string())?;
    let v = VisibilityTriple::new(0.95, 0.90, 0.95).map_err(|e| e.to_string())?;
    let noisy = apply_visibility(&ideal, &v).map_err(|e| e.to_string())?;
    let w = witness_pair(&noisy).map_err(|e| e.to_string())?;
    let reported = WitnessPair::new(round_reported(w.w_ab, 4), round_reported(w.w_ac, 4));
    let interval = certify_interval(&reported)
        .map_err(|e| e.to_string())?
        .rounded(4);
    let text = format!(
        "({}, {}) -> [{}, {}]",
        format_reported(w.w_ab, 4),
        format_reported(w.w_ac, 4),
        format_reported(interval.lower, 4),
        format_reported(interval.upper, 4)
    );
    ensure(text == "(0.7138, 0.7826) -> [0.6047, 0.8010]", || {
        text.clone()
    })?;
    Ok(text)
}

fn sharpness_tightness() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in alpha_grid(21) {
        let lo = sharpness_lower(alpha).map_err(|e| e.to_string())?;
        let hi = sharpness_upper(boundary_wac(alpha).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        worst = worst.max((lo - hi).abs());
    }
    ensure(worst <= 1e-9, || format!("max mismatch {worst:e}"))?;
    Ok(format!("21 points, max mismatch {worst:.1e}"))
}

fn inequalities() -> Outcome {
    let r = run_inequality_checks(10_000, 100, 2024).map_err(|e| e.to_string())?;
    let v = r.violations();
    ensure(v.is_empty() && r.lemma1_points >= 1_000_000, || {
        v.join("; ")
    })?;
    Ok(format!(
        "operator excess {:.1e} ({} aligned, gap {:.1e}), trig max {:.15}, eigenvalue residuals {:.1e}/{:.1e}",
        r.lemma2_max_excess,
        r.lemma2_equality_cases,
        r.lemma2_equality_max_gap,
        r.lemma1_max,
        r.tt_pair_max_residual,
        r.tt_term_max_residual
    ))
}

fn sequence_law() -> Outcome {
    let steps = simulate_chain(&ChainConfig::sharp(10).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for s in &steps {
        let k = s.party as u32;
        let law = party_witness_closed_form(k).map_err(|e| e.to_string())?;
        let radius = 2f64.powi(1 - k as i32);
        worst = worst
            .max((s.witness - law).abs())
            .max((s.radius - radius).abs());
    }
    ensure(steps.len() == 10 && worst <= 1e-12, || {
        format!("max deviation {worst:e}")
    })?;
    Ok(format!("10 parties, max deviation {worst:.1e}"))
}

fn rotate(v: &Bloch, axis: &Bloch, angle: f64) -> Bloch {
    rotation_of_unitary(&unitary_from_axis_angle(axis, angle)) * v
}

fn with_prep(s: &Strategy, x: usize, n: Bloch) -> Result<Strategy, String> {
    let mut vs = s.preparations().blochs();
    vs[x] = n;
    Ok(s.with_preparations(PreparationEnsemble::from_bloch(&vs).map_err(|e| e.to_string())?))
}

fn with_instrument(s: &Strategy, y: usize, inst: BinaryInstrument) -> Strategy {
    let mut all = s.instruments().clone();
    all[y] = inst;
    s.with_instruments(all)
}

fn with_measurement(s: &Strategy, z: usize, m: BinaryPovm) -> Strategy {
    let mut all = *s.measurements();
    all[z] = m;
    s.with_measurements(all)
}

/// Every single-component perturbation of size `eps` of the canonical strategy.
fn perturbations(s: &Strategy, eps: f64) -> Result<Vec<(String, Strategy)>, String> {
    let e = |err: seqrac_core::Error| err.to_string();
    let mut out = Vec::new();
    for (x, n) in s.preparations().blochs().iter().enumerate() {
        out.push((
            format!("prep {x} shrunk"),
            with_prep(s, x, n * (1.0 - eps))?,
        ));
        out.push((
            format!("prep {x} tilted"),
            with_prep(s, x, rotate(n, &Bloch::y(), eps))?,
        ));
        let out_of_plane = n.cross(&Bloch::y()).normalize();
        out.push((
            format!("prep {x} lifted"),
            with_prep(s, x, rotate(n, &out_of_plane, eps))?,
        ));
    }
    for (y, inst) in s.instruments().iter().enumerate() {
        let povm = inst.povm();
        let variants = [
            (
                "tilted",
                BinaryPovm::from_observable(0.0, &rotate(povm.axis(), &Bloch::y(), eps)),
            ),
            (
                "biased",
                BinaryPovm::from_observable(eps, &(povm.axis() * (1.0 - eps))),
            ),
            (
                "softened",
                BinaryPovm::from_observable(0.0, &(povm.axis() * (1.0 - eps))),
            ),
        ];
        for (name, m) in variants {
            let inst = BinaryInstrument::lueders(&m.map_err(e)?);
            out.push((
                format!("instrument {y} {name}"),
                with_instrument(s, y, inst),
            ));
        }
        let twist = unitary_from_axis_angle(&Bloch::y(), eps);
        let inst = BinaryInstrument::with_unitaries(povm, [twist, ComplexMatrix2::identity()])
            .map_err(e)?;
        out.push((
            format!("instrument {y} twisted"),
            with_instrument(s, y, inst),
        ));
    }
    for (z, m) in s.measurements().iter().enumerate() {
        let variants = [
            (
                "tilted",
                BinaryPovm::from_observable(0.0, &rotate(m.axis(), &Bloch::y(), eps)),
            ),
            (
                "biased",
                BinaryPovm::from_observable(eps, &(m.axis() * (1.0 - eps))),
            ),
            (
                "softened",
                BinaryPovm::from_observable(0.0, &(m.axis() * (1.0 - eps))),
            ),
        ];
        for (name, m) in variants {
            out.push((
                format!("measurement {z} {name}"),
                with_measurement(s, z, m.map_err(e)?),
            ));
        }
    }
    Ok(out)
}

fn self_test() -> Outcome {
    let mut rng = stream_rng(7, 0);
    let mut ideal_worst: f64 = 0.0;
    let mut perturbed_least = f64::INFINITY;
    let mut cases = 0;
    for eta in [0.25, 0.5, FRAC_1_SQRT_2, 0.8, 0.95, 1.0] {
        let base = canonical_strategy(eta).map_err(|e| e.to_string())?;
        let mut frames = vec![ComplexMatrix2::identity()];
        frames.extend((0..3).map(|_| random_unitary(&mut rng)));
        for v in &frames {
            let s = base.conjugated(v).map_err(|e| e.to_string())?;
            let r = selftest_report(&s).map_err(|e| e.to_string())?;
            ideal_worst = ideal_worst.max(r.max_defect());
            for (name, p) in perturbations(&s, 1e-2)? {
                let d = selftest_report(&p).map_err(|e| e.to_string())?.max_defect();
                ensure(d > 1e-9, || format!("eta {eta}: {name} left defect {d:e}"))?;
                perturbed_least = perturbed_least.min(d);
                cases += 1;
            }
        }
    }
    ensure(ideal_worst <= 1e-9, || {
        format!("ideal defect {ideal_worst:e}")
    })?;
    Ok(format!(
        "ideal max defect {ideal_worst:.1e}; {cases} perturbations, smallest defect {perturbed_least:.1e}"
    ))
}

fn soundness() -> Outcome {
    let n: u64 = 100_000;
    let bad: Vec<(u64, WitnessPair)> = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let s = random_strategy(&mut stream_rng(99, i));
            let w = witness_pair(&s).ok()?;
            (!in_quantum_set_with_slack(&w, 1e-7)).then_some((i, w))
        })
        .collect();
    ensure(bad.is_empty(), || {
        format!("{} violations, first {:?}", bad.len(), bad.first())
    })?;
    Ok(format!("{n} random strategies inside the boundary"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("optimal QRAC value", Duration::from_millis(1), optimal_qrac),
        (
            "parametric strategy law",
            Duration::from_millis(100),
            parametric_law,
        ),
        ("boundary trace", Duration::from_secs(60), boundary_trace),
        (
            "see-saw attainability",
            Duration::from_secs(120),
            seesaw_attainability,
        ),
        ("classical bound", Duration::from_secs(5), classical_bound),
        ("noise example", Duration::from_millis(1), noise_example),
        (
            "sharpness bound tightness",
            Duration::from_millis(100),
            sharpness_tightness,
        ),
        (
            "boundary inequalities",
            Duration::from_secs(60),
            inequalities,
        ),
        ("sequence law", Duration::from_secs(1), sequence_law),
        (
            "self-test characterization",
            Duration::from_secs(1),
            self_test,
        ),
        ("quantum set soundness", Duration::from_secs(120), soundness),
    ];

    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(d) => (false, d),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "[{}] AC-{} {name}: {detail} ({elapsed:.2?})",
            if ok { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
