use std::fs;
use std::io::{self, Write};
use std::path::Path;

use seqrac_core::analytics::{
    boundary_wac, certify_interval, in_classical_set, in_quantum_set, CLASSICAL_MAX, QRAC_MAX,
};
use seqrac_core::optimizer::{
    boundary_point, classical_bruteforce, run_inequality_checks, seesaw, OptimizerConfig,
};
use seqrac_core::report::{fmt_sig17, format_reported, round_reported};
use seqrac_core::scenario::{distribution, effective_ensemble, witness_pair, WitnessPair};
use seqrac_core::sequence::{chain_closed_form, simulate_chain, ChainConfig};
use seqrac_core::strategies::{
    apply_visibility, canonical_strategy, classical_to_strategy, ClassicalStrategy,
    VisibilityTriple,
};
use seqrac_core::Error;

use crate::document::{DocumentError, StrategyDocument};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Core(Error),
    Io(io::Error),
    Inequality(Vec<String>),
    /// Some rows were written but at least one point failed to converge.
    PartialConvergence(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::Domain(_) => 2,
                Error::ConvergenceFailure(_) => 4,
                Error::InfeasiblePair { .. } => 5,
                _ => 3,
            },
            CliError::PartialConvergence(_) => 4,
            CliError::Inequality(_) => 6,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Parse(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Inequality(v) => write!(f, "inequality violated: {}", v.join("; ")),
            CliError::PartialConvergence(n) => write!(f, "{n} point(s) failed to converge"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

impl From<DocumentError> for CliError {
    fn from(e: DocumentError) -> Self {
        CliError::Parse(e.to_string())
    }
}

pub type CliResult = Result<(), CliError>;

fn r6(v: f64) -> String {
    format_reported(v, 6)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn write_membership(out: &mut dyn Write, w: &WitnessPair) -> io::Result<()> {
    writeln!(out, "in quantum set:   {}", yes_no(in_quantum_set(w)))?;
    writeln!(out, "in classical set: {}", yes_no(in_classical_set(w)))
}

fn write_interval(out: &mut dyn Write, w: &WitnessPair) -> CliResult {
    let interval = certify_interval(w)?;
    writeln!(
        out,
        "sharpness interval: [{}, {}]",
        fmt_sig17(interval.lower),
        fmt_sig17(interval.upper)
    )?;
    let r = interval.rounded(4);
    writeln!(
        out,
        "rounded:            [{}, {}]",
        format_reported(r.lower, 4),
        format_reported(r.upper, 4)
    )?;
    Ok(())
}

/// Opens `path` for writing, or stdout when absent.
fn sink<'a>(
    path: Option<&Path>,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(stdout),
    })
}

pub fn evaluate(path: &Path, out: &mut dyn Write) -> CliResult {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let doc = StrategyDocument::parse(&text)?;
    let s = doc.to_strategy()?;
    let w = witness_pair(&s)?;

    writeln!(out, "w_ab = {}", r6(w.w_ab))?;
    writeln!(out, "w_ac = {}", r6(w.w_ac))?;
    writeln!(out)?;
    writeln!(out, "distribution p(b, c | x, y, z), x = 2*x0 + x1")?;
    writeln!(out, "x y z b c  p")?;
    let p = distribution(&s);
    for (x, px) in p.iter().enumerate() {
        for (y, py) in px.iter().enumerate() {
            for (z, pz) in py.iter().enumerate() {
                for (b, pb) in pz.iter().enumerate() {
                    for (c, v) in pb.iter().enumerate() {
                        writeln!(out, "{x} {y} {z} {b} {c}  {}", r6(*v))?;
                    }
                }
            }
        }
    }
    writeln!(out)?;
    writeln!(
        out,
        "effective ensemble (Bloch vectors reaching the last party)"
    )?;
    for (x, n) in effective_ensemble(&s)?.blochs().iter().enumerate() {
        writeln!(out, "x = {x}: ({}, {}, {})", r6(n.x), r6(n.y), r6(n.z))?;
    }
    writeln!(out)?;
    write_membership(out, &w)?;
    if let Ok(interval) = certify_interval(&w) {
        writeln!(
            out,
            "sharpness interval: [{}, {}]",
            r6(interval.lower),
            r6(interval.upper)
        )?;
    }
    Ok(())
}

pub struct BoundaryArgs<'a> {
    pub points: usize,
    pub out: Option<&'a Path>,
    pub with_seesaw: bool,
    pub generic: bool,
    pub restarts: usize,
    pub seed: u64,
}

pub fn boundary(args: &BoundaryArgs, stdout: &mut dyn Write) -> CliResult {
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let cfg = OptimizerConfig {
        seesaw_restarts: args.restarts,
        rng_seed: args.seed,
        generic_seesaw: args.generic,
        ..OptimizerConfig::default()
    };
    cfg.validate()?;
    let n = args.points;
    let mut alphas: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                QRAC_MAX
            } else {
                0.5 + (QRAC_MAX - 0.5) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    // The classical threshold is never on the uniform grid; always report it.
    if !alphas.contains(&CLASSICAL_MAX) {
        let at = alphas.partition_point(|&a| a < CLASSICAL_MAX);
        alphas.insert(at, CLASSICAL_MAX);
    }

    let mut header = vec![
        "alpha",
        "wac_closed_form",
        "wac_numeric",
        "gap",
        "theta",
        "phi",
    ];
    if args.with_seesaw {
        header.extend(["wab_seesaw", "wac_seesaw", "seesaw_gap"]);
    }
    header.push("status");

    let mut failures = 0;
    let mut max_gap: f64 = 0.0;
    let mut w = csv::Writer::from_writer(sink(args.out, stdout)?);
    w.write_record(&header)?;
    for &alpha in &alphas {
        let exact = boundary_wac(alpha)?;
        let mut row = vec![fmt_sig17(alpha), fmt_sig17(exact)];
        let mut status = Vec::new();
        match boundary_point(alpha, &cfg) {
            Ok(p) => {
                let gap = (exact - p.wac).abs();
                max_gap = max_gap.max(gap);
                row.extend([p.wac, gap, p.params.theta, p.params.phi0].map(fmt_sig17));
            }
            Err(e) => {
                failures += 1;
                row.extend(std::iter::repeat_n(String::new(), 4));
                status.push(format!("boundary: {e}"));
            }
        }
        if args.with_seesaw {
            match seesaw(alpha, &cfg) {
                Ok(s) => row.extend(
                    [s.witnesses.w_ab, s.witnesses.w_ac, exact - s.witnesses.w_ac].map(fmt_sig17),
                ),
                Err(e) => {
                    failures += 1;
                    row.extend(std::iter::repeat_n(String::new(), 3));
                    status.push(format!("seesaw: {e}"));
                }
            }
        }
        row.push(if status.is_empty() {
            "ok".into()
        } else {
            status.join("; ")
        });
        w.write_record(&row)?;
    }
    w.flush()?;
    drop(w);
    if let Some(p) = args.out {
        writeln!(
            stdout,
            "wrote {} rows to {}; max gap {}",
            alphas.len(),
            p.display(),
            fmt_sig17(max_gap)
        )?;
    }
    if failures > 0 {
        return Err(CliError::PartialConvergence(failures));
    }
    Ok(())
}

pub fn certify(w_ab: f64, w_ac: f64, out: &mut dyn Write) -> CliResult {
    let w = WitnessPair::new(w_ab, w_ac);
    writeln!(
        out,
        "witness pair: ({}, {})",
        fmt_sig17(w_ab),
        fmt_sig17(w_ac)
    )?;
    write_interval(out, &w)?;
    write_membership(out, &w)?;
    Ok(())
}

pub fn noise(eta: f64, v: [f64; 3], out: &mut dyn Write) -> CliResult {
    let visibility = VisibilityTriple::new(v[0], v[1], v[2])?;
    let noisy = apply_visibility(&canonical_strategy(eta)?, &visibility)?;
    let w = witness_pair(&noisy)?;
    writeln!(
        out,
        "eta = {}, visibilities = ({}, {}, {})",
        r6(eta),
        r6(v[0]),
        r6(v[1]),
        r6(v[2])
    )?;
    writeln!(
        out,
        "w_ab = {} ({})",
        r6(w.w_ab),
        format_reported(w.w_ab, 4)
    )?;
    writeln!(
        out,
        "w_ac = {} ({})",
        r6(w.w_ac),
        format_reported(w.w_ac, 4)
    )?;
    let reported = WitnessPair::new(round_reported(w.w_ab, 4), round_reported(w.w_ac, 4));
    writeln!(
        out,
        "certifying the reported pair ({}, {})",
        format_reported(reported.w_ab, 4),
        format_reported(reported.w_ac, 4)
    )?;
    write_interval(out, &reported)?;
    write_membership(out, &w)?;
    Ok(())
}

pub fn sequence(profile: Vec<f64>, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult {
    let cfg = ChainConfig::new(profile)?;
    let steps = simulate_chain(&cfg)?;
    let law = chain_closed_form(&cfg);
    let mut w = csv::Writer::from_writer(sink(out, stdout)?);
    w.write_record(["k", "witness", "radius", "closed_form", "diff"])?;
    for (s, closed) in steps.iter().zip(law) {
        w.write_record([
            s.party.to_string(),
            fmt_sig17(s.witness),
            fmt_sig17(s.radius),
            fmt_sig17(closed),
            fmt_sig17((s.witness - closed).abs()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn classical(out: &mut dyn Write) -> CliResult {
    let s = classical_bruteforce();
    writeln!(out, "deterministic strategies: {}", s.strategies)?;
    writeln!(out, "max w_ab = {} ({}/8)", r6(s.max_w_ab), s.max_counts.ab)?;
    writeln!(
        out,
        "max w_ac = {} ({}/16)",
        r6(s.max_w_ac),
        s.max_counts.ac
    )?;
    writeln!(out, "attainable pairs: {}", s.attainable.len())?;
    writeln!(out, "extreme points:")?;
    for p in &s.extremes {
        writeln!(out, "  ({}, {})", r6(p.w_ab), r6(p.w_ac))?;
    }
    Ok(())
}

pub fn checks(samples: usize, grid: usize, seed: u64, out: &mut dyn Write) -> CliResult {
    let r = run_inequality_checks(samples, grid, seed)?;
    writeln!(out, "seed: {seed}")?;
    writeln!(
        out,
        "operator inequality: {} samples, max excess {:e}",
        r.lemma2_samples, r.lemma2_max_excess
    )?;
    writeln!(
        out,
        "  equality cases: {}, max gap {:e}",
        r.lemma2_equality_cases, r.lemma2_equality_max_gap
    )?;
    writeln!(
        out,
        "trigonometric inequality: {} points, max {}",
        r.lemma1_points,
        fmt_sig17(r.lemma1_max)
    )?;
    writeln!(
        out,
        "closed-form eigenvalues: {} samples, max residual {:e} (pair) / {:e} (per outcome)",
        r.tt_samples, r.tt_pair_max_residual, r.tt_term_max_residual
    )?;
    let v = r.violations();
    if !v.is_empty() {
        return Err(CliError::Inequality(v));
    }
    writeln!(out, "no violations")?;
    Ok(())
}

pub enum EmitKind {
    Canonical(f64),
    Classical,
}

pub fn emit(kind: EmitKind, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult {
    let s = match kind {
        EmitKind::Canonical(eta) => canonical_strategy(eta)?,
        EmitKind::Classical => classical_to_strategy(&ClassicalStrategy::relay_first_bit())?,
    };
    let mut w = sink(out, stdout)?;
    StrategyDocument::from_strategy(&s).write(&mut w)?;
    w.flush()?;
    Ok(())
}
