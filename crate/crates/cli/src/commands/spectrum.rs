use powerspec::combinatorics::Composition;
use powerspec::population::{
    hpi_top_k, predicted_spectrum, theory_curve, PowerLawSpectrum, MAX_TOP_K, MAX_TUPLE_LENGTH,
};
use powerspec::simulate::{
    exact_spectrum, mc_covariance, Activation, DataDistribution, RFConfig, MAX_EXACT_DEGREE, MAX_EXACT_DIM,
};

use crate::args::{ExactArgs, HpiArgs, McArgs, SpectrumOp, TheoryArgs};
use crate::error::{CliError, CliResult};
use crate::output::{emit_spectrum, output_problems, Ctx};

fn ensure(problems: Vec<String>) -> CliResult<()> {
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Config(problems))
    }
}

fn alpha_problem(alpha: f64, out: &mut Vec<String>) {
    if !(alpha.is_finite() && alpha > 1.0) {
        out.push(format!("--alpha ({alpha}) must exceed 1"));
    }
}

pub fn run(ctx: &Ctx, op: &SpectrumOp) -> CliResult<()> {
    match op {
        SpectrumOp::Mc(a) => mc(ctx, a),
        SpectrumOp::Exact(a) => exact(ctx, a),
        SpectrumOp::Hpi(a) => hpi(ctx, a),
        SpectrumOp::Theory(a) => theory(ctx, a),
    }
}

fn mc(ctx: &Ctx, a: &McArgs) -> CliResult<()> {
    let mut problems = output_problems(ctx, &a.fit);
    let activation = match (&a.act, a.p) {
        (Some(s), _) => s.parse::<Activation>().map_err(|e| problems.push(format!("--act: {e}"))).ok(),
        (None, p) => Some(Activation::Monomial(p.unwrap_or(1))),
    };
    let distribution = a
        .dist
        .parse::<DataDistribution>()
        .map_err(|e| problems.push(format!("--dist: {e}")))
        .ok();
    let mut cfg = RFConfig::new(a.v, a.d, a.m, a.alpha, activation.unwrap_or(Activation::Monomial(1)));
    cfg.distribution = distribution.unwrap_or(DataDistribution::Gaussian);
    cfg.seed = ctx.common.seed;
    cfg.centered = a.centered;
    cfg.deterministic = ctx.common.deterministic;
    problems.extend(cfg.problems());
    ensure(problems)?;
    let spec = mc_covariance(&cfg)?;
    emit_spectrum(ctx, &a.fit, 1, &spec.eigenvalues)?;
    Ok(())
}

fn exact(ctx: &Ctx, a: &ExactArgs) -> CliResult<()> {
    let mut problems = output_problems(ctx, &a.fit);
    if a.p > MAX_EXACT_DEGREE {
        problems.push(format!("--p ({}) must be at most {MAX_EXACT_DEGREE}", a.p));
    }
    if a.d == 0 || a.d > MAX_EXACT_DIM {
        problems.push(format!("--d ({}) must be in 1..={MAX_EXACT_DIM}", a.d));
    }
    if a.v < a.d {
        problems.push(format!("--v ({}) must be at least --d ({})", a.v, a.d));
    }
    alpha_problem(a.alpha, &mut problems);
    ensure(problems)?;
    let spec = exact_spectrum(a.v, a.d, a.alpha, a.p, ctx.common.seed)?;
    emit_spectrum(ctx, &a.fit, 1, &spec.eigenvalues)?;
    Ok(())
}

fn hpi(ctx: &Ctx, a: &HpiArgs) -> CliResult<()> {
    let mut problems = output_problems(ctx, &a.fit);
    alpha_problem(a.alpha, &mut problems);
    let comp = Composition::new(a.pi.clone()).map_err(|e| problems.push(format!("--pi: {e}"))).ok();
    if a.pi.len() > MAX_TUPLE_LENGTH {
        problems.push(format!("--pi has {} parts; at most {MAX_TUPLE_LENGTH} are supported", a.pi.len()));
    }
    if a.v == 0 {
        problems.push("--v must be positive".into());
    }
    if a.k == 0 || a.k > MAX_TOP_K {
        problems.push(format!("--k ({}) must be in 1..={MAX_TOP_K}", a.k));
    }
    ensure(problems)?;
    let comp = comp.expect("validated");
    let h = PowerLawSpectrum::new(a.alpha, a.v)?;
    let top = hpi_top_k(&h, &comp, a.k)?;
    if top.truncated {
        eprintln!("note: only {} tuples exist; all are listed", top.entries.len());
    }
    emit_spectrum(ctx, &a.fit, 1, &top.values())?;
    Ok(())
}

fn theory(ctx: &Ctx, a: &TheoryArgs) -> CliResult<()> {
    let mut problems = output_problems(ctx, &a.fit);
    let curve = theory_curve(a.p, a.alpha).map_err(|e| problems.push(format!("--p/--alpha: {e}"))).ok();
    if let Some(c) = a.c {
        if !(c.is_finite() && c > 0.0) {
            problems.push(format!("--c ({c}) must be positive"));
        }
    }
    ensure(problems)?;
    let curve = curve.expect("validated");
    let c = a.c.unwrap_or(curve.scale_c);
    let values = predicted_spectrum(&curve, c, a.j.start, a.j.end)?;
    emit_spectrum(ctx, &a.fit, a.j.start, &values)?;
    Ok(())
}
