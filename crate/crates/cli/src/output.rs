use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use powerspec::data::{write_run_summary, write_spectrum_bin, write_spectrum_rows, RunSummary};
use powerspec::spectral::{normalize_top, slope_fit, SlopeFit};

use crate::args::{Common, FitArgs, IndexRange};
use crate::error::CliResult;

/// State shared by every subcommand.
pub struct Ctx {
    pub common: Common,
    /// True when `--seed` came from the command line or a config file.
    pub seed_explicit: bool,
    pub config: BTreeMap<String, String>,
    pub start: Instant,
}

impl Ctx {
    /// Human-readable lines go to stdout unless stdout carries the CSV.
    pub fn report(&self, line: &str) {
        if self.common.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }

    pub fn summary(&self, fits: &[SlopeFit], fit_range: [usize; 2], extra: BTreeMap<String, String>) -> CliResult<()> {
        let Some(path) = &self.common.json_summary else {
            return Ok(());
        };
        let mut config = self.config.clone();
        config.extend(extra);
        let summary = RunSummary {
            config,
            seed: self.common.seed,
            slopes: fits.iter().map(|f| f.slope).collect(),
            r2: fits.iter().map(|f| f.r_squared).collect(),
            fit_range,
            elapsed_ms: self.start.elapsed().as_millis() as u64,
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        write_run_summary(&summary, path)?;
        Ok(())
    }
}

/// Problems with output flags that need `--out`.
pub fn output_problems(ctx: &Ctx, fit: &FitArgs) -> Vec<String> {
    let mut out = Vec::new();
    if ctx.common.out.is_none() {
        if fit.normalized {
            out.push("--normalized requires --out".into());
        }
        if fit.sidecar {
            out.push("--sidecar requires --out".into());
        }
    }
    out
}

/// `<dir>/<stem><suffix>` for an output path `<dir>/<stem>.<ext>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn write_csv(path: Option<&Path>, first_j: usize, values: &[f64]) -> CliResult<()> {
    match path {
        Some(p) => write_spectrum_rows(first_j, values, fs::File::create(p)?)?,
        None => {
            let mut buf = Vec::new();
            write_spectrum_rows(first_j, values, &mut buf)?;
            io::stdout().lock().write_all(&buf)?;
        }
    }
    Ok(())
}

/// Slope fit over `range` clipped to the available indices
/// `first_j..first_j + len`; `None` when fewer than the minimum points remain.
pub fn fit_window(first_j: usize, values: &[f64], range: IndexRange) -> Option<SlopeFit> {
    let last = first_j + values.len().checked_sub(1)?;
    let (lo, hi) = (range.start.max(first_j), range.end.min(last));
    if lo > hi {
        return None;
    }
    let mut padded = vec![0.0; first_j - 1];
    padded.extend_from_slice(values);
    slope_fit(&padded, lo, hi).ok()
}

pub fn describe_fit(fit: &SlopeFit) -> String {
    format!(
        "slope {:.4}  r2 {:.4}  over j={}..{} ({} points)",
        fit.slope, fit.r_squared, fit.j_min, fit.j_max, fit.points_used
    )
}

/// Writes the spectrum, its optional variants and the run summary, and
/// reports the slope fit.
pub fn emit_spectrum(ctx: &Ctx, fit_args: &FitArgs, first_j: usize, values: &[f64]) -> CliResult<Option<SlopeFit>> {
    let out = ctx.common.out.as_deref();
    write_csv(out, first_j, values)?;
    if let Some(path) = out {
        if fit_args.normalized {
            write_csv(Some(&sibling(path, "_normalized.csv")), first_j, &normalize_top(values)?)?;
        }
        if fit_args.sidecar {
            write_spectrum_bin(values, &path.with_extension("bin"))?;
        }
    }
    let fit = fit_window(first_j, values, fit_args.fit);
    match &fit {
        Some(f) => ctx.report(&describe_fit(f)),
        None => ctx.report(&format!("slope fit skipped: too few positive values in {}", fit_args.fit)),
    }
    let range = fit.map_or([fit_args.fit.start, fit_args.fit.end], |f| [f.j_min, f.j_max]);
    ctx.summary(fit.as_slice(), range, BTreeMap::new())?;
    io::stdout().flush()?;
    Ok(fit)
}
