use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use powerspec::data::{cifar10_batch_files, read_cifar10, write_spectrum_csv, DatasetMatrix};
use powerspec::population::PowerLawSpectrum;
use powerspec::simulate::{
    power_law_samples, propagate_layers, sample_covariance_spectrum, Activation, LayerSpec, Normalization,
    MAX_LAYER_WIDTH,
};
use powerspec::spectral::{slope_fit, SlopeFit, SpectrumEstimate, SpectrumMeta};

use crate::args::LayersArgs;
use crate::error::{CliError, CliResult};
use crate::output::Ctx;

pub const DEFAULT_OUT_DIR: &str = "layers_out";
const DOWNLOAD_HINT: &str = "download the CIFAR-10 binary version (cifar-10-binary.tar.gz) from \
https://www.cs.toronto.edu/~kriz/cifar.html and extract it, then pass the extracted directory to --data";

/// One row of the slope-versus-depth table.
struct Row {
    architecture: String,
    layer: String,
    dim: usize,
    fit: SlopeFit,
}

fn parse(a: &LayersArgs) -> CliResult<(Activation, Normalization)> {
    let mut problems = Vec::new();
    let act = a.act.parse::<Activation>().map_err(|e| problems.push(format!("--act: {e}"))).ok();
    let norm = a.norm.parse::<Normalization>().map_err(|e| problems.push(format!("--norm: {e}"))).ok();
    if a.widths.is_empty() {
        problems.push("--widths must list at least one layer".into());
    }
    for (t, &w) in a.widths.iter().enumerate() {
        if w == 0 || w > MAX_LAYER_WIDTH {
            problems.push(format!("--widths: layer {} width {w} must be in 1..={MAX_LAYER_WIDTH}", t + 1));
        }
    }
    if a.n < 2 {
        problems.push(format!("--n ({}) must be at least 2", a.n));
    }
    if a.data == "synthetic" {
        if a.v == 0 {
            problems.push("--v must be positive".into());
        }
        if !(a.alpha.is_finite() && a.alpha > 1.0) {
            problems.push(format!("--alpha ({}) must exceed 1", a.alpha));
        }
    }
    match (act, norm) {
        (Some(act), Some(norm)) if problems.is_empty() => Ok((act, norm)),
        _ => Err(CliError::Config(problems)),
    }
}

fn load(a: &LayersArgs, seed: u64) -> CliResult<(DatasetMatrix, String)> {
    if a.data == "synthetic" {
        let h = PowerLawSpectrum::new(a.alpha, a.v)?;
        let data = DatasetMatrix {
            values: power_law_samples(a.n, &h, seed)?,
            source: "synthetic".into(),
        };
        return Ok((data, format!("input (synthetic, alpha={})", a.alpha)));
    }
    let dir = Path::new(&a.data);
    if !dir.is_dir() {
        return Err(CliError::MissingData(format!(
            "dataset directory `{}` not found; {DOWNLOAD_HINT}",
            dir.display()
        )));
    }
    let files = cifar10_batch_files(dir).map_err(|e| CliError::MissingData(format!("{e}; {DOWNLOAD_HINT}")))?;
    Ok((read_cifar10(&files, Some(a.n))?, "input (cifar-10)".into()))
}

fn write_layer_csv(dir: &Path, name: &str, values: Vec<f64>) -> CliResult<PathBuf> {
    let path = dir.join(name);
    write_spectrum_csv(&SpectrumEstimate::new(values, SpectrumMeta::default()), &path)?;
    Ok(path)
}

fn print_table(rows: &[Row]) {
    let w = rows.iter().map(|r| r.architecture.len()).max().unwrap_or(0).max("architecture".len());
    println!("{:<w$}  {:<5}  {:>5}  {:>8}  {:>6}", "architecture", "layer", "dim", "slope", "r2");
    for r in rows {
        println!(
            "{:<w$}  {:<5}  {:>5}  {:>8.4}  {:>6.4}",
            r.architecture, r.layer, r.dim, r.fit.slope, r.fit.r_squared
        );
    }
}

fn write_table(path: &Path, rows: &[Row]) -> CliResult<()> {
    let mut text = String::from("architecture,layer,dim,slope,r2\n");
    for r in rows {
        text.push_str(&format!(
            "\"{}\",{},{},{},{}\n",
            r.architecture, r.layer, r.dim, r.fit.slope, r.fit.r_squared
        ));
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn run(ctx: &Ctx, a: &LayersArgs) -> CliResult<()> {
    let (activation, normalization) = parse(a)?;
    let (data, input_label) = load(a, ctx.common.seed)?;
    let x = &data.values;
    let out_dir = ctx.common.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    fs::create_dir_all(&out_dir)?;

    let rank_cap = |dim: usize| dim.min(x.nrows() - 1);
    let window = |dim: usize| (a.fit.start, a.fit.end.min(rank_cap(dim)));

    let input = sample_covariance_spectrum(x, true)?;
    let (lo, hi) = window(x.ncols());
    let mut rows = vec![Row {
        architecture: input_label,
        layer: "-".into(),
        dim: x.ncols(),
        fit: slope_fit(&input, lo, hi)?,
    }];
    write_layer_csv(&out_dir, "input.csv", input)?;

    let specs: Vec<LayerSpec> = a
        .widths
        .iter()
        .map(|&width| LayerSpec {
            width,
            activation,
            normalization,
        })
        .collect();
    let narrowest = a.widths.iter().copied().min().unwrap_or(1);
    let results = propagate_layers(x, &specs, ctx.common.seed, window(narrowest))?;
    for (t, r) in results.into_iter().enumerate() {
        let tag = r.spectrum.meta.activation.clone().unwrap_or_else(|| activation.to_string());
        rows.push(Row {
            architecture: format!("mlp, {tag} (random)"),
            layer: format!("L{}", t + 1),
            dim: a.widths[t],
            fit: r.fit,
        });
        write_layer_csv(&out_dir, &format!("layer{}.csv", t + 1), r.spectrum.eigenvalues)?;
    }
    write_table(&out_dir.join("summary.csv"), &rows)?;
    print_table(&rows);

    let fits: Vec<SlopeFit> = rows.iter().map(|r| r.fit).collect();
    let extra = BTreeMap::from([("out".to_string(), out_dir.display().to_string())]);
    ctx.summary(&fits, [a.fit.start, a.fit.end], extra)
}
