use std::collections::BTreeMap;

use powerspec::acceptance::{run_criterion, AcceptanceOptions, Outcome, Scale, CRITERIA};

use crate::args::SelftestArgs;
use crate::error::CliResult;
use crate::output::Ctx;

/// Prints one line per criterion; returns whether none failed.
pub fn run(ctx: &Ctx, a: &SelftestArgs) -> CliResult<bool> {
    let mut opts = AcceptanceOptions::new(if a.quick { Scale::Quick } else { Scale::Full });
    if ctx.seed_explicit {
        opts.seed = ctx.common.seed;
    }
    if let Some(dir) = &a.cifar_dir {
        opts.cifar_dir = Some(dir.clone());
    }
    let mut tally = BTreeMap::new();
    let mut extra = BTreeMap::new();
    for id in 1..=CRITERIA.len() {
        let report = run_criterion(id, &opts);
        println!("{report}");
        *tally.entry(report.outcome.to_string()).or_insert(0usize) += 1;
        extra.insert(format!("criterion_{id:02}"), report.outcome.to_string());
    }
    let count = |o: Outcome| tally.get(&o.to_string()).copied().unwrap_or(0);
    println!(
        "{} passed, {} failed, {} skipped (seed {})",
        count(Outcome::Pass),
        count(Outcome::Fail),
        count(Outcome::Skip),
        opts.seed
    );
    ctx.summary(&[], [0, 0], extra)?;
    Ok(count(Outcome::Fail) == 0)
}
