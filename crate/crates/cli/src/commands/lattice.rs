use std::collections::BTreeMap;
use std::f64::consts::E;

use powerspec::lattice::{
    asymptotic_ordered_equal, asymptotic_unordered, count_ordered_with_budget, count_unordered_with_budget,
    ordered_shape, Exponents,
};

use crate::args::{LatticeArgs, LatticeOp};
use crate::error::{CliError, CliResult};
use crate::output::Ctx;

fn exponents(args: &LatticeArgs) -> CliResult<Exponents> {
    let mut problems = Vec::new();
    if !(args.x.is_finite() && args.x > 0.0) {
        problems.push(format!("--X must be a positive finite number, got {}", args.x));
    }
    if args.bound_v.is_some() && !args.ordered {
        problems.push("--bound-v applies to ordered counts only (add --ordered)".into());
    }
    if args.bound_v == Some(0) {
        problems.push("--bound-v must be positive".into());
    }
    let exps = Exponents::new(args.pi.clone());
    if let Err(e) = &exps {
        problems.push(format!("--pi: {e}"));
    }
    match exps {
        Ok(e) if problems.is_empty() => Ok(e),
        _ => Err(CliError::Config(problems)),
    }
}

/// Leading-order value, or `None` for ordered counts with unequal exponents.
fn asymptotic(args: &LatticeArgs, exps: &Exponents) -> CliResult<Option<f64>> {
    if !args.ordered {
        return Ok(Some(asymptotic_unordered(args.x, exps)?));
    }
    let first = exps.values()[0];
    if exps.values().iter().all(|&p| p == first) {
        Ok(Some(asymptotic_ordered_equal(args.x, first, exps.k() as u32)?))
    } else {
        Ok(None)
    }
}

fn print_shape(exps: &Exponents, x: f64) {
    let shape = ordered_shape(exps);
    println!("theta_star {}", shape.theta_star);
    println!("mu {}", shape.mu);
    println!("growth {}", shape.growth(x));
    println!("(leading constant not available for unequal ordered exponents)");
}

pub fn run(ctx: &Ctx, op: &LatticeOp) -> CliResult<()> {
    let mut extra = BTreeMap::new();
    match op {
        LatticeOp::Count(args) => {
            let exps = exponents(args)?;
            let count = if args.ordered {
                count_ordered_with_budget(args.x, &exps, args.bound_v, args.budget)?
            } else {
                count_unordered_with_budget(args.x, &exps, args.budget)?
            }
            .count;
            println!("{count}");
            extra.insert("result_count".into(), count.to_string());
            if args.x > E && args.bound_v.is_none() {
                if let Some(a) = asymptotic(args, &exps)? {
                    println!("asymptotic {a}");
                    println!("ratio {}", count as f64 / a);
                    extra.insert("result_asymptotic".into(), a.to_string());
                }
            }
        }
        LatticeOp::Asym(args) => {
            let exps = exponents(args)?;
            if args.x <= E {
                return Err(CliError::Invalid(format!("--X must exceed e for asymptotics, got {}", args.x)));
            }
            match asymptotic(args, &exps)? {
                Some(a) => {
                    println!("{a}");
                    extra.insert("result_asymptotic".into(), a.to_string());
                }
                None => print_shape(&exps, args.x),
            }
        }
    }
    ctx.summary(&[], [0, 0], extra)
}
