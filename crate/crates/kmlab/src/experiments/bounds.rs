//! Deviation bounds of the length-based prior along computable sequences.
//!
//! For each built-in sequence the on-sequence deviation sum, the count of
//! imperfect predictions, and the off-sequence conditional sum are checked
//! against the description length of the full prefix. The fourth check,
//! counting the steps where the two-way split stays under the context
//! value, is run as stated; at desk budgets the censored siblings make the
//! split sum collapse to the on-path value alone, so the count lands well
//! above the description length and the verdict row reports that failure
//! with its exact witness.

use super::{trace_file, ExperimentConfig, ExperimentError, VerdictRow};
use crate::bits::BinString;
use crate::complexity::ComplexityTable;
use crate::environments::DetRule;
use crate::predict::{conditional, deviation_sums, semimeasure_census, PredictiveFunction};
use crate::rational::Rat;
use std::io::Write;
use std::str::FromStr;

const EXP: &str = "bounds";

/// The third sequence comes from running this program on the reference
/// machine and repeating its output.
const DRIVER_PROGRAM: &str = "0100";

pub(super) fn sequences() -> Result<Vec<(&'static str, DetRule)>, ExperimentError> {
    let program = BinString::from_str(DRIVER_PROGRAM)
        .map_err(|e| ExperimentError::BadConfig(e.to_string()))?;
    Ok(vec![
        ("zeros", DetRule::Zeros),
        ("alt", DetRule::Alternating),
        ("prog-0100", DetRule::program_driven(program)?),
    ])
}

pub(super) fn run(
    cfg: &ExperimentConfig,
    table: &ComplexityTable,
) -> Result<Vec<VerdictRow>, ExperimentError> {
    let n = cfg.horizon;
    let m = PredictiveFunction::m_from_table(table, n);
    let mut rows = Vec::new();

    for (name, rule) in sequences()? {
        let x = rule.prefix(n);
        let Some(km) = table.km(&x) else {
            rows.push(VerdictRow::new(
                EXP,
                Some(false),
                format!("{}_km_finite", name),
                "inf",
                "description-length-available",
            ));
            continue;
        };
        let dev = deviation_sums(&m, &x)?;
        let census = semimeasure_census(&m, &x);

        rows.push(VerdictRow::new(EXP, None, format!("{}_km", name), km, "description-length"));
        rows.push(VerdictRow::new(
            EXP,
            Some(dev.onseq <= Rat::new(i64::from(km), 2)),
            format!("{}_onseq_sum", name),
            &dev.onseq,
            "onseq-deviation-half-km",
        ));
        rows.push(VerdictRow::new(
            EXP,
            Some(dev.count as u32 <= km),
            format!("{}_change_count", name),
            dev.count,
            "imperfect-steps-at-most-km",
        ));
        rows.push(VerdictRow::new(
            EXP,
            Some(dev.offseq <= Rat::pow2(i64::from(km))),
            format!("{}_offseq_sum", name),
            &dev.offseq,
            "offseq-sum-exp-km",
        ));
        rows.push(VerdictRow::new(
            EXP,
            Some(census.count() as u32 <= km),
            format!("{}_census_count", name),
            census.count(),
            "split-non-violations-at-most-km",
        ));
        rows.push(VerdictRow::new(
            EXP,
            None,
            format!("{}_censored_siblings", name),
            census.censored_sibling_ts.len(),
            "inner-budget-censoring",
        ));

        let mut trace = trace_file(cfg, EXP, &format!("trace_{}.csv", name))?;
        writeln!(trace, "t,on_conditional,off_conditional,split_within,sibling_censored")?;
        for t in 1..=n {
            let ctx = x.prefix(t - 1);
            let on = conditional(&m, &ctx, x.bit(t - 1))?;
            let off = conditional(&m, &ctx, !x.bit(t - 1))?;
            writeln!(
                trace,
                "{},{},{},{},{}",
                t,
                on,
                off,
                census.non_violation_ts.contains(&t),
                census.censored_sibling_ts.contains(&t)
            )?;
        }
    }
    Ok(rows)
}
