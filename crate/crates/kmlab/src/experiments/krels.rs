//! Ordering of the three description-length quantities on one table:
//! 2^-km never exceeds the prior mass, the prior mass never exceeds 1, and
//! the halting variant never undercuts the monotone one. Also checks the
//! Kraft sum of the consumed-halting programs and dumps the table.

use super::{trace_file, ExperimentConfig, ExperimentError, VerdictRow};
use crate::bits::{strings_up_to, BinString};
use crate::complexity::ComplexityTable;
use crate::rational::Rat;

const EXP: &str = "krels";
const LEN_LIMIT: usize = 6;

fn fmt_len(v: Option<u32>) -> String {
    v.map_or_else(|| "inf".into(), |n| n.to_string())
}

pub(super) fn run(
    cfg: &ExperimentConfig,
    table: &ComplexityTable,
) -> Result<Vec<VerdictRow>, ExperimentError> {
    let mut ordering_ok = true;
    let mut k_dominates = true;
    let mut checked = 0usize;
    let mut k_finite = 0usize;
    let mut censored = 0usize;
    for x in strings_up_to(LEN_LIMIT) {
        let Some(km) = table.km(&x) else {
            censored += 1;
            continue;
        };
        checked += 1;
        let big_m = table.big_m(&x);
        ordering_ok &= Rat::pow2(-i64::from(km)) <= big_m && big_m <= Rat::one();
        if let Some(k) = table.k(&x) {
            k_finite += 1;
            k_dominates &= km <= k;
        }
    }

    let halting = table.halting_programs();
    let kraft = halting
        .kraft_sum()
        .expect("consumed-halting programs are prefix-free: runs stop at the halt point");

    let mut trace = trace_file(cfg, EXP, "table.csv")?;
    table.export_csv(LEN_LIMIT, &mut trace)?;

    let empty = BinString::empty();
    Ok(vec![
        VerdictRow::new(
            EXP,
            Some(ordering_ok),
            "mass_length_ordering",
            checked,
            "mass-dominates-shortest-program",
        ),
        VerdictRow::new(
            EXP,
            Some(k_dominates),
            "k_dominates_km",
            k_finite,
            "halting-code-never-shorter",
        ),
        VerdictRow::new(EXP, None, "km_censored_strings", censored, "inner-budget-censoring"),
        VerdictRow::new(
            EXP,
            Some(table.km(&empty) == Some(0)),
            "empty_string_km",
            fmt_len(table.km(&empty)),
            "empty-string-witnesses",
        ),
        VerdictRow::new(
            EXP,
            Some(table.k(&empty) == Some(2)),
            "empty_string_k",
            fmt_len(table.k(&empty)),
            "empty-string-witnesses",
        ),
        VerdictRow::new(
            EXP,
            Some(table.big_m(&empty) == Rat::one()),
            "empty_string_big_m",
            table.big_m(&empty),
            "empty-string-witnesses",
        ),
        VerdictRow::new(
            EXP,
            Some(kraft <= Rat::one()),
            "halting_kraft_sum",
            &kraft,
            "kraft-inequality",
        ),
        VerdictRow::new(EXP, None, "halting_program_count", halting.len(), "kraft-inequality"),
    ])
}
