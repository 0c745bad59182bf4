//! Conditional-range obstruction: table posteriors cannot approach 3/8.
//!
//! Raw conditionals of the length-based prior are ratios of powers of two,
//! so they live in {2^-j} plus zero for censored extensions; normalized
//! conditionals live in {1/(1+2^z)}. Both ranges keep an exact minimum
//! distance from the hedge-friendly targets 3/8 and 5/12. The scan is
//! exhaustive over all contexts to the horizon, and any posterior that
//! escapes its range (the budget artifact: a fully censored sibling pushes
//! a normalized posterior to 0 or 1) is reported as a failure, not skipped.

use super::{trace_file, ExperimentConfig, ExperimentError, VerdictRow};
use crate::bits::strings_up_to;
use crate::complexity::ComplexityTable;
use crate::predict::{conditional, in_normalized_range, in_raw_table_range, PredictiveFunction};
use crate::rational::Rat;
use std::io::Write;

const EXP: &str = "range";

/// Contexts are enumerated exhaustively, so the horizon is capped at 8
/// regardless of the config's (path-based experiments go deeper).
const MAX_HORIZON: usize = 8;

pub(super) fn run(
    cfg: &ExperimentConfig,
    table: &ComplexityTable,
) -> Result<Vec<VerdictRow>, ExperimentError> {
    let horizon = cfg.horizon.min(MAX_HORIZON);
    let m = PredictiveFunction::m_from_table(table, horizon);
    let norm = m.clone().normalized();
    let raw_target = Rat::new(3, 8);
    let norm_target = Rat::new(5, 12);

    let mut raw_escapes = 0usize;
    let mut raw_zeros = 0usize;
    let mut raw_min_gap: Option<Rat> = None;
    let mut norm_escapes = 0usize;
    let mut first_norm_escape: Option<(String, Rat)> = None;
    let mut norm_min_gap: Option<Rat> = None;
    let mut trace = trace_file(cfg, EXP, "posteriors.csv")?;
    writeln!(trace, "context,raw_p0,raw_p1,norm_p0,norm_p1,raw_in_range,norm_in_range")?;

    for ctx in strings_up_to(horizon - 1) {
        let mut raw = [Rat::zero(), Rat::zero()];
        let mut nrm = [Rat::zero(), Rat::zero()];
        let mut raw_ok = true;
        let mut norm_ok = true;
        for y in [false, true] {
            let r = conditional(&m, &ctx, y)?;
            let v = conditional(&norm, &ctx, y)?;
            raw_ok &= in_raw_table_range(&r);
            norm_ok &= in_normalized_range(&v);
            if r.is_zero() {
                raw_zeros += 1;
            }
            let rg = (&r - &raw_target).abs();
            let ng = (&v - &norm_target).abs();
            raw_min_gap = Some(raw_min_gap.map_or(rg.clone(), |g| g.min(rg)));
            norm_min_gap = Some(norm_min_gap.map_or(ng.clone(), |g| g.min(ng)));
            if !in_normalized_range(&v) && first_norm_escape.is_none() {
                first_norm_escape = Some((format!("ctx={}:y={}", ctx, u8::from(y)), v.clone()));
            }
            raw[usize::from(y)] = r;
            nrm[usize::from(y)] = v;
        }
        raw_escapes += usize::from(!raw_ok);
        norm_escapes += usize::from(!norm_ok);
        writeln!(
            trace,
            "{},{},{},{},{},{},{}",
            ctx, raw[0], raw[1], nrm[0], nrm[1], raw_ok, norm_ok
        )?;
    }

    let raw_min_gap = raw_min_gap.expect("horizon >= 1 scans at least the empty context");
    let norm_min_gap = norm_min_gap.expect("horizon >= 1 scans at least the empty context");

    let mut rows = vec![
        VerdictRow::new(EXP, None, "horizon_used", horizon, "exhaustive-context-scan"),
        VerdictRow::new(
            EXP,
            Some(raw_escapes == 0),
            "raw_posteriors_dyadic_or_zero",
            raw_escapes,
            "dyadic-conditional-range",
        ),
        VerdictRow::new(EXP, None, "raw_zero_posteriors", raw_zeros, "censored-extensions"),
        VerdictRow::new(
            EXP,
            Some(raw_min_gap >= Rat::new(1, 8)),
            "raw_min_gap_to_3_8",
            &raw_min_gap,
            "raw-gap-at-least-one-eighth",
        ),
        VerdictRow::new(
            EXP,
            Some(norm_escapes == 0),
            "normalized_posteriors_in_range",
            norm_escapes,
            "normalized-conditional-range",
        ),
        VerdictRow::new(
            EXP,
            Some(norm_min_gap >= Rat::new(1, 12)),
            "normalized_min_gap_to_5_12",
            &norm_min_gap,
            "normalized-gap-at-least-one-twelfth",
        ),
    ];
    if let Some((name, value)) = first_norm_escape {
        rows.push(VerdictRow::new(
            EXP,
            None,
            format!("first_normalized_escape_{}", name),
            &value,
            "censored-sibling-degenerates-posterior",
        ));
    }
    Ok(rows)
}
