//! Action split at block boundaries: the prior bets on the cheap-to-code
//! continuation, the true block measure on the likely one.
//!
//! Under the block measure a fresh block starts all-zero with probability
//! 2^-s, yet the all-zero continuation is the shortest one to code, so at
//! every boundary the prior-driven predictor picks 0, the informed one
//! picks 1, and the informed-vs-prior loss ratio is (1-2^-s)/2^-s exactly.

use super::{trace_file, ExperimentConfig, ExperimentError, VerdictRow, MC_SAMPLES};
use crate::bits::{strings_up_to, BinString};
use crate::complexity::{km_block_exact, ComplexityTable, EnumerationBudget, TableCache};
use crate::environments::Environment;
use crate::loss::LossMatrix;
use crate::machines::Machine;
use crate::predict::{act, expected_loss, PosteriorVector};
use crate::rational::Rat;
use std::io::Write;

const EXP: &str = "block";
const BOUNDARIES: usize = 5;

pub(super) fn run(
    cfg: &ExperimentConfig,
    table: &ComplexityTable,
) -> Result<Vec<VerdictRow>, ExperimentError> {
    run_with_loss(cfg, table, &LossMatrix::error_loss())
}

fn run_with_loss(
    cfg: &ExperimentConfig,
    table: &ComplexityTable,
    loss: &LossMatrix,
) -> Result<Vec<VerdictRow>, ExperimentError> {
    if !loss.is_non_degenerate() {
        return Err(ExperimentError::BadConfig(
            "degenerate loss: one action is optimal under both outcomes, so the \
             predictors cannot be told apart"
                .into(),
        ));
    }
    let s = cfg.s;
    let blk = (s + 1) as usize;
    let env = Environment::block(s)?;
    let expected_p0 = Rat::pow2(s as i64) / (Rat::pow2(s as i64) + Rat::one());

    let mut rows = Vec::new();
    let mut trace = trace_file(cfg, EXP, "boundaries.csv")?;
    writeln!(trace, "q,context_len,km_ctx,km_ctx0,km_ctx1,m_norm_p0,action_m,action_mu,loss_ratio")?;

    let mut actions_split = true;
    let mut ratios_ok = true;
    let target_ratio = (Rat::one() - Rat::pow2(-(s as i64))) / Rat::pow2(-(s as i64));
    for q in 0..BOUNDARIES {
        let ctx = BinString::zeros(q * blk);
        let km_ctx = km_block_exact(s, &ctx, table)
            .expect("all-terminator contexts are always codable");
        let weight = |x: &BinString| {
            km_block_exact(s, x, table).map_or(Rat::zero(), |k| Rat::pow2(-(k as i64)))
        };
        let km0 = km_block_exact(s, &ctx.with_bit(false), table);
        let km1 = km_block_exact(s, &ctx.with_bit(true), table);
        let w0 = weight(&ctx.with_bit(false));
        let w1 = weight(&ctx.with_bit(true));
        let m_post = PosteriorVector::new(ctx.clone(), w0.clone(), w1.clone())?;
        let mu_post = PosteriorVector::new(
            ctx.clone(),
            env.conditional(&ctx, false)?,
            env.conditional(&ctx, true)?,
        )?;
        let action_m = act(loss, &m_post)?;
        let action_mu = act(loss, &mu_post)?;
        let loss_m = expected_loss(&mu_post, loss, action_m)?;
        let loss_mu = expected_loss(&mu_post, loss, action_mu)?;
        let ratio = &loss_m / &loss_mu;
        actions_split &= action_m == 0 && action_mu == 1;
        ratios_ok &= ratio == target_ratio;

        let p0 = &w0 / (&w0 + &w1);
        let fmt_km = |k: Option<u32>| k.map_or_else(|| "inf".into(), |v| v.to_string());
        writeln!(
            trace,
            "{},{},{},{},{},{},{},{},{}",
            q,
            ctx.len(),
            km_ctx,
            fmt_km(km0),
            fmt_km(km1),
            p0,
            action_m,
            action_mu,
            ratio
        )?;
        // The clean closed form for the posterior holds while the shortest
        // coding of the off-pattern bit goes through block words; from the
        // fourth boundary on, delegation to the inner machine can undercut
        // it, so that value is reported but not asserted.
        let pass = if q < 4 { Some(p0 == expected_p0) } else { None };
        rows.push(VerdictRow::new(
            EXP,
            pass,
            format!("m_norm_zero_posterior_q{}", q),
            &p0,
            "boundary-posterior-closed-form",
        ));
    }
    rows.push(VerdictRow::new(
        EXP,
        Some(actions_split),
        "boundary_actions_split",
        BOUNDARIES,
        "predictors-disagree-at-boundaries",
    ));
    rows.push(VerdictRow::new(
        EXP,
        Some(ratios_ok),
        "boundary_loss_ratio",
        &target_ratio,
        "informed-to-prior-loss-ratio",
    ));

    rows.extend(crossvalidate_closed_form(cfg, table)?);
    rows.extend(code_length_frequency(cfg, table, &env)?);
    Ok(rows)
}

/// At s=2 the whole program space up to length 9 is enumerable, so the
/// closed-form lengths can be checked against a real table: where the
/// enumeration found a value they must agree, and where it found none the
/// closed form must exceed the enumeration's reach.
fn crossvalidate_closed_form(
    cfg: &ExperimentConfig,
    inner: &ComplexityTable,
) -> Result<Vec<VerdictRow>, ExperimentError> {
    let machine = Machine::block(2, Machine::from_descriptor(&cfg.machine)?)
        .map_err(|e| ExperimentError::BadConfig(e.to_string()))?;
    let budget = EnumerationBudget::new(9, cfg.budget.steps);
    let (enumerated, _) = TableCache::new(&cfg.cache_dir).get_or_build(&machine, budget)?;

    let mut ok = true;
    let mut checked = 0usize;
    for x in strings_up_to(5) {
        let exact = km_block_exact(2, &x, inner);
        ok &= match enumerated.km(&x) {
            Some(t) => exact == Some(t),
            None => exact.is_none_or(|e| e > 9),
        };
        checked += 1;
    }
    Ok(vec![VerdictRow::new(
        EXP,
        Some(ok),
        "closed_form_matches_enumeration_s2",
        checked,
        "block-length-crosscheck",
    )])
}

/// Monte Carlo estimate of how often the block code is within s bits of
/// the inner table's description length, against the 1 - 2^-s target. At
/// one block the bound is structural; at two blocks the inner budget
/// censors most samples, which is reported rather than asserted.
fn code_length_frequency(
    cfg: &ExperimentConfig,
    table: &ComplexityTable,
    env: &Environment,
) -> Result<Vec<VerdictRow>, ExperimentError> {
    let s = cfg.s;
    let blk = (s + 1) as usize;
    let base = cfg.seeds[0];
    let target = Rat::one() - Rat::pow2(-(s as i64));
    let slack = Rat::pow2(-(s as i64));

    let mut rows = Vec::new();
    let mut trace = trace_file(cfg, EXP, "frequency.csv")?;
    writeln!(trace, "blocks,samples,satisfied,censored,fraction_num,fraction_den")?;
    for (k, seed_offset) in [(1usize, 0u64), (2, 1000)] {
        let mut satisfied = 0usize;
        let mut censored = 0usize;
        for i in 0..MC_SAMPLES {
            let x = env.sample(k * blk, base.wrapping_add(seed_offset + i as u64));
            let code_len = k as u32 * s;
            match table.km(&x) {
                Some(km) => satisfied += usize::from(code_len <= km + s),
                None => censored += 1,
            }
        }
        let fraction = Rat::new(satisfied as i64, MC_SAMPLES as i64);
        writeln!(
            trace,
            "{},{},{},{},{},{}",
            k,
            MC_SAMPLES,
            satisfied,
            censored,
            fraction.numer(),
            fraction.denom()
        )?;
        let pass = if k == 1 { Some(fraction >= &target - &slack) } else { None };
        rows.push(VerdictRow::new(
            EXP,
            pass,
            format!("code_length_frequency_k{}", k),
            &fraction,
            "code-length-frequency",
        ));
        if k == 2 {
            rows.push(VerdictRow::new(
                EXP,
                None,
                "censored_samples_k2",
                censored,
                "inner-budget-censoring",
            ));
        }
    }
    rows.push(VerdictRow::new(EXP, None, "frequency_target", &target, "code-length-frequency"));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn degenerate_loss_is_rejected() {
        let dir = tempdir().unwrap();
        let cfg = ExperimentConfig::with_dirs(dir.path().join("out"), dir.path().join("cache"));
        let table = ComplexityTable::build(&Machine::reference(), EnumerationBudget::new(6, 256));
        let flat = LossMatrix::new(vec![
            [Rat::zero(), Rat::zero()],
            [Rat::one(), Rat::one()],
        ])
        .unwrap();
        let err = run_with_loss(&cfg, &table, &flat).unwrap_err();
        assert!(matches!(err, ExperimentError::BadConfig(_)));
    }
}
