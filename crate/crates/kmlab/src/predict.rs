//! Predictive functions and everything built on their conditionals:
//! normalization, loss-minimizing actions, MDL equivalence, deviation sums,
//! and the property checks that separate the description-length priors from
//! true measures.
//!
//! A predictive function assigns an exact rational b(x) >= 0 to strings.
//! All conditionals are chain-rule ratios b(xy)/b(x); nothing here is ever
//! conditioned through the machine directly.

use crate::bits::BinString;
use crate::complexity::ComplexityTable;
use crate::environments::Environment;
use crate::loss::LossMatrix;
use crate::rational::{is_power_of_two, Rat};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredictError {
    /// b vanishes on the context, so the chain-rule ratio is undefined.
    UndefinedConditional { context: BinString },
    /// The context (or its extension) is longer than the table-backed
    /// function was built for.
    OutOfDomain { context: BinString },
    AllZeroPosterior,
    NotADistribution { sum: Rat },
    NegativeValue { value: Rat },
}

impl fmt::Display for PredictError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictError::UndefinedConditional { context } => {
                write!(f, "conditional undefined: function vanishes on {:?}", context)
            }
            PredictError::OutOfDomain { context } => {
                write!(f, "context {:?} outside the evaluable domain", context)
            }
            PredictError::AllZeroPosterior => write!(f, "posterior has no mass on any symbol"),
            PredictError::NotADistribution { sum } => {
                write!(f, "posterior sums to {}, not 1", sum)
            }
            PredictError::NegativeValue { value } => {
                write!(f, "negative value {} in posterior", value)
            }
        }
    }
}

impl std::error::Error for PredictError {}

#[derive(Clone, Debug)]
enum Kind {
    /// Finite value table, zero off the recorded support.
    Values { map: BTreeMap<BinString, Rat>, max_len: usize },
    Env(Environment),
    Normalized(Box<PredictiveFunction>),
}

/// An exactly evaluable prior over bit strings.
#[derive(Clone, Debug)]
pub struct PredictiveFunction {
    descriptor: String,
    kind: Kind,
}

impl PredictiveFunction {
    /// The dyadic prior 2^(-km) of a table, zero where censored.
    pub fn m_from_table(table: &ComplexityTable, max_len: usize) -> PredictiveFunction {
        let map = table
            .km_map(max_len)
            .into_iter()
            .map(|(x, km)| (x, Rat::pow2(-(km as i64))))
            .collect();
        PredictiveFunction {
            descriptor: format!("m-from-table({})", table_key(table)),
            kind: Kind::Values { map, max_len },
        }
    }

    /// The program-mass prior of a table.
    pub fn big_m_from_table(table: &ComplexityTable, max_len: usize) -> PredictiveFunction {
        PredictiveFunction {
            descriptor: format!("M-from-table({})", table_key(table)),
            kind: Kind::Values { map: table.big_m_map(max_len), max_len },
        }
    }

    /// The dyadic prior 2^(-k) over exactly-halting outputs.
    pub fn k_from_table(table: &ComplexityTable, max_len: usize) -> PredictiveFunction {
        let mut map = BTreeMap::new();
        for x in crate::bits::strings_up_to(max_len) {
            if let Some(k) = table.k(&x) {
                map.insert(x, Rat::pow2(-(k as i64)));
            }
        }
        PredictiveFunction {
            descriptor: format!("k-from-table({})", table_key(table)),
            kind: Kind::Values { map, max_len },
        }
    }

    pub fn from_env(env: Environment) -> PredictiveFunction {
        PredictiveFunction {
            descriptor: format!("env({})", env.descriptor()),
            kind: Kind::Env(env),
        }
    }

    /// Arbitrary finite value table; zero off the given support.
    pub fn custom(
        descriptor: impl Into<String>,
        map: BTreeMap<BinString, Rat>,
        max_len: usize,
    ) -> PredictiveFunction {
        PredictiveFunction { descriptor: descriptor.into(), kind: Kind::Values { map, max_len } }
    }

    /// Chain-rule renormalization. The result is a measure wherever
    /// evaluable: each step posterior is b(x_{1:t}) over the two-way sum at
    /// that context, with 1/2 substituted where the sum vanishes.
    pub fn normalized(self) -> PredictiveFunction {
        PredictiveFunction {
            descriptor: format!("norm({})", self.descriptor),
            kind: Kind::Normalized(Box::new(self)),
        }
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Longest string length this function can evaluate; None = unbounded.
    pub fn max_evaluable_len(&self) -> Option<usize> {
        match &self.kind {
            Kind::Values { max_len, .. } => Some(*max_len),
            Kind::Env(_) => None,
            Kind::Normalized(inner) => inner.max_evaluable_len(),
        }
    }

    /// b(x), or None when x is outside the evaluable domain.
    pub fn value(&self, x: &BinString) -> Option<Rat> {
        match &self.kind {
            Kind::Values { map, max_len } => {
                if x.len() > *max_len {
                    return None;
                }
                Some(map.get(x).cloned().unwrap_or_else(Rat::zero))
            }
            Kind::Env(env) => Some(env.prob(x)),
            Kind::Normalized(inner) => {
                let mut v = Rat::one();
                for t in 1..=x.len() {
                    let ctx = x.prefix(t - 1);
                    let num = inner.value(&x.prefix(t))?;
                    let den = inner.value(&ctx.with_bit(false))?
                        + inner.value(&ctx.with_bit(true))?;
                    if den.is_zero() {
                        v = v * Rat::new(1, 2);
                    } else {
                        v = v * num / den;
                    }
                }
                Some(v)
            }
        }
    }
}

fn table_key(table: &ComplexityTable) -> String {
    format!("{},L={},S={}", table.descriptor(), table.budget().max_len, table.budget().steps)
}

/// Chain-rule conditional b(y | context) = b(context y) / b(context).
pub fn conditional(
    b: &PredictiveFunction,
    context: &BinString,
    y: bool,
) -> Result<Rat, PredictError> {
    let extended = context.with_bit(y);
    let num = b.value(&extended).ok_or(PredictError::OutOfDomain { context: extended })?;
    let den = b
        .value(context)
        .ok_or_else(|| PredictError::OutOfDomain { context: context.clone() })?;
    if den.is_zero() {
        return Err(PredictError::UndefinedConditional { context: context.clone() });
    }
    Ok(num / den)
}

/// Both conditionals at one context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosteriorVector {
    pub context: BinString,
    values: [Rat; 2],
}

impl PosteriorVector {
    pub fn new(context: BinString, p0: Rat, p1: Rat) -> Result<PosteriorVector, PredictError> {
        for v in [&p0, &p1] {
            if *v < Rat::zero() {
                return Err(PredictError::NegativeValue { value: v.clone() });
            }
        }
        Ok(PosteriorVector { context, values: [p0, p1] })
    }

    pub fn get(&self, y: bool) -> &Rat {
        &self.values[y as usize]
    }

    pub fn sum(&self) -> Rat {
        &self.values[0] + &self.values[1]
    }

    pub fn is_distribution(&self) -> bool {
        self.sum() == Rat::one()
    }
}

pub fn posterior(
    b: &PredictiveFunction,
    context: &BinString,
) -> Result<PosteriorVector, PredictError> {
    let p0 = conditional(b, context, false)?;
    let p1 = conditional(b, context, true)?;
    PosteriorVector::new(context.clone(), p0, p1)
}

/// Lowest-index action minimizing the posterior-expected loss. The
/// posterior need not be normalized: scaling by a positive constant cannot
/// change the argmin.
pub fn act(loss: &LossMatrix, post: &PosteriorVector) -> Result<usize, PredictError> {
    if post.get(false).is_zero() && post.get(true).is_zero() {
        return Err(PredictError::AllZeroPosterior);
    }
    let expected = |y: usize| post.get(false) * loss.loss(false, y) + post.get(true) * loss.loss(true, y);
    let mut best = 0;
    let mut best_loss = expected(0);
    for y in 1..loss.num_actions() {
        let l = expected(y);
        if l < best_loss {
            best = y;
            best_loss = l;
        }
    }
    Ok(best)
}

/// Exact expected loss of an action under a true (normalized) posterior.
pub fn expected_loss(
    mu_posterior: &PosteriorVector,
    loss: &LossMatrix,
    action: usize,
) -> Result<Rat, PredictError> {
    if !mu_posterior.is_distribution() {
        return Err(PredictError::NotADistribution { sum: mu_posterior.sum() });
    }
    Ok(mu_posterior.get(false) * loss.loss(false, action)
        + mu_posterior.get(true) * loss.loss(true, action))
}

/// One step of predicting with b against the true measure.
#[derive(Clone, Debug)]
pub struct StepLossReport {
    pub t: usize,
    pub context: BinString,
    pub posterior_b: PosteriorVector,
    pub posterior_mu: PosteriorVector,
    pub action_b: usize,
    pub action_mu: usize,
    pub loss_b: Rat,
    pub loss_mu: Rat,
    /// loss_b / loss_mu, undefined when the optimal loss is zero.
    pub ratio: Option<Rat>,
}

/// Step-by-step losses of the b-predictor and the informed predictor along
/// a path, both scored by the true measure.
pub fn step_loss_reports(
    b: &PredictiveFunction,
    env: &Environment,
    loss: &LossMatrix,
    path: &BinString,
) -> Result<Vec<StepLossReport>, PredictError> {
    let mut reports = Vec::with_capacity(path.len());
    for t in 1..=path.len() {
        let context = path.prefix(t - 1);
        let posterior_b = posterior(b, &context)?;
        let mu0 = env
            .conditional(&context, false)
            .map_err(|_| PredictError::UndefinedConditional { context: context.clone() })?;
        let mu1 = env
            .conditional(&context, true)
            .map_err(|_| PredictError::UndefinedConditional { context: context.clone() })?;
        let posterior_mu = PosteriorVector::new(context.clone(), mu0, mu1)?;
        let action_b = act(loss, &posterior_b)?;
        let action_mu = act(loss, &posterior_mu)?;
        let loss_b = expected_loss(&posterior_mu, loss, action_b)?;
        let loss_mu = expected_loss(&posterior_mu, loss, action_mu)?;
        debug_assert!(loss_mu <= loss_b);
        let ratio = if loss_mu.is_zero() { None } else { Some(&loss_b / &loss_mu) };
        reports.push(StepLossReport {
            t,
            context,
            posterior_b,
            posterior_mu,
            action_b,
            action_mu,
            loss_b,
            loss_mu,
            ratio,
        });
    }
    Ok(reports)
}

/// One-part MDL agreement: at every context, the symbol maximizing the
/// conditional equals the symbol maximizing the joint value and the symbol
/// minimizing the description length, all under lowest-index tie-breaking.
/// Requires finite table entries on every tested extension.
pub fn mdl_equivalence_check<I>(table: &ComplexityTable, contexts: I) -> bool
where
    I: IntoIterator<Item = BinString>,
{
    contexts.into_iter().all(|x| {
        let km_x = table.km(&x).expect("finite km required on tested contexts");
        let km0 = table.km(&x.with_bit(false)).expect("finite km required on extensions");
        let km1 = table.km(&x.with_bit(true)).expect("finite km required on extensions");
        let m_x = Rat::pow2(-(km_x as i64));
        let cond = |km_xy: u32| Rat::pow2(-(km_xy as i64)) / &m_x;
        let by_conditional = if cond(km0) >= cond(km1) { 0 } else { 1 };
        let by_joint = if Rat::pow2(-(km0 as i64)) >= Rat::pow2(-(km1 as i64)) { 0 } else { 1 };
        let by_length = if km0 <= km1 { 0 } else { 1 };
        by_conditional == by_length && by_joint == by_length
    })
}

/// Exhaustive scan of the two defining inequalities to depth `n`, with
/// exact witnesses for every failure.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub root_value: Rat,
    /// b(empty) <= 1
    pub root_bounded: bool,
    /// contexts x, symbols y with b(xy) > b(x)
    pub monotonicity_violations: Vec<(BinString, Rat, Rat)>,
    /// contexts x with b(x0) + b(x1) > b(x)
    pub semimeasure_violations: Vec<(BinString, Rat, Rat)>,
    /// the two-way sum equals the context value at every context
    pub equalities_everywhere: bool,
}

impl PropertyReport {
    pub fn is_semimeasure(&self) -> bool {
        self.root_bounded
            && self.monotonicity_violations.is_empty()
            && self.semimeasure_violations.is_empty()
    }

    /// Measure = semimeasure with equality at every context.
    pub fn is_measure(&self) -> bool {
        self.is_semimeasure() && self.equalities_everywhere
    }
}

pub fn property_suite(b: &PredictiveFunction, n: usize) -> PropertyReport {
    let eval = |x: &BinString| b.value(x).expect("function must be evaluable to depth n");
    let root_value = eval(&BinString::empty());
    let mut monotonicity_violations = Vec::new();
    let mut semimeasure_violations = Vec::new();
    let mut equalities_everywhere = true;
    for x in crate::bits::strings_up_to(n.saturating_sub(1)) {
        let vx = eval(&x);
        let v0 = eval(&x.with_bit(false));
        let v1 = eval(&x.with_bit(true));
        for (y, vy) in [(false, &v0), (true, &v1)] {
            if *vy > vx {
                monotonicity_violations.push((x.with_bit(y), vx.clone(), vy.clone()));
            }
        }
        let split = &v0 + &v1;
        if split > vx {
            semimeasure_violations.push((x.clone(), vx.clone(), split.clone()));
        }
        if split != vx {
            equalities_everywhere = false;
        }
    }
    PropertyReport {
        root_value: root_value.clone(),
        root_bounded: root_value <= Rat::one(),
        monotonicity_violations,
        semimeasure_violations,
        equalities_everywhere,
    }
}

/// Census of the semimeasure inequality along one sequence: at which steps
/// does the two-way sum stay below the context value.
#[derive(Clone, Debug)]
pub struct CensusReport {
    pub horizon: usize,
    /// steps t with b(x_{<t} 0) + b(x_{<t} 1) <= b(x_{<t})
    pub non_violation_ts: Vec<usize>,
    /// steps whose off-sequence sibling has value zero
    pub censored_sibling_ts: Vec<usize>,
    /// steps where the on-sequence value strictly drops
    pub growth_ts: Vec<usize>,
}

impl CensusReport {
    pub fn count(&self) -> usize {
        self.non_violation_ts.len()
    }
}

pub fn semimeasure_census(b: &PredictiveFunction, x: &BinString) -> CensusReport {
    let eval = |x: &BinString| b.value(x).expect("function must be evaluable along the sequence");
    let mut report = CensusReport {
        horizon: x.len(),
        non_violation_ts: Vec::new(),
        censored_sibling_ts: Vec::new(),
        growth_ts: Vec::new(),
    };
    for t in 1..=x.len() {
        let ctx = x.prefix(t - 1);
        let on = eval(&x.prefix(t));
        let sibling = eval(&ctx.with_bit(!x.bit(t - 1)));
        let vctx = eval(&ctx);
        if &on + &sibling <= vctx {
            report.non_violation_ts.push(t);
        }
        if sibling.is_zero() {
            report.censored_sibling_ts.push(t);
        }
        if on < vctx {
            report.growth_ts.push(t);
        }
    }
    report
}

/// The three deviation statistics of b along x, all exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationSums {
    /// sum of |1 - b(x_t | x_{<t})|
    pub onseq: Rat,
    /// number of steps with b(x_t | x_{<t}) != 1
    pub count: usize,
    /// sum of the off-sequence conditionals b(!x_t | x_{<t})
    pub offseq: Rat,
}

pub fn deviation_sums(
    b: &PredictiveFunction,
    x: &BinString,
) -> Result<DeviationSums, PredictError> {
    let mut sums = DeviationSums { onseq: Rat::zero(), count: 0, offseq: Rat::zero() };
    for t in 1..=x.len() {
        let ctx = x.prefix(t - 1);
        let on = conditional(b, &ctx, x.bit(t - 1))?;
        let off = conditional(b, &ctx, !x.bit(t - 1))?;
        if on != Rat::one() {
            sums.count += 1;
        }
        sums.onseq += (Rat::one() - on).abs();
        sums.offseq += off;
    }
    Ok(sums)
}

/// b_norm(x) / b(x): how much mass renormalization pumped into x.
pub fn d_factor(b: &PredictiveFunction, x: &BinString) -> Result<Rat, PredictError> {
    let raw = b
        .value(x)
        .ok_or_else(|| PredictError::OutOfDomain { context: x.clone() })?;
    if raw.is_zero() {
        return Err(PredictError::UndefinedConditional { context: x.clone() });
    }
    let norm = b
        .clone()
        .normalized()
        .value(x)
        .ok_or_else(|| PredictError::OutOfDomain { context: x.clone() })?;
    Ok(norm / raw)
}

/// Exact per-step regret and its total-variation bound: the gap between
/// acting on b and acting on mu, and the L1 distance of the posteriors.
pub fn self_opt_gap(
    b_posterior: &PosteriorVector,
    mu_posterior: &PosteriorVector,
    loss: &LossMatrix,
) -> Result<(Rat, Rat), PredictError> {
    let action_b = act(loss, b_posterior)?;
    let action_mu = act(loss, mu_posterior)?;
    let gap = expected_loss(mu_posterior, loss, action_b)?
        - expected_loss(mu_posterior, loss, action_mu)?;
    let bound = (b_posterior.get(false) - mu_posterior.get(false)).abs()
        + (b_posterior.get(true) - mu_posterior.get(true)).abs();
    Ok((gap, bound))
}

/// Two-sided regret inequality: 0 <= gap <= L1 distance.
pub fn self_opt_bound_check(
    b_posterior: &PosteriorVector,
    mu_posterior: &PosteriorVector,
    loss: &LossMatrix,
) -> Result<bool, PredictError> {
    let (gap, bound) = self_opt_gap(b_posterior, mu_posterior, loss)?;
    Ok(gap >= Rat::zero() && gap <= bound)
}

/// Membership in the raw dyadic conditional range {2^(-j) : j >= 0} plus
/// zero for censored extensions.
pub fn in_raw_table_range(v: &Rat) -> bool {
    use num::One;
    v.is_zero() || (v.numer().is_one() && is_power_of_two(v.denom()))
}

/// Membership in the normalized conditional range {1/(1+2^z) : z integer};
/// 1/2 is the z = 0 point, so the fallback convention needs no extra case.
pub fn in_normalized_range(v: &Rat) -> bool {
    if v <= &Rat::zero() || v >= &Rat::one() {
        return false;
    }
    let odds = (Rat::one() - v.clone()) / v.clone();
    is_power_of_two(odds.numer()) && is_power_of_two(odds.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::strings_up_to;
    use crate::complexity::EnumerationBudget;
    use crate::environments::DetRule;
    use crate::machines::Machine;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use std::sync::OnceLock;

    fn bs(s: &str) -> BinString {
        s.parse().unwrap()
    }

    fn r_table(l: u32, s: u64) -> ComplexityTable {
        ComplexityTable::build(&Machine::reference(), EnumerationBudget::new(l, s))
    }

    fn big_table() -> &'static ComplexityTable {
        static TABLE: OnceLock<ComplexityTable> = OnceLock::new();
        TABLE.get_or_init(|| r_table(14, 4096))
    }

    #[test]
    fn conditionals_of_m_are_dyadic() {
        let b = PredictiveFunction::m_from_table(&r_table(8, 4096), 5);
        for ctx in strings_up_to(4) {
            for y in [false, true] {
                let c = conditional(&b, &ctx, y).unwrap();
                assert!(in_raw_table_range(&c), "context {:?} symbol {} gave {}", ctx, y, c);
                assert!(c <= Rat::one());
            }
        }
    }

    #[test]
    fn deterministic_environment_conditionals() {
        let b = PredictiveFunction::from_env(Environment::deterministic(DetRule::Zeros));
        assert_eq!(conditional(&b, &bs("00"), false).unwrap(), Rat::one());
        assert_eq!(conditional(&b, &bs("00"), true).unwrap(), Rat::zero());
    }

    #[test]
    fn vanishing_context_is_an_error() {
        let mut map = BTreeMap::new();
        map.insert(BinString::empty(), Rat::one());
        map.insert(bs("1"), Rat::one());
        let b = PredictiveFunction::custom("custom(sparse)", map, 2);
        match conditional(&b, &bs("0"), true) {
            Err(PredictError::UndefinedConditional { context }) => assert_eq!(context, bs("0")),
            other => panic!("expected undefined conditional, got {:?}", other),
        }
        assert!(matches!(
            conditional(&b, &bs("111"), true),
            Err(PredictError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn normalizing_a_measure_preserves_posteriors() {
        let env = Environment::bernoulli(Rat::new(3, 8)).unwrap();
        let b = PredictiveFunction::from_env(env);
        let n = b.clone().normalized();
        for ctx in strings_up_to(3) {
            assert_eq!(posterior(&b, &ctx).unwrap(), posterior(&n, &ctx).unwrap());
        }
    }

    #[test]
    fn normalized_m_posteriors_have_the_odds_form() {
        let b = PredictiveFunction::m_from_table(&r_table(8, 4096), 5).normalized();
        for ctx in strings_up_to(4) {
            let p = posterior(&b, &ctx).unwrap();
            for y in [false, true] {
                assert!(in_normalized_range(p.get(y)), "context {:?}: {}", ctx, p.get(y));
            }
        }
    }

    #[test]
    fn normalized_function_is_a_measure_everywhere() {
        // depth 3 at a tiny budget exercises the 1/2 convention: both
        // two-bit extensions of every context are censored
        let m = PredictiveFunction::m_from_table(&r_table(2, 16), 4);
        let report = property_suite(&m.normalized(), 4);
        assert!(report.is_measure(), "violations: {:?}", report);

        let m_big = PredictiveFunction::m_from_table(&r_table(10, 4096), 5).normalized();
        assert!(property_suite(&m_big, 5).is_measure());
    }

    #[test]
    fn d_factor_of_semimeasures_is_at_least_one() {
        let table = r_table(8, 4096);
        let big_m = PredictiveFunction::big_m_from_table(&table, 5);
        for x in strings_up_to(4) {
            assert!(d_factor(&big_m, &x).unwrap() >= Rat::one(), "{:?}", x);
        }
    }

    #[test]
    fn act_picks_the_expected_action() {
        let loss = LossMatrix::three_action(Rat::new(3, 8)).unwrap();
        let at = |p1: Rat| {
            let post =
                PosteriorVector::new(BinString::empty(), Rat::one() - p1.clone(), p1).unwrap();
            act(&loss, &post).unwrap()
        };
        assert_eq!(at(Rat::new(2, 5)), 1);
        assert_eq!(at(Rat::new(1, 3)), 0);
        assert_eq!(at(Rat::new(1, 2)), 2);

        let err = LossMatrix::error_loss();
        let post = PosteriorVector::new(BinString::empty(), Rat::new(1, 4), Rat::new(3, 4)).unwrap();
        assert_eq!(act(&err, &post).unwrap(), 1);

        let zero = PosteriorVector::new(BinString::empty(), Rat::zero(), Rat::zero()).unwrap();
        assert_eq!(act(&err, &zero), Err(PredictError::AllZeroPosterior));
    }

    #[test]
    fn act_is_scaling_invariant() {
        let loss = LossMatrix::three_action(Rat::new(3, 8)).unwrap();
        for (n, d) in [(1i64, 3i64), (2, 5), (7, 8), (1, 2)] {
            let p1 = Rat::new(n, d);
            let p0 = Rat::one() - p1.clone();
            let plain = PosteriorVector::new(BinString::empty(), p0.clone(), p1.clone()).unwrap();
            for c in [Rat::new(1, 7), Rat::from(3u64), Rat::new(16, 3)] {
                let scaled =
                    PosteriorVector::new(BinString::empty(), &p0 * &c, &p1 * &c).unwrap();
                assert_eq!(act(&loss, &plain).unwrap(), act(&loss, &scaled).unwrap());
            }
        }
    }

    #[test]
    fn expected_loss_values() {
        let loss = LossMatrix::three_action(Rat::new(3, 8)).unwrap();
        let mu = PosteriorVector::new(BinString::empty(), Rat::new(3, 5), Rat::new(2, 5)).unwrap();
        assert_eq!(expected_loss(&mu, &loss, 1).unwrap(), Rat::new(3, 8));
        assert_eq!(expected_loss(&mu, &loss, 0).unwrap(), Rat::new(2, 5));

        let det = PosteriorVector::new(BinString::empty(), Rat::one(), Rat::zero()).unwrap();
        for y in 0..3 {
            assert_eq!(expected_loss(&det, &loss, y).unwrap(), *loss.loss(false, y));
        }

        let lopsided =
            PosteriorVector::new(BinString::empty(), Rat::new(1, 4), Rat::new(1, 4)).unwrap();
        assert!(matches!(
            expected_loss(&lopsided, &loss, 0),
            Err(PredictError::NotADistribution { .. })
        ));
    }

    #[test]
    fn act_agrees_with_the_threshold_test() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let losses = [
            LossMatrix::error_loss(),
            LossMatrix::new(vec![
                [Rat::zero(), Rat::one()],
                [Rat::new(1, 2), Rat::zero()],
            ])
            .unwrap(),
        ];
        for loss in &losses {
            let gamma = loss.gamma_threshold().unwrap();
            for _ in 0..1000 {
                let den = 1 + rng.next_u64() % 64;
                let num = rng.next_u64() % (den + 1);
                let p1 = Rat::new(num as i64, den as i64);
                let post = PosteriorVector::new(
                    BinString::empty(),
                    Rat::one() - p1.clone(),
                    p1.clone(),
                )
                .unwrap();
                let expected = if p1 > gamma { 1 } else { 0 };
                assert_eq!(act(loss, &post).unwrap(), expected, "p1 = {}", p1);
            }
        }
    }

    #[test]
    fn mdl_agreement_on_small_contexts() {
        let table = r_table(10, 4096);
        assert!(mdl_equivalence_check(&table, strings_up_to(3)));
        assert!(mdl_equivalence_check(&table, [BinString::empty()]));
        // the empty context is a genuine tie, resolved to 0 on both sides
        assert_eq!(table.km(&bs("0")), table.km(&bs("1")));
    }

    #[test]
    fn census_along_zeros_stays_under_the_description_length() {
        let b = PredictiveFunction::m_from_table(big_table(), 17);
        let x = BinString::zeros(16);
        let report = semimeasure_census(&b, &x);
        assert_eq!(report.non_violation_ts, vec![1, 2, 3, 4, 5, 9]);
        assert!(report.censored_sibling_ts.is_empty());
        let km = big_table().km(&x).unwrap();
        assert_eq!(km, 11);
        assert!(report.count() as u32 <= km);
    }

    #[test]
    fn big_m_is_a_clean_semimeasure_and_m_is_monotone() {
        let table = r_table(8, 4096);
        assert!(table.is_saturated());
        let big_m = PredictiveFunction::big_m_from_table(&table, 5);
        let report = property_suite(&big_m, 4);
        assert!(report.is_semimeasure(), "violations: {:?}", report);

        // m is monotone but not a semimeasure: wherever the description
        // length stays flat from parent to child, the two-way sum overshoots
        let m = PredictiveFunction::m_from_table(big_table(), 9);
        let m_report = property_suite(&m, 8);
        assert!(m_report.monotonicity_violations.is_empty());
        assert!(m_report.root_bounded);
        assert!(!m_report.semimeasure_violations.is_empty());
        assert!(m_report
            .semimeasure_violations
            .iter()
            .any(|(x, _, _)| *x == BinString::zeros(5)));
    }

    #[test]
    fn deviation_sums_respect_the_length_bounds() {
        let b = PredictiveFunction::m_from_table(big_table(), 17);
        let x = BinString::zeros(16);
        let km = big_table().km(&x).unwrap();
        let sums = deviation_sums(&b, &x).unwrap();
        assert!(sums.onseq <= Rat::new(km as i64, 2));
        assert!(sums.count as u32 <= km);
        assert!(sums.offseq <= Rat::pow2(km as i64));
    }

    #[test]
    fn true_measure_has_zero_deviation() {
        let env = Environment::deterministic(DetRule::Alternating);
        let b = PredictiveFunction::from_env(env);
        let sums = deviation_sums(&b, &bs("010101")).unwrap();
        assert_eq!(sums, DeviationSums { onseq: Rat::zero(), count: 0, offseq: Rat::zero() });
    }

    #[test]
    fn self_opt_gap_examples() {
        let loss = LossMatrix::three_action(Rat::new(3, 8)).unwrap();
        let mu = PosteriorVector::new(BinString::empty(), Rat::new(3, 5), Rat::new(2, 5)).unwrap();

        let (gap, _) = self_opt_gap(&mu, &mu, &loss).unwrap();
        assert_eq!(gap, Rat::zero());

        // predictor stuck at the nearest normalized range point 1/3
        let b = PosteriorVector::new(BinString::empty(), Rat::new(2, 3), Rat::new(1, 3)).unwrap();
        let (gap, bound) = self_opt_gap(&b, &mu, &loss).unwrap();
        assert_eq!(gap, Rat::new(1, 40));
        assert_eq!(bound, Rat::new(2, 15));
        assert!(self_opt_bound_check(&b, &mu, &loss).unwrap());
    }

    #[test]
    fn self_opt_bound_on_random_triples() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        let mut rand_prob = |max_den: u64| {
            let den = 1 + rng.next_u64() % max_den;
            Rat::new((rng.next_u64() % (den + 1)) as i64, den as i64)
        };
        for round in 0..1000 {
            let pb = rand_prob(48);
            let pm = rand_prob(48);
            let entries: Vec<[Rat; 2]> =
                (0..3).map(|_| [rand_prob(12), rand_prob(12)]).collect();
            let loss = LossMatrix::new(entries).unwrap();
            let b = PosteriorVector::new(
                BinString::empty(),
                Rat::one() - pb.clone(),
                pb,
            )
            .unwrap();
            let mu = PosteriorVector::new(
                BinString::empty(),
                Rat::one() - pm.clone(),
                pm,
            )
            .unwrap();
            assert!(self_opt_bound_check(&b, &mu, &loss).unwrap(), "round {}", round);
        }
    }

    #[test]
    fn step_reports_track_both_predictors() {
        let env = Environment::bernoulli(Rat::new(2, 5)).unwrap();
        let loss = LossMatrix::three_action(Rat::new(3, 8)).unwrap();
        let b = PredictiveFunction::m_from_table(&r_table(10, 4096), 5).normalized();
        let path = bs("0010");
        let reports = step_loss_reports(&b, &env, &loss, &path).unwrap();
        assert_eq!(reports.len(), 4);
        for r in &reports {
            assert!(r.loss_mu <= r.loss_b);
            assert_eq!(r.action_mu, 1);
            assert_eq!(r.loss_mu, Rat::new(3, 8));
        }
    }

    #[test]
    fn range_membership_predicates() {
        for good in [Rat::one(), Rat::new(1, 2), Rat::new(1, 4), Rat::new(1, 1024), Rat::zero()] {
            assert!(in_raw_table_range(&good), "{}", good);
        }
        for bad in [Rat::new(3, 8), Rat::new(2, 3), Rat::new(5, 12)] {
            assert!(!in_raw_table_range(&bad), "{}", bad);
        }

        for good in [Rat::new(1, 2), Rat::new(1, 3), Rat::new(2, 3), Rat::new(1, 5), Rat::new(16, 17)]
        {
            assert!(in_normalized_range(&good), "{}", good);
        }
        for bad in [Rat::zero(), Rat::one(), Rat::new(5, 12), Rat::new(3, 8), Rat::new(2, 5)] {
            assert!(!in_normalized_range(&bad), "{}", bad);
        }
    }
}
