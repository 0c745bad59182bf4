//! Exact computable environments: deterministic generators, Bernoulli
//! coins, and the i.i.d. block measure, plus seeded sampling and the
//! in-mean-sum deviation metric.
//!
//! Every environment is a true measure: mu(x0) + mu(x1) = mu(x) exactly and
//! mu(empty) = 1. Sampling draws each bit by comparing an exact rational
//! conditional against a 64-bit draw from ChaCha20, a counter-based stream
//! with a public specification, so sample paths are reproducible from the
//! seed alone.

use crate::bits::BinString;
use crate::machines::{in_block_alphabet, Machine, MonotoneMachine};
use crate::rational::Rat;
use std::fmt;
use std::str::FromStr;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnvError {
    ThetaOutOfRange(Rat),
    BlockSizeTooSmall(u32),
    /// The driving program produced no output, so there is no sequence to
    /// repeat.
    EmptyProgramOutput(BinString),
    /// Conditioning on a context the measure gives probability zero.
    ZeroContext(BinString),
    BadDescriptor(String),
    /// Exact deviation sums expand every context; past n = 20 that is no
    /// longer desk-scale.
    HorizonTooLarge(usize),
    /// The predictive function vanishes on a context the environment can
    /// reach, so its conditional there is undefined.
    UndefinedConditional(BinString),
}

impl fmt::Display for EnvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvError::ThetaOutOfRange(t) => write!(f, "theta {} outside [0, 1]", t),
            EnvError::BlockSizeTooSmall(s) => write!(f, "block size {} below 2", s),
            EnvError::EmptyProgramOutput(p) => {
                write!(f, "program {:?} produces no output to repeat", p)
            }
            EnvError::ZeroContext(x) => write!(f, "conditional on zero-probability context {:?}", x),
            EnvError::BadDescriptor(d) => write!(f, "unrecognized environment descriptor `{}`", d),
            EnvError::HorizonTooLarge(n) => {
                write!(f, "exact mode expands 2^{} contexts; use sampling instead", n)
            }
            EnvError::UndefinedConditional(x) => {
                write!(f, "predictive function vanishes on reachable context {:?}", x)
            }
        }
    }
}

impl std::error::Error for EnvError {}

/// A computable sequence: the first bits are queried by index, and the
/// whole sequence is the indicator support of a deterministic measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetRule {
    Zeros,
    Ones,
    /// 0101...
    Alternating,
    /// The reference machine's output on a fixed program, repeated forever.
    ProgramDriven { program: BinString, cycle: BinString },
}

impl DetRule {
    /// Runs the reference machine on `program` and repeats its output.
    pub fn program_driven(program: BinString) -> Result<DetRule, EnvError> {
        let cycle = Machine::reference().run(&program, 4096).output;
        if cycle.is_empty() {
            return Err(EnvError::EmptyProgramOutput(program));
        }
        Ok(DetRule::ProgramDriven { program, cycle })
    }

    pub fn bit(&self, t: usize) -> bool {
        match self {
            DetRule::Zeros => false,
            DetRule::Ones => true,
            DetRule::Alternating => t % 2 == 1,
            DetRule::ProgramDriven { cycle, .. } => cycle.bit(t % cycle.len()),
        }
    }

    pub fn prefix(&self, n: usize) -> BinString {
        BinString::from_bits((0..n).map(|t| self.bit(t)).collect())
    }
}

/// An exactly evaluable measure on bit strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Environment {
    Deterministic(DetRule),
    Bernoulli(Rat),
    /// I.i.d. uniform over the emit alphabet of the block machine with this
    /// block size, marginalized on partial blocks.
    Block(u32),
}

impl Environment {
    pub fn bernoulli(theta: Rat) -> Result<Environment, EnvError> {
        if theta < Rat::zero() || theta > Rat::one() {
            return Err(EnvError::ThetaOutOfRange(theta));
        }
        Ok(Environment::Bernoulli(theta))
    }

    pub fn block(s: u32) -> Result<Environment, EnvError> {
        if s < 2 {
            return Err(EnvError::BlockSizeTooSmall(s));
        }
        Ok(Environment::Block(s))
    }

    pub fn deterministic(rule: DetRule) -> Environment {
        Environment::Deterministic(rule)
    }

    pub fn descriptor(&self) -> String {
        match self {
            Environment::Deterministic(DetRule::Zeros) => "det:zeros".into(),
            Environment::Deterministic(DetRule::Ones) => "det:ones".into(),
            Environment::Deterministic(DetRule::Alternating) => "det:alt".into(),
            Environment::Deterministic(DetRule::ProgramDriven { program, .. }) => {
                format!("det:prog={}", program)
            }
            Environment::Bernoulli(theta) => format!("bern:{}", theta),
            Environment::Block(s) => format!("block:s={}", s),
        }
    }

    pub fn prob(&self, x: &BinString) -> Rat {
        match self {
            Environment::Deterministic(rule) => {
                let on = (0..x.len()).all(|t| x.bit(t) == rule.bit(t));
                if on {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            }
            Environment::Bernoulli(theta) => {
                let mut p = Rat::one();
                for b in x.iter() {
                    p = p * if b { theta.clone() } else { Rat::one() - theta.clone() };
                }
                p
            }
            Environment::Block(s) => block_marginal(*s, x),
        }
    }

    /// Chain-rule conditional mu(y | x). Equal to prob(xy)/prob(x) but
    /// computed without the two full products, so long contexts stay cheap.
    pub fn conditional(&self, x: &BinString, y: bool) -> Result<Rat, EnvError> {
        match self {
            Environment::Deterministic(rule) => {
                if (0..x.len()).any(|t| x.bit(t) != rule.bit(t)) {
                    return Err(EnvError::ZeroContext(x.clone()));
                }
                Ok(if rule.bit(x.len()) == y { Rat::one() } else { Rat::zero() })
            }
            Environment::Bernoulli(theta) => {
                let p1 = theta.clone();
                let p0 = Rat::one() - theta.clone();
                if p1.is_zero() || p0.is_zero() {
                    let dead = p1.is_zero();
                    if x.iter().any(|b| b == dead) {
                        return Err(EnvError::ZeroContext(x.clone()));
                    }
                }
                Ok(if y { p1 } else { p0 })
            }
            Environment::Block(s) => {
                let blk = *s as usize + 1;
                let q = x.len() / blk;
                for i in 0..q {
                    let piece = BinString::from_bits(x.bits()[i * blk..(i + 1) * blk].to_vec());
                    if !in_block_alphabet(*s, &piece) {
                        return Err(EnvError::ZeroContext(x.clone()));
                    }
                }
                let tail = x.suffix_from(q * blk);
                let old_mass = tail_mass(*s, &tail);
                if old_mass.is_zero() {
                    return Err(EnvError::ZeroContext(x.clone()));
                }
                let new_mass = if tail.len() + 1 == blk {
                    if in_block_alphabet(*s, &tail.with_bit(y)) {
                        Rat::pow2(-(*s as i64))
                    } else {
                        Rat::zero()
                    }
                } else {
                    tail_mass(*s, &tail.with_bit(y))
                };
                Ok(new_mass / old_mass)
            }
        }
    }

    /// Draws a length-n path bit by bit: bit t is 1 iff a fresh 64-bit
    /// ChaCha20 draw, read as a dyadic rational in [0, 1), falls below
    /// mu(1 | sampled prefix). Exact comparison, no floating point.
    pub fn sample(&self, n: usize, seed: u64) -> BinString {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut x = BinString::empty();
        for _ in 0..n {
            let u = Rat::from(rng.next_u64()) * Rat::pow2(-64);
            let p1 = self.conditional(&x, true).expect("sampled context has positive measure");
            x.push(u < p1);
        }
        x
    }
}

/// Marginal of the block measure: 2^(-s) per complete alphabet block, times
/// the total mass of alphabet blocks extending the partial tail. Any
/// complete block outside the alphabet kills the product.
fn block_marginal(s: u32, x: &BinString) -> Rat {
    let blk = s as usize + 1;
    let q = x.len() / blk;
    let mut p = Rat::one();
    for i in 0..q {
        let piece = BinString::from_bits(x.bits()[i * blk..(i + 1) * blk].to_vec());
        if !in_block_alphabet(s, &piece) {
            return Rat::zero();
        }
        p = p * Rat::pow2(-(s as i64));
    }
    p * tail_mass(s, &x.suffix_from(q * blk))
}

/// Total mass of alphabet blocks extending a strict partial block.
fn tail_mass(s: u32, tail: &BinString) -> Rat {
    debug_assert!(tail.len() <= s as usize);
    if tail.is_empty() {
        return Rat::one();
    }
    let per_block = Rat::pow2(-(s as i64));
    if !tail.bit(0) {
        // only the all-zero block starts with 0
        if tail.iter().any(|b| b) {
            Rat::zero()
        } else {
            per_block
        }
    } else {
        // blocks 1z with z extending the tail's remainder, minus the one
        // excluded codeword 1 0^s when the tail is a prefix of it
        let count = Rat::pow2(s as i64 + 1 - tail.len() as i64);
        let excluded = tail.iter().skip(1).all(|b| !b);
        let hits = if excluded { count - Rat::one() } else { count };
        hits * per_block
    }
}

impl FromStr for Environment {
    type Err = EnvError;

    fn from_str(desc: &str) -> Result<Environment, EnvError> {
        let bad = || EnvError::BadDescriptor(desc.to_string());
        if let Some(rest) = desc.strip_prefix("det:") {
            return match rest {
                "zeros" => Ok(Environment::Deterministic(DetRule::Zeros)),
                "ones" => Ok(Environment::Deterministic(DetRule::Ones)),
                "alt" => Ok(Environment::Deterministic(DetRule::Alternating)),
                _ => {
                    let bits = rest.strip_prefix("prog=").ok_or_else(bad)?;
                    let program: BinString = bits.parse().map_err(|_| bad())?;
                    Ok(Environment::Deterministic(DetRule::program_driven(program)?))
                }
            };
        }
        if let Some(rest) = desc.strip_prefix("bern:") {
            let theta: Rat = rest.parse().map_err(|_| bad())?;
            return Environment::bernoulli(theta);
        }
        if let Some(rest) = desc.strip_prefix("block:s=") {
            let s: u32 = rest.parse().map_err(|_| bad())?;
            return Environment::block(s);
        }
        Err(bad())
    }
}

/// Exact in-mean-sum deviation of `b` from `env` to horizon `n`: the sum
/// over steps t <= n and contexts x of mu(x) times the squared posterior
/// differences at x. Expands every positive-measure context, so n is capped
/// at 20.
pub fn ims_sum_exact<F>(b: &F, env: &Environment, n: usize) -> Result<Rat, EnvError>
where
    F: Fn(&BinString, bool) -> Option<Rat>,
{
    if n > 20 {
        return Err(EnvError::HorizonTooLarge(n));
    }
    let mut total = Rat::zero();
    let mut stack: Vec<(BinString, Rat)> = vec![(BinString::empty(), Rat::one())];
    while let Some((ctx, weight)) = stack.pop() {
        if ctx.len() >= n {
            continue;
        }
        total += &weight * context_deviation(b, env, &ctx)?;
        if ctx.len() + 1 < n {
            for y in [false, true] {
                let w = &weight * env.conditional(&ctx, y).expect("positive context");
                if !w.is_zero() {
                    stack.push((ctx.with_bit(y), w));
                }
            }
        }
    }
    Ok(total)
}

/// Monte Carlo counterpart: averages the per-path deviation sums over one
/// sampled path per seed. Exact arithmetic on top of the sampled paths.
pub fn ims_sum_sampled<F>(
    b: &F,
    env: &Environment,
    n: usize,
    seeds: &[u64],
) -> Result<Rat, EnvError>
where
    F: Fn(&BinString, bool) -> Option<Rat>,
{
    assert!(!seeds.is_empty(), "need at least one seed");
    let mut total = Rat::zero();
    for &seed in seeds {
        let path = env.sample(n, seed);
        for t in 1..=n {
            total += context_deviation(b, env, &path.prefix(t - 1))?;
        }
    }
    Ok(total / Rat::from(seeds.len() as u64))
}

fn context_deviation<F>(b: &F, env: &Environment, ctx: &BinString) -> Result<Rat, EnvError>
where
    F: Fn(&BinString, bool) -> Option<Rat>,
{
    let mut dev = Rat::zero();
    for y in [false, true] {
        let bp = b(ctx, y).ok_or_else(|| EnvError::UndefinedConditional(ctx.clone()))?;
        let mp = env.conditional(ctx, y).expect("positive context");
        let diff = bp - mp;
        dev += &diff * &diff;
    }
    Ok(dev)
}
