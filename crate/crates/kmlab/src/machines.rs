//! Monotone machines with step-budgeted deterministic execution.
//!
//! A machine maps a finite program to a finite output string, reading the
//! program left to right and never retracting output. Every run charges
//! abstract steps against a budget, so execution is total even on programs
//! that would otherwise loop the output-growth instructions forever.

mod block;
mod reference;

pub use block::{decode_block, encode_block, in_block_alphabet, BlockCodeError, BlockMachine};
pub use reference::{elias_gamma_decode, elias_gamma_encode, ReferenceMachine};

use crate::bits::{strings_up_to, BinString};
use std::fmt;

/// Outcome of one budgeted run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub output: BinString,
    /// Number of program bits read; always a prefix length of the program.
    pub consumed: usize,
    pub halted: bool,
    pub steps: u64,
    /// True iff the step budget ran out mid-action. Implies steps == budget.
    pub exhausted: bool,
}

/// Shared step accounting. `charge` fails exactly when the budget is spent,
/// so a run with `steps < budget` is guaranteed complete.
pub(crate) struct StepMeter {
    steps: u64,
    budget: u64,
}

impl StepMeter {
    pub(crate) fn new(budget: u64) -> Self {
        StepMeter { steps: 0, budget }
    }

    #[must_use]
    pub(crate) fn charge(&mut self) -> bool {
        if self.steps == self.budget {
            return false;
        }
        self.steps += 1;
        true
    }

    pub(crate) fn steps(&self) -> u64 {
        self.steps
    }

    pub(crate) fn remaining(&self) -> u64 {
        self.budget - self.steps
    }
}

pub trait MonotoneMachine {
    /// Runs `program` under a step budget. Requires `budget >= 1`.
    fn run(&self, program: &BinString, budget: u64) -> RunResult;

    /// Stable identity string; also the cache key component.
    fn descriptor(&self) -> String;
}

/// The machines this crate can enumerate, closed under block wrapping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Machine {
    Reference(ReferenceMachine),
    Block(BlockMachine),
}

impl Machine {
    pub fn reference() -> Self {
        Machine::Reference(ReferenceMachine)
    }

    pub fn block(s: u32, inner: Machine) -> Result<Self, BlockCodeError> {
        Ok(Machine::Block(BlockMachine::new(s, inner)?))
    }

    /// Parses `R` or `U:s=<n>:inner=<descriptor>` (nested wrapping allowed).
    pub fn from_descriptor(desc: &str) -> Result<Self, DescriptorError> {
        if desc == "R" {
            return Ok(Machine::reference());
        }
        let rest = desc.strip_prefix("U:s=").ok_or_else(|| DescriptorError(desc.to_string()))?;
        let (s, inner) =
            rest.split_once(":inner=").ok_or_else(|| DescriptorError(desc.to_string()))?;
        let s: u32 = s.parse().map_err(|_| DescriptorError(desc.to_string()))?;
        let inner = Machine::from_descriptor(inner)?;
        Machine::block(s, inner).map_err(|_| DescriptorError(desc.to_string()))
    }
}

impl MonotoneMachine for Machine {
    fn run(&self, program: &BinString, budget: u64) -> RunResult {
        match self {
            Machine::Reference(m) => m.run(program, budget),
            Machine::Block(m) => m.run(program, budget),
        }
    }

    fn descriptor(&self) -> String {
        match self {
            Machine::Reference(m) => m.descriptor(),
            Machine::Block(m) => m.descriptor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptorError(String);

impl fmt::Display for DescriptorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unrecognized machine descriptor: {:?}", self.0)
    }
}

impl std::error::Error for DescriptorError {}

/// Witness that some single-bit program extension shrank or rewrote output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneViolation {
    pub program: BinString,
    pub extension: bool,
    pub output: BinString,
    pub extended_output: BinString,
}

impl fmt::Display for MonotoneViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "monotonicity violated: run({:?}) = {:?} is not a prefix of run({:?}{}) = {:?}",
            self.program, self.output, self.program, u8::from(self.extension), self.extended_output
        )
    }
}

/// Exhaustively checks output monotonicity under single-bit extension for
/// every program of length < `max_len`, at a fixed budget. Transitivity
/// extends the guarantee to arbitrary extensions within the swept range.
/// Returns the first violation in canonical program order, if any.
pub fn check_monotone<M: MonotoneMachine>(
    machine: &M,
    max_len: usize,
    budget: u64,
) -> Result<(), MonotoneViolation> {
    for program in strings_up_to(max_len.saturating_sub(1)) {
        let base = machine.run(&program, budget);
        for extension in [false, true] {
            let extended = machine.run(&program.with_bit(extension), budget);
            if !base.output.is_prefix_of(&extended.output) {
                return Err(MonotoneViolation {
                    program,
                    extension,
                    output: base.output,
                    extended_output: extended.output,
                });
            }
        }
    }
    Ok(())
}
