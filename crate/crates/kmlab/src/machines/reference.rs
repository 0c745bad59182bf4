//! The reference machine: four two-bit opcodes driving an append-only tape.
//!
//! `00` emits 0, `01` emits 1, `11` halts, and `10` reads an Elias gamma
//! count n >= 1 and appends n copies of the entire current output. Cost
//! model: one step per fully decoded instruction, one step per emitted
//! symbol. A truncated opcode or count stops the run unhalted; the partial
//! bits still count as consumed.

use super::{MonotoneMachine, RunResult, StepMeter};
use crate::bits::BinString;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReferenceMachine;

/// Elias gamma code for n >= 1: for a b-bit value, b-1 zeros then the value
/// MSB first. Panics on 0, which the code cannot represent.
pub fn elias_gamma_encode(n: u64) -> BinString {
    assert!(n >= 1, "gamma code starts at 1");
    let b = 64 - n.leading_zeros() as usize;
    let mut bits = vec![false; b - 1];
    bits.extend((0..b).map(|i| (n >> (b - 1 - i)) & 1 == 1));
    BinString::from_bits(bits)
}

/// Decodes a gamma count from `bits[pos..]`. Returns the value and the
/// position just past it, or None if the code is truncated. Counts with more
/// than 63 leading zeros saturate to u64::MAX rather than overflow; budgets
/// stop such runs long before the count matters.
pub fn elias_gamma_decode(bits: &BinString, pos: usize) -> Option<(u64, usize)> {
    let mut p = pos;
    let mut zeros = 0usize;
    while p < bits.len() && !bits.bit(p) {
        zeros += 1;
        p += 1;
    }
    if p == bits.len() {
        return None;
    }
    p += 1;
    if p + zeros > bits.len() {
        return None;
    }
    if zeros >= 64 {
        return Some((u64::MAX, p + zeros));
    }
    let mut n = 1u64;
    for i in 0..zeros {
        n = (n << 1) | bits.bit(p + i) as u64;
    }
    Some((n, p + zeros))
}

impl MonotoneMachine for ReferenceMachine {
    fn run(&self, program: &BinString, budget: u64) -> RunResult {
        assert!(budget >= 1, "budget must be at least 1");
        let mut meter = StepMeter::new(budget);
        let mut out = BinString::empty();
        let mut pos = 0usize;
        let mut halted = false;
        let mut exhausted = false;

        'exec: while pos < program.len() {
            if pos + 1 == program.len() {
                pos += 1;
                break;
            }
            let opcode = (program.bit(pos), program.bit(pos + 1));
            pos += 2;
            match opcode {
                (false, symbol) => {
                    if !meter.charge() || !meter.charge() {
                        exhausted = true;
                        break;
                    }
                    out.push(symbol);
                }
                (true, false) => {
                    let Some((count, next)) = elias_gamma_decode(program, pos) else {
                        pos = program.len();
                        break;
                    };
                    pos = next;
                    if !meter.charge() {
                        exhausted = true;
                        break;
                    }
                    let base = out.clone();
                    if base.is_empty() {
                        continue;
                    }
                    for _ in 0..count {
                        for b in base.iter() {
                            if !meter.charge() {
                                exhausted = true;
                                break 'exec;
                            }
                            out.push(b);
                        }
                    }
                }
                (true, true) => {
                    if !meter.charge() {
                        exhausted = true;
                    } else {
                        halted = true;
                    }
                    break;
                }
            }
            debug_assert!(pos >= 60 || out.len() as u64 <= 1 << pos);
        }

        RunResult { output: out, consumed: pos, halted, steps: meter.steps(), exhausted }
    }

    fn descriptor(&self) -> String {
        "R".into()
    }
}
