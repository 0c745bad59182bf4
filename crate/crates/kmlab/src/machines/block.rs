//! The block machine: a coding-layer wrapper around an inner machine.
//!
//! A leading 1 selects block mode: the machine reads s-bit code words,
//! buffers the decoded (s+1)-bit blocks, and on the all-zero code word
//! flushes the buffer followed by the terminator block 0^(s+1). A leading 0
//! discards 3s padding bits and delegates the rest of the program to the
//! inner machine. Cost model: one step per consumed bit, one per emitted bit.

use super::{Machine, MonotoneMachine, RunResult, StepMeter};
use crate::bits::BinString;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockCodeError {
    SizeTooSmall(u32),
    WrongLength { expected: usize, got: usize },
    /// Block is not in the output alphabet (starts with 0 without being the
    /// terminator).
    NotInAlphabet(BinString),
    /// The block 1 0^s is in no code word's image.
    NotEncodable(BinString),
}

impl fmt::Display for BlockCodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockCodeError::SizeTooSmall(s) => write!(f, "block size {} below minimum 2", s),
            BlockCodeError::WrongLength { expected, got } => {
                write!(f, "expected length {}, got {}", expected, got)
            }
            BlockCodeError::NotInAlphabet(b) => write!(f, "{:?} is outside the block alphabet", b),
            BlockCodeError::NotEncodable(b) => write!(f, "{:?} has no code word", b),
        }
    }
}

impl std::error::Error for BlockCodeError {}

/// Code word (s bits) to block (s+1 bits): the all-zero word maps to the
/// terminator 0^(s+1), every other word z maps to 1z.
pub fn decode_block(s: u32, word: &BinString) -> Result<BinString, BlockCodeError> {
    let s = s as usize;
    if word.len() != s {
        return Err(BlockCodeError::WrongLength { expected: s, got: word.len() });
    }
    if word.iter().all(|b| !b) {
        Ok(BinString::zeros(s + 1))
    } else {
        Ok(BinString::from_bits([true].into_iter().chain(word.iter()).collect()))
    }
}

/// Inverse of [`decode_block`]. Rejects blocks outside the alphabet and the
/// one alphabet gap 1 0^s, which no code word produces.
pub fn encode_block(s: u32, block: &BinString) -> Result<BinString, BlockCodeError> {
    let s = s as usize;
    if block.len() != s + 1 {
        return Err(BlockCodeError::WrongLength { expected: s + 1, got: block.len() });
    }
    if block.iter().all(|b| !b) {
        return Ok(BinString::zeros(s));
    }
    if !block.bit(0) {
        return Err(BlockCodeError::NotInAlphabet(block.clone()));
    }
    let tail = block.suffix_from(1);
    if tail.iter().all(|b| !b) {
        return Err(BlockCodeError::NotEncodable(block.clone()));
    }
    Ok(tail)
}

/// Membership in the output alphabet: the terminator 0^(s+1) plus every
/// block 1z except 1 0^s. Exactly 2^s blocks qualify.
pub fn in_block_alphabet(s: u32, block: &BinString) -> bool {
    encode_block(s, block).is_ok()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMachine {
    s: u32,
    inner: Box<Machine>,
}

impl BlockMachine {
    pub fn new(s: u32, inner: Machine) -> Result<Self, BlockCodeError> {
        if s < 2 {
            return Err(BlockCodeError::SizeTooSmall(s));
        }
        Ok(BlockMachine { s, inner: Box::new(inner) })
    }

    pub fn block_size(&self) -> u32 {
        self.s
    }

    pub fn inner(&self) -> &Machine {
        &self.inner
    }
}

enum Read {
    Bit(bool),
    End,
    Spent,
}

fn read_bit(program: &BinString, pos: &mut usize, meter: &mut StepMeter) -> Read {
    if *pos == program.len() {
        return Read::End;
    }
    if !meter.charge() {
        return Read::Spent;
    }
    let b = program.bit(*pos);
    *pos += 1;
    Read::Bit(b)
}

impl MonotoneMachine for BlockMachine {
    fn run(&self, program: &BinString, budget: u64) -> RunResult {
        assert!(budget >= 1, "budget must be at least 1");
        let s = self.s as usize;
        let mut meter = StepMeter::new(budget);
        let mut pos = 0usize;
        let mut out = BinString::empty();
        let mut exhausted = false;

        let selector = match read_bit(program, &mut pos, &mut meter) {
            Read::Bit(b) => b,
            Read::End => {
                return RunResult { output: out, consumed: 0, halted: false, steps: 0, exhausted }
            }
            Read::Spent => unreachable!("budget >= 1 covers the first read"),
        };

        if !selector {
            // Discard 3s padding bits, then hand over to the inner machine.
            for _ in 0..3 * s {
                match read_bit(program, &mut pos, &mut meter) {
                    Read::Bit(_) => {}
                    Read::End => {
                        return RunResult {
                            output: out,
                            consumed: pos,
                            halted: false,
                            steps: meter.steps(),
                            exhausted,
                        }
                    }
                    Read::Spent => {
                        return RunResult {
                            output: out,
                            consumed: pos,
                            halted: false,
                            steps: meter.steps(),
                            exhausted: true,
                        }
                    }
                }
            }
            let rest = program.suffix_from(pos);
            if meter.remaining() == 0 {
                return RunResult {
                    output: out,
                    consumed: pos,
                    halted: false,
                    steps: meter.steps(),
                    exhausted: !rest.is_empty(),
                };
            }
            let inner = self.inner.run(&rest, meter.remaining());
            return RunResult {
                output: inner.output,
                consumed: pos + inner.consumed,
                halted: inner.halted,
                steps: meter.steps() + inner.steps,
                exhausted: inner.exhausted,
            };
        }

        let mut buffer: Vec<BinString> = Vec::new();
        'blocks: loop {
            let mut word = BinString::empty();
            for _ in 0..s {
                match read_bit(program, &mut pos, &mut meter) {
                    Read::Bit(b) => word.push(b),
                    Read::End => break 'blocks,
                    Read::Spent => {
                        exhausted = true;
                        break 'blocks;
                    }
                }
            }
            let block = decode_block(self.s, &word).expect("word has length s");
            if block.bit(0) {
                buffer.push(block);
                continue;
            }
            // Terminator word: flush everything buffered, then the
            // terminator block itself.
            buffer.push(block);
            for flushed in buffer.drain(..) {
                debug_assert!(in_block_alphabet(self.s, &flushed));
                for b in flushed.iter() {
                    if !meter.charge() {
                        exhausted = true;
                        break 'blocks;
                    }
                    out.push(b);
                }
            }
        }

        RunResult { output: out, consumed: pos, halted: false, steps: meter.steps(), exhausted }
    }

    fn descriptor(&self) -> String {
        format!("U:s={}:inner={}", self.s, self.inner.descriptor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BinString {
        s.parse().unwrap()
    }

    fn u2() -> BlockMachine {
        BlockMachine::new(2, Machine::reference()).unwrap()
    }

    #[test]
    fn code_tables_at_s2() {
        assert_eq!(decode_block(2, &bs("00")).unwrap(), bs("000"));
        assert_eq!(decode_block(2, &bs("01")).unwrap(), bs("101"));
        assert_eq!(decode_block(2, &bs("10")).unwrap(), bs("110"));
        assert_eq!(decode_block(2, &bs("11")).unwrap(), bs("111"));
        assert_eq!(decode_block(3, &bs("101")).unwrap(), bs("1101"));

        assert_eq!(encode_block(2, &bs("000")).unwrap(), bs("00"));
        assert_eq!(encode_block(2, &bs("101")).unwrap(), bs("01"));
        assert!(matches!(encode_block(2, &bs("100")), Err(BlockCodeError::NotEncodable(_))));
        assert!(matches!(encode_block(2, &bs("001")), Err(BlockCodeError::NotInAlphabet(_))));
        assert!(matches!(encode_block(2, &bs("0000")), Err(BlockCodeError::WrongLength { .. })));
        assert!(matches!(decode_block(2, &bs("0")), Err(BlockCodeError::WrongLength { .. })));
    }

    #[test]
    fn alphabet_has_two_to_the_s_members() {
        for s in [2u32, 3, 4] {
            let count = crate::bits::strings_of_len(s as usize + 1)
                .filter(|b| in_block_alphabet(s, b))
                .count();
            assert_eq!(count, 1 << s);
        }
        assert!(in_block_alphabet(2, &bs("000")));
        assert!(!in_block_alphabet(2, &bs("100")));
    }

    #[test]
    fn code_roundtrip() {
        for s in [2u32, 3] {
            for word in crate::bits::strings_of_len(s as usize) {
                let block = decode_block(s, &word).unwrap();
                assert!(in_block_alphabet(s, &block));
                assert_eq!(encode_block(s, &block).unwrap(), word);
            }
        }
    }

    #[test]
    fn block_mode_buffers_until_terminator() {
        let r = u2().run(&bs("10100"), 64);
        assert_eq!(r.output, bs("101000"));
        assert_eq!((r.consumed, r.halted, r.steps), (5, false, 11));

        let r = u2().run(&bs("100"), 64);
        assert_eq!(r.output, bs("000"));
        assert_eq!(r.consumed, 3);
    }

    #[test]
    fn block_mode_flushes_repeatedly() {
        let r = u2().run(&bs("101001000"), 64);
        assert_eq!(r.output, bs("101000110000"));
        assert_eq!(r.consumed, 9);
    }

    #[test]
    fn unterminated_buffer_is_dropped() {
        let r = u2().run(&bs("101"), 64);
        assert_eq!(r.output, BinString::empty());
        assert_eq!((r.consumed, r.halted), (3, false));

        let r = u2().run(&bs("10"), 64);
        assert_eq!((r.output.len(), r.consumed), (0, 2));
    }

    #[test]
    fn delegation_discards_padding_then_runs_inner() {
        let r = u2().run(&bs("000000000"), 64);
        assert_eq!(r.output, bs("0"));
        assert_eq!((r.consumed, r.halted, r.steps), (9, false, 9));

        let r = u2().run(&bs("000000011"), 64);
        assert!(r.halted);
        assert!(r.output.is_empty());

        // padding shorter than 3s: nothing delegated
        let r = u2().run(&bs("0000"), 64);
        assert_eq!((r.output.len(), r.consumed, r.halted), (0, 4, false));
    }

    #[test]
    fn exhaustion_mid_flush_keeps_partial_output() {
        let r = u2().run(&bs("100"), 4);
        assert_eq!(r.output, bs("0"));
        assert!(r.exhausted);
        assert_eq!(r.steps, 4);
    }

    #[test]
    fn exhaustion_inside_inner_run_reports_total_steps() {
        let r = u2().run(&bs("000000000"), 8);
        assert!(r.exhausted);
        assert_eq!(r.steps, 8);
        assert!(r.output.is_empty());
    }

    #[test]
    fn block_size_below_two_rejected() {
        assert!(matches!(
            BlockMachine::new(1, Machine::reference()),
            Err(BlockCodeError::SizeTooSmall(1))
        ));
    }
}
