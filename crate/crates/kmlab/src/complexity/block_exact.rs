//! Closed-form description lengths on the block machine.
//!
//! Block-mode programs are a selector bit plus whole code words, so the
//! minimal length reaching a given output prefix can be counted directly
//! instead of enumerated: one word per complete output block, plus at most
//! two more to cover the tail and the flush. The delegation branch is scored
//! through a prebuilt table of the inner machine.

use super::ComplexityTable;
use crate::bits::BinString;
use crate::machines::in_block_alphabet;

/// Minimal block-machine program length whose output extends `x`, for block
/// size `s` with the inner machine described by `inner`. Takes the cheaper
/// of block mode (exact) and delegation (1 + 3s + inner km). None means
/// neither branch reaches `x`; the delegation branch is relative to the
/// inner table's budget, which can only overstate it.
pub fn km_block_exact(s: u32, x: &BinString, inner: &ComplexityTable) -> Option<u32> {
    if x.is_empty() {
        return Some(0);
    }
    let block = block_branch(s, x);
    let delegate = inner.km(x).map(|k| 1 + 3 * s + k);
    match (block, delegate) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Word count for the block branch, as 1 + s * (complete blocks + extra).
/// `extra` covers the tail and the final flush:
///   0  tail empty and the last block is the terminator (its own flush)
///   1  tail empty otherwise (one flush word), or tail all zeros (the
///      terminator block extends it)
///   2  tail starts with 1 (one word to buffer a block extending the tail,
///      one to flush; such a block always exists since s >= 2)
/// None when a complete block is outside the emit alphabet or the tail
/// mixes a 0 start with a later 1, which no alphabet block extends.
fn block_branch(s: u32, x: &BinString) -> Option<u32> {
    let blk = s as usize + 1;
    let q = x.len() / blk;
    for i in 0..q {
        let piece = BinString::from_bits(x.bits()[i * blk..(i + 1) * blk].to_vec());
        if !in_block_alphabet(s, &piece) {
            return None;
        }
    }
    let tail = x.suffix_from(q * blk);
    let extra = if tail.is_empty() {
        let last_is_terminator = x.bits()[(q - 1) * blk..q * blk].iter().all(|b| !b);
        if last_is_terminator {
            0
        } else {
            1
        }
    } else if !tail.bit(0) {
        if tail.iter().any(|b| b) {
            return None;
        }
        1
    } else {
        2
    };
    Some(1 + s * (q as u32 + extra))
}
