//! Finite binary strings, prefix sets, and Kraft sums.
//!
//! Strings order by length first, then lexicographically; everything that
//! enumerates programs or table rows relies on that canonical order.

use crate::rational::Rat;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// A finite string over {0, 1}. The empty string is a first-class value.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinString {
    bits: Vec<bool>,
}

impl BinString {
    pub fn empty() -> Self {
        BinString { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BinString { bits }
    }

    /// The string 0^n.
    pub fn zeros(n: usize) -> Self {
        BinString { bits: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn push(&mut self, b: bool) {
        self.bits.push(b);
    }

    /// Copy of `self` with one bit appended.
    pub fn with_bit(&self, b: bool) -> Self {
        let mut out = self.clone();
        out.push(b);
        out
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BinString { bits }
    }

    /// First `n` bits. Panics if `n > len`.
    pub fn prefix(&self, n: usize) -> Self {
        BinString { bits: self.bits[..n].to_vec() }
    }

    pub fn suffix_from(&self, n: usize) -> Self {
        BinString { bits: self.bits[n..].to_vec() }
    }

    /// Prefix relation, reflexive: every string is a prefix of itself.
    pub fn is_prefix_of(&self, other: &Self) -> bool {
        self.len() <= other.len() && self.bits == other.bits[..self.len()]
    }

    pub fn is_proper_prefix_of(&self, other: &Self) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    /// Bitwise complement, same length.
    pub fn flipped(&self) -> Self {
        BinString { bits: self.bits.iter().map(|b| !b).collect() }
    }

    /// The string's rank among equal-length strings, reading bits MSB first.
    pub fn value(&self) -> u64 {
        assert!(self.len() <= 63, "value() limited to 63 bits");
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// Rank in the canonical (length, then lexicographic) enumeration of all
    /// binary strings, starting from the empty string at index 0.
    pub fn canonical_index(&self) -> usize {
        assert!(self.len() <= 32, "canonical_index limited to 32 bits");
        ((1u64 << self.len()) - 1 + self.value()) as usize
    }

    pub fn from_value(len: usize, value: u64) -> Self {
        assert!(len <= 63);
        let bits = (0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect();
        BinString { bits }
    }
}

impl Ord for BinString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BinString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseBinStringError(char);

impl fmt::Display for ParseBinStringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid binary string character: {:?}", self.0)
    }
}

impl std::error::Error for ParseBinStringError {}

impl FromStr for BinString {
    type Err = ParseBinStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(ParseBinStringError(other)),
            }
        }
        Ok(BinString { bits })
    }
}

/// All strings of exactly length `n`, lexicographic order.
pub fn strings_of_len(n: usize) -> impl Iterator<Item = BinString> {
    assert!(n <= 32);
    (0..(1u64 << n)).map(move |v| BinString::from_value(n, v))
}

/// All strings of length <= `n`, canonical order.
pub fn strings_up_to(n: usize) -> impl Iterator<Item = BinString> {
    (0..=n).flat_map(strings_of_len)
}

/// A set of binary strings with deterministic (canonical-order) iteration.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrefixSet {
    members: BTreeSet<BinString>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotPrefixFree {
    /// A member that is a proper prefix of `longer`.
    pub shorter: BinString,
    pub longer: BinString,
}

impl fmt::Display for NotPrefixFree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not prefix-free: {:?} is a proper prefix of {:?}", self.shorter, self.longer)
    }
}

impl std::error::Error for NotPrefixFree {}

impl PrefixSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the string was already present.
    pub fn insert(&mut self, s: BinString) -> bool {
        self.members.insert(s)
    }

    pub fn contains(&self, s: &BinString) -> bool {
        self.members.contains(s)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BinString> {
        self.members.iter()
    }

    /// First violating pair if any member is a proper prefix of another.
    pub fn prefix_violation(&self) -> Option<NotPrefixFree> {
        for longer in &self.members {
            for cut in 0..longer.len() {
                let p = longer.prefix(cut);
                if self.members.contains(&p) {
                    return Some(NotPrefixFree { shorter: p, longer: longer.clone() });
                }
            }
        }
        None
    }

    pub fn is_prefix_free(&self) -> bool {
        self.prefix_violation().is_none()
    }

    /// Sum of 2^(-len) over members. Rejects sets that are not prefix-free,
    /// since the sum is only meaningful as code mass.
    pub fn kraft_sum(&self) -> Result<Rat, NotPrefixFree> {
        if let Some(v) = self.prefix_violation() {
            return Err(v);
        }
        Ok(self.members.iter().map(|m| Rat::pow2(-(m.len() as i64))).sum())
    }
}

impl FromIterator<BinString> for PrefixSet {
    fn from_iter<T: IntoIterator<Item = BinString>>(iter: T) -> Self {
        PrefixSet { members: iter.into_iter().collect() }
    }
}

/// The off-sequence frontier of `x`: for each position t, the string that
/// follows x for t-1 bits and then deviates. The result has exactly len(x)
/// members, is prefix-free, and contains no prefix of `x` itself.
pub fn off_sequence_set(x: &BinString) -> PrefixSet {
    (1..=x.len())
        .map(|t| x.prefix(t - 1).with_bit(!x.bit(t - 1)))
        .collect()
}
