//! Budgeted program enumeration and the complexity tables built from it.
//!
//! An enumeration runs every program up to a length bound L under a step
//! budget S, in canonical (length, then lexicographic) order. A program that
//! stops reading before its end leaves a redundant record, since its
//! consumed prefix is enumerated separately; every quantity a table reports
//! is derived from the canonical records alone.

mod block_exact;
mod cache;

pub use block_exact::km_block_exact;
pub use cache::{load_table, save_table, CacheError, CacheStatus, TableCache};

use crate::bits::{strings_up_to, BinString, PrefixSet};
use crate::machines::MonotoneMachine;
use crate::rational::Rat;
use std::collections::BTreeMap;
use std::io;

/// Enumeration bounds: maximum program length L and step budget S per run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_len: u32,
    pub steps: u64,
}

impl EnumerationBudget {
    pub fn new(max_len: u32, steps: u64) -> Self {
        assert!(steps >= 1, "step budget must be at least 1");
        EnumerationBudget { max_len, steps }
    }
}

/// One enumerated program and what running it produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRecord {
    pub program: BinString,
    pub output: BinString,
    pub consumed: usize,
    pub halted: bool,
    pub steps: u64,
}

impl TableRecord {
    /// True iff the program carries bits its run never read. The consumed
    /// prefix is then the canonical program with the same behavior.
    pub fn is_redundant(&self) -> bool {
        self.consumed < self.program.len()
    }
}

/// Runs every program with length <= L once and records the results in
/// canonical program order.
pub fn enumerate<M: MonotoneMachine>(machine: &M, budget: EnumerationBudget) -> Vec<TableRecord> {
    let mut records = Vec::with_capacity((1usize << (budget.max_len + 1)) - 1);
    for program in strings_up_to(budget.max_len as usize) {
        let run = machine.run(&program, budget.steps);
        records.push(TableRecord {
            program,
            output: run.output,
            consumed: run.consumed,
            halted: run.halted,
            steps: run.steps,
        });
    }
    records
}

/// Complete enumeration of one machine under one budget, with description
/// length and program mass queries on top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityTable {
    descriptor: String,
    budget: EnumerationBudget,
    records: Vec<TableRecord>,
}

impl ComplexityTable {
    pub fn build<M: MonotoneMachine>(machine: &M, budget: EnumerationBudget) -> Self {
        ComplexityTable {
            descriptor: machine.descriptor(),
            budget,
            records: enumerate(machine, budget),
        }
    }

    pub(crate) fn from_parts(
        descriptor: String,
        budget: EnumerationBudget,
        records: Vec<TableRecord>,
    ) -> Self {
        ComplexityTable { descriptor, budget, records }
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn budget(&self) -> EnumerationBudget {
        self.budget
    }

    pub fn records(&self) -> &[TableRecord] {
        &self.records
    }

    fn canonical_records(&self) -> impl Iterator<Item = &TableRecord> {
        self.records.iter().filter(|r| !r.is_redundant())
    }

    /// Minimal program length whose output extends `x`. Records arrive in
    /// canonical order, so the first hit is minimal. None = censored at this
    /// budget.
    pub fn km(&self, x: &BinString) -> Option<u32> {
        self.canonical_records()
            .find(|r| x.is_prefix_of(&r.output))
            .map(|r| r.program.len() as u32)
    }

    /// Minimal length of a halting program whose output equals `x` exactly.
    pub fn k(&self, x: &BinString) -> Option<u32> {
        self.canonical_records()
            .find(|r| r.halted && r.output == *x)
            .map(|r| r.program.len() as u32)
    }

    /// Program mass reaching `x`: sum of 2^(-len) over canonical records
    /// whose output extends `x` and that are minimal with that property,
    /// meaning no proper program prefix already reached `x`. Equals the
    /// fair-coin probability that a program stream's run output extends `x`.
    pub fn big_m(&self, x: &BinString) -> Rat {
        let mut total = Rat::zero();
        for (idx, r) in self.records.iter().enumerate() {
            if r.is_redundant() || !x.is_prefix_of(&r.output) {
                continue;
            }
            if idx > 0 {
                let parent = &self.records[(idx - 1) / 2];
                debug_assert!(!parent.is_redundant(), "prefix of a canonical record is canonical");
                if x.is_prefix_of(&parent.output) {
                    continue;
                }
            }
            total += Rat::pow2(-(r.program.len() as i64));
        }
        total
    }

    /// Description lengths for every string up to `max_len` in one pass.
    /// Censored strings are absent from the map.
    pub fn km_map(&self, max_len: usize) -> BTreeMap<BinString, u32> {
        let mut map = BTreeMap::new();
        for r in self.canonical_records() {
            for j in 0..=r.output.len().min(max_len) {
                map.entry(r.output.prefix(j)).or_insert(r.program.len() as u32);
            }
        }
        map
    }

    /// Program mass for every string up to `max_len` in one pass. A record
    /// is minimal exactly for the output prefixes its parent had not yet
    /// produced, so each record's mass goes to an interval of prefix
    /// lengths. Unreached strings are absent (mass zero).
    pub fn big_m_map(&self, max_len: usize) -> BTreeMap<BinString, Rat> {
        let mut map: BTreeMap<BinString, Rat> = BTreeMap::new();
        for (idx, r) in self.records.iter().enumerate() {
            if r.is_redundant() {
                continue;
            }
            let newly_reached_from =
                if idx == 0 { 0 } else { self.records[(idx - 1) / 2].output.len() + 1 };
            let mass = Rat::pow2(-(r.program.len() as i64));
            for j in newly_reached_from..=r.output.len().min(max_len) {
                *map.entry(r.output.prefix(j)).or_insert_with(Rat::zero) += &mass;
            }
        }
        map
    }

    /// The canonical halting programs. Prefix-free by construction: a
    /// halting run consumes its whole program, so no proper extension is
    /// canonical.
    pub fn halting_programs(&self) -> PrefixSet {
        self.canonical_records().filter(|r| r.halted).map(|r| r.program.clone()).collect()
    }

    /// True iff no run was stopped by the step budget. `charge` fails only
    /// at steps == budget, so steps < budget proves the run finished.
    pub fn is_saturated(&self) -> bool {
        self.records.iter().all(|r| r.steps < self.budget.steps)
    }

    pub fn max_steps(&self) -> u64 {
        self.records.iter().map(|r| r.steps).max().unwrap_or(0)
    }

    /// Writes `x,km,k,bigM_num,bigM_den,budget_L,budget_S` rows for every
    /// string of length <= `max_len`, canonical order. Censored entries
    /// print as `inf`.
    pub fn export_csv(&self, max_len: usize, out: &mut impl io::Write) -> io::Result<()> {
        fn or_inf(v: Option<u32>) -> String {
            v.map_or_else(|| "inf".into(), |n| n.to_string())
        }
        writeln!(out, "x,km,k,bigM_num,bigM_den,budget_L,budget_S")?;
        for x in strings_up_to(max_len) {
            let m = self.big_m(&x);
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                x,
                or_inf(self.km(&x)),
                or_inf(self.k(&x)),
                m.numer(),
                m.denom(),
                self.budget.max_len,
                self.budget.steps
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::strings_of_len;
    use crate::machines::{Machine, MonotoneMachine};

    fn bs(s: &str) -> BinString {
        s.parse().unwrap()
    }

    fn r_table(l: u32, s: u64) -> ComplexityTable {
        ComplexityTable::build(&Machine::reference(), EnumerationBudget::new(l, s))
    }

    #[test]
    fn enumeration_is_exhaustive_and_deterministic() {
        let budget = EnumerationBudget::new(2, 16);
        let machine = Machine::reference();
        let records = enumerate(&machine, budget);
        assert_eq!(records.len(), 7);
        assert_eq!(records, enumerate(&machine, budget));

        let by_program: BTreeMap<String, &TableRecord> =
            records.iter().map(|r| (r.program.to_string(), r)).collect();
        assert_eq!(by_program[""].output, BinString::empty());
        assert!(!by_program[""].halted);
        assert_eq!(by_program["0"].consumed, 1);
        assert_eq!(by_program["00"].output, bs("0"));
        assert_eq!(by_program["01"].output, bs("1"));
        assert_eq!(by_program["10"].output, BinString::empty());
        assert!(by_program["11"].halted);
        assert!(records.iter().all(|r| !r.is_redundant()));
    }

    #[test]
    fn extensions_of_halting_programs_are_redundant() {
        let table = r_table(3, 16);
        let redundant: Vec<String> = table
            .records()
            .iter()
            .filter(|r| r.is_redundant())
            .map(|r| r.program.to_string())
            .collect();
        assert_eq!(redundant, ["110", "111"]);
    }

    #[test]
    fn km_examples() {
        let table = r_table(8, 64);
        assert_eq!(table.km(&BinString::empty()), Some(0));
        assert_eq!(table.km(&bs("0")), Some(2));
        assert_eq!(table.km(&bs("0000")), Some(7));
        assert_eq!(table.km(&BinString::zeros(8)), None);
        assert_eq!(r_table(9, 64).km(&BinString::zeros(8)), Some(9));
    }

    #[test]
    fn k_examples() {
        let table = r_table(4, 64);
        assert_eq!(table.k(&BinString::empty()), Some(2));
        assert_eq!(table.k(&bs("0")), Some(4));
        assert_eq!(r_table(3, 64).k(&bs("0")), None);
    }

    /// Independent oracle: the mass reaching x equals the fraction of full
    /// L-bit programs whose run output extends x, because the minimal
    /// canonical records are exactly the first-reach frontier of that event.
    fn big_m_oracle(l: u32, x: &BinString) -> Rat {
        let machine = Machine::reference();
        let hits = strings_of_len(l as usize)
            .filter(|u| x.is_prefix_of(&machine.run(u, 4096).output))
            .count();
        Rat::from(hits as u64) * Rat::pow2(-(l as i64))
    }

    #[test]
    fn big_m_matches_cylinder_oracle() {
        for l in [6u32, 8] {
            let table = r_table(l, 4096);
            for x in strings_up_to(3) {
                assert_eq!(table.big_m(&x), big_m_oracle(l, &x), "L={} x={:?}", l, x);
            }
        }
    }

    #[test]
    fn big_m_basics() {
        let table = r_table(8, 64);
        assert_eq!(table.big_m(&BinString::empty()), Rat::one());
        let v = table.big_m(&bs("0"));
        assert!(v >= Rat::new(1, 4) && v <= Rat::one());

        // more budget can only add reaching programs
        assert!(r_table(10, 256).big_m(&bs("01")) >= table.big_m(&bs("01")));
    }

    #[test]
    fn big_m_is_a_semimeasure() {
        let table = r_table(8, 4096);
        for x in strings_up_to(3) {
            let split = table.big_m(&x.with_bit(false)) + table.big_m(&x.with_bit(true));
            assert!(split <= table.big_m(&x), "split at {:?}", x);
        }
    }

    #[test]
    fn length_ordering_holds_tablewide() {
        let table = r_table(8, 4096);
        for x in strings_up_to(4) {
            let big_m = table.big_m(&x);
            assert!(big_m <= Rat::one());
            if let Some(km) = table.km(&x) {
                assert!(Rat::pow2(-(km as i64)) <= big_m);
                if let Some(k) = table.k(&x) {
                    assert!(km <= k);
                }
            } else {
                assert!(table.k(&x).is_none());
            }
        }
    }

    #[test]
    fn km_map_agrees_with_pointwise_queries() {
        let table = r_table(8, 4096);
        let map = table.km_map(4);
        for x in strings_up_to(4) {
            assert_eq!(map.get(&x).copied(), table.km(&x), "{:?}", x);
        }
    }

    #[test]
    fn big_m_map_agrees_with_pointwise_queries() {
        let table = r_table(8, 4096);
        let map = table.big_m_map(4);
        for x in strings_up_to(4) {
            let pointwise = table.big_m(&x);
            match map.get(&x) {
                Some(v) => assert_eq!(*v, pointwise, "{:?}", x),
                None => assert!(pointwise.is_zero(), "{:?}", x),
            }
        }
    }

    #[test]
    fn halting_programs_satisfy_kraft() {
        let table = r_table(2, 16);
        let halting = table.halting_programs();
        assert_eq!(halting.len(), 1);
        assert_eq!(halting.kraft_sum().unwrap(), Rat::new(1, 4));

        let bigger = r_table(8, 4096).halting_programs();
        assert!(bigger.kraft_sum().unwrap() <= Rat::one());
    }

    #[test]
    fn saturation_reflects_step_budget() {
        assert!(r_table(8, 4096).is_saturated());
        let tight = r_table(8, 3);
        assert!(!tight.is_saturated());
        assert_eq!(tight.max_steps(), 3);
    }

    #[test]
    fn csv_export_shape() {
        let table = r_table(2, 16);
        let mut buf = Vec::new();
        table.export_csv(2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,km,k,bigM_num,bigM_den,budget_L,budget_S");
        assert_eq!(lines.len(), 1 + 7);
        assert!(lines[1].starts_with(",0,2,1,1,"));
        assert!(text.contains("00,inf,inf,"));
    }
}
