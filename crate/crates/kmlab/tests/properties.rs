//! Randomized invariants over the codec, machine, table, environment, and
//! decision layers. Everything here is exact arithmetic, so each property
//! is an equality or inequality, never an approximation.

use kmlab::bits::{off_sequence_set, BinString, PrefixSet};
use kmlab::complexity::{ComplexityTable, EnumerationBudget};
use kmlab::environments::{DetRule, Environment};
use kmlab::loss::LossMatrix;
use kmlab::machines::{
    decode_block, elias_gamma_decode, elias_gamma_encode, encode_block, in_block_alphabet,
    Machine, MonotoneMachine,
};
use kmlab::predict::{
    act, conditional, expected_loss, self_opt_gap, PosteriorVector, PredictiveFunction,
};
use kmlab::rational::Rat;
use proptest::prelude::*;
use std::sync::OnceLock;

fn table_l10() -> &'static ComplexityTable {
    static T: OnceLock<ComplexityTable> = OnceLock::new();
    T.get_or_init(|| ComplexityTable::build(&Machine::reference(), EnumerationBudget::new(10, 1024)))
}

fn table_l8() -> &'static ComplexityTable {
    static T: OnceLock<ComplexityTable> = OnceLock::new();
    T.get_or_init(|| ComplexityTable::build(&Machine::reference(), EnumerationBudget::new(8, 1024)))
}

fn bin_string(max_len: usize) -> impl Strategy<Value = BinString> {
    prop::collection::vec(any::<bool>(), 0..=max_len).prop_map(BinString::from_bits)
}

fn prob() -> impl Strategy<Value = Rat> {
    (1u64..=48).prop_flat_map(|den| {
        (0..=den).prop_map(move |num| Rat::new(num as i64, den as i64))
    })
}

fn loss_matrix() -> impl Strategy<Value = LossMatrix> {
    prop::collection::vec((prob(), prob()), 2..=4)
        .prop_map(|rows| {
            let actions = rows.into_iter().map(|(a, b)| [a, b]).collect();
            LossMatrix::new(actions).expect("entries are probabilities")
        })
}

fn environment() -> impl Strategy<Value = Environment> {
    prop_oneof![
        Just(Environment::bernoulli(Rat::new(1, 2)).unwrap()),
        Just(Environment::bernoulli(Rat::new(1, 3)).unwrap()),
        Just(Environment::bernoulli(Rat::new(7, 8)).unwrap()),
        Just(Environment::deterministic(DetRule::Zeros)),
        Just(Environment::deterministic(DetRule::Alternating)),
        Just(Environment::block(2).unwrap()),
        Just(Environment::block(3).unwrap()),
    ]
}

proptest! {
    #[test]
    fn gamma_code_round_trips_and_has_the_closed_form_length(n in 1u64..=100_000) {
        let code = elias_gamma_encode(n);
        let b = 64 - n.leading_zeros() as usize;
        prop_assert_eq!(code.len(), 2 * b - 1);
        prop_assert_eq!(elias_gamma_decode(&code, 0), Some((n, code.len())));
    }

    /// Concatenated codes decode sequentially, which is how the repeat
    /// opcode consumes them mid-program.
    #[test]
    fn gamma_codes_decode_from_a_stream(n in 1u64..=500, m in 1u64..=500, tail in bin_string(6)) {
        let stream = elias_gamma_encode(n).concat(&elias_gamma_encode(m)).concat(&tail);
        let (first, pos) = elias_gamma_decode(&stream, 0).unwrap();
        prop_assert_eq!(first, n);
        let (second, _) = elias_gamma_decode(&stream, pos).unwrap();
        prop_assert_eq!(second, m);
    }

    #[test]
    fn block_code_round_trips_both_ways(s in 2u32..=6, value in 0u64..64) {
        let word = BinString::from_value(s as usize, value % (1 << s));
        let block = decode_block(s, &word).unwrap();
        prop_assert_eq!(block.len(), s as usize + 1);
        prop_assert!(in_block_alphabet(s, &block));
        prop_assert_eq!(encode_block(s, &block).unwrap(), word);
    }

    /// Spot-checks monotonicity beyond the exhaustive sweep's length.
    #[test]
    fn reference_machine_output_is_monotone(p in bin_string(14), e in bin_string(4)) {
        let machine = Machine::reference();
        let base = machine.run(&p, 4096);
        let extended = machine.run(&p.concat(&e), 4096);
        prop_assert!(base.output.is_prefix_of(&extended.output));
    }

    /// A halted run is insensitive to everything past its consumed prefix.
    #[test]
    fn halted_runs_ignore_trailing_bits(p in bin_string(14), e in bin_string(6)) {
        let machine = Machine::reference();
        let base = machine.run(&p, 4096);
        prop_assume!(base.halted);
        let extended = machine.run(&p.concat(&e), 4096);
        prop_assert!(extended.halted);
        prop_assert_eq!(extended.consumed, base.consumed);
        prop_assert_eq!(extended.output, base.output);
    }

    #[test]
    fn off_sequence_deviations_form_a_prefix_free_set(x in bin_string(12)) {
        prop_assume!(!x.is_empty());
        let set = off_sequence_set(&x);
        prop_assert_eq!(set.len(), x.len());
        prop_assert!(set.kraft_sum().unwrap() <= Rat::one());
    }

    #[test]
    fn greedy_antichains_satisfy_kraft(candidates in prop::collection::vec(bin_string(8), 0..40)) {
        let mut set = PrefixSet::new();
        for c in candidates {
            let clashes = set
                .iter()
                .any(|kept| kept.is_prefix_of(&c) || c.is_prefix_of(kept));
            if !clashes {
                set.insert(c);
            }
        }
        prop_assert!(set.is_prefix_free());
        if !set.is_empty() {
            prop_assert!(set.kraft_sum().unwrap() <= Rat::one());
        }
    }

    /// Raising the program-length cap can only shorten descriptions and
    /// grow the prior mass.
    #[test]
    fn larger_budgets_dominate_smaller_ones(x in bin_string(5)) {
        let small = table_l8();
        let large = table_l10();
        if let Some(km_small) = small.km(&x) {
            prop_assert!(large.km(&x).unwrap() <= km_small);
        }
        if let Some(k_small) = small.k(&x) {
            prop_assert!(large.k(&x).unwrap() <= k_small);
        }
        prop_assert!(large.big_m(&x) >= small.big_m(&x));
    }

    #[test]
    fn km_never_drops_along_a_prefix(x in bin_string(6)) {
        let table = table_l10();
        if let Some(km) = table.km(&x) {
            for t in 0..x.len() {
                prop_assert!(table.km(&x.prefix(t)).unwrap() <= km);
            }
        }
    }

    #[test]
    fn big_m_is_a_semimeasure_pointwise(x in bin_string(5)) {
        let table = table_l10();
        let children = table.big_m(&x.with_bit(false)) + table.big_m(&x.with_bit(true));
        prop_assert!(children <= table.big_m(&x));
    }

    #[test]
    fn environments_are_measures(env in environment(), x in bin_string(8)) {
        prop_assert_eq!(env.prob(&BinString::empty()), Rat::one());
        let split = env.prob(&x.with_bit(false)) + env.prob(&x.with_bit(true));
        prop_assert_eq!(split, env.prob(&x));
    }

    #[test]
    fn sampling_is_seed_deterministic_and_on_support(
        env in environment(),
        n in 1usize..=32,
        seed in 0u64..1000,
    ) {
        let path = env.sample(n, seed);
        prop_assert_eq!(path.len(), n);
        prop_assert_eq!(env.sample(n, seed), path.clone());
        prop_assert!(env.prob(&path) > Rat::zero());
    }

    #[test]
    fn normalized_predictor_conditionals_sum_to_one(x in bin_string(4)) {
        let norm = PredictiveFunction::m_from_table(table_l10(), 5).normalized();
        let split = conditional(&norm, &x, false).unwrap() + conditional(&norm, &x, true).unwrap();
        prop_assert_eq!(split, Rat::one());
    }

    /// The per-step regret of acting on b instead of mu is nonnegative and
    /// bounded by the posteriors' L1 distance.
    #[test]
    fn regret_sits_inside_the_total_variation_bound(
        pb in prob(),
        pm in prob(),
        loss in loss_matrix(),
    ) {
        let b = PosteriorVector::new(BinString::empty(), Rat::one() - pb.clone(), pb).unwrap();
        let mu = PosteriorVector::new(BinString::empty(), Rat::one() - pm.clone(), pm).unwrap();
        let (gap, bound) = self_opt_gap(&b, &mu, &loss).unwrap();
        prop_assert!(gap >= Rat::zero());
        prop_assert!(gap <= bound);
    }

    #[test]
    fn informed_action_minimizes_expected_loss(pm in prob(), loss in loss_matrix()) {
        let mu = PosteriorVector::new(BinString::empty(), Rat::one() - pm.clone(), pm).unwrap();
        let best = expected_loss(&mu, &loss, act(&loss, &mu).unwrap()).unwrap();
        for a in 0..loss.num_actions() {
            prop_assert!(best <= expected_loss(&mu, &loss, a).unwrap());
        }
    }

    /// Affine rescaling of the loss matrix never changes the chosen action,
    /// ties included.
    #[test]
    fn action_choice_is_affine_invariant(
        pb in prob(),
        loss in loss_matrix(),
        a_num in 1i64..=4,
        b_num in 0i64..=3,
    ) {
        let scale = Rat::new(a_num, 8);
        let shift = Rat::new(b_num, 8);
        let rescaled = loss.affine(&scale, &shift).unwrap();
        let post = PosteriorVector::new(BinString::empty(), Rat::one() - pb.clone(), pb).unwrap();
        prop_assert_eq!(act(&loss, &post).unwrap(), act(&rescaled, &post).unwrap());
    }
}
