use bellhide_core::dense;
use bellhide_core::locc::{self, built_in_strategies};
use bellhide_core::multibit;
use bellhide_core::povmopt::{self, BellDiagonalPovm, Number};
use bellhide_core::prep;
use bellhide_core::rational::{frac, int, one, Rational};
use bellhide_core::states::{hiding_state, werner_form};
use bellhide_core::Parity;
use proptest::prelude::*;

fn exact(x: &Number) -> Rational {
    match x {
        Number::Exact(r) => r.clone(),
        Number::Float(_) => panic!("reduced LP returns exact values"),
    }
}

#[test]
fn lp_witness_is_ppt_and_attains_optimum() {
    for n in 1..=3 {
        let cert = povmopt::optimize_reduced(n).unwrap();
        let profile: Vec<Rational> = cert.witness_by_n11.iter().map(exact).collect();
        let povm = BellDiagonalPovm::from_profile(n, &profile).unwrap();
        assert!(povmopt::is_ppt_feasible(&povm).unwrap());
        assert_eq!(povmopt::advantage(&povm), exact(&cert.lp_optimum_minus_1));
        let m0 = dense::realize_diagonal(n, &povm.coefficients_f64()).unwrap();
        let m1 = dense::DenseOperator::identity(n).unwrap().sub(&m0).unwrap();
        assert!(dense::is_ppt(&m0).unwrap() && dense::is_ppt(&m1).unwrap());
    }
}

#[test]
fn local_strategies_never_beat_the_ppt_optimum() {
    let half = frac(1, 2);
    for n in 1..=4 {
        let opt = exact(&povmopt::optimize_reduced(n).unwrap().lp_optimum_minus_1);
        for s in built_in_strategies() {
            let r = locc::mutual_information(&s, n, &half).unwrap();
            // p00 + p11 - 1 = 2·P(correct) - 1 under a uniform prior
            let adv = int(2) * &r.guess_success - one();
            assert!(adv <= opt, "{} at n={n}: {adv} > {opt}", r.strategy);
        }
    }
}

#[test]
fn sampler_distribution_realizes_werner_form() {
    for n in 1..=3 {
        for bit in 0..=1 {
            let d = prep::sampler_distribution(n, bit).unwrap();
            let a = dense::realize(&d).unwrap();
            let b = dense::realize_werner(&werner_form(n, bit).unwrap()).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }
}

#[test]
fn multibit_blocks_unlock_from_prepared_samples() {
    let mut rng = prep::rng_from_seed(21);
    for bits in [vec![1u8, 0, 1], vec![0, 0], vec![1]] {
        let enc = multibit::encode(&bits, 2).unwrap();
        for (i, &b) in bits.iter().enumerate() {
            assert_eq!(enc.block_marginal(i).unwrap(), hiding_state(2, b).unwrap());
        }
        let sampled = enc.sample(&mut rng).unwrap();
        assert_eq!(multibit::unlock_all(&sampled).unwrap(), bits);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prepared_strings_lie_in_the_support(n in 1usize..=5, bit in 0u8..=1, seed: u64) {
        let s = prep::sample_recursive(n, bit, seed).unwrap();
        let state = hiding_state(n, bit).unwrap();
        prop_assert!(state.weight(&s.string) > Rational::from_integer(0.into()));
    }

    #[test]
    fn clifford_samples_measure_even(n in 1usize..=3, seed: u64) {
        let s = prep::sample_clifford_with(n, &mut prep::rng_from_seed(seed)).unwrap();
        prop_assert_eq!(Parity::of(&s.string), Parity::Even);
        prop_assert_eq!(locc::bell_unlock(&s.string), 0);
        let (a, b) = s.stabilizer_pair.unwrap();
        prop_assert_eq!(a, b);
    }
}
