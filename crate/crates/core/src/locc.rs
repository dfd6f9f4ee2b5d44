//! Exact simulation of local measurement attacks and of the joint unlock.
//!
//! Alice and Bob each measure their half of a block in one of the Pauli
//! bases, possibly choosing bases from earlier outcomes they have exchanged.
//! For a Bell pair the joint outcome distribution only depends on the Bell
//! symbol and the basis pair, so transcripts are enumerated exactly with
//! rational weights.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::bellcode::{singlet_count, BellString, BellSymbol};
use crate::error::{check_cap, input, Result};
use crate::povmopt::mutual_info_bound;
use crate::prep::rng_from_seed;
use crate::rational::{format_rational, frac, one, to_f64, zero, Rational};
use crate::states::{hiding_state, BellDiagonalState};
use crate::tolerance::BOUND_TOL;

/// Largest block size for exact transcript enumeration.
pub const LOCC_CAP: usize = 5;

/// Local measurement basis.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn letter(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }
}

/// What the parties do with one block.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockAction {
    Skip,
    Measure { alice: Basis, bob: Basis },
}

impl BlockAction {
    pub fn both(b: Basis) -> BlockAction {
        BlockAction::Measure { alice: b, bob: b }
    }
}

/// `⟨σ⊗σ⟩` for a Bell symbol and a same-basis measurement.
pub fn same_basis_correlation(sym: BellSymbol, basis: Basis) -> i8 {
    use BellSymbol::*;
    match (sym, basis) {
        (PsiMinus, _) => -1,
        (PhiPlus, Basis::Y) | (PhiMinus, Basis::X) | (PsiPlus, Basis::Z) => -1,
        _ => 1,
    }
}

/// Probability of outcomes `(a, b) ∈ {±1}²` on one Bell pair.
pub fn outcome_probability(sym: BellSymbol, alice: Basis, bob: Basis, a: i8, b: i8) -> Rational {
    if alice != bob {
        return frac(1, 4);
    }
    let c = same_basis_correlation(sym, alice) * a * b;
    frac(1 + c as i64, 4)
}

/// One block of a transcript; outcomes are 0 for a skipped block.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockRecord {
    pub action: BlockAction,
    pub alice_outcome: i8,
    pub bob_outcome: i8,
}

impl fmt::Display for BlockRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |x: i8| if x > 0 { '+' } else { '-' };
        match self.action {
            BlockAction::Skip => write!(f, "--"),
            BlockAction::Measure { alice, bob } => write!(
                f,
                "{}{}{}{}",
                alice.letter(),
                sign(self.alice_outcome),
                bob.letter(),
                sign(self.bob_outcome)
            ),
        }
    }
}

/// Ordered block records plus the final guess.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyTranscript {
    pub blocks: Vec<BlockRecord>,
    pub guess: Option<u8>,
}

impl fmt::Display for StrategyTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join("."))?;
        if let Some(g) = self.guess {
            write!(f, "->{g}")?;
        }
        Ok(())
    }
}

impl Serialize for StrategyTranscript {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A local measurement strategy. The basis rule sees only the block index
/// and the outcomes already announced, so every representable strategy is
/// LOCC by construction.
pub trait MeasurementStrategy {
    fn name(&self) -> String;

    /// Distribution over actions for block `index` given the records of the
    /// earlier blocks. Weights must be non-negative and sum to one.
    fn actions(&self, index: usize, n: usize, prefix: &[BlockRecord]) -> Vec<(Rational, BlockAction)>;
}

/// The strategies shipped with the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinStrategy {
    AllZ,
    AllX,
    AllY,
    /// Both parties measure the same uniformly random basis per block.
    MatchedRandom,
    /// Each party draws its own bases from a seeded generator.
    SeededIndependent(u64),
    /// Z on the first block, then XX after an anticorrelated block and YY
    /// after a correlated one.
    Adaptive,
    /// Measures nothing.
    ConstantGuess,
}

/// Seed used by [`built_in_strategies`] for the seeded strategy.
pub const DEFAULT_STRATEGY_SEED: u64 = 0;

pub const STRATEGY_NAMES: [&str; 7] =
    ["all-z", "all-x", "all-y", "matched-random", "seeded-independent", "adaptive", "constant-guess"];

impl BuiltinStrategy {
    pub fn parse(name: &str, seed: Option<u64>) -> Result<BuiltinStrategy> {
        Ok(match name {
            "all-z" => BuiltinStrategy::AllZ,
            "all-x" => BuiltinStrategy::AllX,
            "all-y" => BuiltinStrategy::AllY,
            "matched-random" => BuiltinStrategy::MatchedRandom,
            "seeded-independent" => match seed {
                Some(s) => BuiltinStrategy::SeededIndependent(s),
                None => return input("seeded-independent requires a seed"),
            },
            "adaptive" => BuiltinStrategy::Adaptive,
            "constant-guess" => BuiltinStrategy::ConstantGuess,
            other => return input(format!("unknown strategy '{other}' (expected one of {})", STRATEGY_NAMES.join(", "))),
        })
    }

    fn seeded_bases(seed: u64, index: usize) -> (Basis, Basis) {
        let mut rng = rng_from_seed(seed);
        let mut pick = || Basis::ALL[rng.random_range(0..3)];
        let mut out = (Basis::Z, Basis::Z);
        for _ in 0..=index {
            out = (pick(), pick());
        }
        out
    }
}

impl MeasurementStrategy for BuiltinStrategy {
    fn name(&self) -> String {
        match self {
            BuiltinStrategy::AllZ => "all-z".into(),
            BuiltinStrategy::AllX => "all-x".into(),
            BuiltinStrategy::AllY => "all-y".into(),
            BuiltinStrategy::MatchedRandom => "matched-random".into(),
            BuiltinStrategy::SeededIndependent(seed) => format!("seeded-independent({seed})"),
            BuiltinStrategy::Adaptive => "adaptive".into(),
            BuiltinStrategy::ConstantGuess => "constant-guess".into(),
        }
    }

    fn actions(&self, index: usize, _n: usize, prefix: &[BlockRecord]) -> Vec<(Rational, BlockAction)> {
        let det = |a: BlockAction| vec![(one(), a)];
        match self {
            BuiltinStrategy::AllZ => det(BlockAction::both(Basis::Z)),
            BuiltinStrategy::AllX => det(BlockAction::both(Basis::X)),
            BuiltinStrategy::AllY => det(BlockAction::both(Basis::Y)),
            BuiltinStrategy::MatchedRandom => {
                Basis::ALL.iter().map(|b| (frac(1, 3), BlockAction::both(*b))).collect()
            }
            BuiltinStrategy::SeededIndependent(seed) => {
                let (alice, bob) = Self::seeded_bases(*seed, index);
                det(BlockAction::Measure { alice, bob })
            }
            BuiltinStrategy::Adaptive => match prefix.last() {
                None => det(BlockAction::both(Basis::Z)),
                Some(r) if r.alice_outcome * r.bob_outcome < 0 => det(BlockAction::both(Basis::X)),
                Some(_) => det(BlockAction::both(Basis::Y)),
            },
            BuiltinStrategy::ConstantGuess => det(BlockAction::Skip),
        }
    }
}

pub fn built_in_strategies() -> Vec<BuiltinStrategy> {
    vec![
        BuiltinStrategy::AllZ,
        BuiltinStrategy::AllX,
        BuiltinStrategy::AllY,
        BuiltinStrategy::MatchedRandom,
        BuiltinStrategy::SeededIndependent(DEFAULT_STRATEGY_SEED),
        BuiltinStrategy::Adaptive,
        BuiltinStrategy::ConstantGuess,
    ]
}

const OUTCOMES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Exact distribution over transcripts (without guesses) when `strategy`
/// is run on `state`.
///
/// Blocks are processed left to right; for each transcript prefix the
/// weights of the not-yet-measured suffix strings are carried along, so no
/// string is expanded more than once per prefix.
pub fn outcome_distribution<S: MeasurementStrategy + ?Sized>(
    strategy: &S,
    state: &BellDiagonalState,
) -> Result<BTreeMap<StrategyTranscript, Rational>> {
    let n = state.n();
    check_cap("attack block size n", n, LOCC_CAP)?;
    let mut layer: Vec<(Vec<BlockRecord>, Vec<Rational>)> = vec![(Vec::new(), state.dense_weights()?)];
    for index in 0..n {
        let rest = n - index - 1;
        let suffixes = 1usize << (2 * rest);
        let mut next = Vec::new();
        for (prefix, weights) in layer {
            let mut merged: BTreeMap<BlockAction, Rational> = BTreeMap::new();
            for (p, a) in strategy.actions(index, n, &prefix) {
                *merged.entry(a).or_insert_with(zero) += p;
            }
            for (action, p) in merged {
                let outcomes: &[(i8, i8)] = match action {
                    BlockAction::Skip => &[(0, 0)],
                    BlockAction::Measure { .. } => &OUTCOMES,
                };
                for &(a, b) in outcomes {
                    let mut reduced = vec![zero(); suffixes];
                    let mut any = false;
                    for sym in BellSymbol::ALL {
                        let q = match action {
                            BlockAction::Skip => one(),
                            BlockAction::Measure { alice, bob } => outcome_probability(sym, alice, bob, a, b),
                        };
                        if q == zero() {
                            continue;
                        }
                        let q = &q * &p;
                        let base = (sym.bits() as usize) << (2 * rest);
                        for (suf, slot) in reduced.iter_mut().enumerate() {
                            let w = &weights[base | suf];
                            if *w != zero() {
                                *slot += w * &q;
                                any = true;
                            }
                        }
                    }
                    if any {
                        let mut t = prefix.clone();
                        t.push(BlockRecord { action, alice_outcome: a, bob_outcome: b });
                        next.push((t, reduced));
                    }
                }
            }
        }
        layer = next;
    }
    let mut out = BTreeMap::new();
    for (blocks, w) in layer {
        let mass = w.into_iter().next().unwrap_or_else(zero);
        *out.entry(StrategyTranscript { blocks, guess: None }).or_insert_with(zero) += mass;
    }
    Ok(out)
}

/// Mutual information and its comparison with δ·H(B).
#[derive(Clone, Debug, PartialEq)]
pub struct InfoReport {
    pub strategy: String,
    pub n: usize,
    /// P(B = 0).
    pub prior: Rational,
    /// I(B; transcript).
    pub mutual_info_bits: f64,
    /// I(B; maximum-likelihood guess).
    pub guess_info_bits: f64,
    pub bound_bits: f64,
    pub satisfied: bool,
    /// Probability that the maximum-likelihood guess is correct.
    pub guess_success: Rational,
}

impl Serialize for InfoReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("InfoReport", 8)?;
        st.serialize_field("strategy", &self.strategy)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("prior", &format_rational(&self.prior))?;
        st.serialize_field("mutual_info_bits", &self.mutual_info_bits)?;
        st.serialize_field("bound_bits", &self.bound_bits)?;
        st.serialize_field("satisfied", &self.satisfied)?;
        st.serialize_field("guess_info_bits", &self.guess_info_bits)?;
        st.serialize_field("guess_success", &format_rational(&self.guess_success))?;
        st.end()
    }
}

/// I(B; Y) in bits for a joint distribution given as `P(y | b)` tables.
fn information<K: Ord + Clone>(
    prior: &Rational,
    given0: &BTreeMap<K, Rational>,
    given1: &BTreeMap<K, Rational>,
) -> f64 {
    let pi1 = one() - prior;
    let mut keys: Vec<&K> = given0.keys().chain(given1.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut total = 0.0;
    for k in keys {
        let p0 = given0.get(k).cloned().unwrap_or_else(zero);
        let p1 = given1.get(k).cloned().unwrap_or_else(zero);
        let py = prior * &p0 + &pi1 * &p1;
        for (pi, pc) in [(prior, &p0), (&pi1, &p1)] {
            if *pc != zero() {
                total += to_f64(&(pi * pc)) * to_f64(&(pc / &py)).log2();
            }
        }
    }
    total.max(0.0)
}

/// Maximum-likelihood guess per transcript (ties go to 0).
pub fn ml_guesses(
    prior: &Rational,
    given0: &BTreeMap<StrategyTranscript, Rational>,
    given1: &BTreeMap<StrategyTranscript, Rational>,
) -> BTreeMap<StrategyTranscript, u8> {
    let pi1 = one() - prior;
    given0
        .keys()
        .chain(given1.keys())
        .map(|t| {
            let p0 = given0.get(t).map(|p| prior * p).unwrap_or_else(zero);
            let p1 = given1.get(t).map(|p| &pi1 * p).unwrap_or_else(zero);
            (t.clone(), if p1 > p0 { 1 } else { 0 })
        })
        .collect()
}

/// Runs `strategy` on both hiding states of size `n` and scores it.
pub fn mutual_information<S: MeasurementStrategy + ?Sized>(
    strategy: &S,
    n: usize,
    prior: &Rational,
) -> Result<InfoReport> {
    if n == 0 {
        return input("block size must be at least 1");
    }
    let bound_bits = mutual_info_bound(n, prior)?;
    let given0 = outcome_distribution(strategy, &hiding_state(n, 0)?)?;
    let given1 = outcome_distribution(strategy, &hiding_state(n, 1)?)?;
    let mutual_info_bits = information(prior, &given0, &given1);
    let guesses = ml_guesses(prior, &given0, &given1);
    let fold = |given: &BTreeMap<StrategyTranscript, Rational>| {
        let mut m: BTreeMap<u8, Rational> = BTreeMap::new();
        for (t, p) in given {
            *m.entry(guesses[t]).or_insert_with(zero) += p;
        }
        m
    };
    let (g0, g1) = (fold(&given0), fold(&given1));
    let guess_info_bits = information(prior, &g0, &g1);
    let guess_success =
        prior * g0.get(&0).cloned().unwrap_or_else(zero) + (one() - prior) * g1.get(&1).cloned().unwrap_or_else(zero);
    Ok(InfoReport {
        strategy: strategy.name(),
        n,
        prior: prior.clone(),
        mutual_info_bits,
        guess_info_bits,
        bound_bits,
        satisfied: mutual_info_bits <= bound_bits + BOUND_TOL,
        guess_success,
    })
}

/// Transcripts with their ML guesses attached, weighted by the joint
/// probability of (bit, transcript).
pub fn guessed_transcripts<S: MeasurementStrategy + ?Sized>(
    strategy: &S,
    n: usize,
    prior: &Rational,
) -> Result<Vec<(StrategyTranscript, Rational, Rational)>> {
    let given0 = outcome_distribution(strategy, &hiding_state(n, 0)?)?;
    let given1 = outcome_distribution(strategy, &hiding_state(n, 1)?)?;
    let guesses = ml_guesses(prior, &given0, &given1);
    Ok(guesses
        .into_iter()
        .map(|(t, g)| {
            let p0 = given0.get(&t).map(|p| prior * p).unwrap_or_else(zero);
            let p1 = given1.get(&t).map(|p| (one() - prior) * p).unwrap_or_else(zero);
            (StrategyTranscript { blocks: t.blocks, guess: Some(g) }, p0, p1)
        })
        .collect())
}

/// Joint Bell measurement followed by singlet-count parity.
pub fn bell_unlock(s: &BellString) -> u8 {
    (singlet_count(s) % 2) as u8
}
