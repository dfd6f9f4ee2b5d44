//! The hider's preparation procedures.
//!
//! ρ₁ is built by a coin-flip recursion that uses a single singlet; ρ₀ is
//! either drawn directly from its parity class or prepared as `U|0ⁿ⟩ ⊗
//! U|0ⁿ⟩` for a uniformly random Clifford `U`, which needs no entanglement.

mod clifford;

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::bellcode::{BellString, BellSymbol, Parity, MAX_SYMBOLS};
use crate::dense::{self, C64};
use crate::error::{check_cap, input, Error, Result};
use crate::rational::{one, Rational};
use crate::states::{hiding_state, mixing_p, BellDiagonalState};

pub use clifford::{
    enumerate_cliffords, orbit_counts, pair_projector, random_clifford, Clifford, Pauli,
    StabilizerState, CLIFFORD_CAP, ENUMERATION_CAP, STABILIZER_DENSE_CAP,
};

/// Generator behind every sampled mode.
pub type PrepRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> PrepRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Which procedure produced a sample.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrepPath {
    Recursive,
    ParityDraw,
    Clifford,
}

/// One flip of a biased coin; `outcome` is 0 with probability `bias`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinFlip {
    pub bias: Rational,
    pub outcome: u8,
}

impl Serialize for CoinFlip {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.bias.to_string(), self.outcome).serialize(s)
    }
}

impl Serialize for StabilizerState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let gens = self.generator_strings();
        let mut seq = s.serialize_seq(Some(gens.len()))?;
        for g in &gens {
            seq.serialize_element(g)?;
        }
        seq.end()
    }
}

/// The outcome of one preparation run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrepSample {
    pub bit: u8,
    pub path: PrepPath,
    /// Bell-basis label; for the Clifford path, the result of a simulated
    /// Bell measurement of the prepared product state.
    pub string: BellString,
    /// Alice's and Bob's copies of `U|0ⁿ⟩` on the Clifford path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilizer_pair: Option<(StabilizerState, StabilizerState)>,
    pub ebits: u32,
    pub coin_trace: Vec<CoinFlip>,
}

fn check_prep(n: usize, bit: u8) -> Result<()> {
    if n == 0 {
        return input("block size must be at least 1");
    }
    if bit > 1 {
        return input(format!("hidden bit must be 0 or 1, got {bit}"));
    }
    check_cap("prep block size n", n, MAX_SYMBOLS)
}

fn flip<R: Rng + ?Sized>(bias: &Rational, rng: &mut R) -> Result<u8> {
    let (num, den) = (bias.numer().to_u64(), bias.denom().to_u64());
    let (Some(num), Some(den)) = (num, den) else {
        return Err(Error::Internal(format!("coin bias {bias} out of range")));
    };
    Ok(if rng.random_range(0..den) < num { 0 } else { 1 })
}

/// Uniform string of length `n` with the given singlet parity (rejection
/// from uniform strings; acceptance is at least 1/4).
pub fn parity_draw<R: Rng + ?Sized>(n: usize, parity: Parity, rng: &mut R) -> Result<BellString> {
    check_prep(n, 0)?;
    let mask = if n == 32 { u64::MAX } else { (1u64 << (2 * n)) - 1 };
    loop {
        let s = BellString::from_code(n, rng.random::<u64>() & mask)?;
        if Parity::of(&s) == parity {
            return Ok(s);
        }
    }
}

/// The one-ebit recursion for `b = 1`; `b = 0` is a direct parity-class draw.
pub fn sample_recursive_with<R: Rng + ?Sized>(n: usize, bit: u8, rng: &mut R) -> Result<PrepSample> {
    check_prep(n, bit)?;
    if bit == 0 {
        return Ok(PrepSample {
            bit,
            path: PrepPath::ParityDraw,
            string: parity_draw(n, Parity::Even, rng)?,
            stabilizer_pair: None,
            ebits: 0,
            coin_trace: Vec::new(),
        });
    }
    let mut coin_trace = Vec::new();
    let mut suffix = Vec::new();
    let mut k = n;
    loop {
        let bias = mixing_p(k);
        let outcome = flip(&bias, rng)?;
        coin_trace.push(CoinFlip { bias, outcome });
        if outcome == 0 {
            break;
        }
        suffix.push(parity_draw(1, Parity::Even, rng)?.symbol(0));
        k -= 1;
    }
    let mut symbols: Vec<BellSymbol> = if k > 1 {
        parity_draw(k - 1, Parity::Even, rng)?.symbols().collect()
    } else {
        Vec::new()
    };
    symbols.push(BellSymbol::PsiMinus);
    symbols.extend(suffix.into_iter().rev());
    Ok(PrepSample {
        bit,
        path: PrepPath::Recursive,
        string: BellString::new(&symbols)?,
        stabilizer_pair: None,
        ebits: 1,
        coin_trace,
    })
}

pub fn sample_recursive(n: usize, bit: u8, seed: u64) -> Result<PrepSample> {
    sample_recursive_with(n, bit, &mut rng_from_seed(seed))
}

/// Exact distribution induced by [`sample_recursive_with`], obtained by
/// expanding the coin tree.
pub fn sampler_distribution(n: usize, bit: u8) -> Result<BellDiagonalState> {
    check_prep(n, bit)?;
    if bit == 0 {
        return hiding_state(n, 0);
    }
    let singlet = BellDiagonalState::point_mass(BellString::new(&[BellSymbol::PsiMinus])?);
    let even1 = hiding_state(1, 0)?;
    let mut weights: BTreeMap<BellString, Rational> = BTreeMap::new();
    let mut reach = one();
    for k in (1..=n).rev() {
        let p = mixing_p(k);
        let stop = &reach * &p;
        reach *= one() - &p;
        if stop.is_zero() {
            continue;
        }
        let mut branch = if k > 1 { hiding_state(k - 1, 0)?.tensor(&singlet)? } else { singlet.clone() };
        for _ in k..n {
            branch = branch.tensor(&even1)?;
        }
        for (s, w) in branch.support() {
            *weights.entry(*s).or_insert_with(Rational::zero) += &stop * w;
        }
    }
    if !reach.is_zero() {
        return Err(Error::Internal("coin tree did not terminate".into()));
    }
    BellDiagonalState::from_weights(n, weights)
}

/// Both parties' copies of `U|0ⁿ⟩`.
pub fn clifford_prep_state(u: &Clifford) -> (StabilizerState, StabilizerState) {
    let psi = u.image_of_zero();
    (psi.clone(), psi)
}

/// State vector of a stabilizer state (qubit 0 most significant), fixed up
/// to global phase.
pub fn stabilizer_vector(state: &StabilizerState) -> Result<DVector<C64>> {
    let n = state.n();
    check_cap("stabilizer vector qubits", n, CLIFFORD_CAP)?;
    let dim = 1usize << n;
    let rev = |m: u64| (0..n).fold(0usize, |acc, q| acc | ((((m >> q) & 1) as usize) << (n - 1 - q)));
    let ops: Vec<(usize, usize, C64)> = state
        .generators()
        .iter()
        .map(|g| {
            let y = (g.x & g.z).count_ones();
            let phase = C64::new(0.0, 1.0).powu(y) * if g.sign { -1.0 } else { 1.0 };
            (rev(g.x), rev(g.z), phase)
        })
        .collect();
    for start in 0..dim {
        let mut v = DVector::<C64>::zeros(dim);
        v[start] = C64::new(1.0, 0.0);
        for &(x, z, phase) in &ops {
            let mut gv = DVector::<C64>::zeros(dim);
            for j in 0..dim {
                let sign = if (j & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                gv[j ^ x] += v[j] * phase * sign;
            }
            v = (&v + gv) * C64::new(0.5, 0.0);
        }
        let norm = v.norm();
        if norm > 1e-6 {
            return Ok(v / C64::new(norm, 0.0));
        }
    }
    Err(Error::Internal("stabilizer generators fix no state".into()))
}

/// Probabilities of each Bell-product outcome when measuring `|ψ⟩_A ⊗
/// |ψ⟩_B`, indexed by string code.
pub fn bell_measurement_distribution(psi: &DVector<C64>, n: usize) -> Result<Vec<f64>> {
    if psi.len() != 1 << n {
        return input("state vector does not match register size");
    }
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let mut probs = Vec::with_capacity(1 << (2 * n));
    for code in 0..(1u64 << (2 * n)) {
        let (mut xmask, mut zmask) = (0usize, 0usize);
        for i in 0..n {
            let sym = (code >> (2 * (n - 1 - i))) & 3;
            let bit = 1 << (n - 1 - i);
            if sym & 2 != 0 {
                xmask |= bit;
            }
            if sym & 1 != 0 {
                zmask |= bit;
            }
        }
        let amp: C64 = (0..dim)
            .map(|a| {
                let sign = if (a & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                psi[a] * psi[a ^ xmask] * sign
            })
            .sum();
        probs.push(amp.norm_sqr() * scale);
    }
    Ok(probs)
}

fn draw_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, p) in probs.iter().enumerate() {
        if u < *p {
            return i;
        }
        u -= p;
    }
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

/// ρ₀ via a random Clifford applied to both shares of `|0ⁿ⟩ ⊗ |0ⁿ⟩`; the
/// reported string is a simulated Bell measurement of the product state.
pub fn sample_clifford_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PrepSample> {
    let u = random_clifford(n, rng)?;
    let (alice, bob) = clifford_prep_state(&u);
    let psi = stabilizer_vector(&alice)?;
    let probs = bell_measurement_distribution(&psi, n)?;
    let code = draw_index(&probs, rng) as u64;
    Ok(PrepSample {
        bit: 0,
        path: PrepPath::Clifford,
        string: BellString::from_code(n, code)?,
        stabilizer_pair: Some((alice, bob)),
        ebits: 0,
        coin_trace: Vec::new(),
    })
}

/// Averaging mode for [`verify_clifford_average`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AverageMode {
    Exact,
    Sampled,
}

/// Largest register for the sampled Clifford average.
pub const SAMPLED_AVERAGE_CAP: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliffordAverageReport {
    pub n: usize,
    pub mode: AverageMode,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub distinct_states: usize,
    pub trace_distance: f64,
}

/// Trace distance between the average of `U|0ⁿ⟩⟨0ⁿ|U† ⊗ U|0ⁿ⟩⟨0ⁿ|U†`
/// (over the whole group, or over seeded samples) and ρ₀⁽ⁿ⁾.
pub fn verify_clifford_average(
    n: usize,
    mode: AverageMode,
    samples: usize,
    seed: Option<u64>,
) -> Result<CliffordAverageReport> {
    if n == 0 {
        return input("block size must be at least 1");
    }
    let states: Vec<StabilizerState> = match mode {
        AverageMode::Exact => {
            if n > ENUMERATION_CAP {
                return input(format!("exact Clifford average needs n <= {ENUMERATION_CAP}, got {n}"));
            }
            enumerate_cliffords(n)?.iter().map(Clifford::image_of_zero).collect()
        }
        AverageMode::Sampled => {
            if n > SAMPLED_AVERAGE_CAP {
                return input(format!("sampled Clifford average needs n <= {SAMPLED_AVERAGE_CAP}, got {n}"));
            }
            let Some(seed) = seed else {
                return input("sampled mode requires a seed");
            };
            if samples == 0 {
                return input("sampled mode requires at least one sample");
            }
            let mut rng = rng_from_seed(seed);
            (0..samples)
                .map(|_| random_clifford(n, &mut rng).map(|u| u.image_of_zero()))
                .collect::<Result<_>>()?
        }
    };
    let counts = orbit_counts(&states)?;
    let mut reps: BTreeMap<Vec<(i64, i64)>, StabilizerState> = BTreeMap::new();
    for s in &states {
        let p = s.projector()?;
        let scale = (1u64 << n) as f64;
        let key: Vec<(i64, i64)> = p
            .iter()
            .map(|z| ((z.re * scale).round() as i64, (z.im * scale).round() as i64))
            .collect();
        reps.entry(key).or_insert_with(|| s.clone());
    }
    let total = states.len() as f64;
    let mut avg: Option<dense::DenseOperator> = None;
    for (key, s) in &reps {
        let term = pair_projector(s, s)?.scale(counts[key] as f64 / total);
        avg = Some(match avg {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    let avg = avg.ok_or_else(|| Error::Internal("empty Clifford average".into()))?;
    let target = dense::realize(&hiding_state(n, 0)?)?;
    Ok(CliffordAverageReport {
        n,
        mode,
        samples: states.len(),
        seed: if mode == AverageMode::Sampled { seed } else { None },
        distinct_states: reps.len(),
        trace_distance: dense::trace_distance(&avg, &target)?,
    })
}

/// Exact probability that a single `b = 1` run flips `k` coins before stopping.
pub fn coin_count_distribution(n: usize) -> Vec<Rational> {
    let mut reach = one();
    let mut out = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let p = mixing_p(k);
        out.push(&reach * &p);
        reach *= one() - &p;
    }
    out
}
