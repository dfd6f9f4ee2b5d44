//! The two hiding states ρ₀⁽ⁿ⁾ (even singlet count) and ρ₁⁽ⁿ⁾ (odd singlet
//! count), held as exact distributions over Bell strings.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bellcode::{
    enumerate_strings, parity_class_size, BellString, BellSymbol, Parity, DEFAULT_ENUMERATION_CAP,
};
use crate::error::{check_cap, input, Error, Result};
use crate::rational::{frac, int, one, pow2, zero, Rational, RationalRecord};

/// A Bell-diagonal density operator: a probability distribution over
/// length-`n` Bell strings. Zero weights are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellDiagonalState {
    n: usize,
    weights: BTreeMap<BellString, Rational>,
}

impl BellDiagonalState {
    /// Validates non-negativity, common length and unit total mass.
    pub fn from_weights(n: usize, weights: BTreeMap<BellString, Rational>) -> Result<Self> {
        if n == 0 {
            return input("state block size must be at least 1");
        }
        let mut total = zero();
        for (s, w) in &weights {
            if s.len() != n {
                return input(format!("string {s} has length {}, expected {n}", s.len()));
            }
            if w.is_negative() {
                return input(format!("negative weight on {s}"));
            }
            total += w;
        }
        if !total.is_one() {
            return input(format!("weights sum to {total}, expected 1"));
        }
        let weights = weights.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        Ok(BellDiagonalState { n, weights })
    }

    pub fn point_mass(s: BellString) -> Self {
        BellDiagonalState {
            n: s.len(),
            weights: BTreeMap::from([(s, one())]),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, s: &BellString) -> Rational {
        self.weights.get(s).cloned().unwrap_or_else(zero)
    }

    /// Strings with non-zero weight, in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = (&BellString, &Rational)> {
        self.weights.iter()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Weights as a dense vector indexed by string code.
    pub fn dense_weights(&self) -> Result<Vec<Rational>> {
        check_cap("dense weight vector n", self.n, DEFAULT_ENUMERATION_CAP)?;
        let mut v = vec![zero(); 1usize << (2 * self.n)];
        for (s, w) in &self.weights {
            v[s.code() as usize] = w.clone();
        }
        Ok(v)
    }

    /// ρ_self ⊗ ρ_other with `other`'s blocks appended on the right.
    pub fn tensor(&self, other: &BellDiagonalState) -> Result<BellDiagonalState> {
        let mut weights = BTreeMap::new();
        for (a, wa) in &self.weights {
            for (b, wb) in &other.weights {
                weights.insert(a.concat(b)?, wa * wb);
            }
        }
        Ok(BellDiagonalState { n: self.n + other.n, weights })
    }

    /// Convex combination `t·self + (1−t)·other`.
    pub fn mix(&self, t: &Rational, other: &BellDiagonalState) -> Result<BellDiagonalState> {
        if self.n != other.n {
            return input(format!("cannot mix states of size {} and {}", self.n, other.n));
        }
        if t.is_negative() || t > &one() {
            return input(format!("mixing weight {t} outside [0, 1]"));
        }
        let s = one() - t;
        let mut weights: BTreeMap<BellString, Rational> = BTreeMap::new();
        for (k, w) in &self.weights {
            *weights.entry(*k).or_insert_with(zero) += t * w;
        }
        for (k, w) in &other.weights {
            *weights.entry(*k).or_insert_with(zero) += &s * w;
        }
        weights.retain(|_, w| !w.is_zero());
        Ok(BellDiagonalState { n: self.n, weights })
    }

    /// Marginal distribution of `len` consecutive blocks starting at `start`.
    pub fn marginal(&self, start: usize, len: usize) -> Result<BellDiagonalState> {
        if len == 0 || start + len > self.n {
            return input(format!("block range {start}..{} outside 0..{}", start + len, self.n));
        }
        let shift = 2 * (self.n - start - len);
        let m = (1u64 << (2 * len)) - 1;
        let mut weights: BTreeMap<BellString, Rational> = BTreeMap::new();
        for (s, w) in &self.weights {
            let sub = BellString::from_code(len, (s.code() >> shift) & m)?;
            *weights.entry(sub).or_insert_with(zero) += w;
        }
        Ok(BellDiagonalState { n: len, weights })
    }

    /// Exact total mass (1 for every validly built state).
    pub fn total_mass(&self) -> Rational {
        self.weights.values().fold(zero(), |acc, w| acc + w)
    }

    pub fn to_record(&self, bit: Option<u8>) -> StateRecord {
        StateRecord {
            n: self.n,
            bit,
            weights: self
                .weights
                .iter()
                .map(|(s, w)| {
                    let r = RationalRecord::from(w);
                    WeightRecord { string: *s, num: r.num, den: r.den }
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &StateRecord) -> Result<BellDiagonalState> {
        let mut weights = BTreeMap::new();
        for w in &rec.weights {
            let r = Rational::try_from(&RationalRecord { num: w.num.clone(), den: w.den.clone() })?;
            if weights.insert(w.string, r).is_some() {
                return Err(Error::Parse(format!("duplicate string {}", w.string)));
            }
        }
        BellDiagonalState::from_weights(rec.n, weights)
    }
}

/// JSON form: `{ "n", "bit", "weights": [{"string", "num", "den"}] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bit: Option<u8>,
    pub weights: Vec<WeightRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightRecord {
    pub string: BellString,
    pub num: serde_json::Value,
    pub den: serde_json::Value,
}

fn check_bit(bit: u8) -> Result<()> {
    if bit > 1 {
        return input(format!("hidden bit must be 0 or 1, got {bit}"));
    }
    Ok(())
}

/// Uniform mixture over all length-`n` strings whose singlet count has parity `bit`.
pub fn hiding_state(n: usize, bit: u8) -> Result<BellDiagonalState> {
    check_bit(bit)?;
    let parity = Parity::from_bit(bit);
    let w = frac(1, parity_class_size(n, parity) as i64);
    let weights = enumerate_strings(n)?
        .into_iter()
        .filter(|s| Parity::of(s) == parity)
        .map(|s| (s, w.clone()))
        .collect();
    Ok(BellDiagonalState { n, weights })
}

/// q_n = (2^{n−1} − 1) / (2(2^n + 1)): weight of the `ρ₁⁽ⁿ⁻¹⁾ ⊗ singlet` branch of ρ₀⁽ⁿ⁾.
pub fn mixing_q(n: usize) -> Rational {
    assert!(n >= 1);
    let n = n as u32;
    (pow2(n - 1) - one()) / (int(2) * (pow2(n) + one()))
}

/// p_n = (2^{n−1} + 1) / (2(2^n − 1)): weight of the `ρ₀⁽ⁿ⁻¹⁾ ⊗ singlet` branch of ρ₁⁽ⁿ⁾.
pub fn mixing_p(n: usize) -> Rational {
    assert!(n >= 1);
    let n = n as u32;
    (pow2(n - 1) + one()) / (int(2) * (pow2(n) - one()))
}

/// Builds ρ_b⁽ⁿ⁾ by the one-block-at-a-time recursion
/// `ρ₀⁽ⁿ⁾ = q_n ρ₁⁽ⁿ⁻¹⁾⊗ρ₁⁽¹⁾ + (1−q_n) ρ₀⁽ⁿ⁻¹⁾⊗ρ₀⁽¹⁾` and
/// `ρ₁⁽ⁿ⁾ = p_n ρ₀⁽ⁿ⁻¹⁾⊗ρ₁⁽¹⁾ + (1−p_n) ρ₁⁽ⁿ⁻¹⁾⊗ρ₀⁽¹⁾`.
pub fn recurrence_state(n: usize, bit: u8) -> Result<BellDiagonalState> {
    check_bit(bit)?;
    check_cap("recurrence n", n, DEFAULT_ENUMERATION_CAP)?;
    if n == 0 {
        return input("block size must be at least 1");
    }
    let base0 = hiding_state(1, 0)?;
    let base1 = hiding_state(1, 1)?;
    let (mut even, mut odd) = (base0.clone(), base1.clone());
    for k in 2..=n {
        let new_even = odd.tensor(&base1)?.mix(&mixing_q(k), &even.tensor(&base0)?)?;
        let new_odd = even.tensor(&base1)?.mix(&mixing_p(k), &odd.tensor(&base0)?)?;
        even = new_even;
        odd = new_odd;
    }
    Ok(if bit == 0 { even } else { odd })
}

/// `identity_coeff · I + h_coeff · H` with `H = (𝟙⊗T)[|Φ⁺⟩⟨Φ⁺|^{⊗n}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WernerForm {
    pub n: usize,
    pub identity_coeff: Rational,
    pub h_coeff: Rational,
}

impl WernerForm {
    /// `identity_coeff · 4^n + h_coeff · Tr H`, with `Tr H = 1`.
    pub fn trace(&self) -> Rational {
        &self.identity_coeff * pow2(2 * self.n as u32) + &self.h_coeff
    }
}

/// ρ₀ ∝ I + 2ⁿH and ρ₁ ∝ I − 2ⁿH, normalized to unit trace.
pub fn werner_form(n: usize, bit: u8) -> Result<WernerForm> {
    check_bit(bit)?;
    if n == 0 {
        return input("block size must be at least 1");
    }
    let four = pow2(2 * n as u32);
    let two = pow2(n as u32);
    let (identity_coeff, h_coeff) = if bit == 0 {
        let norm = &four + &two;
        (one() / &norm, &two / &norm)
    } else {
        let norm = &four - &two;
        (one() / &norm, -(&two / &norm))
    };
    Ok(WernerForm { n, identity_coeff, h_coeff })
}

/// Tr(ρ_a ρ_b) for two Bell-diagonal states.
pub fn state_overlap(a: &BellDiagonalState, b: &BellDiagonalState) -> Result<Rational> {
    if a.n != b.n {
        return input(format!("size mismatch: {} vs {}", a.n, b.n));
    }
    Ok(a.weights
        .iter()
        .filter_map(|(s, wa)| b.weights.get(s).map(|wb| wa * wb))
        .fold(zero(), |acc, x| acc + x))
}

/// Applies a block permutation and a per-position relabelling of the three
/// non-singlet symbols; used to check the symmetries of the hiding states.
pub fn relabel(
    state: &BellDiagonalState,
    perm: &[usize],
    triplet_maps: &[[BellSymbol; 3]],
) -> Result<BellDiagonalState> {
    let n = state.n;
    if perm.len() != n || triplet_maps.len() != n {
        return input("permutation and relabelling must cover every block");
    }
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return input("not a permutation");
    }
    let mut weights = BTreeMap::new();
    for (s, w) in &state.weights {
        let syms: Vec<BellSymbol> = (0..n)
            .map(|i| {
                let sym = s.symbol(perm[i]);
                if sym.is_singlet() {
                    sym
                } else {
                    triplet_maps[i][sym.bits() as usize]
                }
            })
            .collect();
        weights.insert(BellString::new(&syms)?, w.clone());
    }
    Ok(BellDiagonalState { n, weights })
}
