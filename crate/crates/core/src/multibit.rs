//! Hiding several bits, one per block of Bell pairs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bellcode::BellString;
use crate::error::{input, Result};
use crate::locc::bell_unlock;
use crate::prep::{sample_recursive_with, PrepSample};
use crate::states::{hiding_state, BellDiagonalState, StateRecord};

/// Largest number of bits accepted by [`encode`].
pub const MAX_BITS: usize = 64;

/// k bits hidden in k independent blocks of `n` pairs each.
#[derive(Clone, Debug, PartialEq)]
pub struct MultibitEncoding {
    n: usize,
    bits: Vec<u8>,
    blocks: Vec<BellDiagonalState>,
    samples: Option<Vec<BellString>>,
}

/// Serialized form; `blocks` holds states or, once sampled, the drawn strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingRecord {
    pub k: usize,
    pub n: usize,
    pub bits: Vec<u8>,
    pub blocks: Vec<BlockRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BlockRecord {
    String(BellString),
    State(StateRecord),
}

pub fn encode(bits: &[u8], n: usize) -> Result<MultibitEncoding> {
    if bits.is_empty() {
        return input("need at least one bit");
    }
    if bits.len() > MAX_BITS {
        return input(format!("at most {MAX_BITS} bits, got {}", bits.len()));
    }
    if n == 0 {
        return input("block size must be at least 1");
    }
    let blocks = bits.iter().map(|&b| hiding_state(n, b)).collect::<Result<_>>()?;
    Ok(MultibitEncoding { n, bits: bits.to_vec(), blocks, samples: None })
}

/// Draws one string per block (one-ebit sampler for 1s, parity draw for 0s).
pub fn encode_sampled<R: Rng + ?Sized>(bits: &[u8], n: usize, rng: &mut R) -> Result<MultibitEncoding> {
    for &b in bits {
        if b > 1 {
            return input(format!("hidden bit must be 0 or 1, got {b}"));
        }
    }
    if bits.is_empty() || bits.len() > MAX_BITS {
        return input(format!("need between 1 and {MAX_BITS} bits"));
    }
    if n == 0 {
        return input("block size must be at least 1");
    }
    let draws: Vec<PrepSample> = bits.iter().map(|&b| sample_recursive_with(n, b, rng)).collect::<Result<_>>()?;
    let blocks = if n <= crate::bellcode::DEFAULT_ENUMERATION_CAP {
        bits.iter().map(|&b| hiding_state(n, b)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok(MultibitEncoding {
        n,
        bits: bits.to_vec(),
        blocks,
        samples: Some(draws.into_iter().map(|d| d.string).collect()),
    })
}

impl MultibitEncoding {
    pub fn k(&self) -> usize {
        self.bits.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn blocks(&self) -> &[BellDiagonalState] {
        &self.blocks
    }

    pub fn samples(&self) -> Option<&[BellString]> {
        self.samples.as_deref()
    }

    /// Pairs per share.
    pub fn total_pairs(&self) -> usize {
        self.k() * self.n
    }

    /// Draws strings for every block.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MultibitEncoding> {
        let mut out = encode_sampled(&self.bits, self.n, rng)?;
        out.blocks = self.blocks.clone();
        Ok(out)
    }

    /// State of the whole register, blocks in order.
    pub fn joint_state(&self) -> Result<BellDiagonalState> {
        let mut it = self.blocks.iter();
        let Some(first) = it.next() else {
            return input("encoding carries no block states");
        };
        it.try_fold(first.clone(), |acc, b| acc.tensor(b))
    }

    /// Marginal on block `i` of the joint state.
    pub fn block_marginal(&self, i: usize) -> Result<BellDiagonalState> {
        if i >= self.k() {
            return input(format!("block {i} out of range for k = {}", self.k()));
        }
        self.joint_state()?.marginal(i * self.n, self.n)
    }

    pub fn to_record(&self) -> EncodingRecord {
        let blocks = match &self.samples {
            Some(s) => s.iter().copied().map(BlockRecord::String).collect(),
            None => self
                .blocks
                .iter()
                .zip(&self.bits)
                .map(|(b, &bit)| BlockRecord::State(b.to_record(Some(bit))))
                .collect(),
        };
        EncodingRecord { k: self.k(), n: self.n, bits: self.bits.clone(), blocks }
    }
}

/// Per-block singlet parity of sampled strings.
pub fn unlock_all(encoding: &MultibitEncoding) -> Result<Vec<u8>> {
    let Some(samples) = &encoding.samples else {
        return input("encoding has no sampled strings to unlock");
    };
    Ok(unlock_strings(samples))
}

pub fn unlock_strings(strings: &[BellString]) -> Vec<u8> {
    strings.iter().map(bell_unlock).collect()
}

/// `2k + log k + log log e + log(1/ε)` (base-2 logs), the large-k block
/// size estimate.
pub fn block_size_estimate(k: usize, epsilon: f64) -> Result<f64> {
    if k == 0 {
        return input("k must be at least 1");
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return input(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    let k = k as f64;
    Ok(2.0 * k + k.log2() + std::f64::consts::LOG2_E.log2() - epsilon.log2())
}

/// Ceiling of [`block_size_estimate`].
pub fn required_block_size(k: usize, epsilon: f64) -> Result<usize> {
    Ok(block_size_estimate(k, epsilon)?.ceil() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prep::rng_from_seed;
    use rand::Rng;
    use proptest::prelude::*;

    #[test]
    fn single_bit_reduces_to_hiding_state() {
        let e = encode(&[1], 3).unwrap();
        assert_eq!(e.blocks(), &[hiding_state(3, 1).unwrap()]);
        assert_eq!(e.total_pairs(), 3);
    }

    #[test]
    fn two_blocks() {
        let e = encode(&[0, 1], 2).unwrap();
        assert_eq!(e.blocks()[0], hiding_state(2, 0).unwrap());
        assert_eq!(e.blocks()[1], hiding_state(2, 1).unwrap());
        assert_eq!(e.total_pairs(), 4);
    }

    #[test]
    fn marginals_are_hiding_states() {
        for bits in [vec![0, 1, 1], vec![1, 0], vec![0, 0, 0]] {
            for n in 1..=2 {
                let e = encode(&bits, n).unwrap();
                for (i, &b) in bits.iter().enumerate() {
                    assert_eq!(e.block_marginal(i).unwrap(), hiding_state(n, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn unlock_examples() {
        let strings: Vec<BellString> = vec!["11".parse().unwrap(), "00".parse().unwrap()];
        assert_eq!(unlock_strings(&strings), vec![1, 0]);
        let evens: Vec<BellString> = ["00", "10", "11.11"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(unlock_strings(&evens), vec![0, 0, 0]);
        assert!(unlock_all(&encode(&[1], 2).unwrap()).is_err());
    }

    #[test]
    fn round_trips() {
        let mut rng = rng_from_seed(500);
        for trial in 0..500 {
            let k = 1 + trial % 3;
            let n = 1 + (trial / 3) % 3;
            let bits: Vec<u8> = (0..k).map(|_| rng.random_range(0..2)).collect();
            let e = encode_sampled(&bits, n, &mut rng).unwrap();
            assert_eq!(unlock_all(&e).unwrap(), bits);
        }
    }

    #[test]
    fn block_size_examples() {
        assert_eq!(required_block_size(1, 0.5).unwrap(), 4);
        assert_eq!(required_block_size(4, 0.01).unwrap(), 18);
        assert!(required_block_size(1, 0.0).is_err());
        assert!(required_block_size(1, 1.0).is_err());
        assert!(required_block_size(0, 0.5).is_err());
        assert!((std::f64::consts::LOG2_E.log2() - 0.5288).abs() < 1e-4);
    }

    #[test]
    fn record_shapes() {
        let e = encode(&[1, 0], 1).unwrap();
        let json = serde_json::to_value(e.to_record()).unwrap();
        assert_eq!(json["k"], 2);
        assert_eq!(json["bits"], serde_json::json!([1, 0]));
        let s = encode_sampled(&[1, 0], 2, &mut rng_from_seed(1)).unwrap();
        let rec = s.to_record();
        assert!(matches!(rec.blocks[0], BlockRecord::String(_)));
        let back: EncodingRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        assert_eq!(back, rec);
    }

    proptest! {
        #[test]
        fn halving_epsilon_adds_one(k in 1usize..50, e in 0.001f64..0.9) {
            let base = block_size_estimate(k, e).unwrap();
            prop_assume!((base - base.floor()) > 1e-6 && (base.ceil() - base) > 1e-6);
            prop_assert_eq!(required_block_size(k, e / 2.0).unwrap(), required_block_size(k, e).unwrap() + 1);
        }

        #[test]
        fn monotone_in_k(k in 1usize..200, e in 0.001f64..0.9) {
            prop_assert!(required_block_size(k + 1, e).unwrap() >= required_block_size(k, e).unwrap());
        }

        #[test]
        fn sampled_round_trip(bits in proptest::collection::vec(0u8..=1, 1..6), n in 1usize..8, seed: u64) {
            let e = encode_sampled(&bits, n, &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(unlock_all(&e).unwrap(), bits);
        }
    }
}
