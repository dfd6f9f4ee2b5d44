//! Two-bit labels for products of Bell states and the local Pauli action on
//! them.
//!
//! A string of `n` Bell states is packed into a `u64`, first symbol in the
//! most-significant pair, so that numeric order of the packed code is the
//! lexicographic order of the symbol sequence.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_cap, input, Error, Result};

/// Longest string the packed representation holds.
pub const MAX_SYMBOLS: usize = 32;

/// Default limit for explicit enumeration of all `4^n` strings.
pub const DEFAULT_ENUMERATION_CAP: usize = 10;

/// One of the four Bell states, labelled by two bits.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum BellSymbol {
    /// Φ⁺ = (|00⟩ + |11⟩)/√2
    PhiPlus = 0b00,
    /// Φ⁻ = (|00⟩ − |11⟩)/√2
    PhiMinus = 0b01,
    /// Ψ⁺ = (|01⟩ + |10⟩)/√2
    PsiPlus = 0b10,
    /// Ψ⁻, the singlet.
    PsiMinus = 0b11,
}

impl BellSymbol {
    pub const ALL: [BellSymbol; 4] = [
        BellSymbol::PhiPlus,
        BellSymbol::PhiMinus,
        BellSymbol::PsiPlus,
        BellSymbol::PsiMinus,
    ];

    pub fn bits(self) -> u8 {
        self as u8
    }

    pub fn from_bits(bits: u8) -> BellSymbol {
        Self::ALL[(bits & 0b11) as usize]
    }

    pub fn is_singlet(self) -> bool {
        self == BellSymbol::PsiMinus
    }

    pub fn as_str(self) -> &'static str {
        ["00", "01", "10", "11"][self as usize]
    }
}

impl fmt::Display for BellSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Pauli matrix acting on Alice's half of a Bell pair, as two bits.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum PauliSymbol {
    I = 0b00,
    Z = 0b01,
    X = 0b10,
    Y = 0b11,
}

impl PauliSymbol {
    pub const ALL: [PauliSymbol; 4] = [PauliSymbol::I, PauliSymbol::Z, PauliSymbol::X, PauliSymbol::Y];

    pub fn from_bits(bits: u8) -> PauliSymbol {
        Self::ALL[(bits & 0b11) as usize]
    }

    pub fn letter(self) -> char {
        ['I', 'Z', 'X', 'Y'][self as usize]
    }
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        return input("string length must be at least 1");
    }
    check_cap("string length", n, MAX_SYMBOLS)
}

fn mask(n: usize) -> u64 {
    if n >= 32 {
        u64::MAX
    } else {
        (1u64 << (2 * n)) - 1
    }
}

fn parse_dotted(s: &str) -> Result<(usize, u64)> {
    let mut code = 0u64;
    let mut n = 0usize;
    for group in s.trim().split('.') {
        let bits = match group {
            "00" => 0,
            "01" => 1,
            "10" => 2,
            "11" => 3,
            _ => return Err(Error::Parse(format!("bad two-bit group {group:?} in {s:?}"))),
        };
        n += 1;
        if n > MAX_SYMBOLS {
            return Err(Error::Parse(format!("string {s:?} longer than {MAX_SYMBOLS} symbols")));
        }
        code = (code << 2) | bits;
    }
    Ok((n, code))
}

fn write_dotted(f: &mut fmt::Formatter<'_>, n: usize, code: u64) -> fmt::Result {
    for i in 0..n {
        if i > 0 {
            f.write_str(".")?;
        }
        let bits = (code >> (2 * (n - 1 - i))) & 0b11;
        f.write_str(["00", "01", "10", "11"][bits as usize])?;
    }
    Ok(())
}

/// A product of `n` Bell states.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BellString {
    n: u8,
    code: u64,
}

impl BellString {
    pub fn new(symbols: &[BellSymbol]) -> Result<Self> {
        check_len(symbols.len())?;
        let code = symbols.iter().fold(0u64, |acc, s| (acc << 2) | s.bits() as u64);
        Ok(BellString { n: symbols.len() as u8, code })
    }

    /// Builds from a packed code; bits above `2n` must be clear.
    pub fn from_code(n: usize, code: u64) -> Result<Self> {
        check_len(n)?;
        if code & !mask(n) != 0 {
            return input(format!("code {code:#x} does not fit {n} symbols"));
        }
        Ok(BellString { n: n as u8, code })
    }

    pub fn uniform(n: usize, sym: BellSymbol) -> Result<Self> {
        Self::new(&vec![sym; n])
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn symbol(&self, i: usize) -> BellSymbol {
        assert!(i < self.len(), "symbol index {i} out of range for length {}", self.n);
        BellSymbol::from_bits(((self.code >> (2 * (self.len() - 1 - i))) & 0b11) as u8)
    }

    pub fn symbols(&self) -> impl Iterator<Item = BellSymbol> + '_ {
        (0..self.len()).map(move |i| self.symbol(i))
    }

    /// Concatenation, `self` first.
    pub fn concat(&self, tail: &BellString) -> Result<BellString> {
        let n = self.len() + tail.len();
        check_cap("string length", n, MAX_SYMBOLS)?;
        Ok(BellString {
            n: n as u8,
            code: (self.code << (2 * tail.len())) | tail.code,
        })
    }

    /// All `4^n` strings in lexicographic order, without a cap check.
    pub(crate) fn iter_all(n: usize) -> impl Iterator<Item = BellString> {
        (0..(1u64 << (2 * n))).map(move |code| BellString { n: n as u8, code })
    }
}

impl fmt::Display for BellString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_dotted(f, self.len(), self.code)
    }
}

impl FromStr for BellString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, code) = parse_dotted(s)?;
        BellString::from_code(n, code)
    }
}

impl serde::Serialize for BellString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BellString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Local Pauli operators applied to Alice's qubit of each pair.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: u8,
    code: u64,
}

impl PauliString {
    pub fn new(symbols: &[PauliSymbol]) -> Result<Self> {
        check_len(symbols.len())?;
        let code = symbols.iter().fold(0u64, |acc, s| (acc << 2) | *s as u64);
        Ok(PauliString { n: symbols.len() as u8, code })
    }

    pub fn from_code(n: usize, code: u64) -> Result<Self> {
        check_len(n)?;
        if code & !mask(n) != 0 {
            return input(format!("code {code:#x} does not fit {n} symbols"));
        }
        Ok(PauliString { n: n as u8, code })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_code(n, 0)
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn symbol(&self, i: usize) -> PauliSymbol {
        assert!(i < self.len());
        PauliSymbol::from_bits(((self.code >> (2 * (self.len() - 1 - i))) & 0b11) as u8)
    }

    /// Number of non-identity positions.
    pub fn weight(&self) -> usize {
        (0..self.len()).filter(|&i| self.symbol(i) != PauliSymbol::I).count()
    }

    /// Group product (XOR of codes, phases discarded).
    pub fn compose(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return input(format!("Pauli length mismatch: {} vs {}", self.n, other.n));
        }
        Ok(PauliString { n: self.n, code: self.code ^ other.code })
    }

    pub(crate) fn iter_all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..(1u64 << (2 * n))).map(move |code| PauliString { n: n as u8, code })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_dotted(f, self.len(), self.code)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts the dotted two-bit form or a word over `IXYZ`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if !t.is_empty() && t.chars().all(|c| "IXYZ".contains(c)) {
            let syms: Vec<PauliSymbol> = t
                .chars()
                .map(|c| match c {
                    'I' => PauliSymbol::I,
                    'X' => PauliSymbol::X,
                    'Y' => PauliSymbol::Y,
                    _ => PauliSymbol::Z,
                })
                .collect();
            return PauliString::new(&syms);
        }
        let (n, code) = parse_dotted(t)?;
        PauliString::from_code(n, code)
    }
}

/// N₁₁(s): the number of singlets in the product.
pub fn singlet_count(s: &BellString) -> usize {
    // a pair is 11 iff both its bits are set
    let pairs = s.code & (s.code >> 1) & 0x5555_5555_5555_5555;
    pairs.count_ones() as usize
}

/// Applies `m` to Alice's halves: position-wise XOR of the two-bit codes.
pub fn pauli_act(s: &BellString, m: &PauliString) -> Result<BellString> {
    if s.n != m.n {
        return input(format!("length mismatch: string has {} symbols, Pauli has {}", s.n, m.n));
    }
    Ok(BellString { n: s.n, code: s.code ^ m.code })
}

pub fn enumerate_strings(n: usize) -> Result<Vec<BellString>> {
    enumerate_strings_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_strings_with_cap(n: usize, cap: usize) -> Result<Vec<BellString>> {
    check_len(n)?;
    check_cap("enumeration size n", n, cap.min(MAX_SYMBOLS))?;
    Ok(BellString::iter_all(n).collect())
}

/// Parity of the singlet count.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Hidden bit `b` selects the parity class: 0 → even, 1 → odd.
    pub fn from_bit(bit: u8) -> Parity {
        if bit & 1 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn of(s: &BellString) -> Parity {
        Parity::from_bit((singlet_count(s) & 1) as u8)
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Number of length-`n` strings whose singlet count has the given parity:
/// `(4^n ± 2^n) / 2`.
pub fn parity_class_size(n: usize, parity: Parity) -> u128 {
    assert!(n < 64, "parity_class_size supports n < 64");
    let four = 1u128 << (2 * n);
    let two = 1u128 << n;
    match parity {
        Parity::Even => (four + two) / 2,
        Parity::Odd => (four - two) / 2,
    }
}

/// Σ_s (−1)^{N₁₁(s)}, by enumeration up to the default cap and by the closed
/// form `2^n` above it.
pub fn alternating_sum(n: usize) -> i128 {
    if n <= DEFAULT_ENUMERATION_CAP {
        alternating_sum_enumerated(n)
    } else {
        assert!(n < 126, "alternating_sum supports n < 126");
        1i128 << n
    }
}

pub(crate) fn alternating_sum_enumerated(n: usize) -> i128 {
    BellString::iter_all(n)
        .map(|s| if singlet_count(&s).is_multiple_of(2) { 1i128 } else { -1 })
        .sum()
}
