//! Clifford group elements in symplectic form, uniform sampling, and the
//! stabilizer states they produce from |0ⁿ⟩.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;

use crate::dense::{interleave, DenseOperator, C64};
use crate::error::{check_cap, input, Result};

/// Largest register accepted by the sampler.
pub const CLIFFORD_CAP: usize = 8;

/// Largest register for which dense projectors are built.
pub const STABILIZER_DENSE_CAP: usize = 3;

/// A hermitian Pauli operator `(−1)^sign · i^{|x∧z|} X^x Z^z`; bit `i` of
/// `x`/`z` refers to qubit `i`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pauli {
    pub x: u64,
    pub z: u64,
    pub sign: bool,
}

impl Pauli {
    pub fn x_on(q: usize) -> Pauli {
        Pauli { x: 1 << q, z: 0, sign: false }
    }

    pub fn z_on(q: usize) -> Pauli {
        Pauli { x: 0, z: 1 << q, sign: false }
    }

    /// Symplectic inner product: 1 iff the operators anticommute.
    pub fn symplectic(&self, other: &Pauli) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 1
    }

    pub fn commutes_with(&self, other: &Pauli) -> bool {
        !self.symplectic(other)
    }

    pub fn letters(&self, n: usize) -> String {
        let mut s = String::with_capacity(n + 1);
        s.push(if self.sign { '-' } else { '+' });
        for q in 0..n {
            s.push(match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            });
        }
        s
    }

    /// Dense `2^n × 2^n` matrix, qubit 0 most significant.
    pub fn matrix(&self, n: usize) -> DMatrix<C64> {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let mut m = DMatrix::from_element(1, 1, if self.sign { -o } else { o });
        for q in 0..n {
            let local = match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
                (1, 0) => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
                (0, 1) => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
                _ => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            };
            m = m.kronecker(&local);
        }
        m
    }
}

/// A Clifford unitary modulo global phase, stored as the images of
/// `X_1..X_n` followed by `Z_1..Z_n` under conjugation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clifford {
    n: usize,
    images: Vec<Pauli>,
}

impl Clifford {
    pub fn identity(n: usize) -> Result<Clifford> {
        Self::check_size(n)?;
        let images = (0..n).map(Pauli::x_on).chain((0..n).map(Pauli::z_on)).collect();
        Ok(Clifford { n, images })
    }

    /// Hadamard on qubit `q` of an `n`-qubit register.
    pub fn hadamard(n: usize, q: usize) -> Result<Clifford> {
        let mut c = Self::identity(n)?;
        if q >= n {
            return input(format!("qubit {q} out of range for {n} qubits"));
        }
        c.images.swap(q, n + q);
        Ok(c)
    }

    pub fn from_images(n: usize, images: Vec<Pauli>) -> Result<Clifford> {
        Self::check_size(n)?;
        if images.len() != 2 * n {
            return input(format!("need {} images, got {}", 2 * n, images.len()));
        }
        let c = Clifford { n, images };
        if !c.is_symplectic() {
            return input("images do not satisfy the symplectic condition");
        }
        Ok(c)
    }

    fn check_size(n: usize) -> Result<()> {
        if n == 0 {
            return input("Clifford register must have at least one qubit");
        }
        check_cap("Clifford qubits", n, CLIFFORD_CAP)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, q: usize) -> Pauli {
        self.images[q]
    }

    pub fn z_image(&self, q: usize) -> Pauli {
        self.images[self.n + q]
    }

    /// Conjugation preserves commutation relations: images of `X_i, Z_j`
    /// anticommute iff `i = j`, all other pairs commute.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                !self.x_image(i).symplectic(&self.x_image(j))
                    && !self.z_image(i).symplectic(&self.z_image(j))
                    && self.x_image(i).symplectic(&self.z_image(j)) == (i == j)
            })
        })
    }

    /// U|0ⁿ⟩, stabilized by the images of the `Z_i`.
    pub fn image_of_zero(&self) -> StabilizerState {
        StabilizerState {
            n: self.n,
            generators: (0..self.n).map(|q| self.z_image(q)).collect(),
        }
    }
}

/// Pure stabilizer state given by `n` independent commuting generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StabilizerState {
    n: usize,
    generators: Vec<Pauli>,
}

impl StabilizerState {
    pub fn new(n: usize, generators: Vec<Pauli>) -> Result<StabilizerState> {
        let s = StabilizerState { n, generators };
        if s.generators.len() != n || !s.is_valid() {
            return input("generators must be n independent commuting Paulis");
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Pauli] {
        &self.generators
    }

    pub fn generator_strings(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.letters(self.n)).collect()
    }

    pub fn is_valid(&self) -> bool {
        let commuting = self
            .generators
            .iter()
            .enumerate()
            .all(|(i, a)| self.generators[i + 1..].iter().all(|b| a.commutes_with(b)));
        commuting && f2_rank(self.generators.iter().map(|g| pack(g, self.n)).collect()) == self.n
    }

    /// |ψ⟩⟨ψ| = Π (I + g)/2.
    pub fn projector(&self) -> Result<DMatrix<C64>> {
        check_cap("stabilizer dense qubits", self.n, STABILIZER_DENSE_CAP)?;
        let dim = 1 << self.n;
        let id = DMatrix::<C64>::identity(dim, dim);
        Ok(self
            .generators
            .iter()
            .fold(id.clone(), |acc, g| acc * (&id + g.matrix(self.n)) * C64::new(0.5, 0.0)))
    }
}

impl fmt::Display for StabilizerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.generator_strings().join(","))
    }
}

fn pack(p: &Pauli, n: usize) -> u128 {
    (p.x as u128) | ((p.z as u128) << n)
}

fn f2_rank(mut rows: Vec<u128>) -> usize {
    let mut rank = 0;
    for bit in 0..128 {
        let Some(pos) = rows.iter().skip(rank).position(|r| (r >> bit) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, rank + pos);
        let pivot = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && (*r >> bit) & 1 == 1 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

/// Symplectic vector `(x, z)` without a sign.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
struct Sym {
    x: u64,
    z: u64,
}

impl Sym {
    const ZERO: Sym = Sym { x: 0, z: 0 };

    fn form(&self, o: &Sym) -> bool {
        ((self.x & o.z) ^ (self.z & o.x)).count_ones() % 2 == 1
    }

    fn add(&self, o: &Sym) -> Sym {
        Sym { x: self.x ^ o.x, z: self.z ^ o.z }
    }

    fn add_if(&self, cond: bool, o: &Sym) -> Sym {
        if cond {
            self.add(o)
        } else {
            *self
        }
    }
}

/// Splits a spanning set of a non-degenerate subspace into hyperbolic pairs.
fn symplectic_basis(mut span: Vec<Sym>) -> Vec<(Sym, Sym)> {
    let mut pairs = Vec::new();
    span.retain(|v| *v != Sym::ZERO);
    while let Some(a) = span.first().copied() {
        let Some(bi) = span.iter().position(|b| a.form(b)) else {
            // a lies in the radical; cannot happen for a non-degenerate span
            span.remove(0);
            continue;
        };
        let b = span[bi];
        pairs.push((a, b));
        span = span
            .into_iter()
            .map(|l| l.add_if(l.form(&b), &a).add_if(l.form(&a), &b))
            .filter(|v| *v != Sym::ZERO)
            .collect();
    }
    pairs
}

fn combine(basis: &[(Sym, Sym)], coeffs: u128) -> Sym {
    basis.iter().enumerate().fold(Sym::ZERO, |acc, (i, (e, f))| {
        let acc = acc.add_if((coeffs >> (2 * i)) & 1 == 1, e);
        acc.add_if((coeffs >> (2 * i + 1)) & 1 == 1, f)
    })
}

/// Uniform element of Sp(2n, F₂), returned as hyperbolic pairs
/// `(image of X_i, image of Z_i)`.
fn random_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(Sym, Sym)> {
    let mut basis: Vec<(Sym, Sym)> = (0..n)
        .map(|q| (Sym { x: 1 << q, z: 0 }, Sym { x: 0, z: 1 << q }))
        .collect();
    let mut out = Vec::with_capacity(n);
    while !basis.is_empty() {
        let k = basis.len();
        let space = 1u128 << (2 * k);
        // v uniform non-zero, w uniform with <v, w> = 1
        let v = combine(&basis, rng.random_range(1..space));
        let w = loop {
            let w = combine(&basis, rng.random_range(0..space));
            if v.form(&w) {
                break w;
            }
        };
        out.push((v, w));
        let complement: Vec<Sym> = basis
            .iter()
            .flat_map(|(e, f)| [*e, *f])
            .map(|b| b.add_if(b.form(&w), &v).add_if(b.form(&v), &w))
            .collect();
        basis = symplectic_basis(complement);
        debug_assert_eq!(basis.len(), k - 1);
    }
    out
}

fn with_signs(n: usize, pairs: &[(Sym, Sym)], signs: u64) -> Clifford {
    let mut images = vec![Pauli { x: 0, z: 0, sign: false }; 2 * n];
    for (q, (v, w)) in pairs.iter().enumerate() {
        images[q] = Pauli { x: v.x, z: v.z, sign: (signs >> q) & 1 == 1 };
        images[n + q] = Pauli { x: w.x, z: w.z, sign: (signs >> (n + q)) & 1 == 1 };
    }
    Clifford { n, images }
}

/// Uniformly random Clifford (modulo global phase).
pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Clifford> {
    Clifford::check_size(n)?;
    let pairs = random_symplectic(n, rng);
    let signs = rng.random_range(0..(1u64 << (2 * n)));
    Ok(with_signs(n, &pairs, signs))
}

/// Largest register for exhaustive group enumeration.
pub const ENUMERATION_CAP: usize = 2;

/// Every Clifford on `n ≤ 2` qubits modulo phase (24 for n = 1, 11520 for n = 2).
pub fn enumerate_cliffords(n: usize) -> Result<Vec<Clifford>> {
    Clifford::check_size(n)?;
    check_cap("Clifford enumeration qubits", n, ENUMERATION_CAP)?;
    let side = 1u64 << (2 * n);
    let to_sym = |v: u64| Sym { x: v & ((1 << n) - 1), z: v >> n };
    let mut symplectic = Vec::new();
    let total = side.pow(2 * n as u32);
    for idx in 0..total {
        let mut rest = idx;
        let mut pairs = Vec::with_capacity(n);
        for _ in 0..n {
            let v = to_sym(rest % side);
            rest /= side;
            let w = to_sym(rest % side);
            rest /= side;
            pairs.push((v, w));
        }
        let ok = (0..n).all(|i| {
            (0..n).all(|j| {
                !pairs[i].0.form(&pairs[j].0) && !pairs[i].1.form(&pairs[j].1) && pairs[i].0.form(&pairs[j].1) == (i == j)
            })
        });
        if ok {
            symplectic.push(pairs);
        }
    }
    let mut out = Vec::with_capacity(symplectic.len() << (2 * n));
    for pairs in &symplectic {
        for signs in 0..(1u64 << (2 * n)) {
            out.push(with_signs(n, pairs, signs));
        }
    }
    Ok(out)
}

/// `|ψ⟩⟨ψ|_A ⊗ |ψ⟩⟨ψ|_B` in the interleaved pair layout.
pub fn pair_projector(alice: &StabilizerState, bob: &StabilizerState) -> Result<DenseOperator> {
    if alice.n != bob.n {
        return input("Alice and Bob registers differ in size");
    }
    let n = alice.n;
    let pa = alice.projector()?;
    let pb = bob.projector()?;
    let side = 1 << n;
    let dim = side * side;
    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    for a1 in 0..side {
        for b1 in 0..side {
            let r = interleave(a1, b1, n);
            for a2 in 0..side {
                let pa_v = pa[(a1, a2)];
                if pa_v == C64::new(0.0, 0.0) {
                    continue;
                }
                for b2 in 0..side {
                    mat[(r, interleave(a2, b2, n))] = pa_v * pb[(b1, b2)];
                }
            }
        }
    }
    DenseOperator::from_matrix(mat)
}

/// Groups stabilizer states by their dense projectors (entries are
/// multiples of `2^{-n}` times a unit, so rounding is exact).
pub fn orbit_counts(states: &[StabilizerState]) -> Result<BTreeMap<Vec<(i64, i64)>, usize>> {
    let mut counts = BTreeMap::new();
    for s in states {
        let p = s.projector()?;
        let scale = (1u64 << s.n) as f64;
        let key: Vec<(i64, i64)> = p
            .iter()
            .map(|z| ((z.re * scale).round() as i64, (z.im * scale).round() as i64))
            .collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(counts)
}
