//! Explicit `4^n × 4^n` complex matrices: the ground-truth oracle for the
//! compressed Bell-diagonal representation.
//!
//! Qubits are interleaved as (A₁, B₁, A₂, B₂, …) with A₁ the most significant
//! bit of a basis index. Alice owns the odd positions, Bob the even ones, and
//! pair `i` occupies the `i`-th most-significant 4-dimensional tensor factor.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;

use crate::bellcode::{BellString, BellSymbol, PauliString, PauliSymbol};
use crate::error::{check_cap, input, Result};
use crate::rational::to_f64;
use crate::states::{BellDiagonalState, WernerForm};
use crate::tolerance::{HERMITIAN_TOL, PPT_TOL};

pub type C64 = Complex<f64>;

/// Largest block size for dense operations (256 × 256 matrices).
pub const DENSE_CAP: usize = 4;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    mat: DMatrix<C64>,
    hermitian: bool,
}

fn block_size_of(dim: usize) -> Option<usize> {
    let mut n = 0;
    let mut d = 1usize;
    while d < dim {
        d *= 4;
        n += 1;
    }
    (d == dim && n >= 1).then_some(n)
}

fn is_hermitian(m: &DMatrix<C64>) -> bool {
    let dim = m.nrows();
    (0..dim).all(|i| (i..dim).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= HERMITIAN_TOL))
}

impl DenseOperator {
    /// Wraps a square matrix whose side is a power of four; the hermitian
    /// flag is computed.
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return input(format!("matrix is {}x{}, not square", mat.nrows(), mat.ncols()));
        }
        let n = match block_size_of(mat.nrows()) {
            Some(n) => n,
            None => return input(format!("dimension {} is not a positive power of 4", mat.nrows())),
        };
        check_cap("dense block size n", n, DENSE_CAP)?;
        let hermitian = is_hermitian(&mat);
        Ok(DenseOperator { n, mat, hermitian })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_cap("dense block size n", n, DENSE_CAP)?;
        let dim = 1 << (2 * n);
        Ok(DenseOperator { n, mat: DMatrix::identity(dim, dim), hermitian: true })
    }

    /// |v⟩⟨v| for a vector of dimension `4^n`.
    pub fn projector(v: &DVector<C64>) -> Result<Self> {
        Self::from_matrix(v * v.adjoint())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn transpose(&self) -> DenseOperator {
        DenseOperator { n: self.n, mat: self.mat.transpose(), hermitian: self.hermitian }
    }

    pub fn scale(&self, k: f64) -> DenseOperator {
        DenseOperator { n: self.n, mat: &self.mat * c(k), hermitian: self.hermitian }
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        same_dim(self, other)?;
        Ok(DenseOperator {
            n: self.n,
            mat: &self.mat + &other.mat,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        same_dim(self, other)?;
        Ok(DenseOperator {
            n: self.n,
            mat: &self.mat - &other.mat,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    /// U A U†.
    pub fn conjugate_by(&self, u: &DMatrix<C64>) -> Result<DenseOperator> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return input("unitary dimension mismatch");
        }
        Self::from_matrix(u * &self.mat * u.adjoint())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Ascending eigenvalues of a hermitian operator.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.hermitian {
            return input("eigenvalues requested for a non-hermitian operator");
        }
        let mut ev: Vec<f64> = self.mat.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        Ok(ev)
    }

    /// Flat row-major `(re, im)` pairs for debugging dumps.
    pub fn to_dump(&self) -> serde_json::Value {
        let mut entries = Vec::with_capacity(self.dim() * self.dim());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let z = self.mat[(i, j)];
                entries.push(serde_json::json!([z.re, z.im]));
            }
        }
        serde_json::json!({ "n": self.n, "dim": self.dim(), "entries": entries })
    }
}

fn same_dim(a: &DenseOperator, b: &DenseOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return input(format!("dimension mismatch: {} vs {}", a.dim(), b.dim()));
    }
    Ok(())
}

/// Amplitudes over |00⟩, |01⟩, |10⟩, |11⟩ (Alice's qubit first).
pub fn bell_vector(sym: BellSymbol) -> DVector<C64> {
    let h = FRAC_1_SQRT_2;
    let v = match sym {
        BellSymbol::PhiPlus => [h, 0.0, 0.0, h],
        BellSymbol::PhiMinus => [h, 0.0, 0.0, -h],
        BellSymbol::PsiPlus => [0.0, h, h, 0.0],
        BellSymbol::PsiMinus => [0.0, h, -h, 0.0],
    };
    DVector::from_iterator(4, v.into_iter().map(c))
}

/// Tensor product of the pair vectors, pair 1 most significant.
pub fn bell_product_vector(s: &BellString) -> Result<DVector<C64>> {
    check_cap("dense block size n", s.len(), DENSE_CAP)?;
    let mut v = DVector::from_element(1, c(1.0));
    for sym in s.symbols() {
        v = v.kronecker(&bell_vector(sym));
    }
    Ok(v)
}

/// Σ_s w(s) |s⟩⟨s|.
pub fn realize(state: &BellDiagonalState) -> Result<DenseOperator> {
    let n = state.n();
    check_cap("dense block size n", n, DENSE_CAP)?;
    let dim = 1 << (2 * n);
    let mut mat = DMatrix::zeros(dim, dim);
    for (s, w) in state.support() {
        let v = bell_product_vector(s)?;
        mat += &v * v.adjoint() * c(to_f64(w));
    }
    Ok(DenseOperator { n, mat, hermitian: true })
}

/// Σ_s α_s |s⟩⟨s| for coefficients indexed by string code.
pub fn realize_diagonal(n: usize, coeffs: &[f64]) -> Result<DenseOperator> {
    check_cap("dense block size n", n, DENSE_CAP)?;
    let dim = 1 << (2 * n);
    if coeffs.len() != dim {
        return input(format!("expected {dim} coefficients, got {}", coeffs.len()));
    }
    let mut mat = DMatrix::zeros(dim, dim);
    for (code, &a) in coeffs.iter().enumerate() {
        if a != 0.0 {
            let v = bell_product_vector(&BellString::from_code(n, code as u64)?)?;
            mat += &v * v.adjoint() * c(a);
        }
    }
    Ok(DenseOperator { n, mat, hermitian: true })
}

/// Bit mask of Bob's qubits within a basis index.
fn bob_mask(n: usize) -> usize {
    0x5555_5555_5555_5555usize & ((1usize << (2 * n)) - 1)
}

/// (𝟙 ⊗ T): transposes every index belonging to Bob.
pub fn partial_transpose(a: &DenseOperator) -> DenseOperator {
    let dim = a.dim();
    let bob = bob_mask(a.n);
    let alice = !bob & (dim - 1);
    let mat = DMatrix::from_fn(dim, dim, |r, col| {
        let r2 = (r & alice) | (col & bob);
        let c2 = (col & alice) | (r & bob);
        a.mat[(r2, c2)]
    });
    DenseOperator { n: a.n, mat, hermitian: a.hermitian }
}

/// H = (𝟙⊗T)[|Φ⁺⟩⟨Φ⁺|^{⊗n}].
pub fn h_operator(n: usize) -> Result<DenseOperator> {
    let phi = BellString::uniform(n, BellSymbol::PhiPlus)?;
    Ok(partial_transpose(&realize(&BellDiagonalState::point_mass(phi))?))
}

/// `identity_coeff · I + h_coeff · H`.
pub fn realize_werner(w: &WernerForm) -> Result<DenseOperator> {
    let id = DenseOperator::identity(w.n)?.scale(to_f64(&w.identity_coeff));
    let h = h_operator(w.n)?.scale(to_f64(&w.h_coeff));
    id.add(&h)
}

pub fn min_eigenvalue(a: &DenseOperator) -> Result<f64> {
    Ok(a.eigenvalues()?[0])
}

/// Peres test: minimum eigenvalue of the partial transpose is ≥ −PPT_TOL.
pub fn is_ppt(a: &DenseOperator) -> Result<bool> {
    Ok(min_eigenvalue(&partial_transpose(a))? >= -PPT_TOL)
}

/// Interleaves Alice's `n`-bit register `a` and Bob's `b` into a basis index.
pub fn interleave(a: usize, b: usize, n: usize) -> usize {
    (0..n).fold(0, |x, i| {
        let shift = n - 1 - i;
        let abit = (a >> shift) & 1;
        let bbit = (b >> shift) & 1;
        x | (abit << (2 * shift + 1)) | (bbit << (2 * shift))
    })
}

/// Residual state on the unmeasured halves when Alice and Bob each prepare a
/// maximally entangled pair of `n`-qubit registers, run the measurement `M`
/// on one register each, and obtain the outcome associated with `M`.
///
/// Built as `Tr_meas[(M ⊗ 𝟙)|Ψ⟩⟨Ψ|] / p` with `|Ψ⟩ = |Ψmax⟩_{AA'} ⊗
/// |Ψmax⟩_{BB'}` and `p` the outcome probability; equals `Mᵀ / Tr M`.
pub fn choi_residual(m: &DenseOperator) -> Result<DenseOperator> {
    let n = m.n;
    if !m.hermitian {
        return input("measurement operator is not hermitian");
    }
    let tr = m.trace().re;
    if tr <= 0.0 {
        return input(format!("measurement operator has trace {tr} <= 0"));
    }
    if min_eigenvalue(m)? < -PPT_TOL {
        return input("measurement operator is not positive semidefinite");
    }
    let side = 1usize << n;
    let dim = side * side;
    // psi[(x, y)]: amplitude with measured registers in x and kept registers
    // in y, both in the interleaved layout
    let amp = c(1.0 / side as f64);
    let mut psi = DMatrix::<C64>::zeros(dim, dim);
    for a in 0..side {
        for b in 0..side {
            let x = interleave(a, b, n);
            let y = interleave(a, b, n);
            psi[(x, y)] += amp;
        }
    }
    let after = &m.mat * &psi;
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for y in 0..dim {
        for y2 in 0..dim {
            let mut acc = c(0.0);
            for x in 0..dim {
                acc += after[(x, y)] * psi[(x, y2)].conj();
            }
            rho[(y, y2)] = acc;
        }
    }
    let p = rho.trace().re;
    DenseOperator::from_matrix(rho * c(1.0 / p))
}

/// Tr(AB), real part.
pub fn trace_pair(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    same_dim(a, b)?;
    let dim = a.dim();
    let mut acc = c(0.0);
    for i in 0..dim {
        for j in 0..dim {
            acc += a.mat[(i, j)] * b.mat[(j, i)];
        }
    }
    Ok(acc.re)
}

/// ½‖A − B‖₁ for hermitian operators.
pub fn trace_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    let d = a.sub(b)?;
    Ok(0.5 * d.eigenvalues()?.iter().map(|x| x.abs()).sum::<f64>())
}

fn pauli_2x2(p: PauliSymbol) -> DMatrix<C64> {
    let z = c(0.0);
    let o = c(1.0);
    let i = C64::new(0.0, 1.0);
    match p {
        PauliSymbol::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        PauliSymbol::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        PauliSymbol::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        PauliSymbol::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// σ_m on Alice's qubits, identity on Bob's.
pub fn alice_pauli(m: &PauliString) -> Result<DMatrix<C64>> {
    check_cap("dense block size n", m.len(), DENSE_CAP)?;
    let id2 = pauli_2x2(PauliSymbol::I);
    let mut u = DMatrix::from_element(1, 1, c(1.0));
    for i in 0..m.len() {
        u = u.kronecker(&pauli_2x2(m.symbol(i)).kronecker(&id2));
    }
    Ok(u)
}

/// Random positive operator `G G†` with `G` of the given rank and entries
/// uniform in the unit square.
pub fn random_positive<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<DenseOperator> {
    check_cap("dense block size n", n, DENSE_CAP)?;
    let dim = 1 << (2 * n);
    let g = DMatrix::from_fn(dim, rank.max(1), |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut mat = &g * g.adjoint();
    // exact hermitian symmetry
    for i in 0..dim {
        mat[(i, i)].im = 0.0;
        for j in (i + 1)..dim {
            mat[(j, i)] = mat[(i, j)].conj();
        }
    }
    DenseOperator::from_matrix(mat)
}
