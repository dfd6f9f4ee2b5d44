//! Security certification: Bell-diagonal two-outcome measurements, the PPT
//! constraints they must satisfy when implemented by LOCC, and the linear
//! program bounding `p₀|₀ + p₁|₁ − 1`.
//!
//! A Bell-diagonal POVM is fixed by the diagonal `α_s` of `M₀` in the Bell
//! product basis (`M₁ = I − M₀`). Positivity of `(𝟙⊗T)[M₀]` and of
//! `(𝟙⊗T)[M₁]` reduces to
//!
//! ```text
//! 0 ≤ Σ_s α_{s⊕m} (−1)^{N₁₁(s)} ≤ 2^n     for every Pauli shift m.
//! ```
//!
//! The reduced program restricts to `α` that depend only on `N₁₁(s)`. Under
//! that restriction the constraint for shift `m` only depends on the number
//! `j` of non-identity positions of `m`: its coefficients are those of
//! `(3 − x)^{n−j} (1 + x)^j`, so `n + 1` two-sided rows replace `4^n`.

pub mod simplex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::bellcode::{pauli_act, singlet_count, BellString, PauliString, DEFAULT_ENUMERATION_CAP};
use crate::dense::DenseOperator;
use crate::error::{check_cap, input, Error, Result};
use crate::rational::{format_rational, frac, int, one, pow2, to_f64, zero, Rational, RationalRecord};
use crate::tolerance::PPT_TOL;

use simplex::{Cmp, LinearProgram, LpOutcome, Sense};

/// Largest `n` accepted by the unreduced LP (`4^n` variables).
pub const FULL_LP_CAP: usize = 3;

/// Largest `n` accepted by the symmetry-reduced LP.
pub const REDUCED_LP_CAP: usize = 24;

/// Diagonal of `M₀` in the Bell product basis, indexed by string code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellDiagonalPovm {
    n: usize,
    alpha: Vec<Rational>,
}

impl BellDiagonalPovm {
    pub fn new(n: usize, alpha: Vec<Rational>) -> Result<Self> {
        if n == 0 {
            return input("block size must be at least 1");
        }
        check_cap("POVM block size n", n, DEFAULT_ENUMERATION_CAP)?;
        if alpha.len() != 1 << (2 * n) {
            return input(format!("expected {} coefficients, got {}", 1usize << (2 * n), alpha.len()));
        }
        if let Some(bad) = alpha.iter().find(|a| a.is_negative() || **a > one()) {
            return input(format!("coefficient {bad} outside [0, 1]"));
        }
        Ok(BellDiagonalPovm { n, alpha })
    }

    pub fn constant(n: usize, value: Rational) -> Result<Self> {
        check_cap("POVM block size n", n, DEFAULT_ENUMERATION_CAP)?;
        Self::new(n, vec![value; 1 << (2 * n)])
    }

    /// Expands a singlet-count profile: `α_s = profile[N₁₁(s)]`.
    pub fn from_profile(n: usize, profile: &[Rational]) -> Result<Self> {
        check_cap("POVM block size n", n, DEFAULT_ENUMERATION_CAP)?;
        if profile.len() != n + 1 {
            return input(format!("profile needs {} entries, got {}", n + 1, profile.len()));
        }
        let alpha = BellString::iter_all(n).map(|s| profile[singlet_count(&s)].clone()).collect();
        Self::new(n, alpha)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self, s: &BellString) -> &Rational {
        &self.alpha[s.code() as usize]
    }

    pub fn beta(&self, s: &BellString) -> Rational {
        one() - self.alpha(s)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(to_f64).collect()
    }

    /// The POVM with outcomes swapped (`α ↦ 1 − α`).
    pub fn complement(&self) -> BellDiagonalPovm {
        BellDiagonalPovm { n: self.n, alpha: self.alpha.iter().map(|a| one() - a).collect() }
    }
}

/// Removes the Bell-basis off-diagonal part of `M`: `α_s = ⟨s|M|s⟩`.
pub fn twirl(m: &DenseOperator) -> Result<BellDiagonalPovm> {
    let ev = m.eigenvalues()?;
    if ev[0] < -PPT_TOL || ev[ev.len() - 1] > 1.0 + PPT_TOL {
        return input(format!(
            "operator spectrum [{}, {}] not within [0, 1]",
            ev[0],
            ev[ev.len() - 1]
        ));
    }
    let n = m.n();
    let mut alpha = Vec::with_capacity(1 << (2 * n));
    for s in BellString::iter_all(n) {
        let v = crate::dense::bell_product_vector(&s)?;
        let d = (v.adjoint() * m.matrix() * &v)[(0, 0)].re.clamp(0.0, 1.0);
        alpha.push(BigRational::from_float(d).ok_or_else(|| Error::Internal("non-finite diagonal".into()))?);
    }
    BellDiagonalPovm::new(n, alpha)
}

/// Σ_s α_{s⊕m} (−1)^{N₁₁(s)}.
pub fn ppt_constraint(povm: &BellDiagonalPovm, m: &PauliString) -> Result<Rational> {
    if m.len() != povm.n {
        return input(format!("shift has {} symbols, POVM has {}", m.len(), povm.n));
    }
    let mut acc = zero();
    for s in BellString::iter_all(povm.n) {
        let a = povm.alpha(&pauli_act(&s, m)?);
        if singlet_count(&s).is_multiple_of(2) {
            acc += a;
        } else {
            acc -= a;
        }
    }
    Ok(acc)
}

/// Checks `0 ≤ ppt_constraint(α, m) ≤ 2^n` for every shift `m`, i.e. both
/// `M₀` and `M₁` are PPT.
pub fn is_ppt_feasible(povm: &BellDiagonalPovm) -> Result<bool> {
    let upper = pow2(povm.n as u32);
    for m in PauliString::iter_all(povm.n) {
        let v = ppt_constraint(povm, &m)?;
        if v.is_negative() || v > upper {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(p₀|₀, p₁|₁)` against the two hiding states.
pub fn success_probabilities(povm: &BellDiagonalPovm) -> (Rational, Rational) {
    let n = povm.n as u32;
    let four = pow2(2 * n);
    let two = pow2(n);
    let (mut even, mut odd) = (zero(), zero());
    for s in BellString::iter_all(povm.n) {
        if singlet_count(&s).is_multiple_of(2) {
            even += povm.alpha(&s);
        } else {
            odd += povm.beta(&s);
        }
    }
    let p00 = int(2) * even / (&four + &two);
    let p11 = int(2) * odd / (&four - &two);
    (p00, p11)
}

/// `p₀|₀ + p₁|₁ − 1`.
pub fn advantage(povm: &BellDiagonalPovm) -> Rational {
    let (p00, p11) = success_probabilities(povm);
    p00 + p11 - one()
}

/// δ = 1/2^{n−1}.
pub fn delta(n: usize) -> Rational {
    assert!(n >= 1);
    one() / pow2(n as u32 - 1)
}

pub fn security_bound(n: usize) -> f64 {
    to_f64(&delta(n))
}

/// H(p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(p) + h(1.0 - p)
}

/// δ · H(B) for a hidden bit with `P(B = 0) = prior`.
pub fn mutual_info_bound(n: usize, prior: &Rational) -> Result<f64> {
    if !prior.is_positive() || *prior >= one() {
        return input(format!("prior {} outside (0, 1)", format_rational(prior)));
    }
    Ok(security_bound(n) * binary_entropy(to_f64(prior)))
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Number of length-`n` strings with exactly `k` singlets: C(n,k)·3^{n−k}.
pub fn singlet_class_size(n: usize, k: usize) -> BigInt {
    binomial(n, k) * BigInt::from(3u8).pow((n - k) as u32)
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Row `j` of the reduced constraint matrix: coefficients of
/// `(3 − x)^{n−j} (1 + x)^j`, for `j = 0..=n`.
pub fn reduced_constraint_rows(n: usize) -> Vec<Vec<Rational>> {
    let minus = [BigInt::from(3), BigInt::from(-1)];
    let plus = [BigInt::one(), BigInt::one()];
    (0..=n)
        .map(|j| {
            let mut p = vec![BigInt::one()];
            for _ in 0..(n - j) {
                p = poly_mul(&p, &minus);
            }
            for _ in 0..j {
                p = poly_mul(&p, &plus);
            }
            p.into_iter().map(BigRational::from_integer).collect()
        })
        .collect()
}

/// Objective of the reduced LP (`p₀|₀ + p₁|₁ − 1` as a linear form in the
/// profile), together with the constant offset (zero).
fn reduced_objective(n: usize) -> Vec<Rational> {
    let four = pow2(2 * n as u32);
    let two = pow2(n as u32);
    let even_norm = int(2) / (&four + &two);
    let odd_norm = int(2) / (&four - &two);
    (0..=n)
        .map(|k| {
            let size = BigRational::from_integer(singlet_class_size(n, k));
            if k % 2 == 0 {
                &even_norm * size
            } else {
                -(&odd_norm * size)
            }
        })
        .collect()
}

/// Either an exact rational or a double-precision value.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Rational),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(r) => to_f64(r),
            Number::Float(x) => *x,
        }
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Number::Exact(r) => RationalRecord::from(r).serialize(s),
            Number::Float(x) => s.serialize_f64(*x),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpMethod {
    Reduced,
    Full,
}

/// Whether the LP optimum attains δ exactly.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Tightness {
    Tight,
    Loose,
    Unknown,
}

impl Serialize for Tightness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Tightness::Tight => s.serialize_bool(true),
            Tightness::Loose => s.serialize_bool(false),
            Tightness::Unknown => s.serialize_str("unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub method: LpMethod,
    pub variables: usize,
    pub constraints: usize,
    pub pivots: Option<usize>,
}

/// Result of maximising (and minimising) `p₀|₀ + p₁|₁ − 1` over PPT
/// Bell-diagonal POVMs.
#[derive(Clone, Debug, PartialEq)]
pub struct SecurityCertificate {
    pub n: usize,
    pub delta: Rational,
    pub lp_optimum_minus_1: Number,
    pub lp_minimum_minus_1: Number,
    pub tight: Tightness,
    /// Optimal `α` as a function of the singlet count (the full LP witness
    /// is averaged over each singlet-count class).
    pub witness_by_n11: Vec<Number>,
    pub min_witness_by_n11: Vec<Number>,
    pub solver: SolverStats,
}

impl SecurityCertificate {
    pub fn gap(&self) -> f64 {
        match &self.lp_optimum_minus_1 {
            Number::Exact(r) => to_f64(&(&self.delta - r)),
            Number::Float(x) => to_f64(&self.delta) - x,
        }
    }

    /// Both one-sided bounds hold within tolerance.
    pub fn within_bound(&self, tol: f64) -> bool {
        let d = to_f64(&self.delta);
        self.lp_optimum_minus_1.to_f64() <= d + tol && self.lp_minimum_minus_1.to_f64() >= -d - tol
    }
}

impl Serialize for SecurityCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SecurityCertificate", 8)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("delta", &RationalRecord::from(&self.delta))?;
        st.serialize_field("lp_optimum_minus_1", &self.lp_optimum_minus_1)?;
        st.serialize_field("lp_minimum_minus_1", &self.lp_minimum_minus_1)?;
        st.serialize_field("tight", &self.tight)?;
        st.serialize_field("witness_by_N11", &self.witness_by_n11)?;
        st.serialize_field("min_witness_by_N11", &self.min_witness_by_n11)?;
        st.serialize_field("solver_stats", &self.solver)?;
        st.end()
    }
}

/// Optimises the reduced LP in `sense`; among optimal profiles picks the
/// lexicographically smallest.
fn solve_reduced(n: usize, sense: Sense) -> Result<(Rational, Vec<Rational>, usize, usize)> {
    let vars = n + 1;
    let upper = pow2(n as u32);
    let mut lp = LinearProgram::new(vars, sense, reduced_objective(n));
    for row in reduced_constraint_rows(n) {
        lp.add(row.clone(), Cmp::Ge, zero());
        lp.add(row, Cmp::Le, upper.clone());
    }
    let unit = |k: usize| {
        let mut e = vec![zero(); vars];
        e[k] = one();
        e
    };
    for k in 0..vars {
        lp.add(unit(k), Cmp::Le, one());
    }
    let tie_breaks: Vec<_> = (0..vars).map(|k| (Sense::Minimize, unit(k))).collect();
    match lp.solve_lexicographic(&tie_breaks) {
        LpOutcome::Optimal { value, x, pivots } => Ok((value, x, pivots, lp.constraints.len())),
        LpOutcome::Infeasible => Err(Error::Internal("LP reported infeasible".into())),
        LpOutcome::Unbounded => Err(Error::Internal("LP reported unbounded".into())),
    }
}

/// Exact certificate from the symmetry-reduced LP (`n + 1` variables).
pub fn optimize_reduced(n: usize) -> Result<SecurityCertificate> {
    if n == 0 {
        return input("block size must be at least 1");
    }
    check_cap("reduced LP block size n", n, REDUCED_LP_CAP)?;
    let (max, max_w, p1, rows) = solve_reduced(n, Sense::Maximize)?;
    let (min, min_w, p2, _) = solve_reduced(n, Sense::Minimize)?;
    let d = delta(n);
    let tight = if max == d { Tightness::Tight } else { Tightness::Loose };
    Ok(SecurityCertificate {
        n,
        delta: d,
        lp_optimum_minus_1: Number::Exact(max),
        lp_minimum_minus_1: Number::Exact(min),
        tight,
        witness_by_n11: max_w.into_iter().map(Number::Exact).collect(),
        min_witness_by_n11: min_w.into_iter().map(Number::Exact).collect(),
        solver: SolverStats {
            method: LpMethod::Reduced,
            variables: n + 1,
            constraints: rows,
            pivots: Some(p1 + p2),
        },
    })
}

/// Solution of the unreduced LP in double precision.
#[derive(Clone, Debug)]
pub struct FullSolution {
    pub value: f64,
    pub alpha: Vec<f64>,
}

/// Unreduced LP over all `4^n` coefficients, solved in double precision.
pub fn solve_full(n: usize, maximize: bool) -> Result<FullSolution> {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};

    if n == 0 {
        return input("block size must be at least 1");
    }
    check_cap("full LP block size n", n, FULL_LP_CAP)?;
    let dim = 1usize << (2 * n);
    let four = 4f64.powi(n as i32);
    let two = 2f64.powi(n as i32);
    let dir = if maximize { OptimizationDirection::Maximize } else { OptimizationDirection::Minimize };
    let mut problem = Problem::new(dir);
    let vars: Vec<_> = BellString::iter_all(n)
        .map(|s| {
            let c = if singlet_count(&s).is_multiple_of(2) { 2.0 / (four + two) } else { -2.0 / (four - two) };
            problem.add_var(c, (0.0, 1.0))
        })
        .collect();
    for m in PauliString::iter_all(n) {
        let expr: Vec<_> = BellString::iter_all(n)
            .map(|s| {
                let t = pauli_act(&s, &m).expect("same length");
                let sign = if singlet_count(&s).is_multiple_of(2) { 1.0 } else { -1.0 };
                (vars[t.code() as usize], sign)
            })
            .collect();
        problem.add_constraint(expr.as_slice(), ComparisonOp::Ge, 0.0);
        problem.add_constraint(expr.as_slice(), ComparisonOp::Le, two);
    }
    let sol = problem.solve().map_err(|e| Error::Internal(format!("full LP failed: {e}")))?;
    let alpha = (0..dim).map(|i| sol[vars[i]]).collect();
    Ok(FullSolution { value: sol.objective(), alpha })
}

/// Averages a full coefficient vector over each singlet-count class.
pub fn symmetrize_profile(n: usize, alpha: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; n + 1];
    let mut counts = vec![0usize; n + 1];
    for (code, a) in alpha.iter().enumerate() {
        let k = singlet_count(&BellString::from_code(n, code as u64).expect("code fits"));
        sums[k] += a;
        counts[k] += 1;
    }
    sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect()
}

/// Certificate from the unreduced LP (cross-validation path, `n ≤ 3`).
pub fn optimize(n: usize) -> Result<SecurityCertificate> {
    let max = solve_full(n, true)?;
    let min = solve_full(n, false)?;
    let dim = 1usize << (2 * n);
    Ok(SecurityCertificate {
        n,
        delta: delta(n),
        lp_optimum_minus_1: Number::Float(max.value),
        lp_minimum_minus_1: Number::Float(min.value),
        tight: Tightness::Unknown,
        witness_by_n11: symmetrize_profile(n, &max.alpha).into_iter().map(Number::Float).collect(),
        min_witness_by_n11: symmetrize_profile(n, &min.alpha).into_iter().map(Number::Float).collect(),
        solver: SolverStats {
            method: LpMethod::Full,
            variables: dim,
            constraints: 2 * dim,
            pivots: None,
        },
    })
}

/// Rational `1/2` convenience for the coin-flip POVM.
pub fn coin_flip(n: usize) -> Result<BellDiagonalPovm> {
    BellDiagonalPovm::constant(n, frac(1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{interleave, is_ppt, realize_diagonal, DenseOperator, C64};
    use crate::rational::frac;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ppt_constraint_examples() {
        for n in 1..=3 {
            let coin = coin_flip(n).unwrap();
            for m in PauliString::iter_all(n) {
                assert_eq!(ppt_constraint(&coin, &m).unwrap(), pow2(n as u32 - 1));
            }
            let ones = BellDiagonalPovm::constant(n, one()).unwrap();
            assert_eq!(ppt_constraint(&ones, &PauliString::identity(n).unwrap()).unwrap(), pow2(n as u32));
        }
        let p = coin_flip(2).unwrap();
        assert!(ppt_constraint(&p, &PauliString::identity(1).unwrap()).is_err());
    }

    #[test]
    fn success_probability_examples() {
        for n in 1..=3 {
            let (a, b) = success_probabilities(&BellDiagonalPovm::constant(n, one()).unwrap());
            assert_eq!((a, b), (one(), zero()));
            let (a, b) = success_probabilities(&BellDiagonalPovm::constant(n, zero()).unwrap());
            assert_eq!((a, b), (zero(), one()));
            let (a, b) = success_probabilities(&coin_flip(n).unwrap());
            assert_eq!((a, b), (frac(1, 2), frac(1, 2)));
        }
    }

    #[test]
    fn povm_validation() {
        assert!(BellDiagonalPovm::new(1, vec![one(); 3]).is_err());
        assert!(BellDiagonalPovm::new(1, vec![one(), one(), one(), int(2)]).is_err());
        assert!(BellDiagonalPovm::new(1, vec![one(), one(), one(), frac(-1, 2)]).is_err());
    }

    #[test]
    fn twirl_examples() {
        let t = twirl(&DenseOperator::identity(2).unwrap()).unwrap();
        assert!(t.coefficients().iter().all(|a| (to_f64(a) - 1.0).abs() < 1e-12));
        let singlet = realize_diagonal(1, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let t = twirl(&singlet).unwrap();
        let got: Vec<f64> = t.coefficients_f64();
        for (g, e) in got.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((g - e).abs() < 1e-12);
        }
        assert!(twirl(&DenseOperator::identity(1).unwrap().scale(2.0)).is_err());
    }

    #[test]
    fn twirl_preserves_bell_diagonal_expectations() {
        use crate::dense::{random_positive, realize, trace_pair};
        use crate::states::hiding_state;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=2 {
            let g = random_positive(n, 2, &mut rng).unwrap();
            let lmax = *g.eigenvalues().unwrap().last().unwrap();
            let m = g.scale(1.0 / lmax);
            let t = twirl(&m).unwrap();
            let md = realize_diagonal(n, &t.coefficients_f64()).unwrap();
            for b in 0..2 {
                let rho = realize(&hiding_state(n, b).unwrap()).unwrap();
                assert!((trace_pair(&m, &rho).unwrap() - trace_pair(&md, &rho).unwrap()).abs() < 1e-12);
            }
        }
    }

    /// Separable operator Σ_k A_k ⊗ B_k with Alice/Bob registers interleaved.
    fn separable(n: usize, rng: &mut ChaCha8Rng, terms: usize) -> DenseOperator {
        let side = 1 << n;
        let dim = side * side;
        let mut mat = DMatrix::<C64>::zeros(dim, dim);
        let rand_psd = |rng: &mut ChaCha8Rng| {
            let g = DMatrix::from_fn(side, side, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            &g * g.adjoint()
        };
        for _ in 0..terms {
            let a = rand_psd(rng);
            let b = rand_psd(rng);
            for a1 in 0..side {
                for b1 in 0..side {
                    for a2 in 0..side {
                        for b2 in 0..side {
                            mat[(interleave(a1, b1, n), interleave(a2, b2, n))] += a[(a1, a2)] * b[(b1, b2)];
                        }
                    }
                }
            }
        }
        let op = DenseOperator::from_matrix(mat).unwrap();
        let lmax = *op.eigenvalues().unwrap().last().unwrap();
        op.scale(1.0 / lmax)
    }

    #[test]
    fn twirl_keeps_ppt() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=2 {
            for _ in 0..4 {
                let m = separable(n, &mut rng, 3);
                assert!(is_ppt(&m).unwrap());
                let t = twirl(&m).unwrap();
                let m0 = realize_diagonal(n, &t.coefficients_f64()).unwrap();
                assert!(is_ppt(&m0).unwrap());
                let m1 = realize_diagonal(n, &t.complement().coefficients_f64()).unwrap();
                assert!(is_ppt(&m1).unwrap());
                for m in PauliString::iter_all(n) {
                    let v = to_f64(&ppt_constraint(&t, &m).unwrap());
                    assert!(v >= -1e-9 && v <= 2f64.powi(n as i32) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn reduced_rows_match_direct_substitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=3 {
            let rows = reduced_constraint_rows(n);
            for _ in 0..3 {
                let profile: Vec<Rational> = (0..=n).map(|_| frac(rng.random_range(0..=12), 12)).collect();
                let povm = BellDiagonalPovm::from_profile(n, &profile).unwrap();
                for m in PauliString::iter_all(n) {
                    let direct = ppt_constraint(&povm, &m).unwrap();
                    let reduced = rows[m.weight()]
                        .iter()
                        .zip(&profile)
                        .fold(zero(), |acc, (c, a)| acc + c * a);
                    assert_eq!(direct, reduced, "n={n} m={m}");
                }
                let obj = reduced_objective(n).iter().zip(&profile).fold(zero(), |acc, (c, a)| acc + c * a);
                assert_eq!(obj, advantage(&povm));
            }
        }
    }

    #[test]
    fn class_sizes_cover_all_strings() {
        for n in 1..=8 {
            let total: BigInt = (0..=n).map(|k| singlet_class_size(n, k)).sum();
            assert_eq!(total, BigInt::from(4u8).pow(n as u32));
        }
    }

    #[test]
    fn one_pair_optimum_by_hand() {
        // n = 1: maximise a0 − a1 under 0 ≤ 3a0 − a1 ≤ 2, 0 ≤ a0 + a1 ≤ 2
        let c = optimize_reduced(1).unwrap();
        assert_eq!(c.lp_optimum_minus_1, Number::Exact(frac(2, 3)));
        assert_eq!(c.lp_minimum_minus_1, Number::Exact(frac(-2, 3)));
        assert_eq!(c.witness_by_n11, vec![Number::Exact(frac(2, 3)), Number::Exact(zero())]);
        assert_eq!(c.tight, Tightness::Loose);
    }

    #[test]
    fn certificates_respect_delta() {
        for n in 1..=6 {
            let c = optimize_reduced(n).unwrap();
            assert!(c.within_bound(0.0), "n = {n}: {:?}", c.lp_optimum_minus_1);
            assert_eq!(c.solver.variables, n + 1);
        }
    }

    #[test]
    fn reduced_matches_full() {
        for n in 1..=3 {
            let r = optimize_reduced(n).unwrap();
            let f = optimize(n).unwrap();
            assert!((r.lp_optimum_minus_1.to_f64() - f.lp_optimum_minus_1.to_f64()).abs() < 1e-9);
            assert!((r.lp_minimum_minus_1.to_f64() - f.lp_minimum_minus_1.to_f64()).abs() < 1e-9);
        }
        assert!(optimize(FULL_LP_CAP + 1).is_err());
    }

    #[test]
    fn witnesses_are_ppt_and_achieve_optimum() {
        for n in 1..=2 {
            let c = optimize_reduced(n).unwrap();
            for (w, target) in [(&c.witness_by_n11, &c.lp_optimum_minus_1), (&c.min_witness_by_n11, &c.lp_minimum_minus_1)] {
                let profile: Vec<Rational> = w
                    .iter()
                    .map(|x| match x {
                        Number::Exact(r) => r.clone(),
                        Number::Float(_) => unreachable!(),
                    })
                    .collect();
                let povm = BellDiagonalPovm::from_profile(n, &profile).unwrap();
                assert!(is_ppt_feasible(&povm).unwrap());
                assert_eq!(&Number::Exact(advantage(&povm)), target);
                let m0 = realize_diagonal(n, &povm.coefficients_f64()).unwrap();
                let m1 = realize_diagonal(n, &povm.complement().coefficients_f64()).unwrap();
                assert!(is_ppt(&m0).unwrap() && is_ppt(&m1).unwrap());
            }
        }
    }

    #[test]
    fn full_witness_symmetrization_keeps_feasibility() {
        let n = 2;
        for maximize in [true, false] {
            let sol = solve_full(n, maximize).unwrap();
            let profile = symmetrize_profile(n, &sol.alpha);
            let expanded: Vec<f64> = BellString::iter_all(n).map(|s| profile[singlet_count(&s)]).collect();
            for m in PauliString::iter_all(n) {
                let v: f64 = BellString::iter_all(n)
                    .map(|s| {
                        let sign = if singlet_count(&s).is_multiple_of(2) { 1.0 } else { -1.0 };
                        sign * expanded[pauli_act(&s, &m).unwrap().code() as usize]
                    })
                    .sum();
                assert!((-1e-9..=4.0 + 1e-9).contains(&v));
            }
            let obj = |a: &[f64]| -> f64 {
                BellString::iter_all(n)
                    .map(|s| {
                        let x = a[s.code() as usize];
                        if singlet_count(&s).is_multiple_of(2) { x * 2.0 / 20.0 } else { -x * 2.0 / 12.0 }
                    })
                    .sum()
            };
            assert!((obj(&expanded) - sol.value).abs() < 1e-9);
        }
    }

    #[test]
    fn optimum_is_monotone_in_n() {
        let vals: Vec<f64> = (1..=12).map(|n| optimize_reduced(n).unwrap().lp_optimum_minus_1.to_f64()).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{vals:?}");
        let full: Vec<f64> = (1..=3).map(|n| optimize(n).unwrap().lp_optimum_minus_1.to_f64()).collect();
        assert!(full.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn bounds_and_entropy() {
        assert_eq!(security_bound(2), 0.5);
        assert_eq!(delta(3), frac(1, 4));
        assert!((mutual_info_bound(2, &frac(1, 2)).unwrap() - 0.5).abs() < 1e-15);
        assert!(mutual_info_bound(2, &one()).is_err());
        assert!(mutual_info_bound(2, &zero()).is_err());
        let near_one = frac(999_999, 1_000_000);
        assert!(mutual_info_bound(2, &near_one).unwrap() < 1e-4);
    }

    fn feasible_profile_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        // α = 1/2 + ε r with |ε r| small enough that every PPT row stays in range
        let dim = 1usize << (2 * n);
        let eps = 2f64.powi(n as i32 - 1) / 4f64.powi(n as i32);
        prop::collection::vec(-1.0f64..1.0, dim).prop_map(move |r| r.into_iter().map(|x| 0.5 + 0.999 * eps * x).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn feasible_points_obey_two_sided_bound(alpha in feasible_profile_strategy(2)) {
            let n = 2;
            let exact: Vec<Rational> = alpha.iter().map(|&a| BigRational::from_float(a).unwrap()).collect();
            let povm = BellDiagonalPovm::new(n, exact).unwrap();
            prop_assert!(is_ppt_feasible(&povm).unwrap());
            let adv = advantage(&povm);
            let d = delta(n);
            prop_assert!(adv <= d && adv >= -d);

            // symmetrising over singlet-count classes preserves feasibility and objective
            let sym = symmetrize_profile(n, &alpha);
            let sym_exact: Vec<Rational> = {
                let mut sums = vec![zero(); n + 1];
                let mut counts = vec![0i64; n + 1];
                for s in BellString::iter_all(n) {
                    let k = singlet_count(&s);
                    sums[k] += povm.alpha(&s);
                    counts[k] += 1;
                }
                sums.into_iter().zip(counts).map(|(s, c)| s / int(c)).collect()
            };
            for (a, b) in sym.iter().zip(&sym_exact) {
                prop_assert!((a - to_f64(b)).abs() < 1e-12);
            }
            let sym_povm = BellDiagonalPovm::from_profile(n, &sym_exact).unwrap();
            prop_assert!(is_ppt_feasible(&sym_povm).unwrap());
            prop_assert_eq!(advantage(&sym_povm), adv);
        }
    }
}
