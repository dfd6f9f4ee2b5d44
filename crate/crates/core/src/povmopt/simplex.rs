//! Dense-tableau two-phase simplex over exact rationals.
//!
//! Variables are non-negative. Bland's rule picks both the entering and the
//! leaving variable, so the method terminates without cycling; with exact
//! arithmetic the reported optimum is exact.

use num_traits::{Signed, Zero};

use crate::rational::{zero, Rational};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

/// `sense c·x` subject to the constraints and `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational>, pivots: usize },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense, objective: Vec<Rational>) -> Self {
        assert_eq!(objective.len(), num_vars);
        LinearProgram { num_vars, sense, objective, constraints: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, cmp: Cmp, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        self.solve_lexicographic(&[])
    }

    /// Optimises the primary objective, then each `tie_breaks` objective in
    /// turn over the optimal face of everything before it. The reported
    /// `value` is that of the primary objective.
    pub fn solve_lexicographic(&self, tie_breaks: &[(Sense, Vec<Rational>)]) -> LpOutcome {
        Tableau::build(self).run(self, tie_breaks)
    }
}

struct Tableau {
    /// `rows[i]` = coefficients over all columns followed by the rhs.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    num_cols: usize,
    first_artificial: usize,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let m = lp.constraints.len();
        // normalise to rhs >= 0
        let normalised: Vec<(Vec<Rational>, Cmp, Rational)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    let cmp = match c.cmp {
                        Cmp::Le => Cmp::Ge,
                        Cmp::Ge => Cmp::Le,
                        Cmp::Eq => Cmp::Eq,
                    };
                    (c.coeffs.iter().map(|a| -a).collect(), cmp, -&c.rhs)
                } else {
                    (c.coeffs.clone(), c.cmp, c.rhs.clone())
                }
            })
            .collect();
        let num_slack = normalised.iter().filter(|(_, cmp, _)| *cmp != Cmp::Eq).count();
        let num_art = normalised.iter().filter(|(_, cmp, _)| *cmp != Cmp::Le).count();
        let first_slack = lp.num_vars;
        let first_artificial = first_slack + num_slack;
        let num_cols = first_artificial + num_art;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (first_slack, first_artificial);
        for (coeffs, cmp, rhs) in normalised {
            let mut row = coeffs;
            row.resize(num_cols + 1, zero());
            match cmp {
                Cmp::Le => {
                    row[next_slack] = Rational::from_integer(1.into());
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Cmp::Ge => {
                    row[next_slack] = Rational::from_integer((-1).into());
                    row[next_art] = Rational::from_integer(1.into());
                    basis.push(next_art);
                    next_slack += 1;
                    next_art += 1;
                }
                Cmp::Eq => {
                    row[next_art] = Rational::from_integer(1.into());
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            row[num_cols] = rhs;
            rows.push(row);
        }
        Tableau { rows, basis, num_cols, first_artificial, pivots: 0 }
    }

    fn pivot(&mut self, r: usize, col: usize, obj: &mut [Rational]) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !obj[col].is_zero() {
            let f = obj[col].clone();
            for (v, pv) in obj.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    /// Reduced-cost row for maximising `cost` over the current basis; the
    /// last entry holds minus the objective value.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.resize(self.num_cols + 1, zero());
        for (r, &b) in self.basis.iter().enumerate() {
            if !obj[b].is_zero() {
                let f = obj[b].clone();
                for (v, rv) in obj.iter_mut().zip(&self.rows[r]) {
                    *v -= &f * rv;
                }
            }
        }
        obj
    }

    /// Maximises with Bland's rule over the columns flagged in `allowed`.
    /// Returns false when unbounded.
    fn optimise(&mut self, obj: &mut [Rational], allowed: &[bool]) -> bool {
        loop {
            let Some(enter) = (0..allowed.len()).find(|&j| allowed[j] && obj[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[enter].is_positive() {
                    let ratio = &row[self.num_cols] / &row[enter];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, enter, obj);
        }
    }

    fn run(mut self, lp: &LinearProgram, tie_breaks: &[(Sense, Vec<Rational>)]) -> LpOutcome {
        // phase 1: maximise −Σ artificials
        if self.first_artificial < self.num_cols {
            let mut cost = vec![zero(); self.num_cols];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = Rational::from_integer((-1).into());
            }
            let mut obj = self.reduced_costs(&cost);
            let all = vec![true; self.num_cols];
            self.optimise(&mut obj, &all);
            if !obj[self.num_cols].is_zero() {
                return LpOutcome::Infeasible;
            }
            // drive artificials out of the basis, dropping redundant rows
            let mut r = 0;
            while r < self.rows.len() {
                if self.basis[r] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                        Some(col) => {
                            self.pivot(r, col, &mut obj);
                            r += 1;
                        }
                        None => {
                            self.rows.remove(r);
                            self.basis.remove(r);
                        }
                    }
                } else {
                    r += 1;
                }
            }
            for row in self.rows.iter_mut() {
                row.drain(self.first_artificial..self.num_cols);
            }
            self.num_cols = self.first_artificial;
        }

        // phase 2, then tie-breaks restricted to the optimal face: a column
        // with non-zero reduced cost at an optimum is zero on that face
        let mut allowed = vec![true; self.num_cols];
        let stages = std::iter::once((lp.sense, &lp.objective)).chain(tie_breaks.iter().map(|(s, c)| (*s, c)));
        for (sense, objective) in stages {
            assert_eq!(objective.len(), lp.num_vars);
            let sign = match sense {
                Sense::Maximize => Rational::from_integer(1.into()),
                Sense::Minimize => Rational::from_integer((-1).into()),
            };
            let mut cost: Vec<Rational> = objective.iter().map(|c| c * &sign).collect();
            cost.resize(self.num_cols, zero());
            let mut obj = self.reduced_costs(&cost);
            if !self.optimise(&mut obj, &allowed) {
                return LpOutcome::Unbounded;
            }
            for (j, a) in allowed.iter_mut().enumerate() {
                if !obj[j].is_zero() {
                    *a = false;
                }
            }
        }
        let mut x = vec![zero(); lp.num_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < lp.num_vars {
                x[b] = self.rows[r][self.num_cols].clone();
            }
        }
        let value = lp
            .objective
            .iter()
            .zip(&x)
            .fold(zero(), |acc, (c, v)| acc + c * v);
        LpOutcome::Optimal { value, x, pivots: self.pivots }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn r(v: i64) -> Rational {
        int(v)
    }

    #[test]
    fn textbook_maximisation() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 → 36 at (2, 6)
        let mut lp = LinearProgram::new(2, Sense::Maximize, vec![r(3), r(5)]);
        lp.add(vec![r(1), r(0)], Cmp::Le, r(4));
        lp.add(vec![r(0), r(2)], Cmp::Le, r(12));
        lp.add(vec![r(3), r(2)], Cmp::Le, r(18));
        match lp.solve() {
            LpOutcome::Optimal { value, x, .. } => {
                assert_eq!(value, r(36));
                assert_eq!(x, vec![r(2), r(6)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn phase_one_with_equalities() {
        // min x + y, x + 2y >= 3, x - y = 1/2
        let mut lp = LinearProgram::new(2, Sense::Minimize, vec![r(1), r(1)]);
        lp.add(vec![r(1), r(2)], Cmp::Ge, r(3));
        lp.add(vec![r(1), r(-1)], Cmp::Eq, frac(1, 2));
        match lp.solve() {
            LpOutcome::Optimal { value, x, .. } => {
                assert_eq!(x, vec![frac(4, 3), frac(5, 6)]);
                assert_eq!(value, frac(13, 6));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1, Sense::Maximize, vec![r(1)]);
        lp.add(vec![r(1)], Cmp::Le, r(1));
        lp.add(vec![r(1)], Cmp::Ge, r(2));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2, Sense::Maximize, vec![r(1), r(0)]);
        lp.add(vec![r(1), r(-1)], Cmp::Le, r(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        // -x <= -1 (x >= 1), x = 1 twice, max -x
        let mut lp = LinearProgram::new(1, Sense::Maximize, vec![r(-1)]);
        lp.add(vec![r(-1)], Cmp::Le, r(-1));
        lp.add(vec![r(1)], Cmp::Eq, r(1));
        lp.add(vec![r(2)], Cmp::Eq, r(2));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(-1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lexicographic_tie_break() {
        // max x + y on x + y <= 1: every point of the segment is optimal;
        // minimising x first selects (0, 1), minimising y first selects (1, 0)
        let mut lp = LinearProgram::new(2, Sense::Maximize, vec![r(1), r(1)]);
        lp.add(vec![r(1), r(1)], Cmp::Le, r(1));
        for (tie, expect) in [(vec![r(1), r(0)], vec![r(0), r(1)]), (vec![r(0), r(1)], vec![r(1), r(0)])] {
            match lp.solve_lexicographic(&[(Sense::Minimize, tie)]) {
                LpOutcome::Optimal { value, x, .. } => {
                    assert_eq!(value, r(1));
                    assert_eq!(x, expect);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(
            4,
            Sense::Maximize,
            vec![frac(3, 4), r(-150), frac(1, 50), r(-6)],
        );
        lp.add(vec![frac(1, 4), r(-60), frac(-1, 25), r(9)], Cmp::Le, r(0));
        lp.add(vec![frac(1, 2), r(-90), frac(-1, 50), r(3)], Cmp::Le, r(0));
        lp.add(vec![r(0), r(0), r(1), r(0)], Cmp::Le, r(1));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, frac(1, 20)),
            other => panic!("{other:?}"),
        }
    }
}
