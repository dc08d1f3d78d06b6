//! Exact small-scale linear programming.
//!
//! A two-phase primal simplex over rationals with Bland's anti-cycling
//! rule. The LPs in this crate are tiny (at most a handful of variables
//! and rows), so the tableau is dense and every pivot is exact. The
//! closed-form dual value for the symmetric 3x3 system lives here too.

use num_traits::{Signed, Zero};

use crate::geom2d::{rat_i, Rat};
use crate::{Error, Result};

/// `minimize objective . s  subject to  rows (>= rhs), s >= 0`.
#[derive(Clone, Debug)]
pub struct SmallLP {
    pub objective: Vec<Rat>,
    pub rows: Vec<LpRow>,
}

/// One `coeffs . s >= rhs` constraint.
#[derive(Clone, Debug)]
pub struct LpRow {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

impl SmallLP {
    pub fn new(objective: Vec<Rat>, rows: Vec<LpRow>) -> Result<Self> {
        if objective.is_empty() {
            return Err(Error::InvalidParam("LP needs at least one variable".into()));
        }
        for row in &rows {
            if row.coeffs.len() != objective.len() {
                return Err(Error::InvalidParam("constraint width mismatch".into()));
            }
        }
        Ok(SmallLP { objective, rows })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output. `value`, `primal`, `dual` are meaningful only when the
/// status is `Optimal`; they are zero/empty otherwise.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Rat,
    pub primal: Vec<Rat>,
    pub dual: Vec<Rat>,
}

impl LpSolution {
    fn non_optimal(status: LpStatus) -> Self {
        LpSolution {
            status,
            value: rat_i(0),
            primal: Vec::new(),
            dual: Vec::new(),
        }
    }

    /// Exact primal feasibility, dual feasibility, strong duality and
    /// complementary slackness against the originating LP.
    pub fn certifies(&self, lp: &SmallLP) -> bool {
        if self.status != LpStatus::Optimal {
            return false;
        }
        if self.primal.iter().any(|s| s.is_negative()) {
            return false;
        }
        if self.dual.iter().any(|y| y.is_negative()) {
            return false;
        }
        let mut dual_obj = rat_i(0);
        for (row, y) in lp.rows.iter().zip(&self.dual) {
            let lhs: Rat = row
                .coeffs
                .iter()
                .zip(&self.primal)
                .map(|(a, s)| a * s)
                .sum();
            if lhs < row.rhs {
                return false;
            }
            // complementary slackness on rows
            if !y.is_zero() && lhs != row.rhs {
                return false;
            }
            dual_obj += y * &row.rhs;
        }
        for (j, c) in lp.objective.iter().enumerate() {
            let col: Rat = lp
                .rows
                .iter()
                .zip(&self.dual)
                .map(|(row, y)| &row.coeffs[j] * y)
                .sum();
            if &col > c {
                return false;
            }
            // complementary slackness on columns
            if !self.primal[j].is_zero() && &col != c {
                return false;
            }
        }
        let primal_obj: Rat = lp
            .objective
            .iter()
            .zip(&self.primal)
            .map(|(c, s)| c * s)
            .sum();
        primal_obj == self.value && dual_obj == self.value
    }
}

/// Exact optimum of `lp` by two-phase simplex with Bland's rule. The pivot
/// order is deterministic (lowest eligible index), so degenerate optima
/// resolve reproducibly.
pub fn solve_min(lp: &SmallLP) -> LpSolution {
    Simplex::new(lp).run(lp)
}

struct Simplex {
    n: usize,           // structural variables
    m: usize,           // rows
    tab: Vec<Vec<Rat>>, // m x (n + 2m + 1): structural | surplus | artificial | rhs
    basis: Vec<usize>,
    flipped: Vec<bool>,
}

impl Simplex {
    fn new(lp: &SmallLP) -> Self {
        let n = lp.objective.len();
        let m = lp.rows.len();
        let width = n + 2 * m + 1;
        let mut tab = vec![vec![rat_i(0); width]; m];
        let mut flipped = vec![false; m];
        for (i, row) in lp.rows.iter().enumerate() {
            let flip = row.rhs.is_negative();
            flipped[i] = flip;
            let sign = if flip { rat_i(-1) } else { rat_i(1) };
            for j in 0..n {
                tab[i][j] = &row.coeffs[j] * &sign;
            }
            tab[i][n + i] = -&sign; // surplus of the >= row
            tab[i][n + m + i] = rat_i(1); // artificial
            tab[i][width - 1] = &row.rhs * &sign;
        }
        let basis = (0..m).map(|i| n + m + i).collect();
        Simplex {
            n,
            m,
            tab,
            basis,
            flipped,
        }
    }

    fn rhs_col(&self) -> usize {
        self.n + 2 * self.m
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.tab[row][col].clone();
        for v in self.tab[row].iter_mut() {
            *v /= &p;
        }
        for i in 0..self.m {
            if i == row || self.tab[i][col].is_zero() {
                continue;
            }
            let factor = self.tab[i][col].clone();
            for j in 0..self.tab[i].len() {
                let delta = &factor * &self.tab[row][j];
                self.tab[i][j] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// Reduced-cost row for the given per-column costs.
    fn reduced_costs(&self, costs: &[Rat]) -> Vec<Rat> {
        let width = self.rhs_col();
        let mut rc = costs.to_vec();
        for i in 0..self.m {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, rc_j) in rc.iter_mut().enumerate().take(width) {
                let delta = cb * &self.tab[i][j];
                *rc_j -= delta;
            }
        }
        rc
    }

    /// Bland: entering column = lowest index with negative reduced cost.
    /// Artificial columns never re-enter.
    fn entering(&self, rc: &[Rat]) -> Option<usize> {
        (0..self.n + self.m).find(|&j| rc[j].is_negative())
    }

    /// Bland ratio test: minimum ratio, ties by lowest basic-variable index.
    fn leaving(&self, col: usize) -> Option<usize> {
        let rhs = self.rhs_col();
        let mut best: Option<(Rat, usize, usize)> = None; // (ratio, basis var, row)
        for i in 0..self.m {
            if self.tab[i][col].is_positive() {
                let ratio = &self.tab[i][rhs] / &self.tab[i][col];
                let key = (ratio, self.basis[i], i);
                best = Some(match best {
                    Some(cur) if (cur.0.clone(), cur.1) <= (key.0.clone(), key.1) => cur,
                    _ => key,
                });
            }
        }
        best.map(|(_, _, row)| row)
    }

    fn optimize(&mut self, costs: &[Rat]) -> LpStatus {
        loop {
            let rc = self.reduced_costs(costs);
            match self.entering(&rc) {
                None => return LpStatus::Optimal,
                Some(col) => match self.leaving(col) {
                    None => return LpStatus::Unbounded,
                    Some(row) => self.pivot(row, col),
                },
            }
        }
    }

    fn run(&mut self, lp: &SmallLP) -> LpSolution {
        let width = self.rhs_col() + 1;
        // Phase 1: minimize the sum of artificials.
        let mut phase1 = vec![rat_i(0); width];
        for j in self.n + self.m..self.n + 2 * self.m {
            phase1[j] = rat_i(1);
        }
        let status = self.optimize(&phase1);
        debug_assert_eq!(status, LpStatus::Optimal, "phase 1 is always bounded");
        let rhs = self.rhs_col();
        let infeas: Rat = (0..self.m)
            .filter(|&i| self.basis[i] >= self.n + self.m)
            .map(|i| self.tab[i][rhs].clone())
            .sum();
        if !infeas.is_zero() {
            return LpSolution::non_optimal(LpStatus::Infeasible);
        }
        // Drive zero-valued artificials out of the basis where possible.
        for i in 0..self.m {
            if self.basis[i] >= self.n + self.m {
                if let Some(col) = (0..self.n + self.m).find(|&j| !self.tab[i][j].is_zero()) {
                    self.pivot(i, col);
                }
                // An all-zero row is a redundant constraint; its artificial
                // stays basic at zero and the dual below comes out zero.
            }
        }

        // Phase 2: the real objective.
        let mut costs = vec![rat_i(0); width];
        costs[..self.n].clone_from_slice(&lp.objective);
        match self.optimize(&costs) {
            LpStatus::Unbounded => return LpSolution::non_optimal(LpStatus::Unbounded),
            LpStatus::Optimal => {}
            LpStatus::Infeasible => unreachable!(),
        }

        let mut primal = vec![rat_i(0); self.n];
        for i in 0..self.m {
            if self.basis[i] < self.n {
                primal[self.basis[i]] = self.tab[i][rhs].clone();
            }
        }
        let value: Rat = lp
            .objective
            .iter()
            .zip(&primal)
            .map(|(c, s)| c * s)
            .sum();
        let dual = self.extract_duals(lp, &costs);
        LpSolution {
            status: LpStatus::Optimal,
            value,
            primal,
            dual,
        }
    }

    /// Solve B^T y = c_B on the normalized equality system, then map the
    /// multipliers back to the original row orientation.
    fn extract_duals(&self, lp: &SmallLP, costs: &[Rat]) -> Vec<Rat> {
        let m = self.m;
        let n = self.n;
        // column j of the normalized equality system
        let column = |j: usize, i: usize| -> Rat {
            if j < n {
                let sign = if self.flipped[i] { rat_i(-1) } else { rat_i(1) };
                &lp.rows[i].coeffs[j] * &sign
            } else if j < n + m {
                if j - n == i {
                    rat_i(-1)
                } else {
                    rat_i(0)
                }
            } else if j - n - m == i {
                rat_i(1)
            } else {
                rat_i(0)
            }
        };
        // Build B^T (rows indexed by basis position) and solve.
        let mut mat = vec![vec![rat_i(0); m]; m];
        let mut rhs = vec![rat_i(0); m];
        for (k, &bj) in self.basis.iter().enumerate() {
            for i in 0..m {
                mat[k][i] = column(bj, i);
            }
            rhs[k] = costs[bj].clone();
        }
        let y_norm = solve_linear(mat, rhs).expect("basis matrix is nonsingular");
        y_norm
            .into_iter()
            .enumerate()
            .map(|(i, y)| if self.flipped[i] { -y } else { y })
            .collect()
    }
}

/// Exact Gaussian elimination with first-nonzero pivoting.
fn solve_linear(mut mat: Vec<Vec<Rat>>, mut rhs: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = mat.len();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let p = mat[col][col].clone();
        for v in mat[col].iter_mut() {
            *v /= &p;
        }
        rhs[col] /= &p;
        for r in 0..n {
            if r != col && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                for c in 0..n {
                    let delta = &f * &mat[col][c];
                    mat[r][c] -= delta;
                }
                let delta = &f * &rhs[col];
                rhs[r] -= delta;
            }
        }
    }
    Some(rhs)
}

/// Optimal value `1 - 1/(1 + 1/a + 1/b + 1/c)` of the symmetric system in
/// which each diagonal coefficient exceeds the off-diagonal ones by a, b, c.
pub fn dual_closed_form_3(a: &Rat, b: &Rat, c: &Rat) -> Result<Rat> {
    if !a.is_positive() || !b.is_positive() || !c.is_positive() {
        return Err(Error::InvalidParam("coefficients must be positive".into()));
    }
    let sum = a.recip() + b.recip() + c.recip();
    Ok(rat_i(1) - (rat_i(1) + sum).recip())
}

/// The `min sum(s)` LP whose rows have diagonal 1+a, 1+b, 1+c and ones
/// elsewhere; the geometric relaxation solves exactly this shape.
pub fn diag_excess_lp(excess: &[Rat]) -> SmallLP {
    let k = excess.len();
    let rows = (0..k)
        .map(|i| LpRow {
            coeffs: (0..k)
                .map(|j| if i == j { rat_i(1) + &excess[i] } else { rat_i(1) })
                .collect(),
            rhs: rat_i(1),
        })
        .collect();
    SmallLP::new(vec![rat_i(1); k], rows).expect("square system is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::rat;

    #[test]
    fn symmetric_triple() {
        // diagonal excess (1,1,1): optimum 3/4 at s = (1/4, 1/4, 1/4)
        let lp = diag_excess_lp(&[rat_i(1), rat_i(1), rat_i(1)]);
        let sol = solve_min(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.value, rat(3, 4));
        assert_eq!(sol.primal, vec![rat(1, 4), rat(1, 4), rat(1, 4)]);
        assert!(sol.certifies(&lp));
    }

    #[test]
    fn single_variable() {
        let lp = SmallLP::new(
            vec![rat_i(1)],
            vec![LpRow {
                coeffs: vec![rat_i(1)],
                rhs: rat_i(1),
            }],
        )
        .unwrap();
        let sol = solve_min(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.value, rat_i(1));
        assert!(sol.certifies(&lp));
    }

    #[test]
    fn infeasible() {
        let lp = SmallLP::new(
            vec![rat_i(1)],
            vec![LpRow {
                coeffs: vec![rat_i(-1)],
                rhs: rat_i(1),
            }],
        )
        .unwrap();
        assert_eq!(solve_min(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let lp = SmallLP::new(
            vec![rat_i(-1)],
            vec![LpRow {
                coeffs: vec![rat_i(1)],
                rhs: rat_i(1),
            }],
        )
        .unwrap();
        assert_eq!(solve_min(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            dual_closed_form_3(&rat_i(1), &rat_i(1), &rat_i(1)).unwrap(),
            rat(3, 4)
        );
        assert_eq!(
            dual_closed_form_3(&rat_i(1), &rat_i(2), &rat_i(3)).unwrap(),
            rat(11, 17)
        );
        assert!(dual_closed_form_3(&rat_i(0), &rat_i(1), &rat_i(1)).is_err());
        assert!(dual_closed_form_3(&rat(-1, 2), &rat_i(1), &rat_i(1)).is_err());
    }

    #[test]
    fn closed_form_equals_simplex() {
        let triples = [
            (rat_i(1), rat_i(2), rat_i(3)),
            (rat(1, 2), rat(7, 3), rat(5, 11)),
            (rat(9, 10), rat(9, 10), rat(1, 10)),
            (rat(100, 1), rat(1, 100), rat_i(1)),
        ];
        for (a, b, c) in triples {
            let lp = diag_excess_lp(&[a.clone(), b.clone(), c.clone()]);
            let sol = solve_min(&lp);
            assert_eq!(sol.status, LpStatus::Optimal);
            assert_eq!(sol.value, dual_closed_form_3(&a, &b, &c).unwrap());
            assert!(sol.certifies(&lp));
        }
    }

    #[test]
    fn closed_form_monotone() {
        // growing any excess shrinks 1/a + 1/b + 1/c and the optimum with it
        let base = dual_closed_form_3(&rat_i(1), &rat_i(2), &rat_i(3)).unwrap();
        let bigger_a = dual_closed_form_3(&rat_i(2), &rat_i(2), &rat_i(3)).unwrap();
        assert!(bigger_a < base);
        assert_eq!(base, rat(11, 17));
        assert_eq!(bigger_a, rat(4, 7));
    }

    #[test]
    fn mixed_senses_and_negative_rhs() {
        // coeffs.s >= -1 is vacuous under s >= 0 with nonnegative coeffs
        let lp = SmallLP::new(
            vec![rat_i(1), rat_i(1)],
            vec![
                LpRow {
                    coeffs: vec![rat_i(1), rat_i(2)],
                    rhs: rat_i(-1),
                },
                LpRow {
                    coeffs: vec![rat_i(1), rat_i(3)],
                    rhs: rat_i(2),
                },
            ],
        )
        .unwrap();
        let sol = solve_min(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.value, rat(2, 3));
        assert!(sol.certifies(&lp));
    }

    #[test]
    fn symmetric_two_row_closed_form() {
        // rows (1+a, 1, 1) and (1, 1+a, 1): the optimum is 2/(2+a)
        for a in [rat(5, 12), rat_i(1), rat(7, 3), rat(1, 100)] {
            let lp = SmallLP::new(
                vec![rat_i(1); 3],
                vec![
                    LpRow {
                        coeffs: vec![rat_i(1) + &a, rat_i(1), rat_i(1)],
                        rhs: rat_i(1),
                    },
                    LpRow {
                        coeffs: vec![rat_i(1), rat_i(1) + &a, rat_i(1)],
                        rhs: rat_i(1),
                    },
                ],
            )
            .unwrap();
            let sol = solve_min(&lp);
            assert_eq!(sol.status, LpStatus::Optimal);
            assert_eq!(sol.value, rat_i(2) / (rat_i(2) + &a));
            assert!(sol.certifies(&lp));
        }
    }

    #[test]
    fn degenerate_duplicate_rows() {
        let row = LpRow {
            coeffs: vec![rat_i(2), rat_i(1)],
            rhs: rat_i(1),
        };
        let lp = SmallLP::new(vec![rat_i(1), rat_i(1)], vec![row.clone(), row]).unwrap();
        let sol = solve_min(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.value, rat(1, 2));
        assert!(sol.certifies(&lp));
    }
}
