//! Dense exact-rational simplex, two-phase with Bland's rule.
//!
//! Solves min cᵀx subject to Ax = b, x ≥ 0 over BigRational. Sizes here are
//! tiny (dozens of rows), so no sparsity or numerics games; exactness is the
//! point, since strict-sign feasibility is decided by comparing an optimal
//! margin against zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    /// Row-major constraint matrix of Ax = b.
    pub a: Vec<Vec<Rat>>,
    pub b: Vec<Rat>,
    /// Objective to minimize.
    pub c: Vec<Rat>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal {
        x: Vec<Rat>,
        objective: Rat,
    },
    Unbounded,
    /// Farkas certificate y with yᵀA ≤ 0 componentwise and yᵀb > 0.
    Infeasible {
        farkas: Vec<Rat>,
    },
}

struct Tableau {
    rows: Vec<Vec<Rat>>, // m × (ncols + 1), last column is b
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col].clone();
        for x in self.rows[row].iter_mut() {
            *x /= &piv;
        }
        let prow = self.rows[row].clone();
        for (r, rr) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = rr[col].clone();
            if factor.is_zero() {
                continue;
            }
            for (x, p) in rr.iter_mut().zip(&prow) {
                *x -= &factor * p;
            }
        }
        self.basis[row] = col;
    }

    fn solution(&self) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); self.ncols];
        for (r, &bcol) in self.basis.iter().enumerate() {
            x[bcol] = self.rows[r][self.ncols].clone();
        }
        x
    }
}

/// Bland's rule simplex on an existing basic feasible tableau. `allowed`
/// masks the columns permitted to enter. Returns false on unboundedness.
fn run_simplex(t: &mut Tableau, cost: &[Rat], allowed: &[bool]) -> bool {
    loop {
        // Reduced costs z_j = c_j − c_Bᵀ B⁻¹ a_j, computed from the tableau.
        let mut entering = None;
        for j in 0..t.ncols {
            if !allowed[j] || t.basis.contains(&j) {
                continue;
            }
            let mut red = cost[j].clone();
            for (r, &bcol) in t.basis.iter().enumerate() {
                if !cost[bcol].is_zero() {
                    red -= &cost[bcol] * &t.rows[r][j];
                }
            }
            if red.is_negative() {
                entering = Some(j);
                break; // Bland: smallest index
            }
        }
        let Some(col) = entering else {
            return true;
        };
        let mut leaving: Option<(usize, Rat)> = None;
        for r in 0..t.rows.len() {
            if t.rows[r][col].is_positive() {
                let ratio = &t.rows[r][t.ncols] / &t.rows[r][col];
                let better = match &leaving {
                    None => true,
                    Some((lr, lv)) => {
                        ratio < *lv || (ratio == *lv && t.basis[r] < t.basis[*lr])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
        }
        match leaving {
            Some((row, _)) => t.pivot(row, col),
            None => return false,
        }
    }
}

pub fn solve(problem: &LpProblem) -> LpOutcome {
    let m = problem.a.len();
    let n = problem.c.len();
    // Normalize to b ≥ 0.
    let mut a = problem.a.clone();
    let mut b = problem.b.clone();
    for r in 0..m {
        if b[r].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
            b[r] = -b[r].clone();
        }
    }
    // Phase 1: artificials n..n+m with unit cost.
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for r in 0..m {
        let mut row = Vec::with_capacity(ncols + 1);
        row.extend(a[r].iter().cloned());
        for k in 0..m {
            row.push(if k == r { Rat::one() } else { Rat::zero() });
        }
        row.push(b[r].clone());
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        ncols,
    };
    let mut phase1_cost = vec![Rat::zero(); ncols];
    for item in phase1_cost.iter_mut().skip(n) {
        *item = Rat::one();
    }
    let allowed = vec![true; ncols];
    let bounded = run_simplex(&mut t, &phase1_cost, &allowed);
    debug_assert!(bounded, "phase 1 is bounded below by zero");
    let infeas: Rat = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bc)| bc >= n)
        .map(|(r, _)| t.rows[r][t.ncols].clone())
        .sum();
    if infeas.is_positive() {
        // Farkas vector from the phase-1 duals: y_i = 1 − (reduced cost of
        // artificial i); recover via the tableau's artificial columns.
        let mut y = vec![Rat::zero(); m];
        for (i, yi) in y.iter_mut().enumerate() {
            let mut red = Rat::one();
            for (r, &bcol) in t.basis.iter().enumerate() {
                if !phase1_cost[bcol].is_zero() {
                    red -= &phase1_cost[bcol] * &t.rows[r][n + i];
                }
            }
            *yi = Rat::one() - red;
        }
        // Undo the row sign normalization.
        for (r, yi) in y.iter_mut().enumerate() {
            if problem.b[r].is_negative() {
                *yi = -yi.clone();
            }
        }
        return LpOutcome::Infeasible { farkas: y };
    }
    // Drive remaining zero-value artificials out of the basis.
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, col);
            }
        }
    }
    // Rows still basic in an artificial are redundant; neutralize them.
    let keep: Vec<usize> = (0..m).filter(|&r| t.basis[r] < n).collect();
    if keep.len() < m {
        t.rows = keep.iter().map(|&r| t.rows[r].clone()).collect();
        t.basis = keep.iter().map(|&r| t.basis[r]).collect();
    }
    // Phase 2 on the original columns only.
    let mut allowed = vec![false; ncols];
    for item in allowed.iter_mut().take(n) {
        *item = true;
    }
    let mut phase2_cost = vec![Rat::zero(); ncols];
    phase2_cost[..n].clone_from_slice(&problem.c);
    if !run_simplex(&mut t, &phase2_cost, &allowed) {
        return LpOutcome::Unbounded;
    }
    let x_full = t.solution();
    let x: Vec<Rat> = x_full[..n].to_vec();
    let objective: Rat = problem
        .c
        .iter()
        .zip(&x)
        .map(|(ci, xi)| ci * xi)
        .sum();
    LpOutcome::Optimal { x, objective }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_optimum() {
        // min −x1 − x2 s.t. x1 + x2 + s = 4, x1 + 3x2 + t = 6; opt at (4,0)?
        // Check: candidates (4,0): obj −4; (3,1): −4; (0,2): −2. Optimal −4.
        let p = LpProblem {
            a: vec![
                vec![rat(1, 1), rat(1, 1), rat(1, 1), rat(0, 1)],
                vec![rat(1, 1), rat(3, 1), rat(0, 1), rat(1, 1)],
            ],
            b: vec![rat(4, 1), rat(6, 1)],
            c: vec![rat(-1, 1), rat(-1, 1), rat(0, 1), rat(0, 1)],
        };
        match solve(&p) {
            LpOutcome::Optimal { objective, .. } => assert_eq!(objective, rat(-4, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_gets_farkas() {
        // x1 = 1 and x1 = 2 cannot both hold.
        let p = LpProblem {
            a: vec![vec![rat(1, 1)], vec![rat(1, 1)]],
            b: vec![rat(1, 1), rat(2, 1)],
            c: vec![rat(0, 1)],
        };
        match solve(&p) {
            LpOutcome::Infeasible { farkas } => {
                // yᵀA ≤ 0 and yᵀb > 0.
                let ya = &farkas[0] + &farkas[1];
                assert!(!ya.is_positive());
                let yb = &farkas[0] * rat(1, 1) + &farkas[1] * rat(2, 1);
                assert!(yb.is_positive());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        // min −x1 with only x1 − x2 = 0: ray (t, t).
        let p = LpProblem {
            a: vec![vec![rat(1, 1), rat(-1, 1)]],
            b: vec![rat(0, 1)],
            c: vec![rat(-1, 1), rat(0, 1)],
        };
        assert!(matches!(solve(&p), LpOutcome::Unbounded));
    }

    #[test]
    fn degenerate_cycling_guard() {
        // Beale's cycling example; Bland's rule must terminate at −1/20.
        let p = LpProblem {
            a: vec![
                vec![rat(1, 4), rat(-60, 1), rat(-1, 25), rat(9, 1), rat(1, 1), rat(0, 1), rat(0, 1)],
                vec![rat(1, 2), rat(-90, 1), rat(-1, 50), rat(3, 1), rat(0, 1), rat(1, 1), rat(0, 1)],
                vec![rat(0, 1), rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)],
            ],
            b: vec![rat(0, 1), rat(0, 1), rat(1, 1)],
            c: vec![rat(-3, 4), rat(150, 1), rat(-1, 50), rat(6, 1), rat(0, 1), rat(0, 1), rat(0, 1)],
        };
        match solve(&p) {
            LpOutcome::Optimal { objective, .. } => assert_eq!(objective, rat(-1, 20)),
            other => panic!("{other:?}"),
        }
    }
}
