//! Exact phase-one simplex over rationals for small equality systems.
//!
//! Finds some `x >= 0` with `Ax = b`, or reports infeasibility. Bland's
//! rule keeps the pivoting cycle-free, and all arithmetic is rational, so
//! the answer is a certificate rather than an approximation. The systems
//! solved here (garbling feasibility) have a handful of rows, so a dense
//! tableau is plenty.

use crate::rational::Rational;

/// Returns a nonnegative solution of `Ax = b`, or `None` when infeasible.
pub(crate) fn feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    assert_eq!(m, b.len(), "row count mismatch");
    if m == 0 {
        return Some(Vec::new());
    }
    let n = a[0].len();

    // Tableau over n structural + m artificial columns, rhs kept separate.
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), n, "ragged constraint matrix");
        let flip = b[i].is_negative();
        let mut t: Vec<Rational> = row
            .iter()
            .map(|v| if flip { -v } else { v.clone() })
            .collect();
        t.extend((0..m).map(|j| {
            if j == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
        rows.push(t);
        rhs.push(if flip { -&b[i] } else { b[i].clone() });
    }

    // Reduced costs for minimizing the sum of artificials, with the
    // artificial basis already priced out.
    let mut cost: Vec<Rational> = (0..n + m)
        .map(|j| {
            let direct = if j >= n { Rational::one() } else { Rational::zero() };
            let priced: Rational = rows.iter().map(|row| &row[j]).sum();
            direct - priced
        })
        .collect();
    let mut objective: Rational = -rhs.iter().sum::<Rational>();
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Bland: smallest improving column.
    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        // Ratio test, ties broken by smallest basic variable.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if rows[i][enter] > Rational::zero() {
                let ratio = &rhs[i] / &rows[i][enter];
                let better = match &best {
                    None => true,
                    Some(cur) => {
                        ratio < *cur || (ratio == *cur && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let leave = leave.expect("phase-one objective is bounded below");

        // Pivot on (leave, enter).
        let pivot = rows[leave][enter].clone();
        for v in rows[leave].iter_mut() {
            *v = &*v / &pivot;
        }
        rhs[leave] = &rhs[leave] / &pivot;
        let pivot_row = rows[leave].clone();
        let pivot_rhs = rhs[leave].clone();
        for i in 0..m {
            if i != leave && !rows[i][enter].is_zero() {
                let factor = rows[i][enter].clone();
                for (cell, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *cell = &*cell - &factor * p;
                }
                rhs[i] = &rhs[i] - &factor * &pivot_rhs;
            }
        }
        if !cost[enter].is_zero() {
            let factor = cost[enter].clone();
            for (cell, p) in cost.iter_mut().zip(&pivot_row) {
                *cell = &*cell - &factor * p;
            }
            objective = &objective - &factor * &pivot_rhs;
        }
        basis[leave] = enter;
    }

    // Optimal artificial mass is -objective.
    if !objective.is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = rhs[i].clone();
        }
        // An artificial stuck in the basis at value zero marks a redundant
        // row and contributes nothing to x.
    }
    Some(x)
}
