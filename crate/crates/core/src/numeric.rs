//! Small dense numeric helpers.

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
/// Good enough for the small Gram matrices the rank test produces.
pub fn symmetric_eigenvalues(mat: &[Vec<f64>]) -> Vec<f64> {
    let n = mat.len();
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    for sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 || sweep > 60 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Singular values of an m×n matrix via the eigenvalues of the smaller Gram
/// matrix, sorted descending.
pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = rows.len();
    let n = rows[0].len();
    let k = m.min(n);
    let mut gram = vec![vec![0.0; k]; k];
    if n <= m {
        // AᵀA
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for row in rows {
                    s += row[i] * row[j];
                }
                gram[i][j] = s;
                gram[j][i] = s;
            }
        }
    } else {
        // AAᵀ
        for i in 0..m {
            for j in i..m {
                let mut s = 0.0;
                for t in 0..n {
                    s += rows[i][t] * rows[j][t];
                }
                gram[i][j] = s;
                gram[j][i] = s;
            }
        }
    }
    let mut vals: Vec<f64> = symmetric_eigenvalues(&gram)
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

/// Numerical rank with a relative threshold on singular values.
pub fn numerical_rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    let sv = singular_values(rows);
    match sv.first() {
        None => 0,
        Some(&top) if top == 0.0 => 0,
        Some(&top) => sv.iter().filter(|&&s| s > top * rel_tol).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_diag_plus_rotation() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let mut ev = symmetric_eigenvalues(&m);
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rank_of_outer_products() {
        // Two independent rows plus their sum: rank 2.
        let rows = vec![
            vec![1.0, 0.0, 2.0, -1.0],
            vec![0.0, 1.0, 1.0, 3.0],
            vec![1.0, 1.0, 3.0, 2.0],
        ];
        assert_eq!(numerical_rank(&rows, 1e-9), 2);
        let sv = singular_values(&rows);
        assert_eq!(sv.len(), 3);
        assert!(sv[2] < sv[0] * 1e-12);
    }
}
