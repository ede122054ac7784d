//! Small exact integer linear algebra: Hermite-style column reduction for
//! solving `A x = b` over the integers, and row HNF bases for canonical
//! residues modulo a lattice.
//!
//! Everything here works on dense `i64` data with `i128` intermediates;
//! the matrices involved are tiny (dozens of rows and columns).

fn to128(v: &[i64]) -> Vec<i128> {
    v.iter().map(|&x| x as i128).collect()
}

fn narrow(v: Vec<i128>) -> Option<Vec<i64>> {
    v.into_iter().map(|x| i64::try_from(x).ok()).collect()
}

/// Solve `A x = b` over the integers, `A` given by rows.  Returns one
/// solution if any exists.
pub fn solve_integer(a_rows: &[Vec<i64>], b: &[i64]) -> Option<Vec<i64>> {
    let rows = a_rows.len();
    if rows == 0 {
        return Some(Vec::new());
    }
    let cols = a_rows[0].len();
    let mut a: Vec<Vec<i128>> = a_rows.iter().map(|r| to128(r)).collect();
    let mut u: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();
    // column reduction: for each row in turn, clear it to a single pivot
    let mut col_ptr = 0usize;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for row in 0..rows {
        if col_ptr >= cols {
            break;
        }
        loop {
            let mut jmin = None;
            for j in col_ptr..cols {
                if a[row][j] != 0 {
                    jmin = match jmin {
                        None => Some(j),
                        Some(k) if a[row][j].abs() < a[row][k].abs() => Some(j),
                        keep => keep,
                    };
                }
            }
            let Some(jm) = jmin else { break };
            let mut others = false;
            for j in col_ptr..cols {
                if j != jm && a[row][j] != 0 {
                    others = true;
                    let q = a[row][j] / a[row][jm];
                    for r in 0..rows {
                        let sub = q * a[r][jm];
                        a[r][j] -= sub;
                    }
                    for r in 0..cols {
                        let sub = q * u[r][jm];
                        u[r][j] -= sub;
                    }
                }
            }
            if !others {
                // single nonzero: move into position
                for r in 0..rows {
                    a[r].swap(col_ptr, jm);
                }
                for r in 0..cols {
                    u[r].swap(col_ptr, jm);
                }
                if a[row][col_ptr] < 0 {
                    for r in 0..rows {
                        a[r][col_ptr] = -a[r][col_ptr];
                    }
                    for r in 0..cols {
                        u[r][col_ptr] = -u[r][col_ptr];
                    }
                }
                pivots.push((row, col_ptr));
                col_ptr += 1;
                break;
            }
        }
    }
    // forward solve H y = b
    let mut y = vec![0i128; cols];
    let mut rem: Vec<i128> = to128(b);
    let mut piv_iter = pivots.iter().peekable();
    for row in 0..rows {
        if let Some(&&(prow, pcol)) = piv_iter.peek() {
            if prow == row {
                let h = a[row][pcol];
                if rem[row] % h != 0 {
                    return None;
                }
                let yk = rem[row] / h;
                y[pcol] = yk;
                for r in 0..rows {
                    rem[r] -= yk * a[r][pcol];
                }
                piv_iter.next();
                continue;
            }
        }
        if rem[row] != 0 {
            return None;
        }
    }
    if rem.iter().any(|&x| x != 0) {
        return None;
    }
    // x = U y
    let x: Vec<i128> = (0..cols)
        .map(|r| (0..cols).map(|k| u[r][k] * y[k]).sum())
        .collect();
    narrow(x)
}

/// Row-style Hermite normal form of the lattice spanned by `rows`:
/// echelon basis with positive pivots and the entries above each pivot
/// reduced into `[0, pivot)`.
pub fn row_hnf(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .map(|r| to128(r))
        .collect();
    let mut basis: Vec<Vec<i128>> = Vec::new();
    let mut pivot_cols: Vec<usize> = Vec::new();
    for col in 0..cols {
        loop {
            let mut imin = None;
            for (i, r) in m.iter().enumerate() {
                if r[col] != 0 {
                    imin = match imin {
                        None => Some(i),
                        Some(k) if m[i][col].abs() < m[k][col].abs() => Some(i),
                        keep => keep,
                    };
                    let _ = i;
                }
            }
            let Some(im) = imin else { break };
            let mut others = false;
            let pivot_row = m[im].clone();
            for (i, r) in m.iter_mut().enumerate() {
                if i != im && r[col] != 0 {
                    others = true;
                    let q = r[col] / pivot_row[col];
                    for (x, p) in r.iter_mut().zip(&pivot_row) {
                        *x -= q * p;
                    }
                }
            }
            if !others {
                let mut row = m.remove(im);
                if row[col] < 0 {
                    for x in row.iter_mut() {
                        *x = -*x;
                    }
                }
                basis.push(row);
                pivot_cols.push(col);
                break;
            }
        }
        m.retain(|r| r.iter().any(|&x| x != 0));
    }
    // reduce entries above each pivot
    for k in (0..basis.len()).rev() {
        let col = pivot_cols[k];
        let pivot = basis[k][col];
        for i in 0..k {
            let q = basis[i][col].div_euclid(pivot);
            if q != 0 {
                for j in 0..cols {
                    let sub = q * basis[k][j];
                    basis[i][j] -= sub;
                }
            }
        }
    }
    basis
        .into_iter()
        .map(|r| narrow(r).expect("hnf entries fit in i64"))
        .collect()
}

/// Canonical residue of `v` modulo the lattice with row-HNF basis `hnf`.
pub fn reduce_mod_rows(v: &[i64], hnf: &[Vec<i64>]) -> Vec<i64> {
    let mut out = to128(v);
    for row in hnf {
        let col = row.iter().position(|&x| x != 0).expect("nonzero basis row");
        let pivot = row[col] as i128;
        let q = out[col].div_euclid(pivot);
        if q != 0 {
            for (x, &p) in out.iter_mut().zip(row) {
                *x -= q * p as i128;
            }
        }
    }
    narrow(out).expect("residue fits in i64")
}

/// Membership of `v` in the lattice with row-HNF basis `hnf`.
pub fn in_lattice(v: &[i64], hnf: &[Vec<i64>]) -> bool {
    reduce_mod_rows(v, hnf).iter().all(|&x| x == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_simple() {
        // x + 2y = 5, 3y = 3
        let a = vec![vec![1, 2], vec![0, 3]];
        let x = solve_integer(&a, &[5, 3]).unwrap();
        assert_eq!(x, vec![3, 1]);
        // no integer solution
        assert!(solve_integer(&a, &[5, 2]).is_none());
    }

    #[test]
    fn solve_underdetermined() {
        let a = vec![vec![2, 3]];
        let x = solve_integer(&a, &[1]).unwrap();
        assert_eq!(2 * x[0] + 3 * x[1], 1);
        let a = vec![vec![2, 4]];
        assert!(solve_integer(&a, &[3]).is_none());
    }

    #[test]
    fn solve_overdetermined() {
        let a = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
        assert_eq!(solve_integer(&a, &[2, 3, 5]).unwrap(), vec![2, 3]);
        assert!(solve_integer(&a, &[2, 3, 4]).is_none());
    }

    #[test]
    fn hnf_residues() {
        // lattice spanned by (2,0) and (0,2) in Z^2
        let hnf = row_hnf(&[vec![2, 0], vec![0, 2], vec![2, 2]]);
        assert_eq!(hnf.len(), 2);
        assert!(in_lattice(&[4, -2], &hnf));
        assert!(!in_lattice(&[1, 0], &hnf));
        assert_eq!(reduce_mod_rows(&[5, 4], &hnf), vec![1, 0]);
        // residues are canonical for cosets
        assert_eq!(reduce_mod_rows(&[5, 4], &hnf), reduce_mod_rows(&[-1, 2], &hnf));
    }

    #[test]
    fn hnf_rank_deficient() {
        let hnf = row_hnf(&[vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(hnf.len(), 1);
        assert!(in_lattice(&[3, 6, 9], &hnf));
        assert!(!in_lattice(&[1, 2, 4], &hnf));
    }
}
