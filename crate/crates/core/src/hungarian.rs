//! Optimal one-to-one assignment (Hungarian method with potentials).

/// Assignment maximizing the total weight of a rectangular `weights` matrix.
///
/// Returns, for each row, the matched column. When there are more rows than
/// columns some rows stay unmatched.
pub fn maximize(weights: &[Vec<f64>]) -> Vec<Option<usize>> {
    let n = weights.len();
    let m = weights.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return vec![None; n];
    }
    let size = n.max(m);
    let cost = |i: usize, j: usize| -> f64 {
        if i < n && j < m {
            -weights[i][j]
        } else {
            0.0
        }
    };

    // 1-based potentials; p[j] is the row assigned to column j, 0 = none.
    let mut u = vec![0.0; size + 1];
    let mut v = vec![0.0; size + 1];
    let mut p = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for i in 1..=size {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=size {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut out = vec![None; n];
    for (j, &i) in p.iter().enumerate().take(size + 1).skip(1) {
        if i >= 1 && i <= n && j <= m {
            out[i - 1] = Some(j - 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn total(w: &[Vec<f64>], a: &[Option<usize>]) -> f64 {
        a.iter().enumerate().filter_map(|(i, j)| j.map(|j| w[i][j])).sum()
    }

    /// Best total over every injective row-to-column map, by recursion.
    fn brute(w: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
        if row == w.len() {
            return 0.0;
        }
        // leaving a row unmatched is allowed only when columns run out
        let mut best = if w.len() > w[0].len() {
            brute(w, row + 1, used)
        } else {
            f64::NEG_INFINITY
        };
        for j in 0..w[0].len() {
            if !used[j] {
                used[j] = true;
                best = best.max(w[row][j] + brute(w, row + 1, used));
                used[j] = false;
            }
        }
        best
    }

    #[test]
    fn picks_the_anti_diagonal() {
        let w = vec![vec![0.1, 0.9], vec![0.8, 0.2]];
        assert_eq!(maximize(&w), vec![Some(1), Some(0)]);
    }

    #[test]
    fn more_rows_than_columns() {
        let w = vec![vec![0.5], vec![0.9], vec![0.1]];
        assert_eq!(maximize(&w), vec![None, Some(0), None]);
    }

    proptest! {
        #[test]
        fn matches_brute_force(n in 1usize..6, m in 1usize..6, vals in proptest::collection::vec(0.0f64..1.0, 36)) {
            let w: Vec<Vec<f64>> = (0..n).map(|i| vals[i * 6..i * 6 + m].to_vec()).collect();
            let a = maximize(&w);
            let cols: Vec<usize> = a.iter().flatten().copied().collect();
            let mut dedup = cols.clone();
            dedup.sort_unstable();
            dedup.dedup();
            prop_assert_eq!(dedup.len(), cols.len());
            prop_assert_eq!(cols.len(), n.min(m));
            let best = brute(&w, 0, &mut vec![false; m]);
            prop_assert!((total(&w, &a) - best).abs() < 1e-9);
        }
    }
}
