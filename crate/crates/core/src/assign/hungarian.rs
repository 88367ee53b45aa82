use ndarray::ArrayView2;

use super::AssignError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    /// `permutation[row] = column`
    pub permutation: Vec<usize>,
    /// `Σ matrix[row, permutation[row]]` on the input matrix
    pub value: f64,
}

/// Optimal square assignment (Kuhn–Munkres with row potentials and shortest
/// augmenting paths), `O(n³)`.
pub fn hungarian(matrix: ArrayView2<f64>, objective: Objective) -> Result<Assignment, AssignError> {
    let (n, m) = matrix.dim();
    if n != m {
        return Err(AssignError::NotSquare { rows: n, cols: m });
    }
    if let Some(((i, j), _)) = matrix.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(AssignError::NonFinite(i, j));
    }
    let sign = match objective {
        Objective::Minimize => 1.0,
        Objective::Maximize => -1.0,
    };
    let cost = |i: usize, j: usize| sign * matrix[[i, j]];

    // 1-based internally; index 0 is the virtual root column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut min_to = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut permutation = vec![0; n];
    for j in 1..=n {
        permutation[row_of[j] - 1] = j - 1;
    }
    let value = permutation
        .iter()
        .enumerate()
        .map(|(i, &j)| matrix[[i, j]])
        .sum();
    Ok(Assignment { permutation, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    fn brute_force(m: &Array2<f64>, maximize: bool) -> f64 {
        fn rec(m: &Array2<f64>, row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64, max: bool) {
            let n = m.nrows();
            if row == n {
                if (max && acc > *best) || (!max && acc < *best) {
                    *best = acc;
                }
                return;
            }
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    rec(m, row + 1, used, acc + m[[row, j]], best, max);
                    used[j] = false;
                }
            }
        }
        let mut best = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
        rec(m, 0, &mut vec![false; m.nrows()], 0.0, &mut best, maximize);
        best
    }

    #[test]
    fn identity_maximize() {
        let m = Array2::<f64>::eye(5);
        let a = hungarian(m.view(), Objective::Maximize).unwrap();
        assert_eq!(a.permutation, vec![0, 1, 2, 3, 4]);
        assert_eq!(a.value, 5.0);
    }

    #[test]
    fn swap() {
        let m = array![[0.0, 1.0], [1.0, 0.0]];
        let a = hungarian(m.view(), Objective::Maximize).unwrap();
        assert_eq!(a.permutation, vec![1, 0]);
        assert_eq!(a.value, 2.0);
        let b = hungarian(m.view(), Objective::Minimize).unwrap();
        assert_eq!(b.permutation, vec![0, 1]);
    }

    #[test]
    fn empty_matrix() {
        let m = Array2::<f64>::zeros((0, 0));
        let a = hungarian(m.view(), Objective::Maximize).unwrap();
        assert!(a.permutation.is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        let m = Array2::<f64>::zeros((2, 3));
        assert!(matches!(
            hungarian(m.view(), Objective::Maximize),
            Err(AssignError::NotSquare { .. })
        ));
        let mut m = Array2::<f64>::zeros((2, 2));
        m[[0, 1]] = f64::INFINITY;
        assert_eq!(
            hungarian(m.view(), Objective::Minimize),
            Err(AssignError::NonFinite(0, 1))
        );
    }

    proptest! {
        #[test]
        fn matches_exhaustive_search(
            n in 1usize..=6,
            seed in proptest::collection::vec(-10.0f64..10.0, 36),
        ) {
            let m = Array2::from_shape_fn((n, n), |(i, j)| seed[i * 6 + j]);
            for (objective, max) in [(Objective::Maximize, true), (Objective::Minimize, false)] {
                let a = hungarian(m.view(), objective).unwrap();
                let mut seen = a.permutation.clone();
                seen.sort_unstable();
                prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
                prop_assert!((a.value - brute_force(&m, max)).abs() < 1e-9);
            }
        }

        #[test]
        fn maximize_is_minimize_of_complement(
            seed in proptest::collection::vec(0.0f64..1.0, 25),
        ) {
            let m = Array2::from_shape_vec((5, 5), seed).unwrap();
            let top = m.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let flipped = m.mapv(|x| top - x);
            let a = hungarian(m.view(), Objective::Maximize).unwrap();
            let b = hungarian(flipped.view(), Objective::Minimize).unwrap();
            let value_b: f64 = b.permutation.iter().enumerate().map(|(i, &j)| m[[i, j]]).sum();
            prop_assert!((a.value - value_b).abs() < 1e-9);
        }
    }
}
