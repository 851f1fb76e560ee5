//! Smith normal form over the integers with unimodular transforms.

use serde::{Deserialize, Serialize};

/// Dense integer matrix, row major. Dimensions are explicit so that
/// `0 x k` and `k x 0` matrices keep their shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<i64>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![vec![0; cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = 1;
        }
        m
    }

    /// `None` if a row has the wrong length.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Vec<i64>>) -> Option<Self> {
        (data.len() == rows && data.iter().all(|r| r.len() == cols)).then_some(Self { rows, cols, data })
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i][j]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += a * other.data[k][j];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols, "vector length");
        self.data.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn neg(&self) -> IntMatrix {
        let data = self.data.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|&x| x == 0))
    }
}

/// `U * A * V = D` with `D` diagonal, `d_i | d_{i+1}`, `d_i >= 0`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub diag: Vec<i128>,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
    pub rows: usize,
    pub cols: usize,
}

impl Snf {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|&&d| d != 0).count()
    }
}

fn swap_rows(m: &mut [Vec<i128>], a: usize, b: usize) {
    m.swap(a, b);
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// row_a += k * row_b
fn add_row(m: &mut [Vec<i128>], a: usize, b: usize, k: i128) {
    let rb = m[b].clone();
    for (x, y) in m[a].iter_mut().zip(rb) {
        *x += k * y;
    }
}

/// col_a += k * col_b
fn add_col(m: &mut [Vec<i128>], a: usize, b: usize, k: i128) {
    for row in m.iter_mut() {
        row[a] += k * row[b];
    }
}

/// Pivot rule: smallest absolute value, ties to lowest row, then column.
fn find_pivot(a: &[Vec<i128>], t: usize, cols: usize) -> Option<(usize, usize)> {
    let mut best: Option<(i128, usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, &x) in row.iter().enumerate().take(cols).skip(t) {
            if x != 0 && best.is_none_or(|(b, _, _)| x.abs() < b) {
                best = Some((x.abs(), i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

pub fn smith(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<i128>> = m.data.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..rows).map(|i| (0..rows).map(|j| i128::from(i == j)).collect()).collect();
    let mut v: Vec<Vec<i128>> = (0..cols).map(|i| (0..cols).map(|j| i128::from(i == j)).collect()).collect();

    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = find_pivot(&a, t, cols) else { break };
        swap_rows(&mut a, t, pi);
        swap_rows(&mut u, t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    add_row(&mut a, i, t, -q);
                    add_row(&mut u, i, t, -q);
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    add_col(&mut a, j, t, -q);
                    add_col(&mut v, j, t, -q);
                }
                dirty |= a[t][j] != 0;
            }
            if dirty {
                // a remainder is now smaller than the pivot
                let (pi, pj) = find_pivot_cross(&a, t, rows, cols);
                swap_rows(&mut a, t, pi);
                swap_rows(&mut u, t, pi);
                swap_cols(&mut a, t, pj);
                swap_cols(&mut v, t, pj);
                continue;
            }
            // divisibility of the remaining block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    add_row(&mut a, t, i, 1);
                    add_row(&mut u, t, i, 1);
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    let diag = (0..rows.min(cols)).map(|i| a[i][i]).collect();
    Snf { diag, u, v, rows, cols }
}

/// Smallest nonzero entry in row `t` or column `t` at or after the diagonal.
fn find_pivot_cross(a: &[Vec<i128>], t: usize, rows: usize, cols: usize) -> (usize, usize) {
    let mut best = (a[t][t].abs(), t, t);
    for (i, row) in a.iter().enumerate().take(rows).skip(t + 1) {
        if row[t] != 0 && row[t].abs() < best.0 {
            best = (row[t].abs(), i, t);
        }
    }
    for j in t + 1..cols {
        let x = a[t][j];
        if x != 0 && x.abs() < best.0 {
            best = (x.abs(), t, j);
        }
    }
    (best.1, best.2)
}

/// Invariant factors of the abelian group `Z^rows / (column span of m)`,
/// including zeros for free summands, in divisibility order.
pub fn cokernel_factors(m: &IntMatrix) -> Vec<i128> {
    let s = smith(m);
    let mut out: Vec<i128> = s.diag.iter().copied().filter(|&d| d != 0).collect();
    out.extend(std::iter::repeat_n(0, m.rows - s.rank()));
    out
}

/// An integer solution of `m x = b`, if one exists.
pub fn solve(m: &IntMatrix, b: &[i64]) -> Option<Vec<i128>> {
    assert_eq!(b.len(), m.rows, "right-hand side length");
    let s = smith(m);
    let ub: Vec<i128> = s.u.iter().map(|row| row.iter().zip(b).map(|(x, &y)| x * i128::from(y)).sum()).collect();
    let mut y = vec![0i128; m.cols];
    for i in 0..m.rows {
        let d = s.diag.get(i).copied().unwrap_or(0);
        if d == 0 {
            if ub[i] != 0 {
                return None;
            }
        } else {
            if ub[i] % d != 0 {
                return None;
            }
            y[i] = ub[i] / d;
        }
    }
    Some(s.v.iter().map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: usize, cols: usize, data: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows(rows, cols, data).unwrap()
    }

    fn to_i128(m: &IntMatrix) -> Vec<Vec<i128>> {
        m.data.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect()
    }

    fn mul128(a: &[Vec<i128>], b: &[Vec<i128>], inner: usize, cols: usize) -> Vec<Vec<i128>> {
        a.iter()
            .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
            .collect()
    }

    #[test]
    fn small_examples() {
        assert_eq!(cokernel_factors(&mat(1, 1, vec![vec![2]])), vec![2]);
        assert_eq!(cokernel_factors(&mat(1, 2, vec![vec![1, -1]])), vec![1]);
        assert_eq!(cokernel_factors(&mat(2, 2, vec![vec![2, 0], vec![0, 3]])), vec![1, 6]);
        assert_eq!(cokernel_factors(&mat(2, 0, vec![vec![], vec![]])), vec![0, 0]);
        assert_eq!(cokernel_factors(&mat(2, 1, vec![vec![4], vec![6]])), vec![2, 0]);
    }

    #[test]
    fn solve_examples() {
        let m = mat(2, 2, vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(solve(&m, &[4, 9]), Some(vec![2, 3]));
        assert_eq!(solve(&m, &[1, 0]), None);
    }

    proptest! {
        #[test]
        fn transforms_diagonalize(rows in 1usize..5, cols in 1usize..5, seed in prop::collection::vec(-5i64..=5, 16)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 4 + j]).collect()).collect();
            let m = mat(rows, cols, data);
            let s = smith(&m);
            let d = mul128(&mul128(&s.u, &to_i128(&m), rows, cols), &s.v, cols, cols);
            for i in 0..rows {
                for j in 0..cols {
                    let want = if i == j { s.diag[i] } else { 0 };
                    prop_assert_eq!(d[i][j], want);
                }
            }
            let nz: Vec<i128> = s.diag.iter().copied().filter(|&x| x != 0).collect();
            for w in nz.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            prop_assert!(s.diag.iter().all(|&x| x >= 0));
            // zero diagonal entries sit after the nonzero ones
            let first_zero = s.diag.iter().position(|&x| x == 0).unwrap_or(s.diag.len());
            prop_assert!(s.diag[first_zero..].iter().all(|&x| x == 0));
        }

        #[test]
        fn solve_roundtrip(x in prop::collection::vec(-4i64..=4, 3), seed in prop::collection::vec(-5i64..=5, 9)) {
            let m = mat(3, 3, (0..3).map(|i| seed[i * 3..i * 3 + 3].to_vec()).collect());
            let b = m.apply(&x);
            let sol = solve(&m, &b).expect("b is in the image");
            let sol64: Vec<i64> = sol.iter().map(|&v| v as i64).collect();
            prop_assert_eq!(m.apply(&sol64), b);
        }
    }
}
