//! Dense exact linear algebra over the rationals.
//!
//! The matrices appearing in the engine are small (at most the dimension of
//! the Lie superalgebra per graded slot), so straightforward fraction-free
//! Gaussian elimination on `BigRational` entries is both exact and fast
//! enough.

use crate::Rat;
use num::Zero;

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::from_integer(1.into());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Reduced row echelon form together with the pivot column of each row.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].recip();
            for j in col..m.cols {
                let v = m[(row, j)].clone() * &inv;
                m[(row, j)] = v;
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    for j in col..m.cols {
                        let v = m[(r, j)].clone() - factor.clone() * &m[(row, j)];
                        m[(r, j)] = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let (r, pivots) = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::from_integer(1.into());
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `self * x = b`; returns `None` when the system is inconsistent.
    /// For underdetermined systems an arbitrary particular solution is
    /// produced (free variables set to zero).
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the augmented column
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Determinant by Bareiss-style elimination on a working copy.
    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det = Rat::from_integer(1.into());
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                return Rat::zero();
            };
            if p != col {
                m.swap_rows(col, p);
                det = -det;
            }
            det *= m[(col, col)].clone();
            let inv = m[(col, col)].recip();
            for r in col + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone() * &inv;
                for j in col..m.cols {
                    let v = m[(r, j)].clone() - factor.clone() * &m[(col, j)];
                    m[(r, j)] = v;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Precomputed solver for repeated systems `B c = v` with a fixed `B`.
#[derive(Debug, Clone)]
pub struct LinearSolver {
    transform: QMatrix,
    pivots: Vec<usize>,
    rows: usize,
    cols: usize,
}

impl LinearSolver {
    /// Row-reduces `[B | I]` once; later solves are a single matrix-vector
    /// product.
    pub fn new(b: &QMatrix) -> Self {
        let mut aug = QMatrix::zeros(b.rows, b.cols + b.rows);
        for i in 0..b.rows {
            for j in 0..b.cols {
                aug[(i, j)] = b[(i, j)].clone();
            }
            aug[(i, b.cols + i)] = Rat::from_integer(1.into());
        }
        let (r, all_pivots) = aug.rref();
        let pivots: Vec<usize> = all_pivots.iter().copied().filter(|&c| c < b.cols).collect();
        let mut transform = QMatrix::zeros(b.rows, b.rows);
        for i in 0..b.rows {
            for j in 0..b.rows {
                transform[(i, j)] = r[(i, b.cols + j)].clone();
            }
        }
        LinearSolver {
            transform,
            pivots,
            rows: b.rows,
            cols: b.cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Returns `None` when `v` is outside the column span.
    pub fn solve(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(v.len(), self.rows);
        let mut w = vec![Rat::zero(); self.rows];
        for (i, wi) in w.iter_mut().enumerate() {
            for j in 0..self.rows {
                if !self.transform[(i, j)].is_zero() && !v[j].is_zero() {
                    *wi += self.transform[(i, j)].clone() * &v[j];
                }
            }
        }
        for (i, wi) in w.iter().enumerate() {
            if i >= self.pivots.len() && !wi.is_zero() {
                return None;
            }
        }
        let mut c = vec![Rat::zero(); self.cols];
        for (row, &col) in self.pivots.iter().enumerate() {
            c[col] = w[row].clone();
        }
        Some(c)
    }
}

/// Express `target` in the span of `vectors`, if possible.
pub fn coordinates_in_span(vectors: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    if vectors.is_empty() {
        return target.iter().all(Rat::is_zero).then(Vec::new);
    }
    let dim = target.len();
    let mut m = QMatrix::zeros(dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        assert_eq!(v.len(), dim);
        for i in 0..dim {
            m[(i, j)] = v[i].clone();
        }
    }
    // `solve` returns any particular solution; the span test also needs
    // consistency, which `solve` reports via `None`.
    m.solve(target)
}
