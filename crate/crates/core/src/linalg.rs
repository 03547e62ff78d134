//! Small dense linear algebra kernels: LU solves, null spaces, ranks, and a
//! Jacobi eigensolver for symmetric matrices. Systems in this crate stay in
//! the hundreds of unknowns, so direct dense methods are the right tool.

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DMat {
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<f64>,
}

impl DMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DMat {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows == 0 { 0 } else { rows[0].len() };
        let mut m = DMat::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for i in 0..self.nrows {
            let mut acc = 0.0;
            for j in 0..self.ncols {
                acc += self[(i, j)] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn matmul(&self, other: &DMat) -> DMat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = DMat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.ncols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DMat {
        let mut out = DMat::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        if self.nrows != self.ncols {
            return Err(Error::DimensionMismatch("lu of non-square matrix".into()));
        }
        let n = self.nrows;
        let mut a = self.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let scale = self.max_abs().max(1e-300);
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in (k + 1)..n {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= 1e-14 * scale {
                return Err(Error::SingularSystem(format!(
                    "pivot {best:.3e} at column {k} below tolerance"
                )));
            }
            if p != k {
                piv.swap(k, p);
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
            }
            let d = a[(k, k)];
            for i in (k + 1)..n {
                let m = a[(i, k)] / d;
                a[(i, k)] = m;
                for j in (k + 1)..n {
                    a[(i, j)] -= m * a[(k, j)];
                }
            }
        }
        Ok(Lu { lu: a, piv })
    }

    /// Rank via Gaussian elimination with partial pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        let scale = a.max_abs().max(1e-300);
        let mut rank = 0;
        let mut row = 0;
        for col in 0..a.ncols {
            if row >= a.nrows {
                break;
            }
            let mut p = row;
            let mut best = a[(row, col)].abs();
            for i in (row + 1)..a.nrows {
                let v = a[(i, col)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tol * scale {
                continue;
            }
            if p != row {
                for j in 0..a.ncols {
                    let tmp = a[(row, j)];
                    a[(row, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
            }
            let d = a[(row, col)];
            for i in (row + 1)..a.nrows {
                let m = a[(i, col)] / d;
                if m != 0.0 {
                    for j in col..a.ncols {
                        a[(i, j)] -= m * a[(row, j)];
                    }
                }
            }
            rank += 1;
            row += 1;
        }
        rank
    }

    /// Orthonormal basis of the null space {x : Ax = 0}, computed by Gaussian
    /// elimination to reduced row echelon form followed by Gram-Schmidt.
    /// Basis vectors are sign-fixed (first nonzero entry positive) so the
    /// output is deterministic.
    pub fn null_space(&self, tol: f64) -> Vec<Vec<f64>> {
        let mut a = self.clone();
        let scale = a.max_abs().max(1e-300);
        let n = a.ncols;
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row >= a.nrows {
                break;
            }
            let mut p = row;
            let mut best = a[(row, col)].abs();
            for i in (row + 1)..a.nrows {
                let v = a[(i, col)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tol * scale {
                continue;
            }
            if p != row {
                for j in 0..n {
                    let tmp = a[(row, j)];
                    a[(row, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
            }
            let d = a[(row, col)];
            for j in 0..n {
                a[(row, j)] /= d;
            }
            for i in 0..a.nrows {
                if i != row {
                    let m = a[(i, col)];
                    if m != 0.0 {
                        for j in 0..n {
                            a[(i, j)] -= m * a[(row, j)];
                        }
                    }
                }
            }
            pivot_cols.push(col);
            row += 1;
        }
        let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free_cols {
            let mut v = vec![0.0; n];
            v[fc] = 1.0;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[(r, fc)];
            }
            basis.push(v);
        }
        orthonormalize_sign_fixed(basis)
    }

    pub fn row_slice(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }
}

impl std::ops::Index<(usize, usize)> for DMat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.ncols + j]
    }
}

/// Cached LU factors for repeated solves with the same matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: DMat,
    piv: Vec<usize>,
}

impl Lu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.nrows;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }
}

/// Gram-Schmidt with deterministic sign fixing (first entry above the noise
/// floor is made positive). Vectors that vanish after projection are dropped.
pub fn orthonormalize_sign_fixed(vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in vectors {
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            let inv = 1.0 / norm;
            for x in v.iter_mut() {
                *x *= inv;
            }
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-9) {
                if *first < 0.0 {
                    for x in v.iter_mut() {
                        *x = -*x;
                    }
                }
            }
            basis.push(v);
        }
    }
    basis
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(m: &DMat, max_sweeps: usize) -> Vec<f64> {
    assert_eq!(m.nrows, m.ncols, "jacobi needs a square matrix");
    let n = m.nrows;
    let mut a = m.clone();
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= 1e-14 * a.max_abs().max(1e-300) * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Spectral-radius estimate by power iteration on A^T A (returns the largest
/// singular value, an upper bound for the spectral radius).
pub fn spectral_radius_estimate(a: &DMat, iters: usize, seed: u64) -> f64 {
    let n = a.ncols;
    if n == 0 {
        return 0.0;
    }
    let mut rng = crate::rng::Rng::new(seed);
    let mut v = rng.vec_signed(n);
    let mut sigma = 0.0;
    for _ in 0..iters {
        let av = a.matvec(&v);
        let atav = a.transpose().matvec(&av);
        let norm = atav.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        sigma = norm.sqrt();
        for (vi, wi) in v.iter_mut().zip(&atav) {
            *vi = wi / norm;
        }
    }
    sigma
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let a = DMat::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let lu = a.lu().unwrap();
        let x = lu.solve(&[5.0, 10.0]);
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lu_rejects_singular() {
        let a = DMat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(a.lu().is_err());
    }

    #[test]
    fn null_space_of_ones_row() {
        let a = DMat::from_rows(&[vec![1.0, 1.0, 1.0]]);
        let ns = a.null_space(1e-10);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot(v, &[1.0, 1.0, 1.0]).abs() < 1e-10);
        }
        // orthonormal
        assert!((norm(&ns[0]) - 1.0).abs() < 1e-12);
        assert!(dot(&ns[0], &ns[1]).abs() < 1e-12);
    }

    #[test]
    fn rank_detects_deficiency() {
        let a = DMat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![0.0, 1.0]]);
        assert_eq!(a.rank(1e-10), 2);
    }

    #[test]
    fn jacobi_finds_known_eigenvalues() {
        let a = DMat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let e = jacobi_eigenvalues(&a, 30);
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_bounds_rotation() {
        let a = DMat::from_rows(&[vec![0.0, 2.0], vec![-2.0, 0.0]]);
        let s = spectral_radius_estimate(&a, 50, 3);
        assert!((s - 2.0).abs() < 1e-8);
    }
}
