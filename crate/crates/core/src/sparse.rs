//! Symmetric sparse matrices in CSR form and a Jacobi-preconditioned
//! conjugate gradient solver.
//!
//! CG doubles as the positive-definiteness probe: a nonpositive curvature
//! `p' A p <= 0` encountered during iteration is reported as a hard error
//! rather than silently regularized.

use crate::error::{Error, Result};
use crate::real::Real;

/// Builder accumulating (row, col, value) with duplicate summing.
#[derive(Debug, Clone)]
pub struct CooBuilder<T> {
    n: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> CooBuilder<T> {
    pub fn new(n: usize) -> Self {
        CooBuilder { n, entries: Vec::new() }
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.n && j < self.n);
        if v != T::zero() {
            self.entries.push((i, j, v));
        }
    }

    pub fn build(mut self) -> CsrMatrix<T> {
        self.entries.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        let mut it = self.entries.into_iter().peekable();
        for row in 0..self.n {
            while let Some(&(i, j, v)) = it.peek() {
                if i != row {
                    break;
                }
                it.next();
                if let (Some(&last_col), Some(last_val)) = (cols.last(), vals.last_mut()) {
                    if cols.len() > row_ptr[row] && last_col == j {
                        *last_val += v;
                        continue;
                    }
                }
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n: self.n, row_ptr, cols, vals }
    }
}

/// Compressed sparse rows; symmetry is by construction of the assembly.
#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.n);
        for row in 0..self.n {
            let mut acc = T::zero();
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[row] = acc;
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.n];
        for row in 0..self.n {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                if self.cols[k] == row {
                    d[row] = self.vals[k];
                }
            }
        }
        d
    }

    /// Worst relative asymmetry over the stored pattern.
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        let mut scale = T::zero();
        for row in 0..self.n {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                let col = self.cols[k];
                if col < row {
                    continue;
                }
                let v = self.vals[k];
                let vt = self.get(col, row);
                worst = worst.max((v - vt).abs());
                scale = scale.max(v.abs());
            }
        }
        if scale > T::zero() { worst / scale } else { T::zero() }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.cols[k] == j {
                return self.vals[k];
            }
        }
        T::zero()
    }
}

/// Outcome of a converged CG solve.
#[derive(Debug, Clone)]
pub struct SolveStats<T> {
    pub iterations: usize,
    pub relative_residual: T,
}

/// Jacobi-preconditioned conjugate gradients.
///
/// `x` holds the initial guess on entry and the solution on exit.
pub fn pcg<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    x: &mut [T],
    tol: T,
    max_iter: usize,
) -> Result<SolveStats<T>> {
    let n = a.n;
    debug_assert_eq!(b.len(), n);
    let diag = a.diagonal();
    let precond = |r: &[T], z: &mut [T]| {
        for i in 0..n {
            z[i] = if diag[i] != T::zero() { r[i] / diag[i] } else { r[i] };
        }
    };

    let b_norm = norm2(b);
    if b_norm == T::zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return Ok(SolveStats { iterations: 0, relative_residual: T::zero() });
    }

    let mut r = vec![T::zero(); n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z = vec![T::zero(); n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];

    for it in 0..max_iter {
        let res = norm2(&r) / b_norm;
        if res <= tol {
            return Ok(SolveStats { iterations: it, relative_residual: res });
        }
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            return Err(Error::NotSpd {
                detail: format!("nonpositive curvature {pap:e} at iteration {it}"),
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = norm2(&r) / b_norm;
    if res <= tol {
        Ok(SolveStats { iterations: max_iter, relative_residual: res })
    } else {
        Err(Error::NoConvergence {
            iters: max_iter,
            tol: tol.to_f64_lossy(),
            residual: res.to_f64_lossy(),
        })
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn laplacian_1d(n: usize) -> CsrMatrix<f64> {
        let mut b = CooBuilder::new(n);
        for i in 0..n {
            b.add(i, i, 2.0);
            if i > 0 {
                b.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                b.add(i, i + 1, -1.0);
            }
        }
        b.build()
    }

    #[test]
    fn duplicate_entries_are_summed() {
        let mut b = CooBuilder::new(2);
        b.add(0, 0, 1.0);
        b.add(0, 0, 2.5);
        b.add(1, 0, -1.0);
        b.add(1, 1, 4.0);
        b.add(0, 1, -1.0);
        let m = b.build();
        assert_eq!(m.get(0, 0), 3.5);
        assert_eq!(m.symmetry_defect(), 0.0);
    }

    #[test]
    fn cg_solves_the_discrete_laplacian() {
        let n = 200;
        let a = laplacian_1d(n);
        let mut rng = StdRng::seed_from_u64(1);
        let xtrue: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = a.apply(&xtrue);
        let mut x = vec![0.0; n];
        let stats = pcg(&a, &b, &mut x, 1e-12, 10_000).unwrap();
        assert!(stats.relative_residual <= 1e-12);
        for i in 0..n {
            assert!((x[i] - xtrue[i]).abs() < 1e-7);
        }
    }

    #[test]
    fn indefinite_matrix_is_reported() {
        let mut b = CooBuilder::new(2);
        b.add(0, 0, 1.0);
        b.add(1, 1, -1.0);
        let a = b.build();
        let rhs = vec![0.0, 1.0];
        let mut x = vec![0.0; 2];
        assert!(matches!(
            pcg(&a, &rhs, &mut x, 1e-10, 100),
            Err(Error::NotSpd { .. })
        ));
    }
}
