//! Dense complex linear algebra on small matrices.
//!
//! Everything here is deterministic and sized for operators on Hilbert
//! spaces of dimension d ≤ 8 (so at most 64×64 after vectorization).
//! Matrices are stored row-major; vectorization is column-stacking,
//! which the superoperator code depends on.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute/relative tolerance pair. Structural checks compare against
/// `atol + rtol * (1 + norm)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { atol: 1e-10, rtol: 1e-10 }
    }
}

impl Tolerance {
    pub fn scaled(&self, norm: f64) -> f64 {
        self.atol + self.rtol * (1.0 + norm)
    }
}

/// Which tensor factor to trace out. `S` is always the first (slow) factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    S,
    A,
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "entry count {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: idx / cols, col: idx % cols });
            }
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.data[i * d + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Real matrix embedding.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Rank-one projector |v⟩⟨v| (v need not be normalized).
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    /// Matrix unit |i⟩⟨j| in dimension d.
    pub fn basis_unit(d: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(d, d);
        m.data[i * d + j] = C64::new(1.0, 0.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, z: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += aik * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.data[i * self.cols + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖M − M†‖_F, zero iff Hermitian.
    pub fn hermitian_residual(&self) -> f64 {
        assert!(self.is_square());
        self.sub(&self.adjoint()).frobenius_norm()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ⟨u| M |v⟩.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        let mv = self.mul_vec(v);
        u.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Kronecker product; the left factor indexes the first (slow) subsystem.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    })
}

/// Partial trace of an operator on a d_s·d_a dimensional space with the
/// first factor slow: index (s, a) = s·d_a + a.
pub fn partial_trace(
    m: &ComplexMatrix,
    d_s: usize,
    d_a: usize,
    traced: Subsystem,
) -> Result<ComplexMatrix> {
    let d = d_s * d_a;
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "partial_trace expects {d}x{d} input, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let out = match traced {
        Subsystem::A => ComplexMatrix::from_fn(d_s, d_s, |s1, s2| {
            (0..d_a).map(|a| m.get(s1 * d_a + a, s2 * d_a + a)).sum()
        }),
        Subsystem::S => ComplexMatrix::from_fn(d_a, d_a, |a1, a2| {
            (0..d_s).map(|s| m.get(s * d_a + a1, s * d_a + a2)).sum()
        }),
    };
    Ok(out)
}

/// Column-stacking vectorization: vec(M)[j·rows + i] = M[i][j].
pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            v.push(m.get(i, j));
        }
    }
    v
}

/// Inverse of [`vectorize`] for square d×d matrices.
pub fn devectorize(v: &[C64], d: usize) -> Result<ComplexMatrix> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} is not d^2 for d = {d}",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| v[j * d + i]))
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the same order as `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        (0..self.eigenvectors.rows()).map(|i| self.eigenvectors.get(i, k)).collect()
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// The input is symmetrized as (M + M†)/2 before iterating; inputs whose
/// Hermitian residual exceeds `1e-9·(1 + ‖M‖_F)` are rejected.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eig expects a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let norm = m.frobenius_norm();
    let residual = m.hermitian_residual();
    let herm_tol = 1e-9 * (1.0 + norm);
    if residual > herm_tol {
        return Err(Error::NotHermitian { residual, tol: herm_tol });
    }

    let d = m.rows();
    let mut a = m.add(&m.adjoint()).scale_re(0.5);
    let mut v = ComplexMatrix::identity(d);
    let target = f64::EPSILON * (1.0 + norm) * d as f64;

    for _sweep in 0..100 {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..d {
                for q in (p + 1)..d {
                    s += a.get(p, q).norm_sqr();
                }
            }
            (2.0 * s).sqrt()
        };
        if off <= target {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= 1e-18 * (1.0 + norm) {
                    continue;
                }
                // Unitary two-sided rotation U = D·G with D absorbing the
                // phase of a_pq and G a real Jacobi rotation.
                let phase = apq / r;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let theta = 0.5 * (2.0 * r).atan2(app - aqq);
                let c = C64::new(theta.cos(), 0.0);
                let s = C64::new(theta.sin(), 0.0);
                let sp = s * phase.conj(); // U[q][p] = s·e^{-iφ}
                let cp = c * phase.conj(); // U[q][q] = c·e^{-iφ}

                // A ← U† A U, columns first then rows.
                for k in 0..d {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp + sp * akq);
                    a.set(k, q, -s * akp + cp * akq);
                }
                for k in 0..d {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk + sp.conj() * aqk);
                    a.set(q, k, -s * apk + cp.conj() * aqk);
                }
                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp + sp * vkq);
                    v.set(k, q, -s * vkp + cp * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, d, |i, k| v.get(i, order[k]));
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}
