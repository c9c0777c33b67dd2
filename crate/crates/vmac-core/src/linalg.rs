//! Dense complex Hermitian linear algebra: Cholesky factorization,
//! log-determinants, inverses, and rank-one accumulation.
//!
//! All log-determinants are returned in nats; rate-facing callers divide by
//! `ln 2` to get bits.

use num_complex::Complex64;
use std::fmt;

pub type C64 = Complex64;

/// Pivot acceptance threshold is scale-invariant: a pivot passes when it
/// exceeds `PIVOT_RTOL * trace / n`.
const PIVOT_RTOL: f64 = 1e-14;

/// Relative tolerance for conjugate-symmetry validation of user-supplied
/// entries.
const HERMITIAN_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    /// Entry (row, col) is not the conjugate of its mirror, or a diagonal
    /// entry has a non-negligible imaginary part.
    NotHermitian { row: usize, col: usize },
    /// Cholesky pivot at this index was not acceptably positive.
    NotPositiveDefinite { pivot: usize },
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NotHermitian { row, col } => {
                write!(f, "matrix is not Hermitian at entry ({row}, {col})")
            }
            LinalgError::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot} failed)")
            }
            LinalgError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
        }
    }
}

impl std::error::Error for LinalgError {}

/// Dense Hermitian matrix, stored row-major with both triangles kept in
/// exact conjugate agreement.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<C64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, validating conjugate symmetry
    /// to within `1e-12` relative magnitude and that the diagonal is real.
    /// Stored entries are exactly symmetrized.
    pub fn from_entries(n: usize, entries: Vec<C64>) -> Result<Self, LinalgError> {
        if entries.len() != n * n {
            return Err(LinalgError::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        let mut m = Self { n, data: entries };
        for i in 0..n {
            let d = m.data[i * n + i];
            if d.im.abs() > HERMITIAN_RTOL * (1.0 + d.re.abs()) {
                return Err(LinalgError::NotHermitian { row: i, col: i });
            }
            m.data[i * n + i] = C64::new(d.re, 0.0);
            for j in (i + 1)..n {
                let a = m.data[i * n + j];
                let b = m.data[j * n + i];
                let scale = a.norm().max(b.norm());
                if (a - b.conj()).norm() > HERMITIAN_RTOL * scale {
                    return Err(LinalgError::NotHermitian { row: i, col: j });
                }
                let avg = (a + b.conj()) * 0.5;
                m.data[i * n + j] = avg;
                m.data[j * n + i] = avg.conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    /// Sets (i, j) and mirrors (j, i) with the conjugate.
    pub fn set_sym(&mut self, i: usize, j: usize, v: C64) {
        if i == j {
            self.data[i * self.n + i] = C64::new(v.re, 0.0);
        } else {
            self.data[i * self.n + j] = v;
            self.data[j * self.n + i] = v.conj();
        }
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Column `j` as an owned vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self.data[i * self.n + j]).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }

    /// self += w * v v^H
    pub fn add_scaled_outer(&mut self, v: &[C64], w: f64) -> Result<(), LinalgError> {
        if v.len() != self.n {
            return Err(LinalgError::DimensionMismatch { expected: self.n, found: v.len() });
        }
        for i in 0..self.n {
            for j in 0..self.n {
                self.data[i * self.n + j] += v[i] * v[j].conj() * w;
            }
        }
        for i in 0..self.n {
            let d = self.data[i * self.n + i];
            self.data[i * self.n + i] = C64::new(d.re, 0.0);
        }
        Ok(())
    }

    pub fn add_real_diag(&mut self, diag: &[f64]) {
        debug_assert_eq!(diag.len(), self.n);
        for (i, &d) in diag.iter().enumerate() {
            self.data[i * self.n + i] += C64::new(d, 0.0);
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    /// Congruence with a real diagonal: returns diag(s) * self * diag(s).
    pub fn diag_congruence(&self, s: &[f64]) -> HermitianMatrix {
        debug_assert_eq!(s.len(), self.n);
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.data[i * self.n + j] *= s[i] * s[j];
            }
        }
        out
    }

    /// Cholesky factorization with diagonal equilibration: the matrix is
    /// symmetrically scaled to unit diagonal before factoring, so the pivot
    /// tolerance stays meaningful when diagonal entries span many decades
    /// (combined noise levels in a cluster routinely do).
    pub fn cholesky(&self) -> Result<CholeskyFactor, LinalgError> {
        let n = self.n;
        let mut scale = vec![0.0; n];
        let mut log_scale = 0.0;
        for j in 0..n {
            let d = self.data[j * n + j].re;
            if !(d > 0.0) || !d.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { pivot: j });
            }
            scale[j] = d.sqrt();
            log_scale += d.ln();
        }
        // equilibrated matrix has unit trace/n, so the scale-invariant
        // acceptance rule reduces to a fixed relative threshold
        let threshold = PIVOT_RTOL;
        let mut l = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = 1.0;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > threshold) || !d.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { pivot: j });
            }
            let ljj = d.sqrt();
            l[j * n + j] = C64::new(ljj, 0.0);
            for i in (j + 1)..n {
                let mut s = self.data[i * n + j] / (scale[i] * scale[j]);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(CholeskyFactor { n, l, scale, log_scale })
    }

    /// Natural-log determinant of a positive definite matrix.
    pub fn logdet(&self) -> Result<f64, LinalgError> {
        Ok(self.cholesky()?.logdet())
    }

    pub fn inverse(&self) -> Result<HermitianMatrix, LinalgError> {
        Ok(self.cholesky()?.inverse())
    }
}

/// Lower-triangular Cholesky factor of the diagonally equilibrated matrix:
/// M = S (L L^H) S with S the diagonal square-root scaling.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<C64>,
    scale: Vec<f64>,
    log_scale: f64,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn logdet(&self) -> f64 {
        let mut acc = self.log_scale;
        for j in 0..self.n {
            acc += 2.0 * self.l[j * self.n + j].re.ln();
        }
        acc
    }

    /// Solves M x = b in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        // forward: L y = S^{-1} b
        for i in 0..n {
            let mut s = b[i] / self.scale[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i].re;
        }
        // backward: L^H z = y, then x = S^{-1} z
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i].conj() * b[k];
            }
            b[i] = s / self.l[i * n + i].re;
        }
        for i in 0..n {
            b[i] /= self.scale[i];
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// v^H M^{-1} v computed as the squared norm of the forward solve;
    /// always real and nonnegative.
    pub fn quadratic_form(&self, v: &[C64]) -> f64 {
        let n = self.n;
        debug_assert_eq!(v.len(), n);
        let mut y = vec![C64::new(0.0, 0.0); n];
        let mut acc = 0.0;
        for i in 0..n {
            let mut s = v[i] / self.scale[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            let yi = s / self.l[i * n + i].re;
            acc += yi.norm_sqr();
            y[i] = yi;
        }
        acc
    }

    pub fn inverse(&self) -> HermitianMatrix {
        let n = self.n;
        let mut out = HermitianMatrix::zeros(n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            for (k, v) in col.iter_mut().enumerate() {
                *v = if k == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            }
            self.solve_in_place(&mut col);
            for i in 0..n {
                out.data[i * n + j] = col[i];
            }
        }
        // exact re-symmetrization against roundoff
        for i in 0..n {
            out.data[i * n + i] = C64::new(out.data[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let avg = (out.data[i * n + j] + out.data[j * n + i].conj()) * 0.5;
                out.data[i * n + j] = avg;
                out.data[j * n + i] = avg.conj();
            }
        }
        out
    }
}

/// Builds the weighted sum of outer products `sum_j w_j v_j v_j^H`.
///
/// An empty list yields the 0x0 zero matrix.
pub fn rank_one_accumulate(
    vectors: &[Vec<C64>],
    weights: &[f64],
) -> Result<HermitianMatrix, LinalgError> {
    if vectors.len() != weights.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: vectors.len(),
            found: weights.len(),
        });
    }
    let Some(first) = vectors.first() else {
        return Ok(HermitianMatrix::zeros(0));
    };
    let n = first.len();
    let mut m = HermitianMatrix::zeros(n);
    for (v, &w) in vectors.iter().zip(weights) {
        debug_assert!(w >= 0.0, "rank-one weights must be nonnegative");
        if v.len() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, found: v.len() });
        }
        m.add_scaled_outer(v, w)?;
    }
    Ok(m)
}
