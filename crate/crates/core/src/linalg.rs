//! Dense complex matrices sized for few-qubit problems, plus the spectral
//! routines the rest of the crate is built on: a cyclic Jacobi eigensolver
//! for Hermitian matrices, singular values, Schatten norms, commutators,
//! matrix exponential steps and Haar-random unitaries.
//!
//! Dimensions stay small (tensor products of a handful of qubits or qutrits),
//! so everything is O(n^3) dense code with no blocking or pivoting tricks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tolerances;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting NaN or infinite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: rows * cols,
                right: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, z) in diag.iter().enumerate() {
            m.set(i, i, *z);
        }
        m
    }

    /// Stacks column vectors into a matrix; all columns must share a length.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        assert!(!columns.is_empty(), "need at least one column");
        let rows = columns[0].len();
        Self::from_fn(rows, columns.len(), |r, c| {
            assert_eq!(columns[c].len(), rows, "ragged columns");
            columns[c][r]
        })
    }

    /// Rank-1 outer product `u v^dag`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: Complex64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.get(r, c).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// `(A + A^dag) / 2`, used to wash out roundoff asymmetry after
    /// conjugations that are Hermitian in exact arithmetic.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian part of a non-square matrix");
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * 0.5
        })
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..rhs.cols {
                    let cur = out.get(r, c);
                    out.set(r, c, cur + a * rhs.get(k, c));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length must match columns");
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `A = A^dag`.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self.get(r, c) - self.get(c, r).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        self.require_square()?;
        if self
            .data
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFiniteEntry);
        }
        let defect = self.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        Ok(())
    }

    /// Largest entrywise deviation of `A^dag A` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.adjoint().matmul(self);
        gram.sub(&Self::identity(gram.rows)).max_abs_entry()
    }

    /// Kronecker product with the left factor owning the slow index, so the
    /// composite basis index is `a * rhs.rows + b`.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            self.get(r / rhs.rows, c / rhs.cols) * rhs.get(r % rhs.rows, c % rhs.cols)
        })
    }
}

/// `tr(AB)` without forming the product matrix.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    assert_eq!(a.cols, b.rows, "inner dimensions must agree");
    assert_eq!(a.rows, b.cols, "product must be square");
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.rows {
        for j in 0..a.cols {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc
}

/// Conjugate-linear in the first argument: `sum conj(u_i) v_i`.
pub fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Schatten norm order: a finite exponent or the operator norm limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormOrder {
    Finite(f64),
    Infinity,
}

impl NormOrder {
    /// Holder conjugate: 1 pairs with infinity, 2 with itself, p with p/(p-1).
    pub fn conjugate(self) -> Self {
        match self {
            NormOrder::Infinity => NormOrder::Finite(1.0),
            NormOrder::Finite(p) if p == 1.0 => NormOrder::Infinity,
            NormOrder::Finite(p) => NormOrder::Finite(p / (p - 1.0)),
        }
    }
}

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Full eigensystem of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Each sweep annihilates every off-diagonal entry once with a complex
/// rotation that absorbs the entry's phase, which keeps the working matrix
/// Hermitian with a real diagonal throughout. Input Hermiticity is checked
/// against `hermiticity_tol` and the defect is symmetrized away before
/// iterating.
pub fn hermitian_eigensystem(a: &ComplexMatrix, hermiticity_tol: f64) -> Result<EigenSystem> {
    a.require_hermitian(hermiticity_tol)?;
    let n = a.rows();
    let mut work = a.hermitian_part();
    let mut vecs = ComplexMatrix::identity(n);
    let scale = work.frobenius_norm().max(1.0);
    let threshold = tolerances::JACOBI_OFF_DIAGONAL * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for r in 0..n {
            for c in (r + 1)..n {
                off += work.get(r, c).norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = work.get(p, q);
                let magnitude = apq.norm();
                if magnitude <= f64::MIN_POSITIVE {
                    continue;
                }
                // Rotation angle from the real symmetric reduction of the
                // (p, q) block, phase chosen so the rotated entry vanishes.
                let phase = apq / magnitude;
                let tau = (work.get(q, q).re - work.get(p, p).re) / (2.0 * magnitude);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (tau * tau + 1.0).sqrt())
                } else {
                    -1.0 / (-tau + (tau * tau + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let s_phase = phase * s;

                let app = work.get(p, p).re;
                let aqq = work.get(q, q).re;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let rp = work.get(r, p);
                    let rq = work.get(r, q);
                    let new_rp = rp * c - rq * s_phase.conj();
                    let new_rq = rp * s_phase + rq * c;
                    work.set(r, p, new_rp);
                    work.set(r, q, new_rq);
                    work.set(p, r, new_rp.conj());
                    work.set(q, r, new_rq.conj());
                }
                let shift = 2.0 * s * c * magnitude;
                work.set(p, p, Complex64::new(app * c * c + aqq * s * s - shift, 0.0));
                work.set(q, q, Complex64::new(app * s * s + aqq * c * c + shift, 0.0));
                work.set(p, q, Complex64::new(0.0, 0.0));
                work.set(q, p, Complex64::new(0.0, 0.0));

                for r in 0..n {
                    let vp = vecs.get(r, p);
                    let vq = vecs.get(r, q);
                    vecs.set(r, p, vp * c - vq * s_phase.conj());
                    vecs.set(r, q, vp * s_phase + vq * c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        work.get(j, j)
            .re
            .partial_cmp(&work.get(i, i).re)
            .expect("eigenvalues are finite")
    });
    let eigenvalues = order.iter().map(|&i| work.get(i, i).re).collect();
    let columns: Vec<Vec<Complex64>> = order.iter().map(|&i| vecs.column(i)).collect();
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(&columns),
    })
}

/// Singular values in descending order, computed from the eigensystem of
/// `A^dag A` with tiny negative roundoff clipped to zero.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.data
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NonFiniteEntry);
    }
    // Hermitian and anti-Hermitian matrices get their singular values straight
    // from an eigendecomposition. Forming A^dag A squares the condition number
    // and costs roughly half the digits on the smallest singular values, which
    // matters when trace norms of commutators feed tight bound comparisons.
    if a.is_square() {
        let structural = 1e-12 * a.max_abs_entry().max(1.0);
        let hermitianized = if a.hermiticity_defect() <= structural {
            Some(a.clone())
        } else {
            let rotated = a.scale(Complex64::i());
            if rotated.hermiticity_defect() <= structural {
                Some(rotated)
            } else {
                None
            }
        };
        if let Some(h) = hermitianized {
            let eig = hermitian_eigensystem(&h, structural)?;
            let mut sv: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
            sv.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
            return Ok(sv);
        }
    }
    let gram = a.adjoint().matmul(a);
    let eig = hermitian_eigensystem(&gram, 1e-8 * gram.frobenius_norm().max(1.0))?;
    let count = a.rows().min(a.cols());
    Ok(eig
        .eigenvalues
        .iter()
        .take(count)
        .map(|&lambda| lambda.max(0.0).sqrt())
        .collect())
}

/// Schatten p-norm of a matrix: the l^p norm of its singular values.
pub fn schatten_norm(a: &ComplexMatrix, order: NormOrder) -> Result<f64> {
    let sv = singular_values(a)?;
    match order {
        NormOrder::Infinity => Ok(sv.first().copied().unwrap_or(0.0)),
        NormOrder::Finite(p) => {
            if p < 1.0 || !p.is_finite() {
                return Err(Error::InvalidNormOrder(p));
            }
            if p == 1.0 {
                Ok(sv.iter().sum())
            } else {
                Ok(sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
            }
        }
    }
}

/// `AB - BA` for square matrices of equal dimension.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let da = a.require_square()?;
    let db = b.require_square()?;
    if da != db {
        return Err(Error::DimensionMismatch {
            expected: da,
            got: db,
        });
    }
    Ok(a.matmul(b).sub(&b.matmul(a)))
}

/// `exp(-i H dt)` through the eigensystem of the Hermitian generator `H`.
pub fn unitary_step(h: &ComplexMatrix, dt: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigensystem(h, tolerances::HERMITICITY)?;
    let n = h.rows();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for c in 0..n {
        let factor = Complex64::from_polar(1.0, -eig.eigenvalues[c] * dt);
        for r in 0..n {
            scaled.set(r, c, v.get(r, c) * factor);
        }
    }
    Ok(scaled.matmul(&v.adjoint()))
}

/// Matrix of independent standard complex Gaussian entries.
pub(crate) fn random_complex_gaussian(
    rows: usize,
    cols: usize,
    rng: &mut impl Rng,
) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// Random Hermitian matrix with Gaussian entries, `(G + G^dag) / 2`.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    random_complex_gaussian(dim, dim, rng).hermitian_part()
}

/// Haar-distributed random unitary from the QR factorization of a complex
/// Gaussian matrix. Orthonormalization is modified Gram-Schmidt run twice;
/// since that convention leaves the triangular factor with a positive real
/// diagonal, no extra phase correction is needed for Haar uniformity.
pub fn haar_random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    loop {
        let g = random_complex_gaussian(dim, dim, rng);
        let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        let mut degenerate = false;
        for j in 0..dim {
            let mut v = g.column(j);
            for _pass in 0..2 {
                for q in columns.iter() {
                    let overlap = dot(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= overlap * qi;
                    }
                }
            }
            let norm = vector_norm(&v);
            if norm < 1e-12 {
                degenerate = true;
                break;
            }
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            columns.push(v);
        }
        if !degenerate {
            return ComplexMatrix::from_columns(&columns);
        }
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .expect("static entries")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .expect("static entries")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ],
    )
    .expect("static entries")
}
