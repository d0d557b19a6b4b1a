//! Dense square complex matrices.
//!
//! Sizes in this crate stay small (ambient dimensions up to a few hundred
//! for Choi matrices), so everything is row-major `Vec<C64>` with
//! straightforward loops. Spectra are computed with a Householder
//! reduction to real tridiagonal form followed by implicit QL.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension {
                context: "matrix entries",
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| r(x)).collect())
    }

    /// `|i><j|`
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = ONE;
        m
    }

    /// Projector onto the normalized vector `v`.
    pub fn projector(v: &[C64]) -> Self {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj() / norm_sq)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(r(s))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    fn check_same_dim(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                context,
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// Matrix product. Panics on dimension mismatch; use [`Self::try_mul`]
    /// for a checked version.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "matrix product")?;
        Ok(self.matmul(other))
    }

    /// `self * other * self^†`
    pub fn conjugate(&self, other: &Self) -> Self {
        self.matmul(other).matmul(&self.adjoint())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Hilbert–Schmidt inner product `tr(self^† other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "comparison dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let (mut diag, mut off) = tridiagonalize(&self.hermitian_part());
        tridiagonal_ql(&mut diag, &mut off);
        diag.sort_by(f64::total_cmp);
        diag
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Hermitian within `tol` and minimum eigenvalue at least `-tol * dim`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol * self.dim.max(1) as f64
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.matmul(self).approx_eq(self, tol)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        self.matmul(&self.adjoint())
            .max_abs_diff(&Self::identity(self.dim))
            .max(
                self.adjoint()
                    .matmul(self)
                    .max_abs_diff(&Self::identity(self.dim)),
            )
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        let gram = self.adjoint().matmul(self);
        let top = gram.hermitian_eigenvalues().last().copied().unwrap_or(0.0);
        libm::sqrt(top.max(0.0))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (m, n) = (self.dim, other.dim);
        Self::from_fn(m * n, |i, j| self[(i / n, j / n)] * other[(i % n, j % n)])
    }

    /// Trace over the first tensor factor of a `dim_a * dim_b` matrix.
    pub fn partial_trace_first(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a * dim_b != self.dim {
            return Err(Error::Dimension {
                context: "partial trace",
                expected: dim_a * dim_b,
                found: self.dim,
            });
        }
        Ok(Self::from_fn(dim_b, |i, j| {
            (0..dim_a)
                .map(|k| self[(k * dim_b + i, k * dim_b + j)])
                .sum()
        }))
    }

    /// Trace over the second tensor factor of a `dim_a * dim_b` matrix.
    pub fn partial_trace_second(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a * dim_b != self.dim {
            return Err(Error::Dimension {
                context: "partial trace",
                expected: dim_a * dim_b,
                found: self.dim,
            });
        }
        Ok(Self::from_fn(dim_a, |i, j| {
            (0..dim_b)
                .map(|k| self[(i * dim_b + k, j * dim_b + k)])
                .sum()
        }))
    }

    /// Density-matrix test: PSD and unit trace within `tol`.
    pub fn check_state(&self, tol: f64) -> Result<()> {
        if !self.is_hermitian(tol) {
            return Err(Error::NotAState("not Hermitian"));
        }
        if (self.trace() - ONE).norm() > tol * self.dim.max(1) as f64 {
            return Err(Error::NotAState("trace differs from one"));
        }
        if self.min_eigenvalue() < -tol * self.dim.max(1) as f64 {
            return Err(Error::NotAState("negative eigenvalue"));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl ComplexMatrix {
    /// `self += s * other`
    pub fn add_scaled(&mut self, s: C64, other: &ComplexMatrix) {
        assert_eq!(self.dim, other.dim, "matrix sum dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }
}

/// Linear combination `Σ coeffs[i] * mats[i]` of same-sized matrices.
pub fn linear_combination(dim: usize, coeffs: &[C64], mats: &[ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim);
    for (&a, m) in coeffs.iter().zip(mats) {
        if a != ZERO {
            out.add_scaled(a, m);
        }
    }
    out
}

/// Pauli and qubit helpers used throughout tests and fixtures.
pub mod qubit {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::new(2, alloc::vec![ZERO, -I, I, ZERO]).expect("2x2")
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
    }

    pub fn h() -> ComplexMatrix {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(2, &[s, s, s, -s]).expect("2x2")
    }

    /// `|0><0|`
    pub fn ket0() -> ComplexMatrix {
        ComplexMatrix::unit(2, 0, 0)
    }

    /// `|1><1|`
    pub fn ket1() -> ComplexMatrix {
        ComplexMatrix::unit(2, 1, 1)
    }
}

/// Householder reduction of a Hermitian matrix to real symmetric
/// tridiagonal form. Returns the diagonal and the (moduli of the)
/// subdiagonal; a diagonal unitary similarity removes the phases.
fn tridiagonalize(h: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = h.dim();
    let mut a = h.clone();
    let mut off = vec![0.0; n.saturating_sub(1)];
    for k in 0..n.saturating_sub(2) {
        let norm_x = libm::sqrt((k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>());
        let x0 = a[(k + 1, k)];
        if norm_x <= f64::MIN_POSITIVE {
            off[k] = 0.0;
            continue;
        }
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * norm_x;
        let mut v = vec![ZERO; n];
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let v_norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if v_norm <= f64::MIN_POSITIVE {
            off[k] = x0.norm();
            continue;
        }
        for z in v.iter_mut() {
            *z /= v_norm;
        }
        // p = A v, kappa = v^† p, w = p - kappa v, A <- A - 2 v w^† - 2 w v^†
        let mut p = vec![ZERO; n];
        for i in 0..n {
            let mut s = ZERO;
            for j in k + 1..n {
                s += a[(i, j)] * v[j];
            }
            p[i] = s;
        }
        let kappa: C64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
        for i in 0..n {
            for j in 0..n {
                let delta = v[i] * w[j].conj() + w[i] * v[j].conj();
                if delta != ZERO {
                    a[(i, j)] -= delta * 2.0;
                }
            }
        }
        off[k] = a[(k + 1, k)].norm();
    }
    if n >= 2 {
        off[n - 2] = a[(n - 1, n - 2)].norm();
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    (diag, off)
}

/// Eigenvalues of a real symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts. `diag` is overwritten with the eigenvalues.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) {
    let n = diag.len();
    if n < 2 {
        return;
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let d = diag;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut rr = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + rr.copysign(g));
            let (mut s, mut cc, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = cc * e[i];
                rr = libm::hypot(f, g);
                e[i + 1] = rr;
                if rr == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / rr;
                cc = g / rr;
                g = d[i + 1] - p;
                rr = (d[i] - g) * s + 2.0 * cc * b;
                p = s * rr;
                d[i + 1] = g + p;
                g = cc * rr - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
