//! Linear subspaces of square matrices under the Hilbert–Schmidt inner
//! product `<A, B> = tr(A^† B)`, plus vector null spaces.
//!
//! Bases are always orthonormal and produced by modified Gram–Schmidt
//! (two passes) over the inputs in the order given, so the same inputs
//! always produce the same basis.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{linear_combination, ComplexMatrix, C64, ONE, ZERO};

/// Result of orthonormalizing a list of vectors.
#[derive(Debug, Clone)]
pub struct Orthonormalized {
    /// Orthonormal vectors spanning the inputs.
    pub basis: Vec<Vec<C64>>,
    /// `basis[k] = Σ_j transform[k][j] * inputs[j]`.
    pub transform: Vec<Vec<C64>>,
    /// Indices of inputs that contributed a new direction.
    pub pivots: Vec<usize>,
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    libm::sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

/// Modified Gram–Schmidt with re-orthogonalization. An input is dropped
/// when its residual norm is at most `tol * max(1, |input|)`.
pub fn orthonormalize(inputs: &[Vec<C64>], tol: f64) -> Orthonormalized {
    let count = inputs.len();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut transform: Vec<Vec<C64>> = Vec::new();
    let mut pivots = Vec::new();
    for (j, v) in inputs.iter().enumerate() {
        let mut res = v.clone();
        let mut coeff = vec![ZERO; count];
        coeff[j] = ONE;
        for _ in 0..2 {
            for (q, t) in basis.iter().zip(&transform) {
                let proj = inner(q, &res);
                if proj == ZERO {
                    continue;
                }
                for (x, y) in res.iter_mut().zip(q) {
                    *x -= proj * y;
                }
                for (x, y) in coeff.iter_mut().zip(t) {
                    *x -= proj * y;
                }
            }
        }
        let n = norm(&res);
        if n <= tol * norm(v).max(1.0) {
            continue;
        }
        let inv = 1.0 / n;
        basis.push(res.into_iter().map(|z| z * inv).collect());
        transform.push(coeff.into_iter().map(|z| z * inv).collect());
        pivots.push(j);
    }
    Orthonormalized {
        basis,
        transform,
        pivots,
    }
}

/// Orthonormal basis of `{x : row · x = 0 for every row}` in `C^ncols`.
///
/// The row space is orthonormalized first (conjugated rows, since the
/// kernel is the orthogonal complement of the conjugate row space), then
/// the standard basis is swept in order against it.
pub fn null_space(rows: &[Vec<C64>], ncols: usize, tol: f64) -> Result<Vec<Vec<C64>>> {
    for row in rows {
        if row.len() != ncols {
            return Err(Error::Dimension {
                context: "null space row length",
                expected: ncols,
                found: row.len(),
            });
        }
    }
    let conj_rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|row| row.iter().map(|z| z.conj()).collect())
        .collect();
    let row_space = orthonormalize(&conj_rows, tol).basis;
    let rank = row_space.len();
    let mut all = row_space;
    let mut kernel = Vec::new();
    for j in 0..ncols {
        if kernel.len() + rank == ncols {
            break;
        }
        let mut e = vec![ZERO; ncols];
        e[j] = ONE;
        for _ in 0..2 {
            for q in &all {
                let proj = inner(q, &e);
                if proj != ZERO {
                    for (x, y) in e.iter_mut().zip(q) {
                        *x -= proj * y;
                    }
                }
            }
        }
        let n = norm(&e);
        // Standard basis vectors have unit norm; anything this small is
        // already spanned up to rounding.
        if n <= 1e-6 {
            continue;
        }
        let q: Vec<C64> = e.into_iter().map(|z| z / n).collect();
        all.push(q.clone());
        kernel.push(q);
    }
    Ok(kernel)
}

/// An orthonormal basis for a subspace of `dim × dim` complex matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSubspace {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
}

impl MatrixSubspace {
    /// All `d × d` matrices, with the matrix units `|i><j|` (row-major) as basis.
    pub fn full(dim: usize) -> Self {
        let mut basis = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                basis.push(ComplexMatrix::unit(dim, i, j));
            }
        }
        Self {
            ambient_dim: dim,
            basis,
        }
    }

    /// Span of `gens`, orthonormalized in order.
    pub fn span(dim: usize, gens: &[ComplexMatrix], tol: f64) -> Result<Self> {
        Ok(Self::span_with_transform(dim, gens, tol)?.0)
    }

    /// Span of `gens` together with the coefficients expressing each new
    /// basis element in terms of `gens`.
    pub fn span_with_transform(
        dim: usize,
        gens: &[ComplexMatrix],
        tol: f64,
    ) -> Result<(Self, Vec<Vec<C64>>)> {
        for g in gens {
            if g.dim() != dim {
                return Err(Error::Dimension {
                    context: "subspace generator",
                    expected: dim,
                    found: g.dim(),
                });
            }
        }
        let vectors: Vec<Vec<C64>> = gens.iter().map(|g| g.as_slice().to_vec()).collect();
        let ortho = orthonormalize(&vectors, tol);
        let basis = ortho
            .basis
            .into_iter()
            .map(|v| ComplexMatrix::new(dim, v).expect("length preserved"))
            .collect();
        Ok((
            Self {
                ambient_dim: dim,
                basis,
            },
            ortho.transform,
        ))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim * self.ambient_dim
    }

    /// Coordinates `<b_i, m>` of the orthogonal projection of `m`.
    pub fn coordinates(&self, m: &ComplexMatrix) -> Vec<C64> {
        self.basis.iter().map(|b| b.hs_inner(m)).collect()
    }

    pub fn from_coordinates(&self, coords: &[C64]) -> ComplexMatrix {
        linear_combination(self.ambient_dim, coords, &self.basis)
    }

    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.from_coordinates(&self.coordinates(m))
    }

    /// Largest entrywise deviation of `m` from its projection.
    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        m.max_abs_diff(&self.project(m))
    }

    pub fn contains(&self, m: &ComplexMatrix, tol: f64) -> bool {
        m.dim() == self.ambient_dim && self.residual(m) <= tol * m.max_abs().max(1.0)
    }

    /// `{A^† : A in self}`
    pub fn adjoint_span(&self) -> Self {
        Self {
            ambient_dim: self.ambient_dim,
            basis: self.basis.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    /// True when every element of `other` lies in `self`.
    pub fn includes(&self, other: &Self, tol: f64) -> bool {
        self.ambient_dim == other.ambient_dim && other.basis.iter().all(|b| self.contains(b, tol))
    }

    pub fn same_span(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.includes(other, tol)
    }
}

/// Orthogonal projection of `m` onto `space`.
pub fn hs_project(m: &ComplexMatrix, space: &MatrixSubspace) -> Result<ComplexMatrix> {
    if m.dim() != space.ambient_dim() {
        return Err(Error::Dimension {
            context: "projection",
            expected: space.ambient_dim(),
            found: m.dim(),
        });
    }
    Ok(space.project(m))
}
