//! Deterministic probes for sampled checks: seeded random matrices and
//! positive elements of an operator subspace.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::config::Config;
use crate::linalg::{c, r, ComplexMatrix, C64, I};
use crate::subspace::{null_space, MatrixSubspace};

/// Seeded generator producing Gaussian complex entries.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits in [0, 1)
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }

    pub fn complex(&mut self) -> C64 {
        c(self.normal(), self.normal())
    }

    pub fn matrix(&mut self, dim: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(dim, |_, _| self.complex())
    }

    pub fn hermitian(&mut self, dim: usize) -> ComplexMatrix {
        self.matrix(dim).hermitian_part()
    }

    /// Random full-rank density matrix `G G^† / tr(G G^†)`.
    pub fn state(&mut self, dim: usize) -> ComplexMatrix {
        let g = self.matrix(dim);
        let p = g.matmul(&g.adjoint());
        let t = p.trace().re;
        p.scale_real(1.0 / t)
    }

    /// Random element of `space`.
    pub fn element(&mut self, space: &MatrixSubspace) -> ComplexMatrix {
        let coords: Vec<C64> = (0..space.dim()).map(|_| self.complex()).collect();
        space.from_coordinates(&coords)
    }
}

/// Orthonormal basis of the real space of Hermitian matrices in `space`.
pub fn hermitian_basis(space: &MatrixSubspace, tol: f64) -> Vec<ComplexMatrix> {
    let d = space.ambient_dim();
    if space.is_full() {
        let mut out = Vec::with_capacity(d * d);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        for i in 0..d {
            out.push(ComplexMatrix::unit(d, i, i));
        }
        for i in 0..d {
            for j in i + 1..d {
                let u = ComplexMatrix::unit(d, i, j);
                let v = ComplexMatrix::unit(d, j, i);
                out.push((&u + &v).scale_real(s));
                out.push((&u - &v).scale(c(0.0, s)));
            }
        }
        return out;
    }
    // A = Σ (x_k + i y_k) b_k is Hermitian iff
    // Σ x_k (b_k - b_k^†) + y_k i (b_k + b_k^†) = 0, a real linear system.
    let k = space.dim();
    let anti: Vec<ComplexMatrix> = space.basis().iter().map(|b| b - &b.adjoint()).collect();
    let sym: Vec<ComplexMatrix> = space
        .basis()
        .iter()
        .map(|b| (b + &b.adjoint()).scale(I))
        .collect();
    let mut rows = Vec::with_capacity(2 * d * d);
    for idx in 0..d * d {
        let entry = |m: &ComplexMatrix| m.as_slice()[idx];
        let re: Vec<C64> = anti
            .iter()
            .map(|m| r(entry(m).re))
            .chain(sym.iter().map(|m| r(entry(m).re)))
            .collect();
        let im: Vec<C64> = anti
            .iter()
            .map(|m| r(entry(m).im))
            .chain(sym.iter().map(|m| r(entry(m).im)))
            .collect();
        rows.push(re);
        rows.push(im);
    }
    let kernel = null_space(&rows, 2 * k, tol).expect("rows have 2k columns");
    let hermitian: Vec<ComplexMatrix> = kernel
        .iter()
        .map(|v| {
            let coords: Vec<C64> = (0..k).map(|i| c(v[i].re, v[k + i].re)).collect();
            space.from_coordinates(&coords).hermitian_part()
        })
        .collect();
    MatrixSubspace::span(d, &hermitian, tol)
        .expect("dimensions agree")
        .basis()
        .iter()
        .map(ComplexMatrix::hermitian_part)
        .collect()
}

/// Unit-trace positive elements of `space` (which must contain the
/// identity). Each probe is `H - λ_min(H) I` for a Hermitian direction
/// `H` in the space, normalized to trace one: the fixed directions are
/// `±h_i` and `(h_i ± h_j)/√2` over the Hermitian basis, then
/// `cfg.samples` seeded Gaussian combinations.
pub fn psd_probes(space: &MatrixSubspace, cfg: &Config) -> Vec<ComplexMatrix> {
    const PAIR_CAP: usize = 12;
    let d = space.ambient_dim();
    let herm = hermitian_basis(space, cfg.tolerance);
    let mut directions = Vec::new();
    for h in &herm {
        directions.push(h.clone());
        directions.push(h.scale_real(-1.0));
    }
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let capped = herm.len().min(PAIR_CAP);
    for i in 0..capped {
        for j in i + 1..capped {
            directions.push((&herm[i] + &herm[j]).scale_real(s));
            directions.push((&herm[i] - &herm[j]).scale_real(s));
        }
    }
    let mut sampler = Sampler::new(cfg.seed);
    for _ in 0..cfg.samples {
        let mut m = ComplexMatrix::zeros(d);
        for h in &herm {
            m.add_scaled(r(sampler.normal()), h);
        }
        directions.push(m);
    }
    let mut probes = vec![ComplexMatrix::identity(d).scale_real(1.0 / d as f64)];
    for h in directions {
        let shifted = &h - &ComplexMatrix::identity(d).scale_real(h.min_eigenvalue());
        let t = shifted.trace().re;
        if t > cfg.tolerance {
            probes.push(shifted.scale_real(1.0 / t));
        }
    }
    probes
}
