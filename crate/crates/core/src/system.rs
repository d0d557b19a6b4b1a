//! Semi-quantum systems: action-closed operator subspaces containing the
//! identity, channels between them (in the Heisenberg picture), and
//! operational state classes.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::group::{Element, UnitaryRep};
use crate::linalg::{linear_combination, ComplexMatrix, C64, ZERO};
use crate::sampling::psd_probes;
use crate::subspace::{hs_project, null_space, MatrixSubspace};

#[derive(Debug, Clone, PartialEq)]
pub struct SemiQuantumSystem {
    rep: Arc<UnitaryRep>,
    space: MatrixSubspace,
    is_full_algebra: bool,
    is_vn_algebra: bool,
    is_invariant: bool,
    saturated: bool,
}

impl SemiQuantumSystem {
    /// `B(H)` with the matrix units as basis.
    pub fn full(rep: Arc<UnitaryRep>, cfg: &Config) -> Self {
        let space = MatrixSubspace::full(rep.dim());
        let is_invariant = action_is_trivial(&rep, &space, cfg.tolerance);
        Self {
            rep,
            space,
            is_full_algebra: true,
            is_vn_algebra: true,
            is_invariant,
            saturated: false,
        }
    }

    /// Span of `gens`, the identity and every translate `g.a`.
    ///
    /// Saturating under the action means construction cannot fail on
    /// action-closedness; [`Self::saturation_added`] records whether the
    /// translates enlarged the span.
    pub fn from_generators(
        rep: Arc<UnitaryRep>,
        gens: &[ComplexMatrix],
        cfg: &Config,
    ) -> Result<Self> {
        let d = rep.dim();
        let mut seeds = Vec::with_capacity(gens.len() + 1);
        seeds.push(ComplexMatrix::identity(d));
        for g in gens {
            if g.dim() != d {
                return Err(Error::Dimension {
                    context: "system generator",
                    expected: d,
                    found: g.dim(),
                });
            }
            seeds.push(g.clone());
        }
        let unsaturated = MatrixSubspace::span(d, &seeds, cfg.tolerance)?.dim();
        let mut all = seeds;
        for a in gens {
            for g in rep.group().elements() {
                if g != rep.group().identity() {
                    all.push(rep.act(g, a));
                }
            }
        }
        let space = MatrixSubspace::span(d, &all, cfg.tolerance)?;
        let saturated = space.dim() > unsaturated;
        Ok(Self::with_flags(rep, space, saturated, cfg))
    }

    /// Validates an explicit subspace: it must contain the identity and be
    /// closed under the action.
    pub fn from_space(rep: Arc<UnitaryRep>, space: MatrixSubspace, cfg: &Config) -> Result<Self> {
        if space.ambient_dim() != rep.dim() {
            return Err(Error::Dimension {
                context: "system space",
                expected: rep.dim(),
                found: space.ambient_dim(),
            });
        }
        let tol = cfg.tolerance;
        let id = ComplexMatrix::identity(rep.dim());
        if !space.contains(&id, tol) {
            return Err(Error::OperatorOutsideSystem(space.residual(&id)));
        }
        for b in space.basis() {
            for g in rep.group().elements() {
                let moved = rep.act(g, b);
                if !space.contains(&moved, tol) {
                    return Err(Error::OperatorOutsideSystem(space.residual(&moved)));
                }
            }
        }
        Ok(Self::with_flags(rep, space, false, cfg))
    }

    /// The commutant `{X : [X, U(g)] = 0 for all g}`.
    pub fn invariant_subalgebra(rep: Arc<UnitaryRep>, cfg: &Config) -> Result<Self> {
        let d = rep.dim();
        let mut rows = Vec::new();
        for g in rep.group().elements() {
            if g == rep.group().identity() {
                continue;
            }
            let u = rep.matrix(g);
            // (U X - X U)_{pq} = Σ_ab X_ab (U_pa δ_bq - δ_pa U_bq)
            for p in 0..d {
                for q in 0..d {
                    let mut row = alloc::vec![ZERO; d * d];
                    for a in 0..d {
                        row[a * d + q] += u[(p, a)];
                    }
                    for b in 0..d {
                        row[p * d + b] -= u[(b, q)];
                    }
                    rows.push(row);
                }
            }
        }
        let kernel = null_space(&rows, d * d, cfg.tolerance)?;
        let gens: Vec<ComplexMatrix> = kernel
            .into_iter()
            .map(|v| ComplexMatrix::new(d, v).expect("d*d entries"))
            .collect();
        let space = MatrixSubspace::span(d, &gens, cfg.tolerance)?;
        let is_full_algebra = space.is_full();
        Ok(Self {
            rep,
            space,
            is_full_algebra,
            is_vn_algebra: true,
            is_invariant: true,
            saturated: false,
        })
    }

    fn with_flags(
        rep: Arc<UnitaryRep>,
        space: MatrixSubspace,
        saturated: bool,
        cfg: &Config,
    ) -> Self {
        let tol = cfg.tolerance;
        let is_full_algebra = space.is_full();
        let is_vn_algebra = is_full_algebra || is_star_algebra(&space, tol);
        let is_invariant = action_is_trivial(&rep, &space, tol);
        Self {
            rep,
            space,
            is_full_algebra,
            is_vn_algebra,
            is_invariant,
            saturated,
        }
    }

    pub fn rep(&self) -> &Arc<UnitaryRep> {
        &self.rep
    }

    pub fn space(&self) -> &MatrixSubspace {
        &self.space
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        self.space.basis()
    }

    pub fn ambient_dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_full_algebra(&self) -> bool {
        self.is_full_algebra
    }

    pub fn is_vn_algebra(&self) -> bool {
        self.is_vn_algebra
    }

    pub fn is_invariant(&self) -> bool {
        self.is_invariant
    }

    pub fn saturation_added(&self) -> bool {
        self.saturated
    }

    pub fn contains(&self, a: &ComplexMatrix, tol: f64) -> bool {
        self.space.contains(a, tol)
    }

    /// Flags recomputed from the basis, as `(full, vn, invariant)`.
    pub fn recompute_flags(&self, tol: f64) -> (bool, bool, bool) {
        let full = self.space.is_full();
        (
            full,
            full || is_star_algebra(&self.space, tol),
            action_is_trivial(&self.rep, &self.space, tol),
        )
    }

    /// Same representation (within `tol`) and same span.
    pub fn same_as(&self, other: &Self, tol: f64) -> bool {
        same_rep(&self.rep, &other.rep, tol) && self.space.same_span(&other.space, tol)
    }

    /// Dimension of the operational quotient of states, computed as
    /// `d^2` minus the dimension of the trace-pairing annihilator
    /// `{T : tr[T A] = 0 for all A in the space}`.
    pub fn quotient_dimension(&self, tol: f64) -> usize {
        let d = self.ambient_dim();
        // tr[T A] = Σ_ij T_ij A_ji
        let rows: Vec<Vec<C64>> = self
            .basis()
            .iter()
            .map(|a| a.transpose().into_vec())
            .collect();
        let annihilator = null_space(&rows, d * d, tol).expect("rows have d*d entries");
        d * d - annihilator.len()
    }
}

pub(crate) fn same_rep(a: &UnitaryRep, b: &UnitaryRep, tol: f64) -> bool {
    a.dim() == b.dim()
        && a.group().same_group(b.group())
        && a.matrices()
            .iter()
            .zip(b.matrices())
            .all(|(x, y)| x.approx_eq(y, tol))
}

fn action_is_trivial(rep: &UnitaryRep, space: &MatrixSubspace, tol: f64) -> bool {
    space.basis().iter().all(|b| {
        rep.group()
            .elements()
            .all(|g| rep.act(g, b).approx_eq(b, tol))
    })
}

fn is_star_algebra(space: &MatrixSubspace, tol: f64) -> bool {
    let basis = space.basis();
    basis.iter().all(|b| space.contains(&b.adjoint(), tol))
        && basis
            .iter()
            .all(|a| basis.iter().all(|b| space.contains(&a.matmul(b), tol)))
}

/// How positivity of a channel was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityCheck {
    /// Choi matrix is PSD: completely positive, exact.
    Choi,
    /// Every deterministic PSD probe maps to a PSD operator.
    Sampled { probes: usize, seed: u64 },
}

/// Equivariance scan result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivarianceReport {
    pub max_deviation: f64,
    /// First `(element, basis index)` whose deviation exceeds tolerance.
    pub witness: Option<(Element, usize)>,
}

impl EquivarianceReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// A validated unital positive linear map between semi-quantum systems,
/// stored as the images of the source basis.
#[derive(Debug, Clone)]
pub struct ChannelMap {
    source: Arc<SemiQuantumSystem>,
    target: Arc<SemiQuantumSystem>,
    images: Vec<ComplexMatrix>,
    positivity: PositivityCheck,
}

impl ChannelMap {
    pub fn new(
        source: Arc<SemiQuantumSystem>,
        target: Arc<SemiQuantumSystem>,
        images: Vec<ComplexMatrix>,
        cfg: &Config,
    ) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::ImageCount {
                expected: source.dim(),
                found: images.len(),
            });
        }
        let tol = cfg.tolerance;
        for (index, img) in images.iter().enumerate() {
            if img.dim() != target.ambient_dim() {
                return Err(Error::Dimension {
                    context: "channel image",
                    expected: target.ambient_dim(),
                    found: img.dim(),
                });
            }
            if !target.contains(img, tol) {
                return Err(Error::ImageOutsideTarget {
                    index,
                    residual: target.space().residual(img),
                });
            }
        }
        let mut channel = Self {
            source,
            target,
            images,
            positivity: PositivityCheck::Choi,
        };
        let deviation = channel.unitality_deviation();
        if deviation > tol * channel.target.ambient_dim() as f64 {
            return Err(Error::NotUnital { deviation });
        }
        channel.positivity = channel.certify_positivity(cfg)?;
        Ok(channel)
    }

    /// Images given by applying `f` to each source basis element.
    pub fn from_fn(
        source: Arc<SemiQuantumSystem>,
        target: Arc<SemiQuantumSystem>,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
        cfg: &Config,
    ) -> Result<Self> {
        let images = source.basis().iter().map(f).collect();
        Self::new(source, target, images, cfg)
    }

    pub fn identity(system: Arc<SemiQuantumSystem>, cfg: &Config) -> Result<Self> {
        Self::from_fn(system.clone(), system, ComplexMatrix::clone, cfg)
    }

    /// `A -> u A u^†`.
    pub fn conjugation(
        source: Arc<SemiQuantumSystem>,
        target: Arc<SemiQuantumSystem>,
        u: &ComplexMatrix,
        cfg: &Config,
    ) -> Result<Self> {
        let dev = u.unitarity_deviation();
        if dev > cfg.tolerance {
            return Err(Error::NotUnitary(dev));
        }
        check_dims(u.dim(), source.ambient_dim(), "conjugating unitary")?;
        check_dims(u.dim(), target.ambient_dim(), "conjugating unitary")?;
        Self::from_fn(source, target, |a| u.conjugate(a), cfg)
    }

    /// Heisenberg-picture Kraus form `A -> Σ_k K_k^† A K_k`.
    pub fn kraus(
        source: Arc<SemiQuantumSystem>,
        target: Arc<SemiQuantumSystem>,
        operators: &[ComplexMatrix],
        cfg: &Config,
    ) -> Result<Self> {
        for k in operators {
            check_dims(k.dim(), source.ambient_dim(), "Kraus operator")?;
            check_dims(k.dim(), target.ambient_dim(), "Kraus operator")?;
        }
        Self::from_fn(
            source,
            target,
            |a| {
                let mut out = ComplexMatrix::zeros(a.dim());
                for k in operators {
                    out += &k.adjoint().matmul(a).matmul(k);
                }
                out
            },
            cfg,
        )
    }

    /// `A -> λ A + (1 - λ) tr(A)/d I` on a system of ambient dimension `d`.
    pub fn depolarizing(
        source: Arc<SemiQuantumSystem>,
        target: Arc<SemiQuantumSystem>,
        keep: f64,
        cfg: &Config,
    ) -> Result<Self> {
        check_dims(
            target.ambient_dim(),
            source.ambient_dim(),
            "depolarizing channel",
        )?;
        let d = source.ambient_dim();
        Self::from_fn(
            source,
            target,
            |a| {
                let mut out = a.scale_real(keep);
                out.add_scaled(
                    a.trace() * ((1.0 - keep) / d as f64),
                    &ComplexMatrix::identity(d),
                );
                out
            },
            cfg,
        )
    }

    /// `A -> A ⊗ I_k` into a target of ambient dimension `d * k`.
    pub fn ampliation(
        source: Arc<SemiQuantumSystem>,
        target: Arc<SemiQuantumSystem>,
        cfg: &Config,
    ) -> Result<Self> {
        let d = source.ambient_dim();
        if d == 0 || !target.ambient_dim().is_multiple_of(d) {
            return Err(Error::Dimension {
                context: "ampliation target",
                expected: d,
                found: target.ambient_dim(),
            });
        }
        let k = target.ambient_dim() / d;
        Self::from_fn(source, target, |a| a.kron(&ComplexMatrix::identity(k)), cfg)
    }

    /// Channel determined by `pairs[k] = (input, output)`, where the inputs
    /// span the source space. Extra pairs must be consistent.
    pub fn from_pairs(
        source: Arc<SemiQuantumSystem>,
        target: Arc<SemiQuantumSystem>,
        pairs: &[(ComplexMatrix, ComplexMatrix)],
        cfg: &Config,
    ) -> Result<Self> {
        let tol = cfg.tolerance;
        let inputs: Vec<ComplexMatrix> = pairs.iter().map(|(a, _)| a.clone()).collect();
        for a in &inputs {
            if !source.contains(a, tol) {
                return Err(Error::OperatorOutsideSystem(source.space().residual(a)));
            }
        }
        let outputs: Vec<ComplexMatrix> = pairs.iter().map(|(_, b)| b.clone()).collect();
        for b in &outputs {
            check_dims(b.dim(), target.ambient_dim(), "channel output")?;
        }
        let (span, transform) =
            MatrixSubspace::span_with_transform(source.ambient_dim(), &inputs, tol)?;
        if span.dim() != source.dim() {
            return Err(Error::Dimension {
                context: "span of channel inputs",
                expected: source.dim(),
                found: span.dim(),
            });
        }
        let d_out = target.ambient_dim();
        // images of the orthonormal span basis
        let span_images: Vec<ComplexMatrix> = transform
            .iter()
            .map(|t| linear_combination(d_out, t, &outputs))
            .collect();
        let images = source
            .basis()
            .iter()
            .map(|b| linear_combination(d_out, &span.coordinates(b), &span_images))
            .collect();
        let channel = Self::new(source, target, images, cfg)?;
        for (index, (a, b)) in pairs.iter().enumerate() {
            let got = channel.apply_unchecked(a);
            if !got.approx_eq(b, tol * b.max_abs().max(1.0)) {
                return Err(Error::InconsistentImages(index));
            }
        }
        Ok(channel)
    }

    pub fn source(&self) -> &Arc<SemiQuantumSystem> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SemiQuantumSystem> {
        &self.target
    }

    pub fn images(&self) -> &[ComplexMatrix] {
        &self.images
    }

    pub fn positivity(&self) -> PositivityCheck {
        self.positivity
    }

    /// Applies the channel to the projection of `a` onto the source space.
    pub fn apply_unchecked(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let coords = self.source.space().coordinates(a);
        linear_combination(self.target.ambient_dim(), &coords, &self.images)
    }

    pub fn apply(&self, a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
        check_dims(a.dim(), self.source.ambient_dim(), "channel input")?;
        if !self.source.contains(a, tol) {
            return Err(Error::OperatorOutsideSystem(
                self.source.space().residual(a),
            ));
        }
        Ok(self.apply_unchecked(a))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ChannelMap, cfg: &Config) -> Result<ChannelMap> {
        if !self.target.same_as(&next.source, cfg.tolerance) {
            return Err(Error::ObjectMismatch(
                "channel target differs from next source",
            ));
        }
        let images = self
            .images
            .iter()
            .map(|m| next.apply_unchecked(m))
            .collect();
        Self::new(self.source.clone(), next.target.clone(), images, cfg)
    }

    fn unitality_deviation(&self) -> f64 {
        let id = ComplexMatrix::identity(self.source.ambient_dim());
        self.apply_unchecked(&id)
            .max_abs_diff(&ComplexMatrix::identity(self.target.ambient_dim()))
    }

    /// `Σ_ij |i><j| ⊗ φ(|i><j|)`; requires a full-algebra source.
    pub fn choi_matrix(&self) -> Result<ComplexMatrix> {
        if !self.source.is_full_algebra() {
            return Err(Error::RequiresFullAlgebra);
        }
        Ok(choi_matrix(self.source.ambient_dim(), |i, j| {
            self.images[i * self.source.ambient_dim() + j].clone()
        }))
    }

    fn certify_positivity(&self, cfg: &Config) -> Result<PositivityCheck> {
        if self.source.is_full_algebra() {
            let choi = self.choi_matrix()?;
            if choi.is_psd(cfg.tolerance) {
                return Ok(PositivityCheck::Choi);
            }
        }
        let probes = psd_probes(self.source.space(), cfg);
        let count = probes.len();
        let bound = -cfg.scaled(self.target.ambient_dim());
        for p in probes {
            let image = self.apply_unchecked(&p);
            let min_eigenvalue = image.min_eigenvalue();
            if !image.is_hermitian(cfg.tolerance) || min_eigenvalue < bound {
                return Err(Error::NotPositive {
                    witness: p,
                    min_eigenvalue,
                });
            }
        }
        Ok(PositivityCheck::Sampled {
            probes: count,
            seed: cfg.seed,
        })
    }

    /// Checks `φ(g.b) = g.φ(b)` for every basis element and group element.
    pub fn equivariance(&self, tol: f64) -> Result<EquivarianceReport> {
        let (rs, rt) = (self.source.rep(), self.target.rep());
        if !rs.group().same_group(rt.group()) {
            return Err(Error::GroupMismatch);
        }
        let mut report = EquivarianceReport {
            max_deviation: 0.0,
            witness: None,
        };
        for (index, b) in self.source.basis().iter().enumerate() {
            for g in rs.group().elements() {
                let lhs = self.apply_unchecked(&rs.act(g, b));
                let rhs = rt.act(g, &self.images[index]);
                let deviation = lhs.max_abs_diff(&rhs);
                report.max_deviation = report.max_deviation.max(deviation);
                if deviation > tol && report.witness.is_none() {
                    report.witness = Some((g, index));
                }
            }
        }
        Ok(report)
    }

    pub fn is_equivariant(&self, tol: f64) -> Result<bool> {
        Ok(self.equivariance(tol)?.holds())
    }

    /// Like [`Self::equivariance`] but failing with the witness.
    pub fn require_equivariant(&self, tol: f64) -> Result<()> {
        let report = self.equivariance(tol)?;
        match report.witness {
            None => Ok(()),
            Some((element, basis_index)) => Err(Error::NotEquivariant {
                element,
                basis_index,
                deviation: report.max_deviation,
            }),
        }
    }

    /// Predual `φ_*` defined by `tr[φ_*(t) A] = tr[t φ(A)]`; both ends
    /// must be full algebras.
    pub fn predual(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !self.source.is_full_algebra() || !self.target.is_full_algebra() {
            return Err(Error::RequiresFullAlgebra);
        }
        check_dims(t.dim(), self.target.ambient_dim(), "predual argument")?;
        let d = self.source.ambient_dim();
        // tr[X |i><j|] = X_ji
        Ok(ComplexMatrix::from_fn(d, |j, i| {
            t.matmul(&self.images[i * d + j]).trace()
        }))
    }
}

pub(crate) fn choi_matrix(
    d: usize,
    image: impl Fn(usize, usize) -> ComplexMatrix,
) -> ComplexMatrix {
    let mut out: Option<ComplexMatrix> = None;
    for i in 0..d {
        for j in 0..d {
            let term = ComplexMatrix::unit(d, i, j).kron(&image(i, j));
            match out.as_mut() {
                Some(acc) => *acc += &term,
                None => out = Some(term),
            }
        }
    }
    out.unwrap_or_else(|| ComplexMatrix::zeros(0))
}

fn check_dims(found: usize, expected: usize, context: &'static str) -> Result<()> {
    if found != expected {
        return Err(Error::Dimension {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// Operational equivalence class of a density matrix relative to a system.
///
/// The representative is the projection onto the adjoint span `V^†`:
/// `ρ ~ ρ'` exactly when `ρ - ρ'` is orthogonal to `V^†`, i.e. when
/// `tr[ρ A] = tr[ρ' A]` for every `A` in `V`.
#[derive(Debug, Clone)]
pub struct StateClass {
    system: Arc<SemiQuantumSystem>,
    canonical: ComplexMatrix,
}

impl StateClass {
    pub fn new(system: Arc<SemiQuantumSystem>, rho: &ComplexMatrix, cfg: &Config) -> Result<Self> {
        check_dims(rho.dim(), system.ambient_dim(), "state")?;
        rho.check_state(cfg.tolerance)?;
        Ok(Self::from_trace_class(system, rho))
    }

    /// Class of an arbitrary operator, skipping the density-matrix test.
    pub(crate) fn from_trace_class(system: Arc<SemiQuantumSystem>, t: &ComplexMatrix) -> Self {
        let canonical = hs_project(t, &system.space().adjoint_span()).expect("dims checked");
        Self { system, canonical }
    }

    pub fn system(&self) -> &Arc<SemiQuantumSystem> {
        &self.system
    }

    pub fn canonical(&self) -> &ComplexMatrix {
        &self.canonical
    }

    /// `tr[ρ A]` for `A` in the system space.
    pub fn expectation(&self, a: &ComplexMatrix) -> C64 {
        self.canonical.matmul(a).trace()
    }

    pub fn deviation(&self, other: &StateClass) -> f64 {
        self.canonical.max_abs_diff(&other.canonical)
    }

    pub fn equivalent(&self, other: &StateClass, tol: f64) -> bool {
        self.canonical.dim() == other.canonical.dim() && self.deviation(other) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::linalg::qubit::*;
    use crate::linalg::{c, r};
    use crate::sampling::Sampler;
    use alloc::vec;

    fn cfg() -> Config {
        Config::default()
    }

    fn z2_x() -> Arc<UnitaryRep> {
        let g = Arc::new(FiniteGroup::cyclic(2));
        Arc::new(UnitaryRep::new(g, vec![ComplexMatrix::identity(2), x()], &cfg()).unwrap())
    }

    fn eye() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    fn iz_system() -> Arc<SemiQuantumSystem> {
        Arc::new(SemiQuantumSystem::from_generators(z2_x(), &[z()], &cfg()).unwrap())
    }

    #[test]
    fn full_systems() {
        let trivial = Arc::new(UnitaryRep::trivial(Arc::new(FiniteGroup::cyclic(1)), 1));
        let s = SemiQuantumSystem::full(trivial, &cfg());
        assert_eq!(s.dim(), 1);
        assert!(s.is_invariant());
        let q = SemiQuantumSystem::full(z2_x(), &cfg());
        assert_eq!(q.dim(), 4);
        assert!(q.is_full_algebra() && q.is_vn_algebra() && !q.is_invariant());
        for b in q.basis() {
            assert!(q.contains(&q.rep().act(1, b), 1e-9));
        }
    }

    #[test]
    fn generated_systems_saturate() {
        let empty = SemiQuantumSystem::from_generators(z2_x(), &[], &cfg()).unwrap();
        assert_eq!(empty.dim(), 1);
        assert!(empty.contains(&eye(), 1e-9));

        let iz = iz_system();
        assert_eq!(iz.dim(), 2);
        assert!(!iz.saturation_added());

        let from_ket = SemiQuantumSystem::from_generators(z2_x(), &[ket0()], &cfg()).unwrap();
        assert_eq!(from_ket.dim(), 2);
        assert!(from_ket.contains(&z(), 1e-9));
        assert!(from_ket.contains(&ket1(), 1e-9));
        // span{I, |0><0|} already contains |1><1|
        assert!(!from_ket.saturation_added());

        let tilted = (&z() + &x()).scale_real(0.5);
        let from_tilted = SemiQuantumSystem::from_generators(z2_x(), &[tilted], &cfg()).unwrap();
        assert!(from_tilted.saturation_added());
        assert_eq!(from_tilted.dim(), 3);
    }

    #[test]
    fn flags_match_recomputation() {
        for sys in [
            SemiQuantumSystem::full(z2_x(), &cfg()),
            SemiQuantumSystem::from_generators(z2_x(), &[z()], &cfg()).unwrap(),
            SemiQuantumSystem::from_generators(z2_x(), &[ComplexMatrix::unit(2, 0, 1)], &cfg())
                .unwrap(),
            SemiQuantumSystem::invariant_subalgebra(z2_x(), &cfg()).unwrap(),
        ] {
            let (full, vn, inv) = sys.recompute_flags(1e-9);
            assert_eq!(full, sys.is_full_algebra());
            assert_eq!(vn, sys.is_vn_algebra());
            assert_eq!(inv, sys.is_invariant());
        }
    }

    #[test]
    fn explicit_space_must_contain_identity_and_be_closed() {
        let closed = MatrixSubspace::span(2, &[eye(), ket0()], 1e-9).unwrap();
        assert!(SemiQuantumSystem::from_space(z2_x(), closed, &cfg()).is_ok());
        let no_identity = MatrixSubspace::span(2, &[z()], 1e-9).unwrap();
        assert!(matches!(
            SemiQuantumSystem::from_space(z2_x(), no_identity, &cfg()),
            Err(Error::OperatorOutsideSystem(_))
        ));
        let open = MatrixSubspace::span(2, &[eye(), &z() + &x()], 1e-9).unwrap();
        assert!(SemiQuantumSystem::from_space(z2_x(), open, &cfg()).is_err());
    }

    #[test]
    fn invariant_subalgebras() {
        let trivial = Arc::new(UnitaryRep::trivial(Arc::new(FiniteGroup::cyclic(2)), 3));
        assert_eq!(
            SemiQuantumSystem::invariant_subalgebra(trivial, &cfg())
                .unwrap()
                .dim(),
            9
        );

        let commutant = SemiQuantumSystem::invariant_subalgebra(z2_x(), &cfg()).unwrap();
        assert_eq!(commutant.dim(), 2);
        assert!(commutant.contains(&eye(), 1e-9) && commutant.contains(&x(), 1e-9));

        let xx = Arc::new(z2_x().tensor(&z2_x()).unwrap());
        let commutant = SemiQuantumSystem::invariant_subalgebra(xx, &cfg()).unwrap();
        assert_eq!(commutant.dim(), 8);
        assert!(commutant.is_invariant());
    }

    #[test]
    fn identity_and_unitary_channels_are_valid() {
        let full = Arc::new(SemiQuantumSystem::full(z2_x(), &cfg()));
        let id = ChannelMap::identity(full.clone(), &cfg()).unwrap();
        assert_eq!(id.positivity(), PositivityCheck::Choi);
        let conj = ChannelMap::conjugation(full.clone(), full.clone(), &h(), &cfg()).unwrap();
        assert_eq!(conj.positivity(), PositivityCheck::Choi);
        let iz = iz_system();
        let id = ChannelMap::identity(iz, &cfg()).unwrap();
        assert!(matches!(id.positivity(), PositivityCheck::Sampled { .. }));
    }

    #[test]
    fn stretching_z_is_not_positive() {
        let iz = iz_system();
        let err = ChannelMap::from_pairs(
            iz.clone(),
            iz,
            &[(eye(), eye()), (z(), z().scale_real(2.0))],
            &cfg(),
        )
        .unwrap_err();
        match err {
            Error::NotPositive {
                witness,
                min_eigenvalue,
            } => {
                assert!((min_eigenvalue + 0.5).abs() < 1e-9);
                // the witness is a boundary state of span{I, Z}: a pure |0> or |1>
                assert!(witness.approx_eq(&ket0(), 1e-9) || witness.approx_eq(&ket1(), 1e-9));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn channel_validation_errors() {
        let full = Arc::new(SemiQuantumSystem::full(z2_x(), &cfg()));
        let iz = iz_system();
        assert!(matches!(
            ChannelMap::from_fn(full.clone(), full.clone(), |a| a.scale_real(0.5), &cfg()),
            Err(Error::NotUnital { .. })
        ));
        assert!(matches!(
            ChannelMap::from_fn(full.clone(), iz, ComplexMatrix::clone, &cfg()),
            Err(Error::ImageOutsideTarget { index: 1, .. })
        ));
        assert!(matches!(
            ChannelMap::new(full.clone(), full, vec![eye()], &cfg()),
            Err(Error::ImageCount { .. })
        ));
    }

    #[test]
    fn transpose_is_positive_but_not_completely_positive() {
        let full = Arc::new(SemiQuantumSystem::full(z2_x(), &cfg()));
        let t = ChannelMap::from_fn(full.clone(), full, ComplexMatrix::transpose, &cfg()).unwrap();
        assert!(matches!(t.positivity(), PositivityCheck::Sampled { .. }));
    }

    #[test]
    fn equivariance_examples() {
        let full = Arc::new(SemiQuantumSystem::full(z2_x(), &cfg()));
        assert!(ChannelMap::identity(full.clone(), &cfg())
            .unwrap()
            .is_equivariant(1e-9)
            .unwrap());
        // Z conjugation commutes with X conjugation since X and Z anticommute
        let zc = ChannelMap::conjugation(full.clone(), full.clone(), &z(), &cfg()).unwrap();
        assert!(zc.is_equivariant(1e-9).unwrap());
        let hc = ChannelMap::conjugation(full.clone(), full.clone(), &h(), &cfg()).unwrap();
        let report = hc.equivariance(1e-9).unwrap();
        assert!(!report.holds());
        assert_eq!(report.witness.unwrap().0, 1);
        assert!(matches!(
            hc.require_equivariant(1e-9),
            Err(Error::NotEquivariant { element: 1, .. })
        ));
    }

    #[test]
    fn channels_between_invariant_systems_are_equivariant() {
        let rep = z2_x();
        let inv = Arc::new(SemiQuantumSystem::invariant_subalgebra(rep.clone(), &cfg()).unwrap());
        // span{I, X} -> span{I, X}: A -> HAH would leave the space, so use a
        // convex flip of X instead
        let flip = ChannelMap::from_pairs(
            inv.clone(),
            inv,
            &[(eye(), eye()), (x(), x().scale_real(-0.5))],
            &cfg(),
        )
        .unwrap();
        assert!(flip.is_equivariant(1e-9).unwrap());
    }

    #[test]
    fn predual_examples() {
        let full = Arc::new(SemiQuantumSystem::full(z2_x(), &cfg()));
        let mut s = Sampler::new(3);
        let t = s.matrix(2);
        let id = ChannelMap::identity(full.clone(), &cfg()).unwrap();
        assert!(id.predual(&t).unwrap().approx_eq(&t, 1e-12));
        let u = h().matmul(&ComplexMatrix::from_diag(&[r(1.0), c(0.0, 1.0)]));
        let conj = ChannelMap::conjugation(full.clone(), full.clone(), &u, &cfg()).unwrap();
        let expected = u.adjoint().matmul(&t).matmul(&u);
        assert!(conj.predual(&t).unwrap().approx_eq(&expected, 1e-12));
        for _ in 0..10 {
            let t = s.matrix(2);
            let a = s.matrix(2);
            let lhs = conj.predual(&t).unwrap().matmul(&a).trace();
            let rhs = t.matmul(&conj.apply(&a, 1e-9).unwrap()).trace();
            assert!((lhs - rhs).norm() < 1e-12);
        }
        let iz = iz_system();
        assert_eq!(
            ChannelMap::identity(iz, &cfg())
                .unwrap()
                .predual(&t)
                .unwrap_err(),
            Error::RequiresFullAlgebra
        );
    }

    #[test]
    fn predual_preserves_states() {
        let full = Arc::new(SemiQuantumSystem::full(z2_x(), &cfg()));
        let dep = ChannelMap::depolarizing(full.clone(), full, 0.3, &cfg()).unwrap();
        let rho = Sampler::new(9).state(2);
        assert!(dep.predual(&rho).unwrap().check_state(1e-9).is_ok());
    }

    #[test]
    fn state_classes() {
        let mut s = Sampler::new(5);
        let rho = s.state(2);
        let full = Arc::new(SemiQuantumSystem::full(z2_x(), &cfg()));
        let class = StateClass::new(full, &rho, &cfg()).unwrap();
        assert!(class.canonical().approx_eq(&rho, 1e-12));

        let scalars = Arc::new(SemiQuantumSystem::from_generators(z2_x(), &[], &cfg()).unwrap());
        let class = StateClass::new(scalars, &rho, &cfg()).unwrap();
        assert!(class.canonical().approx_eq(&eye().scale_real(0.5), 1e-12));

        let (bx, by, bz) = (0.3, -0.2, 0.4);
        let rho = (&(&(&eye() + &x().scale_real(bx)) + &y().scale_real(by)) + &z().scale_real(bz))
            .scale_real(0.5);
        let class = StateClass::new(iz_system(), &rho, &cfg()).unwrap();
        let expected = (&eye() + &z().scale_real(bz)).scale_real(0.5);
        assert!(class.canonical().approx_eq(&expected, 1e-12));
        assert!(StateClass::new(iz_system(), &z(), &cfg()).is_err());
    }

    #[test]
    fn state_class_equivalence_matches_expectations() {
        let iz = iz_system();
        let bloch = |bx: f64, by: f64, bz: f64| {
            (&(&(&eye() + &x().scale_real(bx)) + &y().scale_real(by)) + &z().scale_real(bz))
                .scale_real(0.5)
        };
        let a = StateClass::new(iz.clone(), &bloch(0.5, 0.0, 0.2), &cfg()).unwrap();
        let b = StateClass::new(iz.clone(), &bloch(0.0, -0.3, 0.2), &cfg()).unwrap();
        assert!(a.equivalent(&b, 1e-12));
        let plus = ComplexMatrix::projector(&[r(1.0), r(1.0)]);
        let c = StateClass::new(iz, &plus, &cfg()).unwrap();
        assert!(!a.equivalent(&c, 1e-9));
        assert!(c.expectation(&z()).norm() < 1e-12);
        assert!((a.expectation(&z()) - r(0.2)).norm() < 1e-12);
    }

    #[test]
    fn invariant_systems_do_not_see_the_action_on_states() {
        let rep = z2_x();
        let inv = Arc::new(SemiQuantumSystem::invariant_subalgebra(rep.clone(), &cfg()).unwrap());
        let rho = Sampler::new(11).state(2);
        let a = StateClass::new(inv.clone(), &rho, &cfg()).unwrap();
        let b = StateClass::new(inv, &rep.act(1, &rho), &cfg()).unwrap();
        assert!(a.equivalent(&b, 1e-12));
    }

    #[test]
    fn quotient_dimensions() {
        let scalars = SemiQuantumSystem::from_generators(z2_x(), &[], &cfg()).unwrap();
        assert_eq!(scalars.quotient_dimension(1e-9), 1);
        let full = SemiQuantumSystem::full(z2_x(), &cfg());
        assert_eq!(full.quotient_dimension(1e-9), 4);
        assert_eq!(iz_system().quotient_dimension(1e-9), 2);
    }
}
