//! The relativization channel `A -> Σ_g E(g) ⊗ g.A`, the relative
//! subspace spanned by its image, the map induced on relative subspaces
//! by a pair (frame morphism, system channel), and checkers for the laws
//! these constructions satisfy.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::frame::{FrameMorphism, FrameObservable};
use crate::group::UnitaryRep;
use crate::linalg::{linear_combination, ComplexMatrix, C64};
use crate::sampling::{psd_probes, Sampler};
use crate::subspace::MatrixSubspace;
use crate::system::{choi_matrix, ChannelMap, SemiQuantumSystem, StateClass};

/// `Σ_g E(g) ⊗ g.a` straight from the definition.
pub fn relativize(
    frame: &FrameObservable,
    system: &SemiQuantumSystem,
    a: &ComplexMatrix,
    tol: f64,
) -> Result<ComplexMatrix> {
    if !frame.group().same_group(system.rep().group()) {
        return Err(Error::GroupMismatch);
    }
    if a.dim() != system.ambient_dim() {
        return Err(Error::Dimension {
            context: "relativized operator",
            expected: system.ambient_dim(),
            found: a.dim(),
        });
    }
    if !system.contains(a, tol) {
        return Err(Error::OperatorOutsideSystem(system.space().residual(a)));
    }
    Ok(relativize_raw(frame, system.rep(), a))
}

fn relativize_raw(
    frame: &FrameObservable,
    system_rep: &UnitaryRep,
    a: &ComplexMatrix,
) -> ComplexMatrix {
    let d = frame.dim() * system_rep.dim();
    let mut out = ComplexMatrix::zeros(d);
    for (g, e) in frame.effects().iter().enumerate() {
        out += &e.kron(&system_rep.act(g, a));
    }
    out
}

/// The relativization map of one frame on one system, stored as the
/// images of the system basis.
#[derive(Debug, Clone)]
pub struct RelativizationMap {
    frame: Arc<FrameObservable>,
    system: Arc<SemiQuantumSystem>,
    joint_rep: Arc<UnitaryRep>,
    images: Vec<ComplexMatrix>,
}

impl RelativizationMap {
    pub fn new(frame: Arc<FrameObservable>, system: Arc<SemiQuantumSystem>) -> Result<Self> {
        if !frame.group().same_group(system.rep().group()) {
            return Err(Error::GroupMismatch);
        }
        let joint_rep = Arc::new(frame.rep().tensor(system.rep())?);
        let images = system
            .basis()
            .iter()
            .map(|b| relativize_raw(&frame, system.rep(), b))
            .collect();
        Ok(Self {
            frame,
            system,
            joint_rep,
            images,
        })
    }

    pub fn frame(&self) -> &Arc<FrameObservable> {
        &self.frame
    }

    pub fn system(&self) -> &Arc<SemiQuantumSystem> {
        &self.system
    }

    pub fn joint_rep(&self) -> &Arc<UnitaryRep> {
        &self.joint_rep
    }

    pub fn joint_dim(&self) -> usize {
        self.joint_rep.dim()
    }

    /// Images of the system basis.
    pub fn images(&self) -> &[ComplexMatrix] {
        &self.images
    }

    /// Applies the stored superoperator to the projection of `a` onto the
    /// system space.
    pub fn apply_unchecked(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let coords = self.system.space().coordinates(a);
        linear_combination(self.joint_dim(), &coords, &self.images)
    }

    pub fn apply(&self, a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
        relativize(&self.frame, &self.system, a, tol)?;
        Ok(self.apply_unchecked(a))
    }

    /// Largest entry of `[¥(b), U_R(g) ⊗ U_S(g)]` over basis images.
    pub fn invariance_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for img in &self.images {
            for u in self.joint_rep.matrices() {
                worst = worst.max(img.commutator(u).max_abs());
            }
        }
        worst
    }

    /// Predual on a joint trace-class operator `t`:
    /// `Σ_g g⁻¹.tr_R[(E(g) ⊗ I) t]`.
    pub fn predual(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        if t.dim() != self.joint_dim() {
            return Err(Error::Dimension {
                context: "joint operator",
                expected: self.joint_dim(),
                found: t.dim(),
            });
        }
        let (dr, ds) = (self.frame.dim(), self.system.ambient_dim());
        let rep = self.system.rep();
        let id_s = ComplexMatrix::identity(ds);
        let mut out = ComplexMatrix::zeros(ds);
        for (g, e) in self.frame.effects().iter().enumerate() {
            let local = e.kron(&id_s).matmul(t).partial_trace_first(dr, ds)?;
            out += &rep.act(rep.group().inverse(g), &local);
        }
        Ok(out)
    }

    /// Relative state of a joint density matrix, as a class on the system.
    pub fn relative_state(&self, joint_state: &ComplexMatrix, cfg: &Config) -> Result<StateClass> {
        if joint_state.dim() != self.joint_dim() {
            return Err(Error::Dimension {
                context: "joint state",
                expected: self.joint_dim(),
                found: joint_state.dim(),
            });
        }
        joint_state.check_state(cfg.tolerance)?;
        let rho = self.predual(joint_state)?;
        StateClass::new(self.system.clone(), &rho.hermitian_part(), cfg)
    }

    /// Product-relative state `Σ_g μ_ω(g) g⁻¹.ρ` with `μ_ω` the Born
    /// measure of the frame state.
    pub fn product_relative_state(
        &self,
        omega: &ComplexMatrix,
        rho: &ComplexMatrix,
        cfg: &Config,
    ) -> Result<StateClass> {
        let measure = self.frame.born_measure(omega, cfg)?;
        if rho.dim() != self.system.ambient_dim() {
            return Err(Error::Dimension {
                context: "system state",
                expected: self.system.ambient_dim(),
                found: rho.dim(),
            });
        }
        rho.check_state(cfg.tolerance)?;
        let rep = self.system.rep();
        let mut out = ComplexMatrix::zeros(rho.dim());
        for (g, p) in measure.iter().enumerate() {
            out.add_scaled(C64::new(*p, 0.0), &rep.act(rep.group().inverse(g), rho));
        }
        StateClass::new(self.system.clone(), &out, cfg)
    }

    /// Choi matrix of the map on a full-algebra system.
    pub fn choi_matrix(&self) -> Result<ComplexMatrix> {
        if !self.system.is_full_algebra() {
            return Err(Error::RequiresFullAlgebra);
        }
        let d = self.system.ambient_dim();
        Ok(choi_matrix(d, |i, j| self.images[i * d + j].clone()))
    }

    /// Linearity, unitality, invariance, positivity and contraction.
    pub fn check_channel_axioms(&self, cfg: &Config) -> ChannelAxiomReport {
        let tol = cfg.tolerance;
        let space = self.system.space();
        let ds = self.system.ambient_dim();
        let mut sampler = Sampler::new(cfg.seed);

        let mut linearity: f64 = 0.0;
        let rep = self.system.rep();
        for _ in 0..cfg.samples.max(1) {
            let (a, b) = (sampler.element(space), sampler.element(space));
            let (alpha, beta) = (sampler.complex(), sampler.complex());
            let mut combo = a.scale(alpha);
            combo.add_scaled(beta, &b);
            let lhs = relativize_raw(&self.frame, rep, &combo);
            let mut rhs = relativize_raw(&self.frame, rep, &a).scale(alpha);
            rhs.add_scaled(beta, &relativize_raw(&self.frame, rep, &b));
            let scale = combo.max_abs().max(1.0);
            linearity = linearity.max(lhs.max_abs_diff(&rhs) / scale);
        }

        let unitality = self
            .apply_unchecked(&ComplexMatrix::identity(ds))
            .max_abs_diff(&ComplexMatrix::identity(self.joint_dim()));

        let invariance = self.invariance_deviation();

        let choi_min_eigenvalue = self.choi_matrix().ok().map(|c| c.min_eigenvalue());
        let probes = psd_probes(space, cfg);
        let mut sampled_min_eigenvalue = f64::INFINITY;
        let mut positivity_witness = None;
        for p in &probes {
            let m = self.apply_unchecked(p).min_eigenvalue();
            if m < sampled_min_eigenvalue {
                sampled_min_eigenvalue = m;
                if m < -tol {
                    positivity_witness = Some(p.clone());
                }
            }
        }

        let mut inputs: Vec<ComplexMatrix> = space.basis().to_vec();
        inputs.extend(probes.iter().cloned());
        for _ in 0..cfg.samples {
            inputs.push(sampler.element(space));
        }
        let mut max_ratio: f64 = 0.0;
        let mut min_ratio = f64::INFINITY;
        let mut strict_witness = None;
        for a in &inputs {
            let norm = a.operator_norm();
            if norm <= tol {
                continue;
            }
            let ratio = self.apply_unchecked(a).operator_norm() / norm;
            max_ratio = max_ratio.max(ratio);
            if ratio < min_ratio {
                min_ratio = ratio;
                if ratio < 1.0 - tol.max(1e-9) {
                    strict_witness = Some(a.clone());
                }
            }
        }

        ChannelAxiomReport {
            tolerance: tol,
            linearity,
            unitality,
            invariance,
            choi_min_eigenvalue,
            sampled_min_eigenvalue,
            probes: probes.len(),
            positivity_witness,
            max_norm_ratio: max_ratio,
            min_norm_ratio: min_ratio,
            strict_contraction_witness: strict_witness,
        }
    }

    /// Multiplicativity, isometry and adjoint compatibility on the basis
    /// of a full-algebra system, compared against ideality of the frame.
    pub fn check_ideal_isomorphism(&self, cfg: &Config) -> Result<IdealReport> {
        if !self.system.is_full_algebra() {
            return Err(Error::RequiresFullAlgebra);
        }
        let tol = cfg.tolerance;
        let basis = self.system.basis();
        // Frobenius norms bound operator norms from above, so operator
        // norms are only needed for the leading candidates.
        let mut candidates = Vec::with_capacity(basis.len() * basis.len());
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let diff =
                    &self.apply_unchecked(&a.matmul(b)) - &self.images[i].matmul(&self.images[j]);
                let frob = diff.frobenius_norm();
                candidates.push((frob, i, j, diff));
            }
        }
        candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut multiplicativity: f64 = 0.0;
        let mut witness = None;
        for (frob, i, j, diff) in &candidates {
            if *frob <= multiplicativity {
                break;
            }
            let op = diff.operator_norm();
            if op > multiplicativity {
                multiplicativity = op;
                witness = Some((*i, *j));
            }
        }
        let mut isometry: f64 = 0.0;
        let mut adjoint: f64 = 0.0;
        for (b, img) in basis.iter().zip(&self.images) {
            isometry = isometry.max((img.operator_norm() - b.operator_norm()).abs());
            let star = self.apply_unchecked(&b.adjoint());
            adjoint = adjoint.max((&star - &img.adjoint()).operator_norm());
        }
        let homomorphism = multiplicativity <= tol && isometry <= tol && adjoint <= tol;
        Ok(IdealReport {
            tolerance: tol,
            frame_is_ideal: self.frame.is_ideal(),
            multiplicativity,
            multiplicativity_witness: if multiplicativity > tol {
                witness
            } else {
                None
            },
            isometry,
            adjoint,
            homomorphism,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ChannelAxiomReport {
    pub tolerance: f64,
    /// Largest relative deviation from linearity on random combinations.
    pub linearity: f64,
    /// `max |¥(I) - I|`.
    pub unitality: f64,
    /// Largest commutator entry with the joint representation.
    pub invariance: f64,
    /// Minimum Choi eigenvalue when the system is a full algebra.
    pub choi_min_eigenvalue: Option<f64>,
    pub sampled_min_eigenvalue: f64,
    pub probes: usize,
    pub positivity_witness: Option<ComplexMatrix>,
    pub max_norm_ratio: f64,
    pub min_norm_ratio: f64,
    /// An input whose norm shrinks by more than the tolerance, if any.
    pub strict_contraction_witness: Option<ComplexMatrix>,
}

impl ChannelAxiomReport {
    pub fn linear(&self) -> bool {
        self.linearity <= self.tolerance
    }

    pub fn unital(&self) -> bool {
        self.unitality <= self.tolerance
    }

    pub fn invariant(&self) -> bool {
        self.invariance <= self.tolerance
    }

    pub fn positive(&self) -> bool {
        self.choi_min_eigenvalue
            .is_none_or(|m| m >= -self.tolerance)
            && self.sampled_min_eigenvalue >= -self.tolerance
    }

    pub fn contractive(&self) -> bool {
        self.max_norm_ratio <= 1.0 + self.tolerance
    }

    pub fn passed(&self) -> bool {
        self.linear() && self.unital() && self.invariant() && self.positive() && self.contractive()
    }

    /// Largest violation magnitude across the axioms.
    pub fn max_deviation(&self) -> f64 {
        let neg = |m: f64| (-m).max(0.0);
        self.linearity
            .max(self.unitality)
            .max(self.invariance)
            .max(self.choi_min_eigenvalue.map_or(0.0, neg))
            .max(neg(self.sampled_min_eigenvalue))
            .max((self.max_norm_ratio - 1.0).max(0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdealReport {
    pub tolerance: f64,
    pub frame_is_ideal: bool,
    /// `max_{i,j} |¥(b_i b_j) - ¥(b_i) ¥(b_j)|` in operator norm.
    pub multiplicativity: f64,
    /// Basis indices `(i, j)` attaining the multiplicativity deviation.
    pub multiplicativity_witness: Option<(usize, usize)>,
    /// `max_i | |¥(b_i)| - |b_i| |`.
    pub isometry: f64,
    /// `max_i |¥(b_i^†) - ¥(b_i)^†|`.
    pub adjoint: f64,
    /// Every deviation within tolerance.
    pub homomorphism: bool,
}

impl IdealReport {
    /// Ideal frames give *-homomorphisms and non-ideal frames do not.
    pub fn consistent(&self) -> bool {
        self.frame_is_ideal == self.homomorphism
    }

    pub fn max_deviation(&self) -> f64 {
        self.multiplicativity.max(self.isometry).max(self.adjoint)
    }
}

/// The span of the relativized system inside the joint invariant algebra,
/// with the kernel of the relativization map.
#[derive(Debug, Clone)]
pub struct RelativeSubspace {
    map: RelativizationMap,
    system: Arc<SemiQuantumSystem>,
    preimages: Vec<Vec<C64>>,
    kernel: MatrixSubspace,
}

impl RelativeSubspace {
    pub fn new(
        frame: Arc<FrameObservable>,
        system: Arc<SemiQuantumSystem>,
        cfg: &Config,
    ) -> Result<Self> {
        let map = RelativizationMap::new(frame, system)?;
        let tol = cfg.tolerance;
        let joint = map.joint_dim();
        let (space, preimages) = MatrixSubspace::span_with_transform(joint, &map.images, tol)?;
        // kernel of coordinates -> Σ c_i ¥(b_i)
        let k = map.images.len();
        let rows: Vec<Vec<C64>> = (0..joint * joint)
            .map(|p| map.images.iter().map(|m| m.as_slice()[p]).collect())
            .collect();
        let kernel_coords = crate::subspace::null_space(&rows, k, tol)?;
        let ds = map.system.ambient_dim();
        let kernel_ops: Vec<ComplexMatrix> = kernel_coords
            .iter()
            .map(|c| map.system.space().from_coordinates(c))
            .collect();
        let kernel = MatrixSubspace::span(ds, &kernel_ops, tol)?;
        let system = Arc::new(SemiQuantumSystem::from_space(
            map.joint_rep.clone(),
            space,
            cfg,
        )?);
        Ok(Self {
            map,
            system,
            preimages,
            kernel,
        })
    }

    pub fn map(&self) -> &RelativizationMap {
        &self.map
    }

    /// The relative subspace as an (invariant) semi-quantum system.
    pub fn system(&self) -> &Arc<SemiQuantumSystem> {
        &self.system
    }

    pub fn space(&self) -> &MatrixSubspace {
        self.system.space()
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    /// System operators annihilated by the relativization map.
    pub fn kernel(&self) -> &MatrixSubspace {
        &self.kernel
    }

    /// Coefficients expressing basis element `k` of the relative space
    /// as `Σ_i c_i ¥(b_i)` over the system basis.
    pub fn preimage(&self, k: usize) -> &[C64] {
        &self.preimages[k]
    }

    /// Largest commutator entry between the basis and the joint action.
    pub fn invariance_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for b in self.space().basis() {
            for u in self.map.joint_rep.matrices() {
                worst = worst.max(b.commutator(u).max_abs());
            }
        }
        worst
    }
}

/// The channel `¥(ψ, φ)` between relative subspaces determined by
/// `¥^R(A) -> ¥^{R'}(φ(A))`.
#[derive(Debug, Clone)]
pub struct YenMorphism {
    source: Arc<RelativeSubspace>,
    target: Arc<RelativeSubspace>,
    frame_morphism: FrameMorphism,
    system_channel: ChannelMap,
    channel: ChannelMap,
}

impl YenMorphism {
    /// Builds the induced channel, certifying well-definedness: every
    /// kernel element `k` of the source relativization must satisfy
    /// `¥^{R'}(φ(k)) = 0`.
    pub fn new(psi: &FrameMorphism, phi: &ChannelMap, cfg: &Config) -> Result<Self> {
        let source = Arc::new(RelativeSubspace::new(
            psi.source().clone(),
            phi.source().clone(),
            cfg,
        )?);
        let target = Arc::new(RelativeSubspace::new(
            psi.target().clone(),
            phi.target().clone(),
            cfg,
        )?);
        Self::between(source, target, psi, phi, cfg)
    }

    /// Like [`Self::new`] with prebuilt relative subspaces.
    pub fn between(
        source: Arc<RelativeSubspace>,
        target: Arc<RelativeSubspace>,
        psi: &FrameMorphism,
        phi: &ChannelMap,
        cfg: &Config,
    ) -> Result<Self> {
        let tol = cfg.tolerance;
        if !source.map.frame.same_as(psi.source(), tol)
            || !target.map.frame.same_as(psi.target(), tol)
        {
            return Err(Error::ObjectMismatch(
                "frame morphism does not connect the relative subspaces",
            ));
        }
        if !source.map.system.same_as(phi.source(), tol)
            || !target.map.system.same_as(phi.target(), tol)
        {
            return Err(Error::ObjectMismatch(
                "system channel does not connect the relative subspaces",
            ));
        }
        let target_map = &target.map;
        for k in source.kernel.basis() {
            let image = target_map.apply_unchecked(&phi.apply_unchecked(k));
            if image.max_abs() > tol {
                return Err(Error::IllDefined {
                    witness: k.clone(),
                    norm: image.operator_norm(),
                });
            }
        }
        let d = target_map.joint_dim();
        let generator_images: Vec<ComplexMatrix> = source
            .map
            .system
            .basis()
            .iter()
            .map(|b| target_map.apply_unchecked(&phi.apply_unchecked(b)))
            .collect();
        let images = source
            .preimages
            .iter()
            .map(|c| linear_combination(d, c, &generator_images))
            .collect();
        let channel = ChannelMap::new(source.system.clone(), target.system.clone(), images, cfg)?;
        Ok(Self {
            source,
            target,
            frame_morphism: psi.clone(),
            system_channel: phi.clone(),
            channel,
        })
    }

    pub fn source(&self) -> &Arc<RelativeSubspace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RelativeSubspace> {
        &self.target
    }

    pub fn frame_morphism(&self) -> &FrameMorphism {
        &self.frame_morphism
    }

    pub fn system_channel(&self) -> &ChannelMap {
        &self.system_channel
    }

    /// The induced map as a channel between the relative subspaces.
    pub fn channel(&self) -> &ChannelMap {
        &self.channel
    }

    /// Images of the source relative-space basis.
    pub fn images(&self) -> &[ComplexMatrix] {
        self.channel.images()
    }

    pub fn apply(&self, x: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
        self.channel.apply(x, tol)
    }
}

/// `(ψ ⊗ φ)(x)` for `x` in `V_R ⊗ V_S`, expanding `x` in the product of
/// the two orthonormal bases. Errors when `x` has a component outside the
/// product space.
pub fn tensor_apply(
    psi: &ChannelMap,
    phi: &ChannelMap,
    x: &ComplexMatrix,
    tol: f64,
) -> Result<ComplexMatrix> {
    let (vr, vs) = (psi.source(), phi.source());
    let d_in = vr.ambient_dim() * vs.ambient_dim();
    if x.dim() != d_in {
        return Err(Error::Dimension {
            context: "tensor-product input",
            expected: d_in,
            found: x.dim(),
        });
    }
    let d_out = psi.target().ambient_dim() * phi.target().ambient_dim();
    let mut out = ComplexMatrix::zeros(d_out);
    let mut rebuilt = ComplexMatrix::zeros(d_in);
    for (r, r_img) in vr.basis().iter().zip(psi.images()) {
        for (s, s_img) in vs.basis().iter().zip(phi.images()) {
            let product = r.kron(s);
            let coeff = product.hs_inner(x);
            if coeff.norm() == 0.0 {
                continue;
            }
            rebuilt.add_scaled(coeff, &product);
            out.add_scaled(coeff, &r_img.kron(s_img));
        }
    }
    let residual = x.max_abs_diff(&rebuilt);
    if residual > tol * x.max_abs().max(1.0) {
        return Err(Error::OperatorOutsideSystem(residual));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctorReport {
    pub identity_deviation: f64,
    pub composition_deviation: f64,
    pub comparisons: usize,
}

impl FunctorReport {
    pub fn max_deviation(&self) -> f64 {
        self.identity_deviation.max(self.composition_deviation)
    }
}

/// Identity law on every object of the chain and composition law on every
/// contiguous sub-chain: `¥(ξ,λ) ∘ ¥(ψ,φ) = ¥(ξ∘ψ, λ∘φ)`.
pub fn check_functor_laws(
    chain: &[(FrameMorphism, ChannelMap)],
    cfg: &Config,
) -> Result<FunctorReport> {
    let mut report = FunctorReport {
        identity_deviation: 0.0,
        composition_deviation: 0.0,
        comparisons: 0,
    };
    let mut objects: Vec<(Arc<FrameObservable>, Arc<SemiQuantumSystem>)> = Vec::new();
    for (psi, phi) in chain {
        objects.push((psi.source().clone(), phi.source().clone()));
    }
    if let Some((psi, phi)) = chain.last() {
        objects.push((psi.target().clone(), phi.target().clone()));
    }
    for (frame, system) in &objects {
        let id_frame = FrameMorphism::identity(frame.clone(), cfg)?;
        let id_system = ChannelMap::identity(system.clone(), cfg)?;
        let y = YenMorphism::new(&id_frame, &id_system, cfg)?;
        for (b, img) in y.source.space().basis().iter().zip(y.images()) {
            report.identity_deviation = report.identity_deviation.max(b.max_abs_diff(img));
            report.comparisons += 1;
        }
    }
    let links: Vec<YenMorphism> = chain
        .iter()
        .map(|(psi, phi)| YenMorphism::new(psi, phi, cfg))
        .collect::<Result<_>>()?;
    for start in 0..links.len() {
        let mut psi = chain[start].0.clone();
        let mut phi = chain[start].1.clone();
        for end in start + 1..links.len() {
            psi = psi.then(&chain[end].0, cfg)?;
            phi = phi.then(&chain[end].1, cfg)?;
            let composite = YenMorphism::new(&psi, &phi, cfg)?;
            for (k, b) in links[start].source.space().basis().iter().enumerate() {
                let mut stepwise = links[start].images()[k].clone();
                for link in &links[start + 1..=end] {
                    stepwise = link.channel.apply_unchecked(&stepwise);
                }
                let direct = composite.channel.apply_unchecked(b);
                report.composition_deviation = report
                    .composition_deviation
                    .max(stepwise.max_abs_diff(&direct));
                report.comparisons += 1;
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub max_deviation: f64,
    /// Index of the first basis element whose deviation exceeds tolerance.
    pub witness: Option<usize>,
}

impl ComparisonReport {
    fn record(&mut self, index: usize, deviation: f64, tol: f64) {
        self.max_deviation = self.max_deviation.max(deviation);
        if deviation > tol && self.witness.is_none() {
            self.witness = Some(index);
        }
    }

    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// For equivariant `φ`, compares `¥(ψ, φ)` with `ψ ⊗ φ` restricted to the
/// source relative space.
pub fn check_equivariant_tensor_form(
    psi: &FrameMorphism,
    phi: &ChannelMap,
    cfg: &Config,
) -> Result<ComparisonReport> {
    let tol = cfg.tolerance;
    phi.require_equivariant(tol)?;
    let y = YenMorphism::new(psi, phi, cfg)?;
    let mut report = ComparisonReport {
        max_deviation: 0.0,
        witness: None,
    };
    for (k, (b, img)) in y.source.space().basis().iter().zip(y.images()).enumerate() {
        let parallel = tensor_apply(psi.channel(), phi, b, tol)?;
        report.record(k, parallel.max_abs_diff(img), tol);
    }
    Ok(report)
}

/// Naturality square `¥^R ∘ φ = (id_R ⊗ φ) ∘ ¥^R` on the source basis of
/// an equivariant `φ`.
pub fn check_naturality(
    frame: &Arc<FrameObservable>,
    phi: &ChannelMap,
    cfg: &Config,
) -> Result<ComparisonReport> {
    let tol = cfg.tolerance;
    if !frame.group().same_group(phi.source().rep().group()) {
        return Err(Error::GroupMismatch);
    }
    phi.require_equivariant(tol)?;
    let id_frame = ChannelMap::identity(frame.value_system().clone(), cfg)?;
    let mut report = ComparisonReport {
        max_deviation: 0.0,
        witness: None,
    };
    for (k, (b, img)) in phi.source().basis().iter().zip(phi.images()).enumerate() {
        let lhs = relativize_raw(frame, phi.target().rep(), img);
        let rhs = tensor_apply(
            &id_frame,
            phi,
            &relativize_raw(frame, phi.source().rep(), b),
            tol,
        )?;
        report.record(k, lhs.max_abs_diff(&rhs), tol);
    }
    Ok(report)
}

/// The two descriptions related by an external frame transformation.
#[derive(Debug, Clone)]
pub struct ExternalTransform {
    /// `ρ^(ω')` relative to the target frame.
    pub target_side: StateClass,
    /// `ρ^(ψ_*(ω'))` relative to the source frame.
    pub source_side: StateClass,
    /// `ψ_*(ω')`.
    pub pulled_back_frame_state: ComplexMatrix,
}

impl ExternalTransform {
    pub fn deviation(&self) -> f64 {
        self.target_side.deviation(&self.source_side)
    }
}

/// Compares the product-relative state of `rho` under the target frame in
/// state `omega_target` with the one under the source frame in state
/// `ψ_*(omega_target)`.
///
/// `ψ_*` needs the frame channel on full algebras. When the value systems
/// are proper subspaces an `extension` to the full algebras must be
/// supplied; it has to agree with `ψ` on the source value system.
pub fn external_frame_transform(
    psi: &FrameMorphism,
    system: &Arc<SemiQuantumSystem>,
    omega_target: &ComplexMatrix,
    rho: &ComplexMatrix,
    extension: Option<&ChannelMap>,
    cfg: &Config,
) -> Result<ExternalTransform> {
    let tol = cfg.tolerance;
    let frame_channel = match extension {
        Some(ext) => {
            for b in psi.channel().source().basis() {
                let agrees = ext
                    .apply(b, tol)
                    .map(|img| img.approx_eq(&psi.channel().apply_unchecked(b), tol))
                    .unwrap_or(false);
                if !agrees {
                    return Err(Error::ObjectMismatch(
                        "extension disagrees with the frame morphism",
                    ));
                }
            }
            ext
        }
        None => psi.channel(),
    };
    omega_target.check_state(tol)?;
    let pulled_back = frame_channel.predual(omega_target)?.hermitian_part();
    let target_map = RelativizationMap::new(psi.target().clone(), system.clone())?;
    let source_map = RelativizationMap::new(psi.source().clone(), system.clone())?;
    let target_side = target_map.product_relative_state(omega_target, rho, cfg)?;
    let source_side = source_map.product_relative_state(&pulled_back, rho, cfg)?;
    Ok(ExternalTransform {
        target_side,
        source_side,
        pulled_back_frame_state: pulled_back,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{pushforward, smearing_channel};
    use crate::group::FiniteGroup;
    use crate::linalg::qubit::*;
    use alloc::vec;

    fn cfg() -> Config {
        Config::default()
    }

    fn rep_x() -> Arc<UnitaryRep> {
        Arc::new(UnitaryRep::regular(Arc::new(FiniteGroup::cyclic(2))))
    }

    fn eye() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    fn ideal() -> Arc<FrameObservable> {
        Arc::new(FrameObservable::from_seed(rep_x(), &ket0(), None, &cfg()).unwrap())
    }

    fn smeared() -> Arc<FrameObservable> {
        let seed = (&eye() + &z().scale_real(0.5)).scale_real(0.5);
        Arc::new(FrameObservable::from_seed(rep_x(), &seed, None, &cfg()).unwrap())
    }

    fn qubit() -> Arc<SemiQuantumSystem> {
        Arc::new(SemiQuantumSystem::full(rep_x(), &cfg()))
    }

    #[test]
    fn closed_form_relativizations() {
        let zz = z().kron(&z());
        let got = relativize(&ideal(), &qubit(), &z(), 1e-9).unwrap();
        assert!(got.approx_eq(&zz, 1e-12));
        let got = relativize(&smeared(), &qubit(), &z(), 1e-9).unwrap();
        assert!(got.approx_eq(&zz.scale_real(0.5), 1e-12));
        assert!((got.operator_norm() - 0.5).abs() < 1e-9);

        let trivial_group = Arc::new(FiniteGroup::cyclic(1));
        let frame = Arc::new(FrameObservable::canonical_ideal(
            trivial_group.clone(),
            &cfg(),
        ));
        let sys = Arc::new(SemiQuantumSystem::full(
            Arc::new(UnitaryRep::trivial(trivial_group, 2)),
            &cfg(),
        ));
        let a = x().scale(C64::new(0.3, -1.0));
        assert!(relativize(&frame, &sys, &a, 1e-9)
            .unwrap()
            .approx_eq(&a, 1e-15));
    }

    #[test]
    fn relativize_rejects_foreign_operators() {
        let iz = Arc::new(SemiQuantumSystem::from_generators(rep_x(), &[z()], &cfg()).unwrap());
        assert!(matches!(
            relativize(&ideal(), &iz, &x(), 1e-9),
            Err(Error::OperatorOutsideSystem(_))
        ));
        let z3 = Arc::new(FrameObservable::canonical_ideal(
            Arc::new(FiniteGroup::cyclic(3)),
            &cfg(),
        ));
        assert_eq!(
            relativize(&z3, &qubit(), &z(), 1e-9).unwrap_err(),
            Error::GroupMismatch
        );
    }

    #[test]
    fn stored_map_agrees_with_direct_formula() {
        let map = RelativizationMap::new(smeared(), qubit()).unwrap();
        let a = (&x() + &y().scale(C64::new(0.0, 2.0))).scale_real(0.7);
        let direct = relativize(map.frame(), map.system(), &a, 1e-9).unwrap();
        assert!(map.apply(&a, 1e-9).unwrap().approx_eq(&direct, 1e-12));
        assert!(map.invariance_deviation() < 1e-12);
    }

    #[test]
    fn relative_subspaces() {
        let trivial_group = Arc::new(FiniteGroup::cyclic(1));
        let frame = Arc::new(FrameObservable::canonical_ideal(
            trivial_group.clone(),
            &cfg(),
        ));
        let sys = Arc::new(SemiQuantumSystem::full(
            Arc::new(UnitaryRep::trivial(trivial_group, 2)),
            &cfg(),
        ));
        let rel = RelativeSubspace::new(frame, sys, &cfg()).unwrap();
        assert_eq!(rel.dim(), 4);
        assert_eq!(rel.kernel().dim(), 0);

        let rel = RelativeSubspace::new(ideal(), qubit(), &cfg()).unwrap();
        assert_eq!(rel.dim(), 4);
        assert_eq!(rel.kernel().dim(), 0);
        assert!(rel.invariance_deviation() < 1e-12);
        assert!(rel.system().is_invariant());

        let unlocalized = Arc::new(FrameObservable::unlocalized(rep_x(), &cfg()).unwrap());
        let rel = RelativeSubspace::new(unlocalized, qubit(), &cfg()).unwrap();
        assert_eq!(rel.dim(), 2);
        assert_eq!(rel.kernel().dim(), 2);
        assert!(rel.kernel().contains(&z(), 1e-9));
        assert!(rel.space().contains(&eye().kron(&x()), 1e-9));
        assert_eq!(rel.dim() + rel.kernel().dim(), 4);
    }

    #[test]
    fn channel_axioms_on_z2_examples() {
        let report = RelativizationMap::new(ideal(), qubit())
            .unwrap()
            .check_channel_axioms(&cfg());
        assert!(report.passed(), "{report:?}");
        assert!((report.max_norm_ratio - 1.0).abs() < 1e-9);
        assert!(report.choi_min_eigenvalue.unwrap() > -1e-9);

        let report = RelativizationMap::new(smeared(), qubit())
            .unwrap()
            .check_channel_axioms(&cfg());
        assert!(report.passed(), "{report:?}");
        assert!(report.min_norm_ratio < 1.0 - 1e-3);
        assert!(report.strict_contraction_witness.is_some());
        let z_ratio = RelativizationMap::new(smeared(), qubit())
            .unwrap()
            .apply(&z(), 1e-9)
            .unwrap()
            .operator_norm();
        assert!((z_ratio - 0.5).abs() < 1e-9);
    }

    #[test]
    fn ideal_isomorphism_examples() {
        let report = RelativizationMap::new(ideal(), qubit())
            .unwrap()
            .check_ideal_isomorphism(&cfg())
            .unwrap();
        assert!(report.homomorphism && report.consistent());
        let zx = relativize(&ideal(), &qubit(), &z().matmul(&x()), 1e-9).unwrap();
        let product = relativize(&ideal(), &qubit(), &z(), 1e-9)
            .unwrap()
            .matmul(&relativize(&ideal(), &qubit(), &x(), 1e-9).unwrap());
        assert!(zx.approx_eq(&product, 1e-12));

        let report = RelativizationMap::new(smeared(), qubit())
            .unwrap()
            .check_ideal_isomorphism(&cfg())
            .unwrap();
        assert!(!report.homomorphism && report.consistent());
        // on matrix units the worst case is |E - E^2| = 3/4 - 9/16
        assert!((report.multiplicativity - 0.1875).abs() < 1e-9);
        assert!(report.multiplicativity_witness.is_some());
        let z_sq = relativize(&smeared(), &qubit(), &z().matmul(&z()), 1e-9).unwrap();
        let rz = relativize(&smeared(), &qubit(), &z(), 1e-9).unwrap();
        assert!(((&z_sq - &rz.matmul(&rz)).operator_norm() - 0.75).abs() < 1e-12);

        let iz = Arc::new(SemiQuantumSystem::from_generators(rep_x(), &[z()], &cfg()).unwrap());
        assert_eq!(
            RelativizationMap::new(ideal(), iz)
                .unwrap()
                .check_ideal_isomorphism(&cfg())
                .unwrap_err(),
            Error::RequiresFullAlgebra
        );
    }

    #[test]
    fn relative_states() {
        let map = RelativizationMap::new(ideal(), qubit()).unwrap();
        let plus = ComplexMatrix::projector(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let rho = (&ket0().scale_real(0.7) + &plus.scale_real(0.3)).scale_real(1.0);
        let joint = ket0().kron(&rho);
        let out = map.relative_state(&joint, &cfg()).unwrap();
        assert!(out.canonical().approx_eq(&rho, 1e-12));

        let joint = eye().scale_real(0.5).kron(&ket0());
        let out = map.relative_state(&joint, &cfg()).unwrap();
        assert!(out.canonical().approx_eq(&eye().scale_real(0.5), 1e-12));

        let out = map.product_relative_state(&plus, &ket0(), &cfg()).unwrap();
        assert!(out.canonical().approx_eq(&eye().scale_real(0.5), 1e-12));

        let smeared_map = RelativizationMap::new(smeared(), qubit()).unwrap();
        let out = smeared_map
            .product_relative_state(&ket0(), &ket0(), &cfg())
            .unwrap();
        let expected = (&ket0().scale_real(0.75) + &ket1().scale_real(0.25)).scale_real(1.0);
        assert!(out.canonical().approx_eq(&expected, 1e-12));
        assert!(map
            .relative_state(&ComplexMatrix::identity(4), &cfg())
            .is_err());
    }

    #[test]
    fn yen_morphism_examples() {
        let id_psi = FrameMorphism::identity(ideal(), &cfg()).unwrap();
        let id_phi = ChannelMap::identity(qubit(), &cfg()).unwrap();
        let y = YenMorphism::new(&id_psi, &id_phi, &cfg()).unwrap();
        for (b, img) in y.source().space().basis().iter().zip(y.images()) {
            assert!(b.approx_eq(img, 1e-12));
        }

        let zz = z().kron(&z());
        let flip = ChannelMap::conjugation(qubit(), qubit(), &x(), &cfg()).unwrap();
        let y = YenMorphism::new(&id_psi, &flip, &cfg()).unwrap();
        assert!(y
            .apply(&zz, 1e-9)
            .unwrap()
            .approx_eq(&zz.scale_real(-1.0), 1e-12));

        let smear = pushforward(
            ideal(),
            smearing_channel(&ideal(), 0.5, &cfg()).unwrap(),
            &cfg(),
        )
        .unwrap();
        assert!(smear.target().same_as(&smeared(), 1e-12));
        let y = YenMorphism::new(&smear, &id_phi, &cfg()).unwrap();
        assert!(y
            .apply(&zz, 1e-9)
            .unwrap()
            .approx_eq(&zz.scale_real(0.5), 1e-12));
    }

    #[test]
    fn ill_defined_induced_map_is_reported() {
        let unlocalized = Arc::new(FrameObservable::unlocalized(rep_x(), &cfg()).unwrap());
        let id_psi = FrameMorphism::identity(unlocalized, &cfg()).unwrap();
        let hadamard = ChannelMap::conjugation(qubit(), qubit(), &h(), &cfg()).unwrap();
        match YenMorphism::new(&id_psi, &hadamard, &cfg()).unwrap_err() {
            Error::IllDefined { witness, norm } => {
                assert!(norm >= 1e-3);
                assert!(
                    witness.approx_eq(&z().scale_real(core::f64::consts::FRAC_1_SQRT_2), 1e-9)
                        || witness
                            .approx_eq(&z().scale_real(-core::f64::consts::FRAC_1_SQRT_2), 1e-9)
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn functor_laws_on_z2_chain() {
        let smear = pushforward(
            ideal(),
            smearing_channel(&ideal(), 0.5, &cfg()).unwrap(),
            &cfg(),
        )
        .unwrap();
        let id_phi = ChannelMap::identity(qubit(), &cfg()).unwrap();
        let flip = ChannelMap::conjugation(qubit(), qubit(), &x(), &cfg()).unwrap();
        let id_smeared = FrameMorphism::identity(smear.target().clone(), &cfg()).unwrap();
        let chain = vec![(smear, id_phi), (id_smeared, flip)];
        let report = check_functor_laws(&chain, &cfg()).unwrap();
        assert!(report.max_deviation() <= 1e-9, "{report:?}");
        assert!(report.comparisons > 0);
    }

    #[test]
    fn tensor_form_and_naturality() {
        let smear = pushforward(
            ideal(),
            smearing_channel(&ideal(), 0.5, &cfg()).unwrap(),
            &cfg(),
        )
        .unwrap();
        let flip = ChannelMap::conjugation(qubit(), qubit(), &x(), &cfg()).unwrap();
        let report = check_equivariant_tensor_form(&smear, &flip, &cfg()).unwrap();
        assert!(report.holds() && report.max_deviation <= 1e-9);

        let hadamard = ChannelMap::conjugation(qubit(), qubit(), &h(), &cfg()).unwrap();
        assert!(matches!(
            check_equivariant_tensor_form(&smear, &hadamard, &cfg()),
            Err(Error::NotEquivariant { element: 1, .. })
        ));

        let report = check_naturality(&ideal(), &flip, &cfg()).unwrap();
        assert!(report.holds());
        let dep = ChannelMap::depolarizing(qubit(), qubit(), 0.4, &cfg()).unwrap();
        let report = check_naturality(&smeared(), &dep, &cfg()).unwrap();
        assert!(report.holds());
        // closed form: Σ_g E(g) ⊗ (λ g.b + (1-λ) tr(b) I/2)
        let b = ComplexMatrix::unit(2, 0, 1);
        let closed = {
            let mut acc = ComplexMatrix::zeros(4);
            for (g, e) in smeared().effects().iter().enumerate() {
                let mut local = rep_x().act(g, &b).scale_real(0.4);
                local.add_scaled(b.trace() * 0.3, &eye());
                acc += &e.kron(&local);
            }
            acc
        };
        let lhs = relativize(&smeared(), &qubit(), &dep.apply(&b, 1e-9).unwrap(), 1e-9).unwrap();
        assert!(lhs.approx_eq(&closed, 1e-12));
    }

    #[test]
    fn external_transforms() {
        let smear = pushforward(
            ideal(),
            smearing_channel(&ideal(), 0.5, &cfg()).unwrap(),
            &cfg(),
        )
        .unwrap();
        let out =
            external_frame_transform(&smear, &qubit(), &ket0(), &ket0(), None, &cfg()).unwrap();
        let expected = (&ket0().scale_real(0.75) + &ket1().scale_real(0.25)).scale_real(1.0);
        assert!(out.target_side.canonical().approx_eq(&expected, 1e-12));
        assert!(out.deviation() <= 1e-12);

        let flip = FrameMorphism::reorientation(ideal(), 1, &cfg()).unwrap();
        let omega = ComplexMatrix::from_real(2, &[0.8, 0.1, 0.1, 0.2]).unwrap();
        let rho = ComplexMatrix::from_real(2, &[0.6, 0.2, 0.2, 0.4]).unwrap();
        let out = external_frame_transform(&flip, &qubit(), &omega, &rho, None, &cfg()).unwrap();
        assert!(out.deviation() <= 1e-12);
        // ψ_* of the reorientation by h is the action of h⁻¹ on frame states
        let h_inv = rep_x().group().inverse(1);
        assert!(out
            .pulled_back_frame_state
            .approx_eq(&rep_x().act(h_inv, &omega), 1e-12));
    }

    #[test]
    fn external_transform_needs_full_frame_algebra() {
        let iz = Arc::new(SemiQuantumSystem::from_generators(rep_x(), &[z()], &cfg()).unwrap());
        let frame =
            Arc::new(FrameObservable::from_seed(rep_x(), &ket0(), Some(iz), &cfg()).unwrap());
        let id = FrameMorphism::identity(frame, &cfg()).unwrap();
        assert_eq!(
            external_frame_transform(&id, &qubit(), &ket0(), &ket0(), None, &cfg()).unwrap_err(),
            Error::RequiresFullAlgebra
        );
        let full_id = ChannelMap::identity(qubit(), &cfg()).unwrap();
        let out = external_frame_transform(&id, &qubit(), &ket0(), &ket0(), Some(&full_id), &cfg())
            .unwrap();
        assert!(out.deviation() <= 1e-12);
    }
}
