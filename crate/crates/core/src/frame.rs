//! Covariant POVMs on a finite group ("frame observables") and the
//! morphisms between them.
//!
//! A POVM is stored on singletons; the effect of a subset is the sum of
//! its singleton effects.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, UnitaryRep};
use crate::linalg::ComplexMatrix;
use crate::system::{same_rep, ChannelMap, EquivarianceReport, SemiQuantumSystem};

#[derive(Debug, Clone)]
pub struct FrameObservable {
    rep: Arc<UnitaryRep>,
    effects: Vec<ComplexMatrix>,
    value_system: Arc<SemiQuantumSystem>,
    is_ideal: bool,
}

impl FrameObservable {
    /// Validates positivity, normalization, covariance
    /// `E(g h) = g.E(h)` and containment in the value system. Without an
    /// explicit value system the full algebra is used.
    pub fn new(
        rep: Arc<UnitaryRep>,
        effects: Vec<ComplexMatrix>,
        value_system: Option<Arc<SemiQuantumSystem>>,
        cfg: &Config,
    ) -> Result<Self> {
        let group = rep.group().clone();
        let d = rep.dim();
        let tol = cfg.tolerance;
        if effects.len() != group.order() {
            return Err(Error::Dimension {
                context: "frame effects",
                expected: group.order(),
                found: effects.len(),
            });
        }
        for e in &effects {
            if e.dim() != d {
                return Err(Error::Dimension {
                    context: "frame effect",
                    expected: d,
                    found: e.dim(),
                });
            }
        }
        for (g, e) in effects.iter().enumerate() {
            if !e.is_psd(tol) {
                return Err(Error::InvalidFrame(format!(
                    "effect {} is not positive semidefinite",
                    group.label(g)
                )));
            }
        }
        let mut total = ComplexMatrix::zeros(d);
        for e in &effects {
            total += e;
        }
        let deviation = total.max_abs_diff(&ComplexMatrix::identity(d));
        if deviation > cfg.scaled(group.order()) {
            return Err(Error::InvalidFrame(format!(
                "effects sum to the identity only up to {deviation:e}"
            )));
        }
        for g in group.elements() {
            for h in group.elements() {
                let lhs = &effects[group.mul(g, h)];
                if !lhs.approx_eq(&rep.act(g, &effects[h]), tol) {
                    return Err(Error::InvalidFrame(format!(
                        "covariance fails at ({}, {})",
                        group.label(g),
                        group.label(h)
                    )));
                }
            }
        }
        let value_system = match value_system {
            Some(v) => {
                if !same_rep(v.rep(), &rep, tol) {
                    return Err(Error::RepMismatch);
                }
                v
            }
            None => Arc::new(SemiQuantumSystem::full(rep.clone(), cfg)),
        };
        for (g, e) in effects.iter().enumerate() {
            if !value_system.contains(e, tol) {
                return Err(Error::InvalidFrame(format!(
                    "effect {} lies outside the value system",
                    group.label(g)
                )));
            }
        }
        let is_ideal = effects.iter().all(|e| e.is_projection(tol));
        Ok(Self {
            rep,
            effects,
            value_system,
            is_ideal,
        })
    }

    /// Principal covariant frame generated by translating one effect:
    /// `E(g) = g.seed`.
    pub fn from_seed(
        rep: Arc<UnitaryRep>,
        seed: &ComplexMatrix,
        value_system: Option<Arc<SemiQuantumSystem>>,
        cfg: &Config,
    ) -> Result<Self> {
        if seed.dim() != rep.dim() {
            return Err(Error::Dimension {
                context: "frame seed",
                expected: rep.dim(),
                found: seed.dim(),
            });
        }
        if !seed.is_psd(cfg.tolerance) {
            return Err(Error::SeedNotPsd);
        }
        let effects: Vec<ComplexMatrix> =
            rep.group().elements().map(|g| rep.act(g, seed)).collect();
        let mut total = ComplexMatrix::zeros(rep.dim());
        for e in &effects {
            total += e;
        }
        let deviation = &total - &ComplexMatrix::identity(rep.dim());
        if deviation.max_abs() > cfg.scaled(rep.group().order()) {
            return Err(Error::SeedNotNormalizing(deviation.operator_norm()));
        }
        Self::new(rep, effects, value_system, cfg)
    }

    /// Regular representation with seed `|e><e|`: the effects are the
    /// diagonal matrix units.
    pub fn canonical_ideal(group: Arc<FiniteGroup>, cfg: &Config) -> Self {
        let e = group.identity();
        let rep = Arc::new(UnitaryRep::regular(group.clone()));
        let seed = ComplexMatrix::unit(group.order(), e, e);
        Self::from_seed(rep, &seed, None, cfg).expect("regular delta seed is a frame")
    }

    /// Seed `I/|G|`: every effect is a multiple of the identity.
    pub fn unlocalized(rep: Arc<UnitaryRep>, cfg: &Config) -> Result<Self> {
        let n = rep.group().order() as f64;
        let seed = ComplexMatrix::identity(rep.dim()).scale_real(1.0 / n);
        Self::from_seed(rep, &seed, None, cfg)
    }

    pub fn rep(&self) -> &Arc<UnitaryRep> {
        &self.rep
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.rep.group()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, g: Element) -> &ComplexMatrix {
        &self.effects[g]
    }

    /// `E(X) = Σ_{g in X} E(g)`.
    pub fn effect_of_set(&self, elements: &[Element]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for &g in elements {
            out += &self.effects[g];
        }
        out
    }

    pub fn value_system(&self) -> &Arc<SemiQuantumSystem> {
        &self.value_system
    }

    pub fn is_ideal(&self) -> bool {
        self.is_ideal
    }

    /// `E(g) E(h) = 0` for all `g != h`.
    pub fn effects_mutually_orthogonal(&self, tol: f64) -> bool {
        let n = self.effects.len();
        (0..n).all(|g| {
            (0..n).all(|h| g == h || self.effects[g].matmul(&self.effects[h]).max_abs() <= tol)
        })
    }

    /// Born rule `p[g] = tr[ω E(g)]`.
    pub fn born_measure(&self, omega: &ComplexMatrix, cfg: &Config) -> Result<Vec<f64>> {
        if omega.dim() != self.dim() {
            return Err(Error::Dimension {
                context: "frame state",
                expected: self.dim(),
                found: omega.dim(),
            });
        }
        omega.check_state(cfg.tolerance)?;
        Ok(self
            .effects
            .iter()
            .map(|e| omega.matmul(e).trace().re)
            .collect())
    }

    pub fn same_as(&self, other: &Self, tol: f64) -> bool {
        same_rep(&self.rep, &other.rep, tol)
            && self
                .effects
                .iter()
                .zip(&other.effects)
                .all(|(a, b)| a.approx_eq(b, tol))
            && self.value_system.same_as(&other.value_system, tol)
    }
}

/// Clamps entries to `[0, 1]` and renormalizes to sum one.
pub fn clamp_to_simplex(p: &[f64]) -> Vec<f64> {
    let clamped: Vec<f64> = p.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    let total: f64 = clamped.iter().sum();
    if total > 0.0 {
        clamped.iter().map(|x| x / total).collect()
    } else {
        clamped
    }
}

/// A channel between value systems through which the target frame
/// observable factors: `E'(g) = ψ(E(g))`.
#[derive(Debug, Clone)]
pub struct FrameMorphism {
    source: Arc<FrameObservable>,
    target: Arc<FrameObservable>,
    channel: ChannelMap,
    full_equivariance: EquivarianceReport,
}

impl FrameMorphism {
    pub fn new(
        source: Arc<FrameObservable>,
        target: Arc<FrameObservable>,
        channel: ChannelMap,
        cfg: &Config,
    ) -> Result<Self> {
        let tol = cfg.tolerance;
        if !source.group().same_group(target.group()) {
            return Err(Error::GroupMismatch);
        }
        if !channel.source().same_as(source.value_system(), tol) {
            return Err(Error::ObjectMismatch(
                "channel source is not the source frame's value system",
            ));
        }
        if !channel.target().same_as(target.value_system(), tol) {
            return Err(Error::ObjectMismatch(
                "channel target is not the target frame's value system",
            ));
        }
        let images: Vec<ComplexMatrix> = source
            .effects()
            .iter()
            .map(|e| channel.apply_unchecked(e))
            .collect();
        for (g, (image, expected)) in images.iter().zip(target.effects()).enumerate() {
            if !image.approx_eq(expected, tol) {
                return Err(Error::FactorizationFails(g));
            }
        }
        // ψ(g.E(h)) = g.ψ(E(h)) on the effect span
        let (rs, rt) = (source.rep(), target.rep());
        for g in source.group().elements() {
            for (h, e) in source.effects().iter().enumerate() {
                let lhs = channel.apply_unchecked(&rs.act(g, e));
                let rhs = rt.act(g, &images[h]);
                if !lhs.approx_eq(&rhs, tol) {
                    return Err(Error::EffectSpanNotEquivariant(g));
                }
            }
        }
        let full_equivariance = channel.equivariance(tol)?;
        Ok(Self {
            source,
            target,
            channel,
            full_equivariance,
        })
    }

    pub fn identity(frame: Arc<FrameObservable>, cfg: &Config) -> Result<Self> {
        let channel = ChannelMap::identity(frame.value_system().clone(), cfg)?;
        Self::new(frame.clone(), frame, channel, cfg)
    }

    /// Reorientation `A -> h.A`, a morphism onto the frame with effects
    /// `h.E(g) = E(h g)`. That family is covariant when `h` is central.
    pub fn reorientation(frame: Arc<FrameObservable>, h: Element, cfg: &Config) -> Result<Self> {
        let rep = frame.rep().clone();
        if h >= rep.group().order() {
            return Err(Error::Dimension {
                context: "group element",
                expected: rep.group().order(),
                found: h,
            });
        }
        let effects = frame.effects().iter().map(|e| rep.act(h, e)).collect();
        let target = FrameObservable::new(
            rep.clone(),
            effects,
            Some(frame.value_system().clone()),
            cfg,
        )
        .map_err(|err| match err {
            Error::InvalidFrame(_) => Error::NotCentral(h),
            other => other,
        })?;
        let vs = frame.value_system().clone();
        let u = rep.matrix(h).clone();
        let channel = ChannelMap::from_fn(vs.clone(), vs, |a| u.conjugate(a), cfg)?;
        Self::new(frame, Arc::new(target), channel, cfg)
    }

    pub fn source(&self) -> &Arc<FrameObservable> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FrameObservable> {
        &self.target
    }

    pub fn channel(&self) -> &ChannelMap {
        &self.channel
    }

    /// Equivariance of the channel on the whole value system (the effect
    /// span is always checked at construction).
    pub fn full_equivariance(&self) -> EquivarianceReport {
        self.full_equivariance
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FrameMorphism, cfg: &Config) -> Result<FrameMorphism> {
        if !self.target.same_as(&next.source, cfg.tolerance) {
            return Err(Error::ObjectMismatch(
                "morphism target differs from next source",
            ));
        }
        let channel = self.channel.then(&next.channel, cfg)?;
        Self::new(self.source.clone(), next.target.clone(), channel, cfg)
    }
}

/// Outcome of testing whether `A -> t A t^†` is an isomorphism of frames.
#[derive(Debug, Clone, PartialEq)]
pub struct IsomorphismReport {
    pub forward: bool,
    pub backward: bool,
    pub reason: Option<Error>,
}

impl IsomorphismReport {
    pub fn is_isomorphism(&self) -> bool {
        self.forward && self.backward
    }
}

/// Checks that conjugation by the unitary `t` is a frame morphism
/// `first -> second` whose inverse (conjugation by `t^†`) is a frame
/// morphism back. Verification only.
pub fn frames_isomorphic_by(
    first: &Arc<FrameObservable>,
    second: &Arc<FrameObservable>,
    t: &ComplexMatrix,
    cfg: &Config,
) -> Result<IsomorphismReport> {
    let dev = t.unitarity_deviation();
    if t.dim() != first.dim() || t.dim() != second.dim() {
        return Err(Error::Dimension {
            context: "frame isomorphism unitary",
            expected: first.dim(),
            found: t.dim(),
        });
    }
    if dev > cfg.tolerance {
        return Err(Error::NotUnitary(dev));
    }
    let attempt = |from: &Arc<FrameObservable>, to: &Arc<FrameObservable>, u: &ComplexMatrix| {
        ChannelMap::conjugation(
            from.value_system().clone(),
            to.value_system().clone(),
            u,
            cfg,
        )
        .and_then(|ch| FrameMorphism::new(from.clone(), to.clone(), ch, cfg))
    };
    let forward = attempt(first, second, t);
    let backward = attempt(second, first, &t.adjoint());
    let reason = forward.as_ref().err().or(backward.as_ref().err()).cloned();
    Ok(IsomorphismReport {
        forward: forward.is_ok(),
        backward: backward.is_ok(),
        reason,
    })
}

/// Smearing channel `A -> (1 - λ) A + λ tr(A)/d I` on a frame's value
/// system, which must be a full algebra.
pub fn smearing_channel(frame: &FrameObservable, lambda: f64, cfg: &Config) -> Result<ChannelMap> {
    let vs = frame.value_system().clone();
    ChannelMap::depolarizing(vs.clone(), vs, 1.0 - lambda, cfg)
}

/// The frame obtained by pushing `frame` through `channel` together with
/// the morphism onto it.
pub fn pushforward(
    frame: Arc<FrameObservable>,
    channel: ChannelMap,
    cfg: &Config,
) -> Result<FrameMorphism> {
    let effects = frame
        .effects()
        .iter()
        .map(|e| channel.apply_unchecked(e))
        .collect();
    let target = FrameObservable::new(
        channel.target().rep().clone(),
        effects,
        Some(channel.target().clone()),
        cfg,
    )?;
    FrameMorphism::new(frame, Arc::new(target), channel, cfg)
}
