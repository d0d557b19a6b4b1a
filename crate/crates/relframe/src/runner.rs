//! Executes scenario tasks in order and collects one entry per task.

use std::time::{Duration, Instant};

use relframe_core::relativization::{
    check_equivariant_tensor_form, check_functor_laws, check_naturality, external_frame_transform,
    relativize, ComparisonReport,
};
use relframe_core::sampling::Sampler;
use relframe_core::{
    ComplexMatrix, Config, Error as CoreError, RelativeSubspace, RelativizationMap, YenMorphism,
};

use crate::scenario::{ScenarioSpec, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub label: String,
    pub matrix: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskEntry {
    pub id: String,
    pub kind: String,
    pub status: Status,
    pub max_deviation: Option<f64>,
    pub witnesses: Vec<Witness>,
    pub message: Option<String>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub entries: Vec<TaskEntry>,
    pub tolerance: f64,
    pub seed: u64,
    pub samples: usize,
}

impl RunReport {
    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for e in &self.entries {
            match e.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Error => s.error += 1,
            }
        }
        s
    }

    /// 0 when every task passed, 1 on any failure, 2 on any error.
    pub fn exit_code(&self) -> i32 {
        match self.entries.iter().map(|e| e.status).max() {
            None | Some(Status::Pass) => 0,
            Some(Status::Fail) => 1,
            Some(Status::Error) => 2,
        }
    }
}

struct Outcome {
    status: Status,
    max_deviation: Option<f64>,
    witnesses: Vec<Witness>,
    message: Option<String>,
}

impl Outcome {
    fn judged(deviation: f64, tol: f64) -> Self {
        Self {
            status: if deviation <= tol {
                Status::Pass
            } else {
                Status::Fail
            },
            max_deviation: Some(deviation),
            witnesses: Vec::new(),
            message: None,
        }
    }

    fn witness(mut self, label: impl Into<String>, matrix: ComplexMatrix) -> Self {
        self.witnesses.push(Witness {
            label: label.into(),
            matrix,
        });
        self
    }

    fn message(mut self, m: impl Into<String>) -> Self {
        self.message = Some(m.into());
        self
    }

    fn fail_if(mut self, failed: bool) -> Self {
        if failed {
            self.status = Status::Fail;
        }
        self
    }
}

pub fn run_scenario(spec: &ScenarioSpec) -> RunReport {
    let cfg = &spec.config;
    let entries = spec
        .tasks
        .iter()
        .map(|t| {
            let start = Instant::now();
            let outcome = run_task(&t.task, cfg).unwrap_or_else(|e| from_error(&t.task, e));
            TaskEntry {
                id: t.id.clone(),
                kind: t.task.kind().to_owned(),
                status: outcome.status,
                max_deviation: outcome.max_deviation,
                witnesses: outcome.witnesses,
                message: outcome.message,
                wall_time: start.elapsed(),
            }
        })
        .collect();
    RunReport {
        entries,
        tolerance: cfg.tolerance,
        seed: cfg.seed,
        samples: cfg.samples,
    }
}

/// Ill-defined induced maps and non-equivariant channels are failed
/// checks; anything else is an execution error.
fn from_error(task: &Task, e: CoreError) -> Outcome {
    let message = e.to_string();
    match e {
        CoreError::IllDefined { witness, norm } => Outcome {
            status: Status::Fail,
            max_deviation: Some(norm),
            witnesses: vec![Witness {
                label: "kernel_element".into(),
                matrix: witness,
            }],
            message: Some(message),
        },
        CoreError::NotEquivariant {
            basis_index,
            deviation,
            ..
        } => {
            let phi = match task {
                Task::Naturality { phi, .. } | Task::TensorForm { phi, .. } => Some(phi),
                _ => None,
            };
            Outcome {
                status: Status::Fail,
                max_deviation: Some(deviation),
                witnesses: phi
                    .map(|p| Witness {
                        label: "non_equivariant_input".into(),
                        matrix: p.source().basis()[basis_index].clone(),
                    })
                    .into_iter()
                    .collect(),
                message: Some(message),
            }
        }
        _ => Outcome {
            status: Status::Error,
            max_deviation: None,
            witnesses: Vec::new(),
            message: Some(message),
        },
    }
}

fn compared(report: &ComparisonReport, inputs: &[ComplexMatrix], tol: f64) -> Outcome {
    let out = Outcome::judged(report.max_deviation, tol);
    match report.witness {
        Some(k) => out.witness("input", inputs[k].clone()),
        None => out,
    }
}

fn run_task(task: &Task, cfg: &Config) -> Result<Outcome, CoreError> {
    let tol = cfg.tolerance;
    Ok(match task {
        Task::Relativize {
            frame,
            system,
            operator,
            expect,
        } => {
            let image = relativize(frame, system, operator, tol)?;
            let joint = frame.rep().tensor(system.rep())?;
            let invariance = joint
                .matrices()
                .iter()
                .map(|u| image.commutator(u).max_abs())
                .fold(0.0, f64::max);
            let diff = expect.as_ref().map_or(0.0, |e| image.max_abs_diff(e));
            Outcome::judged(invariance.max(diff), tol).witness("image", image)
        }
        Task::RelativeSubspace {
            frame,
            system,
            expect_dim,
            expect_kernel_dim,
        } => {
            let rel = RelativeSubspace::new(frame.clone(), system.clone(), cfg)?;
            let (dim, kernel) = (rel.dim(), rel.kernel().dim());
            let mismatch = expect_dim.is_some_and(|d| d != dim)
                || expect_kernel_dim.is_some_and(|k| k != kernel)
                || dim + kernel != system.dim();
            let mut out = Outcome::judged(rel.invariance_deviation(), tol)
                .fail_if(mismatch)
                .message(format!("dim {dim}, kernel dim {kernel}"));
            for (i, k) in rel.kernel().basis().iter().enumerate() {
                out = out.witness(format!("kernel[{i}]"), k.clone());
            }
            out
        }
        Task::YenMorphism {
            psi,
            phi,
            input,
            expect,
        } => {
            let y = YenMorphism::new(psi, phi, cfg)?;
            let mut out = Outcome::judged(0.0, tol).message(format!(
                "dim {} -> dim {}",
                y.source().dim(),
                y.target().dim()
            ));
            if let Some(x) = input {
                let image = y.apply(x, tol)?;
                let diff = expect.as_ref().map_or(0.0, |e| image.max_abs_diff(e));
                out = Outcome::judged(diff, tol).witness("image", image);
            }
            out
        }
        Task::ExternalTransform {
            psi,
            system,
            frame_state,
            state,
            extension,
            expect,
        } => {
            let t = external_frame_transform(
                psi,
                system,
                frame_state,
                state,
                extension.as_deref(),
                cfg,
            )?;
            let diff = expect
                .as_ref()
                .map_or(0.0, |e| t.target_side.canonical().max_abs_diff(e));
            Outcome::judged(t.deviation().max(diff), tol)
                .witness("target_side", t.target_side.canonical().clone())
                .witness("source_side", t.source_side.canonical().clone())
        }
        Task::ChannelAxioms { frame, system } => {
            let map = RelativizationMap::new(frame.clone(), system.clone())?;
            let r = map.check_channel_axioms(cfg);
            let strict = if r.strict_contraction_witness.is_some() {
                "strict"
            } else {
                "not strict"
            };
            let mut out = Outcome::judged(r.max_deviation(), tol)
                .fail_if(!r.passed())
                .message(format!(
                    "{} probes, norm ratio in [{:.6}, {:.6}], contraction {strict}",
                    r.probes, r.min_norm_ratio, r.max_norm_ratio
                ));
            if let Some(w) = r.positivity_witness {
                out = out.witness("positivity", w);
            }
            out
        }
        Task::IdealIsomorphism { frame, system } => {
            let map = RelativizationMap::new(frame.clone(), system.clone())?;
            let r = map.check_ideal_isomorphism(cfg)?;
            let yes_no = |b: bool| if b { "yes" } else { "no" };
            let mut out = Outcome {
                status: if r.consistent() {
                    Status::Pass
                } else {
                    Status::Fail
                },
                max_deviation: Some(r.max_deviation()),
                witnesses: Vec::new(),
                message: Some(format!(
                    "frame ideal: {}, *-homomorphism: {}",
                    yes_no(r.frame_is_ideal),
                    yes_no(r.homomorphism)
                )),
            };
            if let Some((i, j)) = r.multiplicativity_witness {
                out = out
                    .witness("left", system.basis()[i].clone())
                    .witness("right", system.basis()[j].clone());
            }
            out
        }
        Task::FunctorLaws { chain } => {
            let r = check_functor_laws(chain, cfg)?;
            Outcome::judged(r.max_deviation(), tol)
                .message(format!("{} comparisons", r.comparisons))
        }
        Task::Naturality { frame, phi } => {
            let r = check_naturality(frame, phi, cfg)?;
            compared(&r, phi.source().basis(), tol)
        }
        Task::TensorForm { psi, phi } => {
            let r = check_equivariant_tensor_form(psi, phi, cfg)?;
            let y = YenMorphism::new(psi, phi, cfg)?;
            compared(&r, y.source().space().basis(), tol)
        }
        Task::Duality {
            frame,
            system,
            pairs,
        } => duality(
            &RelativizationMap::new(frame.clone(), system.clone())?,
            *pairs,
            cfg,
        )?,
    })
}

fn duality(map: &RelativizationMap, pairs: usize, cfg: &Config) -> Result<Outcome, CoreError> {
    let tol = cfg.tolerance;
    let mut sampler = Sampler::new(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let t = sampler.matrix(map.joint_dim());
        let a = sampler.element(map.system().space());
        let lhs = map.predual(&t)?.matmul(&a).trace();
        let rhs = t.matmul(&map.apply_unchecked(&a)).trace();
        let scale = t.max_abs().max(1.0) * a.max_abs().max(1.0) * map.joint_dim() as f64;
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    let mut mismatched = Vec::new();
    for (name, sys) in [
        ("system", map.system()),
        ("frame values", map.frame().value_system()),
    ] {
        let q = sys.quotient_dimension(tol);
        if q != sys.dim() {
            mismatched.push(format!("{name}: quotient {q} vs span {}", sys.dim()));
        }
    }
    let out = Outcome::judged(worst, tol).message(format!("{pairs} pairs"));
    Ok(if mismatched.is_empty() {
        out
    } else {
        out.fail_if(true).message(mismatched.join("; "))
    })
}
