//! Scenario documents: a JSON file declaring a group, representations,
//! systems, frames, channels and frame morphisms by name, followed by an
//! ordered task list.
//!
//! [`ScenarioDoc`] is the declarative form and round-trips through
//! serde. [`ScenarioSpec`] pairs it with the resolved core objects.

use std::sync::Arc;

use indexmap::IndexMap;
use relframe_core::frame::pushforward;
use relframe_core::{
    ChannelMap, ComplexMatrix, Config, Error as CoreError, FiniteGroup, FrameMorphism,
    FrameObservable, SemiQuantumSystem, UnitaryRep, C64,
};
use serde::{Deserialize, Serialize};

/// Row-major rows of `[re, im]` pairs.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub group: GroupDoc,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub representations: IndexMap<String, RepDoc>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub systems: IndexMap<String, SystemDoc>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub frames: IndexMap<String, FrameDoc>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub channels: IndexMap<String, ChannelDoc>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub frame_morphisms: IndexMap<String, MorphismDoc>,
    pub tasks: Vec<TaskDoc>,
    #[serde(default)]
    pub options: OptionsDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupDoc {
    Cyclic {
        order: usize,
    },
    Symmetric {
        n: usize,
    },
    Dihedral {
        n: usize,
    },
    Table {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepDoc {
    Regular,
    Trivial { dim: usize },
    Matrices { matrices: Vec<MatrixDoc> },
    Tensor { factors: [String; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedBasis {
    Full,
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisDoc {
    Named(NamedBasis),
    Generators(Vec<MatrixDoc>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub rep: String,
    pub basis: BasisDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameDoc {
    Seed {
        rep: String,
        seed: MatrixDoc,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value_system: Option<String>,
    },
    Effects {
        rep: String,
        effects: Vec<MatrixDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value_system: Option<String>,
    },
    CanonicalIdeal,
    Unlocalized {
        rep: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDoc {
    pub source: String,
    pub target: String,
    #[serde(flatten)]
    pub kind: ChannelKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelKind {
    Identity,
    ConjugateUnitary { unitary: MatrixDoc },
    ConjugateElement { element: ElementRef },
    Kraus { operators: Vec<MatrixDoc> },
    Depolarizing { keep: f64 },
    Ampliation,
    MatrixImages { pairs: Vec<[MatrixDoc; 2]> },
}

/// A frame by name, or the target of an earlier frame morphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrameRef {
    Name(String),
    TargetOf { target_of: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MorphismDoc {
    Identity {
        source: FrameRef,
    },
    Pushforward {
        source: FrameRef,
        channel: String,
    },
    Between {
        source: FrameRef,
        target: FrameRef,
        channel: String,
    },
    Reorient {
        source: FrameRef,
        element: ElementRef,
    },
    Compose {
        first: String,
        second: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativizeDoc {
    pub frame: FrameRef,
    pub system: String,
    pub operator: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeSubspaceDoc {
    pub frame: FrameRef,
    pub system: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_kernel_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YenMorphismDoc {
    pub psi: String,
    pub phi: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalTransformDoc {
    pub psi: String,
    pub system: String,
    pub frame_state: MatrixDoc,
    pub state: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<MatrixDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    ChannelAxioms,
    IdealIsomorphism,
    FunctorLaws,
    Naturality,
    TensorForm,
    Duality,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ChannelAxioms => "channel_axioms",
            Self::IdealIsomorphism => "ideal_isomorphism",
            Self::FunctorLaws => "functor_laws",
            Self::Naturality => "naturality",
            Self::TensorForm => "tensor_form",
            Self::Duality => "duality",
        }
    }
}

/// One task. Exactly one of the stanza fields is set; `check` tasks take
/// their parameters from the sibling fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relativize: Option<RelativizeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_subspace: Option<RelativeSubspaceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yen_morphism: Option<YenMorphismDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_transform: Option<ExternalTransformDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}{}: {message}", key.as_ref().map(|k| format!(" (key `{k}`)")).unwrap_or_default())]
    Syntax {
        line: usize,
        column: usize,
        key: Option<String>,
        message: String,
    },
    #[error("unknown reference `{0}`")]
    UnknownReference(String),
    #[error("dimension mismatch in {0}")]
    DimensionMismatch(String),
    #[error("validation failed for {context}: {source}")]
    Validation {
        context: String,
        #[source]
        source: CoreError,
    },
}

type Parsed<T> = Result<T, ScenarioError>;

/// Values that take precedence over the scenario's options block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    /// Replaces the built-in default tolerance when neither the command
    /// line nor the scenario sets one.
    pub default_tolerance: Option<f64>,
}

/// A task with its references resolved.
#[derive(Debug, Clone)]
pub enum Task {
    Relativize {
        frame: Arc<FrameObservable>,
        system: Arc<SemiQuantumSystem>,
        operator: ComplexMatrix,
        expect: Option<ComplexMatrix>,
    },
    RelativeSubspace {
        frame: Arc<FrameObservable>,
        system: Arc<SemiQuantumSystem>,
        expect_dim: Option<usize>,
        expect_kernel_dim: Option<usize>,
    },
    YenMorphism {
        psi: Arc<FrameMorphism>,
        phi: Arc<ChannelMap>,
        input: Option<ComplexMatrix>,
        expect: Option<ComplexMatrix>,
    },
    ExternalTransform {
        psi: Arc<FrameMorphism>,
        system: Arc<SemiQuantumSystem>,
        frame_state: ComplexMatrix,
        state: ComplexMatrix,
        extension: Option<Arc<ChannelMap>>,
        expect: Option<ComplexMatrix>,
    },
    ChannelAxioms {
        frame: Arc<FrameObservable>,
        system: Arc<SemiQuantumSystem>,
    },
    IdealIsomorphism {
        frame: Arc<FrameObservable>,
        system: Arc<SemiQuantumSystem>,
    },
    FunctorLaws {
        chain: Vec<(FrameMorphism, ChannelMap)>,
    },
    Naturality {
        frame: Arc<FrameObservable>,
        phi: Arc<ChannelMap>,
    },
    TensorForm {
        psi: Arc<FrameMorphism>,
        phi: Arc<ChannelMap>,
    },
    Duality {
        frame: Arc<FrameObservable>,
        system: Arc<SemiQuantumSystem>,
        pairs: usize,
    },
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Relativize { .. } => "relativize",
            Self::RelativeSubspace { .. } => "relative_subspace",
            Self::YenMorphism { .. } => "yen_morphism",
            Self::ExternalTransform { .. } => "external_transform",
            Self::ChannelAxioms { .. } => CheckKind::ChannelAxioms.name(),
            Self::IdealIsomorphism { .. } => CheckKind::IdealIsomorphism.name(),
            Self::FunctorLaws { .. } => CheckKind::FunctorLaws.name(),
            Self::Naturality { .. } => CheckKind::Naturality.name(),
            Self::TensorForm { .. } => CheckKind::TensorForm.name(),
            Self::Duality { .. } => CheckKind::Duality.name(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedTask {
    pub id: String,
    pub task: Task,
}

/// A parsed and fully resolved scenario.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub doc: ScenarioDoc,
    pub config: Config,
    pub group: Arc<FiniteGroup>,
    pub representations: IndexMap<String, Arc<UnitaryRep>>,
    pub systems: IndexMap<String, Arc<SemiQuantumSystem>>,
    pub frames: IndexMap<String, Arc<FrameObservable>>,
    pub channels: IndexMap<String, Arc<ChannelMap>>,
    pub frame_morphisms: IndexMap<String, Arc<FrameMorphism>>,
    pub tasks: Vec<NamedTask>,
}

impl ScenarioSpec {
    /// Canonical serialization of the declarative document.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc).expect("documents serialize")
    }
}

pub fn parse_scenario(text: &str) -> Parsed<ScenarioSpec> {
    parse_scenario_with(text, &Overrides::default())
}

pub fn parse_scenario_with(text: &str, overrides: &Overrides) -> Parsed<ScenarioSpec> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| syntax_error(text, &e))?;
    resolve(doc, overrides).map_err(|e| locate(text, e))
}

fn syntax_error(text: &str, e: &serde_json::Error) -> ScenarioError {
    let message = e.to_string();
    // serde names the offending field in backticks
    let key = message.split('`').nth(1).map(str::to_owned);
    let (mut line, mut column) = (e.line(), e.column());
    if line == 0 {
        if let Some(k) = &key {
            (line, column) = position_of_key(text, k).unwrap_or((0, 0));
        }
    }
    let message = message
        .split(" at line ")
        .next()
        .unwrap_or_default()
        .to_owned();
    ScenarioError::Syntax {
        line,
        column,
        key,
        message,
    }
}

fn position_of_key(text: &str, key: &str) -> Option<(usize, usize)> {
    let needle = format!("\"{key}\"");
    let offset = text.find(&needle)?;
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    Some((line, column))
}

/// Attaches a position to structural errors that name a key.
fn locate(text: &str, e: ScenarioError) -> ScenarioError {
    match e {
        ScenarioError::Syntax {
            line: 0,
            key: Some(key),
            message,
            ..
        } => {
            let (line, column) = position_of_key(text, &key).unwrap_or((0, 0));
            ScenarioError::Syntax {
                line,
                column,
                key: Some(key),
                message,
            }
        }
        other => other,
    }
}

fn structural(key: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax {
        line: 0,
        column: 0,
        key: Some(key.to_owned()),
        message: message.into(),
    }
}

fn validation(context: impl Into<String>) -> impl FnOnce(CoreError) -> ScenarioError {
    let context = context.into();
    move |source| match source {
        CoreError::Dimension { .. } => {
            ScenarioError::DimensionMismatch(format!("{context}: {source}"))
        }
        source => ScenarioError::Validation { context, source },
    }
}

pub fn matrix_from_doc(doc: &MatrixDoc, context: &str) -> Parsed<ComplexMatrix> {
    let n = doc.len();
    if n == 0 || doc.iter().any(|row| row.len() != n) {
        return Err(ScenarioError::DimensionMismatch(format!(
            "{context}: matrix literal is not square"
        )));
    }
    let data = doc
        .iter()
        .flat_map(|row| row.iter().map(|[re, im]| C64::new(*re, *im)))
        .collect();
    ComplexMatrix::new(n, data).map_err(validation(context))
}

pub fn matrix_to_doc(m: &ComplexMatrix) -> MatrixDoc {
    let d = m.dim();
    (0..d)
        .map(|i| (0..d).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn lookup<'a, T>(map: &'a IndexMap<String, T>, name: &str) -> Parsed<&'a T> {
    map.get(name)
        .ok_or_else(|| ScenarioError::UnknownReference(name.to_owned()))
}

fn element(group: &FiniteGroup, e: &ElementRef) -> Parsed<usize> {
    match e {
        ElementRef::Index(i) if *i < group.order() => Ok(*i),
        ElementRef::Index(i) => Err(ScenarioError::UnknownReference(i.to_string())),
        ElementRef::Label(l) => group
            .element_by_label(l)
            .ok_or_else(|| ScenarioError::UnknownReference(l.clone())),
    }
}

struct Resolver {
    cfg: Config,
    group: Arc<FiniteGroup>,
    reps: IndexMap<String, Arc<UnitaryRep>>,
    systems: IndexMap<String, Arc<SemiQuantumSystem>>,
    frames: IndexMap<String, Arc<FrameObservable>>,
    channels: IndexMap<String, Arc<ChannelMap>>,
    morphisms: IndexMap<String, Arc<FrameMorphism>>,
}

impl Resolver {
    fn frame(&self, r: &FrameRef) -> Parsed<Arc<FrameObservable>> {
        match r {
            FrameRef::Name(n) => lookup(&self.frames, n).cloned(),
            FrameRef::TargetOf { target_of } => {
                Ok(lookup(&self.morphisms, target_of)?.target().clone())
            }
        }
    }

    fn system(&self, name: &str) -> Parsed<Arc<SemiQuantumSystem>> {
        lookup(&self.systems, name).cloned()
    }

    fn channel(&self, name: &str) -> Parsed<Arc<ChannelMap>> {
        lookup(&self.channels, name).cloned()
    }

    fn morphism(&self, name: &str) -> Parsed<Arc<FrameMorphism>> {
        lookup(&self.morphisms, name).cloned()
    }

    fn rep(&mut self, name: &str, doc: &RepDoc) -> Parsed<Arc<UnitaryRep>> {
        let context = format!("representations.{name}");
        let rep = match doc {
            RepDoc::Regular => UnitaryRep::regular(self.group.clone()),
            RepDoc::Trivial { dim } => UnitaryRep::trivial(self.group.clone(), *dim),
            RepDoc::Matrices { matrices } => {
                let ms = matrices
                    .iter()
                    .map(|m| matrix_from_doc(m, &context))
                    .collect::<Parsed<Vec<_>>>()?;
                UnitaryRep::new(self.group.clone(), ms, &self.cfg).map_err(validation(&context))?
            }
            RepDoc::Tensor { factors: [a, b] } => {
                let (a, b) = (lookup(&self.reps, a)?, lookup(&self.reps, b)?);
                a.tensor(b).map_err(validation(&context))?
            }
        };
        Ok(Arc::new(rep))
    }

    fn system_from_doc(&self, name: &str, doc: &SystemDoc) -> Parsed<Arc<SemiQuantumSystem>> {
        let context = format!("systems.{name}");
        let rep = lookup(&self.reps, &doc.rep)?.clone();
        let sys = match &doc.basis {
            BasisDoc::Named(NamedBasis::Full) => SemiQuantumSystem::full(rep, &self.cfg),
            BasisDoc::Named(NamedBasis::Invariant) => {
                SemiQuantumSystem::invariant_subalgebra(rep, &self.cfg)
                    .map_err(validation(&context))?
            }
            BasisDoc::Generators(gens) => {
                let gens = gens
                    .iter()
                    .map(|m| matrix_from_doc(m, &context))
                    .collect::<Parsed<Vec<_>>>()?;
                SemiQuantumSystem::from_generators(rep, &gens, &self.cfg)
                    .map_err(validation(&context))?
            }
        };
        Ok(Arc::new(sys))
    }

    fn frame_from_doc(&self, name: &str, doc: &FrameDoc) -> Parsed<Arc<FrameObservable>> {
        let context = format!("frames.{name}");
        let value = |vs: &Option<String>| vs.as_deref().map(|n| self.system(n)).transpose();
        let frame = match doc {
            FrameDoc::Seed {
                rep,
                seed,
                value_system,
            } => {
                let rep = lookup(&self.reps, rep)?.clone();
                let seed = matrix_from_doc(seed, &context)?;
                FrameObservable::from_seed(rep, &seed, value(value_system)?, &self.cfg)
            }
            FrameDoc::Effects {
                rep,
                effects,
                value_system,
            } => {
                let rep = lookup(&self.reps, rep)?.clone();
                let effects = effects
                    .iter()
                    .map(|m| matrix_from_doc(m, &context))
                    .collect::<Parsed<Vec<_>>>()?;
                FrameObservable::new(rep, effects, value(value_system)?, &self.cfg)
            }
            FrameDoc::CanonicalIdeal => Ok(FrameObservable::canonical_ideal(
                self.group.clone(),
                &self.cfg,
            )),
            FrameDoc::Unlocalized { rep } => {
                FrameObservable::unlocalized(lookup(&self.reps, rep)?.clone(), &self.cfg)
            }
        };
        Ok(Arc::new(frame.map_err(validation(&context))?))
    }

    fn channel_from_doc(&self, name: &str, doc: &ChannelDoc) -> Parsed<Arc<ChannelMap>> {
        let context = format!("channels.{name}");
        let (source, target) = (self.system(&doc.source)?, self.system(&doc.target)?);
        let cfg = &self.cfg;
        let channel = match &doc.kind {
            ChannelKind::Identity => {
                if !source.same_as(&target, cfg.tolerance) {
                    return Err(structural(
                        "target",
                        format!("{context}: identity needs equal source and target"),
                    ));
                }
                ChannelMap::identity(source, cfg)
            }
            ChannelKind::ConjugateUnitary { unitary } => {
                let u = matrix_from_doc(unitary, &context)?;
                ChannelMap::conjugation(source, target, &u, cfg)
            }
            ChannelKind::ConjugateElement { element: e } => {
                let g = element(&self.group, e)?;
                let u = source.rep().matrix(g).clone();
                ChannelMap::conjugation(source, target, &u, cfg)
            }
            ChannelKind::Kraus { operators } => {
                let ops = operators
                    .iter()
                    .map(|m| matrix_from_doc(m, &context))
                    .collect::<Parsed<Vec<_>>>()?;
                ChannelMap::kraus(source, target, &ops, cfg)
            }
            ChannelKind::Depolarizing { keep } => {
                ChannelMap::depolarizing(source, target, *keep, cfg)
            }
            ChannelKind::Ampliation => ChannelMap::ampliation(source, target, cfg),
            ChannelKind::MatrixImages { pairs } => {
                let pairs = pairs
                    .iter()
                    .map(|[a, b]| {
                        Ok((matrix_from_doc(a, &context)?, matrix_from_doc(b, &context)?))
                    })
                    .collect::<Parsed<Vec<_>>>()?;
                ChannelMap::from_pairs(source, target, &pairs, cfg)
            }
        };
        Ok(Arc::new(channel.map_err(validation(&context))?))
    }

    fn morphism_from_doc(&self, name: &str, doc: &MorphismDoc) -> Parsed<Arc<FrameMorphism>> {
        let context = format!("frame_morphisms.{name}");
        let cfg = &self.cfg;
        let morphism = match doc {
            MorphismDoc::Identity { source } => FrameMorphism::identity(self.frame(source)?, cfg),
            MorphismDoc::Pushforward { source, channel } => {
                pushforward(self.frame(source)?, (*self.channel(channel)?).clone(), cfg)
            }
            MorphismDoc::Between {
                source,
                target,
                channel,
            } => FrameMorphism::new(
                self.frame(source)?,
                self.frame(target)?,
                (*self.channel(channel)?).clone(),
                cfg,
            ),
            MorphismDoc::Reorient { source, element: e } => {
                FrameMorphism::reorientation(self.frame(source)?, element(&self.group, e)?, cfg)
            }
            MorphismDoc::Compose { first, second } => {
                self.morphism(first)?.then(&*self.morphism(second)?, cfg)
            }
        };
        Ok(Arc::new(morphism.map_err(validation(&context))?))
    }

    fn task(&self, index: usize, doc: &TaskDoc) -> Parsed<NamedTask> {
        let id = doc
            .id
            .clone()
            .unwrap_or_else(|| format!("task-{}", index + 1));
        let context = format!("tasks.{id}");
        let stanzas = [
            doc.relativize.is_some(),
            doc.relative_subspace.is_some(),
            doc.yen_morphism.is_some(),
            doc.external_transform.is_some(),
            doc.check.is_some(),
        ];
        if stanzas.iter().filter(|s| **s).count() != 1 {
            return Err(structural(
                "tasks",
                format!("{context}: expected exactly one of relativize, relative_subspace, yen_morphism, external_transform, check"),
            ));
        }
        let need = |field: &'static str, v: Option<&String>| -> Parsed<String> {
            v.cloned()
                .ok_or_else(|| structural(field, format!("{context}: check needs `{field}`")))
        };
        let need_frame = || -> Parsed<Arc<FrameObservable>> {
            let r = doc
                .frame
                .as_ref()
                .ok_or_else(|| structural("frame", format!("{context}: check needs `frame`")))?;
            self.frame(r)
        };
        let task = if let Some(d) = &doc.relativize {
            Task::Relativize {
                frame: self.frame(&d.frame)?,
                system: self.system(&d.system)?,
                operator: matrix_from_doc(&d.operator, &context)?,
                expect: d
                    .expect
                    .as_ref()
                    .map(|m| matrix_from_doc(m, &context))
                    .transpose()?,
            }
        } else if let Some(d) = &doc.relative_subspace {
            Task::RelativeSubspace {
                frame: self.frame(&d.frame)?,
                system: self.system(&d.system)?,
                expect_dim: d.expect_dim,
                expect_kernel_dim: d.expect_kernel_dim,
            }
        } else if let Some(d) = &doc.yen_morphism {
            Task::YenMorphism {
                psi: self.morphism(&d.psi)?,
                phi: self.channel(&d.phi)?,
                input: d
                    .input
                    .as_ref()
                    .map(|m| matrix_from_doc(m, &context))
                    .transpose()?,
                expect: d
                    .expect
                    .as_ref()
                    .map(|m| matrix_from_doc(m, &context))
                    .transpose()?,
            }
        } else if let Some(d) = &doc.external_transform {
            Task::ExternalTransform {
                psi: self.morphism(&d.psi)?,
                system: self.system(&d.system)?,
                frame_state: matrix_from_doc(&d.frame_state, &context)?,
                state: matrix_from_doc(&d.state, &context)?,
                extension: d
                    .extension
                    .as_deref()
                    .map(|n| self.channel(n))
                    .transpose()?,
                expect: d
                    .expect
                    .as_ref()
                    .map(|m| matrix_from_doc(m, &context))
                    .transpose()?,
            }
        } else {
            match doc.check.expect("one stanza is set") {
                CheckKind::ChannelAxioms => Task::ChannelAxioms {
                    frame: need_frame()?,
                    system: self.system(&need("system", doc.system.as_ref())?)?,
                },
                CheckKind::IdealIsomorphism => Task::IdealIsomorphism {
                    frame: need_frame()?,
                    system: self.system(&need("system", doc.system.as_ref())?)?,
                },
                CheckKind::FunctorLaws => {
                    let links = doc
                        .chain
                        .as_ref()
                        .filter(|c| !c.is_empty())
                        .ok_or_else(|| {
                            structural(
                                "chain",
                                format!("{context}: check needs a non-empty `chain`"),
                            )
                        })?;
                    let chain = links
                        .iter()
                        .map(|[psi, phi]| {
                            Ok((
                                (*self.morphism(psi)?).clone(),
                                (*self.channel(phi)?).clone(),
                            ))
                        })
                        .collect::<Parsed<Vec<_>>>()?;
                    Task::FunctorLaws { chain }
                }
                CheckKind::Naturality => Task::Naturality {
                    frame: need_frame()?,
                    phi: self.channel(&need("phi", doc.phi.as_ref())?)?,
                },
                CheckKind::TensorForm => Task::TensorForm {
                    psi: self.morphism(&need("psi", doc.psi.as_ref())?)?,
                    phi: self.channel(&need("phi", doc.phi.as_ref())?)?,
                },
                CheckKind::Duality => Task::Duality {
                    frame: need_frame()?,
                    system: self.system(&need("system", doc.system.as_ref())?)?,
                    pairs: doc.pairs.unwrap_or(100),
                },
            }
        };
        Ok(NamedTask { id, task })
    }
}

fn config_for(options: &OptionsDoc, overrides: &Overrides) -> Parsed<Config> {
    let default_tol = overrides
        .default_tolerance
        .unwrap_or(Config::DEFAULT_TOLERANCE);
    let mut cfg = Config::with_tolerance(
        overrides
            .tolerance
            .or(options.tolerance)
            .unwrap_or(default_tol),
    );
    if !(cfg.tolerance.is_finite() && cfg.tolerance > 0.0) {
        return Err(structural(
            "tolerance",
            "tolerance must be a positive number",
        ));
    }
    if let Some(seed) = overrides.seed.or(options.seed) {
        cfg = cfg.with_seed(seed);
    }
    if let Some(samples) = overrides.samples.or(options.samples) {
        cfg.samples = samples;
    }
    Ok(cfg)
}

fn resolve(doc: ScenarioDoc, overrides: &Overrides) -> Parsed<ScenarioSpec> {
    if doc.tasks.is_empty() {
        return Err(structural("tasks", "task list is empty"));
    }
    let cfg = config_for(&doc.options, overrides)?;
    let group = match &doc.group {
        GroupDoc::Cyclic { order } if *order > 0 => FiniteGroup::cyclic(*order),
        GroupDoc::Symmetric { n } if *n > 0 => FiniteGroup::symmetric(*n),
        GroupDoc::Dihedral { n } if *n > 0 => FiniteGroup::dihedral(*n),
        GroupDoc::Table { table, labels } => {
            FiniteGroup::from_table(table, labels.clone()).map_err(validation("group"))?
        }
        _ => return Err(structural("group", "group size must be positive")),
    };
    let mut r = Resolver {
        cfg,
        group: Arc::new(group),
        reps: IndexMap::new(),
        systems: IndexMap::new(),
        frames: IndexMap::new(),
        channels: IndexMap::new(),
        morphisms: IndexMap::new(),
    };
    for (name, d) in &doc.representations {
        let rep = r.rep(name, d)?;
        r.reps.insert(name.clone(), rep);
    }
    for (name, d) in &doc.systems {
        let sys = r.system_from_doc(name, d)?;
        r.systems.insert(name.clone(), sys);
    }
    for (name, d) in &doc.frames {
        let frame = r.frame_from_doc(name, d)?;
        r.frames.insert(name.clone(), frame);
    }
    for (name, d) in &doc.channels {
        let ch = r.channel_from_doc(name, d)?;
        r.channels.insert(name.clone(), ch);
    }
    for (name, d) in &doc.frame_morphisms {
        let m = r.morphism_from_doc(name, d)?;
        r.morphisms.insert(name.clone(), m);
    }
    let tasks = doc
        .tasks
        .iter()
        .enumerate()
        .map(|(i, t)| r.task(i, t))
        .collect::<Parsed<Vec<_>>>()?;
    Ok(ScenarioSpec {
        doc,
        config: r.cfg,
        group: r.group,
        representations: r.reps,
        systems: r.systems,
        frames: r.frames,
        channels: r.channels,
        frame_morphisms: r.morphisms,
        tasks,
    })
}
