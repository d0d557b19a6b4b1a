use alloc::string::String;

use crate::linalg::ComplexMatrix;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {found})")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("multiplication table is not square over {order} elements")]
    MalformedTable { order: usize },
    #[error("multiplication is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error(
        "representation matrix for element {element} is not unitary (deviation {deviation:e})"
    )]
    RepNotUnitary { element: usize, deviation: f64 },
    #[error("representation fails the homomorphism law at ({0}, {1}) (deviation {2:e})")]
    RepNotHomomorphism(usize, usize, f64),
    #[error("operands are defined over different groups")]
    GroupMismatch,
    #[error("operands are defined over different representations")]
    RepMismatch,
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("channel is not unital (deviation {deviation:e})")]
    NotUnital { deviation: f64 },
    #[error("channel is not positive (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive {
        witness: ComplexMatrix,
        min_eigenvalue: f64,
    },
    #[error(
        "image of basis element {index} lies outside the target space (residual {residual:e})"
    )]
    ImageOutsideTarget { index: usize, residual: f64 },
    #[error("channel needs {expected} images, got {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("pair {0} disagrees with the channel determined by the other pairs")]
    InconsistentImages(usize),
    #[error("operator lies outside the system space (residual {0:e})")]
    OperatorOutsideSystem(f64),
    #[error("operation requires a full operator algebra")]
    RequiresFullAlgebra,
    #[error("matrix is not a density matrix: {0}")]
    NotAState(&'static str),
    #[error("frame seed is not positive semidefinite")]
    SeedNotPsd,
    #[error("translated seeds do not sum to the identity (deviation norm {0:e})")]
    SeedNotNormalizing(f64),
    #[error("invalid frame observable: {0}")]
    InvalidFrame(String),
    #[error("target effect for element {0} does not factor through the channel")]
    FactorizationFails(usize),
    #[error("channel is not equivariant on the effect span (element {0})")]
    EffectSpanNotEquivariant(usize),
    #[error("objects do not match: {0}")]
    ObjectMismatch(&'static str),
    #[error("element {0} is not central; the reoriented effects are not covariant")]
    NotCentral(usize),
    #[error("channel is not equivariant: element {element}, basis element {basis_index} (deviation {deviation:e})")]
    NotEquivariant {
        element: usize,
        basis_index: usize,
        deviation: f64,
    },
    #[error("induced map is ill-defined: kernel element maps to norm {norm:e}")]
    IllDefined { witness: ComplexMatrix, norm: f64 },
}
