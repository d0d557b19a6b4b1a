//! Finite-dimensional relativization calculus for quantum reference frames.
//!
//! Everything here is pure linear algebra over dense complex matrices and
//! finite groups, so the crate only needs `alloc`. Scenario files, reports
//! and the command line live in the `relframe` companion crate.
//!
//! The main pieces, bottom-up:
//!
//! * [`linalg`] and [`subspace`]: dense complex matrices, Hermitian spectra,
//!   Hilbert–Schmidt projections and null spaces.
//! * [`group`]: finite groups given by multiplication tables and their
//!   unitary representations acting on operators by conjugation.
//! * [`system`]: action-closed operator subspaces ("semi-quantum systems"),
//!   channels between them, operational state classes.
//! * [`frame`]: covariant POVMs on the group, frame morphisms.
//! * [`relativization`]: the relativization channel, relative subspaces,
//!   the induced functor on morphisms and the law checkers.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod config;
pub mod error;
pub mod frame;
pub mod group;
pub mod linalg;
pub mod relativization;
pub mod sampling;
pub mod subspace;
pub mod system;

pub use config::Config;
pub use error::{Error, Result};
pub use frame::{FrameMorphism, FrameObservable};
pub use group::{FiniteGroup, UnitaryRep};
pub use linalg::{ComplexMatrix, C64};
pub use relativization::{RelativeSubspace, RelativizationMap, YenMorphism};
pub use subspace::MatrixSubspace;
pub use system::{ChannelMap, PositivityCheck, SemiQuantumSystem, StateClass};
