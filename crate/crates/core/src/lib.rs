//! Exact computations with groups of formal diffeomorphisms at finite jet
//! level.
//!
//! Everything is done over ℚ with arbitrary-precision integers, so results
//! are bit-reproducible:
//!
//! * [`series`]: truncated power series, jets of diffeomorphisms, composition,
//!   inversion and projection between jet levels.
//! * [`jet`]: vector-field jets, `exp`/`log`, rational flow times and the
//!   pullback matrix representation.
//! * [`jordan`]: multiplicative Jordan–Chevalley decomposition.
//! * [`group_dim`]: dimensions of Zariski closures at jet level.
//! * [`intersection`]: local intersection multiplicities with a certified
//!   stopping rule.
//! * [`orbit`]: word enumeration, orbit sweeps and iterate sequences.

pub mod error;
pub mod group_dim;
pub mod intersection;
pub mod jet;
pub mod jordan;
pub mod lattice;
pub mod linalg;
pub mod orbit;
pub mod parse;
pub mod series;

/// Exact rational coefficient type used throughout.
pub type Rational = num_rational::BigRational;

pub use error::{Error, Result};
pub use group_dim::{DimReport, EigenvalueSpec, LieBasis, RelationLattice, Verdict};
pub use intersection::{IdealSpec, MultiplicityKind, MultiplicityResult};
pub use jet::{JetMatrix, NilpotencyCertificate, VectorFieldJet};
pub use jordan::JordanPair;
pub use orbit::{GroupPresentation, SweepReport};
pub use series::{DiffeoJet, LinearPart, MultiIndex, TruncatedSeries};
