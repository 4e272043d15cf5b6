//! Finite-dimensional context categories.
//!
//! A context is a unital abelian subalgebra of a matrix algebra, stored as
//! its minimal projections. From a set of available observables this crate
//! enumerates the generated contexts and their inclusion order, computes
//! Gelfand spectra and restriction maps, daseinises projections into
//! contexts, orders contexts by resolution and by redundancy, and searches
//! for minimax contexts. The [`topologimeter`] module holds a discretized
//! toy model in which the measured context decides whether the emergent
//! configuration space is a line or a circle.

pub mod context;
pub mod daseinisation;
pub mod error;
pub mod io;
pub mod matrix;
pub mod orders;
pub mod presheaf;
pub mod topologimeter;

pub use context::{
    all_projections, context_from_commuting, enumerate_contexts, hasse, is_subcontext,
    AvailableObservables, Context, ContextId, ContextPoset, NamedObservable,
};
pub use daseinisation::{
    daseinise, daseinise_over_poset, inner_daseinisation, outer_daseinisation, DaseinisationResult,
};
pub use error::{Error, Result};
pub use matrix::{
    commutant_dimension, commutes, join, meet, overlaps, range_contains, simultaneous_diagonalize,
    validate_projection, Complex64, ComplexMatrix, Projection, ToleranceConfig,
};
pub use orders::{
    minimax_contexts, redundancy_leq, resolution_leq, validate_witness, MinimaxReport,
    RedundancyRegistry, RedundancyWitness, TensorFactorization, WitnessKind,
};
pub use presheaf::{check_functoriality, evaluate_character, restriction_map, spectrum, Character};
