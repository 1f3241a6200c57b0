//! Finite dg categories given by explicit bases and structure constants.

mod category;
mod directed;
pub mod format;
mod functor;
mod interval;
mod tensor;

pub use category::{
    Axiom, AxiomCheck, BasisElement, CategoryError, CompositionTable, FiniteDgCategory, GradedHom,
    HomComplex, HomVector, ValidationReport,
};
pub use directed::DirectednessWitness;
pub use functor::{DgFunctor, FunctorError, PairCertificate, QuasiEquivalenceCertificate};
pub use interval::{interval, interval_label};
pub use tensor::{pair_label, tensor, tensor_label, tensor_unchecked, wrap_label};
