//! The twisted tensor product `I_n ⊗̃ C` of an interval category with a
//! directed finite dg category, on an explicit word basis.

mod category;
mod construction;
mod word;

pub use category::{
    check_projection_square, twisted_map_on_second_factor, SquareReport, TwistedCategory,
};
pub use construction::{EpsilonTerm, TwistError, TwistedTensor};
pub use word::{EpsilonBlock, Morphism, TwistWord, WordCombination};
