use crate::combination::Combination;
use crate::dgcat::FiniteDgCategory;

/// A basis element of `hom(src, dst)` in the base category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    pub src: usize,
    pub dst: usize,
    pub index: usize,
}

impl Morphism {
    pub fn new(src: usize, dst: usize, index: usize) -> Self {
        Morphism { src, dst, index }
    }

    pub fn identity(c: &FiniteDgCategory, x: usize) -> Self {
        Morphism::new(x, x, c.identity(x))
    }

    pub fn degree(&self, c: &FiniteDgCategory) -> i32 {
        c.degree(self.src, self.dst, self.index)
    }

    pub fn is_identity(&self, c: &FiniteDgCategory) -> bool {
        c.is_identity(self.src, self.dst, self.index)
    }

    pub fn label<'a>(&self, c: &'a FiniteDgCategory) -> &'a str {
        c.label(self.src, self.dst, self.index)
    }
}

/// `ε(f_t; g_1, …, g_m)`; the empty chain stands for `f_t ⊗ id`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpsilonBlock {
    pub generator: usize,
    /// `chain[0]` is applied first.
    pub chain: Vec<Morphism>,
}

impl EpsilonBlock {
    pub fn new(generator: usize, chain: Vec<Morphism>) -> Self {
        EpsilonBlock { generator, chain }
    }

    pub fn degree(&self, c: &FiniteDgCategory) -> i32 {
        self.chain.iter().map(|g| g.degree(c) - 1).sum()
    }
}

/// Normal-form basis morphism `(a, x) -> (b, y)` of a twisted tensor product
/// `I_n ⊗̃ C`.
///
/// Read right to left the word is
/// `(id ⊗ boundary[r]) ⋆ blocks[r-1] ⋆ … ⋆ blocks[0] ⋆ (id ⊗ boundary[0])`
/// with `r = b - a` and `blocks[i]` carrying the generator `f_{a+i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwistWord {
    pub source: (usize, usize),
    pub target: (usize, usize),
    pub blocks: Vec<EpsilonBlock>,
    pub boundary: Vec<Morphism>,
}

impl TwistWord {
    /// `id_i ⊗ g`.
    pub fn slot(i: usize, g: Morphism) -> Self {
        TwistWord {
            source: (i, g.src),
            target: (i, g.dst),
            blocks: Vec::new(),
            boundary: vec![g],
        }
    }

    pub fn identity(c: &FiniteDgCategory, i: usize, x: usize) -> Self {
        TwistWord::slot(i, Morphism::identity(c, x))
    }

    /// `f_t ⊗ id_x : (t-1, x) -> (t, x)`.
    pub fn generator(c: &FiniteDgCategory, t: usize, x: usize) -> Self {
        TwistWord {
            source: (t - 1, x),
            target: (t, x),
            blocks: vec![EpsilonBlock::new(t, Vec::new())],
            boundary: vec![Morphism::identity(c, x); 2],
        }
    }

    pub fn degree(&self, c: &FiniteDgCategory) -> i32 {
        self.boundary.iter().map(|m| m.degree(c)).sum::<i32>()
            + self.blocks.iter().map(|b| b.degree(c)).sum::<i32>()
    }

    /// True when no block carries a nonempty chain.
    pub fn is_classical(&self) -> bool {
        self.blocks.iter().all(|b| b.chain.is_empty())
    }

    /// Total number of chain entries.
    pub fn bar_degree(&self) -> usize {
        self.blocks.iter().map(|b| b.chain.len()).sum()
    }
}

/// Linear combination of words with a common source and target.
pub type WordCombination = Combination<TwistWord>;
