use std::sync::Arc;

use thiserror::Error;

use super::word::{EpsilonBlock, Morphism, TwistWord, WordCombination};
use crate::dgcat::{wrap_label, CategoryError, DirectednessWitness, FiniteDgCategory};
use crate::scalar::{sign, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("words are not composable: target {0:?} differs from source {1:?}")]
    NotComposable((usize, usize), (usize, usize)),
    #[error("chain entry {0} is an identity")]
    IdentityInChain(String),
    #[error("chain entries {0} and {1} are not composable")]
    BrokenChain(String, String),
    #[error("generator range {0}..{1} is empty or outside I_{2}")]
    GeneratorRange(usize, usize, usize),
}

/// One term of `d ε(f; g_1, …, g_n)` for a closed degree-zero `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsilonTerm {
    /// `c · ε(f; chain)`: internal differential or a merge of neighbours.
    Chain {
        chain: Vec<Morphism>,
        coeff: Rational,
    },
    /// `c · (id ⊗ g_n) ⋆ ε(f; rest)`.
    Top {
        absorbed: Morphism,
        rest: Vec<Morphism>,
        coeff: Rational,
    },
    /// `c · ε(f; rest) ⋆ (id ⊗ g_1)`.
    Bottom {
        absorbed: Morphism,
        rest: Vec<Morphism>,
        coeff: Rational,
    },
}

/// `I_n ⊗̃ C` for a directed finite dg category `C`, computed lazily on words.
#[derive(Clone, Debug)]
pub struct TwistedTensor {
    n: usize,
    base: Arc<FiniteDgCategory>,
    witness: DirectednessWitness,
    outgoing: Vec<Vec<Morphism>>,
    reach: Vec<bool>,
}

impl TwistedTensor {
    /// Rejects base categories that are not directed.
    pub fn new(n: usize, base: Arc<FiniteDgCategory>) -> Result<Self, TwistError> {
        let witness = base.directedness()?;
        let m = base.num_objects();
        let mut outgoing = vec![Vec::new(); m];
        for (x, y) in base.nonzero_pairs() {
            for i in 0..base.hom(x, y).len() {
                outgoing[x].push(Morphism::new(x, y, i));
            }
        }
        // reflexive-transitive closure of the nonzero-hom graph, in decreasing level order
        let mut reach = vec![false; m * m];
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&x| std::cmp::Reverse(witness.level(x)));
        for &x in &order {
            reach[x * m + x] = true;
            for y in 0..m {
                if x != y && !base.hom(x, y).is_empty() {
                    for z in 0..m {
                        if reach[y * m + z] {
                            reach[x * m + z] = true;
                        }
                    }
                }
            }
        }
        Ok(TwistedTensor {
            n,
            base,
            witness,
            outgoing,
            reach,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &Arc<FiniteDgCategory> {
        &self.base
    }

    pub fn base_witness(&self) -> &DirectednessWitness {
        &self.witness
    }

    /// Object index of `(i, x)`.
    pub fn object(&self, i: usize, x: usize) -> usize {
        i * self.base.num_objects() + x
    }

    pub fn object_label(&self, i: usize, x: usize) -> String {
        format!("({i},{})", self.base.object_label(x))
    }

    fn reaches(&self, x: usize, y: usize) -> bool {
        self.reach[x * self.base.num_objects() + y]
    }

    /// All basis words `(a, x) -> (b, y)`, sorted.
    pub fn words(&self, a: usize, x: usize, b: usize, y: usize) -> Vec<TwistWord> {
        let mut out = Vec::new();
        if a > b || b > self.n || !self.reaches(x, y) {
            return out;
        }
        let mut boundary = Vec::new();
        let mut blocks = Vec::new();
        self.extend_words(a, b, x, y, x, &mut boundary, &mut blocks, &mut out);
        out.sort();
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_words(
        &self,
        a: usize,
        b: usize,
        x: usize,
        y: usize,
        z: usize,
        boundary: &mut Vec<Morphism>,
        blocks: &mut Vec<EpsilonBlock>,
        out: &mut Vec<TwistWord>,
    ) {
        let last = boundary.len() == b - a;
        for m in &self.outgoing[z] {
            if !self.reaches(m.dst, y) || (last && m.dst != y) {
                continue;
            }
            boundary.push(*m);
            if last {
                out.push(TwistWord {
                    source: (a, x),
                    target: (b, y),
                    blocks: blocks.clone(),
                    boundary: boundary.clone(),
                });
            } else {
                let mut chains = Vec::new();
                self.chains_from(m.dst, y, &mut Vec::new(), &mut chains);
                for (chain, end) in chains {
                    blocks.push(EpsilonBlock::new(a + blocks.len() + 1, chain));
                    self.extend_words(a, b, x, y, end, boundary, blocks, out);
                    blocks.pop();
                }
            }
            boundary.pop();
        }
    }

    fn chains_from(
        &self,
        z: usize,
        y: usize,
        prefix: &mut Vec<Morphism>,
        out: &mut Vec<(Vec<Morphism>, usize)>,
    ) {
        out.push((prefix.clone(), z));
        for m in &self.outgoing[z] {
            if m.is_identity(&self.base) || !self.reaches(m.dst, y) {
                continue;
            }
            prefix.push(*m);
            self.chains_from(m.dst, y, prefix, out);
            prefix.pop();
        }
    }

    pub fn degree(&self, w: &TwistWord) -> i32 {
        w.degree(&self.base)
    }

    /// `g ∘ f` in the base category.
    fn base_compose(&self, g: Morphism, f: Morphism) -> Vec<(Morphism, Rational)> {
        self.base
            .compose(f.src, f.dst, g.dst, g.index, f.index)
            .into_terms()
            .map(|(k, c)| (Morphism::new(f.src, g.dst, k), c))
            .collect()
    }

    /// Terms of `d ε(f; chain)` with `|f| = 0`, `df = 0`.
    pub fn epsilon_terms(&self, chain: &[Morphism]) -> Vec<EpsilonTerm> {
        let c = &*self.base;
        let n = chain.len();
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        let degs: Vec<i64> = chain.iter().map(|g| g.degree(c) as i64).collect();
        for j in 1..=n {
            let s_j: i64 = degs[j..].iter().sum();
            let s = -sign(s_j + (n - j) as i64);
            let g = chain[j - 1];
            for (k, coeff) in c.differential(g.src, g.dst, g.index).iter() {
                let m = Morphism::new(g.src, g.dst, *k);
                if m.is_identity(c) {
                    continue;
                }
                let mut nc = chain.to_vec();
                nc[j - 1] = m;
                out.push(EpsilonTerm::Chain {
                    chain: nc,
                    coeff: &s * coeff,
                });
            }
        }
        let pre = -sign(n as i64 - 1);
        out.push(EpsilonTerm::Top {
            absorbed: chain[n - 1],
            rest: chain[..n - 1].to_vec(),
            coeff: pre.clone(),
        });
        let t2: i64 = degs[1..].iter().map(|d| d + 1).sum();
        out.push(EpsilonTerm::Bottom {
            absorbed: chain[0],
            rest: chain[1..].to_vec(),
            coeff: &pre * &sign(t2 + 1),
        });
        for i in 1..n {
            let t: i64 = degs[i..].iter().map(|d| d + 1).sum();
            let s = &pre * &sign(t);
            for (m, coeff) in self.base_compose(chain[i], chain[i - 1]) {
                if m.is_identity(c) {
                    continue;
                }
                let mut nc = chain[..i - 1].to_vec();
                nc.push(m);
                nc.extend_from_slice(&chain[i + 1..]);
                out.push(EpsilonTerm::Chain {
                    chain: nc,
                    coeff: &s * &coeff,
                });
            }
        }
        out
    }

    /// `dw`, extended over the factors of `w` by the graded Leibniz rule.
    pub fn differential(&self, w: &TwistWord) -> WordCombination {
        let c = &*self.base;
        let mut out = WordCombination::new();
        let r = w.blocks.len();
        let mut acc: i64 = 0;
        for t in (0..=r).rev() {
            let m = w.boundary[t];
            let s = sign(acc);
            for (k, coeff) in c.differential(m.src, m.dst, m.index).iter() {
                let mut nw = w.clone();
                nw.boundary[t] = Morphism::new(m.src, m.dst, *k);
                out.add_term(nw, &s * coeff);
            }
            acc += m.degree(c) as i64;
            if t == 0 {
                break;
            }
            let bi = t - 1;
            let s = sign(acc);
            for term in self.epsilon_terms(&w.blocks[bi].chain) {
                match term {
                    EpsilonTerm::Chain { chain, coeff } => {
                        let mut nw = w.clone();
                        nw.blocks[bi].chain = chain;
                        out.add_term(nw, &s * &coeff);
                    }
                    EpsilonTerm::Top {
                        absorbed,
                        rest,
                        coeff,
                    } => {
                        for (mm, cc) in self.base_compose(w.boundary[t], absorbed) {
                            let mut nw = w.clone();
                            nw.boundary[t] = mm;
                            nw.blocks[bi].chain = rest.clone();
                            out.add_term(nw, &(&s * &coeff) * &cc);
                        }
                    }
                    EpsilonTerm::Bottom {
                        absorbed,
                        rest,
                        coeff,
                    } => {
                        for (mm, cc) in self.base_compose(absorbed, w.boundary[t - 1]) {
                            let mut nw = w.clone();
                            nw.boundary[t - 1] = mm;
                            nw.blocks[bi].chain = rest.clone();
                            out.add_term(nw, &(&s * &coeff) * &cc);
                        }
                    }
                }
            }
            acc += w.blocks[bi].degree(c) as i64;
        }
        out
    }

    pub fn differential_of(&self, v: &WordCombination) -> WordCombination {
        v.flat_map(|w| self.differential(w))
    }

    /// `w2 ⋆ w1`: concatenation with the junction slots composed in the base.
    pub fn compose(&self, w2: &TwistWord, w1: &TwistWord) -> Result<WordCombination, TwistError> {
        if w1.target != w2.source {
            return Err(TwistError::NotComposable(w1.target, w2.source));
        }
        let lo = w1.boundary[w1.boundary.len() - 1];
        let hi = w2.boundary[0];
        let mut blocks = w1.blocks.clone();
        blocks.extend(w2.blocks.iter().cloned());
        let mut out = WordCombination::new();
        for (m, c) in self.base_compose(hi, lo) {
            let mut boundary = w1.boundary[..w1.boundary.len() - 1].to_vec();
            boundary.push(m);
            boundary.extend_from_slice(&w2.boundary[1..]);
            out.add_term(
                TwistWord {
                    source: w1.source,
                    target: w2.target,
                    blocks: blocks.clone(),
                    boundary,
                },
                c,
            );
        }
        Ok(out)
    }

    pub fn compose_combinations(
        &self,
        v2: &WordCombination,
        v1: &WordCombination,
    ) -> Result<WordCombination, TwistError> {
        let mut out = WordCombination::new();
        for (w2, c2) in v2.iter() {
            for (w1, c1) in v1.iter() {
                out.add_scaled(&self.compose(w2, w1)?, &(c2 * c1));
            }
        }
        Ok(out)
    }

    fn check_chain(&self, x: usize, chain: &[Morphism]) -> Result<(), TwistError> {
        let c = &*self.base;
        let mut z = x;
        for g in chain {
            if g.src != z {
                let prev = chain
                    .iter()
                    .take_while(|h| *h != g)
                    .last()
                    .map_or_else(|| c.object_label(x).to_string(), |h| h.label(c).to_string());
                return Err(TwistError::BrokenChain(prev, g.label(c).to_string()));
            }
            if g.is_identity(c) {
                return Err(TwistError::IdentityInChain(g.label(c).to_string()));
            }
            z = g.dst;
        }
        Ok(())
    }

    /// `ε(f_b ∘ … ∘ f_{a+1}; chain)` as a sum of normal-form words: every
    /// ordered splitting of the chain among the generators, lowest
    /// generator taking the first entries. A splitting into pieces of lengths
    /// `l_1, …, l_r` carries the sign `(-1)^(Σ_{i<j} l_i l_j)`, the only
    /// choice compatible with [`Self::epsilon_terms`].
    pub fn expand_composite_epsilon(
        &self,
        a: usize,
        b: usize,
        x: usize,
        chain: &[Morphism],
    ) -> Result<WordCombination, TwistError> {
        if a >= b || b > self.n {
            return Err(TwistError::GeneratorRange(a, b, self.n));
        }
        self.check_chain(x, chain)?;
        let c = &*self.base;
        let y = chain.last().map_or(x, |g| g.dst);
        let mut out = WordCombination::new();
        for cuts in splittings(chain.len(), b - a) {
            let mut blocks = Vec::with_capacity(cuts.len());
            let mut boundary = vec![Morphism::identity(c, x)];
            let mut start = 0;
            let mut before = 0;
            let mut exponent = 0;
            for (i, &end) in cuts.iter().enumerate() {
                exponent += before * (end - start);
                before += end - start;
                let part = chain[start..end].to_vec();
                let z = part.last().map_or(boundary[i].dst, |g| g.dst);
                blocks.push(EpsilonBlock::new(a + i + 1, part));
                boundary.push(Morphism::identity(c, z));
                start = end;
            }
            out.add_term(
                TwistWord {
                    source: (a, x),
                    target: (b, y),
                    blocks,
                    boundary,
                },
                sign(exponent as i64),
            );
        }
        Ok(out)
    }

    /// `d ε(f_b ∘ … ∘ f_{a+1}; chain)` computed from the single-generator
    /// formula applied to the composite generator, with each resulting
    /// composite ε expanded afterwards.
    pub fn composite_epsilon_differential(
        &self,
        a: usize,
        b: usize,
        x: usize,
        chain: &[Morphism],
    ) -> Result<WordCombination, TwistError> {
        self.check_chain(x, chain)?;
        let mut out = WordCombination::new();
        for term in self.epsilon_terms(chain) {
            match term {
                EpsilonTerm::Chain { chain, coeff } => {
                    out.add_scaled(&self.expand_composite_epsilon(a, b, x, &chain)?, &coeff);
                }
                EpsilonTerm::Top {
                    absorbed,
                    rest,
                    coeff,
                } => {
                    let e = self.expand_composite_epsilon(a, b, x, &rest)?;
                    let top = WordCombination::term(TwistWord::slot(b, absorbed));
                    out.add_scaled(&self.compose_combinations(&top, &e)?, &coeff);
                }
                EpsilonTerm::Bottom {
                    absorbed,
                    rest,
                    coeff,
                } => {
                    let e = self.expand_composite_epsilon(a, b, absorbed.dst, &rest)?;
                    let bottom = WordCombination::term(TwistWord::slot(a, absorbed));
                    out.add_scaled(&self.compose_combinations(&e, &bottom)?, &coeff);
                }
            }
        }
        Ok(out)
    }

    /// Deterministic word label, e.g. `g0 | eps(f1; c1, c2) | g1`, or
    /// `g @ a` for a word without blocks.
    pub fn label(&self, w: &TwistWord) -> String {
        let c = &*self.base;
        let lbl = |m: &Morphism| wrap_label(m.label(c));
        if w.blocks.is_empty() {
            return format!("{} @ {}", lbl(&w.boundary[0]), w.source.0);
        }
        let mut parts = vec![lbl(&w.boundary[0])];
        for (blk, m) in w.blocks.iter().zip(&w.boundary[1..]) {
            if blk.chain.is_empty() {
                parts.push(format!("eps(f{})", blk.generator));
            } else {
                let entries: Vec<String> = blk.chain.iter().map(lbl).collect();
                parts.push(format!("eps(f{}; {})", blk.generator, entries.join(", ")));
            }
            parts.push(lbl(m));
        }
        parts.join(" | ")
    }
}

/// Nondecreasing cut positions `c_0 <= … <= c_{groups-1} = len`.
fn splittings(len: usize, groups: usize) -> Vec<Vec<usize>> {
    fn go(from: usize, len: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 1 {
            cur.push(len);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in from..=len {
            cur.push(c);
            go(c, len, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, len, groups, &mut Vec::new(), &mut out);
    out
}
