use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{Arrow, BarOracle, BarString, Letter, OracleError};
use crate::dgcat::{BasisElement, HomComplex, HomVector};
use crate::scalar::{sign, Field, Rational};
use crate::twist::{Morphism, TwistWord, TwistedTensor};

fn arrow(m: &Morphism) -> Arrow {
    Arrow {
        src: m.src,
        dst: m.dst,
        index: m.index,
    }
}

/// The string of a word together with the sign `(-1)^{Σ ℓ(ℓ+1)/2}` over
/// its chain lengths `ℓ`.
pub fn word_to_string(w: &TwistWord) -> (Rational, BarString) {
    let mut letters = Vec::new();
    let mut e = 0i64;
    for t in (0..w.boundary.len()).rev() {
        letters.push(Letter::Boundary(arrow(&w.boundary[t])));
        if t > 0 {
            let chain = &w.blocks[t - 1].chain;
            let l = chain.len() as i64;
            e += l * (l + 1) / 2;
            letters.extend(chain.iter().rev().map(|g| Letter::Bar(arrow(g))));
        }
    }
    (sign(e), letters)
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleComparison {
    pub source: (usize, usize),
    pub target: (usize, usize),
    pub words: usize,
    pub oracle_basis: usize,
    pub bijective: bool,
    pub degree_preserving: bool,
    pub intertwining_failures: usize,
    pub first_failure: Option<String>,
    pub twist_dims: BTreeMap<i32, usize>,
    pub oracle_dims: BTreeMap<i32, usize>,
    pub twist_cohomology: BTreeMap<i32, usize>,
    pub oracle_cohomology: BTreeMap<i32, usize>,
}

impl OracleComparison {
    pub fn passed(&self) -> bool {
        self.bijective
            && self.degree_preserving
            && self.intertwining_failures == 0
            && self.twist_dims == self.oracle_dims
            && self.twist_cohomology == self.oracle_cohomology
    }
}

/// Compares the twist module's hom complex `(a,x) -> (b,y)` with the
/// oracle's `K` complex through the signed bijection of [`word_to_string`].
pub fn compare_with_twist(
    oracle: &BarOracle,
    twist: &TwistedTensor,
    (a, x): (usize, usize),
    (b, y): (usize, usize),
    field: Field,
) -> Result<OracleComparison, OracleError> {
    let k = oracle.k_complex(a, x, b, y);
    let words = twist.words(a, x, b, y);
    let index: HashMap<&BarString, usize> =
        k.basis.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut image = vec![None; words.len()];
    let mut hit = vec![false; k.len()];
    let mut bijective = words.len() == k.len();
    let mut degree_preserving = true;
    for (i, w) in words.iter().enumerate() {
        let (s, string) = word_to_string(w);
        match index.get(&string) {
            Some(&j) if !hit[j] => {
                hit[j] = true;
                if k.degrees[j] != twist.degree(w) {
                    degree_preserving = false;
                }
                image[i] = Some((s, j));
            }
            _ => bijective = false,
        }
    }
    let mut intertwining_failures = 0;
    let mut first_failure = None;
    let local: HashMap<&TwistWord, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut twist_diff = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let dw = twist.differential(w);
        twist_diff.push(
            dw.iter()
                .map(|(v, c)| (local[v], c.clone()))
                .collect::<HomVector>(),
        );
        let Some((s, j)) = &image[i] else { continue };
        let mut lhs = HomVector::new();
        let mut complete = true;
        for (v, c) in dw.iter() {
            match &image[local[v]] {
                Some((sv, jv)) => lhs.add_term(*jv, c * sv),
                None => complete = false,
            }
        }
        let rhs = k.differential(*j).scaled(s);
        if !complete || lhs != rhs {
            intertwining_failures += 1;
            if first_failure.is_none() {
                first_failure = Some(twist.label(w));
            }
        }
    }
    let basis = words
        .iter()
        .map(|w| BasisElement::new(twist.label(w), twist.degree(w)))
        .collect();
    let hom = HomComplex::new(basis, twist_diff);
    let twist_cohomology = hom.to_chain_complex(field)?.complex.cohomology()?.dims();
    let oracle_cohomology = k.chain_complex(field)?.cohomology()?.dims();
    Ok(OracleComparison {
        source: (a, x),
        target: (b, y),
        words: words.len(),
        oracle_basis: k.len(),
        bijective: bijective && hit.iter().all(|h| *h),
        degree_preserving,
        intertwining_failures,
        first_failure,
        twist_dims: hom.dims(),
        oracle_dims: k.dims(),
        twist_cohomology,
        oracle_cohomology,
    })
}
