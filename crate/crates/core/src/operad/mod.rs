//! The complexes `O(n_1, …, n_k)`: `hom(min, max)` in the iterated twisted
//! tensor product `I_{n_k} ⊗̃ (… ⊗̃ (I_{n_2} ⊗̃ I_{n_1}))`, with their
//! augmentation to the ground field and contractibility certificates.

mod certificate;

pub use certificate::{
    check_contractible, degeneracy_check, sweep, sweep_ordinals, AugmentationSummary,
    ContractibilityCertificate, DegeneracyReport, Metrics, StageMetrics, SweepEntry, SweepReport,
    SweepStatus, Timings,
};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::complex::ComplexError;
use crate::dgcat::{
    interval, BasisElement, CategoryError, FiniteDgCategory, HomComplex, HomVector,
};
use crate::scalar::{rint, Rational, ScalarError};
use crate::twist::{TwistError, TwistWord, TwistedCategory, TwistedTensor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperadError {
    #[error("invalid 2-ordinal {0:?}: expected comma-separated nonnegative integers")]
    Parse(String),
    #[error("{ordinal}: {stage} has a hom basis of size {size}, above the guard {bound}")]
    BasisGuard {
        ordinal: Ordinal2,
        stage: String,
        size: usize,
        bound: usize,
    },
    #[error("augmentation does not vanish on the image of d (basis element {0})")]
    AugmentationNotChainMap(String),
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl From<CategoryError> for OperadError {
    fn from(e: CategoryError) -> Self {
        OperadError::Twist(e.into())
    }
}

/// A sequence `(n_1, …, n_k)` of nonnegative integers with `k >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Ordinal2(Vec<usize>);

impl Ordinal2 {
    pub fn new(parts: Vec<usize>) -> Result<Self, OperadError> {
        if parts.is_empty() {
            return Err(OperadError::Parse(String::new()));
        }
        Ok(Ordinal2(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// The ordinal with `n` appended.
    pub fn push(&self, n: usize) -> Ordinal2 {
        let mut v = self.0.clone();
        v.push(n);
        Ordinal2(v)
    }
}

impl fmt::Display for Ordinal2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Ordinal2 {
    type Err = OperadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Result<Vec<usize>, _> =
            t.split(',').map(|p| p.trim().parse::<usize>()).collect();
        match parts {
            Ok(v) if !v.is_empty() => Ok(Ordinal2(v)),
            _ => Err(OperadError::Parse(s.to_string())),
        }
    }
}

/// One factor `D_j` of the iterated product, with its `min` and `max`.
#[derive(Clone, Debug)]
struct Stage {
    category: Arc<FiniteDgCategory>,
    min: usize,
    max: usize,
}

/// `O(n_1, …, n_k)` with its basis words and augmentation.
#[derive(Clone, Debug)]
pub struct OperadComplex {
    pub ordinal: Ordinal2,
    pub hom: HomComplex,
    /// augmentation value of every basis element
    pub augmentation: Vec<Rational>,
    pub stages: Vec<StageMetrics>,
}

fn guard(
    ordinal: &Ordinal2,
    stage: String,
    size: usize,
    bound: Option<usize>,
) -> Result<(), OperadError> {
    match bound {
        Some(b) if size > b => Err(OperadError::BasisGuard {
            ordinal: ordinal.clone(),
            stage,
            size,
            bound: b,
        }),
        _ => Ok(()),
    }
}

fn compose_path(c: &FiniteDgCategory, path: &[crate::twist::Morphism]) -> HomVector {
    let first = path[0];
    let mut acc = HomVector::term(first.index);
    let (x, mut z) = (first.src, first.dst);
    for m in &path[1..] {
        acc = c.compose_vectors(x, z, m.dst, &HomVector::term(m.index), &acc);
        z = m.dst;
    }
    acc
}

/// Augmentation of a word of `D_j(min, max)` given the values on
/// `D_{j-1}(min, max)`: zero unless every chain is empty, otherwise the value
/// of the composite of the boundary slots.
fn augment_word(prev: &Stage, prev_values: &[Rational], w: &TwistWord) -> Rational {
    if !w.is_classical() {
        return rint(0);
    }
    let composite = compose_path(&prev.category, &w.boundary);
    composite.iter().map(|(i, c)| c * &prev_values[*i]).sum()
}

impl OperadComplex {
    /// Builds `O(o)`; intermediate factors are materialized and validated.
    /// `guard_basis` bounds the size of every hom basis encountered.
    pub fn build(ordinal: &Ordinal2, guard_basis: Option<usize>) -> Result<Self, OperadError> {
        let parts = ordinal.parts();
        let first = Arc::new(interval(parts[0]));
        let mut stage = Stage {
            category: first.clone(),
            min: 0,
            max: parts[0],
        };
        let mut values = vec![rint(1)];
        let mut stages = vec![StageMetrics::of(&first)];
        for (j, &n) in parts.iter().enumerate().skip(1) {
            let tensor = TwistedTensor::new(n, stage.category.clone())?;
            let (min, max) = (tensor.object(0, stage.min), tensor.object(n, stage.max));
            let last = j + 1 == parts.len();
            let words = tensor.words(0, stage.min, n, stage.max);
            guard(
                ordinal,
                format!("O({})", stage_name(&parts[..=j])),
                words.len(),
                guard_basis,
            )?;
            let next_values: Vec<Rational> = words
                .iter()
                .map(|w| augment_word(&stage, &values, w))
                .collect();
            if last {
                let hom = hom_complex(&tensor, &words);
                return Ok(OperadComplex {
                    ordinal: ordinal.clone(),
                    hom,
                    augmentation: next_values,
                    stages,
                });
            }
            let twisted = TwistedCategory::new(n, stage.category.clone())?;
            let category = twisted.category().clone();
            guard(
                ordinal,
                format!("D_{}", j + 1),
                category.max_hom_size(),
                guard_basis,
            )?;
            stages.push(StageMetrics::of(&category));
            debug_assert_eq!(twisted.words(min, max), words.as_slice());
            stage = Stage { category, min, max };
            values = next_values;
        }
        // k = 1
        let hom = first.hom(0, parts[0]).clone();
        Ok(OperadComplex {
            ordinal: ordinal.clone(),
            hom,
            augmentation: values,
            stages,
        })
    }

    pub fn dims(&self) -> std::collections::BTreeMap<i32, usize> {
        self.hom.dims()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.hom.euler_characteristic()
    }

    /// Checks that the augmentation kills `d` of every basis element.
    pub fn check_augmentation(&self) -> Result<(), OperadError> {
        for (i, dv) in self.hom.differential.iter().enumerate() {
            let v: Rational = dv.iter().map(|(j, c)| c * &self.augmentation[*j]).sum();
            if v != rint(0) {
                return Err(OperadError::AugmentationNotChainMap(
                    self.hom.basis[i].label.clone(),
                ));
            }
        }
        Ok(())
    }
}

fn stage_name(parts: &[usize]) -> String {
    parts
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn hom_complex(tensor: &TwistedTensor, words: &[TwistWord]) -> HomComplex {
    let index: std::collections::HashMap<&TwistWord, usize> =
        words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let basis = words
        .iter()
        .map(|w| BasisElement::new(tensor.label(w), tensor.degree(w)))
        .collect();
    let differential = words
        .iter()
        .map(|w| {
            tensor
                .differential(w)
                .into_terms()
                .map(|(v, c)| (index[&v], c))
                .collect()
        })
        .collect();
    HomComplex::new(basis, differential)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ordinals() {
        assert_eq!("1,1".parse::<Ordinal2>().unwrap().parts(), &[1, 1]);
        assert_eq!("(2, 0,1)".parse::<Ordinal2>().unwrap().parts(), &[2, 0, 1]);
        assert!("".parse::<Ordinal2>().is_err());
        assert!("1,-1".parse::<Ordinal2>().is_err());
        assert_eq!("3".parse::<Ordinal2>().unwrap().to_string(), "(3)");
    }

    #[test]
    fn single_interval_is_one_dimensional() {
        for n in 0..4 {
            let o = OperadComplex::build(&Ordinal2(vec![n]), None).unwrap();
            assert_eq!(o.dims(), [(0, 1)].into_iter().collect());
            assert_eq!(o.augmentation, vec![rint(1)]);
        }
    }

    #[test]
    fn smallest_nontrivial_complex() {
        let o = OperadComplex::build(&Ordinal2(vec![1, 1]), None).unwrap();
        assert_eq!(o.dims(), [(-1, 1), (0, 2)].into_iter().collect());
        let eps = o.hom.basis.iter().position(|b| b.degree == -1).unwrap();
        let coeffs: Vec<Rational> = o.hom.differential[eps]
            .iter()
            .map(|(_, c)| c.clone())
            .collect();
        assert_eq!(coeffs, vec![rint(-1), rint(1)]);
        assert_eq!(o.augmentation[eps], rint(0));
        o.check_augmentation().unwrap();
    }

    #[test]
    fn euler_characteristic_of_one_two() {
        assert_eq!(
            OperadComplex::build(&Ordinal2(vec![1, 2]), None)
                .unwrap()
                .euler_characteristic(),
            1
        );
    }

    #[test]
    fn classical_words_of_two_one_augment_to_one() {
        let o = OperadComplex::build(&Ordinal2(vec![2, 1]), None).unwrap();
        o.check_augmentation().unwrap();
        for (i, b) in o.hom.basis.iter().enumerate() {
            if b.degree == 0 && !b.label.contains("; ") {
                assert_eq!(o.augmentation[i], rint(1), "{}", b.label);
            }
        }
    }

    #[test]
    fn guard_refuses_large_bases() {
        let err = OperadComplex::build(&Ordinal2(vec![1, 1, 1]), Some(2)).unwrap_err();
        assert!(matches!(err, OperadError::BasisGuard { .. }));
    }
}
