use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::construction::{TwistError, TwistedTensor};
use super::word::{EpsilonBlock, Morphism, TwistWord, WordCombination};
use crate::dgcat::{
    interval, tensor, BasisElement, CategoryError, CompositionTable, DgFunctor,
    DirectednessWitness, FiniteDgCategory, FunctorError, HomComplex, HomVector,
};
use crate::scalar::Rational;

/// A twisted tensor product materialized as a finite dg category, keeping
/// the word behind every basis element.
#[derive(Clone, Debug)]
pub struct TwistedCategory {
    twist: TwistedTensor,
    category: Arc<FiniteDgCategory>,
    words: BTreeMap<(usize, usize), Vec<TwistWord>>,
    index: HashMap<TwistWord, usize>,
}

impl TwistedCategory {
    /// Builds every hom complex and composition table, then validates the
    /// result; a validation failure is reported as an internal error.
    pub fn new(n: usize, base: Arc<FiniteDgCategory>) -> Result<Self, TwistError> {
        let out = Self::build(TwistedTensor::new(n, base)?)?;
        let report = out.category.validate();
        if !report.passed() {
            return Err(CategoryError::Internal(format!(
                "twisted tensor product fails validation: {}",
                report.first_failure().unwrap_or_default()
            ))
            .into());
        }
        Ok(out)
    }

    /// As [`TwistedCategory::new`] without the final validation.
    pub fn build(twist: TwistedTensor) -> Result<Self, TwistError> {
        let base = twist.base().clone();
        let (n, m) = (twist.n(), base.num_objects());
        let objects: Vec<(usize, usize)> =
            (0..=n).flat_map(|i| (0..m).map(move |x| (i, x))).collect();
        let pairs: Vec<((usize, usize), (usize, usize))> = objects
            .iter()
            .flat_map(|&s| objects.iter().map(move |&t| (s, t)))
            .filter(|(s, t)| s.0 <= t.0)
            .collect();
        let homs: Vec<((usize, usize), Vec<TwistWord>, HomComplex)> = pairs
            .par_iter()
            .filter_map(|&((a, x), (b, y))| {
                let words = twist.words(a, x, b, y);
                if words.is_empty() {
                    return None;
                }
                let local: HashMap<&TwistWord, usize> =
                    words.iter().enumerate().map(|(i, w)| (w, i)).collect();
                let basis = words
                    .iter()
                    .map(|w| BasisElement::new(twist.label(w), twist.degree(w)))
                    .collect();
                let differential = words
                    .iter()
                    .map(|w| {
                        twist
                            .differential(w)
                            .into_terms()
                            .map(|(v, c)| (local[&v], c))
                            .collect::<HomVector>()
                    })
                    .collect();
                Some((
                    (twist.object(a, x), twist.object(b, y)),
                    words,
                    HomComplex::new(basis, differential),
                ))
            })
            .collect();
        let mut words = BTreeMap::new();
        let mut hom_map = BTreeMap::new();
        let mut index = HashMap::new();
        for (key, ws, h) in homs {
            for (i, w) in ws.iter().enumerate() {
                index.insert(w.clone(), i);
            }
            words.insert(key, ws);
            hom_map.insert(key, h);
        }
        let triples: Vec<(usize, usize, usize)> = words
            .keys()
            .flat_map(|&(s, t)| {
                words
                    .keys()
                    .filter(move |&&(t2, _)| t2 == t)
                    .map(move |&(_, u)| (s, t, u))
            })
            .collect();
        let composition: BTreeMap<(usize, usize, usize), CompositionTable> = triples
            .par_iter()
            .map(|&(s, t, u)| {
                let (lower, upper) = (&words[&(s, t)], &words[&(t, u)]);
                let mut table = Vec::with_capacity(lower.len() * upper.len());
                for g in upper {
                    for f in lower {
                        let r = twist.compose(g, f).expect("composable by construction");
                        table.push(
                            r.into_terms()
                                .map(|(w, c)| (index[&w], c))
                                .collect::<HomVector>(),
                        );
                    }
                }
                ((s, t, u), table)
            })
            .collect();
        let object_labels = objects
            .iter()
            .map(|&(i, x)| twist.object_label(i, x))
            .collect();
        let identities = objects.iter().map(|&(_, x)| base.identity(x)).collect();
        let levels = objects
            .iter()
            .map(|&(i, x)| i as i64 + twist.base_witness().level(x))
            .collect();
        let category = FiniteDgCategory::new(object_labels, hom_map, composition, identities)?
            .with_order(DirectednessWitness::new(levels))?;
        Ok(TwistedCategory {
            twist,
            category: Arc::new(category),
            words,
            index,
        })
    }

    pub fn twist(&self) -> &TwistedTensor {
        &self.twist
    }

    pub fn category(&self) -> &Arc<FiniteDgCategory> {
        &self.category
    }

    pub fn n(&self) -> usize {
        self.twist.n()
    }

    pub fn base(&self) -> &Arc<FiniteDgCategory> {
        self.twist.base()
    }

    /// Basis words of `hom(s, t)` (object indices of the twisted category).
    pub fn words(&self, s: usize, t: usize) -> &[TwistWord] {
        self.words.get(&(s, t)).map_or(&[], |v| v.as_slice())
    }

    pub fn all_words(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<TwistWord>)> {
        self.words.iter()
    }

    pub fn index_of(&self, w: &TwistWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn to_hom_vector(&self, v: &WordCombination) -> HomVector {
        v.iter().map(|(w, c)| (self.index[w], c.clone())).collect()
    }

    /// The classical product `I_n ⊗ C` with matching object indices.
    pub fn classical(&self) -> Result<FiniteDgCategory, TwistError> {
        Ok(tensor(&interval(self.n()), self.base())?)
    }

    /// Image of a word under the projection to `I_n ⊗ C`: zero unless every
    /// chain is empty, otherwise the composite of the boundary slots.
    pub fn project_word(&self, w: &TwistWord) -> HomVector {
        if !w.is_classical() {
            return HomVector::new();
        }
        compose_path(self.base(), &w.boundary)
    }

    /// The projection `p : I_n ⊗̃ C -> I_n ⊗ C` as a checked dg functor.
    pub fn projection(&self) -> Result<DgFunctor, TwistError> {
        let target = Arc::new(self.classical()?);
        let hom_maps = self
            .words
            .iter()
            .map(|(&k, ws)| (k, ws.iter().map(|w| self.project_word(w)).collect()))
            .collect();
        let objects = (0..self.category.num_objects()).collect();
        DgFunctor::new(self.category.clone(), target, objects, hom_maps)
            .map_err(|e| internal("projection", e))
    }
}

/// Composite `m_r ∘ … ∘ m_0` in the base category.
fn compose_path(c: &FiniteDgCategory, path: &[Morphism]) -> HomVector {
    let first = path[0];
    let mut acc = HomVector::term(first.index);
    let (x, mut z) = (first.src, first.dst);
    for m in &path[1..] {
        acc = c.compose_vectors(x, z, m.dst, &HomVector::term(m.index), &acc);
        z = m.dst;
    }
    acc
}

fn internal(what: &str, e: FunctorError) -> TwistError {
    CategoryError::Internal(format!("{what}: {e}")).into()
}

/// `Id ⊗̃ F : I_n ⊗̃ C -> I_n ⊗̃ D`: boundary slots and chain entries are
/// mapped through `F`; identity components arising inside chains vanish.
pub fn twisted_map_on_second_factor(
    source: &TwistedCategory,
    target: &TwistedCategory,
    f: &DgFunctor,
) -> Result<DgFunctor, TwistError> {
    let n = source.n();
    if target.n() != n {
        return Err(TwistError::GeneratorRange(0, target.n(), n));
    }
    let (nc, nd) = (source.base().num_objects(), target.base().num_objects());
    let object_map = (0..=n)
        .flat_map(|i| (0..nc).map(move |x| (i, x)))
        .map(|(i, x)| i * nd + f.on_object(x))
        .collect();
    let mut hom_maps = BTreeMap::new();
    for (&key, ws) in source.all_words() {
        let images = ws
            .iter()
            .map(|w| target.to_hom_vector(&map_word(w, f, target.base())))
            .collect();
        hom_maps.insert(key, images);
    }
    DgFunctor::new(
        source.category().clone(),
        target.category().clone(),
        object_map,
        hom_maps,
    )
    .map_err(|e| internal("twisted functor", e))
}

fn map_morphism(f: &DgFunctor, m: Morphism) -> Vec<(Morphism, Rational)> {
    let (fx, fy) = (f.on_object(m.src), f.on_object(m.dst));
    f.on_basis(m.src, m.dst, m.index)
        .into_terms()
        .map(|(k, c)| (Morphism::new(fx, fy, k), c))
        .collect()
}

fn map_word(w: &TwistWord, f: &DgFunctor, d: &FiniteDgCategory) -> WordCombination {
    // partial images: (boundary so far, blocks so far, coefficient)
    let mut partial: Vec<(Vec<Morphism>, Vec<EpsilonBlock>, Rational)> =
        vec![(Vec::new(), Vec::new(), Rational::from_integer(1.into()))];
    for (t, m) in w.boundary.iter().enumerate() {
        let images = map_morphism(f, *m);
        partial = partial
            .into_iter()
            .flat_map(|(b, k, c)| {
                images.iter().map(move |(mm, cc)| {
                    let mut b = b.clone();
                    b.push(*mm);
                    (b, k.clone(), &c * cc)
                })
            })
            .collect();
        if let Some(blk) = w.blocks.get(t) {
            let mut chains: Vec<(Vec<Morphism>, Rational)> =
                vec![(Vec::new(), Rational::from_integer(1.into()))];
            for g in &blk.chain {
                let images: Vec<_> = map_morphism(f, *g)
                    .into_iter()
                    .filter(|(mm, _)| !mm.is_identity(d))
                    .collect();
                chains = chains
                    .into_iter()
                    .flat_map(|(ch, c)| {
                        images.iter().map(move |(mm, cc)| {
                            let mut ch = ch.clone();
                            ch.push(*mm);
                            (ch, &c * cc)
                        })
                    })
                    .collect();
            }
            partial = partial
                .into_iter()
                .flat_map(|(b, k, c)| {
                    chains.iter().map(move |(ch, cc)| {
                        let mut k = k.clone();
                        k.push(EpsilonBlock::new(blk.generator, ch.clone()));
                        (b.clone(), k, &c * cc)
                    })
                })
                .collect();
        }
    }
    let fx = |(i, x): (usize, usize)| (i, f.on_object(x));
    partial
        .into_iter()
        .map(|(boundary, blocks, c)| {
            (
                TwistWord {
                    source: fx(w.source),
                    target: fx(w.target),
                    blocks,
                    boundary,
                },
                c,
            )
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SquareReport {
    pub checked: usize,
    pub failures: usize,
    pub first_counterexample: Option<String>,
}

impl SquareReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Checks `p_D ∘ (Id ⊗̃ F) = (Id ⊗ F) ∘ p_C` on every basis word of the source.
pub fn check_projection_square(
    source: &TwistedCategory,
    target: &TwistedCategory,
    f: &DgFunctor,
) -> Result<SquareReport, TwistError> {
    let lifted = twisted_map_on_second_factor(source, target, f)?;
    let id_n = DgFunctor::identity(Arc::new(interval(source.n())));
    let classical = id_n
        .tensor(f)
        .map_err(|e| internal("classical functor", e))?;
    let mut report = SquareReport {
        checked: 0,
        failures: 0,
        first_counterexample: None,
    };
    for (&(s, t), ws) in source.all_words() {
        let (fs, ft) = (lifted.on_object(s), lifted.on_object(t));
        for (i, w) in ws.iter().enumerate() {
            report.checked += 1;
            let lhs: HomVector = lifted
                .on_basis(s, t, i)
                .iter()
                .flat_map(|(j, c)| {
                    target
                        .project_word(&target.words(fs, ft)[*j])
                        .scaled(c)
                        .into_terms()
                })
                .collect();
            let rhs = classical.apply(s, t, &source.project_word(w));
            if lhs != rhs {
                report.failures += 1;
                if report.first_counterexample.is_none() {
                    report.first_counterexample = Some(source.twist().label(w));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{collapse_category, collapse_functor};
    use crate::scalar::Field;

    #[test]
    fn materialized_intervals_validate() {
        for (n, m) in [(0, 2), (1, 1), (1, 2), (2, 1), (2, 2)] {
            let w = TwistedCategory::new(n, Arc::new(interval(m))).unwrap();
            assert_eq!(w.category().num_objects(), (n + 1) * (m + 1));
        }
    }

    #[test]
    fn identities_absorb() {
        let w = TwistedCategory::new(1, Arc::new(interval(1))).unwrap();
        let c = w.category();
        let (s, t) = (0, 3);
        for i in 0..c.hom(s, t).len() {
            assert_eq!(c.compose(s, s, t, i, c.identity(s)), HomVector::term(i));
            assert_eq!(c.compose(s, t, t, c.identity(t), i), HomVector::term(i));
        }
    }

    #[test]
    fn projection_is_quasi_equivalence_on_smallest_case() {
        let w = TwistedCategory::new(1, Arc::new(interval(1))).unwrap();
        let p = w.projection().unwrap();
        let cert = p.quasi_equivalence_certificate(Field::Q).unwrap();
        assert!(cert.quasi_equivalence);
        // the ε word maps to zero
        let eps = w
            .words(0, 3)
            .iter()
            .position(|x| !x.is_classical())
            .unwrap();
        assert!(p.on_basis(0, 3, eps).is_zero());
    }

    #[test]
    fn second_factor_identity_is_identity() {
        let c = Arc::new(interval(2));
        let w = TwistedCategory::new(1, c.clone()).unwrap();
        let f = twisted_map_on_second_factor(&w, &w, &DgFunctor::identity(c)).unwrap();
        for (&(s, t), ws) in w.all_words() {
            for i in 0..ws.len() {
                assert_eq!(f.on_basis(s, t, i), HomVector::term(i));
            }
        }
    }

    #[test]
    fn collapse_square_commutes() {
        let f = collapse_functor();
        let src = TwistedCategory::new(1, Arc::new(collapse_category())).unwrap();
        let tgt = TwistedCategory::new(1, Arc::new(interval(1))).unwrap();
        let r = check_projection_square(&src, &tgt, &f).unwrap();
        assert!(r.passed(), "{:?}", r.first_counterexample);
        let lifted = twisted_map_on_second_factor(&src, &tgt, &f).unwrap();
        assert!(
            lifted
                .quasi_equivalence_certificate(Field::Q)
                .unwrap()
                .quasi_equivalence
        );
    }
}
