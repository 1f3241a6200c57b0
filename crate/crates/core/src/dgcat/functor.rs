use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::category::{FiniteDgCategory, HomVector};
use super::tensor::tensor_unchecked;
use crate::complex::{ChainMap, ComplexError};
use crate::linalg::{Matrix, SparseVector};
use crate::scalar::{Field, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctorError {
    #[error("object map has {found} entries, source has {expected} objects")]
    ObjectMapSize { found: usize, expected: usize },
    #[error("object {0} is sent outside the target")]
    ObjectOutOfRange(String),
    #[error("image of {label}: {detail}")]
    Image { label: String, detail: String },
    #[error("functor does not preserve the identity of {0}")]
    Identity(String),
    #[error("functor does not commute with d on {0}")]
    Differential(String),
    #[error("functor does not preserve the composite {0}")]
    Composition(String),
    #[error("functor is not bijective on objects")]
    NotBijectiveOnObjects,
    #[error("source and target are not composable")]
    NotComposable,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A dg functor between finite dg categories: an object map plus, for every
/// nonempty `hom(x, y)`, the images of its basis elements in
/// `hom(F x, F y)`. Missing hom maps are zero.
#[derive(Clone, Debug)]
pub struct DgFunctor {
    source: Arc<FiniteDgCategory>,
    target: Arc<FiniteDgCategory>,
    object_map: Vec<usize>,
    hom_maps: BTreeMap<(usize, usize), Vec<HomVector>>,
}

impl DgFunctor {
    /// Builds a functor and checks degrees, identities, `d` and composition.
    pub fn new(
        source: Arc<FiniteDgCategory>,
        target: Arc<FiniteDgCategory>,
        object_map: Vec<usize>,
        hom_maps: BTreeMap<(usize, usize), Vec<HomVector>>,
    ) -> Result<Self, FunctorError> {
        let f = DgFunctor {
            source,
            target,
            object_map,
            hom_maps,
        };
        f.check()?;
        Ok(f)
    }

    pub fn identity(c: Arc<FiniteDgCategory>) -> Self {
        let n = c.num_objects();
        let hom_maps = c
            .nonzero_pairs()
            .into_iter()
            .map(|(x, y)| {
                (
                    (x, y),
                    (0..c.hom(x, y).len()).map(HomVector::term).collect(),
                )
            })
            .collect();
        DgFunctor {
            source: c.clone(),
            target: c,
            object_map: (0..n).collect(),
            hom_maps,
        }
    }

    pub fn source(&self) -> &Arc<FiniteDgCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteDgCategory> {
        &self.target
    }

    pub fn object_map(&self) -> &[usize] {
        &self.object_map
    }

    pub fn on_object(&self, x: usize) -> usize {
        self.object_map[x]
    }

    /// Image of a basis element of `hom(x, y)`.
    pub fn on_basis(&self, x: usize, y: usize, i: usize) -> HomVector {
        self.hom_maps
            .get(&(x, y))
            .and_then(|m| m.get(i).cloned())
            .unwrap_or_default()
    }

    pub fn apply(&self, x: usize, y: usize, v: &HomVector) -> HomVector {
        v.flat_map(|i| self.on_basis(x, y, *i))
    }

    fn check(&self) -> Result<(), FunctorError> {
        let (s, t) = (&*self.source, &*self.target);
        if self.object_map.len() != s.num_objects() {
            return Err(FunctorError::ObjectMapSize {
                found: self.object_map.len(),
                expected: s.num_objects(),
            });
        }
        for (x, &fx) in self.object_map.iter().enumerate() {
            if fx >= t.num_objects() {
                return Err(FunctorError::ObjectOutOfRange(
                    s.object_label(x).to_string(),
                ));
            }
        }
        for (&(x, y), images) in &self.hom_maps {
            let h = s.hom(x, y);
            let th = t.hom(self.on_object(x), self.on_object(y));
            if images.len() > h.len() {
                return Err(FunctorError::Image {
                    label: format!("hom({},{})", s.object_label(x), s.object_label(y)),
                    detail: format!("{} images for {} basis elements", images.len(), h.len()),
                });
            }
            for (i, img) in images.iter().enumerate() {
                for (j, _) in img.iter() {
                    let label = h.basis[i].label.clone();
                    let b = th.basis.get(*j).ok_or_else(|| FunctorError::Image {
                        label: label.clone(),
                        detail: format!("index {j} outside target hom of size {}", th.len()),
                    })?;
                    if b.degree != h.degree(i) {
                        return Err(FunctorError::Image {
                            label,
                            detail: format!("contains {} of degree {}", b.label, b.degree),
                        });
                    }
                }
            }
        }
        for x in 0..s.num_objects() {
            let fx = self.on_object(x);
            if self.on_basis(x, x, s.identity(x)) != HomVector::term(t.identity(fx)) {
                return Err(FunctorError::Identity(s.object_label(x).to_string()));
            }
        }
        for (x, y) in s.nonzero_pairs() {
            let (fx, fy) = (self.on_object(x), self.on_object(y));
            for i in 0..s.hom(x, y).len() {
                let lhs = self.apply(x, y, s.differential(x, y, i));
                let rhs = t.differential_of(fx, fy, &self.on_basis(x, y, i));
                if lhs != rhs {
                    return Err(FunctorError::Differential(s.label(x, y, i).to_string()));
                }
            }
        }
        for (&(x, y, z), table) in s.composition_tables() {
            let nf = s.hom(x, y).len();
            let (fx, fy, fz) = (self.on_object(x), self.on_object(y), self.on_object(z));
            for g in 0..s.hom(y, z).len() {
                for f in 0..nf {
                    let lhs = self.apply(x, z, &table[g * nf + f]);
                    let rhs = t.compose_vectors(
                        fx,
                        fy,
                        fz,
                        &self.on_basis(y, z, g),
                        &self.on_basis(x, y, f),
                    );
                    if lhs != rhs {
                        return Err(FunctorError::Composition(format!(
                            "{} ∘ {}",
                            s.label(y, z, g),
                            s.label(x, y, f)
                        )));
                    }
                }
            }
        }
        // composites absent from the source table are zero; their images must be too
        for x in 0..s.num_objects() {
            for y in 0..s.num_objects() {
                for z in 0..s.num_objects() {
                    if s.composition_table(x, y, z).is_some() {
                        continue;
                    }
                    let (fx, fy, fz) = (self.on_object(x), self.on_object(y), self.on_object(z));
                    for g in 0..s.hom(y, z).len() {
                        for f in 0..s.hom(x, y).len() {
                            let r = t.compose_vectors(
                                fx,
                                fy,
                                fz,
                                &self.on_basis(y, z, g),
                                &self.on_basis(x, y, f),
                            );
                            if !r.is_zero() {
                                return Err(FunctorError::Composition(format!(
                                    "{} ∘ {}",
                                    s.label(y, z, g),
                                    s.label(x, y, f)
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &DgFunctor) -> Result<DgFunctor, FunctorError> {
        if !Arc::ptr_eq(&self.target, &other.source) {
            return Err(FunctorError::NotComposable);
        }
        let object_map = self
            .object_map
            .iter()
            .map(|&y| other.on_object(y))
            .collect();
        let hom_maps = self
            .hom_maps
            .iter()
            .map(|(&(x, y), imgs)| {
                let (fx, fy) = (self.on_object(x), self.on_object(y));
                (
                    (x, y),
                    imgs.iter().map(|v| other.apply(fx, fy, v)).collect(),
                )
            })
            .collect();
        Ok(DgFunctor {
            source: self.source.clone(),
            target: other.target.clone(),
            object_map,
            hom_maps,
        })
    }

    /// `F ⊗ G : C ⊗ D -> C' ⊗ D'` (degree-zero functors, so no signs).
    pub fn tensor(&self, other: &DgFunctor) -> Result<DgFunctor, FunctorError> {
        let internal = |e: super::category::CategoryError| FunctorError::Image {
            label: "tensor".into(),
            detail: e.to_string(),
        };
        let source = Arc::new(tensor_unchecked(&self.source, &other.source).map_err(internal)?);
        let target = Arc::new(tensor_unchecked(&self.target, &other.target).map_err(internal)?);
        let (nd, nd2) = (other.source.num_objects(), other.target.num_objects());
        let mut object_map = Vec::with_capacity(source.num_objects());
        for x in 0..self.source.num_objects() {
            for u in 0..nd {
                object_map.push(self.on_object(x) * nd2 + other.on_object(u));
            }
        }
        let mut hom_maps = BTreeMap::new();
        for (x, y) in self.source.nonzero_pairs() {
            for (u, v) in other.source.nonzero_pairs() {
                let width = other
                    .target
                    .hom(other.on_object(u), other.on_object(v))
                    .len();
                let dl = other.source.hom(u, v).len();
                let mut imgs = Vec::new();
                for a in 0..self.source.hom(x, y).len() {
                    let fa = self.on_basis(x, y, a);
                    for b in 0..dl {
                        let gb = other.on_basis(u, v, b);
                        let mut r = HomVector::new();
                        for (i, p) in fa.iter() {
                            for (j, q) in gb.iter() {
                                r.add_term(i * width + j, p * q);
                            }
                        }
                        imgs.push(r);
                    }
                }
                hom_maps.insert((x * nd + u, y * nd + v), imgs);
            }
        }
        DgFunctor::new(source, target, object_map, hom_maps)
    }

    /// The map of hom complexes `hom(x, y) -> hom(F x, F y)` over `field`.
    pub fn hom_chain_map(
        &self,
        x: usize,
        y: usize,
        field: Field,
    ) -> Result<ChainMap, FunctorError> {
        let (fx, fy) = (self.on_object(x), self.on_object(y));
        let src = self.source.hom(x, y).to_chain_complex(field)?;
        let tgt = self.target.hom(fx, fy).to_chain_complex(field)?;
        let mut components = BTreeMap::new();
        for (d, members) in &src.by_degree {
            let mut cols = Vec::with_capacity(members.len());
            for &i in members {
                let parts = tgt.split(&self.on_basis(x, y, i), field)?;
                cols.push(parts.get(d).cloned().unwrap_or_else(SparseVector::new));
            }
            components.insert(*d, Matrix::from_columns(tgt.complex.dim(*d), field, cols));
        }
        Ok(ChainMap::new(src.complex, tgt.complex, components)?)
    }

    /// Per-pair quasi-isomorphism check for a functor that is bijective on
    /// objects; other functors are rejected.
    pub fn quasi_equivalence_certificate(
        &self,
        field: Field,
    ) -> Result<QuasiEquivalenceCertificate, FunctorError> {
        let n = self.source.num_objects();
        let mut seen = vec![false; self.target.num_objects()];
        for &y in &self.object_map {
            seen[y] = true;
        }
        if n != self.target.num_objects() || !seen.iter().all(|b| *b) {
            return Err(FunctorError::NotBijectiveOnObjects);
        }
        let mut pairs = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let (fx, fy) = (self.on_object(x), self.on_object(y));
                if self.source.hom(x, y).is_empty() && self.target.hom(fx, fy).is_empty() {
                    continue;
                }
                let induced = self.hom_chain_map(x, y, field)?.induced_on_cohomology()?;
                pairs.push(PairCertificate {
                    source: (
                        self.source.object_label(x).into(),
                        self.source.object_label(y).into(),
                    ),
                    target: (
                        self.target.object_label(fx).into(),
                        self.target.object_label(fy).into(),
                    ),
                    source_cohomology: induced.source_dims,
                    target_cohomology: induced.target_dims,
                    quasi_isomorphism: induced.is_quasi_iso,
                });
            }
        }
        let quasi_equivalence = pairs.iter().all(|p| p.quasi_isomorphism);
        Ok(QuasiEquivalenceCertificate {
            field,
            pairs,
            quasi_equivalence,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCertificate {
    pub source: (String, String),
    pub target: (String, String),
    pub source_cohomology: BTreeMap<i32, usize>,
    pub target_cohomology: BTreeMap<i32, usize>,
    pub quasi_isomorphism: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiEquivalenceCertificate {
    pub field: Field,
    pub pairs: Vec<PairCertificate>,
    pub quasi_equivalence: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::interval::interval;

    #[test]
    fn identity_is_a_quasi_equivalence() {
        let c = Arc::new(interval(2));
        let id = DgFunctor::identity(c);
        let cert = id.quasi_equivalence_certificate(Field::Q).unwrap();
        assert!(cert.quasi_equivalence);
        assert_eq!(cert.pairs.len(), 6);
    }

    #[test]
    fn collapsing_objects_is_not_bijective() {
        let src = Arc::new(interval(1));
        let tgt = Arc::new(interval(0));
        let maps = [
            ((0, 0), vec![HomVector::term(0)]),
            ((1, 1), vec![HomVector::term(0)]),
            ((0, 1), vec![HomVector::term(0)]),
        ]
        .into_iter()
        .collect();
        let f = DgFunctor::new(src, tgt, vec![0, 0], maps).unwrap();
        assert_eq!(
            f.quasi_equivalence_certificate(Field::Q).unwrap_err(),
            FunctorError::NotBijectiveOnObjects
        );
    }

    #[test]
    fn identity_must_be_preserved() {
        let c = Arc::new(interval(1));
        let maps = [((0, 0), vec![HomVector::new()])].into_iter().collect();
        let err = DgFunctor::new(c.clone(), c, vec![0, 1], maps).unwrap_err();
        assert!(matches!(err, FunctorError::Identity(_)));
    }

    #[test]
    fn composition_with_identity() {
        let c = Arc::new(interval(1));
        let id = DgFunctor::identity(c.clone());
        let twice = id.then(&id).unwrap();
        assert_eq!(twice.object_map(), &[0, 1]);
        assert_eq!(twice.on_basis(0, 1, 0), HomVector::term(0));
    }

    #[test]
    fn tensor_of_identities() {
        let c = Arc::new(interval(1));
        let id = DgFunctor::identity(c);
        let t = id.tensor(&id).unwrap();
        assert!(
            t.quasi_equivalence_certificate(Field::Q)
                .unwrap()
                .quasi_equivalence
        );
    }
}
