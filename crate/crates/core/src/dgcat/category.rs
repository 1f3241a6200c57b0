use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::combination::Combination;
use crate::complex::ChainComplex;
use crate::linalg::{Matrix, SparseVector};
use crate::scalar::{sign, Field, ScalarError};

use super::directed::DirectednessWitness;

/// Linear combination of basis elements of one hom complex.
pub type HomVector = Combination<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BasisElement {
    pub label: String,
    pub degree: i32,
}

impl BasisElement {
    pub fn new(label: impl Into<String>, degree: i32) -> Self {
        BasisElement {
            label: label.into(),
            degree,
        }
    }
}

/// Graded basis of `hom(x, y)` together with its differential.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomComplex {
    pub basis: Vec<BasisElement>,
    /// `differential[i]` is `d(basis[i])`.
    pub differential: Vec<HomVector>,
}

impl HomComplex {
    pub fn new(basis: Vec<BasisElement>, differential: Vec<HomVector>) -> Self {
        HomComplex {
            basis,
            differential,
        }
    }

    /// All differentials zero.
    pub fn closed(basis: Vec<BasisElement>) -> Self {
        let n = basis.len();
        HomComplex {
            basis,
            differential: vec![HomVector::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].degree
    }

    /// Graded dimensions.
    pub fn dims(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for b in &self.basis {
            *out.entry(b.degree).or_insert(0) += 1;
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.basis
            .iter()
            .map(|b| if b.degree.rem_euclid(2) == 0 { 1 } else { -1 })
            .sum()
    }

    /// Regroups the basis by degree (keeping relative order) and builds the
    /// cochain complex over `field`.
    pub fn to_chain_complex(&self, field: Field) -> Result<GradedHom, ScalarError> {
        let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        let mut position = Vec::with_capacity(self.basis.len());
        for (i, b) in self.basis.iter().enumerate() {
            let slot = by_degree.entry(b.degree).or_default();
            position.push((b.degree, slot.len()));
            slot.push(i);
        }
        let mut diffs = BTreeMap::new();
        for (d, members) in &by_degree {
            let rows = by_degree.get(&(d + 1)).map_or(0, |v| v.len());
            let mut cols = Vec::with_capacity(members.len());
            for &i in members {
                let mut entries = Vec::new();
                for (j, c) in self.differential[i].iter() {
                    entries.push((position[*j].1, field.from_rational(c)?));
                }
                cols.push(SparseVector::from_entries(entries));
            }
            diffs.insert(*d, Matrix::from_columns(rows, field, cols));
        }
        let dims = by_degree.iter().map(|(d, v)| (*d, v.len())).collect();
        let labels = by_degree
            .iter()
            .map(|(d, v)| (*d, v.iter().map(|i| self.basis[*i].label.clone()).collect()))
            .collect();
        let complex = ChainComplex::new(field, dims, diffs)
            .and_then(|c| c.with_labels(labels))
            .expect("hom complex shapes are consistent by construction");
        Ok(GradedHom {
            complex,
            position,
            by_degree,
        })
    }
}

/// A hom complex regrouped by degree.
#[derive(Clone, Debug)]
pub struct GradedHom {
    pub complex: ChainComplex,
    /// basis index -> (degree, position within degree)
    pub position: Vec<(i32, usize)>,
    /// degree -> basis indices
    pub by_degree: BTreeMap<i32, Vec<usize>>,
}

impl GradedHom {
    /// Splits a hom vector into per-degree sparse vectors.
    pub fn split(
        &self,
        v: &HomVector,
        field: Field,
    ) -> Result<BTreeMap<i32, SparseVector>, ScalarError> {
        let mut parts: BTreeMap<i32, Vec<(usize, crate::scalar::Scalar)>> = BTreeMap::new();
        for (i, c) in v.iter() {
            let (d, p) = self.position[*i];
            parts
                .entry(d)
                .or_default()
                .push((p, field.from_rational(c)?));
        }
        Ok(parts
            .into_iter()
            .map(|(d, e)| (d, SparseVector::from_entries(e)))
            .collect())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("duplicate object label {0:?}")]
    DuplicateObject(String),
    #[error("duplicate basis label {0:?}")]
    DuplicateLabel(String),
    #[error("hom({0},{1}) refers to a missing object")]
    MissingObject(usize, usize),
    #[error("object {object:?}: identity {detail}")]
    Identity { object: String, detail: String },
    #[error("{context}: reference to missing basis element {index} (hom has {len})")]
    MissingBasis {
        context: String,
        index: usize,
        len: usize,
    },
    #[error("{context}: degree {found}, expected {expected}")]
    Degree {
        context: String,
        found: i32,
        expected: i32,
    },
    #[error("{context}: composition table has {found} entries, expected {expected}")]
    TableSize {
        context: String,
        found: usize,
        expected: usize,
    },
    #[error("input category fails validation: {0}")]
    InvalidInput(String),
    #[error("category is not directed: {0}")]
    NotDirected(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Composition structure constants for a triple `(x, y, z)`:
/// entry `g * dim hom(x,y) + f` is `g ∘ f` in `hom(x, z)`.
pub type CompositionTable = Vec<HomVector>;

/// A finite dg category given by explicit bases and structure constants.
#[derive(Clone, Debug)]
pub struct FiniteDgCategory {
    objects: Vec<String>,
    homs: Vec<HomComplex>,
    composition: BTreeMap<(usize, usize, usize), CompositionTable>,
    identities: Vec<usize>,
    order: Option<DirectednessWitness>,
    labels: HashMap<String, (usize, usize, usize)>,
}

impl FiniteDgCategory {
    /// Assembles a category and checks its structure (indices, degrees, table
    /// shapes, identity designations). Axioms are checked by [`validate`].
    ///
    /// Hom complexes missing from `homs` are zero; composition tables missing
    /// from `composition` are zero.
    ///
    /// [`validate`]: FiniteDgCategory::validate
    pub fn new(
        objects: Vec<String>,
        mut homs: BTreeMap<(usize, usize), HomComplex>,
        composition: BTreeMap<(usize, usize, usize), CompositionTable>,
        identities: Vec<usize>,
    ) -> Result<Self, CategoryError> {
        let n = objects.len();
        {
            let mut seen = std::collections::HashSet::new();
            for o in &objects {
                if !seen.insert(o.as_str()) {
                    return Err(CategoryError::DuplicateObject(o.clone()));
                }
            }
        }
        if let Some(&(x, y)) = homs.keys().find(|(x, y)| *x >= n || *y >= n) {
            return Err(CategoryError::MissingObject(x, y));
        }
        let mut flat = vec![HomComplex::default(); n * n];
        for ((x, y), h) in std::mem::take(&mut homs) {
            flat[x * n + y] = h;
        }
        let mut labels = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                let h = &flat[x * n + y];
                if h.differential.len() != h.basis.len() {
                    return Err(CategoryError::TableSize {
                        context: format!("differential of hom({},{})", objects[x], objects[y]),
                        found: h.differential.len(),
                        expected: h.basis.len(),
                    });
                }
                for (i, b) in h.basis.iter().enumerate() {
                    if labels.insert(b.label.clone(), (x, y, i)).is_some() {
                        return Err(CategoryError::DuplicateLabel(b.label.clone()));
                    }
                    for (j, _) in h.differential[i].iter() {
                        let ctx = || format!("d({})", b.label);
                        let t = h.basis.get(*j).ok_or_else(|| CategoryError::MissingBasis {
                            context: ctx(),
                            index: *j,
                            len: h.len(),
                        })?;
                        if t.degree != b.degree + 1 {
                            return Err(CategoryError::Degree {
                                context: format!("{} contains {}", ctx(), t.label),
                                found: t.degree,
                                expected: b.degree + 1,
                            });
                        }
                    }
                }
            }
        }
        if identities.len() != n {
            let object = objects
                .get(identities.len())
                .cloned()
                .unwrap_or_else(|| "?".into());
            return Err(CategoryError::Identity {
                object,
                detail: "not designated".into(),
            });
        }
        for (x, &i) in identities.iter().enumerate() {
            let h = &flat[x * n + x];
            match h.basis.get(i) {
                None => {
                    return Err(CategoryError::Identity {
                        object: objects[x].clone(),
                        detail: format!("index {i} outside hom of size {}", h.len()),
                    })
                }
                Some(b) if b.degree != 0 => {
                    return Err(CategoryError::Identity {
                        object: objects[x].clone(),
                        detail: format!("{} has degree {}", b.label, b.degree),
                    })
                }
                _ => {}
            }
        }
        for (&(x, y, z), table) in &composition {
            if x >= n || y >= n || z >= n {
                return Err(CategoryError::MissingObject(x, z));
            }
            let (hf, hg, hr) = (&flat[x * n + y], &flat[y * n + z], &flat[x * n + z]);
            let ctx = || {
                format!(
                    "composition {} -> {} -> {}",
                    objects[x], objects[y], objects[z]
                )
            };
            if table.len() != hf.len() * hg.len() {
                return Err(CategoryError::TableSize {
                    context: ctx(),
                    found: table.len(),
                    expected: hf.len() * hg.len(),
                });
            }
            for g in 0..hg.len() {
                for f in 0..hf.len() {
                    let expected = hg.degree(g) + hf.degree(f);
                    for (k, _) in table[g * hf.len() + f].iter() {
                        let t = hr
                            .basis
                            .get(*k)
                            .ok_or_else(|| CategoryError::MissingBasis {
                                context: format!("{} ∘ {}", hg.basis[g].label, hf.basis[f].label),
                                index: *k,
                                len: hr.len(),
                            })?;
                        if t.degree != expected {
                            return Err(CategoryError::Degree {
                                context: format!(
                                    "{} ∘ {} contains {}",
                                    hg.basis[g].label, hf.basis[f].label, t.label
                                ),
                                found: t.degree,
                                expected,
                            });
                        }
                    }
                }
            }
        }
        Ok(FiniteDgCategory {
            objects,
            homs: flat,
            composition,
            identities,
            order: None,
            labels,
        })
    }

    /// Attaches a directedness witness after checking it.
    pub fn with_order(mut self, w: DirectednessWitness) -> Result<Self, CategoryError> {
        w.check(&self)?;
        self.order = Some(w);
        Ok(self)
    }

    pub fn order(&self) -> Option<&DirectednessWitness> {
        self.order.as_ref()
    }

    /// The attached witness, or one derived from the hom structure.
    pub fn directedness(&self) -> Result<DirectednessWitness, CategoryError> {
        match &self.order {
            Some(w) => {
                w.check(self)?;
                Ok(w.clone())
            }
            None => DirectednessWitness::derive(self),
        }
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_label(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn object_index(&self, label: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == label)
    }

    pub fn hom(&self, x: usize, y: usize) -> &HomComplex {
        &self.homs[x * self.objects.len() + y]
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identities[x]
    }

    pub fn is_identity(&self, x: usize, y: usize, i: usize) -> bool {
        x == y && self.identities[x] == i
    }

    pub fn degree(&self, x: usize, y: usize, i: usize) -> i32 {
        self.hom(x, y).degree(i)
    }

    pub fn label(&self, x: usize, y: usize, i: usize) -> &str {
        &self.hom(x, y).basis[i].label
    }

    /// Location `(x, y, index)` of a basis label.
    pub fn find_label(&self, label: &str) -> Option<(usize, usize, usize)> {
        self.labels.get(label).copied()
    }

    pub fn differential(&self, x: usize, y: usize, i: usize) -> &HomVector {
        &self.hom(x, y).differential[i]
    }

    pub fn differential_of(&self, x: usize, y: usize, v: &HomVector) -> HomVector {
        v.flat_map(|i| self.differential(x, y, *i).clone())
    }

    pub fn composition_table(&self, x: usize, y: usize, z: usize) -> Option<&CompositionTable> {
        self.composition.get(&(x, y, z))
    }

    pub fn composition_tables(&self) -> &BTreeMap<(usize, usize, usize), CompositionTable> {
        &self.composition
    }

    /// `g ∘ f` for basis elements `f ∈ hom(x,y)`, `g ∈ hom(y,z)`.
    pub fn compose(&self, x: usize, y: usize, z: usize, g: usize, f: usize) -> HomVector {
        match self.composition.get(&(x, y, z)) {
            Some(t) => t[g * self.hom(x, y).len() + f].clone(),
            None => HomVector::new(),
        }
    }

    pub fn compose_vectors(
        &self,
        x: usize,
        y: usize,
        z: usize,
        g: &HomVector,
        f: &HomVector,
    ) -> HomVector {
        let mut out = HomVector::new();
        for (gi, gc) in g.iter() {
            for (fi, fc) in f.iter() {
                out.add_scaled(&self.compose(x, y, z, *gi, *fi), &(gc * fc));
            }
        }
        out
    }

    pub fn total_basis_size(&self) -> usize {
        self.homs.iter().map(|h| h.len()).sum()
    }

    pub fn max_hom_size(&self) -> usize {
        self.homs.iter().map(|h| h.len()).max().unwrap_or(0)
    }

    /// Nonempty hom pairs `(x, y)`.
    pub fn nonzero_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.objects.len();
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| !self.hom(x, y).is_empty())
            .collect()
    }

    /// Checks every axiom exhaustively over basis elements.
    pub fn validate(&self) -> ValidationReport {
        let n = self.objects.len();
        let mut checks = Vec::new();

        // d^2
        let mut d2 = AxiomCheck::new(Axiom::DifferentialSquare);
        for x in 0..n {
            for y in 0..n {
                for i in 0..self.hom(x, y).len() {
                    d2.checked += 1;
                    let dd = self.differential_of(x, y, self.differential(x, y, i));
                    if !dd.is_zero() {
                        d2.fail(|| format!("d(d({})) ≠ 0", self.label(x, y, i)));
                    }
                }
            }
        }
        checks.push(d2);

        // Leibniz, parallel over the source object
        let per_x: Vec<AxiomCheck> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut c = AxiomCheck::new(Axiom::Leibniz);
                for y in 0..n {
                    for z in 0..n {
                        let (hf, hg) = (self.hom(x, y), self.hom(y, z));
                        for g in 0..hg.len() {
                            for f in 0..hf.len() {
                                c.checked += 1;
                                if let Some(msg) = self.leibniz_defect(x, y, z, g, f) {
                                    c.fail(|| msg);
                                }
                            }
                        }
                    }
                }
                c
            })
            .collect();
        checks.push(AxiomCheck::merge(Axiom::Leibniz, per_x));

        let per_x: Vec<AxiomCheck> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut c = AxiomCheck::new(Axiom::Associativity);
                for y in 0..n {
                    if self.hom(x, y).is_empty() {
                        continue;
                    }
                    for z in 0..n {
                        if self.hom(y, z).is_empty() {
                            continue;
                        }
                        for w in 0..n {
                            let (hf, hg, hh) = (self.hom(x, y), self.hom(y, z), self.hom(z, w));
                            for h in 0..hh.len() {
                                for g in 0..hg.len() {
                                    let hg_ = self.compose(y, z, w, h, g);
                                    for f in 0..hf.len() {
                                        c.checked += 1;
                                        let left = self.compose_vectors(
                                            x,
                                            y,
                                            w,
                                            &hg_,
                                            &HomVector::term(f),
                                        );
                                        let gf = self.compose(x, y, z, g, f);
                                        let right =
                                            self.compose_vectors(x, z, w, &HomVector::term(h), &gf);
                                        if left != right {
                                            c.fail(|| {
                                                format!(
                                                    "({} ∘ {}) ∘ {} ≠ {} ∘ ({} ∘ {})",
                                                    hh.basis[h].label,
                                                    hg.basis[g].label,
                                                    hf.basis[f].label,
                                                    hh.basis[h].label,
                                                    hg.basis[g].label,
                                                    hf.basis[f].label
                                                )
                                            });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                c
            })
            .collect();
        checks.push(AxiomCheck::merge(Axiom::Associativity, per_x));

        let mut units = AxiomCheck::new(Axiom::Units);
        for x in 0..n {
            let id = self.identities[x];
            units.checked += 1;
            if !self.differential(x, x, id).is_zero() {
                units.fail(|| format!("d({}) ≠ 0", self.label(x, x, id)));
            }
            for y in 0..n {
                // id_y ∘ f and f ∘ id_x for f ∈ hom(x, y)
                for f in 0..self.hom(x, y).len() {
                    units.checked += 2;
                    let expect = HomVector::term(f);
                    if self.compose(x, y, y, self.identities[y], f) != expect {
                        units.fail(|| {
                            format!(
                                "{} ∘ {} ≠ {}",
                                self.label(y, y, self.identities[y]),
                                self.label(x, y, f),
                                self.label(x, y, f)
                            )
                        });
                    }
                    if self.compose(x, x, y, f, id) != expect {
                        units.fail(|| {
                            format!(
                                "{} ∘ {} ≠ {}",
                                self.label(x, y, f),
                                self.label(x, x, id),
                                self.label(x, y, f)
                            )
                        });
                    }
                }
            }
        }
        checks.push(units);
        ValidationReport { checks }
    }

    /// `None` when `d(g∘f) = dg∘f + (-1)^{|g|} g∘df` holds.
    pub fn leibniz_defect(
        &self,
        x: usize,
        y: usize,
        z: usize,
        g: usize,
        f: usize,
    ) -> Option<String> {
        let lhs = self.differential_of(x, z, &self.compose(x, y, z, g, f));
        let mut rhs =
            self.compose_vectors(x, y, z, self.differential(y, z, g), &HomVector::term(f));
        let s = sign(self.degree(y, z, g) as i64);
        rhs.add_scaled(
            &self.compose_vectors(x, y, z, &HomVector::term(g), self.differential(x, y, f)),
            &s,
        );
        (lhs != rhs).then(|| {
            format!(
                "Leibniz fails for {} ∘ {}",
                self.label(y, z, g),
                self.label(x, y, f)
            )
        })
    }

    /// Replaces one composition constant; used to build broken fixtures.
    pub fn with_composition_entry(
        mut self,
        (x, y, z): (usize, usize, usize),
        g: usize,
        f: usize,
        value: HomVector,
    ) -> Self {
        let len_f = self.hom(x, y).len();
        let len_g = self.hom(y, z).len();
        let t = self
            .composition
            .entry((x, y, z))
            .or_insert_with(|| vec![HomVector::new(); len_f * len_g]);
        t[g * len_f + f] = value;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    DifferentialSquare,
    Leibniz,
    Associativity,
    Units,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::DifferentialSquare => "d^2 = 0",
            Axiom::Leibniz => "Leibniz",
            Axiom::Associativity => "associativity",
            Axiom::Units => "units",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub checked: usize,
    pub failures: usize,
    pub first_counterexample: Option<String>,
}

impl AxiomCheck {
    fn new(axiom: Axiom) -> Self {
        AxiomCheck {
            axiom,
            checked: 0,
            failures: 0,
            first_counterexample: None,
        }
    }

    fn fail(&mut self, msg: impl FnOnce() -> String) {
        self.failures += 1;
        if self.first_counterexample.is_none() {
            self.first_counterexample = Some(msg());
        }
    }

    fn merge(axiom: Axiom, parts: Vec<AxiomCheck>) -> AxiomCheck {
        let mut out = AxiomCheck::new(axiom);
        for p in parts {
            out.checked += p.checked;
            out.failures += p.failures;
            if out.first_counterexample.is_none() {
                out.first_counterexample = p.first_counterexample;
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn get(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .expect("all axioms checked")
    }

    pub fn first_failure(&self) -> Option<String> {
        self.checks.iter().find(|c| !c.passed()).map(|c| {
            format!(
                "{}: {}",
                c.axiom,
                c.first_counterexample.clone().unwrap_or_default()
            )
        })
    }
}
