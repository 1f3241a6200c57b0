//! Finite cochain complexes (differential of degree +1), chain maps and
//! cohomology with explicit representatives.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::linalg::{Echelon, Matrix, SparseVector};
use crate::scalar::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("differential at degree {degree} has shape {found:?}, expected {expected:?}")]
    Shape {
        degree: i32,
        found: (usize, usize),
        expected: (usize, usize),
    },
    #[error("d∘d is nonzero starting at degree {degree}")]
    NotAComplex { degree: i32 },
    #[error("map does not commute with differentials at degree {degree}")]
    NotAChainMap { degree: i32 },
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("{0} labels given for degree {1} of dimension {2}")]
    Labels(usize, i32, usize),
}

/// Graded finite-dimensional vector space with a degree +1 differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    field: Field,
    dims: BTreeMap<i32, usize>,
    differentials: BTreeMap<i32, Matrix>,
    labels: BTreeMap<i32, Vec<String>>,
}

impl ChainComplex {
    /// `differentials[d]` maps degree `d` to degree `d + 1` and must have shape
    /// `dims(d+1) x dims(d)`. Zero dimensions may be omitted.
    pub fn new(
        field: Field,
        dims: BTreeMap<i32, usize>,
        differentials: BTreeMap<i32, Matrix>,
    ) -> Result<Self, ComplexError> {
        let dims: BTreeMap<i32, usize> = dims.into_iter().filter(|(_, n)| *n > 0).collect();
        let dim = |d: i32| dims.get(&d).copied().unwrap_or(0);
        let mut kept = BTreeMap::new();
        for (d, m) in differentials {
            if m.field() != field {
                return Err(ComplexError::FieldMismatch(field, m.field()));
            }
            let expected = (dim(d + 1), dim(d));
            if (m.rows(), m.cols()) != expected {
                return Err(ComplexError::Shape {
                    degree: d,
                    found: (m.rows(), m.cols()),
                    expected,
                });
            }
            if !m.is_zero() {
                kept.insert(d, m);
            }
        }
        let labels = dims
            .iter()
            .map(|(d, n)| (*d, (0..*n).map(|i| format!("e{d}_{i}")).collect()))
            .collect();
        Ok(ChainComplex {
            field,
            dims,
            differentials: kept,
            labels,
        })
    }

    pub fn with_labels(mut self, labels: BTreeMap<i32, Vec<String>>) -> Result<Self, ComplexError> {
        for (d, l) in &labels {
            if l.len() != self.dim(*d) {
                return Err(ComplexError::Labels(l.len(), *d, self.dim(*d)));
            }
        }
        for (d, l) in labels {
            if !l.is_empty() {
                self.labels.insert(d, l);
            }
        }
        Ok(self)
    }

    pub fn zero(field: Field) -> Self {
        ChainComplex {
            field,
            dims: BTreeMap::new(),
            differentials: BTreeMap::new(),
            labels: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self, d: i32) -> usize {
        self.dims.get(&d).copied().unwrap_or(0)
    }

    /// Nonzero dimensions by degree.
    pub fn dims(&self) -> &BTreeMap<i32, usize> {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn labels(&self, d: i32) -> &[String] {
        self.labels.get(&d).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// The differential leaving degree `d`.
    pub fn differential(&self, d: i32) -> Matrix {
        self.differentials
            .get(&d)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.dim(d + 1), self.dim(d), self.field))
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.dims.keys().copied()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .map(|(d, n)| {
                if d.rem_euclid(2) == 0 {
                    *n as i64
                } else {
                    -(*n as i64)
                }
            })
            .sum()
    }

    /// Checks `d∘d = 0` in every degree.
    pub fn verify(&self) -> Result<(), ComplexError> {
        for (d, m) in &self.differentials {
            if let Some(next) = self.differentials.get(&(d + 1)) {
                if !next.mul(m).is_zero() {
                    return Err(ComplexError::NotAComplex { degree: *d });
                }
            }
        }
        Ok(())
    }

    pub fn rank_of_differential(&self, d: i32) -> usize {
        self.differentials.get(&d).map_or(0, |m| m.rank())
    }

    pub fn cohomology(&self) -> Result<Cohomology, ComplexError> {
        self.verify()?;
        let mut groups = BTreeMap::new();
        for d in self.degrees() {
            groups.insert(d, CohomologyGroup::compute(self, d));
        }
        Ok(Cohomology {
            field: self.field,
            groups,
        })
    }
}

/// Cohomology in one degree with chosen representatives.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    representatives: Vec<SparseVector>,
    cocycle_dim: usize,
    boundary_dim: usize,
    // image rows tagged 0, representatives tagged by their position
    solver: Echelon,
}

impl CohomologyGroup {
    fn compute(c: &ChainComplex, d: i32) -> Self {
        let field = c.field;
        let outgoing = c.differential(d);
        let incoming = c.differential(d - 1);
        let mut solver = Echelon::new(field);
        for col in incoming.columns() {
            solver.insert_with_tag(col.clone(), SparseVector::new());
        }
        let boundary_dim = solver.len();
        let kernel = outgoing.kernel();
        let cocycle_dim = kernel.len();
        let mut representatives = Vec::new();
        // later free columns first
        for k in kernel.iter().rev() {
            let (residual, _) = solver.reduce(k);
            if residual.is_zero() {
                continue;
            }
            solver.insert_tracked(residual.clone(), representatives.len());
            representatives.push(residual);
        }
        CohomologyGroup {
            representatives,
            cocycle_dim,
            boundary_dim,
            solver,
        }
    }

    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[SparseVector] {
        &self.representatives
    }

    pub fn cocycle_dim(&self) -> usize {
        self.cocycle_dim
    }

    pub fn boundary_dim(&self) -> usize {
        self.boundary_dim
    }

    /// Coordinates of the class of cocycle `v` in the representative basis, or
    /// `None` if `v` is not a cocycle.
    pub fn coordinates(&self, v: &SparseVector) -> Option<SparseVector> {
        let (residual, used) = self.solver.reduce(v);
        residual.is_zero().then_some(used)
    }
}

#[derive(Clone, Debug)]
pub struct Cohomology {
    field: Field,
    groups: BTreeMap<i32, CohomologyGroup>,
}

impl Cohomology {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self, d: i32) -> usize {
        self.groups.get(&d).map_or(0, |g| g.dimension())
    }

    pub fn group(&self, d: i32) -> Option<&CohomologyGroup> {
        self.groups.get(&d)
    }

    /// Nonzero cohomology dimensions.
    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.groups
            .iter()
            .filter(|(_, g)| g.dimension() > 0)
            .map(|(d, g)| (*d, g.dimension()))
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims()
            .iter()
            .map(|(d, n)| {
                if d.rem_euclid(2) == 0 {
                    *n as i64
                } else {
                    -(*n as i64)
                }
            })
            .sum()
    }
}

/// Degree-0 map of complexes, one matrix per degree.
#[derive(Clone, Debug)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    components: BTreeMap<i32, Matrix>,
}

impl ChainMap {
    pub fn new(
        source: ChainComplex,
        target: ChainComplex,
        components: BTreeMap<i32, Matrix>,
    ) -> Result<Self, ComplexError> {
        if source.field != target.field {
            return Err(ComplexError::FieldMismatch(source.field, target.field));
        }
        for (d, m) in &components {
            let expected = (target.dim(*d), source.dim(*d));
            if (m.rows(), m.cols()) != expected {
                return Err(ComplexError::Shape {
                    degree: *d,
                    found: (m.rows(), m.cols()),
                    expected,
                });
            }
        }
        let f = ChainMap {
            source,
            target,
            components,
        };
        f.check_commutes()?;
        Ok(f)
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let components = c
            .dims
            .iter()
            .map(|(d, n)| (*d, Matrix::identity(*n, c.field)))
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            components,
        }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn component(&self, d: i32) -> Matrix {
        self.components.get(&d).cloned().unwrap_or_else(|| {
            Matrix::zero(self.target.dim(d), self.source.dim(d), self.source.field)
        })
    }

    fn check_commutes(&self) -> Result<(), ComplexError> {
        let degrees: BTreeSet<i32> = self
            .source
            .degrees()
            .chain(self.target.degrees().map(|d| d - 1))
            .collect();
        for d in degrees {
            let lhs = self.target.differential(d).mul(&self.component(d));
            let rhs = self.component(d + 1).mul(&self.source.differential(d));
            if lhs != rhs {
                return Err(ComplexError::NotAChainMap { degree: d });
            }
        }
        Ok(())
    }

    /// Matrices of the induced maps in the chosen cohomology bases.
    pub fn induced_on_cohomology(&self) -> Result<InducedMap, ComplexError> {
        let hs = self.source.cohomology()?;
        let ht = self.target.cohomology()?;
        let degrees: BTreeSet<i32> = self.source.degrees().chain(self.target.degrees()).collect();
        let mut matrices = BTreeMap::new();
        let mut is_quasi_iso = true;
        for d in degrees {
            let reps = hs
                .group(d)
                .map(|g| g.representatives().to_vec())
                .unwrap_or_default();
            let rows = ht.dim(d);
            let comp = self.component(d);
            let cols = reps
                .iter()
                .map(|r| {
                    let image = comp.apply(r);
                    match ht.group(d) {
                        Some(g) => g.coordinates(&image),
                        None => image.is_zero().then(SparseVector::new),
                    }
                    .unwrap_or_else(|| panic!("image of a cocycle is not a cocycle (degree {d})"))
                })
                .collect();
            let m = Matrix::from_columns(rows, self.source.field, cols);
            if !m.is_invertible() {
                is_quasi_iso = false;
            }
            matrices.insert(d, m);
        }
        Ok(InducedMap {
            matrices,
            is_quasi_iso,
            source_dims: hs.dims(),
            target_dims: ht.dims(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct InducedMap {
    pub matrices: BTreeMap<i32, Matrix>,
    pub is_quasi_iso: bool,
    pub source_dims: BTreeMap<i32, usize>,
    pub target_dims: BTreeMap<i32, usize>,
}
