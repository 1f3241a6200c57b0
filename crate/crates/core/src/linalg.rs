//! Sparse exact linear algebra over a [`Field`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::scalar::{Field, Scalar};

/// Sparse vector: entries sorted by index, no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseVector {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from arbitrary `(index, value)` pairs, summing duplicates.
    pub fn from_entries<I: IntoIterator<Item = (usize, Scalar)>>(items: I) -> Self {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, v) in items {
            match acc.get_mut(&i) {
                Some(x) => *x += &v,
                None => {
                    acc.insert(i, v);
                }
            }
        }
        SparseVector {
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn unit(i: usize, field: Field) -> Self {
        SparseVector {
            entries: vec![(i, field.one())],
        }
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn leading(&self) -> Option<&(usize, Scalar)> {
        self.entries.first()
    }

    pub fn scale(&self, c: &Scalar) -> SparseVector {
        if c.is_zero() {
            return SparseVector::new();
        }
        SparseVector {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c * other`
    pub fn axpy(&self, c: &Scalar, other: &SparseVector) -> SparseVector {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                let v = &b[j].1 * c;
                if !v.is_zero() {
                    out.push((b[j].0, v));
                }
                j += 1;
            } else {
                let v = &a[i].1 + &(&b[j].1 * c);
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVector { entries: out }
    }

    pub fn add(&self, other: &SparseVector) -> SparseVector {
        match other.entries.first() {
            None => self.clone(),
            Some((_, v)) => self.axpy(&v.field().one(), other),
        }
    }

    pub fn dot(&self, other: &SparseVector, field: Field) -> Scalar {
        let mut acc = field.zero();
        for (i, v) in &self.entries {
            if let Some(w) = other.get(*i) {
                acc += &(v * w);
            }
        }
        acc
    }

    /// Dense rendering of length `n`, zeros filled in.
    pub fn to_dense(&self, n: usize, field: Field) -> Vec<Scalar> {
        let mut out = vec![field.zero(); n];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }
}

/// Sparse matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    columns: Vec<SparseVector>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, field: Field) -> Self {
        Matrix {
            rows,
            cols,
            field,
            columns: vec![SparseVector::new(); cols],
        }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        Matrix {
            rows: n,
            cols: n,
            field,
            columns: (0..n).map(|i| SparseVector::unit(i, field)).collect(),
        }
    }

    /// Panics if a column has an entry out of range.
    pub fn from_columns(rows: usize, field: Field, columns: Vec<SparseVector>) -> Self {
        for c in &columns {
            if let Some((i, _)) = c.entries.last() {
                assert!(*i < rows, "row index {i} out of range ({rows} rows)");
            }
        }
        Matrix {
            rows,
            cols: columns.len(),
            field,
            columns,
        }
    }

    pub fn from_triplets<I>(rows: usize, cols: usize, field: Field, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut per_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(
                r < rows && c < cols,
                "entry ({r},{c}) outside {rows}x{cols}"
            );
            per_col[c].push((r, v));
        }
        Matrix {
            rows,
            cols,
            field,
            columns: per_col
                .into_iter()
                .map(SparseVector::from_entries)
                .collect(),
        }
    }

    pub fn from_dense(field: Field, rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let trip = rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0)
                .map(move |(j, v)| (i, j, field.from_i64(*v)))
        });
        Matrix::from_triplets(nrows, ncols, field, trip)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn column(&self, j: usize) -> &SparseVector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVector] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.columns[c]
            .get(r)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, Scalar)> {
        let mut t: Vec<(usize, usize, Scalar)> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.entries.iter().map(move |(r, v)| (*r, c, v.clone())))
            .collect();
        t.sort_by_key(|(r, c, _)| (*r, *c));
        t
    }

    pub fn transpose(&self) -> Matrix {
        let t = self.triplets().into_iter().map(|(r, c, v)| (c, r, v));
        Matrix::from_triplets(self.cols, self.rows, self.field, t)
    }

    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        let mut acc = SparseVector::new();
        for (j, c) in v.entries() {
            acc = acc.axpy(c, &self.columns[*j]);
        }
        acc
    }

    /// `self * rhs`
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let cols = rhs.columns.iter().map(|c| self.apply(c)).collect();
        Matrix::from_columns(self.rows, self.field, cols)
    }

    /// Exact rank by sparse elimination.
    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.field);
        for c in &self.columns {
            e.insert(c.clone());
        }
        e.len()
    }

    /// Basis of the null space, one vector per non-pivot column in increasing
    /// column order.
    pub fn kernel(&self) -> Vec<SparseVector> {
        let mut e = Echelon::new(self.field);
        let mut out = Vec::new();
        for (j, c) in self.columns.iter().enumerate() {
            if let Insert::Dependent(combo) = e.insert_tracked(c.clone(), j) {
                // combo expresses c as a combination of earlier columns
                let mut v = SparseVector::unit(j, self.field);
                v = v.axpy(&-self.field.one(), &combo);
                out.push(v);
            }
        }
        out
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

/// Outcome of inserting a vector into an [`Echelon`] basis.
pub enum Insert {
    /// New pivot created.
    Independent,
    /// Vector lies in the span; carries its expression in the tracked tags.
    Dependent(SparseVector),
}

/// Incrementally built echelon basis of a subspace.
///
/// Each stored row has a distinct pivot (its leading index) and carries a tag
/// recording which inserted generators it is a combination of.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    pivots: BTreeMap<usize, usize>,
    rows: Vec<SparseVector>,
    tags: Vec<SparseVector>,
}

impl Echelon {
    pub fn new(field: Field) -> Self {
        Echelon {
            field,
            pivots: BTreeMap::new(),
            rows: Vec::new(),
            tags: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the basis; returns the residual and the tag
    /// combination that was subtracted.
    pub fn reduce(&self, v: &SparseVector) -> (SparseVector, SparseVector) {
        let mut residual = v.clone();
        let mut used = SparseVector::new();
        let mut cursor = 0usize;
        loop {
            let start = residual.entries.partition_point(|(i, _)| *i < cursor);
            let next = residual.entries[start..]
                .iter()
                .find(|(i, _)| self.pivots.contains_key(i))
                .cloned();
            let Some((i, c)) = next else { break };
            let r = self.pivots[&i];
            // rows are normalized to leading coefficient 1
            let f = -&c;
            residual = residual.axpy(&f, &self.rows[r]);
            used = used.axpy(&c, &self.tags[r]);
            cursor = i + 1;
        }
        (residual, used)
    }

    pub fn contains(&self, v: &SparseVector) -> bool {
        self.reduce(v).0.is_zero()
    }

    pub fn insert(&mut self, v: SparseVector) -> bool {
        matches!(
            self.insert_with_tag(v, SparseVector::new()),
            Insert::Independent
        )
    }

    /// Inserts `v` tagged as generator `id`.
    pub fn insert_tracked(&mut self, v: SparseVector, id: usize) -> Insert {
        self.insert_with_tag(v, SparseVector::unit(id, self.field))
    }

    pub fn insert_with_tag(&mut self, v: SparseVector, tag: SparseVector) -> Insert {
        let (residual, used) = self.reduce(&v);
        if residual.is_zero() {
            return Insert::Dependent(used);
        }
        let tag = tag.axpy(&-self.field.one(), &used);
        let (p, lead) = residual.leading().cloned().expect("nonzero");
        let inv = lead.inv().expect("nonzero pivot");
        self.pivots.insert(p, self.rows.len());
        self.rows.push(residual.scale(&inv));
        self.tags.push(tag.scale(&inv));
        Insert::Independent
    }
}

/// Integer that serializes as a JSON number when it fits in `i64`.
#[derive(Serialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for JsonInt {
    fn from(n: &BigInt) -> Self {
        n.to_i64()
            .map_or_else(|| JsonInt::Big(n.to_string()), JsonInt::Small)
    }
}

/// Serialized as `{rows, cols, entries}` with entries
/// `[row, col, numerator, denominator]` in row-major order.
impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<(usize, usize, JsonInt, JsonInt)> = self
            .triplets()
            .into_iter()
            .map(|(r, c, v)| {
                let (n, d) = v.to_fraction();
                (r, c, JsonInt::from(&n), JsonInt::from(&d))
            })
            .collect();
        let mut st = serializer.serialize_struct("Matrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        let f = Field::Q;
        assert_eq!(Matrix::zero(3, 3, f).rank(), 0);
        assert_eq!(Matrix::identity(3, f).rank(), 3);
        assert_eq!(Matrix::from_dense(f, &[vec![1, -1]]).rank(), 1);
        assert_eq!(
            Matrix::from_dense(f, &[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]).rank(),
            2
        );
    }

    #[test]
    fn rank_depends_on_characteristic() {
        let m = vec![vec![2, 1], vec![1, 2]];
        assert_eq!(Matrix::from_dense(Field::Q, &m).rank(), 2);
        assert_eq!(Matrix::from_dense(Field::Fp(3), &m).rank(), 1);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let f = Field::Q;
        let m = Matrix::from_dense(f, &[vec![1, 2, 3, 0], vec![2, 4, 6, 1]]);
        let k = m.kernel();
        assert_eq!(k.len(), 4 - m.rank());
        for v in &k {
            assert!(m.apply(v).is_zero());
        }
    }

    #[test]
    fn echelon_reports_dependencies() {
        let f = Field::Q;
        let mut e = Echelon::new(f);
        let a = SparseVector::from_entries([(0, f.from_i64(1)), (1, f.from_i64(1))]);
        let b = SparseVector::from_entries([(1, f.from_i64(1)), (2, f.from_i64(1))]);
        assert!(matches!(
            e.insert_tracked(a.clone(), 0),
            Insert::Independent
        ));
        assert!(matches!(
            e.insert_tracked(b.clone(), 1),
            Insert::Independent
        ));
        let c = a.axpy(&f.from_i64(-3), &b);
        match e.insert_tracked(c, 2) {
            Insert::Dependent(combo) => {
                assert_eq!(combo.get(0), Some(&f.from_i64(1)));
                assert_eq!(combo.get(1), Some(&f.from_i64(-3)));
            }
            Insert::Independent => panic!("expected dependency"),
        }
    }

    #[test]
    fn triplets_are_row_major() {
        let f = Field::Q;
        let m = Matrix::from_dense(f, &[vec![0, 5], vec![7, 0]]);
        let t: Vec<(usize, usize)> = m.triplets().iter().map(|(r, c, _)| (*r, *c)).collect();
        assert_eq!(t, vec![(0, 1), (1, 0)]);
        assert_eq!(m.transpose().get(1, 0), f.from_i64(5));
    }
}
