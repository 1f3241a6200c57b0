//! Independent reconstruction of twisted hom complexes as iterated relative
//! tensor products of bar complexes, used to cross-check the word basis.
//!
//! A basis element of `K((a,x),(b,y))` is written top first as a string of
//! letters `g_r, s h_{r,m}, …, s h_{r,1}, g_{r-1}, …, g_0`: boundary letters
//! `g_t` are arbitrary basis morphisms, bar letters `s h` are non-identity
//! morphisms shifted down by one degree.

mod compare;

pub use compare::{compare_with_twist, word_to_string, OracleComparison};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::combination::Combination;
use crate::complex::{ChainComplex, ComplexError};
use crate::dgcat::{CategoryError, FiniteDgCategory, HomVector};
use crate::linalg::{Matrix, SparseVector};
use crate::scalar::{sign, Field, Rational, ScalarError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub src: usize,
    pub dst: usize,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Boundary(Arrow),
    Bar(Arrow),
}

impl Letter {
    pub fn arrow(&self) -> Arrow {
        match self {
            Letter::Boundary(a) | Letter::Bar(a) => *a,
        }
    }

    fn with_arrow(&self, a: Arrow) -> Letter {
        match self {
            Letter::Boundary(_) => Letter::Boundary(a),
            Letter::Bar(_) => Letter::Bar(a),
        }
    }
}

/// Letters, top first.
pub type BarString = Vec<Letter>;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("differential of basis element {0} leaves its grading")]
    Grading(usize),
}

/// Shared data for building bar and K complexes over a directed category.
#[derive(Clone, Debug)]
pub struct BarOracle {
    base: Arc<FiniteDgCategory>,
    incoming: Vec<Vec<Arrow>>,
    // reach[x * n + z]: some chain of nonzero homs leads from x to z
    reach: Vec<bool>,
}

impl BarOracle {
    pub fn new(base: Arc<FiniteDgCategory>) -> Result<Self, OracleError> {
        base.directedness()?;
        let n = base.num_objects();
        let mut incoming = vec![Vec::new(); n];
        let mut adj = vec![Vec::new(); n];
        for x in 0..n {
            for y in 0..n {
                let h = base.hom(x, y);
                for i in 0..h.len() {
                    incoming[y].push(Arrow {
                        src: x,
                        dst: y,
                        index: i,
                    });
                }
                if !h.is_empty() && x != y {
                    adj[x].push(y);
                }
            }
        }
        let mut reach = vec![false; n * n];
        for x in 0..n {
            let mut stack = vec![x];
            while let Some(z) = stack.pop() {
                if !reach[x * n + z] {
                    reach[x * n + z] = true;
                    stack.extend(adj[z].iter().copied());
                }
            }
        }
        Ok(BarOracle {
            base,
            incoming,
            reach,
        })
    }

    pub fn base(&self) -> &Arc<FiniteDgCategory> {
        &self.base
    }

    fn reaches(&self, x: usize, z: usize) -> bool {
        self.reach[x * self.base.num_objects() + z]
    }

    fn is_identity(&self, a: Arrow) -> bool {
        self.base.is_identity(a.src, a.dst, a.index)
    }

    fn arrow_degree(&self, a: Arrow) -> i64 {
        self.base.degree(a.src, a.dst, a.index) as i64
    }

    pub fn letter_degree(&self, l: &Letter) -> i64 {
        match l {
            Letter::Boundary(a) => self.arrow_degree(*a),
            Letter::Bar(a) => self.arrow_degree(*a) - 1,
        }
    }

    pub fn degree(&self, s: &BarString) -> i32 {
        s.iter().map(|l| self.letter_degree(l)).sum::<i64>() as i32
    }

    pub fn bar_degree(s: &BarString) -> usize {
        s.iter().filter(|l| matches!(l, Letter::Bar(_))).count()
    }

    /// `upper ∘ lower`.
    fn compose(&self, upper: Arrow, lower: Arrow) -> Vec<(Arrow, Rational)> {
        self.base
            .compose(lower.src, lower.dst, upper.dst, upper.index, lower.index)
            .into_terms()
            .map(|(k, c)| {
                (
                    Arrow {
                        src: lower.src,
                        dst: upper.dst,
                        index: k,
                    },
                    c,
                )
            })
            .collect()
    }

    /// Strings with `blocks` blocks from `x` to `y`, built from the top down.
    pub fn strings(&self, blocks: usize, x: usize, y: usize) -> Vec<BarString> {
        let mut out = Vec::new();
        if self.reaches(x, y) {
            self.descend_boundary(blocks, x, y, &mut Vec::new(), &mut out);
        }
        out.sort();
        out
    }

    fn descend_boundary(
        &self,
        left: usize,
        x: usize,
        z: usize,
        cur: &mut BarString,
        out: &mut Vec<BarString>,
    ) {
        for a in &self.incoming[z] {
            if !self.reaches(x, a.src) || (left == 0 && a.src != x) {
                continue;
            }
            cur.push(Letter::Boundary(*a));
            if left == 0 {
                out.push(cur.clone());
            } else {
                self.descend_bars(left, x, a.src, cur, out);
            }
            cur.pop();
        }
    }

    fn descend_bars(
        &self,
        left: usize,
        x: usize,
        z: usize,
        cur: &mut BarString,
        out: &mut Vec<BarString>,
    ) {
        self.descend_boundary(left - 1, x, z, cur, out);
        for a in &self.incoming[z] {
            if self.is_identity(*a) || !self.reaches(x, a.src) {
                continue;
            }
            cur.push(Letter::Bar(*a));
            self.descend_bars(left, x, a.src, cur, out);
            cur.pop();
        }
    }

    /// Internal part of the differential: `d` on each letter, with the sign
    /// `-1` on shifted letters and the Koszul sign of everything to the left.
    pub fn internal_differential(&self, s: &BarString) -> Combination<BarString> {
        let mut out = Combination::new();
        let mut acc = 0i64;
        for (k, l) in s.iter().enumerate() {
            let a = l.arrow();
            let sg = match l {
                Letter::Boundary(_) => sign(acc),
                Letter::Bar(_) => -sign(acc),
            };
            for (j, c) in self.base.differential(a.src, a.dst, a.index).iter() {
                let b = Arrow { index: *j, ..a };
                if matches!(l, Letter::Bar(_)) && self.is_identity(b) {
                    continue;
                }
                let mut t = s.clone();
                t[k] = l.with_arrow(b);
                out.add_term(t, &sg * c);
            }
            acc += self.letter_degree(l);
        }
        out
    }

    /// Bar part of the differential: merging adjacent bar letters and
    /// absorbing a block's outer letters into the neighbouring boundaries.
    pub fn bar_differential(&self, s: &BarString) -> Combination<BarString> {
        let mut out = Combination::new();
        let mut acc = 0i64;
        for k in 0..s.len().saturating_sub(1) {
            let sg = sign(acc);
            let (u, l) = (s[k].arrow(), s[k + 1].arrow());
            let replace = |m: Letter| {
                let mut t = s[..k].to_vec();
                t.push(m);
                t.extend_from_slice(&s[k + 2..]);
                t
            };
            match (s[k], s[k + 1]) {
                (Letter::Bar(_), Letter::Bar(_)) => {
                    let c0 = &sg * &sign(self.arrow_degree(u) - 1);
                    for (m, c) in self.compose(u, l) {
                        if !self.is_identity(m) {
                            out.add_term(replace(Letter::Bar(m)), &c0 * &c);
                        }
                    }
                }
                (Letter::Boundary(_), Letter::Bar(_)) => {
                    let c0 = &sg * &sign(self.arrow_degree(u));
                    for (m, c) in self.compose(u, l) {
                        out.add_term(replace(Letter::Boundary(m)), &c0 * &c);
                    }
                }
                (Letter::Bar(_), Letter::Boundary(_)) => {
                    for (m, c) in self.compose(u, l) {
                        out.add_term(replace(Letter::Boundary(m)), -(&sg * &c));
                    }
                }
                (Letter::Boundary(_), Letter::Boundary(_)) => {}
            }
            acc += self.letter_degree(&s[k]);
        }
        out
    }

    pub fn differential(&self, s: &BarString) -> Combination<BarString> {
        let mut out = self.internal_differential(s);
        out.add(&self.bar_differential(s));
        out
    }

    /// `K((a,x),(b,y))`; empty when `a > b`.
    pub fn k_complex(&self, a: usize, x: usize, b: usize, y: usize) -> KComplex {
        let basis = if a > b {
            Vec::new()
        } else {
            self.strings(b - a, x, y)
        };
        let index: BTreeMap<&BarString, usize> =
            basis.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let to_vec = |c: Combination<BarString>| -> HomVector {
            c.into_terms().map(|(s, k)| (index[&s], k)).collect()
        };
        let internal = basis
            .iter()
            .map(|s| to_vec(self.internal_differential(s)))
            .collect();
        let bar = basis
            .iter()
            .map(|s| to_vec(self.bar_differential(s)))
            .collect();
        let degrees = basis.iter().map(|s| self.degree(s)).collect();
        let bar_degrees = basis.iter().map(BarOracle::bar_degree).collect();
        KComplex {
            source: (a, x),
            target: (b, y),
            basis,
            degrees,
            bar_degrees,
            internal,
            bar,
        }
    }

    /// `Bar^{(f_i)}(C)` over every object pair.
    pub fn bar_complex(&self, i: usize) -> BarComplex {
        let n = self.base.num_objects();
        let pieces = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| ((x, y), self.k_complex(i - 1, x, i, y)))
            .filter(|(_, k)| !k.basis.is_empty())
            .collect();
        BarComplex {
            generator: i,
            pieces,
        }
    }

    /// `g · s` for a boundary-level morphism `g` composed on top.
    pub fn act_left(&self, g: Arrow, s: &BarString) -> Combination<BarString> {
        let top = s[0].arrow();
        self.compose(g, top)
            .into_iter()
            .map(|(m, c)| {
                let mut t = s.clone();
                t[0] = Letter::Boundary(m);
                (t, c)
            })
            .collect()
    }

    /// `s · g` for `g` composed at the bottom.
    pub fn act_right(&self, s: &BarString, g: Arrow) -> Combination<BarString> {
        let last = s.len() - 1;
        let bottom = s[last].arrow();
        self.compose(bottom, g)
            .into_iter()
            .map(|(m, c)| {
                let mut t = s.clone();
                t[last] = Letter::Boundary(m);
                (t, c)
            })
            .collect()
    }

    /// Bar-degree-zero part and acyclicity of `K` in positive bar degree,
    /// plus a comparison of `H(K)` with `H(C(x, y))`.
    pub fn acyclicity_report(
        &self,
        k: &KComplex,
        field: Field,
    ) -> Result<AcyclicityReport, OracleError> {
        let (x, y) = (k.source.1, k.target.1);
        let total = k.chain_complex(field)?;
        let cohomology = total.cohomology()?.dims();
        let bar = k.bar_chain_complex(field)?;
        let bar_h = bar.cohomology()?;
        let bar_cohomology: BTreeMap<usize, usize> = bar_h
            .dims()
            .into_iter()
            .map(|(d, n)| ((-d) as usize, n))
            .collect();
        let mut deviations = Vec::new();
        let related = k.source.0 <= k.target.0;
        let (expected_bar_zero, expected_cohomology) = if related {
            let h = self
                .base
                .hom(x, y)
                .to_chain_complex(field)?
                .complex
                .cohomology()?
                .dims();
            (self.base.hom(x, y).len(), h)
        } else {
            (0, BTreeMap::new())
        };
        for (p, n) in &bar_cohomology {
            if *p > 0 && *n > 0 {
                deviations.push(format!("bar degree {p}: {n}-dimensional cohomology"));
            }
        }
        let zero = bar_cohomology.get(&0).copied().unwrap_or(0);
        if zero != expected_bar_zero {
            deviations.push(format!(
                "bar degree 0: dimension {zero}, expected {expected_bar_zero}"
            ));
        }
        if cohomology != expected_cohomology {
            deviations.push(format!(
                "H(K) = {cohomology:?}, expected {expected_cohomology:?}"
            ));
        }
        Ok(AcyclicityReport {
            source: k.source,
            target: k.target,
            dims: k.dims(),
            cohomology,
            expected_cohomology,
            bar_cohomology,
            passed: deviations.is_empty(),
            deviations,
        })
    }
}

/// Total complex at one object pair, with the bar degree kept per element.
#[derive(Clone, Debug)]
pub struct KComplex {
    pub source: (usize, usize),
    pub target: (usize, usize),
    pub basis: Vec<BarString>,
    pub degrees: Vec<i32>,
    pub bar_degrees: Vec<usize>,
    /// bar-degree preserving part of the differential
    pub internal: Vec<HomVector>,
    /// part lowering the bar degree by one
    pub bar: Vec<HomVector>,
}

impl KComplex {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for d in &self.degrees {
            *out.entry(*d).or_insert(0) += 1;
        }
        out
    }

    pub fn max_bar_degree(&self) -> usize {
        self.bar_degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn differential(&self, i: usize) -> HomVector {
        let mut v = self.internal[i].clone();
        v.add(&self.bar[i]);
        v
    }

    fn build(
        &self,
        field: Field,
        grade: impl Fn(usize) -> i32,
        diff: impl Fn(usize) -> HomVector,
    ) -> Result<ChainComplex, OracleError> {
        let mut by: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        let mut pos = vec![0; self.len()];
        for i in 0..self.len() {
            let slot = by.entry(grade(i)).or_default();
            pos[i] = slot.len();
            slot.push(i);
        }
        let mut diffs = BTreeMap::new();
        for (d, members) in &by {
            let rows = by.get(&(d + 1)).map_or(0, |v| v.len());
            let mut cols = Vec::new();
            for &i in members {
                let mut entries = Vec::new();
                for (j, c) in diff(i).iter() {
                    if grade(*j) != d + 1 {
                        return Err(OracleError::Grading(i));
                    }
                    entries.push((pos[*j], field.from_rational(c)?));
                }
                cols.push(SparseVector::from_entries(entries));
            }
            diffs.insert(*d, Matrix::from_columns(rows, field, cols));
        }
        let dims = by.iter().map(|(d, v)| (*d, v.len())).collect();
        Ok(ChainComplex::new(field, dims, diffs)?)
    }

    pub fn chain_complex(&self, field: Field) -> Result<ChainComplex, OracleError> {
        self.build(field, |i| self.degrees[i], |i| self.differential(i))
    }

    /// The bar part alone, graded by minus the bar degree.
    pub fn bar_chain_complex(&self, field: Field) -> Result<ChainComplex, OracleError> {
        self.build(
            field,
            |i| -(self.bar_degrees[i] as i32),
            |i| self.bar[i].clone(),
        )
    }
}

/// One-block strings for generator `f_i`, per object pair of the base.
#[derive(Clone, Debug)]
pub struct BarComplex {
    pub generator: usize,
    pub pieces: BTreeMap<(usize, usize), KComplex>,
}

impl BarComplex {
    pub fn max_chain_length(&self) -> usize {
        self.pieces
            .values()
            .map(|k| k.max_bar_degree())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AcyclicityReport {
    pub source: (usize, usize),
    pub target: (usize, usize),
    pub dims: BTreeMap<i32, usize>,
    pub cohomology: BTreeMap<i32, usize>,
    pub expected_cohomology: BTreeMap<i32, usize>,
    pub bar_cohomology: BTreeMap<usize, usize>,
    pub deviations: Vec<String>,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::interval;
    use crate::fixtures::{collapse_category, random_directed};
    use crate::twist::{TwistedCategory, TwistedTensor};

    fn oracle(c: FiniteDgCategory) -> BarOracle {
        BarOracle::new(Arc::new(c)).unwrap()
    }

    #[test]
    fn smallest_k_complex() {
        let o = oracle(interval(1));
        let k = o.k_complex(0, 0, 1, 1);
        assert_eq!(k.dims(), [(-1, 1), (0, 2)].into_iter().collect());
        let r = o.acyclicity_report(&k, Field::Q).unwrap();
        assert!(r.passed, "{:?}", r.deviations);
        assert_eq!(r.cohomology, [(0, 1)].into_iter().collect());
    }

    #[test]
    fn k_complex_over_longer_interval() {
        let k = oracle(interval(2)).k_complex(0, 0, 1, 2);
        assert_eq!(k.dims(), [(-2, 1), (-1, 3), (0, 3)].into_iter().collect());
    }

    #[test]
    fn bar_chain_lengths() {
        assert_eq!(oracle(interval(1)).bar_complex(1).max_chain_length(), 1);
        for m in 1..=4 {
            assert_eq!(oracle(interval(m)).bar_complex(1).max_chain_length(), m);
        }
    }

    #[test]
    fn unrelated_pair_is_vacuous() {
        let o = oracle(interval(1));
        let k = o.k_complex(1, 0, 0, 1);
        assert!(k.is_empty());
        assert!(o.acyclicity_report(&k, Field::Q).unwrap().passed);
    }

    #[test]
    fn collapse_fixture_matches_base_cohomology() {
        let o = oracle(collapse_category());
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let k = o.k_complex(a, 0, b, 1);
            let r = o.acyclicity_report(&k, Field::Q).unwrap();
            assert!(r.passed, "{:?}", r.deviations);
            assert_eq!(r.cohomology, [(0, 1)].into_iter().collect());
        }
    }

    #[test]
    fn oracle_differential_squares_to_zero() {
        let o = oracle(random_directed(3));
        for s in o.strings(2, 0, 2) {
            let dd = o.differential(&s).flat_map(|t| o.differential(t));
            assert!(dd.is_zero());
        }
    }

    #[test]
    fn module_actions_compose_boundaries() {
        let c = interval(2);
        let o = oracle(c);
        let s = o.strings(1, 0, 1)[0].clone();
        let g = Arrow {
            src: 1,
            dst: 2,
            index: 0,
        };
        let moved = o.act_left(g, &s);
        assert_eq!(moved.len(), 1);
        let (t, _) = moved.iter().next().unwrap();
        assert_eq!(t[0].arrow().dst, 2);
        let h = Arrow {
            src: 0,
            dst: 0,
            index: 0,
        };
        assert_eq!(o.act_right(&s, h).coeff(&s), crate::scalar::rint(1));
    }

    #[test]
    fn agrees_with_twist_on_small_instances() {
        for (n, c) in [
            (1, interval(1)),
            (2, interval(2)),
            (2, collapse_category()),
            (1, random_directed(0)),
        ] {
            let c = Arc::new(c);
            let o = BarOracle::new(c.clone()).unwrap();
            let t = TwistedTensor::new(n, c.clone()).unwrap();
            for a in 0..=n {
                for b in a..=n {
                    for x in 0..c.num_objects() {
                        for y in 0..c.num_objects() {
                            let r = compare_with_twist(&o, &t, (a, x), (b, y), Field::Q).unwrap();
                            assert!(r.passed(), "{r:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn agrees_on_iterated_product() {
        let d = TwistedCategory::new(1, Arc::new(interval(1))).unwrap();
        let base = d.category().clone();
        let o = BarOracle::new(base.clone()).unwrap();
        let t = TwistedTensor::new(1, base).unwrap();
        let r = compare_with_twist(&o, &t, (0, 0), (1, 3), Field::Q).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.twist_cohomology, [(0, 1)].into_iter().collect());
    }
}
