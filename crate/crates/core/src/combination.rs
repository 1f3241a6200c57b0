//! Formal rational linear combinations with canonical (sorted) term order.

use std::collections::btree_map::{self, BTreeMap};

use num_traits::{One, Zero};

use crate::scalar::Rational;

/// A finite formal sum `Σ c_k · k` with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Combination<K: Ord> {
    terms: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for Combination<K> {
    fn default() -> Self {
        Combination {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Combination<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(k: K) -> Self {
        Self::single(k, Rational::one())
    }

    pub fn single(k: K, c: Rational) -> Self {
        let mut out = Self::new();
        out.add_term(k, c);
        out
    }

    pub fn add_term(&mut self, k: K, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Combination<K>, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn add(&mut self, other: &Combination<K>) {
        self.add_scaled(other, &Rational::one());
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = Self::new();
        out.add_scaled(self, c);
        out
    }

    pub fn negated(&self) -> Self {
        self.scaled(&-Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &K) -> Rational {
        self.terms.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (K, Rational)> {
        self.terms.into_iter()
    }

    /// Linear extension of `f` over the terms.
    pub fn flat_map<L, F>(&self, mut f: F) -> Combination<L>
    where
        L: Ord + Clone,
        F: FnMut(&K) -> Combination<L>,
    {
        let mut out = Combination::new();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Rational)> for Combination<K> {
    fn from_iter<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        let mut out = Self::new();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}
