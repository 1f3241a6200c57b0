//! Small categories and functors used as test instances.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dgcat::{
    interval, tensor_label, BasisElement, DgFunctor, DirectednessWitness, FiniteDgCategory,
    HomComplex, HomVector,
};
use crate::scalar::{rational, rint, sign, Rational};

fn unit_tables(
    homs: &BTreeMap<(usize, usize), HomComplex>,
    n: usize,
) -> BTreeMap<(usize, usize, usize), Vec<HomVector>> {
    let mut out = BTreeMap::new();
    for (&(x, y), h) in homs {
        if x == y {
            continue;
        }
        out.insert((x, x, y), (0..h.len()).map(HomVector::term).collect());
        out.insert((x, y, y), (0..h.len()).map(HomVector::term).collect());
    }
    for x in 0..n {
        out.insert((x, x, x), vec![HomVector::term(0)]);
    }
    out
}

fn identity_homs(n: usize) -> BTreeMap<(usize, usize), HomComplex> {
    (0..n)
        .map(|x| {
            (
                (x, x),
                HomComplex::closed(vec![BasisElement::new(format!("id{x}"), 0)]),
            )
        })
        .collect()
}

/// Two objects; `hom(0,1)` has basis `u` (closed, degree 0), `v` (degree -1)
/// and `w` (degree 0) with `dv = w`; no composites besides the unit laws.
pub fn collapse_category() -> FiniteDgCategory {
    let mut homs = identity_homs(2);
    homs.insert(
        (0, 1),
        HomComplex::new(
            vec![
                BasisElement::new("u", 0),
                BasisElement::new("v", -1),
                BasisElement::new("w", 0),
            ],
            vec![HomVector::new(), HomVector::term(2), HomVector::new()],
        ),
    );
    let composition = unit_tables(&homs, 2);
    FiniteDgCategory::new(vec!["0".into(), "1".into()], homs, composition, vec![0, 0])
        .and_then(|c| c.with_order(DirectednessWitness::new(vec![0, 1])))
        .expect("collapse category is well formed")
}

/// The functor from [`collapse_category`] to `interval(1)` sending `u` to the
/// generator and killing `v` and `w`.
pub fn collapse_functor() -> DgFunctor {
    let source = Arc::new(collapse_category());
    let target = Arc::new(interval(1));
    let hom_maps = [
        ((0, 0), vec![HomVector::term(0)]),
        ((1, 1), vec![HomVector::term(0)]),
        (
            (0, 1),
            vec![HomVector::term(0), HomVector::new(), HomVector::new()],
        ),
    ]
    .into_iter()
    .collect();
    DgFunctor::new(source, target, vec![0, 1], hom_maps).expect("collapse functor is a dg functor")
}

/// A random finite complex: closed generators and acyclic pairs, then a
/// unitriangular change of basis in each degree. Always has a nonzero
/// differential.
fn random_complex(rng: &mut ChaCha8Rng, prefix: &str) -> HomComplex {
    let mut degrees = Vec::new();
    let mut diff: Vec<Vec<(usize, Rational)>> = Vec::new();
    let pairs = rng.gen_range(1..=2);
    let closed = rng.gen_range(0..=2);
    for _ in 0..pairs {
        let d = rng.gen_range(-2..=0);
        let w = degrees.len() + 1;
        degrees.push(d);
        degrees.push(d + 1);
        diff.push(vec![(w, rint(1))]);
        diff.push(Vec::new());
    }
    for _ in 0..closed {
        degrees.push(rng.gen_range(-1..=1));
        diff.push(Vec::new());
    }
    let len = degrees.len();
    // lower unitriangular change of basis inside each degree
    let mut change: Vec<Vec<(usize, Rational)>> = (0..len).map(|i| vec![(i, rint(1))]).collect();
    for i in 0..len {
        for j in 0..i {
            if degrees[i] == degrees[j] && rng.gen_bool(0.6) {
                let c = if rng.gen_bool(0.25) {
                    rational(rng.gen_range(-3..=3), 2)
                } else {
                    rint(rng.gen_range(-2..=2))
                };
                if c != rint(0) {
                    change[i].push((j, c));
                }
            }
        }
    }
    let to_dense = |v: &[(usize, Rational)]| {
        let mut out = vec![rint(0); len];
        for (i, c) in v {
            out[*i] += c;
        }
        out
    };
    // new basis e'_i = Σ change[i] e_j; coordinates of old basis in new basis by forward substitution
    let p: Vec<Vec<Rational>> = change.iter().map(|c| to_dense(c)).collect();
    let mut p_inv: Vec<Vec<Rational>> = Vec::with_capacity(len);
    for i in 0..len {
        // e_i = e'_i - Σ_{j<i} p[i][j] e_j
        let mut row = vec![rint(0); len];
        row[i] = rint(1);
        for j in 0..i {
            if p[i][j] != rint(0) {
                for k in 0..len {
                    let t = &p[i][j] * &p_inv[j][k];
                    row[k] -= t;
                }
            }
        }
        p_inv.push(row);
    }
    let mut differential = Vec::with_capacity(len);
    for i in 0..len {
        // d e'_i in old coordinates, then rewritten in the new basis
        let mut old = vec![rint(0); len];
        for j in 0..len {
            if p[i][j] != rint(0) {
                for (k, c) in &diff[j] {
                    old[*k] += &p[i][j] * c;
                }
            }
        }
        let mut v = HomVector::new();
        for (k, c) in old.iter().enumerate() {
            if *c != rint(0) {
                for (l, q) in p_inv[k].iter().enumerate() {
                    if *q != rint(0) {
                        v.add_term(l, c * q);
                    }
                }
            }
        }
        differential.push(v);
    }
    let basis = degrees
        .iter()
        .enumerate()
        .map(|(i, d)| BasisElement::new(format!("{prefix}{i}"), *d))
        .collect();
    HomComplex::new(basis, differential)
}

/// A random directed dg category on objects `0 < 1 < 2`: `hom(0,1) = A` and
/// `hom(1,2) = B` are random complexes and `hom(0,2) = B ⊗ A ⊕ E` with
/// `b ∘ a = b ⊗ a`.
pub fn random_directed(seed: u64) -> FiniteDgCategory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_complex(&mut rng, "a");
    let b = random_complex(&mut rng, "b");
    let e = random_complex(&mut rng, "e");
    let mut basis = Vec::new();
    let mut differential = Vec::new();
    let (la, lb) = (a.len(), b.len());
    let pos = move |j: usize, i: usize| j * la + i;
    for j in 0..b.len() {
        for i in 0..a.len() {
            basis.push(BasisElement::new(
                tensor_label(&b.basis[j].label, &a.basis[i].label),
                b.degree(j) + a.degree(i),
            ));
            let mut dv = HomVector::new();
            for (jj, c) in b.differential[j].iter() {
                dv.add_term(pos(*jj, i), c.clone());
            }
            let s = sign(b.degree(j) as i64);
            for (ii, c) in a.differential[i].iter() {
                dv.add_term(pos(j, *ii), &s * c);
            }
            differential.push(dv);
        }
    }
    let offset = basis.len();
    basis.extend(e.basis.iter().cloned());
    for v in &e.differential {
        differential.push(v.iter().map(|(k, c)| (k + offset, c.clone())).collect());
    }
    let mut homs = identity_homs(3);
    homs.insert((0, 1), a);
    homs.insert((1, 2), b);
    homs.insert((0, 2), HomComplex::new(basis, differential));
    let mut composition = unit_tables(&homs, 3);
    composition.insert(
        (0, 1, 2),
        (0..lb)
            .flat_map(|j| (0..la).map(move |i| HomVector::term(pos(j, i))))
            .collect(),
    );
    FiniteDgCategory::new(
        vec!["0".into(), "1".into(), "2".into()],
        homs,
        composition,
        vec![0, 0, 0],
    )
    .expect("random directed category is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapse_category_validates() {
        assert!(collapse_category().validate().passed());
        assert_eq!(collapse_category().hom(0, 1).euler_characteristic(), 1);
    }

    #[test]
    fn collapse_functor_sends_u_to_generator() {
        let f = collapse_functor();
        assert_eq!(f.on_basis(0, 1, 0), HomVector::term(0));
        assert!(f.on_basis(0, 1, 1).is_zero());
    }

    #[test]
    fn random_categories_are_valid_directed_and_nontrivial() {
        for seed in 0..25 {
            let c = random_directed(seed);
            let r = c.validate();
            assert!(r.passed(), "seed {seed}: {:?}", r.first_failure());
            assert!(c.directedness().is_ok());
            let degrees: std::collections::BTreeSet<i32> = c
                .nonzero_pairs()
                .iter()
                .flat_map(|&(x, y)| c.hom(x, y).dims().into_keys())
                .collect();
            assert!(degrees.len() >= 2, "seed {seed}");
            assert!(c.nonzero_pairs().iter().any(|&(x, y)| c
                .hom(x, y)
                .differential
                .iter()
                .any(|v| !v.is_zero())));
        }
    }

    #[test]
    fn random_categories_are_reproducible() {
        let (a, b) = (random_directed(7), random_directed(7));
        assert_eq!(a.hom(0, 2), b.hom(0, 2));
    }
}
