//! Property tests for the linear algebra, chain complexes, functors and
//! twisted products.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use dgtwist::dgcat::{interval, DgFunctor, FiniteDgCategory, HomVector};
use dgtwist::fixtures::{collapse_category, collapse_functor, random_directed};
use dgtwist::linalg::Matrix;
use dgtwist::scalar::Field;
use dgtwist::twist::{twisted_map_on_second_factor, TwistedCategory};
use proptest::prelude::*;

const P1: u64 = 32003;
const P2: u64 = 65521;

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..7, 1usize..7)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-4i64..=4, c), r))
}

fn low_rank_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..6, 1usize..6, 1usize..4).prop_flat_map(|(r, c, k)| {
        (
            prop::collection::vec(prop::collection::vec(-3i64..=3, k), r),
            prop::collection::vec(prop::collection::vec(-3i64..=3, c), k),
        )
            .prop_map(move |(a, b)| {
                (0..r)
                    .map(|i| {
                        (0..c)
                            .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                            .collect()
                    })
                    .collect()
            })
    })
}

fn twisted_hom_complexes(seed: u64, n: usize) -> (TwistedCategory, Vec<(usize, usize)>) {
    let tc = TwistedCategory::new(n, Arc::new(random_directed(seed))).unwrap();
    let pairs = tc.category().nonzero_pairs();
    (tc, pairs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_equals_transpose_rank(rows in small_matrix()) {
        for field in [Field::Q, Field::Fp(P1), Field::Fp(7)] {
            let m = Matrix::from_dense(field, &rows);
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }

    #[test]
    fn prime_field_rank_never_exceeds_rational_rank(rows in small_matrix()) {
        let q = Matrix::from_dense(Field::Q, &rows).rank();
        for p in [P1, P2, 3] {
            prop_assert!(Matrix::from_dense(Field::Fp(p), &rows).rank() <= q);
        }
    }

    #[test]
    fn factored_matrices_have_bounded_rank(rows in low_rank_matrix()) {
        let k = rows.len().min(rows[0].len());
        let q = Matrix::from_dense(Field::Q, &rows);
        prop_assert!(q.rank() <= k);
        prop_assert_eq!(q.rank() + q.kernel().len(), q.cols());
        for v in q.kernel() {
            prop_assert!(q.apply(&v).is_zero());
        }
    }

    #[test]
    fn hom_complexes_agree_over_q_and_large_primes(seed in 0u64..500, n in 0usize..=1) {
        let (tc, pairs) = twisted_hom_complexes(seed, n);
        let c = tc.category();
        for (x, y) in pairs {
            let h = c.hom(x, y);
            let q = h.to_chain_complex(Field::Q).unwrap().complex.cohomology().unwrap().dims();
            for p in [P1, P2] {
                let fp = h.to_chain_complex(Field::Fp(p)).unwrap().complex.cohomology().unwrap().dims();
                prop_assert_eq!(&fp, &q);
            }
        }
    }

    #[test]
    fn euler_characteristic_is_conserved(seed in 0u64..500, n in 0usize..=2) {
        let (tc, pairs) = twisted_hom_complexes(seed, n);
        let c = tc.category();
        for (x, y) in pairs {
            let graded = c.hom(x, y).to_chain_complex(Field::Q).unwrap();
            let h = graded.complex.cohomology().unwrap();
            prop_assert_eq!(graded.complex.euler_characteristic(), h.euler_characteristic());
        }
    }

    #[test]
    fn representatives_are_independent_cocycles(seed in 0u64..500) {
        let (tc, pairs) = twisted_hom_complexes(seed, 1);
        let c = tc.category();
        for (x, y) in pairs {
            let complex = c.hom(x, y).to_chain_complex(Field::Q).unwrap().complex;
            let h = complex.cohomology().unwrap();
            for (d, dim) in h.dims() {
                let g = h.group(d).unwrap();
                prop_assert_eq!(g.representatives().len(), dim);
                for r in g.representatives() {
                    prop_assert!(complex.differential(d).apply(r).is_zero());
                    prop_assert!(g.coordinates(r).is_some());
                }
            }
        }
    }

    #[test]
    fn lifted_functor_commutes_with_d_and_composition(seed in 0u64..10_000) {
        let source = TwistedCategory::new(1, Arc::new(collapse_category())).unwrap();
        let target = TwistedCategory::new(1, Arc::new(interval(1))).unwrap();
        let f = twisted_map_on_second_factor(&source, &target, &collapse_functor()).unwrap();
        check_functor_sample(&f, seed)?;
    }

    #[test]
    fn tensor_functor_commutes_with_d_and_composition(seed in 0u64..10_000) {
        let f = collapse_functor().tensor(&DgFunctor::identity(Arc::new(collapse_category()))).unwrap();
        check_functor_sample(&f, seed)?;
    }
}

/// Picks a composable pair of basis elements from the seed and checks
/// `F(dg) = dF(g)` and `F(g ∘ f) = F(g) ∘ F(f)`.
fn check_functor_sample(f: &DgFunctor, seed: u64) -> Result<(), TestCaseError> {
    let c: &FiniteDgCategory = f.source();
    let d: &FiniteDgCategory = f.target();
    let pairs = c.nonzero_pairs();
    let mut r = seed;
    let mut next = |m: usize| {
        r = r
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((r >> 33) as usize) % m
    };
    let (x, y) = pairs[next(pairs.len())];
    let onward: Vec<usize> = (0..c.num_objects())
        .filter(|z| !c.hom(y, *z).is_empty())
        .collect();
    let z = onward[next(onward.len())];
    let fi = next(c.hom(x, y).len());
    let gi = next(c.hom(y, z).len());
    let (fx, fy, fz) = (f.on_object(x), f.on_object(y), f.on_object(z));
    let image_d = f.apply(x, y, c.differential(x, y, fi));
    let d_image = d.differential_of(fx, fy, &f.on_basis(x, y, fi));
    prop_assert_eq!(image_d, d_image);
    let image_comp = f.apply(x, z, &c.compose(x, y, z, gi, fi));
    let comp_image = d.compose_vectors(fx, fy, fz, &f.on_basis(y, z, gi), &f.on_basis(x, y, fi));
    prop_assert_eq!(image_comp, comp_image);
    Ok(())
}

#[test]
fn randomized_word_pairs_and_triples() {
    let tally = common::randomized_word_suite(60);
    assert!(tally.leibniz >= 1000, "{} Leibniz samples", tally.leibniz);
    assert!(
        tally.associativity >= 1000,
        "{} associativity samples",
        tally.associativity
    );
    assert!(
        tally.failures.is_empty(),
        "{:?}",
        &tally.failures[..tally.failures.len().min(5)]
    );
}

#[test]
fn dense_identity_rank() {
    for field in [Field::Q, Field::Fp(P1)] {
        assert_eq!(Matrix::identity(5, field).rank(), 5);
    }
    let empty: BTreeMap<i32, usize> = BTreeMap::new();
    assert!(empty.is_empty());
    assert!(HomVector::new().is_zero());
}
