use std::collections::BTreeMap;

use super::category::{BasisElement, FiniteDgCategory, HomComplex, HomVector};
use super::directed::DirectednessWitness;

/// Basis label of the unique morphism `i -> j` of an interval category.
pub fn interval_label(i: usize, j: usize) -> String {
    if i == j {
        format!("id_{i}")
    } else {
        format!("{i}->{j}")
    }
}

/// The poset `0 < 1 < … < n` linearized: `hom(i, j)` is one-dimensional in
/// degree 0 for `i <= j` and zero otherwise; composition is multiplication.
pub fn interval(n: usize) -> FiniteDgCategory {
    let objects: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    let mut homs = BTreeMap::new();
    let mut composition = BTreeMap::new();
    for i in 0..=n {
        for j in i..=n {
            homs.insert(
                (i, j),
                HomComplex::closed(vec![BasisElement::new(interval_label(i, j), 0)]),
            );
            for k in j..=n {
                composition.insert((i, j, k), vec![HomVector::term(0)]);
            }
        }
    }
    FiniteDgCategory::new(objects, homs, composition, vec![0; n + 1])
        .and_then(|c| c.with_order(DirectednessWitness::new((0..=n as i64).collect())))
        .expect("interval categories are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_zero_has_one_object() {
        let c = interval(0);
        assert_eq!(c.num_objects(), 1);
        assert_eq!(c.hom(0, 0).len(), 1);
        assert!(c.is_identity(0, 0, 0));
    }

    #[test]
    fn interval_two_homs() {
        let c = interval(2);
        assert_eq!(c.hom(0, 2).dims(), [(0, 1)].into_iter().collect());
        assert!(c.hom(2, 0).is_empty());
    }

    #[test]
    fn interval_three_counts_pairs() {
        assert_eq!(interval(3).nonzero_pairs().len(), 10);
    }

    #[test]
    fn intervals_validate() {
        for n in 0..=6 {
            let r = interval(n).validate();
            assert!(r.passed(), "interval({n}): {:?}", r.first_failure());
        }
    }
}
