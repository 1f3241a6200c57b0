use std::collections::VecDeque;

use super::category::{CategoryError, FiniteDgCategory};

/// Levels on objects such that every non-identity basis morphism strictly
/// raises the level, and every endomorphism complex is spanned by the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectednessWitness {
    levels: Vec<i64>,
}

impl DirectednessWitness {
    pub fn new(levels: Vec<i64>) -> Self {
        DirectednessWitness { levels }
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    pub fn level(&self, x: usize) -> i64 {
        self.levels[x]
    }

    pub fn check(&self, c: &FiniteDgCategory) -> Result<(), CategoryError> {
        let n = c.num_objects();
        if self.levels.len() != n {
            return Err(CategoryError::NotDirected(format!(
                "witness has {} levels for {} objects",
                self.levels.len(),
                n
            )));
        }
        check_endomorphisms(c)?;
        for x in 0..n {
            for y in 0..n {
                if x != y && !c.hom(x, y).is_empty() && self.levels[x] >= self.levels[y] {
                    return Err(CategoryError::NotDirected(format!(
                        "{} ∈ hom({},{}) does not raise the level ({} -> {})",
                        c.label(x, y, 0),
                        c.object_label(x),
                        c.object_label(y),
                        self.levels[x],
                        self.levels[y]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Longest-path levels of the graph of nonzero homs; fails on a cycle.
    pub fn derive(c: &FiniteDgCategory) -> Result<Self, CategoryError> {
        check_endomorphisms(c)?;
        let n = c.num_objects();
        let mut indegree = vec![0usize; n];
        for x in 0..n {
            for y in 0..n {
                if x != y && !c.hom(x, y).is_empty() {
                    indegree[y] += 1;
                }
            }
        }
        let mut levels = vec![0i64; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&x| indegree[x] == 0).collect();
        let mut seen = 0;
        while let Some(x) = queue.pop_front() {
            seen += 1;
            for y in 0..n {
                if x != y && !c.hom(x, y).is_empty() {
                    levels[y] = levels[y].max(levels[x] + 1);
                    indegree[y] -= 1;
                    if indegree[y] == 0 {
                        queue.push_back(y);
                    }
                }
            }
        }
        if seen < n {
            let stuck: Vec<&str> = (0..n)
                .filter(|&x| indegree[x] > 0)
                .map(|x| c.object_label(x))
                .collect();
            return Err(CategoryError::NotDirected(format!(
                "nonzero homs form a cycle through objects {stuck:?}"
            )));
        }
        Ok(DirectednessWitness { levels })
    }

    /// Number of distinct levels minus one bounds the length of any chain of
    /// composable non-identity basis morphisms.
    pub fn max_chain_length(&self) -> usize {
        let mut l = self.levels.clone();
        l.sort_unstable();
        l.dedup();
        l.len().saturating_sub(1)
    }
}

fn check_endomorphisms(c: &FiniteDgCategory) -> Result<(), CategoryError> {
    for x in 0..c.num_objects() {
        let h = c.hom(x, x);
        if h.len() != 1 {
            return Err(CategoryError::NotDirected(format!(
                "hom({0},{0}) has dimension {1}, expected the identity only",
                c.object_label(x),
                h.len()
            )));
        }
    }
    Ok(())
}
