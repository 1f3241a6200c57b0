//! Shared instances and randomized word checks for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use dgtwist::dgcat::{interval, FiniteDgCategory};
use dgtwist::fixtures::{collapse_category, random_directed};
use dgtwist::scalar::sign;
use dgtwist::twist::{Morphism, TwistWord, TwistedCategory, WordCombination};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RANDOM_SEEDS: u64 = 25;

/// Base categories of the projection instance set.
pub fn base_categories() -> Vec<(String, Arc<FiniteDgCategory>)> {
    let mut out: Vec<(String, Arc<FiniteDgCategory>)> = (0..=3)
        .map(|m| (format!("interval({m})"), Arc::new(interval(m))))
        .collect();
    out.push(("collapse".into(), Arc::new(collapse_category())));
    for seed in 0..RANDOM_SEEDS {
        out.push((format!("random({seed})"), Arc::new(random_directed(seed))));
    }
    out
}

/// Every `(n, C)` with `n` in 0..=2 and `C` from [`base_categories`].
pub fn projection_instances() -> Vec<(String, usize, Arc<FiniteDgCategory>)> {
    let mut out = Vec::new();
    for (name, c) in base_categories() {
        for n in 0..=2 {
            out.push((name.clone(), n, c.clone()));
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct WordTally {
    pub leibniz: usize,
    pub associativity: usize,
    pub d_squared: usize,
    pub composite_epsilon: usize,
    pub failures: Vec<String>,
}

impl WordTally {
    pub fn absorb(&mut self, other: WordTally) {
        self.leibniz += other.leibniz;
        self.associativity += other.associativity;
        self.d_squared += other.d_squared;
        self.composite_epsilon += other.composite_epsilon;
        self.failures.extend(other.failures);
    }
}

struct Sampler<'a> {
    tc: &'a TwistedCategory,
    outgoing: BTreeMap<usize, Vec<usize>>,
}

impl<'a> Sampler<'a> {
    fn new(tc: &'a TwistedCategory) -> Self {
        let mut outgoing: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&(s, t), ws) in tc.all_words() {
            if !ws.is_empty() {
                outgoing.entry(s).or_default().push(t);
            }
        }
        Sampler { tc, outgoing }
    }

    fn start(&self, rng: &mut ChaCha8Rng) -> usize {
        let keys: Vec<usize> = self.outgoing.keys().copied().collect();
        *keys.choose(rng).expect("nonempty category")
    }

    fn step(&self, rng: &mut ChaCha8Rng, s: usize) -> (usize, TwistWord) {
        let t = *self.outgoing[&s]
            .choose(rng)
            .expect("identity hom is nonempty");
        let w = self
            .tc
            .words(s, t)
            .choose(rng)
            .expect("nonempty hom")
            .clone();
        (t, w)
    }
}

fn base_chain(
    rng: &mut ChaCha8Rng,
    c: &FiniteDgCategory,
    max_len: usize,
) -> (usize, Vec<Morphism>) {
    let x = rng.gen_range(0..c.num_objects());
    let mut chain = Vec::new();
    let mut z = x;
    for _ in 0..rng.gen_range(0..=max_len) {
        let mut options = Vec::new();
        for y in 0..c.num_objects() {
            for i in 0..c.hom(z, y).len() {
                if !c.is_identity(z, y, i) {
                    options.push(Morphism::new(z, y, i));
                }
            }
        }
        match options.choose(rng) {
            Some(g) => {
                z = g.dst;
                chain.push(*g);
            }
            None => break,
        }
    }
    (x, chain)
}

/// Samples composable word pairs and triples of `I_n ⊗̃ C` and checks the
/// graded Leibniz rule, associativity, `d² = 0` and the agreement of the
/// composite-generator differential with the differential of its expansion.
pub fn random_word_checks(tc: &TwistedCategory, seed: u64, samples: usize) -> WordTally {
    let t = tc.twist();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = Sampler::new(tc);
    let mut tally = WordTally::default();
    let label = |w: &TwistWord| t.label(w);
    for _ in 0..samples {
        let s = sampler.start(&mut rng);
        let (m, w1) = sampler.step(&mut rng, s);
        let (u, w2) = sampler.step(&mut rng, m);
        let (_, w3) = sampler.step(&mut rng, u);
        let d = |v: &WordCombination| t.differential_of(v);
        let single = |w: &TwistWord| WordCombination::term(w.clone());

        let prod = t.compose(&w2, &w1).unwrap();
        let mut rhs = t
            .compose_combinations(&d(&single(&w2)), &single(&w1))
            .unwrap();
        rhs.add_scaled(
            &t.compose_combinations(&single(&w2), &d(&single(&w1)))
                .unwrap(),
            &sign(t.degree(&w2) as i64),
        );
        tally.leibniz += 1;
        if d(&prod) != rhs {
            tally
                .failures
                .push(format!("Leibniz on {} ∘ {}", label(&w2), label(&w1)));
        }

        let left = t
            .compose_combinations(&t.compose(&w3, &w2).unwrap(), &single(&w1))
            .unwrap();
        let right = t.compose_combinations(&single(&w3), &prod).unwrap();
        tally.associativity += 1;
        if left != right {
            tally.failures.push(format!(
                "associativity on {} ∘ {} ∘ {}",
                label(&w3),
                label(&w2),
                label(&w1)
            ));
        }

        tally.d_squared += 1;
        if !d(&d(&single(&w1))).is_zero() {
            tally.failures.push(format!("d² on {}", label(&w1)));
        }

        if tc.n() >= 1 {
            let a = rng.gen_range(0..tc.n());
            let b = rng.gen_range(a + 1..=tc.n());
            let (x, chain) = base_chain(&mut rng, tc.base(), 3);
            let direct = t.composite_epsilon_differential(a, b, x, &chain).unwrap();
            let expanded = t.differential_of(&t.expand_composite_epsilon(a, b, x, &chain).unwrap());
            tally.composite_epsilon += 1;
            if direct != expanded {
                tally.failures.push(format!(
                    "composite generator differential f{}..f{} at {x}",
                    a + 1,
                    b
                ));
            }
        }
    }
    tally
}

/// Randomized word checks over interval, collapse and random bases, with
/// `samples` draws per instance.
pub fn randomized_word_suite(samples: usize) -> WordTally {
    let mut tally = WordTally::default();
    let mut bases: Vec<Arc<FiniteDgCategory>> =
        vec![Arc::new(interval(2)), Arc::new(collapse_category())];
    bases.extend((0..8).map(|s| Arc::new(random_directed(100 + s))));
    for (k, base) in bases.into_iter().enumerate() {
        for n in 1..=2 {
            let tc = TwistedCategory::new(n, base.clone()).unwrap();
            tally.absorb(random_word_checks(&tc, (k * 10 + n) as u64, samples));
        }
    }
    tally
}
