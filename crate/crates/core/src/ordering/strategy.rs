//! Redex-selection strategies for the rewrite engine.
//!
//! The rewrite system is confluent on its supported fragment, so every
//! strategy must reach the same normal form. Strategies are registered by
//! name so tests and the CLI can pick one at runtime.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Chooses which redex of a word is rewritten next.
pub trait RewriteStrategy: Send {
    fn name(&self) -> &str;

    /// `redexes` holds the positions of every rewritable pair in ascending
    /// order and is never empty. Returns an index into `redexes`.
    fn choose(&mut self, redexes: &[usize]) -> usize;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Leftmost;

impl RewriteStrategy for Leftmost {
    fn name(&self) -> &str {
        "leftmost"
    }

    fn choose(&mut self, _redexes: &[usize]) -> usize {
        0
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Rightmost;

impl RewriteStrategy for Rightmost {
    fn name(&self) -> &str {
        "rightmost"
    }

    fn choose(&mut self, redexes: &[usize]) -> usize {
        redexes.len() - 1
    }
}

/// Uniformly random choice from a seeded generator.
pub struct Shuffled {
    rng: StdRng,
}

impl Shuffled {
    pub fn new(seed: u64) -> Self {
        Shuffled {
            rng: StdRng::seed_from_u64(seed),
        }
    }
}

impl RewriteStrategy for Shuffled {
    fn name(&self) -> &str {
        "random"
    }

    fn choose(&mut self, redexes: &[usize]) -> usize {
        self.rng.gen_range(0..redexes.len())
    }
}

type StrategyFactory = Box<dyn Fn(u64) -> Box<dyn RewriteStrategy> + Send + Sync>;

/// Name-keyed strategy factories. The `u64` argument seeds stochastic ones.
pub struct StrategyRegistry {
    factories: BTreeMap<String, StrategyFactory>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(u64) -> Box<dyn RewriteStrategy> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn create(&self, name: &str, seed: u64) -> Option<Box<dyn RewriteStrategy>> {
        self.factories.get(name).map(|f| f(seed))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        let mut r = StrategyRegistry::empty();
        r.register("leftmost", |_| Box::new(Leftmost));
        r.register("rightmost", |_| Box::new(Rightmost));
        r.register("random", |seed| Box::new(Shuffled::new(seed)));
        r
    }
}
