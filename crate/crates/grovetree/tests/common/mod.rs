//! Shared helpers for the integration suites: seeded random trees and an
//! exhaustive enumerator over every outcome of a stochastic growth run.

use grovetree::growth::{
    grow_with_sampler, GrowthError, GrowthSpec, LengthDistribution, LengthSampler, RngStream,
};
use grovetree::Tree;

/// Uniform random labeled tree on `n` vertices (random Prüfer sequence).
pub fn random_tree(n: usize, rng: &mut RngStream) -> Tree {
    match n {
        0 => panic!("no empty trees"),
        1 => Tree::single_vertex(),
        2 => Tree::path(2).unwrap(),
        _ => {
            let seq: Vec<usize> = (0..n - 2).map(|_| rng.pick(n)).collect();
            Tree::from_prufer(&seq).unwrap()
        }
    }
}

/// Replays a fixed script of distribution indices; when the script runs
/// out it records how many branches the next draw would have.
struct ScriptSampler<'a> {
    script: &'a [usize],
    pos: usize,
    prob: f64,
    pending_branches: Option<usize>,
}

impl LengthSampler for ScriptSampler<'_> {
    fn draw(&mut self, dist: &LengthDistribution) -> Result<u64, GrowthError> {
        if self.pos == self.script.len() {
            self.pending_branches = Some(dist.len());
            return Err(GrowthError::SamplerExhausted);
        }
        let index = self.script[self.pos];
        self.pos += 1;
        self.prob *= dist.prob_at(index);
        Ok(dist.value_at(index))
    }
}

/// Every outcome tree of `t` growth steps together with its probability.
/// Walks the draw tree depth-first, extending the draw script one decision
/// at a time; the probabilities of the returned outcomes sum to 1.
#[allow(dead_code)]
pub fn enumerate_outcomes(seed: &Tree, spec: &GrowthSpec, t: u64) -> Vec<(Tree, f64)> {
    let mut outcomes = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(script) = stack.pop() {
        let mut sampler = ScriptSampler {
            script: &script,
            pos: 0,
            prob: 1.0,
            pending_branches: None,
        };
        match grow_with_sampler(seed, spec, t, &mut sampler, u64::MAX) {
            Ok(tree) => {
                assert_eq!(sampler.pos, script.len(), "script exactly consumed");
                outcomes.push((tree, sampler.prob));
            }
            Err(GrowthError::SamplerExhausted) => {
                let branches = sampler.pending_branches.expect("recorded on exhaustion");
                for index in 0..branches {
                    let mut extended = script.clone();
                    extended.push(index);
                    stack.push(extended);
                }
            }
            Err(other) => panic!("enumeration hit unexpected error: {other}"),
        }
    }
    outcomes
}

/// Exact expected Wiener index over the enumerated outcome space.
#[allow(dead_code)]
pub fn enumerated_expected_wiener(seed: &Tree, spec: &GrowthSpec, t: u64) -> f64 {
    let outcomes = enumerate_outcomes(seed, spec, t);
    let total_prob: f64 = outcomes.iter().map(|(_, p)| p).sum();
    assert!(
        (total_prob - 1.0).abs() < 1e-12,
        "outcome probabilities sum to {total_prob}"
    );
    outcomes
        .iter()
        .map(|(tree, p)| p * tree.wiener_fast().unwrap() as f64)
        .sum()
}
