//! Seeded random instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Instance, PostId, Tier, Tuple};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub agents: usize,
    pub posts: usize,
    pub seed: u64,
    /// Chance that two adjacent tuples share a tier.
    pub tie_prob: f64,
}

/// Uniform composition of `total` into `parts` non-negative parts (stars and bars).
fn composition(rng: &mut ChaCha8Rng, total: usize, parts: usize) -> Vec<usize> {
    let slots = total + parts - 1;
    let mut bars = sample(rng, slots, parts - 1).into_vec();
    bars.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for (i, &b) in bars.iter().enumerate() {
        // Bar i sits at slot b; the stars before it and after bar i-1 form part i.
        out.push(b - prev - if i == 0 { 0 } else { 1 });
        prev = b;
    }
    out.push(slots - prev - if bars.is_empty() { 0 } else { 1 });
    out
}

fn random_list(rng: &mut ChaCha8Rng, n: usize, m: usize, tie_prob: f64) -> Vec<Tier> {
    let caps = composition(rng, n, m);
    // Each post releases its tuples in increasing congestion order.
    let mut next = vec![1usize; m];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let ready: Vec<usize> = (0..m).filter(|&a| next[a] <= caps[a]).collect();
        let a = ready[rng.gen_range(0..ready.len())];
        order.push(Tuple::new(PostId(a), next[a]));
        next[a] += 1;
    }
    let mut tiers: Vec<Tier> = Vec::new();
    for t in order {
        let merge = rng.gen_bool(tie_prob);
        match tiers.last_mut() {
            Some(tier) if merge && tier.iter().all(|u| u.post != t.post) => tier.push(t),
            _ => tiers.push(vec![t]),
        }
    }
    tiers
}

/// Posts `a1..am`, agents `v1..vn`; same spec, same instance.
pub fn gen_random(spec: RandomSpec) -> Instance {
    assert!(spec.agents > 0 && spec.posts > 0, "need at least one agent and one post");
    assert!((0.0..=1.0).contains(&spec.tie_prob), "tie probability outside [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let posts = (1..=spec.posts).map(|j| format!("a{j}")).collect();
    let agents = (1..=spec.agents).map(|i| format!("v{i}")).collect();
    let prefs = (0..spec.agents)
        .map(|_| random_list(&mut rng, spec.agents, spec.posts, spec.tie_prob))
        .collect();
    Instance::new(posts, agents, prefs).expect("generated names are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(agents: usize, posts: usize, seed: u64, tie_prob: f64) -> RandomSpec {
        RandomSpec {
            agents,
            posts,
            seed,
            tie_prob,
        }
    }

    #[test]
    fn compositions_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (total, parts) in [(0, 1), (1, 1), (5, 3), (3, 5), (10, 1), (0, 4)] {
            let c = composition(&mut rng, total, parts);
            assert_eq!(c.len(), parts);
            assert_eq!(c.iter().sum::<usize>(), total);
        }
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..50 {
            for (n, m) in [(1, 1), (3, 2), (5, 3), (2, 6), (12, 4)] {
                let inst = gen_random(spec(n, m, seed, 0.4));
                assert!(inst.validate().holds(), "seed {seed} n {n} m {m}");
            }
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(gen_random(spec(6, 3, 42, 0.3)), gen_random(spec(6, 3, 42, 0.3)));
        assert_ne!(gen_random(spec(6, 3, 42, 0.3)), gen_random(spec(6, 3, 43, 0.3)));
    }

    #[test]
    fn no_ties_without_tie_probability() {
        let inst = gen_random(spec(8, 3, 1, 0.0));
        for v in inst.agents() {
            assert!(inst.preferences(v).tiers().iter().all(|t| t.len() == 1));
        }
    }
}
