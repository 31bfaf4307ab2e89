//! Belief dynamics on an adaptive social network.
//!
//! Investors meet random neighbours. When their beliefs about carbon policy
//! differ, the active investor either drops the link in favour of a
//! like-minded stranger (homophilic rewiring) or considers adopting the
//! neighbour's belief, with a probability that grows with the neighbour's
//! relative success.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::Investor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SocialParams {
    /// Social interaction frequency: monthly activation probability.
    pub sif: f64,
    /// Probability that a discordant encounter ends in rewiring.
    pub phi: f64,
    /// Sensitivity of imitation to the success difference.
    pub alpha: f64,
    /// Persuasion bonus of convinced responsible investors.
    pub delta: f64,
    /// Degree of the initial ring lattice.
    pub k_ring: usize,
    /// Edge rewiring probability used to build the initial network.
    pub p_rewire_init: f64,
}

impl Default for SocialParams {
    fn default() -> Self {
        SocialParams {
            sif: 0.35,
            phi: 0.1,
            alpha: 0.07,
            delta: 0.7,
            k_ring: 10,
            p_rewire_init: 0.1,
        }
    }
}

impl SocialParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("social.sif", self.sif),
            ("social.phi", self.phi),
            ("social.p_rewire_init", self.p_rewire_init),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "social.alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "social.delta must be >= 0, got {}",
                self.delta
            )));
        }
        if !self.k_ring.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "social.k_ring must be even, got {}",
                self.k_ring
            )));
        }
        Ok(())
    }
}

/// Undirected simple graph stored as adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    adjacency: Vec<Vec<u32>>,
    edges: usize,
}

impl Network {
    pub fn empty(n: usize) -> Self {
        Network {
            adjacency: vec![Vec::new(); n],
            edges: 0,
        }
    }

    pub fn ring_lattice(n: usize, k: usize) -> Self {
        let mut g = Network::empty(n);
        for i in 0..n {
            for d in 1..=k / 2 {
                g.add_edge(i, (i + d) % n);
            }
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(&(b as u32))
    }

    /// Returns false (and changes nothing) for self-loops and existing edges.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        if a == b || self.has_edge(a, b) {
            return false;
        }
        self.adjacency[a].push(b as u32);
        self.adjacency[b].push(a as u32);
        self.edges += 1;
        true
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) -> bool {
        let Some(pa) = self.adjacency[a].iter().position(|&v| v as usize == b) else {
            return false;
        };
        self.adjacency[a].swap_remove(pa);
        let pb = self.adjacency[b]
            .iter()
            .position(|&v| v as usize == a)
            .expect("adjacency lists out of sync");
        self.adjacency[b].swap_remove(pb);
        self.edges -= 1;
        true
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| {
                ns.iter()
                    .map(move |&v| (u, v as usize))
                    .filter(|&(u, v)| u < v)
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// One `u v` pair per line.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (u, v) in self.edge_list() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }
}

const MAX_CONNECT_ATTEMPTS: usize = 1000;

/// Watts–Strogatz small-world graph: a ring lattice of degree `k` whose
/// edges are each rewired to a uniformly random new endpoint with probability
/// `p`. Rebuilt until connected.
pub fn init_small_world<R: Rng + ?Sized>(n: usize, k: usize, p: f64, rng: &mut R) -> Result<Network> {
    if !k.is_multiple_of(2) || k == 0 {
        return Err(Error::Network(format!("ring degree must be even and positive, got {k}")));
    }
    if n <= k {
        return Err(Error::Network(format!("need more than {k} nodes, got {n}")));
    }
    for _ in 0..MAX_CONNECT_ATTEMPTS {
        let mut g = Network::ring_lattice(n, k);
        if p > 0.0 {
            for d in 1..=k / 2 {
                for u in 0..n {
                    let v = (u + d) % n;
                    if !rng.gen_bool(p) || !g.has_edge(u, v) {
                        continue;
                    }
                    // every other node already adjacent: keep the edge
                    if g.degree(u) >= n - 1 {
                        continue;
                    }
                    let w = loop {
                        let w = rng.gen_range(0..n);
                        if w != u && !g.has_edge(u, w) {
                            break w;
                        }
                    };
                    g.remove_edge(u, v);
                    g.add_edge(u, w);
                }
            }
        }
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Network(format!(
        "no connected graph after {MAX_CONNECT_ATTEMPTS} attempts (n={n}, k={k}, p={p})"
    )))
}

/// Success score: one hundred times the monthly return on wealth plus wealth
/// relative to the population mean.
pub fn success(investor: &Investor, price: f64, mean_wealth: f64) -> f64 {
    let wealth = investor.wealth(price);
    let roi = if wealth > 0.0 {
        investor.last_income / wealth
    } else {
        0.0
    };
    let relative = if mean_wealth > 0.0 {
        wealth / mean_wealth
    } else {
        0.0
    };
    100.0 * roi + relative
}

/// Probability that an investor with success `sigma_i` adopts the belief of a
/// neighbour with success `sigma_j`. Convinced responsible neighbours get a
/// bonus of `delta`.
pub fn adoption_probability(
    sigma_i: f64,
    sigma_j: f64,
    neighbor_committed: bool,
    alpha: f64,
    delta: f64,
) -> f64 {
    // (1 + tanh x) / 2 written as a logistic, which keeps full relative
    // precision when the probability is tiny
    let p0 = 1.0 / (1.0 + (-2.0 * alpha * (sigma_j - sigma_i)).exp());
    if neighbor_committed {
        (p0 + delta).min(1.0)
    } else {
        p0
    }
}

/// Uniformly random investor sharing `i`'s belief who is neither `i` nor
/// one of its neighbours, if any exists.
fn rewiring_target<R: Rng + ?Sized>(
    investors: &[Investor],
    network: &Network,
    i: usize,
    rng: &mut R,
) -> Option<usize> {
    let belief = investors[i].convinced;
    let like_minded = investors.iter().filter(|v| v.convinced == belief).count();
    let like_minded_neighbors = network
        .neighbors(i)
        .iter()
        .filter(|&&v| investors[v as usize].convinced == belief)
        .count();
    if like_minded <= 1 + like_minded_neighbors {
        return None;
    }
    // rejection sampling is exactly uniform over the admissible set
    loop {
        let k = rng.gen_range(0..investors.len());
        if k != i && investors[k].convinced == belief && !network.has_edge(i, k) {
            return Some(k);
        }
    }
}

/// Per-round tallies, mostly for diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SocialTally {
    pub encounters: usize,
    pub rewirings: usize,
    pub adoptions: usize,
}

/// One month of social interaction.
pub fn social_round<R: Rng + ?Sized>(
    investors: &mut [Investor],
    network: &mut Network,
    params: &SocialParams,
    price: f64,
    rng: &mut R,
) -> SocialTally {
    let mut tally = SocialTally::default();
    let n = investors.len();
    if n == 0 {
        return tally;
    }
    let mut active: Vec<usize> = (0..n).filter(|_| rng.gen_bool(params.sif)).collect();
    if active.is_empty() {
        return tally;
    }
    active.shuffle(rng);

    let mean_wealth = investors.iter().map(|i| i.wealth(price)).sum::<f64>() / n as f64;
    let sigma: Vec<f64> = investors
        .iter()
        .map(|i| success(i, price, mean_wealth))
        .collect();

    for i in active {
        let neighbors = network.neighbors(i);
        if neighbors.is_empty() {
            continue;
        }
        let j = neighbors[rng.gen_range(0..neighbors.len())] as usize;
        if investors[i].convinced == investors[j].convinced {
            continue;
        }
        tally.encounters += 1;
        if rng.gen_bool(params.phi) {
            if let Some(k) = rewiring_target(investors, network, i, rng) {
                network.remove_edge(i, j);
                network.add_edge(i, k);
                tally.rewirings += 1;
            }
        } else {
            if investors[i].is_committed() {
                continue;
            }
            let p = adoption_probability(
                sigma[i],
                sigma[j],
                investors[j].is_committed(),
                params.alpha,
                params.delta,
            );
            if rng.gen_bool(p) {
                investors[i].convinced = investors[j].convinced;
                tally.adoptions += 1;
            }
        }
    }
    tally
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plain(convinced: bool) -> Investor {
        Investor {
            id: 0,
            responsible: false,
            convinced,
            shares: 0.0,
            cash: 10.0,
            last_income: 0.0,
        }
    }

    #[test]
    fn ring_without_rewiring_is_a_cycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = init_small_world(10, 2, 0.0, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 10);
        for i in 0..10 {
            assert_eq!(g.degree(i), 2);
            assert!(g.has_edge(i, (i + 1) % 10));
        }
    }

    #[test]
    fn small_world_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = init_small_world(400, 10, 0.1, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 2000);
        assert_eq!(g.edge_list().len(), 2000);
        assert!(g.is_connected());
    }

    #[test]
    fn full_rewiring_keeps_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = init_small_world(100, 4, 1.0, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 200);
        assert!((0..100).any(|i| g.degree(i) != 4));
    }

    #[test]
    fn impossible_networks_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(init_small_world(4, 4, 0.1, &mut rng).is_err());
        assert!(init_small_world(10, 3, 0.1, &mut rng).is_err());
    }

    #[test]
    fn success_arithmetic() {
        let mut inv = plain(false);
        inv.cash = 100.0;
        inv.last_income = 0.5;
        assert!((success(&inv, 1.0, 100.0) - 1.5).abs() < 1e-12);
        inv.cash = 0.0;
        assert_eq!(success(&inv, 1.0, 100.0), 0.0);
    }

    #[test]
    fn adoption_probability_values() {
        assert_eq!(adoption_probability(1.0, 1.0, false, 0.5, 0.2), 0.5);
        let p = adoption_probability(0.0, 1.0, false, 1.0, 0.2);
        assert!((p - 0.880_797_077_977_882_4).abs() < 1e-15);
        // p0 = 0.95 here; the bonus saturates
        let z = (0.9f64).atanh();
        assert_eq!(adoption_probability(0.0, z, true, 1.0, 0.1), 1.0);
        assert!(adoption_probability(0.0, 1e6, false, 1.0, 0.0) == 1.0);
        assert!(adoption_probability(0.0, -1e6, false, 1.0, 0.0) == 0.0);
    }

    #[test]
    fn zero_sif_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut g = init_small_world(20, 4, 0.1, &mut rng).unwrap();
        let before = g.clone();
        let mut invs: Vec<_> = (0..20).map(|k| plain(k % 2 == 0)).collect();
        let params = SocialParams {
            sif: 0.0,
            ..SocialParams::default()
        };
        let t = social_round(&mut invs, &mut g, &params, 1.0, &mut rng);
        assert_eq!(t, SocialTally::default());
        assert_eq!(g, before);
    }

    #[test]
    fn two_nodes_without_rewiring_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut g = Network::empty(2);
        g.add_edge(0, 1);
        let mut invs = vec![plain(true), plain(false)];
        let params = SocialParams {
            sif: 1.0,
            phi: 1.0,
            ..SocialParams::default()
        };
        for _ in 0..20 {
            let t = social_round(&mut invs, &mut g, &params, 1.0, &mut rng);
            assert_eq!(t.rewirings + t.adoptions, 0);
        }
        assert!(g.has_edge(0, 1));
        assert!(invs[0].convinced && !invs[1].convinced);
    }

    #[test]
    fn converged_beliefs_are_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut g = init_small_world(50, 4, 0.2, &mut rng).unwrap();
        let before = g.clone();
        let mut invs: Vec<_> = (0..50).map(|_| plain(true)).collect();
        let params = SocialParams {
            sif: 1.0,
            ..SocialParams::default()
        };
        for _ in 0..10 {
            social_round(&mut invs, &mut g, &params, 1.0, &mut rng);
        }
        assert_eq!(g, before);
        assert!(invs.iter().all(|i| i.convinced));
    }

    #[test]
    fn committed_investors_never_revert() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut g = init_small_world(30, 4, 0.1, &mut rng).unwrap();
        let mut invs: Vec<_> = (0..30).map(|k| plain(k < 5)).collect();
        for inv in invs.iter_mut().take(5) {
            inv.responsible = true;
        }
        let params = SocialParams {
            sif: 1.0,
            phi: 0.0,
            alpha: 100.0,
            ..SocialParams::default()
        };
        for _ in 0..50 {
            social_round(&mut invs, &mut g, &params, 1.0, &mut rng);
            assert!(invs.iter().take(5).all(|i| i.convinced));
        }
    }

    #[test]
    fn edge_list_format() {
        let g = Network::ring_lattice(4, 2);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n0 3\n1 2\n2 3\n");
    }
}
