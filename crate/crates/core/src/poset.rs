//! Precedence-order algebra over a dense bit-matrix transitive closure:
//! predecessor/comparable sets, minimal and maximal elements, restriction
//! to the jobs releasable by a slot, antichain depth, and depth-bounded
//! enumeration of (maximal) antichains.
//!
//! Slots follow the unit-job convention: a job "at slot `t`" runs during
//! `[t - 1, t)`. The internal release slot `rho` of a job is the earliest
//! slot it can complete in, `release + 1`, closed under precedence so that
//! `a ≺ b` implies `rho[a] < rho[b]`.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::model::{Instance, ModelError, Time};

pub type NodeSet = FixedBitSet;

#[derive(Debug, Error)]
pub enum PosetError {
    #[error("precedence relation contains a cycle")]
    Cycle,
    #[error("nodes {0} and {1} are comparable, so the set is not an antichain")]
    NotAntichain(usize, usize),
    #[error("node {node} is not released by slot {slot}")]
    NotReleased { node: usize, slot: Time },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A set of pairwise incomparable nodes, stored as a sorted index list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Antichain(Vec<usize>);

impl Antichain {
    pub fn empty() -> Self {
        Antichain(Vec::new())
    }

    /// Canonicalizes `nodes` and checks pairwise incomparability.
    pub fn new(g: &PrecedenceGraph, mut nodes: Vec<usize>) -> Result<Self, PosetError> {
        nodes.sort_unstable();
        nodes.dedup();
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                if g.comparable(a, b) {
                    return Err(PosetError::NotAntichain(a, b));
                }
            }
        }
        Ok(Antichain(nodes))
    }

    /// Wraps an already sorted, known-incomparable node list.
    pub(crate) fn from_sorted(nodes: Vec<usize>) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        Antichain(nodes)
    }

    pub fn from_set(set: &NodeSet) -> Self {
        Antichain(set.ones().collect())
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_set(&self, n: usize) -> NodeSet {
        let mut s = NodeSet::with_capacity(n);
        for &x in &self.0 {
            s.insert(x);
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct PrecedenceGraph {
    ids: Vec<String>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    /// `down[x] = { y : y ⪯ x }`
    down: Vec<NodeSet>,
    /// `up[x] = { y : x ⪯ y }`
    up: Vec<NodeSet>,
    rho: Vec<Time>,
    topo: Vec<usize>,
}

impl PrecedenceGraph {
    /// Builds the order from node ids, release dates and direct edges.
    pub fn from_parts(
        ids: Vec<String>,
        releases: &[Time],
        edges: &[(usize, usize)],
    ) -> Result<Self, PosetError> {
        let n = ids.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a == b {
                return Err(PosetError::Cycle);
            }
            if !succ[a].contains(&b) {
                succ[a].push(b);
                pred[b].push(a);
            }
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
        }

        // Kahn with a min-heap keeps the order deterministic.
        let mut indeg: Vec<usize> = pred.iter().map(Vec::len).collect();
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
            .filter(|&v| indeg[v] == 0)
            .map(std::cmp::Reverse)
            .collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(v)) = ready.pop() {
            topo.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(std::cmp::Reverse(w));
                }
            }
        }
        if topo.len() != n {
            return Err(PosetError::Cycle);
        }

        let mut down = vec![NodeSet::with_capacity(n); n];
        let mut rho: Vec<Time> = releases.iter().map(|&r| r + 1).collect();
        for &v in &topo {
            let mut row = NodeSet::with_capacity(n);
            row.insert(v);
            for &u in &pred[v] {
                row.union_with(&down[u]);
                rho[v] = rho[v].max(rho[u] + 1);
            }
            down[v] = row;
        }
        let mut up = vec![NodeSet::with_capacity(n); n];
        for v in 0..n {
            for y in down[v].ones() {
                up[y].insert(v);
            }
        }

        Ok(PrecedenceGraph {
            ids,
            succ,
            pred,
            down,
            up,
            rho,
            topo,
        })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    /// Earliest completion slot after release closure.
    pub fn rho(&self, x: usize) -> Time {
        self.rho[x]
    }

    pub fn rhos(&self) -> &[Time] {
        &self.rho
    }

    pub fn successors(&self, x: usize) -> &[usize] {
        &self.succ[x]
    }

    pub fn predecessors(&self, x: usize) -> &[usize] {
        &self.pred[x]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// `x ⪯ y`.
    pub fn precedes_eq(&self, x: usize, y: usize) -> bool {
        self.down[y].contains(x)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.down[y].contains(x) || self.down[x].contains(y)
    }

    pub fn down_set(&self, x: usize) -> &NodeSet {
        &self.down[x]
    }

    pub fn up_set(&self, x: usize) -> &NodeSet {
        &self.up[x]
    }

    pub fn all_nodes(&self) -> NodeSet {
        let mut s = NodeSet::with_capacity(self.n());
        s.insert_range(..);
        s
    }

    /// Nodes with `rho ≤ t`. The result is closed under predecessors.
    pub fn active(&self, t: Time) -> NodeSet {
        let mut s = NodeSet::with_capacity(self.n());
        for (x, &r) in self.rho.iter().enumerate() {
            if r <= t {
                s.insert(x);
            }
        }
        s
    }

    pub fn pred_set(&self, a: &Antichain) -> NodeSet {
        let mut s = NodeSet::with_capacity(self.n());
        for &x in a.nodes() {
            s.union_with(&self.down[x]);
        }
        s
    }

    pub fn comp_set(&self, a: &Antichain) -> NodeSet {
        let mut s = NodeSet::with_capacity(self.n());
        for &x in a.nodes() {
            s.union_with(&self.down[x]);
            s.union_with(&self.up[x]);
        }
        s
    }

    /// Minimal elements of the subposet induced by `s`.
    pub fn minimals(&self, s: &NodeSet) -> NodeSet {
        let mut out = NodeSet::with_capacity(self.n());
        for x in s.ones() {
            if self.down[x].intersection_count(s) == 1 {
                out.insert(x);
            }
        }
        out
    }

    /// Maximal elements of the subposet induced by `s`.
    pub fn maximals(&self, s: &NodeSet) -> NodeSet {
        let mut out = NodeSet::with_capacity(self.n());
        for x in s.ones() {
            if self.up[x].intersection_count(s) == 1 {
                out.insert(x);
            }
        }
        out
    }

    /// The graph restricted to nodes with `rho ≤ t`, re-indexed densely.
    /// Ids are preserved, so results map back through [`Self::index_of`].
    pub fn restrict_to_time(&self, t: Time) -> PrecedenceGraph {
        let keep: Vec<usize> = (0..self.n()).filter(|&x| self.rho[x] <= t).collect();
        let mut new_index = vec![usize::MAX; self.n()];
        for (i, &x) in keep.iter().enumerate() {
            new_index[x] = i;
        }
        let edges: Vec<(usize, usize)> = keep
            .iter()
            .flat_map(|&x| {
                let new_index = &new_index;
                self.succ[x]
                    .iter()
                    .filter(move |&&y| new_index[y] != usize::MAX)
                    .map(move |&y| (new_index[x], new_index[y]))
            })
            .collect();
        let ids = keep.iter().map(|&x| self.ids[x].clone()).collect();
        // Releases are recovered from the closed rho values, which already
        // satisfy the closure, so rebuilding reproduces them unchanged.
        let releases: Vec<Time> = keep.iter().map(|&x| self.rho[x] - 1).collect();
        PrecedenceGraph::from_parts(ids, &releases, &edges)
            .expect("an induced subgraph of a DAG is acyclic")
    }

    /// `d^t(A) = |pred(A)| + |min(G^t − comp(A))|`.
    pub fn depth(&self, t: Time, a: &Antichain) -> Result<usize, PosetError> {
        for &x in a.nodes() {
            if self.rho[x] > t {
                return Err(PosetError::NotReleased { node: x, slot: t });
            }
        }
        for (i, &x) in a.nodes().iter().enumerate() {
            for &y in &a.nodes()[i + 1..] {
                if self.comparable(x, y) {
                    return Err(PosetError::NotAntichain(x, y));
                }
            }
        }
        Ok(self.depth_in(&self.active(t), a))
    }

    /// Depth relative to a predecessor-closed node set `active`.
    pub(crate) fn depth_in(&self, active: &NodeSet, a: &Antichain) -> usize {
        let pred = self.pred_set(a);
        let comp = self.comp_set(a);
        let mut rest = active.clone();
        rest.difference_with(&comp);
        // With `active` closed downwards, x ∉ comp(A) is minimal in the rest
        // exactly when all of its strict predecessors lie in pred(A).
        let minimal = rest
            .ones()
            .filter(|&x| self.down[x].difference_count(&pred) == 1)
            .count();
        pred.count_ones(..) + minimal
    }

    /// Maximal antichains of depth at most `k` (over the whole graph).
    pub fn enumerate_max_antichains(&self, k: usize) -> Vec<Antichain> {
        self.enumerate_max_antichains_in(&self.all_nodes(), k)
    }

    /// Maximal antichains of the subposet `active` (which must be closed
    /// downwards) with depth at most `k`.
    ///
    /// Recursion on the minimal elements `s_1 < … < s_l`: branch `i` keeps
    /// `s_1..s_{i-1}` in the antichain, drops their up-sets from the graph,
    /// removes `s_i` alone, and spends `i` units of depth. The branch that
    /// keeps every minimal element contributes exactly `{s_1..s_l}`.
    pub(crate) fn enumerate_max_antichains_in(&self, active: &NodeSet, k: usize) -> Vec<Antichain> {
        let mut out = Vec::new();
        let mut acc = Vec::new();
        self.max_antichain_rec(active, active.clone(), &mut acc, k, k, &mut out);
        out
    }

    fn max_antichain_rec(
        &self,
        active: &NodeSet,
        rem: NodeSet,
        acc: &mut Vec<usize>,
        budget: usize,
        k: usize,
        out: &mut Vec<Antichain>,
    ) {
        let mins: Vec<usize> = self.minimals(&rem).ones().collect();
        let l = mins.len();
        if l <= budget {
            let mut nodes = acc.clone();
            nodes.extend_from_slice(&mins);
            nodes.sort_unstable();
            let cand = Antichain::from_sorted(nodes);
            // A branch that removed s_i without keeping one of its successors
            // yields a non-maximal set; those are discarded here.
            let comp = self.comp_set(&cand);
            if active.is_subset(&comp) && self.pred_set(&cand).count_ones(..) <= k {
                out.push(cand);
            }
        }
        let mut removed = NodeSet::with_capacity(self.n());
        for i in 1..=l.min(budget) {
            let s_i = mins[i - 1];
            let mut next = rem.clone();
            next.difference_with(&removed);
            next.set(s_i, false);
            let before = acc.len();
            acc.extend_from_slice(&mins[..i - 1]);
            self.max_antichain_rec(active, next, acc, budget - i, k, out);
            acc.truncate(before);
            removed.union_with(&self.up[s_i]);
        }
    }

    /// Antichains of `G^t` with `d^t ≤ k`, sorted by size then lexicographically.
    pub fn enumerate_antichains(&self, t: Time, k: usize) -> Vec<Antichain> {
        self.enumerate_antichains_in(&self.active(t), k)
    }

    /// Every antichain of depth ≤ k lies inside a maximal antichain of the
    /// same depth, so subsets of the maximal ones cover all of them.
    pub(crate) fn enumerate_antichains_in(&self, active: &NodeSet, k: usize) -> Vec<Antichain> {
        let mut seen: HashSet<Antichain> = HashSet::new();
        for max in self.enumerate_max_antichains_in(active, k) {
            let nodes = max.nodes();
            debug_assert!(nodes.len() <= k);
            for mask in 0u64..(1u64 << nodes.len()) {
                let sub: Vec<usize> = nodes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &x)| x)
                    .collect();
                let sub = Antichain::from_sorted(sub);
                if seen.contains(&sub) {
                    continue;
                }
                if self.depth_in(active, &sub) <= k {
                    seen.insert(sub);
                }
            }
        }
        let mut out: Vec<Antichain> = seen.into_iter().collect();
        out.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

/// Builds the precedence order of an instance (nodes in job order).
pub fn build_poset(inst: &Instance) -> Result<PrecedenceGraph, PosetError> {
    let edges = inst.indexed_edges()?;
    let ids = inst.jobs.iter().map(|j| j.id.clone()).collect();
    let releases: Vec<Time> = inst.jobs.iter().map(|j| j.release).collect();
    PrecedenceGraph::from_parts(ids, &releases, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn graph(n: usize, edges: &[(usize, usize)]) -> PrecedenceGraph {
        let ids = (0..n).map(|i| format!("n{i}")).collect();
        PrecedenceGraph::from_parts(ids, &vec![0; n], edges).unwrap()
    }

    fn diamond() -> PrecedenceGraph {
        build_poset(&fixtures::diamond(1)).unwrap()
    }

    fn set(g: &PrecedenceGraph, ids: &[&str]) -> NodeSet {
        let mut s = NodeSet::with_capacity(g.n());
        for id in ids {
            s.insert(g.index_of(id).unwrap());
        }
        s
    }

    fn ac(g: &PrecedenceGraph, ids: &[&str]) -> Antichain {
        Antichain::new(g, ids.iter().map(|id| g.index_of(id).unwrap()).collect()).unwrap()
    }

    #[test]
    fn diamond_reachability() {
        let g = diamond();
        let (a, b, c, d) = (0, 1, 2, 3);
        assert!(g.precedes_eq(a, d));
        assert!(!g.precedes_eq(b, c) && !g.precedes_eq(c, b));
        assert!(g.precedes_eq(b, b));
    }

    #[test]
    fn rho_closure_on_chain() {
        let g = build_poset(&fixtures::chain(3, 1)).unwrap();
        assert_eq!(g.rhos(), &[1, 2, 3]);
    }

    #[test]
    fn cycle_rejected() {
        let ids = vec!["a".to_string(), "b".to_string()];
        assert!(matches!(
            PrecedenceGraph::from_parts(ids.clone(), &[0, 0], &[(0, 1), (1, 0)]),
            Err(PosetError::Cycle)
        ));
        assert!(matches!(
            PrecedenceGraph::from_parts(ids, &[0, 0], &[(0, 0)]),
            Err(PosetError::Cycle)
        ));
    }

    #[test]
    fn figure_tree_root_below_all() {
        let g = build_poset(&fixtures::ternary_tree(1, 2)).unwrap();
        assert_eq!(g.n(), 13);
        let r = g.index_of("r").unwrap();
        assert!((0..13).all(|x| g.precedes_eq(r, x)));
    }

    #[test]
    fn pred_and_comp_sets() {
        let g = diamond();
        let bc = ac(&g, &["b", "c"]);
        assert_eq!(g.pred_set(&bc), set(&g, &["a", "b", "c"]));
        assert_eq!(g.comp_set(&bc), set(&g, &["a", "b", "c", "d"]));
        let empty = Antichain::empty();
        assert_eq!(g.pred_set(&empty).count_ones(..), 0);
        assert_eq!(g.comp_set(&empty).count_ones(..), 0);
    }

    #[test]
    fn figure_pred_of_black_child() {
        let g = build_poset(&fixtures::ternary_tree(1, 2)).unwrap();
        let a = ac(&g, &["c1"]);
        assert_eq!(g.pred_set(&a).count_ones(..), 2);
    }

    #[test]
    fn min_and_max() {
        let g = diamond();
        let all = g.all_nodes();
        assert_eq!(g.minimals(&all), set(&g, &["a"]));
        assert_eq!(g.maximals(&all), set(&g, &["d"]));
        let mid = set(&g, &["b", "c"]);
        assert_eq!(g.minimals(&mid), mid);
    }

    #[test]
    fn maximals_of_pred_is_identity() {
        let g = diamond();
        for ids in [&["b", "c"][..], &["d"], &["a"], &["b"]] {
            let a = ac(&g, ids);
            assert_eq!(Antichain::from_set(&g.maximals(&g.pred_set(&a))), a);
        }
    }

    #[test]
    fn not_antichain_rejected() {
        let g = diamond();
        assert!(matches!(
            Antichain::new(&g, vec![0, 3]),
            Err(PosetError::NotAntichain(0, 3))
        ));
    }

    #[test]
    fn restriction() {
        let g = graph(3, &[]);
        for t in 1..4 {
            assert_eq!(g.restrict_to_time(t).n(), 3);
        }
        assert_eq!(g.restrict_to_time(0).n(), 0);

        let chain = build_poset(&fixtures::chain(3, 1)).unwrap();
        let g2 = chain.restrict_to_time(2);
        assert_eq!(g2.ids(), &["j1".to_string(), "j2".to_string()]);
        assert_eq!(g2.rhos(), &[1, 2]);
    }

    #[test]
    fn figure_depths() {
        let g = build_poset(&fixtures::ternary_tree(1, 2)).unwrap();
        let horizon = 10;
        assert_eq!(g.depth(horizon, &ac(&g, &["c1"])).unwrap(), 4);
        assert_eq!(g.depth(horizon, &Antichain::empty()).unwrap(), 1);
        assert_eq!(g.depth(horizon, &ac(&g, &["r"])).unwrap(), 1);
    }

    #[test]
    fn depth_of_independent_set() {
        let g = graph(5, &[]);
        assert_eq!(g.depth(1, &Antichain::empty()).unwrap(), 5);
    }

    #[test]
    fn depth_contract() {
        let g = build_poset(&fixtures::chain(3, 1)).unwrap();
        assert!(matches!(
            g.depth(1, &Antichain::from_sorted(vec![2])),
            Err(PosetError::NotReleased { .. })
        ));
        assert!(matches!(
            g.depth(5, &Antichain::from_sorted(vec![0, 1])),
            Err(PosetError::NotAntichain(0, 1))
        ));
    }

    #[test]
    fn max_antichains_chain() {
        let g = build_poset(&fixtures::chain(3, 1)).unwrap();
        let got = g.enumerate_max_antichains(3);
        let want: Vec<Antichain> = (0..3).map(|x| Antichain::from_sorted(vec![x])).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn max_antichains_figure_tree() {
        let g = build_poset(&fixtures::ternary_tree(1, 2)).unwrap();
        let got = g.enumerate_max_antichains(2);
        assert_eq!(got, vec![ac(&g, &["r"])]);
    }

    #[test]
    fn max_antichains_independent_pair() {
        assert!(graph(2, &[]).enumerate_max_antichains(1).is_empty());
        assert_eq!(graph(2, &[]).enumerate_max_antichains(2).len(), 1);
    }

    #[test]
    fn antichains_figure_tree() {
        let g = build_poset(&fixtures::ternary_tree(1, 2)).unwrap();
        let got = g.enumerate_antichains(100, 2);
        assert_eq!(got, vec![Antichain::empty(), ac(&g, &["r"])]);
    }

    #[test]
    fn antichains_chain_k2() {
        let g = build_poset(&fixtures::chain(3, 1)).unwrap();
        let got = g.enumerate_antichains(100, 2);
        let want = vec![
            Antichain::empty(),
            Antichain::from_sorted(vec![0]),
            Antichain::from_sorted(vec![1]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn antichains_k0() {
        assert!(diamond().enumerate_antichains(100, 0).is_empty());
        // the empty graph has exactly the empty antichain, of depth 0
        let g = graph(0, &[]);
        assert_eq!(g.enumerate_antichains(1, 0), vec![Antichain::empty()]);
    }

    #[test]
    fn antichains_respect_time() {
        // chain rho = 1,2,3; at t = 2 only j1, j2 exist
        let g = build_poset(&fixtures::chain(3, 1)).unwrap();
        let got = g.enumerate_antichains(2, 3);
        assert!(got.iter().all(|a| a.nodes().iter().all(|&x| x < 2)));
        assert_eq!(got.len(), 3);
    }
}
