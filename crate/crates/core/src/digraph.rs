//! Weighted interconnection digraphs and reachability.
//!
//! An arc `(i, j)` with weight `a_ij > 0` means agent `i` uses the state of
//! agent `j`; paths follow arcs in that direction, so `j` is reachable from
//! `i`. The leader is not a graph node: [`LeaderTopology`] carries the
//! weights `b_i` of the implicit arcs `i -> leader`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Matrix, Result};

/// Tolerance for the balanced-degree comparison.
pub const BALANCE_TOL: f64 = 1e-12;

/// A weighted arc `from -> to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    /// Listening agent `i`.
    pub from: usize,
    /// Agent `j` whose state `i` uses.
    pub to: usize,
    /// Strictly positive weight `a_ij`.
    pub weight: f64,
}

/// Immutable weighted digraph on nodes `0..n` without self-loops or
/// parallel arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    // sorted by (from, to)
    arcs: Vec<Arc>,
}

impl WeightedDigraph {
    /// Builds a digraph, rejecting out-of-range nodes, self-loops, duplicate
    /// ordered pairs and weights that are not finite and strictly positive.
    pub fn new<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut list = Vec::new();
        for (from, to, weight) in arcs {
            for node in [from, to] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if from == to {
                return Err(Error::SelfLoop(from));
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidWeight(weight));
            }
            list.push(Arc { from, to, weight });
        }
        list.sort_by_key(|a| (a.from, a.to));
        if let Some(w) = list
            .windows(2)
            .find(|w| w[0].from == w[1].from && w[0].to == w[1].to)
        {
            return Err(Error::DuplicateArc(w[0].from, w[0].to));
        }
        Ok(WeightedDigraph { n, arcs: list })
    }

    /// Graph on `n` nodes with no arcs.
    pub fn empty(n: usize) -> Self {
        WeightedDigraph {
            n,
            arcs: Vec::new(),
        }
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Arcs sorted by `(from, to)`.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Outgoing arcs of `i` (the arcs `i` listens on).
    pub fn out_arcs(&self, i: usize) -> &[Arc] {
        let lo = self.arcs.partition_point(|a| a.from < i);
        let hi = self.arcs.partition_point(|a| a.from <= i);
        &self.arcs[lo..hi]
    }

    /// Weight `a_ij`, zero if there is no arc.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.out_arcs(i)
            .iter()
            .find(|a| a.to == j)
            .map_or(0.0, |a| a.weight)
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node, n: self.n })
        }
    }

    /// Weighted adjacency matrix `A = [a_ij]`.
    pub fn adjacency_matrix(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for arc in &self.arcs {
            a[(arc.from, arc.to)] = arc.weight;
        }
        a
    }

    /// Weighted out-degree `d_i = sum_j a_ij`.
    pub fn out_degree(&self, i: usize) -> f64 {
        self.out_arcs(i).iter().map(|a| a.weight).sum()
    }

    /// Weighted in-degree `sum_j a_ji`.
    pub fn in_degree(&self, i: usize) -> f64 {
        self.arcs
            .iter()
            .filter(|a| a.to == i)
            .map(|a| a.weight)
            .sum()
    }

    /// Laplacian `L = D - A`; every row sums to zero.
    pub fn laplacian(&self) -> Matrix {
        let mut l = Matrix::zeros(self.n, self.n);
        for arc in &self.arcs {
            l[(arc.from, arc.to)] -= arc.weight;
            l[(arc.from, arc.from)] += arc.weight;
        }
        l
    }

    /// Neighbor set `N_i = { j : (i, j) is an arc }`, ascending.
    pub fn neighbors(&self, i: usize) -> Result<Vec<usize>> {
        self.check_node(i)?;
        Ok(self.out_arcs(i).iter().map(|a| a.to).collect())
    }

    /// Neighbor set of a cluster: the union of `N_i` over `i` in the
    /// cluster, ascending. Members of the cluster reached by arcs are kept;
    /// subtract the cluster for its external neighbors.
    pub fn cluster_neighbors(&self, cluster: &[usize]) -> Result<Vec<usize>> {
        let mut hit = vec![false; self.n];
        for &i in cluster {
            self.check_node(i)?;
            for a in self.out_arcs(i) {
                hit[a.to] = true;
            }
        }
        Ok(hit
            .iter()
            .enumerate()
            .filter(|(_, &h)| h)
            .map(|(j, _)| j)
            .collect())
    }

    /// Strong components, each sorted ascending, ordered by smallest member.
    ///
    /// Iterative Tarjan: one depth-first pass with a low-link stack.
    pub fn strong_components(&self) -> Vec<Vec<usize>> {
        const UNVISITED: usize = usize::MAX;
        let n = self.n;
        let mut index = vec![UNVISITED; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut next = 0usize;
        // (node, position in its out-arc list)
        let mut frames: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNVISITED {
                continue;
            }
            frames.push((root, 0));
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
                let out = self.out_arcs(v);
                if *pos < out.len() {
                    let w = out[*pos].to;
                    *pos += 1;
                    if index[w] == UNVISITED {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// True iff there is exactly one strong component. The empty graph is
    /// not strongly connected; a single node is.
    pub fn is_strongly_connected(&self) -> bool {
        self.strong_components().len() == 1
    }

    /// True iff weighted in-degree equals weighted out-degree at every node,
    /// i.e. the Laplacian's columns also sum to zero.
    pub fn is_balanced(&self) -> bool {
        let mut net = vec![0.0; self.n];
        let mut scale = vec![0.0f64; self.n];
        for a in &self.arcs {
            net[a.from] += a.weight;
            net[a.to] -= a.weight;
            scale[a.from] += a.weight;
            scale[a.to] += a.weight;
        }
        net.iter()
            .zip(&scale)
            .all(|(d, s)| d.abs() <= BALANCE_TOL * s.max(1.0))
    }

    /// Nodes from which `target` is reachable (including `target`).
    fn reaches(&self, target: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[target] = true;
        let mut queue = VecDeque::from([target]);
        while let Some(v) = queue.pop_front() {
            for a in self.arcs.iter().filter(|a| a.to == v) {
                if !seen[a.from] {
                    seen[a.from] = true;
                    queue.push_back(a.from);
                }
            }
        }
        seen
    }

    /// Some node is reachable from every other node, decided by a reverse
    /// traversal from each candidate.
    pub fn has_globally_reachable_node_by_traversal(&self) -> bool {
        (0..self.n).any(|v| self.reaches(v).iter().all(|&r| r))
    }

    /// Some node is reachable from every other node, decided on the
    /// condensation: exactly one strong component has no neighbor outside
    /// itself.
    pub fn has_globally_reachable_node(&self) -> bool {
        let comps = self.strong_components();
        let mut owner = vec![0usize; self.n];
        for (c, comp) in comps.iter().enumerate() {
            for &v in comp {
                owner[v] = c;
            }
        }
        let mut has_exit = vec![false; comps.len()];
        for a in &self.arcs {
            if owner[a.from] != owner[a.to] {
                has_exit[owner[a.from]] = true;
            }
        }
        has_exit.iter().filter(|&&e| !e).count() == 1
    }
}

/// Follower digraph together with the leader weights `b_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderTopology {
    graph: WeightedDigraph,
    leader_weights: Vec<f64>,
}

impl LeaderTopology {
    /// Pairs a graph with one nonnegative, finite leader weight per node.
    pub fn new(graph: WeightedDigraph, leader_weights: Vec<f64>) -> Result<Self> {
        if leader_weights.len() != graph.n() {
            return Err(Error::DimensionMismatch {
                expected: graph.n(),
                found: leader_weights.len(),
            });
        }
        if let Some(&w) = leader_weights
            .iter()
            .find(|w| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::InvalidWeight(w));
        }
        Ok(LeaderTopology {
            graph,
            leader_weights,
        })
    }

    /// The follower graph.
    pub fn graph(&self) -> &WeightedDigraph {
        &self.graph
    }

    /// Leader weights `b_i`.
    pub fn leader_weights(&self) -> &[f64] {
        &self.leader_weights
    }

    /// Number of followers.
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Leader adjacency matrix `B = diag(b_i)`.
    pub fn leader_matrix(&self) -> Matrix {
        Matrix::from_diagonal(&self.leader_weights)
    }

    /// True iff every follower has a directed path ending at the leader.
    pub fn leader_globally_reachable(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| self.leader_weights[i] > 0.0).collect();
        for &i in &queue {
            seen[i] = true;
        }
        while let Some(v) = queue.pop_front() {
            for a in self.graph.arcs().iter().filter(|a| a.to == v) {
                if !seen[a.from] {
                    seen[a.from] = true;
                    queue.push_back(a.from);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// The two four-agent topologies used throughout the examples: unit
/// weights, leader heard by agents 0 and 2.
pub mod example {
    use super::*;

    /// `G1`: arcs 0<->1, 3->1, 3->2. Not balanced, not strongly connected.
    pub fn g1() -> WeightedDigraph {
        WeightedDigraph::new(4, [(0, 1, 1.0), (1, 0, 1.0), (3, 1, 1.0), (3, 2, 1.0)]).unwrap()
    }

    /// `G2`: arcs 0<->1, 2<->3. Balanced, two strong components.
    pub fn g2() -> WeightedDigraph {
        WeightedDigraph::new(4, [(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)]).unwrap()
    }

    /// Leader weights shared by both topologies.
    pub fn leader_weights() -> Vec<f64> {
        vec![1.0, 0.0, 1.0, 0.0]
    }

    /// `G1` with the leader.
    pub fn topology1() -> LeaderTopology {
        LeaderTopology::new(g1(), leader_weights()).unwrap()
    }

    /// `G2` with the leader.
    pub fn topology2() -> LeaderTopology {
        LeaderTopology::new(g2(), leader_weights()).unwrap()
    }
}
