#![allow(dead_code)]

use leadcons_core::{LeaderTopology, Matrix, WeightedDigraph};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random digraph on `1..=max_n` nodes, arc density drawn per graph.
pub fn random_digraph(rng: &mut impl Rng, max_n: usize) -> WeightedDigraph {
    let n = rng.gen_range(1..=max_n);
    let p: f64 = rng.gen_range(0.1..0.6);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                arcs.push((i, j, rng.gen_range(0.5..2.0)));
            }
        }
    }
    WeightedDigraph::new(n, arcs).unwrap()
}

/// Random leader weights, each agent hearing the leader with probability `p`.
pub fn random_topology(rng: &mut impl Rng, max_n: usize, p: f64) -> LeaderTopology {
    let g = random_digraph(rng, max_n);
    let b = (0..g.n())
        .map(|_| {
            if rng.gen_bool(p) {
                rng.gen_range(0.5..2.0)
            } else {
                0.0
            }
        })
        .collect();
    LeaderTopology::new(g, b).unwrap()
}

/// Balanced digraph built as a union of weighted directed cycles on random
/// node subsets.
pub fn random_balanced(rng: &mut impl Rng, max_n: usize) -> WeightedDigraph {
    let n = rng.gen_range(2..=max_n);
    let mut w = vec![vec![0.0; n]; n];
    for _ in 0..rng.gen_range(0..=3) {
        let mut nodes: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        if nodes.len() < 2 {
            continue;
        }
        // shuffle
        for i in (1..nodes.len()).rev() {
            nodes.swap(i, rng.gen_range(0..=i));
        }
        let c: f64 = rng.gen_range(0.5..2.0);
        for k in 0..nodes.len() {
            w[nodes[k]][nodes[(k + 1) % nodes.len()]] += c;
        }
    }
    let arcs = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| w[i][j] > 0.0)
        .map(|(i, j)| (i, j, w[i][j]))
        .collect::<Vec<_>>();
    WeightedDigraph::new(n, arcs).unwrap()
}

/// `reach[i][j]`: `j` reachable from `i` (reflexive), by Floyd-Warshall
/// closure over the arc set.
pub fn reachability(g: &WeightedDigraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for a in g.arcs() {
        r[a.from][a.to] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}
