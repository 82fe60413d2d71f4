use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::Matrix;
use crate::scalar::Scalar;

/// An irreducible diagonal block of a nonnegative matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SccBlock<S> {
    /// Row/column indices into the parent matrix, ascending.
    pub indices: Vec<usize>,
    pub matrix: Matrix<S>,
}

impl<S: Scalar> SccBlock<S> {
    /// A single index without a self-loop; its spectral radius is 0.
    pub fn is_trivial(&self) -> bool {
        self.indices.len() == 1 && self.matrix.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SccDecomposition<S> {
    /// Blocks in a topological order of the condensation: an arc from block
    /// `a` to block `b` implies `a < b`.
    pub blocks: Vec<SccBlock<S>>,
    /// Arcs `(a, b)` of the condensation, deduplicated and sorted.
    pub condensation: Vec<(usize, usize)>,
}

impl<S> SccDecomposition<S> {
    pub fn block_of(&self, index: usize) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.indices.binary_search(&index).is_ok())
    }
}

/// Strongly connected components of the digraph `i → j ⟺ M(i, j) > 0`.
pub fn scc_decomposition<S: Scalar>(m: &Matrix<S>) -> SccDecomposition<S> {
    let n = m.dim();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    let succ = m.successors();
    for (i, row) in succ.iter().enumerate() {
        for &j in row {
            graph.add_edge(nodes[i], nodes[j], ());
        }
    }
    // tarjan_scc yields components in reverse topological order
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    comps.reverse();
    let mut block_of = vec![0; n];
    for (b, c) in comps.iter().enumerate() {
        for &i in c {
            block_of[i] = b;
        }
    }
    let mut condensation: Vec<(usize, usize)> = succ
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().map(move |&j| (i, j)))
        .map(|(i, j)| (block_of[i], block_of[j]))
        .filter(|(a, b)| a != b)
        .collect();
    condensation.sort_unstable();
    condensation.dedup();
    debug_assert!(condensation.iter().all(|(a, b)| a < b));
    let blocks = comps
        .into_iter()
        .map(|indices| SccBlock {
            matrix: m.principal(&indices),
            indices,
        })
        .collect();
    SccDecomposition {
        blocks,
        condensation,
    }
}
