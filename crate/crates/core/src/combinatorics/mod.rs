//! Combinatorial objects indexing the cluster terms.
//!
//! Points are `0..2p`; base pair `i` is `{2i, 2i + 1}` and the base matching
//! pairs consecutive points. A term is a perfect matching `P` together with a
//! forest selection `F` of base-pair pairs whose induced graph on the blocks of
//! `P∘ ∨ P` is a forest.

mod bkar;
mod forest;
mod matching;
mod opening;
mod partition;
mod term;
mod trees;

pub use bkar::{bkar_sides, overlaps, verify_bkar_identity};
pub use forest::{enumerate_forest_selections, ForestSelection, InterpolationAssignment};
pub use matching::{enumerate_matchings, matching_count, PerfectMatching};
pub use opening::{count_compatible_pairs, open_cycles, OpenedStructure, TreeEdge, TreeEdgeKind};
pub use partition::{contracted_multigraph, partition_join, BlockPartition, ContractedMultigraph};
pub use term::{ClusterTerm, Coupling};
pub use trees::{cayley_degree_count, degrees, labeled_trees, trees_by_edge_subsets, Tree};

use crate::error::{Error, Result};

/// Default bound on the number of base pairs for enumeration.
pub const DEFAULT_P_MAX: usize = 4;
/// Absolute bound; beyond it counts grow too fast to enumerate.
pub const P_HARD_CAP: usize = 6;

/// Check `1 ≤ p ≤ p_max ≤ P_HARD_CAP`.
pub fn check_size(p: usize, p_max: usize) -> Result<()> {
    let limit = p_max.min(P_HARD_CAP);
    if p == 0 {
        return Err(Error::Argument("p must be >= 1".into()));
    }
    if p > limit {
        return Err(Error::Resource { p, limit });
    }
    Ok(())
}

/// Every connecting term `(P, F)` of order `p`, in enumeration order.
pub fn connecting_terms(p: usize, p_max: usize) -> Result<Vec<ClusterTerm>> {
    let mut out = Vec::new();
    for m in enumerate_matchings(p, p_max)? {
        for f in enumerate_forest_selections(&m, true)? {
            out.push(ClusterTerm::new(m.clone(), f)?);
        }
    }
    Ok(out)
}

/// Small union-find over `0..n`.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
