use serde::Serialize;

use super::{check_size, partition_join, Dsu, PerfectMatching, P_HARD_CAP};
use crate::error::{Error, Result};

/// A set `F` of base-pair pairs together with its image `F̂` on the blocks.
///
/// `micro_edges[l]` is mapped to `induced[l]` by the hat map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ForestSelection {
    micro_edges: Vec<(usize, usize)>,
    induced: Vec<(usize, usize)>,
}

impl ForestSelection {
    pub fn empty() -> Self {
        ForestSelection {
            micro_edges: Vec::new(),
            induced: Vec::new(),
        }
    }

    /// Build from micro edges, checking the selection rules against the
    /// blocks of `matching`.
    pub fn new(matching: &PerfectMatching, edges: &[(usize, usize)]) -> Result<Self> {
        let p = matching.p();
        let partition = partition_join(matching);
        let mut dsu = Dsu::new(partition.len());
        let mut pairs: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        pairs.sort_unstable();
        let mut induced = Vec::with_capacity(pairs.len());
        for &(a, b) in &pairs {
            if b >= p || a == b {
                return Err(Error::Structure(format!("invalid base-pair edge ({a}, {b})")));
            }
            let (x, y) = (partition.block_of(a), partition.block_of(b));
            if x == y {
                return Err(Error::Structure(format!("edge ({a}, {b}) is internal to a block")));
            }
            if !dsu.union(x, y) {
                return Err(Error::Structure("induced block graph is not a forest".into()));
            }
            induced.push((x.min(y), x.max(y)));
        }
        Ok(ForestSelection {
            micro_edges: pairs,
            induced,
        })
    }

    pub fn micro_edges(&self) -> &[(usize, usize)] {
        &self.micro_edges
    }

    pub fn induced(&self) -> &[(usize, usize)] {
        &self.induced
    }

    pub fn len(&self) -> usize {
        self.micro_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.micro_edges.is_empty()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.micro_edges.binary_search(&key).is_ok()
    }
}

/// Values `v_l ∈ [0, 1]`, aligned with `ForestSelection::micro_edges`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationAssignment {
    v: Vec<f64>,
}

impl InterpolationAssignment {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::Argument("interpolation parameters must lie in [0, 1]".into()));
        }
        Ok(InterpolationAssignment { v })
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }
}

/// All valid forest selections for `matching`; with `connecting_only`, just
/// those for which `P♯ + F` connects every base pair.
pub fn enumerate_forest_selections(matching: &PerfectMatching, connecting_only: bool) -> Result<Vec<ForestSelection>> {
    check_size(matching.p(), P_HARD_CAP)?;
    let partition = partition_join(matching);
    let k = partition.len();
    let blocks = partition.blocks();
    let block_pairs: Vec<(usize, usize)> = (0..k).flat_map(|x| (x + 1..k).map(move |y| (x, y))).collect();

    struct Walk<'a> {
        blocks: &'a [Vec<usize>],
        block_pairs: &'a [(usize, usize)],
        target: Option<usize>,
        chosen: Vec<((usize, usize), (usize, usize))>,
        out: Vec<ForestSelection>,
    }

    impl Walk<'_> {
        fn go(&mut self, idx: usize, dsu: &Dsu) {
            let remaining = self.block_pairs.len() - idx;
            if let Some(t) = self.target {
                if self.chosen.len() + remaining < t {
                    return;
                }
            }
            if idx == self.block_pairs.len() {
                if self.target.is_none_or(|t| self.chosen.len() == t) {
                    let mut edges = self.chosen.clone();
                    edges.sort_unstable();
                    self.out.push(ForestSelection {
                        micro_edges: edges.iter().map(|e| e.0).collect(),
                        induced: edges.iter().map(|e| e.1).collect(),
                    });
                }
                return;
            }
            self.go(idx + 1, dsu);
            let (x, y) = self.block_pairs[idx];
            let mut joined = dsu.clone();
            if !joined.union(x, y) {
                return;
            }
            for ai in 0..self.blocks[x].len() {
                for bi in 0..self.blocks[y].len() {
                    let (a, b) = (self.blocks[x][ai], self.blocks[y][bi]);
                    self.chosen.push(((a.min(b), a.max(b)), (x, y)));
                    self.go(idx + 1, &joined);
                    self.chosen.pop();
                }
            }
        }
    }

    let mut walk = Walk {
        blocks,
        block_pairs: &block_pairs,
        target: connecting_only.then_some(k - 1),
        chosen: Vec::new(),
        out: Vec::new(),
    };
    walk.go(0, &Dsu::new(k));
    Ok(walk.out)
}
