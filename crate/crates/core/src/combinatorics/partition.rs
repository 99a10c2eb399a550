use std::collections::BTreeMap;

use serde::Serialize;

use super::{Dsu, PerfectMatching};

/// Blocks of base pairs: the connected components of `P∘ + P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockPartition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl BlockPartition {
    /// Base pairs of each block, blocks ordered by their smallest base pair.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, base_pair: usize) -> usize {
        self.block_of[base_pair]
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Point supports of the blocks (the cycles of `P∘ + P`).
    pub fn supports(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect())
            .collect()
    }
}

/// Join of `P∘` and `P` in the partition lattice, expressed on base pairs.
pub fn partition_join(matching: &PerfectMatching) -> BlockPartition {
    let p = matching.p();
    let mut dsu = Dsu::new(p);
    for (a, b) in matching.pairs() {
        dsu.union(a / 2, b / 2);
    }
    let mut block_of = vec![usize::MAX; p];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_block = vec![usize::MAX; p];
    for (i, slot) in block_of.iter_mut().enumerate() {
        let r = dsu.find(i);
        if root_block[r] == usize::MAX {
            root_block[r] = blocks.len();
            blocks.push(Vec::new());
        }
        *slot = root_block[r];
        blocks[root_block[r]].push(i);
    }
    BlockPartition { block_of, blocks }
}

/// `P♯`: cross edges of `P` seen between base pairs, with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractedMultigraph {
    edges: BTreeMap<(usize, usize), u8>,
}

impl ContractedMultigraph {
    pub fn multiplicity(&self, a: usize, b: usize) -> u8 {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.get(&key).copied().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u8)> + '_ {
        self.edges.iter().map(|(&k, &m)| (k, m))
    }

    pub fn total(&self) -> usize {
        self.edges.values().map(|&m| m as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

pub fn contracted_multigraph(matching: &PerfectMatching) -> ContractedMultigraph {
    let mut edges = BTreeMap::new();
    for (a, b) in matching.pairs() {
        let (x, y) = (a / 2, b / 2);
        if x != y {
            *edges.entry((x.min(y), x.max(y))).or_insert(0) += 1;
        }
    }
    ContractedMultigraph { edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::enumerate_matchings;

    #[test]
    fn base_matching_gives_singletons() {
        let part = partition_join(&PerfectMatching::base(4));
        assert_eq!(part.len(), 4);
        assert!(part.blocks().iter().all(|b| b.len() == 1));
        assert!(contracted_multigraph(&PerfectMatching::base(4)).is_empty());
    }

    #[test]
    fn crossing_p2_matchings() {
        for pairs in [[(0, 2), (1, 3)], [(0, 3), (1, 2)]] {
            let m = PerfectMatching::from_pairs(2, &pairs).unwrap();
            let part = partition_join(&m);
            assert_eq!(part.blocks(), &[vec![0, 1]]);
            let g = contracted_multigraph(&m);
            assert_eq!(g.multiplicity(0, 1), 2);
            assert_eq!(g.total(), 2);
        }
    }

    #[test]
    fn supports_are_even_and_multiplicities_bounded() {
        for p in 1..=5 {
            for m in enumerate_matchings(p, 6).unwrap() {
                let part = partition_join(&m);
                let supports = part.supports();
                assert!(supports.iter().all(|s| s.len() % 2 == 0));
                assert_eq!(supports.iter().map(Vec::len).sum::<usize>(), 2 * p);
                let g = contracted_multigraph(&m);
                let cross = m.pairs().filter(|(a, b)| a / 2 != b / 2).count();
                assert_eq!(g.total(), cross);
                for ((a, b), mult) in g.edges() {
                    assert!(a != b && (1..=2).contains(&mult));
                    assert_eq!(part.block_of(a), part.block_of(b));
                }
            }
        }
    }
}
