use std::collections::VecDeque;

use serde::Serialize;

use super::{partition_join, BlockPartition, ForestSelection, InterpolationAssignment, PerfectMatching};
use crate::error::{Error, Result};

/// How a base-pair pair outside `F` is coupled by the interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coupling {
    /// Same block: `r = 1`.
    SameBlock,
    /// Blocks in different components of `F̂`: `r = 0`.
    Disconnected,
    /// Bitmask of the `F` edges on the `F̂` path; `r` is their minimum `v`.
    Path(u32),
}

/// One cluster term `(P, F)` with the data needed to evaluate its integrand.
#[derive(Debug, Clone)]
pub struct ClusterTerm {
    matching: PerfectMatching,
    partition: BlockPartition,
    forest: ForestSelection,
    couplings: Vec<(usize, usize, Coupling)>,
    orderings: Vec<Vec<u8>>,
}

impl ClusterTerm {
    pub fn new(matching: PerfectMatching, forest: ForestSelection) -> Result<Self> {
        let forest = ForestSelection::new(&matching, forest.micro_edges())?;
        let partition = partition_join(&matching);
        let p = matching.p();
        let k = partition.len();

        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
        for (l, &(x, y)) in forest.induced().iter().enumerate() {
            adjacency[x].push((y, l));
            adjacency[y].push((x, l));
        }
        // path mask from every block to every other block
        let mut masks = vec![vec![None; k]; k];
        for (source, row) in masks.iter_mut().enumerate() {
            row[source] = Some(0u32);
            let mut queue = VecDeque::from([source]);
            while let Some(x) = queue.pop_front() {
                let here = row[x].expect("visited");
                for &(y, l) in &adjacency[x] {
                    if row[y].is_none() {
                        row[y] = Some(here | 1 << l);
                        queue.push_back(y);
                    }
                }
            }
        }

        let mut couplings = Vec::new();
        for a in 0..p {
            for b in a + 1..p {
                if forest.contains(a, b) {
                    continue;
                }
                let (x, y) = (partition.block_of(a), partition.block_of(b));
                let c = if x == y {
                    Coupling::SameBlock
                } else {
                    match masks[x][y] {
                        Some(mask) => Coupling::Path(mask),
                        None => Coupling::Disconnected,
                    }
                };
                couplings.push((a, b, c));
            }
        }

        let orderings = permutations(forest.len());
        Ok(ClusterTerm {
            matching,
            partition,
            forest,
            couplings,
            orderings,
        })
    }

    pub fn p(&self) -> usize {
        self.matching.p()
    }

    pub fn matching(&self) -> &PerfectMatching {
        &self.matching
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn forest(&self) -> &ForestSelection {
        &self.forest
    }

    /// `(−1)^{|F|}`
    pub fn sign(&self) -> f64 {
        if self.forest.len().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `P♯ + F` joins all base pairs.
    pub fn is_connecting(&self) -> bool {
        self.forest.len() + 1 == self.partition.len()
    }

    /// Base-pair pairs outside `F` with their coupling type.
    pub fn couplings(&self) -> &[(usize, usize, Coupling)] {
        &self.couplings
    }

    pub fn coupling(&self, a: usize, b: usize) -> Result<Coupling> {
        let key = (a.min(b), a.max(b));
        if self.forest.contains(key.0, key.1) {
            return Err(Error::Argument(format!("pair {key:?} belongs to the forest selection")));
        }
        self.couplings
            .iter()
            .find(|c| (c.0, c.1) == key)
            .map(|c| c.2)
            .ok_or_else(|| Error::Argument(format!("pair {key:?} is not a pair of distinct base pairs")))
    }

    /// `r(F, v)_{A,B}`
    pub fn interpolated_coupling(&self, a: usize, b: usize, v: &InterpolationAssignment) -> Result<f64> {
        if v.values().len() != self.forest.len() {
            return Err(Error::Argument("assignment does not match the forest selection".into()));
        }
        Ok(match self.coupling(a, b)? {
            Coupling::SameBlock => 1.0,
            Coupling::Disconnected => 0.0,
            Coupling::Path(mask) => path_min(mask, v.values()),
        })
    }

    /// `Π_{F} 1{overlap}`
    pub fn forest_overlaps(&self, overlap: impl Fn(usize, usize) -> bool) -> bool {
        self.forest.micro_edges().iter().all(|&(a, b)| overlap(a, b))
    }

    /// `Π_{pairs ∉ F} (1 − r(F, v) 1{overlap})` at fixed `v`.
    pub fn hardcore_factor(&self, v: &[f64], overlap: impl Fn(usize, usize) -> bool) -> f64 {
        let mut product = 1.0;
        for &(a, b, c) in &self.couplings {
            let r = match c {
                Coupling::SameBlock => 1.0,
                Coupling::Disconnected => continue,
                Coupling::Path(mask) => path_min(mask, v),
            };
            if overlap(a, b) {
                product *= 1.0 - r;
            }
        }
        product
    }

    /// `∫_{[0,1]^F} dv Π_{pairs ∉ F} (1 − r(F, v) 1{overlap})`, exactly.
    ///
    /// On the region where the `v` values have a fixed order, each factor is
    /// `1 − x_j` for the smallest-ranked edge on its path, and the ordered
    /// integral of `Π (1 − x_j)^{m_j}` is `Π_j 1 / Σ_{i ≥ j} (m_i + 1)`.
    pub fn v_integrated_hardcore(&self, overlap: impl Fn(usize, usize) -> bool) -> f64 {
        let mut masks: [u32; 32] = [0; 32];
        let mut n = 0;
        let mut extra: Vec<u32> = Vec::new();
        for &(a, b, c) in &self.couplings {
            match c {
                Coupling::Disconnected => {}
                Coupling::SameBlock => {
                    if overlap(a, b) {
                        return 0.0;
                    }
                }
                Coupling::Path(mask) => {
                    if overlap(a, b) {
                        if n < masks.len() {
                            masks[n] = mask;
                            n += 1;
                        } else {
                            extra.push(mask);
                        }
                    }
                }
            }
        }
        if n == 0 {
            return 1.0;
        }
        let k = self.forest.len();
        let mut total = 0.0;
        let mut counts = [0u32; 32];
        for rank in &self.orderings {
            counts[..k].fill(0);
            for &mask in masks[..n].iter().chain(&extra) {
                let mut lowest = u8::MAX;
                let mut bits = mask;
                while bits != 0 {
                    let l = bits.trailing_zeros() as usize;
                    lowest = lowest.min(rank[l]);
                    bits &= bits - 1;
                }
                counts[lowest as usize] += 1;
            }
            let mut value = 1.0;
            let mut suffix = 0.0;
            for j in (0..k).rev() {
                suffix += counts[j] as f64 + 1.0;
                value /= suffix;
            }
            total += value;
        }
        total
    }
}

fn path_min(mask: u32, v: &[f64]) -> f64 {
    let mut r = f64::INFINITY;
    let mut bits = mask;
    while bits != 0 {
        r = r.min(v[bits.trailing_zeros() as usize]);
        bits &= bits - 1;
    }
    r
}

/// Rank arrays (`rank[l]` = position of edge `l` in increasing `v` order) for
/// every ordering of `k` edges.
fn permutations(k: usize) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, used: &mut Vec<bool>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i as u8);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}
