use serde::{Deserialize, Serialize};

use super::check_size;
use crate::error::{Error, Result};

/// A perfect matching on the points `0..2p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PerfectMatching {
    partner: Vec<usize>,
}

impl PerfectMatching {
    /// The base matching `{0,1}, {2,3}, …`.
    pub fn base(p: usize) -> Self {
        PerfectMatching {
            partner: (0..2 * p).map(|i| i ^ 1).collect(),
        }
    }

    pub fn from_pairs(p: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = 2 * p;
        let mut partner = vec![usize::MAX; n];
        if pairs.len() != p {
            return Err(Error::Argument(format!("need {p} pairs, got {}", pairs.len())));
        }
        for &(a, b) in pairs {
            if a >= n || b >= n || a == b || partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::Argument(format!("pairs do not form a perfect matching on 0..{n}")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        Ok(PerfectMatching { partner })
    }

    pub fn p(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn partner(&self, a: usize) -> usize {
        self.partner[a]
    }

    /// Pairs `(a, b)` with `a < b`, ordered by `a`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|(a, b)| a < b)
            .map(|(a, &b)| (a, b))
    }

    pub fn is_base(&self) -> bool {
        self.partner.iter().enumerate().all(|(a, &b)| b == a ^ 1)
    }
}

/// `(2p)! / (2^p p!)`
pub fn matching_count(p: usize) -> u64 {
    (1..=p as u64).map(|k| 2 * k - 1).product()
}

/// All perfect matchings on `0..2p`, each exactly once.
pub fn enumerate_matchings(p: usize, p_max: usize) -> Result<Vec<PerfectMatching>> {
    check_size(p, p_max)?;
    let n = 2 * p;
    let mut out = Vec::with_capacity(matching_count(p) as usize);
    let mut partner = vec![usize::MAX; n];
    fn recurse(partner: &mut Vec<usize>, out: &mut Vec<PerfectMatching>) {
        let Some(first) = partner.iter().position(|&x| x == usize::MAX) else {
            out.push(PerfectMatching {
                partner: partner.clone(),
            });
            return;
        };
        for other in first + 1..partner.len() {
            if partner[other] == usize::MAX {
                partner[first] = other;
                partner[other] = first;
                recurse(partner, out);
                partner[first] = usize::MAX;
                partner[other] = usize::MAX;
            }
        }
    }
    recurse(&mut partner, &mut out);
    Ok(out)
}
