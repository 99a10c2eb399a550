use super::Dsu;

/// Edge list of a labeled tree, each edge `(a, b)` with `a < b`, sorted.
pub type Tree = Vec<(usize, usize)>;

/// Every labeled tree on `0..p`, from Prüfer sequences.
pub fn labeled_trees(p: usize) -> Vec<Tree> {
    match p {
        0 => return Vec::new(),
        1 => return vec![Vec::new()],
        2 => return vec![vec![(0, 1)]],
        _ => {}
    }
    let len = p - 2;
    let total = p.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    let mut seq = vec![0; len];
    for mut code in 0..total {
        for s in seq.iter_mut() {
            *s = code % p;
            code /= p;
        }
        out.push(decode_pruefer(&seq, p));
    }
    out
}

fn decode_pruefer(seq: &[usize], p: usize) -> Tree {
    let mut degree = vec![1usize; p];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(p - 1);
    for &s in seq {
        let leaf = (0..p).find(|&i| degree[i] == 1).expect("a leaf exists");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..p).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges.sort_unstable();
    edges
}

/// Every labeled tree on `0..p`, found by testing all `(p − 1)`-edge subsets
/// of the complete graph.
pub fn trees_by_edge_subsets(p: usize) -> Vec<Tree> {
    if p == 0 {
        return Vec::new();
    }
    let all: Vec<(usize, usize)> = (0..p).flat_map(|a| (a + 1..p).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(p - 1);
    fn rec(all: &[(usize, usize)], start: usize, need: usize, p: usize, chosen: &mut Vec<(usize, usize)>, out: &mut Vec<Tree>) {
        if need == 0 {
            let mut dsu = Dsu::new(p);
            if chosen.iter().all(|&(a, b)| dsu.union(a, b)) {
                out.push(chosen.clone());
            }
            return;
        }
        for i in start..=all.len() - need {
            chosen.push(all[i]);
            rec(all, i + 1, need - 1, p, chosen, out);
            chosen.pop();
        }
    }
    if p == 1 {
        return vec![Vec::new()];
    }
    rec(&all, 0, p - 1, p, &mut chosen, &mut out);
    out
}

/// Vertex degrees of a tree on `0..p`.
pub fn degrees(tree: &[(usize, usize)], p: usize) -> Vec<usize> {
    let mut d = vec![0; p];
    for &(a, b) in tree {
        d[a] += 1;
        d[b] += 1;
    }
    d
}

/// Number of labeled trees with the given degree sequence:
/// `(p − 2)! / Π (d_i − 1)!`, or 0 if no tree has these degrees.
pub fn cayley_degree_count(degrees: &[usize]) -> u64 {
    let p = degrees.len();
    if p == 0 {
        return 0;
    }
    if p == 1 {
        return u64::from(degrees[0] == 0);
    }
    if degrees.contains(&0) || degrees.iter().sum::<usize>() != 2 * (p - 1) {
        return 0;
    }
    let factorial = |n: usize| (1..=n as u64).product::<u64>();
    degrees.iter().fold(factorial(p - 2), |acc, &d| acc / factorial(d - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, HashSet};

    #[test]
    fn cayley_totals() {
        for p in 1..=6 {
            let trees = labeled_trees(p);
            let expected = if p == 1 { 1 } else { p.pow(p as u32 - 2) };
            assert_eq!(trees.len(), expected);
            let a: HashSet<_> = trees.into_iter().collect();
            let b: HashSet<_> = trees_by_edge_subsets(p).into_iter().collect();
            assert_eq!(a.len(), expected);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn degree_formula_matches_enumeration() {
        for p in 1..=6 {
            let mut tally: HashMap<Vec<usize>, u64> = HashMap::new();
            for t in trees_by_edge_subsets(p) {
                *tally.entry(degrees(&t, p)).or_default() += 1;
            }
            for (d, count) in tally {
                assert_eq!(cayley_degree_count(&d), count, "degrees {d:?}");
            }
        }
        assert_eq!(cayley_degree_count(&[1, 1, 1]), 0);
        assert_eq!(cayley_degree_count(&[0, 2, 2]), 0);
    }
}
