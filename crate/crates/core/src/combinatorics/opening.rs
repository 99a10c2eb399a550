use std::collections::VecDeque;

use serde::Serialize;

use super::{check_size, enumerate_forest_selections, enumerate_matchings, ClusterTerm, Dsu};
use crate::error::{Error, Result};

/// Origin of an edge in the spanning tree `(P̊)♯ + F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TreeEdgeKind {
    /// A surviving `P` edge joining `parent_point` to `child_point`.
    Matching { parent_point: usize, child_point: usize },
    /// An edge of the forest selection.
    Forest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeEdge {
    pub parent: usize,
    pub child: usize,
    pub kind: TreeEdgeKind,
}

/// Result of deleting one `P` edge per cycle of `P∘ + P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpenedStructure {
    /// `P̊`: the surviving `P` edges, as point pairs.
    pub opened_matching: Vec<(usize, usize)>,
    /// The deleted `P` edge of each block, in block order.
    pub deleted: Vec<(usize, usize)>,
    /// Edges of `(P̊)♯ + F`, oriented away from base pair 0, in breadth-first order.
    pub tree: Vec<TreeEdge>,
    /// `q_A`: number of forest edges from `A` to its children.
    pub offspring: Vec<usize>,
}

impl OpenedStructure {
    /// Tree edges as sorted unoriented base-pair pairs.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.tree.iter().map(|t| (t.parent.min(t.child), t.parent.max(t.child))).collect();
        e.sort_unstable();
        e
    }
}

/// Open every cycle by deleting its `P` edge with the smallest lower endpoint,
/// then orient `(P̊)♯ + F` from base pair 0.
pub fn open_cycles(term: &ClusterTerm) -> Result<OpenedStructure> {
    let p = term.p();
    let partition = term.partition();
    let mut deleted: Vec<Option<(usize, usize)>> = vec![None; partition.len()];
    for (a, b) in term.matching().pairs() {
        let x = partition.block_of(a / 2);
        // pairs() runs in increasing lower endpoint, so the first edge wins
        if deleted[x].is_none() {
            deleted[x] = Some((a, b));
        }
    }
    let deleted: Vec<(usize, usize)> = deleted.into_iter().map(|d| d.expect("every block has a P edge")).collect();
    let opened_matching: Vec<(usize, usize)> = term.matching().pairs().filter(|e| !deleted.contains(e)).collect();

    let mut adjacency: Vec<Vec<(usize, TreeEdgeKind, usize)>> = vec![Vec::new(); p];
    for &(a, b) in &opened_matching {
        let (x, y) = (a / 2, b / 2);
        adjacency[x].push((y, TreeEdgeKind::Matching { parent_point: a, child_point: b }, a));
        adjacency[y].push((x, TreeEdgeKind::Matching { parent_point: b, child_point: a }, a));
    }
    for (l, &(x, y)) in term.forest().micro_edges().iter().enumerate() {
        adjacency[x].push((y, TreeEdgeKind::Forest, 2 * p + l));
        adjacency[y].push((x, TreeEdgeKind::Forest, 2 * p + l));
    }
    let edge_count = opened_matching.len() + term.forest().len();
    let mut seen = vec![false; p];
    let mut tree = Vec::with_capacity(edge_count);
    let mut offspring = vec![0; p];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for &(y, kind, _) in &adjacency[x] {
            if !seen[y] {
                seen[y] = true;
                if kind == TreeEdgeKind::Forest {
                    offspring[x] += 1;
                }
                tree.push(TreeEdge { parent: x, child: y, kind });
                queue.push_back(y);
            }
        }
    }
    if edge_count + 1 != p || tree.len() != edge_count {
        return Err(Error::Structure(
            "opened structure is not a spanning tree; the term is not connecting".into(),
        ));
    }
    Ok(OpenedStructure {
        opened_matching,
        deleted,
        tree,
        offspring,
    })
}

fn validate_tree(tree: &[(usize, usize)], p: usize) -> Result<Vec<(usize, usize)>> {
    let mut edges: Vec<(usize, usize)> = tree.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    edges.sort_unstable();
    let mut dsu = Dsu::new(p);
    if edges.len() + 1 != p || edges.iter().any(|&(a, b)| b >= p || a == b || !dsu.union(a, b)) {
        return Err(Error::Argument(format!("edges do not form a spanning tree on {p} vertices")));
    }
    Ok(edges)
}

/// Whether `tree` arises from `term` under some choice of cycle opening.
pub(crate) fn compatible(term: &ClusterTerm, tree: &[(usize, usize)]) -> bool {
    let forest = term.forest();
    if !forest.micro_edges().iter().all(|e| tree.binary_search(e).is_ok()) {
        return false;
    }
    let partition = term.partition();
    // surviving tree edges grouped per block
    let mut rest: Vec<Vec<(usize, usize)>> = vec![Vec::new(); partition.len()];
    for &(a, b) in tree {
        if forest.contains(a, b) {
            continue;
        }
        let x = partition.block_of(a);
        if partition.block_of(b) != x {
            return false;
        }
        rest[x].push((a, b));
    }
    let mut cycle: Vec<Vec<(usize, usize)>> = vec![Vec::new(); partition.len()];
    for (a, b) in term.matching().pairs() {
        let (x, y) = (a / 2, b / 2);
        cycle[partition.block_of(x)].push((x.min(y), x.max(y)));
    }
    rest.iter_mut().zip(cycle.iter_mut()).all(|(r, c)| {
        if r.len() + 1 != c.len() {
            return false;
        }
        r.sort_unstable();
        c.sort_unstable();
        // r must be c with one element removed
        let mut skipped = false;
        let mut i = 0;
        for e in c.iter() {
            if i < r.len() && r[i] == *e {
                i += 1;
            } else if !skipped {
                skipped = true;
            } else {
                return false;
            }
        }
        i == r.len()
    })
}

/// Number of connecting pairs `(P, F)` compatible with a spanning tree on the
/// `p` base pairs.
pub fn count_compatible_pairs(tree: &[(usize, usize)], p: usize, p_max: usize) -> Result<u64> {
    check_size(p, p_max)?;
    let tree = validate_tree(tree, p)?;
    let mut count = 0;
    for m in enumerate_matchings(p, p_max)? {
        for f in enumerate_forest_selections(&m, true)? {
            if f.len() > tree.len() {
                continue;
            }
            let term = ClusterTerm::new(m.clone(), f)?;
            if compatible(&term, &tree) {
                count += 1;
            }
        }
    }
    Ok(count)
}
