use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Edge `(i, j | D)` of a vine tree. Indices are zero-based variable
/// positions with `i < j`; `d` is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub d: Vec<usize>,
}

impl Edge {
    /// Normalizes the orientation and the conditioning set.
    pub fn new(a: usize, b: usize, mut d: Vec<usize>) -> Self {
        d.sort_unstable();
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        Self { i, j, d }
    }

    /// Tree level the edge lives on (1-based).
    pub fn level(&self) -> usize {
        self.d.len() + 1
    }

    /// Conditioned plus conditioning variables, sorted.
    pub fn union(&self) -> Vec<usize> {
        let mut u = self.d.clone();
        u.push(self.i);
        u.push(self.j);
        u.sort_unstable();
        u
    }

    /// Unions of the two edges this one joins in the previous tree
    /// (for tree 1: the two single variables).
    pub(crate) fn parent_unions(&self) -> [Vec<usize>; 2] {
        let u = self.union();
        let without = |v: usize| u.iter().copied().filter(|&x| x != v).collect::<Vec<_>>();
        [without(self.j), without(self.i)]
    }

    /// One-based label such as `1,3|2`.
    pub fn label(&self) -> String {
        let mut s = format!("{},{}", self.i + 1, self.j + 1);
        if !self.d.is_empty() {
            s.push('|');
            let d: Vec<String> = self.d.iter().map(|v| (v + 1).to_string()).collect();
            s.push_str(&d.join(","));
        }
        s
    }

    fn sort_key(&self) -> (usize, usize, &[usize]) {
        (self.i, self.j, &self.d)
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.level(), self.sort_key()).cmp(&(other.level(), other.sort_key()))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A candidate edge between nodes `a` and `b` of the current tree level.
/// At tree 1 the nodes are variables; deeper, they index the previous tree.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateEdge {
    pub a: usize,
    pub b: usize,
    pub edge: Edge,
    pub weight: f64,
}

/// Maximum spanning tree on `|weight|` (Kruskal). Ties are broken towards
/// the edge with the smaller `(min(i,j), max(i,j), D)` label, which makes
/// the result fully deterministic.
pub fn max_spanning_tree(n_nodes: usize, candidates: &[CandidateEdge]) -> Result<Vec<CandidateEdge>> {
    let mut order: Vec<&CandidateEdge> = candidates.iter().collect();
    order.sort_by(|x, y| {
        y.weight
            .abs()
            .total_cmp(&x.weight.abs())
            .then_with(|| x.edge.sort_key().cmp(&y.edge.sort_key()))
    });
    let mut parent: Vec<usize> = (0..n_nodes).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut tree = Vec::with_capacity(n_nodes.saturating_sub(1));
    for c in order {
        if c.a >= n_nodes || c.b >= n_nodes {
            return Err(Error::Structure(format!("candidate {} references a missing node", c.edge)));
        }
        let (ra, rb) = (find(&mut parent, c.a), find(&mut parent, c.b));
        if ra != rb {
            parent[ra] = rb;
            tree.push(c.clone());
            if tree.len() + 1 == n_nodes {
                break;
            }
        }
    }
    if tree.len() + 1 != n_nodes && n_nodes > 0 {
        return Err(Error::DisconnectedGraph);
    }
    Ok(tree)
}

/// All pairs of tree-1 nodes (variables).
pub fn complete_graph(d: usize) -> Vec<CandidateEdge> {
    let mut out = Vec::with_capacity(d * d.saturating_sub(1) / 2);
    for a in 0..d {
        for b in a + 1..d {
            out.push(CandidateEdge { a, b, edge: Edge::new(a, b, Vec::new()), weight: 0.0 });
        }
    }
    out
}

/// Edges of the next tree permitted by the proximity condition: two edges
/// of `previous_tree` may be joined only if they share a node of their own
/// tree. The joining edge is labelled with the symmetric difference of the
/// two unions as conditioned pair and their intersection as conditioning set.
/// Weights are left at zero.
pub fn allowed_edges(previous_tree: &[Edge]) -> Vec<CandidateEdge> {
    let unions: Vec<Vec<usize>> = previous_tree.iter().map(Edge::union).collect();
    let parents: Vec<[Vec<usize>; 2]> = previous_tree.iter().map(Edge::parent_unions).collect();
    let mut out = Vec::new();
    for a in 0..previous_tree.len() {
        for b in a + 1..previous_tree.len() {
            let share = parents[a].iter().any(|p| parents[b].contains(p));
            if !share {
                continue;
            }
            let (ua, ub) = (&unions[a], &unions[b]);
            let d: Vec<usize> = ua.iter().copied().filter(|v| ub.contains(v)).collect();
            let only_a: Vec<usize> = ua.iter().copied().filter(|v| !ub.contains(v)).collect();
            let only_b: Vec<usize> = ub.iter().copied().filter(|v| !ua.contains(v)).collect();
            if only_a.len() != 1 || only_b.len() != 1 {
                continue;
            }
            out.push(CandidateEdge { a, b, edge: Edge::new(only_a[0], only_b[0], d), weight: 0.0 });
        }
    }
    out
}

/// Structural class of a regular vine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VineClass {
    CVine,
    DVine,
    General,
}

impl fmt::Display for VineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VineClass::CVine => "C-vine",
            VineClass::DVine => "D-vine",
            VineClass::General => "R-vine",
        })
    }
}

/// A validated regular vine: `d - 1` nested trees with `d - 1, d - 2, ..., 1`
/// edges. Edges within a tree are kept in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct VineStructure {
    labels: Vec<String>,
    trees: Vec<Vec<Edge>>,
}

impl VineStructure {
    pub fn new(labels: Vec<String>, mut trees: Vec<Vec<Edge>>) -> Result<Self> {
        for t in trees.iter_mut() {
            t.sort();
        }
        validate(labels.len(), &trees)?;
        Ok(Self { labels, trees })
    }

    /// D-vine following the path `order` (a permutation of `0..d`).
    pub fn d_vine(labels: Vec<String>, order: &[usize]) -> Result<Self> {
        let d = order.len();
        let trees = (1..d)
            .map(|level| {
                (0..d - level)
                    .map(|k| Edge::new(order[k], order[k + level], order[k + 1..k + level].to_vec()))
                    .collect()
            })
            .collect();
        Self::new(labels, trees)
    }

    /// C-vine whose tree-`l` root is `order[l - 1]`.
    pub fn c_vine(labels: Vec<String>, order: &[usize]) -> Result<Self> {
        let d = order.len();
        let trees = (1..d)
            .map(|level| {
                (level..d)
                    .map(|k| Edge::new(order[level - 1], order[k], order[..level - 1].to_vec()))
                    .collect()
            })
            .collect();
        Self::new(labels, trees)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Trees in level order; `trees()[0]` is tree 1.
    pub fn trees(&self) -> &[Vec<Edge>] {
        &self.trees
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.trees.iter().flatten()
    }
}

/// Node degrees of one tree. Tree-1 nodes are variables; deeper nodes are
/// the edges of the previous tree, looked up by their unions.
fn degrees(trees: &[Vec<Edge>], level: usize, d: usize) -> Result<Vec<usize>> {
    let tree = &trees[level - 1];
    if level == 1 {
        let mut deg = vec![0; d];
        for e in tree {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        return Ok(deg);
    }
    let index: HashMap<Vec<usize>, usize> =
        trees[level - 2].iter().enumerate().map(|(k, e)| (e.union(), k)).collect();
    let mut deg = vec![0; trees[level - 2].len()];
    for e in tree {
        for p in e.parent_unions() {
            let k = *index
                .get(&p)
                .ok_or_else(|| Error::Structure(format!("edge {e} has no parent in tree {}", level - 1)))?;
            deg[k] += 1;
        }
    }
    Ok(deg)
}

fn validate(d: usize, trees: &[Vec<Edge>]) -> Result<()> {
    if d < 2 {
        return Err(Error::Structure("a vine needs at least two variables".into()));
    }
    if trees.len() != d - 1 {
        return Err(Error::Structure(format!("expected {} trees, found {}", d - 1, trees.len())));
    }
    for (t, tree) in trees.iter().enumerate() {
        let level = t + 1;
        if tree.len() != d - level {
            return Err(Error::Structure(format!(
                "tree {level} has {} edges, expected {}",
                tree.len(),
                d - level
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for e in tree {
            let u = e.union();
            let distinct = u.windows(2).all(|w| w[0] < w[1]);
            if e.i >= e.j || !distinct || u.last().is_some_and(|&v| v >= d) || e.level() != level {
                return Err(Error::Structure(format!("edge {e} is not a valid tree-{level} label")));
            }
            if !seen.insert(u) {
                return Err(Error::Structure(format!("duplicate edge {e} in tree {level}")));
            }
        }
        // each tree must be a spanning tree over the previous tree's edges
        let n_nodes = if level == 1 { d } else { d - level + 1 };
        let mut parent: Vec<usize> = (0..n_nodes).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let index: HashMap<Vec<usize>, usize> = if level == 1 {
            (0..d).map(|v| (vec![v], v)).collect()
        } else {
            trees[level - 2].iter().enumerate().map(|(k, e)| (e.union(), k)).collect()
        };
        for e in tree {
            let [pa, pb] = e.parent_unions();
            let (Some(&a), Some(&b)) = (index.get(&pa), index.get(&pb)) else {
                return Err(Error::Structure(format!("edge {e} has no parent in tree {}", level - 1)));
            };
            if level >= 2 {
                let prev = &trees[level - 2];
                let (ea, eb) = (&prev[a], &prev[b]);
                if !ea.parent_unions().iter().any(|p| eb.parent_unions().contains(p)) {
                    return Err(Error::Structure(format!("edge {e} violates the proximity condition")));
                }
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(Error::Structure(format!("tree {level} contains a cycle at {e}")));
            }
            parent[ra] = rb;
        }
    }
    Ok(())
}

/// C-vine if every tree has a node adjacent to all of its edges, D-vine if
/// every tree is a path, otherwise general. For `d <= 3` both hold and the
/// C-vine label is reported.
pub fn classify_structure(structure: &VineStructure) -> VineClass {
    let d = structure.dim();
    let trees = structure.trees();
    let mut is_c = true;
    let mut is_d = true;
    for level in 1..d {
        let Ok(deg) = degrees(trees, level, d) else {
            return VineClass::General;
        };
        let edges = trees[level - 1].len();
        if !deg.iter().any(|&k| k == edges) {
            is_c = false;
        }
        if deg.iter().any(|&k| k > 2) {
            is_d = false;
        }
    }
    if is_c {
        VineClass::CVine
    } else if is_d {
        VineClass::DVine
    } else {
        VineClass::General
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(d: usize) -> Vec<String> {
        (1..=d).map(|k| format!("x{k}")).collect()
    }

    fn weighted(pairs: &[(usize, usize, f64)]) -> Vec<CandidateEdge> {
        pairs
            .iter()
            .map(|&(a, b, w)| CandidateEdge { a, b, edge: Edge::new(a, b, vec![]), weight: w })
            .collect()
    }

    #[test]
    fn labels_are_one_based() {
        assert_eq!(Edge::new(2, 0, vec![1]).label(), "1,3|2");
        assert_eq!(Edge::new(0, 1, vec![]).label(), "1,2");
    }

    #[test]
    fn spanning_tree_prefers_heavy_edges() {
        let c = weighted(&[(0, 1, 0.25), (0, 2, 0.03), (0, 3, -0.25), (1, 2, 0.49), (1, 3, 0.61), (2, 3, 0.33)]);
        let t = max_spanning_tree(4, &c).unwrap();
        let mut got: Vec<(usize, usize)> = t.iter().map(|e| (e.a, e.b)).collect();
        got.sort();
        assert_eq!(got, vec![(0, 1), (1, 2), (1, 3)]);
    }

    #[test]
    fn spanning_tree_ties_and_degenerate_cases() {
        let tri = weighted(&[(1, 2, 0.5), (0, 2, 0.5), (0, 1, 0.5)]);
        let t = max_spanning_tree(3, &tri).unwrap();
        let got: Vec<(usize, usize)> = t.iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(got, vec![(0, 1), (0, 2)]);
        assert_eq!(max_spanning_tree(2, &weighted(&[(0, 1, 0.1)])).unwrap().len(), 1);
        assert_eq!(
            max_spanning_tree(4, &weighted(&[(0, 1, 0.1), (2, 3, 0.2)])),
            Err(Error::DisconnectedGraph)
        );
    }

    #[test]
    fn proximity_candidates() {
        let path = vec![Edge::new(0, 1, vec![]), Edge::new(1, 2, vec![])];
        let c = allowed_edges(&path);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].edge.label(), "1,3|2");

        let star = vec![Edge::new(0, 1, vec![]), Edge::new(1, 2, vec![]), Edge::new(1, 3, vec![])];
        let got: Vec<String> = allowed_edges(&star).iter().map(|c| c.edge.label()).collect();
        assert_eq!(got, vec!["1,3|2", "1,4|2", "3,4|2"]);

        let apart = vec![Edge::new(0, 1, vec![]), Edge::new(2, 3, vec![])];
        assert!(allowed_edges(&apart).is_empty());
    }

    #[test]
    fn deeper_proximity_uses_common_node() {
        // tree 2 of the D-vine 1-2-3-4: (1,3|2) and (2,4|3) share node {2,3}
        let t2 = vec![Edge::new(0, 2, vec![1]), Edge::new(1, 3, vec![2])];
        let c = allowed_edges(&t2);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].edge.label(), "1,4|2,3");
    }

    #[test]
    fn constructors_and_classes() {
        let d = VineStructure::d_vine(labels(4), &[0, 1, 2, 3]).unwrap();
        assert_eq!(d.trees()[2][0].label(), "1,4|2,3");
        assert_eq!(classify_structure(&d), VineClass::DVine);
        let c = VineStructure::c_vine(labels(4), &[1, 0, 2, 3]).unwrap();
        assert_eq!(classify_structure(&c), VineClass::CVine);
        let labels1: Vec<String> = c.trees()[0].iter().map(Edge::label).collect();
        assert_eq!(labels1, vec!["1,2", "2,3", "2,4"]);
        let small = VineStructure::d_vine(labels(3), &[0, 1, 2]).unwrap();
        assert_eq!(classify_structure(&small), VineClass::CVine);
    }

    #[test]
    fn invalid_structures_rejected() {
        // second tree joins edges that share no node
        let trees = vec![
            vec![Edge::new(0, 1, vec![]), Edge::new(1, 2, vec![]), Edge::new(2, 3, vec![])],
            vec![Edge::new(0, 2, vec![1]), Edge::new(1, 3, vec![2])],
            vec![Edge::new(0, 3, vec![1, 2])],
        ];
        assert!(VineStructure::new(labels(4), trees.clone()).is_ok());
        let mut bad = trees.clone();
        bad[1][1] = Edge::new(0, 3, vec![2]);
        assert!(VineStructure::new(labels(4), bad).is_err());
        let mut missing = trees;
        missing.pop();
        assert!(VineStructure::new(labels(4), missing).is_err());
    }
}
