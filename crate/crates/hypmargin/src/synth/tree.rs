use std::collections::HashMap;

use crate::error::{Error, Result};

/// A weighted rooted tree with its path metric.
///
/// Nodes are numbered in order of first appearance in the edge list. All
/// pairwise distances are computed up front.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeMetric {
    names: Vec<String>,
    parent: Vec<Option<usize>>,
    /// Weight of the edge to the parent (zero at the root).
    weight: Vec<f64>,
    children: Vec<Vec<usize>>,
    root: usize,
    dist: Vec<f64>,
}

impl TreeMetric {
    /// A tree with one node and no edges.
    pub fn single(name: &str) -> Self {
        Self {
            names: vec![name.to_string()],
            parent: vec![None],
            weight: vec![0.0],
            children: vec![vec![]],
            root: 0,
            dist: vec![0.0],
        }
    }

    /// Builds a tree from `(parent, child, weight)` edges.
    pub fn from_edges<S: AsRef<str>>(edges: &[(S, S, f64)]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidArgument("tree needs at least one edge".into()));
        }
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut names = Vec::new();
        let mut id = |name: &str, names: &mut Vec<String>| -> usize {
            *index.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                names.len() - 1
            })
        };
        let mut raw = Vec::with_capacity(edges.len());
        for (p, c, w) in edges {
            let (p, c) = (p.as_ref(), c.as_ref());
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "edge {p} -> {c} has weight {w}; weights must be positive"
                )));
            }
            if p == c {
                return Err(Error::InvalidArgument(format!("self loop at {p}")));
            }
            raw.push((id(p, &mut names), id(c, &mut names), *w));
        }
        let n = names.len();
        let mut parent = vec![None; n];
        let mut weight = vec![0.0; n];
        let mut children = vec![Vec::new(); n];
        for (p, c, w) in raw {
            if parent[c].is_some() {
                return Err(Error::InvalidArgument(format!("node {} has two parents", names[c])));
            }
            parent[c] = Some(p);
            weight[c] = w;
            children[p].push(c);
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidArgument(format!("tree must have exactly one root, found {}", roots.len())));
        }
        let root = roots[0];
        // Every node must be reachable from the root (rules out cycles).
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            seen[u] = true;
            stack.extend(children[u].iter().copied());
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument("edge list contains a cycle or is disconnected".into()));
        }
        let mut tree = Self { names, parent, weight, children, root, dist: vec![] };
        tree.dist = tree.all_pairs();
        Ok(tree)
    }

    fn all_pairs(&self) -> Vec<f64> {
        let n = self.len();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for c in 0..n {
            if let Some(p) = self.parent[c] {
                adj[p].push((c, self.weight[c]));
                adj[c].push((p, self.weight[c]));
            }
        }
        let mut dist = vec![0.0; n * n];
        for s in 0..n {
            let mut seen = vec![false; n];
            let mut stack = vec![(s, 0.0)];
            while let Some((u, du)) = stack.pop() {
                seen[u] = true;
                dist[s * n + u] = du;
                for &(v, w) in &adj[u] {
                    if !seen[v] {
                        stack.push((v, du + w));
                    }
                }
            }
        }
        dist
    }

    /// Complete `branching`-ary tree of the given depth with unit edges.
    pub fn balanced(branching: usize, depth: usize) -> Self {
        if depth == 0 || branching == 0 {
            return Self::single("0");
        }
        let mut edges = Vec::new();
        let mut frontier = vec![0usize];
        let mut next_id = 1;
        for _ in 0..depth {
            let mut next = Vec::new();
            for &p in &frontier {
                for _ in 0..branching {
                    edges.push((p.to_string(), next_id.to_string(), 1.0));
                    next.push(next_id);
                    next_id += 1;
                }
            }
            frontier = next;
        }
        Self::from_edges(&edges).expect("balanced tree is valid")
    }

    /// Path on `n >= 2` nodes with unit edges.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n.max(2)).map(|i| ((i - 1).to_string(), i.to_string(), 1.0)).collect();
        Self::from_edges(&edges).expect("path is valid")
    }

    /// Star with `k >= 1` leaves and unit edges.
    pub fn star(k: usize) -> Self {
        let edges: Vec<_> = (1..=k.max(1)).map(|i| ("c".to_string(), format!("l{i}"), 1.0)).collect();
        Self::from_edges(&edges).expect("star is valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    /// Weight of the edge from `i` to its parent.
    pub fn edge_weight(&self, i: usize) -> f64 {
        self.weight[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n).map(|i| self.dist[i * n..(i + 1) * n].to_vec()).collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.children[i].is_empty() && i != self.root).collect()
    }

    /// For each leaf, `true` when it descends from the root's first child.
    pub fn first_subtree_membership(&self) -> Vec<(usize, bool)> {
        let first = self.children[self.root].first().copied();
        self.leaves()
            .into_iter()
            .map(|leaf| {
                let mut u = leaf;
                while let Some(p) = self.parent[u] {
                    if p == self.root {
                        break;
                    }
                    u = p;
                }
                (leaf, Some(u) == first)
            })
            .collect()
    }

    /// Edge list in node order, as written by [`write_tree`].
    pub fn edges(&self) -> Vec<(&str, &str, f64)> {
        (0..self.len())
            .filter_map(|c| self.parent[c].map(|p| (self.names[p].as_str(), self.names[c].as_str(), self.weight[c])))
            .collect()
    }
}

/// Parses `parent child [weight]` lines. Blank lines and `#` comments are
/// ignored; a missing weight means 1.
pub fn parse_tree(text: &str) -> Result<TreeMetric> {
    let mut edges = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let weight = match parts.len() {
            2 => 1.0,
            3 => parts[2]
                .parse::<f64>()
                .map_err(|e| Error::Parse { line: no + 1, msg: format!("bad weight {:?}: {e}", parts[2]) })?,
            k => return Err(Error::Parse { line: no + 1, msg: format!("expected 2 or 3 fields, found {k}") }),
        };
        edges.push((parts[0].to_string(), parts[1].to_string(), weight));
    }
    TreeMetric::from_edges(&edges)
}

pub fn write_tree(tree: &TreeMetric) -> String {
    tree.edges().into_iter().map(|(p, c, w)| format!("{p} {c} {w:?}\n")).collect()
}

/// Two-class tree: the root's first child carries a star of `star_leaves`
/// leaves; the second child carries `arms` paths of `arm_length` nodes, each
/// ending in a star of `tip_leaves` leaves.
///
/// In the plane the arms surround the star, so no line separates the two
/// leaf sets of a distance-preserving Euclidean layout, while the two
/// subtrees sit on opposite sides of a geodesic in a hyperbolic layout.
pub fn two_subtree_tree(star_leaves: usize, arms: usize, arm_length: usize, tip_leaves: usize) -> TreeMetric {
    let mut edges: Vec<(String, String, f64)> = vec![("r".into(), "a".into(), 1.0), ("r".into(), "b".into(), 1.0)];
    for i in 0..star_leaves {
        edges.push(("a".into(), format!("a{i}"), 1.0));
    }
    for arm in 0..arms {
        let mut prev = "b".to_string();
        for step in 0..arm_length {
            let node = format!("b{arm}_{step}");
            edges.push((prev.clone(), node.clone(), 1.0));
            prev = node;
        }
        for leaf in 0..tip_leaves {
            edges.push((prev.clone(), format!("b{arm}_leaf{leaf}"), 1.0));
        }
    }
    TreeMetric::from_edges(&edges).expect("fixture tree is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_distances() {
        let t = parse_tree("# comment\nr a 2\nr b\n\na c 0.5\n").unwrap();
        assert_eq!(t.len(), 4);
        let (a, b, c) = (t.index_of("a").unwrap(), t.index_of("b").unwrap(), t.index_of("c").unwrap());
        assert_eq!(t.distance(b, c), 3.5);
        assert_eq!(t.distance(c, b), 3.5);
        assert_eq!(t.distance(a, a), 0.0);
        assert_eq!(t.leaves().len(), 2);
        assert_eq!(parse_tree(&write_tree(&t)).unwrap(), t);
    }

    #[test]
    fn rejects_bad_trees() {
        assert!(parse_tree("a b\nb a\n").is_err());
        assert!(parse_tree("a b\nc b\n").is_err());
        assert!(parse_tree("a b\nc d\n").is_err());
        assert!(parse_tree("a b -1\n").is_err());
        assert!(matches!(parse_tree("a b 1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_tree("a b x\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn triangle_inequality_on_fixture() {
        let t = two_subtree_tree(4, 3, 2, 2);
        let n = t.len();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(t.distance(i, j), t.distance(j, i));
                for k in 0..n {
                    assert!(t.distance(i, j) <= t.distance(i, k) + t.distance(k, j) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn fixture_shape() {
        let t = two_subtree_tree(24, 6, 5, 6);
        assert_eq!(t.leaves().len(), 60);
        let members = t.first_subtree_membership();
        assert_eq!(members.iter().filter(|(_, m)| *m).count(), 24);
        assert_eq!(TreeMetric::balanced(2, 4).len(), 31);
    }
}
