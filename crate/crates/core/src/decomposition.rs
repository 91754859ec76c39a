//! Tree decompositions of the cell adjacency graph: min-fill heuristic,
//! exhaustive verification, and conversion to nice form.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

/// Adjacency sets indexed by vertex.
pub type Adjacency = [BTreeSet<usize>];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<usize>>,
    pub tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(1).saturating_sub(1)
    }
}

/// Why a candidate decomposition is invalid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotATree,
    MissingVertex(usize),
    MissingEdge(usize, usize),
    DisconnectedOccurrences(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotATree => write!(f, "decomposition tree is not a tree"),
            Violation::MissingVertex(v) => write!(f, "vertex {v} is in no bag"),
            Violation::MissingEdge(u, v) => write!(f, "edge {u}-{v} is in no bag"),
            Violation::DisconnectedOccurrences(v) => write!(f, "bags containing {v} are not connected"),
        }
    }
}

/// Min-fill elimination ordering (ties to the lower vertex id), then bags
/// that are subsets of a neighbor are contracted away.
pub fn decompose(adj: &Adjacency) -> TreeDecomposition {
    let n = adj.len();
    if n == 0 {
        return TreeDecomposition { bags: vec![BTreeSet::new()], tree_edges: Vec::new() };
    }
    let mut graph: Vec<BTreeSet<usize>> = adj.to_vec();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut position = vec![usize::MAX; n];
    let mut bags = vec![BTreeSet::new(); n];

    let fill = |graph: &[BTreeSet<usize>], v: usize| -> usize {
        let nb: Vec<usize> = graph[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !graph[a].contains(&b) {
                    missing += 1;
                }
            }
        }
        missing
    };

    for step in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fill(&graph, v), v))
            .expect("some vertex remains");
        let nb: Vec<usize> = graph[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                graph[a].insert(b);
                graph[b].insert(a);
            }
        }
        for &a in &nb {
            graph[a].remove(&v);
        }
        let mut bag: BTreeSet<usize> = nb.into_iter().collect();
        bag.insert(v);
        bags[v] = bag;
        alive[v] = false;
        position[v] = step;
        order.push(v);
    }

    // Parent of v's bag: the earliest-eliminated later neighbor.
    let mut tree: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut roots = Vec::new();
    for &v in &order {
        match bags[v].iter().filter(|&&u| u != v).min_by_key(|&&u| position[u]) {
            Some(&p) => {
                tree[v].insert(p);
                tree[p].insert(v);
            }
            None => roots.push(v),
        }
    }
    // Disconnected input: chain the component roots together.
    for w in roots.windows(2) {
        tree[w[0]].insert(w[1]);
        tree[w[1]].insert(w[0]);
    }

    // Contract any tree edge whose one bag is contained in the other.
    let mut present = vec![true; n];
    loop {
        let mut merged = false;
        for a in order.iter().copied() {
            if !present[a] {
                continue;
            }
            let target = tree[a].iter().copied().find(|&b| bags[a].is_subset(&bags[b]));
            if let Some(b) = target {
                let others: Vec<usize> = tree[a].iter().copied().filter(|&c| c != b).collect();
                for c in others {
                    tree[c].remove(&a);
                    tree[c].insert(b);
                    tree[b].insert(c);
                }
                tree[b].remove(&a);
                tree[a].clear();
                present[a] = false;
                merged = true;
            }
        }
        if !merged {
            break;
        }
    }

    // Renumber surviving bags by the least vertex they contain.
    let mut keep: Vec<usize> = (0..n).filter(|&v| present[v]).collect();
    keep.sort_by_key(|&v| (bags[v].iter().next().copied(), v));
    let mut new_id = vec![usize::MAX; n];
    for (i, &v) in keep.iter().enumerate() {
        new_id[v] = i;
    }
    let mut tree_edges = Vec::new();
    for &v in &keep {
        for &u in &tree[v] {
            if new_id[v] < new_id[u] {
                tree_edges.push((new_id[v], new_id[u]));
            }
        }
    }
    tree_edges.sort();
    TreeDecomposition { bags: keep.iter().map(|&v| bags[v].clone()).collect(), tree_edges }
}

fn is_tree(nodes: usize, edges: &[(usize, usize)]) -> bool {
    if nodes == 0 || edges.len() + 1 != nodes {
        return false;
    }
    let mut adj = vec![Vec::new(); nodes];
    for &(a, b) in edges {
        if a >= nodes || b >= nodes {
            return false;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; nodes];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                queue.push_back(y);
            }
        }
    }
    count == nodes
}

/// Checks the three decomposition properties (and that the tree is a tree).
pub fn verify(adj: &Adjacency, td: &TreeDecomposition) -> Result<(), Violation> {
    let nodes = td.bags.len();
    if !is_tree(nodes, &td.tree_edges) {
        return Err(Violation::NotATree);
    }
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); adj.len()];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v < adj.len() {
                occurs[v].push(i);
            }
        }
    }
    if let Some(v) = occurs.iter().position(Vec::is_empty) {
        return Err(Violation::MissingVertex(v));
    }
    for (u, nbrs) in adj.iter().enumerate() {
        for &v in nbrs.iter().filter(|&&v| v > u) {
            if !td.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(Violation::MissingEdge(u, v));
            }
        }
    }
    let mut tree = vec![Vec::new(); nodes];
    for &(a, b) in &td.tree_edges {
        tree[a].push(b);
        tree[b].push(a);
    }
    for (v, occ) in occurs.iter().enumerate() {
        let mut seen = BTreeSet::from([occ[0]]);
        let mut queue = VecDeque::from([occ[0]]);
        while let Some(x) = queue.pop_front() {
            for &y in &tree[x] {
                if td.bags[y].contains(&v) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        if seen.len() != occ.len() {
            return Err(Violation::DisconnectedOccurrences(v));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf(usize),
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted vertex list.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Rooted nice tree decomposition; nodes are stored children-first, so
/// iterating in index order is a valid bottom-up schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
}

impl NiceTreeDecomposition {
    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn count(&self, pred: impl Fn(&NiceKind) -> bool) -> usize {
        self.nodes.iter().filter(|n| pred(&n.kind)).count()
    }

    /// The same decomposition viewed as a plain tree decomposition.
    pub fn as_tree_decomposition(&self) -> TreeDecomposition {
        let mut tree_edges = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                tree_edges.push((c, i));
            }
        }
        TreeDecomposition {
            bags: self.nodes.iter().map(|n| n.bag.iter().copied().collect()).collect(),
            tree_edges,
        }
    }

    /// Checks the node-kind grammar at every node.
    pub fn check_grammar(&self) -> Result<(), String> {
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if n.bag.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("node {i}: bag not sorted"));
            }
            for &c in &n.children {
                if c >= i {
                    return Err(format!("node {i}: child {c} is not stored before its parent"));
                }
                parents[c] += 1;
            }
            let child_bag = |k: usize| &self.nodes[n.children[k]].bag;
            let ok = match n.kind {
                NiceKind::Leaf(v) => n.children.is_empty() && n.bag == [v],
                NiceKind::Introduce(v) => {
                    n.children.len() == 1 && !child_bag(0).contains(&v) && {
                        let mut expect = child_bag(0).clone();
                        expect.push(v);
                        expect.sort_unstable();
                        expect == n.bag
                    }
                }
                NiceKind::Forget(v) => {
                    n.children.len() == 1 && !n.bag.contains(&v) && {
                        let mut expect = n.bag.clone();
                        expect.push(v);
                        expect.sort_unstable();
                        &expect == child_bag(0)
                    }
                }
                NiceKind::Join => n.children.len() == 2 && child_bag(0) == &n.bag && child_bag(1) == &n.bag,
            };
            if !ok {
                return Err(format!("node {i}: {:?} violates the nice-node grammar", n.kind));
            }
        }
        for (i, &p) in parents.iter().enumerate() {
            let expected = usize::from(i != self.root);
            if p != expected {
                return Err(format!("node {i} has {p} parents"));
            }
        }
        Ok(())
    }
}

/// Converts a verified decomposition to nice form, rooted at node 0. Width
/// is preserved: chains forget before they introduce.
pub fn make_nice(td: &TreeDecomposition) -> NiceTreeDecomposition {
    let n = td.bags.len();
    let mut tree = vec![Vec::new(); n];
    for &(a, b) in &td.tree_edges {
        tree[a].push(b);
        tree[b].push(a);
    }
    for t in &mut tree {
        t.sort_unstable();
    }
    // Children lists and a post-order from root 0.
    let mut children = vec![Vec::new(); n];
    let mut preorder = Vec::with_capacity(n);
    let mut stack = vec![(0usize, usize::MAX)];
    while let Some((v, parent)) = stack.pop() {
        preorder.push(v);
        for &c in tree[v].iter().rev() {
            if c != parent {
                children[v].push(c);
                stack.push((c, v));
            }
        }
    }
    for c in &mut children {
        c.sort_unstable();
    }

    let bag_vec = |i: usize| td.bags[i].iter().copied().collect::<Vec<_>>();
    let mut nodes: Vec<NiceNode> = Vec::new();
    let push = |nodes: &mut Vec<NiceNode>, kind, bag: Vec<usize>, children: Vec<usize>| {
        nodes.push(NiceNode { kind, bag, children });
        nodes.len() - 1
    };

    let mut top_of: BTreeMap<usize, usize> = BTreeMap::new();
    for &t in preorder.iter().rev() {
        let target = bag_vec(t);
        let mut branches = Vec::new();
        for &c in &children[t] {
            let mut cur = top_of[&c];
            let mut bag = nodes[cur].bag.clone();
            for v in nodes[cur].bag.clone() {
                if !td.bags[t].contains(&v) {
                    bag.retain(|&x| x != v);
                    cur = push(&mut nodes, NiceKind::Forget(v), bag.clone(), vec![cur]);
                }
            }
            for &v in &target {
                if !bag.contains(&v) {
                    bag.push(v);
                    bag.sort_unstable();
                    cur = push(&mut nodes, NiceKind::Introduce(v), bag.clone(), vec![cur]);
                }
            }
            branches.push(cur);
        }
        let top = if branches.is_empty() {
            let first = target[0];
            let mut cur = push(&mut nodes, NiceKind::Leaf(first), vec![first], vec![]);
            let mut bag = vec![first];
            for &v in &target[1..] {
                bag.push(v);
                cur = push(&mut nodes, NiceKind::Introduce(v), bag.clone(), vec![cur]);
            }
            cur
        } else {
            let mut iter = branches.into_iter();
            let mut acc = iter.next().expect("nonempty");
            for b in iter {
                acc = push(&mut nodes, NiceKind::Join, target.clone(), vec![acc, b]);
            }
            acc
        };
        top_of.insert(t, top);
    }
    let root = top_of[&0];
    NiceTreeDecomposition { nodes, root }
}

#[derive(Serialize)]
struct NodeDump {
    id: usize,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cell: Option<usize>,
    bag: Vec<usize>,
    children: Vec<usize>,
}

#[derive(Serialize)]
struct NiceDump {
    width: usize,
    root: usize,
    nodes: Vec<NodeDump>,
}

/// JSON dump of a nice decomposition: width, root, and nodes with kind and bag.
pub fn to_json(ntd: &NiceTreeDecomposition) -> String {
    let nodes = ntd
        .nodes
        .iter()
        .enumerate()
        .map(|(id, n)| {
            let (kind, cell) = match n.kind {
                NiceKind::Leaf(v) => ("leaf", Some(v)),
                NiceKind::Introduce(v) => ("introduce", Some(v)),
                NiceKind::Forget(v) => ("forget", Some(v)),
                NiceKind::Join => ("join", None),
            };
            NodeDump { id, kind, cell, bag: n.bag.clone(), children: n.children.clone() }
        })
        .collect();
    serde_json::to_string_pretty(&NiceDump { width: ntd.width(), root: ntd.root, nodes }).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn graph(n: usize, edges: &[(usize, usize)]) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj
    }

    fn cycle(n: usize) -> Vec<BTreeSet<usize>> {
        graph(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    /// Brute-force check of the three properties, written independently of `verify`.
    fn brute_valid(adj: &Adjacency, td: &TreeDecomposition) -> bool {
        let covers_vertices = (0..adj.len()).all(|v| td.bags.iter().any(|b| b.contains(&v)));
        let covers_edges = adj
            .iter()
            .enumerate()
            .all(|(u, ns)| ns.iter().all(|&v| td.bags.iter().any(|b| b.contains(&u) && b.contains(&v))));
        // Connected occurrence sets: nodes containing v, minus edges between them, equals one.
        let connected = (0..adj.len()).all(|v| {
            let nodes = td.bags.iter().filter(|b| b.contains(&v)).count();
            let edges = td.tree_edges.iter().filter(|&&(a, b)| td.bags[a].contains(&v) && td.bags[b].contains(&v)).count();
            nodes == edges + 1
        });
        covers_vertices && covers_edges && connected && td.tree_edges.len() + 1 == td.bags.len()
    }

    #[test]
    fn k2_has_width_one() {
        let g = graph(2, &[(0, 1)]);
        let td = decompose(&g);
        assert_eq!(td.width(), 1);
        assert_eq!(verify(&g, &td), Ok(()));
    }

    #[test]
    fn single_vertex_has_width_zero() {
        let g = graph(1, &[]);
        let td = decompose(&g);
        assert_eq!(td.width(), 0);
        assert_eq!(verify(&g, &td), Ok(()));
    }

    #[test]
    fn six_cycle_has_width_two() {
        let g = cycle(6);
        let td = decompose(&g);
        assert_eq!(td.width(), 2);
        assert!(brute_valid(&g, &td));
        assert_eq!(verify(&g, &td), Ok(()));
        assert!(td.bags.iter().all(|b| b.len() <= 3));
    }

    #[test]
    fn six_cycle_nice_form_is_a_path() {
        let g = cycle(6);
        let ntd = make_nice(&decompose(&g));
        assert_eq!(ntd.count(|k| *k == NiceKind::Join), 0);
        assert_eq!(ntd.width(), 2);
        ntd.check_grammar().unwrap();
        assert_eq!(verify(&g, &ntd.as_tree_decomposition()), Ok(()));
    }

    #[test]
    fn k2_nice_form() {
        let td = TreeDecomposition { bags: vec![BTreeSet::from([0, 1])], tree_edges: vec![] };
        let ntd = make_nice(&td);
        assert_eq!(ntd.nodes.len(), 2);
        assert_eq!(ntd.nodes[0].kind, NiceKind::Leaf(0));
        assert_eq!(ntd.nodes[1].kind, NiceKind::Introduce(1));
        assert_eq!(ntd.root, 1);
        assert_eq!(ntd.nodes[1].bag, vec![0, 1]);
    }

    #[test]
    fn verify_reports_missing_edge() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let td = TreeDecomposition {
            bags: vec![BTreeSet::from([0, 1]), BTreeSet::from([1, 2])],
            tree_edges: vec![(0, 1)],
        };
        assert_eq!(verify(&g, &td), Err(Violation::MissingEdge(0, 2)));
    }

    #[test]
    fn verify_reports_disconnected_occurrences() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let td = TreeDecomposition {
            bags: vec![BTreeSet::from([0, 1]), BTreeSet::from([1, 2]), BTreeSet::from([0])],
            tree_edges: vec![(0, 1), (1, 2)],
        };
        assert_eq!(verify(&g, &td), Err(Violation::DisconnectedOccurrences(0)));
    }

    #[test]
    fn verify_reports_missing_vertex_and_bad_tree() {
        let g = graph(3, &[(0, 1)]);
        let td = TreeDecomposition { bags: vec![BTreeSet::from([0, 1])], tree_edges: vec![] };
        assert_eq!(verify(&g, &td), Err(Violation::MissingVertex(2)));
        let td = TreeDecomposition { bags: vec![BTreeSet::from([0, 1]), BTreeSet::from([2])], tree_edges: vec![] };
        assert_eq!(verify(&g, &td), Err(Violation::NotATree));
    }

    #[test]
    fn star_needs_joins() {
        // Three triangles sharing vertex 0 but otherwise separate.
        let g = graph(7, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0), (0, 5), (5, 6), (6, 0)]);
        let td = decompose(&g);
        assert_eq!(td.width(), 2);
        let ntd = make_nice(&td);
        ntd.check_grammar().unwrap();
        assert_eq!(ntd.width(), td.width());
        assert_eq!(verify(&g, &ntd.as_tree_decomposition()), Ok(()));
    }

    #[test]
    fn grid_graph_roundtrip() {
        let (r, c) = (4, 5);
        let mut edges = Vec::new();
        for i in 0..r {
            for j in 0..c {
                let v = i * c + j;
                if j + 1 < c {
                    edges.push((v, v + 1));
                }
                if i + 1 < r {
                    edges.push((v, v + c));
                }
            }
        }
        let g = graph(r * c, &edges);
        let td = decompose(&g);
        assert!(brute_valid(&g, &td));
        assert!(td.width() >= 4 && td.width() <= 6, "width {}", td.width());
        let ntd = make_nice(&td);
        ntd.check_grammar().unwrap();
        assert_eq!(ntd.width(), td.width());
        assert_eq!(verify(&g, &ntd.as_tree_decomposition()), Ok(()));
    }

    proptest::proptest! {
        #[test]
        fn random_graphs_decompose_validly(n in 1usize..12, raw in proptest::collection::vec((0usize..12, 0usize..12), 0..30)) {
            let edges: Vec<(usize, usize)> = raw.into_iter().filter(|&(a, b)| a < n && b < n && a != b).collect();
            let g = graph(n, &edges);
            let td = decompose(&g);
            proptest::prop_assert!(brute_valid(&g, &td));
            let ntd = make_nice(&td);
            proptest::prop_assert!(ntd.check_grammar().is_ok());
            proptest::prop_assert_eq!(ntd.width(), td.width());
            proptest::prop_assert_eq!(verify(&g, &ntd.as_tree_decomposition()), Ok(()));
        }
    }
}
