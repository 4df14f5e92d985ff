//! Multigraph utilities backing the graphic and cographic oracles.
//!
//! Edges are identified by their index in the edge list; all derived
//! structures (minors, incidence columns, cuts) speak in those ids.

use crate::error::Error;
use crate::set::ItemSet;
use std::collections::VecDeque;

/// Plain union-find with path halving.
#[derive(Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if the two were in different classes.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Undirected multigraph on vertices `0..vertices`; self-loops and parallel
/// edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, Error> {
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= vertices || v >= vertices {
                return Err(Error::input(format!(
                    "edge {i} = ({u}, {v}) references a vertex outside 0..{vertices}"
                )));
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &self.edges {
            if u == v {
                return false;
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return false;
            }
        }
        true
    }

    /// Number of connected components after removing the edges in `removed`
    /// (vertices all stay).
    pub fn components_excluding(&self, removed: &ItemSet) -> usize {
        let mut ds = DisjointSet::new(self.vertices);
        let mut comps = self.vertices;
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if !removed.contains(id) && ds.union(u, v) {
                comps -= 1;
            }
        }
        comps
    }

    pub fn components(&self) -> usize {
        self.components_excluding(&ItemSet::new())
    }

    pub fn is_connected(&self) -> bool {
        self.components() == 1
    }

    /// Rank of an edge subset in the graphic matroid: the size of a spanning
    /// forest of the subgraph it induces.
    pub fn forest_rank(&self, sel: &ItemSet) -> usize {
        let mut ds = DisjointSet::new(self.vertices);
        let mut rank = 0;
        for id in sel.iter() {
            let (u, v) = self.edges[id];
            if ds.union(u, v) {
                rank += 1;
            }
        }
        rank
    }

    /// Edge ids whose removal disconnects their component of G − `removed`.
    /// Parallel edges shield each other; self-loops are never bridges.
    pub fn bridges_excluding(&self, removed: &ItemSet) -> ItemSet {
        struct Dfs<'a> {
            g: &'a Graph,
            adj: Vec<Vec<(usize, usize)>>, // vertex -> (neighbor, edge id)
            disc: Vec<usize>,
            low: Vec<usize>,
            timer: usize,
            out: ItemSet,
        }
        impl Dfs<'_> {
            fn run(&mut self, root: usize) {
                // Iterative DFS to keep recursion depth independent of graph size.
                let mut stack = vec![(root, usize::MAX, 0usize)];
                self.disc[root] = self.timer;
                self.low[root] = self.timer;
                self.timer += 1;
                while let Some(&mut (v, entry_edge, ref mut next)) = stack.last_mut() {
                    if *next < self.adj[v].len() {
                        let (to, id) = self.adj[v][*next];
                        *next += 1;
                        if id == entry_edge || to == v {
                            continue;
                        }
                        if self.disc[to] == usize::MAX {
                            self.disc[to] = self.timer;
                            self.low[to] = self.timer;
                            self.timer += 1;
                            stack.push((to, id, 0));
                        } else {
                            self.low[v] = self.low[v].min(self.disc[to]);
                        }
                    } else {
                        stack.pop();
                        if let Some(&mut (parent, _, _)) = stack.last_mut() {
                            self.low[parent] = self.low[parent].min(self.low[v]);
                            if self.low[v] > self.disc[parent] {
                                self.out.insert(entry_edge);
                            }
                        }
                    }
                }
            }
        }
        let mut adj = vec![Vec::new(); self.vertices];
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if removed.contains(id) {
                continue;
            }
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        let mut dfs = Dfs {
            g: self,
            adj,
            disc: vec![usize::MAX; self.vertices],
            low: vec![usize::MAX; self.vertices],
            timer: 0,
            out: ItemSet::new(),
        };
        for v in 0..dfs.g.vertices {
            if dfs.disc[v] == usize::MAX {
                dfs.run(v);
            }
        }
        dfs.out
    }

    pub fn bridges(&self) -> ItemSet {
        self.bridges_excluding(&ItemSet::new())
    }

    /// Deletes the edges in `gone`; remaining edges are renumbered to
    /// `0..m'` in ascending original id. Returns the graph plus the map
    /// from new edge id to old edge id.
    pub fn delete_edges(&self, gone: &ItemSet) -> (Graph, Vec<usize>) {
        let mut edges = Vec::new();
        let mut back = Vec::new();
        for (id, &e) in self.edges.iter().enumerate() {
            if !gone.contains(id) {
                edges.push(e);
                back.push(id);
            }
        }
        (Graph { vertices: self.vertices, edges }, back)
    }

    /// Contracts the edges in `gone` (merging their endpoint classes) and
    /// drops them; surviving edges keep ascending-original-id order. Edges
    /// whose endpoints become identified turn into self-loops.
    pub fn contract_edges(&self, gone: &ItemSet) -> (Graph, Vec<usize>) {
        let mut ds = DisjointSet::new(self.vertices);
        for id in gone.iter() {
            let (u, v) = self.edges[id];
            ds.union(u, v);
        }
        // Compact the surviving vertex classes, keeping ascending root order.
        let mut class_of = vec![usize::MAX; self.vertices];
        let mut next = 0;
        for v in 0..self.vertices {
            let r = ds.find(v);
            if class_of[r] == usize::MAX {
                class_of[r] = next;
                next += 1;
            }
            class_of[v] = class_of[r];
        }
        let mut edges = Vec::new();
        let mut back = Vec::new();
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if !gone.contains(id) {
                edges.push((class_of[u], class_of[v]));
                back.push(id);
            }
        }
        (Graph { vertices: next, edges }, back)
    }

    /// Vertex–edge incidence columns over F_2 (self-loops give zero columns);
    /// the standard binary representation of the graphic matroid.
    pub fn incidence_columns_f2(&self) -> Vec<Vec<u32>> {
        self.edges
            .iter()
            .map(|&(u, v)| {
                let mut col = vec![0u32; self.vertices];
                if u != v {
                    col[u] = 1;
                    col[v] = 1;
                }
                col
            })
            .collect()
    }

    /// Minimum edge cut separating `s` from `t`, with the crossing edge ids as
    /// certificate. Unit capacity per edge; Edmonds–Karp.
    pub fn min_cut(&self, s: usize, t: usize) -> (usize, ItemSet) {
        assert!(s != t && s < self.vertices && t < self.vertices);
        // Two antiparallel unit arcs per undirected edge, reverse-paired.
        let mut head = Vec::new(); // arc -> target vertex
        let mut cap = Vec::new();
        let mut adj = vec![Vec::new(); self.vertices];
        for &(u, v) in &self.edges {
            if u == v {
                // Self-loops cross no cut; keep arc ids aligned with 2*edge id.
                head.push(u);
                cap.push(0i32);
                head.push(u);
                cap.push(0);
                continue;
            }
            adj[u].push(head.len());
            head.push(v);
            cap.push(1);
            adj[v].push(head.len());
            head.push(u);
            cap.push(1);
        }
        let mut flow = 0;
        loop {
            let mut prev_arc = vec![usize::MAX; self.vertices];
            let mut seen = vec![false; self.vertices];
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            'bfs: while let Some(v) = q.pop_front() {
                for &a in &adj[v] {
                    if cap[a] > 0 && !seen[head[a]] {
                        seen[head[a]] = true;
                        prev_arc[head[a]] = a;
                        if head[a] == t {
                            break 'bfs;
                        }
                        q.push_back(head[a]);
                    }
                }
            }
            if !seen[t] {
                let mut cut = ItemSet::new();
                for (id, &(u, v)) in self.edges.iter().enumerate() {
                    if u != v && seen[u] != seen[v] {
                        cut.insert(id);
                    }
                }
                return (flow, cut);
            }
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                cap[a] -= 1;
                cap[a ^ 1] += 1;
                v = head[a ^ 1];
            }
            flow += 1;
        }
    }

    /// Global edge connectivity of a connected graph: the least edges whose
    /// removal disconnects it, with a witnessing cut.
    pub fn edge_connectivity(&self) -> Result<(usize, ItemSet), Error> {
        if self.vertices < 2 {
            return Err(Error::input("edge connectivity needs at least two vertices"));
        }
        if !self.is_connected() {
            return Err(Error::precondition("graph is disconnected"));
        }
        let mut best: Option<(usize, ItemSet)> = None;
        for t in 1..self.vertices {
            let (value, cut) = self.min_cut(0, t);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, cut));
            }
        }
        Ok(best.unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Graph {
        Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn forest_rank_on_k4() {
        let g = k4();
        assert_eq!(g.forest_rank(&ItemSet::full(6)), 3);
        // A triangle has rank 2.
        assert_eq!(g.forest_rank(&[0, 1, 3].into_iter().collect()), 2);
        assert_eq!(g.forest_rank(&ItemSet::new()), 0);
    }

    #[test]
    fn components_and_connectivity() {
        let g = k4();
        assert!(g.is_connected());
        // Remove the three edges at vertex 0: it becomes isolated.
        assert_eq!(g.components_excluding(&[0, 1, 2].into_iter().collect()), 2);
        let (lambda, cut) = g.edge_connectivity().unwrap();
        assert_eq!(lambda, 3);
        assert_eq!(cut.len(), 3);
        assert!(g.components_excluding(&cut) > 1);
    }

    #[test]
    fn bridge_detection_respects_parallel_edges() {
        // Path 0-1-2 with the second segment doubled: only edge 0 is a bridge.
        let g = Graph::new(3, vec![(0, 1), (1, 2), (1, 2)]).unwrap();
        let b = g.bridges();
        assert!(b.contains(0) && !b.contains(1) && !b.contains(2));
        // Removing one parallel copy makes the other a bridge.
        let b = g.bridges_excluding(&ItemSet::singleton(2));
        assert!(b.contains(0) && b.contains(1));
    }

    #[test]
    fn self_loops_are_never_bridges() {
        let g = Graph::new(2, vec![(0, 0), (0, 1)]).unwrap();
        let b = g.bridges();
        assert!(!b.contains(0) && b.contains(1));
    }

    #[test]
    fn contraction_merges_and_renumbers() {
        let g = k4();
        // Contract edge 0 = (0,1): K4 becomes a triangle with a doubled edge.
        let (h, back) = g.contract_edges(&ItemSet::singleton(0));
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_count(), 5);
        assert_eq!(back, vec![1, 2, 3, 4, 5]);
        assert_eq!(h.forest_rank(&ItemSet::full(5)), 2);
        // Contracting a whole spanning tree loops everything.
        let (h, _) = g.contract_edges(&[0, 1, 2].into_iter().collect());
        assert_eq!(h.vertex_count(), 1);
        assert!(h.edges().iter().all(|&(u, v)| u == v));
    }

    #[test]
    fn deletion_keeps_vertices() {
        let g = k4();
        let (h, back) = g.delete_edges(&[1, 4].into_iter().collect());
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(back, vec![0, 2, 3, 5]);
    }

    #[test]
    fn min_cut_certificate_disconnects() {
        // Two triangles joined by a single edge: the joint is the min cut.
        let g = Graph::new(
            6,
            vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)],
        )
        .unwrap();
        let (value, cut) = g.min_cut(0, 5);
        assert_eq!(value, 1);
        assert_eq!(cut, ItemSet::singleton(6));
    }

    #[test]
    fn incidence_columns_match_forest_rank() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2), (2, 2)]).unwrap();
        let cols = g.incidence_columns_f2();
        assert_eq!(cols[3], vec![0, 0, 0]);
        let m = crate::gf::GfMatrix::from_columns(2, &cols).unwrap();
        assert_eq!(m.rank(), g.forest_rank(&ItemSet::full(4)));
    }
}
