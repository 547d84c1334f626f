//! Nerve of a cover, truncated at dimension two.
//!
//! Simplices are stored once, oriented by ascending index: edges `(a, b)`
//! with `a < b`, triangles `(a, b, c)` with `a < b < c`, both sorted
//! lexicographically. Reversed orientations are handled by the cochain
//! layer.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::cover::{Cover, CoverSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Nerve {
    vertex_count: usize,
    max_dim: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    vertex_witness: Vec<Option<usize>>,
    edge_witness: Vec<Option<usize>>,
    triangle_witness: Vec<Option<usize>>,
    edge_lookup: HashMap<[usize; 2], usize>,
    connectivity: Option<ConnectivityFlags>,
}

/// Whether each pairwise/triple intersection is connected at the
/// resolution of a caller-chosen granularity cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectivityFlags {
    pub edges: Vec<bool>,
    pub triangles: Vec<bool>,
}

pub fn build_nerve(cover: &Cover, max_dim: usize) -> Result<Nerve> {
    if !(1..=2).contains(&max_dim) {
        return Err(Error::input(format!("nerve dimension must be 1 or 2, got {max_dim}")));
    }
    let sets = cover.sets();
    let n = sets.len();
    let vertex_witness = sets.iter().map(|s| s.bits().ones().next()).collect();

    let mut edges = Vec::new();
    let mut edge_witness = Vec::new();
    let mut pair_bits = HashMap::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut meet = sets[a].bits().clone();
            meet.intersect_with(sets[b].bits());
            if let Some(p) = meet.ones().next() {
                edges.push([a, b]);
                edge_witness.push(Some(p));
                pair_bits.insert([a, b], meet);
            }
        }
    }

    let mut triangles = Vec::new();
    let mut triangle_witness = Vec::new();
    if max_dim == 2 {
        for &[a, b] in &edges {
            let ab = &pair_bits[&[a, b]];
            for c in b + 1..n {
                if !pair_bits.contains_key(&[a, c]) || !pair_bits.contains_key(&[b, c]) {
                    continue;
                }
                if let Some(p) = ab.intersection(sets[c].bits()).next() {
                    triangles.push([a, b, c]);
                    triangle_witness.push(Some(p));
                }
            }
        }
    }

    Ok(Nerve::assemble(n, max_dim, edges, triangles, vertex_witness, edge_witness, triangle_witness))
}

impl Nerve {
    fn assemble(
        vertex_count: usize,
        max_dim: usize,
        edges: Vec<[usize; 2]>,
        triangles: Vec<[usize; 3]>,
        vertex_witness: Vec<Option<usize>>,
        edge_witness: Vec<Option<usize>>,
        triangle_witness: Vec<Option<usize>>,
    ) -> Nerve {
        let edge_lookup = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        Nerve {
            vertex_count,
            max_dim,
            edges,
            triangles,
            vertex_witness,
            edge_witness,
            triangle_witness,
            edge_lookup,
            connectivity: None,
        }
    }

    /// A nerve given directly by its simplices, without witness points.
    ///
    /// Orientation inside each simplex is irrelevant; every face of every
    /// triangle must be listed among the edges. The result is a 2-complex
    /// even when `triangles` is empty.
    pub fn from_simplices(vertex_count: usize, edges: &[[usize; 2]], triangles: &[[usize; 3]]) -> Result<Nerve> {
        let mut es: Vec<[usize; 2]> = Vec::with_capacity(edges.len());
        for &[a, b] in edges {
            if a == b || a >= vertex_count || b >= vertex_count {
                return Err(Error::input(format!("invalid edge ({a}, {b})")));
            }
            es.push([a.min(b), a.max(b)]);
        }
        es.sort_unstable();
        es.dedup();
        let mut ts: Vec<[usize; 3]> = Vec::with_capacity(triangles.len());
        for t in triangles {
            let mut t = *t;
            t.sort_unstable();
            if t[0] == t[1] || t[1] == t[2] || t[2] >= vertex_count {
                return Err(Error::input(format!("invalid triangle {t:?}")));
            }
            for face in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                if es.binary_search(&face).is_err() {
                    return Err(Error::input(format!("triangle {t:?} is missing edge {face:?}")));
                }
            }
            ts.push(t);
        }
        ts.sort_unstable();
        ts.dedup();
        let (ne, nt) = (es.len(), ts.len());
        Ok(Nerve::assemble(vertex_count, 2, es, ts, vec![None; vertex_count], vec![None; ne], vec![None; nt]))
    }

    /// Attaches [`ConnectivityFlags`] computed against `granularity`.
    ///
    /// An intersection counts as connected when the granularity sets
    /// restricted to it form a single adjacency class.
    pub fn with_connectivity(mut self, cover: &Cover, granularity: &Cover) -> Result<Nerve> {
        if cover.space() != granularity.space() {
            return Err(Error::input("granularity cover lives on a different sample space"));
        }
        if cover.len() != self.vertex_count {
            return Err(Error::input("cover does not match this nerve"));
        }
        let connected = |sets: &[&CoverSet]| {
            let mut meet = sets[0].bits().clone();
            for s in &sets[1..] {
                meet.intersect_with(s.bits());
            }
            let pieces: Vec<_> = granularity
                .sets()
                .iter()
                .map(|g| {
                    let mut piece = g.bits().clone();
                    piece.intersect_with(&meet);
                    piece
                })
                .filter(|p| !p.is_clear())
                .collect();
            let mut uf = petgraph::unionfind::UnionFind::<usize>::new(pieces.len());
            for i in 0..pieces.len() {
                for j in i + 1..pieces.len() {
                    if !pieces[i].is_disjoint(&pieces[j]) {
                        uf.union(i, j);
                    }
                }
            }
            let mut covered = meet.clone();
            for p in &pieces {
                covered.difference_with(p);
            }
            // points of the intersection missed by the granularity count as
            // separate pieces
            covered.is_clear() && (0..pieces.len()).all(|i| uf.equiv(0, i))
        };
        let sets = cover.sets();
        let edges = self.edges.iter().map(|&[a, b]| connected(&[&sets[a], &sets[b]])).collect();
        let triangles =
            self.triangles.iter().map(|&[a, b, c]| connected(&[&sets[a], &sets[b], &sets[c]])).collect();
        self.connectivity = Some(ConnectivityFlags { edges, triangles });
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edge_witness(&self, e: usize) -> Option<usize> {
        self.edge_witness[e]
    }

    pub fn triangle_witness(&self, t: usize) -> Option<usize> {
        self.triangle_witness[t]
    }

    pub fn connectivity(&self) -> Option<&ConnectivityFlags> {
        self.connectivity.as_ref()
    }

    /// Index of the stored edge between `a` and `b`, and whether `(a, b)`
    /// runs against the stored orientation.
    pub fn edge_id(&self, a: usize, b: usize) -> Option<(usize, bool)> {
        if a < b {
            self.edge_lookup.get(&[a, b]).map(|&e| (e, false))
        } else {
            self.edge_lookup.get(&[b, a]).map(|&e| (e, true))
        }
    }

    pub fn triangle_id(&self, t: [usize; 3]) -> Option<usize> {
        let mut t = t;
        t.sort_unstable();
        self.triangles.binary_search(&t).ok()
    }

    /// Sorted neighbour lists of the 1-skeleton.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &[a, b] in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Breadth-first spanning forest, rooted at the smallest vertex of each
    /// component and visiting neighbours in ascending order.
    pub fn spanning_forest(&self) -> SpanningForest {
        let adj = self.adjacency();
        let n = self.vertex_count;
        let mut parent = vec![None; n];
        let mut root = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        let mut order = Vec::with_capacity(n);
        let mut tree_edge = vec![false; self.edges.len()];
        for start in 0..n {
            if root[start] != usize::MAX {
                continue;
            }
            root[start] = start;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for &w in &adj[u] {
                    if root[w] == usize::MAX {
                        root[w] = start;
                        parent[w] = Some(u);
                        depth[w] = depth[u] + 1;
                        tree_edge[self.edge_id(u, w).expect("adjacent").0] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        SpanningForest { parent, root, depth, order, tree_edge }
    }

    pub fn component_count(&self) -> usize {
        let forest = self.spanning_forest();
        (0..self.vertex_count).filter(|&v| forest.root[v] == v).count()
    }

    /// One cycle per non-tree edge of [`Nerve::spanning_forest`].
    pub fn fundamental_cycles(&self) -> Vec<Cycle> {
        let forest = self.spanning_forest();
        self.edges
            .iter()
            .enumerate()
            .filter(|(e, _)| !forest.tree_edge[*e])
            .map(|(e, &[a, b])| Cycle { closing_edge: e, vertices: forest.loop_through(a, b) })
            .collect()
    }

    /// Boundary `∂_k` as an integer matrix (rows: (k-1)-simplices).
    pub fn boundary_matrix(&self, k: usize) -> Result<IntegerMatrix> {
        match k {
            1 => {
                let mut m = IntegerMatrix::zeros(self.vertex_count, self.edges.len());
                for (e, &[a, b]) in self.edges.iter().enumerate() {
                    m.set(a, e, -1);
                    m.set(b, e, 1);
                }
                Ok(m)
            }
            2 if self.max_dim >= 2 => {
                let mut m = IntegerMatrix::zeros(self.edges.len(), self.triangles.len());
                for (t, &[a, b, c]) in self.triangles.iter().enumerate() {
                    m.set(self.edge_lookup[&[b, c]], t, 1);
                    m.set(self.edge_lookup[&[a, c]], t, -1);
                    m.set(self.edge_lookup[&[a, b]], t, 1);
                }
                Ok(m)
            }
            2 => Err(Error::input("nerve was built without triangles")),
            _ => Err(Error::input(format!("boundary degree {k} out of range (1 or 2)"))),
        }
    }

    /// The nerve with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Nerve> {
        let edges: Vec<[usize; 2]> = self.edges.iter().map(|&[a, b]| [perm[a], perm[b]]).collect();
        let triangles: Vec<[usize; 3]> = self.triangles.iter().map(|&[a, b, c]| [perm[a], perm[b], perm[c]]).collect();
        Nerve::from_simplices(self.vertex_count, &edges, &triangles)
    }

    pub fn to_export(&self) -> NerveExport {
        NerveExport {
            vertices: (0..self.vertex_count).collect(),
            edges: self
                .edges
                .iter()
                .zip(&self.edge_witness)
                .map(|(e, w)| SimplexExport { simplex: e.to_vec(), witness: *w })
                .collect(),
            triangles: self
                .triangles
                .iter()
                .zip(&self.triangle_witness)
                .map(|(t, w)| SimplexExport { simplex: t.to_vec(), witness: *w })
                .collect(),
            connectivity: self.connectivity.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NerveExport {
    pub vertices: Vec<usize>,
    pub edges: Vec<SimplexExport>,
    pub triangles: Vec<SimplexExport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connectivity: Option<ConnectivityFlags>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplexExport {
    pub simplex: Vec<usize>,
    pub witness: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SpanningForest {
    pub parent: Vec<Option<usize>>,
    pub root: Vec<usize>,
    pub depth: Vec<usize>,
    /// Vertices in breadth-first visiting order.
    pub order: Vec<usize>,
    pub tree_edge: Vec<bool>,
}

impl SpanningForest {
    /// Tree path from `v` up to its root, inclusive.
    pub fn path_to_root(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path
    }

    /// Closed walk `a -> b -> (tree path) -> a`.
    fn loop_through(&self, a: usize, b: usize) -> Vec<usize> {
        let up_a = self.path_to_root(a);
        let up_b = self.path_to_root(b);
        let (ib, ia) = up_b
            .iter()
            .enumerate()
            .find_map(|(i, v)| up_a.iter().position(|w| w == v).map(|j| (i, j)))
            .expect("endpoints of an edge share a component");
        let mut walk = Vec::with_capacity(ib + ia + 2);
        walk.push(a);
        walk.extend_from_slice(&up_b[..=ib]);
        walk.extend(up_a[..ia].iter().rev());
        walk
    }
}

/// A closed walk in the 1-skeleton, first vertex repeated at the end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub closing_edge: usize,
    pub vertices: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Consecutive oriented steps `(from, to)`.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// Edge indices with `+1` for steps along the stored orientation.
    pub fn signed_edges(&self, nerve: &Nerve) -> Vec<(usize, i8)> {
        self.steps()
            .map(|(u, w)| {
                let (e, reversed) = nerve.edge_id(u, w).expect("cycle steps are nerve edges");
                (e, if reversed { -1 } else { 1 })
            })
            .collect()
    }
}

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut t = IntegerMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::input(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.entries[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{circle_arcs, cover_from_complex};

    /// Rank over Q by fraction-free elimination on i128.
    fn rank_oracle(m: &IntegerMatrix) -> usize {
        let mut a: Vec<Vec<i128>> = (0..m.rows()).map(|r| m.row(r).iter().map(|&v| v as i128).collect()).collect();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(p) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
            a.swap(rank, p);
            for r in 0..a.len() {
                if r != rank && a[r][c] != 0 {
                    let (x, y) = (a[rank][c], a[r][c]);
                    for k in 0..m.cols() {
                        a[r][k] = a[r][k] * x - a[rank][k] * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn three_arcs_give_a_hollow_triangle() {
        let nerve = build_nerve(&circle_arcs(3, 30, 0.2).unwrap(), 2).unwrap();
        assert_eq!(nerve.vertex_count(), 3);
        assert_eq!(nerve.edges(), &[[0, 1], [0, 2], [1, 2]]);
        assert!(nerve.triangles().is_empty());
    }

    #[test]
    fn common_point_gives_a_triangle() {
        let nerve = build_nerve(&cover_from_complex(3, &[vec![0, 1, 2]]).unwrap(), 2).unwrap();
        assert_eq!(nerve.edges().len(), 3);
        assert_eq!(nerve.triangles(), &[[0, 1, 2]]);
        let one = build_nerve(&cover_from_complex(3, &[vec![0, 1, 2]]).unwrap(), 1).unwrap();
        assert!(one.triangles().is_empty());
        assert!(one.boundary_matrix(2).is_err());
    }

    #[test]
    fn disjoint_sets_have_no_edges() {
        let nerve = build_nerve(&cover_from_complex(4, &[]).unwrap(), 2).unwrap();
        assert!(nerve.edges().is_empty());
        assert!(nerve.fundamental_cycles().is_empty());
    }

    #[test]
    fn witnesses_lie_in_their_intersections() {
        let cover = cover_from_complex(4, &[vec![0, 1, 2], vec![2, 3], vec![1, 3]]).unwrap();
        let nerve = build_nerve(&cover, 2).unwrap();
        for (e, &[a, b]) in nerve.edges().iter().enumerate() {
            let p = nerve.edge_witness(e).unwrap();
            assert!(cover.set(a).contains(p) && cover.set(b).contains(p));
        }
        for (t, &[a, b, c]) in nerve.triangles().iter().enumerate() {
            let p = nerve.triangle_witness(t).unwrap();
            assert!([a, b, c].iter().all(|&v| cover.set(v).contains(p)));
        }
    }

    #[test]
    fn single_edge_boundary_column() {
        let nerve = Nerve::from_simplices(2, &[[0, 1]], &[]).unwrap();
        let d1 = nerve.boundary_matrix(1).unwrap();
        assert_eq!((d1.get(0, 0), d1.get(1, 0)), (-1, 1));
        assert!(nerve.boundary_matrix(3).is_err());
    }

    #[test]
    fn boundary_squares_to_zero_on_a_triangle() {
        let nerve = Nerve::from_simplices(3, &[[0, 1], [1, 2], [0, 2]], &[[2, 1, 0]]).unwrap();
        let d1 = nerve.boundary_matrix(1).unwrap();
        let d2 = nerve.boundary_matrix(2).unwrap();
        assert!(d1.mul(&d2).unwrap().is_zero());
    }

    #[test]
    fn three_cycle_rank_and_cycles() {
        let nerve = Nerve::from_simplices(3, &[[0, 1], [1, 2], [0, 2]], &[]).unwrap();
        assert_eq!(rank_oracle(&nerve.boundary_matrix(1).unwrap()), 2);
        let cycles = nerve.fundamental_cycles();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 3);
        assert_eq!(cycles[0].vertices, vec![1, 2, 0, 1]);
    }

    #[test]
    fn tree_has_no_cycles() {
        let nerve = Nerve::from_simplices(5, &[[0, 1], [1, 2], [1, 3], [3, 4]], &[]).unwrap();
        assert!(nerve.fundamental_cycles().is_empty());
    }

    #[test]
    fn wheel_cycle_count() {
        // hub 0, rim 1-2-3-4
        let edges = [[1, 2], [2, 3], [3, 4], [1, 4], [0, 1], [0, 2], [0, 3], [0, 4]];
        let nerve = Nerve::from_simplices(5, &edges, &[]).unwrap();
        let expected = edges.len() - 5 + nerve.component_count();
        assert_eq!(expected, 4);
        assert_eq!(nerve.fundamental_cycles().len(), expected);
        for cycle in nerve.fundamental_cycles() {
            assert_eq!(cycle.vertices.first(), cycle.vertices.last());
            assert_eq!(cycle.signed_edges(&nerve).len(), cycle.len());
        }
    }

    #[test]
    fn triangle_needs_its_faces() {
        assert!(Nerve::from_simplices(3, &[[0, 1], [1, 2]], &[[0, 1, 2]]).is_err());
    }

    #[test]
    fn connectivity_flags_follow_granularity() {
        use crate::cover::{Cover, CoverSet, SampleSpace};
        use std::sync::Arc;
        // U0 ∩ U1 = {1, 3}; granularity links 1 and 3 only through point 2
        let space = Arc::new(SampleSpace::abstract_points(5));
        let sets = |s: &[&[usize]]| {
            Cover::new(space.clone(), s.iter().map(|m| CoverSet::explicit(&space, m.iter().copied()).unwrap()).collect())
                .unwrap()
        };
        let cover = sets(&[&[0, 1, 3], &[1, 2, 3, 4]]);
        let split = sets(&[&[0, 1], &[2], &[3, 4]]);
        let joined = sets(&[&[0, 1, 3], &[2, 4]]);
        let nerve = build_nerve(&cover, 2).unwrap();
        let flags = nerve.clone().with_connectivity(&cover, &split).unwrap();
        assert_eq!(flags.connectivity().unwrap().edges, vec![false]);
        let flags = nerve.with_connectivity(&cover, &joined).unwrap();
        assert_eq!(flags.connectivity().unwrap().edges, vec![true]);
    }
}
