//! Half-edge multigraphs with loops, vertex weights, and monoid-valued edge
//! lengths, together with Laplacians, genus bookkeeping, loop subdivision,
//! and brute-force automorphism search.
//!
//! Every edge is a pair of half-edges; a loop has both half-edges at the same
//! vertex. Vertices and edges are sorted by their string identifiers at
//! construction so that all downstream output is deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::divisor::GraphDivisor;
use crate::linalg::IntMatrix;
use crate::monoid::MonoidElement;
use crate::{Error, Result};

pub const DEFAULT_AUTOMORPHISM_BOUND: usize = 8;

/// Wire format for a multigraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexJson {
    pub id: String,
    pub weight: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub id: String,
    /// Two half-edges as `[halfEdgeId, vertexId]` pairs.
    pub halves: [(String, String); 2],
    pub length: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexInfo {
    pub id: String,
    pub weight: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdge {
    pub id: String,
    pub vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeInfo {
    pub id: String,
    pub halves: [HalfEdge; 2],
    pub length: MonoidElement,
}

impl EdgeInfo {
    pub fn is_loop(&self) -> bool {
        self.halves[0].vertex == self.halves[1].vertex
    }
}

/// Connected multigraph with loops, weights, and edge lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertices: Vec<VertexInfo>,
    edges: Vec<EdgeInfo>,
    monoid_rank: usize,
    vertex_index: BTreeMap<String, usize>,
    half_index: BTreeMap<String, (usize, usize)>,
    nonloop_adj: Vec<Vec<(usize, i64)>>,
    loops: Vec<i64>,
    valences: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphInvariants {
    pub b1: i64,
    pub genus: i64,
}

impl Multigraph {
    /// Builds a graph from id-based parts, the form used by the JSON layer,
    /// fixtures, and generators. Vertices and edges are sorted by id and all
    /// structural invariants are checked here.
    pub fn from_parts(
        vertices: Vec<(String, u32)>,
        edges: Vec<(String, (String, String), (String, String), MonoidElement)>,
    ) -> Result<Self> {
        let mut vs: Vec<VertexInfo> = vertices
            .into_iter()
            .map(|(id, weight)| VertexInfo { id, weight })
            .collect();
        vs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = BTreeMap::new();
        for (i, v) in vs.iter().enumerate() {
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate vertex id {:?}", v.id)));
            }
        }
        let mut es = Vec::new();
        for (id, (h1, v1), (h2, v2), length) in edges {
            let a = *index
                .get(&v1)
                .ok_or_else(|| Error::invalid(format!("edge {:?} references unknown vertex {:?}", id, v1)))?;
            let b = *index
                .get(&v2)
                .ok_or_else(|| Error::invalid(format!("edge {:?} references unknown vertex {:?}", id, v2)))?;
            es.push(EdgeInfo {
                id,
                halves: [
                    HalfEdge { id: h1, vertex: a },
                    HalfEdge { id: h2, vertex: b },
                ],
                length,
            });
        }
        es.sort_by(|a, b| a.id.cmp(&b.id));
        Self::from_sorted(vs, es)
    }

    fn from_sorted(vertices: Vec<VertexInfo>, edges: Vec<EdgeInfo>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::invalid("graph must have at least one vertex"));
        }
        let mut vertex_index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.id.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate vertex id {:?}", v.id)));
            }
        }
        let mut edge_ids = BTreeSet::new();
        let mut half_index = BTreeMap::new();
        let mut monoid_rank = None;
        for (ei, e) in edges.iter().enumerate() {
            if !edge_ids.insert(e.id.clone()) {
                return Err(Error::invalid(format!("duplicate edge id {:?}", e.id)));
            }
            for (side, h) in e.halves.iter().enumerate() {
                if half_index.insert(h.id.clone(), (ei, side)).is_some() {
                    return Err(Error::invalid(format!(
                        "half-edge {:?} appears in more than one place",
                        h.id
                    )));
                }
                if h.vertex >= vertices.len() {
                    return Err(Error::invalid("half-edge references unknown vertex"));
                }
            }
            if e.halves[0].id == e.halves[1].id {
                return Err(Error::invalid(format!(
                    "edge {:?} must pair two distinct half-edges",
                    e.id
                )));
            }
            match monoid_rank {
                None => monoid_rank = Some(e.length.rank()),
                Some(k) if k == e.length.rank() => {}
                Some(k) => {
                    return Err(Error::invalid(format!(
                        "edge {:?} has length of rank {}, expected {}",
                        e.id,
                        e.length.rank(),
                        k
                    )))
                }
            }
            if e.length.is_zero() {
                return Err(Error::invalid(format!(
                    "edge {:?} must have nonzero length in the sharp monoid",
                    e.id
                )));
            }
        }
        let n = vertices.len();
        let mut nonloop_adj: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); n];
        let mut loops = vec![0i64; n];
        let mut valences = vec![0i64; n];
        for e in &edges {
            let (a, b) = (e.halves[0].vertex, e.halves[1].vertex);
            valences[a] += 1;
            valences[b] += 1;
            if a == b {
                loops[a] += 1;
            } else {
                *nonloop_adj[a].entry(b).or_insert(0) += 1;
                *nonloop_adj[b].entry(a).or_insert(0) += 1;
            }
        }
        let nonloop_adj: Vec<Vec<(usize, i64)>> = nonloop_adj
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        // connectivity
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &nonloop_adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("graph must be connected"));
        }
        Ok(Multigraph {
            vertices,
            edges,
            monoid_rank: monoid_rank.unwrap_or(0),
            vertex_index,
            half_index,
            nonloop_adj,
            loops,
            valences,
        })
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        let vertices = json
            .vertices
            .iter()
            .map(|v| (v.id.clone(), v.weight))
            .collect();
        let edges = json
            .edges
            .iter()
            .map(|e| {
                (
                    e.id.clone(),
                    e.halves[0].clone(),
                    e.halves[1].clone(),
                    MonoidElement::new(e.length.clone()),
                )
            })
            .collect();
        Self::from_parts(vertices, edges)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson {
                    id: v.id.clone(),
                    weight: v.weight,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    id: e.id.clone(),
                    halves: [
                        (e.halves[0].id.clone(), self.vertices[e.halves[0].vertex].id.clone()),
                        (e.halves[1].id.clone(), self.vertices[e.halves[1].vertex].id.clone()),
                    ],
                    length: e.length.coords.clone(),
                })
                .collect(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexInfo] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeInfo] {
        &self.edges
    }

    pub fn vertex_id(&self, i: usize) -> &str {
        &self.vertices[i].id
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown vertex {:?}", id)))
    }

    /// Resolves a half-edge id to (edge index, side).
    pub fn half_edge(&self, id: &str) -> Result<(usize, usize)> {
        self.half_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown half-edge {:?}", id)))
    }

    /// All half-edges as (edge index, side), in edge order.
    pub fn half_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.edges.len()).flat_map(|e| [(e, 0), (e, 1)])
    }

    /// Endpoint vertex of the given half-edge.
    pub fn half_vertex(&self, edge: usize, side: usize) -> usize {
        self.edges[edge].halves[side].vertex
    }

    pub fn weight(&self, v: usize) -> u32 {
        self.vertices[v].weight
    }

    pub fn monoid_rank(&self) -> usize {
        self.monoid_rank
    }

    /// Number of half-edges at `v`; a loop counts twice.
    pub fn valence(&self, v: usize) -> Result<i64> {
        self.valences
            .get(v)
            .copied()
            .ok_or_else(|| Error::input("unknown vertex"))
    }

    pub fn loops_at(&self, v: usize) -> i64 {
        self.loops[v]
    }

    /// Non-loop neighbors of `v` with edge multiplicities.
    pub fn neighbors(&self, v: usize) -> &[(usize, i64)] {
        &self.nonloop_adj[v]
    }

    pub fn edges_between(&self, u: usize, w: usize) -> i64 {
        if u == w {
            return self.loops[u];
        }
        self.nonloop_adj[u]
            .iter()
            .find(|&&(x, _)| x == w)
            .map_or(0, |&(_, m)| m)
    }

    pub fn invariants(&self) -> GraphInvariants {
        let b1 = self.n_edges() as i64 - self.n_vertices() as i64 + 1;
        let genus = b1 + self.vertices.iter().map(|v| v.weight as i64).sum::<i64>();
        GraphInvariants { b1, genus }
    }

    /// Graph Laplacian; loops contribute nothing (firing across a loop is a
    /// no-op).
    pub fn laplacian(&self) -> IntMatrix {
        let n = self.n_vertices();
        IntMatrix::from_fn(n, n, |i, j| {
            if i == j {
                (self.valences[i] - 2 * self.loops[i]).into()
            } else {
                (-self.edges_between(i, j)).into()
            }
        })
    }

    /// Laplacian as machine integers, for chip arithmetic.
    pub fn laplacian_row(&self, v: usize) -> Vec<i64> {
        let n = self.n_vertices();
        (0..n)
            .map(|j| {
                if j == v {
                    self.valences[v] - 2 * self.loops[v]
                } else {
                    -self.edges_between(v, j)
                }
            })
            .collect()
    }

    /// K_G(v) = valence(v) - 2, loops counted twice.
    pub fn canonical_divisor(&self) -> GraphDivisor {
        GraphDivisor::new((0..self.n_vertices()).map(|v| self.valences[v] - 2).collect())
    }

    /// Replaces every loop by two parallel edges through a fresh weight-0
    /// vertex. b1 and genus are preserved.
    pub fn subdivide_loops(&self) -> (Multigraph, LoopSubdivision) {
        fn fresh(base: String, taken: &mut BTreeSet<String>) -> String {
            let mut id = base;
            while !taken.insert(id.clone()) {
                id.push('_');
            }
            id
        }
        let mut vertices: Vec<(String, u32)> = self
            .vertices
            .iter()
            .map(|v| (v.id.clone(), v.weight))
            .collect();
        let mut vertex_ids: BTreeSet<String> = vertices.iter().map(|(id, _)| id.clone()).collect();
        let mut edge_ids: BTreeSet<String> = self.edges.iter().map(|e| e.id.clone()).collect();
        let mut half_ids: BTreeSet<String> = self
            .edges
            .iter()
            .flat_map(|e| e.halves.iter().map(|h| h.id.clone()))
            .collect();
        let mut edges = Vec::new();
        let mut origin_by_id: BTreeMap<String, EdgeOrigin> = BTreeMap::new();
        let mut midpoint_ids: Vec<(usize, String)> = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            if !e.is_loop() {
                origin_by_id.insert(e.id.clone(), EdgeOrigin::Old(ei));
                edges.push((
                    e.id.clone(),
                    (e.halves[0].id.clone(), self.vertices[e.halves[0].vertex].id.clone()),
                    (e.halves[1].id.clone(), self.vertices[e.halves[1].vertex].id.clone()),
                    e.length.clone(),
                ));
                continue;
            }
            let mid = fresh(format!("{}_mid", e.id), &mut vertex_ids);
            let vid = self.vertices[e.halves[0].vertex].id.clone();
            vertices.push((mid.clone(), 0));
            for side in 0..2 {
                let id = fresh(format!("{}_{}", e.id, ['a', 'b'][side]), &mut edge_ids);
                let mid_half = fresh(format!("{}_m{}", e.id, ['a', 'b'][side]), &mut half_ids);
                origin_by_id.insert(
                    id.clone(),
                    EdgeOrigin::LoopHalf {
                        old_edge: ei,
                        side,
                    },
                );
                edges.push((
                    id,
                    (e.halves[side].id.clone(), vid.clone()),
                    (mid_half, mid.clone()),
                    e.length.clone(),
                ));
            }
            midpoint_ids.push((ei, mid));
        }
        let sub = Multigraph::from_parts(vertices, edges)
            .expect("loop subdivision of a valid graph is valid");
        let vertex_map = self
            .vertices
            .iter()
            .map(|v| sub.vertex_index(&v.id).expect("vertex survives subdivision"))
            .collect();
        let midpoints = midpoint_ids
            .into_iter()
            .map(|(ei, mid)| (ei, sub.vertex_index(&mid).unwrap()))
            .collect();
        let edge_origin = sub
            .edges()
            .iter()
            .map(|e| origin_by_id[&e.id].clone())
            .collect();
        (
            sub,
            LoopSubdivision {
                vertex_map,
                midpoints,
                edge_origin,
            },
        )
    }

    /// All (vertex permutation, edge permutation) pairs preserving incidence,
    /// weights, and edge lengths. Plain backtracking over vertex bijections;
    /// refuses graphs larger than `max_vertices`.
    pub fn automorphisms(&self, max_vertices: usize) -> Result<Vec<GraphAutomorphism>> {
        if self.n_vertices() > max_vertices {
            return Err(Error::bound(format!(
                "automorphism search limited to {} vertices, graph has {}",
                max_vertices,
                self.n_vertices()
            )));
        }
        let n = self.n_vertices();
        let mut result = Vec::new();
        let mut perm: Vec<usize> = (0..n).collect();
        self.permute_rec(&mut perm, 0, &mut result);
        Ok(result)
    }

    fn permute_rec(&self, perm: &mut Vec<usize>, k: usize, out: &mut Vec<GraphAutomorphism>) {
        let n = perm.len();
        if k == n {
            if self.vertex_perm_compatible(perm) {
                for edge_perm in self.edge_bijections(perm) {
                    out.push(GraphAutomorphism {
                        vertex_perm: perm.clone(),
                        edge_perm,
                    });
                }
            }
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            // cheap pruning: weights must match
            if self.vertices[k].weight == self.vertices[perm[k]].weight {
                self.permute_rec(perm, k + 1, out);
            }
            perm.swap(k, i);
        }
    }

    fn vertex_perm_compatible(&self, perm: &[usize]) -> bool {
        let n = self.n_vertices();
        for u in 0..n {
            if self.vertices[u].weight != self.vertices[perm[u]].weight {
                return false;
            }
            for w in u..n {
                let mut lengths: Vec<&MonoidElement> = self
                    .edges
                    .iter()
                    .filter(|e| endpoint_pair(e) == (u.min(w), u.max(w)))
                    .map(|e| &e.length)
                    .collect();
                let (pu, pw) = (perm[u].min(perm[w]), perm[u].max(perm[w]));
                let mut images: Vec<&MonoidElement> = self
                    .edges
                    .iter()
                    .filter(|e| endpoint_pair(e) == (pu, pw))
                    .map(|e| &e.length)
                    .collect();
                lengths.sort();
                images.sort();
                if lengths != images {
                    return false;
                }
            }
        }
        true
    }

    /// All edge bijections compatible with a given vertex permutation.
    fn edge_bijections(&self, perm: &[usize]) -> Vec<Vec<usize>> {
        let m = self.n_edges();
        let mut assignments: Vec<Vec<usize>> = vec![vec![usize::MAX; m]];
        // process edges grouped by source endpoint pair
        let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            by_pair.entry(endpoint_pair(e)).or_default().push(i);
        }
        for (&(u, w), sources) in &by_pair {
            let (pu, pw) = (perm[u].min(perm[w]), perm[u].max(perm[w]));
            let targets: Vec<usize> = by_pair.get(&(pu, pw)).cloned().unwrap_or_default();
            if targets.len() != sources.len() {
                return Vec::new();
            }
            let mut next = Vec::new();
            for partial in assignments {
                let mut used = vec![false; targets.len()];
                extend_matching(self, sources, &targets, 0, &mut used, &partial, &mut next);
            }
            assignments = next;
            if assignments.is_empty() {
                return assignments;
            }
        }
        assignments
    }
}

fn endpoint_pair(e: &EdgeInfo) -> (usize, usize) {
    let (a, b) = (e.halves[0].vertex, e.halves[1].vertex);
    (a.min(b), a.max(b))
}

fn extend_matching(
    g: &Multigraph,
    sources: &[usize],
    targets: &[usize],
    k: usize,
    used: &mut Vec<bool>,
    partial: &Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if k == sources.len() {
        out.push(partial.clone());
        return;
    }
    let src = sources[k];
    for (t, &tgt) in targets.iter().enumerate() {
        if used[t] || g.edges[src].length != g.edges[tgt].length {
            continue;
        }
        used[t] = true;
        let mut next = partial.clone();
        next[src] = tgt;
        extend_matching(g, sources, targets, k + 1, used, &next, out);
        used[t] = false;
    }
}

/// Provenance of an edge of a subdivided graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeOrigin {
    /// Carried over unchanged from the original graph.
    Old(usize),
    /// One of the two halves a loop was split into; `side` names the original
    /// half-edge it retains.
    LoopHalf { old_edge: usize, side: usize },
}

#[derive(Debug, Clone)]
pub struct LoopSubdivision {
    /// Old vertex index -> vertex index in the subdivided graph.
    pub vertex_map: Vec<usize>,
    /// (old edge index, midpoint vertex index) per subdivided loop.
    pub midpoints: Vec<(usize, usize)>,
    /// Provenance per edge of the subdivided graph, in its edge order.
    pub edge_origin: Vec<EdgeOrigin>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphAutomorphism {
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
}

impl GraphAutomorphism {
    pub fn compose(&self, other: &GraphAutomorphism) -> GraphAutomorphism {
        GraphAutomorphism {
            vertex_perm: other.vertex_perm.iter().map(|&v| self.vertex_perm[v]).collect(),
            edge_perm: other.edge_perm.iter().map(|&e| self.edge_perm[e]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn validate_examples() {
        assert!(fixtures::c3().n_vertices() == 3);
        // two isolated vertices
        let err = Multigraph::from_parts(
            vec![("a".into(), 0), ("b".into(), 0)],
            vec![],
        )
        .unwrap_err();
        assert!(err.to_string().contains("connected"));
        // half-edge appearing in two edges
        let err = Multigraph::from_parts(
            vec![("a".into(), 0), ("b".into(), 0)],
            vec![
                (
                    "e1".into(),
                    ("h1".into(), "a".into()),
                    ("h2".into(), "b".into()),
                    MonoidElement::new(vec![1]),
                ),
                (
                    "e2".into(),
                    ("h1".into(), "a".into()),
                    ("h3".into(), "b".into()),
                    MonoidElement::new(vec![1]),
                ),
            ],
        )
        .unwrap_err();
        assert!(err.to_string().contains("half-edge"));
    }

    #[test]
    fn valence_examples() {
        let loop1 = fixtures::loop1();
        assert_eq!(loop1.valence(0).unwrap(), 2);
        let c3 = fixtures::c3();
        assert_eq!(c3.valence(0).unwrap(), 2);
        let b3 = fixtures::b3();
        assert_eq!(b3.valence(0).unwrap(), 3);
        assert!(c3.valence(17).is_err());
    }

    #[test]
    fn invariants_examples() {
        let mut b3 = fixtures::b3().to_json();
        b3.vertices[0].weight = 1;
        let b3 = Multigraph::from_json(&b3).unwrap();
        assert_eq!(b3.invariants(), GraphInvariants { b1: 2, genus: 3 });
        assert_eq!(fixtures::k1().invariants(), GraphInvariants { b1: 0, genus: 0 });
        assert_eq!(fixtures::loop1().invariants(), GraphInvariants { b1: 1, genus: 1 });
    }

    #[test]
    fn laplacian_examples() {
        let c3 = fixtures::c3().laplacian();
        let expect =
            IntMatrix::from_rows(&[vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]).unwrap();
        assert_eq!(c3, expect);
        let loop1 = fixtures::loop1().laplacian();
        assert_eq!(loop1, IntMatrix::from_rows(&[vec![0]]).unwrap());
        let b2 = fixtures::b2().laplacian();
        assert_eq!(b2, IntMatrix::from_rows(&[vec![2, -2], vec![-2, 2]]).unwrap());
    }

    #[test]
    fn laplacian_rows_and_columns_sum_to_zero() {
        for g in [fixtures::c3(), fixtures::b3(), fixtures::loop1(), fixtures::p2()] {
            let l = g.laplacian();
            let n = g.n_vertices();
            for i in 0..n {
                let row: num_bigint::BigInt = (0..n).map(|j| l.entry(i, j).clone()).sum();
                let col: num_bigint::BigInt = (0..n).map(|j| l.entry(j, i).clone()).sum();
                assert_eq!(row, 0.into());
                assert_eq!(col, 0.into());
                for j in 0..n {
                    assert_eq!(l.entry(i, j), l.entry(j, i));
                }
            }
        }
    }

    #[test]
    fn valence_sums_to_twice_edges() {
        for g in [fixtures::c3(), fixtures::b3(), fixtures::loop1(), fixtures::k1()] {
            let total: i64 = (0..g.n_vertices()).map(|v| g.valence(v).unwrap()).sum();
            assert_eq!(total, 2 * g.n_edges() as i64);
        }
    }

    #[test]
    fn subdivide_loop1_gives_b2_shape() {
        let (sub, map) = fixtures::loop1().subdivide_loops();
        assert_eq!(sub.n_vertices(), 2);
        assert_eq!(sub.n_edges(), 2);
        assert_eq!(sub.invariants(), fixtures::loop1().invariants());
        assert_eq!(map.midpoints.len(), 1);
    }

    #[test]
    fn subdivide_no_loops_is_identity() {
        let c3 = fixtures::c3();
        let (sub, map) = c3.subdivide_loops();
        assert_eq!(sub, c3);
        assert!(map.midpoints.is_empty());
    }

    #[test]
    fn subdivide_two_loops() {
        let g = Multigraph::from_parts(
            vec![("v".into(), 0)],
            vec![
                (
                    "e1".into(),
                    ("h1".into(), "v".into()),
                    ("h2".into(), "v".into()),
                    MonoidElement::new(vec![1]),
                ),
                (
                    "e2".into(),
                    ("h3".into(), "v".into()),
                    ("h4".into(), "v".into()),
                    MonoidElement::new(vec![1]),
                ),
            ],
        )
        .unwrap();
        let (sub, _) = g.subdivide_loops();
        assert_eq!(sub.n_vertices(), 3);
        assert_eq!(sub.n_edges(), 4);
        assert_eq!(sub.invariants().b1, 2);
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(fixtures::c3().automorphisms(8).unwrap().len(), 6);
        assert_eq!(fixtures::b2().automorphisms(8).unwrap().len(), 4);
        // B2 with N^2 lengths distinguishing the edges: only the vertex swap
        let g = Multigraph::from_parts(
            vec![("v1".into(), 0), ("v2".into(), 0)],
            vec![
                (
                    "e1".into(),
                    ("e1a".into(), "v1".into()),
                    ("e1b".into(), "v2".into()),
                    MonoidElement::new(vec![1, 0]),
                ),
                (
                    "e2".into(),
                    ("e2a".into(), "v1".into()),
                    ("e2b".into(), "v2".into()),
                    MonoidElement::new(vec![0, 1]),
                ),
            ],
        )
        .unwrap();
        assert_eq!(g.automorphisms(8).unwrap().len(), 2);
    }

    #[test]
    fn automorphisms_form_a_group() {
        for g in [fixtures::c3(), fixtures::b2(), fixtures::b3()] {
            let autos = g.automorphisms(8).unwrap();
            for a in &autos {
                for b in &autos {
                    let c = a.compose(b);
                    assert!(autos.contains(&c), "closed under composition");
                }
                // inverse exists
                let inv_exists = autos.iter().any(|b| {
                    let c = a.compose(b);
                    c.vertex_perm.iter().enumerate().all(|(i, &v)| i == v)
                        && c.edge_perm.iter().enumerate().all(|(i, &e)| i == e)
                });
                assert!(inv_exists);
            }
        }
    }

    #[test]
    fn automorphism_bound_enforced() {
        assert!(matches!(
            fixtures::c3().automorphisms(2),
            Err(Error::Bound(_))
        ));
    }
}
