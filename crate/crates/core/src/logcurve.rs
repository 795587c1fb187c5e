//! Vertical logarithmically semistable curves over the standard log point,
//! their dual complexes, twister line bundles, the log Picard quotient with a
//! finite torus model, the tropicalization map, and combinatorial ranks.
//!
//! A line bundle is modeled by one divisor class per component together with
//! one gluing datum per node, valued in a finite cyclic group standing in for
//! the multiplicative group of the base field. Gluing data never enters
//! effectivity; it is exactly the kernel of the quotient onto the complex
//! Picard group.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::complex::{self, ComplexClass, MetrizedComplex};
use crate::component::{ComponentClass, ComponentJson, ComponentModel, Torsion};
use crate::divisor::{self, compositions, GraphDivisor};
use crate::linalg;
use crate::monoid::{MonoidElement, MonoidHom};
use crate::{Error, Result};

/// Wire format for a log curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    #[serde(rename = "monoidRank")]
    pub monoid_rank: usize,
    pub components: BTreeMap<String, ComponentJson>,
    pub nodes: Vec<NodeJson>,
    #[serde(default)]
    pub marks: Vec<CurveMarkJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeJson {
    pub id: String,
    /// Two branch points as `[componentId, pointId]` pairs.
    pub branches: [(String, String); 2],
    pub length: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveMarkJson {
    pub component: String,
    pub point: String,
}

/// Wire format for a line bundle on a log curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleJson {
    pub classes: BTreeMap<String, ClassJson>,
    #[serde(default)]
    pub gluing: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassJson {
    pub degree: i64,
    #[serde(default)]
    pub torsion: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInfo {
    pub id: String,
    /// (component index, point index) for each branch.
    pub branches: [(usize, usize); 2],
    pub length: MonoidElement,
}

/// Nodal curve with component models and a log structure over N^k recorded
/// through the per-node smoothing parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogCurve {
    monoid_rank: usize,
    component_ids: Vec<String>,
    components: Vec<ComponentModel>,
    nodes: Vec<NodeInfo>,
    marks: Vec<(usize, usize)>,
}

impl LogCurve {
    pub fn new(
        monoid_rank: usize,
        components: Vec<(String, ComponentModel)>,
        nodes: Vec<(String, (String, String), (String, String), MonoidElement)>,
        marks: Vec<(String, String)>,
    ) -> Result<Self> {
        let mut comps: Vec<(String, ComponentModel)> = components;
        comps.sort_by(|a, b| a.0.cmp(&b.0));
        let component_ids: Vec<String> = comps.iter().map(|(id, _)| id.clone()).collect();
        let mut index = BTreeMap::new();
        for (i, id) in component_ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate component id {:?}", id)));
            }
        }
        let components: Vec<ComponentModel> = comps.into_iter().map(|(_, c)| c).collect();
        let mut node_infos = Vec::new();
        for (id, (c1, p1), (c2, p2), length) in nodes {
            let a = *index
                .get(&c1)
                .ok_or_else(|| Error::invalid(format!("node {:?} references unknown component {:?}", id, c1)))?;
            let b = *index
                .get(&c2)
                .ok_or_else(|| Error::invalid(format!("node {:?} references unknown component {:?}", id, c2)))?;
            let pa = components[a].point_index(&p1)?;
            let pb = components[b].point_index(&p2)?;
            node_infos.push(NodeInfo {
                id,
                branches: [(a, pa), (b, pb)],
                length,
            });
        }
        node_infos.sort_by(|a, b| a.id.cmp(&b.id));
        let mut node_ids = BTreeSet::new();
        let mut branch_points = BTreeSet::new();
        for node in &node_infos {
            if !node_ids.insert(node.id.clone()) {
                return Err(Error::invalid(format!("duplicate node id {:?}", node.id)));
            }
            if node.length.rank() != monoid_rank {
                return Err(Error::invalid(format!(
                    "node {:?} has length of rank {}, base monoid has rank {}",
                    node.id,
                    node.length.rank(),
                    monoid_rank
                )));
            }
            if node.length.is_zero() {
                return Err(Error::invalid(format!(
                    "node {:?} must have a nonzero smoothing parameter",
                    node.id
                )));
            }
            if node.branches[0] == node.branches[1] {
                return Err(Error::invalid(format!(
                    "node {:?} must join two distinct branch points",
                    node.id
                )));
            }
            for &branch in &node.branches {
                if !branch_points.insert(branch) {
                    return Err(Error::invalid(format!(
                        "branch points of distinct nodes must be distinct (node {:?})",
                        node.id
                    )));
                }
            }
        }
        let mut mark_list = Vec::new();
        let mut mark_set = BTreeSet::new();
        for (cid, pid) in marks {
            let c = *index
                .get(&cid)
                .ok_or_else(|| Error::invalid(format!("mark references unknown component {:?}", cid)))?;
            let p = components[c].point_index(&pid)?;
            if branch_points.contains(&(c, p)) {
                return Err(Error::invalid(format!(
                    "marked point {:?} collides with a branch point",
                    pid
                )));
            }
            if !mark_set.insert((c, p)) {
                return Err(Error::invalid("marked points must be distinct"));
            }
            mark_list.push((c, p));
        }
        mark_list.sort();
        // connectivity of the incidence graph
        let n = components.len();
        if n == 0 {
            return Err(Error::invalid("curve must have at least one component"));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for node in &node_infos {
            let (a, b) = (node.branches[0].0, node.branches[1].0);
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("curve must be connected"));
        }
        Ok(LogCurve {
            monoid_rank,
            component_ids,
            components,
            nodes: node_infos,
            marks: mark_list,
        })
    }

    pub fn from_json(json: &CurveJson) -> Result<Self> {
        let components = json
            .components
            .iter()
            .map(|(id, cj)| Ok((id.clone(), ComponentModel::from_json(cj)?)))
            .collect::<Result<Vec<_>>>()?;
        let nodes = json
            .nodes
            .iter()
            .map(|n| {
                (
                    n.id.clone(),
                    n.branches[0].clone(),
                    n.branches[1].clone(),
                    MonoidElement::new(n.length.clone()),
                )
            })
            .collect();
        let marks = json
            .marks
            .iter()
            .map(|m| (m.component.clone(), m.point.clone()))
            .collect();
        LogCurve::new(json.monoid_rank, components, nodes, marks)
    }

    pub fn to_json(&self) -> CurveJson {
        CurveJson {
            monoid_rank: self.monoid_rank,
            components: self
                .component_ids
                .iter()
                .zip(&self.components)
                .map(|(id, c)| (id.clone(), c.to_json()))
                .collect(),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson {
                    id: n.id.clone(),
                    branches: [
                        (
                            self.component_ids[n.branches[0].0].clone(),
                            self.components[n.branches[0].0]
                                .point_id(n.branches[0].1)
                                .to_string(),
                        ),
                        (
                            self.component_ids[n.branches[1].0].clone(),
                            self.components[n.branches[1].0]
                                .point_id(n.branches[1].1)
                                .to_string(),
                        ),
                    ],
                    length: n.length.coords.clone(),
                })
                .collect(),
            marks: self
                .marks
                .iter()
                .map(|&(c, p)| CurveMarkJson {
                    component: self.component_ids[c].clone(),
                    point: self.components[c].point_id(p).to_string(),
                })
                .collect(),
        }
    }

    pub fn monoid_rank(&self) -> usize {
        self.monoid_rank
    }

    pub fn component_ids(&self) -> &[String] {
        &self.component_ids
    }

    pub fn components(&self) -> &[ComponentModel] {
        &self.components
    }

    pub fn component_index(&self, id: &str) -> Result<usize> {
        self.component_ids
            .iter()
            .position(|c| c == id)
            .ok_or_else(|| Error::input(format!("unknown component {:?}", id)))
    }

    pub fn nodes(&self) -> &[NodeInfo] {
        &self.nodes
    }

    pub fn marks(&self) -> &[(usize, usize)] {
        &self.marks
    }

    pub fn is_vertical(&self) -> bool {
        self.marks.is_empty()
    }

    /// Semistable over the standard log point: base N and every node
    /// parameter equal to the generator.
    pub fn semistable(&self) -> bool {
        self.monoid_rank == 1
            && self
                .nodes
                .iter()
                .all(|n| n.length == MonoidElement::new(vec![1]))
    }

    pub fn genus(&self) -> i64 {
        let b1 = self.nodes.len() as i64 - self.components.len() as i64 + 1;
        b1 + self.components.iter().map(|c| c.genus() as i64).sum::<i64>()
    }

    pub fn b1(&self) -> i64 {
        self.nodes.len() as i64 - self.components.len() as i64 + 1
    }

    fn require_vertical(&self) -> Result<()> {
        if !self.is_vertical() {
            return Err(Error::input(
                "operation requires a vertical curve: marked points are carried as data only",
            ));
        }
        Ok(())
    }

    fn require_semistable(&self) -> Result<()> {
        if !self.semistable() {
            return Err(Error::unsupported(
                "operation requires a semistable curve (base N, every node parameter 1)",
            ));
        }
        Ok(())
    }
}

/// The metrized complex associated to a curve: dual graph from components and
/// nodes, lengths from the smoothing parameters, attachments at the branch
/// points, markings carried over.
pub fn to_complex(x: &LogCurve) -> Result<MetrizedComplex> {
    let vertices: Vec<(String, u32)> = x
        .component_ids
        .iter()
        .zip(&x.components)
        .map(|(id, c)| (id.clone(), c.genus()))
        .collect();
    let edges = x
        .nodes
        .iter()
        .map(|n| {
            (
                n.id.clone(),
                (format!("{}a", n.id), x.component_ids[n.branches[0].0].clone()),
                (format!("{}b", n.id), x.component_ids[n.branches[1].0].clone()),
                n.length.clone(),
            )
        })
        .collect();
    let graph = crate::graph::Multigraph::from_parts(vertices, edges)?;
    // graph vertices are sorted by id, as are curve components
    let components = x.components.clone();
    let mut attach = vec![[usize::MAX; 2]; graph.n_edges()];
    for node in &x.nodes {
        let (e, _) = graph.half_edge(&format!("{}a", node.id))?;
        attach[e] = [node.branches[0].1, node.branches[1].1];
    }
    MetrizedComplex::new(
        graph,
        components,
        attach,
        x.marks.clone(),
        Some(x.monoid_rank),
    )
}

/// The curve glued from a complex, together with the recorded base
/// homomorphism N^E -> P sending each edge generator to its length.
pub fn from_complex(cx: &MetrizedComplex) -> Result<(LogCurve, MonoidHom)> {
    let g = cx.graph();
    let components = (0..g.n_vertices())
        .map(|v| (g.vertex_id(v).to_string(), cx.component(v).clone()))
        .collect();
    let nodes = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            (
                edge.id.clone(),
                (
                    g.vertex_id(edge.halves[0].vertex).to_string(),
                    cx.component(edge.halves[0].vertex)
                        .point_id(cx.attachment(e, 0))
                        .to_string(),
                ),
                (
                    g.vertex_id(edge.halves[1].vertex).to_string(),
                    cx.component(edge.halves[1].vertex)
                        .point_id(cx.attachment(e, 1))
                        .to_string(),
                ),
                edge.length.clone(),
            )
        })
        .collect();
    let marks = cx
        .marks()
        .iter()
        .map(|&(v, p)| {
            (
                g.vertex_id(v).to_string(),
                cx.component(v).point_id(p).to_string(),
            )
        })
        .collect();
    let curve = LogCurve::new(cx.monoid_rank(), components, nodes, marks)?;
    let k = cx.monoid_rank();
    let matrix = (0..k)
        .map(|i| g.edges().iter().map(|e| e.length.coords[i]).collect())
        .collect();
    let hom = MonoidHom::new(g.n_edges(), k, matrix)?;
    Ok((curve, hom))
}

/// Finite cyclic stand-in for the multiplicative group of the base field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusModel {
    pub order: i64,
}

impl TorusModel {
    pub fn new(order: i64) -> Result<Self> {
        if order < 1 {
            return Err(Error::input("torus order must be >= 1"));
        }
        Ok(TorusModel { order })
    }

    fn reduce(&self, v: i64) -> i64 {
        v.rem_euclid(self.order)
    }
}

/// Line bundle model: one class per component and a gluing datum per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogLineBundle {
    pub classes: Vec<ComponentClass>,
    pub gluing: Vec<i64>,
}

impl LogLineBundle {
    pub fn trivial(x: &LogCurve) -> Self {
        LogLineBundle {
            classes: x
                .components
                .iter()
                .map(|c| ComponentClass {
                    degree: 0,
                    torsion: c.group().zero(),
                })
                .collect(),
            gluing: vec![0; x.nodes.len()],
        }
    }

    pub fn from_json(x: &LogCurve, json: &BundleJson) -> Result<Self> {
        let mut bundle = LogLineBundle::trivial(x);
        for (cid, class) in &json.classes {
            let c = x.component_index(cid)?;
            let group = x.components[c].group();
            bundle.classes[c] = ComponentClass {
                degree: class.degree,
                torsion: group.reduce(&class.torsion)?,
            };
        }
        for (nid, &g) in &json.gluing {
            let n = x
                .nodes
                .iter()
                .position(|node| &node.id == nid)
                .ok_or_else(|| Error::input(format!("unknown node {:?}", nid)))?;
            bundle.gluing[n] = g;
        }
        Ok(bundle)
    }

    pub fn to_json(&self, x: &LogCurve) -> BundleJson {
        BundleJson {
            classes: x
                .component_ids
                .iter()
                .zip(&self.classes)
                .map(|(id, c)| {
                    (
                        id.clone(),
                        ClassJson {
                            degree: c.degree,
                            torsion: c.torsion.residues.clone(),
                        },
                    )
                })
                .collect(),
            gluing: x
                .nodes
                .iter()
                .zip(&self.gluing)
                .filter(|(_, &g)| g != 0)
                .map(|(n, &g)| (n.id.clone(), g))
                .collect(),
        }
    }

    pub fn complex_class(&self) -> ComplexClass {
        ComplexClass {
            parts: self.classes.clone(),
        }
    }
}

pub fn tensor(x: &LogCurve, a: &LogLineBundle, b: &LogLineBundle) -> LogLineBundle {
    LogLineBundle {
        classes: (0..x.components.len())
            .map(|v| ComponentClass {
                degree: a.classes[v].degree + b.classes[v].degree,
                torsion: x.components[v]
                    .group()
                    .add(&a.classes[v].torsion, &b.classes[v].torsion),
            })
            .collect(),
        gluing: a.gluing.iter().zip(&b.gluing).map(|(x, y)| x + y).collect(),
    }
}

pub fn inverse(x: &LogCurve, a: &LogLineBundle) -> LogLineBundle {
    LogLineBundle {
        classes: (0..x.components.len())
            .map(|v| ComponentClass {
                degree: -a.classes[v].degree,
                torsion: x.components[v].group().neg(&a.classes[v].torsion),
            })
            .collect(),
        gluing: a.gluing.iter().map(|g| -g).collect(),
    }
}

/// Multidegree on the dual graph.
pub fn multidegree(x: &LogCurve, l: &LogLineBundle) -> GraphDivisor {
    let _ = x;
    GraphDivisor::new(l.classes.iter().map(|c| c.degree).collect())
}

pub fn degree(l: &LogLineBundle) -> i64 {
    l.classes.iter().map(|c| c.degree).sum()
}

/// The twister at component `v`: restrictions are the node divisors of the
/// neighbors, gluing is the identity in spanning-tree-normalized coordinates.
pub fn twister(x: &LogCurve, v: usize) -> Result<LogLineBundle> {
    x.require_vertical()?;
    x.require_semistable()?;
    if v >= x.components.len() {
        return Err(Error::input("unknown component"));
    }
    let cx = to_complex(x)?;
    let firing = complex::firing_vectors(&cx);
    Ok(LogLineBundle {
        classes: firing[v].parts.clone(),
        gluing: vec![0; x.nodes.len()],
    })
}

/// Canonical gluing form: identity on a deterministic spanning tree of the
/// dual graph, residuals on the remaining edges.
pub fn normalize_gluing(x: &LogCurve, l: &LogLineBundle, torus: &TorusModel) -> LogLineBundle {
    let n = x.components.len();
    let m = x.nodes.len();
    // spanning tree over nodes in id order (nodes are sorted by id)
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut in_tree = vec![false; m];
    let mut tree_adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (neighbor, node idx)
    for (e, node) in x.nodes.iter().enumerate() {
        let (a, b) = (node.branches[0].0, node.branches[1].0);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            in_tree[e] = true;
            tree_adj[a].push((b, e));
            tree_adj[b].push((a, e));
        }
    }
    // potentials along the tree from the least component
    let mut potential = vec![0i64; n];
    let mut known = vec![false; n];
    known[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &tree_adj[v] {
            if known[w] {
                continue;
            }
            let (a, b) = (x.nodes[e].branches[0].0, x.nodes[e].branches[1].0);
            // residual g_e + potential[a] - potential[b] must vanish on tree edges
            potential[w] = if w == b {
                torus.reduce(l.gluing[e] + potential[a])
            } else {
                torus.reduce(potential[b] - l.gluing[e])
            };
            known[w] = true;
            queue.push_back(w);
        }
    }
    let gluing = (0..m)
        .map(|e| {
            if in_tree[e] {
                0
            } else {
                let (a, b) = (x.nodes[e].branches[0].0, x.nodes[e].branches[1].0);
                torus.reduce(l.gluing[e] + potential[a] - potential[b])
            }
        })
        .collect();
    LogLineBundle {
        classes: l.classes.clone(),
        gluing,
    }
}

/// Equality in the log Picard model: component classes equivalent through
/// the twister lattice and identical normalized gluing.
pub fn log_class_equal(
    x: &LogCurve,
    a: &LogLineBundle,
    b: &LogLineBundle,
    torus: &TorusModel,
) -> Result<bool> {
    let cx = to_complex(x)?;
    if !complex::is_equivalent(&cx, &a.complex_class(), &b.complex_class())? {
        return Ok(false);
    }
    let na = normalize_gluing(x, a, torus);
    let nb = normalize_gluing(x, b, torus);
    Ok(na.gluing == nb.gluing)
}

/// Tropicalization of a bundle class: the q-reduced representative of its
/// multidegree in Pic(G).
pub fn tau(x: &LogCurve, l: &LogLineBundle) -> Result<GraphDivisor> {
    let cx = to_complex(x)?;
    Ok(divisor::q_reduce(cx.graph(), &multidegree(x, l), 0))
}

/// Combinatorial effectivity: every component restriction admits a section.
pub fn is_comb_effective(x: &LogCurve, l: &LogLineBundle) -> Result<bool> {
    for (c, class) in x.components.iter().zip(&l.classes) {
        if !crate::component::is_effective_class(c, class)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The relative log cotangent bundle: component classes A_v + K_v with
/// identity gluing; its degree is 2g - 2.
pub fn omega_log(x: &LogCurve) -> Result<LogLineBundle> {
    let cx = to_complex(x)?;
    let class = complex::canonical_class(&cx)?;
    Ok(LogLineBundle {
        classes: class.parts,
        gluing: vec![0; x.nodes.len()],
    })
}

/// Combinatorial rank, computed through the metrized-complex correspondence.
/// Independent of gluing data.
pub fn comb_rank(x: &LogCurve, l: &LogLineBundle) -> Result<i64> {
    x.require_vertical()?;
    x.require_semistable()?;
    let cx = to_complex(x)?;
    complex::rank(&cx, &l.complex_class())
}

/// Report of the kernel computation for the quotient onto the complex Picard
/// group.
#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub torus: i64,
    pub b1: i64,
    pub order: i64,
    pub expected: i64,
    pub invariants: Vec<i64>,
    pub full: bool,
}

/// Enumerates all gluing assignments with trivial component classes and
/// counts distinct normalized residuals: the kernel of the degree-0 log class
/// group onto degree-0 complex classes in the finite model. The order must
/// equal torus^b1.
pub fn quotient_kernel(x: &LogCurve, torus: &TorusModel) -> Result<KernelReport> {
    let m = torus.order;
    let e = x.nodes.len();
    let b1 = x.b1();
    let total = (m as u64).checked_pow(e as u32).unwrap_or(u64::MAX);
    if total > 1_000_000 {
        return Err(Error::bound(
            "kernel enumeration limited to torus^edges <= 1e6",
        ));
    }
    let mut residuals = BTreeSet::new();
    let mut assignment = vec![0i64; e];
    loop {
        let bundle = LogLineBundle {
            classes: LogLineBundle::trivial(x).classes,
            gluing: assignment.clone(),
        };
        let normalized = normalize_gluing(x, &bundle, torus);
        residuals.insert(normalized.gluing);
        // next assignment in Z_m^e
        let mut i = 0;
        loop {
            if i == e {
                let order = residuals.len() as i64;
                let expected = (0..b1).fold(1i64, |acc, _| acc * m);
                let full = order == expected;
                let invariants = if full && m > 1 {
                    vec![m; b1 as usize]
                } else if full {
                    Vec::new()
                } else {
                    Vec::new()
                };
                return Ok(KernelReport {
                    torus: m,
                    b1,
                    order,
                    expected,
                    invariants,
                    full,
                });
            }
            assignment[i] += 1;
            if assignment[i] < m {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

/// Effectivity of a complex class decided through the Smith solver rather
/// than the burning-based engine: search all non-negative multidegrees in the
/// right lattice coset and check the forced torsion residuals. This is the
/// independent route used by the direct rank computation.
struct SnfEffectivity {
    cx: MetrizedComplex,
    firing: Vec<ComplexClass>,
    decomposition: linalg::SmithDecomposition,
    memo: HashMap<(Vec<i64>, Vec<i64>), bool>,
}

impl SnfEffectivity {
    fn new(cx: MetrizedComplex) -> Self {
        let firing = complex::firing_vectors(&cx);
        let lap = cx.graph().laplacian();
        let decomposition = linalg::smith_normal_form(&lap);
        SnfEffectivity {
            cx,
            firing,
            decomposition,
            memo: HashMap::new(),
        }
    }

    fn effective(&mut self, class: &ComplexClass) -> Result<bool> {
        let key = (
            class.parts.iter().map(|p| p.degree).collect::<Vec<_>>(),
            class
                .parts
                .iter()
                .flat_map(|p| p.torsion.residues.iter().copied())
                .collect::<Vec<_>>(),
        );
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let n = self.cx.components().len();
        let d = class.degree();
        let mut found = false;
        if d >= 0 {
            'mdeg: for m in compositions(n, d) {
                let rhs: Vec<BigInt> = (0..n)
                    .map(|v| BigInt::from(class.parts[v].degree - m[v]))
                    .collect();
                let solved = linalg::solve_with_decomposition(
                    &self.decomposition,
                    n,
                    n,
                    &rhs,
                )?;
                let Some(steps) = solved else { continue };
                // residual torsion of class - sum_u steps_u F_u at each vertex
                for v in 0..n {
                    let model = self.cx.component(v);
                    if model.genus() == 1 && m[v] == 0 {
                        let group = model.group();
                        let mut residual = class.parts[v].torsion.clone();
                        for (u, step) in steps.iter().enumerate() {
                            let shift = scale_by_bigint(
                                group,
                                &self.firing[u].parts[v].torsion,
                                step,
                            );
                            residual = group.sub(&residual, &shift);
                        }
                        if !residual.is_zero() {
                            continue 'mdeg;
                        }
                    }
                }
                found = true;
                break;
            }
        }
        self.memo.insert(key, found);
        Ok(found)
    }
}

fn scale_by_bigint(group: &crate::component::AbelianGroup, t: &Torsion, k: &BigInt) -> Torsion {
    Torsion {
        residues: t
            .residues
            .iter()
            .zip(group.factors())
            .map(|(&r, &f)| {
                let kf = i64::try_from(k % BigInt::from(f)).expect("reduced residue fits in i64");
                (r * kf).rem_euclid(f)
            })
            .collect(),
    }
}

/// Direct evaluation of the combinatorial rank: iterate r and quantify over
/// all combinatorially effective test bundles of degree r, including gluing
/// choices in the finite torus, with effectivity decided by the Smith-solver
/// route. Loops are subdivided first, exactly as in `comb_rank`, with which
/// this must agree.
pub fn comb_rank_direct(x: &LogCurve, l: &LogLineBundle, torus: &TorusModel) -> Result<i64> {
    x.require_vertical()?;
    x.require_semistable()?;
    let cx = to_complex(x)?;
    if cx.max_component_genus() >= 2 {
        return Err(Error::unsupported(
            "divisor-class calculus requires all components of genus <= 1",
        ));
    }
    let (sub, mapping) = complex::subdivide_loops(&cx);
    let (x_sub, _) = from_complex(&sub)?;
    let class0 = complex::push_class(&sub, &mapping, &l.complex_class());
    let pushed = LogLineBundle {
        classes: class0.parts.clone(),
        gluing: vec![0; x_sub.nodes().len()],
    };
    let mut oracle = SnfEffectivity::new(sub.clone());
    if !oracle.effective(&class0)? {
        return Ok(-1);
    }
    let n_edges = x_sub.nodes().len();
    let gluing_choices = gluing_samples(torus.order, n_edges, 32);
    let mut r = 1i64;
    loop {
        for test_class in complex::effective_test_classes(&sub, r) {
            let mut outcome: Option<bool> = None;
            for gluing in &gluing_choices {
                let test_bundle = LogLineBundle {
                    classes: test_class.parts.clone(),
                    gluing: gluing.clone(),
                };
                let quotient = tensor(&x_sub, &pushed, &inverse(&x_sub, &test_bundle));
                let normalized = normalize_gluing(&x_sub, &quotient, torus);
                let eff = oracle.effective(&ComplexClass {
                    parts: normalized.classes.clone(),
                })?;
                match outcome {
                    None => outcome = Some(eff),
                    Some(prev) => {
                        if prev != eff {
                            return Err(Error::invalid(
                                "gluing data affected effectivity; the model is inconsistent",
                            ));
                        }
                    }
                }
            }
            if outcome == Some(false) {
                return Ok(r - 1);
            }
        }
        r += 1;
    }
}

/// Deterministic sample of gluing vectors in Z_m^e: exhaustive when small,
/// otherwise zero plus single-coordinate probes.
fn gluing_samples(m: i64, e: usize, cap: usize) -> Vec<Vec<i64>> {
    let total = (m as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
    if total <= cap as u128 {
        let mut out = Vec::new();
        let mut assignment = vec![0i64; e];
        loop {
            out.push(assignment.clone());
            let mut i = 0;
            loop {
                if i == e {
                    return out;
                }
                assignment[i] += 1;
                if assignment[i] < m {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
        }
    }
    let mut out = vec![vec![0i64; e]];
    'fill: for i in 0..e {
        for v in 1..m {
            if out.len() >= cap {
                break 'fill;
            }
            let mut g = vec![0i64; e];
            g[i] = v;
            out.push(g);
        }
    }
    out
}
