//! Metrized curve complexes: a connected multigraph with a smooth-component
//! model at every vertex and a choice of distinct attachment points per
//! half-edge, plus the divisor calculus generated by component equivalence
//! and chip-firing lifts.
//!
//! Ranks are computed on the loop-subdivided complex (each loop gains a
//! midpoint rational component), which is the semantics under which the
//! Riemann–Roch identity holds; `rank_naive` keeps the unsubdivided reading
//! for comparison.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::component::{
    self, AbelianGroup, ComponentClass, ComponentDivisor, ComponentJson, ComponentModel, Torsion,
};
use crate::divisor::{self, compositions, GraphDivisor};
use crate::graph::{GraphJson, Multigraph};
use crate::{Error, Result};

/// Wire format for a metrized curve complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub graph: GraphJson,
    pub components: BTreeMap<String, ComponentJson>,
    pub attach: BTreeMap<String, String>,
    #[serde(default)]
    pub marks: Vec<ComplexMarkJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMarkJson {
    pub vertex: String,
    pub point: String,
}

/// Metrized curve complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetrizedComplex {
    graph: Multigraph,
    components: Vec<ComponentModel>,
    /// Attachment point index per edge side, parallel to `graph.edges()`.
    attach: Vec<[usize; 2]>,
    /// (vertex, point) marks, sorted.
    marks: Vec<(usize, usize)>,
    /// Ambient monoid rank; equals the graph's rank when edges exist, and is
    /// carried explicitly so edgeless complexes remember their base monoid.
    monoid_rank: usize,
}

impl MetrizedComplex {
    pub fn new(
        graph: Multigraph,
        components: Vec<ComponentModel>,
        attach: Vec<[usize; 2]>,
        mut marks: Vec<(usize, usize)>,
        monoid_rank: Option<usize>,
    ) -> Result<Self> {
        if components.len() != graph.n_vertices() {
            return Err(Error::invalid("one component model per vertex required"));
        }
        for (v, c) in components.iter().enumerate() {
            if graph.weight(v) != c.genus() {
                return Err(Error::invalid(format!(
                    "vertex {:?} has weight {} but its component has genus {}",
                    graph.vertex_id(v),
                    graph.weight(v),
                    c.genus()
                )));
            }
        }
        if attach.len() != graph.n_edges() {
            return Err(Error::invalid(
                "the attachment map must assign a point to every half-edge",
            ));
        }
        let mut seen: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); graph.n_vertices()];
        for (e, sides) in attach.iter().enumerate() {
            for side in 0..2 {
                let v = graph.half_vertex(e, side);
                let p = sides[side];
                if p >= components[v].points().len() {
                    return Err(Error::invalid("attachment references an unknown point"));
                }
                if !seen[v].insert(p) {
                    return Err(Error::invalid(format!(
                        "attachment points at vertex {:?} must be distinct closed points ({:?} reused)",
                        graph.vertex_id(v),
                        components[v].point_id(p)
                    )));
                }
            }
        }
        marks.sort();
        let mut mark_set = BTreeSet::new();
        for &(v, p) in &marks {
            if v >= graph.n_vertices() || p >= components[v].points().len() {
                return Err(Error::invalid("mark references an unknown point"));
            }
            if seen[v].contains(&p) {
                return Err(Error::invalid(format!(
                    "marked point {:?} on vertex {:?} collides with an attachment point",
                    components[v].point_id(p),
                    graph.vertex_id(v)
                )));
            }
            if !mark_set.insert((v, p)) {
                return Err(Error::invalid("marked points must be distinct"));
            }
        }
        let monoid_rank = match monoid_rank {
            Some(k) => {
                if graph.n_edges() > 0 && k != graph.monoid_rank() {
                    return Err(Error::invalid(
                        "ambient monoid rank conflicts with edge lengths",
                    ));
                }
                k
            }
            None => graph.monoid_rank(),
        };
        Ok(MetrizedComplex {
            graph,
            components,
            attach,
            marks,
            monoid_rank,
        })
    }

    pub fn from_json(json: &ComplexJson) -> Result<Self> {
        let graph = Multigraph::from_json(&json.graph)?;
        let mut components = Vec::with_capacity(graph.n_vertices());
        for v in 0..graph.n_vertices() {
            let id = graph.vertex_id(v);
            let cj = json
                .components
                .get(id)
                .ok_or_else(|| Error::invalid(format!("missing component model for vertex {:?}", id)))?;
            components.push(ComponentModel::from_json(cj)?);
        }
        for id in json.components.keys() {
            graph.vertex_index(id).map_err(|_| {
                Error::invalid(format!("component model for unknown vertex {:?}", id))
            })?;
        }
        let mut attach = vec![[usize::MAX; 2]; graph.n_edges()];
        for (half_id, point_id) in &json.attach {
            let (e, side) = graph.half_edge(half_id)?;
            let v = graph.half_vertex(e, side);
            attach[e][side] = components[v].point_index(point_id)?;
        }
        for (e, sides) in attach.iter().enumerate() {
            for side in 0..2 {
                if sides[side] == usize::MAX {
                    return Err(Error::invalid(format!(
                        "half-edge {:?} has no attachment point",
                        json.graph
                            .edges
                            .get(e)
                            .map(|ej| ej.halves[side].0.clone())
                            .unwrap_or_default()
                    )));
                }
            }
        }
        let mut marks = Vec::new();
        for m in &json.marks {
            let v = graph.vertex_index(&m.vertex)?;
            let p = components[v].point_index(&m.point)?;
            marks.push((v, p));
        }
        MetrizedComplex::new(graph, components, attach, marks, None)
    }

    pub fn to_json(&self) -> ComplexJson {
        let mut attach = BTreeMap::new();
        for (e, sides) in self.attach.iter().enumerate() {
            for side in 0..2 {
                let half_id = self.graph.edges()[e].halves[side].id.clone();
                let v = self.graph.half_vertex(e, side);
                attach.insert(half_id, self.components[v].point_id(sides[side]).to_string());
            }
        }
        ComplexJson {
            graph: self.graph.to_json(),
            components: self
                .components
                .iter()
                .enumerate()
                .map(|(v, c)| (self.graph.vertex_id(v).to_string(), c.to_json()))
                .collect(),
            attach,
            marks: self
                .marks
                .iter()
                .map(|&(v, p)| ComplexMarkJson {
                    vertex: self.graph.vertex_id(v).to_string(),
                    point: self.components[v].point_id(p).to_string(),
                })
                .collect(),
        }
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn component(&self, v: usize) -> &ComponentModel {
        &self.components[v]
    }

    pub fn components(&self) -> &[ComponentModel] {
        &self.components
    }

    pub fn attachment(&self, edge: usize, side: usize) -> usize {
        self.attach[edge][side]
    }

    pub fn marks(&self) -> &[(usize, usize)] {
        &self.marks
    }

    pub fn monoid_rank(&self) -> usize {
        self.monoid_rank
    }

    pub fn genus(&self) -> i64 {
        self.graph.invariants().genus
    }

    pub fn all_rational(&self) -> bool {
        self.components.iter().all(|c| c.genus() == 0)
    }

    pub fn max_component_genus(&self) -> u32 {
        self.components.iter().map(|c| c.genus()).max().unwrap_or(0)
    }

    /// Attachment divisor A_v: all attachment points at `v`, each once.
    pub fn attachment_divisor(&self, v: usize) -> ComponentDivisor {
        let mut d = ComponentDivisor::empty();
        for (e, sides) in self.attach.iter().enumerate() {
            for side in 0..2 {
                if self.graph.half_vertex(e, side) == v {
                    d.push(sides[side], 1);
                }
            }
        }
        d
    }

    pub fn zero_class(&self) -> ComplexClass {
        ComplexClass {
            parts: self
                .components
                .iter()
                .map(|c| ComponentClass {
                    degree: 0,
                    torsion: c.group().zero(),
                })
                .collect(),
        }
    }

    pub fn class_add(&self, a: &ComplexClass, b: &ComplexClass) -> ComplexClass {
        ComplexClass {
            parts: (0..self.components.len())
                .map(|v| ComponentClass {
                    degree: a.parts[v].degree + b.parts[v].degree,
                    torsion: self.components[v]
                        .group()
                        .add(&a.parts[v].torsion, &b.parts[v].torsion),
                })
                .collect(),
        }
    }

    pub fn class_sub(&self, a: &ComplexClass, b: &ComplexClass) -> ComplexClass {
        ComplexClass {
            parts: (0..self.components.len())
                .map(|v| ComponentClass {
                    degree: a.parts[v].degree - b.parts[v].degree,
                    torsion: self.components[v]
                        .group()
                        .sub(&a.parts[v].torsion, &b.parts[v].torsion),
                })
                .collect(),
        }
    }

    pub fn class_neg(&self, a: &ComplexClass) -> ComplexClass {
        self.class_sub(&self.zero_class(), a)
    }

    pub fn class_scale(&self, a: &ComplexClass, k: i64) -> ComplexClass {
        ComplexClass {
            parts: (0..self.components.len())
                .map(|v| ComponentClass {
                    degree: a.parts[v].degree * k,
                    torsion: self.components[v].group().scale(&a.parts[v].torsion, k),
                })
                .collect(),
        }
    }
}

/// Per-vertex component divisors; the induced graph divisor is the tuple of
/// degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexDivisor {
    pub parts: Vec<ComponentDivisor>,
}

impl ComplexDivisor {
    pub fn empty(cx: &MetrizedComplex) -> Self {
        ComplexDivisor {
            parts: vec![ComponentDivisor::empty(); cx.components().len()],
        }
    }

    pub fn degree(&self) -> i64 {
        self.parts.iter().map(ComponentDivisor::degree).sum()
    }

    pub fn multidegree(&self) -> GraphDivisor {
        GraphDivisor::new(self.parts.iter().map(ComponentDivisor::degree).collect())
    }

    pub fn is_effective(&self) -> bool {
        self.parts.iter().all(ComponentDivisor::is_effective)
    }

    pub fn from_map(
        cx: &MetrizedComplex,
        map: &BTreeMap<String, BTreeMap<String, i64>>,
    ) -> Result<Self> {
        let mut parts = vec![ComponentDivisor::empty(); cx.components().len()];
        for (vid, entries) in map {
            let v = cx.graph().vertex_index(vid)?;
            parts[v] = ComponentDivisor::from_map(cx.component(v), entries)?;
        }
        Ok(ComplexDivisor { parts })
    }

    pub fn to_map(&self, cx: &MetrizedComplex) -> BTreeMap<String, BTreeMap<String, i64>> {
        self.parts
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.multiplicities.is_empty())
            .map(|(v, d)| {
                (
                    cx.graph().vertex_id(v).to_string(),
                    d.to_map(cx.component(v)),
                )
            })
            .collect()
    }
}

/// Per-vertex (degree, torsion) classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComplexClass {
    pub parts: Vec<ComponentClass>,
}

impl ComplexClass {
    pub fn degree(&self) -> i64 {
        self.parts.iter().map(|p| p.degree).sum()
    }

    pub fn multidegree(&self) -> GraphDivisor {
        GraphDivisor::new(self.parts.iter().map(|p| p.degree).collect())
    }
}

/// Componentwise class of a divisor.
pub fn class_of(cx: &MetrizedComplex, d: &ComplexDivisor) -> Result<ComplexClass> {
    let parts = d
        .parts
        .iter()
        .enumerate()
        .map(|(v, dv)| component::class_of(cx.component(v), dv))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexClass { parts })
}

/// Firing vectors F_v as complex classes: firing `v` subtracts the class of
/// all attachment points at `v` and adds, at each neighbor, the class of the
/// corresponding edge endpoints. Loop edges net to zero. The F_v sum to zero.
pub fn firing_vectors(cx: &MetrizedComplex) -> Vec<ComplexClass> {
    let n = cx.components().len();
    let g = cx.graph();
    (0..n)
        .map(|u| {
            let mut parts: Vec<ComponentClass> = (0..n)
                .map(|v| ComponentClass {
                    degree: 0,
                    torsion: cx.component(v).group().zero(),
                })
                .collect();
            for (e, sides) in cx.attach.iter().enumerate() {
                let (a, b) = (g.half_vertex(e, 0), g.half_vertex(e, 1));
                if a == u && b == u {
                    continue;
                }
                let (mine, theirs, w) = if a == u {
                    (sides[0], sides[1], b)
                } else if b == u {
                    (sides[1], sides[0], a)
                } else {
                    continue;
                };
                parts[u].degree -= 1;
                parts[u].torsion = cx
                    .component(u)
                    .group()
                    .sub(&parts[u].torsion, cx.component(u).point_class(mine));
                parts[w].degree += 1;
                parts[w].torsion = cx
                    .component(w)
                    .group()
                    .add(&parts[w].torsion, cx.component(w).point_class(theirs));
            }
            ComplexClass { parts }
        })
        .collect()
}

fn require_rankable(cx: &MetrizedComplex) -> Result<()> {
    if cx.max_component_genus() >= 2 {
        return Err(Error::unsupported(
            "divisor-class calculus requires all components of genus <= 1",
        ));
    }
    Ok(())
}

fn require_unmarked(cx: &MetrizedComplex) -> Result<()> {
    if !cx.marks().is_empty() {
        return Err(Error::input(
            "rank is not defined in the presence of marked points",
        ));
    }
    Ok(())
}

type CanonKey = (Vec<i64>, Vec<i64>);

/// Rank and effectivity engine over a fixed complex. States are canonical
/// class forms: the q-reduced multidegree together with the torsion residues
/// transported along the reduction certificate. Well-defined because the
/// firing vectors sum to zero.
#[derive(Debug, Clone)]
pub struct ComplexRankEngine {
    cx: MetrizedComplex,
    firing: Vec<ComplexClass>,
    memo: HashMap<CanonKey, i64>,
    effective_index: HashMap<i64, HashMap<Vec<i64>, Vec<(Vec<i64>, Vec<i64>)>>>,
    all_rational: bool,
}

impl ComplexRankEngine {
    pub fn new(cx: MetrizedComplex) -> Result<Self> {
        require_rankable(&cx)?;
        let firing = firing_vectors(&cx);
        let all_rational = cx.all_rational();
        Ok(ComplexRankEngine {
            cx,
            firing,
            memo: HashMap::new(),
            effective_index: HashMap::new(),
            all_rational,
        })
    }

    pub fn complex(&self) -> &MetrizedComplex {
        &self.cx
    }

    /// Canonical form of a class: reduce the multidegree, transport torsion.
    pub fn canonicalize(&self, class: &ComplexClass) -> ComplexClass {
        let mdeg = class.multidegree();
        let (reduced, cert) = divisor::q_reduce_with_cert(self.cx.graph(), &mdeg, 0);
        let n = self.cx.components().len();
        let transport = |cert: &[i64], v: usize| {
            let group = self.cx.component(v).group();
            let mut torsion = class.parts[v].torsion.clone();
            for (u, &steps) in cert.iter().enumerate() {
                if steps != 0 {
                    torsion =
                        group.add(&torsion, &group.scale(&self.firing[u].parts[v].torsion, steps));
                }
            }
            torsion
        };
        let parts: Vec<ComponentClass> = (0..n)
            .map(|v| ComponentClass {
                degree: reduced.get(v),
                torsion: transport(&cert, v),
            })
            .collect();
        // the certificate is only determined up to the all-ones vector; the
        // transported torsion must not depend on that choice
        debug_assert!({
            let shifted: Vec<i64> = cert.iter().map(|c| c + 1).collect();
            (0..n).all(|v| transport(&shifted, v) == parts[v].torsion)
        });
        ComplexClass { parts }
    }

    fn key_of(class: &ComplexClass) -> CanonKey {
        let mdeg = class.parts.iter().map(|p| p.degree).collect();
        let torsion = class
            .parts
            .iter()
            .flat_map(|p| p.torsion.residues.iter().copied())
            .collect();
        (mdeg, torsion)
    }

    /// Two classes are equivalent iff their canonical forms coincide.
    pub fn equivalent(&self, a: &ComplexClass, b: &ComplexClass) -> bool {
        Self::key_of(&self.canonicalize(a)) == Self::key_of(&self.canonicalize(b))
    }

    /// Does the class of `canonical` (assumed canonical) contain a
    /// componentwise effective representative?
    fn has_effective_canonical(&mut self, canonical: &ComplexClass) -> bool {
        let degree = canonical.degree();
        if degree < 0 {
            return false;
        }
        if self.all_rational {
            // torsion groups are trivial; the graph-level criterion decides
            return canonical.parts[0].degree >= 0;
        }
        self.ensure_index(degree);
        let mdeg: Vec<i64> = canonical.parts.iter().map(|p| p.degree).collect();
        let Some(candidates) = self.effective_index[&degree].get(&mdeg) else {
            return false;
        };
        let n = self.cx.components().len();
        'candidate: for (m, cert) in candidates {
            for v in 0..n {
                let model = self.cx.component(v);
                if model.genus() == 1 && m[v] == 0 {
                    let group = model.group();
                    let mut residual = canonical.parts[v].torsion.clone();
                    for (u, &steps) in cert.iter().enumerate() {
                        if steps != 0 {
                            residual = group
                                .sub(&residual, &group.scale(&self.firing[u].parts[v].torsion, steps));
                        }
                    }
                    if !residual.is_zero() {
                        continue 'candidate;
                    }
                }
            }
            return true;
        }
        false
    }

    /// Groups all effective multidegrees of the given degree by their reduced
    /// form, with reduction certificates.
    fn ensure_index(&mut self, degree: i64) {
        if self.effective_index.contains_key(&degree) {
            return;
        }
        let n = self.cx.components().len();
        let mut groups: HashMap<Vec<i64>, Vec<(Vec<i64>, Vec<i64>)>> = HashMap::new();
        for m in compositions(n, degree) {
            let (reduced, cert) =
                divisor::q_reduce_with_cert(self.cx.graph(), &GraphDivisor::new(m.clone()), 0);
            groups
                .entry(reduced.into_coeffs())
                .or_default()
                .push((m, cert));
        }
        self.effective_index.insert(degree, groups);
    }

    pub fn has_effective_rep(&mut self, class: &ComplexClass) -> bool {
        let canonical = self.canonicalize(class);
        self.has_effective_canonical(&canonical)
    }

    pub fn rank(&mut self, class: &ComplexClass) -> i64 {
        let canonical = self.canonicalize(class);
        self.rank_canonical(canonical)
    }

    fn rank_canonical(&mut self, canonical: ComplexClass) -> i64 {
        let key = Self::key_of(&canonical);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let value = if !self.has_effective_canonical(&canonical) {
            -1
        } else {
            let n = self.cx.components().len();
            let mut best = i64::MAX;
            'outer: for v in 0..n {
                let group = self.cx.component(v).group().clone();
                let torsions = if self.cx.component(v).genus() == 1 {
                    group.elements()
                } else {
                    vec![group.zero()]
                };
                for t in torsions {
                    let mut child = canonical.clone();
                    child.parts[v].degree -= 1;
                    child.parts[v].torsion = group.sub(&child.parts[v].torsion, &t);
                    let child = self.canonicalize(&child);
                    best = best.min(self.rank_canonical(child));
                    if best == -1 {
                        break 'outer;
                    }
                }
            }
            1 + best
        };
        self.memo.insert(key, value);
        value
    }
}

/// Mapping data for a loop subdivision of a complex.
#[derive(Debug, Clone)]
pub struct ComplexSubdivision {
    pub vertex_map: Vec<usize>,
}

/// Replaces every loop by two edges through a fresh rational component with
/// exactly two roster points, both attachments. Genus is preserved.
pub fn subdivide_loops(cx: &MetrizedComplex) -> (MetrizedComplex, ComplexSubdivision) {
    let (sub_graph, mapping) = cx.graph().subdivide_loops();
    let mut components: Vec<Option<ComponentModel>> = vec![None; sub_graph.n_vertices()];
    for (old, &new) in mapping.vertex_map.iter().enumerate() {
        components[new] = Some(cx.component(old).clone());
    }
    for &(_, mid) in &mapping.midpoints {
        components[mid] = Some(
            ComponentModel::genus_zero(&["a", "b"]).expect("midpoint component is valid"),
        );
    }
    let components: Vec<ComponentModel> = components.into_iter().map(Option::unwrap).collect();
    let mut attach = Vec::with_capacity(sub_graph.n_edges());
    for (new_e, origin) in mapping.edge_origin.iter().enumerate() {
        match origin {
            crate::graph::EdgeOrigin::Old(old) => attach.push(cx.attach[*old]),
            crate::graph::EdgeOrigin::LoopHalf { old_edge, side } => {
                // halves[1] of a loop half is the fresh half at the midpoint
                let mid_vertex = sub_graph.half_vertex(new_e, 1);
                let mid_point = components[mid_vertex]
                    .point_index(if *side == 0 { "a" } else { "b" })
                    .unwrap();
                attach.push([cx.attach[*old_edge][*side], mid_point]);
            }
        }
    }
    let marks = cx
        .marks
        .iter()
        .map(|&(v, p)| (mapping.vertex_map[v], p))
        .collect();
    let sub = MetrizedComplex::new(
        sub_graph,
        components,
        attach,
        marks,
        Some(cx.monoid_rank()),
    )
    .expect("loop subdivision of a valid complex is valid");
    (
        sub,
        ComplexSubdivision {
            vertex_map: mapping.vertex_map,
        },
    )
}

/// Pushes a class onto the subdivided complex; midpoint components carry the
/// zero class.
pub fn push_class(
    sub: &MetrizedComplex,
    mapping: &ComplexSubdivision,
    class: &ComplexClass,
) -> ComplexClass {
    let mut parts: Vec<ComponentClass> = (0..sub.components().len())
        .map(|v| ComponentClass {
            degree: 0,
            torsion: sub.component(v).group().zero(),
        })
        .collect();
    for (old, &new) in mapping.vertex_map.iter().enumerate() {
        parts[new] = class.parts[old].clone();
    }
    ComplexClass { parts }
}

/// Rank computer on the loop-subdivided complex.
#[derive(Debug, Clone)]
pub struct ComplexRank {
    engine: ComplexRankEngine,
    mapping: ComplexSubdivision,
}

impl ComplexRank {
    pub fn new(cx: &MetrizedComplex) -> Result<Self> {
        require_rankable(cx)?;
        require_unmarked(cx)?;
        let (sub, mapping) = subdivide_loops(cx);
        Ok(ComplexRank {
            engine: ComplexRankEngine::new(sub)?,
            mapping,
        })
    }

    pub fn subdivided(&self) -> &MetrizedComplex {
        self.engine.complex()
    }

    pub fn rank(&mut self, class: &ComplexClass) -> i64 {
        let pushed = push_class(self.engine.complex(), &self.mapping, class);
        self.engine.rank(&pushed)
    }
}

/// Rank of a divisor class, computed on the loop-subdivided complex.
pub fn rank(cx: &MetrizedComplex, class: &ComplexClass) -> Result<i64> {
    Ok(ComplexRank::new(cx)?.rank(class))
}

/// The literal unsubdivided rank; equals `rank` on loopless complexes.
pub fn rank_naive(cx: &MetrizedComplex, class: &ComplexClass) -> Result<i64> {
    require_rankable(cx)?;
    require_unmarked(cx)?;
    let mut engine = ComplexRankEngine::new(cx.clone())?;
    Ok(engine.rank(class))
}

pub fn rank_of_divisor(cx: &MetrizedComplex, d: &ComplexDivisor) -> Result<i64> {
    let class = class_of(cx, d)?;
    rank(cx, &class)
}

/// Equivalence of classes under component equivalence and chip-firing lifts.
pub fn is_equivalent(cx: &MetrizedComplex, a: &ComplexClass, b: &ComplexClass) -> Result<bool> {
    let engine = ComplexRankEngine::new(cx.clone())?;
    Ok(engine.equivalent(a, b))
}

/// Does the class contain a componentwise effective representative?
pub fn has_effective_rep(cx: &MetrizedComplex, class: &ComplexClass) -> Result<bool> {
    let mut engine = ComplexRankEngine::new(cx.clone())?;
    Ok(engine.has_effective_rep(class))
}

/// Canonical class K = sum_v (A_v + K_v); total degree 2g - 2.
pub fn canonical_class(cx: &MetrizedComplex) -> Result<ComplexClass> {
    require_rankable(cx)?;
    let n = cx.components().len();
    let mut parts = Vec::with_capacity(n);
    for v in 0..n {
        let model = cx.component(v);
        let a_class = component::class_of(model, &cx.attachment_divisor(v))?;
        let k_v = component::canonical_class(model)?;
        parts.push(ComponentClass {
            degree: a_class.degree + k_v.degree,
            torsion: model.group().add(&a_class.torsion, &k_v.torsion),
        });
    }
    Ok(ComplexClass { parts })
}

/// Canonical class together with a concrete representative. K_v on a
/// rational component is realized as -2 times its least roster point, so a
/// rational component with an empty roster cannot carry the representative.
pub fn canonical(cx: &MetrizedComplex) -> Result<(ComplexClass, ComplexDivisor)> {
    let class = canonical_class(cx)?;
    let mut rep = ComplexDivisor::empty(cx);
    for v in 0..cx.components().len() {
        let model = cx.component(v);
        rep.parts[v] = cx.attachment_divisor(v);
        if model.genus() == 0 {
            if model.points().is_empty() {
                return Err(Error::invalid(format!(
                    "cannot represent the canonical divisor: rational component {:?} has no points",
                    cx.graph().vertex_id(v)
                )));
            }
            rep.parts[v].push(0, -2);
        }
        // genus 1: K_v has the trivial class, represented by the empty divisor
    }
    Ok((class, rep))
}

fn test_torsions(model: &ComponentModel) -> Vec<Torsion> {
    if model.genus() == 1 {
        model.group().elements()
    } else {
        vec![model.group().zero()]
    }
}

/// Effective test classes of the given degree: non-negative multidegrees with
/// torsion ranging over the full group wherever the multidegree is positive.
pub fn effective_test_classes(cx: &MetrizedComplex, degree: i64) -> Vec<ComplexClass> {
    let n = cx.components().len();
    let mut out = Vec::new();
    for m in compositions(n, degree) {
        let mut partials: Vec<Vec<ComponentClass>> = vec![Vec::new()];
        for v in 0..n {
            let model = cx.component(v);
            let torsions = if m[v] >= 1 {
                test_torsions(model)
            } else {
                vec![model.group().zero()]
            };
            let mut next = Vec::with_capacity(partials.len() * torsions.len());
            for p in &partials {
                for t in &torsions {
                    let mut q = p.clone();
                    q.push(ComponentClass {
                        degree: m[v],
                        torsion: t.clone(),
                    });
                    next.push(q);
                }
            }
            partials = next;
        }
        out.extend(partials.into_iter().map(|parts| ComplexClass { parts }));
    }
    out
}

/// Data of a complex automorphism: a graph automorphism refined to
/// half-edges, a point bijection per vertex, and for genus-1 components a
/// group isomorphism with translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexAutomorphism {
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
    /// Image of each half-edge (edge, side) -> (edge', side').
    pub half_perm: Vec<[(usize, usize); 2]>,
    /// Per source vertex: roster index -> roster index at the image vertex.
    pub point_maps: Vec<Vec<usize>>,
    /// Per source vertex: class transport for genus-1 components.
    pub group_maps: Vec<Option<GroupIso>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupIso {
    pub matrix: Vec<Vec<i64>>,
    pub translation: Torsion,
}

impl GroupIso {
    pub fn identity(group: &AbelianGroup) -> Self {
        let k = group.factors().len();
        GroupIso {
            matrix: (0..k)
                .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
                .collect(),
            translation: group.zero(),
        }
    }

    pub fn apply(&self, target: &AbelianGroup, t: &Torsion) -> Torsion {
        let mapped: Vec<i64> = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(&t.residues).map(|(a, b)| a * b).sum())
            .collect();
        let reduced = target.reduce(&mapped).expect("matrix shape checked");
        target.add(&reduced, &self.translation)
    }

    fn is_bijective(&self, source: &AbelianGroup, target: &AbelianGroup) -> bool {
        if source.factors() != target.factors() {
            return false;
        }
        if self.matrix.len() != target.factors().len()
            || self
                .matrix
                .iter()
                .any(|row| row.len() != source.factors().len())
        {
            return false;
        }
        let mut seen = BTreeSet::new();
        for t in source.elements() {
            if !seen.insert(self.apply(target, &t)) {
                return false;
            }
        }
        true
    }
}

/// Checks all automorphism conditions; returns the list of violations, empty
/// on success.
pub fn check_automorphism(cx: &MetrizedComplex, phi: &ComplexAutomorphism) -> Vec<String> {
    let mut violations = Vec::new();
    let g = cx.graph();
    let n = g.n_vertices();
    let m = g.n_edges();
    let mut push = |msg: String| violations.push(msg);

    if phi.vertex_perm.len() != n || !is_permutation(&phi.vertex_perm) {
        push("vertex map is not a permutation".into());
        return violations;
    }
    if phi.edge_perm.len() != m || !is_permutation(&phi.edge_perm) {
        push("edge map is not a permutation".into());
        return violations;
    }
    if phi.half_perm.len() != m || phi.point_maps.len() != n || phi.group_maps.len() != n {
        push("automorphism data has wrong shape".into());
        return violations;
    }
    for v in 0..n {
        let src = cx.component(v);
        let dst = cx.component(phi.vertex_perm[v]);
        if g.weight(v) != g.weight(phi.vertex_perm[v]) || src.genus() != dst.genus() {
            push(format!(
                "genus mismatch: vertex {:?} -> {:?}",
                g.vertex_id(v),
                g.vertex_id(phi.vertex_perm[v])
            ));
        }
        if src.group().factors() != dst.group().factors() {
            push(format!(
                "component group mismatch at vertex {:?}",
                g.vertex_id(v)
            ));
        }
        let pm = &phi.point_maps[v];
        if pm.len() != src.points().len()
            || pm.iter().any(|&p| p >= dst.points().len())
            || !is_permutation_onto(pm, dst.points().len())
        {
            push(format!(
                "point map at vertex {:?} is not a bijection",
                g.vertex_id(v)
            ));
            return violations;
        }
        match (src.genus(), &phi.group_maps[v]) {
            (1, Some(iso)) => {
                if !iso.is_bijective(src.group(), dst.group()) {
                    push(format!(
                        "group map at vertex {:?} is not an isomorphism",
                        g.vertex_id(v)
                    ));
                } else {
                    for (p, info) in src.points().iter().enumerate() {
                        let expect = iso.apply(dst.group(), &info.class);
                        if dst.point_class(pm[p]) != &expect {
                            push(format!(
                                "class transport fails at vertex {:?} point {:?}",
                                g.vertex_id(v),
                                info.id
                            ));
                        }
                    }
                }
            }
            (1, None) => push(format!(
                "genus-1 vertex {:?} needs a group isomorphism",
                g.vertex_id(v)
            )),
            _ => {}
        }
    }
    for e in 0..m {
        let target = phi.edge_perm[e];
        if cx.graph().edges()[e].length != cx.graph().edges()[target].length {
            push(format!(
                "edge length not preserved: {:?}",
                g.edges()[e].id
            ));
        }
        let mut seen_sides = BTreeSet::new();
        for side in 0..2 {
            let (te, ts) = phi.half_perm[e][side];
            if te != target || !seen_sides.insert(ts) || ts > 1 {
                push(format!(
                    "half-edge map inconsistent with edge map on {:?}",
                    g.edges()[e].id
                ));
                continue;
            }
            let v = g.half_vertex(e, side);
            if g.half_vertex(te, ts) != phi.vertex_perm[v] {
                push(format!(
                    "half-edge endpoint not respected on {:?}",
                    g.edges()[e].id
                ));
                continue;
            }
            // attachment compatibility
            let image_point = phi.point_maps[v][cx.attachment(e, side)];
            if image_point != cx.attachment(te, ts) {
                push(format!(
                    "attachment compatibility fails on half-edge {:?}",
                    g.edges()[e].halves[side].id
                ));
            }
        }
    }
    for &(v, p) in cx.marks() {
        if phi.vertex_perm[v] != v || phi.point_maps[v][p] != p {
            push(format!(
                "marked point {:?} on vertex {:?} is not fixed",
                cx.component(v).point_id(p),
                g.vertex_id(v)
            ));
        }
    }
    violations
}

fn is_permutation(p: &[usize]) -> bool {
    is_permutation_onto(p, p.len())
}

fn is_permutation_onto(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    p.len() == n
}

pub fn identity_automorphism(cx: &MetrizedComplex) -> ComplexAutomorphism {
    let n = cx.components().len();
    let m = cx.graph().n_edges();
    ComplexAutomorphism {
        vertex_perm: (0..n).collect(),
        edge_perm: (0..m).collect(),
        half_perm: (0..m).map(|e| [(e, 0), (e, 1)]).collect(),
        point_maps: (0..n)
            .map(|v| (0..cx.component(v).points().len()).collect())
            .collect(),
        group_maps: (0..n)
            .map(|v| {
                if cx.component(v).genus() == 1 {
                    Some(GroupIso::identity(cx.component(v).group()))
                } else {
                    None
                }
            })
            .collect(),
    }
}

/// Brute-force search for complex automorphisms, capped at `cap` results.
/// Extensions of each graph automorphism are tried over half-edge
/// orientations, cyclic-group automorphisms with translations, and sorted
/// completion on free points; every candidate is validated by
/// `check_automorphism` before being returned.
pub fn automorphisms(
    cx: &MetrizedComplex,
    max_vertices: usize,
    cap: usize,
) -> Result<Vec<ComplexAutomorphism>> {
    let graph_autos = cx.graph().automorphisms(max_vertices)?;
    let mut out = Vec::new();
    'auto_loop: for ga in &graph_autos {
        // enumerate half-edge side choices per edge
        let m = cx.graph().n_edges();
        let mut side_options: Vec<Vec<[usize; 2]>> = Vec::with_capacity(m);
        for e in 0..m {
            let te = ga.edge_perm[e];
            let mut opts = Vec::new();
            for swap in [false, true] {
                let assign = if swap { [1, 0] } else { [0, 1] };
                let ok = (0..2).all(|side| {
                    cx.graph().half_vertex(te, assign[side])
                        == ga.vertex_perm[cx.graph().half_vertex(e, side)]
                });
                if ok {
                    opts.push(assign);
                }
            }
            if opts.is_empty() {
                continue 'auto_loop;
            }
            side_options.push(opts);
        }
        let mut combos: Vec<Vec<[usize; 2]>> = vec![Vec::new()];
        for opts in &side_options {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    opts.iter().map(move |o| {
                        let mut d = c.clone();
                        d.push(*o);
                        d
                    }).collect::<Vec<_>>()
                })
                .collect();
            if combos.len() > 64 {
                combos.truncate(64);
            }
        }
        for sides in combos {
            let half_perm: Vec<[(usize, usize); 2]> = (0..m)
                .map(|e| {
                    [
                        (ga.edge_perm[e], sides[e][0]),
                        (ga.edge_perm[e], sides[e][1]),
                    ]
                })
                .collect();
            for candidate in extend_points(cx, &ga.vertex_perm, &ga.edge_perm, &half_perm) {
                if check_automorphism(cx, &candidate).is_empty() && !out.contains(&candidate) {
                    out.push(candidate);
                    if out.len() >= cap {
                        return Ok(out);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn extend_points(
    cx: &MetrizedComplex,
    vertex_perm: &[usize],
    edge_perm: &[usize],
    half_perm: &[[(usize, usize); 2]],
) -> Vec<ComplexAutomorphism> {
    let n = cx.components().len();
    // forced images of attachment points
    let mut forced: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    for e in 0..cx.graph().n_edges() {
        for side in 0..2 {
            let v = cx.graph().half_vertex(e, side);
            let (te, ts) = half_perm[e][side];
            let src = cx.attachment(e, side);
            let dst = cx.attachment(te, ts);
            if let Some(&prev) = forced[v].get(&src) {
                if prev != dst {
                    return Vec::new();
                }
            }
            forced[v].insert(src, dst);
        }
    }
    // per-vertex options for (point map, group map)
    let mut per_vertex: Vec<Vec<(Vec<usize>, Option<GroupIso>)>> = Vec::with_capacity(n);
    for v in 0..n {
        let src = cx.component(v);
        let dst = cx.component(vertex_perm[v]);
        if src.points().len() != dst.points().len() {
            return Vec::new();
        }
        let mut options = Vec::new();
        if src.genus() == 1 {
            options.extend(genus_one_point_maps(src, dst, &forced[v]));
        } else {
            if let Some(pm) = sorted_completion(src, dst, &forced[v]) {
                options.push((pm, None));
            }
        }
        if options.is_empty() {
            return Vec::new();
        }
        per_vertex.push(options);
    }
    let mut results: Vec<(Vec<Vec<usize>>, Vec<Option<GroupIso>>)> = vec![(vec![], vec![])];
    for options in &per_vertex {
        results = results
            .into_iter()
            .flat_map(|(pms, gms)| {
                options.iter().map(move |(pm, gm)| {
                    let mut pms = pms.clone();
                    let mut gms = gms.clone();
                    pms.push(pm.clone());
                    gms.push(gm.clone());
                    (pms, gms)
                }).collect::<Vec<_>>()
            })
            .collect();
        if results.len() > 64 {
            results.truncate(64);
        }
    }
    results
        .into_iter()
        .map(|(point_maps, group_maps)| ComplexAutomorphism {
            vertex_perm: vertex_perm.to_vec(),
            edge_perm: edge_perm.to_vec(),
            half_perm: half_perm.to_vec(),
            point_maps,
            group_maps,
        })
        .collect()
}

/// Completes a forced partial map by pairing the remaining points in sorted
/// order.
fn sorted_completion(
    src: &ComponentModel,
    dst: &ComponentModel,
    forced: &BTreeMap<usize, usize>,
) -> Option<Vec<usize>> {
    let used: BTreeSet<usize> = forced.values().copied().collect();
    if used.len() != forced.len() {
        return None;
    }
    let free_src: Vec<usize> = (0..src.points().len())
        .filter(|p| !forced.contains_key(p))
        .collect();
    let free_dst: Vec<usize> = (0..dst.points().len())
        .filter(|p| !used.contains(p))
        .collect();
    if free_src.len() != free_dst.len() {
        return None;
    }
    let mut map = vec![usize::MAX; src.points().len()];
    for (&s, &d) in forced.iter() {
        map[s] = d;
    }
    for (s, d) in free_src.into_iter().zip(free_dst) {
        map[s] = d;
    }
    Some(map)
}

/// Candidate genus-1 extensions: group automorphisms (multiplication on
/// cyclic groups, identity otherwise) with all translations, constrained by
/// the forced attachment images.
fn genus_one_point_maps(
    src: &ComponentModel,
    dst: &ComponentModel,
    forced: &BTreeMap<usize, usize>,
) -> Vec<(Vec<usize>, Option<GroupIso>)> {
    let group = src.group();
    if group.factors() != dst.group().factors() {
        return Vec::new();
    }
    let mut matrices = Vec::new();
    if group.factors().len() == 1 {
        let f = group.factors()[0];
        for a in 1..f {
            if gcd(a, f) == 1 {
                matrices.push(vec![vec![a]]);
            }
        }
    } else {
        matrices.push(GroupIso::identity(group).matrix);
    }
    let mut out = Vec::new();
    for matrix in matrices {
        for translation in group.elements() {
            let iso = GroupIso {
                matrix: matrix.clone(),
                translation,
            };
            if !iso.is_bijective(group, dst.group()) {
                continue;
            }
            // forced points must transport correctly
            let ok = forced.iter().all(|(&s, &d)| {
                dst.point_class(d) == &iso.apply(dst.group(), src.point_class(s))
            });
            if !ok {
                continue;
            }
            // map each point to the least point of the image class
            let mut by_class: BTreeMap<&Torsion, Vec<usize>> = BTreeMap::new();
            for (p, info) in dst.points().iter().enumerate() {
                by_class.entry(&info.class).or_default().push(p);
            }
            let mut used: BTreeSet<usize> = forced.values().copied().collect();
            let mut map = vec![usize::MAX; src.points().len()];
            for (&s, &d) in forced {
                map[s] = d;
            }
            let mut feasible = true;
            for (p, info) in src.points().iter().enumerate() {
                if map[p] != usize::MAX {
                    continue;
                }
                let image_class = iso.apply(dst.group(), &info.class);
                let slot = by_class
                    .get(&image_class)
                    .and_then(|cands| cands.iter().find(|c| !used.contains(c)).copied());
                match slot {
                    Some(d) => {
                        used.insert(d);
                        map[p] = d;
                    }
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible {
                out.push((map, Some(iso)));
            }
        }
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Structural equality that ignores half-edge identifier strings: graphs,
/// components, attachments per (edge id, side), marks, and the ambient
/// monoid rank must all agree.
pub fn structurally_equal(a: &MetrizedComplex, b: &MetrizedComplex) -> bool {
    if a.monoid_rank() != b.monoid_rank() {
        return false;
    }
    let (ga, gb) = (a.graph(), b.graph());
    if ga.n_vertices() != gb.n_vertices() || ga.n_edges() != gb.n_edges() {
        return false;
    }
    for v in 0..ga.n_vertices() {
        if ga.vertex_id(v) != gb.vertex_id(v) || ga.weight(v) != gb.weight(v) {
            return false;
        }
        if a.component(v) != b.component(v) {
            return false;
        }
    }
    for e in 0..ga.n_edges() {
        let (ea, eb) = (&ga.edges()[e], &gb.edges()[e]);
        if ea.id != eb.id || ea.length != eb.length {
            return false;
        }
        for side in 0..2 {
            if ga.vertex_id(ea.halves[side].vertex) != gb.vertex_id(eb.halves[side].vertex) {
                return false;
            }
            let pa = a.component(ga.half_vertex(e, side)).point_id(a.attachment(e, side));
            let pb = b.component(gb.half_vertex(e, side)).point_id(b.attachment(e, side));
            if pa != pb {
                return false;
            }
        }
    }
    let marks_a: Vec<(String, String)> = a
        .marks()
        .iter()
        .map(|&(v, p)| (
            ga.vertex_id(v).to_string(),
            a.component(v).point_id(p).to_string(),
        ))
        .collect();
    let marks_b: Vec<(String, String)> = b
        .marks()
        .iter()
        .map(|&(v, p)| (
            gb.vertex_id(v).to_string(),
            b.component(v).point_id(p).to_string(),
        ))
        .collect();
    marks_a == marks_b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg;
    use num_bigint::BigInt;

    fn class_from_mdeg(cx: &MetrizedComplex, mdeg: &[i64]) -> ComplexClass {
        ComplexClass {
            parts: mdeg
                .iter()
                .enumerate()
                .map(|(v, &d)| ComponentClass {
                    degree: d,
                    torsion: cx.component(v).group().zero(),
                })
                .collect(),
        }
    }

    fn ell_class(cx: &MetrizedComplex, degree: i64, torsion: i64) -> ComplexClass {
        ComplexClass {
            parts: vec![ComponentClass {
                degree,
                torsion: cx.component(0).group().reduce(&[torsion]).unwrap(),
            }],
        }
    }

    /// Effectivity through the Smith solver, independent of the burning
    /// machinery: search all effective multidegrees in the lattice coset of
    /// the class and check the forced torsion residuals.
    fn snf_has_effective(cx: &MetrizedComplex, class: &ComplexClass) -> bool {
        let d = class.degree();
        if d < 0 {
            return false;
        }
        let n = cx.components().len();
        let lap = cx.graph().laplacian();
        let firing = firing_vectors(cx);
        'mdeg: for m in compositions(n, d) {
            let rhs: Vec<BigInt> = (0..n)
                .map(|v| BigInt::from(class.parts[v].degree - m[v]))
                .collect();
            let Some(steps) = linalg::integer_solve(&lap, &rhs).unwrap() else {
                continue;
            };
            for v in 0..n {
                let model = cx.component(v);
                if model.genus() == 1 && m[v] == 0 {
                    let group = model.group();
                    let mut residual = class.parts[v].torsion.clone();
                    for (u, step) in steps.iter().enumerate() {
                        let step = i64::try_from(step).unwrap();
                        residual = group.sub(&residual, &group.scale(&firing[u].parts[v].torsion, step));
                    }
                    if !residual.is_zero() {
                        continue 'mdeg;
                    }
                }
            }
            return true;
        }
        false
    }

    /// Literal rank via iterated quantification over effective test classes,
    /// with SNF-based effectivity. Subdivision applied first, matching
    /// `rank`.
    fn snf_rank(cx: &MetrizedComplex, class: &ComplexClass) -> i64 {
        let (sub, mapping) = subdivide_loops(cx);
        let pushed = push_class(&sub, &mapping, class);
        if !snf_has_effective(&sub, &pushed) {
            return -1;
        }
        let mut r = 1i64;
        loop {
            for e in effective_test_classes(&sub, r) {
                if !snf_has_effective(&sub, &sub.class_sub(&pushed, &e)) {
                    return r - 1;
                }
            }
            r += 1;
        }
    }

    #[test]
    fn validate_examples() {
        fixtures::cpx_c3_rat();
        // loop with both half-edges attached to the same point
        let g = fixtures::loop1();
        let model = ComponentModel::genus_zero(&["x"]).unwrap();
        let p = model.point_index("x").unwrap();
        let err = MetrizedComplex::new(g, vec![model], vec![[p, p]], vec![], None).unwrap_err();
        assert!(err.to_string().contains("distinct"));
        // marking on an attachment point
        let g = fixtures::loop1();
        let model = ComponentModel::genus_zero(&["e1a", "e1b"]).unwrap();
        let a = model.point_index("e1a").unwrap();
        let b = model.point_index("e1b").unwrap();
        let err =
            MetrizedComplex::new(g, vec![model], vec![[a, b]], vec![(0, a)], None).unwrap_err();
        assert!(err.to_string().contains("attachment"));
    }

    #[test]
    fn genus_examples() {
        assert_eq!(fixtures::cpx_loop_rat().genus(), 1);
        assert_eq!(fixtures::cpx_ell5().genus(), 1);
        assert_eq!(fixtures::cpx_b2_rat().genus(), 1);
    }

    #[test]
    fn firing_vector_examples() {
        let c3 = fixtures::cpx_c3_rat();
        let f = firing_vectors(&c3);
        assert_eq!(f[0].multidegree().coeffs(), &[-2, 1, 1]);
        assert!(f[0].parts.iter().all(|p| p.torsion.is_zero()));

        let loop_rat = fixtures::cpx_loop_rat();
        let f = firing_vectors(&loop_rat);
        assert_eq!(f[0].multidegree().coeffs(), &[0]);

        let ell = fixtures::cpx_ell5();
        let f = firing_vectors(&ell);
        assert_eq!(f[0].multidegree().coeffs(), &[0]);
        assert!(f[0].parts[0].torsion.is_zero());
    }

    #[test]
    fn firing_vectors_sum_to_zero() {
        for cx in [
            fixtures::cpx_c3_rat(),
            fixtures::cpx_b2_rat(),
            fixtures::cpx_loop_rat(),
            fixtures::cpx_ell5(),
        ] {
            let f = firing_vectors(&cx);
            let mut total = cx.zero_class();
            for fv in &f {
                total = cx.class_add(&total, fv);
            }
            assert_eq!(total, cx.zero_class());
        }
    }

    #[test]
    fn class_of_examples() {
        let ell = fixtures::cpx_ell5();
        let model = ell.component(0);
        let mut d = ComplexDivisor::empty(&ell);
        d.parts[0].push(model.point_index("t1").unwrap(), 1);
        d.parts[0].push(model.point_index("t4").unwrap(), 1);
        let c = class_of(&ell, &d).unwrap();
        assert_eq!(c.parts[0].degree, 2);
        assert!(c.parts[0].torsion.is_zero());

        let c3 = fixtures::cpx_c3_rat();
        let mut d = ComplexDivisor::empty(&c3);
        d.parts[1].push(0, 1);
        let c = class_of(&c3, &d).unwrap();
        assert_eq!(c.multidegree().coeffs(), &[0, 1, 0]);

        let empty = class_of(&c3, &ComplexDivisor::empty(&c3)).unwrap();
        assert_eq!(empty, c3.zero_class());
    }

    #[test]
    fn equivalence_examples() {
        let ell = fixtures::cpx_ell5();
        assert!(!is_equivalent(&ell, &ell_class(&ell, 1, 1), &ell_class(&ell, 1, 2)).unwrap());
        assert!(is_equivalent(&ell, &ell_class(&ell, 2, 0), &ell_class(&ell, 2, 5)).unwrap());

        let c3 = fixtures::cpx_c3_rat();
        assert!(is_equivalent(
            &c3,
            &class_from_mdeg(&c3, &[0, -1, 1]),
            &class_from_mdeg(&c3, &[-1, 1, 0])
        )
        .unwrap());
        // graph-level oracle agrees
        assert!(divisor::is_equivalent(
            c3.graph(),
            &GraphDivisor::new(vec![0, -1, 1]),
            &GraphDivisor::new(vec![-1, 1, 0])
        ));
    }

    #[test]
    fn equivalence_respects_firing_shifts() {
        let cx = fixtures::cpx_ell5();
        let f = firing_vectors(&cx);
        let c = ell_class(&cx, 2, 3);
        let shifted = cx.class_add(&c, &f[0]);
        assert!(is_equivalent(&cx, &c, &shifted).unwrap());

        let b2 = fixtures::cpx_b2_rat();
        let f = firing_vectors(&b2);
        let c = class_from_mdeg(&b2, &[2, -1]);
        let shifted = b2.class_add(&c, &f[1]);
        assert!(is_equivalent(&b2, &c, &shifted).unwrap());
        assert!(!is_equivalent(&b2, &c, &class_from_mdeg(&b2, &[1, 0])).unwrap());
    }

    #[test]
    fn effective_rep_examples() {
        let ell = fixtures::cpx_ell5();
        assert!(!has_effective_rep(&ell, &ell_class(&ell, 0, 3)).unwrap());
        assert!(has_effective_rep(&ell, &ell_class(&ell, 0, 0)).unwrap());

        let c3 = fixtures::cpx_c3_rat();
        assert!(has_effective_rep(&c3, &class_from_mdeg(&c3, &[-1, 1, 1])).unwrap());
        assert!(!has_effective_rep(&c3, &class_from_mdeg(&c3, &[-1, 1, 0])).unwrap());
    }

    #[test]
    fn effectivity_agrees_with_snf_oracle() {
        for cx in [
            fixtures::cpx_c3_rat(),
            fixtures::cpx_b2_rat(),
            fixtures::cpx_ell5(),
        ] {
            let mut engine = ComplexRankEngine::new(cx.clone()).unwrap();
            for d in -2..=4 {
                for class in crate::sweep::class_reps(&cx, d) {
                    assert_eq!(
                        engine.has_effective_rep(&class),
                        snf_has_effective(&cx, &class),
                        "degree {} class {:?}",
                        d,
                        class
                    );
                }
            }
        }
    }

    #[test]
    fn rank_examples() {
        let c3 = fixtures::cpx_c3_rat();
        assert_eq!(rank(&c3, &class_from_mdeg(&c3, &[1, 0, 0])).unwrap(), 0);
        assert_eq!(
            rank(&c3, &class_from_mdeg(&c3, &[1, 0, 0])).unwrap(),
            divisor::rank_ac(c3.graph(), &GraphDivisor::new(vec![1, 0, 0]))
        );

        // a degree-1 point on the loop complex: subdivided semantics
        let loop_rat = fixtures::cpx_loop_rat();
        let model = loop_rat.component(0);
        let mut d = ComplexDivisor::empty(&loop_rat);
        d.parts[0].push(model.point_index("y").unwrap(), 1);
        let class = class_of(&loop_rat, &d).unwrap();
        assert_eq!(rank(&loop_rat, &class).unwrap(), 0);
        assert_eq!(rank_naive(&loop_rat, &class).unwrap(), 1);

        let ell = fixtures::cpx_ell5();
        assert_eq!(rank(&ell, &ell_class(&ell, 2, 1)).unwrap(), 1);
        assert_eq!(rank_naive(&ell, &ell_class(&ell, 1, 0)).unwrap(), 0);
        // loopless: naive and subdivided agree
        assert_eq!(
            rank_naive(&c3, &class_from_mdeg(&c3, &[1, 1, 0])).unwrap(),
            rank(&c3, &class_from_mdeg(&c3, &[1, 1, 0])).unwrap()
        );
    }

    #[test]
    fn rank_matches_snf_oracle() {
        for cx in [
            fixtures::cpx_c3_rat(),
            fixtures::cpx_loop_rat(),
            fixtures::cpx_ell5(),
        ] {
            let genus = cx.genus();
            for d in -2..=(2 * genus + 2) {
                for class in crate::sweep::class_reps(&cx, d) {
                    assert_eq!(
                        rank(&cx, &class).unwrap(),
                        snf_rank(&cx, &class),
                        "degree {} on {:?}",
                        d,
                        cx.graph().vertex_id(0)
                    );
                }
            }
        }
    }

    #[test]
    fn rank_is_equivalence_invariant() {
        let cx = fixtures::cpx_ell5();
        let f = firing_vectors(&cx);
        let mut engine = ComplexRank::new(&cx).unwrap();
        for d in 0..=3 {
            for t in 0..5 {
                let c = ell_class(&cx, d, t);
                let shifted = cx.class_add(&c, &f[0]);
                assert_eq!(engine.rank(&c), engine.rank(&shifted));
            }
        }
    }

    #[test]
    fn rank_bounded_by_graph_rank() {
        for cx in [fixtures::cpx_ell5(), fixtures::cpx_b2_rat(), fixtures::cpx_loop_rat()] {
            let mut graph_engine = divisor::AcRankEngine::new(cx.graph());
            let mut engine = ComplexRank::new(&cx).unwrap();
            let genus = cx.genus();
            for d in -1..=(2 * genus + 2) {
                for class in crate::sweep::class_reps(&cx, d) {
                    let r = engine.rank(&class);
                    let rg = graph_engine.rank(&class.multidegree());
                    assert!(r <= rg, "rank {} graph rank {}", r, rg);
                    if cx.all_rational() {
                        assert_eq!(r, rg);
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let loop_rat = fixtures::cpx_loop_rat();
        let (class, rep) = canonical(&loop_rat).unwrap();
        assert_eq!(class.parts[0].degree, 0);
        assert!(class.parts[0].torsion.is_zero());
        assert_eq!(class_of(&loop_rat, &rep).unwrap(), class);

        let b2 = fixtures::cpx_b2_rat();
        let (class, rep) = canonical(&b2).unwrap();
        assert_eq!(class.multidegree().coeffs(), &[0, 0]);
        assert_eq!(class_of(&b2, &rep).unwrap(), class);

        let ell = fixtures::cpx_ell5();
        let (class, rep) = canonical(&ell).unwrap();
        assert_eq!(class.parts[0].degree, 0);
        assert!(class.parts[0].torsion.is_zero());
        assert!(rep.parts[0].multiplicities.is_empty());
    }

    #[test]
    fn canonical_degree_is_2g_minus_2() {
        for cx in [
            fixtures::cpx_c3_rat(),
            fixtures::cpx_b2_rat(),
            fixtures::cpx_loop_rat(),
            fixtures::cpx_ell5(),
            fixtures::all_rational_complex(&fixtures::b3()),
        ] {
            let class = canonical_class(&cx).unwrap();
            assert_eq!(class.degree(), 2 * cx.genus() - 2);
        }
    }

    #[test]
    fn subdivision_examples() {
        let loop_rat = fixtures::cpx_loop_rat();
        let (sub, mapping) = subdivide_loops(&loop_rat);
        assert_eq!(sub.components().len(), 2);
        assert_eq!(sub.genus(), loop_rat.genus());
        assert_eq!(mapping.vertex_map.len(), 1);

        let c3 = fixtures::cpx_c3_rat();
        let (sub, _) = subdivide_loops(&c3);
        assert!(structurally_equal(&sub, &c3));
    }

    #[test]
    fn automorphism_examples() {
        for cx in [
            fixtures::cpx_c3_rat(),
            fixtures::cpx_b2_rat(),
            fixtures::cpx_loop_rat(),
            fixtures::cpx_ell5(),
        ] {
            assert!(check_automorphism(&cx, &identity_automorphism(&cx)).is_empty());
        }

        // edge swap on the banana complex with the compatible point swap
        let b2 = fixtures::cpx_b2_rat();
        let v1_map = |cx: &MetrizedComplex, v: usize, from: &str, to: &str| {
            let model = cx.component(v);
            let mut map: Vec<usize> = (0..model.points().len()).collect();
            let a = model.point_index(from).unwrap();
            let b = model.point_index(to).unwrap();
            map.swap(a, b);
            map
        };
        let swap = ComplexAutomorphism {
            vertex_perm: vec![0, 1],
            edge_perm: vec![1, 0],
            half_perm: vec![[(1, 0), (1, 1)], [(0, 0), (0, 1)]],
            point_maps: vec![v1_map(&b2, 0, "e1a", "e2a"), v1_map(&b2, 1, "e1b", "e2b")],
            group_maps: vec![None, None],
        };
        assert!(check_automorphism(&b2, &swap).is_empty());

        // breaking the point map must be reported as attachment incompatibility
        let mut broken = swap.clone();
        broken.point_maps[0] = (0..b2.component(0).points().len()).collect();
        let violations = check_automorphism(&b2, &broken);
        assert!(violations.iter().any(|v| v.contains("attachment")));
    }

    #[test]
    fn automorphism_search_finds_expected_counts() {
        let b2 = fixtures::cpx_b2_rat();
        let autos = automorphisms(&b2, 8, 32).unwrap();
        assert!(autos.contains(&identity_automorphism(&b2)));
        assert!(autos.len() >= 4);
        for phi in &autos {
            assert!(check_automorphism(&b2, phi).is_empty());
        }
    }
}
