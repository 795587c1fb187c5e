//! Seeded random and exhaustive instance generators plus sweep drivers that
//! turn the Riemann–Roch identity, the specialization inequality, the
//! Clifford bound, the short-exact-sequence kernel count, and the
//! curve/complex correspondence into falsifiable batch checks with
//! minimal-counterexample reporting.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::complex::{self, ComplexClass, ComplexRank, MetrizedComplex};
use crate::component::{AbelianGroup, ComponentClass, ComponentModel, Torsion};
use crate::divisor::{self, AcRankEngine, GraphDivisor, RankEngine};
use crate::fixtures;
use crate::graph::Multigraph;
use crate::logcurve::{self, LogCurve, LogLineBundle, TorusModel};
use crate::monoid::MonoidElement;
use crate::{Error, Result};

/// Configuration shared by every sweep; all sweeps are deterministic
/// functions of this value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub seed: u64,
    #[serde(default = "defaults::max_vertices")]
    pub max_vertices: usize,
    #[serde(default = "defaults::max_edges")]
    pub max_edges: usize,
    #[serde(default = "defaults::max_group_order")]
    pub max_group_order: i64,
    /// Inclusive degree window; the upper end is additionally capped at
    /// 2*genus + 2 per instance, past which the identities are forced.
    #[serde(default = "defaults::degree_window")]
    pub degree_window: (i64, i64),
    #[serde(default = "defaults::instances")]
    pub instances: usize,
    /// Negative control: compute graph ranks loop-blind instead of on the
    /// loop-subdivided graph. Documented broken semantics; sweeps with this
    /// flag are expected to produce violations on loopy instances.
    #[serde(default)]
    pub loop_blind_rank: bool,
}

mod defaults {
    pub fn max_vertices() -> usize {
        3
    }
    pub fn max_edges() -> usize {
        4
    }
    pub fn max_group_order() -> i64 {
        5
    }
    pub fn degree_window() -> (i64, i64) {
        (-2, 99)
    }
    pub fn instances() -> usize {
        50
    }
}

impl SweepConfig {
    pub fn new(seed: u64) -> Self {
        SweepConfig {
            seed,
            max_vertices: defaults::max_vertices(),
            max_edges: defaults::max_edges(),
            max_group_order: defaults::max_group_order(),
            degree_window: defaults::degree_window(),
            instances: defaults::instances(),
            loop_blind_rank: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.degree_window;
        if lo > hi {
            return Err(Error::input("degree window must satisfy lo <= hi"));
        }
        if self.max_vertices == 0 {
            return Err(Error::input("max_vertices must be positive"));
        }
        if self.max_group_order < 1 {
            return Err(Error::input("max_group_order must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub identity: String,
    pub instance: Value,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub instances: u64,
    pub checked: u64,
    pub rank_evaluations: u64,
    pub violations: Vec<Violation>,
    pub witnesses: Vec<Value>,
}

impl SweepReport {
    fn new(config: SweepConfig) -> Self {
        SweepReport {
            config,
            instances: 0,
            checked: 0,
            rank_evaluations: 0,
            violations: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn rng_for(cfg: &SweepConfig, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        cfg.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(stream.wrapping_mul(0x517C_C1B7_2722_0A95))
            .wrapping_add(index),
    )
}

/// Deterministic random connected multigraph; loops and parallel edges occur
/// with positive probability. Weights are zero.
pub fn gen_graph(cfg: &SweepConfig, index: u64) -> Multigraph {
    let mut rng = rng_for(cfg, 1, index);
    gen_graph_with(&mut rng, cfg.max_vertices, cfg.max_edges)
}

fn gen_graph_with(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize) -> Multigraph {
    let nv_cap = max_vertices.min(max_edges + 1).max(1);
    let nv = rng.gen_range(1..=nv_cap);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in 1..nv {
        edges.push((rng.gen_range(0..v), v));
    }
    let extra_cap = max_edges.saturating_sub(edges.len());
    let extra = rng.gen_range(0..=extra_cap);
    for _ in 0..extra {
        let u = rng.gen_range(0..nv);
        let w = rng.gen_range(0..nv);
        edges.push((u.min(w), u.max(w)));
    }
    build_graph(nv, &edges, &vec![0; nv])
}

fn build_graph(nv: usize, edges: &[(usize, usize)], weights: &[u32]) -> Multigraph {
    let vertices: Vec<(String, u32)> = (0..nv)
        .map(|v| (format!("v{}", v + 1), weights[v]))
        .collect();
    let edge_parts: Vec<_> = edges
        .iter()
        .enumerate()
        .map(|(i, &(u, w))| {
            (
                format!("e{}", i + 1),
                (format!("e{}a", i + 1), format!("v{}", u + 1)),
                (format!("e{}b", i + 1), format!("v{}", w + 1)),
                MonoidElement::new(vec![1]),
            )
        })
        .collect();
    Multigraph::from_parts(vertices, edge_parts).expect("generated graph is valid")
}

/// Deterministic random complex mixing genus-0 and genus-1 components with
/// cyclic groups of bounded order.
pub fn gen_complex(cfg: &SweepConfig, index: u64) -> MetrizedComplex {
    let mut rng = rng_for(cfg, 2, index);
    gen_complex_with(&mut rng, cfg, false)
}

fn gen_complex_with(
    rng: &mut ChaCha8Rng,
    cfg: &SweepConfig,
    roundtrip_flavor: bool,
) -> MetrizedComplex {
    let skeleton = gen_graph_with(rng, cfg.max_vertices, cfg.max_edges);
    let nv = skeleton.n_vertices();
    let mut weights = vec![0u32; nv];
    for w in weights.iter_mut() {
        *w = if rng.gen_bool(0.35) {
            if roundtrip_flavor && rng.gen_bool(0.2) {
                2
            } else {
                1
            }
        } else {
            0
        };
    }
    let monoid_rank = if roundtrip_flavor && rng.gen_bool(0.4) {
        2
    } else {
        1
    };
    let edge_pairs: Vec<(usize, usize)> = skeleton
        .edges()
        .iter()
        .map(|e| (e.halves[0].vertex, e.halves[1].vertex))
        .collect();
    let vertices: Vec<(String, u32)> = (0..nv)
        .map(|v| (format!("v{}", v + 1), weights[v]))
        .collect();
    let edge_parts: Vec<_> = edge_pairs
        .iter()
        .enumerate()
        .map(|(i, &(u, w))| {
            let length = if roundtrip_flavor {
                let mut coords = vec![0u64; monoid_rank];
                while coords.iter().all(|&c| c == 0) {
                    for c in coords.iter_mut() {
                        *c = rng.gen_range(0..3);
                    }
                }
                MonoidElement::new(coords)
            } else {
                MonoidElement::new(vec![1])
            };
            (
                format!("e{}", i + 1),
                (format!("e{}a", i + 1), format!("v{}", u + 1)),
                (format!("e{}b", i + 1), format!("v{}", w + 1)),
                length,
            )
        })
        .collect();
    let graph = Multigraph::from_parts(vertices, edge_parts).expect("generated graph is valid");
    let mut components = Vec::new();
    for v in 0..nv {
        let half_ids: Vec<String> = graph
            .edges()
            .iter()
            .flat_map(|e| e.halves.iter())
            .filter(|h| h.vertex == v)
            .map(|h| h.id.clone())
            .collect();
        let genus = graph.weight(v);
        let group = if genus == 1 {
            AbelianGroup::cyclic(rng.gen_range(1..=cfg.max_group_order)).unwrap()
        } else {
            AbelianGroup::trivial()
        };
        let mut points: Vec<(String, Torsion)> = half_ids
            .iter()
            .map(|id| {
                let class = if group.is_trivial() {
                    group.zero()
                } else {
                    let elements = group.elements();
                    elements[rng.gen_range(0..elements.len())].clone()
                };
                (id.clone(), class)
            })
            .collect();
        if genus != 1 && rng.gen_bool(0.3) {
            points.push((format!("free{}", v + 1), group.zero()));
        }
        components.push(ComponentModel::new(genus, group, points).unwrap());
    }
    let attach: Vec<[usize; 2]> = graph
        .edges()
        .iter()
        .map(|e| {
            [
                components[e.halves[0].vertex]
                    .point_index(&e.halves[0].id)
                    .unwrap(),
                components[e.halves[1].vertex]
                    .point_index(&e.halves[1].id)
                    .unwrap(),
            ]
        })
        .collect();
    let mut marks = Vec::new();
    if roundtrip_flavor {
        for v in 0..nv {
            if components[v].genus() == 0 && rng.gen_bool(0.25) {
                // free points (if any) are eligible marks
                let mut attached = BTreeSet::new();
                for (e, sides) in attach.iter().enumerate() {
                    for s in 0..2 {
                        if graph.half_vertex(e, s) == v {
                            attached.insert(sides[s]);
                        }
                    }
                }
                if let Some(p) = (0..components[v].points().len()).find(|p| !attached.contains(p))
                {
                    marks.push((v, p));
                }
            }
        }
    }
    MetrizedComplex::new(graph, components, attach, marks, Some(monoid_rank))
        .expect("generated complex is valid")
}

/// Deterministic random semistable vertical curve (unit lengths), for rank
/// sweeps.
pub fn gen_curve(cfg: &SweepConfig, index: u64) -> LogCurve {
    let mut rng = rng_for(cfg, 3, index);
    let cx = gen_complex_with(&mut rng, cfg, false);
    logcurve::from_complex(&cx).unwrap().0
}

/// Deterministic random curve for correspondence sweeps: mixed monoid ranks,
/// non-unit lengths, occasional markings and genus-2 components.
pub fn gen_curve_roundtrip(cfg: &SweepConfig, index: u64) -> LogCurve {
    let mut rng = rng_for(cfg, 4, index);
    let cx = gen_complex_with(&mut rng, cfg, true);
    logcurve::from_complex(&cx).unwrap().0
}

/// All divisor coefficient vectors with entries in [lo, hi] and the given
/// sum.
pub fn bounded_divisors(n: usize, sum: i64, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, sum: i64, lo: i64, hi: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if n == 1 {
            if sum >= lo && sum <= hi {
                prefix.push(sum);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        let rest = n as i64 - 1;
        for c in lo..=hi {
            let remaining = sum - c;
            if remaining < lo * rest || remaining > hi * rest {
                continue;
            }
            prefix.push(c);
            rec(n - 1, remaining, lo, hi, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 && lo <= hi {
        rec(n, sum, lo, hi, &mut Vec::new(), &mut out);
    }
    out
}

/// All connected multigraphs (loops and parallel edges allowed) with at most
/// the given vertices and edges, one representative per isomorphism class,
/// deterministic order. Weights are zero.
pub fn enumerate_connected_multigraphs(max_vertices: usize, max_edges: usize) -> Vec<Multigraph> {
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let slots: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .collect();
        let mut counts = vec![0i64; slots.len()];
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        enumerate_counts(
            &slots,
            &mut counts,
            0,
            max_edges as i64,
            n,
            &mut seen,
            &mut out,
        );
    }
    out
}

fn enumerate_counts(
    slots: &[(usize, usize)],
    counts: &mut Vec<i64>,
    idx: usize,
    budget: i64,
    n: usize,
    seen: &mut BTreeSet<Vec<i64>>,
    out: &mut Vec<Multigraph>,
) {
    if idx == slots.len() {
        if !is_connected(slots, counts, n) {
            return;
        }
        let key = canonical_key(slots, counts, n);
        if seen.insert(key) {
            let mut edges = Vec::new();
            for (s, &(i, j)) in slots.iter().enumerate() {
                for _ in 0..counts[s] {
                    edges.push((i, j));
                }
            }
            out.push(build_graph(n, &edges, &vec![0; n]));
        }
        return;
    }
    for c in 0..=budget {
        counts[idx] = c;
        enumerate_counts(slots, counts, idx + 1, budget - c, n, seen, out);
    }
    counts[idx] = 0;
}

fn is_connected(slots: &[(usize, usize)], counts: &[i64], n: usize) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (s, &(i, j)) in slots.iter().enumerate() {
        if counts[s] > 0 && i != j {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    let root = find(&mut parent, 0);
    (0..n).all(|v| find(&mut parent, v) == root)
}

fn canonical_key(slots: &[(usize, usize)], counts: &[i64], n: usize) -> Vec<i64> {
    let mut matrix = vec![vec![0i64; n]; n];
    for (s, &(i, j)) in slots.iter().enumerate() {
        matrix[i][j] = counts[s];
        matrix[j][i] = counts[s];
    }
    let mut best: Option<Vec<i64>> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut key = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                key.push(matrix[p[i]][p[j]]);
            }
        }
        if best.as_ref().map_or(true, |b| &key < b) {
            best = Some(key);
        }
    });
    best.unwrap()
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// Superstable configurations at the first vertex: one representative per
/// divisor class of each fixed degree.
fn superstables(g: &Multigraph) -> Vec<Vec<i64>> {
    let n = g.n_vertices();
    if n == 1 {
        return vec![vec![0]];
    }
    let bounds: Vec<i64> = (0..n)
        .map(|v| {
            if v == 0 {
                0
            } else {
                (g.valence(v).unwrap() - 2 * g.loops_at(v) - 1).max(0)
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut current = vec![0i64; n];
    fn rec(
        g: &Multigraph,
        bounds: &[i64],
        current: &mut Vec<i64>,
        v: usize,
        out: &mut Vec<Vec<i64>>,
    ) {
        if v == current.len() {
            let d = GraphDivisor::new(current.clone());
            if divisor::dhar(g, &d, 0).unwrap().is_empty() {
                out.push(current.clone());
            }
            return;
        }
        if v == 0 {
            rec(g, bounds, current, 1, out);
            return;
        }
        for c in 0..=bounds[v] {
            current[v] = c;
            rec(g, bounds, current, v + 1, out);
        }
        current[v] = 0;
    }
    rec(g, &bounds, &mut current, 0, &mut out);
    out
}

/// One representative per divisor class of degree `d` on the complex:
/// superstable multidegrees crossed with all torsion tuples.
pub fn class_reps(cx: &MetrizedComplex, d: i64) -> Vec<ComplexClass> {
    let stables = superstables(cx.graph());
    let n = cx.components().len();
    let mut torsion_space: Vec<Vec<Torsion>> = vec![vec![]];
    for v in 0..n {
        let options = if cx.component(v).genus() == 1 {
            cx.component(v).group().elements()
        } else {
            vec![cx.component(v).group().zero()]
        };
        torsion_space = torsion_space
            .into_iter()
            .flat_map(|t| {
                options
                    .iter()
                    .map(move |o| {
                        let mut u = t.clone();
                        u.push(o.clone());
                        u
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let mut out = Vec::new();
    for stable in &stables {
        let mut mdeg = stable.clone();
        mdeg[0] = d - stable.iter().sum::<i64>();
        for torsions in &torsion_space {
            out.push(ComplexClass {
                parts: (0..n)
                    .map(|v| ComponentClass {
                        degree: mdeg[v],
                        torsion: torsions[v].clone(),
                    })
                    .collect(),
            });
        }
    }
    out
}

fn graph_instance_value(g: &Multigraph) -> Value {
    serde_json::to_value(g.to_json()).unwrap()
}

fn curve_instance_value(name: &str, x: &LogCurve) -> Value {
    json!({ "name": name, "curve": serde_json::to_value(x.to_json()).unwrap() })
}

fn class_value(cx: &MetrizedComplex, class: &ComplexClass) -> Value {
    let map: serde_json::Map<String, Value> = class
        .parts
        .iter()
        .enumerate()
        .map(|(v, part)| {
            (
                cx.graph().vertex_id(v).to_string(),
                json!({ "degree": part.degree, "torsion": part.torsion.residues }),
            )
        })
        .collect();
    Value::Object(map)
}

fn effective_window(cfg: &SweepConfig, genus: i64) -> (i64, i64) {
    let (lo, hi) = cfg.degree_window;
    (lo, hi.min(2 * genus + 2))
}

/// Graph Riemann–Roch sweep: rr_defect must vanish for every divisor in the
/// window over every enumerated graph. Exhaustive below 4 vertices / 6
/// edges, seeded random beyond.
pub fn sweep_rr_graph(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let mut report = SweepReport::new(cfg.clone());
    let graphs = if cfg.max_vertices <= 4 && cfg.max_edges <= 6 {
        enumerate_connected_multigraphs(cfg.max_vertices, cfg.max_edges)
    } else {
        (0..cfg.instances as u64).map(|i| gen_graph(cfg, i)).collect()
    };
    for g in &graphs {
        rr_graph_instance(&mut report, cfg, g);
    }
    Ok(report)
}

/// Riemann–Roch check on one graph; used by the per-object CLI verb.
pub fn rr_check_graph(cfg: &SweepConfig, g: &Multigraph) -> Result<SweepReport> {
    cfg.validate()?;
    let mut report = SweepReport::new(cfg.clone());
    rr_graph_instance(&mut report, cfg, g);
    Ok(report)
}

fn rr_graph_instance(report: &mut SweepReport, cfg: &SweepConfig, g: &Multigraph) {
    report.instances += 1;
    let genus = g.invariants().genus;
    let (lo, hi) = effective_window(cfg, genus);
    let k = g.canonical_divisor();
    let mut blind_engine = RankEngine::new(g.clone());
    let mut ac_engine = AcRankEngine::new(g);
    for d in lo..=hi {
        for coeffs in bounded_divisors(g.n_vertices(), d, -3, d + 3) {
            let div = GraphDivisor::new(coeffs);
            let defect = if cfg.loop_blind_rank {
                let r1 = blind_engine.rank(&div);
                let r2 = blind_engine.rank(&k.sub(&div));
                report.rank_evaluations += 2;
                r1 - r2 - (d - genus + 1)
            } else {
                report.rank_evaluations += 2;
                ac_engine.rr_defect(&div)
            };
            report.checked += 1;
            if defect != 0 {
                report.violations.push(Violation {
                    identity: "graph-riemann-roch".into(),
                    instance: graph_instance_value(g),
                    detail: json!({
                        "divisor": div.to_map(g),
                        "degree": d,
                        "defect": defect,
                        "loopBlindRank": cfg.loop_blind_rank,
                    }),
                });
            }
        }
    }
}

/// Instance set shared by the curve-level sweeps: every all-rational curve
/// on the enumerated graphs, plus seeded random mixed-genus curves.
pub fn curve_instances(cfg: &SweepConfig) -> Vec<(String, LogCurve)> {
    let mut out = Vec::new();
    for (i, g) in enumerate_connected_multigraphs(cfg.max_vertices, cfg.max_edges)
        .iter()
        .enumerate()
    {
        out.push((format!("rational-{}", i), fixtures::all_rational_curve(g)));
    }
    for i in 0..cfg.instances as u64 {
        out.push((format!("mixed-{}", i), gen_curve(cfg, i)));
    }
    out
}

/// Riemann–Roch sweep over complexes built from the given curves.
pub fn sweep_rr_curve_on(cfg: &SweepConfig, curves: &[(String, LogCurve)]) -> Result<SweepReport> {
    cfg.validate()?;
    let mut report = SweepReport::new(cfg.clone());
    for (name, x) in curves {
        report.instances += 1;
        let cx = logcurve::to_complex(x)?;
        let mut engine = ComplexRank::new(&cx)?;
        let omega = logcurve::omega_log(x)?;
        let genus = x.genus();
        let (lo, hi) = effective_window(cfg, genus);
        for d in lo..=hi {
            for class in class_reps(&cx, d) {
                let bundle = LogLineBundle {
                    classes: class.parts.clone(),
                    gluing: vec![0; x.nodes().len()],
                };
                let dual = logcurve::tensor(x, &omega, &logcurve::inverse(x, &bundle));
                let r1 = engine.rank(&class);
                let r2 = engine.rank(&dual.complex_class());
                report.rank_evaluations += 2;
                report.checked += 1;
                if r1 - r2 != d - genus + 1 {
                    report.violations.push(Violation {
                        identity: "log-riemann-roch".into(),
                        instance: curve_instance_value(name, x),
                        detail: json!({
                            "class": class_value(&cx, &class),
                            "degree": d,
                            "rank": r1,
                            "dualRank": r2,
                            "expectedDifference": d - genus + 1,
                        }),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Riemann–Roch over the standard instance set.
pub fn sweep_rr_curve(cfg: &SweepConfig) -> Result<SweepReport> {
    let curves = curve_instances(cfg);
    sweep_rr_curve_on(cfg, &curves)
}

/// Riemann–Roch at the complex level (same identity through the complex
/// API).
pub fn sweep_rr_complex(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let mut report = SweepReport::new(cfg.clone());
    let mut complexes: Vec<(String, MetrizedComplex)> = Vec::new();
    for (i, g) in enumerate_connected_multigraphs(cfg.max_vertices, cfg.max_edges)
        .iter()
        .enumerate()
    {
        complexes.push((format!("rational-{}", i), fixtures::all_rational_complex(g)));
    }
    for i in 0..cfg.instances as u64 {
        complexes.push((format!("mixed-{}", i), gen_complex(cfg, i)));
    }
    for (name, cx) in &complexes {
        rr_complex_instance(&mut report, cfg, name, cx)?;
    }
    Ok(report)
}

/// Riemann–Roch check on one complex; used by the per-object CLI verb.
pub fn rr_check_complex(cfg: &SweepConfig, cx: &MetrizedComplex) -> Result<SweepReport> {
    cfg.validate()?;
    let mut report = SweepReport::new(cfg.clone());
    rr_complex_instance(&mut report, cfg, "input", cx)?;
    Ok(report)
}

fn rr_complex_instance(
    report: &mut SweepReport,
    cfg: &SweepConfig,
    name: &str,
    cx: &MetrizedComplex,
) -> Result<()> {
    report.instances += 1;
    let mut engine = ComplexRank::new(cx)?;
    let k_class = complex::canonical_class(cx)?;
    let genus = cx.genus();
    let (lo, hi) = effective_window(cfg, genus);
    for d in lo..=hi {
        for class in class_reps(cx, d) {
            let dual = cx.class_sub(&k_class, &class);
            let r1 = engine.rank(&class);
            let r2 = engine.rank(&dual);
            report.rank_evaluations += 2;
            report.checked += 1;
            if r1 - r2 != d - genus + 1 {
                report.violations.push(Violation {
                    identity: "complex-riemann-roch".into(),
                    instance: json!({
                        "name": name,
                        "complex": serde_json::to_value(cx.to_json()).unwrap(),
                    }),
                    detail: json!({
                        "class": class_value(cx, &class),
                        "degree": d,
                        "rank": r1,
                        "dualRank": r2,
                    }),
                });
            }
        }
    }
    Ok(())
}

/// Specialization inequality rank(L) <= graph rank of the multidegree, with
/// equality on all-rational instances.
pub fn sweep_specialization(cfg: &SweepConfig) -> Result<SweepReport> {
    let curves = curve_instances(cfg);
    sweep_specialization_on(cfg, &curves)
}

/// Specialization sweep over an explicit instance list.
pub fn sweep_specialization_on(
    cfg: &SweepConfig,
    curves: &[(String, LogCurve)],
) -> Result<SweepReport> {
    cfg.validate()?;
    let mut report = SweepReport::new(cfg.clone());
    for (name, x) in curves {
        report.instances += 1;
        let cx = logcurve::to_complex(&x)?;
        let all_rational = cx.all_rational();
        let mut engine = ComplexRank::new(&cx)?;
        let mut graph_engine = AcRankEngine::new(cx.graph());
        let genus = x.genus();
        let (lo, hi) = effective_window(cfg, genus);
        for d in lo..=hi {
            for class in class_reps(&cx, d) {
                let r = engine.rank(&class);
                let rg = graph_engine.rank(&class.multidegree());
                report.rank_evaluations += 2;
                report.checked += 1;
                let bad = r > rg || (all_rational && r != rg);
                if bad {
                    report.violations.push(Violation {
                        identity: "specialization".into(),
                        instance: curve_instance_value(&name, &x),
                        detail: json!({
                            "class": class_value(&cx, &class),
                            "rank": r,
                            "graphRank": rg,
                            "allRational": all_rational,
                        }),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Clifford bound 2*rank <= degree over special classes, with equality
/// witnesses collected.
pub fn sweep_clifford(cfg: &SweepConfig) -> Result<SweepReport> {
    let curves = curve_instances(cfg);
    sweep_clifford_on(cfg, &curves)
}

/// Clifford sweep over an explicit instance list.
pub fn sweep_clifford_on(cfg: &SweepConfig, curves: &[(String, LogCurve)]) -> Result<SweepReport> {
    cfg.validate()?;
    let mut report = SweepReport::new(cfg.clone());
    for (name, x) in curves {
        report.instances += 1;
        let cx = logcurve::to_complex(&x)?;
        let mut engine = ComplexRank::new(&cx)?;
        let k_class = complex::canonical_class(&cx)?;
        let genus = x.genus();
        let lo = cfg.degree_window.0.max(0);
        let hi = cfg.degree_window.1.min(2 * genus - 2);
        for d in lo..=hi {
            for class in class_reps(&cx, d) {
                let r = engine.rank(&class);
                let r_dual = engine.rank(&cx.class_sub(&k_class, &class));
                report.rank_evaluations += 2;
                if r < 0 || r_dual < 0 {
                    continue; // not special
                }
                report.checked += 1;
                if 2 * r > d {
                    report.violations.push(Violation {
                        identity: "clifford".into(),
                        instance: curve_instance_value(&name, &x),
                        detail: json!({
                            "class": class_value(&cx, &class),
                            "degree": d,
                            "rank": r,
                        }),
                    });
                } else if 2 * r == d {
                    report.witnesses.push(json!({
                        "instance": name,
                        "degree": d,
                        "rank": r,
                        "class": class_value(&cx, &class),
                    }));
                }
            }
        }
    }
    Ok(report)
}

/// Kernel of the quotient onto the complex Picard group: order must be
/// torus^b1 on every instance, for torus orders 1..3.
pub fn sweep_ses(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let mut report = SweepReport::new(cfg.clone());
    let mut curves: Vec<(String, LogCurve)> = ["P2", "B2", "B3", "C3", "LOOP1"]
        .iter()
        .map(|name| {
            let g = match *name {
                "P2" => fixtures::p2(),
                "B2" => fixtures::b2(),
                "B3" => fixtures::b3(),
                "C3" => fixtures::c3(),
                _ => fixtures::loop1(),
            };
            (format!("fixture-{}", name), fixtures::all_rational_curve(&g))
        })
        .collect();
    for i in 0..cfg.instances.min(10) as u64 {
        curves.push((format!("mixed-{}", i), gen_curve(cfg, i)));
    }
    for (name, x) in &curves {
        report.instances += 1;
        for m in 1..=3.min(cfg.max_group_order) {
            let torus = TorusModel::new(m)?;
            let kernel = logcurve::quotient_kernel(x, &torus)?;
            report.checked += 1;
            if kernel.order != kernel.expected || !kernel.full {
                report.violations.push(Violation {
                    identity: "ses-kernel".into(),
                    instance: curve_instance_value(name, x),
                    detail: serde_json::to_value(&kernel).unwrap(),
                });
            }
        }
    }
    Ok(report)
}

/// Curve/complex correspondence: both composites are the identity up to the
/// canonical renaming of half-edges, and transported automorphisms check
/// out.
pub fn sweep_roundtrip(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let mut report = SweepReport::new(cfg.clone());
    for i in 0..cfg.instances as u64 {
        report.instances += 1;
        let x = gen_curve_roundtrip(cfg, i);
        let name = format!("roundtrip-{}", i);
        let cx = logcurve::to_complex(&x)?;
        let (back, hom) = logcurve::from_complex(&cx)?;
        report.checked += 1;
        if back != x {
            report.violations.push(Violation {
                identity: "roundtrip-curve".into(),
                instance: curve_instance_value(&name, &x),
                detail: json!({ "reconstructed": back.to_json() }),
            });
            continue;
        }
        if hom.source_rank != x.nodes().len() || hom.target_rank != x.monoid_rank() {
            report.violations.push(Violation {
                identity: "roundtrip-base-hom".into(),
                instance: curve_instance_value(&name, &x),
                detail: json!({ "sourceRank": hom.source_rank, "targetRank": hom.target_rank }),
            });
        }
        let cx2 = logcurve::to_complex(&back)?;
        report.checked += 1;
        if !complex::structurally_equal(&cx, &cx2) {
            report.violations.push(Violation {
                identity: "roundtrip-complex".into(),
                instance: curve_instance_value(&name, &x),
                detail: json!({ "reconstructed": cx2.to_json() }),
            });
            continue;
        }
        // transported automorphisms must pass in both directions
        let autos = complex::automorphisms(&cx, 8, 6)?;
        for phi in &autos {
            report.checked += 1;
            let there = complex::check_automorphism(&cx, phi);
            let back_again = complex::check_automorphism(&cx2, phi);
            if !there.is_empty() || !back_again.is_empty() {
                report.violations.push(Violation {
                    identity: "roundtrip-automorphism".into(),
                    instance: curve_instance_value(&name, &x),
                    detail: json!({ "violations": [there, back_again] }),
                });
            }
        }
        if !autos
            .iter()
            .any(|a| a == &complex::identity_automorphism(&cx))
        {
            report.violations.push(Violation {
                identity: "roundtrip-automorphism".into(),
                instance: curve_instance_value(&name, &x),
                detail: json!({ "missing": "identity automorphism" }),
            });
        }
    }
    Ok(report)
}
