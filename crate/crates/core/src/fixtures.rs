//! Named desk-scale fixtures used across the test suites and emitted by the
//! CLI: the six small graphs, the rational and elliptic complexes over them,
//! and the corresponding log curves.

use serde_json::Value;

use crate::complex::MetrizedComplex;
use crate::component::{AbelianGroup, ComponentModel, Torsion};
use crate::graph::Multigraph;
use crate::logcurve::{self, LogCurve};
use crate::monoid::MonoidElement;

fn unit() -> MonoidElement {
    MonoidElement::new(vec![1])
}

/// One weight-0 vertex, no edges.
pub fn k1() -> Multigraph {
    Multigraph::from_parts(vec![("v1".into(), 0)], vec![]).unwrap()
}

/// Two vertices joined by one edge.
pub fn p2() -> Multigraph {
    Multigraph::from_parts(
        vec![("v1".into(), 0), ("v2".into(), 0)],
        vec![(
            "e1".into(),
            ("e1a".into(), "v1".into()),
            ("e1b".into(), "v2".into()),
            unit(),
        )],
    )
    .unwrap()
}

/// 3-cycle.
pub fn c3() -> Multigraph {
    Multigraph::from_parts(
        vec![("v1".into(), 0), ("v2".into(), 0), ("v3".into(), 0)],
        vec![
            (
                "e1".into(),
                ("e1a".into(), "v1".into()),
                ("e1b".into(), "v2".into()),
                unit(),
            ),
            (
                "e2".into(),
                ("e2a".into(), "v2".into()),
                ("e2b".into(), "v3".into()),
                unit(),
            ),
            (
                "e3".into(),
                ("e3a".into(), "v1".into()),
                ("e3b".into(), "v3".into()),
                unit(),
            ),
        ],
    )
    .unwrap()
}

/// Two vertices, two parallel edges.
pub fn b2() -> Multigraph {
    banana(2)
}

/// Two vertices, three parallel edges.
pub fn b3() -> Multigraph {
    banana(3)
}

fn banana(n: usize) -> Multigraph {
    let edges = (1..=n)
        .map(|i| {
            (
                format!("e{}", i),
                (format!("e{}a", i), "v1".to_string()),
                (format!("e{}b", i), "v2".to_string()),
                unit(),
            )
        })
        .collect();
    Multigraph::from_parts(vec![("v1".into(), 0), ("v2".into(), 0)], edges).unwrap()
}

/// One vertex with one loop.
pub fn loop1() -> Multigraph {
    Multigraph::from_parts(
        vec![("v1".into(), 0)],
        vec![(
            "e1".into(),
            ("e1a".into(), "v1".into()),
            ("e1b".into(), "v1".into()),
            unit(),
        )],
    )
    .unwrap()
}

/// All-rational complex over a weight-0 graph: one projective line per
/// vertex, with the attachment points named after the half-edges.
pub fn all_rational_complex(g: &Multigraph) -> MetrizedComplex {
    let mut components = Vec::new();
    for v in 0..g.n_vertices() {
        assert_eq!(g.weight(v), 0, "all-rational complexes need weight-0 graphs");
        let ids: Vec<&str> = g
            .edges()
            .iter()
            .flat_map(|e| e.halves.iter())
            .filter(|h| h.vertex == v)
            .map(|h| h.id.as_str())
            .collect();
        components.push(ComponentModel::genus_zero(&ids).unwrap());
    }
    let attach = g
        .edges()
        .iter()
        .map(|edge| {
            [
                components[edge.halves[0].vertex]
                    .point_index(&edge.halves[0].id)
                    .unwrap(),
                components[edge.halves[1].vertex]
                    .point_index(&edge.halves[1].id)
                    .unwrap(),
            ]
        })
        .collect();
    let rank = if g.n_edges() > 0 { g.monoid_rank() } else { 1 };
    MetrizedComplex::new(g.clone(), components, attach, vec![], Some(rank)).unwrap()
}

/// 3-cycle of projective lines, unit lengths.
pub fn cpx_c3_rat() -> MetrizedComplex {
    all_rational_complex(&c3())
}

/// Two projective lines along two parallel edges.
pub fn cpx_b2_rat() -> MetrizedComplex {
    all_rational_complex(&b2())
}

/// One projective line with a loop; the roster carries one free point `y`
/// besides the two attachment points.
pub fn cpx_loop_rat() -> MetrizedComplex {
    let g = loop1();
    let component = ComponentModel::genus_zero(&["e1a", "e1b", "y"]).unwrap();
    let attach = vec![[
        component.point_index("e1a").unwrap(),
        component.point_index("e1b").unwrap(),
    ]];
    MetrizedComplex::new(g, vec![component], attach, vec![], Some(1)).unwrap()
}

/// A single elliptic-model vertex with group Z/5, no edges.
pub fn cpx_ell5() -> MetrizedComplex {
    let g = Multigraph::from_parts(vec![("v1".into(), 1)], vec![]).unwrap();
    let group = AbelianGroup::cyclic(5).unwrap();
    let points = (0..5)
        .map(|i| (format!("t{}", i), Torsion { residues: vec![i] }))
        .collect();
    let component = ComponentModel::new(1, group, points).unwrap();
    MetrizedComplex::new(g, vec![component], vec![], vec![], Some(1)).unwrap()
}

/// Log curve with two rational components glued along two nodes.
pub fn x_b2() -> LogCurve {
    logcurve::from_complex(&cpx_b2_rat()).unwrap().0
}

/// Rational curve with one self-intersection.
pub fn x_nodalcubic() -> LogCurve {
    logcurve::from_complex(&cpx_loop_rat()).unwrap().0
}

/// Smooth elliptic-model curve over the standard log point.
pub fn x_ell5() -> LogCurve {
    logcurve::from_complex(&cpx_ell5()).unwrap().0
}

/// All-rational curve over a weight-0 graph, unit lengths.
pub fn all_rational_curve(g: &Multigraph) -> LogCurve {
    logcurve::from_complex(&all_rational_complex(g)).unwrap().0
}

/// Test helper: the P2 rational curve carrying one marked point.
pub fn marked_p2_curve() -> LogCurve {
    let g = p2();
    let c1 = ComponentModel::genus_zero(&["e1a", "m"]).unwrap();
    let c2 = ComponentModel::genus_zero(&["e1b"]).unwrap();
    let attach = vec![[
        c1.point_index("e1a").unwrap(),
        c2.point_index("e1b").unwrap(),
    ]];
    let marks = vec![(0, c1.point_index("m").unwrap())];
    let cx = MetrizedComplex::new(g, vec![c1, c2], attach, marks, Some(1)).unwrap();
    logcurve::from_complex(&cx).unwrap().0
}

/// Every named fixture with its canonical JSON form.
pub fn all() -> Vec<(&'static str, Value)> {
    vec![
        ("K1", serde_json::to_value(k1().to_json()).unwrap()),
        ("P2", serde_json::to_value(p2().to_json()).unwrap()),
        ("C3", serde_json::to_value(c3().to_json()).unwrap()),
        ("B2", serde_json::to_value(b2().to_json()).unwrap()),
        ("B3", serde_json::to_value(b3().to_json()).unwrap()),
        ("LOOP1", serde_json::to_value(loop1().to_json()).unwrap()),
        (
            "CPX-C3-RAT",
            serde_json::to_value(cpx_c3_rat().to_json()).unwrap(),
        ),
        (
            "CPX-B2-RAT",
            serde_json::to_value(cpx_b2_rat().to_json()).unwrap(),
        ),
        (
            "CPX-LOOP-RAT",
            serde_json::to_value(cpx_loop_rat().to_json()).unwrap(),
        ),
        (
            "CPX-ELL5",
            serde_json::to_value(cpx_ell5().to_json()).unwrap(),
        ),
        ("X-B2", serde_json::to_value(x_b2().to_json()).unwrap()),
        (
            "X-NODALCUBIC",
            serde_json::to_value(x_nodalcubic().to_json()).unwrap(),
        ),
        ("X-ELL5", serde_json::to_value(x_ell5().to_json()).unwrap()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexJson;
    use crate::graph::GraphJson;
    use crate::logcurve::CurveJson;

    #[test]
    fn fixtures_parse_back() {
        for (name, value) in all() {
            if name.starts_with("CPX") {
                let json: ComplexJson = serde_json::from_value(value).unwrap();
                MetrizedComplex::from_json(&json).unwrap();
            } else if name.starts_with("X-") {
                let json: CurveJson = serde_json::from_value(value).unwrap();
                LogCurve::from_json(&json).unwrap();
            } else {
                let json: GraphJson = serde_json::from_value(value).unwrap();
                Multigraph::from_json(&json).unwrap();
            }
        }
    }

    #[test]
    fn fixture_genera() {
        assert_eq!(cpx_loop_rat().genus(), 1);
        assert_eq!(cpx_ell5().genus(), 1);
        assert_eq!(cpx_b2_rat().genus(), 1);
        assert_eq!(all_rational_complex(&b3()).genus(), 2);
        assert_eq!(x_b2().genus(), 1);
        assert_eq!(x_nodalcubic().genus(), 1);
    }

    #[test]
    fn emission_is_deterministic() {
        let first = serde_json::to_string(&all().into_iter().map(|(_, v)| v).collect::<Vec<_>>()).unwrap();
        let second = serde_json::to_string(&all().into_iter().map(|(_, v)| v).collect::<Vec<_>>()).unwrap();
        assert_eq!(first, second);
    }
}
