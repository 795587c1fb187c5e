//! Finite, exactly computable models of the smooth components.
//!
//! A genus-0 component is a projective line: divisor classes are degrees. A
//! genus-1 component carries a finite abelian group Γ modeling its degree-0
//! class group, with every element of Γ available as a point class, so a
//! class is a (degree, torsion) pair and h^0 is computed by the classical
//! rules. Genus >= 2 components are representable as data but every
//! exact-rank operation refuses them, because h^0 is not a function of
//! (degree, torsion) alone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Finite abelian group given by invariant factors (each >= 2, each dividing
/// the next). The trivial group has no factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    factors: Vec<i64>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { factors: vec![] }
    }

    pub fn new(factors: Vec<i64>) -> Result<Self> {
        for w in factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::invalid(
                    "group factors must form a divisibility chain",
                ));
            }
        }
        if factors.iter().any(|&f| f < 2) {
            return Err(Error::invalid("group invariant factors must be >= 2"));
        }
        Ok(AbelianGroup { factors })
    }

    pub fn cyclic(n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("cyclic group order must be >= 1"));
        }
        if n == 1 {
            Ok(AbelianGroup::trivial())
        } else {
            AbelianGroup::new(vec![n])
        }
    }

    pub fn factors(&self) -> &[i64] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> i64 {
        self.factors.iter().product()
    }

    pub fn zero(&self) -> Torsion {
        Torsion {
            residues: vec![0; self.factors.len()],
        }
    }

    pub fn reduce(&self, residues: &[i64]) -> Result<Torsion> {
        if residues.len() != self.factors.len() {
            return Err(Error::input(format!(
                "torsion tuple has length {}, group has {} factors",
                residues.len(),
                self.factors.len()
            )));
        }
        Ok(Torsion {
            residues: residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &f)| r.rem_euclid(f))
                .collect(),
        })
    }

    pub fn add(&self, a: &Torsion, b: &Torsion) -> Torsion {
        Torsion {
            residues: a
                .residues
                .iter()
                .zip(&b.residues)
                .zip(&self.factors)
                .map(|((&x, &y), &f)| (x + y).rem_euclid(f))
                .collect(),
        }
    }

    pub fn neg(&self, a: &Torsion) -> Torsion {
        Torsion {
            residues: a
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(&x, &f)| (-x).rem_euclid(f))
                .collect(),
        }
    }

    pub fn sub(&self, a: &Torsion, b: &Torsion) -> Torsion {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Torsion, k: i64) -> Torsion {
        Torsion {
            residues: a
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(&x, &f)| (x % f * (k % f)).rem_euclid(f))
                .collect(),
        }
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<Torsion> {
        let mut out = vec![Torsion { residues: vec![] }];
        for &f in &self.factors {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..f).map(move |r| {
                        let mut residues = t.residues.clone();
                        residues.push(r);
                        Torsion { residues }
                    })
                })
                .collect();
        }
        out
    }
}

/// Element of a fixed finite abelian group, reduced mod the factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Torsion {
    pub residues: Vec<i64>,
}

impl Torsion {
    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }
}

/// Wire format for a component model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub genus: u32,
    #[serde(default)]
    pub group: Vec<i64>,
    #[serde(default)]
    pub points: Vec<PointJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub id: String,
    #[serde(default)]
    pub class: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointInfo {
    pub id: String,
    pub class: Torsion,
}

/// Model of one smooth component with its named-point roster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentModel {
    genus: u32,
    group: AbelianGroup,
    points: Vec<PointInfo>,
    point_index: BTreeMap<String, usize>,
}

impl ComponentModel {
    pub fn new(genus: u32, group: AbelianGroup, points: Vec<(String, Torsion)>) -> Result<Self> {
        if genus != 1 && !group.is_trivial() {
            return Err(Error::invalid(
                "only genus-1 components carry a nontrivial class group",
            ));
        }
        let mut infos: Vec<PointInfo> = Vec::new();
        for (id, class) in points {
            if class.residues.len() != group.factors().len() {
                return Err(Error::invalid(format!(
                    "point {:?} carries a class outside the component group",
                    id
                )));
            }
            let class = group.reduce(&class.residues)?;
            infos.push(PointInfo { id, class });
        }
        // On a genus-1 model every element of the group is available as a
        // point class; complete the roster with synthesized points.
        if genus == 1 {
            let mut have: Vec<&Torsion> = infos.iter().map(|p| &p.class).collect();
            let mut synthesized = Vec::new();
            for t in group.elements() {
                if !have.contains(&&t) {
                    let label = t
                        .residues
                        .iter()
                        .map(|r| r.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    let mut id = format!("@{}", label);
                    while infos.iter().any(|p| p.id == id) || synthesized.iter().any(|p: &PointInfo| p.id == id) {
                        id.push('_');
                    }
                    synthesized.push(PointInfo { id, class: t });
                }
            }
            for p in &synthesized {
                have.push(&p.class);
            }
            infos.extend(synthesized);
        }
        infos.sort_by(|a, b| a.id.cmp(&b.id));
        let mut point_index = BTreeMap::new();
        for (i, p) in infos.iter().enumerate() {
            if point_index.insert(p.id.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate point id {:?}", p.id)));
            }
        }
        Ok(ComponentModel {
            genus,
            group,
            points: infos,
            point_index,
        })
    }

    pub fn genus_zero(point_ids: &[&str]) -> Result<Self> {
        let group = AbelianGroup::trivial();
        let zero = group.zero();
        ComponentModel::new(
            0,
            group.clone(),
            point_ids.iter().map(|&id| (id.to_string(), zero.clone())).collect(),
        )
    }

    pub fn from_json(json: &ComponentJson) -> Result<Self> {
        let group = AbelianGroup::new(json.group.clone())?;
        let points = json
            .points
            .iter()
            .map(|p| {
                (
                    p.id.clone(),
                    Torsion {
                        residues: p.class.clone(),
                    },
                )
            })
            .collect();
        ComponentModel::new(json.genus, group, points)
    }

    pub fn to_json(&self) -> ComponentJson {
        ComponentJson {
            genus: self.genus,
            group: self.group.factors().to_vec(),
            points: self
                .points
                .iter()
                .map(|p| PointJson {
                    id: p.id.clone(),
                    class: p.class.residues.clone(),
                })
                .collect(),
        }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn points(&self) -> &[PointInfo] {
        &self.points
    }

    pub fn point_index(&self, id: &str) -> Result<usize> {
        self.point_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown point {:?}", id)))
    }

    pub fn point_id(&self, idx: usize) -> &str {
        &self.points[idx].id
    }

    pub fn point_class(&self, idx: usize) -> &Torsion {
        &self.points[idx].class
    }

    fn require_rankable(&self) -> Result<()> {
        if self.genus >= 2 {
            return Err(Error::unsupported(
                "exact rank calculus is only available for genus <= 1 components",
            ));
        }
        Ok(())
    }
}

/// Divisor class on a component: degree plus torsion (trivial for genus 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentClass {
    pub degree: i64,
    pub torsion: Torsion,
}

/// Multiset of roster points with integer multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentDivisor {
    pub multiplicities: BTreeMap<usize, i64>,
}

impl ComponentDivisor {
    pub fn empty() -> Self {
        ComponentDivisor::default()
    }

    pub fn single(point: usize, mult: i64) -> Self {
        let mut multiplicities = BTreeMap::new();
        if mult != 0 {
            multiplicities.insert(point, mult);
        }
        ComponentDivisor { multiplicities }
    }

    pub fn push(&mut self, point: usize, mult: i64) {
        let entry = self.multiplicities.entry(point).or_insert(0);
        *entry += mult;
        if *entry == 0 {
            self.multiplicities.remove(&point);
        }
    }

    pub fn degree(&self) -> i64 {
        self.multiplicities.values().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.multiplicities.values().all(|&m| m >= 0)
    }

    pub fn from_map(model: &ComponentModel, map: &BTreeMap<String, i64>) -> Result<Self> {
        let mut div = ComponentDivisor::empty();
        for (id, &mult) in map {
            div.push(model.point_index(id)?, mult);
        }
        Ok(div)
    }

    pub fn to_map(&self, model: &ComponentModel) -> BTreeMap<String, i64> {
        self.multiplicities
            .iter()
            .map(|(&p, &m)| (model.point_id(p).to_string(), m))
            .collect()
    }
}

/// Class of a divisor: degree and the sum of the point classes.
pub fn class_of(model: &ComponentModel, div: &ComponentDivisor) -> Result<ComponentClass> {
    let mut torsion = model.group().zero();
    let mut degree = 0i64;
    for (&point, &mult) in &div.multiplicities {
        if point >= model.points().len() {
            return Err(Error::input("divisor references a point outside the roster"));
        }
        degree += mult;
        torsion = model
            .group()
            .add(&torsion, &model.group().scale(model.point_class(point), mult));
    }
    Ok(ComponentClass { degree, torsion })
}

/// Classical h^0 for genus <= 1.
pub fn h0(model: &ComponentModel, class: &ComponentClass) -> Result<i64> {
    model.require_rankable()?;
    Ok(match model.genus() {
        0 => (class.degree + 1).max(0),
        _ => {
            if class.degree < 0 {
                0
            } else if class.degree == 0 {
                if class.torsion.is_zero() {
                    1
                } else {
                    0
                }
            } else {
                class.degree
            }
        }
    })
}

pub fn is_effective_class(model: &ComponentModel, class: &ComponentClass) -> Result<bool> {
    Ok(h0(model, class)? >= 1)
}

/// Canonical class: (-2, 0) in genus 0, (0, 0) in genus 1.
pub fn canonical_class(model: &ComponentModel) -> Result<ComponentClass> {
    model.require_rankable()?;
    Ok(ComponentClass {
        degree: 2 * model.genus() as i64 - 2,
        torsion: model.group().zero(),
    })
}
