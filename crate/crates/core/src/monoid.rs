//! Free sharp monoids N^k used as edge-length value monoids.
//!
//! Only free commutative monoids on finitely many generators are supported;
//! an element is a vector of non-negative integers and the only unit is zero.
//! Node smoothing parameters live here, as does the bookkeeping homomorphism
//! N^E -> P recorded when a curve is rebuilt from a complex.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Element of the free sharp monoid N^k.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonoidElement {
    pub coords: Vec<u64>,
}

impl MonoidElement {
    pub fn new(coords: Vec<u64>) -> Self {
        MonoidElement { coords }
    }

    pub fn zero(rank: usize) -> Self {
        MonoidElement {
            coords: vec![0; rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &MonoidElement) -> Result<MonoidElement> {
        if self.rank() != other.rank() {
            return Err(Error::input("monoid elements have different ranks"));
        }
        Ok(MonoidElement {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Homomorphism N^source -> N^target given by a non-negative integer matrix
/// (target_rank rows by source_rank columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidHom {
    pub source_rank: usize,
    pub target_rank: usize,
    pub matrix: Vec<Vec<u64>>,
}

impl MonoidHom {
    pub fn new(source_rank: usize, target_rank: usize, matrix: Vec<Vec<u64>>) -> Result<Self> {
        if matrix.len() != target_rank || matrix.iter().any(|row| row.len() != source_rank) {
            return Err(Error::input("monoid hom matrix has wrong shape"));
        }
        Ok(MonoidHom {
            source_rank,
            target_rank,
            matrix,
        })
    }

    /// Hom sending every generator of N^source to the given targets (columns).
    pub fn from_generator_images(source_rank: usize, images: &[MonoidElement]) -> Result<Self> {
        if images.len() != source_rank {
            return Err(Error::input("one image per generator required"));
        }
        let target_rank = images.first().map_or(0, MonoidElement::rank);
        if images.iter().any(|img| img.rank() != target_rank) {
            return Err(Error::input("generator images have mixed ranks"));
        }
        let matrix = (0..target_rank)
            .map(|i| images.iter().map(|img| img.coords[i]).collect())
            .collect();
        Ok(MonoidHom {
            source_rank,
            target_rank,
            matrix,
        })
    }
}

/// Applies a homomorphism to an element (matrix-vector product).
pub fn hom_apply(h: &MonoidHom, m: &MonoidElement) -> Result<MonoidElement> {
    if m.rank() != h.source_rank {
        return Err(Error::input(format!(
            "element of rank {} fed to hom with source rank {}",
            m.rank(),
            h.source_rank
        )));
    }
    let coords = h
        .matrix
        .iter()
        .map(|row| row.iter().zip(&m.coords).map(|(a, b)| a * b).sum())
        .collect();
    Ok(MonoidElement { coords })
}

/// Descriptor of the characteristic monoid N^2 (+)_N P at a node, where
/// N -> N^2 is the diagonal and N -> P sends 1 to the smoothing parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeMonoidPresentation {
    pub base: MonoidElement,
}

/// Records the amalgamated-sum presentation for a node with parameter `p`.
/// The parameter of a node is never zero.
pub fn node_presentation(p: &MonoidElement) -> Result<NodeMonoidPresentation> {
    if p.is_zero() {
        return Err(Error::input(
            "node smoothing parameter must be nonzero in a sharp monoid",
        ));
    }
    Ok(NodeMonoidPresentation { base: p.clone() })
}

/// Over the base N (rank 1): is the parameter exactly the generator? This is
/// the per-node semistability test; it is only defined over rank-1 bases.
pub fn is_unit(p: &MonoidElement) -> Result<bool> {
    if p.rank() != 1 {
        return Err(Error::input(
            "semistability is only defined over the standard log point (rank-1 base)",
        ));
    }
    Ok(p.coords[0] == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hom_apply_examples() {
        let h = MonoidHom::new(2, 1, vec![vec![1, 1]]).unwrap();
        let m = MonoidElement::new(vec![2, 3]);
        assert_eq!(hom_apply(&h, &m).unwrap(), MonoidElement::new(vec![5]));

        // every edge generator mapping to 1 in N
        let all_ones = MonoidHom::new(3, 1, vec![vec![1, 1, 1]]).unwrap();
        let unit = MonoidElement::new(vec![0, 1, 0]);
        assert_eq!(
            hom_apply(&all_ones, &unit).unwrap(),
            MonoidElement::new(vec![1])
        );

        let zero_map = MonoidHom::new(2, 2, vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(
            hom_apply(&zero_map, &m).unwrap(),
            MonoidElement::zero(2)
        );
    }

    #[test]
    fn hom_apply_rank_mismatch() {
        let h = MonoidHom::new(2, 1, vec![vec![1, 1]]).unwrap();
        assert!(matches!(
            hom_apply(&h, &MonoidElement::new(vec![1])),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn node_presentation_examples() {
        let semistable = node_presentation(&MonoidElement::new(vec![1])).unwrap();
        assert_eq!(semistable.base, MonoidElement::new(vec![1]));
        let n2 = node_presentation(&MonoidElement::new(vec![1, 0])).unwrap();
        assert_eq!(n2.base, MonoidElement::new(vec![1, 0]));
        assert!(node_presentation(&MonoidElement::zero(2)).is_err());
    }

    #[test]
    fn node_presentation_serde_roundtrip() {
        let p = node_presentation(&MonoidElement::new(vec![2, 0, 1])).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: NodeMonoidPresentation = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
        assert_eq!(json, serde_json::to_string(&back).unwrap());
    }

    #[test]
    fn is_unit_examples() {
        assert!(is_unit(&MonoidElement::new(vec![1])).unwrap());
        assert!(!is_unit(&MonoidElement::new(vec![2])).unwrap());
        assert!(is_unit(&MonoidElement::new(vec![1, 0])).is_err());
    }

    proptest! {
        #[test]
        fn hom_apply_is_additive(
            matrix in proptest::collection::vec(proptest::collection::vec(0u64..5, 3), 2),
            a in proptest::collection::vec(0u64..20, 3),
            b in proptest::collection::vec(0u64..20, 3),
        ) {
            let h = MonoidHom::new(3, 2, matrix).unwrap();
            let a = MonoidElement::new(a);
            let b = MonoidElement::new(b);
            let sum = a.add(&b).unwrap();
            let lhs = hom_apply(&h, &sum).unwrap();
            let rhs = hom_apply(&h, &a).unwrap().add(&hom_apply(&h, &b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(hom_apply(&h, &MonoidElement::zero(3)).unwrap(), MonoidElement::zero(2));
        }
    }
}
