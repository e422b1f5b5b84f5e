//! The explicit genus-one elliptic families over the tropical projective
//! line: psi pull-back degrees from transition cocycles, and the Isom
//! fiber-product fans whose balancing detects mismatched gluing slopes.

use crate::cycles::{check_balancing, BalancingReport, ChartCocycle, ConeComplex, Int, WeightedFan};
use crate::error::Error;
use std::collections::BTreeMap;
use std::sync::Arc;

/// The family C^a of tropical elliptic curves over TP^1: the total space is
/// glued from four quadrants with the transition y_+ = y_- - a x_- over the
/// central fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EllipticFamilySpec {
    pub a: i64,
}

impl EllipticFamilySpec {
    /// The cocycle of the pulled-back cotangent bundle along the marked
    /// section: s_1^*(y_+ - y_-) = a x, the bundle O(a) on TP^1.
    pub fn section_cocycle(&self) -> ChartCocycle {
        ChartCocycle::tp1(self.a)
    }
}

/// Degree of the pull-back of the psi class under f_a: equals the gluing
/// slope a.
pub fn psi_pullback_degree(spec: EllipticFamilySpec) -> Result<Int, Error> {
    spec.section_cocycle().c1_degree()
}

/// The Isom fiber product of the families C^a and C^b over the moduli of
/// one-marked genus-one curves: four doubled rays in a rank-3 lattice.
pub struct IsomFan {
    pub a: i64,
    pub b: i64,
    pub fan: WeightedFan,
}

/// Construct the Isom fan: rays (1,1,0), (1,-1,b), (-1,-1,b-a), (-1,1,-a),
/// each carried with weight two for the two glued copies.
pub fn isom_fan(a: i64, b: i64) -> Result<IsomFan, Error> {
    let raw = [
        vec![1, 1, 0],
        vec![1, -1, b],
        vec![-1, -1, b - a],
        vec![-1, 1, -a],
    ];
    let rays: Vec<Vec<Int>> = raw
        .iter()
        .map(|r| {
            let v: Vec<Int> = r.iter().map(|&x| Int::from(x)).collect();
            let (p, _) = crate::lattice::primitive_part(&v);
            p
        })
        .collect();
    let maximal = (0..rays.len()).map(|i| vec![i]).collect();
    let complex = Arc::new(ConeComplex::with_all_faces(3, rays, maximal)?);
    let mut weights = BTreeMap::new();
    for c in complex.cones_of_dim(1) {
        weights.insert(c, Int::from(2));
    }
    let fan = WeightedFan::new(complex, 1, weights)?;
    Ok(IsomFan { a, b, fan })
}

pub fn isom_balancing(a: i64, b: i64) -> Result<BalancingReport, Error> {
    let isom = isom_fan(a, b)?;
    check_balancing(&isom.fan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_pullback_is_the_slope() {
        assert_eq!(psi_pullback_degree(EllipticFamilySpec { a: 1 }).unwrap(), Int::from(1));
        assert_eq!(psi_pullback_degree(EllipticFamilySpec { a: 0 }).unwrap(), Int::from(0));
        assert_eq!(psi_pullback_degree(EllipticFamilySpec { a: -3 }).unwrap(), Int::from(-3));
    }

    #[test]
    fn isom_balanced_iff_equal_slopes() {
        assert!(isom_balancing(2, 2).unwrap().is_balanced());
        assert!(!isom_balancing(0, 1).unwrap().is_balanced());
        assert!(isom_balancing(0, 0).unwrap().is_balanced());
        for a in -5..=5 {
            for b in -5..=5 {
                assert_eq!(isom_balancing(a, b).unwrap().is_balanced(), a == b, "a={a} b={b}");
            }
        }
    }
}
