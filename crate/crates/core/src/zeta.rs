//! Witten zeta functions `ζ_G(s) = Σ_ρ (dim ρ)^{-s}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::characters::CharacterTable;

/// Terms used in the accelerated eta series. The error is below
/// `3 / (3 + √8)^n`, far under `1e-15` here.
const ETA_TERMS: usize = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZetaError {
    #[error("zeta diverges at s = {0}; need s > 1")]
    Divergent(f64),
    #[error("degree multiset must be non-empty with positive entries")]
    InvalidDegrees,
}

/// Irreducible dimensions of a group, with multiplicity, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DegreeMultiset(Vec<u32>);

impl DegreeMultiset {
    pub fn new(mut degrees: Vec<u32>) -> Result<Self, ZetaError> {
        if degrees.is_empty() || degrees.contains(&0) {
            return Err(ZetaError::InvalidDegrees);
        }
        degrees.sort_unstable();
        Ok(DegreeMultiset(degrees))
    }

    pub fn from_table(table: &CharacterTable) -> Self {
        DegreeMultiset::new(table.degrees().to_vec()).expect("validated table")
    }

    pub fn degrees(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sum_of_squares(&self) -> u64 {
        self.0.iter().map(|&d| (d as u64).pow(2)).sum()
    }
}

/// `Σ d^{-s}`, exact.
pub fn zeta_finite(degrees: &DegreeMultiset, s: i64) -> BigRational {
    degrees
        .degrees()
        .iter()
        .map(|&d| BigRational::from_integer(BigInt::from(d)).pow(-s as i32))
        .sum()
}

/// `Σ d^{-s}` in floating point.
pub fn zeta_finite_real(degrees: &DegreeMultiset, s: f64) -> f64 {
    degrees.degrees().iter().map(|&d| (d as f64).powf(-s)).sum()
}

/// Riemann zeta for real `s > 1`.
///
/// Uses the Dirichlet eta series `η(s) = Σ (-1)^k (k+1)^{-s}` with the
/// Chebyshev-weighted acceleration of Borwein, then
/// `ζ(s) = η(s) / (1 - 2^{1-s})`.
pub fn riemann_zeta(s: f64) -> Result<f64, ZetaError> {
    if !(s > 1.0) {
        return Err(ZetaError::Divergent(s));
    }
    let n = ETA_TERMS;
    // d[k] = n Σ_{i≤k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut d = Vec::with_capacity(n + 1);
    let mut term = 1.0;
    let mut acc = 1.0;
    d.push(acc);
    for i in 1..=n {
        let (nf, i_f) = (n as f64, i as f64);
        term *= 4.0 * (nf + i_f - 1.0) * (nf - i_f + 1.0) / ((2.0 * i_f) * (2.0 * i_f - 1.0));
        acc += term;
        d.push(acc);
    }
    let dn = d[n];
    let mut eta = 0.0;
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        eta += sign * (d[k] - dn) / ((k + 1) as f64).powf(s);
    }
    eta = -eta / dn;
    Ok(eta / (1.0 - 2f64.powf(1.0 - s)))
}

/// `ζ_{SO(3)}(s)`: SO(3) has one irreducible of each odd dimension, so this
/// is `(1 - 2^{-s}) ζ(s)`.
pub fn so3_zeta(s: f64) -> Result<f64, ZetaError> {
    Ok((1.0 - 2f64.powf(-s)) * riemann_zeta(s)?)
}

fn as_fraction<S: Serializer>(r: &BigRational, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&r.to_string())
}

/// Invariants read off the degree multiset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupStats {
    /// `lim_{s→∞} ζ(s)`, the number of linear characters.
    pub derived_index: usize,
    /// `|G| / ζ(0)`
    #[serde(serialize_with = "as_fraction")]
    pub avg_class_size: BigRational,
    pub max_dim: u32,
    pub max_dim_count: usize,
    pub num_classes: usize,
}

pub fn group_stats(degrees: &DegreeMultiset, order: usize) -> GroupStats {
    let ds = degrees.degrees();
    let max_dim = *ds.last().expect("non-empty");
    GroupStats {
        derived_index: ds.iter().filter(|&&d| d == 1).count(),
        avg_class_size: BigRational::new(BigInt::from(order), BigInt::from(ds.len())),
        max_dim,
        max_dim_count: ds.iter().filter(|&&d| d == max_dim).count(),
        num_classes: ds.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn q8() -> DegreeMultiset {
        DegreeMultiset::new(vec![2, 1, 1, 1, 1]).unwrap()
    }

    #[test]
    fn finite_values() {
        assert_eq!(zeta_finite(&q8(), 0), ratio(5, 1));
        assert_eq!(zeta_finite(&q8(), 4), ratio(65, 16));
        assert_eq!(zeta_finite(&q8(), -2), ratio(8, 1));
        let trivial = DegreeMultiset::new(vec![1]).unwrap();
        for s in -5..5 {
            assert_eq!(zeta_finite(&trivial, s), ratio(1, 1));
        }
        for s in -6..=6 {
            let exact = crate::measure::ratio_to_f64(&zeta_finite(&q8(), s));
            assert!((zeta_finite_real(&q8(), s as f64) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_degrees() {
        assert_eq!(DegreeMultiset::new(vec![]), Err(ZetaError::InvalidDegrees));
        assert_eq!(DegreeMultiset::new(vec![1, 0]), Err(ZetaError::InvalidDegrees));
    }

    #[test]
    fn riemann_closed_forms() {
        let cases = [
            (2.0, PI.powi(2) / 6.0),
            (4.0, PI.powi(4) / 90.0),
            (6.0, PI.powi(6) / 945.0),
            (8.0, PI.powi(8) / 9450.0),
            (3.0, 1.202_056_903_159_594_3),
        ];
        for (s, exact) in cases {
            assert!((riemann_zeta(s).unwrap() - exact).abs() < 1e-13, "s={s}");
        }
        // slow-converging direct sum with tail correction as a second route
        let s = 2.5;
        let m = 200_000;
        let direct: f64 = (1..=m).map(|k| (k as f64).powf(-s)).sum::<f64>()
            + (m as f64).powf(1.0 - s) / (s - 1.0)
            - 0.5 * (m as f64).powf(-s);
        assert!((riemann_zeta(s).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn so3_values() {
        assert!((so3_zeta(2.0).unwrap() - PI * PI / 8.0).abs() < 1e-10);
        assert!((so3_zeta(4.0).unwrap() - 15.0 / 16.0 * PI.powi(4) / 90.0).abs() < 1e-10);
        assert_eq!(so3_zeta(1.0), Err(ZetaError::Divergent(1.0)));
        assert!(so3_zeta(0.5).is_err());
        let vals: Vec<f64> = [2.0, 4.0, 8.0, 16.0, 32.0].iter().map(|&s| so3_zeta(s).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] > w[1]));
        assert!((vals[4] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stats() {
        let s = group_stats(&q8(), 8);
        assert_eq!(
            s,
            GroupStats {
                derived_index: 4,
                avg_class_size: ratio(8, 5),
                max_dim: 2,
                max_dim_count: 1,
                num_classes: 5
            }
        );
        let c6 = group_stats(&DegreeMultiset::new(vec![1; 6]).unwrap(), 6);
        assert_eq!((c6.derived_index, c6.avg_class_size, c6.max_dim, c6.max_dim_count), (6, ratio(1, 1), 1, 6));
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"avg_class_size\":\"8/5\""));
    }
}
