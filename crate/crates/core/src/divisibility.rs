//! Integrality of rationals from integrality of their power sums, and the
//! check that irreducible dimensions divide the group order.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::characters::CharacterTable;
use crate::complex::{canonical_surface_word, SurfaceClass};
use crate::group::FiniteGroup;
use crate::measure::{count_via_zeta, MeasureError};

/// Genus offsets replayed by [`verify_dim_divides_order`].
pub const REPLAY_POWERS: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RationalMultiset(Vec<BigRational>);

impl RationalMultiset {
    pub fn new(values: Vec<BigRational>) -> Self {
        RationalMultiset(values)
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        RationalMultiset(
            pairs
                .iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
        )
    }

    pub fn values(&self) -> &[BigRational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn power_sum(&self, k: u32) -> BigRational {
        self.0.iter().map(|q| q.pow(k as i32)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PowerSumCheck {
    pub passes: bool,
    pub first_failure: Option<u32>,
}

/// Whether `Σ q^k` is an integer for every `k` in `1..=k_max`.
pub fn power_sums_integral(q: &RationalMultiset, k_max: u32) -> PowerSumCheck {
    let first_failure = (1..=k_max).find(|&k| !q.power_sum(k).is_integer());
    PowerSumCheck {
        passes: first_failure.is_none(),
        first_failure,
    }
}

fn as_decimal<S: Serializer>(k: &Option<BigUint>, ser: S) -> Result<S::Ok, S::Error> {
    match k {
        Some(k) => ser.serialize_str(&k.to_string()),
        None => ser.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Integrality {
    pub all_integer: bool,
    /// A power at which the power sum is not an integer, present exactly when
    /// some value is not an integer.
    #[serde(serialize_with = "as_decimal")]
    pub witness_k: Option<BigUint>,
}

fn smallest_prime_factor(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if n.is_even() {
        return two;
    }
    let mut p = BigUint::from(3u32);
    while &p * &p <= *n {
        if (n % &p).is_zero() {
            return p;
        }
        p += &two;
    }
    n.clone()
}

/// Decides integrality from the denominators and, when some value is not an
/// integer, returns `k = φ(p^n) = p^n - p^{n-1}` for the smallest prime `p`
/// dividing a denominator and `n = |Q|`.
///
/// Why that `k` works: scale by the most negative `p`-adic valuation `v` so
/// the `m ≤ n` values attaining it become `p`-adic units and the rest become
/// multiples of `p`. At `k = φ(p^n)` each unit power is `1 mod p^n` and each
/// other power is `0 mod p^k`, so the scaled sum is `m mod p^n` and has
/// valuation `v_p(m) < n ≤ k`. The power sum then has valuation
/// `vk + v_p(m) < 0`.
pub fn certified_integrality(q: &RationalMultiset) -> Integrality {
    let p = q
        .values()
        .iter()
        .filter(|r| !r.is_integer())
        .map(|r| smallest_prime_factor(&r.denom().magnitude().clone()))
        .min();
    match p {
        None => Integrality {
            all_integer: true,
            witness_k: None,
        },
        Some(p) => {
            let pn = num_traits::pow(p.clone(), q.len());
            let k = &pn - &pn / &p;
            Integrality {
                all_integer: false,
                witness_k: Some(k),
            }
        }
    }
}

/// `d | order` for each degree.
pub fn degrees_divide_order(degrees: &[u32], order: usize) -> bool {
    degrees.iter().all(|&d| d > 0 && order.is_multiple_of(d as usize))
}

fn as_strings<S: Serializer>(v: &[BigRational], ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_seq(v.iter().map(|r| r.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayStep {
    pub k: u32,
    pub genus: u32,
    pub gamma_zeta: String,
    pub order_times_power_sum: String,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisibilityReport {
    pub degrees: Vec<u32>,
    pub order: usize,
    /// `|G|² / d²`
    #[serde(serialize_with = "as_strings")]
    pub ratios: Vec<BigRational>,
    pub all_integer: bool,
    pub divides: bool,
    pub replay: Vec<ReplayStep>,
}

impl DivisibilityReport {
    pub fn passes(&self) -> bool {
        self.all_integer && self.divides && self.replay.iter().all(|s| s.equal)
    }
}

/// Checks `d | |G|` for every irreducible degree, and replays the counting
/// argument: with `r = |G|²/d²`, the genus `k+1` solution count from the
/// character table must equal `|G| Σ r^k` for `k = 1..=5`.
pub fn verify_dim_divides_order(
    group: &FiniteGroup,
    table: &CharacterTable,
) -> Result<DivisibilityReport, MeasureError> {
    table.ensure_aligned(group)?;
    let order = group.order();
    let ratios = RationalMultiset::new(
        table
            .degrees()
            .iter()
            .map(|&d| BigRational::new(BigInt::from(order * order), BigInt::from(d as u64 * d as u64)))
            .collect(),
    );
    let mut replay = Vec::new();
    for k in 1..=REPLAY_POWERS {
        let genus = k + 1;
        let w = canonical_surface_word(SurfaceClass::orientable(genus));
        let gamma = BigRational::from_integer(count_via_zeta(group, table, &w)?.into());
        let rhs = BigRational::from_integer(BigInt::from(order)) * ratios.power_sum(k);
        replay.push(ReplayStep {
            k,
            genus,
            gamma_zeta: gamma.to_string(),
            order_times_power_sum: rhs.to_string(),
            equal: gamma == rhs && rhs.is_integer(),
        });
    }
    Ok(DivisibilityReport {
        degrees: table.degrees().to_vec(),
        order,
        all_integer: certified_integrality(&ratios).all_integer,
        ratios: ratios.0,
        divides: degrees_divide_order(table.degrees(), order),
        replay,
    })
}
