//! Word-induced measures on finite groups.
//!
//! `μ_w` is computed two ways: by counting every tuple (exact `u128`
//! counts), and from the character table through the surface formulas. The
//! two routes share nothing but the group, so agreement is a real check.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::characters::{fs_indicators, CharacterError, CharacterTable};
use crate::complex::{classify_surface, ComplexError, SurfaceClass};
use crate::group::FiniteGroup;
use crate::word::{parse_word, SignedLetter, Word};

/// Default limit on the number of tuples enumerated by brute force.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("enumerating {tuples} tuples exceeds budget {budget}")]
    BudgetExceeded { tuples: u128, budget: u128 },
    #[error("distributions live on different groups")]
    GroupMismatch,
    #[error(transparent)]
    Surface(#[from] ComplexError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error("formula gives non-integral count {0}; the character table is inconsistent")]
    NonIntegralCount(String),
    #[error("count does not fit in 128 bits")]
    Overflow,
}

/// Exact counts `#{t ∈ G^n : w(t) = g}` for every element `g`.
#[derive(Debug, Clone)]
pub struct WordDistribution<'g> {
    group: &'g FiniteGroup,
    counts: Vec<u128>,
    arity: usize,
}

impl PartialEq for WordDistribution<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.arity == other.arity && self.counts == other.counts
    }
}

impl<'g> WordDistribution<'g> {
    pub fn group(&self) -> &'g FiniteGroup {
        self.group
    }

    pub fn counts(&self) -> &[u128] {
        &self.counts
    }

    pub fn count(&self, g: usize) -> u128 {
        self.counts[g]
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `|G|^n`
    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    /// `γ_G(w)`
    pub fn solutions(&self) -> u128 {
        self.counts[self.group.identity()]
    }

    pub fn probability(&self, g: usize) -> f64 {
        self.counts[g] as f64 / self.total() as f64
    }

    /// Point mass at the identity: the distribution of the empty word.
    pub fn point_mass(group: &'g FiniteGroup) -> Self {
        let mut counts = vec![0; group.order()];
        counts[group.identity()] = 1;
        WordDistribution {
            group,
            counts,
            arity: 0,
        }
    }

    /// Uniform (Haar) distribution: the word `a`.
    pub fn haar(group: &'g FiniteGroup) -> Self {
        WordDistribution {
            group,
            counts: vec![1; group.order()],
            arity: 1,
        }
    }

    /// Counts agree on each conjugacy class.
    pub fn is_class_function(&self) -> bool {
        let classes = self.group.classes();
        (0..self.group.order())
            .all(|g| self.counts[g] == self.counts[classes.representatives[classes.class_of[g]]])
    }

    /// Same measure after normalizing by `|G|^n`, compared exactly.
    pub fn same_measure(&self, other: &WordDistribution<'_>) -> bool {
        if self.group != other.group {
            return false;
        }
        let (ta, tb) = (BigUint::from(self.total()), BigUint::from(other.total()));
        self.counts
            .iter()
            .zip(&other.counts)
            .all(|(&a, &b)| BigUint::from(a) * &tb == BigUint::from(b) * &ta)
    }
}

fn tuple_count(order: usize, n: usize) -> Option<u128> {
    (order as u128).checked_pow(n as u32)
}

/// Counts every tuple with the default budget.
pub fn brute_force_distribution<'g>(
    group: &'g FiniteGroup,
    w: &Word,
) -> Result<WordDistribution<'g>, MeasureError> {
    brute_force_distribution_with_budget(group, w, DEFAULT_BUDGET)
}

/// Exact pushforward of the counting measure on `G^n` under `w`.
///
/// Only letters that occur are enumerated; each unused letter multiplies
/// every count by `|G|`. The budget limits the tuples actually enumerated.
/// Tuples run in mixed-radix order with the last letter fastest, and the
/// prefix products of the word are cached so a change in letter `c` only
/// recomputes the syllables from the first occurrence of `c` on. Work is
/// split across threads by the first letter's value.
pub fn brute_force_distribution_with_budget<'g>(
    group: &'g FiniteGroup,
    w: &Word,
    budget: u128,
) -> Result<WordDistribution<'g>, MeasureError> {
    let order = group.order();
    let support = w.support();
    let k = support.len();
    let enumerated = tuple_count(order, k).filter(|&t| t <= budget).ok_or(
        MeasureError::BudgetExceeded {
            tuples: (order as u128).saturating_pow(k as u32),
            budget,
        },
    )?;
    let free_factor = tuple_count(order, w.arity() - k).ok_or(MeasureError::Overflow)?;
    enumerated.checked_mul(free_factor).ok_or(MeasureError::Overflow)?;

    // relabel letters by first appearance so cached prefixes stay valid as
    // long as possible
    let mut relabel = vec![usize::MAX; w.arity()];
    let mut next = 0;
    let syllables: Vec<(usize, bool)> = w
        .syllables()
        .iter()
        .map(|s: &SignedLetter| {
            let l = s.letter.index();
            if relabel[l] == usize::MAX {
                relabel[l] = next;
                next += 1;
            }
            (relabel[l], s.inverted)
        })
        .collect();
    let mut first_use = vec![0usize; k];
    for (p, &(l, _)) in syllables.iter().enumerate().rev() {
        first_use[l] = p;
    }

    let counts: Vec<u128> = if k == 0 {
        let mut c = vec![0u128; order];
        c[group.identity()] = 1;
        c
    } else {
        (0..order)
            .into_par_iter()
            .map(|first| enumerate_from(group, &syllables, &first_use, k, first))
            .reduce(
                || vec![0u128; order],
                |mut acc, part| {
                    for (a, p) in acc.iter_mut().zip(part) {
                        *a += p;
                    }
                    acc
                },
            )
    };

    Ok(WordDistribution {
        group,
        counts: counts.into_iter().map(|c| c * free_factor).collect(),
        arity: w.arity(),
    })
}

fn enumerate_from(
    group: &FiniteGroup,
    syllables: &[(usize, bool)],
    first_use: &[usize],
    k: usize,
    first: usize,
) -> Vec<u128> {
    let order = group.order();
    let len = syllables.len();
    let mut counts = vec![0u64; order];
    let mut tuple = vec![0usize; k];
    tuple[0] = first;
    // prefix[p] = product of the first p syllables
    let mut prefix = vec![group.identity(); len + 1];
    let mut dirty = 0;
    loop {
        for p in dirty..len {
            let (l, inv) = syllables[p];
            let g = tuple[l];
            prefix[p + 1] = group.mul(prefix[p], if inv { group.inv(g) } else { g });
        }
        counts[prefix[len]] += 1;

        let mut c = k;
        loop {
            if c == 1 {
                return counts.into_iter().map(u128::from).collect();
            }
            c -= 1;
            tuple[c] += 1;
            if tuple[c] < order {
                break;
            }
            tuple[c] = 0;
        }
        dirty = first_use[c];
    }
}

/// `γ_G(w)`, the number of tuples with `w(t) = 1`.
pub fn count_solutions(group: &FiniteGroup, w: &Word) -> Result<u128, MeasureError> {
    Ok(brute_force_distribution(group, w)?.solutions())
}

/// `v_w(χ_i) = |G|^{-n} Σ_g counts[g] χ_i(g)`, from enumeration.
pub fn word_indicator_bruteforce(
    dist: &WordDistribution<'_>,
    table: &CharacterTable,
    irreducible: usize,
) -> Result<Complex64, MeasureError> {
    table.ensure_aligned(dist.group())?;
    if irreducible >= table.num_irreducibles() {
        return Err(CharacterError::NoSuchIrreducible {
            index: irreducible,
            count: table.num_irreducibles(),
        }
        .into());
    }
    let total = dist.total() as f64;
    Ok((0..dist.group().order())
        .map(|g| table.value_at(dist.group(), irreducible, g) * (dist.count(g) as f64 / total))
        .sum())
}

/// Trace of `∫ ρ(w(t)) dt` for a surface word: `d^{κ-1}` when orientable,
/// `v^{2-κ} d^{κ-1}` otherwise, with `v` the Frobenius–Schur indicator.
pub fn surface_indicator(degree: u32, fs: i32, surface: SurfaceClass) -> BigRational {
    let kappa = surface.euler_characteristic() as i32;
    let d = BigRational::from_integer(BigInt::from(degree));
    let base = d.pow(kappa - 1);
    if surface.is_orientable() {
        base
    } else {
        BigRational::from_integer(BigInt::from(fs)).pow(2 - kappa) * base
    }
}

/// [`surface_indicator`] for every irreducible of `table`.
pub fn surface_indicators(
    group: &FiniteGroup,
    table: &CharacterTable,
    surface: SurfaceClass,
) -> Result<Vec<BigRational>, MeasureError> {
    let fs = if surface.is_orientable() {
        vec![1; table.num_irreducibles()]
    } else {
        fs_indicators(table, group)?
    };
    Ok(table
        .degrees()
        .iter()
        .zip(fs)
        .map(|(&d, v)| surface_indicator(d, v, surface))
        .collect())
}

/// Density of `μ_w` against Haar measure at `g`, from the word's indicators:
/// `D(g) = Σ_i conj(χ_i(g)) v_i`. For the matching word this equals
/// `|G|^{1-n} counts[g]`.
pub fn density_from_indicators(
    group: &FiniteGroup,
    table: &CharacterTable,
    indicators: &[Complex64],
    g: usize,
) -> Result<f64, MeasureError> {
    table.ensure_aligned(group)?;
    Ok(indicators
        .iter()
        .enumerate()
        .map(|(i, &v)| table.value_at(group, i, g).conj() * v)
        .sum::<Complex64>()
        .re)
}

/// `Σ_i χ_i(g) d_i^κ`, kept for comparison with [`density_from_indicators`].
/// It is not the density: on Q8 with the torus word it gives 6 at the
/// identity and 2 at `-1`, where the density is 5 and 3.
pub fn twisted_zeta(group: &FiniteGroup, table: &CharacterTable, kappa: i32, g: usize) -> Result<f64, MeasureError> {
    table.ensure_aligned(group)?;
    Ok((0..table.num_irreducibles())
        .map(|i| table.value_at(group, i, g) * (table.degrees()[i] as f64).powi(kappa))
        .sum::<Complex64>()
        .re)
}

fn to_count(value: &BigRational) -> Result<u128, MeasureError> {
    if !value.is_integer() || value.is_negative() {
        return Err(MeasureError::NonIntegralCount(value.to_string()));
    }
    value.to_integer().to_u128().ok_or(MeasureError::Overflow)
}

/// `γ_G(w)` from the character table:
/// `|G|^{n-1} Σ d^κ` (orientable) or `|G|^{n-1} Σ v^{2-κ} d^κ`.
/// Exact rational arithmetic; a non-integral result is an error.
pub fn count_via_zeta(group: &FiniteGroup, table: &CharacterTable, w: &Word) -> Result<u128, MeasureError> {
    let surface = classify_surface(w)?;
    table.ensure_aligned(group)?;
    let kappa = surface.euler_characteristic() as i32;
    let fs = if surface.is_orientable() {
        vec![1; table.num_irreducibles()]
    } else {
        fs_indicators(table, group)?
    };
    let zeta: BigRational = table
        .degrees()
        .iter()
        .zip(&fs)
        .map(|(&d, &v)| {
            let dk = BigRational::from_integer(BigInt::from(d)).pow(kappa);
            if surface.is_orientable() {
                dk
            } else {
                BigRational::from_integer(BigInt::from(v)).pow(2 - kappa) * dk
            }
        })
        .sum();
    let scale = BigRational::from_integer(BigInt::from(group.order())).pow(w.arity() as i32 - 1);
    to_count(&(scale * zeta))
}

/// Multiplicative convolution: the distribution of the connected sum.
pub fn convolve<'g>(
    d1: &WordDistribution<'g>,
    d2: &WordDistribution<'_>,
) -> Result<WordDistribution<'g>, MeasureError> {
    if d1.group != d2.group {
        return Err(MeasureError::GroupMismatch);
    }
    let group = d1.group;
    let mut counts = vec![0u128; group.order()];
    for (a, &ca) in d1.counts.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (b, &cb) in d2.counts.iter().enumerate() {
            let prod = ca.checked_mul(cb).ok_or(MeasureError::Overflow)?;
            let slot = &mut counts[group.mul(a, b)];
            *slot = slot.checked_add(prod).ok_or(MeasureError::Overflow)?;
        }
    }
    Ok(WordDistribution {
        group,
        counts,
        arity: d1.arity + d2.arity,
    })
}

/// Probability that two uniform elements commute, `γ_G([a,b]) / |G|²`.
pub fn commuting_probability(group: &FiniteGroup) -> Result<BigRational, MeasureError> {
    let commutator = parse_word("[a,b]").expect("literal word");
    let gamma = count_solutions(group, &commutator)?;
    let n = group.order() as u128;
    Ok(BigRational::new(BigInt::from(gamma), BigInt::from(n * n)))
}

/// Class count over group order, the other side of the commuting
/// probability identity.
pub fn class_ratio(group: &FiniteGroup) -> BigRational {
    BigRational::new(BigInt::from(group.classes().len()), BigInt::from(group.order()))
}

/// Outcome of one named comparison in [`cross_validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Full brute-force versus formula comparison for one group and word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidation {
    pub group: String,
    pub word: String,
    pub n: usize,
    pub surface: Option<String>,
    pub gamma_brute: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_zeta: Option<u128>,
    pub checks: Vec<Check>,
    pub agreement: bool,
}

/// Runs every applicable check: class-function counts, the identity
/// `density(1) = |G|^{1-n} γ`, and for surface words the zeta count, the
/// per-irreducible indicators (tolerance `tol`) and the density at every
/// element.
pub fn cross_validate(
    group: &FiniteGroup,
    table: &CharacterTable,
    w: &Word,
    budget: u128,
    tol: f64,
) -> Result<CrossValidation, MeasureError> {
    table.ensure_aligned(group)?;
    let dist = brute_force_distribution_with_budget(group, w, budget)?;
    let mut checks = Vec::new();
    let mut check = |name: &str, pass: bool, detail: Option<String>| {
        checks.push(Check {
            name: name.to_string(),
            pass,
            detail,
        })
    };

    check("total", dist.total() == tuple_count(group.order(), w.arity()).unwrap_or(0), None);
    check("class_function", dist.is_class_function(), None);

    let brute: Vec<Complex64> = (0..table.num_irreducibles())
        .map(|i| word_indicator_bruteforce(&dist, table, i))
        .collect::<Result<_, _>>()?;
    let n = group.order() as f64;
    let scale = n.powi(1 - w.arity() as i32);
    let mut worst: f64 = 0.0;
    for g in 0..group.order() {
        let d = density_from_indicators(group, table, &brute, g)?;
        worst = worst.max((d - scale * dist.count(g) as f64).abs());
    }
    check("density_expansion", worst <= tol * n, Some(format!("max residual {worst:e}")));

    let surface = classify_surface(w).ok();
    let mut gamma_zeta = None;
    if let Some(s) = surface {
        let zeta = count_via_zeta(group, table, w)?;
        gamma_zeta = Some(zeta);
        check(
            "gamma_zeta",
            zeta == dist.solutions(),
            Some(format!("zeta {zeta}, brute {}", dist.solutions())),
        );
        let formula = surface_indicators(group, table, s)?;
        let mut worst: f64 = 0.0;
        for (b, f) in brute.iter().zip(&formula) {
            let f = f.to_f64().unwrap_or(f64::NAN);
            worst = worst.max((b - Complex64::new(f, 0.0)).norm());
        }
        check("surface_indicators", worst <= tol, Some(format!("max residual {worst:e}")));
    }

    let agreement = checks.iter().all(|c| c.pass);
    Ok(CrossValidation {
        group: group.name().to_string(),
        word: w.to_string(),
        n: w.arity(),
        surface: surface.map(|s| s.to_string()),
        gamma_brute: dist.solutions(),
        gamma_zeta,
        checks,
        agreement,
    })
}

/// `BigRational` to `f64`, for reporting.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::compute_character_table;
    use crate::complex::canonical_surface_word;
    use crate::group::preset;
    use crate::word::evaluate;
    use num_traits::{One, Zero};

    fn w(text: &str) -> Word {
        parse_word(text).unwrap()
    }

    /// Plain odometer over all of `G^n` calling `evaluate`; no caching, no
    /// relabelling, no threads.
    fn naive_counts(group: &FiniteGroup, word: &Word) -> Vec<u128> {
        let n = word.arity();
        let mut counts = vec![0u128; group.order()];
        let mut t = vec![0usize; n];
        loop {
            counts[evaluate(word, group, &t).unwrap()] += 1;
            let mut c = n;
            loop {
                if c == 0 {
                    return counts;
                }
                c -= 1;
                t[c] += 1;
                if t[c] < group.order() {
                    break;
                }
                t[c] = 0;
            }
        }
    }

    #[test]
    fn q8_commutator_distribution() {
        let q8 = preset("Q8").unwrap();
        let d = brute_force_distribution(&q8, &w("[a,b]")).unwrap();
        assert_eq!(d.count(0), 40);
        assert_eq!(d.count(4), 24);
        assert!((0..8).filter(|&g| g != 0 && g != 4).all(|g| d.count(g) == 0));
        assert_eq!(d.total(), 64);
    }

    #[test]
    fn trivial_words() {
        let s3 = preset("S3").unwrap();
        let e = brute_force_distribution(&s3, &Word::empty()).unwrap();
        assert_eq!(e, WordDistribution::point_mass(&s3));
        let a = brute_force_distribution(&s3, &w("a")).unwrap();
        assert_eq!(a, WordDistribution::haar(&s3));
    }

    #[test]
    fn fast_enumeration_matches_naive() {
        for name in ["S3", "Q8", "C4"] {
            let g = preset(name).unwrap();
            for text in ["[a,b]", "b a b' a'", "a b c a' b' c'", "a^3 b' a c", "c a c b'", "a a'"] {
                let word = w(text);
                assert_eq!(
                    brute_force_distribution(&g, &word).unwrap().counts(),
                    naive_counts(&g, &word).as_slice(),
                    "{name} {text}"
                );
            }
        }
    }

    #[test]
    fn unused_letters_scale_counts() {
        let q8 = preset("Q8").unwrap();
        let wide = crate::word::parse_word_with_arity("[a,b]", Some(4)).unwrap();
        let d = brute_force_distribution(&q8, &wide).unwrap();
        assert_eq!(d.solutions(), 40 * 64);
        assert_eq!(d.counts(), naive_counts(&q8, &wide).as_slice());
    }

    #[test]
    fn solution_counts() {
        let q8 = preset("Q8").unwrap();
        assert_eq!(count_solutions(&q8, &w("[a,b]")).unwrap(), 40);
        // oracle: naive pair enumeration
        let s3 = preset("S3").unwrap();
        let pairs = (0..6)
            .flat_map(|a| (0..6).map(move |b| (a, b)))
            .filter(|&(a, b)| s3.mul(a, b) == s3.mul(b, a))
            .count() as u128;
        assert_eq!(pairs, 18);
        assert_eq!(count_solutions(&s3, &w("[a,b]")).unwrap(), pairs);
        assert_eq!(count_solutions(&q8, &w("[a,b][c,d][e,f]")).unwrap(), 133_120);
    }

    #[test]
    fn budget_is_enforced() {
        let q8 = preset("Q8").unwrap();
        assert_eq!(
            brute_force_distribution_with_budget(&q8, &w("[a,b][c,d]"), 4000),
            Err(MeasureError::BudgetExceeded {
                tuples: 4096,
                budget: 4000
            })
        );
    }

    #[test]
    fn indicator_examples() {
        let q8 = preset("Q8").unwrap();
        let t = compute_character_table(&q8).unwrap();
        let two = t.degrees().iter().position(|&d| d == 2).unwrap();
        let torus = brute_force_distribution(&q8, &w("[a,b]")).unwrap();
        assert!((word_indicator_bruteforce(&torus, &t, two).unwrap() - 0.5).norm() < 1e-12);
        assert!((word_indicator_bruteforce(&torus, &t, 0).unwrap() - 1.0).norm() < 1e-12);
        let rp2 = brute_force_distribution(&q8, &w("aa")).unwrap();
        assert!((word_indicator_bruteforce(&rp2, &t, two).unwrap() + 1.0).norm() < 1e-12);
    }

    #[test]
    fn surface_indicator_values() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(surface_indicator(2, 1, SurfaceClass::orientable(1)), half);
        let rp2 = SurfaceClass::non_orientable(1).unwrap();
        for (d, v) in [(1, 1), (2, -1), (3, 0)] {
            assert_eq!(surface_indicator(d, v, rp2), BigRational::from_integer(v.into()));
        }
        assert_eq!(
            surface_indicator(2, 1, SurfaceClass::orientable(2)),
            BigRational::new(1.into(), 8.into())
        );
        // brute-force side of the genus 2 value
        let q8 = preset("Q8").unwrap();
        let t = compute_character_table(&q8).unwrap();
        let two = t.degrees().iter().position(|&d| d == 2).unwrap();
        let g2 = brute_force_distribution(&q8, &w("[a,b][c,d]")).unwrap();
        assert!((word_indicator_bruteforce(&g2, &t, two).unwrap() - 0.125).norm() < 1e-12);
    }

    #[test]
    fn density_examples() {
        let q8 = preset("Q8").unwrap();
        let t = compute_character_table(&q8).unwrap();
        let torus: Vec<Complex64> = surface_indicators(&q8, &t, SurfaceClass::orientable(1))
            .unwrap()
            .iter()
            .map(|r| Complex64::new(ratio_to_f64(r), 0.0))
            .collect();
        assert!((density_from_indicators(&q8, &t, &torus, 0).unwrap() - 5.0).abs() < 1e-12);
        assert!((density_from_indicators(&q8, &t, &torus, 4).unwrap() - 3.0).abs() < 1e-12);
        // brute-force side: 8 * 24 / 64
        let d = brute_force_distribution(&q8, &w("[a,b]")).unwrap();
        assert_eq!(8 * d.count(4), 3 * 64);
        assert!((twisted_zeta(&q8, &t, 0, 4).unwrap() - 2.0).abs() < 1e-12);
        assert!((twisted_zeta(&q8, &t, 0, 0).unwrap() - 6.0).abs() < 1e-12);

        for name in ["S3", "C5", "A4"] {
            let g = preset(name).unwrap();
            let t = compute_character_table(&g).unwrap();
            let sphere: Vec<Complex64> =
                t.degrees().iter().map(|&d| Complex64::new(d as f64, 0.0)).collect();
            let at_one = density_from_indicators(&g, &t, &sphere, 0).unwrap();
            assert!((at_one - g.order() as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn zeta_counts() {
        let q8 = preset("Q8").unwrap();
        let t = compute_character_table(&q8).unwrap();
        assert_eq!(count_via_zeta(&q8, &t, &w("[a,b]")).unwrap(), 40);
        assert_eq!(count_via_zeta(&q8, &t, &w("[a,b][c,d][e,f]")).unwrap(), 133_120);
        // oracle: elements with g² = 1 in Q8 are ±1
        let squares = (0..8).filter(|&g| q8.mul(g, g) == 0).count() as u128;
        assert_eq!(squares, 2);
        assert_eq!(count_via_zeta(&q8, &t, &w("aa")).unwrap(), squares);
        assert!(matches!(
            count_via_zeta(&q8, &t, &w("ab")),
            Err(MeasureError::Surface(ComplexError::NotASurface { .. }))
        ));
    }

    #[test]
    fn zeta_detects_inconsistent_table() {
        // S3 table read as if it belonged to C6 shape: misaligned, refused
        let c6 = preset("C6").unwrap();
        let t = compute_character_table(&preset("S3").unwrap()).unwrap();
        assert!(matches!(
            count_via_zeta(&c6, &t, &w("[a,b]")),
            Err(MeasureError::Character(CharacterError::Misaligned { .. }))
        ));
    }

    #[test]
    fn convolution() {
        let q8 = preset("Q8").unwrap();
        let t1 = brute_force_distribution(&q8, &w("[a,b]")).unwrap();
        let g2 = brute_force_distribution(&q8, &w("[a,b][c,d]")).unwrap();
        assert_eq!(convolve(&t1, &t1).unwrap(), g2);
        assert_eq!(convolve(&t1, &WordDistribution::point_mass(&q8)).unwrap(), t1);
        let haar = WordDistribution::haar(&q8);
        let h = convolve(&haar, &t1).unwrap();
        assert!(h.counts().iter().all(|&c| c == 64));
        let s3 = preset("S3").unwrap();
        assert_eq!(
            convolve(&t1, &WordDistribution::haar(&s3)),
            Err(MeasureError::GroupMismatch)
        );
    }

    #[test]
    fn commuting_probabilities() {
        let q8 = preset("Q8").unwrap();
        assert_eq!(commuting_probability(&q8).unwrap(), BigRational::new(5.into(), 8.into()));
        assert_eq!(commuting_probability(&q8).unwrap(), class_ratio(&q8));
        for name in ["C1", "C7", "C2xC2"] {
            assert!(commuting_probability(&preset(name).unwrap()).unwrap().is_one());
        }
        let s3 = preset("S3").unwrap();
        assert_eq!(commuting_probability(&s3).unwrap(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn canonical_words_cross_validate() {
        let g = preset("D4").unwrap();
        let t = compute_character_table(&g).unwrap();
        for s in [
            SurfaceClass::sphere(),
            SurfaceClass::orientable(1),
            SurfaceClass::non_orientable(1).unwrap(),
            SurfaceClass::non_orientable(3).unwrap(),
        ] {
            let r = cross_validate(&g, &t, &canonical_surface_word(s), DEFAULT_BUDGET, 1e-8).unwrap();
            assert!(r.agreement, "{r:?}");
        }
        let r = cross_validate(&g, &t, &w("a b a c"), DEFAULT_BUDGET, 1e-8).unwrap();
        assert!(r.agreement);
        assert!(r.gamma_zeta.is_none());
        assert!(!class_ratio(&g).is_zero());
    }
}
