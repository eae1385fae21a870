//! Complex character tables, Frobenius–Schur indicators and explicit unitary
//! representations.
//!
//! Tables are computed numerically from the class algebra (Burnside's
//! method) and then certified: integer degrees, `Σ d² = |G|`, and both
//! orthogonality relations must hold before a table is handed out.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::group::{preset, preset_permutations, FiniteGroup};
use crate::word::Word;

/// Default tolerance for character-value comparisons.
pub const CHARACTER_TOLERANCE: f64 = 1e-8;
/// Eigenvalues closer than this (relative) count as one cluster.
pub const EIGENVALUE_CLUSTER_TOLERANCE: f64 = 1e-7;
/// Degrees are accepted only this close to an integer.
pub const DEGREE_ROUNDING_TOLERANCE: f64 = 1e-4;
/// Largest group order handled by [`compute_character_table`].
pub const MAX_TABLE_ORDER: usize = 200;
/// Number of random class-sum combinations tried before giving up.
pub const MAX_SEEDS: u64 = 8;
/// Explicit representation checks.
pub const REP_TOLERANCE: f64 = 1e-10;
/// Default tuple budget for [`avg_word`].
pub const DEFAULT_REP_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharacterError {
    #[error("group order {0} exceeds the supported maximum {MAX_TABLE_ORDER}")]
    GroupTooLarge(usize),
    #[error("every random class-sum combination had repeated eigenvalues")]
    Degenerate,
    #[error("eigen-decomposition failed to converge")]
    NoConvergence,
    #[error("character table invalid: {0}")]
    Invalid(String),
    #[error("table does not match group {group}: {message}")]
    Misaligned { group: String, message: String },
    #[error("irreducible index {index} out of range ({count} irreducibles)")]
    NoSuchIrreducible { index: usize, count: usize },
    #[error("indicator {0} is not within 1e-6 of an integer")]
    NonIntegralIndicator(f64),
    #[error("representation invalid: {0}")]
    InvalidRepresentation(String),
    #[error("enumeration of {tuples} tuples exceeds budget {budget}")]
    BudgetExceeded { tuples: u128, budget: u128 },
    #[error("character file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("cannot access character file: {0}")]
    Io(String),
}

/// Irreducible complex characters of a finite group.
///
/// Column `j` is the class with representative `class_reps[j]` and size
/// `class_sizes[j]`; column 0 is always the identity class. Tables produced
/// by [`compute_character_table`] or [`CharacterTable::aligned_to`] use the
/// column order of [`FiniteGroup::classes`].
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    group_name: String,
    order: usize,
    class_sizes: Vec<usize>,
    class_reps: Vec<usize>,
    degrees: Vec<u32>,
    values: Vec<Vec<Complex64>>,
}

impl CharacterTable {
    /// Assembles and validates a table.
    pub fn new(
        group_name: impl Into<String>,
        order: usize,
        class_sizes: Vec<usize>,
        class_reps: Vec<usize>,
        degrees: Vec<u32>,
        values: Vec<Vec<Complex64>>,
    ) -> Result<Self, CharacterError> {
        let table = CharacterTable {
            group_name: group_name.into(),
            order,
            class_sizes,
            class_reps,
            degrees,
            values,
        };
        table.validate(CHARACTER_TOLERANCE)?;
        Ok(table)
    }

    pub fn group_name(&self) -> &str {
        &self.group_name
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn class_reps(&self) -> &[usize] {
        &self.class_reps
    }

    pub fn num_irreducibles(&self) -> usize {
        self.degrees.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    /// `χ_i` on class `class`.
    pub fn value(&self, irreducible: usize, class: usize) -> Complex64 {
        self.values[irreducible][class]
    }

    pub fn row(&self, irreducible: usize) -> &[Complex64] {
        &self.values[irreducible]
    }

    /// `χ_i(g)`; the table must be aligned with `group`.
    pub fn value_at(&self, group: &FiniteGroup, irreducible: usize, g: usize) -> Complex64 {
        self.values[irreducible][group.classes().class_of[g]]
    }

    pub(crate) fn check_index(&self, irreducible: usize) -> Result<(), CharacterError> {
        if irreducible >= self.num_irreducibles() {
            return Err(CharacterError::NoSuchIrreducible {
                index: irreducible,
                count: self.num_irreducibles(),
            });
        }
        Ok(())
    }

    /// Checks every table invariant: square shape, identity column equal
    /// to the degrees, `Σ d² = |G|`, row and column orthogonality.
    pub fn validate(&self, tol: f64) -> Result<(), CharacterError> {
        let invalid = |m: String| Err(CharacterError::Invalid(m));
        let k = self.class_sizes.len();
        if k == 0 {
            return invalid("no classes".into());
        }
        if self.class_reps.len() != k {
            return invalid(format!("{} representatives for {k} classes", self.class_reps.len()));
        }
        if self.degrees.len() != k || self.values.len() != k {
            return invalid(format!(
                "{} irreducibles for {k} classes",
                self.degrees.len().max(self.values.len())
            ));
        }
        if let Some(i) = self.values.iter().position(|r| r.len() != k) {
            return invalid(format!("row {i} has {} values", self.values[i].len()));
        }
        if self.class_sizes.iter().sum::<usize>() != self.order {
            return invalid("class sizes do not sum to the group order".into());
        }
        if self.class_sizes[0] != 1 || self.class_reps[0] != 0 {
            return invalid("column 0 must be the identity class".into());
        }
        let square_sum: u64 = self.degrees.iter().map(|&d| (d as u64) * (d as u64)).sum();
        if square_sum != self.order as u64 {
            return invalid(format!("sum of squared degrees {square_sum} != |G| = {}", self.order));
        }
        for (i, row) in self.values.iter().enumerate() {
            if row[0] != Complex64::new(self.degrees[i] as f64, 0.0) {
                return invalid(format!("row {i}: value at identity is not the degree"));
            }
        }
        let n = self.order as f64;
        for a in 0..k {
            for b in 0..=a {
                let inner: Complex64 = (0..k)
                    .map(|j| self.values[a][j] * self.values[b][j].conj() * self.class_sizes[j] as f64)
                    .sum::<Complex64>()
                    / n;
                let expected = if a == b { 1.0 } else { 0.0 };
                if (inner - expected).norm() > tol {
                    return invalid(format!("rows {a},{b}: inner product {inner}"));
                }
            }
        }
        for j in 0..k {
            for l in 0..=j {
                let sum: Complex64 = (0..k).map(|i| self.values[i][j] * self.values[i][l].conj()).sum();
                let expected = if j == l { n / self.class_sizes[j] as f64 } else { 0.0 };
                if (sum - expected).norm() > tol * n {
                    return invalid(format!("columns {j},{l}: sum {sum}, expected {expected}"));
                }
            }
        }
        Ok(())
    }

    /// Checks that the columns line up with `group`'s conjugacy classes.
    pub fn ensure_aligned(&self, group: &FiniteGroup) -> Result<(), CharacterError> {
        let classes = group.classes();
        let misaligned = |message: String| CharacterError::Misaligned {
            group: group.name().to_string(),
            message,
        };
        if self.order != group.order() {
            return Err(misaligned(format!("order {} vs {}", self.order, group.order())));
        }
        if self.num_classes() != classes.len() {
            return Err(misaligned(format!(
                "{} classes vs {}",
                self.num_classes(),
                classes.len()
            )));
        }
        for (j, &rep) in self.class_reps.iter().enumerate() {
            if rep >= group.order() || classes.class_of[rep] != j || classes.sizes[j] != self.class_sizes[j] {
                return Err(misaligned(format!("column {j} (representative {rep})")));
            }
        }
        Ok(())
    }

    /// Reorders columns to the group's class order, after checking that each
    /// column's representative and size match a distinct class.
    pub fn aligned_to(&self, group: &FiniteGroup) -> Result<Self, CharacterError> {
        let classes = group.classes();
        let misaligned = |message: String| CharacterError::Misaligned {
            group: group.name().to_string(),
            message,
        };
        if self.order != group.order() || self.num_classes() != classes.len() {
            return Err(misaligned("order or class count differs".into()));
        }
        let mut perm = vec![usize::MAX; classes.len()];
        for (j, &rep) in self.class_reps.iter().enumerate() {
            if rep >= group.order() {
                return Err(misaligned(format!("representative {rep} out of range")));
            }
            let c = classes.class_of[rep];
            if classes.sizes[c] != self.class_sizes[j] {
                return Err(misaligned(format!(
                    "class of {rep} has size {}, file says {}",
                    classes.sizes[c], self.class_sizes[j]
                )));
            }
            if perm[c] != usize::MAX {
                return Err(misaligned(format!("two columns name class {c}")));
            }
            perm[c] = j;
        }
        let table = CharacterTable {
            group_name: self.group_name.clone(),
            order: self.order,
            class_sizes: classes.sizes.clone(),
            class_reps: classes.representatives.clone(),
            degrees: self.degrees.clone(),
            values: self
                .values
                .iter()
                .map(|row| perm.iter().map(|&j| row[j]).collect())
                .collect(),
        };
        table.validate(CHARACTER_TOLERANCE)?;
        Ok(table)
    }

    pub fn row_index_of_trivial(&self) -> Option<usize> {
        self.values
            .iter()
            .position(|row| row.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < CHARACTER_TOLERANCE))
    }
}

/// Computes the character table of `group` with the default seed.
pub fn compute_character_table(group: &FiniteGroup) -> Result<CharacterTable, CharacterError> {
    compute_character_table_with_seed(group, 0)
}

/// Burnside's algorithm.
///
/// With class sums `K_j` and structure constants `K_j K_l = Σ_m c_jlm K_m`,
/// the central characters `ω(K_l) = |C_l| χ(g_l) / d` form a common
/// eigenvector of the matrices `(M_j)_{lm} = c_jlm`. A random real
/// combination of the `M_j` has simple spectrum with probability one, so its
/// eigenvectors are exactly those central characters. The degree follows
/// from `Σ_j |ω_j|² / |C_j| = |G| / d²`.
pub fn compute_character_table_with_seed(
    group: &FiniteGroup,
    seed: u64,
) -> Result<CharacterTable, CharacterError> {
    if group.order() > MAX_TABLE_ORDER {
        return Err(CharacterError::GroupTooLarge(group.order()));
    }
    let structure = class_structure_matrices(group);
    let mut last = CharacterError::Degenerate;
    for attempt in 0..MAX_SEEDS {
        match table_from_combination(group, &structure, seed.wrapping_add(attempt)) {
            Ok(t) => return Ok(t),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// `M_j[l][m] = #{x ∈ C_j : x⁻¹ g_m ∈ C_l}` for each class `j`.
fn class_structure_matrices(group: &FiniteGroup) -> Vec<DMatrix<f64>> {
    let classes = group.classes();
    let k = classes.len();
    let mut mats = vec![DMatrix::<f64>::zeros(k, k); k];
    for (m, &gm) in classes.representatives.iter().enumerate() {
        for x in 0..group.order() {
            let j = classes.class_of[x];
            let l = classes.class_of[group.mul(group.inv(x), gm)];
            mats[j][(l, m)] += 1.0;
        }
    }
    mats
}

fn table_from_combination(
    group: &FiniteGroup,
    structure: &[DMatrix<f64>],
    seed: u64,
) -> Result<CharacterTable, CharacterError> {
    let classes = group.classes();
    let k = classes.len();
    let n = group.order() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut combo = DMatrix::<f64>::zeros(k, k);
    for m in structure.iter().skip(1) {
        combo += m * rng.random_range(-1.0..1.0);
    }

    let eigenvalues = Schur::try_new(combo.clone(), f64::EPSILON, 10_000)
        .ok_or(CharacterError::NoConvergence)?
        .complex_eigenvalues();
    let scale = 1.0 + eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for a in 0..k {
        for b in 0..a {
            if (eigenvalues[a] - eigenvalues[b]).norm() < EIGENVALUE_CLUSTER_TOLERANCE * scale {
                return Err(CharacterError::Degenerate);
            }
        }
    }

    let combo_c = combo.map(|x| Complex64::new(x, 0.0));
    let mut rows = Vec::with_capacity(k);
    for &lambda in eigenvalues.iter() {
        let shifted = &combo_c - DMatrix::<Complex64>::identity(k, k) * lambda;
        let svd = SVD::new(shifted, false, true);
        let v_t = svd.v_t.ok_or(CharacterError::NoConvergence)?;
        // smallest singular value is last (sorted descending)
        let null: Vec<Complex64> = (0..k).map(|c| v_t[(k - 1, c)].conj()).collect();
        if null[0].norm() < 1e-12 {
            return Err(CharacterError::Invalid("central character vanishes at 1".into()));
        }
        let omega: Vec<Complex64> = null.iter().map(|z| z / null[0]).collect();
        let norm: f64 = omega
            .iter()
            .zip(&classes.sizes)
            .map(|(w, &s)| w.norm_sqr() / s as f64)
            .sum();
        let degree_f = (n / norm).sqrt();
        let degree = degree_f.round();
        if (degree_f - degree).abs() > DEGREE_ROUNDING_TOLERANCE || degree < 1.0 {
            return Err(CharacterError::Invalid(format!("degree {degree_f} is not an integer")));
        }
        let values: Vec<Complex64> = omega
            .iter()
            .zip(&classes.sizes)
            .enumerate()
            .map(|(j, (w, &s))| {
                if j == 0 {
                    Complex64::new(degree, 0.0)
                } else {
                    snap(w * degree / s as f64)
                }
            })
            .collect();
        rows.push((degree as u32, values));
    }

    rows.sort_by(|(da, va), (db, vb)| da.cmp(db).then_with(|| row_key(va).cmp(&row_key(vb))));
    let (degrees, values) = rows.into_iter().unzip();
    CharacterTable::new(
        group.name(),
        group.order(),
        classes.sizes.clone(),
        classes.representatives.clone(),
        degrees,
        values,
    )
}

fn snap(z: Complex64) -> Complex64 {
    let s = |x: f64| if (x - x.round()).abs() < 1e-9 { x.round() + 0.0 } else { x };
    Complex64::new(s(z.re), s(z.im))
}

// Larger real parts first, then larger imaginary parts; puts the trivial
// character at the top of the degree-1 block.
fn row_key(row: &[Complex64]) -> Vec<(i64, i64)> {
    row.iter()
        .map(|z| (-(z.re * 1e6).round() as i64, -(z.im * 1e6).round() as i64))
        .collect()
}

/// Frobenius–Schur indicator `(1/|G|) Σ_g χ(g²)`: 1 real, 0 complex,
/// -1 quaternionic.
pub fn fs_indicator(
    table: &CharacterTable,
    irreducible: usize,
    group: &FiniteGroup,
) -> Result<i32, CharacterError> {
    table.check_index(irreducible)?;
    table.ensure_aligned(group)?;
    let sum: Complex64 = (0..group.order())
        .map(|g| table.value_at(group, irreducible, group.mul(g, g)))
        .sum();
    let mean = sum / group.order() as f64;
    let rounded = mean.re.round();
    if mean.im.abs() > 1e-6 || (mean.re - rounded).abs() > 1e-6 {
        return Err(CharacterError::NonIntegralIndicator(mean.re));
    }
    Ok(rounded as i32)
}

/// Indicators for every irreducible, in table order.
pub fn fs_indicators(table: &CharacterTable, group: &FiniteGroup) -> Result<Vec<i32>, CharacterError> {
    (0..table.num_irreducibles())
        .map(|i| fs_indicator(table, i, group))
        .collect()
}

/// Reads the `.chr` text format.
///
/// ```text
/// chartab Q8
/// order 8
/// classes 5
/// sizes 1 1 2 2 2
/// reps 0 4 1 2 3
/// irr 1 1+0i 1+0i 1+0i 1+0i 1+0i
/// ...
/// ```
pub fn parse_chartab(text: &str) -> Result<CharacterTable, CharacterError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line: usize, message: String| CharacterError::Format { line, message };
    let mut field = |key: &str| -> Result<(usize, String), CharacterError> {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(0, format!("missing `{key}` line")))?;
        let rest = l
            .strip_prefix(key)
            .filter(|r| r.is_empty() || r.starts_with(char::is_whitespace))
            .ok_or_else(|| err(ln, format!("expected `{key}`")))?;
        Ok((ln, rest.trim().to_string()))
    };
    let ints = |ln: usize, s: &str| -> Result<Vec<usize>, CharacterError> {
        s.split_whitespace()
            .map(|t| t.parse().map_err(|_| err(ln, format!("bad integer {t:?}"))))
            .collect()
    };

    let (_, name) = field("chartab")?;
    let (ln, order) = field("order")?;
    let order: usize = order.parse().map_err(|_| err(ln, "bad order".into()))?;
    let (ln, classes) = field("classes")?;
    let k: usize = classes.parse().map_err(|_| err(ln, "bad class count".into()))?;
    let (ln, sizes) = field("sizes")?;
    let sizes = ints(ln, &sizes)?;
    if sizes.len() != k {
        return Err(err(ln, format!("expected {k} sizes")));
    }
    let (ln, reps) = field("reps")?;
    let reps = ints(ln, &reps)?;
    if reps.len() != k {
        return Err(err(ln, format!("expected {k} representatives")));
    }
    let mut degrees = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    for _ in 0..k {
        let (ln, rest) = field("irr")?;
        let mut tokens = rest.split_whitespace();
        let degree: u32 = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(ln, "bad degree".into()))?;
        let row = tokens
            .map(|t| parse_complex(t).ok_or_else(|| err(ln, format!("bad value {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != k {
            return Err(err(ln, format!("expected {k} values, found {}", row.len())));
        }
        degrees.push(degree);
        values.push(row);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, "trailing content".into()));
    }
    CharacterTable::new(name, order, sizes, reps, degrees, values)
}

/// Parses `a+bi`, `a-bi` or a plain real.
pub fn parse_complex(token: &str) -> Option<Complex64> {
    let Some(body) = token.strip_suffix('i') else {
        return token.parse().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'))?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].parse().ok()?;
    Some(Complex64::new(re, im))
}

pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

pub fn format_chartab(table: &CharacterTable) -> String {
    let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    writeln!(out, "chartab {}", table.group_name).unwrap();
    writeln!(out, "order {}", table.order).unwrap();
    writeln!(out, "classes {}", table.num_classes()).unwrap();
    writeln!(out, "sizes {}", join(&table.class_sizes)).unwrap();
    writeln!(out, "reps {}", join(&table.class_reps)).unwrap();
    for (d, row) in table.degrees.iter().zip(&table.values) {
        let vals: Vec<String> = row.iter().map(|&z| format_complex(z)).collect();
        writeln!(out, "irr {d} {}", vals.join(" ")).unwrap();
    }
    out
}

pub fn load_chartab(path: impl AsRef<Path>) -> Result<CharacterTable, CharacterError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| CharacterError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_chartab(&text)
}

pub fn save_chartab(table: &CharacterTable, path: impl AsRef<Path>) -> Result<(), CharacterError> {
    std::fs::write(path.as_ref(), format_chartab(table))
        .map_err(|e| CharacterError::Io(format!("{}: {e}", path.as_ref().display())))
}

/// A unitary representation given by one matrix per group element.
#[derive(Debug, Clone)]
pub struct ExplicitRep {
    degree: usize,
    matrices: Vec<DMatrix<Complex64>>,
}

impl ExplicitRep {
    /// Validates `ρ(1) = I`, unitarity and `ρ(gh) = ρ(g)ρ(h)` to
    /// [`REP_TOLERANCE`].
    pub fn new(group: &FiniteGroup, matrices: Vec<DMatrix<Complex64>>) -> Result<Self, CharacterError> {
        let bad = |m: String| Err(CharacterError::InvalidRepresentation(m));
        if matrices.len() != group.order() {
            return bad(format!("{} matrices for {} elements", matrices.len(), group.order()));
        }
        let degree = matrices[0].nrows();
        if degree == 0 || matrices.iter().any(|m| m.shape() != (degree, degree)) {
            return bad("matrices must be square of one common size".into());
        }
        let id = DMatrix::<Complex64>::identity(degree, degree);
        if max_abs(&(&matrices[0] - &id)) > REP_TOLERANCE {
            return bad("identity element is not sent to I".into());
        }
        for (g, m) in matrices.iter().enumerate() {
            if max_abs(&(m * m.adjoint() - &id)) > REP_TOLERANCE {
                return bad(format!("matrix of element {g} is not unitary"));
            }
        }
        let rep = ExplicitRep { degree, matrices };
        let residual = rep.multiplicativity_residual(group);
        if residual > REP_TOLERANCE {
            return bad(format!("not a homomorphism (residual {residual:e})"));
        }
        Ok(rep)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self, g: usize) -> &DMatrix<Complex64> {
        &self.matrices[g]
    }

    /// `max_{g,h} |ρ(g)ρ(h) − ρ(gh)|`, entrywise.
    pub fn multiplicativity_residual(&self, group: &FiniteGroup) -> f64 {
        let mut worst: f64 = 0.0;
        for g in 0..group.order() {
            for h in 0..group.order() {
                let diff = &self.matrices[g] * &self.matrices[h] - &self.matrices[group.mul(g, h)];
                worst = worst.max(max_abs(&diff));
            }
        }
        worst
    }

    /// The trace function `g ↦ tr ρ(g)`.
    pub fn character(&self) -> Vec<Complex64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }

    /// Trivial one-dimensional representation.
    pub fn trivial(group: &FiniteGroup) -> Self {
        ExplicitRep {
            degree: 1,
            matrices: vec![DMatrix::identity(1, 1); group.order()],
        }
    }

    /// One-dimensional representation from a degree-1 character.
    pub fn linear(table: &CharacterTable, irreducible: usize, group: &FiniteGroup) -> Result<Self, CharacterError> {
        table.check_index(irreducible)?;
        table.ensure_aligned(group)?;
        if table.degrees()[irreducible] != 1 {
            return Err(CharacterError::InvalidRepresentation("character is not linear".into()));
        }
        let matrices = (0..group.order())
            .map(|g| DMatrix::from_element(1, 1, table.value_at(group, irreducible, g)))
            .collect();
        ExplicitRep::new(group, matrices)
    }

    /// Two-dimensional quaternionic representation of the preset `Q8`
    /// (`i ↦ diag(i, -i)`, `j ↦ [[0,1],[-1,0]]`, `k ↦ [[0,i],[i,0]]`).
    pub fn q8_quaternion() -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let units = [
            [c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)],
            [c(0., 1.), c(0., 0.), c(0., 0.), c(0., -1.)],
            [c(0., 0.), c(1., 0.), c(-1., 0.), c(0., 0.)],
            [c(0., 0.), c(0., 1.), c(0., 1.), c(0., 0.)],
        ];
        let matrices = (0..8)
            .map(|g| {
                let m = DMatrix::from_row_slice(2, 2, &units[g % 4]);
                if g >= 4 {
                    -m
                } else {
                    m
                }
            })
            .collect();
        ExplicitRep::new(&preset("Q8").expect("Q8 preset"), matrices).expect("valid Q8 rep")
    }

    /// Two-dimensional real representation of the preset `S3`: the
    /// permutation action on `C³` restricted to the sum-zero plane, in the
    /// orthonormal basis `(1,-1,0)/√2`, `(1,1,-2)/√6`.
    pub fn s3_standard() -> Self {
        let (group, perms) = preset_permutations("S3").expect("S3 preset");
        let basis = DMatrix::from_row_slice(
            3,
            2,
            &[
                1.0 / 2f64.sqrt(),
                1.0 / 6f64.sqrt(),
                -1.0 / 2f64.sqrt(),
                1.0 / 6f64.sqrt(),
                0.0,
                -2.0 / 6f64.sqrt(),
            ],
        );
        let matrices = perms
            .iter()
            .map(|p| {
                let mut perm = DMatrix::<f64>::zeros(3, 3);
                for (x, &px) in p.iter().enumerate() {
                    perm[(px, x)] = 1.0;
                }
                (basis.transpose() * perm * &basis).map(|v| Complex64::new(v, 0.0))
            })
            .collect();
        ExplicitRep::new(&group, matrices).expect("valid S3 rep")
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// True when `m` is within `tol` (entrywise) of `lambda · I`.
pub fn is_scalar_matrix(m: &DMatrix<Complex64>, lambda: Complex64, tol: f64) -> bool {
    let id = DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
    max_abs(&(m - id * lambda)) <= tol
}

/// `(1/|G|) Σ_x ρ(x g x⁻¹)`, which equals `(χ(g)/d)·I` for irreducible `ρ`.
pub fn avg_conjugates(rep: &ExplicitRep, group: &FiniteGroup, g: usize) -> DMatrix<Complex64> {
    let d = rep.degree();
    let sum = (0..group.order()).fold(DMatrix::zeros(d, d), |acc, x| acc + rep.matrix(group.conjugate(g, x)));
    sum / Complex64::new(group.order() as f64, 0.0)
}

/// `|G|^{-n} Σ_{t ∈ G^n} ρ(w(t))`, computed by multiplying the matrices of
/// the tuple entries (the group's table is not used for the word itself).
/// For irreducible `ρ` the result is `(v_w(χ)/d)·I`.
pub fn avg_word(rep: &ExplicitRep, group: &FiniteGroup, w: &Word) -> Result<DMatrix<Complex64>, CharacterError> {
    avg_word_with_budget(rep, group, w, DEFAULT_REP_BUDGET)
}

pub fn avg_word_with_budget(
    rep: &ExplicitRep,
    group: &FiniteGroup,
    w: &Word,
    budget: u128,
) -> Result<DMatrix<Complex64>, CharacterError> {
    let order = group.order();
    let n = w.arity();
    let tuples = (order as u128)
        .checked_pow(n as u32)
        .filter(|&t| t <= budget)
        .ok_or(CharacterError::BudgetExceeded {
            tuples: (order as u128).saturating_pow(n as u32),
            budget,
        })?;
    let d = rep.degree();
    let sum = if n == 0 {
        word_image_sum(rep, w, order, &[])
    } else {
        (0..order)
            .into_par_iter()
            .map(|first| word_image_sum(rep, w, order, &[first]))
            .reduce(|| DMatrix::zeros(d, d), |a, b| a + b)
    };
    Ok(sum / Complex64::new(tuples as f64, 0.0))
}

/// Sum of `ρ(w(t))` over all tuples starting with `prefix`.
fn word_image_sum(rep: &ExplicitRep, w: &Word, order: usize, prefix: &[usize]) -> DMatrix<Complex64> {
    let n = w.arity();
    let d = rep.degree();
    let mut tuple = vec![0usize; n];
    tuple[..prefix.len()].copy_from_slice(prefix);
    let inverses: Vec<DMatrix<Complex64>> = (0..order).map(|g| rep.matrix(g).adjoint()).collect();
    let mut sum = DMatrix::<Complex64>::zeros(d, d);
    loop {
        let mut prod = DMatrix::<Complex64>::identity(d, d);
        for s in w.syllables() {
            let g = tuple[s.letter.index()];
            prod = if s.inverted { prod * &inverses[g] } else { prod * rep.matrix(g) };
        }
        sum += prod;
        // odometer over the free coordinates, last fastest
        let mut pos = n;
        loop {
            if pos == prefix.len() {
                return sum;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < order {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::all_presets;
    use crate::word::parse_word;

    fn sorted_degrees(t: &CharacterTable) -> Vec<u32> {
        let mut d = t.degrees().to_vec();
        d.sort_unstable();
        d
    }

    #[test]
    fn q8_degrees() {
        let t = compute_character_table(&preset("Q8").unwrap()).unwrap();
        assert_eq!(sorted_degrees(&t), vec![1, 1, 1, 1, 2]);
    }

    #[test]
    fn trivial_group() {
        let t = compute_character_table(&preset("C1").unwrap()).unwrap();
        assert_eq!(t.degrees(), &[1]);
        assert_eq!(t.value(0, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn every_preset_certifies() {
        for g in all_presets() {
            let t = compute_character_table(&g).unwrap();
            t.validate(CHARACTER_TOLERANCE).unwrap();
            t.ensure_aligned(&g).unwrap();
            assert_eq!(t.row_index_of_trivial(), Some(0), "{}", g.name());
            for i in 0..t.num_irreducibles() {
                assert_eq!(g.order() % t.degrees()[i] as usize, 0);
            }
        }
    }

    #[test]
    fn indicators() {
        let q8 = preset("Q8").unwrap();
        let t = compute_character_table(&q8).unwrap();
        assert_eq!(fs_indicators(&t, &q8).unwrap(), vec![1, 1, 1, 1, -1]);
        let c3 = preset("C3").unwrap();
        let t = compute_character_table(&c3).unwrap();
        assert_eq!(fs_indicators(&t, &c3).unwrap(), vec![1, 0, 0]);
        assert!(matches!(
            fs_indicator(&t, 3, &c3),
            Err(CharacterError::NoSuchIrreducible { index: 3, count: 3 })
        ));
    }

    #[test]
    fn misaligned_table_rejected() {
        let t = compute_character_table(&preset("Q8").unwrap()).unwrap();
        assert!(t.ensure_aligned(&preset("D4").unwrap()).is_err());
        assert!(t.ensure_aligned(&preset("C8").unwrap()).is_err());
    }

    #[test]
    fn too_large_group_rejected() {
        let s6 = FiniteGroup::from_permutation_generators(
            "S6",
            &[vec![1, 2, 3, 4, 5, 0], vec![1, 0, 2, 3, 4, 5]],
        )
        .unwrap();
        assert_eq!(compute_character_table(&s6), Err(CharacterError::GroupTooLarge(720)));
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+0i"), Some(Complex64::new(1.0, 0.0)));
        assert_eq!(parse_complex("-0.5-0.25i"), Some(Complex64::new(-0.5, -0.25)));
        assert_eq!(parse_complex("1e-3+2E+1i"), Some(Complex64::new(1e-3, 20.0)));
        assert_eq!(parse_complex("2"), Some(Complex64::new(2.0, 0.0)));
        assert_eq!(parse_complex("i"), None);
        assert_eq!(parse_complex("1+xi"), None);
        let z = Complex64::new(-0.5, -0.8660254037844386);
        assert_eq!(parse_complex(&format_complex(z)), Some(z));
    }

    #[test]
    fn chartab_text_round_trip() {
        for name in ["C5", "S3", "A4"] {
            let g = preset(name).unwrap();
            let t = compute_character_table(&g).unwrap();
            assert_eq!(parse_chartab(&format_chartab(&t)).unwrap(), t);
        }
    }

    #[test]
    fn chartab_rejects_bad_degrees() {
        let bad = "chartab fake\norder 2\nclasses 2\nsizes 1 1\nreps 0 1\nirr 1 1+0i 1+0i\nirr 2 2+0i -1+0i\n";
        assert!(matches!(parse_chartab(bad), Err(CharacterError::Invalid(_))));
        let short = "chartab C2\norder 2\nclasses 2\nsizes 1 1\nreps 0 1\nirr 1 1+0i 1+0i\n";
        assert!(matches!(parse_chartab(short), Err(CharacterError::Format { .. })));
        let typo = "chartab C2\norders 2\n";
        assert!(matches!(parse_chartab(typo), Err(CharacterError::Format { line: 2, .. })));
    }

    #[test]
    fn aligned_to_permutes_columns() {
        let g = preset("S3").unwrap();
        let t = compute_character_table(&g).unwrap();
        // swap the two non-identity columns by hand
        let text = format_chartab(&t);
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        for line in lines.iter_mut().skip(3) {
            let mut toks: Vec<&str> = line.split_whitespace().collect();
            let off = if toks[0] == "irr" { 2 } else { 1 };
            toks.swap(off + 1, off + 2);
            *line = toks.join(" ");
        }
        let swapped = parse_chartab(&lines.join("\n")).unwrap();
        assert!(swapped.ensure_aligned(&g).is_err());
        assert_eq!(swapped.aligned_to(&g).unwrap(), t);
    }

    #[test]
    fn q8_rep_matches_character() {
        let q8 = preset("Q8").unwrap();
        let rep = ExplicitRep::q8_quaternion();
        assert!(rep.multiplicativity_residual(&q8) < 1e-12);
        let t = compute_character_table(&q8).unwrap();
        let two = t.degrees().iter().position(|&d| d == 2).unwrap();
        for (g, chi) in rep.character().into_iter().enumerate() {
            assert!((chi - t.value_at(&q8, two, g)).norm() < 1e-10);
        }
    }

    #[test]
    fn s3_rep_is_the_two_dimensional_irreducible() {
        let s3 = preset("S3").unwrap();
        let rep = ExplicitRep::s3_standard();
        let t = compute_character_table(&s3).unwrap();
        let two = t.degrees().iter().position(|&d| d == 2).unwrap();
        for (g, chi) in rep.character().into_iter().enumerate() {
            assert!((chi - t.value_at(&s3, two, g)).norm() < 1e-10);
        }
    }

    #[test]
    fn broken_rep_rejected() {
        let q8 = preset("Q8").unwrap();
        let mut mats: Vec<_> = (0..8).map(|g| ExplicitRep::q8_quaternion().matrix(g).clone()).collect();
        mats.swap(1, 2);
        assert!(matches!(
            ExplicitRep::new(&q8, mats),
            Err(CharacterError::InvalidRepresentation(_))
        ));
        let scaled = vec![DMatrix::from_element(1, 1, Complex64::new(2.0, 0.0)); 8];
        assert!(ExplicitRep::new(&q8, scaled).is_err());
    }

    #[test]
    fn conjugate_averages_q8() {
        let q8 = preset("Q8").unwrap();
        let rep = ExplicitRep::q8_quaternion();
        let one = Complex64::new(1.0, 0.0);
        assert!(is_scalar_matrix(&avg_conjugates(&rep, &q8, 4), -one, 1e-12));
        assert!(is_scalar_matrix(&avg_conjugates(&rep, &q8, 1), Complex64::new(0.0, 0.0), 1e-12));
        assert!(is_scalar_matrix(&avg_conjugates(&rep, &q8, 0), one, 1e-12));
    }

    #[test]
    fn word_averages_q8() {
        let q8 = preset("Q8").unwrap();
        let rep = ExplicitRep::q8_quaternion();
        let avg = |t: &str| avg_word(&rep, &q8, &parse_word(t).unwrap()).unwrap();
        assert!(is_scalar_matrix(&avg("[a,b]"), Complex64::new(0.25, 0.0), 1e-12));
        assert!(is_scalar_matrix(&avg("a"), Complex64::new(0.0, 0.0), 1e-12));
        assert!(is_scalar_matrix(&avg("aa"), Complex64::new(-0.5, 0.0), 1e-12));
        let triv = ExplicitRep::trivial(&q8);
        let w = parse_word("[a,b] c^3").unwrap();
        assert!(is_scalar_matrix(&avg_word(&triv, &q8, &w).unwrap(), Complex64::new(1.0, 0.0), 1e-12));
        assert!(is_scalar_matrix(&avg_word(&rep, &q8, &Word::empty()).unwrap(), Complex64::new(1.0, 0.0), 0.0));
    }

    #[test]
    fn word_average_budget() {
        let q8 = preset("Q8").unwrap();
        let rep = ExplicitRep::q8_quaternion();
        let w = parse_word("[a,b][c,d]").unwrap();
        assert!(matches!(
            avg_word_with_budget(&rep, &q8, &w, 4095),
            Err(CharacterError::BudgetExceeded { tuples: 4096, budget: 4095 })
        ));
    }

    #[test]
    fn partitioned_sum_matches_sequential() {
        let q8 = preset("Q8").unwrap();
        let rep = ExplicitRep::q8_quaternion();
        let w = parse_word("a b a' c b'").unwrap();
        let sequential = word_image_sum(&rep, &w, 8, &[]) / Complex64::new(512.0, 0.0);
        let parallel = avg_word(&rep, &q8, &w).unwrap();
        assert!(max_abs(&(sequential - parallel)) < 1e-12);
    }

    #[test]
    fn linear_reps_from_table() {
        let g = preset("C4").unwrap();
        let t = compute_character_table(&g).unwrap();
        for i in 0..4 {
            let rep = ExplicitRep::linear(&t, i, &g).unwrap();
            assert!(rep.multiplicativity_residual(&g) < 1e-12);
        }
    }
}
