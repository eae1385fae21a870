//! Finite groups as dense multiplication tables.
//!
//! Elements are `0..order` with `0` the identity; every product is one table
//! lookup. Groups come from a validated table, from permutation generators,
//! from a `.grp` file, or from the [`preset`] catalogue.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest order for which associativity is checked on every triple.
pub const FULL_ASSOCIATIVITY_CHECK: usize = 64;
/// Random triples checked above [`FULL_ASSOCIATIVITY_CHECK`].
pub const SAMPLED_ASSOCIATIVITY_TRIPLES: usize = 100_000;
/// Default cap on the size of a permutation closure.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

pub const PRESET_NAMES: &[&str] = &[
    "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12", "C2xC2", "S3", "D4",
    "Q8", "A4", "S4",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("empty multiplication table")]
    Empty,
    #[error("table is not square: row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("not closed: entry {value} at ({row}, {col}) is outside 0..{order}")]
    NotClosed {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("no inverses: {0}")]
    NoInverses(String),
    #[error("no identity element")]
    NoIdentity,
    #[error("identity must be element 0, found it at {0}")]
    IdentityNotFirst(usize),
    #[error("not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(usize, usize, usize),
    #[error("generator {0} is not a permutation")]
    NotAPermutation(usize),
    #[error("generators act on different numbers of points")]
    DegreeMismatch,
    #[error("closure exceeds cap of {0} elements")]
    ClosureTooLarge(usize),
    #[error("unknown preset group {0:?}")]
    UnknownPreset(String),
    #[error("group file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("declared order {declared} but the group has order {actual}")]
    OrderMismatch { declared: usize, actual: usize },
    #[error("cannot read group file: {0}")]
    Io(String),
}

/// Conjugacy classes, indexed in order of their smallest element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClasses {
    pub class_of: Vec<usize>,
    pub sizes: Vec<usize>,
    pub representatives: Vec<usize>,
}

impl ConjugacyClasses {
    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn members(&self, class: usize) -> impl Iterator<Item = usize> + '_ {
        self.class_of
            .iter()
            .enumerate()
            .filter_map(move |(g, &c)| (c == class).then_some(g))
    }
}

/// An immutable, validated finite group.
pub struct FiniteGroup {
    name: String,
    order: usize,
    mult: Vec<u32>,
    inv: Vec<u32>,
    classes: OnceLock<ConjugacyClasses>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl Clone for FiniteGroup {
    fn clone(&self) -> Self {
        FiniteGroup {
            name: self.name.clone(),
            order: self.order,
            mult: self.mult.clone(),
            inv: self.inv.clone(),
            classes: self.classes.clone(),
        }
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mult == other.mult
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Validates a Cayley table. Checks, in order: shape, closure, that every
    /// row and column is a permutation (cancellation, hence inverses), that
    /// element 0 is the identity, and associativity.
    pub fn from_multiplication_table(
        name: impl Into<String>,
        rows: &[Vec<usize>],
    ) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        let mut mult = Vec::with_capacity(order * order);
        for (row, entries) in rows.iter().enumerate() {
            if entries.len() != order {
                return Err(GroupError::NotSquare {
                    row,
                    len: entries.len(),
                    order,
                });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::NotClosed {
                        row,
                        col,
                        value,
                        order,
                    });
                }
                mult.push(value as u32);
            }
        }
        Self::from_flat(name.into(), order, mult)
    }

    fn from_flat(name: String, order: usize, mult: Vec<u32>) -> Result<Self, GroupError> {
        let at = |a: usize, b: usize| mult[a * order + b] as usize;

        let mut seen = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                let v = at(a, b);
                if seen[v] == 2 * a {
                    return Err(GroupError::NoInverses(format!(
                        "row {a} repeats element {v}"
                    )));
                }
                seen[v] = 2 * a;
            }
        }
        for b in 0..order {
            for a in 0..order {
                let v = at(a, b);
                if seen[v] == 2 * b + 1 {
                    return Err(GroupError::NoInverses(format!(
                        "column {b} repeats element {v}"
                    )));
                }
                seen[v] = 2 * b + 1;
            }
        }

        let is_identity = |e: usize| (0..order).all(|g| at(e, g) == g && at(g, e) == g);
        if !is_identity(0) {
            return match (1..order).find(|&e| is_identity(e)) {
                Some(e) => Err(GroupError::IdentityNotFirst(e)),
                None => Err(GroupError::NoIdentity),
            };
        }

        let check = |a: usize, b: usize, c: usize| {
            if at(at(a, b), c) != at(a, at(b, c)) {
                Err(GroupError::NotAssociative(a, b, c))
            } else {
                Ok(())
            }
        };
        if order <= FULL_ASSOCIATIVITY_CHECK {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..SAMPLED_ASSOCIATIVITY_TRIPLES {
                check(
                    rng.random_range(0..order),
                    rng.random_range(0..order),
                    rng.random_range(0..order),
                )?;
            }
        }

        let mut inv = vec![0u32; order];
        for a in 0..order {
            let b = (0..order).find(|&b| at(a, b) == 0).expect("latin square row");
            inv[a] = b as u32;
        }

        Ok(FiniteGroup {
            name,
            order,
            mult,
            inv,
            classes: OnceLock::new(),
        })
    }

    /// Closure of permutation generators, breadth first from the identity.
    /// Element ids follow discovery order. Products compose right to left:
    /// `(p*q)(x) = p(q(x))`.
    pub fn from_permutation_generators(
        name: impl Into<String>,
        generators: &[Vec<usize>],
    ) -> Result<Self, GroupError> {
        Ok(permutation_closure(name, generators, DEFAULT_CLOSURE_CAP)?.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `h g h⁻¹`
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(h, g), self.inv(h))
    }

    /// Table row for `a`, as raw ids.
    pub fn row(&self, a: usize) -> &[u32] {
        &self.mult[a * self.order..(a + 1) * self.order]
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn centralizer_order(&self, g: usize) -> usize {
        (0..self.order)
            .filter(|&h| self.mul(g, h) == self.mul(h, g))
            .count()
    }

    /// Conjugacy classes (computed once, then cached).
    pub fn classes(&self) -> &ConjugacyClasses {
        self.classes.get_or_init(|| conjugacy_classes(self))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Orbits of the conjugation action, numbered by smallest member.
pub fn conjugacy_classes(group: &FiniteGroup) -> ConjugacyClasses {
    let n = group.order();
    let mut class_of = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut representatives = Vec::new();
    for g in 0..n {
        if class_of[g] != usize::MAX {
            continue;
        }
        let index = sizes.len();
        let mut size = 0;
        for h in 0..n {
            let c = group.conjugate(g, h);
            if class_of[c] == usize::MAX {
                class_of[c] = index;
                size += 1;
            }
        }
        sizes.push(size);
        representatives.push(g);
    }
    ConjugacyClasses {
        class_of,
        sizes,
        representatives,
    }
}

/// Like [`FiniteGroup::from_permutation_generators`] but with an explicit cap,
/// and also returns the permutation behind each element id.
pub fn permutation_closure(
    name: impl Into<String>,
    generators: &[Vec<usize>],
    cap: usize,
) -> Result<(FiniteGroup, Vec<Vec<usize>>), GroupError> {
    let degree = generators.first().map_or(0, Vec::len);
    for (k, p) in generators.iter().enumerate() {
        if p.len() != degree {
            return Err(GroupError::DegreeMismatch);
        }
        let mut hit = vec![false; degree];
        for &x in p {
            if x >= degree || std::mem::replace(&mut hit[x], true) {
                return Err(GroupError::NotAPermutation(k));
            }
        }
    }
    let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&x| p[x]).collect() };

    let identity: Vec<usize> = (0..degree).collect();
    let mut elements = vec![identity.clone()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for s in generators {
            let next = compose(&elements[i], s);
            if !index.contains_key(&next) {
                if elements.len() == cap {
                    return Err(GroupError::ClosureTooLarge(cap));
                }
                index.insert(next.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(next);
            }
        }
    }

    let order = elements.len();
    let mut mult = Vec::with_capacity(order * order);
    for a in &elements {
        for b in &elements {
            mult.push(index[&compose(a, b)] as u32);
        }
    }
    let group = FiniteGroup::from_flat(name.into(), order, mult)?;
    Ok((group, elements))
}

/// Parses cycle notation such as `(0 1 2)(3 4)` on `degree` points.
/// `()` is the identity.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Vec<usize>, String> {
    let mut perm: Vec<usize> = (0..degree).collect();
    for cycle in cycles_of(text)? {
        for (k, &x) in cycle.iter().enumerate() {
            if x >= degree {
                return Err(format!("point {x} outside 0..{degree}"));
            }
            perm[x] = cycle[(k + 1) % cycle.len()];
        }
    }
    Ok(perm)
}

fn cycles_of(text: &str) -> Result<Vec<Vec<usize>>, String> {
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("expected '(' in {text:?}"))?;
        let close = body
            .find(')')
            .ok_or_else(|| format!("unclosed cycle in {text:?}"))?;
        let points = body[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| format!("bad point {s:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sorted = points.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != points.len() {
            return Err(format!("repeated point in cycle {:?}", &body[..close]));
        }
        cycles.push(points);
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

fn max_point(text: &str) -> Result<Option<usize>, String> {
    Ok(cycles_of(text)?.into_iter().flatten().max())
}

/// Reads a `.grp` group file.
///
/// ```text
/// group <name>
/// order <N>
/// table            | perm (0 1 2)(3 4)
/// <N rows of N ids>  perm ...
/// ```
pub fn parse_group_file(text: &str) -> Result<FiniteGroup, GroupError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line: usize, message: &str| GroupError::Format {
        line,
        message: message.to_string(),
    };

    let (ln, first) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let name = first
        .strip_prefix("group")
        .map(str::trim)
        .filter(|n| !n.is_empty())
        .ok_or_else(|| err(ln, "expected `group <name>`"))?
        .to_string();

    let (ln, second) = lines.next().ok_or_else(|| err(ln + 1, "missing order line"))?;
    let declared: usize = second
        .strip_prefix("order")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| err(ln, "expected `order <N>`"))?;

    let rest: Vec<(usize, &str)> = lines.collect();
    let group = match rest.first() {
        Some((_, "table")) => {
            let rows = rest[1..]
                .iter()
                .map(|&(ln, l)| {
                    l.split_whitespace()
                        .map(|t| t.parse::<usize>().map_err(|_| err(ln, "bad table entry")))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            if rows.len() != declared {
                return Err(err(
                    rest.last().map_or(ln, |r| r.0),
                    &format!("expected {declared} table rows, found {}", rows.len()),
                ));
            }
            FiniteGroup::from_multiplication_table(name, &rows)?
        }
        Some((_, l)) if l.starts_with("perm") => {
            let mut cycles = Vec::new();
            let mut degree = 0;
            for &(ln, l) in &rest {
                let body = l
                    .strip_prefix("perm")
                    .ok_or_else(|| err(ln, "expected `perm <cycles>`"))?;
                if let Some(m) = max_point(body).map_err(|m| err(ln, &m))? {
                    degree = degree.max(m + 1);
                }
                cycles.push((ln, body));
            }
            let gens = cycles
                .into_iter()
                .map(|(ln, body)| parse_cycles(body, degree).map_err(|m| err(ln, &m)))
                .collect::<Result<Vec<_>, _>>()?;
            FiniteGroup::from_permutation_generators(name, &gens)?
        }
        Some(&(ln, _)) => return Err(err(ln, "expected `table` or `perm` lines")),
        None => return Err(err(ln + 1, "missing group body")),
    };
    if group.order() != declared {
        return Err(GroupError::OrderMismatch {
            declared,
            actual: group.order(),
        });
    }
    Ok(group)
}

pub fn load_group_file(path: impl AsRef<Path>) -> Result<FiniteGroup, GroupError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| GroupError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_group_file(&text)
}

fn cyclic(n: usize) -> FiniteGroup {
    let rows: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteGroup::from_multiplication_table(format!("C{n}"), &rows).expect("cyclic table")
}

/// Q8 with elements ordered 1, i, j, k, -1, -i, -j, -k.
fn quaternion() -> FiniteGroup {
    // unit products among {1, i, j, k}: (sign flip, unit)
    const UNIT: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let rows: Vec<Vec<usize>> = (0..8)
        .map(|a| {
            (0..8)
                .map(|b| {
                    let (flip, unit) = UNIT[a % 4][b % 4];
                    let negative = (a >= 4) ^ (b >= 4) ^ flip;
                    unit + if negative { 4 } else { 0 }
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_multiplication_table("Q8", &rows).expect("Q8 table")
}

/// Permutation generators for the non-cyclic presets, as cycle strings and
/// number of points. Element ids are breadth-first discovery order.
pub fn preset_generators(name: &str) -> Option<(usize, &'static [&'static str])> {
    Some(match name {
        "C2xC2" => (4, &["(0 1)", "(2 3)"]),
        "S3" => (3, &["(0 1)", "(0 1 2)"]),
        "D4" => (4, &["(0 1 2 3)", "(1 3)"]),
        "A4" => (4, &["(0 1 2)", "(1 2 3)"]),
        "S4" => (4, &["(0 1 2 3)", "(0 1)"]),
        _ => return None,
    })
}

/// Named small groups: `C1`..`C12`, `C2xC2`, `S3`, `D4`, `Q8`, `A4`, `S4`.
pub fn preset(name: &str) -> Result<FiniteGroup, GroupError> {
    if name == "Q8" {
        return Ok(quaternion());
    }
    if let Some(n) = name.strip_prefix('C').and_then(|s| s.parse::<usize>().ok()) {
        if (1..=12).contains(&n) && name == format!("C{n}") {
            return Ok(cyclic(n));
        }
    }
    let (degree, cycles) =
        preset_generators(name).ok_or_else(|| GroupError::UnknownPreset(name.to_string()))?;
    let gens: Vec<Vec<usize>> = cycles
        .iter()
        .map(|c| parse_cycles(c, degree).expect("preset cycles"))
        .collect();
    FiniteGroup::from_permutation_generators(name, &gens)
}

/// Preset permutation group together with the permutation of each element.
pub fn preset_permutations(name: &str) -> Option<(FiniteGroup, Vec<Vec<usize>>)> {
    let (degree, cycles) = preset_generators(name)?;
    let gens: Vec<Vec<usize>> = cycles
        .iter()
        .map(|c| parse_cycles(c, degree).expect("preset cycles"))
        .collect();
    permutation_closure(name, &gens, DEFAULT_CLOSURE_CAP).ok()
}

pub fn all_presets() -> Vec<FiniteGroup> {
    PRESET_NAMES
        .iter()
        .map(|n| preset(n).expect("preset"))
        .collect()
}
