//! The 2-complex of a word: one polygon whose sides are glued according to
//! the letters, and its classification when the result is a closed surface.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::word::{SignedLetter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("the empty word has no polygon")]
    EmptyWord,
    #[error("not a closed surface: letter x{letter} occurs {count} time(s)")]
    NotASurface { letter: usize, count: usize },
    #[error("a non-orientable surface needs at least one crosscap")]
    NoCrosscaps,
}

/// Polygon with identified sides and the induced partition of its corners.
///
/// Side `k` runs from corner `k` to corner `k+1 (mod L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordComplex {
    sides: Vec<SignedLetter>,
    edge_count: usize,
    corner_class: Vec<usize>,
    vertex_count: usize,
}

impl WordComplex {
    pub fn sides(&self) -> &[SignedLetter] {
        &self.sides
    }

    /// Distinct letters in the word (unused letters of the arity excluded).
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        1
    }

    /// Vertex class of each polygon corner, numbered by first appearance.
    pub fn corner_classes(&self) -> &[usize] {
        &self.corner_class
    }

    /// Corners grouped by vertex.
    pub fn vertex_partition(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.vertex_count];
        for (corner, &v) in self.corner_class.iter().enumerate() {
            parts[v].push(corner);
        }
        parts
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Glues the word polygon. Each side labelled `e^{+1}` sends its start
/// corner to the tail of `e` and its end corner to the head; `e^{-1}` does
/// the reverse. Corners sent to the same endpoint are one vertex.
pub fn build_complex(w: &Word) -> Result<WordComplex, ComplexError> {
    if w.is_empty() {
        return Err(ComplexError::EmptyWord);
    }
    let sides = w.syllables().to_vec();
    let len = sides.len();
    let support = w.support();
    let mut edge_slot = vec![usize::MAX; w.arity()];
    for (slot, &letter) in support.iter().enumerate() {
        edge_slot[letter] = slot;
    }

    // nodes: corners 0..len, then tail/head of each edge
    let mut uf = UnionFind::new(len + 2 * support.len());
    let tail = |e: usize| len + 2 * e;
    let head = |e: usize| len + 2 * e + 1;
    for (k, side) in sides.iter().enumerate() {
        let e = edge_slot[side.letter.0];
        let (start, end) = if side.inverted {
            (head(e), tail(e))
        } else {
            (tail(e), head(e))
        };
        uf.union(k, start);
        uf.union((k + 1) % len, end);
    }

    let mut label = vec![usize::MAX; len + 2 * support.len()];
    let mut corner_class = Vec::with_capacity(len);
    let mut vertex_count = 0;
    for corner in 0..len {
        let root = uf.find(corner);
        if label[root] == usize::MAX {
            label[root] = vertex_count;
            vertex_count += 1;
        }
        corner_class.push(label[root]);
    }

    Ok(WordComplex {
        sides,
        edge_count: support.len(),
        corner_class,
        vertex_count,
    })
}

/// `V − E + F` with one face.
pub fn euler_characteristic(c: &WordComplex) -> i64 {
    c.vertex_count() as i64 - c.edge_count() as i64 + 1
}

/// True when every letter that occurs does so exactly twice (either sign).
/// The literal word is inspected; `a a'` counts as a sphere.
pub fn is_closed_surface(w: &Word) -> bool {
    surface_violation(w).is_none() && !w.is_empty()
}

fn surface_violation(w: &Word) -> Option<ComplexError> {
    w.support().into_iter().find_map(|letter| {
        let (p, n) = w.occurrences(letter);
        (p + n != 2).then_some(ComplexError::NotASurface {
            letter,
            count: p + n,
        })
    })
}

/// A closed surface up to homeomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SurfaceClass {
    orientable: bool,
    handles: u32,
}

impl SurfaceClass {
    pub fn sphere() -> Self {
        Self::orientable(0)
    }

    /// Connected sum of `genus` tori.
    pub fn orientable(genus: u32) -> Self {
        SurfaceClass {
            orientable: true,
            handles: genus,
        }
    }

    /// Connected sum of `crosscaps` projective planes.
    pub fn non_orientable(crosscaps: u32) -> Result<Self, ComplexError> {
        if crosscaps == 0 {
            return Err(ComplexError::NoCrosscaps);
        }
        Ok(SurfaceClass {
            orientable: false,
            handles: crosscaps,
        })
    }

    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    pub fn euler_characteristic(&self) -> i64 {
        if self.orientable {
            2 - 2 * self.handles as i64
        } else {
            2 - self.handles as i64
        }
    }

    pub fn genus(&self) -> Option<u32> {
        self.orientable.then_some(self.handles)
    }

    pub fn crosscaps(&self) -> Option<u32> {
        (!self.orientable).then_some(self.handles)
    }

    /// Genus for orientable surfaces, crosscap count otherwise.
    pub fn genus_or_crosscaps(&self) -> u32 {
        self.handles
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.orientable, self.handles) {
            (true, 0) => write!(f, "sphere"),
            (true, 1) => write!(f, "torus"),
            (true, g) => write!(f, "orientable genus {g}"),
            (false, 1) => write!(f, "projective plane"),
            (false, 2) => write!(f, "Klein bottle"),
            (false, k) => write!(f, "non-orientable, {k} crosscaps"),
        }
    }
}

/// Classifies a closed-surface word by orientability and Euler characteristic.
///
/// Orientable exactly when each letter appears once as itself and once
/// inverted.
pub fn classify_surface(w: &Word) -> Result<SurfaceClass, ComplexError> {
    if let Some(e) = surface_violation(w) {
        return Err(e);
    }
    let complex = build_complex(w)?;
    let kappa = euler_characteristic(&complex);
    let orientable = w.support().into_iter().all(|l| w.occurrences(l) == (1, 1));
    if orientable {
        debug_assert!(kappa <= 2 && kappa % 2 == 0);
        Ok(SurfaceClass::orientable(((2 - kappa) / 2) as u32))
    } else {
        SurfaceClass::non_orientable((2 - kappa) as u32)
    }
}

/// Homeomorphism test between two closed-surface words. Non-surface input is
/// an error, not `false`.
pub fn same_surface_class(w1: &Word, w2: &Word) -> Result<bool, ComplexError> {
    Ok(classify_surface(w1)? == classify_surface(w2)?)
}

/// Standard word for a surface: `x0 x0'` for the sphere, `[x0,x1]…` for
/// genus `g`, `x0² x1² …` for `k` crosscaps.
pub fn canonical_surface_word(s: SurfaceClass) -> Word {
    let mut syllables = Vec::new();
    match (s.is_orientable(), s.genus_or_crosscaps()) {
        (true, 0) => syllables.extend([SignedLetter::pos(0), SignedLetter::neg(0)]),
        (true, g) => {
            for h in 0..g as usize {
                let (a, b) = (2 * h, 2 * h + 1);
                syllables.extend([
                    SignedLetter::pos(a),
                    SignedLetter::pos(b),
                    SignedLetter::neg(a),
                    SignedLetter::neg(b),
                ]);
            }
        }
        (false, k) => {
            for c in 0..k as usize {
                syllables.extend([SignedLetter::pos(c), SignedLetter::pos(c)]);
            }
        }
    }
    Word::from_syllables(syllables)
}

/// Summary record used by the `classify` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub surface: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientable: Option<bool>,
    pub euler: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosscaps: Option<u32>,
    #[serde(rename = "V")]
    pub vertices: usize,
    #[serde(rename = "E")]
    pub edges: usize,
    #[serde(rename = "F")]
    pub faces: usize,
}

pub fn classify(w: &Word) -> Result<Classification, ComplexError> {
    let c = build_complex(w)?;
    let surface = classify_surface(w).ok();
    Ok(Classification {
        surface: surface.is_some(),
        orientable: surface.map(|s| s.is_orientable()),
        euler: euler_characteristic(&c),
        genus: surface.and_then(|s| s.genus()),
        crosscaps: surface.and_then(|s| s.crosscaps()),
        vertices: c.vertex_count(),
        edges: c.edge_count(),
        faces: c.face_count(),
    })
}
