//! Free-group words: parsing, reduction, connected sums, Nielsen moves and
//! evaluation in a finite group.
//!
//! A [`Word`] keeps its literal syllable sequence. Nothing here reduces a
//! word behind the caller's back, because the 2-complex of `a a'` (a sphere)
//! differs from the 2-complex of the empty word.
//!
//! Grammar accepted by [`parse_word`]:
//!
//! ```text
//! word   := term*
//! term   := atom ('^' integer)?
//! atom   := letter | letter "'" | '[' word ',' word ']' | '(' word ')'
//! letter := [a-z] | 'x' [0-9]+
//! ```
//!
//! `[u,v]` is `u v u⁻¹ v⁻¹`, `a'` and `a^-1` are both the inverse of `a`, and
//! an exponent of zero is rejected.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::group::FiniteGroup;

/// A free generator, addressed by its 0-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub usize);

impl Letter {
    pub fn index(self) -> usize {
        self.0
    }
}

/// One syllable of a word: a generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedLetter {
    pub letter: Letter,
    pub inverted: bool,
}

impl SignedLetter {
    pub fn new(index: usize, inverted: bool) -> Self {
        SignedLetter {
            letter: Letter(index),
            inverted,
        }
    }

    pub fn pos(index: usize) -> Self {
        Self::new(index, false)
    }

    pub fn neg(index: usize) -> Self {
        Self::new(index, true)
    }

    /// `+1` for a generator, `-1` for an inverse.
    pub fn sign(self) -> i8 {
        if self.inverted {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        SignedLetter {
            letter: self.letter,
            inverted: !self.inverted,
        }
    }

    fn cancels(self, other: SignedLetter) -> bool {
        self.letter == other.letter && self.inverted != other.inverted
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown letter token {token:?} at byte {pos}")]
    UnknownLetter { pos: usize, token: String },
    #[error("zero exponent at byte {pos}")]
    ZeroExponent { pos: usize },
    #[error("letter x{letter} does not fit arity {arity}")]
    LetterOutOfRange { letter: usize, arity: usize },
    #[error("invalid Nielsen move: {0}")]
    InvalidMove(String),
    #[error("tuple has {got} entries but the word has arity {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("tuple entry {entry} is not an element of a group of order {order}")]
    ElementOutOfRange { entry: usize, order: usize },
}

/// An element of the free group `F_n`, stored as a literal syllable sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    syllables: Vec<SignedLetter>,
    arity: usize,
    reduced: bool,
}

impl Word {
    /// Builds a word with an explicit arity. Every syllable must use a
    /// letter below `arity`.
    pub fn new(syllables: Vec<SignedLetter>, arity: usize) -> Result<Self, WordError> {
        if let Some(bad) = syllables.iter().find(|s| s.letter.0 >= arity) {
            return Err(WordError::LetterOutOfRange {
                letter: bad.letter.0,
                arity,
            });
        }
        let reduced = syllables.windows(2).all(|p| !p[0].cancels(p[1]));
        Ok(Word {
            syllables,
            arity,
            reduced,
        })
    }

    /// Builds a word whose arity is one more than the largest letter used.
    pub fn from_syllables(syllables: Vec<SignedLetter>) -> Self {
        let arity = min_arity(&syllables);
        Word::new(syllables, arity).expect("arity covers every letter")
    }

    pub fn empty() -> Self {
        Word {
            syllables: Vec::new(),
            arity: 0,
            reduced: true,
        }
    }

    pub fn syllables(&self) -> &[SignedLetter] {
        &self.syllables
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// True when no syllable is followed by its own inverse.
    pub fn is_freely_reduced(&self) -> bool {
        self.reduced
    }

    /// Same syllables, different arity. The new arity must still cover every
    /// letter used.
    pub fn with_arity(&self, arity: usize) -> Result<Self, WordError> {
        Word::new(self.syllables.clone(), arity)
    }

    /// The inverse word: syllables reversed and each one inverted.
    pub fn inverse(&self) -> Self {
        let syllables = self.syllables.iter().rev().map(|s| s.inverse()).collect();
        Word::new(syllables, self.arity).expect("same letters")
    }

    /// Concatenation in the same free group (arity is the larger of the two).
    pub fn concat(&self, other: &Word) -> Self {
        let mut syllables = self.syllables.clone();
        syllables.extend_from_slice(&other.syllables);
        Word::new(syllables, self.arity.max(other.arity)).expect("arity covers both")
    }

    /// Sorted list of the letters that actually occur.
    pub fn support(&self) -> Vec<usize> {
        let mut seen = vec![false; self.arity];
        for s in &self.syllables {
            seen[s.letter.0] = true;
        }
        seen.iter()
            .enumerate()
            .filter_map(|(i, &used)| used.then_some(i))
            .collect()
    }

    /// `(positive, negative)` occurrence counts for a letter.
    pub fn occurrences(&self, letter: usize) -> (usize, usize) {
        self.syllables
            .iter()
            .filter(|s| s.letter.0 == letter)
            .fold((0, 0), |(p, n), s| if s.inverted { (p, n + 1) } else { (p + 1, n) })
    }
}

fn min_arity(syllables: &[SignedLetter]) -> usize {
    syllables.iter().map(|s| s.letter.0 + 1).max().unwrap_or(0)
}

impl fmt::Display for Word {
    /// Space-separated syllables, `a'` for inverses. Words of arity above 26
    /// use the `xK` spelling throughout so they parse back unambiguously.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphabetic = self.arity <= 26;
        for (k, s) in self.syllables.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            if alphabetic {
                write!(f, "{}", (b'a' + s.letter.0 as u8) as char)?;
            } else {
                write!(f, "x{}", s.letter.0)?;
            }
            if s.inverted {
                f.write_str("'")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

/// Parses a word; arity is one more than the largest letter used.
pub fn parse_word(text: &str) -> Result<Word, WordError> {
    parse_word_with_arity(text, None)
}

/// Parses a word, optionally forcing a larger arity.
pub fn parse_word_with_arity(text: &str, arity: Option<usize>) -> Result<Word, WordError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let syllables = parser.word()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.unexpected());
    }
    match arity {
        Some(n) => Word::new(syllables, n),
        None => Ok(Word::from_syllables(syllables)),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn unexpected(&self) -> WordError {
        match self.peek() {
            Some(c) => WordError::Syntax {
                pos: self.pos,
                message: format!("unexpected {:?}", c as char),
            },
            None => WordError::Syntax {
                pos: self.pos,
                message: "unexpected end of input".into(),
            },
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), WordError> {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(WordError::Syntax {
                pos: self.pos,
                message: format!("expected {:?}", byte as char),
            })
        }
    }

    // word := term*  (stops at ',' ')' ']' or end)
    fn word(&mut self) -> Result<Vec<SignedLetter>, WordError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(b',') | Some(b')') | Some(b']') => return Ok(out),
                Some(_) => out.extend(self.term()?),
            }
        }
    }

    fn term(&mut self) -> Result<Vec<SignedLetter>, WordError> {
        let atom = self.atom()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(atom);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        let exponent = self.integer()?;
        if exponent == 0 {
            return Err(WordError::ZeroExponent { pos: start });
        }
        let base = if exponent < 0 { invert(&atom) } else { atom };
        let reps = exponent.unsigned_abs() as usize;
        let mut out = Vec::with_capacity(base.len() * reps);
        for _ in 0..reps {
            out.extend_from_slice(&base);
        }
        Ok(out)
    }

    fn integer(&mut self) -> Result<i64, WordError> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits {
            return Err(WordError::Syntax {
                pos: digits,
                message: "expected an integer exponent".into(),
            });
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<i64>().ok())
            .ok_or(WordError::Syntax {
                pos: start,
                message: "exponent out of range".into(),
            })
    }

    fn atom(&mut self) -> Result<Vec<SignedLetter>, WordError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let u = self.word()?;
                self.expect(b',')?;
                let v = self.word()?;
                self.expect(b']')?;
                let mut out = u.clone();
                out.extend_from_slice(&v);
                out.extend(invert(&u));
                out.extend(invert(&v));
                Ok(out)
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.word()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_lowercase() => {
                self.pos += 1;
                let mut index = (c - b'a') as usize;
                if c == b'x' && self.peek().is_some_and(|d| d.is_ascii_digit()) {
                    let digits = self.pos;
                    while self.peek().is_some_and(|d| d.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.src[digits..self.pos]).expect("ascii");
                    index = text.parse().map_err(|_| WordError::UnknownLetter {
                        pos: start,
                        token: format!("x{text}"),
                    })?;
                }
                let inverted = if self.peek() == Some(b'\'') {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                Ok(vec![SignedLetter::new(index, inverted)])
            }
            Some(c) if c.is_ascii_alphanumeric() || !c.is_ascii() => {
                let len = std::str::from_utf8(&self.src[start..])
                    .ok()
                    .and_then(|s| s.chars().next())
                    .map_or(1, char::len_utf8);
                Err(WordError::UnknownLetter {
                    pos: start,
                    token: String::from_utf8_lossy(&self.src[start..start + len]).into_owned(),
                })
            }
            _ => Err(self.unexpected()),
        }
    }
}

fn invert(syllables: &[SignedLetter]) -> Vec<SignedLetter> {
    syllables.iter().rev().map(|s| s.inverse()).collect()
}

/// Free reduction: cancels adjacent `x x⁻¹` pairs until none remain.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<SignedLetter> = Vec::with_capacity(w.len());
    for &s in w.syllables() {
        match stack.last() {
            Some(&top) if top.cancels(s) => {
                stack.pop();
            }
            _ => stack.push(s),
        }
    }
    Word::new(stack, w.arity()).expect("letters unchanged")
}

/// Free reduction followed by stripping conjugating pairs from the ends.
///
/// The result is *a* cyclically reduced conjugate, not a canonical one.
pub fn cyclic_reduce(w: &Word) -> Word {
    let reduced = free_reduce(w);
    let s = reduced.syllables();
    let (mut lo, mut hi) = (0, s.len());
    while hi - lo >= 2 && s[lo].cancels(s[hi - 1]) {
        lo += 1;
        hi -= 1;
    }
    Word::new(s[lo..hi].to_vec(), w.arity()).expect("letters unchanged")
}

/// Product in the free product `F_{n1} * F_{n2}`: `w2`'s letters are shifted
/// past `w1`'s arity. On surface words this is the connected sum.
pub fn connected_sum(w1: &Word, w2: &Word) -> Word {
    let shift = w1.arity();
    let mut syllables = w1.syllables().to_vec();
    syllables.extend(
        w2.syllables()
            .iter()
            .map(|s| SignedLetter::new(s.letter.0 + shift, s.inverted)),
    );
    Word::new(syllables, w1.arity() + w2.arity()).expect("shifted letters fit")
}

/// Elementary Nielsen transformation of the generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NielsenMove {
    /// `x_i ↦ x_{σ(i)}`.
    Permute(Vec<usize>),
    /// `x_i ↦ x_i⁻¹`.
    Invert(usize),
    /// `x_target ↦ x_target x_multiplier`.
    Shear { target: usize, multiplier: usize },
}

impl NielsenMove {
    fn validate(&self, arity: usize) -> Result<(), WordError> {
        match self {
            NielsenMove::Permute(sigma) => {
                if sigma.len() != arity {
                    return Err(WordError::InvalidMove(format!(
                        "permutation has length {} but arity is {arity}",
                        sigma.len()
                    )));
                }
                let mut seen = vec![false; arity];
                for &i in sigma {
                    if i >= arity || std::mem::replace(&mut seen[i], true) {
                        return Err(WordError::InvalidMove(format!(
                            "{sigma:?} is not a permutation of 0..{arity}"
                        )));
                    }
                }
                Ok(())
            }
            NielsenMove::Invert(i) if *i >= arity => Err(WordError::InvalidMove(format!(
                "index {i} out of range for arity {arity}"
            ))),
            NielsenMove::Invert(_) => Ok(()),
            NielsenMove::Shear { target, multiplier } => {
                if target == multiplier {
                    Err(WordError::InvalidMove("shear needs two distinct letters".into()))
                } else if (*target).max(*multiplier) >= arity {
                    Err(WordError::InvalidMove(format!(
                        "shear ({target}, {multiplier}) out of range for arity {arity}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    fn image(&self, s: SignedLetter, out: &mut Vec<SignedLetter>) {
        let i = s.letter.0;
        match self {
            NielsenMove::Permute(sigma) => out.push(SignedLetter::new(sigma[i], s.inverted)),
            NielsenMove::Invert(k) if *k == i => out.push(s.inverse()),
            NielsenMove::Shear { target, multiplier } if *target == i => {
                let (x, y) = (SignedLetter::pos(i), SignedLetter::pos(*multiplier));
                if s.inverted {
                    out.extend([y.inverse(), x.inverse()]);
                } else {
                    out.extend([x, y]);
                }
            }
            _ => out.push(s),
        }
    }
}

/// Substitutes the generators according to `m`, then freely reduces.
pub fn apply_nielsen(w: &Word, m: &NielsenMove) -> Result<Word, WordError> {
    m.validate(w.arity())?;
    let mut out = Vec::with_capacity(w.len() + 4);
    for &s in w.syllables() {
        m.image(s, &mut out);
    }
    Ok(free_reduce(&Word::new(out, w.arity())?))
}

/// `w(t)`: left-to-right product of `t[letter]^{±1}` in `group`.
pub fn evaluate(w: &Word, group: &FiniteGroup, tuple: &[usize]) -> Result<usize, WordError> {
    if tuple.len() != w.arity() {
        return Err(WordError::ArityMismatch {
            expected: w.arity(),
            got: tuple.len(),
        });
    }
    if let Some(&entry) = tuple.iter().find(|&&g| g >= group.order()) {
        return Err(WordError::ElementOutOfRange {
            entry,
            order: group.order(),
        });
    }
    Ok(w.syllables().iter().fold(group.identity(), |acc, s| {
        let g = tuple[s.letter.0];
        group.mul(acc, if s.inverted { group.inv(g) } else { g })
    }))
}
