//! Reduced and cyclic words over a ranked alphabet with formal inverses.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// A generator or its formal inverse, stored as a signed 1-based index.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter(i8);

impl Letter {
    pub fn new(signed: i32) -> Letter {
        assert!(signed != 0 && signed.unsigned_abs() <= 64, "letter index out of range: {signed}");
        Letter(signed as i8)
    }

    pub fn gen(index: usize) -> Letter {
        Letter::new(index as i32 + 1)
    }

    /// Zero-based generator index.
    pub fn index(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn signed(self) -> i32 {
        self.0 as i32
    }

    fn key(self) -> u16 {
        2 * self.index() as u16 + u16::from(self.is_inverse())
    }
}

// a < A < b < B < ...
impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", default_name(*self))
    }
}

fn default_name(l: Letter) -> String {
    let base = if l.index() < 26 {
        ((b'a' + l.index() as u8) as char).to_string()
    } else {
        format!("x{}", l.index())
    };
    if l.is_inverse() {
        base.to_uppercase()
    } else {
        base
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// Default names `a, b, c, ...`.
    pub fn new(rank: usize) -> Alphabet {
        assert!(rank >= 1 && rank <= 26, "rank must be in 1..=26");
        Alphabet {
            names: (0..rank).map(|i| ((b'a' + i as u8) as char).to_string()).collect(),
        }
    }

    pub fn with_names(names: Vec<String>) -> Result<Alphabet, CoreError> {
        if names.is_empty() {
            return Err(CoreError::InvalidAlphabet("rank must be at least 1".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || names[..i].contains(n) {
                return Err(CoreError::InvalidAlphabet(format!("bad or repeated name {n:?}")));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn format(&self, w: &Word) -> String {
        if w.is_identity() {
            return "1".into();
        }
        let parts: Vec<String> = w
            .letters()
            .iter()
            .map(|l| {
                let n = &self.names[l.index()];
                if l.is_inverse() {
                    format!("{n}^-1")
                } else {
                    n.clone()
                }
            })
            .collect();
        parts.join("*")
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn gen(index: usize) -> Word {
        Word(vec![Letter::gen(index)])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in raw {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// Builds a word from signed 1-based indices, checking them against `rank`.
    pub fn from_signed(raw: &[i32], rank: usize) -> Result<Word, CoreError> {
        let mut letters = Vec::with_capacity(raw.len());
        for &s in raw {
            if s == 0 || s.unsigned_abs() as usize > rank {
                return Err(CoreError::UnknownLetter(s.to_string()));
            }
            letters.push(Letter::new(s));
        }
        Ok(Word::reduce(letters))
    }

    /// Test helper: panics on bad input.
    pub fn from_ints(raw: &[i32]) -> Word {
        Word::reduce(raw.iter().map(|&s| Letter::new(s)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.iter().map(|l| l.index()).max()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn mul_letter(&self, l: Letter) -> Word {
        let mut out = self.0.clone();
        push_reduced(&mut out, l);
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `h^-1 * self * h`.
    pub fn conjugate_by(&self, h: &Word) -> Word {
        h.inverse().mul(self).mul(h)
    }

    pub fn product<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for w in words {
            for &l in &w.0 {
                push_reduced(&mut out, l);
            }
        }
        Word(out)
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for l in &self.0 {
            v[l.index()] += if l.is_inverse() { -1 } else { 1 };
        }
        v
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Splits `self = conjugator * core * conjugator^-1` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (CyclicWord, Word) {
        let (core, conj) = self.cyclic_core();
        (CyclicWord::from_cyclically_reduced(core), conj)
    }

    /// Like [`Word::cyclic_reduce`] but keeps the core in its original rotation.
    pub fn cyclic_core(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut i = 0;
        while n >= 2 * (i + 1) && self.0[i] == self.0[n - 1 - i].inverse() {
            i += 1;
        }
        (Word(self.0[i..n - i].to_vec()), Word(self.0[..i].to_vec()))
    }

    pub fn cyclic_length(&self) -> usize {
        self.cyclic_core().0.len()
    }

    /// Rotation that moves the first `k` letters to the end. Only meaningful
    /// for cyclically reduced words; the result is `prefix^-1 * self * prefix`.
    pub fn rotate(&self, k: usize) -> Word {
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word::reduce(v)
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }

    pub fn suffix_from(&self, k: usize) -> Word {
        Word(self.0[k..].to_vec())
    }

    /// Shortest `r` with `self = r^k`, `|k|` maximal and `k > 0`.
    pub fn root(&self) -> (Word, usize) {
        if self.is_identity() {
            return (Word::identity(), 0);
        }
        let (core, conj) = self.cyclic_core();
        let n = core.len();
        for d in 1..=n {
            if n % d == 0 && (0..n).all(|i| core.0[i] == core.0[i % d]) {
                let r = core.prefix(d).conjugate_by(&conj.inverse());
                return (r, n / d);
            }
        }
        unreachable!()
    }

    /// Contains any letter of generator `index`.
    pub fn uses(&self, index: usize) -> bool {
        self.0.iter().any(|l| l.index() == index)
    }

    /// Count of occurrences (either orientation) of each generator.
    pub fn occurrences(&self, rank: usize) -> Vec<u64> {
        let mut v = vec![0u64; rank];
        for l in &self.0 {
            v[l.index()] += 1;
        }
        v
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex order.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", default_name(*l))?;
        }
        Ok(())
    }
}

/// A conjugacy class, stored as the lexicographically least rotation of a
/// cyclically reduced representative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CyclicWord(Word);

impl CyclicWord {
    pub fn new(w: &Word) -> CyclicWord {
        w.cyclic_reduce().0
    }

    fn from_cyclically_reduced(core: Word) -> CyclicWord {
        let k = least_rotation(core.letters());
        CyclicWord(core.rotate(k))
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::new(&self.0.inverse())
    }

    /// Index of the rotation that equals the canonical form, if `core` is a rotation.
    pub fn rotation_of(&self, core: &Word) -> Option<usize> {
        if core.len() != self.0.len() {
            return None;
        }
        (0..core.len().max(1)).find(|&k| core.len() == 0 || core.rotate(k) == self.0)
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0)
    }
}

// Booth's least-rotation algorithm.
fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| s[i % n];
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = f[j - k - 1];
        while i != -1 && sj != at(k + i as usize + 1) {
            if sj < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if i == -1 && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    k % n
}

/// Returns `h` with `h^-1 x h = y`, or `None` when `x` and `y` are not conjugate.
pub fn conjugate_in_free(x: &Word, y: &Word) -> Option<Word> {
    let (cx, px) = x.cyclic_core();
    let (cy, py) = y.cyclic_core();
    if cx.len() != cy.len() {
        return None;
    }
    if cx.is_identity() {
        return Some(Word::identity());
    }
    let r = (0..cx.len()).find(|&k| cx.rotate(k) == cy)?;
    let h = px.mul(&cx.prefix(r)).mul(&py.inverse());
    debug_assert_eq!(x.conjugate_by(&h), *y);
    Some(h)
}

/// Finds a single `h` with `h^-1 x_i h = y_i` for every pair.
pub fn simultaneous_conjugator(pairs: &[(Word, Word)]) -> Option<Word> {
    if pairs.iter().any(|(x, y)| x.is_identity() != y.is_identity()) {
        return None;
    }
    let check = |h: &Word| pairs.iter().all(|(x, y)| x.conjugate_by(h) == *y);
    let Some((x0, y0)) = pairs.iter().find(|(x, _)| !x.is_identity()) else {
        return Some(Word::identity());
    };
    let h0 = conjugate_in_free(x0, y0)?;
    if check(&h0) {
        return Some(h0);
    }
    // Every solution for the first pair is r^k h0 with r the root of x0.
    // Conjugating a word not commuting with r by r^k grows its length
    // linearly in |k|, which bounds the search.
    let (r, _) = x0.root();
    let r_len = r.cyclic_length().max(1);
    let longest = pairs.iter().map(|(x, y)| x.len() + y.len()).max().unwrap_or(0);
    let bound = (longest + 2 * h0.len() + 2 * r.len()) / r_len + 2;
    for k in 1..=bound as i64 {
        for kk in [k, -k] {
            let h = r.pow(kk).mul(&h0);
            if check(&h) {
                return Some(h);
            }
        }
    }
    None
}
