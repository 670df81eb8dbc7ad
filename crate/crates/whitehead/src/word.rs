//! Letters, freely reduced words and cyclic words over a free basis.
//!
//! The alphabet for rank `k` is the `2k` letters `a₁, a₁⁻¹, …, a_k, a_k⁻¹`.
//! ASCII form: the i-th lowercase letter is the i-th generator, the matching
//! uppercase letter its inverse, so `"abAB"` reads `a·b·a⁻¹·b⁻¹`. The empty
//! word prints as `"1"`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported rank; the ASCII encoding runs out of letters past `z`.
pub const MAX_RANK: usize = 26;

/// A signed generator, packed as `2 * generator + inverted`.
///
/// The packed code order is the total order `a < a⁻¹ < b < b⁻¹ < …` used for
/// canonical rotations and everywhere a deterministic letter order is needed.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    /// `generator` is zero-based.
    pub fn new(generator: usize, inverted: bool) -> Letter {
        assert!(generator < MAX_RANK, "generator index {generator} out of range");
        Letter(((generator as u8) << 1) | inverted as u8)
    }

    pub fn from_code(code: u8) -> Letter {
        assert!((code as usize) < 2 * MAX_RANK, "letter code {code} out of range");
        Letter(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    /// Zero-based generator index.
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverted(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn from_char(c: char, k: usize) -> Result<Letter> {
        let (generator, inverted) = match c {
            'a'..='z' => (c as usize - 'a' as usize, false),
            'A'..='Z' => (c as usize - 'A' as usize, true),
            _ => return Err(Error::ParseWord(c.to_string())),
        };
        if generator >= k {
            return Err(Error::LetterOutOfRank(c, k));
        }
        Ok(Letter::new(generator, inverted))
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverted() { b'A' } else { b'a' };
        (base + self.generator() as u8) as char
    }

    /// All `2k` letters in code order.
    pub fn alphabet(k: usize) -> impl Iterator<Item = Letter> {
        assert!((1..=MAX_RANK).contains(&k));
        (0..2 * k as u8).map(Letter)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_char(self.to_char())
    }
}

/// A subset of the alphabet, stored as a bitmask over letter codes.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Default)]
pub struct LetterSet(u64);

impl LetterSet {
    pub fn empty() -> LetterSet {
        LetterSet(0)
    }

    pub fn full(k: usize) -> LetterSet {
        LetterSet((1u64 << (2 * k)) - 1)
    }

    pub fn singleton(x: Letter) -> LetterSet {
        LetterSet(1u64 << x.code())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> LetterSet {
        let mut s = LetterSet::empty();
        for x in letters {
            s.insert(x);
        }
        s
    }

    pub fn insert(&mut self, x: Letter) {
        self.0 |= 1u64 << x.code();
    }

    pub fn remove(&mut self, x: Letter) {
        self.0 &= !(1u64 << x.code());
    }

    pub fn contains(self, x: Letter) -> bool {
        self.0 >> x.code() & 1 == 1
    }

    pub fn complement(self, k: usize) -> LetterSet {
        LetterSet(!self.0 & LetterSet::full(k).0)
    }

    pub fn union(self, other: LetterSet) -> LetterSet {
        LetterSet(self.0 | other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Members in code order.
    pub fn iter(self) -> impl Iterator<Item = Letter> {
        (0..2 * MAX_RANK as u8).map(Letter).filter(move |x| self.contains(*x))
    }
}

impl fmt::Display for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A freely reduced word; the invariant (no adjacent `x x⁻¹`) is maintained
/// by construction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

/// Cancels adjacent inverse pairs until none remain. Idempotent.
pub fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Word {
    let mut buf: Vec<Letter> = Vec::new();
    for x in letters {
        if buf.last() == Some(&x.inverse()) {
            buf.pop();
        } else {
            buf.push(x);
        }
    }
    Word(buf)
}

/// Parses ASCII letters without reducing. `"1"` and `""` denote the empty
/// sequence.
pub fn parse_letters(s: &str, k: usize) -> Result<Vec<Letter>> {
    if s == "1" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.chars().map(|c| Letter::from_char(c, k)).collect()
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn single(x: Letter) -> Word {
        Word(vec![x])
    }

    /// Wraps letters that are already freely reduced.
    pub fn from_reduced(letters: Vec<Letter>) -> Word {
        debug_assert!(
            letters.windows(2).all(|p| p[1] != p[0].inverse()),
            "letters are not reduced"
        );
        Word(letters)
    }

    /// Parses and freely reduces.
    pub fn parse(s: &str, k: usize) -> Result<Word> {
        Ok(free_reduce(parse_letters(s, k)?))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|x| x.inverse()).collect())
    }

    /// Concatenation followed by free reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut buf = self.0.clone();
        for &x in &other.0 {
            push_reduced(&mut buf, x);
        }
        Word(buf)
    }

    /// Largest generator index present, if any (zero-based).
    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|x| x.generator()).max()
    }

    /// Occurrences of `v` as a plain (non-wrapping) subword.
    pub fn count_subwords(&self, v: &Word) -> Result<u64> {
        if v.is_empty() {
            return Err(Error::EmptyWord);
        }
        if v.len() > self.len() {
            return Ok(0);
        }
        Ok(self.0.windows(v.len()).filter(|w| *w == v.letters()).count() as u64)
    }

    /// Splits off the conjugating prefix: `self = conj · core · conj⁻¹`
    /// exactly, with `core` cyclically reduced in canonical rotation (the
    /// conjugator absorbs the rotation offset).
    pub fn cyclic_reduce(&self) -> Result<(CyclicWord, Word)> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let letters = &self.0;
        let mut lo = 0;
        let mut hi = letters.len();
        // A reduced word never strips to nothing: an inverse pair at distance
        // one would contradict reducedness.
        while hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        let start = least_rotation_start(&letters[lo..hi]);
        let mut conjugator = letters[..lo].to_vec();
        conjugator.extend_from_slice(&letters[lo..lo + start]);
        let core = CyclicWord::new(letters[lo..hi].to_vec())?;
        Ok((core, Word(conjugator)))
    }
}

pub(crate) fn push_reduced(buf: &mut Vec<Letter>, x: Letter) {
    if buf.last() == Some(&x.inverse()) {
        buf.pop();
    } else {
        buf.push(x);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for x in &self.0 {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// A nonempty cyclically reduced word up to rotation, stored in its
/// lexicographically least rotation so that equality and hashing see the
/// rotation class.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    /// Validates cyclic reducedness (including the wraparound pair) and
    /// canonicalizes the rotation.
    pub fn new(letters: Vec<Letter>) -> Result<CyclicWord> {
        if letters.is_empty() {
            return Err(Error::EmptyWord);
        }
        let n = letters.len();
        for i in 0..n {
            if letters[(i + 1) % n] == letters[i].inverse() {
                return Err(Error::ParseWord(format!(
                    "not cyclically reduced at position {i}: {}",
                    Word(letters.clone())
                )));
            }
        }
        let start = least_rotation_start(&letters);
        let mut rotated = Vec::with_capacity(n);
        rotated.extend_from_slice(&letters[start..]);
        rotated.extend_from_slice(&letters[..start]);
        Ok(CyclicWord(rotated))
    }

    /// Parses, freely reduces, then cyclically reduces.
    pub fn parse(s: &str, k: usize) -> Result<CyclicWord> {
        let (w, _) = Word::parse(s, k)?.cyclic_reduce()?;
        Ok(w)
    }

    /// Cyclic length `||w||`; a cyclic word is never empty.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|x| x.generator()).max().unwrap()
    }

    /// The canonical rotation as a linear word (any rotation of a cyclically
    /// reduced word is reduced).
    pub fn linearize(&self) -> Word {
        Word(self.0.clone())
    }

    /// Number of positions on the circle from which `v` can be read
    /// clockwise, wrapping around as often as needed (at most 32 wraps).
    pub fn occurrences(&self, v: &Word) -> Result<u64> {
        if v.is_empty() {
            return Err(Error::EmptyWord);
        }
        let n = self.0.len();
        let max = 32 * n;
        if v.len() > max {
            return Err(Error::WrapCapExceeded { got: v.len(), max });
        }
        let mut count = 0u64;
        for start in 0..n {
            if v.0.iter().enumerate().all(|(j, &x)| self.0[(start + j) % n] == x) {
                count += 1;
            }
        }
        Ok(count)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.0 {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cyclic \"{self}\"")
    }
}

impl Serialize for CyclicWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Index of the lexicographically least rotation (Booth's problem, solved
/// with the classic two-pointer scan).
fn least_rotation_start(s: &[Letter]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// All freely reduced words of the given length, lexicographically by letter
/// code. Counts `2k(2k−1)^{len−1}` for `len ≥ 1`, one empty word for `len = 0`.
pub fn enumerate_reduced(k: usize, len: usize) -> Vec<Word> {
    assert!((1..=MAX_RANK).contains(&k));
    let mut out = Vec::new();
    let mut buf: Vec<Letter> = Vec::with_capacity(len);
    fn go(k: usize, len: usize, buf: &mut Vec<Letter>, out: &mut Vec<Word>) {
        if buf.len() == len {
            out.push(Word(buf.clone()));
            return;
        }
        for x in Letter::alphabet(k) {
            if buf.last() == Some(&x.inverse()) {
                continue;
            }
            buf.push(x);
            go(k, len, buf, out);
            buf.pop();
        }
    }
    go(k, len, &mut buf, &mut out);
    out
}
