//! Whitehead automorphisms of both kinds and general automorphisms given by
//! basis images.
//!
//! A first-kind (relabeling) automorphism permutes the alphabet compatibly
//! with inversion. A second-kind automorphism is determined by its
//! characteristic pair `(T, a)`: the multiplier `a` lies in `T`, `a⁻¹` does
//! not, and every letter `x` outside the multiplier pair maps to one of
//! `x`, `xa`, `a⁻¹x`, `a⁻¹xa` according to which of `x`, `x⁻¹` lie in `T`.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::word::{free_reduce, push_reduced, CyclicWord, Letter, LetterSet, Word, MAX_RANK};

/// Alphabet permutation commuting with inversion, stored as the images of the
/// positive generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relabeling {
    images: Vec<Letter>,
}

impl Relabeling {
    pub fn identity(k: usize) -> Relabeling {
        Relabeling {
            images: (0..k).map(|g| Letter::new(g, false)).collect(),
        }
    }

    /// `images[g]` is the image of the g-th generator; inverses follow by
    /// `t(x⁻¹) = t(x)⁻¹`. The generator classes of the images must form a
    /// permutation.
    pub fn new(images: Vec<Letter>) -> Result<Relabeling> {
        let k = images.len();
        if k == 0 || k > MAX_RANK {
            return Err(Error::InvalidRelabeling("rank out of range".into()));
        }
        let mut seen = vec![false; k];
        for x in &images {
            if x.generator() >= k {
                return Err(Error::InvalidRelabeling(format!(
                    "image letter {x} outside rank {k}"
                )));
            }
            if seen[x.generator()] {
                return Err(Error::InvalidRelabeling(format!(
                    "generator class of {x} hit twice"
                )));
            }
            seen[x.generator()] = true;
        }
        Ok(Relabeling { images })
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn apply_letter(&self, x: Letter) -> Letter {
        let image = self.images[x.generator()];
        if x.is_inverted() {
            image.inverse()
        } else {
            image
        }
    }

    /// All `k!·2^k` relabelings, permutation-major in lexicographic order,
    /// sign mask ascending within each permutation.
    pub fn enumerate(k: usize) -> Vec<Relabeling> {
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut current: Vec<usize> = Vec::new();
        let mut used = vec![false; k];
        fn gen_perms(k: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
            if current.len() == k {
                out.push(current.clone());
                return;
            }
            for g in 0..k {
                if !used[g] {
                    used[g] = true;
                    current.push(g);
                    gen_perms(k, current, used, out);
                    current.pop();
                    used[g] = false;
                }
            }
        }
        gen_perms(k, &mut current, &mut used, &mut perms);

        let mut out = Vec::with_capacity(perms.len() << k);
        for perm in &perms {
            for mask in 0u32..(1 << k) {
                let images = (0..k)
                    .map(|g| Letter::new(perm[g], mask >> g & 1 == 1))
                    .collect();
                out.push(Relabeling { images });
            }
        }
        out
    }

    pub fn to_automorphism(&self) -> Automorphism {
        let images: Vec<Word> = self.images.iter().map(|&x| Word::single(x)).collect();
        let mut inverse = vec![Word::empty(); self.rank()];
        for (g, &x) in self.images.iter().enumerate() {
            let preimage = Letter::new(g, x.is_inverted());
            inverse[x.generator()] = Word::single(preimage);
        }
        Automorphism {
            k: self.rank(),
            images,
            inverse_images: Some(inverse),
        }
    }
}

impl fmt::Display for Relabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "perm(")?;
        for (g, x) in self.images.iter().enumerate() {
            if g > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}", Letter::new(g, false), x)?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Relabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Characteristic pair `(T, a)` of a second-kind Whitehead automorphism.
#[derive(Copy, Clone, PartialEq, Eq, Hash)]
pub struct CharPair {
    k: usize,
    t: LetterSet,
    multiplier: Letter,
}

impl CharPair {
    pub fn new(k: usize, t: LetterSet, multiplier: Letter) -> Result<CharPair> {
        if k < 2 {
            return Err(Error::RankTooSmall);
        }
        if k > MAX_RANK {
            return Err(Error::RankTooLarge);
        }
        if !t.contains(multiplier) {
            return Err(Error::InvalidCharPair(format!(
                "multiplier {multiplier} not in T = {t}"
            )));
        }
        if t.contains(multiplier.inverse()) {
            return Err(Error::InvalidCharPair(format!(
                "inverse of multiplier {multiplier} lies in T = {t}"
            )));
        }
        if t.iter().any(|x| x.generator() >= k) {
            return Err(Error::InvalidCharPair(format!("T = {t} exceeds rank {k}")));
        }
        Ok(CharPair { k, t, multiplier })
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> LetterSet {
        self.t
    }

    pub fn multiplier(&self) -> Letter {
        self.multiplier
    }

    /// Image of a single letter under the second-kind rules. The multiplier
    /// and its inverse are fixed.
    pub fn letter_image(&self, x: Letter) -> Vec<Letter> {
        let a = self.multiplier;
        if x.generator() == a.generator() {
            return vec![x];
        }
        match (self.t.contains(x), self.t.contains(x.inverse())) {
            (true, false) => vec![x, a],
            (false, true) => vec![a.inverse(), x],
            (true, true) => vec![a.inverse(), x, a],
            (false, false) => vec![x],
        }
    }

    /// True exactly for the identity (`T = {a}`) and the conjugation by the
    /// multiplier (`T = Σ∖{a⁻¹}`).
    pub fn is_inner(&self) -> bool {
        self.t == LetterSet::singleton(self.multiplier)
            || self.t == LetterSet::singleton(self.multiplier.inverse()).complement(self.k)
    }

    /// Characteristic pair of the inverse automorphism:
    /// `((T∖{a})∪{a⁻¹}, a⁻¹)`. Verified by composition wherever it is used.
    pub fn inverse_pair(&self) -> CharPair {
        let mut t = self.t;
        t.remove(self.multiplier);
        t.insert(self.multiplier.inverse());
        CharPair {
            k: self.k,
            t,
            multiplier: self.multiplier.inverse(),
        }
    }

    /// All `2k·2^{2k−2}` pairs: multipliers in letter-code order, then the
    /// subsets of `Σ∖{a,a⁻¹}` by ascending bitmask over the remaining letters
    /// in code order.
    pub fn enumerate(k: usize) -> Result<Vec<CharPair>> {
        if k < 2 {
            return Err(Error::RankTooSmall);
        }
        if k > MAX_RANK {
            return Err(Error::RankTooLarge);
        }
        let mut out = Vec::with_capacity((2 * k) << (2 * k - 2));
        for a in Letter::alphabet(k) {
            let rest: Vec<Letter> = Letter::alphabet(k)
                .filter(|x| x.generator() != a.generator())
                .collect();
            for mask in 0u64..(1 << rest.len()) {
                let mut t = LetterSet::singleton(a);
                for (i, &x) in rest.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        t.insert(x);
                    }
                }
                out.push(CharPair { k, t, multiplier: a });
            }
        }
        Ok(out)
    }

    pub fn to_automorphism(&self) -> Automorphism {
        Automorphism::from_char_pair(self)
    }
}

impl fmt::Display for CharPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wh2(T={}; m={})", self.t, self.multiplier)
    }
}

impl fmt::Debug for CharPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for CharPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CharPair", 2)?;
        let t: Vec<String> = self.t.iter().map(|x| x.to_string()).collect();
        s.serialize_field("t", &t)?;
        s.serialize_field("multiplier", &self.multiplier.to_string())?;
        s.end()
    }
}

/// An automorphism (or, if the caller supplies unverified images, an
/// endomorphism) given by the images of the generators.
///
/// Validity is certified either by construction (Whitehead pairs,
/// relabelings, compositions of those) or by a user-supplied inverse that is
/// checked at construction. Deciding whether an arbitrary basis-image map is
/// an automorphism is itself a Whitehead-algorithm-sized problem and is not
/// attempted.
#[derive(Clone, PartialEq, Eq)]
pub struct Automorphism {
    k: usize,
    images: Vec<Word>,
    inverse_images: Option<Vec<Word>>,
}

impl Automorphism {
    pub fn identity(k: usize) -> Automorphism {
        let images: Vec<Word> = (0..k).map(|g| Word::single(Letter::new(g, false))).collect();
        Automorphism {
            k,
            images: images.clone(),
            inverse_images: Some(images),
        }
    }

    /// Unverified basis images; no inverse data is attached.
    pub fn from_images(images: Vec<Word>) -> Result<Automorphism> {
        let k = images.len();
        if k == 0 || k > MAX_RANK {
            return Err(Error::RankTooLarge);
        }
        for w in &images {
            if w.is_empty() {
                return Err(Error::ParseAutomorphism("generator image must be nonempty".into()));
            }
            if let Some(g) = w.max_generator() {
                if g >= k {
                    return Err(Error::RankMismatch { expected: k, found: g + 1 });
                }
            }
        }
        Ok(Automorphism {
            k,
            images,
            inverse_images: None,
        })
    }

    /// Basis images together with an inverse; both compositions are verified
    /// to fix every generator.
    pub fn with_inverse(images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Automorphism> {
        let forward = Automorphism::from_images(images)?;
        let backward = Automorphism::from_images(inverse_images)?;
        if forward.k != backward.k {
            return Err(Error::RankMismatch {
                expected: forward.k,
                found: backward.k,
            });
        }
        if !composes_to_identity(&forward, &backward) || !composes_to_identity(&backward, &forward)
        {
            return Err(Error::BadInverse);
        }
        Ok(Automorphism {
            inverse_images: Some(backward.images),
            ..forward
        })
    }

    /// Second-kind Whitehead automorphism from its characteristic pair. The
    /// inverse is found by solving on generators (each preimage is one of
    /// `x`, `xa⁻¹`, `ax`, `axa⁻¹`) and verified by composition.
    pub fn from_char_pair(pair: &CharPair) -> Automorphism {
        let k = pair.rank();
        let images: Vec<Word> = (0..k)
            .map(|g| free_reduce(pair.letter_image(Letter::new(g, false))))
            .collect();
        let forward = Automorphism {
            k,
            images,
            inverse_images: None,
        };
        let a = pair.multiplier();
        let inverse_images: Vec<Word> = (0..k)
            .map(|g| {
                let x = Letter::new(g, false);
                let candidates = [
                    vec![x],
                    vec![x, a.inverse()],
                    vec![a, x],
                    vec![a, x, a.inverse()],
                ];
                candidates
                    .into_iter()
                    .map(free_reduce)
                    .find(|y| forward.apply(y).expect("rank checked") == Word::single(x))
                    .expect("second-kind Whitehead automorphism has a preimage of this shape")
            })
            .collect();
        let backward = Automorphism {
            k,
            images: inverse_images,
            inverse_images: None,
        };
        assert!(
            composes_to_identity(&forward, &backward) && composes_to_identity(&backward, &forward),
            "solved inverse fails composition check for {pair}"
        );
        Automorphism {
            inverse_images: Some(backward.images),
            ..forward
        }
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse_images.is_some()
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(g, w)| *w == Word::single(Letter::new(g, false)))
    }

    /// Length of the longest generator image.
    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Applies to a reduced word; the result is freely reduced.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        if let Some(g) = w.max_generator() {
            if g >= self.k {
                return Err(Error::RankMismatch { expected: self.k, found: g + 1 });
            }
        }
        let mut buf: Vec<Letter> = Vec::with_capacity(w.len() * self.max_image_len().max(1));
        for &x in w.letters() {
            let image = &self.images[x.generator()];
            if x.is_inverted() {
                for y in image.letters().iter().rev() {
                    push_reduced(&mut buf, y.inverse());
                }
            } else {
                for &y in image.letters() {
                    push_reduced(&mut buf, y);
                }
            }
        }
        Ok(free_reduce(buf))
    }

    /// Image of a conjugacy class: apply to any linear representative, then
    /// cyclically reduce. Well-defined on the class.
    pub fn apply_cyclic(&self, w: &CyclicWord) -> Result<CyclicWord> {
        let image = self.apply(&w.linearize())?;
        let (core, _) = image.cyclic_reduce()?;
        Ok(core)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        if self.k != other.k {
            return Err(Error::RankMismatch { expected: self.k, found: other.k });
        }
        let images: Vec<Word> = other
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<_>>()?;
        let inverse_images = match (&self.inverse_images, &other.inverse_images) {
            (Some(self_inv), Some(other_inv)) => {
                // (φψ)⁻¹ = ψ⁻¹φ⁻¹
                let other_inv_auto = Automorphism {
                    k: self.k,
                    images: other_inv.clone(),
                    inverse_images: None,
                };
                Some(
                    self_inv
                        .iter()
                        .map(|w| other_inv_auto.apply(w))
                        .collect::<Result<_>>()?,
                )
            }
            _ => None,
        };
        Ok(Automorphism {
            k: self.k,
            images,
            inverse_images,
        })
    }

    pub fn invert(&self) -> Result<Automorphism> {
        let inverse = self.inverse_images.clone().ok_or(Error::MissingInverse)?;
        Ok(Automorphism {
            k: self.k,
            images: inverse,
            inverse_images: Some(self.images.clone()),
        })
    }

    /// True when the automorphism is a composition of an inner automorphism
    /// and a relabeling. Decided by cyclic length preservation on the
    /// level-2 Euler word: that word is strictly minimal, so any
    /// automorphism fixing its cyclic length is simple, and simple
    /// automorphisms preserve every cyclic length.
    pub fn is_simple(&self) -> Result<bool> {
        let test_word = crate::currents::euler_word(self.k, 2)?.word;
        Ok(self.apply_cyclic(&test_word)?.len() == test_word.len())
    }

    /// Parses one of three literal forms:
    /// basis images `"a->ab, b->b"` (unlisted generators stay fixed),
    /// `"wh2(T={a,B}; m=B)"`, or `"perm(a->b, b->a)"`.
    pub fn parse(s: &str, k: usize) -> Result<Automorphism> {
        let s = s.trim();
        if let Some(body) = strip_call(s, "wh2") {
            let pair = parse_char_pair(body, k)?;
            return Ok(Automorphism::from_char_pair(&pair));
        }
        if let Some(body) = strip_call(s, "perm") {
            let entries = parse_arrows(body, k)?;
            let mut images: Vec<Letter> = (0..k).map(|g| Letter::new(g, false)).collect();
            for (g, image) in entries {
                if image.len() != 1 {
                    return Err(Error::ParseAutomorphism(format!(
                        "perm image of {} must be a single letter",
                        Letter::new(g, false)
                    )));
                }
                images[g] = image.letters()[0];
            }
            let relabeling =
                Relabeling::new(images).map_err(|e| Error::ParseAutomorphism(e.to_string()))?;
            return Ok(relabeling.to_automorphism());
        }
        let entries = parse_arrows(s, k)?;
        let mut images: Vec<Word> = (0..k).map(|g| Word::single(Letter::new(g, false))).collect();
        for (g, image) in entries {
            images[g] = image;
        }
        Automorphism::from_images(images)
    }
}

fn composes_to_identity(first: &Automorphism, second: &Automorphism) -> bool {
    // checks first(second(g)) = g on every generator
    (0..first.k).all(|g| {
        second
            .images
            .get(g)
            .and_then(|w| first.apply(w).ok())
            .is_some_and(|image| image == Word::single(Letter::new(g, false)))
    })
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, w) in self.images.iter().enumerate() {
            if g > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}", Letter::new(g, false), w)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "auto({self})")
    }
}

impl Serialize for Automorphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.k))?;
        for (g, w) in self.images.iter().enumerate() {
            map.serialize_entry(&Letter::new(g, false).to_string(), &w.to_string())?;
        }
        map.end()
    }
}

fn strip_call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)
        .map(str::trim_start)
        .and_then(|rest| rest.strip_prefix('('))
        .and_then(|rest| rest.trim_end().strip_suffix(')'))
}

/// Parses `"a->ab, b->b"` into `(generator, image)` entries.
fn parse_arrows(s: &str, k: usize) -> Result<Vec<(usize, Word)>> {
    let mut out = Vec::new();
    let mut seen = vec![false; k];
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (lhs, rhs) = part
            .split_once("->")
            .ok_or_else(|| Error::ParseAutomorphism(format!("missing '->' in {part:?}")))?;
        let lhs = lhs.trim();
        let letter = if lhs.len() == 1 {
            Letter::from_char(lhs.chars().next().unwrap(), k)
                .map_err(|e| Error::ParseAutomorphism(e.to_string()))?
        } else {
            return Err(Error::ParseAutomorphism(format!(
                "left side of {part:?} must be a single generator"
            )));
        };
        if letter.is_inverted() {
            return Err(Error::ParseAutomorphism(format!(
                "left side of {part:?} must be a positive generator"
            )));
        }
        let image =
            Word::parse(rhs.trim(), k).map_err(|e| Error::ParseAutomorphism(e.to_string()))?;
        if image.is_empty() {
            return Err(Error::ParseAutomorphism(format!(
                "image of {lhs} must be nonempty"
            )));
        }
        if seen[letter.generator()] {
            return Err(Error::ParseAutomorphism(format!("{lhs} listed twice")));
        }
        seen[letter.generator()] = true;
        out.push((letter.generator(), image));
    }
    if out.is_empty() {
        return Err(Error::ParseAutomorphism("no entries".into()));
    }
    Ok(out)
}

/// Parses the body of `wh2(T={a,B}; m=B)`.
fn parse_char_pair(body: &str, k: usize) -> Result<CharPair> {
    let mut t: Option<LetterSet> = None;
    let mut multiplier: Option<Letter> = None;
    for part in body.split(';') {
        let part = part.trim();
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::ParseAutomorphism(format!("expected key=value in {part:?}")))?;
        match key.trim() {
            "T" => {
                let inner = value
                    .trim()
                    .strip_prefix('{')
                    .and_then(|v| v.strip_suffix('}'))
                    .ok_or_else(|| {
                        Error::ParseAutomorphism(format!("T must be {{…}}, got {value:?}"))
                    })?;
                let mut set = LetterSet::empty();
                for item in inner.split(',') {
                    let item = item.trim();
                    if item.is_empty() {
                        continue;
                    }
                    if item.len() != 1 {
                        return Err(Error::ParseAutomorphism(format!(
                            "T members must be single letters, got {item:?}"
                        )));
                    }
                    set.insert(
                        Letter::from_char(item.chars().next().unwrap(), k)
                            .map_err(|e| Error::ParseAutomorphism(e.to_string()))?,
                    );
                }
                t = Some(set);
            }
            "m" => {
                let value = value.trim();
                if value.len() != 1 {
                    return Err(Error::ParseAutomorphism(format!(
                        "multiplier must be a single letter, got {value:?}"
                    )));
                }
                multiplier = Some(
                    Letter::from_char(value.chars().next().unwrap(), k)
                        .map_err(|e| Error::ParseAutomorphism(e.to_string()))?,
                );
            }
            other => {
                return Err(Error::ParseAutomorphism(format!("unknown key {other:?}")));
            }
        }
    }
    let t = t.ok_or_else(|| Error::ParseAutomorphism("missing T".into()))?;
    let multiplier = multiplier.ok_or_else(|| Error::ParseAutomorphism("missing m".into()))?;
    CharPair::new(k, t, multiplier).map_err(|e| Error::ParseAutomorphism(e.to_string()))
}
