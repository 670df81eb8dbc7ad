//! Uniform sampling of freely reduced and cyclically reduced words.
//!
//! A length-`n` sample starts with one of the `2k` letters uniformly and
//! extends with one of the `2k−1` non-cancelling letters at each step, so
//! every reduced word of length `n` is equally likely. Cyclically reduced
//! samples come from rejecting draws whose last letter inverts the first.

use crate::rng::Rng;
use crate::word::{CyclicWord, Letter, Word, free_reduce, MAX_RANK};

/// Uniform over freely reduced words of length `n`.
pub fn sample_reduced(k: usize, n: usize, rng: &mut Rng) -> Word {
    assert!((1..=MAX_RANK).contains(&k));
    let mut letters: Vec<Letter> = Vec::with_capacity(n);
    for _ in 0..n {
        let x = match letters.last() {
            None => Letter::from_code(rng.below(2 * k as u64) as u8),
            Some(prev) => sample_noncancelling(k, prev.inverse(), rng),
        };
        letters.push(x);
    }
    free_reduce(letters)
}

fn sample_noncancelling(k: usize, forbidden: Letter, rng: &mut Rng) -> Letter {
    let r = rng.below(2 * k as u64 - 1) as u8;
    let code = if r >= forbidden.code() { r + 1 } else { r };
    Letter::from_code(code)
}

/// Uniform over cyclically reduced words of length `n ≥ 1`.
pub fn sample_cyclically_reduced(k: usize, n: usize, rng: &mut Rng) -> CyclicWord {
    assert!(n >= 1);
    loop {
        if let Some(w) = try_cyclically_reduced(k, n, rng) {
            return w;
        }
    }
}

/// One rejection-sampling attempt; `None` when the wraparound pair cancels.
fn try_cyclically_reduced(k: usize, n: usize, rng: &mut Rng) -> Option<CyclicWord> {
    let w = sample_reduced(k, n, rng);
    let (first, last) = (w.first().unwrap(), w.last().unwrap());
    if n > 1 && last == first.inverse() {
        return None;
    }
    Some(CyclicWord::new(w.letters().to_vec()).expect("sample is cyclically reduced"))
}
