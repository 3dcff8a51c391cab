//! Words in the free group on the polycyclic generating sequence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A single signed generator `g_i^{±1}`, stored as the signed 1-based index
/// (`-3` is `g_3^{-1}`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Letter(i32);

impl Letter {
    /// # Panics
    /// If `index` is zero.
    pub fn new(index: usize, positive: bool) -> Self {
        assert!(index > 0, "generator indices are 1-based");
        let i = index as i32;
        Letter(if positive { i } else { -i })
    }

    pub fn from_signed(value: i32) -> Option<Self> {
        (value != 0).then_some(Letter(value))
    }

    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn sign(self) -> i64 {
        self.0.signum() as i64
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }
}

impl TryFrom<i32> for Letter {
    type Error = String;

    fn try_from(value: i32) -> Result<Self, Self::Error> {
        Letter::from_signed(value).ok_or_else(|| "generator index 0 is not a letter".to_string())
    }
}

impl From<Letter> for i32 {
    fn from(l: Letter) -> i32 {
        l.0
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A word over the generating sequence. Words built through the public
/// constructors are freely reduced.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduced(letters: impl IntoIterator<Item = Letter>) -> Self {
        free_reduce(letters)
    }

    /// Wraps letters without reducing them. The caller guarantees reduction.
    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(is_freely_reduced(&letters));
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        invert_word(self)
    }

    pub fn is_reduced(&self) -> bool {
        is_freely_reduced(&self.0)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Space-separated signed generator indices, e.g. `"2 -1 3"`; the empty word
/// is the empty string.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", l.0)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .split_whitespace()
            .map(|t| {
                t.parse::<i32>()
                    .map_err(|e| format!("bad letter {t:?}: {e}"))
                    .and_then(Letter::try_from)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(free_reduce(letters))
    }
}

pub fn is_freely_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0] != w[1].inverse())
}

/// Cancels adjacent inverse pairs until none remain.
pub fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Word {
    let mut stack: Vec<Letter> = Vec::new();
    for l in letters {
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    Word(stack)
}

pub fn invert_word(w: &Word) -> Word {
    Word(w.0.iter().rev().map(|l| l.inverse()).collect())
}

pub fn concat_words(a: &Word, b: &Word) -> Word {
    free_reduce(a.0.iter().chain(b.0.iter()).copied())
}

/// `g^{-1} · w · g`, reduced.
pub fn conjugate_word(w: &Word, g: Letter) -> Word {
    free_reduce(
        std::iter::once(g.inverse())
            .chain(w.0.iter().copied())
            .chain(std::iter::once(g)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(xs: &[i32]) -> Vec<Letter> {
        xs.iter()
            .map(|&x| Letter::from_signed(x).unwrap())
            .collect()
    }

    #[test]
    fn reduce_examples() {
        assert!(free_reduce(w(&[1, -1])).is_empty());
        assert_eq!(free_reduce(w(&[2, 1, -1, 2])).letters(), &w(&[2, 2])[..]);
        assert_eq!(free_reduce(w(&[1, 2, -2, -1, 3])).letters(), &w(&[3])[..]);
    }

    #[test]
    fn invert_and_concat() {
        let a = Word::reduced(w(&[1, -2]));
        assert_eq!(invert_word(&a).letters(), &w(&[2, -1])[..]);
        assert_eq!(concat_words(&a, &Word::empty()), a);
        assert!(concat_words(&a, &a.inverse()).is_empty());
    }

    #[test]
    fn conjugate_cancels_at_ends() {
        let a = Word::reduced(w(&[3, 2]));
        let c = conjugate_word(&a, Letter::from_signed(-3).unwrap());
        assert_eq!(c.letters(), &w(&[3, 3, 2, -3])[..]);
        let c = conjugate_word(&a, Letter::from_signed(2).unwrap());
        assert_eq!(c.letters(), &w(&[-2, 3, 2, 2])[..]);
    }

    #[test]
    fn display_parse() {
        let a = Word::reduced(w(&[2, -1, 3]));
        assert_eq!(a.to_string(), "2 -1 3");
        assert_eq!("2 -1 3".parse::<Word>().unwrap(), a);
        assert_eq!("".parse::<Word>().unwrap(), Word::empty());
        assert!("2 0".parse::<Word>().is_err());
    }

    fn letters() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(
            (1i32..=4, any::<bool>()).prop_map(|(i, s)| Letter(if s { i } else { -i })),
            0..40,
        )
    }

    /// Reduces by repeatedly cancelling the pair at a pseudo-random position.
    fn reduce_in_order(mut xs: Vec<Letter>, mut pick: u64) -> Vec<Letter> {
        loop {
            let pairs: Vec<usize> = (0..xs.len().saturating_sub(1))
                .filter(|&i| xs[i] == xs[i + 1].inverse())
                .collect();
            if pairs.is_empty() {
                return xs;
            }
            pick = pick
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let i = pairs[(pick >> 33) as usize % pairs.len()];
            xs.drain(i..i + 2);
        }
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(xs in letters()) {
            let once = free_reduce(xs);
            prop_assert!(once.is_reduced());
            prop_assert_eq!(free_reduce(once.0.clone()), once);
        }

        #[test]
        fn reduce_is_confluent(xs in letters(), s1 in any::<u64>(), s2 in any::<u64>()) {
            let a = reduce_in_order(xs.clone(), s1);
            let b = reduce_in_order(xs.clone(), s2);
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a, free_reduce(xs).0);
        }

        #[test]
        fn word_times_inverse_is_empty(xs in letters()) {
            let a = free_reduce(xs);
            prop_assert!(concat_words(&a, &invert_word(&a)).is_empty());
        }
    }
}
