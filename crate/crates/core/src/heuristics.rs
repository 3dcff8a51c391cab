//! The seven simple word heuristics and chains of them.
//!
//! | id | effect                                                        |
//! |----|---------------------------------------------------------------|
//! | H1 | insert a subgroup generator `a_i^{±1}` at a random position   |
//! | H2 | insert a single generator letter                              |
//! | H3 | delete a single letter                                        |
//! | H4 | substitute a single letter                                    |
//! | H5 | conjugate the letter at a position: `x ↦ f^{-1} x f`          |
//! | H6 | conjugate a subword: `s ↦ f^{-1} s f`                         |
//! | H7 | swap the letters at two random positions                      |
//!
//! Every result is freely reduced. Random draws happen in a fixed order:
//! positions first, then the generator (or subgroup generator) index, then
//! the sign. Heuristics that need letters to act on return the input
//! unchanged, without drawing, when it is too short.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::aag::AagInstance;
use crate::error::{Error, Result};
use crate::pcgroup::{free_reduce, GroupSpec, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HeuristicId {
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    H7,
}

impl HeuristicId {
    pub const ALL: [HeuristicId; 7] = [
        HeuristicId::H1,
        HeuristicId::H2,
        HeuristicId::H3,
        HeuristicId::H4,
        HeuristicId::H5,
        HeuristicId::H6,
        HeuristicId::H7,
    ];

    /// 1-based number.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_number(n: usize) -> Option<Self> {
        Self::ALL.get(n.checked_sub(1)?).copied()
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::ALL[rng.gen_range(0..Self::ALL.len())]
    }
}

impl fmt::Display for HeuristicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H{}", self.number())
    }
}

impl FromStr for HeuristicId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix(['H', 'h'])
            .and_then(|n| n.parse().ok())
            .and_then(HeuristicId::from_number)
            .ok_or_else(|| Error::InvalidChain(s.to_string()))
    }
}

/// A non-empty sequence of heuristics applied left to right.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeuristicChain(Vec<HeuristicId>);

impl HeuristicChain {
    pub fn new(ids: Vec<HeuristicId>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::InvalidChain(String::new()));
        }
        Ok(HeuristicChain(ids))
    }

    pub fn single(id: HeuristicId) -> Self {
        HeuristicChain(vec![id])
    }

    pub fn ids(&self) -> &[HeuristicId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `H3^k`: a chain made only of deletions.
    pub fn is_pure_deletion(&self) -> bool {
        self.0.iter().all(|&h| h == HeuristicId::H3)
    }

    /// Run-length form, e.g. `H5^2H3`.
    pub fn to_compact_string(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.0.len() {
            let h = self.0[i];
            let run = self.0[i..].iter().take_while(|&&x| x == h).count();
            out.push_str(&h.to_string());
            if run > 1 {
                out.push_str(&format!("^{run}"));
            }
            i += run;
        }
        out
    }
}

/// Expanded form, e.g. `H2H1H4`.
impl fmt::Display for HeuristicChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.0 {
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// Accepts `H2H1H4`, run-length `H3^2`, and optional separators.
impl FromStr for HeuristicChain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidChain(s.to_string());
        let chars: Vec<char> = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',' && *c != '-')
            .collect();
        let mut ids = Vec::new();
        let mut i = 0;
        let read_num = |i: &mut usize| -> Option<usize> {
            let start = *i;
            while *i < chars.len() && chars[*i].is_ascii_digit() {
                *i += 1;
            }
            chars[start..*i].iter().collect::<String>().parse().ok()
        };
        while i < chars.len() {
            if chars[i] != 'H' && chars[i] != 'h' {
                return Err(bad());
            }
            i += 1;
            let id = read_num(&mut i)
                .and_then(HeuristicId::from_number)
                .ok_or_else(bad)?;
            let mut reps = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                reps = read_num(&mut i).filter(|&r| r >= 1).ok_or_else(bad)?;
            }
            ids.extend(std::iter::repeat_n(id, reps));
        }
        HeuristicChain::new(ids).map_err(|_| bad())
    }
}

impl Serialize for HeuristicChain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HeuristicChain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn random_signed_letter<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> Letter {
    spec.random_letter(rng)
}

/// Uniform pair `0 ≤ s ≤ t < len` over all `len(len+1)/2` pairs.
fn random_subword<R: Rng + ?Sized>(len: usize, rng: &mut R) -> (usize, usize) {
    let mut k = rng.gen_range(0..len * (len + 1) / 2);
    for s in 0..len {
        let span = len - s;
        if k < span {
            return (s, s + k);
        }
        k -= span;
    }
    unreachable!("pair index in range")
}

fn conjugate_range(letters: &[Letter], s: usize, t: usize, f: Letter) -> Word {
    free_reduce(
        letters[..s]
            .iter()
            .copied()
            .chain(std::iter::once(f.inverse()))
            .chain(letters[s..=t].iter().copied())
            .chain(std::iter::once(f))
            .chain(letters[t + 1..].iter().copied()),
    )
}

/// Applies one heuristic to `w`.
pub fn apply_heuristic<R: Rng + ?Sized>(
    id: HeuristicId,
    spec: &GroupSpec,
    inst: &AagInstance,
    w: &Word,
    rng: &mut R,
) -> Word {
    let letters = w.letters();
    let len = letters.len();
    match id {
        HeuristicId::H1 => {
            let pos = rng.gen_range(0..=len);
            let mu = rng.gen_range(0..inst.a_gens.len());
            let positive = rng.gen_bool(0.5);
            let a = if positive {
                inst.a_gens[mu].clone()
            } else {
                inst.a_gens[mu].inverse()
            };
            free_reduce(
                letters[..pos]
                    .iter()
                    .chain(a.letters())
                    .chain(&letters[pos..])
                    .copied(),
            )
        }
        HeuristicId::H2 => {
            let pos = rng.gen_range(0..=len);
            let f = random_signed_letter(spec, rng);
            free_reduce(
                letters[..pos]
                    .iter()
                    .copied()
                    .chain(std::iter::once(f))
                    .chain(letters[pos..].iter().copied()),
            )
        }
        HeuristicId::H3 => {
            if len == 0 {
                return w.clone();
            }
            let pos = rng.gen_range(0..len);
            free_reduce(letters[..pos].iter().chain(&letters[pos + 1..]).copied())
        }
        HeuristicId::H4 => {
            if len == 0 {
                return w.clone();
            }
            let pos = rng.gen_range(0..len);
            let f = random_signed_letter(spec, rng);
            let mut out = letters.to_vec();
            out[pos] = f;
            free_reduce(out)
        }
        HeuristicId::H5 => {
            if len == 0 {
                return w.clone();
            }
            let pos = rng.gen_range(0..len);
            let f = random_signed_letter(spec, rng);
            conjugate_range(letters, pos, pos, f)
        }
        HeuristicId::H6 => {
            if len == 0 {
                return w.clone();
            }
            let (s, t) = random_subword(len, rng);
            let f = random_signed_letter(spec, rng);
            conjugate_range(letters, s, t, f)
        }
        HeuristicId::H7 => {
            if len < 2 {
                return w.clone();
            }
            let i = rng.gen_range(0..len);
            let j = rng.gen_range(0..len);
            let mut out = letters.to_vec();
            out.swap(i, j);
            free_reduce(out)
        }
    }
}

/// Applies the heuristics of `chain` left to right.
pub fn apply_chain<R: Rng + ?Sized>(
    chain: &HeuristicChain,
    spec: &GroupSpec,
    inst: &AagInstance,
    w: &Word,
    rng: &mut R,
) -> Word {
    chain.ids().iter().fold(w.clone(), |acc, &h| {
        apply_heuristic(h, spec, inst, &acc, rng)
    })
}
