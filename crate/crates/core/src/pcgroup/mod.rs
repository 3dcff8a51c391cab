//! Exact arithmetic in polycyclic groups `G = O ⋊ U`.
//!
//! `O` is the additive group of the ring of integers of a number field of
//! degree `d`, written in an integral basis as `Z^d`, and `U` is (a subgroup
//! of) its unit group, given by the integer matrices of multiplication by each
//! unit generator. The generating sequence is
//!
//! ```text
//! g_1 .. g_t        torsion units (for the shipped groups: -1 of order 2)
//! g_t+1 .. g_t+r    infinite-order units
//! g_t+r+1 .. g_n    the integral basis of O
//! ```
//!
//! and every element has the collected normal form `(torsion, units, O-part)`.
//! Products follow `(u1, o1)(u2, o2) = (u1 u2, o1·M(u2) + o2)` with row vectors.

pub mod builtin;
pub mod io;
pub mod matrix;
pub mod word;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use matrix::IntMatrix;
pub use word::{concat_words, conjugate_word, free_reduce, invert_word, Letter, Word};

/// Attempts allowed per sampled word before giving up on a length range.
pub const SAMPLER_ATTEMPT_CAP: usize = 10_000;

/// Exponents at or below this magnitude are applied by repeated
/// vector-matrix products instead of forming a matrix power.
const DIRECT_POWER_LIMIT: u64 = 24;

/// A validated polycyclic platform group.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    degree: usize,
    poly_coeffs: Vec<BigInt>,
    torsion_orders: Vec<u32>,
    unit_rank: usize,
    action_matrices: Vec<IntMatrix>,
    inverse_matrices: Vec<IntMatrix>,
    weights: Vec<u64>,
}

/// Collected normal form of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    /// Canonical torsion exponents, entry `j` in `[0, torsion_orders[j])`.
    pub torsion: Vec<u32>,
    /// Exponents of the infinite-order unit generators.
    pub units: Vec<i64>,
    /// Coordinates of the `O` part in the integral basis.
    pub coords: Vec<BigInt>,
}

/// How the length of sampled generator words is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthMeasure {
    /// `ℓ` of the collected normal form; sampled words are returned in
    /// normal-form spelling, so both measures agree on the result.
    #[default]
    Collected,
    /// Number of letters of a random freely reduced word.
    FreeWord,
}

impl GroupSpec {
    /// Validates the group data and computes the commutator weights.
    ///
    /// `poly_coeffs` lists the coefficients of `f` from the constant term up.
    /// `action_matrices` holds the torsion generators first, then the
    /// infinite-order ones.
    pub fn new(
        degree: usize,
        poly_coeffs: Vec<BigInt>,
        torsion_orders: Vec<u32>,
        unit_rank: usize,
        action_matrices: Vec<IntMatrix>,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidGroup("degree must be positive".into()));
        }
        if poly_coeffs.len() != degree + 1 {
            return Err(Error::InvalidGroup(format!(
                "degree {degree} polynomial needs {} coefficients, got {}",
                degree + 1,
                poly_coeffs.len()
            )));
        }
        if poly_coeffs.last() != Some(&BigInt::from(1)) {
            return Err(Error::InvalidGroup("polynomial must be monic".into()));
        }
        if torsion_orders.iter().any(|&o| o < 2) {
            return Err(Error::InvalidGroup(
                "torsion orders must be at least 2".into(),
            ));
        }
        if action_matrices.len() != torsion_orders.len() + unit_rank {
            return Err(Error::InvalidGroup(format!(
                "expected {} action matrices, got {}",
                torsion_orders.len() + unit_rank,
                action_matrices.len()
            )));
        }
        for (i, m) in action_matrices.iter().enumerate() {
            if m.dim() != degree {
                return Err(Error::InvalidGroup(format!(
                    "action matrix {i} is {0}x{0}, expected {degree}x{degree}",
                    m.dim()
                )));
            }
            let det = m.determinant();
            if det.abs() != BigInt::from(1) {
                return Err(Error::NonUnitAction {
                    index: i,
                    det: det.to_string(),
                });
            }
        }
        for i in 0..action_matrices.len() {
            for j in i + 1..action_matrices.len() {
                let (a, b) = (&action_matrices[i], &action_matrices[j]);
                if a.mul(b) != b.mul(a) {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        for (j, &order) in torsion_orders.iter().enumerate() {
            if !action_matrices[j].pow(order as u64).is_identity() {
                return Err(Error::InvalidGroup(format!(
                    "torsion generator {} does not have order dividing {order}",
                    j + 1
                )));
            }
        }
        let inverse_matrices = action_matrices
            .iter()
            .map(|m| m.inverse().expect("unimodular matrices are invertible"))
            .collect();
        let mut spec = GroupSpec {
            degree,
            poly_coeffs,
            torsion_orders,
            unit_rank,
            action_matrices,
            inverse_matrices,
            weights: Vec::new(),
        };
        spec.weights = compute_commutator_weights(&spec);
        Ok(spec)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn poly_coeffs(&self) -> &[BigInt] {
        &self.poly_coeffs
    }

    pub fn torsion_orders(&self) -> &[u32] {
        &self.torsion_orders
    }

    pub fn unit_rank(&self) -> usize {
        self.unit_rank
    }

    pub fn action_matrices(&self) -> &[IntMatrix] {
        &self.action_matrices
    }

    /// Number of generators `n = #torsion + r + d`.
    pub fn generator_count(&self) -> usize {
        self.torsion_orders.len() + self.unit_rank + self.degree
    }

    /// The commutator weights `ω`, one per generator.
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            torsion: vec![0; self.torsion_orders.len()],
            units: vec![0; self.unit_rank],
            coords: vec![BigInt::zero(); self.degree],
        }
    }

    /// Applies `M(g_j)^exp` to a row vector, `j` indexing `action_matrices`.
    fn act_generator(&self, v: Vec<BigInt>, j: usize, exp: i64) -> Vec<BigInt> {
        if exp == 0 || v.iter().all(Zero::is_zero) {
            return v;
        }
        let m = if exp > 0 {
            &self.action_matrices[j]
        } else {
            &self.inverse_matrices[j]
        };
        let k = exp.unsigned_abs();
        if k <= DIRECT_POWER_LIMIT {
            (0..k).fold(v, |acc, _| m.apply(&acc))
        } else {
            m.pow(k).apply(&v)
        }
    }

    /// `o · M(torsion, units)`.
    fn act(&self, mut o: Vec<BigInt>, torsion: &[u32], units: &[i64]) -> Vec<BigInt> {
        for (j, &t) in torsion.iter().enumerate() {
            o = self.act_generator(o, j, t as i64);
        }
        let t = self.torsion_orders.len();
        for (j, &u) in units.iter().enumerate() {
            o = self.act_generator(o, t + j, u);
        }
        o
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let torsion = a
            .torsion
            .iter()
            .zip(&b.torsion)
            .zip(&self.torsion_orders)
            .map(|((x, y), &ord)| (x + y) % ord)
            .collect();
        let units = a
            .units
            .iter()
            .zip(&b.units)
            .map(|(x, y)| x.checked_add(*y).expect("unit exponent overflow"))
            .collect();
        let mut coords = self.act(a.coords.clone(), &b.torsion, &b.units);
        for (c, y) in coords.iter_mut().zip(&b.coords) {
            *c += y;
        }
        GroupElement {
            torsion,
            units,
            coords,
        }
    }

    /// `(u, o)^{-1} = (u^{-1}, -o·M(u^{-1}))`.
    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        let torsion: Vec<u32> = a
            .torsion
            .iter()
            .zip(&self.torsion_orders)
            .map(|(&x, &ord)| (ord - x) % ord)
            .collect();
        let units: Vec<i64> = a.units.iter().map(|u| -u).collect();
        let coords = self
            .act(a.coords.clone(), &torsion, &units)
            .into_iter()
            .map(|x| -x)
            .collect();
        GroupElement {
            torsion,
            units,
            coords,
        }
    }

    /// Normal form of `g_index^sign` (1-based index).
    pub fn generator_element(&self, index: usize, positive: bool) -> Result<GroupElement> {
        let n = self.generator_count();
        if index == 0 || index > n {
            return Err(Error::GeneratorOutOfRange { index, count: n });
        }
        Ok(self.letter_element(Letter::new(index, positive)))
    }

    fn letter_element(&self, l: Letter) -> GroupElement {
        let mut e = self.identity();
        self.mul_letter(&mut e, l);
        e
    }

    /// Right-multiplies `e` by a single letter in place.
    pub fn mul_letter(&self, e: &mut GroupElement, l: Letter) {
        let t = self.torsion_orders.len();
        let r = self.unit_rank;
        let i = l.index() - 1;
        assert!(i < t + r + self.degree, "letter {l:?} out of range");
        if i < t {
            let ord = self.torsion_orders[i];
            let step = if l.is_positive() { 1 } else { ord - 1 };
            e.torsion[i] = (e.torsion[i] + step) % ord;
            let coords = std::mem::take(&mut e.coords);
            e.coords = self.act_generator(coords, i, step as i64);
        } else if i < t + r {
            e.units[i - t] += l.sign();
            let coords = std::mem::take(&mut e.coords);
            e.coords = self.act_generator(coords, i, l.sign());
        } else {
            e.coords[i - t - r] += l.sign();
        }
    }

    /// Collects a word left to right.
    pub fn evaluate_word(&self, w: &Word) -> GroupElement {
        let mut e = self.identity();
        for &l in w.letters() {
            self.mul_letter(&mut e, l);
        }
        e
    }

    /// `ℓ`: the sum of absolute normal-form exponents.
    pub fn nf_length(&self, e: &GroupElement) -> BigUint {
        let mut total = BigUint::from(e.torsion.iter().map(|&t| t as u64).sum::<u64>());
        total += BigUint::from(e.units.iter().map(|u| u.unsigned_abs()).sum::<u64>());
        for c in &e.coords {
            total += c.magnitude();
        }
        total
    }

    /// `ℓ_wt`: absolute normal-form exponents scaled by `ω`.
    pub fn weighted_nf_length(&self, e: &GroupElement) -> BigUint {
        self.weighted_length_with(e, &self.weights)
    }

    pub(crate) fn weighted_length_with(&self, e: &GroupElement, weights: &[u64]) -> BigUint {
        let t = self.torsion_orders.len();
        let r = self.unit_rank;
        let mut small: u128 = 0;
        for (j, &x) in e.torsion.iter().enumerate() {
            small += weights[j] as u128 * x as u128;
        }
        for (j, u) in e.units.iter().enumerate() {
            small += weights[t + j] as u128 * u.unsigned_abs() as u128;
        }
        let mut total = BigUint::from(small);
        for (j, c) in e.coords.iter().enumerate() {
            let w = weights[t + r + j];
            if w != 0 && !c.is_zero() {
                total += c.magnitude() * w;
            }
        }
        total
    }

    /// Spells an element as its normal-form word
    /// `g_1^{t_1} .. g_t^{t_t} g_{t+1}^{m_1} .. g_n^{o_d}`.
    ///
    /// Returns `None` when the word would exceed `max_letters`.
    pub fn normal_form_word(&self, e: &GroupElement, max_letters: usize) -> Option<Word> {
        let len = self.nf_length(e).to_usize()?;
        if len > max_letters {
            return None;
        }
        let mut letters = Vec::with_capacity(len);
        let mut push = |index: usize, exp: i64| {
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter::new(index, exp > 0));
            }
        };
        let t = self.torsion_orders.len();
        let r = self.unit_rank;
        for (j, &x) in e.torsion.iter().enumerate() {
            push(j + 1, x as i64);
        }
        for (j, &u) in e.units.iter().enumerate() {
            push(t + j + 1, u);
        }
        for (j, c) in e.coords.iter().enumerate() {
            push(t + r + j + 1, c.to_i64()?);
        }
        Some(Word::from_reduced_unchecked(letters))
    }

    /// A uniformly random letter.
    pub fn random_letter<R: Rng + ?Sized>(&self, rng: &mut R) -> Letter {
        let n = self.generator_count();
        let index = rng.gen_range(1..=n);
        let positive = rng.gen_bool(0.5);
        Letter::new(index, positive)
    }

    /// A uniformly random letter other than `avoid`.
    fn random_letter_avoiding<R: Rng + ?Sized>(
        &self,
        avoid: Option<Letter>,
        rng: &mut R,
    ) -> Letter {
        let n = self.generator_count();
        match avoid {
            None => self.random_letter(rng),
            Some(a) => {
                // enumerate the 2n letters as 0..2n, skip the forbidden slot
                let slot = |l: Letter| 2 * (l.index() - 1) + usize::from(!l.is_positive());
                let skip = slot(a);
                let mut k = rng.gen_range(0..2 * n - 1);
                if k >= skip {
                    k += 1;
                }
                Letter::new(k / 2 + 1, k % 2 == 0)
            }
        }
    }

    /// A freely reduced word with exactly `len` letters, each letter uniform
    /// among those that do not cancel its predecessor.
    pub fn random_word_of_length<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Word {
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        for _ in 0..len {
            let avoid = letters.last().map(|l| l.inverse());
            letters.push(self.random_letter_avoiding(avoid, rng));
        }
        Word::from_reduced_unchecked(letters)
    }

    /// Samples a freely reduced word `w` with `lo ≤ ℓ(w) ≤ hi`.
    ///
    /// With [`LengthMeasure::Collected`] a target `T ∈ [lo, hi]` is drawn and a
    /// non-backtracking random walk over the letters runs until the collected
    /// prefix has `ℓ = T`; the reached element is returned as its normal-form
    /// word. Walks that overshoot the step budget are rejected and retried.
    ///
    /// With [`LengthMeasure::FreeWord`] a letter count is drawn from
    /// `[lo, hi]` and a random reduced word of that many letters is returned.
    pub fn random_reduced_word<R: Rng + ?Sized>(
        &self,
        lo: u64,
        hi: u64,
        measure: LengthMeasure,
        rng: &mut R,
    ) -> Result<Word> {
        if lo == 0 || lo > hi {
            return Err(Error::InvalidLengthRange { lo, hi });
        }
        if measure == LengthMeasure::FreeWord {
            let len = rng.gen_range(lo..=hi) as usize;
            return Ok(self.random_word_of_length(len, rng));
        }
        let step_budget = 64 * (hi as usize + 1);
        for _ in 0..SAMPLER_ATTEMPT_CAP {
            let target = BigUint::from(rng.gen_range(lo..=hi));
            let mut e = self.identity();
            let mut last: Option<Letter> = None;
            for _ in 0..step_budget {
                let l = self.random_letter_avoiding(last.map(Letter::inverse), rng);
                self.mul_letter(&mut e, l);
                last = Some(l);
                if self.nf_length(&e) == target {
                    if let Some(w) = self.normal_form_word(&e, hi as usize) {
                        return Ok(w);
                    }
                }
            }
        }
        Err(Error::SamplingExhausted {
            lo,
            hi,
            attempts: SAMPLER_ATTEMPT_CAP,
        })
    }

    /// `[x, y] = x^{-1} y^{-1} x y`.
    pub fn commutator(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let xi = self.inverse(x);
        let yi = self.inverse(y);
        let p = self.multiply(&xi, &yi);
        let p = self.multiply(&p, x);
        self.multiply(&p, y)
    }
}

/// `ω_j = Σ_k ℓ([g_j, g_k])` over all generators.
pub fn compute_commutator_weights(spec: &GroupSpec) -> Vec<u64> {
    let n = spec.generator_count();
    let gens: Vec<GroupElement> = (1..=n)
        .map(|i| spec.letter_element(Letter::new(i, true)))
        .collect();
    gens.iter()
        .map(|gj| {
            gens.iter()
                .map(|gk| {
                    spec.nf_length(&spec.commutator(gj, gk))
                        .to_u64()
                        .expect("commutator of generators has machine-size length")
                })
                .sum()
        })
        .collect()
}
