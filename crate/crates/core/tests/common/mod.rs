//! Independent oracles shared by the property and acceptance tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use polyhh_core::pcgroup::{free_reduce, GroupElement, GroupSpec, Letter, Word};
use rand::Rng;

pub type Mat = Vec<Vec<BigInt>>;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigInt::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn mat_identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn minor(a: &Mat, r: usize, c: usize) -> Mat {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != c)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

fn det(a: &Mat) -> BigInt {
    match a.len() {
        0 => BigInt::one(),
        1 => a[0][0].clone(),
        n => (0..n).fold(BigInt::zero(), |acc, c| {
            let term = &a[0][c] * det(&minor(a, 0, c));
            if c % 2 == 0 {
                acc + term
            } else {
                acc - term
            }
        }),
    }
}

/// Inverse of a unimodular matrix by the adjugate formula.
fn unimodular_inverse(a: &Mat) -> Mat {
    let n = a.len();
    let d = det(a);
    assert!(d.abs().is_one(), "matrix is not unimodular");
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let cof = det(&minor(a, j, i));
                    let signed = if (i + j) % 2 == 0 { cof } else { -cof };
                    signed * &d
                })
                .collect()
        })
        .collect()
}

fn mat_pow(a: &Mat, a_inv: &Mat, e: i64) -> Mat {
    let base = if e < 0 { a_inv } else { a };
    (0..e.unsigned_abs()).fold(mat_identity(a.len()), |acc, _| mat_mul(&acc, base))
}

/// Faithful affine representation: `(u, o) ↦ [[M(u), 0], [o, 1]]`, acting
/// on row vectors `(x, 1)`.
pub struct AffineOracle {
    d: usize,
    t: usize,
    actions: Vec<Mat>,
    inverses: Vec<Mat>,
}

impl AffineOracle {
    pub fn new(spec: &GroupSpec) -> Self {
        let actions: Vec<Mat> = spec.action_matrices().iter().map(|m| m.rows()).collect();
        let inverses = actions.iter().map(unimodular_inverse).collect();
        AffineOracle {
            d: spec.degree(),
            t: spec.torsion_orders().len(),
            actions,
            inverses,
        }
    }

    fn embed(&self, m: &Mat, o: &[BigInt]) -> Mat {
        let mut out = mat_identity(self.d + 1);
        for i in 0..self.d {
            for j in 0..self.d {
                out[i][j] = m[i][j].clone();
            }
        }
        out[self.d][..self.d].clone_from_slice(&o[..self.d]);
        out
    }

    pub fn letter(&self, l: Letter) -> Mat {
        let i = l.index() - 1;
        let zero = vec![BigInt::zero(); self.d];
        if i < self.actions.len() {
            let m = if l.is_positive() {
                &self.actions[i]
            } else {
                &self.inverses[i]
            };
            self.embed(m, &zero)
        } else {
            let mut o = zero;
            o[i - self.actions.len()] = BigInt::from(l.sign());
            self.embed(&mat_identity(self.d), &o)
        }
    }

    pub fn word(&self, w: &Word) -> Mat {
        w.letters()
            .iter()
            .fold(mat_identity(self.d + 1), |acc, &l| {
                mat_mul(&acc, &self.letter(l))
            })
    }

    pub fn element(&self, e: &GroupElement) -> Mat {
        let mut m = mat_identity(self.d);
        let exps = e
            .torsion
            .iter()
            .map(|&x| x as i64)
            .chain(e.units.iter().copied());
        for (j, x) in exps.enumerate() {
            m = mat_mul(&m, &mat_pow(&self.actions[j], &self.inverses[j], x));
        }
        debug_assert!(self.t <= self.actions.len());
        self.embed(&m, &e.coords)
    }
}

pub fn random_element<R: Rng>(spec: &GroupSpec, rng: &mut R, max_len: usize) -> GroupElement {
    let len = rng.gen_range(0..=max_len);
    spec.evaluate_word(&spec.random_word_of_length(len, rng))
}

/// `ℓ` computed directly from the exponents.
pub fn brute_length(e: &GroupElement) -> u64 {
    let t: u64 = e.torsion.iter().map(|&x| x as u64).sum();
    let u: u64 = e.units.iter().map(|x| x.unsigned_abs()).sum();
    let o: u64 = e
        .coords
        .iter()
        .map(|c| u64::try_from(c.abs()).expect("small coordinate"))
        .sum();
    t + u + o
}

/// `ω_j` by collecting the words `g_j^{-1} g_k^{-1} g_j g_k` letter by letter.
pub fn brute_weights(spec: &GroupSpec) -> Vec<u64> {
    let n = spec.generator_count() as i32;
    (1..=n)
        .map(|j| {
            (1..=n)
                .map(|k| {
                    let w: Word = format!("{} {} {} {}", -j, -k, j, k).parse().unwrap();
                    brute_length(&spec.evaluate_word(&w))
                })
                .sum()
        })
        .collect()
}

/// Group axioms on `triples` random triples, `evaluate_word` against a
/// letter-by-letter fold and the affine oracle, `ω` against the double loop
/// and free-reduction idempotence. Returns the first violation.
pub fn group_property_suite<R: Rng>(
    spec: &GroupSpec,
    triples: usize,
    rng: &mut R,
) -> Result<(), String> {
    let id = spec.identity();
    let oracle = AffineOracle::new(spec);
    for k in 0..triples {
        let a = random_element(spec, rng, 12);
        let b = random_element(spec, rng, 12);
        let c = random_element(spec, rng, 12);
        let left = spec.multiply(&spec.multiply(&a, &b), &c);
        let right = spec.multiply(&a, &spec.multiply(&b, &c));
        if left != right {
            return Err(format!(
                "associativity fails on triple {k}: {a:?} {b:?} {c:?}"
            ));
        }
        if spec.multiply(&a, &id) != a || spec.multiply(&id, &a) != a {
            return Err(format!("identity fails on {a:?}"));
        }
        let ai = spec.inverse(&a);
        if spec.multiply(&a, &ai) != id || spec.multiply(&ai, &a) != id {
            return Err(format!("inverse fails on {a:?}"));
        }
        if oracle.element(&spec.multiply(&a, &b))
            != mat_mul(&oracle.element(&a), &oracle.element(&b))
        {
            return Err(format!(
                "product disagrees with affine oracle on {a:?} {b:?}"
            ));
        }

        let len = rng.gen_range(0..24);
        let raw: Vec<Letter> = (0..len).map(|_| spec.random_letter(rng)).collect();
        let w = Word::reduced(raw.iter().copied());
        let fold = raw.iter().fold(spec.identity(), |acc, &l| {
            let g = spec.generator_element(l.index(), l.is_positive()).unwrap();
            spec.multiply(&acc, &g)
        });
        if spec.evaluate_word(&w) != fold {
            return Err(format!("evaluate_word differs from fold on {w}"));
        }
        if oracle.element(&fold) != oracle.word(&w) {
            return Err(format!("evaluate_word differs from affine oracle on {w}"));
        }
        let once = free_reduce(raw.iter().copied());
        if free_reduce(once.letters().iter().copied()) != once {
            return Err(format!("free_reduce not idempotent on {once}"));
        }
    }
    let expected = brute_weights(spec);
    if spec.weights() != expected.as_slice() {
        return Err(format!(
            "weights {:?} != brute force {expected:?}",
            spec.weights()
        ));
    }
    Ok(())
}
