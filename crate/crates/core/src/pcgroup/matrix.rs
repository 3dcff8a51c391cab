//! Square integer matrices acting on row vectors.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A dense `d × d` integer matrix, row-major.
///
/// Vectors are rows and act on the left: `v · M`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    /// Builds a matrix from its rows. Returns `None` unless the rows form a square.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Option<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(Self {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Option<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .chunks(self.dim.max(1))
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = Self::zero(d);
        for i in 0..d {
            for k in 0..d {
                let a = &self.entries[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &rhs.entries[k * d + j];
                    if !b.is_zero() {
                        out.entries[i * d + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// `self^exp` for `exp ≥ 0` by repeated squaring.
    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        let d = self.dim;
        debug_assert_eq!(v.len(), d);
        let mut out = vec![BigInt::zero(); d];
        for (k, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let row = &self.entries[k * d..(k + 1) * d];
            for (o, m) in out.iter_mut().zip(row) {
                if !m.is_zero() {
                    *o += x * m;
                }
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        let d = self.dim;
        if d == 0 {
            return BigInt::one();
        }
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d - 1 {
            if a[k * d + k].is_zero() {
                let Some(p) = (k + 1..d).find(|&r| !a[r * d + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..d {
                    a.swap(k * d + j, p * d + j);
                }
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let v = &a[i * d + j] * &a[k * d + k] - &a[i * d + k] * &a[k * d + j];
                    a[i * d + j] = v / &prev;
                }
            }
            prev = a[k * d + k].clone();
        }
        sign * &a[(d - 1) * d + (d - 1)]
    }

    /// Exact inverse over the integers, if one exists.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.dim;
        let mut a: Vec<BigRational> = self
            .entries
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        let mut inv: Vec<BigRational> = Self::identity(d)
            .entries
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        for col in 0..d {
            let pivot = (col..d).find(|&r| !a[r * d + col].is_zero())?;
            if pivot != col {
                for j in 0..d {
                    a.swap(col * d + j, pivot * d + j);
                    inv.swap(col * d + j, pivot * d + j);
                }
            }
            let p = a[col * d + col].clone();
            for j in 0..d {
                a[col * d + j] = &a[col * d + j] / &p;
                inv[col * d + j] = &inv[col * d + j] / &p;
            }
            for r in 0..d {
                if r == col || a[r * d + col].is_zero() {
                    continue;
                }
                let f = a[r * d + col].clone();
                for j in 0..d {
                    let t = &f * &a[col * d + j];
                    a[r * d + j] -= t;
                    let t = &f * &inv[col * d + j];
                    inv[r * d + j] -= t;
                }
            }
        }
        if inv.iter().any(|x| !x.is_integer()) {
            return None;
        }
        Some(Self {
            dim: d,
            entries: inv.into_iter().map(|x| x.to_integer()).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}
