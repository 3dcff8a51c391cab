//! Shipped platform groups for `f = x-1`, `x^2-x-1` and `x^3-x-1`.
//!
//! In each case `Z[θ]` is the full ring of integers (the discriminants 1, 5
//! and -23 are squarefree), the torsion units are `±1` and the unit group
//! is generated by `-1` together with `θ` itself for degrees 2 and 3. The
//! action of `θ` on the basis `1, θ, .., θ^{d-1}` is the companion matrix of
//! `f` in row convention.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{GroupSpec, IntMatrix};
use crate::error::{Error, Result};

/// Degrees with built-in group data.
pub const BUILTIN_DEGREES: [usize; 3] = [1, 2, 3];

struct BuiltinData {
    degree: usize,
    poly: &'static [i64],
    unit_actions: &'static [&'static [&'static [i64]]],
}

const DATA: [BuiltinData; 3] = [
    BuiltinData {
        degree: 1,
        poly: &[-1, 1],
        unit_actions: &[],
    },
    BuiltinData {
        degree: 2,
        poly: &[-1, -1, 1],
        unit_actions: &[&[&[0, 1], &[1, 1]]],
    },
    BuiltinData {
        degree: 3,
        poly: &[-1, -1, 0, 1],
        unit_actions: &[&[&[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]],
    },
];

/// The built-in group of the given degree.
pub fn builtin_group(degree: usize) -> Result<GroupSpec> {
    let data = DATA.iter().find(|d| d.degree == degree).ok_or_else(|| {
        Error::InvalidGroup(format!(
            "no built-in group of degree {degree}; supply a group file"
        ))
    })?;
    let d = data.degree;
    let mut matrices = vec![IntMatrix::identity(d).neg()];
    for rows in data.unit_actions {
        matrices.push(IntMatrix::from_i64_rows(rows).expect("square literal"));
    }
    let unit_rank = data.unit_actions.len();
    GroupSpec::new(
        d,
        data.poly.iter().map(|&c| BigInt::from(c)).collect(),
        vec![2],
        unit_rank,
        matrices,
    )
}

/// `f(M)` for coefficients listed from the constant term up.
pub fn eval_poly_at_matrix(coeffs: &[BigInt], m: &IntMatrix) -> IntMatrix {
    let d = m.dim();
    // Horner
    let mut acc = IntMatrix::zero(d);
    for c in coeffs.iter().rev() {
        acc = acc.mul(m);
        if !c.is_zero() {
            let mut rows = acc.rows();
            for (i, row) in rows.iter_mut().enumerate() {
                row[i] += c;
            }
            acc = IntMatrix::from_rows(rows).expect("square");
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent route: multiply basis monomials by x as integer polynomials
    /// and reduce modulo the monic f by long division.
    fn mult_by_root_oracle(f: &[i64]) -> Vec<Vec<i64>> {
        let d = f.len() - 1;
        (0..d)
            .map(|i| {
                // x * x^i
                let mut p = vec![0i64; i + 2];
                p[i + 1] = 1;
                while p.len() > d {
                    let lead = *p.last().unwrap();
                    let shift = p.len() - 1 - d;
                    for (k, &fk) in f.iter().enumerate() {
                        p[shift + k] -= lead * fk;
                    }
                    p.pop();
                }
                p.resize(d, 0);
                p
            })
            .collect()
    }

    #[test]
    fn shipped_matrices_match_polynomial_oracle() {
        for data in DATA.iter().filter(|d| d.degree > 1) {
            let oracle = mult_by_root_oracle(data.poly);
            let shipped: Vec<Vec<i64>> = data.unit_actions[0].iter().map(|r| r.to_vec()).collect();
            assert_eq!(shipped, oracle, "degree {}", data.degree);
        }
    }

    #[test]
    fn unit_actions_satisfy_f() {
        for &d in &BUILTIN_DEGREES {
            let g = builtin_group(d).unwrap();
            for m in &g.action_matrices()[1..] {
                let fm = eval_poly_at_matrix(g.poly_coeffs(), m);
                assert_eq!(fm, IntMatrix::zero(d));
            }
            assert_eq!(g.action_matrices()[0], IntMatrix::identity(d).neg());
        }
    }

    #[test]
    fn unknown_degree_is_an_error() {
        assert!(builtin_group(5).is_err());
    }
}
