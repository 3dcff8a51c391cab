//! AAG key-exchange instances and the conjugacy-equation cost.
//!
//! Alice publishes subgroup generators `a_1..a_N`, Bob publishes `b_1..b_N`,
//! and Alice's private key `A` is a product of `L` generators `a_μ^{±1}`.
//! An attacker sees the conjugates `c_i = A^{-1} b_i A` and must find `α`
//! with `α^{-1} b_i α = c_i` for every `i`.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::seed::RunSeed;
use crate::pcgroup::{concat_words, GroupElement, GroupSpec, LengthMeasure, Word};

/// Resampling budget for degenerate instances.
pub const DEGENERATE_RESAMPLE_CAP: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AagParams {
    /// Number of subgroup generators, equal to the number of equations.
    pub n: usize,
    /// Private key length in subgroup generators.
    pub key_len: usize,
    /// Bounds on `ℓ` of each subgroup generator.
    pub l1: u64,
    pub l2: u64,
    #[serde(default)]
    pub length_measure: LengthMeasure,
}

impl AagParams {
    pub fn new(n: usize, key_len: usize, l1: u64, l2: u64) -> Result<Self> {
        let p = AagParams {
            n,
            key_len,
            l1,
            l2,
            length_measure: LengthMeasure::Collected,
        };
        p.validate()?;
        Ok(p)
    }

    /// `N=20, L1=10, L2=13, L=5`.
    pub fn wide() -> Self {
        AagParams::new(20, 5, 10, 13).expect("valid")
    }

    /// `N=5, L1=5, L2=8, L=5`.
    pub fn narrow_short() -> Self {
        AagParams::new(5, 5, 5, 8).expect("valid")
    }

    /// `N=5, L1=15, L2=18, L=5`.
    pub fn narrow_long() -> Self {
        AagParams::new(5, 5, 15, 18).expect("valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("N must be at least 1".into()));
        }
        if self.key_len == 0 {
            return Err(Error::InvalidParams("L must be at least 1".into()));
        }
        if self.l1 == 0 || self.l1 > self.l2 {
            return Err(Error::InvalidParams(format!(
                "need 1 <= L1 <= L2, got L1={} L2={}",
                self.l1, self.l2
            )));
        }
        Ok(())
    }

    /// Parses `"N,L,L1,L2"`.
    pub fn parse_csv(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::InvalidParams(format!("expected N,L,L1,L2, got {s:?}"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let n = parts[0].parse().map_err(|_| bad())?;
        let key_len = parts[1].parse().map_err(|_| bad())?;
        let l1 = parts[2].parse().map_err(|_| bad())?;
        let l2 = parts[3].parse().map_err(|_| bad())?;
        AagParams::new(n, key_len, l1, l2)
    }
}

impl fmt::Display for AagParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.n, self.key_len, self.l1, self.l2)
    }
}

/// One generated instance of the subgroup-restricted multiple conjugacy
/// problem.
#[derive(Clone, Debug)]
pub struct AagInstance {
    pub params: AagParams,
    pub a_gens: Vec<Word>,
    pub b_gens: Vec<Word>,
    /// `c_i = A^{-1} b_i A` in normal form.
    pub conjugates: Vec<GroupElement>,
    /// The secret `A`; used only to check that a zero-cost witness exists.
    pub planted_key: Word,
    pub seed: RunSeed,
    b_elems: Vec<GroupElement>,
    c_inverses: Vec<GroupElement>,
}

impl AagInstance {
    /// Assembles an instance from its public data, recomputing the cached
    /// group elements.
    pub fn from_parts(
        spec: &GroupSpec,
        params: AagParams,
        a_gens: Vec<Word>,
        b_gens: Vec<Word>,
        conjugates: Vec<GroupElement>,
        planted_key: Word,
        seed: RunSeed,
    ) -> Result<Self> {
        params.validate()?;
        if a_gens.len() != params.n || b_gens.len() != params.n || conjugates.len() != params.n {
            return Err(Error::InvalidParams(format!(
                "instance has {}/{}/{} generators/conjugates, expected N={}",
                a_gens.len(),
                b_gens.len(),
                conjugates.len(),
                params.n
            )));
        }
        let n = spec.generator_count();
        for w in a_gens
            .iter()
            .chain(&b_gens)
            .chain(std::iter::once(&planted_key))
        {
            if let Some(l) = w.letters().iter().find(|l| l.index() > n) {
                return Err(Error::GeneratorOutOfRange {
                    index: l.index(),
                    count: n,
                });
            }
        }
        let identity = spec.identity();
        for c in &conjugates {
            if c.torsion.len() != identity.torsion.len()
                || c.units.len() != identity.units.len()
                || c.coords.len() != identity.coords.len()
            {
                return Err(Error::InvalidParams(
                    "conjugate shape does not match group".into(),
                ));
            }
        }
        let b_elems = b_gens.iter().map(|b| spec.evaluate_word(b)).collect();
        let c_inverses = conjugates.iter().map(|c| spec.inverse(c)).collect();
        Ok(AagInstance {
            params,
            a_gens,
            b_gens,
            conjugates,
            planted_key,
            seed,
            b_elems,
            c_inverses,
        })
    }

    /// Whether the empty word already solves every equation.
    pub fn is_degenerate(&self) -> bool {
        self.b_elems
            .iter()
            .zip(&self.conjugates)
            .all(|(b, c)| b == c)
    }
}

/// Generates an instance from `seed`, resampling degenerate ones.
pub fn generate_instance(
    spec: &GroupSpec,
    params: AagParams,
    seed: RunSeed,
) -> Result<AagInstance> {
    params.validate()?;
    let mut rng = seed.rng();
    for _ in 0..DEGENERATE_RESAMPLE_CAP {
        let inst = sample_instance(spec, params, seed, &mut rng)?;
        if !inst.is_degenerate() {
            return Ok(inst);
        }
    }
    Err(Error::DegenerateInstance(DEGENERATE_RESAMPLE_CAP))
}

fn sample_instance<R: Rng + ?Sized>(
    spec: &GroupSpec,
    params: AagParams,
    seed: RunSeed,
    rng: &mut R,
) -> Result<AagInstance> {
    let sample = |rng: &mut R| -> Result<Vec<Word>> {
        (0..params.n)
            .map(|_| spec.random_reduced_word(params.l1, params.l2, params.length_measure, rng))
            .collect()
    };
    let a_gens = sample(rng)?;
    let b_gens = sample(rng)?;
    let mut key = Word::empty();
    for _ in 0..params.key_len {
        let mu = rng.gen_range(0..params.n);
        let positive = rng.gen_bool(0.5);
        let factor = if positive {
            a_gens[mu].clone()
        } else {
            a_gens[mu].inverse()
        };
        key = concat_words(&key, &factor);
    }
    let k = spec.evaluate_word(&key);
    let k_inv = spec.inverse(&k);
    let conjugates = b_gens
        .iter()
        .map(|b| {
            let p = spec.multiply(&k_inv, &spec.evaluate_word(b));
            spec.multiply(&p, &k)
        })
        .collect();
    AagInstance::from_parts(spec, params, a_gens, b_gens, conjugates, key, seed)
}

/// Six-component cost: `(sum, max, mean)` of the unweighted summand lengths,
/// then the same for the weighted lengths. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CostVector {
    pub sum: BigUint,
    pub max: BigUint,
    pub mean: BigRational,
    pub weighted_sum: BigUint,
    pub weighted_max: BigUint,
    pub weighted_mean: BigRational,
}

impl CostVector {
    pub fn zero() -> Self {
        CostVector {
            sum: BigUint::zero(),
            max: BigUint::zero(),
            mean: BigRational::zero(),
            weighted_sum: BigUint::zero(),
            weighted_max: BigUint::zero(),
            weighted_mean: BigRational::zero(),
        }
    }

    /// Builds the vector from per-equation `(ℓ, ℓ_wt)` summands.
    pub fn from_summands(summands: &[(BigUint, BigUint)]) -> Self {
        let n = summands.len().max(1);
        let sum: BigUint = summands.iter().map(|s| &s.0).sum();
        let max = summands
            .iter()
            .map(|s| &s.0)
            .max()
            .cloned()
            .unwrap_or_default();
        let weighted_sum: BigUint = summands.iter().map(|s| &s.1).sum();
        let weighted_max = summands
            .iter()
            .map(|s| &s.1)
            .max()
            .cloned()
            .unwrap_or_default();
        let mean = BigRational::new(BigInt::from(sum.clone()), BigInt::from(n));
        let weighted_mean = BigRational::new(BigInt::from(weighted_sum.clone()), BigInt::from(n));
        CostVector {
            sum,
            max,
            mean,
            weighted_sum,
            weighted_max,
            weighted_mean,
        }
    }

    /// The primary cost `c`: the unweighted sum.
    pub fn c(&self) -> &BigUint {
        &self.sum
    }

    pub fn is_solved(&self) -> bool {
        self.sum.is_zero()
    }

    pub fn sum_f64(&self) -> f64 {
        self.sum.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Components as floating point, in order.
    pub fn components_f64(&self) -> [f64; 6] {
        let r = |x: &BigRational| x.to_f64().unwrap_or(f64::INFINITY);
        let u = |x: &BigUint| x.to_f64().unwrap_or(f64::INFINITY);
        [
            u(&self.sum),
            u(&self.max),
            r(&self.mean),
            u(&self.weighted_sum),
            u(&self.weighted_max),
            r(&self.weighted_mean),
        ]
    }
}

impl Ord for CostVector {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_cost(self, other)
    }
}

impl PartialOrd for CostVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {}, {})",
            self.sum, self.max, self.mean, self.weighted_sum, self.weighted_max, self.weighted_mean
        )
    }
}

/// Lexicographic order over the six components.
pub fn compare_cost(x: &CostVector, y: &CostVector) -> Ordering {
    x.sum
        .cmp(&y.sum)
        .then_with(|| x.max.cmp(&y.max))
        .then_with(|| x.mean.cmp(&y.mean))
        .then_with(|| x.weighted_sum.cmp(&y.weighted_sum))
        .then_with(|| x.weighted_max.cmp(&y.weighted_max))
        .then_with(|| x.weighted_mean.cmp(&y.weighted_mean))
}

/// The reduced equation `α^{-1} b_i α c_i^{-1}` for every `i`.
pub fn residuals(spec: &GroupSpec, inst: &AagInstance, alpha: &GroupElement) -> Vec<GroupElement> {
    let alpha_inv = spec.inverse(alpha);
    inst.b_elems
        .iter()
        .zip(&inst.c_inverses)
        .map(|(b, c_inv)| {
            let p = spec.multiply(&alpha_inv, b);
            let p = spec.multiply(&p, alpha);
            spec.multiply(&p, c_inv)
        })
        .collect()
}

/// Cost of a candidate given as a group element.
pub fn cost_of_element(spec: &GroupSpec, inst: &AagInstance, alpha: &GroupElement) -> CostVector {
    let summands: Vec<(BigUint, BigUint)> = residuals(spec, inst, alpha)
        .iter()
        .map(|e| (spec.nf_length(e), spec.weighted_nf_length(e)))
        .collect();
    CostVector::from_summands(&summands)
}

/// `c(α) = Σ ℓ(α^{-1} b_i α c_i^{-1})`, extended to the six-component vector.
pub fn cost(spec: &GroupSpec, inst: &AagInstance, alpha: &Word) -> CostVector {
    cost_of_element(spec, inst, &spec.evaluate_word(alpha))
}

/// Whether `α` satisfies every conjugacy equation.
pub fn verify_solution(spec: &GroupSpec, inst: &AagInstance, alpha: &Word) -> bool {
    let a = spec.evaluate_word(alpha);
    let a_inv = spec.inverse(&a);
    inst.b_elems.iter().zip(&inst.conjugates).all(|(b, c)| {
        let p = spec.multiply(&a_inv, b);
        &spec.multiply(&p, &a) == c
    })
}

/// The shared key `[A, B] = A^{-1} B^{-1} A B`.
pub fn shared_key(spec: &GroupSpec, a: &Word, b: &Word) -> GroupElement {
    spec.commutator(&spec.evaluate_word(a), &spec.evaluate_word(b))
}

// ---------------------------------------------------------------------------
// Instance files

/// Format tag of instance files.
pub const INSTANCE_FORMAT: &str = "polyhh-instance-v1";

#[derive(Debug, Serialize, Deserialize)]
struct GroupTag {
    degree: usize,
    poly_coeffs: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ElementFile {
    torsion: Vec<u32>,
    units: Vec<String>,
    coords: Vec<String>,
}

/// On-disk instance. Words are arrays of signed generator indices; big
/// integers are decimal strings. `planted_key` is the secret and must be
/// ignored by attacks.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    format: String,
    group: GroupTag,
    params: AagParams,
    seed: RunSeed,
    a_gens: Vec<Word>,
    b_gens: Vec<Word>,
    conjugates: Vec<ElementFile>,
    planted_key: Word,
}

fn group_tag(spec: &GroupSpec) -> GroupTag {
    GroupTag {
        degree: spec.degree(),
        poly_coeffs: spec.poly_coeffs().iter().map(|c| c.to_string()).collect(),
    }
}

pub fn instance_to_string(spec: &GroupSpec, inst: &AagInstance) -> String {
    let file = InstanceFile {
        format: INSTANCE_FORMAT.to_string(),
        group: group_tag(spec),
        params: inst.params,
        seed: inst.seed,
        a_gens: inst.a_gens.clone(),
        b_gens: inst.b_gens.clone(),
        conjugates: inst
            .conjugates
            .iter()
            .map(|c| ElementFile {
                torsion: c.torsion.clone(),
                units: c.units.iter().map(|u| u.to_string()).collect(),
                coords: c.coords.iter().map(|x| x.to_string()).collect(),
            })
            .collect(),
        planted_key: inst.planted_key.clone(),
    };
    serde_json::to_string(&file).expect("serializable") + "\n"
}

pub fn parse_instance(spec: &GroupSpec, text: &str) -> Result<AagInstance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))?;
    if file.format != INSTANCE_FORMAT {
        return Err(Error::InvalidParams(format!(
            "unknown format {:?}",
            file.format
        )));
    }
    let tag = group_tag(spec);
    if file.group.degree != tag.degree || file.group.poly_coeffs != tag.poly_coeffs {
        return Err(Error::InvalidParams(format!(
            "instance was generated for degree {} polynomial {:?}, not this group",
            file.group.degree, file.group.poly_coeffs
        )));
    }
    let bad = |s: &str| Error::InvalidParams(format!("bad integer {s:?}"));
    let conjugates = file
        .conjugates
        .iter()
        .map(|c| {
            Ok(GroupElement {
                torsion: c.torsion.clone(),
                units: c
                    .units
                    .iter()
                    .map(|s| s.parse::<i64>().map_err(|_| bad(s)))
                    .collect::<Result<_>>()?,
                coords: c
                    .coords
                    .iter()
                    .map(|s| s.parse::<BigInt>().map_err(|_| bad(s)))
                    .collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for c in &conjugates {
        if c.torsion
            .iter()
            .zip(spec.torsion_orders())
            .any(|(t, o)| t >= o)
        {
            return Err(Error::InvalidParams(
                "torsion exponent not canonical".into(),
            ));
        }
    }
    AagInstance::from_parts(
        spec,
        file.params,
        file.a_gens,
        file.b_gens,
        conjugates,
        file.planted_key,
        file.seed,
    )
}

pub fn save_instance(spec: &GroupSpec, inst: &AagInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, instance_to_string(spec, inst)).map_err(|e| Error::io(path, e))
}

pub fn load_instance(spec: &GroupSpec, path: impl AsRef<Path>) -> Result<AagInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(spec, &text).map_err(|e| Error::parse(path, e))
}
