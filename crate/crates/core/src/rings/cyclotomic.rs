//! Cyclotomic integers with exact arithmetic.
//!
//! Values live in `Z[x] / Phi_L(x)`, reduced modulo the L-th cyclotomic
//! polynomial rather than `x^L - 1`: the latter quotient has zero
//! divisors, so nonvanishing verdicts would be unsound there. Coefficients
//! are arbitrary-precision integers.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::prime_factorization;

/// Hard sanity bound on levels, independent of configurable caps; keeps
/// hostile deserialized values from allocating absurd polynomials.
const HARD_LEVEL_CAP: u64 = 65_536;

pub fn euler_phi(n: u64) -> u64 {
    prime_factorization(n)
        .iter()
        .fold(n, |acc, (&p, _)| acc / p * (p - 1))
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Exact division of integer polynomials (little-endian, monic divisor).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Result<Vec<BigInt>> {
    let dd = den.len() - 1;
    if !den[dd].is_one() {
        return Err(Error::Internal("divisor is not monic".into()));
    }
    let dn = num.len() - 1;
    if dn < dd {
        return Err(Error::Internal("division by higher degree".into()));
    }
    let mut rem: Vec<BigInt> = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for i in (0..=dn - dd).rev() {
        let c = rem[i + dd].clone();
        if !c.is_zero() {
            for j in 0..=dd {
                rem[i + j] -= &c * &den[j];
            }
        }
        quot[i] = c;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return Err(Error::Internal("inexact polynomial division".into()));
    }
    Ok(quot)
}

fn cyclo_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached full coefficient vector of Phi_L, little-endian, length
/// phi(L) + 1, leading coefficient 1.
pub(crate) fn cyclo_arc(level: u64) -> Result<Arc<Vec<BigInt>>> {
    if level == 0 {
        return Err(Error::Domain("cyclotomic level must be positive".into()));
    }
    if level > HARD_LEVEL_CAP {
        return Err(Error::CapExceeded(format!(
            "cyclotomic level {level} exceeds hard bound {HARD_LEVEL_CAP}"
        )));
    }
    if let Some(hit) = cyclo_cache().lock().unwrap().get(&level) {
        return Ok(hit.clone());
    }
    // Phi_L = (x^L - 1) / prod of Phi_d over proper divisors d of L.
    let mut poly = vec![BigInt::zero(); level as usize + 1];
    poly[0] = -BigInt::one();
    poly[level as usize] = BigInt::one();
    for d in divisors(level) {
        if d < level {
            let phi_d = cyclo_arc(d)?;
            poly = poly_div_exact(&poly, &phi_d)?;
        }
    }
    if poly.len() as u64 != euler_phi(level) + 1 {
        return Err(Error::Internal(format!(
            "Phi_{level} has degree {} instead of {}",
            poly.len() - 1,
            euler_phi(level)
        )));
    }
    let arc = Arc::new(poly);
    cyclo_cache()
        .lock()
        .unwrap()
        .entry(level)
        .or_insert_with(|| arc.clone());
    Ok(arc)
}

/// The L-th cyclotomic polynomial as its full coefficient vector
/// (little-endian, monic, degree phi(L)).
pub fn cyclotomic_poly(level: u64, caps: &Caps) -> Result<Vec<BigInt>> {
    if level > caps.cyclotomic_level {
        return Err(Error::CapExceeded(format!(
            "cyclotomic level {level} exceeds cap {}",
            caps.cyclotomic_level
        )));
    }
    Ok(cyclo_arc(level)?.as_ref().clone())
}

/// Reduces a little-endian polynomial in place modulo Phi_L (monic), then
/// truncates to degree < phi(L).
fn reduce_mod_phi(coeffs: &mut Vec<BigInt>, phi_poly: &[BigInt]) {
    let deg = phi_poly.len() - 1;
    let mut i = coeffs.len();
    while i > deg {
        i -= 1;
        if coeffs[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut coeffs[i], BigInt::zero());
        for j in 0..deg {
            coeffs[i - deg + j] -= &c * &phi_poly[j];
        }
        // Reducing x^i may reintroduce terms at positions >= deg below i;
        // the downward sweep revisits them.
    }
    coeffs.truncate(deg);
    coeffs.resize(deg, BigInt::zero());
}

/// Element of `Z[zeta_L]`, canonically represented by its coefficient
/// vector of length phi(L). Equality is coefficient-vector equality at
/// the same level; values at different levels never mix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicInteger {
    level: u64,
    coeffs: Vec<BigInt>,
}

impl CyclotomicInteger {
    pub fn zero(level: u64) -> Result<Self> {
        let phi = cyclo_arc(level)?.len() - 1;
        Ok(CyclotomicInteger {
            level,
            coeffs: vec![BigInt::zero(); phi],
        })
    }

    pub fn from_integer(level: u64, value: BigInt) -> Result<Self> {
        let mut out = CyclotomicInteger::zero(level)?;
        if out.coeffs.is_empty() {
            // Level 1: Phi_1 = x - 1, the ring is Z with empty fraction part.
            // Represent via the reduction x ≡ 1, i.e. constant slot exists
            // only when phi(L) >= 1; phi(1) = 1 so this branch is dead.
            return Err(Error::Internal("empty cyclotomic representation".into()));
        }
        out.coeffs[0] = value;
        Ok(out)
    }

    pub fn one(level: u64) -> Result<Self> {
        CyclotomicInteger::from_integer(level, BigInt::one())
    }

    /// zeta_L^exp, reduced to the canonical representation.
    pub fn root_of_unity(level: u64, exp: u64) -> Result<Self> {
        let phi_poly = cyclo_arc(level)?;
        let e = (exp % level) as usize;
        let mut coeffs = vec![BigInt::zero(); e + 1];
        coeffs[e] = BigInt::one();
        reduce_mod_phi(&mut coeffs, &phi_poly);
        Ok(CyclotomicInteger { level, coeffs })
    }

    /// Builds from an arbitrary-length little-endian coefficient vector,
    /// reducing modulo Phi_L.
    pub fn from_coeffs(level: u64, mut coeffs: Vec<BigInt>) -> Result<Self> {
        let phi_poly = cyclo_arc(level)?;
        reduce_mod_phi(&mut coeffs, &phi_poly);
        Ok(CyclotomicInteger { level, coeffs })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::Backend(format!(
                "cyclotomic level mismatch: {} vs {}",
                self.level, other.level
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CyclotomicInteger {
            level: self.level,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CyclotomicInteger {
            level: self.level,
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        CyclotomicInteger {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let phi_poly = cyclo_arc(self.level)?;
        let n = self.coeffs.len();
        if n == 0 {
            return Ok(self.clone());
        }
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        reduce_mod_phi(&mut prod, &phi_poly);
        Ok(CyclotomicInteger {
            level: self.level,
            coeffs: prod,
        })
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        CyclotomicInteger {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// The constant integer this value represents, if it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }
}

impl fmt::Display for CyclotomicInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let body = match i {
                0 => c.to_string(),
                _ => {
                    let z = if i == 1 {
                        format!("z{}", self.level)
                    } else {
                        format!("z{}^{}", self.level, i)
                    };
                    if c.is_one() {
                        z
                    } else if (-c).is_one() {
                        format!("-{z}")
                    } else {
                        format!("{c}*{z}")
                    }
                }
            };
            terms.push(body);
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        write!(f, "{out}")
    }
}

/// Coefficients serialize as JSON numbers when they fit in i64 and as
/// decimal strings otherwise, so values stay lossless at any size.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffWire {
    Small(i64),
    Big(String),
}

#[derive(Serialize, Deserialize)]
struct CycWire {
    level: u64,
    coeffs: Vec<CoeffWire>,
}

impl Serialize for CyclotomicInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match i64::try_from(c) {
                Ok(small) => CoeffWire::Small(small),
                Err(_) => CoeffWire::Big(c.to_string()),
            })
            .collect();
        CycWire {
            level: self.level,
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclotomicInteger {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = CycWire::deserialize(deserializer)?;
        let coeffs: Vec<BigInt> = wire
            .coeffs
            .into_iter()
            .map(|c| match c {
                CoeffWire::Small(v) => Ok(BigInt::from(v)),
                CoeffWire::Big(text) => text
                    .parse::<BigInt>()
                    .map_err(|_| D::Error::custom(format!("bad coefficient `{text}`"))),
            })
            .collect::<std::result::Result<_, _>>()?;
        CyclotomicInteger::from_coeffs(wire.level, coeffs).map_err(D::Error::custom)
    }
}

/// Accumulator in the group ring `Z[x]/(x^L - 1)` used inside determinant
/// and permanent kernels when every matrix entry is a root of unity.
///
/// The quotient map onto `Z[zeta_L]` is a ring homomorphism, so sums and
/// products may be accumulated here (where multiplying by a root of unity
/// is a cyclic shift) as long as the result is reduced modulo Phi_L before
/// any zero test. `reduce` is the only exit.
#[derive(Debug, Clone)]
pub(crate) struct CycAccum {
    level: u64,
    coeffs: Vec<BigInt>,
}

impl CycAccum {
    pub fn zero(level: u64) -> Self {
        CycAccum {
            level,
            coeffs: vec![BigInt::zero(); level as usize],
        }
    }

    pub fn monomial(level: u64, exp: u64) -> Self {
        let mut out = CycAccum::zero(level);
        out.coeffs[(exp % level) as usize] = BigInt::one();
        out
    }

    /// self += sign * x^shift * other (cyclic shift).
    pub fn add_shifted(&mut self, other: &CycAccum, shift: u64, sign: i64) {
        let l = self.level as usize;
        let s = (shift % self.level) as usize;
        for (i, c) in other.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = (i + s) % l;
            if sign >= 0 {
                self.coeffs[idx] += c;
            } else {
                self.coeffs[idx] -= c;
            }
        }
    }

    /// self += sign * x^shift (single monomial).
    pub fn add_monomial(&mut self, shift: u64, sign: i64) {
        let idx = (shift % self.level) as usize;
        if sign >= 0 {
            self.coeffs[idx] += 1;
        } else {
            self.coeffs[idx] -= 1;
        }
    }

    /// Cyclic convolution, iterating over the nonzeros of `other`.
    pub fn mul(&self, other: &CycAccum) -> CycAccum {
        let mut out = CycAccum::zero(self.level);
        let l = self.level as usize;
        for (j, c) in other.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, a) in self.coeffs.iter().enumerate() {
                if !a.is_zero() {
                    out.coeffs[(i + j) % l] += a * c;
                }
            }
        }
        out
    }

    /// Maps into the cyclotomic quotient; only reduced values are compared
    /// or zero-tested.
    pub fn reduce(&self) -> Result<CyclotomicInteger> {
        CyclotomicInteger::from_coeffs(self.level, self.coeffs.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn caps() -> Caps {
        Caps::default()
    }

    fn coeff_vec(poly: &[BigInt]) -> Vec<i64> {
        poly.iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(coeff_vec(&cyclotomic_poly(1, &caps()).unwrap()), [-1, 1]);
        assert_eq!(coeff_vec(&cyclotomic_poly(2, &caps()).unwrap()), [1, 1]);
        assert_eq!(coeff_vec(&cyclotomic_poly(3, &caps()).unwrap()), [1, 1, 1]);
        assert_eq!(coeff_vec(&cyclotomic_poly(6, &caps()).unwrap()), [1, -1, 1]);
        // Frozen: Phi_12 = x^4 - x^2 + 1.
        assert_eq!(
            coeff_vec(&cyclotomic_poly(12, &caps()).unwrap()),
            [1, 0, -1, 0, 1]
        );
        assert_eq!(cyclotomic_poly(35, &caps()).unwrap().len(), 25);
    }

    #[test]
    fn phi_105_has_coefficient_minus_two() {
        // Smallest level with a coefficient outside {-1, 0, 1}.
        let poly = cyclotomic_poly(105, &caps()).unwrap();
        assert_eq!(i64::try_from(&poly[7]).unwrap(), -2);
        assert_eq!(poly.len() as u64, euler_phi(105) + 1);
    }

    #[test]
    fn product_over_divisors_recovers_x_pow_l_minus_one() {
        // Independent oracle for the recursive division.
        for level in [1u64, 2, 6, 12, 20, 30, 36] {
            let mut prod = vec![BigInt::one()];
            for d in divisors(level) {
                let phi_d = cyclotomic_poly(d, &caps()).unwrap();
                let mut next = vec![BigInt::zero(); prod.len() + phi_d.len() - 1];
                for (i, a) in prod.iter().enumerate() {
                    for (j, b) in phi_d.iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                prod = next;
            }
            let mut expected = vec![BigInt::zero(); level as usize + 1];
            expected[0] = -BigInt::one();
            expected[level as usize] = BigInt::one();
            assert_eq!(prod, expected, "level {level}");
        }
    }

    #[test]
    fn level_cap_refuses() {
        let mut caps = caps();
        caps.cyclotomic_level = 10;
        assert!(matches!(
            cyclotomic_poly(11, &caps),
            Err(Error::CapExceeded(_))
        ));
        assert!(cyclotomic_poly(0, &Caps::default()).is_err());
    }

    #[test]
    fn roots_of_unity_multiply_by_exponent_addition() {
        let a = CyclotomicInteger::root_of_unity(5, 2).unwrap();
        let b = CyclotomicInteger::root_of_unity(5, 3).unwrap();
        assert_eq!(a.mul(&b).unwrap(), CyclotomicInteger::one(5).unwrap());
        for level in 2..=16u64 {
            for e in 0..level {
                for f in 0..level {
                    let lhs = CyclotomicInteger::root_of_unity(level, e)
                        .unwrap()
                        .mul(&CyclotomicInteger::root_of_unity(level, f).unwrap())
                        .unwrap();
                    let rhs = CyclotomicInteger::root_of_unity(level, e + f).unwrap();
                    assert_eq!(lhs, rhs, "level {level}: {e}+{f}");
                }
            }
        }
    }

    #[test]
    fn full_root_sums_vanish() {
        // Sum over all L-th roots of unity is 0 for every L in 2..=24.
        for level in 2..=24u64 {
            let mut sum = CyclotomicInteger::zero(level).unwrap();
            for e in 0..level {
                sum = sum
                    .add(&CyclotomicInteger::root_of_unity(level, e).unwrap())
                    .unwrap();
            }
            assert!(sum.is_zero(), "level {level}: {sum}");
        }
    }

    #[test]
    fn embedded_cube_roots_sum_to_exact_zero() {
        // 1 + zeta_12^4 + zeta_12^8 = 1 + zeta_3 + zeta_3^2 = 0; this dies
        // only after reduction mod Phi_12, not mod x^12 - 1.
        let mut sum = CyclotomicInteger::one(12).unwrap();
        for e in [4u64, 8] {
            sum = sum
                .add(&CyclotomicInteger::root_of_unity(12, e).unwrap())
                .unwrap();
        }
        assert!(sum.is_zero());
    }

    #[test]
    fn level_one_is_plain_integers() {
        let a = CyclotomicInteger::from_integer(1, BigInt::from(6)).unwrap();
        let b = CyclotomicInteger::from_integer(1, BigInt::from(-4)).unwrap();
        assert_eq!(a.mul(&b).unwrap().as_integer().unwrap(), BigInt::from(-24));
        assert_eq!(a.add(&b).unwrap().as_integer().unwrap(), BigInt::from(2));
    }

    #[test]
    fn level_mismatch_is_an_error() {
        let a = CyclotomicInteger::one(3).unwrap();
        let b = CyclotomicInteger::one(4).unwrap();
        assert!(a.add(&b).is_err());
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn serde_round_trip_small_and_big() {
        let a = CyclotomicInteger::from_coeffs(
            12,
            vec![BigInt::from(3), BigInt::from(-1), BigInt::zero(), BigInt::from(7)],
        )
        .unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"level":12,"coeffs":[3,-1,0,7]}"#);
        let back: CyclotomicInteger = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);

        let huge: BigInt = "123456789012345678901234567890".parse().unwrap();
        let b = CyclotomicInteger::from_integer(3, huge.clone()).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        assert!(json.contains("\"123456789012345678901234567890\""));
        let back: CyclotomicInteger = serde_json::from_str(&json).unwrap();
        assert_eq!(back.as_integer().unwrap(), huge);
    }

    #[test]
    fn accumulator_matches_direct_arithmetic() {
        // Products of random root sums, computed in the accumulator and in
        // the reduced ring, agree after reduction.
        let level = 12u64;
        let seeds: Vec<Vec<u64>> = vec![vec![0, 4, 7], vec![1, 1, 5], vec![2, 3, 11, 11]];
        for exps_a in &seeds {
            for exps_b in &seeds {
                let mut acc_a = CycAccum::zero(level);
                let mut acc_b = CycAccum::zero(level);
                let mut cyc_a = CyclotomicInteger::zero(level).unwrap();
                let mut cyc_b = CyclotomicInteger::zero(level).unwrap();
                for &e in exps_a {
                    acc_a.add_monomial(e, 1);
                    cyc_a = cyc_a
                        .add(&CyclotomicInteger::root_of_unity(level, e).unwrap())
                        .unwrap();
                }
                for &e in exps_b {
                    acc_b.add_monomial(e, 1);
                    cyc_b = cyc_b
                        .add(&CyclotomicInteger::root_of_unity(level, e).unwrap())
                        .unwrap();
                }
                assert_eq!(acc_a.mul(&acc_b).reduce().unwrap(), cyc_a.mul(&cyc_b).unwrap());
                let mut shifted = CycAccum::zero(level);
                shifted.add_shifted(&acc_a, 5, -1);
                let expected = cyc_a
                    .mul(&CyclotomicInteger::root_of_unity(level, 5).unwrap())
                    .unwrap()
                    .neg();
                assert_eq!(shifted.reduce().unwrap(), expected);
            }
        }
    }

    #[test]
    fn float_embedding_cross_check() {
        // Numeric oracle: evaluate at exp(2 pi i / L) and compare products.
        fn to_complex(v: &CyclotomicInteger) -> (f64, f64) {
            let l = v.level() as f64;
            let mut re = 0.0;
            let mut im = 0.0;
            for (i, c) in v.coeffs().iter().enumerate() {
                let c = i64::try_from(c).unwrap() as f64;
                let theta = 2.0 * std::f64::consts::PI * (i as f64) / l;
                re += c * theta.cos();
                im += c * theta.sin();
            }
            (re, im)
        }
        for level in [5u64, 8, 12, 35] {
            for e in [1u64, 2, 3] {
                for f in [1u64, 4, 6] {
                    let a = CyclotomicInteger::root_of_unity(level, e).unwrap();
                    let b = CyclotomicInteger::root_of_unity(level, f).unwrap();
                    let prod = a.mul(&b).unwrap();
                    let (ar, ai) = to_complex(&a);
                    let (br, bi) = to_complex(&b);
                    let (pr, pi) = to_complex(&prod);
                    assert!((ar * br - ai * bi - pr).abs() < 1e-9);
                    assert!((ar * bi + ai * br - pi).abs() < 1e-9);
                }
            }
        }
    }

    fn arb_value(level: u64) -> impl Strategy<Value = CyclotomicInteger> {
        let phi = euler_phi(level) as usize;
        proptest::collection::vec(-20i64..20, phi).prop_map(move |v| {
            CyclotomicInteger::from_coeffs(level, v.into_iter().map(BigInt::from).collect())
                .unwrap()
        })
    }

    fn arb_triple(
    ) -> impl Strategy<Value = (CyclotomicInteger, CyclotomicInteger, CyclotomicInteger)> {
        prop::sample::select(vec![2u64, 3, 4, 8, 12, 20, 35, 36])
            .prop_flat_map(|level| (arb_value(level), arb_value(level), arb_value(level)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms_randomized((a, b, c) in arb_triple()) {
            let level = a.level();

            // Additive group.
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            prop_assert!(a.add(&a.neg()).unwrap().is_zero());
            // Multiplicative monoid and distributivity.
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            let one = CyclotomicInteger::one(level).unwrap();
            prop_assert_eq!(a.mul(&one).unwrap(), a.clone());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
        }
    }
}
