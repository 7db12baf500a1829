//! Finite fields `F_{q^d}` carrying an element of prescribed
//! multiplicative order.
//!
//! Construction is fully deterministic: the modulus is the first monic
//! irreducible polynomial in counting order, the generator is the first
//! field element certified to have full multiplicative order, and the
//! distinguished root is a fixed power of that generator. Reports can
//! therefore cite the exact field and root used.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::prime_factorization;
use crate::rings::cyclotomic::CyclotomicInteger;

/// Element of a finite field, as its coefficient vector of length d over
/// the prime field (little-endian in the modulus quotient basis).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteFieldElement {
    coeffs: Vec<u64>,
}

impl FiniteFieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

/// Which extension degree `field_with_order` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeChoice {
    /// The minimal degree: the multiplicative order of q mod m.
    Minimal,
    /// Degree phi(m), a deliberately redundant extension kept for
    /// fidelity comparisons; the order-m root exists there too.
    EulerPhi,
}

/// A concrete `F_{q^d}` together with a distinguished element `omega` of
/// exact multiplicative order `omega_order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FieldWire")]
pub struct FieldSpec {
    q: u64,
    d: u32,
    /// Full monic modulus, little-endian, length d + 1, leading 1.
    modulus: Vec<u64>,
    omega: FiniteFieldElement,
    omega_order: u64,
}

#[derive(Deserialize)]
struct FieldWire {
    q: u64,
    d: u32,
    modulus: Vec<u64>,
    omega: FiniteFieldElement,
    omega_order: u64,
}

impl TryFrom<FieldWire> for FieldSpec {
    type Error = Error;

    /// Deserialized specs are re-certified from scratch: primality,
    /// irreducibility, and the exact order of omega.
    fn try_from(wire: FieldWire) -> Result<FieldSpec> {
        if !is_prime(wire.q) {
            return Err(Error::Backend(format!("{} is not prime", wire.q)));
        }
        if wire.d == 0 || wire.modulus.len() != wire.d as usize + 1 {
            return Err(Error::Backend("modulus length does not match degree".into()));
        }
        if wire.modulus[wire.d as usize] != 1 {
            return Err(Error::Backend("modulus is not monic".into()));
        }
        if wire.modulus.iter().any(|&c| c >= wire.q) {
            return Err(Error::Backend("modulus coefficient out of range".into()));
        }
        if !poly_is_irreducible(wire.q, &wire.modulus) {
            return Err(Error::Backend("modulus is reducible".into()));
        }
        let spec = FieldSpec {
            q: wire.q,
            d: wire.d,
            modulus: wire.modulus,
            omega: FiniteFieldElement { coeffs: vec![] },
            omega_order: wire.omega_order,
        };
        let omega = spec.element(wire.omega.coeffs.clone())?;
        spec.certify_order(&omega, wire.omega_order)?;
        Ok(FieldSpec { omega, ..spec })
    }
}

impl FieldSpec {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn omega(&self) -> &FiniteFieldElement {
        &self.omega
    }

    pub fn omega_order(&self) -> u64 {
        self.omega_order
    }

    /// q^d - 1, the multiplicative group order.
    pub fn unit_group_order(&self) -> u64 {
        pow_u128(self.q, self.d) as u64 - 1
    }

    pub fn characteristic_is_two(&self) -> bool {
        self.q == 2
    }

    pub fn zero(&self) -> FiniteFieldElement {
        FiniteFieldElement {
            coeffs: vec![0; self.d as usize],
        }
    }

    pub fn one(&self) -> FiniteFieldElement {
        let mut coeffs = vec![0; self.d as usize];
        coeffs[0] = 1;
        FiniteFieldElement { coeffs }
    }

    pub fn element(&self, coeffs: Vec<u64>) -> Result<FiniteFieldElement> {
        if coeffs.len() != self.d as usize {
            return Err(Error::Backend(format!(
                "element has {} coefficients, field degree is {}",
                coeffs.len(),
                self.d
            )));
        }
        if coeffs.iter().any(|&c| c >= self.q) {
            return Err(Error::Backend("element coefficient out of range".into()));
        }
        Ok(FiniteFieldElement { coeffs })
    }

    pub fn is_zero(&self, a: &FiniteFieldElement) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FiniteFieldElement, b: &FiniteFieldElement) -> FiniteFieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % self.q)
            .collect();
        FiniteFieldElement { coeffs }
    }

    pub fn neg(&self, a: &FiniteFieldElement) -> FiniteFieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| if x == 0 { 0 } else { self.q - x })
            .collect();
        FiniteFieldElement { coeffs }
    }

    pub fn sub(&self, a: &FiniteFieldElement, b: &FiniteFieldElement) -> FiniteFieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FiniteFieldElement, b: &FiniteFieldElement) -> FiniteFieldElement {
        let d = self.d as usize;
        let q = u128::from(self.q);
        let mut tmp = vec![0u128; 2 * d - 1];
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.coeffs.iter().enumerate() {
                if bj != 0 {
                    tmp[i + j] += u128::from(ai) * u128::from(bj);
                }
            }
        }
        // x^d = -(lower modulus coefficients), folded downward.
        for i in (d..tmp.len()).rev() {
            let c = tmp[i] % q;
            tmp[i] = 0;
            if c != 0 {
                for j in 0..d {
                    let m = self.modulus[j];
                    if m != 0 {
                        tmp[i - d + j] += c * (q - u128::from(m));
                    }
                }
            }
        }
        let coeffs = tmp[..d].iter().map(|&v| (v % q) as u64).collect();
        FiniteFieldElement { coeffs }
    }

    pub fn pow(&self, a: &FiniteFieldElement, mut e: u128) -> FiniteFieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// A root of unity of the given order: requires order | omega_order.
    pub fn root_of_order(&self, order: u64, exp: u64) -> Result<FiniteFieldElement> {
        if order == 0 || self.omega_order % order != 0 {
            return Err(Error::Backend(format!(
                "field root has order {}, not divisible by {order}",
                self.omega_order
            )));
        }
        let step = self.omega_order / order;
        Ok(self.pow(&self.omega, u128::from(step) * u128::from(exp % order)))
    }

    /// Certifies that a has exact multiplicative order n.
    fn certify_order(&self, a: &FiniteFieldElement, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::Backend("order must be positive".into()));
        }
        if self.pow(a, u128::from(n)) != self.one() {
            return Err(Error::Backend(format!("element order does not divide {n}")));
        }
        for (&p, _) in prime_factorization(n).iter() {
            if self.pow(a, u128::from(n / p)) == self.one() {
                return Err(Error::Backend(format!(
                    "element order divides {} strictly",
                    n / p
                )));
            }
        }
        Ok(())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_u128(base: u64, exp: u32) -> u128 {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc *= u128::from(base);
    }
    acc
}

/// Multiplicative order of q modulo m (gcd(q, m) = 1, m >= 2).
fn order_mod(q: u64, m: u64) -> Result<u32> {
    if m < 2 {
        return Err(Error::Domain("order_mod needs modulus >= 2".into()));
    }
    if q.gcd(&m) != 1 {
        return Err(Error::Domain(format!("{q} shares a factor with {m}")));
    }
    let mut acc = q % m;
    let mut d = 1u32;
    while acc != 1 {
        acc = acc * (q % m) % m;
        d += 1;
    }
    Ok(d)
}

/// Remainder of little-endian polynomial `num` by monic `den` over F_q.
fn poly_rem(q: u64, num: &[u64], den: &[u64]) -> Vec<u64> {
    let mut rem: Vec<u64> = num.to_vec();
    let dd = den.len() - 1;
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c != 0 {
            rem[i] = 0;
            for j in 0..dd {
                let sub = c as u128 * den[j] as u128 % q as u128;
                let cur = rem[i - dd + j] as u128;
                rem[i - dd + j] = ((cur + q as u128 - sub) % q as u128) as u64;
            }
        }
    }
    rem.truncate(dd);
    rem
}

/// Irreducibility over F_q by exhaustive trial division: no monic divisor
/// of degree between 1 and d/2 divides the polynomial.
fn poly_is_irreducible(q: u64, poly: &[u64]) -> bool {
    let d = poly.len() - 1;
    if d == 1 {
        return true;
    }
    for e in 1..=d / 2 {
        let count = pow_u128(q, e as u32);
        for v in 0..count {
            let mut den = index_digits(q, v, e);
            den.push(1);
            if poly_rem(q, poly, &den).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Base-q digits of v, least significant first, padded to `len`.
fn index_digits(q: u64, mut v: u128, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    for slot in out.iter_mut() {
        *slot = (v % u128::from(q)) as u64;
        v /= u128::from(q);
    }
    out
}

fn field_cache() -> &'static Mutex<HashMap<(u64, u64, bool), Arc<FieldSpec>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, bool), Arc<FieldSpec>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Builds the deterministic field `F_{q^d}` with an element of exact
/// multiplicative order m.
///
/// q is the preferred characteristic when given (it must be prime and must
/// not divide m), otherwise 2 when possible and the smallest prime not
/// dividing m when not. The degree is minimal by default; `EulerPhi`
/// selects the redundant phi(m) extension instead.
pub fn field_with_order(
    m: u64,
    preferred_char: Option<u64>,
    degree: DegreeChoice,
    caps: &Caps,
) -> Result<Arc<FieldSpec>> {
    if m == 0 {
        return Err(Error::Domain("root order m must be positive".into()));
    }
    let q = match preferred_char {
        Some(q) => {
            if !is_prime(q) {
                return Err(Error::Domain(format!("preferred characteristic {q} is not prime")));
            }
            if m % q == 0 {
                return Err(Error::Domain(format!(
                    "characteristic {q} divides root order {m}, no such field exists"
                )));
            }
            q
        }
        None => {
            if m % 2 != 0 {
                2
            } else {
                let mut p = 3u64;
                loop {
                    if is_prime(p) && m % p != 0 {
                        break p;
                    }
                    p += 2;
                }
            }
        }
    };
    let d = if m == 1 {
        1
    } else {
        match degree {
            DegreeChoice::Minimal => order_mod(q, m)?,
            DegreeChoice::EulerPhi => crate::rings::cyclotomic::euler_phi(m) as u32,
        }
    };
    // The cap is policy, not cost, so it applies before the cache: whether
    // a spec was built earlier must not change what gets refused.
    let bits_per_digit = 64 - (q - 1).leading_zeros();
    let total_bits = d * bits_per_digit;
    if total_bits > caps.field_bits || total_bits > 63 {
        return Err(Error::CapExceeded(format!(
            "field F_{{{q}^{d}}} needs {total_bits} bits, cap is {}",
            caps.field_bits.min(63)
        )));
    }
    let key = (m, q, matches!(degree, DegreeChoice::EulerPhi));
    if let Some(hit) = field_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }

    // First irreducible monic modulus in counting order.
    let count = pow_u128(q, d);
    let modulus = (0..count)
        .map(|v| {
            let mut poly = index_digits(q, v, d as usize);
            poly.push(1);
            poly
        })
        .find(|poly| poly_is_irreducible(q, poly))
        .ok_or_else(|| Error::Internal(format!("no irreducible of degree {d} over F_{q}")))?;

    let mut spec = FieldSpec {
        q,
        d,
        modulus,
        omega: FiniteFieldElement {
            coeffs: vec![0; d as usize],
        },
        omega_order: m,
    };

    let n = spec.unit_group_order();
    if n % m != 0 {
        return Err(Error::Internal(format!(
            "{m} does not divide the unit group order {n}"
        )));
    }
    // First generator in counting order, certified against every maximal
    // proper divisor of the unit group order.
    let generator = (1..=u128::from(n))
        .map(|v| FiniteFieldElement {
            coeffs: index_digits(q, v, d as usize),
        })
        .find(|g| spec.certify_order(g, n).is_ok())
        .ok_or_else(|| Error::Internal("no generator found".into()))?;

    let omega = spec.pow(&generator, u128::from(n / m));
    spec.certify_order(&omega, m)?;
    spec.omega = omega;

    let arc = Arc::new(spec);
    field_cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| arc.clone());
    Ok(arc)
}

/// The ring homomorphism `Z[zeta_L] -> F_{q^d}` sending zeta_L to omega;
/// it requires omega to have exact order L. A nonzero image certifies the
/// source is nonzero (the converse can fail).
pub fn cyc_to_field(a: &CyclotomicInteger, field: &FieldSpec) -> Result<FiniteFieldElement> {
    if field.omega_order() != a.level() {
        return Err(Error::Backend(format!(
            "field root has order {}, value has level {}",
            field.omega_order(),
            a.level()
        )));
    }
    let q = BigInt::from(field.q());
    let mut acc = field.zero();
    let mut power = field.one();
    for (i, c) in a.coeffs().iter().enumerate() {
        if i > 0 {
            power = field.mul(&power, &field.omega);
        }
        let c = c.mod_floor(&q);
        let c: u64 = c.try_into().map_err(|_| Error::Internal("mod out of range".into()))?;
        if c != 0 {
            let mut scaled = field.zero();
            // Scalar multiple via repeated doubling on the coefficient.
            let mut bit = c;
            let mut base = power.clone();
            while bit > 0 {
                if bit & 1 == 1 {
                    scaled = field.add(&scaled, &base);
                }
                bit >>= 1;
                if bit > 0 {
                    base = field.add(&base, &base);
                }
            }
            acc = field.add(&acc, &scaled);
        }
    }
    Ok(acc)
}
