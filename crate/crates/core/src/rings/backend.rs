//! The shared arithmetic backend for character sums.
//!
//! Every verifier works over a ring containing a root of unity whose
//! order is the exponent of the ambient group. The cyclotomic backend is
//! exact and complete: a value is zero there if and only if it is zero as
//! a complex number. The finite-field backend maps that root onto a
//! certified order-L field element; it is faster but one-sided, since a
//! nonzero complex value can reduce to zero in positive characteristic.
//! Nonzero transfers from the field back to the complex statement, zero
//! does not.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rings::cyclotomic::{cyclotomic_poly, CyclotomicInteger};
use crate::rings::field::{field_with_order, DegreeChoice, FieldSpec, FiniteFieldElement};

/// Where character sums are evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    /// Z[zeta_level], represented mod the cyclotomic polynomial.
    Cyclotomic { level: u64 },
    /// A finite field with a certified root of order `omega_order`.
    Field(Arc<FieldSpec>),
}

impl Backend {
    /// The exact backend at the given root order.
    pub fn cyclotomic(level: u64, caps: &Caps) -> Result<Backend> {
        // Warms the polynomial cache and enforces the level cap up front.
        cyclotomic_poly(level, caps)?;
        Ok(Backend::Cyclotomic { level })
    }

    /// A finite-field backend with a root of exact order `level`.
    pub fn field(
        level: u64,
        preferred_char: Option<u64>,
        degree: DegreeChoice,
        caps: &Caps,
    ) -> Result<Backend> {
        Ok(Backend::Field(field_with_order(
            level,
            preferred_char,
            degree,
            caps,
        )?))
    }

    /// The order of the distinguished root of unity.
    pub fn level(&self) -> u64 {
        match self {
            Backend::Cyclotomic { level } => *level,
            Backend::Field(f) => f.omega_order(),
        }
    }

    /// Whether the backend carries a root of unity of order n.
    pub fn contains_order(&self, n: u64) -> bool {
        n > 0 && self.level() % n == 0
    }

    /// True when zero in this backend proves zero as a complex number.
    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Cyclotomic { .. })
    }

    /// In characteristic 2 every sign vanishes, so a determinant and a
    /// permanent over the same matrix coincide.
    pub fn char_is_two(&self) -> bool {
        matches!(self, Backend::Field(f) if f.characteristic_is_two())
    }

    /// Human-readable summary recorded in reports.
    pub fn descriptor(&self) -> String {
        match self {
            Backend::Cyclotomic { level } => format!("cyclotomic(level {level})"),
            Backend::Field(f) => format!(
                "field(q {}, degree {}, root order {})",
                f.q(),
                f.degree(),
                f.omega_order()
            ),
        }
    }

    pub fn field_spec(&self) -> Option<&Arc<FieldSpec>> {
        match self {
            Backend::Cyclotomic { .. } => None,
            Backend::Field(f) => Some(f),
        }
    }

    pub fn zero(&self) -> RingValue {
        match self {
            Backend::Cyclotomic { level } => {
                RingValue::Cyc(CyclotomicInteger::zero(*level).expect("validated level"))
            }
            Backend::Field(f) => RingValue::Ff {
                field: f.clone(),
                elem: f.zero(),
            },
        }
    }

    pub fn one(&self) -> RingValue {
        match self {
            Backend::Cyclotomic { level } => {
                RingValue::Cyc(CyclotomicInteger::one(*level).expect("validated level"))
            }
            Backend::Field(f) => RingValue::Ff {
                field: f.clone(),
                elem: f.one(),
            },
        }
    }

    pub fn from_int(&self, v: i64) -> RingValue {
        match self {
            Backend::Cyclotomic { level } => RingValue::Cyc(
                CyclotomicInteger::from_integer(*level, BigInt::from(v)).expect("validated level"),
            ),
            Backend::Field(f) => {
                let r = v.rem_euclid(f.q() as i64) as u64;
                let mut elem = f.zero();
                let one = f.one();
                for _ in 0..r {
                    elem = f.add(&elem, &one);
                }
                RingValue::Ff {
                    field: f.clone(),
                    elem,
                }
            }
        }
    }

    /// zeta^exp for the backend's full-order root zeta.
    pub fn root(&self, exp: u64) -> RingValue {
        match self {
            Backend::Cyclotomic { level } => RingValue::Cyc(
                CyclotomicInteger::root_of_unity(*level, exp).expect("validated level"),
            ),
            Backend::Field(f) => RingValue::Ff {
                field: f.clone(),
                elem: f
                    .root_of_order(f.omega_order(), exp)
                    .expect("own order always divides"),
            },
        }
    }

    /// A root of unity of the given order; the order must divide the level.
    pub fn root_of_order(&self, order: u64, exp: u64) -> Result<RingValue> {
        if !self.contains_order(order) {
            return Err(Error::Backend(format!(
                "backend level {} has no root of order {order}",
                self.level()
            )));
        }
        Ok(self.root(self.level() / order * (exp % order)))
    }
}

/// A value in whichever ring the backend selected.
///
/// Arithmetic between values of different backends is a programming
/// error, not a user condition, and panics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingValue {
    Cyc(CyclotomicInteger),
    Ff {
        field: Arc<FieldSpec>,
        elem: FiniteFieldElement,
    },
}

impl RingValue {
    pub fn is_zero(&self) -> bool {
        match self {
            RingValue::Cyc(c) => c.is_zero(),
            RingValue::Ff { field, elem } => field.is_zero(elem),
        }
    }

    pub fn add(&self, other: &RingValue) -> RingValue {
        match (self, other) {
            (RingValue::Cyc(a), RingValue::Cyc(b)) => {
                RingValue::Cyc(a.add(b).expect("level mismatch in ring value addition"))
            }
            (RingValue::Ff { field, elem: a }, RingValue::Ff { field: f2, elem: b }) => {
                assert_eq!(field, f2, "field mismatch in ring value addition");
                RingValue::Ff {
                    field: field.clone(),
                    elem: field.add(a, b),
                }
            }
            _ => panic!("cannot add values from different backends"),
        }
    }

    pub fn sub(&self, other: &RingValue) -> RingValue {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingValue) -> RingValue {
        match (self, other) {
            (RingValue::Cyc(a), RingValue::Cyc(b)) => {
                RingValue::Cyc(a.mul(b).expect("level mismatch in ring value product"))
            }
            (RingValue::Ff { field, elem: a }, RingValue::Ff { field: f2, elem: b }) => {
                assert_eq!(field, f2, "field mismatch in ring value product");
                RingValue::Ff {
                    field: field.clone(),
                    elem: field.mul(a, b),
                }
            }
            _ => panic!("cannot multiply values from different backends"),
        }
    }

    pub fn neg(&self) -> RingValue {
        match self {
            RingValue::Cyc(c) => RingValue::Cyc(c.neg()),
            RingValue::Ff { field, elem } => RingValue::Ff {
                field: field.clone(),
                elem: field.neg(elem),
            },
        }
    }

    /// The wire form used in serialized reports.
    pub fn to_wire(&self) -> RingValueWire {
        match self {
            RingValue::Cyc(c) => RingValueWire::Cyclotomic(c.clone()),
            RingValue::Ff { field, elem } => RingValueWire::Field(FieldValueWire {
                q: field.q(),
                degree: field.degree(),
                coeffs: elem.coeffs().to_vec(),
            }),
        }
    }
}

impl Serialize for RingValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

/// Parse-side image of a serialized ring value.
///
/// Cyclotomic payloads re-validate on deserialize; field payloads keep
/// only the identifying shape and are compared against a recomputed
/// value via [`RingValueWire::matches`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "ring", rename_all = "snake_case")]
pub enum RingValueWire {
    Cyclotomic(CyclotomicInteger),
    Field(FieldValueWire),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldValueWire {
    pub q: u64,
    pub degree: u32,
    pub coeffs: Vec<u64>,
}

impl RingValueWire {
    /// Whether this wire value denotes the given freshly computed value.
    pub fn matches(&self, value: &RingValue) -> bool {
        *self == value.to_wire()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RingValueWire::Cyclotomic(c) => c.is_zero(),
            RingValueWire::Field(f) => f.coeffs.iter().all(|&c| c == 0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    fn backends() -> Vec<Backend> {
        vec![
            Backend::cyclotomic(12, &caps()).unwrap(),
            Backend::field(12, None, DegreeChoice::Minimal, &caps()).unwrap(),
        ]
    }

    #[test]
    fn roots_multiply_by_adding_exponents() {
        for b in backends() {
            for i in 0..12 {
                for j in 0..12 {
                    let prod = b.root(i).mul(&b.root(j));
                    assert_eq!(prod, b.root((i + j) % 12), "backend {}", b.descriptor());
                }
            }
            assert_eq!(b.root(0), b.one());
        }
    }

    #[test]
    fn from_int_respects_ring_ops() {
        for b in backends() {
            let five = b.from_int(2).add(&b.from_int(3));
            assert_eq!(five, b.from_int(5));
            let prod = b.from_int(-2).mul(&b.from_int(3));
            assert_eq!(prod, b.from_int(-6));
            assert!(b.from_int(0).is_zero());
        }
    }

    #[test]
    fn root_of_order_checks_divisibility() {
        let b = Backend::cyclotomic(12, &caps()).unwrap();
        let r = b.root_of_order(4, 1).unwrap();
        // An order-4 root inside level 12 is zeta_12^3.
        assert_eq!(r, b.root(3));
        assert!(b.root_of_order(5, 1).is_err());
        assert!(b.contains_order(6));
        assert!(!b.contains_order(7));
    }

    #[test]
    fn exactness_and_characteristic_flags() {
        let cyc = Backend::cyclotomic(5, &caps()).unwrap();
        assert!(cyc.is_exact());
        assert!(!cyc.char_is_two());
        let ff = Backend::field(5, Some(2), DegreeChoice::Minimal, &caps()).unwrap();
        assert!(!ff.is_exact());
        assert!(ff.char_is_two());
        assert_eq!(ff.level(), 5);
        let ff3 = Backend::field(5, Some(3), DegreeChoice::Minimal, &caps()).unwrap();
        assert!(!ff3.char_is_two());
    }

    #[test]
    #[should_panic(expected = "different backends")]
    fn mixing_backends_panics() {
        let cyc = Backend::cyclotomic(5, &caps()).unwrap();
        let ff = Backend::field(5, Some(2), DegreeChoice::Minimal, &caps()).unwrap();
        let _ = cyc.one().add(&ff.one());
    }

    #[test]
    fn serialized_shape_is_stable() {
        let cyc = Backend::cyclotomic(4, &caps()).unwrap();
        let json = serde_json::to_string(&cyc.one()).unwrap();
        assert_eq!(json, r#"{"ring":"cyclotomic","level":4,"coeffs":[1,0]}"#);
        let ff = Backend::field(5, Some(2), DegreeChoice::Minimal, &caps()).unwrap();
        let json = serde_json::to_string(&ff.root(1)).unwrap();
        assert_eq!(
            json,
            r#"{"ring":"field","q":2,"degree":4,"coeffs":[0,0,0,1]}"#
        );
    }

    #[test]
    fn wire_round_trip_matches() {
        for b in backends() {
            for v in [b.root(7), b.from_int(-3), b.zero()] {
                let json = serde_json::to_string(&v).unwrap();
                let wire: RingValueWire = serde_json::from_str(&json).unwrap();
                assert!(wire.matches(&v));
                assert_eq!(wire.is_zero(), v.is_zero());
            }
            let tampered: RingValueWire =
                serde_json::from_str(&serde_json::to_string(&b.one()).unwrap()).unwrap();
            assert!(!tampered.matches(&b.root(1)));
        }
    }
}
