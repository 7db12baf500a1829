//! Exact coefficient rings for character arithmetic.
//!
//! Two interchangeable backends share one value interface: cyclotomic
//! integers `Z[zeta_L]` (standing in for the complex field) and finite
//! fields `F_{q^d}` carrying an element of prescribed multiplicative
//! order. Zero tests are exact in both.

pub mod backend;
pub mod cyclotomic;
pub mod field;

pub use backend::{Backend, RingValue, RingValueWire};
pub use cyclotomic::{cyclotomic_poly, euler_phi, CyclotomicInteger};
pub use field::{cyc_to_field, field_with_order, DegreeChoice, FieldSpec, FiniteFieldElement};

use crate::error::{Error, Result};
use crate::group::prime_factorization;

/// Whether a sum of `total` roots of unity of order dividing n can vanish:
/// true exactly when `total` is a nonnegative integer combination of the
/// prime divisors of n.
///
/// Feasibility is necessary for a vanishing sum, so `false` certifies that
/// every sum of `total` such roots is nonzero.
pub fn vanishing_sum_feasible(n: u64, total: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::Domain("root order n must be positive".into()));
    }
    const TOTAL_CAP: u64 = 100_000_000;
    if total > TOTAL_CAP {
        return Err(Error::CapExceeded(format!(
            "total {total} exceeds feasibility cap {TOTAL_CAP}"
        )));
    }
    let total = total as usize;
    let primes: Vec<usize> = prime_factorization(n)
        .into_keys()
        .map(|p| p as usize)
        .collect();
    let mut reachable = vec![false; total + 1];
    reachable[0] = true;
    for &p in &primes {
        for t in p..=total {
            if reachable[t - p] {
                reachable[t] = true;
            }
        }
    }
    Ok(reachable[total])
}
