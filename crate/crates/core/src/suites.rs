//! Seeded identity suites: countable pass/fail sweeps over the library's
//! central algebraic identities, shared by the command-line front end and
//! the acceptance harness.
//!
//! Every suite draws its instances from one ChaCha stream, so a (seed,
//! trials) pair names a reproducible workload.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::chars::{CharacterMatrix, CharacterSet};
use crate::error::{Error, Result};
use crate::exterior::{ExteriorAlgebra, MultiVector};
use crate::group::{smallest_prime_divisor, GroupElement, GroupSpec};
use crate::rings::{cyc_to_field, Backend, DegreeChoice, RingValue};
use crate::verify::campaign::{factorizations, sample_arbitrary, sample_distinct};
use crate::verify::{verify, Instance, Outcome, VerifyOptions};

/// One suite's aggregate result.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: String,
    pub total: u64,
    pub failures: u64,
    pub millis: u128,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl std::fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "suite {}: {}/{} checks passed in {} ms ({})",
            self.name,
            self.total - self.failures,
            self.total,
            self.millis,
            if self.passed() { "ok" } else { "FAILED" }
        )
    }
}

/// Every direct-product presentation with order in 2..=max_order.
fn presentations_up_to(max_order: u64) -> Result<Vec<GroupSpec>> {
    let mut out = Vec::new();
    for order in 2..=max_order {
        for factors in factorizations(order) {
            let text: Vec<String> = factors.iter().map(|f| format!("c{f}")).collect();
            out.push(GroupSpec::parse(&text.join("x"))?);
        }
    }
    Ok(out)
}

/// (-1)^(k(k-1)/2) in the backend.
fn half_turn_sign(backend: &Backend, k: usize) -> RingValue {
    if (k * (k - 1) / 2) % 2 == 1 {
        backend.one().neg()
    } else {
        backend.one()
    }
}

/// Exact equality against a pure scalar.
fn equals_scalar(alg: &ExteriorAlgebra, v: &MultiVector, want: &RingValue) -> bool {
    v.sub(&alg.scalar(want.clone())).is_zero()
}

fn wedge_of(alg: &ExteriorAlgebra, elems: &[GroupElement]) -> Result<MultiVector> {
    let mut acc = alg.scalar(alg.backend().one());
    for g in elems {
        acc = alg.wedge(&acc, &alg.basis_vector(g)?);
    }
    Ok(acc)
}

/// Composed skew derivations on a k-blade equal the signed determinant of
/// the character matrix: 200 seeded draws of (group, k, elements,
/// characters) per default run.
pub fn lemma21(seed: u64, trials: u64, caps: &Caps) -> Result<SuiteOutcome> {
    let start = Instant::now();
    let groups = presentations_up_to(12)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let group = groups[rng.gen_range(0..groups.len())].clone();
        let k = rng.gen_range(1..=4.min(group.order() as usize));
        let backend = Backend::cyclotomic(group.exponent(), caps)?;
        let alg = ExteriorAlgebra::new(&group, &backend, caps)?;
        let elems = group.enumerate(caps)?;
        let x = sample_distinct(&elems, k, &mut rng);
        let chars = CharacterSet::full(&group).random_tuple(&mut rng, k);
        let lhs = alg.compose_delta(&chars, &wedge_of(&alg, &x)?)?;
        let det = CharacterMatrix::from_characters(&chars, &x)?.det(&backend)?;
        let rhs = half_turn_sign(&backend, k).mul(&det);
        if !equals_scalar(&alg, &lhs, &rhs) {
            failures += 1;
        }
    }
    Ok(SuiteOutcome {
        name: "lemma21".into(),
        total: trials,
        failures,
        millis: start.elapsed().as_millis(),
    })
}

/// The master identity: composing the derivations against the full
/// permutation sum yields the signed product det(M_a) per(M_b).
pub fn eq22(seed: u64, trials: u64, caps: &Caps) -> Result<SuiteOutcome> {
    let start = Instant::now();
    let groups = presentations_up_to(12)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let group = groups[rng.gen_range(0..groups.len())].clone();
        let k = rng.gen_range(1..=4.min(group.order() as usize));
        let backend = Backend::cyclotomic(group.exponent(), caps)?;
        let alg = ExteriorAlgebra::new(&group, &backend, caps)?;
        let elems = group.enumerate(caps)?;
        let a = sample_distinct(&elems, k, &mut rng);
        let b = sample_arbitrary(&elems, k, &mut rng);
        let chars = CharacterSet::full(&group).random_tuple(&mut rng, k);
        let lhs = alg.compose_delta(&chars, &alg.permutation_sum(&a, &b)?)?;
        let det_a = CharacterMatrix::from_characters(&chars, &a)?.det(&backend)?;
        let per_b = CharacterMatrix::from_characters(&chars, &b)?.per(&backend)?;
        let rhs = half_turn_sign(&backend, k).mul(&det_a).mul(&per_b);
        if !equals_scalar(&alg, &lhs, &rhs) {
            failures += 1;
        }
    }
    Ok(SuiteOutcome {
        name: "eq22".into(),
        total: trials,
        failures,
        millis: start.elapsed().as_millis(),
    })
}

/// The multi-set variant: the signed multi-permutation sum composes to
/// the signed product of the m determinants, odd m, cyclic groups.
pub fn thm19(seed: u64, trials: u64, caps: &Caps) -> Result<SuiteOutcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let order = rng.gen_range(2..=9u64);
        let group = GroupSpec::parse(&format!("c{order}"))?;
        let k = rng.gen_range(1..=3.min(order as usize));
        let m = if rng.gen_range(0..2) == 0 { 3 } else { 5 };
        let backend = Backend::cyclotomic(group.exponent(), caps)?;
        let alg = ExteriorAlgebra::new(&group, &backend, caps)?;
        let elems = group.enumerate(caps)?;
        let rows: Vec<Vec<GroupElement>> = (0..m)
            .map(|_| sample_distinct(&elems, k, &mut rng))
            .collect();
        let chars = CharacterSet::full(&group).random_tuple(&mut rng, k);
        let lhs = alg.compose_delta(&chars, &alg.multi_permutation_sum(&rows, caps)?)?;
        let mut rhs = half_turn_sign(&backend, k);
        for row in &rows {
            rhs = rhs.mul(&CharacterMatrix::from_characters(&chars, row)?.det(&backend)?);
        }
        if !equals_scalar(&alg, &lhs, &rhs) {
            failures += 1;
        }
    }
    Ok(SuiteOutcome {
        name: "thm19".into(),
        total: trials,
        failures,
        millis: start.elapsed().as_millis(),
    })
}

/// Runs the prime-level minor check for every prime up to max_p.
pub fn chebotarev(max_p: u64, seed: u64, caps: &Caps) -> Result<SuiteOutcome> {
    let start = Instant::now();
    let mut total = 0;
    let mut failures = 0;
    for p in 2..=max_p {
        if smallest_prime_divisor(p)? != p {
            continue;
        }
        total += 1;
        let instance = Instance::chebotarev(p)?;
        let opts = VerifyOptions {
            seed,
            caps: caps.clone(),
            ..VerifyOptions::default()
        };
        match verify(&instance, &opts) {
            Ok(report) if report.outcome == Outcome::CertificateFound => {}
            _ => failures += 1,
        }
    }
    Ok(SuiteOutcome {
        name: "chebotarev".into(),
        total,
        failures,
        millis: start.elapsed().as_millis(),
    })
}

/// Backend cross-checks on random character matrices: division-free
/// determinant and permanent against the k! expansions in both backends,
/// permanent = determinant in characteristic 2, and the reduction
/// homomorphism commuting with the determinant.
pub fn rings(seed: u64, trials: u64, caps: &Caps) -> Result<SuiteOutcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let level = rng.gen_range(2..=12u64);
        let k = rng.gen_range(1..=5usize);
        let exps: Vec<Vec<u64>> = (0..k)
            .map(|_| (0..k).map(|_| rng.gen_range(0..level)).collect())
            .collect();
        let matrix = CharacterMatrix::new(level, exps)?;
        let cyc = Backend::cyclotomic(level, caps)?;
        let ff = Backend::field(level, None, DegreeChoice::Minimal, caps)?;
        let mut ok = true;
        let det_cyc = matrix.det(&cyc)?;
        ok &= det_cyc.sub(&matrix.det_naive(&cyc)?).is_zero();
        ok &= matrix.per(&cyc)?.sub(&matrix.per_naive(&cyc)?).is_zero();
        let det_ff = matrix.det(&ff)?;
        ok &= det_ff.sub(&matrix.det_naive(&ff)?).is_zero();
        ok &= matrix.per(&ff)?.sub(&matrix.per_naive(&ff)?).is_zero();
        match (&det_cyc, ff.field_spec()) {
            (RingValue::Cyc(c), Some(spec)) => {
                let mapped = RingValue::Ff {
                    field: spec.clone(),
                    elem: cyc_to_field(c, spec)?,
                };
                ok &= mapped.sub(&det_ff).is_zero();
            }
            _ => {
                return Err(Error::Internal(
                    "backend construction produced unexpected value kinds".into(),
                ))
            }
        }
        if level % 2 == 1 {
            let f2 = Backend::field(level, Some(2), DegreeChoice::Minimal, caps)?;
            ok &= matrix.per(&f2)?.sub(&matrix.det(&f2)?).is_zero();
        }
        if !ok {
            failures += 1;
        }
    }
    Ok(SuiteOutcome {
        name: "rings".into(),
        total: trials,
        failures,
        millis: start.elapsed().as_millis(),
    })
}

/// Runs a named suite with its conventional default sizes.
pub fn run_named(name: &str, seed: u64, trials: Option<u64>, max_p: Option<u64>, caps: &Caps) -> Result<SuiteOutcome> {
    match name {
        "lemma21" => lemma21(seed, trials.unwrap_or(200), caps),
        "eq22" => eq22(seed, trials.unwrap_or(200), caps),
        "thm19" => thm19(seed, trials.unwrap_or(200), caps),
        "chebotarev" => chebotarev(max_p.unwrap_or(7), seed, caps),
        "rings" => rings(seed, trials.unwrap_or(100), caps),
        other => Err(Error::Config(format!(
            "unknown suite {other}; expected lemma21, eq22, thm19, chebotarev, or rings"
        ))),
    }
}

/// Checks the product-identity equivalence over every b-assignment of the
/// group: a witness permutation exists exactly when the b-product is the
/// identity. Returns (assignments checked, violations).
pub fn hall_exhaustive(group: &GroupSpec, caps: &Caps) -> Result<(u64, u64)> {
    let elems = group.enumerate(caps)?;
    let n = elems.len();
    let total = (n as u64)
        .checked_pow(n as u32)
        .filter(|&t| t <= caps.exhaustive_tuples)
        .ok_or_else(|| {
            Error::CapExceeded(format!("{n}^{n} assignments exceed the exhaustive cap"))
        })?;
    let mut idx = vec![0usize; n];
    let mut checked = 0u64;
    let mut failures = 0u64;
    let opts = VerifyOptions {
        caps: caps.clone(),
        ..VerifyOptions::default()
    };
    'outer: loop {
        let b: Vec<GroupElement> = idx.iter().map(|&i| elems[i].clone()).collect();
        let instance = Instance::hall(group.clone(), b, caps)?;
        match verify(&instance, &opts) {
            Ok(report) if report.exit_code() == 0 => {}
            _ => failures += 1,
        }
        checked += 1;
        let mut pos = n;
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
    debug_assert_eq!(checked, total);
    Ok((checked, failures))
}

/// Seeded random b-assignments against the same equivalence.
pub fn hall_sampled(
    group: &GroupSpec,
    samples: u64,
    seed: u64,
    caps: &Caps,
) -> Result<(u64, u64)> {
    let elems = group.enumerate(caps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0u64;
    let opts = VerifyOptions {
        caps: caps.clone(),
        ..VerifyOptions::default()
    };
    for _ in 0..samples {
        let b = sample_arbitrary(&elems, elems.len(), &mut rng);
        let instance = Instance::hall(group.clone(), b, caps)?;
        match verify(&instance, &opts) {
            Ok(report) if report.exit_code() == 0 => {}
            _ => failures += 1,
        }
    }
    Ok((samples, failures))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_suites_pass_at_small_sizes() {
        let caps = Caps::default();
        let outcome = lemma21(7, 25, &caps).unwrap();
        assert!(outcome.passed(), "{outcome}");
        assert_eq!(outcome.total, 25);
        let outcome = eq22(1, 25, &caps).unwrap();
        assert!(outcome.passed(), "{outcome}");
        let outcome = thm19(3, 15, &caps).unwrap();
        assert!(outcome.passed(), "{outcome}");
    }

    #[test]
    fn rings_suite_cross_checks_backends() {
        let caps = Caps::default();
        let outcome = rings(11, 20, &caps).unwrap();
        assert!(outcome.passed(), "{outcome}");
    }

    #[test]
    fn chebotarev_suite_covers_primes() {
        let caps = Caps::default();
        let outcome = chebotarev(5, 0, &caps).unwrap();
        assert!(outcome.passed(), "{outcome}");
        assert_eq!(outcome.total, 3);
    }

    #[test]
    fn named_dispatch_rejects_unknown() {
        let caps = Caps::default();
        assert!(run_named("nope", 0, None, None, &caps).is_err());
        assert!(run_named("rings", 2, Some(5), None, &caps)
            .unwrap()
            .passed());
    }

    #[test]
    fn hall_scan_agrees_both_ways() {
        let caps = Caps::default();
        let group = GroupSpec::parse("c3").unwrap();
        let (checked, failures) = hall_exhaustive(&group, &caps).unwrap();
        assert_eq!(checked, 27);
        assert_eq!(failures, 0);
        let (checked, failures) = hall_sampled(&group, 50, 9, &caps).unwrap();
        assert_eq!(checked, 50);
        assert_eq!(failures, 0);
    }
}
