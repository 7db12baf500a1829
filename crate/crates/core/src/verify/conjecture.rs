//! Drivers for the open statements: brute-force distinct products in odd
//! groups, the joint determinant search, and the unique-product criterion.

use crate::chars::{CharacterMatrix, CharacterSet};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::perm::Permutation;
use crate::rings::{Backend, RingValue};

use super::search::{search_tuples, SearchOutcome};
use super::witness::{find_distinct_permutation, permuted_products, MAX_WITNESS_K};
use super::{
    push_note, refuse, Certificate, Instance, Outcome, Report, UniqueProductDetail,
    VerifyOptions, Witness,
};

/// Distinct products for equal-size distinct subsets of an odd-order
/// group. Brute force only: a missing witness here is a counterexample to
/// an open conjecture, so it is reported, never treated as an error.
pub(crate) fn verify_snevily(instance: &Instance, opts: &VerifyOptions) -> Result<Report> {
    let group = instance.group();
    let desc = format!("cyclotomic(level {})", group.exponent());
    let mut report = Report::base(instance, &desc, opts.seed);
    let k = instance.k();
    if k > MAX_WITNESS_K {
        return refuse(
            report,
            format!("witness search supports k <= {MAX_WITNESS_K}, got {k}"),
        );
    }
    match find_distinct_permutation(group, instance.a(), instance.b())? {
        Some(pi) => {
            report.outcome = Outcome::WitnessFound;
            report.witness = Some(Witness::One(pi));
        }
        None => {
            report.outcome = Outcome::NoWitness;
            push_note(
                &mut report,
                "no permutation separates the products; this pair is a counterexample",
            );
        }
    }
    Ok(report)
}

/// Searches for one character tuple whose determinant is nonzero on A and
/// on B simultaneously. The requested backend is honored here; only an
/// exact backend can turn an exhausted sweep into a negative finding.
pub(crate) fn search_chi_det(instance: &Instance, opts: &VerifyOptions) -> Result<Report> {
    let group = instance.group();
    let caps = &opts.caps;
    let k = instance.k();
    let backend = opts.backend.build(group.exponent(), caps)?;
    let mut report = Report::base(instance, &backend.descriptor(), opts.seed);
    if k > caps.matrix_k {
        return refuse(
            report,
            format!("k = {k} exceeds the matrix cap {}", caps.matrix_k),
        );
    }
    let domain = CharacterSet::full(group);
    let a = instance.a();
    let b = instance.b();
    let searched = search_tuples(&domain, k, &opts.strategy, opts.seed, caps, |tuple| {
        let ma = CharacterMatrix::from_characters(tuple, a)?;
        if ma.det(&backend)?.is_zero() {
            return Ok(false);
        }
        let mb = CharacterMatrix::from_characters(tuple, b)?;
        Ok(!mb.det(&backend)?.is_zero())
    });
    match searched {
        Ok(SearchOutcome::Found { tuple, .. }) => {
            let det_a = CharacterMatrix::from_characters(&tuple, a)?.det(&backend)?;
            let det_b = CharacterMatrix::from_characters(&tuple, b)?.det(&backend)?;
            report.certificate = Some(Certificate {
                chars: tuple.iter().map(|c| c.label().to_vec()).collect(),
                steps: None,
                n_lemma: None,
                det_a: Some(det_a.to_wire()),
                det_b: Some(det_b.to_wire()),
                per_a: None,
                per_b: None,
                dets: None,
            });
            report.outcome = Outcome::CertificateFound;
            Ok(report)
        }
        Ok(SearchOutcome::Exhausted { tested }) => {
            if backend.is_exact() {
                report.outcome = Outcome::NoWitness;
                push_note(
                    &mut report,
                    &format!(
                        "every one of the {tested} character tuples zeroes a determinant; \
                         joint nonvanishing fails for this pair"
                    ),
                );
                Ok(report)
            } else {
                refuse(
                    report,
                    format!(
                        "swept {tested} tuples on an inexact backend; zeros there do not \
                         imply zeros over the complex numbers"
                    ),
                )
            }
        }
        Ok(SearchOutcome::BudgetSpent { tested }) => refuse(
            report,
            format!("random budget of {tested} tuples spent without a certificate"),
        ),
        Err(Error::CapExceeded(why)) => refuse(report, why),
        Err(e) => Err(e),
    }
}

struct PairValues {
    det_a: RingValue,
    per_a: RingValue,
    det_b: RingValue,
    per_b: RingValue,
}

fn pair_values(
    tuple: &[crate::chars::Character],
    a: &[GroupElement],
    b: &[GroupElement],
    backend: &Backend,
) -> Result<PairValues> {
    let ma = CharacterMatrix::from_characters(tuple, a)?;
    let mb = CharacterMatrix::from_characters(tuple, b)?;
    Ok(PairValues {
        det_a: ma.det(backend)?,
        per_a: ma.per(backend)?,
        det_b: mb.det(backend)?,
        per_b: mb.per(backend)?,
    })
}

/// The unique-product criterion: when some permutation gives a set of
/// products no other permutation reproduces, nonvanishing certificates
/// exist for det/det, det/per, and per/per simultaneously, and the
/// character sums replicating them evaluate to signed powers of |G|.
pub(crate) fn verify_unique_product(instance: &Instance, opts: &VerifyOptions) -> Result<Report> {
    let group = instance.group();
    let caps = &opts.caps;
    let k = instance.k();
    let backend = Backend::cyclotomic(group.exponent(), caps)?;
    let mut report = Report::base(instance, &backend.descriptor(), opts.seed);
    if opts.backend.is_field() {
        push_note(
            &mut report,
            "field backend request ignored; certificates use the exact backend",
        );
    }
    if k > caps.permutation_k {
        return refuse(
            report,
            format!(
                "k = {k} exceeds the full-permutation cap {}",
                caps.permutation_k
            ),
        );
    }
    if k > caps.matrix_k {
        return refuse(
            report,
            format!("k = {k} exceeds the matrix cap {}", caps.matrix_k),
        );
    }

    // The criterion: a permutation with pairwise distinct products whose
    // sorted product profile no other permutation shares.
    let perms = Permutation::all(k);
    let mut profiles = Vec::with_capacity(perms.len());
    for pi in &perms {
        let prods = permuted_products(group, instance.a(), instance.b(), pi)?;
        let mut profile = prods
            .iter()
            .map(|g| group.index_of(g))
            .collect::<Result<Vec<u64>>>()?;
        profile.sort_unstable();
        profiles.push(profile);
    }
    let mut chosen: Option<&Permutation> = None;
    for (i, pi) in perms.iter().enumerate() {
        let distinct = profiles[i].windows(2).all(|w| w[0] != w[1]);
        if !distinct {
            continue;
        }
        let unique = profiles
            .iter()
            .enumerate()
            .all(|(j, other)| j == i || other != &profiles[i]);
        if unique {
            chosen = Some(pi);
            break;
        }
    }
    let Some(pi) = chosen else {
        return refuse(
            report,
            "no permutation has a unique distinct-product set; the criterion does not apply"
                .into(),
        );
    };
    let pi = pi.clone();

    let domain = CharacterSet::full(group);
    let a = instance.a();
    let b = instance.b();
    let run_search = |det_on_a: bool, det_on_b: bool| -> Result<Option<Certificate>> {
        let searched = search_tuples(&domain, k, &opts.strategy, opts.seed, caps, |tuple| {
            let ma = CharacterMatrix::from_characters(tuple, a)?;
            let va = if det_on_a {
                ma.det(&backend)?
            } else {
                ma.per(&backend)?
            };
            if va.is_zero() {
                return Ok(false);
            }
            let mb = CharacterMatrix::from_characters(tuple, b)?;
            let vb = if det_on_b {
                mb.det(&backend)?
            } else {
                mb.per(&backend)?
            };
            Ok(!vb.is_zero())
        })?;
        match searched {
            SearchOutcome::Found { tuple, .. } => {
                let values = pair_values(&tuple, a, b, &backend)?;
                let mut cert = Certificate {
                    chars: tuple.iter().map(|c| c.label().to_vec()).collect(),
                    steps: None,
                    n_lemma: None,
                    det_a: None,
                    det_b: None,
                    per_a: None,
                    per_b: None,
                    dets: None,
                };
                if det_on_a {
                    cert.det_a = Some(values.det_a.to_wire());
                } else {
                    cert.per_a = Some(values.per_a.to_wire());
                }
                if det_on_b {
                    cert.det_b = Some(values.det_b.to_wire());
                } else {
                    cert.per_b = Some(values.per_b.to_wire());
                }
                Ok(Some(cert))
            }
            SearchOutcome::Exhausted { tested } => Err(Error::Internal(format!(
                "unique-product criterion holds yet all {tested} tuples vanish \
                 ({} on A, {} on B)",
                if det_on_a { "det" } else { "per" },
                if det_on_b { "det" } else { "per" },
            ))),
            SearchOutcome::BudgetSpent { .. } => Ok(None),
        }
    };

    let det_det = match run_search(true, true) {
        Ok(Some(cert)) => cert,
        Ok(None) => {
            return refuse(
                report,
                "random budget spent before the det/det certificate".into(),
            )
        }
        Err(Error::CapExceeded(why)) => return refuse(report, why),
        Err(e) => return Err(e),
    };
    let det_per = match run_search(true, false) {
        Ok(Some(cert)) => cert,
        Ok(None) => {
            return refuse(
                report,
                "random budget spent before the det/per certificate".into(),
            )
        }
        Err(Error::CapExceeded(why)) => return refuse(report, why),
        Err(e) => return Err(e),
    };
    let per_per = match run_search(false, false) {
        Ok(Some(cert)) => cert,
        Ok(None) => {
            return refuse(
                report,
                "random budget spent before the per/per certificate".into(),
            )
        }
        Err(Error::CapExceeded(why)) => return refuse(report, why),
        Err(e) => return Err(e),
    };

    // Sum replication over the whole character power: each pairing's sum
    // collapses to a signed |G|^k because the unique profile leaves exactly
    // one surviving permutation pair.
    let mut detail = UniqueProductDetail {
        det_per,
        per_per,
        sigma_checked: false,
        sigma_det_det: None,
        sigma_det_per: None,
        sigma_per_per: None,
    };
    let total = domain.tuple_count(k);
    let sweepable = matches!(total, Some(t) if t <= caps.sigma_sweep as u128);
    if sweepable {
        let total = total.unwrap();
        let c = permuted_products(group, a, b, &pi)?;
        let c_inv = c
            .iter()
            .map(|g| group.inv(g))
            .collect::<Result<Vec<_>>>()?;
        let mut sigma_dd = backend.zero();
        let mut sigma_dp = backend.zero();
        let mut sigma_pp = backend.zero();
        for index in 0..total {
            let tuple = domain.tuple_at(index, k)?;
            let values = pair_values(&tuple, a, b, &backend)?;
            let mut factor = backend.one();
            for (chi, ci) in tuple.iter().zip(&c_inv) {
                factor = factor.mul(&chi.eval(ci, &backend)?);
            }
            sigma_dd = sigma_dd.add(&factor.mul(&values.det_a).mul(&values.det_b));
            sigma_dp = sigma_dp.add(&factor.mul(&values.det_a).mul(&values.per_b));
            sigma_pp = sigma_pp.add(&factor.mul(&values.per_a).mul(&values.per_b));
        }
        let order_power = (group.order() as i64)
            .checked_pow(k as u32)
            .ok_or_else(|| Error::Internal("|G|^k overflows".into()))?;
        let expect_dd = backend.from_int(i64::from(pi.sign()) * order_power);
        let expect_rest = backend.from_int(order_power);
        if !sigma_dd.sub(&expect_dd).is_zero() {
            return Err(Error::Internal(format!(
                "det/det sum fails to collapse to {} * |G|^{k}",
                pi.sign()
            )));
        }
        if !sigma_dp.sub(&expect_rest).is_zero() {
            return Err(Error::Internal(format!("det/per sum fails to collapse to |G|^{k}")));
        }
        if !sigma_pp.sub(&expect_rest).is_zero() {
            return Err(Error::Internal(format!("per/per sum fails to collapse to |G|^{k}")));
        }
        detail.sigma_checked = true;
        detail.sigma_det_det = Some(sigma_dd.to_wire());
        detail.sigma_det_per = Some(sigma_dp.to_wire());
        detail.sigma_per_per = Some(sigma_pp.to_wire());
    } else {
        push_note(
            &mut report,
            &format!(
                "sum replication skipped: tuple space exceeds the sweep cap {}",
                caps.sigma_sweep
            ),
        );
    }

    report.certificate = Some(det_det);
    report.unique_product = Some(detail);
    report.outcome = Outcome::WitnessFound;
    report.witness = Some(Witness::One(pi));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::chars::Strategy;
    use crate::group::GroupSpec;
    use crate::rings::DegreeChoice;
    use crate::verify::{check_report, verify, BackendChoice};

    fn opts() -> VerifyOptions {
        VerifyOptions::default()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    fn elems(group: &GroupSpec, rs: &[&[u64]]) -> Vec<GroupElement> {
        rs.iter()
            .map(|r| group.element(r.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn snevily_small_odd_instances_have_witnesses() {
        let group = GroupSpec::parse("c9").unwrap();
        let a = elems(&group, &[&[0], &[1], &[3]]);
        let b = elems(&group, &[&[2], &[5], &[6]]);
        let instance = Instance::snevily(group, a, b).unwrap();
        let report = verify(&instance, &opts()).unwrap();
        assert_eq!(report.outcome, Outcome::WitnessFound);
        assert!(report.certificate.is_none());
        check_report(&report, &caps()).unwrap();
    }

    #[test]
    fn chi_det_finds_joint_certificates_exactly() {
        let group = GroupSpec::parse("c3xc3").unwrap();
        let a = elems(&group, &[&[0, 0], &[1, 0]]);
        let b = elems(&group, &[&[0, 1], &[2, 2]]);
        let instance = Instance::chi_det(group, a, b).unwrap();
        let report = verify(&instance, &opts()).unwrap();
        assert_eq!(report.outcome, Outcome::CertificateFound);
        let cert = report.certificate.as_ref().unwrap();
        assert!(!cert.det_a.as_ref().unwrap().is_zero());
        assert!(!cert.det_b.as_ref().unwrap().is_zero());
        check_report(&report, &caps()).unwrap();
    }

    #[test]
    fn chi_det_exhausted_field_sweep_refuses_rather_than_concludes() {
        // A joint certificate exists over the complex numbers, but in
        // characteristic 2 the sweep may legitimately fail; the driver must
        // then refuse rather than claim a counterexample.
        let group = GroupSpec::parse("c3").unwrap();
        let a = elems(&group, &[&[0], &[1]]);
        let b = elems(&group, &[&[0], &[2]]);
        let instance = Instance::chi_det(group, a, b).unwrap();
        let mut o = opts();
        o.backend = BackendChoice::Field {
            preferred_char: Some(2),
            degree: DegreeChoice::Minimal,
        };
        o.strategy = Strategy::Exhaustive;
        let report = verify(&instance, &o).unwrap();
        // Whatever the backend found, a negative claim is never made.
        assert_ne!(report.outcome, Outcome::NoWitness);
        if report.outcome == Outcome::CertificateFound {
            check_report(&report, &caps()).unwrap();
        }
    }

    #[test]
    fn chi_det_random_budget_refuses() {
        let group = GroupSpec::parse("c3xc3").unwrap();
        let a = elems(&group, &[&[0, 0], &[1, 0], &[0, 1]]);
        let b = elems(&group, &[&[0, 0], &[1, 1], &[2, 2]]);
        let instance = Instance::chi_det(group, a, b).unwrap();
        let mut o = opts();
        o.strategy = Strategy::Random { trials: 1 };
        o.seed = 1;
        let report = verify(&instance, &o).unwrap();
        // One random tuple almost surely misses; either way no negative
        // claim appears without an exhausted exact sweep.
        assert_ne!(report.outcome, Outcome::NoWitness);
    }

    #[test]
    fn unique_product_criterion_full_run() {
        // In c5 with A = (0),(1) and B = (0),(2): products under the
        // identity are {0, 3}, under the swap {2, 1}; both distinct, both
        // unique, so the identity is chosen and everything must certify.
        let group = GroupSpec::parse("c5").unwrap();
        let a = elems(&group, &[&[0], &[1]]);
        let b = elems(&group, &[&[0], &[2]]);
        let instance = Instance::unique_product(group.clone(), a, b).unwrap();
        let report = verify(&instance, &opts()).unwrap();
        assert_eq!(report.outcome, Outcome::WitnessFound);
        let Some(Witness::One(pi)) = &report.witness else {
            panic!("expected a single permutation");
        };
        assert_eq!(pi.images(), &[0, 1]);
        let detail = report.unique_product.as_ref().unwrap();
        assert!(detail.sigma_checked);
        // Frozen sums: sign(+1) * 25 for det/det, 25 for the others.
        let expect = Backend::cyclotomic(5, &caps()).unwrap().from_int(25);
        assert!(detail.sigma_det_det.as_ref().unwrap().matches(&expect));
        assert!(detail.sigma_det_per.as_ref().unwrap().matches(&expect));
        assert!(detail.sigma_per_per.as_ref().unwrap().matches(&expect));
        check_report(&report, &caps()).unwrap();
    }

    #[test]
    fn unique_product_swap_sign_shows_in_the_sum() {
        // In c4 with A = (0),(1), B = (0),(1): identity products {0, 2}
        // repeat under no other assignment? The swap gives {1, 1}:
        // non-distinct, so the identity profile {0, 2} is unique.
        let group = GroupSpec::parse("c4").unwrap();
        let a = elems(&group, &[&[0], &[1]]);
        let b = elems(&group, &[&[0], &[1]]);
        let instance = Instance::unique_product(group, a, b).unwrap();
        let report = verify(&instance, &opts()).unwrap();
        assert_eq!(report.outcome, Outcome::WitnessFound);
        let detail = report.unique_product.as_ref().unwrap();
        assert!(detail.sigma_checked);
        let expect = Backend::cyclotomic(4, &caps()).unwrap().from_int(16);
        assert!(detail.sigma_det_det.as_ref().unwrap().matches(&expect));
    }

    #[test]
    fn unique_product_refuses_when_condition_fails() {
        // In c3 with A = B = the whole group, every permutation with
        // distinct products shares the profile {all of G}.
        let group = GroupSpec::parse("c3").unwrap();
        let all = elems(&group, &[&[0], &[1], &[2]]);
        let instance = Instance::unique_product(group, all.clone(), all).unwrap();
        let report = verify(&instance, &opts()).unwrap();
        assert_eq!(report.outcome, Outcome::Refused);
        assert!(report
            .note
            .as_ref()
            .unwrap()
            .contains("criterion does not apply"));
    }
}
