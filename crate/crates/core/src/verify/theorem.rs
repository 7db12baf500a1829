//! Drivers for the proven statements: distinct products relative to a
//! k-large subgroup, their power-of-one-element corollary, multi-set
//! products in cyclic groups, the Hall equivalence, and nonsingular
//! Fourier minors at prime level.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chars::{Character, CharacterMatrix, CharacterSet};
use crate::error::{Error, Result};
use crate::group::{
    is_k_large, prime_factorization, prime_part, smallest_prime_divisor, GroupElement,
    SubgroupSpec,
};
use crate::rings::{vanishing_sum_feasible, Backend};

use super::search::{search_tuples, SearchOutcome};
use super::witness::{
    all_distinct, find_distinct_permutation, multi_distinct_permutations, permuted_products,
    MAX_WITNESS_K,
};
use super::{
    push_note, refuse, residues_of, Certificate, Instance, Outcome, Report, VerifyOptions,
    Witness,
};

fn labels_of(tuple: &[Character]) -> Vec<Vec<u64>> {
    tuple.iter().map(|c| c.label().to_vec()).collect()
}

/// Distinct products for distinct A relative to a k-large subgroup
/// containing B (or containing A, via the complementary character
/// sublattice). Runs the brute-force search and the certificate path and
/// insists they agree; under valid hypotheses a missing witness or a
/// vanishing permanent is a hard internal failure, not a finding.
pub(crate) fn verify_dkss(instance: &Instance, opts: &VerifyOptions) -> Result<Report> {
    let group = instance.group();
    let caps = &opts.caps;
    let k = instance.k();
    let backend = Backend::cyclotomic(group.exponent(), caps)?;
    let mut report = Report::base(instance, &backend.descriptor(), opts.seed);
    if let Some(h) = instance.h() {
        report.h = Some(residues_of(h.generators()));
    }
    if opts.backend.is_field() {
        push_note(
            &mut report,
            "field backend request ignored; certificates use the exact backend",
        );
    }
    if k > caps.matrix_k || k > MAX_WITNESS_K {
        return refuse(
            report,
            format!("k = {k} exceeds the matrix cap {}", caps.matrix_k.min(MAX_WITNESS_K)),
        );
    }

    let whole;
    let h: &SubgroupSpec = match instance.h() {
        Some(h) => h,
        None => {
            whole = SubgroupSpec::whole(group.clone(), caps)?;
            &whole
        }
    };
    let h_order = h.order();
    if h_order < 2 {
        return refuse(report, "H is the trivial subgroup".into());
    }
    // B inside H is the primary case; A inside H uses the complementary
    // sublattice of characters. Check B first so that H = G lands there.
    let case_b = h.contains_all(instance.b());
    let case_a = h.contains_all(instance.a());
    if !case_b && !case_a {
        return refuse(report, "neither A nor B lies inside H".into());
    }
    if !is_k_large(h_order, k as u64)? {
        return refuse(report, format!("|H| = {h_order} is not {k}-large"));
    }

    let witness = find_distinct_permutation(group, instance.a(), instance.b())?;
    let Some(pi) = witness else {
        return Err(Error::Internal(format!(
            "no distinct-product permutation on a proven instance (group {group}, k = {k})"
        )));
    };

    // Certificate domain. With B inside H every matrix-B entry is an
    // |H|-th root; with A inside H the characters trivial on the non-H
    // primes evaluate B into |H1|-th roots, H1 the product of the Sylow
    // parts at the primes of |H|.
    let (domain, steps, n_lemma) = if case_b {
        (CharacterSet::full(group), None, h_order)
    } else {
        let h_primes: Vec<u64> = prime_factorization(h_order).into_keys().collect();
        let mut step_vec = Vec::with_capacity(group.rank());
        let mut h1_order = 1u64;
        for &n in group.factor_orders() {
            let m = prime_part(n, &h_primes);
            step_vec.push(n / m);
            h1_order *= m;
        }
        let domain = CharacterSet::with_steps(group, step_vec.clone())?;
        (domain, Some(step_vec), h1_order)
    };

    // k-largeness makes a vanishing sum of k! roots of order dividing
    // n_lemma impossible; the feasibility check is an independent guard.
    let k_factorial: u64 = (1..=k as u64).product();
    if vanishing_sum_feasible(n_lemma, k_factorial)? {
        return Err(Error::Internal(format!(
            "a vanishing sum of {k_factorial} roots of order dividing {n_lemma} \
             is feasible despite {k}-largeness of {h_order}"
        )));
    }

    let elems_a = instance.a();
    let searched = search_tuples(&domain, k, &opts.strategy, opts.seed, caps, |tuple| {
        let m = CharacterMatrix::from_characters(tuple, elems_a)?;
        Ok(!m.det(&backend)?.is_zero())
    });
    match searched {
        Ok(SearchOutcome::Found { tuple, .. }) => {
            let ma = CharacterMatrix::from_characters(&tuple, instance.a())?;
            let det_a = ma.det(&backend)?;
            let mb = CharacterMatrix::from_characters(&tuple, instance.b())?;
            let per_b = mb.per(&backend)?;
            if per_b.is_zero() {
                return Err(Error::Internal(format!(
                    "permanent vanished though it is a sum of {k_factorial} roots \
                     of order dividing {n_lemma}"
                )));
            }
            report.certificate = Some(Certificate {
                chars: labels_of(&tuple),
                steps,
                n_lemma: Some(n_lemma),
                det_a: Some(det_a.to_wire()),
                det_b: None,
                per_a: None,
                per_b: Some(per_b.to_wire()),
                dets: None,
            });
        }
        Ok(SearchOutcome::Exhausted { tested }) => {
            return Err(Error::Internal(format!(
                "all {tested} character tuples gave a vanishing determinant \
                 on distinct elements"
            )));
        }
        Ok(SearchOutcome::BudgetSpent { tested }) => {
            push_note(
                &mut report,
                &format!("certificate search spent its random budget of {tested} tuples"),
            );
        }
        Err(Error::CapExceeded(why)) => {
            push_note(&mut report, &format!("certificate search refused: {why}"));
        }
        Err(e) => return Err(e),
    }

    report.outcome = Outcome::WitnessFound;
    report.witness = Some(Witness::One(pi));
    Ok(report)
}

/// Hall's equivalence on a full enumeration A = G: a permutation with
/// distinct products exists exactly when the entries of B multiply to the
/// identity. Either side failing the other is an internal error.
pub(crate) fn verify_hall(instance: &Instance, opts: &VerifyOptions) -> Result<Report> {
    let group = instance.group();
    let desc = format!("cyclotomic(level {})", group.exponent());
    let mut report = Report::base(instance, &desc, opts.seed);
    let n = group.order() as usize;
    if n > MAX_WITNESS_K {
        return refuse(
            report,
            format!("witness search supports |G| <= {MAX_WITNESS_K}, got {n}"),
        );
    }
    let mut product = group.identity();
    for bj in instance.b() {
        product = group.mul(&product, bj)?;
    }
    let is_identity = product == group.identity();
    report.b_product_identity = Some(is_identity);

    let witness = find_distinct_permutation(group, instance.a(), instance.b())?;
    match (witness, is_identity) {
        (Some(pi), true) => {
            report.outcome = Outcome::WitnessFound;
            report.witness = Some(Witness::One(pi));
            push_note(
                &mut report,
                "B multiplies to the identity and a witness exists, as predicted",
            );
        }
        (None, false) => {
            report.outcome = Outcome::NoWitness;
            push_note(
                &mut report,
                "B does not multiply to the identity, so no witness can exist",
            );
        }
        (Some(pi), false) => {
            return Err(Error::Internal(format!(
                "witness {:?} found though B multiplies to {product}, not the identity",
                pi.images()
            )));
        }
        (None, true) => {
            return Err(Error::Internal(
                "B multiplies to the identity yet no witness was found".into(),
            ));
        }
    }
    Ok(report)
}

/// Multi-set products in a cyclic group over an odd number of rows: the
/// exhaustive assignment search must succeed, and the generator-power
/// character tuple certifies every row with a nonzero Vandermonde
/// determinant.
pub(crate) fn verify_sun_multi(instance: &Instance, opts: &VerifyOptions) -> Result<Report> {
    let group = instance.group();
    let caps = &opts.caps;
    let backend = Backend::cyclotomic(group.exponent(), caps)?;
    let mut report = Report::base(instance, &backend.descriptor(), opts.seed);
    report.sets = Some(
        instance
            .rows()
            .iter()
            .map(|row| residues_of(row))
            .collect(),
    );
    if opts.backend.is_field() {
        push_note(
            &mut report,
            "field backend request ignored; certificates use the exact backend",
        );
    }
    if group.exponent() != group.order() {
        return refuse(report, format!("group {group} is not cyclic"));
    }
    let m = instance.rows().len();
    if m % 2 == 0 {
        return refuse(report, format!("an even number of rows ({m}) is out of scope"));
    }
    let k = instance.rows()[0].len();
    if k > caps.matrix_k || k > MAX_WITNESS_K {
        return refuse(
            report,
            format!("k = {k} exceeds the matrix cap {}", caps.matrix_k.min(MAX_WITNESS_K)),
        );
    }

    let pis = match multi_distinct_permutations(group, instance.rows(), caps) {
        Ok(Some(pis)) => pis,
        Ok(None) => {
            return Err(Error::Internal(format!(
                "no distinct-product assignment on a proven instance \
                 (group {group}, {m} rows of {k})"
            )));
        }
        Err(Error::CapExceeded(why)) => return refuse(report, why),
        Err(e) => return Err(e),
    };

    let domain = CharacterSet::full(group);
    let generator = domain.cyclic_generator().ok_or_else(|| {
        Error::Internal("the dual of a cyclic group must be cyclic".into())
    })?;
    let tuple: Vec<Character> = (0..k).map(|i| generator.pow(i as u64)).collect();
    let mut dets = Vec::with_capacity(m);
    for row in instance.rows() {
        let matrix = CharacterMatrix::from_characters(&tuple, row)?;
        let det = matrix.det(&backend)?;
        if det.is_zero() {
            return Err(Error::Internal(
                "Vandermonde determinant vanished on distinct row elements".into(),
            ));
        }
        dets.push(det.to_wire());
    }
    report.certificate = Some(Certificate {
        chars: labels_of(&tuple),
        steps: None,
        n_lemma: None,
        det_a: None,
        det_b: None,
        per_a: None,
        per_b: None,
        dets: Some(dets),
    });
    report.outcome = Outcome::WitnessFound;
    report.witness = Some(Witness::Many(pis));
    Ok(report)
}

/// Powers of one element: project onto the Sylow part at the smallest
/// prime p of the base's order, solve the subgroup instance there, and
/// lift the witness back. A direct search double-checks the lift.
pub(crate) fn verify_powers(instance: &Instance, opts: &VerifyOptions) -> Result<Report> {
    let group = instance.group();
    let caps = &opts.caps;
    let desc = format!("cyclotomic(level {})", group.exponent());
    let mut report = Report::base(instance, &desc, opts.seed);
    let base = instance
        .base()
        .ok_or_else(|| Error::Internal("powers instance without a base element".into()))?;
    report.base = Some(base.residues().to_vec());
    report.exponents = Some(instance.exponents().to_vec());

    let order = group.element_order(base)?;
    if order == 1 {
        return refuse(report, "base element is the identity".into());
    }
    let p = smallest_prime_divisor(order)?;
    let mut residues: Vec<u64> = instance
        .exponents()
        .iter()
        .map(|&e| e.rem_euclid(p as i64) as u64)
        .collect();
    residues.sort_unstable();
    residues.dedup();
    if residues.len() != instance.exponents().len() {
        return refuse(
            report,
            format!("exponents are not pairwise incongruent modulo {p}"),
        );
    }

    let sylow = group.sylow_decomposition(caps)?;
    let part = sylow.get(&p).ok_or_else(|| {
        Error::Internal(format!("no Sylow part at {p} though {p} divides an element order"))
    })?;
    let cofactor = part.cofactor;
    report.cofactor = Some(cofactor);
    let project = |elems: &[GroupElement]| -> Result<Vec<GroupElement>> {
        elems.iter().map(|g| group.pow(g, cofactor as i64)).collect()
    };
    // The projected powers are distinct: exponents incongruent mod p stay
    // incongruent mod the p-power order of the projected base.
    let sub_instance = Instance::dkss(
        group.clone(),
        project(instance.a())?,
        project(instance.b())?,
        Some(part.subgroup.generators().to_vec()),
        caps,
    )?;
    let sub_report = verify_dkss(&sub_instance, opts)?;
    match sub_report.outcome {
        Outcome::WitnessFound => {}
        Outcome::Refused => {
            let why = sub_report
                .note
                .unwrap_or_else(|| "projected instance refused".into());
            return refuse(report, format!("projection to the {p}-part refused: {why}"));
        }
        other => {
            return Err(Error::Internal(format!(
                "projected instance ended with outcome {other} instead of a witness"
            )));
        }
    }
    let Some(Witness::One(pi)) = sub_report.witness else {
        return Err(Error::Internal("projected report lost its witness".into()));
    };

    let lifted = permuted_products(group, instance.a(), instance.b(), &pi)?;
    if !all_distinct(group, &lifted)? {
        return Err(Error::Internal(
            "projected witness fails to separate the original products".into(),
        ));
    }
    if find_distinct_permutation(group, instance.a(), instance.b())?.is_none() {
        return Err(Error::Internal(
            "direct search disagrees with the projected witness".into(),
        ));
    }

    report.h = sub_report.h;
    report.certificate = sub_report.certificate;
    if let Some(note) = sub_report.note {
        push_note(&mut report, &note);
    }
    push_note(
        &mut report,
        &format!("projected along cofactor {cofactor} into the {p}-part"),
    );
    report.outcome = Outcome::WitnessFound;
    report.witness = Some(Witness::One(pi));
    Ok(report)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < n - k + i {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn minor_det_is_zero(
    p: u64,
    rows: &[usize],
    cols: &[usize],
    backend: &Backend,
) -> Result<bool> {
    let exps: Vec<Vec<u64>> = rows
        .iter()
        .map(|&r| {
            cols.iter()
                .map(|&c| (r as u64 * c as u64) % p)
                .collect()
        })
        .collect();
    let matrix = CharacterMatrix::new(p, exps)?;
    Ok(matrix.det(backend)?.is_zero())
}

/// Every square minor of the Fourier matrix (zeta_p^(rc)) at prime level p
/// is nonsingular. Levels up to 7 are swept exhaustively; 11 and 13 are
/// sampled. A vanishing minor would contradict the theorem, so it is an
/// internal failure.
pub(crate) fn chebotarev_check(instance: &Instance, opts: &VerifyOptions) -> Result<Report> {
    let p = instance.group().order();
    let caps = &opts.caps;
    let backend = Backend::cyclotomic(p, caps)?;
    let mut report = Report::base(instance, &backend.descriptor(), opts.seed);
    const FULL_SWEEP_MAX: u64 = 7;
    const SAMPLED_MAX: u64 = 13;
    const SAMPLES: u64 = 200;
    if p <= FULL_SWEEP_MAX {
        let mut checked = 0u64;
        for k in 1..=p as usize {
            for rows in combinations(p as usize, k) {
                for cols in combinations(p as usize, k) {
                    if minor_det_is_zero(p, &rows, &cols, &backend)? {
                        return Err(Error::Internal(format!(
                            "vanishing {k}x{k} minor at rows {rows:?}, cols {cols:?}, level {p}"
                        )));
                    }
                    checked += 1;
                }
            }
        }
        push_note(
            &mut report,
            &format!("all {checked} square minors at level {p} are nonsingular"),
        );
    } else if p <= SAMPLED_MAX {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut indices: Vec<usize> = (0..p as usize).collect();
        for _ in 0..SAMPLES {
            let k = rng.gen_range(1..=p as usize);
            indices.shuffle(&mut rng);
            let mut rows = indices[..k].to_vec();
            rows.sort_unstable();
            indices.shuffle(&mut rng);
            let mut cols = indices[..k].to_vec();
            cols.sort_unstable();
            if minor_det_is_zero(p, &rows, &cols, &backend)? {
                return Err(Error::Internal(format!(
                    "vanishing {k}x{k} minor at rows {rows:?}, cols {cols:?}, level {p}"
                )));
            }
        }
        push_note(
            &mut report,
            &format!("{SAMPLES} sampled square minors at level {p} are nonsingular"),
        );
    } else {
        return refuse(report, format!("level {p} is beyond the sampled range"));
    }
    report.outcome = Outcome::CertificateFound;
    Ok(report)
}
