//! Verification drivers: witness searches, certificate production, and
//! machine-checkable reports.
//!
//! Every driver returns a [`Report`] that serializes to one JSONL line with
//! a pinned key order. Hypothesis failures come back as a `Refused`
//! outcome, never as silent skips; a violated mathematical guarantee
//! surfaces as [`Error::Internal`] and means a bug somewhere, not a fact
//! about the instance.

pub mod campaign;
mod conjecture;
mod search;
mod theorem;
mod witness;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::chars::{Character, CharacterMatrix, Strategy};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, SubgroupSpec};
use crate::perm::Permutation;
use crate::rings::{Backend, DegreeChoice, RingValueWire};

pub use search::{search_tuples, vandermonde_tuple, SearchOutcome};
pub use witness::{
    all_distinct, find_distinct_permutation, multi_distinct_permutations, permuted_products,
    MAX_WITNESS_K,
};

/// The statement families a report can describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Snevily,
    Dkss,
    Hall,
    ChiDet,
    SunMulti,
    Powers,
    UniqueProduct,
    Chebotarev,
}

impl InstanceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstanceKind::Snevily => "snevily",
            InstanceKind::Dkss => "dkss",
            InstanceKind::Hall => "hall",
            InstanceKind::ChiDet => "chi-det",
            InstanceKind::SunMulti => "sun-multi",
            InstanceKind::Powers => "powers",
            InstanceKind::UniqueProduct => "unique-product",
            InstanceKind::Chebotarev => "chebotarev",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snevily" => Ok(InstanceKind::Snevily),
            "dkss" => Ok(InstanceKind::Dkss),
            "hall" => Ok(InstanceKind::Hall),
            "chi-det" => Ok(InstanceKind::ChiDet),
            "sun-multi" => Ok(InstanceKind::SunMulti),
            "powers" => Ok(InstanceKind::Powers),
            "unique-product" => Ok(InstanceKind::UniqueProduct),
            "chebotarev" => Ok(InstanceKind::Chebotarev),
            other => Err(Error::Parse(format!("unknown instance kind '{other}'"))),
        }
    }
}

/// One problem instance, validated at construction.
#[derive(Debug, Clone)]
pub struct Instance {
    kind: InstanceKind,
    group: GroupSpec,
    a: Vec<GroupElement>,
    b: Vec<GroupElement>,
    h: Option<SubgroupSpec>,
    rows: Vec<Vec<GroupElement>>,
    base: Option<GroupElement>,
    exponents: Vec<i64>,
}

fn check_tuple(
    group: &GroupSpec,
    elems: &[GroupElement],
    distinct: bool,
    name: &str,
) -> Result<()> {
    if elems.is_empty() {
        return Err(Error::Domain(format!("{name} must be nonempty")));
    }
    for g in elems {
        group.index_of(g)?;
    }
    if distinct && !all_distinct(group, elems)? {
        return Err(Error::Domain(format!("{name} must have distinct entries")));
    }
    Ok(())
}

impl Instance {
    /// A_j + B_{pi(j)} all distinct, sought in a group of odd order.
    pub fn snevily(group: GroupSpec, a: Vec<GroupElement>, b: Vec<GroupElement>) -> Result<Self> {
        if group.order() % 2 == 0 {
            return Err(Error::Domain(format!(
                "group {group} has even order {}",
                group.order()
            )));
        }
        check_tuple(&group, &a, true, "A")?;
        check_tuple(&group, &b, true, "B")?;
        if a.len() != b.len() {
            return Err(Error::Domain("A and B must have equal size".into()));
        }
        Ok(Instance {
            kind: InstanceKind::Snevily,
            group,
            a,
            b,
            h: None,
            rows: Vec::new(),
            base: None,
            exponents: Vec::new(),
        })
    }

    /// Distinct A, arbitrary B, relative to a subgroup H given by
    /// generators (the whole group when omitted).
    pub fn dkss(
        group: GroupSpec,
        a: Vec<GroupElement>,
        b: Vec<GroupElement>,
        h_generators: Option<Vec<GroupElement>>,
        caps: &Caps,
    ) -> Result<Self> {
        check_tuple(&group, &a, true, "A")?;
        check_tuple(&group, &b, false, "B")?;
        if a.len() != b.len() {
            return Err(Error::Domain("A and B must have equal size".into()));
        }
        let h = match h_generators {
            Some(gens) => Some(SubgroupSpec::from_generators(group.clone(), gens, caps)?),
            None => None,
        };
        Ok(Instance {
            kind: InstanceKind::Dkss,
            group,
            a,
            b,
            h,
            rows: Vec::new(),
            base: None,
            exponents: Vec::new(),
        })
    }

    /// A is the whole group in enumeration order; B is any |G|-tuple.
    pub fn hall(group: GroupSpec, b: Vec<GroupElement>, caps: &Caps) -> Result<Self> {
        let a = group.enumerate(caps)?;
        check_tuple(&group, &b, false, "B")?;
        if b.len() as u64 != group.order() {
            return Err(Error::Domain(format!(
                "B must list |G| = {} elements, got {}",
                group.order(),
                b.len()
            )));
        }
        Ok(Instance {
            kind: InstanceKind::Hall,
            group,
            a,
            b,
            h: None,
            rows: Vec::new(),
            base: None,
            exponents: Vec::new(),
        })
    }

    /// Distinct k-subsets A and B for the joint det/det search.
    pub fn chi_det(group: GroupSpec, a: Vec<GroupElement>, b: Vec<GroupElement>) -> Result<Self> {
        check_tuple(&group, &a, true, "A")?;
        check_tuple(&group, &b, true, "B")?;
        if a.len() != b.len() {
            return Err(Error::Domain("A and B must have equal size".into()));
        }
        Ok(Instance {
            kind: InstanceKind::ChiDet,
            group,
            a,
            b,
            h: None,
            rows: Vec::new(),
            base: None,
            exponents: Vec::new(),
        })
    }

    /// m rows of k distinct elements each; permutations of rows 2..m are
    /// sought making the m-fold products distinct.
    pub fn sun_multi(group: GroupSpec, rows: Vec<Vec<GroupElement>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Domain("need at least one row".into()));
        }
        let k = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            check_tuple(&group, row, true, &format!("row {}", i + 1))?;
            if row.len() != k {
                return Err(Error::Domain("rows must share one length".into()));
            }
        }
        let a = rows[0].clone();
        let b = rows[rows.len() - 1].clone();
        Ok(Instance {
            kind: InstanceKind::SunMulti,
            group,
            a,
            b,
            h: None,
            rows,
            base: None,
            exponents: Vec::new(),
        })
    }

    /// A = powers of one base element at the given exponents.
    pub fn powers(
        group: GroupSpec,
        base: GroupElement,
        exponents: Vec<i64>,
        b: Vec<GroupElement>,
    ) -> Result<Self> {
        group.index_of(&base)?;
        if exponents.is_empty() || exponents.len() != b.len() {
            return Err(Error::Domain(
                "exponents and B must be nonempty and of equal size".into(),
            ));
        }
        check_tuple(&group, &b, false, "B")?;
        let a = exponents
            .iter()
            .map(|&e| group.pow(&base, e))
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance {
            kind: InstanceKind::Powers,
            group,
            a,
            b,
            h: None,
            rows: Vec::new(),
            base: Some(base),
            exponents,
        })
    }

    /// Distinct k-subsets A and B for the unique-product criterion.
    pub fn unique_product(
        group: GroupSpec,
        a: Vec<GroupElement>,
        b: Vec<GroupElement>,
    ) -> Result<Self> {
        check_tuple(&group, &a, true, "A")?;
        check_tuple(&group, &b, true, "B")?;
        if a.len() != b.len() {
            return Err(Error::Domain("A and B must have equal size".into()));
        }
        Ok(Instance {
            kind: InstanceKind::UniqueProduct,
            group,
            a,
            b,
            h: None,
            rows: Vec::new(),
            base: None,
            exponents: Vec::new(),
        })
    }

    /// All minors of the discrete Fourier matrix at a prime level p.
    pub fn chebotarev(p: u64) -> Result<Self> {
        if p < 2 || crate::group::smallest_prime_divisor(p)? != p {
            return Err(Error::Domain(format!("level {p} is not prime")));
        }
        let group = GroupSpec::new(vec![p])?;
        Ok(Instance {
            kind: InstanceKind::Chebotarev,
            group,
            a: Vec::new(),
            b: Vec::new(),
            h: None,
            rows: Vec::new(),
            base: None,
            exponents: Vec::new(),
        })
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn a(&self) -> &[GroupElement] {
        &self.a
    }

    pub fn b(&self) -> &[GroupElement] {
        &self.b
    }

    pub fn h(&self) -> Option<&SubgroupSpec> {
        self.h.as_ref()
    }

    pub fn rows(&self) -> &[Vec<GroupElement>] {
        &self.rows
    }

    pub fn base(&self) -> Option<&GroupElement> {
        self.base.as_ref()
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }
}

/// How a verification ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    WitnessFound,
    CertificateFound,
    NoWitness,
    Refused,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Outcome::WitnessFound => "witness-found",
            Outcome::CertificateFound => "certificate-found",
            Outcome::NoWitness => "no-witness",
            Outcome::Refused => "refused",
        };
        f.write_str(s)
    }
}

/// A permutation witness, or one permutation per extra row for multi-set
/// instances (possibly empty when a single row suffices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    One(Permutation),
    Many(Vec<Permutation>),
}

/// Character data certifying nonvanishing: labels, the optional stepped
/// sublattice they came from, and the recorded determinant/permanent
/// values on the backend named by the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub chars: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_lemma: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det_a: Option<RingValueWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det_b: Option<RingValueWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_a: Option<RingValueWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_b: Option<RingValueWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dets: Option<Vec<RingValueWire>>,
}

/// Companion certificates and sum replications for the unique-product
/// criterion. The report's main certificate holds the det/det pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniqueProductDetail {
    pub det_per: Certificate,
    pub per_per: Certificate,
    pub sigma_checked: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_det_det: Option<RingValueWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_det_per: Option<RingValueWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_per_per: Option<RingValueWire>,
}

/// One verification result; serializes to a single JSONL object whose
/// leading keys are pinned in this order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: InstanceKind,
    pub group: String,
    #[serde(rename = "A")]
    pub a: Vec<Vec<u64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<u64>>,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub certificate: Option<Certificate>,
    pub backend: String,
    pub seed: u64,
    pub millis: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<Vec<Vec<u64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cofactor: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_product_identity: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unique_product: Option<UniqueProductDetail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub(crate) fn residues_of(elems: &[GroupElement]) -> Vec<Vec<u64>> {
    elems.iter().map(|g| g.residues().to_vec()).collect()
}

pub(crate) fn push_note(report: &mut Report, text: &str) {
    match &mut report.note {
        Some(note) => {
            note.push_str("; ");
            note.push_str(text);
        }
        None => report.note = Some(text.to_string()),
    }
}

pub(crate) fn refuse(mut report: Report, why: String) -> Result<Report> {
    report.outcome = Outcome::Refused;
    push_note(&mut report, &why);
    Ok(report)
}

fn elements_from(group: &GroupSpec, rows: &[Vec<u64>]) -> Result<Vec<GroupElement>> {
    rows.iter()
        .map(|r| group.element(r.clone()))
        .collect::<Result<Vec<_>>>()
}

impl Report {
    pub(crate) fn base(instance: &Instance, backend: &str, seed: u64) -> Report {
        Report {
            kind: instance.kind(),
            group: instance.group().to_string(),
            a: residues_of(instance.a()),
            b: residues_of(instance.b()),
            outcome: Outcome::Refused,
            witness: None,
            certificate: None,
            backend: backend.to_string(),
            seed,
            millis: 0,
            h: None,
            sets: None,
            base: None,
            exponents: None,
            cofactor: None,
            b_product_identity: None,
            unique_product: None,
            note: None,
        }
    }

    pub fn to_jsonl(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Internal(format!("report to JSON: {e}")))
    }

    pub fn from_jsonl(line: &str) -> Result<Report> {
        serde_json::from_str(line.trim())
            .map_err(|e| Error::Parse(format!("bad report line: {e}")))
    }

    /// Process exit code convention: 0 confirms (witness, certificate, or a
    /// predicted absence), 1 flags a counterexample, 2 a refusal.
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::WitnessFound | Outcome::CertificateFound => 0,
            Outcome::Refused => 2,
            Outcome::NoWitness => {
                if self.kind == InstanceKind::Hall && self.b_product_identity == Some(false) {
                    0
                } else {
                    1
                }
            }
        }
    }
}

/// Which coefficient backend to compute in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Cyclotomic,
    Field {
        preferred_char: Option<u64>,
        degree: DegreeChoice,
    },
}

impl BackendChoice {
    pub fn build(&self, level: u64, caps: &Caps) -> Result<Backend> {
        match self {
            BackendChoice::Cyclotomic => Backend::cyclotomic(level, caps),
            BackendChoice::Field {
                preferred_char,
                degree,
            } => Backend::field(level, *preferred_char, *degree, caps),
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, BackendChoice::Field { .. })
    }
}

impl FromStr for BackendChoice {
    type Err = Error;

    /// `cyclotomic`, `field`, or `field:q` for a preferred characteristic.
    fn from_str(s: &str) -> Result<Self> {
        if s == "cyclotomic" {
            return Ok(BackendChoice::Cyclotomic);
        }
        if s == "field" {
            return Ok(BackendChoice::Field {
                preferred_char: None,
                degree: DegreeChoice::Minimal,
            });
        }
        if let Some(q) = s.strip_prefix("field:") {
            let q: u64 = q
                .parse()
                .map_err(|_| Error::Parse(format!("bad field characteristic '{q}'")))?;
            return Ok(BackendChoice::Field {
                preferred_char: Some(q),
                degree: DegreeChoice::Minimal,
            });
        }
        Err(Error::Parse(format!(
            "unknown backend '{s}' (expected cyclotomic, field, or field:q)"
        )))
    }
}

/// Knobs shared by every driver.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub backend: BackendChoice,
    pub strategy: Strategy,
    pub seed: u64,
    pub caps: Caps,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            backend: BackendChoice::Cyclotomic,
            strategy: Strategy::Auto,
            seed: 0,
            caps: Caps::default(),
        }
    }
}

/// Runs the driver for the instance kind and stamps elapsed time.
pub fn verify(instance: &Instance, opts: &VerifyOptions) -> Result<Report> {
    let started = Instant::now();
    let mut report = match instance.kind() {
        InstanceKind::Snevily => conjecture::verify_snevily(instance, opts)?,
        InstanceKind::Dkss => theorem::verify_dkss(instance, opts)?,
        InstanceKind::Hall => theorem::verify_hall(instance, opts)?,
        InstanceKind::ChiDet => conjecture::search_chi_det(instance, opts)?,
        InstanceKind::SunMulti => theorem::verify_sun_multi(instance, opts)?,
        InstanceKind::Powers => theorem::verify_powers(instance, opts)?,
        InstanceKind::UniqueProduct => conjecture::verify_unique_product(instance, opts)?,
        InstanceKind::Chebotarev => theorem::chebotarev_check(instance, opts)?,
    };
    soundness_check(&report)?;
    report.millis = started.elapsed().as_millis() as u64;
    Ok(report)
}

/// On kinds where a nonvanishing certificate proves a witness exists, a
/// report carrying one without a witness is incoherent.
fn soundness_check(report: &Report) -> Result<()> {
    let Some(cert) = &report.certificate else {
        return Ok(());
    };
    let nonzero = |v: &Option<RingValueWire>| v.as_ref().is_some_and(|w| !w.is_zero());
    let proves_witness = match report.kind {
        InstanceKind::Dkss | InstanceKind::Powers => {
            nonzero(&cert.det_a) && nonzero(&cert.per_b)
        }
        InstanceKind::UniqueProduct => report
            .unique_product
            .as_ref()
            .is_some_and(|d| nonzero(&d.det_per.det_a) && nonzero(&d.det_per.per_b)),
        InstanceKind::SunMulti => cert
            .dets
            .as_ref()
            .is_some_and(|ds| !ds.is_empty() && ds.iter().all(|d| !d.is_zero())),
        _ => false,
    };
    if proves_witness && report.witness.is_none() {
        return Err(Error::Internal(
            "certificate proves a witness exists but none was recorded".into(),
        ));
    }
    Ok(())
}

/// Rebuilds the backend a report names. Field descriptors are reconstructed
/// deterministically and cross-checked against the recorded degree.
fn backend_from_descriptor(desc: &str, caps: &Caps) -> Result<Backend> {
    if let Some(rest) = desc
        .strip_prefix("cyclotomic(level ")
        .and_then(|r| r.strip_suffix(')'))
    {
        let level: u64 = rest
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad backend descriptor '{desc}'")))?;
        return Backend::cyclotomic(level, caps);
    }
    if let Some(rest) = desc
        .strip_prefix("field(q ")
        .and_then(|r| r.strip_suffix(')'))
    {
        let parts: Vec<&str> = rest.split(", ").collect();
        let bad = || Error::Parse(format!("bad backend descriptor '{desc}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let q: u64 = parts[0].trim().parse().map_err(|_| bad())?;
        let degree: u64 = parts[1]
            .strip_prefix("degree ")
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        let level: u64 = parts[2]
            .strip_prefix("root order ")
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        for choice in [DegreeChoice::Minimal, DegreeChoice::EulerPhi] {
            if let Ok(backend) = Backend::field(level, Some(q), choice, caps) {
                if backend.descriptor() == desc {
                    return Ok(backend);
                }
            }
        }
        return Err(Error::Parse(format!(
            "descriptor '{desc}' names a field of degree {degree} that does not reconstruct"
        )));
    }
    Err(Error::Parse(format!("bad backend descriptor '{desc}'")))
}

fn mismatch(what: impl Into<String>) -> Error {
    Error::SpecMismatch(what.into())
}

/// Replays one serialized report: outcome coherence, witness products, and
/// certificate values are all recomputed and compared.
pub fn reverify(line: &str, caps: &Caps) -> Result<Report> {
    let report = Report::from_jsonl(line)?;
    check_report(&report, caps)?;
    Ok(report)
}

/// The recomputation behind [`reverify`].
pub fn check_report(report: &Report, caps: &Caps) -> Result<()> {
    let group = GroupSpec::parse(&report.group)?;
    let a = elements_from(&group, &report.a)?;
    let b = elements_from(&group, &report.b)?;

    match report.outcome {
        Outcome::WitnessFound => {
            if report.witness.is_none() {
                return Err(mismatch("outcome witness-found carries no witness"));
            }
        }
        Outcome::CertificateFound => {
            if report.certificate.is_none() && report.kind != InstanceKind::Chebotarev {
                return Err(mismatch("outcome certificate-found carries no certificate"));
            }
        }
        Outcome::NoWitness | Outcome::Refused => {
            if report.witness.is_some() {
                return Err(mismatch(format!(
                    "outcome {} carries a witness",
                    report.outcome
                )));
            }
        }
    }

    if let Some(witness) = &report.witness {
        match (report.kind, witness) {
            (InstanceKind::SunMulti, Witness::Many(pis)) => {
                let sets = report
                    .sets
                    .as_ref()
                    .ok_or_else(|| mismatch("multi-set witness without recorded sets"))?;
                if sets.len() != pis.len() + 1 {
                    return Err(mismatch("one permutation per extra row is required"));
                }
                let rows = sets
                    .iter()
                    .map(|rs| elements_from(&group, rs))
                    .collect::<Result<Vec<_>>>()?;
                let k = rows[0].len();
                let mut products = Vec::with_capacity(k);
                for j in 0..k {
                    let mut acc = rows[0][j].clone();
                    for (r, pi) in pis.iter().enumerate() {
                        if pi.len() != k {
                            return Err(mismatch("witness permutation length mismatch"));
                        }
                        acc = group.mul(&acc, &rows[r + 1][pi.apply(j)])?;
                    }
                    products.push(acc);
                }
                if !all_distinct(&group, &products)? {
                    return Err(mismatch("recorded multi-set witness products collide"));
                }
            }
            (InstanceKind::SunMulti, Witness::One(_)) => {
                return Err(mismatch("multi-set reports use a permutation list"));
            }
            (_, Witness::One(pi)) => {
                if pi.len() != a.len() {
                    return Err(mismatch("witness permutation length mismatch"));
                }
                let products = permuted_products(&group, &a, &b, pi)?;
                if !all_distinct(&group, &products)? {
                    return Err(mismatch("recorded witness products collide"));
                }
            }
            (_, Witness::Many(_)) => {
                return Err(mismatch("permutation lists only appear on multi-set reports"));
            }
        }
    }

    if let Some(cert) = &report.certificate {
        check_certificate(report, cert, &group, &a, &b, caps)?;
        if let Some(detail) = &report.unique_product {
            check_certificate(report, &detail.det_per, &group, &a, &b, caps)?;
            check_certificate(report, &detail.per_per, &group, &a, &b, caps)?;
        }
    }

    Ok(())
}

fn check_certificate(
    report: &Report,
    cert: &Certificate,
    group: &GroupSpec,
    a: &[GroupElement],
    b: &[GroupElement],
    caps: &Caps,
) -> Result<()> {
    let backend = backend_from_descriptor(&report.backend, caps)?;
    let chars = cert
        .chars
        .iter()
        .map(|label| Character::new(group, label.clone()))
        .collect::<Result<Vec<_>>>()?;
    if let Some(steps) = &cert.steps {
        if steps.len() != group.rank() {
            return Err(mismatch("step vector rank mismatch"));
        }
        for label in &cert.chars {
            for (i, (&l, &s)) in label.iter().zip(steps.iter()).enumerate() {
                if s == 0 || l % s != 0 {
                    return Err(mismatch(format!(
                        "label coordinate {i} = {l} is outside the stepped sublattice"
                    )));
                }
            }
        }
    }

    let check_value =
        |recorded: &Option<RingValueWire>, computed: crate::rings::RingValue, what: &str| {
            match recorded {
                None => Ok(()),
                Some(wire) if wire.matches(&computed) => Ok(()),
                Some(_) => Err(mismatch(format!("recorded {what} does not recompute"))),
            }
        };

    match report.kind {
        InstanceKind::Dkss => {
            let ma = CharacterMatrix::from_characters(&chars, a)?;
            let mb = CharacterMatrix::from_characters(&chars, b)?;
            check_value(&cert.det_a, ma.det(&backend)?, "det_a")?;
            check_value(&cert.per_b, mb.per(&backend)?, "per_b")?;
        }
        InstanceKind::Powers => {
            let cof = report
                .cofactor
                .ok_or_else(|| mismatch("powers certificate without cofactor"))? as i64;
            let proj = |elems: &[GroupElement]| -> Result<Vec<GroupElement>> {
                elems.iter().map(|g| group.pow(g, cof)).collect()
            };
            let ma = CharacterMatrix::from_characters(&chars, &proj(a)?)?;
            let mb = CharacterMatrix::from_characters(&chars, &proj(b)?)?;
            check_value(&cert.det_a, ma.det(&backend)?, "det_a")?;
            check_value(&cert.per_b, mb.per(&backend)?, "per_b")?;
        }
        InstanceKind::ChiDet => {
            let ma = CharacterMatrix::from_characters(&chars, a)?;
            let mb = CharacterMatrix::from_characters(&chars, b)?;
            check_value(&cert.det_a, ma.det(&backend)?, "det_a")?;
            check_value(&cert.det_b, mb.det(&backend)?, "det_b")?;
        }
        InstanceKind::UniqueProduct => {
            let ma = CharacterMatrix::from_characters(&chars, a)?;
            let mb = CharacterMatrix::from_characters(&chars, b)?;
            check_value(&cert.det_a, ma.det(&backend)?, "det_a")?;
            check_value(&cert.det_b, mb.det(&backend)?, "det_b")?;
            check_value(&cert.per_a, ma.per(&backend)?, "per_a")?;
            check_value(&cert.per_b, mb.per(&backend)?, "per_b")?;
        }
        InstanceKind::SunMulti => {
            let sets = report
                .sets
                .as_ref()
                .ok_or_else(|| mismatch("multi-set certificate without recorded sets"))?;
            let dets = cert
                .dets
                .as_ref()
                .ok_or_else(|| mismatch("multi-set certificate without determinants"))?;
            if dets.len() != sets.len() {
                return Err(mismatch("one determinant per row is required"));
            }
            for (row, det) in sets.iter().zip(dets.iter()) {
                let elems = elements_from(group, row)?;
                let m = CharacterMatrix::from_characters(&chars, &elems)?;
                let computed = m.det(&backend)?;
                if !det.matches(&computed) {
                    return Err(mismatch("recorded row determinant does not recompute"));
                }
            }
        }
        InstanceKind::Snevily | InstanceKind::Hall | InstanceKind::Chebotarev => {
            return Err(mismatch(format!(
                "kind {} does not carry certificates",
                report.kind
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn kind_round_trips_through_strings() {
        for kind in [
            InstanceKind::Snevily,
            InstanceKind::Dkss,
            InstanceKind::Hall,
            InstanceKind::ChiDet,
            InstanceKind::SunMulti,
            InstanceKind::Powers,
            InstanceKind::UniqueProduct,
            InstanceKind::Chebotarev,
        ] {
            assert_eq!(kind.as_str().parse::<InstanceKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.as_str()));
        }
        assert!("klein".parse::<InstanceKind>().is_err());
    }

    #[test]
    fn report_serializes_with_pinned_key_order() {
        let group = GroupSpec::parse("c5").unwrap();
        let a = vec![
            group.element(vec![0]).unwrap(),
            group.element(vec![1]).unwrap(),
        ];
        let instance = Instance::snevily(group, a.clone(), a).unwrap();
        let mut report = Report::base(&instance, "cyclotomic(level 5)", 7);
        report.outcome = Outcome::WitnessFound;
        report.witness = Some(Witness::One(Permutation::identity(2)));
        let line = report.to_jsonl().unwrap();
        assert_eq!(
            line,
            "{\"kind\":\"snevily\",\"group\":\"c5\",\"A\":[[0],[1]],\"B\":[[0],[1]],\
             \"outcome\":\"witness-found\",\"witness\":{\"images\":[1,2],\"sign\":1},\
             \"certificate\":null,\"backend\":\"cyclotomic(level 5)\",\"seed\":7,\"millis\":0}"
        );
        let back = Report::from_jsonl(&line).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn instance_constructors_validate() {
        let c4 = GroupSpec::parse("c4").unwrap();
        let c5 = GroupSpec::parse("c5").unwrap();
        let e5 = |r: u64| c5.element(vec![r]).unwrap();
        // Snevily needs odd order and distinct sets of equal size.
        assert!(Instance::snevily(c4.clone(), vec![c4.identity()], vec![c4.identity()]).is_err());
        assert!(Instance::snevily(c5.clone(), vec![e5(1), e5(1)], vec![e5(0), e5(2)]).is_err());
        assert!(Instance::snevily(c5.clone(), vec![e5(1)], vec![e5(0), e5(2)]).is_err());
        assert!(Instance::snevily(c5.clone(), vec![e5(1)], vec![e5(0)]).is_ok());
        // Hall needs |B| = |G|.
        assert!(Instance::hall(c5.clone(), vec![e5(0); 5], &caps()).is_ok());
        assert!(Instance::hall(c5.clone(), vec![e5(0); 4], &caps()).is_err());
        // Powers computes A from the base.
        let inst =
            Instance::powers(c5.clone(), e5(2), vec![1, 3], vec![e5(0), e5(0)]).unwrap();
        assert_eq!(residues_of(inst.a()), vec![vec![2], vec![1]]);
        // Chebotarev wants a prime level.
        assert!(Instance::chebotarev(6).is_err());
        assert_eq!(Instance::chebotarev(5).unwrap().group().order(), 5);
    }

    #[test]
    fn backend_choice_parses() {
        assert_eq!(
            "cyclotomic".parse::<BackendChoice>().unwrap(),
            BackendChoice::Cyclotomic
        );
        assert_eq!(
            "field:3".parse::<BackendChoice>().unwrap(),
            BackendChoice::Field {
                preferred_char: Some(3),
                degree: DegreeChoice::Minimal
            }
        );
        assert!("field:x".parse::<BackendChoice>().is_err());
        assert!("rational".parse::<BackendChoice>().is_err());
    }

    #[test]
    fn descriptor_round_trips_to_backend() {
        let cyc = Backend::cyclotomic(12, &caps()).unwrap();
        let re = backend_from_descriptor(&cyc.descriptor(), &caps()).unwrap();
        assert_eq!(re.descriptor(), cyc.descriptor());
        let field = Backend::field(5, Some(2), DegreeChoice::Minimal, &caps()).unwrap();
        let re = backend_from_descriptor(&field.descriptor(), &caps()).unwrap();
        assert_eq!(re.descriptor(), field.descriptor());
        assert!(backend_from_descriptor("exact(level 5)", &caps()).is_err());
    }

    #[test]
    fn exit_codes_follow_outcomes() {
        let group = GroupSpec::parse("c5").unwrap();
        let a = vec![group.element(vec![1]).unwrap()];
        let instance = Instance::snevily(group, a.clone(), a).unwrap();
        let mut report = Report::base(&instance, "cyclotomic(level 5)", 0);
        report.outcome = Outcome::WitnessFound;
        assert_eq!(report.exit_code(), 0);
        report.outcome = Outcome::NoWitness;
        assert_eq!(report.exit_code(), 1);
        report.outcome = Outcome::Refused;
        assert_eq!(report.exit_code(), 2);
        // A predicted Hall absence confirms the theorem.
        report.kind = InstanceKind::Hall;
        report.outcome = Outcome::NoWitness;
        report.b_product_identity = Some(false);
        assert_eq!(report.exit_code(), 0);
        report.b_product_identity = Some(true);
        assert_eq!(report.exit_code(), 1);
    }
}
