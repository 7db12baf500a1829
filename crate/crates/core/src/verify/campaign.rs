//! Batch campaigns: families of sampled instances with deterministic
//! per-instance seeds, parallel workers, and JSONL output.
//!
//! Reports come back in task-definition order regardless of worker
//! scheduling, so two runs of one config differ only in timing fields.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::chars::Strategy;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};

use super::{verify, BackendChoice, Instance, InstanceKind, Outcome, Report, VerifyOptions};

/// Which groups a campaign covers: an explicit list of specs, or every
/// factorization of every odd order up to a bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Family {
    Specs { specs: Vec<String> },
    OddOrders { odd_orders_up_to: u64 },
}

fn default_backend() -> String {
    "cyclotomic".into()
}

fn default_strategy() -> String {
    "auto".into()
}

/// A campaign description, loadable from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub family: Family,
    pub kinds: Vec<InstanceKind>,
    pub k_min: usize,
    pub k_max: usize,
    pub samples: u64,
    pub seed: u64,
    #[serde(default = "default_backend")]
    pub backend: String,
    #[serde(default = "default_strategy")]
    pub strategy: String,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub out: Option<String>,
}

impl CampaignConfig {
    pub fn from_path(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("campaign config {path}: {e}")))
    }
}

/// Every multiset of factors >= 2 multiplying to n, ascending within each
/// factorization, smaller factors explored first.
pub(crate) fn factorizations(n: u64) -> Vec<Vec<u64>> {
    fn go(n: u64, min: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let mut d = min;
        while d * d <= n {
            if n % d == 0 {
                prefix.push(d);
                go(n / d, d, prefix, out);
                prefix.pop();
            }
            d += 1;
        }
        if n >= min {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    go(n, 2, &mut prefix, &mut out);
    out
}

/// Expands a family to canonical group spec strings.
pub fn expand_family(family: &Family) -> Result<Vec<String>> {
    match family {
        Family::Specs { specs } => specs
            .iter()
            .map(|s| Ok(GroupSpec::parse(s)?.to_string()))
            .collect(),
        Family::OddOrders { odd_orders_up_to } => {
            let mut out = Vec::new();
            let mut order = 3u64;
            while order <= *odd_orders_up_to {
                for factors in factorizations(order) {
                    let parts: Vec<String> = factors.iter().map(|f| format!("c{f}")).collect();
                    out.push(parts.join("x"));
                }
                order += 2;
            }
            Ok(out)
        }
    }
}

/// FNV-1a over the task identity, finalized splitmix-style, so every
/// instance draws a stable seed independent of scheduling.
fn instance_seed(
    campaign_seed: u64,
    group: &str,
    kind: InstanceKind,
    k: usize,
    sample: u64,
) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let eat = |h: u64, bytes: &[u8]| -> u64 {
        let mut h = h;
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x1_0000_0000_01b3);
        }
        h
    };
    h = eat(h, &campaign_seed.to_le_bytes());
    h = eat(h, group.as_bytes());
    h = eat(h, kind.as_str().as_bytes());
    h = eat(h, &(k as u64).to_le_bytes());
    h = eat(h, &sample.to_le_bytes());
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
enum Task {
    Sample {
        group: String,
        kind: InstanceKind,
        k: usize,
        seed: u64,
    },
    RefusedCell {
        group: String,
        kind: InstanceKind,
        reason: String,
        seed: u64,
    },
}

/// A structurally impossible cell gets one refused report instead of a
/// sample's worth of failures.
fn cell_refusal(group: &GroupSpec, kind: InstanceKind, k: usize) -> Option<String> {
    let order = group.order();
    let needs_subset = matches!(
        kind,
        InstanceKind::Snevily
            | InstanceKind::Dkss
            | InstanceKind::ChiDet
            | InstanceKind::SunMulti
            | InstanceKind::UniqueProduct
    );
    if needs_subset && (k as u64) > order {
        return Some(format!("k = {k} exceeds |G| = {order}"));
    }
    match kind {
        InstanceKind::Snevily if order % 2 == 0 => {
            Some(format!("group order {order} is even"))
        }
        InstanceKind::Hall if order as usize > super::MAX_WITNESS_K => Some(format!(
            "witness search supports |G| <= {}, got {order}",
            super::MAX_WITNESS_K
        )),
        InstanceKind::SunMulti if group.exponent() != order => {
            Some(format!("group {group} is not cyclic"))
        }
        InstanceKind::Chebotarev => {
            if group.rank() != 1 || crate::group::smallest_prime_divisor(order).ok() != Some(order)
            {
                Some(format!("level {group} is not a prime cycle"))
            } else {
                None
            }
        }
        _ => None,
    }
}

pub(crate) fn sample_distinct<R: Rng>(
    elems: &[GroupElement],
    k: usize,
    rng: &mut R,
) -> Vec<GroupElement> {
    let mut indices: Vec<usize> = (0..elems.len()).collect();
    let (picked, _) = indices.partial_shuffle(rng, k);
    picked.iter().map(|&i| elems[i].clone()).collect()
}

pub(crate) fn sample_arbitrary<R: Rng>(
    elems: &[GroupElement],
    k: usize,
    rng: &mut R,
) -> Vec<GroupElement> {
    (0..k)
        .map(|_| elems[rng.gen_range(0..elems.len())].clone())
        .collect()
}

fn build_instance(
    group: &GroupSpec,
    kind: InstanceKind,
    k: usize,
    seed: u64,
    caps: &Caps,
) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elems = group.enumerate(caps)?;
    match kind {
        InstanceKind::Snevily => Instance::snevily(
            group.clone(),
            sample_distinct(&elems, k, &mut rng),
            sample_distinct(&elems, k, &mut rng),
        ),
        InstanceKind::Dkss => Instance::dkss(
            group.clone(),
            sample_distinct(&elems, k, &mut rng),
            sample_arbitrary(&elems, k, &mut rng),
            None,
            caps,
        ),
        InstanceKind::Hall => Instance::hall(
            group.clone(),
            sample_arbitrary(&elems, elems.len(), &mut rng),
            caps,
        ),
        InstanceKind::ChiDet => Instance::chi_det(
            group.clone(),
            sample_distinct(&elems, k, &mut rng),
            sample_distinct(&elems, k, &mut rng),
        ),
        InstanceKind::SunMulti => {
            let rows = (0..3)
                .map(|_| sample_distinct(&elems, k, &mut rng))
                .collect();
            Instance::sun_multi(group.clone(), rows)
        }
        InstanceKind::Powers => {
            let base = loop {
                let g = elems[rng.gen_range(0..elems.len())].clone();
                if g != group.identity() {
                    break g;
                }
            };
            let exponents: Vec<i64> = (0..k as i64).collect();
            Instance::powers(
                group.clone(),
                base,
                exponents,
                sample_arbitrary(&elems, k, &mut rng),
            )
        }
        InstanceKind::UniqueProduct => Instance::unique_product(
            group.clone(),
            sample_distinct(&elems, k, &mut rng),
            sample_distinct(&elems, k, &mut rng),
        ),
        InstanceKind::Chebotarev => Instance::chebotarev(group.order()),
    }
}

/// A copy-paste invocation reproducing one report.
fn replay_command(report: &Report) -> String {
    let fmt_elems = |rows: &[Vec<u64>]| -> String {
        rows.iter()
            .map(|r| {
                let inner: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("({})", inner.join(","))
            })
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut cmd = format!(
        "transversal verify {} --group {} --seed {}",
        report.kind, report.group, report.seed
    );
    match report.kind {
        InstanceKind::SunMulti => {
            if let Some(sets) = &report.sets {
                let rows: Vec<String> = sets.iter().map(|r| fmt_elems(r)).collect();
                cmd.push_str(&format!(" --sets \"{}\"", rows.join(";")));
            }
        }
        InstanceKind::Powers => {
            if let Some(base) = &report.base {
                cmd.push_str(&format!(" --base \"{}\"", fmt_elems(&[base.clone()])));
            }
            if let Some(exps) = &report.exponents {
                let list: Vec<String> = exps.iter().map(|e| e.to_string()).collect();
                cmd.push_str(&format!(" --exponents {}", list.join(",")));
            }
            cmd.push_str(&format!(" --B \"{}\"", fmt_elems(&report.b)));
        }
        InstanceKind::Chebotarev => {}
        InstanceKind::Hall => {
            cmd.push_str(&format!(" --B \"{}\"", fmt_elems(&report.b)));
        }
        _ => {
            cmd.push_str(&format!(
                " --A \"{}\" --B \"{}\"",
                fmt_elems(&report.a),
                fmt_elems(&report.b)
            ));
        }
    }
    cmd
}

/// The aggregate outcome of one campaign.
#[derive(Debug)]
pub struct CampaignSummary {
    pub reports: Vec<Report>,
    pub witnesses: u64,
    pub certificates: u64,
    pub refused: u64,
    pub counterexamples: u64,
    pub jsonl: String,
}

fn refused_report(group: &str, kind: InstanceKind, seed: u64, reason: &str) -> Report {
    Report {
        kind,
        group: group.to_string(),
        a: Vec::new(),
        b: Vec::new(),
        outcome: Outcome::Refused,
        witness: None,
        certificate: None,
        backend: String::new(),
        seed,
        millis: 0,
        h: None,
        sets: None,
        base: None,
        exponents: None,
        cofactor: None,
        b_product_identity: None,
        unique_product: None,
        note: Some(reason.to_string()),
    }
}

struct HardFailure {
    task: Task,
    message: String,
}

fn run_task(task: &Task, opts_base: &VerifyOptions) -> std::result::Result<Report, HardFailure> {
    match task {
        Task::RefusedCell {
            group,
            kind,
            reason,
            seed,
        } => Ok(refused_report(group, *kind, *seed, reason)),
        Task::Sample {
            group,
            kind,
            k,
            seed,
        } => {
            let parsed = match GroupSpec::parse(group) {
                Ok(g) => g,
                Err(e) => {
                    return Err(HardFailure {
                        task: task.clone(),
                        message: e.to_string(),
                    })
                }
            };
            let instance = match build_instance(&parsed, *kind, *k, *seed, &opts_base.caps) {
                Ok(i) => i,
                Err(Error::Internal(m)) => {
                    return Err(HardFailure {
                        task: task.clone(),
                        message: m,
                    })
                }
                Err(e) => return Ok(refused_report(group, *kind, *seed, &e.to_string())),
            };
            let mut opts = opts_base.clone();
            opts.seed = *seed;
            match verify(&instance, &opts) {
                Ok(mut report) => {
                    let proven = matches!(
                        kind,
                        InstanceKind::Dkss | InstanceKind::Powers | InstanceKind::SunMulti
                    );
                    if report.outcome == Outcome::NoWitness && proven {
                        return Err(HardFailure {
                            task: task.clone(),
                            message: "no witness on a proven instance".into(),
                        });
                    }
                    if report.exit_code() == 1 {
                        let replay = replay_command(&report);
                        super::push_note(&mut report, &format!("replay: {replay}"));
                    }
                    Ok(report)
                }
                Err(Error::Internal(m)) => Err(HardFailure {
                    task: task.clone(),
                    message: m,
                }),
                Err(e) => Ok(refused_report(group, *kind, *seed, &e.to_string())),
            }
        }
    }
}

/// Runs every task in the config on the given number of worker threads.
/// An internal error or a missing witness on a proven statement aborts the
/// whole campaign with a serialized reproducer in the error.
pub fn run_campaign(config: &CampaignConfig, workers: usize) -> Result<CampaignSummary> {
    if config.kinds.is_empty() {
        return Err(Error::Config("campaign needs at least one kind".into()));
    }
    if config.k_min < 1 || config.k_max < config.k_min {
        return Err(Error::Config(format!(
            "bad k range {}..{}",
            config.k_min, config.k_max
        )));
    }
    if config.samples < 1 {
        return Err(Error::Config("campaign needs at least one sample".into()));
    }
    let backend: BackendChoice = config.backend.parse()?;
    let strategy: Strategy = config.strategy.parse()?;
    let groups = expand_family(&config.family)?;

    let mut tasks = Vec::new();
    for group_text in &groups {
        let group = GroupSpec::parse(group_text)?;
        for &kind in &config.kinds {
            // Hall and prime-level checks ignore k; run them once per group.
            let k_range: Vec<usize> =
                if matches!(kind, InstanceKind::Hall | InstanceKind::Chebotarev) {
                    vec![config.k_min]
                } else {
                    (config.k_min..=config.k_max).collect()
                };
            for k in k_range {
                if let Some(reason) = cell_refusal(&group, kind, k) {
                    tasks.push(Task::RefusedCell {
                        group: group_text.clone(),
                        kind,
                        reason,
                        seed: instance_seed(config.seed, group_text, kind, k, 0),
                    });
                    continue;
                }
                let samples = if kind == InstanceKind::Chebotarev {
                    1
                } else {
                    config.samples
                };
                for sample in 0..samples {
                    tasks.push(Task::Sample {
                        group: group_text.clone(),
                        kind,
                        k,
                        seed: instance_seed(config.seed, group_text, kind, k, sample),
                    });
                }
            }
        }
    }

    let opts_base = VerifyOptions {
        backend,
        strategy,
        seed: 0,
        caps: config.caps.clone(),
    };
    let slots: Vec<Mutex<Option<std::result::Result<Report, HardFailure>>>> =
        (0..tasks.len()).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let workers = workers.max(1).min(tasks.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let outcome = run_task(&tasks[i], &opts_base);
                if outcome.is_err() {
                    stop.store(true, Ordering::Relaxed);
                }
                *slots[i].lock().unwrap() = Some(outcome);
            });
        }
    });

    let mut reports = Vec::with_capacity(tasks.len());
    for slot in slots {
        match slot.into_inner().unwrap() {
            Some(Ok(report)) => reports.push(report),
            Some(Err(failure)) => {
                let reproducer = serde_json::json!({
                    "error": failure.message,
                    "task": match &failure.task {
                        Task::Sample { group, kind, k, seed } => serde_json::json!({
                            "group": group, "kind": kind.as_str(), "k": k, "seed": seed,
                        }),
                        Task::RefusedCell { group, kind, .. } => serde_json::json!({
                            "group": group, "kind": kind.as_str(),
                        }),
                    },
                });
                return Err(Error::Internal(format!(
                    "campaign aborted: {}; reproducer: {reproducer}",
                    failure.message
                )));
            }
            // Slots past an abort stay empty; unreachable without one.
            None => continue,
        }
    }

    let mut jsonl = String::new();
    for report in &reports {
        jsonl.push_str(&report.to_jsonl()?);
        jsonl.push('\n');
    }
    if let Some(path) = &config.out {
        std::fs::write(path, &jsonl)?;
    }
    let witnesses = reports
        .iter()
        .filter(|r| r.outcome == Outcome::WitnessFound)
        .count() as u64;
    let certificates = reports.iter().filter(|r| r.certificate.is_some()).count() as u64;
    let refused = reports
        .iter()
        .filter(|r| r.outcome == Outcome::Refused)
        .count() as u64;
    let counterexamples = reports.iter().filter(|r| r.exit_code() == 1).count() as u64;
    Ok(CampaignSummary {
        reports,
        witnesses,
        certificates,
        refused,
        counterexamples,
        jsonl,
    })
}
