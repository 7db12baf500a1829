//! `transversal`: single-instance verification, identity suites, and
//! campaign runs over finite abelian groups, with JSONL reports.
//!
//! Exit codes: 0 = witness/certificate found or statement confirmed,
//! 1 = counterexample or violated guarantee, 2 = refused or usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use transversal_core::caps::Caps;
use transversal_core::error::Error;
use transversal_core::group::{is_k_large, parse_element_list, GroupSpec};
use transversal_core::rings::DegreeChoice;
use transversal_core::suites;
use transversal_core::verify::campaign::{run_campaign, CampaignConfig};
use transversal_core::verify::{
    reverify, verify, BackendChoice, Instance, InstanceKind, VerifyOptions,
};

#[derive(Parser)]
#[command(
    name = "transversal",
    version,
    about = "Exact verifiers for distinct-product problems on finite abelian groups"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify one instance and print its report as a JSON line.
    Verify {
        /// snevily | dkss | hall | chi-det | sun-multi | powers |
        /// unique-product | chebotarev
        kind: String,
        /// Group presentation, e.g. c8 or c3xc9.
        #[arg(long)]
        group: String,
        /// First element list, e.g. "(0),(1),(2)" or "(0,1),(2,0)".
        #[arg(long = "A")]
        a: Option<String>,
        /// Second element list (repeats allowed where the statement does).
        #[arg(long = "B")]
        b: Option<String>,
        /// Subgroup generators for the dkss hypothesis check.
        #[arg(long = "H")]
        h: Option<String>,
        /// Semicolon-separated element lists for sun-multi.
        #[arg(long)]
        sets: Option<String>,
        /// Base element for powers.
        #[arg(long)]
        base: Option<String>,
        /// Comma-separated exponents for powers, e.g. 0,1,2.
        #[arg(long)]
        exponents: Option<String>,
        /// cyclotomic | field | field:q
        #[arg(long, default_value = "cyclotomic")]
        backend: String,
        /// Use the Euler-phi field degree instead of the minimal one.
        #[arg(long)]
        phi_degree: bool,
        /// auto | vandermonde | exhaustive | random[:trials]
        #[arg(long, default_value = "auto")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also append the report line to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named identity suite: lemma21 | eq22 | thm19 | chebotarev | rings.
    Suite {
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the suite's default instance count.
        #[arg(long)]
        trials: Option<u64>,
        /// Largest prime level for the chebotarev suite.
        #[arg(long)]
        max_p: Option<u64>,
    },
    /// Run a campaign from a JSON config and write JSONL reports.
    Campaign {
        config: PathBuf,
        /// Worker threads (default: all available).
        #[arg(long)]
        workers: Option<usize>,
        /// Override the config's output path.
        #[arg(long)]
        out: Option<String>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Report whether n satisfies the k-large divisor condition.
    Klarge { n: u64, k: u64 },
    /// Re-parse a JSONL report file and re-verify every line.
    Reverify { file: PathBuf },
}

fn exit_for(err: &Error) -> u8 {
    match err {
        // A broken invariant means a theorem guarantee failed to hold.
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn parse_one_element(group: &GroupSpec, text: &str) -> Result<
    transversal_core::group::GroupElement,
    Error,
> {
    let list = parse_element_list(group, text)?;
    match <[_; 1]>::try_from(list) {
        Ok([g]) => Ok(g),
        Err(list) => Err(Error::Parse(format!(
            "expected exactly one element, got {}",
            list.len()
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn build_instance(
    kind: InstanceKind,
    group: &GroupSpec,
    a: &Option<String>,
    b: &Option<String>,
    h: &Option<String>,
    sets: &Option<String>,
    base: &Option<String>,
    exponents: &Option<String>,
    caps: &Caps,
) -> Result<Instance, Error> {
    let need = |opt: &Option<String>, flag: &str| -> Result<String, Error> {
        opt.clone()
            .ok_or_else(|| Error::Config(format!("{} requires {flag}", kind.as_str())))
    };
    match kind {
        InstanceKind::Snevily => Instance::snevily(
            group.clone(),
            parse_element_list(group, &need(a, "--A")?)?,
            parse_element_list(group, &need(b, "--B")?)?,
        ),
        InstanceKind::Dkss => {
            let generators = match h {
                Some(text) => Some(parse_element_list(group, text)?),
                None => None,
            };
            Instance::dkss(
                group.clone(),
                parse_element_list(group, &need(a, "--A")?)?,
                parse_element_list(group, &need(b, "--B")?)?,
                generators,
                caps,
            )
        }
        InstanceKind::Hall => {
            if a.is_some() {
                return Err(Error::Config(
                    "hall takes the whole group as A; pass only --B".into(),
                ));
            }
            Instance::hall(
                group.clone(),
                parse_element_list(group, &need(b, "--B")?)?,
                caps,
            )
        }
        InstanceKind::ChiDet => Instance::chi_det(
            group.clone(),
            parse_element_list(group, &need(a, "--A")?)?,
            parse_element_list(group, &need(b, "--B")?)?,
        ),
        InstanceKind::SunMulti => {
            let rows = need(sets, "--sets")?
                .split(';')
                .map(|row| parse_element_list(group, row))
                .collect::<Result<Vec<_>, _>>()?;
            Instance::sun_multi(group.clone(), rows)
        }
        InstanceKind::Powers => {
            let exps = need(exponents, "--exponents")?
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad exponent `{t}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Instance::powers(
                group.clone(),
                parse_one_element(group, &need(base, "--base")?)?,
                exps,
                parse_element_list(group, &need(b, "--B")?)?,
            )
        }
        InstanceKind::UniqueProduct => Instance::unique_product(
            group.clone(),
            parse_element_list(group, &need(a, "--A")?)?,
            parse_element_list(group, &need(b, "--B")?)?,
        ),
        InstanceKind::Chebotarev => Instance::chebotarev(group.order()),
    }
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    let caps = Caps::default();
    match cli.cmd {
        Cmd::Verify {
            kind,
            group,
            a,
            b,
            h,
            sets,
            base,
            exponents,
            backend,
            phi_degree,
            strategy,
            seed,
            out,
        } => {
            let kind: InstanceKind = kind.parse()?;
            let group = GroupSpec::parse(&group)?;
            let instance =
                build_instance(kind, &group, &a, &b, &h, &sets, &base, &exponents, &caps)?;
            let mut backend: BackendChoice = backend.parse()?;
            if phi_degree {
                match &mut backend {
                    BackendChoice::Field { degree, .. } => *degree = DegreeChoice::EulerPhi,
                    BackendChoice::Cyclotomic => {
                        return Err(Error::Config(
                            "--phi-degree only applies to field backends".into(),
                        ))
                    }
                }
            }
            let opts = VerifyOptions {
                backend,
                strategy: strategy.parse()?,
                seed,
                caps,
            };
            let report = verify(&instance, &opts)?;
            let line = report.to_jsonl()?;
            println!("{line}");
            if let Some(path) = out {
                use std::io::Write as _;
                let mut file = std::fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)?;
                writeln!(file, "{line}")?;
            }
            Ok(report.exit_code() as u8)
        }
        Cmd::Suite {
            name,
            seed,
            trials,
            max_p,
        } => {
            let outcome = suites::run_named(&name, seed, trials, max_p, &caps)?;
            println!("{outcome}");
            Ok(if outcome.passed() { 0 } else { 1 })
        }
        Cmd::Campaign {
            config,
            workers,
            out,
            seed,
        } => {
            let path = config
                .to_str()
                .ok_or_else(|| Error::Config("config path is not valid UTF-8".into()))?;
            let mut config = CampaignConfig::from_path(path)?;
            if let Some(out) = out {
                config.out = Some(out);
            }
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let workers = workers
                .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
                .unwrap_or(1);
            let summary = run_campaign(&config, workers)?;
            println!(
                "campaign: {} reports, {} witnesses, {} certificates, {} refused, {} counterexamples",
                summary.reports.len(),
                summary.witnesses,
                summary.certificates,
                summary.refused,
                summary.counterexamples
            );
            if let Some(path) = &config.out {
                println!("reports written to {path}");
            }
            Ok(if summary.counterexamples > 0 { 1 } else { 0 })
        }
        Cmd::Klarge { n, k } => {
            let verdict = is_k_large(n, k)?;
            println!(
                "{n} is {}k-large for k = {k}",
                if verdict { "" } else { "not " }
            );
            Ok(0)
        }
        Cmd::Reverify { file } => {
            let text = std::fs::read_to_string(&file)?;
            let mut total = 0u64;
            let mut failures = 0u64;
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                total += 1;
                match reverify(line, &caps) {
                    Ok(report) => println!("line {}: ok ({})", i + 1, report.outcome),
                    Err(err) => {
                        failures += 1;
                        println!("line {}: FAILED: {err}", i + 1);
                    }
                }
            }
            println!("reverify: {}/{total} lines confirmed", total - failures);
            Ok(if failures > 0 { 1 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(
        kind: &str,
        group: &str,
        a: Option<&str>,
        b: Option<&str>,
        extra: (Option<&str>, Option<&str>, Option<&str>, Option<&str>),
    ) -> Result<Instance, Error> {
        let (h, sets, base, exponents) = extra;
        let own = |o: Option<&str>| o.map(str::to_string);
        build_instance(
            kind.parse()?,
            &GroupSpec::parse(group)?,
            &own(a),
            &own(b),
            &own(h),
            &own(sets),
            &own(base),
            &own(exponents),
            &Caps::default(),
        )
    }

    #[test]
    fn flags_build_each_instance_kind() {
        let none = (None, None, None, None);
        assert!(build("snevily", "c9", Some("(0),(1)"), Some("(2),(3)"), none).is_ok());
        assert!(build("dkss", "c25", Some("(0),(1)"), Some("(0),(5)"), none).is_ok());
        assert!(build("hall", "c3", None, Some("(0),(1),(2)"), none).is_ok());
        assert!(build(
            "sun-multi",
            "c7",
            None,
            None,
            (None, Some("(0),(1);(0),(2);(0),(3)"), None, None)
        )
        .is_ok());
        assert!(build(
            "powers",
            "c9",
            None,
            Some("(0),(4)"),
            (None, None, Some("(1)"), Some("0,1"))
        )
        .is_ok());
        assert!(build("chebotarev", "c5", None, None, none).is_ok());
    }

    #[test]
    fn missing_and_malformed_flags_are_usage_errors() {
        let none = (None, None, None, None);
        assert!(build("snevily", "c9", Some("(0),(1)"), None, none).is_err());
        assert!(build("hall", "c3", Some("(0)"), Some("(0),(1),(2)"), none).is_err());
        assert!(build("snevily", "c9", Some("0,1"), Some("(2),(3)"), none).is_err());
        assert!(build(
            "powers",
            "c9",
            None,
            Some("(0),(4)"),
            (None, None, Some("(1)"), Some("0,x"))
        )
        .is_err());
        assert!("nope".parse::<InstanceKind>().is_err());
    }

    #[test]
    fn internal_errors_signal_violations_and_the_rest_usage() {
        assert_eq!(exit_for(&Error::Internal("bad".into())), 1);
        assert_eq!(exit_for(&Error::Config("bad".into())), 2);
        assert_eq!(exit_for(&Error::Parse("bad".into())), 2);
    }
}
