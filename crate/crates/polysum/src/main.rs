use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use polysum::analytic::{crossover_bound, AnalyticProfile};
use polysum::checkpoint::checkpointed_scan;
use polysum::config::Config;
use polysum::error::{Error, Result};
use polysum::escalator::{self, TreeOptions};
use polysum::forms::complete_squares;
use polysum::local::DensityCache;
use polysum::parse::parse_sum;
use polysum::report::{self, Record};
use polysum::sums::{PolygonalSum, Truant};
use polysum::verify::{self, VerificationReport};

/// Bound above which verification must be explicitly opted into and is
/// checkpointed.
const UNBOUNDED_THRESHOLD: u64 = 1_000_000;

#[derive(Parser)]
#[command(name = "polysum", version, about = "Sums of triangular numbers and squares")]
struct Cli {
    /// Optional TOML config with default bounds, epsilon, and cusp constants.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Least positive integer the sum does not represent.
    Truant {
        sum: String,
        #[arg(long, default_value_t = escalator::DEFAULT_CAP)]
        cap: u64,
    },
    /// Whether the sum represents n, with a witness.
    Represents { sum: String, n: u64 },
    /// Missing integers of the sum on [1, bound].
    Sieve {
        sum: String,
        #[arg(long)]
        bound: u64,
    },
    /// Build the escalator tree and print its truant structure.
    Tree {
        #[arg(long, default_value_t = escalator::DEFAULT_CAP)]
        cap: u64,
        #[arg(long)]
        no_prune_euler: bool,
    },
    /// Complete squares: the congruence form, shift pair, and geometry.
    Reduce { sum: String },
    /// Local densities of the shifted target at the relevant primes.
    Local {
        sum: String,
        n: u64,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Analytic constants for a sum, and the crossover if a cusp constant
    /// is supplied.
    Constants {
        sum: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        cg: Option<f64>,
    },
    /// Crossover bound from explicitly given constants.
    Crossover {
        #[arg(long)]
        ce: f64,
        #[arg(long)]
        cg: f64,
        #[arg(long)]
        ceps: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Run one verification claim, or all of them.
    Verify {
        /// Claim id, or `all`.
        #[arg(default_value = "all")]
        claim: String,
        #[arg(long)]
        bound: Option<u64>,
        /// Allow bounds beyond 10^6 (hours-scale; checkpointed).
        #[arg(long)]
        unbounded_ok: bool,
        /// Checkpoint file for resumable long-range scans.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

fn parse_tree_sum(text: &str) -> Result<PolygonalSum> {
    let sum = parse_sum(text)?;
    if let Some(t) = sum.terms().iter().find(|t| t.order > 4) {
        return Err(Error::Invalid(format!(
            "order {} not supported here; only P3 and P4 appear in the tree",
            t.order
        )));
    }
    Ok(sum)
}

fn emit(claim: &str, bound: u64, pass: bool, data: serde_json::Value) -> bool {
    let record = Record {
        claim: claim.to_string(),
        status: if pass {
            verify::Status::Pass
        } else {
            verify::Status::Fail
        },
        bound,
        data,
    };
    println!("{}", record.to_line());
    pass
}

fn run(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Truant { sum, cap } => {
            let s = parse_tree_sum(&sum)?;
            let truant = s.truant(cap)?;
            eprintln!("{s}: {truant:?}");
            Ok(emit(
                &format!("truant:{s}"),
                cap,
                true,
                match truant {
                    Truant::Truant(t) => json!({"truant": t}),
                    Truant::UniversalUpTo(b) => json!({"universal_up_to": b}),
                },
            ))
        }
        Command::Represents { sum, n } => {
            let s = parse_tree_sum(&sum)?;
            let witness = s.represents(n);
            eprintln!(
                "{s} {} {n}",
                if witness.is_some() {
                    "represents"
                } else {
                    "does not represent"
                }
            );
            let found = witness.is_some();
            emit(
                &format!("represents:{s}:{n}"),
                n,
                true,
                json!({"represented": found, "witness": witness.map(|w| w.assignment)}),
            );
            Ok(found)
        }
        Command::Sieve { sum, bound } => {
            let s = parse_tree_sum(&sum)?;
            let set = s.represented_set(bound)?;
            let missing: Vec<u64> = set.missing().collect();
            eprintln!("{s}: {} missing up to {bound}", missing.len());
            Ok(emit(
                &format!("sieve:{s}"),
                bound,
                true,
                json!({"missing": missing, "represented": set.count_represented()}),
            ))
        }
        Command::Tree {
            cap,
            no_prune_euler,
        } => {
            let tree = escalator::build_tree(&TreeOptions {
                cap,
                prune_euler: !no_prune_euler,
                parallel: true,
            })?;
            let truants = tree.truant_set();
            for depth in 1..=tree.max_non_universal_depth() {
                for (s, t) in tree.truant_table(depth) {
                    eprintln!("depth {depth}: {s} -> {t}");
                }
            }
            Ok(emit(
                "tree",
                cap,
                true,
                json!({
                    "nodes": tree.nodes().len(),
                    "truants": truants,
                    "max_non_universal_depth": tree.max_non_universal_depth(),
                }),
            ))
        }
        Command::Reduce { sum } => {
            let s = parse_tree_sum(&sum)?;
            let form = complete_squares(&s)?;
            let g = form.geometry();
            eprintln!(
                "{s}: target {}n+{}, D={}, N={}",
                form.scale, form.offset, g.discriminant, g.level
            );
            Ok(emit(
                &format!("reduce:{s}"),
                0,
                true,
                json!({"form": form, "geometry": g}),
            ))
        }
        Command::Local { sum, n, prime } => {
            let s = parse_tree_sum(&sum)?;
            let form = complete_squares(&s)?;
            let cache = DensityCache::new(&form);
            let target = form.scale * n + form.offset;
            let primes = match prime {
                Some(p) => vec![p],
                None => {
                    let mut ps = polysum::local::prime_factors(cache.level());
                    ps.extend(polysum::local::prime_factors(target));
                    ps.sort_unstable();
                    ps.dedup();
                    ps
                }
            };
            let mut densities = Vec::new();
            for p in primes {
                let d = cache.local_density(target, p)?;
                eprintln!("beta_{p}({target}) = {}", d.value);
                densities.push(json!({
                    "prime": p,
                    "value": d.value.to_string(),
                    "stabilized_at": d.stabilized_at,
                }));
            }
            Ok(emit(
                &format!("local:{s}:{n}"),
                n,
                true,
                json!({"target": target, "densities": densities}),
            ))
        }
        Command::Constants { sum, eps, cg } => {
            let s = parse_tree_sum(&sum)?;
            let form = complete_squares(&s)?;
            let profile = AnalyticProfile::new(&form, 1e-9);
            let eps = eps.unwrap_or_else(|| config.epsilon());
            let cg = cg.or_else(|| config.cusp_constant(&s.to_string()));
            let c_e = profile.constant_ce()?;
            let ceps = profile.constant_ceps(eps)?;
            eprintln!("{s}: C_E = {c_e:.6}, C_eps({eps}) = {:.6}", ceps.value);
            let crossover = match cg {
                Some(cg) => {
                    let r = profile.crossover(cg, eps)?;
                    eprintln!("crossover at N0 = {}", r.bound);
                    Some(r)
                }
                None => None,
            };
            Ok(emit(
                &format!("constants:{s}"),
                0,
                true,
                json!({"c_e": c_e, "c_eps": ceps, "crossover": crossover}),
            ))
        }
        Command::Crossover { ce, cg, ceps, eps } => {
            let bound = crossover_bound(ce, cg, ceps, eps);
            eprintln!("N0 = {bound}");
            Ok(emit(
                "crossover",
                bound,
                true,
                json!({"c_e": ce, "c_g": cg, "c_eps": ceps, "epsilon": eps, "n0": bound}),
            ))
        }
        Command::Verify {
            claim,
            bound,
            unbounded_ok,
            checkpoint,
        } => {
            let bound = bound.or(config.bound);
            if bound.is_some_and(|b| b > UNBOUNDED_THRESHOLD) && !unbounded_ok {
                return Err(Error::Invalid(format!(
                    "bound {} exceeds {UNBOUNDED_THRESHOLD}; pass --unbounded-ok",
                    bound.unwrap()
                )));
            }
            let reports = if claim == "all" {
                verify::run_all(bound, true)?
            } else if let (Some(path), Some(b)) = (&checkpoint, bound) {
                vec![run_checkpointed(&claim, b, path)?]
            } else {
                vec![verify::run_by_id(&claim, bound)?]
            };
            print!("{}", report::to_jsonl(&reports));
            eprintln!("{}", report::summary(&reports));
            Ok(reports.iter().all(|r| r.passed()))
        }
    }
}

/// Resumable variant of a set-membership claim: the sieve is rebuilt, but
/// the window-by-window comparison is checkpointed and skipped on resume.
fn run_checkpointed(claim: &str, bound: u64, path: &std::path::Path) -> Result<VerificationReport> {
    let all = verify::exceptional_set_claims();
    let set_claim = all
        .iter()
        .find(|(id, _)| id == claim)
        .map(|(_, c)| c)
        .ok_or_else(|| {
            Error::Invalid(format!(
                "claim `{claim}` does not support checkpointing; only set claims do"
            ))
        })?;
    let set = set_claim.sum.represented_set(bound)?;
    let (_, failures) = checkpointed_scan(path, claim, bound, |lo, hi| {
        Ok((lo..=hi)
            .filter(|&n| {
                let missed = !set.contains(n);
                let excluded = set_claim.family.excludes(n);
                match set_claim.mode {
                    verify::ClaimMode::Exact => missed != excluded,
                    verify::ClaimMode::Containment => missed && !excluded,
                }
            })
            .collect())
    })?;
    Ok(VerificationReport {
        claim: claim.to_string(),
        status: if failures.is_empty() {
            verify::Status::Pass
        } else {
            verify::Status::Fail
        },
        bound,
        counterexamples: failures,
        data: json!({"sum": set_claim.sum.to_string(), "mode": set_claim.mode, "checkpointed": true}),
        wall_time_ms: 0,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
