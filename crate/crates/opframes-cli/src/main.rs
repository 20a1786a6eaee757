//! `opframes`: bounds, classification, probes, theorem certificates and
//! instance generation over the JSON instance format.
//!
//! Exit codes: 0 success, 1 error (bad input, missing data, I/O),
//! 2 a certifier hypothesis failed.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use opframes::instance::{GenKind, GenParams, Instance, KKind};
use opframes::perturb::{self, Sign};
use opframes::{adjointable, AdjointableOp, Certificate, Error, ModuleVector, OperatorFamily};

#[derive(Parser)]
#[command(name = "opframes", version, about = "operator frame bounds and stability certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal frame bounds (or K-frame bounds with --k-op) for one family
    Bounds {
        file: PathBuf,
        #[arg(long, default_value = "T")]
        family: String,
        /// use the instance's K operator for the lower bound
        #[arg(long)]
        k_op: bool,
    },
    /// Classify every family in the instance
    Check { file: PathBuf },
    /// Sampled norm-ratio extrema for one family
    Probe {
        file: PathBuf,
        #[arg(long, default_value = "T")]
        family: String,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        k_op: bool,
    },
    /// Produce a stability certificate for a named theorem
    Certify {
        file: PathBuf,
        #[arg(long)]
        theorem: Theorem,
        #[arg(long)]
        k_op: bool,
        /// closeness constant (min-constant)
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// distinguished family index for the sum theorems
        #[arg(long, default_value_t = 0)]
        p: usize,
        #[arg(long, default_value = "plus")]
        sign: SignArg,
        /// derive the theorem constant from the instance, then certify with it
        #[arg(long)]
        derive: bool,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a seeded instance and write it to --out
    Random {
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        target: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value = "co-isometry")]
        k_kind: KKindArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the factorization / bound invariant suite on an instance
    Lemmas {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    BesselPerturb,
    MinConstant,
    ScalarSum,
    LSum,
    Confined,
    AlphaBeta,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Frame,
    Bessel,
    Parseval,
    Pair,
    KInstance,
}

#[derive(Clone, Copy, ValueEnum)]
enum KKindArg {
    CoIsometry,
    General,
}

#[derive(Serialize)]
struct Report {
    command: String,
    instance_summary: Value,
    result: Value,
    status: String,
    timing_ms: f64,
}

fn summarize(inst: &Instance) -> Value {
    json!({
        "k": inst.k,
        "n": inst.n,
        "families": inst.families.iter()
            .map(|(name, f)| (name.clone(), json!(f.len())))
            .collect::<BTreeMap<_, _>>(),
        "has_k_operator": inst.k_operator.is_some(),
    })
}

/// CLI failure channel: usage problems exit 1, failed certifier
/// hypotheses exit 2.
enum Fail {
    Usage(String),
    Hypothesis(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

fn k_of<'a>(inst: &'a Instance, wanted: bool) -> Result<Option<&'a AdjointableOp>, Fail> {
    if !wanted {
        return Ok(None);
    }
    inst.k_operator
        .as_ref()
        .map(Some)
        .ok_or_else(|| Fail::Usage("instance has no k_operator".into()))
}

/// Families named `T1`, `T2`, ... in index order; falls back to plain `T`.
fn family_list(inst: &Instance, prefix: &str) -> Result<Vec<OperatorFamily>, Error> {
    let mut out = Vec::new();
    for i in 1.. {
        match inst.families.get(&format!("{prefix}{i}")) {
            Some(f) => out.push(f.clone()),
            None => break,
        }
    }
    if out.is_empty() {
        out.push(inst.family(prefix)?.clone());
    }
    Ok(out)
}

fn sequence<'a>(inst: &'a Instance, name: &str) -> Result<&'a perturb::ConfinedSequence, Error> {
    inst.sequences.get(name).ok_or_else(|| {
        Error::Precondition(format!("instance has no confined sequence `{name}`"))
    })
}

fn run_certify(
    inst: &Instance,
    theorem: Theorem,
    k_op: bool,
    m: Option<f64>,
    lambda: Option<f64>,
    mu: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    p: usize,
    sign: SignArg,
    derive: bool,
    samples: usize,
    seed: u64,
) -> Result<Certificate, Fail> {
    let k = k_of(inst, k_op)?;
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Fail::Usage(format!("--{flag} is required for this theorem")))
    };
    // a violated library precondition at this point is a statement about the
    // theorem hypothesis, not about the invocation
    let lift = |r: Result<Certificate, Error>| {
        r.map_err(|e| match e {
            Error::Precondition(msg) => Fail::Hypothesis(msg),
            other => Fail::Usage(other.to_string()),
        })
    };
    match theorem {
        Theorem::BesselPerturb => {
            let s = match sign {
                SignArg::Plus => Sign::Plus,
                SignArg::Minus => Sign::Minus,
            };
            lift(perturb::certify_bessel_perturbation(
                inst.family("T")?,
                inst.family("R")?,
                s,
            ))
        }
        Theorem::MinConstant => {
            let t = inst.family("T")?;
            let r = inst.family("R")?;
            let m = if derive {
                perturb::derive_min_constant(t, r, k)?
            } else {
                need(m, "m")?
            };
            lift(perturb::certify_min_constant(t, r, m, k))
        }
        Theorem::ScalarSum => {
            let fams = family_list(inst, "T")?;
            if inst.scalars.len() != fams.len() {
                return Err(Fail::Usage(format!(
                    "instance carries {} scalars for {} families",
                    inst.scalars.len(),
                    fams.len()
                )));
            }
            let lam = if derive {
                perturb::derive_sum_lambda(&fams, &inst.scalars, p, k)?.sqrt()
            } else {
                need(lambda, "lambda")?
            };
            lift(perturb::certify_scalar_sum(&fams, &inst.scalars, p, lam, k))
        }
        Theorem::LSum => {
            let ts = family_list(inst, "T")?;
            let rs = family_list(inst, "R")?;
            lift(perturb::certify_l_operator_sum(
                &ts,
                &rs,
                p,
                need(lambda, "lambda")?,
                None,
                k,
            ))
        }
        Theorem::Confined => {
            let k = k_of(inst, true)?.expect("checked");
            lift(perturb::certify_confined_perturbation(
                inst.family("T")?,
                inst.family("R")?,
                sequence(inst, "alpha")?,
                sequence(inst, "beta")?,
                need(lambda, "lambda")?,
                need(mu, "mu")?,
                k,
                samples,
                seed,
            ))
        }
        Theorem::AlphaBeta => {
            let k = k_of(inst, true)?.expect("checked");
            lift(perturb::certify_alpha_beta(
                inst.family("T")?,
                inst.family("R")?,
                need(alpha, "alpha")?,
                need(beta, "beta")?,
                k,
            ))
        }
    }
}

/// Per-instance invariant suite: adjoint/composition identities, the
/// three-way factorization equivalence, and the frame-operator bound
/// sandwiches, each over seeded random draws.
fn run_lemmas(inst: &Instance, trials: usize, seed: u64) -> Result<Value, Error> {
    let fam = inst
        .families
        .values()
        .next()
        .ok_or(Error::EmptyFamily)?;
    let (k, n) = (fam.k(), fam.n());
    let s = fam.frame_operator();
    let mut rng = opframes::sampling::rng_for_seed(seed);

    let mut norm_bound_pass = 0usize;
    for _ in 0..trials {
        let x = ModuleVector::random_unit(k, n, &mut rng);
        let sx = s.apply(&x)?;
        let lhs = x.inner_product(&sx)?.norm();
        let b = fam.optimal_bounds()?;
        let nx = x.scalar_norm();
        if lhs <= b.upper * nx * nx + 1e-9 && lhs + 1e-9 >= b.lower * nx * nx {
            norm_bound_pass += 1;
        }
    }

    let mut douglas_pass = 0usize;
    for i in 0..trials {
        let mut rng2 = opframes::sampling::rng_for_seed_stream(seed, i as u64 + 1);
        let s_op = AdjointableOp::from_flat(
            k,
            n,
            opframes::sampling::complex_gaussian(n * k, n * k, &mut rng2),
        )?;
        // t = s q is included by construction; t alone almost surely is not
        let q = AdjointableOp::from_flat(
            k,
            n,
            opframes::sampling::complex_gaussian(n * k, n * k, &mut rng2),
        )?;
        let t_in = q.compose(&s_op)?;
        let rep = adjointable::douglas_check(&t_in, &s_op)?;
        if rep.included && rep.lambda.is_some() && rep.residual <= 1e-8 {
            douglas_pass += 1;
        }
    }

    let mut sandwich_pass = 0usize;
    for i in 0..trials {
        let mut rng2 = opframes::sampling::rng_for_seed_stream(seed, 10_000 + i as u64);
        let t = AdjointableOp::from_flat(
            k,
            n,
            opframes::sampling::complex_gaussian(n * k, n * k, &mut rng2),
        )?;
        let (lo, hi) = adjointable::ttstar_bounds(&t)?;
        if lo >= 0.0 && hi + 1e-12 >= lo {
            sandwich_pass += 1;
        }
    }

    Ok(json!({
        "trials": trials,
        "norm_bound_pass": norm_bound_pass,
        "factorization_pass": douglas_pass,
        "operator_sandwich_pass": sandwich_pass,
        "all_pass": norm_bound_pass == trials
            && douglas_pass == trials
            && sandwich_pass == trials,
    }))
}

fn execute(cli: Cli) -> Result<(String, Value, Value, bool), Fail> {
    match cli.command {
        Command::Bounds { file, family, k_op } => {
            let inst = opframes::load_instance(&file)?;
            let fam = inst.family(&family)?;
            let result = if k_op {
                let k = k_of(&inst, true)?.expect("checked");
                serde_json::to_value(fam.k_optimal_bounds(k)?)?
            } else {
                serde_json::to_value(fam.optimal_bounds()?)?
            };
            Ok(("bounds".into(), summarize(&inst), result, true))
        }
        Command::Check { file } => {
            let inst = opframes::load_instance(&file)?;
            let mut out = BTreeMap::new();
            for (name, fam) in &inst.families {
                out.insert(name.clone(), serde_json::to_value(fam.optimal_bounds()?)?);
            }
            Ok(("check".into(), summarize(&inst), json!(out), true))
        }
        Command::Probe {
            file,
            family,
            samples,
            seed,
            k_op,
        } => {
            let inst = opframes::load_instance(&file)?;
            let k = k_of(&inst, k_op)?;
            let probe = inst.family(&family)?.norm_char_probe(samples, seed, k)?;
            let result = json!({
                "samples": samples,
                "seed": seed,
                "min_ratio": probe.min_ratio,
                "max_ratio": probe.max_ratio,
            });
            Ok(("probe".into(), summarize(&inst), result, true))
        }
        Command::Certify {
            file,
            theorem,
            k_op,
            m,
            lambda,
            mu,
            alpha,
            beta,
            p,
            sign,
            derive,
            samples,
            seed,
        } => {
            let inst = opframes::load_instance(&file)?;
            let cert = run_certify(
                &inst, theorem, k_op, m, lambda, mu, alpha, beta, p, sign, derive, samples, seed,
            )?;
            let ok = cert.hypothesis_ok;
            Ok((
                "certify".into(),
                summarize(&inst),
                serde_json::to_value(&cert)?,
                ok,
            ))
        }
        Command::Random {
            kind,
            k,
            n,
            count,
            seed,
            target,
            epsilon,
            k_kind,
            out,
        } => {
            let kind = match kind {
                Kind::Frame => GenKind::Frame,
                Kind::Bessel => GenKind::Bessel,
                Kind::Parseval => GenKind::Parseval,
                Kind::Pair => GenKind::Pair,
                Kind::KInstance => GenKind::KInstance,
            };
            let params = GenParams {
                target,
                epsilon,
                k_kind: Some(match k_kind {
                    KKindArg::CoIsometry => KKind::CoIsometry,
                    KKindArg::General => KKind::General,
                }),
            };
            let inst = opframes::random_instance(kind, k, n, count, seed, params)?;
            opframes::save_instance(&inst, &out)?;
            let result = json!({ "written": out.display().to_string(), "seed": seed });
            Ok(("random".into(), summarize(&inst), result, true))
        }
        Command::Lemmas { file, trials, seed } => {
            let inst = opframes::load_instance(&file)?;
            let result = run_lemmas(&inst, trials, seed)?;
            let ok = result["all_pass"].as_bool().unwrap_or(false);
            Ok(("lemmas".into(), summarize(&inst), result, ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage problems are exit 1 regardless of what clap prefers
            eprint!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let start = Instant::now();
    match execute(cli) {
        Ok((command, instance_summary, result, ok)) => {
            let status = if ok { "ok" } else { "hypothesis-failed" };
            let report = Report {
                command,
                instance_summary,
                result,
                status: status.into(),
                timing_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("report"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(Fail::Hypothesis(msg)) => {
            eprintln!("hypothesis failed: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
