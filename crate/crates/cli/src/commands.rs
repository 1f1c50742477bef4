use std::fs;
use std::path::PathBuf;

use bertini::antibertini::{search_anti_bertini, verify_window, SearchOutcome, SearchParams};
use bertini::census::{
    cache_key, exhaustive_census_stored, mc_census, table_to_csv, CensusMode, CensusParams, CensusResult, CensusStore, ConvergenceRow,
};
use bertini::hirzebruch::{Chart, ClosedFiber, Surface};
use bertini::localfactor::{local_smooth_factor, ratio_string, smooth_probability, SmoothFamily};
use bertini::stabmap::{local_factor_from_image, stabilized_rank, RestrictionTarget, STABLE_WINDOW};
use clap::{ArgGroup, Args, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::tables::{verify_tables, TablesArgs};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Local smoothness factor at a closed fiber of degree e.
    LocalFactor(LocalFactorArgs),
    /// Limiting smoothness probability with a certified tail bound.
    SmoothProb(SmoothProbArgs),
    /// Exhaustive or Monte Carlo census of sections of bidegree (n, d).
    Census(CensusArgs),
    /// Recompute the smoothness and average-point tables.
    VerifyTables(TablesArgs),
    /// Stabilized rank of the restriction map to doubled fibers.
    StabRank(StabRankArgs),
    /// Search for a smooth curve meeting given curves singularly.
    AntiBertini(AntiBertiniArgs),
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct LocalFactorArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub e: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Also enumerate the stabilized image of the restriction map.
    #[arg(long)]
    pub from_image: bool,
    /// Surface F_a used for the image computation.
    #[arg(long, default_value_t = 0)]
    pub a: u32,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SmoothProbArgs {
    #[arg(long, default_value_t = 0)]
    pub a: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[command(group(ArgGroup::new("mode").required(true).args(["exhaustive", "samples"])))]
pub struct CensusArgs {
    #[arg(long, default_value_t = 0)]
    pub a: u32,
    #[arg(long, value_parser = clap::value_parser!(i64).range(0..))]
    pub n: i64,
    /// One or more values, comma separated.
    #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(i64).range(0..))]
    pub d: Vec<i64>,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, requires = "seed")]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Continue an exhaustive run from its checkpoint in the cache directory.
    #[arg(long)]
    pub resume: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct StabRankArgs {
    #[arg(long, default_value_t = 0)]
    pub a: u32,
    #[arg(long, value_parser = clap::value_parser!(i64).range(0..))]
    pub n: i64,
    #[arg(long)]
    pub q: u64,
    /// Degrees of the fibers in the target, comma separated. Repeated
    /// degrees pick different fibers.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub e: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct AntiBertiniArgs {
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    /// The curve sought has bidegree (k, k).
    #[arg(long)]
    pub k: i64,
    #[arg(long, default_value_t = 1)]
    pub j_max: i64,
    #[arg(long)]
    pub budget: usize,
    #[arg(long, default_value_t = 3)]
    pub max_point_degree: u32,
    #[arg(long, default_value_t = 500)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Count singular intersections with curves of bidegree (n, n + d) for
    /// n, d up to these bounds.
    #[arg(long)]
    pub window: bool,
    #[arg(long, default_value_t = 1)]
    pub window_n: i64,
    #[arg(long, default_value_t = 1)]
    pub window_d: i64,
}

/// Settings that shape output but not results.
pub struct Env {
    pub cache: Option<PathBuf>,
    pub float: bool,
}

pub struct Outcome {
    pub payload: Value,
    pub text: String,
    /// False on a verification mismatch.
    pub ok: bool,
}

impl Outcome {
    fn ok(payload: Value, text: String) -> Self {
        Outcome { payload, text, ok: true }
    }
}

fn show(r: &BigRational, float: bool) -> String {
    if float {
        format!("{}", r.to_f64().unwrap_or(f64::NAN))
    } else {
        ratio_string(r)
    }
}

fn first_fibers(q: u64, degrees: &[usize]) -> Result<Vec<ClosedFiber>, CliError> {
    let k = Surface::over(0, q)?.field().clone();
    let mut out: Vec<ClosedFiber> = Vec::new();
    for &e in degrees {
        if e == 0 {
            return Err(CliError::Usage("fiber degrees start at 1".into()));
        }
        let next = ClosedFiber::all_of_degree(&k, e)?
            .into_iter().find(|f| f.chart() == Chart::T && !out.contains(f))
            .ok_or_else(|| CliError::Usage(format!("ran out of fibers of degree {e}")))?;
        out.push(next);
    }
    Ok(out)
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LocalFactor(_) => "local-factor",
            Command::SmoothProb(_) => "smooth-prob",
            Command::Census(_) => "census",
            Command::VerifyTables(_) => "verify-tables",
            Command::StabRank(_) => "stab-rank",
            Command::AntiBertini(_) => "anti-bertini",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Census(c) => c.seed,
            Command::AntiBertini(c) => Some(c.seed),
            _ => None,
        }
    }

    pub fn execute(&self, env: &Env) -> Result<Outcome, CliError> {
        match self {
            Command::LocalFactor(args) => local_factor(args, env),
            Command::SmoothProb(args) => smooth_prob(args, env),
            Command::Census(args) => census(args, env),
            Command::VerifyTables(args) => verify_tables(args),
            Command::StabRank(args) => stab_rank(args),
            Command::AntiBertini(args) => anti_bertini(args),
        }
    }
}

fn local_factor(args: &LocalFactorArgs, env: &Env) -> Result<Outcome, CliError> {
    let closed = local_smooth_factor(args.q, args.e, args.n)?;
    if !args.from_image {
        return Ok(Outcome::ok(json!({ "closed_form": ratio_string(&closed) }), show(&closed, env.float)));
    }
    let fiber = first_fibers(args.q, &[args.e as usize])?.remove(0);
    let image = local_factor_from_image(&Surface::over(args.a, args.q)?, args.n as i64, &fiber)?;
    let equal = image == closed;
    let text = format!(
        "closed form {}\nimage       {}\n{}",
        show(&closed, env.float),
        show(&image, env.float),
        if equal { "EQUAL" } else { "DIFFER" }
    );
    let payload = json!({ "closed_form": ratio_string(&closed), "image": ratio_string(&image), "equal": equal });
    Ok(Outcome { payload, text, ok: equal })
}

fn smooth_prob(args: &SmoothProbArgs, env: &Env) -> Result<Outcome, CliError> {
    let v = smooth_probability(SmoothFamily { a: args.a, n: args.n }, args.q, args.eps)?;
    let text = match (&v.exact, env.float) {
        (Some(x), false) => ratio_string(x),
        (Some(x), true) => format!("{}", x.to_f64().unwrap_or(f64::NAN)),
        (None, _) => v.to_string(),
    };
    Ok(Outcome::ok(v.to_json(), text))
}

fn census(args: &CensusArgs, env: &Env) -> Result<Outcome, CliError> {
    if args.resume && env.cache.is_none() {
        return Err(CliError::Usage("--resume needs BERTINI_CACHE_DIR".into()));
    }
    let mut results: Vec<CensusResult> = Vec::new();
    for &d in &args.d {
        let params = CensusParams::new(args.a, args.n, d, args.q);
        let r = match args.samples {
            Some(samples) => mc_census(args.a, args.n, d, args.q, samples, args.seed.unwrap_or(0))?,
            None => {
                let checkpoint = env.cache.as_ref().map(|dir| dir.join(format!("{}.checkpoint.json", cache_key(&params, &CensusMode::Exhaustive))));
                if let Some(path) = checkpoint.as_ref().filter(|_| !args.resume) {
                    let _ = fs::remove_file(path);
                }
                let store = CensusStore { cache_dir: env.cache.clone(), checkpoint: checkpoint.clone() };
                let r = exhaustive_census_stored(params, &store)?;
                if let Some(path) = &checkpoint {
                    let _ = fs::remove_file(path);
                }
                r
            }
        };
        results.push(r);
    }
    let payload = match results.as_slice() {
        [one] => one.to_json(),
        many => Value::Array(many.iter().map(|r| r.to_json()).collect()),
    };
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&payload).expect("plain data"),
        Format::Csv => {
            let rows: Vec<ConvergenceRow> = results
                .iter()
                .map(|r| ConvergenceRow {
                    d: r.params.d,
                    smooth_fraction: r.smooth_fraction(),
                    radius: r.interval.map_or(0.0, |i| i.radius),
                    sections: r.nonzero(),
                })
                .collect();
            table_to_csv(&rows).trim_end().to_string()
        }
    };
    Ok(Outcome::ok(payload, text))
}

fn stab_rank(args: &StabRankArgs) -> Result<Outcome, CliError> {
    let fibers = first_fibers(args.q, &args.e)?;
    let target = RestrictionTarget::new(fibers)?;
    let r = stabilized_rank(&Surface::over(args.a, args.q)?, args.n, &target)?;
    let text = format!(
        "rank {} (jet dimension {}) from d = {}, constant over the window d = {}..={}\nranks {:?}",
        r.rank,
        target.jet_dimension(args.n as usize),
        r.d_star,
        r.d_star,
        r.d_star + STABLE_WINDOW as i64 - 1,
        r.ranks
    );
    let payload = json!({ "d_star": r.d_star, "rank": r.rank, "window": STABLE_WINDOW, "ranks": r.ranks });
    Ok(Outcome::ok(payload, text))
}

fn anti_bertini(args: &AntiBertiniArgs) -> Result<Outcome, CliError> {
    let params = SearchParams {
        q: args.q,
        k: args.k,
        j_max: args.j_max,
        budget: args.budget,
        max_point_degree: args.max_point_degree,
        trials: args.trials,
    };
    match search_anti_bertini(params, args.seed)? {
        SearchOutcome::Found(c) => {
            let reverified = c.reverify()?;
            let mut payload = json!({ "outcome": "found", "candidate": c.to_json(), "reverified": reverified });
            let mut text = format!(
                "found {} with {} constraints (solution space dimension {}), re-verified: {reverified}",
                c.section.to_json(),
                c.constraints.len(),
                c.solution_dimension
            );
            let mut ok = reverified;
            if args.window {
                let report = verify_window(&c.section, 1..=args.window_n, 0..=args.window_d)?;
                for r in &report.rows {
                    text.push_str(&format!(
                        "\n({}, {}): {} curves, {} contain X, {} meet X singularly",
                        r.n,
                        r.n + r.d,
                        r.curves,
                        r.containing,
                        r.singular
                    ));
                }
                text.push_str(if report.verified() { "\nwindow verified" } else { "\nwindow NOT verified" });
                ok &= report.verified();
                payload["window"] = serde_json::to_value(&report).expect("plain data");
            }
            Ok(Outcome { payload, text, ok })
        }
        SearchOutcome::NotFound { placed, reason } => Ok(Outcome {
            payload: json!({ "outcome": "not_found", "placed": placed, "reason": reason }),
            text: format!("no candidate after placing {placed} targets: {reason}"),
            ok: false,
        }),
    }
}
