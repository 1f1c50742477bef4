use std::fs;
use std::path::PathBuf;

use bertini::localfactor::{parse_ratio, point_count_distribution, ratio_string, smooth_probability, zeta_inverse, PointFamily, SmoothFamily};
use bertini::SpaceKind;
use clap::Args;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::Outcome;
use crate::CliError;

const DEFAULT_FIXTURE: &str = include_str!("../fixtures/tables.json");

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct TablesArgs {
    /// Field size. Rows are only compared at the fixture's q.
    #[arg(long)]
    pub q: Option<u64>,
    /// Expected values; defaults to the built-in fixture.
    #[arg(long)]
    pub expected: Option<PathBuf>,
}

#[derive(Deserialize)]
struct Fixture {
    q: u64,
    smoothness: Vec<Row>,
    average_points: Vec<Row>,
}

#[derive(Deserialize)]
struct Row {
    bidegree: String,
    expected: String,
}

/// A recomputed table entry: exact when a closed form is known, otherwise
/// a float with a bound on its error.
enum Value {
    Exact(BigRational),
    Approx { value: f64, bound: f64 },
}

impl Value {
    fn show(&self) -> String {
        match self {
            Value::Exact(r) => ratio_string(r),
            Value::Approx { value, bound } => format!("{value:.10} +- {bound:.1e}"),
        }
    }

    fn approx(&self) -> (f64, f64) {
        match self {
            Value::Exact(r) => (r.to_f64().unwrap_or(f64::NAN), 0.0),
            Value::Approx { value, bound } => (*value, *bound),
        }
    }

    /// Rationals must match exactly; a decimal target is read as truncated
    /// to its printed digits.
    fn matches(&self, expected: &str) -> Result<bool, CliError> {
        if let Some((_, frac)) = expected.split_once('.') {
            let target: f64 = expected.parse().map_err(|_| CliError::Usage(format!("bad expected value {expected:?}")))?;
            let (v, bound) = self.approx();
            return Ok((v - target).abs() <= 10f64.powi(-(frac.len() as i32)) + bound);
        }
        let target = parse_ratio(expected)?;
        Ok(match self {
            Value::Exact(r) => *r == target,
            Value::Approx { value, bound } => (value - target.to_f64().unwrap_or(f64::NAN)).abs() <= *bound,
        })
    }
}

fn smoothness(bidegree: &str, q: u64) -> Result<Value, CliError> {
    let family = |n| smooth_probability(SmoothFamily { a: 0, n }, q, 1e-10);
    Ok(match bidegree {
        "(13d+11,7d)" => Value::Exact(zeta_inverse(SpaceKind::ProductOfLines, q, 3)?),
        "(2,d)" => {
            let v = family(2)?;
            Value::Approx { value: v.value, bound: v.tail_bound }
        }
        "(9,d)" => match family(9)?.exact {
            Some(r) => Value::Exact(r),
            None => return Err(CliError::Mismatch("no closed form for (9,d)".into())),
        },
        other => return Err(CliError::Usage(format!("no smoothness computation for bidegree {other}"))),
    })
}

fn average_points(bidegree: &str, q: u64) -> Result<Value, CliError> {
    let (family, a) = match bidegree {
        "(2,d)" => (PointFamily::TwoD, 0),
        "(3,d)" => (PointFamily::ThreeD, 0),
        "(d,2)" => (PointFamily::DTwo, 1),
        "(d,3)" => (PointFamily::DThree, 1),
        other => return Err(CliError::Usage(format!("no point-count computation for bidegree {other}"))),
    };
    Ok(Value::Exact(point_count_distribution(family, a, q)?.mean()))
}

pub fn verify_tables(args: &TablesArgs) -> Result<Outcome, CliError> {
    let text = match &args.expected {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => DEFAULT_FIXTURE.to_string(),
    };
    let fixture: Fixture = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad fixture: {e}")))?;
    let q = args.q.unwrap_or(fixture.q);
    let compare = q == fixture.q;

    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut ok = true;
    let tables: [(&str, &[Row], fn(&str, u64) -> Result<Value, CliError>); 2] =
        [("smoothness", &fixture.smoothness, smoothness), ("average_points", &fixture.average_points, average_points)];
    for (table, entries, compute) in tables {
        for row in entries {
            let got = compute(&row.bidegree, q)?;
            let status = match compare {
                false => "INFO",
                true if got.matches(&row.expected)? => "PASS",
                true => "FAIL",
            };
            ok &= status != "FAIL";
            let line = match status {
                "FAIL" => format!("FAIL {table} {}: expected {}, got {}", row.bidegree, row.expected, got.show()),
                "INFO" => format!("INFO {table} {}: {}", row.bidegree, got.show()),
                _ => format!("PASS {table} {}: {}", row.bidegree, got.show()),
            };
            lines.push(line);
            rows.push(json!({
                "table": table,
                "bidegree": row.bidegree,
                "expected": if compare { Some(&row.expected) } else { None },
                "computed": got.show(),
                "status": status,
            }));
        }
    }
    if !compare {
        lines.push(format!("q = {q}: no reference values, rows are informational"));
    }
    Ok(Outcome { payload: json!({ "q": q, "rows": rows, "pass": ok }), text: lines.join("\n"), ok })
}
