//! Subcommand bodies. Each returns the text to print so the binary stays a
//! thin argument parser.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use varlab_core::elliptic::{
    gaussian_comonotone_condition, gaussian_portfolio_var, gaussian_subadditivity_gap, gaussian_var,
    GaussianSpec,
};
use varlab_core::theorem::{random_comonotonic, random_coupling, theorem_equivalence_trial, GeneratorSpec};
use varlab_core::{comonotonic_coupling, DiscreteDistribution, Rational};

use crate::error::CliError;
use crate::ingest::{dump_csv, Dataset};
use crate::report::{real_json, run_report, to_sorted_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Reads one level per line; blank lines and `#` comments are skipped.
pub fn read_alphas_file(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

pub fn parse_exact_alphas(raw: &[String]) -> Result<Vec<Rational>, CliError> {
    raw.iter()
        .map(|s| {
            let a: Rational = s
                .parse()
                .map_err(|e| CliError::Invalid(format!("bad level `{s}`: {e}")))?;
            if !a.in_unit_open() {
                return Err(CliError::Invalid(format!("level {s} must lie strictly between 0 and 1")));
            }
            Ok(a)
        })
        .collect()
}

pub fn parse_real_alphas(raw: &[String]) -> Result<Vec<f64>, CliError> {
    raw.iter()
        .map(|s| {
            let a: f64 = s.parse().map_err(|_| CliError::Invalid(format!("bad level `{s}`")))?;
            if !(a > 0.0 && a < 1.0) {
                return Err(CliError::Invalid(format!("level {s} must lie strictly between 0 and 1")));
            }
            Ok(a)
        })
        .collect()
}

/// Per-column VaR at each level.
pub fn var_command(data: &Dataset, alphas: &[Rational], format: OutputFormat) -> Result<String, CliError> {
    if alphas.is_empty() {
        return Err(CliError::Invalid("at least one level is required".into()));
    }
    let marginals = data.joint.marginals();
    let table: Vec<Vec<Rational>> = alphas
        .iter()
        .map(|a| marginals.iter().map(|m| m.quantile(a)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    match format {
        OutputFormat::Json => {
            let rows: Vec<Value> = alphas
                .iter()
                .zip(&table)
                .map(|(a, vars)| {
                    let per_column: Map<String, Value> = data
                        .columns
                        .iter()
                        .zip(vars)
                        .map(|(c, v)| (c.clone(), json!(v)))
                        .collect();
                    json!({ "alpha": a, "var": per_column })
                })
                .collect();
            to_sorted_json(&json!({ "columns": data.columns, "rows": rows }))
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["alpha".to_string()];
            header.extend(data.columns.iter().cloned());
            w.write_record(&header)?;
            for (a, vars) in alphas.iter().zip(&table) {
                let mut rec = vec![a.to_fraction_string()];
                rec.extend(vars.iter().map(Rational::to_fraction_string));
                w.write_record(&rec)?;
            }
            finish_csv(w)
        }
    }
}

/// Full analysis; fails with an invariant breach if comonotonicity and the
/// all-level flags disagree.
pub fn report_command(data: &Dataset, alphas: &[Rational], format: OutputFormat) -> Result<String, CliError> {
    let report = run_report(&data.joint, Some(alphas))?.with_column_names(&data.columns);
    if !report.is_consistent() {
        return Err(CliError::InvariantBreach(format!(
            "comonotonic={} but subadditive_everywhere={} additive_everywhere={}",
            report.comonotonic.comonotonic,
            report.theorem_flags.subadditive_everywhere,
            report.theorem_flags.additive_everywhere
        )));
    }
    match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.var_table_csv(),
    }
}

/// Comonotonic coupling of one-column samples.
pub fn couple_command(inputs: &[Dataset], format: OutputFormat) -> Result<String, CliError> {
    if inputs.is_empty() {
        return Err(CliError::Invalid("at least one marginal is required".into()));
    }
    let mut columns = Vec::with_capacity(inputs.len());
    let mut marginals: Vec<DiscreteDistribution> = Vec::with_capacity(inputs.len());
    for (k, d) in inputs.iter().enumerate() {
        if d.joint.dimension() != 1 {
            return Err(CliError::Invalid(format!(
                "marginal input {} has {} loss columns, expected 1",
                k + 1,
                d.joint.dimension()
            )));
        }
        marginals.push(d.joint.marginal(1)?);
        let name = d.columns[0].clone();
        columns.push(if columns.contains(&name) { format!("{name}_{}", k + 1) } else { name });
    }
    let joint = comonotonic_coupling(&marginals)?;
    match format {
        OutputFormat::Csv => dump_csv(&joint, &columns),
        OutputFormat::Json => {
            let points: Vec<Value> = joint
                .points()
                .iter()
                .map(|p| json!({ "coords": p.coords, "prob": p.prob }))
                .collect();
            to_sorted_json(&json!({ "columns": columns, "points": points }))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub n: usize,
    pub generator: &'static str,
    pub points: usize,
    pub comonotonic: bool,
    pub subadditive_everywhere: bool,
    pub additive_everywhere: bool,
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub base_seed: u64,
    pub trials: u64,
    pub instances: usize,
    pub comonotonic_instances: usize,
    pub non_comonotonic_instances: usize,
    pub inconsistent: Vec<TrialRecord>,
}

/// Runs `trials` seeds through both generators. Trial `t` uses seed
/// `base_seed + t` and, unless `n` is fixed, dimension `1 + t mod 4`.
pub fn simulate(base_seed: u64, trials: u64, n: Option<usize>, max_atoms: usize) -> Result<Vec<TrialRecord>, CliError> {
    let run = |t: u64| -> Result<[TrialRecord; 2], CliError> {
        let seed = base_seed.wrapping_add(t);
        let dim = n.unwrap_or(1 + (t % 4) as usize);
        let spec = GeneratorSpec { n: dim, max_atoms, ..GeneratorSpec::default() };
        let record = |generator, j: &varlab_core::JointDiscreteDistribution| {
            let v = theorem_equivalence_trial(j);
            TrialRecord {
                seed,
                n: dim,
                generator,
                points: j.len(),
                comonotonic: v.comonotonic,
                subadditive_everywhere: v.subadditive_everywhere,
                additive_everywhere: v.additive_everywhere,
                consistent: v.consistent,
            }
        };
        Ok([
            record("comonotonic", &random_comonotonic(seed, &spec)?),
            record("coupling", &random_coupling(seed, &spec)?),
        ])
    };

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(trials.max(1) as usize);
    let mut chunks: Vec<Result<Vec<TrialRecord>, CliError>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| {
                let run = &run;
                scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut t = w;
                    while t < trials {
                        out.extend(run(t)?);
                        t += workers as u64;
                    }
                    Ok(out)
                })
            })
            .collect();
        chunks = handles.into_iter().map(|h| h.join().expect("trial worker panicked")).collect();
    });
    let mut records = Vec::new();
    for c in chunks {
        records.extend(c?);
    }
    records.sort_by(|a, b| (a.seed, a.generator).cmp(&(b.seed, b.generator)));
    Ok(records)
}

pub fn summarize(base_seed: u64, trials: u64, records: &[TrialRecord]) -> SimulationSummary {
    let comonotonic_instances = records.iter().filter(|r| r.comonotonic).count();
    SimulationSummary {
        base_seed,
        trials,
        instances: records.len(),
        comonotonic_instances,
        non_comonotonic_instances: records.len() - comonotonic_instances,
        inconsistent: records.iter().filter(|r| !r.consistent).cloned().collect(),
    }
}

pub fn simulate_command(
    base_seed: u64,
    trials: u64,
    n: Option<usize>,
    max_atoms: usize,
    format: OutputFormat,
) -> Result<String, CliError> {
    if n == Some(0) || max_atoms == 0 {
        return Err(CliError::Invalid("dimension and max atoms must be positive".into()));
    }
    let records = simulate(base_seed, trials, n, max_atoms)?;
    let summary = summarize(base_seed, trials, &records);
    let out = match format {
        OutputFormat::Json => to_sorted_json(&summary)?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &records {
                w.serialize(r)?;
            }
            finish_csv(w)?
        }
    };
    if let Some(bad) = summary.inconsistent.first() {
        return Err(CliError::InvariantBreach(format!(
            "seed {} ({} generator) contradicts the equivalence: {:?}",
            bad.seed, bad.generator, bad
        )));
    }
    Ok(out)
}

/// Gaussian spec file: `{"mean": [..], "covariance": [[..], ..]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpecFile {
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

pub fn parse_gaussian_spec(text: &str) -> Result<GaussianSpec, CliError> {
    let raw: GaussianSpecFile = serde_json::from_str(text)?;
    Ok(GaussianSpec::new(raw.mean, raw.covariance)?)
}

pub const DEFAULT_ELLIPTIC_ALPHAS: [f64; 8] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99];

pub fn elliptic_command(spec: &GaussianSpec, alphas: &[f64], format: OutputFormat) -> Result<String, CliError> {
    let alphas = if alphas.is_empty() { &DEFAULT_ELLIPTIC_ALPHAS[..] } else { alphas };
    let sigmas = spec.sigmas();
    let mut rows = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let per: Vec<f64> = spec
            .mean()
            .iter()
            .zip(&sigmas)
            .map(|(&m, &s)| gaussian_var(m, s, a))
            .collect::<Result<_, _>>()?;
        let portfolio = gaussian_portfolio_var(spec, a)?;
        let gap = gaussian_subadditivity_gap(spec, a)?;
        rows.push((a, per, portfolio, gap));
    }
    match format {
        OutputFormat::Json => {
            let table: Vec<Value> = rows
                .iter()
                .map(|(a, per, portfolio, gap)| {
                    json!({
                        "alpha": real_json(*a),
                        "component_vars": per.iter().map(|v| real_json(*v)).collect::<Vec<_>>(),
                        "portfolio_var": real_json(*portfolio),
                        "sum_of_vars": real_json(per.iter().sum()),
                        "gap": real_json(*gap),
                    })
                })
                .collect();
            to_sorted_json(&json!({
                "comonotone_condition": gaussian_comonotone_condition(spec),
                "portfolio_sigma": real_json(spec.portfolio_sigma()),
                "sigmas": sigmas.iter().map(|v| real_json(*v)).collect::<Vec<_>>(),
                "rows": table,
                "tool_version": env!("CARGO_PKG_VERSION"),
            }))
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["alpha".to_string()];
            header.extend((1..=spec.dimension()).map(|i| format!("var_x{i}")));
            header.extend(["portfolio_var", "sum_of_vars", "gap"].map(String::from));
            w.write_record(&header)?;
            for (a, per, portfolio, gap) in &rows {
                let mut rec = vec![crate::report::format_real(*a)];
                rec.extend(per.iter().map(|v| crate::report::format_real(*v)));
                rec.push(crate::report::format_real(*portfolio));
                rec.push(crate::report::format_real(per.iter().sum()));
                rec.push(crate::report::format_real(*gap));
                w.write_record(&rec)?;
            }
            finish_csv(w)
        }
    }
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}
