//! Full analysis of one joint sample and its serializations.

use serde::Serialize;
use sha2::{Digest, Sha256};
use varlab_core::theorem::check_subadditivity_all_alpha;
use varlab_core::{is_comonotonic, JointDiscreteDistribution, Rational, Relation};

use crate::error::CliError;
use crate::ingest::default_column_names;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarginalSummary {
    pub column: String,
    pub atoms: usize,
    pub mean: Rational,
}

/// One row of the VaR table. Default rows cover the interval
/// `(interval_start, alpha]` on which every quantile is constant; rows at
/// caller-supplied levels carry no interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VarRow {
    pub alpha: Rational,
    pub interval_start: Option<Rational>,
    pub column_vars: Vec<Rational>,
    pub var_sum: Rational,
    pub sum_of_vars: Rational,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComonotoneSummary {
    pub comonotonic: bool,
    pub witness: Option<(Vec<Rational>, Vec<Rational>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TheoremFlags {
    pub subadditive_everywhere: bool,
    pub additive_everywhere: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub input_digest: String,
    pub marginals_summary: Vec<MarginalSummary>,
    pub var_table: Vec<VarRow>,
    pub comonotonic: ComonotoneSummary,
    pub theorem_flags: TheoremFlags,
    pub tool_version: String,
}

impl AnalysisReport {
    /// True when comonotonicity, all-level subadditivity and all-level
    /// additivity agree.
    pub fn is_consistent(&self) -> bool {
        let f = self.theorem_flags;
        self.comonotonic.comonotonic == f.subadditive_everywhere
            && f.subadditive_everywhere == f.additive_everywhere
    }

    pub fn with_column_names(mut self, names: &[String]) -> Self {
        for (summary, name) in self.marginals_summary.iter_mut().zip(names) {
            summary.column = name.clone();
        }
        self
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        to_sorted_json(self)
    }

    /// The VaR table as CSV, for plotting. Exact columns are `num/den`.
    pub fn var_table_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["alpha".to_string(), "interval_start".to_string()];
        header.extend(self.marginals_summary.iter().map(|m| format!("var_{}", m.column)));
        header.extend(["var_sum", "sum_of_vars", "relation", "alpha_approx"].map(String::from));
        w.write_record(&header)?;
        for row in &self.var_table {
            let mut rec = vec![
                row.alpha.to_fraction_string(),
                row.interval_start.as_ref().map(Rational::to_fraction_string).unwrap_or_default(),
            ];
            rec.extend(row.column_vars.iter().map(Rational::to_fraction_string));
            rec.push(row.var_sum.to_fraction_string());
            rec.push(row.sum_of_vars.to_fraction_string());
            rec.push(row.relation.symbol().to_string());
            rec.push(format_real(row.alpha.to_f64()));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
    }
}

/// SHA-256 over a canonical text rendering of the joint law, so that inputs
/// describing the same law share a digest.
pub fn digest(joint: &JointDiscreteDistribution) -> String {
    let mut h = Sha256::new();
    h.update(format!("dim={}\n", joint.dimension()));
    for p in joint.points() {
        let coords: Vec<String> = p.coords.iter().map(Rational::to_fraction_string).collect();
        h.update(format!("{};{}\n", coords.join(","), p.prob.to_fraction_string()));
    }
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

/// Analyses `joint` at the given levels, or at every critical level when
/// `alphas` is `None` or empty.
pub fn run_report(joint: &JointDiscreteDistribution, alphas: Option<&[Rational]>) -> Result<AnalysisReport, CliError> {
    let marginals = joint.marginals();
    let sum = joint.sum_distribution();
    let subadditivity = check_subadditivity_all_alpha(joint);

    let var_table = match alphas.filter(|a| !a.is_empty()) {
        Some(levels) => levels
            .iter()
            .map(|alpha| {
                let column_vars = marginals
                    .iter()
                    .map(|m| m.quantile(alpha))
                    .collect::<Result<Vec<_>, _>>()?;
                let var_sum = sum.quantile(alpha)?;
                let sum_of_vars: Rational = column_vars.iter().sum();
                Ok(VarRow {
                    relation: Relation::of(&var_sum, &sum_of_vars),
                    alpha: alpha.clone(),
                    interval_start: None,
                    column_vars,
                    var_sum,
                    sum_of_vars,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?,
        None => subadditivity
            .verdicts
            .iter()
            .map(|v| VarRow {
                alpha: v.alpha_star.clone(),
                interval_start: Some(v.interval_start.clone()),
                column_vars: marginals.iter().map(|m| m.quantile_closed(&v.alpha_star).clone()).collect(),
                var_sum: v.var_sum.clone(),
                sum_of_vars: v.sum_of_vars.clone(),
                relation: v.relation,
            })
            .collect(),
    };

    let verdict = is_comonotonic(joint);
    let names = default_column_names(joint.dimension());
    Ok(AnalysisReport {
        input_digest: digest(joint),
        marginals_summary: marginals
            .iter()
            .zip(names)
            .map(|(m, column)| MarginalSummary { column, atoms: m.len(), mean: m.mean() })
            .collect(),
        var_table,
        comonotonic: ComonotoneSummary { comonotonic: verdict.comonotonic, witness: verdict.witness },
        theorem_flags: TheoremFlags {
            subadditive_everywhere: subadditivity.subadditive_everywhere,
            additive_everywhere: subadditivity.additive_everywhere,
        },
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    // serde_json's default map is ordered, so a round trip through Value
    // sorts every object's keys.
    let v = serde_json::to_value(value)?;
    let mut out = serde_json::to_string_pretty(&v)?;
    out.push('\n');
    Ok(out)
}

/// A real rounded to 12 significant digits.
pub fn format_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// [`format_real`] as a JSON number.
pub fn real_json(x: f64) -> serde_json::Value {
    let rounded: f64 = format_real(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map_or(serde_json::Value::Null, serde_json::Value::Number)
}
