//! Check results and report formats.

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::config::SuiteConfig;

/// How `lhs` and `rhs` are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `gap = |lhs - rhs|`, passes when `gap ≤ tol`.
    Eq,
    /// `gap = lhs - rhs`, passes when `gap ≥ -tol`.
    Ge,
    /// `gap = lhs - rhs`, passes when `gap > tol`.
    Gt,
    /// `gap = rhs - lhs`, passes when `gap > tol`.
    Lt,
}

impl Relation {
    pub fn gap(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Self::Eq => (lhs - rhs).abs(),
            Self::Ge | Self::Gt => lhs - rhs,
            Self::Lt => rhs - lhs,
        }
    }

    pub fn passes(self, gap: f64, tol: f64) -> bool {
        match self {
            Self::Eq => gap <= tol,
            Self::Ge => gap >= -tol,
            Self::Gt | Self::Lt => gap > tol,
        }
    }
}

/// Everything needed to re-run one failing check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub suite: String,
    pub check: String,
    pub index: usize,
    pub seed: u64,
    pub config: SuiteConfig,
    /// Bodies involved, in the body file format.
    pub bodies: Vec<serde_json::Value>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    /// The identity or inequality being checked.
    pub anchor: String,
    pub relation: Relation,
    #[serde(with = "lenient_float")]
    pub lhs: f64,
    #[serde(with = "lenient_float")]
    pub rhs: f64,
    #[serde(with = "lenient_float")]
    pub gap: f64,
    #[serde(with = "lenient_float")]
    pub tol: f64,
    pub pass: bool,
    pub index: usize,
    pub seed: u64,
    #[serde(with = "lenient_float")]
    pub se: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Floats with non-finite values written as strings, so that failing
/// results survive a JSON round trip.
mod lenient_float {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub run_id: String,
    pub config: SuiteConfig,
    pub summary: Summary,
    /// Wall-clock seconds; only present when timing was requested, since it
    /// would otherwise break byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
    pub results: Vec<CheckResult>,
}

impl Report {
    /// Sorts results by `(id, seed)` and fills in the summary.
    pub fn new(suite: &str, config: SuiteConfig, mut results: Vec<CheckResult>) -> Self {
        results.sort_by(|a, b| {
            a.id.cmp(&b.id)
                .then(a.seed.cmp(&b.seed))
                .then(a.index.cmp(&b.index))
        });
        let passed = results.iter().filter(|r| r.pass).count();
        Self {
            suite: suite.to_string(),
            run_id: config.run_id(),
            config,
            summary: Summary {
                total: results.len(),
                passed,
                failed: results.len() - passed,
            },
            wall_clock_seconds: None,
            results,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => to_json(self),
            ReportFormat::Csv => to_csv(self),
            ReportFormat::Markdown => to_markdown(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            _ => Err(crate::Error::InvalidInput(format!(
                "unknown report format {s:?}"
            ))),
        }
    }
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> crate::Result<Report> {
    Ok(serde_json::from_str(text)?)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "id,anchor,lhs,rhs,gap,tol,pass,seed";

pub fn to_csv(report: &Report) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.results {
        let _ = writeln!(
            out,
            "{},{},{:e},{:e},{:e},{:e},{},{}",
            csv_field(&r.id),
            csv_field(&r.anchor),
            r.lhs,
            r.rhs,
            r.gap,
            r.tol,
            r.pass,
            r.seed
        );
    }
    out
}

pub fn to_markdown(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {} suite\n", report.suite);
    let _ = writeln!(
        out,
        "run `{}`, seed {}, n = {}\n",
        report.run_id, report.config.seed, report.config.n
    );
    let _ = writeln!(
        out,
        "{} checks, {} passed, {} failed\n",
        report.summary.total, report.summary.passed, report.summary.failed
    );
    out.push_str("| id | anchor | lhs | rhs | gap | tol | se | pass | seed |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|\n");
    for r in &report.results {
        let _ = writeln!(
            out,
            "| {} | {} | {:.6e} | {:.6e} | {:.3e} | {:.3e} | {:.3e} | {} | {} |",
            r.id,
            r.anchor.replace('|', "\\|"),
            r.lhs,
            r.rhs,
            r.gap,
            r.tol,
            r.se,
            if r.pass { "yes" } else { "**no**" },
            r.seed
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CheckResult {
        CheckResult {
            id: "a.b".into(),
            anchor: "x, y".into(),
            relation: Relation::Eq,
            lhs: 1.0,
            rhs: 1.0 + 1e-12,
            gap: 1e-12,
            tol: 1e-8,
            pass: true,
            index: 0,
            seed: 3,
            se: 0.0,
            witness: None,
        }
    }

    #[test]
    fn empty_report_is_valid() {
        let r = Report::new("identities", SuiteConfig::default(), Vec::new());
        assert_eq!(to_csv(&r), format!("{CSV_HEADER}\n"));
        assert_eq!(from_json(&to_json(&r)).unwrap(), r);
        assert!(to_markdown(&r).contains("0 checks"));
    }

    #[test]
    fn json_round_trip_with_non_finite_values() {
        let mut bad = sample();
        bad.gap = f64::INFINITY;
        bad.lhs = f64::NAN;
        bad.pass = false;
        let r = Report::new("identities", SuiteConfig::default(), vec![sample(), bad]);
        let back = from_json(&to_json(&r)).unwrap();
        assert_eq!(back.results[0], r.results[0]);
        assert!(back.results[1].lhs.is_nan() && back.results[1].gap.is_infinite());
    }

    #[test]
    fn csv_quotes_anchors() {
        let r = Report::new("identities", SuiteConfig::default(), vec![sample()]);
        let csv = to_csv(&r);
        assert!(csv.lines().nth(1).unwrap().starts_with("a.b,\"x, y\","));
    }

    #[test]
    fn relations() {
        assert!(Relation::Ge.passes(Relation::Ge.gap(1.0, 1.0 + 1e-10), 1e-9));
        assert!(!Relation::Gt.passes(Relation::Gt.gap(1.0, 1.0), 0.0));
        assert!(Relation::Lt.passes(Relation::Lt.gap(0.1, 0.2), 0.0));
    }
}
