//! Machine-readable experiment reports.
//!
//! A report is a flat record of what a subcommand was asked to do, the
//! analytic values it computed, the empirical values it measured, and a
//! pass flag per comparison. JSON output serializes the full-precision
//! floats and round-trips byte-identically through this module's types;
//! human and CSV output print real numbers with ten significant digits.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use bellsim_core::montecarlo::Comparison;
use bellsim_core::Matrix64;

/// Output formats of the command-line harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
}

/// An echoed parameter or a textual result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextValue {
    pub name: String,
    pub value: String,
}

/// A named analytic quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberValue {
    pub name: String,
    pub value: f64,
}

/// A named matrix result (recovered bases, Gram matrices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixValue {
    pub name: String,
    pub rows: Vec<Vec<f64>>,
}

/// A Monte Carlo frequency tested against an analytic value at 4 sigma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub analytic: f64,
    pub empirical: f64,
    pub stderr: f64,
    /// Studentized deviation; absent when it is not finite.
    pub z: Option<f64>,
    pub n: u64,
    pub hits: u64,
    pub pass: bool,
}

/// A numeric quantity tested against a fixed ceiling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Full result of one subcommand invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub command: String,
    pub parameters: Vec<TextValue>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
    pub values: Vec<NumberValue>,
    pub notes: Vec<TextValue>,
    pub matrices: Vec<MatrixValue>,
    pub checks: Vec<Check>,
    pub bounds: Vec<BoundCheck>,
    pub passed: bool,
    pub wall_time_ms: f64,
}

impl ExperimentReport {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Human => self.to_human(),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_human(&self) -> String {
        let mut out = format!("# {}\n", self.command);
        for p in &self.parameters {
            out.push_str(&format!("parameter {} = {}\n", p.name, p.value));
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("parameter seed = {seed}\n"));
        }
        if let Some(trials) = self.trials {
            out.push_str(&format!("parameter trials = {trials}\n"));
        }
        if let Some(workers) = self.workers {
            out.push_str(&format!("parameter workers = {workers}\n"));
        }
        for v in &self.values {
            out.push_str(&format!("value {} = {}\n", v.name, fmt_sig(v.value)));
        }
        for n in &self.notes {
            out.push_str(&format!("note {}: {}\n", n.name, n.value));
        }
        for m in &self.matrices {
            out.push_str(&format!(
                "matrix {} ({}x{})\n",
                m.name,
                m.rows.len(),
                m.rows.first().map_or(0, Vec::len)
            ));
            for row in &m.rows {
                let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
                out.push_str(&format!("  {}\n", cells.join("  ")));
            }
        }
        for c in &self.checks {
            let z = c.z.map_or_else(|| "inf".to_string(), fmt_sig);
            out.push_str(&format!(
                "check {}: analytic={} empirical={} stderr={} z={} n={} {}\n",
                c.name,
                fmt_sig(c.analytic),
                fmt_sig(c.empirical),
                fmt_sig(c.stderr),
                z,
                c.n,
                pass_str(c.pass)
            ));
        }
        for b in &self.bounds {
            out.push_str(&format!(
                "bound {}: value={} threshold={} {}\n",
                b.name,
                fmt_sig(b.value),
                fmt_sig(b.threshold),
                pass_str(b.pass)
            ));
        }
        out.push_str(&format!(
            "result: {} (wall {} ms)\n",
            pass_str(self.passed),
            fmt_sig(self.wall_time_ms)
        ));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("kind,name,value,analytic,empirical,stderr,z,n,hits,threshold,pass\n");
        let mut push = |fields: &[String]| {
            out.push_str(&fields.join(","));
            out.push('\n');
        };
        push(&[
            "command".into(),
            self.command.clone(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
        let mut parameters = self.parameters.clone();
        if let Some(seed) = self.seed {
            parameters.push(TextValue {
                name: "seed".into(),
                value: seed.to_string(),
            });
        }
        if let Some(trials) = self.trials {
            parameters.push(TextValue {
                name: "trials".into(),
                value: trials.to_string(),
            });
        }
        if let Some(workers) = self.workers {
            parameters.push(TextValue {
                name: "workers".into(),
                value: workers.to_string(),
            });
        }
        for p in &parameters {
            push(&[
                "parameter".into(),
                p.name.clone(),
                p.value.clone(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
        for v in &self.values {
            push(&[
                "value".into(),
                v.name.clone(),
                fmt_sig(v.value),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
        for n in &self.notes {
            push(&[
                "note".into(),
                n.name.clone(),
                n.value.clone(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
        for c in &self.checks {
            push(&[
                "check".into(),
                c.name.clone(),
                String::new(),
                fmt_sig(c.analytic),
                fmt_sig(c.empirical),
                fmt_sig(c.stderr),
                c.z.map_or_else(|| "inf".into(), fmt_sig),
                c.n.to_string(),
                c.hits.to_string(),
                String::new(),
                pass_str(c.pass).into(),
            ]);
        }
        for b in &self.bounds {
            push(&[
                "bound".into(),
                b.name.clone(),
                fmt_sig(b.value),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                fmt_sig(b.threshold),
                pass_str(b.pass).into(),
            ]);
        }
        for m in &self.matrices {
            for (i, row) in m.rows.iter().enumerate() {
                let mut fields = vec!["matrix".into(), m.name.clone(), format!("row{i}")];
                fields.extend(row.iter().map(|&v| fmt_sig(v)));
                push(&fields);
            }
        }
        push(&[
            "summary".into(),
            "passed".into(),
            pass_str(self.passed).into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
        push(&[
            "summary".into(),
            "wall_time_ms".into(),
            fmt_sig(self.wall_time_ms),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
        out
    }
}

fn pass_str(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Ten significant digits in positional notation.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.000000000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (9 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Incrementally assembles a report, timing the build.
pub struct ReportBuilder {
    report: ExperimentReport,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(command: impl Into<String>) -> Self {
        ReportBuilder {
            report: ExperimentReport {
                command: command.into(),
                parameters: Vec::new(),
                seed: None,
                trials: None,
                workers: None,
                values: Vec::new(),
                notes: Vec::new(),
                matrices: Vec::new(),
                checks: Vec::new(),
                bounds: Vec::new(),
                passed: true,
                wall_time_ms: 0.0,
            },
            started: Instant::now(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl ToString) -> &mut Self {
        self.report.parameters.push(TextValue {
            name: name.into(),
            value: value.to_string(),
        });
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.report.seed = Some(seed);
        self
    }

    pub fn trials(&mut self, trials: u64) -> &mut Self {
        self.report.trials = Some(trials);
        self
    }

    pub fn workers(&mut self, workers: usize) -> &mut Self {
        self.report.workers = Some(workers);
        self
    }

    pub fn number(&mut self, name: &str, value: f64) -> &mut Self {
        self.report.values.push(NumberValue {
            name: name.into(),
            value,
        });
        self
    }

    pub fn note(&mut self, name: &str, value: impl Into<String>) -> &mut Self {
        self.report.notes.push(TextValue {
            name: name.into(),
            value: value.into(),
        });
        self
    }

    pub fn matrix(&mut self, name: &str, matrix: &Matrix64) -> &mut Self {
        let rows = (0..matrix.rows())
            .map(|r| (0..matrix.cols()).map(|c| matrix.get(r, c)).collect())
            .collect();
        self.report.matrices.push(MatrixValue {
            name: name.into(),
            rows,
        });
        self
    }

    /// Records a Monte Carlo comparison.
    pub fn check(&mut self, name: &str, cmp: &Comparison) -> &mut Self {
        self.report.checks.push(Check {
            name: name.into(),
            analytic: cmp.analytic,
            empirical: cmp.empirical,
            stderr: cmp.stderr,
            z: cmp.z.is_finite().then_some(cmp.z),
            n: cmp.n,
            hits: cmp.hits,
            pass: cmp.pass,
        });
        self
    }

    /// Records a numeric ceiling check: pass iff `value <= threshold`.
    pub fn bound(&mut self, name: &str, value: f64, threshold: f64) -> &mut Self {
        self.report.bounds.push(BoundCheck {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        });
        self
    }

    pub fn finish(mut self) -> ExperimentReport {
        self.report.passed =
            self.report.checks.iter().all(|c| c.pass) && self.report.bounds.iter().all(|b| b.pass);
        self.report.wall_time_ms = self.started.elapsed().as_secs_f64() * 1e3;
        self.report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.25), "0.2500000000");
        assert_eq!(fmt_sig(1.0), "1.000000000");
        assert_eq!(fmt_sig(-0.3333333333333333), "-0.3333333333");
        assert_eq!(fmt_sig(333133.25), "333133.2500");
        assert_eq!(fmt_sig(0.0), "0.000000000");
    }

    #[test]
    fn json_round_trips_to_identical_bytes() {
        let mut builder = ReportBuilder::new("demo");
        builder
            .param("p", "0.5")
            .seed(7)
            .trials(1000)
            .number("analytic", 0.25)
            .note("comment", "none")
            .bound("err", 1e-9, 1e-8);
        let report = builder.finish();
        let json = report.to_json();
        let parsed: ExperimentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.to_json(), json);
        assert_eq!(parsed, report);
    }

    #[test]
    fn failing_bounds_fail_the_report() {
        let mut builder = ReportBuilder::new("demo");
        builder.bound("too_big", 2e-8, 1e-8);
        let report = builder.finish();
        assert!(!report.passed);
        assert!(report.to_human().contains("bound too_big"));
        assert!(report.to_human().contains("FAIL"));
        assert!(report.to_csv().contains("summary,passed,FAIL"));
    }
}
