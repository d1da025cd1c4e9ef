//! Witness analysis of a record and its text, CSV and SVG renderings.

use std::fmt::Write as _;

use dimwit_core::sampler::{estimate_per_job, estimate_pooled, pooled_counts};
use dimwit_core::witness::witness_variance;
use dimwit_core::{EstimatorOutput, ExperimentRecord};

use crate::error::Result;

/// `|z|` at or above this flags a deviation from the qubit prediction.
pub const Z_THRESHOLD: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// No estimator produced a usable standard error.
    Undetermined,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Undetermined => "UNDETERMINED",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub job: usize,
    pub job_id: String,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub config_id: String,
    pub device: String,
    /// Smallest per-cell shot total over the included jobs.
    pub t_total: u64,
    pub per_job: EstimatorOutput,
    pub pooled: EstimatorOutput,
    /// Shot-noise sigma of `W` at the pooled matrix with the total `T`.
    pub sigma_total_t: f64,
    /// The same with `T` divided by the number of jobs: the expected
    /// scatter of a single job's witness.
    pub sigma_per_job_t: f64,
    pub scatter: Vec<ScatterPoint>,
}

impl AnalysisReport {
    pub fn new(record: &ExperimentRecord) -> Result<Self> {
        let per_job = estimate_per_job(record)?;
        let pooled = estimate_pooled(record)?;
        let counts = pooled_counts(record)?;
        let p = counts.matrix;
        let t_total = counts.shots.iter().flatten().copied().min().unwrap_or(0);
        let n = counts.included.len() as u64;
        let sigma_total_t = witness_variance(&p, t_total)?.sqrt();
        let sigma_per_job_t = witness_variance(&p, (t_total / n).max(1))?.sqrt();
        let scatter = per_job
            .included_jobs
            .iter()
            .zip(&per_job.per_job_w)
            .map(|(&job, &w)| ScatterPoint {
                job,
                job_id: record.jobs[job].job_id.clone(),
                w,
            })
            .collect();
        Ok(AnalysisReport {
            config_id: record.config_id.clone(),
            device: record.device.clone(),
            t_total,
            per_job,
            pooled,
            sigma_total_t,
            sigma_per_job_t,
            scatter,
        })
    }

    /// z-scores of the per-job and pooled estimates.
    pub fn z_scores(&self) -> (Option<f64>, Option<f64>) {
        (self.per_job.z(), self.pooled.z())
    }

    pub fn verdict(&self) -> Verdict {
        let (a, b) = self.z_scores();
        let zs: Vec<f64> = a.into_iter().chain(b).collect();
        if zs.is_empty() {
            Verdict::Undetermined
        } else if zs.iter().all(|z| z.abs() < Z_THRESHOLD) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn warnings(&self) -> impl Iterator<Item = &String> {
        self.per_job.warnings.iter()
    }

    pub fn to_text(&self) -> String {
        let fmt_opt = |x: Option<f64>| x.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.3e}"));
        let fmt_z = |x: Option<f64>| x.map_or_else(|| "n/a".to_owned(), |v| format!("{v:+.2}"));
        let mut s = String::new();
        let _ = writeln!(s, "config {}  device {}", self.config_id, self.device);
        let _ = writeln!(s, "jobs {}  T {}", self.scatter.len(), self.t_total);
        let _ = writeln!(s, "{:<10} {:>12} {:>12} {:>8}", "method", "W", "stderr", "z");
        let _ = writeln!(
            s,
            "{:<10} {:>12.3e} {:>12} {:>8}",
            "per-job",
            self.per_job.w_mean,
            fmt_opt(self.per_job.w_stderr),
            fmt_z(self.per_job.z())
        );
        let _ = writeln!(
            s,
            "{:<10} {:>12.3e} {:>12} {:>8}",
            "pooled",
            self.pooled.w_mean,
            fmt_opt(self.pooled.w_stderr),
            fmt_z(self.pooled.z())
        );
        let _ = writeln!(s, "sigma (total T)   {:.3e}", self.sigma_total_t);
        let _ = writeln!(s, "sigma (per-job T) {:.3e}", self.sigma_per_job_t);
        let rule = match self.verdict() {
            Verdict::Fail => format!("|z| >= {Z_THRESHOLD}"),
            _ => format!("|z| < {Z_THRESHOLD}"),
        };
        let _ = writeln!(s, "{} ({rule})", self.verdict());
        s
    }

    /// One row per included job: index, id, witness and the per-job sigma.
    pub fn scatter_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["job", "job_id", "w", "sigma"])
            .expect("in-memory write");
        for p in &self.scatter {
            w.write_record([
                p.job.to_string(),
                p.job_id.clone(),
                p.w.to_string(),
                self.sigma_per_job_t.to_string(),
            ])
            .expect("in-memory write");
        }
        w.into_inner().expect("in-memory write")
    }

    /// Per-job witnesses with one-sigma bars, the per-job mean (red) and the
    /// pooled value (blue).
    pub fn scatter_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 50.0;
        let n = self.scatter.len().max(1) as f64;
        let bar = self.sigma_per_job_t;
        let mut lo = self.scatter.iter().map(|p| p.w - bar).fold(0.0, f64::min);
        let mut hi = self.scatter.iter().map(|p| p.w + bar).fold(0.0, f64::max);
        if hi - lo <= 0.0 {
            lo -= 1.0;
            hi += 1.0;
        }
        let x = |i: usize| PAD + (i as f64 + 0.5) / n * (W - 2.0 * PAD);
        let y = |v: f64| H - PAD - (v - lo) / (hi - lo) * (H - 2.0 * PAD);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{PAD}" y="{}" font-family="sans-serif" font-size="14">W per job, {}</text>"#,
            PAD / 2.0,
            escape(&self.config_id)
        );
        let _ = writeln!(
            s,
            r#"<text x="{PAD}" y="{}" font-family="sans-serif" font-size="11">{:.3e}</text>"#,
            PAD - 5.0,
            hi
        );
        let _ = writeln!(
            s,
            r#"<text x="{PAD}" y="{}" font-family="sans-serif" font-size="11">{:.3e}</text>"#,
            H - PAD + 15.0,
            lo
        );
        let hline = |s: &mut String, v: f64, colour: &str| {
            let _ = writeln!(
                s,
                r#"<line x1="{PAD}" x2="{}" y1="{:.2}" y2="{:.2}" stroke="{colour}"/>"#,
                W - PAD,
                y(v),
                y(v)
            );
        };
        hline(&mut s, 0.0, "gray");
        hline(&mut s, self.per_job.w_mean, "red");
        hline(&mut s, self.pooled.w_mean, "blue");
        for (i, p) in self.scatter.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<line x1="{0:.2}" x2="{0:.2}" y1="{1:.2}" y2="{2:.2}" stroke="black"/>"#,
                x(i),
                y(p.w - bar),
                y(p.w + bar)
            );
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="black"/>"#,
                x(i),
                y(p.w)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
