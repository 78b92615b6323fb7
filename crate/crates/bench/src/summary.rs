//! Per-method hypervolume and front-size statistics with significance marks.

use std::fmt::Write as _;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{BenchError, Result};
use crate::experiment::{MethodId, RunReport};

/// Significance level of the comparison against the best method.
pub const ALPHA: f64 = 0.05;

/// Streaming mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance; zero below two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }
}

impl FromIterator<f64> for Welford {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut w = Welford::default();
        for x in iter {
            w.push(x);
        }
        w
    }
}

/// Two-sided Welch t-test p-value for equal means.
///
/// With both variances zero the samples are constants: equal means give 1,
/// different means give 0.
pub fn welch_p_value(a: &Welford, b: &Welford) -> Option<f64> {
    if a.count() < 2 || b.count() < 2 {
        return None;
    }
    let (na, nb) = (a.count() as f64, b.count() as f64);
    let (va, vb) = (a.variance() / na, b.variance() / nb);
    let se2 = va + vb;
    if se2 == 0.0 {
        return Some(if a.mean() == b.mean() { 1.0 } else { 0.0 });
    }
    let t = (a.mean() - b.mean()) / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    Some((2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: MethodId,
    pub runs: u64,
    pub hv_mean: f64,
    pub hv_std: f64,
    pub nd_mean: f64,
    pub nd_std: f64,
    /// Highest mean hypervolume.
    pub best: bool,
    /// Welch p-value against the best method; `None` for the best itself and
    /// when a method has fewer than two runs.
    pub p_value: Option<f64>,
    /// Best, or not significantly worse than the best. `None` when marks are
    /// suppressed.
    pub not_worse: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub instance: String,
    pub methods: Vec<MethodSummary>,
}

/// Groups successful reports by method in order of first appearance.
pub fn summarize(reports: &[RunReport]) -> Result<Summary> {
    let mut instance: Option<&str> = None;
    let mut groups: Vec<(MethodId, Welford, Welford)> = Vec::new();
    for r in reports.iter().filter(|r| r.record.succeeded()) {
        let name = r.record.instance.as_str();
        match instance {
            None => instance = Some(name),
            Some(first) if first != name => {
                return Err(BenchError::MixedInstances(
                    first.to_owned(),
                    name.to_owned(),
                ))
            }
            _ => {}
        }
        let idx = match groups.iter().position(|g| g.0 == r.record.method) {
            Some(i) => i,
            None => {
                groups.push((r.record.method, Welford::default(), Welford::default()));
                groups.len() - 1
            }
        };
        groups[idx].1.push(r.hv);
        groups[idx].2.push(r.record.nd_count as f64);
    }
    let instance = instance.ok_or(BenchError::NoReports)?.to_owned();
    let best_idx = groups
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.mean().total_cmp(&b.1 .1.mean()).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("at least one group");
    let marks = groups.iter().all(|g| g.1.count() >= 2);
    let best_hv = groups[best_idx].1;
    let methods = groups
        .iter()
        .enumerate()
        .map(|(i, (method, hv, nd))| {
            let best = hv.mean() == best_hv.mean();
            let p_value = if i == best_idx || !marks {
                None
            } else {
                welch_p_value(hv, &best_hv)
            };
            let not_worse = marks.then(|| best || p_value.is_some_and(|p| p >= ALPHA));
            MethodSummary {
                method: *method,
                runs: hv.count(),
                hv_mean: hv.mean(),
                hv_std: hv.std(),
                nd_mean: nd.mean(),
                nd_std: nd.std(),
                best,
                p_value,
                not_worse,
            }
        })
        .collect();
    Ok(Summary { instance, methods })
}

impl Summary {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "instance",
            "method",
            "runs",
            "hv_mean",
            "hv_std",
            "nd_mean",
            "nd_std",
            "best",
            "p_value",
            "not_worse",
        ])
        .expect("in-memory write");
        for s in &self.methods {
            w.write_record([
                self.instance.clone(),
                s.method.to_string(),
                s.runs.to_string(),
                s.hv_mean.to_string(),
                s.hv_std.to_string(),
                s.nd_mean.to_string(),
                s.nd_std.to_string(),
                s.best.to_string(),
                s.p_value.map(|p| p.to_string()).unwrap_or_default(),
                s.not_worse.map(|b| b.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    /// Fixed-width table; `*` marks the best mean and means not significantly
    /// worse than it.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "instance: {}", self.instance).unwrap();
        writeln!(
            out,
            "{:<15} {:>5} {:>14} {:>12} {:>9} {:>8} {:>8}",
            "method", "runs", "mean HV", "std HV", "mean #ND", "std #ND", "p"
        )
        .unwrap();
        for s in &self.methods {
            let mark = if s.not_worse == Some(true) { "*" } else { " " };
            let p = s
                .p_value
                .map(|p| format!("{p:.3}"))
                .unwrap_or_else(|| "-".into());
            writeln!(
                out,
                "{:<15} {:>5} {:>13.6e}{} {:>12.4e} {:>9.2} {:>8.2} {:>8}",
                s.method.name(),
                s.runs,
                s.hv_mean,
                mark,
                s.hv_std,
                s.nd_mean,
                s.nd_std,
                p
            )
            .unwrap();
        }
        out
    }
}
