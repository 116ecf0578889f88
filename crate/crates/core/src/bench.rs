//! Batch runs over corpora and their aggregate statistics.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::datasets::NamedSeries;
use crate::kita::KitaKind;
use crate::predictor;
use crate::record::Record;
use crate::search::{minimal_prefix_solve, solve_or_fit, SearchConfig, SearchError, Solution, SolutionType};

/// Result for one series.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: String,
    pub len: usize,
    pub result: Result<Solution, SearchError>,
    /// Elements after the end of the series.
    pub predicted: Vec<crate::value::Value>,
    /// Fewer than the requested elements could be predicted.
    pub truncated: bool,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn solution(&self) -> Option<&Solution> {
        self.result.as_ref().ok()
    }

    /// Record without timing, suitable for byte-wise comparison.
    pub fn record(&self) -> Record {
        match &self.result {
            Ok(sol) => Record::solved(&self.id, sol, &self.predicted, self.truncated),
            Err(e) => Record::failed(&self.id, e),
        }
    }

    pub fn timed_record(&self) -> Record {
        Record {
            elapsed_ms: Some(self.elapsed.as_secs_f64() * 1000.0),
            ..self.record()
        }
    }
}

/// Solves one series by minimal prefix and predicts `extra` further elements.
pub fn run_one(ns: &NamedSeries, cfg: &SearchConfig, extra: usize) -> Outcome {
    let start = Instant::now();
    let result = minimal_prefix_solve(&ns.series, cfg).map(|f| f.solution);
    finish(ns, result, extra, start)
}

/// Like [`run_one`], but falls back to fitting the whole series.
pub fn run_one_or_fit(ns: &NamedSeries, cfg: &SearchConfig, extra: usize) -> Outcome {
    let start = Instant::now();
    let result = solve_or_fit(&ns.series, cfg).map(|f| f.solution);
    finish(ns, result, extra, start)
}

fn finish(ns: &NamedSeries, result: Result<Solution, SearchError>, extra: usize, start: Instant) -> Outcome {
    let (predicted, truncated) = match &result {
        Ok(sol) => {
            let held = ns.series.len() - sol.n_e();
            let ext = predictor::extend(sol, held + extra);
            let truncated = ext.values.len() < held + extra;
            (ext.values.into_iter().skip(held).collect(), truncated)
        }
        Err(_) => (Vec::new(), false),
    };
    Outcome {
        id: ns.id.clone(),
        len: ns.series.len(),
        result,
        predicted,
        truncated,
        elapsed: start.elapsed(),
    }
}

/// Runs every series on `workers` threads; results keep input order.
pub fn run_batch(series: &[NamedSeries], cfg: &SearchConfig, extra: usize, workers: usize) -> Vec<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| series.par_iter().map(|ns| run_one(ns, cfg, extra)).collect())
}

/// JSON lines for `outcomes`, optionally with timings.
pub fn dump(outcomes: &[Outcome], timed: bool) -> String {
    let mut s = String::new();
    for o in outcomes {
        let r = if timed { o.timed_record() } else { o.record() };
        s.push_str(&r.to_json_line());
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub total: usize,
    pub solved: usize,
    pub type_a: usize,
    pub type_b: usize,
    pub budget_exhausted: usize,
    pub solve_rate: f64,
    pub type_a_rate: f64,
    pub type_b_rate: f64,
    /// Depth 1, 2, 3, 4 and deeper, as percentages of solved series.
    pub depth_pct: BTreeMap<String, f64>,
    /// Number of elements used, bucketed 3..9, 10-16, >16.
    pub n_e_pct: BTreeMap<String, f64>,
    /// Share of solved series whose pattern uses each kita family.
    pub kita_usage_pct: BTreeMap<String, f64>,
    pub median_ms: f64,
    pub mean_ms: f64,
    /// Pattern and the number of series it solved, most frequent first.
    pub patterns: Vec<(String, usize)>,
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

fn n_e_bucket(n_e: usize) -> String {
    match n_e {
        0..=9 => n_e.to_string(),
        10..=16 => "10-16".into(),
        _ => ">16".into(),
    }
}

fn depth_bucket(d: usize) -> String {
    if d >= 5 {
        ">4".into()
    } else {
        d.to_string()
    }
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

pub fn aggregate(outcomes: &[Outcome]) -> Report {
    let solved: Vec<&Solution> = outcomes.iter().filter_map(Outcome::solution).collect();
    let n = solved.len();
    let type_b = solved.iter().filter(|s| s.classify() == SolutionType::B).count();
    let mut depth: BTreeMap<String, usize> = BTreeMap::new();
    let mut n_e: BTreeMap<String, usize> = BTreeMap::new();
    let mut usage: BTreeMap<KitaKind, usize> = BTreeMap::new();
    let mut patterns: BTreeMap<String, usize> = BTreeMap::new();
    for s in &solved {
        *depth.entry(depth_bucket(s.depth())).or_default() += 1;
        *n_e.entry(n_e_bucket(s.n_e())).or_default() += 1;
        let mut kinds: Vec<KitaKind> = s.kitas().iter().map(|k| k.kind()).collect();
        kinds.sort();
        kinds.dedup();
        for k in kinds {
            *usage.entry(k).or_default() += 1;
        }
        *patterns.entry(s.pattern()).or_default() += 1;
    }
    let mut patterns: Vec<(String, usize)> = patterns.into_iter().collect();
    patterns.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let times: Vec<f64> = outcomes.iter().map(|o| o.elapsed.as_secs_f64() * 1000.0).collect();
    let mean_ms = if times.is_empty() { 0.0 } else { times.iter().sum::<f64>() / times.len() as f64 };
    Report {
        total: outcomes.len(),
        solved: n,
        type_a: n - type_b,
        type_b,
        budget_exhausted: outcomes
            .iter()
            .filter(|o| matches!(o.result, Err(SearchError::BudgetExhausted { .. })))
            .count(),
        solve_rate: pct(n, outcomes.len()),
        type_a_rate: pct(n - type_b, outcomes.len()),
        type_b_rate: pct(type_b, outcomes.len()),
        depth_pct: depth.into_iter().map(|(k, v)| (k, pct(v, n))).collect(),
        n_e_pct: n_e.into_iter().map(|(k, v)| (k, pct(v, n))).collect(),
        kita_usage_pct: usage.into_iter().map(|(k, v)| (k.name().to_string(), pct(v, n))).collect(),
        median_ms: median(times),
        mean_ms,
        patterns,
    }
}

impl Report {
    /// Tab-separated header and one row: solve rates, depth shares and
    /// median time, labelled `label`.
    pub fn table(&self, label: &str) -> String {
        let depth = |d: &str| self.depth_pct.get(d).copied().unwrap_or(0.0);
        format!(
            "run\ttotal\tsolved%\ttypeA%\ttypeB%\td1%\td2%\td3%\td4%\tmedian_ms\n{label}\t{}\t{:.1}\t{:.1}\t{:.1}\t{:.1}\t{:.1}\t{:.1}\t{:.1}\t{:.2}\n",
            self.total,
            self.solve_rate,
            self.type_a_rate,
            self.type_b_rate,
            depth("1"),
            depth("2"),
            depth("3"),
            depth("4"),
            self.median_ms
        )
    }

    pub fn render(&self, top_patterns: usize) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "solved {}/{} ({:.1}%)  type A {}  type B {}  budget {}",
            self.solved, self.total, self.solve_rate, self.type_a, self.type_b, self.budget_exhausted
        );
        let _ = writeln!(s, "time ms: median {:.2}  mean {:.2}", self.median_ms, self.mean_ms);
        let row = |m: &BTreeMap<String, f64>| {
            m.iter().map(|(k, v)| format!("{k}:{v:.1}")).collect::<Vec<_>>().join("  ")
        };
        let _ = writeln!(s, "depth %: {}", row(&self.depth_pct));
        let _ = writeln!(s, "n_e %:   {}", row(&self.n_e_pct));
        let _ = writeln!(s, "kitas %: {}", row(&self.kita_usage_pct));
        for (p, c) in self.patterns.iter().take(top_patterns) {
            let _ = writeln!(s, "{c:>6}  {p}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Catalog, Profile};
    use crate::edk::Series;
    use crate::search::Mode;
    use std::sync::Arc;

    fn corpus() -> Vec<NamedSeries> {
        [vec![1, 3, 5, 7, 9], vec![2, 4, 8, 16, 32], vec![3, 1, 4, 1, 5, 9, 2, 6], vec![1, 2]]
            .into_iter()
            .enumerate()
            .filter_map(|(i, v)| {
                Some(NamedSeries {
                    id: format!("t{i}"),
                    series: Series::from_ints(&v).ok()?,
                })
            })
            .collect()
    }

    #[test]
    fn batch_and_report() {
        let mut cfg = SearchConfig::new(Arc::new(Catalog::profile(Profile::Iq)), Mode::S1Z, 1);
        cfg.budget.max_time = None;
        let out = run_batch(&corpus(), &cfg, 2, 2);
        assert_eq!(out.len(), 4);
        assert_eq!(out[0].predicted.iter().map(|v| v.to_string()).collect::<Vec<_>>(), ["11", "13"]);
        assert!(matches!(out[3].result, Err(SearchError::TooShort(2))));
        let r = aggregate(&out);
        assert_eq!(r.total, 4);
        assert_eq!(r.type_a + r.type_b, r.solved);
        assert_eq!(r.kita_usage_pct.get("BAS"), Some(&100.0));
        assert_eq!(dump(&out, false), dump(&run_batch(&corpus(), &cfg, 2, 1), false));
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(vec![]), 0.0);
    }
}
