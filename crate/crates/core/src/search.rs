//! Breadth-first (iterative deepening) and depth-first search over kita
//! sequences, minimal-prefix solving and MDL selection.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::catalog::Catalog;
use crate::edk::{ConstancyConfig, Edk, EdkMode, Series};
use crate::kita::{apply, ApplyOptions, DirectRule, Kita, KitaResult};
use crate::predictor;

/// How an entry relates to the entry it came from one level up.
#[derive(Debug, Clone, PartialEq)]
pub enum Link {
    Root,
    /// Solved earlier; copied forward unchanged.
    Carried,
    /// The `n`-th child produced by the level's kita.
    Child(usize),
    /// The level's kita is a direct rule over the parent's base.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Open,
    /// Rows from this index to the top are all zeros (ones for ratios).
    Constant(usize),
    Rule(DirectRule),
}

impl Status {
    pub fn is_solved(&self) -> bool {
        !matches!(self, Status::Open)
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub edk: Arc<Edk>,
    /// Index of the source entry in the previous level.
    pub parent: Option<usize>,
    pub link: Link,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct Level {
    pub kita: Kita,
    pub entries: Vec<Entry>,
}

impl Level {
    pub fn is_solved(&self) -> bool {
        self.entries.iter().all(|e| e.status.is_solved())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolutionType {
    /// Every base element is explained.
    A,
    /// A leading part of some base was set aside by a direct rule.
    B,
}

impl fmt::Display for SolutionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolutionType::A => "TypeA",
            SolutionType::B => "TypeB",
        })
    }
}

/// A kita sequence whose last level is fully solved.
#[derive(Debug, Clone)]
pub struct Solution {
    /// The series (or prefix) the search ran on.
    pub series: Series,
    /// Level 0 holds the root table under `Kita::Bas`.
    pub levels: Vec<Level>,
    /// Position among the solutions found by the same search.
    pub discovery: usize,
}

impl Solution {
    /// Kitas after the root.
    pub fn steps(&self) -> impl Iterator<Item = &Kita> {
        self.levels[1..].iter().map(|l| &l.kita)
    }

    /// Kitas including the root BAS.
    pub fn kitas(&self) -> Vec<&Kita> {
        self.levels.iter().map(|l| &l.kita).collect()
    }

    /// Number of kitas after the root; a root-only solution counts as 1.
    pub fn depth(&self) -> usize {
        (self.levels.len() - 1).max(1)
    }

    pub fn cost(&self) -> usize {
        self.depth()
    }

    pub fn n_e(&self) -> usize {
        self.series.len()
    }

    pub fn labels(&self) -> Vec<String> {
        if self.levels.len() == 1 {
            return vec![Kita::Bas.label()];
        }
        self.steps().map(Kita::label).collect()
    }

    pub fn pattern(&self) -> String {
        self.labels().join(",")
    }

    pub fn classify(&self) -> SolutionType {
        let skipped = self.levels.iter().flat_map(|l| &l.entries).any(|e| match &e.status {
            Status::Rule(r) => r.skipped > 0,
            _ => false,
        });
        if skipped {
            SolutionType::B
        } else {
            SolutionType::A
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Bfs,
    Dfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopMode {
    FirstSolution,
    Exhaustive,
}

/// Solver modes: S stops at the first solution, N searches exhaustively;
/// the digit is the number of constant rows required.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode {
    pub stop: StopMode,
    pub required_levels: usize,
}

impl Mode {
    pub const S1Z: Mode = Mode { stop: StopMode::FirstSolution, required_levels: 1 };
    pub const S2Z: Mode = Mode { stop: StopMode::FirstSolution, required_levels: 2 };
    pub const N1Z: Mode = Mode { stop: StopMode::Exhaustive, required_levels: 1 };
    pub const N2Z: Mode = Mode { stop: StopMode::Exhaustive, required_levels: 2 };
    pub const ALL: [Mode; 4] = [Mode::S1Z, Mode::S2Z, Mode::N1Z, Mode::N2Z];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.stop {
            StopMode::FirstSolution => 'S',
            StopMode::Exhaustive => 'N',
        };
        write!(f, "{s}{}Z", self.required_levels)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown mode `{0}` (expected S1Z, S2Z, N1Z or N2Z)")]
pub struct ParseModeError(String);

impl FromStr for Mode {
    type Err = ParseModeError;

    fn from_str(s: &str) -> Result<Mode, ParseModeError> {
        Mode::ALL
            .into_iter()
            .find(|m| m.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| ParseModeError(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    /// Maximum number of kita applications to whole states.
    pub max_states: Option<u64>,
    pub max_time: Option<Duration>,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub catalog: Arc<Catalog>,
    pub max_depth: usize,
    pub strategy: Strategy,
    pub stop: StopMode,
    pub apply: ApplyOptions,
    pub budget: Budget,
    /// Cap on solutions kept by an exhaustive search.
    pub max_solutions: usize,
}

impl SearchConfig {
    pub fn new(catalog: Arc<Catalog>, mode: Mode, max_depth: usize) -> SearchConfig {
        let mut apply = ApplyOptions::default();
        apply.constancy.required_levels = mode.required_levels;
        SearchConfig {
            catalog,
            max_depth,
            strategy: Strategy::Bfs,
            stop: mode.stop,
            apply,
            budget: Budget {
                max_states: Some(200_000),
                max_time: Some(Duration::from_secs(10)),
            },
            max_solutions: 256,
        }
    }

    pub fn constancy(&self) -> &ConstancyConfig {
        &self.apply.constancy
    }

    pub fn mode(&self) -> Mode {
        Mode {
            stop: self.stop,
            required_levels: self.apply.constancy.required_levels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("series too short: {0} elements")]
    TooShort(usize),
    #[error("no solution within the search limits")]
    Unsolved,
    #[error("search budget exhausted after {states} states")]
    BudgetExhausted { states: u64 },
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub solutions: Vec<Solution>,
    pub states: u64,
    pub budget_hit: bool,
}

/// Shared accounting for one or more searches.
#[derive(Debug, Clone)]
pub struct Meter {
    pub states: u64,
    start: Instant,
    budget: Budget,
    hit: bool,
}

impl Meter {
    pub fn new(budget: Budget) -> Meter {
        Meter {
            states: 0,
            start: Instant::now(),
            budget,
            hit: false,
        }
    }

    /// Counts one state; false once the budget is spent.
    fn tick(&mut self) -> bool {
        if self.hit {
            return false;
        }
        self.states += 1;
        if self.budget.max_states.is_some_and(|m| self.states > m) {
            self.hit = true;
        } else if let Some(t) = self.budget.max_time {
            if self.states % 128 == 0 && self.start.elapsed() > t {
                self.hit = true;
            }
        }
        !self.hit
    }

    pub fn exhausted(&self) -> bool {
        self.hit
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }
}

fn root_level(series: &Series, cfg: &SearchConfig) -> Option<Level> {
    let edk = Edk::build(series, EdkMode::Differences, None).ok()?;
    let status = match edk.constancy(cfg.constancy()) {
        Some(k0) => Status::Constant(k0),
        None => Status::Open,
    };
    Some(Level {
        kita: Kita::Bas,
        entries: vec![Entry {
            edk: Arc::new(edk),
            parent: None,
            link: Link::Root,
            status,
        }],
    })
}

/// Applies `kita` to every open entry of `prev`; `None` if it fails on any.
pub fn expand(prev: &Level, kita: &Kita, opts: &ApplyOptions) -> Option<Level> {
    let mut entries = Vec::with_capacity(prev.entries.len() + 1);
    for (i, e) in prev.entries.iter().enumerate() {
        if e.status.is_solved() {
            entries.push(Entry {
                edk: e.edk.clone(),
                parent: Some(i),
                link: Link::Carried,
                status: e.status.clone(),
            });
            continue;
        }
        match apply(kita, &e.edk, opts).ok()? {
            KitaResult::Children(children) => {
                for (ci, c) in children.into_iter().enumerate() {
                    let status = match c.constancy(&opts.constancy) {
                        Some(k0) => Status::Constant(k0),
                        None => Status::Open,
                    };
                    entries.push(Entry {
                        edk: Arc::new(c),
                        parent: Some(i),
                        link: Link::Child(ci),
                        status,
                    });
                }
            }
            KitaResult::Direct(rule) => entries.push(Entry {
                edk: e.edk.clone(),
                parent: Some(i),
                link: Link::Direct,
                status: Status::Rule(rule),
            }),
        }
    }
    Some(Level {
        kita: kita.clone(),
        entries,
    })
}

struct Walker<'a> {
    cfg: &'a SearchConfig,
    series: &'a Series,
    meter: &'a mut Meter,
    accept: &'a mut dyn FnMut(&Solution) -> bool,
    found: Vec<Solution>,
    done: bool,
}

impl Walker<'_> {
    fn offer(&mut self, stack: &[Level]) {
        let sol = Solution {
            series: self.series.clone(),
            levels: stack.to_vec(),
            discovery: self.found.len(),
        };
        if (self.accept)(&sol) {
            self.found.push(sol);
            if self.cfg.stop == StopMode::FirstSolution || self.found.len() >= self.cfg.max_solutions {
                self.done = true;
            }
        }
    }

    /// Explores below the top of `stack`. With `exact_depth`, solutions are
    /// only reported at `remaining == 0` (iterative deepening); otherwise at
    /// every node (plain depth-first search).
    fn walk(&mut self, stack: &mut Vec<Level>, remaining: usize, exact_depth: bool) {
        let top = stack.last().expect("root level");
        if top.is_solved() {
            if !exact_depth || remaining == 0 {
                self.offer(stack);
            }
            return;
        }
        if remaining == 0 {
            return;
        }
        let kitas = &self.cfg.catalog.kitas()[1..];
        for kita in kitas {
            if self.done || !self.meter.tick() {
                return;
            }
            let Some(next) = expand(stack.last().unwrap(), kita, &self.cfg.apply) else {
                continue;
            };
            stack.push(next);
            self.walk(stack, remaining - 1, exact_depth);
            stack.pop();
        }
    }
}

/// Searches `series` and returns the solutions `accept` approves of.
/// BFS returns solutions of the smallest depth that has any; DFS returns
/// them in depth-first order.
pub fn search_with(
    series: &Series,
    cfg: &SearchConfig,
    meter: &mut Meter,
    accept: &mut dyn FnMut(&Solution) -> bool,
) -> Vec<Solution> {
    let Some(root) = root_level(series, cfg) else {
        return Vec::new();
    };
    let mut w = Walker {
        cfg,
        series,
        meter,
        accept,
        found: Vec::new(),
        done: false,
    };
    let mut stack = vec![root];
    match cfg.strategy {
        Strategy::Bfs => {
            for depth in 0..=cfg.max_depth {
                w.walk(&mut stack, depth, true);
                if !w.found.is_empty() || w.done || w.meter.exhausted() {
                    break;
                }
            }
        }
        Strategy::Dfs => w.walk(&mut stack, cfg.max_depth, false),
    }
    w.found
}

/// Applies a fixed kita sequence (after the root) to `series`. Returns the
/// solution if every step applies and the last level is solved.
pub fn replay(series: &Series, steps: &[Kita], cfg: &SearchConfig) -> Option<Solution> {
    let mut levels = vec![root_level(series, cfg)?];
    for k in steps {
        let next = expand(levels.last().unwrap(), k, &cfg.apply)?;
        levels.push(next);
    }
    levels.last().unwrap().is_solved().then(|| Solution {
        series: series.clone(),
        levels,
        discovery: 0,
    })
}

/// Searches the whole series without holdout verification.
pub fn solve(series: &Series, cfg: &SearchConfig) -> SearchOutcome {
    let mut meter = Meter::new(cfg.budget);
    let solutions = search_with(series, cfg, &mut meter, &mut |_| true);
    SearchOutcome {
        solutions,
        states: meter.states,
        budget_hit: meter.exhausted(),
    }
}

/// Ordering key: fewer kitas, then longer reach, then catalog order, then
/// discovery order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MdlKey {
    pub cost: usize,
    pub reach: i64,
    pub ranks: Vec<usize>,
    pub discovery: usize,
}

/// Predictions are counted up to this many elements when ranking.
pub const REACH_CAP: usize = 64;

pub fn mdl_key(sol: &Solution, catalog: &Catalog) -> MdlKey {
    let reach = predictor::extend(sol, REACH_CAP).values.len();
    MdlKey {
        cost: sol.cost(),
        reach: -(reach as i64),
        ranks: sol.steps().map(|k| catalog.rank(k).unwrap_or(usize::MAX)).collect(),
        discovery: sol.discovery,
    }
}

pub fn select_mdl<'a>(solutions: &'a [Solution], catalog: &Catalog) -> Option<&'a Solution> {
    solutions.iter().min_by_key(|s| mdl_key(s, catalog))
}

/// Result of a minimal-prefix solve.
#[derive(Debug, Clone)]
pub struct Found {
    pub solution: Solution,
    pub states: u64,
}

/// True when `sol` predicts every held-out element of `full` correctly.
pub fn verifies(sol: &Solution, full: &Series, eps: f64) -> bool {
    let n_e = sol.n_e();
    let holdout = &full.values()[n_e..];
    let pred = predictor::extend(sol, holdout.len());
    pred.values.len() == holdout.len() && pred.values.iter().zip(holdout).all(|(p, h)| p.matches(h, eps))
}

/// Finds the shortest prefix (from 3 elements up to all but one) whose
/// solution predicts the rest of the series.
pub fn minimal_prefix_solve(series: &Series, cfg: &SearchConfig) -> Result<Found, SearchError> {
    let mut meter = Meter::new(cfg.budget);
    minimal_prefix_solve_metered(series, cfg, &mut meter)
}

pub fn minimal_prefix_solve_metered(
    series: &Series,
    cfg: &SearchConfig,
    meter: &mut Meter,
) -> Result<Found, SearchError> {
    let n = series.len();
    if n < 4 {
        return Err(SearchError::TooShort(n));
    }
    let eps = cfg.constancy().epsilon();
    for n_e in 3..n {
        let prefix = series.prefix(n_e).expect("prefix of at least 3");
        let mut accept = |s: &Solution| verifies(s, series, eps);
        let found = search_with(&prefix, cfg, meter, &mut accept);
        let best = match cfg.stop {
            StopMode::FirstSolution => found.into_iter().next(),
            StopMode::Exhaustive => select_mdl(&found, &cfg.catalog).cloned(),
        };
        if let Some(solution) = best {
            return Ok(Found {
                solution,
                states: meter.states,
            });
        }
        if meter.exhausted() {
            return Err(SearchError::BudgetExhausted { states: meter.states });
        }
    }
    Err(SearchError::Unsolved)
}

/// Minimal-prefix solving, falling back to a fit of the whole series when no
/// prefix generalises. A fitted solution has `n_e` equal to the series
/// length and nothing held out to check it against.
pub fn solve_or_fit(series: &Series, cfg: &SearchConfig) -> Result<Found, SearchError> {
    let mut meter = Meter::new(cfg.budget);
    match minimal_prefix_solve_metered(series, cfg, &mut meter) {
        Err(SearchError::Unsolved) => {}
        other => return other,
    }
    let found = search_with(series, cfg, &mut meter, &mut |_| true);
    let best = match cfg.stop {
        StopMode::FirstSolution => found.into_iter().next(),
        StopMode::Exhaustive => select_mdl(&found, &cfg.catalog).cloned(),
    };
    match best {
        Some(solution) => Ok(Found {
            solution,
            states: meter.states,
        }),
        None if meter.exhausted() => Err(SearchError::BudgetExhausted { states: meter.states }),
        None => Err(SearchError::Unsolved),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Profile;

    fn cfg(kitas: &[Kita], mode: Mode, depth: usize) -> SearchConfig {
        let mut c = SearchConfig::new(Arc::new(Catalog::with(kitas)), mode, depth);
        c.budget.max_time = None;
        c
    }

    fn series(v: &[i64]) -> Series {
        Series::from_ints(v).unwrap()
    }

    #[test]
    fn root_only_solution() {
        let out = solve(&series(&[1, 3, 5, 7]), &cfg(&[Kita::Div], Mode::S1Z, 2));
        let s = &out.solutions[0];
        assert_eq!(s.depth(), 1);
        assert_eq!(s.pattern(), "BAS");
        assert_eq!(s.classify(), SolutionType::A);
    }

    #[test]
    fn long_factorial_keeps_its_ratio_table() {
        let mut f = vec![1i64];
        for i in 1..19 {
            f.push(f[i - 1] * (i as i64 + 1));
        }
        let c = cfg(&[Kita::Div, Kita::Red(1)], Mode::S1Z, 2);
        let s = &solve(&series(&f), &c).solutions[0];
        assert_eq!(s.pattern(), "DIV,RED(1)");
        assert_eq!(predictor::extend(s, 1).values[0], crate::value::Value::int(f[18] * 20));
        assert!(replay(&series(&f), &[Kita::Div, Kita::Red(1)], &c).is_some());
        assert!(replay(&series(&f), &[Kita::Red(1)], &c).is_none());
    }

    #[test]
    fn div_red_chain() {
        let c = cfg(&[Kita::Div, Kita::Red(1)], Mode::S1Z, 3);
        let out = solve(&series(&[3, 3, 6, 18, 72]), &c);
        let s = &out.solutions[0];
        assert_eq!(s.pattern(), "DIV,RED(1)");
        assert_eq!(s.depth(), 2);
    }

    #[test]
    fn bfs_prefers_shallow() {
        // RED(1) then RED(1) solves squares too, but BAS alone is shallower.
        let c = cfg(&[Kita::Red(1)], Mode::N1Z, 3);
        let out = solve(&series(&[1, 4, 9, 16, 25]), &c);
        assert!(out.solutions.iter().all(|s| s.depth() == 1));
    }

    #[test]
    fn dfs_finds_deeper_first() {
        let mut c = cfg(&[Kita::Red(1)], Mode::S1Z, 3);
        c.strategy = Strategy::Dfs;
        let out = solve(&series(&[1, 4, 9, 16, 25]), &c);
        assert_eq!(out.solutions[0].depth(), 1);
        let out = solve(&series(&[2, 3, 5, 9, 17, 33]), &cfg(&[Kita::Red(1), Kita::Div], Mode::S1Z, 3));
        assert_eq!(out.solutions[0].pattern(), "RED(1),DIV");
    }

    #[test]
    fn required_levels_matter() {
        let s = series(&[1, 3, 5]);
        assert!(!solve(&s, &cfg(&[], Mode::S1Z, 0)).solutions.is_empty());
        assert!(solve(&s, &cfg(&[], Mode::S2Z, 0)).solutions.is_empty());
    }

    #[test]
    fn budget_stops_search() {
        let mut c = SearchConfig::new(Arc::new(Catalog::profile(Profile::Iq)), Mode::S1Z, 3);
        c.budget = Budget { max_states: Some(10), max_time: None };
        let out = solve(&series(&[5, 1, 8, 2, 9, 4, 4, 7]), &c);
        assert!(out.budget_hit);
        assert!(out.states <= 11);
    }

    #[test]
    fn direct_rule_type_b() {
        let c = cfg(&[Kita::Ssym], Mode::S1Z, 1);
        let out = solve(&series(&[9, 1, 2, 4, 8, 4, 2]), &c);
        assert_eq!(out.solutions[0].classify(), SolutionType::B);
        // the mirror never covers the elements before its window
        let out = solve(&series(&[1, 2, 4, 8, 4]), &c);
        assert_eq!(out.solutions[0].classify(), SolutionType::B);
        let c = cfg(&[Kita::Rsym], Mode::S1Z, 1);
        let out = solve(&series(&[1, 0, 2, 1, 0]), &c);
        assert_eq!(out.solutions[0].classify(), SolutionType::A);
    }

    #[test]
    fn mode_names() {
        for m in Mode::ALL {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        assert!("S3Z".parse::<Mode>().is_err());
    }

    #[test]
    fn minimal_prefix() {
        let c = cfg(&[Kita::Div, Kita::Red(1)], Mode::S1Z, 2);
        let f = minimal_prefix_solve(&series(&[2, 4, 6, 8, 10, 12]), &c).unwrap();
        assert_eq!(f.solution.n_e(), 3);
        let f = minimal_prefix_solve(&series(&[1, 2, 4, 8, 16, 32]), &c).unwrap();
        assert_eq!(f.solution.pattern(), "DIV");
        assert_eq!(f.solution.n_e(), 3);
        assert_eq!(minimal_prefix_solve(&series(&[1, 2, 3]), &c).unwrap_err(), SearchError::TooShort(3));
        let r = minimal_prefix_solve(&series(&[3, 1, 4, 1, 5, 9, 2, 6]), &c);
        assert_eq!(r.unwrap_err(), SearchError::Unsolved);
    }

    #[test]
    fn mdl_prefers_cost_then_rank() {
        let c = cfg(&[Kita::Red(1), Kita::Red(2)], Mode::N1Z, 2);
        let out = solve(&series(&[1, 2, 4, 8, 16, 32, 64]), &c);
        assert!(out.solutions.is_empty());
        let out = solve(&series(&[0, 1, 3, 6, 10, 15]), &cfg(&[Kita::Red(2), Kita::Red(1)], Mode::N1Z, 1));
        let best = select_mdl(&out.solutions, &Catalog::with(&[Kita::Red(2), Kita::Red(1)])).unwrap();
        assert_eq!(best.depth(), 1);
    }
}
