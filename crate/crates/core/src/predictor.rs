//! Extends a solved series by running every kita of the solution backwards.

use thiserror::Error;

use crate::edk::Edk;
use crate::kita::{foc_layout, Kita, Op};
use crate::search::{Level, Solution, Status};
use crate::triangle::Growth;
use crate::value::{compose_repdigit, Rat, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// A direct rule has no further elements.
    Exhausted,
    /// An inverse step left its domain (zero divisor, non-integer length, ...).
    Domain,
}

/// Predicted elements, possibly fewer than requested.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub values: Vec<Value>,
    /// Why the extension is shorter than requested.
    pub stop: Option<StopReason>,
}

impl Extension {
    fn full(values: Vec<Value>) -> Extension {
        Extension { values, stop: None }
    }

    fn cut(values: Vec<Value>, why: StopReason) -> Extension {
        Extension { values, stop: Some(why) }
    }

    /// Marks a shortfall with `why` unless a reason is already recorded.
    fn settle(mut self, want: usize, why: Option<StopReason>) -> Extension {
        if self.values.len() < want && self.stop.is_none() {
            self.stop = Some(why.unwrap_or(StopReason::Domain));
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictError {
    #[error("no element could be predicted: an inverse step left its domain")]
    InverseDomain,
}

/// Up to `count` elements following the searched series.
pub fn extend(sol: &Solution, count: usize) -> Extension {
    extend_entry(&sol.levels, 0, 0, count)
}

/// Like [`extend`], but fails when not a single element can be produced
/// because of a domain error.
pub fn predict(sol: &Solution, count: usize) -> Result<Extension, PredictError> {
    let ext = extend(sol, count);
    if count > 0 && ext.values.is_empty() && ext.stop == Some(StopReason::Domain) {
        return Err(PredictError::InverseDomain);
    }
    Ok(ext)
}

fn extend_entry(levels: &[Level], l: usize, i: usize, count: usize) -> Extension {
    if count == 0 {
        return Extension::full(Vec::new());
    }
    let entry = &levels[l].entries[i];
    match &entry.status {
        Status::Constant(k0) => warp(&entry.edk, *k0, count),
        Status::Rule(rule) => {
            let vals = rule.take(count);
            Extension::full(vals).settle(count, Some(StopReason::Exhausted))
        }
        Status::Open => {
            let Some(next) = levels.get(l + 1) else {
                return Extension::cut(Vec::new(), StopReason::Domain);
            };
            let kids: Vec<usize> = next
                .entries
                .iter()
                .enumerate()
                .filter(|(_, e)| e.parent == Some(i))
                .map(|(j, _)| j)
                .collect();
            if next.kita.is_direct() {
                return extend_entry(levels, l + 1, kids[0], count);
            }
            let mut child = |c: usize, need: usize| extend_entry(levels, l + 1, kids[c], need);
            invert(&next.kita, &entry.edk, count, &mut child)
        }
    }
}

/// Extends a solved table by repeating its constant top.
pub fn warp(edk: &Edk, k0: usize, count: usize) -> Extension {
    let mut g = Growth::with_height(edk, k0);
    let target = edk.mode().target();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        match g.push_at_row(k0, target.clone()) {
            Some(v) => out.push(v),
            None => return Extension::cut(out, StopReason::Domain),
        }
    }
    Extension::full(out)
}

type ChildExt<'a> = dyn FnMut(usize, usize) -> Extension + 'a;

/// Rebuilds `count` further base elements of `parent` from extensions of
/// the children `kita` produced.
pub fn invert(kita: &Kita, parent: &Edk, count: usize, child: &mut ChildExt<'_>) -> Extension {
    match kita {
        Kita::Div => child(0, count),
        Kita::Red(r) => {
            let c = child(0, count);
            let mut g = Growth::with_height(parent, *r);
            let mut out = Vec::new();
            for v in c.values {
                match g.push_at_row(*r, v) {
                    Some(x) => out.push(x),
                    None => return Extension::cut(out, StopReason::Domain),
                }
            }
            Extension::full(out).settle(count, c.stop)
        }
        Kita::Ml { dy, dx } => invert_ml(*dy, *dx, parent, count, child),
        Kita::Foc { skip, parts } => invert_foc(*skip, parts, parent, count, child),
        Kita::Exp(e) => invert_exp(e, parent, count, child),
        Kita::Log => {
            let c = child(0, count);
            let mut prev = parent.base().last().unwrap().clone();
            let mut out = Vec::new();
            for y in c.values {
                match prev.abs().pow_value(&y) {
                    Some(x) => {
                        out.push(x.clone());
                        prev = x;
                    }
                    None => return Extension::cut(out, StopReason::Domain),
                }
            }
            Extension::full(out).settle(count, c.stop)
        }
        Kita::Dop(o1, o2) => invert_dop(*o1, *o2, parent, count, child),
        Kita::Dge => invert_dge(count, child),
        Kita::Dgd => invert_dgd(parent, count, child),
        Kita::Soe => invert_soe(count, child),
        Kita::Bas | Kita::Ana { .. } | Kita::Ssym | Kita::Rsym => Extension::cut(Vec::new(), StopReason::Domain),
    }
}

fn invert_ml(dy: usize, dx: usize, parent: &Edk, count: usize, child: &mut ChildExt<'_>) -> Extension {
    let n = parent.len();
    let s = dy + dx;
    let mut exts: Vec<std::vec::IntoIter<Value>> = Vec::with_capacity(s);
    let mut stops = Vec::with_capacity(s);
    for c in 0..s {
        let need = (n..n + count).filter(|d| d % s == c).count();
        let e = child(c, need);
        stops.push(e.stop);
        exts.push(e.values.into_iter());
    }
    let top = (n..n + count).map(|d| d % s + (d / s) * dy).max().unwrap_or(0);
    let mut g = Growth::with_height(parent, top);
    let mut out = Vec::new();
    for d in n..n + count {
        let c = d % s;
        let a = (d - c) / s;
        let Some(v) = exts[c].next() else {
            return Extension::cut(out, stops[c].unwrap_or(StopReason::Domain));
        };
        match g.push_at_row(c + a * dy, v) {
            Some(x) => out.push(x),
            None => return Extension::cut(out, StopReason::Domain),
        }
    }
    Extension::full(out)
}

fn invert_foc(skip: usize, parts: &[usize], parent: &Edk, count: usize, child: &mut ChildExt<'_>) -> Extension {
    let n = parent.len();
    let before = foc_layout(skip, parts, n);
    let after = foc_layout(skip, parts, n + count);
    // owner[p - n] = (child, index into that child's extension)
    let mut owner = vec![None; count];
    let mut exts = Vec::with_capacity(parts.len());
    for (m, (old, new)) in before.iter().zip(&after).enumerate() {
        let fresh = &new[old.len()..];
        for (k, &p) in fresh.iter().enumerate() {
            owner[p - n] = Some((m, k));
        }
        exts.push(child(m, fresh.len()));
    }
    let mut out = Vec::with_capacity(count);
    for o in owner {
        let Some((m, k)) = o else {
            return Extension::cut(out, StopReason::Domain);
        };
        match exts[m].values.get(k) {
            Some(v) => out.push(v.clone()),
            None => return Extension::cut(out, exts[m].stop.unwrap_or(StopReason::Domain)),
        }
    }
    Extension::full(out)
}

/// `x` with `x^e = y`, taking the sign of `hint` when both signs work.
fn root_of(y: &Value, e: &Rat, hint_negative: bool) -> Option<Value> {
    let inv = e.recip()?;
    let mag = y.abs().pow_rat(&inv)?;
    let odd_numer = e.numer().bit(0);
    if y.is_negative() {
        // only odd powers reach negative values
        return odd_numer.then(|| Value::zero().checked_sub(&mag)).flatten();
    }
    if hint_negative && !odd_numer && !mag.is_zero() {
        return Value::zero().checked_sub(&mag);
    }
    Some(mag)
}

fn invert_exp(e: &Rat, parent: &Edk, count: usize, child: &mut ChildExt<'_>) -> Extension {
    let c = child(0, count);
    let hint = parent.base().last().unwrap().is_negative();
    let mut out = Vec::new();
    for y in &c.values {
        match root_of(y, e, hint) {
            Some(x) => out.push(x),
            None => return Extension::cut(out, StopReason::Domain),
        }
    }
    Extension::full(out).settle(count, c.stop)
}

fn invert_dop(o1: Op, o2: Op, parent: &Edk, count: usize, child: &mut ChildExt<'_>) -> Extension {
    let c = child(0, count);
    let n = parent.len();
    let mut prev = parent.base()[n - 1].clone();
    let mut out = Vec::new();
    for (k, y) in c.values.iter().enumerate() {
        // child element i (0-based) links parent elements i and i + 1
        let i = n - 1 + k;
        let op = if i % 2 == 0 { o1 } else { o2 };
        match op.solve_left(y, &prev) {
            Some(x) => {
                out.push(x.clone());
                prev = x;
            }
            None => return Extension::cut(out, StopReason::Domain),
        }
    }
    Extension::full(out).settle(count, c.stop)
}

/// A positive integer that can serve as a repeat count.
fn length(v: &Value) -> Option<usize> {
    let n = v.as_i64()?;
    (1..=1_000_000).contains(&n).then_some(n as usize)
}

fn invert_dge(count: usize, child: &mut ChildExt<'_>) -> Extension {
    let lens = child(1, count);
    let mut runs = Vec::new();
    let mut covered = 0;
    for b in &lens.values {
        if covered >= count {
            break;
        }
        let Some(b) = length(b) else { break };
        runs.push(b);
        covered += b;
    }
    let vals = child(0, runs.len());
    let mut out = Vec::with_capacity(count);
    for (k, &b) in runs.iter().enumerate() {
        let Some(a) = vals.values.get(k) else {
            return Extension::cut(out, vals.stop.unwrap_or(StopReason::Domain));
        };
        for _ in 0..b.min(count - out.len()) {
            out.push(a.clone());
        }
    }
    let why = if covered < count && runs.len() < lens.values.len() { Some(StopReason::Domain) } else { lens.stop };
    Extension::full(out).settle(count, why)
}

fn invert_dgd(parent: &Edk, count: usize, child: &mut ChildExt<'_>) -> Extension {
    let lens = child(1, count);
    let mut groups = Vec::new();
    let mut covered = 0;
    for b in &lens.values {
        if covered >= count {
            break;
        }
        let Some(b) = length(b) else { break };
        groups.push(b);
        covered += b;
    }
    // distinct values seen so far, in order of first appearance
    let mut distinct: Vec<Value> = Vec::new();
    for v in parent.base() {
        if !distinct.contains(v) {
            distinct.push(v.clone());
        }
    }
    let widest = groups.iter().copied().max().unwrap_or(0);
    let more = child(0, widest.saturating_sub(distinct.len()));
    distinct.extend(more.values);
    let mut out = Vec::with_capacity(count);
    for &b in &groups {
        if b > distinct.len() {
            return Extension::cut(out, more.stop.unwrap_or(StopReason::Domain));
        }
        for v in distinct.iter().take(b.min(count - out.len())) {
            out.push(v.clone());
        }
    }
    let why = if covered < count && groups.len() < lens.values.len() { Some(StopReason::Domain) } else { lens.stop };
    Extension::full(out).settle(count, why)
}

fn invert_soe(count: usize, child: &mut ChildExt<'_>) -> Extension {
    let digits = child(0, count);
    let counts = child(1, count);
    let mut out = Vec::new();
    for (d, c) in digits.values.iter().zip(&counts.values) {
        let digit = d.as_i64().filter(|d| (0..=9).contains(d));
        let reps = c.as_i64().filter(|c| (1..=10_000).contains(c));
        match (digit, reps) {
            (Some(d), Some(c)) => out.push(compose_repdigit(d as u32, c as u32)),
            _ => return Extension::cut(out, StopReason::Domain),
        }
    }
    let why = digits.stop.or(counts.stop);
    Extension::full(out).settle(count, why)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::edk::Series;
    use crate::search::{solve, Mode, SearchConfig};
    use std::sync::Arc;

    fn ints(v: &[i64]) -> Vec<Value> {
        v.iter().map(|&x| Value::int(x)).collect()
    }

    fn run(kitas: &[Kita], series: &[i64], count: usize) -> (String, Extension) {
        let mut cfg = SearchConfig::new(Arc::new(Catalog::with(kitas)), Mode::S1Z, 3);
        cfg.budget.max_time = None;
        let out = solve(&Series::from_ints(series).unwrap(), &cfg);
        let sol = out.solutions.first().expect("solved");
        (sol.pattern(), extend(sol, count))
    }

    #[test]
    fn warp_polynomial() {
        let (p, e) = run(&[], &[1, 4, 9, 16], 3);
        assert_eq!(p, "BAS");
        assert_eq!(e.values, ints(&[25, 36, 49]));
    }

    #[test]
    fn red_after_div() {
        let (p, e) = run(&[Kita::Div, Kita::Red(1)], &[3, 3, 6, 18, 72], 2);
        assert_eq!(p, "DIV,RED(1)");
        assert_eq!(e.values, ints(&[360, 2160]));
    }

    #[test]
    fn ml_fibonacci() {
        let (p, e) = run(&[Kita::Ml { dy: 1, dx: 1 }], &[3, 5, 8, 13, 21, 34], 4);
        assert_eq!(p, "ML(1,1)");
        assert_eq!(e.values, ints(&[55, 89, 144, 233]));
    }

    #[test]
    fn foc_interleaved() {
        let (p, e) = run(&[Kita::Foc { skip: 0, parts: vec![1, 1] }], &[-6, -4, 0, 2, 6, 8], 3);
        assert_eq!(p, "FOC(0,{1,1})");
        assert_eq!(e.values, ints(&[12, 14, 18]));
    }

    #[test]
    fn exp_log_dop() {
        let (_, e) = run(&[Kita::Exp(Rat::new(1, 4))], &[1, 16, 81, 256], 2);
        assert_eq!(e.values, ints(&[625, 1296]));
        let (_, e) = run(&[Kita::Log], &[65536, 256, 16, 4], 2);
        assert_eq!(e.values[0], Value::int(2));
        assert!((e.values[1].to_f64() - 2f64.sqrt()).abs() < 1e-9);
        let (_, e) = run(&[Kita::Dop(Op::Sub, Op::Div)], &[3, 5, 10, 12, 24], 2);
        assert_eq!(e.values, ints(&[26, 52]));
    }

    #[test]
    fn direct_rules() {
        let (_, e) = run(&[Kita::Ssym], &[1, 2, 4, 8, 4], 5);
        assert_eq!(e.values, ints(&[2, 1]));
        assert_eq!(e.stop, Some(StopReason::Exhausted));
        let (_, e) = run(&[Kita::Rsym], &[1, 0, 2, 1, 0], 4);
        assert_eq!(e.values, ints(&[2, 1, 0, 2]));
        let (_, e) = run(&[Kita::Ana { skip: 0, group: 4 }], &[1, 3, 5, 7, 2, 4], 5);
        assert_eq!(e.values, ints(&[6, 8]));
    }

    #[test]
    fn grouping_kitas() {
        let (_, e) = run(&[Kita::Dge], &[1, 3, 3, 5, 5, 5], 6);
        assert_eq!(e.values, ints(&[7, 7, 7, 7, 9, 9]));
        let (_, e) = run(&[Kita::Dgd], &[2, 2, 4, 2, 4, 6], 6);
        assert_eq!(e.values, ints(&[2, 4, 6, 8, 2, 4]));
        let (_, e) = run(&[Kita::Soe], &[1, 11, 111], 2);
        assert_eq!(e.values, ints(&[1111, 11111]));
    }

    #[test]
    fn negative_square_roots_keep_sign() {
        let (p, e) = run(&[Kita::Exp(Rat::int(2))], &[-1, -2, -3, -4], 1);
        assert_eq!(p, "BAS");
        assert_eq!(e.values, ints(&[-5]));
        let y = root_of(&Value::int(9), &Rat::int(2), true).unwrap();
        assert_eq!(y, Value::int(-3));
        assert_eq!(root_of(&Value::int(-8), &Rat::int(3), false).unwrap(), Value::int(-2));
        assert!(root_of(&Value::int(-4), &Rat::int(2), false).is_none());
    }
}
