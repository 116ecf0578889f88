//! Kitas: transformations from a parent triangle to child triangles or to
//! a direct continuation of its base.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::edk::{ConstancyConfig, Edk, EdkMode};
use crate::triangle::Growth;
use crate::value::{repdigit, Rat, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KitaError {
    #[error("kita not applicable: {0}")]
    Inapplicable(&'static str),
}

fn nope<T>(reason: &'static str) -> Result<T, KitaError> {
    Err(KitaError::Inapplicable(reason))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Add, Op::Sub, Op::Mul, Op::Div];

    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
            Op::Div => '/',
        }
    }

    /// `a op b`.
    pub fn eval(self, a: &Value, b: &Value) -> Option<Value> {
        match self {
            Op::Add => a.checked_add(b),
            Op::Sub => a.checked_sub(b),
            Op::Mul => a.checked_mul(b),
            Op::Div => a.checked_div(b),
        }
    }

    /// Solves `y = a op b` for `a`.
    pub fn solve_left(self, y: &Value, b: &Value) -> Option<Value> {
        match self {
            Op::Add => y.checked_sub(b),
            Op::Sub => y.checked_add(b),
            Op::Mul => y.checked_div(b),
            Op::Div => y.checked_mul(b),
        }
    }

    fn parse(s: &str) -> Option<Op> {
        match s {
            "+" => Some(Op::Add),
            "-" => Some(Op::Sub),
            "*" | "x" | "×" => Some(Op::Mul),
            "/" | "÷" => Some(Op::Div),
            _ => None,
        }
    }
}

/// A kita together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Kita {
    /// Difference table over the series; the root of every search.
    Bas,
    /// Ratio table over the same base.
    Div,
    /// Focus on row `r` of the parent.
    Red(usize),
    /// Slopes of the triangle with vertical step `dy` and horizontal step `dx`.
    Ml { dy: usize, dx: usize },
    /// Split into interleaved subseries after moving `skip` elements aside.
    Foc { skip: usize, parts: Vec<usize> },
    /// Groups of `group` elements sharing a constant row.
    Ana { skip: usize, group: usize },
    Exp(Rat),
    Log,
    Dop(Op, Op),
    Ssym,
    Rsym,
    Dge,
    Dgd,
    Soe,
}

/// Family name of a kita, used for usage statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KitaKind {
    Ana,
    Bas,
    Dgd,
    Dge,
    Div,
    Dop,
    Exp,
    Foc,
    Log,
    Ml,
    Red,
    Rsym,
    Soe,
    Ssym,
}

impl KitaKind {
    pub const ALL: [KitaKind; 14] = [
        KitaKind::Ana,
        KitaKind::Bas,
        KitaKind::Dgd,
        KitaKind::Dge,
        KitaKind::Div,
        KitaKind::Dop,
        KitaKind::Exp,
        KitaKind::Foc,
        KitaKind::Log,
        KitaKind::Ml,
        KitaKind::Red,
        KitaKind::Rsym,
        KitaKind::Soe,
        KitaKind::Ssym,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KitaKind::Ana => "ANA",
            KitaKind::Bas => "BAS",
            KitaKind::Dgd => "DGD",
            KitaKind::Dge => "DGE",
            KitaKind::Div => "DIV",
            KitaKind::Dop => "DOP",
            KitaKind::Exp => "EXP",
            KitaKind::Foc => "FOC",
            KitaKind::Log => "LOG",
            KitaKind::Ml => "ML",
            KitaKind::Red => "RED",
            KitaKind::Rsym => "RSYM",
            KitaKind::Soe => "SOE",
            KitaKind::Ssym => "SSYM",
        }
    }
}

impl Kita {
    pub fn kind(&self) -> KitaKind {
        match self {
            Kita::Bas => KitaKind::Bas,
            Kita::Div => KitaKind::Div,
            Kita::Red(_) => KitaKind::Red,
            Kita::Ml { .. } => KitaKind::Ml,
            Kita::Foc { .. } => KitaKind::Foc,
            Kita::Ana { .. } => KitaKind::Ana,
            Kita::Exp(_) => KitaKind::Exp,
            Kita::Log => KitaKind::Log,
            Kita::Dop(..) => KitaKind::Dop,
            Kita::Ssym => KitaKind::Ssym,
            Kita::Rsym => KitaKind::Rsym,
            Kita::Dge => KitaKind::Dge,
            Kita::Dgd => KitaKind::Dgd,
            Kita::Soe => KitaKind::Soe,
        }
    }

    /// Kitas that continue the base directly instead of producing children.
    pub fn is_direct(&self) -> bool {
        matches!(self, Kita::Ana { .. } | Kita::Ssym | Kita::Rsym)
    }

    /// Checks parameter constraints that do not depend on the input.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Kita::Red(r) if *r == 0 => Err("RED needs r >= 1".into()),
            Kita::Ml { dx, .. } if *dx == 0 => Err("ML needs dx >= 1".into()),
            Kita::Foc { skip, parts } => {
                let sd: usize = parts.iter().sum();
                if parts.is_empty() || parts.contains(&0) {
                    Err("FOC fragment sizes must be positive".into())
                } else if *skip > sd {
                    Err("FOC offset exceeds the fragment total".into())
                } else {
                    Ok(())
                }
            }
            Kita::Ana { group, .. } if *group < 2 => Err("ANA needs groups of at least 2".into()),
            Kita::Exp(e) if e.is_zero() => Err("EXP needs a nonzero exponent".into()),
            Kita::Dop(a, b) if a == b => Err("DOP needs two different operators".into()),
            _ => Ok(()),
        }
    }

    /// Compact label, e.g. `FOC(0,{1,1})`.
    pub fn label(&self) -> String {
        match self {
            Kita::Red(r) => format!("RED({r})"),
            Kita::Ml { dy, dx } => format!("ML({dy},{dx})"),
            Kita::Foc { skip, parts } => format!("FOC({skip},{{{}}})", join(parts)),
            Kita::Ana { skip, group } => format!("ANA({skip},{group})"),
            Kita::Exp(e) => format!("EXP({e})"),
            Kita::Dop(a, b) => format!("DOP({},{})", a.symbol(), b.symbol()),
            other => other.kind().name().to_string(),
        }
    }
}

fn join(parts: &[usize]) -> String {
    parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

/// Line format of catalog files: `RED 1`, `FOC 0 1,1`, `DOP - /`, `EXP 1/4`.
impl fmt::Display for Kita {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.kind().name();
        match self {
            Kita::Red(r) => write!(f, "{name} {r}"),
            Kita::Ml { dy, dx } => write!(f, "{name} {dy} {dx}"),
            Kita::Foc { skip, parts } => write!(f, "{name} {skip} {}", join(parts)),
            Kita::Ana { skip, group } => write!(f, "{name} {skip} {group}"),
            Kita::Exp(e) => write!(f, "{name} {e}"),
            Kita::Dop(a, b) => write!(f, "{name} {} {}", a.symbol(), b.symbol()),
            _ => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse kita `{0}`")]
pub struct ParseKitaError(pub String);

impl FromStr for Kita {
    type Err = ParseKitaError;

    fn from_str(s: &str) -> Result<Kita, ParseKitaError> {
        let err = || ParseKitaError(s.to_string());
        let toks: Vec<&str> = s.split_whitespace().collect();
        let (&head, args) = toks.split_first().ok_or_else(err)?;
        let num = |i: usize| -> Result<usize, ParseKitaError> {
            args.get(i).ok_or_else(err)?.parse().map_err(|_| err())
        };
        let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(err()) };
        let kita = match head.to_ascii_uppercase().as_str() {
            "BAS" | "BASIC" => arity(0).map(|_| Kita::Bas)?,
            "DIV" => arity(0).map(|_| Kita::Div)?,
            "RED" => {
                arity(1)?;
                Kita::Red(num(0)?)
            }
            "ML" => {
                arity(2)?;
                Kita::Ml { dy: num(0)?, dx: num(1)? }
            }
            "FOC" => {
                arity(2)?;
                let parts = args[1]
                    .trim_matches(|c| c == '{' || c == '}')
                    .split(',')
                    .map(|p| p.trim().parse::<usize>().map_err(|_| err()))
                    .collect::<Result<Vec<_>, _>>()?;
                Kita::Foc { skip: num(0)?, parts }
            }
            "ANA" => {
                arity(2)?;
                Kita::Ana { skip: num(0)?, group: num(1)? }
            }
            "EXP" => {
                arity(1)?;
                Kita::Exp(args[0].parse().map_err(|_| err())?)
            }
            "LOG" => arity(0).map(|_| Kita::Log)?,
            "DOP" => {
                arity(2)?;
                Kita::Dop(Op::parse(args[0]).ok_or_else(err)?, Op::parse(args[1]).ok_or_else(err)?)
            }
            "SSYM" => arity(0).map(|_| Kita::Ssym)?,
            "RSYM" => arity(0).map(|_| Kita::Rsym)?,
            "DGE" => arity(0).map(|_| Kita::Dge)?,
            "DGD" => arity(0).map(|_| Kita::Dgd)?,
            "SOE" => arity(0).map(|_| Kita::Soe)?,
            _ => return Err(err()),
        };
        kita.validate().map_err(|_| err())?;
        Ok(kita)
    }
}

/// Continuation of a base produced without child triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectRule {
    pub kind: DirectKind,
    /// Leading base elements the rule does not account for.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DirectKind {
    /// Repeats `period` forever, continuing at position `phase` of it.
    Periodic { period: Vec<Value>, phase: usize },
    /// A fixed, possibly empty, list of further elements.
    Finite(Vec<Value>),
}

impl DirectRule {
    /// Up to `count` further elements; fewer when the rule is bounded.
    pub fn take(&self, count: usize) -> Vec<Value> {
        match &self.kind {
            DirectKind::Periodic { period, phase } => (0..count)
                .map(|k| period[(phase + k) % period.len()].clone())
                .collect(),
            DirectKind::Finite(vals) => vals.iter().take(count).cloned().collect(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.kind, DirectKind::Finite(_))
    }
}

/// Options that tune individual kitas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApplyOptions {
    pub constancy: ConstancyConfig,
    /// ANA: when no row is constant with identical values across groups,
    /// accept a row that is merely constant within each group.
    pub ana_fallback: bool,
}

impl Default for ApplyOptions {
    fn default() -> Self {
        ApplyOptions {
            constancy: ConstancyConfig::default(),
            ana_fallback: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KitaResult {
    Children(Vec<Edk>),
    Direct(DirectRule),
}

impl KitaResult {
    pub fn children(&self) -> &[Edk] {
        match self {
            KitaResult::Children(c) => c,
            KitaResult::Direct(_) => &[],
        }
    }

    pub fn direct(&self) -> Option<&DirectRule> {
        match self {
            KitaResult::Direct(d) => Some(d),
            KitaResult::Children(_) => None,
        }
    }
}

fn child(values: Vec<Value>) -> Result<Edk, KitaError> {
    if values.len() < 2 {
        return nope("child shorter than 2 elements");
    }
    Edk::from_values(values, EdkMode::Differences, None).map_err(|_| KitaError::Inapplicable("child table undefined"))
}

/// Applies `kita` to `edk`.
pub fn apply(kita: &Kita, edk: &Edk, opts: &ApplyOptions) -> Result<KitaResult, KitaError> {
    use KitaResult::{Children, Direct};
    Ok(match kita {
        Kita::Bas => return nope("BAS only builds the root"),
        Kita::Div => Children(vec![apply_div(edk)?]),
        Kita::Red(r) => Children(vec![apply_red(*r, edk)?]),
        Kita::Ml { dy, dx } => Children(apply_ml(*dy, *dx, edk)?),
        Kita::Foc { skip, parts } => Children(apply_foc(*skip, parts, edk)?),
        Kita::Ana { skip, group } => Direct(apply_ana(*skip, *group, edk, opts)?),
        Kita::Exp(e) => Children(vec![apply_exp(e, edk)?]),
        Kita::Log => Children(vec![apply_log(edk)?]),
        Kita::Dop(a, b) => Children(vec![apply_dop(*a, *b, edk)?]),
        Kita::Ssym => Direct(apply_ssym(edk, opts.constancy.epsilon())?),
        Kita::Rsym => Direct(apply_rsym(edk, opts.constancy.epsilon())?),
        Kita::Dge => Children(apply_dge(edk, opts.constancy.epsilon())?),
        Kita::Dgd => Children(apply_dgd(edk, opts.constancy.epsilon())?),
        Kita::Soe => Children(apply_soe(edk)?),
    })
}

pub fn apply_div(edk: &Edk) -> Result<Edk, KitaError> {
    if edk.mode() == EdkMode::Ratios {
        return nope("already a ratio table");
    }
    Edk::from_values(edk.base().to_vec(), EdkMode::Ratios, None)
        .map_err(|_| KitaError::Inapplicable("zero in ratio base"))
}

pub fn apply_red(r: usize, edk: &Edk) -> Result<Edk, KitaError> {
    let n = edk.len();
    if r == 0 || r + 2 > n {
        return nope("RED level out of range");
    }
    match edk.row(r) {
        Some(row) => child(row.to_vec()),
        None => nope("row not built"),
    }
}

/// Cells `(row, col)` (col 0-based) visited by ML child `c` (0-based) in a
/// triangle whose base has `n` elements.
pub fn ml_cells(dy: usize, dx: usize, c: usize, n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..)
        .map(move |a: usize| (c + a * dy, a * dx))
        .take_while(move |&(row, col)| row < n && col < n - row)
}

pub fn apply_ml(dy: usize, dx: usize, edk: &Edk) -> Result<Vec<Edk>, KitaError> {
    if dx == 0 || dy + dx == 0 {
        return nope("ML needs dx >= 1");
    }
    let n = edk.len();
    if edk.built_rows() + 1 < n {
        return nope("table not fully built");
    }
    (0..dy + dx)
        .map(|c| {
            let vals: Vec<Value> = ml_cells(dy, dx, c, n)
                .map(|(row, col)| edk.rows()[row][col].clone())
                .collect();
            child(vals)
        })
        .collect()
}

/// Positions (0-based) of each FOC subseries in a base of length `n`:
/// first the remainder elements, then the regular coordinates.
pub fn foc_layout(skip: usize, parts: &[usize], n: usize) -> Vec<Vec<usize>> {
    let sd: usize = parts.iter().sum();
    let l = parts.len();
    let mut regular: Vec<Vec<usize>> = vec![Vec::new(); l];
    if sd == 0 || n <= skip {
        return regular;
    }
    let periods = (n - skip).div_ceil(sd);
    for (m, positions) in regular.iter_mut().enumerate() {
        let offset: usize = parts[..m].iter().sum();
        for p in 0..periods {
            for q in 1..=parts[m] {
                let c = skip + offset + q + p * sd;
                if c <= n {
                    positions.push(c - 1);
                }
            }
        }
    }
    // Remainders, taken from the end of the moved prefix, last subseries first.
    let mut remaining: Vec<usize> = (0..skip.min(n)).collect();
    let mut rems: Vec<Vec<usize>> = vec![Vec::new(); l];
    for m in (0..l).rev() {
        let take = parts[m].min(remaining.len());
        rems[m] = remaining.split_off(remaining.len() - take);
    }
    rems.into_iter()
        .zip(regular)
        .map(|(mut r, s)| {
            r.extend(s);
            r
        })
        .collect()
}

pub fn apply_foc(skip: usize, parts: &[usize], edk: &Edk) -> Result<Vec<Edk>, KitaError> {
    let n = edk.len();
    let sd: usize = parts.iter().sum();
    if parts.is_empty() || parts.contains(&0) || skip > sd || skip + sd > n || n < 4 {
        return nope("FOC constraints");
    }
    let base = edk.base();
    foc_layout(skip, parts, n)
        .into_iter()
        .map(|pos| child(pos.into_iter().map(|p| base[p].clone()).collect()))
        .collect()
}

fn all_equal(row: &[Value], eps: f64) -> bool {
    row.windows(2).all(|w| w[0].matches(&w[1], eps))
}

pub fn apply_ana(skip: usize, group: usize, edk: &Edk, opts: &ApplyOptions) -> Result<DirectRule, KitaError> {
    let n = edk.len();
    let eps = opts.constancy.epsilon();
    if skip + 4 > n || group < 2 || group + skip + 1 > n || (n - skip) % group == 0 {
        return nope("ANA constraints");
    }
    let body = &edk.base()[skip..];
    let full: Vec<Edk> = body
        .chunks(group)
        .filter(|g| g.len() == group)
        .map(|g| Edk::from_values(g.to_vec(), EdkMode::Differences, None))
        .collect::<Result<_, _>>()
        .map_err(|_| KitaError::Inapplicable("group table undefined"))?;
    let last = &body[full.len() * group..];

    let pick = |strict: bool| -> Option<(usize, Value)> {
        (1..group).find_map(|r| {
            // A single cell is trivially constant: demand at least two
            // cells overall, and two per group when groups may disagree.
            let cells = group - r;
            if r > last.len() || full.len() * cells < 2 || (!strict && cells < 2) {
                return None;
            }
            let rows: Vec<&[Value]> = full.iter().map(|e| e.row(r).unwrap()).collect();
            if !rows.iter().all(|row| all_equal(row, eps)) {
                return None;
            }
            let v = rows.last().unwrap()[0].clone();
            if strict && !rows.iter().all(|row| row[0].matches(&v, eps)) {
                return None;
            }
            Some((r, v))
        })
    };
    let (r, v) = match pick(true) {
        Some(found) => found,
        None if opts.ana_fallback => match pick(false) {
            Some(found) => found,
            None => return nope("no common constant row"),
        },
        None => return nope("no common constant row"),
    };
    let mut growth = Growth::from_values(EdkMode::Differences, last).ok_or(KitaError::Inapplicable("last group"))?;
    // The partial group must agree with the shared row where it reaches it.
    if let Some(row) = growth.row(r) {
        if !row.iter().all(|x| x.matches(&v, eps)) {
            return nope("last group disagrees");
        }
    }
    let mut out = Vec::with_capacity(group - last.len());
    for _ in last.len()..group {
        out.push(growth.push_at_row(r, v.clone()).ok_or(KitaError::Inapplicable("ANA completion"))?);
    }
    Ok(DirectRule {
        kind: DirectKind::Finite(out),
        skipped: skip,
    })
}

pub fn apply_exp(e: &Rat, edk: &Edk) -> Result<Edk, KitaError> {
    if e.is_zero() {
        return nope("zero exponent");
    }
    let base = edk.base();
    if !e.is_integer() && base.iter().any(|x| x.is_zero() || x.is_negative()) {
        return nope("fractional power of zero or negative");
    }
    if e.is_negative() && base.iter().any(Value::is_zero) {
        return nope("negative power of zero");
    }
    let vals: Option<Vec<Value>> = base.iter().map(|x| x.pow_rat(e)).collect();
    child(vals.ok_or(KitaError::Inapplicable("EXP domain"))?)
}

/// `log_a(b)` for positive `a != 1`, exact when `b^q = a^p` for small `p`, `q`.
pub fn log_value(a: &Value, b: &Value) -> Option<Value> {
    let (a, b) = (a.abs(), b.abs());
    if a.is_zero() || b.is_zero() || a.near_one(0.0) && a.is_exact() {
        return None;
    }
    if let (Value::Exact(ra), Value::Exact(rb)) = (&a, &b) {
        if rb.is_one() {
            return Some(Value::zero());
        }
        let est = rb.ln()? / ra.ln()?;
        if est.is_finite() {
            for q in 1..=16i64 {
                let p = (est * q as f64).round();
                if p == 0.0 || p.abs() > 64.0 {
                    continue;
                }
                let p = p as i64;
                if ra.bits().saturating_mul(p.unsigned_abs()) > 1 << 16
                    || rb.bits().saturating_mul(q as u64) > 1 << 16
                {
                    continue;
                }
                if rb.pow(q) == ra.pow(p) {
                    return Some(Value::Exact(Rat::new(p, q)));
                }
            }
        }
        return Value::approx(est);
    }
    let (fa, fb) = (a.to_f64(), b.to_f64());
    if fa <= 0.0 || fb <= 0.0 || fa == 1.0 {
        return None;
    }
    Value::approx(fb.ln() / fa.ln())
}

pub fn apply_log(edk: &Edk) -> Result<Edk, KitaError> {
    let base = edk.base();
    let n = base.len();
    if base[..n - 1].iter().any(|x| x.is_zero() || x.abs().matches(&Value::one(), 0.0)) || base[n - 1].is_zero() {
        return nope("LOG domain");
    }
    let vals: Option<Vec<Value>> = base.windows(2).map(|w| log_value(&w[0], &w[1])).collect();
    child(vals.ok_or(KitaError::Inapplicable("LOG domain"))?)
}

pub fn apply_dop(o1: Op, o2: Op, edk: &Edk) -> Result<Edk, KitaError> {
    let base = edk.base();
    if base.len() < 3 {
        return nope("DOP needs 3 elements");
    }
    let vals: Option<Vec<Value>> = base
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            // i is 0-based: odd 1-based positions use the first operator
            let op = if i % 2 == 0 { o1 } else { o2 };
            op.eval(&w[1], &w[0])
        })
        .collect();
    child(vals.ok_or(KitaError::Inapplicable("DOP division by zero"))?)
}

pub fn apply_ssym(edk: &Edk, eps: f64) -> Result<DirectRule, KitaError> {
    let x = edk.base();
    let n = x.len();
    if n < 4 {
        return nope("SSYM needs 4 elements");
    }
    // 1-based pivot j from round(n/2) to n-1.
    for j in n.div_ceil(2).max(1)..n {
        let mirrored = (1..=n - j).filter(|&m| m < j).all(|m| x[j + m - 1].matches(&x[j - m - 1], eps));
        let first_new = n - j + 1;
        if mirrored && first_new < j {
            let out: Vec<Value> = (first_new..j).map(|m| x[j - m - 1].clone()).collect();
            return Ok(DirectRule {
                kind: DirectKind::Finite(out),
                skipped: (2 * j).saturating_sub(n + 1),
            });
        }
    }
    nope("no mirror pivot")
}

pub fn apply_rsym(edk: &Edk, eps: f64) -> Result<DirectRule, KitaError> {
    let x = edk.base();
    let n = x.len();
    if n < 3 {
        return nope("RSYM needs 3 elements");
    }
    for j in 2..n {
        if (0..n - j).all(|i| x[i + j].matches(&x[i], eps)) {
            return Ok(DirectRule {
                kind: DirectKind::Periodic {
                    period: x[..j].to_vec(),
                    phase: n % j,
                },
                skipped: 0,
            });
        }
    }
    nope("no period")
}

/// Maximal runs of equal elements as `(value, length)`.
pub fn runs(x: &[Value], eps: f64) -> Vec<(Value, usize)> {
    let mut out: Vec<(Value, usize)> = Vec::new();
    for v in x {
        match out.last_mut() {
            Some((w, len)) if w.matches(v, eps) => *len += 1,
            _ => out.push((v.clone(), 1)),
        }
    }
    out
}

pub fn apply_dge(edk: &Edk, eps: f64) -> Result<Vec<Edk>, KitaError> {
    let rs = runs(edk.base(), eps);
    if rs.len() < 2 || rs.len() >= edk.len() {
        return nope("DGE needs 2..n-1 runs");
    }
    let values = rs.iter().map(|(v, _)| v.clone()).collect();
    let lens = rs.iter().map(|&(_, l)| Value::int(l as i64)).collect();
    Ok(vec![child(values)?, child(lens)?])
}

/// Greedy split into groups that are prefixes of the distinct-value list.
/// Returns the distinct list and the group lengths.
pub fn dgd_groups(x: &[Value], eps: f64) -> Option<(Vec<Value>, Vec<usize>)> {
    let mut distinct: Vec<Value> = Vec::new();
    for v in x {
        if !distinct.iter().any(|d| d.matches(v, eps)) {
            distinct.push(v.clone());
        }
    }
    if distinct.len() < 2 {
        return None;
    }
    let mut lens = Vec::new();
    let mut pos = 0;
    while pos < x.len() {
        if !x[pos].matches(&distinct[0], eps) {
            return None;
        }
        let mut len = 1;
        while pos + len < x.len() && len < distinct.len() && x[pos + len].matches(&distinct[len], eps) {
            len += 1;
        }
        lens.push(len);
        pos += len;
    }
    (lens.len() >= 2).then_some((distinct, lens))
}

pub fn apply_dgd(edk: &Edk, eps: f64) -> Result<Vec<Edk>, KitaError> {
    let (distinct, lens) = dgd_groups(edk.base(), eps).ok_or(KitaError::Inapplicable("no prefix groups"))?;
    let lens = lens.into_iter().map(|l| Value::int(l as i64)).collect();
    Ok(vec![child(distinct)?, child(lens)?])
}

pub fn apply_soe(edk: &Edk) -> Result<Vec<Edk>, KitaError> {
    let split: Option<Vec<(u32, u32)>> = edk.base().iter().map(repdigit).collect();
    let split = split.ok_or(KitaError::Inapplicable("not all repdigits"))?;
    let digits = split.iter().map(|&(d, _)| Value::int(d as i64)).collect();
    let counts = split.iter().map(|&(_, c)| Value::int(c as i64)).collect();
    Ok(vec![child(digits)?, child(counts)?])
}
