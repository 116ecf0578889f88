//! Numeric tower for series elements.
//!
//! A [`Value`] is either an exact rational or a finite approximate real.
//! Exact rationals keep a machine-word fast path and promote to
//! arbitrary precision on overflow. Anything touching an approximate
//! value becomes approximate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseValueError {
    #[error("empty numeric literal")]
    Empty,
    #[error("invalid numeric literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Exact rational in canonical form (`gcd(|num|, den) = 1`, `den > 0`).
///
/// `Small` is used whenever both parts fit in an `i64`; `Big` never holds
/// a value representable as `Small`, so structural equality is value
/// equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rat {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rat {
    pub fn zero() -> Rat {
        Rat::Small(0, 1)
    }

    pub fn one() -> Rat {
        Rat::Small(1, 1)
    }

    pub fn int(n: i64) -> Rat {
        Rat::Small(n, 1)
    }

    /// Builds `num/den`, reducing to canonical form. Panics on zero `den`.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Rat {
        debug_assert!(den != 0);
        let g = gcd_i128(num, den).max(1);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat::Small(n, d),
            _ => Rat::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))),
        }
    }

    pub fn from_big(r: BigRational) -> Rat {
        // BigRational::new reduces; new_raw callers must already be canonical.
        let (n, d) = (r.numer(), r.denom());
        match (n.to_i64(), d.to_i64()) {
            (Some(n), Some(d)) => Rat::Small(n, d),
            _ => Rat::Big(r),
        }
    }

    pub fn from_bigint(n: BigInt) -> Rat {
        match n.to_i64() {
            Some(v) => Rat::Small(v, 1),
            None => Rat::Big(BigRational::from_integer(n)),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rat::Small(n, _) => BigInt::from(*n),
            Rat::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rat::Small(_, d) => BigInt::from(*d),
            Rat::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rat::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(_, d) => *d == 1,
            Rat::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(r) => r.is_negative(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rat::Small(n, _) => n.signum() as i32,
            Rat::Big(r) => {
                if r.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Rat::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn abs(&self) -> Rat {
        match self {
            Rat::Small(n, d) => match n.checked_abs() {
                Some(a) => Rat::Small(a, *d),
                None => Rat::from_big(self.to_big().abs()),
            },
            Rat::Big(r) => Rat::from_big(r.abs()),
        }
    }

    pub fn neg(&self) -> Rat {
        match self {
            Rat::Small(n, d) => match n.checked_neg() {
                Some(v) => Rat::Small(v, *d),
                None => Rat::from_big(-self.to_big()),
            },
            Rat::Big(r) => Rat::from_big(-r),
        }
    }

    pub fn add(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(a, 1), Rat::Small(c, 1)) => match a.checked_add(*c) {
                Some(v) => Rat::Small(v, 1),
                None => Rat::from_i128(*a as i128 + *c as i128, 1),
            },
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                match a
                    .checked_mul(d)
                    .and_then(|x| c.checked_mul(b).and_then(|y| x.checked_add(y)))
                {
                    Some(n) => Rat::from_i128(n, b * d),
                    None => Rat::from_big(self.to_big() + o.to_big()),
                }
            }
            _ => Rat::from_big(self.to_big() + o.to_big()),
        }
    }

    pub fn sub(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(a, 1), Rat::Small(c, 1)) => match a.checked_sub(*c) {
                Some(v) => Rat::Small(v, 1),
                None => Rat::from_i128(*a as i128 - *c as i128, 1),
            },
            _ => self.add(&o.neg()),
        }
    }

    pub fn mul(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                let n = *a as i128 * *c as i128;
                let den = *b as i128 * *d as i128;
                Rat::from_i128(n, den)
            }
            _ => Rat::from_big(self.to_big() * o.to_big()),
        }
    }

    pub fn recip(&self) -> Option<Rat> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Rat::Small(n, d) => Rat::from_i128(*d as i128, *n as i128),
            Rat::Big(r) => Rat::from_big(r.recip()),
        })
    }

    pub fn div(&self, o: &Rat) -> Option<Rat> {
        if o.is_zero() {
            return None;
        }
        Some(match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                Rat::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => Rat::from_big(self.to_big() / o.to_big()),
        })
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn pow(&self, e: i64) -> Option<Rat> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        if let Rat::Small(n, d) = self {
            if let Ok(e32) = u32::try_from(e) {
                if let (Some(pn), Some(pd)) = (n.checked_pow(e32), d.checked_pow(e32)) {
                    return Some(Rat::Small(pn, pd));
                }
            }
        }
        let e = usize::try_from(e).ok()?;
        let r = self.to_big();
        Some(Rat::from_big(BigRational::new_raw(
            num_traits::pow(r.numer().clone(), e),
            num_traits::pow(r.denom().clone(), e),
        )))
    }

    /// Exact `q`-th root when it exists (negative radicands only for odd `q`).
    pub fn exact_root(&self, q: u32) -> Option<Rat> {
        if q == 1 {
            return Some(self.clone());
        }
        if self.is_negative() && q % 2 == 0 {
            return None;
        }
        let num = self.numer();
        let den = self.denom();
        let rn = root_exact(&num, q)?;
        let rd = root_exact(&den, q)?;
        Some(Rat::from_big(BigRational::new_raw(rn, rd)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rat::Small(n, 1) => *n as f64,
            Rat::Small(n, d) => *n as f64 / *d as f64,
            Rat::Big(r) => {
                let v = r.to_f64().unwrap_or(f64::NAN);
                if v.is_finite() {
                    v
                } else {
                    // Ratio of huge parts: go through logarithms.
                    let s = if r.is_negative() { -1.0 } else { 1.0 };
                    s * (ln_bigint(&r.numer().abs()) - ln_bigint(r.denom())).exp()
                }
            }
        }
    }

    /// Natural logarithm of a positive rational.
    pub fn ln(&self) -> Option<f64> {
        if self.is_negative() || self.is_zero() {
            return None;
        }
        Some(match self {
            Rat::Small(n, d) => (*n as f64).ln() - (*d as f64).ln(),
            Rat::Big(r) => ln_bigint(r.numer()) - ln_bigint(r.denom()),
        })
    }

    pub fn bits(&self) -> u64 {
        match self {
            Rat::Small(..) => 64,
            Rat::Big(r) => r.numer().bits() + r.denom().bits(),
        }
    }
}

fn root_exact(n: &BigInt, q: u32) -> Option<BigInt> {
    let r = n.nth_root(q);
    if num_traits::pow(r.clone(), q as usize) == *n {
        Some(r)
    } else {
        None
    }
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        if let Some(v) = n.to_f64() {
            if v.is_finite() {
                return v.abs().ln();
            }
        }
    }
    let shift = bits.saturating_sub(64);
    let top = (n.abs() >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{n}"),
            Rat::Small(n, d) => write!(f, "{n}/{d}"),
            Rat::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Rat::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Rat {
    type Err = ParseValueError;

    /// Accepts integers, `p/q` fractions and plain decimals (`-1.5625`).
    fn from_str(s: &str) -> Result<Rat, ParseValueError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseValueError::Empty);
        }
        let bad = || ParseValueError::Invalid(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(ParseValueError::ZeroDenominator(s.to_string()));
            }
            return Ok(Rat::from_big(BigRational::new(p, q)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.trim_start().starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if !int_digits.chars().all(|c| c.is_ascii_digit())
                || frac.is_empty()
                || !frac.chars().all(|c| c.is_ascii_digit())
            {
                return Err(bad());
            }
            let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
            let mut num: BigInt = digits.parse().map_err(|_| bad())?;
            if neg {
                num = -num;
            }
            let den = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(Rat::from_big(BigRational::new(num, den)));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rat::from_bigint(n))
    }
}

/// Arithmetic results larger than this (numerator plus denominator bits)
/// are treated as undefined rather than growing without bound.
pub const MAX_EXACT_BITS: u64 = 1 << 13;

/// A series element.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rat),
    /// Always finite.
    Approx(f64),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Exact(Rat::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Value {
        Value::Exact(Rat::new(n, d))
    }

    pub fn zero() -> Value {
        Value::Exact(Rat::zero())
    }

    pub fn one() -> Value {
        Value::Exact(Rat::one())
    }

    /// `None` for NaN or infinities.
    pub fn approx(x: f64) -> Option<Value> {
        x.is_finite().then_some(Value::Approx(x))
    }

    pub fn from_bigint(n: BigInt) -> Value {
        Value::Exact(Rat::from_bigint(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_rat().and_then(Rat::as_i64)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64(),
            Value::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Approx(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_negative(),
            Value::Approx(x) => *x < 0.0,
        }
    }

    /// Zero test: exact values compare exactly, approximate ones within `eps`.
    pub fn near_zero(&self, eps: f64) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Approx(x) => x.abs() < eps,
        }
    }

    pub fn near_one(&self, eps: f64) -> bool {
        match self {
            Value::Exact(r) => r.is_one(),
            Value::Approx(x) => (x - 1.0).abs() < eps,
        }
    }

    /// Equality that is exact between exact values and `eps`-tolerant otherwise.
    pub fn matches(&self, other: &Value, eps: f64) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                let scale = a.abs().max(b.abs()).max(1.0);
                (a - b).abs() < eps * scale
            }
        }
    }

    fn lift(
        &self,
        o: &Value,
        exact: impl FnOnce(&Rat, &Rat) -> Option<Rat>,
        approx: impl FnOnce(f64, f64) -> f64,
    ) -> Option<Value> {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => {
                let r = exact(a, b)?;
                if r.bits() > MAX_EXACT_BITS {
                    return None;
                }
                Some(Value::Exact(r))
            }
            _ => Value::approx(approx(self.to_f64(), o.to_f64())),
        }
    }

    pub fn checked_add(&self, o: &Value) -> Option<Value> {
        self.lift(o, |a, b| Some(a.add(b)), |a, b| a + b)
    }

    pub fn checked_sub(&self, o: &Value) -> Option<Value> {
        self.lift(o, |a, b| Some(a.sub(b)), |a, b| a - b)
    }

    pub fn checked_mul(&self, o: &Value) -> Option<Value> {
        self.lift(o, |a, b| Some(a.mul(b)), |a, b| a * b)
    }

    /// `None` on a zero divisor (exact or approximate).
    pub fn checked_div(&self, o: &Value) -> Option<Value> {
        if o.is_zero() {
            return None;
        }
        self.lift(o, |a, b| a.div(b), |a, b| a / b)
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(r.abs()),
            Value::Approx(x) => Value::Approx(x.abs()),
        }
    }

    /// `self^exponent`. Exact whenever the result is an exact rational;
    /// non-integer exponents reject negative bases and zero bases with
    /// negative exponents.
    pub fn pow_rat(&self, exponent: &Rat) -> Option<Value> {
        if let Some(e) = exponent.as_i64() {
            return match self {
                Value::Exact(base) => {
                    if e.unsigned_abs() > 4096
                        || base.bits().saturating_mul(e.unsigned_abs()) > MAX_EXACT_BITS
                    {
                        Value::approx(self.to_f64().powf(e as f64))
                    } else {
                        base.pow(e).map(Value::Exact)
                    }
                }
                Value::Approx(x) => Value::approx(x.powf(e as f64)),
            };
        }
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return if exponent.is_negative() { None } else { Some(Value::zero()) };
        }
        if let Value::Exact(base) = self {
            let (p, q) = (exponent.numer(), exponent.denom());
            if let (Some(p), Some(q)) = (p.to_i64(), q.to_u32()) {
                if p.unsigned_abs() <= 4096 && base.bits().saturating_mul(p.unsigned_abs()) <= MAX_EXACT_BITS {
                    if let Some(root) = base.exact_root(q) {
                        return root.pow(p).map(Value::Exact);
                    }
                }
            }
        }
        Value::approx(self.to_f64().powf(exponent.to_f64()))
    }

    /// `self^exponent` for an arbitrary value exponent.
    pub fn pow_value(&self, exponent: &Value) -> Option<Value> {
        match exponent {
            Value::Exact(e) => self.pow_rat(e),
            Value::Approx(e) => {
                if self.is_negative() {
                    return None;
                }
                Value::approx(self.to_f64().powf(*e))
            }
        }
    }

    /// Rendering used in records: exact values verbatim, approximate ones
    /// with 12 significant digits.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Approx(x) => {
                let s = format!("{:.*e}", 11, x);
                // Back to positional notation when reasonable.
                let v: f64 = s.parse().unwrap_or(*x);
                if v != 0.0 && (v.abs() >= 1e15 || v.abs() < 1e-6) {
                    write!(f, "~{s}")
                } else {
                    let mut p = format!("{}", v);
                    if !p.contains('.') {
                        p.push_str(".0");
                    }
                    write!(f, "~{p}")
                }
            }
        }
    }
}

impl FromStr for Value {
    type Err = ParseValueError;

    /// Parses the forms produced by `Display` plus plain decimals and
    /// fractions. A leading `~` marks an approximate value.
    fn from_str(s: &str) -> Result<Value, ParseValueError> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('~') {
            let x: f64 = rest
                .parse()
                .map_err(|_| ParseValueError::Invalid(s.to_string()))?;
            return Value::approx(x).ok_or_else(|| ParseValueError::Invalid(s.to_string()));
        }
        t.parse::<Rat>().map(Value::Exact)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Value {
        Value::int(n)
    }
}

impl From<Rat> for Value {
    fn from(r: Rat) -> Value {
        Value::Exact(r)
    }
}

/// Base-10 repdigit split: `(digit, count)` for nonnegative integers whose
/// decimal digits are all equal.
pub fn repdigit(v: &Value) -> Option<(u32, u32)> {
    let r = v.as_rat()?;
    if !r.is_integer() || r.is_negative() {
        return None;
    }
    let s = r.numer().to_str_radix(10);
    let first = s.as_bytes()[0];
    if s.bytes().all(|b| b == first) {
        Some(((first - b'0') as u32, s.len() as u32))
    } else {
        None
    }
}

/// `digit * (10^count - 1) / 9`.
pub fn compose_repdigit(digit: u32, count: u32) -> Value {
    let ones = (num_traits::pow(BigInt::from(10), count as usize) - BigInt::one()) / BigInt::from(9);
    Value::from_bigint(ones * BigInt::from(digit))
}
