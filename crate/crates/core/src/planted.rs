//! Random series with a known kita pattern, for testing the search.
//!
//! Generation runs the pattern backwards: every child series is produced
//! first, then folded into its parent by the inverse of the kita.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::edk::{EdkMode, Series};
use crate::kita::{foc_layout, Kita};
use crate::value::Value;

const MAX_BITS: u64 = 512;

/// Kitas the generator knows how to invert.
pub fn alphabet() -> Vec<Kita> {
    vec![
        Kita::Div,
        Kita::Red(1),
        Kita::Red(2),
        Kita::Foc { skip: 0, parts: vec![1, 1] },
        Kita::Foc { skip: 0, parts: vec![1, 1, 1] },
    ]
}

#[derive(Debug, Clone)]
pub struct Planted {
    /// Kitas after the root.
    pub steps: Vec<Kita>,
    /// `len` elements followed by `extra` more from the same rule.
    pub values: Vec<Value>,
    pub len: usize,
}

impl Planted {
    pub fn series(&self) -> Series {
        Series::new(self.values[..self.len].to_vec()).expect("planted series have 3+ elements")
    }

    pub fn full(&self) -> Series {
        Series::new(self.values.clone()).expect("planted series have 3+ elements")
    }
}

/// Leaf of `n` elements: a polynomial of degree at most 2 for differences,
/// a geometric series for ratios.
fn leaf<R: Rng>(rng: &mut R, mode: EdkMode, n: usize) -> Option<Vec<Value>> {
    match mode {
        EdkMode::Differences => {
            let deg = rng.gen_range(0..=2usize).min(n.checked_sub(2)?);
            let coef: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-9..=9)).collect();
            Some(
                (0..n as i64)
                    .map(|x| Value::int(coef.iter().rev().fold(0, |acc, c| acc * x + c)))
                    .collect(),
            )
        }
        EdkMode::Ratios if n >= 3 => {
            let a = *[1i64, 2, 3, -1, 5].choose(rng)?;
            let q = *[2i64, 3, -2].choose(rng)?;
            let mut v = vec![Value::int(a)];
            for _ in 1..n {
                let next = v.last()?.checked_mul(&Value::int(q))?;
                v.push(next);
            }
            Some(v)
        }
        EdkMode::Ratios => None,
    }
}

/// Base values of a table of `mode` and length `n` solved by `steps`.
fn build<R: Rng>(rng: &mut R, steps: &[Kita], mode: EdkMode, n: usize) -> Option<Vec<Value>> {
    let Some((k, rest)) = steps.split_first() else {
        return leaf(rng, mode, n);
    };
    match k {
        Kita::Div if mode == EdkMode::Differences => {
            let v = build(rng, rest, EdkMode::Ratios, n)?;
            (!v.iter().any(Value::is_zero)).then_some(v)
        }
        Kita::Red(r) => {
            let r = *r;
            let mut row = build(rng, rest, EdkMode::Differences, n.checked_sub(r)?)?;
            for _ in 0..r {
                let start = match mode {
                    EdkMode::Differences => Value::int(rng.gen_range(-9..=9)),
                    EdkMode::Ratios => Value::int(*[1i64, 2, -3, 4].choose(rng)?),
                };
                let mut up = vec![start];
                for d in &row {
                    let next = mode.combine(up.last()?, d)?;
                    up.push(next);
                }
                row = up;
            }
            if mode == EdkMode::Ratios && row.iter().any(Value::is_zero) {
                return None;
            }
            Some(row)
        }
        Kita::Foc { skip, parts } => {
            let layout = foc_layout(*skip, parts, n);
            let mut out = vec![Value::zero(); n];
            for positions in layout {
                let child = build(rng, rest, EdkMode::Differences, positions.len())?;
                for (p, v) in positions.into_iter().zip(child) {
                    out[p] = v;
                }
            }
            (mode == EdkMode::Differences || !out.iter().any(Value::is_zero)).then_some(out)
        }
        _ => None,
    }
}

/// Draws a pattern of `depth` kitas from [`alphabet`] and a series of
/// `len + extra` elements that follows it. Retries until the draw is valid
/// and every element fits in 512 bits.
pub fn generate<R: Rng>(rng: &mut R, depth: usize, len: usize, extra: usize) -> Planted {
    let kitas = alphabet();
    loop {
        let steps: Vec<Kita> = (0..depth).map(|_| kitas.choose(rng).unwrap().clone()).collect();
        let Some(values) = build(rng, &steps, EdkMode::Differences, len + extra) else {
            continue;
        };
        // Keep well inside the exact-arithmetic size limit.
        if values.iter().all(|v| v.as_rat().is_some_and(|r| r.bits() <= MAX_BITS)) {
            return Planted { steps, values, len };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::search::{replay, Mode, SearchConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn planted_patterns_replay() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut cfg = SearchConfig::new(Arc::new(Catalog::with(&alphabet())), Mode::S1Z, 3);
        cfg.budget.max_time = None;
        for depth in 1..=3 {
            for _ in 0..50 {
                let p = generate(&mut rng, depth, 24, 0);
                assert!(replay(&p.series(), &p.steps, &cfg).is_some(), "{:?} {:?}", p.steps, p.values);
            }
        }
    }
}
