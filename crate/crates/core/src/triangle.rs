//! Growable difference/ratio triangle.
//!
//! Every new base element adds one anti-diagonal to the triangle. Fixing a
//! single cell of that anti-diagonal (at any row) fixes all the others, so
//! extension is expressed as "the next cell of row `j` is `v`".

use crate::edk::{Edk, EdkMode};
use crate::value::Value;

#[derive(Clone, Debug)]
pub struct Growth {
    mode: EdkMode,
    rows: Vec<Vec<Value>>,
    /// Highest row kept up to date.
    height: usize,
}

impl Growth {
    pub fn from_edk(edk: &Edk) -> Growth {
        Growth::with_height(edk, usize::MAX)
    }

    /// Like [`from_edk`](Self::from_edk), but only rows up to `height` are
    /// kept; pushes above that row are rejected. Cheaper when large values
    /// make the upper rows expensive.
    pub fn with_height(edk: &Edk, height: usize) -> Growth {
        let mut rows: Vec<Vec<Value>> = edk.rows().iter().take(height.saturating_add(1)).cloned().collect();
        // Complete any rows a capped build skipped.
        while rows.len() <= height && rows.last().map_or(false, |r| r.len() > 1) {
            let prev = rows.last().unwrap();
            let next: Option<Vec<Value>> = prev.windows(2).map(|w| edk.mode().derive(&w[0], &w[1])).collect();
            match next {
                Some(n) => rows.push(n),
                None => break,
            }
        }
        Growth {
            mode: edk.mode(),
            rows,
            height,
        }
    }

    /// Triangle over an arbitrary (possibly empty or single-element) base.
    pub fn from_values(mode: EdkMode, base: &[Value]) -> Option<Growth> {
        let mut g = Growth::empty(mode);
        for v in base {
            g.push_at_row(0, v.clone())?;
        }
        Some(g)
    }

    pub fn empty(mode: EdkMode) -> Growth {
        Growth {
            mode,
            rows: Vec::new(),
            height: usize::MAX,
        }
    }

    pub fn mode(&self) -> EdkMode {
        self.mode
    }

    pub fn base(&self) -> &[Value] {
        self.rows.first().map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.base().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, j: usize) -> Option<&[Value]> {
        self.rows.get(j).map(Vec::as_slice)
    }

    /// Appends the next anti-diagonal whose cell in row `j` equals `v`.
    /// Returns the new base element, or `None` if `j` is out of reach or an
    /// arithmetic step is undefined (zero divisor, overflow to infinity).
    pub fn push_at_row(&mut self, j: usize, v: Value) -> Option<Value> {
        let n = self.len();
        if j > n || j > self.height {
            return None;
        }
        let top = n.min(self.height);
        let mut cells: Vec<Option<Value>> = vec![None; top + 1];
        cells[j] = Some(v);
        for r in (0..j).rev() {
            let left = self.rows[r].last()?;
            let above = cells[r + 1].as_ref()?;
            cells[r] = Some(self.mode.combine(left, above)?);
        }
        for r in j + 1..=top {
            let left = self.rows[r - 1].last()?;
            let right = cells[r - 1].as_ref()?;
            cells[r] = Some(self.mode.derive(left, right)?);
        }
        if self.rows.len() < top + 1 {
            self.rows.resize(top + 1, Vec::new());
        }
        for (r, c) in cells.into_iter().enumerate() {
            self.rows[r].push(c?);
        }
        Some(self.rows[0].last().unwrap().clone())
    }
}
