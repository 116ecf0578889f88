//! Series container and the difference/ratio triangle ("edk").

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EdkError {
    #[error("a series needs at least 2 elements, got {0}")]
    TooShort(usize),
    #[error("zero divisor at row {row}, column {col} of a ratio table")]
    ZeroInRatioBase { row: usize, col: usize },
}

/// An immutable series of at least two elements.
#[derive(Clone, Debug, PartialEq)]
pub struct Series(Arc<[Value]>);

impl Series {
    pub fn new(values: Vec<Value>) -> Result<Series, EdkError> {
        if values.len() < 2 {
            return Err(EdkError::TooShort(values.len()));
        }
        Ok(Series(values.into()))
    }

    pub fn from_ints(values: &[i64]) -> Result<Series, EdkError> {
        Series::new(values.iter().map(|&v| Value::int(v)).collect())
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The first `n` elements.
    pub fn prefix(&self, n: usize) -> Result<Series, EdkError> {
        Series::new(self.0[..n.min(self.len())].to_vec())
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(Value::is_exact)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdkMode {
    Differences,
    Ratios,
}

impl EdkMode {
    /// The neutral element a constant row collapses to.
    pub fn target(self) -> Value {
        match self {
            EdkMode::Differences => Value::zero(),
            EdkMode::Ratios => Value::one(),
        }
    }

    /// Next-row cell from two neighbours `left`, `right` of the row below.
    pub fn derive(self, left: &Value, right: &Value) -> Option<Value> {
        match self {
            EdkMode::Differences => right.checked_sub(left),
            EdkMode::Ratios => right.checked_div(left),
        }
    }

    /// Inverse of [`derive`](Self::derive): the right neighbour from the
    /// left neighbour and the cell above.
    pub fn combine(self, left: &Value, above: &Value) -> Option<Value> {
        match self {
            EdkMode::Differences => left.checked_add(above),
            EdkMode::Ratios => left.checked_mul(above),
        }
    }
}

/// Termination criterion: `required_levels` top rows equal to zero
/// (differences) or one (ratios), with tolerance `e^epsilon_exponent`
/// applied to approximate values only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstancyConfig {
    pub epsilon_exponent: f64,
    pub required_levels: usize,
}

impl Default for ConstancyConfig {
    fn default() -> Self {
        ConstancyConfig {
            epsilon_exponent: -18.0,
            required_levels: 1,
        }
    }
}

impl ConstancyConfig {
    pub fn new(epsilon_exponent: f64, required_levels: usize) -> ConstancyConfig {
        assert!(epsilon_exponent < 0.0, "epsilon exponent must be negative");
        assert!(required_levels >= 1, "at least one level is required");
        ConstancyConfig {
            epsilon_exponent,
            required_levels,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon_exponent.exp()
    }
}

const RATIO_BITS: u64 = 256;

/// Triangular table over a base series. Row 0 is the base; row `j + 1`
/// holds pairwise differences (or ratios) of row `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edk {
    mode: EdkMode,
    rows: Vec<Vec<Value>>,
}

impl Edk {
    /// Builds the table over `series`. `max_rows` caps the number of rows
    /// above the base; the hard cap is `n - 1`.
    pub fn build(series: &Series, mode: EdkMode, max_rows: Option<usize>) -> Result<Edk, EdkError> {
        Edk::from_values(series.values().to_vec(), mode, max_rows)
    }

    pub fn from_values(base: Vec<Value>, mode: EdkMode, max_rows: Option<usize>) -> Result<Edk, EdkError> {
        let n = base.len();
        if n < 2 {
            return Err(EdkError::TooShort(n));
        }
        let cap = max_rows.unwrap_or(n - 1).min(n - 1);
        // Ratio rows of unstructured data double in size per row; stop
        // building (the table cannot become constant any more) well before
        // the global exact-size limit.
        let size_cap = match mode {
            EdkMode::Ratios => base.iter().filter_map(|v| v.as_rat().map(|r| r.bits())).max().unwrap_or(0).saturating_mul(4).max(RATIO_BITS),
            EdkMode::Differences => u64::MAX,
        };
        let mut rows = Vec::with_capacity(cap + 1);
        rows.push(base);
        'rows: for j in 0..cap {
            let prev = &rows[j];
            let mut next = Vec::with_capacity(prev.len() - 1);
            for (i, w) in prev.windows(2).enumerate() {
                match mode.derive(&w[0], &w[1]) {
                    Some(v) if v.as_rat().map_or(true, |r| r.bits() <= size_cap) => next.push(v),
                    Some(_) => break 'rows,
                    None if mode == EdkMode::Ratios && w[0].is_zero() => {
                        return Err(EdkError::ZeroInRatioBase { row: j, col: i });
                    }
                    // Oversized or non-finite: the table ends here.
                    None => break 'rows,
                }
            }
            rows.push(next);
        }
        Ok(Edk { mode, rows })
    }

    pub fn mode(&self) -> EdkMode {
        self.mode
    }

    pub fn base(&self) -> &[Value] {
        &self.rows[0]
    }

    pub fn len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All rows including the base.
    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> Option<&[Value]> {
        self.rows.get(j).map(Vec::as_slice)
    }

    /// Number of rows above the base. Less than `len() - 1` when the build
    /// was capped or a ratio table outgrew the size limit.
    pub fn built_rows(&self) -> usize {
        self.rows.len() - 1
    }

    fn row_at_target(&self, j: usize, eps: f64) -> bool {
        let row = &self.rows[j];
        match self.mode {
            EdkMode::Differences => row.iter().all(|v| v.near_zero(eps)),
            EdkMode::Ratios => row.iter().all(|v| v.near_one(eps)),
        }
    }

    /// Smallest row index `k0 >= 1` such that every row from `k0` to the top
    /// is all zeros (ones for ratios) and at least `required_levels` rows
    /// qualify.
    pub fn constancy(&self, cfg: &ConstancyConfig) -> Option<usize> {
        let eps = cfg.epsilon();
        let top = self.rows.len() - 1;
        if top == 0 {
            return None;
        }
        let mut k0 = None;
        for j in (1..=top).rev() {
            if self.row_at_target(j, eps) {
                k0 = Some(j);
            } else {
                break;
            }
        }
        let k0 = k0?;
        (top + 1 - k0 >= cfg.required_levels).then_some(k0)
    }

    pub fn is_solution(&self, cfg: &ConstancyConfig) -> bool {
        self.constancy(cfg).is_some()
    }

    /// Renders the triangle top row first, like a printed difference table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in self.rows.iter().rev() {
            let cells: Vec<String> = row.iter().map(Value::to_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Value> {
        v.iter().map(|&x| Value::int(x)).collect()
    }

    fn edk(v: &[i64], mode: EdkMode) -> Edk {
        Edk::build(&Series::from_ints(v).unwrap(), mode, None).unwrap()
    }

    #[test]
    fn first_rows() {
        let d = edk(&[3, 3, 6, 18, 72], EdkMode::Differences);
        assert_eq!(d.row(1).unwrap(), ints(&[0, 3, 12, 54]).as_slice());
        let r = edk(&[3, 3, 6, 18, 72], EdkMode::Ratios);
        assert_eq!(r.row(1).unwrap(), ints(&[1, 2, 3, 4]).as_slice());
        let m = edk(&[1, 1], EdkMode::Differences);
        assert_eq!(m.row(1).unwrap(), ints(&[0]).as_slice());
    }

    #[test]
    fn ratio_zero_is_reported() {
        let s = Series::from_ints(&[1, 0, 2]).unwrap();
        assert!(matches!(
            Edk::build(&s, EdkMode::Ratios, None),
            Err(EdkError::ZeroInRatioBase { .. })
        ));
    }

    #[test]
    fn short_series_rejected() {
        assert_eq!(Series::from_ints(&[1]), Err(EdkError::TooShort(1)));
    }

    #[test]
    fn constancy_examples() {
        let cfg1 = ConstancyConfig::new(-18.0, 1);
        let cfg2 = ConstancyConfig::new(-18.0, 2);
        assert_eq!(edk(&[1, 3, 5, 7], EdkMode::Differences).constancy(&cfg1), Some(2));
        assert_eq!(edk(&[1, 2, 3, 4], EdkMode::Ratios).constancy(&cfg1), None);
        assert_eq!(edk(&[1, 1, 1, 1, 1], EdkMode::Ratios).constancy(&cfg2), Some(1));
        assert!(edk(&[1, 3, 5, 7], EdkMode::Differences).is_solution(&cfg1));
        assert!(!edk(&[2, 3, 5, 8, 13, 21], EdkMode::Differences).is_solution(&cfg1));
        assert!(!edk(&[3, 3, 6, 18, 72], EdkMode::Ratios).is_solution(&cfg1));
        // One zero row is not two levels.
        assert_eq!(edk(&[1, 3, 5], EdkMode::Differences).constancy(&cfg2), None);
        assert_eq!(edk(&[1, 3, 5, 7], EdkMode::Differences).constancy(&cfg2), Some(2));
    }

    #[test]
    fn approximate_rows_use_epsilon() {
        let base = vec![
            Value::approx(0.5).unwrap(),
            Value::approx(0.5 + 1e-12).unwrap(),
            Value::approx(0.5).unwrap(),
        ];
        let e = Edk::from_values(base, EdkMode::Differences, None).unwrap();
        assert_eq!(e.constancy(&ConstancyConfig::default()), Some(1));
    }
}
