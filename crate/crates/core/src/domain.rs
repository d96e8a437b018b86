use crate::error::{Error, Result};

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl SearchBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "box bounds must have equal nonzero length (got {} and {})",
                lo.len(),
                hi.len()
            )));
        }
        for (j, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::InvalidArgument(format!(
                    "box axis {j} must satisfy lo < hi with finite bounds (got [{l}, {h}])"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// Interval `[a, b]` as a one-dimensional box.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    /// Square `[c_1 - r, c_1 + r] x [c_2 - r, c_2 + r]`.
    pub fn square(center: [f64; 2], half_width: f64) -> Result<Self> {
        Self::new(
            vec![center[0] - half_width, center[1] - half_width],
            vec![center[0] + half_width, center[1] + half_width],
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol)
    }

    /// Splits every axis at its midpoint, giving `2^d` congruent boxes. The
    /// children are ordered with the first axis varying fastest.
    pub fn partition(&self) -> Vec<SearchBox> {
        let d = self.dim();
        let mid = self.center();
        (0..1usize << d)
            .map(|mask| {
                let mut lo = Vec::with_capacity(d);
                let mut hi = Vec::with_capacity(d);
                for j in 0..d {
                    if mask >> j & 1 == 0 {
                        lo.push(self.lo[j]);
                        hi.push(mid[j]);
                    } else {
                        lo.push(mid[j]);
                        hi.push(self.hi[j]);
                    }
                }
                SearchBox { lo, hi }
            })
            .collect()
    }
}
