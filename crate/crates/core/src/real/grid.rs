use super::RealError;
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

const INDEX_SLACK: f64 = 1e-9;

/// Points `k·step` for every integer `k` with `y_min ≤ k·step ≤ y_max`.
///
/// Zero is always the point `k = 0`, so sampled functions can be anchored
/// there exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealGrid {
    y_min: f64,
    y_max: f64,
    step: f64,
}

impl RealGrid {
    pub fn new(y_min: f64, y_max: f64, step: f64) -> Result<Self, RealError> {
        if !(y_min.is_finite() && y_max.is_finite() && step.is_finite()) {
            return Err(RealError::InvalidGrid("non-finite bound".into()));
        }
        if !(y_min < 0.0 && 0.0 < y_max) {
            return Err(RealError::InvalidGrid(format!(
                "need y_min < 0 < y_max, got [{y_min}, {y_max}]"
            )));
        }
        if step <= 0.0 || step > y_max.min(-y_min) {
            return Err(RealError::InvalidGrid(format!("step {step} out of range")));
        }
        Ok(RealGrid { y_min, y_max, step })
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn k_min(&self) -> i64 {
        (self.y_min / self.step - INDEX_SLACK).ceil() as i64
    }

    pub fn k_max(&self) -> i64 {
        (self.y_max / self.step + INDEX_SLACK).floor() as i64
    }

    pub fn len(&self) -> usize {
        (self.k_max() - self.k_min() + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of `k = 0` in [`RealGrid::points`].
    pub fn zero_index(&self) -> usize {
        (-self.k_min()) as usize
    }

    pub fn point(&self, k: i64) -> f64 {
        k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (self.k_min()..=self.k_max())
            .map(|k| self.point(k))
            .collect()
    }

    /// Largest `|y|` on the grid.
    pub fn radius(&self) -> f64 {
        self.point(self.k_max()).max(-self.point(self.k_min()))
    }

    /// `h / step` when `h` is a positive integer multiple of the step.
    pub fn steps_in(&self, h: f64) -> Result<usize, RealError> {
        let ratio = h / self.step;
        let s = ratio.round();
        if s.is_nan() || s < 1.0 || (ratio - s).abs() > 1e-9 * s {
            return Err(RealError::StepMismatch { h, step: self.step });
        }
        Ok(s as usize)
    }
}

impl Default for RealGrid {
    fn default() -> Self {
        RealGrid {
            y_min: -10.0,
            y_max: 10.0,
            step: 0.01,
        }
    }
}

impl fmt::Display for RealGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.y_min, self.y_max, self.step)
    }
}

impl FromStr for RealGrid {
    type Err = RealError;

    /// `min:max:step`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(RealError::InvalidGrid(format!(
                "expected min:max:step, got {s:?}"
            )));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| RealError::InvalidGrid(format!("bad number {t:?}")))
        };
        RealGrid::new(num(lo)?, num(hi)?, num(step)?)
    }
}

/// A one-variable complex function tabulated on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryMarginal {
    grid: RealGrid,
    values: Vec<Complex64>,
}

impl AuxiliaryMarginal {
    pub fn new(grid: RealGrid, values: Vec<Complex64>) -> Result<Self, RealError> {
        if values.len() != grid.len() {
            return Err(RealError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(AuxiliaryMarginal { grid, values })
    }

    pub fn from_fn(grid: RealGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        AuxiliaryMarginal { grid, values }
    }

    pub fn grid(&self) -> &RealGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at_zero(&self) -> Complex64 {
        self.values[self.grid.zero_index()]
    }

    /// Linear interpolation; `None` outside `[y_min, y_max]` of the sampled points.
    pub fn interpolate(&self, y: f64) -> Option<Complex64> {
        let t = y / self.grid.step - self.grid.k_min() as f64;
        if t < -INDEX_SLACK || t > (self.values.len() - 1) as f64 + INDEX_SLACK {
            return None;
        }
        let t = t.clamp(0.0, (self.values.len() - 1) as f64);
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let w = t - i as f64;
        Some(self.values[i] * (1.0 - w) + self.values[i + 1] * w)
    }

    /// `max |value|` over grid points with `|y| ≤ radius`.
    pub fn max_abs_within(&self, radius: f64) -> f64 {
        self.grid
            .points()
            .iter()
            .zip(&self.values)
            .filter(|(y, _)| y.abs() <= radius + INDEX_SLACK * self.grid.step)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }
}
