use super::grid::{AuxiliaryMarginal, RealGrid};
use super::model::{eval_cf, CFModel};
use super::RealError;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::{self, Write};

const ANCHOR_TOL: f64 = 1e-12;

/// Samples of `ψ = ln f` on a grid with the continuous branch fixed by `ψ(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRatioTrace {
    grid: RealGrid,
    values: Vec<Complex64>,
}

impl LogRatioTrace {
    /// Takes the logarithm of a sampled nonvanishing function with `f(0) = 1`,
    /// unwrapping the phase outward from the origin.
    ///
    /// Each step's phase increment is compared with the sum of its two
    /// half-step increments; a disagreement means the phase moved by more
    /// than π across the step.
    pub fn from_ratio_fn(grid: RealGrid, f: impl Fn(f64) -> Complex64) -> Result<Self, RealError> {
        let at_zero = f(0.0);
        if (at_zero - 1.0).norm() > ANCHOR_TOL {
            return Err(RealError::NotAnchored(at_zero.to_string()));
        }
        let sample = |y: f64| {
            let z = f(y);
            if z.norm() > 0.0 && z.is_finite() {
                Ok(z)
            } else {
                Err(RealError::VanishingCF(y))
            }
        };
        let zero = grid.zero_index();
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        for dir in [1i64, -1] {
            let mut phase = 0.0;
            let mut prev = Complex64::new(1.0, 0.0);
            let mut k = 0i64;
            loop {
                k += dir;
                if k < grid.k_min() || k > grid.k_max() {
                    break;
                }
                let (y_prev, y) = (grid.point(k - dir), grid.point(k));
                let next = sample(y)?;
                let mid = sample(0.5 * (y_prev + y))?;
                let full = (next / prev).arg();
                let halves = (mid / prev).arg() + (next / mid).arg();
                if (full - halves).abs() > PI {
                    return Err(RealError::UnwrapFailure { y, jump: halves });
                }
                phase += full;
                values[(zero as i64 + k) as usize] = Complex64::new(next.norm().ln(), phase);
                prev = next;
            }
        }
        Ok(LogRatioTrace { grid, values })
    }

    /// Wraps already-unwrapped samples of `ψ`.
    pub fn from_log_values(grid: RealGrid, mut values: Vec<Complex64>) -> Result<Self, RealError> {
        if values.len() != grid.len() {
            return Err(RealError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        let zero = grid.zero_index();
        if values[zero].norm() > ANCHOR_TOL {
            return Err(RealError::NotAnchored(values[zero].to_string()));
        }
        values[zero] = Complex64::new(0.0, 0.0);
        if let Some(i) = (1..values.len()).find(|&i| (values[i].im - values[i - 1].im).abs() >= PI)
        {
            return Err(RealError::UnwrapFailure {
                y: grid.point(grid.k_min() + i as i64),
                jump: values[i].im - values[i - 1].im,
            });
        }
        Ok(LogRatioTrace { grid, values })
    }

    pub fn from_log_fn(grid: RealGrid, psi: impl Fn(f64) -> Complex64) -> Result<Self, RealError> {
        let values = grid.points().into_iter().map(psi).collect();
        LogRatioTrace::from_log_values(grid, values)
    }

    pub fn grid(&self) -> &RealGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `(y, ψ(y))` pairs in grid order.
    pub fn samples(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.grid
            .points()
            .into_iter()
            .zip(self.values.iter().copied())
    }

    /// `exp(ψ)`, i.e. the ratio itself.
    pub fn exp_values(&self) -> Vec<Complex64> {
        self.values.iter().map(|z| z.exp()).collect()
    }

    pub fn to_marginal(&self) -> AuxiliaryMarginal {
        AuxiliaryMarginal::new(self.grid, self.values.clone()).expect("lengths agree")
    }

    /// CSV with header `y,re_psi,im_psi`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "y,re_psi,im_psi")?;
        for (y, z) in self.samples() {
            writeln!(out, "{y:.16e},{:.16e},{:.16e}", z.re, z.im)?;
        }
        Ok(())
    }
}

/// `ln(ν̂/μ̂)` on the grid.
pub fn log_ratio(num: &CFModel, den: &CFModel, grid: RealGrid) -> Result<LogRatioTrace, RealError> {
    LogRatioTrace::from_ratio_fn(grid, |y| eval_cf(num, y) / eval_cf(den, y))
}

/// `max |Δ_h³ ψ(y)|` over grid points whose stencil `y, y+h, y+2h, y+3h` fits.
pub fn third_difference_residual(psi: &LogRatioTrace, h: f64) -> Result<f64, RealError> {
    let s = psi.grid.steps_in(h)?;
    let v = &psi.values;
    if 3 * s >= v.len() {
        return Err(RealError::GridTooNarrow {
            h,
            span: psi.grid.y_max() - psi.grid.y_min(),
        });
    }
    Ok((0..v.len() - 3 * s)
        .map(|i| (v[i + 3 * s] - v[i + 2 * s] * 3.0 + v[i + s] * 3.0 - v[i]).norm())
        .fold(0.0, f64::max))
}

/// Least-squares `ψ(y) ≈ σy² + βy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticFit {
    pub sigma: Complex64,
    pub beta: Complex64,
    /// Max pointwise deviation of the fit from the samples.
    pub residual: f64,
}

impl QuadraticFit {
    pub fn eval(&self, y: f64) -> Complex64 {
        self.sigma * y * y + self.beta * y
    }
}

/// Fit through the origin on the monomials `y` and `y²`.
pub fn fit_quadratic(psi: &LogRatioTrace) -> QuadraticFit {
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    let (mut r1, mut r2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (y, z) in psi.samples() {
        let y2 = y * y;
        s2 += y2;
        s3 += y2 * y;
        s4 += y2 * y2;
        r1 += z * y;
        r2 += z * y2;
    }
    let det = s2 * s4 - s3 * s3;
    let beta = (r1 * s4 - r2 * s3) / det;
    let sigma = (r2 * s2 - r1 * s3) / det;
    let mut fit = QuadraticFit {
        sigma,
        beta,
        residual: 0.0,
    };
    fit.residual = psi
        .samples()
        .map(|(y, z)| (z - fit.eval(y)).norm())
        .fold(0.0, f64::max);
    fit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::build_re1_pair;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn equal_models_give_zero_trace() {
        let m = CFModel::Gaussian {
            beta: 1.0,
            variance: 0.5,
        };
        let t = log_ratio(&m, &m, RealGrid::default()).unwrap();
        assert!(t.values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn shift_factor_trace_is_linear() {
        let den = CFModel::PoissonPhase {
            lambda: 0.7,
            sign: 1,
        };
        let num = den.shifted(1.25);
        let t = log_ratio(&num, &den, RealGrid::default()).unwrap();
        for (y, z) in t.samples() {
            assert!((z - c(0.0, 1.25 * y)).norm() < 1e-10);
        }
        let fit = fit_quadratic(&t);
        assert!(fit.sigma.norm() < 1e-10);
        assert!((fit.beta - c(0.0, 1.25)).norm() < 1e-10);
        assert!(fit.residual <= 1e-10);
        assert!(third_difference_residual(&t, 0.1).unwrap() < 1e-12);
    }

    #[test]
    fn re1_trace_is_minus_two_i_sine() {
        let (mu, nu) = build_re1_pair();
        let t = log_ratio(&nu, &mu, RealGrid::default()).unwrap();
        for (y, z) in t.samples() {
            assert!((z - c(0.0, -2.0 * y.sin())).norm() < 1e-10);
        }
        // |Δ_h³ sin| peaks at 8 sin³(h/2)
        let r = third_difference_residual(&t, 0.1).unwrap();
        let peak = 2.0 * 8.0 * (0.05f64).sin().powi(3);
        assert!(r >= 1e-4 && r <= peak + 1e-12);
        assert!(fit_quadratic(&t).residual > 0.1);
    }

    #[test]
    fn exact_quadratic_is_recovered() {
        let sigma = c(-0.5, 0.25);
        let beta = c(0.0, 2.0);
        let t =
            LogRatioTrace::from_log_fn(RealGrid::default(), |y| sigma * y * y + beta * y).unwrap();
        let fit = fit_quadratic(&t);
        assert!((fit.sigma - sigma).norm() < 1e-10);
        assert!((fit.beta - beta).norm() < 1e-10);
        for h in [0.05, 0.1, 0.2] {
            assert!(third_difference_residual(&t, h).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn fast_phase_is_rejected() {
        let grid = RealGrid::default();
        let err = LogRatioTrace::from_ratio_fn(grid, |y| Complex64::from_polar(1.0, 400.0 * y));
        assert!(matches!(err, Err(RealError::UnwrapFailure { .. })));
        let err = LogRatioTrace::from_log_fn(grid, |y| c(0.0, 400.0 * y));
        assert!(matches!(err, Err(RealError::UnwrapFailure { .. })));
    }

    #[test]
    fn stencil_errors() {
        let grid = RealGrid::new(-0.2, 0.2, 0.1).unwrap();
        let t = LogRatioTrace::from_log_fn(grid, |y| c(y, 0.0)).unwrap();
        assert!(matches!(
            third_difference_residual(&t, 0.2),
            Err(RealError::GridTooNarrow { .. })
        ));
        assert!(matches!(
            third_difference_residual(&t, 0.15),
            Err(RealError::StepMismatch { .. })
        ));
        assert!(third_difference_residual(&t, 0.1).is_ok());
    }

    #[test]
    fn anchoring_is_enforced() {
        let grid = RealGrid::default();
        assert!(matches!(
            LogRatioTrace::from_log_fn(grid, |_| c(1.0, 0.0)),
            Err(RealError::NotAnchored(_))
        ));
        assert!(matches!(
            LogRatioTrace::from_ratio_fn(grid, |_| c(2.0, 0.0)),
            Err(RealError::NotAnchored(_))
        ));
    }

    #[test]
    fn csv_export() {
        let grid = RealGrid::new(-0.1, 0.1, 0.1).unwrap();
        let t = LogRatioTrace::from_log_fn(grid, |y| c(0.0, y)).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "y,re_psi,im_psi");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0.0000000000000000e0,"));
    }
}
