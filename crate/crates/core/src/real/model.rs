use super::RealError;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Closed-form characteristic functions on ℝ.
///
/// Every family has a nonvanishing CF with an explicit continuous logarithm,
/// so evaluation goes through [`CFModel::log_cf`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum CFModel {
    /// Point mass at `alpha`: `e^{iαy}`.
    Degenerate {
        alpha: f64,
    },
    /// `exp(iβy − σ²y²/2)`.
    Gaussian {
        beta: f64,
        variance: f64,
    },
    /// `exp(λ(e^{±iy} − 1))`; a Poisson law on `±ℕ`.
    PoissonPhase {
        lambda: f64,
        sign: i8,
    },
    Product {
        factors: Vec<CFModel>,
    },
}

impl CFModel {
    pub fn degenerate(alpha: f64) -> Result<Self, RealError> {
        if !alpha.is_finite() {
            return Err(RealError::InvalidModel(format!("shift {alpha}")));
        }
        Ok(CFModel::Degenerate { alpha })
    }

    pub fn gaussian(beta: f64, variance: f64) -> Result<Self, RealError> {
        CFModel::Gaussian { beta, variance }.validated()
    }

    pub fn poisson_phase(lambda: f64, sign: i8) -> Result<Self, RealError> {
        CFModel::PoissonPhase { lambda, sign }.validated()
    }

    pub fn product(factors: Vec<CFModel>) -> Result<Self, RealError> {
        CFModel::Product { factors }.validated()
    }

    /// `self` convolved with a point mass at `alpha`.
    pub fn shifted(&self, alpha: f64) -> CFModel {
        let mut factors = match self {
            CFModel::Product { factors } => factors.clone(),
            other => vec![other.clone()],
        };
        factors.push(CFModel::Degenerate { alpha });
        CFModel::Product { factors }
    }

    pub fn validated(self) -> Result<Self, RealError> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), RealError> {
        let bad = |msg: String| Err(RealError::InvalidModel(msg));
        match self {
            CFModel::Degenerate { alpha } if !alpha.is_finite() => bad(format!("shift {alpha}")),
            CFModel::Gaussian { beta, variance }
                if !beta.is_finite() || !variance.is_finite() || *variance < 0.0 =>
            {
                bad(format!("gaussian ({beta}, {variance})"))
            }
            CFModel::PoissonPhase { lambda, sign }
                if !(lambda.is_finite() && *lambda > 0.0) || sign.abs() != 1 =>
            {
                bad(format!("poisson phase ({lambda}, {sign})"))
            }
            CFModel::Product { factors } => factors.iter().try_for_each(CFModel::validate),
            _ => Ok(()),
        }
    }

    /// The continuous logarithm of the CF, vanishing at 0.
    pub fn log_cf(&self, y: f64) -> Complex64 {
        match self {
            CFModel::Degenerate { alpha } => Complex64::new(0.0, alpha * y),
            CFModel::Gaussian { beta, variance } => {
                Complex64::new(-0.5 * variance * y * y, beta * y)
            }
            CFModel::PoissonPhase { lambda, sign } => Complex64::new(
                lambda * (y.cos() - 1.0),
                lambda * f64::from(*sign) * y.sin(),
            ),
            CFModel::Product { factors } => factors.iter().map(|m| m.log_cf(y)).sum(),
        }
    }
}

/// Closed-form value of the CF; `eval_cf(m, 0) == 1` and
/// `eval_cf(m, −y) == conj(eval_cf(m, y))` hold exactly.
pub fn eval_cf(model: &CFModel, y: f64) -> Complex64 {
    let l = model.log_cf(y);
    Complex64::from_polar(l.re.exp(), l.im)
}

/// Two Poisson laws mirrored through the origin, with equal CF moduli.
pub fn build_re1_pair() -> (CFModel, CFModel) {
    (
        CFModel::PoissonPhase {
            lambda: 1.0,
            sign: 1,
        },
        CFModel::PoissonPhase {
            lambda: 1.0,
            sign: -1,
        },
    )
}
