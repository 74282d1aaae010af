use super::posterior::{HpdInterval, Posterior};
use crate::{Error, Result};

/// A real-valued functional F of the posterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// Var(θ | data)
    Variance,
    /// α-quantile of the posterior
    Quantile { alpha: f64 },
    /// W⁻¹(1 − α/2) − W⁻¹(α/2)
    IntervalLength { alpha: f64 },
    /// Lower endpoint of the HPD interval at `level`
    HpdLower { level: f64 },
    /// Upper endpoint of the HPD interval at `level`
    HpdUpper { level: f64 },
    /// Posterior mass of [mean − len/2, mean + len/2]
    CenteredMass { len: f64 },
    /// P(θ > θ₁ | data)
    ProbAbove { theta1: f64 },
}

impl Functional {
    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64, what: &str| {
            if p > 0.0 && p < 1.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{what} must lie in (0, 1), got {p}")))
            }
        };
        match *self {
            Self::Variance => Ok(()),
            Self::Quantile { alpha } | Self::IntervalLength { alpha } => prob(alpha, "alpha"),
            Self::HpdLower { level } | Self::HpdUpper { level } => prob(level, "HPD level"),
            Self::CenteredMass { len } => {
                if len > 0.0 && len.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("interval length must be positive, got {len}")))
                }
            }
            Self::ProbAbove { theta1 } => {
                if theta1.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("theta1 must be finite, got {theta1}")))
                }
            }
        }
    }

    /// Short name used in tables and CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Variance => "apvc",
            Self::Quantile { .. } => "alc-quantile",
            Self::IntervalLength { .. } => "alc",
            Self::HpdLower { .. } => "hpd-lo",
            Self::HpdUpper { .. } => "hpd-hi",
            Self::CenteredMass { .. } => "acc",
            Self::ProbAbove { .. } => "es",
        }
    }

    pub fn evaluate(&self, post: &Posterior) -> Result<f64> {
        Ok(evaluate_all(std::slice::from_ref(self), post)?[0])
    }
}

/// Evaluate several functionals on one posterior, sharing the CDF table and
/// HPD computations between them.
pub fn evaluate_all(functionals: &[Functional], post: &Posterior) -> Result<Vec<f64>> {
    let table = if functionals.iter().any(|f| {
        matches!(
            f,
            Functional::Quantile { .. } | Functional::IntervalLength { .. } | Functional::CenteredMass { .. }
        )
    }) {
        post.cdf_table()
    } else {
        None
    };
    let quantile = |alpha: f64| -> Result<f64> {
        match &table {
            Some(t) => Ok(t.quantile(alpha)),
            None => post.quantile(alpha),
        }
    };
    let mut hpds: Vec<(f64, HpdInterval)> = Vec::new();
    let mut hpd = |level: f64| -> Result<HpdInterval> {
        if let Some((_, h)) = hpds.iter().find(|(l, _)| *l == level) {
            return Ok(*h);
        }
        let h = post.hpd(level)?;
        hpds.push((level, h));
        Ok(h)
    };

    functionals
        .iter()
        .map(|f| {
            f.validate()?;
            Ok(match *f {
                Functional::Variance => post.variance(),
                Functional::Quantile { alpha } => quantile(alpha)?,
                Functional::IntervalLength { alpha } => quantile(1.0 - 0.5 * alpha)? - quantile(0.5 * alpha)?,
                Functional::HpdLower { level } => hpd(level)?.lo,
                Functional::HpdUpper { level } => hpd(level)?.hi,
                Functional::CenteredMass { len } => {
                    let m = post.mean();
                    match &table {
                        Some(t) => t.cdf(m + 0.5 * len) - t.cdf(m - 0.5 * len),
                        None => post.interval_mass(m - 0.5 * len, m + 0.5 * len)?,
                    }
                }
                Functional::ProbAbove { theta1 } => post.prob_above(theta1),
            })
        })
        .collect()
}
