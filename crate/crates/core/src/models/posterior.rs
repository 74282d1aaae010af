use super::grid::{xlogy, GridPosterior, GRID_NODES};
use crate::quad::adaptive_simpson;
use crate::specfun::{ln_gamma_pos, norm_cdf, norm_quantile};
use crate::{Error, Result};

/// Posterior distribution of θ.
#[derive(Debug, Clone, PartialEq)]
pub enum Posterior {
    Normal { mean: f64, variance: f64 },
    /// Gamma with density ∝ θ^{shape−1} e^{−rate·θ}.
    Gamma { shape: f64, rate: f64 },
    Beta { a: f64, b: f64 },
    Grid(GridPosterior),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpdInterval {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

impl HpdInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

const CDF_PANELS: usize = 256;

/// Cumulative integrals of a closed-form Gamma/Beta density over 256 panels
/// spanning its effective support. Build once and reuse for several CDF or
/// quantile queries on the same posterior.
#[derive(Debug, Clone)]
pub struct CdfTable {
    kind: Posterior,
    lo: f64,
    hi: f64,
    cum: Vec<f64>,
}

impl CdfTable {
    fn new(kind: Posterior) -> Self {
        let (lo, hi) = kind.effective_support(40.0);
        let width = (hi - lo) / CDF_PANELS as f64;
        let mut cum = Vec::with_capacity(CDF_PANELS + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 0..CDF_PANELS {
            let a = lo + width * i as f64;
            let b = if i + 1 == CDF_PANELS { hi } else { a + width };
            acc += adaptive_simpson(&|x| kind.pdf(x), a, b, 1e-14, 40);
            cum.push(acc);
        }
        Self { kind, lo, hi, cum }
    }

    fn width(&self) -> f64 {
        (self.hi - self.lo) / CDF_PANELS as f64
    }

    fn edge(&self, i: usize) -> f64 {
        if i == CDF_PANELS {
            self.hi
        } else {
            self.lo + self.width() * i as f64
        }
    }

    fn total(&self) -> f64 {
        self.cum[CDF_PANELS]
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let i = (((x - self.lo) / self.width()).floor() as usize).min(CDF_PANELS - 1);
        let partial = adaptive_simpson(&|t| self.kind.pdf(t), self.edge(i), x, 1e-14, 40);
        ((self.cum[i] + partial) / self.total()).clamp(0.0, 1.0)
    }

    /// Bisection on the CDF inside the panel holding `alpha`.
    pub fn quantile(&self, alpha: f64) -> f64 {
        let target = alpha * self.total();
        let i = (self.cum.partition_point(|c| *c < target).max(1) - 1).min(CDF_PANELS - 1);
        let (mut a, mut b) = (self.edge(i), self.edge(i + 1));
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let p = self.cdf(m);
            if (p - alpha).abs() <= 1e-12 {
                return m;
            }
            if p < alpha {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

impl Posterior {
    pub fn mean(&self) -> f64 {
        match self {
            Self::Normal { mean, .. } => *mean,
            Self::Gamma { shape, rate } => shape / rate,
            Self::Beta { a, b } => a / (a + b),
            Self::Grid(g) => g.mean(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Normal { variance, .. } => *variance,
            Self::Gamma { shape, rate } => shape / (rate * rate),
            Self::Beta { a, b } => {
                let s = a + b;
                a * b / (s * s * (s + 1.0))
            }
            Self::Grid(g) => g.variance(),
        }
    }

    /// Density of the closed-form Gamma/Beta variants, zero outside support.
    fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Gamma { shape, rate } => {
                if x <= 0.0 {
                    return 0.0;
                }
                (xlogy(shape - 1.0, x) - rate * x + shape * rate.ln() - ln_gamma_pos(shape)).exp()
            }
            Self::Beta { a, b } => {
                if x <= 0.0 || x >= 1.0 {
                    return 0.0;
                }
                let ln_beta = ln_gamma_pos(a) + ln_gamma_pos(b) - ln_gamma_pos(a + b);
                (xlogy(a - 1.0, x) + xlogy(b - 1.0, 1.0 - x) - ln_beta).exp()
            }
            Self::Normal { mean, variance } => {
                let z = (x - mean) / variance.sqrt();
                crate::specfun::std_normal_pdf(z) / variance.sqrt()
            }
            Self::Grid(_) => unreachable!("grid posteriors use their own tables"),
        }
    }

    /// mean ± `width`·sd intersected with the support.
    fn effective_support(&self, width: f64) -> (f64, f64) {
        let m = self.mean();
        let sd = self.variance().sqrt();
        let (lo, hi) = (m - width * sd, m + width * sd);
        match self {
            Self::Gamma { .. } => (lo.max(0.0), hi),
            Self::Beta { .. } => (lo.max(0.0), hi.min(1.0)),
            Self::Grid(g) => g.support(),
            Self::Normal { .. } => (lo, hi),
        }
    }

    /// Panel table for repeated CDF/quantile queries; `None` for the
    /// variants that need no table.
    pub fn cdf_table(&self) -> Option<CdfTable> {
        match self {
            Self::Gamma { .. } | Self::Beta { .. } => Some(CdfTable::new(self.clone())),
            _ => None,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Normal { mean, variance } => norm_cdf((x - mean) / variance.sqrt()),
            Self::Grid(g) => g.cdf(x),
            _ => self.cdf_table().expect("closed form").cdf(x),
        }
    }

    /// α-quantile of the posterior.
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {alpha}")));
        }
        Ok(match self {
            Self::Normal { mean, variance } => mean + variance.sqrt() * norm_quantile(alpha),
            Self::Grid(g) => g.quantile(alpha),
            _ => self.cdf_table().expect("closed form").quantile(alpha),
        })
    }

    /// Posterior probability of [lo, hi].
    pub fn interval_mass(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo <= hi) {
            return Err(Error::Domain(format!("interval needs lo <= hi, got [{lo}, {hi}]")));
        }
        if lo == hi {
            return Ok(0.0);
        }
        let mass = match self {
            Self::Normal { mean, variance } => {
                let sd = variance.sqrt();
                let (zl, zh) = ((lo - mean) / sd, (hi - mean) / sd);
                // subtract in the tail where both terms are small
                if zl > 0.0 {
                    norm_cdf(-zl) - norm_cdf(-zh)
                } else {
                    norm_cdf(zh) - norm_cdf(zl)
                }
            }
            Self::Grid(g) => g.cdf(hi) - g.cdf(lo),
            _ => {
                let table = self.cdf_table().expect("closed form");
                table.cdf(hi) - table.cdf(lo)
            }
        };
        Ok(mass.clamp(0.0, 1.0))
    }

    /// P(θ > θ₁ | data).
    pub fn prob_above(&self, theta1: f64) -> f64 {
        match self {
            Self::Normal { mean, variance } => norm_cdf((mean - theta1) / variance.sqrt()),
            _ => 1.0 - self.cdf(theta1),
        }
    }

    /// Tabulate on `nodes` points over mean ± 12 sd (clipped to support).
    pub fn to_grid(&self, nodes: usize) -> Result<GridPosterior> {
        if let Self::Grid(g) = self {
            return Ok(g.clone());
        }
        let (mut lo, mut hi) = self.effective_support(12.0);
        let nudge = 1e-9 * (hi - lo);
        if matches!(self, Self::Gamma { .. } | Self::Beta { .. }) && lo == 0.0 {
            lo = nudge;
        }
        if matches!(self, Self::Beta { .. }) && hi == 1.0 {
            hi = 1.0 - nudge;
        }
        let h = (hi - lo) / (nodes - 1) as f64;
        let dens: Vec<f64> = (0..nodes).map(|k| self.pdf(lo + h * k as f64)).collect();
        GridPosterior::from_density(lo, hi, dens)
    }

    /// Highest posterior density interval at the given level. Symmetric
    /// normal posteriors use the equal-tailed interval; Gamma/Beta are
    /// tabulated first and share the grid water-filling path.
    pub fn hpd(&self, level: f64) -> Result<HpdInterval> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::Domain(format!("HPD level must lie in (0, 1), got {level}")));
        }
        match self {
            Self::Normal { mean, variance } => {
                let half = variance.sqrt() * norm_quantile(0.5 + 0.5 * level);
                Ok(HpdInterval { lo: mean - half, hi: mean + half, mass: level })
            }
            Self::Grid(g) => g.hpd(level),
            _ => self.to_grid(GRID_NODES)?.hpd(level),
        }
    }
}
