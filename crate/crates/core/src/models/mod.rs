//! Likelihood families, priors, sufficient statistics and posterior
//! construction.
//!
//! Datasets never exist as vectors here: every supported family reduces a
//! sample to `(n, s)`, and every posterior is built from that pair.

mod functional;
mod grid;
mod posterior;

pub use functional::{evaluate_all, Functional};
pub use grid::{ExpBetaKernel, GridPosterior, GRID_NODES};
pub use posterior::{CdfTable, HpdInterval, Posterior};

use crate::montecarlo::{
    bernoulli_deviate, exponential_deviate, normal_deviate, poisson_deviate, SeededGenerator,
};
use crate::{Error, Result};

/// Sampling model for a scalar parameter θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LikelihoodFamily {
    /// N(θ, σ²) with σ² known.
    NormalKnownVariance { sigma2: f64 },
    /// Poisson with mean θ > 0.
    Poisson,
    /// Bernoulli with success probability θ ∈ (0, 1).
    Bernoulli,
    /// Exponential with density θ e^{−θx}, θ > 0.
    ExponentialRate,
}

impl LikelihoodFamily {
    pub fn normal(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::Domain(format!("sigma2 must be positive, got {sigma2}")));
        }
        Ok(Self::NormalKnownVariance { sigma2 })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::NormalKnownVariance { .. } => "normal",
            Self::Poisson => "poisson",
            Self::Bernoulli => "bernoulli",
            Self::ExponentialRate => "exp",
        }
    }

    pub fn in_domain(&self, theta: f64) -> bool {
        match self {
            Self::NormalKnownVariance { .. } => theta.is_finite(),
            Self::Poisson | Self::ExponentialRate => theta > 0.0 && theta.is_finite(),
            Self::Bernoulli => theta > 0.0 && theta < 1.0,
        }
    }

    pub fn check_theta(&self, theta: f64) -> Result<()> {
        if let Self::NormalKnownVariance { sigma2 } = self {
            if !(*sigma2 > 0.0) || !sigma2.is_finite() {
                return Err(Error::Domain(format!("sigma2 must be positive, got {sigma2}")));
            }
        }
        if self.in_domain(theta) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "theta = {theta} is outside the parameter domain of the {} family",
                self.name()
            )))
        }
    }

    /// Fisher information per observation.
    pub fn fisher_info(&self, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        Ok(self.info_unchecked(theta))
    }

    pub(crate) fn info_unchecked(&self, theta: f64) -> f64 {
        match *self {
            Self::NormalKnownVariance { sigma2 } => 1.0 / sigma2,
            Self::Poisson => 1.0 / theta,
            Self::Bernoulli => 1.0 / (theta * (1.0 - theta)),
            Self::ExponentialRate => 1.0 / (theta * theta),
        }
    }
}

/// Free function form of [`LikelihoodFamily::fisher_info`].
pub fn fisher_info(family: &LikelihoodFamily, theta: f64) -> Result<f64> {
    family.fisher_info(theta)
}

/// Prior on θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prior {
    /// N(μ₀, τ₀²).
    Normal { mu0: f64, tau2: f64 },
    /// G(a, b) with density ∝ θ^{b−1} e^{−aθ}: `a` is the rate and `b` the
    /// shape, so a Poisson sample (n, s) updates it to G(a + n, b + s) with
    /// posterior mean (b + s)/(a + n).
    Gamma { a: f64, b: f64 },
    /// Beta(a, b) on [0, 1]; Beta(1, 1) is the uniform prior.
    Beta { a: f64, b: f64 },
}

impl Prior {
    pub fn uniform() -> Self {
        Self::Beta { a: 1.0, b: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        let good = match *self {
            Self::Normal { mu0, tau2 } => mu0.is_finite() && ok(tau2),
            Self::Gamma { a, b } => ok(a) && ok(b),
            Self::Beta { a, b } => ok(a) && ok(b),
        };
        if good {
            Ok(())
        } else {
            Err(Error::Domain(format!("prior parameters must be positive and finite: {self:?}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Normal { mu0, .. } => mu0,
            Self::Gamma { a, b } => b / a,
            Self::Beta { a, b } => a / (a + b),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Normal { .. } => "normal",
            Self::Gamma { .. } => "gamma",
            Self::Beta { .. } => "beta",
        }
    }
}

/// Sample size and scalar sufficient statistic: the sample mean for the
/// normal family, the sum of observations otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStat {
    pub n: u64,
    pub s: f64,
}

impl SufficientStat {
    pub fn new(family: &LikelihoodFamily, n: u64, s: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("sample size must be positive".into()));
        }
        let integral = s >= 0.0 && s.fract() == 0.0;
        let ok = match family {
            LikelihoodFamily::NormalKnownVariance { .. } => s.is_finite(),
            LikelihoodFamily::Poisson => integral && s.is_finite(),
            LikelihoodFamily::Bernoulli => integral && s <= n as f64,
            LikelihoodFamily::ExponentialRate => s > 0.0 && s.is_finite(),
        };
        if ok {
            Ok(Self { n, s })
        } else {
            Err(Error::Domain(format!(
                "statistic s = {s} is not valid for the {} family with n = {n}",
                family.name()
            )))
        }
    }

    /// Point estimate implied by the data alone.
    pub fn mle(&self, family: &LikelihoodFamily) -> f64 {
        let n = self.n as f64;
        match family {
            LikelihoodFamily::NormalKnownVariance { .. } => self.s,
            LikelihoodFamily::Poisson | LikelihoodFamily::Bernoulli => self.s / n,
            LikelihoodFamily::ExponentialRate => n / self.s,
        }
    }
}

/// Infimum over [lo, hi] of I(θ), or of (θ₁ − θ)² I(θ) when `theta1` is
/// given. Returns `(infimum, argmin)`.
///
/// Uses a 10,001-node grid with both endpoints, then a golden-section
/// refinement of the bracket around the best node.
pub fn inf_weighted_info(
    family: &LikelihoodFamily,
    lo: f64,
    hi: f64,
    theta1: Option<f64>,
) -> Result<(f64, f64)> {
    if !(lo < hi) {
        return Err(Error::Domain(format!("planning range needs lo < hi, got [{lo}, {hi}]")));
    }
    family.check_theta(lo)?;
    family.check_theta(hi)?;
    if let Some(t1) = theta1 {
        if !t1.is_finite() {
            return Err(Error::Domain(format!("theta1 must be finite, got {t1}")));
        }
    }
    let objective = |t: f64| {
        let info = family.info_unchecked(t);
        match theta1 {
            Some(t1) => (t1 - t) * (t1 - t) * info,
            None => info,
        }
    };

    const NODES: usize = 10_001;
    let step = (hi - lo) / (NODES - 1) as f64;
    let node = |i: usize| if i == NODES - 1 { hi } else { lo + step * i as f64 };
    let mut best = (f64::INFINITY, lo, 0usize);
    let mut largest = 0.0_f64;
    for i in 0..NODES {
        let t = node(i);
        let v = objective(t);
        largest = largest.max(v);
        if v < best.0 {
            best = (v, t, i);
        }
    }

    let (mut a, mut b) = (node(best.2.saturating_sub(1)), node((best.2 + 1).min(NODES - 1)));
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d);
        }
    }
    for (v, t) in [(fc, c), (fd, d)] {
        if v < best.0 {
            best = (v, t, best.2);
        }
    }

    let (inf, argmin, _) = best;
    if !inf.is_finite() || inf <= 0.0 || inf <= 1e-12 * largest {
        return Err(Error::Unsatisfiable {
            reason: format!("information functional has (near-)zero infimum {inf:e} on [{lo}, {hi}]"),
            theta: argmin,
        });
    }
    Ok((inf, argmin))
}

/// Draw one replicate's sufficient statistic under θ₀.
pub fn sample_suffstat(
    family: &LikelihoodFamily,
    theta0: f64,
    n: u64,
    rng: &mut SeededGenerator,
) -> Result<SufficientStat> {
    family.check_theta(theta0)?;
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    let s = match *family {
        LikelihoodFamily::NormalKnownVariance { sigma2 } => {
            let sd = sigma2.sqrt();
            let mut sum = 0.0;
            for _ in 0..n {
                sum += theta0 + sd * normal_deviate(rng);
            }
            sum / n as f64
        }
        LikelihoodFamily::Poisson => {
            let mut sum = 0u64;
            for _ in 0..n {
                sum += poisson_deviate(rng, theta0)?;
            }
            sum as f64
        }
        LikelihoodFamily::Bernoulli => {
            let mut sum = 0u64;
            for _ in 0..n {
                sum += bernoulli_deviate(rng, theta0)? as u64;
            }
            sum as f64
        }
        LikelihoodFamily::ExponentialRate => {
            let mut sum = 0.0;
            for _ in 0..n {
                sum += exponential_deviate(rng, theta0)?;
            }
            sum
        }
    };
    Ok(SufficientStat { n, s })
}

/// Configuration error unless `posterior` supports the pair.
pub fn check_pair(family: &LikelihoodFamily, prior: &Prior) -> Result<()> {
    match (family, prior) {
        (LikelihoodFamily::NormalKnownVariance { .. }, Prior::Normal { .. })
        | (LikelihoodFamily::Poisson, Prior::Gamma { .. })
        | (LikelihoodFamily::Bernoulli, Prior::Beta { .. })
        | (LikelihoodFamily::ExponentialRate, Prior::Beta { .. }) => Ok(()),
        (f, p) => Err(Error::Config(format!(
            "unsupported model: {} likelihood with a {} prior",
            f.name(),
            p.name()
        ))),
    }
}

/// Posterior for a supported (family, prior) pair.
///
/// Normal/Normal, Poisson/Gamma and Bernoulli/Beta are conjugate and return
/// closed forms; Exponential/Beta is tabulated on [`GRID_NODES`] uniform
/// nodes over (0, 1].
pub fn posterior(family: &LikelihoodFamily, prior: &Prior, stat: &SufficientStat) -> Result<Posterior> {
    check_pair(family, prior)?;
    prior.validate()?;
    let stat = SufficientStat::new(family, stat.n, stat.s)?;
    let n = stat.n as f64;
    match (*family, *prior) {
        (LikelihoodFamily::NormalKnownVariance { sigma2 }, Prior::Normal { mu0, tau2 }) => {
            family.check_theta(0.0)?;
            let shrink = sigma2 / (n * tau2);
            Ok(Posterior::Normal {
                mean: (stat.s + shrink * mu0) / (1.0 + shrink),
                variance: sigma2 * tau2 / (n * tau2 + sigma2),
            })
        }
        (LikelihoodFamily::Poisson, Prior::Gamma { a, b }) => {
            Ok(Posterior::Gamma { shape: b + stat.s, rate: a + n })
        }
        (LikelihoodFamily::Bernoulli, Prior::Beta { a, b }) => {
            Ok(Posterior::Beta { a: a + stat.s, b: b + n - stat.s })
        }
        (LikelihoodFamily::ExponentialRate, Prior::Beta { a, b }) => {
            let kernel = ExpBetaKernel::new(a, b, GRID_NODES)?;
            Ok(Posterior::Grid(kernel.posterior(stat.n, stat.s)?))
        }
        _ => unreachable!("checked above"),
    }
}
