//! Tabulated posteriors on a uniform grid.

use super::posterior::HpdInterval;
use crate::{Error, Result};

/// Node count of the exponential/Beta grid posterior.
pub const GRID_NODES: usize = 4096;

/// Posterior density tabulated on `len()` uniform nodes spanning [lo, hi],
/// normalized by the trapezoid rule. The CDF is the cumulative trapezoid
/// sum, interpolated linearly between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    lo: f64,
    hi: f64,
    density: Vec<f64>,
    cdf: Vec<f64>,
}

impl GridPosterior {
    /// Build from unnormalized log-density values at the nodes. Entries may
    /// be −∞ (zero density) but not +∞ or NaN.
    pub fn from_log_density(lo: f64, hi: f64, log_density: &[f64]) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("grid support needs finite lo < hi, got [{lo}, {hi}]")));
        }
        if log_density.len() < 2 {
            return Err(Error::Domain("grid needs at least two nodes".into()));
        }
        let mut peak = f64::NEG_INFINITY;
        for &l in log_density {
            if l.is_nan() || l == f64::INFINITY {
                return Err(Error::Domain(format!("grid log-density must be < +inf, got {l}")));
            }
            peak = peak.max(l);
        }
        if peak == f64::NEG_INFINITY {
            return Err(Error::Domain("grid log-density is -inf everywhere".into()));
        }
        let density: Vec<f64> = log_density.iter().map(|l| (l - peak).exp()).collect();
        Self::from_density(lo, hi, density)
    }

    /// Build from nonnegative (unnormalized) density values at the nodes.
    pub fn from_density(lo: f64, hi: f64, mut density: Vec<f64>) -> Result<Self> {
        if density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(Error::Domain("grid density values must be finite and nonnegative".into()));
        }
        let h = (hi - lo) / (density.len() - 1) as f64;
        let mut cdf = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in density.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::Domain("grid density integrates to zero".into()));
        }
        for d in &mut density {
            *d /= acc;
        }
        for c in &mut cdf {
            *c /= acc;
        }
        *cdf.last_mut().expect("nonempty") = 1.0;
        Ok(Self { lo, hi, density, cdf })
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.len() - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k + 1 == self.len() {
            self.hi
        } else {
            self.lo + self.step() * k as f64
        }
    }

    /// Normalized density at the nodes.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Trapezoid weights times density; they sum to one.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        let last = self.len() - 1;
        self.density
            .iter()
            .enumerate()
            .map(|(k, d)| if k == 0 || k == last { 0.5 * h * d } else { h * d })
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.weights().iter().enumerate().map(|(k, w)| w * self.node(k)).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.weights()
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let d = self.node(k) - m;
                w * d * d
            })
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let pos = (x - self.lo) / self.step();
        let i = (pos.floor() as usize).min(self.len() - 2);
        let t = pos - i as f64;
        self.cdf[i] + t * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Inverse of the interpolated CDF; `alpha` must lie in (0, 1).
    pub fn quantile(&self, alpha: f64) -> f64 {
        let k = self.cdf.partition_point(|c| *c < alpha).clamp(1, self.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let t = if c1 > c0 { (alpha - c0) / (c1 - c0) } else { 0.0 };
        self.node(k - 1) + t * self.step()
    }

    fn mode_index(&self) -> usize {
        let mut best = 0;
        for (k, d) in self.density.iter().enumerate() {
            if *d > self.density[best] {
                best = k;
            }
        }
        best
    }

    /// Endpoints of the super-level set {f ≥ c} that contains the mode, with
    /// crossings located by linear interpolation of the density.
    fn level_bounds(&self, c: f64, mode: usize) -> (f64, f64) {
        let f = &self.density;
        let h = self.step();
        let mut i = mode;
        while i > 0 && f[i - 1] >= c {
            i -= 1;
        }
        let lo = if i == 0 {
            self.lo
        } else {
            self.node(i - 1) + h * (c - f[i - 1]) / (f[i] - f[i - 1])
        };
        let mut j = mode;
        while j + 1 < f.len() && f[j + 1] >= c {
            j += 1;
        }
        let hi = if j + 1 == f.len() {
            self.hi
        } else {
            self.node(j) + h * (f[j] - c) / (f[j] - f[j + 1])
        };
        (lo, hi)
    }

    /// Highest-density interval by density-threshold water-filling: the
    /// largest cutoff whose super-level set still holds `level` of the mass.
    pub fn hpd(&self, level: f64) -> Result<HpdInterval> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::Domain(format!("HPD level must lie in (0, 1), got {level}")));
        }
        let mode = self.mode_index();
        let peak = self.density[mode];
        let mass_at = |c: f64| {
            let (lo, hi) = self.level_bounds(c, mode);
            (lo, hi, self.cdf(hi) - self.cdf(lo))
        };
        let (mut below, mut above) = (0.0, peak);
        for _ in 0..200 {
            let mid = 0.5 * (below + above);
            if mid <= below || mid >= above {
                break;
            }
            if mass_at(mid).2 >= level {
                below = mid;
            } else {
                above = mid;
            }
        }
        let (lo, hi, mass) = mass_at(below);

        // The search above follows the level set through the mode. Check with
        // the discrete global level set that no other region competes.
        let weights = self.weights();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&i, &j| self.density[j].total_cmp(&self.density[i]));
        let mut acc = 0.0;
        let mut cut = 0.0;
        for &k in &order {
            acc += weights[k];
            cut = self.density[k];
            if acc >= level {
                break;
            }
        }
        let mut runs = 0;
        let mut inside = false;
        for d in &self.density {
            let now = *d >= cut && *d > 0.0;
            if now && !inside {
                runs += 1;
            }
            inside = now;
        }
        if runs > 1 {
            return Err(Error::UnsupportedShape(format!(
                "super-level set at HPD cutoff has {runs} disjoint pieces"
            )));
        }
        Ok(HpdInterval { lo, hi, mass })
    }
}

/// Precomputed pieces of the exponential-likelihood/Beta-prior grid
/// posterior, log w(θ) + n log θ − θ s on nodes θ_k = k/K, k = 1..K.
#[derive(Debug, Clone)]
pub struct ExpBetaKernel {
    log_prior: Vec<f64>,
    log_theta: Vec<f64>,
    theta: Vec<f64>,
}

impl ExpBetaKernel {
    pub fn new(a: f64, b: f64, nodes: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("Beta prior needs a, b > 0, got ({a}, {b})")));
        }
        if nodes < 2 {
            return Err(Error::Domain("grid needs at least two nodes".into()));
        }
        let h = 1.0 / nodes as f64;
        let theta: Vec<f64> = (1..=nodes).map(|k| if k == nodes { 1.0 } else { k as f64 * h }).collect();
        let log_prior = theta
            .iter()
            .map(|&t| {
                // b < 1 puts an integrable pole at θ = 1; sample it half a step in
                let t = if b < 1.0 && t == 1.0 { 1.0 - 0.5 * h } else { t };
                xlogy(a - 1.0, t) + xlogy(b - 1.0, 1.0 - t)
            })
            .collect();
        let log_theta = theta.iter().map(|t| t.ln()).collect();
        Ok(Self { log_prior, log_theta, theta })
    }

    pub fn posterior(&self, n: u64, s: f64) -> Result<GridPosterior> {
        let n = n as f64;
        let log_density: Vec<f64> = self
            .log_prior
            .iter()
            .zip(&self.log_theta)
            .zip(&self.theta)
            .map(|((lp, lt), t)| lp + n * lt - t * s)
            .collect();
        GridPosterior::from_log_density(self.theta[0], 1.0, &log_density)
    }
}

/// c·ln(y) with the convention 0·ln(0) = 0.
pub(crate) fn xlogy(c: f64, y: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * y.ln()
    }
}
