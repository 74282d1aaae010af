//! The four sample size criteria and the asymptotic expected functionals
//! G* they are solved against.
//!
//! | criterion | G*(n, θ₀)                                   | minimal n                                  |
//! |-----------|---------------------------------------------|--------------------------------------------|
//! | APVC(ε)   | 1 / (n I(θ₀))                               | 1 / (ε inf I)                              |
//! | ACC(l, α) | 2Φ(√(n I(θ₀)) l/2) − 1                      | 4 z²₁₋α/₂ / (l² inf I)                     |
//! | ALC(l, α) | (z₁₋α/₂ − z_α/₂) / √(n I(θ₀))               | (z₁₋α/₂ − z_α/₂)² / (l² inf I)             |
//! | ES(θ₁, α) | 1 − Φ(√(n I(θ₀)/2)(θ₁ − θ₀))                 | 2 z²_α / inf (θ₁ − θ)² I(θ)                |

use crate::models::{inf_weighted_info, Functional, LikelihoodFamily};
use crate::specfun::{norm_cdf, norm_quantile};
use crate::{Error, Result};

/// Relative slack used when deciding whether an integer n meets a bound.
const SLACK: f64 = 1e-9;

/// Planning range A = [lo, hi] over θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
}

impl ParamRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("planning range needs finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionKind {
    /// Expected posterior variance at most `eps`.
    Apvc { eps: f64 },
    /// Expected posterior mass of a length-`len` interval about the
    /// posterior mean at least 1 − α.
    Acc { len: f64, alpha: f64 },
    /// Expected distance between the α/2 and 1 − α/2 posterior quantiles
    /// at most `len`.
    Alc { len: f64, alpha: f64 },
    /// Expected posterior mass above θ₁ at least 1 − α.
    EffectSize { theta1: f64, alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criterion {
    pub kind: CriterionKind,
    pub range: ParamRange,
}

impl Criterion {
    pub fn new(kind: CriterionKind, range: ParamRange) -> Result<Self> {
        let c = Self { kind, range };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        ParamRange::new(self.range.lo, self.range.hi)?;
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{what} must be positive, got {v}")))
            }
        };
        let prob = |a: f64| {
            if a > 0.0 && a < 1.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("alpha must lie in (0, 1), got {a}")))
            }
        };
        match self.kind {
            CriterionKind::Apvc { eps } => positive(eps, "eps"),
            CriterionKind::Acc { len, alpha } | CriterionKind::Alc { len, alpha } => {
                positive(len, "interval length")?;
                prob(alpha)
            }
            CriterionKind::EffectSize { theta1, alpha } => {
                if !theta1.is_finite() {
                    return Err(Error::Domain(format!("theta1 must be finite, got {theta1}")));
                }
                prob(alpha)?;
                // Φ(−x) ≤ 1/2 for every n, so α ≥ 1/2 has no finite inversion
                if alpha >= 0.5 {
                    return Err(Error::Domain(format!("effect size criterion needs alpha < 0.5, got {alpha}")));
                }
                Ok(())
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            CriterionKind::Apvc { .. } => "apvc",
            CriterionKind::Acc { .. } => "acc",
            CriterionKind::Alc { .. } => "alc",
            CriterionKind::EffectSize { .. } => "es",
        }
    }

    /// The posterior functional whose expectation the criterion bounds.
    pub fn functional(&self) -> Functional {
        match self.kind {
            CriterionKind::Apvc { .. } => Functional::Variance,
            CriterionKind::Acc { len, .. } => Functional::CenteredMass { len },
            CriterionKind::Alc { alpha, .. } => Functional::IntervalLength { alpha },
            CriterionKind::EffectSize { theta1, .. } => Functional::ProbAbove { theta1 },
        }
    }

    /// Whether the asymptotic requirement holds at sample size `n` when the
    /// information (or weighted information, for ES) equals `info`.
    pub fn satisfied_at(&self, n: u64, info: f64) -> bool {
        let ni = n as f64 * info;
        match self.kind {
            CriterionKind::Apvc { eps } => 1.0 / ni <= eps * (1.0 + SLACK),
            CriterionKind::Acc { len, alpha } => {
                2.0 * norm_cdf(ni.sqrt() * len / 2.0) - 1.0 >= (1.0 - alpha) * (1.0 - SLACK)
            }
            CriterionKind::Alc { len, alpha } => {
                quantile_spread(alpha) / ni.sqrt() <= len * (1.0 + SLACK)
            }
            CriterionKind::EffectSize { alpha, .. } => norm_cdf(-(ni / 2.0).sqrt()) <= alpha * (1.0 + SLACK),
        }
    }
}

/// Φ⁻¹(1 − α/2) − Φ⁻¹(α/2)
fn quantile_spread(alpha: f64) -> f64 {
    norm_quantile(1.0 - 0.5 * alpha) - norm_quantile(0.5 * alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSizeResult {
    pub n_min: u64,
    pub n_real: f64,
    /// Infimum of the information functional over the planning range.
    pub inf_info: f64,
    /// Where that infimum is attained.
    pub argmin: f64,
}

/// Smallest n meeting the criterion uniformly over its planning range.
pub fn min_sample_size(criterion: &Criterion, family: &LikelihoodFamily) -> Result<SampleSizeResult> {
    criterion.validate()?;
    let theta1 = match criterion.kind {
        CriterionKind::EffectSize { theta1, .. } => Some(theta1),
        _ => None,
    };
    let (inf_info, argmin) = inf_weighted_info(family, criterion.range.lo, criterion.range.hi, theta1)?;
    let n_real = match criterion.kind {
        CriterionKind::Apvc { eps } => 1.0 / (eps * inf_info),
        CriterionKind::Acc { len, alpha } => {
            let z = norm_quantile(1.0 - 0.5 * alpha);
            4.0 * z * z / (len * len * inf_info)
        }
        CriterionKind::Alc { len, alpha } => {
            let spread = quantile_spread(alpha);
            spread * spread / (len * len * inf_info)
        }
        CriterionKind::EffectSize { alpha, .. } => {
            let z = norm_quantile(alpha);
            2.0 * z * z / inf_info
        }
    };
    if !n_real.is_finite() || n_real > 1e15 {
        return Err(Error::Unsatisfiable {
            reason: format!("required sample size {n_real:e} is not attainable"),
            theta: argmin,
        });
    }
    let n_min = ((n_real * (1.0 - SLACK)).ceil() as u64).max(1);
    Ok(SampleSizeResult { n_min, n_real, inf_info, argmin })
}

/// Asymptotic expected functional G*(n, θ₀).
pub fn g_star(functional: &Functional, family: &LikelihoodFamily, theta0: f64, n: u64) -> Result<f64> {
    functional.validate()?;
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    let ni = n as f64 * family.fisher_info(theta0)?;
    Ok(match *functional {
        Functional::Variance => 1.0 / ni,
        Functional::CenteredMass { len } => 2.0 * norm_cdf(ni.sqrt() * len / 2.0) - 1.0,
        Functional::IntervalLength { alpha } => quantile_spread(alpha) / ni.sqrt(),
        Functional::Quantile { alpha } => theta0 + norm_quantile(alpha) / ni.sqrt(),
        Functional::ProbAbove { theta1 } => 1.0 - norm_cdf((ni / 2.0).sqrt() * (theta1 - theta0)),
        Functional::HpdLower { level } => theta0 - norm_quantile(0.5 + 0.5 * level) / ni.sqrt(),
        Functional::HpdUpper { level } => theta0 + norm_quantile(0.5 + 0.5 * level) / ni.sqrt(),
    })
}

/// Asymptotic HPD interval θ₀ ± Φ⁻¹(1 − α/2)/√(n I(θ₀)), centred at θ₀.
pub fn g_star_hpd(family: &LikelihoodFamily, theta0: f64, n: u64, alpha: f64) -> Result<(f64, f64)> {
    let level = 1.0 - alpha;
    Ok((
        g_star(&Functional::HpdLower { level }, family, theta0, n)?,
        g_star(&Functional::HpdUpper { level }, family, theta0, n)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::LikelihoodFamily as F;

    fn range(lo: f64, hi: f64) -> ParamRange {
        ParamRange::new(lo, hi).unwrap()
    }

    #[test]
    fn apvc_normal_example() {
        let c = Criterion::new(CriterionKind::Apvc { eps: 0.002 }, range(0.1, 0.9)).unwrap();
        let r = min_sample_size(&c, &F::normal(0.2).unwrap()).unwrap();
        assert_eq!(r.n_min, 100);
        assert!((r.inf_info - 5.0).abs() < 1e-12);
        // exact normal/normal variance with τ₀² = 0.3 first drops below ε at the same n
        let exact = |n: f64| 0.2 / (n + 0.2 / 0.3);
        assert!(exact(100.0) <= 0.002 && exact(99.0) > 0.002);
    }

    #[test]
    fn acc_normal_example() {
        let c = Criterion::new(CriterionKind::Acc { len: 0.05, alpha: 0.05 }, range(0.1, 0.9)).unwrap();
        let r = min_sample_size(&c, &F::normal(0.2).unwrap()).unwrap();
        assert!((r.n_real - 1229.3).abs() < 0.05);
        assert_eq!(r.n_min, 1230);
    }

    #[test]
    fn effect_size_example() {
        let c = Criterion::new(CriterionKind::EffectSize { theta1: 0.3, alpha: 0.05 }, range(0.4, 0.6)).unwrap();
        let r = min_sample_size(&c, &F::normal(0.2).unwrap()).unwrap();
        assert!((r.n_real - 108.2).abs() < 0.05);
        assert_eq!(r.n_min, 109);
        assert_eq!(r.argmin, 0.4);
    }

    #[test]
    fn bernoulli_acc_example() {
        let c = Criterion::new(CriterionKind::Acc { len: 0.1, alpha: 0.05 }, range(0.4, 0.6)).unwrap();
        assert_eq!(min_sample_size(&c, &F::Bernoulli).unwrap().n_min, 385);
    }

    #[test]
    fn unsatisfiable_effect_size() {
        let c = Criterion::new(CriterionKind::EffectSize { theta1: 0.5, alpha: 0.05 }, range(0.4, 0.6)).unwrap();
        match min_sample_size(&c, &F::normal(0.2).unwrap()) {
            Err(Error::Unsatisfiable { theta, .. }) => assert!((theta - 0.5).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn criterion_validation() {
        let r = range(0.1, 0.9);
        assert!(Criterion::new(CriterionKind::Apvc { eps: 0.0 }, r).is_err());
        assert!(Criterion::new(CriterionKind::Acc { len: 0.1, alpha: 1.0 }, r).is_err());
        assert!(Criterion::new(CriterionKind::EffectSize { theta1: 0.0, alpha: 0.6 }, r).is_err());
        assert!(ParamRange::new(0.5, 0.5).is_err());
    }

    #[test]
    fn g_star_examples() {
        let normal = F::normal(0.2).unwrap();
        assert!((g_star(&Functional::Variance, &normal, 0.5, 100).unwrap() - 0.002).abs() < 1e-15);
        let acc = g_star(&Functional::CenteredMass { len: 0.05 }, &normal, 0.5, 10).unwrap();
        assert!((acc - 0.1403).abs() < 1e-4);
        let q = g_star(&Functional::Quantile { alpha: 0.05 }, &F::normal(2.5).unwrap(), 5.0, 30).unwrap();
        assert!((q - 4.5252).abs() < 1e-4);
        let alc = g_star(&Functional::IntervalLength { alpha: 0.05 }, &F::ExponentialRate, 0.25, 50).unwrap();
        assert!((alc - 0.1386).abs() < 1e-4);
        assert_eq!(g_star(&Functional::ProbAbove { theta1: 0.5 }, &normal, 0.5, 17).unwrap(), 0.5);
        let (lo, hi) = g_star_hpd(&F::ExponentialRate, 0.25, 100, 0.05).unwrap();
        assert!((hi - lo - 0.0980).abs() < 1e-4);
        assert!(g_star(&Functional::Variance, &normal, 0.5, 0).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn family() -> impl Strategy<Value = (LikelihoodFamily, f64, f64)> {
            prop_oneof![
                (0.01f64..10.0, -5.0f64..5.0, 0.1f64..5.0)
                    .prop_map(|(s2, lo, w)| (LikelihoodFamily::normal(s2).unwrap(), lo, lo + w)),
                (0.05f64..5.0, 0.1f64..5.0).prop_map(|(lo, w)| (LikelihoodFamily::Poisson, lo, lo + w)),
                (0.01f64..0.5, 0.01f64..0.49).prop_map(|(lo, w)| (LikelihoodFamily::Bernoulli, lo, lo + w)),
                (0.05f64..3.0, 0.1f64..3.0).prop_map(|(lo, w)| (LikelihoodFamily::ExponentialRate, lo, lo + w)),
            ]
        }

        fn minimal(c: &Criterion, fam: &LikelihoodFamily) -> Result<u64> {
            let r = min_sample_size(c, fam)?;
            assert!(c.satisfied_at(r.n_min, r.inf_info), "{c:?} fails at {}", r.n_min);
            if r.n_min > 1 {
                assert!(!c.satisfied_at(r.n_min - 1, r.inf_info), "{c:?} already holds at {}", r.n_min - 1);
            }
            Ok(r.n_min)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn apvc_minimal_and_monotone((fam, lo, hi) in family(), eps in 1e-5f64..0.5, shrink in 0.1f64..1.0) {
                let range = ParamRange::new(lo, hi).unwrap();
                let a = minimal(&Criterion::new(CriterionKind::Apvc { eps }, range).unwrap(), &fam).unwrap();
                let b = minimal(&Criterion::new(CriterionKind::Apvc { eps: eps * shrink }, range).unwrap(), &fam).unwrap();
                prop_assert!(b >= a);
            }

            #[test]
            fn acc_minimal_and_monotone(
                (fam, lo, hi) in family(), len in 0.005f64..1.0, alpha in 0.001f64..0.5, shrink in 0.1f64..1.0,
            ) {
                let range = ParamRange::new(lo, hi).unwrap();
                let n = |len, alpha| minimal(&Criterion::new(CriterionKind::Acc { len, alpha }, range).unwrap(), &fam).unwrap();
                let base = n(len, alpha);
                prop_assert!(n(len * shrink, alpha) >= base);
                prop_assert!(n(len, alpha * shrink) >= base);
            }

            #[test]
            fn alc_minimal_and_monotone(
                (fam, lo, hi) in family(), len in 0.005f64..1.0, alpha in 0.001f64..0.5, shrink in 0.1f64..1.0,
            ) {
                let range = ParamRange::new(lo, hi).unwrap();
                let n = |len, alpha| minimal(&Criterion::new(CriterionKind::Alc { len, alpha }, range).unwrap(), &fam).unwrap();
                let base = n(len, alpha);
                prop_assert!(n(len * shrink, alpha) >= base);
                prop_assert!(n(len, alpha * shrink) >= base);
            }

            #[test]
            fn effect_size_minimal_and_monotone(
                (fam, lo, hi) in family(), gap in 0.01f64..2.0, alpha in 0.001f64..0.49, shrink in 0.1f64..1.0,
            ) {
                let range = ParamRange::new(lo, hi).unwrap();
                // θ₁ below the range keeps the weighted information positive
                let theta1 = match fam {
                    LikelihoodFamily::NormalKnownVariance { .. } => lo - gap,
                    _ => lo * (1.0 - gap.min(0.99)),
                };
                let n = |alpha| minimal(&Criterion::new(CriterionKind::EffectSize { theta1, alpha }, range).unwrap(), &fam);
                match n(alpha) {
                    Ok(base) => prop_assert!(n(alpha * shrink).unwrap() >= base),
                    Err(Error::Unsatisfiable { .. }) => {}
                    Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
                }
            }

            #[test]
            fn g_star_meets_bound_at_solution((fam, lo, hi) in family(), eps in 1e-4f64..0.1) {
                let range = ParamRange::new(lo, hi).unwrap();
                let c = Criterion::new(CriterionKind::Apvc { eps }, range).unwrap();
                let r = min_sample_size(&c, &fam).unwrap();
                let v = g_star(&Functional::Variance, &fam, r.argmin, r.n_min).unwrap();
                prop_assert!(v <= eps * (1.0 + 1e-9));
            }
        }
    }
}
