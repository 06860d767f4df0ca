//! Monte Carlo averages over frozen gate noise.
//!
//! Samples are split into fixed-size batches. Batch `i` draws from a ChaCha8
//! stream `i` under the run's seed, batches run in parallel in fixed rounds,
//! and per-batch accumulators are merged in batch order. The result therefore
//! depends on the seed and the batch layout but not on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::disorder::{
    classical_param_for_strength, quantum_param_for_strength, ClassicalKind, QuantumDisorder,
    QuantumKind,
};
use crate::engine::{bit_success, classical_success, success_probability, NoiseRealization, SecretString};
use crate::error::{Error, Result};
use crate::stats::{derive_seed, Moments};

/// Default cap on Monte Carlo samples for one estimate.
pub const DEFAULT_MAX_SAMPLES: u64 = 10_000_000;
/// Smallest sample budget [`quenched_average`] accepts.
pub const MIN_SAMPLES: u64 = 10_000;

/// When to stop sampling, and how samples are grouped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    /// Normal quantile of the confidence interval.
    pub z: f64,
    /// Target half-width of the confidence interval on `Q`.
    pub half_width: f64,
    pub batch_size: u64,
    /// Batches drawn between two checks of the rule.
    pub batches_per_round: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule {
            z: 1.96,
            half_width: 5e-4,
            batch_size: 4096,
            batches_per_round: 8,
        }
    }
}

impl StoppingRule {
    pub fn is_met(&self, m: &Moments) -> bool {
        m.count() >= 2 && self.z * m.std_error() < self.half_width
    }

    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.batches_per_round == 0 || !(self.half_width > 0.0) {
            return Err(Error::InvalidParameter(format!("bad stopping rule {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchEstimate {
    pub q_mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub converged: bool,
    pub seed: u64,
}

trait Accumulator: Default + Send {
    fn merge_from(&mut self, other: &Self);
}

impl Accumulator for Moments {
    fn merge_from(&mut self, other: &Self) {
        self.merge(other);
    }
}

/// Runs batches of `batch(rng, size)` until `stop` holds after a round or
/// `total` samples are used. Returns the merged accumulator.
fn run_batches<A, B, S>(seed: u64, total: u64, rule: &StoppingRule, batch: B, stop: S) -> Result<A>
where
    A: Accumulator,
    B: Fn(&mut ChaCha8Rng, u64) -> Result<A> + Sync,
    S: Fn(&A) -> bool,
{
    rule.validate()?;
    let n_batches = total.div_ceil(rule.batch_size);
    let mut acc = A::default();
    let mut next = 0u64;
    while next < n_batches {
        let end = (next + rule.batches_per_round).min(n_batches);
        let parts = (next..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let size = rule.batch_size.min(total - i * rule.batch_size);
                batch(&mut rng, size)
            })
            .collect::<Result<Vec<A>>>()?;
        for p in &parts {
            acc.merge_from(p);
        }
        next = end;
        if stop(&acc) {
            break;
        }
    }
    Ok(acc)
}

/// Disorder-averaged probability `Q` that one query returns `s`, with all
/// `2n` gates drawn independently from `model`.
pub fn quenched_average(
    model: &QuantumDisorder,
    s: &SecretString,
    seed: u64,
    max_samples: u64,
    rule: &StoppingRule,
) -> Result<QuenchEstimate> {
    if max_samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "max_samples {max_samples} below {MIN_SAMPLES}"
        )));
    }
    let sampler = model.sampler()?;
    let n = s.len();
    let moments: Moments = run_batches(
        seed,
        max_samples,
        rule,
        |rng, size| {
            let mut m = Moments::new();
            let mut r = NoiseRealization::noiseless(n);
            for _ in 0..size {
                r.redraw(&sampler, rng)?;
                m.push(success_probability(s, &r)?);
            }
            Ok(m)
        },
        |m| rule.is_met(m),
    )?;
    Ok(QuenchEstimate {
        q_mean: moments.mean(),
        std_error: moments.std_error(),
        n_samples: moments.count(),
        converged: rule.is_met(&moments),
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniformSpecialCase {
    FullSphere,
    HalfSphere,
}

/// Exact `Q` for the uniform cap at `d = π` and `d = π/2`.
pub fn analytic_uniform_special(case: UniformSpecialCase, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let base = match case {
        UniformSpecialCase::FullSphere => 0.5,
        UniformSpecialCase::HalfSphere => 0.5 + std::f64::consts::PI / 16.0,
    };
    Ok(base.powi(n as i32))
}

/// Moments of `ln P` and the log-normal prediction of `E[P]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnPStats {
    pub mean_lnp: f64,
    pub std_lnp: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// `exp(mean_lnp + std_lnp²/2)`.
    pub predicted_mean_p: f64,
    /// Delta-method standard error of `predicted_mean_p`.
    pub predicted_std_error: f64,
    /// Plain average of `P` over all samples, zeros included.
    pub mc_mean_p: f64,
    pub mc_std_error: f64,
    pub n_samples: u64,
    /// Samples with `P = 0`, left out of the `ln P` moments.
    pub n_discarded: u64,
    /// Set for the Cauchy family, whose heavy tail falls outside the limit theorem.
    pub heavy_tailed: bool,
}

impl LnPStats {
    pub fn discard_fraction(&self) -> f64 {
        self.n_discarded as f64 / self.n_samples as f64
    }

    /// Standard error of `predicted_mean_p − mc_mean_p`, treating the two as independent.
    pub fn combined_std_error(&self) -> f64 {
        self.predicted_std_error.hypot(self.mc_std_error)
    }
}

#[derive(Default)]
struct LnPAccumulator {
    lnp: Moments,
    p: Moments,
    zeros: u64,
}

impl Accumulator for LnPAccumulator {
    fn merge_from(&mut self, other: &Self) {
        self.lnp.merge(&other.lnp);
        self.p.merge(&other.p);
        self.zeros += other.zeros;
    }
}

/// Samples `ln P = Σ_k ln|X_k|²` for the all-zero string of length `n`.
pub fn lnp_statistics(model: &QuantumDisorder, n: usize, samples: u64, seed: u64) -> Result<LnPStats> {
    lnp_statistics_with(model, n, samples, seed, &StoppingRule::default())
}

/// [`lnp_statistics`] with an explicit batch layout; the rule's tolerance is ignored.
pub fn lnp_statistics_with(
    model: &QuantumDisorder,
    n: usize,
    samples: u64,
    seed: u64,
    layout: &StoppingRule,
) -> Result<LnPStats> {
    if n == 0 || samples < 2 {
        return Err(Error::InvalidParameter("need n >= 1 and at least two samples".into()));
    }
    let sampler = model.sampler()?;
    let acc: LnPAccumulator = run_batches(
        seed,
        samples,
        layout,
        |rng, size| {
            let mut acc = LnPAccumulator::default();
            let mut r = NoiseRealization::noiseless(n);
            for _ in 0..size {
                r.redraw(&sampler, rng)?;
                let mut lnp = 0.0;
                let mut p = 1.0;
                for k in 0..n {
                    let f = bit_success(false, &r.pre[k], &r.post[k]);
                    lnp += f.ln();
                    p *= f;
                }
                acc.p.push(p);
                if p > 0.0 && lnp.is_finite() {
                    acc.lnp.push(lnp);
                } else {
                    acc.zeros += 1;
                }
            }
            Ok(acc)
        },
        |_| false,
    )?;
    summarise(&acc, model.kind() == QuantumKind::SphericalCauchy)
}

fn summarise(acc: &LnPAccumulator, heavy_tailed: bool) -> Result<LnPStats> {
    if acc.lnp.count() == 0 {
        return Err(Error::AllZero);
    }
    let mean = acc.lnp.mean();
    let var = acc.lnp.variance();
    let predicted = (mean + var / 2.0).exp();
    let (_, mu3, mu4) = acc.lnp.central_moments();
    let used = acc.lnp.count() as f64;
    let spread = (var + mu3 + (mu4 - var * var) / 4.0).max(0.0);
    Ok(LnPStats {
        mean_lnp: mean,
        std_lnp: var.sqrt(),
        skewness: acc.lnp.skewness(),
        excess_kurtosis: acc.lnp.excess_kurtosis(),
        predicted_mean_p: predicted,
        predicted_std_error: predicted * (spread / used).sqrt(),
        mc_mean_p: acc.p.mean(),
        mc_std_error: acc.p.std_error(),
        n_samples: acc.p.count(),
        n_discarded: acc.zeros,
        heavy_tailed,
    })
}

/// The classical family compared against each quantum family.
pub fn matching_classical(kind: QuantumKind) -> Option<ClassicalKind> {
    match kind {
        QuantumKind::UniformCap => Some(ClassicalKind::Uniform),
        QuantumKind::SphericalGaussian => Some(ClassicalKind::HalfGaussian),
        QuantumKind::SphericalCauchy => Some(ClassicalKind::HalfCauchy),
        QuantumKind::DiscreteCircular => Some(ClassicalKind::Discrete),
        QuantumKind::Squeezed => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvantageRow {
    pub n: usize,
    pub q: QuenchEstimate,
    pub c: f64,
    pub diff: f64,
}

/// `Q − C` over `ns` with both sides calibrated to the same scaled strength.
/// Each `n` uses the sub-seed `derive_seed(seed, [n])` and the string `0ⁿ`.
pub fn advantage_curve(
    quantum: QuantumKind,
    classical: ClassicalKind,
    sigma_bar: f64,
    ns: &[usize],
    seed: u64,
    max_samples: u64,
    rule: &StoppingRule,
) -> Result<Vec<AdvantageRow>> {
    let qm = quantum_param_for_strength(quantum, sigma_bar, None)?;
    let cm = classical_param_for_strength(classical, sigma_bar)?;
    ns.iter()
        .map(|&n| {
            let s = SecretString::zeros(n)?;
            let q = quenched_average(&qm, &s, derive_seed(seed, &[n as u64]), max_samples, rule)?;
            let c = classical_success(&cm, n)?;
            Ok(AdvantageRow {
                n,
                q,
                c,
                diff: q.q_mean - c,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn quick() -> StoppingRule {
        StoppingRule {
            half_width: 2e-3,
            ..StoppingRule::default()
        }
    }

    #[test]
    fn analytic_cases() {
        use UniformSpecialCase::*;
        assert_eq!(analytic_uniform_special(FullSphere, 1).unwrap(), 0.5);
        assert_eq!(analytic_uniform_special(FullSphere, 2).unwrap(), 0.25);
        let h = analytic_uniform_special(HalfSphere, 2).unwrap();
        assert!((h - 0.4849).abs() < 1e-4);
        assert!(analytic_uniform_special(FullSphere, 0).is_err());
    }

    #[test]
    fn noiseless_average_is_exactly_one() {
        let s = SecretString::parse("0110").unwrap();
        for model in [
            QuantumDisorder::UniformCap { cutoff: 0.0 },
            QuantumDisorder::SphericalGaussian { kappa: f64::INFINITY },
            QuantumDisorder::SphericalCauchy { rho: 1.0 },
            QuantumDisorder::DiscreteCircular { angle: 0.0 },
        ] {
            let e = quenched_average(&model, &s, 5, 100_000, &StoppingRule::default()).unwrap();
            assert_eq!(e.q_mean, 1.0);
            assert_eq!(e.std_error, 0.0);
            assert!(e.converged);
        }
    }

    #[test]
    fn full_and_half_sphere_single_qubit() {
        let s = SecretString::parse("0").unwrap();
        let full = quenched_average(&QuantumDisorder::UniformCap { cutoff: PI }, &s, 1, 10_000_000, &quick())
            .unwrap();
        assert!((full.q_mean - 0.5).abs() < 3.0 * full.std_error, "{full:?}");
        let half = quenched_average(
            &QuantumDisorder::UniformCap { cutoff: FRAC_PI_2 },
            &s,
            2,
            10_000_000,
            &quick(),
        )
        .unwrap();
        let expect = 0.5 + PI / 16.0;
        assert!((half.q_mean - expect).abs() < 3.0 * half.std_error, "{half:?}");
    }

    #[test]
    fn sample_budget_respected() {
        let s = SecretString::zeros(2).unwrap();
        let rule = StoppingRule {
            half_width: 1e-9,
            ..StoppingRule::default()
        };
        let e = quenched_average(&QuantumDisorder::UniformCap { cutoff: 1.0 }, &s, 9, 50_000, &rule).unwrap();
        assert_eq!(e.n_samples, 50_000);
        assert!(!e.converged);
        assert!(quenched_average(&QuantumDisorder::UniformCap { cutoff: 1.0 }, &s, 9, 9_999, &rule).is_err());
    }

    #[test]
    fn identical_seeds_identical_estimates() {
        let s = SecretString::parse("101").unwrap();
        let m = QuantumDisorder::SphericalGaussian { kappa: 3.0 };
        let a = quenched_average(&m, &s, 77, 200_000, &quick()).unwrap();
        let b = quenched_average(&m, &s, 77, 200_000, &quick()).unwrap();
        assert_eq!(a, b);
        let c = quenched_average(&m, &s, 78, 200_000, &quick()).unwrap();
        assert_ne!(a.q_mean, c.q_mean);
    }

    #[test]
    fn lnp_noiseless() {
        let st = lnp_statistics(&QuantumDisorder::UniformCap { cutoff: 0.0 }, 5, 10_000, 1).unwrap();
        assert_eq!(st.mean_lnp, 0.0);
        assert_eq!(st.std_lnp, 0.0);
        assert_eq!(st.predicted_mean_p, 1.0);
        assert_eq!(st.n_discarded, 0);
    }

    #[test]
    fn lnp_all_zero() {
        let mut acc = LnPAccumulator::default();
        acc.p.extend([0.0; 5]);
        acc.zeros = 5;
        assert!(matches!(summarise(&acc, false), Err(Error::AllZero)));
        // gates at −x give X = 1/2 − 1/2, zero up to rounding
        let st = lnp_statistics(&QuantumDisorder::DiscreteCircular { angle: PI }, 2, 1_000, 1).unwrap();
        assert!(st.mc_mean_p < 1e-60);
    }

    #[test]
    fn advantage_at_zero_strength() {
        let rows = advantage_curve(
            QuantumKind::UniformCap,
            ClassicalKind::Uniform,
            0.0,
            &[1, 2],
            3,
            100_000,
            &StoppingRule::default(),
        )
        .unwrap();
        assert_eq!(rows[0].diff, 0.0);
        assert_eq!(rows[1].q.q_mean, 1.0);
        assert_eq!(rows[1].c, 0.5);
    }
}
