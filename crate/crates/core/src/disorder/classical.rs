//! Noisy classical bit queries. Each query is answered incorrectly with a
//! probability `p` drawn from one of four families supported on `[0, 1]`.

use std::f64::consts::SQRT_2;

use rand::Rng;
use statrs::function::erf::{erf, erf_inv};

use crate::disorder::StrengthReport;
use crate::error::{Error, Result};
use crate::numeric::bisect_increasing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassicalKind {
    Uniform,
    HalfGaussian,
    HalfCauchy,
    Discrete,
}

impl ClassicalKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClassicalKind::Uniform => "uniform",
            ClassicalKind::HalfGaussian => "gaussian",
            ClassicalKind::HalfCauchy => "cauchy",
            ClassicalKind::Discrete => "discrete",
        }
    }
}

/// A classical disorder family with its spread parameter `v`.
///
/// For the half-Gaussian and half-Cauchy families `v = 0` is the point mass
/// at zero and `v = ∞` the uniform distribution on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalDisorder {
    pub kind: ClassicalKind,
    pub v: f64,
}

impl ClassicalDisorder {
    pub fn new(kind: ClassicalKind, v: f64) -> Result<Self> {
        let m = ClassicalDisorder { kind, v };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            ClassicalKind::Uniform | ClassicalKind::Discrete => (0.0..=1.0).contains(&self.v),
            ClassicalKind::HalfGaussian | ClassicalKind::HalfCauchy => self.v >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{} spread {} out of range",
                self.kind.name(),
                self.v
            )))
        }
    }

    /// The value of `p` at CDF level `q`.
    pub fn quantile(&self, q: f64) -> f64 {
        let v = self.v;
        match self.kind {
            ClassicalKind::Discrete => v,
            ClassicalKind::Uniform => q * v,
            _ if v == 0.0 => 0.0,
            _ if v.is_infinite() => q,
            ClassicalKind::HalfGaussian => {
                let top = erf(1.0 / (SQRT_2 * v));
                (SQRT_2 * v * erf_inv(q * top)).min(1.0)
            }
            ClassicalKind::HalfCauchy => (v * (q * (1.0 / v).atan()).tan()).min(1.0),
        }
    }
}

pub fn sample_classical<R: Rng + ?Sized>(model: &ClassicalDisorder, rng: &mut R) -> f64 {
    model.quantile(rng.random())
}

/// `∫_0^1 p^j e^{-w p²} dp` by its Taylor series in `w` (even `j`, small `w`).
fn gauss_moment_series(w: f64, j: i32) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..60 {
        sum += term / (2 * k + j + 1) as f64;
        term *= -w / (k + 1) as f64;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn half_gaussian_moments(v: f64) -> (f64, f64) {
    let w = 1.0 / (2.0 * v * v);
    let first = -(-w).exp_m1() / (2.0 * w);
    if w < 1.0 {
        let z0 = gauss_moment_series(w, 0);
        (first / z0, gauss_moment_series(w, 2) / z0)
    } else {
        let norm = (2.0 / (std::f64::consts::PI * v * v)).sqrt() / erf(1.0 / (SQRT_2 * v));
        let m = norm * v * v * -(-w).exp_m1();
        (m, v * v * (1.0 - norm * (-w).exp()))
    }
}

fn half_cauchy_moments(v: f64) -> (f64, f64) {
    let norm = 1.0 / (v * (1.0 / v).atan());
    let m = norm * v * v / 2.0 * (1.0 / (v * v)).ln_1p();
    let u = 1.0 / (v * v);
    let second = if u < 0.1 {
        // v²(1 − v·atan(1/v)) = 1/3 − u/5 + u²/7 − ...
        let mut s = 0.0;
        let mut t = 1.0;
        for k in 0..40 {
            s += t / (2 * k + 3) as f64;
            t *= -u;
        }
        norm * s
    } else {
        norm * v * v * (1.0 - v * (1.0 / v).atan())
    };
    (m, second)
}

/// Mean `m` of `p` and its raw strength `√E[p²]`.
pub fn classical_mean_and_strength(model: &ClassicalDisorder) -> Result<(f64, StrengthReport)> {
    model.validate()?;
    let v = model.v;
    let third = 1.0 / 3.0;
    let (m, second, smax) = match model.kind {
        ClassicalKind::Discrete => (v, v * v, 1.0),
        ClassicalKind::Uniform => (v / 2.0, v * v * third, third.sqrt()),
        _ if v == 0.0 => (0.0, 0.0, third.sqrt()),
        _ if v.is_infinite() => (0.5, third, third.sqrt()),
        ClassicalKind::HalfGaussian => {
            let (m, s) = half_gaussian_moments(v);
            (m, s, third.sqrt())
        }
        ClassicalKind::HalfCauchy => {
            let (m, s) = half_cauchy_moments(v);
            (m, s, third.sqrt())
        }
    };
    Ok((m, StrengthReport::new(second.max(0.0).sqrt(), smax)))
}

/// Finds the spread `v` of `kind` whose scaled strength equals `target`.
pub fn classical_param_for_strength(kind: ClassicalKind, target: f64) -> Result<ClassicalDisorder> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::Unreachable {
            target,
            min: 0.0,
            max: 1.0,
        });
    }
    let v = match kind {
        ClassicalKind::Uniform | ClassicalKind::Discrete => target,
        _ if target == 0.0 => 0.0,
        _ if target == 1.0 => f64::INFINITY,
        _ => {
            let bar = |ln_v: f64| {
                let m = ClassicalDisorder { kind, v: ln_v.exp() };
                classical_mean_and_strength(&m)
                    .map(|(_, r)| r.sigma_bar)
                    .unwrap_or(f64::NAN)
            };
            bisect_increasing(bar, -40.0, 40.0, target).exp()
        }
    };
    let model = ClassicalDisorder { kind, v };
    let got = classical_mean_and_strength(&model)?.1.sigma_bar;
    if (got - target).abs() > 1e-4 {
        return Err(Error::Unreachable {
            target,
            min: got.min(target),
            max: got.max(target),
        });
    }
    Ok(model)
}
