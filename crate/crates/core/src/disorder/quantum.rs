//! Disorder distributions on the Bloch sphere for the noisy Hadamard gates.
//!
//! Every family is defined around the north pole and rotated so that its
//! mean (or mode) sits on `+x`. All families except [`QuantumDisorder::Squeezed`]
//! are rotationally symmetric about that axis.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use crate::disorder::StrengthReport;
use crate::error::{Error, Result};
use crate::geometry::{angles_of_unit, BlochAngles, UnitVector3};
use crate::numeric::{
    bisect_increasing, cap_area_integral, cap_theta2_integral, geometric_breaks, integrate_split,
};

/// Strength of the uniform distribution over the whole sphere, `√((π² − 4)/2)`.
///
/// This is the largest strength reached by the cap, Gaussian and Cauchy
/// families.
pub fn full_sphere_strength() -> f64 {
    ((PI * PI - 4.0) / 2.0).sqrt()
}

const STALL_ATTEMPTS: u64 = 1_000_000;

/// The five families, without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantumKind {
    UniformCap,
    SphericalGaussian,
    SphericalCauchy,
    DiscreteCircular,
    Squeezed,
}

impl QuantumKind {
    pub const ALL: [QuantumKind; 5] = [
        QuantumKind::UniformCap,
        QuantumKind::SphericalGaussian,
        QuantumKind::SphericalCauchy,
        QuantumKind::DiscreteCircular,
        QuantumKind::Squeezed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            QuantumKind::UniformCap => "uniform",
            QuantumKind::SphericalGaussian => "gaussian",
            QuantumKind::SphericalCauchy => "cauchy",
            QuantumKind::DiscreteCircular => "discrete",
            QuantumKind::Squeezed => "squeezed",
        }
    }
}

/// One disorder family together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantumDisorder {
    /// Uniform on the spherical cap of half-angle `cutoff` (radians, `[0, π]`).
    UniformCap { cutoff: f64 },
    /// von Mises-Fisher with concentration `kappa ∈ [0, ∞]`. `κ = 0` is the
    /// uniform sphere and `κ = ∞` the noiseless gate.
    SphericalGaussian { kappa: f64 },
    /// Spherical Cauchy with concentration `rho ∈ [0, 1]`. `ρ = 1` is the
    /// noiseless gate.
    SphericalCauchy { rho: f64 },
    /// Azimuthally uniform on the circle at geodesic distance `angle` from the mean.
    DiscreteCircular { angle: f64 },
    /// Surface-uniform inside the elliptical cylinder of cross-section area
    /// `area` and axis ratio `ratio` (the `y` semi-axis over the `z` semi-axis).
    Squeezed { area: f64, ratio: f64 },
}

impl QuantumDisorder {
    pub fn kind(&self) -> QuantumKind {
        match self {
            QuantumDisorder::UniformCap { .. } => QuantumKind::UniformCap,
            QuantumDisorder::SphericalGaussian { .. } => QuantumKind::SphericalGaussian,
            QuantumDisorder::SphericalCauchy { .. } => QuantumKind::SphericalCauchy,
            QuantumDisorder::DiscreteCircular { .. } => QuantumKind::DiscreteCircular,
            QuantumDisorder::Squeezed { .. } => QuantumKind::Squeezed,
        }
    }

    /// The noiseless member of a rotationally symmetric family.
    pub fn noiseless(kind: QuantumKind) -> Option<Self> {
        match kind {
            QuantumKind::UniformCap => Some(QuantumDisorder::UniformCap { cutoff: 0.0 }),
            QuantumKind::SphericalGaussian => Some(QuantumDisorder::SphericalGaussian {
                kappa: f64::INFINITY,
            }),
            QuantumKind::SphericalCauchy => Some(QuantumDisorder::SphericalCauchy { rho: 1.0 }),
            QuantumKind::DiscreteCircular => {
                Some(QuantumDisorder::DiscreteCircular { angle: 0.0 })
            }
            QuantumKind::Squeezed => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            QuantumDisorder::UniformCap { cutoff: d } | QuantumDisorder::DiscreteCircular { angle: d } => {
                if !(0.0..=PI).contains(&d) {
                    return bad(format!("cap angle {d} not in [0, pi]"));
                }
            }
            QuantumDisorder::SphericalGaussian { kappa } => {
                if kappa.is_nan() || kappa < 0.0 {
                    return bad(format!("kappa {kappa} must be >= 0"));
                }
            }
            QuantumDisorder::SphericalCauchy { rho } => {
                if !(0.0..=1.0).contains(&rho) {
                    return bad(format!("rho {rho} not in [0, 1]"));
                }
            }
            QuantumDisorder::Squeezed { area, ratio } => {
                if !(area > 0.0 && area <= PI) {
                    return bad(format!("squeezed area {area} not in (0, pi]"));
                }
                let (lo, hi) = squeeze_ratio_range(area);
                // allow rounding slack at the ends of the range
                if !(ratio >= lo * (1.0 - 1e-12) && ratio <= hi * (1.0 + 1e-12)) {
                    return bad(format!("squeeze ratio {ratio} not in [{lo}, {hi}]"));
                }
            }
        }
        Ok(())
    }

    /// Semi-axes `(a, b)` of a squeezed ellipse: `a` along world `y`, `b` along world `z`.
    pub fn squeeze_axes(area: f64, ratio: f64) -> (f64, f64) {
        let a = (area * ratio / PI).sqrt().min(1.0);
        let b = (area / (PI * ratio)).sqrt().min(1.0);
        (a, b)
    }

    pub fn sampler(&self) -> Result<QuantumSampler> {
        self.validate()?;
        Ok(QuantumSampler::new(*self))
    }
}

/// Admissible axis ratios `[D/π, π/D]` for cross-section area `D`.
pub fn squeeze_ratio_range(area: f64) -> (f64, f64) {
    (area / PI, PI / area)
}

/// Polar angle of the uniform cap of half-angle `cutoff` at CDF level `u`.
pub fn uniform_cap_inverse_cdf(cutoff: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return cutoff;
    }
    let cos_theta = 1.0 - u * cap_area_integral(cutoff);
    cos_theta.clamp(-1.0, 1.0).acos()
}

/// Polar angle of the von Mises-Fisher distribution at CDF level `u`:
/// `θ = acos[(1/κ) ln(e^κ − 2u sinh κ)]`, rearranged as
/// `cos θ = 1 + ln(1 − u(1 − e^{−2κ}))/κ` so that large `κ` does not overflow.
pub fn gaussian_inverse_cdf(kappa: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return PI;
    }
    if kappa == 0.0 {
        return (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
    }
    if kappa.is_infinite() {
        return 0.0;
    }
    let cos_theta = 1.0 + (-u * -(-2.0 * kappa).exp_m1()).ln_1p() / kappa;
    cos_theta.clamp(-1.0, 1.0).acos()
}

/// Polar angle of the spherical Cauchy distribution at CDF level `u`.
///
/// Uses `cos θ = [1 + ρ² − (1 − ρ²)²/((1 + ρ)² − 4ρu)]/(2ρ)`, which maps
/// `u = 0` to the mode and `u = 1` to the antipode. The form evaluated here,
/// `[(1+ρ)² − 2u(1+ρ²)] / [(1+ρ)² − 4ρu]`, is algebraically identical and
/// stays finite as `ρ → 0`.
pub fn cauchy_inverse_cdf(rho: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return PI;
    }
    let sq = (1.0 + rho) * (1.0 + rho);
    let cos_theta = (sq - 2.0 * u * (1.0 + rho * rho)) / (sq - 4.0 * rho * u);
    cos_theta.clamp(-1.0, 1.0).acos()
}

/// Precomputed sampling state for one [`QuantumDisorder`].
#[derive(Debug, Clone)]
pub struct QuantumSampler {
    model: QuantumDisorder,
    // squeezed: semi-axes and the area factor of the enclosing cap
    axes: (f64, f64),
    cap_area: f64,
}

impl QuantumSampler {
    fn new(model: QuantumDisorder) -> Self {
        let (axes, cap_area) = match model {
            QuantumDisorder::Squeezed { area, ratio } => {
                let (a, b) = QuantumDisorder::squeeze_axes(area, ratio);
                let cap = a.max(b).min(1.0).asin();
                ((a, b), cap_area_integral(cap))
            }
            QuantumDisorder::UniformCap { cutoff } => ((0.0, 0.0), cap_area_integral(cutoff)),
            _ => ((0.0, 0.0), 0.0),
        };
        QuantumSampler {
            model,
            axes,
            cap_area,
        }
    }

    pub fn model(&self) -> &QuantumDisorder {
        &self.model
    }

    /// One draw with the distribution's mean on the north pole.
    pub fn sample_pole_frame<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<UnitVector3> {
        let on_cone = |cos_theta: f64, psi: f64| {
            let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
            let (s, c) = psi.sin_cos();
            UnitVector3::new_unchecked(sin_theta * c, sin_theta * s, cos_theta)
        };
        let v = match self.model {
            QuantumDisorder::UniformCap { .. } => {
                let u: f64 = rng.random();
                on_cone(1.0 - u * self.cap_area, TAU * rng.random::<f64>())
            }
            QuantumDisorder::SphericalGaussian { kappa } => {
                let theta = gaussian_inverse_cdf(kappa, rng.random());
                on_cone(theta.cos(), TAU * rng.random::<f64>())
            }
            QuantumDisorder::SphericalCauchy { rho } => {
                let theta = cauchy_inverse_cdf(rho, rng.random());
                on_cone(theta.cos(), TAU * rng.random::<f64>())
            }
            QuantumDisorder::DiscreteCircular { angle } => {
                on_cone(angle.cos(), TAU * rng.random::<f64>())
            }
            QuantumDisorder::Squeezed { .. } => {
                let (a, b) = self.axes;
                let mut attempts = 0u64;
                loop {
                    let u: f64 = rng.random();
                    let v = on_cone(1.0 - u * self.cap_area, TAU * rng.random::<f64>());
                    // pole x becomes world -z (semi-axis b), pole y stays world y (semi-axis a)
                    let (ey, ez) = (v.y / a, v.x / b);
                    if ey * ey + ez * ez <= 1.0 {
                        break v;
                    }
                    attempts += 1;
                    if attempts >= STALL_ATTEMPTS {
                        return Err(Error::RejectionStall { attempts });
                    }
                }
            }
        };
        Ok(v)
    }

    /// One draw with the distribution's mean on `+x`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BlochAngles> {
        let p = self.sample_pole_frame(rng)?;
        Ok(angles_of_unit(p.z, p.y, -p.x))
    }
}

/// Draws one gate orientation from `model`, mean along `+x`.
pub fn sample_quantum<R: Rng + ?Sized>(model: &QuantumDisorder, rng: &mut R) -> Result<BlochAngles> {
    model.sampler()?.sample(rng)
}

fn gaussian_variance(kappa: f64) -> f64 {
    if kappa == 0.0 {
        return (PI * PI - 4.0) / 2.0;
    }
    if kappa.is_infinite() {
        return 0.0;
    }
    let norm = -(-2.0 * kappa).exp_m1();
    // density of θ: κ e^{κ(cos θ − 1)} sin θ / (1 − e^{−2κ})
    let f = |t: f64| t * t * kappa * (kappa * (t.cos() - 1.0)).exp() * t.sin() / norm;
    let scale = 1.0 / kappa.sqrt();
    let tol = 1e-12 * (2.0 / kappa).min(1.0);
    integrate_split(f, 0.0, PI, &geometric_breaks(scale, PI), tol)
}

fn cauchy_variance(rho: f64) -> f64 {
    if rho >= 1.0 {
        return 0.0;
    }
    let w = 1.0 - rho * rho;
    let f = |t: f64| {
        let q = 1.0 + rho * rho - 2.0 * rho * t.cos();
        t * t * w * w * t.sin() / (2.0 * q * q)
    };
    let scale = (1.0 - rho).max(1e-300);
    let tol = 1e-12 * (1.0 - rho).min(1.0);
    integrate_split(f, 0.0, PI, &geometric_breaks(scale, PI), tol)
}

fn uniform_cap_variance(cutoff: f64) -> f64 {
    if cutoff == 0.0 {
        return 0.0;
    }
    cap_theta2_integral(cutoff) / cap_area_integral(cutoff)
}

/// Mean squared geodesic angle from `+x` of the squeezed distribution,
/// integrated over the azimuth in the pole frame.
fn squeezed_variance(area: f64, ratio: f64) -> f64 {
    let (a, b) = QuantumDisorder::squeeze_axes(area, ratio);
    let edge = |psi: f64| {
        let (s, c) = psi.sin_cos();
        let inv = ((s / a) * (s / a) + (c / b) * (c / b)).sqrt();
        (1.0 / inv).min(1.0).asin()
    };
    // the region is symmetric under ψ → −ψ and ψ → π − ψ
    let num = quadrature::integrate(|p| cap_theta2_integral(edge(p)), 0.0, FRAC_PI_2, 1e-13).integral;
    let den = quadrature::integrate(|p| cap_area_integral(edge(p)), 0.0, FRAC_PI_2, 1e-13).integral;
    num / den
}

fn raw_strength(model: &QuantumDisorder) -> f64 {
    match *model {
        QuantumDisorder::UniformCap { cutoff } => uniform_cap_variance(cutoff).sqrt(),
        QuantumDisorder::SphericalGaussian { kappa } => gaussian_variance(kappa).sqrt(),
        QuantumDisorder::SphericalCauchy { rho } => cauchy_variance(rho).sqrt(),
        QuantumDisorder::DiscreteCircular { angle } => angle,
        QuantumDisorder::Squeezed { area, ratio } => squeezed_variance(area, ratio).sqrt(),
    }
}

/// Largest strength the squeezed family reaches over its admissible ratios at `area`.
pub fn squeezed_max_strength(area: f64) -> f64 {
    let (lo, hi) = squeeze_ratio_range(area);
    let steps = 64;
    (0..=steps)
        .map(|i| {
            let t = i as f64 / steps as f64;
            let r = (lo.ln() + t * (hi.ln() - lo.ln())).exp().clamp(lo, hi);
            squeezed_variance(area, r).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Raw and scaled strength of a quantum disorder.
pub fn quantum_strength(model: &QuantumDisorder) -> Result<StrengthReport> {
    model.validate()?;
    let sigma = raw_strength(model);
    let sigma_max = match *model {
        QuantumDisorder::DiscreteCircular { .. } => PI,
        QuantumDisorder::Squeezed { area, .. } => squeezed_max_strength(area),
        _ => full_sphere_strength(),
    };
    Ok(StrengthReport::new(sigma, sigma_max))
}

/// Which side of `r = 1` to search when calibrating the squeezed family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqueezeBranch {
    /// `r ≥ 1`: ellipse elongated along `y`.
    Wide,
    /// `r ≤ 1`: ellipse elongated along `z`.
    Tall,
}

/// Finds the parameter of `kind` whose scaled strength equals `target`.
///
/// For [`QuantumKind::Squeezed`] pass the cross-section area; the `r ≥ 1`
/// branch is returned (see [`squeezed_param_for_strength`] for the other).
pub fn quantum_param_for_strength(
    kind: QuantumKind,
    target: f64,
    squeeze_area: Option<f64>,
) -> Result<QuantumDisorder> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::Unreachable {
            target,
            min: 0.0,
            max: 1.0,
        });
    }
    let smax = full_sphere_strength();
    let model = match kind {
        QuantumKind::DiscreteCircular => QuantumDisorder::DiscreteCircular { angle: target * PI },
        QuantumKind::UniformCap => {
            let d = match target {
                t if t == 0.0 => 0.0,
                t if t == 1.0 => PI,
                _ => bisect_increasing(|d| uniform_cap_variance(d).sqrt() / smax, 0.0, PI, target),
            };
            QuantumDisorder::UniformCap { cutoff: d }
        }
        QuantumKind::SphericalGaussian => {
            let kappa = match target {
                t if t == 0.0 => f64::INFINITY,
                t if t == 1.0 => 0.0,
                _ => {
                    // σ̄ decreases with κ; search over −ln κ
                    let neg_log = bisect_increasing(
                        |x| gaussian_variance((-x).exp()).sqrt() / smax,
                        -40.0,
                        30.0,
                        target,
                    );
                    (-neg_log).exp()
                }
            };
            QuantumDisorder::SphericalGaussian { kappa }
        }
        QuantumKind::SphericalCauchy => {
            let rho = match target {
                t if t == 0.0 => 1.0,
                t if t == 1.0 => 0.0,
                _ => {
                    let one_minus = bisect_increasing(
                        |x| cauchy_variance(1.0 - x).sqrt() / smax,
                        0.0,
                        1.0,
                        target,
                    );
                    1.0 - one_minus
                }
            };
            QuantumDisorder::SphericalCauchy { rho }
        }
        QuantumKind::Squeezed => {
            let area = squeeze_area.ok_or_else(|| {
                Error::InvalidParameter("squeezed calibration needs an area".into())
            })?;
            return squeezed_param_for_strength(area, target, SqueezeBranch::Wide);
        }
    };
    check_calibration(&model, target)?;
    Ok(model)
}

/// Calibrates the squeezed family on one side of `r = 1`.
pub fn squeezed_param_for_strength(
    area: f64,
    target: f64,
    branch: SqueezeBranch,
) -> Result<QuantumDisorder> {
    let probe = QuantumDisorder::Squeezed { area, ratio: 1.0 };
    probe.validate()?;
    let (lo, hi) = squeeze_ratio_range(area);
    let smax = squeezed_max_strength(area);
    let strength = |ln_r: f64| squeezed_variance(area, ln_r.exp()).sqrt() / smax;
    let min = strength(0.0);
    let max = match branch {
        SqueezeBranch::Wide => strength(hi.ln()),
        SqueezeBranch::Tall => strength(lo.ln()),
    };
    if target < min - 1e-4 || target > max + 1e-4 {
        return Err(Error::Unreachable { target, min, max });
    }
    let ln_r = match branch {
        SqueezeBranch::Wide => bisect_increasing(strength, 0.0, hi.ln(), target),
        SqueezeBranch::Tall => -bisect_increasing(|x| strength(-x), 0.0, -lo.ln(), target),
    };
    let ratio = ln_r.exp().clamp(lo, hi);
    let model = QuantumDisorder::Squeezed { area, ratio };
    check_calibration(&model, target)?;
    Ok(model)
}

fn check_calibration(model: &QuantumDisorder, target: f64) -> Result<()> {
    let got = quantum_strength(model)?.sigma_bar;
    if (got - target).abs() > 1e-4 {
        return Err(Error::Unreachable {
            target,
            min: got.min(target),
            max: got.max(target),
        });
    }
    Ok(())
}
