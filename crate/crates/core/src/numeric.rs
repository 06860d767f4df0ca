//! Small numerical helpers shared by the calibration and strength code.

/// Integrates `f` over `[a, b]`, splitting at `breaks` (which must lie in
/// `(a, b)` and be increasing). Each piece runs double-exponential quadrature
/// with the given absolute error target.
pub(crate) fn integrate_split<F>(f: F, a: f64, b: f64, breaks: &[f64], abs_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut total = 0.0;
    let mut lo = a;
    for &mid in breaks.iter().filter(|&&m| m > a && m < b) {
        if mid > lo {
            total += quadrature::integrate(&f, lo, mid, abs_tol).integral;
            lo = mid;
        }
    }
    total + quadrature::integrate(&f, lo, b, abs_tol).integral
}

/// Geometric break points `scale, 4·scale, 16·scale, ...` below `upper`,
/// used to resolve integrands concentrated within `scale` of zero.
pub(crate) fn geometric_breaks(scale: f64, upper: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut x = scale;
    while x < upper && out.len() < 40 {
        out.push(x);
        x *= 4.0;
    }
    out
}

/// Bisection for an increasing function `f` on `[lo, hi]`: returns `x` with
/// `f(x) ≈ target`. Runs until the bracket stops shrinking or 200 iterations.
pub(crate) fn bisect_increasing<F>(f: F, mut lo: f64, mut hi: f64, target: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `∫_0^t θ² sin θ dθ`, with a series near zero where the closed form cancels.
pub(crate) fn cap_theta2_integral(t: f64) -> f64 {
    if t < 0.05 {
        let t2 = t * t;
        t2 * t2 * (0.25 - t2 / 36.0 + t2 * t2 / 960.0 - t2 * t2 * t2 / 50400.0)
    } else {
        let (s, c) = t.sin_cos();
        -t * t * c + 2.0 * t * s + 2.0 * c - 2.0
    }
}

/// `∫_0^t sin θ dθ = 1 - cos t`, computed without cancellation.
pub(crate) fn cap_area_integral(t: f64) -> f64 {
    let h = (0.5 * t).sin();
    2.0 * h * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_closed_form_meet() {
        for t in [0.049_999, 0.05] {
            let (s, c) = f64::sin_cos(t);
            let closed = -t * t * c + 2.0 * t * s + 2.0 * c - 2.0;
            let rel = (cap_theta2_integral(t) - closed).abs() / closed;
            assert!(rel < 1e-8, "t={t} rel={rel}");
        }
    }

    #[test]
    fn split_integration_matches_plain() {
        let f = |x: f64| x.exp();
        let v = integrate_split(f, 0.0, 1.0, &[0.1, 0.5], 1e-14);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn bisect_finds_root() {
        let x = bisect_increasing(|x| x * x * x, 0.0, 2.0, 2.0);
        assert!((x - 2f64.cbrt()).abs() < 1e-14);
    }
}
