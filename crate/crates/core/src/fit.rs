//! Least-squares fits of `Q(σ̄) = a·exp(−b σ̄²) + c σ̄² + d`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 500;
const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitModel {
    /// `a·exp(−b x²) + d`, with `c` pinned to zero.
    GaussOnly,
    /// `a·exp(−b x²) + c x² + d`.
    GaussQuad,
    /// `a·exp(−b x²)`, with `c` and `d` pinned to zero.
    GaussPure,
}

impl FitModel {
    pub fn name(&self) -> &'static str {
        match self {
            FitModel::GaussOnly => "gauss",
            FitModel::GaussQuad => "gauss-quad",
            FitModel::GaussPure => "gauss-pure",
        }
    }

    /// Which of `(a, b, c, d)` the fit adjusts.
    pub fn free(&self) -> [bool; 4] {
        match self {
            FitModel::GaussOnly => [true, true, false, true],
            FitModel::GaussQuad => [true, true, true, true],
            FitModel::GaussPure => [true, true, false, false],
        }
    }

    pub fn eval(p: &[f64; 4], x: f64) -> f64 {
        let x2 = x * x;
        p[0] * (-p[1] * x2).exp() + p[2] * x2 + p[3]
    }

    /// Partial derivatives of [`FitModel::eval`] with respect to `(a, b, c, d)`.
    pub fn gradient(p: &[f64; 4], x: f64) -> [f64; 4] {
        let x2 = x * x;
        let e = (-p[1] * x2).exp();
        [e, -p[0] * x2 * e, x2, 1.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    /// `(a, b, c, d)`; pinned entries are zero.
    pub params: [f64; 4],
    /// 95% confidence half-widths; zero for pinned entries.
    pub half_widths_95: [f64; 4],
    /// `√(mean squared residual)`.
    pub rms_error: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn validate(data: &[(f64, f64)]) -> Result<()> {
    let mut xs: Vec<f64> = data.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < MIN_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_POINTS,
            got: xs.len(),
        });
    }
    if data.iter().any(|&(x, q)| !(0.0..=1.0).contains(&x) || !q.is_finite()) {
        return Err(Error::InvalidParameter("fit abscissae must lie in [0, 1]".into()));
    }
    Ok(())
}

fn initial_guess(data: &[(f64, f64)], model: FitModel) -> [f64; 4] {
    let lo = data.iter().min_by(|u, v| u.0.total_cmp(&v.0)).unwrap().1;
    let hi = data.iter().max_by(|u, v| u.0.total_cmp(&v.0)).unwrap().1;
    match model {
        FitModel::GaussPure => [lo.max(0.0), 3.0, 0.0, 0.0],
        _ => [(lo - hi).max(0.0), 3.0, 0.0, hi],
    }
}

fn sse(data: &[(f64, f64)], p: &[f64; 4]) -> f64 {
    data.iter()
        .map(|&(x, q)| (q - FitModel::eval(p, x)).powi(2))
        .sum()
}

/// Residuals and the Jacobian restricted to the free parameters.
fn linearise(data: &[(f64, f64)], p: &[f64; 4], idx: &[usize]) -> (DVector<f64>, DMatrix<f64>) {
    let r = DVector::from_iterator(data.len(), data.iter().map(|&(x, q)| q - FitModel::eval(p, x)));
    let j = DMatrix::from_fn(data.len(), idx.len(), |i, k| {
        FitModel::gradient(p, data[i].0)[idx[k]]
    });
    (r, j)
}

/// Damped Gauss-Newton fit with `a, b ≥ 0`.
pub fn fit(data: &[(f64, f64)], model: FitModel, init: Option<[f64; 4]>) -> Result<FitResult> {
    validate(data)?;
    let free = model.free();
    let idx: Vec<usize> = (0..4).filter(|&k| free[k]).collect();
    let mut p = init.unwrap_or_else(|| initial_guess(data, model));
    for k in 0..4 {
        if !free[k] {
            p[k] = 0.0;
        }
    }
    p[0] = p[0].max(0.0);
    p[1] = p[1].max(0.0);

    let mut cost = sse(data, &p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        if cost == 0.0 {
            converged = true;
            break;
        }
        let (r, j) = linearise(data, &p, &idx);
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * &r;
        let mut damped = jtj.clone();
        for k in 0..idx.len() {
            damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
        }
        let step = damped.lu().solve(&jtr).ok_or(Error::SingularJacobian)?;
        let mut trial = p;
        for (k, &i) in idx.iter().enumerate() {
            trial[i] += step[k];
        }
        trial[0] = trial[0].max(0.0);
        trial[1] = trial[1].max(0.0);
        let moved = (0..4).map(|k| (trial[k] - p[k]).powi(2)).sum::<f64>().sqrt();
        let trial_cost = sse(data, &trial);
        if trial_cost <= cost {
            let decrease = (cost - trial_cost) / cost;
            p = trial;
            cost = trial_cost;
            lambda = (lambda / 10.0).max(1e-15);
            if decrease < 1e-10 || moved < 1e-10 {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if moved < 1e-10 || lambda > 1e20 {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::NotConverged(iterations));
    }

    let rms = (cost / data.len() as f64).sqrt();
    let (_, j) = linearise(data, &p, &idx);
    let cov = (j.transpose() * &j)
        .try_inverse()
        .ok_or(Error::SingularJacobian)?;
    let mut half = [0.0; 4];
    for (k, &i) in idx.iter().enumerate() {
        let v = cov[(k, k)];
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::SingularJacobian);
        }
        half[i] = 1.96 * v.sqrt() * rms;
    }
    Ok(FitResult {
        model,
        params: p,
        half_widths_95: half,
        rms_error: rms,
        converged,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(p: [f64; 4], points: usize) -> Vec<(f64, f64)> {
        (0..points)
            .map(|i| {
                let x = i as f64 / (points - 1) as f64;
                (x, FitModel::eval(&p, x))
            })
            .collect()
    }

    #[test]
    fn recovers_exact_quadratic_model() {
        let truth = [0.5, 3.0, -0.2, 0.5];
        let r = fit(&synthetic(truth, 21), FitModel::GaussQuad, None).unwrap();
        for k in 0..4 {
            assert!((r.params[k] - truth[k]).abs() < 1e-6, "{:?}", r.params);
        }
        assert!(r.rms_error < 1e-8);
        assert!(r.converged);
    }

    #[test]
    fn recovers_pinned_forms() {
        let r = fit(&synthetic([0.59, 1.8, 0.0, 0.41], 21), FitModel::GaussOnly, None).unwrap();
        assert!((r.params[1] - 1.8).abs() < 1e-6);
        assert_eq!(r.params[2], 0.0);
        assert_eq!(r.half_widths_95[2], 0.0);
        let r = fit(&synthetic([1.0, 35.4, 0.0, 0.0], 101), FitModel::GaussPure, None).unwrap();
        assert!((r.params[1] - 35.4).abs() < 1e-5, "{:?}", r.params);
        assert_eq!((r.params[2], r.params[3]), (0.0, 0.0));
    }

    #[test]
    fn rejects_bad_data() {
        let few = synthetic([0.5, 3.0, 0.0, 0.5], 7);
        assert!(matches!(
            fit(&few, FitModel::GaussOnly, None),
            Err(Error::InsufficientData { needed: 8, got: 7 })
        ));
        let repeated: Vec<_> = (0..20).map(|i| ((i % 4) as f64 / 4.0, 0.3)).collect();
        assert!(matches!(
            fit(&repeated, FitModel::GaussOnly, None),
            Err(Error::InsufficientData { .. })
        ));
        let mut outside = synthetic([0.5, 3.0, 0.0, 0.5], 10);
        outside[3].0 = 1.5;
        assert!(fit(&outside, FitModel::GaussOnly, None).is_err());
    }

    #[test]
    fn flat_data_is_degenerate() {
        // with a = 0 the b column of the Jacobian vanishes
        let flat: Vec<_> = (0..10).map(|i| (i as f64 / 9.0, 0.25)).collect();
        let r = fit(&flat, FitModel::GaussOnly, Some([0.0, 3.0, 0.0, 0.25]));
        assert!(matches!(r, Err(Error::SingularJacobian)), "{r:?}");
    }

    #[test]
    fn half_widths_scale_with_noise() {
        let truth = [0.6, 2.0, 0.0, 0.4];
        let mut data = synthetic(truth, 21);
        for (i, d) in data.iter_mut().enumerate() {
            d.1 += if i % 2 == 0 { 1e-3 } else { -1e-3 };
        }
        let r = fit(&data, FitModel::GaussOnly, None).unwrap();
        assert!(r.rms_error > 5e-4 && r.rms_error < 1.1e-3);
        assert!(r.half_widths_95.iter().enumerate().all(|(k, &h)| (h > 0.0) == (k != 2)));
        for k in [0, 1, 3] {
            assert!((r.params[k] - truth[k]).abs() < 10.0 * r.half_widths_95[k]);
        }
    }

    proptest! {
        #[test]
        fn gradient_matches_central_differences(
            a in 0.0f64..2.0, b in 0.0f64..40.0, c in -1.0f64..1.0, d in -1.0f64..1.0, x in 0.0f64..1.0,
        ) {
            let p = [a, b, c, d];
            let g = FitModel::gradient(&p, x);
            let h = 1e-6;
            for k in 0..4 {
                let mut up = p;
                let mut down = p;
                up[k] += h;
                down[k] -= h;
                let fd = (FitModel::eval(&up, x) - FitModel::eval(&down, x)) / (2.0 * h);
                prop_assert!((fd - g[k]).abs() <= 1e-5 * g[k].abs().max(1e-3), "k={} fd={} g={}", k, fd, g[k]);
            }
        }

        #[test]
        fn scaling_q_scales_linear_parameters(scale in 0.2f64..3.0) {
            let truth = [0.5, 3.0, -0.2, 0.5];
            let base = fit(&synthetic(truth, 21), FitModel::GaussQuad, None).unwrap();
            let scaled: Vec<_> = synthetic(truth, 21).into_iter().map(|(x, q)| (x, q * scale)).collect();
            let r = fit(&scaled, FitModel::GaussQuad, None).unwrap();
            prop_assert!((r.params[1] - base.params[1]).abs() < 1e-8);
            for k in [0, 2, 3] {
                prop_assert!((r.params[k] - scale * base.params[k]).abs() < 1e-8);
            }
        }
    }
}
