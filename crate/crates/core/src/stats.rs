//! Streaming moments and seed derivation.

/// Count, mean and central moment sums up to fourth order. Two accumulators
/// merge exactly (up to rounding) into the accumulator of the pooled sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let t1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += t1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += t1;
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        self.mean += delta * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n as f64 - 1.0)).max(0.0)
        }
    }

    /// Population (divide by `n`) central moments of order 2, 3 and 4.
    pub fn central_moments(&self) -> (f64, f64, f64) {
        if self.n == 0 {
            return (0.0, 0.0, 0.0);
        }
        let n = self.n as f64;
        (self.m2 / n, self.m3 / n, self.m4 / n)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    /// Sample skewness `m3 / m2^{3/2}`; zero for a degenerate sample.
    pub fn skewness(&self) -> f64 {
        let (m2, m3, _) = self.central_moments();
        if m2 <= 0.0 {
            0.0
        } else {
            m3 / m2.powf(1.5)
        }
    }

    /// Sample excess kurtosis `m4 / m2² − 3`; zero for a degenerate sample.
    pub fn excess_kurtosis(&self) -> f64 {
        let (m2, _, m4) = self.central_moments();
        if m2 <= 0.0 {
            0.0
        } else {
            m4 / (m2 * m2) - 3.0
        }
    }
}

impl Extend<f64> for Moments {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::new();
        m.extend(iter);
        m
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a list of tags (grid index, `n`, ...) into an
/// independent-looking sub-seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two_pass(xs: &[f64]) -> (f64, f64, f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let c = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / n;
        (mean, c(2), c(3), c(4))
    }

    #[test]
    fn degenerate_samples() {
        let m: Moments = [0.5; 10].into_iter().collect();
        assert_eq!(m.mean(), 0.5);
        assert_eq!(m.variance(), 0.0);
        assert_eq!(m.skewness(), 0.0);
        assert_eq!(m.excess_kurtosis(), 0.0);
        assert_eq!(Moments::new().std_error(), 0.0);
    }

    #[test]
    fn derive_seed_separates_tags() {
        let a = derive_seed(1, &[0]);
        assert_ne!(a, derive_seed(1, &[1]));
        assert_ne!(a, derive_seed(2, &[0]));
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(a, derive_seed(1, &[0]));
    }

    proptest! {
        #[test]
        fn streaming_matches_two_pass(xs in prop::collection::vec(-10.0f64..10.0, 2..200)) {
            let m: Moments = xs.iter().copied().collect();
            let (mean, c2, c3, c4) = two_pass(&xs);
            let (m2, m3, m4) = m.central_moments();
            prop_assert!((m.mean() - mean).abs() < 1e-10);
            prop_assert!((m2 - c2).abs() < 1e-9);
            prop_assert!((m3 - c3).abs() < 1e-7);
            prop_assert!((m4 - c4).abs() < 1e-6);
        }

        #[test]
        fn merge_matches_pooled(
            xs in prop::collection::vec(-5.0f64..5.0, 0..100),
            ys in prop::collection::vec(-5.0f64..5.0, 0..100),
        ) {
            let mut a: Moments = xs.iter().copied().collect();
            let b: Moments = ys.iter().copied().collect();
            a.merge(&b);
            let pooled: Moments = xs.iter().chain(&ys).copied().collect();
            prop_assert_eq!(a.count(), pooled.count());
            if pooled.count() > 0 {
                let (p2, p3, p4) = pooled.central_moments();
                let (a2, a3, a4) = a.central_moments();
                prop_assert!((a.mean() - pooled.mean()).abs() < 1e-10);
                prop_assert!((a2 - p2).abs() < 1e-9);
                prop_assert!((a3 - p3).abs() < 1e-8);
                prop_assert!((a4 - p4).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn merge_is_order_independent_in_value() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 101.0).collect();
        let whole: Moments = xs.iter().copied().collect();
        let mut parts = Moments::new();
        for chunk in xs.chunks(77) {
            parts.merge(&chunk.iter().copied().collect());
        }
        assert_relative_eq!(parts.mean(), whole.mean(), max_relative = 1e-12);
        assert_relative_eq!(parts.variance(), whole.variance(), max_relative = 1e-10);
        assert_relative_eq!(parts.skewness(), whole.skewness(), max_relative = 1e-8);
    }
}
