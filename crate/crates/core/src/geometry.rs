//! Pure qubit states as points on the Bloch sphere.
//!
//! Disorder distributions are sampled around the north pole and then moved
//! onto the noiseless Hadamard image, the `+x` axis, by [`rotate_pole_to_x`].

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Zenith/azimuth angles of a point on the Bloch sphere.
///
/// `theta` lies in `[0, π]` and `phi` in `[0, 2π)`. At the poles `phi` is
/// canonicalized to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    theta: f64,
    phi: f64,
}

impl BlochAngles {
    /// The `+x` axis, image of `|0>` under a perfect Hadamard gate.
    pub const PLUS_X: BlochAngles = BlochAngles {
        theta: std::f64::consts::FRAC_PI_2,
        phi: 0.0,
    };

    pub const NORTH: BlochAngles = BlochAngles {
        theta: 0.0,
        phi: 0.0,
    };

    /// Builds a point, wrapping `phi` into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} not in [0, pi]"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!("phi = {phi} not finite")));
        }
        Ok(Self::from_raw(theta, phi))
    }

    /// Caller guarantees `theta ∈ [0, π]`.
    pub(crate) fn from_raw(theta: f64, phi: f64) -> Self {
        let phi = if theta == 0.0 || theta == PI {
            0.0
        } else {
            wrap_angle(phi)
        };
        BlochAngles { theta, phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn to_cartesian(&self) -> UnitVector3 {
        to_cartesian(*self)
    }
}

fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// A point on the unit sphere in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVector3 {
    /// Normalizes `(x, y, z)`. Fails with [`Error::ZeroVector`] when the norm is below `1e-6`.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm >= 1e-6) {
            return Err(Error::ZeroVector(norm));
        }
        Ok(UnitVector3 {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// No normalization; the caller guarantees unit length.
    pub(crate) fn new_unchecked(x: f64, y: f64, z: f64) -> Self {
        UnitVector3 { x, y, z }
    }

    pub fn dot(&self, other: &UnitVector3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Geodesic (great-circle) angle between two points.
    pub fn angle_to(&self, other: &UnitVector3) -> f64 {
        // atan2 of |a x b| and a.b stays accurate near 0 and π, unlike acos
        let cx = self.y * other.z - self.z * other.y;
        let cy = self.z * other.x - self.x * other.z;
        let cz = self.x * other.y - self.y * other.x;
        (cx * cx + cy * cy + cz * cz).sqrt().atan2(self.dot(other))
    }
}

pub fn to_cartesian(a: BlochAngles) -> UnitVector3 {
    let (st, ct) = a.theta.sin_cos();
    let (sp, cp) = a.phi.sin_cos();
    UnitVector3::new_unchecked(st * cp, st * sp, ct)
}

pub fn from_cartesian(v: UnitVector3) -> Result<BlochAngles> {
    let v = UnitVector3::new(v.x, v.y, v.z)?;
    Ok(angles_of_unit(v.x, v.y, v.z))
}

/// Inverse spherical map for a vector already known to be of unit length.
pub(crate) fn angles_of_unit(x: f64, y: f64, z: f64) -> BlochAngles {
    let rho = x.hypot(y);
    let theta = rho.atan2(z);
    let phi = if rho == 0.0 { 0.0 } else { y.atan2(x) };
    BlochAngles::from_raw(theta, phi)
}

/// Rotation about `y` by `+π/2`: pole `(0,0,1)` goes to `+x`, `+x` to `-z`,
/// and `y` is fixed.
pub fn rotate_vector_pole_to_x(v: UnitVector3) -> UnitVector3 {
    UnitVector3::new_unchecked(v.z, v.y, -v.x)
}

pub fn rotate_pole_to_x(a: BlochAngles) -> BlochAngles {
    let v = rotate_vector_pole_to_x(a.to_cartesian());
    angles_of_unit(v.x, v.y, v.z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn assert_vec(v: UnitVector3, x: f64, y: f64, z: f64) {
        assert_abs_diff_eq!(v.x, x, epsilon = 1e-15);
        assert_abs_diff_eq!(v.y, y, epsilon = 1e-15);
        assert_abs_diff_eq!(v.z, z, epsilon = 1e-15);
    }

    #[test]
    fn cartesian_of_axes() {
        assert_vec(to_cartesian(BlochAngles::NORTH), 0.0, 0.0, 1.0);
        assert_vec(to_cartesian(BlochAngles::PLUS_X), 1.0, 0.0, 0.0);
        let y = BlochAngles::new(FRAC_PI_2, FRAC_PI_2).unwrap();
        assert_vec(to_cartesian(y), 0.0, 1.0, 0.0);
    }

    #[test]
    fn angles_of_points() {
        let south = from_cartesian(UnitVector3 { x: 0.0, y: 0.0, z: -1.0 }).unwrap();
        assert_eq!((south.theta(), south.phi()), (PI, 0.0));

        let px = from_cartesian(UnitVector3 { x: 1.0, y: 0.0, z: 0.0 }).unwrap();
        assert_abs_diff_eq!(px.theta(), FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(px.phi(), 0.0);

        let a = from_cartesian(UnitVector3 { x: 0.6, y: 0.0, z: 0.8 }).unwrap();
        assert_abs_diff_eq!(a.theta(), 0.8f64.acos(), epsilon = 1e-15);
        assert_eq!(a.phi(), 0.0);
    }

    #[test]
    fn zero_vector_rejected() {
        let err = UnitVector3::new(1e-7, 0.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::ZeroVector(_)));
        let v = UnitVector3 { x: 0.0, y: 1e-8, z: 0.0 };
        assert!(from_cartesian(v).is_err());
    }

    #[test]
    fn from_cartesian_renormalizes() {
        let a = from_cartesian(UnitVector3 { x: 2.0, y: 0.0, z: 0.0 }).unwrap();
        assert_abs_diff_eq!(a.theta(), FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn phi_is_half_open() {
        let a = BlochAngles::new(1.0, TAU).unwrap();
        assert_eq!(a.phi(), 0.0);
        let b = BlochAngles::new(1.0, -0.5).unwrap();
        assert_abs_diff_eq!(b.phi(), TAU - 0.5, epsilon = 1e-15);
        let pole = BlochAngles::new(PI, 2.0).unwrap();
        assert_eq!(pole.phi(), 0.0);
        assert!(BlochAngles::new(3.5, 0.0).is_err());
        assert!(BlochAngles::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn rotation_examples() {
        let r = rotate_pole_to_x(BlochAngles::NORTH);
        assert_abs_diff_eq!(r.theta(), FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(r.phi(), 0.0);

        // R_y(π/2) applied to (1,0,0) by explicit matrix product
        let m = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]];
        let v = [1.0, 0.0, 0.0];
        let w: Vec<f64> = m
            .iter()
            .map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
            .collect();
        assert_eq!(w, vec![0.0, 0.0, -1.0]);
        let r = rotate_pole_to_x(BlochAngles::PLUS_X);
        assert_abs_diff_eq!(r.theta(), PI, epsilon = 1e-15);
        assert_eq!(r.phi(), 0.0);

        let y = BlochAngles::new(FRAC_PI_2, FRAC_PI_2).unwrap();
        let r = rotate_pole_to_x(y);
        assert_abs_diff_eq!(r.theta(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(r.phi(), FRAC_PI_2, epsilon = 1e-15);
    }

    fn angles() -> impl Strategy<Value = BlochAngles> {
        (0.0..=PI, 0.0..TAU).prop_map(|(t, p)| BlochAngles::new(t, p).unwrap())
    }

    proptest! {
        #[test]
        fn roundtrip_away_from_poles(theta in 1e-6..(PI - 1e-6), phi in 0.0..TAU) {
            let a = BlochAngles::new(theta, phi).unwrap();
            let b = from_cartesian(to_cartesian(a)).unwrap();
            prop_assert!((a.theta() - b.theta()).abs() < 1e-12);
            let dphi = (a.phi() - b.phi()).abs();
            prop_assert!(dphi.min(TAU - dphi) < 1e-12 * (1.0 / theta.sin()).max(1.0));
        }

        #[test]
        fn rotation_preserves_pairwise_angles(p in angles(), q in angles()) {
            let before = p.to_cartesian().angle_to(&q.to_cartesian());
            let after = rotate_pole_to_x(p).to_cartesian().angle_to(&rotate_pole_to_x(q).to_cartesian());
            prop_assert!((before - after).abs() < 1e-10);
        }

        #[test]
        fn angle_from_mean_is_invariant(p in angles()) {
            let pole = BlochAngles::NORTH.to_cartesian();
            let x = BlochAngles::PLUS_X.to_cartesian();
            let before = pole.angle_to(&p.to_cartesian());
            let after = x.angle_to(&rotate_pole_to_x(p).to_cartesian());
            prop_assert!((before - after).abs() < 1e-10);
        }
    }
}
