//! Success probability of a one-query Bernstein-Vazirani circuit whose
//! Hadamard gates are replaced by frozen noisy gates `H(θ, φ)`.
//!
//! `H(θ, φ)` sends `|0⟩ → cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and
//! `|1⟩ → sin(θ/2)|0⟩ − e^{iφ} cos(θ/2)|1⟩`; `H(π/2, 0)` is the ideal gate.

use num_complex::Complex64;
use rand::Rng;

use crate::disorder::{classical_mean_and_strength, ClassicalDisorder, QuantumSampler};
use crate::error::{Error, Result};
use crate::geometry::BlochAngles;

/// Largest register the full state-vector mode will build.
pub const FULL_STATEVECTOR_MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SecretString {
    bits: Vec<bool>,
}

impl SecretString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter("secret string must be non-empty".into()));
        }
        Ok(SecretString { bits })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![false; n])
    }

    /// Parses a string of `0` and `1` characters, most significant bit first.
    pub fn parse(text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidParameter(format!("bad bit {c:?} in {text:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }

    /// The `n`-bit string with the binary digits of `value`, most significant first.
    pub fn from_index(value: u64, n: usize) -> Result<Self> {
        Self::new((0..n).rev().map(|k| (value >> k) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Positions holding a zero.
    pub fn zero_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| !self.bits[k]).collect()
    }

    /// Positions holding a one.
    pub fn one_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.bits[k]).collect()
    }
}

impl std::fmt::Display for SecretString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// The orientations of the `n` gates before the oracle and the `n` after it.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub pre: Vec<BlochAngles>,
    pub post: Vec<BlochAngles>,
}

impl NoiseRealization {
    pub fn new(pre: Vec<BlochAngles>, post: Vec<BlochAngles>) -> Result<Self> {
        if pre.len() != post.len() {
            return Err(Error::LengthMismatch {
                expected: pre.len(),
                found: post.len(),
            });
        }
        Ok(NoiseRealization { pre, post })
    }

    pub fn noiseless(n: usize) -> Self {
        NoiseRealization {
            pre: vec![BlochAngles::PLUS_X; n],
            post: vec![BlochAngles::PLUS_X; n],
        }
    }

    pub fn len(&self) -> usize {
        self.pre.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pre.is_empty()
    }

    /// Replaces every gate with a fresh draw, pre gates first, in qubit order.
    pub fn redraw<R: Rng + ?Sized>(&mut self, sampler: &QuantumSampler, rng: &mut R) -> Result<()> {
        for a in self.pre.iter_mut() {
            *a = sampler.sample(rng)?;
        }
        for a in self.post.iter_mut() {
            *a = sampler.sample(rng)?;
        }
        Ok(())
    }

    pub fn draw<R: Rng + ?Sized>(sampler: &QuantumSampler, n: usize, rng: &mut R) -> Result<Self> {
        let mut r = Self::noiseless(n);
        r.redraw(sampler, rng)?;
        Ok(r)
    }
}

fn half_angles(a: &BlochAngles) -> (f64, f64) {
    let (s, c) = (a.theta() / 2.0).sin_cos();
    (c, s)
}

/// Probability that qubit `k` reads out its secret bit: `|X|²` for a zero
/// bit and `|Y|²` for a one bit.
pub fn bit_success(bit: bool, pre: &BlochAngles, post: &BlochAngles) -> f64 {
    let (c, s) = half_angles(pre);
    let (cp, sp) = half_angles(post);
    let e = Complex64::from_polar(1.0, pre.phi());
    let amp = if bit {
        Complex64::from_polar(1.0, post.phi()) * (c * sp + e * (s * cp))
    } else {
        c * cp + e * (s * sp)
    };
    amp.norm_sqr().min(1.0)
}

fn check_lengths(s: &SecretString, r: &NoiseRealization) -> Result<()> {
    if r.pre.len() != s.len() || r.post.len() != s.len() {
        return Err(Error::LengthMismatch {
            expected: s.len(),
            found: if r.pre.len() != s.len() { r.pre.len() } else { r.post.len() },
        });
    }
    Ok(())
}

/// Probability that one query returns `s` exactly, as a product of per-bit factors.
pub fn success_probability(s: &SecretString, r: &NoiseRealization) -> Result<f64> {
    check_lengths(s, r)?;
    Ok(s
        .bits()
        .iter()
        .zip(r.pre.iter().zip(&r.post))
        .map(|(&b, (pre, post))| bit_success(b, pre, post))
        .product())
}

/// Matrix of `H(θ, φ)` in the computational basis.
pub fn gate_matrix(a: &BlochAngles) -> [[Complex64; 2]; 2] {
    let (c, s) = half_angles(a);
    let e = Complex64::from_polar(1.0, a.phi());
    [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [e * s, -e * c],
    ]
}

fn apply(m: &[[Complex64; 2]; 2], v: [Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Runs the circuit qubit by qubit on two-component states and returns
/// `|⟨s|ψ⟩|²`. The circuit has no entangling gate, so this is exact.
pub fn statevector_success_probability(s: &SecretString, r: &NoiseRealization) -> Result<f64> {
    check_lengths(s, r)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut amplitude = one;
    for (k, &bit) in s.bits().iter().enumerate() {
        let v = apply(&gate_matrix(&r.pre[k]), [one, zero]);
        let oracle = if bit { -one } else { one };
        let v = [v[0], oracle * v[1]];
        let v = apply(&gate_matrix(&r.post[k]), v);
        amplitude *= if bit { v[1] } else { v[0] };
    }
    Ok(amplitude.norm_sqr())
}

/// Same as [`statevector_success_probability`] but materialises all `2ⁿ`
/// amplitudes and applies the oracle as the phase `(−1)^{s·x}`.
pub fn full_statevector_success_probability(s: &SecretString, r: &NoiseRealization) -> Result<f64> {
    check_lengths(s, r)?;
    let n = s.len();
    if n > FULL_STATEVECTOR_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: FULL_STATEVECTOR_MAX_QUBITS,
        });
    }
    // qubit k is bit (n - 1 - k) of the basis index
    let mask_of = |k: usize| 1usize << (n - 1 - k);
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
    psi[0] = Complex64::new(1.0, 0.0);
    let layer = |psi: &mut Vec<Complex64>, gates: &[BlochAngles]| {
        for (k, g) in gates.iter().enumerate() {
            let m = gate_matrix(g);
            let mask = mask_of(k);
            for i in 0..psi.len() {
                if i & mask == 0 {
                    let out = apply(&m, [psi[i], psi[i | mask]]);
                    psi[i] = out[0];
                    psi[i | mask] = out[1];
                }
            }
        }
    };
    layer(&mut psi, &r.pre);
    let s_index = (0..n).filter(|&k| s.bits()[k]).fold(0usize, |acc, k| acc | mask_of(k));
    for (i, amp) in psi.iter_mut().enumerate() {
        if (i & s_index).count_ones() % 2 == 1 {
            *amp = -*amp;
        }
    }
    layer(&mut psi, &r.post);
    Ok(psi[s_index].norm_sqr())
}

/// One-query classical success probability `(1 − m)/2^{n−1}`: the queried
/// bit is right with probability `1 − p` and the other `n − 1` are guessed.
pub fn classical_success(model: &ClassicalDisorder, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let (m, _) = classical_mean_and_strength(model)?;
    Ok((1.0 - m) * 0.5f64.powi(n as i32 - 1))
}
