//! Exact statevector mathematics for the shared quantum resources.
//!
//! Three resources appear in the games: a maximally entangled qubit pair
//! (cycle graphs), a maximally entangled qutrit pair (cubic graphs), and the
//! two-qubit-per-player embedding of the qutrit pair that a gate-based
//! machine would actually run. All outcome probabilities are computed
//! exactly; sampling only enters through the seeded helpers at the bottom.
//!
//! Basis conventions, fixed once here: qubit outcomes 0/1 are move ranks
//! directly. The three-level system is treated as a spin-1 particle whose
//! measured component -1/0/+1 maps to move rank 0/1/2 (lowest/middle/highest
//! neighbor). Rotation matrices act on amplitudes ordered by *descending*
//! spin component (+1, 0, -1), so rank `r` reads matrix index `2 - r`. The
//! two-bit readout encodes rank `r` as the bit pattern with value `r`
//! (00, 01, 10); the pattern 11 is unused by ideal circuits.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];
pub type Mat3 = [[f64; 3]; 3];
pub type Mat4 = [[f64; 4]; 4];

/// Single-qubit rotation about the y axis by `theta`.
pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[c, -s], [s, c]]
}

/// Joint measurement-outcome distribution for a pair of players.
///
/// `probs[n * d + m]` is the probability that the first player reads `n` and
/// the second reads `m`. For arity 2 and 3 the indices are move ranks; for
/// arity 4 they are two-bit readout values 0..=3 (3 = the unused 11 pattern).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    d: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(d: usize, probs: Vec<f64>) -> Result<Self> {
        let dist = OutcomeDistribution { d, probs };
        dist.validate()?;
        Ok(dist)
    }

    /// Checks shape, non-negativity, and unit total mass (1e-12).
    pub fn validate(&self) -> Result<()> {
        if self.probs.len() != self.d * self.d {
            return Err(Error::Validation(format!(
                "outcome matrix has {} entries, expected {}",
                self.probs.len(),
                self.d * self.d
            )));
        }
        let mut total = 0.0;
        for &p in &self.probs {
            if p.is_nan() || p < -1e-15 {
                return Err(Error::Validation(format!(
                    "negative outcome probability {p}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!(
                "outcome probabilities sum to {total}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.d
    }

    pub fn prob(&self, n: usize, m: usize) -> f64 {
        self.probs[n * self.d + m]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Draws one joint outcome `(n, m)`; deterministic given the generator
    /// state.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> (usize, usize) {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return (i / self.d, i % self.d);
            }
        }
        // u landed in the rounding slack past the last positive entry.
        let last = self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        (last / self.d, last % self.d)
    }

    /// Row-major CSV with header `n,m,p`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,p\n");
        for n in 0..self.d {
            for m in 0..self.d {
                out.push_str(&format!("{n},{m},{}\n", self.prob(n, m)));
            }
        }
        out
    }
}

/// Euler angles (radians) for rotations about the x, y, and z axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub const ZERO: EulerAngles = EulerAngles {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
    };

    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        EulerAngles { alpha, beta, gamma }
    }

    /// Canonical representative with every angle reduced to `[0, 2*pi)`.
    /// Used when serializing strategies.
    pub fn canonical(&self) -> EulerAngles {
        let tau = std::f64::consts::TAU;
        EulerAngles {
            alpha: self.alpha.rem_euclid(tau),
            beta: self.beta.rem_euclid(tau),
            gamma: self.gamma.rem_euclid(tau),
        }
    }

    /// Recovers one Euler-angle triple producing the given proper rotation.
    pub fn from_matrix(m: &Mat3) -> EulerAngles {
        // beta from the (2,0) entry; gimbal-locked case pins gamma = 0.
        let sb = (-m[2][0]).clamp(-1.0, 1.0);
        let beta = sb.asin();
        if sb.abs() > 1.0 - 1e-12 {
            let alpha = (-m[0][1]).atan2(m[1][1]);
            return EulerAngles::new(alpha, beta, 0.0);
        }
        let alpha = m[2][1].atan2(m[2][2]);
        let gamma = m[1][0].atan2(m[0][0]);
        EulerAngles::new(alpha, beta, gamma)
    }
}

/// Proper rotation built from Euler angles about x, then y, then z.
pub fn euler_rotation(angles: &EulerAngles) -> Mat3 {
    let (sa, ca) = angles.alpha.sin_cos();
    let (sb, cb) = angles.beta.sin_cos();
    let (sg, cg) = angles.gamma.sin_cos();
    [
        [cb * cg, sa * sb * cg - ca * sg, ca * sb * cg + sa * sg],
        [cb * sg, sa * sb * sg + ca * cg, ca * sb * sg - sa * cg],
        [-sb, sa * cb, ca * cb],
    ]
}

/// [`euler_rotation`] re-indexed to the descending-spin amplitude basis, so
/// that entry `(2 - ra, 2 - rb)` of the plain rotation appears at `(ra, rb)`.
pub(crate) fn spin_rotation(angles: &EulerAngles) -> Mat3 {
    let r = euler_rotation(angles);
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] = r[2 - i][2 - j];
        }
    }
    s
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat3_transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// Player-pair rotation for the two-qubit-per-player embedding: the spin
/// rotation on the three used readout patterns, identity on the unused 11.
pub fn fourqubit_rotation(angles: &EulerAngles) -> Mat4 {
    let s = spin_rotation(angles);
    let mut out = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = s[i][j];
        }
    }
    out[3][3] = 1.0;
    out
}

/// A pure state of two qudits with equal local dimension (4, 9, or 16 total).
#[derive(Debug, Clone)]
pub struct StateVector {
    local_dim: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Maximally entangled pair of `local_dim`-level systems over the first
    /// `levels` basis states: sum of |kk> / sqrt(levels).
    fn correlated_pair(local_dim: usize, levels: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); local_dim * local_dim];
        let w = 1.0 / (levels as f64).sqrt();
        for k in 0..levels {
            amps[k * local_dim + k] = Complex64::new(w, 0.0);
        }
        StateVector {
            local_dim,
            amplitudes: amps,
        }
    }

    /// The entangled qubit pair (|00> + |11>) / sqrt(2).
    pub fn bell_pair() -> Self {
        Self::correlated_pair(2, 2)
    }

    /// The entangled qutrit pair, all three levels equally weighted.
    pub fn qutrit_pair() -> Self {
        Self::correlated_pair(3, 3)
    }

    /// The four-qubit embedding of the qutrit pair: the three used two-bit
    /// patterns equally weighted, no amplitude on any local 11.
    pub fn four_qubit_pair() -> Self {
        Self::correlated_pair(4, 3)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Applies `op_a` to the first qudit and `op_b` to the second.
    /// Both operators are real `local_dim x local_dim` matrices in row-major
    /// slices.
    pub fn apply_local_pair(&self, op_a: &[f64], op_b: &[f64]) -> StateVector {
        let d = self.local_dim;
        assert_eq!(op_a.len(), d * d, "operator shape mismatch");
        assert_eq!(op_b.len(), d * d, "operator shape mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    let aik = op_a[i * d + k];
                    if aik == 0.0 {
                        continue;
                    }
                    for l in 0..d {
                        let b = op_b[j * d + l];
                        if b == 0.0 {
                            continue;
                        }
                        acc += self.amplitudes[k * d + l] * (aik * b);
                    }
                }
                out[i * d + j] = acc;
            }
        }
        StateVector {
            local_dim: d,
            amplitudes: out,
        }
    }

    /// Joint measurement probabilities in the computational basis.
    pub fn outcome_probabilities(&self) -> OutcomeDistribution {
        let probs = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        OutcomeDistribution {
            d: self.local_dim,
            probs,
        }
    }
}

fn flatten2(m: &Mat2) -> [f64; 4] {
    [m[0][0], m[0][1], m[1][0], m[1][1]]
}

fn flatten4(m: &Mat4) -> [f64; 16] {
    let mut out = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            out[i * 4 + j] = m[i][j];
        }
    }
    out
}

/// Joint outcome distribution for the entangled qubit pair after each player
/// rotates their measurement axis by the site-dependent angle.
///
/// Computed through the statevector: prepare the entangled pair, apply
/// `Ry(theta_a) (x) Ry(theta_b)`, and project onto the computational basis.
pub fn outcome_matrix_qubit(theta_a: f64, theta_b: f64) -> OutcomeDistribution {
    let state = StateVector::bell_pair()
        .apply_local_pair(&flatten2(&ry(theta_a)), &flatten2(&ry(theta_b)));
    state.outcome_probabilities()
}

/// Joint outcome distribution for the entangled qutrit pair, indexed by move
/// rank. For real local rotations the joint amplitude collapses to a single
/// matrix product, so entry `(ra, rb)` is `(S_a S_b^T)[ra][rb]^2 / 3` in the
/// rank-ordered basis.
pub fn outcome_matrix_qutrit(angles_a: &EulerAngles, angles_b: &EulerAngles) -> OutcomeDistribution {
    let sa = spin_rotation(angles_a);
    let sb = spin_rotation(angles_b);
    let m = mat3_mul(&sa, &mat3_transpose(&sb));
    let mut probs = vec![0.0; 9];
    for ra in 0..3 {
        for rb in 0..3 {
            probs[ra * 3 + rb] = m[ra][rb] * m[ra][rb] / 3.0;
        }
    }
    OutcomeDistribution { d: 3, probs }
}

/// Joint two-bit readout distribution for the four-qubit embedding,
/// computed through the full 16-dimensional statevector.
///
/// Noiseless circuits place zero mass on any outcome containing a local 11;
/// over the three used patterns this reproduces [`outcome_matrix_qutrit`].
pub fn outcome_matrix_fourqubit(
    angles_a: &EulerAngles,
    angles_b: &EulerAngles,
) -> OutcomeDistribution {
    let ra = fourqubit_rotation(angles_a);
    let rb = fourqubit_rotation(angles_b);
    let state = StateVector::four_qubit_pair().apply_local_pair(&flatten4(&ra), &flatten4(&rb));
    state.outcome_probabilities()
}

/// Aggregate gate-failure model for a transpiled circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Failure probability of a single primitive gate.
    pub p_gate: f64,
    /// Number of primitive gates in the transpiled circuit.
    pub n_gates: u32,
}

impl NoiseParams {
    pub fn new(p_gate: f64, n_gates: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_gate) {
            return Err(Error::OutOfRange(format!(
                "gate failure probability {p_gate} outside [0, 1]"
            )));
        }
        Ok(NoiseParams { p_gate, n_gates })
    }

    /// Probability that at least one gate fails: `1 - (1 - p_gate)^n_gates`.
    pub fn circuit_failure_probability(&self) -> f64 {
        1.0 - (1.0 - self.p_gate).powi(self.n_gates as i32)
    }

    /// Gate failure probability that yields the requested whole-circuit
    /// failure probability at `n_gates` gates.
    pub fn calibrate_p_gate(p_circ: f64, n_gates: u32) -> Result<f64> {
        if !(0.0..1.0).contains(&p_circ) {
            return Err(Error::OutOfRange(format!(
                "circuit failure probability {p_circ} outside [0, 1)"
            )));
        }
        if n_gates == 0 {
            return Err(Error::InvalidSize("n_gates must be positive".into()));
        }
        Ok(1.0 - (1.0 - p_circ).powf(1.0 / n_gates as f64))
    }
}

/// Draws one joint outcome from a distribution. Thin wrapper kept for
/// symmetry with the noisy sampler.
pub fn sample_outcome<R: Rng>(dist: &OutcomeDistribution, rng: &mut R) -> (usize, usize) {
    dist.sample(rng)
}

/// Samples a two-bit readout pair from a distribution under whole-circuit
/// corruption: with the circuit failure probability the shot is replaced by
/// a uniform draw over all 16 readout pairs (including local 11 patterns).
pub fn noisy_sample_from<R: Rng>(
    ideal: &OutcomeDistribution,
    noise: &NoiseParams,
    rng: &mut R,
) -> (u8, u8) {
    debug_assert_eq!(ideal.arity(), 4);
    let p_circ = noise.circuit_failure_probability();
    if rng.gen::<f64>() < p_circ {
        let v: u8 = rng.gen_range(0..16);
        (v / 4, v % 4)
    } else {
        let (n, m) = ideal.sample(rng);
        (n as u8, m as u8)
    }
}

/// Noisy shot of the four-qubit circuit for one pair of site rotations.
pub fn noisy_sample_fourqubit<R: Rng>(
    angles_a: &EulerAngles,
    angles_b: &EulerAngles,
    noise: &NoiseParams,
    rng: &mut R,
) -> (u8, u8) {
    let ideal = outcome_matrix_fourqubit(angles_a, angles_b);
    noisy_sample_from(&ideal, noise, rng)
}
