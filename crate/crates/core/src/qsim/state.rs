use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};

pub const MAX_QUBITS: usize = 20;

/// Tolerance on Σ|amplitude|² for states handed in from outside.
const NORM_TOLERANCE: f64 = 1e-9;

type Matrix2 = [[Complex64; 2]; 2];

/// One operation on a [`StateVector`].
///
/// Single-qubit kinds carry their target qubit; `PhaseFlip` and `Diffusion`
/// act on the whole register at the amplitude level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateOp {
    X {
        target: usize,
    },
    H {
        target: usize,
    },
    Z {
        target: usize,
    },
    U3 {
        target: usize,
        theta: f64,
        phi: f64,
        lambda: f64,
    },
    /// Negates the amplitude of one computational basis state.
    PhaseFlip {
        index: usize,
    },
    /// Reflection about the uniform superposition, 2|s⟩⟨s| − I.
    Diffusion,
}

impl GateOp {
    pub fn u3(target: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        GateOp::U3 {
            target,
            theta,
            phi,
            lambda,
        }
    }

    /// The 2×2 unitary of a single-qubit kind, `None` for register-wide ops.
    pub fn matrix(&self) -> Option<Matrix2> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match *self {
            GateOp::X { .. } => Some([[zero, one], [one, zero]]),
            GateOp::H { .. } => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                Some([[h, h], [h, -h]])
            }
            GateOp::Z { .. } => Some([[one, zero], [zero, -one]]),
            GateOp::U3 { theta, phi, lambda, .. } => Some(u3_matrix(theta, phi, lambda)),
            GateOp::PhaseFlip { .. } | GateOp::Diffusion => None,
        }
    }

    fn target(&self) -> Option<usize> {
        match *self {
            GateOp::X { target } | GateOp::H { target } | GateOp::Z { target } | GateOp::U3 { target, .. } => {
                Some(target)
            }
            GateOp::PhaseFlip { .. } | GateOp::Diffusion => None,
        }
    }
}

/// U3(θ, φ, λ) =
/// ```text
/// [ cos(θ/2)          −e^{iλ}·sin(θ/2)     ]
/// [ e^{iφ}·sin(θ/2)    e^{i(φ+λ)}·cos(θ/2) ]
/// ```
pub fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), -Complex64::from_polar(s, lambda)],
        [Complex64::from_polar(s, phi), Complex64::from_polar(c, phi + lambda)],
    ]
}

/// Amplitudes over the 2^n computational basis states. Basis index bit `k`
/// is qubit `k` (qubit 0 is the least significant bit).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The ground state |0…0⟩ on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Builds a state from explicit amplitudes. The length must be a power of
    /// two and the state must be normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(invalid(format!("amplitude count {len} is not 2^n with n ≥ 1")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(invalid(format!("amplitudes are not normalized (Σ|a|² = {norm})")));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// The uniform superposition H^⊗n |0…0⟩.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        let mut state = Self::new(n_qubits)?;
        for q in 0..n_qubits {
            state.apply(&GateOp::H { target: q })?;
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// |amplitude|² of one basis state.
    pub fn probability(&self, basis_index: usize) -> Result<f64> {
        self.amplitudes.get(basis_index).map(|a| a.norm_sqr()).ok_or_else(|| {
            invalid(format!(
                "basis index {basis_index} out of range for {} qubits",
                self.n_qubits
            ))
        })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `op` in place.
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        self.validate(op)?;
        match *op {
            GateOp::PhaseFlip { index } => {
                self.amplitudes[index] = -self.amplitudes[index];
            }
            GateOp::Diffusion => {
                let mean = self.amplitudes.iter().sum::<Complex64>() / self.dim() as f64;
                for a in &mut self.amplitudes {
                    *a = 2.0 * mean - *a;
                }
            }
            _ => {
                let m = op.matrix().expect("single-qubit kind");
                let target = op.target().expect("single-qubit kind");
                self.apply_single(target, &m);
            }
        }
        Ok(())
    }

    /// Consuming variant of [`apply`](Self::apply) for chaining.
    pub fn with(mut self, op: GateOp) -> Result<Self> {
        self.apply(&op)?;
        Ok(self)
    }

    fn apply_single(&mut self, target: usize, m: &Matrix2) {
        let stride = 1usize << target;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = m[0][0] * x + m[0][1] * y;
                *a1 = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    fn validate(&self, op: &GateOp) -> Result<()> {
        if let Some(target) = op.target() {
            if target >= self.n_qubits {
                return Err(invalid(format!(
                    "target qubit {target} out of range for {} qubits",
                    self.n_qubits
                )));
            }
        }
        match *op {
            GateOp::U3 { theta, phi, lambda, .. } if !(theta.is_finite() && phi.is_finite() && lambda.is_finite()) => {
                Err(invalid("U3 angles must be finite"))
            }
            GateOp::PhaseFlip { index } if index >= self.dim() => Err(invalid(format!(
                "phase-flip index {index} out of range for {} qubits",
                self.n_qubits
            ))),
            _ => Ok(()),
        }
    }
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(invalid(format!("qubit count {n_qubits} outside 1..={MAX_QUBITS}")))
    }
}

pub fn new_state(n_qubits: usize) -> Result<StateVector> {
    StateVector::new(n_qubits)
}

/// Returns `state` transformed by `op`, leaving the input untouched.
pub fn apply_gate(state: &StateVector, op: &GateOp) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(op)?;
    Ok(out)
}

pub fn probability(state: &StateVector, basis_index: usize) -> Result<f64> {
    state.probability(basis_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn ground_states() {
        let s = new_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let s = new_state(2).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm_sqr() == 0.0));
    }

    #[test]
    fn qubit_count_bounds() {
        assert!(new_state(0).is_err());
        assert!(new_state(20).is_ok());
        assert!(matches!(new_state(21), Err(crate::Error::InvalidArgument(_))));
    }

    #[test]
    fn full_inversion() {
        let s = new_state(1).unwrap().with(GateOp::u3(0, PI, 0.0, 0.0)).unwrap();
        assert!(approx(s.probability(0).unwrap(), 0.0, 1e-15));
        assert!(approx(s.amplitudes()[1].re, 1.0, 1e-15));
    }

    #[test]
    fn half_inversion_amplitudes() {
        let s = new_state(1).unwrap().with(GateOp::u3(0, PI / 2.0, 0.0, 0.0)).unwrap();
        // 0.71² ≈ 0.5
        assert!(approx(s.amplitudes()[0].re, std::f64::consts::FRAC_1_SQRT_2, 1e-12));
        assert!(approx(s.amplitudes()[1].re, std::f64::consts::FRAC_1_SQRT_2, 1e-12));
        assert!(approx(s.amplitudes()[0].re, 0.71, 0.005));
        assert!(approx(s.probability(1).unwrap(), 0.5, 1e-12));
    }

    #[test]
    fn quarter_theta_is_not_quarter_probability() {
        let s = new_state(1).unwrap().with(GateOp::u3(0, 0.25 * PI, 0.0, 0.0)).unwrap();
        let p1 = s.probability(1).unwrap();
        assert!(approx(p1, (PI / 8.0).sin().powi(2), 1e-12));
        assert!(approx(p1, 0.1464, 1e-4));
    }

    #[test]
    fn hadamard_is_even() {
        let s = new_state(1).unwrap().with(GateOp::H { target: 0 }).unwrap();
        assert!(approx(s.probability(0).unwrap(), 0.5, 1e-12));
        assert!(approx(s.probability(1).unwrap(), 0.5, 1e-12));
    }

    #[test]
    fn amplitude_quarter_altitude() {
        // 0.87|0⟩ + 0.5|1⟩, with 0.87 the rounded √0.75
        let s =
            StateVector::from_amplitudes(vec![Complex64::new(0.75f64.sqrt(), 0.0), Complex64::new(0.5, 0.0)]).unwrap();
        assert!(approx(probability(&s, 1).unwrap(), 0.25, 1e-12));
        assert!(approx(s.amplitudes()[0].re, 0.87, 5e-3));
    }

    #[test]
    fn rejects_bad_amplitudes() {
        let c = |x| Complex64::new(x, 0.0);
        assert!(StateVector::from_amplitudes(vec![c(1.0), c(0.0), c(0.0)]).is_err());
        assert!(StateVector::from_amplitudes(vec![c(0.87), c(0.5)]).is_err());
    }

    #[test]
    fn out_of_range_ops() {
        let mut s = new_state(2).unwrap();
        assert!(s.apply(&GateOp::X { target: 2 }).is_err());
        assert!(s.apply(&GateOp::PhaseFlip { index: 4 }).is_err());
        assert!(s.apply(&GateOp::u3(0, f64::NAN, 0.0, 0.0)).is_err());
        assert!(s.probability(4).is_err());
        // failed ops leave the state unchanged
        assert_eq!(s, new_state(2).unwrap());
    }

    #[test]
    fn x_matches_u3_pi_0_pi() {
        let x = GateOp::X { target: 0 }.matrix().unwrap();
        let u = u3_matrix(PI, 0.0, PI);
        for r in 0..2 {
            for c in 0..2 {
                assert!((x[r][c] - u[r][c]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn phase_flip_and_diffusion() {
        let mut s = StateVector::uniform(2).unwrap();
        s.apply(&GateOp::PhaseFlip { index: 3 }).unwrap();
        assert!(approx(s.amplitudes()[3].re, -0.5, 1e-15));
        s.apply(&GateOp::Diffusion).unwrap();
        // N = 4 finds the marked state in one iteration
        assert!(approx(s.probability(3).unwrap(), 1.0, 1e-12));
    }
}
