use num_complex::Complex64;

use super::CMatrix;
use crate::dynamics::{FourPartiteState, Subsystem};
use crate::entanglement::PairDensity;
use crate::error::{Error, Result};

/// Largest cavity population outside `{|0>, |1>}` tolerated when a cavity is
/// kept in a two-qubit reduction.
pub const CAVITY_LEAK_TOL: f64 = 1e-10;

/// Maps a factor level to its qubit index (0 = excited / one photon,
/// 1 = ground / vacuum). `None` for Fock levels above one.
fn qubit_index(sub: Subsystem, level: usize) -> Option<usize> {
    if sub.is_cavity() {
        match level {
            1 => Some(0),
            0 => Some(1),
            _ => None,
        }
    } else {
        Some(level)
    }
}

/// Reduces a four-partite pure state to the two-qubit density matrix of the
/// ordered pair `keep`, tracing out the other two factors.
///
/// The reduction also records its purification `M` (4 x traced dimension,
/// `rho = M M^H`), which the concurrence code uses to avoid square roots of
/// rank-deficient matrices.
pub fn partial_trace(state: &FourPartiteState, keep: (Subsystem, Subsystem)) -> Result<PairDensity> {
    let (first, second) = keep;
    if first == second {
        return Err(Error::RepeatedSubsystem(first.label()));
    }
    let dims = state.dims();
    let traced: Vec<usize> = (0..4).filter(|&k| k != first.factor() && k != second.factor()).collect();
    let traced_dim = dims[traced[0]] * dims[traced[1]];

    let mut factor = CMatrix::zeros(4, traced_dim);
    let mut leaked = 0.0;
    let mut digits = [0usize; 4];
    for &amp in state.amplitudes() {
        let col = digits[traced[0]] * dims[traced[1]] + digits[traced[1]];
        match (qubit_index(first, digits[first.factor()]), qubit_index(second, digits[second.factor()])) {
            (Some(q1), Some(q2)) => factor[(2 * q1 + q2, col)] = amp,
            _ => leaked += amp.norm_sqr(),
        }
        // advance the mixed-radix counter, last factor fastest
        for k in (0..4).rev() {
            digits[k] += 1;
            if digits[k] < dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    if leaked > CAVITY_LEAK_TOL {
        return Err(Error::CavityLeakage { probability: leaked, tol: CAVITY_LEAK_TOL });
    }

    let kept_norm: f64 = factor.as_slice().iter().map(Complex64::norm_sqr).sum();
    if kept_norm == 0.0 {
        return Err(Error::InvalidDensity { property: "trace", value: 0.0 });
    }
    let factor = factor.scale(Complex64::new(kept_norm.sqrt().recip(), 0.0));
    Ok(PairDensity::from_factor(factor))
}
