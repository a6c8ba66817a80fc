//! Wootters concurrence for the six subsystem pairs of the lattice.
//!
//! Pair densities use the excited-first qubit basis: row 0 is "both excited"
//! (`e` for atoms, one photon for cavities) and row 3 is "both ground". In
//! an X state the corner coherence `z = rho[0][3]` competes with the inner
//! populations `b c`, and the inner coherence `w = rho[1][2]` with `a d`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{FourPartiteState, Subsystem};
use crate::error::{Error, Result};
use crate::qla::{eigvals_hermitian, spin_flip, sqrt_psd, CMatrix};

/// Tolerance on trace, Hermiticity and positivity of an input density.
pub const DENSITY_TOL: f64 = 1e-10;
/// Entries outside the X pattern below this magnitude count as zero.
pub const X_TOL: f64 = 1e-10;
/// Eigenvalues of the spin-flipped product above `-CLAMP_TOL` are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

/// The six ordered pairs. `Aa` and `Bb` are local; the rest straddle the two sites.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PairLabel {
    AB,
    ab,
    Aa,
    Bb,
    Ab,
    Ba,
}

impl PairLabel {
    /// Fixed reporting order.
    pub const ALL: [PairLabel; 6] =
        [PairLabel::AB, PairLabel::ab, PairLabel::Aa, PairLabel::Bb, PairLabel::Ab, PairLabel::Ba];

    pub fn subsystems(self) -> (Subsystem, Subsystem) {
        use Subsystem::*;
        match self {
            PairLabel::AB => (AtomA, AtomB),
            PairLabel::ab => (CavityA, CavityB),
            PairLabel::Aa => (AtomA, CavityA),
            PairLabel::Bb => (AtomB, CavityB),
            PairLabel::Ab => (AtomA, CavityB),
            PairLabel::Ba => (AtomB, CavityA),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PairLabel::AB => "AB",
            PairLabel::ab => "ab",
            PairLabel::Aa => "Aa",
            PairLabel::Bb => "Bb",
            PairLabel::Ab => "Ab",
            PairLabel::Ba => "Ba",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_local(self) -> bool {
        matches!(self, PairLabel::Aa | PairLabel::Bb)
    }
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PairLabel::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown pair '{s}' (expected AB, ab, Aa, Bb, Ab or Ba)")))
    }
}

/// One value per pair, indexed by [`PairLabel`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairTable<T>(pub [T; 6]);

impl<T> PairTable<T> {
    pub fn from_fn(mut f: impl FnMut(PairLabel) -> T) -> Self {
        PairTable(PairLabel::ALL.map(&mut f))
    }

    pub fn get(&self, pair: PairLabel) -> &T {
        &self.0[pair.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (PairLabel, &T)> {
        PairLabel::ALL.into_iter().zip(self.0.iter())
    }
}

/// Two-qubit reduced density matrix, optionally with a purification
/// `factor` satisfying `matrix = factor factor^H`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDensity {
    matrix: CMatrix,
    factor: Option<CMatrix>,
}

impl PairDensity {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: "4x4 pair density".into(),
                actual: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        Ok(Self { matrix, factor: None })
    }

    /// Density `M M^H` of a 4-row purification `M`.
    pub fn from_factor(factor: CMatrix) -> Self {
        assert_eq!(factor.rows(), 4, "purification must have four rows");
        let matrix = (&factor * &factor.adjoint()).hermitian_part();
        Self { matrix, factor: Some(factor) }
    }

    /// X state with diagonal `(a, b, c, d)`, corner coherence `z` and inner coherence `w`.
    pub fn x_state(diag: [f64; 4], z: Complex64, w: Complex64) -> Result<Self> {
        let mut m = CMatrix::diag_real(&diag);
        m[(0, 3)] = z;
        m[(3, 0)] = z.conj();
        m[(1, 2)] = w;
        m[(2, 1)] = w.conj();
        Self::from_matrix(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn factor(&self) -> Option<&CMatrix> {
        self.factor.as_ref()
    }

    /// Diagonal `(a, b, c, d)`.
    pub fn populations(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.matrix[(i, i)].re)
    }

    pub fn corner(&self) -> Complex64 {
        self.matrix[(0, 3)]
    }

    pub fn inner(&self) -> Complex64 {
        self.matrix[(1, 2)]
    }

    /// Largest off-X entry as `(magnitude, row, col)`.
    pub fn x_residual(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..4 {
            for j in 0..4 {
                if i == j || i + j == 3 {
                    continue;
                }
                let m = self.matrix[(i, j)].norm();
                if m > worst.0 {
                    worst = (m, i, j);
                }
            }
        }
        worst
    }

    pub fn is_x_form(&self, tol: f64) -> bool {
        self.x_residual().0 <= tol
    }

    /// Checks unit trace, Hermiticity and positivity to `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensity { property: "unit trace", value: tr.re });
        }
        let asym = self.matrix.hermitian_residual();
        if asym > tol {
            return Err(Error::InvalidDensity { property: "Hermiticity", value: asym });
        }
        let lowest = eigvals_hermitian(&self.matrix)?[3];
        if lowest < -tol {
            return Err(Error::InvalidDensity { property: "positivity", value: lowest });
        }
        Ok(())
    }
}

/// Concurrence with the spectrum it came from and, for X states, the two
/// signed Q values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcurrenceResult {
    pub concurrence: f64,
    /// Eigenvalues of `rho (sy sy) rho* (sy sy)`, non-increasing.
    pub lambdas: [f64; 4],
    /// `|z| - sqrt(b c)`.
    pub q_corner: Option<f64>,
    /// `|w| - sqrt(a d)`.
    pub q_inner: Option<f64>,
    /// Magnitudes of the corner and inner coherences, kept for branch selection.
    #[serde(skip)]
    coherences: Option<(f64, f64)>,
}

impl ConcurrenceResult {
    /// Signed Q of the branch carrying the larger coherence; corner on ties.
    ///
    /// For the reduced states of the lattice only one coherence is ever
    /// nonzero, and this is the Q whose positive part gives the concurrence.
    pub fn q_signed(&self) -> Option<f64> {
        let (z, w) = self.coherences?;
        if w > z {
            self.q_inner
        } else {
            self.q_corner
        }
    }
}

fn x_diagnostics(rho: &PairDensity) -> (f64, f64, (f64, f64)) {
    let [a, b, c, d] = rho.populations().map(|p| p.max(0.0));
    let (z, w) = (rho.corner().norm(), rho.inner().norm());
    (z - (b * c).sqrt(), w - (a * d).sqrt(), (z, w))
}

fn finish(sqrt_lambdas: [f64; 4], rho: &PairDensity) -> ConcurrenceResult {
    let concurrence = (sqrt_lambdas[0] - sqrt_lambdas[1] - sqrt_lambdas[2] - sqrt_lambdas[3]).max(0.0);
    let lambdas = sqrt_lambdas.map(|s| s * s);
    let (q_corner, q_inner, coherences) = if rho.is_x_form(X_TOL) {
        let (qc, qi, coh) = x_diagnostics(rho);
        (Some(qc), Some(qi), Some(coh))
    } else {
        (None, None, None)
    };
    ConcurrenceResult { concurrence, lambdas, q_corner, q_inner, coherences }
}

fn sorted_desc(mut v: Vec<f64>) -> [f64; 4] {
    v.sort_by(|a, b| b.total_cmp(a));
    v.resize(4, 0.0);
    [v[0], v[1], v[2], v[3]]
}

/// Square roots of the spin-flip spectrum from the purification: they are the
/// singular values of `T = M^T (sy sy) M`, read off as the non-negative
/// eigenvalues of the Hermitian matrix `[[0, T], [T^H, 0]]`.
fn sqrt_lambdas_from_factor(m: &CMatrix) -> Result<[f64; 4]> {
    let t = &(&m.transpose() * &spin_flip()) * m;
    let k = t.rows();
    let jw = CMatrix::from_fn(2 * k, 2 * k, |i, j| match (i < k, j < k) {
        (true, false) => t[(i, j - k)],
        (false, true) => t[(j, i - k)].conj(),
        _ => Complex64::new(0.0, 0.0),
    });
    let vals = eigvals_hermitian(&jw)?;
    Ok(sorted_desc(vals.into_iter().take(k.min(4)).map(|x| x.max(0.0)).collect()))
}

/// Square roots of the eigenvalues of `sqrt(rho) rho~ sqrt(rho)`, which shares
/// its spectrum with `rho rho~`.
fn sqrt_lambdas_hermitized(rho: &CMatrix) -> Result<[f64; 4]> {
    let yy = spin_flip();
    let flipped = &(&yy * &rho.conj()) * &yy;
    let root = sqrt_psd(rho, DENSITY_TOL)?;
    let product = (&(&root * &flipped) * &root).hermitian_part();
    let vals = eigvals_hermitian(&product)?;
    if let Some(&bad) = vals.iter().find(|&&x| x < -DENSITY_TOL) {
        return Err(Error::InvalidDensity { property: "positivity of rho rho~", value: bad });
    }
    Ok(sorted_desc(vals.into_iter().map(|x| if x < CLAMP_TOL { x.max(0.0) } else { x }.sqrt()).collect()))
}

/// General two-qubit concurrence `max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))`.
///
/// Uses the purification when the density carries one, since square roots of
/// a rank-deficient `rho` amplify round-off to `sqrt(eps)`.
pub fn wootters_concurrence(rho: &PairDensity) -> Result<ConcurrenceResult> {
    rho.validate(DENSITY_TOL)?;
    let roots = match rho.factor() {
        Some(m) => sqrt_lambdas_from_factor(m)?,
        None => sqrt_lambdas_hermitized(rho.matrix())?,
    };
    Ok(finish(roots, rho))
}

/// Concurrence of a density matrix ignoring any purification it carries.
pub fn wootters_concurrence_hermitized(rho: &PairDensity) -> Result<ConcurrenceResult> {
    rho.validate(DENSITY_TOL)?;
    Ok(finish(sqrt_lambdas_hermitized(rho.matrix())?, rho))
}

/// Closed-form concurrence of an X state, `2 max(0, |z| - sqrt(bc), |w| - sqrt(ad))`.
pub fn xstate_concurrence(rho: &PairDensity) -> Result<ConcurrenceResult> {
    let (magnitude, row, col) = rho.x_residual();
    if magnitude > X_TOL {
        return Err(Error::NotXForm { row, col, magnitude });
    }
    let [a, b, c, d] = rho.populations().map(|p| p.max(0.0));
    let (q_corner, q_inner, coherences) = x_diagnostics(rho);
    let (outer, inner) = ((a * d).sqrt(), (b * c).sqrt());
    let (z, w) = coherences;
    let lambdas = sorted_desc(vec![(outer + z).powi(2), (outer - z).powi(2), (inner + w).powi(2), (inner - w).powi(2)]);
    Ok(ConcurrenceResult {
        concurrence: 2.0 * q_corner.max(q_inner).max(0.0),
        lambdas,
        q_corner: Some(q_corner),
        q_inner: Some(q_inner),
        coherences: Some(coherences),
    })
}

/// Concurrence of every pair of a lattice state.
pub fn all_pairwise(state: &FourPartiteState) -> Result<PairTable<ConcurrenceResult>> {
    let mut out = Vec::with_capacity(6);
    for pair in PairLabel::ALL {
        out.push(wootters_concurrence(&state.reduce(pair)?)?);
    }
    Ok(PairTable(out.try_into().expect("six pairs")))
}
