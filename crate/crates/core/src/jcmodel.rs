//! Dressed states and Hamiltonians of a single Jaynes-Cummings site and of the
//! non-interacting two-site lattice.
//!
//! Site basis: atom level (0 = excited, 1 = ground) major, photon number
//! `0..=n_max` minor, so the index of `|x, k>` is `x * (n_max + 1) + k`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qla::{kron, CMatrix};

/// Frequencies of one atom-cavity site (hbar = 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JCParams {
    pub omega0: f64,
    pub omega: f64,
    pub g: f64,
}

impl JCParams {
    pub fn new(omega0: f64, omega: f64, g: f64) -> Result<Self> {
        let p = Self { omega0, omega, g };
        p.validate()?;
        Ok(p)
    }

    /// Resonant site with the given atomic frequency and coupling.
    pub fn resonant(omega0: f64, g: f64) -> Result<Self> {
        Self::new(omega0, omega0, g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega0, self.omega, self.g].iter().all(|x| x.is_finite());
        if !finite || self.g <= 0.0 || self.omega0 <= 0.0 || self.omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "need finite omega0 > 0, omega > 0, g > 0 (got omega0={}, omega={}, g={})",
                self.omega0, self.omega, self.g
            )));
        }
        Ok(())
    }

    /// Cavity minus atom frequency.
    pub fn detuning(&self) -> f64 {
        self.omega - self.omega0
    }

    /// Rabi coupling `G_n = 2 g sqrt(n)` of the `n`-excitation manifold.
    pub fn rabi(&self, n: u32) -> f64 {
        2.0 * self.g * f64::from(n).sqrt()
    }

    /// Energy of `|g; 0>` on the same scale as [`DressedData::lambda_plus`].
    ///
    /// The manifold energies `n omega + (Delta +/- delta) / 2` sit
    /// `(omega + Delta) / 2` above the literal Hamiltonian spectrum for every
    /// `n >= 1`; shifting `-omega0 / 2` by the same amount gives `Delta`.
    pub fn ground_energy(&self) -> f64 {
        self.detuning()
    }
}

/// Dressed-state data of the `n`-excitation manifold of one site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DressedData {
    pub n: u32,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub rabi: f64,
    pub theta: f64,
    pub c: f64,
    pub s: f64,
    /// `lambda_plus - lambda_minus = sqrt(Delta^2 + G_n^2)`.
    pub delta: f64,
}

impl DressedData {
    /// Components of `|psi+>` on `(|e, n-1>, |g, n>)`.
    ///
    /// With `Delta = omega - omega0` the upper eigenvector of the site
    /// Hamiltonian is `s|e> + c|g>` and the lower one `-c|e> + s|g>`.
    pub fn plus_components(&self) -> [f64; 2] {
        [self.s, self.c]
    }

    /// Components of `|psi->` on `(|e, n-1>, |g, n>)`.
    pub fn minus_components(&self) -> [f64; 2] {
        [-self.c, self.s]
    }
}

/// Dressed energies, mixing angle and its half-angle cosines for manifold `n`.
pub fn dressed_data(params: &JCParams, n: u32) -> Result<DressedData> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("manifold n = 0 holds only |g;0> and has no dressed pair".into()));
    }
    let detuning = params.detuning();
    let rabi = params.rabi(n);
    let delta = detuning.hypot(rabi);
    let theta = rabi.atan2(detuning);
    let base = f64::from(n) * params.omega + 0.5 * detuning;
    Ok(DressedData {
        n,
        lambda_plus: base + 0.5 * delta,
        lambda_minus: base - 0.5 * delta,
        rabi,
        theta,
        c: (0.5 * theta).cos(),
        s: (0.5 * theta).sin(),
        delta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformDirection {
    BareToDressed,
    DressedToBare,
}

/// Row `r` holds the expansion of source state `r` in the target basis.
///
/// Bare order is `(|e, n-1>, |g, n>)`, dressed order `(|psi+>, |psi->)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformTable {
    pub direction: TransformDirection,
    pub rows: [[f64; 2]; 2],
}

impl TransformTable {
    /// Applies the table to a coefficient vector over the source basis.
    pub fn apply(&self, coeffs: [Complex64; 2]) -> [Complex64; 2] {
        let r = &self.rows;
        [coeffs[0] * r[0][0] + coeffs[1] * r[1][0], coeffs[0] * r[0][1] + coeffs[1] * r[1][1]]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &TransformTable) -> [[f64; 2]; 2] {
        let (a, b) = (&self.rows, &next.rows);
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }
}

/// Coefficients relating bare and dressed states of one manifold:
/// `|e, n-1> = s|psi+> - c|psi->` and `|g, n> = c|psi+> + s|psi->`.
pub fn bare_dressed_transform(d: &DressedData, direction: TransformDirection) -> TransformTable {
    let plus = d.plus_components();
    let minus = d.minus_components();
    // dressed -> bare rows are the dressed vectors themselves; the inverse is the transpose
    let rows = match direction {
        TransformDirection::DressedToBare => [plus, minus],
        TransformDirection::BareToDressed => [[plus[0], minus[0]], [plus[1], minus[1]]],
    };
    TransformTable { direction, rows }
}

/// `omega0/2 sigma_z + g (a^+ sigma_- + sigma_+ a) + omega a^+ a` on
/// `{e, g} (x) {0..=n_max}`.
pub fn site_hamiltonian(params: &JCParams, n_max: usize) -> CMatrix {
    let levels = n_max + 1;
    let mut h = CMatrix::zeros(2 * levels, 2 * levels);
    let (e, g) = (0, levels);
    for k in 0..levels {
        let photons = k as f64 * params.omega;
        h[(e + k, e + k)] = Complex64::new(0.5 * params.omega0 + photons, 0.0);
        h[(g + k, g + k)] = Complex64::new(-0.5 * params.omega0 + photons, 0.0);
        if k < n_max {
            // |e, k> <-> |g, k+1>
            let coupling = Complex64::new(params.g * ((k + 1) as f64).sqrt(), 0.0);
            h[(g + k + 1, e + k)] = coupling;
            h[(e + k, g + k + 1)] = coupling;
        }
    }
    h
}

/// `H_Aa (x) 1 + 1 (x) H_Bb` on the ordered factors `(A, a, B, b)`.
pub fn total_hamiltonian(site_a: &JCParams, site_b: &JCParams, n_max: usize) -> CMatrix {
    let h_a = site_hamiltonian(site_a, n_max);
    let h_b = site_hamiltonian(site_b, n_max);
    let id = CMatrix::identity(h_a.rows());
    &kron(&h_a, &id) + &kron(&id, &h_b)
}

/// Diagonal excitation-number operator on `(A, a, B, b)`.
pub fn excitation_operator(n_max: usize) -> CMatrix {
    let levels = n_max + 1;
    let site: Vec<f64> = (0..2 * levels).map(|i| (if i < levels { 1 } else { 0 } + i % levels) as f64).collect();
    let full: Vec<f64> = site.iter().flat_map(|x| site.iter().map(move |y| x + y)).collect();
    CMatrix::diag_real(&full)
}

/// Mixing angle at resonance.
pub const RESONANT_THETA: f64 = FRAC_PI_2;
