//! Initial-state preparation and time evolution of the two-site lattice.
//!
//! Two independent routes produce the evolved state: the analytic route
//! expands each site in its dressed basis and attaches phases, the numeric
//! route diagonalizes the full truncated Hamiltonian. They use different
//! energy zero points, so their states agree only up to a global phase.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::{PairDensity, PairLabel};
use crate::error::{Error, Result};
use crate::jcmodel::{
    bare_dressed_transform, dressed_data, total_hamiltonian, DressedData, JCParams, TransformDirection,
};
use crate::qla::{self, kron_vec, CMatrix, Spectrum, ZERO};

/// Default number of time samples per Rabi period `2 pi / G`.
pub const SAMPLES_PER_PERIOD: usize = 512;

/// One of the four two-level factors, in tensor order `(A, a, B, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    AtomA,
    CavityA,
    AtomB,
    CavityB,
}

impl Subsystem {
    pub fn factor(self) -> usize {
        match self {
            Subsystem::AtomA => 0,
            Subsystem::CavityA => 1,
            Subsystem::AtomB => 2,
            Subsystem::CavityB => 3,
        }
    }

    pub fn is_cavity(self) -> bool {
        matches!(self, Subsystem::CavityA | Subsystem::CavityB)
    }

    pub fn label(self) -> &'static str {
        match self {
            Subsystem::AtomA => "A",
            Subsystem::CavityA => "a",
            Subsystem::AtomB => "B",
            Subsystem::CavityB => "b",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// `cos(alpha)|e e> + sin(alpha)|g g>` on the atoms.
    Phi,
    /// `cos(alpha)|e g> + sin(alpha)|g e>` on the atoms.
    Psi,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Phi => "phi",
            FamilyKind::Psi => "psi",
        })
    }
}

/// Atom-atom superposition with both cavities in vacuum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialFamily {
    pub kind: FamilyKind,
    pub alpha: f64,
}

impl InitialFamily {
    pub fn phi(alpha: f64) -> Self {
        Self { kind: FamilyKind::Phi, alpha }
    }

    pub fn psi(alpha: f64) -> Self {
        Self { kind: FamilyKind::Psi, alpha }
    }
}

/// Pure state on `A (x) a (x) B (x) b` with cavities truncated at `n_max`
/// photons.
#[derive(Clone, Debug, PartialEq)]
pub struct FourPartiteState {
    dims: [usize; 4],
    amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl FourPartiteState {
    pub fn from_amplitudes(n_max: usize, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        let dims = [2, n_max + 1, 2, n_max + 1];
        let len: usize = dims.iter().product();
        if n_max == 0 || amplitudes.len() != len {
            return Err(Error::DimensionMismatch {
                expected: format!("{len} amplitudes with n_max >= 1"),
                actual: format!("{} amplitudes, n_max = {n_max}", amplitudes.len()),
            });
        }
        Ok(Self { dims, amplitudes, time })
    }

    /// `|atom_a, photons_a, atom_b, photons_b>` with atom level 0 = excited.
    pub fn basis(n_max: usize, levels: [usize; 4]) -> Self {
        let dims = [2, n_max + 1, 2, n_max + 1];
        let mut amplitudes = vec![ZERO; dims.iter().product()];
        amplitudes[index_of(dims, levels)] = Complex64::new(1.0, 0.0);
        Self { dims, amplitudes, time: 0.0 }
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn n_max(&self) -> usize {
        self.dims[1] - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, levels: [usize; 4]) -> Complex64 {
        self.amplitudes[index_of(self.dims, levels)]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", self.dims),
                actual: format!("{:?}", other.dims),
            });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|`, insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        self.overlap(other).map(|z| z.norm())
    }

    /// Probability in each total-excitation sector, indexed by excitation number.
    pub fn sector_probabilities(&self) -> Vec<f64> {
        let levels = self.dims[1];
        let mut out = vec![0.0; 2 * levels + 1];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let d = digits_of(self.dims, idx);
            let n = (1 - d[0]) + d[1] + (1 - d[2]) + d[3];
            out[n] += amp.norm_sqr();
        }
        out
    }

    /// Reduced two-qubit state of one of the six pairs.
    pub fn reduce(&self, pair: PairLabel) -> Result<PairDensity> {
        qla::partial_trace(self, pair.subsystems())
    }
}

fn index_of(dims: [usize; 4], levels: [usize; 4]) -> usize {
    levels.iter().zip(dims).fold(0, |acc, (&l, d)| {
        assert!(l < d, "level {l} out of range for dimension {d}");
        acc * d + l
    })
}

fn digits_of(dims: [usize; 4], mut idx: usize) -> [usize; 4] {
    let mut d = [0; 4];
    for k in (0..4).rev() {
        d[k] = idx % dims[k];
        idx /= dims[k];
    }
    d
}

const EXCITED: usize = 0;
const GROUND: usize = 1;

/// The chosen atom-atom superposition with empty cavities, at `t = 0`.
pub fn prepare_initial(family: InitialFamily, n_max: usize) -> FourPartiteState {
    let (ca, sa) = (family.alpha.cos(), family.alpha.sin());
    let (first, second) = match family.kind {
        FamilyKind::Phi => ([EXCITED, 0, EXCITED, 0], [GROUND, 0, GROUND, 0]),
        FamilyKind::Psi => ([EXCITED, 0, GROUND, 0], [GROUND, 0, EXCITED, 0]),
    };
    let mut state = FourPartiteState::basis(n_max, first);
    let i1 = index_of(state.dims, first);
    let i2 = index_of(state.dims, second);
    state.amplitudes[i1] = Complex64::new(ca, 0.0);
    state.amplitudes[i2] += Complex64::new(sa, 0.0);
    state
}

/// Bare amplitudes `(u, v)` on `(|e,0>, |g,1>)` reached from `|e,0>` after `t`.
///
/// The initial bare vector is rotated into the dressed basis, each dressed
/// component picks up `exp(-i lambda t)`, and the result is rotated back.
pub fn site_excited_amplitudes(d: &DressedData, t: f64) -> [Complex64; 2] {
    let to_dressed = bare_dressed_transform(d, TransformDirection::BareToDressed);
    let to_bare = bare_dressed_transform(d, TransformDirection::DressedToBare);
    let dressed = to_dressed.apply([Complex64::new(1.0, 0.0), ZERO]);
    let phased = [
        dressed[0] * Complex64::from_polar(1.0, -d.lambda_plus * t),
        dressed[1] * Complex64::from_polar(1.0, -d.lambda_minus * t),
    ];
    to_bare.apply(phased)
}

/// Dressed-state evolution of one site.
#[derive(Clone, Debug)]
pub struct AnalyticEngine {
    params: JCParams,
    dressed: DressedData,
    n_max: usize,
}

impl AnalyticEngine {
    pub fn new(params: JCParams, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        Ok(Self { params, dressed: dressed_data(&params, 1)?, n_max })
    }

    pub fn dressed(&self) -> &DressedData {
        &self.dressed
    }

    fn site_vectors(&self, t: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let levels = self.n_max + 1;
        let [u, v] = site_excited_amplitudes(&self.dressed, t);
        let mut excited = vec![ZERO; 2 * levels];
        excited[0] = u;
        excited[levels + 1] = v;
        let mut ground = vec![ZERO; 2 * levels];
        ground[levels] = Complex64::from_polar(1.0, -self.params.ground_energy() * t);
        (excited, ground)
    }

    pub fn evolve(&self, family: InitialFamily, t: f64) -> FourPartiteState {
        let (ex, gr) = self.site_vectors(t);
        let (ca, sa) = (family.alpha.cos(), family.alpha.sin());
        let (first, second) = match family.kind {
            FamilyKind::Phi => (kron_vec(&ex, &ex), kron_vec(&gr, &gr)),
            FamilyKind::Psi => (kron_vec(&ex, &gr), kron_vec(&gr, &ex)),
        };
        let amplitudes = first.iter().zip(&second).map(|(x, y)| x * ca + y * sa).collect();
        let dims = [2, self.n_max + 1, 2, self.n_max + 1];
        FourPartiteState { dims, amplitudes, time: t }
    }
}

/// Analytic evolution with one photon level per cavity beyond vacuum.
pub fn evolve_analytic(family: InitialFamily, params: &JCParams, t: f64) -> Result<FourPartiteState> {
    Ok(AnalyticEngine::new(*params, 1)?.evolve(family, t))
}

/// Exact propagation under a fixed Hermitian Hamiltonian through its spectral
/// decomposition.
#[derive(Clone, Debug)]
pub struct NumericEngine {
    spectrum: Spectrum,
    n_max: usize,
}

impl NumericEngine {
    pub fn new(params: JCParams, n_max: usize) -> Result<Self> {
        Self::from_hamiltonian(&total_hamiltonian(&params, &params, n_max))
    }

    pub fn from_hamiltonian(h: &CMatrix) -> Result<Self> {
        let levels = ((h.rows() as f64).sqrt() / 2.0).round() as usize;
        if levels < 2 || h.rows() != 4 * levels * levels || !h.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square Hamiltonian of dimension (2 (n_max + 1))^2".into(),
                actual: format!("{}x{}", h.rows(), h.cols()),
            });
        }
        Ok(Self { spectrum: qla::eig_hermitian(h)?, n_max: levels - 1 })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `V exp(-i Lambda t) V^H psi(0)`; the result's time is `psi(0).time + t`.
    pub fn propagate(&self, state0: &FourPartiteState, t: f64) -> Result<FourPartiteState> {
        if state0.n_max() != self.n_max {
            return Err(Error::DimensionMismatch {
                expected: format!("state with n_max = {}", self.n_max),
                actual: format!("n_max = {}", state0.n_max()),
            });
        }
        let v = self.spectrum.vectors.as_ref().expect("numeric engine keeps eigenvectors");
        let mut coeffs = v.adjoint().matvec(&state0.amplitudes)?;
        for (c, &lambda) in coeffs.iter_mut().zip(&self.spectrum.values) {
            *c *= Complex64::from_polar(1.0, -lambda * t);
        }
        Ok(FourPartiteState { dims: state0.dims, amplitudes: v.matvec(&coeffs)?, time: state0.time + t })
    }

    pub fn evolve(&self, family: InitialFamily, t: f64) -> FourPartiteState {
        self.propagate(&prepare_initial(family, self.n_max), t).expect("dimensions fixed at construction")
    }
}

/// One-shot numeric propagation; diagonalizes `h` on every call.
pub fn evolve_numeric(state0: &FourPartiteState, h: &CMatrix, t: f64) -> Result<FourPartiteState> {
    let dim: usize = state0.dims.iter().product();
    if h.rows() != dim || h.cols() != dim {
        return Err(Error::DimensionMismatch {
            expected: format!("{dim}x{dim} Hamiltonian"),
            actual: format!("{}x{}", h.rows(), h.cols()),
        });
    }
    NumericEngine::from_hamiltonian(h)?.propagate(state0, t)
}

/// Either evolution route behind one interface.
#[derive(Clone, Debug)]
pub enum Engine {
    Analytic(AnalyticEngine),
    Numeric(NumericEngine),
}

impl Engine {
    pub fn analytic(params: JCParams, n_max: usize) -> Result<Self> {
        AnalyticEngine::new(params, n_max).map(Engine::Analytic)
    }

    pub fn numeric(params: JCParams, n_max: usize) -> Result<Self> {
        NumericEngine::new(params, n_max).map(Engine::Numeric)
    }

    pub fn evolve(&self, family: InitialFamily, t: f64) -> FourPartiteState {
        match self {
            Engine::Analytic(e) => e.evolve(family, t),
            Engine::Numeric(e) => e.evolve(family, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::all_pairwise;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

    const E: usize = EXCITED;
    const G: usize = GROUND;

    #[test]
    fn phi_at_zero_angle_is_a_basis_vector() {
        let s = prepare_initial(InitialFamily::phi(0.0), 1);
        assert_eq!(s, FourPartiteState::basis(1, [E, 0, E, 0]));
    }

    #[test]
    fn psi_amplitudes_and_norm() {
        let s = prepare_initial(InitialFamily::psi(FRAC_PI_3), 1);
        assert!((s.amplitude([E, 0, G, 0]).re - 0.5).abs() < 1e-15);
        assert!((s.amplitude([G, 0, E, 0]).re - 0.866_025_403_784_438_6).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_state_has_unit_atom_concurrence() {
        let s = prepare_initial(InitialFamily::phi(FRAC_PI_4), 1);
        let table = all_pairwise(&s).unwrap();
        assert!((table.get(PairLabel::AB).concurrence - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_at_zero_time_is_the_initial_state() {
        let p = JCParams::new(5.0, 6.3, 0.4).unwrap();
        for family in [InitialFamily::phi(0.3), InitialFamily::psi(1.1)] {
            let s = evolve_analytic(family, &p, 0.0).unwrap();
            let s0 = prepare_initial(family, 1);
            for (a, b) in s.amplitudes().iter().zip(s0.amplitudes()) {
                assert!((a - b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn half_rabi_period_swaps_excitation_into_cavity() {
        let p = JCParams::resonant(5.0, 1.0).unwrap();
        let t = PI / p.rabi(1);
        let s = evolve_analytic(InitialFamily::phi(0.0), &p, t).unwrap();
        assert!((s.amplitude([G, 1, G, 1]).norm() - 1.0).abs() < 1e-12);
        let s = evolve_analytic(InitialFamily::psi(0.0), &p, t).unwrap();
        assert!((s.amplitude([G, 1, G, 0]).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detuned_engines_agree_up_to_global_phase() {
        for &(w0, w, g) in &[(5.0, 6.0, 0.5), (5.0, 4.2, 0.8), (3.0, 3.0, 0.25)] {
            let p = JCParams::new(w0, w, g).unwrap();
            let numeric = NumericEngine::new(p, 1).unwrap();
            for family in [InitialFamily::phi(0.37), InitialFamily::psi(1.21)] {
                for &t in &[0.0, 0.71, 3.3, 17.9] {
                    let a = evolve_analytic(family, &p, t).unwrap();
                    let n = numeric.evolve(family, t);
                    let phase = a.overlap(&n).unwrap();
                    assert!((phase.norm() - 1.0).abs() < 1e-12);
                    let unit = phase / phase.norm();
                    for (x, y) in a.amplitudes().iter().zip(n.amplitudes()) {
                        assert!((x * unit - y).norm() < 1e-10, "params {w0} {w} {g}, t = {t}");
                    }
                }
            }
        }
    }

    #[test]
    fn numeric_identity_and_group_property() {
        let p = JCParams::new(5.0, 5.4, 0.6).unwrap();
        let eng = NumericEngine::new(p, 1).unwrap();
        let s0 = prepare_initial(InitialFamily::phi(0.6), 1);
        let same = eng.propagate(&s0, 0.0).unwrap();
        for (a, b) in same.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
        let (t1, t2) = (1.37, 2.91);
        let direct = eng.propagate(&s0, t1 + t2).unwrap();
        let stepped = eng.propagate(&eng.propagate(&s0, t1).unwrap(), t2).unwrap();
        for (a, b) in direct.amplitudes().iter().zip(stepped.amplitudes()) {
            assert!((a - b).norm() < 1e-11);
        }
        assert!((stepped.time - (t1 + t2)).abs() < 1e-15);
    }

    #[test]
    fn numeric_rejects_mismatched_dimensions() {
        let p = JCParams::resonant(5.0, 1.0).unwrap();
        let h = total_hamiltonian(&p, &p, 2);
        let s0 = prepare_initial(InitialFamily::phi(0.2), 1);
        assert!(matches!(evolve_numeric(&s0, &h, 1.0), Err(Error::DimensionMismatch { .. })));
        assert!(NumericEngine::from_hamiltonian(&CMatrix::identity(15)).is_err());
    }

    #[test]
    fn norm_and_sectors_preserved() {
        let p = JCParams::new(5.0, 5.7, 0.9).unwrap();
        for n_max in [1, 2, 3] {
            let numeric = NumericEngine::new(p, n_max).unwrap();
            let analytic = AnalyticEngine::new(p, n_max).unwrap();
            for family in [InitialFamily::phi(0.9), InitialFamily::psi(0.4)] {
                let allowed: &[usize] = match family.kind {
                    FamilyKind::Phi => &[0, 2],
                    FamilyKind::Psi => &[1],
                };
                for k in 0..40 {
                    let t = 0.173 * k as f64;
                    for s in [numeric.evolve(family, t), analytic.evolve(family, t)] {
                        assert!((s.norm() - 1.0).abs() < 1e-12);
                        let outside: f64 = s
                            .sector_probabilities()
                            .iter()
                            .enumerate()
                            .filter(|(n, _)| !allowed.contains(n))
                            .map(|(_, p)| p)
                            .sum();
                        assert!(outside <= 1e-12, "n_max {n_max}: leaked {outside}");
                    }
                }
            }
        }
    }

    #[test]
    fn resonant_engines_agree_on_all_pairs() {
        let p = JCParams::resonant(5.0, 1.0).unwrap();
        let t = PI / p.rabi(1);
        let family = InitialFamily::phi(FRAC_PI_4);
        let a = all_pairwise(&evolve_analytic(family, &p, t).unwrap()).unwrap();
        let n = all_pairwise(&NumericEngine::new(p, 1).unwrap().evolve(family, t)).unwrap();
        for pair in PairLabel::ALL {
            assert!((a.get(pair).concurrence - n.get(pair).concurrence).abs() < 1e-10);
        }
    }
}
