//! Closed-form concurrences of the two initial families.
//!
//! Notation: `x = Gt/2`, `k = cos^2(alpha)` and `sc = |sin(alpha) cos(alpha)|`.
//! The factored forms with `tan(alpha)` are rewritten in terms of `sc` so
//! they hold for every real `alpha` without a pole at `pi/2`.

use serde::Serialize;

use crate::dynamics::FamilyKind;
use crate::entanglement::{PairLabel, PairTable};
use crate::error::{Error, Result};
use crate::jcmodel::DressedData;

/// Signed Q and clamped concurrence `C = 2 max(0, Q)` for all six pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormSet {
    pub family: FamilyKind,
    pub alpha: f64,
    /// Dimensionless time `G t`.
    pub gt: f64,
    pub q: PairTable<f64>,
    pub c: PairTable<f64>,
}

impl ClosedFormSet {
    fn from_q(family: FamilyKind, alpha: f64, gt: f64, q: [f64; 6]) -> Self {
        let c = q.map(|x| 2.0 * x.max(0.0));
        Self { family, alpha, gt, q: PairTable(q), c: PairTable(c) }
    }

    pub fn concurrence(&self, pair: PairLabel) -> f64 {
        *self.c.get(pair)
    }

    pub fn q(&self, pair: PairLabel) -> f64 {
        *self.q.get(pair)
    }
}

/// Resonant values for the family `cos(alpha)|e0,e0> + sin(alpha)|g0,g0>`.
pub fn phi_resonance(alpha: f64, rabi: f64, t: f64) -> ClosedFormSet {
    let gt = rabi * t;
    let (sin_x2, cos_x2) = ((gt / 2.0).sin().powi(2), (gt / 2.0).cos().powi(2));
    let (sc, k) = ((alpha.sin() * alpha.cos()).abs(), alpha.cos().powi(2));
    let sin_gt = gt.sin().abs();

    let q_atoms = cos_x2 * (sc - k * sin_x2);
    let q_cavities = sin_x2 * (sc - k * cos_x2);
    let q_cross = 0.5 * sc * sin_gt - 0.25 * k * sin_gt * sin_gt;
    let q_local = 0.5 * k * sin_gt;
    ClosedFormSet::from_q(FamilyKind::Phi, alpha, gt, [q_atoms, q_cavities, q_local, q_local, q_cross, q_cross])
}

/// Resonant values for the family `cos(alpha)|e0,g0> + sin(alpha)|g0,e0>`.
pub fn psi_resonance(alpha: f64, rabi: f64, t: f64) -> ClosedFormSet {
    let gt = rabi * t;
    let (sin_x2, cos_x2) = ((gt / 2.0).sin().powi(2), (gt / 2.0).cos().powi(2));
    let sc = (alpha.sin() * alpha.cos()).abs();
    let sin_gt = gt.sin().abs();

    let q_cross = 0.5 * sc * sin_gt;
    let q_aa = 0.5 * alpha.cos().powi(2) * sin_gt;
    let q_bb = 0.5 * alpha.sin().powi(2) * sin_gt;
    ClosedFormSet::from_q(FamilyKind::Psi, alpha, gt, [sc * cos_x2, sc * sin_x2, q_aa, q_bb, q_cross, q_cross])
}

pub fn resonance(family: FamilyKind, alpha: f64, rabi: f64, t: f64) -> ClosedFormSet {
    match family {
        FamilyKind::Phi => phi_resonance(alpha, rabi, t),
        FamilyKind::Psi => psi_resonance(alpha, rabi, t),
    }
}

/// `Q^AB + Q^ab + 2 Q^Aa |tan(alpha)| - 2 Q^Ab` from the unclamped Q values.
///
/// Constant in time for both families; the constant is `|sin(2 alpha)| / 2`.
pub fn q_identity_lhs(family: FamilyKind, alpha: f64, rabi: f64, t: f64) -> f64 {
    let set = resonance(family, alpha, rabi, t);
    q_identity_combination(&set.q, alpha)
}

/// The identity combination for any table of signed Q values.
pub fn q_identity_combination(q: &PairTable<f64>, alpha: f64) -> f64 {
    q.get(PairLabel::AB) + q.get(PairLabel::ab) + 2.0 * q.get(PairLabel::Aa) * alpha.tan().abs()
        - 2.0 * q.get(PairLabel::Ab)
}

/// Coherence magnitude `z_abs` and the two populations `b`, `c` whose
/// geometric mean it competes with: `Q = z_abs - sqrt(b c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OffResIngredients {
    pub z_abs: f64,
    pub b: f64,
    pub c: f64,
}

impl OffResIngredients {
    pub fn q(&self) -> f64 {
        self.z_abs - (self.b * self.c).sqrt()
    }

    pub fn concurrence(&self) -> f64 {
        2.0 * self.q().max(0.0)
    }
}

/// Where the ingredients live in the reduced pair density.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IngredientPositions {
    pub coherence: (usize, usize),
    pub b: usize,
    pub c: usize,
}

/// Matrix positions of `z_abs`, `b` and `c` for the pairs with printed
/// ingredients (`AB` and `Ab`).
pub fn ingredient_positions(family: FamilyKind, pair: PairLabel) -> Result<IngredientPositions> {
    check_ingredient_pair(pair)?;
    Ok(match family {
        FamilyKind::Phi => IngredientPositions { coherence: (0, 3), b: 1, c: 2 },
        FamilyKind::Psi => IngredientPositions { coherence: (1, 2), b: 3, c: 0 },
    })
}

fn check_ingredient_pair(pair: PairLabel) -> Result<()> {
    match pair {
        PairLabel::AB | PairLabel::Ab => Ok(()),
        other => Err(Error::InvalidParameter(format!("no closed-form ingredients for pair {other}"))),
    }
}

/// `(P, V) = (|u|^2, |v|^2)` where `|e,0> -> u|e,0> + v|g,1>` on one site.
fn site_weights(d: &DressedData, t: f64) -> (f64, f64) {
    let (c2, s2) = (d.c * d.c, d.s * d.s);
    let cos_dt = (d.delta * t).cos();
    let p = c2 * c2 + s2 * s2 + 2.0 * c2 * s2 * cos_dt;
    let v = c2 * s2 * (2.0 - 2.0 * cos_dt);
    (p, v)
}

/// Ingredients for any detuning, for pair `AB` or `Ab`.
pub fn offres_ingredients(
    family: FamilyKind,
    pair: PairLabel,
    alpha: f64,
    d: &DressedData,
    t: f64,
) -> Result<OffResIngredients> {
    check_ingredient_pair(pair)?;
    let (p, v) = site_weights(d, t);
    let sc = (alpha.sin() * alpha.cos()).abs();
    let (k, l) = (alpha.cos().powi(2), alpha.sin().powi(2));
    Ok(match (family, pair) {
        (FamilyKind::Phi, PairLabel::AB) => OffResIngredients { z_abs: sc * p, b: k * p * v, c: k * p * v },
        (FamilyKind::Phi, _) => OffResIngredients { z_abs: sc * (p * v).sqrt(), b: k * p * p, c: k * v * v },
        (FamilyKind::Psi, PairLabel::AB) => OffResIngredients { z_abs: sc * p, b: v, c: 0.0 },
        (FamilyKind::Psi, _) => OffResIngredients { z_abs: sc * (p * v).sqrt(), b: l * p + k * v, c: 0.0 },
    })
}

/// `(AB, Ab)` ingredients for the Phi family.
pub fn phi_offres_ingredients(alpha: f64, d: &DressedData, t: f64) -> (OffResIngredients, OffResIngredients) {
    let get = |pair| offres_ingredients(FamilyKind::Phi, pair, alpha, d, t).expect("valid pair");
    (get(PairLabel::AB), get(PairLabel::Ab))
}

/// `(AB, Ab)` ingredients for the Psi family.
pub fn psi_offres_ingredients(alpha: f64, d: &DressedData, t: f64) -> (OffResIngredients, OffResIngredients) {
    let get = |pair| offres_ingredients(FamilyKind::Psi, pair, alpha, d, t).expect("valid pair");
    (get(PairLabel::AB), get(PairLabel::Ab))
}
