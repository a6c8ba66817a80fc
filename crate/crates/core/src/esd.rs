//! Zero intervals of concurrence curves and sudden-death maps over `(alpha, t)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::closedform;
use crate::dynamics::{Engine, FamilyKind, InitialFamily, SAMPLES_PER_PERIOD};
use crate::entanglement::{all_pairwise, PairLabel, PairTable};
use crate::error::{Error, Result};
use crate::jcmodel::JCParams;

/// Concurrences at or below this count as zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Default minimum width of a sudden-death interval, in Rabi periods.
pub const MIN_WIDTH_PERIODS: f64 = 1e-6;

const BISECTION_STEPS: usize = 64;
const GOLDEN_STEPS: usize = 96;

/// Concurrence and (when the density is X-form) the signed Q behind it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairValue {
    pub c: f64,
    pub q: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    /// Zero over an interval wider than the threshold.
    SuddenDeath,
    /// Isolated root; reported with `t_lo == t_hi`.
    Touch,
    /// Zero over the whole window, as for product initial states.
    IdenticallyZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroInterval {
    pub t_lo: f64,
    pub t_hi: f64,
    pub kind: ZeroKind,
}

impl ZeroInterval {
    pub fn width(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    fn touch(t: f64) -> Self {
        Self { t_lo: t, t_hi: t, kind: ZeroKind::Touch }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroOptions {
    pub tol: f64,
    pub min_width: f64,
    /// Rabi period `2 pi / G` used to size the sampling grid.
    pub period: f64,
    pub samples_per_period: usize,
}

impl ZeroOptions {
    /// Defaults for a site with Rabi frequency `G`.
    pub fn for_rabi(rabi: f64) -> Self {
        let period = TAU / rabi;
        Self { tol: ZERO_TOL, min_width: MIN_WIDTH_PERIODS * period, period, samples_per_period: SAMPLES_PER_PERIOD }
    }
}

fn checked<F>(sampler: &F, t: f64) -> Result<PairValue>
where
    F: Fn(f64) -> Result<PairValue>,
{
    let v = sampler(t)?;
    if !v.c.is_finite() || v.q.is_some_and(|q| !q.is_finite()) {
        return Err(Error::NonFiniteSample { t });
    }
    Ok(v)
}

/// Moves the boundary between `inside` (predicate true) and `outside` to
/// machine resolution and returns the midpoint of the final bracket.
fn bisect<F, P>(sampler: &F, pred: &P, mut inside: f64, mut outside: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<PairValue>,
    P: Fn(&PairValue) -> bool,
{
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if pred(&checked(sampler, mid)?) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

/// Quantity minimized when locating a root. Q is formed from density
/// entries and keeps its relative accuracy near zero, whereas the spectral
/// concurrence only has absolute accuracy, which blurs flat touches.
fn score(v: &PairValue) -> f64 {
    v.q.unwrap_or(v.c)
}

/// Golden-section minimum of the curve's score on `[a, b]`.
fn golden_min<F>(sampler: &F, mut a: f64, mut b: f64) -> Result<(f64, PairValue)>
where
    F: Fn(f64) -> Result<PairValue>,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = checked(sampler, x1)?;
    let mut f2 = checked(sampler, x2)?;
    for _ in 0..GOLDEN_STEPS {
        if score(&f1) <= score(&f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = checked(sampler, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = checked(sampler, x2)?;
        }
        if b - a <= f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    Ok(if score(&f1) <= score(&f2) { (x1, f1) } else { (x2, f2) })
}

fn classify(lo: f64, hi: f64, min_width: f64) -> ZeroInterval {
    if hi - lo > min_width {
        ZeroInterval { t_lo: lo, t_hi: hi, kind: ZeroKind::SuddenDeath }
    } else {
        let mid = 0.5 * (lo + hi);
        ZeroInterval { t_lo: mid, t_hi: mid, kind: ZeroKind::Touch }
    }
}

/// Maximal sub-windows of `[t0, t1]` where the sampled concurrence vanishes.
///
/// The curve is sampled on a uniform grid. Runs of zero samples, and local
/// minima that polish down to zero, are widened by bisection on `Q <= 0`
/// (or `C <= tol` when no Q is available) and classified by width.
///
/// A touch is placed at the centre of the window where `C <= tol`. Its edges
/// sit well above round-off, so the centre stays accurate even for flat
/// (quartic) zeros whose bottom is lost in noise.
pub fn zero_intervals<F>(sampler: F, window: (f64, f64), opts: &ZeroOptions) -> Result<Vec<ZeroInterval>>
where
    F: Fn(f64) -> Result<PairValue>,
{
    let (t0, t1) = window;
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidParameter(format!("time window [{t0}, {t1}] must be finite and positive")));
    }
    if !(opts.period > 0.0 && opts.samples_per_period > 0 && opts.tol >= 0.0) {
        return Err(Error::InvalidParameter("zero-search options must be positive".into()));
    }
    let tol = opts.tol;
    let n = (((t1 - t0) / opts.period) * opts.samples_per_period as f64).ceil().max(2.0) as usize;
    let times: Vec<f64> = (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect();
    let values = times.iter().map(|&t| checked(&sampler, t)).collect::<Result<Vec<_>>>()?;

    let is_zero = |v: &PairValue| v.c <= tol;
    if values.iter().all(is_zero) {
        return Ok(vec![ZeroInterval { t_lo: t0, t_hi: t1, kind: ZeroKind::IdenticallyZero }]);
    }
    let pred = |v: &PairValue| match v.q {
        Some(q) => q <= 0.0,
        None => v.c <= tol,
    };

    let mut found = Vec::new();
    let mut i = 0;
    while i <= n {
        if !is_zero(&values[i]) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < n && is_zero(&values[j + 1]) {
            j += 1;
        }
        let hits: Vec<usize> = (i..=j).filter(|&k| pred(&values[k])).collect();
        if let (Some(&first), Some(&last)) = (hits.first(), hits.last()) {
            let lo = if first == 0 { t0 } else { bisect(&sampler, &pred, times[first], times[first - 1])? };
            let hi = if last == n { t1 } else { bisect(&sampler, &pred, times[last], times[last + 1])? };
            if hi - lo > opts.min_width {
                found.push(classify(lo, hi, opts.min_width));
                i = j + 1;
                continue;
            }
        }
        let lo = if i == 0 { t0 } else { bisect(&sampler, &is_zero, times[i], times[i - 1])? };
        let hi = if j == n { t1 } else { bisect(&sampler, &is_zero, times[j], times[j + 1])? };
        found.push(ZeroInterval::touch(0.5 * (lo + hi)));
        i = j + 1;
    }

    // Roots between samples show up as local minima of the sampled curve.
    for k in 0..=n {
        let c = values[k].c;
        if is_zero(&values[k]) || (k > 0 && c >= values[k - 1].c) || (k < n && c > values[k + 1].c) {
            continue;
        }
        let (a, b) = (times[k.saturating_sub(1)], times[(k + 1).min(n)]);
        let (t_star, v) = golden_min(&sampler, a, b)?;
        if !is_zero(&v) {
            continue;
        }
        if pred(&v) {
            let lo = if t_star == a { a } else { bisect(&sampler, &pred, t_star, a)? };
            let hi = if t_star == b { b } else { bisect(&sampler, &pred, t_star, b)? };
            if hi - lo > opts.min_width {
                found.push(classify(lo, hi, opts.min_width));
                continue;
            }
        }
        let lo = if t_star == a { a } else { bisect(&sampler, &is_zero, t_star, a)? };
        let hi = if t_star == b { b } else { bisect(&sampler, &is_zero, t_star, b)? };
        found.push(ZeroInterval::touch(0.5 * (lo + hi)));
    }

    found.sort_by(|x, y| x.t_lo.total_cmp(&y.t_lo));
    let mut merged: Vec<ZeroInterval> = Vec::with_capacity(found.len());
    for iv in found {
        match merged.last_mut() {
            Some(prev) if iv.t_lo <= prev.t_hi => {
                *prev = classify(prev.t_lo, prev.t_hi.max(iv.t_hi), opts.min_width);
            }
            _ => merged.push(iv),
        }
    }
    Ok(merged)
}

/// Sudden-death window of the Phi-family atom pair within one period, in
/// units of `G t`: the zeros of `tan(alpha) - sin^2(Gt/2)`.
///
/// `None` for `alpha >= pi/4`, where the atoms only touch zero at odd
/// multiples of `pi`.
pub fn esd_boundary_phi_ab(alpha: f64) -> Result<Option<(f64, f64)>> {
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, pi/2)")));
    }
    if alpha >= FRAC_PI_4 {
        return Ok(None);
    }
    let edge = 2.0 * alpha.tan().sqrt().asin();
    Ok(Some((edge, TAU - edge)))
}

/// Which route produces the concurrences of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineSelector {
    ClosedForm,
    Analytic,
    Numeric,
}

#[derive(Clone, Debug)]
enum Route {
    ClosedForm,
    Engine(Engine),
}

/// Evaluates all six pair values of a family at a given time.
#[derive(Clone, Debug)]
pub struct Evaluator {
    route: Route,
    rabi: f64,
}

impl Evaluator {
    pub fn new(selector: EngineSelector, params: JCParams, n_max: usize) -> Result<Self> {
        params.validate()?;
        let route = match selector {
            EngineSelector::ClosedForm => {
                if params.detuning() != 0.0 {
                    return Err(Error::InvalidParameter("closed-form values need omega = omega0".into()));
                }
                Route::ClosedForm
            }
            EngineSelector::Analytic => Route::Engine(Engine::analytic(params, n_max)?),
            EngineSelector::Numeric => Route::Engine(Engine::numeric(params, n_max)?),
        };
        Ok(Self { route, rabi: params.rabi(1) })
    }

    /// Single-excitation Rabi frequency `G = 2 g`.
    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn evaluate(&self, family: InitialFamily, t: f64) -> Result<PairTable<PairValue>> {
        match &self.route {
            Route::ClosedForm => {
                let set = closedform::resonance(family.kind, family.alpha, self.rabi, t);
                Ok(PairTable::from_fn(|p| PairValue { c: set.concurrence(p), q: Some(set.q(p)) }))
            }
            Route::Engine(engine) => {
                let table = all_pairwise(&engine.evolve(family, t))?;
                Ok(PairTable::from_fn(|p| {
                    let r = table.get(p);
                    PairValue { c: r.concurrence, q: r.q_signed() }
                }))
            }
        }
    }

    /// Zero intervals of one pair's curve over `window`.
    pub fn zero_intervals(
        &self,
        family: InitialFamily,
        pair: PairLabel,
        window: (f64, f64),
        opts: &ZeroOptions,
    ) -> Result<Vec<ZeroInterval>> {
        zero_intervals(|t| self.evaluate(family, t).map(|v| *v.get(pair)), window, opts)
    }
}

/// Analytic sudden-death window at one grid angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundarySample {
    pub alpha: f64,
    pub gt_lo: f64,
    pub gt_hi: f64,
}

/// Zero mask of one pair over the sweep grid, `zero_mask[i][j]` at
/// `(alpha_grid[i], t_grid[j])`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EsdMap {
    pub family: FamilyKind,
    pub pair: PairLabel,
    pub alpha_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub zero_mask: Vec<Vec<bool>>,
    /// Present for the Phi-family atom pair.
    pub boundary: Option<Vec<BoundarySample>>,
}

/// Pair values at every point of an `(alpha, t)` grid, alpha-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub family: FamilyKind,
    pub alpha_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub rabi: f64,
    pub tol: f64,
    cells: Vec<PairTable<PairValue>>,
}

impl Sweep {
    pub fn value(&self, i_alpha: usize, i_t: usize, pair: PairLabel) -> PairValue {
        *self.cells[i_alpha * self.t_grid.len() + i_t].get(pair)
    }

    pub fn is_zero(&self, i_alpha: usize, i_t: usize, pair: PairLabel) -> bool {
        self.value(i_alpha, i_t, pair).c <= self.tol
    }

    pub fn esd_map(&self, pair: PairLabel) -> EsdMap {
        let zero_mask = (0..self.alpha_grid.len())
            .map(|i| (0..self.t_grid.len()).map(|j| self.is_zero(i, j, pair)).collect())
            .collect();
        let boundary = (self.family == FamilyKind::Phi && pair == PairLabel::AB).then(|| {
            self.alpha_grid
                .iter()
                .filter_map(|&alpha| match esd_boundary_phi_ab(alpha) {
                    Ok(Some((gt_lo, gt_hi))) => Some(BoundarySample { alpha, gt_lo, gt_hi }),
                    _ => None,
                })
                .collect()
        });
        EsdMap {
            family: self.family,
            pair,
            alpha_grid: self.alpha_grid.clone(),
            t_grid: self.t_grid.clone(),
            zero_mask,
            boundary,
        }
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("{name} grid must be finite and strictly increasing")));
    }
    Ok(())
}

/// Evaluates every grid point in parallel; the result does not depend on
/// the number of worker threads.
pub fn sweep(family: FamilyKind, alpha_grid: &[f64], t_grid: &[f64], evaluator: &Evaluator, tol: f64) -> Result<Sweep> {
    check_grid("alpha", alpha_grid)?;
    check_grid("time", t_grid)?;
    let rows = alpha_grid
        .par_iter()
        .map(|&alpha| {
            t_grid
                .iter()
                .map(|&t| evaluator.evaluate(InitialFamily { kind: family, alpha }, t))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep {
        family,
        alpha_grid: alpha_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        rabi: evaluator.rabi(),
        tol,
        cells: rows.into_iter().flatten().collect(),
    })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Default grids: `alpha` over `[0, pi/2]` and `G t` over `[0, 4 pi]`.
pub fn default_grids(rabi: f64, n_alpha: usize, n_t: usize) -> (Vec<f64>, Vec<f64>) {
    (linspace(0.0, FRAC_PI_2, n_alpha), linspace(0.0, 4.0 * PI / rabi, n_t))
}
