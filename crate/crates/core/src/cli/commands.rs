use rayon::prelude::*;
use serde_json::{json, Value};

use super::output::{emit, json_text, Cell, Table};
use super::verify;
use super::{CliError, EngineArg, FormatArg, RunConfig};
use crate::dynamics::{FamilyKind, InitialFamily};
use crate::entanglement::{PairLabel, PairTable};
use crate::esd::{
    self, esd_boundary_phi_ab, linspace, EngineSelector, Evaluator, PairValue, ZeroInterval, ZeroOptions,
};

const EVOLVE_HEADER: [&str; 13] =
    ["t", "Gt", "alpha", "C_AB", "C_ab", "C_Aa", "C_Bb", "C_Ab", "C_Ba", "Q_AB", "Q_ab", "Q_Aa", "Q_Ab"];
const EVOLVE_Q: [PairLabel; 4] = [PairLabel::AB, PairLabel::ab, PairLabel::Aa, PairLabel::Ab];

fn evaluators(cfg: &RunConfig) -> Result<(Evaluator, Option<Evaluator>), CliError> {
    let params = cfg.params()?;
    let primary = Evaluator::new(cfg.engine.primary(), params, cfg.n_max)?;
    let check = match cfg.engine {
        EngineArg::Both => Some(Evaluator::new(EngineSelector::Numeric, params, cfg.n_max)?),
        _ => None,
    };
    Ok((primary, check))
}

fn family(cfg: &RunConfig) -> InitialFamily {
    InitialFamily { kind: cfg.family.into(), alpha: cfg.alpha }
}

fn max_difference(a: &PairTable<PairValue>, b: &PairTable<PairValue>) -> f64 {
    a.0.iter().zip(&b.0).map(|(x, y)| (x.c - y.c).abs()).fold(0.0, f64::max)
}

fn q_cell(v: &PairValue) -> Cell {
    v.q.map_or(Cell::Missing, Cell::Num)
}

fn render(table: &Table, format: FormatArg) -> String {
    match format {
        FormatArg::Csv => table.to_csv(),
        FormatArg::Json => json_text(&table.to_json()),
    }
}

fn disagreement_error(worst: f64, cfg: &RunConfig) -> Result<(), CliError> {
    if worst > cfg.agreement_tol {
        return Err(CliError::verify(format!(
            "analytic and numeric engines differ by {worst:e} (tolerance {:e})",
            cfg.agreement_tol
        )));
    }
    Ok(())
}

pub fn evolve(cfg: &RunConfig) -> Result<(), CliError> {
    let (primary, check) = evaluators(cfg)?;
    let fam = family(cfg);
    let (t_max, rabi) = (cfg.t_max(), primary.rabi());
    let rows = (0..=cfg.steps)
        .into_par_iter()
        .map(|i| {
            let t = t_max * i as f64 / cfg.steps as f64;
            let values = primary.evaluate(fam, t)?;
            let diff = match &check {
                Some(c) => Some(max_difference(&values, &c.evaluate(fam, t)?)),
                None => None,
            };
            Ok((t, values, diff))
        })
        .collect::<crate::Result<Vec<_>>>()?;

    let mut header = EVOLVE_HEADER.to_vec();
    if check.is_some() {
        header.push("max_engine_disagreement");
    }
    let mut table = Table::new(&header);
    let mut worst: f64 = 0.0;
    for (t, values, diff) in rows {
        let mut row = vec![Cell::Num(t), Cell::Num(rabi * t), Cell::Num(cfg.alpha)];
        row.extend(PairLabel::ALL.iter().map(|&p| Cell::Num(values.get(p).c)));
        row.extend(EVOLVE_Q.iter().map(|&p| q_cell(values.get(p))));
        if let Some(d) = diff {
            worst = worst.max(d);
            row.push(Cell::Num(d));
        }
        table.rows.push(row);
    }
    emit(cfg.output.as_deref(), &render(&table, cfg.format_or(FormatArg::Csv)))?;
    disagreement_error(worst, cfg)
}

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let (primary, check) = evaluators(cfg)?;
    let kind: FamilyKind = cfg.family.into();
    let alphas = linspace(cfg.alpha_min, cfg.alpha_max, cfg.alpha_steps + 1);
    let times = linspace(0.0, cfg.t_max(), cfg.steps + 1);
    let result = esd::sweep(kind, &alphas, &times, &primary, cfg.tol)?;
    let reference = match &check {
        Some(c) => Some(esd::sweep(kind, &alphas, &times, c, cfg.tol)?),
        None => None,
    };

    let mut table = Table::new(&["alpha", "t", "Gt", "pair", "C", "Q", "is_zero"]);
    let mut worst: f64 = 0.0;
    for (i, &alpha) in alphas.iter().enumerate() {
        for (j, &t) in times.iter().enumerate() {
            for pair in PairLabel::ALL {
                let v = result.value(i, j, pair);
                if let Some(r) = &reference {
                    worst = worst.max((v.c - r.value(i, j, pair).c).abs());
                }
                table.rows.push(vec![
                    Cell::Num(alpha),
                    Cell::Num(t),
                    Cell::Num(result.rabi * t),
                    Cell::Text(pair.to_string()),
                    Cell::Num(v.c),
                    q_cell(&v),
                    Cell::Bool(result.is_zero(i, j, pair)),
                ]);
            }
        }
    }
    emit(cfg.output.as_deref(), &render(&table, cfg.format_or(FormatArg::Csv)))?;
    disagreement_error(worst, cfg)
}

fn intervals_agree(a: &[ZeroInterval], b: &[ZeroInterval], scale: f64) -> bool {
    let tol = 1e-8 * scale;
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.kind == y.kind && (x.t_lo - y.t_lo).abs() <= tol && (x.t_hi - y.t_hi).abs() <= tol)
}

pub fn esd(cfg: &RunConfig) -> Result<(), CliError> {
    let (primary, check) = evaluators(cfg)?;
    let fam = family(cfg);
    let rabi = primary.rabi();
    let base = ZeroOptions::for_rabi(rabi);
    let opts = ZeroOptions {
        tol: cfg.tol,
        min_width: cfg.min_width * base.period,
        samples_per_period: cfg.samples_per_period,
        ..base
    };
    let window = (0.0, cfg.t_max());

    let per_pair = PairLabel::ALL
        .par_iter()
        .map(|&pair| {
            let found = primary.zero_intervals(fam, pair, window, &opts)?;
            let agrees = match &check {
                Some(c) => Some(intervals_agree(&found, &c.zero_intervals(fam, pair, window, &opts)?, window.1)),
                None => None,
            };
            Ok((pair, found, agrees))
        })
        .collect::<crate::Result<Vec<_>>>()?;

    let boundary = match (fam.kind, esd_boundary_phi_ab(cfg.alpha)) {
        (FamilyKind::Phi, Ok(Some((lo, hi)))) => json!({ "regime": "sudden_death", "gt_lo": lo, "gt_hi": hi }),
        (FamilyKind::Phi, Ok(None)) => json!({ "regime": "touch_only" }),
        _ => Value::Null,
    };

    let text = match cfg.format_or(FormatArg::Json) {
        FormatArg::Json => {
            let pairs: Vec<Value> = per_pair
                .iter()
                .map(|(pair, found, agrees)| {
                    let intervals: Vec<Value> = found
                        .iter()
                        .map(|iv| json!({ "kind": iv.kind, "t_lo": iv.t_lo, "t_hi": iv.t_hi, "gt_lo": iv.t_lo * rabi, "gt_hi": iv.t_hi * rabi }))
                        .collect();
                    let deaths = found.iter().filter(|iv| iv.kind == esd::ZeroKind::SuddenDeath).count();
                    let mut obj = json!({ "pair": pair.as_str(), "sudden_death_count": deaths, "intervals": intervals });
                    if let Some(a) = agrees {
                        obj["engines_agree"] = json!(a);
                    }
                    obj
                })
                .collect();
            json_text(&json!({
                "family": fam.kind,
                "alpha": cfg.alpha,
                "omega0": cfg.omega0,
                "omega": cfg.omega,
                "g": cfg.g,
                "rabi": rabi,
                "window": [window.0, window.1],
                "tol": opts.tol,
                "min_width": opts.min_width,
                "pairs": pairs,
                "phi_ab_boundary": boundary,
            }))
        }
        FormatArg::Csv => {
            let mut table = Table::new(&["pair", "kind", "t_lo", "t_hi", "Gt_lo", "Gt_hi"]);
            for (pair, found, _) in &per_pair {
                for iv in found {
                    let kind = serde_json::to_value(iv.kind).expect("serializable");
                    table.rows.push(vec![
                        Cell::Text(pair.to_string()),
                        Cell::Text(kind.as_str().unwrap_or_default().to_string()),
                        Cell::Num(iv.t_lo),
                        Cell::Num(iv.t_hi),
                        Cell::Num(iv.t_lo * rabi),
                        Cell::Num(iv.t_hi * rabi),
                    ]);
                }
            }
            table.to_csv()
        }
    };
    emit(cfg.output.as_deref(), &text)?;
    let mismatched: Vec<&str> =
        per_pair.iter().filter(|(_, _, a)| *a == Some(false)).map(|(p, _, _)| p.as_str()).collect();
    if !mismatched.is_empty() {
        return Err(CliError::verify(format!("engines disagree on zero intervals for {}", mismatched.join(", "))));
    }
    Ok(())
}

pub fn verify(cfg: &RunConfig, as_json: bool, fault: Option<f64>) -> Result<(), CliError> {
    let report = verify::run_checks(cfg, fault)?;
    let text =
        if as_json { json_text(&serde_json::to_value(&report).expect("serializable")) } else { report.to_text() };
    emit(cfg.output.as_deref(), &text)?;
    let failed = report.failed();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::verify(format!("failed checks: {}", failed.join(", "))))
    }
}
