//! Subcommand bodies: validate the config, run the grid, write results.

use std::path::Path;

use qjoin::fit::{fit_exponent_bootstrap, MIN_POINTS};
use qjoin::joins::BMM_EXACT_CAP;
use qjoin::qsim::{CostModel, EXACT_DOMAIN_CAP};
use qjoin::reductions::Construction;
use qjoin::seeds;
use rayon::prelude::*;
use serde::Serialize;

use crate::summary::{self, FitSummary, Summary, Threshold};
use crate::trials::{run_grid, side, Cell, Protocol, Row};
use crate::{Common, Failure, ModeArg, RunArgs, ScalingArgs, ScalingProtocol, ValidateArgs};

const CI_LEVEL: f64 = 0.95;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Run(format!("{}: {e}", path.display()))
}

fn model(common: &Common, default: ModeArg) -> Result<CostModel, Failure> {
    let mode = common.mode.unwrap_or(default);
    let m = match mode {
        ModeArg::Exact => CostModel::exact(),
        ModeArg::CostModel => CostModel::cost_model(common.c_shuttle, common.c_round, common.epsilon)
            .map_err(|e| usage(e.to_string()))?,
    };
    if mode == ModeArg::Exact && (common.c_shuttle != 1.0 || common.c_round != 1.0 || common.epsilon != 0.0) {
        return Err(usage("--c-shuttle, --c-round and --epsilon need --mode cost-model"));
    }
    Ok(m)
}

fn check_common(common: &Common) -> Result<(), Failure> {
    if common.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if let Some(p) = common.min_success {
        if !(0.0..=1.0).contains(&p) {
            return Err(usage("--min-success must lie in [0, 1]"));
        }
    }
    Ok(())
}

fn check_cell(protocol: Protocol, cell: Cell, model: &CostModel) -> Result<(), Failure> {
    let Cell { n, m, ell } = cell;
    if n == 0 || m == 0 {
        return Err(usage("dimensions must be positive"));
    }
    let exact_cap = |cap: usize| {
        if model.is_exact() && n > cap {
            Err(usage(format!("n={n} exceeds the exact-mode cap {cap}; use --mode cost-model")))
        } else {
            Ok(())
        }
    };
    match protocol {
        Protocol::Bmm | Protocol::BmmCross => {
            if ell == 0 || ell > m * m {
                return Err(usage(format!("need 1 <= ell <= m^2, got ell={ell}, m={m}")));
            }
            exact_cap(BMM_EXACT_CAP)
        }
        Protocol::MmF2 => {
            if ell == 0 || ell > n * n {
                return Err(usage(format!("need 1 <= ell <= n^2, got ell={ell}, n={n}")));
            }
            Ok(())
        }
        Protocol::Disj => {
            if 2 * side(n, ell) - ell > n {
                return Err(usage(format!("ell={ell} does not fit two sets of size {} in [{n}]", side(n, ell))));
            }
            exact_cap(EXACT_DOMAIN_CAP)
        }
        Protocol::Gc => {
            let s = side(n, 0);
            if ell > s * s {
                return Err(usage(format!("ell={ell} exceeds the {s}x{s} collision area")));
            }
            exact_cap(EXACT_DOMAIN_CAP)
        }
    }
}

fn execute(
    protocol: Protocol,
    cells: &[Cell],
    model: &CostModel,
    common: &Common,
) -> Result<Vec<Row>, Failure> {
    for &cell in cells {
        check_cell(protocol, cell, model)?;
    }
    let results = run_grid(protocol, cells, common.trials, model, common.seed, common.timing).map_err(Failure::Run)?;
    if let Some(path) = &common.ledger_out {
        summary::write_ledgers(path, results.iter().map(|(_, l)| l)).map_err(|e| io_failure(path, e))?;
    }
    let rows: Vec<Row> = results.into_iter().map(|(r, _)| r).collect();
    if let Some(path) = &common.out {
        summary::write_rows(path, &rows).map_err(|e| io_failure(path, e))?;
    }
    Ok(rows)
}

fn finish(summary: Summary, path: Option<&Path>) -> Result<bool, Failure> {
    summary::write_json(path, &summary).map_err(|e| Failure::Run(e.to_string()))?;
    Ok(summary.all_thresholds_met)
}

pub fn run(protocol: Protocol, command: &'static str, args: &RunArgs) -> Result<bool, Failure> {
    let common = &args.common;
    check_common(common)?;
    let model = model(common, ModeArg::Exact)?;
    if protocol == Protocol::MmF2 && !model.is_exact() {
        return Err(usage("run-mmf2 is classical and only runs in exact mode"));
    }
    if args.m.is_some() && protocol != Protocol::Bmm {
        return Err(usage("--m only applies to run-bmm"));
    }
    let mut cells = Vec::new();
    for &n in args.n.values() {
        for &ell in args.ell.values() {
            let m = match protocol {
                Protocol::Bmm => args.m.unwrap_or(n),
                Protocol::Disj => side(n, ell),
                _ => n,
            };
            cells.push(Cell { n, m, ell });
        }
    }
    let rows = execute(protocol, &cells, &model, common)?;
    let cells = summary::summarize_cells(&rows);
    let thresholds = summary::success_thresholds(&cells, common.min_success);
    finish(
        Summary {
            command,
            seed: common.seed,
            all_thresholds_met: thresholds.iter().all(|t| t.met),
            cells,
            fits: Vec::new(),
            thresholds,
        },
        common.summary_out.as_deref(),
    )
}

/// Fits the mean cost along one axis; `points` are `(x, per-trial costs)`.
fn fit_axis(
    axis: &'static str,
    fixed: usize,
    points: Vec<(f64, Vec<f64>)>,
    resamples: usize,
    seed: u64,
) -> Result<FitSummary, Failure> {
    let mut rng = seeds::rng(seed);
    let count = points.len();
    let fit = fit_exponent_bootstrap(&points, resamples, CI_LEVEL, &mut rng)
        .map_err(|e| Failure::Run(format!("fit along {axis} at {fixed}: {e}")))?;
    Ok(FitSummary::new(axis, fixed, count, CI_LEVEL, &fit))
}

pub fn scaling(args: &ScalingArgs) -> Result<bool, Failure> {
    let common = &args.common;
    check_common(common)?;
    let model = model(common, ModeArg::CostModel)?;
    if model.is_exact() {
        return Err(usage("scaling runs in cost-model mode"));
    }
    let (ns, ells) = (args.n.values(), args.ell.values());
    let (protocol, cells): (Protocol, Vec<Cell>) = match args.protocol {
        ScalingProtocol::BmmCost => {
            if ns.len() < MIN_POINTS && ells.len() < MIN_POINTS {
                return Err(usage(format!("need at least {MIN_POINTS} values in --n or --ell")));
            }
            let cells = ns
                .iter()
                .flat_map(|&n| ells.iter().map(move |&ell| Cell { n, m: args.m, ell }))
                .collect();
            (Protocol::BmmCross, cells)
        }
        ScalingProtocol::Disj => {
            if ns.len() < MIN_POINTS {
                return Err(usage(format!("need at least {MIN_POINTS} values in --n")));
            }
            (Protocol::Disj, ns.iter().map(|&n| Cell { n, m: side(n, 1), ell: 1 }).collect())
        }
    };
    let rows = execute(protocol, &cells, &model, common)?;
    let trials = common.trials as usize;
    let per_cell: Vec<Vec<f64>> = rows
        .chunks(trials)
        .map(|chunk| {
            chunk
                .iter()
                .map(|r| {
                    let total = (r.classical_bits + r.qubits) as f64;
                    match args.protocol {
                        ScalingProtocol::BmmCost => total,
                        ScalingProtocol::Disj => total / (r.cell.n as f64).log2(),
                    }
                })
                .collect()
        })
        .collect();

    let mut fits = Vec::new();
    let fit_seed = |k: usize| seeds::derive(common.seed, u64::MAX, k as u64);
    match args.protocol {
        ScalingProtocol::BmmCost => {
            let at = |i: usize, j: usize| per_cell[i * ells.len() + j].clone();
            if ells.len() >= MIN_POINTS {
                for (i, &n) in ns.iter().enumerate() {
                    let points = ells.iter().enumerate().map(|(j, &ell)| (ell as f64, at(i, j))).collect();
                    fits.push(fit_axis("ell", n, points, args.resamples, fit_seed(fits.len()))?);
                }
            }
            if ns.len() >= MIN_POINTS {
                for (j, &ell) in ells.iter().enumerate() {
                    let points = ns.iter().enumerate().map(|(i, &n)| (n as f64, at(i, j))).collect();
                    fits.push(fit_axis("n", ell, points, args.resamples, fit_seed(fits.len()))?);
                }
            }
        }
        ScalingProtocol::Disj => {
            let points = ns.iter().zip(&per_cell).map(|(&n, c)| (n as f64, c.clone())).collect();
            fits.push(fit_axis("n", 1, points, args.resamples, fit_seed(0))?);
        }
    }

    let cells = summary::summarize_cells(&rows);
    let mut thresholds = summary::success_thresholds(&cells, common.min_success);
    for (axis, expected) in [("ell", args.expect_ell_slope), ("n", args.expect_n_slope)] {
        let Some(target) = expected else { continue };
        let along: Vec<&FitSummary> = fits.iter().filter(|f| f.axis == axis).collect();
        if along.is_empty() {
            return Err(usage(format!("no fit along {axis} to compare with the expected slope")));
        }
        for f in along {
            thresholds.push(Threshold {
                name: format!("slope along {axis} at {}", f.fixed),
                required: format!("{target} ± {}", args.slope_tol),
                observed: format!("{:.4}", f.slope),
                met: (f.slope - target).abs() <= args.slope_tol,
            });
        }
    }
    finish(
        Summary {
            command: "scaling",
            seed: common.seed,
            all_thresholds_met: thresholds.iter().all(|t| t.met),
            cells,
            fits,
            thresholds,
        },
        common.summary_out.as_deref(),
    )
}

#[derive(Debug, Serialize)]
struct ConstructionReport {
    name: &'static str,
    identity: &'static str,
    trials: u64,
    passed: u64,
}

#[derive(Debug, Serialize)]
struct ValidationSummary {
    command: &'static str,
    seed: u64,
    constructions: Vec<ConstructionReport>,
    all_passed: bool,
}

pub fn validate_reductions(args: &ValidateArgs) -> Result<bool, Failure> {
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let jobs: Vec<(usize, u64)> = (0..Construction::ALL.len())
        .flat_map(|c| (0..args.trials).map(move |t| (c, t)))
        .collect();
    let outcomes: Vec<(usize, u64, u64, bool)> = jobs
        .into_par_iter()
        .map(|(c, t)| {
            let seed = seeds::derive(args.seed, c as u64, t);
            let passed = Construction::ALL[c]
                .sample(&mut seeds::rng(seed))
                .is_ok_and(|e| e.validate().is_ok() && e.decode_payload() == *e.payload());
            (c, t, seed, passed)
        })
        .collect();
    if let Some(path) = &args.out {
        let mut text = String::from("construction,trial,seed,passed\n");
        for &(c, t, seed, passed) in &outcomes {
            text += &format!("{},{t},{seed},{}\n", Construction::ALL[c], u8::from(passed));
        }
        std::fs::write(path, text).map_err(|e| io_failure(path, e))?;
    }
    let constructions: Vec<ConstructionReport> = Construction::ALL
        .iter()
        .enumerate()
        .map(|(c, construction)| ConstructionReport {
            name: construction.name(),
            identity: construction.identity(),
            trials: args.trials,
            passed: outcomes.iter().filter(|o| o.0 == c && o.3).count() as u64,
        })
        .collect();
    let all_passed = constructions.iter().all(|c| c.passed == c.trials);
    let report = ValidationSummary {
        command: "validate-reductions",
        seed: args.seed,
        constructions,
        all_passed,
    };
    summary::write_json(args.summary_out.as_deref(), &report).map_err(|e| Failure::Run(e.to_string()))?;
    Ok(all_passed)
}
