use std::fs;
use std::path::Path;

use rayon::prelude::*;
use wsntrack_core::analytics::{cost_report, AnalyticsInputs, Mode};
use wsntrack_core::{MetricsReport, SimConfig, Simulation, Strategy};

use crate::cli::{CompareArgs, ModelParam, PredictArgs, RunArgs, SweepArgs, SweepVariable};
use crate::error::CliError;
use crate::output::{summary, unique_dir, RunManifest};
use crate::records::{
    compare_row, energy_rows, group_rows, localization_rows, metrics_rows, predict_row, sweep_rows,
    write_csv, CompareRow, PredictRow, SweepRow,
};
use crate::settings::resolve;

pub const METRICS_CSV: &str = "metrics.csv";
pub const ENERGY_CSV: &str = "energy.csv";
pub const LOCALIZATION_CSV: &str = "localization.csv";
pub const GROUPS_CSV: &str = "groups.csv";
pub const COMPARE_CSV: &str = "compare.csv";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const SUMMARY_TXT: &str = "summary.txt";

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let config = resolve(args.sim.config.as_deref(), &args.sim.overrides())?;
    let sim = Simulation::new(config.clone(), args.strategy)?;
    let dir = unique_dir(
        &args.sim.out_dir,
        &format!("run-{}-seed{}", args.strategy, config.seed),
    )?;
    let mut manifest = RunManifest::new(
        "run",
        vec![args.strategy],
        vec![config.seed],
        config,
        dir.clone(),
    );
    manifest.write()?;

    let report = sim.run();
    write_csv(&dir.join(METRICS_CSV), &metrics_rows(&report))?;
    write_csv(&dir.join(ENERGY_CSV), &energy_rows(&report))?;
    write_csv(&dir.join(LOCALIZATION_CSV), &localization_rows(&report))?;
    if args.dump_groups {
        write_csv(&dir.join(GROUPS_CSV), &group_rows(&report.groups))?;
    }
    let text = summary(&report);
    write_text(&dir.join(SUMMARY_TXT), &text)?;
    manifest.finish()?;
    print!("{text}");
    println!("output            {}", dir.display());
    Ok(())
}

/// Runs every strategy for every seed; reports come back sorted by
/// (seed, strategy) whatever order the runs finish in.
pub fn replicate(base: &SimConfig, seeds: &[u64]) -> Result<Vec<MetricsReport>, CliError> {
    let jobs: Vec<(u64, Strategy)> = seeds
        .iter()
        .flat_map(|&s| Strategy::ALL.into_iter().map(move |st| (s, st)))
        .collect();
    let mut reports = jobs
        .par_iter()
        .map(|&(seed, strategy)| {
            let cfg = SimConfig {
                seed,
                ..base.clone()
            };
            Ok(Simulation::new(cfg, strategy)?.run())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    reports.sort_by_key(|r| (r.seed, r.strategy));
    for per_seed in reports.chunks(Strategy::ALL.len()) {
        let digest = per_seed[0].trajectory_digest;
        if per_seed.iter().any(|r| r.trajectory_digest != digest) {
            return Err(CliError::io(
                "compare",
                std::io::Error::other("strategies saw different trajectories"),
            ));
        }
    }
    Ok(reports)
}

fn seeds_or_default(seeds: &[u64], config: &SimConfig) -> Vec<u64> {
    let mut s = if seeds.is_empty() {
        vec![config.seed]
    } else {
        seeds.to_vec()
    };
    s.sort_unstable();
    s.dedup();
    s
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let config = resolve(args.sim.config.as_deref(), &args.sim.overrides())?;
    let seeds = seeds_or_default(&args.seeds, &config);
    // Fail on a bad topology before creating anything on disk.
    for &seed in &seeds {
        Simulation::new(
            SimConfig {
                seed,
                ..config.clone()
            },
            Strategy::Centralized,
        )?;
    }
    let dir = unique_dir(&args.sim.out_dir, &format!("compare-seed{}", seeds[0]))?;
    let mut manifest = RunManifest::new(
        "compare",
        Strategy::ALL.to_vec(),
        seeds.clone(),
        config.clone(),
        dir.clone(),
    );
    manifest.write()?;

    let reports = replicate(&config, &seeds)?;
    let rows: Vec<CompareRow> = reports.iter().map(compare_row).collect();
    write_csv(&dir.join(COMPARE_CSV), &rows)?;
    let text = compare_table(&rows);
    write_text(&dir.join(SUMMARY_TXT), &text)?;
    manifest.finish()?;
    print!("{text}");
    println!("output  {}", dir.display());
    Ok(())
}

pub fn compare_table(rows: &[CompareRow]) -> String {
    let mut out = format!(
        "{:>6} {:<14} {:>10} {:>10} {:>14} {:>14} {:>18}\n",
        "seed", "strategy", "sink", "t2t", "ref_life_s", "target_life_s", "digest"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>6} {:<14} {:>10} {:>10} {:>14.6e} {:>14.6e} {:>18}\n",
            r.seed,
            r.strategy.as_str(),
            r.sink_msgs,
            r.target_to_target_msgs,
            r.ref_battery_life_s,
            r.target_battery_life_s,
            r.trajectory_digest
        ));
    }
    out
}

/// Inclusive `START:END[:STEP]` grid.
pub fn parse_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad range `{spec}`, expected START:END[:STEP]"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (start, end, step) = match parts[..] {
        [a, b] => (a, b, 1.0),
        [a, b, s] => (a, b, s),
        _ => return Err(bad()),
    };
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !end.is_finite() {
        return Err(bad());
    }
    let mut grid = Vec::new();
    let mut i = 0.0;
    loop {
        let v = start + i * step;
        // Tolerate accumulated rounding at the upper end.
        if v > end + step * 1e-9 {
            break;
        }
        grid.push(v);
        i += 1.0;
    }
    Ok(grid)
}

fn apply_model_param(
    inputs: &mut AnalyticsInputs,
    param: ModelParam,
    v: f64,
) -> Result<(), CliError> {
    match param {
        ModelParam::R => inputs.r = v,
        ModelParam::M => inputs.m = v,
        ModelParam::L => inputs.l = v,
        ModelParam::F => inputs.f = v,
        ModelParam::H => inputs.h = v,
        ModelParam::Lf => inputs.l = v * inputs.f,
        ModelParam::Capacity => {
            if v < 0.0 || v.fract() != 0.0 || v > f64::from(u32::MAX) {
                return Err(CliError::Usage(format!(
                    "capacity must be a whole number, got {v}"
                )));
            }
            inputs.capacity = v as u32;
        }
    }
    Ok(())
}

pub fn predict_rows(args: &PredictArgs) -> Result<Vec<PredictRow>, CliError> {
    let mut base = AnalyticsInputs {
        r: args.r,
        m: args.m,
        l: args.l,
        f: args.f,
        h: args.h,
        tx_cost: args.tx_cost,
        rx_cost: args.rx_cost,
        capacity: args.capacity,
    };
    if let Some(lf) = args.lf {
        base.l = lf * base.f;
    }
    let points: Vec<(&str, f64, AnalyticsInputs)> = match (args.sweep, &args.range) {
        (Some(param), Some(range)) => {
            let grid = parse_range(range)?;
            if grid.is_empty() {
                return Err(CliError::Usage(format!("empty sweep grid `{range}`")));
            }
            grid.into_iter()
                .map(|v| {
                    let mut inputs = base;
                    apply_model_param(&mut inputs, param, v)?;
                    Ok((param.as_str(), v, inputs))
                })
                .collect::<Result<_, CliError>>()?
        }
        (None, Some(_)) => return Err(CliError::Usage("--range needs --sweep".into())),
        _ => vec![("-", 0.0, base)],
    };
    let mut rows = Vec::new();
    for (var, v, inputs) in points {
        for mode in [Mode::RealValued, Mode::SimulatedCeiling] {
            rows.push(predict_row(var, v, &cost_report(&inputs, mode)?));
        }
    }
    Ok(rows)
}

pub fn predict_table(rows: &[PredictRow]) -> String {
    let header = [
        "var", "value", "mode", "n1", "n2", "n3", "n4", "Ecn", "Edc", "Eimp", "Ecn_hop", "Edc_hop",
        "Eimp_hop",
    ];
    let mut cells: Vec<Vec<String>> = vec![header.iter().map(|h| h.to_string()).collect()];
    for r in rows {
        let setting = if r.variable == "-" {
            "-".to_owned()
        } else {
            fmt_num(r.setting)
        };
        let mut line = vec![r.variable.clone(), setting, r.mode.clone()];
        line.extend(
            [
                r.n1,
                r.n2,
                r.n3,
                r.n4,
                r.e_cn,
                r.e_dc,
                r.e_imp,
                r.e_cn_hop_exact,
                r.e_dc_hop_exact,
                r.e_imp_hop_exact,
            ]
            .into_iter()
            .map(fmt_num),
        );
        cells.push(line);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| cells.iter().map(|l| l[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for line in cells {
        let padded: Vec<String> = line
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, &w))| {
                if i < 3 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.4}")
    }
}

pub fn cmd_predict(args: &PredictArgs) -> Result<(), CliError> {
    let rows = predict_rows(args)?;
    print!("{}", predict_table(&rows));
    if let Some(path) = &args.csv {
        write_csv(path, &rows)?;
    }
    Ok(())
}

fn with_setting(base: &SimConfig, variable: SweepVariable, v: f64) -> Result<SimConfig, CliError> {
    let count = |v: f64| {
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(CliError::Usage(format!(
                "{} must be a whole number, got {v}",
                variable.as_str()
            )))
        }
    };
    let mut cfg = base.clone();
    match variable {
        SweepVariable::Targets => cfg.num_targets = count(v)?,
        SweepVariable::References => cfg.num_references = count(v)?,
        SweepVariable::Frequency => cfg.reporting_period_s = v,
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn sweep_grid(args: &SweepArgs) -> Result<Vec<f64>, CliError> {
    let grid = match &args.range {
        Some(range) => parse_range(range)?,
        None => args.values.clone(),
    };
    if grid.is_empty() {
        return Err(CliError::Usage("empty sweep grid".into()));
    }
    Ok(grid)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let base = resolve(args.sim.config.as_deref(), &args.sim.overrides())?;
    let grid = sweep_grid(args)?;
    let seeds = seeds_or_default(&args.seeds, &base);
    let configs = grid
        .iter()
        .map(|&v| with_setting(&base, args.variable, v).map(|c| (v, c)))
        .collect::<Result<Vec<_>, _>>()?;
    for (_, cfg) in &configs {
        Simulation::new(cfg.clone(), Strategy::Centralized)?;
    }
    let dir = unique_dir(
        &args.sim.out_dir,
        &format!("sweep-{}", args.variable.as_str()),
    )?;
    let mut manifest = RunManifest::new(
        "sweep",
        Strategy::ALL.to_vec(),
        seeds.clone(),
        base,
        dir.clone(),
    );
    manifest.write()?;

    let variable = args.variable.as_str();
    let mut rows = configs
        .par_iter()
        .map(|(v, cfg)| {
            Ok(replicate(cfg, &seeds)?
                .iter()
                .flat_map(|r| sweep_rows(variable, *v, r))
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, CliError>>()?
        .concat();
    sort_sweep(&mut rows);
    write_csv(&dir.join(SWEEP_CSV), &rows)?;
    manifest.finish()?;
    println!("{} rows  output  {}", rows.len(), dir.display());
    Ok(())
}

pub fn sort_sweep(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| {
        a.setting
            .total_cmp(&b.setting)
            .then(a.strategy.cmp(&b.strategy))
            .then(a.metric.cmp(&b.metric))
            .then(a.seed.cmp(&b.seed))
    });
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
