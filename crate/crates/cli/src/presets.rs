//! Canned experiment grids: empirical-size tables on the normal and
//! contaminated nulls, and power curves over coupling strength and
//! second-block width. Each preset writes one CSV per table or panel plus a
//! manifest into the output directory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use tracecrit::simulate::{
    csv_float, derive_seed, empirical_size, power_curve, SimConfig, SizePowerReport, Sweep,
    TruthModel,
};
use tracecrit::{Error, Method, Result};

use crate::args::SimulateArgs;
use crate::commands::{manifest, write_file};

const P1_GRID: [usize; 3] = [2, 6, 10];
const NARROW_P2: [usize; 2] = [10, 30];
const WIDE_P2: [usize; 3] = [100, 200, 500];
const THETAS: [f64; 2] = [0.5, 2.0];
const SHAPE: f64 = 3.0;
/// n = 50 degrees of freedom.
const SAMPLE_SIZE: usize = 51;
const COMPARED: [Method; 3] = [Method::Tn, Method::PermWilks, Method::PermC1];
const REFERENCE_BUDGET: usize = 100_000;

pub fn run(args: &SimulateArgs, seed: u64, started: Instant) -> Result<i32> {
    let reps = if args.full_budget {
        REFERENCE_BUDGET
    } else {
        args.reps
    };
    let (name, files) = if args.table1 {
        ("table1", run_table1(args, seed, reps)?)
    } else if args.table2 {
        ("table2", run_table2(args, seed, reps)?)
    } else if args.figure1 {
        ("figure1", run_figures(args, seed, reps, None)?)
    } else {
        ("figure2", run_figures(args, seed, reps, Some(&THETAS))?)
    };

    let config = json!({
        "preset": name,
        "replications": reps,
        "alpha": args.alpha,
        "permutations": args.permutations,
        "sample_size": SAMPLE_SIZE,
    });
    let manifest = manifest("simulate", seed, config, started);
    let manifest_path = args.out.join("manifest.json");
    write_file(
        &manifest_path,
        &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    let mut all_files = files;
    all_files.push(manifest_path);
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "manifest": manifest,
            "files": all_files,
        }))
        .expect("payload serializes")
    );
    Ok(0)
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).map_err(csv_error(path))?;
    for row in rows {
        writer.write_record(row).map_err(csv_error(path))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Csv {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    write_file(path, std::str::from_utf8(&bytes).expect("csv output is UTF-8"))
}

/// Shared trailing columns for one method cell:
/// rejections, replications, proportion, std_error, note.
fn cell_columns(report: &SizePowerReport) -> Vec<Vec<String>> {
    report
        .cells
        .iter()
        .map(|cell| {
            vec![
                cell.rejections
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| "NA".into()),
                cell.replications.to_string(),
                cell.proportion.map(csv_float).unwrap_or_else(|| "NA".into()),
                cell.std_error.map(csv_float).unwrap_or_else(|| "NA".into()),
                cell.unavailable.clone().unwrap_or_default(),
            ]
            .into_iter()
            .collect()
        })
        .collect()
}

fn size_config(
    model: TruthModel,
    methods: Vec<Method>,
    reps: usize,
    args: &SimulateArgs,
    cell_seed: u64,
) -> SimConfig {
    SimConfig {
        model,
        sample_size: SAMPLE_SIZE,
        replications: reps,
        alpha: args.alpha,
        seed: cell_seed,
        methods,
        permutations: args.permutations,
    }
}

fn run_table1(args: &SimulateArgs, seed: u64, reps: usize) -> Result<Vec<PathBuf>> {
    let mut rows = Vec::new();
    for p1 in P1_GRID {
        for (p2, methods) in NARROW_P2
            .iter()
            .map(|&p2| (p2, COMPARED.to_vec()))
            .chain(WIDE_P2.iter().map(|&p2| (p2, vec![Method::Tn])))
        {
            let model = TruthModel::null_identity(p1, p2)?;
            let config = size_config(
                model,
                methods,
                reps,
                args,
                derive_seed(seed, p1 as u64, p2 as u64),
            );
            let report = empirical_size(&config)?;
            for (cell, tail) in report.cells.iter().zip(cell_columns(&report)) {
                let mut row = vec![
                    p1.to_string(),
                    p2.to_string(),
                    cell.method.name().into(),
                ];
                row.extend(tail);
                rows.push(row);
            }
        }
    }
    let path = args.out.join("table1.csv");
    write_csv(
        &path,
        &[
            "p1",
            "p2",
            "method",
            "rejections",
            "replications",
            "proportion",
            "std_error",
            "note",
        ],
        &rows,
    )?;
    Ok(vec![path])
}

fn run_table2(args: &SimulateArgs, seed: u64, reps: usize) -> Result<Vec<PathBuf>> {
    let mut rows = Vec::new();
    for &theta in &THETAS {
        for p1 in P1_GRID {
            for (p2, methods) in NARROW_P2
                .iter()
                .map(|&p2| (p2, COMPARED.to_vec()))
                .chain(WIDE_P2.iter().map(|&p2| (p2, vec![Method::Tn])))
            {
                let model = TruthModel::contaminated(p1, p2, 0.0, theta, SHAPE)?;
                let config = size_config(
                    model,
                    methods,
                    reps,
                    args,
                    derive_seed(seed, theta.to_bits(), (p1 * 1000 + p2) as u64),
                );
                let report = empirical_size(&config)?;
                for (cell, tail) in report.cells.iter().zip(cell_columns(&report)) {
                    let mut row = vec![
                        format!("{theta}"),
                        p1.to_string(),
                        p2.to_string(),
                        cell.method.name().into(),
                    ];
                    row.extend(tail);
                    rows.push(row);
                }
            }
        }
    }
    let path = args.out.join("table2.csv");
    write_csv(
        &path,
        &[
            "theta",
            "p1",
            "p2",
            "method",
            "rejections",
            "replications",
            "proportion",
            "std_error",
            "note",
        ],
        &rows,
    )?;
    Ok(vec![path])
}

/// The two power panels: coupling sweep at (4, 30) and second-block-width
/// sweep at coupling 0.5; `thetas` adds gamma contamination per level.
fn run_figures(
    args: &SimulateArgs,
    seed: u64,
    reps: usize,
    thetas: Option<&[f64]>,
) -> Result<Vec<PathBuf>> {
    let gamma_grid: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
    let p2_grid: Vec<usize> = (1..=9).map(|i| 5 * i).collect();
    let mut files = Vec::new();
    let panels: Vec<(Option<f64>, &str)> = match thetas {
        None => vec![(None, "")],
        Some(ts) => ts
            .iter()
            .map(|&t| {
                (
                    Some(t),
                    if t == 0.5 { "_theta05" } else { "_theta2" },
                )
            })
            .collect(),
    };
    let stem = if thetas.is_none() { "figure1" } else { "figure2" };

    for (theta, suffix) in panels {
        let model = |p2: usize| -> Result<TruthModel> {
            match theta {
                None => TruthModel::mixture(4, p2, 0.5),
                Some(t) => TruthModel::contaminated(4, p2, 0.5, t, SHAPE),
            }
        };
        let theta_bits = theta.unwrap_or(0.0).to_bits();

        let gamma_reports = power_curve(
            &size_config(
                model(30)?,
                COMPARED.to_vec(),
                reps,
                args,
                derive_seed(seed, theta_bits, 1),
            ),
            &Sweep::Gamma(gamma_grid.clone()),
        )?;
        let path = args.out.join(format!("{stem}_gamma{suffix}.csv"));
        write_csv(&path, &figure_header(), &figure_rows(&gamma_reports))?;
        files.push(path);

        let p2_reports = power_curve(
            &size_config(
                model(5)?,
                COMPARED.to_vec(),
                reps,
                args,
                derive_seed(seed, theta_bits, 2),
            ),
            &Sweep::P2(p2_grid.clone()),
        )?;
        let path = args.out.join(format!("{stem}_p2{suffix}.csv"));
        write_csv(&path, &figure_header(), &figure_rows(&p2_reports))?;
        files.push(path);
    }
    Ok(files)
}

fn figure_header() -> [&'static str; 8] {
    [
        "gamma",
        "p2",
        "method",
        "rejections",
        "replications",
        "proportion",
        "std_error",
        "note",
    ]
}

fn figure_rows(reports: &[SizePowerReport]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for report in reports {
        // The echoed config carries the effective model at this grid point.
        let gamma = report.config.model.gamma();
        let p2 = report.config.model.p2();
        for (cell, tail) in report.cells.iter().zip(cell_columns(report)) {
            let mut row = vec![
                format!("{gamma}"),
                p2.to_string(),
                cell.method.name().into(),
            ];
            row.extend(tail);
            rows.push(row);
        }
    }
    rows
}
