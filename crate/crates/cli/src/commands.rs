//! Subcommand implementations: load inputs, call the library, and emit one
//! JSON object on stdout (plus report files for simulations).

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use tracecrit::pairwise::io::{load_edges_csv, load_grouped_csv, load_matrix_csv};
use tracecrit::pairwise::{f_score, screen_pairs};
use tracecrit::simulate::{
    empirical_size, power_curve, psi_moment_check, reports_to_csv, SimConfig, SizePowerReport,
    Sweep, TruthModel,
};
use tracecrit::{
    permutation_pvalue, test_tn, BlockSpec, Error, Method, PermutationPlan, Result,
};

use crate::args::{ModelKind, PairwiseArgs, PsiCheckArgs, SimulateArgs, SweepKind, TestArgs};
use crate::presets;

/// Resolve the seed: explicit flag (or TRACECRIT_SEED, which clap folds into
/// the flag) wins, otherwise 0.
pub fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or(0)
}

/// The run manifest embedded in every output: tool identity, the fully
/// resolved configuration, the seed, and wall-clock duration. Re-running the
/// same configuration and seed reproduces the outputs bit-identically
/// (except this duration field).
pub fn manifest(subcommand: &str, seed: u64, config: Value, started: Instant) -> Value {
    json!({
        "tool": "tracecrit",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "seed": seed,
        "config": config,
        "duration_ms": started.elapsed().as_millis() as u64,
    })
}

fn print_payload(payload: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(payload).expect("payload serializes")
    );
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn cmd_test(args: &TestArgs) -> Result<i32> {
    let started = Instant::now();
    let seed = resolve_seed(args.seed);
    let (data, _labels) = load_matrix_csv(&args.data)?;
    let columns = data.n_variables();
    if args.p1 >= columns {
        return Err(Error::InvalidBlockSpec(format!(
            "--p1 must leave at least one trailing column: p1 = {}, columns = {columns}",
            args.p1
        )));
    }
    let spec = BlockSpec::new(args.p1, columns - args.p1)?;
    let outcome = match args.method {
        Method::Tn => test_tn(&data, &spec, args.alpha)?,
        method => {
            let plan = PermutationPlan::new(args.permutations, seed)?;
            permutation_pvalue(&data, &spec, method.statistic(), args.alpha, &plan)?
        }
    };
    let config = json!({
        "data": args.data,
        "p1": spec.p1(),
        "p2": spec.p2(),
        "alpha": args.alpha,
        "method": args.method.name(),
        "permutations": args.permutations,
    });
    print_payload(&json!({
        "manifest": manifest("test", seed, config, started),
        "outcome": outcome,
    }));
    Ok(0)
}

fn build_model(args: &SimulateArgs) -> Result<TruthModel> {
    match args.model {
        ModelKind::Null => TruthModel::null_identity(args.p1, args.p2),
        ModelKind::Mixture => TruthModel::mixture(args.p1, args.p2, args.gamma),
        ModelKind::Contaminated => {
            TruthModel::contaminated(args.p1, args.p2, args.gamma, args.theta, args.shape_a)
        }
    }
}

fn parse_p2_grid(grid: &[f64]) -> Result<Vec<usize>> {
    grid.iter()
        .map(|&v| {
            if v.fract() == 0.0 && v >= 1.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidParameter {
                    name: "grid",
                    message: "second-block widths must be positive integers".into(),
                    value: format!("{v}"),
                })
            }
        })
        .collect()
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let started = Instant::now();
    let seed = resolve_seed(args.seed);
    std::fs::create_dir_all(&args.out).map_err(|source| Error::Io {
        path: args.out.display().to_string(),
        source,
    })?;

    if args.table1 || args.table2 || args.figure1 || args.figure2 {
        return presets::run(args, seed, started);
    }

    let config = if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config: SimConfig = serde_json::from_str(&text).map_err(|e| {
            Error::InvalidData(format!("config file {}: {e}", path.display()))
        })?;
        if let Some(explicit) = args.seed {
            config.seed = explicit;
        }
        config
    } else {
        SimConfig {
            model: build_model(args)?,
            sample_size: args.n + 1,
            replications: args.reps,
            alpha: args.alpha,
            seed,
            methods: args.methods.clone(),
            permutations: args.permutations,
        }
    };

    let sweep = match args.sweep {
        Some(SweepKind::Gamma) => Some(Sweep::Gamma(args.grid.clone())),
        Some(SweepKind::P2) => Some(Sweep::P2(parse_p2_grid(&args.grid)?)),
        None => None,
    };
    let reports: Vec<SizePowerReport> = match &sweep {
        Some(sweep) => power_curve(&config, sweep)?,
        // A single design point: size when the model is independent,
        // otherwise a one-point power evaluation at the model's coupling.
        None if config.model.is_null() => vec![empirical_size(&config)?],
        None => power_curve(&config, &Sweep::Gamma(vec![config.model.gamma()]))?,
    };

    let csv_path = args.out.join("report.csv");
    let json_path = args.out.join("report.json");
    let manifest_path = args.out.join("manifest.json");
    write_file(&csv_path, &reports_to_csv(&reports))?;
    write_file(
        &json_path,
        &serde_json::to_string_pretty(&reports).expect("reports serialize"),
    )?;
    let config_value = json!({
        "simulation": config,
        "sweep": sweep,
    });
    let manifest = manifest("simulate", config.seed, config_value, started);
    write_file(
        &manifest_path,
        &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    print_payload(&json!({
        "manifest": manifest,
        "files": [csv_path, json_path, manifest_path],
    }));
    Ok(0)
}

pub fn cmd_psi_check(args: &PsiCheckArgs) -> Result<i32> {
    let started = Instant::now();
    let seed = resolve_seed(args.seed);
    let report = psi_moment_check(args.n, args.reps, seed)?;
    let config = json!({ "n": args.n, "replications": args.reps });
    print_payload(&json!({
        "manifest": manifest("psi-check", seed, config, started),
        "report": &report,
    }));
    if report.all_pass {
        Ok(0)
    } else {
        eprintln!("psi-check: at least one moment fell outside its 3-standard-error band");
        Ok(1)
    }
}

pub fn cmd_pairwise(args: &PairwiseArgs) -> Result<i32> {
    let started = Instant::now();
    let seed = resolve_seed(args.seed);
    let dataset = load_grouped_csv(&args.data, &args.layout)?;
    let plan = PermutationPlan::new(args.permutations, seed)?;
    let screening = screen_pairs(&dataset, args.alpha, args.method, &plan)?;
    let score = match &args.truth {
        Some(path) => {
            let truth = load_edges_csv(path)?;
            Some(f_score(&screening.predicted, &truth, &dataset.all_pairs())?)
        }
        None => None,
    };
    let config = json!({
        "data": args.data,
        "layout": args.layout,
        "truth": args.truth,
        "alpha": args.alpha,
        "method": args.method.name(),
        "permutations": args.permutations,
    });
    print_payload(&json!({
        "manifest": manifest("pairwise", seed, config, started),
        "screening": &screening,
        "f_score": &score,
    }));
    match &score {
        Some(s) => eprintln!(
            "screened {} pairs: {} predicted; P={:.3}, R={:.3}, F={:.3}",
            screening.pair_count,
            screening.predicted.len(),
            s.precision,
            s.recall,
            s.f1
        ),
        None => eprintln!(
            "screened {} pairs: {} predicted",
            screening.pair_count,
            screening.predicted.len()
        ),
    }
    Ok(0)
}
