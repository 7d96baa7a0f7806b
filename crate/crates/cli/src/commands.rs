//! The command implementations behind the CLI surface.

use std::fs;
use std::path::Path;

use serde_json::json;

use fmdiag_core::aha::{aha_minimize, AhaConfig, Dimension, SearchSpace};
use fmdiag_core::fmd::{fmd_decompose, FmdConfig};
use fmdiag_core::indicators::{mode_energy, simi, IndicatorConfig};
use fmdiag_core::pipeline::{
    self, diagnose as run_diagnosis, load_model, optimize_fmd_params, save_model, LabeledSignals,
    TrainConfig,
};
use fmdiag_core::sim::{noise_std_for_snr_db, simulate_bearing, simulate_fgn, BearingSimConfig};
use fmdiag_core::Signal;

use crate::io::{read_manifest, read_pipeline_signal, write_signal};
use crate::{
    print_report, resolve_seed, BenchArgs, BenchFunction, CliError, DecomposeArgs, DiagnoseArgs,
    EvalArgs, RunReport, SimKind, SimulateArgs, TrainArgs,
};

/// Model loading with the missing-file case reported as a usage problem
/// (exit 2) rather than a model problem (exit 4).
fn load_model_file(path: &Path) -> Result<fmdiag_core::pipeline::DiagnosisModel, CliError> {
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "cannot read {}: no such file",
            path.display()
        )));
    }
    Ok(load_model(path)?)
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed);
    match args.kind {
        SimKind::Bearing => {
            let mut cfg = BearingSimConfig {
                sample_rate: args.fs,
                duration: args.duration,
                fault_freq: args.fault_freq,
                resonance_freq: args.resonance_freq,
                damping: args.damping,
                slip_jitter: args.slip,
                impulse_amplitude: args.impulse_amp,
                shaft_freq: args.shaft_freq,
                shaft_amplitude: args.shaft_amp,
                noise_std: args.noise_std,
                seed,
            };
            if let Some(snr) = args.snr {
                cfg.noise_std = noise_std_for_snr_db(&cfg, snr)?;
            }
            let signal = simulate_bearing(&cfg)?;
            write_signal(&args.out, &signal)?;
            print_report(&RunReport {
                command: "simulate".into(),
                seed: Some(seed),
                config: json!({ "kind": "bearing", "bearing": cfg, "snr_db": args.snr }),
                outputs: json!({
                    "path": args.out,
                    "samples": signal.len(),
                    "sample_rate": signal.sample_rate(),
                }),
            });
        }
        SimKind::Fgn => {
            let n = (args.fs * args.duration).round() as usize;
            let raw = simulate_fgn(n, args.fgn_hurst, args.fgn_sigma, seed)?;
            // regenerate with the requested rate so the CSV header carries it
            let signal = Signal::new(raw.into_samples(), args.fs)?;
            write_signal(&args.out, &signal)?;
            print_report(&RunReport {
                command: "simulate".into(),
                seed: Some(seed),
                config: json!({
                    "kind": "fgn",
                    "hurst": args.fgn_hurst,
                    "sigma": args.fgn_sigma,
                    "samples": n,
                    "sample_rate": args.fs,
                }),
                outputs: json!({ "path": args.out, "samples": signal.len() }),
            });
        }
    }
    Ok(())
}

pub fn decompose(args: DecomposeArgs) -> Result<(), CliError> {
    let signal = read_pipeline_signal(&args.input)?;
    let indicator = IndicatorConfig::default();

    let mut opt_summary = serde_json::Value::Null;
    let mut seed = None;
    let (k, l) = if args.optimize {
        let s = resolve_seed(args.seed);
        seed = Some(s);
        // full K box: the plain decomposition has no selected-mode floor
        let cfg = TrainConfig {
            aha: AhaConfig {
                pop_size: args.pop,
                max_iter: args.iters,
                seed: s,
            },
            selected_modes: 3,
            weights: vec![1.0 / 3.0; 3],
            indicator,
            ..TrainConfig::default()
        };
        let search = optimize_fmd_params(&signal, &cfg)?;
        opt_summary = json!({
            "best_fitness": search.opt.best_fitness,
            "history": search.opt.history,
            "skipped": search.skipped,
        });
        (search.mode_count, search.filter_len)
    } else {
        let (k, l) = (args.k.unwrap(), args.l.unwrap());
        if !args.unsafe_params && (!(3..=8).contains(&k) || !(20..=50).contains(&l)) {
            return Err(CliError::Usage(format!(
                "K={k}, L={l} outside the standard domains K in [3,8], L in [20,50]; \
                 pass --unsafe to run anyway"
            )));
        }
        (k, l)
    };

    let fmd_cfg = FmdConfig {
        enforce_domain: !args.unsafe_params,
        ..FmdConfig::new(k, l)
    };
    let result = fmd_decompose(&signal, &fmd_cfg)?;

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let mut modes = Vec::with_capacity(result.modes.len());
    for (i, mode) in result.modes.iter().enumerate() {
        let path = args.out_dir.join(format!("mode_{:02}.csv", i + 1));
        write_signal(&path, &mode.samples)?;
        modes.push(json!({
            "index": i + 1,
            "path": path,
            "period_samples": mode.period,
            "correlated_kurtosis": mode.ck,
            "simi": simi(&mode.samples, &indicator)?,
            "energy": mode_energy(&mode.samples),
        }));
    }

    print_report(&RunReport {
        command: "decompose".into(),
        seed,
        config: json!({
            "input": args.input,
            "fmd": fmd_cfg,
            "optimized": args.optimize,
        }),
        outputs: json!({
            "modes": modes,
            "optimization": opt_summary,
            "cycles": result.cycles,
        }),
    });
    Ok(())
}

fn train_config(args: &TrainArgs, seed: u64) -> TrainConfig {
    let weights = args
        .weights
        .clone()
        .unwrap_or_else(|| vec![1.0 / args.selected_modes as f64; args.selected_modes]);
    TrainConfig {
        aha: AhaConfig {
            pop_size: args.pop,
            max_iter: args.iters,
            seed,
        },
        k_bounds: (args.k_min, args.k_max),
        l_bounds: (args.l_min, args.l_max),
        selected_modes: args.selected_modes,
        weights,
        init_filters: args.init_filters,
        fmd_max_iter: args.fmd_iters,
        ..TrainConfig::default()
    }
}

fn load_dataset(manifest_path: &Path) -> Result<Vec<LabeledSignals>, CliError> {
    let manifest = read_manifest(manifest_path)?;
    let mut dataset = Vec::with_capacity(manifest.len());
    for (label, files) in manifest {
        let mut signals = Vec::with_capacity(files.len());
        for file in files {
            signals.push(read_pipeline_signal(&file)?);
        }
        dataset.push(LabeledSignals { label, signals });
    }
    Ok(dataset)
}

pub fn train(args: TrainArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed);
    let cfg = train_config(&args, seed);
    let dataset = load_dataset(&args.manifest)?;
    let model = pipeline::train(&dataset, &cfg)?;
    save_model(&model, &args.out)?;

    let conditions: Vec<serde_json::Value> = model
        .conditions
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "mode_count": c.mode_count,
                "filter_len": c.filter_len,
                "simi": c.simi,
            })
        })
        .collect();
    print_report(&RunReport {
        command: "train".into(),
        seed: Some(seed),
        config: json!({ "manifest": args.manifest, "train": cfg }),
        outputs: json!({
            "model": args.out,
            "conditions": conditions,
            "global_stats": model.global_stats,
        }),
    });
    Ok(())
}

pub fn diagnose(args: DiagnoseArgs) -> Result<(), CliError> {
    let model = load_model_file(&args.model)?;
    let signal = read_pipeline_signal(&args.input)?;
    let result = run_diagnosis(&signal, &model)?;
    print_report(&RunReport {
        command: "diagnose".into(),
        seed: None,
        config: json!({ "model": args.model, "input": args.input }),
        outputs: json!({
            "label": result.label,
            "scores": result.scores,
            "tie": result.tie,
        }),
    });
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    // manifest problems are usage errors and take precedence over model ones
    let manifest = read_manifest(&args.manifest)?;
    let model = load_model_file(&args.model)?;

    let predicted_labels: Vec<String> = model.conditions.iter().map(|c| c.label.clone()).collect();
    let mut confusion = vec![vec![0usize; predicted_labels.len()]; manifest.len()];
    let mut correct = 0usize;
    let mut total = 0usize;

    for (row, (true_label, files)) in manifest.iter().enumerate() {
        for file in files {
            let signal = read_pipeline_signal(file)?;
            let d = run_diagnosis(&signal, &model)?;
            let col = predicted_labels
                .iter()
                .position(|l| *l == d.label)
                .expect("diagnosis label always comes from the model");
            confusion[row][col] += 1;
            total += 1;
            if d.label == *true_label {
                correct += 1;
            }
        }
    }

    // Confusion table, percentages per true-condition row.
    let width = predicted_labels
        .iter()
        .map(|l| l.len())
        .chain(manifest.iter().map(|(l, _)| l.len()))
        .max()
        .unwrap_or(8)
        .max(8);
    println!("accuracy (%) by true condition");
    print!("{:width$}", "");
    for label in &predicted_labels {
        print!("  {label:>width$}");
    }
    println!();
    let mut per_class = Vec::with_capacity(manifest.len());
    for (row, (true_label, files)) in manifest.iter().enumerate() {
        print!("{true_label:width$}");
        let n = files.len().max(1);
        for &count in &confusion[row] {
            let pct = 100.0 * count as f64 / n as f64;
            print!("  {pct:>width$.1}");
        }
        println!();
        let diag = predicted_labels
            .iter()
            .position(|l| l == true_label)
            .map(|col| confusion[row][col])
            .unwrap_or(0);
        per_class.push((true_label.clone(), 100.0 * diag as f64 / n as f64));
    }
    let overall = 100.0 * correct as f64 / total.max(1) as f64;
    println!("overall accuracy (%): {overall:.1}");
    println!();

    print_report(&RunReport {
        command: "eval".into(),
        seed: None,
        config: json!({ "model": args.model, "manifest": args.manifest }),
        outputs: json!({
            "predicted_labels": predicted_labels,
            "confusion_counts": confusion,
            "per_class_accuracy_pct": per_class,
            "overall_accuracy_pct": overall,
            "total": total,
            "correct": correct,
        }),
    });
    Ok(())
}

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
            .sum::<f64>()
}

pub fn bench_aha(args: BenchArgs) -> Result<(), CliError> {
    if args.dims == 0 {
        return Err(CliError::Usage("--dims must be at least 1".into()));
    }
    if args.seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let (objective, bound): (fn(&[f64]) -> f64, f64) = match args.function {
        BenchFunction::Sphere => (sphere, 5.0),
        BenchFunction::Rastrigin => (rastrigin, 5.12),
    };
    let space = SearchSpace::new(vec![Dimension::continuous(-bound, bound); args.dims])?;

    let mut csv = String::from("seed,iteration,best_fitness\n");
    let mut finals = Vec::with_capacity(args.seeds as usize);
    for seed in args.seed_start..args.seed_start + args.seeds {
        let cfg = AhaConfig {
            pop_size: args.pop,
            max_iter: args.iters,
            seed,
        };
        let result = aha_minimize(objective, &space, &cfg)?;
        for (iter, best) in result.history.iter().enumerate() {
            csv.push_str(&format!("{seed},{},{best}\n", iter + 1));
        }
        finals.push(result.best_fitness);
    }
    let median = {
        let mut sorted = finals.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = sorted.len() / 2;
        if sorted.len() % 2 == 0 {
            0.5 * (sorted[mid - 1] + sorted[mid])
        } else {
            sorted[mid]
        }
    };
    csv.push_str(&format!("median,{},{median}\n", args.iters));
    fs::write(&args.out, csv)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", args.out.display())))?;

    print_report(&RunReport {
        command: "bench-aha".into(),
        seed: Some(args.seed_start),
        config: json!({
            "function": match args.function {
                BenchFunction::Sphere => "sphere",
                BenchFunction::Rastrigin => "rastrigin",
            },
            "dims": args.dims,
            "iters": args.iters,
            "seeds": args.seeds,
            "seed_start": args.seed_start,
            "pop": args.pop,
            "box": [-bound, bound],
        }),
        outputs: json!({
            "path": args.out,
            "final_fitness": finals,
            "median_final_fitness": median,
        }),
    });
    Ok(())
}
