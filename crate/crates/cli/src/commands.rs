use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use sdr_svm::data::{load_csv, read_csv, CsvOptions, Dataset};
use sdr_svm::eval::{cross_validate, evaluate as eval_model, CvPlan, CvResult, KernelFamily};
use sdr_svm::loss::l_d;
use sdr_svm::lp::dump::write_dump;
use sdr_svm::theory::{run_all, TheoryGrid, TheoryOptions};
use sdr_svm::trainer::{train_with_gram_observed, TrainConfig};
use sdr_svm::{kernel::gram_matrix, Error, KernelSpec, LossConfig, SavedModel};

use crate::{CsvArgs, CvArgs, EvaluateArgs, Failure, GridArgs, KernelArg, NoiseSweepArgs, PredictArgs, TheoryArgs, TrainArgs};

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// Configuration errors found before any data is read are usage errors.
fn flag_err(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn csv_options(a: &CsvArgs) -> CsvOptions {
    CsvOptions {
        has_header: a.header,
        label: a.label.parse().expect("infallible"),
        positive: a.positive.clone(),
    }
}

fn require_labels(a: &CsvArgs) -> Result<(), Failure> {
    if a.label.eq_ignore_ascii_case("none") {
        return usage("this subcommand needs labelled data; --label none is not allowed");
    }
    Ok(())
}

fn require_input(path: &Path) -> Result<(), Failure> {
    if !path.is_file() {
        return Err(Failure::Core(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{} does not exist", path.display()),
        ))));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        Failure::Core(Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
    })?))
}

fn kernel_spec(kind: KernelArg, gamma: Option<f64>) -> Result<KernelSpec, Failure> {
    match kind {
        KernelArg::Linear if gamma.is_some() => usage("--gamma only applies to --kernel gaussian"),
        KernelArg::Linear => Ok(KernelSpec::Linear),
        KernelArg::Gaussian => KernelSpec::gaussian(gamma.unwrap_or(1.0)).map_err(flag_err),
    }
}

pub fn train(a: TrainArgs) -> Result<(), Failure> {
    require_labels(&a.csv)?;
    let kernel = kernel_spec(a.kernel, a.gamma)?;
    let mut cfg = TrainConfig::new(a.lambda, LossConfig::new(a.d, a.mu).map_err(flag_err)?);
    cfg.epsilon = a.epsilon;
    cfg.max_dc_iters = a.max_iters;
    cfg.lp_iter_cap = a.lp_iter_cap;
    cfg.warm_start = !a.no_warm_start;
    cfg.validate().map_err(flag_err)?;
    let report_path = a.report.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".report.json");
        PathBuf::from(p)
    });
    if a.dump_lp.as_deref() == Some("") {
        return usage("--dump-lp needs a non-empty prefix");
    }
    require_input(&a.csv.data)?;

    let data = load_csv(&a.csv.data, &csv_options(&a.csv))?;
    log::info!("loaded {} rows with {} features", data.len(), data.dim());
    let gram = gram_matrix(&kernel, data.features.view())?;
    let mut dump = |iteration: usize, lp: &sdr_svm::lp::LpProblem| -> sdr_svm::Result<()> {
        if let Some(prefix) = &a.dump_lp {
            let path = format!("{prefix}{iteration:03}.lp");
            let mut w = BufWriter::new(File::create(&path)?);
            write_dump(lp, &mut w)?;
            w.flush()?;
        }
        Ok(())
    };
    let (params, report) = train_with_gram_observed(&gram, &data.labels, &cfg, &mut dump)?;
    let model = SavedModel::from_training(&params, &data, &kernel, &cfg)?;
    std::fs::write(&a.out, model.save())?;
    let mut w = create(&report_path)?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;

    println!(
        "iterations={} termination={:?} objective={} train_risk_d={} support_vectors={}/{} rho={}",
        report.iterations,
        report.termination,
        report.objective_trace.last().copied().unwrap_or(f64::NAN),
        report.train_risk_d,
        model.support_count(),
        data.len(),
        model.rho
    );
    Ok(())
}

fn load_model(path: &Path) -> Result<SavedModel, Failure> {
    require_input(path)?;
    Ok(SavedModel::load(&std::fs::read(path)?)?)
}

pub fn predict(a: PredictArgs) -> Result<(), Failure> {
    let model = load_model(&a.model)?;
    require_input(&a.csv.data)?;
    let raw = read_csv(&a.csv.data, &csv_options(&a.csv))?;
    let features = match &model.standardizer {
        Some(st) => st.transform(&raw.features)?,
        None => raw.features,
    };
    let scores = features
        .rows()
        .into_iter()
        .map(|r| model.decision_value(r.as_slice().expect("standard layout")))
        .collect::<sdr_svm::Result<Vec<f64>>>()?;

    let mut out: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    writeln!(out, "index,score,decision")?;
    for (i, &s) in scores.iter().enumerate() {
        writeln!(out, "{i},{s},{}", sdr_svm::Decision::from_score(s, model.rho))?;
    }
    out.flush()?;
    drop(out);

    if !raw.labels.is_empty() {
        let n = scores.len() as f64;
        let risk = scores
            .iter()
            .zip(&raw.labels)
            .map(|(&f, &y)| l_d(y * f, model.rho, &model.loss))
            .sum::<f64>()
            / n;
        let line = format!("risk_d={risk}");
        if a.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(())
}

pub fn evaluate(a: EvaluateArgs) -> Result<(), Failure> {
    require_labels(&a.csv)?;
    let model = load_model(&a.model)?;
    require_input(&a.csv.data)?;
    let raw = read_csv(&a.csv.data, &csv_options(&a.csv))?;
    let features = match &model.standardizer {
        Some(st) => st.transform(&raw.features)?,
        None => raw.features,
    };
    let data = Dataset::new(features, raw.labels)?;
    let m = eval_model(&model, &data)?;
    println!("n_test={}", m.n_test);
    println!("risk_d={}", m.empirical_risk_d);
    println!("rejection_rate={}", m.rejection_rate);
    println!("accuracy_unrejected={}", m.accuracy_unrejected);
    println!("all_rejected={}", m.all_rejected);
    println!("support_count={}", m.support_count);
    if let Some(p) = &a.out {
        let mut w = create(p)?;
        serde_json::to_writer_pretty(&mut w, &m).map_err(|e| Error::Io(e.into()))?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}

fn grid(spec: &str) -> Result<Vec<f64>, Failure> {
    crate::manifest::parse_grid(spec).map_err(Failure::Usage)
}

fn build_plan(g: &GridArgs, seed: u64) -> Result<CvPlan, Failure> {
    require_labels(&g.csv)?;
    let mut plan = CvPlan::new(g.folds, g.repeats, seed, grid(&g.d_grid)?);
    if let Some(s) = &g.lambda_grid {
        plan.lambda_grid = grid(s)?;
    }
    match g.kernel {
        KernelArg::Linear => {
            if g.gamma_grid.is_some() {
                return usage("--gamma-grid only applies to --kernel gaussian");
            }
            plan.family = KernelFamily::Linear;
            plan.gamma_grid.clear();
        }
        KernelArg::Gaussian => {
            if let Some(s) = &g.gamma_grid {
                plan.gamma_grid = grid(s)?;
            }
        }
    }
    plan.mu = g.mu;
    plan.epsilon = g.epsilon;
    plan.max_dc_iters = g.max_iters;
    Ok(plan)
}

fn print_best(res: &CvResult, plan: &CvPlan) {
    println!("d,lambda,gamma,risk_mean,risk_std,rejection_rate,accuracy_unrejected,support_count");
    for (d, best) in plan.d_grid.iter().zip(&res.best) {
        match best {
            Some(s) => println!(
                "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.2}",
                s.d,
                s.lambda,
                s.gamma.map(|g| g.to_string()).unwrap_or_default(),
                s.risk.mean,
                s.risk.std,
                s.rejection_rate.mean,
                s.accuracy_unrejected.mean,
                s.support_count.mean
            ),
            None => println!("{d},,,,,,,"),
        }
    }
    for s in &res.skipped {
        log::warn!("skipped repeat {} fold {}: {}", s.repeat, s.fold, s.reason);
    }
}

fn write_cv(res: &CvResult, metrics: &Path, summary: Option<&Path>) -> Result<(), Failure> {
    let mut w = create(metrics)?;
    res.write_metrics_csv(&mut w)?;
    w.flush()?;
    if let Some(p) = summary {
        let mut w = create(p)?;
        res.write_summary_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

pub fn cv(a: CvArgs, seed: u64) -> Result<(), Failure> {
    let mut plan = build_plan(&a.grid, seed)?;
    plan.noise_rate = a.noise;
    plan.validate().map_err(flag_err)?;
    require_input(&a.grid.csv.data)?;
    let data = load_csv(&a.grid.csv.data, &csv_options(&a.grid.csv))?;
    let res = cross_validate(&data, &plan)?;
    write_cv(&res, &a.out, a.summary.as_deref())?;
    print_best(&res, &plan);
    Ok(())
}

pub fn noise_sweep(a: NoiseSweepArgs, seed: u64) -> Result<(), Failure> {
    let base = build_plan(&a.grid, seed)?;
    let rates = grid(&a.rates)?;
    let mut plans = Vec::new();
    for &r in &rates {
        let mut p = base.clone();
        p.noise_rate = r;
        p.validate().map_err(flag_err)?;
        plans.push(p);
    }
    require_input(&a.grid.csv.data)?;
    let data = load_csv(&a.grid.csv.data, &csv_options(&a.grid.csv))?;
    std::fs::create_dir_all(&a.out_dir)?;
    for plan in &plans {
        let r = plan.noise_rate;
        log::info!("noise rate {r}");
        let res = cross_validate(&data, plan)?;
        write_cv(
            &res,
            &a.out_dir.join(format!("metrics_noise_{r}.csv")),
            Some(&a.out_dir.join(format!("summary_noise_{r}.csv"))),
        )?;
        println!("# noise={r}");
        print_best(&res, plan);
    }
    Ok(())
}

pub fn theory_check(a: TheoryArgs, seed: u64) -> Result<(), Failure> {
    let (grid, mut opts) = if a.quick {
        (
            TheoryGrid::coarse(),
            TheoryOptions {
                surrogate_points: 100_000,
                mc_trials: 5,
                mc_samples: 20_000,
                ..TheoryOptions::default()
            },
        )
    } else {
        (TheoryGrid::default(), TheoryOptions::default())
    };
    opts.seed = seed;
    let report = run_all(&grid, &opts)?;
    print!("{}", report.to_text());
    if let Some(p) = &a.out {
        let mut w = create(p)?;
        serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Error::Io(e.into()))?;
        writeln!(w)?;
        w.flush()?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::TheoryViolation)
    }
}
