//! Subcommand implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use dpp::{
    exact_map_bruteforce, greedy_map, mmr_select, sampled_map, BudgetSpec, ConditionalModel,
    Instance, SamplerState, SelectionResult, SelectionStatus, SymmetricKernel, TrainConfig,
};
use sumpipe::{
    assemble_summary, begin_text, compile_instance, compile_with_oracle, fit_bins, ngram_score,
    oracle_summary, Cluster, ModelFile, TrainStatus, DEFAULT_BUDGET, DEFAULT_RHO,
};

use crate::config::FileConfig;
use crate::{
    BaselineBeginArgs, BaselineMmrArgs, CliError, DiagKind, DiagSliceArgs, DiagTableArgs, EvalArgs,
    FeaturesArgs, MapArgs, Metric, MmrArgs, OracleArgs, SampleArgs, ScoreArgs, SummarizeArgs,
    SummarizeMethod, TrainArgs,
};

type CliResult = Result<(), CliError>;

pub fn train(args: TrainArgs, cfg: &FileConfig) -> CliResult {
    let sigma2 = cfg.resolve(args.sigma2, "sigma2", 1.0)?;
    let rho = cfg.resolve(args.rho, "rho", DEFAULT_RHO)?;
    let tol = cfg.resolve(args.tol, "tol", 1e-6)?;
    let max_iter = cfg.resolve(args.max_iter, "max_iter", 500)?;
    let plain_gd = cfg.resolve_flag(args.plain_gd, "plain_gd")?;
    let budget = cfg.resolve(args.budget, "budget", DEFAULT_BUDGET)?;
    if !(sigma2 > 0.0) {
        return Err(CliError::Usage(format!(
            "sigma2 must be positive, got {sigma2}"
        )));
    }
    if !(rho >= 0.0) {
        return Err(CliError::Usage(format!(
            "rho must be non-negative, got {rho}"
        )));
    }

    let clusters = Cluster::ingest_corpus(&args.corpus)?;
    let feature_config = fit_bins(&clusters, rho)?;
    let instances: Vec<Instance> = clusters
        .par_iter()
        .map(|c| compile_with_oracle(c, &feature_config, budget))
        .collect::<Result<_, _>>()?;

    let outcome = dpp::train(
        &instances,
        &TrainConfig {
            sigma2,
            tol,
            max_iter,
            plain_gd,
        },
    )?;

    let model_file = ModelFile::new(
        outcome.model.theta.clone(),
        sigma2,
        &feature_config,
        TrainStatus {
            converged: outcome.converged,
            iterations: outcome.iterations,
            grad_inf_norm: outcome.grad_inf_norm,
        },
    );
    model_file.save(&args.out)?;

    println!(
        "trained on {} clusters: converged={} iterations={} grad_inf_norm={:e} objective={:e}",
        clusters.len(),
        outcome.converged,
        outcome.iterations,
        outcome.grad_inf_norm,
        outcome.value
    );
    Ok(())
}

pub fn summarize(args: SummarizeArgs, cfg: &FileConfig) -> CliResult {
    let budget = cfg.resolve(args.budget, "budget", DEFAULT_BUDGET)?;
    let seed = cfg.resolve(args.seed, "seed", 0u64)?;
    let samples = cfg.resolve(args.samples, "samples", 100_000usize)?;

    let model_file = ModelFile::load(&args.model)?;
    let config = model_file.feature_config();
    let cluster = Cluster::ingest(&args.cluster)?;
    let instance = compile_instance(&cluster, &config, None)?;
    let model = model_file.conditional_model()?;
    let kernel = model.conditional_kernel(&instance)?;
    let costs = instance.costs();

    let selection = match args.method {
        SummarizeMethod::Greedy => {
            let spec = BudgetSpec::new(costs, budget as f64).map_err(CliError::from)?;
            greedy_map(&kernel, &spec, args.mode.into())?
        }
        SummarizeMethod::Sampled => {
            let (lo, hi) = match &args.window {
                Some(w) => parse_window(w)?,
                None => (0.0, budget as f64),
            };
            let mut state = SamplerState::new(&kernel, seed)?;
            let result = sampled_map(&kernel, &mut state, &costs, lo, hi, samples)?;
            if result.status == SelectionStatus::WindowEmpty {
                return Err(CliError::Inference(format!(
                    "no sample of {samples} fell inside the cost window [{lo}, {hi}]; widen it"
                )));
            }
            result
        }
    };

    emit(
        &assemble_summary(&cluster, &selection.chosen, budget),
        args.out.as_deref(),
    )
}

pub fn baseline_mmr(args: BaselineMmrArgs, cfg: &FileConfig) -> CliResult {
    let lambda = cfg.resolve(args.lambda, "lambda", 0.5)?;
    let budget = cfg.resolve(args.budget, "budget", DEFAULT_BUDGET)?;

    let model_file = ModelFile::load(&args.model)?;
    let config = model_file.feature_config();
    let cluster = Cluster::ingest(&args.cluster)?;
    let instance = compile_instance(&cluster, &config, None)?;
    let model = model_file.conditional_model()?;

    let quality = instance_quality(&model, &instance)?;
    let similarity = instance_similarity(&instance)?;
    let spec = BudgetSpec::new(instance.costs(), budget as f64).map_err(CliError::from)?;
    let selection = mmr_select(&quality, &similarity, lambda, &spec)?;

    emit(
        &assemble_summary(&cluster, &selection.chosen, budget),
        args.out.as_deref(),
    )
}

pub fn baseline_begin(args: BaselineBeginArgs, cfg: &FileConfig) -> CliResult {
    let budget = cfg.resolve(args.budget, "budget", DEFAULT_BUDGET)?;
    let cluster = Cluster::ingest(&args.cluster)?;
    emit(&begin_text(&cluster, budget), args.out.as_deref())
}

pub fn eval(args: EvalArgs) -> CliResult {
    let clusters = Cluster::ingest_corpus(&args.corpus)?;
    let rows: Vec<(String, [f64; 6])> = clusters
        .par_iter()
        .map(|cluster| -> Result<(String, [f64; 6]), CliError> {
            if cluster.references.is_empty() {
                return Err(CliError::Format(format!(
                    "cluster `{}` has no reference summaries",
                    cluster.id
                )));
            }
            let path = args.summaries.join(format!("{}.txt", cluster.id));
            let candidate = std::fs::read_to_string(&path)?;
            let r1 = ngram_score(&candidate, &cluster.references, 1)?;
            let r2 = ngram_score(&candidate, &cluster.references, 2)?;
            Ok((
                cluster.id.clone(),
                [
                    r1.precision,
                    r1.recall,
                    r1.f_measure,
                    r2.precision,
                    r2.recall,
                    r2.f_measure,
                ],
            ))
        })
        .collect::<Result<_, _>>()?;

    println!("cluster\tr1p\tr1r\tr1f\tr2p\tr2r\tr2f");
    let mut totals = [0.0f64; 6];
    for (id, row) in &rows {
        println!(
            "{id}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            row[0], row[1], row[2], row[3], row[4], row[5]
        );
        for (t, v) in totals.iter_mut().zip(row) {
            *t += v;
        }
    }
    let n = rows.len() as f64;
    println!(
        "mean\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
        totals[0] / n,
        totals[1] / n,
        totals[2] / n,
        totals[3] / n,
        totals[4] / n,
        totals[5] / n
    );
    Ok(())
}

pub fn sample(args: SampleArgs, cfg: &FileConfig) -> CliResult {
    let seed = cfg.resolve(args.seed, "seed", 0u64)?;
    let count = cfg.resolve(args.count, "count", 1usize)?;
    let kernel = SymmetricKernel::load(&args.kernel)?;
    let mut state = SamplerState::new(&kernel, seed)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for _ in 0..count {
        writeln!(out, "{}", state.sample()?)?;
    }
    Ok(())
}

pub fn map(args: MapArgs, cfg: &FileConfig) -> CliResult {
    let budget = cfg.resolve(args.budget, "budget", f64::NAN)?;
    if budget.is_nan() {
        return Err(CliError::Usage("--budget is required".into()));
    }
    let kernel = SymmetricKernel::load(&args.kernel)?;
    let costs = load_costs(&args.costs, kernel.n())?;
    let spec = BudgetSpec::new(costs, budget).map_err(CliError::from)?;
    let greedy = greedy_map(&kernel, &spec, args.mode.into())?;
    print_selection("", &greedy);
    if args.oracle {
        let exact = exact_map_bruteforce(&kernel, &spec)?;
        print_selection("oracle_", &exact);
        println!(
            "probability_ratio: {:e}",
            (greedy.unnorm_log_det - exact.unnorm_log_det).exp()
        );
    }
    Ok(())
}

pub fn mmr(args: MmrArgs, cfg: &FileConfig) -> CliResult {
    let budget = cfg.resolve(args.budget, "budget", f64::NAN)?;
    if budget.is_nan() {
        return Err(CliError::Usage("--budget is required".into()));
    }
    let lambda = cfg.resolve(args.lambda, "lambda", 0.5)?;
    let kernel = SymmetricKernel::load(&args.kernel)?;
    let costs = load_costs(&args.costs, kernel.n())?;
    let quality: Vec<f64> = (0..kernel.n()).map(|i| kernel.get(i, i).sqrt()).collect();
    let similarity = kernel.similarity_of()?;
    let spec = BudgetSpec::new(costs, budget).map_err(CliError::from)?;
    let selection = mmr_select(&quality, &similarity, lambda, &spec)?;
    print_selection("", &selection);
    Ok(())
}

pub fn diag_slice(args: DiagSliceArgs, cfg: &FileConfig) -> CliResult {
    let tol = cfg.resolve(args.tol, "tol", dpp::mrf::SLICE_TOL)?;
    let kind = match args.kind {
        DiagKind::Mrf => dpp::mrf::SliceKind::Mrf,
        DiagKind::Dpp => dpp::mrf::SliceKind::Dpp,
    };
    let points = dpp::mrf::manifold_slice(kind, args.v111, args.res, tol)?;
    let mut body = String::new();
    for p in &points {
        body.push_str(&format!("{:e}\t{:e}\t{:e}\n", p[0], p[1], p[2]));
    }
    match args.out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    log::info!("emitted {} slice points", points.len());
    Ok(())
}

pub fn diag_table(args: DiagTableArgs) -> CliResult {
    let values = parse_six(&args.params)?;
    let table = match args.kind {
        DiagKind::Mrf => {
            let p = dpp::mrf::MrfParams::new(
                [values[0], values[1], values[2]],
                [values[3], values[4], values[5]],
            )?;
            dpp::mrf::mrf_factor_table(&p)
        }
        DiagKind::Dpp => {
            let p = dpp::mrf::DppParams3::new(
                [values[0], values[1], values[2]],
                [values[3], values[4], values[5]],
            )?;
            dpp::mrf::dpp_factor_table(&p)
        }
    };
    for config in 0..8 {
        println!("{config:03b}\t{:e}", table.values()[config]);
    }
    Ok(())
}

pub fn features(args: FeaturesArgs, cfg: &FileConfig) -> CliResult {
    if args.fit_bins {
        let rho = cfg.resolve(args.rho, "rho", DEFAULT_RHO)?;
        let sigma2 = cfg.resolve(None, "sigma2", 1.0)?;
        let clusters = Cluster::ingest_corpus(&args.corpus)?;
        let feature_config = fit_bins(&clusters, rho)?;
        let model_file = ModelFile::new(
            vec![0.0; sumpipe::FEATURE_DIM],
            sigma2,
            &feature_config,
            TrainStatus {
                converged: false,
                iterations: 0,
                grad_inf_norm: 0.0,
            },
        );
        model_file.save(&args.model)?;
        println!(
            "fitted bins and idf over {} clusters; wrote untrained model to {}",
            clusters.len(),
            args.model.display()
        );
        return Ok(());
    }

    let model_file = ModelFile::load(&args.model)?;
    let config = model_file.feature_config();
    let clusters = Cluster::ingest_corpus(&args.corpus)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for cluster in &clusters {
        let features = sumpipe::quality_features(cluster, &config)?;
        for (i, f) in features.iter().enumerate() {
            let row: Vec<String> = f.iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}\t{}\t{}", cluster.id, i, row.join("\t"))?;
        }
    }
    Ok(())
}

pub fn oracle(args: OracleArgs, cfg: &FileConfig) -> CliResult {
    let budget = cfg.resolve(args.budget, "budget", DEFAULT_BUDGET)?;
    let cluster = Cluster::ingest(&args.cluster)?;
    let subset = oracle_summary(&cluster, budget)?;
    println!("{subset}");
    Ok(())
}

pub fn score(args: ScoreArgs) -> CliResult {
    let candidate = std::fs::read_to_string(&args.summary)?;
    let mut references = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&args.refs)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .collect();
    entries.sort();
    for path in entries {
        if path.extension().is_some_and(|e| e == "txt") {
            references.push(std::fs::read_to_string(&path)?);
        }
    }
    if references.is_empty() {
        return Err(CliError::Format(format!(
            "no .txt references under {}",
            args.refs.display()
        )));
    }
    let n = match args.metric {
        Metric::Rouge1f => 1,
        Metric::Rouge2f => 2,
    };
    let s = ngram_score(&candidate, &references, n)?;
    println!("{:.6}", s.f_measure);
    Ok(())
}

fn parse_window(raw: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "window must be `lo,hi`, got `{raw}`"
        )));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad window bound `{}`", parts[0])))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad window bound `{}`", parts[1])))?;
    if lo > hi {
        return Err(CliError::Usage(format!("window lo {lo} exceeds hi {hi}")));
    }
    Ok((lo, hi))
}

fn parse_six(raw: &str) -> Result<[f64; 6], CliError> {
    let parts: Vec<f64> = raw
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            CliError::Usage(format!(
                "params must be six comma-separated numbers, got `{raw}`"
            ))
        })?;
    if parts.len() != 6 {
        return Err(CliError::Usage(format!(
            "params must have six values, got {}",
            parts.len()
        )));
    }
    Ok([parts[0], parts[1], parts[2], parts[3], parts[4], parts[5]])
}

fn load_costs(path: &Path, expected: usize) -> Result<Vec<f64>, CliError> {
    let body = std::fs::read_to_string(path)?;
    let costs: Vec<f64> = body
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Format(format!("cost file {}: {e}", path.display())))?;
    if costs.len() != expected {
        return Err(CliError::Format(format!(
            "cost file has {} entries, kernel has {expected} items",
            costs.len()
        )));
    }
    Ok(costs)
}

fn instance_quality(model: &ConditionalModel, instance: &Instance) -> Result<Vec<f64>, CliError> {
    instance
        .items()
        .iter()
        .map(|item| dpp::quality(&model.theta, &item.features).map_err(CliError::from))
        .collect()
}

/// Gram matrix of the unit similarity vectors; unit diagonal by construction.
fn instance_similarity(instance: &Instance) -> Result<SymmetricKernel, CliError> {
    let n = instance.n();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = instance.items()[i]
                .phi
                .iter()
                .zip(&instance.items()[j].phi)
                .map(|(a, b)| a * b)
                .sum();
            data[i * n + j] = dot;
            data[j * n + i] = dot;
        }
    }
    for i in 0..n {
        data[i * n + i] = 1.0;
    }
    SymmetricKernel::new(n, data).map_err(CliError::from)
}

fn print_selection(prefix: &str, r: &SelectionResult) {
    let order: Vec<String> = r.order.iter().map(ToString::to_string).collect();
    println!("{prefix}chosen: {}", r.chosen);
    println!("{prefix}order: {}", order.join(" "));
    println!("{prefix}total_cost: {}", r.total_cost);
    println!("{prefix}unnorm_log_det: {:e}", r.unnorm_log_det);
    println!("{prefix}status: {}", status_name(r.status));
}

fn status_name(status: SelectionStatus) -> &'static str {
    match status {
        SelectionStatus::Converged => "converged",
        SelectionStatus::BudgetExhausted => "budget-exhausted",
        SelectionStatus::GainStopped => "gain-stopped",
        SelectionStatus::WindowEmpty => "window-empty",
    }
}

fn emit(text: &str, out: Option<&Path>) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}
