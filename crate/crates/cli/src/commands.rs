use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use knn_minimax::analysis::{
    default_probes, minimal_mass_ratio, minimal_mass_ratio_mc, solve_balance, AssumptionReport, MarginSample,
    McEstimate, RateQuery, Side, TailForm, TailSample, TailSpec, Verdict,
};
use knn_minimax::harness::{
    run_excess_risk, run_rates, run_table2, svg_loglog, with_threads, write_rates_csv, write_results_csv,
    write_table2_csv, DensityChoice, ExperimentConfig, ExperimentResult, ModelSpec, RatesConfig, Series,
    TABLE2_REPLICATIONS, TABLE2_SIZES, TABLE2_TEST_SIZE,
};
use knn_minimax::rng::RngStream;
use knn_minimax::rules::KSchedule;

use crate::args::*;
use crate::output::{emit, tidy};
use crate::CliError;

type Res<T> = std::result::Result<T, CliError>;

const DEFAULT_SEED: u64 = 1;
const THREADS_ENV: &str = "KNN_MINIMAX_THREADS";

pub fn run(cli: Cli) -> Res<()> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Rates(a) => rates(a),
        Command::Check(a) => check(a),
        Command::Solve(a) => solve(a),
    }
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Res<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))
}

fn threads(flag: Option<usize>, file: Option<usize>) -> Res<Option<usize>> {
    let chosen = match flag.or(file) {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) if !v.trim().is_empty() => Some(
                v.trim()
                    .parse()
                    .map_err(|_| CliError::config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?,
            ),
            _ => None,
        },
    };
    if chosen == Some(0) {
        return Err(CliError::config("--threads must be at least 1"));
    }
    Ok(chosen)
}

fn parse_model(flag: Option<String>, file: Option<Value>) -> Res<Option<ModelSpec>> {
    let parsed = match (flag, file) {
        (Some(text), _) => ModelSpec::parse(&text),
        (None, Some(Value::String(text))) => ModelSpec::parse(&text),
        (None, Some(v)) => ModelSpec::from_json(&v),
        (None, None) => return Ok(None),
    };
    parsed.map(Some).map_err(|e| CliError::config(format!("bad --model: {e}")))
}

fn pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Res<T> {
    with_threads(threads, f).map_err(|e| CliError::config(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> Res<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn simulate(a: SimulateArgs) -> Res<()> {
    let file: SimulateFile = load_config(a.common.config.as_deref())?;
    let table2 = a.table2 || file.table2.unwrap_or(false);
    let seed = a.common.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let reps = a.reps.or(file.reps).unwrap_or(TABLE2_REPLICATIONS);
    let n_test = a.n_test.or(file.n_test).unwrap_or(TABLE2_TEST_SIZE);
    let format = a.common.format.or(file.format).unwrap_or(Format::Csv);
    let out: Option<PathBuf> = a.common.out.or(file.out);
    let threads = threads(a.common.threads, file.threads)?;
    let sizes = a.n.or(file.n.map(NList::into_vec));
    let model = parse_model(a.model, file.model)?;
    if reps == 0 || n_test == 0 {
        return Err(CliError::config("--reps and --n-test must be at least 1"));
    }
    if table2 {
        if model.is_some() {
            return Err(CliError::config("--table2 runs fixed models; drop --model"));
        }
        let sizes = sizes.unwrap_or_else(|| TABLE2_SIZES.to_vec());
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(CliError::config("--n values must be positive"));
        }
        let cells = pool(threads, || run_table2(seed, reps, &sizes, n_test))??;
        let bytes = match format {
            Format::Csv => {
                let mut buf = Vec::new();
                write_table2_csv(&cells, &mut buf)?;
                buf
            }
            Format::Json => to_json(&cells)?,
            Format::Svg => {
                let mut series = Vec::new();
                for rule in ["standard", "sliced"] {
                    let mut rows: Vec<&str> = cells.iter().map(|c| c.row.as_str()).collect();
                    rows.dedup();
                    for row in rows {
                        let points = cells
                            .iter()
                            .filter(|c| c.row == row)
                            .map(|c| (c.n as f64, if rule == "standard" { c.standard } else { c.sliced }))
                            .collect();
                        series.push(Series { name: format!("{row} {rule}"), points });
                    }
                }
                svg_loglog(&series, "mean excess risk x100", "n", "excess x100").into_bytes()
            }
        };
        return Ok(emit(out.as_deref(), &bytes)?);
    }
    let model = model.ok_or_else(|| CliError::config("--model is required unless --table2 is given"))?;
    let sizes = sizes.ok_or_else(|| CliError::config("--n is required with --model"))?;
    let alpha = a.alpha.or(file.alpha).unwrap_or(1.0);
    let names = a
        .schedule
        .or(file.schedule.map(StrList::into_vec))
        .unwrap_or_else(|| vec!["standard".into()]);
    let schedules = names
        .iter()
        .map(|s| KSchedule::parse(s, alpha))
        .collect::<knn_minimax::Result<Vec<_>>>()
        .map_err(|e| CliError::config(e.to_string()))?;
    let density = match a.density.or(file.density).unwrap_or(DensityArg::Kde) {
        DensityArg::Analytic => DensityChoice::Analytic,
        DensityArg::Kde => DensityChoice::Kde,
    };
    let configs: Vec<ExperimentConfig> = sizes
        .iter()
        .map(|&n| ExperimentConfig {
            model: model.clone(),
            n_train: n,
            n_test,
            replications: reps,
            schedules: schedules.clone(),
            seed,
            density_source: density,
        })
        .collect();
    for c in &configs {
        c.validate().map_err(|e| CliError::config(e.to_string()))?;
    }
    let results = pool(threads, || {
        configs.iter().map(run_excess_risk).collect::<knn_minimax::Result<Vec<_>>>()
    })??;
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_results_csv(&results, &mut buf)?;
            buf
        }
        Format::Json => to_json(&json!({
            "model": model.to_json(),
            "results": results.iter().flat_map(summary).collect::<Vec<_>>(),
        }))?,
        Format::Svg => {
            let series = schedules
                .iter()
                .map(|s| Series {
                    name: s.label(),
                    points: results
                        .iter()
                        .filter_map(|r| r.schedule(s).map(|x| (r.n_train as f64, x.mean_excess)))
                        .collect(),
                })
                .collect::<Vec<_>>();
            svg_loglog(&series, &model.name(), "n", "mean excess risk").into_bytes()
        }
    };
    Ok(emit(out.as_deref(), &bytes)?)
}

fn summary(res: &ExperimentResult) -> Vec<Value> {
    res.schedules
        .iter()
        .map(|s| {
            json!({
                "model": res.model,
                "n": res.n_train,
                "n_test": res.n_test,
                "schedule": s.schedule.label(),
                "mean_excess": s.mean_excess,
                "se": s.std_error,
                "mean_risk": s.mean_risk,
                "bayes_risk": s.bayes_risk,
                "mean_excess_vs_empirical_bayes": s.mean_excess_vs_empirical_bayes,
                "se_vs_empirical_bayes": s.std_error_vs_empirical_bayes,
                "mean_margin_excess": s.mean_margin_excess,
                "se_margin_excess": s.std_error_margin_excess,
                "reps": s.replications,
                "seed": res.seed,
            })
        })
        .collect()
}

fn rates(a: RatesArgs) -> Res<()> {
    let file: RatesFile = load_config(a.common.config.as_deref())?;
    let mut config = RatesConfig::new(
        a.g.or(file.g).unwrap_or_else(|| vec![0.5, 1.0, 2.0, 4.0]),
        a.n.or(file.n.map(NList::into_vec))
            .unwrap_or_else(|| vec![100, 316, 1000, 3162, 10000]),
        a.reps.or(file.reps).unwrap_or(200),
        a.common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
    );
    if let Some(n_test) = a.n_test.or(file.n_test) {
        config.n_test = n_test;
    }
    if let Some(b) = a.b.or(file.b) {
        config.b = b;
    }
    if let Some(alpha) = a.alpha.or(file.alpha) {
        config.alpha = alpha;
    }
    config.validate().map_err(|e| CliError::config(e.to_string()))?;
    if config.replications == 0 || config.n_test == 0 || !(config.b > 0.0) || !(config.alpha > 0.0) {
        return Err(CliError::config("--reps, --n-test, --b and --alpha must be positive"));
    }
    let format = a.common.format.or(file.format).unwrap_or(Format::Csv);
    let out = a.common.out.or(file.out);
    let threads = threads(a.common.threads, file.threads)?;
    let curves = pool(threads, || run_rates(&config))??;
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_rates_csv(&curves, &mut buf)?;
            buf
        }
        Format::Json => to_json(&curves)?,
        Format::Svg => {
            let series: Vec<Series> = curves
                .iter()
                .map(|c| Series {
                    name: format!("g={} slope={:.3}", c.g, c.fit.slope),
                    points: c.points.iter().map(|p| (p.n as f64, p.mean_excess)).collect(),
                })
                .collect();
            svg_loglog(&series, "excess risk under power-law tails", "n", "mean excess risk").into_bytes()
        }
    };
    emit(out.as_deref(), &bytes)?;
    for c in &curves {
        eprintln!("g={} slope={:.4} predicted={:.4} r2={:.4}", c.g, c.fit.slope, c.predicted_slope, c.fit.r2);
    }
    Ok(())
}

fn parse_psi(text: &str, c: f64) -> Res<TailSpec> {
    let bad = || CliError::config(format!("bad --psi `{text}`: expected id, power:g or powerlog:g,r"));
    let text = text.trim().to_ascii_lowercase();
    let form = if text == "id" || text == "identity" {
        TailForm::Identity
    } else if let Some(g) = text.strip_prefix("power:") {
        TailForm::Power { g: g.trim().parse().map_err(|_| bad())? }
    } else if let Some(rest) = text.strip_prefix("powerlog:") {
        let (g, r) = rest.split_once(',').ok_or_else(bad)?;
        TailForm::PowerLog {
            g: g.trim().parse().map_err(|_| bad())?,
            r: r.trim().parse().map_err(|_| bad())?,
        }
    } else {
        return Err(bad());
    };
    let spec = TailSpec { form, c };
    spec.validate().map_err(|e| CliError::config(e.to_string()))?;
    Ok(spec)
}

fn verdict(pass: Option<bool>) -> Verdict {
    match pass {
        None => Verdict::Info,
        Some(true) => Verdict::Pass,
        Some(false) => Verdict::Fail,
    }
}

fn report(assumption: &str, parameters: Value, est: &McEstimate, pass: Option<bool>) -> AssumptionReport {
    AssumptionReport {
        assumption: assumption.into(),
        parameters,
        estimate: est.estimate,
        mc_se: Some(est.mc_se),
        verdict: verdict(pass),
    }
}

fn check(a: CheckArgs) -> Res<()> {
    let file: CheckFile = load_config(a.common.config.as_deref())?;
    let assumption = a
        .assumption
        .or(file.assumption)
        .ok_or_else(|| CliError::config("--assumption is required (tail, margin or mass)"))?;
    let model = parse_model(a.model, file.model)?.ok_or_else(|| CliError::config("--model is required"))?;
    let seed = a.common.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let samples = a.samples.or(file.samples).unwrap_or(1_000_000);
    let format = a.common.format.or(file.format).unwrap_or(Format::Json);
    let out = a.common.out.or(file.out);
    let threads = threads(a.common.threads, file.threads)?;
    let c = a.c.or(file.c);
    if samples == 0 {
        return Err(CliError::config("--samples must be at least 1"));
    }
    if format == Format::Svg {
        return Err(CliError::config("check writes json or csv"));
    }
    let stream = RngStream::new(seed, 0);
    let descriptor = model.to_json();
    let positive = |v: &[f64], flag: &str| -> Res<()> {
        if v.is_empty() || v.iter().any(|x| !(*x > 0.0)) {
            Err(CliError::config(format!("--{flag} values must be positive")))
        } else {
            Ok(())
        }
    };
    let reports: Vec<AssumptionReport> = match assumption {
        Assumption::Tail => {
            let eps = a.eps.or(file.eps).unwrap_or_else(|| vec![1e-4, 1e-3, 1e-2]);
            positive(&eps, "eps")?;
            let psi = match a.psi.or(file.psi) {
                Some(text) => Some(parse_psi(&text, c.unwrap_or(1.0))?),
                None => None,
            };
            let sample = pool(threads, || TailSample::draw(model.as_model(), samples, &stream))??;
            eps.iter()
                .map(|&e| {
                    let est = sample.fraction_below(e);
                    let pass = psi.map(|p| est.estimate <= p.psi(e) + 3.0 * est.mc_se);
                    let params = json!({"model": descriptor, "eps": e, "samples": samples, "seed": seed, "psi": psi});
                    report("tail", params, &est, pass)
                })
                .collect()
        }
        Assumption::Margin => {
            let ts = a.t.or(file.t).unwrap_or_else(|| vec![0.05, 0.1, 0.2]);
            positive(&ts, "t")?;
            let alpha = a.alpha.or(file.alpha).unwrap_or(1.0);
            let sample = pool(threads, || MarginSample::draw(model.as_model(), samples, &stream))??;
            ts.iter()
                .map(|&t| {
                    let est = sample.fraction_within(t);
                    let pass = c.map(|c| est.estimate <= c * t.powf(alpha) + 3.0 * est.mc_se);
                    let params = json!({"model": descriptor, "t": t, "alpha": alpha, "c": c, "samples": samples, "seed": seed});
                    report("margin", params, &est, pass)
                })
                .collect()
        }
        Assumption::Mass => {
            let deltas = a.delta.or(file.delta).unwrap_or_else(|| vec![0.01, 0.1]);
            positive(&deltas, "delta")?;
            let kappa = a.kappa.or(file.kappa);
            let law = model.as_model();
            let probes = default_probes(law, &stream);
            deltas
                .iter()
                .map(|&delta| {
                    let ratio = if law.dim() == 1 {
                        minimal_mass_ratio(law, delta, &probes)?
                    } else {
                        minimal_mass_ratio_mc(law, delta, &probes, samples, &RngStream::new(seed, 1))?
                    };
                    let pass = kappa.map(|k| ratio.ratio >= k);
                    let params = json!({"model": descriptor, "delta": delta, "kappa": kappa, "argmin": ratio.argmin, "seed": seed});
                    Ok(AssumptionReport {
                        assumption: "mass".into(),
                        parameters: params,
                        estimate: ratio.ratio,
                        mc_se: Some(ratio.mc_se),
                        verdict: verdict(pass),
                    })
                })
                .collect::<knn_minimax::Result<Vec<_>>>()?
        }
    };
    let bytes = match format {
        Format::Json if reports.len() == 1 => to_json(&reports[0])?,
        Format::Json => to_json(&reports)?,
        _ => {
            let mut text = String::from("assumption,threshold,estimate,mc_se,verdict\n");
            for r in &reports {
                let threshold = ["eps", "t", "delta"]
                    .iter()
                    .find_map(|k| r.parameters.get(*k).and_then(Value::as_f64))
                    .unwrap_or(f64::NAN);
                let verdict = serde_json::to_value(r.verdict).context("verdict")?;
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.assumption,
                    threshold,
                    r.estimate,
                    r.mc_se.unwrap_or(f64::NAN),
                    verdict.as_str().unwrap_or_default()
                ));
            }
            text.into_bytes()
        }
    };
    Ok(emit(out.as_deref(), &bytes)?)
}

fn solve(a: SolveArgs) -> Res<()> {
    let file: SolveFile = load_config(a.config.as_deref())?;
    let c = a.c.or(file.c).unwrap_or(1.0);
    let tail = parse_psi(&a.psi.or(file.psi).unwrap_or_else(|| "id".into()), c)?;
    let n = a.n.or(file.n).ok_or_else(|| CliError::config("--n is required"))?;
    let side = match a.side.or(file.side).unwrap_or(SideArg::Upper) {
        SideArg::Lower => Side::Lower,
        SideArg::Upper => Side::Upper,
    };
    let query = RateQuery {
        alpha: a.alpha.or(file.alpha).unwrap_or(1.0),
        d: a.d.or(file.d).unwrap_or(1),
        n,
        side,
    };
    if !(query.alpha > 0.0) || query.d == 0 || !(n >= 2.0) {
        return Err(CliError::config("need --alpha > 0, --d ≥ 1 and --n ≥ 2"));
    }
    let sol = solve_balance(&tail, &query)?;
    let scale_key = match side {
        Side::Upper => "nu",
        Side::Lower => "eps",
    };
    let text = if a.json || file.json.unwrap_or(false) {
        let mut v = json!({scale_key: sol.scale, "rate": sol.rate, "side": side, "psi": tail, "alpha": query.alpha, "d": query.d, "n": n});
        if let Some(k) = sol.k {
            v["k"] = json!(k);
        }
        String::from_utf8(to_json(&v)?).expect("utf-8")
    } else {
        let mut t = format!("{scale_key}={}\nrate={}\n", tidy(sol.scale), tidy(sol.rate));
        if let Some(k) = sol.k {
            t.push_str(&format!("k={k}\n"));
        }
        t
    };
    Ok(emit(None, text.as_bytes())?)
}
