use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use porosity_core::muckenhoupt::{
    a1_constant, critical_alpha, A1Side, TripleFamily, TripleOptions,
};
use porosity_core::numeric::parse_real;
use porosity_core::porosity::{
    certify, doubling_witness, sweep, PorosityParams, ProbeOptions, Side, GAMMA_GRID_OCTAVES,
    SIGMA_FLOOR,
};
use porosity_core::verify::{
    catalog, preset, run_suite, write_summary_csv, NamedSet, Suite, SuiteConfig, SuiteResult,
    PRESET_NAMES,
};
use porosity_core::weights::WeightSpec;
use porosity_core::{Interval, SetDescription};
use rayon::prelude::*;
use serde_json::{json, Value};

mod output;

use output::{Format, Writer};

/// Porosity, weights and A1 constants for closed null subsets of the line.
#[derive(Parser, Debug)]
#[command(name = "porosity", version)]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, env = "POROSITY_WORKERS", global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a porosity condition on the probe family, or sweep for one.
    Analyze {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        probes: ProbeArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// right, left or two_sided
        #[arg(long, default_value = "right", value_parser = parse_side)]
        side: Side,
        /// Pore fraction; with --gamma, checks this pair instead of sweeping.
        #[arg(long, value_parser = real, requires = "gamma", allow_hyphen_values = true)]
        sigma: Option<f64>,
        #[arg(long, value_parser = real, requires = "sigma", allow_hyphen_values = true)]
        gamma: Option<f64>,
    },
    /// Lower bound for the A1 constant of the distance weight.
    A1 {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        triples: TripleArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, value_parser = real)]
        alpha: f64,
        /// plus, minus or two_sided
        #[arg(long, default_value = "plus", value_parser = parse_a1_side)]
        side: A1Side,
    },
    /// Largest exponent whose sampled A1 constants stay bounded.
    CriticalAlpha {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        triples: TripleArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value = "plus", value_parser = parse_a1_side)]
        side: A1Side,
        #[arg(long, default_value = "2^-6", value_parser = real)]
        tolerance: f64,
    },
    /// Fitted upper Minkowski dimension inside the window.
    Dimension {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        probes: ProbeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run one verification suite, or `all`, on a set or on the whole catalog.
    Verify {
        /// Suite name or `all`.
        suite: String,
        /// Without --preset or --set-file, every catalog set is used.
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        probes: ProbeArgs,
        #[command(flatten)]
        triples: TripleArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// List the built-in sets.
    Presets,
}

#[derive(Args, Debug)]
struct SetArgs {
    /// Built-in set, e.g. `naturals` or `cantor(1/3,10)`.
    #[arg(long, conflicts_with = "set_file")]
    preset: Option<String>,
    /// JSON set description.
    #[arg(long)]
    set_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WindowArgs {
    #[arg(long, default_value = "-64", value_parser = real, allow_hyphen_values = true)]
    window_lo: f64,
    #[arg(long, default_value = "64", value_parser = real, allow_hyphen_values = true)]
    window_hi: f64,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// Dyadic lengths per anchor.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    octaves: u32,
    #[arg(long, default_value_t = 512)]
    anchor_cap: usize,
    #[arg(long, default_value_t = 1000)]
    random_count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct TripleArgs {
    /// Dyadic scales per anchor.
    #[arg(long, default_value_t = 61, value_parser = clap::value_parser!(u32).range(1..))]
    triple_scales: u32,
    #[arg(long, default_value_t = 48)]
    triple_anchors: usize,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, default_value = "porosity-out")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Leave out the generation time so that reruns are byte-identical.
    #[arg(long)]
    no_timestamp: bool,
}

fn real(text: &str) -> Result<f64, String> {
    parse_real(text).map_err(|e| e.to_string())
}

fn parse_side(text: &str) -> Result<Side, String> {
    text.parse()
        .map_err(|e: porosity_core::Error| e.to_string())
}

fn parse_a1_side(text: &str) -> Result<A1Side, String> {
    text.parse()
        .map_err(|e: porosity_core::Error| e.to_string())
}

/// A failed run: usage and configuration problems exit with 2.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

impl SetArgs {
    fn load(&self) -> Result<Option<NamedSet>, Failure> {
        if let Some(name) = &self.preset {
            return Ok(Some(preset(name)?));
        }
        let Some(path) = &self.set_file else {
            return Ok(None);
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Failure(format!("set file {}: {e}", path.display())))?;
        let set = SetDescription::from_json(&text)
            .map_err(|e| Failure(format!("set file {}: {e}", path.display())))?;
        let label = path
            .file_stem()
            .map_or("set".into(), |s| s.to_string_lossy().into_owned());
        Ok(Some(NamedSet::new(label, set)))
    }

    fn require(&self) -> Result<NamedSet, Failure> {
        self.load()?
            .ok_or_else(|| Failure("one of --preset or --set-file is required".into()))
    }
}

impl WindowArgs {
    fn interval(&self) -> Result<Interval, Failure> {
        Ok(Interval::new(self.window_lo, self.window_hi)?)
    }
}

impl ProbeArgs {
    fn options(&self) -> ProbeOptions {
        ProbeOptions {
            octaves: self.octaves,
            top_exponent: None,
            anchor_cap: self.anchor_cap,
            random_count: self.random_count,
            seed: self.seed,
        }
    }

    fn describe(&self) -> Value {
        json!({
            "octaves": self.octaves,
            "anchor_cap": self.anchor_cap,
            "random_count": self.random_count,
            "seed": self.seed,
        })
    }
}

impl TripleArgs {
    fn options(&self) -> TripleOptions {
        TripleOptions {
            scale_count: self.triple_scales,
            top_exponent: None,
            anchor_cap: self.triple_anchors,
        }
    }
}

impl OutputArgs {
    fn writer(&self, command: &str) -> Result<Writer, Failure> {
        Writer::new(&self.out_dir, command, self.format, !self.no_timestamp)
    }
}

fn window_value(i: &Interval) -> Value {
    json!([i.lo(), i.hi()])
}

fn set_value(named: &NamedSet) -> Value {
    json!({ "label": named.label, "description": named.set })
}

fn analyze(
    set: &SetArgs,
    window: &WindowArgs,
    probes: &ProbeArgs,
    out: &OutputArgs,
    side: Side,
    pair: Option<(f64, f64)>,
) -> Outcome {
    let named = set.require()?;
    let window = window.interval()?;
    let family =
        porosity_core::porosity::ProbeFamily::around(&named.set, &window, &probes.options())?;
    let swept = match pair {
        Some(_) => None,
        None => Some(sweep(&named.set, side, &family)?),
    };
    let params = match (pair, swept.as_ref().and_then(|s| s.best)) {
        (Some((sigma, gamma)), _) => PorosityParams::new(sigma, gamma, side)?,
        (None, Some(best)) => best,
        // Nothing certified: report the weakest pair of the sweep, whose
        // failure carries the witnesses.
        (None, None) => PorosityParams::new(SIGMA_FLOOR, 2f64.powi(-GAMMA_GRID_OCTAVES), side)?,
    };
    let report = certify(&named.set, &params, &family)?;
    let doubling = doubling_witness(&named.set, &family)?;

    let writer = out.writer("analyze")?;
    let config = json!({
        "set": set_value(&named),
        "window": window_value(&window),
        "probes": probes.describe(),
        "side": side.name(),
        "sigma": pair.map(|p| p.0),
        "gamma": pair.map(|p| p.1),
    });
    writer.json(
        "analyze",
        &config,
        &json!({ "certification": report, "doubling": doubling, "sweep": swept }),
    )?;
    writer.csv("analyze", |w| report.write_csv(w))?;

    println!("set        {}", named.label);
    println!("probes     {}", report.probe_count);
    println!(
        "condition  {} sigma = {} gamma = {}",
        side.name(),
        params.sigma,
        params.gamma
    );
    println!("worst      sigma {}", report.worst_sigma);
    if let Some(w) = report.witnesses.first() {
        println!("witness    {} (sigma {})", w.interval, w.sigma);
    }
    match (doubling.worst_outer, doubling.worst_inner) {
        (Some(o), Some(i)) => println!("doubling   {} from {o} over {i}", doubling.phi_estimate),
        _ => println!("doubling   {}", doubling.phi_estimate),
    }
    println!("result     {}", if report.pass { "pass" } else { "fail" });
    println!("written to {}", writer.dir().display());
    Ok(report.pass)
}

fn a1(
    set: &SetArgs,
    window: &WindowArgs,
    triples: &TripleArgs,
    out: &OutputArgs,
    alpha: f64,
    side: A1Side,
) -> Outcome {
    let named = set.require()?;
    let window = window.interval()?;
    let family = TripleFamily::around(&named.set, &window, &triples.options())?;
    let weight = WeightSpec::new(named.set.clone(), alpha)?;
    let report = a1_constant(&weight, side, &family)?;

    let writer = out.writer("a1")?;
    let config = json!({
        "set": set_value(&named),
        "window": window_value(&window),
        "alpha": alpha,
        "side": side.name(),
        "triple_scales": triples.triple_scales,
        "triple_anchors": triples.triple_anchors,
    });
    writer.json("a1", &config, &json!(report))?;
    writer.csv("a1", |w| report.write_csv(w))?;

    println!("set        {}", named.label);
    println!("triples    {}", report.triple_count);
    println!("constant   >= {}", report.constant_lower_bound);
    if let Some(m) = report.maximizer {
        println!("maximizer  ({}, {}, {})", m.a, m.b, m.c);
    }
    if let Some(w) = report.witnesses.last() {
        println!("witness    ({}, {}, {}) value {}", w.a, w.b, w.c, w.value);
    }
    println!(
        "result     {}",
        if report.diverging {
            "diverging"
        } else {
            "bounded"
        }
    );
    println!("written to {}", writer.dir().display());
    Ok(!report.diverging)
}

fn critical(
    set: &SetArgs,
    window: &WindowArgs,
    triples: &TripleArgs,
    out: &OutputArgs,
    side: A1Side,
    tolerance: f64,
) -> Outcome {
    let named = set.require()?;
    let window = window.interval()?;
    let family = TripleFamily::around(&named.set, &window, &triples.options())?;
    let result = critical_alpha(&named.set, side, &family, tolerance)?;

    let writer = out.writer("critical-alpha")?;
    let config = json!({
        "set": set_value(&named),
        "window": window_value(&window),
        "side": side.name(),
        "tolerance": tolerance,
        "triple_scales": triples.triple_scales,
        "triple_anchors": triples.triple_anchors,
    });
    writer.json("critical-alpha", &config, &json!(result))?;
    writer.csv("critical-alpha", |w| output::write_critical_csv(&result, w))?;

    println!("set        {}", named.label);
    match result.alpha {
        Some(a) => println!("critical   {a} (within {tolerance})"),
        None => println!("critical   none: diverges at the floor {}", result.floor),
    }
    println!("monotone   {}", result.monotone);
    println!("written to {}", writer.dir().display());
    Ok(result.monotone)
}

fn suite_config(
    window: &WindowArgs,
    probes: &ProbeArgs,
    triples: Option<&TripleArgs>,
) -> Result<SuiteConfig, Failure> {
    let mut config = SuiteConfig {
        window: window.interval()?,
        probes: probes.options(),
        ..SuiteConfig::default()
    };
    if let Some(t) = triples {
        config.triples = t.options();
    }
    Ok(config)
}

fn dimension(set: &SetArgs, window: &WindowArgs, probes: &ProbeArgs, out: &OutputArgs) -> Outcome {
    let named = set.require()?;
    let config = suite_config(window, probes, None)?;
    let result = run_suite(Suite::Dimension, &named, &config)?;

    let writer = out.writer("dimension")?;
    let settings = json!({
        "set": set_value(&named),
        "window": window_value(&config.window),
        "probes": probes.describe(),
    });
    writer.json("dimension", &settings, &json!(result))?;
    writer.csv("dimension", |w| {
        output::write_dimension_csv(&result.details, w)
    })?;

    println!("set        {}", named.label);
    for (key, value) in &result.constants {
        println!("{key:<10} {value}");
    }
    for note in &result.notes {
        println!("note       {note}");
    }
    println!("result     {}", if result.pass { "pass" } else { "fail" });
    println!("written to {}", writer.dir().display());
    Ok(result.pass)
}

fn verify(
    suite: &str,
    set: &SetArgs,
    window: &WindowArgs,
    probes: &ProbeArgs,
    triples: &TripleArgs,
    out: &OutputArgs,
) -> Outcome {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let sets = match set.load()? {
        Some(named) => vec![named],
        None => catalog(),
    };
    let config = suite_config(window, probes, Some(triples))?;
    let jobs: Vec<(&NamedSet, Suite)> = sets
        .iter()
        .flat_map(|s| suites.iter().map(move |&k| (s, k)))
        .collect();
    let results: Vec<SuiteResult> = jobs
        .par_iter()
        .map(|(s, k)| run_suite(*k, s, &config))
        .collect::<Result<_, _>>()?;

    let writer = out.writer("verify")?;
    let settings = json!({
        "window": window_value(&config.window),
        "probes": probes.describe(),
        "triple_scales": triples.triple_scales,
        "triple_anchors": triples.triple_anchors,
    });
    for r in &results {
        let name = format!("verify-{}-{}", output::slug(&r.set), r.suite.name());
        writer.json(&name, &settings, &json!(r))?;
    }
    writer.csv("summary", |w| write_summary_csv(&results, w))?;

    let width = sets.iter().map(|s| s.label.len()).max().unwrap_or(3).max(3);
    println!(
        "{:<width$}  {:<18}  {:>7}  result",
        "set", "suite", "checks"
    );
    for r in &results {
        let status = match (r.applicable, r.pass) {
            (false, _) => "n/a",
            (true, true) => "pass",
            (true, false) => "FAIL",
        };
        println!(
            "{:<width$}  {:<18}  {:>7}  {status}",
            r.set,
            r.suite.name(),
            r.checks
        );
        if let Some(f) = r.failures.first() {
            println!(
                "{:<width$}    first failure: {} {}",
                "",
                f.check,
                json!(f.values)
            );
        }
    }
    println!("written to {}", writer.dir().display());
    Ok(results.iter().all(|r| r.pass))
}

fn presets() -> Outcome {
    for (name, about) in PRESET_NAMES {
        println!("{name:<32} {about}");
    }
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure(format!("worker pool: {e}")))?;
    }
    match &cli.command {
        Command::Analyze {
            set,
            window,
            probes,
            out,
            side,
            sigma,
            gamma,
        } => analyze(set, window, probes, out, *side, sigma.zip(*gamma)),
        Command::A1 {
            set,
            window,
            triples,
            out,
            alpha,
            side,
        } => a1(set, window, triples, out, *alpha, *side),
        Command::CriticalAlpha {
            set,
            window,
            triples,
            out,
            side,
            tolerance,
        } => critical(set, window, triples, out, *side, *tolerance),
        Command::Dimension {
            set,
            window,
            probes,
            out,
        } => dimension(set, window, probes, out),
        Command::Verify {
            suite,
            set,
            window,
            probes,
            triples,
            out,
        } => verify(suite, set, window, probes, triples, out),
        Command::Presets => presets(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
