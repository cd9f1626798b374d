use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use qmlab::checkers::{overall, CheckReport, Verdict};
use qmlab::grid::{parse_region, parse_regions, GridRegion};
use qmlab::measures::Fun;
use qmlab::scenario::{
    build_function, convergence_rows, decompose, parse_point, replay_run, RunKind, RunReport,
    Scenario,
};
use qmlab::value::ExtendedValue;
use qmlab::variations::{variation, Oracle, VariationKind, VariationResult};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact checks of signed and deficient topological measures on a dyadic grid.
#[derive(Parser)]
#[command(name = "qmlab", version)]
struct Cli {
    /// Seed for random probes (overrides the scenario).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Finest grid level used by variation searches.
    #[arg(long, global = true)]
    level_cap: Option<u32>,
    /// Largest candidate count for subset enumeration.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Write tab-separated convergence data here.
    #[arg(long, global = true)]
    emit_plot_data: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario's checks, or one suite on every function of it.
    Check {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// sdtm, stm, dtm, tm, classify, jordan, tau_smooth, solid_limits or additivity_equivalence.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Print the value of a function on each region.
    Eval {
        #[command(flatten)]
        target: Target,
    },
    /// Positive, negative and total variations on each region.
    Variations {
        #[command(flatten)]
        target: Target,
        /// auto, exhaustive, grouped, naive or bnb.
        #[arg(long, default_value = "auto")]
        oracle: String,
    },
    /// Split a signed topological measure into two topological measures.
    Decompose {
        /// Scenario JSON file holding the function.
        #[arg(long)]
        scenario: PathBuf,
        /// Function to decompose (defaults to the only or first one).
        #[arg(long = "fn")]
        function: Option<String>,
        /// Base point `x,y` with rational coordinates off the dyadic grid lines.
        #[arg(long)]
        point: String,
    },
    /// Replay every failing witness of an earlier `check` report.
    Witness {
        /// Scenario the report was produced from.
        #[arg(long)]
        scenario: PathBuf,
        /// Report written by `check`.
        input: PathBuf,
    },
}

#[derive(clap::Args)]
struct Target {
    /// Function: inline JSON, a JSON file, or a name from `--scenario`.
    #[arg(long = "fn")]
    function: String,
    /// Scenario whose functions `--fn` may name.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// File with one region per line.
    #[arg(long, conflicts_with = "region_text")]
    region: Option<PathBuf>,
    /// A single region given inline.
    #[arg(long)]
    region_text: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CheckOutput {
    version: String,
    seed: u64,
    verdict: Verdict,
    runs: Vec<RunReport>,
}

#[derive(Serialize)]
struct DecomposeOutput {
    version: String,
    #[serde(rename = "fn")]
    function: String,
    point: String,
    verdict: Verdict,
    reports: Vec<CheckReport>,
    samples: Vec<Sample>,
}

#[derive(Serialize)]
struct Sample {
    region: GridRegion,
    value: Option<ExtendedValue>,
    positive: Option<ExtendedValue>,
    negative: Option<ExtendedValue>,
}

#[derive(Serialize)]
struct VariationRow {
    region: GridRegion,
    plus: VariationResult,
    minus: VariationResult,
    total: VariationResult,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_scenario(path: &Path, cli: &Cli) -> Result<Scenario> {
    let mut s = Scenario::from_json(&read(path)?)?;
    if let Some(seed) = cli.seed {
        s.probe.random_seed = seed;
    }
    if let Some(cap) = cli.level_cap {
        s.config.level_cap = cap;
    }
    if let Some(budget) = cli.budget {
        s.config.budget = budget;
    }
    Ok(s)
}

fn resolve_function(target: &Target, cli: &Cli) -> Result<Fun> {
    let named: BTreeMap<String, Fun> = match &target.scenario {
        Some(p) => load_scenario(p, cli)?.functions,
        None => BTreeMap::new(),
    };
    let desc = target.function.trim();
    if let Some(f) = named.get(desc) {
        return Ok(f.clone());
    }
    let text = if desc.starts_with('{') { desc.to_string() } else { read(Path::new(desc))? };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| qmlab::Error::Parse {
        location: format!("--fn line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    Ok(build_function(&value, "--fn", &named)?)
}

fn regions(target: &Target) -> Result<Vec<GridRegion>> {
    match (&target.region, &target.region_text) {
        (Some(p), _) => Ok(parse_regions(&read(p)?, &p.display().to_string())?),
        (None, Some(line)) => Ok(vec![parse_region(line, "--region-text")?]),
        (None, None) => bail!("give --region or --region-text"),
    }
}

fn emit(cli: &Cli, json: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(json)? + "\n";
    match &cli.report {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn plot(cli: &Cli, rows: &[String]) -> Result<()> {
    if let Some(p) = &cli.emit_plot_data {
        let mut text = rows.join("\n");
        text.push('\n');
        fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(())
}

fn exit_for(v: Verdict) -> ExitCode {
    ExitCode::from(match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    })
}

fn check(cli: &Cli, scenario: &Path, suite: Option<&str>) -> Result<ExitCode> {
    let s = load_scenario(scenario, cli)?;
    let kind = suite.map(|k| k.parse::<RunKind>()).transpose()?;
    let runs = s.run_all(kind)?;
    let verdict = runs.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Pass);
    for r in &runs {
        let class = r.class.map(|c| format!(" as {c:?}")).unwrap_or_default();
        eprintln!("{} {:?} {}{class}", r.verdict, r.suite, r.function);
    }
    if cli.emit_plot_data.is_some() {
        let mut rows = vec!["fn\tregion\tm\tvalue".to_string()];
        for (name, f) in &s.functions {
            for (i, u) in s.probe.bounded_opens().iter().take(8).enumerate() {
                for (m, v) in convergence_rows(f, u, s.probe.refinement_depth)? {
                    rows.push(format!("{name}\t{i}\t{m}\t{v}"));
                }
            }
        }
        plot(cli, &rows)?;
    }
    emit(cli, &CheckOutput { version: VERSION.into(), seed: s.probe.random_seed, verdict, runs })?;
    Ok(exit_for(verdict))
}

fn eval(cli: &Cli, target: &Target) -> Result<ExitCode> {
    let f = resolve_function(target, cli)?;
    for r in regions(target)? {
        println!("{}", f.eval(&r)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn variations(cli: &Cli, target: &Target, oracle: &str) -> Result<ExitCode> {
    let f = resolve_function(target, cli)?;
    let mut cfg = qmlab::variations::VariationConfig::default().with_oracle(oracle.parse::<Oracle>()?);
    if let Some(cap) = cli.level_cap {
        cfg.level_cap = cap;
    }
    if let Some(budget) = cli.budget {
        cfg.budget = budget;
    }
    let mut out = Vec::new();
    let mut rows = vec!["region\tkind\tlevel\tvalue".to_string()];
    let mut settled = true;
    for (i, r) in regions(target)?.into_iter().enumerate() {
        let v = |k| variation(&f, k, &r, &cfg);
        let row = VariationRow {
            plus: v(VariationKind::Plus)?,
            minus: v(VariationKind::Minus)?,
            total: v(VariationKind::Total)?,
            region: r,
        };
        for (k, res) in [("plus", &row.plus), ("minus", &row.minus), ("total", &row.total)] {
            settled &= res.stabilized;
            for (level, value) in &res.trace {
                rows.push(format!("{i}\t{k}\t{level}\t{}/{}", value.numer(), value.denom()));
            }
        }
        out.push(row);
    }
    plot(cli, &rows)?;
    emit(cli, &out)?;
    Ok(exit_for(if settled { Verdict::Pass } else { Verdict::Inconclusive }))
}

fn decompose_cmd(cli: &Cli, scenario: &Path, function: Option<&str>, point: &str) -> Result<ExitCode> {
    let s = load_scenario(scenario, cli)?;
    let name = match function {
        Some(n) => n.to_string(),
        None => s.functions.keys().next().cloned().context("scenario has no functions")?,
    };
    let mu = s.function(&name)?;
    let p = parse_point(point)?;
    let d = decompose(mu, p, &s.probe, &s.config)?;
    let settle = |f: &Fun, r: &GridRegion| f.eval(r).ok();
    let samples = s
        .probe
        .regions()
        .into_iter()
        .take(16)
        .map(|r| Sample {
            value: settle(mu, &r),
            positive: settle(&d.positive, &r),
            negative: settle(&d.negative, &r),
            region: r,
        })
        .collect();
    let verdict = overall(&d.reports);
    emit(
        cli,
        &DecomposeOutput {
            version: VERSION.into(),
            function: name,
            point: p.to_string(),
            verdict,
            reports: d.reports,
            samples,
        },
    )?;
    Ok(exit_for(verdict))
}

fn witness(cli: &Cli, scenario: &Path, input: &Path) -> Result<ExitCode> {
    let s = load_scenario(scenario, cli)?;
    let report: CheckOutput = serde_json::from_str(&read(input)?).map_err(|e| qmlab::Error::Parse {
        location: format!("{} line {} column {}", input.display(), e.line(), e.column()),
        message: e.to_string(),
    })?;
    let mut all = true;
    for run in &report.runs {
        let f = s.function(&run.function)?;
        let ok = replay_run(run, f, &s.config)?;
        all &= ok;
        let failing = run.reports.iter().filter(|r| r.failed()).count();
        println!(
            "{} {:?} {}: {failing} failing checks, {}",
            if ok { "REPLAYED" } else { "MISMATCH" },
            run.suite,
            run.function,
            if ok { "all witnesses reproduce" } else { "a witness did not reproduce" }
        );
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Check { scenario, suite } => check(cli, scenario, suite.as_deref()),
        Command::Eval { target } => eval(cli, target),
        Command::Variations { target, oracle } => variations(cli, target, oracle),
        Command::Decompose { scenario, function, point } => {
            decompose_cmd(cli, scenario, function.as_deref(), point)
        }
        Command::Witness { scenario, input } => witness(cli, scenario, input),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let parse = matches!(
                e.downcast_ref::<qmlab::Error>(),
                Some(qmlab::Error::Parse { .. } | qmlab::Error::UnknownFunction(_))
            );
            ExitCode::from(if parse { 3 } else { 4 })
        }
    }
}
