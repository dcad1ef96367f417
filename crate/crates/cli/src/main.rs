//! `dsavoid`: simulate, sweep, verify and demo workflows.
//!
//! Exit codes: 0 success, 1 verification failure or unreached target,
//! 2 input error, 3 runtime error.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rayon::prelude::*;

use dsavoid_core::demo;
use dsavoid_core::integrator::{self, GridSpec, Outcome, Trajectory};
use dsavoid_core::scenario_io::{self, Scenario};
use dsavoid_core::verify::{self, Mutation, VerifyConfig};
use dsavoid_core::{Error, Method, Vec3};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "dsavoid", version, about = "Modulated dynamical-system obstacle avoidance in a bounded workspace")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory per start point and write a CSV for each.
    Simulate(Common),
    /// Sample the modulated field on a grid (`--set sweep.min=.. sweep.max=.. sweep.counts=..`).
    Sweep(Common),
    /// Run the seeded invariant suite.
    Verify(Common),
    /// Write and run the bundled demonstration scenes.
    Demo(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override a scenario or command key, e.g. `flow.sign_pref=opposite`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Post-step containment projection.
    #[arg(long, value_enum)]
    guard: Option<Toggle>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Validation { .. } | Error::InvalidStart(_) | Error::InvalidInput(_) => {
                Failure::input(e.to_string())
            }
            _ => Failure::runtime(e.to_string()),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(c) => simulate(c),
        Command::Sweep(c) => sweep(c),
        Command::Verify(c) => run_verify(c),
        Command::Demo(c) => run_demo(c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

type Overrides = Vec<(String, String)>;

/// Parses `--set KEY=VALUE` arguments.
fn parse_overrides(raw: &[String]) -> Result<Overrides, Failure> {
    raw.iter()
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Failure::input(format!("override `{kv}` is not KEY=VALUE")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

/// Separates keys under `prefix` (owned by the command) from scenario keys.
fn split_overrides(raw: &[String], prefix: &str) -> Result<(Overrides, Overrides), Failure> {
    let (own, scenario) = parse_overrides(raw)?.into_iter().partition(|(k, _)| k.starts_with(prefix));
    Ok((scenario, own))
}

fn load_scenario(c: &Common, mut overrides: Vec<(String, String)>) -> Result<(Scenario, String), Failure> {
    let path = c
        .scenario
        .as_ref()
        .ok_or_else(|| Failure::input("--scenario is required"))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read scenario {}: {e}", path.display())))?;
    if let Some(g) = c.guard {
        let value = match g {
            Toggle::On => "on",
            Toggle::Off => "off",
        };
        overrides.push(("integrator.guard".into(), value.into()));
    }
    let scenario = scenario_io::parse_scenario_with_overrides(&text, &overrides)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    for w in scenario.warnings() {
        warn!("{w}");
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    Ok((scenario, stem))
}

fn create_out_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::runtime(format!("cannot create {}: {e}", dir.display())))
}

fn write_csv(path: &Path, write: impl FnOnce(&mut BufWriter<fs::File>) -> dsavoid_core::Result<()>) -> Result<(), Failure> {
    let file = fs::File::create(path).map_err(|e| Failure::runtime(format!("cannot create {}: {e}", path.display())))?;
    let mut sink = BufWriter::new(file);
    write(&mut sink).map_err(|e| Failure::runtime(format!("writing {}: {e}", path.display())))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.9}"))
}

fn summary(label: &str, t: &Trajectory) -> String {
    let mut line = format!(
        "{label}: {} steps={} min_gamma_o={} max_gamma_w={:.9}",
        t.outcome.label(),
        t.stats.steps,
        fmt_opt(t.stats.min_gamma_o),
        t.stats.max_gamma_w
    );
    if let Outcome::Error { message, .. } = &t.outcome {
        line.push_str(&format!(" ({message})"));
    }
    line
}

/// 0 if every run reached its target, 3 on any runtime error, 1 otherwise.
fn outcome_code<'a>(runs: impl IntoIterator<Item = &'a Trajectory>) -> u8 {
    let mut code = 0;
    for t in runs {
        match t.outcome {
            Outcome::ReachedTarget => {}
            Outcome::MaxSteps => code = code.max(EXIT_FAIL),
            Outcome::Error { .. } => code = EXIT_RUNTIME,
        }
    }
    code
}

fn simulate(c: &Common) -> CmdResult {
    let (scenario, stem) = load_scenario(c, parse_overrides(&c.overrides)?)?;
    let field = scenario.field();
    let runs = scenario
        .starts
        .par_iter()
        .map(|s| integrator::simulate(&field, *s, &scenario.integrator))
        .collect::<dsavoid_core::Result<Vec<_>>>()?;

    create_out_dir(&c.out)?;
    let sign = scenario.flow.sign_pref.as_str();
    for (i, t) in runs.iter().enumerate() {
        let path = c.out.join(format!("{stem}_{sign}_{i}.csv"));
        write_csv(&path, |w| scenario_io::write_trajectory(t, w))?;
        println!("{} -> {}", summary(&format!("start {i}"), t), path.display());
    }
    Ok(outcome_code(&runs))
}

fn parse_triple(key: &str, value: &str) -> Result<[f64; 3], Failure> {
    let bad = || Failure::input(format!("{key}: expected (x, y, z), got `{value}`"));
    let inner = value
        .trim()
        .strip_prefix('(')
        .and_then(|v| v.strip_suffix(')'))
        .ok_or_else(bad)?;
    let parts: Vec<f64> = inner
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    parts.try_into().map_err(|_| bad())
}

fn grid_from(own: &[(String, String)]) -> Result<GridSpec, Failure> {
    let mut grid = GridSpec {
        min: Vec3::splat(-1.0),
        max: Vec3::splat(1.0),
        counts: [21, 21, 1],
    };
    for (k, v) in own {
        match k.as_str() {
            "sweep.min" => grid.min = Vec3::from_array(parse_triple(k, v)?),
            "sweep.max" => grid.max = Vec3::from_array(parse_triple(k, v)?),
            "sweep.counts" => {
                let t = parse_triple(k, v)?;
                if t.iter().any(|x| x.fract() != 0.0 || *x < 1.0) {
                    return Err(Failure::input(format!("{k}: counts must be positive integers")));
                }
                grid.counts = t.map(|x| x as usize);
            }
            _ => return Err(Failure::input(format!("unknown key `{k}`"))),
        }
    }
    grid.validate()?;
    Ok(grid)
}

fn sweep(c: &Common) -> CmdResult {
    let (overrides, own) = split_overrides(&c.overrides, "sweep.")?;
    let grid = grid_from(&own)?;
    let (scenario, stem) = load_scenario(c, overrides)?;
    let samples = integrator::sweep_field(&scenario.field(), &grid)?;
    create_out_dir(&c.out)?;
    let path = c
        .out
        .join(format!("{stem}_{}_field.csv", scenario.flow.sign_pref.as_str()));
    write_csv(&path, |w| scenario_io::write_field(&samples, w))?;
    let invalid = samples.iter().filter(|s| s.mode.is_none()).count();
    println!("{} points ({invalid} invalid) -> {}", samples.len(), path.display());
    Ok(0)
}

fn run_verify(c: &Common) -> CmdResult {
    let (rest, own) = split_overrides(&c.overrides, "verify.")?;
    if let Some((k, _)) = rest.first() {
        return Err(Failure::input(format!("unknown key `{k}` for verify")));
    }
    let mut cfg = VerifyConfig {
        seed: c.seed,
        ..VerifyConfig::default()
    };
    for (k, v) in &own {
        match k.as_str() {
            "verify.mutation" => cfg.mutation = v.parse::<Mutation>().map_err(Failure::input)?,
            "verify.scenarios" => {
                cfg.containment_scenarios = v
                    .parse()
                    .map_err(|_| Failure::input(format!("{k}: expected a non-negative integer")))?
            }
            _ => return Err(Failure::input(format!("unknown key `{k}`"))),
        }
    }
    let reports: Vec<_> = verify::CHECKS.par_iter().map(|(_, check)| check(&cfg)).collect();
    for r in &reports {
        println!("{r}");
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("verify: {passed}/{} checks passed (seed {})", reports.len(), cfg.seed);
    Ok(if passed == reports.len() { 0 } else { EXIT_FAIL })
}

fn run_demo(c: &Common) -> CmdResult {
    if !c.overrides.is_empty() {
        return Err(Failure::input("demo takes no overrides"));
    }
    create_out_dir(&c.out)?;
    let cases = demo::corpus();
    let runs = cases
        .par_iter()
        .map(|case| integrator::simulate(&case.scenario.field(), case.scenario.starts[0], &case.scenario.integrator))
        .collect::<dsavoid_core::Result<Vec<_>>>()?;

    let mut ok = true;
    for (case, t) in cases.iter().zip(&runs) {
        let scn = c.out.join(format!("{}.scn", case.name));
        fs::write(&scn, scenario_io::write_scenario(&case.scenario))
            .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", scn.display())))?;
        let csv = c.out.join(format!("{}.csv", case.name));
        write_csv(&csv, |w| scenario_io::write_trajectory(t, w))?;

        let left_workspace = t.stats.max_gamma_w > 1.0;
        let entered_obstacle = t.stats.min_gamma_o.is_some_and(|g| g < 1.0);
        let note = match (left_workspace, entered_obstacle) {
            (false, false) => "both constraints held",
            (true, false) => "left the workspace",
            (false, true) => "entered the obstacle",
            (true, true) => "left the workspace and entered the obstacle",
        };
        println!("{} [{}] -> {}", summary(case.name, t), note, csv.display());
        if case.scenario.flow.method == Method::Full {
            ok &= !left_workspace && !entered_obstacle;
        }
        if case.scenario.flow.method == Method::ObstacleOnly {
            ok &= left_workspace;
        }
        info!("{}: {}", case.name, case.summary);
    }

    // Direction pair: opposite turns about the axis through both centers.
    let fig6: Vec<_> = cases
        .iter()
        .zip(&runs)
        .filter(|(c, _)| c.name.starts_with("fig6"))
        .map(|(c, t)| {
            let ob = c.scenario.obstacle.expect("fig6 has an obstacle");
            let axis = ob.center - c.scenario.workspace.center;
            (c.name, t.winding_angle(c.scenario.workspace.center, axis))
        })
        .collect();
    for (name, w) in &fig6 {
        println!("{name}: winding {w:.6} rad");
    }
    if let [(_, a), (_, b)] = fig6[..] {
        ok &= a * b < 0.0;
    }

    // Field slices through the z = 0 plane for the direction pair.
    let grid = GridSpec {
        min: Vec3::new(-1.0, -1.0, 0.0),
        max: Vec3::new(1.0, 1.0, 0.0),
        counts: [41, 41, 1],
    };
    for case in cases.iter().filter(|c| c.name.starts_with("fig6")) {
        let samples = integrator::sweep_field(&case.scenario.field(), &grid)?;
        let path = c.out.join(format!("{}_field.csv", case.name));
        write_csv(&path, |w| scenario_io::write_field(&samples, w))?;
    }

    let code = outcome_code(&runs).max(if ok { 0 } else { EXIT_FAIL });
    Ok(code)
}
