use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use v3la::cli::config::{apply_settings, load_config};
use v3la::cli::scenario::worker_count;
use v3la::cli::verify::{checks_table, render, run_checks};
use v3la::cli::{preset, preset_names, presets, run_scenario, OutputTable, Scenario, ScenarioError};

/// Resonance fluorescence of a bichromatically driven V-type atom.
#[derive(Parser)]
#[command(name = "v3la", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run presets or config files. `all` runs every preset.
    Run {
        #[arg(required = true)]
        targets: Vec<String>,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
    /// List the presets.
    List,
    /// Run the identity suite.
    Verify {
        /// Write the result table as CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one parameter of a preset or config file.
    Sweep {
        target: String,
        /// Parameter to vary: gamma_w, omega_s, omega_w, delta_s, delta_w or phi.
        #[arg(long)]
        param: String,
        #[arg(long)]
        min: String,
        #[arg(long)]
        max: String,
        #[arg(long)]
        steps: String,
        /// variance_scan or noise_scan.
        #[arg(long, default_value = "noise_scan")]
        observable: String,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    gamma_w: Option<String>,
    #[arg(long)]
    omega_s: Option<String>,
    #[arg(long)]
    omega_w: Option<String>,
    #[arg(long)]
    delta_s: Option<String>,
    #[arg(long)]
    delta_w: Option<String>,
    /// strong, weak or both.
    #[arg(long)]
    transition: Option<String>,
    /// Quadrature angle in radians, or `pi/2` style.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long)]
    tau_max: Option<String>,
    #[arg(long)]
    n_tau: Option<String>,
    #[arg(long)]
    omega_max: Option<String>,
    #[arg(long)]
    n_omega: Option<String>,
    /// Any config key, as `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Add classical-inequality flags to `aic` tables.
    #[arg(long)]
    violations: bool,
}

impl Overrides {
    fn pairs(&self) -> Result<Vec<(String, String)>, ScenarioError> {
        let named = [
            ("gamma_w", &self.gamma_w),
            ("omega_s", &self.omega_s),
            ("omega_w", &self.omega_w),
            ("delta_s", &self.delta_s),
            ("delta_w", &self.delta_w),
            ("transition", &self.transition),
            ("phi", &self.phi),
            ("tau_max", &self.tau_max),
            ("n_tau", &self.n_tau),
            ("omega_max", &self.omega_max),
            ("n_omega", &self.n_omega),
        ];
        let mut out: Vec<(String, String)> = named
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| ScenarioError::Validation(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    fn apply(&self, s: Scenario) -> Result<Scenario, ScenarioError> {
        let pairs = self.pairs()?;
        let mut s = apply_settings(s, pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        s.violation_flags |= self.violations;
        Ok(s)
    }
}

#[derive(Args)]
struct Output {
    /// Write `<scenario>.csv` files here instead of printing to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn resolve(target: &str) -> Result<Vec<Scenario>, ScenarioError> {
    if target == "all" {
        return Ok(presets());
    }
    if let Some(s) = preset(target) {
        return Ok(vec![s]);
    }
    let path = Path::new(target);
    if path.is_file() {
        return Ok(vec![load_config(path)?]);
    }
    Err(ScenarioError::Validation(format!(
        "`{target}` is neither a preset ({}) nor a readable file",
        preset_names().join(", ")
    )))
}

fn emit(table: &OutputTable, name: &str, output: &Output) -> Result<(), ScenarioError> {
    let io_err = |e: std::io::Error| ScenarioError::Validation(format!("writing output for `{name}`: {e}"));
    match &output.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(io_err)?;
            let path = dir.join(format!("{name}.csv"));
            table.write(&path).map_err(io_err)?;
            log::info!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(table.to_csv().as_bytes()) {
                // a closed reader (e.g. `| head`) is not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other.map_err(io_err)?,
            }
        }
    }
    Ok(())
}

fn run(scenarios: Vec<Scenario>, overrides: &Overrides, output: &Output) -> Result<(), ScenarioError> {
    let scenarios: Vec<Scenario> = scenarios
        .into_iter()
        .map(|s| overrides.apply(s))
        .collect::<Result<_, _>>()?;
    for s in &scenarios {
        s.validate()?;
    }
    if scenarios.len() > 1 && output.out_dir.is_none() {
        return Err(ScenarioError::Validation("several scenarios need --out-dir".into()));
    }
    for s in &scenarios {
        let table = run_scenario(s)?;
        emit(&table, &s.name, output)?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode, ScenarioError> {
    match cli.command {
        Command::Run {
            targets,
            overrides,
            output,
        } => {
            let mut scenarios = Vec::new();
            for t in &targets {
                scenarios.extend(resolve(t)?);
            }
            run(scenarios, &overrides, &output)?;
        }
        Command::List => {
            for s in presets() {
                let p = &s.params;
                println!(
                    "{:<10} {:<18} {:<7} gamma_w={} omega_s={} omega_w={} delta_s={} delta_w={}",
                    s.name,
                    s.observable.to_string(),
                    s.transition.key(),
                    p.gamma_w,
                    p.omega_s,
                    p.omega_w,
                    p.delta_s,
                    p.delta_w
                );
            }
        }
        Command::Verify { out } => {
            let checks = run_checks();
            print!("{}", render(&checks));
            if let Some(path) = out {
                checks_table(&checks)
                    .write(&path)
                    .map_err(|e| ScenarioError::Validation(format!("writing {}: {e}", path.display())))?;
            }
            if !checks.iter().all(|c| c.passed()) {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Sweep {
            target,
            param,
            min,
            max,
            steps,
            observable,
            overrides,
            output,
        } => {
            let mut scenarios = resolve(&target)?;
            if scenarios.len() != 1 {
                return Err(ScenarioError::Validation("sweep takes a single preset or file".into()));
            }
            let base = scenarios.remove(0);
            let settings = [
                ("observable", observable.as_str()),
                ("sweep_param", param.as_str()),
                ("sweep_min", min.as_str()),
                ("sweep_max", max.as_str()),
                ("sweep_steps", steps.as_str()),
            ];
            let mut s = apply_settings(base, settings)?;
            s.name = format!("{}-sweep-{param}", s.name);
            run(vec![s], &overrides, &output)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(worker_count()).build_global() {
        log::warn!("worker pool: {e}");
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
