use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bermuda::harness::{presets, run_experiment, sweep, ExperimentConfig, Report, RunOptions};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "price",
    about = "Bermudan option bounds by Markovian coercion",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Override the configured seed.
    #[arg(long, env = "PRICE_SEED")]
    seed: Option<u64>,
    /// Override the configured scale (multiplier on simulation counts).
    #[arg(long)]
    scale: Option<f64>,
    /// Write the report as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the full report, including the resolved configuration, as JSON.
    #[arg(long)]
    report_json: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, env = "PRICE_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Price one configuration (a JSON file or a preset name).
    Run {
        config: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        save_coercion: Option<PathBuf>,
        #[arg(long)]
        load_coercion: Option<PathBuf>,
    },
    /// Price several configurations: a directory of JSON files, a list of
    /// files or preset names, or a name prefix such as `table9`.
    Sweep {
        #[arg(required = true)]
        configs: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// List the shipped presets, or write them as JSON files.
    Presets {
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

fn load_config(spec: &str) -> Result<ExperimentConfig> {
    let path = Path::new(spec);
    if path.is_file() {
        return ExperimentConfig::load(path).with_context(|| format!("reading {spec}"));
    }
    presets::find(spec)
        .with_context(|| format!("{spec} is neither a config file nor a preset name"))
}

fn expand(specs: &[String]) -> Result<Vec<ExperimentConfig>> {
    let mut out = Vec::new();
    for spec in specs {
        let path = Path::new(spec);
        if path.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(path)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            for f in files {
                out.push(
                    ExperimentConfig::load(&f)
                        .with_context(|| format!("reading {}", f.display()))?,
                );
            }
        } else if path.is_file() || presets::find(spec).is_some() {
            out.push(load_config(spec)?);
        } else {
            let matching: Vec<_> = presets::all()
                .into_iter()
                .filter(|c| c.name.starts_with(spec.as_str()))
                .collect();
            if matching.is_empty() {
                bail!("{spec} matches no config file, directory or preset");
            }
            out.extend(matching);
        }
    }
    Ok(out)
}

fn apply(cfg: ExperimentConfig, common: &Common) -> ExperimentConfig {
    let cfg = match common.seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    };
    match common.scale {
        Some(s) => cfg.with_scale(s),
        None => cfg,
    }
}

fn emit(report: &Report, common: &Common) -> Result<()> {
    print!("{}", report.to_text());
    if let Some(path) = &common.out {
        report.write_csv(fs::File::create(path)?)?;
    }
    if let Some(path) = &common.report_json {
        fs::write(path, serde_json::to_string_pretty(report)?)?;
    }
    Ok(())
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            common,
            save_coercion,
            load_coercion,
        } => {
            init_threads(common.threads)?;
            let cfg = apply(load_config(&config)?, &common);
            let opts = RunOptions {
                save_coercion,
                load_coercion,
            };
            let report = run_experiment(&cfg, &opts)?;
            emit(&report, &common)?;
        }
        Command::Sweep { configs, common } => {
            init_threads(common.threads)?;
            let cfgs: Vec<_> = expand(&configs)?
                .into_iter()
                .map(|c| apply(c, &common))
                .collect();
            let report = sweep(&cfgs);
            emit(&report, &common)?;
            let failed = report.rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                bail!("{failed} of {} rows failed", report.rows.len());
            }
        }
        Command::Presets { write } => {
            let all = presets::all();
            if let Some(dir) = write {
                fs::create_dir_all(&dir)?;
                for cfg in &all {
                    fs::write(dir.join(format!("{}.json", cfg.name)), cfg.to_json()?)?;
                }
            }
            for cfg in &all {
                println!("{}\t{}", cfg.name, cfg.example.name());
            }
        }
    }
    Ok(())
}
