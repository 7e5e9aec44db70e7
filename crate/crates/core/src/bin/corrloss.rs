use clap::{Parser, Subcommand};
use corrloss::decoder::DecoderKind;
use corrloss::experiment::{run_experiment, write_outputs, ExperimentConfig, Execution, Grid, NoisePoint};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(version, about = "Surface-code memory experiments under correlated atom loss")]
struct Cli {
    /// Run without the thread pool.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate and decode a single noise point.
    Simulate {
        #[arg(long)]
        distance: usize,
        /// Rounds of syndrome extraction; defaults to the distance.
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long)]
        p_loss: f64,
        #[arg(long, default_value_t = 1.0)]
        p_corr: f64,
        #[arg(long, default_value_t = 0.0)]
        p_depol: f64,
        /// Decoders to run; repeat or comma-separate.
        #[arg(long, value_delimiter = ',', default_value = "fast")]
        decoder: Vec<DecoderKind>,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for report.json and points.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep described by a TOML file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output directory in the file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> corrloss::Result<()> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let (cfg, out) = match cli.cmd {
        Cmd::Simulate { distance, rounds, p_loss, p_corr, p_depol, decoder, shots, seed, out } => {
            let mut cfg = ExperimentConfig {
                distances: vec![distance],
                rounds: Default::default(),
                grid: Grid { points: vec![NoisePoint { p_l: p_loss, p_c: p_corr, p_d: p_depol }], ..Grid::default() },
                decoders: decoder,
                shots,
                max_shots: None,
                target_errors: None,
                seed,
                output: None,
                bootstrap: 0,
                accurate_max_nodes: None,
            };
            if let Some(r) = rounds {
                cfg.rounds.insert(distance.to_string(), r);
            }
            (cfg, out)
        }
        Cmd::Sweep { config, out } => {
            let cfg = ExperimentConfig::from_toml(&std::fs::read_to_string(&config)?)?;
            let out = out.or_else(|| cfg.output.clone());
            (cfg, out)
        }
    };
    let report = run_experiment(&cfg, exec)?;
    for p in &report.points {
        for r in &p.results {
            println!(
                "d={} rounds={} p_l={} p_c={} p_d={} decoder={} shots={} errors={} eps_r={:.4e} +- {:.1e} failures={}",
                p.distance, p.rounds, p.noise.p_l, p.noise.p_c, p.noise.p_d, r.decoder, r.shots, r.errors, r.eps_r, r.stderr_r, r.failures
            );
        }
    }
    for t in &report.thresholds {
        if let Some(e) = &t.estimate {
            println!("threshold {} p_c={} p_d={}: {:.4} +- {:.4}", t.decoder, t.p_c, t.p_d, e.value, e.error);
        }
    }
    if let Some(dir) = out {
        write_outputs(&report, &dir)?;
        log::info!("wrote {}", dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
