//! `had` — human activity discovery from 3D skeleton streams.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use had_cli::{compare, config::RunConfig, pipeline, report::ExperimentReport, svg};
use had_core::{fixture, formats};

#[derive(Parser)]
#[command(
    name = "had",
    about = "Discover human activity clusters in unlabeled 3D skeleton streams",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full discovery pipeline from a config file.
    Discover {
        /// Path to a key = value config file; `input` is the only required key.
        config: PathBuf,
        /// Override the cluster count.
        #[arg(long)]
        k: Option<usize>,
        /// Override the algorithm (hpgmk, kmeans, pso).
        #[arg(long)]
        algorithm: Option<String>,
        /// Override the number of repeated seeded runs.
        #[arg(long)]
        repeat: Option<usize>,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also dump energy.csv, features.csv, pca_model.json, samples.csv.
        #[arg(long)]
        dump_stages: bool,
    },
    /// Compare two or more report.json files from the same fixture.
    Compare {
        /// Report paths (at least two).
        #[arg(required = true, num_args = 2..)]
        reports: Vec<PathBuf>,
    },
    /// Re-emit the SVG plots for an existing report.
    Plot {
        /// Path to a report.json.
        report: PathBuf,
    },
    /// Generate a deterministic synthetic skeleton CSV from an activity
    /// script such as "wave:300,walk:300,sitstand:300".
    Fixture {
        /// Activity script: comma-separated name:frames segments
        /// (still, wave, walk, sitstand).
        script: String,
        /// Output CSV path.
        #[arg(short, long)]
        out: PathBuf,
        /// Generator seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> had_cli::Result<()> {
    match cli.command {
        Command::Discover { config, k, algorithm, repeat, seed, out, dump_stages } => {
            let name = config
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".into());
            let mut run_config = RunConfig::load(&config)?;
            if let Some(k) = k {
                run_config.k = k;
            }
            if let Some(a) = algorithm {
                run_config.algorithm = a.parse()?;
            }
            if let Some(r) = repeat {
                run_config.repeat = r;
            }
            if let Some(s) = seed {
                run_config.seed = s;
            }
            if let Some(o) = out {
                run_config.out = Some(o);
            }
            if dump_stages {
                run_config.dump_stages = true;
            }
            run_config.validate()?;
            let (report, out_dir) = pipeline::run_pipeline(&run_config, &name)?;
            println!("fixture:  {}", report.fixture_id);
            println!("windows:  {}", report.window_count);
            println!(
                "runs:     {} x {} (seeds {}..{})",
                report.runs.len(),
                report.algorithm,
                run_config.seed,
                run_config.seed + report.runs.len() as u64 - 1
            );
            if let (Some(lo), Some(mean), Some(hi)) = (
                report.aggregate.accuracy_min,
                report.aggregate.accuracy_mean,
                report.aggregate.accuracy_max,
            ) {
                println!("accuracy: min {lo:.4}  mean {mean:.4}  max {hi:.4}");
            } else {
                println!("accuracy: n/a (no ground-truth labels in the input)");
            }
            println!("sse:      mean {:.4}", report.aggregate.sse_mean);
            println!("report:   {}", out_dir.join("report.json").display());
            Ok(())
        }
        Command::Compare { reports } => {
            let loaded: Vec<ExperimentReport> = reports
                .iter()
                .map(|p| ExperimentReport::load(p))
                .collect::<had_cli::Result<_>>()?;
            let comparison = compare(&loaded)?;
            print!("{}", comparison.to_table());
            Ok(())
        }
        Command::Plot { report } => {
            let loaded = ExperimentReport::load(&report)?;
            let dir = report.parent().unwrap_or_else(|| std::path::Path::new("."));
            let written = svg::emit_plots(&loaded, dir)?;
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Fixture { script, out, seed } => {
            let seq = fixture::generate_fixture(&script, seed)?;
            if let Some(parent) = out.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(&out, formats::to_csv(&seq))?;
            println!("wrote {} frames to {}", seq.len(), out.display());
            Ok(())
        }
    }
}
