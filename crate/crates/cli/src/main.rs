use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use player_vectors::{Error, Pipeline, PipelineConfig};

/// Batch pipeline for spatial playing-style vectors: heatmaps, NMF
/// compression, position and style discovery, and player comparison.
#[derive(Parser)]
#[command(name = "player-vectors", version, about)]
struct Cli {
    /// Pipeline config (TOML). Falls back to built-in defaults when the
    /// default path does not exist.
    #[arg(long, global = true, default_value = "pv.toml")]
    config: PathBuf,

    /// Artifact directory override (also: PLAYER_VECTORS_ARTIFACTS).
    #[arg(long, global = true)]
    artifacts: Option<PathBuf>,

    /// Accept artifacts produced under a different config fingerprint.
    #[arg(long, global = true)]
    force: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic league files.
    Synth,
    /// Validate the raw event file and write the canonical event artifact.
    Ingest,
    /// Build per-action heatmap matrices over eligible player-matches.
    Heatmaps,
    /// Detect positions from average action locations.
    ClusterPositions,
    /// Factorize heatmap matrices and assemble player vectors.
    FitVectors,
    /// Extract per-position playing styles and their statistics.
    FitStyles,
    /// Emit the per-style statistics table as CSV.
    Table2,
    /// Run ingest through table2.
    Pipeline,
    /// Build the five-part comparison report for two players.
    Compare {
        player_a: String,
        player_b: String,
        /// Write the report JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank the players most similar to one player.
    Similar {
        player: String,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Error> {
    let explicit = cli.config != PathBuf::from("pv.toml");
    if cli.config.exists() {
        PipelineConfig::load(&cli.config)
    } else if explicit {
        Err(Error::Config(format!("config file {} not found", cli.config.display())))
    } else {
        Ok(PipelineConfig::default())
    }
}

fn artifact_override(cli: &Cli) -> Option<PathBuf> {
    cli.artifacts
        .clone()
        .or_else(|| std::env::var_os("PLAYER_VECTORS_ARTIFACTS").map(PathBuf::from))
}

fn run(cli: &Cli) -> Result<(), Error> {
    let config = load_config(cli)?;
    let pipeline = Pipeline::new(config, artifact_override(cli), cli.force);

    match &cli.command {
        Command::Synth => {
            let paths = pipeline.synth()?;
            println!("events:  {}", paths.events.display());
            println!("records: {}", paths.records.display());
            println!("truth:   {}", paths.truth.display());
        }
        Command::Ingest => {
            let summary = pipeline.ingest()?;
            println!(
                "{} events ({} dropped for missing coordinates), {} eligible player-matches",
                summary.events, summary.dropped_missing_location, summary.eligible_player_matches
            );
        }
        Command::Heatmaps => {
            let summary = pipeline.heatmaps()?;
            println!(
                "{}x{} grid, {} columns, {} non-zero heatmaps",
                summary.grid.m,
                summary.grid.n,
                summary.columns.len(),
                summary.nonzero_heatmaps
            );
        }
        Command::ClusterPositions => {
            let summary = pipeline.cluster_positions()?;
            println!("  k  silhouette");
            for score in &summary.per_k {
                let marker = if score.k == summary.model.k { " *" } else { "" };
                println!("{:>3}  {:.4}{marker}", score.k, score.silhouette);
            }
            println!(
                "chose k = {} (ss = {:.4}); {} samples, {} side switches removed, {} without actions",
                summary.model.k,
                summary.model.silhouette,
                summary.samples,
                summary.side_switches_removed,
                summary.skipped_without_actions
            );
            for (label, count) in &summary.label_counts {
                println!("{label:>6}: {count}");
            }
        }
        Command::FitVectors => {
            let summary = pipeline.fit_vectors()?;
            println!(
                "{} vectors of dimension {} ({} unpositioned player-matches skipped)",
                summary.vectors, summary.dim, summary.skipped_unpositioned
            );
        }
        Command::FitStyles => {
            let summary = pipeline.fit_styles()?;
            println!("{} styles:", summary.total_styles);
            for (position, entry) in &summary.positions {
                for (name, stats) in entry.names.iter().zip(&entry.stats) {
                    println!("{position:>6}  {name:<28} N={}", stats.total);
                }
            }
        }
        Command::Table2 => {
            let path = pipeline.table2()?;
            println!("{}", path.display());
        }
        Command::Pipeline => {
            pipeline.run_all()?;
            println!("pipeline complete: {}", pipeline.store.root.display());
        }
        Command::Compare { player_a, player_b, out } => {
            let report = pipeline.compare(player_a, player_b)?;
            let json = serde_json::to_string_pretty(&report).map_err(Error::Json)?;
            match out {
                Some(path) => {
                    std::fs::write(path, format!("{json}\n")).map_err(Error::Io)?;
                    println!("similarity {:.1}% -> {}", report.similarity.percent, path.display());
                }
                None => println!("{json}"),
            }
        }
        Command::Similar { player, top } => {
            let ranked = pipeline.similar(player, *top)?;
            println!("rank  player            distance  similarity");
            for (i, r) in ranked.iter().enumerate() {
                println!("{:>4}  {:<16}  {:>8.4}  {:>9.1}%", i + 1, r.player_b, r.manhattan, r.percent);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
