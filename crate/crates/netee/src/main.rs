use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use netee::analysis::{expected_exchanged_genes, expected_exchanged_per_generation, pixel_vs_tiled_maps};
use netee::data::load_idx;
use netee::engine::Collective;
use netee::runner::{load_final_scores, run_campaign, write_campaign, CampaignConfig, Setup};
use netee::stats::{emit_cd_plot_data, emit_matrix, friedman_nemenyi, wilcoxon_matrix};

#[derive(Parser)]
#[command(name = "netee", version, about = "Embodied evolution on agent networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every cell of a campaign config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the config's collective fitness aggregate.
        #[arg(long, value_enum)]
        collective: Option<CollectiveArg>,
    },
    /// Run the operator sweep declared in a config's `[sweep]` table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the config's collective fitness aggregate.
        #[arg(long, value_enum)]
        collective: Option<CollectiveArg>,
    },
    /// Write the ground-truth frame of a grid problem as PGM.
    Render {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        time: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pairwise rank-sum matrix and critical-difference data for a run directory.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    Analyze {
        #[command(subcommand)]
        what: Analyze,
    },
}

#[derive(Subcommand)]
enum Analyze {
    /// Neighbor-distance maps of an image set, per pixel and tiled.
    Distmap {
        #[arg(long)]
        idx: PathBuf,
        #[arg(long, default_value_t = 100)]
        images: usize,
        #[arg(long, default_value_t = 4)]
        tile: usize,
        #[arg(long, default_value_t = 1)]
        downsample: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Expected genes exchanged by crossover.
    Exchange {
        #[arg(long)]
        cp: f64,
        #[arg(long)]
        cr: f64,
        #[arg(long)]
        len: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CollectiveArg {
    Mean,
    Sum,
}

fn load_config(path: &Path, threads: Option<usize>, collective: Option<CollectiveArg>) -> Result<CampaignConfig> {
    let mut cfg = CampaignConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(t) = threads {
        cfg.threads = t;
    }
    match collective {
        Some(CollectiveArg::Mean) => cfg.collective = Collective::Mean,
        Some(CollectiveArg::Sum) => cfg.collective = Collective::Sum,
        None => {}
    }
    Ok(cfg)
}

fn run(cfg: &CampaignConfig, out: &Path) -> Result<()> {
    let result = run_campaign(cfg)?;
    write_campaign(&result, out)?;
    for cell in &result.cells {
        println!("{}\tmean final {}", cell.label(), cell.mean_final_fitness());
    }
    Ok(())
}

fn write(path: PathBuf, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            threads,
            collective,
        } => run(&load_config(&config, threads, collective)?, &out),
        Command::Sweep {
            config,
            out,
            threads,
            collective,
        } => {
            let cfg = load_config(&config, threads, collective)?;
            if cfg.sweep.is_none() {
                bail!("{} has no [sweep] table", config.display());
            }
            run(&cfg, &out)
        }
        Command::Render { config, time, out } => {
            let setup = Setup::from_config(&load_config(&config, None, None)?)?;
            let frame = setup
                .problem
                .truth_frame(time)
                .context("problem has no ground-truth frame")??;
            frame.write_pgm(&out)?;
            Ok(())
        }
        Command::Stats { input, alpha, out } => {
            let scores = load_final_scores(&input)?;
            let m = &scores.matrix;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write(
                out.join("wilcoxon_matrix.csv"),
                emit_matrix(&wilcoxon_matrix(&m.algorithms, &m.samples, alpha)?),
            )?;
            write(out.join("cd_plot.txt"), emit_cd_plot_data(&friedman_nemenyi(m, alpha)?))?;
            println!("compared {} cells on {}", m.algorithms.len(), scores.metric);
            Ok(())
        }
        Command::Analyze { what } => match what {
            Analyze::Distmap {
                idx,
                images,
                tile,
                downsample,
                out,
            } => {
                let set = load_idx(&idx)?;
                let (pixel, tiled, max) = pixel_vs_tiled_maps(&set, images, downsample, tile)?;
                fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
                pixel.write_pgm(out.join("distmap_pixel.pgm"))?;
                tiled.write_pgm(out.join("distmap_tiled.pgm"))?;
                write(out.join("distmap_pixel.csv"), pixel.to_csv())?;
                write(out.join("distmap_tiled.csv"), tiled.to_csv())?;
                println!("max {max}\tpixel peak {}\ttiled peak {}", pixel.max(), tiled.max());
                Ok(())
            }
            Analyze::Exchange { cp, cr, len } => {
                netee::genome::OperatorParams::new(cp, cr, 1.0)?;
                println!("per crossover {}", expected_exchanged_genes(cr, len));
                println!("per generation {}", expected_exchanged_per_generation(cp, cr, len));
                Ok(())
            }
        },
    }
}
