//! Command-line front end: train autoencoders, compare the two
//! reconstruction methods over a test set, reconstruct single images, build
//! the augmented faces dataset, and generate synthetic corpora.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use latentswarm::eval::{
    cmd_augment_faces, cmd_compare, cmd_gen_digits, cmd_gen_faces, cmd_reconstruct, cmd_train,
    AugmentCommand, CompareCommand, CompareConfig, ReconstructCommand, TrainCommand,
};
use latentswarm::net::{preset, preset_names, TrainConfig};
use latentswarm::{Error, ExecMode};

#[derive(Parser)]
#[command(name = "latentswarm", version, about = "Autoencoder training and swarm-search image reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an autoencoder on an IDX image file and save the model.
    Train(TrainArgs),
    /// Reconstruct test images with both methods and write the comparison report.
    Compare(CompareArgs),
    /// Reconstruct one test image and emit its convergence history.
    Reconstruct(ReconstructArgs),
    /// Rotate and subsample a directory of square face PGMs into IDX datasets.
    AugmentFaces(AugmentArgs),
    /// Generate a seeded synthetic 64x64 face corpus as PGM files.
    GenSyntheticFaces(GenFacesArgs),
    /// Generate a seeded synthetic labeled 28x28 digit corpus as IDX files.
    GenSyntheticDigits(GenDigitsArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// IDX image file to train on.
    #[arg(long)]
    dataset: PathBuf,
    /// Optional IDX label file (kept alongside the images).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Architecture preset: mnist-30, mnist-250, mnist-deep, faces-30, faces-300.
    #[arg(long, conflicts_with = "arch")]
    preset: Option<String>,
    /// Explicit layer widths, e.g. 784,30,784.
    #[arg(long, value_delimiter = ',')]
    arch: Option<Vec<usize>>,
    #[arg(long, default_value_t = 30)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch: usize,
    /// Greedy RBM pre-training before backprop fine-tuning.
    #[arg(long)]
    pretrain_rbm: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SwarmArgs {
    #[arg(long, default_value_t = 100)]
    swarm_size: usize,
    #[arg(long, default_value_t = 100)]
    generations: usize,
    /// Weight of the swarm-mean term in the loser update.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed the swarm with the encoder's latent as particle 0.
    #[arg(long)]
    warm_start: bool,
    /// Split the model at this layer index instead of the narrowest layer.
    #[arg(long)]
    bottleneck: Option<usize>,
    /// Stop a search early once its fitness reaches this value.
    #[arg(long)]
    target_fitness: Option<f64>,
    /// Force single-threaded execution (results are identical either way).
    #[arg(long)]
    sequential: bool,
}

impl SwarmArgs {
    fn to_config(&self, num_test: usize) -> CompareConfig {
        CompareConfig {
            num_test,
            swarm_size: self.swarm_size,
            generations: self.generations,
            phi: self.phi,
            master_seed: self.seed,
            warm_start: self.warm_start,
            bottleneck: self.bottleneck,
            target_fitness: self.target_fitness,
            exec: if self.sequential {
                ExecMode::Sequential
            } else {
                ExecMode::default()
            },
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// How many test images to evaluate.
    #[arg(long, default_value_t = 500)]
    num_test: usize,
    #[command(flatten)]
    swarm: SwarmArgs,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Which test image to reconstruct.
    #[arg(long)]
    index: usize,
    #[command(flatten)]
    swarm: SwarmArgs,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct AugmentArgs {
    /// Directory of square grayscale PGM sources.
    #[arg(long)]
    source: PathBuf,
    /// Explicit rotation angles in degrees; default is -90..=260 in 10-degree steps.
    #[arg(long, value_delimiter = ',')]
    angles: Option<Vec<f64>>,
    /// Reserve the last N person groups (by filename prefix) as the test split.
    #[arg(long, default_value_t = 0)]
    test_people: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GenFacesArgs {
    #[arg(long, default_value_t = 30)]
    people: usize,
    #[arg(long, default_value_t = 10)]
    per_person: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GenDigitsArgs {
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

fn resolve_widths(preset_name: &Option<String>, arch: &Option<Vec<usize>>) -> Result<(Vec<usize>, String), Error> {
    match (preset_name, arch) {
        (Some(name), None) => preset(name)
            .map(|w| (w, name.clone()))
            .ok_or_else(|| Error::Config(format!(
                "unknown preset {name:?}; available: {}",
                preset_names().join(", ")
            ))),
        (None, Some(widths)) => Ok((widths.clone(), "custom".to_string())),
        (None, None) => Err(Error::Config(
            "pass either --preset or --arch".to_string(),
        )),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    }
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Train(args) => {
            let (widths, arch_name) = resolve_widths(&args.preset, &args.arch)?;
            let out = cmd_train(&TrainCommand {
                dataset: args.dataset,
                labels: args.labels,
                widths,
                arch_name,
                train: TrainConfig {
                    learning_rate: args.lr,
                    epochs: args.epochs,
                    batch_size: args.batch,
                    seed: args.seed,
                },
                pretrain_rbm: args.pretrain_rbm,
                out_dir: args.out_dir,
            })?;
            println!(
                "trained {} epochs (pretrained: {}), final loss {:.6}, model at {}",
                out.losses.len(),
                out.pretrained,
                out.losses.last().copied().unwrap_or(f64::NAN),
                out.model_path.display()
            );
        }
        Command::Compare(args) => {
            let cfg = args.swarm.to_config(args.num_test);
            let report = cmd_compare(&CompareCommand {
                model: args.model,
                dataset: args.dataset,
                labels: args.labels,
                cfg,
                out_dir: args.out_dir.clone(),
            })?;
            println!(
                "compared {} images: median ae {:.4}, median cso {:.4}, win rate {:.3}",
                report.records.len(),
                report.ae.median,
                report.cso.median,
                report.win_rate
            );
            println!("report written to {}", args.out_dir.display());
        }
        Command::Reconstruct(args) => {
            let cfg = args.swarm.to_config(1);
            let out = cmd_reconstruct(&ReconstructCommand {
                model: args.model,
                dataset: args.dataset,
                labels: args.labels,
                index: args.index,
                cfg,
                out_dir: args.out_dir.clone(),
            })?;
            println!(
                "image {}: ae error {:.4}, cso error {:.4} after {} generations",
                out.record.index, out.record.ae_error, out.record.cso_error, out.record.cso_generations
            );
            println!("artifacts written to {}", args.out_dir.display());
        }
        Command::AugmentFaces(args) => {
            let out = cmd_augment_faces(&AugmentCommand {
                source_dir: args.source,
                angles: args.angles,
                test_people: args.test_people,
                out_dir: args.out_dir.clone(),
            })?;
            println!(
                "augmented {} people into {} train / {} test images at {}",
                out.people,
                out.train_count,
                out.test_count,
                args.out_dir.display()
            );
        }
        Command::GenSyntheticFaces(args) => {
            let files = cmd_gen_faces(args.people, args.per_person, args.seed, &args.out_dir)?;
            println!("wrote {} face images to {}", files, args.out_dir.display());
        }
        Command::GenSyntheticDigits(args) => {
            cmd_gen_digits(args.count, args.seed, &args.out_dir)?;
            println!(
                "wrote {} digit images to {}",
                args.count,
                args.out_dir.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
