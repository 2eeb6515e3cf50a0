//! Command orchestration, metrics, and reporting: training runs, the
//! two-method comparison over a test set, single-image reconstruction, the
//! face-augmentation build, and the synthetic corpus generators. Every
//! command writes deterministic CSV/PGM outputs plus a JSON manifest of the
//! fully resolved configuration.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cso::CsoParams;
use crate::data::{
    build_augmented_faces, default_rotation_angles, gen_synthetic_digits, gen_synthetic_faces,
    intensity_range, load_idx_images, load_idx_labels, min_max_normalize, quantize, read_pgm,
    save_idx_images, save_idx_labels, write_pgm, write_pgm_grid, ImageDataset, RawImages,
};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::net::{Network, TrainConfig};
use crate::rbm::pretrain_stack;
use crate::recon::{reconstruct_ae, reconstruct_cso_with, ReconstructOptions};
use crate::seed::derive_seed;

pub const MODEL_FILE: &str = "model.aenc";
pub const TRAIN_LOSS_FILE: &str = "train_loss.csv";
pub const PER_IMAGE_FILE: &str = "per_image.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const TARGETS_GRID: &str = "targets.pgm";
pub const AE_GRID: &str = "recon_ae.pgm";
pub const CSO_GRID: &str = "recon_cso.pgm";
pub const TARGET_IMAGE: &str = "target.pgm";
pub const AE_IMAGE: &str = "recon_ae.pgm";
pub const CSO_IMAGE: &str = "recon_cso.pgm";
pub const HISTORY_FILE: &str = "fitness_history.csv";
pub const MANIFEST_FILE: &str = "run_manifest.json";
pub const FACES_TRAIN_IDX: &str = "faces_train.idx";
pub const FACES_TEST_IDX: &str = "faces_test.idx";
pub const DATASET_MANIFEST_FILE: &str = "dataset_manifest.json";
pub const DIGIT_IMAGES_IDX: &str = "digit_images.idx";
pub const DIGIT_LABELS_IDX: &str = "digit_labels.idx";

/// Five-number summary with linear-interpolation quantiles: quartile `q`
/// sits at position `q * (n - 1)` of the sorted sample, interpolated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn summarize(errors: &[f64]) -> Result<FiveNumberSummary> {
    if errors.is_empty() {
        return Err(Error::config("cannot summarize an empty list"));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let quantile = |q: f64| -> f64 {
        let pos = q * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Ok(FiveNumberSummary {
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: *sorted.last().unwrap(),
    })
}

/// Box-plot statistics plus the mean, for one reconstruction method.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MethodSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

impl MethodSummary {
    pub fn from_errors(errors: &[f64]) -> Result<MethodSummary> {
        let five = summarize(errors)?;
        Ok(MethodSummary {
            min: five.min,
            q1: five.q1,
            median: five.median,
            q3: five.q3,
            max: five.max,
            mean: errors.iter().sum::<f64>() / errors.len() as f64,
        })
    }
}

/// One test image's results under both methods. Wall times stay in the
/// struct (the CSV omits them so re-runs are byte-identical).
#[derive(Clone, Debug)]
pub struct ImageRecord {
    pub index: usize,
    pub label: Option<u8>,
    pub ae_error: f64,
    pub cso_error: f64,
    pub cso_generations: usize,
    pub ae_wall: Duration,
    pub cso_wall: Duration,
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub records: Vec<ImageRecord>,
    pub ae: MethodSummary,
    pub cso: MethodSummary,
    /// Fraction of images where the swarm search beat the baseline strictly.
    pub win_rate: f64,
}

impl ComparisonReport {
    pub fn wins(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.cso_error < r.ae_error)
            .count()
    }
}

/// Resolved comparison parameters shared by `compare` and `reconstruct`.
#[derive(Clone, Debug, Serialize)]
pub struct CompareConfig {
    pub num_test: usize,
    pub swarm_size: usize,
    pub generations: usize,
    pub phi: f64,
    pub master_seed: u64,
    pub warm_start: bool,
    /// Explicit split point; autodetected at the narrowest layer when absent.
    pub bottleneck: Option<usize>,
    pub target_fitness: Option<f64>,
    #[serde(skip)]
    pub exec: ExecMode,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            num_test: 500,
            swarm_size: 100,
            generations: 100,
            phi: 0.0,
            master_seed: 0,
            warm_start: false,
            bottleneck: None,
            target_fitness: None,
            exec: ExecMode::default(),
        }
    }
}

/// Everything `cmd_compare` needs to write its grids alongside the report.
pub struct CompareOutcome {
    pub report: ComparisonReport,
    pub ae_images: Vec<Vec<f64>>,
    pub cso_images: Vec<Vec<f64>>,
    pub bottleneck_used: usize,
}

// Swarm parameters for one image, derived from the shared config.
fn image_params(cfg: &CompareConfig, dim: usize, index: usize) -> CsoParams {
    CsoParams {
        swarm_size: cfg.swarm_size,
        dim,
        phi: cfg.phi,
        max_generations: cfg.generations,
        init_low: 0.0,
        init_high: 1.0,
        seed: derive_seed(cfg.master_seed, index as u64),
    }
}

/// Runs both reconstruction methods on the first `num_test` images.
///
/// Images are processed independently (optionally in parallel) with
/// per-image seeds derived from `(master_seed, index)`, so each record is
/// reproducible in isolation and the report does not depend on scheduling.
pub fn compare(model: &Network, test: &ImageDataset, cfg: &CompareConfig) -> Result<CompareOutcome> {
    if model.input_width() != test.pixel_count() {
        return Err(Error::dim(
            "model input vs dataset",
            model.input_width(),
            test.pixel_count(),
        ));
    }
    if cfg.num_test == 0 || cfg.num_test > test.len() {
        return Err(Error::config(format!(
            "requested {} test images but the dataset has {}",
            cfg.num_test,
            test.len()
        )));
    }
    let bottleneck = cfg.bottleneck.unwrap_or_else(|| model.bottleneck_index());
    let (encoder, decoder) = model.split(bottleneck)?;
    let dim = decoder.input_width();

    // Outer loop parallelism; the per-image swarm stays sequential so two
    // levels of work-stealing don't fight over the same cores.
    let results = crate::exec::map_indexed(cfg.exec, cfg.num_test, |i| -> Result<_> {
        let target = test.image(i);
        let ae_start = Instant::now();
        let (ae_image, ae_error) = reconstruct_ae(model, target)?;
        let ae_wall = ae_start.elapsed();

        let warm_start = if cfg.warm_start {
            Some(encoder.forward(target)?)
        } else {
            None
        };
        let opts = ReconstructOptions {
            warm_start,
            target_fitness: cfg.target_fitness,
            exec: ExecMode::Sequential,
        };
        let cso = reconstruct_cso_with(&decoder, target, &image_params(cfg, dim, i), &opts)?;
        let record = ImageRecord {
            index: i,
            label: test.label(i),
            ae_error,
            cso_error: cso.final_fitness,
            cso_generations: cso.generations_run,
            ae_wall,
            cso_wall: cso.wall_time,
        };
        Ok((record, ae_image, cso.reconstruction))
    });

    let mut records = Vec::with_capacity(cfg.num_test);
    let mut ae_images = Vec::with_capacity(cfg.num_test);
    let mut cso_images = Vec::with_capacity(cfg.num_test);
    for item in results {
        let (record, ae_image, cso_image) = item?;
        records.push(record);
        ae_images.push(ae_image);
        cso_images.push(cso_image);
    }

    let ae_errors: Vec<f64> = records.iter().map(|r| r.ae_error).collect();
    let cso_errors: Vec<f64> = records.iter().map(|r| r.cso_error).collect();
    let wins = records.iter().filter(|r| r.cso_error < r.ae_error).count();
    let report = ComparisonReport {
        ae: MethodSummary::from_errors(&ae_errors)?,
        cso: MethodSummary::from_errors(&cso_errors)?,
        win_rate: wins as f64 / records.len() as f64,
        records,
    };
    Ok(CompareOutcome {
        report,
        ae_images,
        cso_images,
        bottleneck_used: bottleneck,
    })
}

// ---------------------------------------------------------------------------
// CSV writers. Floats are printed with Rust's shortest-roundtrip formatting,
// so an external reader recovers the exact f64 values.
// ---------------------------------------------------------------------------

pub fn write_per_image_csv(path: impl AsRef<Path>, records: &[ImageRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "index,label,ae_error,cso_error,cso_generations")?;
    for r in records {
        let label = r.label.map(|l| l.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            r.index, label, r.ae_error, r.cso_error, r.cso_generations
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv(
    path: impl AsRef<Path>,
    ae: &MethodSummary,
    cso: &MethodSummary,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "method,min,q1,median,q3,max,mean")?;
    for (name, s) in [("autoencoder", ae), ("decoder_cso", cso)] {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            name, s.min, s.q1, s.median, s.q3, s.max, s.mean
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_history_csv(path: impl AsRef<Path>, history: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "generation,best_fitness")?;
    for (g, f) in history.iter().enumerate() {
        writeln!(w, "{g},{f}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_loss_csv(path: impl AsRef<Path>, losses: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "epoch,mean_loss")?;
    for (e, l) in losses.iter().enumerate() {
        writeln!(w, "{e},{l}")?;
    }
    w.flush()?;
    Ok(())
}

fn write_manifest<T: Serialize>(dir: &Path, manifest: &T) -> Result<()> {
    let mut json = serde_json::to_string_pretty(manifest)?;
    json.push('\n');
    fs::write(dir.join(MANIFEST_FILE), json)?;
    Ok(())
}

fn load_dataset(dataset: &Path, labels: Option<&Path>) -> Result<ImageDataset> {
    let raw = load_idx_images(dataset)?;
    let data = min_max_normalize(&raw)?;
    match labels {
        None => Ok(data),
        Some(path) => {
            let labels = load_idx_labels(path)?;
            if labels.len() != data.len() {
                return Err(Error::Validation {
                    path: path.display().to_string(),
                    reason: format!(
                        "label count {} does not match image count {}",
                        labels.len(),
                        data.len()
                    ),
                });
            }
            data.with_labels(labels)
        }
    }
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct TrainCommand {
    pub dataset: PathBuf,
    pub labels: Option<PathBuf>,
    /// Resolved architecture, e.g. `[784, 30, 784]`.
    pub widths: Vec<usize>,
    /// Preset name or `"custom"`, recorded in the manifest.
    pub arch_name: String,
    pub train: TrainConfig,
    pub pretrain_rbm: bool,
    pub out_dir: PathBuf,
}

#[derive(Debug)]
pub struct TrainOutput {
    pub model_path: PathBuf,
    pub losses: Vec<f64>,
    pub pretrained: bool,
}

#[derive(Serialize)]
struct TrainManifest<'a> {
    command: &'static str,
    dataset: String,
    labels: Option<String>,
    architecture: &'a [usize],
    arch_name: &'a str,
    learning_rate: f64,
    epochs: usize,
    batch_size: usize,
    seed: u64,
    pretrain_rbm: bool,
    training_images: usize,
    final_loss: Option<f64>,
    model_file: &'static str,
}

pub fn cmd_train(cmd: &TrainCommand) -> Result<TrainOutput> {
    let data = load_dataset(&cmd.dataset, cmd.labels.as_deref())?;
    if cmd.widths.first() != Some(&data.pixel_count()) {
        return Err(Error::dim(
            "architecture input vs dataset",
            *cmd.widths.first().unwrap_or(&0),
            data.pixel_count(),
        ));
    }

    let mut net = if cmd.pretrain_rbm {
        let widths = &cmd.widths;
        let symmetric = widths
            .iter()
            .zip(widths.iter().rev())
            .all(|(a, b)| a == b);
        if !symmetric {
            return Err(Error::config(
                "RBM pre-training requires a symmetric architecture",
            ));
        }
        let encoder_widths = &widths[..=widths.len() / 2];
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cmd.train.seed, 1));
        pretrain_stack(encoder_widths, &data, &cmd.train, &mut rng)?
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cmd.train.seed, 0));
        Network::autoencoder(&cmd.widths, &mut rng)?
    };

    let losses = net.train(&data, &cmd.train)?;

    fs::create_dir_all(&cmd.out_dir)?;
    let model_path = cmd.out_dir.join(MODEL_FILE);
    net.save(&model_path)?;
    write_loss_csv(cmd.out_dir.join(TRAIN_LOSS_FILE), &losses)?;
    write_manifest(
        &cmd.out_dir,
        &TrainManifest {
            command: "train",
            dataset: cmd.dataset.display().to_string(),
            labels: cmd.labels.as_ref().map(|p| p.display().to_string()),
            architecture: &cmd.widths,
            arch_name: &cmd.arch_name,
            learning_rate: cmd.train.learning_rate,
            epochs: cmd.train.epochs,
            batch_size: cmd.train.batch_size,
            seed: cmd.train.seed,
            pretrain_rbm: cmd.pretrain_rbm,
            training_images: data.len(),
            final_loss: losses.last().copied(),
            model_file: MODEL_FILE,
        },
    )?;
    Ok(TrainOutput {
        model_path,
        losses,
        pretrained: cmd.pretrain_rbm,
    })
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CompareCommand {
    pub model: PathBuf,
    pub dataset: PathBuf,
    pub labels: Option<PathBuf>,
    pub cfg: CompareConfig,
    pub out_dir: PathBuf,
}

#[derive(Serialize)]
struct CompareManifest<'a> {
    command: &'static str,
    model: String,
    dataset: String,
    labels: Option<String>,
    #[serde(flatten)]
    cfg: &'a CompareConfig,
    bottleneck_used: usize,
    latent_dim: usize,
    win_rate: f64,
    wins: usize,
    ae_summary: MethodSummary,
    cso_summary: MethodSummary,
}

pub fn cmd_compare(cmd: &CompareCommand) -> Result<ComparisonReport> {
    let model = Network::load(&cmd.model)?;
    let test = load_dataset(&cmd.dataset, cmd.labels.as_deref())?;
    let outcome = compare(&model, &test, &cmd.cfg)?;

    fs::create_dir_all(&cmd.out_dir)?;
    write_per_image_csv(cmd.out_dir.join(PER_IMAGE_FILE), &outcome.report.records)?;
    write_summary_csv(
        cmd.out_dir.join(SUMMARY_FILE),
        &outcome.report.ae,
        &outcome.report.cso,
    )?;

    let targets: Vec<Vec<f64>> = (0..cmd.cfg.num_test)
        .map(|i| test.image(i).to_vec())
        .collect();
    let (w, h) = (test.width(), test.height());
    write_pgm_grid(cmd.out_dir.join(TARGETS_GRID), &targets, w, h)?;
    write_pgm_grid(cmd.out_dir.join(AE_GRID), &outcome.ae_images, w, h)?;
    write_pgm_grid(cmd.out_dir.join(CSO_GRID), &outcome.cso_images, w, h)?;

    write_manifest(
        &cmd.out_dir,
        &CompareManifest {
            command: "compare",
            model: cmd.model.display().to_string(),
            dataset: cmd.dataset.display().to_string(),
            labels: cmd.labels.as_ref().map(|p| p.display().to_string()),
            cfg: &cmd.cfg,
            bottleneck_used: outcome.bottleneck_used,
            latent_dim: model.widths()[outcome.bottleneck_used],
            win_rate: outcome.report.win_rate,
            wins: outcome.report.wins(),
            ae_summary: outcome.report.ae,
            cso_summary: outcome.report.cso,
        },
    )?;
    Ok(outcome.report)
}

// ---------------------------------------------------------------------------
// reconstruct (single image)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ReconstructCommand {
    pub model: PathBuf,
    pub dataset: PathBuf,
    pub labels: Option<PathBuf>,
    pub index: usize,
    pub cfg: CompareConfig,
    pub out_dir: PathBuf,
}

#[derive(Debug)]
pub struct SingleOutcome {
    pub record: ImageRecord,
    pub fitness_history: Vec<f64>,
}

#[derive(Serialize)]
struct ReconstructManifest<'a> {
    command: &'static str,
    model: String,
    dataset: String,
    index: usize,
    label: Option<u8>,
    #[serde(flatten)]
    cfg: &'a CompareConfig,
    bottleneck_used: usize,
    ae_error: f64,
    cso_error: f64,
    generations_run: usize,
}

pub fn cmd_reconstruct(cmd: &ReconstructCommand) -> Result<SingleOutcome> {
    let model = Network::load(&cmd.model)?;
    let test = load_dataset(&cmd.dataset, cmd.labels.as_deref())?;
    if model.input_width() != test.pixel_count() {
        return Err(Error::dim(
            "model input vs dataset",
            model.input_width(),
            test.pixel_count(),
        ));
    }
    if cmd.index >= test.len() {
        return Err(Error::config(format!(
            "image index {} out of range (dataset has {} images)",
            cmd.index,
            test.len()
        )));
    }
    let bottleneck = cmd.cfg.bottleneck.unwrap_or_else(|| model.bottleneck_index());
    let (encoder, decoder) = model.split(bottleneck)?;
    let target = test.image(cmd.index);

    let ae_start = Instant::now();
    let (ae_image, ae_error) = reconstruct_ae(&model, target)?;
    let ae_wall = ae_start.elapsed();

    let opts = ReconstructOptions {
        warm_start: if cmd.cfg.warm_start {
            Some(encoder.forward(target)?)
        } else {
            None
        },
        target_fitness: cmd.cfg.target_fitness,
        exec: cmd.cfg.exec,
    };
    let params = image_params(&cmd.cfg, decoder.input_width(), cmd.index);
    let cso = reconstruct_cso_with(&decoder, target, &params, &opts)?;

    fs::create_dir_all(&cmd.out_dir)?;
    let (w, h) = (test.width(), test.height());
    write_pgm(cmd.out_dir.join(TARGET_IMAGE), w, h, target)?;
    write_pgm(cmd.out_dir.join(AE_IMAGE), w, h, &ae_image)?;
    write_pgm(cmd.out_dir.join(CSO_IMAGE), w, h, &cso.reconstruction)?;
    write_history_csv(cmd.out_dir.join(HISTORY_FILE), &cso.fitness_history)?;
    write_manifest(
        &cmd.out_dir,
        &ReconstructManifest {
            command: "reconstruct",
            model: cmd.model.display().to_string(),
            dataset: cmd.dataset.display().to_string(),
            index: cmd.index,
            label: test.label(cmd.index),
            cfg: &cmd.cfg,
            bottleneck_used: bottleneck,
            ae_error,
            cso_error: cso.final_fitness,
            generations_run: cso.generations_run,
        },
    )?;
    Ok(SingleOutcome {
        record: ImageRecord {
            index: cmd.index,
            label: test.label(cmd.index),
            ae_error,
            cso_error: cso.final_fitness,
            cso_generations: cso.generations_run,
            ae_wall,
            cso_wall: cso.wall_time,
        },
        fitness_history: cso.fitness_history,
    })
}

// ---------------------------------------------------------------------------
// augment-faces
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct AugmentCommand {
    pub source_dir: PathBuf,
    /// Rotation sweep; `None` selects the 36-angle default.
    pub angles: Option<Vec<f64>>,
    /// Number of trailing person groups reserved for the test split.
    pub test_people: usize,
    pub out_dir: PathBuf,
}

pub struct AugmentOutput {
    pub train_count: usize,
    pub test_count: usize,
    pub people: usize,
}

#[derive(Serialize)]
struct DatasetManifest {
    command: &'static str,
    source_dir: String,
    source_files: usize,
    people: Vec<String>,
    test_people: Vec<String>,
    normalization_range: (u8, u8),
    angles: Vec<f64>,
    train_images: usize,
    test_images: usize,
    image_side: usize,
    train_file: &'static str,
    test_file: Option<&'static str>,
}

// Person grouping convention: the first two '_'-separated tokens of the file
// stem ("person_03_sample_07" -> "person_03"), or the whole stem when the
// name has no second token.
fn person_key(stem: &str) -> String {
    let tokens: Vec<&str> = stem.split('_').collect();
    if tokens.len() >= 2 {
        format!("{}_{}", tokens[0], tokens[1])
    } else {
        stem.to_string()
    }
}

pub fn cmd_augment_faces(cmd: &AugmentCommand) -> Result<AugmentOutput> {
    let mut paths: Vec<PathBuf> = fs::read_dir(&cmd.source_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pgm"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::config(format!(
            "no .pgm files found in {}",
            cmd.source_dir.display()
        )));
    }

    let mut images = Vec::with_capacity(paths.len());
    let mut keys = Vec::with_capacity(paths.len());
    let mut side = 0usize;
    for path in &paths {
        let (w, h, bytes) = read_pgm(path)?;
        if w != h {
            return Err(Error::config(format!(
                "face source {} is {}x{}, expected square",
                path.display(),
                w,
                h
            )));
        }
        if side == 0 {
            side = w;
        } else if w != side {
            return Err(Error::config(format!(
                "face source {} is {}x{}, expected {side}x{side} like the rest",
                path.display(),
                w,
                h
            )));
        }
        images.push(bytes);
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        keys.push(person_key(&stem));
    }

    let raw = RawImages {
        images,
        width: side,
        height: side,
    };
    let range = intensity_range(&raw);
    let data = min_max_normalize(&raw)?;

    let mut people: Vec<String> = keys.clone();
    people.sort();
    people.dedup();
    if cmd.test_people > people.len() {
        return Err(Error::config(format!(
            "--test-people {} exceeds the {} distinct people found",
            cmd.test_people,
            people.len()
        )));
    }
    let test_set: Vec<String> = people[people.len() - cmd.test_people..].to_vec();

    let mut train_images = Vec::new();
    let mut test_images = Vec::new();
    for (img, key) in data.images().iter().zip(&keys) {
        if test_set.contains(key) {
            test_images.push(img.clone());
        } else {
            train_images.push(img.clone());
        }
    }

    let angles = cmd
        .angles
        .clone()
        .unwrap_or_else(default_rotation_angles);

    fs::create_dir_all(&cmd.out_dir)?;
    let augment_and_save = |imgs: Vec<Vec<f64>>, file: &str| -> Result<usize> {
        if imgs.is_empty() {
            return Ok(0);
        }
        let ds = ImageDataset::new(imgs, side, side, None)?;
        let augmented = build_augmented_faces(&ds, &angles)?;
        let bytes: Vec<Vec<u8>> = augmented
            .images()
            .iter()
            .map(|img| img.iter().map(|&p| quantize(p)).collect())
            .collect();
        save_idx_images(
            cmd.out_dir.join(file),
            &RawImages {
                images: bytes,
                width: augmented.width(),
                height: augmented.height(),
            },
        )?;
        Ok(augmented.len())
    };
    let train_count = augment_and_save(train_images, FACES_TRAIN_IDX)?;
    let test_count = augment_and_save(test_images, FACES_TEST_IDX)?;

    let manifest = DatasetManifest {
        command: "augment-faces",
        source_dir: cmd.source_dir.display().to_string(),
        source_files: paths.len(),
        people: people.clone(),
        test_people: test_set,
        normalization_range: range,
        angles,
        train_images: train_count,
        test_images: test_count,
        image_side: crate::data::AUGMENT_SIDE,
        train_file: FACES_TRAIN_IDX,
        test_file: (test_count > 0).then_some(FACES_TEST_IDX),
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(cmd.out_dir.join(DATASET_MANIFEST_FILE), json)?;

    Ok(AugmentOutput {
        train_count,
        test_count,
        people: people.len(),
    })
}

// ---------------------------------------------------------------------------
// synthetic corpus generators
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct GenFacesManifest {
    command: &'static str,
    people: usize,
    per_person: usize,
    seed: u64,
    image_side: usize,
    files: usize,
}

/// Writes `people * per_person` synthetic 64x64 faces as PGM files named
/// `person_PP_sample_SS.pgm`, ready for `augment-faces`.
pub fn cmd_gen_faces(people: usize, per_person: usize, seed: u64, out_dir: &Path) -> Result<usize> {
    if people == 0 || per_person == 0 {
        return Err(Error::config("need at least one person and one sample"));
    }
    let faces = gen_synthetic_faces(people, per_person, seed)?;
    fs::create_dir_all(out_dir)?;
    for (k, img) in faces.images().iter().enumerate() {
        let (p, s) = (k / per_person, k % per_person);
        let name = format!("person_{p:02}_sample_{s:02}.pgm");
        write_pgm(out_dir.join(name), faces.width(), faces.height(), img)?;
    }
    write_manifest(
        out_dir,
        &GenFacesManifest {
            command: "gen-synthetic-faces",
            people,
            per_person,
            seed,
            image_side: faces.width(),
            files: faces.len(),
        },
    )?;
    Ok(faces.len())
}

#[derive(Serialize)]
struct GenDigitsManifest {
    command: &'static str,
    count: usize,
    seed: u64,
    image_side: usize,
    images_file: &'static str,
    labels_file: &'static str,
}

/// Writes `count` synthetic labeled 28x28 digits as an IDX image/label pair.
pub fn cmd_gen_digits(count: usize, seed: u64, out_dir: &Path) -> Result<()> {
    if count == 0 {
        return Err(Error::config("need at least one digit image"));
    }
    let (raw, labels) = gen_synthetic_digits(count, seed);
    fs::create_dir_all(out_dir)?;
    save_idx_images(out_dir.join(DIGIT_IMAGES_IDX), &raw)?;
    save_idx_labels(out_dir.join(DIGIT_LABELS_IDX), &labels)?;
    write_manifest(
        out_dir,
        &GenDigitsManifest {
            command: "gen-synthetic-digits",
            count,
            seed,
            image_side: raw.width,
            images_file: DIGIT_IMAGES_IDX,
            labels_file: DIGIT_LABELS_IDX,
        },
    )?;
    Ok(())
}
