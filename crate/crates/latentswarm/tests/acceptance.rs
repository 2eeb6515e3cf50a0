//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS/FAIL line with its measured numbers (visible with
//! `cargo test --test acceptance -- --nocapture`).
//!
//! The two desk-scale benchmark criteria run on real MNIST IDX files when
//! `LATENTSWARM_MNIST_DIR` points at them (`train-images-idx3-ubyte` etc.);
//! otherwise they fall back to the crate's seeded synthetic digit corpus so
//! the full protocol still runs offline. The corpus in use is printed with
//! the results.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use latentswarm::cso::{self, CsoParams, Swarm};
use latentswarm::data::{
    build_augmented_faces, default_rotation_angles, gen_synthetic_digits, gen_synthetic_faces,
    load_idx_images, load_idx_labels, min_max_normalize, save_idx_images, ImageDataset, RawImages,
};
use latentswarm::eval::{compare, CompareConfig};
use latentswarm::net::{preset, DenseLayer, Network, TrainConfig};
use latentswarm::rbm::Rbm;
use latentswarm::recon::{fitness_of, reconstruct_cso};

fn report(criterion: &str, pass: bool, details: &str) {
    println!(
        "criterion {criterion}: {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {details}");
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness on a 20-10-20 network with 5 random images.
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_gradient_correctness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let net = Network::new(&[20, 10, 20], &mut rng).unwrap();
    let images: Vec<Vec<f64>> = (0..5)
        .map(|_| (0..20).map(|_| rng.random::<f64>()).collect())
        .collect();
    let data = ImageDataset::new(images.clone(), 5, 4, None).unwrap();

    // One full-batch epoch at lr = 1 makes (before - after) the analytic
    // mean gradient the training path actually applies.
    let mut trained = net.clone();
    let cfg = TrainConfig {
        learning_rate: 1.0,
        epochs: 1,
        batch_size: 5,
        seed: 0,
    };
    trained
        .train_epoch(&data, &cfg, &mut ChaCha8Rng::seed_from_u64(0))
        .unwrap();

    // Independent oracle: central finite differences through forward only.
    let mean_loss = |candidate: &Network| -> f64 {
        images
            .iter()
            .map(|img| {
                let out = candidate.forward(img).unwrap();
                out.iter()
                    .zip(img)
                    .map(|(o, t)| (o - t) * (o - t))
                    .sum::<f64>()
                    * 0.5
            })
            .sum::<f64>()
            / images.len() as f64
    };
    let eps = 1e-4;
    let mut worst = 0.0f64;
    for l in 0..net.layers().len() {
        let n_weights = net.layers()[l].weights().len();
        let n_params = n_weights + net.layers()[l].biases().len();
        for p in 0..n_params {
            let perturbed = |delta: f64| -> Network {
                let mut layers = net.layers().to_vec();
                let layer = &layers[l];
                let mut weights = layer.weights().to_vec();
                let mut biases = layer.biases().to_vec();
                if p < n_weights {
                    weights[p] += delta;
                } else {
                    biases[p - n_weights] += delta;
                }
                layers[l] =
                    DenseLayer::from_parts(layer.in_nodes(), layer.out_nodes(), weights, biases)
                        .unwrap();
                Network::from_layers(layers).unwrap()
            };
            let numeric = (mean_loss(&perturbed(eps)) - mean_loss(&perturbed(-eps))) / (2.0 * eps);
            let analytic = if p < n_weights {
                net.layers()[l].weights()[p] - trained.layers()[l].weights()[p]
            } else {
                net.layers()[l].biases()[p - n_weights] - trained.layers()[l].biases()[p - n_weights]
            };
            let rel = (numeric - analytic).abs() / (numeric.abs() + analytic.abs()).max(1e-8);
            worst = worst.max(rel);
        }
    }
    let elapsed = start.elapsed();
    report(
        "1 (gradient correctness)",
        worst < 1e-4 && elapsed < Duration::from_secs(5),
        &format!("max relative error {worst:.3e}, elapsed {elapsed:.2?}"),
    );
}

// ---------------------------------------------------------------------------
// 2. Optimizer sanity on the shifted sphere, median over 5 seeds.
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_cso_shifted_sphere() {
    let start = Instant::now();
    let shifted = |x: &[f64]| x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum::<f64>();
    let mut finals: Vec<f64> = (0..5)
        .map(|seed| {
            let params = CsoParams {
                swarm_size: 100,
                dim: 30,
                phi: 0.0,
                max_generations: 500,
                init_low: 0.0,
                init_high: 1.0,
                seed,
            };
            let (best, _) = cso::run(&params, shifted).unwrap();
            best.fitness.unwrap()
        })
        .collect();
    finals.sort_by(|a, b| a.total_cmp(b));
    let median = finals[2];
    let elapsed = start.elapsed();
    report(
        "2 (optimizer sanity)",
        median < 1e-2 && elapsed < Duration::from_secs(10),
        &format!("median final fitness {median:.3e} over 5 seeds, elapsed {elapsed:.2?}"),
    );
}

// ---------------------------------------------------------------------------
// 3. Structural invariants over 100 generations.
// ---------------------------------------------------------------------------

fn check_swarm_invariants<F>(fitness: F, seed: u64) -> usize
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let params = CsoParams {
        swarm_size: 100,
        dim: 30,
        max_generations: 100,
        seed,
        ..CsoParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut swarm = Swarm::init(&params, &mut rng).unwrap();
    let mut prev_best = f64::INFINITY;
    let mut checked = 0usize;
    for _ in 0..100 {
        swarm.evaluate(&fitness).unwrap();
        let before = swarm.particles().to_vec();
        swarm.step(&fitness, &mut rng).unwrap();

        let best = *swarm.history().last().unwrap();
        assert!(best <= prev_best, "best fitness increased: {prev_best} -> {best}");
        prev_best = best;

        let survivors = swarm
            .particles()
            .iter()
            .filter(|q| before.contains(q))
            .count();
        assert_eq!(survivors, 50, "exactly n/2 particles must pass verbatim");
        assert_eq!(swarm.particles().len(), 100, "swarm size must not change");
        checked += 1;
    }
    checked
}

#[test]
fn criterion_3_cso_structural_invariants() {
    let rugged = |x: &[f64]| {
        x.iter()
            .map(|v| (v - 0.3) * (v - 0.3) + 0.1 * (7.0 * v).sin().powi(2))
            .sum::<f64>()
    };
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();

    let checked_generations = check_swarm_invariants(rugged, 5) + check_swarm_invariants(sphere, 6);
    report(
        "3 (structural invariants)",
        checked_generations == 200,
        &format!("monotone best, n/2 verbatim survivors, constant size over {checked_generations} generations"),
    );
}

// ---------------------------------------------------------------------------
// 4. Decoder-inversion recovery against a dense grid-search oracle.
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_decoder_inversion_recovery() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let decoder = Network::new(&[2, 16], &mut rng).unwrap();
    let x0 = [0.3, 0.7];
    let target = decoder.forward(&x0).unwrap();

    // Oracle: dense 200x200 grid over [0,1]^2 confirms the optimum is ~0 at x0.
    let mut grid_best = f64::INFINITY;
    let mut grid_arg = [0.0, 0.0];
    for i in 0..200 {
        for j in 0..200 {
            let x = [i as f64 / 199.0, j as f64 / 199.0];
            let f = fitness_of(&decoder, &x, &target).unwrap();
            if f < grid_best {
                grid_best = f;
                grid_arg = x;
            }
        }
    }
    let arg_err = ((grid_arg[0] - x0[0]).powi(2) + (grid_arg[1] - x0[1]).powi(2)).sqrt();
    assert!(
        grid_best < 1e-2 && arg_err < 0.01,
        "grid oracle: best {grid_best:.3e} at distance {arg_err:.4} from x0"
    );

    let params = CsoParams {
        swarm_size: 100,
        dim: 2,
        max_generations: 200,
        seed: 405,
        ..CsoParams::default()
    };
    let out = reconstruct_cso(&decoder, &target, &params).unwrap();
    let elapsed = start.elapsed();
    report(
        "4 (decoder inversion)",
        out.final_fitness < 0.05
            && out.final_fitness <= out.fitness_history[0]
            && elapsed < Duration::from_secs(5),
        &format!(
            "grid optimum {grid_best:.2e} at x0±{arg_err:.3}, swarm reached {:.3e} (initial {:.3}), elapsed {elapsed:.2?}",
            out.final_fitness, out.fitness_history[0]
        ),
    );
}

// ---------------------------------------------------------------------------
// 5 & 6. Desk-scale directional reproduction of the paper's comparison.
// ---------------------------------------------------------------------------

// Returns (train, test, corpus name). Real MNIST when provided, synthetic
// digits otherwise; both flow through the same IDX files and loaders.
fn digit_corpus(n_train: usize, n_test: usize) -> (ImageDataset, ImageDataset, String) {
    if let Ok(dir) = std::env::var("LATENTSWARM_MNIST_DIR") {
        let dir = PathBuf::from(dir);
        let train_images = dir.join("train-images-idx3-ubyte");
        let test_images = dir.join("t10k-images-idx3-ubyte");
        if train_images.is_file() && test_images.is_file() {
            let train_raw = load_idx_images(&train_images).unwrap();
            let mut train = min_max_normalize(&train_raw).unwrap();
            if let Ok(labels) = load_idx_labels(dir.join("train-labels-idx1-ubyte")) {
                train = train.with_labels(labels).unwrap();
            }
            let test_raw = load_idx_images(&test_images).unwrap();
            let mut test = min_max_normalize(&test_raw).unwrap();
            if let Ok(labels) = load_idx_labels(dir.join("t10k-labels-idx1-ubyte")) {
                test = test.with_labels(labels).unwrap();
            }
            return (
                train.take(n_train).unwrap(),
                test.take(n_test).unwrap(),
                "mnist".to_string(),
            );
        }
    }
    // Synthetic fallback, still exercising the IDX write/read path.
    let dir = tempfile::tempdir().unwrap();
    let (train_raw, train_labels) = gen_synthetic_digits(n_train, 1);
    let (test_raw, test_labels) = gen_synthetic_digits(n_test, 2);
    let train_path = dir.path().join("train.idx");
    let test_path = dir.path().join("test.idx");
    save_idx_images(&train_path, &train_raw).unwrap();
    save_idx_images(&test_path, &test_raw).unwrap();
    let train = min_max_normalize(&load_idx_images(&train_path).unwrap())
        .unwrap()
        .with_labels(train_labels)
        .unwrap();
    let test = min_max_normalize(&load_idx_images(&test_path).unwrap())
        .unwrap()
        .with_labels(test_labels)
        .unwrap();
    (train, test, "synthetic-digits".to_string())
}

fn directional_run(widths: &[usize], epochs: usize, train_seed: u64) -> (f64, f64, f64, String) {
    let (train, test, corpus) = digit_corpus(10_000, 50);
    let mut net = Network::autoencoder(widths, &mut ChaCha8Rng::seed_from_u64(train_seed)).unwrap();
    let cfg = TrainConfig {
        learning_rate: 0.1,
        epochs,
        batch_size: 32,
        seed: train_seed,
    };
    net.train(&train, &cfg).unwrap();

    let compare_cfg = CompareConfig {
        num_test: 50,
        swarm_size: 100,
        generations: 100,
        master_seed: 1234,
        ..CompareConfig::default()
    };
    let outcome = compare(&net, &test, &compare_cfg).unwrap();
    (
        outcome.report.ae.median,
        outcome.report.cso.median,
        outcome.report.win_rate,
        corpus,
    )
}

#[test]
fn criterion_5_shallow_directional_reproduction() {
    let start = Instant::now();
    let (ae_median, cso_median, win_rate, corpus) =
        directional_run(&preset("mnist-30").unwrap(), 30, 42);
    let elapsed = start.elapsed();
    // Both numbers are reported whether or not the criterion holds.
    println!(
        "criterion 5 measurements [{corpus}]: median ae {ae_median:.4}, median cso {cso_median:.4}, win rate {win_rate:.3}, elapsed {elapsed:.2?}"
    );
    report(
        "5 (shallow directional reproduction)",
        cso_median <= ae_median && win_rate >= 0.5 && elapsed < Duration::from_secs(900),
        &format!(
            "[{corpus}] median cso {cso_median:.4} <= median ae {ae_median:.4}: {}, win rate {win_rate:.3} >= 0.5: {}",
            cso_median <= ae_median,
            win_rate >= 0.5
        ),
    );
}

#[test]
fn criterion_6_deep_parity() {
    let start = Instant::now();
    let (ae_median, cso_median, win_rate, corpus) =
        directional_run(&preset("mnist-deep").unwrap(), 5, 43);
    let elapsed = start.elapsed();
    println!(
        "criterion 6 measurements [{corpus}]: median ae {ae_median:.4}, median cso {cso_median:.4}, win rate {win_rate:.3}, elapsed {elapsed:.2?}"
    );
    report(
        "6 (deep parity)",
        cso_median <= 1.10 * ae_median && elapsed < Duration::from_secs(1800),
        &format!(
            "[{corpus}] median cso {cso_median:.4} <= 1.10 * median ae ({:.4})",
            1.10 * ae_median
        ),
    );
}

// ---------------------------------------------------------------------------
// 7. RBM unit identities.
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_rbm_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let rbm = Rbm::new(7, 4, &mut rng).unwrap();

    let energy_zero = rbm.energy(&[0.0; 7], &[0.0; 4]).unwrap() == 0.0;

    let flat = Rbm::from_parts(3, 2, vec![0.0; 6], vec![0.0; 3], vec![0.0; 2]).unwrap();
    let half_probs = flat.hidden_probability(&[0.9, 0.1, 0.5]).unwrap() == vec![0.5; 2]
        && flat.visible_probability(&[1.0, 0.0]).unwrap() == vec![0.5; 3];

    let h = [1.0, 0.0, 1.0, 0.0];
    let transpose_symmetry =
        rbm.visible_probability(&h).unwrap() == rbm.transposed().hidden_probability(&h).unwrap();

    let mut updated = rbm.clone();
    let v: Vec<f64> = (0..7).map(|i| (i % 2) as f64).collect();
    updated
        .cd1_update(&[&v], 0.0, &mut ChaCha8Rng::seed_from_u64(1))
        .unwrap();
    let lr_zero_identity = updated == rbm;

    report(
        "7 (RBM identities)",
        energy_zero && half_probs && transpose_symmetry && lr_zero_identity,
        &format!(
            "E(0,0)=0: {energy_zero}, zero-parameter probs 0.5: {half_probs}, transpose symmetry: {transpose_symmetry}, lr-0 identity: {lr_zero_identity}"
        ),
    );
}

// ---------------------------------------------------------------------------
// 8. Data pipeline: IDX round-trip and the 10,800-image augmentation build.
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_data_pipeline() {
    let start = Instant::now();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roundtrip.idx");
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let raw = RawImages {
        images: (0..17)
            .map(|_| (0..35).map(|_| rng.random::<u8>()).collect())
            .collect(),
        width: 7,
        height: 5,
    };
    save_idx_images(&path, &raw).unwrap();
    let first = std::fs::read(&path).unwrap();
    let loaded = load_idx_images(&path).unwrap();
    save_idx_images(&path, &loaded).unwrap();
    let roundtrip_exact = loaded == raw && std::fs::read(&path).unwrap() == first;

    let faces = gen_synthetic_faces(30, 10, 2024).unwrap();
    let augmented = build_augmented_faces(&faces, &default_rotation_angles()).unwrap();
    let count_ok = augmented.len() == 10_800;
    let shape_ok = augmented.pixel_count() == 484;
    let range_ok = augmented
        .images()
        .iter()
        .all(|img| img.iter().all(|&p| (0.0..=1.0).contains(&p)));

    let elapsed = start.elapsed();
    report(
        "8 (data pipeline)",
        roundtrip_exact && count_ok && shape_ok && range_ok && elapsed < Duration::from_secs(30),
        &format!(
            "IDX round-trip byte-exact: {roundtrip_exact}, {} images of {} pixels (in [0,1]: {range_ok}), elapsed {elapsed:.2?}",
            augmented.len(),
            augmented.pixel_count()
        ),
    );
}

// ---------------------------------------------------------------------------
// 9. Determinism: identical seeds give byte-identical CSV and PGM outputs.
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_deterministic_outputs() {
    use latentswarm::eval::{
        cmd_compare, cmd_train, CompareCommand, TrainCommand, AE_GRID, CSO_GRID, MODEL_FILE,
        PER_IMAGE_FILE, SUMMARY_FILE, TARGETS_GRID, TRAIN_LOSS_FILE,
    };

    let dir = tempfile::tempdir().unwrap();
    let (raw, labels) = gen_synthetic_digits(220, 77);
    let images_path = dir.path().join("images.idx");
    let labels_path = dir.path().join("labels.idx");
    save_idx_images(&images_path, &raw).unwrap();
    latentswarm::data::save_idx_labels(&labels_path, &labels).unwrap();

    let run = |tag: &str| -> PathBuf {
        let out_train = dir.path().join(format!("train_{tag}"));
        cmd_train(&TrainCommand {
            dataset: images_path.clone(),
            labels: Some(labels_path.clone()),
            widths: vec![784, 16, 784],
            arch_name: "custom".to_string(),
            train: TrainConfig {
                learning_rate: 0.1,
                epochs: 2,
                batch_size: 32,
                seed: 9,
            },
            pretrain_rbm: false,
            out_dir: out_train.clone(),
        })
        .unwrap();
        let out_cmp = dir.path().join(format!("cmp_{tag}"));
        cmd_compare(&CompareCommand {
            model: out_train.join(MODEL_FILE),
            dataset: images_path.clone(),
            labels: Some(labels_path.clone()),
            cfg: CompareConfig {
                num_test: 6,
                swarm_size: 12,
                generations: 8,
                master_seed: 5,
                ..CompareConfig::default()
            },
            out_dir: out_cmp.clone(),
        })
        .unwrap();
        out_cmp
    };

    let a = run("a");
    let b = run("b");
    let mut all_equal = true;
    for file in [PER_IMAGE_FILE, SUMMARY_FILE, TARGETS_GRID, AE_GRID, CSO_GRID] {
        let left = std::fs::read(a.join(file)).unwrap();
        let right = std::fs::read(b.join(file)).unwrap();
        if left != right {
            all_equal = false;
            println!("criterion 9: {file} differs between identical runs");
        }
    }
    // The training artifacts must agree too.
    for file in [MODEL_FILE, TRAIN_LOSS_FILE] {
        let left = std::fs::read(dir.path().join("train_a").join(file)).unwrap();
        let right = std::fs::read(dir.path().join("train_b").join(file)).unwrap();
        if left != right {
            all_equal = false;
            println!("criterion 9: {file} differs between identical runs");
        }
    }
    report(
        "9 (determinism)",
        all_equal,
        "re-running train + compare with the same seeds reproduced every CSV/PGM/model byte",
    );
}
