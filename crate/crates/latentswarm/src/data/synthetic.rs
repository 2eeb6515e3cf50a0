//! Seeded synthetic image corpora, so the full pipeline runs end to end
//! without redistributing any original dataset: 64x64 ellipse-composition
//! faces and 28x28 stroke-rendered digits.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ImageDataset, RawImages};
use crate::error::Result;
use crate::exec::{map_indexed, ExecMode};
use crate::seed::derive_seed;

const FACE_SIDE: usize = 64;
const DIGIT_SIDE: usize = 28;

/// Generates `people * per_person` synthetic 64x64 grayscale faces.
///
/// Every person has a stable base geometry (head shape, feature placement,
/// lighting) drawn from `(seed, person)`; individual samples jitter around
/// it, so images of one person resemble each other the way a photo session
/// would. Labels carry the person index.
pub fn gen_synthetic_faces(people: usize, per_person: usize, seed: u64) -> Result<ImageDataset> {
    let total = people * per_person;
    let images = map_indexed(ExecMode::default(), total, |k| {
        render_face(seed, k / per_person, k % per_person)
    });
    let labels = (0..total).map(|k| (k / per_person) as u8).collect();
    ImageDataset::new(images, FACE_SIDE, FACE_SIDE, Some(labels))
}

#[derive(Clone)]
struct FaceParams {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    skin: f64,
    shade: f64,
    bg_top: f64,
    bg_bot: f64,
    eye_dx: f64,
    eye_dy: f64,
    eye_r: f64,
    eye_dark: f64,
    mouth_w: f64,
    mouth_h: f64,
    mouth_dy: f64,
    mouth_dark: f64,
    hair_line: f64,
    hair_dark: f64,
}

fn face_params(rng: &mut ChaCha8Rng) -> FaceParams {
    FaceParams {
        cx: 31.5 + rng.random_range(-2.5..2.5),
        cy: 33.5 + rng.random_range(-2.5..2.5),
        rx: rng.random_range(15.0..20.0),
        ry: rng.random_range(21.0..26.0),
        skin: rng.random_range(0.58..0.80),
        shade: rng.random_range(-0.22..0.22),
        bg_top: rng.random_range(0.05..0.20),
        bg_bot: rng.random_range(0.10..0.30),
        eye_dx: rng.random_range(0.36..0.50),
        eye_dy: rng.random_range(0.28..0.40),
        eye_r: rng.random_range(1.8..3.0),
        eye_dark: rng.random_range(0.05..0.18),
        mouth_w: rng.random_range(4.0..7.0),
        mouth_h: rng.random_range(1.0..2.2),
        mouth_dy: rng.random_range(0.40..0.52),
        mouth_dark: rng.random_range(0.10..0.30),
        hair_line: rng.random_range(0.45..0.65),
        hair_dark: rng.random_range(0.08..0.35),
    }
}

fn jittered(base: &FaceParams, rng: &mut ChaCha8Rng) -> FaceParams {
    let mut p = base.clone();
    let j = |amount: f64, rng: &mut ChaCha8Rng| rng.random_range(-amount..amount);
    p.cx += j(1.5, rng);
    p.cy += j(1.5, rng);
    p.rx += j(1.0, rng);
    p.ry += j(1.0, rng);
    p.skin = (p.skin + j(0.04, rng)).clamp(0.3, 0.95);
    p.shade += j(0.05, rng);
    p.mouth_w += j(0.8, rng);
    p.mouth_dy += j(0.02, rng);
    p.eye_r = (p.eye_r + j(0.3, rng)).max(1.0);
    p
}

// Soft-edged ellipse coverage for a pixel offset from the center.
fn ellipse_alpha(dx: f64, dy: f64, rx: f64, ry: f64) -> f64 {
    let r = ((dx / rx) * (dx / rx) + (dy / ry) * (dy / ry)).sqrt();
    (((1.0 - r) * rx.min(ry)) / 1.5 + 0.5).clamp(0.0, 1.0)
}

fn render_face(seed: u64, person: usize, sample: usize) -> Vec<f64> {
    let mut person_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, person as u64));
    let base = face_params(&mut person_rng);
    let mut sample_rng = ChaCha8Rng::seed_from_u64(derive_seed(
        derive_seed(seed, person as u64),
        sample as u64 + 1,
    ));
    let p = jittered(&base, &mut sample_rng);

    let mut img = vec![0.0; FACE_SIDE * FACE_SIDE];
    let blend = |v: &mut f64, alpha: f64, color: f64| {
        *v = *v * (1.0 - alpha) + alpha * color;
    };
    for y in 0..FACE_SIDE {
        for x in 0..FACE_SIDE {
            let fx = x as f64;
            let fy = y as f64;
            let mut v = p.bg_top + (p.bg_bot - p.bg_top) * fy / (FACE_SIDE - 1) as f64;

            let dx = fx - p.cx;
            let dy = fy - p.cy;
            let head = ellipse_alpha(dx, dy, p.rx, p.ry);
            if head > 0.0 {
                let lit = (p.skin * (1.0 + p.shade * dx / p.rx)).clamp(0.0, 1.0);
                blend(&mut v, head, lit);

                let hairline = p.cy - p.hair_line * p.ry;
                let hair_band = ((hairline - fy) / 2.0 + 0.5).clamp(0.0, 1.0);
                let hair = ellipse_alpha(dx, dy, p.rx * 1.06, p.ry * 1.06) * hair_band;
                blend(&mut v, hair, p.hair_dark);

                // Eyes, nose, mouth sit on the face plane.
                for side in [-1.0, 1.0] {
                    let ex = p.cx + side * p.eye_dx * p.rx;
                    let ey = p.cy - p.eye_dy * p.ry;
                    let a = ellipse_alpha(fx - ex, fy - ey, p.eye_r, p.eye_r * 0.7);
                    blend(&mut v, a, p.eye_dark);
                }
                let nose = ellipse_alpha(dx, fy - (p.cy + 0.08 * p.ry), 1.1, 3.0);
                blend(&mut v, nose * 0.6, p.skin * 0.8);
                let mouth = ellipse_alpha(
                    dx,
                    fy - (p.cy + p.mouth_dy * p.ry),
                    p.mouth_w,
                    p.mouth_h,
                );
                blend(&mut v, mouth, p.mouth_dark);
            }
            img[y * FACE_SIDE + x] = v.clamp(0.0, 1.0);
        }
    }
    img
}

/// Generates `count` labeled synthetic 28x28 digit images as raw bytes
/// (black background, bright strokes). Labels cycle `0..=9` by index; each
/// image applies a seeded random affine to a fixed per-digit stroke
/// skeleton, so the corpus has the intra-class variation an autoencoder
/// needs while staying fully reproducible.
pub fn gen_synthetic_digits(count: usize, seed: u64) -> (RawImages, Vec<u8>) {
    let images = map_indexed(ExecMode::default(), count, |k| {
        render_digit((k % 10) as u8, derive_seed(seed, k as u64))
    });
    let labels = (0..count).map(|k| (k % 10) as u8).collect();
    (
        RawImages {
            images,
            width: DIGIT_SIDE,
            height: DIGIT_SIDE,
        },
        labels,
    )
}

type Point = (f64, f64);

// Sampled elliptical arc in unit coordinates; angles in degrees, screen
// orientation (y grows downward).
fn arc(cx: f64, cy: f64, rx: f64, ry: f64, from_deg: f64, to_deg: f64, steps: usize) -> Vec<Point> {
    (0..=steps)
        .map(|i| {
            let t = from_deg + (to_deg - from_deg) * i as f64 / steps as f64;
            let rad = t.to_radians();
            (cx + rx * rad.cos(), cy + ry * rad.sin())
        })
        .collect()
}

fn digit_strokes(digit: u8) -> Vec<Vec<Point>> {
    match digit {
        0 => vec![arc(0.5, 0.5, 0.24, 0.36, 0.0, 360.0, 36)],
        1 => vec![
            vec![(0.38, 0.26), (0.52, 0.13), (0.52, 0.87)],
            vec![(0.38, 0.87), (0.66, 0.87)],
        ],
        2 => vec![
            arc(0.5, 0.32, 0.22, 0.2, 180.0, 360.0, 16),
            vec![(0.72, 0.32), (0.30, 0.86)],
            vec![(0.30, 0.86), (0.74, 0.86)],
        ],
        3 => vec![
            arc(0.46, 0.31, 0.2, 0.19, 210.0, 90.0, 16),
            arc(0.46, 0.68, 0.22, 0.19, 270.0, 150.0, 16),
        ],
        4 => vec![
            vec![(0.62, 0.13), (0.27, 0.62)],
            vec![(0.27, 0.62), (0.76, 0.62)],
            vec![(0.62, 0.13), (0.62, 0.87)],
        ],
        5 => vec![
            vec![(0.70, 0.14), (0.35, 0.14)],
            vec![(0.35, 0.14), (0.34, 0.46)],
            arc(0.48, 0.65, 0.22, 0.21, 250.0, 160.0 + 360.0, 20),
        ],
        6 => vec![
            arc(0.52, 0.44, 0.22, 0.32, 235.0, 180.0, 14),
            arc(0.48, 0.67, 0.18, 0.19, 0.0, 360.0, 24),
        ],
        7 => vec![
            vec![(0.28, 0.15), (0.73, 0.15)],
            vec![(0.73, 0.15), (0.42, 0.87)],
        ],
        8 => vec![
            arc(0.5, 0.31, 0.17, 0.17, 0.0, 360.0, 24),
            arc(0.5, 0.67, 0.21, 0.19, 0.0, 360.0, 24),
        ],
        9 => vec![
            arc(0.50, 0.33, 0.19, 0.20, 0.0, 360.0, 24),
            vec![(0.69, 0.35), (0.66, 0.62), (0.55, 0.87)],
        ],
        _ => unreachable!("labels cycle 0..=9"),
    }
}

fn render_digit(digit: u8, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle: f64 = rng.random_range(-0.20..0.20);
    let scale_x = rng.random_range(0.80..1.10);
    let scale_y = rng.random_range(0.80..1.10);
    let shear = rng.random_range(-0.15..0.15);
    let t_x = rng.random_range(-0.05..0.05);
    let t_y = rng.random_range(-0.05..0.05);
    let thickness = rng.random_range(0.85..1.55);
    let brightness = rng.random_range(0.75..1.0);

    let (sin, cos) = angle.sin_cos();
    let place = |p: Point| -> Point {
        // Center, shear, scale, rotate, translate; then into pixel space.
        let (mut x, mut y) = (p.0 - 0.5, p.1 - 0.5);
        x += shear * y;
        x *= scale_x;
        y *= scale_y;
        let (rx, ry) = (cos * x - sin * y, sin * x + cos * y);
        (
            (rx + 0.5 + t_x) * (DIGIT_SIDE - 1) as f64,
            (ry + 0.5 + t_y) * (DIGIT_SIDE - 1) as f64,
        )
    };

    let segments: Vec<(Point, Point)> = digit_strokes(digit)
        .into_iter()
        .flat_map(|poly| {
            poly.windows(2)
                .map(|w| (place(w[0]), place(w[1])))
                .collect::<Vec<_>>()
        })
        .collect();

    let mut img = vec![0u8; DIGIT_SIDE * DIGIT_SIDE];
    for y in 0..DIGIT_SIDE {
        for x in 0..DIGIT_SIDE {
            let p = (x as f64, y as f64);
            let mut d = f64::INFINITY;
            for &(a, b) in &segments {
                d = d.min(segment_distance(p, a, b));
                if d == 0.0 {
                    break;
                }
            }
            let v = brightness * ((thickness - d) / 0.9 + 0.5).clamp(0.0, 1.0);
            img[y * DIGIT_SIDE + x] = (255.0 * v).round() as u8;
        }
    }
    img
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (px, py) = (p.0 - a.0, p.1 - a.1);
    let (bx, by) = (b.0 - a.0, b.1 - a.1);
    let len2 = bx * bx + by * by;
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((px * bx + py * by) / len2).clamp(0.0, 1.0)
    };
    let (dx, dy) = (px - t * bx, py - t * by);
    (dx * dx + dy * dy).sqrt()
}
