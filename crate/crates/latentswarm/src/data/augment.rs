//! Rotation and bilinear-resampling augmentation for square face images.

use super::ImageDataset;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecMode};

/// Side length the augmentation pipeline subsamples to.
pub const AUGMENT_SIDE: usize = 22;

/// The 36 augmentation angles: -90, -80, ..., +260 degrees.
///
/// The sweep covers a full turn in 10-degree steps; +270 would repeat -90,
/// so the sequence stops one step short.
pub fn default_rotation_angles() -> Vec<f64> {
    (0..36).map(|k| -90.0 + 10.0 * k as f64).collect()
}

/// Rotates a square image about its center by `angle_degrees`, sampling
/// bilinearly with black outside the frame. With the usual top-left image
/// origin, positive angles turn the content clockwise.
pub fn rotate_image(img: &[f64], side: usize, angle_degrees: f64) -> Result<Vec<f64>> {
    if img.len() != side * side {
        return Err(Error::dim("rotate image", side * side, img.len()));
    }
    if side == 0 {
        return Err(Error::config("cannot rotate an empty image"));
    }
    let theta = angle_degrees.to_radians();
    let (sin, cos) = theta.sin_cos();
    let center = (side as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(img.len());
    for y in 0..side {
        for x in 0..side {
            let dx = x as f64 - center;
            let dy = y as f64 - center;
            // Inverse map: rotate the destination offset by -theta.
            let sx = center + cos * dx + sin * dy;
            let sy = center - sin * dx + cos * dy;
            out.push(sample_zero_fill(img, side, side, sx, sy));
        }
    }
    Ok(out)
}

/// Bilinear resampling onto a `target_w` x `target_h` grid with
/// center-aligned pixels and edge clamping. Identity when the target
/// matches the source.
pub fn subsample(
    img: &[f64],
    src_w: usize,
    src_h: usize,
    target_w: usize,
    target_h: usize,
) -> Result<Vec<f64>> {
    if img.len() != src_w * src_h {
        return Err(Error::dim("subsample image", src_w * src_h, img.len()));
    }
    if target_w == 0 || target_h == 0 {
        return Err(Error::config("subsample target must be positive"));
    }
    if target_w > src_w || target_h > src_h {
        return Err(Error::config(format!(
            "subsample target {target_w}x{target_h} exceeds source {src_w}x{src_h}"
        )));
    }
    let scale_x = src_w as f64 / target_w as f64;
    let scale_y = src_h as f64 / target_h as f64;
    let mut out = Vec::with_capacity(target_w * target_h);
    for y in 0..target_h {
        let sy = ((y as f64 + 0.5) * scale_y - 0.5).clamp(0.0, src_h as f64 - 1.0);
        for x in 0..target_w {
            let sx = ((x as f64 + 0.5) * scale_x - 0.5).clamp(0.0, src_w as f64 - 1.0);
            out.push(sample_edge_clamp(img, src_w, src_h, sx, sy));
        }
    }
    Ok(out)
}

fn sample_zero_fill(img: &[f64], w: usize, h: usize, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let fetch = |xi: f64, yi: f64| -> f64 {
        if xi < 0.0 || yi < 0.0 || xi >= w as f64 || yi >= h as f64 {
            0.0
        } else {
            img[yi as usize * w + xi as usize]
        }
    };
    let v00 = fetch(x0, y0);
    let v10 = fetch(x0 + 1.0, y0);
    let v01 = fetch(x0, y0 + 1.0);
    let v11 = fetch(x0 + 1.0, y0 + 1.0);
    (v00 * (1.0 - fx) + v10 * fx) * (1.0 - fy) + (v01 * (1.0 - fx) + v11 * fx) * fy
}

fn sample_edge_clamp(img: &[f64], w: usize, h: usize, x: f64, y: f64) -> f64 {
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let v00 = img[y0 * w + x0];
    let v10 = img[y0 * w + x1];
    let v01 = img[y1 * w + x0];
    let v11 = img[y1 * w + x1];
    (v00 * (1.0 - fx) + v10 * fx) * (1.0 - fy) + (v01 * (1.0 - fx) + v11 * fx) * fy
}

/// Rotates every source image by every angle and subsamples the result to
/// 22x22, producing `sources.len() * angles.len()` images in source-major
/// order. Labels, when present, are inherited from the source image.
pub fn build_augmented_faces(source: &ImageDataset, angles: &[f64]) -> Result<ImageDataset> {
    if source.width() != source.height() {
        return Err(Error::config(format!(
            "augmentation requires square sources, got {}x{}",
            source.width(),
            source.height()
        )));
    }
    if angles.is_empty() {
        return Err(Error::config("augmentation needs at least one angle"));
    }
    let side = source.width();
    let total = source.len() * angles.len();
    let images = map_indexed(ExecMode::default(), total, |k| {
        let (img_idx, angle_idx) = (k / angles.len(), k % angles.len());
        let rotated = rotate_image(source.image(img_idx), side, angles[angle_idx])
            .expect("source squareness checked above");
        subsample(&rotated, side, side, AUGMENT_SIDE, AUGMENT_SIDE)
            .expect("fixed 22x22 target never exceeds the source")
    });
    let labels = source.labels().map(|ls| {
        ls.iter()
            .flat_map(|&l| std::iter::repeat_n(l, angles.len()))
            .collect()
    });
    ImageDataset::new(images, AUGMENT_SIDE, AUGMENT_SIDE, labels)
}
