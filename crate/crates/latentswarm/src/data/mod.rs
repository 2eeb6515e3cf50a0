//! Dataset ingestion and preparation: IDX parsing, min-max normalization,
//! PGM image I/O, and the rotate/subsample face-augmentation pipeline.

mod augment;
mod idx;
mod pgm;
mod synthetic;

pub use augment::{
    build_augmented_faces, default_rotation_angles, rotate_image, subsample, AUGMENT_SIDE,
};
pub use idx::{load_idx_images, load_idx_labels, save_idx_images, save_idx_labels, RawImages};
pub use pgm::{quantize, read_pgm, write_pgm, write_pgm_grid};
pub use synthetic::{gen_synthetic_digits, gen_synthetic_faces};

use crate::error::{Error, Result};

/// Flattened grayscale images with pixels in `[0, 1]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageDataset {
    images: Vec<Vec<f64>>,
    width: usize,
    height: usize,
    labels: Option<Vec<u8>>,
}

impl ImageDataset {
    pub fn new(
        images: Vec<Vec<f64>>,
        width: usize,
        height: usize,
        labels: Option<Vec<u8>>,
    ) -> Result<ImageDataset> {
        let pixels = width
            .checked_mul(height)
            .ok_or_else(|| Error::config("image dimensions overflow"))?;
        if pixels == 0 {
            return Err(Error::config("image dimensions must be positive"));
        }
        for (i, image) in images.iter().enumerate() {
            if image.len() != pixels {
                return Err(Error::dim("dataset image", pixels, image.len()));
            }
            if image.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::config(format!(
                    "image {i} has pixels outside [0, 1]"
                )));
            }
        }
        if let Some(l) = &labels {
            if l.len() != images.len() {
                return Err(Error::dim("dataset labels", images.len(), l.len()));
            }
        }
        Ok(ImageDataset {
            images,
            width,
            height,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn image(&self, index: usize) -> &[f64] {
        &self.images[index]
    }

    pub fn images(&self) -> &[Vec<f64>] {
        &self.images
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn label(&self, index: usize) -> Option<u8> {
        self.labels.as_ref().map(|l| l[index])
    }

    /// Attaches labels, replacing any existing ones.
    pub fn with_labels(mut self, labels: Vec<u8>) -> Result<ImageDataset> {
        if labels.len() != self.images.len() {
            return Err(Error::dim("dataset labels", self.images.len(), labels.len()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// A dataset holding only the first `n` images (and labels).
    pub fn take(&self, n: usize) -> Result<ImageDataset> {
        if n > self.len() {
            return Err(Error::config(format!(
                "requested {n} images but the dataset has {}",
                self.len()
            )));
        }
        Ok(ImageDataset {
            images: self.images[..n].to_vec(),
            width: self.width,
            height: self.height,
            labels: self.labels.as_ref().map(|l| l[..n].to_vec()),
        })
    }
}

/// Scales raw byte images into `[0, 1]` by the dataset-global min and max.
///
/// A constant dataset (max == min) maps to all zeros with a logged warning
/// rather than failing, so degenerate synthetic inputs keep flowing.
pub fn min_max_normalize(raw: &RawImages) -> Result<ImageDataset> {
    if raw.images.is_empty() {
        return Err(Error::config("cannot normalize an empty dataset"));
    }
    let mut lo = u8::MAX;
    let mut hi = u8::MIN;
    for image in &raw.images {
        for &p in image {
            lo = lo.min(p);
            hi = hi.max(p);
        }
    }
    let images = if hi == lo {
        log::warn!("dataset has a degenerate intensity range ({lo}..={hi}); mapping to zeros");
        raw.images
            .iter()
            .map(|img| vec![0.0; img.len()])
            .collect()
    } else {
        let span = (hi - lo) as f64;
        raw.images
            .iter()
            .map(|img| img.iter().map(|&p| (p - lo) as f64 / span).collect())
            .collect()
    };
    ImageDataset::new(images, raw.width, raw.height, None)
}

/// Normalization bounds actually used for a raw image set, for manifests.
pub fn intensity_range(raw: &RawImages) -> (u8, u8) {
    let mut lo = u8::MAX;
    let mut hi = u8::MIN;
    for image in &raw.images {
        for &p in image {
            lo = lo.min(p);
            hi = hi.max(p);
        }
    }
    (lo, hi)
}
