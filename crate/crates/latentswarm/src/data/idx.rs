//! IDX container parsing and writing (the MNIST on-disk format):
//! a big-endian magic number, dimension sizes, then raw bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

const IMAGE_MAGIC: u32 = 2051;
const LABEL_MAGIC: u32 = 2049;

/// Unnormalized byte images straight out of an IDX file.
#[derive(Clone, Debug, PartialEq)]
pub struct RawImages {
    pub images: Vec<Vec<u8>>,
    pub width: usize,
    pub height: usize,
}

/// Reads an IDX image file: magic 2051, count, rows, cols, payload.
pub fn load_idx_images(path: impl AsRef<Path>) -> Result<RawImages> {
    let label = path.as_ref().display().to_string();
    let mut r = BufReader::new(File::open(path.as_ref())?);
    let magic = read_u32_be(&mut r, &label)?;
    if magic != IMAGE_MAGIC {
        let hint = if magic == LABEL_MAGIC {
            " (this magic denotes an IDX label file)"
        } else {
            ""
        };
        return Err(Error::Format {
            path: label,
            reason: format!("expected image magic {IMAGE_MAGIC}, got {magic}{hint}"),
        });
    }
    let count = read_u32_be(&mut r, &label)? as usize;
    let rows = read_u32_be(&mut r, &label)? as usize;
    let cols = read_u32_be(&mut r, &label)? as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::Format {
            path: label,
            reason: format!("image dimensions {rows}x{cols} are not positive"),
        });
    }
    let pixels = rows.checked_mul(cols).and_then(|p| p.checked_mul(count));
    if pixels.is_none() || pixels.unwrap() > (1usize << 33) {
        return Err(Error::Format {
            path: label,
            reason: format!("declared payload {count}x{rows}x{cols} is implausibly large"),
        });
    }
    let mut images = Vec::with_capacity(count);
    for _ in 0..count {
        let mut image = vec![0u8; rows * cols];
        read_exact(&mut r, &mut image, &label)?;
        images.push(image);
    }
    Ok(RawImages {
        images,
        width: cols,
        height: rows,
    })
}

/// Reads an IDX label file: magic 2049, count, one byte per label in `0..=9`.
pub fn load_idx_labels(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let label = path.as_ref().display().to_string();
    let mut r = BufReader::new(File::open(path.as_ref())?);
    let magic = read_u32_be(&mut r, &label)?;
    if magic != LABEL_MAGIC {
        return Err(Error::Format {
            path: label,
            reason: format!("expected label magic {LABEL_MAGIC}, got {magic}"),
        });
    }
    let count = read_u32_be(&mut r, &label)? as usize;
    let mut labels = vec![0u8; count];
    read_exact(&mut r, &mut labels, &label)?;
    if let Some(bad) = labels.iter().find(|&&l| l > 9) {
        return Err(Error::Validation {
            path: label,
            reason: format!("label byte {bad} is outside 0..=9"),
        });
    }
    Ok(labels)
}

pub fn save_idx_images(path: impl AsRef<Path>, raw: &RawImages) -> Result<()> {
    let pixels = raw.width * raw.height;
    for image in &raw.images {
        if image.len() != pixels {
            return Err(Error::dim("idx image", pixels, image.len()));
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&IMAGE_MAGIC.to_be_bytes())?;
    w.write_all(&(raw.images.len() as u32).to_be_bytes())?;
    w.write_all(&(raw.height as u32).to_be_bytes())?;
    w.write_all(&(raw.width as u32).to_be_bytes())?;
    for image in &raw.images {
        w.write_all(image)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_idx_labels(path: impl AsRef<Path>, labels: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&LABEL_MAGIC.to_be_bytes())?;
    w.write_all(&(labels.len() as u32).to_be_bytes())?;
    w.write_all(labels)?;
    w.flush()?;
    Ok(())
}

fn read_u32_be<R: Read>(r: &mut R, label: &str) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf, label)?;
    Ok(u32::from_be_bytes(buf))
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], label: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::Corrupt {
                path: label.to_string(),
                reason: "file ends before the declared payload".to_string(),
            }
        } else {
            Error::Io(e)
        }
    })
}
