//! Binary PGM (P5, 8-bit) reading and writing, plus a tiled grid writer for
//! side-by-side visual comparison of reconstructions.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Display quantization: `round(255 * p)`, clamped into a byte.
pub fn quantize(p: f64) -> u8 {
    (255.0 * p).round().clamp(0.0, 255.0) as u8
}

/// Writes one `[0, 1]`-valued image as binary PGM.
pub fn write_pgm(path: impl AsRef<Path>, width: usize, height: usize, pixels: &[f64]) -> Result<()> {
    if pixels.len() != width * height {
        return Err(Error::dim("pgm pixels", width * height, pixels.len()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{width} {height}\n255\n")?;
    let bytes: Vec<u8> = pixels.iter().map(|&p| quantize(p)).collect();
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

/// Tiles `images` row-major into a near-square grid (missing cells black)
/// and writes the result as one PGM.
pub fn write_pgm_grid(
    path: impl AsRef<Path>,
    images: &[Vec<f64>],
    width: usize,
    height: usize,
) -> Result<()> {
    if images.is_empty() {
        return Err(Error::config("cannot write an empty image grid"));
    }
    for image in images {
        if image.len() != width * height {
            return Err(Error::dim("grid cell", width * height, image.len()));
        }
    }
    let cols = (images.len() as f64).sqrt().ceil() as usize;
    let rows = images.len().div_ceil(cols);
    let canvas_w = cols * width;
    let mut canvas = vec![0u8; canvas_w * rows * height];
    for (k, image) in images.iter().enumerate() {
        let (r, c) = (k / cols, k % cols);
        for y in 0..height {
            let dst = (r * height + y) * canvas_w + c * width;
            for x in 0..width {
                canvas[dst + x] = quantize(image[y * width + x]);
            }
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{canvas_w} {}\n255\n", rows * height)?;
    w.write_all(&canvas)?;
    w.flush()?;
    Ok(())
}

/// Reads a binary PGM (P5) with 8-bit depth. Returns `(width, height, bytes)`.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<(usize, usize, Vec<u8>)> {
    let label = path.as_ref().display().to_string();
    let mut bytes = Vec::new();
    File::open(path.as_ref())?.read_to_end(&mut bytes)?;

    let mut pos = 0;
    let mut next_token = |bytes: &[u8]| -> Result<String> {
        // Skip whitespace and '#' comment lines between header fields.
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Corrupt {
                path: label.clone(),
                reason: "header ends prematurely".to_string(),
            });
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    let magic = next_token(&bytes)?;
    if magic != "P5" {
        return Err(Error::Format {
            path: label,
            reason: format!("expected P5 magic, got {magic:?}"),
        });
    }
    let width: usize = parse_header_int(&next_token(&bytes)?, &label)?;
    let height: usize = parse_header_int(&next_token(&bytes)?, &label)?;
    let maxval: usize = parse_header_int(&next_token(&bytes)?, &label)?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Format {
            path: label,
            reason: format!("unsupported maxval {maxval} (only 8-bit PGM)"),
        });
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let need = width
        .checked_mul(height)
        .ok_or_else(|| Error::Format {
            path: label.clone(),
            reason: "dimension overflow".to_string(),
        })?;
    if bytes.len() < pos + need {
        return Err(Error::Corrupt {
            path: label,
            reason: format!(
                "raster has {} bytes but {need} are declared",
                bytes.len().saturating_sub(pos)
            ),
        });
    }
    Ok((width, height, bytes[pos..pos + need].to_vec()))
}

fn parse_header_int(token: &str, label: &str) -> Result<usize> {
    token.parse().map_err(|_| Error::Format {
        path: label.to_string(),
        reason: format!("non-numeric header field {token:?}"),
    })
}
