//! Reader for the IDX binary tensor format used by MNIST.
//!
//! Layout of an image file: a big-endian `u32` magic `0x00000803` at offset
//! 0, then big-endian `u32` count, rows and cols at offsets 4, 8 and 12,
//! followed by `count * rows * cols` unsigned bytes in row-major order.
//! Label files use magic `0x00000801` and a single count.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::problems::{ContentHasher, DataSource, DatasetManifest};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

const IMAGE_HEADER_LEN: usize = 16;
const LABEL_HEADER_LEN: usize = 8;

#[derive(Debug, Error)]
pub enum IdxError {
    #[error("I/O error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("expected image tensor magic 0x{expected:08x}, found 0x{found:08x} at byte offset 0")]
    BadMagic { expected: u32, found: u32 },

    #[error("truncated input at byte offset {offset}: need {needed} bytes, file has {available}")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },

    #[error("dimension overflow in header field at byte offset {offset}")]
    DimensionOverflow { offset: usize },
}

impl IdxError {
    /// Byte offset the error refers to, when it has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            IdxError::Io { .. } => None,
            IdxError::BadMagic { .. } => Some(0),
            IdxError::Truncated { offset, .. } => Some(*offset),
            IdxError::DimensionOverflow { offset } => Some(*offset),
        }
    }
}

/// A decoded image tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    /// `count x (rows*cols)` matrix with pixels scaled to `[0, 1]`.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let width = self.rows * self.cols;
        DMatrix::from_row_iterator(self.count, width, self.pixels.iter().map(|b| f64::from(*b) / 255.0))
    }
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32, IdxError> {
    let end = offset + 4;
    match bytes.get(offset..end) {
        Some(b) => Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]])),
        None => Err(IdxError::Truncated {
            offset: bytes.len(),
            needed: end,
            available: bytes.len(),
        }),
    }
}

fn expect_magic(bytes: &[u8], expected: u32) -> Result<(), IdxError> {
    let found = read_u32(bytes, 0)?;
    if found != expected {
        return Err(IdxError::BadMagic { expected, found });
    }
    Ok(())
}

/// Decodes an IDX image tensor. Trailing bytes after the payload are ignored.
pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages, IdxError> {
    expect_magic(bytes, IMAGE_MAGIC)?;
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    let payload = count
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or(IdxError::DimensionOverflow { offset: 4 })?;
    let needed = payload
        .checked_add(IMAGE_HEADER_LEN)
        .ok_or(IdxError::DimensionOverflow { offset: 4 })?;
    if bytes.len() < needed {
        return Err(IdxError::Truncated {
            offset: bytes.len(),
            needed,
            available: bytes.len(),
        });
    }
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels: bytes[IMAGE_HEADER_LEN..needed].to_vec(),
    })
}

/// Decodes an IDX label vector (magic `0x00000801`).
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, IdxError> {
    expect_magic(bytes, LABEL_MAGIC)?;
    let count = read_u32(bytes, 4)? as usize;
    let needed = count
        .checked_add(LABEL_HEADER_LEN)
        .ok_or(IdxError::DimensionOverflow { offset: 4 })?;
    if bytes.len() < needed {
        return Err(IdxError::Truncated {
            offset: bytes.len(),
            needed,
            available: bytes.len(),
        });
    }
    Ok(bytes[LABEL_HEADER_LEN..needed].to_vec())
}

/// Loads an image file as a scaled data matrix plus its provenance record.
pub fn load_mnist_idx(path: impl AsRef<Path>) -> Result<(DMatrix<f64>, DatasetManifest), IdxError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| IdxError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let images = parse_idx_images(&bytes)?;
    let mut hasher = ContentHasher::new("idx-images");
    hasher
        .dims(&[images.count, images.rows, images.cols])
        .bytes(&images.pixels);
    let manifest = DatasetManifest {
        source: DataSource::MnistIdx {
            path: path.display().to_string(),
        },
        params: vec![
            ("count".into(), images.count.to_string()),
            ("rows".into(), images.rows.to_string()),
            ("cols".into(), images.cols.to_string()),
        ],
        digest: hasher.finish(),
    };
    Ok((images.to_matrix(), manifest))
}

/// Encodes an image tensor; used to write test fixtures.
pub fn encode_idx_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(IMAGE_HEADER_LEN + images.pixels.len());
    out.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    for d in [images.count, images.rows, images.cols] {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    out
}
