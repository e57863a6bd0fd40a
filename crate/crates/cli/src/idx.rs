//! IDX image and label files, the MNIST distribution format.
//!
//! Images: big-endian `0x00000803`, count, rows, cols, then one byte per
//! pixel. Labels: `0x00000801`, count, then one byte per label.

use std::path::Path;

use nesy_verify::nn::Tensor;

use crate::error::{read_bytes, CliError};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq)]
pub struct IdxImages {
    pub rows: usize,
    pub cols: usize,
    /// Raw pixels, image-major.
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn len(&self) -> usize {
        self.pixels.len() / (self.rows * self.cols).max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Image `i` as a `rows x cols` tensor scaled by `1/255`.
    pub fn tensor(&self, i: usize) -> Tensor {
        let n = self.rows * self.cols;
        let data = self.pixels[i * n..(i + 1) * n].iter().map(|&p| p as f64 / 255.0).collect();
        Tensor::new(vec![self.rows, self.cols], data).expect("pixel data is finite")
    }
}

fn be_u32(bytes: &[u8], at: usize, what: &str) -> Result<u32, CliError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| CliError::input(format!("truncated IDX {what} header")))
}

fn payload<'a>(bytes: &'a [u8], header: usize, expected: usize, what: &str) -> Result<&'a [u8], CliError> {
    let found = bytes.len() - header;
    if found < expected {
        return Err(CliError::input(format!(
            "truncated IDX {what} file: expected {expected} payload bytes, found {found}"
        )));
    }
    if found > expected {
        return Err(CliError::input(format!(
            "IDX {what} file has {} trailing bytes",
            found - expected
        )));
    }
    Ok(&bytes[header..])
}

pub fn parse_images(bytes: &[u8]) -> Result<IdxImages, CliError> {
    if be_u32(bytes, 0, "image")? != IMAGE_MAGIC {
        return Err(CliError::input("not an IDX image file"));
    }
    let count = be_u32(bytes, 4, "image")? as usize;
    let rows = be_u32(bytes, 8, "image")? as usize;
    let cols = be_u32(bytes, 12, "image")? as usize;
    if rows == 0 || cols == 0 {
        return Err(CliError::input(format!("IDX images have zero size {rows}x{cols}")));
    }
    let pixels = payload(bytes, 16, count * rows * cols, "image")?.to_vec();
    Ok(IdxImages { rows, cols, pixels })
}

pub fn parse_labels(bytes: &[u8]) -> Result<Vec<u8>, CliError> {
    if be_u32(bytes, 0, "label")? != LABEL_MAGIC {
        return Err(CliError::input("not an IDX label file"));
    }
    let count = be_u32(bytes, 4, "label")? as usize;
    Ok(payload(bytes, 8, count, "label")?.to_vec())
}

/// Reads a matching pair of image and label files.
pub fn read_idx(images: &Path, labels: &Path) -> Result<(IdxImages, Vec<u8>), CliError> {
    let img = parse_images(&read_bytes(images)?)?;
    let lab = parse_labels(&read_bytes(labels)?)?;
    if img.len() != lab.len() {
        return Err(CliError::input(format!(
            "count mismatch: {} images but {} labels",
            img.len(),
            lab.len()
        )));
    }
    Ok((img, lab))
}

/// `(image, label)` pairs ready for training or verification.
pub fn labelled(images: &IdxImages, labels: &[u8]) -> Vec<(Tensor, usize)> {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (images.tensor(i), l as usize))
        .collect()
}

pub fn encode_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.pixels.len());
    for v in [IMAGE_MAGIC, images.len() as u32, images.rows as u32, images.cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    out
}

pub fn encode_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> IdxImages {
        let mut pixels = vec![0u8; 4 * 28 * 28];
        pixels[0] = 255;
        pixels[28 * 28 + 5] = 51;
        IdxImages { rows: 28, cols: 28, pixels }
    }

    #[test]
    fn round_trip_scales_pixels() {
        let img = parse_images(&encode_images(&fixture())).unwrap();
        assert_eq!(img.len(), 4);
        let t0 = img.tensor(0);
        assert_eq!(t0.shape(), &[28, 28]);
        assert_eq!(t0.data()[0], 1.0);
        assert_eq!(img.tensor(1).data()[5], 0.2);
        for i in 0..4 {
            assert!(img.tensor(i).data().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
        assert_eq!(parse_labels(&encode_labels(&[3, 1, 4, 1])).unwrap(), vec![3, 1, 4, 1]);
    }

    #[test]
    fn rejects_bad_files() {
        let mut bytes = encode_images(&fixture());
        let err = parse_images(&encode_labels(&[1, 2])).unwrap_err();
        assert!(err.message.contains("not an IDX image file"));
        assert!(parse_labels(&bytes).unwrap_err().message.contains("not an IDX label file"));
        bytes.truncate(bytes.len() - 1);
        assert!(parse_images(&bytes).unwrap_err().message.contains("truncated"));
        assert!(parse_images(&bytes[..10]).unwrap_err().message.contains("truncated"));
        let mut lab = encode_labels(&[1, 2]);
        lab.push(0);
        assert!(parse_labels(&lab).unwrap_err().message.contains("trailing"));
    }

    #[test]
    fn pair_counts_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let (i, l) = (dir.path().join("i"), dir.path().join("l"));
        std::fs::write(&i, encode_images(&fixture())).unwrap();
        std::fs::write(&l, encode_labels(&[1, 2, 3])).unwrap();
        let err = read_idx(&i, &l).unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.message.contains("count mismatch"));
        std::fs::write(&l, encode_labels(&[1, 2, 3, 4])).unwrap();
        let (img, lab) = read_idx(&i, &l).unwrap();
        assert_eq!(labelled(&img, &lab).len(), 4);
    }
}
