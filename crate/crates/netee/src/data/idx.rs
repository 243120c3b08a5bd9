use std::path::Path;

use crate::error::{Error, Result};
use crate::frame::Frame;

pub const IDX3_MAGIC: u32 = 0x0000_0803;

/// Unsigned-byte image tensor in IDX3 layout (big-endian header).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImageSet {
    count: usize,
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
}

fn be_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::IdxFormat(format!("truncated header at byte {at}")))
}

pub fn parse_idx(bytes: &[u8]) -> Result<IdxImageSet> {
    let magic = be_u32(bytes, 0)?;
    if magic != IDX3_MAGIC {
        return Err(Error::IdxFormat(format!(
            "bad magic {magic:#010x}, expected {IDX3_MAGIC:#010x}"
        )));
    }
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    if count == 0 || rows == 0 || cols == 0 {
        return Err(Error::IdxFormat(format!("zero dimension in {count}x{rows}x{cols}")));
    }
    let need = count * rows * cols;
    let body = &bytes[16..];
    if body.len() < need {
        return Err(Error::IdxFormat(format!(
            "truncated: expected {need} pixel bytes, found {}",
            body.len()
        )));
    }
    Ok(IdxImageSet {
        count,
        rows,
        cols,
        pixels: body[..need].to_vec(),
    })
}

pub fn load_idx(path: impl AsRef<Path>) -> Result<IdxImageSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_idx(&bytes)
}

impl IdxImageSet {
    pub fn new(count: usize, rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != count * rows * cols || count == 0 || rows == 0 || cols == 0 {
            return Err(Error::IdxFormat("pixel buffer does not match dimensions".into()));
        }
        Ok(Self {
            count,
            rows,
            cols,
            pixels,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn raw(&self, index: usize) -> Option<&[u8]> {
        let size = self.rows * self.cols;
        self.pixels.get(index * size..(index + 1) * size)
    }

    /// Image `index` with pixels scaled to `[0, 1]`.
    pub fn frame(&self, index: usize) -> Result<Frame> {
        let raw = self
            .raw(index)
            .ok_or_else(|| Error::IdxFormat(format!("image {index} out of range 0..{}", self.count)))?;
        Frame::new(
            self.rows,
            self.cols,
            raw.iter().map(|&b| f64::from(b) / 255.0).collect(),
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.pixels.len());
        for v in [IDX3_MAGIC, self.count as u32, self.rows as u32, self.cols as u32] {
            out.extend_from_slice(&v.to_be_bytes());
        }
        out.extend_from_slice(&self.pixels);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_header_and_normalizes() {
        let set = IdxImageSet::new(2, 2, 2, vec![0, 255, 51, 102, 1, 2, 3, 4]).unwrap();
        let parsed = parse_idx(&set.to_bytes()).unwrap();
        assert_eq!((parsed.count(), parsed.rows(), parsed.cols()), (2, 2, 2));
        let f = parsed.frame(0).unwrap();
        assert_eq!(f.data, vec![0.0, 1.0, 0.2, 0.4]);
        assert!(parsed.frame(2).is_err());
    }

    #[test]
    fn rejects_wrong_magic() {
        let mut bytes = IdxImageSet::new(1, 1, 1, vec![7]).unwrap().to_bytes();
        bytes[3] = 0x01; // label-file magic
        assert!(matches!(parse_idx(&bytes), Err(Error::IdxFormat(_))));
    }

    #[test]
    fn rejects_truncation() {
        let bytes = IdxImageSet::new(3, 2, 2, vec![0; 12]).unwrap().to_bytes();
        assert!(parse_idx(&bytes[..bytes.len() - 1]).is_err());
        assert!(parse_idx(&bytes[..10]).is_err());
    }

    #[test]
    fn bundled_sample_is_mnist_shaped() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/mnist20-images-idx3-ubyte");
        let set = load_idx(path).unwrap();
        assert_eq!((set.count(), set.rows(), set.cols()), (20, 28, 28));
    }

    proptest! {
        #[test]
        fn byte_round_trip(count in 1usize..4, rows in 1usize..6, cols in 1usize..6, seed in any::<u8>()) {
            let pixels: Vec<u8> = (0..count * rows * cols).map(|i| (i as u8).wrapping_mul(31) ^ seed).collect();
            let set = IdxImageSet::new(count, rows, cols, pixels).unwrap();
            prop_assert_eq!(parse_idx(&set.to_bytes()).unwrap(), set);
        }
    }
}
