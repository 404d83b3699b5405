//! Binary greyscale PGM (`P5`, maxval 255).

use std::path::Path;

use super::Image;
use crate::error::{Error, Result};

/// Encodes `[0,1]` intensities to bytes with round-half-up; values outside are clamped.
pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend(
        img.as_slice()
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8),
    );
    out
}

pub fn write_pgm(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes).map_err(|msg| Error::format(path, msg))
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> std::result::Result<&[u8], String> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err("truncated header".into());
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> std::result::Result<usize, String> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("invalid {what} in header"))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> std::result::Result<Image, String> {
    let mut h = Header { bytes, pos: 0 };
    if h.token()? != b"P5" {
        return Err("not a binary PGM (expected magic P5)".into());
    }
    let cols = h.number("width")?;
    let rows = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval != 255 {
        return Err(format!(
            "unsupported maxval {maxval} (only 255 is accepted)"
        ));
    }
    if rows == 0 || cols == 0 {
        return Err("image dimensions must be positive".into());
    }
    // exactly one whitespace byte separates the header from the raster
    if h.pos >= bytes.len() || !bytes[h.pos].is_ascii_whitespace() {
        return Err("missing separator after maxval".into());
    }
    let body = &bytes[h.pos + 1..];
    let k = rows * cols;
    if body.len() < k {
        return Err(format!("raster has {} bytes, expected {k}", body.len()));
    }
    let data = body[..k].iter().map(|&b| b as f64 / 255.0).collect();
    Image::from_vec(rows, cols, data).map_err(|e| e.to_string())
}
