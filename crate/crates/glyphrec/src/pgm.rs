//! 8-bit PGM (`P2` plain and `P5` raw) reading and writing, plus PNG input.

use std::fs;
use std::path::Path;

use glyphrec_core::GrayImage;

use crate::error::{Error, Result};

struct Header {
    width: usize,
    height: usize,
    maxval: usize,
    /// Byte offset of the raster (`P5`) or of the first sample token (`P2`).
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<(bool, Header)> {
    let raw = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(Error::format("PGM", "missing P2/P5 magic")),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format("PGM", "truncated header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format("PGM", "header value out of range"))?;
    }
    // exactly one whitespace byte separates the header from a raw raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::format("PGM", "missing whitespace after header"));
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::format("PGM", "zero-sized image"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::format("PGM", format!("unsupported maxval {maxval} (8-bit only)")));
    }
    Ok((
        raw,
        Header {
            width,
            height,
            maxval,
            data_start: pos + 1,
        },
    ))
}

/// Decodes a PGM byte stream. Sample values are kept as stored.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let (raw, h) = parse_header(bytes)?;
    let n = h.width * h.height;
    let pixels = if raw {
        let data = bytes
            .get(h.data_start..h.data_start + n)
            .ok_or_else(|| Error::format("PGM", "raster shorter than width × height"))?;
        data.to_vec()
    } else {
        let text = std::str::from_utf8(&bytes[h.data_start..])
            .map_err(|_| Error::format("PGM", "non-ASCII plain raster"))?;
        let mut pixels = Vec::with_capacity(n);
        for tok in text.split_ascii_whitespace().take(n) {
            let v: usize = tok
                .parse()
                .map_err(|_| Error::format("PGM", format!("bad sample {tok:?}")))?;
            if v > h.maxval {
                return Err(Error::format("PGM", format!("sample {v} exceeds maxval")));
            }
            pixels.push(v as u8);
        }
        if pixels.len() != n {
            return Err(Error::format("PGM", "raster shorter than width × height"));
        }
        pixels
    };
    Ok(GrayImage::new(h.width, h.height, pixels)?)
}

/// Raw `P5` encoding with maxval 255.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

/// Plain `P2` encoding with maxval 255, 16 samples per line.
pub fn encode_pgm_plain(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n255\n", img.width(), img.height());
    for chunk in img.pixels().chunks(16) {
        let line: Vec<String> = chunk.iter().map(u8::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

/// Loads a PGM or PNG file as 8-bit grayscale.
pub fn load_gray(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        return decode_pgm(&bytes);
    }
    let img = image::load_from_memory(&bytes)
        .map_err(|e| Error::format("image", e.to_string()))?
        .into_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(GrayImage::new(w, h, img.into_raw())?)
}
