//! Small image container plus PFM (float depth) and PGM (byte mask) I/O.
//!
//! Depth images are stored in meters as `Image<f64>` in memory and written
//! as single-channel PFM with scale −1.0 (little-endian). Masks are 8-bit
//! PGM where 255 means mask probability 1.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("zero-size image ({width}x{height})")]
    ZeroSize { width: u32, height: u32 },
    #[error("malformed {format} file: {reason}")]
    Format { format: &'static str, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Row-major image, top-left origin, `(x, y)` addressing.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    width: u32,
    height: u32,
    data: Vec<T>,
}

impl<T: Copy> Image<T> {
    pub fn new(width: u32, height: u32, fill: T) -> Self {
        Self {
            width,
            height,
            data: vec![fill; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> T) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> T {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: T) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Image<U> {
        Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Iterate `(x, y, value)` in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32, T)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as u32 % w, i as u32 / w, v))
    }
}

/// Write a single-channel PFM ("Pf", scale −1.0 = little-endian floats).
/// Rows are stored bottom-up per the PFM convention.
pub fn write_pfm(path: &Path, img: &Image<f64>) -> Result<(), ImageError> {
    if img.width == 0 || img.height == 0 {
        return Err(ImageError::ZeroSize {
            width: img.width,
            height: img.height,
        });
    }
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "Pf\n{} {}\n-1.0\n", img.width, img.height)?;
    for y in (0..img.height).rev() {
        for x in 0..img.width {
            w.write_all(&(img.get(x, y) as f32).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_pfm(path: &Path) -> Result<Image<f64>, ImageError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let bad = |reason: &str| ImageError::Format {
        format: "PFM",
        reason: reason.to_string(),
    };

    // Header is three whitespace-terminated tokens: magic, "w h", scale.
    let mut pos = 0usize;
    let mut token = || -> Result<String, ImageError> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        let tok = String::from_utf8_lossy(&bytes[start..pos]).into_owned();
        if pos < bytes.len() {
            pos += 1; // single whitespace after token
        }
        Ok(tok)
    };

    if token()? != "Pf" {
        return Err(bad("expected single-channel magic 'Pf'"));
    }
    let width: u32 = token()?.parse().map_err(|_| bad("bad width"))?;
    let height: u32 = token()?.parse().map_err(|_| bad("bad height"))?;
    let scale: f64 = token()?.parse().map_err(|_| bad("bad scale"))?;
    let little_endian = scale < 0.0;

    let n = width as usize * height as usize;
    if bytes.len() < pos + 4 * n {
        return Err(bad("truncated pixel data"));
    }
    let mut img = Image::new(width, height, 0.0f64);
    for y in (0..height).rev() {
        for x in 0..width {
            let b: [u8; 4] = bytes[pos..pos + 4].try_into().unwrap();
            pos += 4;
            let v = if little_endian {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            };
            img.set(x, y, v as f64);
        }
    }
    Ok(img)
}

/// Write a binary (P5) 8-bit PGM, top-down rows.
pub fn write_pgm(path: &Path, img: &Image<u8>) -> Result<(), ImageError> {
    if img.width == 0 || img.height == 0 {
        return Err(ImageError::ZeroSize {
            width: img.width,
            height: img.height,
        });
    }
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{} {}\n255\n", img.width, img.height)?;
    w.write_all(img.data())?;
    w.flush()?;
    Ok(())
}

pub fn read_pgm(path: &Path) -> Result<Image<u8>, ImageError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let bad = |reason: &str| ImageError::Format {
        format: "PGM",
        reason: reason.to_string(),
    };

    let mut pos = 0usize;
    let mut token = || -> Result<String, ImageError> {
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
            return Err(bad("truncated header"));
        }
        let tok = String::from_utf8_lossy(&bytes[start..pos]).into_owned();
        if pos < bytes.len() {
            pos += 1;
        }
        Ok(tok)
    };

    if token()? != "P5" {
        return Err(bad("expected binary magic 'P5'"));
    }
    let width: u32 = token()?.parse().map_err(|_| bad("bad width"))?;
    let height: u32 = token()?.parse().map_err(|_| bad("bad height"))?;
    let maxval: u32 = token()?.parse().map_err(|_| bad("bad maxval"))?;
    if maxval != 255 {
        return Err(bad("only maxval 255 supported"));
    }
    let n = width as usize * height as usize;
    if bytes.len() < pos + n {
        return Err(bad("truncated pixel data"));
    }
    let mut img = Image::new(width, height, 0u8);
    img.data_mut().copy_from_slice(&bytes[pos..pos + n]);
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pfm_round_trip_preserves_f32_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("depth.pfm");
        let img = Image::from_fn(7, 5, |x, y| (x as f64 * 0.31 + y as f64 * 1.7) as f32 as f64);
        write_pfm(&path, &img).unwrap();
        let back = read_pfm(&path).unwrap();
        assert_eq!(back.width(), 7);
        assert_eq!(back.height(), 5);
        for (x, y, v) in img.pixels() {
            assert_eq!(back.get(x, y), v);
        }
    }

    #[test]
    fn pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.pgm");
        let img = Image::from_fn(9, 4, |x, y| if (x + y) % 3 == 0 { 255 } else { 0 });
        write_pgm(&path, &img).unwrap();
        let back = read_pgm(&path).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn zero_size_image_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::new(0, 4, 0.0);
        assert!(matches!(
            write_pfm(&dir.path().join("z.pfm"), &img),
            Err(ImageError::ZeroSize { .. })
        ));
    }
}
