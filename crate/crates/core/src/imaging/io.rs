//! Image files: binary PNM (P5/P6) is handled directly and is bit-exact;
//! PNG and JPEG go through the `image` crate.

use std::fs;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use super::{Image, PolygonMask};
use crate::error::{Error, Result};

pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P6") || bytes.starts_with(b"P5") {
        return decode_pnm(&bytes).map_err(|reason| Error::corrupt(path, reason));
    }
    let format = match image::guess_format(&bytes) {
        Ok(f @ (ImageFormat::Png | ImageFormat::Jpeg)) => f,
        _ => return Err(Error::UnsupportedFormat(path.to_path_buf())),
    };
    let decoded = image::load_from_memory_with_format(&bytes, format)
        .map_err(|e| Error::corrupt(path, e.to_string()))?;
    from_dynamic(decoded).map_err(|reason| Error::corrupt(path, reason))
}

/// Writes by extension: `.ppm` / `.pgm` (binary PNM), `.png`, `.jpg` / `.jpeg`.
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let bytes = match ext.as_str() {
        "ppm" | "pgm" => {
            let want = if ext == "ppm" { 3 } else { 1 };
            if img.channels() != want {
                return Err(Error::InvalidConfig(format!(
                    ".{ext} needs {want} channel(s), image has {}",
                    img.channels()
                )));
            }
            encode_pnm(img)
        }
        "png" | "jpg" | "jpeg" => {
            let format = if ext == "png" {
                ImageFormat::Png
            } else {
                ImageFormat::Jpeg
            };
            let mut buf = std::io::Cursor::new(Vec::new());
            to_dynamic(img)
                .write_to(&mut buf, format)
                .map_err(|e| Error::corrupt(path, e.to_string()))?;
            buf.into_inner()
        }
        _ => return Err(Error::UnsupportedFormat(path.to_path_buf())),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Full-image PGM of a mask: 255 where erased, 0 elsewhere.
pub fn save_mask_pgm(
    masks: &[&PolygonMask],
    width: usize,
    height: usize,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut data = vec![0u8; width * height];
    for mask in masks {
        for (x, y) in mask.pixels() {
            data[y * width + x] = 255;
        }
    }
    let img = Image::new(width, height, 1, data)?;
    let path = path.as_ref();
    fs::write(path, encode_pnm(&img)).map_err(|e| Error::io(path, e))
}

pub fn encode_pnm(img: &Image) -> Vec<u8> {
    let magic = if img.channels() == 3 { "P6" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

pub fn decode_pnm(bytes: &[u8]) -> std::result::Result<Image, String> {
    let channels = match bytes.get(..2) {
        Some(b"P6") => 3,
        Some(b"P5") => 1,
        _ => return Err("missing P5/P6 magic".into()),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        *field = read_header_int(bytes, &mut pos)?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(format!("only maxval 255 is supported, got {maxval}"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err("truncated header".into()),
    }
    let len = width * height * channels;
    let raster = bytes
        .get(pos..pos + len)
        .ok_or_else(|| format!("expected {len} raster bytes, found {}", bytes.len() - pos))?;
    Image::new(width, height, channels, raster.to_vec()).map_err(|e| e.to_string())
}

fn read_header_int(bytes: &[u8], pos: &mut usize) -> std::result::Result<usize, String> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err("truncated header".into()),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    if start == *pos {
        return Err("malformed header field".into());
    }
    std::str::from_utf8(&bytes[start..*pos])
        .unwrap()
        .parse()
        .map_err(|e| format!("header field: {e}"))
}

fn from_dynamic(img: DynamicImage) -> std::result::Result<Image, String> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let result = match img {
        DynamicImage::ImageLuma8(buf) => Image::new(w, h, 1, buf.into_raw()),
        DynamicImage::ImageLumaA8(_) | DynamicImage::ImageLuma16(_) => {
            Image::new(w, h, 1, img.to_luma8().into_raw())
        }
        other => Image::new(w, h, 3, other.to_rgb8().into_raw()),
    };
    result.map_err(|e| e.to_string())
}

fn to_dynamic(img: &Image) -> DynamicImage {
    let (w, h) = (img.width() as u32, img.height() as u32);
    if img.channels() == 1 {
        DynamicImage::ImageLuma8(image::GrayImage::from_raw(w, h, img.data().to_vec()).unwrap())
    } else {
        DynamicImage::ImageRgb8(image::RgbImage::from_raw(w, h, img.data().to_vec()).unwrap())
    }
}
