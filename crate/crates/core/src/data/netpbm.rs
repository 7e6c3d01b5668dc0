//! Netpbm (PGM P2/P5, PBM P1/P4) reading and writing.
//!
//! Grayscale values are normalized by the file's maxval on load, so pixels
//! land in `[0, 1]`. PBM bit 1 means black and loads as intensity 0.0.
//! Writers emit the ASCII variants (P2/P1) by default; binary variants are
//! available explicitly.

use std::fmt;
use std::io;
use std::path::Path;

use super::Image;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetpbmError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("unsupported output extension {extension:?}, expected .pgm or .pbm")]
    UnsupportedExtension { extension: String },
}

/// A parse failure with the byte offset where it was detected.
#[derive(Debug, Error)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.offset, self.message)
    }
}

fn parse_err(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        offset,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Magic {
    P1,
    P2,
    P4,
    P5,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    /// Skips whitespace and `#` comments (comments run to end of line).
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self, what: &str) -> Result<(usize, &'a [u8]), ParseError> {
        self.skip_separators();
        if self.pos >= self.bytes.len() {
            return Err(parse_err(self.pos, format!("missing {what}: input ended")));
        }
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        Ok((start, &self.bytes[start..self.pos]))
    }

    fn next_unsigned_at(&mut self, what: &str) -> Result<(usize, usize), ParseError> {
        let (start, token) = self.next_token(what)?;
        let text = std::str::from_utf8(token)
            .map_err(|_| parse_err(start, format!("{what} is not ASCII")))?;
        let value = text
            .parse::<usize>()
            .map_err(|_| parse_err(start, format!("{what} {text:?} is not an unsigned integer")))?;
        Ok((start, value))
    }

    fn next_unsigned(&mut self, what: &str) -> Result<usize, ParseError> {
        self.next_unsigned_at(what).map(|(_, value)| value)
    }
}

/// Parses an image from raw netpbm bytes.
pub fn parse(bytes: &[u8]) -> Result<Image, ParseError> {
    let mut cursor = Cursor::new(bytes);
    let (magic_offset, magic_token) = cursor.next_token("magic number")?;
    let magic = match magic_token {
        b"P1" => Magic::P1,
        b"P2" => Magic::P2,
        b"P4" => Magic::P4,
        b"P5" => Magic::P5,
        other => {
            return Err(parse_err(
                magic_offset,
                format!(
                    "unsupported magic {:?}, expected P1, P2, P4 or P5",
                    String::from_utf8_lossy(other)
                ),
            ))
        }
    };

    let width = cursor.next_unsigned("width")?;
    let height = cursor.next_unsigned("height")?;
    if width == 0 || height == 0 {
        return Err(parse_err(cursor.pos, "width and height must be positive"));
    }

    let pixels = match magic {
        Magic::P2 => {
            let maxval = read_maxval(&mut cursor)?;
            let mut pixels = Vec::with_capacity(width * height);
            for _ in 0..width * height {
                let (offset, value) = cursor.next_unsigned_at("pixel value")?;
                if value > maxval {
                    return Err(parse_err(
                        offset,
                        format!("pixel value {value} exceeds maxval {maxval}"),
                    ));
                }
                pixels.push(value as f64 / maxval as f64);
            }
            pixels
        }
        Magic::P1 => {
            let mut pixels = Vec::with_capacity(width * height);
            while pixels.len() < width * height {
                cursor.skip_separators();
                if cursor.pos >= cursor.bytes.len() {
                    return Err(parse_err(
                        cursor.pos,
                        format!(
                            "bitmap ended after {} of {} pixels",
                            pixels.len(),
                            width * height
                        ),
                    ));
                }
                // P1 digits need not be whitespace-separated.
                let b = cursor.bytes[cursor.pos];
                match b {
                    b'0' => pixels.push(1.0),
                    b'1' => pixels.push(0.0),
                    other => {
                        return Err(parse_err(
                            cursor.pos,
                            format!("unexpected byte {:?} in P1 bitmap", other as char),
                        ))
                    }
                }
                cursor.pos += 1;
            }
            pixels
        }
        Magic::P5 => {
            let maxval = read_maxval(&mut cursor)?;
            let start = raster_start(&mut cursor)?;
            let expected = width * height;
            let available = bytes.len() - start;
            if available < expected {
                return Err(parse_err(
                    start,
                    format!("raster truncated: expected {expected} bytes, found {available}"),
                ));
            }
            bytes[start..start + expected]
                .iter()
                .map(|&b| b as f64 / maxval as f64)
                .collect()
        }
        Magic::P4 => {
            let start = raster_start(&mut cursor)?;
            let row_bytes = width.div_ceil(8);
            let expected = row_bytes * height;
            let available = bytes.len() - start;
            if available < expected {
                return Err(parse_err(
                    start,
                    format!("raster truncated: expected {expected} bytes, found {available}"),
                ));
            }
            let mut pixels = Vec::with_capacity(width * height);
            for row in 0..height {
                for col in 0..width {
                    let byte = bytes[start + row * row_bytes + col / 8];
                    let bit = (byte >> (7 - col % 8)) & 1;
                    pixels.push(if bit == 1 { 0.0 } else { 1.0 });
                }
            }
            pixels
        }
    };

    Image::new(width, height, pixels).map_err(|e| parse_err(0, e.to_string()))
}

fn read_maxval(cursor: &mut Cursor<'_>) -> Result<usize, ParseError> {
    let (offset, maxval) = cursor.next_unsigned_at("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(parse_err(
            offset,
            format!("unsupported maxval {maxval}, expected 1..=255"),
        ));
    }
    Ok(maxval)
}

/// After the header of a binary variant exactly one whitespace byte precedes
/// the raster.
fn raster_start(cursor: &mut Cursor<'_>) -> Result<usize, ParseError> {
    if cursor.pos >= cursor.bytes.len() || !cursor.bytes[cursor.pos].is_ascii_whitespace() {
        return Err(parse_err(
            cursor.pos,
            "expected single whitespace byte before binary raster",
        ));
    }
    Ok(cursor.pos + 1)
}

/// Loads a PGM/PBM file into a normalized [`Image`].
pub fn load_image(path: impl AsRef<Path>) -> Result<Image, NetpbmError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| NetpbmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse(&bytes)?)
}

/// Encodes as ASCII PGM (P2) with maxval 255.
pub fn write_p2(image: &Image) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n255\n", image.width(), image.height());
    for row in 0..image.height() {
        let line: Vec<String> = (0..image.width())
            .map(|col| format!("{}", (image.get(row, col) * 255.0).round() as u8))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

/// Encodes as binary PGM (P5) with maxval 255.
pub fn write_p5(image: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    for row in 0..image.height() {
        for col in 0..image.width() {
            out.push((image.get(row, col) * 255.0).round() as u8);
        }
    }
    out
}

/// Encodes as ASCII PBM (P1); pixels below 0.5 are written as black (1).
pub fn write_p1(image: &Image) -> Vec<u8> {
    let mut out = format!("P1\n{} {}\n", image.width(), image.height());
    for row in 0..image.height() {
        let line: Vec<&str> = (0..image.width())
            .map(|col| if image.get(row, col) < 0.5 { "1" } else { "0" })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

/// Encodes as binary PBM (P4); pixels below 0.5 are written as black (1).
pub fn write_p4(image: &Image) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", image.width(), image.height()).into_bytes();
    let row_bytes = image.width().div_ceil(8);
    for row in 0..image.height() {
        let mut packed = vec![0u8; row_bytes];
        for col in 0..image.width() {
            if image.get(row, col) < 0.5 {
                packed[col / 8] |= 1 << (7 - col % 8);
            }
        }
        out.extend_from_slice(&packed);
    }
    out
}

/// Saves by extension: `.pgm` writes P2, `.pbm` writes P1.
pub fn save_image(image: &Image, path: impl AsRef<Path>) -> Result<(), NetpbmError> {
    let path = path.as_ref();
    let extension = path
        .extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase())
        .unwrap_or_default();
    let bytes = match extension.as_str() {
        "pgm" => write_p2(image),
        "pbm" => write_p1(image),
        other => {
            return Err(NetpbmError::UnsupportedExtension {
                extension: other.to_string(),
            })
        }
    };
    std::fs::write(path, bytes).map_err(|source| NetpbmError::Io {
        path: path.display().to_string(),
        source,
    })
}
