use crate::error::{Error, Result};

/// Monochrome bitmap, row-major. `true` is white (logic 1), `false` black (logic 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoImage {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
}

impl MonoImage {
    pub fn new(width: usize, height: usize, pixels: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyInput("image"));
        }
        if pixels.len() != width * height {
            return Err(Error::Format(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, white: bool) -> Result<Self> {
        Self::new(width, height, vec![white; width * height])
    }

    /// Builds an image from logic values (0 black, 1 white).
    pub fn from_bits(width: usize, height: usize, bits: &[u8]) -> Result<Self> {
        Self::new(width, height, bits.iter().map(|&b| b != 0).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    pub fn is_white(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x]
    }

    /// Logic value of every pixel in row-major order.
    pub fn bits(&self) -> Vec<u8> {
        self.pixels.iter().map(|&w| u8::from(w)).collect()
    }
}

/// PBM flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbmFormat {
    /// `P1`, ASCII digits.
    Plain,
    /// `P4`, packed bits.
    Raw,
}

/// Encodes an image as PBM. PBM writes black as `1`.
pub fn encode_pbm(img: &MonoImage, format: PbmFormat) -> Vec<u8> {
    let (w, h) = (img.width, img.height);
    match format {
        PbmFormat::Plain => {
            let mut out = format!("P1\n{w} {h}\n");
            for row in img.pixels.chunks(w) {
                for (i, chunk) in row.chunks(70).enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    out.extend(chunk.iter().map(|&white| if white { '0' } else { '1' }));
                }
                out.push('\n');
            }
            out.into_bytes()
        }
        PbmFormat::Raw => {
            let mut out = format!("P4\n{w} {h}\n").into_bytes();
            for row in img.pixels.chunks(w) {
                for byte in row.chunks(8) {
                    let mut b = 0u8;
                    for (i, &white) in byte.iter().enumerate() {
                        if !white {
                            b |= 0x80 >> i;
                        }
                    }
                    out.push(b);
                }
            }
            out
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("missing or invalid {what} at byte {start}")))
    }
}

pub fn decode_pbm(bytes: &[u8]) -> Result<MonoImage> {
    let raw = match bytes.get(..2) {
        Some(b"P1") => false,
        Some(b"P4") => true,
        _ => return Err(Error::Format("not a PBM file (expected P1 or P4)".into())),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("degenerate size {width}x{height}")));
    }
    let count = width
        .checked_mul(height)
        .filter(|&n| n <= 1 << 30)
        .ok_or_else(|| Error::Format(format!("image too large: {width}x{height}")))?;

    let mut pixels = Vec::with_capacity(count);
    if raw {
        if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(Error::Format("missing separator after header".into()));
        }
        let data = &bytes[cur.pos + 1..];
        let stride = width.div_ceil(8);
        if data.len() < stride * height {
            return Err(Error::Format(format!(
                "truncated raster: {} of {} bytes",
                data.len(),
                stride * height
            )));
        }
        for row in data.chunks(stride).take(height) {
            pixels.extend((0..width).map(|x| row[x / 8] & (0x80 >> (x % 8)) == 0));
        }
    } else {
        while pixels.len() < count {
            cur.skip_space();
            match bytes.get(cur.pos) {
                Some(b'0') => pixels.push(true),
                Some(b'1') => pixels.push(false),
                Some(&c) => {
                    return Err(Error::Format(format!("unexpected byte {c:#04x} at {}", cur.pos)));
                }
                None => {
                    return Err(Error::Format(format!(
                        "truncated raster: {} of {count} pixels",
                        pixels.len()
                    )));
                }
            }
            cur.pos += 1;
        }
        cur.skip_space();
        if cur.pos < bytes.len() {
            return Err(Error::Format(format!("trailing data at byte {}", cur.pos)));
        }
    }
    MonoImage::new(width, height, pixels)
}
