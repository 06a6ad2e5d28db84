//! Portable GrayMap reading (P2 ASCII, P5 binary) and P5 writing.

use super::{BinaryMask, GrayImage};
use crate::error::{Error, Result};

fn format_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Format {
        offset,
        message: message.into(),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Skips whitespace and `#` comments (comments run to end of line).
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads an unsigned decimal token. Returns the value and its start offset.
    fn read_uint(&mut self, what: &str) -> Result<(u64, usize)> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or_else(|| format_err(start, format!("{what} is too large")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.bytes.get(start) {
                None => format_err(start, format!("truncated data: expected {what}")),
                Some(&b) => format_err(
                    start,
                    format!("expected {what}, found byte 0x{b:02x}"),
                ),
            });
        }
        if let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_whitespace() && b != b'#' {
                return Err(format_err(
                    self.pos,
                    format!("unexpected byte 0x{b:02x} after {what}"),
                ));
            }
        }
        Ok((value, start))
    }
}

/// Decodes a P2 or P5 graymap with `maxval <= 255`. Pixel values are kept as
/// stored, without rescaling to the 0–255 range.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(format_err(0, "missing P2/P5 magic number")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        None => return Err(format_err(2, "truncated header")),
        Some(&b) => return Err(format_err(2, format!("unexpected byte 0x{b:02x} after magic"))),
    }

    let (width, w_at) = cur.read_uint("width")?;
    let (height, h_at) = cur.read_uint("height")?;
    let (maxval, m_at) = cur.read_uint("maxval")?;
    if width == 0 {
        return Err(format_err(w_at, "width must be at least 1"));
    }
    if height == 0 {
        return Err(format_err(h_at, "height must be at least 1"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(format_err(
            m_at,
            format!("maxval {maxval} unsupported (must be 1..=255)"),
        ));
    }
    let (width, height) = (width as usize, height as usize);
    let n = width
        .checked_mul(height)
        .filter(|&n| n <= isize::MAX as usize)
        .ok_or_else(|| format_err(w_at, "image dimensions overflow"))?;

    let data = if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        let start = cur.pos + 1;
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => {}
            _ => return Err(format_err(cur.pos, "truncated data: missing raster separator")),
        }
        let end = start.saturating_add(n);
        if end > bytes.len() {
            return Err(format_err(
                bytes.len(),
                format!(
                    "truncated data: expected {n} pixel bytes, found {}",
                    bytes.len() - start.min(bytes.len())
                ),
            ));
        }
        let data = bytes[start..end].to_vec();
        if let Some(i) = data.iter().position(|&v| u64::from(v) > maxval) {
            return Err(format_err(start + i, format!("pixel value exceeds maxval {maxval}")));
        }
        data
    } else {
        let mut data = Vec::with_capacity(n);
        for i in 0..n {
            cur.skip_separators();
            if cur.pos >= bytes.len() {
                return Err(format_err(
                    cur.pos,
                    format!("truncated data: expected {n} pixels, found {i}"),
                ));
            }
            let (v, at) = cur.read_uint("pixel value")?;
            if v > maxval {
                return Err(format_err(at, format!("pixel value {v} exceeds maxval {maxval}")));
            }
            data.push(v as u8);
        }
        data
    };
    GrayImage::from_vec(width, height, data)
}

/// Encodes a binary mask as P5 with maxval 255 (foreground 255, background 0).
pub fn save_pgm(mask: &BinaryMask) -> Vec<u8> {
    save_gray_pgm(&mask.to_gray())
}

/// Encodes a luminance image as P5 with maxval 255.
pub fn save_gray_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.as_slice());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::binarize;
    use proptest::prelude::*;

    fn offset_of(err: Error) -> usize {
        match err {
            Error::Format { offset, .. } => offset,
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn ascii_and_binary_agree() {
        let a = load_pgm(b"P2\n2 1\n255\n0 255\n").unwrap();
        assert_eq!((a.width(), a.height()), (2, 1));
        assert_eq!(a.as_slice(), &[0, 255]);
        let mut p5 = b"P5\n2 1\n255\n".to_vec();
        p5.extend_from_slice(&[0, 255]);
        assert_eq!(load_pgm(&p5).unwrap(), a);
    }

    #[test]
    fn comments_and_odd_whitespace() {
        let img = load_pgm(b"P2 # made by hand\n# another\n3\t1 # w h\n9\n1 2\n\n3").unwrap();
        assert_eq!(img.as_slice(), &[1, 2, 3]);
    }

    #[test]
    fn truncated_ascii_raster() {
        let err = load_pgm(b"P2\n2 2\n255\n0 0 0\n").unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
        assert_eq!(offset_of(err), 17);
    }

    #[test]
    fn truncated_binary_raster() {
        let err = load_pgm(b"P5\n2 2\n255\n\x00\x01").unwrap_err();
        assert!(err.to_string().contains("truncated"));
        assert_eq!(offset_of(err), 13);
    }

    #[test]
    fn header_errors_name_offsets() {
        assert_eq!(offset_of(load_pgm(b"P6\n1 1\n255\n\x00").unwrap_err()), 0);
        assert_eq!(offset_of(load_pgm(b"P2\n1 1\n256\n0").unwrap_err()), 7);
        assert_eq!(offset_of(load_pgm(b"P2\nx 1\n255\n0").unwrap_err()), 3);
        assert_eq!(offset_of(load_pgm(b"P2\n1 1\n9\n10").unwrap_err()), 9);
        assert_eq!(offset_of(load_pgm(b"P2\n0 1\n9\n").unwrap_err()), 3);
        assert!(load_pgm(b"P2").is_err());
        assert!(load_pgm(b"").is_err());
    }

    #[test]
    fn single_pixel_encodings() {
        let fg = BinaryMask::filled(1, 1, true).unwrap();
        let bg = BinaryMask::new(1, 1).unwrap();
        assert_eq!(save_pgm(&fg), b"P5\n1 1\n255\n\xff");
        assert_eq!(save_pgm(&bg), b"P5\n1 1\n255\n\x00");
    }

    #[test]
    fn binary_raster_may_start_with_whitespace_byte() {
        // Pixel value 10 is '\n'; only the first separator is consumed.
        let img = load_pgm(b"P5\n2 1\n255\n\n\n").unwrap();
        assert_eq!(img.as_slice(), &[10, 10]);
    }

    proptest! {
        #[test]
        fn mask_round_trip_is_exact(
            w in 1usize..20,
            h in 1usize..20,
            seed in proptest::collection::vec(any::<bool>(), 400),
        ) {
            let m = BinaryMask::from_vec(w, h, seed[..w * h].to_vec()).unwrap();
            let bytes = save_pgm(&m);
            let back = binarize(&load_pgm(&bytes).unwrap(), 128);
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(save_pgm(&back), bytes);
        }
    }
}
