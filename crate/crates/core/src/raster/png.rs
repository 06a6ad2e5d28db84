use std::io::Cursor;

use super::GrayImage;
use crate::error::{Error, Result};

/// Decodes a PNG into luminance. 8-bit grayscale decodes to identical pixel
/// values; other color types are normalised to 8 bits, alpha is dropped and
/// RGB is reduced with integer Rec.601 luma weights.
pub fn load_png(bytes: &[u8]) -> Result<GrayImage> {
    let fail = |e: png::DecodingError| Error::Format {
        offset: 0,
        message: format!("png: {e}"),
    };
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = decoder.read_info().map_err(fail)?;
    let size = reader.output_buffer_size().ok_or_else(|| Error::Format {
        offset: 0,
        message: "png: image too large".into(),
    })?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(fail)?;
    let (w, h) = (info.width as usize, info.height as usize);
    let channels = info.color_type.samples();
    let row_len = info.line_size;

    let mut data = Vec::with_capacity(w * h);
    for row in buf.chunks(row_len).take(h) {
        for px in row[..w * channels].chunks_exact(channels) {
            data.push(match channels {
                1 | 2 => px[0],
                _ => {
                    let luma = 299 * u32::from(px[0]) + 587 * u32::from(px[1]) + 114 * u32::from(px[2]);
                    ((luma + 500) / 1000) as u8
                }
            });
        }
    }
    GrayImage::from_vec(w, h, data)
}
