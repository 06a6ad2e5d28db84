use super::{BinaryMask, RectRegion};
use crate::error::{argument, Result};

/// Rotates `mask` counterclockwise (as displayed, y pointing down) by
/// `degrees` about the image center. The output keeps the input size; each
/// destination pixel takes its nearest source pixel under the inverse
/// rotation, and destinations that land outside the source are background.
///
/// Multiples of 90° take an exact integer path, so quarter turns of a square
/// mask are lossless permutations.
pub fn rotate(mask: &BinaryMask, degrees: f64) -> Result<BinaryMask> {
    if !degrees.is_finite() {
        return Err(argument(format!("rotation angle must be finite, got {degrees}")));
    }
    let (w, h) = (mask.width(), mask.height());
    let mut out = BinaryMask::new(w, h)?;

    if degrees % 90.0 == 0.0 {
        let quarter = ((degrees / 90.0).rem_euclid(4.0)) as u8;
        if quarter == 0 {
            return Ok(mask.clone());
        }
        // Doubled coordinates relative to the center keep half-pixel centers integral.
        let (wm1, hm1) = (w as i64 - 1, h as i64 - 1);
        for y in 0..h {
            let ey = 2 * y as i64 - hm1;
            for x in 0..w {
                let ex = 2 * x as i64 - wm1;
                let (sx2, sy2) = match quarter {
                    1 => (-ey, ex),
                    2 => (-ex, -ey),
                    _ => (ey, -ex),
                };
                // floor(v + 0.5) with v = n / 2
                let sx = (sx2 + wm1 + 1).div_euclid(2);
                let sy = (sy2 + hm1 + 1).div_euclid(2);
                if mask.get_signed(sx, sy) {
                    out.set(x, y, true);
                }
            }
        }
        return Ok(out);
    }

    let (sin, cos) = degrees.to_radians().sin_cos();
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    for y in 0..h {
        let ey = y as f64 - cy;
        for x in 0..w {
            let ex = x as f64 - cx;
            let sx = ex * cos - ey * sin + cx;
            let sy = ex * sin + ey * cos + cy;
            let (sx, sy) = ((sx + 0.5).floor(), (sy + 0.5).floor());
            if mask.get_signed(sx as i64, sy as i64) {
                out.set(x, y, true);
            }
        }
    }
    Ok(out)
}

/// Extracts `region`; output pixel `(x, y)` is input pixel `(x0 + x, y0 + y)`.
pub fn crop(mask: &BinaryMask, region: &RectRegion) -> Result<BinaryMask> {
    if !region.fits_within(mask.width(), mask.height()) {
        return Err(argument(format!(
            "crop region {}x{} at ({}, {}) is empty or exceeds the {}x{} image",
            region.width,
            region.height,
            region.x0,
            region.y0,
            mask.width(),
            mask.height()
        )));
    }
    let mut data = Vec::with_capacity(region.width * region.height);
    for y in region.y0..region.y0 + region.height {
        data.extend_from_slice(&mask.row(y)[region.x0..region.x0 + region.width]);
    }
    BinaryMask::from_vec(region.width, region.height, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BinaryMask {
        let data = (0..w * h).map(|_| rng.random_bool(0.4)).collect();
        BinaryMask::from_vec(w, h, data).unwrap()
    }

    /// Exact clockwise quarter turn of a square mask: (x, y) -> (H-1-y, x).
    fn quarter_cw(m: &BinaryMask) -> BinaryMask {
        let n = m.width();
        let mut out = BinaryMask::new(n, n).unwrap();
        for y in 0..n {
            for x in 0..n {
                if m.get(x, y) {
                    out.set(n - 1 - y, x, true);
                }
            }
        }
        out
    }

    #[test]
    fn zero_angle_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_mask(&mut rng, 7, 5);
        assert_eq!(rotate(&m, 0.0).unwrap(), m);
        assert_eq!(rotate(&m, 360.0).unwrap(), m);
    }

    #[test]
    fn clockwise_quarter_turn_moves_top_to_right() {
        let m = BinaryMask::from_ascii(&[".#.", "...", "..."]).unwrap();
        let r = rotate(&m, -90.0).unwrap();
        assert_eq!(r, BinaryMask::from_ascii(&["...", "..#", "..."]).unwrap());
    }

    #[test]
    fn quarter_turns_match_exact_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let m = random_mask(&mut rng, 16, 16);
            let cw = quarter_cw(&m);
            assert_eq!(rotate(&m, -90.0).unwrap(), cw);
            assert_eq!(rotate(&m, 270.0).unwrap(), cw);
            assert_eq!(rotate(&rotate(&m, 90.0).unwrap(), 90.0).unwrap(), rotate(&m, 180.0).unwrap());
            assert_eq!(rotate(&m, 180.0).unwrap(), quarter_cw(&cw));
        }
    }

    #[test]
    fn near_quarter_angle_agrees_with_exact_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_mask(&mut rng, 9, 9);
        assert_eq!(rotate(&m, 90.0 + 1e-9).unwrap(), rotate(&m, 90.0).unwrap());
    }

    #[test]
    fn rejects_non_finite_angles() {
        let m = BinaryMask::new(2, 2).unwrap();
        assert!(rotate(&m, f64::NAN).is_err());
        assert!(rotate(&m, f64::INFINITY).is_err());
    }

    #[test]
    fn crop_cases() {
        let m = BinaryMask::from_ascii(&["#..", ".#.", "..#"]).unwrap();
        assert_eq!(crop(&m, &RectRegion::new(0, 0, 3, 3)).unwrap(), m);
        let one = crop(&m, &RectRegion::new(1, 1, 1, 1)).unwrap();
        assert_eq!(one, BinaryMask::filled(1, 1, true).unwrap());
        assert!(crop(&m, &RectRegion::new(2, 0, 2, 1)).is_err());
        assert!(crop(&m, &RectRegion::new(0, 0, 0, 1)).is_err());
        assert!(crop(&m, &RectRegion::new(usize::MAX, 0, 2, 1)).is_err());
    }

    #[test]
    fn crop_composes_with_offsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let m = random_mask(&mut rng, 20, 15);
            let outer = RectRegion::new(rng.random_range(0..10), rng.random_range(0..8), 10, 7);
            let inner = RectRegion::new(rng.random_range(0..5), rng.random_range(0..4), 5, 3);
            let twice = crop(&crop(&m, &outer).unwrap(), &inner).unwrap();
            for y in 0..3 {
                for x in 0..5 {
                    assert_eq!(twice.get(x, y), m.get(outer.x0 + inner.x0 + x, outer.y0 + inner.y0 + y));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn four_quarter_turns_are_identity(n in 1usize..12, bits in proptest::collection::vec(any::<bool>(), 144)) {
            let m = BinaryMask::from_vec(n, n, bits[..n * n].to_vec()).unwrap();
            let mut r = m.clone();
            for _ in 0..4 {
                r = rotate(&r, 90.0).unwrap();
            }
            prop_assert_eq!(r, m);
        }

        #[test]
        fn rotation_never_invents_foreground(
            w in 1usize..12,
            h in 1usize..12,
            angle in -400.0f64..400.0,
            bits in proptest::collection::vec(any::<bool>(), 144),
        ) {
            let m = BinaryMask::from_vec(w, h, bits[..w * h].to_vec()).unwrap();
            let r = rotate(&m, angle).unwrap();
            let (sin, cos) = angle.to_radians().sin_cos();
            let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
            for y in 0..h {
                for x in 0..w {
                    if r.get(x, y) && angle % 90.0 != 0.0 {
                        let (ex, ey) = (x as f64 - cx, y as f64 - cy);
                        let sx = (ex * cos - ey * sin + cx + 0.5).floor() as i64;
                        let sy = (ex * sin + ey * cos + cy + 0.5).floor() as i64;
                        prop_assert!(m.get_signed(sx, sy));
                    }
                }
            }
            if angle % 90.0 == 0.0 {
                prop_assert!(r.count_foreground() <= m.count_foreground());
            }
        }
    }
}
