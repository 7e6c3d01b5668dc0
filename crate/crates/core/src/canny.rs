//! Classical Canny edge detection: Gaussian blur, Sobel gradients,
//! non-maximum suppression, double threshold, hysteresis.

use thiserror::Error;

use crate::data::Image;

#[derive(Debug, Error)]
pub enum CannyError {
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("image is {width}x{height}, need at least 3x3")]
    ImageTooSmall { width: usize, height: usize },
    #[error("thresholds must satisfy 0 < low < high, got low={low} high={high}")]
    ThresholdOrder { low: f64, high: f64 },
}

/// Gradient direction quantized to the four NMS axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionBin {
    /// Gradient along the row (vertical edge).
    Deg0,
    Deg45,
    /// Gradient along the column (horizontal edge).
    Deg90,
    Deg135,
}

/// Sobel gradient magnitudes and quantized directions. Border pixels carry
/// zero magnitude.
#[derive(Debug, Clone)]
pub struct GradientField {
    width: usize,
    height: usize,
    magnitude: Vec<f64>,
    direction: Vec<DirectionBin>,
}

impl GradientField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn magnitude(&self, row: usize, col: usize) -> f64 {
        self.magnitude[row * self.width + col]
    }

    pub fn direction(&self, row: usize, col: usize) -> DirectionBin {
        self.direction[row * self.width + col]
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }
}

/// Canny parameters. Thresholds are fractions of the maximum gradient
/// magnitude of the blurred image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams {
    pub sigma: f64,
    pub low: f64,
    pub high: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            low: 0.1,
            high: 0.2,
        }
    }
}

/// Mirrors an index into `0..len` (symmetric reflection, edge repeated).
fn reflect(index: i64, len: usize) -> usize {
    let len = len as i64;
    let mut i = index;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= len {
            i = 2 * len - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Separable Gaussian blur with kernel radius `ceil(3 sigma)`, reflected
/// borders, kernel normalized to sum 1.
pub fn gaussian_blur(image: &Image, sigma: f64) -> Result<Image, CannyError> {
    if !(sigma > 0.0) {
        return Err(CannyError::NonPositiveSigma(sigma));
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let mut kernel = Vec::with_capacity(2 * radius as usize + 1);
    for i in -radius..=radius {
        kernel.push((-(i as f64).powi(2) / (2.0 * sigma * sigma)).exp());
    }
    let sum: f64 = kernel.iter().sum();
    for k in kernel.iter_mut() {
        *k /= sum;
    }

    let (w, h) = (image.width(), image.height());

    // Horizontal pass.
    let mut horizontal = vec![0.0; w * h];
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let source = reflect(col as i64 + ki as i64 - radius, w);
                acc += k * image.get(row, source);
            }
            horizontal[row * w + col] = acc;
        }
    }

    // Vertical pass; clamp away sub-ulp drift outside [0, 1].
    let mut pixels = vec![0.0; w * h];
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let source = reflect(row as i64 + ki as i64 - radius, h);
                acc += k * horizontal[source * w + col];
            }
            pixels[row * w + col] = acc.clamp(0.0, 1.0);
        }
    }
    Ok(Image::new(w, h, pixels).expect("blur preserves the pixel range"))
}

/// Standard 3x3 Sobel gradients with direction quantized to the four NMS
/// bins. Needs at least a 3x3 image; border pixels get zero magnitude.
pub fn sobel_gradients(image: &Image) -> Result<GradientField, CannyError> {
    let (w, h) = (image.width(), image.height());
    if w < 3 || h < 3 {
        return Err(CannyError::ImageTooSmall {
            width: w,
            height: h,
        });
    }

    let mut magnitude = vec![0.0; w * h];
    let mut direction = vec![DirectionBin::Deg0; w * h];
    for row in 1..h - 1 {
        for col in 1..w - 1 {
            let p = |dr: i64, dc: i64| {
                image.get((row as i64 + dr) as usize, (col as i64 + dc) as usize)
            };
            // Pairwise differences cancel exactly on flat regions.
            let gx = (p(-1, 1) - p(-1, -1)) + 2.0 * (p(0, 1) - p(0, -1)) + (p(1, 1) - p(1, -1));
            let gy = (p(1, -1) - p(-1, -1)) + 2.0 * (p(1, 0) - p(-1, 0)) + (p(1, 1) - p(-1, 1));

            let mut angle = gy.atan2(gx).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            let bin = if !(22.5..157.5).contains(&angle) {
                DirectionBin::Deg0
            } else if angle < 67.5 {
                DirectionBin::Deg45
            } else if angle < 112.5 {
                DirectionBin::Deg90
            } else {
                DirectionBin::Deg135
            };

            magnitude[row * w + col] = gx.hypot(gy);
            direction[row * w + col] = bin;
        }
    }
    Ok(GradientField {
        width: w,
        height: h,
        magnitude,
        direction,
    })
}

/// Thins the gradient field: a pixel survives only where its magnitude is a
/// local maximum along its quantized direction. Ties break toward the
/// earlier neighbor so plateaus thin to one pixel. Borders are zero.
pub fn non_maximum_suppression(field: &GradientField) -> Vec<f64> {
    let (w, h) = (field.width, field.height);
    let mut out = vec![0.0; w * h];
    for row in 1..h - 1 {
        for col in 1..w - 1 {
            let m = field.magnitude(row, col);
            let (before, after) = match field.direction(row, col) {
                DirectionBin::Deg0 => ((row, col - 1), (row, col + 1)),
                DirectionBin::Deg45 => ((row - 1, col - 1), (row + 1, col + 1)),
                DirectionBin::Deg90 => ((row - 1, col), (row + 1, col)),
                DirectionBin::Deg135 => ((row - 1, col + 1), (row + 1, col - 1)),
            };
            if m > field.magnitude(before.0, before.1) && m >= field.magnitude(after.0, after.1) {
                out[row * w + col] = m;
            }
        }
    }
    out
}

/// Full Canny pipeline. Returns a binary mask (1.0 = edge).
pub fn canny(image: &Image, params: &CannyParams) -> Result<Image, CannyError> {
    if !(params.low > 0.0 && params.low < params.high) {
        return Err(CannyError::ThresholdOrder {
            low: params.low,
            high: params.high,
        });
    }

    let blurred = gaussian_blur(image, params.sigma)?;
    let field = sobel_gradients(&blurred)?;
    let thinned = non_maximum_suppression(&field);

    let max = field.max_magnitude();
    let low = params.low * max;
    let high = params.high * max;

    let (w, h) = (image.width(), image.height());
    let mut out = Image::filled(w, h, 0.0);
    if max == 0.0 {
        return Ok(out);
    }

    // Hysteresis: flood from strong pixels through weak ones, 8-connected.
    let mut stack = Vec::new();
    for row in 0..h {
        for col in 0..w {
            if thinned[row * w + col] >= high && out.get(row, col) == 0.0 {
                out.set(row, col, 1.0);
                stack.push((row, col));
                while let Some((r, c)) = stack.pop() {
                    for dr in -1i64..=1 {
                        for dc in -1i64..=1 {
                            if dr == 0 && dc == 0 {
                                continue;
                            }
                            let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                            if nr < 0 || nc < 0 || nr as usize >= h || nc as usize >= w {
                                continue;
                            }
                            let (nr, nc) = (nr as usize, nc as usize);
                            if thinned[nr * w + nc] >= low && out.get(nr, nc) == 0.0 {
                                out.set(nr, nc, 1.0);
                                stack.push((nr, nc));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_plane(width: usize, height: usize, step_col: usize) -> Image {
        let mut image = Image::filled(width, height, 0.0);
        for row in 0..height {
            for col in step_col..width {
                image.set(row, col, 1.0);
            }
        }
        image
    }

    #[test]
    fn blur_preserves_constant_images() {
        let image = Image::filled(9, 7, 0.4);
        let blurred = gaussian_blur(&image, 1.3).unwrap();
        for &p in blurred.pixels() {
            assert!((p - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn blur_of_impulse_reproduces_kernel() {
        let mut image = Image::filled(15, 15, 0.0);
        image.set(7, 7, 1.0);
        let sigma = 1.0;
        let blurred = gaussian_blur(&image, sigma).unwrap();

        let radius = 3i64;
        let mut kernel = Vec::new();
        for i in -radius..=radius {
            kernel.push((-(i as f64).powi(2) / (2.0 * sigma * sigma)).exp());
        }
        let sum: f64 = kernel.iter().sum();
        for (di, kv) in kernel.iter().enumerate() {
            for (dj, kh) in kernel.iter().enumerate() {
                let expected = (kv / sum) * (kh / sum);
                let row = 7 + di as i64 - radius;
                let col = 7 + dj as i64 - radius;
                let actual = blurred.get(row as usize, col as usize);
                assert!((actual - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn blurring_twice_matches_wider_kernel() {
        let image = half_plane(32, 32, 16);
        let sigma = 1.0;
        let twice = gaussian_blur(&gaussian_blur(&image, sigma).unwrap(), sigma).unwrap();
        let once = gaussian_blur(&image, sigma * std::f64::consts::SQRT_2).unwrap();
        // The semigroup property holds up to the 3-sigma kernel truncation
        // (tail mass ~0.3%), which bounds the deviation near 2e-4 here.
        for row in 8..24 {
            for col in 8..24 {
                assert!(
                    (twice.get(row, col) - once.get(row, col)).abs() < 1e-3,
                    "({row},{col})"
                );
            }
        }
    }

    #[test]
    fn blur_rejects_non_positive_sigma() {
        let image = Image::filled(4, 4, 0.5);
        assert!(matches!(
            gaussian_blur(&image, 0.0),
            Err(CannyError::NonPositiveSigma(_))
        ));
    }

    #[test]
    fn sobel_on_vertical_step_points_along_rows() {
        let image = half_plane(9, 9, 4);
        let field = sobel_gradients(&image).unwrap();
        // Maximal magnitude sits on the step columns with direction bin 0.
        let center = field.magnitude(4, 4);
        assert!(center > 0.0);
        assert_eq!(field.direction(4, 4), DirectionBin::Deg0);
        for col in 1..8 {
            assert!(field.magnitude(4, col) <= center + 1e-12);
        }
    }

    #[test]
    fn sobel_of_constant_image_is_zero() {
        let image = Image::filled(5, 5, 0.7);
        let field = sobel_gradients(&image).unwrap();
        assert!(field.magnitudes().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn sobel_magnitude_transposes_with_the_image() {
        let mut image = Image::filled(7, 7, 0.0);
        for row in 0..7 {
            for col in 0..7 {
                if (row * 3 + col * 5) % 7 < 3 {
                    image.set(row, col, 1.0);
                }
            }
        }
        let mut transposed = Image::filled(7, 7, 0.0);
        for row in 0..7 {
            for col in 0..7 {
                transposed.set(col, row, image.get(row, col));
            }
        }
        let f = sobel_gradients(&image).unwrap();
        let ft = sobel_gradients(&transposed).unwrap();
        for row in 0..7 {
            for col in 0..7 {
                assert!((f.magnitude(row, col) - ft.magnitude(col, row)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sobel_rejects_tiny_images() {
        let image = Image::filled(2, 3, 0.0);
        assert!(matches!(
            sobel_gradients(&image),
            Err(CannyError::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn nms_output_is_locally_maximal() {
        let image = gaussian_blur(&half_plane(16, 16, 8), 1.0).unwrap();
        let field = sobel_gradients(&image).unwrap();
        let thinned = non_maximum_suppression(&field);
        for row in 1..15 {
            for col in 1..15 {
                let m = thinned[row * 16 + col];
                if m == 0.0 {
                    continue;
                }
                let (a, b) = match field.direction(row, col) {
                    DirectionBin::Deg0 => ((row, col - 1), (row, col + 1)),
                    DirectionBin::Deg45 => ((row - 1, col - 1), (row + 1, col + 1)),
                    DirectionBin::Deg90 => ((row - 1, col), (row + 1, col)),
                    DirectionBin::Deg135 => ((row - 1, col + 1), (row + 1, col - 1)),
                };
                assert!(m >= field.magnitude(a.0, a.1));
                assert!(m >= field.magnitude(b.0, b.1));
            }
        }
    }

    #[test]
    fn canny_of_constant_image_is_empty() {
        let image = Image::filled(16, 16, 0.5);
        let edges = canny(&image, &CannyParams::default()).unwrap();
        assert!(edges.pixels().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn canny_of_half_plane_is_single_pixel_line() {
        let image = half_plane(32, 32, 16);
        let edges = canny(&image, &CannyParams::default()).unwrap();
        assert!(edges.is_binary());
        // Away from the top/bottom borders each row crosses the edge once.
        for row in 4..28 {
            let count: f64 = (0..32).map(|col| edges.get(row, col)).sum();
            assert_eq!(count, 1.0, "row {row}");
        }
    }

    #[test]
    fn canny_output_respects_low_threshold() {
        let image = half_plane(24, 24, 11);
        let params = CannyParams::default();
        let edges = canny(&image, &params).unwrap();
        let field = sobel_gradients(&gaussian_blur(&image, params.sigma).unwrap()).unwrap();
        let low = params.low * field.max_magnitude();
        for row in 0..24 {
            for col in 0..24 {
                if edges.get(row, col) == 1.0 {
                    assert!(field.magnitude(row, col) >= low);
                }
            }
        }
    }

    #[test]
    fn canny_rejects_bad_thresholds() {
        let image = Image::filled(8, 8, 0.5);
        for (low, high) in [(0.2, 0.1), (0.0, 0.5), (0.3, 0.3)] {
            let params = CannyParams {
                sigma: 1.0,
                low,
                high,
            };
            assert!(matches!(
                canny(&image, &params),
                Err(CannyError::ThresholdOrder { .. })
            ));
        }
    }
}
