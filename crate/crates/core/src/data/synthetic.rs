//! Seeded 8x8 black-and-white test patterns: four black squares in merged,
//! separated, or randomly placed configurations, plus their edge maps.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DataError, Image};
use crate::seeding;

const PLACEMENT_ATTEMPTS: usize = 10_000;

/// The five stock patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SyntheticPreset {
    /// Four squares fused into one centered block.
    Merged,
    /// Four squares near the corners, offset one pixel from each border.
    Separated,
    Random1,
    Random2,
    Random3,
}

impl SyntheticPreset {
    pub fn all() -> [SyntheticPreset; 5] {
        [
            SyntheticPreset::Merged,
            SyntheticPreset::Separated,
            SyntheticPreset::Random1,
            SyntheticPreset::Random2,
            SyntheticPreset::Random3,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            SyntheticPreset::Merged => "merged",
            SyntheticPreset::Separated => "separated",
            SyntheticPreset::Random1 => "random1",
            SyntheticPreset::Random2 => "random2",
            SyntheticPreset::Random3 => "random3",
        }
    }

    pub fn parse(name: &str) -> Option<SyntheticPreset> {
        SyntheticPreset::all()
            .into_iter()
            .find(|p| p.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Placement {
    Preset(SyntheticPreset),
    Explicit(Vec<(usize, usize)>),
}

/// A black square painted onto the white canvas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Square {
    pub row: usize,
    pub col: usize,
    pub size: usize,
}

impl Square {
    fn center(&self) -> (f64, f64) {
        (
            self.row as f64 + (self.size as f64 - 1.0) / 2.0,
            self.col as f64 + (self.size as f64 - 1.0) / 2.0,
        )
    }

    fn overlaps(&self, other: &Square) -> bool {
        self.row < other.row + other.size
            && other.row < self.row + self.size
            && self.col < other.col + other.size
            && other.col < self.col + self.size
    }
}

/// Parametric binary test image: a preset or explicit square placements on a
/// square canvas (8x8 by default, squares 2x2).
///
/// Random presets draw their placements from a stream derived from
/// `(seed, preset index)`, so `random1` with the default seed is the same
/// image in every run.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPattern {
    placement: Placement,
    square_size: usize,
    image_size: usize,
    seed: u64,
}

impl SyntheticPattern {
    pub fn preset(preset: SyntheticPreset) -> Self {
        Self {
            placement: Placement::Preset(preset),
            square_size: 2,
            image_size: 8,
            seed: 0,
        }
    }

    /// Explicit top-left corners for four (or any number of) squares.
    pub fn explicit(corners: Vec<(usize, usize)>) -> Self {
        Self {
            placement: Placement::Explicit(corners),
            square_size: 2,
            image_size: 8,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_square_size(mut self, square_size: usize) -> Self {
        self.square_size = square_size;
        self
    }

    pub fn with_image_size(mut self, image_size: usize) -> Self {
        self.image_size = image_size;
        self
    }

    pub fn name(&self) -> String {
        match &self.placement {
            Placement::Preset(p) => p.name().to_string(),
            Placement::Explicit(_) => "explicit".to_string(),
        }
    }

    /// Resolves the concrete squares this pattern paints.
    pub fn squares(&self) -> Result<Vec<Square>, DataError> {
        let n = self.image_size;
        let s = self.square_size;
        let squares = match &self.placement {
            Placement::Preset(SyntheticPreset::Merged) => {
                // One block of twice the square side, centered.
                let block = 2 * s;
                let corner = (n.saturating_sub(block)) / 2;
                vec![Square {
                    row: corner,
                    col: corner,
                    size: block,
                }]
            }
            Placement::Preset(SyntheticPreset::Separated) => {
                let near = 1;
                let far = n - 1 - s;
                vec![
                    Square { row: near, col: near, size: s },
                    Square { row: near, col: far, size: s },
                    Square { row: far, col: near, size: s },
                    Square { row: far, col: far, size: s },
                ]
            }
            Placement::Preset(preset) => {
                let index = match preset {
                    SyntheticPreset::Random1 => 1,
                    SyntheticPreset::Random2 => 2,
                    SyntheticPreset::Random3 => 3,
                    _ => unreachable!(),
                };
                self.sample_squares(seeding::derive(self.seed, index))?
            }
            Placement::Explicit(corners) => corners
                .iter()
                .map(|&(row, col)| Square { row, col, size: s })
                .collect(),
        };

        for sq in &squares {
            if sq.row + sq.size > n || sq.col + sq.size > n {
                return Err(DataError::SquareOutOfBounds {
                    row: sq.row,
                    col: sq.col,
                    size: sq.size,
                    image_size: n,
                });
            }
        }
        Ok(squares)
    }

    fn sample_squares(&self, seed: u64) -> Result<Vec<Square>, DataError> {
        let n = self.image_size;
        let s = self.square_size;
        if s > n {
            return Err(DataError::SquareOutOfBounds {
                row: 0,
                col: 0,
                size: s,
                image_size: n,
            });
        }
        let max_corner = n - s;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut squares: Vec<Square> = Vec::with_capacity(4);
        let mut attempts = 0;
        while squares.len() < 4 {
            if attempts >= PLACEMENT_ATTEMPTS {
                return Err(DataError::PlacementFailed {
                    squares: 4,
                    attempts,
                });
            }
            attempts += 1;
            let candidate = Square {
                row: rng.random_range(0..=max_corner),
                col: rng.random_range(0..=max_corner),
                size: s,
            };
            if squares.iter().all(|sq| !sq.overlaps(&candidate)) {
                squares.push(candidate);
            }
        }
        Ok(squares)
    }

    /// Mean Euclidean distance between square centers, in pixels. A single
    /// merged block has no pairs and scores 0.
    pub fn mean_pairwise_separation(&self) -> Result<f64, DataError> {
        let squares = self.squares()?;
        let mut sum = 0.0;
        let mut pairs = 0;
        for i in 0..squares.len() {
            for j in i + 1..squares.len() {
                let (ri, ci) = squares[i].center();
                let (rj, cj) = squares[j].center();
                sum += ((ri - rj).powi(2) + (ci - cj).powi(2)).sqrt();
                pairs += 1;
            }
        }
        if pairs == 0 {
            Ok(0.0)
        } else {
            Ok(sum / pairs as f64)
        }
    }

    /// Renders the binary image and its edge map.
    pub fn generate(&self) -> Result<(Image, Image), DataError> {
        generate_synthetic(self)
    }
}

/// Renders a pattern: white canvas, black squares, plus the ground-truth edge
/// map derived with [`synthetic_ground_truth`].
pub fn generate_synthetic(pattern: &SyntheticPattern) -> Result<(Image, Image), DataError> {
    let squares = pattern.squares()?;
    let mut image = Image::filled(pattern.image_size, pattern.image_size, 1.0);
    for sq in &squares {
        for row in sq.row..sq.row + sq.size {
            for col in sq.col..sq.col + sq.size {
                image.set(row, col, 0.0);
            }
        }
    }
    let ground_truth = synthetic_ground_truth(&image)?;
    Ok((image, ground_truth))
}

/// Edge map of a binary image: a pixel is an edge iff it is black and either
/// touches a white 4-neighbor or lies on the image border.
pub fn synthetic_ground_truth(binary: &Image) -> Result<Image, DataError> {
    if let Some((index, value)) = binary.first_non_binary() {
        return Err(DataError::NotBinary { index, value });
    }
    let (w, h) = (binary.width(), binary.height());
    let mut edges = Image::filled(w, h, 0.0);
    for row in 0..h {
        for col in 0..w {
            if binary.get(row, col) != 0.0 {
                continue; // white: never an edge
            }
            let on_border = row == 0 || col == 0 || row == h - 1 || col == w - 1;
            let has_white_neighbor = [(0i64, 1i64), (0, -1), (1, 0), (-1, 0)]
                .iter()
                .any(|&(dr, dc)| {
                    let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                    nr >= 0
                        && nc >= 0
                        && (nr as usize) < h
                        && (nc as usize) < w
                        && binary.get(nr as usize, nc as usize) == 1.0
                });
            if on_border || has_white_neighbor {
                edges.set(row, col, 1.0);
            }
        }
    }
    Ok(edges)
}
