use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scenario::{height_quantile, BuiltUpScenario};

/// A point in meters; `z` is height above ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Regular Manhattan layout: lattice cell `(i, j)` holds one square
/// footprint of side `footprint` at its lower-left corner,
/// `[i·pitch + ox, i·pitch + ox + footprint] × [j·pitch + oy, j·pitch + oy + footprint]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub pitch: f64,
    pub footprint: f64,
    pub offset: (f64, f64),
}

impl Lattice {
    pub fn new(pitch: f64, footprint: f64, offset: (f64, f64)) -> Result<Self> {
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(Error::domain("pitch", pitch, "building pitch W + S must be positive"));
        }
        if !(footprint >= 0.0 && footprint <= pitch) {
            return Err(Error::domain("footprint", footprint, "must lie in [0, pitch]"));
        }
        Ok(Self {
            pitch,
            footprint,
            offset,
        })
    }

    pub fn for_scenario(scenario: &BuiltUpScenario, offset: (f64, f64)) -> Result<Self> {
        Self::new(scenario.pitch(), scenario.width(), offset)
    }

    #[inline]
    pub fn cell_of(&self, x: f64, y: f64) -> (i64, i64) {
        (
            ((x - self.offset.0) / self.pitch).floor() as i64,
            ((y - self.offset.1) / self.pitch).floor() as i64,
        )
    }

    /// `(x0, x1, y0, y1)` of the footprint in cell `(i, j)`.
    #[inline]
    pub fn footprint_bounds(&self, i: i64, j: i64) -> (f64, f64, f64, f64) {
        let x0 = i as f64 * self.pitch + self.offset.0;
        let y0 = j as f64 * self.pitch + self.offset.1;
        (x0, x0 + self.footprint, y0, y0 + self.footprint)
    }

    /// True when the ground point lies inside a building footprint.
    pub fn in_footprint(&self, x: f64, y: f64) -> bool {
        let (i, j) = self.cell_of(x, y);
        let (x0, x1, y0, y1) = self.footprint_bounds(i, j);
        x >= x0 && x < x1 && y >= y0 && y < y1
    }
}

/// A sampled city: a [`Lattice`] and one height per building over a
/// finite block of cells. Cells outside the block hold no building.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildingGrid {
    pub lattice: Lattice,
    first_cell: (i64, i64),
    cols: usize,
    rows: usize,
    heights: Vec<f64>,
}

impl BuildingGrid {
    /// Grid over cells `first_cell .. first_cell + (cols, rows)`, heights row-major in `j`.
    pub fn from_heights(lattice: Lattice, first_cell: (i64, i64), cols: usize, rows: usize, heights: Vec<f64>) -> Result<Self> {
        if heights.len() != cols * rows {
            return Err(Error::domain("heights", heights.len() as f64, "length must equal cols·rows"));
        }
        if let Some(&h) = heights.iter().find(|h| !(**h >= 0.0)) {
            return Err(Error::domain("height", h, "building heights must be non-negative"));
        }
        Ok(Self {
            lattice,
            first_cell,
            cols,
            rows,
            heights,
        })
    }

    pub fn cell_pitch(&self) -> f64 {
        self.lattice.pitch
    }

    pub fn footprint(&self) -> f64 {
        self.lattice.footprint
    }

    pub fn origin_offset(&self) -> (f64, f64) {
        self.lattice.offset
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    pub fn building_count(&self) -> usize {
        self.heights.len()
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn height(&self, i: i64, j: i64) -> Option<f64> {
        let di = i.checked_sub(self.first_cell.0)?;
        let dj = j.checked_sub(self.first_cell.1)?;
        if di < 0 || dj < 0 || di as usize >= self.cols || dj as usize >= self.rows {
            return None;
        }
        Some(self.heights[dj as usize * self.cols + di as usize])
    }
}

const MAX_CELLS: usize = 50_000_000;

/// Samples a city covering the square of side `extent` centered on the
/// origin: the layout phase is uniform in `[0, pitch)²` and every building
/// whose footprint touches the square gets an independent Rayleigh(γ) height.
pub fn synthesize_grid(scenario: &BuiltUpScenario, extent: f64, rng_seed: u64) -> Result<BuildingGrid> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let pitch = scenario.pitch();
    if !(pitch > 0.0) {
        return Err(Error::domain("pitch", pitch, "building pitch W + S must be positive"));
    }
    let offset = (rng.random::<f64>() * pitch, rng.random::<f64>() * pitch);
    synthesize_with_offset(scenario, extent, offset, &mut rng)
}

pub(crate) fn synthesize_with_offset(
    scenario: &BuiltUpScenario,
    extent: f64,
    offset: (f64, f64),
    rng: &mut impl Rng,
) -> Result<BuildingGrid> {
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(Error::domain("extent", extent, "must be positive"));
    }
    let lattice = Lattice::for_scenario(scenario, offset)?;
    let half = extent / 2.0;
    let (p, w) = (lattice.pitch, lattice.footprint);
    let range = |o: f64| {
        let lo = ((-half - w - o) / p).ceil() as i64;
        let hi = ((half - o) / p).floor() as i64;
        (lo, (hi - lo + 1).max(0) as usize)
    };
    let (i0, cols) = range(offset.0);
    let (j0, rows) = range(offset.1);
    if cols.saturating_mul(rows) > MAX_CELLS {
        return Err(Error::domain("extent", extent, "grid would exceed the cell limit"));
    }
    let gamma = scenario.gamma();
    let heights = (0..cols * rows)
        .map(|_| height_quantile(rng.random::<f64>(), gamma))
        .collect();
    BuildingGrid::from_heights(lattice, (i0, j0), cols, rows, heights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioPreset;

    #[test]
    fn suburban_two_kilometers() {
        let s = ScenarioPreset::Suburban.scenario();
        let g = synthesize_grid(&s, 2000.0, 7).unwrap();
        assert!((g.cell_pitch() - 36.515).abs() < 1e-3);
        let (cols, rows) = g.dimensions();
        // 2000 m / 36.52 m ≈ 54.8 cells per side, plus partially covered edge buildings.
        assert!((54..=56).contains(&cols), "{cols}");
        assert!((54..=56).contains(&rows), "{rows}");
        let (ox, oy) = g.origin_offset();
        assert!((0.0..g.cell_pitch()).contains(&ox) && (0.0..g.cell_pitch()).contains(&oy));
        assert!(g.heights().iter().all(|h| *h >= 0.0));
    }

    #[test]
    fn seeded_grids_repeat() {
        let s = ScenarioPreset::Urban.scenario();
        assert_eq!(synthesize_grid(&s, 800.0, 42).unwrap(), synthesize_grid(&s, 800.0, 42).unwrap());
        assert_ne!(synthesize_grid(&s, 800.0, 42).unwrap(), synthesize_grid(&s, 800.0, 43).unwrap());
    }

    #[test]
    fn tiny_gamma_gives_flat_city() {
        let s = ScenarioPreset::Urban.scenario().with_gamma(1e-9).unwrap();
        let g = synthesize_grid(&s, 500.0, 1).unwrap();
        assert!(g.heights().iter().all(|h| *h < 1e-6));
    }

    #[test]
    fn height_sample_statistics() {
        // Rayleigh mean is γ·sqrt(π/2).
        let s = ScenarioPreset::Urban.scenario();
        let g = synthesize_grid(&s, 6000.0, 3).unwrap();
        let mean = g.heights().iter().sum::<f64>() / g.building_count() as f64;
        let expected = 15.0 * (std::f64::consts::PI / 2.0).sqrt();
        assert!((mean / expected - 1.0).abs() < 0.02, "{mean} vs {expected}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = ScenarioPreset::Urban.scenario();
        assert!(synthesize_grid(&s, 0.0, 1).is_err());
        let flat = BuiltUpScenario::new(1.0, 100.0, 5.0).unwrap().with_width_override(0.0).unwrap();
        assert!(matches!(synthesize_grid(&flat, 100.0, 1), Err(Error::Domain { .. })));
        assert!(Lattice::new(10.0, 11.0, (0.0, 0.0)).is_err());
    }

    #[test]
    fn footprint_membership() {
        let l = Lattice::new(10.0, 4.0, (1.0, 2.0)).unwrap();
        assert!(l.in_footprint(1.5, 2.5));
        assert!(l.in_footprint(11.0, 12.0));
        assert!(!l.in_footprint(6.0, 3.0));
        assert!(!l.in_footprint(0.5, 2.5));
        assert_eq!(l.cell_of(-0.5, 1.0), (-1, -1));
    }
}
