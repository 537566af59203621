//! Exact optical blockage test of a straight segment against the
//! building lattice, walking the cells it crosses in order.

use super::grid::{BuildingGrid, Lattice, Point3};

/// Parameter interval `(t_in, t_out)` over which the segment
/// `a + t·(b − a)`, `t ∈ [0, 1]`, lies over the footprint of cell `(i, j)`.
fn footprint_overlap(lattice: &Lattice, i: i64, j: i64, a: &Point3, dx: f64, dy: f64) -> Option<(f64, f64)> {
    let (x0, x1, y0, y1) = lattice.footprint_bounds(i, j);
    let mut t_in = 0.0f64;
    let mut t_out = 1.0f64;
    for (start, delta, lo, hi) in [(a.x, dx, x0, x1), (a.y, dy, y0, y1)] {
        if delta == 0.0 {
            if start < lo || start > hi {
                return None;
            }
        } else {
            let ta = (lo - start) / delta;
            let tb = (hi - start) / delta;
            t_in = t_in.max(ta.min(tb));
            t_out = t_out.min(ta.max(tb));
        }
    }
    (t_in < t_out).then_some((t_in, t_out))
}

/// Walks the cells under the segment `tx → rx`; for every footprint the
/// segment passes over, asks `height` for the building in that cell and
/// reports blockage as soon as a building reaches the segment. Buildings
/// are queried at most once each, nearest to `tx` first.
pub(crate) fn segment_blocked<F>(lattice: &Lattice, tx: &Point3, rx: &Point3, mut height: F) -> bool
where
    F: FnMut(i64, i64) -> Option<f64>,
{
    let dx = rx.x - tx.x;
    let dy = rx.y - tx.y;
    if dx == 0.0 && dy == 0.0 {
        return false;
    }
    let dz = rx.z - tx.z;
    let p = lattice.pitch;
    let (mut i, mut j) = lattice.cell_of(tx.x, tx.y);
    let end = lattice.cell_of(rx.x, rx.y);

    let axis = |start: f64, delta: f64, cell: i64, offset: f64| -> (i64, f64, f64) {
        if delta > 0.0 {
            let boundary = (cell + 1) as f64 * p + offset;
            (1, (boundary - start) / delta, p / delta)
        } else if delta < 0.0 {
            let boundary = cell as f64 * p + offset;
            (-1, (boundary - start) / delta, -p / delta)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (step_x, mut t_max_x, t_delta_x) = axis(tx.x, dx, i, lattice.offset.0);
    let (step_y, mut t_max_y, t_delta_y) = axis(tx.y, dy, j, lattice.offset.1);

    let max_steps = (end.0 - i).unsigned_abs() + (end.1 - j).unsigned_abs() + 4;
    for _ in 0..=max_steps {
        if let Some((t_in, t_out)) = footprint_overlap(lattice, i, j, tx, dx, dy) {
            if let Some(h) = height(i, j) {
                let z_min = (tx.z + t_in * dz).min(tx.z + t_out * dz);
                if h >= z_min {
                    return true;
                }
            }
        }
        if (i, j) == end || t_max_x.min(t_max_y) > 1.0 {
            break;
        }
        if t_max_x < t_max_y {
            i += step_x;
            t_max_x += t_delta_x;
        } else {
            j += step_y;
            t_max_y += t_delta_y;
        }
    }
    false
}

/// True when the segment from `tx` to `rx` passes over some building whose
/// height reaches the segment inside its footprint.
pub fn is_blocked(grid: &BuildingGrid, tx: Point3, rx: Point3) -> bool {
    segment_blocked(&grid.lattice, &tx, &rx, |i, j| grid.height(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geosim::grid::synthesize_grid;
    use crate::scenario::ScenarioPreset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// One building of side 20 m centred at x = 50 on the line y = 0.
    fn single(height: f64) -> BuildingGrid {
        let lattice = Lattice::new(100.0, 20.0, (40.0, -10.0)).unwrap();
        BuildingGrid::from_heights(lattice, (0, 0), 1, 1, vec![height]).unwrap()
    }

    #[test]
    fn vertical_link_is_clear() {
        let g = single(1000.0);
        assert!(!is_blocked(&g, Point3::new(50.0, 0.0, 300.0), Point3::new(50.0, 0.0, 2.0)));
    }

    #[test]
    fn constructed_occlusion_and_clearance() {
        // Segment descends from 80 m to 0 m over 100 m; across the footprint
        // (x ∈ [40, 60]) its height drops from 48 to 32 m.
        let tx = Point3::new(0.0, 0.0, 80.0);
        let rx = Point3::new(100.0, 0.0, 0.0);
        assert!(is_blocked(&single(50.0), tx, rx));
        assert!(is_blocked(&single(40.0), tx, rx));
        assert!(!is_blocked(&single(31.0), tx, rx));
        // Level segment at 40 m versus a 50 m and a 30 m building.
        let level = (Point3::new(0.0, 0.0, 40.0), Point3::new(100.0, 0.0, 40.0));
        assert!(is_blocked(&single(50.0), level.0, level.1));
        assert!(!is_blocked(&single(30.0), level.0, level.1));
        // Same building, segment at 60 m.
        assert!(!is_blocked(&single(50.0), Point3::new(0.0, 0.0, 60.0), Point3::new(100.0, 0.0, 60.0)));
    }

    #[test]
    fn path_beside_building_is_clear() {
        let g = single(500.0);
        assert!(!is_blocked(&g, Point3::new(0.0, 15.0, 1.0), Point3::new(100.0, 15.0, 1.0)));
    }

    #[test]
    fn reverse_direction_agrees() {
        let g = single(50.0);
        let a = Point3::new(0.0, 0.0, 80.0);
        let b = Point3::new(100.0, 0.0, 0.0);
        assert_eq!(is_blocked(&g, a, b), is_blocked(&g, b, a));
    }

    /// Samples 10⁴ points along the segment and checks each against the
    /// footprint containing it.
    fn brute_force(grid: &BuildingGrid, a: Point3, b: Point3) -> bool {
        const N: usize = 10_000;
        (1..N).any(|k| {
            let t = k as f64 / N as f64;
            let x = a.x + t * (b.x - a.x);
            let y = a.y + t * (b.y - a.y);
            let z = a.z + t * (b.z - a.z);
            let (i, j) = grid.lattice.cell_of(x, y);
            grid.lattice.in_footprint(x, y) && grid.height(i, j).is_some_and(|h| h >= z)
        })
    }

    #[test]
    fn agrees_with_sampled_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut disagreements = 0;
        let mut blocked = 0;
        let links = 2000;
        for k in 0..links {
            let preset = ScenarioPreset::ALL[k % 3];
            let grid = synthesize_grid(&preset.scenario(), 1400.0, k as u64).unwrap();
            let phi = rng.random::<f64>() * std::f64::consts::TAU;
            let d = rng.random::<f64>() * 600.0;
            let tx = Point3::new(rng.random::<f64>() * 20.0, rng.random::<f64>() * 20.0, rng.random::<f64>() * 150.0);
            let rx = Point3::new(tx.x + d * phi.cos(), tx.y + d * phi.sin(), rng.random::<f64>() * 5.0);
            let exact = is_blocked(&grid, tx, rx);
            blocked += exact as usize;
            if exact != brute_force(&grid, tx, rx) {
                disagreements += 1;
            }
        }
        assert!(blocked > links / 10 && blocked < links * 9 / 10, "{blocked}");
        assert!(disagreements * 1000 <= links, "{disagreements} of {links}");
    }

    #[test]
    fn visits_each_building_once() {
        let grid = synthesize_grid(&ScenarioPreset::Urban.scenario(), 3000.0, 5).unwrap();
        let mut seen = std::collections::HashSet::new();
        let tx = Point3::new(3.3, -7.1, 1e6);
        let rx = Point3::new(1100.0, 640.0, 1e6);
        let blocked = segment_blocked(&grid.lattice, &tx, &rx, |i, j| {
            assert!(seen.insert((i, j)), "cell {i},{j} visited twice");
            grid.height(i, j)
        });
        assert!(!blocked);
        assert!(seen.len() > 20);
    }
}
