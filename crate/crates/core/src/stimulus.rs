//! Light source and the stochastic excitation of the dark-facing edge.
//!
//! Perimeter cells that are strictly farther from the light than the lattice
//! centre are eligible. Each eligible Resting cell becomes Excited with
//! probability `p_excite`, one Bernoulli draw per such cell, visiting the
//! perimeter in row-major order.

use rand_core::RngCore;

use crate::ca::{CellState, Lattice};
use crate::error::{Error, Result};
use crate::kinetics::{Pose, Vec2};

/// Per-cell per-step edge excitation probability.
pub const DEFAULT_P_EXCITE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightSource {
    pub position: Vec2,
    /// Drawing radius in world units; has no effect on the dynamics.
    pub radius: f64,
}

impl LightSource {
    pub fn new(position: Vec2, radius: f64) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::Invalid(format!("light position {position:?} is not finite")));
        }
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::Invalid(format!("light radius {radius} must be >= 0")));
        }
        Ok(Self { position, radius })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StimulusConfig {
    p_excite: f64,
}

impl StimulusConfig {
    pub fn new(p_excite: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_excite) {
            return Err(Error::Invalid(format!("p_excite {p_excite} outside [0, 1]")));
        }
        Ok(Self { p_excite })
    }

    pub fn p_excite(&self) -> f64 {
        self.p_excite
    }
}

impl Default for StimulusConfig {
    fn default() -> Self {
        Self {
            p_excite: DEFAULT_P_EXCITE,
        }
    }
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one `u64`.
#[inline]
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// World position of cell `(x, y)` of a `width × height` lattice; one cell is
/// one world unit and the body origin is the lattice centre.
pub fn world_position_of_cell(pose: &Pose, width: usize, height: usize, x: usize, y: usize) -> Result<Vec2> {
    if x >= width || y >= height {
        return Err(Error::CellIndex { x, y, width, height });
    }
    Ok(cell_world(pose, width, height, x, y))
}

#[inline]
fn cell_world(pose: &Pose, width: usize, height: usize, x: usize, y: usize) -> Vec2 {
    let body = Vec2::new(
        x as f64 - (width as f64 - 1.0) / 2.0,
        y as f64 - (height as f64 - 1.0) / 2.0,
    );
    pose.position + body.rotated(pose.heading)
}

/// Perimeter cells in row-major order.
pub fn perimeter_cells(width: usize, height: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..height).flat_map(move |y| {
        let edge_row = y == 0 || y + 1 == height;
        (0..width).filter(move |&x| edge_row || x == 0 || x + 1 == width).map(move |x| (x, y))
    })
}

/// Perimeter cells strictly farther from the light than the lattice centre,
/// in row-major order.
pub fn eligible_boundary_cells(pose: &Pose, width: usize, height: usize, light: &LightSource) -> Vec<(usize, usize)> {
    let centre_dist = pose.position.distance(light.position);
    let (s, c) = pose.heading.sin_cos();
    let (cx, cy) = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
    perimeter_cells(width, height)
        .filter(|&(x, y)| {
            let (bx, by) = (x as f64 - cx, y as f64 - cy);
            let world = Vec2::new(
                pose.position.x + c * bx - s * by,
                pose.position.y + s * bx + c * by,
            );
            world.distance(light.position) > centre_dist
        })
        .collect()
}

/// Excites eligible Resting perimeter cells in place, returning how many
/// were excited.
pub fn stimulate<R: RngCore + ?Sized>(
    lattice: &mut Lattice,
    pose: &Pose,
    light: &LightSource,
    cfg: &StimulusConfig,
    rng: &mut R,
) -> usize {
    let mut fired = 0;
    for (x, y) in eligible_boundary_cells(pose, lattice.width(), lattice.height(), light) {
        if lattice.at(x, y) != CellState::Resting {
            continue;
        }
        if unit_f64(rng) < cfg.p_excite {
            // In range: produced by perimeter_cells for this lattice.
            lattice.set(x, y, CellState::Excited).expect("perimeter cell");
            fired += 1;
        }
    }
    fired
}

/// Pure form of [`stimulate`].
pub fn apply_light_stimulus<R: RngCore + ?Sized>(
    lattice: &Lattice,
    pose: &Pose,
    light: &LightSource,
    cfg: &StimulusConfig,
    rng: &mut R,
) -> Lattice {
    let mut out = lattice.clone();
    stimulate(&mut out, pose, light, cfg, rng);
    out
}
