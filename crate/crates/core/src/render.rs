//! Binary PPM (P6) snapshots of the arena.

use std::io::Write;
use std::path::Path;

use crate::ca::{CellState, Lattice};
use crate::error::{Error, Result};
use crate::kinetics::{Pose, Vec2};
use crate::stimulus::LightSource;

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];
pub const EXCITED: Rgb = BLACK;
pub const REFRACTORY: Rgb = [128, 128, 128];
pub const RESTING: Rgb = [220, 220, 220];
pub const TRAIL: Rgb = [128, 128, 128];

pub fn cell_color(state: CellState) -> Rgb {
    match state {
        CellState::Resting => RESTING,
        CellState::Excited => EXCITED,
        CellState::Refractory => REFRACTORY,
    }
}

/// Axis-aligned world rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldRect {
    pub min: Vec2,
    pub max: Vec2,
}

impl WorldRect {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    pub fn centered(center: Vec2, half_width: f64, half_height: f64) -> Self {
        Self {
            min: Vec2::new(center.x - half_width, center.y - half_height),
            max: Vec2::new(center.x + half_width, center.y + half_height),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn filled(width: usize, height: usize, color: Rgb) -> Self {
        Self {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    fn put(&mut self, x: i64, y: i64, color: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.pixels[y as usize * self.width + x as usize] = color;
        }
    }

    pub fn count(&self, color: Rgb) -> usize {
        self.pixels.iter().filter(|&&p| p == color).count()
    }

    pub fn write_ppm<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self.pixels.iter().flatten().copied().collect();
        out.write_all(&bytes)?;
        out.flush()?;
        Ok(())
    }

    pub fn save_ppm(&self, path: &Path) -> Result<()> {
        self.write_ppm(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// Maps world coordinates to pixels; image `y` grows downward.
#[derive(Debug, Clone, Copy)]
struct View {
    window: WorldRect,
    scale: f64,
}

impl View {
    fn pixel(&self, p: Vec2) -> (f64, f64) {
        (
            (p.x - self.window.min.x) * self.scale,
            (self.window.max.y - p.y) * self.scale,
        )
    }

    fn pixel_center(&self, px: usize, py: usize) -> Vec2 {
        Vec2::new(
            self.window.min.x + (px as f64 + 0.5) / self.scale,
            self.window.max.y - (py as f64 + 0.5) / self.scale,
        )
    }
}

/// Draws the lattice at its pose, the trail of centre positions as a 1px
/// polyline and the light as a solid black disc, on white.
pub fn render_snapshot(
    lattice: Option<&Lattice>,
    pose: &Pose,
    light: &LightSource,
    trail: &[Vec2],
    window: WorldRect,
    pixels_per_unit: f64,
) -> Result<Image> {
    if !(pixels_per_unit.is_finite() && pixels_per_unit > 0.0) {
        return Err(Error::Invalid(format!("pixels_per_unit {pixels_per_unit} must be positive")));
    }
    let (ww, wh) = (window.max.x - window.min.x, window.max.y - window.min.y);
    if !(ww > 0.0 && wh > 0.0) {
        return Err(Error::Invalid("render window has no area".into()));
    }
    let width = (ww * pixels_per_unit).round().max(1.0) as usize;
    let height = (wh * pixels_per_unit).round().max(1.0) as usize;
    let view = View {
        window,
        scale: pixels_per_unit,
    };
    let mut img = Image::filled(width, height, WHITE);

    if let Some(lattice) = lattice {
        let (cx, cy) = (
            (lattice.width() as f64 - 1.0) / 2.0,
            (lattice.height() as f64 - 1.0) / 2.0,
        );
        let (s, c) = pose.heading.sin_cos();
        for py in 0..height {
            for px in 0..width {
                let d = view.pixel_center(px, py) - pose.position;
                // Inverse rotation into the body frame; cells are unit squares
                // centred on integer body coordinates.
                let bx = (c * d.x + s * d.y + cx + 0.5).floor();
                let by = (-s * d.x + c * d.y + cy + 0.5).floor();
                if bx >= 0.0 && by >= 0.0 && (bx as usize) < lattice.width() && (by as usize) < lattice.height() {
                    img.pixels[py * width + px] = cell_color(lattice.at(bx as usize, by as usize));
                }
            }
        }
    }

    for pair in trail.windows(2) {
        let (x0, y0) = view.pixel(pair[0]);
        let (x1, y1) = view.pixel(pair[1]);
        draw_line(&mut img, x0.floor() as i64, y0.floor() as i64, x1.floor() as i64, y1.floor() as i64, TRAIL);
    }

    if light.radius > 0.0 {
        let r = light.radius * pixels_per_unit;
        let (lx, ly) = view.pixel(light.position);
        let (x0, x1) = ((lx - r).floor().max(0.0) as usize, ((lx + r).ceil().max(0.0) as usize).min(width));
        let (y0, y1) = ((ly - r).floor().max(0.0) as usize, ((ly + r).ceil().max(0.0) as usize).min(height));
        for py in y0..y1 {
            for px in x0..x1 {
                let (dx, dy) = (px as f64 + 0.5 - lx, py as f64 + 0.5 - ly);
                if dx * dx + dy * dy <= r * r {
                    img.pixels[py * width + px] = BLACK;
                }
            }
        }
    }
    Ok(img)
}

/// Bresenham line, clipped per pixel. Segments longer than the image
/// diagonal several times over are skipped.
fn draw_line(img: &mut Image, mut x0: i64, mut y0: i64, x1: i64, y1: i64, color: Rgb) {
    let limit = 4 * (img.width + img.height) as i64;
    if (x1 - x0).abs() > limit || (y1 - y0).abs() > limit {
        return;
    }
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        img.put(x0, y0, color);
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}
