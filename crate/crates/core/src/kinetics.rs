//! Propulsion derived from the excitation pattern.
//!
//! Every cell carries a local vector pointing away from its excited
//! neighbours: the negated mean of the unit vectors toward each Excited
//! in-grid Moore neighbour. Summing local vectors over the lattice gives the
//! body-frame force; summing their moments about the lattice centre gives the
//! torque. The pose then follows first-order kinematics without inertia.
//!
//! Body frame: `x` grows with the column index, `y` with the row index, and
//! the origin is the geometric centre `((w-1)/2, (h-1)/2)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::ca::{ExcitationMap, Lattice, NEIGHBOR_OFFSETS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// z-component of the 2D cross product `self × other`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Counter-clockwise rotation by `angle` radians.
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// Net body-frame force and torque of one lattice configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegralForce {
    pub force: Vec2,
    pub torque: f64,
}

/// Position of the lattice centre in the world and its heading.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub position: Vec2,
    /// Radians in `(-π, π]`.
    pub heading: f64,
}

impl Pose {
    pub fn new(position: Vec2, heading: f64) -> Self {
        Self {
            position,
            heading: wrap_angle(heading),
        }
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionGains {
    /// World units per unit force per step.
    pub k_translate: f64,
    /// Radians per unit torque per step.
    pub k_rotate: f64,
}

impl MotionGains {
    /// Calibrated so a 200 × 200 lattice reaches and circles a light 300
    /// units away within 20 000 steps: under stochastic edge stimulation the
    /// net force is only a few tens of units, i.e. one or two cells per step.
    pub const DEFAULT_TRANSLATE: f64 = 0.1;
    pub const DEFAULT_ROTATE: f64 = 5e-6;

    pub fn new(k_translate: f64, k_rotate: f64) -> Result<Self> {
        for (name, v) in [("k_translate", k_translate), ("k_rotate", k_rotate)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self {
            k_translate,
            k_rotate,
        })
    }
}

impl Default for MotionGains {
    fn default() -> Self {
        Self {
            k_translate: Self::DEFAULT_TRANSLATE,
            k_rotate: Self::DEFAULT_ROTATE,
        }
    }
}

/// Common multiple of every neighbour count 1..=8.
const SCALE: i64 = 840;

/// A local vector in exact form: `(a + b/√2) / SCALE` per component, with
/// integer `a` (orthogonal neighbours) and `b` (diagonal neighbours).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct ExactVec {
    ax: i64,
    bx: i64,
    ay: i64,
    by: i64,
}

impl ExactVec {
    fn from_mask(mask: u8) -> Self {
        let (mut ax, mut bx, mut ay, mut by) = (0i64, 0i64, 0i64, 0i64);
        let mut count = 0i64;
        for (k, &(dx, dy)) in NEIGHBOR_OFFSETS.iter().enumerate() {
            if mask >> k & 1 == 0 {
                continue;
            }
            count += 1;
            if dx != 0 && dy != 0 {
                bx += dx as i64;
                by += dy as i64;
            } else {
                ax += dx as i64;
                ay += dy as i64;
            }
        }
        // Negated mean: points away from the excited neighbours.
        let per = -SCALE / count.max(1);
        Self {
            ax: ax * per,
            bx: bx * per,
            ay: ay * per,
            by: by * per,
        }
    }

    fn to_vec2(self) -> Vec2 {
        Vec2::new(combine(self.ax, self.bx, SCALE), combine(self.ay, self.by, SCALE))
    }
}

#[inline]
fn combine(a: i64, b: i64, denom: i64) -> f64 {
    (a as f64 + b as f64 * FRAC_1_SQRT_2) / denom as f64
}

/// Local vectors for all 256 neighbourhood masks.
///
/// Sums are accumulated in exact integer form and rounded once at the end,
/// so the integral force does not depend on summation order and symmetric
/// patterns cancel exactly.
#[derive(Debug, Clone)]
pub struct ForceTable {
    exact: [ExactVec; 256],
}

impl ForceTable {
    pub fn new() -> Self {
        let mut exact = [ExactVec::default(); 256];
        for (mask, v) in exact.iter_mut().enumerate() {
            *v = ExactVec::from_mask(mask as u8);
        }
        Self { exact }
    }

    /// Local vector for a neighbourhood mask over [`NEIGHBOR_OFFSETS`].
    #[inline]
    pub fn get(&self, mask: u8) -> Vec2 {
        self.exact[mask as usize].to_vec2()
    }

    /// Integral force of the lattice whose census is `map`.
    pub fn integral(&self, map: &ExcitationMap, width: usize, height: usize) -> IntegralForce {
        // Offsets from the centre doubled so they are integers.
        let (w2, h2) = (width as i64 - 1, height as i64 - 1);
        let (mut fa_x, mut fb_x, mut fa_y, mut fb_y) = (0i64, 0i64, 0i64, 0i64);
        let (mut ta, mut tb) = (0i64, 0i64);
        for y in 0..height {
            let ry = 2 * y as i64 - h2;
            for x in 0..width {
                let mask = map.mask(x, y);
                if mask == 0 {
                    continue;
                }
                let v = &self.exact[mask as usize];
                let rx = 2 * x as i64 - w2;
                fa_x += v.ax;
                fb_x += v.bx;
                fa_y += v.ay;
                fb_y += v.by;
                ta += rx * v.ay - ry * v.ax;
                tb += rx * v.by - ry * v.bx;
            }
        }
        IntegralForce {
            force: Vec2::new(combine(fa_x, fb_x, SCALE), combine(fa_y, fb_y, SCALE)),
            torque: combine(ta, tb, 2 * SCALE),
        }
    }
}

impl Default for ForceTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Local vector of cell `(x, y)`; zero when no neighbour is excited.
pub fn local_force(lattice: &Lattice, x: usize, y: usize) -> Result<Vec2> {
    lattice.get(x, y)?;
    let mut mask = 0u8;
    for (k, &(dx, dy)) in NEIGHBOR_OFFSETS.iter().enumerate() {
        if lattice.neighbor_excited(x, y, dx, dy) {
            mask |= 1 << k;
        }
    }
    Ok(ExactVec::from_mask(mask).to_vec2())
}

/// Sum of local vectors and of their moments about the lattice centre.
pub fn integral_force(lattice: &Lattice) -> IntegralForce {
    ForceTable::new().integral(&ExcitationMap::new(lattice), lattice.width(), lattice.height())
}

/// Euler step: rotate first, then translate along the body-frame force
/// expressed in the world frame by the updated heading.
pub fn integrate_pose(pose: Pose, f: &IntegralForce, gains: &MotionGains) -> Pose {
    let heading = wrap_angle(pose.heading + gains.k_rotate * f.torque);
    let displacement = (f.force * gains.k_translate).rotated(heading);
    Pose {
        position: pose.position + displacement,
        heading,
    }
}
