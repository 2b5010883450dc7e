//! Three-state retained-excitation cellular automaton.
//!
//! A cell is Resting, Excited or Refractory. With `σ` the number of Excited
//! cells among its eight Moore neighbours, a rule `R(θ1 θ2 δ1 δ2)` updates
//!
//! * Resting → Excited when `θ1 ≤ σ ≤ θ2`, otherwise stays Resting;
//! * Excited → Excited when `δ1 ≤ σ ≤ δ2`, otherwise becomes Refractory;
//! * Refractory → Resting unconditionally.
//!
//! Neighbours outside the lattice count as Resting (truncated neighbourhood).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Moore neighbourhood offsets `(dx, dy)`, in the fixed order used for every
/// summation over neighbours (row by row, `dy` then `dx`).
pub const NEIGHBOR_OFFSETS: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Interval thresholds of a retained-excitation rule, written `R(θ1θ2δ1δ2)`.
///
/// Each digit is in `0..=9`. A 9 as lower bound can never be met (a cell has
/// at most eight neighbours) and a 0 is met with no excited neighbour at all.
/// Intervals with lower > upper are empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleParams {
    pub theta1: u8,
    pub theta2: u8,
    pub delta1: u8,
    pub delta2: u8,
}

impl RuleParams {
    pub fn new(theta1: u8, theta2: u8, delta1: u8, delta2: u8) -> Result<Self> {
        for (position, digit) in [theta1, theta2, delta1, delta2].into_iter().enumerate() {
            if digit > 9 {
                return Err(Error::RuleDigitRange { position, digit });
            }
        }
        Ok(Self {
            theta1,
            theta2,
            delta1,
            delta2,
        })
    }

    /// Whether a resting cell with `sigma` excited neighbours becomes excited.
    #[inline]
    pub fn excites(&self, sigma: u8) -> bool {
        self.theta1 <= sigma && sigma <= self.theta2
    }

    /// Whether an excited cell with `sigma` excited neighbours stays excited.
    #[inline]
    pub fn retains(&self, sigma: u8) -> bool {
        self.delta1 <= sigma && sigma <= self.delta2
    }

    /// The four-digit code, e.g. `"2201"`.
    pub fn code(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RuleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}{}",
            self.theta1, self.theta2, self.delta1, self.delta2
        )
    }
}

impl FromStr for RuleParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rule(s)
    }
}

/// Parses a four-digit rule code such as `"2201"` into `(θ1, θ2, δ1, δ2)`.
pub fn parse_rule(code: &str) -> Result<RuleParams> {
    let mut digits = [0u8; 4];
    let mut count = 0;
    for (position, ch) in code.chars().enumerate() {
        if position >= 4 {
            return Err(Error::RuleLength {
                code: code.to_owned(),
                len: code.chars().count(),
            });
        }
        digits[position] = ch
            .to_digit(10)
            .ok_or_else(|| Error::RuleChar {
                code: code.to_owned(),
                ch,
                position,
            })? as u8;
        count += 1;
    }
    if count != 4 {
        return Err(Error::RuleLength {
            code: code.to_owned(),
            len: count,
        });
    }
    RuleParams::new(digits[0], digits[1], digits[2], digits[3])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(u8)]
pub enum CellState {
    #[default]
    Resting = 0,
    Excited = 1,
    Refractory = 2,
}

impl CellState {
    pub fn digit(self) -> char {
        match self {
            CellState::Resting => '0',
            CellState::Excited => '1',
            CellState::Refractory => '2',
        }
    }

    pub fn from_digit(ch: char) -> Option<Self> {
        match ch {
            '0' => Some(CellState::Resting),
            '1' => Some(CellState::Excited),
            '2' => Some(CellState::Refractory),
            _ => None,
        }
    }
}

/// Transition of a single cell given its excited-neighbour count.
#[inline]
pub fn next_cell_state(state: CellState, sigma: u8, rule: &RuleParams) -> CellState {
    match state {
        CellState::Resting if rule.excites(sigma) => CellState::Excited,
        CellState::Resting => CellState::Resting,
        CellState::Excited if rule.retains(sigma) => CellState::Excited,
        CellState::Excited => CellState::Refractory,
        CellState::Refractory => CellState::Resting,
    }
}

/// Rectangular grid of cells stored row-major; `y` is the row index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    width: usize,
    height: usize,
    states: Vec<CellState>,
    generation: u64,
}

impl Lattice {
    /// All-Resting lattice at generation 0.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::LatticeDims { width, height });
        }
        Ok(Self {
            width,
            height,
            states: vec![CellState::Resting; width * height],
            generation: 0,
        })
    }

    pub fn from_states(width: usize, height: usize, states: Vec<CellState>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::LatticeDims { width, height });
        }
        if states.len() != width * height {
            return Err(Error::StateCount {
                expected: width * height,
                found: states.len(),
            });
        }
        Ok(Self {
            width,
            height,
            states,
            generation: 0,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn states(&self) -> &[CellState] {
        &self.states
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height
    }

    fn check(&self, x: usize, y: usize) -> Result<usize> {
        if self.contains(x, y) {
            Ok(y * self.width + x)
        } else {
            Err(Error::CellIndex {
                x,
                y,
                width: self.width,
                height: self.height,
            })
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Result<CellState> {
        self.check(x, y).map(|i| self.states[i])
    }

    pub fn set(&mut self, x: usize, y: usize, state: CellState) -> Result<()> {
        let i = self.check(x, y)?;
        self.states[i] = state;
        Ok(())
    }

    /// Unchecked accessor for hot loops; panics on out-of-range indices.
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> CellState {
        self.states[y * self.width + x]
    }

    pub fn count(&self, state: CellState) -> usize {
        self.states.iter().filter(|&&s| s == state).count()
    }

    /// Whether the in-grid neighbour at offset `(dx, dy)` from `(x, y)` is Excited.
    #[inline]
    pub(crate) fn neighbor_excited(&self, x: usize, y: usize, dx: i32, dy: i32) -> bool {
        let nx = x as i64 + dx as i64;
        let ny = y as i64 + dy as i64;
        nx >= 0
            && ny >= 0
            && (nx as usize) < self.width
            && (ny as usize) < self.height
            && self.states[ny as usize * self.width + nx as usize] == CellState::Excited
    }

    /// Parses `height` lines of `width` digits (0, 1, 2). Blank trailing
    /// lines are ignored; all rows must have equal length.
    pub fn from_text(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut states = Vec::with_capacity(width * height);
        for (y, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(Error::TextRow {
                    row: y,
                    expected: width,
                    found: row.chars().count(),
                });
            }
            for (x, ch) in row.chars().enumerate() {
                states.push(CellState::from_digit(ch).ok_or(Error::TextChar { x, y, ch })?);
            }
        }
        Self::from_states(width, height, states)
    }

    /// Serialises as newline-terminated rows of state digits.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for row in self.states.chunks(self.width) {
            out.extend(row.iter().map(|s| s.digit()));
            out.push('\n');
        }
        out
    }

    /// Advances `self` into `next`, reusing `next`'s allocation.
    pub fn step_into(&self, rule: &RuleParams, next: &mut Lattice, scratch: &mut ExcitationMap) {
        scratch.rebuild(self);
        next.width = self.width;
        next.height = self.height;
        next.generation = self.generation + 1;
        next.states.resize(self.states.len(), CellState::Resting);

        // State-indexed transition table over σ = 0..=8.
        let mut table = [[CellState::Resting; 9]; 3];
        for (s, row) in [CellState::Resting, CellState::Excited, CellState::Refractory]
            .into_iter()
            .zip(table.iter_mut())
        {
            for (sigma, out) in row.iter_mut().enumerate() {
                *out = next_cell_state(s, sigma as u8, rule);
            }
        }

        let w = self.width;
        for y in 0..self.height {
            let src = &self.states[y * w..(y + 1) * w];
            let dst = &mut next.states[y * w..(y + 1) * w];
            for x in 0..w {
                let sigma = scratch.sigma(x, y);
                dst[x] = table[src[x] as usize][sigma as usize];
            }
        }
    }
}

/// Excited-neighbour census of a lattice.
///
/// Holds a zero-padded copy of the lattice's excitation indicator so that the
/// Moore neighbourhood of every cell, including border cells, can be read
/// without bounds branches. Reused across steps to avoid reallocating.
#[derive(Debug, Clone, Default)]
pub struct ExcitationMap {
    width: usize,
    height: usize,
    padded: Vec<u8>,
}

impl ExcitationMap {
    pub fn new(lattice: &Lattice) -> Self {
        let mut map = Self::default();
        map.rebuild(lattice);
        map
    }

    pub fn rebuild(&mut self, lattice: &Lattice) {
        self.width = lattice.width;
        self.height = lattice.height;
        let pw = self.width + 2;
        self.padded.clear();
        self.padded.resize(pw * (self.height + 2), 0);
        for (y, row) in lattice.states.chunks(self.width).enumerate() {
            let dst = &mut self.padded[(y + 1) * pw + 1..(y + 1) * pw + 1 + self.width];
            for (d, s) in dst.iter_mut().zip(row) {
                *d = (*s == CellState::Excited) as u8;
            }
        }
    }

    /// Number of excited in-grid neighbours of `(x, y)`.
    #[inline]
    pub fn sigma(&self, x: usize, y: usize) -> u8 {
        let pw = self.width + 2;
        let up = &self.padded[y * pw + x..y * pw + x + 3];
        let mid = &self.padded[(y + 1) * pw + x..(y + 1) * pw + x + 3];
        let down = &self.padded[(y + 2) * pw + x..(y + 2) * pw + x + 3];
        up[0] + up[1] + up[2] + mid[0] + mid[2] + down[0] + down[1] + down[2]
    }

    /// Bit `k` set when the neighbour at `NEIGHBOR_OFFSETS[k]` is Excited.
    #[inline]
    pub fn mask(&self, x: usize, y: usize) -> u8 {
        let pw = self.width + 2;
        let up = &self.padded[y * pw + x..y * pw + x + 3];
        let mid = &self.padded[(y + 1) * pw + x..(y + 1) * pw + x + 3];
        let down = &self.padded[(y + 2) * pw + x..(y + 2) * pw + x + 3];
        up[0]
            | up[1] << 1
            | up[2] << 2
            | mid[0] << 3
            | mid[2] << 4
            | down[0] << 5
            | down[1] << 6
            | down[2] << 7
    }
}

/// σ for the cell at `(x, y)`.
pub fn count_excited_neighbors(lattice: &Lattice, x: usize, y: usize) -> Result<u8> {
    lattice.check(x, y)?;
    Ok(NEIGHBOR_OFFSETS
        .iter()
        .filter(|&&(dx, dy)| lattice.neighbor_excited(x, y, dx, dy))
        .count() as u8)
}

/// One synchronous update of every cell from the previous generation.
pub fn step_lattice(lattice: &Lattice, rule: &RuleParams) -> Lattice {
    let mut next = lattice.clone();
    let mut scratch = ExcitationMap::default();
    lattice.step_into(rule, &mut next, &mut scratch);
    next
}
