//! Line-delimited JSON messages exchanged with steering clients.
//!
//! Every message is one UTF-8 JSON object terminated by `\n`. Clients send
//! commands distinguished by a `cmd` field:
//!
//! ```text
//! {"cmd":"set_light","x":1.5,"y":-2}
//! {"cmd":"pause"}
//! {"cmd":"resume"}
//! {"cmd":"reset","seed":7}
//! {"cmd":"set_rule","code":"2246"}
//! {"cmd":"set_speed","steps_per_second":250}
//! ```
//!
//! The server sends `{"type":"state",...}` frames and
//! `{"type":"error","message":...}` replies. The frame grid is the row-major
//! state digits run-length encoded as comma-separated `<count>x<digit>`
//! tokens, e.g. `"9x0"` for an all-Resting 3×3 lattice. Unknown fields in
//! a command are ignored.

use serde::{Deserialize, Serialize};

use crate::ca::{parse_rule, CellState, Lattice, RuleParams};
use crate::engine::Simulation;
use crate::error::{Error, Result};

pub const MIN_STEPS_PER_SECOND: u32 = 1;
pub const MAX_STEPS_PER_SECOND: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case")]
pub enum ClientCommand {
    SetLight { x: f64, y: f64 },
    Pause,
    Resume,
    Reset { seed: u64 },
    SetRule { code: String },
    SetSpeed { steps_per_second: u32 },
}

impl ClientCommand {
    fn validate(&self) -> Result<()> {
        match self {
            ClientCommand::SetLight { x, y } if !(x.is_finite() && y.is_finite()) => {
                Err(Error::Protocol("set_light coordinates must be finite".into()))
            }
            ClientCommand::SetRule { code } => parse_rule(code).map(|_| ()),
            ClientCommand::SetSpeed { steps_per_second }
                if !(MIN_STEPS_PER_SECOND..=MAX_STEPS_PER_SECOND).contains(steps_per_second) =>
            {
                Err(Error::Protocol(format!(
                    "steps_per_second {steps_per_second} outside {MIN_STEPS_PER_SECOND}..={MAX_STEPS_PER_SECOND}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// The validated rule of a `SetRule` command.
    pub fn rule(&self) -> Option<RuleParams> {
        match self {
            ClientCommand::SetRule { code } => parse_rule(code).ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseMsg {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMsg {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFrame {
    pub step: u64,
    pub pose: PoseMsg,
    pub light: PointMsg,
    pub excited_count: usize,
    pub width: usize,
    pub height: usize,
    pub grid: String,
    pub dist_to_light: f64,
    pub rule: String,
    pub paused: bool,
}

impl StateFrame {
    pub fn capture(sim: &Simulation, paused: bool) -> Self {
        let pose = sim.pose();
        let light = sim.light().position;
        let lattice = sim.lattice();
        Self {
            step: sim.step_count(),
            pose: PoseMsg {
                x: pose.position.x,
                y: pose.position.y,
                heading: pose.heading,
            },
            light: PointMsg { x: light.x, y: light.y },
            excited_count: lattice.count(CellState::Excited),
            width: lattice.width(),
            height: lattice.height(),
            grid: rle_encode(lattice.states()),
            dist_to_light: pose.position.distance(light),
            rule: sim.rule().code(),
            paused,
        }
    }

    /// Decodes the grid into a lattice.
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::from_states(self.width, self.height, rle_decode(&self.grid, self.width * self.height)?)
    }
}

/// Any message the server writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    State(StateFrame),
    Error { message: String },
}

pub fn rle_encode(states: &[CellState]) -> String {
    let mut out = String::new();
    let mut iter = states.iter().peekable();
    while let Some(&s) = iter.next() {
        let mut run = 1usize;
        while iter.peek() == Some(&&s) {
            iter.next();
            run += 1;
        }
        if !out.is_empty() {
            out.push(',');
        }
        out.push_str(&run.to_string());
        out.push('x');
        out.push(s.digit());
    }
    out
}

/// Decodes an RLE grid that must expand to exactly `expected` cells.
pub fn rle_decode(grid: &str, expected: usize) -> Result<Vec<CellState>> {
    let mut states = Vec::with_capacity(expected);
    if !grid.is_empty() {
        for token in grid.split(',') {
            let (count, digit) = token
                .split_once('x')
                .ok_or_else(|| Error::Protocol(format!("bad grid token {token:?}")))?;
            let count: usize = count
                .parse()
                .map_err(|_| Error::Protocol(format!("bad run length in {token:?}")))?;
            let mut chars = digit.chars();
            let state = match (chars.next().and_then(CellState::from_digit), chars.next()) {
                (Some(s), None) => s,
                _ => return Err(Error::Protocol(format!("bad state digit in {token:?}"))),
            };
            if count == 0 || states.len() + count > expected {
                return Err(Error::Protocol(format!("grid run {token:?} overflows {expected} cells")));
            }
            states.resize(states.len() + count, state);
        }
    }
    if states.len() != expected {
        return Err(Error::Protocol(format!(
            "grid decodes to {} cells, expected {expected}",
            states.len()
        )));
    }
    Ok(states)
}

fn to_line<T: Serialize>(msg: &T) -> String {
    let mut line = serde_json::to_string(msg).expect("messages serialise");
    line.push('\n');
    line
}

/// One LF-terminated JSON line carrying a state frame.
pub fn encode_frame(frame: &StateFrame) -> String {
    to_line(&ServerMessage::State(frame.clone()))
}

pub fn encode_error(message: &str) -> String {
    to_line(&ServerMessage::Error {
        message: message.to_owned(),
    })
}

pub fn encode_command(cmd: &ClientCommand) -> String {
    to_line(cmd)
}

pub fn decode_command(bytes: &[u8]) -> Result<ClientCommand> {
    let cmd: ClientCommand =
        serde_json::from_slice(trim_line(bytes)).map_err(|e| Error::Protocol(e.to_string()))?;
    cmd.validate()?;
    Ok(cmd)
}

pub fn decode_server_message(bytes: &[u8]) -> Result<ServerMessage> {
    serde_json::from_slice(trim_line(bytes)).map_err(|e| Error::Protocol(e.to_string()))
}

fn trim_line(bytes: &[u8]) -> &[u8] {
    let mut end = bytes.len();
    while end > 0 && matches!(bytes[end - 1], b'\n' | b'\r') {
        end -= 1;
    }
    &bytes[..end]
}
