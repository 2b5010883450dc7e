//! Mobile excitable lattice ("floater") driven by its own excitation.
//!
//! A three-state retained-excitation automaton runs on a rigid rectangular
//! lattice. Edge cells facing away from a light source are stochastically
//! excited; the excitation pattern yields a net force and torque that move
//! the lattice, which as a result drifts toward and circles the light.

pub mod ca;
pub mod config;
pub mod engine;
pub mod error;
pub mod kinetics;
pub mod metrics;
pub mod presets;
pub mod render;
pub mod steering;
pub mod stimulus;
pub mod trajectory;

pub use ca::{count_excited_neighbors, next_cell_state, parse_rule, step_lattice, CellState, Lattice, RuleParams};
pub use config::SimConfig;
pub use engine::{run_simulation, run_with, Simulation, TrajectoryRecord};
pub use error::{Error, Result};
pub use kinetics::{integral_force, integrate_pose, local_force, IntegralForce, MotionGains, Pose, Vec2};
pub use metrics::{compute_metrics, SweepSummary, TrajectoryMetrics};
pub use presets::Preset;
pub use render::{render_snapshot, Image, WorldRect};
pub use stimulus::{apply_light_stimulus, eligible_boundary_cells, world_position_of_cell, LightSource, StimulusConfig};
pub use trajectory::{read_trajectory_csv, write_trajectory_csv};
