//! The per-step loop of the floater.
//!
//! Every step runs, in this order:
//!
//! 1. stimulate the dark-facing edge of the current lattice;
//! 2. advance the automaton one generation;
//! 3. compute the integral force of the new generation;
//! 4. integrate the pose and clamp it into the arena.
//!
//! Randomness comes only from a ChaCha8 stream seeded with `SimConfig::seed`
//! (`seed_from_u64`), consumed solely by the stimulus. The whole state
//! sequence is therefore a pure function of the configuration.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::ca::{CellState, ExcitationMap, Lattice, RuleParams};
use crate::config::SimConfig;
use crate::error::Result;
use crate::kinetics::{integrate_pose, ForceTable, IntegralForce, MotionGains, Pose, Vec2};
use crate::stimulus::{stimulate, LightSource, StimulusConfig};

/// One logged step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub step: u64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub fx: f64,
    pub fy: f64,
    pub torque: f64,
    pub excited: usize,
    pub refractory: usize,
    pub dist: f64,
}

impl TrajectoryRecord {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// A running floater: lattice, pose, light and random stream.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    rule: RuleParams,
    gains: MotionGains,
    stimulus: StimulusConfig,
    light: LightSource,
    lattice: Lattice,
    next: Lattice,
    census: ExcitationMap,
    table: ForceTable,
    pose: Pose,
    force: IntegralForce,
    step: u64,
    rng: ChaCha8Rng,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let mut lattice = Lattice::new(config.width, config.height)?;
        if config.seed_cell {
            lattice.set(config.width / 2, config.height / 2, CellState::Excited)?;
        }
        let census = ExcitationMap::new(&lattice);
        let table = ForceTable::new();
        let force = table.integral(&census, config.width, config.height);
        Ok(Self {
            rule: config.rule,
            gains: config.gains()?,
            stimulus: config.stimulus()?,
            light: config.light()?,
            next: lattice.clone(),
            lattice,
            census,
            table,
            pose: config.initial_pose(),
            force,
            step: 0,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
        })
    }

    /// Runs one full iteration of the loop and returns the force applied.
    pub fn step(&mut self) -> IntegralForce {
        stimulate(
            &mut self.lattice,
            &self.pose,
            &self.light,
            &self.stimulus,
            &mut self.rng,
        );
        self.lattice
            .step_into(&self.rule, &mut self.next, &mut self.census);
        std::mem::swap(&mut self.lattice, &mut self.next);
        self.census.rebuild(&self.lattice);
        self.force = self
            .table
            .integral(&self.census, self.lattice.width(), self.lattice.height());
        let mut pose = integrate_pose(self.pose, &self.force, &self.gains);
        let a = self.config.arena_halfwidth;
        pose.position.x = pose.position.x.clamp(-a, a);
        pose.position.y = pose.position.y.clamp(-a, a);
        self.pose = pose;
        self.step += 1;
        self.force
    }

    pub fn record(&self) -> TrajectoryRecord {
        let (mut excited, mut refractory) = (0, 0);
        for s in self.lattice.states() {
            match s {
                CellState::Excited => excited += 1,
                CellState::Refractory => refractory += 1,
                CellState::Resting => {}
            }
        }
        TrajectoryRecord {
            step: self.step,
            x: self.pose.position.x,
            y: self.pose.position.y,
            heading: self.pose.heading,
            fx: self.force.force.x,
            fy: self.force.force.y,
            torque: self.force.torque,
            excited,
            refractory,
            dist: self.pose.position.distance(self.light.position),
        }
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn light(&self) -> &LightSource {
        &self.light
    }

    pub fn rule(&self) -> RuleParams {
        self.rule
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn last_force(&self) -> IntegralForce {
        self.force
    }

    /// Moves the light; takes effect from the next stimulus.
    pub fn set_light(&mut self, position: Vec2) -> Result<()> {
        self.light = LightSource::new(position, self.light.radius)?;
        Ok(())
    }

    pub fn set_rule(&mut self, rule: RuleParams) {
        self.rule = rule;
        self.config.rule = rule;
    }

    /// Restarts from the initial state with a new seed, keeping the current
    /// rule and light.
    pub fn reset(&mut self, seed: u64) -> Result<()> {
        let mut config = self.config.clone();
        config.seed = seed;
        config.light_x = self.light.position.x;
        config.light_y = self.light.position.y;
        *self = Simulation::new(config)?;
        Ok(())
    }
}

/// Runs `cfg.steps` iterations, calling `observe` after construction and
/// after every step.
pub fn run_with<F>(cfg: &SimConfig, mut observe: F) -> Result<Vec<TrajectoryRecord>>
where
    F: FnMut(&Simulation),
{
    let mut sim = Simulation::new(cfg.clone())?;
    let mut records = Vec::with_capacity((cfg.steps / cfg.record_every + 2) as usize);
    records.push(sim.record());
    observe(&sim);
    for _ in 0..cfg.steps {
        sim.step();
        let s = sim.step_count();
        if s % cfg.record_every == 0 || s == cfg.steps {
            records.push(sim.record());
        }
        observe(&sim);
    }
    Ok(records)
}

/// Records step 0, every `record_every`-th step and the final step.
pub fn run_simulation(cfg: &SimConfig) -> Result<Vec<TrajectoryRecord>> {
    run_with(cfg, |_| {})
}
