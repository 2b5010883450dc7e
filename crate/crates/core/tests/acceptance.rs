//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs with `cargo test -p floater-core --test acceptance` and exits non-zero
//! if any primary criterion fails. The trajectory criteria take several
//! minutes on a single core.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use floater_core::metrics::{count_cycles, metrics_from_distances, DEFAULT_TRANSIENT_FRACTION};
use floater_core::steering::protocol::{decode_server_message, encode_command, ServerMessage};
use floater_core::steering::{serve_on, ClientCommand, ServeOptions, StateFrame};
use floater_core::trajectory::write_csv;
use floater_core::{
    apply_light_stimulus, compute_metrics, eligible_boundary_cells, integral_force, run_simulation, step_lattice,
    CellState, IntegralForce, Lattice, LightSource, Pose, Preset, RuleParams, SimConfig, Simulation, StimulusConfig,
    TrajectoryMetrics, Vec2,
};

const SEEDS: u64 = 10;

/// Golden fixtures, produced once by the brute-force references below and
/// frozen here.
const GOLDEN_EAST_COLUMN_FORCE: (f64, f64, f64) = (-4.121320343559642, 0.0, 0.0);
const GOLDEN_ELIGIBLE_3X3: [(usize, usize); 5] = [(0, 0), (1, 0), (0, 1), (0, 2), (1, 2)];
const GOLDEN_HYSTERESIS_CYCLES: usize = 2;

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn line(&mut self, tier: &str, name: &str, pass: bool, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} [{tier}] {name}: {detail}");
        std::io::stdout().flush().ok();
        if !pass && tier == "primary" {
            self.failed.push(name.to_owned());
        }
    }
}

// ---------------------------------------------------------------------------
// Brute-force references

fn reference_step(l: &Lattice, rule: &RuleParams) -> Vec<CellState> {
    let (w, h) = (l.width() as i64, l.height() as i64);
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let mut sigma = 0u8;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if (dx, dy) != (0, 0)
                        && (0..w).contains(&nx)
                        && (0..h).contains(&ny)
                        && l.at(nx as usize, ny as usize) == CellState::Excited
                    {
                        sigma += 1;
                    }
                }
            }
            out.push(match l.at(x as usize, y as usize) {
                CellState::Resting if (rule.theta1..=rule.theta2).contains(&sigma) => CellState::Excited,
                CellState::Excited if (rule.delta1..=rule.delta2).contains(&sigma) => CellState::Excited,
                CellState::Excited => CellState::Refractory,
                CellState::Resting | CellState::Refractory => CellState::Resting,
            });
        }
    }
    out
}

fn reference_force(l: &Lattice) -> IntegralForce {
    let (w, h) = (l.width() as i64, l.height() as i64);
    let (cx, cy) = ((w - 1) as f64 / 2.0, (h - 1) as f64 / 2.0);
    let (mut fx, mut fy, mut torque) = (0.0, 0.0, 0.0);
    for y in 0..h {
        for x in 0..w {
            let (mut sx, mut sy, mut n) = (0.0, 0.0, 0);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if (dx, dy) != (0, 0)
                        && (0..w).contains(&nx)
                        && (0..h).contains(&ny)
                        && l.at(nx as usize, ny as usize) == CellState::Excited
                    {
                        let len = ((dx * dx + dy * dy) as f64).sqrt();
                        sx += dx as f64 / len;
                        sy += dy as f64 / len;
                        n += 1;
                    }
                }
            }
            if n > 0 {
                let (lx, ly) = (-sx / n as f64, -sy / n as f64);
                fx += lx;
                fy += ly;
                torque += (x as f64 - cx) * ly - (y as f64 - cy) * lx;
            }
        }
    }
    IntegralForce {
        force: Vec2::new(fx, fy),
        torque,
    }
}

fn reference_eligible(pose: &Pose, w: usize, h: usize, light: Vec2) -> Vec<(usize, usize)> {
    let centre = pose.position.distance(light);
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x != 0 && y != 0 && x != w - 1 && y != h - 1 {
                continue;
            }
            let body = Vec2::new(x as f64 - (w - 1) as f64 / 2.0, y as f64 - (h - 1) as f64 / 2.0);
            if (pose.position + body.rotated(pose.heading)).distance(light) > centre {
                out.push((x, y));
            }
        }
    }
    out
}

fn random_lattice(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Lattice {
    let states = (0..w * h)
        .map(|_| match rng.next_u32() % 3 {
            0 => CellState::Resting,
            1 => CellState::Excited,
            _ => CellState::Refractory,
        })
        .collect();
    Lattice::from_states(w, h, states).unwrap()
}

fn lattice_with(w: usize, h: usize, excited: impl IntoIterator<Item = (usize, usize)>) -> Lattice {
    let mut l = Lattice::new(w, h).unwrap();
    for (x, y) in excited {
        l.set(x, y, CellState::Excited).unwrap();
    }
    l
}

// ---------------------------------------------------------------------------
// Criteria

fn ca_oracle(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = Instant::now();
    let mut mismatches = 0;
    for _ in 0..1000 {
        let l = random_lattice(&mut rng, 20, 20);
        let d = |r: &mut ChaCha8Rng| (r.next_u32() % 10) as u8;
        let rule = RuleParams::new(d(&mut rng), d(&mut rng), d(&mut rng), d(&mut rng)).unwrap();
        if step_lattice(&l, &rule).states() != &reference_step(&l, &rule)[..] {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report.line(
        "primary",
        "CA matches reference",
        mismatches == 0 && secs < 5.0,
        format!("1000 random 20x20 lattices/rules, {mismatches} mismatches, {secs:.2}s (< 5s)"),
    );
}

fn csv_bytes(cfg: &SimConfig) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&run_simulation(cfg).unwrap(), &mut buf).unwrap();
    buf
}

fn determinism(report: &mut Report) {
    let mut cfg = Preset::Fig5.config();
    cfg.seed = 42;
    let (a, b) = rayon::join(|| csv_bytes(&cfg), || csv_bytes(&cfg));
    report.line(
        "primary",
        "determinism",
        a == b,
        format!("fig5 seed 42, two runs, {} CSV bytes, identical = {}", a.len(), a == b),
    );
}

fn symmetry(report: &mut Report) {
    let mut uniform_ok = true;
    for (w, h) in [(1, 1), (5, 5), (20, 20), (7, 13), (200, 200)] {
        let f = integral_force(&Lattice::from_states(w, h, vec![CellState::Excited; w * h]).unwrap());
        uniform_ok &= f.force.x == 0.0 && f.force.y == 0.0 && f.torque == 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let (w, h) = (1 + (i % 30), 1 + ((i * 7) % 30));
        let l = random_lattice(&mut rng, w, h);
        let mut m = Lattice::new(w, h).unwrap();
        for y in 0..h {
            for x in 0..w {
                m.set(w - 1 - x, y, l.at(x, y)).unwrap();
            }
        }
        let (a, b) = (integral_force(&l), integral_force(&m));
        worst = worst
            .max((a.force.x + b.force.x).abs())
            .max((a.force.y - b.force.y).abs())
            .max((a.torque + b.torque).abs());
    }
    report.line(
        "primary",
        "symmetry",
        uniform_ok && worst < 1e-9,
        format!("uniform excitation exactly force/torque-free = {uniform_ok}; mirror max |delta| = {worst:e} (< 1e-9) over 1000 lattices"),
    );
}

fn sweep(cfg: &SimConfig) -> Vec<TrajectoryMetrics> {
    (0..SEEDS)
        .into_par_iter()
        .map(|seed| {
            let mut cfg = cfg.clone();
            cfg.seed = seed;
            let records = run_simulation(&cfg).unwrap();
            compute_metrics(&records, Vec2::new(cfg.light_x, cfg.light_y), DEFAULT_TRANSIENT_FRACTION).unwrap()
        })
        .collect()
}

fn describe(runs: &[TrajectoryMetrics]) -> String {
    runs.iter()
        .map(|m| {
            format!(
                "min {:.0}/med {:.0}/cyc {}{}",
                m.min_dist,
                m.median_dist,
                m.approach_retreat_cycles,
                if m.escaped { "/esc" } else { "" }
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn median(values: &[f64]) -> f64 {
    floater_core::metrics::median(values)
}

fn medmed(runs: &[TrajectoryMetrics]) -> f64 {
    median(&runs.iter().map(|m| m.median_dist).collect::<Vec<_>>())
}

fn spread(m: &TrajectoryMetrics) -> f64 {
    m.max_dist / m.min_dist
}

fn circles_light(report: &mut Report, name: &str, runs: &[TrajectoryMetrics]) {
    let good = runs.iter().filter(|m| m.circles_light()).count();
    report.line(
        "primary",
        name,
        good >= 8,
        format!("{good}/{SEEDS} seeds approach < 0.25 D0, stay, cycle >= 2 (need 8): {}", describe(runs)),
    );
}

fn stimulus_frequency(report: &mut Report) {
    // 20 x 20 lattice, light due east: 58 eligible perimeter cells per trial.
    let pose = Pose::default();
    let light = LightSource::new(Vec2::new(1000.0, 0.0), 1.0).unwrap();
    let cfg = StimulusConfig::new(0.15).unwrap();
    let resting = Lattice::new(20, 20).unwrap();
    let eligible = eligible_boundary_cells(&pose, 20, 20, &light);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut draws, mut fired) = (0usize, 0usize);
    while draws < 100_000 {
        let l = apply_light_stimulus(&resting, &pose, &light, &cfg, &mut rng);
        fired += l.count(CellState::Excited);
        draws += eligible.len();
    }
    let freq = fired as f64 / draws as f64;
    report.line(
        "primary",
        "stimulus frequency",
        (freq - 0.15).abs() <= 0.005,
        format!("{fired}/{draws} = {freq:.5} (0.15 +- 0.005)"),
    );
}

fn goldens(report: &mut Report) {
    let east = lattice_with(5, 5, (0..5).map(|y| (4, y)));
    let oracle = reference_force(&east);
    let got = integral_force(&east);
    let (gx, gy, gt) = GOLDEN_EAST_COLUMN_FORCE;
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    let force_ok = close(oracle.force.x, gx)
        && close(oracle.force.y, gy)
        && close(oracle.torque, gt)
        && close(got.force.x, gx)
        && close(got.force.y, gy)
        && close(got.torque, gt)
        && got.force.x < 0.0;

    let light = Vec2::new(1000.0, 0.0);
    let eligible = eligible_boundary_cells(&Pose::default(), 3, 3, &LightSource::new(light, 1.0).unwrap());
    let reference = reference_eligible(&Pose::default(), 3, 3, light);
    let mut sorted = eligible.clone();
    sorted.sort_by_key(|&(x, y)| (y, x));
    let eligible_ok = eligible == GOLDEN_ELIGIBLE_3X3 && reference == GOLDEN_ELIGIBLE_3X3 && sorted == eligible;

    let d0 = 300.0;
    let series: Vec<f64> = [1.0, 0.2, 0.6, 0.2, 0.6].iter().map(|f| f * d0).collect();
    let cycles = count_cycles(&series, 0.25 * d0, 0.5 * d0);
    let cycles_ok = cycles == GOLDEN_HYSTERESIS_CYCLES
        && metrics_from_distances(&series, DEFAULT_TRANSIENT_FRACTION).unwrap().approach_retreat_cycles == cycles;

    report.line(
        "primary",
        "golden values",
        force_ok && eligible_ok && cycles_ok,
        format!(
            "east column force ({:.15}, {}, {}) ok = {force_ok}; 3x3 eligible {eligible:?} ok = {eligible_ok}; cycles {cycles} ok = {cycles_ok}",
            got.force.x, got.force.y, got.torque
        ),
    );
}

fn compactness(report: &mut Report, compact: &[TrajectoryMetrics], loose: &[TrajectoryMetrics]) {
    let (a, b) = (medmed(compact), medmed(loose));
    report.line(
        "primary",
        "compactness 1899 vs 1299 (fig6a/fig6b)",
        a <= 0.9 * b,
        format!("median of medians {a:.1} vs {b:.1} (need <= 90%); 1899: {}; 1299: {}", describe(compact), describe(loose)),
    );
}

fn fig6f_spread(report: &mut Report, r2246: &[TrajectoryMetrics], r1899: &[TrajectoryMetrics]) {
    let wins = r2246.iter().zip(r1899).filter(|(a, b)| spread(a) > spread(b)).count();
    let fmt = |runs: &[TrajectoryMetrics]| runs.iter().map(|m| format!("{:.1}", spread(m))).collect::<Vec<_>>().join(" ");
    report.line(
        "primary",
        "spread 2246 vs 1899 (fig6f/fig6a)",
        wins >= 7,
        format!("2246 max/min spread larger in {wins}/{SEEDS} paired seeds (need 7); 2246 [{}] 1899 [{}]", fmt(r2246), fmt(r1899)),
    );
}

// ---------------------------------------------------------------------------
// Secondary: steering over the wire

fn read_frame(reader: &mut BufReader<TcpStream>) -> StateFrame {
    loop {
        let mut line = String::new();
        assert!(reader.read_line(&mut line).unwrap() > 0, "server hung up");
        if let ServerMessage::State(f) = decode_server_message(line.as_bytes()).unwrap() {
            return f;
        }
    }
}

fn northward_velocity(seed: u64) -> f64 {
    let mut cfg = Preset::Fig5.config();
    cfg.seed = seed;
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let opts = ServeOptions {
        frame_interval: Duration::from_millis(20),
        steps_per_second: 1000,
    };
    let server = serve_on(Simulation::new(cfg).unwrap(), listener, opts).unwrap();
    let stream = TcpStream::connect(server.local_addr()).unwrap();
    stream.set_read_timeout(Some(Duration::from_secs(30))).unwrap();
    let mut writer = stream.try_clone().unwrap();
    let mut reader = BufReader::new(stream);
    let mut send = |cmd: ClientCommand| writer.write_all(encode_command(&cmd).as_bytes()).unwrap();

    // Let the floater get going, then freeze it and put the light due north.
    while read_frame(&mut reader).step < 200 {}
    send(ClientCommand::Pause);
    let start = loop {
        let f = read_frame(&mut reader);
        if f.paused {
            break f;
        }
    };
    send(ClientCommand::SetLight {
        x: start.pose.x,
        y: start.pose.y + 3.0 * start.width as f64,
    });
    send(ClientCommand::Resume);
    let end = loop {
        let f = read_frame(&mut reader);
        if f.step >= start.step + 500 {
            break f;
        }
    };
    server.shutdown();
    (end.pose.y - start.pose.y) / (end.step - start.step) as f64
}

fn steering(report: &mut Report) {
    let v: Vec<f64> = (0..5).map(northward_velocity).collect();
    let good = v.iter().filter(|&&v| v > 0.0).count();
    report.line(
        "secondary",
        "steering efficacy",
        good >= 4,
        format!("mean northward velocity positive in {good}/5 seeds (need 4): {v:.3?}"),
    );
}

fn main() -> ExitCode {
    let mut report = Report { failed: Vec::new() };
    ca_oracle(&mut report);
    symmetry(&mut report);
    stimulus_frequency(&mut report);
    goldens(&mut report);
    determinism(&mut report);

    let fig5 = sweep(&Preset::Fig5.config());
    circles_light(&mut report, "circles the light (fig5, 200x200)", &fig5);
    let mut fast = SimConfig::square(100, Preset::Fig5.rule());
    fast.seed = 0;
    circles_light(&mut report, "circles the light (fig5 rule, 100x100)", &sweep(&fast));

    let r1899 = sweep(&Preset::Fig6a.config());
    let r1299 = sweep(&Preset::Fig6b.config());
    compactness(&mut report, &r1899, &r1299);
    let r2246 = sweep(&Preset::Fig6f.config());
    fig6f_spread(&mut report, &r2246, &r1899);

    steering(&mut report);

    if report.failed.is_empty() {
        println!("acceptance: all primary criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} primary criteria fail: {}", report.failed.len(), report.failed.join(", "));
        ExitCode::FAILURE
    }
}
