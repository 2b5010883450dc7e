//! TCP steering server.
//!
//! One thread owns the [`Simulation`]. Connection threads only exchange
//! messages with it: decoded commands flow in over a channel, encoded frames
//! flow out over a per-client channel. Commands are applied in arrival order
//! between simulation steps.

use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use crate::engine::Simulation;
use crate::error::Result;
use crate::kinetics::Vec2;
use crate::steering::protocol::{decode_command, encode_error, encode_frame, ClientCommand, StateFrame};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServeOptions {
    pub frame_interval: Duration,
    pub steps_per_second: u32,
}

impl Default for ServeOptions {
    fn default() -> Self {
        Self {
            frame_interval: Duration::from_millis(100),
            steps_per_second: 100,
        }
    }
}

type ClientId = u64;

enum Event {
    Connected(ClientId, Sender<String>),
    Command(ClientId, ClientCommand),
    Disconnected(ClientId),
}

/// Handle to a running server; dropping it stops the server.
pub struct SteeringServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    threads: Vec<JoinHandle<()>>,
}

impl SteeringServer {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Blocks until the server stops (it only stops via [`Self::shutdown`]).
    pub fn wait(mut self) {
        for t in self.threads.drain(..) {
            let _ = t.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop_threads();
    }

    fn stop_threads(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        for t in self.threads.drain(..) {
            let _ = t.join();
        }
    }
}

impl Drop for SteeringServer {
    fn drop(&mut self) {
        self.stop_threads();
    }
}

/// Binds `addr` and serves `sim` on it.
pub fn serve(sim: Simulation, addr: &str, opts: ServeOptions) -> Result<SteeringServer> {
    let listener = TcpListener::bind(addr)?;
    serve_on(sim, listener, opts)
}

pub fn serve_on(sim: Simulation, listener: TcpListener, opts: ServeOptions) -> Result<SteeringServer> {
    let addr = listener.local_addr()?;
    listener.set_nonblocking(true)?;
    let stop = Arc::new(AtomicBool::new(false));
    let (events_tx, events_rx) = mpsc::channel();

    let accept_stop = Arc::clone(&stop);
    let acceptor = thread::Builder::new()
        .name("steering-accept".into())
        .spawn(move || accept_loop(listener, events_tx, accept_stop))?;

    let sim_stop = Arc::clone(&stop);
    let runner = thread::Builder::new()
        .name("steering-sim".into())
        .spawn(move || SimLoop::new(sim, opts).run(events_rx, sim_stop))?;

    Ok(SteeringServer {
        addr,
        stop,
        threads: vec![acceptor, runner],
    })
}

fn accept_loop(listener: TcpListener, events: Sender<Event>, stop: Arc<AtomicBool>) {
    let mut next_id: ClientId = 0;
    while !stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, _)) => {
                let id = next_id;
                next_id += 1;
                if let Err(e) = spawn_client(id, stream, events.clone(), Arc::clone(&stop)) {
                    eprintln!("steering: client {id} setup failed: {e}");
                }
            }
            Err(e) if e.kind() == io::ErrorKind::WouldBlock => thread::sleep(Duration::from_millis(10)),
            Err(e) => {
                eprintln!("steering: accept failed: {e}");
                thread::sleep(Duration::from_millis(50));
            }
        }
    }
}

fn spawn_client(id: ClientId, stream: TcpStream, events: Sender<Event>, stop: Arc<AtomicBool>) -> io::Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(Duration::from_millis(200)))?;
    let mut writer = stream.try_clone()?;
    let (out_tx, out_rx) = mpsc::channel::<String>();

    thread::Builder::new()
        .name(format!("steering-write-{id}"))
        .spawn(move || {
            for line in out_rx {
                if writer.write_all(line.as_bytes()).is_err() {
                    break;
                }
            }
            let _ = writer.shutdown(std::net::Shutdown::Both);
        })?;

    if events.send(Event::Connected(id, out_tx.clone())).is_err() {
        return Ok(());
    }

    thread::Builder::new()
        .name(format!("steering-read-{id}"))
        .spawn(move || {
            let mut reader = BufReader::new(stream);
            let mut line = Vec::new();
            while !stop.load(Ordering::SeqCst) {
                match reader.read_until(b'\n', &mut line) {
                    Ok(0) => break,
                    Ok(_) if line.ends_with(b"\n") => {
                        if line.iter().any(|b| !b.is_ascii_whitespace()) {
                            match decode_command(&line) {
                                Ok(cmd) => {
                                    if events.send(Event::Command(id, cmd)).is_err() {
                                        break;
                                    }
                                }
                                Err(e) => {
                                    let _ = out_tx.send(encode_error(&e.to_string()));
                                }
                            }
                        }
                        line.clear();
                    }
                    // Partial line at EOF.
                    Ok(_) => break,
                    Err(e) if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {}
                    Err(_) => break,
                }
            }
            let _ = events.send(Event::Disconnected(id));
        })?;
    Ok(())
}

struct SimLoop {
    sim: Simulation,
    opts: ServeOptions,
    paused: bool,
    clients: BTreeMap<ClientId, Sender<String>>,
}

impl SimLoop {
    fn new(sim: Simulation, opts: ServeOptions) -> Self {
        Self {
            sim,
            opts,
            paused: false,
            clients: BTreeMap::new(),
        }
    }

    fn run(mut self, events: Receiver<Event>, stop: Arc<AtomicBool>) {
        let tick = Duration::from_millis(2);
        let mut last = Instant::now();
        let mut budget = 0.0f64;
        let mut next_frame = Instant::now();
        while !stop.load(Ordering::SeqCst) {
            while let Ok(event) = events.try_recv() {
                self.handle(event);
            }
            let now = Instant::now();
            let elapsed = now.duration_since(last).as_secs_f64();
            last = now;
            if !self.paused {
                let rate = self.opts.steps_per_second as f64;
                // Never queue more than a quarter second of backlog.
                budget = (budget + elapsed * rate).min(rate * 0.25 + 1.0);
                while budget >= 1.0 {
                    self.sim.step();
                    budget -= 1.0;
                }
            } else {
                budget = 0.0;
            }
            if now >= next_frame {
                self.broadcast();
                next_frame = now + self.opts.frame_interval;
            }
            thread::sleep(tick);
        }
    }

    fn handle(&mut self, event: Event) {
        match event {
            Event::Connected(id, tx) => {
                let frame = encode_frame(&StateFrame::capture(&self.sim, self.paused));
                if tx.send(frame).is_ok() {
                    self.clients.insert(id, tx);
                }
            }
            Event::Disconnected(id) => {
                self.clients.remove(&id);
            }
            Event::Command(id, cmd) => {
                if let Err(e) = self.apply(cmd) {
                    if let Some(tx) = self.clients.get(&id) {
                        let _ = tx.send(encode_error(&e.to_string()));
                    }
                }
            }
        }
    }

    fn apply(&mut self, cmd: ClientCommand) -> Result<()> {
        match cmd {
            ClientCommand::SetLight { x, y } => self.sim.set_light(Vec2::new(x, y))?,
            ClientCommand::Pause => self.paused = true,
            ClientCommand::Resume => self.paused = false,
            ClientCommand::Reset { seed } => self.sim.reset(seed)?,
            ClientCommand::SetRule { .. } => {
                if let Some(rule) = cmd.rule() {
                    self.sim.set_rule(rule);
                }
            }
            ClientCommand::SetSpeed { steps_per_second } => self.opts.steps_per_second = steps_per_second,
        }
        Ok(())
    }

    fn broadcast(&mut self) {
        if self.clients.is_empty() {
            return;
        }
        let line = encode_frame(&StateFrame::capture(&self.sim, self.paused));
        self.clients.retain(|_, tx| tx.send(line.clone()).is_ok());
    }
}
