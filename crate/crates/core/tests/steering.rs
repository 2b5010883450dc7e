use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::time::{Duration, Instant};

use floater_core::steering::protocol::{decode_server_message, encode_command, ServerMessage};
use floater_core::steering::{serve_on, ClientCommand, ServeOptions, StateFrame};
use floater_core::{parse_rule, SimConfig, Simulation};

struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Client {
    fn connect(addr: std::net::SocketAddr) -> Self {
        let stream = TcpStream::connect(addr).unwrap();
        stream.set_read_timeout(Some(Duration::from_secs(5))).unwrap();
        Self {
            writer: stream.try_clone().unwrap(),
            reader: BufReader::new(stream),
        }
    }

    fn send_raw(&mut self, line: &str) {
        self.writer.write_all(line.as_bytes()).unwrap();
    }

    fn send(&mut self, cmd: &ClientCommand) {
        self.send_raw(&encode_command(cmd));
    }

    fn next(&mut self) -> ServerMessage {
        let mut line = String::new();
        let n = self.reader.read_line(&mut line).unwrap();
        assert!(n > 0, "server closed the connection");
        decode_server_message(line.as_bytes()).unwrap()
    }

    fn next_frame(&mut self) -> StateFrame {
        loop {
            if let ServerMessage::State(f) = self.next() {
                return f;
            }
        }
    }

    /// Skips frames until one satisfies `pred`.
    fn frame_where(&mut self, pred: impl Fn(&StateFrame) -> bool) -> StateFrame {
        let deadline = Instant::now() + Duration::from_secs(10);
        loop {
            let f = self.next_frame();
            if pred(&f) {
                return f;
            }
            assert!(Instant::now() < deadline, "no matching frame");
        }
    }
}

fn start() -> floater_core::steering::SteeringServer {
    let mut cfg = SimConfig::square(20, parse_rule("2201").unwrap());
    cfg.seed = 5;
    let sim = Simulation::new(cfg).unwrap();
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let opts = ServeOptions {
        frame_interval: Duration::from_millis(20),
        steps_per_second: 200,
    };
    serve_on(sim, listener, opts).unwrap()
}

#[test]
fn first_frame_arrives_on_connect() {
    let server = start();
    let mut c = Client::connect(server.local_addr());
    let f = c.next_frame();
    assert_eq!((f.width, f.height), (20, 20));
    assert_eq!(f.rule, "2201");
    assert_eq!(f.lattice().unwrap().width(), 20);
    server.shutdown();
}

#[test]
fn set_light_shows_in_frames() {
    let server = start();
    let mut c = Client::connect(server.local_addr());
    c.next_frame();
    c.send(&ClientCommand::SetLight { x: -7.0, y: 11.5 });
    let f = c.frame_where(|f| f.light.x == -7.0);
    assert_eq!(f.light.y, 11.5);
    let expected = ((f.pose.x + 7.0).powi(2) + (f.pose.y - 11.5).powi(2)).sqrt();
    assert!((f.dist_to_light - expected).abs() < 1e-9);
    server.shutdown();
}

#[test]
fn pause_freezes_step_and_resume_continues() {
    let server = start();
    let mut c = Client::connect(server.local_addr());
    c.next_frame();
    c.send(&ClientCommand::Pause);
    let paused = c.frame_where(|f| f.paused);
    for _ in 0..5 {
        assert_eq!(c.next_frame().step, paused.step);
    }
    c.send(&ClientCommand::Resume);
    c.frame_where(|f| !f.paused && f.step > paused.step);
    server.shutdown();
}

#[test]
fn rule_and_reset_commands() {
    let server = start();
    let mut c = Client::connect(server.local_addr());
    c.next_frame();
    c.send(&ClientCommand::Pause);
    c.send(&ClientCommand::SetRule { code: "1899".into() });
    c.send(&ClientCommand::Reset { seed: 9 });
    let f = c.frame_where(|f| f.rule == "1899" && f.step == 0 && f.paused);
    assert_eq!((f.pose.x, f.pose.y), (0.0, 0.0));
    server.shutdown();
}

#[test]
fn malformed_lines_get_errors_and_keep_the_connection() {
    let server = start();
    let mut c = Client::connect(server.local_addr());
    c.next_frame();
    for bad in [
        "this is not json\n",
        "{\"cmd\":\"warp\"}\n",
        "{\"cmd\":\"set_speed\",\"steps_per_second\":0}\n",
        "{\"cmd\":\"set_rule\",\"code\":\"12a4\"}\n",
    ] {
        c.send_raw(bad);
        let deadline = Instant::now() + Duration::from_secs(10);
        loop {
            match c.next() {
                ServerMessage::Error { message } => {
                    assert!(!message.is_empty());
                    break;
                }
                ServerMessage::State(_) => assert!(Instant::now() < deadline, "no error reply to {bad:?}"),
            }
        }
    }
    c.send(&ClientCommand::SetLight { x: 3.0, y: 4.0 });
    c.frame_where(|f| f.light.x == 3.0 && f.light.y == 4.0);
    server.shutdown();
}

#[test]
fn several_clients_share_one_simulation() {
    let server = start();
    let mut a = Client::connect(server.local_addr());
    let mut b = Client::connect(server.local_addr());
    a.next_frame();
    b.next_frame();
    a.send(&ClientCommand::SetLight { x: 1.0, y: 2.0 });
    b.frame_where(|f| f.light.x == 1.0 && f.light.y == 2.0);
    drop(a);
    b.send(&ClientCommand::Pause);
    b.frame_where(|f| f.paused);
    server.shutdown();
}
