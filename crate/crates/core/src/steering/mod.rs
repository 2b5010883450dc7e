//! Interactive steering: a running simulation served over TCP so an operator
//! can move the light and watch the floater follow.

pub mod protocol;
pub mod server;

pub use protocol::{decode_command, encode_frame, ClientCommand, StateFrame};
pub use server::{serve, serve_on, ServeOptions, SteeringServer};
