//! One module per experiment command.

pub mod decay;
pub mod goodbox;
pub mod ids;
pub mod lie;
pub mod lyapunov;
pub mod probes;
pub mod wegner;
pub mod window;
