pub mod basis;
pub mod entanglement;
pub mod error;
pub mod families;
pub mod homogenizer;
pub mod io;
pub mod linalg;
pub mod models;
pub mod optimality;
pub mod phasor;
pub mod rdm;
pub mod state;
pub mod torus;
pub mod vb;
