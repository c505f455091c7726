pub mod error;
pub mod gge;
pub mod io;
pub mod linalg;
pub mod passivity;
pub mod probe;
pub mod sampling;
pub mod state;
pub mod storage;
pub mod symmetry;

pub use error::{Error, Result};
