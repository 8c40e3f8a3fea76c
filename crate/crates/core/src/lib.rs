//! Numerical and exact-symbolic toolkit for coadjoint orbits of the Virasoro
//! group and its super and extended relatives.

pub mod agd;
pub mod density;
pub mod diffeo;
pub mod diffop;
pub mod error;
pub mod extalg;
pub mod grid;
pub mod settings;
pub mod sturm;
pub mod superalg;
pub mod trig;
pub mod verify;
pub mod virasoro;

pub use error::{Error, Result};
pub use settings::Settings;
pub use trig::{Parity, TrigPoly};
