//! Extended-range arithmetic, sample grids and derivative oracles.

pub mod diff;
pub mod ext;
pub mod grid;
pub mod logcomplex;
pub mod roots;
pub mod scalar;
pub mod tower;

pub use diff::{default_step, wirtinger_fd};
pub use ext::ExtReal;
pub use grid::{Grid2D, GridGeometry};
pub use logcomplex::{wrap_angle, LogComplex};
pub use roots::newton_bracketed;
pub use scalar::{lit, Real};
pub use tower::{tower_compare, tower_log, SignedTower, TowerReal};
