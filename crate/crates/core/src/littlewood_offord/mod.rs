//! Anti-concentration toolkit: small-ball probabilities, compressibility,
//! spread sets, least common denominators and generalized arithmetic
//! progressions.

mod compress;
mod gap;
mod lcd;
mod small_ball;

pub use compress::{classify, sparse_distance, spread_set, CompressParams, Compressibility};
pub use gap::{gap_points, gap_vector, Gap, VOLUME_CAP};
pub use lcd::{
    lattice_distance, lcd, lcd_2d, regularized_lcd, Lcd2dResult, LcdParams, LcdResult,
    RegularizedLcd, BISECTION_TOL, STRICT_TOL,
};
pub use small_ball::{
    erdos_check, segmental_small_ball, small_ball, small_ball_auto, small_ball_exact,
    SegmentalEstimate, SmallBallEstimate, SmallBallMethod, SubsetStrategy, EXACT_LIMIT,
    EXHAUSTIVE_SUBSET_LIMIT,
};
