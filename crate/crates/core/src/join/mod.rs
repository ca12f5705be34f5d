//! Joining interval charts: gluing realized by bump-function
//! quadrature, joins of two charts, collapse of finite chain-like atlases,
//! and finite-difference `C^k` certification.

mod bump;
mod chain;
mod diffeo;
mod glue;
mod quad;
mod spec;
mod verify;

pub use bump::{bump_plateau, smooth_step, Bump};
pub use chain::{
    collapse_agreement, collapse_chain, join_charts, ChainAtlas, ChartMap, CollapseOrder, Collapsed, IntervalChart,
    Join, JoinStep,
};
pub use diffeo::{NumericDiffeo, GRID_CELLS};
pub use glue::{glue_id_and_diff, glue_search, glue_with_report, Glue, EPS_RETRIES};
pub use quad::{adaptive_simpson, Quadrature, MAX_INTERVALS, SIMPSON_TOL};
pub use spec::{ChartReport, ChartSpec, JoinReport, JoinSpec, MapSpec, StepReport, TransitionSpec};
pub use verify::{
    uniform_tolerances, verify_ck_numeric, verify_ck_numeric_refined, Piece, PiecewiseMap, SeamCheck, SeamedMap,
    SmoothCert, DEFAULT_TOLERANCES, VERIFY_MAX_ORDER,
};
