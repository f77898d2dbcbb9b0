//! Time-ordered evolution operators.
//!
//! Ordering convention everywhere: the factor for the latest time stands leftmost.

pub mod dyson;
pub mod interaction;
pub mod mild;
pub mod propagate;
pub mod trotter;

pub use dyson::{
    dyson_expand, dyson_expand_with, dyson_term, poincare_quotient, DysonResult, PoincareMode, PoincareQuotient,
    RemainderOptions,
};
pub use interaction::{interaction_rep, InteractionRep};
pub use mild::{semilinear_mild, MildSolution};
pub use propagate::{
    ode_defect, propagate, propagate_grid, propagate_richardson, propagate_span, propagate_span_richardson, q_gauss,
    q_integral, Propagator, PropagatorMethod,
};
pub use trotter::{generalized_trotter_kato, trotter, GtkSchedule};
