//! Numerical toolkit for blow-up analysis of a weakly coupled semilinear
//! system driven by two distinct fractional diffusions: alpha-stable heat
//! kernels, time-dilation integrals, the f_i/F blow-up criterion with its
//! exponent algebra, the comparison ODE system with its closed-form envelope,
//! and a pseudospectral mild-solution simulator on a periodic box.

pub mod criterion;
pub mod dilation;
pub mod error;
pub mod mild_solver;
pub mod ode_blowup;
pub mod quad;
pub mod special;
pub mod stable_kernel;

pub use criterion::{
    criterion_report, divergence_test, eval_big_f, eval_f, literature_bounds, BlowUpVerdict,
    CriterionMethod, CriterionReport, DivergenceTest, LiteratureBounds, SystemParams,
};
pub use dilation::{CoefficientFn, Dilation, DivergenceVerdict, VerdictMethod};
pub use error::{Error, Result};
pub use mild_solver::{
    BlowUpReason, Diagnostics, FieldPair, InitialData, ProblemSpec, RunRecord, SimControl,
    SimVerdict, Solver, SpectralGrid, StepOutcome,
};
pub use ode_blowup::{
    blowup_time_bound, envelope_h, integrate_system, young_constant, OdeSpec, OdeTrajectory,
    StepControl, TimeFn,
};
pub use stable_kernel::{
    density_at_origin, density_grid, density_grid_bounded, estimate_comparison_constant,
    eval_density, min_time_t0, ComparisonEstimate, DensityGrid, KernelSpec, ProbeGrid,
};
