//! Problem generation, benchmarks, convergence traces, closed-loop
//! simulation and plot-data emission on top of `rateamp-core`.

pub mod bench;
pub mod closed_loop;
pub mod converge;
mod error;
pub mod plot;
pub mod random;
pub mod settings;

pub use bench::{run_timing_benchmark, summarize_timing, TimingRecord, TimingSummary};
pub use closed_loop::{
    closed_loop_from, closed_loop_simulate, ClosedLoopTrace, ModelConfig, SolverChoice, StepRecord,
};
pub use converge::{
    dykstra_trace, run_convergence_trace, solver_traces, ConvergenceRow, DykstraTrace, SolverTraces,
};
pub use error::HarnessError;
pub use plot::{emit_plotdata, PlotKind};
pub use random::{gen_random_problem, RandomProblem};
pub use settings::{AdmmSettings, BenchmarkSpec, DykstraSettings, FgmSettings};
