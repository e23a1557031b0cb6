//! Exact and numerical traces `σ_ℓ = tr Â^ℓ = q_ℓ · π/√3`.

pub mod engine;
pub mod numeric;
pub mod oracle;
pub(crate) mod series;
pub mod table;

pub use engine::{residue_traces, EngineOutput};
pub use numeric::{sigma1_regularized, trace_numeric};
pub use oracle::{trace_oracle_walks, trace_poles};
pub use table::{trace_exact, trace_exact_cyclo, trace_t_even, traces_exact, Provenance, TraceEntry, TraceTable};
