//! Dense Hermitian linear algebra on small Hilbert spaces.

mod channel;
mod eigen;
mod functions;
mod hermitian;
mod json;
pub mod random;
mod tensor;

pub use channel::{KrausChannel, COMPLETENESS_TOL};
pub use eigen::EigenDecomposition;
pub use functions::{
    frechet_exp, op_function, pos_neg_parts, OpFunction, PosNegParts, SUPPORT_THRESHOLD,
};
pub(crate) use functions::{frechet_exp_in_basis, support_cutoff};
pub use hermitian::{
    max_asymmetry, DensityMatrix, HermitianOperator, TestOperator, HERMITICITY_TOL, STATE_TOL,
};
pub use json::OperatorJson;
pub use random::RandomSuite;
pub use tensor::{
    checked_power_dim, operator_power, partial_trace, partial_trace_operator, single_slot_sum,
    tensor_power, Subsystem, DEFAULT_DIM_CAP,
};

pub type C64 = num_complex::Complex64;
