//! Crate-wide error type.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Best iterate carried out of a failed scalarized solve.
#[derive(Debug, Clone)]
pub struct StalledIterate {
    /// Control sequence at the best iterate, one inner vector per step.
    pub controls: Vec<Vec<f64>>,
    /// Objective vector at the best iterate.
    pub cost: Vec<f64>,
    pub kkt_residual: f64,
    pub constraint_violation: f64,
}

#[derive(Debug, Clone)]
pub enum Error {
    /// A vector had the wrong length for its role.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// The dynamics produced a non-finite state.
    DynamicsBlowUp { step: usize },
    /// Objective index outside `0..s`.
    ObjectiveIndexOutOfRange { index: usize, count: usize },
    /// The first cost functional was requested for a trajectory whose
    /// terminal state lies outside the terminal set (where the terminal
    /// cost is defined).
    TerminalOutsideDomain { distance: f64, tolerance: f64 },
    /// Rotated costs were requested but no storage function is attached.
    StorageUnavailable,
    /// A dissipativity check was requested but no rate certificate is
    /// attached.
    CertificateUnavailable,
    /// The comparison-sequence precondition failed: the supplied control
    /// sequence does not reach the terminal set.
    ComparisonPreconditionViolated { terminal_distance: f64 },
    /// The inner solver ran out of iterations without meeting the
    /// constraints; the best iterate is attached.
    SolverStalled(Box<StalledIterate>),
    /// The cost upper bounds cut the feasible set down to nothing.
    BoundSetInfeasible,
    /// No feasible control sequence exists from the given initial state
    /// (or none was found).
    InfeasibleInitialState,
    /// The stability bound on the first cost cannot be met at this
    /// initial state.
    JboundUnsatisfiable,
    /// The performance envelope needs a trace produced with bounds on
    /// every cost criterion.
    EnvelopeRequiresAllBounds,
    /// Brute-force enumeration would exceed the configured budget.
    EnumerationBudgetExceeded { required: u128, limit: u64 },
    /// Model construction failed an invariant.
    InvalidModel(&'static str),
    /// Objective-set construction failed an invariant.
    InvalidObjectives(&'static str),
    /// Loop or solver configuration failed an invariant.
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "dimension mismatch for {what}: expected {expected}, got {got}"),
            Error::DynamicsBlowUp { step } => {
                write!(f, "dynamics blow-up: non-finite state at step {step}")
            }
            Error::ObjectiveIndexOutOfRange { index, count } => {
                write!(f, "objective index {index} out of range (have {count})")
            }
            Error::TerminalOutsideDomain {
                distance,
                tolerance,
            } => write!(
                f,
                "terminal state outside the terminal-cost domain: distance {distance:.3e} > tolerance {tolerance:.3e}"
            ),
            Error::StorageUnavailable => write!(f, "rotated costs unavailable: no storage function"),
            Error::CertificateUnavailable => {
                write!(f, "dissipativity rate certificate unavailable")
            }
            Error::ComparisonPreconditionViolated { terminal_distance } => write!(
                f,
                "comparison sequence precondition violated: terminal distance {terminal_distance:.3e}"
            ),
            Error::SolverStalled(it) => write!(
                f,
                "solver stalled: kkt residual {:.3e}, constraint violation {:.3e}",
                it.kkt_residual, it.constraint_violation
            ),
            Error::BoundSetInfeasible => write!(f, "bound set infeasible"),
            Error::InfeasibleInitialState => write!(f, "no feasible control sequence from x0"),
            Error::JboundUnsatisfiable => {
                write!(f, "stability cost bound not satisfiable at this x0")
            }
            Error::EnvelopeRequiresAllBounds => {
                write!(f, "envelope check requires a trace with bounds on all cost criteria")
            }
            Error::EnumerationBudgetExceeded { required, limit } => write!(
                f,
                "enumeration budget exceeded: {required} sequences > limit {limit}"
            ),
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::InvalidObjectives(msg) => write!(f, "invalid objective set: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
