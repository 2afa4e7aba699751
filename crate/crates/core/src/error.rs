use core::fmt;

/// Errors reported by graph construction, the linear-algebra kernel, the
/// stability analysis and the simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A node index was outside `0..n`.
    NodeOutOfRange {
        /// Offending index.
        node: usize,
        /// Number of nodes in the graph.
        n: usize,
    },
    /// An arc from a node to itself.
    SelfLoop(usize),
    /// The same ordered pair was given twice.
    DuplicateArc(usize, usize),
    /// Arc or leader weight that is not strictly positive (arcs) or
    /// nonnegative (leader), or not finite.
    InvalidWeight(f64),
    /// Matrix or vector dimensions do not fit the operation.
    DimensionMismatch {
        /// What was expected.
        expected: usize,
        /// What was supplied.
        found: usize,
    },
    /// Square matrix required.
    NotSquare {
        /// Rows.
        rows: usize,
        /// Columns.
        cols: usize,
    },
    /// Symmetric input required.
    NotSymmetric,
    /// Elimination hit a pivot below the singularity threshold.
    Singular,
    /// QR or Jacobi iteration exceeded its sweep cap.
    NoConvergence,
    /// Some eigenvalue has real part at or below zero.
    NotPositiveStable,
    /// The leader is not globally reachable in the augmented graph.
    LeaderNotReachable,
    /// The supplied gain does not exceed the conservative threshold.
    GainBelowThreshold {
        /// Supplied gain.
        k: f64,
        /// Threshold that must be exceeded.
        k_star: f64,
    },
    /// The Razumikhin constant must exceed one.
    InvalidRazumikhin(f64),
    /// A matrix expected to be positive definite is not.
    NotPositiveDefinite,
    /// Balanced digraph required.
    NotBalanced,
    /// Empty topology list or trajectory.
    Empty,
    /// Simulation configuration violates a precondition.
    InvalidConfig(&'static str),
    /// Integration produced a nonfinite or runaway state.
    Diverged {
        /// Last sample time whose state was valid.
        last_valid_time: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NodeOutOfRange { node, n } => {
                write!(f, "node index {node} out of range for {n} nodes")
            }
            Error::SelfLoop(i) => write!(f, "self-loop at node {i}"),
            Error::DuplicateArc(i, j) => write!(f, "duplicate arc ({i}, {j})"),
            Error::InvalidWeight(w) => write!(f, "invalid weight {w}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Error::NotSymmetric => f.write_str("matrix is not symmetric"),
            Error::Singular => f.write_str("matrix is singular"),
            Error::NoConvergence => f.write_str("eigenvalue iteration did not converge"),
            Error::NotPositiveStable => f.write_str("matrix is not positive stable"),
            Error::LeaderNotReachable => f.write_str("leader not globally reachable"),
            Error::GainBelowThreshold { k, k_star } => {
                write!(f, "gain k = {k} does not exceed threshold k* = {k_star}")
            }
            Error::InvalidRazumikhin(q) => write!(f, "Razumikhin constant q = {q} must exceed 1"),
            Error::NotPositiveDefinite => f.write_str("matrix is not positive definite"),
            Error::NotBalanced => f.write_str("digraph is not balanced"),
            Error::Empty => f.write_str("empty input"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::Diverged { last_valid_time } => {
                write!(f, "integration diverged after t = {last_valid_time}")
            }
        }
    }
}

impl core::error::Error for Error {}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;
