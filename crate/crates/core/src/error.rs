use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimensionError {
    #[error("dimension must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("dimension {0} is too large")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("expected {expected} phases, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("phase {index} is not finite")]
    NonFinite { index: usize },
}

/// An inter-basis overlap whose modulus is off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapViolation {
    pub a: usize,
    pub b: usize,
    /// `|⟨ψ_a|ψ_b⟩|`
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GramError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("expected {expected} states of length {dim}, got {got}")]
    Shape { expected: usize, dim: usize, got: usize },
    #[error("basis {basis} is not orthonormal (deviation {deviation:.3e})")]
    NotOrthonormal { basis: usize, deviation: f64 },
    #[error("{} inter-basis overlaps deviate from 1/sqrt(d) by more than {tol:e}", .offending.len())]
    NotUnbiased { tol: f64, offending: Vec<OverlapViolation> },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TraceError {
    #[error("Gram matrix is not Hermitian (deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },
    #[error("trace has imaginary part {imag:.3e}")]
    ComplexTrace { imag: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WhError {
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("no analytic construction available for d = {0}")]
    UnsupportedDimension(usize),
    #[error("no non-degenerate Hermitian combination found after {retries} attempts")]
    DegenerateCombination { retries: usize },
    #[error("generator {generator} maps state {state} outside the state set (best overlap {best:.6})")]
    NoMatch { generator: String, state: usize, best: f64 },
    #[error(transparent)]
    Gram(#[from] GramError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolishError {
    #[error("polish diverged: F went from {start:.3e} to {end:.3e} after {steps} steps")]
    PolishDiverged { start: f64, end: f64, steps: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("tensor entries differ by {gap:.3e}, too close to the comparison tolerance; polish the solution first")]
    UnstableRounding { gap: f64 },
    #[error("tensors have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("Gram matrix is not a rank-{expected} projector ({near_one} eigenvalues near 1, worst deviation {deviation:.3e})")]
    RankDeficient { expected: usize, near_one: usize, deviation: f64 },
    #[error("a permutation found by the search failed full verification")]
    VerificationFailed,
    #[error(transparent)]
    Gram(#[from] GramError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LandscapeError {
    #[error("I - 2G is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("point is not stationary (gradient norm {gradient_norm:.3e})")]
    NotStationary { gradient_norm: f64 },
    #[error("point is not a solution (F = {f:.3e})")]
    NotSolution { f: f64 },
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error("malformed file: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("image list is not a permutation")]
    NotBijective,
    #[error("permutation of degree {found} in a group of degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
}
