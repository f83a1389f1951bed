use thiserror::Error;

/// Errors surfaced by the core modules. One shared enum keeps cross-module
/// composition (closure calling tensors calling scalars) free of conversion
/// boilerplate; variant names follow the operation contracts.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("scalars from different fields cannot be combined ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("inversion of zero")]
    ZeroInversion,
    #[error("galois action is only defined on rational or cyclotomic scalars")]
    NotCyclotomic,
    #[error("galois index {k} is not invertible mod {n}")]
    BadGaloisIndex { k: u64, n: u64 },
    #[error("scalar parse error: {0}")]
    ParseError(String),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("slot index out of range: {0}")]
    SlotOutOfRange(String),
    #[error("permutation degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("tensor type does not match the requested map arities: {0}")]
    TypeArithmeticMismatch(String),
    #[error("operation size {needed} exceeds the configured budget {budget}")]
    DimensionOverflow { needed: u128, budget: u128 },

    #[error("map is not well defined on the presentation; witness: {witness}")]
    NotWellDefined { witness: String },
    #[error("gram extraction requires a 1-dimensional target, got dimension {dim}")]
    TargetNotLine { dim: usize },
    #[error("singular matrix, determinant {det}")]
    SingularMatrix { det: String },
    #[error("expression type error: {0}")]
    TypeError(String),

    #[error("unsupported scalar field for this operation: {0}")]
    UnsupportedField(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("tensor has the wrong type: {0}")]
    WrongTensorType(String),
    #[error("projections do not define a grading: {0}")]
    NotAGrading(String),

    #[error("cocycle identity fails at triple ({0}, {1}, {2})")]
    CocycleInvalid(usize, usize, usize),
    #[error("word is not a relator: product of commutators is not the identity")]
    WordNotRelator,
    #[error("group is not abelian")]
    NotAbelian,
    #[error("abelian group is missing its cyclic decomposition")]
    MissingDecomposition,
    #[error("invalid parameters: {0}")]
    ParamInvalid(String),
    #[error("internal verification failed (construction bug): {0}")]
    InternalCheckFailed(String),
    #[error("input is not shaped like a Taft comodule algebra: {0}")]
    NotTaftShaped(String),

    #[error("wrong number of arguments: {0}")]
    ArityMismatch(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
