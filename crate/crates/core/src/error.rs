use std::path::PathBuf;

use thiserror::Error;

/// Coarse error categories, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Infeasible,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("InvalidDataset: {0}")]
    InvalidDataset(String),

    #[error("EmptyClass: class {class} has no members")]
    EmptyClass { class: String },

    #[error("UnlabeledRow: row {row} carries no label")]
    UnlabeledRow { row: usize },

    #[error("NonNumericCell: row {row}, column '{column}': cannot parse '{value}'")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("MissingLabel: row {row} has no value in column '{column}'")]
    MissingLabel { row: usize, column: String },

    #[error("InvalidLabel: row {row}: '{value}' is not a positive integer class id")]
    InvalidLabel { row: usize, value: String },

    #[error("MalformedIndicator: row {row}, column '{column}': '{value}' is not 0 or 1")]
    MalformedIndicator {
        row: usize,
        column: String,
        value: String,
    },

    #[error("RowLengthMismatch: row {row} has {found} fields, header has {expected}")]
    RowLengthMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("NonFiniteFeature: point {point}, dimension {dim}")]
    NonFiniteFeature { point: usize, dim: usize },

    #[error("LengthMismatch: {what}: {left} vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("WithinScatterDegenerate: Tr(S_w) = 0, gamma cannot be balanced automatically")]
    WithinScatterDegenerate,

    #[error("CoincidentClassMeans: classes {first} and {second} share the same mean")]
    CoincidentClassMeans { first: usize, second: usize },

    #[error("InitRankExceeded: classical LDA initialization supports k <= {max}, got k = {k}")]
    InitRankExceeded { k: usize, max: usize },

    #[error("SubspaceRankExceeded: method supports k <= {max}, got k = {k}")]
    SubspaceRankExceeded { k: usize, max: usize },

    #[error(
        "NullSpaceAbsent: within-class scatter has no null space (dimension {null_dim}; \
         n = {n}, K = {classes}, p = {dim}, lower bound p-(n-K) = {bound})"
    )]
    NullSpaceAbsent {
        null_dim: usize,
        n: usize,
        classes: usize,
        dim: usize,
        bound: i64,
    },

    #[error("NullSpaceTooSmall: null space of within-class scatter has dimension {null_dim} < k = {k}")]
    NullSpaceTooSmall { null_dim: usize, k: usize },

    #[error("RankCollapse: matrix has numerical rank below {k} (sigma_min/sigma_max = {ratio:e})")]
    RankCollapse { k: usize, ratio: f64 },

    #[error("NumericalBreakdown: non-finite value at iteration {iteration}")]
    NumericalBreakdown { iteration: usize },

    #[error("ClassTooSmallForFolds: class {class} has {size} members, need at least {folds}")]
    ClassTooSmallForFolds {
        class: usize,
        size: usize,
        folds: usize,
    },

    #[error("EmptyTrainingSet: no training points")]
    EmptyTrainingSet,

    #[error("TuningFailed: every grid value failed ({0})")]
    TuningFailed(String),

    #[error("I/O error on {path}: {source}", path = path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {message}", path = path.display())]
    Csv { path: PathBuf, message: String },

    #[error("Serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            InvalidConfig(_) | TuningFailed(_) => ErrorKind::Config,
            InitRankExceeded { .. }
            | SubspaceRankExceeded { .. }
            | NullSpaceAbsent { .. }
            | NullSpaceTooSmall { .. } => ErrorKind::Infeasible,
            WithinScatterDegenerate
            | CoincidentClassMeans { .. }
            | RankCollapse { .. }
            | NumericalBreakdown { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }

    /// The variant name, as printed at the head of the message.
    pub fn name(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidConfig(_) => "InvalidConfig",
            InvalidDataset(_) => "InvalidDataset",
            EmptyClass { .. } => "EmptyClass",
            UnlabeledRow { .. } => "UnlabeledRow",
            NonNumericCell { .. } => "NonNumericCell",
            MissingLabel { .. } => "MissingLabel",
            InvalidLabel { .. } => "InvalidLabel",
            MalformedIndicator { .. } => "MalformedIndicator",
            RowLengthMismatch { .. } => "RowLengthMismatch",
            NonFiniteFeature { .. } => "NonFiniteFeature",
            LengthMismatch { .. } => "LengthMismatch",
            WithinScatterDegenerate => "WithinScatterDegenerate",
            CoincidentClassMeans { .. } => "CoincidentClassMeans",
            InitRankExceeded { .. } => "InitRankExceeded",
            SubspaceRankExceeded { .. } => "SubspaceRankExceeded",
            NullSpaceAbsent { .. } => "NullSpaceAbsent",
            NullSpaceTooSmall { .. } => "NullSpaceTooSmall",
            RankCollapse { .. } => "RankCollapse",
            NumericalBreakdown { .. } => "NumericalBreakdown",
            ClassTooSmallForFolds { .. } => "ClassTooSmallForFolds",
            EmptyTrainingSet => "EmptyTrainingSet",
            TuningFailed(_) => "TuningFailed",
            Io { .. } => "Io",
            Csv { .. } => "Csv",
            Serialization(_) => "Serialization",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
