use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("asymmetric adjacency: `{0}` lists `{1}` but not vice versa")]
    AsymmetricAdjacency(String, String),
    #[error("duplicate entry `{1}` in the preference list of `{0}`")]
    DuplicateEntry(String, String),
    #[error("edge ({0}, {1}) joins two vertices on the same side")]
    SameSide(String, String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("vertex `{u}` cannot compare `{v}` with `{w}`")]
    NotComparable { u: String, v: String, w: String },
    #[error("operation requires a bipartite instance")]
    NotBipartite,
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("no stable matching exists")]
    NoStableMatching,
    #[error("the popular subgraph has an odd component of size {0}")]
    OddComponent(usize),
    #[error("parity vector has length {got}, expected {expected}")]
    ParityLength { expected: usize, got: usize },
    #[error("table sweep produced an invalid matching at t = {0}")]
    SweepInvalid(String),
    #[error("decomposition member at t = {t} has weight {weight} but the LP optimum is {optimum}")]
    DecompositionMismatch { t: String, weight: String, optimum: String },
    #[error("a weight is negative: {0}")]
    NegativeWeight(String),
    #[error("vertex set is not a vertex cover: edge ({0}, {1}) is uncovered")]
    NotACover(usize, usize),
    #[error("LP solver failure: {0}")]
    Solver(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
