use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed assembly: {0}")]
    MalformedAssembly(String),
    #[error("placement is not in the frontier")]
    NotInFrontier,
    #[error("placement overlaps an existing slat")]
    Overlap,
    #[error("state space exceeded cap of {cap} states")]
    BoundTooLarge { cap: usize },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("seed has input glues: {0}")]
    SeedHasInputGlues(String),
    #[error("empty glue label has no complement")]
    EmptyLabel,
    #[error("invalid glue label {0:?}")]
    BadLabel(String),
    #[error("cooperativity must be even and > 2 (got {0}, odd)")]
    OddCooperativity(usize),
    #[error("cooperativity must be even and > 2 (got {0})")]
    CooperativityTooSmall(usize),
    #[error("tile {tile} signature {signature} is not a zig-zag signature")]
    SignatureNotZigZag { tile: String, signature: String },
    #[error("tile {tile} signature {signature} is not a standard signature")]
    SignatureNotStandard { tile: String, signature: String },
    #[error("tile {tile} signature {signature} is not a standard across-the-gap signature")]
    SignatureNotStandardATG { tile: String, signature: String },
    #[error("tile {tile} signature {signature} is not a directed temperature-2 signature")]
    SignatureNotDirected { tile: String, signature: String },
    #[error("seed tile missing: {0}")]
    SeedTileMissing(String),
    #[error("resource bound violated: {0}")]
    BoundViolated(String),
    #[error("block ({x},{y}) holds resolving slats of two tiles: {a} and {b}")]
    AmbiguousResolution { x: i32, y: i32, a: String, b: String },
    #[error("schema error at line {line}, column {column}: {msg}")]
    Schema { msg: String, line: usize, column: usize },
    #[error("unsupported format version {0:?} (expected \"v1\")")]
    VersionUnsupported(String),
    #[error("unsupported feature: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema { msg: msg.into(), line: 0, column: 0 }
    }
}
