use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    Model(String),
    #[error("instance too large: {what} is {got}, cap is {cap}")]
    Size { what: &'static str, got: usize, cap: usize },
    #[error("state budget of {budget} exhausted at {at}")]
    Budget { budget: u64, at: String },
    #[error("vertices {0} and {1} share an image point")]
    Degenerate(usize, usize),
    #[error("embedding contracts the pair ({0}, {1})")]
    Contract(usize, usize),
    #[error("bad parameter: {0}")]
    Param(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

/// Shared state counter; every enumeration layer charges it so that an
/// exhausted search is reported as `Error::Budget` rather than a verdict.
#[derive(Debug, Clone)]
pub struct Budget {
    pub cap: u64,
    pub used: u64,
}

impl Budget {
    pub const DEFAULT: u64 = 5_000_000;

    pub fn new(cap: u64) -> Self {
        Budget { cap, used: 0 }
    }

    pub fn tick(&mut self, at: impl FnOnce() -> String) -> Result<()> {
        self.charge(1, at)
    }

    pub fn charge(&mut self, k: u64, at: impl FnOnce() -> String) -> Result<()> {
        self.used = self.used.saturating_add(k);
        if self.used > self.cap {
            return Err(Error::Budget { budget: self.cap, at: at() });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT)
    }
}
