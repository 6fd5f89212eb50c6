//! Shared domain types: game parameters, queries, partial matrices, binary
//! vectors, and transcripts.
//!
//! Indices are 0-based everywhere in code; transcripts and CLI output use
//! 1-based indices. Column 0 is the most significant bit of a vector's
//! integer encoding, so ascending integer order is lexicographic order.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Global cap on the number of columns.
pub const MAX_N: usize = 30;
/// Cap for modules that enumerate all of `{0,1}^n`.
pub const MAX_ENUM_N: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("invalid dimensions m={m}, n={n} (need m >= 1 and 1 <= n <= {MAX_N})")]
    InvalidDimensions { m: usize, n: usize },
    #[error("query out of range: row {row}, col {col}")]
    QueryOutOfRange { row: usize, col: usize },
    #[error("cell ({row},{col}) is already set")]
    CellOverwrite { row: usize, col: usize },
    #[error("duplicate query ({row},{col})")]
    DuplicateQuery { row: usize, col: usize },
    #[error("{what} requires regime {expected}, but m={m}, n={n} is {actual}")]
    RegimeMismatch {
        what: &'static str,
        expected: Regime,
        actual: Regime,
        m: usize,
        n: usize,
    },
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("no block size d <= n satisfies the feasibility bound for m={m}, n={n}")]
    NoFeasibleBlockSize { m: usize, n: usize },
    #[error("plan admits no defeating output vector: {0}")]
    PlanInfeasible(String),
    #[error("strategy exceeded the m*n query limit")]
    QueryLimitExceeded,
    #[error("claim kind is not valid in regime {0}")]
    ClaimRegimeMismatch(Regime),
    #[error("adversary state is blocked")]
    BlockedState,
    #[error("transcript error: {0}")]
    Transcript(String),
}

/// Parameter regime, a pure function of `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `m <= n`: plain diagonalization suffices.
    Small,
    /// `n < m < 2^n`: a fresh vector always exists but costs more queries.
    Mid,
    /// `m >= 2^n`: the list may realize every vector; decision variant.
    Large,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Small => write!(f, "small (m <= n)"),
            Regime::Mid => write!(f, "mid (n < m < 2^n)"),
            Regime::Large => write!(f, "large (m >= 2^n)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameParams {
    m: usize,
    n: usize,
}

impl GameParams {
    pub fn new(m: usize, n: usize) -> Result<Self, GameError> {
        if m == 0 || n == 0 || n > MAX_N {
            return Err(GameError::InvalidDimensions { m, n });
        }
        Ok(GameParams { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> usize {
        self.m * self.n
    }

    /// `2^n`; always fits because `n <= 30`.
    pub fn vector_count(&self) -> usize {
        1usize << self.n
    }

    pub fn regime(&self) -> Regime {
        if self.m <= self.n {
            Regime::Small
        } else if self.m < self.vector_count() {
            Regime::Mid
        } else {
            Regime::Large
        }
    }

    pub fn require_regime(&self, what: &'static str, expected: Regime) -> Result<(), GameError> {
        let actual = self.regime();
        if actual != expected {
            return Err(GameError::RegimeMismatch {
                what,
                expected,
                actual,
                m: self.m,
                n: self.n,
            });
        }
        Ok(())
    }

    /// Guard for code paths that enumerate all of `{0,1}^n`.
    pub fn require_enumerable(&self, what: &str) -> Result<(), GameError> {
        if self.n > MAX_ENUM_N {
            return Err(GameError::BudgetExceeded(format!(
                "{what} enumerates 2^n vectors but n={} > {MAX_ENUM_N}",
                self.n
            )));
        }
        Ok(())
    }
}

/// A single bit query: "what is bit `col` of vector `row`?" (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Query {
    pub row: usize,
    pub col: usize,
}

impl Query {
    pub fn new(row: usize, col: usize) -> Self {
        Query { row, col }
    }
}

/// One entry of Kronecker's matrix as known to Cantor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CellState {
    Zero,
    One,
    #[default]
    Unknown,
}

impl CellState {
    pub fn from_bit(b: u8) -> Self {
        if b == 0 {
            CellState::Zero
        } else {
            CellState::One
        }
    }

    pub fn bit(self) -> Option<u8> {
        match self {
            CellState::Zero => Some(0),
            CellState::One => Some(1),
            CellState::Unknown => None,
        }
    }
}

/// A length-`n` binary vector, canonically encoded as an integer in
/// `[0, 2^n)` with column 0 as the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryVector {
    value: u32,
    n: u8,
}

impl BinaryVector {
    pub fn new(value: u32, n: usize) -> Self {
        assert!((1..=MAX_N).contains(&n));
        assert!((value as u64) < (1u64 << n), "value out of range for n={n}");
        BinaryVector { value, n: n as u8 }
    }

    pub fn zero(n: usize) -> Self {
        BinaryVector::new(0, n)
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut value = 0u32;
        for &b in bits {
            value = (value << 1) | u32::from(b & 1);
        }
        BinaryVector::new(value, bits.len())
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bit(&self, col: usize) -> u8 {
        assert!(col < self.len());
        ((self.value >> (self.len() - 1 - col)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len()).map(|c| self.bit(c)).collect()
    }

    /// The value-space bitmask of a single column, i.e. the bit of the
    /// integer encoding that column `col` occupies.
    pub fn col_mask(n: usize, col: usize) -> u32 {
        1u32 << (n - 1 - col)
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in 0..self.len() {
            write!(f, "{}", self.bit(c))?;
        }
        Ok(())
    }
}

/// The game state: an `m x n` grid of cells, each known or unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatrix {
    params: GameParams,
    cells: Vec<CellState>,
}

impl PartialMatrix {
    /// A fresh all-unknown matrix.
    pub fn new(params: GameParams) -> Self {
        PartialMatrix {
            params,
            cells: vec![CellState::Unknown; params.cells()],
        }
    }

    pub fn params(&self) -> GameParams {
        self.params
    }

    fn index(&self, row: usize, col: usize) -> usize {
        row * self.params.n + col
    }

    pub fn in_range(&self, q: Query) -> bool {
        q.row < self.params.m && q.col < self.params.n
    }

    pub fn get(&self, row: usize, col: usize) -> CellState {
        assert!(row < self.params.m && col < self.params.n);
        self.cells[self.index(row, col)]
    }

    /// Records an answer. A cell transitions only `unknown -> 0/1`.
    pub fn set_cell(&mut self, q: Query, b: u8) -> Result<(), GameError> {
        if !self.in_range(q) {
            return Err(GameError::QueryOutOfRange {
                row: q.row,
                col: q.col,
            });
        }
        let idx = self.index(q.row, q.col);
        if self.cells[idx] != CellState::Unknown {
            return Err(GameError::CellOverwrite {
                row: q.row,
                col: q.col,
            });
        }
        self.cells[idx] = CellState::from_bit(b);
        Ok(())
    }

    pub fn queried_cols(&self, row: usize) -> Vec<usize> {
        (0..self.params.n)
            .filter(|&c| self.get(row, c) != CellState::Unknown)
            .collect()
    }

    pub fn queried_count(&self, row: usize) -> usize {
        self.queried_cols(row).len()
    }

    pub fn total_queried(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| **c != CellState::Unknown)
            .count()
    }

    pub fn unknown_cells(&self) -> Vec<Query> {
        let mut out = Vec::new();
        for row in 0..self.params.m {
            for col in 0..self.params.n {
                if self.get(row, col) == CellState::Unknown {
                    out.push(Query::new(row, col));
                }
            }
        }
        out
    }

    /// True iff every known cell of `row` equals the corresponding bit of `v`.
    pub fn row_compatible(&self, row: usize, v: BinaryVector) -> bool {
        debug_assert_eq!(v.len(), self.params.n);
        (0..self.params.n).all(|c| match self.get(row, c).bit() {
            Some(b) => b == v.bit(c),
            None => true,
        })
    }

    /// The row as a vector, if fully queried.
    pub fn row_vector(&self, row: usize) -> Option<BinaryVector> {
        let mut bits = Vec::with_capacity(self.params.n);
        for c in 0..self.params.n {
            bits.push(self.get(row, c).bit()?);
        }
        Some(BinaryVector::from_bits(&bits))
    }

    /// The set of fully queried rows, viewed as binary vectors.
    pub fn fixed_rows(&self) -> BTreeSet<BinaryVector> {
        (0..self.params.m)
            .filter_map(|r| self.row_vector(r))
            .collect()
    }

    /// `FIXED(L) = {0,1}^n`.
    pub fn is_complete(&self) -> bool {
        self.fixed_rows().len() == self.params.vector_count()
    }
}

/// Scans `{0,1}^n` in ascending order for a vector that differs from every
/// row on some queried coordinate. `None` means every candidate output is
/// still realizable by some consistent completion.
pub fn defeating_vector(l: &PartialMatrix) -> Result<Option<BinaryVector>, GameError> {
    let params = l.params();
    params.require_enumerable("defeating_vector")?;
    let n = params.n();
    'outer: for val in 0..params.vector_count() as u32 {
        let u = BinaryVector::new(val, n);
        for row in 0..params.m() {
            if l.row_compatible(row, u) {
                continue 'outer;
            }
        }
        return Ok(Some(u));
    }
    Ok(None)
}

/// Cantor's final claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    /// A vector claimed different from every hidden vector (regimes small/mid).
    Search(BinaryVector),
    /// Whether the hidden list realizes all of `{0,1}^n` (regime large);
    /// an `incomplete` claim carries a witness vector.
    Decision {
        complete: bool,
        witness: Option<BinaryVector>,
    },
}

/// The full record of one game: every (query, answer) pair in order, plus
/// the final claim.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub params: GameParams,
    pub seed: Option<u64>,
    pub events: Vec<(Query, u8)>,
    pub claim: Claim,
}

#[derive(Serialize, Deserialize)]
struct EventWire {
    i: usize,
    j: usize,
    b: u8,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ClaimWire {
    Search {
        u: Vec<u8>,
    },
    Decision {
        complete: bool,
        witness: Option<Vec<u8>>,
    },
}

#[derive(Serialize, Deserialize)]
struct TranscriptWire {
    m: usize,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    seed: Option<u64>,
    events: Vec<EventWire>,
    claim: ClaimWire,
}

impl Transcript {
    /// Replays the transcript into a partial matrix; rejects duplicate
    /// queries and out-of-range indices.
    pub fn replay(&self) -> Result<PartialMatrix, GameError> {
        let mut l = PartialMatrix::new(self.params);
        for &(q, b) in &self.events {
            l.set_cell(q, b).map_err(|e| match e {
                GameError::CellOverwrite { row, col } => GameError::DuplicateQuery { row, col },
                other => other,
            })?;
        }
        Ok(l)
    }

    pub fn to_json(&self) -> String {
        let wire = TranscriptWire {
            m: self.params.m(),
            n: self.params.n(),
            seed: self.seed,
            events: self
                .events
                .iter()
                .map(|&(q, b)| EventWire {
                    i: q.row + 1,
                    j: q.col + 1,
                    b,
                })
                .collect(),
            claim: match &self.claim {
                Claim::Search(u) => ClaimWire::Search { u: u.bits() },
                Claim::Decision { complete, witness } => ClaimWire::Decision {
                    complete: *complete,
                    witness: witness.as_ref().map(|u| u.bits()),
                },
            },
        };
        serde_json::to_string_pretty(&wire).expect("transcript serialization")
    }

    pub fn from_json(s: &str) -> Result<Self, GameError> {
        let wire: TranscriptWire =
            serde_json::from_str(s).map_err(|e| GameError::Transcript(e.to_string()))?;
        let params = GameParams::new(wire.m, wire.n)?;
        let vector = |bits: &[u8]| -> Result<BinaryVector, GameError> {
            if bits.len() != wire.n || bits.iter().any(|&b| b > 1) {
                return Err(GameError::Transcript(format!(
                    "claim vector must be {} bits of 0/1",
                    wire.n
                )));
            }
            Ok(BinaryVector::from_bits(bits))
        };
        let claim = match &wire.claim {
            ClaimWire::Search { u } => Claim::Search(vector(u)?),
            ClaimWire::Decision { complete, witness } => Claim::Decision {
                complete: *complete,
                witness: witness.as_deref().map(&vector).transpose()?,
            },
        };
        let mut events = Vec::with_capacity(wire.events.len());
        for e in &wire.events {
            if e.i == 0 || e.j == 0 || e.b > 1 {
                return Err(GameError::Transcript(
                    "event indices are 1-based and bits are 0/1".into(),
                ));
            }
            events.push((Query::new(e.i - 1, e.j - 1), e.b));
        }
        let t = Transcript {
            params,
            seed: wire.seed,
            events,
            claim,
        };
        t.replay()?;
        Ok(t)
    }
}
