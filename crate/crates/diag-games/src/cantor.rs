//! Cantor-side strategies.
//!
//! * [`DiagonalStrategy`]: `m <= n`, one query per row on the diagonal.
//! * [`AdaptiveStrategy`]: `n < m < 2^n`, majority-vote levels that finish
//!   with a diagonal tail, `2m - n` queries in total.
//! * [`oblivious_plan`] / [`oblivious_output`]: the non-adaptive block plan
//!   with its pigeonhole output rule.
//! * [`endgame_plan`]: the sparse plan for `2^(n-1) <= m < 2^n` that leaves
//!   `2^n - m - 1` cells unqueried (one column-parity variant at the
//!   boundary `m = 2^(n-1)`).

use std::collections::{BTreeMap, BTreeSet};

use crate::core::{
    defeating_vector, BinaryVector, Claim, GameError, GameParams, PartialMatrix, Query, Regime,
};
use crate::engine::{CantorStrategy, StrategyStep};

/// An oblivious plan: for each row, the set of columns Cantor queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPlan {
    n: usize,
    per_row: Vec<BTreeSet<usize>>,
}

impl QueryPlan {
    pub fn new(n: usize, per_row: Vec<BTreeSet<usize>>) -> Result<Self, GameError> {
        for cols in &per_row {
            if let Some(&c) = cols.iter().next_back() {
                if c >= n {
                    return Err(GameError::QueryOutOfRange {
                        row: per_row.len(),
                        col: c,
                    });
                }
            }
        }
        Ok(QueryPlan { n, per_row })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.per_row.len()
    }

    pub fn row_cols(&self, row: usize) -> &BTreeSet<usize> {
        &self.per_row[row]
    }

    pub fn rows(&self) -> &[BTreeSet<usize>] {
        &self.per_row
    }

    pub fn total_size(&self) -> usize {
        self.per_row.iter().map(|s| s.len()).sum()
    }

    /// All queries in row order, columns ascending within a row.
    pub fn queries(&self) -> Vec<Query> {
        let mut out = Vec::with_capacity(self.total_size());
        for (row, cols) in self.per_row.iter().enumerate() {
            for &col in cols {
                out.push(Query::new(row, col));
            }
        }
        out
    }
}

/// Queries bit `i` of row `i`; outputs the negation on the diagonal and
/// zeros elsewhere.
#[derive(Debug)]
pub struct DiagonalStrategy {
    params: GameParams,
    asked: usize,
    answered: usize,
    u: Vec<u8>,
}

impl DiagonalStrategy {
    pub fn new(params: GameParams) -> Result<Self, GameError> {
        params.require_regime("diagonal strategy", Regime::Small)?;
        Ok(DiagonalStrategy {
            params,
            asked: 0,
            answered: 0,
            u: vec![0; params.n()],
        })
    }
}

impl CantorStrategy for DiagonalStrategy {
    fn next(&mut self) -> StrategyStep {
        if self.asked < self.params.m() {
            let q = Query::new(self.asked, self.asked);
            self.asked += 1;
            StrategyStep::Query(q)
        } else {
            StrategyStep::Claim(Claim::Search(BinaryVector::from_bits(&self.u)))
        }
    }

    fn observe(&mut self, answer: u8) {
        self.u[self.answered] = 1 - (answer & 1);
        self.answered += 1;
    }
}

/// The level size `x` for `alive` rows and `cols` remaining columns
/// (`cols < alive < 2^cols`): `x = 1` while `alive <= 2^(cols-1)`, else
/// `x = alive - 2^(cols-1) + 1`. Guarantees
/// `cols - 1 <= alive - x < 2^(cols-1)` and `2x - 1 <= alive`.
pub fn choose_x(alive: usize, cols: usize) -> usize {
    debug_assert!(cols >= 1 && cols < alive);
    let half = 1usize << (cols - 1);
    debug_assert!(alive < 2 * half);
    if alive <= half {
        1
    } else {
        alive - half + 1
    }
}

#[derive(Debug)]
enum AdaptiveMode {
    /// Querying the current column of the first `2x - 1` alive rows.
    Level { x: usize, asked: usize, answers: Vec<u8> },
    /// Diagonal tail over the remaining alive rows.
    Tail { idx: usize, answered: usize },
}

/// The `2m - n` adaptive strategy: per level, query one column of `2x - 1`
/// alive rows, set the output bit to the minority value, drop `x` rows
/// answering the majority, and recurse; finish with a diagonal tail once
/// the alive count fits in the remaining columns.
#[derive(Debug)]
pub struct AdaptiveStrategy {
    params: GameParams,
    col: usize,
    alive: Vec<usize>,
    u: Vec<u8>,
    mode: AdaptiveMode,
}

impl AdaptiveStrategy {
    pub fn new(params: GameParams) -> Result<Self, GameError> {
        params.require_regime("adaptive strategy", Regime::Mid)?;
        let x = choose_x(params.m(), params.n());
        Ok(AdaptiveStrategy {
            params,
            col: 0,
            alive: (0..params.m()).collect(),
            u: vec![0; params.n()],
            mode: AdaptiveMode::Level {
                x,
                asked: 0,
                answers: Vec::new(),
            },
        })
    }

    fn finish_level(&mut self, x: usize, answers: &[u8]) {
        debug_assert_eq!(answers.len(), 2 * x - 1);
        let ones = answers.iter().filter(|&&b| b == 1).count();
        let majority = if ones >= x { 1 } else { 0 };
        self.u[self.col] = 1 - majority;
        // Drop the x lowest-indexed rows that answered the majority value.
        let mut dropped = 0;
        let mut survivors = Vec::with_capacity(self.alive.len() - x);
        for (pos, &row) in self.alive.iter().enumerate() {
            let is_majority = pos < answers.len() && answers[pos] == majority;
            if is_majority && dropped < x {
                dropped += 1;
            } else {
                survivors.push(row);
            }
        }
        debug_assert_eq!(dropped, x);
        self.alive = survivors;
        self.col += 1;
        let cols_left = self.params.n() - self.col;
        self.mode = if self.alive.len() <= cols_left {
            AdaptiveMode::Tail {
                idx: 0,
                answered: 0,
            }
        } else {
            AdaptiveMode::Level {
                x: choose_x(self.alive.len(), cols_left),
                asked: 0,
                answers: Vec::new(),
            }
        };
    }
}

impl CantorStrategy for AdaptiveStrategy {
    fn next(&mut self) -> StrategyStep {
        match &mut self.mode {
            AdaptiveMode::Level { x, asked, .. } => {
                debug_assert!(*asked < 2 * *x - 1);
                let q = Query::new(self.alive[*asked], self.col);
                *asked += 1;
                StrategyStep::Query(q)
            }
            AdaptiveMode::Tail { idx, .. } => {
                if *idx < self.alive.len() {
                    let q = Query::new(self.alive[*idx], self.col + *idx);
                    *idx += 1;
                    StrategyStep::Query(q)
                } else {
                    StrategyStep::Claim(Claim::Search(BinaryVector::from_bits(&self.u)))
                }
            }
        }
    }

    fn observe(&mut self, answer: u8) {
        match &mut self.mode {
            AdaptiveMode::Level { x, answers, .. } => {
                answers.push(answer & 1);
                if answers.len() == 2 * *x - 1 {
                    let x = *x;
                    let answers = std::mem::take(answers);
                    self.finish_level(x, &answers);
                }
            }
            AdaptiveMode::Tail { answered, .. } => {
                self.u[self.col + *answered] = 1 - (answer & 1);
                *answered += 1;
            }
        }
    }
}

fn log2(x: f64) -> f64 {
    x.ln() / std::f64::consts::LN_2
}

/// The closed-form block size
/// `ceil(log(2m/n) + 2 log log(2m/n) + 1)`.
pub fn closed_form_block_d(m: usize, n: usize) -> usize {
    let ratio = 2.0 * m as f64 / n as f64;
    let l = log2(ratio);
    (l + 2.0 * log2(l) + 1.0).ceil().max(1.0) as usize
}

/// `2^d > 2md/n`, equivalently `2^d / d > 2m / n`.
pub fn block_d_feasible(m: usize, n: usize, d: usize) -> bool {
    d >= 1 && d <= n && (1u128 << d) * n as u128 > 2 * m as u128 * d as u128
}

/// The block size actually used: the closed form, incremented until the
/// feasibility bound holds; errors if no `d <= n` works.
pub fn oblivious_block_d(params: GameParams) -> Result<usize, GameError> {
    params.require_regime("oblivious block size", Regime::Mid)?;
    let mut d = closed_form_block_d(params.m(), params.n());
    while d <= params.n() && !block_d_feasible(params.m(), params.n(), d) {
        d += 1;
    }
    if d > params.n() {
        return Err(GameError::NoFeasibleBlockSize {
            m: params.m(),
            n: params.n(),
        });
    }
    Ok(d)
}

fn full_plan(params: GameParams) -> QueryPlan {
    let all: BTreeSet<usize> = (0..params.n()).collect();
    QueryPlan {
        n: params.n(),
        per_row: vec![all; params.m()],
    }
}

/// The oblivious plan for `n < m < 2^n`.
///
/// For `m = n + 1` a shortcut plan: three rows share the first two columns
/// and the rest get singleton diagonal columns. Otherwise the block plan:
/// `floor(n/d)` disjoint column blocks of size `d` with the rows split into
/// equally many balanced groups. If no feasible `d <= n` exists the plan
/// falls back to [`endgame_plan`] when `m >= 2^(n-1)`, else to the full
/// `m * n` plan.
pub fn oblivious_plan(params: GameParams) -> Result<QueryPlan, GameError> {
    params.require_regime("oblivious plan", Regime::Mid)?;
    let (m, n) = (params.m(), params.n());
    if m == n + 1 {
        let mut per_row = vec![BTreeSet::from([0usize, 1]); 3];
        for col in 2..n {
            per_row.push(BTreeSet::from([col]));
        }
        debug_assert_eq!(per_row.len(), m);
        return QueryPlan::new(n, per_row);
    }
    let d = match oblivious_block_d(params) {
        Ok(d) => d,
        Err(GameError::NoFeasibleBlockSize { .. }) => {
            return if 2 * m >= params.vector_count() {
                endgame_plan(params)
            } else {
                Ok(full_plan(params))
            };
        }
        Err(e) => return Err(e),
    };
    let blocks = n / d;
    let base = m / blocks;
    let extra = m % blocks;
    let mut per_row = Vec::with_capacity(m);
    for b in 0..blocks {
        let cols: BTreeSet<usize> = (b * d..(b + 1) * d).collect();
        let size = base + usize::from(b < extra);
        for _ in 0..size {
            per_row.push(cols.clone());
        }
    }
    debug_assert_eq!(per_row.len(), m);
    QueryPlan::new(n, per_row)
}

/// The sparse plan for `2^(n-1) <= m < 2^n`: query everything except
/// `d = 2^n - m - 1` cells, each in a distinct row (rows `0..d`, column 0).
/// At the boundary `m = 2^(n-1)` every row omits one column, with some
/// column omitted an odd number of times.
pub fn endgame_plan(params: GameParams) -> Result<QueryPlan, GameError> {
    params.require_regime("endgame plan", Regime::Mid)?;
    let (m, n) = (params.m(), params.n());
    let half = params.vector_count() / 2;
    if m < half {
        return Err(GameError::RegimeMismatch {
            what: "endgame plan (needs m >= 2^(n-1))",
            expected: Regime::Mid,
            actual: params.regime(),
            m,
            n,
        });
    }
    let mut plan = full_plan(params);
    if m == half {
        // Parity variant: omit column 0 in rows 0..m-1 and column 1 in the
        // last row, so column 0 is omitted an odd number of times.
        for row in 0..m - 1 {
            plan.per_row[row].remove(&0);
        }
        plan.per_row[m - 1].remove(&1);
    } else {
        let d = params.vector_count() - m - 1;
        for row in 0..d {
            plan.per_row[row].remove(&0);
        }
    }
    Ok(plan)
}

/// Output rule for oblivious plans.
///
/// When the distinct row sets are pairwise disjoint, each group of rows
/// sharing a set picks the lexicographically smallest bit pattern none of
/// its members realized (pigeonhole); unconstrained coordinates default
/// to 0. Plans with overlapping sets fall back to an ascending scan of
/// `{0,1}^n` for a vector that defeats every row.
pub fn oblivious_output(
    plan: &QueryPlan,
    answers: &PartialMatrix,
) -> Result<BinaryVector, GameError> {
    let n = plan.n();
    let mut groups: BTreeMap<&BTreeSet<usize>, Vec<usize>> = BTreeMap::new();
    for (row, cols) in plan.per_row.iter().enumerate() {
        groups.entry(cols).or_default().push(row);
    }
    let sets: Vec<&BTreeSet<usize>> = groups.keys().copied().collect();
    let disjoint = sets.iter().enumerate().all(|(i, a)| {
        !a.is_empty() && sets[i + 1..].iter().all(|b| a.is_disjoint(b))
    });
    if !disjoint {
        return defeating_vector(answers)?.ok_or_else(|| {
            GameError::PlanInfeasible("every output vector is still realizable".into())
        });
    }
    let mut u = vec![0u8; n];
    for (cols, rows) in &groups {
        let cols: Vec<usize> = cols.iter().copied().collect();
        let width = cols.len();
        let mut realized = vec![false; 1usize << width];
        for &row in rows {
            let mut pattern = 0usize;
            for &c in &cols {
                let bit = answers.get(row, c).bit().ok_or_else(|| {
                    GameError::PlanInfeasible(format!("cell ({row},{c}) was not answered"))
                })?;
                pattern = (pattern << 1) | bit as usize;
            }
            realized[pattern] = true;
        }
        let free = realized.iter().position(|&r| !r).ok_or_else(|| {
            GameError::PlanInfeasible(format!(
                "rows sharing columns {cols:?} realize every pattern"
            ))
        })?;
        for (k, &c) in cols.iter().enumerate() {
            u[c] = ((free >> (width - 1 - k)) & 1) as u8;
        }
    }
    Ok(BinaryVector::from_bits(&u))
}
