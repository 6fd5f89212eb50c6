//! Plays strategies against adversaries, judges claims against all
//! consistent completions, and generates CSV experiment tables.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cantor::{self, QueryPlan};
use crate::core::{
    Claim, GameError, GameParams, PartialMatrix, Query, Regime, Transcript,
};
use crate::kronecker::{BalancedAdversary, CoveringAdversary, ZeroFirstAdversary};
use crate::oracle;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// One step of an interactive Cantor strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategyStep {
    Query(Query),
    Claim(Claim),
}

/// Uniform interactive protocol for Cantor-side strategies: the engine
/// alternates `next()` and `observe(answer)` until the strategy claims.
pub trait CantorStrategy {
    fn next(&mut self) -> StrategyStep;
    fn observe(&mut self, answer: u8);
}

/// Uniform adversary protocol; oblivious games grant `observe_plan` before
/// any answers.
pub trait Adversary {
    fn observe_plan(&mut self, _plan: &QueryPlan) {}
    fn answer(&mut self, q: Query) -> u8;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Cantor,
    Kronecker,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Winner::Cantor => write!(f, "cantor"),
            Winner::Kronecker => write!(f, "kronecker"),
        }
    }
}

fn check_claim_regime(claim: &Claim, params: GameParams) -> Result<(), GameError> {
    let regime = params.regime();
    let ok = match claim {
        Claim::Search(_) => regime != Regime::Large,
        Claim::Decision { .. } => regime == Regime::Large,
    };
    if ok {
        Ok(())
    } else {
        Err(GameError::ClaimRegimeMismatch(regime))
    }
}

/// Runs an adaptive game. The engine, not the strategy, enforces the
/// no-duplicate-query rule and the `m * n` query limit.
pub fn play_adaptive(
    strategy: &mut dyn CantorStrategy,
    adversary: &mut dyn Adversary,
    params: GameParams,
) -> Result<Transcript, GameError> {
    let mut board = PartialMatrix::new(params);
    let mut events = Vec::new();
    loop {
        match strategy.next() {
            StrategyStep::Query(q) => {
                if events.len() == params.cells() {
                    return Err(GameError::QueryLimitExceeded);
                }
                board.set_cell(q, 0).map_err(|e| match e {
                    GameError::CellOverwrite { row, col } => {
                        GameError::DuplicateQuery { row, col }
                    }
                    other => other,
                })?;
                let b = adversary.answer(q);
                strategy.observe(b);
                events.push((q, b));
            }
            StrategyStep::Claim(claim) => {
                check_claim_regime(&claim, params)?;
                return Ok(Transcript {
                    params,
                    seed: None,
                    events,
                    claim,
                });
            }
        }
    }
}

/// Runs an oblivious game: the adversary sees the whole plan, every plan
/// query is answered (row order, columns ascending), then `output_fn`
/// produces the claim from the answered matrix.
pub fn play_oblivious(
    plan: &QueryPlan,
    output_fn: impl FnOnce(&QueryPlan, &PartialMatrix) -> Result<Claim, GameError>,
    adversary: &mut dyn Adversary,
    params: GameParams,
) -> Result<Transcript, GameError> {
    adversary.observe_plan(plan);
    let mut board = PartialMatrix::new(params);
    let mut events = Vec::with_capacity(plan.total_size());
    for q in plan.queries() {
        let b = adversary.answer(q);
        board.set_cell(q, b)?;
        events.push((q, b));
    }
    let claim = output_fn(plan, &board)?;
    check_claim_regime(&claim, params)?;
    Ok(Transcript {
        params,
        seed: None,
        events,
        claim,
    })
}

/// Judges a search claim: Cantor wins iff every row has a recorded answer
/// differing from the claimed vector, i.e. no consistent completion
/// contains it.
pub fn judge_search(t: &Transcript) -> Result<Winner, GameError> {
    let Claim::Search(u) = &t.claim else {
        return Err(GameError::ClaimRegimeMismatch(t.params.regime()));
    };
    let board = t.replay()?;
    let all_defeated = (0..t.params.m()).all(|row| !board.row_compatible(row, *u));
    Ok(if all_defeated {
        Winner::Cantor
    } else {
        Winner::Kronecker
    })
}

/// Judges a decision claim (regime large). `complete` is correct iff the
/// fully queried rows realize all of `{0,1}^n`; `incomplete` with witness
/// `u` is correct iff no consistent completion contains `u`.
pub fn judge_decision(t: &Transcript) -> Result<Winner, GameError> {
    t.params.require_regime("judge_decision", Regime::Large)?;
    let Claim::Decision { complete, witness } = &t.claim else {
        return Err(GameError::ClaimRegimeMismatch(t.params.regime()));
    };
    let board = t.replay()?;
    let correct = if *complete {
        board.is_complete()
    } else {
        match witness {
            None => false,
            Some(u) => (0..t.params.m()).all(|row| !board.row_compatible(row, *u)),
        }
    };
    Ok(if correct {
        Winner::Cantor
    } else {
        Winner::Kronecker
    })
}

/// Cantor strategy that queries a fixed cell order in full and then makes
/// the correct decision claim for what it saw.
#[derive(Debug)]
pub struct ScriptedScan {
    order: Vec<Query>,
    idx: usize,
    board: PartialMatrix,
    pending: Option<Query>,
}

impl ScriptedScan {
    pub fn new(params: GameParams, order: Vec<Query>) -> Self {
        ScriptedScan {
            order,
            idx: 0,
            board: PartialMatrix::new(params),
            pending: None,
        }
    }

    /// Row-major order over all cells.
    pub fn sequential(params: GameParams) -> Self {
        let order = PartialMatrix::new(params).unknown_cells();
        Self::new(params, order)
    }

    /// Seeded shuffle of all cells.
    pub fn shuffled(params: GameParams, seed: u64) -> Self {
        let mut order = PartialMatrix::new(params).unknown_cells();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        Self::new(params, order)
    }

    pub fn board(&self) -> &PartialMatrix {
        &self.board
    }
}

impl CantorStrategy for ScriptedScan {
    fn next(&mut self) -> StrategyStep {
        if self.idx < self.order.len() {
            let q = self.order[self.idx];
            self.idx += 1;
            self.pending = Some(q);
            StrategyStep::Query(q)
        } else if self.board.is_complete() {
            StrategyStep::Claim(Claim::Decision {
                complete: true,
                witness: None,
            })
        } else {
            let fixed = self.board.fixed_rows();
            let n = self.board.params().n();
            let missing = (0..self.board.params().vector_count() as u32)
                .map(|v| crate::core::BinaryVector::new(v, n))
                .find(|v| !fixed.contains(v));
            StrategyStep::Claim(Claim::Decision {
                complete: false,
                witness: missing,
            })
        }
    }

    fn observe(&mut self, answer: u8) {
        let q = self.pending.take().expect("observe without a pending query");
        self.board.set_cell(q, answer).expect("scripted scan order");
    }
}

/// Experiment scenarios for [`table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Diagonal,
    Adaptive,
    Oblivious,
    ObliviousTiny,
    ZeroFirst,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Diagonal => "diagonal",
            Scenario::Adaptive => "adaptive",
            Scenario::Oblivious => "oblivious",
            Scenario::ObliviousTiny => "oblivious-tiny",
            Scenario::ZeroFirst => "zero-first",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "diagonal" => Ok(Scenario::Diagonal),
            "adaptive" => Ok(Scenario::Adaptive),
            "oblivious" => Ok(Scenario::Oblivious),
            "oblivious-tiny" => Ok(Scenario::ObliviousTiny),
            "zero-first" | "zero_first" => Ok(Scenario::ZeroFirst),
            other => Err(format!("unknown scenario `{other}`")),
        }
    }
}

/// One CSV row of an experiment table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub n: usize,
    pub m: usize,
    pub scenario: &'static str,
    pub queries: usize,
    /// The theoretical query-count expression, where one applies.
    pub formula: Option<usize>,
    /// The exact game value, where the instance is small enough.
    pub oracle: Option<usize>,
    pub winner: Winner,
}

pub const CSV_HEADER: &str = "n,m,scenario,queries,formula,oracle,winner";

pub fn to_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fmt_opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            r.m,
            r.scenario,
            r.queries,
            fmt_opt(r.formula),
            fmt_opt(r.oracle),
            r.winner
        ));
    }
    out
}

fn adaptive_oracle(params: GameParams) -> Option<usize> {
    oracle::adaptive_game_value(params).ok().map(|v| v as usize)
}

fn run_cell(scenario: Scenario, params: GameParams) -> Result<Option<TableRow>, GameError> {
    let (m, n) = (params.m(), params.n());
    let row = |queries, formula, oracle, winner| TableRow {
        n,
        m,
        scenario: scenario.name(),
        queries,
        formula,
        oracle,
        winner,
    };
    match scenario {
        Scenario::Diagonal => {
            if params.regime() != Regime::Small {
                return Ok(None);
            }
            let mut s = cantor::DiagonalStrategy::new(params)?;
            let mut adv = BalancedAdversary::new(n);
            let t = play_adaptive(&mut s, &mut adv, params)?;
            let winner = judge_search(&t)?;
            Ok(Some(row(
                t.events.len(),
                Some(m),
                adaptive_oracle(params),
                winner,
            )))
        }
        Scenario::Adaptive => {
            if params.regime() != Regime::Mid {
                return Ok(None);
            }
            let mut s = cantor::AdaptiveStrategy::new(params)?;
            let mut adv = BalancedAdversary::new(n);
            let t = play_adaptive(&mut s, &mut adv, params)?;
            let winner = judge_search(&t)?;
            Ok(Some(row(
                t.events.len(),
                Some(2 * m - n),
                adaptive_oracle(params),
                winner,
            )))
        }
        Scenario::Oblivious | Scenario::ObliviousTiny => {
            if params.regime() != Regime::Mid {
                return Ok(None);
            }
            let value = oracle::oblivious_game_value(params).ok();
            if scenario == Scenario::ObliviousTiny && value.is_none() {
                return Ok(None);
            }
            let plan = cantor::oblivious_plan(params)?;
            let mut adv = CoveringAdversary::new();
            let t = play_oblivious(
                &plan,
                |plan, board| Ok(Claim::Search(cantor::oblivious_output(plan, board)?)),
                &mut adv,
                params,
            )?;
            let winner = judge_search(&t)?;
            let formula = cantor::oblivious_block_d(params)
                .ok()
                .map(|d| m * d);
            Ok(Some(row(t.events.len(), formula, value, winner)))
        }
        Scenario::ZeroFirst => {
            if params.regime() != Regime::Large {
                return Ok(None);
            }
            params.require_enumerable("zero-first scenario")?;
            let mut s = ScriptedScan::sequential(params);
            let mut adv = ZeroFirstAdversary::new(params)?;
            let t = play_adaptive(&mut s, &mut adv, params)?;
            let winner = judge_decision(&t)?;
            Ok(Some(row(t.events.len(), Some(m * n), None, winner)))
        }
    }
}

fn cells(
    scenario: Scenario,
    n_range: (usize, usize),
    m_range: (usize, usize),
) -> Vec<(Scenario, GameParams)> {
    let mut out = Vec::new();
    for n in n_range.0..=n_range.1 {
        for m in m_range.0..=m_range.1 {
            if let Ok(p) = GameParams::new(m, n) {
                out.push((scenario, p));
            }
        }
    }
    out
}

/// Generates the experiment table sequentially. Rows come out sorted by
/// `(n, m)`; cells outside the scenario's regime are skipped.
pub fn table_sequential(
    scenario: Scenario,
    n_range: (usize, usize),
    m_range: (usize, usize),
) -> Result<Vec<TableRow>, GameError> {
    let mut rows = Vec::new();
    for (s, p) in cells(scenario, n_range, m_range) {
        if let Some(r) = run_cell(s, p)? {
            rows.push(r);
        }
    }
    Ok(rows)
}

/// Generates the experiment table, in parallel across `(n, m)` cells when
/// the `parallel` feature is enabled. Output is deterministic and
/// identical to [`table_sequential`].
pub fn table(
    scenario: Scenario,
    n_range: (usize, usize),
    m_range: (usize, usize),
) -> Result<Vec<TableRow>, GameError> {
    #[cfg(feature = "parallel")]
    {
        let work = cells(scenario, n_range, m_range);
        let results: Result<Vec<Option<TableRow>>, GameError> = work
            .into_par_iter()
            .map(|(s, p)| run_cell(s, p))
            .collect();
        Ok(results?.into_iter().flatten().collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        table_sequential(scenario, n_range, m_range)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::BinaryVector;
    use crate::kronecker::AllZerosAdversary;

    fn params(m: usize, n: usize) -> GameParams {
        GameParams::new(m, n).unwrap()
    }

    #[test]
    fn adaptive_vs_balanced_counts() {
        let p = params(5, 3);
        let mut s = cantor::AdaptiveStrategy::new(p).unwrap();
        let mut adv = BalancedAdversary::new(3);
        let t = play_adaptive(&mut s, &mut adv, p).unwrap();
        assert_eq!(t.events.len(), 7);
        assert_eq!(judge_search(&t).unwrap(), Winner::Cantor);
    }

    #[test]
    fn diagonal_vs_anyone_wins() {
        let p = params(3, 3);
        let mut s = cantor::DiagonalStrategy::new(p).unwrap();
        let mut adv = AllZerosAdversary;
        let t = play_adaptive(&mut s, &mut adv, p).unwrap();
        assert_eq!(t.events.len(), 3);
        assert_eq!(judge_search(&t).unwrap(), Winner::Cantor);
    }

    #[test]
    fn early_claim_is_judged_a_loss() {
        // A faulty strategy that claims immediately: some row has no
        // queried bit, so Kronecker wins.
        struct EarlyClaim;
        impl CantorStrategy for EarlyClaim {
            fn next(&mut self) -> StrategyStep {
                StrategyStep::Claim(Claim::Search(BinaryVector::zero(3)))
            }
            fn observe(&mut self, _answer: u8) {}
        }
        let p = params(3, 3);
        let t = play_adaptive(&mut EarlyClaim, &mut AllZerosAdversary, p).unwrap();
        assert_eq!(judge_search(&t).unwrap(), Winner::Kronecker);
    }

    #[test]
    fn duplicate_queries_are_rejected() {
        struct Repeats;
        impl CantorStrategy for Repeats {
            fn next(&mut self) -> StrategyStep {
                StrategyStep::Query(Query::new(0, 0))
            }
            fn observe(&mut self, _answer: u8) {}
        }
        let p = params(2, 2);
        assert_eq!(
            play_adaptive(&mut Repeats, &mut AllZerosAdversary, p),
            Err(GameError::DuplicateQuery { row: 0, col: 0 })
        );
    }

    #[test]
    fn search_claims_rejected_in_large_regime() {
        struct Claims;
        impl CantorStrategy for Claims {
            fn next(&mut self) -> StrategyStep {
                StrategyStep::Claim(Claim::Search(BinaryVector::zero(2)))
            }
            fn observe(&mut self, _answer: u8) {}
        }
        let p = params(5, 2);
        assert!(matches!(
            play_adaptive(&mut Claims, &mut AllZerosAdversary, p),
            Err(GameError::ClaimRegimeMismatch(Regime::Large))
        ));
    }

    #[test]
    fn judge_decision_cases() {
        let p = params(4, 2);
        // Full scan vs zero-first: complete claim is correct.
        let mut s = ScriptedScan::sequential(p);
        let mut adv = ZeroFirstAdversary::new(p).unwrap();
        let t = play_adaptive(&mut s, &mut adv, p).unwrap();
        assert_eq!(t.events.len(), 8);
        assert_eq!(judge_decision(&t).unwrap(), Winner::Cantor);

        // Claiming complete while a cell is unknown: the star can be
        // filled to break completeness.
        let mut t2 = t.clone();
        t2.events.pop();
        t2.claim = Claim::Decision {
            complete: true,
            witness: None,
        };
        assert_eq!(judge_decision(&t2).unwrap(), Winner::Kronecker);

        // Claiming incomplete with a witness equal to a fixed row.
        let board = t.replay().unwrap();
        let witness = board.row_vector(0).unwrap();
        let mut t3 = t.clone();
        t3.claim = Claim::Decision {
            complete: false,
            witness: Some(witness),
        };
        assert_eq!(judge_decision(&t3).unwrap(), Winner::Kronecker);
    }

    #[test]
    fn oblivious_round_trip_tiny() {
        let p = params(3, 2);
        let plan = cantor::oblivious_plan(p).unwrap();
        let mut adv = CoveringAdversary::new();
        let t = play_oblivious(
            &plan,
            |plan, board| Ok(Claim::Search(cantor::oblivious_output(plan, board)?)),
            &mut adv,
            p,
        )
        .unwrap();
        assert_eq!(t.events.len(), 6);
        assert_eq!(judge_search(&t).unwrap(), Winner::Cantor);
    }

    #[test]
    fn table_matches_sequential_and_formulas() {
        let rows = table(Scenario::Adaptive, (3, 3), (4, 7)).unwrap();
        let seq = table_sequential(Scenario::Adaptive, (3, 3), (4, 7)).unwrap();
        assert_eq!(rows, seq);
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert_eq!(r.queries, 2 * r.m - r.n);
            assert_eq!(r.formula, Some(2 * r.m - r.n));
            assert_eq!(r.winner, Winner::Cantor);
        }
        let csv = to_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv.contains("3,4,adaptive,5,5,5,cantor"));
    }

    #[test]
    fn table_zero_first_counts() {
        let rows = table(Scenario::ZeroFirst, (2, 2), (5, 7)).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.queries, r.m * r.n);
            assert_eq!(r.winner, Winner::Cantor);
        }
    }

    #[test]
    fn table_oblivious_tiny_oracle() {
        let rows = table(Scenario::ObliviousTiny, (2, 2), (3, 3)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].oracle, Some(6));
        assert_eq!(rows[0].queries, 6);
    }
}
