//! Independent brute-force ground truth at desk scale: exact covering
//! existence, exact adaptive/oblivious game values on tiny instances, an
//! enumeration check for blockedness, and the hypercube matching and
//! cube-cover searches.
//!
//! Enumeration budgets are hard caps with explicit errors, never silent
//! truncation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::cantor::QueryPlan;
use crate::core::{BinaryVector, GameError, GameParams, PartialMatrix, Regime};
use crate::kronecker::CoveringAssignment;

const COVERING_MAX_N: usize = 12;
const COVERING_NODE_BUDGET: u64 = 1 << 24;
const GAME_VALUE_MAX_N: usize = 3;
const ADAPTIVE_MAX_M: usize = 5;
const OBLIVIOUS_MAX_M: usize = 6;
const HYPERCUBE_MAX_N: usize = 4;

fn budget_err(what: &str) -> GameError {
    GameError::BudgetExceeded(what.to_string())
}

/// Pattern of `v` restricted to `cols` (ascending), first column as the
/// most significant bit.
fn restrict(v: BinaryVector, cols: &[usize]) -> usize {
    cols.iter()
        .fold(0usize, |p, &c| (p << 1) | v.bit(c) as usize)
}

struct CoveringSearch<'a> {
    n: usize,
    rows: Vec<Vec<usize>>, // J_i as sorted column lists
    plan: &'a QueryPlan,
    covered: Vec<bool>,
    left: usize,
    assigned: Vec<Option<usize>>,
    nodes: u64,
}

impl CoveringSearch<'_> {
    /// Vector values agreeing with `pattern` on `cols`.
    fn cube(&self, cols: &[usize], pattern: usize) -> Vec<u32> {
        let n = self.n;
        let mut fixed = 0u32;
        for (k, &c) in cols.iter().enumerate() {
            if (pattern >> (cols.len() - 1 - k)) & 1 == 1 {
                fixed |= BinaryVector::col_mask(n, c);
            }
        }
        let mut free = 0u32;
        for c in 0..n {
            if !cols.contains(&c) {
                free |= BinaryVector::col_mask(n, c);
            }
        }
        // enumerate submasks of `free`, including 0
        let mut out = Vec::with_capacity(1 << (n - cols.len()));
        let mut s = free;
        loop {
            out.push(fixed | s);
            if s == 0 {
                break;
            }
            s = (s - 1) & free;
        }
        out
    }

    fn dfs(&mut self) -> Result<bool, GameError> {
        self.nodes += 1;
        if self.nodes > COVERING_NODE_BUDGET {
            return Err(budget_err("covering search exceeded its node budget"));
        }
        if self.left == 0 {
            return Ok(true);
        }
        let target = self.covered.iter().position(|&c| !c).expect("left > 0");
        let v = BinaryVector::new(target as u32, self.n);
        // Some unassigned row must agree with `target`, which forces its
        // pattern. Rows with identical column sets are interchangeable.
        let mut tried: BTreeSet<Vec<usize>> = BTreeSet::new();
        for row in 0..self.rows.len() {
            if self.assigned[row].is_some() {
                continue;
            }
            let cols = self.rows[row].clone();
            if !tried.insert(cols.clone()) {
                continue;
            }
            let pattern = restrict(v, &cols);
            self.assigned[row] = Some(pattern);
            let mut newly = Vec::new();
            for val in self.cube(&cols, pattern) {
                if !self.covered[val as usize] {
                    self.covered[val as usize] = true;
                    self.left -= 1;
                    newly.push(val);
                }
            }
            if self.dfs()? {
                return Ok(true);
            }
            self.assigned[row] = None;
            for val in newly {
                self.covered[val as usize] = false;
                self.left += 1;
            }
        }
        Ok(false)
    }
}

/// Exact covering-assignment existence: a branch-and-prune search over all
/// assignment tuples, forced by the first uncovered vector at each step.
/// `None` means Cantor wins the oblivious game with this plan.
pub fn covering_exists(plan: &QueryPlan) -> Result<Option<CoveringAssignment>, GameError> {
    let n = plan.n();
    if n > COVERING_MAX_N {
        return Err(budget_err("covering_exists supports n <= 12"));
    }
    let total = 1usize << n;
    let rows: Vec<Vec<usize>> = plan
        .rows()
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();
    let mut search = CoveringSearch {
        n,
        rows,
        plan,
        covered: vec![false; total],
        left: total,
        assigned: vec![None; plan.m()],
        nodes: 0,
    };
    if !search.dfs()? {
        return Ok(None);
    }
    let mut per_row: Vec<BTreeMap<usize, u8>> = Vec::with_capacity(plan.m());
    for (row, cols) in search.plan.rows().iter().enumerate() {
        let cols: Vec<usize> = cols.iter().copied().collect();
        let pattern = search.assigned[row].unwrap_or(0);
        let mut f = BTreeMap::new();
        for (k, &c) in cols.iter().enumerate() {
            f.insert(c, ((pattern >> (cols.len() - 1 - k)) & 1) as u8);
        }
        per_row.push(f);
    }
    Ok(Some(CoveringAssignment::new(n, per_row)))
}

/// Plain exhaustive backtracking: can the rows of `L` be completed so that
/// every vector of `{0,1}^n` appears? Independent of the matching module.
pub fn unblocked_by_enumeration(l: &PartialMatrix) -> Result<bool, GameError> {
    let params = l.params();
    if params.n() > 4 || params.m() > 12 {
        return Err(budget_err("unblocked_by_enumeration supports n <= 4, m <= 12"));
    }
    let total = params.vector_count() as u32;
    if params.m() < total as usize {
        return Ok(false);
    }
    fn assign(l: &PartialMatrix, val: u32, total: u32, used: &mut [bool]) -> bool {
        if val == total {
            return true;
        }
        let v = BinaryVector::new(val, l.params().n());
        for row in 0..l.params().m() {
            if !used[row] && l.row_compatible(row, v) {
                used[row] = true;
                if assign(l, val + 1, total, used) {
                    return true;
                }
                used[row] = false;
            }
        }
        false
    }
    let mut used = vec![false; params.m()];
    Ok(assign(l, 0, total, &mut used))
}

type RowState = (u16, u16); // (queried-column mask, answered bits), value-space positions

fn stop_legal(rows: &[RowState], n: usize) -> bool {
    (0..1u16 << n).any(|u| rows.iter().all(|&(mask, bits)| (bits ^ u) & mask != 0))
}

fn minimax(rows: &mut Vec<RowState>, n: usize, memo: &mut HashMap<Vec<RowState>, u32>) -> u32 {
    if stop_legal(rows, n) {
        return 0;
    }
    if let Some(&v) = memo.get(rows.as_slice()) {
        return v;
    }
    let key = rows.clone();
    let mut best = u32::MAX;
    let mut tried: BTreeSet<RowState> = BTreeSet::new();
    for idx in 0..rows.len() {
        let state = rows[idx];
        if !tried.insert(state) {
            continue;
        }
        for col in 0..n {
            let mask_bit = 1u16 << (n - 1 - col);
            if state.0 & mask_bit != 0 {
                continue;
            }
            let mut worst = 0u32;
            for b in 0..2u16 {
                let next = (state.0 | mask_bit, state.1 | (b * mask_bit));
                rows[idx] = next;
                rows.sort_unstable();
                worst = worst.max(minimax(rows, n, memo));
                rows.clone_from(&key);
            }
            best = best.min(1 + worst);
        }
    }
    memo.insert(key, best);
    best
}

/// Exact adaptive game value `g(n, m)` by symmetry-reduced minimax over the
/// full game tree; Cantor may stop only once some output defeats every
/// consistent completion.
pub fn adaptive_game_value(params: GameParams) -> Result<u32, GameError> {
    if params.n() > GAME_VALUE_MAX_N || params.m() > ADAPTIVE_MAX_M {
        return Err(budget_err("adaptive_game_value supports n <= 3, m <= 5"));
    }
    if params.regime() == Regime::Large {
        return Err(GameError::RegimeMismatch {
            what: "adaptive_game_value",
            expected: Regime::Mid,
            actual: Regime::Large,
            m: params.m(),
            n: params.n(),
        });
    }
    let mut rows = vec![(0u16, 0u16); params.m()];
    let mut memo = HashMap::new();
    Ok(minimax(&mut rows, params.n(), &mut memo))
}

/// Exact oblivious game value `f(n, m)`: minimum total plan size over all
/// plans without a covering assignment; `m` for `m <= n`.
pub fn oblivious_game_value(params: GameParams) -> Result<usize, GameError> {
    if params.n() > GAME_VALUE_MAX_N || params.m() > OBLIVIOUS_MAX_M {
        return Err(budget_err("oblivious_game_value supports n <= 3, m <= 6"));
    }
    if params.m() <= params.n() {
        return Ok(params.m());
    }
    if params.regime() == Regime::Large {
        return Err(GameError::RegimeMismatch {
            what: "oblivious_game_value",
            expected: Regime::Mid,
            actual: Regime::Large,
            m: params.m(),
            n: params.n(),
        });
    }
    let n = params.n();
    let m = params.m();
    let subsets: Vec<BTreeSet<usize>> = (0..1usize << n)
        .map(|mask| (0..n).filter(|c| (mask >> c) & 1 == 1).collect())
        .collect();
    // Plans are multisets of subsets; enumerate nondecreasing index tuples.
    let mut best = m * n; // the full plan always wins when m < 2^n
    let mut stack: Vec<usize> = Vec::with_capacity(m);
    fn rec(
        subsets: &[BTreeSet<usize>],
        n: usize,
        m: usize,
        start: usize,
        size: usize,
        stack: &mut Vec<usize>,
        best: &mut usize,
    ) -> Result<(), GameError> {
        if size >= *best {
            return Ok(());
        }
        if stack.len() == m {
            let plan = QueryPlan::new(n, stack.iter().map(|&i| subsets[i].clone()).collect())?;
            if covering_exists(&plan)?.is_none() {
                *best = size;
            }
            return Ok(());
        }
        for i in start..subsets.len() {
            stack.push(i);
            rec(subsets, n, m, i, size + subsets[i].len(), stack, best)?;
            stack.pop();
        }
        Ok(())
    }
    rec(&subsets, n, m, 0, 0, &mut stack, &mut best)?;
    Ok(best)
}

/// An edge of the hypercube, given by its two endpoints.
pub type Edge = (BinaryVector, BinaryVector);

/// Exhaustive search for pairwise-disjoint edges of `{0,1}^n`, one per
/// requested direction (0-based). Returns `(direction, edge)` pairs.
pub fn edge_matching(
    dirs: &[usize],
    n: usize,
) -> Result<Option<Vec<(usize, Edge)>>, GameError> {
    if n == 0 || n > HYPERCUBE_MAX_N {
        return Err(budget_err("edge_matching supports 1 <= n <= 4"));
    }
    let half = 1usize << (n - 1);
    if dirs.len() > half {
        return Err(budget_err("edge_matching requires d <= 2^(n-1)"));
    }
    if dirs.iter().any(|&j| j >= n) {
        return Err(GameError::QueryOutOfRange { row: 0, col: n });
    }
    let mut sorted = dirs.to_vec();
    sorted.sort_unstable();
    let total = 1u32 << n;
    fn dfs(
        sorted: &[usize],
        idx: usize,
        n: usize,
        total: u32,
        used: &mut u32,
        min_base: u32,
        edges: &mut Vec<(usize, Edge)>,
    ) -> bool {
        if idx == sorted.len() {
            return true;
        }
        let dir = sorted[idx];
        let bit = BinaryVector::col_mask(n, dir);
        // Same-direction edges are taken with ascending base vertices to
        // avoid permuted duplicates.
        let start = if idx > 0 && sorted[idx - 1] == dir {
            min_base
        } else {
            0
        };
        for base in start..total {
            if base & bit != 0 {
                continue;
            }
            let a = 1u32 << base;
            let b = 1u32 << (base | bit);
            if *used & (a | b) != 0 {
                continue;
            }
            *used |= a | b;
            edges.push((
                dir,
                (BinaryVector::new(base, n), BinaryVector::new(base | bit, n)),
            ));
            if dfs(sorted, idx + 1, n, total, used, base + 1, edges) {
                return true;
            }
            edges.pop();
            *used &= !(a | b);
        }
        false
    }
    let mut used = 0u32;
    let mut edges = Vec::new();
    if dfs(&sorted, 0, n, total, &mut used, 0, &mut edges) {
        Ok(Some(edges))
    } else {
        Ok(None)
    }
}

/// Searches for cube placements `C_i` (each a `J_i`-cube) whose union has
/// at least `d + q` vertices, `d` the total size of the sets. `None` at
/// valid parameters would be a counterexample to the cover conjecture and
/// is surfaced, not treated as an error.
pub fn cube_cover_search(
    sets: &[BTreeSet<usize>],
    n: usize,
) -> Result<Option<Vec<Vec<BinaryVector>>>, GameError> {
    if n == 0 || n > HYPERCUBE_MAX_N {
        return Err(budget_err("cube_cover_search supports 1 <= n <= 4"));
    }
    let d: usize = sets.iter().map(|s| s.len()).sum();
    if sets.iter().any(|s| s.is_empty() || s.iter().any(|&c| c >= n)) {
        return Err(GameError::PlanInfeasible(
            "cube sets must be nonempty subsets of the columns".into(),
        ));
    }
    if d >= 1usize << (n - 1) {
        return Err(budget_err("cube_cover_search requires d < 2^(n-1)"));
    }
    let q = sets.len();
    let target = d + q;
    // Precompute every placement of each cube as a vertex bitmask.
    let placements: Vec<Vec<u32>> = sets
        .iter()
        .map(|free_cols| {
            let mut free = 0u32;
            for &c in free_cols {
                free |= BinaryVector::col_mask(n, c);
            }
            let fixed_mask = (1u32 << n) - 1 - free;
            let mut out = Vec::new();
            let mut fixed = fixed_mask;
            loop {
                // vertices of the cube: fixed | (submask of free)
                let mut verts = 0u32;
                let mut s = free;
                loop {
                    verts |= 1u32 << (fixed | s);
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & free;
                }
                out.push(verts);
                if fixed == 0 {
                    break;
                }
                fixed = (fixed - 1) & fixed_mask;
            }
            out.reverse(); // ascending fixed values
            out
        })
        .collect();
    let suffix_max: Vec<usize> = {
        let mut acc = vec![0usize; q + 1];
        for i in (0..q).rev() {
            acc[i] = acc[i + 1] + (1usize << sets[i].len());
        }
        acc
    };
    fn dfs(
        placements: &[Vec<u32>],
        suffix_max: &[usize],
        idx: usize,
        union: u32,
        target: usize,
        chosen: &mut Vec<u32>,
    ) -> bool {
        let covered = union.count_ones() as usize;
        if covered + suffix_max[idx] < target {
            return false;
        }
        if idx == placements.len() {
            return covered >= target;
        }
        if covered >= target {
            // Remaining cubes can sit anywhere.
            for p in &placements[idx..] {
                chosen.push(p[0]);
            }
            return true;
        }
        for &p in &placements[idx] {
            chosen.push(p);
            if dfs(placements, suffix_max, idx + 1, union | p, target, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::with_capacity(q);
    if !dfs(&placements, &suffix_max, 0, 0, target, &mut chosen) {
        return Ok(None);
    }
    let cubes = chosen
        .iter()
        .map(|&verts| {
            (0..1u32 << n)
                .filter(|&v| verts & (1u32 << v) != 0)
                .map(|v| BinaryVector::new(v, n))
                .collect()
        })
        .collect();
    Ok(Some(cubes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::Query;

    fn params(m: usize, n: usize) -> GameParams {
        GameParams::new(m, n).unwrap()
    }

    fn plan(n: usize, rows: &[&[usize]]) -> QueryPlan {
        QueryPlan::new(
            n,
            rows.iter()
                .map(|cols| cols.iter().copied().collect::<BTreeSet<_>>())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn covering_exists_witness() {
        let p = plan(2, &[&[0], &[0], &[1]]);
        let a = covering_exists(&p).unwrap().expect("witness");
        assert!(a.covers_all());
        assert!(a.matches_plan(&p));
    }

    #[test]
    fn covering_exists_counting_bound() {
        let p = plan(2, &[&[0, 1], &[0, 1], &[0, 1]]);
        assert!(covering_exists(&p).unwrap().is_none());
    }

    #[test]
    fn diagonal_plan_never_covered() {
        for n in 1..=4usize {
            let rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
            let refs: Vec<&[usize]> = rows.iter().map(|r| r.as_slice()).collect();
            let p = plan(n, &refs);
            assert!(covering_exists(&p).unwrap().is_none(), "n={n}");
        }
    }

    #[test]
    fn enumeration_oracle_matches_basics() {
        let all_unknown = PartialMatrix::new(params(5, 2));
        assert!(unblocked_by_enumeration(&all_unknown).unwrap());
        let mut l = PartialMatrix::new(params(2, 1));
        l.set_cell(Query::new(0, 0), 0).unwrap();
        l.set_cell(Query::new(1, 0), 0).unwrap();
        assert!(!unblocked_by_enumeration(&l).unwrap());
    }

    #[test]
    fn adaptive_value_small_regime() {
        assert_eq!(adaptive_game_value(params(2, 2)).unwrap(), 2);
        assert_eq!(adaptive_game_value(params(3, 3)).unwrap(), 3);
    }

    #[test]
    fn adaptive_value_mid_regime() {
        assert_eq!(adaptive_game_value(params(3, 2)).unwrap(), 4);
    }

    #[test]
    fn oblivious_value_tiny() {
        assert_eq!(oblivious_game_value(params(2, 2)).unwrap(), 2);
        assert_eq!(oblivious_game_value(params(3, 3)).unwrap(), 3);
        assert_eq!(oblivious_game_value(params(3, 2)).unwrap(), 6);
    }

    #[test]
    fn edge_matching_same_direction() {
        let m = edge_matching(&[0, 0], 2).unwrap().expect("matching");
        assert_eq!(m.len(), 2);
        let mut used = BTreeSet::new();
        for (dir, (a, b)) in &m {
            assert_eq!(*dir, 0);
            assert_eq!(a.value() ^ b.value(), BinaryVector::col_mask(2, 0));
            assert!(used.insert(a.value()) && used.insert(b.value()));
        }
    }

    #[test]
    fn edge_matching_parity_obstruction() {
        // d = 2^(n-1) with odd multiplicities has no matching.
        assert!(edge_matching(&[0, 1], 2).unwrap().is_none());
        // ... and succeeds when every multiplicity is even.
        assert!(edge_matching(&[0, 0], 2).unwrap().is_some());
        assert!(edge_matching(&[0, 0, 1, 1], 3).unwrap().is_some());
        assert!(edge_matching(&[0, 0, 0, 1], 3).unwrap().is_none());
    }

    #[test]
    fn cube_cover_single_cube() {
        let c = cube_cover_search(&[BTreeSet::from([0, 1])], 3)
            .unwrap()
            .expect("cover");
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].len(), 4); // 2^d >= d + 1
    }

    #[test]
    fn cube_cover_mixed_sets() {
        // n=3, J1={0,1}, J2={2}: d=3 < 4, q=2, need union >= 5.
        let c = cube_cover_search(&[BTreeSet::from([0, 1]), BTreeSet::from([2])], 3)
            .unwrap()
            .expect("cover");
        let union: BTreeSet<u32> = c.iter().flatten().map(|v| v.value()).collect();
        assert!(union.len() >= 5);
    }

    #[test]
    fn cube_cover_singletons_reduce_to_edges() {
        // all |J_i|=1: disjoint edges give union 2d >= d+q.
        let sets: Vec<BTreeSet<usize>> =
            vec![BTreeSet::from([0]), BTreeSet::from([1]), BTreeSet::from([2])];
        let c = cube_cover_search(&sets, 4).unwrap().expect("cover");
        let union: BTreeSet<u32> = c.iter().flatten().map(|v| v.value()).collect();
        assert!(union.len() >= 6);
    }

    #[test]
    fn budgets_are_hard_errors() {
        assert!(matches!(
            adaptive_game_value(params(6, 3)),
            Err(GameError::BudgetExceeded(_))
        ));
        assert!(matches!(
            edge_matching(&[0], 5),
            Err(GameError::BudgetExceeded(_))
        ));
    }
}
