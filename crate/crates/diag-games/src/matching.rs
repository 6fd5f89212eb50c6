//! Blocked/unblocked certification for the large regime.
//!
//! A matrix is unblocked iff its rows can be completed so that every vector
//! of `{0,1}^n` appears, equivalently iff the bipartite compatibility graph
//! between `{0,1}^n` and the rows has a matching saturating the vector side.
//! [`MatchingState`] carries such a matching as a witness and repairs it
//! incrementally with a single augmenting-path phase per answered cell.

use crate::core::{BinaryVector, GameError, PartialMatrix, Query};

/// A matching from every vector of `{0,1}^n` to a distinct compatible row,
/// together with the matrix it certifies.
#[derive(Debug, Clone)]
pub struct MatchingState {
    matrix: PartialMatrix,
    /// Indexed by vector value; the row matched to that vector.
    vec_to_row: Vec<Option<usize>>,
    /// Indexed by row; the vector value matched to that row.
    row_to_vec: Vec<Option<u32>>,
}

impl MatchingState {
    pub fn matrix(&self) -> &PartialMatrix {
        &self.matrix
    }

    /// Row matched to each vector value, saturating `{0,1}^n`.
    pub fn matched_row(&self, vector_value: u32) -> Option<usize> {
        self.vec_to_row[vector_value as usize]
    }

    fn compatible(&self, row: usize, val: u32) -> bool {
        self.matrix
            .row_compatible(row, BinaryVector::new(val, self.matrix.params().n()))
    }

    /// Kuhn augmenting step for `val`: rows scanned in ascending index,
    /// displaced vectors retried recursively.
    fn augment(&mut self, val: u32, visited: &mut [bool]) -> bool {
        for row in 0..self.matrix.params().m() {
            if visited[row] || !self.compatible(row, val) {
                continue;
            }
            visited[row] = true;
            let displaced = self.row_to_vec[row];
            let free = match displaced {
                None => true,
                Some(other) => {
                    self.row_to_vec[row] = None;
                    self.vec_to_row[other as usize] = None;
                    if self.augment(other, visited) {
                        true
                    } else {
                        self.row_to_vec[row] = Some(other);
                        self.vec_to_row[other as usize] = Some(row);
                        false
                    }
                }
            };
            if free {
                self.row_to_vec[row] = Some(val);
                self.vec_to_row[val as usize] = Some(row);
                return true;
            }
        }
        false
    }

    /// Every vector is matched to a distinct compatible row.
    pub fn is_valid_witness(&self) -> bool {
        let m = self.matrix.params().m();
        let mut used = vec![false; m];
        for (val, row) in self.vec_to_row.iter().enumerate() {
            match row {
                None => return false,
                Some(r) => {
                    if used[*r] || !self.compatible(*r, val as u32) {
                        return false;
                    }
                    used[*r] = true;
                }
            }
        }
        true
    }

    /// Applies one answer and repairs the matching with at most one
    /// augmenting-path search. `None` means the answer blocks the matrix.
    pub fn try_set_and_repair(&self, q: Query, b: u8) -> Result<Option<MatchingState>, GameError> {
        let mut next = self.clone();
        next.matrix.set_cell(q, b)?;
        let n = next.matrix.params().n();
        if let Some(val) = next.row_to_vec[q.row] {
            if BinaryVector::new(val, n).bit(q.col) != b {
                next.row_to_vec[q.row] = None;
                next.vec_to_row[val as usize] = None;
                let mut visited = vec![false; next.matrix.params().m()];
                if !next.augment(val, &mut visited) {
                    return Ok(None);
                }
            }
        }
        Ok(Some(next))
    }
}

/// Builds a saturating matching for `L`, or returns `None` if `L` is
/// blocked.
pub fn is_unblocked(l: &PartialMatrix) -> Result<Option<MatchingState>, GameError> {
    let params = l.params();
    params.require_enumerable("is_unblocked")?;
    let total = params.vector_count();
    if params.m() < total {
        return Ok(None);
    }
    let mut state = MatchingState {
        matrix: l.clone(),
        vec_to_row: vec![None; total],
        row_to_vec: vec![None; params.m()],
    };
    if l.total_queried() == 0 {
        // Trivial start for the all-unknown matrix: vector k to row k.
        for val in 0..total {
            state.vec_to_row[val] = Some(val);
            state.row_to_vec[val] = Some(val as u32);
        }
        return Ok(Some(state));
    }
    for val in 0..total as u32 {
        let mut visited = vec![false; params.m()];
        if !state.augment(val, &mut visited) {
            return Ok(None);
        }
    }
    Ok(Some(state))
}
