//! Partitioning a matroid's ground set into few independent sets.
//!
//! Augmenting-path matroid union: elements are inserted one at a time, and
//! when no part can take an element directly we search for a chain of swaps
//! (shortest first, which keeps the composite exchange valid). Loops can
//! never be covered and are reported separately.

use crate::error::Error;
use crate::matroid::Matroid;
use crate::set::ItemSet;
use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct Partition {
    /// `k` pairwise disjoint independent sets covering every non-loop element.
    pub parts: Vec<ItemSet>,
    /// Loops, which no independent set can contain.
    pub uncoverable: ItemSet,
}

#[derive(Clone, Debug)]
pub enum PartitionOutcome {
    Feasible(Partition),
    /// No cover by `k` independent sets exists. When the ground set is small
    /// enough to sweep, `witness` is a set with |S| > k·r(S).
    Infeasible { witness: Option<ItemSet> },
}

const WITNESS_SWEEP_LIMIT: usize = 16;

/// Tries to split the non-loop elements of `m` into `k` independent sets.
pub fn partition_into(m: &Matroid, k: usize) -> Result<PartitionOutcome, Error> {
    if k == 0 {
        return Err(Error::input("cannot partition into zero parts"));
    }
    let loops = m.loops();
    let mut parts = vec![ItemSet::new(); k];
    let mut part_of: Vec<Option<usize>> = vec![None; m.size()];
    for x in 0..m.size() {
        if loops.contains(x) {
            continue;
        }
        if !augment(m, x, &mut parts, &mut part_of) {
            let witness = density_witness(m, k);
            return Ok(PartitionOutcome::Infeasible { witness });
        }
        // The swap chain is validated wholesale: every part must still be
        // independent and the placement table consistent.
        for (j, part) in parts.iter().enumerate() {
            assert!(m.is_independent(part), "part {j} lost independence after augmenting");
            assert!(part.iter().all(|e| part_of[e] == Some(j)));
        }
    }
    Ok(PartitionOutcome::Feasible(Partition { parts, uncoverable: loops }))
}

/// Breadth-first search for a swap chain that makes room for `x`.
fn augment(
    m: &Matroid,
    x: usize,
    parts: &mut [ItemSet],
    part_of: &mut [Option<usize>],
) -> bool {
    let mut pusher: Vec<Option<usize>> = vec![None; part_of.len()];
    let mut seen = vec![false; part_of.len()];
    seen[x] = true;
    let mut queue = VecDeque::from([x]);
    while let Some(y) = queue.pop_front() {
        // Direct insertion into a part that still has room for y.
        for (j, part) in parts.iter().enumerate() {
            if part_of[y] == Some(j) {
                continue;
            }
            let mut grown = part.clone();
            grown.insert(y);
            if m.is_independent(&grown) {
                apply_chain(y, j, x, &pusher, parts, part_of);
                return true;
            }
        }
        // Otherwise y may evict someone: y joins part(z), z re-enters the queue.
        for (j, part) in parts.iter().enumerate() {
            if part_of[y] == Some(j) {
                continue;
            }
            for z in part.iter() {
                if seen[z] {
                    continue;
                }
                let mut swapped = part.clone();
                swapped.remove(z);
                swapped.insert(y);
                if m.is_independent(&swapped) {
                    seen[z] = true;
                    pusher[z] = Some(y);
                    queue.push_back(z);
                }
            }
        }
    }
    false
}

/// Replays the chain ending at `last`, which enters `free_part` directly; each
/// pusher then takes the slot its victim vacated, until `x` is placed.
fn apply_chain(
    last: usize,
    free_part: usize,
    x: usize,
    pusher: &[Option<usize>],
    parts: &mut [ItemSet],
    part_of: &mut [Option<usize>],
) {
    let mut cur = last;
    let mut dest = free_part;
    loop {
        let vacated = part_of[cur];
        if let Some(j) = vacated {
            parts[j].remove(cur);
        }
        parts[dest].insert(cur);
        part_of[cur] = Some(dest);
        if cur == x {
            return;
        }
        dest = vacated.expect("only the new element starts unplaced");
        cur = pusher[cur].expect("chain is connected back to the new element");
    }
}

/// Searches exhaustively for a set with |S| > k·r(S) among the non-loop
/// elements, the certificate that no k-part cover exists. Returns None when
/// the ground set is too large to sweep.
pub fn density_witness(m: &Matroid, k: usize) -> Option<ItemSet> {
    let candidates: Vec<usize> = (0..m.size()).filter(|&e| !m.is_loop(e)).collect();
    if candidates.len() > WITNESS_SWEEP_LIMIT {
        return None;
    }
    let mut best: Option<(isize, ItemSet)> = None;
    for mask in 1u64..(1 << candidates.len()) {
        let s: ItemSet = (0..candidates.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| candidates[i])
            .collect();
        let gap = s.len() as isize - (k * m.rank_set(&s)) as isize;
        if gap > 0 && best.as_ref().is_none_or(|(b, _)| gap > *b) {
            best = Some((gap, s));
        }
    }
    best.map(|(_, s)| s)
}
