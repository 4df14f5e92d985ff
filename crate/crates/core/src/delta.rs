//! Sums of binary matroids through their cycle spaces.
//!
//! Two binary matroids living on globally labeled ground sets are combined
//! into one on the symmetric difference of the labels: the combined cycles are
//! the symmetric differences of pairs of cycles that agree on the overlap.
//! The result is handed back as a fresh vector matroid whose null space is
//! that combined cycle space.

use crate::error::Error;
use crate::gf::{Echelon, GfMatrix};
use crate::matroid::{Matroid, MatroidKind};
use crate::set::ItemSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumKind {
    One,
    Two,
    Three,
}

#[derive(Clone, Debug)]
pub struct DeltaSum {
    /// Binary vector matroid on the symmetric difference of the inputs.
    pub matroid: Matroid,
    /// Global labels of the result's elements, ascending; `ids[j]` labels
    /// column `j`.
    pub ids: Vec<usize>,
    pub kind: SumKind,
}

/// Combines two binary vector matroids whose columns carry global labels
/// (`ids1[j]` is the label of column `j` of `m1`). The overlap of the label
/// sets decides whether this is a 1-, 2-, or 3-sum; each variant's side
/// conditions are enforced, and overlap columns must match entry for entry.
pub fn delta_sum(
    m1: &Matroid,
    ids1: &[usize],
    m2: &Matroid,
    ids2: &[usize],
) -> Result<DeltaSum, Error> {
    let rep1 = binary_rep(m1, "first")?;
    let rep2 = binary_rep(m2, "second")?;
    check_labels(rep1, ids1, "first")?;
    check_labels(rep2, ids2, "second")?;

    let set1: std::collections::BTreeSet<usize> = ids1.iter().copied().collect();
    let set2: std::collections::BTreeSet<usize> = ids2.iter().copied().collect();
    let overlap: Vec<usize> = set1.intersection(&set2).copied().collect();
    let pos1: std::collections::HashMap<usize, usize> =
        ids1.iter().enumerate().map(|(j, &id)| (id, j)).collect();
    let pos2: std::collections::HashMap<usize, usize> =
        ids2.iter().enumerate().map(|(j, &id)| (id, j)).collect();

    let kind = match overlap.len() {
        0 => {
            if ids1.is_empty() || ids2.is_empty() {
                return Err(Error::precondition("1-sum requires both ground sets nonempty"));
            }
            SumKind::One
        }
        1 => {
            if ids1.len() < 3 || ids2.len() < 3 {
                return Err(Error::precondition(
                    "size bound: 2-sum requires at least 3 elements on each side",
                ));
            }
            let f = overlap[0];
            for (m, pos, side) in [(m1, &pos1, "first"), (m2, &pos2, "second")] {
                let e = pos[&f];
                if m.is_loop(e) {
                    return Err(Error::precondition(format!(
                        "2-sum overlap element {f} is a loop of the {side} matroid"
                    )));
                }
                if m.is_coloop(e) {
                    return Err(Error::precondition(format!(
                        "2-sum overlap element {f} is a coloop of the {side} matroid"
                    )));
                }
            }
            SumKind::Two
        }
        3 => {
            if ids1.len() < 7 || ids2.len() < 7 {
                return Err(Error::precondition(
                    "size bound: 3-sum requires at least 7 elements on each side",
                ));
            }
            for (m, pos, side) in [(m1, &pos1, "first"), (m2, &pos2, "second")] {
                let t: ItemSet = overlap.iter().map(|id| pos[id]).collect();
                if !m.is_circuit(&t) {
                    return Err(Error::precondition(format!(
                        "3-sum overlap is not a circuit of the {side} matroid"
                    )));
                }
                if !m.dual().is_independent(&t) {
                    return Err(Error::precondition(format!(
                        "3-sum overlap contains a cocircuit of the {side} matroid"
                    )));
                }
            }
            SumKind::Three
        }
        k => {
            return Err(Error::precondition(format!(
                "overlap must have 0, 1, or 3 elements, found {k}"
            )))
        }
    };

    // Alignment rule: overlap columns must be identical in both matrices.
    for &f in &overlap {
        let c1 = rep1.column(pos1[&f]);
        let c2 = rep2.column(pos2[&f]);
        if c1 != c2 {
            return Err(Error::input(format!(
                "overlap column {f} differs between the matrices ({c1:?} vs {c2:?}); \
                 align the representations first"
            )));
        }
    }

    // Cycle spaces of both sides, as F_2 vectors over their local columns.
    let z1 = rep1.null_space();
    let z2 = rep2.null_space();

    // A combined cycle is C1 △ C2 with C1, C2 agreeing on the overlap; over
    // F_2 that is the kernel of the map (C1, C2) ↦ (C1 + C2) restricted to it.
    let mut agree = GfMatrix::zero(2, overlap.len(), z1.len() + z2.len());
    for (j, c) in z1.iter().enumerate() {
        for (r, f) in overlap.iter().enumerate() {
            agree.set(r, j, c[pos1[f]]);
        }
    }
    for (j, c) in z2.iter().enumerate() {
        for (r, f) in overlap.iter().enumerate() {
            agree.set(r, z1.len() + j, c[pos2[f]]);
        }
    }
    let kernel = agree.null_space();

    let ids: Vec<usize> = set1.symmetric_difference(&set2).copied().collect();
    let slot: std::collections::HashMap<usize, usize> =
        ids.iter().enumerate().map(|(j, &id)| (id, j)).collect();

    // Project each kernel combination down to the surviving labels.
    let mut cycles = Echelon::new(2, ids.len());
    let mut cycle_rows = Vec::new();
    for coeffs in &kernel {
        let mut v = vec![0u32; ids.len()];
        for (j, c) in z1.iter().enumerate() {
            if coeffs[j] == 1 {
                for (local, &id) in ids1.iter().enumerate() {
                    if let Some(&s) = slot.get(&id) {
                        v[s] ^= c[local];
                    }
                }
            }
        }
        for (j, c) in z2.iter().enumerate() {
            if coeffs[z1.len() + j] == 1 {
                for (local, &id) in ids2.iter().enumerate() {
                    if let Some(&s) = slot.get(&id) {
                        v[s] ^= c[local];
                    }
                }
            }
        }
        if cycles.try_add(&v) {
            cycle_rows.push(v);
        }
    }

    // A representation of the sum is any matrix whose null space equals the
    // combined cycle space: take the orthogonal complement of the cycle rows.
    let mut cyc = GfMatrix::zero(2, cycle_rows.len(), ids.len());
    for (r, v) in cycle_rows.iter().enumerate() {
        for (c, &x) in v.iter().enumerate() {
            cyc.set(r, c, x);
        }
    }
    let rep_rows = cyc.null_space();
    let mut rep = GfMatrix::zero(2, rep_rows.len(), ids.len());
    for (r, v) in rep_rows.iter().enumerate() {
        for (c, &x) in v.iter().enumerate() {
            rep.set(r, c, x);
        }
    }
    Ok(DeltaSum { matroid: Matroid::vector(rep), ids, kind })
}

fn binary_rep<'a>(m: &'a Matroid, side: &str) -> Result<&'a GfMatrix, Error> {
    if m.kind() != MatroidKind::Vector {
        return Err(Error::input(format!("{side} matroid must be a vector matroid")));
    }
    let rep = m.representation().unwrap();
    if rep.p() != 2 {
        return Err(Error::input(format!(
            "{side} matroid must be binary, its field has order {}",
            rep.p()
        )));
    }
    Ok(rep)
}

fn check_labels(rep: &GfMatrix, ids: &[usize], side: &str) -> Result<(), Error> {
    if ids.len() != rep.cols() {
        return Err(Error::input(format!(
            "{side} matroid has {} columns but {} labels",
            rep.cols(),
            ids.len()
        )));
    }
    let uniq: std::collections::HashSet<_> = ids.iter().collect();
    if uniq.len() != ids.len() {
        return Err(Error::input(format!("{side} matroid has duplicate labels")));
    }
    Ok(())
}

/// Rewrites a vector matroid by an invertible change of row coordinates so
/// that column `positions[j]` becomes exactly `targets[j]`. Fails when no such
/// rank-preserving map exists (the targets satisfy different linear relations
/// than the sources, or their ambient dimension is too small).
pub fn align_columns(
    m: &Matroid,
    positions: &[usize],
    targets: &[Vec<u32>],
) -> Result<Matroid, Error> {
    let rep = match m.kind() {
        MatroidKind::Vector => m.representation().unwrap(),
        _ => return Err(Error::input("alignment needs a vector matroid")),
    };
    if positions.len() != targets.len() {
        return Err(Error::input("one target per aligned column"));
    }
    if positions.iter().any(|&c| c >= rep.cols()) {
        return Err(Error::input("aligned column out of range"));
    }
    let p = rep.p();
    let target_dim = targets.first().map_or(rep.rows(), Vec::len);
    if targets.iter().any(|t| t.len() != target_dim) {
        return Err(Error::input("targets must share one dimension"));
    }
    if targets.iter().flatten().any(|&x| x >= p) {
        return Err(Error::input("target entries must be reduced mod p"));
    }

    // Compress the representation to its rank: express every column in the
    // coordinates of a column basis.
    let d = rep.rows();
    let mut ech = Echelon::new(p, d);
    let mut col_basis = Vec::new();
    for c in 0..rep.cols() {
        let col = rep.column(c);
        if ech.try_add(&col) {
            col_basis.push(col);
        }
    }
    let r = col_basis.len();
    let mut full = col_basis.clone();
    for i in 0..d {
        let mut e_i = vec![0u32; d];
        e_i[i] = 1;
        if ech.try_add(&e_i) {
            full.push(e_i);
        }
    }
    let to_coords = GfMatrix::from_columns(p, &full)?.invert().expect("completed basis");
    let compressed: Vec<Vec<u32>> =
        (0..rep.cols()).map(|c| to_coords.apply(&rep.column(c))[..r].to_vec()).collect();

    // The map is pinned on the aligned columns; make sure that is consistent
    // and injective, then extend it to all of F_p^r.
    let mut dom = Echelon::new(p, r);
    let mut dom_basis = Vec::new();
    let mut img_basis = Vec::new();
    let mut img = Echelon::new(p, target_dim);
    for (&pos, t) in positions.iter().zip(targets) {
        let src = compressed[pos].clone();
        if dom.try_add(&src) {
            if !img.try_add(t) {
                return Err(Error::input(
                    "targets are dependent where the source columns are independent",
                ));
            }
            dom_basis.push(src);
            img_basis.push(t.clone());
        } else {
            // src is spanned: its target must satisfy the same combination.
            let basis_mat = GfMatrix::from_columns(p, &dom_basis)?;
            let coeffs = basis_mat.solve(&src).expect("in span by construction");
            let mut expect = vec![0u32; target_dim];
            for (k, &a) in coeffs.iter().enumerate() {
                for (slot, &x) in expect.iter_mut().zip(&img_basis[k]) {
                    *slot = ((*slot as u64 + a as u64 * x as u64) % p as u64) as u32;
                }
            }
            if &expect != t {
                return Err(Error::input(
                    "targets satisfy different linear relations than the source columns",
                ));
            }
        }
    }
    for i in 0..r {
        let mut e_i = vec![0u32; r];
        e_i[i] = 1;
        if dom.try_add(&e_i) {
            // Pick any target-space vector keeping the map injective.
            let ext = (0..target_dim).find_map(|j| {
                let mut cand = vec![0u32; target_dim];
                cand[j] = 1;
                img.try_add(&cand).then_some(cand)
            });
            let Some(ext) = ext else {
                return Err(Error::input(format!(
                    "target dimension {target_dim} is too small for a rank-{r} matroid"
                )));
            };
            dom_basis.push(e_i);
            img_basis.push(ext);
        }
    }

    let from_dom = GfMatrix::from_columns(p, &dom_basis)?.invert().expect("spans F_p^r");
    let to_img = GfMatrix::from_columns(p, &img_basis)?;
    let new_cols: Vec<Vec<u32>> =
        compressed.iter().map(|c| to_img.apply(&from_dom.apply(c))).collect();
    let out = Matroid::vector_from_columns(p, &new_cols)?;
    debug_assert_eq!(out.rank(), m.rank());
    Ok(out)
}
