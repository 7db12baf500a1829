//! Brute-force witness searches over permutations.

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::perm::Permutation;

/// Hard bound on backtracking depth. Beyond this the product grids and the
/// k! fallback cost stop being desk-scale regardless of configured caps.
pub const MAX_WITNESS_K: usize = 10;

/// The permuted products a_j * b_{pi(j)}.
pub fn permuted_products(
    group: &GroupSpec,
    a: &[GroupElement],
    b: &[GroupElement],
    pi: &Permutation,
) -> Result<Vec<GroupElement>> {
    if a.len() != b.len() || pi.len() != a.len() {
        return Err(Error::Domain(format!(
            "tuple lengths {} and {} and permutation length {} disagree",
            a.len(),
            b.len(),
            pi.len()
        )));
    }
    (0..a.len())
        .map(|j| group.mul(&a[j], &b[pi.apply(j)]))
        .collect()
}

/// Whether all elements are pairwise distinct, by canonical index.
pub fn all_distinct(group: &GroupSpec, elems: &[GroupElement]) -> Result<bool> {
    let mut seen = Vec::with_capacity(elems.len());
    for g in elems {
        let idx = group.index_of(g)?;
        if seen.contains(&idx) {
            return Ok(false);
        }
        seen.push(idx);
    }
    Ok(true)
}

/// Finds the lexicographically least permutation pi (by image vector) with
/// all products a_j * b_{pi(j)} pairwise distinct, or None when no such
/// permutation exists. Backtracking over columns keeps the full k! sweep as
/// a worst case only.
pub fn find_distinct_permutation(
    group: &GroupSpec,
    a: &[GroupElement],
    b: &[GroupElement],
) -> Result<Option<Permutation>> {
    let k = a.len();
    if k == 0 || b.len() != k {
        return Err(Error::Domain(format!(
            "need equal nonempty tuples, got lengths {} and {}",
            k,
            b.len()
        )));
    }
    if k > MAX_WITNESS_K {
        return Err(Error::CapExceeded(format!(
            "witness search supports k <= {MAX_WITNESS_K}, got {k}"
        )));
    }
    let mut grid = vec![vec![0u64; k]; k];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            grid[i][j] = group.index_of(&group.mul(ai, bj)?)?;
        }
    }
    let mut images = Vec::with_capacity(k);
    let mut used = vec![false; k];
    let mut chosen: Vec<u64> = Vec::with_capacity(k);
    if backtrack(&grid, &mut images, &mut used, &mut chosen) {
        Ok(Some(Permutation::from_images(images)?))
    } else {
        Ok(None)
    }
}

fn backtrack(
    grid: &[Vec<u64>],
    images: &mut Vec<usize>,
    used: &mut [bool],
    chosen: &mut Vec<u64>,
) -> bool {
    let k = grid.len();
    let i = images.len();
    if i == k {
        return true;
    }
    for j in 0..k {
        if used[j] {
            continue;
        }
        let p = grid[i][j];
        if chosen.contains(&p) {
            continue;
        }
        used[j] = true;
        images.push(j);
        chosen.push(p);
        if backtrack(grid, images, used, chosen) {
            return true;
        }
        used[j] = false;
        images.pop();
        chosen.pop();
    }
    false
}

/// Multi-row variant: rows[0] stays in place and permutations pi_2..pi_m are
/// sought so that the m-fold products prod_i rows_i[pi_i(j)] are pairwise
/// distinct. Returns the lexicographically least tuple of permutations, or
/// None after an exhaustive sweep of all (k!)^(m-1) assignments.
pub fn multi_distinct_permutations(
    group: &GroupSpec,
    rows: &[Vec<GroupElement>],
    caps: &Caps,
) -> Result<Option<Vec<Permutation>>> {
    let m = rows.len();
    if m == 0 {
        return Err(Error::Domain("need at least one row".into()));
    }
    let k = rows[0].len();
    if k == 0 || rows.iter().any(|r| r.len() != k) {
        return Err(Error::Domain(
            "rows must share one nonzero length".to_string(),
        ));
    }
    if k > MAX_WITNESS_K {
        return Err(Error::CapExceeded(format!(
            "witness search supports k <= {MAX_WITNESS_K}, got {k}"
        )));
    }
    let perms = Permutation::all(k);
    let mut total: u64 = 1;
    for _ in 1..m {
        total = total
            .checked_mul(perms.len() as u64)
            .filter(|&t| t <= caps.exhaustive_tuples)
            .ok_or_else(|| {
                Error::CapExceeded(format!(
                    "multi-permutation sweep needs more than {} assignments",
                    caps.exhaustive_tuples
                ))
            })?;
    }
    // Odometer over (pi_2..pi_m), last index fastest, which walks the
    // assignments in lexicographic order.
    let mut indices = vec![0usize; m - 1];
    loop {
        let mut products = Vec::with_capacity(k);
        for j in 0..k {
            let mut acc = rows[0][j].clone();
            for (r, &pi) in indices.iter().enumerate() {
                acc = group.mul(&acc, &rows[r + 1][perms[pi].apply(j)])?;
            }
            products.push(acc);
        }
        if all_distinct(group, &products)? {
            let tuple = indices.iter().map(|&pi| perms[pi].clone()).collect();
            return Ok(Some(tuple));
        }
        let mut pos = indices.len();
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < perms.len() {
                break;
            }
            indices[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn lexicographically_least_witness() {
        // Frozen: in c5 with A = B = (0),(1),(2) the identity already works
        // since j + j covers 0, 2, 4.
        let group = GroupSpec::parse("c5").unwrap();
        let a: Vec<_> = (0..3).map(|r| group.element(vec![r]).unwrap()).collect();
        let pi = find_distinct_permutation(&group, &a, &a).unwrap().unwrap();
        assert_eq!(pi.images(), &[0, 1, 2]);

        // Frozen: in c4 with A = B = (0),(2) the identity gives 0, 4 = 0 so
        // the swap is the least witness: products 2, 2 fail too. No witness.
        let c4 = GroupSpec::parse("c4").unwrap();
        let pair: Vec<_> = [0u64, 2]
            .iter()
            .map(|&r| c4.element(vec![r]).unwrap())
            .collect();
        assert_eq!(find_distinct_permutation(&c4, &pair, &pair).unwrap(), None);
    }

    #[test]
    fn witness_products_are_distinct() {
        // Oracle: whenever a witness is returned its products check out, and
        // whenever none is returned the direct k! sweep agrees.
        let group = GroupSpec::parse("c2xc4").unwrap();
        let elems = group.enumerate(&caps()).unwrap();
        for (s, t) in [(0usize, 1usize), (1, 3), (2, 5)] {
            let a = vec![elems[s].clone(), elems[t].clone(), elems[7].clone()];
            let b = vec![elems[1].clone(), elems[1].clone(), elems[4].clone()];
            let found = find_distinct_permutation(&group, &a, &b).unwrap();
            let direct = Permutation::all(3).into_iter().find(|pi| {
                let prods = permuted_products(&group, &a, &b, pi).unwrap();
                all_distinct(&group, &prods).unwrap()
            });
            match (found, direct) {
                (Some(pi), Some(first)) => {
                    assert_eq!(pi, first);
                    let prods = permuted_products(&group, &a, &b, &pi).unwrap();
                    assert!(all_distinct(&group, &prods).unwrap());
                }
                (None, None) => {}
                (got, want) => panic!("mismatch: {got:?} vs {want:?}"),
            }
        }
    }

    #[test]
    fn multi_row_search_matches_direct_enumeration() {
        let group = GroupSpec::parse("c7").unwrap();
        let row = |rs: &[u64]| -> Vec<GroupElement> {
            rs.iter()
                .map(|&r| group.element(vec![r]).unwrap())
                .collect()
        };
        let rows = vec![row(&[0, 1]), row(&[0, 3]), row(&[0, 2])];
        let found = multi_distinct_permutations(&group, &rows, &caps())
            .unwrap()
            .unwrap();
        assert_eq!(found.len(), 2);
        // The first assignment (identity, identity) gives products 0, 6:
        // distinct, so it must be the one returned.
        assert_eq!(found[0].images(), &[0, 1]);
        assert_eq!(found[1].images(), &[0, 1]);

        // Single-row instances need only the row itself to be distinct.
        let single = multi_distinct_permutations(&group, &rows[..1], &caps()).unwrap();
        assert_eq!(single, Some(vec![]));
        let repeated = vec![row(&[0, 0])];
        assert_eq!(
            multi_distinct_permutations(&group, &repeated, &caps()).unwrap(),
            None
        );
    }

    #[test]
    fn caps_and_shapes_are_enforced() {
        let group = GroupSpec::parse("c3").unwrap();
        let e = group.identity();
        assert!(find_distinct_permutation(&group, &[], &[]).is_err());
        assert!(find_distinct_permutation(&group, &[e.clone()], &[]).is_err());
        let big = vec![e.clone(); MAX_WITNESS_K + 1];
        assert!(matches!(
            find_distinct_permutation(&group, &big, &big),
            Err(Error::CapExceeded(_))
        ));
        let mut tight = caps();
        tight.exhaustive_tuples = 5;
        let rows = vec![vec![e.clone(), e.clone()]; 3];
        // (2!)^2 = 4 fits, (2!)^3 = 8 does not.
        assert!(multi_distinct_permutations(&group, &rows, &tight).is_ok());
        let rows4 = vec![rows[0].clone(); 4];
        assert!(matches!(
            multi_distinct_permutations(&group, &rows4, &tight),
            Err(Error::CapExceeded(_))
        ));
    }
}
