//! The exterior algebra of the group algebra, with the skew derivations
//! attached to characters.
//!
//! The module underlying everything is the group algebra with one basis
//! vector per group element. Each character chi induces a skew derivation
//! that strikes basis factors out of a wedge, weighting the i-th factor
//! by (-1)^(i+1) chi(g_i). Composing k such derivations collapses a
//! k-fold wedge to (-1)^(k(k-1)/2) times a determinant of character
//! values, which is what turns nonvanishing determinants and permanents
//! into distinct-product witnesses: the permutation sum of product
//! wedges evaluates to det times per, so a nonzero value forces some
//! individual wedge, hence some set of k products, to consist of
//! distinct elements.
//!
//! Everything here is computed formally over the exact backend; the
//! identities serve as machine-checked certificates for individual
//! instances.

use std::collections::BTreeMap;

use crate::caps::Caps;
use crate::chars::Character;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::perm::Permutation;
use crate::rings::backend::{Backend, RingValue};

/// Wedge-product context: a group, a fixed basis order for its algebra,
/// and the coefficient backend.
#[derive(Debug, Clone)]
pub struct ExteriorAlgebra {
    group: GroupSpec,
    backend: Backend,
    basis: Vec<GroupElement>,
}

/// An element of the exterior algebra: strictly increasing basis-index
/// blades mapped to nonzero coefficients. The empty blade is the scalar
/// part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiVector {
    terms: BTreeMap<Vec<u32>, RingValue>,
}

impl MultiVector {
    pub fn zero() -> Self {
        MultiVector {
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &RingValue)> {
        self.terms.iter().map(|(b, c)| (b.as_slice(), c))
    }

    pub fn coefficient(&self, blade: &[u32]) -> Option<&RingValue> {
        self.terms.get(blade)
    }

    /// The grade-0 coefficient, if the vector is a pure scalar.
    pub fn scalar_part(&self) -> Option<&RingValue> {
        self.terms.get(&Vec::new())
    }

    /// Largest grade present (None when zero).
    pub fn top_grade(&self) -> Option<usize> {
        self.terms.keys().map(|b| b.len()).max()
    }

    fn insert(&mut self, blade: Vec<u32>, coeff: RingValue) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(blade) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiVector) -> MultiVector {
        let mut out = self.clone();
        for (blade, coeff) in &other.terms {
            out.insert(blade.clone(), coeff.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiVector {
        MultiVector {
            terms: self
                .terms
                .iter()
                .map(|(b, c)| (b.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &MultiVector) -> MultiVector {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &RingValue) -> MultiVector {
        let mut out = MultiVector::zero();
        for (blade, coeff) in &self.terms {
            out.insert(blade.clone(), coeff.mul(factor));
        }
        out
    }
}

/// Merges two strictly increasing blades, returning the concatenation
/// sign, or None when an index repeats (the wedge vanishes).
fn merge_blades(x: &[u32], y: &[u32]) -> Option<(Vec<u32>, i32)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let mut inversions = 0usize;
    let mut i = 0;
    let mut j = 0;
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Equal => return None,
            std::cmp::Ordering::Less => {
                out.push(x[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                // y[j] crosses every remaining x factor.
                inversions += x.len() - i;
                out.push(y[j]);
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    let sign = if inversions % 2 == 0 { 1 } else { -1 };
    Some((out, sign))
}

impl ExteriorAlgebra {
    pub fn new(group: &GroupSpec, backend: &Backend, caps: &Caps) -> Result<Self> {
        if !backend.contains_order(group.exponent()) {
            return Err(Error::Backend(format!(
                "backend level {} has no root of order {}",
                backend.level(),
                group.exponent()
            )));
        }
        let basis = group.enumerate(caps)?;
        Ok(ExteriorAlgebra {
            group: group.clone(),
            backend: backend.clone(),
            basis,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn basis_element(&self, index: u32) -> &GroupElement {
        &self.basis[index as usize]
    }

    pub fn scalar(&self, value: RingValue) -> MultiVector {
        let mut out = MultiVector::zero();
        out.insert(Vec::new(), value);
        out
    }

    pub fn basis_vector(&self, g: &GroupElement) -> Result<MultiVector> {
        let idx = self.group.index_of(g)? as u32;
        let mut out = MultiVector::zero();
        out.insert(vec![idx], self.backend.one());
        Ok(out)
    }

    pub fn wedge(&self, a: &MultiVector, b: &MultiVector) -> MultiVector {
        let mut out = MultiVector::zero();
        for (bx, cx) in &a.terms {
            for (by, cy) in &b.terms {
                if let Some((blade, sign)) = merge_blades(bx, by) {
                    let mut coeff = cx.mul(cy);
                    if sign < 0 {
                        coeff = coeff.neg();
                    }
                    out.insert(blade, coeff);
                }
            }
        }
        out
    }

    /// The skew derivation attached to chi: on a blade g_1 < ... < g_n it
    /// yields sum_i (-1)^(i+1) chi(g_i) (blade without g_i); scalars map
    /// to zero.
    pub fn delta(&self, chi: &Character, v: &MultiVector) -> Result<MultiVector> {
        if *chi.group() != self.group {
            return Err(Error::Domain("character is for a different group".into()));
        }
        let mut out = MultiVector::zero();
        for (blade, coeff) in &v.terms {
            for (i, &idx) in blade.iter().enumerate() {
                let value = chi.eval(&self.basis[idx as usize], &self.backend)?;
                let mut term = coeff.mul(&value);
                if i % 2 == 1 {
                    term = term.neg();
                }
                let mut rest = blade.clone();
                rest.remove(i);
                out.insert(rest, term);
            }
        }
        Ok(out)
    }

    /// Delta_{chi_1} after ... after Delta_{chi_k}: the rightmost
    /// character acts first, matching composition order.
    pub fn compose_delta(&self, chars: &[Character], v: &MultiVector) -> Result<MultiVector> {
        let mut cur = v.clone();
        for chi in chars.iter().rev() {
            cur = self.delta(chi, &cur)?;
        }
        Ok(cur)
    }

    /// The wedge of the k products a_i b_{pi(i)}, in row order. Vanishes
    /// exactly when two products coincide.
    pub fn product_wedge(
        &self,
        a: &[GroupElement],
        b: &[GroupElement],
        pi: &Permutation,
    ) -> Result<MultiVector> {
        if a.len() != b.len() || pi.len() != a.len() {
            return Err(Error::Domain(
                "sets and permutation must have equal length".into(),
            ));
        }
        let mut acc = self.scalar(self.backend.one());
        for i in 0..a.len() {
            let prod = self.group.mul(&a[i], &b[pi.apply(i)])?;
            acc = self.wedge(&acc, &self.basis_vector(&prod)?);
        }
        Ok(acc)
    }

    /// Sum of product wedges over all permutations of S_k.
    pub fn permutation_sum(&self, a: &[GroupElement], b: &[GroupElement]) -> Result<MultiVector> {
        let mut total = MultiVector::zero();
        for pi in Permutation::all(a.len()) {
            total = total.add(&self.product_wedge(a, b, &pi)?);
        }
        Ok(total)
    }

    /// The signed wedge for one tuple of permutations: rows[0] is indexed
    /// identically, row i > 0 through pis[i-1], and the coefficient is
    /// the product of the permutation signs.
    pub fn multi_product_wedge(
        &self,
        rows: &[Vec<GroupElement>],
        pis: &[Permutation],
    ) -> Result<MultiVector> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Domain("need at least one row of elements".into()));
        }
        let k = rows[0].len();
        if rows.iter().any(|r| r.len() != k) || pis.len() != m - 1 {
            return Err(Error::Domain(
                "rows must share a length and permutations must number one less".into(),
            ));
        }
        let mut sign = 1i32;
        for pi in pis {
            sign *= pi.sign();
        }
        let mut acc = self.scalar(if sign < 0 {
            self.backend.one().neg()
        } else {
            self.backend.one()
        });
        for j in 0..k {
            let mut prod = rows[0][j].clone();
            for (i, pi) in pis.iter().enumerate() {
                prod = self.group.mul(&prod, &rows[i + 1][pi.apply(j)])?;
            }
            acc = self.wedge(&acc, &self.basis_vector(&prod)?);
        }
        Ok(acc)
    }

    /// Sum of signed wedges over all (k!)^(m-1) permutation tuples.
    pub fn multi_permutation_sum(
        &self,
        rows: &[Vec<GroupElement>],
        caps: &Caps,
    ) -> Result<MultiVector> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Domain("need at least one row of elements".into()));
        }
        let k = rows[0].len();
        let mut factorial: u128 = 1;
        for i in 2..=k as u128 {
            factorial *= i;
        }
        let tuples = factorial.checked_pow((m - 1) as u32).ok_or_else(|| {
            Error::CapExceeded("permutation tuple count overflows".into())
        })?;
        if tuples > u128::from(caps.exhaustive_tuples) {
            return Err(Error::CapExceeded(format!(
                "{tuples} permutation tuples exceed the cap {}",
                caps.exhaustive_tuples
            )));
        }
        let perms = Permutation::all(k);
        let mut indices = vec![0usize; m - 1];
        let mut total = MultiVector::zero();
        loop {
            let pis: Vec<Permutation> = indices.iter().map(|&i| perms[i].clone()).collect();
            total = total.add(&self.multi_product_wedge(rows, &pis)?);
            // Odometer over tuple indices, last position fastest.
            let mut pos = m - 1;
            loop {
                if pos == 0 {
                    return Ok(total);
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
}
