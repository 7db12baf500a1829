//! Characters of finite abelian groups and square matrices of character
//! values, with division-free determinants and permanents.
//!
//! A character is labeled by a vector u with u_i ranging over Z_{n_i};
//! its value on g is the root of unity with exponent
//! sum_i u_i g_i (L / n_i) mod L, where L is the group exponent. The
//! pairing is symmetric in u and g, and labels under componentwise
//! addition reproduce the dual group.
//!
//! Matrices store only root exponents. The determinant uses a dynamic
//! program over column subsets (no division, no sign cancellation bugs at
//! the ring level), the permanent uses inclusion-exclusion over column
//! subsets with Gray-code row-sum updates. On the cyclotomic backend both
//! kernels accumulate in the group ring Z[x]/(x^L - 1), where scaling by
//! a root of unity is a cyclic shift, and reduce modulo the cyclotomic
//! polynomial once at the end. Naive expansions over the permutation
//! group are kept as independent oracles.

use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::perm::Permutation;
use crate::rings::backend::{Backend, RingValue};
use crate::rings::cyclotomic::CycAccum;

/// A character of a finite abelian group, identified by its label vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    group: GroupSpec,
    label: Vec<u64>,
}

impl Character {
    pub fn new(group: &GroupSpec, label: Vec<u64>) -> Result<Self> {
        if label.len() != group.rank() {
            return Err(Error::Domain(format!(
                "character label has {} entries, group has rank {}",
                label.len(),
                group.rank()
            )));
        }
        for (&u, &n) in label.iter().zip(group.factor_orders()) {
            if u >= n {
                return Err(Error::Domain(format!(
                    "label entry {u} out of range for factor of order {n}"
                )));
            }
        }
        Ok(Character {
            group: group.clone(),
            label,
        })
    }

    pub fn trivial(group: &GroupSpec) -> Self {
        Character {
            group: group.clone(),
            label: vec![0; group.rank()],
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn label(&self) -> &[u64] {
        &self.label
    }

    /// The exponent t with chi(g) = zeta_L^t, L the group exponent.
    pub fn eval_exponent(&self, g: &GroupElement) -> Result<u64> {
        let l = self.group.exponent();
        let mut t: u128 = 0;
        for ((&u, &gi), &n) in self
            .label
            .iter()
            .zip(g.residues())
            .zip(self.group.factor_orders())
        {
            if gi >= n {
                return Err(Error::Domain(format!(
                    "element residue {gi} out of range for factor of order {n}"
                )));
            }
            t += u128::from(u) * u128::from(gi) * u128::from(l / n);
        }
        Ok((t % u128::from(l)) as u64)
    }

    pub fn eval(&self, g: &GroupElement, backend: &Backend) -> Result<RingValue> {
        backend.root_of_order(self.group.exponent(), self.eval_exponent(g)?)
    }

    /// The order of the character in the dual group.
    pub fn order(&self) -> u64 {
        // The dual is isomorphic to the group via labels, so the label
        // vector's order as a group element is the character's order.
        let elem = self
            .group
            .element(self.label.clone())
            .expect("label validated at construction");
        self.group
            .element_order(&elem)
            .expect("order of valid element")
    }

    /// Pointwise product of characters is label addition.
    pub fn mul(&self, other: &Character) -> Result<Character> {
        if self.group != other.group {
            return Err(Error::Domain("characters live on different groups".into()));
        }
        let sum = self
            .group
            .mul(
                &self.group.element(self.label.clone())?,
                &self.group.element(other.label.clone())?,
            )?
            .residues()
            .to_vec();
        Character::new(&self.group, sum)
    }

    pub fn pow(&self, e: u64) -> Character {
        let base = self
            .group
            .element(self.label.clone())
            .expect("label validated at construction");
        // chi^L is trivial for L the group exponent, so reduce first.
        let powered = self
            .group
            .pow(&base, (e % self.group.exponent()) as i64)
            .expect("power of valid element stays valid");
        Character {
            group: self.group.clone(),
            label: powered.residues().to_vec(),
        }
    }
}

impl std::fmt::Display for Character {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let labels: Vec<String> = self.label.iter().map(|u| u.to_string()).collect();
        write!(f, "chi({})", labels.join(","))
    }
}

/// A structured family of characters: label vectors whose i-th entry runs
/// over the multiples of steps_i, giving counts_i = n_i / steps_i choices.
///
/// With steps all 1 this is the full dual group. With steps_i = n_i / m_i
/// it is the annihilator of the subgroup of elements whose components are
/// multiples of m_i, a dual copy of the order-prod(m_i) quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterSet {
    group: GroupSpec,
    steps: Vec<u64>,
    counts: Vec<u64>,
}

impl CharacterSet {
    pub fn full(group: &GroupSpec) -> Self {
        CharacterSet {
            group: group.clone(),
            steps: vec![1; group.rank()],
            counts: group.factor_orders().to_vec(),
        }
    }

    pub fn with_steps(group: &GroupSpec, steps: Vec<u64>) -> Result<Self> {
        if steps.len() != group.rank() {
            return Err(Error::Domain(format!(
                "step vector has {} entries, group has rank {}",
                steps.len(),
                group.rank()
            )));
        }
        let mut counts = Vec::with_capacity(steps.len());
        for (&s, &n) in steps.iter().zip(group.factor_orders()) {
            if s == 0 || n % s != 0 {
                return Err(Error::Domain(format!(
                    "step {s} does not divide factor order {n}"
                )));
            }
            counts.push(n / s);
        }
        Ok(CharacterSet {
            group: group.clone(),
            steps,
            counts,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn size(&self) -> u64 {
        self.counts.iter().product()
    }

    /// The least common multiple of the coordinate counts: the exponent
    /// of the subgroup of characters this set forms.
    pub fn exponent(&self) -> u64 {
        self.counts
            .iter()
            .fold(1u64, |acc, &c| num_integer::lcm(acc, c.max(1)))
    }

    /// Mixed-radix decode, last coordinate fastest.
    pub fn char_at(&self, index: u64) -> Result<Character> {
        if index >= self.size() {
            return Err(Error::Domain(format!(
                "character index {index} out of range {}",
                self.size()
            )));
        }
        let mut rem = index;
        let mut label = vec![0u64; self.counts.len()];
        for i in (0..self.counts.len()).rev() {
            let digit = rem % self.counts[i];
            rem /= self.counts[i];
            label[i] = digit * self.steps[i];
        }
        Character::new(&self.group, label)
    }

    pub fn iter(&self) -> impl Iterator<Item = Character> + '_ {
        (0..self.size()).map(move |i| self.char_at(i).expect("index in range"))
    }

    /// Lexicographic tuple decode over size()^k tuples.
    pub fn tuple_at(&self, index: u128, k: usize) -> Result<Vec<Character>> {
        let size = u128::from(self.size());
        let total = size.checked_pow(k as u32).ok_or_else(|| {
            Error::CapExceeded(format!("{}^{k} character tuples overflow", self.size()))
        })?;
        if index >= total {
            return Err(Error::Domain(format!(
                "tuple index {index} out of range {total}"
            )));
        }
        let mut rem = index;
        let mut out = vec![Character::trivial(&self.group); k];
        for i in (0..k).rev() {
            out[i] = self.char_at((rem % size) as u64)?;
            rem /= size;
        }
        Ok(out)
    }

    pub fn tuple_count(&self, k: usize) -> Option<u128> {
        u128::from(self.size()).checked_pow(k as u32)
    }

    pub fn random_tuple<R: Rng>(&self, rng: &mut R, k: usize) -> Vec<Character> {
        (0..k)
            .map(|_| {
                self.char_at(rng.gen_range(0..self.size()))
                    .expect("index in range")
            })
            .collect()
    }

    /// A character of order equal to the set size, when the set is cyclic
    /// as a group (its exponent equals its size); such a character is
    /// injective on the quotient the set separates.
    pub fn cyclic_generator(&self) -> Option<Character> {
        if self.exponent() != self.size() {
            return None;
        }
        let label: Vec<u64> = self
            .steps
            .iter()
            .zip(&self.counts)
            .map(|(&s, &c)| if c == 1 { 0 } else { s })
            .collect();
        Some(Character::new(&self.group, label).expect("steps stay in range"))
    }
}

/// How character tuples are searched for a nonvanishing certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Try the structured power tuple of a cyclic generator first, then
    /// fall back to the exhaustive sweep.
    VandermondeFirst,
    /// Seeded random tuples, up to the given budget.
    Random { trials: u64 },
    /// Lexicographic sweep over all tuples.
    Exhaustive,
    /// VandermondeFirst when a cyclic generator exists, else Exhaustive.
    Auto,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vandermonde" => Ok(Strategy::VandermondeFirst),
            "exhaustive" => Ok(Strategy::Exhaustive),
            "auto" => Ok(Strategy::Auto),
            _ => {
                if let Some(rest) = s.strip_prefix("random:") {
                    let trials: u64 = rest
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad trial count `{rest}`")))?;
                    Ok(Strategy::Random { trials })
                } else if s == "random" {
                    Ok(Strategy::Random { trials: 0 })
                } else {
                    Err(Error::Parse(format!(
                        "unknown strategy `{s}` (expected vandermonde, random[:N], exhaustive, auto)"
                    )))
                }
            }
        }
    }
}

/// A square matrix whose entries are roots of unity, stored as exponents
/// relative to a fixed level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterMatrix {
    level: u64,
    exps: Vec<Vec<u64>>,
}

impl CharacterMatrix {
    pub fn new(level: u64, exps: Vec<Vec<u64>>) -> Result<Self> {
        if level == 0 {
            return Err(Error::Domain("matrix level must be positive".into()));
        }
        let k = exps.len();
        if k == 0 {
            return Err(Error::Domain("matrix must be nonempty".into()));
        }
        if exps.iter().any(|row| row.len() != k) {
            return Err(Error::Domain("matrix must be square".into()));
        }
        if k > 24 {
            return Err(Error::CapExceeded(format!(
                "matrix dimension {k} exceeds the kernel limit 24"
            )));
        }
        let exps = exps
            .into_iter()
            .map(|row| row.into_iter().map(|e| e % level).collect())
            .collect();
        Ok(CharacterMatrix { level, exps })
    }

    /// Entry (i, j) = chars[j] evaluated at elements[i].
    pub fn from_characters(chars: &[Character], elements: &[GroupElement]) -> Result<Self> {
        if chars.is_empty() || chars.len() != elements.len() {
            return Err(Error::Domain(format!(
                "need equally many characters and elements, got {} and {}",
                chars.len(),
                elements.len()
            )));
        }
        let group = chars[0].group().clone();
        if chars.iter().any(|c| *c.group() != group) {
            return Err(Error::Domain("characters live on different groups".into()));
        }
        let level = group.exponent();
        let mut exps = Vec::with_capacity(elements.len());
        for g in elements {
            let mut row = Vec::with_capacity(chars.len());
            for chi in chars {
                row.push(chi.eval_exponent(g)?);
            }
            exps.push(row);
        }
        CharacterMatrix::new(level, exps)
    }

    pub fn k(&self) -> usize {
        self.exps.len()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn exponent(&self, i: usize, j: usize) -> u64 {
        self.exps[i][j]
    }

    fn check_backend(&self, backend: &Backend) -> Result<u64> {
        if !backend.contains_order(self.level) {
            return Err(Error::Backend(format!(
                "backend level {} has no root of order {}",
                backend.level(),
                self.level
            )));
        }
        Ok(backend.level() / self.level)
    }

    /// Determinant via the subset dynamic program: after processing i
    /// rows, dp[S] for |S| = i sums sgn-weighted products over bijections
    /// from the first i rows onto the column set S. Appending column j
    /// contributes the sign (-1)^|{s in S : s > j}| (new inversions).
    pub fn det(&self, backend: &Backend) -> Result<RingValue> {
        let scale = self.check_backend(backend)?;
        match backend {
            Backend::Cyclotomic { level } => {
                let out = self.det_accum(*level, scale)?;
                Ok(RingValue::Cyc(out))
            }
            Backend::Field(_) => self.det_generic(backend),
        }
    }

    fn det_accum(&self, level: u64, scale: u64) -> Result<crate::rings::cyclotomic::CyclotomicInteger> {
        let k = self.k();
        let size = 1usize << k;
        let mut dp: Vec<Option<CycAccum>> = vec![None; size];
        dp[0] = Some(CycAccum::monomial(level, 0));
        for i in 0..k {
            let mut next: Vec<Option<CycAccum>> = vec![None; size];
            for (s, cur) in dp.iter().enumerate() {
                let Some(cur) = cur else { continue };
                for j in 0..k {
                    if s & (1 << j) != 0 {
                        continue;
                    }
                    let above = ((s >> (j + 1)) as u32).count_ones();
                    let sign = if above % 2 == 0 { 1 } else { -1 };
                    let slot = next[s | (1 << j)].get_or_insert_with(|| CycAccum::zero(level));
                    slot.add_shifted(cur, self.exps[i][j] * scale, sign);
                }
            }
            dp = next;
        }
        dp[size - 1]
            .take()
            .ok_or_else(|| Error::Internal("determinant DP lost its final state".into()))?
            .reduce()
    }

    fn det_generic(&self, backend: &Backend) -> Result<RingValue> {
        let k = self.k();
        let size = 1usize << k;
        let mut dp: Vec<Option<RingValue>> = vec![None; size];
        dp[0] = Some(backend.one());
        for i in 0..k {
            let mut next: Vec<Option<RingValue>> = vec![None; size];
            for s in 0..size {
                let Some(cur) = &dp[s] else { continue };
                for j in 0..k {
                    if s & (1 << j) != 0 {
                        continue;
                    }
                    let above = ((s >> (j + 1)) as u32).count_ones();
                    let entry = backend.root_of_order(self.level, self.exps[i][j])?;
                    let mut term = cur.mul(&entry);
                    if above % 2 == 1 {
                        term = term.neg();
                    }
                    let slot = &mut next[s | (1 << j)];
                    *slot = Some(match slot.take() {
                        Some(v) => v.add(&term),
                        None => term,
                    });
                }
            }
            dp = next;
        }
        dp[size - 1]
            .take()
            .ok_or_else(|| Error::Internal("determinant DP lost its final state".into()))
    }

    /// Permanent by inclusion-exclusion over column subsets:
    /// per(A) = (-1)^k sum_S (-1)^|S| prod_i (sum_{j in S} a_ij),
    /// with row sums updated one toggled column at a time along a Gray
    /// code walk.
    pub fn per(&self, backend: &Backend) -> Result<RingValue> {
        let scale = self.check_backend(backend)?;
        match backend {
            Backend::Cyclotomic { level } => Ok(RingValue::Cyc(self.per_accum(*level, scale)?)),
            Backend::Field(_) => self.per_generic(backend),
        }
    }

    fn per_accum(&self, level: u64, scale: u64) -> Result<crate::rings::cyclotomic::CyclotomicInteger> {
        let k = self.k();
        let mut rowsums: Vec<CycAccum> = vec![CycAccum::zero(level); k];
        let mut total = CycAccum::zero(level);
        for t in 1u64..(1 << k) {
            let subset = t ^ (t >> 1);
            let bit = t.trailing_zeros() as usize;
            let joined = subset & (1 << bit) != 0;
            for (i, rs) in rowsums.iter_mut().enumerate() {
                rs.add_monomial(self.exps[i][bit] * scale, if joined { 1 } else { -1 });
            }
            let mut prod = rowsums[0].clone();
            for rs in &rowsums[1..] {
                prod = prod.mul(rs);
            }
            let popcount = subset.count_ones();
            let sign = if (k as u32 + popcount) % 2 == 0 { 1 } else { -1 };
            total.add_shifted(&prod, 0, sign);
        }
        total.reduce()
    }

    fn per_generic(&self, backend: &Backend) -> Result<RingValue> {
        let k = self.k();
        let mut rowsums: Vec<RingValue> = vec![backend.zero(); k];
        let mut total = backend.zero();
        for t in 1u64..(1 << k) {
            let subset = t ^ (t >> 1);
            let bit = t.trailing_zeros() as usize;
            let joined = subset & (1 << bit) != 0;
            for (i, rs) in rowsums.iter_mut().enumerate() {
                let entry = backend.root_of_order(self.level, self.exps[i][bit])?;
                *rs = if joined { rs.add(&entry) } else { rs.sub(&entry) };
            }
            let mut prod = rowsums[0].clone();
            for rs in &rowsums[1..] {
                prod = prod.mul(rs);
            }
            let popcount = subset.count_ones();
            if (k as u32 + popcount) % 2 == 1 {
                prod = prod.neg();
            }
            total = total.add(&prod);
        }
        Ok(total)
    }

    /// Expansion over all permutations, kept as an independent oracle.
    pub fn det_naive(&self, backend: &Backend) -> Result<RingValue> {
        self.naive(backend, true)
    }

    /// Expansion over all permutations, kept as an independent oracle.
    pub fn per_naive(&self, backend: &Backend) -> Result<RingValue> {
        self.naive(backend, false)
    }

    fn naive(&self, backend: &Backend, signed: bool) -> Result<RingValue> {
        self.check_backend(backend)?;
        let k = self.k();
        if k > 10 {
            return Err(Error::CapExceeded(format!(
                "naive expansion over {k}! permutations refused"
            )));
        }
        let mut total = backend.zero();
        for pi in Permutation::all(k) {
            let mut term = backend.one();
            for i in 0..k {
                term = term.mul(&backend.root_of_order(self.level, self.exps[i][pi.apply(i)])?);
            }
            if signed && pi.sign() < 0 {
                term = term.neg();
            }
            total = total.add(&term);
        }
        Ok(total)
    }
}
