//! Finite abelian groups presented as direct products of cyclic factors.
//!
//! A `GroupSpec` lists the factor orders of `Z_{n_1} x ... x Z_{n_r}`;
//! elements are residue vectors. Two specs presenting isomorphic groups
//! (say `c6` and `c2xc3`) are distinct presentations and their elements
//! never mix.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;

use crate::caps::Caps;
use crate::error::{Error, Result};

/// Direct-product presentation of a finite abelian group.
///
/// Every factor order is at least 2. Parsed from strings such as
/// `"c3xc9"`; a bare integer (`"27"`) abbreviates a single cyclic factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSpec {
    orders: Vec<u64>,
}

/// Residue vector in a `GroupSpec`, one coordinate per cyclic factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupSpec {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::Domain("group needs at least one factor".into()));
        }
        if let Some(&n) = orders.iter().find(|&&n| n < 2) {
            return Err(Error::Domain(format!("factor order {n} is below 2")));
        }
        let mut total: u128 = 1;
        for &n in &orders {
            total *= u128::from(n);
            if total > u128::from(u64::MAX) {
                return Err(Error::CapExceeded("group order exceeds u64".into()));
            }
        }
        Ok(GroupSpec { orders })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Parse("empty group spec".into()));
        }
        if let Ok(n) = text.parse::<u64>() {
            return GroupSpec::new(vec![n]);
        }
        let mut orders = Vec::new();
        for part in text.split('x') {
            let digits = part
                .strip_prefix('c')
                .ok_or_else(|| Error::Parse(format!("factor `{part}` must look like c<n>")))?;
            let n: u64 = digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad factor order `{digits}`")))?;
            orders.push(n);
        }
        GroupSpec::new(orders)
    }

    pub fn factor_orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// |G|, the product of the factor orders.
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponent of the group: lcm of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1u64, |acc, &n| acc.lcm(&n))
    }

    /// True when the presented group is cyclic, i.e. exponent equals order.
    pub fn is_cyclic(&self) -> bool {
        self.exponent() == self.order()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.orders.len()],
        }
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.residues.len() != self.orders.len() {
            return Err(Error::SpecMismatch(format!(
                "element {} has {} coordinates, spec {} has {}",
                g,
                g.residues.len(),
                self,
                self.orders.len()
            )));
        }
        for (i, (&r, &n)) in g.residues.iter().zip(&self.orders).enumerate() {
            if r >= n {
                return Err(Error::SpecMismatch(format!(
                    "coordinate {i} of {g} is {r}, outside Z_{n}"
                )));
            }
        }
        Ok(())
    }

    /// Builds an element, validating ranges against this spec.
    pub fn element(&self, residues: Vec<u64>) -> Result<GroupElement> {
        let g = GroupElement { residues };
        self.check(&g)?;
        Ok(g)
    }

    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        self.element(parse_residues(text)?)
    }

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul_unchecked(g, h))
    }

    pub(crate) fn mul_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let residues = self
            .orders
            .iter()
            .zip(g.residues.iter().zip(&h.residues))
            .map(|(&n, (&a, &b))| (a + b) % n)
            .collect();
        GroupElement { residues }
    }

    pub fn inv(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        let residues = self
            .orders
            .iter()
            .zip(&g.residues)
            .map(|(&n, &a)| if a == 0 { 0 } else { n - a })
            .collect();
        Ok(GroupElement { residues })
    }

    /// g^m for any signed exponent; each coordinate reduces mod its factor
    /// order, so m is effectively reduced mod the element order.
    pub fn pow(&self, g: &GroupElement, m: i64) -> Result<GroupElement> {
        self.check(g)?;
        let residues = self
            .orders
            .iter()
            .zip(&g.residues)
            .map(|(&n, &a)| {
                let m = m.rem_euclid(n as i64) as u64;
                (u128::from(a) * u128::from(m) % u128::from(n)) as u64
            })
            .collect();
        Ok(GroupElement { residues })
    }

    /// Multiplicative order: lcm over coordinates of n_i / gcd(n_i, g_i).
    pub fn element_order(&self, g: &GroupElement) -> Result<u64> {
        self.check(g)?;
        Ok(self
            .orders
            .iter()
            .zip(&g.residues)
            .fold(1u64, |acc, (&n, &a)| acc.lcm(&(n / n.gcd(&a)))))
    }

    /// All elements in lexicographic residue order. Index positions from
    /// this enumeration name the basis of the group algebra.
    pub fn enumerate(&self, caps: &Caps) -> Result<Vec<GroupElement>> {
        let order = self.order();
        if order > caps.enumeration {
            return Err(Error::CapExceeded(format!(
                "group order {order} exceeds enumeration cap {}",
                caps.enumeration
            )));
        }
        let mut out = Vec::with_capacity(order as usize);
        let mut cur = vec![0u64; self.orders.len()];
        loop {
            out.push(GroupElement {
                residues: cur.clone(),
            });
            let mut i = self.orders.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < self.orders[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    /// Position of g in the lexicographic enumeration, without building it.
    pub fn index_of(&self, g: &GroupElement) -> Result<u64> {
        self.check(g)?;
        let mut idx = 0u64;
        for (&n, &r) in self.orders.iter().zip(&g.residues) {
            idx = idx * n + r;
        }
        Ok(idx)
    }

    /// Sylow decomposition: for each prime p dividing |G|, the subgroup of
    /// all elements of p-power order together with its cofactor |G|/|P|.
    pub fn sylow_decomposition(&self, caps: &Caps) -> Result<BTreeMap<u64, SylowPart>> {
        let order = self.order();
        let mut parts = BTreeMap::new();
        for (&p, _) in prime_factorization(order).iter() {
            let sub = self.prime_part_subgroup(&[p], caps)?;
            let cofactor = order / sub.order();
            parts.insert(
                p,
                SylowPart {
                    subgroup: sub,
                    cofactor,
                },
            );
        }
        Ok(parts)
    }

    /// Subgroup of all elements whose order is supported on `primes`:
    /// componentwise, the unique subgroup of Z_{n_i} of order equal to the
    /// `primes`-part of n_i.
    pub(crate) fn prime_part_subgroup(&self, primes: &[u64], caps: &Caps) -> Result<SubgroupSpec> {
        let mut generators = Vec::new();
        for (i, &n) in self.orders.iter().enumerate() {
            let part = prime_part(n, primes);
            if part > 1 {
                let mut residues = vec![0u64; self.orders.len()];
                residues[i] = n / part;
                generators.push(GroupElement { residues });
            }
        }
        if generators.is_empty() {
            generators.push(self.identity());
        }
        SubgroupSpec::from_generators(self.clone(), generators, caps)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|n| format!("c{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Parses `"(1,2)"` into a residue vector; the spec validates ranges.
pub fn parse_residues(text: &str) -> Result<Vec<u64>> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("element `{text}` must be parenthesized")))?;
    inner
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad residue `{part}` in `{text}`")))
        })
        .collect()
}

/// Parses a comma-separated element list such as `"(0,1),(2,3)"`.
pub fn parse_element_list(spec: &GroupSpec, text: &str) -> Result<Vec<GroupElement>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => {
                if depth == 0 {
                    start = Some(i);
                }
                depth += 1;
            }
            ')' => {
                if depth == 0 {
                    return Err(Error::Parse(format!("unbalanced `)` in `{text}`")));
                }
                depth -= 1;
                if depth == 0 {
                    let open = start.take().unwrap();
                    out.push(spec.parse_element(&text[open..=i])?);
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced `(` in `{text}`")));
    }
    if out.is_empty() {
        return Err(Error::Parse(format!("no elements found in `{text}`")));
    }
    Ok(out)
}

/// Subgroup of a parent spec, closed under the group operation.
///
/// The element list is eager (bounded by the enumeration cap), sorted in
/// lexicographic residue order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSpec {
    parent: GroupSpec,
    generators: Vec<GroupElement>,
    elements: Vec<GroupElement>,
}

/// One Sylow factor: the subgroup of p-power-order elements and |G|/|P|.
#[derive(Debug, Clone)]
pub struct SylowPart {
    pub subgroup: SubgroupSpec,
    pub cofactor: u64,
}

impl SubgroupSpec {
    /// Closure of the generators under multiplication (breadth-first).
    pub fn from_generators(
        parent: GroupSpec,
        generators: Vec<GroupElement>,
        caps: &Caps,
    ) -> Result<Self> {
        for g in &generators {
            parent.check(g)?;
        }
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(parent.identity());
        let mut frontier = vec![parent.identity()];
        while let Some(g) = frontier.pop() {
            for gen in &generators {
                let next = parent.mul_unchecked(&g, gen);
                if seen.insert(next.clone()) {
                    if seen.len() as u64 > caps.enumeration {
                        return Err(Error::CapExceeded(format!(
                            "subgroup closure exceeds enumeration cap {}",
                            caps.enumeration
                        )));
                    }
                    frontier.push(next);
                }
            }
        }
        Ok(SubgroupSpec {
            parent,
            generators,
            elements: seen.into_iter().collect(),
        })
    }

    /// The whole group as a subgroup of itself.
    pub fn whole(parent: GroupSpec, caps: &Caps) -> Result<Self> {
        let mut generators = Vec::new();
        for i in 0..parent.rank() {
            let mut residues = vec![0u64; parent.rank()];
            residues[i] = 1;
            generators.push(GroupElement { residues });
        }
        let elements = parent.enumerate(caps)?;
        let mut elements = elements;
        elements.sort();
        Ok(SubgroupSpec {
            parent,
            generators,
            elements,
        })
    }

    pub fn parent(&self) -> &GroupSpec {
        &self.parent
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn contains_all(&self, gs: &[GroupElement]) -> bool {
        gs.iter().all(|g| self.contains(g))
    }

    pub fn is_whole_group(&self) -> bool {
        self.order() == self.parent.order()
    }
}

/// Least prime divisor of n. Errors for n < 2.
pub fn smallest_prime_divisor(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::Domain(format!("{n} has no prime divisor")));
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return Ok(d);
        }
        d += 1;
    }
    Ok(n)
}

/// Prime factorization by trial division, as p -> multiplicity.
pub fn prime_factorization(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut d = 2u64;
    while d * d <= n {
        while n % d == 0 {
            *out.entry(d).or_insert(0) += 1;
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

/// The `primes`-part of n: the largest divisor supported on `primes`.
pub fn prime_part(mut n: u64, primes: &[u64]) -> u64 {
    let mut part = 1u64;
    for &p in primes {
        while n % p == 0 {
            part *= p;
            n /= p;
        }
    }
    part
}

/// The k-large condition on an order n > 1: the least prime divisor
/// exceeds k and every other prime divisor exceeds k!.
pub fn is_k_large(n: u64, k: u64) -> Result<bool> {
    if n < 2 {
        return Err(Error::Domain(format!("k-largeness undefined for n = {n}")));
    }
    if k < 1 {
        return Err(Error::Domain("k-largeness needs k >= 1".into()));
    }
    let primes: Vec<u64> = prime_factorization(n).into_keys().collect();
    if primes[0] <= k {
        return Ok(false);
    }
    let k_factorial = factorial(k);
    Ok(primes[1..]
        .iter()
        .all(|&p| BigUint::from(p) > k_factorial))
}

pub fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::from(1u32), |acc, i| acc * i)
}
