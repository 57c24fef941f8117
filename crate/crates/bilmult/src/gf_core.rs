//! Exact arithmetic in F_p and in towers of polynomial quotient rings over it.
//!
//! A field is a prime `p` plus a chain of extension levels. Level `i` is
//! `L_{i-1}[x] / (m_i)` where `m_i` is monic irreducible over `L_{i-1}`; only the
//! non-leading coefficients of `m_i` are stored. Elements of an extension level
//! are coordinate vectors over the level directly below it.
//!
//! Every element has a canonical integer index: coordinate 0 is the least
//! significant digit in base `|L_{i-1}|`. "Canonical order" everywhere in the
//! crate means ascending index.

use std::fmt;

use thiserror::Error;

/// Largest characteristic accepted by [`field_make_prime`].
pub const MAX_PRIME: u64 = 1 << 31;

/// Largest field that may be enumerated element by element.
pub const ENUMERATION_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("polynomial is not irreducible over the base field")]
    NotIrreducible,
    #[error("element does not belong to the field: {0}")]
    BadElement(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
}

/// An element of some level of a field tower.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Prime(u64),
    Ext(Vec<FieldElement>),
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Prime(v) => write!(f, "{v}"),
            FieldElement::Ext(cs) => {
                write!(f, "[")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// One extension step: degree and the non-leading coefficients of the modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionLevel {
    pub degree: usize,
    pub modulus: Vec<FieldElement>,
}

/// A concrete model of a finite field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    p: u64,
    chain: Vec<ExtensionLevel>,
    cardinality: u128,
}

/// Borrowed view of a prefix of a tower; all arithmetic is implemented here.
#[derive(Clone, Copy, Debug)]
pub struct Level<'a> {
    p: u64,
    chain: &'a [ExtensionLevel],
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Writes `q = p^r` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 0;
    let mut d = 2u64;
    while d * d <= q {
        if q % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        return Some((q, 1));
    }
    let mut m = q;
    let mut r = 0;
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

pub fn field_make_prime(p: u64) -> Result<FieldDescriptor, GfError> {
    if p > MAX_PRIME {
        return Err(GfError::TooLarge(format!("characteristic {p} exceeds 2^31")));
    }
    if !is_prime_u64(p) {
        return Err(GfError::NotPrime(p));
    }
    Ok(FieldDescriptor { p, chain: Vec::new(), cardinality: p as u128 })
}

/// Extends `base` by the first monic irreducible polynomial of degree `n` in
/// canonical order.
pub fn field_extend(base: &FieldDescriptor, n: usize) -> Result<FieldDescriptor, GfError> {
    if n == 0 {
        return Err(GfError::ZeroDegree);
    }
    if n == 1 {
        return Ok(base.clone());
    }
    let q = base.cardinality;
    let total = checked_pow(q, n)
        .ok_or_else(|| GfError::TooLarge(format!("{q}^{n} does not fit in 128 bits")))?;
    let lvl = base.level();
    let mut coeffs = vec![lvl.zero(); n + 1];
    coeffs[n] = lvl.one();
    for idx in 0..total {
        let mut rest = idx;
        for c in coeffs.iter_mut().take(n) {
            *c = lvl.from_index(rest % q);
            rest /= q;
        }
        // a zero constant term means x divides the candidate
        if lvl.is_zero(&coeffs[0]) {
            continue;
        }
        if lvl.poly_irreducible(&coeffs) {
            return base.extended_with(coeffs[..n].to_vec());
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

pub fn poly_irreducible(field: &FieldDescriptor, coeffs: &[FieldElement]) -> bool {
    field.level().poly_irreducible(coeffs)
}

/// The canonical model of F_q: F_p extended once by the first irreducible of degree r.
pub fn field_of_order(q: u64) -> Result<FieldDescriptor, GfError> {
    let (p, r) = prime_power(q).ok_or(GfError::NotPrimePower(q))?;
    field_extend(&field_make_prime(p)?, r as usize)
}

pub fn gf_add(field: &FieldDescriptor, x: &FieldElement, y: &FieldElement) -> FieldElement {
    field.level().add(x, y)
}

pub fn gf_mul(field: &FieldDescriptor, x: &FieldElement, y: &FieldElement) -> FieldElement {
    field.level().mul(x, y)
}

pub fn gf_neg(field: &FieldDescriptor, x: &FieldElement) -> FieldElement {
    field.level().neg(x)
}

pub fn gf_inv(field: &FieldDescriptor, x: &FieldElement) -> Result<FieldElement, GfError> {
    field.level().inv(x)
}

fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

impl FieldDescriptor {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn chain(&self) -> &[ExtensionLevel] {
        &self.chain
    }

    pub fn cardinality(&self) -> u128 {
        self.cardinality
    }

    /// Cardinality as u64, when it fits.
    pub fn order(&self) -> Option<u64> {
        u64::try_from(self.cardinality).ok()
    }

    /// Number of coordinates of a top-level element (1 for a prime field).
    pub fn top_degree(&self) -> usize {
        self.chain.last().map_or(1, |l| l.degree)
    }

    /// Degree over the prime field.
    pub fn absolute_degree(&self) -> usize {
        self.chain.iter().map(|l| l.degree).product()
    }

    pub fn is_prime_field(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn level(&self) -> Level<'_> {
        Level { p: self.p, chain: &self.chain }
    }

    /// The field below the top level, or `None` for a prime field.
    pub fn base(&self) -> Option<FieldDescriptor> {
        if self.chain.is_empty() {
            return None;
        }
        let chain = self.chain[..self.chain.len() - 1].to_vec();
        let deg = self.top_degree() as u32;
        Some(FieldDescriptor { p: self.p, chain, cardinality: integer_root(self.cardinality, deg) })
    }

    /// Descriptor of the first `levels` levels of this tower.
    pub fn prefix(&self, levels: usize) -> FieldDescriptor {
        let chain = self.chain[..levels].to_vec();
        let cardinality = chain
            .iter()
            .fold(self.p as u128, |acc, l| checked_pow(acc, l.degree).expect("prefix of a valid field"));
        FieldDescriptor { p: self.p, chain, cardinality }
    }

    /// Adds one level with the given modulus (non-leading coefficients), which
    /// must be irreducible over `self`.
    pub fn extended_with(&self, modulus: Vec<FieldElement>) -> Result<FieldDescriptor, GfError> {
        let n = modulus.len();
        if n == 0 {
            return Err(GfError::ZeroDegree);
        }
        let lvl = self.level();
        for c in &modulus {
            lvl.check(c)?;
        }
        let mut full = modulus.clone();
        full.push(lvl.one());
        if !lvl.poly_irreducible(&full) {
            return Err(GfError::NotIrreducible);
        }
        let cardinality = checked_pow(self.cardinality, n)
            .ok_or_else(|| GfError::TooLarge("field cardinality exceeds 128 bits".into()))?;
        let mut chain = self.chain.clone();
        chain.push(ExtensionLevel { degree: n, modulus });
        Ok(FieldDescriptor { p: self.p, chain, cardinality })
    }

    /// Canonical element enumeration; refuses fields above [`ENUMERATION_CAP`].
    pub fn elements(&self) -> Result<impl Iterator<Item = FieldElement> + '_, GfError> {
        if self.cardinality > ENUMERATION_CAP {
            return Err(GfError::TooLarge(format!(
                "cannot enumerate a field of {} elements",
                self.cardinality
            )));
        }
        let lvl = self.level();
        Ok((0..self.cardinality).map(move |i| lvl.from_index(i)))
    }

    pub fn zero(&self) -> FieldElement {
        self.level().zero()
    }

    pub fn one(&self) -> FieldElement {
        self.level().one()
    }

    pub fn from_index(&self, idx: u128) -> FieldElement {
        self.level().from_index(idx)
    }

    pub fn index(&self, x: &FieldElement) -> u128 {
        self.level().index(x)
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.level().check(x).is_ok()
    }

    /// Coordinates of a top-level element over the field given by the first
    /// `levels` levels (a full flattening when `levels` is 0).
    pub fn coords_over(&self, x: &FieldElement, levels: usize) -> Vec<FieldElement> {
        fn go(x: &FieldElement, depth: usize, out: &mut Vec<FieldElement>) {
            if depth == 0 {
                out.push(x.clone());
                return;
            }
            match x {
                FieldElement::Ext(cs) => cs.iter().for_each(|c| go(c, depth - 1, out)),
                FieldElement::Prime(_) => unreachable!("element shallower than its field"),
            }
        }
        let mut out = Vec::new();
        go(x, self.chain.len() - levels, &mut out);
        out
    }

    /// Inverse of [`coords_over`](Self::coords_over).
    pub fn from_coords_over(&self, coords: &[FieldElement], levels: usize) -> FieldElement {
        fn go(chain: &[ExtensionLevel], levels: usize, coords: &[FieldElement]) -> FieldElement {
            if chain.len() == levels {
                return coords[0].clone();
            }
            let top = chain.last().unwrap();
            let below = &chain[..chain.len() - 1];
            let stride = coords.len() / top.degree;
            FieldElement::Ext(
                coords.chunks(stride).map(|c| go(below, levels, c)).collect(),
            )
        }
        go(&self.chain, levels, coords)
    }

    /// Embeds an element of the prefix field with `levels` levels.
    pub fn embed_from(&self, x: &FieldElement, levels: usize) -> FieldElement {
        let mut e = x.clone();
        for l in &self.chain[levels..] {
            let below_zero = zero_like(&e);
            let mut cs = vec![below_zero; l.degree];
            cs[0] = e;
            e = FieldElement::Ext(cs);
        }
        e
    }

    /// Dimension over the prefix field with `levels` levels.
    pub fn degree_over(&self, levels: usize) -> usize {
        self.chain[levels..].iter().map(|l| l.degree).product()
    }
}

fn zero_like(x: &FieldElement) -> FieldElement {
    match x {
        FieldElement::Prime(_) => FieldElement::Prime(0),
        FieldElement::Ext(cs) => FieldElement::Ext(cs.iter().map(zero_like).collect()),
    }
}

fn integer_root(n: u128, k: u32) -> u128 {
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u128;
    while checked_pow(r, k as usize).is_none_or(|v| v > n) {
        r -= 1;
    }
    while checked_pow(r + 1, k as usize).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

impl<'a> Level<'a> {
    pub fn p(&self) -> u64 {
        self.p
    }

    fn below(&self) -> Level<'a> {
        Level { p: self.p, chain: &self.chain[..self.chain.len() - 1] }
    }

    pub fn cardinality(&self) -> u128 {
        self.chain.iter().fold(self.p as u128, |acc, l| acc.pow(l.degree as u32))
    }

    pub fn zero(&self) -> FieldElement {
        match self.chain.last() {
            None => FieldElement::Prime(0),
            Some(top) => FieldElement::Ext(vec![self.below().zero(); top.degree]),
        }
    }

    pub fn one(&self) -> FieldElement {
        match self.chain.last() {
            None => FieldElement::Prime(1),
            Some(top) => {
                let b = self.below();
                let mut cs = vec![b.zero(); top.degree];
                cs[0] = b.one();
                FieldElement::Ext(cs)
            }
        }
    }

    pub fn from_index(&self, idx: u128) -> FieldElement {
        match self.chain.last() {
            None => FieldElement::Prime((idx % self.p as u128) as u64),
            Some(top) => {
                let b = self.below();
                let q = b.cardinality();
                let mut rest = idx;
                let mut cs = Vec::with_capacity(top.degree);
                for _ in 0..top.degree {
                    cs.push(b.from_index(rest % q));
                    rest /= q;
                }
                FieldElement::Ext(cs)
            }
        }
    }

    pub fn index(&self, x: &FieldElement) -> u128 {
        match (self.chain.last(), x) {
            (None, FieldElement::Prime(v)) => *v as u128,
            (Some(_), FieldElement::Ext(cs)) => {
                let b = self.below();
                let q = b.cardinality();
                cs.iter().rev().fold(0u128, |acc, c| acc * q + b.index(c))
            }
            _ => panic!("element shape does not match field"),
        }
    }

    pub fn check(&self, x: &FieldElement) -> Result<(), GfError> {
        match (self.chain.last(), x) {
            (None, FieldElement::Prime(v)) if *v < self.p => Ok(()),
            (Some(top), FieldElement::Ext(cs)) if cs.len() == top.degree => {
                let b = self.below();
                cs.iter().try_for_each(|c| b.check(c))
            }
            _ => Err(GfError::BadElement(x.to_string())),
        }
    }

    pub fn is_zero(&self, x: &FieldElement) -> bool {
        match x {
            FieldElement::Prime(v) => *v == 0,
            FieldElement::Ext(cs) => cs.iter().all(|c| self.below().is_zero(c)),
        }
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        match (x, y) {
            (FieldElement::Prime(a), FieldElement::Prime(b)) => FieldElement::Prime((a + b) % self.p),
            (FieldElement::Ext(a), FieldElement::Ext(b)) => {
                let l = self.below();
                FieldElement::Ext(a.iter().zip(b).map(|(u, v)| l.add(u, v)).collect())
            }
            _ => panic!("mixed element shapes"),
        }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        match x {
            FieldElement::Prime(a) => FieldElement::Prime((self.p - a) % self.p),
            FieldElement::Ext(a) => {
                let l = self.below();
                FieldElement::Ext(a.iter().map(|u| l.neg(u)).collect())
            }
        }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        match (x, y) {
            (FieldElement::Prime(a), FieldElement::Prime(b)) => FieldElement::Prime(a * b % self.p),
            (FieldElement::Ext(a), FieldElement::Ext(b)) => {
                let top = self.chain.last().expect("extension element in prime field");
                let l = self.below();
                let n = top.degree;
                let mut prod = vec![l.zero(); 2 * n - 1];
                for (i, u) in a.iter().enumerate() {
                    if l.is_zero(u) {
                        continue;
                    }
                    for (j, v) in b.iter().enumerate() {
                        prod[i + j] = l.add(&prod[i + j], &l.mul(u, v));
                    }
                }
                // x^n = -sum m_i x^i
                for d in (n..2 * n - 1).rev() {
                    let lead = std::mem::replace(&mut prod[d], l.zero());
                    if l.is_zero(&lead) {
                        continue;
                    }
                    for (i, m) in top.modulus.iter().enumerate() {
                        prod[d - n + i] = l.sub(&prod[d - n + i], &l.mul(&lead, m));
                    }
                }
                prod.truncate(n);
                FieldElement::Ext(prod)
            }
            _ => panic!("mixed element shapes"),
        }
    }

    pub fn pow(&self, x: &FieldElement, mut e: u128) -> FieldElement {
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, GfError> {
        if self.is_zero(x) {
            return Err(GfError::DivisionByZero);
        }
        Ok(self.pow(x, self.cardinality() - 2))
    }

    // Polynomials over this level, coefficient lists from degree 0 upward.

    fn trim(&self, f: &mut Vec<FieldElement>) {
        while f.last().is_some_and(|c| self.is_zero(c)) {
            f.pop();
        }
    }

    fn poly_rem(&self, f: &[FieldElement], g: &[FieldElement]) -> Vec<FieldElement> {
        let mut r = f.to_vec();
        self.trim(&mut r);
        let dg = g.len() - 1;
        let lead_inv = self.inv(&g[dg]).expect("divisor has a nonzero leading coefficient");
        while r.len() > dg {
            let dr = r.len() - 1;
            let c = self.mul(&r[dr], &lead_inv);
            for (i, gi) in g.iter().enumerate() {
                let k = dr - dg + i;
                r[k] = self.sub(&r[k], &self.mul(&c, gi));
            }
            self.trim(&mut r);
        }
        r
    }

    fn poly_mulmod(&self, a: &[FieldElement], b: &[FieldElement], m: &[FieldElement]) -> Vec<FieldElement> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![self.zero(); a.len() + b.len() - 1];
        for (i, u) in a.iter().enumerate() {
            for (j, v) in b.iter().enumerate() {
                prod[i + j] = self.add(&prod[i + j], &self.mul(u, v));
            }
        }
        self.poly_rem(&prod, m)
    }

    fn poly_powmod(&self, base: &[FieldElement], mut e: u128, m: &[FieldElement]) -> Vec<FieldElement> {
        let mut acc = vec![self.one()];
        let mut b = self.poly_rem(base, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mulmod(&acc, &b, m);
            }
            b = self.poly_mulmod(&b, &b, m);
            e >>= 1;
        }
        acc
    }

    fn poly_gcd(&self, f: &[FieldElement], g: &[FieldElement]) -> Vec<FieldElement> {
        let mut a = f.to_vec();
        let mut b = g.to_vec();
        self.trim(&mut a);
        self.trim(&mut b);
        while !b.is_empty() {
            let r = self.poly_rem(&a, &b);
            a = b;
            b = r;
        }
        a
    }

    /// Distinct-degree test: gcd(f, x^(q^i) - x) = 1 for i up to deg/2.
    pub fn poly_irreducible(&self, coeffs: &[FieldElement]) -> bool {
        let mut f = coeffs.to_vec();
        self.trim(&mut f);
        if f.len() < 2 {
            return false;
        }
        let deg = f.len() - 1;
        if deg == 1 {
            return true;
        }
        let q = self.cardinality();
        let x = vec![self.zero(), self.one()];
        let mut h = x.clone();
        for _ in 0..deg / 2 {
            h = self.poly_powmod(&h, q, &f);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), self.zero());
            diff[1] = self.sub(&diff[1], &self.one());
            self.trim(&mut diff);
            if diff.is_empty() {
                return false;
            }
            if self.poly_gcd(&f, &diff).len() > 1 {
                return false;
            }
        }
        true
    }
}
