//! Bilinear decompositions `t = sum a_i (x) b_i (x) c_i` of the multiplication
//! tensor of F_{q^n} over F_q, their verification and (de)serialization, and an
//! exhaustive rank search for tiny parameters.
//!
//! Linear forms `a_i`, `b_i` and the vectors `c_i` are coordinate vectors over
//! F_q in the basis of the extension field (monomial basis for a single-step
//! extension, product basis for a tower).

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::gf_core::{field_extend, field_make_prime, FieldDescriptor, FieldElement, GfError};

/// Default node budget of [`brute_force_rank`].
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Largest rank the search accepts.
pub const MAX_SEARCH_RANK: usize = 9;

/// Largest q^n the search accepts.
pub const MAX_SEARCH_FIELD: u128 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("validation error: {0}")]
    ValidationError(String),
    #[error("parameter too large: {0}")]
    ParameterTooLarge(String),
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub a: Vec<FieldElement>,
    pub b: Vec<FieldElement>,
    pub c: Vec<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearDecomposition {
    base: FieldDescriptor,
    ext: FieldDescriptor,
    triples: Vec<Triple>,
}

impl BilinearDecomposition {
    /// Decomposition for `base[x]/(modulus)`; `modulus` holds the non-leading
    /// coefficients.
    pub fn new(
        base: FieldDescriptor,
        modulus: Vec<FieldElement>,
        triples: Vec<Triple>,
    ) -> Result<Self, DecompError> {
        let ext = base.extended_with(modulus)?;
        Self::with_extension(base, ext, triples)
    }

    /// Decomposition for an arbitrary tower `ext` sitting on top of `base`.
    pub fn with_extension(
        base: FieldDescriptor,
        ext: FieldDescriptor,
        triples: Vec<Triple>,
    ) -> Result<Self, DecompError> {
        let levels = base.chain().len();
        if ext.chain().len() < levels || ext.prefix(levels) != base {
            return Err(DecompError::DimensionMismatch(
                "extension field does not sit on the base field".into(),
            ));
        }
        let d = Self { base, ext, triples };
        d.check_dimensions()?;
        Ok(d)
    }

    pub fn base(&self) -> &FieldDescriptor {
        &self.base
    }

    pub fn extension(&self) -> &FieldDescriptor {
        &self.ext
    }

    /// Degree of the extension over the base field.
    pub fn n(&self) -> usize {
        self.ext.degree_over(self.base.chain().len())
    }

    pub fn rank(&self) -> usize {
        self.triples.len()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// The defining polynomial when the extension is a single step.
    pub fn modulus(&self) -> Option<&[FieldElement]> {
        (self.ext.chain().len() == self.base.chain().len() + 1)
            .then(|| self.ext.chain().last().unwrap().modulus.as_slice())
    }

    fn levels(&self) -> usize {
        self.base.chain().len()
    }

    fn check_dimensions(&self) -> Result<(), DecompError> {
        let n = self.n();
        let lvl = self.base.level();
        for (i, t) in self.triples.iter().enumerate() {
            for (name, v) in [("a", &t.a), ("b", &t.b), ("c", &t.c)] {
                if v.len() != n {
                    return Err(DecompError::DimensionMismatch(format!(
                        "triple {i}: {name} has length {} instead of {n}",
                        v.len()
                    )));
                }
                for e in v {
                    lvl.check(e).map_err(|_| {
                        DecompError::DimensionMismatch(format!("triple {i}: {name} entry {e} is not in the base field"))
                    })?;
                }
            }
        }
        Ok(())
    }

    /// Coordinates over the base field of a top-level element.
    pub fn coords(&self, x: &FieldElement) -> Vec<FieldElement> {
        self.ext.coords_over(x, self.levels())
    }

    pub fn element(&self, coords: &[FieldElement]) -> FieldElement {
        self.ext.from_coords_over(coords, self.levels())
    }

    /// The i-th basis vector of the extension.
    pub fn basis(&self, i: usize) -> FieldElement {
        let lvl = self.base.level();
        let mut v = vec![lvl.zero(); self.n()];
        v[i] = lvl.one();
        self.element(&v)
    }

    fn evaluate(&self, xc: &[FieldElement], yc: &[FieldElement]) -> Vec<FieldElement> {
        let lvl = self.base.level();
        let dot = |u: &[FieldElement], v: &[FieldElement]| {
            u.iter().zip(v).fold(lvl.zero(), |acc, (s, t)| lvl.add(&acc, &lvl.mul(s, t)))
        };
        let mut acc = vec![lvl.zero(); self.n()];
        for t in &self.triples {
            let s = lvl.mul(&dot(&t.a, xc), &dot(&t.b, yc));
            if lvl.is_zero(&s) {
                continue;
            }
            for (o, c) in acc.iter_mut().zip(&t.c) {
                *o = lvl.add(o, &lvl.mul(&s, c));
            }
        }
        acc
    }

    /// First basis pair (j, k) whose product the decomposition gets wrong.
    pub fn failing_pair(&self) -> Result<Option<(usize, usize)>, DecompError> {
        self.check_dimensions()?;
        let n = self.n();
        let lvl = self.base.level();
        let basis: Vec<FieldElement> = (0..n).map(|i| self.basis(i)).collect();
        let unit = |i: usize| {
            let mut v = vec![lvl.zero(); n];
            v[i] = lvl.one();
            v
        };
        let ext = self.ext.level();
        for j in 0..n {
            for k in 0..n {
                let want = self.coords(&ext.mul(&basis[j], &basis[k]));
                if self.evaluate(&unit(j), &unit(k)) != want {
                    return Ok(Some((j, k)));
                }
            }
        }
        Ok(None)
    }

    /// Verification over all q^n x q^n products; refuses extensions above 2^12 elements.
    pub fn verify_exhaustive(&self) -> Result<bool, DecompError> {
        self.check_dimensions()?;
        if self.ext.cardinality() > 1 << 12 {
            return Err(DecompError::ParameterTooLarge("exhaustive check needs q^n <= 4096".into()));
        }
        let elems: Vec<FieldElement> = self.ext.elements()?.collect();
        let coords: Vec<Vec<FieldElement>> = elems.iter().map(|x| self.coords(x)).collect();
        let ext = self.ext.level();
        for (x, xc) in elems.iter().zip(&coords) {
            for (y, yc) in elems.iter().zip(&coords) {
                if self.evaluate(xc, yc) != self.coords(&ext.mul(x, y)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn verify_decomposition(d: &BilinearDecomposition) -> Result<bool, DecompError> {
    Ok(d.failing_pair()?.is_none())
}

/// Evaluates the algorithm on two elements of the extension field.
pub fn decomposition_apply(
    d: &BilinearDecomposition,
    x: &FieldElement,
    y: &FieldElement,
) -> Result<FieldElement, DecompError> {
    d.check_dimensions()?;
    for v in [x, y] {
        if !d.ext.contains(v) {
            return Err(DecompError::DimensionMismatch(format!("{v} is not an element of the extension field")));
        }
    }
    Ok(d.element(&d.evaluate(&d.coords(x), &d.coords(y))))
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldJson {
    p: u64,
    chain: Vec<Vec<Value>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TripleJson {
    a: Vec<Value>,
    b: Vec<Value>,
    c: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompJson {
    q: FieldJson,
    n: usize,
    #[serde(default)]
    modulus: Option<Vec<Value>>,
    #[serde(default)]
    tower: Option<Vec<Vec<Value>>>,
    rank: usize,
    triples: Vec<TripleJson>,
}

fn elem_to_json(x: &FieldElement) -> Value {
    match x {
        FieldElement::Prime(v) => Value::from(*v),
        FieldElement::Ext(cs) => Value::Array(cs.iter().map(elem_to_json).collect()),
    }
}

fn elem_from_json(field: &FieldDescriptor, v: &Value) -> Result<FieldElement, DecompError> {
    fn go(p: u64, degrees: &[usize], v: &Value) -> Result<FieldElement, String> {
        match degrees.split_last() {
            None => {
                let x = v.as_u64().ok_or_else(|| format!("expected an integer, found {v}"))?;
                if x >= p {
                    return Err(format!("coefficient {x} is not reduced modulo {p}"));
                }
                Ok(FieldElement::Prime(x))
            }
            Some((&d, rest)) => {
                let arr = v.as_array().ok_or_else(|| format!("expected an array, found {v}"))?;
                if arr.len() != d {
                    return Err(format!("expected {d} coordinates, found {}", arr.len()));
                }
                arr.iter().map(|c| go(p, rest, c)).collect::<Result<_, _>>().map(FieldElement::Ext)
            }
        }
    }
    let degrees: Vec<usize> = field.chain().iter().map(|l| l.degree).collect();
    go(field.p(), &degrees, v).map_err(DecompError::ValidationError)
}

fn vec_from_json(field: &FieldDescriptor, vs: &[Value]) -> Result<Vec<FieldElement>, DecompError> {
    vs.iter().map(|v| elem_from_json(field, v)).collect()
}

fn field_json(f: &FieldDescriptor) -> FieldJson {
    FieldJson {
        p: f.p(),
        chain: f.chain().iter().map(|l| l.modulus.iter().map(elem_to_json).collect()).collect(),
    }
}

fn field_from_json(j: &FieldJson) -> Result<FieldDescriptor, DecompError> {
    let mut f = field_make_prime(j.p).map_err(|e| DecompError::ValidationError(e.to_string()))?;
    for m in &j.chain {
        let coeffs = vec_from_json(&f, m)?;
        f = f.extended_with(coeffs).map_err(|e| DecompError::ValidationError(e.to_string()))?;
    }
    Ok(f)
}

/// Canonical text: fields in schema order, one triple per line.
pub fn decomposition_to_json(d: &BilinearDecomposition) -> String {
    let enc = |v: &[FieldElement]| Value::Array(v.iter().map(elem_to_json).collect());
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"q\": {},\n", serde_json::to_string(&field_json(&d.base)).unwrap()));
    out.push_str(&format!("  \"n\": {},\n", d.n()));
    match d.modulus() {
        Some(m) => out.push_str(&format!("  \"modulus\": {},\n", enc(m))),
        None => {
            let tower: Vec<Value> = d.ext.chain()[d.levels()..].iter().map(|l| enc(&l.modulus)).collect();
            out.push_str(&format!("  \"tower\": {},\n", Value::Array(tower)));
        }
    }
    out.push_str(&format!("  \"rank\": {},\n", d.rank()));
    out.push_str("  \"triples\": [");
    for (i, t) in d.triples.iter().enumerate() {
        let tj = TripleJson {
            a: t.a.iter().map(elem_to_json).collect(),
            b: t.b.iter().map(elem_to_json).collect(),
            c: t.c.iter().map(elem_to_json).collect(),
        };
        out.push_str(if i == 0 { "\n    " } else { ",\n    " });
        out.push_str(&serde_json::to_string(&tj).unwrap());
    }
    out.push_str(if d.triples.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    out
}

pub fn decomposition_from_json(text: &str, skip_verify: bool) -> Result<BilinearDecomposition, DecompError> {
    let j: DecompJson = serde_json::from_str(text).map_err(|e| DecompError::ParseError(e.to_string()))?;
    let base = field_from_json(&j.q)?;
    let mut ext = base.clone();
    match (&j.modulus, &j.tower) {
        (Some(m), None) => {
            let coeffs = vec_from_json(&base, m)?;
            ext = ext.extended_with(coeffs).map_err(|e| DecompError::ValidationError(e.to_string()))?;
        }
        (None, Some(levels)) => {
            for m in levels {
                let coeffs = vec_from_json(&ext, m)?;
                ext = ext.extended_with(coeffs).map_err(|e| DecompError::ValidationError(e.to_string()))?;
            }
        }
        _ => return Err(DecompError::ParseError("exactly one of \"modulus\" and \"tower\" is required".into())),
    }
    let n = ext.degree_over(base.chain().len());
    if n != j.n {
        return Err(DecompError::ValidationError(format!("n is {} but the extension has degree {n}", j.n)));
    }
    if j.rank != j.triples.len() {
        return Err(DecompError::ValidationError(format!(
            "rank is {} but {} triples are listed",
            j.rank,
            j.triples.len()
        )));
    }
    let mut triples = Vec::with_capacity(j.triples.len());
    for t in &j.triples {
        triples.push(Triple {
            a: vec_from_json(&base, &t.a)?,
            b: vec_from_json(&base, &t.b)?,
            c: vec_from_json(&base, &t.c)?,
        });
    }
    let d = BilinearDecomposition::with_extension(base, ext, triples)
        .map_err(|e| DecompError::ValidationError(e.to_string()))?;
    if !skip_verify {
        if let Some((j, k)) = d.failing_pair()? {
            return Err(DecompError::ValidationError(format!("product of basis pair ({j},{k}) is wrong")));
        }
    }
    Ok(d)
}

// ---------------------------------------------------------------------------
// Rank search

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(BilinearDecomposition),
    ExhaustedNoneExists,
    Aborted { budget: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankSearchReport {
    pub q: u128,
    pub n: usize,
    pub r_max: usize,
    pub outcome: SearchOutcome,
    pub nodes_explored: u64,
}

/// Lookup tables for a small field, elements named by canonical index.
struct SmallField {
    q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl SmallField {
    fn new(f: &FieldDescriptor) -> Self {
        let q = f.cardinality() as usize;
        let elems: Vec<FieldElement> = (0..q as u128).map(|i| f.from_index(i)).collect();
        let lvl = f.level();
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for i in 0..q {
            for j in 0..q {
                add[i * q + j] = f.index(&lvl.add(&elems[i], &elems[j])) as u16;
                mul[i * q + j] = f.index(&lvl.mul(&elems[i], &elems[j])) as u16;
            }
        }
        let neg = (0..q).map(|i| f.index(&lvl.neg(&elems[i])) as u16).collect();
        let inv = (0..q)
            .map(|i| if i == 0 { 0 } else { f.index(&lvl.inv(&elems[i]).unwrap()) as u16 })
            .collect();
        Self { q, add, mul, neg, inv }
    }

    fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q + b as usize]
    }

    fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q + b as usize]
    }

    fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg[b as usize])
    }
}

/// Row-echelon basis of a subspace of F_q^len.
#[derive(Clone)]
struct Echelon {
    rows: Vec<(usize, Vec<u16>)>,
}

impl Echelon {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, f: &SmallField, v: &[u16]) -> Vec<u16> {
        let mut v = v.to_vec();
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, *r));
                }
            }
        }
        v
    }

    /// Adds `v`; returns false when it was already in the span.
    fn insert(&mut self, f: &SmallField, v: &[u16]) -> bool {
        let mut v = self.reduce(f, v);
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = f.inv[v[piv] as usize];
        for x in v.iter_mut() {
            *x = f.mul(*x, s);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                for (x, y) in row.iter_mut().zip(&v) {
                    *x = f.sub(*x, f.mul(c, *y));
                }
            }
        }
        self.rows.push((piv, v));
        true
    }
}

/// Solves sum_i x_i * cols[i] = target, columns assumed independent.
fn solve_combination(f: &SmallField, cols: &[Vec<u16>], target: &[u16]) -> Option<Vec<u16>> {
    let r = cols.len();
    let len = target.len();
    // augmented rows: len equations, r unknowns
    let mut m: Vec<Vec<u16>> = (0..len)
        .map(|e| {
            let mut row: Vec<u16> = cols.iter().map(|c| c[e]).collect();
            row.push(target[e]);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(pr) = (row..len).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(row, pr);
        let s = f.inv[m[row][col] as usize];
        for x in m[row].iter_mut() {
            *x = f.mul(*x, s);
        }
        for i in 0..len {
            if i != row && m[i][col] != 0 {
                let c = m[i][col];
                let pivot_row = m[row].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = f.sub(*x, f.mul(c, *y));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r_| r_[r] != 0) {
        return None;
    }
    let mut x = vec![0u16; r];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = m[i][r];
    }
    Some(x)
}

struct Search<'a> {
    f: &'a SmallField,
    cands: Vec<(Vec<u16>, Vec<u16>, Vec<u16>)>,
    target_span: Echelon,
    budget: u64,
    nodes: u64,
}

enum Step {
    Found(Vec<usize>),
    None,
    Aborted,
}

impl Search<'_> {
    fn dfs(&mut self, r: usize, start: usize, chosen: &mut Vec<usize>, own: &Echelon, joint: &Echelon) -> Step {
        if chosen.len() == r {
            return if joint.dim() == r { Step::Found(chosen.clone()) } else { Step::None };
        }
        let need = r - chosen.len();
        for i in start..self.cands.len() {
            if self.cands.len() - i < need {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::Aborted;
            }
            let m = &self.cands[i].2;
            let mut own2 = own.clone();
            if !own2.insert(self.f, m) {
                continue;
            }
            let mut joint2 = joint.clone();
            joint2.insert(self.f, m);
            // the target slices must end up inside the span of the r chosen matrices
            if joint2.dim() > r {
                continue;
            }
            chosen.push(i);
            match self.dfs(r, i + 1, chosen, &own2, &joint2) {
                Step::None => {}
                other => return other,
            }
            chosen.pop();
        }
        Step::None
    }
}

fn vectors(q: usize, n: usize, normalize: bool) -> Vec<Vec<u16>> {
    let total = q.pow(n as u32);
    (1..total)
        .map(|idx| {
            let mut rest = idx;
            (0..n)
                .map(|_| {
                    let d = rest % q;
                    rest /= q;
                    d as u16
                })
                .collect::<Vec<u16>>()
        })
        .filter(|v| !normalize || v.iter().find(|&&x| x != 0) == Some(&1))
        .collect()
}

/// Least rank r <= r_max of a decomposition of multiplication in F_{q^n}/F_q.
pub fn brute_force_rank(
    q: &FieldDescriptor,
    n: usize,
    r_max: usize,
    budget: u64,
) -> Result<RankSearchReport, DecompError> {
    brute_force_rank_with(q, n, r_max, budget, true)
}

/// As [`brute_force_rank`]; `normalize = false` enumerates every nonzero `a`, `b`
/// instead of one representative per scalar class.
pub fn brute_force_rank_with(
    q: &FieldDescriptor,
    n: usize,
    r_max: usize,
    budget: u64,
    normalize: bool,
) -> Result<RankSearchReport, DecompError> {
    if n == 0 {
        return Err(DecompError::DimensionMismatch("n must be positive".into()));
    }
    if r_max > MAX_SEARCH_RANK {
        return Err(DecompError::ParameterTooLarge(format!("r_max {r_max} exceeds {MAX_SEARCH_RANK}")));
    }
    let size = (q.cardinality()).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > MAX_SEARCH_FIELD {
        return Err(DecompError::ParameterTooLarge(format!("q^n = {size} exceeds {MAX_SEARCH_FIELD}")));
    }
    let ext = field_extend(q, n)?;
    let levels = q.chain().len();
    let f = SmallField::new(q);
    let qs = f.q;
    let to_idx = |e: &FieldElement| q.index(e) as u16;

    // slices T_l[j][k] = coordinate l of e_j * e_k
    let basis: Vec<FieldElement> = (0..n)
        .map(|i| {
            let mut v = vec![q.zero(); n];
            v[i] = q.one();
            ext.from_coords_over(&v, levels)
        })
        .collect();
    let mut slices = vec![vec![0u16; n * n]; n];
    let el = ext.level();
    for j in 0..n {
        for k in 0..n {
            let prod = ext.coords_over(&el.mul(&basis[j], &basis[k]), levels);
            for (l, c) in prod.iter().enumerate() {
                slices[l][j * n + k] = to_idx(c);
            }
        }
    }

    let vs = vectors(qs, n, normalize);
    let mut cands = Vec::with_capacity(vs.len() * vs.len());
    for a in &vs {
        for b in &vs {
            let m: Vec<u16> = (0..n * n).map(|e| f.mul(a[e / n], b[e % n])).collect();
            cands.push((a.clone(), b.clone(), m));
        }
    }

    let mut target_span = Echelon::new();
    for s in &slices {
        target_span.insert(&f, s);
    }
    let mut search = Search { f: &f, cands, target_span, budget, nodes: 0 };
    let mut outcome = SearchOutcome::ExhaustedNoneExists;
    for r in 1..=r_max {
        if r < search.target_span.dim() {
            continue;
        }
        let joint = search.target_span.clone();
        match search.dfs(r, 0, &mut Vec::new(), &Echelon::new(), &joint) {
            Step::Found(idx) => {
                let cols: Vec<Vec<u16>> = idx.iter().map(|&i| search.cands[i].2.clone()).collect();
                let coeffs: Vec<Vec<u16>> = slices
                    .iter()
                    .map(|s| solve_combination(&f, &cols, s).expect("slices lie in the span"))
                    .collect();
                let el = |x: u16| q.from_index(x as u128);
                let triples = idx
                    .iter()
                    .enumerate()
                    .map(|(t, &i)| Triple {
                        a: search.cands[i].0.iter().map(|&x| el(x)).collect(),
                        b: search.cands[i].1.iter().map(|&x| el(x)).collect(),
                        c: (0..n).map(|l| el(coeffs[l][t])).collect(),
                    })
                    .collect();
                let d = BilinearDecomposition::with_extension(q.clone(), ext.clone(), triples)?;
                debug_assert!(verify_decomposition(&d)?);
                outcome = SearchOutcome::Found(d);
                break;
            }
            Step::None => {}
            Step::Aborted => {
                outcome = SearchOutcome::Aborted { budget };
                break;
            }
        }
    }
    Ok(RankSearchReport {
        q: q.cardinality(),
        n,
        r_max,
        outcome,
        nodes_explored: search.nodes.min(budget),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf_core::field_of_order;

    fn pe(v: u64) -> FieldElement {
        FieldElement::Prime(v)
    }

    fn karatsuba_f2() -> BilinearDecomposition {
        // points 0, 1 and infinity over F_2, reduced modulo x^2 + x + 1
        let f2 = field_make_prime(2).unwrap();
        let t = |a: [u64; 2], b: [u64; 2], c: [u64; 2]| Triple {
            a: a.iter().map(|&v| pe(v)).collect(),
            b: b.iter().map(|&v| pe(v)).collect(),
            c: c.iter().map(|&v| pe(v)).collect(),
        };
        let triples = vec![t([1, 0], [1, 0], [1, 1]), t([1, 1], [1, 1], [0, 1]), t([0, 1], [0, 1], [1, 0])];
        BilinearDecomposition::new(f2, vec![pe(1), pe(1)], triples).unwrap()
    }

    #[test]
    fn karatsuba_by_hand() {
        let d = karatsuba_f2();
        assert!(verify_decomposition(&d).unwrap());
        assert!(d.verify_exhaustive().unwrap());
        let x = FieldElement::Ext(vec![pe(0), pe(1)]);
        let x1 = FieldElement::Ext(vec![pe(1), pe(1)]);
        let one = d.extension().one();
        assert_eq!(decomposition_apply(&d, &x, &x1).unwrap(), one);
        assert_eq!(decomposition_apply(&d, &x, &one).unwrap(), x);
        assert_eq!(decomposition_apply(&d, &d.extension().zero(), &x1).unwrap(), d.extension().zero());
    }

    #[test]
    fn zeroed_c_breaks_verification() {
        let d = karatsuba_f2();
        let mut triples = d.triples().to_vec();
        triples[0].c = vec![pe(0), pe(0)];
        let bad = BilinearDecomposition::new(d.base().clone(), vec![pe(1), pe(1)], triples).unwrap();
        assert_eq!(bad.failing_pair().unwrap(), Some((0, 0)));
    }

    #[test]
    fn dimension_mismatch() {
        let d = karatsuba_f2();
        let mut triples = d.triples().to_vec();
        triples[1].a.push(pe(0));
        let err = BilinearDecomposition::new(d.base().clone(), vec![pe(1), pe(1)], triples).unwrap_err();
        assert!(matches!(err, DecompError::DimensionMismatch(_)));
    }

    #[test]
    fn json_roundtrip_and_rank_check() {
        let d = karatsuba_f2();
        let text = decomposition_to_json(&d);
        let back = decomposition_from_json(&text, false).unwrap();
        assert_eq!(back, d);
        assert_eq!(decomposition_to_json(&back), text);
        let bad = text.replace("\"rank\": 3", "\"rank\": 4");
        assert!(matches!(decomposition_from_json(&bad, false), Err(DecompError::ValidationError(_))));
        assert!(matches!(decomposition_from_json("{", false), Err(DecompError::ParseError(_))));
    }

    #[test]
    fn search_f2_n2() {
        let f2 = field_make_prime(2).unwrap();
        let rep = brute_force_rank(&f2, 2, 3, DEFAULT_BUDGET).unwrap();
        match &rep.outcome {
            SearchOutcome::Found(d) => {
                assert_eq!(d.rank(), 3);
                assert!(verify_decomposition(d).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
        let rep2 = brute_force_rank(&f2, 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(rep2.outcome, SearchOutcome::ExhaustedNoneExists);
    }

    #[test]
    fn search_trivial_and_limits() {
        let f2 = field_make_prime(2).unwrap();
        let rep = brute_force_rank(&f2, 1, 1, DEFAULT_BUDGET).unwrap();
        assert!(matches!(rep.outcome, SearchOutcome::Found(ref d) if d.rank() == 1));
        assert!(matches!(brute_force_rank(&f2, 2, 10, 10), Err(DecompError::ParameterTooLarge(_))));
        let f4 = field_of_order(4).unwrap();
        assert!(matches!(brute_force_rank(&f4, 5, 9, 10), Err(DecompError::ParameterTooLarge(_))));
    }

    #[test]
    fn search_budget_aborts() {
        let f2 = field_make_prime(2).unwrap();
        let rep = brute_force_rank(&f2, 3, 6, 5).unwrap();
        assert_eq!(rep.outcome, SearchOutcome::Aborted { budget: 5 });
    }

    #[test]
    fn search_is_deterministic() {
        let f3 = field_make_prime(3).unwrap();
        let a = brute_force_rank(&f3, 2, 3, DEFAULT_BUDGET).unwrap();
        let b = brute_force_rank(&f3, 2, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(a, b);
    }
}
