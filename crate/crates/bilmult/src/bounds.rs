//! Bound engine for the bilinear complexity mu_q(n): lower bounds, exact
//! values, constructive ranks, tower-based bounds (with derivative
//! evaluations), composition and the uniform linear constants, plus exact
//! rational reports on the asymptotic slopes m_q and M_q.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::constructor::{compose_decompositions, toom_construct, ConstructError};
use crate::gf_core::{field_extend, field_of_order, prime_power};
use crate::tensor_decomp::BilinearDecomposition;
use crate::towers::{select_step, FamilyKind, TowerFamily, TowerStep};

/// Largest q^n for which witnesses are built.
pub const WITNESS_CAP: u128 = 1 << 14;

/// Largest intermediate field order the composition search visits.
pub const MAX_COMPOSITION_FIELD: u64 = 1 << 62;

/// Steps scanned per family by the derivative bounds.
const MAX_SCAN_STEPS: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("A(q) is unknown for non-square q = {0}; supply a lower bound")]
    MissingAq(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    Lower,
    Upper,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    LowerInterpolation,
    LowerStrict,
    ExactInterpolation,
    ExactElliptic,
    ExactKnown,
    Toom,
    TowerSimple,
    DerivativeDeg1,
    DerivativeDeg12,
    Composition,
    Cq,
    CqAffine,
}

impl Method {
    pub fn id(self) -> &'static str {
        match self {
            Method::LowerInterpolation => "lower-2n-1",
            Method::LowerStrict => "lower-2n",
            Method::ExactInterpolation => "exact-2n-1",
            Method::ExactElliptic => "exact-2n",
            Method::ExactKnown => "exact-known",
            Method::Toom => "toom",
            Method::TowerSimple => "tower-simple",
            Method::DerivativeDeg1 => "derivative-deg1",
            Method::DerivativeDeg12 => "derivative-deg12",
            Method::Composition => "composition",
            Method::Cq => "cq",
            Method::CqAffine => "cq-affine",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            Method::LowerInterpolation => "Winograd-de Groote lower bound mu_q(n) >= 2n-1",
            Method::LowerStrict => "Winograd-de Groote equality range: mu_q(n) > 2n-1 when n > q/2+1",
            Method::ExactInterpolation => "Winograd-de Groote equality mu_q(n) = 2n-1 for n <= q/2+1",
            Method::ExactElliptic => "Shokrollahi elliptic range q/2+1 < n < (q+1+eps(q))/2 gives mu_q(n) = 2n",
            Method::ExactKnown => "known exact values mu_q(2)=3; mu_2(4)=9; mu_4(4)=mu_5(4)=8; mu_2(6)=15",
            Method::Toom => "Toom/Winograd evaluation-interpolation of rank 2n-1",
            Method::TowerSimple => "Chudnovsky-type algorithm on a tower step (2n+g-1 / 3n+3g / 3n+6g)",
            Method::DerivativeDeg1 => "Arnaud-type derivative evaluation on degree-1 places: 2n+g-1+a",
            Method::DerivativeDeg12 => "Arnaud-type derivative evaluation on degree-1 and 2 places: 3n+3g/2+a1/2+3a2",
            Method::Composition => "Chudnovsky composition mu_q(mn) <= mu_q(n) mu_{q^n}(m)",
            Method::Cq => "uniform linear constant mu_q(n) <= C_q n",
            Method::CqAffine => "Cenk-Ozbudak / affine q=2 bound mu_2(n) <= (477/26)n + 45/2",
        }
    }

    /// Tie-break rank: exact, constructive, tower, composition, C_q.
    pub fn priority(self) -> u8 {
        match self {
            Method::ExactInterpolation | Method::ExactElliptic | Method::ExactKnown => 0,
            Method::Toom => 1,
            Method::TowerSimple | Method::DerivativeDeg1 | Method::DerivativeDeg12 => 2,
            Method::Composition => 3,
            Method::Cq | Method::CqAffine => 4,
            Method::LowerInterpolation | Method::LowerStrict => 5,
        }
    }

    pub fn is_exact(self) -> bool {
        self.priority() == 0
    }
}

/// How to rebuild a decomposition achieving a bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Recipe {
    Toom,
    /// Inner algorithm for degree d over F_q, outer one for degree n/d over F_{q^d}.
    Compose { d: u64, inner: Box<Recipe>, outer: Box<Recipe> },
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Toom => f.write_str("toom"),
            Recipe::Compose { d, inner, outer } => write!(f, "compose(d={d}; {inner}; {outer})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundResult {
    pub q: u64,
    pub n: u64,
    pub kind: BoundKind,
    pub value: u64,
    pub method: Method,
    pub citation: &'static str,
    pub params: BTreeMap<String, String>,
    pub construction: Option<Recipe>,
    pub witness: Option<BilinearDecomposition>,
}

impl BoundResult {
    fn new(q: u64, n: u64, kind: BoundKind, value: u64, method: Method) -> Self {
        Self {
            q,
            n,
            kind,
            value,
            method,
            citation: method.citation(),
            params: BTreeMap::new(),
            construction: None,
            witness: None,
        }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    fn better_than(&self, other: &BoundResult) -> bool {
        (self.value, self.method.priority()) < (other.value, other.method.priority())
    }

    /// Parameters as `key=value` pairs joined by `;`.
    pub fn params_string(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

fn check_q(q: u64) -> Result<(u64, u32), BoundError> {
    prime_power(q).ok_or_else(|| BoundError::InvalidInput(format!("{q} is not a prime power")))
}

fn check_n(n: u64) -> Result<(), BoundError> {
    if n == 0 {
        return Err(BoundError::InvalidInput("n must be positive".into()));
    }
    Ok(())
}

/// 2 sqrt(q) for squares, else the largest integer <= 2 sqrt(q) prime to q.
pub fn epsilon(q: u64) -> u64 {
    let s = q.sqrt();
    if s * s == q {
        return 2 * s;
    }
    let mut e = ((q as u128) * 4).sqrt() as u64;
    while e > 1 && e.gcd(&q) != 1 {
        e -= 1;
    }
    e
}

pub fn lower_bound(q: u64, n: u64) -> Result<BoundResult, BoundError> {
    check_q(q)?;
    check_n(n)?;
    let r = if 2 * n <= q + 2 {
        BoundResult::new(q, n, BoundKind::Lower, 2 * n - 1, Method::LowerInterpolation)
    } else {
        BoundResult::new(q, n, BoundKind::Lower, 2 * n, Method::LowerStrict)
    };
    Ok(r)
}

const KNOWN_EXACT: [(u64, u64, u64); 4] = [(2, 4, 9), (4, 4, 8), (5, 4, 8), (2, 6, 15)];

pub fn exact_value(q: u64, n: u64) -> Result<Option<BoundResult>, BoundError> {
    check_q(q)?;
    check_n(n)?;
    if 2 * n <= q + 2 {
        return Ok(Some(BoundResult::new(q, n, BoundKind::Upper, 2 * n - 1, Method::ExactInterpolation)));
    }
    if 2 * n < q + 1 + epsilon(q) {
        let r = BoundResult::new(q, n, BoundKind::Upper, 2 * n, Method::ExactElliptic).param("eps", epsilon(q));
        return Ok(Some(r));
    }
    Ok(KNOWN_EXACT
        .iter()
        .find(|&&(kq, kn, _)| kq == q && kn == n)
        .map(|&(_, _, v)| BoundResult::new(q, n, BoundKind::Upper, v, Method::ExactKnown)))
}

fn toom_rule(q: u64, n: u64) -> Option<BoundResult> {
    (2 * n <= q + 2).then(|| {
        let mut r = BoundResult::new(q, n, BoundKind::Upper, 2 * n - 1, Method::Toom).param("points", 2 * n - 2);
        r.construction = Some(Recipe::Toom);
        r
    })
}

fn to_u64(x: &BigInt) -> Option<u64> {
    x.to_u64()
}

fn step_params(r: BoundResult, st: &TowerStep) -> BoundResult {
    let mut r = r.param("family", st.family.kind).param("step", st.label()).param("genus", st.genus_bound());
    r = r.param("places", &st.places_lower);
    r
}

/// Families whose steps are used with degree-1 places over F_q.
pub fn deg1_families(q: u64) -> Vec<TowerFamily> {
    let mut out = Vec::new();
    let s = q.sqrt();
    if s * s == q {
        if let Some((p, r)) = prime_power(s) {
            if s >= 4 {
                out.extend(TowerFamily::new(FamilyKind::GsT2, p, r).ok());
            }
            if r == 1 && p >= 5 {
                out.extend(TowerFamily::new(FamilyKind::KummerP2, p, 1).ok());
            }
        }
    }
    out
}

/// Families whose steps are used with degree-1 and degree-2 places over F_q.
pub fn deg12_families(q: u64) -> Vec<TowerFamily> {
    let mut out = Vec::new();
    if let Some((p, r)) = prime_power(q) {
        if q >= 4 {
            out.extend(TowerFamily::new(FamilyKind::GsT3, p, r).ok());
        }
        if r == 1 && p >= 5 {
            out.extend(TowerFamily::new(FamilyKind::KummerP, p, 1).ok());
        }
    }
    out
}

/// Cases 2n+g-1, 3n+3g and 3n+6g of the basic tower theorem on the step
/// chosen by [`select_step`], best over every family applicable to F_q.
pub fn tower_bound_simple(q: u64, n: u64) -> Result<BoundResult, BoundError> {
    check_q(q)?;
    check_n(n)?;
    let mut best: Option<BoundResult> = None;
    for fam in deg1_families(q).into_iter().chain(deg12_families(q)) {
        if let Ok(r) = tower_bound_simple_family(&fam, n) {
            if best.as_ref().is_none_or(|b| r.better_than(b)) {
                best = Some(r);
            }
        }
    }
    best.ok_or_else(|| BoundError::NotApplicable(format!("no tower family applies to F_{q} at n = {n}")))
}

/// [`tower_bound_simple`] restricted to one family. The bound is over the
/// field the family's steps are used on: F_{Q^2} for the degree-1 kinds,
/// F_Q for T3 and the Kummer tower over F_p.
pub fn tower_bound_simple_family(fam: &TowerFamily, n: u64) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    let q = fam.constant_field();
    let st = select_step(fam, n).map_err(|e| BoundError::NotApplicable(e.to_string()))?;
    if !st.degree_n_place_certified(n) {
        return Err(BoundError::NotApplicable(format!("no certified place of degree {n} on step {}", st.label())));
    }
    let nb = BigInt::from(n);
    let g = st.genus_bound().clone();
    let big_n = &st.places_lower;
    let mut best: Option<BoundResult> = None;
    let mut emit = |case: u8, v: BigInt| {
        if let Some(v) = to_u64(&v) {
            let mut r = step_params(BoundResult::new(q, n, BoundKind::Upper, 0, Method::TowerSimple), &st).param("case", case);
            r.value = v;
            if best.as_ref().is_none_or(|b| r.value < b.value) {
                best = Some(r);
            }
        }
    };
    let deg1_count = if fam.kind.uses_degree_two() { st.n1.map(BigInt::from) } else { Some(big_n.clone()) };
    if let Some(n1) = deg1_count {
        if n1 > &nb * 2 + &g * 2u32 - 2u32 {
            emit(1, &nb * 2 + &g - 1u32);
        }
    }
    if fam.kind.uses_degree_two() {
        if st.nonspecial_divisor_certified() && *big_n > &nb * 2 + &g * 2u32 - 2u32 {
            emit(2, &nb * 3 + &g * 3u32);
        }
        if *big_n > &nb * 2 + &g * 4u32 - 2u32 {
            emit(3, &nb * 3 + &g * 6u32);
        }
    }
    best.ok_or_else(|| BoundError::NotApplicable(format!("step {} satisfies no case at n = {n}", st.label())))
}

fn scan_deg1(fam: &TowerFamily, q: u64, n: u64) -> Option<BoundResult> {
    let nb = BigInt::from(n);
    let mut best: Option<(BigInt, BoundResult)> = None;
    for st in fam.steps().take(MAX_SCAN_STEPS) {
        let floor_val = &nb * 2 + &st.genus_lower - 1;
        if best.as_ref().is_some_and(|(b, _)| floor_val >= *b) {
            break;
        }
        let g = st.genus_bound();
        let big_n = &st.places_lower;
        let need: BigInt = &nb * 2 + g * 2 - 1;
        let a = (&need - big_n).max(BigInt::zero());
        if a > *big_n || a > st.d_guard {
            continue;
        }
        if a.is_positive() && !st.nonspecial_divisor_certified() {
            continue;
        }
        if !st.degree_n_place_certified(n) {
            continue;
        }
        let v: BigInt = &nb * 2 + g - 1 + &a;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            let r = step_params(BoundResult::new(q, n, BoundKind::Upper, 0, Method::DerivativeDeg1), &st).param("a", &a);
            best = Some((v, r));
        }
    }
    let (v, mut r) = best?;
    r.value = to_u64(&v)?;
    Some(r)
}

/// Best 2n + g - 1 + a over the steps of the degree-1 families of F_q.
pub fn derivative_bound_deg1(q: u64, n: u64) -> Result<BoundResult, BoundError> {
    check_q(q)?;
    check_n(n)?;
    let mut best: Option<BoundResult> = None;
    for fam in deg1_families(q) {
        if let Some(r) = scan_deg1(&fam, q, n) {
            if best.as_ref().is_none_or(|b| r.value < b.value) {
                best = Some(r);
            }
        }
    }
    best.ok_or_else(|| BoundError::NotApplicable(format!("no degree-1 tower data for F_{q} at n = {n}")))
}

fn scan_deg12(fam: &TowerFamily, q: u64, n: u64) -> Option<BoundResult> {
    let nb = BigInt::from(n);
    let two = BigInt::from(2);
    let mut best: Option<(BigInt, BoundResult)> = None;
    for st in fam.steps().take(MAX_SCAN_STEPS) {
        // the value is at least 3n + 3g/2 >= 2n + g - 1
        let floor_val = &nb * 2 + &st.genus_lower - 1;
        if best.as_ref().is_some_and(|(b, _)| floor_val >= *b) {
            break;
        }
        if !st.nonspecial_divisor_certified() || !st.degree_n_place_certified(n) {
            continue;
        }
        let g = st.genus_bound();
        let big_n = &st.places_lower;
        let need: BigInt = &nb * 2 + g * 2 - 1;
        let delta = (&need - big_n).max(BigInt::zero());
        let mut cands: Vec<(BigInt, &'static str, BigInt, BigInt)> = Vec::new();
        match (st.n1, st.n2) {
            (Some(n1), Some(n2)) => {
                let (n1, n2) = (BigInt::from(n1), BigInt::from(n2));
                let a1 = delta.clone().min(n1);
                let a2 = (&delta - &a1 + 1u32) / &two;
                if a2 <= n2 && &a1 + &a2 * 2 <= st.d_guard.clone().max(BigInt::zero()) || delta.is_zero() {
                    let three_halves = (&nb * 6 + g * 3 + &a1 + &a2 * 6) / &two;
                    cands.push((three_halves, "3n+3g/2+a1/2+3a2", a1.clone(), a2.clone()));
                    cands.push((&nb * 2 + g + &n2 + &a1 + &a2 * 4, "2n+g+N2+a1+4a2", a1, a2));
                }
            }
            _ => {
                let even = if delta.is_even() { delta.clone() } else { &delta + 1 };
                if even <= *big_n && (even.is_zero() || even <= st.d_guard) {
                    let v = (&nb * 6 + g * 3 + &even * 3) / &two;
                    cands.push((v, "3n+3g/2+3(a1+2a2)/2", BigInt::zero(), &even / &two));
                }
            }
        }
        for (v, shape, a1, a2) in cands {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                let r = step_params(BoundResult::new(q, n, BoundKind::Upper, 0, Method::DerivativeDeg12), &st)
                    .param("shape", shape)
                    .param("a1", a1)
                    .param("a2", a2);
                best = Some((v, r));
            }
        }
    }
    let (v, mut r) = best?;
    r.value = to_u64(&v)?;
    Some(r)
}

/// Best of the two degree-1/degree-2 derivative bounds over the families of F_q.
pub fn derivative_bound_deg12(q: u64, n: u64) -> Result<BoundResult, BoundError> {
    check_q(q)?;
    check_n(n)?;
    let mut best: Option<BoundResult> = None;
    for fam in deg12_families(q) {
        if let Some(r) = scan_deg12(&fam, q, n) {
            if best.as_ref().is_none_or(|b| r.value < b.value) {
                best = Some(r);
            }
        }
    }
    best.ok_or_else(|| BoundError::NotApplicable(format!("no degree-1/2 tower data for F_{q} at n = {n}")))
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ri(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The uniform constant C_q, first matching case.
pub fn cq_constant(q: u64) -> Result<BigRational, BoundError> {
    let (p, r) = check_q(q)?;
    let one = ri(1);
    let c = if q == 2 {
        ri(22)
    } else if q == 3 {
        ri(27)
    } else if r == 1 {
        // q = p >= 5
        ri(3) * (&one + ri(4) / ri(q - 3))
    } else if r == 2 && q >= 25 {
        ri(2) * (&one + ri(2) / ri(p - 3))
    } else if r % 2 == 0 && q >= 16 {
        let big_q = ri(p.pow(r / 2));
        let denom = &big_q - ri(3) + ri(p - 1) * (&one - &one / (&big_q + &one));
        ri(2) * (&one + ri(p) / denom)
    } else {
        ri(6) * (&one + ri(p) / ri(q - 3))
    };
    Ok(c)
}

fn floor_u64(x: &BigRational) -> Option<u64> {
    x.floor().to_integer().to_u64()
}

pub fn cq_bound(q: u64, n: u64) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    let c = cq_constant(q)?;
    let lin = floor_u64(&(&c * ri(n))).ok_or_else(|| BoundError::InvalidInput("value overflow".into()))?;
    let mut r = BoundResult::new(q, n, BoundKind::Upper, lin, Method::Cq).param("C_q", fmt_rat(&c));
    if q == 2 {
        let aff = rat(477, 26) * ri(n) + rat(45, 2);
        if let Some(v) = floor_u64(&aff) {
            if v < lin {
                r = BoundResult::new(q, n, BoundKind::Upper, v, Method::CqAffine).param("C_q", fmt_rat(&c));
            }
        }
    }
    Ok(r)
}

/// Exact rational as `num/den`.
pub fn fmt_rat(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn memo() -> &'static DashMap<(u64, u64), BoundResult> {
    static MEMO: OnceLock<DashMap<(u64, u64), BoundResult>> = OnceLock::new();
    MEMO.get_or_init(DashMap::new)
}

fn divisors(n: u64) -> Vec<u64> {
    (2..n).filter(|d| n % d == 0).collect()
}

/// min over proper divisors d of n of best(q, d) * best(q^d, n/d), with at
/// most `depth_limit` nested compositions (`None`: no limit; both factors are
/// smaller than n, so the recursion ends anyway).
pub fn composition_bound(q: u64, n: u64, depth_limit: Option<u32>) -> Result<Option<BoundResult>, BoundError> {
    check_q(q)?;
    check_n(n)?;
    Ok(composition_at(q, n, depth_limit))
}

fn composition_at(q: u64, n: u64, depth: Option<u32>) -> Option<BoundResult> {
    if depth == Some(0) {
        return None;
    }
    let sub = depth.map(|d| d - 1);
    let mut best: Option<BoundResult> = None;
    for d in divisors(n) {
        let Some(qd) = q.checked_pow(d as u32).filter(|&v| v <= MAX_COMPOSITION_FIELD) else {
            continue;
        };
        let m = n / d;
        let inner = best_with_depth(q, d, sub);
        let outer = best_with_depth(qd, m, sub);
        let Some(v) = inner.value.checked_mul(outer.value) else { continue };
        let better = match &best {
            None => true,
            Some(b) => v < b.value || (v == b.value && b.construction.is_none() && inner.construction.is_some() && outer.construction.is_some()),
        };
        if better {
            let mut r = BoundResult::new(q, n, BoundKind::Upper, v, Method::Composition)
                .param("d", d)
                .param("inner", format!("{}:{}", inner.value, inner.method.id()))
                .param("outer", format!("{}:{}", outer.value, outer.method.id()));
            if let (Some(i), Some(o)) = (&inner.construction, &outer.construction) {
                r.construction = Some(Recipe::Compose { d, inner: Box::new(i.clone()), outer: Box::new(o.clone()) });
            }
            best = Some(r);
        }
    }
    best
}

fn best_at(q: u64, n: u64) -> BoundResult {
    if let Some(r) = memo().get(&(q, n)) {
        return r.clone();
    }
    let r = compute_best(q, n, None);
    memo().insert((q, n), r.clone());
    r
}

fn best_with_depth(q: u64, n: u64, depth: Option<u32>) -> BoundResult {
    match depth {
        None => best_at(q, n),
        Some(_) => compute_best(q, n, depth),
    }
}

fn compute_best(q: u64, n: u64, depth: Option<u32>) -> BoundResult {
    let mut cands: Vec<BoundResult> = Vec::new();
    let exact = exact_value(q, n).ok().flatten();
    let interpolation = exact.as_ref().is_some_and(|e| e.method == Method::ExactInterpolation);
    cands.extend(exact);
    cands.extend(toom_rule(q, n));
    // in the interpolation range nothing beats 2n - 1
    if !interpolation {
        cands.extend(tower_bound_simple(q, n).ok());
        cands.extend(derivative_bound_deg1(q, n).ok());
        cands.extend(derivative_bound_deg12(q, n).ok());
        cands.extend(cq_bound(q, n).ok());
    }
    if n > 1 {
        cands.extend(composition_at(q, n, depth));
    }
    let mut best = cands[0].clone();
    for c in &cands[1..] {
        if c.better_than(&best) {
            best = c.clone();
        }
    }
    if best.construction.is_none() {
        if let Some(c) = cands.iter().find(|c| c.value == best.value && c.construction.is_some()) {
            best.construction = c.construction.clone();
            best.params.insert("construction".into(), c.method.id().into());
        }
    }
    best
}

/// Builds the decomposition described by `recipe` over the canonical F_q.
pub fn build_witness(q: u64, n: u64, recipe: &Recipe) -> Result<BilinearDecomposition, ConstructError> {
    let base = field_of_order(q)?;
    build_over(&base, n, recipe)
}

fn build_over(
    base: &crate::gf_core::FieldDescriptor,
    n: u64,
    recipe: &Recipe,
) -> Result<BilinearDecomposition, ConstructError> {
    match recipe {
        Recipe::Toom => toom_construct(base, n as usize),
        Recipe::Compose { d, inner, outer } => {
            let i = build_over(base, *d, inner)?;
            let mid = field_extend(base, *d as usize)?;
            let o = build_over(&mid, n / d, outer)?;
            compose_decompositions(&o, &i)
        }
    }
}

/// The smallest upper bound any rule gives, with a verified witness attached
/// when a constructive rule reaches the same value and q^n <= [`WITNESS_CAP`].
pub fn best_upper_bound(q: u64, n: u64) -> Result<BoundResult, BoundError> {
    check_q(q)?;
    check_n(n)?;
    let mut r = best_at(q, n);
    let small = (q as u128).checked_pow(n as u32).is_some_and(|v| v <= WITNESS_CAP);
    if small {
        if let Some(recipe) = &r.construction {
            r.witness = build_witness(q, n, recipe).ok();
        }
    }
    Ok(r)
}

pub fn best_lower_bound(q: u64, n: u64) -> Result<BoundResult, BoundError> {
    if let Some(e) = exact_value(q, n)? {
        let mut r = e;
        r.kind = BoundKind::Lower;
        return Ok(r);
    }
    lower_bound(q, n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub n: u64,
    pub lower: BoundResult,
    pub upper: BoundResult,
}

impl TableRow {
    /// upper / lower as an exact rational.
    pub fn gap(&self) -> BigRational {
        BigRational::new(BigInt::from(self.upper.value), BigInt::from(self.lower.value))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundTable {
    pub q: u64,
    pub rows: Vec<TableRow>,
}

/// Rows n = 1..=n_max; witnesses are not built.
pub fn bound_table(q: u64, n_max: u64) -> Result<BoundTable, BoundError> {
    check_q(q)?;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        rows.push(TableRow { n, lower: best_lower_bound(q, n)?, upper: best_at(q, n) });
    }
    Ok(BoundTable { q, rows })
}

impl BoundTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lower,upper,method,citation\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.n, r.lower.value, r.upper.value, r.upper.method.id(), r.upper.citation));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "n": r.n,
                    "lower": r.lower.value,
                    "lower_method": r.lower.method.id(),
                    "upper": r.upper.value,
                    "method": r.upper.method.id(),
                    "citation": r.upper.citation,
                    "params": r.upper.params,
                    "gap": fmt_rat(&r.gap()),
                })
            })
            .collect();
        serde_json::json!({ "q": self.q, "rows": rows })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticEntry {
    /// "m_q" (liminf) or "M_q" (limsup).
    pub quantity: &'static str,
    pub kind: BoundKind,
    pub value: Option<BigRational>,
    pub citation: &'static str,
    pub applicable: bool,
    pub conditional: bool,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticReport {
    pub q: u64,
    pub aq: Option<BigRational>,
    pub aq_source: &'static str,
    pub entries: Vec<AsymptoticEntry>,
    pub notes: Vec<String>,
}

impl AsymptoticReport {
    /// Smallest applicable unconditional upper bound for the given quantity;
    /// bounds on M_q count for m_q as well.
    pub fn best_upper(&self, quantity: &str) -> Option<&BigRational> {
        self.entries
            .iter()
            .filter(|e| e.quantity == quantity || (quantity == "m_q" && e.quantity == "M_q"))
            .filter(|e| e.kind == BoundKind::Upper && e.applicable && !e.conditional)
            .filter_map(|e| e.value.as_ref())
            .min()
    }

    pub fn entry(&self, citation_prefix: &str) -> Option<&AsymptoticEntry> {
        self.entries.iter().find(|e| e.citation.starts_with(citation_prefix))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "quantity": e.quantity,
                    "kind": e.kind.to_string(),
                    "value": e.value.as_ref().map(fmt_rat),
                    "citation": e.citation,
                    "applicable": e.applicable,
                    "conditional": e.conditional,
                    "status": e.status,
                })
            })
            .collect();
        serde_json::json!({
            "q": self.q,
            "A_q": self.aq.as_ref().map(fmt_rat),
            "A_q_source": self.aq_source,
            "entries": entries,
            "notes": self.notes,
        })
    }
}

fn entry(
    quantity: &'static str,
    kind: BoundKind,
    citation: &'static str,
    value: Option<BigRational>,
    why_not: &str,
) -> AsymptoticEntry {
    let applicable = value.is_some();
    AsymptoticEntry {
        quantity,
        kind,
        value,
        citation,
        applicable,
        conditional: false,
        status: if applicable { "proved".into() } else { format!("inapplicable ({why_not})") },
    }
}

/// Exact bounds on m_q = liminf mu_q(n)/n and M_q = limsup mu_q(n)/n.
/// `aq` is a lower bound for Ihara's A(q); for squares it defaults to sqrt(q) - 1.
pub fn asymptotic_report(q: u64, aq: Option<BigRational>) -> Result<AsymptoticReport, BoundError> {
    let (p, r) = check_q(q)?;
    let one = ri(1);
    let s = q.sqrt();
    let square_root = (s * s == q && prime_power(s).is_some()).then_some(s);
    let (aq, aq_source) = match (aq, square_root) {
        (Some(a), _) => (Some(a), "user"),
        (None, Some(s)) => (Some(ri(s) - &one), "default sqrt(q)-1"),
        (None, None) => (None, "missing"),
    };
    let mut entries = Vec::new();

    let m_lower = if q == 2 { rat(88, 25) } else { ri(2) * (&one + &one / ri(q - 1)) };
    entries.push(entry("m_q", BoundKind::Lower, "lower bound on m_q (m_2 >= 88/25; m_q >= 2(1+1/(q-1)) for q > 2)", Some(m_lower), ""));

    let mut prop_a = entry(
        "m_q",
        BoundKind::Upper,
        "Ihara-constant bound m_q <= 2(1+1/(A(q)-2))",
        None,
        "needs A(q) > 2",
    );
    match &aq {
        Some(a) if *a > ri(2) => {
            prop_a.value = Some(ri(2) * (&one + &one / (a - ri(2))));
            prop_a.applicable = true;
            prop_a.conditional = aq_source == "user" && square_root.is_none();
            prop_a.status = if prop_a.conditional { "conditional on the supplied A(q)".into() } else { "proved".into() };
        }
        Some(_) => {}
        None => {
            prop_a.conditional = true;
            prop_a.status = "unavailable (MissingAq)".into();
        }
    }
    entries.push(prop_a);

    let sq = square_root.filter(|&s| s >= 4);
    entries.push(entry(
        "m_q",
        BoundKind::Upper,
        "square-field bound m_{Q^2} <= 2(1+1/(Q-3)) for Q >= 4",
        sq.map(|s| ri(2) * (&one + &one / ri(s - 3))),
        "needs q = Q^2 with Q >= 4",
    ));
    entries.push(entry(
        "m_q",
        BoundKind::Upper,
        "descent bound m_q <= 3(1+1/(q-3)) for q > 3",
        (q > 3).then(|| ri(3) * (&one + &one / ri(q - 3))),
        "needs q > 3",
    ));
    entries.push(entry(
        "M_q",
        BoundKind::Upper,
        "modular-curve bound M_{Q^2} <= 2(1+1/(Q-3)) for Q >= 4",
        sq.map(|s| ri(2) * (&one + &one / ri(s - 3))),
        "needs q = Q^2 with Q >= 4",
    ));
    entries.push(entry(
        "M_q",
        BoundKind::Upper,
        "odd-power bound M_q <= 3(1+2/(q-3)) for q = p^m with m odd and q >= 5",
        (r % 2 == 1 && q >= 5).then(|| ri(3) * (&one + ri(2) / ri(q - 3))),
        "needs an odd power q >= 5",
    ));
    entries.push(entry(
        "M_q",
        BoundKind::Upper,
        "Shimura-curve bound M_2 <= 27/2",
        (q == 2).then(|| rat(27, 2)),
        "only for q = 2",
    ));

    let mut notes = Vec::new();
    if q >= 3 {
        notes.push(
            "the 3n - o(n) lower bound for q >= 3 concerns straight-line polynomial multiplication and is not reported as a bound on m_q"
                .to_string(),
        );
    }
    let _ = p;
    Ok(AsymptoticReport { q, aq, aq_source, entries, notes })
}

/// Parses `num/den` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational, BoundError> {
    let bad = || BoundError::InvalidInput(format!("cannot parse {s:?} as a rational"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().map_err(|_| bad())?, d.trim().parse::<BigInt>().map_err(|_| bad())?),
        None => (s.trim().parse::<BigInt>().map_err(|_| bad())?, BigInt::from(1)),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}
