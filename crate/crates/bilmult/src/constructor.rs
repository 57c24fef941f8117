//! Constructive builders: evaluation/interpolation on the projective line,
//! truncated two-term products, and composition through an intermediate field.

use thiserror::Error;

use crate::gf_core::{field_extend, FieldDescriptor, FieldElement, GfError, Level, ENUMERATION_CAP};
use crate::tensor_decomp::{BilinearDecomposition, DecompError, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("too few points: F_{q} has {q} rational points besides infinity, {needed} are needed for n = {n}")]
    TooFewPoints { q: u128, n: usize, needed: usize },
    #[error("truncated products are only provided for u = 1 and u = 2, not u = {0}")]
    Unsupported(usize),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("no root of the flat modulus found in the tower field")]
    NoRootFound,
    #[error("field too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Field(#[from] GfError),
}

type Matrix = Vec<Vec<FieldElement>>;

fn identity(lvl: &Level<'_>, n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { lvl.one() } else { lvl.zero() }).collect())
        .collect()
}

fn mat_mul(lvl: &Level<'_>, a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(lvl.zero(), |acc, k| lvl.add(&acc, &lvl.mul(&row[k], &b[k][j]))))
                .collect()
        })
        .collect()
}

fn mat_vec(lvl: &Level<'_>, a: &Matrix, v: &[FieldElement]) -> Vec<FieldElement> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(lvl.zero(), |acc, (x, y)| lvl.add(&acc, &lvl.mul(x, y))))
        .collect()
}

fn transpose(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Gauss-Jordan inverse; `None` for a singular matrix.
fn mat_inverse(lvl: &Level<'_>, a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Matrix = a.clone();
    let mut inv = identity(lvl, n);
    for col in 0..n {
        let pr = (col..n).find(|&i| !lvl.is_zero(&m[i][col]))?;
        m.swap(col, pr);
        inv.swap(col, pr);
        let s = lvl.inv(&m[col][col]).ok()?;
        for j in 0..n {
            m[col][j] = lvl.mul(&m[col][j], &s);
            inv[col][j] = lvl.mul(&inv[col][j], &s);
        }
        for i in 0..n {
            if i == col || lvl.is_zero(&m[i][col]) {
                continue;
            }
            let c = m[i][col].clone();
            for j in 0..n {
                let t = lvl.mul(&c, &m[col][j]);
                m[i][j] = lvl.sub(&m[i][j], &t);
                let t = lvl.mul(&c, &inv[col][j]);
                inv[i][j] = lvl.sub(&inv[i][j], &t);
            }
        }
    }
    Some(inv)
}

/// Evaluation points, Vandermonde data and reduction matrix of the
/// evaluation/interpolation algorithm for F_{q^n}/F_q.
#[derive(Clone, Debug)]
pub struct InterpolationPlan {
    pub base: FieldDescriptor,
    pub ext: FieldDescriptor,
    pub n: usize,
    /// Finite points; infinity is implicit and comes last.
    pub points: Vec<FieldElement>,
    pub vandermonde: Matrix,
    pub vandermonde_inv: Matrix,
    /// n x (2n-1): coordinates of x^t modulo the field modulus, column t.
    pub reduction: Matrix,
}

impl InterpolationPlan {
    pub fn new(base: &FieldDescriptor, n: usize) -> Result<Self, ConstructError> {
        if n == 0 {
            return Err(GfError::ZeroDegree.into());
        }
        let needed = 2 * n - 2;
        let q = base.cardinality();
        if q < needed as u128 {
            return Err(ConstructError::TooFewPoints { q, n, needed });
        }
        let lvl = base.level();
        let points: Vec<FieldElement> = (0..needed as u128).map(|i| base.from_index(i)).collect();
        let size = 2 * n - 1;
        let mut vandermonde = Vec::with_capacity(size);
        for a in &points {
            let mut row = Vec::with_capacity(size);
            let mut pw = lvl.one();
            for _ in 0..size {
                row.push(pw.clone());
                pw = lvl.mul(&pw, a);
            }
            vandermonde.push(row);
        }
        let mut inf = vec![lvl.zero(); size];
        inf[size - 1] = lvl.one();
        vandermonde.push(inf);
        let vandermonde_inv = mat_inverse(&lvl, &vandermonde).expect("distinct points give an invertible Vandermonde");

        let ext = field_extend(base, n)?;
        let levels = base.chain().len();
        let el = ext.level();
        let x = if n == 1 {
            ext.one()
        } else {
            let mut v = vec![lvl.zero(); n];
            v[1] = lvl.one();
            ext.from_coords_over(&v, levels)
        };
        let mut cols = Vec::with_capacity(size);
        let mut pw = ext.one();
        for _ in 0..size {
            cols.push(ext.coords_over(&pw, levels));
            pw = el.mul(&pw, &x);
        }
        let reduction = transpose(&cols);
        Ok(Self { base: base.clone(), ext, n, points, vandermonde, vandermonde_inv, reduction })
    }

    /// The rank 2n-1 decomposition: evaluations at the points and at infinity,
    /// then interpolation followed by reduction.
    pub fn decomposition(&self) -> Result<BilinearDecomposition, ConstructError> {
        let lvl = self.base.level();
        let n = self.n;
        let recon = mat_mul(&lvl, &self.reduction, &self.vandermonde_inv);
        let mut triples = Vec::with_capacity(2 * n - 1);
        for i in 0..self.points.len() {
            let ev: Vec<FieldElement> = self.vandermonde[i][..n].to_vec();
            triples.push(Triple { a: ev.clone(), b: ev, c: recon.iter().map(|r| r[i].clone()).collect() });
        }
        let mut lead = vec![lvl.zero(); n];
        lead[n - 1] = lvl.one();
        let last = self.points.len();
        triples.push(Triple { a: lead.clone(), b: lead, c: recon.iter().map(|r| r[last].clone()).collect() });
        Ok(BilinearDecomposition::with_extension(self.base.clone(), self.ext.clone(), triples)?)
    }
}

/// Rank 2n-1 algorithm for F_{q^n}/F_q, available when q >= 2n-2.
pub fn toom_construct(base: &FieldDescriptor, n: usize) -> Result<BilinearDecomposition, ConstructError> {
    InterpolationPlan::new(base, n)?.decomposition()
}

/// Product of two u-term polynomials modulo x^u.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedProductAlgorithm {
    pub base: FieldDescriptor,
    pub u: usize,
    pub triples: Vec<Triple>,
}

impl TruncatedProductAlgorithm {
    pub fn rank(&self) -> usize {
        self.triples.len()
    }

    pub fn apply(&self, x: &[FieldElement], y: &[FieldElement]) -> Vec<FieldElement> {
        let lvl = self.base.level();
        let dot = |u: &[FieldElement], v: &[FieldElement]| {
            u.iter().zip(v).fold(lvl.zero(), |acc, (s, t)| lvl.add(&acc, &lvl.mul(s, t)))
        };
        let mut out = vec![lvl.zero(); self.u];
        for t in &self.triples {
            let s = lvl.mul(&dot(&t.a, x), &dot(&t.b, y));
            for (o, c) in out.iter_mut().zip(&t.c) {
                *o = lvl.add(o, &lvl.mul(&s, c));
            }
        }
        out
    }

    /// Compares against schoolbook multiplication on every pair of inputs.
    pub fn verify_exhaustive(&self) -> Result<bool, ConstructError> {
        let q = self.base.cardinality();
        let total = q.checked_pow(self.u as u32).filter(|&t| t <= ENUMERATION_CAP);
        let Some(total) = total else {
            return Err(ConstructError::TooLarge(format!("q^u for q = {q}, u = {}", self.u)));
        };
        let lvl = self.base.level();
        let vec_of = |mut idx: u128| {
            (0..self.u)
                .map(|_| {
                    let e = self.base.from_index(idx % q);
                    idx /= q;
                    e
                })
                .collect::<Vec<_>>()
        };
        for i in 0..total {
            let x = vec_of(i);
            for j in 0..total {
                let y = vec_of(j);
                let mut want = vec![lvl.zero(); self.u];
                for (s, xs) in x.iter().enumerate() {
                    for (t, yt) in y.iter().enumerate().take(self.u - s) {
                        want[s + t] = lvl.add(&want[s + t], &lvl.mul(xs, yt));
                    }
                }
                if self.apply(&x, &y) != want {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn karatsuba_truncated(base: &FieldDescriptor, u: usize) -> Result<TruncatedProductAlgorithm, ConstructError> {
    let lvl = base.level();
    let (o, z) = (lvl.one(), lvl.zero());
    let m1 = lvl.neg(&o);
    let triples = match u {
        1 => vec![Triple { a: vec![o.clone()], b: vec![o.clone()], c: vec![o] }],
        2 => vec![
            // m1 = a0 b0, m2 = a1 b1, m3 = (a0 + a1)(b0 + b1)
            Triple { a: vec![o.clone(), z.clone()], b: vec![o.clone(), z.clone()], c: vec![o.clone(), m1.clone()] },
            Triple { a: vec![z.clone(), o.clone()], b: vec![z.clone(), o.clone()], c: vec![z.clone(), m1] },
            Triple { a: vec![o.clone(), o.clone()], b: vec![o.clone(), o.clone()], c: vec![z, o] },
        ],
        _ => return Err(ConstructError::Unsupported(u)),
    };
    Ok(TruncatedProductAlgorithm { base: base.clone(), u, triples })
}

/// Matrix M over the common prime-side base with M(xy) = M(x)M(y), taking
/// coordinates in `chain` to coordinates in `flat`. Both fields must share the
/// base given by the first `levels` levels.
pub fn tower_to_flat_isomorphism(
    chain: &FieldDescriptor,
    flat: &FieldDescriptor,
    levels: usize,
) -> Result<Vec<Vec<FieldElement>>, ConstructError> {
    if chain.p() != flat.p() || chain.cardinality() != flat.cardinality() {
        return Err(ConstructError::FieldMismatch("fields differ in size or characteristic".into()));
    }
    if chain.chain().len() < levels
        || flat.chain().len() != levels + 1 && flat.chain().len() != levels
        || chain.prefix(levels) != flat.prefix(levels)
    {
        return Err(ConstructError::FieldMismatch("fields do not share the base field".into()));
    }
    let base = chain.prefix(levels);
    let lvl = base.level();
    let n = chain.degree_over(levels);
    if chain == flat {
        return Ok(identity(&lvl, n));
    }
    if flat.chain().len() == levels {
        // both are the base itself, covered above
        return Err(ConstructError::FieldMismatch("fields differ".into()));
    }
    if chain.cardinality() > ENUMERATION_CAP {
        return Err(ConstructError::TooLarge(format!("root scan over {} elements", chain.cardinality())));
    }
    let modulus = &flat.chain()[levels].modulus;
    let cl = chain.level();
    let coeffs: Vec<FieldElement> = modulus.iter().map(|c| chain.embed_from(c, levels)).collect();
    let is_root = |t: &FieldElement| {
        // Horner on the monic modulus
        let mut acc = chain.one();
        for c in coeffs.iter().rev() {
            acc = cl.add(&cl.mul(&acc, t), c);
        }
        cl.is_zero(&acc)
    };
    let theta = chain.elements()?.find(|t| is_root(t)).ok_or(ConstructError::NoRootFound)?;
    // column i of psi: chain coordinates of theta^i
    let mut cols = Vec::with_capacity(n);
    let mut pw = chain.one();
    for _ in 0..n {
        cols.push(chain.coords_over(&pw, levels));
        pw = cl.mul(&pw, &theta);
    }
    let psi = transpose(&cols);
    mat_inverse(&lvl, &psi).ok_or(ConstructError::NoRootFound)
}

/// Composition kept in the product basis {x^k y^j} of the tower, coordinate j*d + k.
pub fn compose_decompositions_tower(
    outer: &BilinearDecomposition,
    inner: &BilinearDecomposition,
) -> Result<BilinearDecomposition, ConstructError> {
    if outer.base() != inner.extension() {
        return Err(ConstructError::FieldMismatch(
            "the inner extension field must be the base field of the outer decomposition".into(),
        ));
    }
    let k_field = inner.extension();
    let kl = k_field.level();
    let base = inner.base();
    let bl = base.level();
    let d = inner.n();
    let m = outer.n();
    let basis_k: Vec<FieldElement> = (0..d).map(|k| inner.basis(k)).collect();
    let dot = |u: &[FieldElement], v: &[FieldElement]| {
        u.iter().zip(v).fold(bl.zero(), |acc, (s, t)| bl.add(&acc, &bl.mul(s, t)))
    };
    // alpha o A: entry j*d+k is alpha . coords(A_j x^k)
    let lift = |form: &[FieldElement], coeffs: &[FieldElement]| {
        let mut out = Vec::with_capacity(m * d);
        for aj in coeffs {
            for bk in &basis_k {
                out.push(dot(form, &inner.coords(&kl.mul(aj, bk))));
            }
        }
        out
    };
    let mut triples = Vec::with_capacity(outer.rank() * inner.rank());
    for ot in outer.triples() {
        for it in inner.triples() {
            let gamma = inner.element(&it.c);
            let mut c = Vec::with_capacity(m * d);
            for cj in &ot.c {
                c.extend(inner.coords(&kl.mul(&gamma, cj)));
            }
            triples.push(Triple { a: lift(&it.a, &ot.a), b: lift(&it.b, &ot.b), c });
        }
    }
    Ok(BilinearDecomposition::with_extension(base.clone(), outer.extension().clone(), triples)?)
}

/// Transports a decomposition to another model of the same extension field.
pub fn rebase(d: &BilinearDecomposition, target: &FieldDescriptor) -> Result<BilinearDecomposition, ConstructError> {
    let levels = d.base().chain().len();
    let m = tower_to_flat_isomorphism(d.extension(), target, levels)?;
    let lvl = d.base().level();
    let minv_t = transpose(&mat_inverse(&lvl, &m).expect("isomorphisms are invertible"));
    let triples = d
        .triples()
        .iter()
        .map(|t| Triple { a: mat_vec(&lvl, &minv_t, &t.a), b: mat_vec(&lvl, &minv_t, &t.b), c: mat_vec(&lvl, &m, &t.c) })
        .collect();
    Ok(BilinearDecomposition::with_extension(d.base().clone(), target.clone(), triples)?)
}

/// Composition re-based onto the canonical single-step model of F_{q^{dm}}.
pub fn compose_decompositions(
    outer: &BilinearDecomposition,
    inner: &BilinearDecomposition,
) -> Result<BilinearDecomposition, ConstructError> {
    let tower = compose_decompositions_tower(outer, inner)?;
    let flat = field_extend(inner.base(), tower.n())?;
    if tower.extension() == &flat {
        return Ok(tower);
    }
    rebase(&tower, &flat)
}
