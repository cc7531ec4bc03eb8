//! Maps between finite fields: explicit embeddings, flattening of a relative
//! extension F[z]/ψ into an absolute field, and intrinsic keys for Frobenius
//! orbits of tuples.

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldContext, FieldElement};
use crate::linalg::FpSpan;
use crate::poly::{self, Poly};

/// A ring homomorphism `src → dst`, determined by the image of the generator
/// of `src`.
#[derive(Clone)]
pub struct Embedding {
    src: Field,
    dst: Field,
    /// images of gen^i for i < deg(src)
    powers: Vec<FieldElement>,
    inverse: OnceLock<FpSpan>,
}

impl std::fmt::Debug for Embedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Embedding({:?} -> {:?})", self.src, self.dst)
    }
}

impl Embedding {
    /// Trusts that `gen_image` is a root of the modulus of `src` in `dst`.
    pub fn new(src: &Field, dst: &Field, gen_image: FieldElement) -> Embedding {
        let k = src.degree();
        let mut powers = Vec::with_capacity(k);
        let mut cur = dst.one();
        for _ in 0..k {
            powers.push(cur.clone());
            cur = dst.mul(&cur, &gen_image);
        }
        Embedding {
            src: src.clone(),
            dst: dst.clone(),
            powers,
            inverse: OnceLock::new(),
        }
    }

    pub fn identity(f: &Field) -> Embedding {
        let g = if f.degree() == 1 { f.zero() } else { f.generator() };
        Embedding::new(f, f, g)
    }

    /// The inclusion of the prime field.
    pub fn from_prime(dst: &Field) -> Embedding {
        let src = dst.prime_subfield();
        Embedding::new(&src, dst, dst.zero())
    }

    pub fn src(&self) -> &Field {
        &self.src
    }

    pub fn dst(&self) -> &Field {
        &self.dst
    }

    pub fn gen_image(&self) -> FieldElement {
        if self.src.degree() == 1 {
            self.dst.zero()
        } else {
            self.powers[1].clone()
        }
    }

    pub fn apply(&self, e: &FieldElement) -> FieldElement {
        let d = &self.dst;
        if self.src.degree() == 1 {
            return d.from_u32(e.coeffs()[0]);
        }
        let mut acc = d.zero();
        for (c, pw) in e.coeffs().iter().zip(self.powers.iter()) {
            if *c != 0 {
                acc = d.add(&acc, &d.scale(pw, *c));
            }
        }
        acc
    }

    pub fn apply_poly(&self, f: &Poly) -> Poly {
        f.map_coeffs(&self.dst, |c| self.apply(c))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Embedding) -> Embedding {
        Embedding::new(&self.src, &next.dst, next.apply(&self.gen_image()))
    }

    fn span(&self) -> &FpSpan {
        self.inverse.get_or_init(|| {
            let mut s = FpSpan::new(self.dst.p(), self.dst.degree());
            for pw in &self.powers {
                s.insert(pw.coeffs());
            }
            s
        })
    }

    /// The preimage of `e`, if it lies in the image.
    pub fn preimage(&self, e: &FieldElement) -> Option<FieldElement> {
        let c = self.span().coords(e.coeffs())?;
        Some(self.src.from_coeffs(&c))
    }
}

/// The embedding `src → dst` sending the generator of `src` to the smallest
/// root (canonical order) of its modulus in `dst`.
pub fn canonical_embedding(src: &Field, dst: &Field) -> Result<Embedding> {
    if src.p() != dst.p() {
        return Err(Error::FieldMismatch);
    }
    if !dst.degree().is_multiple_of(src.degree()) {
        return Err(Error::IncompatibleExtension {
            src: src.degree(),
            dst: dst.degree(),
        });
    }
    if src.degree() == 1 {
        return Ok(Embedding::from_prime(dst));
    }
    let fp = src.prime_subfield();
    let m = Poly::from_u32s(&fp, src.modulus());
    let roots = poly::roots_in(&m, dst, 0)?;
    let r = roots
        .into_iter()
        .map(|(r, _)| r)
        .min()
        .ok_or_else(|| Error::Internal("modulus has no root in target".into()))?;
    Ok(Embedding::new(src, dst, r))
}

/// Image of `e ∈ src` under the canonical embedding into `target`.
pub fn embed(src: &Field, e: &FieldElement, target: &Field) -> Result<FieldElement> {
    Ok(canonical_embedding(src, target)?.apply(e))
}

/// Minimal polynomial over F_p of an element.
pub fn minpoly_fp(f: &Field, e: &FieldElement) -> Poly {
    let fp = f.prime_subfield();
    let mut span = FpSpan::new(f.p(), f.degree());
    let mut cur = f.one();
    loop {
        if let Some(c) = span.coords(cur.coeffs()) {
            let p = f.p();
            let mut coeffs: Vec<u32> = c.iter().map(|&x| (p - x) % p).collect();
            coeffs.push(1);
            return Poly::from_u32s(&fp, &coeffs);
        }
        span.insert(cur.coeffs());
        cur = f.mul(&cur, e);
    }
}

/// A field containing all roots of `f`, with the canonical embedding of the
/// coefficient field. The degree over the base is the lcm of factor degrees.
pub fn splitting_field(f: &Poly, seed: u64) -> Result<Embedding> {
    use num_integer::Integer;
    let base = f.field().clone();
    let sf = poly::squarefree_part(f)?;
    let d = poly::irreducible_factors(&sf, seed)?
        .iter()
        .fold(1usize, |acc, q| acc.lcm(&q.deg()));
    if d == 1 {
        return Ok(Embedding::identity(&base));
    }
    let l = crate::ff::make_extension(base.p() as u64, base.degree() * d, seed)?;
    canonical_embedding(&base, &l)
}

/// Minimal polynomial over `emb.src()` of an element of `emb.dst()`.
pub fn minpoly_over(emb: &Embedding, e: &FieldElement) -> Result<Poly> {
    let l = emb.dst();
    let k = emb.src().degree();
    let mut conj = vec![e.clone()];
    let mut y = l.frobenius_pow(e, k);
    while &y != e {
        conj.push(y.clone());
        y = l.frobenius_pow(&y, k);
    }
    let prod = conj
        .iter()
        .fold(Poly::one(l), |acc, c| acc.mul(&Poly::linear(l, c)));
    let coeffs = prod
        .coeffs()
        .iter()
        .map(|c| {
            emb.preimage(c)
                .ok_or_else(|| Error::Internal("conjugate product outside base".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(emb.src(), coeffs))
}

/// An absolute field `L` together with an embedding of a base field `F` and a
/// root of the defining polynomial ψ ∈ F[z].
#[derive(Clone, Debug)]
pub struct Tower {
    pub field: Field,
    pub base: Embedding,
    pub root: FieldElement,
}

/// Realizes F[z]/ψ (ψ irreducible over F) as an absolute field.
pub fn flatten(psi: &Poly, seed: u64) -> Result<Tower> {
    let base = psi.field().clone();
    let psi = psi.monic();
    let d = psi.deg();
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    if d == 1 {
        return Ok(Tower {
            field: base.clone(),
            base: Embedding::identity(&base),
            root: base.neg(&psi.coeff(0)),
        });
    }
    let p = base.p();
    if base.degree() == 1 {
        let m: Vec<u32> = psi.coeffs().iter().map(|c| c.coeffs()[0]).collect();
        let field = FieldContext::trusted(p, m);
        return Ok(Tower {
            base: Embedding::from_prime(&field),
            root: field.generator(),
            field,
        });
    }
    let k = base.degree();
    let n = k * d;
    // coordinates of A = F[z]/ψ over F_p: index i*k + j for z^i w^j
    let coords = |a: &Poly| -> Vec<u32> {
        let mut v = vec![0u32; n];
        for (i, c) in a.coeffs().iter().enumerate() {
            v[i * k..(i + 1) * k].copy_from_slice(c.coeffs());
        }
        v
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51ed_270b);
    loop {
        let theta = Poly::random(&base, d - 1, &mut rng).add(&Poly::x(&base)).rem(&psi)?;
        let mut span = FpSpan::new(p, n);
        let mut cur = Poly::one(&base);
        let mut ok = true;
        for _ in 0..n {
            if !span.insert(&coords(&cur)) {
                ok = false;
                break;
            }
            cur = cur.mulmod(&theta, &psi);
        }
        if !ok {
            continue;
        }
        let c = span.coords(&coords(&cur)).expect("full-rank span");
        let mut m: Vec<u32> = c.iter().map(|&x| (p - x) % p).collect();
        m.push(1);
        let field = FieldContext::trusted(p, m);
        let to_l = |a: &Poly| field.from_coeffs(&span.coords(&coords(a)).expect("full-rank span"));
        let w = Poly::constant(&base, base.generator());
        let gen = to_l(&w);
        let root = to_l(&Poly::x(&base));
        return Ok(Tower {
            base: Embedding::new(&base, &field, gen),
            root,
            field,
        });
    }
}

/// Intrinsic key of the Frobenius orbit of a tuple `(x_1, ..., x_r)` in `L`:
/// the chain of relative minimal polynomials of x_i over F_p(x_1..x_{i-1}),
/// with coefficients written in the monomial basis of the previous generators.
/// Also returns the degree of F_p(x_1..x_r) over F_p.
pub fn tower_key(l: &Field, xs: &[FieldElement]) -> (Vec<u32>, usize) {
    let n = l.degree();
    let mut span = FpSpan::new(l.p(), n);
    let mut basis = vec![l.one()];
    span.insert(l.one().coeffs());
    let mut dim = 1usize;
    let mut key = Vec::new();
    for x in xs {
        let mut conj = vec![x.clone()];
        let mut y = l.frobenius_pow(x, dim);
        while &y != x {
            conj.push(y.clone());
            y = l.frobenius_pow(&y, dim);
        }
        let e = conj.len();
        // ∏ (T - c), coefficients low to high
        let mut poly = vec![l.one()];
        for c in &conj {
            let mut next = vec![l.zero(); poly.len() + 1];
            for (i, a) in poly.iter().enumerate() {
                next[i + 1] = l.add(&next[i + 1], a);
                next[i] = l.sub(&next[i], &l.mul(a, c));
            }
            poly = next;
        }
        key.push(e as u32);
        for c in poly.iter().take(e) {
            key.extend(span.coords(c.coeffs()).expect("coefficients lie in the subfield"));
        }
        if e > 1 {
            let old = basis.clone();
            let mut xp = l.one();
            for _ in 1..e {
                xp = l.mul(&xp, x);
                for b in &old {
                    let v = l.mul(b, &xp);
                    span.insert(v.coeffs());
                    basis.push(v);
                }
            }
            dim *= e;
        }
    }
    (key, dim)
}
