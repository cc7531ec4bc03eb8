//! The p-rank-zero system for y² = (x² + ax + b)·f_E on the (a, b) plane, its
//! exact solution by elimination and back-substitution, and a brute-force
//! scan used as an independent check.

use std::collections::BTreeSet;

use num_integer::Integer;
use rayon::prelude::*;

use crate::bipoly::{resultants_wrt_b, BiPoly};
use crate::covers::is_smooth_pair;
use crate::curve::frobenius_twist;
use crate::error::{Error, Result};
use crate::extension::{canonical_embedding, flatten, minpoly_over, tower_key, Embedding};
use crate::ff::{fp, make_extension, prime_field, Field, FieldElement};
use crate::linalg::{mat_mul, Matrix};
use crate::poly::{gcd, irreducible_factors, is_squarefree, Poly};

/// Symbolic Hasse-Witt data of y² = (x² + ax + b)·f over the field of f.
#[derive(Clone, Debug)]
pub struct PrymFiberSystem {
    model: Poly,
    genus: usize,
    h: Vec<Vec<BiPoly>>,
    m: Vec<Vec<BiPoly>>,
    det: BiPoly,
    det_reduced: BiPoly,
}

fn bimat_mul(a: &[Vec<BiPoly>], b: &[Vec<BiPoly>]) -> Vec<Vec<BiPoly>> {
    let fld = a[0][0].field().clone();
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| {
                    (0..b.len()).fold(BiPoly::zero(&fld), |acc, t| acc.add(&a[i][t].mul(&b[t][j])))
                })
                .collect()
        })
        .collect()
}

fn minor<T: Clone>(m: &[Vec<T>], col: usize) -> Vec<Vec<T>> {
    m[1..]
        .iter()
        .map(|r| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

fn bimat_det(m: &[Vec<BiPoly>]) -> BiPoly {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut acc = BiPoly::zero(m[0][0].field());
    for (j, c) in m[0].iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let t = c.mul(&bimat_det(&minor(m, j)));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

fn pmat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let fld = a[0][0].field().clone();
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| (0..b.len()).fold(Poly::zero(&fld), |acc, t| acc.add(&a[i][t].mul(&b[t][j]))))
                .collect()
        })
        .collect()
}

fn pmat_det(m: &[Vec<Poly>]) -> Poly {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero(m[0][0].field());
    for (j, c) in m[0].iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let t = c.mul(&pmat_det(&minor(m, j)));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

/// Strips every factor of the discriminant a² − 4b from f. On that locus the
/// quadratic is a square, so the curve is singular and the factor only
/// inflates the eliminant.
fn strip_discriminant(f: &BiPoly) -> BiPoly {
    let fld = f.field().clone();
    let four = fld.from_u32(4);
    let disc = BiPoly::from_terms(&fld, &[(2, 0, fld.one()), (0, 1, fld.neg(&four))]);
    let lead = fld.neg(&fld.inv(&four).expect("p is odd"));
    let b = BiPoly::var_b(&fld);
    let mut cur = f.clone();
    loop {
        if cur.is_zero() || cur.deg_b() == 0 {
            return cur;
        }
        let mut r = cur.clone();
        let mut q = BiPoly::zero(&fld);
        while !r.is_zero() && r.deg_b() >= 1 {
            let k = r.deg_b();
            let t = BiPoly::from_poly_a(&r.coeff_b(k).scale(&lead)).mul(&b.pow(k as u64 - 1));
            q = q.add(&t);
            r = r.sub(&t.mul(&disc));
        }
        if !r.is_zero() {
            return cur;
        }
        cur = q;
    }
}

/// u(b)^p as a polynomial in b: Frobenius on coefficients, exponents times p.
fn twist_b(u: &Poly) -> Poly {
    let f = u.field();
    let p = f.p() as usize;
    let mut c = vec![f.zero(); u.coeffs().len().saturating_sub(1) * p + 1];
    for (i, e) in u.coeffs().iter().enumerate() {
        c[i * p] = f.frobenius(e);
    }
    Poly::new(f, c)
}

/// The system for the pair y² = (x² + ax + b)·model; the genus is read off
/// from deg(model) + 2.
pub fn build_system(model: &Poly) -> Result<PrymFiberSystem> {
    let fld = model.field().clone();
    let p = fld.p() as usize;
    let d = model.degree().ok_or(Error::ZeroPolynomial)?;
    let genus = (d + 3) / 2 - 1;
    if genus == 0 {
        return Err(Error::BadDegree(d));
    }
    let n = (p - 1) / 2;
    let fe_n = model.pow(n as u64);

    // (x² + ax + b)^n = Σ_t q_t x^t with q_t = Σ n!/(i! j! k!) a^j b^k over 2i + j = t
    let pp = p as u32;
    let mut fact = vec![1u32; n + 1];
    for i in 1..=n {
        fact[i] = ((fact[i - 1] as u64 * i as u64) % p as u64) as u32;
    }
    let q: Vec<BiPoly> = (0..=2 * n)
        .map(|t| {
            let mut terms = Vec::new();
            for i in 0..=n.min(t / 2) {
                let j = t - 2 * i;
                if i + j > n {
                    continue;
                }
                let k = n - i - j;
                let den = (fact[i] as u64 * fact[j] as u64 % p as u64) * fact[k] as u64 % p as u64;
                let c = (fact[n] as u64 * fp::inv(den as u32, pp) as u64 % p as u64) as u32;
                terms.push((j, k, fld.from_u32(c)));
            }
            BiPoly::from_terms(&fld, &terms)
        })
        .collect();
    let coeff = |e: usize| -> BiPoly {
        let mut acc = BiPoly::zero(&fld);
        for (t, qt) in q.iter().enumerate() {
            if t <= e {
                let c = fe_n.coeff(e - t);
                if !c.is_zero() {
                    acc = acc.add(&qt.scale(&c));
                }
            }
        }
        acc
    };
    let h: Vec<Vec<BiPoly>> = (1..=genus)
        .map(|j| {
            (1..=genus)
                .map(|i| if i * p >= j { coeff(i * p - j) } else { BiPoly::zero(&fld) })
                .collect()
        })
        .collect();
    let mut m = h.clone();
    let mut tw = h.clone();
    for _ in 1..genus {
        tw = tw.iter().map(|r| r.iter().map(|x| x.pth_power()).collect()).collect();
        m = bimat_mul(&m, &tw);
    }
    let det = bimat_det(&h);
    // when nothing but the discriminant is left (p = 3) keep det itself
    let det_reduced = match strip_discriminant(&det) {
        r if r.deg_b() == 0 => det.clone(),
        r => r,
    };
    Ok(PrymFiberSystem {
        model: model.clone(),
        genus,
        h,
        m,
        det,
        det_reduced,
    })
}

impl PrymFiberSystem {
    pub fn field(&self) -> &Field {
        self.model.field()
    }

    pub fn model(&self) -> &Poly {
        &self.model
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn h_sym(&self) -> &[Vec<BiPoly>] {
        &self.h
    }

    pub fn m_sym(&self) -> &[Vec<BiPoly>] {
        &self.m
    }

    pub fn det_sym(&self) -> &BiPoly {
        &self.det
    }

    /// det H with the discriminant a² − 4b divided out.
    pub fn det_reduced(&self) -> &BiPoly {
        &self.det_reduced
    }

    /// H with a = α substituted, as polynomials in b over `emb.dst()`.
    pub fn h_in_b(&self, emb: &Embedding, alpha: &FieldElement) -> Vec<Vec<Poly>> {
        self.h
            .iter()
            .map(|r| r.iter().map(|x| x.eval_a(emb, alpha)).collect())
            .collect()
    }

    /// H at a point of `emb.dst()`.
    pub fn h_at(&self, emb: &Embedding, a: &FieldElement, b: &FieldElement) -> Matrix {
        self.h
            .iter()
            .map(|r| r.iter().map(|x| x.eval_a(emb, a).eval(b)).collect())
            .collect()
    }

    /// H·H^(p)·…·H^(p^{g−1}) at a point of `emb.dst()`.
    pub fn m_at(&self, emb: &Embedding, a: &FieldElement, b: &FieldElement) -> Matrix {
        product_of_twists(emb.dst(), &self.h_at(emb, a, b))
    }

    pub fn vanishes_at(&self, emb: &Embedding, a: &FieldElement, b: &FieldElement) -> bool {
        self.m_at(emb, a, b).iter().flatten().all(|e| e.is_zero())
    }

    pub fn is_smooth_at(&self, emb: &Embedding, a: &FieldElement, b: &FieldElement) -> bool {
        is_squarefree(&self.model) && is_smooth_pair(a, b, &emb.apply_poly(&self.model))
    }
}

pub(crate) fn product_of_twists(l: &Field, h: &Matrix) -> Matrix {
    let mut prod = h.clone();
    let mut tw = h.clone();
    for _ in 1..h.len() {
        tw = frobenius_twist(l, &tw);
        prod = mat_mul(l, &prod, &tw);
    }
    prod
}

/// Resultants Res_b(det H / disc, M_ij) and their monic gcd, a polynomial in a.
#[derive(Clone, Debug)]
pub struct Eliminant {
    pub resultants: Vec<Poly>,
    pub poly: Poly,
}

pub fn eliminant(sys: &PrymFiberSystem, seed: u64) -> Result<Eliminant> {
    let entries: Vec<BiPoly> = sys.m.iter().flatten().filter(|x| !x.is_zero()).cloned().collect();
    if entries.is_empty() || sys.det_reduced.is_zero() {
        return Err(Error::PositiveDimension);
    }
    let resultants = resultants_wrt_b(&sys.det_reduced, &entries, seed)?;
    let mut g = Poly::zero(sys.field());
    for r in &resultants {
        g = gcd(&g, r)?;
    }
    if g.is_zero() {
        return Err(Error::PositiveDimension);
    }
    Ok(Eliminant { resultants, poly: g })
}

/// A closed point of the solution scheme over the field F_B of the model,
/// realized by one geometric point (a, b) in its residue field L.
#[derive(Clone, Debug)]
pub struct SolutionPoint {
    /// F_B → L.
    pub base: Embedding,
    /// F_G → L, where F_G ⊇ F_B is the ambient field requested by the caller.
    pub ambient: Embedding,
    pub a: FieldElement,
    pub b: FieldElement,
    /// Degree of F_B(a, b) over F_B.
    pub degree: usize,
    pub a_minpoly: Poly,
    pub smooth: bool,
    /// Identifies the closed point independently of the chosen geometric point.
    pub key: Vec<u32>,
}

impl SolutionPoint {
    pub fn field(&self) -> &Field {
        self.base.dst()
    }

    pub fn b_minpoly(&self) -> Result<Poly> {
        minpoly_over(&self.base, &self.b)
    }

    pub fn a_number(&self, sys: &PrymFiberSystem) -> usize {
        sys.genus() - crate::linalg::rank(self.field(), &sys.h_at(&self.base, &self.a, &self.b))
    }
}

/// Key of the closed point through (a, b) ∈ L over the field embedded by `base`.
pub fn closed_point_key(base: &Embedding, a: &FieldElement, b: &FieldElement) -> (Vec<u32>, usize) {
    let l = base.dst();
    let kb = base.src().degree();
    let xs = if kb > 1 {
        vec![base.gen_image(), a.clone(), b.clone()]
    } else {
        vec![a.clone(), b.clone()]
    };
    let (key, dim) = tower_key(l, &xs);
    (key, dim / kb)
}

/// All smooth solutions, as closed points over the field of the model.
pub fn solve_fiber(sys: &PrymFiberSystem, seed: u64) -> Result<Vec<SolutionPoint>> {
    solve_fiber_in(sys, &Embedding::identity(sys.field()), seed)
}

/// As `solve_fiber`, with every residue field built to contain `ambient.dst()`.
pub fn solve_fiber_in(sys: &PrymFiberSystem, ambient: &Embedding, seed: u64) -> Result<Vec<SolutionPoint>> {
    Ok(all_points(sys, ambient, seed)?.into_iter().filter(|p| p.smooth).collect())
}

/// Every solution whose a-coordinate is a root of the eliminant, singular ones included.
pub fn all_points(sys: &PrymFiberSystem, ambient: &Embedding, seed: u64) -> Result<Vec<SolutionPoint>> {
    if **ambient.src() != **sys.field() {
        return Err(Error::FieldMismatch);
    }
    let elim = eliminant(sys, seed)?;
    let factors = irreducible_factors(&elim.poly, seed)?;
    let per: Vec<Result<Vec<SolutionPoint>>> = factors
        .par_iter()
        .enumerate()
        .map(|(i, phi)| points_over(sys, ambient, phi, seed.wrapping_add(i as u64)))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in per {
        for pt in r? {
            if seen.insert(pt.key.clone()) {
                out.push(pt);
            }
        }
    }
    out.sort_by(|x, y| x.a_minpoly.canonical_cmp(&y.a_minpoly).then_with(|| x.key.cmp(&y.key)));
    Ok(out)
}

/// Closed points whose a-coordinate has minimal polynomial `phi` over F_B.
fn points_over(sys: &PrymFiberSystem, ambient: &Embedding, phi: &Poly, seed: u64) -> Result<Vec<SolutionPoint>> {
    let fb = sys.field();
    let fg = ambient.dst();
    let r = fg.degree() / fb.degree();
    let phi_g = ambient.apply_poly(phi);
    let phi1 = if phi.deg().gcd(&r) > 1 {
        irreducible_factors(&phi_g, seed)?.remove(0)
    } else {
        phi_g
    };
    let tk = flatten(&phi1, seed)?;
    let g_to_k = tk.base;
    let b_to_k = ambient.then(&g_to_k);
    let alpha = tk.root;
    let hb = sys.h_in_b(&b_to_k, &alpha);
    let mut g = pmat_det(&hb);
    let mut prod = hb.clone();
    let mut tw = hb;
    for _ in 1..sys.genus {
        tw = tw.iter().map(|row| row.iter().map(twist_b).collect()).collect();
        prod = pmat_mul(&prod, &tw);
    }
    for e in prod.iter().flatten() {
        g = gcd(&g, e)?;
    }
    if g.is_zero() {
        return Err(Error::PositiveDimension);
    }
    let mut out = Vec::new();
    if g.deg() == 0 {
        return Ok(out);
    }
    for psi in irreducible_factors(&g, seed)? {
        let tl = flatten(&psi, seed)?;
        let base = b_to_k.then(&tl.base);
        let amb = g_to_k.then(&tl.base);
        let a = tl.base.apply(&alpha);
        let b = tl.root;
        if !sys.vanishes_at(&base, &a, &b) {
            return Err(Error::Internal("back-substituted point fails the system".into()));
        }
        let smooth = sys.is_smooth_at(&base, &a, &b);
        let (key, degree) = closed_point_key(&base, &a, &b);
        out.push(SolutionPoint {
            base,
            ambient: amb,
            a,
            b,
            degree,
            a_minpoly: phi.monic(),
            smooth,
            key,
        });
    }
    Ok(out)
}

/// The geometric points of `pts` with coordinates in `target`, where
/// `base_emb: F_B → target` fixes how F_B sits in the target.
pub fn rational_points(
    pts: &[SolutionPoint],
    base_emb: &Embedding,
) -> Result<Vec<(FieldElement, FieldElement)>> {
    let t = base_emb.dst();
    let kb = base_emb.src().degree();
    let w = base_emb.gen_image();
    let mut out = BTreeSet::new();
    for pt in pts {
        let dl = pt.field().degree();
        let need = pt.degree * kb;
        if !t.degree().is_multiple_of(need) {
            continue;
        }
        // F_B(a, b) may be smaller than L; go through it
        let sub = if dl == need {
            canonical_embedding(pt.field(), t)?
        } else {
            return Err(Error::Internal("residue field larger than the point".into()));
        };
        let (wl, a, b) = (sub.apply(&pt.base.gen_image()), sub.apply(&pt.a), sub.apply(&pt.b));
        for i in 0..t.degree() {
            let wi = t.frobenius_pow(&wl, i);
            if kb == 1 || wi == w {
                out.insert((t.frobenius_pow(&a, i), t.frobenius_pow(&b, i)));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// All smooth (a, b) ∈ F_{p^k}² solving the system, by direct evaluation.
/// Returns the scan field, the embedding of F_B, and the sorted points.
pub fn brute_force_oracle(
    sys: &PrymFiberSystem,
    k: usize,
    seed: u64,
) -> Result<(Embedding, Vec<(FieldElement, FieldElement)>)> {
    let fb = sys.field();
    if !k.is_multiple_of(fb.degree()) {
        return Err(Error::IncompatibleExtension {
            src: fb.degree(),
            dst: k,
        });
    }
    let p = fb.p() as u64;
    let size = (p as u128).pow(2 * k as u32);
    if size > 100_000_000 {
        return Err(Error::ScanTooLarge(size));
    }
    let f = if k == 1 {
        prime_field(p)?
    } else {
        make_extension(p, k, seed)?
    };
    let emb = canonical_embedding(fb, &f)?;
    let model = emb.apply_poly(sys.model());
    if !is_squarefree(&model) {
        return Ok((emb, Vec::new()));
    }
    let q = f.order_u128().expect("small field");
    let mut pts: Vec<(FieldElement, FieldElement)> = (0..q)
        .into_par_iter()
        .flat_map_iter(|ia| {
            let a = f.element_at(ia);
            let hb = sys.h_in_b(&emb, &a);
            let model = &model;
            let f = &f;
            (0..q).filter_map(move |ib| {
                let b = f.element_at(ib);
                let h: Matrix = hb.iter().map(|r| r.iter().map(|x| x.eval(&b)).collect()).collect();
                let m = product_of_twists(f, &h);
                (m.iter().flatten().all(|e| e.is_zero()) && is_smooth_pair(&a, &b, model))
                    .then(|| (a.clone(), b))
            })
        })
        .collect();
    pts.sort();
    Ok((emb, pts))
}
