//! Dense polynomials in two variables (a, b) and resultants with respect to b
//! by evaluation at sample values of a and interpolation.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extension::{canonical_embedding, Embedding};
use crate::ff::{make_extension, Field, FieldElement};
use crate::poly::{self, Poly};

#[derive(Clone)]
pub struct BiPoly {
    field: Field,
    /// coeffs[i][j] is the coefficient of a^i b^j; rows share one length
    coeffs: Vec<Vec<FieldElement>>,
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "{:?}·a^{}b^{}", c, i, j)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl PartialEq for BiPoly {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.coeffs == other.coeffs
    }
}

impl Eq for BiPoly {}

impl BiPoly {
    pub fn new(field: &Field, coeffs: Vec<Vec<FieldElement>>) -> BiPoly {
        let mut b = BiPoly {
            field: field.clone(),
            coeffs,
        };
        b.normalize();
        b
    }

    /// From `(i, j, c)` terms meaning c·a^i·b^j.
    pub fn from_terms(field: &Field, terms: &[(usize, usize, FieldElement)]) -> BiPoly {
        let da = terms.iter().map(|t| t.0).max().map_or(0, |x| x + 1);
        let db = terms.iter().map(|t| t.1).max().map_or(0, |x| x + 1);
        let mut c = vec![vec![field.zero(); db]; da];
        for (i, j, v) in terms {
            c[*i][*j] = field.add(&c[*i][*j], v);
        }
        BiPoly::new(field, c)
    }

    pub fn zero(field: &Field) -> BiPoly {
        BiPoly::new(field, Vec::new())
    }

    pub fn constant(field: &Field, c: FieldElement) -> BiPoly {
        BiPoly::new(field, vec![vec![c]])
    }

    pub fn one(field: &Field) -> BiPoly {
        BiPoly::constant(field, field.one())
    }

    pub fn var_a(field: &Field) -> BiPoly {
        BiPoly::from_terms(field, &[(1, 0, field.one())])
    }

    pub fn var_b(field: &Field) -> BiPoly {
        BiPoly::from_terms(field, &[(0, 1, field.one())])
    }

    /// A polynomial in a alone.
    pub fn from_poly_a(f: &Poly) -> BiPoly {
        BiPoly::new(f.field(), f.coeffs().iter().map(|c| vec![c.clone()]).collect())
    }

    fn normalize(&mut self) {
        while self
            .coeffs
            .last()
            .is_some_and(|r| r.iter().all(|c| c.is_zero()))
        {
            self.coeffs.pop();
        }
        let width = self
            .coeffs
            .iter()
            .map(|r| r.iter().rposition(|c| !c.is_zero()).map_or(0, |x| x + 1))
            .max()
            .unwrap_or(0);
        let z = self.field.zero();
        for r in self.coeffs.iter_mut() {
            r.resize(width, z.clone());
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .and_then(|r| r.get(j))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn deg_a(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn deg_b(&self) -> usize {
        self.coeffs.first().map_or(0, |r| r.len().saturating_sub(1))
    }

    pub fn total_degree(&self) -> usize {
        let mut d = 0;
        for (i, r) in self.coeffs.iter().enumerate() {
            for (j, c) in r.iter().enumerate() {
                if !c.is_zero() {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    /// Nonzero terms as (i, j, c).
    pub fn terms(&self) -> Vec<(usize, usize, FieldElement)> {
        let mut out = Vec::new();
        for (i, r) in self.coeffs.iter().enumerate() {
            for (j, c) in r.iter().enumerate() {
                if !c.is_zero() {
                    out.push((i, j, c.clone()));
                }
            }
        }
        out
    }

    /// The coefficient of b^j as a polynomial in a.
    pub fn coeff_b(&self, j: usize) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|r| r.get(j).cloned().unwrap_or_else(|| self.field.zero())).collect())
    }

    pub fn lc_b(&self) -> Poly {
        self.coeff_b(self.deg_b())
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let f = &self.field;
        let da = self.coeffs.len().max(other.coeffs.len());
        let db = self.deg_b().max(other.deg_b()) + 1;
        let c = (0..da)
            .map(|i| (0..db).map(|j| f.add(&self.coeff(i, j), &other.coeff(i, j))).collect())
            .collect();
        BiPoly::new(f, c)
    }

    pub fn neg(&self) -> BiPoly {
        let f = &self.field;
        BiPoly::new(
            f,
            self.coeffs.iter().map(|r| r.iter().map(|c| f.neg(c)).collect()).collect(),
        )
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &FieldElement) -> BiPoly {
        let f = &self.field;
        BiPoly::new(
            f,
            self.coeffs.iter().map(|r| r.iter().map(|c| f.mul(c, s)).collect()).collect(),
        )
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return BiPoly::zero(f);
        }
        let da = self.coeffs.len() + other.coeffs.len() - 1;
        let db = self.deg_b() + other.deg_b() + 1;
        let mut out = vec![vec![f.zero(); db]; da];
        let rhs = other.terms();
        for (i, r) in self.coeffs.iter().enumerate() {
            for (j, c) in r.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (i2, j2, c2) in &rhs {
                    let t = &mut out[i + i2][j + j2];
                    *t = f.add(t, &f.mul(c, c2));
                }
            }
        }
        BiPoly::new(f, out)
    }

    pub fn pow(&self, mut e: u64) -> BiPoly {
        let mut base = self.clone();
        let mut acc = BiPoly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The p-th power, computed as Frobenius on coefficients with exponents
    /// scaled by p.
    pub fn pth_power(&self) -> BiPoly {
        let f = &self.field;
        let p = f.p() as usize;
        let terms: Vec<_> = self
            .terms()
            .into_iter()
            .map(|(i, j, c)| (i * p, j * p, f.frobenius(&c)))
            .collect();
        BiPoly::from_terms(f, &terms)
    }

    pub fn eval(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let f = &self.field;
        let mut acc = f.zero();
        for r in self.coeffs.iter().rev() {
            let mut row = f.zero();
            for c in r.iter().rev() {
                row = f.add(&f.mul(&row, b), c);
            }
            acc = f.add(&f.mul(&acc, a), &row);
        }
        acc
    }

    /// Specializes a = α where α lives in `emb.dst()`; returns a polynomial in b.
    pub fn eval_a(&self, emb: &Embedding, alpha: &FieldElement) -> Poly {
        let t = emb.dst();
        let db = self.deg_b() + 1;
        let mut acc = vec![t.zero(); db];
        for r in self.coeffs.iter().rev() {
            for (j, slot) in acc.iter_mut().enumerate() {
                let c = &r[j];
                let prod = t.mul(slot, alpha);
                *slot = if c.is_zero() { prod } else { t.add(&prod, &emb.apply(c)) };
            }
        }
        Poly::new(t, acc)
    }

    /// Specializes b = β ∈ base field; returns a polynomial in a.
    pub fn eval_b(&self, beta: &FieldElement) -> Poly {
        let f = &self.field;
        Poly::new(
            f,
            self.coeffs
                .iter()
                .map(|r| {
                    let mut acc = f.zero();
                    for c in r.iter().rev() {
                        acc = f.add(&f.mul(&acc, beta), c);
                    }
                    acc
                })
                .collect(),
        )
    }

    /// Swaps the roles of a and b.
    pub fn transpose(&self) -> BiPoly {
        let terms: Vec<_> = self.terms().into_iter().map(|(i, j, c)| (j, i, c)).collect();
        BiPoly::from_terms(&self.field, &terms)
    }
}

/// Res_b(f, g) as a polynomial in a.
pub fn resultant_wrt_b(f: &BiPoly, g: &BiPoly, seed: u64) -> Result<Poly> {
    Ok(resultants_wrt_b(f, std::slice::from_ref(g), seed)?.remove(0))
}

/// Res_b(f, g_i) for several g_i, sharing the evaluations of f.
pub fn resultants_wrt_b(f: &BiPoly, gs: &[BiPoly], seed: u64) -> Result<Vec<Poly>> {
    let base = f.field().clone();
    if f.is_zero() || gs.iter().any(|g| g.is_zero()) {
        return Err(Error::ZeroPolynomial);
    }
    if gs.iter().any(|g| **g.field() != *base) {
        return Err(Error::FieldMismatch);
    }
    let m = f.deg_b();
    let mut out: Vec<Option<Poly>> = vec![None; gs.len()];
    let mut pending = Vec::new();
    for (idx, g) in gs.iter().enumerate() {
        let n = g.deg_b();
        match (m, n) {
            (0, 0) => return Err(Error::DegenerateResultant),
            (0, _) => out[idx] = Some(f.coeff_b(0).pow(n as u64)),
            (_, 0) => out[idx] = Some(g.coeff_b(0).pow(m as u64)),
            _ => pending.push(idx),
        }
    }
    if pending.is_empty() {
        return Ok(out.into_iter().map(|x| x.unwrap()).collect());
    }
    let bound = pending
        .iter()
        .map(|&i| {
            let g = &gs[i];
            let sylv = f.deg_a() * g.deg_b() + g.deg_a() * m;
            sylv.min(f.total_degree() * g.total_degree())
        })
        .max()
        .unwrap();
    let lcf = f.lc_b();
    let lcgs: Vec<Poly> = pending.iter().map(|&i| gs[i].lc_b()).collect();
    let bad = lcf.deg() + lcgs.iter().map(|l| l.deg()).sum::<usize>();
    let need = (bound + 1 + bad) as u128;
    // sample field: an extension of the base with more than `need` elements
    let q = base.order_u128().unwrap_or(u128::MAX);
    let mut s = 1;
    while q.checked_pow(s as u32).is_some_and(|v| v <= need) {
        s += 1;
    }
    let sample = make_extension(base.p() as u64, base.degree() * s, seed)?;
    let emb = canonical_embedding(&base, &sample)?;

    let lcf_s = emb.apply_poly(&lcf);
    let lcg_s: Vec<Poly> = lcgs.iter().map(|l| emb.apply_poly(l)).collect();
    let mut points = Vec::with_capacity(bound + 1);
    let mut idx = 0u128;
    while points.len() <= bound {
        let x = sample.element_at(idx);
        idx += 1;
        if lcf_s.eval(&x).is_zero() {
            continue;
        }
        if lcg_s.iter().any(|l| l.eval(&x).is_zero()) {
            continue;
        }
        points.push(x);
    }
    let values: Vec<Result<Vec<FieldElement>>> = points
        .par_iter()
        .map(|x| {
            let fx = f.eval_a(&emb, x);
            pending
                .iter()
                .map(|&i| poly::resultant(&fx, &gs[i].eval_a(&emb, x)))
                .collect()
        })
        .collect();
    let values: Vec<Vec<FieldElement>> = values.into_iter().collect::<Result<_>>()?;
    for (slot, &i) in pending.iter().enumerate() {
        let ys: Vec<FieldElement> = values.iter().map(|v| v[slot].clone()).collect();
        let interp = interpolate(&sample, &points, &ys);
        let coeffs = interp
            .coeffs()
            .iter()
            .map(|c| {
                emb.preimage(c)
                    .ok_or_else(|| Error::Internal("resultant coefficient outside base field".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        out[i] = Some(Poly::new(&base, coeffs));
    }
    Ok(out.into_iter().map(|x| x.unwrap()).collect())
}

/// Newton interpolation through (xs[i], ys[i]).
pub fn interpolate(f: &Field, xs: &[FieldElement], ys: &[FieldElement]) -> Poly {
    let n = xs.len();
    let mut c: Vec<FieldElement> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = f.sub(&c[i], &c[i - 1]);
            let den = f.sub(&xs[i], &xs[i - j]);
            c[i] = f.div(&num, &den).expect("distinct sample points");
        }
    }
    let mut acc = Poly::zero(f);
    for i in (0..n).rev() {
        acc = acc
            .mul(&Poly::linear(f, &xs[i]))
            .add(&Poly::constant(f, c[i].clone()));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::prime_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bipoly(f: &Field, da: usize, db: usize, rng: &mut ChaCha8Rng) -> BiPoly {
        let c = (0..=da)
            .map(|_| (0..=db).map(|_| f.random(rng)).collect())
            .collect();
        BiPoly::new(f, c)
    }

    /// Sylvester determinant over F[a], by fraction-free elimination.
    fn sylvester_resultant(f: &BiPoly, g: &BiPoly) -> Poly {
        let field = f.field();
        let (m, n) = (f.deg_b(), g.deg_b());
        let size = m + n;
        let mut mat = vec![vec![Poly::zero(field); size]; size];
        for r in 0..n {
            for j in 0..=m {
                mat[r][r + j] = f.coeff_b(m - j);
            }
        }
        for r in 0..m {
            for j in 0..=n {
                mat[n + r][r + j] = g.coeff_b(n - j);
            }
        }
        let mut sign = false;
        let mut prev = Poly::one(field);
        for k in 0..size {
            let Some(piv) = (k..size).find(|&i| !mat[i][k].is_zero()) else {
                return Poly::zero(field);
            };
            if piv != k {
                mat.swap(piv, k);
                sign = !sign;
            }
            for i in k + 1..size {
                for j in k + 1..size {
                    let t = mat[i][j].mul(&mat[k][k]).sub(&mat[i][k].mul(&mat[k][j]));
                    mat[i][j] = t.div_exact(&prev).unwrap();
                }
                mat[i][k] = Poly::zero(field);
            }
            prev = mat[k][k].clone();
        }
        let det = mat[size - 1][size - 1].clone();
        if sign {
            det.neg()
        } else {
            det
        }
    }

    #[test]
    fn resultant_with_linear_factor_substitutes() {
        let f = prime_field(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // b - c(a) against g(a, b) gives g(a, c(a))
        let c = Poly::random(&f, 2, &mut rng);
        let lin = BiPoly::var_b(&f).sub(&BiPoly::from_poly_a(&c));
        let g = random_bipoly(&f, 2, 3, &mut rng);
        let r = resultant_wrt_b(&lin, &g, 0).unwrap();
        let cb = BiPoly::from_poly_a(&c);
        let mut subst = BiPoly::zero(&f);
        for j in 0..=g.deg_b() {
            subst = subst.add(&BiPoly::from_poly_a(&g.coeff_b(j)).mul(&cb.pow(j as u64)));
        }
        // Res(f, g) = lc(f)^{deg g} ∏_{f(β)=0} g(β) and f is monic in b
        assert_eq!(r, subst.coeff_b(0));
    }

    #[test]
    fn resultant_of_f_with_itself_vanishes() {
        let f = prime_field(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_bipoly(&f, 2, 2, &mut rng);
        assert!(resultant_wrt_b(&g, &g, 0).unwrap().is_zero());
    }

    #[test]
    fn constant_in_b_inputs() {
        let f = prime_field(5).unwrap();
        let a = BiPoly::var_a(&f);
        assert_eq!(resultant_wrt_b(&a, &a, 0).unwrap_err(), Error::DegenerateResultant);
        let g = BiPoly::var_b(&f).pow(2).add(&a);
        assert_eq!(
            resultant_wrt_b(&a, &g, 0).unwrap(),
            Poly::from_u32s(&f, &[0, 0, 1])
        );
    }

    #[test]
    fn interpolation_matches_sylvester_on_random_instances() {
        for p in [3u64, 5, 7] {
            let f = prime_field(p).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            for _ in 0..10 {
                let db1 = rng.gen_range(1..=4);
                let db2 = rng.gen_range(1..=4);
                let f1 = random_bipoly(&f, rng.gen_range(0..=3), db1, &mut rng);
                let f2 = random_bipoly(&f, rng.gen_range(0..=3), db2, &mut rng);
                if f1.deg_b() == 0 || f2.deg_b() == 0 {
                    continue;
                }
                assert_eq!(
                    resultant_wrt_b(&f1, &f2, 3).unwrap(),
                    sylvester_resultant(&f1, &f2)
                );
            }
        }
    }

    #[test]
    fn degenerate_leading_coefficients_are_handled() {
        let f = prime_field(3).unwrap();
        // leading b-coefficients a and a+1 vanish at a = 0 and a = 2
        let a = BiPoly::var_a(&f);
        let b = BiPoly::var_b(&f);
        let one = BiPoly::one(&f);
        let f1 = a.mul(&b.pow(2)).add(&b).add(&one);
        let f2 = a.add(&one).mul(&b.pow(3)).add(&a.mul(&b)).add(&a.pow(2));
        assert_eq!(resultant_wrt_b(&f1, &f2, 0).unwrap(), sylvester_resultant(&f1, &f2));
    }

    #[test]
    fn resultant_zero_iff_common_root() {
        // brute-force common-root search; quadratics over F_5 split in F_25
        let f = prime_field(5).unwrap();
        let ext = make_extension(5, 2, 0).unwrap();
        let emb = canonical_embedding(&f, &ext).unwrap();
        for seed in 0..6 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f1 = random_bipoly(&f, 1, 2, &mut rng);
            let f2 = random_bipoly(&f, 1, 2, &mut rng);
            let r = resultant_wrt_b(&f1, &f2, 0).unwrap();
            for a in f.elements() {
                if f1.lc_b().eval(&a).is_zero() || f2.lc_b().eval(&a).is_zero() {
                    continue;
                }
                let ea = emb.apply(&a);
                let g1 = f1.eval_a(&emb, &ea);
                let g2 = f2.eval_a(&emb, &ea);
                let common = ext
                    .elements()
                    .any(|x| g1.eval(&x).is_zero() && g2.eval(&x).is_zero());
                assert_eq!(r.eval(&a).is_zero(), common);
            }
        }
    }
}
