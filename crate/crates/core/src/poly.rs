//! Dense univariate polynomials over a finite field: Euclidean algorithms,
//! squarefree decomposition, Cantor-Zassenhaus factoring, roots and
//! resultants.

use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};

#[derive(Clone)]
pub struct Poly {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.field == *other.field
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl Poly {
    pub fn new(field: &Field, coeffs: Vec<FieldElement>) -> Poly {
        let mut p = Poly {
            field: field.clone(),
            coeffs,
        };
        p.trim();
        p
    }

    /// Coefficients given as prime-field residues.
    pub fn from_u32s(field: &Field, c: &[u32]) -> Poly {
        Poly::new(field, c.iter().map(|&x| field.from_u32(x)).collect())
    }

    pub fn from_i64s(field: &Field, c: &[i64]) -> Poly {
        Poly::new(field, c.iter().map(|&x| field.from_i64(x)).collect())
    }

    pub fn zero(field: &Field) -> Poly {
        Poly::new(field, Vec::new())
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, field.one())
    }

    pub fn constant(field: &Field, c: FieldElement) -> Poly {
        Poly::new(field, vec![c])
    }

    pub fn x(field: &Field) -> Poly {
        Poly::monomial(field, field.one(), 1)
    }

    pub fn monomial(field: &Field, c: FieldElement, e: usize) -> Poly {
        let mut v = vec![field.zero(); e];
        v.push(c);
        Poly::new(field, v)
    }

    /// `x - c`.
    pub fn linear(field: &Field, c: &FieldElement) -> Poly {
        Poly::new(field, vec![field.neg(c), field.one()])
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, max_degree: usize, rng: &mut R) -> Poly {
        Poly::new(
            field,
            (0..=max_degree).map(|_| field.random(rng)).collect(),
        )
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FieldElement> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.field.is_one(&self.coeffs[0])
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; handy for size bounds.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn lc(&self) -> FieldElement {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    fn same_field(&self, other: &Poly) -> Result<()> {
        if *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => f.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(f, v)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|c| f.neg(c)).collect())
    }

    pub fn scale(&self, c: &FieldElement) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|x| f.mul(x, c)).collect())
    }

    pub fn shift(&self, e: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.field.zero(); e];
        v.extend(self.coeffs.iter().cloned());
        Poly::new(&self.field, v)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(f);
        }
        if f.degree() == 1 {
            let a: Vec<u32> = self.coeffs.iter().map(|c| c.coeffs()[0]).collect();
            let b: Vec<u32> = other.coeffs.iter().map(|c| c.coeffs()[0]).collect();
            return Poly::from_u32s(f, &raw::mul(&a, &b, f.p()));
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = f.add(&out[i + j], &f.mul(a, b));
                }
            }
        }
        Poly::new(f, out)
    }

    pub fn square(&self) -> Poly {
        self.mul(self)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        self.same_field(d)?;
        let f = &self.field;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.coeffs.len() < d.coeffs.len() {
            return Ok((Poly::zero(f), self.clone()));
        }
        if f.degree() == 1 {
            let a: Vec<u32> = self.coeffs.iter().map(|c| c.coeffs()[0]).collect();
            let b: Vec<u32> = d.coeffs.iter().map(|c| c.coeffs()[0]).collect();
            let (q, r) = raw::divrem(&a, &b, f.p());
            return Ok((Poly::from_u32s(f, &q), Poly::from_u32s(f, &r)));
        }
        let dd = d.coeffs.len() - 1;
        let inv = f.inv(&d.lc())?;
        let mut r = self.coeffs.clone();
        let mut q = vec![f.zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = f.mul(&r[i], &inv);
            let base = i - dd;
            for (j, dj) in d.coeffs.iter().enumerate() {
                if !dj.is_zero() {
                    r[base + j] = f.sub(&r[base + j], &f.mul(&c, dj));
                }
            }
            q[base] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(f, q), Poly::new(f, r)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact quotient; errors if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return Err(Error::Internal("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(&self.lc()).expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        Poly::new(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| f.scale(c, (i as u64 % f.p() as u64) as u32))
                .collect(),
        )
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let f = &self.field;
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.add(&f.mul(&acc, x), c);
        }
        acc
    }

    /// Applies a coefficient map into another field.
    pub fn map_coeffs(&self, target: &Field, g: impl Fn(&FieldElement) -> FieldElement) -> Poly {
        Poly::new(target, self.coeffs.iter().map(g).collect())
    }

    /// Coefficientwise Frobenius `c ↦ c^p`.
    pub fn frobenius_coeffs(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|c| f.frobenius(c)).collect())
    }

    pub fn mulmod(&self, other: &Poly, m: &Poly) -> Poly {
        self.mul(other).rem(m).expect("nonzero modulus")
    }

    pub fn powmod(&self, e: &BigUint, m: &Poly) -> Poly {
        let mut acc = Poly::one(&self.field).rem(m).expect("nonzero modulus");
        let base = self.rem(m).expect("nonzero modulus");
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, m);
            if e.bit(i) {
                acc = acc.mulmod(&base, m);
            }
        }
        acc
    }

    /// Canonical comparison: degree first, then coefficients from the constant
    /// term upward.
    pub fn canonical_cmp(&self, other: &Poly) -> std::cmp::Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

/// Monic gcd; `gcd(f, 0) = monic(f)`.
pub fn gcd(f: &Poly, g: &Poly) -> Result<Poly> {
    f.same_field(g)?;
    let mut a = f.clone();
    let mut b = g.clone();
    while !b.is_zero() {
        let r = a.rem(&b)?;
        a = b;
        b = r;
    }
    Ok(a.monic())
}

/// Extended Euclid: returns (g, s, t) with s·f + t·g = g monic.
pub fn xgcd(f: &Poly, g: &Poly) -> Result<(Poly, Poly, Poly)> {
    f.same_field(g)?;
    let field = f.field();
    let (mut r0, mut r1) = (f.clone(), g.clone());
    let (mut s0, mut s1) = (Poly::one(field), Poly::zero(field));
    let (mut t0, mut t1) = (Poly::zero(field), Poly::one(field));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1)?;
        let s2 = s0.sub(&q.mul(&s1));
        let t2 = t0.sub(&q.mul(&t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_zero() {
        return Ok((r0, s0, t0));
    }
    let inv = field.inv(&r0.lc())?;
    Ok((r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)))
}

/// Resultant of two univariate polynomials by the Euclidean recurrence.
pub fn resultant(f: &Poly, g: &Poly) -> Result<FieldElement> {
    f.same_field(g)?;
    let field = f.field().clone();
    if f.is_zero() || g.is_zero() {
        return Ok(field.zero());
    }
    let mut a = f.clone();
    let mut b = g.clone();
    let mut acc = field.one();
    loop {
        let m = a.deg();
        let n = b.deg();
        if m == 0 {
            return Ok(field.mul(&acc, &field.pow(&a.lc(), n as u64)));
        }
        if n == 0 {
            return Ok(field.mul(&acc, &field.pow(&b.lc(), m as u64)));
        }
        let r = a.rem(&b)?;
        if r.is_zero() {
            return Ok(field.zero());
        }
        // Res(a,b) = (-1)^{mn} lc(b)^{m - deg r} Res(b, r)
        if (m * n) % 2 == 1 {
            acc = field.neg(&acc);
        }
        acc = field.mul(&acc, &field.pow(&b.lc(), (m - r.deg()) as u64));
        a = b;
        b = r;
    }
}

/// p-th root of a polynomial whose derivative vanishes.
fn pth_root(f: &Poly) -> Poly {
    let field = f.field();
    let p = field.p() as usize;
    let k = field.degree();
    let coeffs = f
        .coeffs()
        .iter()
        .step_by(p)
        .map(|c| field.frobenius_pow(c, k - 1))
        .collect();
    Poly::new(field, coeffs)
}

/// Squarefree decomposition of a nonzero polynomial: pairs (g_i, i) with the
/// g_i squarefree, pairwise coprime, and f = lc·∏ g_i^i.
pub fn squarefree_decomposition(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    sqf_rec(&f.monic(), 1, &mut out)?;
    // merge entries of equal multiplicity coming from the p-th power descent
    out.sort_by_key(|(_, e)| *e);
    let mut merged: Vec<(Poly, usize)> = Vec::new();
    for (g, e) in out {
        match merged.last_mut() {
            Some((h, e2)) if *e2 == e => *h = h.mul(&g),
            _ => merged.push((g, e)),
        }
    }
    Ok(merged)
}

fn sqf_rec(f: &Poly, scale: usize, out: &mut Vec<(Poly, usize)>) -> Result<()> {
    if f.deg() == 0 {
        return Ok(());
    }
    let p = f.field().p() as usize;
    let mut c = gcd(f, &f.derivative())?;
    let mut w = f.div_exact(&c)?;
    let mut i = 1;
    while w.deg() > 0 {
        let y = gcd(&w, &c)?;
        let z = w.div_exact(&y)?;
        if z.deg() > 0 {
            out.push((z, i * scale));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w)?;
    }
    if c.deg() > 0 {
        sqf_rec(&pth_root(&c), scale * p, out)?;
    }
    Ok(())
}

pub fn squarefree_part(f: &Poly) -> Result<Poly> {
    let field = f.field();
    Ok(squarefree_decomposition(f)?
        .into_iter()
        .fold(Poly::one(field), |acc, (g, _)| acc.mul(&g)))
}

pub fn is_squarefree(f: &Poly) -> bool {
    match squarefree_decomposition(f) {
        Ok(d) => d.iter().all(|(_, e)| *e == 1),
        Err(_) => false,
    }
}

/// The p-power map u ↦ u^p modulo a fixed monic modulus, stored as the table
/// of x^{p·i} mod m. Iterating it k times gives the q-power map, q = p^k.
pub struct PowerMap {
    modulus: Poly,
    n: usize,
    /// row i holds x^{p·i} mod m as n·k residues
    table: Vec<u32>,
}

impl PowerMap {
    pub fn new(modulus: &Poly) -> PowerMap {
        let m = modulus.monic();
        let field = m.field().clone();
        let n = m.deg();
        let k = field.degree();
        let p = field.p() as usize;
        let mut table = vec![0u32; n * n * k];
        if k == 1 && n > 0 {
            let p64 = p as u64;
            let mc: Vec<u64> = m.coeffs().iter().map(|c| c.coeffs()[0] as u64).collect();
            let mut cur = vec![0u64; n];
            cur[0] = 1 % p64;
            if n == 1 {
                // modulus x - c: everything reduces to a constant
                cur[0] = 1;
            }
            for i in 0..n {
                for (j, &c) in cur.iter().enumerate() {
                    table[i * n + j] = c as u32;
                }
                for _ in 0..p {
                    let top = cur[n - 1];
                    cur.rotate_right(1);
                    cur[0] = 0;
                    if top != 0 {
                        let nt = p64 - top;
                        for (slot, &mj) in cur.iter_mut().zip(mc.iter()) {
                            *slot = (*slot + nt * mj) % p64;
                        }
                    }
                }
            }
            return PowerMap {
                modulus: m,
                n,
                table,
            };
        }
        let mut cur = Poly::one(&field).rem(&m).expect("nonzero modulus");
        for i in 0..n {
            for (j, c) in cur.coeffs().iter().enumerate() {
                table[(i * n + j) * k..(i * n + j + 1) * k].copy_from_slice(c.coeffs());
            }
            if i + 1 < n {
                cur = shift_mod(&cur, p, &m);
            }
        }
        PowerMap {
            modulus: m,
            n,
            table,
        }
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// u^p mod m for u already reduced.
    pub fn apply(&self, u: &Poly) -> Poly {
        let field = self.modulus.field();
        let k = field.degree();
        let n = self.n;
        if k == 1 {
            let p = field.p() as u64;
            let mut acc = vec![0u64; n];
            for (i, c) in u.coeffs().iter().enumerate() {
                let c = c.coeffs()[0] as u64;
                if c == 0 {
                    continue;
                }
                let row = &self.table[i * n..(i + 1) * n];
                for (a, &t) in acc.iter_mut().zip(row.iter()) {
                    *a += c * t as u64;
                }
                if i % 4096 == 4095 {
                    for a in acc.iter_mut() {
                        *a %= p;
                    }
                }
            }
            let v: Vec<u32> = acc.into_iter().map(|a| (a % p) as u32).collect();
            return Poly::from_u32s(field, &v);
        }
        let mut acc = vec![field.zero(); n];
        for (i, c) in u.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cp = field.frobenius(c);
            for (j, a) in acc.iter_mut().enumerate() {
                let t = &self.table[(i * n + j) * k..(i * n + j + 1) * k];
                if t.iter().all(|&x| x == 0) {
                    continue;
                }
                *a = field.add(a, &field.mul(&cp, &field.from_coeffs(t)));
            }
        }
        Poly::new(field, acc)
    }

    /// u^{p^r} mod m.
    pub fn apply_n(&self, u: &Poly, r: usize) -> Poly {
        let mut x = u.clone();
        for _ in 0..r {
            x = self.apply(&x);
        }
        x
    }

    /// u^q mod m where q is the order of the coefficient field.
    pub fn apply_q(&self, u: &Poly) -> Poly {
        self.apply_n(u, self.modulus.field().degree())
    }
}

/// x^e·u mod m, computed by shifting one position at a time.
fn shift_mod(u: &Poly, e: usize, m: &Poly) -> Poly {
    let field = m.field();
    let n = m.deg();
    let mut v: Vec<FieldElement> = u.coeffs().to_vec();
    v.resize(n, field.zero());
    for _ in 0..e {
        // multiply by x
        let top = v.pop().unwrap_or_else(|| field.zero());
        v.insert(0, field.zero());
        if !top.is_zero() {
            for (j, mj) in m.coeffs().iter().take(n).enumerate() {
                if !mj.is_zero() {
                    v[j] = field.sub(&v[j], &field.mul(&top, mj));
                }
            }
        }
    }
    Poly::new(field, v)
}

/// Distinct-degree factorization of a monic squarefree polynomial.
pub fn distinct_degree(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let field = f.field();
    let f = f.monic();
    let mut out = Vec::new();
    if f.deg() == 0 {
        return Ok(out);
    }
    let map = PowerMap::new(&f);
    let x = Poly::x(field).rem(&f)?;
    let mut h = x.clone();
    let mut rest = f.clone();
    let mut i = 0;
    while rest.deg() >= 2 * (i + 1) {
        i += 1;
        h = map.apply_q(&h);
        let g = gcd(&rest, &h.sub(&x).rem(&rest)?)?;
        if g.deg() > 0 {
            rest = rest.div_exact(&g)?;
            out.push((g, i));
        }
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    Ok(out)
}

/// Splits a monic squarefree product of irreducibles of degree d.
pub fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
    let f = f.monic();
    let n = f.deg();
    if n == d {
        return Ok(vec![f]);
    }
    if n == 0 || !n.is_multiple_of(d) {
        return Err(Error::Internal("equal-degree split of wrong degree".into()));
    }
    let field = f.field().clone();
    let p = field.p();
    let kd = field.degree() * d;
    let map = PowerMap::new(&f);
    let half = BigUint::from((p - 1) / 2);
    loop {
        let r = Poly::random(&field, n - 1, rng);
        if r.deg() == 0 {
            continue;
        }
        // r^{(q^d-1)/2} = (∏_{i<kd} r^{p^i})^{(p-1)/2}
        let mut acc = r.clone();
        let mut cur = r.clone();
        for _ in 1..kd {
            cur = map.apply(&cur);
            acc = acc.mulmod(&cur, &f);
        }
        let w = acc.powmod(&half, &f);
        let g = gcd(&f, &w.sub(&Poly::one(&field)))?;
        if g.deg() > 0 && g.deg() < n {
            let h = f.div_exact(&g)?;
            let mut out = equal_degree(&g, d, rng)?;
            out.extend(equal_degree(&h, d, rng)?);
            return Ok(out);
        }
    }
}

/// Factors a nonzero polynomial into monic irreducibles with multiplicities,
/// in canonical order. The leading coefficient is dropped.
pub fn factor(f: &Poly, seed: u64) -> Result<Vec<(Poly, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(f)? {
        for (h, d) in distinct_degree(&g)? {
            for irr in equal_degree(&h, d, &mut rng)? {
                out.push((irr, e));
            }
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(out)
}

/// Distinct irreducible factors of a nonzero polynomial, in canonical order.
/// Factors are processed in parallel per distinct-degree block.
pub fn irreducible_factors(f: &Poly, seed: u64) -> Result<Vec<Poly>> {
    let sq = squarefree_part(f)?;
    let blocks = distinct_degree(&sq)?;
    let parts: Vec<Result<Vec<Poly>>> = blocks
        .par_iter()
        .enumerate()
        .map(|(i, (h, d))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37));
            equal_degree(h, *d, &mut rng)
        })
        .collect();
    let mut out = Vec::new();
    for part in parts {
        out.extend(part?);
    }
    out.sort_by(|a, b| a.canonical_cmp(b));
    Ok(out)
}

pub fn is_irreducible(f: &Poly) -> bool {
    if f.deg() == 0 {
        return false;
    }
    if !is_squarefree(f) {
        return false;
    }
    match distinct_degree(f) {
        Ok(v) => v.len() == 1 && v[0].1 == f.deg(),
        Err(_) => false,
    }
}

/// Roots of f in its own coefficient field with multiplicities, canonical order.
pub fn roots(f: &Poly, seed: u64) -> Result<Vec<(FieldElement, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let field = f.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(f)? {
        let x = Poly::x(field);
        // the product of the linear factors of g is gcd(g, x^q - x)
        let map = PowerMap::new(&g);
        let xq = map.apply_q(&x.rem(&g)?);
        let lin = gcd(&g, &xq.sub(&x).rem(&g)?)?;
        if lin.deg() == 0 {
            continue;
        }
        for l in equal_degree(&lin, 1, &mut rng)? {
            out.push((field.neg(&l.coeff(0)), e));
        }
    }
    out.sort();
    Ok(out)
}

/// All roots of `f` (coefficients in the prime field) lying in `target`, with
/// multiplicities. Errors with the degrees of irreducible factors whose roots
/// do not lie in the target.
pub fn roots_in(f: &Poly, target: &Field, seed: u64) -> Result<Vec<(FieldElement, usize)>> {
    let src = f.field();
    if src.degree() != 1 || src.p() != target.p() {
        return Err(Error::FieldMismatch);
    }
    let mut missing = Vec::new();
    let mut out = Vec::new();
    for (g, e) in factor(f, seed)? {
        let d = g.deg();
        if !target.degree().is_multiple_of(d) {
            missing.push(d);
            continue;
        }
        let lifted = g.map_coeffs(target, |c| target.from_u32(c.coeffs()[0]));
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(d as u64));
        for l in equal_degree(&lifted, 1, &mut rng)? {
            out.push((target.neg(&l.coeff(0)), e));
        }
    }
    if !missing.is_empty() {
        return Err(Error::TargetTooSmall(missing));
    }
    out.sort();
    Ok(out)
}

/// Text form `c0,c1,...` with each coefficient in the element syntax.
pub fn format_poly(f: &Poly) -> String {
    let field = f.field();
    let parts: Vec<String> = f
        .coeffs()
        .iter()
        .map(|c| {
            if field.degree() == 1 {
                c.coeffs()[0].to_string()
            } else {
                field.format(c)
            }
        })
        .collect();
    parts.join(",")
}

/// Fast paths for dense polynomials over F_p held as residue vectors.
pub(crate) mod raw {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p = p as u64;
        let mut acc = vec![0u64; a.len() + b.len() - 1];
        // each product is below 2^32, so 2^31 additions fit in a u64
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as u64;
            for (slot, &y) in acc[i..].iter_mut().zip(b.iter()) {
                *slot += x * y as u64;
            }
            if i % 1_000_000 == 999_999 {
                for s in acc.iter_mut() {
                    *s %= p;
                }
            }
        }
        let mut v: Vec<u32> = acc.into_iter().map(|s| (s % p) as u32).collect();
        trim(&mut v);
        v
    }

    pub fn divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
        let mut r: Vec<u32> = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let p64 = p as u64;
        let inv = crate::ff::fp::inv(b[db], p) as u64;
        let mut q = vec![0u32; r.len() - db];
        for i in (db..r.len()).rev() {
            let c = (r[i] as u64 * inv) % p64;
            if c == 0 {
                continue;
            }
            let base = i - db;
            let nc = p64 - c;
            for (slot, &bj) in r[base..=i].iter_mut().zip(b.iter()) {
                if bj != 0 {
                    *slot = ((*slot as u64 + nc * bj as u64) % p64) as u32;
                }
            }
            q[base] = c as u32;
        }
        r.truncate(db);
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }
}
