//! Exact arithmetic in F_p and F_{p^k}.
//!
//! A field is an immutable [`FieldContext`] shared behind an [`Arc`]. Elements
//! are plain coefficient vectors (ascending powers of the generator, reduced
//! modulo the defining polynomial) and carry no reference to their field, so
//! every operation goes through the context: `f.mul(&a, &b)`.
//!
//! The canonical ordering of elements is lexicographic on the coefficient
//! vector `[c0, c1, ..., c_{k-1}]` with each `ci` in `0..p`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Field = Arc<FieldContext>;

/// An element of some F_{p^k}; length of the coefficient vector is always k.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(SmallVec<[u32; 4]>);

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "{:?}", self.0.as_slice())
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Serialized form of a context: `{p, k, modulus:[...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub k: usize,
    pub modulus: Vec<u32>,
}

pub struct FieldContext {
    p: u32,
    k: usize,
    /// Monic, ascending, length k + 1. For k = 1 this is `x`.
    modulus: Vec<u32>,
    /// Frobenius images of the power basis, built on first use.
    frob: OnceLock<Vec<FieldElement>>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}{:?}", self.p, self.k, self.modulus)
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldContext {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_char(p: u64) -> Result<u32> {
    if p == 2 || !is_prime(p) || p >= 1 << 16 {
        return Err(Error::UnsupportedCharacteristic(p));
    }
    Ok(p as u32)
}

/// The prime field F_p.
pub fn prime_field(p: u64) -> Result<Field> {
    let p = check_char(p)?;
    Ok(Arc::new(FieldContext::raw(p, vec![0, 1])))
}

/// F_{p^k} with a monic irreducible modulus found by seeded random search.
pub fn make_extension(p: u64, k: usize, seed: u64) -> Result<Field> {
    let p = check_char(p)?;
    if k == 0 {
        return Err(Error::ZeroDegree);
    }
    if k == 1 {
        return Ok(Arc::new(FieldContext::raw(p, vec![0, 1])));
    }
    let mix = seed ^ ((p as u64) << 32) ^ ((k as u64) << 16) ^ 0x9e37_79b9_7f4a_7c15;
    let mut rng = ChaCha8Rng::seed_from_u64(mix);
    loop {
        let mut m: Vec<u32> = (0..k).map(|_| rng.gen_range(0..p)).collect();
        m.push(1);
        if m[0] != 0 && fp::is_irreducible(&m, p) {
            return Ok(Arc::new(FieldContext::raw(p, m)));
        }
    }
}

/// A field from an explicit modulus; checks that it is monic and irreducible.
pub fn field_with_modulus(p: u64, modulus: Vec<u32>) -> Result<Field> {
    let p = check_char(p)?;
    let mut m: Vec<u32> = modulus.into_iter().map(|c| c % p).collect();
    fp::trim(&mut m);
    if m.len() < 2 || *m.last().unwrap() != 1 {
        return Err(Error::Parse("modulus must be monic of degree >= 1".into()));
    }
    if m.len() == 2 {
        return Ok(Arc::new(FieldContext::raw(p, vec![0, 1])));
    }
    if !fp::is_irreducible(&m, p) {
        return Err(Error::Parse("modulus is reducible".into()));
    }
    Ok(Arc::new(FieldContext::raw(p, m)))
}

impl FieldContext {
    fn raw(p: u32, modulus: Vec<u32>) -> Self {
        let k = modulus.len() - 1;
        FieldContext {
            p,
            k,
            modulus,
            frob: OnceLock::new(),
        }
    }

    /// Build from an irreducible modulus already known to be irreducible.
    pub(crate) fn trusted(p: u32, modulus: Vec<u32>) -> Field {
        debug_assert!(modulus.last() == Some(&1));
        if modulus.len() == 2 {
            return Arc::new(FieldContext::raw(p, vec![0, 1]));
        }
        Arc::new(FieldContext::raw(p, modulus))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            k: self.k,
            modulus: self.modulus.clone(),
        }
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.k as u32)
    }

    /// Field order if it fits in a u128.
    pub fn order_u128(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.k as u32)
    }

    pub fn prime_subfield(&self) -> Field {
        Arc::new(FieldContext::raw(self.p, vec![0, 1]))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(SmallVec::from_elem(0, self.k))
    }

    pub fn one(&self) -> FieldElement {
        self.from_u32(1)
    }

    pub fn from_u32(&self, c: u32) -> FieldElement {
        let mut v = SmallVec::from_elem(0, self.k);
        v[0] = c % self.p;
        FieldElement(v)
    }

    pub fn from_i64(&self, c: i64) -> FieldElement {
        self.from_u32(c.rem_euclid(self.p as i64) as u32)
    }

    /// Reduces an arbitrary-length coefficient vector modulo the modulus.
    pub fn from_coeffs(&self, c: &[u32]) -> FieldElement {
        if c.len() <= self.k {
            let mut v: SmallVec<[u32; 4]> = c.iter().map(|&x| x % self.p).collect();
            v.resize(self.k, 0);
            return FieldElement(v);
        }
        let mut buf: Vec<u64> = c.iter().map(|&x| (x % self.p) as u64).collect();
        self.reduce_wide(&mut buf)
    }

    pub fn from_i64_coeffs(&self, c: &[i64]) -> FieldElement {
        let v: Vec<u32> = c
            .iter()
            .map(|&x| x.rem_euclid(self.p as i64) as u32)
            .collect();
        self.from_coeffs(&v)
    }

    /// The class of the indeterminate; for k = 1 this is 0.
    pub fn generator(&self) -> FieldElement {
        if self.k == 1 {
            return self.zero();
        }
        let mut v = SmallVec::from_elem(0, self.k);
        v[1] = 1;
        FieldElement(v)
    }

    /// Element with base-p digits of `index` as coefficients.
    pub fn element_at(&self, mut index: u128) -> FieldElement {
        let mut v = SmallVec::from_elem(0, self.k);
        for c in v.iter_mut() {
            *c = (index % self.p as u128) as u32;
            index /= self.p as u128;
        }
        FieldElement(v)
    }

    pub fn index_of(&self, e: &FieldElement) -> u128 {
        e.0.iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.p as u128 + c as u128)
    }

    /// All elements in canonical index order. Only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let n = self.order_u128().expect("field too large to enumerate");
        (0..n).map(move |i| self.element_at(i))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement((0..self.k).map(|_| rng.gen_range(0..self.p)).collect())
    }

    pub fn is_zero(&self, e: &FieldElement) -> bool {
        e.is_zero()
    }

    pub fn is_one(&self, e: &FieldElement) -> bool {
        e.0[0] == 1 && e.0[1..].iter().all(|&c| c == 0)
    }

    /// Value in F_p if the element lies in the prime field.
    pub fn to_prime(&self, e: &FieldElement) -> Option<u32> {
        if e.0[1..].iter().all(|&c| c == 0) {
            Some(e.0[0])
        } else {
            None
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement(
            a.0.iter()
                .zip(b.0.iter())
                .map(|(&x, &y)| {
                    let s = x + y;
                    if s >= p {
                        s - p
                    } else {
                        s
                    }
                })
                .collect(),
        )
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement(
            a.0.iter()
                .zip(b.0.iter())
                .map(|(&x, &y)| if x >= y { x - y } else { x + p - y })
                .collect(),
        )
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement(a.0.iter().map(|&x| if x == 0 { 0 } else { p - x }).collect())
    }

    /// Multiplication by an element of F_p.
    pub fn scale(&self, a: &FieldElement, c: u32) -> FieldElement {
        let p = self.p as u64;
        FieldElement(
            a.0.iter()
                .map(|&x| ((x as u64 * c as u64) % p) as u32)
                .collect(),
        )
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p as u64;
        if self.k == 1 {
            let mut v = SmallVec::new();
            v.push(((a.0[0] as u64 * b.0[0] as u64) % p) as u32);
            return FieldElement(v);
        }
        let k = self.k;
        let mut buf = vec![0u64; 2 * k - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as u64;
            for (j, &y) in b.0.iter().enumerate() {
                buf[i + j] += x * y as u64;
            }
            if (i & 0xff) == 0xff {
                for c in buf.iter_mut() {
                    *c %= p;
                }
            }
        }
        self.reduce_wide(&mut buf)
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Reduces a wide coefficient buffer (entries < 2^62) modulo the modulus.
    fn reduce_wide(&self, buf: &mut Vec<u64>) -> FieldElement {
        let p = self.p as u64;
        let k = self.k;
        if k == 1 {
            // modulus is x: keep the constant term
            let mut v = SmallVec::new();
            v.push((buf.first().copied().unwrap_or(0) % p) as u32);
            return FieldElement(v);
        }
        for i in (k..buf.len()).rev() {
            let c = buf[i] % p;
            if c == 0 {
                continue;
            }
            let base = i - k;
            for j in 0..k {
                let m = self.modulus[j] as u64;
                if m != 0 {
                    buf[base + j] += (p - m) * c;
                }
            }
            if (i & 0x3f) == 0 {
                for c in buf[..i].iter_mut() {
                    *c %= p;
                }
            }
        }
        let mut v: SmallVec<[u32; 4]> = buf.iter().take(k).map(|&c| (c % p) as u32).collect();
        v.resize(k, 0);
        FieldElement(v)
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.k == 1 {
            return Ok(self.from_u32(fp::inv(a.0[0], self.p)));
        }
        let mut av: Vec<u32> = a.0.to_vec();
        fp::trim(&mut av);
        let inv = fp::inv_mod(&av, &self.modulus, self.p).ok_or(Error::DivisionByZero)?;
        Ok(self.from_coeffs(&inv))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    pub fn pow_big(&self, a: &FieldElement, e: &BigUint) -> FieldElement {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    fn frob_table(&self) -> &[FieldElement] {
        self.frob.get_or_init(|| {
            let y = self.generator();
            let yp = self.pow(&y, self.p as u64);
            let mut rows = Vec::with_capacity(self.k);
            let mut cur = self.one();
            for _ in 0..self.k {
                rows.push(cur.clone());
                cur = self.mul(&cur, &yp);
            }
            rows
        })
    }

    /// e ↦ e^p.
    pub fn frobenius(&self, e: &FieldElement) -> FieldElement {
        if self.k == 1 {
            return e.clone();
        }
        let table = self.frob_table();
        let p = self.p as u64;
        let mut acc = vec![0u64; self.k];
        for (i, &c) in e.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (slot, &t) in acc.iter_mut().zip(table[i].0.iter()) {
                *slot += c as u64 * t as u64;
            }
            if (i & 0xff) == 0xff {
                for s in acc.iter_mut() {
                    *s %= p;
                }
            }
        }
        FieldElement(acc.into_iter().map(|c| (c % p) as u32).collect())
    }

    /// e ↦ e^{p^r}.
    pub fn frobenius_pow(&self, e: &FieldElement, r: usize) -> FieldElement {
        let r = if self.k == 0 { 0 } else { r % self.k };
        let mut x = e.clone();
        for _ in 0..r {
            x = self.frobenius(&x);
        }
        x
    }

    /// Degree over F_p of the subfield generated by `e`.
    pub fn element_degree(&self, e: &FieldElement) -> usize {
        let mut x = self.frobenius(e);
        let mut d = 1;
        while &x != e {
            x = self.frobenius(&x);
            d += 1;
        }
        d
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, e: &FieldElement) -> Result<BigUint> {
        if e.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.order() - 1u32;
        let mut ord = n.clone();
        for q in small_prime_factors(&n) {
            while (&ord % q) == BigUint::from(0u32) {
                let cand = &ord / q;
                if self.is_one(&self.pow_big(e, &cand)) {
                    ord = cand;
                } else {
                    break;
                }
            }
        }
        Ok(ord)
    }

    /// Square root if one exists (Tonelli-Shanks on F_{p^k}).
    pub fn sqrt(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return Some(self.zero());
        }
        let q1 = self.order() - 1u32;
        let half = &q1 >> 1;
        if !self.is_one(&self.pow_big(a, &half)) {
            return None;
        }
        let mut s = 0u64;
        let mut t = q1.clone();
        while !t.bit(0) {
            t >>= 1;
            s += 1;
        }
        // deterministic non-residue search in canonical order
        let mut z = None;
        for i in 1u128.. {
            let c = self.element_at(i);
            if !self.is_one(&self.pow_big(&c, &half)) {
                z = Some(c);
                break;
            }
        }
        let z = z?;
        let mut m = s;
        let mut c = self.pow_big(&z, &t);
        let mut tt = self.pow_big(a, &t);
        let mut r = self.pow_big(a, &((&t + 1u32) >> 1));
        while !self.is_one(&tt) {
            let mut i = 0;
            let mut x = tt.clone();
            while !self.is_one(&x) {
                x = self.square(&x);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = self.square(&b);
            }
            m = i;
            c = self.square(&b);
            tt = self.mul(&tt, &c);
            r = self.mul(&r, &b);
        }
        Some(r)
    }

    /// `[c0,c1,...]` text form.
    pub fn format(&self, e: &FieldElement) -> String {
        let parts: Vec<String> = e.0.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

fn small_prime_factors(n: &BigUint) -> Vec<u64> {
    // trial division; group orders at desk scale are smooth enough
    let mut out = Vec::new();
    let mut m = n.clone();
    let mut d = 2u64;
    let zero = BigUint::from(0u32);
    while BigUint::from(d) * BigUint::from(d) <= m && d < 10_000_000 {
        if &m % d == zero {
            out.push(d);
            while &m % d == zero {
                m /= d;
            }
        }
        d += 1;
    }
    if m > BigUint::from(1u32) {
        // remaining cofactor is prime (or the search gave up; order stays an upper bound)
        if let Ok(v) = u64::try_from(&m) {
            out.push(v);
        }
    }
    out
}

/// Raw dense polynomial helpers over F_p (ascending `Vec<u32>`), used for
/// modulus search and inversion before the general polynomial layer exists.
pub(crate) mod fp {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv(a: u32, p: u32) -> u32 {
        let (mut t, mut new_t) = (0i64, 1i64);
        let (mut r, mut new_r) = (p as i64, a as i64);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        debug_assert_eq!(r, 1);
        t.rem_euclid(p as i64) as u32
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p64 = p as u64;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p64;
            }
        }
        let mut v: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut v);
        v
    }

    /// Remainder of a modulo b (b nonzero).
    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let li = inv(b[db], p) as u64;
        let p64 = p as u64;
        while r.len() > db {
            let top = r.len() - 1;
            let c = (r[top] as u64 * li) % p64;
            let shift = top - db;
            for (j, &bj) in b.iter().enumerate() {
                r[shift + j] = ((r[shift + j] as u64 + (p64 - c) * bj as u64) % p64) as u32;
            }
            trim(&mut r);
        }
        r
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut v: Vec<u32> = (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0);
                let y = *b.get(i).unwrap_or(&0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut v);
        v
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub fn powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            e >>= 1;
            if e > 0 {
                b = rem(&mul(&b, &b, p), m, p);
            }
        }
        acc
    }

    /// x^{p^r} mod m by r successive p-th powers.
    fn x_pow_p_iter(m: &[u32], r: usize, p: u32) -> Vec<u32> {
        let mut x = rem(&[0, 1], m, p);
        for _ in 0..r {
            x = powmod(&x, p as u64, m, p);
        }
        x
    }

    /// Rabin's irreducibility test for a monic polynomial.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let k = m.len() - 1;
        if k == 0 {
            return false;
        }
        if k == 1 {
            return true;
        }
        if x_pow_p_iter(m, k, p) != rem(&[0, 1], m, p) {
            return false;
        }
        let mut n = k;
        let mut primes = Vec::new();
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                primes.push(d);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        for r in primes {
            let h = x_pow_p_iter(m, k / r, p);
            let g = gcd(&sub(&h, &[0, 1], p), m, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    /// Inverse of a modulo m via the extended Euclidean algorithm.
    pub fn inv_mod(a: &[u32], m: &[u32], p: u32) -> Option<Vec<u32>> {
        let (mut r0, mut r1) = (m.to_vec(), rem(a, m, p));
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            // polynomial long division r0 = q r1 + r
            let mut q = vec![0u32; r0.len().saturating_sub(r1.len()) + 1];
            let mut r = r0.clone();
            let d1 = r1.len() - 1;
            let li = inv(r1[d1], p) as u64;
            let p64 = p as u64;
            while r.len() > d1 {
                let top = r.len() - 1;
                let c = (r[top] as u64 * li) % p64;
                let shift = top - d1;
                q[shift] = c as u32;
                for (j, &bj) in r1.iter().enumerate() {
                    r[shift + j] = ((r[shift + j] as u64 + (p64 - c) * bj as u64) % p64) as u32;
                }
                trim(&mut r);
            }
            trim(&mut q);
            let s2 = sub(&s0, &mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r0.len() != 1 {
            return None;
        }
        let c = inv(r0[0], p) as u64;
        Some(
            s0.iter()
                .map(|&x| ((x as u64 * c) % p as u64) as u32)
                .collect(),
        )
    }
}
