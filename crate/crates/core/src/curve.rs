//! Hyperelliptic curves y² = f(x) over a finite field: Hasse-Witt matrix,
//! p-rank, a-number, and the supersingular elliptic curves in characteristic p.

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ff::{make_extension, prime_field, Field, FieldElement};
use crate::linalg::{mat_mul, rank, Matrix};
use crate::poly::{is_squarefree, Poly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurve {
    f: Poly,
    genus: usize,
}

impl HyperellipticCurve {
    pub fn new(f: Poly) -> Result<Self> {
        let d = f.degree().ok_or(Error::ZeroPolynomial)?;
        if d < 3 {
            return Err(Error::BadDegree(d));
        }
        if !is_squarefree(&f) {
            return Err(Error::SingularCurve);
        }
        Ok(HyperellipticCurve {
            genus: d.div_ceil(2) - 1,
            f,
        })
    }

    pub fn field(&self) -> &Field {
        self.f.field()
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn hasse_witt(&self) -> Matrix {
        hasse_witt_of(&self.f, self.genus)
    }

    pub fn p_rank(&self) -> usize {
        p_rank_of(self.field(), &self.hasse_witt())
    }

    pub fn a_number(&self) -> usize {
        self.genus - rank(self.field(), &self.hasse_witt())
    }

    /// The curve y² = (γx+δ)^{2g+2} f((αx+β)/(γx+δ)), isomorphic to this one.
    pub fn mobius_pullback(&self, m: [&FieldElement; 4]) -> Result<Self> {
        let fld = self.field();
        let [al, be, ga, de] = m;
        if fld.sub(&fld.mul(al, de), &fld.mul(be, ga)).is_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = Poly::new(fld, vec![be.clone(), al.clone()]);
        let den = Poly::new(fld, vec![de.clone(), ga.clone()]);
        let n = 2 * self.genus + 2;
        let mut acc = Poly::zero(fld);
        for (i, c) in self.f.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = num.pow(i as u64).mul(&den.pow((n - i) as u64)).scale(c);
            acc = acc.add(&term);
        }
        HyperellipticCurve::new(acc)
    }
}

/// Hasse-Witt matrix of y² = f with genus g; entry (j,i) is the coefficient of
/// x^{ip−j} in f^{(p−1)/2}. No smoothness check.
pub fn hasse_witt_of(f: &Poly, g: usize) -> Matrix {
    let p = f.field().p() as usize;
    let a = f.pow(((p - 1) / 2) as u64);
    (1..=g)
        .map(|j| {
            (1..=g)
                .map(|i| match (i * p).checked_sub(j) {
                    Some(e) => a.coeff(e),
                    None => f.field().zero(),
                })
                .collect()
        })
        .collect()
}

/// Entrywise Frobenius of a matrix.
pub fn frobenius_twist(field: &Field, m: &Matrix) -> Matrix {
    m.iter()
        .map(|row| row.iter().map(|e| field.frobenius(e)).collect())
        .collect()
}

/// Rank of H·H^{(p)}·…·H^{(p^{g−1})}.
pub fn p_rank_of(field: &Field, h: &Matrix) -> usize {
    let g = h.len();
    if g == 0 {
        return 0;
    }
    let mut prod = h.clone();
    let mut tw = h.clone();
    for _ in 1..g {
        tw = frobenius_twist(field, &tw);
        prod = mat_mul(field, &prod, &tw);
    }
    rank(field, &prod)
}

/// Coefficient of x^{p−1} in f^{(p−1)/2}; zero exactly for supersingular cubics.
pub fn hasse_invariant(cubic: &Poly) -> FieldElement {
    let p = cubic.field().p() as usize;
    cubic.pow(((p - 1) / 2) as u64).coeff(p - 1)
}

/// j-invariant of y² = x³ + Ax + B.
pub fn j_invariant(field: &Field, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    let a3 = field.scale(&field.mul(a, &field.square(a)), 4);
    let disc = field.add(&a3, &field.scale(&field.square(b), 27));
    let num = field.mul(&field.from_u32(1728), &a3);
    field.div(&num, &disc)
}

/// Weierstrass cubic realizing `j` over `field`.
pub fn elliptic_model(field: &Field, j: &FieldElement) -> Result<Poly> {
    let p = field.p();
    let c1728 = field.from_u32(1728);
    if p == 3 || *j == c1728 {
        return Ok(Poly::from_i64s(field, &[0, -1, 0, 1]));
    }
    if j.is_zero() {
        return Ok(Poly::from_i64s(field, &[-1, 0, 0, 1]));
    }
    let t = field.div(j, &field.sub(&c1728, j))?;
    Ok(Poly::new(
        field,
        vec![field.scale(&t, 2), field.scale(&t, 3), field.zero(), field.one()],
    ))
}

#[derive(Clone, Debug)]
pub struct SupersingularCurve {
    /// j-invariant as an element of the F_{p^2} of the enclosing list.
    pub j: FieldElement,
    pub aut_order: u32,
    /// Model over F_p when j is rational, otherwise over F_{p^2}.
    pub model: Poly,
}

#[derive(Clone, Debug)]
pub struct SupersingularList {
    pub field: Field,
    pub curves: Vec<SupersingularCurve>,
}

impl SupersingularList {
    pub fn mass(&self) -> BigRational {
        self.curves.iter().fold(BigRational::zero(), |acc, c| {
            acc + BigRational::new(1.into(), c.aut_order.into())
        })
    }
}

fn aut_order(p: u32, j: &FieldElement, field: &Field) -> u32 {
    if p == 3 {
        12
    } else if j.is_zero() {
        6
    } else if *j == field.from_u32(1728) {
        4
    } else {
        2
    }
}

/// All supersingular j-invariants in characteristic p, in element order.
pub fn enumerate_supersingular(p: u32, seed: u64) -> Result<SupersingularList> {
    if p == 2 {
        return Err(Error::UnsupportedCharacteristic(2));
    }
    let fp = prime_field(p as u64)?;
    let f2 = make_extension(p as u64, 2, seed)?;
    if p == 3 {
        // every curve in characteristic 3 with j ≠ 0 is ordinary
        return Ok(SupersingularList {
            curves: vec![SupersingularCurve {
                j: f2.zero(),
                aut_order: 12,
                model: elliptic_model(&fp, &fp.zero())?,
            }],
            field: f2,
        });
    }
    let n = (p as u128) * (p as u128);
    let mut found: Vec<SupersingularCurve> = (0..n)
        .into_par_iter()
        .filter_map(|idx| {
            let j = f2.element_at(idx);
            let model = elliptic_model(&f2, &j).ok()?;
            if !hasse_invariant(&model).is_zero() {
                return None;
            }
            let aut_order = aut_order(p, &j, &f2);
            let model = match f2.to_prime(&j) {
                Some(jp) => elliptic_model(&fp, &fp.from_u32(jp)).ok()?,
                None => model,
            };
            Some(SupersingularCurve { j, aut_order, model })
        })
        .collect();
    found.sort_by(|a, b| a.j.cmp(&b.j));
    Ok(SupersingularList {
        field: f2,
        curves: found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_extension;
    use rand::SeedableRng;

    fn curve(p: u64, c: &[i64]) -> HyperellipticCurve {
        let f = prime_field(p).unwrap();
        HyperellipticCurve::new(Poly::from_i64s(&f, c)).unwrap()
    }

    fn as_u32(m: &Matrix) -> Vec<Vec<u32>> {
        m.iter()
            .map(|r| r.iter().map(|e| e.coeffs()[0]).collect())
            .collect()
    }

    #[test]
    fn hasse_witt_small_examples() {
        // (x²+x+2)(x³−x) over F_3
        let q = Poly::from_i64s(&prime_field(3).unwrap(), &[2, 1, 1]);
        let c = HyperellipticCurve::new(q.mul(&Poly::from_i64s(q.field(), &[0, -1, 0, 1])))
            .unwrap();
        assert_eq!(as_u32(&c.hasse_witt()), vec![vec![2, 1], vec![1, 1]]);

        let f9 = make_extension(3, 2, 4).unwrap();
        for a in f9.elements() {
            let f = Poly::new(
                &f9,
                vec![f9.one(), f9.zero(), f9.zero(), a, f9.zero(), f9.one()],
            );
            if let Ok(c) = HyperellipticCurve::new(f) {
                let h = c.hasse_witt();
                assert!(h[0][0].is_zero() && f9.is_one(&h[0][1]));
                assert!(h[1][0].is_zero() && h[1][1].is_zero());
                assert_eq!(c.p_rank(), 0);
            }
        }

        let c = curve(7, &[0, -1, 0, 0, 0, 1]);
        assert!(c.hasse_witt().iter().flatten().all(|e| e.is_zero()));
        assert_eq!(c.a_number(), 2);
        assert_eq!(c.p_rank(), 0);
    }

    #[test]
    fn p_rank_zero_examples() {
        assert_eq!(curve(5, &[0, -2, 2, 0, 1, 1]).p_rank(), 0);
        assert_eq!(curve(5, &[-1, 0, 0, 1]).p_rank(), 0);
        // x(x⁸+x⁶+x⁵−x³−x²−1) over F_3, genus 4
        let c = curve(3, &[0, -1, 0, -1, -1, 0, 1, 1, 0, 1]);
        assert_eq!(c.genus(), 4);
        assert_eq!(c.p_rank(), 0);
        // its double cover y² = f(x²), genus 7
        let c = curve(3, &[-1, 0, 0, 0, -1, 0, -1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1]);
        assert_eq!(c.genus(), 7);
        assert_eq!(c.p_rank(), 0);
    }

    #[test]
    fn genus_and_validation() {
        assert_eq!(curve(7, &[1, 0, 0, 1]).genus(), 1);
        assert_eq!(curve(7, &[1, 0, 0, 0, 1]).genus(), 1);
        assert_eq!(curve(7, &[0, -1, 0, 0, 0, 1]).genus(), 2);
        assert_eq!(curve(7, &[1, 0, 0, 0, 0, 0, 1]).genus(), 2);
        let f = prime_field(7).unwrap();
        assert_eq!(
            HyperellipticCurve::new(Poly::from_i64s(&f, &[0, 0, 1, 1])),
            Err(Error::SingularCurve)
        );
        assert_eq!(
            HyperellipticCurve::new(Poly::from_i64s(&f, &[1, 0, 1])),
            Err(Error::BadDegree(2))
        );
    }

    /// Affine point count of y² = f over F_p via Euler's criterion.
    fn affine_points(p: u64, f: &Poly) -> u64 {
        let fld = f.field();
        (0..p)
            .map(|x| {
                let v = f.eval(&fld.from_u32(x as u32));
                if v.is_zero() {
                    1
                } else if fld.is_one(&fld.pow(&v, (p - 1) / 2)) {
                    2
                } else {
                    0
                }
            })
            .sum()
    }

    #[test]
    fn elliptic_p_rank_matches_point_count() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for &p in &[5u64, 7, 11, 13] {
            let f = prime_field(p).unwrap();
            for _ in 0..20 {
                let a = f.random(&mut rng);
                let b = f.random(&mut rng);
                let cubic = Poly::new(&f, vec![b, a, f.zero(), f.one()]);
                let Ok(c) = HyperellipticCurve::new(cubic.clone()) else {
                    continue;
                };
                let supersingular = affine_points(p, &cubic) + 1 == p + 1;
                assert_eq!(c.p_rank() == 0, supersingular);
                assert_eq!(hasse_invariant(&cubic).is_zero(), supersingular);
            }
        }
    }

    #[test]
    fn supersingular_lists() {
        let l = enumerate_supersingular(7, 1).unwrap();
        assert_eq!(l.curves.len(), 1);
        assert_eq!(l.field.to_prime(&l.curves[0].j), Some(6));
        assert_eq!(l.curves[0].aut_order, 4);
        assert_eq!(l.mass(), BigRational::new(1.into(), 4.into()));

        let l = enumerate_supersingular(11, 1).unwrap();
        let js: Vec<_> = l.curves.iter().map(|c| l.field.to_prime(&c.j)).collect();
        assert_eq!(js, vec![Some(0), Some(1)]);
        assert_eq!(l.mass(), BigRational::new(5.into(), 12.into()));

        let l = enumerate_supersingular(3, 1).unwrap();
        assert_eq!(l.curves.len(), 1);
        assert_eq!(l.curves[0].aut_order, 12);
    }

    #[test]
    fn p13_single_j_equals_model_invariant() {
        let f = prime_field(13).unwrap();
        let j = j_invariant(&f, &f.from_u32(1), &f.from_u32(4)).unwrap();
        assert_eq!(f.to_prime(&j), Some(5));
        let l = enumerate_supersingular(13, 9).unwrap();
        assert_eq!(l.curves.len(), 1);
        assert_eq!(l.field.to_prime(&l.curves[0].j), Some(5));
        assert_eq!(l.curves[0].aut_order, 2);
        // every j in F_169 whose cubic x³+Ax+B is supersingular has j = 5
        let f2 = &l.field;
        let mut seen = std::collections::BTreeSet::new();
        for a in f2.elements() {
            for b in f2.elements().step_by(7) {
                let cubic = Poly::new(f2, vec![b.clone(), a.clone(), f2.zero(), f2.one()]);
                if is_squarefree(&cubic) && hasse_invariant(&cubic).is_zero() {
                    seen.insert(j_invariant(f2, &a, &b).unwrap());
                }
            }
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![f2.from_u32(5)]);
    }

    #[test]
    fn mass_formula_small_primes() {
        for p in [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            let l = enumerate_supersingular(p, 2).unwrap();
            assert_eq!(
                l.mass(),
                BigRational::new((p as i64 - 1).into(), 24.into()),
                "p = {p}"
            );
        }
    }

    #[test]
    fn j_invariant_of_models_round_trips() {
        let f = make_extension(11, 2, 5).unwrap();
        for j in f.elements().step_by(5) {
            let m = elliptic_model(&f, &j).unwrap();
            if !is_squarefree(&m) {
                continue;
            }
            assert_eq!(j_invariant(&f, &m.coeff(1), &m.coeff(0)).unwrap(), j);
        }
    }
}
