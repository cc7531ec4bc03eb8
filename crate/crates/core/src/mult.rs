//! Local intersection multiplicity of the p-rank-zero scheme in the (a, b)
//! plane, and the order of vanishing of the Hasse invariant along a family.
//!
//! Lengths are Hilbert-Samuel dimensions dim O/(I + m^{d+1}) computed from
//! truncated Macaulay matrices; once two consecutive values agree, Nakayama
//! gives m^{d+1} ⊆ I and the value is the length of O/I.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::extension::{flatten, Embedding};
use crate::ff::{Field, FieldElement};
use crate::linalg::row_reduce;
use crate::poly::{gcd, irreducible_factors, Poly};
use crate::solver::{PrymFiberSystem, SolutionPoint};

/// Truncated power series in two variables, stored sparsely.
#[derive(Clone, Debug)]
struct Local {
    field: Field,
    deg: usize,
    terms: BTreeMap<(usize, usize), FieldElement>,
}

impl Local {
    fn zero(field: &Field, deg: usize) -> Local {
        Local { field: field.clone(), deg, terms: BTreeMap::new() }
    }

    fn push(&mut self, i: usize, j: usize, c: &FieldElement) {
        if i + j > self.deg || c.is_zero() {
            return;
        }
        let f = &self.field;
        let e = self.terms.entry((i, j)).or_insert_with(|| f.zero());
        *e = f.add(e, c);
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    fn add(&self, other: &Local) -> Local {
        let mut out = self.clone();
        for ((i, j), c) in &other.terms {
            out.push(*i, *j, c);
        }
        out
    }

    fn mul(&self, other: &Local) -> Local {
        let f = &self.field;
        let mut out = Local::zero(f, self.deg.min(other.deg));
        for ((i, j), c) in &self.terms {
            for ((k, l), e) in &other.terms {
                if i + j + k + l <= out.deg {
                    out.push(i + k, j + l, &f.mul(c, e));
                }
            }
        }
        out
    }

    /// Frobenius on coefficients and both variables raised to the p-th power.
    fn twist(&self) -> Local {
        let f = &self.field;
        let p = f.p() as usize;
        let mut out = Local::zero(f, self.deg);
        for ((i, j), c) in &self.terms {
            out.push(i * p, j * p, &f.frobenius(c));
        }
        out
    }

    fn order(&self) -> Option<usize> {
        self.terms.keys().map(|(i, j)| i + j).min()
    }

    fn form(&self, e: usize) -> Vec<FieldElement> {
        (0..=e)
            .map(|j| self.terms.get(&(e - j, j)).cloned().unwrap_or_else(|| self.field.zero()))
            .collect()
    }

    fn map(&self, emb: &Embedding) -> Local {
        Local {
            field: emb.dst().clone(),
            deg: self.deg,
            terms: self.terms.iter().map(|(k, c)| (*k, emb.apply(c))).collect(),
        }
    }
}

fn binomials(f: &Field, n: usize) -> Vec<Vec<FieldElement>> {
    let mut rows: Vec<Vec<FieldElement>> = vec![vec![f.one()]];
    for r in 1..=n {
        let prev = &rows[r - 1];
        let row = (0..=r)
            .map(|k| {
                let left = if k > 0 { prev[k - 1].clone() } else { f.zero() };
                let right = prev.get(k).cloned().unwrap_or_else(|| f.zero());
                f.add(&left, &right)
            })
            .collect();
        rows.push(row);
    }
    rows
}

fn idx(i: usize, j: usize) -> usize {
    let e = i + j;
    e * (e + 1) / 2 + j
}

/// dim O/(I + m^{d+1}) for the ideal generated by `gens`.
fn colength(gens: &[Local], d: usize) -> usize {
    let Some(f) = gens.first().map(|g| g.field.clone()) else {
        return (d + 1) * (d + 2) / 2;
    };
    let cols = (d + 1) * (d + 2) / 2;
    let mut rows = Vec::new();
    for g in gens {
        let Some(o) = g.order() else { continue };
        if o > d {
            continue;
        }
        for e in 0..=d - o {
            for t in 0..=e {
                let s = e - t;
                let mut row = vec![f.zero(); cols];
                for ((i, j), c) in &g.terms {
                    if i + j + e <= d {
                        row[idx(i + s, j + t)] = c.clone();
                    }
                }
                rows.push(row);
            }
        }
    }
    cols - row_reduce(&f, &mut rows).len()
}

/// Length of the local ring at the origin; `Err` if not reached by `cap`.
fn hilbert_samuel(gens: &[Local], cap: usize) -> Result<(usize, usize, Vec<usize>)> {
    let mut trace = vec![colength(gens, 0)];
    for d in 1..=cap {
        trace.push(colength(gens, d));
        if trace[d] == trace[d - 1] {
            return Ok((trace[d], d - 1, trace));
        }
    }
    Err(Error::NoStabilization { cap, trace })
}

/// How the multiplicity was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Method {
    /// Length of the fiber-plane local ring of the four entries.
    FiberLength,
    /// Branch count at a point with H = 0: `order` plus the strict-transform
    /// lengths of the in-plane tangent directions, listed as (degree, length).
    Branches { order: usize, in_plane: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityResult {
    pub m: usize,
    /// Truncation degree at which the Hilbert-Samuel values became constant.
    pub stabilized_at: usize,
    /// Hilbert-Samuel values d = 0, 1, ... of the last length computed.
    pub trace: Vec<usize>,
    pub method: Method,
}

/// Default truncation cap, 2(p + 3).
pub fn default_cap(p: u32) -> usize {
    2 * (p as usize + 3)
}

pub fn local_multiplicity(sys: &PrymFiberSystem, pt: &SolutionPoint, seed: u64) -> Result<MultiplicityResult> {
    local_multiplicity_capped(sys, pt, default_cap(sys.field().p()), seed)
}

pub fn local_multiplicity_capped(
    sys: &PrymFiberSystem,
    pt: &SolutionPoint,
    cap: usize,
    seed: u64,
) -> Result<MultiplicityResult> {
    let l = pt.field().clone();
    let p = l.p() as usize;
    let g = sys.genus();
    if !sys.vanishes_at(&pt.base, &pt.a, &pt.b) {
        return Err(Error::Internal("point is not a zero of the system".into()));
    }
    let top: usize = (0..g).map(|k| p.pow(k as u32)).sum();
    let deg = top + cap + 1;

    // H translated to the point: a = a0 + u, b = b0 + w
    let hdeg = sys.h_sym().iter().flatten().map(|e| e.total_degree()).max().unwrap_or(0);
    let binom = binomials(&l, hdeg);
    let pow_list = |x: &FieldElement| {
        let mut v = vec![l.one()];
        for _ in 0..hdeg {
            v.push(l.mul(v.last().unwrap(), x));
        }
        v
    };
    let (ap, bp) = (pow_list(&pt.a), pow_list(&pt.b));
    let h: Vec<Vec<Local>> = sys
        .h_sym()
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let mut s = Local::zero(&l, deg);
                    for (i, j, c) in e.terms() {
                        let c = pt.base.apply(&c);
                        for s1 in 0..=i {
                            let ca = l.mul(&c, &l.mul(&binom[i][s1], &ap[i - s1]));
                            for t1 in 0..=j {
                                s.push(s1, t1, &l.mul(&ca, &l.mul(&binom[j][t1], &bp[j - t1])));
                            }
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let matmul = |x: &[Vec<Local>], y: &[Vec<Local>]| -> Vec<Vec<Local>> {
        (0..g)
            .map(|i| {
                (0..g)
                    .map(|j| (0..g).fold(Local::zero(&l, deg), |acc, t| acc.add(&x[i][t].mul(&y[t][j]))))
                    .collect()
            })
            .collect()
    };
    let mut m = h.clone();
    let mut tw = h.clone();
    for _ in 1..g {
        tw = tw.iter().map(|r| r.iter().map(Local::twist).collect()).collect();
        m = matmul(&m, &tw);
    }
    let gens: Vec<Local> = m.into_iter().flatten().filter(|e| !e.terms.is_empty()).collect();
    if gens.is_empty() {
        return Err(Error::PositiveDimension);
    }

    let h_zero = h.iter().flatten().all(|e| !e.terms.contains_key(&(0, 0)));
    if !h_zero {
        let (len, at, trace) = hilbert_samuel(&gens, cap)?;
        return Ok(MultiplicityResult { m: len, stabilized_at: at, trace, method: Method::FiberLength });
    }
    branch_count(&gens, cap, seed)
}

/// Multiplicity at a point where every generator has order at least that of
/// the p + 1 branches through it.
fn branch_count(gens: &[Local], cap: usize, seed: u64) -> Result<MultiplicityResult> {
    let l = gens[0].field.clone();
    let order = gens.iter().filter_map(Local::order).min().expect("nonzero generators");
    // in-plane directions (1 : s) are the common roots of F_k(1, s)
    let mut common = Poly::zero(&l);
    for g in gens {
        common = gcd(&common, &Poly::new(&l, g.form(order)))?;
    }
    if common.is_zero() {
        return Err(Error::UnsupportedLocalStructure(
            "leading forms of the generators vanish identically".into(),
        ));
    }
    let mut in_plane = Vec::new();
    let mut extra = 0;
    let mut last = (0, Vec::new());
    if common.deg() > 0 {
        for psi in irreducible_factors(&common, seed)? {
            let tw = flatten(&psi, seed)?;
            let s0 = tw.root.clone();
            let lp = tw.field.clone();
            let binom = binomials(&lp, gens[0].deg);
            let strict: Vec<Local> = gens
                .iter()
                .map(|g| {
                    let g = g.map(&tw.base);
                    let mut out = Local::zero(&lp, cap + 1);
                    let s_pow = {
                        let mut v = vec![lp.one()];
                        for _ in 0..g.deg {
                            v.push(lp.mul(v.last().unwrap(), &s0));
                        }
                        v
                    };
                    // u^i w^j ↦ u^{i+j-order} (s0 + w)^j
                    for ((i, j), c) in &g.terms {
                        let e = i + j - order;
                        for t in 0..=*j {
                            out.push(e, t, &lp.mul(c, &lp.mul(&binom[*j][t], &s_pow[j - t])));
                        }
                    }
                    out
                })
                .collect();
            let (len, at, trace) = hilbert_samuel(&strict, cap)?;
            extra += psi.deg() * len;
            in_plane.push((psi.deg(), len));
            last = (at, trace);
        }
    }
    // the vertical direction (0 : 1)
    if gens.iter().all(|g| g.form(order)[order].is_zero()) {
        let strict: Vec<Local> = gens
            .iter()
            .map(|g| {
                let mut out = Local::zero(&l, cap + 1);
                for ((i, j), c) in &g.terms {
                    out.push(*i, i + j - order, c);
                }
                out
            })
            .collect();
        let (len, at, trace) = hilbert_samuel(&strict, cap)?;
        extra += len;
        in_plane.push((1, len));
        last = (at, trace);
    }
    Ok(MultiplicityResult {
        m: order + extra,
        stabilized_at: last.0,
        trace: last.1,
        method: Method::Branches { order, in_plane },
    })
}

/// t-adic valuation of the coefficient of x^{p-1} in f_t^{(p-1)/2}, where
/// `f_t` lists the x-coefficients as polynomials in t. Works modulo t^{cap+1};
/// `None` means the coefficient vanishes to that precision.
pub fn vanishing_order_in_family(f_t: &[Poly], cap: usize) -> Option<usize> {
    let f = f_t.first()?.field().clone();
    let p = f.p() as usize;
    let trunc = |q: Poly| {
        let mut c = q.into_coeffs();
        c.truncate(cap + 1);
        Poly::new(&f, c)
    };
    let target = p - 1;
    let mul = |x: &[Poly], y: &[Poly]| -> Vec<Poly> {
        let mut out = vec![Poly::zero(&f); (x.len() + y.len() - 1).min(target + 1)];
        for (i, a) in x.iter().enumerate() {
            for (j, b) in y.iter().enumerate() {
                if i + j <= target && !a.is_zero() && !b.is_zero() {
                    out[i + j] = trunc(out[i + j].add(&a.mul(b)));
                }
            }
        }
        out
    };
    let base: Vec<Poly> = f_t.iter().cloned().map(trunc).collect();
    let mut acc = vec![Poly::one(&f)];
    for _ in 0..(p - 1) / 2 {
        acc = mul(&acc, &base);
    }
    let c = acc.get(target).cloned().unwrap_or_else(|| Poly::zero(&f));
    c.coeffs().iter().position(|e| !e.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::prime_field;
    use crate::linalg::rank;
    use crate::solver::{all_points, build_system, solve_fiber};

    fn system(p: u64, model: &[i64]) -> PrymFiberSystem {
        let f = prime_field(p).unwrap();
        build_system(&Poly::from_i64s(&f, model)).unwrap()
    }

    // the classical intersection number of two transversal lines and of a
    // line tangent to a conic
    #[test]
    fn plane_lengths() {
        let f = prime_field(7).unwrap();
        let mk = |ts: &[(usize, usize, i64)]| {
            let mut s = Local::zero(&f, 12);
            for &(i, j, c) in ts {
                s.push(i, j, &f.from_i64(c));
            }
            s
        };
        let x = mk(&[(1, 0, 1)]);
        let y = mk(&[(0, 1, 1)]);
        assert_eq!(hilbert_samuel(&[x.clone(), y.clone()], 10).unwrap().0, 1);
        let conic = mk(&[(0, 1, 1), (2, 0, -1)]);
        assert_eq!(hilbert_samuel(&[conic.clone(), y.clone()], 10).unwrap().0, 2);
        // (y - x^2, y^2) has length 4; (x^3, y^2) has length 6
        let y2 = y.mul(&y);
        assert_eq!(hilbert_samuel(&[conic, y2.clone()], 10).unwrap().0, 4);
        let x3 = x.mul(&x).mul(&x);
        let (len, at, trace) = hilbert_samuel(&[x3.clone(), y2.clone()], 10).unwrap();
        assert_eq!(len, 6);
        // values stay constant past the stopping point
        for d in at..at + 4 {
            assert_eq!(colength(&[x3.clone(), y2.clone()], d), len);
        }
        assert!(trace.windows(2).all(|w| w[0] <= w[1]));
        assert!(matches!(hilbert_samuel(&[x3], 5), Err(Error::NoStabilization { .. })));
    }

    fn jacobian_rank(sys: &PrymFiberSystem, pt: &SolutionPoint) -> usize {
        let l = pt.field();
        let rows: Vec<Vec<FieldElement>> = sys
            .m_sym()
            .iter()
            .flatten()
            .map(|e| {
                let mut da = l.zero();
                let mut db = l.zero();
                for (i, j, c) in e.terms() {
                    let c = pt.base.apply(&c);
                    if i > 0 {
                        let t = l.mul(&l.scale(&c, i as u32), &l.mul(&l.pow(&pt.a, i as u64 - 1), &l.pow(&pt.b, j as u64)));
                        da = l.add(&da, &t);
                    }
                    if j > 0 {
                        let t = l.mul(&l.scale(&c, j as u32), &l.mul(&l.pow(&pt.a, i as u64), &l.pow(&pt.b, j as u64 - 1)));
                        db = l.add(&db, &t);
                    }
                }
                vec![da, db]
            })
            .collect();
        rank(l, &rows)
    }

    #[test]
    fn p5_points_are_transversal() {
        let sys = system(5, &[-1, 0, 0, 1]);
        let pts = solve_fiber(&sys, 1).unwrap();
        assert_eq!(pts.len(), 3);
        for pt in &pts {
            let r = local_multiplicity(&sys, pt, 1).unwrap();
            assert_eq!(r.m, 1);
            assert_eq!(r.method, Method::FiberLength);
            assert_eq!(jacobian_rank(&sys, pt), 2);
        }
    }

    #[test]
    fn p7_multiplicities() {
        let sys = system(7, &[0, -1, 0, 1]);
        let pts = solve_fiber(&sys, 3).unwrap();
        let mut by_a = Vec::new();
        for pt in &pts {
            let r = local_multiplicity(&sys, pt, 3).unwrap();
            let a = pt.a_number(&sys);
            if a == 2 {
                assert_eq!(r.m, 8);
                assert!(matches!(r.method, Method::Branches { order: 8, .. }));
            } else {
                assert_eq!(r.m, 1);
                assert_eq!(jacobian_rank(&sys, pt), 2);
            }
            by_a.push((a, r.m));
        }
        assert_eq!(by_a.iter().filter(|x| x.0 == 2).count(), 1);
    }

    #[test]
    fn p13_single_tangency() {
        let sys = system(13, &[4, 1, 0, 1]);
        let f = sys.field().clone();
        let quartic = Poly::from_i64s(&f, &[9, 8, 7, 8, 1]);
        let pts = solve_fiber(&sys, 5).unwrap();
        let mut seen = 0;
        for pt in &pts {
            let r = local_multiplicity(&sys, pt, 5).unwrap();
            if pt.a_minpoly == quartic {
                assert_eq!(r.m, 2);
                seen += 1;
            } else if pt.a_number(&sys) == 1 {
                assert_eq!(r.m, 1, "a-minpoly {:?}", pt.a_minpoly);
            }
        }
        assert_eq!(seen, 1);
    }

    #[test]
    fn p17_branch_multiplicities() {
        // y² = (x³ − 1)(x² − 2x − 2): a = b = −2
        let sys = system(17, &[-1, 0, 0, 1]);
        let f = sys.field().clone();
        let id = Embedding::identity(&f);
        let pts = all_points(&sys, &id, 7).unwrap();
        let pt = pts
            .iter()
            .find(|q| q.degree == 1 && q.a == q.field().from_i64(-2) && q.b == q.field().from_i64(-2))
            .expect("the rational point is a solution");
        assert_eq!(pt.a_number(&sys), 2);
        assert_eq!(local_multiplicity(&sys, pt, 7).unwrap().m, 20);
    }

    #[test]
    fn family_orders() {
        let f = prime_field(13).unwrap();
        let t = |c: &[i64]| Poly::from_i64s(&f, c);
        let fam = vec![t(&[2, -1]), t(&[-2, 2]), t(&[6, 1]), t(&[1]), t(&[1])];
        assert_eq!(vanishing_order_in_family(&fam, 10), Some(2));
        // ordinary constant family: y² = x³ + 1 over F_13 has Hasse invariant ≠ 0
        let ord = vec![t(&[1]), t(&[0]), t(&[0]), t(&[1])];
        assert_eq!(vanishing_order_in_family(&ord, 10), Some(0));
        // supersingular constant family: x³ − x at p = 7
        let f7 = prime_field(7).unwrap();
        let ss = vec![Poly::zero(&f7), Poly::from_i64s(&f7, &[-1]), Poly::zero(&f7), Poly::one(&f7)];
        assert_eq!(vanishing_order_in_family(&ss, 10), None);
    }
}
