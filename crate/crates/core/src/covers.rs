//! Étale double covers of a hyperelliptic curve, given as even splittings of
//! its branch set, and the two hyperelliptic quotients carrying the Prym.

use crate::curve::HyperellipticCurve;
use crate::error::{Error, Result};
use crate::extension::{canonical_embedding, splitting_field, Embedding};
use crate::ff::{Field, FieldElement};
use crate::poly::{gcd, roots, Poly};

/// Branch points of y² = f over a field containing all roots of f. Finite
/// points are sorted; ∞ is a branch point iff deg f is odd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSet {
    field: Field,
    finite: Vec<FieldElement>,
    infinity: bool,
}

impl BranchSet {
    pub fn new(field: &Field, mut finite: Vec<FieldElement>, infinity: bool) -> Result<Self> {
        finite.sort();
        if finite.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::SingularCurve);
        }
        Ok(BranchSet {
            field: field.clone(),
            finite,
            infinity,
        })
    }

    /// Branch set of `c` over its splitting field, with the embedding used.
    pub fn of_curve(c: &HyperellipticCurve, seed: u64) -> Result<(BranchSet, Embedding)> {
        let emb = splitting_field(c.f(), seed)?;
        let f = emb.apply_poly(c.f());
        let rs = roots(&f, seed)?.into_iter().map(|(r, _)| r).collect();
        let bs = BranchSet::new(emb.dst(), rs, c.f().deg() % 2 == 1)?;
        Ok((bs, emb))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn finite(&self) -> &[FieldElement] {
        &self.finite
    }

    pub fn has_infinity(&self) -> bool {
        self.infinity
    }

    /// Number of points; index `finite().len()` denotes ∞ when present.
    pub fn len(&self) -> usize {
        self.finite.len() + usize::from(self.infinity)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn is_infinite(&self, i: usize) -> bool {
        i == self.finite.len()
    }

    /// Monic product of (x − r) over the finite points with the given indices.
    fn product(&self, idx: &[usize]) -> Poly {
        idx.iter()
            .filter(|&&i| !self.is_infinite(i))
            .fold(Poly::one(&self.field), |acc, &i| {
                acc.mul(&Poly::linear(&self.field, &self.finite[i]))
            })
    }
}

/// A splitting B = B1 ⊔ B2 into nonempty parts of even size, stored as the
/// sorted indices of B1 into a branch set of `total` points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EvenPartition {
    b1: Vec<usize>,
    total: usize,
}

impl EvenPartition {
    pub fn new(total: usize, mut b1: Vec<usize>) -> Result<Self> {
        b1.sort_unstable();
        b1.dedup();
        let s = b1.len();
        if s == 0 || s >= total || s % 2 == 1 || total % 2 == 1 || b1.iter().any(|&i| i >= total) {
            return Err(Error::PartitionMismatch);
        }
        Ok(EvenPartition { b1, total })
    }

    /// B1 = roots of `q` in `bs`, plus ∞ if requested.
    pub fn from_roots(bs: &BranchSet, q: &Poly, infinity: bool) -> Result<Self> {
        if q.field() != bs.field() || (infinity && !bs.infinity) {
            return Err(Error::PartitionMismatch);
        }
        let mut b1: Vec<usize> = (0..bs.finite.len())
            .filter(|&i| q.eval(&bs.finite[i]).is_zero())
            .collect();
        if b1.len() != q.deg() {
            return Err(Error::PartitionMismatch);
        }
        if infinity {
            b1.push(bs.finite.len());
        }
        EvenPartition::new(bs.len(), b1)
    }

    pub fn b1(&self) -> &[usize] {
        &self.b1
    }

    pub fn b2(&self) -> Vec<usize> {
        (0..self.total).filter(|i| self.b1.binary_search(i).is_err()).collect()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// The same splitting, presented with point 0 in B2.
    pub fn canonical(&self) -> Self {
        if self.b1.first() == Some(&0) {
            EvenPartition {
                b1: self.b2(),
                total: self.total,
            }
        } else {
            self.clone()
        }
    }
}

/// All nontrivial even splittings of a set of `total` points, one per
/// unordered pair; there are 2^{total−2} − 1 of them.
pub fn even_partitions(total: usize) -> Result<Vec<EvenPartition>> {
    if total % 2 == 1 {
        return Err(Error::OddBranchSet(total));
    }
    if total < 4 {
        return Ok(Vec::new());
    }
    let rest = total - 1;
    let mut out = Vec::with_capacity((1usize << rest) / 2);
    for mask in 1u64..(1u64 << rest) {
        let s = mask.count_ones() as usize;
        if s % 2 == 1 || s == rest + 1 {
            continue;
        }
        let b1 = (0..rest).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        out.push(EvenPartition { b1, total });
    }
    out.sort();
    Ok(out)
}

/// One hyperelliptic quotient; genus-0 parts carry no curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Component {
    Rational,
    Curve(HyperellipticCurve),
}

impl Component {
    pub fn genus(&self) -> usize {
        match self {
            Component::Rational => 0,
            Component::Curve(c) => c.genus(),
        }
    }

    pub fn p_rank(&self) -> usize {
        match self {
            Component::Rational => 0,
            Component::Curve(c) => c.p_rank(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrymDecomposition {
    pub c1: Component,
    pub c2: Component,
}

fn component(f: Poly) -> Result<Component> {
    if f.deg() <= 2 {
        Ok(Component::Rational)
    } else {
        Ok(Component::Curve(HyperellipticCurve::new(f)?))
    }
}

fn check_branch_set(c: &HyperellipticCurve, bs: &BranchSet, part: &EvenPartition) -> Result<()> {
    if part.total != bs.len() || bs.len() != 2 * c.genus() + 2 {
        return Err(Error::PartitionMismatch);
    }
    let emb = canonical_embedding(c.field(), bs.field())?;
    let all: Vec<usize> = (0..bs.finite.len()).collect();
    if emb.apply_poly(c.f()).monic() != bs.product(&all) || bs.infinity != (c.f().deg() % 2 == 1)
    {
        return Err(Error::PartitionMismatch);
    }
    Ok(())
}

/// The quotients C1, C2 with branch sets B1, B2, defined over the field of `bs`.
pub fn prym_components(
    c: &HyperellipticCurve,
    bs: &BranchSet,
    part: &EvenPartition,
) -> Result<PrymDecomposition> {
    check_branch_set(c, bs, part)?;
    let lc = canonical_embedding(c.field(), bs.field())?.apply(&c.f().lc());
    Ok(PrymDecomposition {
        c1: component(bs.product(part.b1()))?,
        c2: component(bs.product(&part.b2()).scale(&lc))?,
    })
}

/// p-rank of the double cover: p_rank(C) + p_rank(C1) + p_rank(C2).
pub fn cover_p_rank(c: &HyperellipticCurve, bs: &BranchSet, part: &EvenPartition) -> Result<usize> {
    let d = prym_components(c, bs, part)?;
    Ok(c.p_rank() + d.c1.p_rank() + d.c2.p_rank())
}

/// (x² + ax + b)·f_E.
pub fn pair_polynomial(a: &FieldElement, b: &FieldElement, f_e: &Poly) -> Poly {
    let fld = f_e.field();
    Poly::new(fld, vec![b.clone(), a.clone(), fld.one()]).mul(f_e)
}

/// Whether y² = (x² + ax + b)·f_E is smooth: the quadratic is separable and
/// coprime to f_E (f_E itself is assumed squarefree).
pub fn is_smooth_pair(a: &FieldElement, b: &FieldElement, f_e: &Poly) -> bool {
    let fld = f_e.field();
    let disc = fld.sub(&fld.square(a), &fld.scale(b, 4));
    let q = Poly::new(fld, vec![b.clone(), a.clone(), fld.one()]);
    !disc.is_zero() && gcd(&q, f_e).map(|g| g.is_one()).unwrap_or(false)
}

/// The genus-2 curve of the pair (a, b) over the elliptic model f_E.
pub fn pair_curve(a: &FieldElement, b: &FieldElement, f_e: &Poly) -> Result<HyperellipticCurve> {
    if !is_smooth_pair(a, b, f_e) {
        return Err(Error::SingularCurve);
    }
    HyperellipticCurve::new(pair_polynomial(a, b, f_e))
}
