//! Fractional-linear maps of the projective line, symmetry groups of finite
//! point sets, and the induced action on monic quadratics x² + ax + b.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::extension::Embedding;
use crate::ff::{Field, FieldElement};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointP1 {
    Finite(FieldElement),
    Infinity,
}

/// x ↦ (αx + β)/(γx + δ), scaled so that the first nonzero entry is 1.
#[derive(Clone, PartialEq, Eq)]
pub struct MobiusMap {
    m: [FieldElement; 4],
    field: Field,
}

impl PartialOrd for MobiusMap {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MobiusMap {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.m.cmp(&other.m)
    }
}

impl std::fmt::Debug for MobiusMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let e: Vec<String> = self.m.iter().map(|x| self.field.format(x)).collect();
        write!(f, "[[{}, {}], [{}, {}]]", e[0], e[1], e[2], e[3])
    }
}

impl MobiusMap {
    pub fn new(field: &Field, m: [FieldElement; 4]) -> Result<Self> {
        let det = field.sub(&field.mul(&m[0], &m[3]), &field.mul(&m[1], &m[2]));
        if det.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let lead = m.iter().find(|x| !x.is_zero()).expect("nonzero determinant");
        let s = field.inv(lead)?;
        Ok(MobiusMap {
            m: m.map(|x| field.mul(&x, &s)),
            field: field.clone(),
        })
    }

    pub fn identity(field: &Field) -> Self {
        MobiusMap::new(field, [field.one(), field.zero(), field.zero(), field.one()])
            .expect("identity is invertible")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElement; 4] {
        &self.m
    }

    pub fn apply(&self, z: &PointP1) -> PointP1 {
        let f = &self.field;
        let [al, be, ga, de] = &self.m;
        let (num, den) = match z {
            PointP1::Infinity => (al.clone(), ga.clone()),
            PointP1::Finite(x) => (f.add(&f.mul(al, x), be), f.add(&f.mul(ga, x), de)),
        };
        if den.is_zero() {
            PointP1::Infinity
        } else {
            PointP1::Finite(f.div(&num, &den).expect("nonzero denominator"))
        }
    }

    /// self ∘ other.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let f = &self.field;
        let [a, b, c, d] = &self.m;
        let [e, g, h, k] = &other.m;
        let dot = |x: &FieldElement, y: &FieldElement, z: &FieldElement, w: &FieldElement| {
            f.add(&f.mul(x, y), &f.mul(z, w))
        };
        MobiusMap::new(
            f,
            [dot(a, e, b, h), dot(a, g, b, k), dot(c, e, d, h), dot(c, g, d, k)],
        )
        .expect("product of invertible maps")
    }

    pub fn inverse(&self) -> MobiusMap {
        let f = &self.field;
        let [a, b, c, d] = &self.m;
        MobiusMap::new(f, [d.clone(), f.neg(b), f.neg(c), a.clone()]).expect("invertible")
    }

    /// The same map with entries pushed through an embedding.
    pub fn map_field(&self, emb: &Embedding) -> MobiusMap {
        MobiusMap::new(emb.dst(), self.m.clone().map(|x| emb.apply(&x))).expect("invertible")
    }

    /// The map sending z1, z2, z3 to 0, 1, ∞.
    fn to_standard(field: &Field, z: &[PointP1; 3]) -> Result<MobiusMap> {
        use PointP1::*;
        let f = field;
        let m = match z {
            [Infinity, Finite(z2), Finite(z3)] => [f.zero(), f.sub(z2, z3), f.one(), f.neg(z3)],
            [Finite(z1), Infinity, Finite(z3)] => [f.one(), f.neg(z1), f.one(), f.neg(z3)],
            [Finite(z1), Finite(z2), Infinity] => [f.one(), f.neg(z1), f.zero(), f.sub(z2, z1)],
            [Finite(z1), Finite(z2), Finite(z3)] => {
                let u = f.sub(z2, z3);
                let v = f.sub(z2, z1);
                [u.clone(), f.neg(&f.mul(z1, &u)), v.clone(), f.neg(&f.mul(z3, &v))]
            }
            _ => return Err(Error::DivisionByZero),
        };
        MobiusMap::new(field, m)
    }

    /// The unique map sending src[i] to dst[i].
    pub fn from_triples(field: &Field, src: &[PointP1; 3], dst: &[PointP1; 3]) -> Result<MobiusMap> {
        let s = Self::to_standard(field, src)?;
        let d = Self::to_standard(field, dst)?;
        Ok(d.inverse().compose(&s))
    }
}

/// All Möbius maps over the field of the points that permute `set`.
pub fn symmetry_group(field: &Field, set: &[PointP1]) -> Result<Vec<MobiusMap>> {
    let pts: BTreeSet<PointP1> = set.iter().cloned().collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let v: Vec<PointP1> = pts.iter().cloned().collect();
    let src = [v[0].clone(), v[1].clone(), v[2].clone()];
    let mut out = BTreeSet::new();
    for i in 0..v.len() {
        for j in 0..v.len() {
            for k in 0..v.len() {
                if i == j || j == k || i == k {
                    continue;
                }
                let dst = [v[i].clone(), v[j].clone(), v[k].clone()];
                let m = MobiusMap::from_triples(field, &src, &dst)?;
                if v.iter().all(|z| pts.contains(&m.apply(z))) {
                    out.insert(m);
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// The monic quadratic whose roots are the images under `m` of the roots of
/// x² + ax + b, computed by pulling back along m⁻¹.
pub fn act_on_pair(
    m: &MobiusMap,
    a: &FieldElement,
    b: &FieldElement,
) -> Result<(FieldElement, FieldElement)> {
    let f = m.field();
    let [al, be, ga, de] = m.inverse().m;
    // (αy+β)² + a(αy+β)(γy+δ) + b(γy+δ)²
    let c2 = f.add(&f.add(&f.square(&al), &f.mul(a, &f.mul(&al, &ga))), &f.mul(b, &f.square(&ga)));
    let cross = f.add(&f.mul(&al, &de), &f.mul(&be, &ga));
    let c1 = f.add(
        &f.add(&f.scale(&f.mul(&al, &be), 2), &f.mul(a, &cross)),
        &f.scale(&f.mul(b, &f.mul(&ga, &de)), 2),
    );
    let c0 = f.add(&f.add(&f.square(&be), &f.mul(a, &f.mul(&be, &de))), &f.mul(b, &f.square(&de)));
    if c2.is_zero() {
        return Err(Error::DegenerateImage(format!("{m:?}")));
    }
    let inv = f.inv(&c2)?;
    Ok((f.mul(&c1, &inv), f.mul(&c0, &inv)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClass {
    pub representative: (FieldElement, FieldElement),
    pub members: Vec<(FieldElement, FieldElement)>,
    pub stabilizer: usize,
}

impl OrbitClass {
    pub fn orbit_size(&self) -> usize {
        self.members.len()
    }
}

/// Partitions `points` into G-orbits; every image must lie in `points`.
pub fn orbits(group: &[MobiusMap], points: &[(FieldElement, FieldElement)]) -> Result<Vec<OrbitClass>> {
    let all: BTreeSet<_> = points.iter().cloned().collect();
    let mut owner: BTreeMap<(FieldElement, FieldElement), usize> = BTreeMap::new();
    let mut out: Vec<OrbitClass> = Vec::new();
    for pt in &all {
        if owner.contains_key(pt) {
            continue;
        }
        let mut members = BTreeSet::new();
        let mut stabilizer = 0;
        for g in group {
            let img = act_on_pair(g, &pt.0, &pt.1)?;
            if !all.contains(&img) {
                return Err(Error::ClosureViolation);
            }
            if img == *pt {
                stabilizer += 1;
            }
            members.insert(img);
        }
        for m in &members {
            owner.insert(m.clone(), out.len());
        }
        let members: Vec<_> = members.into_iter().collect();
        out.push(OrbitClass {
            representative: members[0].clone(),
            members,
            stabilizer,
        });
    }
    Ok(out)
}
