//! Dense linear algebra over a finite field, plus an incremental span over F_p
//! used to express extension-field elements in a chosen basis.

use crate::ff::{FieldContext, FieldElement};

pub type Matrix = Vec<Vec<FieldElement>>;

pub fn identity(f: &FieldContext, n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect())
        .collect()
}

pub fn mat_mul(f: &FieldContext, a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = f.zero();
                    for t in 0..inner {
                        if !row[t].is_zero() && !b[t][j].is_zero() {
                            acc = f.add(&acc, &f.mul(&row[t], &b[t][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Row-reduces in place and returns the pivot columns.
pub fn row_reduce(f: &FieldContext, m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = f.inv(&m[r][c]).expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(pivot_row.iter()).skip(c) {
                if !y.is_zero() {
                    *x = f.sub(x, &f.mul(&factor, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(f: &FieldContext, m: &Matrix) -> usize {
    let mut work = m.clone();
    row_reduce(f, &mut work).len()
}

pub fn determinant(f: &FieldContext, m: &Matrix) -> FieldElement {
    let n = m.len();
    let mut a = m.clone();
    let mut det = f.one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return f.zero();
        };
        if piv != c {
            a.swap(piv, c);
            det = f.neg(&det);
        }
        det = f.mul(&det, &a[c][c]);
        let inv = f.inv(&a[c][c]).expect("pivot is nonzero");
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = f.mul(&a[i][c], &inv);
            for j in c..n {
                let t = f.mul(&factor, &a[c][j]);
                a[i][j] = f.sub(&a[i][j], &t);
            }
        }
    }
    det
}

/// Incrementally built span of vectors in F_p^n. Each stored row keeps the
/// combination of inserted generators that produced it, so membership tests
/// also return coordinates.
#[derive(Clone)]
pub struct FpSpan {
    p: u64,
    n: usize,
    rows: Vec<(usize, Vec<u32>, Vec<u32>)>,
    gens: usize,
}

impl FpSpan {
    pub fn new(p: u32, n: usize) -> Self {
        FpSpan {
            p: p as u64,
            n,
            rows: Vec::new(),
            gens: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.gens
    }

    /// Reduces `v` against the span; returns the residue and the combination
    /// (in generator coordinates) that was subtracted.
    fn reduce(&self, v: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let p = self.p;
        let mut v: Vec<u32> = v.to_vec();
        v.resize(self.n, 0);
        let mut combo = vec![0u32; self.gens];
        for (piv, row, rc) in &self.rows {
            let c = v[*piv] as u64;
            if c == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(row.iter()) {
                if y != 0 {
                    *x = ((*x as u64 + (p - c) * y as u64) % p) as u32;
                }
            }
            for (x, &y) in combo.iter_mut().zip(rc.iter()) {
                if y != 0 {
                    *x = ((*x as u64 + c * y as u64) % p) as u32;
                }
            }
        }
        (v, combo)
    }

    /// Adds `v` as a new generator if it is independent; returns whether it was.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let (res, combo) = self.reduce(v);
        let Some(piv) = res.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p;
        let inv = crate::ff::fp::inv(res[piv], p as u32) as u64;
        let row: Vec<u32> = res.iter().map(|&x| ((x as u64 * inv) % p) as u32).collect();
        // row = (v - combo·gens) / res[piv]
        let mut rc: Vec<u32> = combo
            .iter()
            .map(|&x| (((p - x as u64) % p * inv) % p) as u32)
            .collect();
        rc.push(inv as u32);
        for (_, _, other) in self.rows.iter_mut() {
            other.push(0);
        }
        self.gens += 1;
        self.rows.push((piv, row, rc));
        true
    }

    /// Coordinates of `v` in terms of the inserted generators, if in the span.
    pub fn coords(&self, v: &[u32]) -> Option<Vec<u32>> {
        let (res, combo) = self.reduce(v);
        if res.iter().any(|&x| x != 0) {
            return None;
        }
        Some(combo)
    }
}
