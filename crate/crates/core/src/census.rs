//! The weighted count of p-rank-zero pairs (C, η) with C a smooth genus-2
//! curve, assembled one supersingular elliptic curve at a time, next to the
//! closed formulas it should reproduce.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::enumerate_supersingular;
use crate::error::{Error, Result};
use crate::extension::splitting_field;
use crate::ff::{Field, FieldElement};
use crate::mobius::{act_on_pair, symmetry_group, MobiusMap, PointP1};
use crate::mult::{local_multiplicity, MultiplicityResult};
use crate::poly::{format_poly, roots, Poly};
use crate::solver::{build_system, closed_point_key, solve_fiber_in, PrymFiberSystem, SolutionPoint};

/// Largest prime accepted by `run_census` unless the caller raises it.
pub const DEFAULT_PRIME_GUARD: u32 = 47;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// (p − 3)(p − 1)²(p + 1)/384.
pub fn formula_smooth(p: u32) -> BigRational {
    let p = p as i64;
    rat((p - 3) * (p - 1) * (p - 1) * (p + 1), 384)
}

/// (p + 1)(p − 1)²/192.
pub fn formula_reducible(p: u32) -> BigRational {
    let p = p as i64;
    rat((p + 1) * (p - 1) * (p - 1), 192)
}

/// (p − 1)²(p² − 1)/384.
pub fn formula_total(p: u32) -> BigRational {
    let p = p as i64;
    rat((p - 1) * (p - 1) * (p * p - 1), 384)
}

/// One isomorphism class of pairs. Classes in the same Frobenius orbit share
/// every field here.
#[derive(Clone, Debug)]
pub struct ClassRow {
    pub rep_a_minpoly: Poly,
    pub rep_b_minpoly: Poly,
    pub orbit_size: usize,
    pub stabilizer: usize,
    pub aut: usize,
    pub a_number: usize,
    pub multiplicity: usize,
    pub galois_length: usize,
    pub contribution: BigRational,
}

/// Contribution of one supersingular j.
#[derive(Clone, Debug)]
pub struct Block {
    /// j as an element of F_{p²}.
    pub j: FieldElement,
    pub model: Poly,
    pub group_order: usize,
    pub classes: Vec<ClassRow>,
    pub subtotal: BigRational,
}

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub p: u32,
    pub blocks: Vec<Block>,
    pub smooth_total: BigRational,
    pub reducible_total: BigRational,
    pub grand_total: BigRational,
    pub formula_smooth: BigRational,
    pub formula_reducible: BigRational,
    pub formula_total: BigRational,
    pub matches: bool,
}

pub fn run_census(p: u32, seed: u64) -> Result<CensusReport> {
    run_census_guarded(p, seed, DEFAULT_PRIME_GUARD)
}

pub fn run_census_guarded(p: u32, seed: u64, guard: u32) -> Result<CensusReport> {
    if p > guard {
        return Err(Error::PrimeTooLarge(p, guard));
    }
    let list = enumerate_supersingular(p, seed)?;
    let blocks = list
        .curves
        .par_iter()
        .map(|c| {
            let mut b = census_block(&c.model, seed)?;
            b.j = c.j.clone();
            Ok(b)
        })
        .collect::<Result<Vec<Block>>>()?;
    let smooth_total = blocks.iter().fold(BigRational::zero(), |acc, b| acc + &b.subtotal);
    let mass = list.mass();
    let reducible_total = BigRational::from_integer(BigInt::from(3 * (p as i64 + 1))) * &mass * &mass;
    let grand_total = &smooth_total + &reducible_total;
    let (fs, fr, ft) = (formula_smooth(p), formula_reducible(p), formula_total(p));
    let matches = smooth_total == fs && reducible_total == fr;
    Ok(CensusReport {
        p,
        blocks,
        smooth_total,
        reducible_total,
        grand_total,
        formula_smooth: fs,
        formula_reducible: fr,
        formula_total: ft,
        matches,
    })
}

/// Class data for the elliptic curve y² = `model` (a cubic). The returned
/// block carries j = 0 of the model field; `run_census` fills in the j.
pub fn census_block(model: &Poly, seed: u64) -> Result<Block> {
    let analysis = analyze_block(model, seed)?;
    let mut classes = Vec::new();
    let mut subtotal = BigRational::zero();
    for o in &analysis.orbits {
        let aut = 2 * o.stabilizer;
        let contribution = rat(o.multiplicity.m as i64, aut as i64);
        for _ in 0..o.galois_length {
            subtotal += &contribution;
            classes.push(ClassRow {
                rep_a_minpoly: o.rep.a_minpoly.clone(),
                rep_b_minpoly: o.rep.b_minpoly()?,
                orbit_size: o.orbit_size,
                stabilizer: o.stabilizer,
                aut,
                a_number: o.a_number,
                multiplicity: o.multiplicity.m,
                galois_length: o.galois_length,
                contribution: contribution.clone(),
            });
        }
    }
    Ok(Block {
        j: model.field().zero(),
        model: model.clone(),
        group_order: analysis.group.len(),
        classes,
        subtotal,
    })
}

/// A union of isomorphism classes permuted transitively by Frobenius.
#[derive(Clone, Debug)]
pub struct GaloisOrbit {
    pub rep: SolutionPoint,
    /// Closed points (over the model field) making up the orbit.
    pub points: Vec<SolutionPoint>,
    pub stabilizer: usize,
    /// Geometric points in one isomorphism class.
    pub orbit_size: usize,
    pub galois_length: usize,
    pub a_number: usize,
    pub multiplicity: MultiplicityResult,
}

#[derive(Clone, Debug)]
pub struct BlockAnalysis {
    pub system: PrymFiberSystem,
    pub group: Vec<MobiusMap>,
    pub orbits: Vec<GaloisOrbit>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Solves the fiber over y² = `model`, groups the solutions into classes and
/// Frobenius orbits, and computes their multiplicities.
pub fn analyze_block(model: &Poly, seed: u64) -> Result<BlockAnalysis> {
    let sys = build_system(model)?;
    let ambient = splitting_field(model, seed)?;
    let fg: Field = ambient.dst().clone();
    let mut branch: Vec<PointP1> = roots(&ambient.apply_poly(model), seed)?
        .into_iter()
        .map(|(r, _)| PointP1::Finite(r))
        .collect();
    if model.deg() % 2 == 1 {
        branch.push(PointP1::Infinity);
    }
    let group = symmetry_group(&fg, &branch)?;
    let pts = solve_fiber_in(&sys, &ambient, seed)?;
    let index: BTreeMap<Vec<u32>, usize> = pts.iter().enumerate().map(|(i, q)| (q.key.clone(), i)).collect();

    // images of each representative under G, as closed-point indices, and its stabilizer
    let images = pts
        .par_iter()
        .map(|q| {
            let mut targets = Vec::with_capacity(group.len());
            let mut stab = 0;
            for g in &group {
                let gl = g.map_field(&q.ambient);
                let (a, b) = act_on_pair(&gl, &q.a, &q.b)?;
                if a == q.a && b == q.b {
                    stab += 1;
                }
                let (key, _) = closed_point_key(&q.base, &a, &b);
                let t = *index.get(&key).ok_or(Error::ClosureViolation)?;
                targets.push(t);
            }
            Ok((targets, stab))
        })
        .collect::<Result<Vec<(Vec<usize>, usize)>>>()?;

    let mut parent: Vec<usize> = (0..pts.len()).collect();
    for (i, (targets, _)) in images.iter().enumerate() {
        for &t in targets {
            let (ri, rt) = (find(&mut parent, i), find(&mut parent, t));
            if ri != rt {
                parent[ri.max(rt)] = ri.min(rt);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..pts.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }

    let order = group.len();
    let j_label = format_poly(model);
    let orbits = groups
        .into_values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|members| {
            let rep = pts[members[0]].clone();
            let stab = images[members[0]].1;
            if members.iter().any(|&i| images[i].1 != stab) || order % stab != 0 {
                return Err(Error::Internal("stabilizer orders differ within an orbit".into()));
            }
            let orbit_size = order / stab;
            let geometric: usize = members.iter().map(|&i| pts[i].degree).sum();
            if !geometric.is_multiple_of(orbit_size) {
                return Err(Error::Internal("orbit sizes do not divide the orbit".into()));
            }
            let multiplicity = local_multiplicity(&sys, &rep, seed).map_err(|e| Error::AtPoint {
                j: j_label.clone(),
                point: format!("a-minpoly {}", format_poly(&rep.a_minpoly)),
                source: Box::new(e),
            })?;
            Ok(GaloisOrbit {
                a_number: rep.a_number(&sys),
                points: members.iter().map(|&i| pts[i].clone()).collect(),
                rep,
                stabilizer: stab,
                orbit_size,
                galois_length: geometric / orbit_size,
                multiplicity,
            })
        })
        .collect::<Result<Vec<GaloisOrbit>>>()?;
    Ok(BlockAnalysis { system: sys, group, orbits })
}

fn ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Serialize)]
struct ClassJson {
    rep_a_minpoly: String,
    rep_b_minpoly: String,
    orbit_size: usize,
    stabilizer: usize,
    aut: usize,
    a_number: usize,
    multiplicity: usize,
    galois_length: usize,
    contribution: String,
}

#[derive(Serialize)]
struct BlockJson {
    j: Vec<u32>,
    group_order: usize,
    classes: Vec<ClassJson>,
    subtotal: String,
}

#[derive(Serialize)]
struct ReportJson {
    p: u32,
    blocks: Vec<BlockJson>,
    smooth_total: String,
    reducible_total: String,
    grand_total: String,
    formula_smooth: String,
    formula_reducible: String,
    formula_total: String,
    matches: bool,
}

fn class_json(c: &ClassRow) -> ClassJson {
    ClassJson {
        rep_a_minpoly: format_poly(&c.rep_a_minpoly),
        rep_b_minpoly: format_poly(&c.rep_b_minpoly),
        orbit_size: c.orbit_size,
        stabilizer: c.stabilizer,
        aut: c.aut,
        a_number: c.a_number,
        multiplicity: c.multiplicity,
        galois_length: c.galois_length,
        contribution: ratio(&c.contribution),
    }
}

fn report_json(r: &CensusReport) -> ReportJson {
    ReportJson {
        p: r.p,
        blocks: r
            .blocks
            .iter()
            .map(|b| BlockJson {
                j: b.j.coeffs().to_vec(),
                group_order: b.group_order,
                classes: b.classes.iter().map(class_json).collect(),
                subtotal: ratio(&b.subtotal),
            })
            .collect(),
        smooth_total: ratio(&r.smooth_total),
        reducible_total: ratio(&r.reducible_total),
        grand_total: ratio(&r.grand_total),
        formula_smooth: ratio(&r.formula_smooth),
        formula_reducible: ratio(&r.formula_reducible),
        formula_total: ratio(&r.formula_total),
        matches: r.matches,
    }
}

fn j_text(j: &FieldElement) -> String {
    let c: Vec<String> = j.coeffs().iter().map(|x| x.to_string()).collect();
    format!("[{}]", c.join(","))
}

/// Renders the report as `text`, `json` or `csv`.
pub fn serialize_report(r: &CensusReport, format: &str) -> Result<Vec<u8>> {
    match format {
        "json" => {
            let mut out = serde_json::to_vec(&report_json(r)).map_err(|e| Error::Internal(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        "csv" => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Internal(e.to_string());
            w.write_record([
                "p", "j", "group_order", "rep_a_minpoly", "rep_b_minpoly", "orbit_size", "stabilizer", "aut",
                "a_number", "multiplicity", "galois_length", "contribution",
            ])
            .map_err(io)?;
            for b in &r.blocks {
                for c in &b.classes {
                    let cj = class_json(c);
                    w.write_record([
                        r.p.to_string(),
                        j_text(&b.j),
                        b.group_order.to_string(),
                        cj.rep_a_minpoly,
                        cj.rep_b_minpoly,
                        cj.orbit_size.to_string(),
                        cj.stabilizer.to_string(),
                        cj.aut.to_string(),
                        cj.a_number.to_string(),
                        cj.multiplicity.to_string(),
                        cj.galois_length.to_string(),
                        cj.contribution,
                    ])
                    .map_err(io)?;
                }
            }
            w.into_inner().map_err(|e| Error::Internal(e.to_string()))
        }
        "text" => {
            let mut out = Vec::new();
            let mut line = |s: String| {
                writeln!(out, "{s}").expect("writing to memory");
            };
            line(format!("p = {}", r.p));
            for b in &r.blocks {
                line(format!(
                    "block j = {}  model {}  |G| = {}  classes = {}  subtotal = {}",
                    j_text(&b.j),
                    format_poly(&b.model),
                    b.group_order,
                    b.classes.len(),
                    ratio(&b.subtotal)
                ));
                for c in &b.classes {
                    line(format!(
                        "  a-minpoly {}  b-minpoly {}  orbit {}  stab {}  aut {}  a-number {}  m {}  galois {}  contribution {}",
                        format_poly(&c.rep_a_minpoly),
                        format_poly(&c.rep_b_minpoly),
                        c.orbit_size,
                        c.stabilizer,
                        c.aut,
                        c.a_number,
                        c.multiplicity,
                        c.galois_length,
                        ratio(&c.contribution)
                    ));
                }
            }
            line(format!("smooth_total = {}", ratio(&r.smooth_total)));
            line(format!("reducible_total = {}", ratio(&r.reducible_total)));
            line(format!("grand_total = {}", ratio(&r.grand_total)));
            line(format!("formula_smooth = {}", ratio(&r.formula_smooth)));
            line(format!("formula_reducible = {}", ratio(&r.formula_reducible)));
            line(format!("formula_total = {}", ratio(&r.formula_total)));
            line(format!("matches = {}", r.matches));
            Ok(out)
        }
        other => Err(Error::UnknownFormat(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::prime_field;

    #[test]
    fn formulas() {
        assert_eq!(formula_smooth(5), rat(1, 2));
        assert_eq!(formula_smooth(3), rat(0, 1));
        assert_eq!(formula_reducible(7), rat(3, 2));
        assert_eq!(formula_total(7), rat(9, 2));
        for p in [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            assert_eq!(formula_smooth(p) + formula_reducible(p), formula_total(p));
        }
    }

    #[test]
    fn p5_census() {
        let r = run_census(5, 0).unwrap();
        assert_eq!(r.smooth_total, rat(1, 2));
        assert!(r.matches);
        let text = String::from_utf8(serialize_report(&r, "text").unwrap()).unwrap();
        assert!(text.contains("smooth_total = 1/2"));
        assert!(matches!(serialize_report(&r, "xml"), Err(Error::UnknownFormat(_))));
    }

    #[test]
    fn p7_classes() {
        let r = run_census(7, 0).unwrap();
        assert_eq!(r.smooth_total, rat(3, 1));
        assert_eq!(r.reducible_total, rat(3, 2));
        assert_eq!(r.grand_total, rat(9, 2));
        assert!(r.matches);
        let classes: Vec<&ClassRow> = r.blocks.iter().flat_map(|b| b.classes.iter()).collect();
        assert_eq!(classes.len(), 6);
        let special: Vec<_> = classes.iter().filter(|c| c.aut == 16).collect();
        assert_eq!(special.len(), 1);
        assert_eq!((special[0].a_number, special[0].multiplicity), (2, 8));
        let mut lengths: Vec<usize> = classes.iter().map(|c| c.galois_length).collect();
        lengths.sort();
        assert_eq!(lengths, vec![1, 2, 2, 3, 3, 3]);
        for c in classes.iter().filter(|c| c.aut != 16) {
            assert_eq!((c.aut, c.a_number, c.multiplicity), (2, 1, 1));
        }
        let csv = String::from_utf8(serialize_report(&r, "csv").unwrap()).unwrap();
        assert_eq!(csv.lines().count(), 1 + 6);
    }

    // a translate of the model describes the same j and must give the same subtotal
    #[test]
    fn model_independence() {
        let f = prime_field(7).unwrap();
        let base = census_block(&Poly::from_i64s(&f, &[0, -1, 0, 1]), 2).unwrap();
        // (x + 2)³ − (x + 2) = x³ + 6x² + 11x + 6
        let moved = census_block(&Poly::from_i64s(&f, &[6, 11, 6, 1]), 2).unwrap();
        assert_eq!(base.subtotal, moved.subtotal);
        assert_eq!(base.group_order, moved.group_order);
    }

    #[test]
    fn guard() {
        assert!(matches!(run_census(53, 0), Err(Error::PrimeTooLarge(53, 47))));
    }
}
