//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints one PASS/FAIL line; the process fails if any does.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use prym_core::census::{run_census, Block, CensusReport};
use prym_core::covers::{cover_p_rank, prym_components, BranchSet, EvenPartition};
use prym_core::curve::{enumerate_supersingular, j_invariant, HyperellipticCurve};
use prym_core::extension::canonical_embedding;
use prym_core::ff::{make_extension, prime_field, Field, FieldElement};
use prym_core::mobius::{orbits, symmetry_group, PointP1};
use prym_core::mult::{local_multiplicity, vanishing_order_in_family};
use prym_core::poly::{factor, is_irreducible, roots, Poly};
use prym_core::solver::{
    brute_force_oracle, build_system, eliminant, rational_points, solve_fiber, SolutionPoint,
};

type Check = Result<String, String>;

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn poly(p: u64, c: &[i64]) -> Poly {
    Poly::from_i64s(&prime_field(p).unwrap(), c)
}

fn curve(p: u64, c: &[i64]) -> HyperellipticCurve {
    HyperellipticCurve::new(poly(p, c)).unwrap()
}

/// Multiset of Frobenius orbit lengths of a block: ℓ rows carry length ℓ.
fn galois_lengths(b: &Block) -> Vec<usize> {
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &b.classes {
        *count.entry(c.galois_length).or_default() += 1;
    }
    let mut out = Vec::new();
    for (l, n) in count {
        out.extend(std::iter::repeat_n(l, n / l));
    }
    out
}

fn block_with_j(r: &CensusReport, j: u32) -> Option<&Block> {
    r.blocks.iter().find(|b| b.j.coeffs().first().copied().unwrap_or(0) == j && b.j.coeffs().iter().skip(1).all(|&c| c == 0))
}

fn criterion_1(reports: &BTreeMap<u32, CensusReport>) -> Check {
    let expect = [(3, rat(0, 1)), (5, rat(1, 2)), (7, rat(3, 1)), (11, rat(25, 1)), (13, rat(105, 2)), (17, rat(168, 1))];
    for (p, total) in &expect {
        let r = &reports[p];
        ensure(r.smooth_total == *total, format!("p={p}: smooth_total {} != {total}", r.smooth_total))?;
        ensure(r.matches, format!("p={p}: report does not match the formulas"))?;
        ensure(r.grand_total == &r.smooth_total + &r.reducible_total, format!("p={p}: grand total"))?;
    }
    Ok("smooth totals 0, 1/2, 3, 25, 105/2, 168 with matches = true".into())
}

fn criterion_2(r: &CensusReport) -> Check {
    let classes: Vec<_> = r.blocks.iter().flat_map(|b| b.classes.iter()).collect();
    ensure(classes.len() == 6, format!("{} classes", classes.len()))?;
    let special: Vec<_> = classes.iter().filter(|c| c.aut == 16).collect();
    ensure(special.len() == 1, "exactly one class with |Aut| = 16")?;
    ensure(special[0].a_number == 2 && special[0].multiplicity == 8, "special class has a = 2, m = 8")?;
    for c in classes.iter().filter(|c| c.aut != 16) {
        ensure(c.aut == 2 && c.a_number == 1 && c.multiplicity == 1, "other classes have |Aut| = 2, a = 1, m = 1")?;
    }
    let lengths = galois_lengths(&r.blocks[0]);
    ensure(lengths == vec![1, 2, 3], format!("Galois orbit lengths {lengths:?}"))?;
    Ok("6 classes; |Aut| 16 with a = 2, m = 8; five with |Aut| 2, m = 1; Galois orbits 1 + 2 + 3".into())
}

fn criterion_3(r: &CensusReport) -> Check {
    let b1728 = block_with_j(r, 1728 % 11).ok_or("no j = 1728 block")?;
    let b0 = block_with_j(r, 0).ok_or("no j = 0 block")?;
    ensure(b1728.subtotal == rat(15, 1), format!("j = 1728 subtotal {}", b1728.subtotal))?;
    ensure(b0.subtotal == rat(10, 1), format!("j = 0 subtotal {}", b0.subtotal))?;
    let (l1, l0) = (galois_lengths(b1728), galois_lengths(b0));
    ensure(l1 == vec![1, 4, 4, 4, 6, 6], format!("j = 1728 lengths {l1:?}"))?;
    ensure(l0 == vec![3, 3, 4, 10], format!("j = 0 lengths {l0:?}"))?;
    Ok("subtotals 15 and 10; Galois lengths {1,4,4,4,6,6} and {3,3,4,10}".into())
}

fn criterion_4() -> Check {
    let sys = build_system(&poly(13, &[4, 1, 0, 1])).unwrap();
    let elim = eliminant(&sys, 0).map_err(|e| e.to_string())?;
    ensure(elim.poly.deg() == 466, format!("eliminant degree {}", elim.poly.deg()))?;
    let quartic = poly(13, &[9, 8, 7, 8, 1]);
    let pts = solve_fiber(&sys, 0).map_err(|e| e.to_string())?;
    let hits: Vec<&SolutionPoint> = pts.iter().filter(|q| q.a_minpoly == quartic).collect();
    ensure(hits.len() == 1, format!("{} points over the quartic", hits.len()))?;
    let m = local_multiplicity(&sys, hits[0], 0).map_err(|e| e.to_string())?.m;
    ensure(m == 2, format!("multiplicity {m}"))?;
    let t = |c: &[i64]| poly(13, c);
    let fam = [t(&[2, -1]), t(&[-2, 2]), t(&[6, 1]), t(&[1]), t(&[1])];
    let order = vanishing_order_in_family(&fam, 12);
    ensure(order == Some(2), format!("family order {order:?}"))?;
    Ok("eliminant degree 466; m = 2 at the quartic class; family order 2".into())
}

fn criterion_5(r: &CensusReport) -> Check {
    let f = prime_field(17).unwrap();
    let j_of = |a: i64, b: i64| f.to_prime(&j_invariant(&f, &f.from_i64(a), &f.from_i64(b)).unwrap()).unwrap();
    let b126 = block_with_j(r, j_of(1, 1)).ok_or("no block for x³+x+1")?;
    let b42 = block_with_j(r, j_of(0, -1)).ok_or("no block for x³−1")?;
    ensure(b126.subtotal == rat(126, 1), format!("x³+x+1 block {}", b126.subtotal))?;
    ensure(b42.subtotal == rat(42, 1), format!("x³−1 block {}", b42.subtotal))?;
    let lin = |c: i64| Poly::from_i64s(&f, &[c, 1]);
    let m20 = b42
        .classes
        .iter()
        .find(|c| c.rep_a_minpoly == lin(2) && c.rep_b_minpoly == lin(2))
        .ok_or("no class at a = b = −2")?;
    ensure(m20.multiplicity == 20, format!("m = {} at (x³−1)(x²−2x−2)", m20.multiplicity))?;
    ensure(
        b42.classes.iter().any(|c| c.orbit_size == 12 && c.multiplicity == 18),
        "no orbit of length 12 with m = 18",
    )?;
    ensure(
        b126.classes.iter().any(|c| c.galois_length == 2 && c.multiplicity == 18 && c.aut == 4),
        "no length-2 Galois orbit with m = 18, |Aut| = 4",
    )?;
    ensure(
        b126.classes.iter().filter(|c| c.multiplicity == 2).count() == 1,
        "expected one simple tangency",
    )?;
    Ok("m = 20 at (x³−1)(x²−2x−2); orbit of 12 with m = 18; blocks 126 and 42".into())
}

fn criterion_6() -> Check {
    // genus 3 C over F_5 and its genus-2 quotient D
    let d = curve(5, &[0, -2, 2, 0, 1, 1]);
    let q = poly(5, &[2, -1, 1]);
    let c = HyperellipticCurve::new(q.mul(d.f())).unwrap();
    ensure(c.p_rank() == 0 && d.p_rank() == 0, "C, D have 5-rank 0")?;
    let cover = curve(5, &[2, -2, -2, 1, -1, 2, -2, -1, 1, 1, -2, 2]);
    ensure(cover.genus() == 5 && cover.p_rank() == 0, "genus-5 cover has 5-rank 0")?;
    let (bs, emb) = BranchSet::of_curve(&c, 0).unwrap();
    let part = EvenPartition::from_roots(&bs, &emb.apply_poly(&q), false).unwrap();
    ensure(cover_p_rank(&c, &bs, &part).unwrap() == 0, "additive formula gives 0")?;

    let c4 = curve(3, &[0, -1, 0, -1, -1, 0, 1, 1, 0, 1]);
    let c7 = curve(3, &[-1, 0, 0, 0, -1, 0, -1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1]);
    ensure(c4.genus() == 4 && c4.p_rank() == 0, "genus-4 curve has 3-rank 0")?;
    ensure(c7.genus() == 7 && c7.p_rank() == 0, "genus-7 cover has 3-rank 0")?;

    let cubic = poly(3, &[1, 1, 0, 1]);
    let quartic = poly(3, &[-1, 1, 0, 0, 1]);
    let c = HyperellipticCurve::new(cubic.mul(&quartic)).unwrap();
    let (bs, emb) = BranchSet::of_curve(&c, 0).unwrap();
    let part = EvenPartition::from_roots(&bs, &emb.apply_poly(&cubic), true).unwrap();
    let dec = prym_components(&c, &bs, &part).unwrap();
    ensure(c.p_rank() == 0, "genus-3 curve has 3-rank 0")?;
    ensure(dec.c1.genus() == 1 && dec.c2.genus() == 1, "both quotients elliptic")?;
    ensure(dec.c1.p_rank() == 0 && dec.c2.p_rank() == 0, "both elliptic factors supersingular")?;
    Ok("all listed curves and covers have p-rank 0".into())
}

fn criterion_7() -> Check {
    for k in 1..=3usize {
        let f = if k == 1 { prime_field(3).unwrap() } else { make_extension(3, k, 1).unwrap() };
        for a in f.elements() {
            let model = Poly::new(&f, vec![f.one(), f.zero(), f.zero(), a.clone(), f.zero(), f.one()]);
            let sys = build_system(&model).unwrap();
            let pts = solve_fiber(&sys, 0).map_err(|e| e.to_string())?;
            ensure(pts.is_empty(), format!("smooth solution over F_3^{k} at a = {}", f.format(&a)))?;
        }
    }
    let sys = build_system(&poly(3, &[0, -1, 0, 1])).unwrap();
    ensure(solve_fiber(&sys, 0).unwrap().is_empty(), "p = 3, E = x³ − x has a solution")?;
    Ok("no smooth solution for x⁵+ax³+1, a ∈ F_{3^k}, k ≤ 3; none for x³ − x".into())
}

fn criterion_8() -> Check {
    let cases = [(3u64, vec![0i64, -1, 0, 1]), (5, vec![-1, 0, 0, 1]), (7, vec![0, -1, 0, 1])];
    let mut sizes = Vec::new();
    for (p, model) in &cases {
        let sys = build_system(&poly(*p, model)).unwrap();
        let pts = solve_fiber(&sys, 0).unwrap();
        for k in 1..=2 {
            let (emb, scan) = brute_force_oracle(&sys, k, 0).map_err(|e| e.to_string())?;
            let exact = rational_points(&pts, &emb).map_err(|e| e.to_string())?;
            ensure(exact == scan, format!("p={p} k={k}: solver {} vs scan {}", exact.len(), scan.len()))?;
            sizes.push(format!("({p},{k}):{}", scan.len()));
        }
    }
    Ok(format!("solver equals scan, points {}", sizes.join(" ")))
}

fn criterion_9() -> Check {
    let mut n = 0;
    for p in (3u32..=47).filter(|&p| (2..p).all(|d| p % d != 0)) {
        let mass = enumerate_supersingular(p, 0).map_err(|e| e.to_string())?.mass();
        ensure(mass == rat(p as i64 - 1, 24), format!("p={p}: mass {mass}"))?;
        n += 1;
    }
    Ok(format!("mass = (p−1)/24 for all {n} odd primes up to 47"))
}

fn mobius_invariance() -> Result<(), String> {
    for p in [3u64, 5, 7, 11, 13] {
        let f = prime_field(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        let mut done = 0;
        while done < 200 {
            let deg = if done % 2 == 0 { 5 } else { 6 };
            let mut g = Poly::random(&f, deg, &mut rng);
            if g.degree() != Some(deg) {
                continue;
            }
            g = g.monic();
            let Ok(c) = HyperellipticCurve::new(g) else { continue };
            let m: Vec<FieldElement> = (0..4).map(|_| f.random(&mut rng)).collect();
            let Ok(d) = c.mobius_pullback([&m[0], &m[1], &m[2], &m[3]]) else { continue };
            ensure(
                d.p_rank() == c.p_rank() && d.a_number() == c.a_number(),
                format!("p={p}: invariants change under a Möbius map"),
            )?;
            done += 1;
        }
    }
    Ok(())
}

fn factor_round_trip() -> Result<(), String> {
    let fields: Vec<Field> = vec![
        prime_field(3).unwrap(),
        prime_field(5).unwrap(),
        prime_field(7).unwrap(),
        prime_field(11).unwrap(),
        prime_field(13).unwrap(),
        make_extension(5, 2, 1).unwrap(),
    ];
    for f in fields {
        let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
        let fc = f.clone();
        runner
            .run(&(any::<u64>(), 1usize..24), move |(seed, deg)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g = Poly::random(&fc, deg, &mut rng);
                prop_assume!(!g.is_zero());
                let parts = factor(&g, seed).unwrap();
                let mut prod = Poly::one(&fc);
                let mut seen = BTreeSet::new();
                for (h, e) in &parts {
                    prop_assert!(is_irreducible(h));
                    prop_assert!(seen.insert(h.coeffs().to_vec()));
                    prod = prod.mul(&h.pow(*e as u64));
                }
                prop_assert_eq!(prod, g.monic());
                Ok(())
            })
            .map_err(|e| format!("factor round trip over a field of order {}^{}: {e}", f.p(), f.degree()))?;
    }
    Ok(())
}

/// Geometric solution set in one field, with G acting on it; checks closure,
/// orbit × stabilizer = |G|, Frobenius stability and agreement with the census rows.
fn geometric_orbits(p: u64, model: &[i64], report: &CensusReport) -> Result<(), String> {
    let sys = build_system(&poly(p, model)).unwrap();
    let pts = solve_fiber(&sys, 0).unwrap();
    let lcm = pts.iter().fold(1usize, |acc, q| acc.lcm(&q.degree));
    let e = poly(p, model);
    let split = prym_core::extension::splitting_field(&e, 0).unwrap();
    let k = lcm.lcm(&split.dst().degree());
    let big = make_extension(p, k, 0).unwrap();
    let emb = canonical_embedding(e.field(), &big).unwrap();
    let geo = rational_points(&pts, &emb).unwrap();
    let total: usize = pts.iter().map(|q| q.degree).sum();
    ensure(geo.len() == total, format!("p={p}: {} geometric points, expected {total}", geo.len()))?;
    let frob: BTreeSet<_> = geo.iter().map(|(a, b)| (big.frobenius(a), big.frobenius(b))).collect();
    ensure(frob == geo.iter().cloned().collect(), format!("p={p}: solution set not Frobenius-stable"))?;
    let mut branch: Vec<PointP1> = roots(&emb.apply_poly(&e), 0).unwrap().into_iter().map(|(r, _)| PointP1::Finite(r)).collect();
    branch.push(PointP1::Infinity);
    let g = symmetry_group(&big, &branch).unwrap();
    let classes = orbits(&g, &geo).map_err(|e| format!("p={p}: {e}"))?;
    for c in &classes {
        ensure(c.orbit_size() * c.stabilizer == g.len(), format!("p={p}: orbit × stabilizer ≠ |G|"))?;
    }
    let rows: usize = report.blocks.iter().map(|b| b.classes.len()).sum();
    ensure(classes.len() == rows, format!("p={p}: {} orbits vs {rows} census classes", classes.len()))?;
    let mut a: Vec<usize> = classes.iter().map(|c| c.stabilizer).collect();
    let mut b: Vec<usize> = report.blocks.iter().flat_map(|b| b.classes.iter().map(|c| c.stabilizer)).collect();
    a.sort();
    b.sort();
    ensure(a == b, format!("p={p}: stabilizer multisets differ"))?;
    Ok(())
}

fn criterion_10(reports: &BTreeMap<u32, CensusReport>) -> Check {
    mobius_invariance()?;
    for r in reports.values() {
        for b in &r.blocks {
            for c in &b.classes {
                ensure(c.orbit_size * c.stabilizer == b.group_order, format!("p={}: orbit identity fails", r.p))?;
                ensure((2 * b.group_order) % c.contribution.denom().to_string().parse::<usize>().unwrap() == 0, "contribution denominator")?;
            }
        }
    }
    geometric_orbits(5, &[-1, 0, 0, 1], &reports[&5])?;
    geometric_orbits(7, &[0, -1, 0, 1], &reports[&7])?;
    factor_round_trip()?;
    Ok("Möbius invariance 200/prime; orbit identity and closure; factor round trip 100/field; Frobenius closure".into())
}

fn main() {
    let start = Instant::now();
    let reports: BTreeMap<u32, CensusReport> = [3u32, 5, 7, 11, 13, 17]
        .into_iter()
        .map(|p| (p, run_census(p, 0).unwrap_or_else(|e| panic!("census p={p}: {e}"))))
        .collect();
    let results: Vec<(usize, Check)> = vec![
        (1, criterion_1(&reports)),
        (2, criterion_2(&reports[&7])),
        (3, criterion_3(&reports[&11])),
        (4, criterion_4()),
        (5, criterion_5(&reports[&17])),
        (6, criterion_6()),
        (7, criterion_7()),
        (8, criterion_8()),
        (9, criterion_9()),
        (10, criterion_10(&reports)),
    ];
    let mut failed = 0;
    for (n, r) in &results {
        match r {
            Ok(msg) => println!("acceptance {n:>2}: PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("acceptance {n:>2}: FAIL  {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.1?}", results.len() - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
