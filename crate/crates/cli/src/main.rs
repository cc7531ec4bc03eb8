use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use prym_core::census::{run_census_guarded, serialize_report, DEFAULT_PRIME_GUARD};
use prym_core::covers::{cover_p_rank, even_partitions, prym_components, BranchSet, Component};
use prym_core::curve::{enumerate_supersingular, HyperellipticCurve};
use prym_core::ff::{prime_field, Field};
use prym_core::linalg::Matrix;
use prym_core::mult::{default_cap, local_multiplicity_capped, vanishing_order_in_family};
use prym_core::poly::{format_poly, Poly};
use prym_core::solver::{brute_force_oracle, build_system, rational_points, solve_fiber, PrymFiberSystem};

#[derive(Parser)]
#[command(name = "prym-census", version, about = "p-ranks of hyperelliptic curves and the census of p-rank-zero double covers")]
struct Cli {
    /// Seed for every randomized subroutine.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Weighted count of p-rank-zero pairs, compared with the closed formulas.
    Census {
        #[arg(long)]
        prime: u32,
        #[arg(long, default_value_t = DEFAULT_PRIME_GUARD)]
        guard: u32,
    },
    /// p-rank and a-number of y² = f.
    Prank {
        #[arg(long)]
        prime: u64,
        /// Coefficients c0,c1,... of f.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Hasse-Witt matrix of y² = f.
    Hassewitt {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Supersingular j-invariants with automorphism orders and the mass.
    Supersingular {
        #[arg(long)]
        prime: u32,
    },
    /// Every étale double cover of y² = f with the p-ranks of its Prym factors.
    Covers {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Solutions of the p-rank-zero system over y² = e-model.
    Solve {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true)]
        e_model: String,
        /// Also compare with a brute-force scan over F_{p^k}.
        #[arg(long)]
        oracle: Option<usize>,
    },
    /// Local multiplicity at the solutions whose a-coordinate has the given minimal polynomial.
    Multiplicity {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true)]
        e_model: String,
        /// Coefficients of the monic minimal polynomial of a.
        #[arg(long, allow_hyphen_values = true)]
        a_minpoly: String,
        /// Optional minimal polynomial of b to pick one point.
        #[arg(long, allow_hyphen_values = true)]
        b_minpoly: Option<String>,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Order of vanishing in t of the Hasse invariant along a family.
    FamilyOrder {
        #[arg(long)]
        prime: u64,
        /// x-coefficients separated by ';', each a list of t-coefficients, e.g. "2,-1;-2,2;6,1;1;1".
        #[arg(long, allow_hyphen_values = true)]
        family: String,
        #[arg(long, default_value_t = 20)]
        cap: usize,
    },
    /// Brute-force scan over F_{p^k} compared with the exact solver.
    Oracle {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true)]
        e_model: String,
        #[arg(long)]
        k: usize,
    },
}

fn parse_poly(f: &Field, s: &str) -> Result<Poly> {
    let c: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().with_context(|| format!("bad coefficient {t:?}")))
        .collect::<Result<_>>()?;
    Ok(Poly::from_i64s(f, &c))
}

fn matrix_text(m: &Matrix) -> String {
    m.iter()
        .map(|r| r.iter().map(|e| e.coeffs().first().copied().unwrap_or(0).to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

fn matrix_json(f: &Field, m: &Matrix) -> serde_json::Value {
    json!(m.iter().map(|r| r.iter().map(|e| f.format(e)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

struct Output {
    body: String,
    ok: bool,
}

fn curve(prime: u64, poly: &str) -> Result<HyperellipticCurve> {
    let f = prime_field(prime)?;
    Ok(HyperellipticCurve::new(parse_poly(&f, poly)?)?)
}

fn solution_rows(sys: &PrymFiberSystem, seed: u64) -> Result<Vec<serde_json::Value>> {
    solve_fiber(sys, seed)?
        .iter()
        .map(|pt| {
            Ok(json!({
                "a_minpoly": format_poly(&pt.a_minpoly),
                "b_minpoly": format_poly(&pt.b_minpoly()?),
                "degree": pt.degree,
                "a_number": pt.a_number(sys),
            }))
        })
        .collect()
}

fn run(cli: &Cli) -> Result<Output> {
    let fmt = cli.format;
    let seed = cli.seed;
    let out = match &cli.cmd {
        Cmd::Census { prime, guard } => {
            let r = run_census_guarded(*prime, seed, *guard)?;
            let body = String::from_utf8(serialize_report(&r, fmt.name())?)?;
            Output { body, ok: r.matches }
        }
        Cmd::Prank { prime, poly } => {
            let c = curve(*prime, poly)?;
            let body = match fmt {
                Format::Json => json!({"genus": c.genus(), "p_rank": c.p_rank(), "a_number": c.a_number()}).to_string(),
                _ => format!("genus {}\np-rank {}\na-number {}", c.genus(), c.p_rank(), c.a_number()),
            };
            Output { body, ok: true }
        }
        Cmd::Hassewitt { prime, poly } => {
            let c = curve(*prime, poly)?;
            let h = c.hasse_witt();
            let body = match fmt {
                Format::Json => matrix_json(c.field(), &h).to_string(),
                _ => matrix_text(&h),
            };
            Output { body, ok: true }
        }
        Cmd::Supersingular { prime } => {
            let list = enumerate_supersingular(*prime, seed)?;
            let rows: Vec<_> = list
                .curves
                .iter()
                .map(|c| json!({"j": c.j.coeffs(), "aut": c.aut_order, "model": format_poly(&c.model)}))
                .collect();
            let mass = list.mass();
            let mass = format!("{}/{}", mass.numer(), mass.denom());
            let body = match fmt {
                Format::Json => json!({"curves": rows, "mass": mass}).to_string(),
                _ => {
                    let mut s: Vec<String> = list
                        .curves
                        .iter()
                        .map(|c| format!("j {}  aut {}  model {}", list.field.format(&c.j), c.aut_order, format_poly(&c.model)))
                        .collect();
                    s.push(format!("mass = {mass}"));
                    s.join("\n")
                }
            };
            Output { body, ok: true }
        }
        Cmd::Covers { prime, poly } => {
            let c = curve(*prime, poly)?;
            let (bs, _) = BranchSet::of_curve(&c, seed)?;
            let mut rows = Vec::new();
            for part in even_partitions(bs.len())? {
                let d = prym_components(&c, &bs, &part)?;
                let desc = |x: &Component| match x {
                    Component::Rational => "P1".to_string(),
                    Component::Curve(k) => format!("genus {} p-rank {}", k.genus(), k.p_rank()),
                };
                rows.push((part.b1().to_vec(), desc(&d.c1), desc(&d.c2), cover_p_rank(&c, &bs, &part)?));
            }
            let body = match fmt {
                Format::Json => json!(rows
                    .iter()
                    .map(|(b1, c1, c2, r)| json!({"b1": b1, "c1": c1, "c2": c2, "cover_p_rank": r}))
                    .collect::<Vec<_>>())
                .to_string(),
                _ => rows
                    .iter()
                    .map(|(b1, c1, c2, r)| format!("B1 {b1:?}  C1 {c1}  C2 {c2}  cover p-rank {r}"))
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            Output { body, ok: true }
        }
        Cmd::Solve { prime, e_model, oracle } => {
            let f = prime_field(*prime)?;
            let sys = build_system(&parse_poly(&f, e_model)?)?;
            let rows = solution_rows(&sys, seed)?;
            let mut ok = true;
            let mut extra = None;
            if let Some(k) = oracle {
                let (same, n) = oracle_check(&sys, *k, seed)?;
                ok = same;
                extra = Some(json!({"k": k, "oracle_points": n, "agrees": same}));
            }
            let body = match fmt {
                Format::Json => json!({"solutions": rows, "oracle": extra}).to_string(),
                _ => {
                    let mut s: Vec<String> = rows
                        .iter()
                        .map(|r| format!("a-minpoly {}  b-minpoly {}  degree {}  a-number {}", r["a_minpoly"].as_str().unwrap_or(""), r["b_minpoly"].as_str().unwrap_or(""), r["degree"], r["a_number"]))
                        .collect();
                    s.push(format!("{} closed points", rows.len()));
                    if let Some(e) = extra {
                        s.push(format!("oracle k = {}: {} points, agrees = {}", e["k"], e["oracle_points"], e["agrees"]));
                    }
                    s.join("\n")
                }
            };
            Output { body, ok }
        }
        Cmd::Multiplicity { prime, e_model, a_minpoly, b_minpoly, cap } => {
            let f = prime_field(*prime)?;
            let sys = build_system(&parse_poly(&f, e_model)?)?;
            let want_a = parse_poly(&f, a_minpoly)?.monic();
            let want_b = b_minpoly.as_deref().map(|s| parse_poly(&f, s)).transpose()?.map(|q| q.monic());
            let cap = cap.unwrap_or_else(|| default_cap(f.p()));
            let mut lines = Vec::new();
            let mut found = Vec::new();
            for pt in solve_fiber(&sys, seed)? {
                if pt.a_minpoly != want_a {
                    continue;
                }
                let bm = pt.b_minpoly()?;
                if want_b.as_ref().is_some_and(|w| *w != bm) {
                    continue;
                }
                let r = local_multiplicity_capped(&sys, &pt, cap, seed)?;
                lines.push(format!("b-minpoly {}  m = {}  stabilized at {}  trace {:?}", format_poly(&bm), r.m, r.stabilized_at, r.trace));
                found.push(json!({"b_minpoly": format_poly(&bm), "m": r.m, "stabilized_at": r.stabilized_at, "trace": r.trace}));
            }
            if found.is_empty() {
                bail!("no solution with that a-minimal polynomial");
            }
            let body = match fmt {
                Format::Json => json!(found).to_string(),
                _ => lines.join("\n"),
            };
            Output { body, ok: true }
        }
        Cmd::FamilyOrder { prime, family, cap } => {
            let f = prime_field(*prime)?;
            let fam = family.split(';').map(|s| parse_poly(&f, s)).collect::<Result<Vec<_>>>()?;
            let v = vanishing_order_in_family(&fam, *cap);
            let body = match (fmt, v) {
                (Format::Json, v) => json!({"order": v, "cap": cap}).to_string(),
                (_, Some(n)) => format!("order {n}"),
                (_, None) => format!("vanishes to order > {cap}"),
            };
            Output { body, ok: true }
        }
        Cmd::Oracle { prime, e_model, k } => {
            let f = prime_field(*prime)?;
            let sys = build_system(&parse_poly(&f, e_model)?)?;
            let (same, n) = oracle_check(&sys, *k, seed)?;
            let body = match fmt {
                Format::Json => json!({"k": k, "oracle_points": n, "agrees": same}).to_string(),
                _ => format!("oracle k = {k}: {n} points, agrees = {same}"),
            };
            Output { body, ok: same }
        }
    };
    Ok(out)
}

fn oracle_check(sys: &PrymFiberSystem, k: usize, seed: u64) -> Result<(bool, usize)> {
    let (emb, scan) = brute_force_oracle(sys, k, seed)?;
    let pts = solve_fiber(sys, seed)?;
    let exact = rational_points(&pts, &emb)?;
    Ok((exact == scan, scan.len()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            let mut body = o.body;
            if !body.ends_with('\n') {
                body.push('\n');
            }
            let written = match &cli.out {
                Some(path) => fs::write(path, body.as_bytes()).with_context(|| format!("writing {path}")),
                None => std::io::stdout().write_all(body.as_bytes()).context("writing stdout"),
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
