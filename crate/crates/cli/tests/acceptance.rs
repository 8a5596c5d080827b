//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use mubforge_core::dim::Dimension;
use mubforge_core::gram::{build_gram, gram_from_bases, verify_mub_definition};
use mubforge_core::invariants::{generating_set, identify_symbolic, triple_tensor, TripleTensor};
use mubforge_core::landscape::{hessian_analysis, restricted_defect};
use mubforge_core::optimize::{batch_search, random_init, start_rng, SearchConfig, SearchResult};
use mubforge_core::perm::PermGroup;
use mubforge_core::phases::PhaseVector;
use mubforge_core::symmetry::{automorphisms, isomorphic, maps_onto};
use mubforge_core::traces::{f_expansion, f_matrix, g_expansion, g_matrix, gradient, objective};
use mubforge_core::wh::{analytic_mubs, clifford_generator_perms, clifford_order};

const BIN: &str = env!("CARGO_BIN_EXE_mubforge");
const TOL: f64 = 1e-9;

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn dim(d: usize) -> Dimension {
    Dimension::new(d).unwrap()
}

fn tensor(phi: &PhaseVector) -> TripleTensor {
    triple_tensor(&build_gram(phi))
}

fn analytic_phases(d: usize) -> PhaseVector {
    gram_from_bases(&analytic_mubs(dim(d)).unwrap()).unwrap().1
}

/// Default-configuration batches used for the success-rate criterion.
struct Table1 {
    runs: Vec<(usize, Vec<SearchResult>)>,
}

impl Table1 {
    fn run() -> Self {
        let runs = [(3, 200), (4, 50), (5, 10)]
            .into_iter()
            .map(|(d, n)| (d, batch_search(&SearchConfig::new(dim(d)), n).0))
            .collect();
        Table1 { runs }
    }

    fn accepted(&self, d: usize) -> Vec<PhaseVector> {
        self.runs
            .iter()
            .filter(|r| r.0 == d)
            .flat_map(|r| r.1.iter())
            .filter(|r| r.accepted)
            .map(|r| r.phi.clone())
            .collect()
    }
}

/// Five independent solutions per dimension, searched with restarts.
fn solution_pool(d: usize) -> Vec<PhaseVector> {
    let mut c = SearchConfig::new(dim(d)).with_seed(1000 + d as u64);
    c.max_restarts = 20;
    batch_search(&c, 5).0.into_iter().filter(|r| r.accepted).map(|r| r.phi).collect()
}

fn c1_oracles() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for d in [2, 3, 4] {
        let mut rng = start_rng(1, d as u64);
        for _ in 0..1000 {
            let phi = random_init(dim(d), &mut rng);
            let g = build_gram(&phi);
            worst = worst.max((f_expansion(&phi) - f_matrix(&g).unwrap()).abs());
            worst = worst.max((g_expansion(&phi) - g_matrix(&g).unwrap()).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-10 && secs < 120.0, format!("3000 points, max |expansion - matrix| = {worst:.2e}, {secs:.1} s"))
}

fn c2_gradient() -> Outcome {
    let h = 1e-3;
    let mut worst = 0.0f64;
    for d in [3, 4] {
        let mut rng = start_rng(2, d as u64);
        for _ in 0..50 {
            let phi = random_init(dim(d), &mut rng);
            let grad = gradient(&phi);
            for (k, &a) in grad.iter().enumerate() {
                let at = |t: f64| {
                    let mut p = phi.clone();
                    p.as_mut_slice()[k] += t;
                    objective(&p).squared()
                };
                let fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
                let scale = a.abs().max(fd.abs()).max(1e-8);
                worst = worst.max((a - fd).abs() / scale);
            }
        }
    }
    outcome(worst < 1e-6, format!("100 points, max relative deviation {worst:.2e}"))
}

fn c3_analytic() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in 2..=5 {
        let m = analytic_mubs(dim(d)).unwrap();
        let report = verify_mub_definition(&m, 1e-10);
        let f = objective(&gram_from_bases(&m).unwrap().1).value();
        pass &= report.passed && f < 1e-12;
        parts.push(format!("d={d} F={f:.1e}"));
    }
    outcome(pass, parts.join(", "))
}

fn c4_success(t1: &Table1) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, results) in &t1.runs {
        let n = results.len();
        let acc = results.iter().filter(|r| r.accepted).count();
        let ok = match d {
            3 => acc as f64 >= 0.85 * n as f64,
            4 => acc as f64 >= 0.40 * n as f64,
            _ => acc >= 1,
        };
        pass &= ok;
        parts.push(format!("d={d} {acc}/{n}"));
    }
    outcome(pass, parts.join(", "))
}

fn c5_generating_sets(t1: &Table1) -> Outcome {
    let expected: [(usize, &[&str], &[usize], usize); 3] = [
        (3, &["0", "π/6", "π/2", "3π/2", "11π/6"], &[1080, 216, 108, 108, 216], 1728),
        (4, &["0", "π/2", "3π/2"], &[6080, 960, 960], 8000),
        (5, &["0", "π/5", "2π/5", "π", "8π/5", "9π/5"], &[13500, 3000, 3000, 1500, 3000, 3000], 27000),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, symbols, freqs, total) in expected {
        let sols = t1.accepted(d);
        pass &= !sols.is_empty();
        let mut matched = 0;
        for phi in &sols {
            let gs = identify_symbolic(&generating_set(&tensor(phi), TOL), 1e-10, 60);
            let got: Vec<String> =
                gs.symbolic.unwrap().iter().map(|s| s.map_or("?".into(), |p| p.to_string())).collect();
            if got == symbols && gs.frequencies == freqs && gs.frequencies.iter().sum::<usize>() == total {
                matched += 1;
            }
        }
        pass &= matched == sols.len();
        parts.push(format!("d={d} {matched}/{}", sols.len()));
    }
    outcome(pass, parts.join(", "))
}

fn c6_aut(pools: &[(usize, Vec<PhaseVector>)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, sols) in pools {
        let expected = match d {
            3 => "216",
            4 => "1920",
            _ => "3000",
        };
        let mut tested: Vec<PhaseVector> = sols.iter().take(3).cloned().collect();
        pass &= tested.len() == 3;
        tested.push(analytic_phases(*d));
        let orders: Vec<String> = tested
            .iter()
            .map(|phi| automorphisms(&tensor(phi), TOL).map_or_else(|e| e.to_string(), |g| g.order().to_string()))
            .collect();
        pass &= orders.iter().all(|o| o == expected);
        parts.push(format!("d={d} [{}]", orders.join(" ")));
    }
    outcome(pass, parts.join(", "))
}

fn c7_clifford() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in [3, 5] {
        let m = analytic_mubs(dim(d)).unwrap();
        let aut = automorphisms(&triple_tensor(&gram_from_bases(&m).unwrap().0), TOL).unwrap();
        let gens = clifford_generator_perms(dim(d), &m).unwrap().into_iter().map(|c| c.perm).collect();
        let cliff = PermGroup::new(d * (d + 1), gens).unwrap();
        let ok = cliff.order().to_string() == clifford_order(d).to_string()
            && cliff.is_subgroup_of(&aut)
            && aut.is_subgroup_of(&cliff);
        pass &= ok;
        parts.push(format!("d={d} |Cliff|={} |Aut|={}", cliff.order(), aut.order()));
    }
    outcome(pass, parts.join(", "))
}

fn c8_isomorphism(pools: &[(usize, Vec<PhaseVector>)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, sols) in pools {
        pass &= sols.len() >= 5;
        let tensors: Vec<_> = sols.iter().map(tensor).collect();
        let mut good = 0;
        let mut pairs = 0;
        for i in 0..tensors.len() {
            for j in (i + 1)..tensors.len() {
                pairs += 1;
                if let Ok(Some(p)) = isomorphic(&tensors[i], &tensors[j], TOL) {
                    if maps_onto(&tensors[i], &tensors[j], &p, TOL) {
                        good += 1;
                    }
                }
            }
        }
        pass &= good == pairs;
        parts.push(format!("d={d} {good}/{pairs} pairs"));
    }
    outcome(pass, parts.join(", "))
}

fn c9_isolated(pools: &[(usize, Vec<PhaseVector>)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, sols) in pools {
        pass &= sols.len() >= 3;
        let mut agree = 0;
        for phi in sols.iter().take(3) {
            let delta = restricted_defect(&build_gram(phi), 1e-10, 1e-8).map(|r| r.delta);
            let null = hessian_analysis(phi, 1e-5, 1e-7).map(|r| r.nontrivial_null);
            if matches!((delta, null), (Ok(0), Ok(0))) {
                agree += 1;
            }
        }
        pass &= agree == 3;
        parts.push(format!("d={d} {agree}/3 isolated by both"));
    }
    outcome(pass, parts.join(", "))
}

fn run_search(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(BIN).args(args).arg("--out").arg(out).env("MUBFORGE_THREADS", "1").output().expect("run mubforge")
}

fn c10_d6() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = run_search(&["search", "-d", "6", "-n", "10", "--allow-long"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap_or_default();
    let accepted = summary.lines().skip(1).filter(|l| l.split(',').nth(1) == Some("true")).count();
    let rows = summary.lines().count().saturating_sub(1);
    let min_line = stdout.lines().find(|l| l.starts_with("F: min")).unwrap_or("").to_string();
    outcome(
        out.status.success() && rows == 10 && accepted == 0 && !min_line.is_empty(),
        format!("{accepted}/{rows} accepted, {min_line}"),
    )
}

fn c11_determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["search", "-d", "3", "-n", "10", "--seed", "7", "--omit-timing"];
    let ok = run_search(&args, a.path()).status.success() && run_search(&args, b.path()).status.success();
    let sa = std::fs::read(a.path().join("summary.csv")).unwrap_or_default();
    let sb = std::fs::read(b.path().join("summary.csv")).unwrap_or_default();
    outcome(ok && !sa.is_empty() && sa == sb, format!("summary.csv {} bytes, identical: {}", sa.len(), sa == sb))
}

fn main() {
    let start = Instant::now();
    let t1 = Table1::run();
    let pools: Vec<(usize, Vec<PhaseVector>)> = [3, 4, 5].into_iter().map(|d| (d, solution_pool(d))).collect();
    println!("searches for criteria 4-9: {:.1} s", start.elapsed().as_secs_f64());

    let criteria: Vec<(&str, Check)> = vec![
        ("oracle equivalence", Box::new(c1_oracles)),
        ("gradient check", Box::new(c2_gradient)),
        ("analytic oracles", Box::new(c3_analytic)),
        ("search success", Box::new(|| c4_success(&t1))),
        ("generating sets", Box::new(|| c5_generating_sets(&t1))),
        ("automorphism orders", Box::new(|| c6_aut(&pools))),
        ("clifford coincidence", Box::new(c7_clifford)),
        ("isomorphism universality", Box::new(|| c8_isomorphism(&pools))),
        ("isolatedness", Box::new(|| c9_isolated(&pools))),
        ("d=6 behavior", Box::new(c10_d6)),
        ("determinism", Box::new(c11_determinism)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name}: {} ({:.1} s)", k + 1, o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
