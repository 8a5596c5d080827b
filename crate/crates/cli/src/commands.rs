use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use mubforge_core::dim::Dimension;
use mubforge_core::gram::{build_gram, gram_from_bases, verify_gram_projection, verify_mub_definition};
use mubforge_core::invariants::{generating_set, identify_symbolic, triple_tensor, GeneratingSet, TripleTensor};
use mubforge_core::landscape::{hessian_analysis, restricted_defect};
use mubforge_core::optimize::{batch_search_with, SearchConfig, SearchResult};
use mubforge_core::perm::Perm;
use mubforge_core::phases::PhaseVector;
use mubforge_core::record::{
    gram_csv, perm_text, summary_csv, write_atomic, Classification, PhaseCount, SolutionRecord,
};
use mubforge_core::symmetry::{automorphisms, bases_from_gram, isomorphic as find_isomorphism, maps_onto};
use mubforge_core::traces::{
    eigenvalue_sufficiency_check, f_expansion, f_matrix, g_expansion_terms, g_family_term_counts, g_matrix, objective,
};
use mubforge_core::wh::analytic_mubs;

use crate::error::CliError;
use crate::{
    AnalyticArgs, AutArgs, ClassifyArgs, DefectArgs, HessianArgs, IsomorphicArgs, SearchArgs, VerifyArgs, TOOL_VERSION,
};

const CHECKPOINT_INTERVAL: Duration = Duration::from_secs(60);

/// Load a solution from a path, or from stdin for `-`.
pub fn load(path: &Path) -> Result<SolutionRecord, CliError> {
    let rec = if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        SolutionRecord::from_reader(text.as_bytes())
    } else {
        SolutionRecord::load(path)
    };
    rec.map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    write_atomic(path, text.as_bytes()).map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))
}

/// `x` with ten significant digits.
pub fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (9 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn search_config(args: &SearchArgs) -> Result<SearchConfig, CliError> {
    let d = Dimension::new(args.d)?;
    if args.d >= 6 && !args.allow_long {
        return Err(CliError::BadInput(format!(
            "d = {} has no known complete MUB set; pass --allow-long to search anyway",
            args.d
        )));
    }
    if args.count == 0 || args.restarts == 0 {
        return Err(CliError::BadInput("count and restarts must be positive".into()));
    }
    if args.threshold.is_nan() || args.threshold <= 0.0 {
        return Err(CliError::BadInput("threshold must be positive".into()));
    }
    let mut config = SearchConfig::new(d).with_seed(args.seed);
    config.max_restarts = args.restarts;
    config.stage1_iters = args.stage1_iters;
    config.stage2_iters = args.stage2_iters;
    config.accept_threshold = args.threshold;
    config.polish = !args.no_polish;
    Ok(config)
}

fn solution_record(r: &SearchResult, seed: u64) -> SolutionRecord {
    let mut rec = SolutionRecord::new(&r.phi);
    rec.f_final = Some(r.f_final);
    rec.created_at = Some(now());
    rec.seed = Some(seed);
    rec.tool_version = Some(TOOL_VERSION.to_string());
    rec
}

struct Checkpoint {
    path: PathBuf,
    seed: u64,
    best: Option<SearchResult>,
    last_write: Instant,
}

impl Checkpoint {
    fn offer(&mut self, r: &SearchResult) {
        if self.best.as_ref().is_none_or(|b| r.f_final < b.f_final) {
            self.best = Some(r.clone());
        }
        if self.last_write.elapsed() >= CHECKPOINT_INTERVAL {
            self.flush();
        }
    }

    fn flush(&mut self) {
        if let Some(best) = &self.best {
            if let Err(e) = solution_record(best, self.seed).save(&self.path) {
                eprintln!("warning: checkpoint {}: {e}", self.path.display());
            }
        }
        self.last_write = Instant::now();
    }
}

pub fn search(args: &SearchArgs) -> Result<(), CliError> {
    let config = search_config(args)?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
    }
    let checkpoint = match (&args.out, args.allow_long) {
        (Some(dir), true) => Some(Mutex::new(Checkpoint {
            path: dir.join("checkpoint_best.json"),
            seed: args.seed,
            best: None,
            last_write: Instant::now(),
        })),
        _ => None,
    };
    let (results, summary) = batch_search_with(&config, args.count, |_, r| {
        if let Some(c) = &checkpoint {
            c.lock().expect("checkpoint lock").offer(r);
        }
    });
    if let Some(c) = checkpoint {
        c.into_inner().expect("checkpoint lock").flush();
    }

    if let Some(dir) = &args.out {
        for (run, r) in results.iter().enumerate().filter(|(_, r)| r.accepted) {
            solution_record(r, args.seed).save(&dir.join(format!("solution_{run}.json")))?;
        }
        write_file(&dir.join("summary.csv"), &summary_csv(&results, args.omit_timing))?;
    }

    println!("d = {}, searches = {}, seed = {}", args.d, summary.count, args.seed);
    println!("accepted: {} ({:.1}%)", summary.accepted, 100.0 * summary.success_rate);
    println!("F: min {:e}  median {:e}  max {:e}", summary.min_f, summary.median_f, summary.max_f);
    if !args.omit_timing {
        print!("mean time per search: {:.3} s", summary.mean_seconds);
        match summary.seconds_per_accepted {
            Some(s) => println!(", per solution: {s:.3} s"),
            None => println!(),
        }
    }
    if summary.accepted == 0 {
        println!("no solution reached F < {:e}", config.accept_threshold);
    }
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let rec = load(&args.file)?;
    let phi = rec.phase_vector()?;
    let g = build_gram(&phi);
    let value = objective(&phi);
    let proj = verify_gram_projection(&g, args.tol);
    let sufficiency = eigenvalue_sufficiency_check(&g);

    let mut ok = proj.passed;
    println!("d = {}, N = {}, P = {}", rec.d, phi.dim().states(), phi.len());
    println!("F = {:e}  (Tr G^3 - d = {:e}, Tr G^4 - d = {:e})", value.value(), value.f_dev, value.g_dev);
    println!(
        "projector: idempotency {:e}, eigenvalue distance {:e}, rank {}, trace {:.12}",
        proj.idempotency_residual, proj.max_eigen_distance, proj.rank, proj.trace
    );
    println!("eigenvalues in {{0, 1}}: {}", if sufficiency { "yes" } else { "no" });

    if proj.passed {
        match bases_from_gram(&g) {
            Ok(m) => {
                let rep = verify_mub_definition(&m, args.tol);
                println!(
                    "reconstructed bases: orthonormality {:e}, unbiasedness {:e}",
                    rep.max_orthonormality_violation, rep.max_unbiasedness_violation
                );
                ok &= rep.passed;
            }
            Err(e) => {
                println!("reconstruction failed: {e}");
                ok = false;
            }
        }
    }
    if let Some(m) = rec.mub_set()? {
        let rep = verify_mub_definition(&m, args.tol);
        println!(
            "stored bases: orthonormality {:e}, unbiasedness {:e}",
            rep.max_orthonormality_violation, rep.max_unbiasedness_violation
        );
        ok &= rep.passed;
    }

    if args.explain {
        explain(&phi);
        println!("eigenvalues:");
        for (k, l) in proj.eigenvalues.iter().enumerate() {
            println!("  {k:3} {l:+.16e}");
        }
    }
    if let Some(path) = &args.gram_csv {
        write_file(path, &gram_csv(&g))?;
    }
    if ok {
        println!("PASS at tolerance {:e}", args.tol);
        Ok(())
    } else {
        Err(CliError::Negative(format!("not a complete MUB set at tolerance {:e}", args.tol)))
    }
}

fn explain(phi: &PhaseVector) {
    let g = build_gram(phi);
    let terms = g_expansion_terms(phi);
    let counts = g_family_term_counts(phi.dim());
    println!("Tr G^3: expansion {:.16}, matrix {:.16}", f_expansion(phi), f_matrix(&g).unwrap_or(f64::NAN));
    println!("Tr G^4: expansion {:.16}, matrix {:.16}", terms.total(), g_matrix(&g).unwrap_or(f64::NAN));
    println!("  constant        {:+.16e}", terms.constant);
    println!("  triangle        {:+.16e}", terms.triangle);
    for (k, (v, n)) in terms.families.iter().zip(counts).enumerate() {
        println!("  family {}  {:+.16e}  ({n} terms)", k + 1, v);
    }
}

pub fn classification_of(t: &TripleTensor, cluster_tol: f64, symbolic_tol: f64, max_denom: u64) -> GeneratingSet {
    identify_symbolic(&generating_set(t, cluster_tol), symbolic_tol, max_denom)
}

fn symbol(gs: &GeneratingSet, k: usize) -> Option<String> {
    gs.symbolic.as_ref().and_then(|s| s[k]).map(|p| p.to_string())
}

pub fn classify(args: &ClassifyArgs) -> Result<(), CliError> {
    let rec = load(&args.file)?;
    let phi = rec.phase_vector()?;
    let t = triple_tensor(&build_gram(&phi));
    let gs = classification_of(&t, args.tol, args.symbolic_tol, args.max_denom);

    println!("generating set ({} phases, {} entries):", gs.phases.len(), gs.total());
    for (k, (p, n)) in gs.phases.iter().zip(&gs.frequencies).enumerate() {
        println!("  {:<14} {:<8} {n}", sig10(*p), symbol(&gs, k).unwrap_or_else(|| "?".into()));
    }
    let symbols: Vec<String> = (0..gs.phases.len()).map(|k| symbol(&gs, k).unwrap_or_else(|| "?".into())).collect();
    let freqs: Vec<String> = gs.frequencies.iter().map(usize::to_string).collect();
    println!("symbolic: {{{}}}", symbols.join(", "));
    println!("frequencies: {{{}}}", freqs.join(", "));
    println!("fluctuation: {:e}", gs.fluctuation);

    if let Some(path) = &args.histogram {
        let mut csv = String::from("phase,count\n");
        for (p, n) in gs.phases.iter().zip(&gs.frequencies) {
            let _ = writeln!(csv, "{p:.17e},{n}");
        }
        write_file(path, &csv)?;
    }
    if let Some(path) = &args.out {
        let mut out = rec.clone();
        let previous = out.classification.take().unwrap_or_default();
        out.classification = Some(embed(&gs, previous.aut_order, previous.defect));
        out.save(path)?;
    }
    Ok(())
}

fn images_line(p: &Perm) -> String {
    p.images().iter().map(|&i| (i + 1).to_string()).collect::<Vec<_>>().join(" ")
}

pub fn aut(args: &AutArgs) -> Result<(), CliError> {
    let rec = load(&args.file)?;
    let phi = rec.phase_vector()?;
    let t = triple_tensor(&build_gram(&phi));
    let group = automorphisms(&t, args.tol)?;
    let sizes: Vec<String> = group.basic_orbit_sizes().iter().map(usize::to_string).collect();
    println!("|Aut(T)| = {}", group.order());
    println!("generators: {}", group.generators().len());
    println!("basic orbit sizes: {}", sizes.join(" "));

    if let Some(path) = &args.out {
        let mut text = String::new();
        for g in group.generators() {
            text.push_str(&images_line(g));
            text.push('\n');
        }
        write_file(path, &text)?;
    }
    if let Some(path) = &args.gap {
        let gens: Vec<String> =
            group.generators().iter().map(|g| format!("PermList([{}])", images_line(g).replace(' ', ","))).collect();
        write_file(path, &format!("G := Group([{}]);\n", gens.join(",\n  ")))?;
    }
    Ok(())
}

pub fn isomorphic(args: &IsomorphicArgs) -> Result<(), CliError> {
    let a = load(&args.a)?;
    let b = load(&args.b)?;
    if a.d != b.d {
        return Err(CliError::Negative(format!("dimensions differ ({} vs {})", a.d, b.d)));
    }
    let ta = triple_tensor(&build_gram(&a.phase_vector()?));
    let tb = triple_tensor(&build_gram(&b.phase_vector()?));
    match find_isomorphism(&ta, &tb, args.tol)? {
        Some(p) if maps_onto(&ta, &tb, &p, args.tol) => {
            match &args.out {
                Some(path) => {
                    write_file(path, &perm_text(&p))?;
                    println!("isomorphic; permutation written to {}", path.display());
                }
                None => print!("{}", perm_text(&p)),
            }
            Ok(())
        }
        Some(_) => Err(CliError::Guard("permutation failed re-verification on the full tensor".into())),
        None => Err(CliError::Negative("not isomorphic".into())),
    }
}

pub fn defect(args: &DefectArgs) -> Result<(), CliError> {
    let rec = load(&args.file)?;
    let g = build_gram(&rec.phase_vector()?);
    let r = restricted_defect(&g, args.zero_tol, args.rank_tol)?;
    println!("N = {}", r.n);
    println!("zero entries z = {} (orthogonality accounts for {})", r.z, r.z_expected);
    println!("tau = {}", r.tau);
    println!("rank = {}", r.rank);
    println!("restricted defect = {}", r.delta);
    println!("{}", if r.delta == 0 { "isolated (first order)" } else { "not isolated at first order" });

    if let Some(path) = &args.spectrum {
        write_file(path, &column(&r.singular_values))?;
    }
    if let Some(path) = &args.json {
        let report = serde_json::json!({
            "n": r.n,
            "z": r.z,
            "z_expected": r.z_expected,
            "tau": r.tau,
            "rank": r.rank,
            "delta": r.delta,
            "singular_values": r.singular_values,
        });
        write_file(path, &format!("{report:#}\n"))?;
    }
    Ok(())
}

pub fn hessian(args: &HessianArgs) -> Result<(), CliError> {
    let rec = load(&args.file)?;
    let phi = rec.phase_vector()?;
    let r = hessian_analysis(&phi, args.step, args.null_tol)?;
    println!("Hessian size {}", r.eigenvalues.len());
    println!("null dimension {} (gauge {})", r.null_dim, r.gauge_dim);
    println!("nontrivial null directions {}", r.nontrivial_null);
    if let Some(s) = r.smallest_positive {
        println!("smallest positive eigenvalue {s:e}");
    }
    println!("{}", if r.nontrivial_null == 0 { "isolated (second order)" } else { "flat directions beyond gauge" });

    if let Some(path) = &args.spectrum {
        write_file(path, &column(&r.eigenvalues))?;
    }
    if let Some(path) = &args.json {
        let report = serde_json::json!({
            "eigenvalues": r.eigenvalues,
            "null_dim": r.null_dim,
            "gauge_dim": r.gauge_dim,
            "nontrivial_null": r.nontrivial_null,
            "smallest_positive": r.smallest_positive,
        });
        write_file(path, &format!("{report:#}\n"))?;
    }
    Ok(())
}

fn column(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.17e}\n")).collect()
}

pub fn analytic_record(d: usize) -> Result<(SolutionRecord, PhaseVector), CliError> {
    let m = analytic_mubs(Dimension::new(d)?)?;
    let (_, phi) = gram_from_bases(&m)?;
    let mut rec = SolutionRecord::new(&phi).with_bases(&m);
    rec.f_final = Some(objective(&phi).value());
    rec.created_at = Some(now());
    rec.tool_version = Some(TOOL_VERSION.to_string());
    Ok((rec, phi))
}

pub fn analytic(args: &AnalyticArgs) -> Result<(), CliError> {
    let (rec, phi) = analytic_record(args.d)?;
    match &args.out {
        Some(path) => rec.save(path)?,
        None => println!("{}", rec.to_json()),
    }
    if let Some(path) = &args.gram_csv {
        write_file(path, &gram_csv(&build_gram(&phi)))?;
    }
    Ok(())
}

/// Classification block for a record, as stored by `reproduce`.
pub fn embed(gs: &GeneratingSet, aut_order: Option<String>, defect: Option<i64>) -> Classification {
    Classification {
        generating_set: gs
            .phases
            .iter()
            .zip(&gs.frequencies)
            .enumerate()
            .map(|(k, (&phase, &frequency))| PhaseCount { phase, symbolic: symbol(gs, k), frequency })
            .collect(),
        fluctuation: Some(gs.fluctuation),
        aut_order,
        defect,
    }
}
