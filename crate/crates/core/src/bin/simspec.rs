//! `simspec`: subdivisions, spectra, Schreier graphs and limit laws from the
//! command line. Exits 0 iff every internal check passes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use simplicial_spectra::complex::Complex;
use simplicial_spectra::decimation::{
    det_x0, det_x0_explicit, f_laplacian, l_factor, limit_quantile_1d, limit_quantile_cd, multiplicities,
    multiplicities_by_recursion, phi, predicted_spectrum_adjacency, recursion_check, renormalize,
    renormalize_unfactored, semiconjugacy_residual, sine_law, degree_identity, psi, f_poly,
};
use simplicial_spectra::fractal::{derive_fractal_data, level_json, levels, verify_duality};
use simplicial_spectra::schreier::{build_schreier, verify_approx};
use simplicial_spectra::spectral::{
    eigenvalues_int, eigenvalues_sym, fmt_f, l1_distance, max_residual, top_quantile, wielandt_check,
    StepFunction, DEFAULT_TOL,
};
use simplicial_spectra::subdivide::{iterate, q_ratio, Kind};
use simplicial_spectra::BUDGET_ENV;

#[derive(Parser)]
#[command(name = "simspec", version, about = "Spectra of iterated simplicial subdivisions")]
#[command(after_help = "The size budget for dense matrices is read from SIMSPEC_MAX_ORDER (default 5000).")]
struct Cli {
    /// Relative eigensolver tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct KindArgs {
    /// cd, sd or esd.
    #[arg(long, default_value = "cd")]
    kind: String,
    /// Parameter of esd.
    #[arg(long)]
    r: Option<u32>,
}

impl KindArgs {
    fn kind(&self) -> Result<Kind> {
        Ok(Kind::parse(&self.kind, self.r)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Iterate a subdivision, writing level_<n>.json and f_vectors.csv.
    Subdivide {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long)]
        n: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantile function of the down Laplacian in dimension `dim` (default: top).
    Spectrum {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schreier graph adjacency as `row,col,value` triplets.
    Schreier {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check that facet addresses map the dual graph of cd^n onto the graph.
        #[arg(long)]
        verify_approx: bool,
    },
    /// Predicted adjacency spectrum of the Schreier graph as value/multiplicity pairs.
    Predict {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare with the eigensolver.
        #[arg(long)]
        verify: bool,
    },
    /// Truncated limit quantile function for cone subdivision.
    Limit {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distances of the quantile functions of iterated subdivisions.
    Converge {
        #[command(flatten)]
        kind: KindArgs,
        /// Dimension of the starting simplex when no input is given.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Depth of the limit used for cd.
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level-k graph of the self-similar construction as JSON.
    Fractal {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare with the dual graph of the (k+1)-fold subdivision.
        #[arg(long)]
        verify: bool,
    },
    /// Plot data for the limit laws and decimation polynomials.
    Figures {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Quick run of the numerical checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, body).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn read_complex(path: &Path) -> Result<Complex> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Complex::from_json(&s)?)
}

fn euler(k: &Complex) -> i64 {
    k.f_vector().iter().enumerate().map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) }).sum()
}

fn quantile(k: &Complex, dim: usize, tol: f64) -> Result<StepFunction> {
    let l = k.down_laplacian(dim)?.map(|x| x as f64);
    let ev = eigenvalues_sym(&l, tol)?;
    if let Some(&x) = ev.first().filter(|&&x| x < -tol * ev.last().unwrap().abs().max(1.0)) {
        bail!("negative Laplacian eigenvalue {x}");
    }
    if max_residual(&l) > tol {
        bail!("eigenpair residual {} above {tol}", max_residual(&l));
    }
    Ok(StepFunction::from_eigenvalues(&ev)?)
}

fn cmd_subdivide(kind: Kind, n: usize, input: &Path, out: &Path) -> Result<()> {
    let k = read_complex(input)?;
    let levels = iterate(kind, &k, n)?;
    fs::create_dir_all(out)?;
    let width = k.dim() + 1;
    let mut csv = String::from("level");
    for i in 0..width {
        let _ = write!(csv, ",f{i}");
    }
    csv.push('\n');
    for (i, c) in levels.iter().enumerate() {
        if euler(c) != euler(&k) {
            bail!("level {i} changed the Euler characteristic");
        }
        fs::write(out.join(format!("level_{i}.json")), c.to_json() + "\n")?;
        let f: Vec<String> = c.f_vector().iter().map(ToString::to_string).collect();
        let _ = writeln!(csv, "{i},{}", f.join(","));
    }
    fs::write(out.join("f_vectors.csv"), csv)?;
    Ok(())
}

fn cmd_schreier(d: usize, n: usize, out: Option<&Path>, verify: bool) -> Result<()> {
    let g = build_schreier(d, n)?;
    emit(out, &g.adjacency.to_csv())?;
    if verify {
        if !verify_approx(d, n)? {
            bail!("facet addresses do not match the Schreier graph");
        }
        if g.loop_count() != d + 1 {
            bail!("{} loops, expected {}", g.loop_count(), d + 1);
        }
        eprintln!("verify-approx: ok");
    }
    Ok(())
}

#[derive(Serialize)]
struct Pair {
    value: f64,
    multiplicity: u128,
}

fn cmd_predict(d: usize, n: usize, out: Option<&Path>, verify: bool) -> Result<()> {
    let pred = predicted_spectrum_adjacency(d, n)?;
    if multiplicities(d, n)? != multiplicities_by_recursion(d, n)? {
        bail!("closed-form multiplicities disagree with their recursion");
    }
    let pairs: Vec<Pair> = pred.iter().map(|&(value, multiplicity)| Pair { value, multiplicity }).collect();
    emit(out, &(serde_json::to_string_pretty(&pairs)? + "\n"))?;
    if verify {
        let ev = eigenvalues_int(&build_schreier(d, n)?.dense())?;
        let flat: Vec<f64> = pred.iter().flat_map(|&(v, m)| std::iter::repeat_n(v, m as usize)).collect();
        let dev = ev.iter().zip(&flat).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if flat.len() != ev.len() || dev > 1e-8 {
            bail!("prediction deviates from the eigensolver by {dev:.3e}");
        }
        eprintln!("verify: max deviation {dev:.3e}");
    }
    Ok(())
}

fn cmd_limit(d: usize, depth: usize, out: Option<&Path>) -> Result<()> {
    let q = limit_quantile_cd(d, depth)?;
    if q.covered_mass() + q.tail != Ratio::from_integer(1) {
        bail!("limit masses do not sum to 1");
    }
    emit(out, &q.normalized.to_csv())
}

fn cmd_converge(kind: Kind, start: &Complex, n: usize, depth: usize, tol: f64, out: Option<&Path>) -> Result<()> {
    if n == 0 {
        bail!("n must be at least 1");
    }
    let complexes = iterate(kind, start, n)?;
    let dim = start.dim();
    let quantiles: Vec<StepFunction> = std::thread::scope(|s| {
        let handles: Vec<_> = complexes.iter().map(|c| s.spawn(move || quantile(c, dim, tol))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect::<Result<_>>()
    })?;
    let limit = if kind == Kind::Cone && dim >= 2 { Some(limit_quantile_cd(dim, depth)?) } else { None };
    let last = quantiles.last().unwrap();
    let mut csv = String::from("n,dist_to_final");
    if limit.is_some() {
        csv.push_str(",dist_to_limit,limit_tail");
    }
    csv.push('\n');
    let mut prev: Option<(f64, Option<f64>)> = None;
    let mut failures = Vec::new();
    for (i, q) in quantiles.iter().enumerate() {
        let to_final = l1_distance(q, last)?;
        let to_limit = limit.as_ref().map(|l| l1_distance(q, &l.normalized)).transpose()?;
        let _ = write!(csv, "{i},{}", fmt_f(to_final));
        if let (Some(x), Some(l)) = (to_limit, &limit) {
            let _ = write!(csv, ",{},{}", fmt_f(x), fmt_f(l.tail_mass()));
        }
        csv.push('\n');
        if let Some((a, b)) = prev {
            if to_final > a + 1e-9 {
                failures.push(format!("distance to level {n} grows at n={i}"));
            }
            if let (Some(b), Some(x)) = (b, to_limit) {
                if x > b + 1e-9 {
                    failures.push(format!("distance to the limit grows at n={i}"));
                }
            }
        }
        prev = Some((to_final, to_limit));
    }
    emit(out, &csv)?;
    if !failures.is_empty() {
        bail!(failures.join("; "));
    }
    Ok(())
}

fn cmd_fractal(kind: Kind, d: usize, k: usize, out: Option<&Path>, verify: bool) -> Result<()> {
    let data = derive_fractal_data(kind, d)?;
    let g = levels(&data, k)?.pop().unwrap();
    emit(out, &(level_json(&g, &data) + "\n"))?;
    if verify {
        let r = verify_duality(kind, d, k)?;
        if !r.holds() {
            bail!("duality fails: {}", serde_json::to_string(&r)?);
        }
        eprintln!("verify: {} vertices, {} loops, isomorphic", r.n_vertices, r.loops);
    }
    Ok(())
}

fn cmd_figures(d: usize, out: &Path, depth: usize, samples: usize) -> Result<()> {
    if !(1..=3).contains(&d) {
        bail!("figures are produced for d in 1..=3, got {d}");
    }
    if samples < 2 {
        bail!("need at least 2 samples");
    }
    fs::create_dir_all(out)?;
    let top = d as f64 + 3.0;
    let mut poly = String::from("z,f\n");
    for i in 0..samples {
        let z = top * i as f64 / (samples - 1) as f64;
        let _ = writeln!(poly, "{},{}", fmt_f(z), fmt_f(f_laplacian(d, z)));
    }
    fs::write(out.join("decimation_polynomial.csv"), poly)?;
    if d == 1 {
        let mut law = String::from("x,value\n");
        for i in 0..samples {
            let x = i as f64 / (samples - 1) as f64;
            let _ = writeln!(law, "{},{}", fmt_f(x), fmt_f(sine_law(x)));
        }
        fs::write(out.join("limit_law.csv"), law)?;
        fs::write(out.join("limit_quantile.csv"), limit_quantile_1d(samples)?.to_csv())?;
        return Ok(());
    }
    let q = limit_quantile_cd(d, depth)?;
    fs::write(out.join("limit_quantile.csv"), q.normalized.to_csv())?;
    let mut by_depth: Vec<_> = q.steps.iter().collect();
    by_depth.sort_by(|a, b| a.depth.cmp(&b.depth).then(a.value.total_cmp(&b.value)));
    let mut steps = String::from("value,length,depth,family\n");
    for s in by_depth {
        let _ = writeln!(steps, "{},{},{},{:?}", fmt_f(s.value), s.length, s.depth, s.family);
    }
    fs::write(out.join("limit_steps.csv"), steps)?;
    Ok(())
}

fn random_point(rng: &mut StdRng, d: usize) -> (f64, f64) {
    loop {
        let mu: f64 = rng.gen_range(-3.0..3.0);
        let l: f64 = rng.gen_range(-3.0..3.0);
        if l.abs() > 0.05 && l_factor(d, mu, l).abs() > 0.05 && (phi(d, mu, l) + l).abs() > 0.05 {
            if let Ok((_, l2)) = renormalize(d, mu, l) {
                if l2.abs() > 1e-3 {
                    return (mu, l);
                }
            }
        }
    }
}

fn selftest(seed: u64) -> Result<bool> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut checks: Vec<(&str, Result<String>)> = Vec::new();

    checks.push(("schreier spectrum", (|| {
        let mut worst = 0.0f64;
        for (d, n) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2)] {
            let ev = eigenvalues_int(&build_schreier(d, n)?.dense())?;
            let flat: Vec<f64> = predicted_spectrum_adjacency(d, n)?
                .into_iter()
                .flat_map(|(v, m)| std::iter::repeat_n(v, m as usize))
                .collect();
            worst = ev.iter().zip(&flat).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
        }
        if worst > 1e-8 {
            bail!("deviation {worst:.3e}");
        }
        Ok(format!("deviation {worst:.2e}"))
    })()));

    checks.push(("facet addresses", (|| {
        for (d, n) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)] {
            if !verify_approx(d, n)? {
                bail!("d={d} n={n}");
            }
        }
        Ok("ok".into())
    })()));

    checks.push(("multiplicities", (|| {
        for d in 2..=5 {
            for n in 1..=8 {
                let m = multiplicities(d, n)?;
                let (a, b) = degree_identity(&m)?;
                if m != multiplicities_by_recursion(d, n)? || a != b {
                    bail!("d={d} n={n}");
                }
            }
        }
        Ok("ok".into())
    })()));

    checks.push(("semi-conjugacy", {
        let mut run = || -> Result<String> {
            let mut worst = 0.0f64;
            for d in 2..=4 {
                for _ in 0..200 {
                    let (mu, l) = random_point(&mut rng, d);
                    let scale = f_poly(d, psi(d, mu, l)?).abs().max(1.0);
                    worst = worst.max(semiconjugacy_residual(d, mu, l)? / scale);
                    let (a, b) = renormalize(d, mu, l)?;
                    if let Ok((c, e)) = renormalize_unfactored(d, mu, l) {
                        if (a - c).abs() > 1e-10 * a.abs().max(1.0) || (b - e).abs() > 1e-10 * b.abs().max(1.0) {
                            bail!("factored and unfactored maps disagree at ({mu}, {l})");
                        }
                    }
                    let (x, y) = (det_x0(d, mu, l), det_x0_explicit(d, mu, l));
                    if (x - y).abs() > 1e-9 * x.abs().max(1.0) {
                        bail!("block determinant at ({mu}, {l})");
                    }
                }
            }
            if worst > 1e-9 {
                bail!("residual {worst:.3e}");
            }
            Ok(format!("residual {worst:.2e}"))
        };
        run()
    }));

    checks.push(("determinant recursion", {
        let mut run = || -> Result<String> {
            let mut worst = 0.0f64;
            let mut done = 0;
            while done < 20 {
                let mu: f64 = rng.gen_range(-3.0..3.0);
                if renormalize(2, mu, 1.0).is_err() {
                    continue;
                }
                worst = worst.max(recursion_check(2, 2, mu)?.rel_err);
                done += 1;
            }
            if worst > 1e-6 {
                bail!("relative error {worst:.3e}");
            }
            Ok(format!("relative error {worst:.2e}"))
        };
        run()
    }));

    checks.push(("limit mass", (|| {
        for d in 2..=4 {
            let q = limit_quantile_cd(d, 12)?;
            if q.covered_mass() + q.tail != Ratio::from_integer(1) {
                bail!("d={d}");
            }
        }
        Ok("exact".into())
    })()));

    checks.push(("convergence", (|| {
        let limit = limit_quantile_cd(2, 10)?.normalized;
        let levels = iterate(Kind::Cone, &Complex::simplex(2), 4)?;
        let mut prev = f64::INFINITY;
        let mut last = 0.0;
        for k in &levels[1..] {
            last = l1_distance(&top_quantile(k)?, &limit)?;
            if last > prev + 1e-9 {
                bail!("distance grows");
            }
            prev = last;
        }
        Ok(format!("distance {last:.4} at n=4"))
    })()));

    checks.push(("q ratios", (|| {
        for d in 1..=5usize {
            for kind in [Kind::Cone, Kind::Barycentric] {
                if q_ratio(kind, d)? >= Ratio::from_integer(1) {
                    bail!("{} d={d}", kind.name());
                }
            }
        }
        Ok("all < 1".into())
    })()));

    checks.push(("duality", (|| {
        for (kind, d, k) in [(Kind::Cone, 2, 2), (Kind::Barycentric, 2, 1), (Kind::Edgewise(2), 2, 1)] {
            if !verify_duality(kind, d, k)?.holds() {
                bail!("{} d={d} k={k}", kind.name());
            }
        }
        Ok("ok".into())
    })()));

    checks.push(("perturbation bound", {
        let mut run = || -> Result<String> {
            for _ in 0..100 {
                let n = rng.gen_range(2..=20);
                let mut sym = |scale: f64| {
                    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
                    for i in 0..n {
                        for j in 0..=i {
                            let x = rng.gen_range(-scale..scale);
                            m[(i, j)] = x;
                            m[(j, i)] = x;
                        }
                    }
                    m
                };
                let (l, e) = (sym(3.0), sym(0.5));
                if !wielandt_check(&l, &e)?.holds {
                    bail!("violated at order {n}");
                }
            }
            Ok("ok".into())
        };
        run()
    }));

    let mut all = true;
    for (name, r) in checks {
        match r {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(e) => {
                all = false;
                println!("FAIL  {name}: {e:#}");
            }
        }
    }
    Ok(all)
}

fn run(cli: Cli) -> Result<bool> {
    let tol = cli.tol;
    match cli.command {
        Command::Subdivide { kind, n, input, out } => cmd_subdivide(kind.kind()?, n, &input, &out)?,
        Command::Spectrum { input, dim, out } => {
            let k = read_complex(&input)?;
            let q = quantile(&k, dim.unwrap_or(k.dim()), tol)?;
            emit(out.as_deref(), &q.to_csv())?;
        }
        Command::Schreier { d, n, out, verify_approx } => cmd_schreier(d, n, out.as_deref(), verify_approx)?,
        Command::Predict { d, n, out, verify } => cmd_predict(d, n, out.as_deref(), verify)?,
        Command::Limit { d, depth, out } => cmd_limit(d, depth, out.as_deref())?,
        Command::Converge { kind, d, n, input, depth, out } => {
            let start = match input {
                Some(p) => read_complex(&p)?,
                None => Complex::simplex(d),
            };
            cmd_converge(kind.kind()?, &start, n, depth, tol, out.as_deref())?;
        }
        Command::Fractal { kind, d, k, out, verify } => cmd_fractal(kind.kind()?, d, k, out.as_deref(), verify)?,
        Command::Figures { d, out, depth, samples } => cmd_figures(d, &out, depth, samples)?,
        Command::Selftest { seed } => return selftest(seed),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(BUDGET_ENV) {
        if v.parse::<usize>().is_err() {
            eprintln!("error: {BUDGET_ENV}={v} is not a number");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
