//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use theta_gabor::bargmann::{bergman_density, gram, zero_count_1d, DEFAULT_GRAM_OVERSAMPLING};
use theta_gabor::frames::{scan_subsets, ScanMode};
use theta_gabor::lattice::{lattice_vector, ParamsFile};
use theta_gabor::localization::{
    asymptotic_sweep, restriction_matrix_on_grid, sin_squared_product, RestrictionOptions, SymbolFn,
};
use theta_gabor::quadrature::TorusGrid;
use theta_gabor::theta::{quasi_factor_exponent, theta_eval, theta_eval_at_radius, theta_zero_1d, DEFAULT_THETA_TOL};
use theta_gabor::{
    dgt, dgt_direct, dgt_inverse, dual_lattice_member, periodize_sample, GaborParams, ScaledComplex, Signal,
    WindowSpec, C64,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_signal(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Signal {
    let len = n.pow(d as u32);
    let c = (0..len).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    Signal::new(n, d, c).unwrap()
}

fn two_dim_omega(n: usize) -> GaborParams {
    let file = ParamsFile {
        d: 2,
        n,
        omega_re: vec![vec![0.2, 0.1], vec![0.1, -0.1]],
        omega_im: vec![vec![1.1, 0.3], vec![0.3, 0.9]],
    };
    GaborParams::from_file(&file).unwrap()
}

fn c1_dgt_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst_rt, mut worst_fft) = (0.0_f64, 0.0_f64);
    for (d, n) in [(1, 16), (2, 4)] {
        let params = GaborParams::imaginary_identity(d, n).map_err(e2s)?;
        let g = periodize_sample(&WindowSpec::Gaussian(params)).map_err(e2s)?;
        for _ in 0..5 {
            let f = random_signal(&mut rng, n, d);
            let v = dgt(&f, &g).map_err(e2s)?;
            let back = dgt_inverse(&v, &g).map_err(e2s)?;
            let err: f64 = f.coeffs().iter().zip(back.coeffs()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            worst_rt = worst_rt.max(err / f.norm_sq().sqrt());
            let direct = dgt_direct(&f, &g).map_err(e2s)?;
            let diff: f64 = v.values().iter().zip(direct.values()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            worst_fft = worst_fft.max(diff / v.norm_sq().sqrt());
        }
    }
    ensure(worst_rt <= 1e-10, format!("round trip error {worst_rt:e}"))?;
    ensure(worst_fft <= 1e-12, format!("direct vs fft {worst_fft:e}"))?;
    Ok(format!("round trip {worst_rt:.1e}, direct vs fft {worst_fft:.1e}"))
}

fn c2_discrete_tightness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0_f64;
    for i in 0..20 {
        let (d, n) = if i % 2 == 0 { (1, 16) } else { (2, 4) };
        let f = random_signal(&mut rng, n, d);
        let g = random_signal(&mut rng, n, d);
        let v = dgt(&f, &g).map_err(e2s)?;
        let expect = (n.pow(d as u32) as f64) * f.norm_sq() * g.norm_sq();
        worst = worst.max((v.norm_sq() - expect).abs() / expect);
    }
    ensure(worst <= 1e-10, format!("relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.1e}"))
}

fn c3_moyal() -> Outcome {
    let mut worst = 0.0_f64;
    for n in [2, 4] {
        for re in [0.0, 0.3] {
            let params = GaborParams::one_dim(n, re, 1.0).map_err(e2s)?;
            let grid = TorusGrid::oversampled(n, 1, 8);
            let m = restriction_matrix_on_grid(&SymbolFn::Constant(1.0), &params, &grid).map_err(e2s)?;
            for i in 0..n {
                for j in 0..n {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((m[(i, j)] - target).norm());
                }
            }
        }
    }
    ensure(worst <= 1e-8, format!("max |<Vφ_m, Vφ_n>/‖h‖² - δ_mn| = {worst:e}"))?;
    Ok(format!("max error {worst:.1e} at oversampling 8"))
}

fn c4_quasiperiodicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (mut worst, mut honest_failures) = (0.0_f64, 0);
    for draw in 0..50 {
        let d = 1 + draw % 2;
        let order = 2 + draw % 3;
        let params = if d == 1 { GaborParams::one_dim(3, 0.3, 1.0).unwrap() } else { two_dim_omega(2) };
        let z: Vec<C64> = (0..d).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let k: Vec<i64> = (0..d).map(|_| rng.random_range(-2..=2)).collect();
        let m: Vec<i64> = (0..d).map(|_| rng.random_range(-2..=2)).collect();
        let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        let ok = params.omega_times(&kf);
        let shifted: Vec<C64> = (0..d).map(|i| z[i] + m[i] as f64 + ok[i]).collect();
        let lhs = theta_eval(&shifted, &params, order, DEFAULT_THETA_TOL).map_err(e2s)?;
        let base = theta_eval(&z, &params, order, DEFAULT_THETA_TOL).map_err(e2s)?;
        let rhs = base.value * ScaledComplex::exp(quasi_factor_exponent(&z, &k, &params, order));
        worst = worst.max(lhs.value.diff_relative_to(&rhs, lhs.mass_logmag));

        let r = 1 + draw % 2;
        let short = theta_eval_at_radius(&z, &params, order, r).map_err(e2s)?;
        let long = theta_eval_at_radius(&z, &params, order, r + 4).map_err(e2s)?;
        let observed = short.value.diff_relative_to(&long.value, short.mass_logmag);
        if observed > short.tail_bound * (1.0 + 1e-9) + 1e-14 {
            honest_failures += 1;
        }
    }
    ensure(worst <= 1e-10, format!("quasiperiodicity residual {worst:e}"))?;
    ensure(honest_failures == 0, format!("{honest_failures} draws exceeded their tail bound"))?;
    Ok(format!("max residual {worst:.1e}; tail bounds honest on 50/50 draws"))
}

fn c5_theta_zero() -> Outcome {
    let mut worst = 0.0_f64;
    for (re, im) in [(0.0, 1.0), (0.0, 2.0), (0.3, 1.0)] {
        let params = GaborParams::one_dim(1, re, im).map_err(e2s)?;
        let z0 = theta_zero_1d(&params).map_err(e2s)?.z[0];
        let omega = C64::new(re, im);
        let target = -C64::i() * (omega + 1.0) / 2.0;
        let diff = z0 - target;
        let mem = dual_lattice_member(&[diff], &params, 1.0, 1e-6);
        let lv = lattice_vector(&mem.a, &mem.b, &params)[0];
        worst = worst.max((diff - lv).norm());
    }
    ensure(worst <= 1e-10, format!("distance to -i(1+Ω)/2 mod Λ: {worst:e}"))?;
    Ok(format!("max distance mod lattice {worst:.1e}"))
}

fn c6_gram() -> Outcome {
    let mut notes = Vec::new();
    for (d, n) in [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3)] {
        let params = GaborParams::imaginary_identity(d, n).map_err(e2s)?;
        let g = gram(&params, DEFAULT_GRAM_OVERSAMPLING).map_err(e2s)?;
        ensure(g.rank == params.dim(), format!("(d,N)=({d},{n}): rank {} != {}", g.rank, params.dim()))?;
        ensure(g.offdiag_resid <= 1e-8, format!("(d,N)=({d},{n}): off-diagonal {:e}", g.offdiag_resid))?;
        notes.push(format!("({d},{n}) {:.0e}", g.offdiag_resid));
    }
    Ok(format!("full rank, off-diagonal: {}", notes.join(", ")))
}

fn c7_zero_count() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    for n in [2, 3, 5] {
        let params = GaborParams::one_dim(n, 0.3, 1.0).map_err(e2s)?;
        for _ in 0..10 {
            let phi = random_signal(&mut rng, n, 1);
            let w = zero_count_1d(&phi, &params).map_err(e2s)?;
            ensure((w - n as f64).abs() < 1e-6, format!("N={n}: winding {w}"))?;
            checked += 1;
        }
    }
    Ok(format!("winding = N for {checked} random sections"))
}

fn c8_frame_predicate() -> Outcome {
    let mut notes = Vec::new();
    for n in [2, 3, 4] {
        for re in [0.0, 0.25] {
            let params = GaborParams::one_dim(n, re, 1.0).map_err(e2s)?;
            let start = Instant::now();
            let r = scan_subsets(&params, n, ScanMode::Exhaustive).map_err(e2s)?;
            let secs = start.elapsed().as_secs_f64();
            ensure(r.disagreements.is_empty(), format!("N={n} ReΩ={re}: {} disagreements", r.disagreements.len()))?;
            ensure(r.predicate_applicable == r.total, format!("N={n}: predicate skipped on some subsets"))?;
            if n == 4 {
                ensure(r.total == 1820, format!("N=4 scanned {} subsets", r.total))?;
                ensure(secs < 60.0, format!("N=4 scan took {secs:.1}s"))?;
                notes.push(format!("N=4 ReΩ={re}: {} subsets in {secs:.2}s", r.total));
            }
        }
    }
    Ok(format!("0 disagreements; {}", notes.join("; ")))
}

fn c9_counting() -> Outcome {
    let params = GaborParams::one_dim(6, 0.0, 1.0).map_err(e2s)?;
    let r = scan_subsets(&params, 7, ScanMode::Random { count: 500, seed: 2024 }).map_err(e2s)?;
    ensure(r.oracle_frames == 500, format!("K=N+1: {} of 500 frames", r.oracle_frames))?;
    ensure(r.count_frame_violations == 0, "counting guarantee violated")?;
    let mut non_frames = 0;
    for k in 1..6 {
        let r = scan_subsets(&params, k, ScanMode::Random { count: 200, seed: k as u64 }).map_err(e2s)?;
        ensure(r.oracle_frames == 0 && r.count_no_frame_violations == 0, format!("K={k}: {} frames", r.oracle_frames))?;
        non_frames += r.total;
    }
    let p4 = GaborParams::one_dim(4, 0.25, 1.0).map_err(e2s)?;
    for k in 1..4 {
        let r = scan_subsets(&p4, k, ScanMode::Exhaustive).map_err(e2s)?;
        ensure(r.oracle_frames == 0, format!("N=4 K={k}: {} frames", r.oracle_frames))?;
        non_frames += r.total;
    }
    Ok(format!("500/500 frames at K=N+1; {non_frames} subsets with K<N all non-frames"))
}

fn c10_trace_limit() -> Outcome {
    let template = GaborParams::one_dim(4, 0.0, 1.0).map_err(e2s)?;
    let opts = RestrictionOptions::default();
    let ns = [4, 8, 16, 32];
    let one = asymptotic_sweep(&SymbolFn::Constant(1.0), &ns, &template, &[], &opts, 0.1).map_err(e2s)?;
    for row in &one.rows {
        ensure((row.trace_norm - 1.0).abs() <= 1e-8, format!("a≡1, N={}: T_N = {}", row.n, row.trace_norm))?;
    }
    let sw = asymptotic_sweep(&sin_squared_product(), &ns, &template, &[], &opts, 0.1).map_err(e2s)?;
    let errs: Vec<f64> = sw.rows.iter().map(|r| (r.trace_norm - 0.25).abs()).collect();
    const FLOOR: f64 = 1e-12;
    ensure(errs.windows(2).all(|w| w[1] < w[0] || w[1] <= FLOOR), format!("|T_N - 1/4| not decreasing: {errs:?}"))?;
    ensure(errs[3] < errs[1] || errs[3] <= FLOOR, format!("|T_32 - 1/4| not below |T_8 - 1/4|: {errs:?}"))?;
    ensure(errs[3] <= 0.05, format!("|T_32 - 1/4| = {}", errs[3]))?;
    let shown: Vec<String> = errs.iter().map(|e| format!("{e:.1e}")).collect();
    Ok(format!("|T_N - 1/4| = [{}] for N = {ns:?}; a≡1 exact", shown.join(", ")))
}

fn c11_plunge() -> Outcome {
    let template = GaborParams::one_dim(4, 0.0, 1.0).map_err(e2s)?;
    let symbol = SymbolFn::box_indicator(&[(0.0, 0.5)], &[(0.0, 0.5)]);
    let opts = RestrictionOptions::default();
    let sw = asymptotic_sweep(&symbol, &[8, 16, 32], &template, &[0.5], &opts, 0.1).map_err(e2s)?;
    let eps = theta_gabor::localization::DISCONTINUOUS_TRACE_TOL;
    for row in &sw.rows {
        ensure(
            row.eig_min >= -eps && row.eig_max <= 1.0 + eps,
            format!("N={}: spectrum [{}, {}]", row.n, row.eig_min, row.eig_max),
        )?;
    }
    let plunge: Vec<f64> = sw.rows.iter().map(|r| r.plunge_fraction).collect();
    ensure(plunge.windows(2).all(|w| w[1] < w[0]), format!("plunge fractions {plunge:?}"))?;
    let c32 = sw.rows[2].counts[0].count_norm;
    ensure((c32 - 0.75).abs() <= 0.1, format!("N^-1 N_<0.5 at N=32 = {c32}"))?;
    Ok(format!("C_32(0.5) = {c32:.4}; plunge fractions {plunge:?}"))
}

fn c12_bergman() -> Outcome {
    let mut flat = Vec::new();
    let mut worst = 0.0_f64;
    for n in [2, 4, 8, 16, 32] {
        let params = GaborParams::one_dim(n, 0.0, 1.0).map_err(e2s)?;
        let rep = bergman_density(&TorusGrid::oversampled(n, 1, 4), &params).map_err(e2s)?;
        worst = worst.max((rep.integral - n as f64).abs() / n as f64);
        flat.push((n, rep.flatness));
    }
    ensure(worst <= 1e-8, format!("∫ρ relative error {worst:e}"))?;
    let f8 = flat.iter().find(|p| p.0 == 8).unwrap().1;
    let f32 = flat.iter().find(|p| p.0 == 32).unwrap().1;
    ensure(f32 < f8, format!("flatness N=32 {f32:e} not below N=8 {f8:e}"))?;
    Ok(format!("∫ρ = N to {worst:.1e}; flatness N=8 {f8:.2e}, N=32 {f32:.2e}"))
}

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_theta-gabor"))
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn run_cli(args: &[&str], dir: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(bin()).args(args).current_dir(dir).output().map_err(e2s)?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn c13_cli_determinism() -> Outcome {
    let golden = golden_dir();
    let inputs = golden.join("inputs");
    let runs: [(&str, Vec<&str>); 4] = [
        ("theta_zero.json", vec!["theta", "zero", "--params", "omega_i.json"]),
        ("frame_check.json", vec!["frame", "check", "--params", "n4.json", "--points", "no_frame_quadruple.json"]),
        (
            "asymptotics_sweep.csv",
            vec![
                "asymptotics",
                "sweep",
                "--params",
                "n4.json",
                "--n-list",
                "2,4,8",
                "--symbol",
                "step(0.5 - x1)*step(0.5 - xi1)",
                "--alpha-grid",
                "0.25:0.75:0.25",
                "--format",
                "csv",
            ],
        ),
        (
            "frame_scan.json",
            vec![
                "frame", "scan", "--params", "n4.json", "--k", "4", "--mode", "random", "--count", "300", "--seed", "7",
            ],
        ),
    ];
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, args) in &runs {
        let mut a1 = args.clone();
        a1.extend(["--threads", "2"]);
        let first = run_cli(&a1, &inputs)?;
        let second = run_cli(&a1, &inputs)?;
        ensure(first == second, format!("{name}: two runs differ"))?;
        let mut a4 = args.clone();
        a4.extend(["--threads", "4"]);
        ensure(run_cli(&a4, &inputs)? == first, format!("{name}: output depends on thread count"))?;
        let path = golden.join(name);
        if update {
            std::fs::write(&path, &first).map_err(e2s)?;
        }
        let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(expected == first, format!("{name}: differs from golden file"))?;
    }
    Ok(format!("{} commands byte-identical across runs and thread counts; golden files match", runs.len()))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("DGT round trip", c1_dgt_round_trip),
        ("discrete tightness", c2_discrete_tightness),
        ("continuous Moyal identity", c3_moyal),
        ("theta quasiperiodicity and tail bounds", c4_quasiperiodicity),
        ("theta zero", c5_theta_zero),
        ("section space dimension", c6_gram),
        ("zero count", c7_zero_count),
        ("parity predicate vs SVD oracle", c8_frame_predicate),
        ("counting guarantees", c9_counting),
        ("restriction trace limit", c10_trace_limit),
        ("eigenvalue counting and plunge region", c11_plunge),
        ("Bergman density", c12_bergman),
        ("CLI determinism", c13_cli_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|s| s == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS  criterion {id:>2} {name}: {msg} ({secs:.1}s)"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {id:>2} {name}: {msg} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
