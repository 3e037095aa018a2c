use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use theta_gabor::bargmann::{bergman_density, gram, window_norm_check, DEFAULT_GRAM_OVERSAMPLING};
use theta_gabor::frames::{frame_bounds, scan_subsets, ScanMode, ScanReport};
use theta_gabor::io;
use theta_gabor::localization::{
    asymptotic_sweep, parse_symbol, restriction_matrix, spectrum, RestrictionOptions, SpectrumOptions, SymbolFn,
};
use theta_gabor::quadrature::TorusGrid;
use theta_gabor::theta::{theta_eval, theta_zero_1d_report, DEFAULT_THETA_TOL};
use theta_gabor::{dgt, dgt_inverse, periodize_sample, Error, GaborParams, WindowSpec, C64};

#[derive(Parser, Debug)]
#[command(name = "theta-gabor", version, about = "Gabor analysis on finite tori via theta functions")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads: a positive integer or "auto".
    #[arg(long, global = true, default_value = "auto", value_parser = parse_threads)]
    threads: Threads,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug)]
enum Threads {
    Auto,
    Count(usize),
}

fn parse_threads(s: &str) -> Result<Threads, String> {
    if s == "auto" {
        return Ok(Threads::Auto);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Threads::Count(n)),
        _ => Err(format!("expected a positive integer or \"auto\", got {s:?}")),
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Discrete Gabor transform with the Gaussian window.
    #[command(subcommand)]
    Dgt(DgtCmd),
    /// Theta function evaluation and zero location.
    #[command(subcommand)]
    Theta(ThetaCmd),
    /// Frame bounds and subset scans.
    #[command(subcommand)]
    Frame(FrameCmd),
    /// Bergman density and Gram matrix of the section basis.
    #[command(subcommand)]
    Bergman(BergmanCmd),
    /// Spectra of restriction operators.
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Normalized trace and eigenvalue counts across N.
    #[command(subcommand)]
    Asymptotics(AsymptoticsCmd),
}

#[derive(Args, Debug)]
struct ParamsArg {
    /// JSON file {"d", "N", "omega_re", "omega_im"}.
    #[arg(long)]
    params: PathBuf,
}

#[derive(Subcommand, Debug)]
enum DgtCmd {
    Forward {
        #[command(flatten)]
        p: ParamsArg,
        /// Signal file (JSON [re, im] pairs, or CSV index,re,im if it ends in .csv).
        #[arg(long)]
        signal: PathBuf,
    },
    Inverse {
        #[command(flatten)]
        p: ParamsArg,
        /// Coefficient file (JSON [k][l] pairs, or CSV k,l,re,im if it ends in .csv).
        #[arg(long)]
        coeffs: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum ThetaCmd {
    Eval {
        #[command(flatten)]
        p: ParamsArg,
        /// One complex coordinate per axis as "re,im"; repeat for d > 1.
        #[arg(long = "z", required = true, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Vec<C64>,
        /// Theta order (defaults to N).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_THETA_TOL)]
        tol: f64,
    },
    Zero {
        #[command(flatten)]
        p: ParamsArg,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(Subcommand, Debug)]
enum FrameCmd {
    Check {
        #[command(flatten)]
        p: ParamsArg,
        /// JSON rows [k₁..k_d, l₁..l_d].
        #[arg(long)]
        points: PathBuf,
    },
    Scan {
        /// Parameter file; without it Ω = i·I in dimension 1 is used with --n.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Override N.
        #[arg(long)]
        n: Option<usize>,
        /// Subset size
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum BergmanCmd {
    Density {
        #[command(flatten)]
        p: ParamsArg,
        /// Points per unit time and per 1/N frequency.
        #[arg(long, default_value_t = 4)]
        oversample: usize,
    },
    Gram {
        #[command(flatten)]
        p: ParamsArg,
        #[arg(long, default_value_t = DEFAULT_GRAM_OVERSAMPLING)]
        oversample: usize,
    },
}

#[derive(Args, Debug)]
struct SymbolArgs {
    /// Symbol on [0,1]^{2d} over x1..xd, xi1..xid with + - * /, sin, cos, exp, step.
    #[arg(long, allow_hyphen_values = true)]
    symbol: String,
    /// Counting thresholds as start:stop:step (inclusive).
    #[arg(long = "alpha-grid", value_parser = parse_grid, default_value = "0.5:0.5:1")]
    alpha_grid: AlphaGrid,
    /// Initial quadrature oversampling (doubled until the trace settles).
    #[arg(long, default_value_t = 4)]
    oversample: usize,
    /// Plunge window margin δ.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
}

#[derive(Clone, Debug)]
struct AlphaGrid(Vec<f64>);

fn parse_grid(s: &str) -> Result<AlphaGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>();
    match (parts.len(), nums) {
        (3, Ok(v)) if v[2] > 0.0 && v[1] >= v[0] => {
            let count = ((v[1] - v[0]) / v[2] + 1e-9).floor() as usize + 1;
            Ok(AlphaGrid((0..count).map(|i| v[0] + i as f64 * v[2]).collect()))
        }
        _ => Err(format!("expected start:stop:step with step > 0 and stop ≥ start, got {s:?}")),
    }
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re, im] => match (re.trim().parse::<f64>(), im.trim().parse::<f64>()) {
            (Ok(re), Ok(im)) => Ok(C64::new(re, im)),
            _ => Err(format!("expected re,im, got {s:?}")),
        },
        _ => Err(format!("expected re,im, got {s:?}")),
    }
}

#[derive(Clone, Debug)]
struct NList(Vec<usize>);

fn parse_n_list(s: &str) -> Result<NList, String> {
    s.split(',')
        .map(|p| match p.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("expected comma-separated positive integers, got {s:?}")),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(NList)
}

#[derive(Subcommand, Debug)]
enum SpectrumCmd {
    Restriction {
        #[command(flatten)]
        p: ParamsArg,
        #[command(flatten)]
        s: SymbolArgs,
    },
}

#[derive(Subcommand, Debug)]
enum AsymptoticsCmd {
    Sweep {
        /// Template parameters; Ω is kept and N is taken from --n-list.
        #[command(flatten)]
        p: ParamsArg,
        /// Comma-separated values of N, e.g. 8,16,32
        #[arg(long = "n-list", value_parser = parse_n_list)]
        n_list: NList,
        #[command(flatten)]
        s: SymbolArgs,
    },
}

enum Output {
    Json(Value),
    Text(String),
}

struct Provenance {
    command: &'static str,
    params: Option<GaborParams>,
    seed: Option<u64>,
    diagnostics: Value,
}

fn wrap(result: impl Serialize, prov: Provenance) -> Output {
    let mut obj = match serde_json::to_value(result).expect("result serializes") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert(
        "provenance".into(),
        json!({
            "tool": "theta-gabor",
            "version": env!("CARGO_PKG_VERSION"),
            "command": prov.command,
            "params": prov.params,
            "seed": prov.seed,
            "diagnostics": prov.diagnostics,
        }),
    );
    Output::Json(Value::Object(obj))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn symbol_for(text: &str, d: usize) -> Result<SymbolFn, Error> {
    parse_symbol(text, d)
}

fn csv_float(v: f64) -> String {
    format!("{v:?}")
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let rc = &cli.run;
    match &cli.command {
        Cmd::Dgt(DgtCmd::Forward { p, signal }) => {
            let params = io::load_params(&p.params)?;
            let text = read_text(signal)?;
            let f = if is_csv(signal) {
                io::signal_from_csv(&text, params.n(), params.d())?
            } else {
                io::signal_from_json(&text, params.n(), params.d())?
            };
            let g = periodize_sample(&WindowSpec::Gaussian(params.clone()))?;
            let v = dgt(&f, &g)?;
            Ok(match rc.format {
                Format::Csv => Output::Text(io::coefficients_to_csv(&v)),
                Format::Json => {
                    let values: Value = serde_json::from_str(&io::coefficients_to_json(&v)).expect("valid json");
                    let prov =
                        Provenance { command: "dgt forward", params: Some(params), seed: None, diagnostics: json!({}) };
                    wrap(json!({ "coefficients": values }), prov)
                }
            })
        }
        Cmd::Dgt(DgtCmd::Inverse { p, coeffs }) => {
            let params = io::load_params(&p.params)?;
            let text = read_text(coeffs)?;
            let v = if is_csv(coeffs) {
                io::coefficients_from_csv(&text, params.n(), params.d())?
            } else {
                io::coefficients_from_json(&text, params.n(), params.d())?
            };
            let g = periodize_sample(&WindowSpec::Gaussian(params.clone()))?;
            let f = dgt_inverse(&v, &g)?;
            Ok(match rc.format {
                Format::Csv => Output::Text(io::signal_to_csv(&f)),
                Format::Json => {
                    let values: Value = serde_json::from_str(&io::signal_to_json(&f)).expect("valid json");
                    let prov =
                        Provenance { command: "dgt inverse", params: Some(params), seed: None, diagnostics: json!({}) };
                    wrap(json!({ "signal": values }), prov)
                }
            })
        }
        Cmd::Theta(ThetaCmd::Eval { p, z, order, tol }) => {
            let params = io::load_params(&p.params)?;
            if z.len() != params.d() {
                return Err(Error::InvalidDimension(format!("got {} coordinates for d = {}", z.len(), params.d())));
            }
            let order = order.unwrap_or(params.n());
            let e = theta_eval(z, &params, order, *tol)?;
            let result = json!({
                "value_logmag": e.value.logmag,
                "value_phase": e.value.phase.arg(),
                "radius": e.radius,
                "tail_bound": e.tail_bound,
            });
            let diagnostics = json!({ "order": order, "tol": tol, "mass_logmag": e.mass_logmag });
            Ok(json_or_csv(
                result,
                Provenance { command: "theta eval", params: Some(params), seed: None, diagnostics },
                rc,
            ))
        }
        Cmd::Theta(ThetaCmd::Zero { p }) => {
            let params = io::load_params(&p.params)?;
            let r = theta_zero_1d_report(&params)?;
            let z = r.z0.z[0];
            let result = json!({ "z0_re": z.re, "z0_im": z.im });
            let diagnostics = json!({
                "residual": r.residual,
                "winding": r.winding,
                "attempts": r.attempts,
                "newton_steps": r.newton_steps,
            });
            Ok(json_or_csv(
                result,
                Provenance { command: "theta zero", params: Some(params), seed: None, diagnostics },
                rc,
            ))
        }
        Cmd::Frame(FrameCmd::Check { p, points }) => {
            let params = io::load_params(&p.params)?;
            let pts = io::load_points(points, &params)?;
            let report = frame_bounds(&pts, &WindowSpec::Gaussian(params.clone()), &params)?;
            if rc.format == Format::Csv {
                let mut out = String::from("index,singular_value\n");
                for (i, s) in report.singular_values.iter().enumerate() {
                    out.push_str(&format!("{i},{}\n", csv_float(*s)));
                }
                return Ok(Output::Text(out));
            }
            let diagnostics = json!({ "distinct_samples": pts.distinct });
            Ok(wrap(&report, Provenance { command: "frame check", params: Some(params), seed: None, diagnostics }))
        }
        Cmd::Frame(FrameCmd::Scan { params, n, k, mode, count, seed }) => {
            let mut base = match params {
                Some(path) => io::load_params(path)?,
                None => GaborParams::one_dim(n.unwrap_or(2), 0.0, 1.0)?,
            };
            if let Some(n) = n {
                base = base.with_n(*n)?;
            }
            let scan_mode = match mode {
                Mode::Exhaustive => ScanMode::Exhaustive,
                Mode::Random => ScanMode::Random { count: *count, seed: *seed },
            };
            let report = scan_subsets(&base, *k, scan_mode)?;
            if rc.format == Format::Csv {
                return Ok(Output::Text(disagreements_csv(&report)));
            }
            let seed = matches!(mode, Mode::Random).then_some(*seed);
            Ok(wrap(&report, Provenance { command: "frame scan", params: Some(base), seed, diagnostics: json!({}) }))
        }
        Cmd::Bergman(BergmanCmd::Density { p, oversample }) => {
            let params = io::load_params(&p.params)?;
            let grid = TorusGrid::oversampled(params.n(), params.d(), (*oversample).max(1));
            let rep = bergman_density(&grid, &params)?;
            if rc.format == Format::Csv {
                return Ok(Output::Text(density_csv(&rep.values, &grid)));
            }
            let result = json!({
                "integral": rep.integral,
                "min": rep.min,
                "max": rep.max,
                "mean": rep.mean,
                "flatness": rep.flatness,
            });
            let norm = window_norm_check(&params)?;
            let diagnostics = json!({ "grid": grid, "window_norm": norm });
            Ok(wrap(result, Provenance { command: "bergman density", params: Some(params), seed: None, diagnostics }))
        }
        Cmd::Bergman(BergmanCmd::Gram { p, oversample }) => {
            let params = io::load_params(&p.params)?;
            let rep = gram(&params, (*oversample).max(1))?;
            let diagnostics = json!({ "oversampling": rep.oversampling, "change": rep.change });
            Ok(json_or_csv(
                &rep,
                Provenance { command: "bergman gram", params: Some(params), seed: None, diagnostics },
                rc,
            ))
        }
        Cmd::Spectrum(SpectrumCmd::Restriction { p, s }) => {
            let params = io::load_params(&p.params)?;
            let symbol = symbol_for(&s.symbol, params.d())?;
            let opts = RestrictionOptions { oversampling: s.oversample.max(1), ..RestrictionOptions::default() };
            let r = restriction_matrix(&symbol, &params, &opts)?;
            let (_, sup) = symbol.range(params.d());
            let sopts = SpectrumOptions {
                alpha_grid: s.alpha_grid.0.clone(),
                plunge_delta: s.delta,
                max_symbol: sup,
                ..Default::default()
            };
            let rep = spectrum(&r.matrix, &sopts)?;
            if rc.format == Format::Csv {
                let mut out = String::from("index,eigenvalue\n");
                for (i, l) in rep.eigenvalues.iter().enumerate() {
                    out.push_str(&format!("{i},{}\n", csv_float(*l)));
                }
                return Ok(Output::Text(out));
            }
            let diagnostics = json!({
                "symbol": s.symbol,
                "grid": r.grid,
                "trace_change": r.trace_change,
                "trace_tol": r.trace_tol,
                "asymmetry": r.asymmetry,
            });
            Ok(wrap(
                &rep,
                Provenance { command: "spectrum restriction", params: Some(params), seed: None, diagnostics },
            ))
        }
        Cmd::Asymptotics(AsymptoticsCmd::Sweep { p, n_list, s }) => {
            let template = io::load_params(&p.params)?;
            let symbol = symbol_for(&s.symbol, template.d())?;
            let opts = RestrictionOptions { oversampling: s.oversample.max(1), ..RestrictionOptions::default() };
            let rep = asymptotic_sweep(&symbol, &n_list.0, &template, &s.alpha_grid.0, &opts, s.delta)?;
            if rc.format == Format::Csv {
                let mut out =
                    String::from("N,trace_norm,target_integral,alpha,count_norm,target_volume,plunge_fraction\n");
                for row in &rep.rows {
                    for c in &row.counts {
                        out.push_str(&format!(
                            "{},{},{},{},{},{},{}\n",
                            row.n,
                            csv_float(row.trace_norm),
                            csv_float(row.target_integral),
                            csv_float(c.alpha),
                            csv_float(c.count_norm),
                            csv_float(c.target_volume),
                            csv_float(row.plunge_fraction)
                        ));
                    }
                }
                return Ok(Output::Text(out));
            }
            let diagnostics = json!({ "symbol": s.symbol, "oversampling": s.oversample });
            Ok(wrap(&rep, Provenance { command: "asymptotics sweep", params: Some(template), seed: None, diagnostics }))
        }
    }
}

fn json_or_csv(result: impl Serialize, prov: Provenance, rc: &RunConfig) -> Output {
    if rc.format == Format::Csv {
        let v = serde_json::to_value(&result).expect("result serializes");
        if let Value::Object(m) = v {
            let scalars: Vec<(&String, &Value)> = m.iter().filter(|(_, v)| !v.is_array() && !v.is_object()).collect();
            let header: Vec<&str> = scalars.iter().map(|(k, _)| k.as_str()).collect();
            let row: Vec<String> = scalars
                .iter()
                .map(|(_, v)| match v.as_f64() {
                    Some(f) if !v.is_u64() && !v.is_i64() => csv_float(f),
                    _ => v.to_string(),
                })
                .collect();
            return Output::Text(format!("{}\n{}\n", header.join(","), row.join(",")));
        }
    }
    wrap(result, prov)
}

fn disagreements_csv(r: &ScanReport) -> String {
    let mut out = String::from("samples,oracle_frame,predicate_frame,sigma_min_rel\n");
    for d in &r.disagreements {
        let s: Vec<String> = d
            .samples
            .iter()
            .map(|s| {
                let k: Vec<String> = s.k.iter().map(|v| v.to_string()).collect();
                let l: Vec<String> = s.l.iter().map(|v| v.to_string()).collect();
                format!("{}:{}", k.join(" "), l.join(" "))
            })
            .collect();
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.join(";"),
            d.oracle_frame,
            d.predicate_frame,
            csv_float(d.sigma_min_rel)
        ));
    }
    out
}

fn density_csv(values: &[f64], grid: &TorusGrid) -> String {
    let d = grid.d;
    let mut out = if d == 1 {
        String::from("x,xi,rho\n")
    } else {
        let xs: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        let xis: Vec<String> = (1..=d).map(|i| format!("xi{i}")).collect();
        format!("{},{},rho\n", xs.join(","), xis.join(","))
    };
    let mut x = vec![0.0; d];
    let mut xi = vec![0.0; d];
    for (p, r) in values.iter().enumerate() {
        grid.point(p, &mut x, &mut xi);
        for v in x.iter().chain(&xi) {
            out.push_str(&csv_float(*v));
            out.push(',');
        }
        out.push_str(&csv_float(*r));
        out.push('\n');
    }
    out
}

fn emit(output: Output, out: Option<&Path>) -> std::io::Result<()> {
    let text = match output {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("json serializes");
            s.push('\n');
            s
        }
        Output::Text(s) => s,
    };
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Threads::Count(n) = cli.run.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(output) => match emit(output, cli.run.out.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
