use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use vbent::entanglement::{curve, report_pairs_with, CurveKind, EntanglementReport};
use vbent::error::Error;
use vbent::families::Family;
use vbent::homogenizer::{solve_exact, state_set_rank, verify_maximal_with, MaximalityCertificate, Route, Tolerances};
use vbent::io::{certificate_to_string, read_state, state_to_string};
use vbent::models::{spectrum, HamiltonianSpec, Model};
use vbent::state::PureState;
use vbent::torus::{torus_search_with, TorusOptions};
use vbent::vb::{enumerate_rumer, vb_state, Matching, Orientation};

#[derive(Parser, Debug)]
#[command(name = "vbent", version, about = "Valence-bond states and maximal pair entanglement")]
struct Cli {
    /// Output format [default: csv for curve, json otherwise].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Override a certificate threshold, e.g. homogeneity=1e-8. Repeatable.
    #[arg(long = "tolerance", global = true, value_name = "KEY=VALUE")]
    tolerances: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the non-crossing singlet coverings of n sites.
    Rumer {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// Emit a named maximal state or a valence-bond product.
    State {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "matching", required_unless_present = "matching")]
        family: Option<String>,
        /// Matching JSON file {"n", "pairs"}.
        #[arg(long)]
        matching: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OrientationArg::Ascending)]
        orientation: OrientationArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pair correlations, entanglement and certificate of a state file.
    Measure {
        #[arg(long)]
        state: PathBuf,
        /// "all" or "i,j".
        #[arg(long, default_value = "all")]
        pairs: String,
    },
    /// Construct maximal states.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, value_enum, default_value_t = RouteArg::HomogenizeIsotropic)]
        route: RouteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        /// Directory for state_K.json and certificate_K.json files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Sector spectrum of a Heisenberg model.
    Spectrum {
        #[arg(long, value_enum, default_value_t = ModelArg::Iirhm)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        jstar: f64,
    },
    /// Maximal e2v or i-concurrence against n, as CSV.
    Curve {
        #[arg(long, value_enum)]
        what: What,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrientationArg {
    Ascending,
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Torus,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RouteArg {
    HomogenizeIsotropic,
    IsotropizeHomogeneous,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Iirhm,
    Ring,
    Chain,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum What {
    E2vmax,
    Iconc,
}

/// Failure with its exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Search(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Search(_) => 4,
            Failure::Internal(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Search(m) | Failure::Internal(m) => m,
        }
    }
}

/// Errors raised while validating arguments.
fn usage(e: Error) -> Failure {
    match e {
        Error::Internal(_) | Error::NotHermitian { .. } => Failure::Internal(e.to_string()),
        _ => Failure::Usage(e.to_string()),
    }
}

/// Errors raised while reading user files.
fn input(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn internal(e: Error) -> Failure {
    Failure::Internal(e.to_string())
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let mut tol = Tolerances::default();
    for kv in &cli.tolerances {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--tolerance expects KEY=VALUE, got '{kv}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("--tolerance {k}: '{v}' is not a number")))?;
        tol.set(k.trim(), v).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let fmt = match (&cli.command, cli.format) {
        (_, Some(f)) => f,
        (Command::Curve { .. }, None) => Format::Csv,
        (_, None) => Format::Json,
    };
    match cli.command {
        Command::Rumer { n, count_only } => cmd_rumer(fmt, n, count_only),
        Command::State {
            n,
            family,
            matching,
            orientation,
            out,
        } => cmd_state(fmt, n, family, matching, orientation, out),
        Command::Measure { state, pairs } => cmd_measure(fmt, &tol, &state, &pairs),
        Command::Solve {
            n,
            method,
            route,
            seed,
            restarts,
            out_dir,
        } => cmd_solve(fmt, &tol, n, method, route, seed, restarts, out_dir),
        Command::Spectrum { model, n, jstar } => cmd_spectrum(fmt, model, n, jstar),
        Command::Curve { what, n_max, out } => cmd_curve(fmt, what, n_max, out),
    }
}

fn emit(text: &str) -> Outcome {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
        .map_err(|e| Failure::Input(format!("stdout: {e}")))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable output")
}

fn write_file(path: &Path, text: &str) -> Outcome {
    let text = if text.ends_with('\n') { text.to_string() } else { format!("{text}\n") };
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn cmd_rumer(fmt: Format, n: usize, count_only: bool) -> Outcome {
    if n.is_multiple_of(2) && !(4..=vbent::basis::MAX_SITES).contains(&n) {
        return Err(Failure::Usage(format!(
            "n = {n} outside the supported range 4..={}",
            vbent::basis::MAX_SITES
        )));
    }
    let list = enumerate_rumer(n).map_err(usage)?;
    match (fmt, count_only) {
        (Format::Json, true) => emit(&to_json(&json!({ "n": n, "count": list.len() }))),
        (_, true) => emit(&list.len().to_string()),
        (Format::Json, false) => emit(&to_json(&json!({ "n": n, "count": list.len(), "matchings": list }))),
        (Format::Pretty, false) => {
            let lines: Vec<String> = list.iter().enumerate().map(|(k, m)| format!("{:>3}  {m}", k + 1)).collect();
            emit(&lines.join("\n"))
        }
        (Format::Csv, false) => {
            let mut s = String::from("index,pairs\n");
            for (k, m) in list.iter().enumerate() {
                let pairs: Vec<String> = m.pairs().iter().map(|(a, b)| format!("{a}-{b}")).collect();
                s += &format!("{},{}\n", k + 1, pairs.join(" "));
            }
            emit(&s)
        }
    }
}

fn render_state(fmt: Format, state: &PureState) -> String {
    let rows = || {
        state
            .basis()
            .states()
            .iter()
            .zip(state.amplitudes())
            .filter(|(_, a)| a.norm() > vbent::state::ZERO_AMPLITUDE)
            .map(|(&c, a)| (vbent::basis::config_to_string(c, state.n()), *a))
    };
    let phase = |a: num_complex::Complex64| {
        let p = a.arg() / std::f64::consts::PI;
        // -1 and +1 are the same phase; print +1.
        if p <= -1.0 + 1e-12 { 1.0 } else { p }
    };
    match fmt {
        Format::Json => state_to_string(state),
        Format::Pretty => {
            let mut s = format!("n = {}, {} nonzero amplitudes\n", state.n(), rows().count());
            for (bits, a) in rows() {
                s += &format!("{bits}  {:.6}  {:+.6}\n", a.norm(), phase(a));
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("bits,re,im,magnitude,phase_over_pi\n");
            for (bits, a) in rows() {
                s += &format!("{bits},{:.12},{:.12},{:.12},{:.12}\n", a.re, a.im, a.norm(), phase(a));
            }
            s
        }
    }
}

fn cmd_state(
    fmt: Format,
    n: usize,
    family: Option<String>,
    matching: Option<PathBuf>,
    orientation: OrientationArg,
    out: Option<PathBuf>,
) -> Outcome {
    let state = if let Some(name) = family {
        let f: Family = name.parse().map_err(usage)?;
        if f.n() != n {
            return Err(Failure::Usage(format!("family {} is defined for n = {}, not {n}", f.name(), f.n())));
        }
        f.state().map_err(internal)?
    } else {
        let path = matching.expect("clap requires --family or --matching");
        let file = File::open(&path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let m: Matching = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Failure::Input(format!("{}: matching JSON: {e}", path.display())))?;
        if m.n() != n {
            return Err(Failure::Usage(format!("matching has n = {}, but --n is {n}", m.n())));
        }
        let o = match orientation {
            OrientationArg::Ascending => Orientation::Ascending,
            OrientationArg::Cyclic => Orientation::Cyclic,
        };
        vb_state(&m, o).map_err(input(&path))?.normalized().gauge_fixed()
    };
    let text = render_state(fmt, &state);
    match out {
        Some(p) => write_file(&p, &text),
        None => emit(&text),
    }
}

fn parse_pairs(spec: &str, n: usize) -> Result<Vec<(usize, usize)>, Failure> {
    if spec == "all" {
        return Ok((1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect());
    }
    let bad = || Failure::Usage(format!("--pairs expects 'all' or 'i,j', got '{spec}'"));
    let (a, b) = spec.split_once(',').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(Failure::Usage(format!("pair ({i},{j}) invalid for n = {n}")));
    }
    Ok(vec![(i.min(j), i.max(j))])
}

#[derive(Serialize)]
struct MeasureOutput {
    report: EntanglementReport,
    certificate: MaximalityCertificate,
}

fn cmd_measure(fmt: Format, tol: &Tolerances, path: &Path, pairs: &str) -> Outcome {
    let file = File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let state = read_state(BufReader::new(file)).map_err(input(path))?;
    let pairs = parse_pairs(pairs, state.n())?;
    let report = report_pairs_with(&state, &pairs, tol).map_err(internal)?;
    let certificate = verify_maximal_with(&state, tol);
    match fmt {
        Format::Json => emit(&to_json(&MeasureOutput { report, certificate })),
        Format::Csv => {
            let mut s = String::from("i,j,szsz,sdots,entropy,purity,iconc_term,wootters,werner_p\n");
            for p in &report.pairs {
                let w = p.werner_p.map_or(String::new(), |w| format!("{w:.12}"));
                s += &format!(
                    "{},{},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{w}\n",
                    p.sites.0, p.sites.1, p.szsz, p.sdots, p.entropy, p.purity, p.iconc_term, p.wootters
                );
            }
            emit(&s)
        }
        Format::Pretty => {
            let mut s = format!("n = {}\n", report.n);
            s += " pair    <SzSz>     entropy   wootters  werner_p\n";
            for p in &report.pairs {
                let w = p.werner_p.map_or("-".to_string(), |w| format!("{w:.6}"));
                s += &format!(
                    "{:>2},{:<2} {:+.6}  {:.6}  {:.6}  {w}\n",
                    p.sites.0, p.sites.1, p.szsz, p.entropy, p.wootters
                );
            }
            s += &format!("e2v      {:.6}\n", report.e2v);
            if let Some(m) = report.e2v_max {
                s += &format!("e2v_max  {m:.6}\n");
            }
            s += &format!("ic       {:.6}\n", report.ic);
            let f = &certificate.flags;
            s += &format!(
                "isotropic {}  homogeneous {}  flip_parity {}  e2v_equals_max {}  certified {}\n",
                f.is_isotropic,
                f.is_homogeneous,
                f.flip_parity_ok,
                f.e2v_equals_max,
                certificate.is_valid()
            );
            emit(&s)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    fmt: Format,
    tol: &Tolerances,
    n: usize,
    method: Method,
    route: RouteArg,
    seed: u64,
    restarts: usize,
    out_dir: Option<PathBuf>,
) -> Outcome {
    let (states, certificates, extra) = match method {
        Method::Exact => {
            if n != 4 && n != 6 {
                return Err(Failure::Usage(format!("the exact method supports n = 4 or 6, not {n}")));
            }
            let route = match route {
                RouteArg::HomogenizeIsotropic => Route::HomogenizeIsotropic,
                RouteArg::IsotropizeHomogeneous => Route::IsotropizeHomogeneous,
            };
            let found = solve_exact(n, route, seed).map_err(|e| match e {
                Error::NoSolution => Failure::Search(e.to_string()),
                e => internal(e),
            })?;
            let mut states = Vec::new();
            let mut certs = Vec::new();
            for s in found {
                let c = verify_maximal_with(&s, tol);
                if c.is_valid() {
                    states.push(s);
                    certs.push(c);
                }
            }
            (states, certs, json!({ "route": route }))
        }
        Method::Torus => {
            if restarts == 0 {
                return Err(Failure::Usage("--restarts must be positive".into()));
            }
            let opts = TorusOptions {
                tolerances: *tol,
                ..TorusOptions::new(seed, restarts)
            };
            let outcome = torus_search_with(n, &opts).map_err(usage)?;
            (outcome.states, outcome.certificates, json!({ "torus": outcome.summary }))
        }
    };
    let rank = state_set_rank(&states);
    let e2v_max = vbent::entanglement::e2v_max(n).map_err(usage)?;
    let mut files = Vec::new();
    if let Some(dir) = &out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
        for (k, (s, c)) in states.iter().zip(&certificates).enumerate() {
            let sp = dir.join(format!("state_{}.json", k + 1));
            let cp = dir.join(format!("certificate_{}.json", k + 1));
            write_file(&sp, &state_to_string(s))?;
            write_file(&cp, &certificate_to_string(c))?;
            files.push(sp.display().to_string());
        }
    }
    let summary = json!({
        "n": n,
        "method": match method { Method::Exact => "exact", Method::Torus => "torus" },
        "seed": seed,
        "count": states.len(),
        "rank": rank,
        "e2v_max": e2v_max,
        "e2v": certificates.iter().map(|c| c.e2v).collect::<Vec<_>>(),
        "details": extra,
        "files": files,
    });
    match fmt {
        Format::Json => emit(&to_json(&summary))?,
        Format::Pretty | Format::Csv => {
            let mut s = format!("n = {n}: {} certified states, rank {rank}, e2v_max {e2v_max:.9}\n", states.len());
            if let Some(t) = summary["details"].get("torus") {
                s += &format!(
                    "torus: {} of {} runs at the maximum, {} certified, best e2v {}, best spread {:e}\n",
                    t["runs_at_max"], t["restarts"], t["certified_runs"], t["best_e2v"],
                    t["best_spread"].as_f64().unwrap_or(f64::NAN)
                );
            }
            for (k, st) in states.iter().enumerate() {
                s += &format!("--- state {}\n{}", k + 1, render_state(Format::Pretty, st));
            }
            emit(&s)?;
        }
    }
    if states.is_empty() {
        return Err(Failure::Search(format!("no certified state found for n = {n}")));
    }
    Ok(())
}

/// Prints values below 1e-12 in magnitude as 0.
fn snap(x: f64) -> f64 {
    if x.abs() < 1e-12 { 0.0 } else { x }
}

fn cmd_spectrum(fmt: Format, model: ModelArg, n: usize, jstar: f64) -> Outcome {
    let model = match model {
        ModelArg::Iirhm => Model::Iirhm,
        ModelArg::Ring => Model::Ring,
        ModelArg::Chain => Model::Chain,
    };
    let spec = HamiltonianSpec::new(n, model, jstar).map_err(usage)?;
    let rep = spectrum(&spec).map_err(internal)?;
    match fmt {
        Format::Json => emit(&to_json(&rep)),
        Format::Csv => {
            let mut s = String::from("energy,multiplicity,s_t\n");
            for l in &rep.levels {
                s += &format!("{:.12},{},{}\n", snap(l.energy), l.multiplicity, l.s_t);
            }
            emit(&s)
        }
        Format::Pretty => {
            let mut s = format!("{:?} n = {} J* = {}\n      energy  mult  S\n", rep.model, rep.n, rep.j_star);
            for l in &rep.levels {
                s += &format!("{:>12.6}  {:>4}  {}\n", snap(l.energy), l.multiplicity, l.s_t);
            }
            s += &format!("ground energy {:.12}, degeneracy {}\n", rep.ground_energy, rep.ground_degeneracy);
            emit(&s)
        }
    }
}

fn cmd_curve(fmt: Format, what: What, n_max: usize, out: Option<PathBuf>) -> Outcome {
    let (kind, name) = match what {
        What::E2vmax => (CurveKind::E2vMax, "e2v_max"),
        What::Iconc => (CurveKind::IcMax, "ic_max"),
    };
    let rows = curve(kind, n_max).map_err(usage)?;
    let text = if fmt == Format::Json {
        to_json(&rows)
    } else {
        let mut s = format!("n,{name},ratio\n");
        for r in &rows {
            s += &format!("{},{:.9},{:.9}\n", r.n, r.value, r.ratio);
        }
        s
    };
    match out {
        Some(p) => write_file(&p, &text),
        None => emit(&text),
    }
}
