//! Command-line front end for the `rabi-stark` solvers.  Each subcommand
//! wraps one library module and emits a self-describing table: CSV with a
//! `#`-prefixed metadata header, or a JSON mirror of the same structure.
//!
//! Output is deterministic — identical configurations produce byte-identical
//! artifacts regardless of worker-thread count (set `RAYON_NUM_THREADS` to
//! bound parallelism).  Exit codes: 0 success, 1 usage error, 2 invalid
//! parameters / unsupported regime / I/O failure, 3 validation failure.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rabi_stark::spectrum::{LevelKind, LevelParity, ModelFamily};
use rabi_stark::{collapse, ed, gfunction, roots, spectrum, validation};
use rabi_stark::{Error, ModelParams, Parity, SolverConfig};

use render::{sig15, Document, Value};

#[derive(Parser)]
#[command(
    name = "rabi-stark",
    version,
    about = "Spectra of a two-level system with linear and nonlinear (Stark) cavity coupling",
    after_help = "Worker threads follow RAYON_NUM_THREADS; identical configurations \
                  produce byte-identical output regardless of thread count.\n\
                  Exit codes: 0 success, 1 usage error, 2 invalid parameters or I/O \
                  failure, 3 validation failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Two-level splitting Delta (> 0), in the same units as omega.
    #[arg(long, allow_negative_numbers = true)]
    delta: f64,
    /// Mode frequency omega; sets the energy unit of the output.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Nonlinear Stark coupling U (series solvers need |U| < 2*omega).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    u: f64,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write to this file instead of stdout.  `gcurve` additionally writes
    /// a `<stem>.poles.json` sidecar next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
    Both,
}

impl ParityArg {
    fn as_str(self) -> &'static str {
        match self {
            ParityArg::Even => "even",
            ParityArg::Odd => "odd",
            ParityArg::Both => "both",
        }
    }

    fn sectors(self) -> &'static [Parity] {
        match self {
            ParityArg::Even => &[Parity::Even],
            ParityArg::Odd => &[Parity::Odd],
            ParityArg::Both => &[Parity::Even, Parity::Odd],
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GridArg {
    Standard,
    Quick,
}

#[derive(Subcommand)]
enum Command {
    /// Sample both parity G-functions over an energy window
    Gcurve {
        #[command(flatten)]
        model: ModelArgs,
        /// Dipole coupling g (>= 0).
        #[arg(long)]
        g: f64,
        /// Window lower edge.
        #[arg(long, allow_negative_numbers = true)]
        emin: f64,
        /// Window upper edge.
        #[arg(long, allow_negative_numbers = true)]
        emax: f64,
        /// Number of samples across the window.
        #[arg(long, default_value_t = 400)]
        esteps: usize,
        /// Series tail tolerance override.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep the spectrum over a coupling grid, with crossing and
    /// exceptional points of every pole curve entering the window
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Coupling grid lower edge.
        #[arg(long, default_value_t = 0.0)]
        gmin: f64,
        /// Coupling grid upper edge.
        #[arg(long)]
        gmax: f64,
        /// Number of grid points.
        #[arg(long, default_value_t = 60)]
        gsteps: usize,
        /// Energy window lower edge.
        #[arg(long, allow_negative_numbers = true)]
        emin: f64,
        /// Energy window upper edge.
        #[arg(long, allow_negative_numbers = true)]
        emax: f64,
        /// Root-scan samples per inter-pole segment.
        #[arg(long, default_value_t = 64)]
        per_segment: usize,
        /// Series tail tolerance override.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Locate exceptional solutions: eigenvalues sitting exactly on a pole
    /// of the G-function without a degenerate partner
    Exceptional {
        #[command(flatten)]
        model: ModelArgs,
        /// Smallest pole index to scan.
        #[arg(long, default_value_t = 0)]
        mmin: usize,
        /// Largest pole index to scan.
        #[arg(long, default_value_t = 3)]
        mmax: usize,
        /// Parity sector(s) to scan.
        #[arg(long, value_enum, default_value_t = ParityArg::Both)]
        parity: ParityArg,
        /// Coupling scan lower edge.
        #[arg(long, default_value_t = 0.01)]
        gmin: f64,
        /// Coupling scan upper edge.
        #[arg(long)]
        gmax: f64,
        /// Coupling scan sample count.
        #[arg(long, default_value_t = 512)]
        gsteps: usize,
        /// Series tail tolerance override.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve the analytic level branches on the spectral-collapse line
    /// |U| = 2*omega
    Collapse {
        /// Two-level splitting Delta (> 0).
        #[arg(long)]
        delta: f64,
        /// Mode frequency omega.
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Stark coupling; must satisfy |U| = 2*omega (default 2*omega).
        #[arg(long, allow_negative_numbers = true)]
        u: Option<f64>,
        /// Dipole coupling g (>= 0).
        #[arg(long)]
        g: f64,
        /// Trapped-branch levels to solve for.
        #[arg(long, default_value_t = 20)]
        levels: usize,
        /// Upper-branch levels to solve for.
        #[arg(long, default_value_t = 3)]
        upper: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Diagonalize the truncated Hamiltonian (the cross-check method)
    Ed {
        #[command(flatten)]
        model: ModelArgs,
        /// Dipole coupling g (>= 0).
        #[arg(long)]
        g: f64,
        /// Fock-space truncation: occupations 0..=NTR are kept.
        #[arg(long, default_value_t = 200)]
        ntr: usize,
        /// Number of lowest levels to report.
        #[arg(long, default_value_t = 16)]
        count: usize,
        /// Parity sector(s) to report.
        #[arg(long, value_enum, default_value_t = ParityArg::Both)]
        parity: ParityArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cross-check the solvers against diagonalization and closed forms
    Validate {
        /// Which check grid to run: the full standard suite or a quick
        /// smoke subset.
        #[arg(long, value_enum, default_value_t = GridArg::Standard)]
        grid: GridArg,
        /// Series tail tolerance override.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

enum Failure {
    Usage(String),
    Solver(Error),
    Io(std::io::Error),
    Validation(usize),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Solver(_) | Failure::Io(_) => 2,
            Failure::Validation(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Solver(e) => e.to_string(),
            Failure::Io(e) => format!("i/o error: {e}"),
            Failure::Validation(n) => format!("{n} validation check(s) failed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version surface here as non-error output.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gcurve {
            model,
            g,
            emin,
            emax,
            esteps,
            tol,
            output,
        } => cmd_gcurve(model, g, emin, emax, esteps, tol, output),
        Command::Spectrum {
            model,
            gmin,
            gmax,
            gsteps,
            emin,
            emax,
            per_segment,
            tol,
            output,
        } => cmd_spectrum(model, gmin, gmax, gsteps, emin, emax, per_segment, tol, output),
        Command::Exceptional {
            model,
            mmin,
            mmax,
            parity,
            gmin,
            gmax,
            gsteps,
            tol,
            output,
        } => cmd_exceptional(model, mmin, mmax, parity, gmin, gmax, gsteps, tol, output),
        Command::Collapse {
            delta,
            omega,
            u,
            g,
            levels,
            upper,
            output,
        } => cmd_collapse(delta, omega, u, g, levels, upper, output),
        Command::Ed {
            model,
            g,
            ntr,
            count,
            parity,
            output,
        } => cmd_ed(model, g, ntr, count, parity, output),
        Command::Validate { grid, tol, output } => cmd_validate(grid, tol, output),
    }
}

fn solver_config(tol: Option<f64>) -> Result<SolverConfig, Failure> {
    let mut cfg = SolverConfig::default();
    if let Some(t) = tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(Failure::Usage(format!(
                "--tol must lie in (0, 1), got {t}"
            )));
        }
        cfg.series_tol = t;
    }
    Ok(cfg)
}

fn emit(doc: &Document, output: &OutputArgs) -> Result<(), Failure> {
    let text = match output.format {
        FormatArg::Csv => doc.render_csv(),
        FormatArg::Json => doc.render_json(),
    };
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("poles.json")
}

fn push_model_meta(doc: &mut Document, delta: f64, omega: f64, u: f64) {
    doc.meta_float("delta", delta);
    doc.meta_float("omega", omega);
    doc.meta_float("u", u);
}

fn parity_name(p: LevelParity) -> &'static str {
    match p {
        LevelParity::Even => "even",
        LevelParity::Odd => "odd",
        LevelParity::Degenerate => "degenerate",
    }
}

fn kind_name(k: LevelKind) -> &'static str {
    match k {
        LevelKind::Regular => "regular",
        LevelKind::Juddian => "juddian",
        LevelKind::ExceptionalNondegenerate => "exceptional_nondegenerate",
        LevelKind::CollapseBranch => "collapse_branch",
    }
}

fn cmd_gcurve(
    model: ModelArgs,
    g: f64,
    emin: f64,
    emax: f64,
    esteps: usize,
    tol: Option<f64>,
    output: OutputArgs,
) -> Result<(), Failure> {
    let cfg = solver_config(tol)?;
    let params = ModelParams::displaced(model.delta, model.omega, model.u, g)?;
    let mut doc = Document::new("gcurve", vec!["E", "G_plus", "G_minus", "is_break"]);
    push_model_meta(&mut doc, model.delta, model.omega, model.u);
    doc.meta_float("g", g);
    doc.meta_float("emin", emin);
    doc.meta_float("emax", emax);
    doc.meta("esteps", esteps.to_string());
    doc.meta_float("series_tol", cfg.series_tol);

    // An empty or inverted window is an empty (header-only) table, not an
    // error: grid drivers rely on that.
    if emin < emax && esteps >= 2 {
        let curve = gfunction::curve(&params, emin, emax, esteps, &cfg)?;
        doc.meta("pole_zeroth", sig15(curve.poles.zeroth));
        let ladder: Vec<String> = curve.poles.ladder.iter().map(|&p| sig15(p)).collect();
        doc.meta("pole_ladder", ladder.join(" "));
        for pt in &curve.points {
            doc.row(vec![
                Value::Float(pt.energy),
                pt.even.map_or(Value::Empty, Value::Float),
                pt.odd.map_or(Value::Empty, Value::Float),
                Value::Int(i64::from(pt.is_break)),
            ]);
        }
        if let Some(path) = &output.out {
            let mut text =
                serde_json::to_string_pretty(&curve.poles).expect("pole set serializes");
            text.push('\n');
            std::fs::write(sidecar_path(path), text)?;
        }
    }
    emit(&doc, &output)
}

#[allow(clippy::too_many_arguments)]
fn cmd_spectrum(
    model: ModelArgs,
    gmin: f64,
    gmax: f64,
    gsteps: usize,
    emin: f64,
    emax: f64,
    per_segment: usize,
    tol: Option<f64>,
    output: OutputArgs,
) -> Result<(), Failure> {
    let cfg = solver_config(tol)?;
    let fam = ModelFamily::new(model.delta, model.omega, model.u)?;
    let mut doc = Document::new("spectrum", vec!["g", "E", "parity", "kind", "pole_index"]);
    push_model_meta(&mut doc, model.delta, model.omega, model.u);
    doc.meta_float("gmin", gmin);
    doc.meta_float("gmax", gmax);
    doc.meta("gsteps", gsteps.to_string());
    doc.meta_float("emin", emin);
    doc.meta_float("emax", emax);
    doc.meta("per_segment", per_segment.to_string());
    doc.meta_float("series_tol", cfg.series_tol);

    if emin < emax && gsteps >= 1 && gmin <= gmax {
        let grid = if gsteps == 1 {
            vec![gmin]
        } else {
            roots::linspace(gmin, gmax, gsteps)
        };
        let sweep = spectrum::sweep(&fam, &grid, emin, emax, per_segment, &cfg)?;
        for scan in &sweep.scans {
            for level in &scan.levels {
                doc.row(vec![
                    Value::Float(level.g),
                    Value::Float(level.energy),
                    Value::Text(parity_name(level.parity).into()),
                    Value::Text(kind_name(level.kind).into()),
                    level
                        .pole_index
                        .map_or(Value::Empty, |n| Value::Int(n as i64)),
                ]);
            }
        }
        for c in &sweep.crossings {
            doc.row(vec![
                Value::Float(c.g),
                Value::Float(c.energy),
                Value::Text("degenerate".into()),
                Value::Text("juddian".into()),
                Value::Int(c.pole_index as i64),
            ]);
        }
        for x in &sweep.exceptional {
            doc.row(vec![
                Value::Float(x.g),
                Value::Float(x.energy),
                Value::Text(
                    match x.parity {
                        Parity::Even => "even",
                        Parity::Odd => "odd",
                    }
                    .into(),
                ),
                Value::Text("exceptional_nondegenerate".into()),
                Value::Int(x.pole_index as i64),
            ]);
        }
        if let Some(t) = &sweep.transition {
            doc.meta(
                "ground_state_crossing",
                format!("g={} E={}", sig15(t.g), sig15(t.energy)),
            );
        }
    }
    emit(&doc, &output)
}

#[allow(clippy::too_many_arguments)]
fn cmd_exceptional(
    model: ModelArgs,
    mmin: usize,
    mmax: usize,
    parity: ParityArg,
    gmin: f64,
    gmax: f64,
    gsteps: usize,
    tol: Option<f64>,
    output: OutputArgs,
) -> Result<(), Failure> {
    let cfg = solver_config(tol)?;
    if mmax < mmin {
        return Err(Failure::Usage(format!(
            "--mmax ({mmax}) must not be below --mmin ({mmin})"
        )));
    }
    let fam = ModelFamily::new(model.delta, model.omega, model.u)?;
    let mut doc = Document::new("exceptional", vec!["m", "parity", "g", "E"]);
    push_model_meta(&mut doc, model.delta, model.omega, model.u);
    doc.meta("mmin", mmin.to_string());
    doc.meta("mmax", mmax.to_string());
    doc.meta("parity", parity.as_str());
    doc.meta_float("gmin", gmin);
    doc.meta_float("gmax", gmax);
    doc.meta("gsteps", gsteps.to_string());
    doc.meta_float("series_tol", cfg.series_tol);

    if gmin < gmax && gsteps >= 2 {
        for m in mmin..=mmax {
            for &p in parity.sectors() {
                let zeros = spectrum::exceptional_points(&fam, m, p, gmin, gmax, gsteps, &cfg)?;
                for &g_star in &zeros {
                    let params = fam.at_coupling(g_star)?;
                    let energy = if m == 0 {
                        gfunction::seed_pole(&params)?
                    } else {
                        gfunction::ladder_pole(&params, m)?
                    };
                    doc.row(vec![
                        Value::Int(m as i64),
                        Value::Text(
                            match p {
                                Parity::Even => "even",
                                Parity::Odd => "odd",
                            }
                            .into(),
                        ),
                        Value::Float(g_star),
                        Value::Float(energy),
                    ]);
                }
            }
        }
    }
    emit(&doc, &output)
}

fn cmd_collapse(
    delta: f64,
    omega: f64,
    u: Option<f64>,
    g: f64,
    levels: usize,
    upper: usize,
    output: OutputArgs,
) -> Result<(), Failure> {
    let u = u.unwrap_or(2.0 * omega);
    let params = ModelParams::collapse(delta, omega, u, g)?;
    let model = collapse::CollapseModel::from_params(&params)?;

    let mut doc = Document::new("collapse", vec!["branch", "n", "E", "N_approx"]);
    push_model_meta(&mut doc, delta, omega, u);
    doc.meta_float("g", g);
    doc.meta("levels", levels.to_string());
    doc.meta("upper", upper.to_string());
    doc.meta_float("collapse_energy", model.collapse_energy());
    if let Ok(gc) = model.critical_coupling() {
        doc.meta_float("critical_coupling", gc);
    }

    if levels > 0 {
        for level in model.lower_levels(levels)? {
            let photon = model.photon_estimate(level.energy).ok();
            doc.row(vec![
                Value::Text("lower".into()),
                Value::Int(level.n as i64),
                Value::Float(level.energy),
                photon.map_or(Value::Empty, Value::Float),
            ]);
        }
    }
    if upper > 0 {
        for level in model.upper_levels(upper)? {
            doc.row(vec![
                Value::Text("upper".into()),
                Value::Int(level.n as i64),
                Value::Float(level.energy),
                Value::Empty,
            ]);
        }
    }
    emit(&doc, &output)
}

fn cmd_ed(
    model: ModelArgs,
    g: f64,
    ntr: usize,
    count: usize,
    parity: ParityArg,
    output: OutputArgs,
) -> Result<(), Failure> {
    let params = ModelParams::new(model.delta, model.omega, model.u, g)?;
    let mut doc = Document::new("ed", vec!["k", "E", "parity", "photon"]);
    push_model_meta(&mut doc, model.delta, model.omega, model.u);
    doc.meta_float("g", g);
    doc.meta("ntr", ntr.to_string());
    doc.meta("count", count.to_string());
    doc.meta("parity", parity.as_str());

    let opts = ed::EdOptions {
        sector: true,
        vectors: false,
        limit: 16_384,
    };
    let res = ed::diagonalize(&params, ntr, &opts)?;
    let mut pairs: Vec<(f64, f64)> = res
        .energies
        .iter()
        .copied()
        .zip(res.parities.iter().copied())
        .collect();
    match parity {
        ParityArg::Even => pairs.retain(|&(_, p)| p > 0.0),
        ParityArg::Odd => pairs.retain(|&(_, p)| p < 0.0),
        ParityArg::Both => {}
    }
    pairs.truncate(count);
    let targets: Vec<f64> = pairs.iter().map(|&(e, _)| e).collect();
    let info = ed::nearest_states(&params, ntr, &targets)?;
    for (k, ((energy, p), state)) in pairs.iter().zip(&info).enumerate() {
        doc.row(vec![
            Value::Int(k as i64),
            Value::Float(*energy),
            Value::Text(if *p > 0.0 { "even" } else { "odd" }.into()),
            Value::Float(state.photon),
        ]);
    }
    emit(&doc, &output)
}

fn cmd_validate(grid: GridArg, tol: Option<f64>, output: OutputArgs) -> Result<(), Failure> {
    let cfg = solver_config(tol)?;
    let report = match grid {
        GridArg::Standard => validation::run_standard(&cfg),
        GridArg::Quick => validation::run_quick(&cfg),
    };

    let mut doc = Document::new("validate", vec!["check", "status", "detail"]);
    doc.meta(
        "grid",
        match grid {
            GridArg::Standard => "standard",
            GridArg::Quick => "quick",
        },
    );
    doc.meta_float("series_tol", cfg.series_tol);

    let mut failed = 0usize;
    for check in &report.checks {
        if !check.passed {
            failed += 1;
        }
        doc.row(vec![
            Value::Text(check.name.clone()),
            Value::Text(if check.passed { "pass" } else { "fail" }.into()),
            Value::Text(check.detail.clone()),
        ]);
    }
    emit(&doc, &output)?;
    if failed > 0 {
        return Err(Failure::Validation(failed));
    }
    Ok(())
}
