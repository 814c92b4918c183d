//! Command-line definitions and the dispatcher.

use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use resurgence_core::convolution::naive_endpoint_integral;
use resurgence_core::homotopy::symmetric_s_grid;
use resurgence_core::{
    build_symmetric_homotopy, continue_along, continue_convolution, convolve_entire, monodromy_delta,
    validate_homotopy, ColumnExecutor, ContinuationOptions, ConvolutionOptions, HomotopyOptions, Mollifier, Status,
    SymmetricHomotopy, ValidationReport, C64,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::schema::{from_c, load_germ, load_omega, load_path, GermSpec, PathSpec};
use crate::suite;

#[derive(Debug, Parser)]
#[command(name = "resurgence", version, about = "Continuation of Ω-continuable germs and their convolutions")]
pub struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report ρ and addition stability on a finite window.
    OmegaCheck {
        #[arg(long)]
        omega: PathBuf,
        #[arg(long, default_value_t = 100.0)]
        window: f64,
    },
    /// Continue a germ along a path.
    Continue {
        #[arg(long)]
        germ: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        #[arg(long, default_value_t = 64)]
        order: usize,
        /// CSV trace (t, center_re, center_im, radius).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Final germ as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Difference of a germ before and after one loop around a point.
    Monodromy {
        #[arg(long)]
        germ: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        /// Loop center as `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        around: C64,
        /// Base point as `re,im`.
        #[arg(long, value_parser = parse_complex, default_value = "0,0", allow_hyphen_values = true)]
        base: C64,
        #[arg(long, default_value_t = 64)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Continue the convolution of two germs along a path.
    Convolve {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        /// Treat `phi` as entire and use the three-term formula.
        #[arg(long)]
        entire: bool,
        /// Also print the endpoint-path integral (not a continuation in
        /// general; for comparison only).
        #[arg(long)]
        naive: bool,
        #[arg(long, default_value_t = 64)]
        order: usize,
        #[arg(long, default_value_t = 257)]
        s_points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a symmetric homotopy for a path, or validate a stored one.
    Homotopy(HomotopyArgs),
    /// Sample the mollifier on a grid.
    Eta {
        #[arg(long)]
        omega: PathBuf,
        #[arg(long)]
        eps: f64,
        /// `x0,x1,y0,y1,nx,ny`.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Leave the origin out of the zero set.
        #[arg(long)]
        no_origin: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a bundled verification suite.
    Verify {
        #[arg(long, default_value = "paper-examples")]
        suite: String,
    },
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct HomotopyArgs {
    #[command(subcommand)]
    pub action: Option<HomotopyAction>,
    #[arg(long)]
    pub path: Option<PathBuf>,
    #[arg(long)]
    pub omega: Option<PathBuf>,
    /// Grid CSV (t, s, re, im); the sidecar JSON goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 257)]
    pub s_points: usize,
}

#[derive(Debug, Subcommand)]
pub enum HomotopyAction {
    /// Re-check a grid written by `homotopy --out`.
    Validate {
        csv: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        /// Endpoint path to compare against (defaults to the sidecar's).
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
}

/// What a successful run prints, plus its exit code (2 when the run
/// completed but reports a failed check).
#[derive(Debug)]
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub code: u8,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Self {
        Self { json, text, code: 0 }
    }
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err("expected 're' or 're,im'".into()),
    }
}

fn fmt_c(z: C64) -> String {
    format!("{:.15e} {} {:.15e}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Input(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn run(cli: &Cli, exec: &dyn ColumnExecutor) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::OmegaCheck { omega, window } => omega_check(omega, *window),
        Command::Continue { germ, path, omega, order, trace, out } => {
            continue_cmd(germ, path, omega, *order, trace.as_deref(), out.as_deref())
        }
        Command::Monodromy { germ, omega, around, base, order, out } => {
            let src = load_germ(germ)?.source()?;
            let omega = load_omega(omega)?.build()?;
            let opts = ContinuationOptions { order: *order, ..Default::default() };
            let d = monodromy_delta(&src, *around, *base, &omega, &opts)?;
            if let Some(out) = out {
                write_json(out, &GermSpec::from_germ(&d))?;
            }
            let text = format!("monodromy value at base: {}\nradius: {}\n", fmt_c(d.coeffs()[0]), d.radius());
            Ok(Outcome::ok(json!({"value": from_c(d.coeffs()[0]), "germ": GermSpec::from_germ(&d)}), text))
        }
        Command::Convolve { phi, psi, path, omega, entire, naive, order, s_points, out } => {
            let phi = load_germ(phi)?.source()?;
            let psi = load_germ(psi)?.source()?;
            let path = load_path(path)?.build()?;
            let omega = load_omega(omega)?.build()?;
            let mut opts = ConvolutionOptions { order: *order, ..Default::default() };
            opts.homotopy.s_points = *s_points;
            let (germ, change) = if *entire {
                (convolve_entire(&phi, &psi, &path, &omega, &opts)?, None)
            } else {
                let r = continue_convolution(&phi, &psi, &path, &omega, &opts, exec)?;
                (r.germ, Some(r.quadrature_change))
            };
            if let Some(out) = out {
                write_json(out, &GermSpec::from_germ(&germ))?;
            }
            let value = germ.coeffs()[0];
            let mut text = format!("value at {}: {}\nradius: {}\n", fmt_c(germ.center()), fmt_c(value), germ.radius());
            let mut report = json!({
                "at": from_c(germ.center()),
                "value": from_c(value),
                "radius": germ.radius(),
                "quadrature_change": change,
                "germ": GermSpec::from_germ(&germ),
            });
            if *naive {
                let n = naive_endpoint_integral(&phi, &psi, &path, &omega, &opts)?;
                writeln!(text, "endpoint-path integral (no correctness contract): {}", fmt_c(n)).unwrap();
                report["naive_value"] = json!(from_c(n));
            }
            Ok(Outcome::ok(report, text))
        }
        Command::Homotopy(args) => match &args.action {
            Some(HomotopyAction::Validate { csv, omega, path, sidecar }) => {
                homotopy_validate(csv, omega, path.as_deref(), sidecar.as_deref())
            }
            None => {
                let (Some(path), Some(omega)) = (&args.path, &args.omega) else {
                    return Err(CliError::Input("homotopy needs --path and --omega".into()));
                };
                homotopy_build(path, omega, args.out.as_deref(), args.s_points, exec)
            }
        },
        Command::Eta { omega, eps, grid, no_origin, out } => eta(omega, *eps, grid, !*no_origin, out),
        Command::Verify { suite: name } => {
            if name != "paper-examples" {
                return Err(CliError::Input(format!("unknown suite '{name}' (available: paper-examples)")));
            }
            let rows = suite::reference_examples(exec)?;
            let mut text = format!("{:<56} {:>12} {:>10}  result\n", "check", "residual", "tolerance");
            for r in &rows {
                writeln!(
                    text,
                    "{:<56} {:>12.3e} {:>10.1e}  {}",
                    r.name,
                    r.residual,
                    r.tolerance,
                    if r.passed { "pass" } else { "FAIL" }
                )
                .unwrap();
            }
            let all = rows.iter().all(|r| r.passed);
            Ok(Outcome {
                json: json!({"suite": name, "passed": all, "rows": rows}),
                text,
                code: if all { 0 } else { 2 },
            })
        }
    }
}

fn omega_check(omega: &Path, window: f64) -> Result<Outcome, CliError> {
    let omega = load_omega(omega)?.build()?;
    let rho = omega.rho()?;
    let st = omega.is_addition_stable_window(window)?;
    let witness = st.witness.map(|(a, b)| [from_c(a), from_c(b)]);
    let mut text = format!("rho: {rho}\nwindow: {window}\naddition-stable on window: {}\n", st.is_stable());
    if let Some((a, b)) = st.witness {
        writeln!(text, "witness: ({}) + ({}) = {} is not in the set", fmt_c(a), fmt_c(b), fmt_c(a + b)).unwrap();
    }
    Ok(Outcome::ok(
        json!({"rho": rho, "window": window, "addition_stable": st.is_stable(), "witness": witness, "contains_origin": omega.contains_origin()}),
        text,
    ))
}

fn continue_cmd(
    germ: &Path,
    path: &Path,
    omega: &Path,
    order: usize,
    trace: Option<&Path>,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let src = load_germ(germ)?.source()?;
    let path = load_path(path)?.build()?;
    let omega = load_omega(omega)?.build()?;
    let opts = ContinuationOptions { order, ..Default::default() };
    let res = continue_along(&src, &path, &omega, &opts)?;
    if let Some(trace) = trace {
        let mut w = csv::Writer::from_writer(File::create(trace)?);
        w.write_record(["t", "center_re", "center_im", "radius"])?;
        for s in &res.trace {
            w.write_record([s.t.to_string(), s.center.re.to_string(), s.center.im.to_string(), s.radius.to_string()])?;
        }
        w.flush()?;
    }
    if let Some(out) = out {
        write_json(out, &GermSpec::from_germ(&res.final_germ))?;
    }
    let g = &res.final_germ;
    let converged = res.status == Status::Converged;
    let text = format!(
        "value at {}: {}\nradius: {}\nsteps: {}\nstatus: {}\n",
        fmt_c(g.center()),
        fmt_c(g.coeffs()[0]),
        g.radius(),
        res.trace.len(),
        if converged { "converged" } else { "step failure" }
    );
    let report = json!({
        "at": from_c(g.center()),
        "value": from_c(g.coeffs()[0]),
        "radius": g.radius(),
        "steps": res.trace.len(),
        "converged": converged,
    });
    Ok(Outcome { json: report, text, code: if converged { 0 } else { 2 } })
}

/// Metadata written next to a homotopy grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub s_points: usize,
    pub t_points: usize,
    pub delta_pp: f64,
    pub path: Option<PathSpec>,
    pub addition_witness: Option<[[f64; 2]; 2]>,
    pub report: ReportJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub origin_residual: f64,
    pub symmetry_residual: f64,
    pub endpoint_residual: Option<f64>,
    pub min_clearance: f64,
    pub clearance_floor: f64,
    pub passed: bool,
}

impl From<&ValidationReport> for ReportJson {
    fn from(r: &ValidationReport) -> Self {
        Self {
            origin_residual: r.origin_residual,
            symmetry_residual: r.symmetry_residual,
            endpoint_residual: r.endpoint_residual,
            min_clearance: r.min_clearance,
            clearance_floor: r.clearance_floor,
            passed: r.passed(),
        }
    }
}

fn report_text(r: &ReportJson) -> String {
    format!(
        "origin residual: {:.3e}\nsymmetry residual: {:.3e}\nendpoint residual: {}\nmin clearance: {:.6e} (floor {:.6e})\nvalid: {}\n",
        r.origin_residual,
        r.symmetry_residual,
        r.endpoint_residual.map_or("n/a".into(), |e| format!("{e:.3e}")),
        r.min_clearance,
        r.clearance_floor,
        r.passed
    )
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_grid_csv(h: &SymmetricHomotopy, out: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(File::create(out)?);
    w.write_record(["t", "s", "re", "im"])?;
    for (i, t) in h.t_grid.iter().enumerate() {
        for (m, s) in h.s_grid.iter().enumerate() {
            let z = h.at(i, m);
            w.write_record([t.to_string(), s.to_string(), z.re.to_string(), z.im.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid_csv(csv_path: &Path, delta_pp: f64) -> Result<SymmetricHomotopy, CliError> {
    let mut r = csv::Reader::from_reader(File::open(csv_path)?);
    let mut t_grid: Vec<f64> = Vec::new();
    let mut s_grid: Vec<f64> = Vec::new();
    let mut points = Vec::new();
    for (k, rec) in r.deserialize::<(f64, f64, f64, f64)>().enumerate() {
        let (t, s, re, im) = rec?;
        if t_grid.last() != Some(&t) {
            t_grid.push(t);
        }
        if t_grid.len() == 1 {
            s_grid.push(s);
        } else if s_grid.get(k % s_grid.len().max(1)) != Some(&s) {
            return Err(CliError::Input(format!("{}: row {} breaks the (t, s) grid order", csv_path.display(), k + 2)));
        }
        points.push(C64::new(re, im));
    }
    Ok(SymmetricHomotopy::from_grid(s_grid, t_grid, points, delta_pp)?)
}

fn homotopy_build(
    path: &Path,
    omega: &Path,
    out: Option<&Path>,
    s_points: usize,
    exec: &dyn ColumnExecutor,
) -> Result<Outcome, CliError> {
    let spec = load_path(path)?;
    let path = spec.build()?;
    let omega = load_omega(omega)?.build()?;
    let opts = HomotopyOptions { s_points, ..Default::default() };
    let h = build_symmetric_homotopy(&path, &omega, &opts, exec)?;
    let report = ReportJson::from(&validate_homotopy(&h, &omega, &opts.tolerances));
    let sidecar = Sidecar {
        s_points: h.s_len(),
        t_points: h.t_len(),
        delta_pp: h.delta_pp,
        path: Some(spec),
        addition_witness: h.addition_witness.map(|(a, b)| [from_c(a), from_c(b)]),
        report,
    };
    if let Some(out) = out {
        write_grid_csv(&h, out)?;
        write_json(&sidecar_path(out), &sidecar)?;
    }
    let mut text =
        format!("grid: {} x {}\ndelta'': {:.6e}\n{}", h.t_len(), h.s_len(), h.delta_pp, report_text(&sidecar.report));
    if let Some((a, b)) = h.addition_witness {
        writeln!(
            text,
            "warning: ({}) + ({}) is missing from the set, convolutions along this path are not covered",
            fmt_c(a),
            fmt_c(b)
        )
        .unwrap();
    }
    let code = if sidecar.report.passed { 0 } else { 2 };
    Ok(Outcome { json: serde_json::to_value(&sidecar).unwrap(), text, code })
}

fn homotopy_validate(
    csv: &Path,
    omega: &Path,
    path: Option<&Path>,
    sidecar: Option<&Path>,
) -> Result<Outcome, CliError> {
    let side_path = sidecar.map(Path::to_path_buf).unwrap_or_else(|| sidecar_path(csv));
    let text =
        std::fs::read_to_string(&side_path).map_err(|e| CliError::Input(format!("{}: {e}", side_path.display())))?;
    let side: Sidecar =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", side_path.display())))?;
    let omega = load_omega(omega)?.build()?;
    let mut h = read_grid_csv(csv, side.delta_pp)?;
    let spec = match path {
        Some(p) => Some(load_path(p)?),
        None => side.path.clone(),
    };
    h.gamma = spec.map(|s| s.build()).transpose()?;
    let expected = symmetric_s_grid(h.s_len());
    if h.s_grid.iter().zip(&expected).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(CliError::Input("s-grid is not the symmetric uniform grid".into()));
    }
    let report = ReportJson::from(&validate_homotopy(&h, &omega, &Default::default()));
    let code = if report.passed { 0 } else { 2 };
    Ok(Outcome { json: serde_json::to_value(&report).unwrap(), text: report_text(&report), code })
}

fn eta(omega: &Path, eps: f64, grid: &str, include_origin: bool, out: &Path) -> Result<Outcome, CliError> {
    let omega = load_omega(omega)?.build()?;
    let g: Vec<&str> = grid.split(',').map(str::trim).collect();
    let bad = || CliError::Input(format!("--grid '{grid}': expected x0,x1,y0,y1,nx,ny"));
    if g.len() != 6 {
        return Err(bad());
    }
    let f = |i: usize| g[i].parse::<f64>().map_err(|_| bad());
    let n = |i: usize| g[i].parse::<usize>().map_err(|_| bad()).and_then(|v| if v >= 2 { Ok(v) } else { Err(bad()) });
    let (x0, x1, y0, y1, nx, ny) = (f(0)?, f(1)?, f(2)?, f(3)?, n(4)?, n(5)?);
    let m = Mollifier::build(&omega, eps, include_origin)?;
    let mut w = csv::Writer::from_writer(File::create(out)?);
    w.write_record(["re", "im", "eta", "grad_re", "grad_im"])?;
    let mut zeros = 0usize;
    for j in 0..ny {
        for i in 0..nx {
            let z = C64::new(x0 + (x1 - x0) * i as f64 / (nx - 1) as f64, y0 + (y1 - y0) * j as f64 / (ny - 1) as f64);
            let (v, g) = m.eval_with_gradient(z);
            zeros += usize::from(v == 0.0);
            w.write_record([z.re, z.im, v, g[0], g[1]].map(|x| x.to_string()))?;
        }
    }
    w.flush()?;
    let text = format!("wrote {} samples to {} ({} in the zero set)\n", nx * ny, out.display(), zeros);
    Ok(Outcome::ok(json!({"samples": nx * ny, "zero_samples": zeros, "out": out}), text))
}
