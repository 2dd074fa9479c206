//! `epicycle` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 resonant input, 3 numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use epicycle::coefficients::{
    classify, residuals, CoeffSet, Resonance, ResonancePolicy, DEFAULT_GUARD,
};
use epicycle::model::{scale, AtomConfig, LightConfig, ScaledConfig};
use epicycle::oracle::{self, IntegratorSettings};
use epicycle::orbit::{self, sample_times, Harmonic, DEFAULT_MAX_DEN};
use epicycle::{ComplexAmp, Error};

const GUARD_ENV: &str = "EPICYCLE_GUARD";

#[derive(Parser, Debug)]
#[command(
    name = "epicycle",
    version,
    about = "First-order epicyclic orbits under circularly polarized light"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficient table, resonance class and substitution residuals.
    Coeffs {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sample the analytic orbit as CSV.
    Orbit {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        t_end: f64,
        #[arg(long, default_value_t = orbit::SAMPLES_PER_PERIOD)]
        samples: usize,
        /// Add vx, vy columns.
        #[arg(long)]
        velocity: bool,
        /// Add per-harmonic x, y columns.
        #[arg(long)]
        decompose: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Orbit period as a multiple of the unperturbed period.
    Period {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_DEN)]
        max_den: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare the analytic orbit with a numerical integration (JSON).
    Compare {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        t_end: f64,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Coefficient magnitudes and periods across a range of alpha (CSV).
    Sweep {
        /// Inclusive range `START:END`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        alpha_range: (f64, f64),
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi0: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long)]
        degrees: bool,
        #[arg(long)]
        allow_near_resonant: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_DEN)]
        max_den: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Re-run the command recorded in a manifest.
    Rerun {
        manifest: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write to this file (and a `.manifest.json` beside it) instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Frequency ratio omega/omega0.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["k", "q", "m", "r0", "a", "omega"])]
    alpha: Option<f64>,
    /// Forcing strength q a / (m omega0^2 r0).
    #[arg(long, conflicts_with_all = ["k", "q", "m", "r0", "a", "omega"])]
    eps: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    /// Read phi0 and delta in degrees.
    #[arg(long)]
    degrees: bool,
    #[arg(long)]
    allow_near_resonant: bool,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
    /// Field amplitude.
    #[arg(long)]
    a: Option<f64>,
    /// Light angular frequency.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Table,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Mode {
    Full,
    Linearized,
}

#[derive(Serialize, Deserialize, Debug)]
struct RunManifest {
    command: String,
    /// Arguments after the program name, without `--output`.
    args: Vec<String>,
    parameters: serde_json::Value,
    version: String,
    timestamp_unix: u64,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResonantDivergence { .. } | Error::NearResonance { .. } => 2,
            Error::SingularRadius { .. } | Error::TranscriptionMismatch { .. } => 3,
            _ => 1,
        };
        let mut message = e.to_string();
        if matches!(e, Error::SingularRadius { .. }) {
            message.push_str("; try a shorter --t-end or move alpha away from 0, 1 and 2");
        }
        Self { code, message }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::usage(format!("i/o error: {e}"))
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected START:END, got `{s}`"))?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    let (a, b) = (parse(a)?, parse(b)?);
    if !(a.is_finite() && b.is_finite()) {
        return Err("range bounds must be finite".into());
    }
    Ok((a, b))
}

/// 17 significant digits; negative zero is printed as zero.
fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn policy(allow_near: bool) -> Result<ResonancePolicy, Failure> {
    let guard = match std::env::var(GUARD_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|g| g.is_finite() && *g >= 0.0)
            .ok_or_else(|| {
                Failure::usage(format!(
                    "{GUARD_ENV} must be a nonnegative number, got `{v}`"
                ))
            })?,
        Err(_) => DEFAULT_GUARD,
    };
    let p = ResonancePolicy::with_guard(guard);
    Ok(if allow_near {
        p.allowing_near_resonant()
    } else {
        p
    })
}

fn angle(x: f64, degrees: bool) -> f64 {
    if degrees {
        x.to_radians()
    } else {
        x
    }
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ScaledConfig, Failure> {
        let phi0 = angle(self.phi0, self.degrees);
        let delta = angle(self.delta, self.degrees);
        let si = [self.k, self.q, self.m, self.r0, self.a, self.omega];
        if si.iter().any(Option::is_some) {
            let [Some(k), Some(q), Some(m), Some(r0), Some(a), Some(omega)] = si else {
                return Err(Failure::usage(
                    "physical units need all of --k --q --m --r0 --a --omega",
                ));
            };
            let atom = AtomConfig { k, q, m, r0, phi0 };
            let light = LightConfig { a, delta, omega };
            return Ok(scale(&atom, &light)?);
        }
        let alpha = self
            .alpha
            .ok_or_else(|| Failure::usage("--alpha is required (or the physical-unit flags)"))?;
        Ok(ScaledConfig::new(
            alpha,
            self.eps.unwrap_or(1e-3),
            phi0,
            delta,
        )?)
    }
}

fn scaled_json(cfg: &ScaledConfig) -> serde_json::Value {
    json!({ "alpha": cfg.alpha, "eps": cfg.eps, "phi0": cfg.phi0, "delta": cfg.delta })
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

struct Rendered {
    body: String,
    parameters: serde_json::Value,
}

fn cmd_coeffs(cfg: &ConfigArgs, format: Format) -> Result<Rendered, Failure> {
    let sc = cfg.resolve()?;
    let pol = policy(cfg.allow_near_resonant)?;
    let sol = orbit::solve(&sc, &pol)?;
    warn_all(&sol.warnings);
    let c = sol.coefficients;
    let res = residuals(&c, &sc);
    let named: [(&str, ComplexAmp); 5] = [
        ("b_m1", c.b_m1),
        ("b_p1", c.b_p1),
        ("c_m1", c.c_m1),
        ("c_0", c.c_0),
        ("c_p1", c.c_p1),
    ];
    let resonance = match sol.resonance {
        Resonance::NonResonant => "non_resonant".to_string(),
        Resonance::NearResonant { which, distance } => {
            format!("near_resonant (ratio {which}, distance {})", num(distance))
        }
        Resonance::Resonant { which } => format!("resonant (ratio {which})"),
    };
    let residual_rows = [
        ("particular_m1", res.particular_m1),
        ("particular_p1", res.particular_p1),
        ("homogeneous_p1", res.homogeneous_p1),
        ("homogeneous_m1", res.homogeneous_m1),
        ("boundary_position", res.boundary_position),
        ("boundary_velocity", res.boundary_velocity),
        ("alpha_identity", res.alpha_identity),
        ("homogeneous_k0", res.homogeneous_k0),
    ];
    let body = match format {
        Format::Table => {
            let mut s = String::new();
            writeln!(
                s,
                "# alpha={} eps={} phi0={} delta={}",
                num(sc.alpha),
                num(sc.eps),
                num(sc.phi0),
                num(sc.delta)
            )
            .unwrap();
            writeln!(s, "# resonance: {resonance}").unwrap();
            writeln!(s, "name,re,im,abs,phase").unwrap();
            for (name, z) in named {
                let z = ComplexAmp::new(z.re + 0.0, z.im + 0.0);
                writeln!(
                    s,
                    "{name},{},{},{},{}",
                    num(z.re),
                    num(z.im),
                    num(z.abs()),
                    num(z.arg())
                )
                .unwrap();
            }
            writeln!(s, "residual,value").unwrap();
            for (name, v) in residual_rows {
                writeln!(s, "{name},{}", num(v)).unwrap();
            }
            s
        }
        Format::Json => {
            let coeffs: serde_json::Map<_, _> = named
                .iter()
                .map(|(n, z)| {
                    let z = ComplexAmp::new(z.re + 0.0, z.im + 0.0);
                    (
                        n.to_string(),
                        json!({ "re": z.re, "im": z.im, "abs": z.abs(), "phase": z.arg() }),
                    )
                })
                .collect();
            let resid: serde_json::Map<_, _> = residual_rows
                .iter()
                .map(|(n, v)| (n.to_string(), json!(v)))
                .collect();
            let doc = json!({
                "config": scaled_json(&sc),
                "resonance": sol.resonance,
                "coefficients": coeffs,
                "residuals": resid,
            });
            serde_json::to_string_pretty(&doc).unwrap() + "\n"
        }
    };
    Ok(Rendered {
        body,
        parameters: json!({ "config": scaled_json(&sc), "format": format }),
    })
}

fn cmd_orbit(
    cfg: &ConfigArgs,
    t_end: f64,
    samples: usize,
    velocity: bool,
    decompose: bool,
) -> Result<Rendered, Failure> {
    let sc = cfg.resolve()?;
    let sol = orbit::solve(&sc, &policy(cfg.allow_near_resonant)?)?;
    warn_all(&sol.warnings);
    let times = sample_times(t_end, samples)?;

    let mut s = String::from("t,x,y");
    if velocity {
        s.push_str(",vx,vy");
    }
    if decompose {
        for h in Harmonic::ALL {
            write!(s, ",x{0},y{0}", h.label()).unwrap();
        }
    }
    s.push('\n');
    for t in times {
        let p = sol.position(t);
        write!(s, "{},{},{}", num(t), num(p.x), num(p.y)).unwrap();
        if velocity {
            let v = sol.velocity(t);
            write!(s, ",{},{}", num(v.x), num(v.y)).unwrap();
        }
        if decompose {
            for c in sol.components(t) {
                write!(s, ",{},{}", num(c.x), num(c.y)).unwrap();
            }
        }
        s.push('\n');
    }
    Ok(Rendered {
        body: s,
        parameters: json!({
            "config": scaled_json(&sc),
            "t_end": t_end,
            "samples": samples,
            "velocity": velocity,
            "decompose": decompose,
        }),
    })
}

fn cmd_period(alpha: f64, max_den: u64) -> Result<Rendered, Failure> {
    if !alpha.is_finite() {
        return Err(Failure::usage("--alpha must be finite"));
    }
    let res = orbit::period(alpha, max_den);
    let mut body = format!("{res}\n");
    if let (Some((p, q)), Some(n)) = (res.alpha_rational, res.n) {
        body = format!("alpha = {p}/{q}\n{body}n = {n}\n");
    }
    Ok(Rendered {
        body,
        parameters: json!({ "alpha": alpha, "max_den": max_den }),
    })
}

fn cmd_compare(cfg: &ConfigArgs, dt: f64, t_end: f64, mode: Mode) -> Result<Rendered, Failure> {
    let sc = cfg.resolve()?;
    let sol = orbit::solve(&sc, &policy(cfg.allow_near_resonant)?)?;
    warn_all(&sol.warnings);
    let settings = IntegratorSettings::new(dt, t_end)?;
    let traj = match mode {
        Mode::Full => oracle::integrate_full(&sc, &settings)?,
        Mode::Linearized => oracle::integrate_linearized(&sc, &settings)?,
    };
    let report = oracle::compare(&sol, &traj)?;
    let params = json!({
        "config": scaled_json(&sc),
        "dt": dt,
        "t_end": t_end,
        "mode": mode,
        "method": settings.method,
    });
    let doc = json!({
        "max_dev": report.max_dev,
        "rms_dev": report.rms_dev,
        "dev_over_eps": report.dev_over_eps,
        "dev_over_eps2": report.dev_over_eps2,
        "samples": report.samples,
        "settings": params,
    });
    Ok(Rendered {
        body: serde_json::to_string_pretty(&doc).unwrap() + "\n",
        parameters: params,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    range: (f64, f64),
    steps: usize,
    eps: f64,
    phi0: f64,
    delta: f64,
    allow_near: bool,
    max_den: u64,
) -> Result<Rendered, Failure> {
    if steps == 0 {
        return Err(Failure::usage("--steps must be at least 1"));
    }
    let pol = policy(allow_near)?;
    ScaledConfig::new(range.0, eps, phi0, delta)?;
    let alphas: Vec<f64> = match steps {
        1 => vec![range.0],
        n => (0..n)
            .map(|i| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64)
            .collect(),
    };
    let rows: Vec<String> = alphas
        .par_iter()
        .map(|&alpha| {
            let cfg = ScaledConfig::new(alpha, eps, phi0, delta).expect("validated above");
            let class = classify(alpha, pol.guard);
            let period = orbit::period(alpha, max_den).n.map_or_else(
                || "aperiodic".to_string(),
                |n| format!("{}", n as f64 / 2.0),
            );
            match CoeffSet::compute(&cfg, &pol) {
                Ok(c) => {
                    let status = match class {
                        Resonance::NearResonant { .. } => "near-resonant",
                        _ => "ok",
                    };
                    let mags: Vec<String> = c.as_array().iter().map(|z| num(z.abs())).collect();
                    format!("{},{status},{},{period}", num(alpha), mags.join(","))
                }
                Err(Error::ResonantDivergence { .. } | Error::NearResonance { .. }) => {
                    format!("{},skipped-resonant,,,,,,{period}", num(alpha))
                }
                Err(e) => format!(
                    "{},error: {},,,,,,{period}",
                    num(alpha),
                    e.to_string().replace(',', ";")
                ),
            }
        })
        .collect();
    let mut body =
        String::from("alpha,status,abs_b_m1,abs_b_p1,abs_c_m1,abs_c_0,abs_c_p1,period_over_tau0\n");
    for r in rows {
        body.push_str(&r);
        body.push('\n');
    }
    Ok(Rendered {
        body,
        parameters: json!({
            "alpha_range": [range.0, range.1],
            "steps": steps,
            "eps": eps,
            "phi0": phi0,
            "delta": delta,
            "allow_near_resonant": allow_near,
            "guard": pol.guard,
            "max_den": max_den,
        }),
    })
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// The arguments after the program name, minus any `--output`/`-o` pair.
fn args_without_output(raw: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = raw.iter();
    while let Some(a) = it.next() {
        if a == "--output" || a == "-o" {
            it.next();
        } else if !(a.starts_with("--output=")
            || (a.starts_with("-o") && a.len() > 2 && !a.starts_with("--")))
        {
            out.push(a.clone());
        }
    }
    out
}

fn emit(
    command: &str,
    rendered: Rendered,
    out: &OutputArgs,
    args: &[String],
) -> Result<(), Failure> {
    match &out.output {
        None => {
            io::stdout().lock().write_all(rendered.body.as_bytes())?;
        }
        Some(path) => {
            fs::write(path, &rendered.body)?;
            let manifest = RunManifest {
                command: command.to_string(),
                args: args_without_output(args),
                parameters: rendered.parameters,
                version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp_unix: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            };
            fs::write(
                manifest_path(path),
                serde_json::to_string_pretty(&manifest).unwrap() + "\n",
            )?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli, args: &[String]) -> Result<(), Failure> {
    let (name, rendered, out) = match cli.command {
        Command::Coeffs { cfg, format, out } => ("coeffs", cmd_coeffs(&cfg, format)?, out),
        Command::Orbit {
            cfg,
            t_end,
            samples,
            velocity,
            decompose,
            out,
        } => (
            "orbit",
            cmd_orbit(&cfg, t_end, samples, velocity, decompose)?,
            out,
        ),
        Command::Period {
            alpha,
            max_den,
            out,
        } => ("period", cmd_period(alpha, max_den)?, out),
        Command::Compare {
            cfg,
            dt,
            t_end,
            mode,
            out,
        } => ("compare", cmd_compare(&cfg, dt, t_end, mode)?, out),
        Command::Sweep {
            alpha_range,
            steps,
            eps,
            phi0,
            delta,
            degrees,
            allow_near_resonant,
            max_den,
            out,
        } => (
            "sweep",
            cmd_sweep(
                alpha_range,
                steps,
                eps,
                angle(phi0, degrees),
                angle(delta, degrees),
                allow_near_resonant,
                max_den,
            )?,
            out,
        ),
        Command::Rerun { manifest, out } => return rerun(&manifest, out),
    };
    emit(name, rendered, &out, args)
}

fn rerun(path: &Path, out: OutputArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(path)?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: not a run manifest: {e}", path.display())))?;
    if manifest.args.first().map(String::as_str) == Some("rerun") {
        return Err(Failure::usage("refusing to rerun a rerun manifest"));
    }
    let mut args = manifest.args;
    if let Some(o) = &out.output {
        args.push("--output".into());
        args.push(o.to_string_lossy().into_owned());
    }
    let cli =
        Cli::try_parse_from(std::iter::once("epicycle".to_string()).chain(args.iter().cloned()))
            .map_err(|e| Failure::usage(format!("manifest arguments no longer parse: {e}")))?;
    dispatch(cli, &args)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse_from(std::env::args()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
