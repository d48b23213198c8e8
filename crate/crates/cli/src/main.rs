//! `bellsphere` — CHSH Bell-test quantities for two-qubit polarization
//! states: state reports, S landscapes, paths, maximal-violation searches,
//! rotated-circle scans, and Monte Carlo coincidence counting.
//!
//! Every number printed or written here is produced by the `bellsphere`
//! library; this binary only parses input, orchestrates calls, and formats
//! output.  Exit codes: 0 success, 2 parse/validation error, 3 I/O error.

mod config;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use bellsphere::angle::{format_angle, parse_angle};
use bellsphere::apparatus::{derive_stream_seed, simulate_s, simulate_s_records};
use bellsphere::bases::GreatCircle;
use bellsphere::chsh::{
    circle_pair_scan, default_fixed_a, horodecki_smax, landscape, max_s_from_matrix,
    ChshSetting, MaxSearchResult, Panel, PathSpec,
};
use bellsphere::correlations::correlation_matrix;
use bellsphere::states::{density_matrix, parse_state, DensityMatrix};
use bellsphere::{C64, CLASSICAL_BOUND, TSIRELSON_BOUND};

use config::{McConfig, PathConfig, ScanConfig};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

#[derive(Debug)]
enum CliError {
    Parse(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<bellsphere::Error> for CliError {
    fn from(err: bellsphere::Error) -> Self {
        CliError::Parse(err.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// CHSH Bell tests for polarization-entangled photon pairs over the full
/// Poincaré–Bloch sphere.
#[derive(Parser)]
#[command(name = "bellsphere", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report a state: amplitudes, density matrix, correlation tensor, and
    /// the intrinsic CHSH maximum.
    State {
        /// State spec: phi+, phi'+, psi'+, chi, phi:delta=<angle>,
        /// raw:<a,b,c,d | 8 interleaved re,im>.
        spec: String,
        /// White-noise fraction p in [0, 1] mixed into the state.
        #[arg(long)]
        noise: Option<f64>,
    },
    /// S over a (t_b, t_b') grid with the first detector fixed.
    Landscape(ScanArgs),
    /// S along the path t_b' = slope*t_b + offset.
    Path(ScanArgs),
    /// Max |S| over all four detector angles for each of the nine
    /// (hd, hr, dr) circle pairs.
    Maxsearch(ScanArgs),
    /// Max |S| tabulated over a two-parameter family of rotated circle
    /// pairs (panels zz, xx, zx, xz).
    Circlescan(ScanArgs),
    /// Monte Carlo coincidence counting along a path, with per-setting
    /// count records.
    Simulate(ScanArgs),
}

/// Flags shared by the scan subcommands; every field can also come from a
/// `--config` JSON file, with flags taking precedence field by field.
#[derive(Args, Debug, Default)]
struct ScanArgs {
    /// JSON config file; explicit flags override its fields.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// State spec: phi+, phi'+, psi'+, chi, phi:delta=<angle>, raw:<amps>.
    #[arg(long)]
    state: Option<String>,
    /// White-noise fraction p in [0, 1] mixed into the state.
    #[arg(long)]
    noise: Option<f64>,
    /// Circle for photon 1: hd, hr, dr, rotz:<angle>, rotx:<angle>.
    #[arg(long)]
    circle_a: Option<String>,
    /// Circle for photon 2 (same syntax).
    #[arg(long)]
    circle_b: Option<String>,
    /// Fixed first-detector angle t_a (native parameter; pi-fractions ok).
    #[arg(long)]
    fixed_a: Option<String>,
    /// Fixed first-detector angle t_a'.
    #[arg(long)]
    fixed_a_prime: Option<String>,
    /// Grid resolution per axis (landscape default 161, circlescan 25).
    #[arg(long)]
    resolution: Option<usize>,
    /// Circle-pair panel: zz, xx, zx, xz (circlescan only).
    #[arg(long)]
    panel: Option<String>,
    /// Path slope in t_b' = slope*t_b + offset (default 1).
    #[arg(long)]
    slope: Option<f64>,
    /// Path offset angle (required by path and simulate).
    #[arg(long)]
    offset: Option<String>,
    /// First sampled t_b (default 0).
    #[arg(long)]
    start: Option<String>,
    /// Last sampled t_b (default: end of the circle's native range).
    #[arg(long)]
    end: Option<String>,
    /// Sample spacing (default: range/49, giving 50 points).
    #[arg(long)]
    step: Option<String>,
    /// Photon pairs per analyzer setting (adds simulation columns to path).
    #[arg(long)]
    pairs: Option<u64>,
    /// Master RNG seed; per-point substreams are derived from it (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Main artifact file, .csv or .json (default: CSV to stdout).
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Per-setting coincidence-count CSV (simulate only).
    #[arg(long, value_name = "FILE")]
    counts: Option<PathBuf>,
    /// Heatmap PNG (landscape and circlescan).
    #[arg(long, value_name = "FILE")]
    image: Option<PathBuf>,
}

impl ScanArgs {
    fn resolve(&self) -> CliResult<ScanConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
            }
            None => ScanConfig::default(),
        };
        Ok(self.as_config().overlaid_on(file))
    }

    fn as_config(&self) -> ScanConfig {
        ScanConfig {
            state: self.state.clone(),
            noise: self.noise,
            circle_a: self.circle_a.clone(),
            circle_b: self.circle_b.clone(),
            fixed_a: self.fixed_a.clone(),
            fixed_a_prime: self.fixed_a_prime.clone(),
            resolution: self.resolution,
            panel: self.panel.clone(),
            path: PathConfig {
                slope: self.slope,
                offset: self.offset.clone(),
                start: self.start.clone(),
                end: self.end.clone(),
                step: self.step.clone(),
            },
            monte_carlo: McConfig {
                pairs: self.pairs,
                seed: self.seed,
            },
            output: self.output.clone(),
            counts: self.counts.clone(),
            image: self.image.clone(),
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::State { spec, noise } => cmd_state(&spec, noise),
        Command::Landscape(args) => cmd_landscape(&args.resolve()?),
        Command::Path(args) => cmd_path(&args.resolve()?),
        Command::Maxsearch(args) => cmd_maxsearch(&args.resolve()?),
        Command::Circlescan(args) => cmd_circlescan(&args.resolve()?),
        Command::Simulate(args) => cmd_simulate(&args.resolve()?),
    }
}

// ---------------------------------------------------------------- shared

fn resolve_rho(cfg: &ScanConfig) -> CliResult<(String, DensityMatrix)> {
    let spec = cfg
        .state
        .clone()
        .ok_or_else(|| CliError::Parse("a state is required (--state or config `state`)".into()))?;
    let state = parse_state(&spec)?;
    let mut rho = density_matrix(&state);
    if let Some(p) = cfg.noise {
        rho = rho.mix_with_white_noise(p)?;
    }
    Ok((spec, rho))
}

fn resolve_circles(cfg: &ScanConfig) -> CliResult<(GreatCircle, GreatCircle)> {
    let circle_a = match &cfg.circle_a {
        Some(text) => GreatCircle::parse(text)?,
        None => GreatCircle::Hd,
    };
    let circle_b = match &cfg.circle_b {
        Some(text) => GreatCircle::parse(text)?,
        None => GreatCircle::Hd,
    };
    Ok((circle_a, circle_b))
}

fn resolve_fixed(cfg: &ScanConfig, circle_a: GreatCircle) -> CliResult<(f64, f64)> {
    let default = default_fixed_a(circle_a);
    let t_a = match &cfg.fixed_a {
        Some(text) => parse_angle(text)?,
        None => default.0,
    };
    let t_a_prime = match &cfg.fixed_a_prime {
        Some(text) => parse_angle(text)?,
        None => default.1,
    };
    Ok((t_a, t_a_prime))
}

fn resolve_path(cfg: &ScanConfig, circle_b: GreatCircle) -> CliResult<PathSpec> {
    let p = &cfg.path;
    let offset = p.offset.as_deref().ok_or_else(|| {
        CliError::Parse("a path offset is required (--offset or config `path.offset`)".into())
    })?;
    let offset = parse_angle(offset)?;
    let slope = p.slope.unwrap_or(1.0);
    let start = match &p.start {
        Some(text) => parse_angle(text)?,
        None => 0.0,
    };
    let end = match &p.end {
        Some(text) => parse_angle(text)?,
        None => circle_b.native_range().1,
    };
    let step = match &p.step {
        Some(text) => parse_angle(text)?,
        None => (end - start) / 49.0,
    };
    Ok(PathSpec::new(slope, offset, start, end, step)?)
}

enum Format {
    Csv,
    Json,
}

fn format_for(path: &Path) -> CliResult<Format> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        _ => Err(CliError::Parse(format!(
            "cannot infer format of `{}` (use a .csv or .json extension)",
            path.display()
        ))),
    }
}

fn write_artifact(path: &Path, bytes: &[u8]) -> CliResult<()> {
    output::atomic_write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn to_json_bytes(value: &serde_json::Value) -> CliResult<Vec<u8>> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn rows_of(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn base_metadata(kind: &str, state: &str, noise: Option<f64>) -> serde_json::Value {
    json!({
        "artifact": "bellsphere",
        "version": env!("CARGO_PKG_VERSION"),
        "kind": kind,
        "state": state,
        "noise": noise,
    })
}

fn merge_metadata(mut base: serde_json::Value, extra: serde_json::Value) -> serde_json::Value {
    if let (Some(dst), Some(src)) = (base.as_object_mut(), extra.as_object()) {
        for (key, value) in src {
            dst.insert(key.clone(), value.clone());
        }
    }
    base
}

/// Writes a heatmap normalized to the Tsirelson bound with the classical
/// bound |S| = 2 as the contour line.
fn emit_heatmap(
    cfg: &ScanConfig,
    values: &nalgebra::DMatrix<f64>,
    to_stdout: bool,
) -> CliResult<()> {
    if let Some(path) = &cfg.image {
        let png =
            output::heatmap_png(values, TSIRELSON_BOUND, CLASSICAL_BOUND).map_err(CliError::Io)?;
        write_artifact(path, &png)?;
        let note = format!("wrote heatmap to {}", path.display());
        if to_stdout {
            println!("{note}");
        } else {
            eprintln!("{note}");
        }
    }
    Ok(())
}

// --------------------------------------------------------------- commands

fn cmd_state(spec: &str, noise: Option<f64>) -> CliResult<()> {
    let state = parse_state(spec)?;
    let mut rho = density_matrix(&state);
    if let Some(p) = noise {
        rho = rho.mix_with_white_noise(p)?;
    }
    println!("state: {spec}");
    if let Some(p) = noise {
        println!("noise: p = {p}");
    }
    println!("amplitudes (|HH>, |HV>, |VH>, |VV>):");
    for (label, amp) in ["HH", "HV", "VH", "VV"].iter().zip(state.amplitudes()) {
        println!("  |{label}>  {}", fmt_complex(amp));
    }
    println!("density matrix:");
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| fmt_complex(rho.matrix()[(i, j)])).collect();
        println!("  [ {} ]", row.join("  "));
    }
    println!("correlation matrix T (rows/cols x, y, z):");
    let t = correlation_matrix(&rho);
    for i in 0..3 {
        let row: Vec<String> = (0..3)
            .map(|j| format!("{:+.10}", t.matrix()[(i, j)]))
            .collect();
        println!("  [ {} ]", row.join("  "));
    }
    println!("S_max = {}", horodecki_smax(&rho));
    Ok(())
}

fn fmt_complex(z: C64) -> String {
    format!("{:+.10}{:+.10}i", z.re, z.im)
}

fn cmd_landscape(cfg: &ScanConfig) -> CliResult<()> {
    let (spec, rho) = resolve_rho(cfg)?;
    let (circle_a, circle_b) = resolve_circles(cfg)?;
    let fixed = resolve_fixed(cfg, circle_a)?;
    let resolution = cfg.resolution.unwrap_or(161);
    let grid = landscape(&rho, circle_a, circle_b, fixed.0, fixed.1, resolution)?;

    match &cfg.output {
        Some(path) => {
            let bytes = match format_for(path)? {
                Format::Csv => {
                    output::grid_csv("t_b/t_b'", grid.axis1(), grid.axis2(), grid.s_values())
                        .into_bytes()
                }
                Format::Json => {
                    let meta = merge_metadata(
                        base_metadata("landscape", &spec, cfg.noise),
                        json!({
                            "circle_a": circle_a.label(),
                            "circle_b": circle_b.label(),
                            "fixed_a": [fixed.0, fixed.1],
                            "resolution": resolution,
                            "row_axis_t_b": grid.axis1(),
                            "col_axis_t_b_prime": grid.axis2(),
                            "s": rows_of(grid.s_values()),
                        }),
                    );
                    to_json_bytes(&meta)?
                }
            };
            write_artifact(path, &bytes)?;
            let (s, t_b, t_b_prime) = grid.peak();
            println!("wrote grid to {}", path.display());
            println!(
                "peak S = {s} at t_b = {}, t_b' = {}",
                format_angle(t_b),
                format_angle(t_b_prime)
            );
        }
        None => print!(
            "{}",
            output::grid_csv("t_b/t_b'", grid.axis1(), grid.axis2(), grid.s_values())
        ),
    }
    emit_heatmap(cfg, grid.s_values(), cfg.output.is_some())
}

fn cmd_path(cfg: &ScanConfig) -> CliResult<()> {
    let (spec, rho) = resolve_rho(cfg)?;
    let (circle_a, circle_b) = resolve_circles(cfg)?;
    let fixed = resolve_fixed(cfg, circle_a)?;
    let path_spec = resolve_path(cfg, circle_b)?;
    let series = bellsphere::chsh::path_scan(&rho, circle_a, circle_b, fixed, &path_spec);
    let monte_carlo = cfg
        .monte_carlo
        .pairs
        .map(|pairs| (pairs, cfg.monte_carlo.seed.unwrap_or(0)));

    let mut header = vec!["t_b", "t_b_prime", "s_analytic"];
    if monte_carlo.is_some() {
        header.extend(["s_est", "s_err"]);
    }
    let mut rows = Vec::with_capacity(series.len());
    for (k, (t_b, s)) in series.iter().enumerate() {
        let t_b_prime = path_spec.partner(*t_b);
        let mut row = vec![*t_b, t_b_prime, *s];
        if let Some((pairs, seed)) = monte_carlo {
            let setting =
                ChshSetting::on_circles(circle_a, circle_b, fixed.0, fixed.1, *t_b, t_b_prime);
            let (s_est, s_err) =
                simulate_s(&rho, &setting, pairs, derive_stream_seed(seed, k as u64));
            row.extend([s_est, s_err]);
        }
        rows.push(row);
    }

    let peak = rows
        .iter()
        .map(|row| row[2].abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let meta = merge_metadata(
        base_metadata("path", &spec, cfg.noise),
        json!({
            "circle_a": circle_a.label(),
            "circle_b": circle_b.label(),
            "fixed_a": [fixed.0, fixed.1],
            "pairs": cfg.monte_carlo.pairs,
            "seed": monte_carlo.map(|(_, seed)| seed),
        }),
    );
    emit_series(
        cfg,
        meta,
        &header,
        &rows,
        &format!("max |S_analytic| = {peak:.6}"),
    )
}

fn emit_series(
    cfg: &ScanConfig,
    meta: serde_json::Value,
    header: &[&str],
    rows: &[Vec<f64>],
    summary: &str,
) -> CliResult<()> {
    match &cfg.output {
        Some(path) => {
            let bytes = match format_for(path)? {
                Format::Csv => output::series_csv(header, rows).into_bytes(),
                Format::Json => {
                    let meta = merge_metadata(meta, json!({"columns": header, "rows": rows}));
                    to_json_bytes(&meta)?
                }
            };
            write_artifact(path, &bytes)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
            println!("{summary}");
        }
        None => print!("{}", output::series_csv(header, rows)),
    }
    Ok(())
}

fn cmd_maxsearch(cfg: &ScanConfig) -> CliResult<()> {
    let (spec, rho) = resolve_rho(cfg)?;
    let t = correlation_matrix(&rho);
    let circles = [GreatCircle::Hd, GreatCircle::Hr, GreatCircle::Dr];
    let table: Vec<Vec<MaxSearchResult>> = circles
        .iter()
        .map(|ca| {
            circles
                .iter()
                .map(|cb| max_s_from_matrix(&t, *ca, *cb))
                .collect()
        })
        .collect();

    println!("max |S| by measurement circle pair, state {spec}");
    println!(
        "{:>4} {:>10} {:>10} {:>10}",
        "",
        circles[0].label(),
        circles[1].label(),
        circles[2].label()
    );
    for (i, circle_a) in circles.iter().enumerate() {
        let cells: Vec<String> = table[i]
            .iter()
            .map(|r| format!("{:>10.6}", r.s_max))
            .collect();
        println!("{:>4} {}", circle_a.label(), cells.join(" "));
    }
    println!();
    println!("optimal angles (native parameters):");
    for (i, circle_a) in circles.iter().enumerate() {
        for (j, circle_b) in circles.iter().enumerate() {
            let result = &table[i][j];
            let [t_a, t_a_prime, t_b, t_b_prime] = result.angles;
            println!(
                "  {}-{}: |S| = {:.6} at {}_a = {}, {}_a' = {}, {}_b = {}, {}_b' = {}",
                circle_a.label(),
                circle_b.label(),
                result.s_max,
                circle_a.native_parameter(),
                format_angle(circle_a.native_from_param(t_a)),
                circle_a.native_parameter(),
                format_angle(circle_a.native_from_param(t_a_prime)),
                circle_b.native_parameter(),
                format_angle(circle_b.native_from_param(t_b)),
                circle_b.native_parameter(),
                format_angle(circle_b.native_from_param(t_b_prime)),
            );
        }
    }

    if let Some(path) = &cfg.output {
        let labels = ["hd", "hr", "dr"];
        let bytes = match format_for(path)? {
            Format::Csv => {
                let rows: Vec<Vec<String>> = circles
                    .iter()
                    .enumerate()
                    .map(|(i, ca)| {
                        let mut row = vec![ca.label()];
                        row.extend(table[i].iter().map(|r| r.s_max.to_string()));
                        row
                    })
                    .collect();
                output::csv_rows(&["a/b", labels[0], labels[1], labels[2]], &rows).into_bytes()
            }
            Format::Json => {
                let s_max: Vec<Vec<f64>> = table
                    .iter()
                    .map(|row| row.iter().map(|r| r.s_max).collect())
                    .collect();
                let angles: Vec<Vec<[f64; 4]>> = table
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, r)| {
                                [
                                    circles[i].native_from_param(r.angles[0]),
                                    circles[i].native_from_param(r.angles[1]),
                                    circles[j].native_from_param(r.angles[2]),
                                    circles[j].native_from_param(r.angles[3]),
                                ]
                            })
                            .collect()
                    })
                    .collect();
                let meta = merge_metadata(
                    base_metadata("maxsearch", &spec, cfg.noise),
                    json!({
                        "circles": labels,
                        "s_max": s_max,
                        "angles_native": angles,
                    }),
                );
                to_json_bytes(&meta)?
            }
        };
        write_artifact(path, &bytes)?;
        println!("wrote table to {}", path.display());
    }
    Ok(())
}

fn cmd_circlescan(cfg: &ScanConfig) -> CliResult<()> {
    let (spec, rho) = resolve_rho(cfg)?;
    let panel = match &cfg.panel {
        Some(text) => Panel::parse(text)?,
        None => Panel::Zz,
    };
    let resolution = cfg.resolution.unwrap_or(25);
    let scan = circle_pair_scan(&rho, panel, resolution)?;

    match &cfg.output {
        Some(path) => {
            let bytes = match format_for(path)? {
                Format::Csv => {
                    output::grid_csv("u/v", scan.axis_a(), scan.axis_b(), scan.s_max())
                        .into_bytes()
                }
                Format::Json => {
                    let meta = merge_metadata(
                        base_metadata("circlescan", &spec, cfg.noise),
                        json!({
                            "panel": panel.label(),
                            "resolution": resolution,
                            "row_axis_u": scan.axis_a(),
                            "col_axis_v": scan.axis_b(),
                            "s_max": rows_of(scan.s_max()),
                        }),
                    );
                    to_json_bytes(&meta)?
                }
            };
            write_artifact(path, &bytes)?;
            let (i, j) = scan
                .s_max()
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(flat, _)| (flat % resolution, flat / resolution))
                .unwrap_or((0, 0));
            println!("wrote grid to {}", path.display());
            println!(
                "largest max |S| = {} at u = {}, v = {}",
                scan.s_max()[(i, j)],
                format_angle(scan.axis_a()[i]),
                format_angle(scan.axis_b()[j])
            );
        }
        None => print!(
            "{}",
            output::grid_csv("u/v", scan.axis_a(), scan.axis_b(), scan.s_max())
        ),
    }
    emit_heatmap(cfg, scan.s_max(), cfg.output.is_some())
}

fn cmd_simulate(cfg: &ScanConfig) -> CliResult<()> {
    let pairs = cfg.monte_carlo.pairs.ok_or_else(|| {
        CliError::Parse(
            "simulate needs a Monte Carlo block (--pairs or config `monte_carlo.pairs`)".into(),
        )
    })?;
    let seed = cfg.monte_carlo.seed.unwrap_or(0);
    let (spec, rho) = resolve_rho(cfg)?;
    let (circle_a, circle_b) = resolve_circles(cfg)?;
    let fixed = resolve_fixed(cfg, circle_a)?;
    let path_spec = resolve_path(cfg, circle_b)?;
    let series = bellsphere::chsh::path_scan(&rho, circle_a, circle_b, fixed, &path_spec);

    let header = ["t_b", "t_b_prime", "s_analytic", "s_est", "s_err"];
    let mut rows = Vec::with_capacity(series.len());
    let mut count_rows: Vec<Vec<String>> = Vec::with_capacity(4 * series.len());
    for (k, (t_b, s_analytic)) in series.iter().enumerate() {
        let t_b_prime = path_spec.partner(*t_b);
        let setting =
            ChshSetting::on_circles(circle_a, circle_b, fixed.0, fixed.1, *t_b, t_b_prime);
        let (records, s_est, s_err) =
            simulate_s_records(&rho, &setting, pairs, derive_stream_seed(seed, k as u64));
        rows.push(vec![*t_b, t_b_prime, *s_analytic, s_est, s_err]);
        let combos = [
            ("ab", fixed.0, *t_b),
            ("ab'", fixed.0, t_b_prime),
            ("a'b", fixed.1, *t_b),
            ("a'b'", fixed.1, t_b_prime),
        ];
        for ((combo, t_first, t_second), record) in combos.iter().zip(records) {
            count_rows.push(vec![
                t_b.to_string(),
                combo.to_string(),
                t_first.to_string(),
                t_second.to_string(),
                record.n_ab.to_string(),
                record.n_ab_perp.to_string(),
                record.n_aperp_b.to_string(),
                record.n_aperp_bperp.to_string(),
                record.pairs_total.to_string(),
                record.seed.to_string(),
            ]);
        }
    }

    if let Some(path) = &cfg.counts {
        let text = output::csv_rows(
            &[
                "t_b",
                "combo",
                "t_first",
                "t_second",
                "n_ab",
                "n_ab_perp",
                "n_aperp_b",
                "n_aperp_bperp",
                "pairs",
                "seed",
            ],
            &count_rows,
        );
        write_artifact(path, text.as_bytes())?;
        let note = format!("wrote {} count records to {}", count_rows.len(), path.display());
        if cfg.output.is_some() {
            println!("{note}");
        } else {
            eprintln!("{note}");
        }
    }

    let peak_est = rows
        .iter()
        .map(|row| row[3].abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let meta = merge_metadata(
        base_metadata("simulate", &spec, cfg.noise),
        json!({
            "circle_a": circle_a.label(),
            "circle_b": circle_b.label(),
            "fixed_a": [fixed.0, fixed.1],
            "pairs": pairs,
            "seed": seed,
        }),
    );
    emit_series(
        cfg,
        meta,
        &header,
        &rows,
        &format!("max |S_est| = {peak_est:.6}"),
    )
}
