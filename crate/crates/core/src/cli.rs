//! Command-line front end: `inspect`, `fill`, `eval`, `punch` and `bench`.
//!
//! Data goes to `out`, diagnostics to `err`. Exit codes: 0 success, 2 bad
//! input or flags, 3 when some hole could not be filled.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_hole, classify_hole, detect_fracture_points, HoleClass};
use crate::fill::{fill_all_holes, FillConfig, FillMethod, HeightModel};
use crate::harness::{self, BenchConfig, PunchMode, PunchSpec, SyntheticShape};
use crate::io::{self, MeshFormat};
use crate::metrics::{hausdorff_report, SamplingMode, SamplingSpec};
use crate::mesh::{Point, TriangleMesh};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

/// Every tunable, as read from a config file and overridden by flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub small_factor: f64,
    pub medium_factor: f64,
    pub fracture_cos: f64,
    pub smooth_iterations: usize,
    pub ring_merge_radius_factor: f64,
    pub open_surface: bool,
    pub method: FillMethod,
    pub height_model: HeightModel,
    pub sampling_mode: SamplingMode,
    /// Face samples per average face area.
    pub samples: f64,
    pub max_samples: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fill = FillConfig::default();
        let sampling = SamplingSpec::default();
        RunConfig {
            small_factor: fill.small_factor,
            medium_factor: fill.medium_factor,
            fracture_cos: fill.fracture_cos,
            smooth_iterations: fill.smooth_iterations,
            ring_merge_radius_factor: fill.ring_merge_radius_factor,
            open_surface: fill.open_surface,
            method: fill.method,
            height_model: fill.height_model,
            sampling_mode: sampling.mode,
            samples: sampling.density,
            max_samples: sampling.max_face_samples,
            seed: sampling.seed,
        }
    }
}

const CONFIG_KEYS: [&str; 12] = [
    "small_factor",
    "medium_factor",
    "fracture_cos",
    "smooth_iterations",
    "ring_merge_radius_factor",
    "open_surface",
    "method",
    "height_model",
    "sampling_mode",
    "samples",
    "max_samples",
    "seed",
];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("config line {line}: bad value '{value}' for {key}"))
}

impl RunConfig {
    /// Parses `key = value` lines over the defaults; `#` starts a comment.
    pub fn from_config_str(text: &str) -> Result<Self, String> {
        let mut c = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("config line {line_no}: expected key = value"));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "small_factor" => c.small_factor = parse_value(key, value, line_no)?,
                "medium_factor" => c.medium_factor = parse_value(key, value, line_no)?,
                "fracture_cos" => c.fracture_cos = parse_value(key, value, line_no)?,
                "smooth_iterations" => c.smooth_iterations = parse_value(key, value, line_no)?,
                "ring_merge_radius_factor" => c.ring_merge_radius_factor = parse_value(key, value, line_no)?,
                "open_surface" => c.open_surface = parse_value(key, value, line_no)?,
                "method" => c.method = parse_value(key, value, line_no)?,
                "height_model" => c.height_model = parse_value(key, value, line_no)?,
                "sampling_mode" => {
                    c.sampling_mode = match value {
                        "vertices-only" => SamplingMode::VerticesOnly,
                        "vertices-plus-face-samples" => SamplingMode::VerticesPlusFaceSamples,
                        _ => return Err(format!("config line {line_no}: bad value '{value}' for {key}")),
                    }
                }
                "samples" => c.samples = parse_value(key, value, line_no)?,
                "max_samples" => c.max_samples = parse_value(key, value, line_no)?,
                "seed" => c.seed = parse_value(key, value, line_no)?,
                other => return Err(format!("config line {line_no}: unknown key '{other}'")),
            }
        }
        Ok(c)
    }

    /// Writes every key; floats use the shortest exact representation.
    pub fn to_config_string(&self) -> String {
        let mode = match self.sampling_mode {
            SamplingMode::VerticesOnly => "vertices-only",
            SamplingMode::VerticesPlusFaceSamples => "vertices-plus-face-samples",
        };
        let values = [
            self.small_factor.to_string(),
            self.medium_factor.to_string(),
            self.fracture_cos.to_string(),
            self.smooth_iterations.to_string(),
            self.ring_merge_radius_factor.to_string(),
            self.open_surface.to_string(),
            self.method.to_string(),
            self.height_model.to_string(),
            mode.to_string(),
            self.samples.to_string(),
            self.max_samples.to_string(),
            self.seed.to_string(),
        ];
        let mut s = String::new();
        for (k, v) in CONFIG_KEYS.iter().zip(values) {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.small_factor > 0.0 && self.small_factor < self.medium_factor && self.medium_factor.is_finite()) {
            return Err("need 0 < small_factor < medium_factor".into());
        }
        if !(-1.0..=1.0).contains(&self.fracture_cos) {
            return Err("fracture_cos must lie in [-1, 1]".into());
        }
        if !(self.ring_merge_radius_factor >= 0.0 && self.ring_merge_radius_factor.is_finite()) {
            return Err("ring_merge_radius_factor must be non-negative".into());
        }
        if self.sampling_mode == SamplingMode::VerticesPlusFaceSamples && !(self.samples > 0.0 && self.samples.is_finite()) {
            return Err("samples must be positive".into());
        }
        if self.sampling_mode == SamplingMode::VerticesPlusFaceSamples && self.max_samples == 0 {
            return Err("max_samples must be positive".into());
        }
        Ok(())
    }

    pub fn fill(&self) -> FillConfig {
        FillConfig {
            small_factor: self.small_factor,
            medium_factor: self.medium_factor,
            fracture_cos: self.fracture_cos,
            smooth_iterations: self.smooth_iterations,
            ring_merge_radius_factor: self.ring_merge_radius_factor,
            open_surface: self.open_surface,
            method: self.method,
            height_model: self.height_model,
        }
    }

    pub fn sampling(&self) -> SamplingSpec {
        SamplingSpec {
            mode: self.sampling_mode,
            density: self.samples,
            max_face_samples: self.max_samples,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "holefill", version, about = "Fill holes in triangle meshes and measure the result")]
pub struct Cli {
    /// key = value file with defaults for the tuning flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Tuning {
    /// Holes narrower than this many spacings are small [default: 1.5]
    #[arg(long)]
    pub small_factor: Option<f64>,
    /// Holes up to this many spacings are medium [default: 2.5]
    #[arg(long)]
    pub medium_factor: Option<f64>,
    /// Normal cosine below which a rim vertex is a fracture point [default: 0.7]
    #[arg(long)]
    pub fracture_cos: Option<f64>,
    /// Height smoothing passes over new vertices [default: 3]
    #[arg(long)]
    pub smooth_iterations: Option<usize>,
    /// Front points closer than this many spacings merge [default: 0.5]
    #[arg(long)]
    pub ring_merge_radius_factor: Option<f64>,
    /// Leave the longest boundary loop open
    #[arg(long)]
    pub open_surface: bool,
    /// segmented-ring, centroid-only or baseline
    #[arg(long)]
    pub method: Option<FillMethod>,
    /// inherit, quadric or bezier
    #[arg(long)]
    pub height_model: Option<HeightModel>,
    /// Face samples per average face area
    #[arg(long)]
    pub samples: Option<f64>,
    /// Cap on face samples per surface [default: 2000000]
    #[arg(long)]
    pub max_samples: Option<usize>,
    /// Sample vertices only
    #[arg(long)]
    pub vertices_only: bool,
    /// Sampling seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the holes of a mesh
    Inspect {
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Fill every hole and write the result
    Fill {
        input: PathBuf,
        output: PathBuf,
        /// Write the per-hole report as JSON
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write .ply output as ascii instead of binary
        #[arg(long)]
        ascii: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Distances between two meshes, the first being the reference
    Eval {
        reference: PathBuf,
        candidate: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Generate a synthetic shape and cut holes in it
    Punch {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Where to write the punched mesh
        #[arg(long)]
        output: PathBuf,
        /// Also write the unpunched shape
        #[arg(long)]
        original: Option<PathBuf>,
        #[arg(long)]
        ascii: bool,
        #[arg(long)]
        json: bool,
    },
    /// Punch, fill with each method and compare against the original
    Bench {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Comma-separated methods, or `all`
        #[arg(long, default_value = "all")]
        methods: String,
        /// CSV destination; stdout when absent
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Print JSON rows instead of CSV
        #[arg(long)]
        json: bool,
        /// Record runtimes (makes the output vary between runs)
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    /// sphere, torus, plane, saddle, crease or two-crease
    #[arg(long)]
    pub shape: String,
    #[arg(long, default_value_t = 20_000)]
    pub faces: usize,
    /// Punch where the creases run
    #[arg(long)]
    pub on_crease: bool,
    /// Default hole size in mean edge lengths
    #[arg(long, default_value_t = 9.0)]
    pub span: f64,
    /// Explicit punch centres as x,y,z (repeatable, replaces the default)
    #[arg(long = "center", value_parser = parse_point)]
    pub centers: Vec<Point>,
    /// Radius per centre, or one radius for all
    #[arg(long = "radius")]
    pub radii: Vec<f64>,
    /// Allow overlapping balls that merge into one hole
    #[arg(long)]
    pub multi_lobe: bool,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad coordinate '{t}'")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [x, y, z] => Ok(Point::new(*x, *y, *z)),
        _ => Err("expected x,y,z".into()),
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

fn resolve(config_path: Option<&Path>, t: &Tuning) -> Result<RunConfig, Failure> {
    let mut c = match config_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
            RunConfig::from_config_str(&text).map_err(Failure::input)?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = t.small_factor {
        c.small_factor = v;
    }
    if let Some(v) = t.medium_factor {
        c.medium_factor = v;
    }
    if let Some(v) = t.fracture_cos {
        c.fracture_cos = v;
    }
    if let Some(v) = t.smooth_iterations {
        c.smooth_iterations = v;
    }
    if let Some(v) = t.ring_merge_radius_factor {
        c.ring_merge_radius_factor = v;
    }
    if t.open_surface {
        c.open_surface = true;
    }
    if let Some(v) = t.method {
        c.method = v;
    }
    if let Some(v) = t.height_model {
        c.height_model = v;
    }
    if let Some(v) = t.samples {
        c.samples = v;
    }
    if let Some(v) = t.max_samples {
        c.max_samples = v;
    }
    if t.vertices_only {
        c.sampling_mode = SamplingMode::VerticesOnly;
    }
    if let Some(v) = t.seed {
        c.seed = v;
    }
    c.validate().map_err(Failure::input)?;
    Ok(c)
}

fn load(path: &Path) -> Result<TriangleMesh, Failure> {
    io::read_mesh(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn save(path: &Path, mesh: &TriangleMesh, ascii: bool) -> Result<(), Failure> {
    let mut format = MeshFormat::from_path(path).map_err(Failure::input)?;
    if ascii && matches!(format, MeshFormat::Ply(_)) {
        format = MeshFormat::Ply(io::PlyFormat::Ascii);
    }
    io::write_mesh(path, mesh, format).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::input(format!("writing output: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

#[derive(Debug, Clone, Serialize)]
struct HoleInfo {
    hole_id: usize,
    boundary_vertices: usize,
    ds: f64,
    diameter: f64,
    class: HoleClass,
    fracture_points: usize,
}

fn cmd_inspect(input: &Path, json: bool, c: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let mesh = load(input)?;
    let loops = mesh.boundary_loops().map_err(Failure::input)?;
    let holes: Vec<HoleInfo> = loops
        .iter()
        .enumerate()
        .map(|(hole_id, lp)| {
            let hole = analyze_hole(&mesh, lp);
            HoleInfo {
                hole_id,
                boundary_vertices: hole.len(),
                ds: hole.ds,
                diameter: hole.diameter,
                class: classify_hole(&hole, c.small_factor, c.medium_factor),
                fracture_points: detect_fracture_points(&hole, c.fracture_cos).len(),
            }
        })
        .collect();
    let text = if json {
        to_json(&holes)
    } else {
        let mut s = format!(
            "{} vertices, {} faces, {} holes\n",
            mesh.vertex_count(),
            mesh.face_count(),
            holes.len()
        );
        for h in &holes {
            let _ = writeln!(
                s,
                "hole {}: {} vertices, ds {:.6e}, d_H {:.6e}, {}, {} fracture points",
                h.hole_id, h.boundary_vertices, h.ds, h.diameter, h.class, h.fracture_points
            );
        }
        s
    };
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_fill(
    input: &Path,
    output: &Path,
    report_path: Option<&Path>,
    ascii: bool,
    c: &RunConfig,
    err: &mut dyn Write,
) -> CmdResult {
    MeshFormat::from_path(output).map_err(Failure::input)?;
    let mut mesh = load(input)?;
    let report = fill_all_holes(&mut mesh, &c.fill()).map_err(Failure::input)?;
    save(output, &mesh, ascii)?;
    if let Some(p) = report_path {
        std::fs::write(p, to_json(&report)).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
    }
    let mut summary = format!(
        "filled {} of {} holes: {} new vertices, {} new faces\n",
        report.holes.len() - report.failures(),
        report.holes.len(),
        report.new_vertices(),
        report.new_faces()
    );
    for h in &report.holes {
        if let crate::fill::HoleStatus::Failed { reason } = &h.status {
            let _ = writeln!(summary, "hole {} failed: {reason}", h.hole_id);
        }
    }
    let _ = err.write_all(summary.as_bytes());
    Ok(if report.all_filled() { EXIT_OK } else { EXIT_PARTIAL })
}

fn cmd_eval(reference: &Path, candidate: &Path, json: bool, c: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let a = load(reference)?;
    let b = load(candidate)?;
    let r = hausdorff_report(&a, &b, &c.sampling()).map_err(Failure::input)?;
    let text = if json {
        to_json(&r)
    } else {
        format!(
            "delta_max {:e}\ndelta_avg {:e}\ndelta_max_normalized {:e}\ndelta_avg_normalized {:e}\n\
             forward_max {:e}\nbackward_max {:e}\nsamples {} {}\nbbox_diagonal {:e}\n",
            r.delta_max,
            r.delta_avg,
            r.delta_max_normalized,
            r.delta_avg_normalized,
            r.forward.max,
            r.backward.max,
            r.forward.samples,
            r.backward.samples,
            r.reference_diagonal
        )
    };
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn build_shape(args: &ShapeArgs) -> Result<(SyntheticShape, TriangleMesh, PunchSpec), Failure> {
    let shape = SyntheticShape::named(&args.shape, args.faces).ok_or_else(|| {
        Failure::input(format!(
            "unknown shape '{}' (expected one of {})",
            args.shape,
            SyntheticShape::NAMES.join(", ")
        ))
    })?;
    if args.faces == 0 {
        return Err(Failure::input("--faces must be positive"));
    }
    let mesh = shape.generate();
    let spec = if args.centers.is_empty() {
        if !args.radii.is_empty() {
            return Err(Failure::input("--radius needs --center"));
        }
        harness::standard_punch(&shape, &mesh, args.span, args.on_crease)
    } else {
        let radii = match args.radii.len() {
            1 => vec![args.radii[0]; args.centers.len()],
            n if n == args.centers.len() => args.radii.clone(),
            _ => return Err(Failure::input("give one --radius, or one per --center")),
        };
        PunchSpec {
            centers: args.centers.clone(),
            radii,
            mode: if args.multi_lobe {
                PunchMode::MultiLobe
            } else {
                PunchMode::SingleLobe
            },
        }
    };
    Ok((shape, mesh, spec))
}

fn cmd_punch(args: &ShapeArgs, output: &Path, original: Option<&Path>, ascii: bool, json: bool, out: &mut dyn Write) -> CmdResult {
    let (shape, mesh, spec) = build_shape(args)?;
    let (punched, record) = harness::punch(&mesh, &spec).map_err(Failure::input)?;
    save(output, &punched, ascii)?;
    if let Some(p) = original {
        save(p, &mesh, ascii)?;
    }
    let holes = harness::hole_count(&punched, !shape.is_closed()).map_err(Failure::input)?;
    #[derive(Serialize)]
    struct PunchSummary<'a> {
        shape: &'a str,
        faces: usize,
        punched_faces: usize,
        holes: usize,
        removed_faces: usize,
        cleanup_faces: usize,
        dropped_vertices: usize,
        spec: &'a PunchSpec,
    }
    let summary = PunchSummary {
        shape: shape.name(),
        faces: mesh.face_count(),
        punched_faces: punched.face_count(),
        holes,
        removed_faces: record.removed_faces.len(),
        cleanup_faces: record.cleanup_faces.len(),
        dropped_vertices: record.dropped_vertices.len(),
        spec: &spec,
    };
    let text = if json {
        to_json(&summary)
    } else {
        format!(
            "{}: {} faces, removed {}, {} holes\n",
            summary.shape,
            summary.faces,
            summary.removed_faces + summary.cleanup_faces,
            summary.holes
        )
    };
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn parse_methods(s: &str) -> Result<Vec<FillMethod>, Failure> {
    if s == "all" {
        return Ok(FillMethod::ALL.to_vec());
    }
    let methods: Vec<FillMethod> = s
        .split(',')
        .map(|m| m.trim().parse::<FillMethod>())
        .collect::<Result<_, _>>()
        .map_err(Failure::input)?;
    if methods.is_empty() {
        return Err(Failure::input("no methods given"));
    }
    Ok(methods)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    args: &ShapeArgs,
    methods: &str,
    csv: Option<&Path>,
    json: bool,
    timing: bool,
    c: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let methods = parse_methods(methods)?;
    let (shape, mesh, spec) = build_shape(args)?;
    let (punched, _) = harness::punch(&mesh, &spec).map_err(Failure::input)?;
    let config = BenchConfig {
        fill: FillConfig {
            open_surface: c.open_surface || !shape.is_closed(),
            ..c.fill()
        },
        sampling: c.sampling(),
        timing,
    };
    let rows = harness::run_benchmark(shape.name(), &mesh, &punched, &methods, &config).map_err(Failure::input)?;
    let mut table = Vec::new();
    let _ = harness::write_table(&mut table, &rows);
    let _ = err.write_all(&table);
    let mut data = Vec::new();
    if json {
        data = to_json(&rows).into_bytes();
    } else {
        harness::write_csv(&mut data, &rows).map_err(|e| Failure::input(e.to_string()))?;
    }
    match csv {
        Some(p) => std::fs::write(p, &data).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?,
        None => emit(out, &String::from_utf8_lossy(&data))?,
    }
    Ok(EXIT_OK)
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let config = cli.config.as_deref();
    let result = match &cli.command {
        Command::Inspect { input, json, tuning } => {
            resolve(config, tuning).and_then(|c| cmd_inspect(input, *json, &c, out))
        }
        Command::Fill {
            input,
            output,
            report,
            ascii,
            tuning,
        } => resolve(config, tuning).and_then(|c| cmd_fill(input, output, report.as_deref(), *ascii, &c, err)),
        Command::Eval {
            reference,
            candidate,
            json,
            tuning,
        } => resolve(config, tuning).and_then(|c| cmd_eval(reference, candidate, *json, &c, out)),
        Command::Punch {
            shape,
            output,
            original,
            ascii,
            json,
        } => cmd_punch(shape, output, original.as_deref(), *ascii, *json, out),
        Command::Bench {
            shape,
            methods,
            csv,
            json,
            timing,
            tuning,
        } => resolve(config, tuning).and_then(|c| cmd_bench(shape, methods, csv.as_deref(), *json, *timing, &c, out, err)),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips() {
        let c = RunConfig {
            small_factor: 1.25,
            medium_factor: 0.1 + 0.2 + 2.0,
            fracture_cos: -0.3,
            smooth_iterations: 7,
            ring_merge_radius_factor: 1.0 / 3.0,
            open_surface: true,
            method: FillMethod::Baseline,
            height_model: HeightModel::Bezier,
            sampling_mode: SamplingMode::VerticesOnly,
            samples: 2.5,
            max_samples: 1234,
            seed: u64::MAX,
        };
        assert_eq!(RunConfig::from_config_str(&c.to_config_string()).unwrap(), c);
        let d = RunConfig::default();
        assert_eq!(RunConfig::from_config_str(&d.to_config_string()).unwrap(), d);
    }

    #[test]
    fn config_errors_name_the_line() {
        let e = RunConfig::from_config_str("# c\nseed = 3\nsmall_factor = x\n").unwrap_err();
        assert!(e.contains("line 3"), "{e}");
        assert!(RunConfig::from_config_str("bogus = 1").is_err());
        assert!(RunConfig::from_config_str("seed").is_err());
    }

    #[test]
    fn validation() {
        let ok = RunConfig::default();
        assert!(ok.validate().is_ok());
        assert!(RunConfig { small_factor: 3.0, ..ok }.validate().is_err());
        assert!(RunConfig { fracture_cos: 1.5, ..ok }.validate().is_err());
        assert!(RunConfig { samples: 0.0, ..ok }.validate().is_err());
        assert!(RunConfig {
            samples: 0.0,
            sampling_mode: SamplingMode::VerticesOnly,
            ..ok
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn bad_flags_exit_2() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["holefill", "frobnicate"], &mut out, &mut err), EXIT_INPUT);
        assert_eq!(run(["holefill", "--help"], &mut out, &mut err), EXIT_OK);
        let code = run(
            ["holefill", "bench", "--shape", "blob", "--faces", "100"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_INPUT);
    }
}
