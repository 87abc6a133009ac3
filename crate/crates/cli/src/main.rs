//! `weaktomo`: command-line driver for the tomography experiments.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 1 I/O error.
//! The worker pool size follows `RAYON_NUM_THREADS`.

use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use weaktomo::dasarvind::{basis_distribution, uniformity_metric, DaConfig};
use weaktomo::estimate::{run_experiment, ExperimentPlan};
use weaktomo::fisher::{crb, crb_povm, scan_crb, CrbResult, SphereRule};
use weaktomo::povm::{random_odop_decomposition, OdopVerdict};
use weaktomo::protocol::{ProtocolKind, ProtocolSpec};
use weaktomo::Tolerances;

#[derive(Parser)]
#[command(name = "weaktomo", version, about = "Weak-measurement qubit tomography experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cramér–Rao constant C over a grid of coupling strengths.
    CrbScan(CrbScanArgs),
    /// Sequential Monte Carlo average infidelity versus number of copies.
    Simulate(SimulateArgs),
    /// Das–Arvind distribution of measurement bases on the +y hemisphere.
    BasisDistribution(BasisArgs),
    /// POVM validation and random-ODOP decomposition report.
    PovmCheck(PovmCheckArgs),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct CrbScanArgs {
    #[arg(long)]
    protocol: ProtocolKind,
    /// Strength grid as start:stop:count.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
    #[arg(long, default_value_t = 64)]
    cos_theta_nodes: usize,
    #[arg(long, default_value_t = 128)]
    azimuth_nodes: usize,
    /// Report divergent C values without failing.
    #[arg(long)]
    allow_divergent: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    protocol: ProtocolKind,
    /// DST coupling strength (default 0.89).
    #[arg(long)]
    phi: Option<f64>,
    /// Das–Arvind meter strength (default 0.575).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of copies.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = ExperimentPlan::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = ExperimentPlan::DEFAULT_PARTICLES)]
    particles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BasisArgs {
    #[arg(long, default_value_t = 0.575)]
    epsilon: f64,
    /// Gauss–Legendre nodes per meter axis.
    #[arg(long, default_value_t = 801)]
    nodes: usize,
    /// Half-width of each meter range in standard deviations.
    #[arg(long, default_value_t = DaConfig::DEFAULT_RANGE_SD)]
    range_sd: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PovmCheckArgs {
    #[arg(long)]
    protocol: ProtocolKind,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Also write the POVM as a JSON document.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err("expected start:stop:count".into());
    };
    let start: f64 = start.parse().map_err(|e| format!("start: {e}"))?;
    let stop: f64 = stop.parse().map_err(|e| format!("stop: {e}"))?;
    let count: usize = count.parse().map_err(|e| format!("count: {e}"))?;
    match count {
        0 => Err("count must be positive".into()),
        1 => Ok(Grid(vec![start])),
        _ => Ok(Grid(
            (0..count)
                .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
                .collect(),
        )),
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl From<weaktomo::Error> for Failure {
    fn from(e: weaktomo::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Data goes to `--out` or stdout. Summaries go to stdout when the data has
/// its own file, stderr otherwise, so piped CSV stays clean.
struct Sink {
    out: Option<PathBuf>,
    format: Format,
}

impl Sink {
    fn new(output: &Output) -> Self {
        Self {
            out: output.out.clone(),
            format: output.format,
        }
    }

    fn writer(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
            None => Box::new(io::BufWriter::new(io::stdout().lock())),
        })
    }

    fn summary(&self, line: &str) {
        if self.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }

    fn write<R: Serialize, J: Serialize + ?Sized>(&self, rows: &[R], json: &J) -> Outcome {
        let mut w = self.writer()?;
        match self.format {
            Format::Csv => {
                let mut csv = csv::Writer::from_writer(&mut w);
                for row in rows {
                    csv.serialize(row)?;
                }
                csv.flush()?;
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, json)?;
                writeln!(w)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn usage(e: weaktomo::Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn protocol_spec(
    kind: ProtocolKind,
    phi: Option<f64>,
    epsilon: Option<f64>,
) -> Result<ProtocolSpec, Failure> {
    let spec = match kind {
        ProtocolKind::DasArvind => kind.with_strength(epsilon.unwrap_or(0.575)),
        _ => kind.with_strength(phi.unwrap_or(0.89)),
    };
    spec.validate().map_err(usage)?;
    Ok(spec)
}

#[derive(Serialize)]
struct CrbRow {
    strength: Option<f64>,
    #[serde(rename = "C")]
    c: f64,
    divergent: bool,
}

fn crb_scan(args: CrbScanArgs) -> Outcome {
    let sink = Sink::new(&args.output);
    let rule = SphereRule {
        cos_theta_nodes: args.cos_theta_nodes,
        azimuth_nodes: args.azimuth_nodes,
    };
    let points: Vec<(Option<f64>, CrbResult)> = if args.protocol.has_strength() {
        let Grid(strengths) = args.grid.unwrap_or_else(|| match args.protocol {
            ProtocolKind::DasArvind => parse_grid("0.1:1.0:20").expect("valid"),
            _ => parse_grid(&format!("0.05:{FRAC_PI_2}:30")).expect("valid"),
        });
        for &s in &strengths {
            args.protocol.with_strength(s).validate().map_err(usage)?;
        }
        scan_crb(args.protocol, &strengths, rule)?
            .points
            .into_iter()
            .map(|(s, r)| (Some(s), r))
            .collect()
    } else {
        let povm = args.protocol.with_strength(0.0).povm()?;
        vec![(None, crb_povm(&povm, rule)?)]
    };

    let rows: Vec<CrbRow> = points
        .iter()
        .map(|(s, r)| CrbRow {
            strength: *s,
            c: r.c_value,
            divergent: r.divergent,
        })
        .collect();
    sink.write(&rows, &points)?;

    let best = points
        .iter()
        .filter(|(_, r)| !r.divergent)
        .min_by(|a, b| a.1.c_value.total_cmp(&b.1.c_value));
    match best {
        Some((Some(s), r)) => sink.summary(&format!(
            "{}: argmin strength {s:.6}, C = {:.6}",
            args.protocol, r.c_value
        )),
        Some((None, r)) => sink.summary(&format!("{}: C = {:.6}", args.protocol, r.c_value)),
        None => sink.summary(&format!("{}: every point divergent", args.protocol)),
    }
    let divergent: Vec<String> = points
        .iter()
        .filter(|(_, r)| r.divergent)
        .map(|(s, _)| s.map_or_else(|| "-".into(), |s| format!("{s:.6}")))
        .collect();
    if !divergent.is_empty() {
        sink.summary(&format!("divergent at: {}", divergent.join(", ")));
        if !args.allow_divergent {
            return Err(Failure::Numerical(
                "C diverges (pass --allow-divergent to accept)".into(),
            ));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CurveRow {
    #[serde(rename = "N")]
    n: u64,
    mean_infidelity: f64,
    stderr: f64,
    protocol: String,
    strength: Option<f64>,
}

fn simulate(args: SimulateArgs) -> Outcome {
    let sink = Sink::new(&args.output);
    let spec = protocol_spec(args.protocol, args.phi, args.epsilon)?;
    let plan = ExperimentPlan::new(spec, args.n, args.seed)
        .with_trials(args.trials)
        .with_particles(args.particles);
    plan.validate().map_err(usage)?;
    let curve = run_experiment(&plan)?;
    let rows: Vec<CurveRow> = curve
        .points
        .iter()
        .map(|p| CurveRow {
            n: p.n,
            mean_infidelity: p.mean_infidelity,
            stderr: p.stderr,
            protocol: spec.kind().to_string(),
            strength: spec.strength(),
        })
        .collect();
    sink.write(&rows, &curve)?;

    let last = curve.points.last().expect("at least one checkpoint");
    let c = crb(&spec)?;
    let asymptote = if c.divergent {
        "divergent".to_string()
    } else {
        format!("{:.4e}", c.c_value / args.n as f64)
    };
    sink.summary(&format!(
        "{spec}: N = {}, mean infidelity {:.4e} ± {:.1e}, C/N = {asymptote}",
        last.n, last.mean_infidelity, last.stderr
    ));
    Ok(())
}

fn basis(args: BasisArgs) -> Outcome {
    let sink = Sink::new(&args.output);
    let config = DaConfig::with_grid(args.epsilon, args.nodes, args.range_sd).map_err(usage)?;
    let points = basis_distribution(&config)?;
    let metric = uniformity_metric(&points)?;

    #[derive(Serialize)]
    struct Row {
        nx: f64,
        ny: f64,
        nz: f64,
        weight: f64,
    }
    let rows: Vec<Row> = points
        .iter()
        .map(|p| Row {
            nx: p.n[0],
            ny: p.n[1],
            nz: p.n[2],
            weight: p.weight,
        })
        .collect();
    sink.write(&rows, &points)?;
    sink.summary(&format!("uniformity metric (ε = {}): {metric:.6}", args.epsilon));
    Ok(())
}

fn povm_check(args: PovmCheckArgs) -> Outcome {
    let spec = protocol_spec(args.protocol, args.phi, args.epsilon)?;
    let povm = spec.povm()?;
    let tol = match spec {
        ProtocolSpec::DasArvind { .. } => Tolerances::DEFAULT.with_completeness(1e-6),
        _ => Tolerances::DEFAULT,
    };
    let report = povm.validate(&tol);
    println!("protocol: {spec}");
    println!("elements: {}", povm.len());
    println!("completeness deficit: {:.3e}", report.completeness_deficit);
    println!("positivity violation: {:.3e}", report.positivity_violation.abs());
    println!("hermiticity defect: {:.3e}", report.hermiticity_defect);
    println!("valid: {}", if report.passes { "yes" } else { "no" });
    match random_odop_decomposition(&povm, &tol)? {
        OdopVerdict::Decomposable(d) => {
            println!("random ODOP: yes ({} bases)", d.pairs.len())
        }
        OdopVerdict::NotDecomposable { unmatched } => {
            println!("random ODOP: no ({} unmatched)", unmatched.len())
        }
    }
    if let Some(path) = args.json {
        let mut f = File::create(path)?;
        f.write_all(povm.to_json().as_bytes())?;
        writeln!(f)?;
    }
    if !report.passes {
        return Err(Failure::Numerical("POVM fails validation".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::CrbScan(a) => crb_scan(a),
        Command::Simulate(a) => simulate(a),
        Command::BasisDistribution(a) => basis(a),
        Command::PovmCheck(a) => povm_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let Grid(g) = parse_grid("0.05:1.5:30").unwrap();
        assert_eq!(g.len(), 30);
        assert_eq!(g[0], 0.05);
        assert!((g[29] - 1.5).abs() < 1e-15);
        assert_eq!(parse_grid("0.3:9:1").unwrap().0, vec![0.3]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a:1:3").is_err());
    }
}
