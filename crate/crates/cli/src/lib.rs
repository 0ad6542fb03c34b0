//! Command dispatch for the `ridgenet` binary.
//!
//! Every command reads a configuration (a JSON file or a named preset), writes
//! one artifact (JSON or CSV) to `--output` or stdout, and maps outcomes to
//! exit codes: 0 success, 2 failed precondition, 1 anything else.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use ridgenet::activation::{build_k_network, decode_poly, ActivationSpec, SigmaEvaluator, KNetworkOptions, Region};
use ridgenet::bolts::{build_bolt_graph, find_closed_bolt, orbits, weak_star_probe, ProbeTest};
use ridgenet::incidence::{find_closed_path, interpolate_ridge, ClosedPathCertificate, PointConfig};
use ridgenet::netapprox::{approx_network, FitOptions, SigmaDescriptor, ThetaInterval};
use ridgenet::presets::{paper_orbit, Preset};
use ridgenet::rational::{self, Rational};
use ridgenet::{Direction, Error, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Paths,
    Bolts,
    Orbits,
    Probe,
    Ridgefit,
    Netfit,
    SigmaBuild,
    SigmaEval,
    Kfit,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "ridgenet", about = "Density tests and constructive ridge networks on finite point sets")]
pub struct JobConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Configuration JSON: {"dimension", "points", "directions", "values"?}.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Artifact path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub l: Option<String>,
    /// Orbit length for `paper-orbit`, probe horizon, or polynomial count for `sigma-build`.
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated probe tests: x, y, x2, xy, ridge-sq, ridge-cube.
    #[arg(long)]
    pub tests: Option<String>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
    #[arg(long)]
    pub step: Option<String>,
    #[arg(long = "theta-lo", allow_hyphen_values = true)]
    pub theta_lo: Option<f64>,
    #[arg(long = "theta-hi", allow_hyphen_values = true)]
    pub theta_hi: Option<f64>,
    /// logistic, tanh-ramp, or a path to a `t,y` CSV table.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Target function when the input carries no values: xy, norm, sum, x2, zero, random.
    #[arg(long)]
    pub target: Option<String>,
}

/// Input file schema; rationals are `"p/q"` or decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigFile {
    pub dimension: usize,
    pub points: Vec<Vec<String>>,
    pub directions: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
}

/// A failed job: exit code plus message; `artifact` is still written when present.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub artifact: Option<String>,
}

impl Failure {
    fn internal(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into(), artifact: None }
    }

    fn precondition(message: impl Into<String>, artifact: Option<String>) -> Self {
        Failure { code: 2, message: message.into(), artifact }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ClosedPath(cert) => {
                Failure::precondition("configuration contains a closed path", Some(verdict_json(Some(&cert))))
            }
            Error::PolynomialActivation { .. } | Error::EncoderBudget { .. } | Error::FitBudget { .. } => {
                Failure::precondition(e.to_string(), None)
            }
            other => Failure::internal(other.to_string()),
        }
    }
}

type JobResult<T> = std::result::Result<T, Failure>;

/// Runs a job and writes its artifact. Returns the exit code.
pub fn run(cfg: &JobConfig) -> i32 {
    let (code, artifact, message) = match execute(cfg) {
        Ok(text) => (0, Some(text), None),
        Err(f) => (f.code, f.artifact, Some(f.message)),
    };
    if let Some(text) = artifact {
        if let Err(e) = emit(cfg, &text) {
            eprintln!("error: {e}");
            return 1;
        }
    }
    if let Some(m) = message {
        eprintln!("{}: {m}", if code == 2 { "refused" } else { "error" });
    }
    code
}

fn emit(cfg: &JobConfig, text: &str) -> std::io::Result<()> {
    match &cfg.output {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Produces the artifact text for a job without writing it.
pub fn execute(cfg: &JobConfig) -> JobResult<String> {
    match cfg.command {
        Command::Paths => paths(cfg),
        Command::Bolts => bolts_cmd(cfg),
        Command::Orbits => orbits_cmd(cfg),
        Command::Probe => probe(cfg),
        Command::Ridgefit => ridgefit(cfg),
        Command::Netfit => netfit(cfg),
        Command::SigmaBuild => sigma_build(cfg),
        Command::SigmaEval => sigma_eval_cmd(cfg),
        Command::Kfit => kfit(cfg),
    }
}

fn parse_rational(s: &str, what: &str) -> JobResult<Rational> {
    rational::parse(s).map_err(|e| Failure::internal(format!("{what}: {e}")))
}

/// Parses a configuration file body.
pub fn parse_config(text: &str) -> JobResult<(PointConfig, Option<Vec<Rational>>)> {
    let file: ConfigFile =
        serde_json::from_str(text).map_err(|e| Failure::internal(format!("malformed input JSON: {e}")))?;
    let row = |r: &[String], what: &str| -> JobResult<Vec<Rational>> {
        if r.len() != file.dimension {
            return Err(Failure::internal(format!("{what} has {} coordinates, expected {}", r.len(), file.dimension)));
        }
        r.iter().map(|s| parse_rational(s, what)).collect()
    };
    let points = file
        .points
        .iter()
        .map(|r| row(r, "point").and_then(|c| Point::new(c).map_err(Failure::from)))
        .collect::<JobResult<Vec<_>>>()?;
    let dirs = file
        .directions
        .iter()
        .map(|r| row(r, "direction").and_then(|c| Direction::new(c).map_err(Failure::from)))
        .collect::<JobResult<Vec<_>>>()?;
    let cfg = PointConfig::new(points, dirs)?;
    let values = match &file.values {
        None => None,
        Some(v) if v.len() != cfg.len() => {
            return Err(Failure::internal(format!("{} values for {} points", v.len(), cfg.len())))
        }
        Some(v) => Some(v.iter().map(|s| parse_rational(s, "value")).collect::<JobResult<Vec<_>>>()?),
    };
    Ok((cfg, values))
}

fn preset(cfg: &JobConfig) -> JobResult<Option<Preset>> {
    cfg.preset.as_deref().map(|p| p.parse::<Preset>().map_err(Failure::from)).transpose()
}

fn load(cfg: &JobConfig) -> JobResult<(PointConfig, Option<Vec<Rational>>)> {
    match (&cfg.input, preset(cfg)?) {
        (Some(_), Some(_)) => Err(Failure::internal("give either --input or --preset, not both")),
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::internal(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)
        }
        (None, Some(p)) => Ok((p.config(cfg.n.unwrap_or(10))?, None)),
        (None, None) => Err(Failure::internal("a configuration is required (--input or --preset)")),
    }
}

/// Values of a named target function on the configuration.
pub fn target_values(name: &str, cfg: &PointConfig, seed: u64) -> JobResult<Vec<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cfg.points()
        .iter()
        .map(|x| {
            let c = x.coords();
            Ok(match name {
                "xy" if c.len() >= 2 => &c[0] * &c[1],
                "x2" => &c[0] * &c[0],
                "sum" => c.iter().sum(),
                "zero" => rational::int(0),
                "norm" => {
                    let sq: f64 = x.to_f64().iter().map(|v| v * v).sum();
                    rational::from_f64(sq.sqrt())?
                }
                "random" => rational::ratio(rng.gen_range(-1000..=1000), 1000),
                _ => return Err(Failure::internal(format!("unknown target {name:?} for dimension {}", c.len()))),
            })
        })
        .collect()
}

fn values_for(cfg: &JobConfig, pc: &PointConfig, given: Option<Vec<Rational>>) -> JobResult<Vec<Rational>> {
    match (given, &cfg.target) {
        (Some(v), None) => Ok(v),
        (_, Some(t)) => target_values(t, pc, cfg.seed),
        (None, None) => Err(Failure::internal("values are required (input \"values\" or --target)")),
    }
}

fn eps(cfg: &JobConfig) -> JobResult<f64> {
    match cfg.eps {
        Some(e) if e > 0.0 && e.is_finite() => Ok(e),
        Some(_) => Err(Failure::internal("--eps must be positive")),
        None => Err(Failure::internal("--eps is required")),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// `{"verdict": "dense"}` or `{"verdict": "not_dense", "certificate": …}`.
pub fn verdict_json(cert: Option<&ClosedPathCertificate>) -> String {
    pretty(&match cert {
        None => json!({ "verdict": "dense" }),
        Some(c) => json!({ "verdict": "not_dense", "certificate": c }),
    })
}

fn paths(cfg: &JobConfig) -> JobResult<String> {
    let (pc, _) = load(cfg)?;
    match find_closed_path(&pc) {
        None => Ok(verdict_json(None)),
        Some(cert) => Err(Failure::precondition("not dense: closed path found", Some(verdict_json(Some(&cert))))),
    }
}

fn two_directions(pc: &PointConfig) -> JobResult<(Direction, Direction)> {
    match pc.dirs() {
        [a1, a2] => Ok((a1.clone(), a2.clone())),
        d => Err(Failure::precondition(format!("bolts need exactly 2 directions, got {}", d.len()), None)),
    }
}

fn bolts_cmd(cfg: &JobConfig) -> JobResult<String> {
    let (pc, _) = load(cfg)?;
    let (a1, a2) = two_directions(&pc)?;
    let graph = build_bolt_graph(pc.points().to_vec(), a1, a2)?;
    let out = match find_closed_bolt(&graph) {
        None => json!({ "closed_bolt": null, "points": pc.points() }),
        Some(cb) => json!({
            "closed_bolt": {
                "indices": cb.indices,
                "points": cb.bolt.points,
                "alternating_measure": cb.alternating_measure(),
            },
            "points": pc.points(),
        }),
    };
    Ok(pretty(&out))
}

fn orbits_cmd(cfg: &JobConfig) -> JobResult<String> {
    let (pc, _) = load(cfg)?;
    let (a1, a2) = two_directions(&pc)?;
    let graph = build_bolt_graph(pc.points().to_vec(), a1, a2)?;
    let classes = orbits(&graph);
    Ok(pretty(&json!({ "count": classes.len(), "orbits": classes })))
}

fn probe_test(name: &str) -> JobResult<ProbeTest> {
    use std::sync::Arc;
    Ok(match name {
        "x" => ProbeTest::coordinate("x", 0),
        "y" => ProbeTest::coordinate("y", 1),
        "x2" => ProbeTest::General { name: "x2".into(), f: Arc::new(|p: &Point| &p.coords()[0] * &p.coords()[0]) },
        "xy" => ProbeTest::General { name: "xy".into(), f: Arc::new(|p: &Point| &p.coords()[0] * &p.coords()[1]) },
        "ridge-sq" => ProbeTest::Ridge {
            name: "ridge-sq".into(),
            g1: Arc::new(|s: &Rational| s * s),
            g2: Arc::new(|s: &Rational| s.clone()),
        },
        "ridge-cube" => ProbeTest::Ridge {
            name: "ridge-cube".into(),
            g1: Arc::new(|s: &Rational| s * s * s),
            g2: Arc::new(|s: &Rational| s * s),
        },
        _ => return Err(Failure::internal(format!("unknown probe test {name:?}"))),
    })
}

fn probe(cfg: &JobConfig) -> JobResult<String> {
    if cfg.input.is_some() || preset(cfg)? != Some(Preset::PaperOrbit) {
        return Err(Failure::internal("probe runs on a generated bolt: use --preset paper-orbit"));
    }
    let tests = cfg
        .tests
        .as_deref()
        .unwrap_or("x,y")
        .split(',')
        .map(|s| probe_test(s.trim()))
        .collect::<JobResult<Vec<_>>>()?;
    let report = weak_star_probe(&paper_orbit(), &tests, cfg.n.unwrap_or(1000), cfg.eps.unwrap_or(1e-2))?;
    eprintln!("verdict: {}", report.verdict);
    Ok(report.to_csv())
}

fn ridgefit(cfg: &JobConfig) -> JobResult<String> {
    let (pc, given) = load(cfg)?;
    let values = values_for(cfg, &pc, given)?;
    let fit = interpolate_ridge(&pc, &values)?;
    let profiles: Vec<_> = (0..pc.dirs().len())
        .map(|i| {
            let rows: Vec<_> = fit
                .sum
                .table(i)
                .iter()
                .map(|(y, g)| json!({ "level": rational::format(y), "value": rational::format(g) }))
                .collect();
            json!({ "direction": pc.dirs()[i], "profile": rows })
        })
        .collect();
    let cert = find_closed_path(&pc);
    Ok(pretty(&json!({
        "residual": rational::format(&fit.residual),
        "exact": num_traits::Zero::is_zero(&fit.residual),
        "dense": cert.is_none(),
        "profiles": profiles,
    })))
}

fn sigma_descriptor(name: &str) -> JobResult<SigmaDescriptor> {
    match name {
        "logistic" => Ok(SigmaDescriptor::Logistic),
        "tanh-ramp" => Ok(SigmaDescriptor::TanhRamp),
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::internal(format!("sigma {path:?} is neither built in nor a readable table: {e}")))?;
            Ok(SigmaDescriptor::table_from_csv(&text)?)
        }
    }
}

fn netfit(cfg: &JobConfig) -> JobResult<String> {
    let (pc, given) = load(cfg)?;
    let values = values_for(cfg, &pc, given)?;
    let sigma = sigma_descriptor(cfg.sigma.as_deref().unwrap_or("logistic"))?.oracle()?;
    let theta = ThetaInterval::new(cfg.theta_lo, cfg.theta_hi)?;
    let build = approx_network(&pc, &values, &sigma, &theta, eps(cfg)?, &FitOptions::default())?;
    Ok(build.network.to_json() + "\n")
}

fn activation_spec(cfg: &JobConfig) -> JobResult<ActivationSpec> {
    let alpha = parse_rational(cfg.alpha.as_deref().unwrap_or("1"), "alpha")?;
    let l = parse_rational(cfg.l.as_deref().unwrap_or("1"), "l")?;
    Ok(ActivationSpec::new(alpha, l)?)
}

fn sigma_build(cfg: &JobConfig) -> JobResult<String> {
    let spec = activation_spec(cfg)?;
    let count = cfg.n.unwrap_or(10);
    let polys: Vec<_> = (1..=count as u64)
        .map(|m| {
            let m = BigUint::from(m);
            json!({
                "m": m.to_string(),
                "segment_start": rational::format(&spec.segment_start(&m)),
                "shift": rational::format(&spec.shift(&m)),
                "poly": decode_poly(&m).to_string(),
            })
        })
        .collect();
    Ok(pretty(&json!({ "spec": spec, "lambda": rational::format(&spec.lambda()), "segments": polys })))
}

fn sigma_eval_cmd(cfg: &JobConfig) -> JobResult<String> {
    let spec = activation_spec(cfg)?;
    let from = parse_rational(cfg.from.as_deref().unwrap_or("0"), "from")?;
    let to = parse_rational(cfg.to.as_deref().unwrap_or("10"), "to")?;
    let step = parse_rational(cfg.step.as_deref().unwrap_or("0.01"), "step")?;
    if step <= rational::int(0) || to < from {
        return Err(Failure::internal("need step > 0 and to ≥ from"));
    }
    let ev = SigmaEvaluator::new(spec.clone());
    let mut out = String::from("t,sigma,region,exact\n");
    let mut t = from;
    while t <= to {
        let v = ev.eval(&t);
        let region = match spec.classify(&t) {
            Region::Left => "left".to_string(),
            Region::Segment(m) => format!("segment-{m}"),
            Region::Gap(m) => format!("gap-{m}"),
        };
        let exact = v.exact().map(rational::format).unwrap_or_default();
        writeln!(out, "{},{:e},{region},{exact}", rational::format(&t), v.to_f64()).expect("string write");
        t += &step;
    }
    Ok(out)
}

fn kfit(cfg: &JobConfig) -> JobResult<String> {
    let (pc, given) = load(cfg)?;
    let values = values_for(cfg, &pc, given)?;
    let opts = KNetworkOptions {
        alpha: cfg.alpha.as_deref().map(|s| parse_rational(s, "alpha")).transpose()?,
        l: cfg.l.as_deref().map(|s| parse_rational(s, "l")).transpose()?,
        ..KNetworkOptions::default()
    };
    let build = build_k_network(&pc, &values, eps(cfg)?, &opts)?;
    Ok(build.network.to_json() + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(args: &[&str]) -> JobConfig {
        JobConfig::parse_from(std::iter::once("ridgenet").chain(args.iter().copied()))
    }

    #[test]
    fn paths_on_closed_path_preset_is_refused_with_certificate() {
        let err = execute(&job(&["paths", "--preset", "paper-5pt"])).unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.artifact.unwrap().contains("not_dense"));
    }

    #[test]
    fn dense_preset_verdict() {
        assert!(execute(&job(&["paths", "--preset", "parallel-segments"])).unwrap().contains("\"dense\""));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_config("{\"dimension\": 2,\n \"points\": [}").unwrap_err();
        assert_eq!(err.code, 1);
        assert!(err.message.contains("line 2"), "{}", err.message);
    }

    #[test]
    fn config_file_parses_rationals() {
        let text = r#"{"dimension": 2, "points": [["0", "1/2"], ["1", "0.25"]], "directions": [["1", "0"]], "values": ["1", "-2/3"]}"#;
        let (pc, v) = parse_config(text).unwrap();
        assert_eq!(pc.len(), 2);
        assert_eq!(pc.points()[1].coords()[1], rational::ratio(1, 4));
        assert_eq!(v.unwrap()[1], rational::ratio(-2, 3));
    }

    #[test]
    fn wrong_arity_is_an_error() {
        let text = r#"{"dimension": 2, "points": [["0"]], "directions": [["1", "0"]]}"#;
        assert_eq!(parse_config(text).unwrap_err().code, 1);
    }

    #[test]
    fn sigma_eval_starts_with_header() {
        let out = execute(&job(&["sigma-eval", "--from", "0", "--to", "1", "--step", "1/4"])).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "t,sigma,region,exact");
        assert_eq!(lines.len(), 6);
        assert!(lines[5].starts_with("1,") && lines[5].contains("segment-1"));
    }

    #[test]
    fn random_target_follows_seed() {
        let pc = Preset::Grid3x3.config(0).unwrap();
        assert_eq!(target_values("random", &pc, 7).unwrap(), target_values("random", &pc, 7).unwrap());
        assert_ne!(target_values("random", &pc, 7).unwrap(), target_values("random", &pc, 8).unwrap());
    }
}
