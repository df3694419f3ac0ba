//! Command-line front end. Every verb prints one JSON document on standard
//! output; diagnostics go to standard error. Exit codes: 0 pass, 2 a check
//! failed, 1 usage or input error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nalgebra::{DVector, Vector3};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{self, CatalogEntry, GeometryLabel};
use crate::classify::{self, GeometrySpec, SpecJson};
use crate::cohomology::{self, TwoCocycle};
use crate::diffgeo;
use crate::error::{Error, Result};
use crate::lie::{self, StructureConstants};
use crate::rep;

#[derive(Debug, Parser)]
#[command(name = "geom3", version, about = "Three-dimensional model geometries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a three-dimensional Lie algebra given by structure constants.
    ClassifyAlgebra { file: PathBuf },
    /// Classify a geometry spec.
    Classify {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Inspect the catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
    /// Run the invariance and structure checks for a catalog entry.
    Verify {
        label: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lie algebra cohomology.
    Cohomology {
        #[command(subcommand)]
        action: CohomologyCmd,
    },
    /// Central extension of an algebra by a 2-cocycle.
    Extend {
        file: PathBuf,
        #[arg(long)]
        cocycle: PathBuf,
    },
    /// Sectional curvatures of the coordinate planes at a point.
    Curvature {
        label: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
    },
    /// Integrate a geodesic in the chart centred at a point.
    Geodesic {
        label: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        dir: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        time: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Fixed line and rotated plane of the isotropy representation.
    Isotropy { label: String },
}

#[derive(Debug, Subcommand)]
enum CatalogCmd {
    List,
    Show { label: String },
}

#[derive(Debug, Subcommand)]
enum CohomologyCmd {
    H2 { file: PathBuf },
}

/// Result of one CLI invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub entry: String,
    pub quantity: String,
    pub samples: usize,
    pub max_residual: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Vec<CheckResult>,
    pub pass: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
}

pub const PULLBACK_TOL: f64 = 1e-6;
pub const EQUIVARIANCE_TOL: f64 = 1e-6;
pub const COMPOSITION_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const LENGTH_SPREAD_TOL: f64 = 1e-8;
pub const DIVERGENCE_TOL: f64 = 1e-5;
pub const KILLING_TOL: f64 = 1e-6;
pub const FLOW_LINE_TOL: f64 = 1e-5;
pub const FLAT_TOL: f64 = 1e-6;
pub const NONFLAT_MIN: f64 = 0.1;
pub const CURVATURE_TOL: f64 = 1e-4;
pub const SPEED_DRIFT_TOL: f64 = 1e-6;

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Output { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Output { code: 1, stdout: String::new(), stderr: text },
            };
        }
    };
    match dispatch(cli.command) {
        Ok((value, pass)) => {
            let mut stdout = serde_json::to_string_pretty(&value).expect("JSON values serialize");
            stdout.push('\n');
            Output { code: if pass { 0 } else { 2 }, stdout, stderr: String::new() }
        }
        Err(e) => Output { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn dispatch(cmd: Command) -> Result<(Value, bool)> {
    match cmd {
        Command::ClassifyAlgebra { file } => {
            let sc: StructureConstants = read_json(&file)?;
            Ok((to_value(&lie::classify_algebra(&sc)?), true))
        }
        Command::Classify { spec } => {
            let s: SpecJson = read_json(&spec)?;
            let trace = classify::decision_trace(&GeometrySpec::from_json(&s)?)?;
            Ok((to_value(&trace), true))
        }
        Command::Catalog { action: CatalogCmd::List } => {
            let labels: Vec<String> = catalog::list_geometries().iter().map(|l| l.to_string()).collect();
            Ok((json!({ "geometries": labels }), true))
        }
        Command::Catalog { action: CatalogCmd::Show { label } } => {
            Ok((describe(&catalog::entry_by_name(&label)?), true))
        }
        Command::Verify { label, samples, seed } => {
            let entry = catalog::entry_by_name(&label)?;
            let report = verify(&entry, samples, seed)?;
            let pass = report.pass;
            Ok((to_value(&report), pass))
        }
        Command::Cohomology { action: CohomologyCmd::H2 { file } } => {
            let sc: StructureConstants = read_json(&file)?;
            let h = cohomology::h2(&sc)?;
            let reps: Vec<Vec<Vec<f64>>> = h.representatives.iter().map(matrix_rows).collect();
            Ok((
                json!({
                    "betti2": h.betti2,
                    "cocycle_rank": h.cocycle_rank,
                    "coboundary_rank": h.coboundary_rank,
                    "representatives": reps,
                }),
                true,
            ))
        }
        Command::Extend { file, cocycle } => {
            let sc: StructureConstants = read_json(&file)?;
            let w: TwoCocycle = read_json(&cocycle)?;
            let ext = cohomology::central_extension(&sc, &w)?;
            let residual = lie::jacobi_residual(&ext);
            Ok((
                json!({
                    "structure_constants": to_value(&ext),
                    "jacobi_residual": residual,
                    "derived_dim": lie::derived_algebra(&ext).dim,
                }),
                true,
            ))
        }
        Command::Curvature { label, point } => {
            let entry = catalog::entry_by_name(&label)?;
            let report = curvature(&entry, &point)?;
            let pass = report.pass;
            Ok((to_value(&report), pass))
        }
        Command::Geodesic { label, point, dir, time, steps } => {
            let entry = catalog::entry_by_name(&label)?;
            geodesic(&entry, &point, &dir, time, steps)
        }
        Command::Isotropy { label } => {
            let entry = catalog::entry_by_name(&label)?;
            let r = entry.isotropy_representation()?;
            let split = rep::decompose(&r)?;
            let basis = rep::commutant_basis(&r)?;
            Ok((
                json!({
                    "entry": entry.label.to_string(),
                    "line": split.line.as_slice(),
                    "plane": [split.plane[0].as_slice(), split.plane[1].as_slice()],
                    "commutant_dim": basis.len(),
                }),
                true,
            ))
        }
    }
}

fn matrix_rows(w: &TwoCocycle) -> Vec<Vec<f64>> {
    let m = w.matrix();
    // round-off below the algebra tolerance is printed as zero
    let clean = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| clean(m[(r, c)])).collect()).collect()
}

fn describe(e: &CatalogEntry) -> Value {
    json!({
        "label": e.label.to_string(),
        "isotropy_dim": e.isotropy_dim,
        "flat_connection": e.flat_connection,
        "kappa": e.kappa,
        "base_curvature_sign": e.base_curvature_sign,
        "group_param_dim": e.group_param_dim(),
        "ambient_dim": e.ambient_dim(),
        "structure_constants": e.structure_constants.as_ref().map(to_value),
    })
}

fn sample_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(i as u64)
}

struct Acc {
    entry: String,
    results: Vec<CheckResult>,
}

impl Acc {
    fn add(&mut self, quantity: &str, samples: usize, max_residual: f64, pass: bool, value: Option<f64>) {
        self.results.push(CheckResult {
            entry: self.entry.clone(),
            quantity: quantity.into(),
            samples,
            max_residual,
            pass: pass && max_residual.is_finite(),
            value,
        });
    }
}

/// Expected constant sectional curvature of an isotropic entry.
fn constant_curvature(e: &CatalogEntry) -> Option<f64> {
    match e.label {
        GeometryLabel::E3 => Some(0.0),
        GeometryLabel::S3_SO4 => Some(1.0 / e.metric_scale),
        GeometryLabel::H3 => Some(-1.0 / e.metric_scale),
        _ => None,
    }
}

/// The batch checks behind `geom3 verify`.
pub fn verify(entry: &CatalogEntry, samples: usize, seed: u64) -> Result<Report> {
    if samples == 0 {
        return Err(Error::Malformed("at least one sample is required".into()));
    }
    let mut acc = Acc { entry: entry.label.to_string(), results: Vec::new() };
    let mut pull: f64 = 0.0;
    let mut ident: f64 = 0.0;
    let mut comp: Option<f64> = None;
    for i in 0..samples {
        let s = sample_seed(seed, i);
        let g = entry.group_sample(s);
        let p = entry.point_sample(s);
        pull = pull.max(entry.pullback_residual(&g, &p)?);
        ident = ident.max((entry.action(&entry.identity_params(), &p)? - &p).amax());
        if let Some(r) = entry.composition_residual(&g, &entry.group_sample(s ^ 0xa5a5), &p)? {
            comp = Some(comp.unwrap_or(0.0).max(r));
        }
    }
    acc.add("pullback g*mu - mu", samples, pull, pull < PULLBACK_TOL, None);
    acc.add("identity action", samples, ident, ident < IDENTITY_TOL, None);
    if let Some(c) = comp {
        acc.add("composition law", samples, c, c < COMPOSITION_TOL, None);
    }

    if let Some(k) = constant_curvature(entry) {
        let n = samples.min(20);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let p = entry.point_sample(sample_seed(seed, i));
            let chart = entry.chart_at(&p)?;
            let u = chart.kind.coords(&p)?;
            let planes = [(Vector3::x(), Vector3::y()), (Vector3::x(), Vector3::z()), (Vector3::y(), Vector3::z())];
            for (a, b) in planes {
                let kk = diffgeo::sectional_curvature(&chart.metric, &u, &a, &b)?;
                worst = worst.max((kk - k).abs());
            }
        }
        acc.add("sectional curvature", n, worst, worst < CURVATURE_TOL, Some(k));
    }

    if entry.isotropy_dim == 1 {
        let expected_div = entry.kappa.unwrap_or(0.0);
        let (mut eqv, mut div_err, mut flow, mut contraction): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
        let (mut kill_max, mut cc_max, mut cc_min): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
        let mut lengths = Vec::new();
        let mut biconditional = true;
        let mut div_sum = 0.0;
        for i in 0..samples {
            let s = sample_seed(seed, i);
            let (g, p) = (entry.group_sample(s), entry.point_sample(s));
            eqv = eqv.max(entry.field_equivariance_residual(&g, &p)?);
            let chart = entry.chart_at(&p)?;
            let u = chart.kind.coords(&p)?;
            let x = chart.x_field.as_ref().expect("axially symmetric chart carries X");
            lengths.push(chart.metric.norm(&u, &x.at(&u))?);
            let div = diffgeo::divergence(&chart.metric, x, &u)?;
            div_sum += div;
            div_err = div_err.max((div - expected_div).abs());
            let kill = diffgeo::killing_residual(&chart.metric, x, &u)?;
            kill_max = kill_max.max(kill);
            biconditional &= (div.abs() < KILLING_TOL) == (kill < KILLING_TOL);
            flow = flow.max(diffgeo::flow_line_residual(&chart.metric, x, &u)?);
            let cc = diffgeo::connection_curvature_at(&chart.metric, x, &u)?;
            cc_max = cc_max.max(cc.norm);
            cc_min = cc_min.min(cc.norm);
            contraction = contraction.max(cc.contraction);
        }
        acc.add("X equivariance", samples, eqv, eqv < EQUIVARIANCE_TOL, None);
        let (lo, hi) = lengths.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &l| (a.min(l), b.max(l)));
        let spread = (hi - lo) / hi;
        acc.add("|X| relative spread", samples, spread, spread < LENGTH_SPREAD_TOL, Some(hi));
        acc.add("divergence of X", samples, div_err, div_err < DIVERGENCE_TOL, Some(div_sum / samples as f64));
        acc.add("Killing iff divergence-free", samples, kill_max, biconditional, None);
        acc.add("flow lines of X are geodesics", samples, flow, flow < FLOW_LINE_TOL, None);
        acc.add("i_X d(omega)", samples, contraction, contraction < FLAT_TOL, None);
        if entry.flat_connection == Some(true) {
            acc.add("|d(omega)| flat", samples, cc_max, cc_max < FLAT_TOL, None);
        } else {
            acc.add("|d(omega)| non-flat", samples, cc_max, cc_min > NONFLAT_MIN, Some(cc_min));
        }
    }

    let label = classify::classify_geometry(&GeometrySpec::from_entry(entry)?);
    let ok = matches!(&label, Ok(l) if *l == entry.label);
    acc.add("classification round trip", 1, if ok { 0.0 } else { 1.0 }, ok, None);

    let tolerances: BTreeMap<String, f64> = [
        ("pullback", PULLBACK_TOL),
        ("identity", IDENTITY_TOL),
        ("composition", COMPOSITION_TOL),
        ("equivariance", EQUIVARIANCE_TOL),
        ("length_spread", LENGTH_SPREAD_TOL),
        ("divergence", DIVERGENCE_TOL),
        ("killing", KILLING_TOL),
        ("flow_line", FLOW_LINE_TOL),
        ("flat", FLAT_TOL),
        ("nonflat_min", NONFLAT_MIN),
        ("curvature", CURVATURE_TOL),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let pass = acc.results.iter().all(|r| r.pass);
    Ok(Report {
        command: "verify".into(),
        inputs: json!({ "label": entry.label.to_string(), "samples": samples, "seed": seed }),
        results: acc.results,
        pass,
        tolerances,
        seed,
    })
}

fn ambient_point(entry: &CatalogEntry, point: &[f64]) -> Result<DVector<f64>> {
    if point.len() != entry.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: entry.ambient_dim(), got: point.len() });
    }
    let p = DVector::from_column_slice(point);
    entry.check_point(&p)?;
    Ok(p)
}

fn curvature(entry: &CatalogEntry, point: &[f64]) -> Result<Report> {
    let p = ambient_point(entry, point)?;
    let chart = entry.chart_at(&p)?;
    let u = chart.kind.coords(&p)?;
    let expected = constant_curvature(entry);
    let mut acc = Acc { entry: entry.label.to_string(), results: Vec::new() };
    let planes = [("plane 01", Vector3::x(), Vector3::y()), ("plane 02", Vector3::x(), Vector3::z()), ("plane 12", Vector3::y(), Vector3::z())];
    for (name, a, b) in planes {
        let k = diffgeo::sectional_curvature(&chart.metric, &u, &a, &b)?;
        let (res, ok) = match expected {
            Some(e) => ((k - e).abs(), (k - e).abs() < CURVATURE_TOL),
            None => (0.0, k.is_finite()),
        };
        acc.add(&format!("sectional curvature {name}"), 1, res, ok, Some(k));
    }
    let pass = acc.results.iter().all(|r| r.pass);
    Ok(Report {
        command: "curvature".into(),
        inputs: json!({ "label": entry.label.to_string(), "point": point }),
        results: acc.results,
        pass,
        tolerances: BTreeMap::from([("curvature".to_string(), CURVATURE_TOL)]),
        seed: 0,
    })
}

fn geodesic(entry: &CatalogEntry, point: &[f64], dir: &[f64], time: f64, steps: usize) -> Result<(Value, bool)> {
    let p = ambient_point(entry, point)?;
    if dir.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: dir.len() });
    }
    let chart = entry.chart_at(&p)?;
    let u = chart.kind.coords(&p)?;
    let v = Vector3::new(dir[0], dir[1], dir[2]);
    let path = diffgeo::geodesic_integrate(&chart.metric, &u, &v, time, steps)?;
    let speeds: Vec<f64> = path
        .points
        .iter()
        .zip(&path.velocities)
        .map(|(x, w)| chart.metric.norm(x, w))
        .collect::<Result<_>>()?;
    let drift = speeds.iter().map(|s| (s - speeds[0]).abs()).fold(0.0, f64::max);
    let end = *path.points.last().expect("path has the start point");
    let end_ambient = chart.kind.point(&end);
    let result = CheckResult {
        entry: entry.label.to_string(),
        quantity: "speed drift".into(),
        samples: steps,
        max_residual: drift,
        pass: drift < SPEED_DRIFT_TOL,
        value: Some(speeds[0]),
    };
    let pass = result.pass;
    let report = Report {
        command: "geodesic".into(),
        inputs: json!({ "label": entry.label.to_string(), "point": point, "dir": dir, "time": time, "steps": steps }),
        results: vec![result],
        pass,
        tolerances: BTreeMap::from([("speed_drift".to_string(), SPEED_DRIFT_TOL)]),
        seed: 0,
    };
    let mut value = to_value(&report);
    value["endpoint_chart"] = json!(end.as_slice());
    value["endpoint"] = json!(end_ambient.as_slice());
    Ok((value, pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_label_exits_one() {
        let out = run(["geom3", "catalog", "show", "NOSUCH"]);
        assert_eq!(out.code, 1);
        assert!(out.stderr.contains("NOSUCH"));
        assert!(out.stdout.is_empty());
    }

    #[test]
    fn usage_error_exits_one() {
        assert_eq!(run(["geom3", "frobnicate"]).code, 1);
        assert_eq!(run(["geom3", "--help"]).code, 0);
    }

    #[test]
    fn catalog_list() {
        let out = run(["geom3", "catalog", "list"]);
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["geometries"].as_array().unwrap().len(), 11);
    }

    #[test]
    fn verify_e2semir_reports_divergence_one() {
        let out = run(["geom3", "verify", "E2SemiR", "--samples", "10", "--seed", "7"]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        let div = v["results"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["quantity"] == "divergence of X")
            .unwrap();
        assert!((div["value"].as_f64().unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn curvature_and_geodesic() {
        let out = run(["geom3", "curvature", "H3", "--point", "0.1,-0.2,0.3"]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        let out = run(["geom3", "geodesic", "E3", "--point", "0,0,0", "--dir", "1,0,0", "--time", "2"]);
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert!((v["endpoint"][0].as_f64().unwrap() - 2.0).abs() < 1e-12);
        let out = run(["geom3", "geodesic", "H3", "--point", "0,0,0", "--dir", "0.5,0,0", "--time", "1"]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        let out = run(["geom3", "curvature", "H3", "--point", "2,0,0"]);
        assert_eq!(out.code, 1);
    }
}
