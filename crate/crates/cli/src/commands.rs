use std::path::Path;

use serde_json::{json, Value};
use tau_spectra::asymptotics::validation_row;
use tau_spectra::diffusion::{
    convergence_rate_estimate, diffusion_gap, diffusion_spectrum, diffusion_steady_state, DiffusionSpec,
};
use tau_spectra::markov::{
    kron_spectrum, queue_spectrum, transient_evolve, walk_spectrum, AxisParams, BirthDeathParams, Evolution,
    RandomWalkParams, SpectrumKind, SpectrumReport,
};
use tau_spectra::spectral::solve;
use tau_spectra::wealth::{comparative_sweep, stationary_moments, stationary_sensitivities_with_tensors, SweepTarget};
use tau_spectra::{MultiIndexSpace, PayoffTensor, ProbabilityTensor, TauParams};

use crate::output::{Cell, Report, Table};
use crate::spec_file::{load_distribution, load_spec, LoadedSpec};
use crate::Failure;

/// Errors below this are at the binary64 resolution of the outliers.
const ERROR_FLOOR: f64 = 1e-14;

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize to JSON")
}

fn label(x: &impl serde::Serialize) -> String {
    to_value(x).as_str().unwrap_or_default().to_string()
}

fn index_header(prefix: &str, d: usize) -> Vec<String> {
    (1..=d).map(|r| format!("{prefix}{r}")).collect()
}

pub fn eig(n: usize, eps: f64, phi: f64) -> Result<Report, Failure> {
    let dec = solve(TauParams::new(n, eps, phi)?)?;
    let mut header: Vec<String> = ["index", "lambda", "branch", "theta"].map(String::from).to_vec();
    header.extend(index_header("x", n));
    let mut table = Table::new(header);
    for (k, p) in dec.pairs.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(k + 1).into(), p.lambda.into(), label(&p.branch).into(), p.theta.into()];
        row.extend(p.vector.iter().map(|&v| Cell::Num(v)));
        table.push(row);
    }
    let pairs: Vec<Value> = dec
        .pairs
        .iter()
        .enumerate()
        .map(|(k, p)| json!({"index": k + 1, "lambda": p.lambda, "branch": p.branch, "theta": p.theta, "vector": p.vector}))
        .collect();
    Ok(Report { table, json: json!({"n": n, "eps": eps, "phi": phi, "pairs": pairs}) })
}

/// Corner presets for the `tables` command.
pub fn preset(which: u8) -> Option<(f64, f64)> {
    match which {
        1 => Some((3.0, 0.5)),
        2 => Some((4.0, -2.0)),
        3 => Some((1.6, 1.6)),
        _ => None,
    }
}

pub fn tables(eps: f64, phi: f64, sizes: &[usize]) -> Result<Report, Failure> {
    let header = [
        "n",
        "label",
        "outlier",
        "predicted",
        "abs_error",
        "error_floored",
        "projection_residual",
        "target",
        "symmetry",
    ];
    let mut table = Table::new(header.map(String::from).to_vec());
    let mut rows = Vec::new();
    for &n in sizes {
        let report = validation_row(TauParams::new(n, eps, phi)?)?;
        for e in &report.entries {
            let floored = e.abs_error.max(ERROR_FLOOR);
            table.push(vec![
                n.into(),
                e.label.as_str().into(),
                e.lambda.into(),
                e.predicted.into(),
                e.abs_error.into(),
                floored.into(),
                e.projection_residual.into(),
                label(&e.target).into(),
                label(&e.symmetry).into(),
            ]);
            rows.push(json!({
                "n": n,
                "label": e.label,
                "outlier": e.lambda,
                "predicted": e.predicted,
                "abs_error": e.abs_error,
                "error_floored": floored,
                "projection_residual": e.projection_residual,
                "target": e.target,
                "symmetry": e.symmetry,
            }));
        }
    }
    Ok(Report { table, json: json!({"eps": eps, "phi": phi, "rows": rows}) })
}

fn chain_report(report: &SpectrumReport, params: Value) -> Report {
    let mut table = Table::new(["index", "eigenvalue", "steady_state"].map(String::from).to_vec());
    let steady = report.steady_state.as_ref().map(|p| &p.values);
    for (k, &ev) in report.eigenvalues.iter().enumerate() {
        table.push(vec![(k + 1).into(), ev.into(), steady.map(|s| s[k]).into()]);
    }
    let json = json!({
        "params": params,
        "eigenvalues": report.eigenvalues,
        "steady_state": steady,
        "gap": report.gap,
    });
    Report { table, json }
}

pub fn queue(n: usize, lambda: f64, mu: f64) -> Result<Report, Failure> {
    let params = BirthDeathParams::new(n, lambda, mu)?;
    Ok(chain_report(&queue_spectrum(params)?, to_value(&params)))
}

pub fn walk(n: usize, p: f64, q: f64) -> Result<Report, Failure> {
    let params = RandomWalkParams::new(n, p, q)?;
    Ok(chain_report(&walk_spectrum(params)?, to_value(&params)))
}

/// Parses `n:a:b` into a queue (`a` arrivals, `b` services) or a walk (`a`
/// up, `b` down) depending on `kind`.
fn parse_axis(text: &str, kind: SpectrumKind) -> Result<AxisParams, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Failure::Usage(format!("--axis {text:?}: expected n:a:b, e.g. 4:1.0:2.0"));
    let [n, a, b] = parts.as_slice() else {
        return Err(bad());
    };
    let n: usize = n.parse().map_err(|_| bad())?;
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    Ok(match kind {
        SpectrumKind::Generator => AxisParams::Queue(BirthDeathParams::new(n, a, b)?),
        SpectrumKind::Chain => AxisParams::Walk(RandomWalkParams::new(n, a, b)?),
    })
}

fn evolution(kind: SpectrumKind, t: f64) -> Result<Evolution, Failure> {
    match kind {
        SpectrumKind::Generator => Ok(Evolution::GeneratorTime(t)),
        SpectrumKind::Chain if t >= 0.0 && t.fract() == 0.0 && t <= u64::MAX as f64 => {
            Ok(Evolution::ChainSteps(t as u64))
        }
        SpectrumKind::Chain => Err(Failure::Usage(format!("--times {t}: chains take whole step counts"))),
    }
}

fn point_mass(dims: &[usize]) -> ProbabilityTensor {
    let mut values = vec![0.0; dims.iter().product()];
    values[0] = 1.0;
    ProbabilityTensor::new(dims.to_vec(), values).expect("shape matches dims")
}

fn initial(p0: Option<&Path>, dims: &[usize]) -> Result<ProbabilityTensor, Failure> {
    match p0 {
        Some(path) => Ok(load_distribution(path, dims)?),
        None => Ok(point_mass(dims)),
    }
}

fn time_label(t: f64) -> String {
    format!("p(t={})", crate::output::sig17(t))
}

pub fn kron(axes: &[String], kind: SpectrumKind, times: &[f64], p0: Option<&Path>) -> Result<Report, Failure> {
    if axes.is_empty() {
        return Err(Failure::Usage("kron needs at least one --axis".into()));
    }
    let parsed = axes.iter().map(|a| parse_axis(a, kind)).collect::<Result<Vec<_>, _>>()?;
    let dims: Vec<usize> = parsed
        .iter()
        .map(|a| match a {
            AxisParams::Queue(q) => q.n,
            AxisParams::Walk(w) => w.n,
        })
        .collect();
    let space = MultiIndexSpace::new(dims.clone())?;
    let report = kron_spectrum(&space, &parsed, kind)?;
    let start = if times.is_empty() { None } else { Some(initial(p0, &dims)?) };
    let mut evolved = Vec::new();
    if let Some(p) = &start {
        for &t in times {
            evolved.push(transient_evolve(&report, p, evolution(kind, t)?)?);
        }
    }

    let mut header = index_header("i", dims.len());
    header.push("eigenvalue".into());
    header.push("steady_state".into());
    header.extend(times.iter().map(|&t| time_label(t)));
    let mut table = Table::new(header);
    for flat in 0..space.len() {
        let mut row: Vec<Cell> = space.delinearize(flat)?.into_iter().map(Cell::from).collect();
        row.push(report.eigenvalues[flat].into());
        row.push(report.steady_state.as_ref().map(|p| p.values[flat]).into());
        row.extend(evolved.iter().map(|p| Cell::Num(p.values[flat])));
        table.push(row);
    }
    let json = json!({
        "dims": dims,
        "kind": kind,
        "axes": parsed,
        "eigenvalues": report.eigenvalues,
        "steady_state": report.steady_state,
        "gap": report.gap,
        "evolution": times.iter().zip(&evolved).map(|(t, p)| json!({"time": t, "values": p.values})).collect::<Vec<_>>(),
    });
    Ok(Report { table, json })
}

fn spec_only(path: &Path) -> Result<DiffusionSpec, Failure> {
    Ok(load_spec(path)?.spec)
}

fn with_payoff(path: &Path) -> Result<(DiffusionSpec, PayoffTensor), Failure> {
    let LoadedSpec { spec, payoff } = load_spec(path)?;
    let payoff = payoff.ok_or_else(|| Failure::Usage("payoff: missing; this command needs a payoff".into()))?;
    Ok((spec, payoff))
}

fn tensor_table(space: &MultiIndexSpace, column: &str, values: &[f64]) -> Result<Table, Failure> {
    let mut header = index_header("i", space.dims.len());
    header.push(column.into());
    let mut table = Table::new(header);
    for (flat, &v) in values.iter().enumerate() {
        let mut row: Vec<Cell> = space.delinearize(flat)?.into_iter().map(Cell::from).collect();
        row.push(v.into());
        table.push(row);
    }
    Ok(table)
}

pub fn diffusion_steady(path: &Path) -> Result<Report, Failure> {
    let spec = spec_only(path)?;
    let p = diffusion_steady_state(&spec)?;
    let table = tensor_table(&spec.space(), "probability", &p.values)?;
    Ok(Report { table, json: to_value(&p) })
}

pub fn diffusion_gap_report(path: &Path) -> Result<Report, Failure> {
    let spec = spec_only(path)?;
    let gap = diffusion_gap(&spec)?;
    let per_axis = spec
        .axes
        .iter()
        .map(|a| diffusion_gap(&DiffusionSpec::new(vec![*a])?))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(vec!["axis".into(), "gap".into()]);
    for (r, g) in per_axis.iter().enumerate() {
        table.push(vec![(r + 1).into(), (*g).into()]);
    }
    table.push(vec!["all".into(), gap.into()]);
    Ok(Report { table, json: json!({"gap": gap, "axis_gaps": per_axis}) })
}

pub fn diffusion_spectrum_report(path: &Path) -> Result<Report, Failure> {
    let spec = spec_only(path)?;
    let report = diffusion_spectrum(&spec)?;
    let space = spec.space();
    let mut header = index_header("k", space.dims.len());
    header.push("eigenvalue".into());
    let mut table = Table::new(header);
    for (flat, &ev) in report.eigenvalues.iter().enumerate() {
        let mut row: Vec<Cell> = space.delinearize(flat)?.into_iter().map(|i| Cell::from(i - 1)).collect();
        row.push(ev.into());
        table.push(row);
    }
    let json = json!({"dims": spec.dims(), "eigenvalues": report.eigenvalues, "gap": report.gap});
    Ok(Report { table, json })
}

pub fn diffusion_evolve(path: &Path, times: &[f64], p0: Option<&Path>) -> Result<Report, Failure> {
    if times.is_empty() {
        return Err(Failure::Usage("diffusion evolve needs --times".into()));
    }
    let spec = spec_only(path)?;
    let dims = spec.dims();
    let start = initial(p0, &dims)?;
    let report = diffusion_spectrum(&spec)?;
    let steady = diffusion_steady_state(&spec)?;
    let evolved = times
        .iter()
        .map(|&t| transient_evolve(&report, &start, Evolution::GeneratorTime(t)))
        .collect::<Result<Vec<_>, _>>()?;
    let distances: Vec<f64> = evolved
        .iter()
        .map(|p| p.values.iter().zip(&steady.values).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .collect();
    // A fitted rate needs at least two points in the tail of the grid.
    let rate = if times.len() >= 4 { convergence_rate_estimate(&spec, &start, times).ok() } else { None };

    let space = spec.space();
    let mut header = index_header("i", dims.len());
    header.extend(times.iter().map(|&t| time_label(t)));
    let mut table = Table::new(header);
    for flat in 0..space.len() {
        let mut row: Vec<Cell> = space.delinearize(flat)?.into_iter().map(Cell::from).collect();
        row.extend(evolved.iter().map(|p| Cell::Num(p.values[flat])));
        table.push(row);
    }
    let json = json!({
        "dims": dims,
        "times": times,
        "distances": distances,
        "gap": report.gap,
        "rate_estimate": rate,
        "values": evolved.iter().map(|p| &p.values).collect::<Vec<_>>(),
    });
    Ok(Report { table, json })
}

pub fn moments(path: &Path) -> Result<Report, Failure> {
    let (spec, payoff) = with_payoff(path)?;
    let m = stationary_moments(&spec, &payoff)?;
    let mut table = Table::new(vec!["mean".into(), "variance".into()]);
    table.push(vec![m.mean.into(), m.variance.into()]);
    Ok(Report { table, json: json!({"payoff": payoff.description, "mean": m.mean, "variance": m.variance}) })
}

pub fn sens(path: &Path, tensors: bool) -> Result<Report, Failure> {
    let (spec, payoff) = with_payoff(path)?;
    let mut report = stationary_sensitivities_with_tensors(&spec, &payoff)?;
    if !tensors {
        for a in &mut report.axes {
            a.dp_dmu = None;
            a.dp_dsigma2 = None;
        }
    }
    let header = ["axis", "mean", "variance", "dmean_dmu", "dmean_dsigma2", "dvar_dmu", "dvar_dsigma2"];
    let mut table = Table::new(header.map(String::from).to_vec());
    for (r, a) in report.axes.iter().enumerate() {
        table.push(vec![
            (r + 1).into(),
            report.moments.mean.into(),
            report.moments.variance.into(),
            a.dmean_dmu.into(),
            a.dmean_dsigma2.into(),
            a.dvar_dmu.into(),
            a.dvar_dsigma2.into(),
        ]);
    }
    Ok(Report { table, json: to_value(&report) })
}

pub fn sweep(path: &Path, target: SweepTarget, grid: &[f64]) -> Result<Report, Failure> {
    let (spec, payoff) = with_payoff(path)?;
    let rows = comparative_sweep(&spec, &payoff, target, grid)?;
    let axis = match target {
        SweepTarget::Mu(r) | SweepTarget::Sigma2(r) => r,
    };
    let header = ["parameter", "value", "mean", "variance", "dmean", "dvar", "error"];
    let mut table = Table::new(header.map(String::from).to_vec());
    let mut json_rows = Vec::new();
    for row in &rows {
        let picked = row.result.as_ref().map(|res| {
            let a = &res.axes[axis];
            let (dm, dv) = match target {
                SweepTarget::Mu(_) => (a.dmean_dmu, a.dvar_dmu),
                SweepTarget::Sigma2(_) => (a.dmean_dsigma2, a.dvar_dsigma2),
            };
            (res.moments.mean, res.moments.variance, dm, dv)
        });
        table.push(vec![
            row.parameter.as_str().into(),
            row.value.into(),
            picked.map(|p| p.0).into(),
            picked.map(|p| p.1).into(),
            picked.map(|p| p.2).into(),
            picked.map(|p| p.3).into(),
            row.error.clone().map_or(Cell::Empty, Cell::from),
        ]);
        json_rows.push(json!({
            "parameter": row.parameter,
            "value": row.value,
            "mean": picked.map(|p| p.0),
            "variance": picked.map(|p| p.1),
            "dmean": picked.map(|p| p.2),
            "dvar": picked.map(|p| p.3),
            "error": row.error,
        }));
    }
    Ok(Report { table, json: json!({"parameter": target.name(), "rows": json_rows}) })
}

/// `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("--grid {text:?}: expected a,b,c or start:stop:count"));
    if let [start, stop, count] = text.split(':').collect::<Vec<_>>().as_slice() {
        let start: f64 = start.parse().map_err(|_| bad())?;
        let stop: f64 = stop.parse().map_err(|_| bad())?;
        let count: usize = count.parse().map_err(|_| bad())?;
        return match count {
            0 => Err(bad()),
            1 => Ok(vec![start]),
            _ => Ok((0..count).map(|k| start + (stop - start) * k as f64 / (count - 1) as f64).collect()),
        };
    }
    text.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect()
}
