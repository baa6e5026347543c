use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use shiftlab::families::example46::example46;
use shiftlab::families::fig2::{build_fig2_family, build_fig2_general, Fig2General};
use shiftlab::families::quasinormal::build_quasinormal_from_row;
use shiftlab::families::{build_diagonal_core, build_drury_arveson, build_tensor};
use shiftlab::positivity::{certifying_window, k_hyponormal_with};
use shiftlab::spectra::{da_verify as run_da_verify, probe_schedule, spectral_invariance_check};
use shiftlab::transforms::{spherical_fixed_point, toral_commutes};
use shiftlab::{tol as defaults, AtomicMeasure1D, LatticeWindow, WeightDiagram, WeightSeq};

use crate::report::{stdout, Report};
use crate::{
    BuildArgs, CheckArgs, Curve, DaVerifyArgs, Family, Kind, Outcome, ProbeArgs, QuasinormalArgs, RegionArgs,
    SpectraArgs, TransformArgs,
};

const PSD_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-12;

fn outcome(r: &Report) -> Outcome {
    if r.all_hold() {
        Outcome::Holds
    } else {
        Outcome::Fails
    }
}

fn window(s: &str) -> Result<LatticeWindow> {
    s.parse().map_err(|e| anyhow!("--window: {e}"))
}

fn seq(flag: &str, s: &str) -> Result<WeightSeq> {
    s.parse().map_err(|e| anyhow!("--{flag}: {e}"))
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: Family) -> Result<T> {
    v.ok_or_else(|| anyhow!("--{flag} is required for family {family:?}"))
}

fn need_seq(v: &Option<String>, flag: &str, family: Family) -> Result<WeightSeq> {
    let s = v.as_deref().ok_or_else(|| anyhow!("--{flag} is required for family {family:?}"))?;
    seq(flag, s)
}

/// Parses a diagram, naming the JSON path of the first problem.
pub fn read_diagram(path: &Path) -> Result<WeightDiagram> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| anyhow!("{}: invalid diagram at `{}`: {}", path.display(), e.path(), e.inner()))
}

fn write_diagram(d: &WeightDiagram, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(d)?;
    match path {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => stdout(&(text + "\n")),
    }
}

/// Emits the report on stdout unless an artifact already went there.
fn finish(r: Report, report: Option<&Path>, stdout_taken: bool) -> Result<Outcome> {
    if report.is_some() || !stdout_taken {
        r.emit(report)?;
    }
    Ok(outcome(&r))
}

fn commutativity(r: &mut Report, d: &WeightDiagram, w: LatticeWindow, tol: f64) {
    let c = d.check_commutativity(w);
    r.verdict("commutes", c.holds(tol), json!({ "window": w.to_string(), "max_abs": c.max_abs, "max_rel": c.max_rel, "at": c.at }));
}

pub fn build(a: BuildArgs, tol: Option<f64>) -> Result<Outcome> {
    let f = a.family;
    let d = match f {
        Family::Tensor => build_tensor(need_seq(&a.sigma, "sigma", f)?, need_seq(&a.tau, "tau", f)?),
        Family::Diagonal => build_diagonal_core(need_seq(&a.omega, "omega", f)?),
        Family::Da => build_drury_arveson(),
        Family::Fig2 => {
            let xi: AtomicMeasure1D = a
                .xi
                .as_deref()
                .ok_or_else(|| anyhow!("--xi is required for family {f:?}"))?
                .parse()
                .map_err(|e| anyhow!("--xi: {e}"))?;
            build_fig2_family(need(a.x0, "x0", f)?, need(a.a, "a", f)?, &xi)?
        }
        Family::Fig2General => build_fig2_general(Fig2General {
            x0: need(a.x0, "x0", f)?,
            x1: need(a.x1, "x1", f)?,
            y0: need(a.y0, "y0", f)?,
            y1: need(a.y1, "y1", f)?,
            a: need(a.a, "a", f)?,
            omega: need_seq(&a.omega, "omega", f)?,
            tau: need_seq(&a.tau, "tau", f)?,
        })?,
        Family::Example46 => {
            shiftlab::families::example46::build_example46(need(a.x, "x", f)?, need(a.y, "y", f)?)?
        }
        Family::Quasinormal => build_quasinormal_from_row(need_seq(&a.row, "row", f)?, a.c.unwrap_or(1.0))?,
    };
    let w = window(&a.window)?;
    let mut r = Report::new("build", &a);
    commutativity(&mut r, &d, w, tol.unwrap_or(IDENTITY_TOL));
    r.info(format!("tail: {:?}", d.tail()));
    write_diagram(&d, a.out.as_deref())?;
    finish(r, a.report.as_deref(), a.out.is_none())
}

pub fn transform(a: TransformArgs, tol: Option<f64>) -> Result<Outcome> {
    let d = read_diagram(&a.input)?;
    let w = window(&a.window)?;
    let tol = tol.unwrap_or(IDENTITY_TOL);
    let mut r = Report::new("transform", &a);
    let t = match a.kind {
        Kind::Toral => {
            let c = toral_commutes(&d, w);
            r.info(format!(
                "toral commutativity condition: max relative violation {:e} (alpha form), {:e} (beta form)",
                c.alpha_form.max_rel, c.beta_form.max_rel
            ));
            d.toral()
        }
        Kind::Spherical => d.spherical(),
    };
    commutativity(&mut r, &t, w, tol);
    r.info(format!("tail: {:?}", t.tail()));
    write_diagram(&t, a.out.as_deref())?;
    finish(r, a.report.as_deref(), a.out.is_none())
}

pub fn check(a: CheckArgs, tol: Option<f64>) -> Result<Outcome> {
    if a.k == 0 {
        bail!("--k must be at least 1");
    }
    let d = read_diagram(&a.input)?;
    let w = match &a.window {
        Some(s) => window(s)?,
        None => certifying_window(&d).unwrap_or(LatticeWindow::new(7, 7)),
    };
    let mut r = Report::new("check", &a);
    commutativity(&mut r, &d, w, IDENTITY_TOL);
    let h = k_hyponormal_with(&d, a.k, w, tol.unwrap_or(PSD_TOL));
    let status = if h.certifying { "certifying" } else { "window-limited" };
    r.verdict(
        format!("{}-hyponormal", a.k),
        h.holds,
        json!({
            "window": w.to_string(),
            "status": status,
            "first_failure": h.first_failure,
            "min_eigenvalue": h.min_eigenvalue,
            "per_u": h.per_u,
        }),
    );
    r.info(format!("verdict is {status}; tail {:?}", d.tail()));
    finish(r, a.report.as_deref(), false)
}

/// `start:end:step` with `end` excluded.
fn grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow!("--ygrid `{spec}`: {e}"))?;
    let [start, end, step] = parts[..] else {
        bail!("--ygrid `{spec}` is not start:end:step");
    };
    if !(step > 0.0 && end > start) {
        bail!("--ygrid `{spec}` needs step > 0 and end > start");
    }
    let span = (end - start) / step;
    // end is excluded; a span within rounding of an integer counts as exact
    let n = if (span - span.round()).abs() < 1e-9 { span.round() } else { span.ceil() } as usize;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

pub fn region(a: RegionArgs, tol: Option<f64>) -> Result<Outcome> {
    let Curve::Example46 = a.curve;
    let tol = tol.unwrap_or(IDENTITY_TOL);
    let ys = grid(&a.ygrid)?;
    let mut csv = String::from("y,s,h,CA,PA\n");
    let (mut ordered, mut below) = (Vec::new(), Vec::new());
    for &y in &ys {
        let c = example46(y)?;
        csv.push_str(&format!("{},{},{},{},{}\n", c.y, c.s, c.h, c.ca, c.pa));
        if !(c.s <= c.h + tol && c.h <= c.pa + tol) {
            ordered.push(y);
        }
        if c.ca >= c.h {
            below.push(y);
        }
    }
    match &a.csv {
        Some(p) => fs::write(p, &csv).with_context(|| format!("writing {}", p.display()))?,
        None => stdout(&csv)?,
    }
    let mut r = Report::new("region", &a);
    r.verdict("s <= h <= PA", ordered.is_empty(), json!({ "violations": ordered }));
    r.verdict("CA < h", below.is_empty(), json!({ "violations": below }));
    r.info(format!("{} rows", ys.len()));
    finish(r, a.report.as_deref(), a.csv.is_none())
}

pub fn da_verify(a: DaVerifyArgs, tol: Option<f64>) -> Result<Outcome> {
    if a.nmax == 0 {
        bail!("--nmax must be at least 1");
    }
    let gap_tol = tol.unwrap_or(1e-10);
    let s = run_da_verify(a.nmax);
    let mut r = Report::new("da-verify", &a);
    r.verdict("commutator coefficients", s.commutator_error < IDENTITY_TOL, json!({ "max_error": s.commutator_error }));
    r.verdict("||[T1*,T1]|| <= 1/(n+1)", s.diagonal_bound_holds, json!({ "attained": s.diagonal_bound_attained }));
    r.verdict("||[T2*,T1]|| <= 1/(2n)", s.cross_bound_holds, serde_json::Value::Null);
    r.verdict("toral gap formula", s.toral_formula_error < gap_tol, json!({ "max_error": s.toral_formula_error }));
    r.verdict("toral gap <= 1/(4(n+2))", s.toral_bound_holds, serde_json::Value::Null);
    r.verdict(
        "spherical gap formula",
        s.spherical_reference_error < gap_tol,
        json!({ "max_error": s.spherical_reference_error, "first_mismatch": s.spherical_first_mismatch }),
    );
    r.verdict("spherical gap <= (2n+1)/(4n^2)", s.spherical_bound_holds, serde_json::Value::Null);
    if s.spherical_exact_error < gap_tol {
        r.warn(format!(
            "direct spherical gaps agree with (k1+1)^2/((n+1)^2(n+2)^2) to {:e}",
            s.spherical_exact_error
        ));
    }
    finish(r, a.report.as_deref(), false)
}

pub fn spectra(a: SpectraArgs, tol: Option<f64>) -> Result<Outcome> {
    let d = read_diagram(&a.input)?;
    let inv = spectral_invariance_check(&d, tol.unwrap_or(PSD_TOL))?;
    let mut r = Report::new("spectra", &a);
    r.verdict(
        "radii agree",
        inv.passes,
        json!({
            "original": inv.original,
            "toral": inv.toral,
            "spherical": inv.spherical,
            "edges": inv.edges,
            "max_gap": inv.max_gap,
        }),
    );
    for s in &inv.skipped {
        r.warn(s.clone());
    }
    finish(r, a.report.as_deref(), false)
}

pub fn quasinormal(a: QuasinormalArgs, tol: Option<f64>) -> Result<Outcome> {
    let row = seq("row", &a.row)?;
    let d = build_quasinormal_from_row(row, a.c)?;
    let w = window(&a.window)?;
    let id_tol = tol.unwrap_or(IDENTITY_TOL);
    let mut r = Report::new("quasinormal", &a);
    let fp = spherical_fixed_point(&d, w, PSD_TOL);
    r.verdict("spherical fixed point", fp.fixed, fp);
    r.verdict(
        "alpha^2 + beta^2 = C^2",
        (fp.c_squared - a.c * a.c).abs() <= id_tol && fp.c_deviation <= id_tol,
        json!({ "c_squared": fp.c_squared, "deviation": fp.c_deviation }),
    );
    commutativity(&mut r, &d, w, id_tol);
    for k in 1..=a.kmax {
        let h = k_hyponormal_with(&d, k, w, defaults::PSD);
        let status = if h.certifying { "certifying" } else { "window-limited" };
        r.verdict(
            format!("{k}-hyponormal"),
            h.holds,
            json!({ "window": w.to_string(), "status": status, "min_eigenvalue": h.min_eigenvalue }),
        );
    }
    write_diagram(&d, a.out.as_deref())?;
    finish(r, a.report.as_deref(), a.out.is_none())
}

pub fn probe(a: ProbeArgs, _tol: Option<f64>) -> Result<Outcome> {
    let d = read_diagram(&a.input)?;
    let w = window(&a.window)?;
    let runs = probe_schedule(&d, &a.eps, w, a.seed)?;
    let mut r = Report::new("probe", &a);
    let decreasing = |f: fn(&shiftlab::spectra::ProbeReport) -> f64| runs.windows(2).all(|p| f(&p[1]) < f(&p[0]));
    let by_eps = a.eps.windows(2).all(|e| e[1] < e[0]);
    if !by_eps {
        r.warn("eps values are not strictly decreasing; monotonicity verdicts compare in the given order");
    }
    r.verdict("toral gaps decrease", decreasing(|p| p.toral_gap), serde_json::Value::Null);
    r.verdict("spherical gaps decrease", decreasing(|p| p.spherical_gap), serde_json::Value::Null);
    r.verdict("input gap <= eps", runs.iter().all(|p| p.input_gap <= p.eps * (1.0 + 1e-12)), &runs);
    r.info(format!("seed {}", a.seed));
    finish(r, a.report.as_deref(), false)
}
