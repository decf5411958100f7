use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use wavepole::analytic::{well_alpha_roots, well_scattering};
use wavepole::coulomb::{gamow_factor, gamow_series, pole_decomposition_residual, single_pole_error, CoulombScale, DEFAULT_TERMS};
use wavepole::extrapolation::{
    bargmann_reference_crossover, crossover_radius, fit_ratio_series, r1_reference, well_sign_arbitration,
    LocalProblem, ReferenceModel, SeparableProblem, WaveProblem, DEFAULT_K_SAMPLES,
};
use wavepole::perturbation::consistency_report;
use wavepole::solver::{default_virtual_window, find_virtual_states};
use wavepole::validation::{fig1_table, run_all, Fig1Case, Fig1Table, ValidationConfig};
use wavepole::{BoundState, PotentialModel, SeparableModel};

use crate::output::{Cell, Table};
use crate::scenario::Scenario;
use crate::{CliError, Command, CommonArgs, ModelArgs};

const DEFAULT_STEP: f64 = 1e-3;
const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Bind { common, model, virtual_states } => {
            let mut s = scenario(&common, Some(&model))?;
            if virtual_states {
                s.set("sweep", "virtual", "true");
            }
            let (table, count) = bind(&s)?;
            emit(&table, &common, "level", &["alpha"])?;
            if count == 0 {
                return Err(CliError::Empty("no states found".into()));
            }
            Ok(())
        }
        Command::Scatter { common, model, k } => {
            let mut s = scenario(&common, Some(&model))?;
            s.override_with("sweep", "k", join(&k));
            emit(&scatter(&s)?, &common, "k", &["delta"])
        }
        Command::Ratio { common, model, k, r } => {
            let mut s = scenario(&common, Some(&model))?;
            s.override_with("sweep", "k", join(&k));
            s.override_with("sweep", "r", join(&r));
            emit(&ratio(&s)?, &common, "r", &["R1", "R2"])
        }
        Command::Crossover { common, model, k } => {
            let mut s = scenario(&common, Some(&model))?;
            s.override_with("sweep", "k", join(&k));
            let (table, found) = crossover(&s)?;
            emit(&table, &common, "k", &["r_star"])?;
            if found == 0 {
                return Err(CliError::Empty("no crossover in the search interval".into()));
            }
            Ok(())
        }
        Command::Fig1 { common, case } => {
            let mut s = scenario(&common, None)?;
            s.override_with("sweep", "case", case);
            let table = fig1(&s)?;
            let ys: Vec<&str> = table.columns[1..].iter().map(String::as_str).collect();
            emit(&table, &common, "r", &ys)
        }
        Command::Coulomb { common, eta, kappa, k, terms } => {
            let mut s = scenario(&common, None)?;
            s.override_with("sweep", "eta", join(&eta));
            s.override_with("sweep", "kappa", kappa);
            s.override_with("sweep", "k", join(&k));
            s.override_with("sweep", "terms", terms);
            let table = coulomb(&s)?;
            let x = table.columns[0].clone();
            emit(&table, &common, &x, &["gamow"])
        }
        Command::Perturb { common, model, eps, k, profile_radius } => {
            let mut s = scenario(&common, Some(&model))?;
            s.override_with("sweep", "eps", join(&eps));
            s.override_with("sweep", "k", join(&k));
            s.override_with("sweep", "profile_radius", profile_radius);
            emit(&perturb(&s)?, &common, "eps", &["dE_first_order", "dE_exact"])
        }
        Command::Validate { step, fig_dir } => validate(step.unwrap_or(DEFAULT_STEP), fig_dir.as_deref()),
    }
}

/// Scenario file (if any) overridden by flags.
pub fn scenario(common: &CommonArgs, model: Option<&ModelArgs>) -> Result<Scenario, CliError> {
    let mut s = match &common.scenario {
        Some(path) => Scenario::parse(&read(path)?)?,
        None => Scenario::default(),
    };
    s.override_with("grid", "step", common.step);
    if let Some(m) = model {
        s.override_with("potential", "kind", m.potential.clone());
        s.override_with("potential", "depth", m.u0);
        s.override_with("potential", "radius", m.a);
        s.override_with("potential", "beta", m.beta);
        s.override_with("potential", "alphab", m.alphab);
        s.override_with("potential", "height", m.height);
        s.override_with("potential", "width", m.width);
        s.override_with("potential", "table", m.table.as_ref().map(|p| p.display().to_string()));
    }
    Ok(s)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn join(values: &[f64]) -> Option<String> {
    (!values.is_empty()).then(|| values.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
}

fn emit(table: &Table, common: &CommonArgs, x: &str, ys: &[&str]) -> Result<(), CliError> {
    let csv = table.to_csv();
    match &common.out {
        Some(path) => write(path, &csv)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
        }
    }
    if let Some(path) = &common.svg {
        let ys: Vec<String> = ys.iter().map(|s| s.to_string()).collect();
        let svg = table
            .to_svg(x, &ys)
            .ok_or_else(|| CliError::Input(format!("no column `{x}` to plot")))?;
        write(path, &svg)?;
    }
    Ok(())
}

/// A resolved interaction.
pub enum Model {
    Local(PotentialModel),
    Separable(SeparableModel),
}

pub fn model(s: &Scenario) -> Result<Model, CliError> {
    let kind = s
        .get("potential", "kind")
        .ok_or_else(|| CliError::Input("missing `potential.kind` (or --potential)".into()))?;
    Ok(match kind {
        "well" => Model::Local(PotentialModel::spherical_well(
            s.require_f64("potential", "depth")?,
            s.f64("potential", "radius")?.unwrap_or(1.0),
        )?),
        "bargmann" => Model::Local(PotentialModel::bargmann(
            s.require_f64("potential", "beta")?,
            s.require_f64("potential", "alphab")?,
        )?),
        "gaussian" => Model::Local(PotentialModel::gaussian(
            s.require_f64("potential", "height")?,
            s.f64("potential", "width")?.unwrap_or(1.0),
        )?),
        "tabulated" => {
            let path = s
                .get("potential", "table")
                .ok_or_else(|| CliError::Input("missing `potential.table` (or --table)".into()))?;
            let text = read(Path::new(path))?;
            Model::Local(PotentialModel::tabulated_from_csv(text.as_bytes())?)
        }
        "yamaguchi" => Model::Separable(SeparableModel::yamaguchi(
            s.require_f64("potential", "beta")?,
            s.require_f64("potential", "alphab")?,
        )?),
        other => return Err(CliError::Input(format!("unknown potential kind `{other}`"))),
    })
}

fn step(s: &Scenario) -> Result<f64, CliError> {
    let h = s.f64("grid", "step")?.unwrap_or(DEFAULT_STEP);
    if !(h > 0.0) {
        return Err(CliError::Input(format!("grid step must be positive, got {h}")));
    }
    Ok(h)
}

fn positive_list(s: &Scenario, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
    let values = s.list("sweep", key)?.unwrap_or_else(|| default.to_vec());
    if values.is_empty() || values.iter().any(|v| !(*v > 0.0)) {
        return Err(CliError::Input(format!("`sweep.{key}` must be a list of positive numbers")));
    }
    Ok(values)
}

fn problem(m: Model, step: f64, k_min: f64) -> Result<Box<dyn WaveProblem>, CliError> {
    Ok(match m {
        Model::Local(p) => Box::new(LocalProblem::with_default_grid(p, step, k_min)?),
        Model::Separable(p) => Box::new(SeparableProblem::with_default_grid(p, step, k_min)?),
    })
}

fn header(table: &mut Table, command: &str, s: &Scenario) {
    table.meta("wavepole", VERSION);
    table.meta("command", command);
    table.meta("scenario_sha256", s.hash());
    let canonical = s.canonical();
    for line in canonical.lines() {
        table.meta("scenario", line);
    }
}

fn grid_meta(table: &mut Table, p: &dyn WaveProblem) {
    let g = p.grid();
    table.meta("grid", format!("step={} r_max={} points={}", g.step(), g.r_max(), g.len()));
}

fn shallowest(p: &dyn WaveProblem) -> Result<BoundState, CliError> {
    p.bound_states()?
        .pop()
        .ok_or_else(|| CliError::Empty("the potential has no bound state".into()))
}

fn list_meta(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub fn bind(s: &Scenario) -> Result<(Table, usize), CliError> {
    let m = model(s)?;
    let well = match &m {
        Model::Local(p) => p.well_parameters(),
        Model::Separable(_) => None,
    };
    let search_virtual = s.flag("sweep", "virtual")?;
    let virtual_model = match (&m, search_virtual) {
        (Model::Local(p), true) => Some(p.clone()),
        (Model::Separable(_), true) => {
            return Err(CliError::Input("virtual-state search needs a local potential".into()))
        }
        _ => None,
    };
    let p = problem(m, step(s)?, 1.0)?;
    let mut table = Table::new(["level", "kind", "alpha", "energy", "asymptotic_norm", "node_count", "closed_form_alpha"]);
    header(&mut table, "bind", s);
    grid_meta(&mut table, p.as_ref());
    let bound = p.bound_states()?;
    let roots = well.map(|(d, a)| well_alpha_roots(d, a, true)).unwrap_or_default();
    let bound_roots: Vec<f64> = roots.iter().copied().filter(|r| *r > 0.0).collect();
    for (i, b) in bound.iter().enumerate() {
        table.push(vec![
            i.into(),
            Cell::Text("bound".into()),
            b.alpha().into(),
            b.energy().into(),
            b.asymptotic_norm().into(),
            b.node_count().into(),
            bound_roots.get(i).copied().into(),
        ]);
    }
    let mut count = bound.len();
    if let Some(vm) = virtual_model {
        let virtual_roots: Vec<f64> = roots.iter().copied().filter(|r| *r < 0.0).collect();
        let found = find_virtual_states(&vm, p.grid(), default_virtual_window(&vm))?;
        for (i, a) in found.iter().enumerate() {
            table.push(vec![
                i.into(),
                Cell::Text("virtual".into()),
                (*a).into(),
                (-a * a).into(),
                Cell::Empty,
                Cell::Empty,
                virtual_roots.get(i).copied().into(),
            ]);
        }
        count += found.len();
    }
    Ok((table, count))
}

pub fn scatter(s: &Scenario) -> Result<Table, CliError> {
    let m = model(s)?;
    let well = match &m {
        Model::Local(p) => p.well_parameters(),
        Model::Separable(_) => None,
    };
    let ks = positive_list(s, "k", &[0.1, 0.2, 0.5, 1.0])?;
    let k_min = ks.iter().copied().fold(f64::MAX, f64::min);
    let p = problem(m, step(s)?, k_min)?;
    let mut table = Table::new(["k", "delta", "delta_principal", "winding", "closed_form_delta"]);
    header(&mut table, "scatter", s);
    grid_meta(&mut table, p.as_ref());
    let rows = ks
        .par_iter()
        .map(|&k| {
            let st = p.scattering(k)?;
            let closed = well.map(|(d, a)| well_scattering(d, a, k).map(|w| w.delta)).transpose()?;
            let phase = st.phase_shift();
            Ok(vec![
                k.into(),
                st.delta().into(),
                phase.principal.into(),
                Cell::Int(phase.winding as i64),
                closed.into(),
            ])
        })
        .collect::<wavepole::Result<Vec<_>>>()?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Closed-form `R1(r)` family for the model, parameterised by the solved `alpha`.
fn reference_model(m: &Model) -> impl Fn(f64) -> Option<ReferenceModel> {
    let (well, bargmann, yamaguchi) = match m {
        Model::Local(p) => (p.well_parameters(), p.bargmann_parameters(), None),
        Model::Separable(y) => (None, None, Some(y.beta())),
    };
    move |alpha| {
        if let Some((depth, radius)) = well {
            Some(ReferenceModel::SphericalWell { depth, radius, alpha })
        } else if let Some((beta, alpha)) = bargmann {
            Some(ReferenceModel::Bargmann { beta, alpha })
        } else {
            yamaguchi.map(|beta| ReferenceModel::Yamaguchi { beta, alpha })
        }
    }
}

pub fn ratio(s: &Scenario) -> Result<Table, CliError> {
    let m = model(s)?;
    let well = match &m {
        Model::Local(p) => p.well_parameters(),
        Model::Separable(_) => None,
    };
    let ks = positive_list(s, "k", &DEFAULT_K_SAMPLES)?;
    let radii = match s.list("sweep", "r")? {
        Some(r) => r,
        None => (0..=20).map(|i| i as f64 * 0.1).collect(),
    };
    if radii.iter().any(|r| *r < 0.0) {
        return Err(CliError::Input("radii must be non-negative".into()));
    }
    let k_min = ks.iter().copied().fold(f64::MAX, f64::min);
    let h = step(s)?;
    let reference_of = reference_model(&m);
    let p = problem(m, h, k_min)?;
    let b = shallowest(p.as_ref())?;
    let series = fit_ratio_series(p.as_ref(), &b, &radii, &ks)?;
    let reference = reference_of(b.alpha());

    let mut table = Table::new(["r", "R1", "R1_stderr", "R2", "R2_stderr", "fit_residual", "R1_reference"]);
    header(&mut table, "ratio", s);
    grid_meta(&mut table, p.as_ref());
    table.meta("alpha", b.alpha());
    table.meta("node_count", b.node_count());
    table.meta("k_samples", list_meta(&ks));
    table.meta("condition", series.condition);
    if let Some((depth, radius)) = well {
        let a = well_sign_arbitration(depth, radius, h, &ks)?;
        table.meta("R1(0)_fitted", a.fitted);
        table.meta("R1(0)_closed_form", a.formula);
        table.meta("R1(0)_magnitude_ratio", a.magnitude_ratio);
        table.meta("R1(0)_sign", a.verdict());
    }
    for (i, &r) in radii.iter().enumerate() {
        let refv = reference.map(|rm| r1_reference(rm, r).value);
        table.push(vec![
            r.into(),
            series.r1[i].into(),
            series.r1_stderr[i].into(),
            series.r2[i].into(),
            series.r2_stderr[i].into(),
            series.residual[i].into(),
            refv.into(),
        ]);
    }
    Ok(table)
}

pub fn crossover(s: &Scenario) -> Result<(Table, usize), CliError> {
    let m = model(s)?;
    let bargmann = match &m {
        Model::Local(p) => p.bargmann_parameters(),
        Model::Separable(_) => None,
    };
    let ks = positive_list(s, "k", &[0.1])?;
    let k_min = ks.iter().copied().fold(f64::MAX, f64::min);
    let p = problem(m, step(s)?, k_min)?;
    let b = shallowest(p.as_ref())?;
    let found = ks
        .par_iter()
        .map(|&k| crossover_radius(p.as_ref(), &b, k))
        .collect::<wavepole::Result<Vec<_>>>()?;
    let mut table = Table::new(["k", "r_star", "found"]);
    header(&mut table, "crossover", s);
    grid_meta(&mut table, p.as_ref());
    table.meta("alpha", b.alpha());
    if let Some((beta, alpha)) = bargmann {
        if let Some(q) = bargmann_reference_crossover(beta, alpha, false) {
            table.meta("quadratic_estimate", q);
        }
        if let Some(q) = bargmann_reference_crossover(beta, alpha, true) {
            table.meta("quartic_estimate", q);
        }
    }
    let mut count = 0;
    for (k, c) in ks.iter().zip(found) {
        let r = c.radius();
        count += r.is_some() as usize;
        table.push(vec![(*k).into(), r.into(), (r.is_some() as usize).into()]);
    }
    Ok((table, count))
}

pub fn fig1_to_table(t: &Fig1Table, s: &Scenario) -> Table {
    let mut columns = vec!["r".to_string(), "psi_bound".to_string()];
    columns.extend(t.k_values.iter().map(|k| format!("psi_mod_k{k}")));
    let mut table = Table::new(columns);
    header(&mut table, "fig1", s);
    table.meta("case", t.case.index());
    table.meta("depth", t.case.depth());
    table.meta("radius", 1.0);
    table.meta("alpha_ref", t.case.alpha_ref());
    table.meta("grid", format!("step={}", t.step));
    for (i, r) in t.radii.iter().enumerate() {
        let mut row = vec![Cell::Num(*r), t.bound.as_ref().map(|b| b[i]).into()];
        row.extend(t.modified.iter().map(|c| Cell::Num(c[i])));
        table.push(row);
    }
    table
}

pub fn fig1(s: &Scenario) -> Result<Table, CliError> {
    let case = s
        .usize("sweep", "case")?
        .ok_or_else(|| CliError::Input("missing figure case (or --case)".into()))?;
    let case = u8::try_from(case)
        .map_err(|_| CliError::Input(format!("figure case must be 1, 2 or 3, got {case}")))?;
    let t = fig1_table(Fig1Case::from_index(case)?, step(s)?)?;
    Ok(fig1_to_table(&t, s))
}

pub fn coulomb(s: &Scenario) -> Result<Table, CliError> {
    let terms = s.usize("sweep", "terms")?.unwrap_or(DEFAULT_TERMS);
    if s.get("sweep", "k").is_some() || s.get("sweep", "kappa").is_some() {
        let scale = CoulombScale::new(s.f64("sweep", "kappa")?.unwrap_or(1.0))?;
        let ks = positive_list(s, "k", &[0.3, 0.5, 1.0, 2.0])?;
        let mut table = Table::new([
            "k",
            "eta",
            "gamow",
            "pole_sum",
            "raw_residual",
            "tail_bound",
            "completed_residual",
            "single_pole_error",
        ]);
        header(&mut table, "coulomb", s);
        table.meta("kappa", scale.kappa());
        table.meta("terms", terms);
        for k in ks {
            let p = pole_decomposition_residual(k, scale, terms)?;
            table.push(vec![
                k.into(),
                p.eta.into(),
                p.closed_form.into(),
                p.pole_sum.into(),
                p.raw_residual().into(),
                p.tail_bound.into(),
                p.completed_residual().into(),
                single_pole_error(k, scale)?.into(),
            ]);
        }
        return Ok(table);
    }
    let etas = s.list("sweep", "eta")?.unwrap_or_else(|| vec![1.0]);
    let mut table = Table::new([
        "eta",
        "gamow",
        "series",
        "series_completed",
        "raw_difference",
        "tail_bound",
        "completed_difference",
    ]);
    header(&mut table, "coulomb", s);
    table.meta("terms", terms);
    for eta in etas {
        let g = gamow_factor(eta);
        let series = gamow_series(eta, terms)?;
        table.push(vec![
            eta.into(),
            g.into(),
            series.partial.into(),
            series.completed().into(),
            (g - series.partial).abs().into(),
            series.tail_bound.into(),
            (g - series.completed()).abs().into(),
        ]);
    }
    Ok(table)
}

pub fn perturb(s: &Scenario) -> Result<Table, CliError> {
    let Model::Local(base) = model(s)? else {
        return Err(CliError::Input("perturbation needs a local potential".into()));
    };
    let eps = s.list("sweep", "eps")?.unwrap_or_else(|| vec![0.04, 0.02, 0.01]);
    let ks = positive_list(s, "k", &[0.05, 0.1, 0.2, 0.3])?;
    let radius = s
        .f64("sweep", "profile_radius")?
        .or_else(|| base.well_parameters().map(|(_, a)| a))
        .unwrap_or(1.0);
    let profile = PotentialModel::spherical_well(1.0, radius)?.scaled(-1.0);
    let k_min = ks.iter().copied().fold(f64::MAX, f64::min);
    let p = LocalProblem::with_default_grid(base.clone(), step(s)?, k_min)?;
    let report = consistency_report(&base, &profile, &eps, &ks, p.grid())?;
    let mut table = Table::new([
        "eps",
        "dE_first_order",
        "dE_exact",
        "alpha_first_order",
        "alpha_exact",
        "phase_error",
    ]);
    header(&mut table, "perturb", s);
    grid_meta(&mut table, &p);
    table.meta("alpha0", report.alpha0);
    table.meta("k", list_meta(&report.k_list));
    table.meta("profile", format!("-1 for r < {radius}"));
    for r in &report.rows {
        table.push(vec![
            r.eps.into(),
            r.delta_e_first_order.into(),
            r.delta_e_exact.into(),
            r.alpha_first_order.into(),
            r.alpha_exact.into(),
            r.phase_error.into(),
        ]);
    }
    Ok(table)
}

pub fn validate(step: f64, fig_dir: Option<&Path>) -> Result<(), CliError> {
    if !(step > 0.0) {
        return Err(CliError::Input(format!("grid step must be positive, got {step}")));
    }
    let cfg = ValidationConfig { step };
    let outcomes = run_all(&cfg);
    for o in &outcomes {
        print!("{o}");
    }
    if let Some(dir) = fig_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut s = Scenario::default();
        s.set("grid", "step", step.to_string());
        for case in [Fig1Case::Single, Fig1Case::Excited, Fig1Case::Virtual] {
            let t = fig1_table(case, step)?;
            let path = dir.join(format!("fig1_case{}.csv", case.index()));
            write(&path, &fig1_to_table(&t, &s).to_csv())?;
        }
    }
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| o.id.to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("criteria failed: {}", failed.join(", "))))
    }
}
