//! Job runners. Every job evaluates its points in parallel, collects the
//! results in grid order and writes CSV files (plus SVG charts on request).

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::cli::config::{GridPoint, JobConfig, JobKind, QuenchObservable, QuenchSection, TimeGrid};
use crate::cli::csv::{self, Cell, Table};
use crate::cli::plot::{self, LineChart, Scale};
use crate::dynamics::{
    delta_correlation, entropy_growth, growth_law_fit, linear_time_grid, log_time_grid,
    relaxation_exponent, steady_profile_upto, Branch, QuenchCase,
};
use crate::entanglement::{central_charge_from_series, chord_coordinate, entropy_profile};
use crate::error::{Error, Result};
use crate::gaussian::{ground_state, QuenchSetup};
use crate::model::{fermi_points, gap, ModelParams};
use crate::numerics::{decay_fit, kink_detect, linear_fit, FitResult, FitWindow};
use crate::spincorr::{chiral_order, fm_order, spin_correlator, Axis, SpinObservables};

const PARAM_COLS: [&str; 5] = ["gamma", "D", "h", "alpha", "n"];
const POST_COLS: [&str; 5] = ["post_gamma", "post_D", "post_h", "post_alpha", "post_n"];

fn param_cells(p: &ModelParams) -> Vec<Cell> {
    vec![p.gamma.into(), p.d.into(), p.h.into(), p.alpha.into(), p.n.into()]
}

fn label(i: usize, p: &GridPoint) -> String {
    p.label.clone().unwrap_or_else(|| format!("p{i}"))
}

fn header(lead: &[&str], params: bool, post: bool, tail: &[&str]) -> Vec<String> {
    let mut h: Vec<&str> = lead.to_vec();
    if params {
        h.extend(PARAM_COLS);
    }
    if post {
        h.extend(POST_COLS);
    }
    h.extend(tail);
    h.into_iter().map(String::from).collect()
}

/// Fit quantities that cannot be determined (no decaying data in the
/// window, too few peaks) are reported as NaN rather than failing the job.
fn fit_or_nan<T>(fit: Result<T>) -> Result<Option<T>> {
    match fit {
        Ok(f) => Ok(Some(f)),
        Err(Error::Domain(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn exponent_cells(fit: Option<FitResult>) -> [Cell; 2] {
    [fit.map(|f| f.exponent()).into(), fit.map(|f| f.r2).into()]
}

fn indexed(values: &[f64]) -> Vec<(f64, f64)> {
    values.iter().enumerate().map(|(i, &v)| ((i + 1) as f64, v)).collect()
}

/// Writes outputs under `dir` with a common file stem and comment echo.
struct Sink<'a> {
    cfg: &'a JobConfig,
    echo: String,
    files: Vec<PathBuf>,
}

impl<'a> Sink<'a> {
    fn new(cfg: &'a JobConfig) -> Result<Self> {
        std::fs::create_dir_all(&cfg.output.dir)
            .map_err(|e| Error::Io(format!("{}: {e}", cfg.output.dir.display())))?;
        // worker count and output location do not affect results and are
        // left out so reruns produce identical files
        let mut shown = cfg.clone();
        shown.job.workers = 0;
        shown.output = Default::default();
        let echo = format!(
            "chiralchain {} {}\n{}",
            env!("CARGO_PKG_VERSION"),
            cfg.job.kind,
            shown.to_toml()?
        );
        Ok(Sink {
            cfg,
            echo,
            files: Vec::new(),
        })
    }

    fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        self.cfg
            .output
            .dir
            .join(format!("{}{suffix}.{ext}", self.cfg.job.name))
    }

    fn table(&mut self, suffix: &str, mut table: Table) -> Result<PathBuf> {
        table.comments.insert(0, self.echo.clone());
        let path = self.path(suffix, "csv");
        table.write(&path)?;
        self.files.push(path.clone());
        Ok(path)
    }

    fn line(&mut self, csv_path: &Path, suffix: &str, chart: LineChart<'_>) -> Result<()> {
        if !self.cfg.output.plot {
            return Ok(());
        }
        let data = csv::read(csv_path)?;
        let svg = plot::line_chart(&data, &chart)?;
        let path = self.path(suffix, "svg");
        plot::write_svg(&path, &svg)?;
        self.files.push(path);
        Ok(())
    }

    fn heat(&mut self, csv_path: &Path, x: &str, y: &str, z: &str) -> Result<()> {
        if !self.cfg.output.plot {
            return Ok(());
        }
        let data = csv::read(csv_path)?;
        let title = format!("{} {z}", self.cfg.job.name);
        let svg = plot::heatmap(&data, x, y, z, &title)?;
        let path = self.path(&format!("_{z}"), "svg");
        plot::write_svg(&path, &svg)?;
        self.files.push(path);
        Ok(())
    }
}

fn chart<'a>(x: &'a str, ys: Vec<&'a str>, group: Option<&'a str>, title: String) -> LineChart<'a> {
    LineChart {
        x,
        ys,
        group,
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
        absolute: false,
        title,
    }
}

fn log_chart<'a>(x: &'a str, y: &'a str, title: String) -> LineChart<'a> {
    LineChart {
        x_scale: Scale::Log,
        y_scale: Scale::Log,
        absolute: true,
        ..chart(x, vec![y], Some("label"), title)
    }
}

/// Runs the configured job and returns the files written, in order.
pub fn run_job(cfg: &JobConfig) -> Result<Vec<PathBuf>> {
    let points = cfg.grid()?;
    let mut sink = Sink::new(cfg)?;
    match cfg.job.kind {
        JobKind::PhaseDiagram => phase_diagram(cfg, &points, &mut sink)?,
        JobKind::Correlations => correlations(cfg, &points, &mut sink)?,
        JobKind::Entropy => entropy(cfg, &points, &mut sink)?,
        JobKind::Quench => {
            let q = cfg
                .quench
                .as_ref()
                .ok_or_else(|| Error::Config("quench jobs need a [quench] section".into()))?;
            match q.observable {
                QuenchObservable::Relaxation => relaxation(cfg, q, &points, &mut sink)?,
                QuenchObservable::Steady => steady(cfg, &points, &mut sink)?,
                QuenchObservable::Entropy => entropy_after_quench(q, &points, &mut sink)?,
            }
        }
        JobKind::Scaling => scaling(cfg, &points, &mut sink)?,
    }
    Ok(sink.files)
}

/// Kink positions of each observable along a single sweep axis.
fn kink_table(axis: &str, xs: &[f64], columns: &[(&str, Vec<f64>)]) -> Result<Option<Table>> {
    if xs.len() < 5 {
        return Ok(None);
    }
    let mut t = Table::new(["observable", "axis", "kink"]);
    for (name, ys) in columns {
        let k = fit_kink(xs, ys)?;
        t.push(vec![(*name).into(), axis.into(), k.into()]);
    }
    Ok(Some(t))
}

fn fit_kink(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    fit_or_nan(kink_detect(xs, ys))
}

fn phase_diagram(cfg: &JobConfig, points: &[GridPoint], sink: &mut Sink<'_>) -> Result<()> {
    let rows = points
        .par_iter()
        .map(|gp| {
            let p = gp.pre;
            let state = ground_state(&p)?;
            let g = gap(&p);
            Ok([
                g,
                fermi_points(&p).len() as f64,
                chiral_order(&state)?,
                fm_order(&state)?,
                spin_correlator(&state, Axis::X, Axis::X, 1)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(header(
        &["point", "label"],
        true,
        false,
        &["gap", "gapped", "fermi_points", "chiral_order", "fm_order", "cxx1"],
    ));
    for (i, (gp, r)) in points.iter().zip(&rows).enumerate() {
        let mut row: Vec<Cell> = vec![i.into(), label(i, gp).into()];
        row.extend(param_cells(&gp.pre));
        row.extend([
            r[0].into(),
            (r[0] > 0.0).into(),
            (r[1] as usize).into(),
            r[2].into(),
            r[3].into(),
            r[4].into(),
        ]);
        t.push(row);
    }
    let path = sink.table("", t)?;
    let axes = cfg.axis_columns();
    match axes.as_slice() {
        [x] => {
            let xs: Vec<f64> = points.iter().map(|p| p.coords[x]).collect();
            let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
            let cols = [
                ("gap", col(0)),
                ("chiral_order", col(2)),
                ("fm_order", col(3)),
                ("cxx1", col(4)),
            ];
            if let Some(k) = kink_table(x, &xs, &cols)? {
                sink.table("_kinks", k)?;
            }
            let title = format!("{} vs {x}", cfg.job.name);
            sink.line(&path, "", chart(x, vec!["chiral_order", "fm_order", "gap"], None, title))?;
        }
        [x, y] => {
            for z in ["chiral_order", "fm_order", "gap"] {
                sink.heat(&path, x, y, z)?;
            }
        }
        _ => {}
    }
    Ok(())
}

fn correlations(cfg: &JobConfig, points: &[GridPoint], sink: &mut Sink<'_>) -> Result<()> {
    struct Out {
        obs: SpinObservables,
        mi: Vec<f64>,
        gap: f64,
        chiral: f64,
        fit_i: Option<FitResult>,
        fit_c: Option<FitResult>,
    }
    let results = points
        .par_iter()
        .map(|gp| {
            let p = gp.pre;
            let (lo, hi) = cfg.fit.r_range(p.n);
            let rmax = cfg.analysis.r_max.unwrap_or(p.n / 2).max(hi).min(p.n / 2);
            let state = ground_state(&p)?;
            let obs = SpinObservables::compute(&state, rmax)?;
            let mi = (1..=obs.cxx.len())
                .map(|r| obs.mutual_information(r))
                .collect::<Result<Vec<_>>>()?;
            let window = FitWindow::new(lo as f64, hi as f64);
            Ok(Out {
                fit_i: fit_or_nan(decay_fit(&indexed(&mi), window))?,
                fit_c: fit_or_nan(decay_fit(&indexed(&obs.cxx), window))?,
                gap: gap(&p),
                chiral: chiral_order(&state)?,
                obs,
                mi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = Table::new(header(
        &["point", "label"],
        true,
        false,
        &["gap", "mz", "chiral_order", "i_exponent", "i_r2", "cxx_exponent", "cxx_r2"],
    ));
    let mut profile = Table::new(["point", "label", "r", "cxx", "cyy", "czz", "cxy", "cyx", "mi"]);
    for (i, (gp, o)) in points.iter().zip(&results).enumerate() {
        let name = label(i, gp);
        let mut row: Vec<Cell> = vec![i.into(), name.clone().into()];
        row.extend(param_cells(&gp.pre));
        row.extend([o.gap.into(), o.obs.mz.into(), o.chiral.into()]);
        row.extend(exponent_cells(o.fit_i));
        row.extend(exponent_cells(o.fit_c));
        summary.push(row);
        for k in 0..o.obs.cxx.len() {
            profile.push(vec![
                i.into(),
                name.clone().into(),
                (k + 1).into(),
                o.obs.cxx[k].into(),
                o.obs.cyy[k].into(),
                o.obs.czz[k].into(),
                o.obs.cxy[k].into(),
                o.obs.cyx[k].into(),
                o.mi[k].into(),
            ]);
        }
    }
    sink.table("", summary)?;
    let path = sink.table("_profile", profile)?;
    sink.line(&path, "_mi", log_chart("r", "mi", format!("{} mutual information", cfg.job.name)))?;
    sink.line(&path, "_cxx", log_chart("r", "cxx", format!("{} xx correlation", cfg.job.name)))?;
    Ok(())
}

fn entropy(cfg: &JobConfig, points: &[GridPoint], sink: &mut Sink<'_>) -> Result<()> {
    let results = points
        .par_iter()
        .map(|gp| {
            let p = gp.pre;
            let (lo, hi) = cfg.fit.l_range(p.n);
            let ls: Vec<usize> = (1..=hi.max(1)).collect();
            let s = entropy_profile(&ground_state(&p)?, &ls)?;
            let series: Vec<(usize, f64)> = ls
                .iter()
                .copied()
                .zip(s.iter().copied())
                .filter(|&(l, _)| l >= lo)
                .collect();
            let fit = fit_or_nan(central_charge_from_series(p.n, &series))?;
            Ok((s, fit, gap(&p)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = Table::new(header(
        &["point", "label"],
        true,
        false,
        &["gap", "c_eff", "intercept", "r2"],
    ));
    let mut profile = Table::new(["point", "label", "l", "chord", "s"]);
    for (i, (gp, (s, fit, g))) in points.iter().zip(&results).enumerate() {
        let name = label(i, gp);
        let mut row: Vec<Cell> = vec![i.into(), name.clone().into()];
        row.extend(param_cells(&gp.pre));
        row.extend([
            (*g).into(),
            fit.map(|f| f.slope).into(),
            fit.map(|f| f.intercept).into(),
            fit.map(|f| f.r2).into(),
        ]);
        summary.push(row);
        for (k, &v) in s.iter().enumerate() {
            let l = k + 1;
            profile.push(vec![
                i.into(),
                name.clone().into(),
                l.into(),
                chord_coordinate(gp.pre.n, l).into(),
                v.into(),
            ]);
        }
    }
    let path = sink.table("", summary)?;
    let prof = sink.table("_profile", profile)?;
    if let [x] = cfg.axis_columns().as_slice() {
        let xs: Vec<f64> = points.iter().map(|p| p.coords[x]).collect();
        let c: Vec<f64> = results.iter().map(|r| r.1.map_or(f64::NAN, |f| f.slope)).collect();
        if let Some(k) = kink_table(x, &xs, &[("c_eff", c)])? {
            sink.table("_kinks", k)?;
        }
        sink.line(&path, "", chart(x, vec!["c_eff"], None, format!("{} c_eff", cfg.job.name)))?;
    }
    sink.line(
        &prof,
        "_profile",
        chart("chord", vec!["s"], Some("label"), format!("{} block entropy", cfg.job.name)),
    )?;
    Ok(())
}

fn setup_of(gp: &GridPoint) -> Result<QuenchSetup> {
    let post = gp
        .post
        .ok_or_else(|| Error::Config("quench point without a post-quench Hamiltonian".into()))?;
    if post.n != gp.pre.n {
        return Err(Error::Config(format!(
            "pre ({}) and post ({}) sizes differ",
            gp.pre.n, post.n
        )));
    }
    QuenchSetup::new(gp.pre, post)
}

fn quench_lead(i: usize, gp: &GridPoint, setup: &QuenchSetup) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![i.into(), label(i, gp).into()];
    row.extend(param_cells(&setup.pre));
    row.extend(param_cells(&setup.post));
    row.push(QuenchCase::classify(setup).label().into());
    row
}

fn times(q: &QuenchSection) -> Result<Vec<f64>> {
    if q.t_steps < 2 || !(q.t_end > q.t_start) || q.t_start < 0.0 {
        return Err(Error::Config(format!(
            "time grid [{}, {}] with {} steps is empty",
            q.t_start, q.t_end, q.t_steps
        )));
    }
    Ok(match q.grid {
        TimeGrid::Linear => linear_time_grid(q.t_start, q.t_end, q.t_steps),
        TimeGrid::Log => {
            if q.t_start <= 0.0 {
                return Err(Error::Config("log time grids need t_start > 0".into()));
            }
            log_time_grid(q.t_start, q.t_end, q.t_steps)
        }
    })
}

fn relaxation(
    cfg: &JobConfig,
    q: &QuenchSection,
    points: &[GridPoint],
    sink: &mut Sink<'_>,
) -> Result<()> {
    let ts = times(q)?;
    let (t0, t1) = cfg.fit.t_range();
    let results = points
        .iter()
        .map(|gp| {
            let setup = setup_of(gp)?;
            let series = delta_correlation(&setup, q.m, q.n_site, &ts)?;
            let fit = fit_or_nan(relaxation_exponent(&series, FitWindow::new(t0, t1)))?;
            Ok((setup, series, fit))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = Table::new(header(
        &["point", "label"],
        true,
        true,
        &["case", "steady_re", "steady_im", "chi", "chi_r2"],
    ));
    let mut series_t = Table::new(["point", "label", "t", "re", "im", "abs"]);
    for (i, (gp, (setup, s, fit))) in points.iter().zip(&results).enumerate() {
        let mut row = quench_lead(i, gp, setup);
        row.extend([s.steady.re.into(), s.steady.im.into()]);
        row.extend(exponent_cells(*fit));
        summary.push(row);
        for (t, v) in s.times.iter().zip(&s.values) {
            series_t.push(vec![
                i.into(),
                label(i, gp).into(),
                (*t).into(),
                v.re.into(),
                v.im.into(),
                v.norm().into(),
            ]);
        }
    }
    sink.table("", summary)?;
    let path = sink.table("_series", series_t)?;
    sink.line(&path, "_series", log_chart("t", "abs", format!("{} relaxation", cfg.job.name)))?;
    Ok(())
}

fn steady(cfg: &JobConfig, points: &[GridPoint], sink: &mut Sink<'_>) -> Result<()> {
    let results = points
        .par_iter()
        .map(|gp| {
            let setup = setup_of(gp)?;
            let (lo, hi) = cfg.fit.r_range(setup.n());
            let rmax = cfg.analysis.r_max.unwrap_or(hi).max(hi).min(setup.n() / 2);
            let prof = steady_profile_upto(&setup, rmax)?;
            let window = FitWindow::new(lo as f64, hi as f64);
            let fi = fit_or_nan(decay_fit(&indexed(&prof.mutual_information), window))?;
            let fc = fit_or_nan(decay_fit(&indexed(&prof.cxx), window))?;
            Ok((setup, prof, fi, fc))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = Table::new(header(
        &["point", "label"],
        true,
        true,
        &["case", "i_exponent", "i_r2", "cxx_exponent", "cxx_r2"],
    ));
    let mut profile = Table::new(["point", "label", "r", "mi", "cxx"]);
    for (i, (gp, (setup, prof, fi, fc))) in points.iter().zip(&results).enumerate() {
        let mut row = quench_lead(i, gp, setup);
        row.extend(exponent_cells(*fi));
        row.extend(exponent_cells(*fc));
        summary.push(row);
        for (k, (mi, c)) in prof.mutual_information.iter().zip(&prof.cxx).enumerate() {
            profile.push(vec![
                i.into(),
                label(i, gp).into(),
                (k + 1).into(),
                (*mi).into(),
                (*c).into(),
            ]);
        }
    }
    sink.table("", summary)?;
    let path = sink.table("_profile", profile)?;
    sink.line(&path, "_mi", log_chart("r", "mi", format!("{} steady mutual information", cfg.job.name)))?;
    sink.line(&path, "_cxx", log_chart("r", "cxx", format!("{} steady xx correlation", cfg.job.name)))?;
    Ok(())
}

fn entropy_after_quench(q: &QuenchSection, points: &[GridPoint], sink: &mut Sink<'_>) -> Result<()> {
    let ts = times(q)?;
    let results = points
        .iter()
        .map(|gp| {
            let setup = setup_of(gp)?;
            let s = entropy_growth(&setup, q.block, &ts)?;
            Ok((setup, s))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = Table::new(header(
        &["point", "label"],
        true,
        true,
        &["case", "saturation_time", "growth_slope", "growth_intercept", "growth_r2", "a1_plus", "a1_minus"],
    ));
    let mut series_t = Table::new(["point", "label", "t", "s"]);
    for (i, (gp, (setup, s))) in points.iter().zip(&results).enumerate() {
        let mut row = quench_lead(i, gp, setup);
        row.extend([
            s.saturation_time.into(),
            s.growth.map(|g| g.slope).into(),
            s.growth.map(|g| g.intercept).into(),
            s.growth.map(|g| g.r2).into(),
            s.a1(Branch::Plus).into(),
            s.a1(Branch::Minus).into(),
        ]);
        summary.push(row);
        for (t, v) in s.times.iter().zip(&s.entropies) {
            series_t.push(vec![i.into(), label(i, gp).into(), (*t).into(), (*v).into()]);
        }
    }
    sink.table("", summary)?;
    let path = sink.table("_series", series_t)?;
    let family: Vec<_> = results.into_iter().map(|r| r.1).collect();
    if family.len() >= 2 {
        if let Some(f) = fit_or_nan(growth_law_fit(&family))? {
            let mut t = Table::new(["branch", "slope", "intercept", "r2", "r2_plus", "r2_minus", "a1_spread"]);
            t.push(vec![
                format!("{:?}", f.branch).to_lowercase().into(),
                f.fit.slope.into(),
                f.fit.intercept.into(),
                f.fit.r2.into(),
                f.r2_plus.into(),
                f.r2_minus.into(),
                f.spread().into(),
            ]);
            sink.table("_growth", t)?;
        }
    }
    let title = format!("{} block entropy after quench", sink.cfg.job.name);
    sink.line(&path, "_series", chart("t", vec!["s"], Some("label"), title))?;
    Ok(())
}

fn scaling(cfg: &JobConfig, points: &[GridPoint], sink: &mut Sink<'_>) -> Result<()> {
    if !cfg.sweep.iter().any(|a| a.param == "h") {
        return Err(Error::Config("scaling jobs need a sweep over `h`".into()));
    }
    let h_inf = cfg.analysis.h_inf.unwrap_or(1.0);
    let c1 = points
        .par_iter()
        .map(|gp| spin_correlator(&ground_state(&gp.pre)?, Axis::X, Axis::X, 1))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Table::new(header(&["point"], true, false, &["cxx1"]));
    for (i, (gp, c)) in points.iter().zip(&c1).enumerate() {
        let mut row: Vec<Cell> = vec![i.into()];
        row.extend(param_cells(&gp.pre));
        row.push((*c).into());
        values.push(row);
    }
    sink.table("", values)?;

    // curves C(h) at fixed remaining parameters, in first-seen order
    let mut groups: Vec<(ModelParams, Vec<(f64, f64)>)> = Vec::new();
    for (gp, &c) in points.iter().zip(&c1) {
        let key = gp.pre.with_h(0.0);
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1.push((gp.pre.h, c)),
            None => groups.push((key, vec![(gp.pre.h, c)])),
        }
    }
    let mut deriv = Table::new(["gamma", "D", "alpha", "n", "h", "dcxx1_dh"]);
    let mut crit = Table::new(["gamma", "D", "alpha", "n", "h_c", "log2_n", "log2_distance"]);
    let mut fit_pts = Vec::new();
    for (key, curve) in &mut groups {
        curve.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mid: Vec<f64> = curve.windows(2).map(|w| (w[0].0 + w[1].0) / 2.0).collect();
        let d: Vec<f64> = curve
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        for (h, v) in mid.iter().zip(&d) {
            deriv.push(vec![
                key.gamma.into(),
                key.d.into(),
                key.alpha.into(),
                key.n.into(),
                (*h).into(),
                (*v).into(),
            ]);
        }
        let hc = fit_kink(&mid, &d)?;
        let log2n = (key.n as f64).log2();
        let dist = hc.map(|h| (h_inf - h).abs().log2());
        if let Some(y) = dist.filter(|v| v.is_finite()) {
            fit_pts.push((log2n, y));
        }
        crit.push(vec![
            key.gamma.into(),
            key.d.into(),
            key.alpha.into(),
            key.n.into(),
            hc.into(),
            log2n.into(),
            dist.into(),
        ]);
    }
    if let Some(f) = fit_or_nan(linear_fit(&fit_pts, FitWindow::all()))? {
        crit.comments.push(format!(
            "log2|h_inf - h_c| = {} + {} log2 N (r2 {}), h_inf = {}",
            csv::format_float(f.intercept),
            csv::format_float(f.slope),
            csv::format_float(f.r2),
            csv::format_float(h_inf)
        ));
    }
    let dpath = sink.table("_derivative", deriv)?;
    let cpath = sink.table("_critical", crit)?;
    let name = cfg.job.name.clone();
    sink.line(&dpath, "_derivative", chart("h", vec!["dcxx1_dh"], Some("n"), format!("{name} dC/dh")))?;
    sink.line(
        &cpath,
        "_critical",
        chart("log2_n", vec!["log2_distance"], None, format!("{name} finite-size shift")),
    )?;
    Ok(())
}
