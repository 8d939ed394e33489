//! Subcommand drivers. Each returns human-readable summary lines and the
//! artifact paths it wrote.

use std::path::PathBuf;

use polyband_core::block::{assemble_block, build_index_set, dominant_over_set, match_resonant};
use polyband_core::cascade::ParameterCascade;
use polyband_core::float::{add, norm, powi, scale};
use polyband_core::lattice::QuasiMomentum;
use polyband_core::planewave::{bloch_solve, SolveOptions};
use polyband_core::resonance::Classifier;
use polyband_core::scanner::{
    band_radius, certify_grid, sample_class, sphere_samples, stable_gap_report, BandSolver, BandTable, GridSpec,
    MeasureEstimate,
};
use polyband_core::series::{known_part_corrections, order_sweep, SeriesOptions, SweepOracle};
use polyband_core::simple::{
    bloch_verify, check_simplicity, isoenergetic_sample, known_part, uniqueness, Condition, RayOptions, RayOutcome,
};
use polyband_core::Error;
use serde::Serialize;

use crate::config::Experiment;
use crate::error::{RunError, RunResult};
use crate::output::{coords, num, ArtifactWriter};
use crate::parallel::par_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Params,
    Classify,
    Predict,
    Verify,
    ResonantCheck,
    SimpleCheck,
    Bloch,
    Bands,
    Gaps,
    Isoenergetic,
    Measure,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Params => "params",
            Command::Classify => "classify",
            Command::Predict => "predict",
            Command::Verify => "verify",
            Command::ResonantCheck => "resonant-check",
            Command::SimpleCheck => "simple-check",
            Command::Bloch => "bloch",
            Command::Bands => "bands",
            Command::Gaps => "gaps",
            Command::Isoenergetic => "isoenergetic",
            Command::Measure => "measure",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// Runs `command`; artifacts go to `out_dir` or the config's output directory.
pub fn run(command: Command, exp: &Experiment, out_dir: Option<PathBuf>) -> RunResult<Summary> {
    let dir = out_dir.unwrap_or_else(|| {
        let d = &exp.config.run.output_dir;
        if d.is_absolute() {
            d.clone()
        } else {
            exp.path.parent().map(|p| p.join(d)).unwrap_or_else(|| d.clone())
        }
    });
    let w = ArtifactWriter::new(&dir, command.name(), &exp.hash, exp.seed())?;
    match command {
        Command::Params => params(exp, &w),
        Command::Classify => classify(exp, &w),
        Command::Predict => predict(exp, &w),
        Command::Verify => verify(exp, &w),
        Command::ResonantCheck => resonant_check(exp, &w),
        Command::SimpleCheck => simple_check(exp, &w),
        Command::Bloch => bloch(exp, &w),
        Command::Bands => bands(exp, &w),
        Command::Gaps => gaps(exp, &w),
        Command::Isoenergetic => isoenergetic(exp, &w),
        Command::Measure => measure(exp, &w),
    }
}

fn missing(exp: &Experiment, section: &str) -> RunError {
    RunError::config(&exp.path, format!("subcommand needs a [{section}] section"))
}

fn need_points(exp: &Experiment) -> RunResult<&[Vec<f64>]> {
    if exp.config.points.is_empty() {
        return Err(RunError::config(&exp.path, "subcommand needs a non-empty `points` list"));
    }
    for p in &exp.config.points {
        if p.len() != exp.dim() {
            return Err(RunError::config(&exp.path, format!("point {p:?} has dimension {}, lattice has {}", p.len(), exp.dim())));
        }
    }
    Ok(&exp.config.points)
}

/// Cascade for a point: the configured `ρ` closest to `|x|`.
fn cascade_for(exp: &Experiment, x: &[f64]) -> polyband_core::Result<ParameterCascade> {
    let r = norm(x);
    let rho = exp.rhos().iter().copied().min_by(|a, b| (a - r).abs().total_cmp(&(b - r).abs())).expect("non-empty");
    exp.cascade(rho)
}

fn solve_options(exp: &Experiment, cascade: &ParameterCascade, polish: bool) -> SolveOptions {
    let o = &exp.config.oracle;
    SolveOptions { refine: o.refine, match_halfwidth: o.match_halfwidth.unwrap_or_else(|| cascade.match_halfwidth()), polish }
}

#[derive(Serialize)]
struct CheckRow {
    name: &'static str,
    level: Option<usize>,
    statement: String,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

#[derive(Serialize)]
struct ParamsRow {
    rho: f64,
    mode: &'static str,
    d: usize,
    l: u32,
    s: f64,
    p: f64,
    m: usize,
    alpha: f64,
    alpha_k: Vec<f64>,
    k1: usize,
    p1: usize,
    eps1: f64,
    pool_radius: f64,
    thresholds: Vec<f64>,
    known_part_index: usize,
    checks: Vec<CheckRow>,
}

fn params(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let mut s = Summary::default();
    let mut rows = Vec::new();
    for &rho in exp.rhos() {
        let c = exp.cascade(rho)?;
        s.lines.push(format!(
            "rho = {rho}: m = {}, alpha = 1/{}, k1 = {}, p1 = {}, eps1 = {:.6e}",
            c.m, c.m, c.k1, c.p1, c.eps1()
        ));
        let mut checks = Vec::new();
        for ch in &c.checks {
            let tag = if ch.holds() { "PASS" } else { "FAIL" };
            let name = match ch.level {
                Some(k) => format!("{}[{k}]", ch.name),
                None => ch.name.to_string(),
            };
            s.lines.push(format!("  {tag} {name}: {} ({:.6} vs {:.6})", ch.statement, ch.lhs, ch.rhs));
            checks.push(CheckRow {
                name: ch.name,
                level: ch.level,
                statement: ch.statement.clone(),
                lhs: ch.lhs,
                rhs: ch.rhs,
                holds: ch.holds(),
            });
        }
        rows.push(ParamsRow {
            rho,
            mode: if c.is_scaled() { "scaled" } else { "theory" },
            d: c.d,
            l: c.l,
            s: c.s,
            p: c.p,
            m: c.m,
            alpha: c.alpha,
            alpha_k: c.alpha_k.clone(),
            k1: c.k1,
            p1: c.p1,
            eps1: c.eps1(),
            pool_radius: c.pool_radius(),
            thresholds: (1..=c.d + 1).map(|k| c.threshold(k)).collect(),
            known_part_index: c.known_part_index(),
            checks,
        });
    }
    s.files.push(w.json("params.json", &rows)?);
    Ok(s)
}

fn classify(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let mut s = Summary::default();
    let header: Vec<String> = ["x", "rho", "level", "directions", "margins"].iter().map(|h| h.to_string()).collect();
    let mut rows = Vec::new();
    for x in need_points(exp)? {
        let c = cascade_for(exp, x)?;
        let cl = Classifier::new(&exp.lattice, &c);
        let (level, dirs, margins) = match cl.classify(x) {
            Ok(class) => {
                let d: Vec<String> = class.directions().iter().map(|b| format!("({})", coords(&b.coords))).collect();
                (class.level().to_string(), d.join(";"), coords(&class.margins.iter().map(|m| num(*m)).collect::<Vec<_>>()))
            }
            Err(Error::FullRankResonance { level }) => (format!("full{level}"), String::new(), String::new()),
            Err(e) => return Err(e.into()),
        };
        s.lines.push(format!("x = ({}): level {level} {dirs}", coords(x)));
        rows.push(vec![coords(x), num(c.rho), level, dirs, margins]);
    }
    s.files.push(w.csv("classify.csv", &header, &rows)?);
    Ok(s)
}

fn predict(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let mut s = Summary::default();
    let header: Vec<String> =
        ["x", "gamma", "t", "iterations", "base", "corrections", "known_part"].iter().map(|h| h.to_string()).collect();
    let mut rows = Vec::new();
    for x in need_points(exp)? {
        let c = cascade_for(exp, x)?;
        let (g, t) = exp.lattice.reduce(x)?;
        let v = add(&g.embedding, &t.reduced);
        let k = c.known_part_index();
        let e = known_part_corrections(&v, exp.l(), &exp.potential, k, SeriesOptions::default())?;
        let value = e.base + e.corrections[k];
        s.lines.push(format!("x = ({}): F = {} (F_{k} = {:e})", coords(x), num(value), e.corrections[k]));
        rows.push(vec![
            coords(x),
            coords(&g.coords),
            coords(&t.reduced.iter().map(|y| num(*y)).collect::<Vec<_>>()),
            k.to_string(),
            num(e.base),
            coords(&e.corrections.iter().map(|y| num(*y)).collect::<Vec<_>>()),
            num(value),
        ]);
    }
    s.files.push(w.csv("predict.csv", &header, &rows)?);
    Ok(s)
}

#[derive(Serialize)]
struct SlopeRow {
    iterations: usize,
    slope: Option<f64>,
}

fn verify(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let sw = exp.config.sweep.as_ref().ok_or_else(|| missing(exp, "sweep"))?;
    if sw.direction.len() != exp.dim() || norm(&sw.direction) == 0.0 {
        return Err(RunError::config(&exp.path, "[sweep] direction must be a nonzero vector of the lattice dimension"));
    }
    let e = scale(&sw.direction, 1.0 / norm(&sw.direction));
    let centers: Vec<Vec<f64>> = exp.rhos().iter().map(|r| scale(&e, *r)).collect();
    let c0 = exp.cascade(exp.rhos()[0])?;
    let o = &exp.config.oracle;
    let oracle = SweepOracle {
        window_radius: o.window_radius,
        refine: o.refine,
        match_halfwidth: o.match_halfwidth.unwrap_or_else(|| c0.match_halfwidth()),
    };
    let table = order_sweep(&exp.lattice, &centers, exp.l(), &exp.potential, &sw.iterations, oracle)?;
    let header: Vec<String> = ["rho", "iterations", "error", "weight"].iter().map(|h| h.to_string()).collect();
    let rows: Vec<Vec<String>> =
        table.rows.iter().map(|r| vec![num(r.rho), r.iterations.to_string(), num(r.error), num(r.weight)]).collect();
    let mut s = Summary::default();
    for r in &table.rows {
        s.lines.push(format!("rho = {:.6} s = {}: error {:e} (weight {:.6})", r.rho, r.iterations, r.error, r.weight));
    }
    let slopes: Vec<SlopeRow> = table.slopes.iter().map(|(i, sl)| SlopeRow { iterations: *i, slope: *sl }).collect();
    for sl in &slopes {
        s.lines.push(format!("slope s = {}: {:?}", sl.iterations, sl.slope));
    }
    s.files.push(w.csv("verify.csv", &header, &rows)?);
    s.files.push(w.json("verify.json", &slopes)?);
    Ok(s)
}

#[derive(Serialize)]
struct ResonantRow {
    x: Vec<f64>,
    level: usize,
    directions: Vec<Vec<i64>>,
    block_size: usize,
    eigenpair: usize,
    block_weight: f64,
    /// `Λ_N - λ_j`.
    block_deviation: f64,
    /// `Λ_N - |v|^{2l} - F_1`, with singular tuples skipped.
    series_deviation: f64,
}

fn resonant_check(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let mut s = Summary::default();
    let mut rows = Vec::new();
    for x in need_points(exp)? {
        let c = cascade_for(exp, x)?;
        let class = Classifier::new(&exp.lattice, &c).classify(x)?;
        if !class.is_resonant() {
            return Err(Error::NotResonant.into());
        }
        let (g, t) = exp.lattice.reduce(x)?;
        let set = build_index_set(&exp.lattice, &g.coords, &t.reduced, class.directions(), &c)?;
        let block = assemble_block(&set, exp.l(), &exp.potential)?;
        let v = add(&g.embedding, &t.reduced);
        let spec = bloch_solve(
            &exp.lattice,
            exp.l(),
            &exp.potential,
            &QuasiMomentum::new(t.reduced.clone()),
            &v,
            exp.config.oracle.window_radius,
            &g.coords,
            solve_options(exp, &c, false),
        )?;
        let (n, weight) = dominant_over_set(&spec, &set);
        let (_, dev) = match_resonant(&spec, &block, n);
        let opts = SeriesOptions { skip_singular: true, ..Default::default() };
        let f1 = known_part_corrections(&v, exp.l(), &exp.potential, 1, opts)?.corrections[1];
        let series_dev = spec.offsets[n] - f1;
        s.lines.push(format!(
            "x = ({}): level {}, block {} states, |Λ-λ| = {:e}, |Λ-(|v|^2l+F_1)| = {:e}",
            coords(x),
            class.level(),
            block.len(),
            dev.abs(),
            series_dev.abs()
        ));
        rows.push(ResonantRow {
            x: x.clone(),
            level: class.level(),
            directions: class.directions().iter().map(|b| b.coords.clone()).collect(),
            block_size: block.len(),
            eigenpair: n,
            block_weight: weight,
            block_deviation: dev,
            series_deviation: series_dev,
        });
    }
    s.files.push(w.json("resonant.json", &rows)?);
    Ok(s)
}

#[derive(Serialize)]
struct CompetitorRow {
    gamma: Vec<i64>,
    level: usize,
    condition: &'static str,
    margin: f64,
}

#[derive(Serialize)]
struct SimpleRow {
    x: Vec<f64>,
    gamma: Vec<i64>,
    known_part: f64,
    eps1: f64,
    k_set_size: usize,
    member: bool,
    competitors: Vec<CompetitorRow>,
    /// Oracle eigenvalues within `ε₁` of the known part.
    in_window: usize,
    neighbor_gap: Option<f64>,
}

fn simple_check(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let pts = need_points(exp)?;
    let results = par_map(exp.config.run.workers, pts, |x| -> RunResult<SimpleRow> {
        let c = cascade_for(exp, x)?;
        let (g, t) = exp.lattice.reduce(x)?;
        let rep = check_simplicity(&exp.lattice, &g.coords, &t.reduced, &exp.potential, &c)?;
        let spec = bloch_solve(
            &exp.lattice,
            exp.l(),
            &exp.potential,
            &QuasiMomentum::new(t.reduced.clone()),
            &rep.v,
            exp.config.oracle.window_radius,
            &g.coords,
            solve_options(exp, &c, true),
        )?;
        let u = uniqueness(&spec, rep.known.correction, rep.eps1);
        Ok(SimpleRow {
            x: x.clone(),
            gamma: g.coords.clone(),
            known_part: rep.known.value(),
            eps1: rep.eps1,
            k_set_size: rep.k_set.len(),
            member: rep.member,
            competitors: rep
                .competitors
                .iter()
                .map(|c| CompetitorRow {
                    gamma: c.gamma.clone(),
                    level: c.level,
                    condition: match c.condition {
                        Condition::KnownPartGap => "known_part_gap",
                        Condition::BlockGap => "block_gap",
                    },
                    margin: c.margin,
                })
                .collect(),
            in_window: u.in_window.len(),
            neighbor_gap: u.neighbor_gap,
        })
    });
    let rows: Vec<SimpleRow> = results.into_iter().collect::<RunResult<_>>()?;
    let mut s = Summary::default();
    for r in &rows {
        let worst = r.competitors.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        s.lines.push(format!(
            "x = ({}): {} (|K| = {}, min margin {:e}, eigenvalues in window {})",
            coords(&r.x),
            if r.member { "member" } else { "non-member" },
            r.k_set_size,
            worst,
            r.in_window
        ));
    }
    s.files.push(w.json("simple.json", &rows)?);
    Ok(s)
}

#[derive(Serialize)]
struct CoefficientRow {
    offset: Vec<i64>,
    predicted: [f64; 2],
    measured: [f64; 2],
    ratio: [f64; 2],
}

#[derive(Serialize)]
struct BlochRow {
    x: Vec<f64>,
    gamma: Vec<i64>,
    weight: f64,
    residual_mass: f64,
    first_order: Vec<CoefficientRow>,
    normalization_predicted: Option<f64>,
    normalization_measured: Option<f64>,
}

fn bloch(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let mut s = Summary::default();
    let mut rows = Vec::new();
    for x in need_points(exp)? {
        let c = cascade_for(exp, x)?;
        let (g, t) = exp.lattice.reduce(x)?;
        let v = add(&g.embedding, &t.reduced);
        let spec = bloch_solve(
            &exp.lattice,
            exp.l(),
            &exp.potential,
            &QuasiMomentum::new(t.reduced.clone()),
            &v,
            exp.config.oracle.window_radius,
            &g.coords,
            solve_options(exp, &c, true),
        )?;
        let (n, _) = spec.dominant(&g.coords)?;
        let kp = known_part(&v, &exp.potential, &c)?;
        let rep = bloch_verify(&spec, n, &g.coords, exp.config.bloch_order, &exp.potential, &exp.lattice, kp.correction)?;
        s.lines.push(format!(
            "x = ({}): |b|^2 = {:.12}, residual mass {:e}",
            coords(x),
            rep.weight,
            rep.residual_mass
        ));
        rows.push(BlochRow {
            x: x.clone(),
            gamma: g.coords.clone(),
            weight: rep.weight,
            residual_mass: rep.residual_mass,
            first_order: rep
                .first_order
                .iter()
                .map(|c| CoefficientRow {
                    offset: c.offset.clone(),
                    predicted: [c.predicted.re, c.predicted.im],
                    measured: [c.measured.re, c.measured.im],
                    ratio: [c.ratio().re, c.ratio().im],
                })
                .collect(),
            normalization_predicted: rep.normalization.map(|n| n.0),
            normalization_measured: rep.normalization.map(|n| n.1),
        });
    }
    s.files.push(w.json("bloch.json", &rows)?);
    Ok(s)
}

/// Band table on `grid`, evaluated in parallel.
pub fn band_table(exp: &Experiment, grid: &GridSpec) -> RunResult<BandTable> {
    let b = exp.config.bands.as_ref().ok_or_else(|| missing(exp, "bands"))?;
    let radius = b.radius.unwrap_or_else(|| band_radius(&exp.lattice, b.bands, 2.0));
    let solver = BandSolver { l: exp.l(), n_bands: b.bands, radius };
    certify_grid(&exp.lattice, &exp.potential, &solver)?;
    let points = grid.points(&exp.lattice);
    let values = par_map(exp.config.run.workers, &points, |t| solver.solve(&exp.lattice, &exp.potential, t));
    let values: Vec<Vec<f64>> = values.into_iter().collect::<Result<_, _>>()?;
    Ok(BandTable::from_values(grid.clone(), values, 0)?)
}

fn bands(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let b = exp.config.bands.as_ref().ok_or_else(|| missing(exp, "bands"))?;
    let grid = GridSpec::uniform(exp.dim(), b.grid);
    let table = band_table(exp, &grid)?;
    let header: Vec<String> = ["point", "t", "n", "energy"].iter().map(|h| h.to_string()).collect();
    let mut rows = Vec::new();
    for (i, vals) in table.values.iter().enumerate() {
        let t = grid.point(&exp.lattice, i);
        let tc = coords(&t.iter().map(|y| num(*y)).collect::<Vec<_>>());
        for (n, e) in vals.iter().enumerate() {
            rows.push(vec![i.to_string(), tc.clone(), (n + 1).to_string(), num(*e)]);
        }
    }
    let mut s = Summary::default();
    for (n, (lo, hi)) in table.ranges().iter().enumerate() {
        s.lines.push(format!("band {}: [{}, {}]", n + 1, num(*lo), num(*hi)));
    }
    s.files.push(w.csv("bands.csv", &header, &rows)?);
    Ok(s)
}

#[derive(Serialize)]
struct GapsOut {
    grid: Vec<usize>,
    refined_grid: Vec<usize>,
    e_min: f64,
    e_max: f64,
    gaps: Vec<[f64; 2]>,
    stable: Option<bool>,
    band_ranges: Vec<[f64; 2]>,
}

fn gaps(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let b = exp.config.bands.as_ref().ok_or_else(|| missing(exp, "bands"))?;
    let grid = GridSpec::uniform(exp.dim(), b.grid);
    let coarse = band_table(exp, &grid)?;
    let fine = band_table(exp, &grid.doubled())?;
    let top = coarse.mins.last().copied().unwrap_or(0.0).min(fine.mins.last().copied().unwrap_or(0.0));
    let e_max = b.e_max.unwrap_or(top - 1e-9 * top.abs().max(1.0));
    let rep = stable_gap_report(&coarse, &fine, b.e_min, e_max, 1e-3)?;
    let mut s = Summary::default();
    s.lines.push(format!(
        "{} gap(s) in [{}, {}], stable under refinement: {:?}",
        rep.gaps.len(),
        num(rep.e_min),
        num(rep.e_max),
        rep.stable
    ));
    for g in &rep.gaps {
        s.lines.push(format!("  gap ({}, {})", num(g.0), num(g.1)));
    }
    let out = GapsOut {
        grid: grid.counts.clone(),
        refined_grid: grid.doubled().counts,
        e_min: rep.e_min,
        e_max: rep.e_max,
        gaps: rep.gaps.iter().map(|g| [g.0, g.1]).collect(),
        stable: rep.stable,
        band_ranges: fine.ranges().iter().map(|r| [r.0, r.1]).collect(),
    };
    s.files.push(w.json("gaps.json", &out)?);
    Ok(s)
}

fn isoenergetic(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let spec = exp.config.isoenergetic.as_ref().ok_or_else(|| missing(exp, "isoenergetic"))?;
    let opts = RayOptions { halfwidth: spec.halfwidth, ..Default::default() };
    let header: Vec<String> = ["rho", "ray", "status", "point", "radius", "residual", "first_order_radius"]
        .iter()
        .map(|h| h.to_string())
        .collect();
    let mut rows = Vec::new();
    let mut s = Summary::default();
    let l = exp.l();
    for &rho in exp.rhos() {
        let c = exp.cascade(rho)?;
        let out = par_map(exp.config.run.workers, &spec.rays, |ray| {
            isoenergetic_sample(&exp.lattice, &exp.potential, &c, std::slice::from_ref(ray), opts).map(|mut v| v.remove(0))
        });
        for (i, (ray, o)) in spec.rays.iter().zip(out).enumerate() {
            let e = scale(ray, 1.0 / norm(ray));
            let f1 = known_part_corrections(&scale(&e, rho), l, &exp.potential, 1, SeriesOptions::default())
                .map(|k| k.corrections[1])
                .unwrap_or(f64::NAN);
            let first = rho - f1 / (2.0 * l as f64 * powi(rho, 2 * l - 1));
            let row = match o? {
                RayOutcome::Root { point, radius, residual, .. } => {
                    s.lines.push(format!("rho = {rho} ray {i}: |x| = {} (first order {})", num(radius), num(first)));
                    vec![num(rho), i.to_string(), "root".into(), coords(&point.iter().map(|y| num(*y)).collect::<Vec<_>>()), num(radius), num(residual), num(first)]
                }
                RayOutcome::Resonant { point, level } => {
                    s.lines.push(format!("rho = {rho} ray {i}: skipped, resonant level {level}"));
                    vec![num(rho), i.to_string(), format!("resonant{level}"), coords(&point.iter().map(|y| num(*y)).collect::<Vec<_>>()), num(norm(&point)), String::new(), num(first)]
                }
            };
            rows.push(row);
        }
    }
    s.files.push(w.csv("isoenergetic.csv", &header, &rows)?);
    Ok(s)
}

#[derive(Serialize)]
struct MeasureRow {
    rho: f64,
    samples: usize,
    counts: Vec<usize>,
    fractions: Vec<f64>,
    std_errors: Vec<f64>,
    resonant_fraction: f64,
}

/// Class fractions on the sphere `|x| = ρ`, classified in parallel.
pub fn measure_estimate(exp: &Experiment, cascade: &ParameterCascade, samples: usize) -> RunResult<MeasureEstimate> {
    let d = exp.dim();
    let cl = Classifier::new(&exp.lattice, cascade);
    let pts = sphere_samples(d, cascade.rho, samples, exp.seed());
    let classes = par_map(exp.config.run.workers, &pts, |x| sample_class(&cl, x, d));
    let classes: Vec<usize> = classes.into_iter().collect::<Result<_, _>>()?;
    Ok(MeasureEstimate::from_classes(cascade.rho, d, &classes))
}

fn measure(exp: &Experiment, w: &ArtifactWriter) -> RunResult<Summary> {
    let spec = exp.config.measure.as_ref().ok_or_else(|| missing(exp, "measure"))?;
    let mut s = Summary::default();
    let mut rows = Vec::new();
    for &rho in exp.rhos() {
        let c = exp.cascade(rho)?;
        let est = measure_estimate(exp, &c, spec.samples)?;
        let (r, se) = est.resonant();
        s.lines.push(format!("rho = {rho}: 1 - fraction(U) = {r:.6} ± {se:.6}, counts {:?}", est.counts));
        rows.push(MeasureRow {
            rho,
            samples: est.samples,
            counts: est.counts.clone(),
            fractions: est.fractions.clone(),
            std_errors: est.std_errors.clone(),
            resonant_fraction: r,
        });
    }
    s.files.push(w.json("measure.json", &rows)?);
    Ok(s)
}
