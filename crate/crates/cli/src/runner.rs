//! Executes one operation from a validated config, writing CSV/JSON
//! artifacts named by operation and config hash, a config echo, and a
//! manifest. Every artifact carries the config hash and master seed.

use crate::config::{build_layout, Config, Operation};
use crate::svg::{Chart, Series};
use anyhow::{anyhow, Context, Result};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;
use traplab::assumptions;
use traplab::eigen;
use traplab::geometry::{BoxRegion, Coord, SiteBox};
use traplab::hamiltonian::{assemble, assemble_region};
use traplab::ids::{
    asymptotic_inverse, bracketing_bounds, estimate_ids, fit_lifshitz, ids_1d_hard_exact,
    log_lambda_grid, IdsEstimate, RateFunction,
};
use traplab::random_media::{sample, PotentialField};
use traplab::rng::{SeedPath, StreamTag};
use traplab::survival::{
    exact_survival_dirichlet, mc_survival, quenched_curve, scaling_check, spectral_upper_bound,
    Budget, PointStatus, SurvivalCurve, WallPolicy,
};

pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    pub budget_exhausted: bool,
}

struct Ctx<'a> {
    config: &'a Config,
    op: Operation,
    hash: String,
    seed: u64,
    out_dir: PathBuf,
    plots: bool,
    artifacts: Vec<PathBuf>,
    budget_exhausted: bool,
}

impl Ctx<'_> {
    fn provenance(&self) -> String {
        format!("config_hash={} master_seed={}", self.hash, self.seed)
    }

    fn artifact_path(&self, ext: &str) -> PathBuf {
        self.out_dir.join(format!("{}-{}.{ext}", self.op.name(), self.hash))
    }

    fn write_text(&mut self, ext: &str, body: &str) -> Result<PathBuf> {
        let path = self.artifact_path(ext);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(path.clone());
        Ok(path)
    }

    fn write_csv(&mut self, body: &str) -> Result<PathBuf> {
        self.write_text("csv", &format!("# {}\n{body}", self.provenance()))
    }

    fn write_json_records(&mut self, records: &[serde_json::Value]) -> Result<PathBuf> {
        let mut body = String::new();
        for r in records {
            let mut obj = serde_json::Map::new();
            obj.insert("config_hash".into(), json!(self.hash));
            obj.insert("master_seed".into(), json!(self.seed));
            if let serde_json::Value::Object(m) = r {
                for (k, v) in m {
                    obj.insert(k.clone(), v.clone());
                }
            } else {
                obj.insert("record".into(), r.clone());
            }
            body.push_str(&serde_json::Value::Object(obj).to_string());
            body.push('\n');
        }
        self.write_text("json", &body)
    }

    fn maybe_plot(&mut self, chart: &Chart) -> Result<()> {
        if self.plots {
            let svg = chart.render();
            self.write_text("svg", &svg)?;
        }
        Ok(())
    }

    fn field_seed(&self) -> SeedPath {
        SeedPath::new(self.seed, 0, StreamTag::Field)
    }
}

fn start_coord(x: &[i64], d: usize) -> Result<Coord> {
    let mut c = [0i64; 3];
    if x.is_empty() {
        return Ok(c);
    }
    if x.len() != d {
        return Err(anyhow!("start site has {} coordinates, geometry is {d}-dimensional", x.len()));
    }
    for (a, &v) in x.iter().enumerate() {
        c[a] = v;
    }
    Ok(c)
}

pub fn run(op: Operation, config: &Config, out_dir: &Path) -> Result<RunOutcome> {
    let experiment = config
        .experiment
        .as_ref()
        .ok_or_else(|| anyhow!("missing [experiment] section"))?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let mut ctx = Ctx {
        config,
        op,
        hash: config.hash(),
        seed: experiment.master_seed,
        out_dir: out_dir.to_path_buf(),
        plots: experiment.plots,
        artifacts: Vec::new(),
        budget_exhausted: false,
    };

    let started = Instant::now();
    match op {
        Operation::Eigen => run_eigen(&mut ctx)?,
        Operation::Ids => run_ids(&mut ctx)?,
        Operation::IdsExact1d => run_ids_exact(&mut ctx)?,
        Operation::LifshitzFit => run_lifshitz_fit(&mut ctx)?,
        Operation::Inverse => run_inverse(&mut ctx)?,
        Operation::Survival => run_survival(&mut ctx)?,
        Operation::Quenched => run_quenched(&mut ctx)?,
        Operation::Scaling => run_scaling(&mut ctx)?,
        Operation::Bracketing => run_bracketing(&mut ctx)?,
        Operation::Assumptions => run_assumptions(&mut ctx)?,
    }

    // config echo + manifest
    let echo_path = ctx.artifact_path("config.toml");
    fs::write(&echo_path, config.canonical())?;
    ctx.artifacts.push(echo_path.clone());
    let manifest = json!({
        "operation": op.name(),
        "config_hash": ctx.hash,
        "master_seed": ctx.seed,
        "crate_version": env!("CARGO_PKG_VERSION"),
        "wall_time_seconds": started.elapsed().as_secs_f64(),
        "budget_exhausted": ctx.budget_exhausted,
        "artifacts": ctx.artifacts.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect::<Vec<_>>(),
        "reproduce": format!("traplab {} --config {} --threads 1", op.name(), echo_path.display()),
    });
    let manifest_path = ctx.artifact_path("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    ctx.artifacts.push(manifest_path);

    Ok(RunOutcome {
        artifacts: ctx.artifacts,
        budget_exhausted: ctx.budget_exhausted,
    })
}

fn sampled_field(ctx: &Ctx) -> Result<(PotentialField, f64)> {
    let spec = ctx.config.model_spec().map_err(|e| anyhow!(e))?;
    let region = ctx.config.box_region().map_err(|e| anyhow!(e))?;
    let field = sample(&spec, &region, &ctx.field_seed())?;
    Ok((field, spec.kappa))
}

fn run_eigen(ctx: &mut Ctx) -> Result<()> {
    let section = ctx.config.eigen.clone().ok_or_else(|| anyhow!("missing [eigen]"))?;
    let bc = Config::bc(&section.bc).map_err(|e| anyhow!(e))?;

    let (h, kappa) = if let Some(n) = section.path_sites {
        // free-standing 1D path of exactly n sites
        let kappa = ctx.config.model_spec().map(|s| s.kappa).unwrap_or(0.5);
        let half = (n as i64).max(2);
        let region = BoxRegion::lattice(1, half)?;
        let field = PotentialField::zero(region);
        let sub = SiteBox::new(1, [0, 0, 0], [n as i64, 0, 0])?;
        (assemble_region(&field, &sub, bc, kappa)?, kappa)
    } else {
        let (field, kappa) = sampled_field(ctx)?;
        (assemble(&field, bc, kappa)?, kappa)
    };

    let _ = kappa;
    let values = eigen::lowest_eigenvalues(
        &h,
        section.k.min(h.dim()),
        eigen::DEFAULT_TOL,
        eigen::default_max_iter(h.dim()),
    )?;
    for (i, v) in values.iter().enumerate() {
        println!("lambda_{} = {v}", i + 1);
    }
    let mut body = String::from("k,lambda\n");
    for (i, v) in values.iter().enumerate() {
        body.push_str(&format!("{},{v}\n", i + 1));
    }
    ctx.write_csv(&body)?;
    if section.dump_operator {
        let mut coo = Vec::new();
        h.write_coo(&mut coo)?;
        ctx.write_text("coo", std::str::from_utf8(&coo)?)?;
    }
    Ok(())
}

fn run_ids(ctx: &mut Ctx) -> Result<()> {
    let section = ctx.config.ids.clone().ok_or_else(|| anyhow!("missing [ids]"))?;
    let bc = Config::bc(&section.bc).map_err(|e| anyhow!(e))?;
    let spec = ctx.config.model_spec().map_err(|e| anyhow!(e))?;
    let region = ctx.config.box_region().map_err(|e| anyhow!(e))?;
    let grid = log_lambda_grid(section.lambda_min, section.lambda_max, section.points_per_decade)?;
    let n = cap_realizations(ctx, section.n_realizations);
    let est = estimate_ids(&spec, bc, &region, &grid, n, &ctx.field_seed())?;

    let mut buf = Vec::new();
    est.write_csv(&mut buf)?;
    ctx.write_csv(std::str::from_utf8(&buf)?)?;
    let provenance = ctx.provenance();
    ctx.maybe_plot(&Chart {
        title: "integrated density of states",
        x_label: "lambda",
        y_label: "N(lambda)",
        log_x: true,
        log_y: true,
        provenance: &provenance,
        series: vec![Series {
            label: "mean",
            points: grid.iter().copied().zip(est.mean.iter().copied()).collect(),
            color: "#1f77b4",
        }],
    })?;
    Ok(())
}

fn exact_series_estimate(section: &crate::config::IdsExact1dSection) -> Result<IdsEstimate> {
    let grid = log_lambda_grid(section.lambda_min, section.lambda_max, section.points_per_decade)?;
    let values: Vec<f64> = grid
        .iter()
        .map(|&l| ids_1d_hard_exact(section.p, section.kappa, l, section.series_tol))
        .collect::<traplab::Result<_>>()?;
    Ok(IdsEstimate::from_exact(grid, values)?)
}

fn run_ids_exact(ctx: &mut Ctx) -> Result<()> {
    let section = ctx
        .config
        .ids_exact_1d
        .clone()
        .ok_or_else(|| anyhow!("missing [ids-exact-1d]"))?;
    let est = exact_series_estimate(&section)?;
    let mut buf = Vec::new();
    est.write_csv(&mut buf)?;
    ctx.write_csv(std::str::from_utf8(&buf)?)?;
    Ok(())
}

fn run_lifshitz_fit(ctx: &mut Ctx) -> Result<()> {
    let section = ctx
        .config
        .lifshitz_fit
        .clone()
        .ok_or_else(|| anyhow!("missing [lifshitz-fit]"))?;
    let est = match section.source.as_str() {
        "exact-1d" => {
            let s = ctx
                .config
                .ids_exact_1d
                .clone()
                .ok_or_else(|| anyhow!("source exact-1d needs [ids-exact-1d]"))?;
            exact_series_estimate(&s)?
        }
        "ids" => {
            let s = ctx.config.ids.clone().ok_or_else(|| anyhow!("source ids needs [ids]"))?;
            let bc = Config::bc(&s.bc).map_err(|e| anyhow!(e))?;
            let spec = ctx.config.model_spec().map_err(|e| anyhow!(e))?;
            let region = ctx.config.box_region().map_err(|e| anyhow!(e))?;
            let grid = log_lambda_grid(s.lambda_min, s.lambda_max, s.points_per_decade)?;
            let n = cap_realizations(ctx, s.n_realizations);
            estimate_ids(&spec, bc, &region, &grid, n, &ctx.field_seed())?
        }
        other => return Err(anyhow!("unknown fit source {other:?}")),
    };
    let fit = fit_lifshitz(&est, (section.window_lo, section.window_hi), section.log_correction)?;
    println!("L_hat = {} +- {}", fit.l_hat, fit.l_stderr);
    ctx.write_json_records(&[serde_json::to_value(&fit)?])?;
    Ok(())
}

fn run_inverse(ctx: &mut Ctx) -> Result<()> {
    let section = ctx.config.inverse.clone().ok_or_else(|| anyhow!("missing [inverse]"))?;
    let phi = RateFunction::new(section.amplitude, section.index, section.log_power)?;
    let mut body = String::from("y,psi\n");
    for &y in &section.y_values {
        let psi = asymptotic_inverse(&phi, y, section.tol)?;
        println!("psi({y}) = {psi}");
        body.push_str(&format!("{y},{psi}\n"));
    }
    ctx.write_csv(&body)?;
    Ok(())
}

fn run_survival(ctx: &mut Ctx) -> Result<()> {
    let section = ctx.config.survival.clone().ok_or_else(|| anyhow!("missing [survival]"))?;
    let walls = match section.walls.as_str() {
        "absorbing" => WallPolicy::Absorbing,
        "strict" => WallPolicy::Strict,
        other => return Err(anyhow!("unknown wall policy {other:?}")),
    };
    let spec = ctx.config.model_spec().map_err(|e| anyhow!(e))?;
    let region = ctx.config.box_region().map_err(|e| anyhow!(e))?;
    let x = start_coord(&section.x, region.d)?;
    let field = sample(&spec, &region, &ctx.field_seed())?;
    let n_paths = ctx
        .config
        .budget
        .as_ref()
        .and_then(|b| b.max_paths)
        .map_or(section.n_paths, |cap| cap.min(section.n_paths));
    if n_paths < section.n_paths {
        ctx.budget_exhausted = true;
    }

    let mut curve = SurvivalCurve::synthetic(section.t_grid.clone(), vec![1.0; section.t_grid.len()])?;
    curve.model = Some(spec);
    curve.seed = Some(ctx.field_seed());
    curve.start = x;
    curve.d = region.d;
    for (i, &t) in section.t_grid.iter().enumerate() {
        let (mc, err) = mc_survival(&field, spec.kappa, t, x, n_paths, &ctx.field_seed(), walls)?;
        curve.mc_estimate[i] = mc;
        curve.mc_stderr[i] = err;
        curve.certified_lower[i] =
            exact_survival_dirichlet(&field, spec.kappa, &region.site_box(), t, x)?;
        curve.spectral_upper[i] =
            spectral_upper_bound(&field, spec.kappa, &region.site_box(), t, x)?;
    }
    write_curve(ctx, &curve)
}

fn run_quenched(ctx: &mut Ctx) -> Result<()> {
    let section = ctx.config.quenched.clone().ok_or_else(|| anyhow!("missing [quenched]"))?;
    let spec = ctx.config.model_spec().map_err(|e| anyhow!(e))?;
    let d = ctx.config.geometry.as_ref().map_or(1, |g| g.d);
    let x = start_coord(&section.x, d)?;
    let budget = budget_from(ctx, section.n_paths);
    let curve = quenched_curve(&spec, d, &ctx.field_seed(), x, &section.t_grid, &budget)?;
    if curve.status.contains(&PointStatus::Budget) {
        ctx.budget_exhausted = true;
    }
    write_curve(ctx, &curve)
}

fn run_scaling(ctx: &mut Ctx) -> Result<()> {
    let section = ctx.config.scaling.clone().ok_or_else(|| anyhow!("missing [scaling]"))?;
    let spec = ctx.config.model_spec().map_err(|e| anyhow!(e))?;
    let d = ctx.config.geometry.as_ref().map_or(1, |g| g.d);
    let x = start_coord(&section.x, d)?;
    let budget = budget_from(ctx, section.n_paths);
    let curve = quenched_curve(&spec, d, &ctx.field_seed(), x, &section.t_grid, &budget)?;
    if curve.status.contains(&PointStatus::Budget) {
        ctx.budget_exhausted = true;
    }
    let check = scaling_check(&curve, section.index)?;
    println!(
        "slope = {} +- {} (predicted {})",
        check.slope, check.stderr, check.predicted_slope
    );
    write_curve(ctx, &curve)?;
    ctx.write_json_records(&[serde_json::to_value(&check)?])?;
    Ok(())
}

fn write_curve(ctx: &mut Ctx, curve: &SurvivalCurve) -> Result<()> {
    let mut buf = Vec::new();
    curve.write_csv(&mut buf)?;
    ctx.write_csv(std::str::from_utf8(&buf)?)?;
    let provenance = ctx.provenance();
    let pts = |ys: &[f64]| -> Vec<(f64, f64)> {
        curve
            .t_grid
            .iter()
            .copied()
            .zip(ys.iter().copied())
            .filter(|(_, y)| y.is_finite())
            .collect()
    };
    ctx.maybe_plot(&Chart {
        title: "survival probability",
        x_label: "t",
        y_label: "u(t)",
        log_x: false,
        log_y: true,
        provenance: &provenance,
        series: vec![
            Series { label: "mc", points: pts(&curve.mc_estimate), color: "#1f77b4" },
            Series { label: "lower", points: pts(&curve.certified_lower), color: "#2ca02c" },
            Series { label: "upper", points: pts(&curve.spectral_upper), color: "#d62728" },
        ],
    })?;
    Ok(())
}

fn run_bracketing(ctx: &mut Ctx) -> Result<()> {
    let section = ctx.config.bracketing.clone().ok_or_else(|| anyhow!("missing [bracketing]"))?;
    let spec = ctx.config.model_spec().map_err(|e| anyhow!(e))?;
    let region = ctx.config.box_region().map_err(|e| anyhow!(e))?;
    let n = cap_realizations(ctx, section.n_realizations);
    let mut body =
        String::from("lambda,lower,lower_stderr,upper,upper_stderr,c4,p_dirichlet,p_neumann,n\n");
    for &lambda in &section.lambdas {
        let b = bracketing_bounds(&spec, &region, lambda, n, &ctx.field_seed())?;
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            b.lambda,
            b.lower,
            b.lower_stderr,
            b.upper.map_or(String::from("unavailable"), |v| v.to_string()),
            b.upper_stderr.map_or(String::from("unavailable"), |v| v.to_string()),
            b.c4.map_or(String::from("unavailable"), |v| v.to_string()),
            b.p_dirichlet,
            b.p_neumann,
            b.n_realizations
        ));
    }
    ctx.write_csv(&body)?;
    Ok(())
}

fn run_assumptions(ctx: &mut Ctx) -> Result<()> {
    let section = ctx
        .config
        .assumptions
        .clone()
        .ok_or_else(|| anyhow!("missing [assumptions]"))?;
    let spec = ctx.config.model_spec().map_err(|e| anyhow!(e))?;
    let d = ctx.config.geometry.as_ref().map_or(1, |g| g.d);
    let seed = ctx.field_seed();
    match section.check.as_str() {
        "moment" => {
            let alpha = section.alpha.ok_or_else(|| anyhow!("moment check needs alpha"))?;
            let n = section.n_realizations.unwrap_or(2000);
            let mesh = ctx.config.geometry.as_ref().map_or(1.0, |g| g.h);
            let m = assumptions::moment_estimate_with_mesh(&spec, d, mesh, alpha, n, &seed)?;
            println!(
                "moment estimate = {} (log {}), tail_flag = {}",
                m.estimate, m.log_estimate, m.tail_flag
            );
            ctx.write_json_records(&[serde_json::to_value(&m)?])?;
        }
        "correlation" => {
            let boxes = section
                .layout_boxes
                .as_ref()
                .ok_or_else(|| anyhow!("correlation check needs layout_boxes"))?;
            let r = section.layout_r.ok_or_else(|| anyhow!("correlation check needs layout_r"))?;
            let lambda = section.lambda.ok_or_else(|| anyhow!("correlation check needs lambda"))?;
            let layout = build_layout(boxes, r).map_err(|e| anyhow!(e))?;
            let beta = section.beta.unwrap_or_else(|| assumptions::default_beta(&spec));
            let r0 = section.r0.unwrap_or_else(|| assumptions::default_r0(&spec.profile));
            let n = section.n_realizations.unwrap_or(1000);
            let report = assumptions::correlation_gap(&spec, &layout, lambda, beta, r0, n, &seed)?;
            println!(
                "gap = {} (ci {:?}), reference exp(-r^beta) = {}",
                report.gap, report.ci, report.reference
            );
            ctx.write_json_records(&[serde_json::to_value(&report)?])?;
        }
        "displacement" => {
            let theta = match spec.variant {
                traplab::random_media::ModelVariant::PerturbedLattice { theta } => theta,
                _ => return Err(anyhow!("displacement check needs a perturbed-lattice model")),
            };
            let r = section.r.ok_or_else(|| anyhow!("displacement check needs r"))?;
            let a1 = match &section.layout_boxes {
                Some(boxes) if !boxes.is_empty() => {
                    build_layout(&boxes[..1], r).map_err(|e| anyhow!(e))?.boxes[0]
                }
                _ => SiteBox::new(1, [-2, 0, 0], [3, 0, 0])?,
            };
            let n = section.n_draws.unwrap_or(1000);
            let rates = assumptions::displacement_event_rates(theta, &a1, r, n, &seed)?;
            println!(
                "E1 violation rate = {}, E2 violation rate = {}, envelope = {}",
                rates.e1_violation, rates.e2_violation, rates.envelope
            );
            ctx.write_json_records(&[serde_json::to_value(&rates)?])?;
        }
        "sup-potential" => {
            let alpha = section.alpha.ok_or_else(|| anyhow!("sup-potential check needs alpha"))?;
            let t_grid = section
                .t_grid
                .as_ref()
                .ok_or_else(|| anyhow!("sup-potential check needs t_grid"))?;
            let n = section.n_realizations.unwrap_or(200);
            let scan = traplab::survival::sup_potential_scan(&spec, d, t_grid, alpha, n, &seed)?;
            let mut body = String::from("t,bound,violation_frequency,n\n");
            for i in 0..scan.t_grid.len() {
                body.push_str(&format!(
                    "{},{},{},{}\n",
                    scan.t_grid[i], scan.bound[i], scan.violation_frequency[i], scan.n_realizations
                ));
            }
            ctx.write_csv(&body)?;
        }
        other => return Err(anyhow!("unknown assumptions check {other:?}")),
    }
    Ok(())
}

fn cap_realizations(ctx: &mut Ctx, requested: usize) -> usize {
    match ctx.config.budget.as_ref().and_then(|b| b.max_realizations) {
        Some(cap) if cap < requested => {
            ctx.budget_exhausted = true;
            cap
        }
        _ => requested,
    }
}

fn budget_from(ctx: &Ctx, n_paths: usize) -> Budget {
    let b = ctx.config.budget.clone().unwrap_or_default();
    Budget {
        paths_per_t: b.max_paths.map_or(n_paths, |cap| cap.min(n_paths)),
        wall_seconds: b.wall_seconds,
    }
}
