//! Experiment configuration: a TOML file with one section per concern.
//! Unknown keys are rejected with an error naming the key; `validate`
//! collects every range and consistency violation without running anything.

use serde::{Deserialize, Serialize};
use traplab::geometry::BoxRegion;
use traplab::hamiltonian::BoundaryCondition;
use traplab::random_media::{ModelSpec, ModelVariant, ProfileShape, TrapProfile};

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: Option<ExperimentSection>,
    pub model: Option<ModelSection>,
    pub geometry: Option<GeometrySection>,
    pub budget: Option<BudgetSection>,
    pub eigen: Option<EigenSection>,
    pub ids: Option<IdsSection>,
    #[serde(rename = "ids-exact-1d")]
    pub ids_exact_1d: Option<IdsExact1dSection>,
    #[serde(rename = "lifshitz-fit")]
    pub lifshitz_fit: Option<LifshitzFitSection>,
    pub inverse: Option<InverseSection>,
    pub survival: Option<SurvivalSection>,
    pub quenched: Option<QuenchedSection>,
    pub scaling: Option<ScalingSection>,
    pub bracketing: Option<BracketingSection>,
    pub assumptions: Option<AssumptionsSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub master_seed: u64,
    pub output_dir: String,
    #[serde(default)]
    pub plots: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// bernoulli | iid-tail | poisson | perturbed-lattice
    pub variant: String,
    pub kappa: f64,
    pub p: Option<f64>,
    pub gamma: Option<f64>,
    pub nu: Option<f64>,
    pub theta: Option<f64>,
    pub profile: Option<ProfileSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    /// spike | ball
    pub shape: String,
    #[serde(default)]
    pub radius: f64,
    /// trap height; `inf` for hard traps
    pub height: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub d: usize,
    pub r: i64,
    #[serde(default = "one")]
    pub h: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub wall_seconds: Option<f64>,
    pub max_paths: Option<usize>,
    pub max_realizations: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenSection {
    /// dirichlet | neumann
    pub bc: String,
    #[serde(default = "default_k")]
    pub k: usize,
    /// when set, use a 1D free-standing path of exactly this many sites
    pub path_sites: Option<usize>,
    /// also dump the assembled operator in coordinate text format
    #[serde(default)]
    pub dump_operator: bool,
}

fn default_k() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdsSection {
    pub bc: String,
    pub lambda_min: f64,
    pub lambda_max: f64,
    #[serde(default = "default_ppd")]
    pub points_per_decade: usize,
    pub n_realizations: usize,
}

fn default_ppd() -> usize {
    16
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdsExact1dSection {
    pub p: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    #[serde(default = "default_ppd")]
    pub points_per_decade: usize,
    #[serde(default = "default_series_tol")]
    pub series_tol: f64,
}

fn default_kappa() -> f64 {
    0.5
}

fn default_series_tol() -> f64 {
    1e-14
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifshitzFitSection {
    /// exact-1d | ids
    pub source: String,
    pub window_lo: f64,
    pub window_hi: f64,
    #[serde(default)]
    pub log_correction: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseSection {
    pub amplitude: f64,
    pub index: f64,
    #[serde(default)]
    pub log_power: f64,
    pub y_values: Vec<f64>,
    #[serde(default = "default_inverse_tol")]
    pub tol: f64,
}

fn default_inverse_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurvivalSection {
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub x: Vec<i64>,
    pub n_paths: usize,
    /// absorbing | strict
    #[serde(default = "default_walls")]
    pub walls: String,
}

fn default_walls() -> String {
    "absorbing".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchedSection {
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub x: Vec<i64>,
    #[serde(default = "default_paths")]
    pub n_paths: usize,
}

fn default_paths() -> usize {
    10_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub x: Vec<i64>,
    #[serde(default = "default_paths")]
    pub n_paths: usize,
    /// the Lifshitz index whose reciprocal is the predicted slope
    pub index: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketingSection {
    pub lambdas: Vec<f64>,
    pub n_realizations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssumptionsSection {
    /// moment | correlation | displacement | sup-potential
    pub check: String,
    pub alpha: Option<f64>,
    pub n_realizations: Option<usize>,
    /// correlation: list of [lo, hi) intervals per axis flattened as
    /// lo1, hi1, lo2, hi2, ... per box (1D layouts)
    pub layout_boxes: Option<Vec<Vec<i64>>>,
    pub layout_r: Option<f64>,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
    pub r0: Option<f64>,
    /// displacement: separation and draw count
    pub r: Option<f64>,
    pub n_draws: Option<usize>,
    /// sup-potential horizons
    pub t_grid: Option<Vec<f64>>,
}

/// Operations the driver can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operation {
    Eigen,
    Ids,
    IdsExact1d,
    LifshitzFit,
    Inverse,
    Survival,
    Quenched,
    Scaling,
    Bracketing,
    Assumptions,
}

impl Operation {
    pub fn name(&self) -> &'static str {
        match self {
            Operation::Eigen => "eigen",
            Operation::Ids => "ids",
            Operation::IdsExact1d => "ids-exact-1d",
            Operation::LifshitzFit => "lifshitz-fit",
            Operation::Inverse => "inverse",
            Operation::Survival => "survival",
            Operation::Quenched => "quenched",
            Operation::Scaling => "scaling",
            Operation::Bracketing => "bracketing",
            Operation::Assumptions => "assumptions",
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Canonical serialization used for hashing and the config echo.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// FNV-1a over the canonical text, as 16 hex digits.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.canonical().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// Every diagnostic found, without running anything. An empty list
    /// means the config can drive the given operation (or any configured
    /// operation when `op` is `None`).
    pub fn diagnostics(&self, op: Option<Operation>) -> Vec<String> {
        let mut out = Vec::new();

        if self.experiment.is_none() {
            out.push(
                "missing [experiment] section (required keys: master_seed, output_dir)".into(),
            );
        }

        let needs_model = matches!(
            op,
            None | Some(
                Operation::Eigen
                    | Operation::Ids
                    | Operation::Survival
                    | Operation::Quenched
                    | Operation::Scaling
                    | Operation::Bracketing
                    | Operation::Assumptions
            )
        );
        if let Some(model) = &self.model {
            self.check_model(model, &mut out);
        } else if needs_model && op.is_some() {
            out.push("missing [model] section (required keys: variant, kappa)".into());
        }

        let needs_geometry = matches!(
            op,
            Some(Operation::Eigen | Operation::Ids | Operation::Survival | Operation::Bracketing)
        );
        if let Some(g) = &self.geometry {
            if g.d == 0 || g.d > 3 {
                out.push(format!("geometry.d = {} outside the supported range 1..=3", g.d));
            }
            if g.r <= 0 {
                out.push(format!("geometry.r = {} must be positive", g.r));
            }
            if !(g.h > 0.0) {
                out.push(format!("geometry.h = {} must be positive", g.h));
            }
        } else if needs_geometry {
            out.push("missing [geometry] section (required keys: d, r)".into());
        }

        if let Some(b) = &self.budget {
            if let Some(w) = b.wall_seconds {
                if !(w > 0.0) {
                    out.push(format!("budget.wall_seconds = {w} must be positive"));
                }
            }
        }

        match op {
            Some(Operation::Eigen) => {
                match &self.eigen {
                    Some(s) => {
                        self.check_bc(&s.bc, "eigen.bc", &mut out);
                        if s.k == 0 {
                            out.push("eigen.k must be at least 1".into());
                        }
                    }
                    None => out.push("missing [eigen] section (required keys: bc)".into()),
                }
            }
            Some(Operation::Ids) => match &self.ids {
                Some(s) => {
                    self.check_bc(&s.bc, "ids.bc", &mut out);
                    if !(s.lambda_min > 0.0 && s.lambda_max > s.lambda_min) {
                        out.push("ids grid needs 0 < lambda_min < lambda_max".into());
                    }
                    if s.n_realizations == 0 {
                        out.push("ids.n_realizations must be at least 1".into());
                    }
                }
                None => out.push(
                    "missing [ids] section (required keys: bc, lambda_min, lambda_max, n_realizations)"
                        .into(),
                ),
            },
            Some(Operation::IdsExact1d) => match &self.ids_exact_1d {
                Some(s) => {
                    if !(s.p > 0.0 && s.p < 1.0) {
                        out.push(format!(
                            "ids-exact-1d.p = {} outside the open interval (0, 1)",
                            s.p
                        ));
                    }
                    if !(s.lambda_min > 0.0 && s.lambda_max > s.lambda_min) {
                        out.push("ids-exact-1d grid needs 0 < lambda_min < lambda_max".into());
                    }
                }
                None => out.push(
                    "missing [ids-exact-1d] section (required keys: p, lambda_min, lambda_max)"
                        .into(),
                ),
            },
            Some(Operation::LifshitzFit) => match &self.lifshitz_fit {
                Some(s) => {
                    if s.source != "exact-1d" && s.source != "ids" {
                        out.push(format!(
                            "lifshitz-fit.source = {:?} must be \"exact-1d\" or \"ids\"",
                            s.source
                        ));
                    }
                    if s.source == "exact-1d" && self.ids_exact_1d.is_none() {
                        out.push("lifshitz-fit with source exact-1d needs [ids-exact-1d]".into());
                    }
                    if s.source == "ids" && self.ids.is_none() {
                        out.push("lifshitz-fit with source ids needs [ids]".into());
                    }
                    if !(s.window_lo > 0.0 && s.window_hi > s.window_lo) {
                        out.push("lifshitz-fit window needs 0 < window_lo < window_hi".into());
                    }
                }
                None => out.push(
                    "missing [lifshitz-fit] section (required keys: source, window_lo, window_hi)"
                        .into(),
                ),
            },
            Some(Operation::Inverse) => match &self.inverse {
                Some(s) => {
                    if !(s.amplitude > 0.0) {
                        out.push(format!("inverse.amplitude = {} must be positive", s.amplitude));
                    }
                    if !(s.index > 0.0) {
                        out.push(format!("inverse.index = {} must be positive", s.index));
                    }
                    if s.y_values.is_empty() {
                        out.push("inverse.y_values must be nonempty".into());
                    }
                }
                None => out.push(
                    "missing [inverse] section (required keys: amplitude, index, y_values)".into(),
                ),
            },
            Some(Operation::Survival) => match &self.survival {
                Some(s) => {
                    self.check_t_grid(&s.t_grid, "survival.t_grid", &mut out);
                    if s.n_paths == 0 {
                        out.push("survival.n_paths must be at least 1".into());
                    }
                    if s.walls != "absorbing" && s.walls != "strict" {
                        out.push(format!(
                            "survival.walls = {:?} must be \"absorbing\" or \"strict\"",
                            s.walls
                        ));
                    }
                }
                None => out.push(
                    "missing [survival] section (required keys: t_grid, n_paths)".into(),
                ),
            },
            Some(Operation::Quenched) => match &self.quenched {
                Some(s) => self.check_t_grid(&s.t_grid, "quenched.t_grid", &mut out),
                None => out.push("missing [quenched] section (required keys: t_grid)".into()),
            },
            Some(Operation::Scaling) => match &self.scaling {
                Some(s) => {
                    self.check_t_grid(&s.t_grid, "scaling.t_grid", &mut out);
                    if !(s.index > 0.0) {
                        out.push(format!("scaling.index = {} must be positive", s.index));
                    }
                }
                None => out.push(
                    "missing [scaling] section (required keys: t_grid, index)".into(),
                ),
            },
            Some(Operation::Bracketing) => match &self.bracketing {
                Some(s) => {
                    if s.lambdas.is_empty() {
                        out.push("bracketing.lambdas must be nonempty".into());
                    }
                    if s.n_realizations < 30 {
                        out.push(format!(
                            "bracketing.n_realizations = {} must be at least 30",
                            s.n_realizations
                        ));
                    }
                }
                None => out.push(
                    "missing [bracketing] section (required keys: lambdas, n_realizations)".into(),
                ),
            },
            Some(Operation::Assumptions) => match &self.assumptions {
                Some(s) => self.check_assumptions(s, &mut out),
                None => out.push("missing [assumptions] section (required keys: check)".into()),
            },
            None => {}
        }
        out
    }

    fn check_bc(&self, bc: &str, key: &str, out: &mut Vec<String>) {
        if bc != "dirichlet" && bc != "neumann" {
            out.push(format!("{key} = {bc:?} must be \"dirichlet\" or \"neumann\""));
        }
    }

    fn check_t_grid(&self, grid: &[f64], key: &str, out: &mut Vec<String>) {
        if grid.is_empty() {
            out.push(format!("{key} must be nonempty"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.first().is_some_and(|&t| !(t > 0.0)) {
            out.push(format!("{key} must be positive and strictly increasing"));
        }
    }

    fn check_model(&self, model: &ModelSection, out: &mut Vec<String>) {
        if !(model.kappa > 0.0) {
            out.push(format!("model.kappa = {} must be positive", model.kappa));
        }
        match model.variant.as_str() {
            "bernoulli" => match model.p {
                Some(p) if !(0.0..=1.0).contains(&p) => {
                    out.push(format!("model.p = {p} outside the legal range [0, 1]"))
                }
                None => out.push("bernoulli model needs model.p".into()),
                _ => {}
            },
            "iid-tail" => match model.gamma {
                Some(g) if !(g > 0.0) => {
                    out.push(format!("model.gamma = {g} must be positive"))
                }
                None => out.push("iid-tail model needs model.gamma".into()),
                _ => {}
            },
            "poisson" => match model.nu {
                Some(nu) if !(nu >= 0.0) => {
                    out.push(format!("model.nu = {nu} must be nonnegative"))
                }
                None => out.push("poisson model needs model.nu".into()),
                _ => {}
            },
            "perturbed-lattice" => match model.theta {
                Some(t) if !(t > 0.0) => {
                    out.push(format!("model.theta = {t} must be positive"))
                }
                None => out.push("perturbed-lattice model needs model.theta".into()),
                _ => {}
            },
            other => out.push(format!(
                "model.variant = {other:?} must be one of bernoulli, iid-tail, poisson, perturbed-lattice"
            )),
        }
        if model.variant != "iid-tail" {
            match &model.profile {
                Some(p) => {
                    if p.shape != "spike" && p.shape != "ball" {
                        out.push(format!(
                            "model.profile.shape = {:?} must be \"spike\" or \"ball\"",
                            p.shape
                        ));
                    }
                    if !(p.radius >= 0.0) {
                        out.push(format!(
                            "model.profile.radius = {} must be nonnegative",
                            p.radius
                        ));
                    }
                    if !(p.height >= 0.0) {
                        out.push(format!(
                            "model.profile.height = {} must be nonnegative (inf allowed)",
                            p.height
                        ));
                    }
                }
                None => out.push(format!(
                    "model variant {:?} needs a [model.profile] section",
                    model.variant
                )),
            }
        }
    }

    fn check_assumptions(&self, s: &AssumptionsSection, out: &mut Vec<String>) {
        match s.check.as_str() {
            "moment" => {
                if s.alpha.is_none() {
                    out.push("moment check needs assumptions.alpha".into());
                }
            }
            "correlation" => {
                if s.layout_boxes.is_none() || s.layout_r.is_none() || s.lambda.is_none() {
                    out.push(
                        "correlation check needs assumptions.layout_boxes, layout_r, lambda"
                            .into(),
                    );
                }
                if let (Some(boxes), Some(r)) = (&s.layout_boxes, s.layout_r) {
                    match build_layout(boxes, r) {
                        Ok(layout) => {
                            if let Err(e) = layout.validate(s.r0.unwrap_or(0.0)) {
                                out.push(format!("assumptions layout: {e}"));
                            }
                        }
                        Err(e) => out.push(format!("assumptions.layout_boxes: {e}")),
                    }
                }
            }
            "displacement" => {
                if s.r.is_none() {
                    out.push("displacement check needs assumptions.r".into());
                }
            }
            "sup-potential" => {
                if s.alpha.is_none() || s.t_grid.is_none() {
                    out.push("sup-potential check needs assumptions.alpha and t_grid".into());
                }
            }
            other => out.push(format!(
                "assumptions.check = {other:?} must be one of moment, correlation, displacement, sup-potential"
            )),
        }
    }

    pub fn model_spec(&self) -> Result<ModelSpec, String> {
        let model = self.model.as_ref().ok_or("missing [model] section")?;
        let profile = match &model.profile {
            Some(p) => {
                let shape = match p.shape.as_str() {
                    "spike" => ProfileShape::Spike,
                    "ball" => ProfileShape::Ball,
                    other => return Err(format!("unknown profile shape {other:?}")),
                };
                TrapProfile::new(shape, p.radius, p.height).map_err(|e| e.to_string())?
            }
            None => TrapProfile::spike(1.0).map_err(|e| e.to_string())?,
        };
        let variant = match model.variant.as_str() {
            "bernoulli" => ModelVariant::Bernoulli {
                p: model.p.ok_or("bernoulli model needs model.p")?,
            },
            "iid-tail" => ModelVariant::IidTail {
                gamma: model.gamma.ok_or("iid-tail model needs model.gamma")?,
            },
            "poisson" => ModelVariant::Poisson {
                nu: model.nu.ok_or("poisson model needs model.nu")?,
            },
            "perturbed-lattice" => ModelVariant::PerturbedLattice {
                theta: model.theta.ok_or("perturbed-lattice model needs model.theta")?,
            },
            other => return Err(format!("unknown model variant {other:?}")),
        };
        ModelSpec::new(variant, profile, model.kappa).map_err(|e| e.to_string())
    }

    pub fn box_region(&self) -> Result<BoxRegion, String> {
        let g = self.geometry.as_ref().ok_or("missing [geometry] section")?;
        BoxRegion::new(g.d, g.r, g.h).map_err(|e| e.to_string())
    }

    pub fn bc(name: &str) -> Result<BoundaryCondition, String> {
        match name {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            other => Err(format!("unknown boundary condition {other:?}")),
        }
    }
}

/// 1D layout boxes given as `[lo, hi]` integer pairs.
pub fn build_layout(
    boxes: &[Vec<i64>],
    r: f64,
) -> Result<traplab::assumptions::BoxLayout, String> {
    let mut out = Vec::new();
    for (i, b) in boxes.iter().enumerate() {
        if b.len() != 2 {
            return Err(format!("box {i} must be a [lo, hi] pair"));
        }
        out.push(
            traplab::geometry::SiteBox::new(1, [b[0], 0, 0], [b[1], 0, 0])
                .map_err(|e| format!("box {i}: {e}"))?,
        );
    }
    Ok(traplab::assumptions::BoxLayout { boxes: out, r })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
[experiment]
master_seed = 42
output_dir = "out"

[model]
variant = "bernoulli"
kappa = 0.5
p = 0.5
[model.profile]
shape = "spike"
height = 1.0

[geometry]
d = 1
r = 16

[ids]
bc = "dirichlet"
lambda_min = 0.05
lambda_max = 2.0
n_realizations = 10
"#;

    #[test]
    fn good_config_round_trips_and_validates() {
        let cfg = Config::parse(GOOD).unwrap();
        assert!(cfg.diagnostics(Some(Operation::Ids)).is_empty());
        let echo = cfg.canonical();
        let back = Config::parse(&echo).unwrap();
        assert_eq!(cfg.hash(), back.hash());
        assert_eq!(echo, back.canonical());
    }

    #[test]
    fn unknown_keys_are_named() {
        let bad = format!("{GOOD}\n[extra]\nfoo = 1\n");
        let err = Config::parse(&bad).unwrap_err();
        assert!(err.contains("extra"), "error should name the key: {err}");
        let bad2 = GOOD.replace("p = 0.5", "p = 0.5\nwhatever = 3");
        let err2 = Config::parse(&bad2).unwrap_err();
        assert!(err2.contains("whatever"), "error should name the key: {err2}");
    }

    #[test]
    fn out_of_range_values_are_diagnosed_with_ranges() {
        let bad = GOOD.replace("p = 0.5", "p = 1.5");
        let cfg = Config::parse(&bad).unwrap();
        let diags = cfg.diagnostics(Some(Operation::Ids));
        assert!(
            diags.iter().any(|d| d.contains("model.p") && d.contains("[0, 1]")),
            "diagnostics: {diags:?}"
        );
    }

    #[test]
    fn empty_config_lists_required_sections() {
        let cfg = Config::parse("").unwrap();
        let diags = cfg.diagnostics(Some(Operation::Quenched));
        assert!(diags.iter().any(|d| d.contains("[experiment]")));
        assert!(diags.iter().any(|d| d.contains("[model]")));
        assert!(diags.iter().any(|d| d.contains("[quenched]")));
    }

    #[test]
    fn touching_layout_boxes_are_rejected() {
        let cfg = Config::parse(
            r#"
[experiment]
master_seed = 1
output_dir = "out"

[model]
variant = "iid-tail"
kappa = 0.5
gamma = 1.0

[assumptions]
check = "correlation"
layout_boxes = [[0, 4], [5, 9]]
layout_r = 6.0
lambda = 0.3
"#,
        )
        .unwrap();
        let diags = cfg.diagnostics(Some(Operation::Assumptions));
        assert!(
            diags.iter().any(|d| d.contains("apart")),
            "diagnostics should cite the distance rule: {diags:?}"
        );
    }

    #[test]
    fn hash_changes_with_content() {
        let a = Config::parse(GOOD).unwrap();
        let b = Config::parse(&GOOD.replace("master_seed = 42", "master_seed = 43")).unwrap();
        assert_ne!(a.hash(), b.hash());
    }
}
