//! TOML job configuration. See `docs/config.md` for the grammar.

use serde::{Deserialize, Serialize};

use crate::fixtures;
use crate::form::ZeroOneForm;
use crate::quadrature::QuadratureParams;
use crate::solver::MEMBERSHIP_TOL;
use crate::variety::{SparsePolynomial, Variety, Weights};
use crate::verify::ScalingIntegrand;
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub variety: VarietySpec,
    #[serde(default)]
    pub form: FormSpec,
    #[serde(default)]
    pub quadrature: QuadratureParams,
    pub job: JobSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomials: Option<Vec<PolynomialSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pure_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSpec {
    pub terms: Vec<TermSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub exponents: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FormSpec {
    #[default]
    Zero,
    BumpDbar {
        h: Vec<TermSpec>,
        r0: f64,
        radius: f64,
    },
    RawBump {
        c: Vec<C64>,
        radius: f64,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    #[default]
    Direct,
    L2,
}

fn default_anchors() -> usize {
    5
}
fn default_samples_per_anchor() -> usize {
    20
}
fn default_fd_step() -> f64 {
    1e-4
}
fn default_theta() -> f64 {
    0.5
}
fn default_pairs() -> usize {
    30
}
fn default_scales() -> Vec<f64> {
    vec![1.0, 0.1, 0.01]
}
fn default_path_steps() -> usize {
    16
}
fn default_l2_samples() -> usize {
    4000
}
fn default_scaling_samples() -> usize {
    100_000
}
fn default_scaling_integrand() -> ScalingIntegrand {
    ScalingIntegrand::Moment
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum JobSpec {
    Solve {
        points: Vec<Vec<C64>>,
        #[serde(default)]
        method: SolveMethod,
    },
    SolveScaled {
        points: Vec<Vec<C64>>,
        scales: Vec<C64>,
    },
    Residual {
        #[serde(default = "default_anchors")]
        anchors: usize,
        #[serde(default = "default_samples_per_anchor")]
        samples_per_anchor: usize,
        #[serde(default = "default_fd_step")]
        fd_step: f64,
        #[serde(default)]
        method: SolveMethod,
    },
    Holder {
        #[serde(default = "default_theta")]
        theta: f64,
        radius: f64,
        #[serde(default = "default_pairs")]
        pairs: usize,
        #[serde(default = "default_scales")]
        scales: Vec<f64>,
        #[serde(default = "default_path_steps")]
        path_steps: usize,
        #[serde(default = "default_anchors")]
        anchors: usize,
    },
    L2 {
        radius: f64,
        #[serde(default = "default_l2_samples")]
        samples: usize,
    },
    Scaling {
        radii: Vec<f64>,
        #[serde(default = "default_scaling_samples")]
        samples: usize,
        #[serde(default = "default_scaling_integrand")]
        integrand: ScalingIntegrand,
    },
    ThetaCrosscheck {
        /// Points of the Θ-cone.
        #[serde(default)]
        points: Vec<Vec<C64>>,
        /// Additional random cone points.
        #[serde(default)]
        count: usize,
    },
}

impl JobSpec {
    pub fn name(&self) -> &'static str {
        match self {
            JobSpec::Solve { .. } => "solve",
            JobSpec::SolveScaled { .. } => "solve-scaled",
            JobSpec::Residual { .. } => "residual",
            JobSpec::Holder { .. } => "holder",
            JobSpec::L2 { .. } => "l2",
            JobSpec::Scaling { .. } => "scaling",
            JobSpec::ThetaCrosscheck { .. } => "theta-crosscheck",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Validation {
        field: field.into(),
        message: message.to_string(),
    }
}

/// A parsed config together with the objects it describes.
#[derive(Clone, Debug)]
pub struct ValidatedConfig {
    pub config: RunConfig,
    pub variety: Variety,
    pub form: ZeroOneForm,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string().trim_end().to_string()))
}

pub fn parse_and_validate(text: &str) -> Result<ValidatedConfig, ConfigError> {
    parse_config(text)?.validate()
}

fn terms_to_poly(n: usize, terms: &[TermSpec], field: &str) -> Result<SparsePolynomial, ConfigError> {
    for (i, t) in terms.iter().enumerate() {
        if t.exponents.len() != n {
            return Err(invalid(
                format!("{field}.terms[{i}].exponents"),
                format!("expected {n} exponents, got {}", t.exponents.len()),
            ));
        }
    }
    SparsePolynomial::new(n, terms.iter().map(|t| (t.exponents.clone(), C64::new(t.re, t.im))))
        .map_err(|e| invalid(field, e))
}

impl VarietySpec {
    pub fn build(&self) -> Result<Variety, ConfigError> {
        let variety = if let Some(name) = &self.fixture {
            if self.weights.is_some() || self.polynomials.is_some() {
                return Err(invalid("variety", "give either `fixture` or `weights` + `polynomials`, not both"));
            }
            let mut v = fixtures::by_name(name).ok_or_else(|| {
                let names: Vec<&str> = fixtures::FIXTURES.iter().map(|f| f.name).collect();
                invalid("variety.fixture", format!("unknown fixture `{name}` (known: {})", names.join(", ")))
            })?;
            if let Some(d) = self.pure_dim {
                if Some(d) != v.pure_dim() {
                    return Err(invalid("variety.pure_dim", format!("fixture `{name}` has pure_dim {:?}", v.pure_dim())));
                }
            }
            if let Some(t) = self.rank_tol {
                v = v.with_rank_tol(t);
            }
            v
        } else {
            let weights = self
                .weights
                .clone()
                .ok_or_else(|| invalid("variety.weights", "missing (or set `fixture`)"))?;
            let weights = Weights::new(weights).map_err(|e| invalid("variety.weights", e))?;
            let n = weights.len();
            let polys = self
                .polynomials
                .as_ref()
                .ok_or_else(|| invalid("variety.polynomials", "missing"))?
                .iter()
                .enumerate()
                .map(|(i, p)| terms_to_poly(n, &p.terms, &format!("variety.polynomials[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            for (i, p) in polys.iter().enumerate() {
                crate::variety::weighted_degree(p, &weights)
                    .map_err(|e| invalid(format!("variety.polynomials[{i}]"), e))?;
            }
            let mut v = Variety::new(weights, polys, self.pure_dim).map_err(|e| invalid("variety", e))?;
            if let Some(t) = self.rank_tol {
                v = v.with_rank_tol(t);
            }
            v
        };
        if let Some(t) = self.rank_tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(invalid("variety.rank_tol", "must lie in (0, 1)"));
            }
        }
        Ok(variety)
    }
}

impl FormSpec {
    pub fn build(&self, n: usize) -> Result<ZeroOneForm, ConfigError> {
        match self {
            FormSpec::Zero => Ok(ZeroOneForm::zero(n)),
            FormSpec::BumpDbar { h, r0, radius } => {
                let poly = terms_to_poly(n, h, "form.h")?;
                ZeroOneForm::bump_dbar(poly, *r0, *radius).map_err(|e| invalid("form", e))
            }
            FormSpec::RawBump { c, radius } => {
                if c.len() != n {
                    return Err(invalid("form.c", format!("expected {n} coefficients, got {}", c.len())));
                }
                ZeroOneForm::raw_bump(c.clone(), *radius).map_err(|e| invalid("form", e))
            }
        }
    }
}

fn check_points(variety: &Variety, points: &[Vec<C64>], field: &str) -> Result<(), ConfigError> {
    for (i, p) in points.iter().enumerate() {
        if p.len() != variety.ambient_dim() {
            return Err(invalid(
                format!("{field}[{i}]"),
                format!("expected {} coordinates, got {}", variety.ambient_dim(), p.len()),
            ));
        }
        let r = variety.membership_residual(p);
        if r > MEMBERSHIP_TOL {
            return Err(invalid(format!("{field}[{i}]"), format!("point is not on the variety (residual {r:.3e})")));
        }
    }
    Ok(())
}

fn positive(value: f64, field: &str) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {value}")))
    }
}

impl RunConfig {
    pub fn validate(self) -> Result<ValidatedConfig, ConfigError> {
        let variety = self.variety.build()?;
        let n = variety.ambient_dim();
        let form = self.form.build(n)?;
        self.quadrature.validate().map_err(|e| invalid("quadrature", e))?;
        let needs_pure_dim = !matches!(self.job, JobSpec::Solve { method: SolveMethod::Direct, .. } | JobSpec::SolveScaled { .. } | JobSpec::ThetaCrosscheck { .. });
        if needs_pure_dim && variety.pure_dim().is_none() {
            return Err(invalid("variety.pure_dim", format!("required by the `{}` job", self.job.name())));
        }
        let needs_cone = matches!(
            self.job,
            JobSpec::Solve { method: SolveMethod::L2, .. }
                | JobSpec::Residual { method: SolveMethod::L2, .. }
                | JobSpec::Holder { .. }
                | JobSpec::L2 { .. }
                | JobSpec::Scaling { .. }
        );
        if needs_cone && !variety.is_cone() {
            return Err(invalid("variety.weights", format!("the `{}` job requires a cone (all weights 1)", self.job.name())));
        }
        match &self.job {
            JobSpec::Solve { points, .. } => {
                if points.is_empty() {
                    return Err(invalid("job.points", "at least one point is required"));
                }
                check_points(&variety, points, "job.points")?;
            }
            JobSpec::SolveScaled { points, scales } => {
                if points.is_empty() || scales.is_empty() {
                    return Err(invalid("job", "`points` and `scales` must be nonempty"));
                }
                check_points(&variety, points, "job.points")?;
            }
            JobSpec::Residual {
                anchors,
                samples_per_anchor,
                fd_step,
                ..
            } => {
                if *anchors == 0 || *samples_per_anchor == 0 {
                    return Err(invalid("job", "`anchors` and `samples_per_anchor` must be positive"));
                }
                positive(*fd_step, "job.fd_step")?;
                if !form.dbar_closed() {
                    return Err(invalid("form.kind", "the residual job requires a ∂̄-closed form"));
                }
            }
            JobSpec::Holder {
                theta,
                radius,
                pairs,
                scales,
                path_steps,
                anchors,
            } => {
                if !(*theta > 0.0 && *theta < 1.0) {
                    return Err(invalid("job.theta", "must lie in (0, 1)"));
                }
                positive(*radius, "job.radius")?;
                if *pairs == 0 || *path_steps == 0 || *anchors == 0 {
                    return Err(invalid("job", "`pairs`, `path_steps` and `anchors` must be positive"));
                }
                if scales.is_empty() {
                    return Err(invalid("job.scales", "must be nonempty"));
                }
                for (i, s) in scales.iter().enumerate() {
                    positive(*s, &format!("job.scales[{i}]"))?;
                }
            }
            JobSpec::L2 { radius, samples } => {
                positive(*radius, "job.radius")?;
                if *samples < 32 {
                    return Err(invalid("job.samples", "need at least 32 samples"));
                }
                if variety.polynomials().len() != 1 || variety.pure_dim() != Some(n - 1) {
                    return Err(invalid("variety", "the `l2` job supports cone hypersurfaces only"));
                }
            }
            JobSpec::Scaling { radii, samples, .. } => {
                if radii.len() < 2 {
                    return Err(invalid("job.radii", "need at least two radii"));
                }
                for (i, r) in radii.iter().enumerate() {
                    positive(*r, &format!("job.radii[{i}]"))?;
                }
                if *samples < 32 {
                    return Err(invalid("job.samples", "need at least 32 samples"));
                }
                if variety.polynomials().len() != 1 || variety.pure_dim() != Some(n - 1) {
                    return Err(invalid("variety", "the `scaling` job supports cone hypersurfaces only"));
                }
            }
            JobSpec::ThetaCrosscheck { points, count } => {
                if points.is_empty() && *count == 0 {
                    return Err(invalid("job", "give `points` or a positive `count`"));
                }
                let cone = variety.theta_cone().map_err(|e| invalid("variety", e))?;
                check_points(&cone, points, "job.points")?;
                if *count > 0 && variety.pure_dim().is_none() {
                    return Err(invalid("variety.pure_dim", "required to sample random points"));
                }
            }
        }
        Ok(ValidatedConfig {
            config: self,
            variety,
            form,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[variety]
fixture = "line2"

[job]
kind = "solve"
points = [[[0.0, 0.0], [0.0, 0.0]]]
"#;

    #[test]
    fn minimal_config_parses() {
        let v = parse_and_validate(MINIMAL).unwrap();
        assert_eq!(v.config.form, FormSpec::Zero);
        assert_eq!(v.variety.ambient_dim(), 2);
    }

    #[test]
    fn unknown_keys_rejected_with_line() {
        let text = MINIMAL.replace("fixture = \"line2\"", "fixture = \"line2\"\ncolour = 3");
        match parse_config(&text) {
            Err(ConfigError::Parse(msg)) => assert!(msg.contains("line 4"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weight_length_mismatch_names_field() {
        let text = r#"
[variety]
weights = [1, 1, 1]
pure_dim = 1
[[variety.polynomials]]
terms = [{ exponents = [0, 1], re = 1.0 }]
[job]
kind = "solve"
points = [[[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]]
"#;
        match parse_and_validate(text) {
            Err(ConfigError::Validation { field, .. }) => assert!(field.contains("exponents"), "{field}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_homogeneous_polynomial_cites_monomial() {
        let text = r#"
[variety]
weights = [1, 1]
pure_dim = 1
[[variety.polynomials]]
terms = [{ exponents = [1, 0], re = 1.0 }, { exponents = [0, 2], re = 1.0 }]
[job]
kind = "solve"
points = [[[0.0, 0.0], [0.0, 0.0]]]
"#;
        match parse_and_validate(text) {
            Err(ConfigError::Validation { field, message }) => {
                assert_eq!(field, "variety.polynomials[0]");
                assert!(message.contains("[0, 2]") || message.contains("[1, 0]"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn off_variety_point_rejected() {
        let text = MINIMAL.replace("[[[0.0, 0.0], [0.0, 0.0]]]", "[[[0.0, 0.0], [1.0, 0.0]]]");
        assert!(matches!(parse_and_validate(&text), Err(ConfigError::Validation { .. })));
    }

    #[test]
    fn round_trip_through_toml() {
        let text = r#"
seed = 7
[variety]
fixture = "quadric-cone"
[form]
kind = "bump-dbar"
h = [{ exponents = [1, 0, 0], re = 1.0, im = 0.5 }]
r0 = 0.5
radius = 2.0
[quadrature]
rel_tol = 1e-9
[job]
kind = "holder"
radius = 2.0
pairs = 12
[output]
format = "csv"
"#;
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
}
