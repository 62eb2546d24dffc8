//! Linear soft-margin SVM trained by dual coordinate descent, and assembly
//! of the keyword/topic feature vectors it consumes.
//!
//! The bias is learned by appending a constant 1 to every input, so the
//! problem solved is
//!
//! ```text
//! min_{w,b}  ½(‖w‖² + b²) + C Σ_i max(0, 1 − y_i (w·x_i + b))
//! ```
//!
//! through its dual
//!
//! ```text
//! max_α  Σ_i α_i − ½ ‖Σ_i α_i y_i x̂_i‖²    subject to 0 ≤ α_i ≤ C
//! ```
//!
//! with `x̂_i = (x_i, 1)`. Each coordinate step maximizes the dual exactly
//! along `α_i` and clips to the box, so the dual objective never decreases.

use std::fmt::Write as _;

use rand::seq::SliceRandom;

use crate::dtm::SparseRow;
use crate::error::{Error, Result};
use crate::label::Label;
use crate::lda::Theta;
use crate::seed;

/// Class sign. `Action` maps to `Positive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

impl From<Label> for Sign {
    fn from(label: Label) -> Self {
        match label {
            Label::Action => Sign::Positive,
            Label::NoAction => Sign::Negative,
        }
    }
}

impl From<Sign> for Label {
    fn from(sign: Sign) -> Self {
        match sign {
            Sign::Positive => Label::Action,
            Sign::Negative => Label::NoAction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub c: f64,
    /// Training stops once the largest projected-gradient magnitude of an
    /// epoch falls below this.
    pub tol: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            tol: 1e-4,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub w: Vec<f64>,
    pub b: f64,
}

/// Diagnostics collected while training.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    /// Dual objective after each epoch.
    pub dual_objective: Vec<f64>,
    /// Largest projected-gradient magnitude seen in each epoch.
    pub max_violation: Vec<f64>,
    pub converged: bool,
    /// Final dual variables.
    pub alpha: Vec<f64>,
}

impl TrainingTrace {
    pub fn epochs(&self) -> usize {
        self.dual_objective.len()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn train_svm(xs: &[Vec<f64>], ys: &[Sign], cfg: &SvmConfig) -> Result<SvmModel> {
    train_svm_traced(xs, ys, cfg).map(|(m, _)| m)
}

pub fn train_svm_traced(
    xs: &[Vec<f64>],
    ys: &[Sign],
    cfg: &SvmConfig,
) -> Result<(SvmModel, TrainingTrace)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if !(cfg.c > 0.0 && cfg.c.is_finite() && cfg.tol > 0.0) {
        return Err(Error::InvalidArgument(
            "svm: c and tol must be positive".into(),
        ));
    }
    for sign in [Sign::Positive, Sign::Negative] {
        if !ys.contains(&sign) {
            return Err(Error::MissingClass(sign.into()));
        }
    }
    let dim = xs[0].len();
    if let Some(bad) = xs.iter().find(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }

    let n = xs.len();
    let c = cfg.c;
    let y: Vec<f64> = ys.iter().map(|s| s.value()).collect();
    // diagonal of Q including the bias component
    let qd: Vec<f64> = xs.iter().map(|x| dot(x, x) + 1.0).collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = seed::rng(cfg.seed);
    let mut trace = TrainingTrace {
        dual_objective: Vec::new(),
        max_violation: Vec::new(),
        converged: false,
        alpha: Vec::new(),
    };

    for _ in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut violation: f64 = 0.0;
        for &i in &order {
            let x = &xs[i];
            let g = y[i] * (dot(&w, x) + b) - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= c {
                g.max(0.0)
            } else {
                g
            };
            violation = violation.max(pg.abs());
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * y[i];
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj += step * xj;
                }
                b += step;
            }
        }
        let objective = alpha.iter().sum::<f64>() - 0.5 * (dot(&w, &w) + b * b);
        if let Some(&prev) = trace.dual_objective.last() {
            debug_assert!(
                objective >= prev - 1e-9 * (1.0 + prev.abs()),
                "dual objective decreased: {prev} -> {objective}"
            );
        }
        trace.dual_objective.push(objective);
        trace.max_violation.push(violation);
        if violation < cfg.tol {
            trace.converged = true;
            break;
        }
    }
    if !trace.converged {
        log::debug!(
            "svm: stopped after {} epochs, violation {:?}",
            cfg.max_epochs,
            trace.max_violation.last()
        );
    }
    trace.alpha = alpha;
    Ok((SvmModel { w, b }, trace))
}

impl SvmModel {
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                found: x.len(),
            });
        }
        Ok(dot(&self.w, x) + self.b)
    }

    /// Primal objective `½(‖w‖² + b²) + C Σ hinge` on a training set.
    pub fn primal_objective(&self, xs: &[Vec<f64>], ys: &[Sign], c: f64) -> f64 {
        let hinge: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, s)| (1.0 - s.value() * (dot(&self.w, x) + self.b)).max(0.0))
            .sum();
        0.5 * (dot(&self.w, &self.w) + self.b * self.b) + c * hinge
    }

    /// Versioned text dump: nonzero weights as `index value` pairs, then the
    /// bias.
    pub fn to_text(&self) -> String {
        let mut out = String::from("reviewsignal-svm v1\n");
        let _ = writeln!(out, "dim {}", self.w.len());
        for (i, v) in self.w.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            let _ = writeln!(out, "w {i} {v}");
        }
        let _ = writeln!(out, "b {}", self.b);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |n: usize| Error::Format(format!("line {n}: malformed svm model record"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        if lines.next().map(|(_, l)| l) != Some("reviewsignal-svm v1") {
            return Err(bad(1));
        }
        let mut w: Option<Vec<f64>> = None;
        let mut b = None;
        for (n, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["dim", d] => w = Some(vec![0.0; d.parse().map_err(|_| bad(n))?]),
                ["w", i, v] => {
                    let i: usize = i.parse().map_err(|_| bad(n))?;
                    let slot = w
                        .as_mut()
                        .and_then(|w| w.get_mut(i))
                        .ok_or_else(|| bad(n))?;
                    *slot = v.parse().map_err(|_| bad(n))?;
                }
                ["b", v] => b = Some(v.parse().map_err(|_| bad(n))?),
                [] => {}
                _ => return Err(bad(n)),
            }
        }
        match (w, b) {
            (Some(w), Some(b)) => Ok(SvmModel { w, b }),
            _ => Err(Error::Format("svm model dump is incomplete".into())),
        }
    }
}

/// Sign of the decision value (zero counts as positive) and the value.
pub fn predict_svm(model: &SvmModel, x: &[f64]) -> Result<(Sign, f64)> {
    let v = model.decision_value(x)?;
    let sign = if v >= 0.0 {
        Sign::Positive
    } else {
        Sign::Negative
    };
    Ok((sign, v))
}

/// Which blocks make up a feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureSpec {
    pub use_keywords: bool,
    /// Size of the keyword vocabulary; `None` keeps every term.
    pub keyword_n: Option<usize>,
    pub use_topics: bool,
}

impl FeatureSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.use_keywords && !self.use_topics {
            return Err(Error::InvalidArgument(
                "feature spec selects neither keywords nor topics".into(),
            ));
        }
        Ok(())
    }
}

/// `[keyword block | topic block]`. The keyword block is the row as given
/// (tf weights over the selected vocabulary); the topic block is theta.
pub fn assemble_features(
    row: &SparseRow<'_>,
    theta: Option<&Theta>,
    spec: &FeatureSpec,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut out = Vec::new();
    if spec.use_keywords {
        out = row.to_dense();
    }
    match (spec.use_topics, theta) {
        (true, Some(t)) => out.extend_from_slice(t.as_slice()),
        (true, None) => {
            return Err(Error::InvalidArgument(
                "topic features requested but no theta given".into(),
            ))
        }
        (false, Some(_)) => {
            return Err(Error::InvalidArgument(
                "theta given but topic features not requested".into(),
            ))
        }
        (false, None) => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signs(v: &[i8]) -> Vec<Sign> {
        v.iter()
            .map(|&s| {
                if s > 0 {
                    Sign::Positive
                } else {
                    Sign::Negative
                }
            })
            .collect()
    }

    #[test]
    fn symmetric_pair_splits_at_origin() {
        let xs = vec![vec![-1.0, 0.0], vec![1.0, 0.0]];
        let ys = signs(&[-1, 1]);
        let model = train_svm(&xs, &ys, &SvmConfig::default()).unwrap();
        assert!(model.w[0] > 0.0);
        assert!(model.w[1].abs() < 1e-12);
        assert!(model.b.abs() < 1e-12);
        assert_eq!(
            predict_svm(&model, &[-0.01, 0.0]).unwrap().0,
            Sign::Negative
        );
        assert_eq!(predict_svm(&model, &[0.01, 0.0]).unwrap().0, Sign::Positive);
    }

    #[test]
    fn prediction_examples() {
        let model = SvmModel {
            w: vec![1.0, 0.0],
            b: 0.0,
        };
        assert_eq!(
            predict_svm(&model, &[2.0, 5.0]).unwrap(),
            (Sign::Positive, 2.0)
        );
        assert_eq!(
            predict_svm(&model, &[-2.0, -5.0]).unwrap(),
            (Sign::Negative, -2.0)
        );
        assert_eq!(predict_svm(&model, &[0.0, 3.0]).unwrap().0, Sign::Positive);
        assert!(predict_svm(&model, &[1.0]).is_err());
    }

    #[test]
    fn single_class_is_an_error() {
        let xs = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            train_svm(&xs, &signs(&[1, 1]), &SvmConfig::default()),
            Err(Error::MissingClass(Label::NoAction))
        ));
    }

    #[test]
    fn ragged_input_is_an_error() {
        let xs = vec![vec![0.0], vec![1.0, 2.0]];
        assert!(train_svm(&xs, &signs(&[1, -1]), &SvmConfig::default()).is_err());
    }

    #[test]
    fn label_mapping() {
        assert_eq!(Sign::from(Label::Action), Sign::Positive);
        assert_eq!(Label::from(Sign::Negative), Label::NoAction);
    }

    #[test]
    fn features_layout() {
        let indices = [1usize];
        let values = [0.5];
        let row = SparseRow {
            indices: &indices,
            values: &values,
            dim: 3,
        };
        let theta_spec = FeatureSpec {
            use_keywords: true,
            keyword_n: Some(3),
            use_topics: true,
        };
        let lda_cfg = crate::lda::LdaConfig {
            k: 2,
            sweeps: 1,
            ..Default::default()
        };
        let m = crate::dtm::build_dtm(&[["a"].into_iter().collect()]).unwrap();
        let model = crate::lda::fit_lda(&m, &lda_cfg).unwrap();
        let theta = model.infer_theta(&Default::default());
        let f = assemble_features(&row, Some(&theta), &theta_spec).unwrap();
        assert_eq!(f, vec![0.0, 0.5, 0.0, 0.5, 0.5]);

        let topics_only = FeatureSpec {
            use_keywords: false,
            keyword_n: None,
            use_topics: true,
        };
        assert_eq!(
            assemble_features(&row, Some(&theta), &topics_only).unwrap(),
            vec![0.5, 0.5]
        );
        assert!(assemble_features(&row, None, &topics_only).is_err());

        let keywords_only = FeatureSpec {
            use_keywords: true,
            keyword_n: None,
            use_topics: false,
        };
        assert!(assemble_features(&row, Some(&theta), &keywords_only).is_err());
        let neither = FeatureSpec {
            use_keywords: false,
            keyword_n: None,
            use_topics: false,
        };
        assert!(assemble_features(&row, None, &neither).is_err());
    }

    #[test]
    fn text_dump_round_trips() {
        let model = SvmModel {
            w: vec![0.0, -1.25, 3.0e-7],
            b: 0.5,
        };
        let text = model.to_text();
        assert!(text.starts_with("reviewsignal-svm v1\n"));
        assert_eq!(SvmModel::from_text(&text).unwrap(), model);
        assert!(SvmModel::from_text("reviewsignal-svm v1\nw 0 1\n").is_err());
    }
}
