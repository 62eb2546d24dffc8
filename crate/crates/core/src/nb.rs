//! Multinomial naive Bayes over document-term rows.
//!
//! Real-valued entries (tf or tf-idf weights) are treated as fractional
//! counts, so the same model trains on any weighting scheme.

use std::fmt::Write as _;

use crate::dtm::{DocTermMatrix, SparseRow, Vocabulary};
use crate::error::{Error, Result};
use crate::label::Label;

pub const DEFAULT_SMOOTHING: f64 = 1.0;

const FORMAT_HEADER: &str = "reviewsignal-nb v1";

#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    /// Sorted, so index order is the tie-break order.
    labels: Vec<Label>,
    class_log_prior: Vec<f64>,
    /// `[label][term]`
    word_log_likelihood: Vec<Vec<f64>>,
    vocabulary: Vocabulary,
}

pub fn train_nb(m: &DocTermMatrix, labels: &[Label], smoothing: f64) -> Result<NbModel> {
    if m.n_rows() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: m.n_rows(),
            found: labels.len(),
        });
    }
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "smoothing must be positive, got {smoothing}"
        )));
    }
    let classes = Label::ALL.to_vec();
    let mut doc_counts = vec![0usize; classes.len()];
    let mut mass = vec![vec![0.0; m.n_cols()]; classes.len()];
    for (row, label) in m.rows().zip(labels) {
        let k = label.index();
        doc_counts[k] += 1;
        for (c, v) in row.iter() {
            mass[k][c] += v;
        }
    }
    if let Some(k) = doc_counts.iter().position(|&n| n == 0) {
        return Err(Error::MissingClass(classes[k]));
    }

    let n_docs = labels.len() as f64;
    let class_log_prior = doc_counts
        .iter()
        .map(|&n| (n as f64 / n_docs).ln())
        .collect();
    let vocab_smoothing = smoothing * m.n_cols() as f64;
    let word_log_likelihood = mass
        .into_iter()
        .map(|row| {
            let total: f64 = row.iter().sum::<f64>() + vocab_smoothing;
            row.into_iter()
                .map(|v| ((v + smoothing) / total).ln())
                .collect()
        })
        .collect();
    Ok(NbModel {
        labels: classes,
        class_log_prior,
        word_log_likelihood,
        vocabulary: m.vocabulary().clone(),
    })
}

impl NbModel {
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn class_log_prior(&self, label: Label) -> f64 {
        self.class_log_prior[self.slot(label)]
    }

    pub fn word_log_likelihood(&self, label: Label, term: &str) -> Option<f64> {
        let c = self.vocabulary.position(term)?;
        Some(self.word_log_likelihood[self.slot(label)][c])
    }

    fn slot(&self, label: Label) -> usize {
        self.labels
            .iter()
            .position(|&l| l == label)
            .expect("known label")
    }

    /// Unnormalized log posterior per label, in label order.
    pub fn scores(&self, row: &SparseRow<'_>) -> Vec<f64> {
        self.class_log_prior
            .iter()
            .zip(&self.word_log_likelihood)
            .map(|(prior, lik)| prior + row.iter().map(|(c, v)| v * lik[c]).sum::<f64>())
            .collect()
    }

    /// Versioned flat key-value dump.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{FORMAT_HEADER}");
        let names: Vec<&str> = self.labels.iter().map(|l| l.name()).collect();
        let _ = writeln!(out, "labels {}", names.join(" "));
        let _ = writeln!(out, "terms {}", self.vocabulary.len());
        for (l, p) in self.labels.iter().zip(&self.class_log_prior) {
            let _ = writeln!(out, "prior {l} {p}");
        }
        for (l, lik) in self.labels.iter().zip(&self.word_log_likelihood) {
            for (t, v) in self.vocabulary.terms().iter().zip(lik) {
                let _ = writeln!(out, "loglik {l} {t} {v}");
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |lineno: usize, msg: &str| Error::Format(format!("line {lineno}: {msg}"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, FORMAT_HEADER)) => {}
            _ => return Err(bad(1, "not a naive Bayes model dump")),
        }
        let labels: Vec<Label> = Label::ALL.to_vec();
        let mut priors = vec![None; labels.len()];
        let mut entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); labels.len()];
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let label_slot = |s: &str| -> Result<usize> {
                s.parse::<Label>()
                    .map(Label::index)
                    .map_err(|e| bad(lineno, &e))
            };
            let number = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| bad(lineno, "invalid number"))
            };
            match fields.as_slice() {
                ["labels", ..] | ["terms", _] => {}
                ["prior", l, v] => priors[label_slot(l)?] = Some(number(v)?),
                ["loglik", l, t, v] => entries[label_slot(l)?].push((t.to_string(), number(v)?)),
                [] => {}
                _ => return Err(bad(lineno, "unrecognized record")),
            }
        }
        let vocabulary = Vocabulary::from_terms(entries[0].iter().map(|(t, _)| t.clone()));
        let mut word_log_likelihood = Vec::new();
        for per_label in entries {
            let mut lik = vec![f64::NAN; vocabulary.len()];
            for (t, v) in per_label {
                let c = vocabulary
                    .position(&t)
                    .ok_or_else(|| Error::Format(format!("term {t} missing for some label")))?;
                lik[c] = v;
            }
            if lik.iter().any(|v| v.is_nan()) {
                return Err(Error::Format("incomplete likelihood table".into()));
            }
            word_log_likelihood.push(lik);
        }
        let class_log_prior = priors
            .into_iter()
            .map(|p| p.ok_or_else(|| Error::Format("missing prior".into())))
            .collect::<Result<_>>()?;
        Ok(NbModel {
            labels,
            class_log_prior,
            word_log_likelihood,
            vocabulary,
        })
    }
}

/// Highest-scoring label; ties go to the lexicographically first label.
pub fn predict_nb(model: &NbModel, row: &SparseRow<'_>) -> Label {
    let scores = model.scores(row);
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = k;
        }
    }
    model.labels[best]
}
