//! Latent Dirichlet allocation fitted by collapsed Gibbs sampling.
//!
//! Each token `i` in document `d` with word `w` carries a topic assignment
//! `z_i`. One sweep resamples every assignment from
//!
//! ```text
//! p(z_i = k | rest) ∝ (n_dk + α) · (n_kw + β) / (n_k + V·β)
//! ```
//!
//! where the counts exclude token `i` itself. After the final sweep the
//! topic-word distributions are the point estimate
//! `φ_kw = (n_kw + β) / (n_k + V·β)` and a training document's topic
//! distribution is `θ_dk = (n_dk + α) / (n_d + K·α)`.
//!
//! Held-out documents are folded in: `φ` stays fixed and only the new
//! document's assignments are resampled with `p(z_i = k) ∝ (n_dk + α) · φ_kw`.

use std::io::{self, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dtm::{DocTermMatrix, Vocabulary, Weighting};
use crate::error::{Error, Result};
use crate::seed;
use crate::textprep::TokenList;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaConfig {
    pub k: usize,
    /// Symmetric Dirichlet prior on per-document topic proportions.
    pub alpha: f64,
    /// Symmetric Dirichlet prior on topic-word distributions.
    pub beta: f64,
    pub sweeps: usize,
    pub infer_sweeps: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        let k = 20;
        LdaConfig {
            k,
            // 1 + 50/k
            alpha: 3.5,
            beta: 0.1,
            sweeps: 1000,
            infer_sweeps: 100,
            seed: 0,
        }
    }
}

impl LdaConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidArgument(format!("lda: {m}")));
        if self.k == 0 {
            return fail("k must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return fail("alpha must be positive");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return fail("beta must be positive");
        }
        if self.sweeps == 0 {
            return fail("sweeps must be at least 1");
        }
        Ok(())
    }
}

/// A document's posterior topic proportions.
#[derive(Debug, Clone, PartialEq)]
pub struct Theta(Vec<f64>);

impl From<Vec<f64>> for Theta {
    fn from(proportions: Vec<f64>) -> Self {
        Theta(proportions)
    }
}

impl Theta {
    fn from_counts(counts: &[u32], alpha: f64) -> Self {
        let n: u32 = counts.iter().sum();
        let denom = f64::from(n) + counts.len() as f64 * alpha;
        Theta(
            counts
                .iter()
                .map(|&c| (f64::from(c) + alpha) / denom)
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Sampler state exposed to sweep observers.
pub struct GibbsState {
    k: usize,
    n_words: usize,
    /// Word ids per non-empty document.
    docs: Vec<Vec<usize>>,
    assignments: Vec<Vec<usize>>,
    /// `[doc][topic]`
    doc_topic: Vec<Vec<u32>>,
    /// `[word * k + topic]`
    word_topic: Vec<u32>,
    topic_total: Vec<u32>,
}

impl GibbsState {
    fn init(docs: Vec<Vec<usize>>, k: usize, n_words: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut state = GibbsState {
            k,
            n_words,
            assignments: Vec::with_capacity(docs.len()),
            doc_topic: vec![vec![0; k]; docs.len()],
            word_topic: vec![0; n_words * k],
            topic_total: vec![0; k],
            docs,
        };
        for (d, words) in state.docs.iter().enumerate() {
            let z: Vec<usize> = words.iter().map(|_| rng.random_range(0..k)).collect();
            for (&w, &t) in words.iter().zip(&z) {
                state.doc_topic[d][t] += 1;
                state.word_topic[w * k + t] += 1;
                state.topic_total[t] += 1;
            }
            state.assignments.push(z);
        }
        state
    }

    fn sweep(&mut self, alpha: f64, beta: f64, rng: &mut ChaCha8Rng, probs: &mut [f64]) {
        let k = self.k;
        let v_beta = self.n_words as f64 * beta;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i];
                let old = self.assignments[d][i];
                self.doc_topic[d][old] -= 1;
                self.word_topic[w * k + old] -= 1;
                self.topic_total[old] -= 1;

                let wt = &self.word_topic[w * k..(w + 1) * k];
                let dt = &self.doc_topic[d];
                let mut total = 0.0;
                for t in 0..k {
                    total += (f64::from(dt[t]) + alpha) * (f64::from(wt[t]) + beta)
                        / (f64::from(self.topic_total[t]) + v_beta);
                    probs[t] = total;
                }
                let new = sample_cumulative(probs, total, rng);

                self.assignments[d][i] = new;
                self.doc_topic[d][new] += 1;
                self.word_topic[w * k + new] += 1;
                self.topic_total[new] += 1;
            }
        }
    }

    pub fn total_tokens(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.assignments
    }

    /// Recompute every count table from the assignment vector and compare
    /// with the incrementally maintained tables.
    pub fn verify_counts(&self) -> Result<(), String> {
        let k = self.k;
        let mut doc_topic = vec![vec![0u32; k]; self.docs.len()];
        let mut word_topic = vec![0u32; self.n_words * k];
        let mut topic_total = vec![0u32; k];
        let mut assigned = 0usize;
        for (d, (words, z)) in self.docs.iter().zip(&self.assignments).enumerate() {
            if words.len() != z.len() {
                return Err(format!(
                    "document {d}: {} tokens, {} assignments",
                    words.len(),
                    z.len()
                ));
            }
            for (&w, &t) in words.iter().zip(z) {
                if t >= k {
                    return Err(format!("document {d}: topic {t} out of range"));
                }
                doc_topic[d][t] += 1;
                word_topic[w * k + t] += 1;
                topic_total[t] += 1;
                assigned += 1;
            }
        }
        if assigned != self.total_tokens() {
            return Err(format!(
                "{assigned} assignments for {} tokens",
                self.total_tokens()
            ));
        }
        if topic_total.iter().map(|&c| c as usize).sum::<usize>() != assigned {
            return Err("topic totals do not sum to the token count".into());
        }
        if doc_topic != self.doc_topic {
            return Err("document-topic counts diverged".into());
        }
        if word_topic != self.word_topic {
            return Err("word-topic counts diverged".into());
        }
        if topic_total != self.topic_total {
            return Err("topic totals diverged".into());
        }
        Ok(())
    }
}

fn sample_cumulative(cumulative: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    let u = rng.random::<f64>() * total;
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(cumulative.len() - 1)
}

#[derive(Debug, Clone)]
pub struct TopicModel {
    /// `[topic][word]`
    phi: Vec<Vec<f64>>,
    /// `[word * k + topic]`, for fold-in
    phi_by_word: Vec<f64>,
    /// Final assignment counts of every training document, `[doc][topic]`.
    doc_topic_counts: Vec<Vec<u32>>,
    doc_ids: Vec<String>,
    vocabulary: Vocabulary,
    config: LdaConfig,
}

pub fn fit_lda(m: &DocTermMatrix, cfg: &LdaConfig) -> Result<TopicModel> {
    fit_lda_observed(m, cfg, |_, _| {})
}

/// As [`fit_lda`], calling `observer(sweep, state)` after every sweep.
pub fn fit_lda_observed(
    m: &DocTermMatrix,
    cfg: &LdaConfig,
    mut observer: impl FnMut(usize, &GibbsState),
) -> Result<TopicModel> {
    cfg.validate()?;
    if m.scheme() != Weighting::Count {
        return Err(Error::InvalidArgument(
            "topic models are fitted on raw counts".into(),
        ));
    }
    // Empty documents never enter the sampler.
    let mut sampled_rows = Vec::new();
    let mut docs = Vec::new();
    for (r, row) in m.rows().enumerate() {
        let mut words = Vec::new();
        for (c, v) in row.iter() {
            words.extend(std::iter::repeat_n(c, v.round() as usize));
        }
        if !words.is_empty() {
            sampled_rows.push(r);
            docs.push(words);
        }
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let k = cfg.k;
    let n_words = m.n_cols();
    let mut rng = seed::rng(cfg.seed);
    let mut state = GibbsState::init(docs, k, n_words, &mut rng);
    let mut probs = vec![0.0; k];
    for sweep in 0..cfg.sweeps {
        state.sweep(cfg.alpha, cfg.beta, &mut rng, &mut probs);
        observer(sweep, &state);
    }

    let v_beta = n_words as f64 * cfg.beta;
    let phi: Vec<Vec<f64>> = (0..k)
        .map(|t| {
            let denom = f64::from(state.topic_total[t]) + v_beta;
            (0..n_words)
                .map(|w| (f64::from(state.word_topic[w * k + t]) + cfg.beta) / denom)
                .collect()
        })
        .collect();
    let mut phi_by_word = vec![0.0; n_words * k];
    for (t, row) in phi.iter().enumerate() {
        for (w, &p) in row.iter().enumerate() {
            phi_by_word[w * k + t] = p;
        }
    }
    let mut doc_topic_counts = vec![vec![0; k]; m.n_rows()];
    for (counts, r) in state.doc_topic.into_iter().zip(sampled_rows) {
        doc_topic_counts[r] = counts;
    }
    Ok(TopicModel {
        phi,
        phi_by_word,
        doc_topic_counts,
        doc_ids: m.doc_ids().to_vec(),
        vocabulary: m.vocabulary().clone(),
        config: *cfg,
    })
}

impl TopicModel {
    pub fn k(&self) -> usize {
        self.config.k
    }

    pub fn config(&self) -> &LdaConfig {
        &self.config
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn phi(&self) -> &[Vec<f64>] {
        &self.phi
    }

    pub fn doc_topic_counts(&self) -> &[Vec<u32>] {
        &self.doc_topic_counts
    }

    /// Training documents, in row order.
    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    /// Topic proportions of training document `row` from the final state.
    pub fn training_theta(&self, row: usize) -> Theta {
        Theta::from_counts(&self.doc_topic_counts[row], self.config.alpha)
    }

    /// Fold-in estimate for an unseen document. Tokens outside the model
    /// vocabulary are ignored. The result is a pure function of the model
    /// and the document.
    pub fn infer_theta(&self, doc: &TokenList) -> Theta {
        let words: Vec<usize> = doc
            .iter()
            .filter_map(|t| self.vocabulary.position(t))
            .collect();
        let k = self.config.k;
        let mut counts = vec![0u32; k];
        if words.is_empty() {
            return Theta::from_counts(&counts, self.config.alpha);
        }
        let mut stream = vec![seed::tag("infer"), words.len() as u64];
        stream.extend(words.iter().map(|&w| w as u64));
        let mut rng = seed::rng(seed::derive(self.config.seed, &stream));

        let mut z: Vec<usize> = words.iter().map(|_| rng.random_range(0..k)).collect();
        for &t in &z {
            counts[t] += 1;
        }
        let mut probs = vec![0.0; k];
        for _ in 0..self.config.infer_sweeps {
            for (i, &w) in words.iter().enumerate() {
                counts[z[i]] -= 1;
                let phi_w = &self.phi_by_word[w * k..(w + 1) * k];
                let mut total = 0.0;
                for t in 0..k {
                    total += (f64::from(counts[t]) + self.config.alpha) * phi_w[t];
                    probs[t] = total;
                }
                z[i] = sample_cumulative(&probs, total, &mut rng);
                counts[z[i]] += 1;
            }
        }
        Theta::from_counts(&counts, self.config.alpha)
    }

    /// The `n` most probable words of each topic, ties broken
    /// lexicographically.
    pub fn top_words(&self, n: usize) -> Result<Vec<Vec<String>>> {
        if n == 0 || n > self.vocabulary.len() {
            return Err(Error::InvalidArgument(format!(
                "top_words: n must be in 1..={}, got {n}",
                self.vocabulary.len()
            )));
        }
        Ok(self
            .phi
            .iter()
            .map(|row| {
                let mut cols: Vec<usize> = (0..row.len()).collect();
                cols.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
                cols[..n]
                    .iter()
                    .map(|&c| self.vocabulary.term(c).to_string())
                    .collect()
            })
            .collect())
    }
}

pub fn top_words(model: &TopicModel, n: usize) -> Result<Vec<Vec<String>>> {
    model.top_words(n)
}

/// One line per topic: `topic_id: w1,w2,...,wn`.
pub fn write_topic_report(topics: &[Vec<String>], mut w: impl Write) -> io::Result<()> {
    for (i, words) in topics.iter().enumerate() {
        writeln!(w, "{i}: {}", words.join(","))?;
    }
    Ok(())
}
