//! End-to-end orchestration behind the command-line subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};

use crate::config::PipelineConfig;
use crate::corpus::Corpus;
use crate::dtm::build_dtm_with_ids;
use crate::error::{Error, Result};
use crate::eval::{cross_validate, CvReport};
use crate::ingest::{link_and_label, load_inspections, load_links, load_reviews};
use crate::lda::fit_lda;
use crate::report::{emit_report, ReportInput, TOPICS_TXT};
use crate::synth::{generate_corpus, write_dataset};
use crate::textprep::StopWords;

/// Read, link, label and preprocess the configured input files.
pub fn load_corpus(cfg: &PipelineConfig) -> Result<Corpus> {
    let reviews = load_reviews(cfg.require("reviews")?)?;
    let inspections = load_inspections(cfg.require("inspections")?)?;
    let links = load_links(cfg.require("links")?)?;
    let stopwords = match &cfg.paths.stopwords {
        Some(path) => StopWords::load(path)?,
        None => StopWords::english(),
    };
    let labeling = link_and_label(&reviews, &inspections, &links, cfg.ingest.window_days)?;
    if labeling.dropped() > 0 {
        warn!(
            "dropped {} of {} reviews ({} without a facility link, {} without an inspection in the window)",
            labeling.dropped(),
            reviews.len(),
            labeling.dropped_unlinked,
            labeling.dropped_unmatched
        );
    }
    let corpus = Corpus::from_labeled(&labeling.documents, &stopwords);
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    info!("labeled {} documents", corpus.len());
    Ok(corpus)
}

/// Fit one topic model on the whole corpus and return the top words of
/// every topic. This model only feeds the topic report; cross-validation
/// refits per fold.
pub fn fit_topics(corpus: &Corpus, cfg: &PipelineConfig) -> Result<Vec<Vec<String>>> {
    let counts = build_dtm_with_ids(corpus.ids(), &corpus.tokens())?;
    let lda = cfg.experiment().lda;
    let model = fit_lda(&counts, &lda)?;
    model.top_words(cfg.lda.top_words.min(counts.n_cols()))
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: CvReport,
    pub topics: Option<Vec<Vec<String>>>,
    pub files: Vec<PathBuf>,
}

fn prepare_output(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Report {
        path: dir.to_path_buf(),
        source,
    })
}

/// Cross-validate every configured method and write the report files.
pub fn run(cfg: &PipelineConfig) -> Result<RunOutcome> {
    let methods = cfg.parsed_methods()?;
    if methods.is_empty() {
        return Err(Error::Config(
            "methods: at least one method is required".into(),
        ));
    }
    let out = cfg.require("output")?;
    let corpus = load_corpus(cfg)?;
    prepare_output(out)?;

    let exp = cfg.experiment();
    let report = cross_validate(&methods, &corpus, &exp)?;
    let topics = if methods.iter().any(|m| m.uses_topics()) {
        Some(fit_topics(&corpus, cfg)?)
    } else {
        None
    };
    let files = emit_report(
        ReportInput {
            methods: &report.methods,
            topics: topics.as_deref(),
            audit: exp.audit.then_some(&report.audit),
        },
        out,
    )?;
    Ok(RunOutcome {
        report,
        topics,
        files,
    })
}

/// Fit the full-corpus topic model; writes `topics.txt` into the output
/// directory when one is configured.
pub fn topics(cfg: &PipelineConfig) -> Result<(Vec<Vec<String>>, Option<PathBuf>)> {
    let corpus = load_corpus(cfg)?;
    let topics = fit_topics(&corpus, cfg)?;
    let written = match &cfg.paths.output {
        Some(dir) => {
            prepare_output(dir)?;
            let path = dir.join(TOPICS_TXT);
            fs::write(&path, crate::report::render_topics(&topics)).map_err(|source| {
                Error::Report {
                    path: path.clone(),
                    source,
                }
            })?;
            Some(path)
        }
        None => None,
    };
    Ok((topics, written))
}

/// Generate a synthetic dataset into `out_dir`; returns the document count.
pub fn synth(cfg: &PipelineConfig, out_dir: &Path) -> Result<usize> {
    let docs = generate_corpus(&cfg.synth_config()).map_err(|e| match e {
        Error::InvalidArgument(m) => Error::Config(m),
        other => other,
    })?;
    write_dataset(&docs, out_dir).map_err(|e| match e {
        Error::Io { path, source } => Error::Report { path, source },
        other => other,
    })?;
    Ok(docs.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(dir: &Path) -> PipelineConfig {
        let mut cfg = PipelineConfig::parse(
            r#"
            seed = 3
            methods = ["nb-all", "svm-topics"]
            synth.n_docs = 60
            lda.k = 4
            lda.sweeps = 20
            lda.infer_sweeps = 10
            smote.target = 40
            cv.folds = 3
            paths.reviews = "reviews.jsonl"
            paths.inspections = "inspections.csv"
            paths.links = "links.csv"
            paths.output = "out"
            "#,
        )
        .unwrap();
        cfg.resolve_paths(dir);
        cfg
    }

    #[test]
    fn synth_then_run() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path());
        assert_eq!(synth(&cfg, dir.path()).unwrap(), 60);
        let corpus = load_corpus(&cfg).unwrap();
        assert_eq!(corpus.len(), 60);
        assert_eq!(corpus.count(crate::label::Label::Action), 30);

        let outcome = run(&cfg).unwrap();
        assert_eq!(outcome.report.methods.len(), 2);
        assert_eq!(outcome.topics.as_ref().unwrap().len(), 4);
        assert!(dir.path().join("out").join(TOPICS_TXT).exists());
    }

    #[test]
    fn missing_input_is_a_data_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path());
        let err = run(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("reviews.jsonl"), "{err}");
    }
}
