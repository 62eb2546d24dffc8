//! Predicting binary health-inspection outcomes from restaurant review text.
//!
//! Reviews are linked to the inspection that follows them, preprocessed into
//! stemmed tokens and turned into document-term matrices. Naive Bayes and
//! linear SVM classifiers are cross-validated on keyword features, topic
//! proportions from a Gibbs-sampled LDA model, or both.
//!
//! ```
//! use reviewsignal::eval::{cross_validate, ExperimentConfig, Method};
//! use reviewsignal::synth::{generate_corpus, SynthConfig};
//! use reviewsignal::{Corpus, StopWords};
//!
//! let docs = generate_corpus(&SynthConfig { n_docs: 60, seed: 1, ..SynthConfig::default() })?;
//! let corpus = Corpus::from_labeled(&docs, &StopWords::english());
//! let cfg = ExperimentConfig { folds: 3, ..ExperimentConfig::default() }.with_seed(1);
//! let report = cross_validate(&[Method::NbAllKeywords], &corpus, &cfg)?;
//! assert_eq!(report.methods[0].folds.len(), 3);
//! # Ok::<(), reviewsignal::Error>(())
//! ```

pub mod config;
pub mod corpus;
pub mod dtm;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod label;
pub mod lda;
pub mod nb;
pub mod pipeline;
pub mod report;
pub mod seed;
pub mod smote;
pub mod svm;
pub mod synth;
pub mod textprep;

pub use config::PipelineConfig;
pub use corpus::{Corpus, Document};
pub use dtm::{DocTermMatrix, Vocabulary, Weighting};
pub use error::{Error, Result};
pub use ingest::LabeledDocument;
pub use label::Label;
pub use lda::{LdaConfig, Theta, TopicModel};
pub use nb::NbModel;
pub use smote::SmoteConfig;
pub use svm::{Sign, SvmConfig, SvmModel};
pub use textprep::{preprocess, StopWords, TokenList};

// Code samples in the guide run as doc-tests, one module per chapter.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod guide_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/data.md")]
mod guide_data {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/preprocessing.md")]
mod guide_preprocessing {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/features.md")]
mod guide_features {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/naive-bayes.md")]
mod guide_naive_bayes {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/topics.md")]
mod guide_topics {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/smote.md")]
mod guide_smote {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/svm.md")]
mod guide_svm {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/evaluation.md")]
mod guide_evaluation {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/synthetic.md")]
mod guide_synthetic {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod guide_cli {}
