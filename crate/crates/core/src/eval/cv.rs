//! Cross-validated comparison of the classifier/feature-set combinations.
//!
//! Within each fold every fitted statistic (vocabulary, idf, top terms,
//! topic model, SMOTE samples, classifier) comes from the training slice
//! only. Test documents are transformed with the training statistics and
//! scored. Folds run in parallel; results are reduced in fold order.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::folds::stratified_kfold;
use super::metrics::{metrics, ConfusionMatrix, Metrics, MetricsSummary};
use crate::corpus::Corpus;
use crate::dtm::{
    build_dtm_with_ids, count_matrix, project, select_top_terms, weight_tf, DocTermMatrix,
    IdfTable, Vocabulary,
};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::lda::{fit_lda, LdaConfig, Theta, TopicModel};
use crate::nb::{predict_nb, train_nb, DEFAULT_SMOOTHING};
use crate::seed;
use crate::smote::{smote_oversample, SmoteConfig};
use crate::svm::{assemble_features, predict_svm, train_svm, FeatureSpec, Sign, SvmConfig};
use crate::textprep::TokenList;

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_TOP_NB: usize = 300;
pub const DEFAULT_TOP_SVM: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classifier {
    NaiveBayes,
    Svm,
}

/// One classifier × feature-set row of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    NbAllKeywords,
    NbTopKeywords,
    SvmAllKeywords,
    SvmTopKeywords,
    SvmAllKeywordsTopics,
    SvmTopics,
    SvmTopKeywordsTopics,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::NbAllKeywords,
        Method::NbTopKeywords,
        Method::SvmAllKeywords,
        Method::SvmTopKeywords,
        Method::SvmAllKeywordsTopics,
        Method::SvmTopics,
        Method::SvmTopKeywordsTopics,
    ];

    /// Identifier used in config files and CSV output.
    pub fn key(self) -> &'static str {
        match self {
            Method::NbAllKeywords => "nb-all",
            Method::NbTopKeywords => "nb-top",
            Method::SvmAllKeywords => "svm-all",
            Method::SvmTopKeywords => "svm-top",
            Method::SvmAllKeywordsTopics => "svm-all-topics",
            Method::SvmTopics => "svm-topics",
            Method::SvmTopKeywordsTopics => "svm-top-topics",
        }
    }

    /// Human-readable row name.
    pub fn title(self) -> &'static str {
        match self {
            Method::NbAllKeywords => "NB, all keywords",
            Method::NbTopKeywords => "NB, top keywords",
            Method::SvmAllKeywords => "SVM, all keywords",
            Method::SvmTopKeywords => "SVM, top keywords",
            Method::SvmAllKeywordsTopics => "SVM, all keywords + topics",
            Method::SvmTopics => "SVM, topics",
            Method::SvmTopKeywordsTopics => "SVM, top keywords + topics",
        }
    }

    pub fn classifier(self) -> Classifier {
        match self {
            Method::NbAllKeywords | Method::NbTopKeywords => Classifier::NaiveBayes,
            _ => Classifier::Svm,
        }
    }

    pub fn uses_topics(self) -> bool {
        matches!(
            self,
            Method::SvmAllKeywordsTopics | Method::SvmTopics | Method::SvmTopKeywordsTopics
        )
    }

    pub fn feature_spec(self, cfg: &ExperimentConfig) -> FeatureSpec {
        let (use_keywords, keyword_n) = match self {
            Method::NbAllKeywords | Method::SvmAllKeywords | Method::SvmAllKeywordsTopics => {
                (true, None)
            }
            Method::NbTopKeywords => (true, Some(cfg.n_top_nb)),
            Method::SvmTopKeywords | Method::SvmTopKeywordsTopics => (true, Some(cfg.n_top_svm)),
            Method::SvmTopics => (false, None),
        };
        FeatureSpec {
            use_keywords,
            keyword_n,
            use_topics: self.uses_topics(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.key() == s)
            .ok_or_else(|| {
                let keys: Vec<_> = Method::ALL.iter().map(|m| m.key()).collect();
                format!("unknown method {s:?}; expected one of {}", keys.join(", "))
            })
    }
}

/// Every setting the cross-validated experiment depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub folds: usize,
    pub n_top_nb: usize,
    pub n_top_svm: usize,
    pub nb_smoothing: f64,
    pub lda: LdaConfig,
    pub smote: SmoteConfig,
    pub svm: SvmConfig,
    /// Class treated as positive for sensitivity and specificity.
    pub positive: Label,
    pub seed: u64,
    /// Record which documents fed every fitted statistic.
    pub audit: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            folds: DEFAULT_FOLDS,
            n_top_nb: DEFAULT_TOP_NB,
            n_top_svm: DEFAULT_TOP_SVM,
            nb_smoothing: DEFAULT_SMOOTHING,
            lda: LdaConfig::default(),
            smote: SmoteConfig::default(),
            svm: SvmConfig::default(),
            positive: Label::Action,
            seed: 0,
            audit: false,
        }
    }
}

impl ExperimentConfig {
    /// Set the master seed and derive every stage seed from it.
    pub fn with_seed(mut self, master: u64) -> Self {
        self.seed = master;
        self.lda.seed = seed::derive(master, &[seed::tag("lda")]);
        self.smote.seed = seed::derive(master, &[seed::tag("smote")]);
        self.svm.seed = seed::derive(master, &[seed::tag("svm")]);
        self
    }
}

/// Training-side stage whose inputs the audit tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Vocabulary,
    Idf,
    TopTerms,
    TopicModel,
    Smote,
    Classifier,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Vocabulary => "vocabulary",
            Stage::Idf => "idf",
            Stage::TopTerms => "top-terms",
            Stage::TopicModel => "topic-model",
            Stage::Smote => "smote",
            Stage::Classifier => "classifier",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditEntry {
    pub fold: usize,
    /// `None` for statistics shared by every method in the fold.
    pub method: Option<Method>,
    pub stage: Stage,
    /// Distinct documents that contributed to the statistic.
    pub contributors: usize,
    /// How many of them belong to the fold's test slice.
    pub leaked: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LeakageAudit {
    pub entries: Vec<AuditEntry>,
}

impl LeakageAudit {
    pub fn total_leaked(&self) -> usize {
        self.entries.iter().map(|e| e.leaked).sum()
    }

    pub fn is_clean(&self) -> bool {
        self.total_leaked() == 0
    }

    pub fn methods_covered(&self) -> HashSet<Method> {
        self.entries.iter().filter_map(|e| e.method).collect()
    }
}

/// Count contributors and how many of them are test documents.
pub fn audit_contributors<'a>(
    test_ids: &HashSet<&str>,
    contributors: impl IntoIterator<Item = &'a str>,
) -> (usize, usize) {
    let distinct: HashSet<&str> = contributors.into_iter().collect();
    let leaked = distinct.iter().filter(|id| test_ids.contains(*id)).count();
    (distinct.len(), leaked)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub method: Method,
    pub folds: Vec<FoldResult>,
    pub summary: MetricsSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub methods: Vec<MethodReport>,
    pub audit: LeakageAudit,
}

impl CvReport {
    pub fn method(&self, method: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == method)
    }
}

/// Run stratified k-fold cross-validation of each method on `corpus`.
/// Methods share per-fold statistics (vocabulary, idf, topic model), which
/// are fitted once per fold.
pub fn cross_validate(
    methods: &[Method],
    corpus: &Corpus,
    cfg: &ExperimentConfig,
) -> Result<CvReport> {
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no methods to evaluate".into()));
    }
    let mut unique: Vec<Method> = Vec::with_capacity(methods.len());
    for &m in methods {
        if !unique.contains(&m) {
            unique.push(m);
        }
    }
    let folds = stratified_kfold(
        &corpus.labels(),
        cfg.folds,
        seed::derive(cfg.seed, &[seed::tag("folds")]),
    )?;

    let outcomes: Vec<Result<FoldOutcome>> = folds
        .par_iter()
        .enumerate()
        .map(|(f, test)| run_fold(&unique, corpus, cfg, f, test))
        .collect();

    let mut per_method: Vec<Vec<FoldResult>> = vec![Vec::new(); unique.len()];
    let mut audit = LeakageAudit::default();
    for outcome in outcomes {
        let outcome = outcome?;
        for (slot, result) in per_method.iter_mut().zip(outcome.results) {
            slot.push(result);
        }
        audit.entries.extend(outcome.audit);
    }
    let methods = unique
        .into_iter()
        .zip(per_method)
        .map(|(method, folds)| {
            let ms: Vec<Metrics> = folds.iter().map(|f| f.metrics).collect();
            MethodReport {
                method,
                summary: MetricsSummary::from_folds(&ms),
                folds,
            }
        })
        .collect();
    Ok(CvReport { methods, audit })
}

struct FoldOutcome {
    results: Vec<FoldResult>,
    audit: Vec<AuditEntry>,
}

struct Auditor<'a> {
    enabled: bool,
    fold: usize,
    test_ids: HashSet<&'a str>,
    entries: Vec<AuditEntry>,
}

impl<'a> Auditor<'a> {
    fn record<'b>(
        &mut self,
        method: Option<Method>,
        stage: Stage,
        ids: impl IntoIterator<Item = &'b str>,
    ) {
        if !self.enabled {
            return;
        }
        let (contributors, leaked) = audit_contributors(&self.test_ids, ids);
        self.entries.push(AuditEntry {
            fold: self.fold,
            method,
            stage,
            contributors,
            leaked,
        });
    }
}

/// Statistics fitted on one fold's training slice.
struct FoldStats<'c> {
    train_labels: Vec<Label>,
    test_labels: Vec<Label>,
    test_tokens: Vec<&'c TokenList>,
    train_counts: DocTermMatrix,
    test_counts: DocTermMatrix,
}

fn run_fold(
    methods: &[Method],
    corpus: &Corpus,
    cfg: &ExperimentConfig,
    fold: usize,
    test: &[usize],
) -> Result<FoldOutcome> {
    let docs = corpus.docs();
    let in_test: HashSet<usize> = test.iter().copied().collect();
    let train: Vec<usize> = (0..docs.len()).filter(|i| !in_test.contains(i)).collect();

    let mut auditor = Auditor {
        enabled: cfg.audit,
        fold,
        test_ids: test.iter().map(|&i| docs[i].id.as_str()).collect(),
        entries: Vec::new(),
    };

    let train_tokens: Vec<TokenList> = train.iter().map(|&i| docs[i].tokens.clone()).collect();
    let test_tokens: Vec<TokenList> = test.iter().map(|&i| docs[i].tokens.clone()).collect();
    let train_counts = build_dtm_with_ids(
        train.iter().map(|&i| docs[i].id.clone()).collect(),
        &train_tokens,
    )?;
    auditor.record(
        None,
        Stage::Vocabulary,
        train_counts.doc_ids().iter().map(String::as_str),
    );
    let test_counts = count_matrix(
        test.iter().map(|&i| docs[i].id.clone()).collect(),
        &test_tokens,
        train_counts.vocabulary(),
    )?;
    let stats = FoldStats {
        train_labels: train.iter().map(|&i| docs[i].label).collect(),
        test_labels: test.iter().map(|&i| docs[i].label).collect(),
        test_tokens: test.iter().map(|&i| &docs[i].tokens).collect(),
        train_counts,
        test_counts,
    };

    let fold_seed = |base: u64| seed::derive(base, &[fold as u64]);

    let nb_inputs = if methods
        .iter()
        .any(|m| m.classifier() == Classifier::NaiveBayes)
    {
        let idf = IdfTable::fit(&stats.train_counts)?;
        auditor.record(None, Stage::Idf, idf.fitted_on().iter().map(String::as_str));
        Some((
            idf.apply(&stats.train_counts)?,
            idf.apply(&stats.test_counts)?,
        ))
    } else {
        None
    };

    let svm_inputs = if methods.iter().any(|m| m.classifier() == Classifier::Svm) {
        Some((
            weight_tf(&stats.train_counts)?,
            weight_tf(&stats.test_counts)?,
        ))
    } else {
        None
    };

    let topics = if methods.iter().any(|m| m.uses_topics()) {
        let lda_cfg = LdaConfig {
            seed: fold_seed(cfg.lda.seed),
            ..cfg.lda
        };
        let model = fit_lda(&stats.train_counts, &lda_cfg)?;
        auditor.record(
            None,
            Stage::TopicModel,
            model.doc_ids().iter().map(String::as_str),
        );
        Some(fold_thetas(&model, &stats))
    } else {
        None
    };

    let mut results = Vec::with_capacity(methods.len());
    for &method in methods {
        let predictions = match method.classifier() {
            Classifier::NaiveBayes => {
                let (train_m, test_m) = nb_inputs.as_ref().expect("tf-idf matrices");
                let (train_m, test_m) =
                    select_keywords(method, cfg.n_top_nb, train_m, test_m, &mut auditor)?;
                let model = train_nb(&train_m, &stats.train_labels, cfg.nb_smoothing)?;
                auditor.record(
                    Some(method),
                    Stage::Classifier,
                    train_m.doc_ids().iter().map(String::as_str),
                );
                test_m
                    .rows()
                    .map(|r| predict_nb(&model, &r))
                    .collect::<Vec<_>>()
            }
            Classifier::Svm => {
                let (tf_train, tf_test) = svm_inputs.as_ref().expect("tf matrices");
                let (train_m, test_m) =
                    select_keywords(method, cfg.n_top_svm, tf_train, tf_test, &mut auditor)?;
                let spec = method.feature_spec(cfg);
                let (train_theta, test_theta) = match &topics {
                    Some((a, b)) if spec.use_topics => (Some(a), Some(b)),
                    _ => (None, None),
                };
                let train_x = feature_rows(&train_m, train_theta, &spec)?;
                let test_x = feature_rows(&test_m, test_theta, &spec)?;

                let smote_cfg = SmoteConfig {
                    seed: fold_seed(cfg.smote.seed),
                    ..cfg.smote
                };
                let resampled = smote_oversample(&train_x, &stats.train_labels, &smote_cfg)?;
                let train_ids = train_m.doc_ids();
                auditor.record(
                    Some(method),
                    Stage::Smote,
                    resampled
                        .synthetic
                        .iter()
                        .flat_map(|s| [train_ids[s.base].as_str(), train_ids[s.neighbor].as_str()]),
                );
                let ys: Vec<Sign> = resampled.labels.iter().map(|&l| Sign::from(l)).collect();
                let svm_cfg = SvmConfig {
                    seed: fold_seed(cfg.svm.seed),
                    ..cfg.svm
                };
                let model = train_svm(&resampled.features, &ys, &svm_cfg)?;
                auditor.record(
                    Some(method),
                    Stage::Classifier,
                    train_ids.iter().map(String::as_str).chain(
                        resampled.synthetic.iter().flat_map(|s| {
                            [train_ids[s.base].as_str(), train_ids[s.neighbor].as_str()]
                        }),
                    ),
                );
                test_x
                    .iter()
                    .map(|x| predict_svm(&model, x).map(|(s, _)| Label::from(s)))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let confusion =
            ConfusionMatrix::from_predictions(&stats.test_labels, &predictions, cfg.positive);
        results.push(FoldResult {
            fold,
            confusion,
            metrics: metrics(&confusion)?,
        });
    }
    Ok(FoldOutcome {
        results,
        audit: auditor.entries,
    })
}

/// Training thetas from the final sampler state; test thetas by fold-in.
fn fold_thetas(model: &TopicModel, stats: &FoldStats<'_>) -> (Vec<Theta>, Vec<Theta>) {
    let train = (0..stats.train_counts.n_rows())
        .map(|r| model.training_theta(r))
        .collect();
    let test = stats
        .test_tokens
        .iter()
        .map(|t| model.infer_theta(t))
        .collect();
    (train, test)
}

fn select_keywords(
    method: Method,
    n: usize,
    train: &DocTermMatrix,
    test: &DocTermMatrix,
    auditor: &mut Auditor<'_>,
) -> Result<(DocTermMatrix, DocTermMatrix)> {
    match method {
        Method::NbTopKeywords | Method::SvmTopKeywords | Method::SvmTopKeywordsTopics => {
            let vocab: Vocabulary = select_top_terms(train, n)?;
            auditor.record(
                Some(method),
                Stage::TopTerms,
                train.doc_ids().iter().map(String::as_str),
            );
            Ok((project(train, &vocab), project(test, &vocab)))
        }
        _ => Ok((train.clone(), test.clone())),
    }
}

fn feature_rows(
    m: &DocTermMatrix,
    thetas: Option<&Vec<Theta>>,
    spec: &FeatureSpec,
) -> Result<Vec<Vec<f64>>> {
    (0..m.n_rows())
        .map(|r| assemble_features(&m.row(r), thetas.map(|t| &t[r]), spec))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_keys_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.key().parse::<Method>().unwrap(), m);
        }
        assert!("svm-magic".parse::<Method>().is_err());
    }

    #[test]
    fn feature_specs_follow_table_rows() {
        let cfg = ExperimentConfig::default();
        let s = Method::SvmTopKeywordsTopics.feature_spec(&cfg);
        assert_eq!(
            (s.use_keywords, s.keyword_n, s.use_topics),
            (true, Some(200), true)
        );
        let s = Method::NbTopKeywords.feature_spec(&cfg);
        assert_eq!(s.keyword_n, Some(300));
        let s = Method::SvmTopics.feature_spec(&cfg);
        assert!(!s.use_keywords && s.use_topics);
    }

    #[test]
    fn audit_counts_leaks() {
        let test: HashSet<&str> = ["t1", "t2"].into_iter().collect();
        assert_eq!(audit_contributors(&test, ["a", "b", "a"]), (2, 0));
        assert_eq!(audit_contributors(&test, ["a", "t2", "t2"]), (2, 1));
    }

    #[test]
    fn seeds_are_derived_per_stage() {
        let cfg = ExperimentConfig::default().with_seed(7);
        assert_ne!(cfg.lda.seed, cfg.smote.seed);
        assert_ne!(cfg.smote.seed, cfg.svm.seed);
        assert_eq!(cfg, ExperimentConfig::default().with_seed(7));
    }
}
