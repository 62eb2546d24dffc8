//! Pipeline configuration files.
//!
//! The format is TOML. Keys may be written dotted (`lda.k = 20`) or grouped
//! under `[lda]` tables; the two spellings are equivalent. Every key is
//! optional except the input paths needed by the command being run, and
//! unknown keys are rejected.
//!
//! ```toml
//! seed = 7
//! methods = ["nb-all", "svm-top-topics"]
//! paths.reviews = "data/reviews.jsonl"
//! paths.inspections = "data/inspections.csv"
//! paths.links = "data/links.csv"
//! paths.output = "out"
//! lda.k = 20
//! cv.folds = 10
//! ```
//!
//! Relative paths are resolved against the directory holding the config
//! file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::eval::{ExperimentConfig, Method, DEFAULT_FOLDS, DEFAULT_TOP_NB, DEFAULT_TOP_SVM};
use crate::ingest::DEFAULT_WINDOW_DAYS;
use crate::label::Label;
use crate::lda::LdaConfig;
use crate::nb::DEFAULT_SMOOTHING;
use crate::smote::SmoteConfig;
use crate::svm::SvmConfig;
use crate::synth::SynthConfig;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    pub reviews: Option<PathBuf>,
    pub inspections: Option<PathBuf>,
    pub links: Option<PathBuf>,
    /// Stopword file, one word per line; the built-in English list if unset.
    pub stopwords: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IngestSection {
    pub window_days: u32,
}

impl Default for IngestSection {
    fn default() -> Self {
        IngestSection {
            window_days: DEFAULT_WINDOW_DAYS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DtmSection {
    pub n_top_nb: usize,
    pub n_top_svm: usize,
}

impl Default for DtmSection {
    fn default() -> Self {
        DtmSection {
            n_top_nb: DEFAULT_TOP_NB,
            n_top_svm: DEFAULT_TOP_SVM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NbSection {
    pub smoothing: f64,
}

impl Default for NbSection {
    fn default() -> Self {
        NbSection {
            smoothing: DEFAULT_SMOOTHING,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LdaSection {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub sweeps: usize,
    pub infer_sweeps: usize,
    /// Number of words per topic in the topic report.
    pub top_words: usize,
}

impl Default for LdaSection {
    fn default() -> Self {
        let d = LdaConfig::default();
        LdaSection {
            k: d.k,
            alpha: d.alpha,
            beta: d.beta,
            sweeps: d.sweeps,
            infer_sweeps: d.infer_sweeps,
            top_words: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoteSection {
    pub k_neighbors: usize,
    pub target: usize,
}

impl Default for SmoteSection {
    fn default() -> Self {
        let d = SmoteConfig::default();
        SmoteSection {
            k_neighbors: d.k_neighbors,
            target: d.target_per_class,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmSection {
    pub c: f64,
    pub tol: f64,
    pub max_epochs: usize,
}

impl Default for SvmSection {
    fn default() -> Self {
        let d = SvmConfig::default();
        SvmSection {
            c: d.c,
            tol: d.tol,
            max_epochs: d.max_epochs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CvSection {
    pub folds: usize,
    /// Positive class for sensitivity and specificity.
    pub positive: String,
    pub audit: bool,
}

impl Default for CvSection {
    fn default() -> Self {
        CvSection {
            folds: DEFAULT_FOLDS,
            positive: Label::Action.name().to_string(),
            audit: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSection {
    pub n_docs: usize,
    pub action_fraction: f64,
    pub cue_strength: f64,
    pub filler_rate: f64,
    pub min_length: usize,
    pub max_length: usize,
    pub reviews_per_business: usize,
    /// Overrides the top-level seed for generation.
    pub seed: Option<u64>,
}

impl Default for SynthSection {
    fn default() -> Self {
        let d = SynthConfig::default();
        SynthSection {
            n_docs: d.n_docs,
            action_fraction: d.action_fraction,
            cue_strength: d.cue_strength,
            filler_rate: d.filler_rate,
            min_length: d.doc_length.0,
            max_length: d.doc_length.1,
            reviews_per_business: d.reviews_per_business,
            seed: None,
        }
    }
}

/// False for NaN.
fn positive(x: f64) -> bool {
    x > 0.0
}

fn all_methods() -> Vec<String> {
    Method::ALL.iter().map(|m| m.key().to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Method keys to evaluate; all seven when unset.
    pub methods: Vec<String>,
    pub paths: Paths,
    pub ingest: IngestSection,
    pub dtm: DtmSection,
    pub nb: NbSection,
    pub lda: LdaSection,
    pub smote: SmoteSection,
    pub svm: SvmSection,
    pub cv: CvSection,
    pub synth: SynthSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            methods: all_methods(),
            paths: Paths::default(),
            ingest: IngestSection::default(),
            dtm: DtmSection::default(),
            nb: NbSection::default(),
            lda: LdaSection::default(),
            smote: SmoteSection::default(),
            svm: SvmSection::default(),
            cv: CvSection::default(),
            synth: SynthSection::default(),
        }
    }
}

impl PipelineConfig {
    /// Parse config text. Relative paths are left as written.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text)
            .map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Read and parse a config file, resolving relative paths against its
    /// directory. A missing or unreadable config file is a config error.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let p = &mut self.paths;
        for slot in [
            &mut p.reviews,
            &mut p.inspections,
            &mut p.links,
            &mut p.stopwords,
            &mut p.output,
        ] {
            if let Some(path) = slot.as_mut() {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
    }

    fn check(&self) -> Result<()> {
        if self.parsed_methods()?.is_empty() {
            return Err(Error::Config(
                "methods: at least one method is required".into(),
            ));
        }
        self.positive()?;
        self.experiment()
            .lda
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.cv.folds < 2 {
            return Err(Error::Config(format!(
                "cv.folds must be at least 2, got {}",
                self.cv.folds
            )));
        }
        if self.dtm.n_top_nb == 0 || self.dtm.n_top_svm == 0 {
            return Err(Error::Config(
                "dtm.n_top_nb and dtm.n_top_svm must be positive".into(),
            ));
        }
        if !positive(self.nb.smoothing) {
            return Err(Error::Config("nb.smoothing must be positive".into()));
        }
        if self.smote.k_neighbors == 0 {
            return Err(Error::Config("smote.k_neighbors must be positive".into()));
        }
        if !positive(self.svm.c) || !positive(self.svm.tol) || self.svm.max_epochs == 0 {
            return Err(Error::Config(
                "svm.c, svm.tol and svm.max_epochs must be positive".into(),
            ));
        }
        if self.lda.top_words == 0 {
            return Err(Error::Config("lda.top_words must be positive".into()));
        }
        Ok(())
    }

    /// Requested methods in the order given.
    pub fn parsed_methods(&self) -> Result<Vec<Method>> {
        self.methods
            .iter()
            .map(|s| s.parse::<Method>().map_err(Error::Config))
            .collect()
    }

    pub fn positive(&self) -> Result<Label> {
        self.cv.positive.parse().map_err(|_| {
            Error::Config(format!("cv.positive: unknown class {:?}", self.cv.positive))
        })
    }

    pub fn lda_config(&self) -> LdaConfig {
        LdaConfig {
            k: self.lda.k,
            alpha: self.lda.alpha,
            beta: self.lda.beta,
            sweeps: self.lda.sweeps,
            infer_sweeps: self.lda.infer_sweeps,
            seed: 0,
        }
    }

    /// Experiment settings with every stage seed derived from `self.seed`.
    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            folds: self.cv.folds,
            n_top_nb: self.dtm.n_top_nb,
            n_top_svm: self.dtm.n_top_svm,
            nb_smoothing: self.nb.smoothing,
            lda: self.lda_config(),
            smote: SmoteConfig {
                k_neighbors: self.smote.k_neighbors,
                target_per_class: self.smote.target,
                seed: 0,
            },
            svm: SvmConfig {
                c: self.svm.c,
                tol: self.svm.tol,
                max_epochs: self.svm.max_epochs,
                seed: 0,
            },
            positive: self.positive().unwrap_or(Label::Action),
            seed: 0,
            audit: self.cv.audit,
        }
        .with_seed(self.seed)
    }

    pub fn synth_config(&self) -> SynthConfig {
        let s = &self.synth;
        SynthConfig {
            n_docs: s.n_docs,
            action_fraction: s.action_fraction,
            cue_strength: s.cue_strength,
            filler_rate: s.filler_rate,
            doc_length: (s.min_length, s.max_length),
            reviews_per_business: s.reviews_per_business,
            seed: s.seed.unwrap_or(self.seed),
            ..SynthConfig::default()
        }
    }

    /// A required path, or a config error naming the missing key.
    pub fn require(&self, key: &str) -> Result<&Path> {
        let p = &self.paths;
        let slot = match key {
            "reviews" => &p.reviews,
            "inspections" => &p.inspections,
            "links" => &p.links,
            "output" => &p.output,
            "stopwords" => &p.stopwords,
            _ => return Err(Error::Config(format!("unknown path key {key}"))),
        };
        slot.as_deref()
            .ok_or_else(|| Error::Config(format!("paths.{key} is required")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_has_defaults() {
        let cfg = PipelineConfig::parse("").unwrap();
        assert_eq!(cfg.parsed_methods().unwrap(), Method::ALL.to_vec());
        assert_eq!(cfg.dtm.n_top_nb, 300);
        assert_eq!(cfg.dtm.n_top_svm, 200);
        assert_eq!(cfg.lda.k, 20);
        assert_eq!(cfg.lda.alpha, 3.5);
        assert_eq!(cfg.smote.k_neighbors, 5);
        assert_eq!(cfg.smote.target, 900);
        assert_eq!(cfg.cv.folds, 10);
        assert_eq!(cfg.ingest.window_days, 365);
        assert_eq!(cfg.positive().unwrap(), Label::Action);
    }

    #[test]
    fn dotted_and_table_keys_agree() {
        let dotted =
            PipelineConfig::parse("lda.k = 4\nsvm.c = 0.5\npaths.output = \"out\"").unwrap();
        let tables =
            PipelineConfig::parse("[lda]\nk = 4\n[svm]\nc = 0.5\n[paths]\noutput = \"out\"")
                .unwrap();
        assert_eq!(dotted, tables);
        assert_eq!(dotted.lda.k, 4);
    }

    #[test]
    fn unknown_keys_rejected() {
        for text in ["colour = 1", "lda.kk = 3", "[paths]\nreview = \"x\""] {
            assert!(
                matches!(PipelineConfig::parse(text), Err(Error::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn invalid_values_rejected() {
        for text in [
            "methods = [\"svm-everything\"]",
            "methods = []",
            "cv.folds = 1",
            "lda.k = 0",
            "cv.positive = \"maybe\"",
            "svm.c = -1.0",
            "lda.k = \"twenty\"",
        ] {
            let err = PipelineConfig::parse(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
    }

    #[test]
    fn seeds_are_derived_per_stage() {
        let a = PipelineConfig::parse("seed = 1").unwrap().experiment();
        let b = PipelineConfig::parse("seed = 2").unwrap().experiment();
        assert_ne!(a.lda.seed, b.lda.seed);
        assert_ne!(a.lda.seed, a.svm.seed);
    }

    #[test]
    fn relative_paths_resolve_against_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "paths.reviews = \"r.jsonl\"\npaths.output = \"/abs/out\"",
        )
        .unwrap();
        let cfg = PipelineConfig::load(&path).unwrap();
        assert_eq!(cfg.paths.reviews.unwrap(), dir.path().join("r.jsonl"));
        assert_eq!(cfg.paths.output.unwrap(), PathBuf::from("/abs/out"));
        assert!(matches!(
            PipelineConfig::load(dir.path().join("nope.toml")),
            Err(Error::Config(_))
        ));
    }
}
