//! Report files written by a pipeline run.
//!
//! | file          | content                                                  |
//! |---------------|----------------------------------------------------------|
//! | `summary.csv` | one row per method, `mean (sd)` percentage cells         |
//! | `summary.txt` | the same table with aligned columns                      |
//! | `folds.csv`   | `fold,method,accuracy,kappa,sensitivity,specificity`     |
//! | `topics.txt`  | `topic_id: w1,w2,...`, only when a topic model was fitted |
//! | `audit.csv`   | leakage audit entries, only when auditing                |
//!
//! Undefined values are written as `NA`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::{LeakageAudit, MethodReport, Stat};
use crate::lda::write_topic_report;

pub const SUMMARY_CSV: &str = "summary.csv";
pub const SUMMARY_TXT: &str = "summary.txt";
pub const FOLDS_CSV: &str = "folds.csv";
pub const TOPICS_TXT: &str = "topics.txt";
pub const AUDIT_CSV: &str = "audit.csv";

const NA: &str = "NA";
const HEADERS: [&str; 4] = ["accuracy", "kappa", "sensitivity", "specificity"];

/// Render a proportion as a percentage with two decimals, rounding half up
/// and padding the integer part to two digits: `0.90823` gives `90.82%`.
pub fn format_percent(x: f64) -> String {
    // the nudge absorbs binary representation error so that decimal halves
    // such as 0.12345 round up
    let hundredths = (x * 10_000.0 + 0.5 + 1e-9).floor() as i64;
    let sign = if hundredths < 0 { "-" } else { "" };
    let h = hundredths.unsigned_abs();
    format!("{sign}{:02}.{:02}%", h / 100, h % 100)
}

/// `mean (sd)` cell, e.g. `90.82% (13.46%)`.
pub fn format_cell(stat: &Stat) -> String {
    let show = |v: Option<f64>| v.map(format_percent).unwrap_or_else(|| NA.to_string());
    format!("{} ({})", show(stat.mean), show(stat.sd))
}

fn raw(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| NA.to_string())
}

pub fn render_summary_csv(reports: &[MethodReport]) -> String {
    let mut out = String::from("method,accuracy,kappa,sensitivity,specificity\n");
    for r in reports {
        out.push_str(r.method.key());
        for (_, stat) in r.summary.columns() {
            out.push(',');
            out.push_str(&format_cell(&stat));
        }
        out.push('\n');
    }
    out
}

pub fn render_summary_txt(reports: &[MethodReport]) -> String {
    let mut rows: Vec<Vec<String>> = vec![std::iter::once("method")
        .chain(HEADERS)
        .map(str::to_string)
        .collect()];
    for r in reports {
        let mut row = vec![r.method.title().to_string()];
        row.extend(r.summary.columns().iter().map(|(_, s)| format_cell(s)));
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                let _ = write!(line, "{cell:<w$}", w = widths[c]);
            } else {
                let _ = write!(line, "  {cell:>w$}", w = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn render_folds_csv(reports: &[MethodReport]) -> String {
    let mut out = String::from("fold,method,accuracy,kappa,sensitivity,specificity\n");
    for r in reports {
        for f in &r.folds {
            let m = &f.metrics;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                f.fold,
                r.method.key(),
                m.accuracy,
                m.kappa,
                raw(m.sensitivity),
                raw(m.specificity)
            );
        }
    }
    out
}

pub fn render_topics(topics: &[Vec<String>]) -> String {
    let mut buf = Vec::new();
    write_topic_report(topics, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("topic words are utf-8")
}

pub fn render_audit_csv(audit: &LeakageAudit) -> String {
    let mut out = String::from("fold,method,stage,contributors,leaked\n");
    for e in &audit.entries {
        let method = e.method.map(|m| m.key()).unwrap_or("*");
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.fold, method, e.stage, e.contributors, e.leaked
        );
    }
    out
}

/// Everything one report consists of.
#[derive(Debug, Clone, Copy)]
pub struct ReportInput<'a> {
    pub methods: &'a [MethodReport],
    pub topics: Option<&'a [Vec<String>]>,
    pub audit: Option<&'a LeakageAudit>,
}

/// Write the report files into `out_dir`, creating it if needed, and return
/// the paths written. Nothing is written when `methods` is empty.
pub fn emit_report(input: ReportInput<'_>, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    if input.methods.is_empty() {
        return Err(Error::InvalidArgument(
            "no method summaries to report".into(),
        ));
    }
    let mut files = vec![
        (SUMMARY_CSV, render_summary_csv(input.methods)),
        (SUMMARY_TXT, render_summary_txt(input.methods)),
        (FOLDS_CSV, render_folds_csv(input.methods)),
    ];
    if let Some(topics) = input.topics {
        files.push((TOPICS_TXT, render_topics(topics)));
    }
    if let Some(audit) = input.audit {
        files.push((AUDIT_CSV, render_audit_csv(audit)));
    }

    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| Error::Report {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::with_capacity(files.len());
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content).map_err(|source| Error::Report {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{metrics, ConfusionMatrix, FoldResult, Method, MetricsSummary};

    #[test]
    fn percent_rounding() {
        assert_eq!(format_percent(0.90823), "90.82%");
        assert_eq!(format_percent(0.90825), "90.83%");
        assert_eq!(format_percent(0.12345), "12.35%");
        assert_eq!(format_percent(0.0165), "01.65%");
        assert_eq!(format_percent(1.0), "100.00%");
        assert_eq!(format_percent(0.0), "00.00%");
        assert_eq!(format_percent(-0.05), "-05.00%");
    }

    fn report(method: Method, cms: &[ConfusionMatrix]) -> MethodReport {
        let folds: Vec<FoldResult> = cms
            .iter()
            .enumerate()
            .map(|(fold, cm)| FoldResult {
                fold,
                confusion: *cm,
                metrics: metrics(cm).unwrap(),
            })
            .collect();
        let summary =
            MetricsSummary::from_folds(&folds.iter().map(|f| f.metrics).collect::<Vec<_>>());
        MethodReport {
            method,
            folds,
            summary,
        }
    }

    #[test]
    fn cells_and_tables() {
        let a = report(
            Method::SvmTopKeywordsTopics,
            &[
                ConfusionMatrix::new(40, 10, 5, 45),
                ConfusionMatrix::new(45, 5, 10, 40),
            ],
        );
        let b = report(Method::NbAllKeywords, &[ConfusionMatrix::new(0, 0, 3, 7)]);
        let csv = render_summary_csv(&[a.clone(), b.clone()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "method,accuracy,kappa,sensitivity,specificity");
        assert_eq!(
            lines[1],
            "svm-top-topics,85.00% (00.00%),70.00% (00.00%),85.00% (07.07%),85.00% (07.07%)"
        );
        assert_eq!(
            lines[2],
            "nb-all,70.00% (NA),00.00% (NA),NA (NA),70.00% (NA)"
        );

        let txt = render_summary_txt(&[a, b]);
        let widths: Vec<usize> = txt.lines().map(str::len).collect();
        assert!(txt
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("SVM, top keywords + topics"));
        // right-aligned last column: every line ends at the same column
        assert!(widths.iter().all(|&w| w == widths[0]), "{txt}");
    }

    #[test]
    fn empty_method_list_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let input = ReportInput {
            methods: &[],
            topics: None,
            audit: None,
        };
        assert!(emit_report(input, &out).is_err());
        assert!(!out.exists());
    }

    #[test]
    fn topics_file_only_with_topics() {
        let dir = tempfile::tempdir().unwrap();
        let r = [report(
            Method::NbAllKeywords,
            &[ConfusionMatrix::new(3, 1, 1, 3)],
        )];
        let input = ReportInput {
            methods: &r,
            topics: None,
            audit: None,
        };
        emit_report(input, dir.path()).unwrap();
        assert!(dir.path().join(SUMMARY_CSV).exists());
        assert!(dir.path().join(FOLDS_CSV).exists());
        assert!(!dir.path().join(TOPICS_TXT).exists());

        let topics = vec![vec!["sushi".to_string(), "tuna".to_string()]];
        let input = ReportInput {
            topics: Some(&topics),
            ..input
        };
        emit_report(input, dir.path()).unwrap();
        assert_eq!(
            fs::read_to_string(dir.path().join(TOPICS_TXT)).unwrap(),
            "0: sushi,tuna\n"
        );
    }

    #[test]
    fn unwritable_directory_is_a_report_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let r = [report(
            Method::NbAllKeywords,
            &[ConfusionMatrix::new(3, 1, 1, 3)],
        )];
        let input = ReportInput {
            methods: &r,
            topics: None,
            audit: None,
        };
        let err = emit_report(input, blocker.join("sub")).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
