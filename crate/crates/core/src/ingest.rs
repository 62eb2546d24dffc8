//! Loading review, inspection and link records, and turning reviews into
//! labeled documents.
//!
//! File formats:
//!
//! * reviews: JSON lines, one object per line with `review_id`,
//!   `business_id`, `date` (ISO-8601 `YYYY-MM-DD`), `text` and an optional
//!   integer `stars`;
//! * inspections: CSV with header `facility_id,date,action`, where `action`
//!   is one of `Y`, `N`, `true`, `false`, `1`, `0`;
//! * links: CSV with header `business_id,facility_id`.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::Label;

pub const DEFAULT_WINDOW_DAYS: u32 = 365;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawReview {
    pub review_id: String,
    pub business_id: String,
    pub date: NaiveDate,
    pub text: String,
    pub stars: Option<u8>,
}

impl RawReview {
    pub fn has_empty_text(&self) -> bool {
        self.text.trim().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InspectionRecord {
    pub facility_id: String,
    pub date: NaiveDate,
    /// `true` when the inspection found non-compliance.
    pub action: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FacilityLink {
    pub business_id: String,
    pub facility_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDocument {
    pub doc_id: String,
    pub text: String,
    pub label: Label,
    pub business_id: String,
}

/// Result of [`link_and_label`]: the labeled documents plus a tally of the
/// reviews that could not be labeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub documents: Vec<LabeledDocument>,
    /// Reviews whose business has no facility link.
    pub dropped_unlinked: usize,
    /// Linked reviews with no inspection inside the window.
    pub dropped_unmatched: usize,
}

impl Labeling {
    pub fn dropped(&self) -> usize {
        self.dropped_unlinked + self.dropped_unmatched
    }
}

#[derive(Deserialize)]
struct ReviewLine {
    review_id: Option<String>,
    business_id: Option<String>,
    date: Option<String>,
    text: Option<String>,
    stars: Option<u8>,
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub fn load_reviews(path: impl AsRef<Path>) -> Result<Vec<RawReview>> {
    let path = path.as_ref();
    read_reviews(BufReader::new(open(path)?)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parse reviews from any line-oriented reader. Blank lines are skipped.
pub fn read_reviews(reader: impl BufRead) -> Result<Vec<RawReview>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io("<reviews>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ReviewLine = serde_json::from_str(&line)
            .map_err(|e| Error::Format(format!("line {lineno}: {e}")))?;
        let missing = |field: &str| Error::Format(format!("line {lineno}: missing field {field}"));
        let review_id = rec.review_id.ok_or_else(|| missing("review_id"))?;
        let business_id = rec.business_id.ok_or_else(|| missing("business_id"))?;
        let date = rec.date.ok_or_else(|| missing("date"))?;
        let text = rec.text.ok_or_else(|| missing("text"))?;
        if review_id.is_empty() {
            return Err(Error::Format(format!("line {lineno}: empty review_id")));
        }
        let date = parse_date(&date)
            .ok_or_else(|| Error::Format(format!("line {lineno}: invalid date {date:?}")))?;
        if let Some(s) = rec.stars {
            if !(1..=5).contains(&s) {
                return Err(Error::Format(format!(
                    "line {lineno}: stars out of range: {s}"
                )));
            }
        }
        if !seen.insert(review_id.clone()) {
            return Err(Error::Format(format!(
                "line {lineno}: duplicate review_id {review_id}"
            )));
        }
        out.push(RawReview {
            review_id,
            business_id,
            date,
            text,
            stars: rec.stars,
        });
    }
    let empty = out.iter().filter(|r| r.has_empty_text()).count();
    if empty > 0 {
        log::warn!("{empty} review(s) have empty text");
    }
    Ok(out)
}

fn parse_action(s: &str) -> Option<bool> {
    match s.trim() {
        "Y" | "y" | "true" | "TRUE" | "True" | "1" => Some(true),
        "N" | "n" | "false" | "FALSE" | "False" | "0" => Some(false),
        _ => None,
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn check_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = rdr
        .headers()
        .map_err(|e| Error::Format(format!("header: {e}")))?;
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(Error::Format(format!(
            "header: expected {}, found {}",
            expected.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

pub fn load_inspections(path: impl AsRef<Path>) -> Result<Vec<InspectionRecord>> {
    let path = path.as_ref();
    read_inspections(open(path)?)
}

/// Parse inspections from CSV. Rows are numbered from 1, not counting the
/// header.
pub fn read_inspections(reader: impl Read) -> Result<Vec<InspectionRecord>> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, &["facility_id", "date", "action"])?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Format(format!("row {row}: {e}")))?;
        let facility_id = rec[0].to_string();
        if facility_id.is_empty() {
            return Err(Error::Format(format!("row {row}: empty facility_id")));
        }
        let date =
            parse_date(&rec[1]).ok_or_else(|| Error::Format(format!("row {row}: invalid date")))?;
        let action = parse_action(&rec[2]).ok_or_else(|| {
            Error::Format(format!("row {row}: unknown action value {:?}", &rec[2]))
        })?;
        out.push(InspectionRecord {
            facility_id,
            date,
            action,
        });
    }
    Ok(out)
}

pub fn load_links(path: impl AsRef<Path>) -> Result<Vec<FacilityLink>> {
    let path = path.as_ref();
    read_links(open(path)?)
}

pub fn read_links(reader: impl Read) -> Result<Vec<FacilityLink>> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, &["business_id", "facility_id"])?;
    let mut out = Vec::new();
    let mut by_business: HashMap<String, String> = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Format(format!("row {row}: {e}")))?;
        let link = FacilityLink {
            business_id: rec[0].to_string(),
            facility_id: rec[1].to_string(),
        };
        if link.business_id.is_empty() || link.facility_id.is_empty() {
            return Err(Error::Format(format!("row {row}: empty id")));
        }
        if let Some(existing) = by_business.get(&link.business_id) {
            return Err(Error::Format(if *existing == link.facility_id {
                format!(
                    "row {row}: duplicate link {} -> {}",
                    link.business_id, link.facility_id
                )
            } else {
                format!(
                    "row {row}: business {} already linked to facility {existing}",
                    link.business_id
                )
            }));
        }
        by_business.insert(link.business_id.clone(), link.facility_id.clone());
        out.push(link);
    }
    Ok(out)
}

/// Label each review by the first inspection of its linked facility that
/// falls on or after the review date and no more than `window_days` later.
///
/// When several inspections share that date, any action flag among them
/// makes the label `Action`. Output preserves review order.
pub fn link_and_label(
    reviews: &[RawReview],
    inspections: &[InspectionRecord],
    links: &[FacilityLink],
    window_days: u32,
) -> Result<Labeling> {
    if links.is_empty() {
        return Err(Error::NoLinks);
    }
    let facility_of: HashMap<&str, &str> = links
        .iter()
        .map(|l| (l.business_id.as_str(), l.facility_id.as_str()))
        .collect();

    let mut timeline: HashMap<&str, Vec<(NaiveDate, bool)>> = HashMap::new();
    for ins in inspections {
        timeline
            .entry(ins.facility_id.as_str())
            .or_default()
            .push((ins.date, ins.action));
    }
    for events in timeline.values_mut() {
        // (date, action) sort puts `true` after `false` on the same date
        events.sort();
    }

    let mut labeling = Labeling {
        documents: Vec::new(),
        dropped_unlinked: 0,
        dropped_unmatched: 0,
    };
    let window = chrono::Duration::days(i64::from(window_days));
    for review in reviews {
        let Some(facility) = facility_of.get(review.business_id.as_str()) else {
            labeling.dropped_unlinked += 1;
            continue;
        };
        let events = timeline.get(facility).map(Vec::as_slice).unwrap_or(&[]);
        let start = events.partition_point(|(d, _)| *d < review.date);
        let action = match events.get(start) {
            Some(&(first, _)) if first - review.date <= window => events[start..]
                .iter()
                .take_while(|(d, _)| *d == first)
                .any(|&(_, a)| a),
            _ => {
                labeling.dropped_unmatched += 1;
                continue;
            }
        };
        labeling.documents.push(LabeledDocument {
            doc_id: review.review_id.clone(),
            text: review.text.clone(),
            label: if action {
                Label::Action
            } else {
                Label::NoAction
            },
            business_id: review.business_id.clone(),
        });
    }
    Ok(labeling)
}
