//! Sparse document-term matrices under count, term-frequency and tf-idf
//! weighting, top-N term selection, and vocabulary projection.
//!
//! Rows are documents, columns are vocabulary terms. Storage is compressed
//! sparse rows; explicit zeros are never stored.
//!
//! With `count(t, d)` the occurrences of term `t` in document `d`:
//!
//! ```text
//! tf(t, d)    = count(t, d) / Σ_t' count(t', d)      (0 for an empty document)
//! idf(t, D)   = ln(|D| / df(t)),   df(t) = #{d ∈ D : count(t, d) > 0}
//! tfidf(t, d) = tf(t, d) · idf(t, D)
//! ```

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::textprep::TokenList;

/// Terms in lexicographic order, each mapped to its column.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Deduplicates and sorts.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let terms: Vec<String> = terms
            .into_iter()
            .map(Into::into)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary { terms, index }
    }

    /// Union of all tokens in `docs`.
    pub fn from_documents<'a>(docs: impl IntoIterator<Item = &'a TokenList>) -> Self {
        Self::from_terms(docs.into_iter().flat_map(|d| d.iter()))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, col: usize) -> &str {
        &self.terms[col]
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.index.contains_key(term)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    Count,
    Tf,
    TfIdf,
}

/// Borrowed view of one matrix row.
#[derive(Debug, Clone, Copy)]
pub struct SparseRow<'a> {
    pub indices: &'a [usize],
    pub values: &'a [f64],
    pub dim: usize,
}

impl<'a> SparseRow<'a> {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (c, v) in self.iter() {
            out[c] = v;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocTermMatrix {
    doc_ids: Vec<String>,
    vocabulary: Vocabulary,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    scheme: Weighting,
}

impl DocTermMatrix {
    fn from_rows(
        doc_ids: Vec<String>,
        vocabulary: Vocabulary,
        rows: impl IntoIterator<Item = Vec<(usize, f64)>>,
        scheme: Weighting,
    ) -> Self {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if v != 0.0 {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        debug_assert_eq!(indptr.len(), doc_ids.len() + 1);
        DocTermMatrix {
            doc_ids,
            vocabulary,
            indptr,
            indices,
            values,
            scheme,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn scheme(&self) -> Weighting {
        self.scheme
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn row(&self, i: usize) -> SparseRow<'_> {
        let span = self.indptr[i]..self.indptr[i + 1];
        SparseRow {
            indices: &self.indices[span.clone()],
            values: &self.values[span],
            dim: self.n_cols(),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = SparseRow<'_>> {
        (0..self.n_rows()).map(|i| self.row(i))
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let r = self.row(row);
        r.indices
            .binary_search(&col)
            .map(|k| r.values[k])
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_dense()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_cols()];
        for (&c, &v) in self.indices.iter().zip(&self.values) {
            sums[c] += v;
        }
        sums
    }

    /// Number of documents in which each term occurs.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0; self.n_cols()];
        for &c in &self.indices {
            df[c] += 1;
        }
        df
    }

    fn expect_scheme(&self, scheme: Weighting) -> Result<()> {
        if self.scheme == scheme {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "expected a {scheme:?} matrix, found {:?}",
                self.scheme
            )))
        }
    }

    /// Write `doc_id term weight` triplets, one stored entry per line.
    pub fn write_triplets(&self, mut w: impl Write) -> io::Result<()> {
        for (i, id) in self.doc_ids.iter().enumerate() {
            for (c, v) in self.row(i).iter() {
                writeln!(w, "{id} {} {v}", self.vocabulary.term(c))?;
            }
        }
        Ok(())
    }
}

/// Count matrix over the union vocabulary; documents are identified by
/// their position.
pub fn build_dtm(docs: &[TokenList]) -> Result<DocTermMatrix> {
    let ids = (0..docs.len()).map(|i| i.to_string()).collect();
    build_dtm_with_ids(ids, docs)
}

pub fn build_dtm_with_ids(doc_ids: Vec<String>, docs: &[TokenList]) -> Result<DocTermMatrix> {
    let vocabulary = Vocabulary::from_documents(docs);
    if vocabulary.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    count_matrix(doc_ids, docs, &vocabulary)
}

/// Count matrix over a fixed vocabulary. Tokens outside it are dropped.
pub fn count_matrix(
    doc_ids: Vec<String>,
    docs: &[TokenList],
    vocabulary: &Vocabulary,
) -> Result<DocTermMatrix> {
    if doc_ids.len() != docs.len() {
        return Err(Error::DimensionMismatch {
            expected: docs.len(),
            found: doc_ids.len(),
        });
    }
    let rows = docs.iter().map(|doc| {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for col in doc.iter().filter_map(|t| vocabulary.position(t)) {
            *counts.entry(col).or_default() += 1.0;
        }
        counts.into_iter().collect::<Vec<_>>()
    });
    Ok(DocTermMatrix::from_rows(
        doc_ids,
        vocabulary.clone(),
        rows,
        Weighting::Count,
    ))
}

fn tf_rows(m: &DocTermMatrix) -> impl Iterator<Item = Vec<(usize, f64)>> + '_ {
    m.rows().map(|r| {
        let total = r.sum();
        r.iter().map(|(c, v)| (c, v / total)).collect()
    })
}

pub fn weight_tf(m: &DocTermMatrix) -> Result<DocTermMatrix> {
    m.expect_scheme(Weighting::Count)?;
    Ok(DocTermMatrix::from_rows(
        m.doc_ids.clone(),
        m.vocabulary.clone(),
        tf_rows(m),
        Weighting::Tf,
    ))
}

/// Inverse document frequencies fitted on one count matrix, applicable to
/// any count matrix over the same vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct IdfTable {
    vocabulary: Vocabulary,
    idf: Vec<f64>,
    fitted_on: Vec<String>,
}

impl IdfTable {
    pub fn fit(m: &DocTermMatrix) -> Result<Self> {
        m.expect_scheme(Weighting::Count)?;
        if m.n_rows() == 0 {
            return Err(Error::EmptyCorpus);
        }
        let n = m.n_rows() as f64;
        let idf = m
            .document_frequencies()
            .into_iter()
            .map(|df| if df == 0 { 0.0 } else { (n / df as f64).ln() })
            .collect();
        Ok(IdfTable {
            vocabulary: m.vocabulary.clone(),
            idf,
            fitted_on: m.doc_ids.clone(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.idf
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.vocabulary.position(term).map(|c| self.idf[c])
    }

    /// Documents whose counts produced these statistics.
    pub fn fitted_on(&self) -> &[String] {
        &self.fitted_on
    }

    pub fn apply(&self, m: &DocTermMatrix) -> Result<DocTermMatrix> {
        m.expect_scheme(Weighting::Count)?;
        if m.vocabulary != self.vocabulary {
            return Err(Error::InvalidArgument(
                "idf table and matrix have different vocabularies".into(),
            ));
        }
        let rows = tf_rows(m).map(|row| {
            row.into_iter()
                .map(|(c, tf)| (c, tf * self.idf[c]))
                .collect()
        });
        Ok(DocTermMatrix::from_rows(
            m.doc_ids.clone(),
            m.vocabulary.clone(),
            rows,
            Weighting::TfIdf,
        ))
    }
}

pub fn weight_tfidf(m: &DocTermMatrix) -> Result<DocTermMatrix> {
    IdfTable::fit(m)?.apply(m)
}

/// The `n` terms with the largest column sums (ties broken
/// lexicographically), returned as a vocabulary. Requires a weighted matrix.
pub fn select_top_terms(m: &DocTermMatrix, n: usize) -> Result<Vocabulary> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "top-term count must be at least 1".into(),
        ));
    }
    if m.scheme == Weighting::Count {
        return Err(Error::InvalidArgument(
            "top-term selection needs a Tf or TfIdf matrix".into(),
        ));
    }
    let sums = m.column_sums();
    let mut cols: Vec<usize> = (0..m.n_cols()).collect();
    // vocabulary columns are already in lexicographic order
    cols.sort_by(|&a, &b| {
        sums[b]
            .partial_cmp(&sums[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    cols.truncate(n);
    Ok(Vocabulary::from_terms(
        cols.into_iter().map(|c| m.vocabulary.term(c)),
    ))
}

/// Restrict and reorder columns to `vocabulary`. Terms the matrix does not
/// know become all-zero columns.
pub fn project(m: &DocTermMatrix, vocabulary: &Vocabulary) -> DocTermMatrix {
    let map: Vec<Option<usize>> = m
        .vocabulary
        .terms()
        .iter()
        .map(|t| vocabulary.position(t))
        .collect();
    let rows = m.rows().map(|r| {
        r.iter()
            .filter_map(|(c, v)| map[c].map(|nc| (nc, v)))
            .collect::<Vec<_>>()
    });
    DocTermMatrix::from_rows(m.doc_ids.clone(), vocabulary.clone(), rows, m.scheme)
}
