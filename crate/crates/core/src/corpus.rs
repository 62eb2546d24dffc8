use crate::dtm::Vocabulary;
use crate::ingest::LabeledDocument;
use crate::label::Label;
use crate::textprep::{preprocess, StopWords, TokenList};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub tokens: TokenList,
    pub label: Label,
}

/// Labeled, preprocessed documents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    docs: Vec<Document>,
}

impl Corpus {
    pub fn new(docs: Vec<Document>) -> Self {
        Corpus { docs }
    }

    pub fn from_labeled(docs: &[LabeledDocument], stopwords: &StopWords) -> Self {
        Corpus {
            docs: docs
                .iter()
                .map(|d| Document {
                    id: d.doc_id.clone(),
                    tokens: preprocess(&d.text, stopwords),
                    label: d.label,
                })
                .collect(),
        }
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.docs.iter().map(|d| d.label).collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.docs.iter().map(|d| d.id.clone()).collect()
    }

    pub fn tokens(&self) -> Vec<TokenList> {
        self.docs.iter().map(|d| d.tokens.clone()).collect()
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::from_documents(self.docs.iter().map(|d| &d.tokens))
    }

    pub fn count(&self, label: Label) -> usize {
        self.docs.iter().filter(|d| d.label == label).count()
    }
}
