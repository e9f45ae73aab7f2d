//! Label files: one `token<TAB>pos<TAB>label` row per token, blank line between sentences.

use std::io::BufRead;

use super::{SlError, SlLabel};
use crate::treebank::Sentence;

/// One sentence read from a label file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelBlock {
    pub sentence: Sentence,
    pub labels: Vec<SlLabel>,
}

pub fn format_sentence(sentence: &Sentence, labels: &[SlLabel]) -> String {
    let mut out = String::new();
    for (i, (token, label)) in sentence.tokens.iter().zip(labels).enumerate() {
        out.push_str(token);
        out.push('\t');
        out.push_str(sentence.pos(i).unwrap_or("_"));
        out.push('\t');
        out.push_str(&label.to_string());
        out.push('\n');
    }
    out
}

/// Streams [`LabelBlock`]s out of a reader.
pub struct LabelFileReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> LabelFileReader<R> {
    pub fn new(reader: R) -> Self {
        LabelFileReader { lines: reader.lines(), line_no: 0 }
    }

    fn finish(tokens: Vec<String>, tags: Vec<String>, labels: Vec<SlLabel>) -> LabelBlock {
        let pos_tags = if tags.iter().all(|t| t == "_") { None } else { Some(tags) };
        LabelBlock { sentence: Sentence { tokens, pos_tags }, labels }
    }
}

impl<R: BufRead> Iterator for LabelFileReader<R> {
    type Item = Result<LabelBlock, SlError>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut tokens = Vec::new();
        let mut tags = Vec::new();
        let mut labels = Vec::new();
        loop {
            let line = match self.lines.next() {
                None => break,
                Some(Err(e)) => return Some(Err(SlError::BadFile { line: self.line_no + 1, message: e.to_string() })),
                Some(Ok(line)) => line,
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                if tokens.is_empty() {
                    continue;
                }
                break;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [token, pos, label] = cols.as_slice() else {
                return Some(Err(SlError::BadFile {
                    line: self.line_no,
                    message: format!("expected 3 tab-separated columns, found {}", cols.len()),
                }));
            };
            let label = match label.parse::<SlLabel>() {
                Ok(l) => l,
                Err(e) => return Some(Err(SlError::BadFile { line: self.line_no, message: e.to_string() })),
            };
            tokens.push(token.to_string());
            tags.push(pos.to_string());
            labels.push(label);
        }
        if tokens.is_empty() {
            None
        } else {
            Some(Ok(Self::finish(tokens, tags, labels)))
        }
    }
}
