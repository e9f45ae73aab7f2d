use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use incparse::treebank::{parse_bracketed_with, ReadOptions};
use incparse::ConstituentTree;

/// Opens `path` for reading; `-` is stdin.
pub fn open(path: &Path) -> Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(Box::new(BufReader::new(file)))
}

/// Output file, or stdout when `path` is `None` or `-`.
pub fn create(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => {
            let file = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

/// Streams trees out of a bracketed file. A tree may span several lines;
/// it ends when its brackets balance.
pub struct TreeReader<R> {
    lines: io::Lines<R>,
    line_no: usize,
    opts: ReadOptions,
    name: String,
}

impl<R: BufRead> TreeReader<R> {
    pub fn new(reader: R, opts: ReadOptions, name: impl Into<String>) -> Self {
        TreeReader { lines: reader.lines(), line_no: 0, opts, name: name.into() }
    }
}

impl<R: BufRead> Iterator for TreeReader<R> {
    type Item = Result<ConstituentTree>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut buf = String::new();
        let mut depth: i64 = 0;
        let mut start = 0;
        loop {
            let line = match self.lines.next() {
                None if buf.trim().is_empty() => return None,
                None => break,
                Some(Err(e)) => return Some(Err(e).context(format!("{}: read error", self.name))),
                Some(Ok(l)) => l,
            };
            self.line_no += 1;
            if buf.trim().is_empty() {
                if line.trim().is_empty() {
                    continue;
                }
                start = self.line_no;
            }
            depth += line.bytes().map(|b| i64::from(b == b'(') - i64::from(b == b')')).sum::<i64>();
            buf.push_str(&line);
            buf.push(' ');
            if depth <= 0 {
                break;
            }
        }
        Some(parse_bracketed_with(buf.trim(), self.opts).with_context(|| format!("{}:{start}: bad tree", self.name)))
    }
}

pub fn read_trees(path: &Path, opts: ReadOptions) -> Result<Vec<ConstituentTree>> {
    TreeReader::new(open(path)?, opts, path.display().to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_line_trees() {
        let text = "(S (NP a)\n   (VP b))\n\n(X c)\n";
        let trees: Vec<_> = TreeReader::new(text.as_bytes(), ReadOptions::default(), "t").collect::<Result<_>>().unwrap();
        assert_eq!(trees.len(), 2);
        assert_eq!(trees[0].to_string(), "(S (NP a) (VP b))");
    }

    #[test]
    fn reports_line_numbers() {
        let text = "(S a)\n(S (NP b)\n";
        let err = TreeReader::new(text.as_bytes(), ReadOptions::default(), "t").nth(1).unwrap().unwrap_err();
        assert!(err.to_string().contains("t:2"), "{err}");
    }
}
