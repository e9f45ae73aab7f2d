use super::{ConstituentTree, Sentence, TreeNode, TreebankError};

/// Options for reading bracketed trees.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReadOptions {
    /// Move a fully tagged preterminal layer (`(DT the)`) into `Sentence::pos_tags`.
    /// Trees where some token is not wrapped in its own preterminal are read as-is.
    pub strip_preterminals: bool,
}

pub fn escape_token(token: &str) -> String {
    match token {
        "(" => "-LRB-".to_string(),
        ")" => "-RRB-".to_string(),
        _ => token.replace('(', "-LRB-").replace(')', "-RRB-"),
    }
}

pub fn unescape_token(token: &str) -> String {
    token.replace("-LRB-", "(").replace("-RRB-", ")")
}

#[derive(Debug, PartialEq)]
enum Lexeme<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(line: &str) -> Vec<(usize, Lexeme<'_>)> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push((i, Lexeme::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Lexeme::Close));
                i += 1;
            }
            b if b.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !matches!(bytes[i], b'(' | b')') && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                out.push((start, Lexeme::Atom(&line[start..i])));
            }
        }
    }
    out
}

enum Raw {
    Node { label: String, offset: usize, children: Vec<Raw> },
    Token(String),
}

struct Reader<'a> {
    lexemes: Vec<(usize, Lexeme<'a>)>,
    pos: usize,
    end: usize,
}

impl<'a> Reader<'a> {
    fn node(&mut self) -> Result<Raw, TreebankError> {
        let (open, _) = self.lexemes[self.pos];
        self.pos += 1;
        let label = match self.lexemes.get(self.pos) {
            Some((_, Lexeme::Atom(a))) => {
                self.pos += 1;
                a.to_string()
            }
            Some((_, Lexeme::Close)) => return Err(TreebankError::EmptyConstituent { offset: open }),
            Some((_, Lexeme::Open)) => String::new(),
            None => return Err(TreebankError::UnbalancedBrackets { offset: self.end }),
        };
        let mut children = Vec::new();
        loop {
            match self.lexemes.get(self.pos) {
                None => return Err(TreebankError::UnbalancedBrackets { offset: self.end }),
                Some((_, Lexeme::Close)) => {
                    self.pos += 1;
                    break;
                }
                Some((_, Lexeme::Open)) => children.push(self.node()?),
                Some((_, Lexeme::Atom(a))) => {
                    children.push(Raw::Token(unescape_token(a)));
                    self.pos += 1;
                }
            }
        }
        if children.is_empty() {
            return Err(TreebankError::EmptyConstituent { offset: open });
        }
        Ok(Raw::Node { label, offset: open, children })
    }
}

/// Parses one bracketed tree, e.g. `(S (NP the dog) (VP barks))`.
pub fn parse_bracketed(line: &str) -> Result<ConstituentTree, TreebankError> {
    parse_bracketed_with(line, ReadOptions::default())
}

pub fn parse_bracketed_with(line: &str, opts: ReadOptions) -> Result<ConstituentTree, TreebankError> {
    let lexemes = lex(line);
    let end = line.len();
    match lexemes.first() {
        None => return Err(TreebankError::NoTerminals { offset: 0 }),
        Some((_, Lexeme::Open)) => {}
        Some((off, Lexeme::Close)) => return Err(TreebankError::UnbalancedBrackets { offset: *off }),
        Some((off, Lexeme::Atom(_))) => return Err(TreebankError::NoTerminals { offset: *off }),
    }
    let mut reader = Reader { lexemes, pos: 0, end };
    let mut raw = reader.node()?;
    if let Some((off, lexeme)) = reader.lexemes.get(reader.pos) {
        return Err(match lexeme {
            Lexeme::Close => TreebankError::UnbalancedBrackets { offset: *off },
            _ => TreebankError::TrailingInput { offset: *off },
        });
    }

    // PTB-style "( (S ...) )" wrappers carry no label.
    loop {
        match raw {
            Raw::Node { ref label, ref mut children, .. } if label.is_empty() => {
                if children.len() == 1 && matches!(children[0], Raw::Node { .. }) {
                    raw = children.pop().unwrap();
                } else {
                    return Err(TreebankError::Invalid("unlabeled constituent".into()));
                }
            }
            _ => break,
        }
    }

    let strip = opts.strip_preterminals && fully_tagged(&raw, true);
    let mut tokens = Vec::new();
    let mut tags = Vec::new();
    let root = convert(raw, strip, &mut tokens, &mut tags)?;
    if tokens.is_empty() {
        return Err(TreebankError::NoTerminals { offset: 0 });
    }
    let sentence = Sentence { tokens, pos_tags: if strip { Some(tags) } else { None } };
    ConstituentTree::new(root, sentence)
}

fn is_preterminal(raw: &Raw) -> bool {
    matches!(raw, Raw::Node { children, .. } if children.len() == 1 && matches!(children[0], Raw::Token(_)))
}

fn fully_tagged(raw: &Raw, is_root: bool) -> bool {
    match raw {
        Raw::Token(_) => false,
        Raw::Node { children, .. } => {
            if !is_root && is_preterminal(raw) {
                return true;
            }
            children.iter().all(|c| matches!(c, Raw::Node { .. }) && fully_tagged(c, false))
        }
    }
}

fn convert(
    raw: Raw,
    strip: bool,
    tokens: &mut Vec<String>,
    tags: &mut Vec<String>,
) -> Result<TreeNode, TreebankError> {
    match raw {
        Raw::Token(t) => {
            tokens.push(t);
            Ok(TreeNode::Terminal(tokens.len() - 1))
        }
        Raw::Node { label, offset, children } => {
            if label.is_empty() {
                return Err(TreebankError::EmptyConstituent { offset });
            }
            let mut out = Vec::with_capacity(children.len());
            for child in children {
                if strip && is_preterminal(&child) {
                    if let Raw::Node { label: tag, mut children, .. } = child {
                        if let Some(Raw::Token(t)) = children.pop() {
                            tokens.push(t);
                            tags.push(tag);
                            out.push(TreeNode::Terminal(tokens.len() - 1));
                        }
                    }
                } else {
                    out.push(convert(child, strip, tokens, tags)?);
                }
            }
            Ok(TreeNode::NonTerminal { label, children: out })
        }
    }
}

/// Single-line bracketed form. POS tags, when present, are written back as preterminals.
pub fn serialize(tree: &ConstituentTree) -> String {
    fn write(node: &TreeNode, sentence: &Sentence, out: &mut String) {
        match node {
            TreeNode::Terminal(i) => {
                let token = escape_token(&sentence.tokens[*i]);
                match sentence.pos(*i) {
                    Some(tag) => {
                        out.push('(');
                        out.push_str(tag);
                        out.push(' ');
                        out.push_str(&token);
                        out.push(')');
                    }
                    None => out.push_str(&token),
                }
            }
            TreeNode::NonTerminal { label, children } => {
                out.push('(');
                out.push_str(label);
                for c in children {
                    out.push(' ');
                    write(c, sentence, out);
                }
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    write(&tree.root, &tree.sentence, &mut out);
    out
}
