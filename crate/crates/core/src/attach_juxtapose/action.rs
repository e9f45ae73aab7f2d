use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AjError;
use crate::treebank::{escape_token, unescape_token, Sentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionKind {
    Attach,
    Juxtapose,
}

/// Address of the target node: its position on the rightmost chain counted
/// from the root, or the empty tree before the first token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    Empty,
    Chain(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Action {
    pub kind: ActionKind,
    pub tgt: Target,
    /// Parent created for the token; `None` attaches the token directly.
    pub prt: Option<String>,
    /// Node spliced in by juxtapose.
    pub new: Option<String>,
}

impl Action {
    pub fn init(prt: impl Into<String>) -> Action {
        Action { kind: ActionKind::Attach, tgt: Target::Empty, prt: Some(prt.into()), new: None }
    }

    pub fn attach(tgt: usize, prt: Option<&str>) -> Action {
        Action { kind: ActionKind::Attach, tgt: Target::Chain(tgt), prt: prt.map(str::to_string), new: None }
    }

    pub fn juxtapose(tgt: usize, prt: Option<&str>, new: &str) -> Action {
        Action {
            kind: ActionKind::Juxtapose,
            tgt: Target::Chain(tgt),
            prt: prt.map(str::to_string),
            new: Some(new.to_string()),
        }
    }

    /// Number of non-terminals this action creates.
    pub fn created_nonterminals(&self) -> usize {
        usize::from(self.prt.is_some()) + usize::from(self.new.is_some())
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Empty => f.write_str("_"),
            Target::Chain(k) => write!(f, "{k}"),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prt = self.prt.as_deref().unwrap_or("_");
        match self.kind {
            ActionKind::Attach => write!(f, "attach(tgt={},prt={prt})", self.tgt),
            ActionKind::Juxtapose => {
                write!(f, "juxtapose(tgt={},prt={prt},new={})", self.tgt, self.new.as_deref().unwrap_or("_"))
            }
        }
    }
}

impl FromStr for Action {
    type Err = AjError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AjError::BadAction(s.to_string());
        let (kind, rest) = if let Some(rest) = s.strip_prefix("attach(") {
            (ActionKind::Attach, rest)
        } else if let Some(rest) = s.strip_prefix("juxtapose(") {
            (ActionKind::Juxtapose, rest)
        } else {
            return Err(bad());
        };
        let body = rest.strip_suffix(')').ok_or_else(bad)?;
        // labels may contain ',' (punctuation), so split on the key markers
        let (tgt, rest) = body.strip_prefix("tgt=").and_then(|b| b.split_once(",prt=")).ok_or_else(bad)?;
        let (prt, new) = match kind {
            ActionKind::Attach if rest.contains(",new=") => return Err(bad()),
            ActionKind::Attach => (rest, None),
            ActionKind::Juxtapose => {
                let (p, n) = rest.rsplit_once(",new=").ok_or_else(bad)?;
                (p, Some(n))
            }
        };
        if tgt.is_empty() || prt.is_empty() || new.is_some_and(str::is_empty) {
            return Err(bad());
        }
        let values = [tgt, prt, new.unwrap_or("_")];
        let tgt = match values[0] {
            "_" => Target::Empty,
            k => Target::Chain(k.parse().map_err(|_| bad())?),
        };
        let label = |v: &str| if v == "_" { None } else { Some(v.to_string()) };
        let new = new.and_then(label);
        if kind == ActionKind::Juxtapose && new.is_none() {
            return Err(bad());
        }
        Ok(Action { kind, tgt, prt: label(values[1]), new })
    }
}

/// One action-log line: `tokens<TAB>actions[<TAB>pos tags]`, space-separated fields.
pub fn format_record(sentence: &Sentence, actions: &[Action]) -> String {
    let tokens: Vec<String> = sentence.tokens.iter().map(|t| escape_token(t)).collect();
    let actions: Vec<String> = actions.iter().map(Action::to_string).collect();
    let mut line = format!("{}\t{}", tokens.join(" "), actions.join(" "));
    if let Some(tags) = &sentence.pos_tags {
        line.push('\t');
        line.push_str(&tags.join(" "));
    }
    line
}

pub fn parse_record(line: &str) -> Result<(Sentence, Vec<Action>), AjError> {
    let cols: Vec<&str> = line.split('\t').collect();
    if !(2..=3).contains(&cols.len()) {
        return Err(AjError::BadRecord(format!("expected 2 or 3 tab-separated fields, found {}", cols.len())));
    }
    let tokens: Vec<String> = cols[0].split_whitespace().map(unescape_token).collect();
    if tokens.is_empty() {
        return Err(AjError::BadRecord("no tokens".into()));
    }
    let actions = cols[1].split_whitespace().map(str::parse).collect::<Result<Vec<Action>, _>>()?;
    let pos_tags = match cols.get(2) {
        Some(tags) => {
            let tags: Vec<String> = tags.split_whitespace().map(str::to_string).collect();
            if tags.len() != tokens.len() {
                return Err(AjError::BadRecord(format!("{} POS tags for {} tokens", tags.len(), tokens.len())));
            }
            Some(tags)
        }
        None => None,
    };
    Ok((Sentence { tokens, pos_tags }, actions))
}
