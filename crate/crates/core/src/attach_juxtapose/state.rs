use super::{Action, ActionKind, AjError, Target};
use crate::treebank::{ConstituentTree, Sentence, TreeNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Term(usize),
    Node(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct StateNode {
    label: String,
    children: Vec<Slot>,
}

/// Partial tree over the tokens read so far, with its rightmost chain.
///
/// Nodes live in an arena and keep their ids across steps, so two states of
/// one derivation can be compared node by node. [`ParserState::apply`]
/// returns a new state and leaves `self` untouched.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParserState {
    nodes: Vec<StateNode>,
    root: Option<usize>,
    chain: Vec<usize>,
    next: usize,
}

impl ParserState {
    pub fn new() -> Self {
        Self::default()
    }

    /// 0-based index of the next token to read.
    pub fn next_token(&self) -> usize {
        self.next
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn chain_len(&self) -> usize {
        self.chain.len()
    }

    /// Labels along the rightmost chain, root first.
    pub fn chain_labels(&self) -> Vec<&str> {
        self.chain.iter().map(|&id| self.nodes[id].label.as_str()).collect()
    }

    /// Fencepost spans along the rightmost chain, root first.
    pub fn chain_spans(&self) -> Vec<(usize, usize)> {
        self.chain.iter().map(|&id| self.fenceposts(id)).collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Arena id of the chain node at root-first position `k`.
    pub fn chain_node(&self, k: usize) -> Option<usize> {
        self.chain.get(k).copied()
    }

    pub fn chain_position(&self, id: usize) -> Option<usize> {
        self.chain.iter().position(|&c| c == id)
    }

    fn fenceposts(&self, id: usize) -> (usize, usize) {
        let slot_span = |s: &Slot| match s {
            Slot::Term(i) => (*i, *i + 1),
            Slot::Node(n) => self.fenceposts(*n),
        };
        let kids = &self.nodes[id].children;
        (slot_span(&kids[0]).0, slot_span(kids.last().unwrap()).1)
    }

    fn recompute_chain(&mut self) {
        self.chain.clear();
        let mut cur = self.root;
        while let Some(id) = cur {
            self.chain.push(id);
            cur = match self.nodes[id].children.last() {
                Some(Slot::Node(n)) => Some(*n),
                _ => None,
            };
        }
    }

    fn push_node(&mut self, label: &str, children: Vec<Slot>) -> usize {
        self.nodes.push(StateNode { label: label.to_string(), children });
        self.nodes.len() - 1
    }

    /// Applies `action` for `token`. A parent (`prt`) is created before the
    /// juxtaposed node (`new`), so their arena ids are `node_count()` and
    /// `node_count() + 1` of the old state.
    pub fn apply(&self, action: &Action, token: usize) -> Result<ParserState, AjError> {
        if token != self.next {
            return Err(AjError::TokenOutOfOrder { expected: self.next, got: token });
        }
        match (action.kind, action.new.is_some()) {
            (ActionKind::Juxtapose, false) => return Err(AjError::JuxtaposeWithoutNew),
            (ActionKind::Attach, true) => return Err(AjError::AttachWithNew),
            _ => {}
        }
        let mut s = self.clone();
        let unit = match &action.prt {
            Some(label) => Slot::Node(s.push_node(label, vec![Slot::Term(token)])),
            None => Slot::Term(token),
        };
        match (action.tgt, self.root) {
            (Target::Empty, None) => {
                if action.kind != ActionKind::Attach {
                    return Err(AjError::IllegalTarget { tgt: "_".into(), chain_len: 0 });
                }
                let Slot::Node(id) = unit else { return Err(AjError::InitWithoutParent) };
                s.root = Some(id);
            }
            (Target::Empty, Some(_)) => return Err(AjError::NonEmptyTreeOnFirstAction),
            (Target::Chain(k), None) => {
                return Err(AjError::IllegalTarget { tgt: k.to_string(), chain_len: 0 });
            }
            (Target::Chain(k), Some(_)) => {
                let Some(&tgt) = self.chain.get(k) else {
                    return Err(AjError::IllegalTarget { tgt: k.to_string(), chain_len: self.chain.len() });
                };
                match action.kind {
                    ActionKind::Attach => s.nodes[tgt].children.push(unit),
                    ActionKind::Juxtapose => {
                        let new_label = action.new.as_deref().expect("checked above");
                        let new = s.push_node(new_label, vec![Slot::Node(tgt), unit]);
                        if k == 0 {
                            s.root = Some(new);
                        } else {
                            let parent = self.chain[k - 1];
                            *s.nodes[parent].children.last_mut().unwrap() = Slot::Node(new);
                        }
                    }
                }
            }
        }
        s.next += 1;
        s.recompute_chain();
        Ok(s)
    }

    fn build(&self, id: usize) -> TreeNode {
        let node = &self.nodes[id];
        TreeNode::node(
            node.label.clone(),
            node.children
                .iter()
                .map(|c| match c {
                    Slot::Term(i) => TreeNode::Terminal(*i),
                    Slot::Node(n) => self.build(*n),
                })
                .collect(),
        )
    }

    /// The partial tree over the tokens read so far; `None` before the first step.
    pub fn partial(&self, sentence: &Sentence) -> Option<ConstituentTree> {
        self.root.map(|root| ConstituentTree {
            root: self.build(root),
            sentence: sentence.prefix(self.next),
            normalized: true,
        })
    }

    fn terminal_count(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.children.iter().filter(|c| matches!(c, Slot::Term(_))).count())
            .sum()
    }
}

/// Non-terminals on the rightmost spine of a tree, root first.
pub fn rightmost_chain(tree: &ConstituentTree) -> Result<Vec<&TreeNode>, AjError> {
    let mut out = Vec::new();
    let mut cur = &tree.root;
    while let TreeNode::NonTerminal { children, .. } = cur {
        out.push(cur);
        match children.last() {
            Some(last) => cur = last,
            None => break,
        }
    }
    if out.is_empty() {
        return Err(AjError::EmptyTree);
    }
    Ok(out)
}

/// Every action applicable in `state` over the label inventory `labels`.
///
/// On the empty tree only initializing attaches (with a parent) are legal.
pub fn legal_actions(state: &ParserState, labels: &[String]) -> Vec<Action> {
    if state.is_empty() {
        return labels.iter().map(|l| Action::init(l.clone())).collect();
    }
    let prts: Vec<Option<&str>> = std::iter::once(None).chain(labels.iter().map(|l| Some(l.as_str()))).collect();
    let mut out = Vec::new();
    for tgt in 0..state.chain_len() {
        for prt in &prts {
            out.push(Action::attach(tgt, *prt));
        }
        for prt in &prts {
            for new in labels {
                out.push(Action::juxtapose(tgt, *prt, new));
            }
        }
    }
    out
}

/// Every intermediate state of a derivation, starting with the empty state.
pub fn replay_states(actions: &[Action]) -> Result<Vec<ParserState>, AjError> {
    let mut states = vec![ParserState::new()];
    for (step, action) in actions.iter().enumerate() {
        let next = states
            .last()
            .unwrap()
            .apply(action, step)
            .map_err(|e| AjError::Step { step, source: Box::new(e) })?;
        states.push(next);
    }
    Ok(states)
}

/// Folds `actions` over the sentence. Fewer actions than tokens yield the
/// partial tree over the prefix read so far.
pub fn replay(sentence: &Sentence, actions: &[Action]) -> Result<ConstituentTree, AjError> {
    if actions.len() > sentence.len() {
        return Err(AjError::LengthMismatch { actions: actions.len(), tokens: sentence.len() });
    }
    let states = replay_states(actions)?;
    states.last().unwrap().partial(sentence).ok_or(AjError::EmptyTree)
}

/// Checks that `next` extends `prev` monotonically: every old node keeps its
/// label and left fencepost, right fenceposts never shrink, closed children
/// stay in place, and exactly one terminal and at most two non-terminals are added.
pub fn check_monotonic(prev: &ParserState, next: &ParserState) -> Result<(), String> {
    if next.next != prev.next + 1 {
        return Err(format!("token counter went from {} to {}", prev.next, next.next));
    }
    if next.terminal_count() != prev.terminal_count() + 1 {
        return Err(format!("{} terminals added", next.terminal_count() as i64 - prev.terminal_count() as i64));
    }
    if next.nodes.len() < prev.nodes.len() || next.nodes.len() - prev.nodes.len() > 2 {
        return Err(format!("{} non-terminals added", next.nodes.len() as i64 - prev.nodes.len() as i64));
    }
    if next.nodes.len() == prev.nodes.len() && prev.root.is_none() {
        return Err("first step added no non-terminal".into());
    }
    for (id, old) in prev.nodes.iter().enumerate() {
        let new = &next.nodes[id];
        if new.label != old.label {
            return Err(format!("node {id} relabeled {} -> {}", old.label, new.label));
        }
        let (ol, or) = prev.fenceposts(id);
        let (nl, nr) = next.fenceposts(id);
        if nl != ol || nr < or {
            return Err(format!("node {id} span ({ol},{or}) became ({nl},{nr})"));
        }
        let closed = old.children.len() - 1;
        if new.children.len() < old.children.len() || new.children[..closed] != old.children[..closed] {
            return Err(format!("node {id} lost closed children"));
        }
        let (old_last, new_at) = (old.children[closed], new.children[closed]);
        if old_last != new_at {
            // only a juxtaposed node may take the old last child's place
            let Slot::Node(spliced) = new_at else { return Err(format!("node {id} child replaced by a terminal")) };
            if spliced < prev.nodes.len() || next.nodes[spliced].children.first() != Some(&old_last) {
                return Err(format!("node {id} last child replaced"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{parse_bracketed, serialize};

    fn labels(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn chain_examples() {
        let t = parse_bracketed("(NP the dog)").unwrap();
        let chain: Vec<_> = rightmost_chain(&t).unwrap().iter().map(|n| n.label().unwrap()).collect();
        assert_eq!(chain, ["NP"]);
        let t = parse_bracketed("(S (NP the dog) (VP barks))").unwrap();
        let chain: Vec<_> = rightmost_chain(&t).unwrap().iter().map(|n| n.label().unwrap()).collect();
        assert_eq!(chain, ["S", "VP"]);
        let t = parse_bracketed("(A a (B b (C c (D d (E e f)))))").unwrap();
        let chain: Vec<_> = rightmost_chain(&t).unwrap().iter().map(|n| n.label().unwrap()).collect();
        assert_eq!(chain, ["A", "B", "C", "D", "E"]);
    }

    #[test]
    fn apply_examples() {
        let s = Sentence::from_words(&["the", "dog", "barks"]);
        let s0 = ParserState::new();
        let s1 = s0.apply(&Action::init("NP"), 0).unwrap();
        assert_eq!(serialize(&s1.partial(&s).unwrap()), "(NP the)");
        let s2 = s1.apply(&Action::attach(0, None), 1).unwrap();
        assert_eq!(serialize(&s2.partial(&s).unwrap()), "(NP the dog)");
        let s3 = s2.apply(&Action::juxtapose(0, Some("VP"), "S"), 2).unwrap();
        assert_eq!(serialize(&s3.partial(&s).unwrap()), "(S (NP the dog) (VP barks))");
        assert_eq!(s3.chain_labels(), ["S", "VP"]);
        assert_eq!(s3.chain_spans(), [(0, 3), (2, 3)]);
        for (a, b) in [(&s0, &s1), (&s1, &s2), (&s2, &s3)] {
            check_monotonic(a, b).unwrap();
        }
    }

    #[test]
    fn apply_errors() {
        let s0 = ParserState::new();
        assert_eq!(s0.apply(&Action::attach(0, Some("A")), 0), Err(AjError::IllegalTarget { tgt: "0".into(), chain_len: 0 }));
        let no_prt = Action { prt: None, ..Action::init("A") };
        assert_eq!(s0.apply(&no_prt, 0), Err(AjError::InitWithoutParent));
        let s1 = s0.apply(&Action::init("A"), 0).unwrap();
        assert_eq!(s1.apply(&Action::init("A"), 1), Err(AjError::NonEmptyTreeOnFirstAction));
        assert_eq!(s1.apply(&Action::attach(1, None), 1), Err(AjError::IllegalTarget { tgt: "1".into(), chain_len: 1 }));
        let bad = Action { new: None, ..Action::juxtapose(0, None, "B") };
        assert_eq!(s1.apply(&bad, 1), Err(AjError::JuxtaposeWithoutNew));
        assert_eq!(s1.apply(&Action::attach(0, None), 5), Err(AjError::TokenOutOfOrder { expected: 1, got: 5 }));
    }

    #[test]
    fn legal_action_counts() {
        let empty = ParserState::new();
        assert_eq!(legal_actions(&empty, &labels(&["L1", "L2"])).len(), 2);
        let s = Sentence::from_words(&["a", "b", "c"]);
        let state = replay_states(&[Action::init("A"), Action::attach(0, Some("B"))]).unwrap().pop().unwrap();
        assert_eq!(state.chain_len(), 2);
        let acts = legal_actions(&state, &labels(&["L1", "L2"]));
        assert_eq!(acts.iter().filter(|a| a.kind == ActionKind::Attach).count(), 6);
        assert_eq!(acts.iter().filter(|a| a.kind == ActionKind::Juxtapose).count(), 12);
        for a in &acts {
            state.apply(a, 2).unwrap().partial(&s).unwrap().validate().unwrap();
        }
        let one = replay_states(&[Action::init("A")]).unwrap().pop().unwrap();
        assert_eq!(legal_actions(&one, &[]), vec![Action::attach(0, None)]);
    }

    #[test]
    fn replay_prefix_is_partial_tree() {
        let s = Sentence::from_words(&["the", "dog", "barks"]);
        let acts = [Action::init("NP"), Action::attach(0, None), Action::juxtapose(0, Some("VP"), "S")];
        let t = replay(&s, &acts[..2]).unwrap();
        t.validate().unwrap();
        assert_eq!(serialize(&t), "(NP the dog)");
        let err = replay(&s, &[Action::init("NP"), Action::attach(3, None)]).unwrap_err();
        assert!(matches!(err, AjError::Step { step: 1, .. }));
    }

    #[test]
    fn monotonicity_detects_relabeling() {
        let a = replay_states(&[Action::init("A")]).unwrap().pop().unwrap();
        let mut b = a.apply(&Action::attach(0, None), 1).unwrap();
        b.nodes[0].label = "Z".into();
        assert!(check_monotonic(&a, &b).is_err());
    }
}
