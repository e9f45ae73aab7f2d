use super::{Action, AjError, ParserState};
use crate::treebank::{ConstituentTree, TreeNode};

#[derive(Debug, Clone, Copy)]
enum GoldChild {
    Term,
    Node(usize),
}

struct GoldNode<'a> {
    label: &'a str,
    parent: Option<(usize, usize)>,
    children: Vec<GoldChild>,
    first: usize,
    /// Step at which the node appears during a derivation: its first token
    /// when its first child is a terminal, otherwise the first token of its
    /// second child.
    created: usize,
}

struct Gold<'a> {
    nodes: Vec<GoldNode<'a>>,
    /// `(parent id, child index)` of every terminal.
    term_parent: Vec<(usize, usize)>,
}

fn index(tree: &ConstituentTree) -> Gold<'_> {
    fn walk<'a>(node: &'a TreeNode, parent: Option<(usize, usize)>, g: &mut Gold<'a>) -> usize {
        let TreeNode::NonTerminal { label, children } = node else { unreachable!("walk is only called on non-terminals") };
        let id = g.nodes.len();
        g.nodes.push(GoldNode {
            label,
            parent,
            children: Vec::with_capacity(children.len()),
            first: node.first_terminal(),
            created: 0,
        });
        for (k, c) in children.iter().enumerate() {
            let child = match c {
                TreeNode::Terminal(i) => {
                    g.term_parent[*i] = (id, k);
                    GoldChild::Term
                }
                _ => GoldChild::Node(walk(c, Some((id, k)), g)),
            };
            g.nodes[id].children.push(child);
        }
        g.nodes[id].created = match children.as_slice() {
            [TreeNode::Terminal(i), ..] => *i,
            [_, second, ..] => second.first_terminal(),
            [_] => usize::MAX,
            [] => unreachable!("validated trees have no empty non-terminals"),
        };
        id
    }
    let mut g = Gold { nodes: Vec::new(), term_parent: vec![(0, 0); tree.len()] };
    walk(&tree.root, None, &mut g);
    g
}

/// The unique action sequence that derives `tree`.
///
/// At step `i` the token either opens its parent (when it is the parent's
/// first child) or hangs directly off it. The created unit then attaches to
/// its nearest ancestor that already exists, or, when it is the second child
/// of an ancestor that does not exist yet, that ancestor is juxtaposed over
/// its first child.
pub fn oracle(tree: &ConstituentTree) -> Result<Vec<Action>, AjError> {
    if tree.has_unary_chain() {
        return Err(AjError::UnaryChainPresent);
    }
    let gold = index(tree);
    let mut arena: Vec<Option<usize>> = vec![None; gold.nodes.len()];
    let mut state = ParserState::new();
    let mut actions = Vec::with_capacity(tree.len());
    let position = |state: &ParserState, arena: &[Option<usize>], g: usize| -> Result<usize, AjError> {
        arena[g].and_then(|id| state.chain_position(id)).ok_or_else(|| AjError::IllegalTarget {
            tgt: format!("gold node {}", gold.nodes[g].label),
            chain_len: state.chain_len(),
        })
    };

    for i in 0..tree.len() {
        let (p, idx) = gold.term_parent[i];
        let (prt, mut up) = if idx == 0 {
            debug_assert_eq!(gold.nodes[p].first, i);
            (Some(gold.nodes[p].label), gold.nodes[p].parent)
        } else {
            (None, Some((p, idx)))
        };
        let mut juxtaposed = None;
        let action = loop {
            let Some((q, child_idx)) = up else {
                if i != 0 {
                    return Err(AjError::Step { step: i, source: Box::new(AjError::EmptyTree) });
                }
                break Action::init(prt.expect("first token opens its parent"));
            };
            let node = &gold.nodes[q];
            if child_idx == 0 {
                up = node.parent;
            } else if node.created < i {
                break Action::attach(position(&state, &arena, q)?, prt);
            } else {
                let GoldChild::Node(left) = node.children[0] else {
                    unreachable!("a node with a terminal first child is created at its first token")
                };
                juxtaposed = Some(q);
                break Action::juxtapose(position(&state, &arena, left)?, prt, node.label);
            }
        };
        let base = state.node_count();
        state = state.apply(&action, i).map_err(|e| AjError::Step { step: i, source: Box::new(e) })?;
        if prt.is_some() {
            arena[p] = Some(base);
        }
        if let Some(q) = juxtaposed {
            arena[q] = Some(base + usize::from(prt.is_some()));
        }
        actions.push(action);
    }
    Ok(actions)
}

#[cfg(test)]
mod tests {
    use super::super::replay;
    use super::*;
    use crate::treebank::parse_bracketed;

    fn trace(s: &str) -> Vec<String> {
        oracle(&parse_bracketed(s).unwrap()).unwrap().iter().map(Action::to_string).collect()
    }

    #[test]
    fn running_example() {
        assert_eq!(
            trace("(S (NP the dog) (VP barks))"),
            ["attach(tgt=_,prt=NP)", "attach(tgt=0,prt=_)", "juxtapose(tgt=0,prt=VP,new=S)"]
        );
    }

    #[test]
    fn right_branching() {
        assert_eq!(trace("(A w1 (B w2 w3))"), ["attach(tgt=_,prt=A)", "attach(tgt=0,prt=B)", "attach(tgt=1,prt=_)"]);
    }

    #[test]
    fn left_branching() {
        assert_eq!(
            trace("(B (A w1 w2) w3)"),
            ["attach(tgt=_,prt=A)", "attach(tgt=0,prt=_)", "juxtapose(tgt=0,prt=_,new=B)"]
        );
    }

    #[test]
    fn delayed_parent_attaches_higher() {
        // Y is read before its parent X exists, so it first hangs off S
        let t = parse_bracketed("(S a (X (Y b c) d))").unwrap();
        let acts = oracle(&t).unwrap();
        assert_eq!(
            acts.iter().map(Action::to_string).collect::<Vec<_>>(),
            ["attach(tgt=_,prt=S)", "attach(tgt=0,prt=Y)", "attach(tgt=1,prt=_)", "juxtapose(tgt=1,prt=_,new=X)"]
        );
        assert_eq!(replay(&t.sentence, &acts).unwrap(), t);
    }

    #[test]
    fn rejects_unary_chains() {
        assert_eq!(oracle(&parse_bracketed("(S (VP a b))").unwrap()), Err(AjError::UnaryChainPresent));
    }
}
