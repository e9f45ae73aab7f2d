mod common;

use common::{tree_from_seed, tree_with_chains};
use incparse::treebank::{collapse_unary, expand_unary, parse_bracketed, parse_bracketed_with, serialize, ReadOptions};
use proptest::prelude::*;

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(seed in any::<u64>()) {
        let t = tree_from_seed(seed);
        let text = serialize(&t);
        prop_assert_eq!(parse_bracketed(&text).unwrap(), t.clone());
        prop_assert_eq!(serialize(&parse_bracketed(&text).unwrap()), text);
    }

    #[test]
    fn collapse_expand_inverse(seed in any::<u64>()) {
        let t = tree_with_chains(seed);
        let c = collapse_unary(&t, '+').unwrap();
        prop_assert!(!c.has_unary_chain());
        prop_assert_eq!(expand_unary(&c, '+'), t.clone());
        // collapsing is idempotent
        prop_assert_eq!(collapse_unary(&c, '+').unwrap(), c);
    }

    #[test]
    fn spans_are_nested_and_cover(seed in any::<u64>()) {
        let t = tree_from_seed(seed);
        let spans = t.spans();
        let root = spans.last().unwrap();
        prop_assert_eq!((root.left, root.right), (0, t.len()));
        for a in &spans {
            prop_assert!(a.left < a.right);
            for b in &spans {
                let disjoint = a.right <= b.left || b.right <= a.left;
                let nested = (a.left <= b.left && b.right <= a.right) || (b.left <= a.left && a.right <= b.right);
                prop_assert!(disjoint || nested);
            }
        }
    }
}

#[test]
fn preterminals_move_into_pos_and_back() {
    let text = "(S (NP (DT the) (NN dog)) (VP (VBZ barks)))";
    let t = parse_bracketed_with(text, ReadOptions { strip_preterminals: true }).unwrap();
    assert_eq!(t.sentence.pos_tags.as_deref().unwrap(), ["DT", "NN", "VBZ"]);
    assert_eq!(serialize(&t), text);
}

#[test]
fn parentheses_tokens_survive() {
    let text = "(S (-LRB- -LRB-) (NP a) (-RRB- -RRB-))";
    let t = parse_bracketed(text).unwrap();
    assert_eq!(t.sentence.tokens, ["(", "a", ")"]);
    assert_eq!(serialize(&t), text);
}
