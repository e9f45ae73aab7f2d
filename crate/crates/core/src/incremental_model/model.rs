use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::features::{extract_sl_features, extract_tb_features, FeatureVector};
use super::perceptron::{argmax, Perceptron};
use super::{DelayConfig, ModelError};
use crate::attach_juxtapose::{oracle, replay_states, Action, ActionKind, ParserState, Target};
use crate::sl_codec::{decode_with, encode, DecodeOptions, SlLabel, SlMode};
use crate::synth;
use crate::treebank::{collapse_unary, expand_unary, ConstituentTree, Sentence, DEFAULT_JOIN};

pub const MODEL_MAGIC: &str = "INCPARSE-MODEL";
pub const MODEL_FORMAT_VERSION: u64 = 1;

/// Chain positions counted from the bottom get their own class up to this
/// depth; anything deeper (except the root) shares one overflow bucket.
const TGT_BUCKETS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Sl,
    Tb,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::Sl => "sl",
            DecoderKind::Tb => "tb",
        })
    }
}

impl FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sl" => Ok(DecoderKind::Sl),
            "tb" => Ok(DecoderKind::Tb),
            other => Err(format!("unknown decoder {other:?} (expected sl or tb)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub delay: DelayConfig,
    /// Only used by the sequence-labeling decoder.
    pub mode: SlMode,
    pub epochs: usize,
    pub seed: u64,
    pub join: char,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { delay: DelayConfig::default(), mode: SlMode::Absolute, epochs: 10, seed: 1, join: DEFAULT_JOIN }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub decoder: DecoderKind,
    pub mode: Option<SlMode>,
    pub delay: DelayConfig,
    pub epochs: usize,
    pub seed: u64,
    pub join: char,
    /// Non-terminal labels (after unary collapsing) seen in training.
    pub labels: Vec<String>,
    /// Most frequent non-terminal; used for repairs.
    pub default_label: String,
}

/// A trained averaged-perceptron decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub meta: ModelMeta,
    classes: Vec<String>,
    weights: BTreeMap<String, Vec<(usize, f64)>>,
    parsed: Vec<ClassShape>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    magic: String,
    version: u64,
    meta: ModelMeta,
    classes: Vec<String>,
    weights: BTreeMap<String, Vec<(usize, f64)>>,
}

impl LinearModel {
    fn from_parts(
        meta: ModelMeta,
        classes: Vec<String>,
        weights: BTreeMap<String, Vec<(usize, f64)>>,
    ) -> Result<Self, ModelError> {
        let parsed = classes
            .iter()
            .map(|c| ClassShape::parse(meta.decoder, c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LinearModel { meta, classes, weights, parsed })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    fn scores(&self, feats: &[String]) -> Vec<f64> {
        let mut s = vec![0.0; self.classes.len()];
        for f in feats {
            if let Some(row) = self.weights.get(f) {
                for &(c, w) in row {
                    s[c] += w;
                }
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            magic: MODEL_MAGIC.to_string(),
            version: MODEL_FORMAT_VERSION,
            meta: self.meta.clone(),
            classes: self.classes.clone(),
            weights: self.weights.clone(),
        };
        serde_json::to_string(&file).expect("model serializes")
    }

    pub fn save<W: Write>(&self, mut w: W) -> Result<(), ModelError> {
        w.write_all(self.to_json().as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    }

    /// Reads a model file, checking magic and version before anything else.
    pub fn load<R: Read>(mut r: R) -> Result<Self, ModelError> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|_| ModelError::BadMagic)?;
        if value.get("magic").and_then(|m| m.as_str()) != Some(MODEL_MAGIC) {
            return Err(ModelError::BadMagic);
        }
        let found = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0);
        if found != MODEL_FORMAT_VERSION {
            return Err(ModelError::VersionMismatch { found, expected: MODEL_FORMAT_VERSION });
        }
        let file: ModelFile = serde_json::from_value(value)?;
        Self::from_parts(file.meta, file.classes, file.weights)
    }

    pub fn expect_decoder(&self, kind: DecoderKind) -> Result<(), ModelError> {
        if self.meta.decoder != kind {
            return Err(ModelError::WrongDecoder { found: self.meta.decoder.to_string(), expected: kind.to_string() });
        }
        Ok(())
    }
}

/// What a class name means, parsed once at model construction.
#[derive(Debug, Clone, PartialEq)]
enum ClassShape {
    Label { is_final: bool, label: SlLabel },
    Action { kind: ActionKind, tgt: TgtBucket, prt: Option<String>, new: Option<String> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum TgtBucket {
    Empty,
    Root,
    Bottom(usize),
    Overflow,
}

impl TgtBucket {
    fn of(tgt: Target, chain_len: usize) -> TgtBucket {
        match tgt {
            Target::Empty => TgtBucket::Empty,
            Target::Chain(0) => TgtBucket::Root,
            Target::Chain(p) => {
                let b = chain_len - 1 - p;
                if b < TGT_BUCKETS {
                    TgtBucket::Bottom(b)
                } else {
                    TgtBucket::Overflow
                }
            }
        }
    }

    /// Root-first chain position this bucket denotes, if it exists in a chain of `len`.
    fn resolve(self, len: usize) -> Option<Target> {
        match self {
            TgtBucket::Empty => (len == 0).then_some(Target::Empty),
            TgtBucket::Root => (len > 0).then_some(Target::Chain(0)),
            // the root has its own bucket
            TgtBucket::Bottom(b) => (b + 1 < len).then(|| Target::Chain(len - 1 - b)),
            TgtBucket::Overflow => (len > TGT_BUCKETS + 1).then(|| Target::Chain(len - 1 - TGT_BUCKETS)),
        }
    }
}

impl fmt::Display for TgtBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TgtBucket::Empty => f.write_str("_"),
            TgtBucket::Root => f.write_str("root"),
            TgtBucket::Bottom(b) => write!(f, "b{b}"),
            TgtBucket::Overflow => f.write_str("deep"),
        }
    }
}

impl ClassShape {
    fn parse(decoder: DecoderKind, name: &str) -> Result<ClassShape, ModelError> {
        let bad = || ModelError::Transitions(crate::attach_juxtapose::AjError::BadAction(name.to_string()));
        match decoder {
            DecoderKind::Sl => {
                let label: SlLabel = name.parse()?;
                Ok(ClassShape::Label { is_final: label.is_final(), label })
            }
            DecoderKind::Tb => {
                let parts: Vec<&str> = name.split(' ').collect();
                let [kind, tgt, prt, new] = parts.as_slice() else { return Err(bad()) };
                let kind = match *kind {
                    "attach" => ActionKind::Attach,
                    "juxtapose" => ActionKind::Juxtapose,
                    _ => return Err(bad()),
                };
                let tgt = match *tgt {
                    "_" => TgtBucket::Empty,
                    "root" => TgtBucket::Root,
                    "deep" => TgtBucket::Overflow,
                    b => TgtBucket::Bottom(b.strip_prefix('b').and_then(|n| n.parse().ok()).ok_or_else(bad)?),
                };
                let opt = |s: &str| (s != "_").then(|| s.to_string());
                Ok(ClassShape::Action { kind, tgt, prt: opt(prt), new: opt(new) })
            }
        }
    }

    /// The action this class stands for in `state`, if it is applicable there.
    fn action_in(&self, state: &ParserState) -> Option<Action> {
        let ClassShape::Action { kind, tgt, prt, new } = self else { return None };
        let tgt = tgt.resolve(state.chain_len())?;
        if tgt == Target::Empty && (*kind != ActionKind::Attach || prt.is_none()) {
            return None;
        }
        Some(Action { kind: *kind, tgt, prt: prt.clone(), new: new.clone() })
    }
}

/// Class name of `action` taken on a rightmost chain of `chain_len` nodes.
/// Targets are bucketed: the root, the lowest [`TGT_BUCKETS`] other chain
/// nodes counted from the bottom, and one overflow bucket.
pub fn action_class(action: &Action, chain_len: usize) -> String {
    let opt = |s: &Option<String>| s.clone().unwrap_or_else(|| "_".to_string());
    let kind = match action.kind {
        ActionKind::Attach => "attach",
        ActionKind::Juxtapose => "juxtapose",
    };
    format!("{kind} {} {} {}", TgtBucket::of(action.tgt, chain_len), opt(&action.prt), opt(&action.new))
}

struct Example {
    feats: FeatureVector,
    gold: String,
    ctx: Ctx,
}

/// What decides the legal classes of one decision.
enum Ctx {
    /// Whether this is the last token of the sentence.
    SlLast(bool),
    Tb(ParserState),
}

fn prepare(corpus: &[ConstituentTree], join: char) -> Result<Vec<ConstituentTree>, ModelError> {
    if corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    corpus.iter().map(|t| Ok(collapse_unary(t, join)?)).collect()
}

fn label_inventory(corpus: &[ConstituentTree]) -> (Vec<String>, String) {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for t in corpus {
        for l in t.labels() {
            *counts.entry(l.to_string()).or_default() += 1;
        }
    }
    let default = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(l, _)| l.clone());
    (counts.keys().cloned().collect(), default.unwrap_or_else(|| "X".to_string()))
}

fn allowed_for(model: &LinearModel, ctx: &Ctx) -> Vec<usize> {
    match ctx {
        Ctx::SlLast(last) => {
            (0..model.classes.len()).filter(|&c| matches!(&model.parsed[c], ClassShape::Label { is_final, .. } if is_final == last)).collect()
        }
        Ctx::Tb(state) => legal_classes(model, state),
    }
}

fn legal_classes(model: &LinearModel, state: &ParserState) -> Vec<usize> {
    (0..model.classes.len()).filter(|&c| model.parsed[c].action_in(state).is_some()).collect()
}

fn fit(meta: ModelMeta, examples: Vec<Example>, cfg: &TrainConfig) -> Result<LinearModel, ModelError> {
    let classes: Vec<String> = examples.iter().map(|e| e.gold.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let index: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let shell = LinearModel::from_parts(meta.clone(), classes.clone(), BTreeMap::new())?;
    let prepared: Vec<(usize, Vec<usize>)> =
        examples.iter().map(|e| (index[e.gold.as_str()], allowed_for(&shell, &e.ctx))).collect();
    let mut p = Perceptron::new(classes.len());
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = synth::rng(cfg.seed);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut correct = 0;
        for &i in &order {
            let (gold, allowed) = &prepared[i];
            if p.learn(&examples[i].feats, *gold, allowed, &classes) {
                correct += 1;
            }
        }
        log::info!("epoch {}: online accuracy {:.4}", epoch + 1, correct as f64 / examples.len().max(1) as f64);
    }
    LinearModel::from_parts(meta, classes, p.averaged())
}

/// Trains the sequence-labeling decoder with gold label history.
pub fn train_sl(corpus: &[ConstituentTree], cfg: &TrainConfig) -> Result<LinearModel, ModelError> {
    let corpus = prepare(corpus, cfg.join)?;
    let mut examples = Vec::new();
    for tree in &corpus {
        let labels = encode(tree, cfg.mode)?;
        let n = labels.len();
        for i in 0..n {
            examples.push(Example {
                feats: extract_sl_features(&tree.sentence, i, &cfg.delay, &labels[..i]),
                gold: labels[i].to_string(),
                ctx: Ctx::SlLast(i + 1 == n),
            });
        }
    }
    let (labels, default_label) = label_inventory(&corpus);
    let meta = ModelMeta {
        decoder: DecoderKind::Sl,
        mode: Some(cfg.mode),
        delay: cfg.delay.clone(),
        epochs: cfg.epochs,
        seed: cfg.seed,
        join: cfg.join,
        labels,
        default_label,
    };
    fit(meta, examples, cfg)
}

/// Trains the attach-juxtapose decoder on oracle actions with gold states.
pub fn train_tb(corpus: &[ConstituentTree], cfg: &TrainConfig) -> Result<LinearModel, ModelError> {
    let corpus = prepare(corpus, cfg.join)?;
    let mut examples = Vec::new();
    for tree in &corpus {
        let actions = oracle(tree)?;
        let states = replay_states(&actions)?;
        for (action, state) in actions.iter().zip(&states) {
            examples.push(Example {
                feats: extract_tb_features(state, &tree.sentence, &cfg.delay),
                gold: action_class(action, state.chain_len()),
                ctx: Ctx::Tb(state.clone()),
            });
        }
    }
    let (labels, default_label) = label_inventory(&corpus);
    let meta = ModelMeta {
        decoder: DecoderKind::Tb,
        mode: None,
        delay: cfg.delay.clone(),
        epochs: cfg.epochs,
        seed: cfg.seed,
        join: cfg.join,
        labels,
        default_label,
    };
    fit(meta, examples, cfg)
}

/// Greedy labeling; the last position only chooses among end-of-sentence
/// classes and every other position among the rest.
pub fn predict_labels(model: &LinearModel, sentence: &Sentence) -> Result<Vec<SlLabel>, ModelError> {
    model.expect_decoder(DecoderKind::Sl)?;
    let n = sentence.len();
    let non_final = allowed_for(model, &Ctx::SlLast(false));
    let finals = allowed_for(model, &Ctx::SlLast(true));
    let mut out: Vec<SlLabel> = Vec::with_capacity(n);
    for i in 0..n {
        let feats = extract_sl_features(sentence, i, &model.meta.delay, &out);
        let allowed = if i + 1 == n { &finals } else { &non_final };
        let label = match argmax(&model.scores(&feats), allowed, &model.classes) {
            Some(c) => match &model.parsed[c] {
                ClassShape::Label { label, .. } => label.clone(),
                ClassShape::Action { .. } => unreachable!("sequence-labeling model with action classes"),
            },
            None if i + 1 == n => SlLabel::final_label(),
            None => SlLabel::levels(1, model.meta.default_label.clone()),
        };
        out.push(label);
    }
    Ok(out)
}

/// Greedy transition decoding over legal actions only. Without any applicable
/// trained class the first legal action is taken.
pub fn predict_actions(model: &LinearModel, sentence: &Sentence) -> Result<Vec<Action>, ModelError> {
    model.expect_decoder(DecoderKind::Tb)?;
    let mut state = ParserState::new();
    let mut out = Vec::with_capacity(sentence.len());
    for i in 0..sentence.len() {
        let feats = extract_tb_features(&state, sentence, &model.meta.delay);
        let allowed = legal_classes(model, &state);
        let action = match argmax(&model.scores(&feats), &allowed, &model.classes) {
            Some(c) => model.parsed[c].action_in(&state).expect("allowed classes are applicable"),
            None if state.is_empty() => Action::init(model.meta.default_label.clone()),
            None => Action::attach(0, None),
        };
        state = state.apply(&action, i)?;
        out.push(action);
    }
    Ok(out)
}

/// Fraction of training decisions predicted correctly with gold history.
pub fn training_accuracy(model: &LinearModel, corpus: &[ConstituentTree]) -> Result<f64, ModelError> {
    let corpus = prepare(corpus, model.meta.join)?;
    let (mut right, mut total) = (0usize, 0usize);
    for tree in &corpus {
        match model.meta.decoder {
            DecoderKind::Sl => {
                let gold = encode(tree, model.meta.mode.unwrap_or(SlMode::Absolute))?;
                let n = gold.len();
                for i in 0..n {
                    let feats = extract_sl_features(&tree.sentence, i, &model.meta.delay, &gold[..i]);
                    let allowed = allowed_for(model, &Ctx::SlLast(i + 1 == n));
                    let guess = argmax(&model.scores(&feats), &allowed, &model.classes);
                    right += usize::from(guess.map(|c| &model.classes[c]) == Some(&gold[i].to_string()));
                    total += 1;
                }
            }
            DecoderKind::Tb => {
                let actions = oracle(tree)?;
                let states = replay_states(&actions)?;
                for (action, state) in actions.iter().zip(&states) {
                    let feats = extract_tb_features(state, &tree.sentence, &model.meta.delay);
                    let allowed = allowed_for(model, &Ctx::Tb(state.clone()));
                    let guess = argmax(&model.scores(&feats), &allowed, &model.classes);
                    right += usize::from(guess.map(|c| &model.classes[c]) == Some(&action_class(action, state.chain_len())));
                    total += 1;
                }
            }
        }
    }
    Ok(right as f64 / total.max(1) as f64)
}

/// Sentence-level parsing front end for either decoder; returns trees with
/// unary chains expanded.
#[derive(Debug, Clone)]
pub struct Parser {
    pub model: LinearModel,
    opts: DecodeOptions,
}

impl Parser {
    pub fn new(model: LinearModel) -> Self {
        let opts = DecodeOptions {
            fallback_root: model.meta.default_label.clone(),
            default_label: model.meta.default_label.clone(),
            known_labels: Some(model.meta.labels.iter().cloned().collect::<HashSet<_>>()),
            join: model.meta.join,
        };
        Parser { model, opts }
    }

    /// Decoder decisions, rendered as strings (labels or actions).
    pub fn decisions(&self, sentence: &Sentence) -> Result<Vec<String>, ModelError> {
        Ok(match self.model.meta.decoder {
            DecoderKind::Sl => predict_labels(&self.model, sentence)?.iter().map(ToString::to_string).collect(),
            DecoderKind::Tb => predict_actions(&self.model, sentence)?.iter().map(ToString::to_string).collect(),
        })
    }

    /// Normalized (unary-collapsed) tree.
    pub fn parse_normalized(&self, sentence: &Sentence) -> Result<ConstituentTree, ModelError> {
        match self.model.meta.decoder {
            DecoderKind::Sl => {
                let labels = predict_labels(&self.model, sentence)?;
                let mode = self.model.meta.mode.unwrap_or(SlMode::Absolute);
                Ok(decode_with(&labels, sentence, mode, &self.opts)?)
            }
            DecoderKind::Tb => {
                let actions = predict_actions(&self.model, sentence)?;
                let states = replay_states(&actions)?;
                let mut tree = states.last().unwrap().partial(sentence).ok_or(crate::attach_juxtapose::AjError::EmptyTree)?;
                tree.normalized = true;
                Ok(tree)
            }
        }
    }

    pub fn parse(&self, sentence: &Sentence) -> Result<ConstituentTree, ModelError> {
        Ok(expand_unary(&self.parse_normalized(sentence)?, self.model.meta.join))
    }
}
