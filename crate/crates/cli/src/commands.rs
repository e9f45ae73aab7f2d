use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use incparse::attach_juxtapose::{self as aj, format_record, parse_record};
use incparse::evaluation::{corpus_stats, format_stats_table, score, EvalParams};
use incparse::incremental_model::{
    audit_incrementality, generate_pairs, train_sl, train_tb, AuditReport, DecoderKind, DelayConfig, LinearModel,
    Parser, PeekLastToken, TrainConfig,
};
use incparse::sl_codec::{self as sl, DecodeOptions, LabelFileReader, SlMode};
use incparse::synth::ToyGrammar;
use incparse::treebank::{collapse_unary, expand_unary, serialize, unescape_token, ReadOptions};
use incparse::{ConstituentTree, Sentence};

use crate::io::{create, open, read_trees, TreeReader};
use crate::{Internal, TreeInput};

const CHUNK: usize = 256;

fn trees_of(input: &TreeInput) -> Result<TreeReader<Box<dyn BufRead>>> {
    let opts = ReadOptions { strip_preterminals: input.strip_pos };
    Ok(TreeReader::new(open(&input.input)?, opts, input.input.display().to_string()))
}

fn normalized(tree: &ConstituentTree, join: char, index: usize) -> Result<ConstituentTree> {
    collapse_unary(tree, join).with_context(|| format!("tree {}", index + 1))
}

pub fn encode(input: &TreeInput, mode: SlMode) -> Result<()> {
    let mut out = create(None)?;
    for (index, tree) in trees_of(input)?.enumerate() {
        let tree = normalized(&tree?, input.join, index)?;
        let labels = sl::encode(&tree, mode).with_context(|| format!("tree {}", index + 1))?;
        let back = sl::decode(&labels, &tree.sentence, mode).map_err(|e| Internal(e.to_string()))?;
        if back != tree {
            return Err(Internal(format!("tree {} does not survive encode/decode", index + 1)).into());
        }
        writeln!(out, "{}", sl::format_sentence(&tree.sentence, &labels))?;
    }
    out.flush()?;
    Ok(())
}

pub fn decode(input: &Path, mode: SlMode, join: char) -> Result<()> {
    let opts = DecodeOptions { join, ..Default::default() };
    let mut out = create(None)?;
    for (index, block) in LabelFileReader::new(open(input)?).enumerate() {
        let block = block.with_context(|| input.display().to_string())?;
        let tree = sl::decode_with(&block.labels, &block.sentence, mode, &opts)
            .with_context(|| format!("sentence {}", index + 1))?;
        writeln!(out, "{}", serialize(&expand_unary(&tree, join)))?;
    }
    out.flush()?;
    Ok(())
}

pub fn oracle(input: &TreeInput) -> Result<()> {
    let mut out = create(None)?;
    for (index, tree) in trees_of(input)?.enumerate() {
        let tree = normalized(&tree?, input.join, index)?;
        let actions = aj::oracle(&tree).map_err(|e| Internal(format!("tree {}: {e}", index + 1)))?;
        let back = aj::replay(&tree.sentence, &actions).map_err(|e| Internal(e.to_string()))?;
        if back != tree {
            return Err(Internal(format!("tree {}: oracle actions do not replay to the tree", index + 1)).into());
        }
        writeln!(out, "{}", format_record(&tree.sentence, &actions))?;
    }
    out.flush()?;
    Ok(())
}

pub fn replay(input: &Path, join: char) -> Result<()> {
    let mut out = create(None)?;
    for (k, line) in open(input)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let at = || format!("{}:{}", input.display(), k + 1);
        let (sentence, actions) = parse_record(&line).with_context(at)?;
        if actions.len() != sentence.len() {
            bail!("{}: {} actions for {} tokens", at(), actions.len(), sentence.len());
        }
        let tree = aj::replay(&sentence, &actions).with_context(at)?;
        writeln!(out, "{}", serialize(&expand_unary(&tree, join)))?;
    }
    out.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn train(
    input: &TreeInput,
    decoder: DecoderKind,
    mode: SlMode,
    delay: usize,
    allow_large_delay: bool,
    epochs: usize,
    seed: u64,
    output: Option<&Path>,
) -> Result<()> {
    let delay = DelayConfig::new(delay, allow_large_delay)?;
    let corpus: Vec<ConstituentTree> = trees_of(input)?.collect::<Result<_>>()?;
    let cfg = TrainConfig { delay, mode, epochs, seed, join: input.join };
    log::info!("training {decoder} decoder on {} trees", corpus.len());
    let model = match decoder {
        DecoderKind::Sl => train_sl(&corpus, &cfg)?,
        DecoderKind::Tb => train_tb(&corpus, &cfg)?,
    };
    let mut out = create(output)?;
    model.save(&mut out)?;
    out.flush()?;
    Ok(())
}

fn load_model(path: &Path) -> Result<LinearModel> {
    LinearModel::load(open(path)?).with_context(|| format!("cannot load model {}", path.display()))
}

fn read_sentences(input: &Path, from_trees: bool, strip_pos: bool) -> Result<Vec<Sentence>> {
    if from_trees {
        let trees = read_trees(input, ReadOptions { strip_preterminals: strip_pos })?;
        return Ok(trees.into_iter().map(|t| t.sentence).collect());
    }
    let mut out = Vec::new();
    for (k, line) in open(input)?.lines().enumerate() {
        let tokens: Vec<String> = line?.split_whitespace().map(unescape_token).collect();
        if tokens.is_empty() {
            bail!("{}:{}: empty sentence", input.display(), k + 1);
        }
        out.push(Sentence::new(tokens));
    }
    Ok(out)
}

pub fn parse(model: &Path, input: &Path, from_trees: bool, strip_pos: bool, output: Option<&Path>) -> Result<()> {
    let parser = Parser::new(load_model(model)?);
    let sentences = read_sentences(input, from_trees, strip_pos)?;
    let mut out = create(output)?;
    for chunk in sentences.chunks(CHUNK) {
        let trees: Vec<Result<ConstituentTree>> = chunk
            .par_iter()
            .map(|s| {
                let tree = parser.parse(s).map_err(|e| Internal(e.to_string()))?;
                tree.validate().map_err(|e| Internal(format!("parser produced an invalid tree: {e}")))?;
                Ok(tree)
            })
            .collect();
        for tree in trees {
            writeln!(out, "{}", serialize(&tree?))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn eval(
    gold: &Path,
    pred: &Path,
    prm: Option<&Path>,
    collins: bool,
    keep_functional: bool,
    join: char,
    json: bool,
) -> Result<()> {
    let mut params = if collins {
        EvalParams::collins()
    } else if let Some(path) = prm {
        let mut text = String::new();
        open(path)?.read_to_string(&mut text)?;
        let (params, warnings) = EvalParams::from_prm(&text).with_context(|| path.display().to_string())?;
        for w in warnings {
            eprintln!("warning: {}: {w}", path.display());
        }
        params
    } else {
        EvalParams::default()
    };
    params.strip_functional = !keep_functional;
    params.join = join;
    let opts = ReadOptions::default();
    let (g, p) = rayon::join(|| read_trees(gold, opts), || read_trees(pred, opts));
    let report = score(&g?, &p?, &params)?;
    let mut out = create(None)?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        write!(out, "{}", report.to_table())?;
    }
    out.flush()?;
    Ok(())
}

pub fn stats(input: &Path, top: Option<usize>, json: bool) -> Result<()> {
    let trees = read_trees(input, ReadOptions::default())?;
    let stats = corpus_stats(&trees)?;
    let mut out = create(None)?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&stats)?)?;
    } else {
        write!(out, "{}", format_stats_table(&stats, top))?;
    }
    out.flush()?;
    Ok(())
}

pub fn audit(
    model: Option<&Path>,
    adversarial: bool,
    delay: Option<usize>,
    n_pairs: usize,
    seed: u64,
    json: bool,
) -> Result<()> {
    let pairs = generate_pairs(&ToyGrammar::default(), seed, n_pairs);
    let report: AuditReport = if adversarial {
        audit_incrementality(&PeekLastToken, &pairs, delay.unwrap_or(0))
    } else {
        let model = load_model(model.expect("clap requires --model"))?;
        let k = delay.unwrap_or(model.meta.delay.k);
        audit_incrementality(&Parser::new(model), &pairs, k)
    };
    let mut out = create(None)?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        writeln!(out, "k {} pairs {} violations {}", report.k, report.pairs.len(), report.violations)?;
        for (i, a) in report.pairs.iter().enumerate().filter(|(_, a)| a.violation) {
            let d = a.first_divergence.unwrap_or(0);
            writeln!(out, "pair {}: shared {} first divergence {} (allowed from {})", i + 1, a.shared, d, a.allowed_from)?;
        }
    }
    out.flush()?;
    if report.violations > 0 && !adversarial {
        return Err(Internal(format!("{} prefix-determinism violations", report.violations)).into());
    }
    Ok(())
}
