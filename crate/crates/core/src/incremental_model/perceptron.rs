use std::collections::{BTreeMap, HashMap};

/// Multiclass averaged perceptron with lazy averaging.
///
/// Weights are keyed by feature string, then class index. The averaged
/// weight of a parameter is its value summed after every example, divided by
/// the number of examples; the running sum is brought up to date only when
/// the parameter changes.
#[derive(Debug, Default)]
pub(crate) struct Perceptron {
    n_classes: usize,
    weights: HashMap<String, HashMap<usize, Param>>,
    steps: u64,
}

#[derive(Debug, Default, Clone, Copy)]
struct Param {
    w: f64,
    total: f64,
    stamp: u64,
}

impl Param {
    fn bump(&mut self, now: u64, delta: f64) {
        self.total += (now - self.stamp) as f64 * self.w;
        self.stamp = now;
        self.w += delta;
    }
}

impl Perceptron {
    pub fn new(n_classes: usize) -> Self {
        Perceptron { n_classes, ..Default::default() }
    }

    pub fn scores(&self, feats: &[String]) -> Vec<f64> {
        let mut s = vec![0.0; self.n_classes];
        for f in feats {
            if let Some(row) = self.weights.get(f) {
                for (&c, p) in row {
                    s[c] += p.w;
                }
            }
        }
        s
    }

    /// One online step: predicts among `allowed` and updates on a mistake.
    /// Returns whether the prediction was correct.
    pub fn learn(&mut self, feats: &[String], gold: usize, allowed: &[usize], class_names: &[String]) -> bool {
        let now = self.steps;
        self.steps += 1;
        let guess = argmax(&self.scores(feats), allowed, class_names);
        if guess == Some(gold) {
            return true;
        }
        for f in feats {
            let row = self.weights.entry(f.clone()).or_default();
            row.entry(gold).or_default().bump(now, 1.0);
            if let Some(g) = guess {
                row.entry(g).or_default().bump(now, -1.0);
            }
        }
        false
    }

    /// Averaged weights, zeros dropped, in a deterministic order.
    pub fn averaged(&self) -> BTreeMap<String, Vec<(usize, f64)>> {
        let steps = self.steps.max(1) as f64;
        let mut out = BTreeMap::new();
        for (f, row) in &self.weights {
            let mut entries: Vec<(usize, f64)> = row
                .iter()
                .map(|(&c, p)| (c, (p.total + (self.steps - p.stamp) as f64 * p.w) / steps))
                .filter(|(_, w)| *w != 0.0)
                .collect();
            if entries.is_empty() {
                continue;
            }
            entries.sort_by_key(|e| e.0);
            out.insert(f.clone(), entries);
        }
        out
    }
}

/// Highest-scoring allowed class; ties go to the lexicographically smallest class name.
pub(crate) fn argmax(scores: &[f64], allowed: &[usize], class_names: &[String]) -> Option<usize> {
    allowed.iter().copied().fold(None, |best, c| match best {
        None => Some(c),
        Some(b) if scores[c] > scores[b] || (scores[c] == scores[b] && class_names[c] < class_names[b]) => Some(c),
        keep => keep,
    })
}
