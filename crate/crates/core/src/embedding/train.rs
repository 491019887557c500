//! Skip-gram with negative sampling, single-threaded and seeded.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EmbeddingError, TokenVectors, TrainConfig};

const MIN_LR_FRACTION: f64 = 1e-4;
const NEGATIVE_POWER: f64 = 0.75;

struct Vocab {
    words: Vec<String>,
    counts: Vec<u64>,
}

impl Vocab {
    /// Tokens with count >= `min_count`, ordered by descending count then token.
    fn build(corpus: &[Vec<String>], min_count: usize) -> Self {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for token in corpus.iter().flatten() {
            *counts.entry(token.as_str()).or_default() += 1;
        }
        let mut kept: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= min_count as u64).collect();
        kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Self {
            words: kept.iter().map(|(w, _)| w.to_string()).collect(),
            counts: kept.iter().map(|&(_, c)| c).collect(),
        }
    }

    fn len(&self) -> usize {
        self.words.len()
    }
}

/// Unigram^0.75 sampler over vocabulary indices.
struct NegativeSampler {
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(NEGATIVE_POWER);
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Trains input token vectors on `corpus`.
///
/// Output is deterministic for a given corpus and config.
pub fn train(corpus: &[Vec<String>], config: &TrainConfig) -> Result<TokenVectors, EmbeddingError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(EmbeddingError::EmptyCorpus);
    }
    let vocab = Vocab::build(corpus, config.min_token_count);
    if vocab.len() == 0 {
        return Err(EmbeddingError::NoTrainableTokens);
    }
    let index: HashMap<&str, u32> = vocab
        .words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i as u32))
        .collect();
    let sentences: Vec<Vec<u32>> = corpus
        .iter()
        .map(|seq| {
            seq.iter()
                .filter_map(|t| index.get(t.as_str()).copied())
                .collect::<Vec<_>>()
        })
        .filter(|s: &Vec<u32>| !s.is_empty())
        .collect();
    let train_tokens: u64 = sentences.iter().map(|s| s.len() as u64).sum();

    let dim = config.dimension;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let half_range = 0.5 / dim as f64;
    let mut input: Vec<f64> = (0..vocab.len() * dim)
        .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * half_range)
        .collect();
    let mut output = vec![0.0f64; vocab.len() * dim];

    let sampler = NegativeSampler::new(&vocab.counts);
    let keep_prob: Vec<f64> = vocab
        .counts
        .iter()
        .map(|&c| {
            if config.subsample_threshold == 0.0 {
                return 1.0;
            }
            let scaled = config.subsample_threshold * train_tokens as f64;
            let c = c as f64;
            ((c / scaled).sqrt() + 1.0) * scaled / c
        })
        .collect();

    let total_steps = (config.epochs as u64 * train_tokens).max(1) as f64;
    let lr0 = config.learning_rate_initial;
    let mut processed: u64 = 0;
    let mut kept: Vec<(u32, u64)> = Vec::new();
    let mut grad = vec![0.0f64; dim];

    for _epoch in 0..config.epochs {
        for sentence in &sentences {
            kept.clear();
            for (pos, &w) in sentence.iter().enumerate() {
                let p = keep_prob[w as usize];
                if p >= 1.0 || rng.random::<f64>() < p {
                    kept.push((w, processed + pos as u64));
                }
            }
            processed += sentence.len() as u64;

            for i in 0..kept.len() {
                let (center, step) = kept[i];
                let progress = step as f64 / total_steps;
                let lr = lr0 * (1.0 - (1.0 - MIN_LR_FRACTION) * progress).max(MIN_LR_FRACTION);
                let radius = rng.random_range(1..=config.window);
                let lo = i.saturating_sub(radius);
                let hi = (i + radius).min(kept.len() - 1);
                #[allow(clippy::needless_range_loop)]
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let context = kept[j].0 as usize;
                    let c_off = center as usize * dim;
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    for n in 0..=config.negative_samples {
                        let (target, label) = if n == 0 {
                            (context, 1.0)
                        } else {
                            let t = sampler.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let t_off = target * dim;
                        let h = &input[c_off..c_off + dim];
                        let out = &mut output[t_off..t_off + dim];
                        let score: f64 = h.iter().zip(out.iter()).map(|(a, b)| a * b).sum();
                        let g = (label - sigmoid(score)) * lr;
                        for d in 0..dim {
                            grad[d] += g * out[d];
                            out[d] += g * h[d];
                        }
                    }
                    for (x, g) in input[c_off..c_off + dim].iter_mut().zip(&grad) {
                        *x += g;
                    }
                }
            }
        }
    }

    Ok(vocab
        .words
        .into_iter()
        .enumerate()
        .map(|(i, w)| (w, input[i * dim..(i + 1) * dim].to_vec()))
        .collect())
}
