//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use mtlab::mtlnet::{Batch, Features, ModelConfig, MultitaskModel, TaskBatch};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Visits every permutation of `items` (Heap's algorithm).
pub fn for_each_permutation(items: &mut [usize], mut visit: impl FnMut(&[usize])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    visit(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn entropy(labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    let mut counts = std::collections::BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information from the joint distribution of label pairs.
pub fn mutual_information(u: &[usize], v: &[usize]) -> f64 {
    let pairs: Vec<usize> = u.iter().zip(v).map(|(&a, &b)| a * 1000 + b).collect();
    entropy(u) + entropy(v) - entropy(&pairs)
}

/// Adjusted mutual information with the chance term averaged over every
/// relabeling of `v`'s positions.
pub fn ami_by_permutation(u: &[usize], v: &[usize]) -> f64 {
    let single = |x: &[usize]| x.iter().all(|&l| l == x[0]);
    if single(u) && single(v) {
        return 1.0;
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    let mut total = 0.0;
    let mut count = 0usize;
    let mut permuted = vec![0; v.len()];
    for_each_permutation(&mut order, |p| {
        for (slot, &i) in permuted.iter_mut().zip(p) {
            *slot = v[i];
        }
        total += mutual_information(u, &permuted);
        count += 1;
    });
    let emi = total / count as f64;
    let denom = entropy(u).max(entropy(v)) - emi;
    if denom <= 1e-12 {
        return 0.0;
    }
    (mutual_information(u, v) - emi) / denom
}

/// Random labeling pair with `1..=max_n` items over up to 4 labels each.
pub fn random_pair(rng: &mut ChaCha8Rng, max_n: usize) -> (Vec<usize>, Vec<usize>) {
    let n = rng.random_range(1..=max_n);
    let ku = rng.random_range(1..=4);
    let kv = rng.random_range(1..=4);
    let u = (0..n).map(|_| rng.random_range(0..ku)).collect();
    let v = (0..n).map(|_| rng.random_range(0..kv)).collect();
    (u, v)
}

/// Largest per-coordinate relative error between analytic and central
/// finite-difference gradients for one random small model.
pub fn gradient_check(seed: u64, h: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cfg = ModelConfig::new(14, 5, vec![3, 4]);
    cfg.seed = seed;
    let mut model = MultitaskModel::init(cfg).unwrap();
    // Non-zero biases so their gradients are exercised away from init.
    for slice in model.params_mut().slices_mut() {
        for p in slice.iter_mut() {
            *p += rng.random_range(-0.3..0.3);
        }
    }
    let features =
        Features::from_rows(14, (0..4).map(|_| (0..14).map(|_| rng.random_range(-1.0..1.0)).collect())).unwrap();
    let batch = Batch {
        features: &features,
        tasks: vec![
            TaskBatch {
                task: 0,
                rows: vec![0, 1, 2, 3],
                labels: (0..4).map(|_| rng.random_range(0..3)).collect(),
            },
            TaskBatch {
                task: 1,
                rows: vec![3, 1, 0, 2],
                labels: (0..4).map(|_| rng.random_range(0..4)).collect(),
            },
        ],
    };
    let analytic = model.gradients(&batch).unwrap();
    let analytic: Vec<f64> = analytic.slices().concat();
    let mut worst: f64 = 0.0;
    let mut index = 0;
    let slices = model.params().slices().len();
    for s in 0..slices {
        let len = model.params().slices()[s].len();
        for k in 0..len {
            let original = model.params().slices()[s][k];
            model.params_mut().slices_mut()[s][k] = original + h;
            let plus = model.batch_loss(&batch).unwrap();
            model.params_mut().slices_mut()[s][k] = original - h;
            let minus = model.batch_loss(&batch).unwrap();
            model.params_mut().slices_mut()[s][k] = original;
            let numeric = (plus - minus) / (2.0 * h);
            let a = analytic[index];
            let scale = a.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max((a - numeric).abs() / scale);
            index += 1;
        }
    }
    worst
}
