use rand::seq::SliceRandom;

use super::{AdamState, Batch, Features, MultitaskModel, TaskBatch};
use crate::tasksim::TaskSet;
use crate::{seed, Error, Result};

/// Training samples of one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskData {
    pub rows: Vec<usize>,
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TrainingSet<'a> {
    pub features: &'a Features,
    pub tasks: Vec<TaskData>,
}

impl<'a> TrainingSet<'a> {
    /// Task 0 is the real task over the first `real_rows` samples; task
    /// `t > 0` is synthetic column `t - 1` over all `ts.n` samples.
    pub fn from_task_set(features: &'a Features, ts: &TaskSet, real_rows: usize) -> Result<Self> {
        if features.len() < ts.n || real_rows > ts.n {
            return Err(Error::NotEnoughTokens {
                requested: ts.n.max(real_rows),
                available: features.len().min(ts.n),
            });
        }
        let mut tasks = vec![TaskData {
            rows: (0..real_rows).collect(),
            labels: ts.real[..real_rows].to_vec(),
        }];
        tasks.extend(ts.synthetic.iter().map(|col| TaskData {
            rows: (0..ts.n).collect(),
            labels: col.clone(),
        }));
        Ok(TrainingSet { features, tasks })
    }
}

/// Endless reshuffled pass over one task's samples.
///
/// The shuffle depends only on the seed, the task size and the pass number,
/// so equally sized tasks visit their samples in the same order.
struct Cycler {
    len: usize,
    seed: u64,
    pass: u64,
    order: Vec<usize>,
    pos: usize,
}

impl Cycler {
    fn new(len: usize, seed: u64) -> Self {
        let mut c = Cycler {
            len,
            seed,
            pass: 0,
            order: (0..len).collect(),
            pos: 0,
        };
        c.shuffle();
        c
    }

    fn shuffle(&mut self) {
        let key = seed::derive(self.seed, &[self.len as u64, self.pass]);
        self.order.sort_unstable();
        self.order.shuffle(&mut seed::rng(key));
    }

    fn take(&mut self, k: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            if self.pos == self.len {
                self.pass += 1;
                self.pos = 0;
                self.shuffle();
            }
            let step = (k - out.len()).min(self.len - self.pos);
            out.extend_from_slice(&self.order[self.pos..self.pos + step]);
            self.pos += step;
        }
        out
    }
}

/// Trains with Adam and returns the mean batch loss of every epoch.
///
/// Every step draws up to `batch_size` samples from each task. An epoch is
/// as many steps as one pass over the largest task needs.
pub fn train(model: &mut MultitaskModel, data: &TrainingSet<'_>) -> Result<Vec<f64>> {
    let cfg = model.config().clone();
    if data.tasks.len() != cfg.tasks.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} task datasets for a {}-task model",
            data.tasks.len(),
            cfg.tasks.len()
        )));
    }
    for (t, td) in data.tasks.iter().enumerate() {
        if td.rows.len() != td.labels.len() {
            return Err(Error::ShapeMismatch(format!("task {t}: rows and labels differ in length")));
        }
    }
    let largest = data.tasks.iter().map(|t| t.rows.len()).max().unwrap_or(0);
    if largest == 0 {
        return Err(Error::EmptyInput);
    }
    let steps = largest.div_ceil(cfg.batch_size);
    let shuffle_seed = seed::derive(cfg.seed, &[0x7261_696e]);
    let mut cyclers: Vec<Cycler> = data
        .tasks
        .iter()
        .map(|t| Cycler::new(t.rows.len(), shuffle_seed))
        .collect();
    let mut adam = AdamState::new(model.params());
    let mut history = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        for _ in 0..steps {
            let tasks = data
                .tasks
                .iter()
                .zip(cyclers.iter_mut())
                .enumerate()
                .map(|(t, (td, cyc))| {
                    let k = cfg.batch_size.min(td.rows.len());
                    let picks = cyc.take(k);
                    TaskBatch {
                        task: t,
                        rows: picks.iter().map(|&i| td.rows[i]).collect(),
                        labels: picks.iter().map(|&i| td.labels[i]).collect(),
                    }
                })
                .collect();
            let batch = Batch {
                features: data.features,
                tasks,
            };
            let (loss, grads) = model.loss_and_gradients(&batch)?;
            adam.step(model.params_mut(), &grads, &cfg.adam);
            epoch_loss += loss;
        }
        history.push(epoch_loss / steps as f64);
    }
    Ok(history)
}

/// `epoch,loss` CSV with epochs counted from 1.
pub fn loss_history_csv(history: &[f64]) -> String {
    let mut out = String::from("epoch,loss\n");
    for (e, l) in history.iter().enumerate() {
        out.push_str(&format!("{},{}\n", e + 1, l));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtlnet::ModelConfig;
    use rand::Rng;

    fn separable(n: usize) -> (Features, Vec<usize>) {
        let mut rng = seed::rng(99);
        let mut f = Features::new(4);
        let mut labels = Vec::new();
        for _ in 0..n {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            labels.push(usize::from(x[0] + 0.5 * x[1] > 0.0));
            f.push(&x).unwrap();
        }
        (f, labels)
    }

    #[test]
    fn loss_decreases_on_separable_data() {
        let (f, labels) = separable(200);
        let mut cfg = ModelConfig::new(4, 8, vec![2]);
        cfg.epochs = 30;
        cfg.batch_size = 50;
        let mut m = MultitaskModel::init(cfg).unwrap();
        let data = TrainingSet {
            features: &f,
            tasks: vec![TaskData { rows: (0..200).collect(), labels }],
        };
        let history = train(&mut m, &data).unwrap();
        assert_eq!(history.len(), 30);
        assert!(history.last().unwrap() < &history[0]);
        assert!(m.params().all_finite());
    }

    #[test]
    fn same_seed_same_history() {
        let (f, labels) = separable(120);
        let run = || {
            let mut cfg = ModelConfig::new(4, 5, vec![2, 2]);
            cfg.epochs = 5;
            cfg.batch_size = 32;
            cfg.seed = 3;
            let mut m = MultitaskModel::init(cfg).unwrap();
            let flipped: Vec<usize> = labels.iter().map(|l| 1 - l).collect();
            let data = TrainingSet {
                features: &f,
                tasks: vec![
                    TaskData { rows: (0..120).collect(), labels: labels.clone() },
                    TaskData { rows: (0..60).collect(), labels: flipped[..60].to_vec() },
                ],
            };
            let h = train(&mut m, &data).unwrap();
            (h, m)
        };
        let (h1, m1) = run();
        let (h2, m2) = run();
        assert_eq!(h1, h2);
        assert_eq!(m1, m2);
    }

    #[test]
    fn twin_tasks_keep_identical_heads() {
        let (f, labels) = separable(150);
        let mut cfg = ModelConfig::new(4, 6, vec![2, 2, 2]);
        cfg.epochs = 8;
        cfg.batch_size = 40;
        cfg.tie_heads = true;
        let mut m = MultitaskModel::init(cfg).unwrap();
        let td = TaskData { rows: (0..150).collect(), labels };
        let data = TrainingSet { features: &f, tasks: vec![td.clone(), td.clone(), td] };
        train(&mut m, &data).unwrap();
        let heads = &m.params().heads;
        assert_eq!(heads[0], heads[1]);
        assert_eq!(heads[1], heads[2]);
    }

    #[test]
    fn cycler_wraps_with_fresh_order() {
        let mut c = Cycler::new(5, 1);
        let first = c.take(5);
        let mut sorted = first.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        assert_eq!(c.take(7).len(), 7);
    }

    #[test]
    fn history_csv() {
        assert_eq!(loss_history_csv(&[1.5, 0.25]), "epoch,loss\n1,1.5\n2,0.25\n");
    }
}
