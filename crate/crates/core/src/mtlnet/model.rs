use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AdamConfig;
use crate::{seed, Error, Result};

/// How per-task losses are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossNorm {
    /// Sum over tasks of each task's mean loss.
    #[default]
    Sum,
    /// The same sum divided by the number of tasks in the batch.
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub input_dim: usize,
    pub hidden_dim: usize,
    /// Label count of each task; the task id is the position.
    pub tasks: Vec<usize>,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    #[serde(default)]
    pub loss_norm: LossNorm,
    /// Initialize every head with the same draw (heads must share a label count).
    #[serde(default)]
    pub tie_heads: bool,
}

impl ModelConfig {
    pub fn new(input_dim: usize, hidden_dim: usize, tasks: Vec<usize>) -> Self {
        ModelConfig {
            input_dim,
            hidden_dim,
            tasks,
            seed: 0,
            epochs: 100,
            batch_size: 100,
            adam: AdamConfig::default(),
            loss_norm: LossNorm::Sum,
            tie_heads: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.input_dim == 0 || self.hidden_dim == 0 {
            return bad(format!(
                "dimensions must be positive (input {}, hidden {})",
                self.input_dim, self.hidden_dim
            ));
        }
        if self.tasks.is_empty() {
            return bad("at least one task is required".into());
        }
        if let Some(t) = self.tasks.iter().position(|&c| c == 0) {
            return bad(format!("task {t} has no labels"));
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive".into());
        }
        if self.tie_heads && self.tasks.iter().any(|&c| c != self.tasks[0]) {
            return bad("tied heads need equal label counts".into());
        }
        if !(self.adam.lr > 0.0 && self.adam.eps > 0.0) {
            return bad("learning rate and epsilon must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskHead {
    /// `labels x hidden`, row-major.
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

/// Every trainable array. Gradients and optimizer moments use the same shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// `hidden x input`, row-major.
    pub shared_w: Vec<f64>,
    pub shared_b: Vec<f64>,
    pub heads: Vec<TaskHead>,
}

impl Parameters {
    pub fn zeros_like(&self) -> Parameters {
        Parameters {
            shared_w: vec![0.0; self.shared_w.len()],
            shared_b: vec![0.0; self.shared_b.len()],
            heads: self
                .heads
                .iter()
                .map(|h| TaskHead {
                    w: vec![0.0; h.w.len()],
                    b: vec![0.0; h.b.len()],
                })
                .collect(),
        }
    }

    pub fn slices(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = vec![&self.shared_w, &self.shared_b];
        for h in &self.heads {
            out.push(&h.w);
            out.push(&h.b);
        }
        out
    }

    pub fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = vec![&mut self.shared_w, &mut self.shared_b];
        for h in &mut self.heads {
            out.push(&mut h.w);
            out.push(&mut h.b);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn norm(&self) -> f64 {
        self.slices().iter().flat_map(|s| s.iter()).map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|x| x.is_finite()))
    }
}

/// Row-major sample matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Features {
    dim: usize,
    data: Vec<f64>,
}

impl Features {
    pub fn new(dim: usize) -> Self {
        Features { dim, data: Vec::new() }
    }

    pub fn from_rows(dim: usize, rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Self> {
        let mut f = Features::new(dim);
        for row in rows {
            f.push(&row)?;
        }
        Ok(f)
    }

    pub fn push(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "feature row has {} values, expected {}",
                row.len(),
                self.dim
            )));
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Samples of one task: row indices into the shared feature matrix and
/// their gold label indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskBatch {
    pub task: usize,
    pub rows: Vec<usize>,
    pub labels: Vec<usize>,
}

/// One optimization step's worth of data, a sub-batch per task.
#[derive(Debug, Clone)]
pub struct Batch<'a> {
    pub features: &'a Features,
    pub tasks: Vec<TaskBatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultitaskModel {
    config: ModelConfig,
    params: Parameters,
}

fn glorot(rng: &mut impl Rng, fan_in: usize, fan_out: usize) -> Vec<f64> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..fan_in * fan_out).map(|_| rng.random_range(-limit..=limit)).collect()
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Log-softmax pieces: returns `(probabilities, log-sum-exp)`.
fn softmax(logits: &[f64]) -> (Vec<f64>, f64) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    (exps.iter().map(|e| e / sum).collect(), max + sum.ln())
}

impl MultitaskModel {
    /// Glorot-uniform weights and zero biases, reproducible from `cfg.seed`.
    pub fn init(cfg: ModelConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = seed::rng_stream(cfg.seed, 0);
        let shared_w = glorot(&mut rng, cfg.input_dim, cfg.hidden_dim);
        let heads = cfg
            .tasks
            .iter()
            .enumerate()
            .map(|(t, &labels)| {
                let stream = if cfg.tie_heads { 1 } else { 1 + t as u64 };
                let mut rng = seed::rng_stream(cfg.seed, stream);
                TaskHead {
                    w: glorot(&mut rng, cfg.hidden_dim, labels),
                    b: vec![0.0; labels],
                }
            })
            .collect();
        let params = Parameters {
            shared_w,
            shared_b: vec![0.0; cfg.hidden_dim],
            heads,
        };
        Ok(MultitaskModel { config: cfg, params })
    }

    /// Wraps explicit parameters after checking their shapes.
    pub fn from_parts(config: ModelConfig, params: Parameters) -> Result<Self> {
        config.validate()?;
        let (h, d) = (config.hidden_dim, config.input_dim);
        let mismatch = |what: &str| Err(Error::ShapeMismatch(what.to_string()));
        if params.shared_w.len() != h * d || params.shared_b.len() != h {
            return mismatch("shared layer");
        }
        if params.heads.len() != config.tasks.len() {
            return mismatch("head count");
        }
        for (head, &c) in params.heads.iter().zip(&config.tasks) {
            if head.w.len() != c * h || head.b.len() != c {
                return mismatch("task head");
            }
        }
        if !params.all_finite() {
            return Err(Error::InvalidConfig("non-finite parameter".into()));
        }
        Ok(MultitaskModel { config, params })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut Parameters {
        &mut self.params
    }

    pub fn task_count(&self) -> usize {
        self.config.tasks.len()
    }

    fn check_task(&self, task: usize) -> Result<()> {
        if task < self.config.tasks.len() {
            Ok(())
        } else {
            Err(Error::UnknownTask(task))
        }
    }

    fn encode_into(&self, x: &[f64], hidden: &mut [f64]) {
        let d = self.config.input_dim;
        for (j, h) in hidden.iter_mut().enumerate() {
            let w = &self.params.shared_w[j * d..(j + 1) * d];
            *h = (dot(w, x) + self.params.shared_b[j]).tanh();
        }
    }

    fn logits(&self, task: usize, hidden: &[f64]) -> Vec<f64> {
        let head = &self.params.heads[task];
        let h = self.config.hidden_dim;
        head.b
            .iter()
            .enumerate()
            .map(|(c, b)| dot(&head.w[c * h..(c + 1) * h], hidden) + b)
            .collect()
    }

    /// Label distribution of `task` for one feature vector.
    pub fn forward(&self, x: &[f64], task: usize) -> Result<Vec<f64>> {
        self.check_task(task)?;
        if x.len() != self.config.input_dim {
            return Err(Error::ShapeMismatch(format!(
                "input has {} values, expected {}",
                x.len(),
                self.config.input_dim
            )));
        }
        let mut hidden = vec![0.0; self.config.hidden_dim];
        self.encode_into(x, &mut hidden);
        Ok(softmax(&self.logits(task, &hidden)).0)
    }

    /// Argmax label of `task` for each row; ties go to the lowest index.
    pub fn predict(&self, features: &Features, rows: &[usize], task: usize) -> Result<Vec<usize>> {
        self.check_task(task)?;
        if features.dim() != self.config.input_dim {
            return Err(Error::ShapeMismatch("feature dimension".into()));
        }
        let mut hidden = vec![0.0; self.config.hidden_dim];
        Ok(rows
            .iter()
            .map(|&r| {
                self.encode_into(features.row(r), &mut hidden);
                let logits = self.logits(task, &hidden);
                let mut best = 0;
                for (c, &z) in logits.iter().enumerate() {
                    if z > logits[best] {
                        best = c;
                    }
                }
                best
            })
            .collect())
    }

    pub fn batch_loss(&self, batch: &Batch<'_>) -> Result<f64> {
        Ok(self.evaluate(batch, false)?.0)
    }

    /// Exact gradient of [`batch_loss`](Self::batch_loss).
    pub fn gradients(&self, batch: &Batch<'_>) -> Result<Parameters> {
        Ok(self.evaluate(batch, true)?.1.expect("gradient requested"))
    }

    pub fn loss_and_gradients(&self, batch: &Batch<'_>) -> Result<(f64, Parameters)> {
        let (loss, grad) = self.evaluate(batch, true)?;
        Ok((loss, grad.expect("gradient requested")))
    }

    fn validate_batch(&self, batch: &Batch<'_>) -> Result<()> {
        if batch.features.dim() != self.config.input_dim {
            return Err(Error::ShapeMismatch("feature dimension".into()));
        }
        if batch.tasks.iter().all(|tb| tb.rows.is_empty()) {
            return Err(Error::EmptyInput);
        }
        for tb in &batch.tasks {
            self.check_task(tb.task)?;
            if tb.rows.len() != tb.labels.len() {
                return Err(Error::ShapeMismatch(format!(
                    "task {} has {} rows and {} labels",
                    tb.task,
                    tb.rows.len(),
                    tb.labels.len()
                )));
            }
            let classes = self.config.tasks[tb.task];
            if tb.labels.iter().any(|&y| y >= classes) {
                return Err(Error::ShapeMismatch(format!(
                    "task {} label outside 0..{classes}",
                    tb.task
                )));
            }
            if tb.rows.iter().any(|&r| r >= batch.features.len()) {
                return Err(Error::ShapeMismatch("row index outside feature matrix".into()));
            }
        }
        Ok(())
    }

    fn evaluate(&self, batch: &Batch<'_>, want_grad: bool) -> Result<(f64, Option<Parameters>)> {
        self.validate_batch(batch)?;
        let hd = self.config.hidden_dim;
        let active = batch.tasks.iter().filter(|tb| !tb.rows.is_empty()).count();
        let task_weight = match self.config.loss_norm {
            LossNorm::Sum => 1.0,
            LossNorm::Mean => 1.0 / active as f64,
        };

        // Tasks sampling the same rows share one encoder pass.
        struct Group<'b> {
            rows: &'b [usize],
            hidden: Vec<f64>,
            dh: Vec<f64>,
        }
        let mut groups: Vec<Group<'_>> = Vec::new();
        let mut group_of = Vec::with_capacity(batch.tasks.len());
        for tb in &batch.tasks {
            let g = match groups.iter().position(|g| g.rows == tb.rows.as_slice()) {
                Some(g) => g,
                None => {
                    let mut hidden = vec![0.0; tb.rows.len() * hd];
                    for (k, &r) in tb.rows.iter().enumerate() {
                        self.encode_into(batch.features.row(r), &mut hidden[k * hd..(k + 1) * hd]);
                    }
                    let dh = if want_grad { vec![0.0; hidden.len()] } else { Vec::new() };
                    groups.push(Group {
                        rows: &tb.rows,
                        hidden,
                        dh,
                    });
                    groups.len() - 1
                }
            };
            group_of.push(g);
        }

        let mut grad = want_grad.then(|| self.params.zeros_like());
        let mut total = 0.0;
        for (tb, &g) in batch.tasks.iter().zip(&group_of) {
            if tb.rows.is_empty() {
                continue;
            }
            let head = &self.params.heads[tb.task];
            let scale = task_weight / tb.rows.len() as f64;
            let mut losses = Vec::with_capacity(tb.rows.len());
            let Group { hidden: all_hidden, dh: all_dh, .. } = &mut groups[g];
            for (k, &y) in tb.labels.iter().enumerate() {
                let hidden = &all_hidden[k * hd..(k + 1) * hd];
                let logits = self.logits(tb.task, hidden);
                let (probs, lse) = softmax(&logits);
                losses.push(lse - logits[y]);
                if let Some(grad) = grad.as_mut() {
                    let gh = &mut grad.heads[tb.task];
                    let mut dz = probs;
                    dz[y] -= 1.0;
                    let dh = &mut all_dh[k * hd..(k + 1) * hd];
                    for (c, &d) in dz.iter().enumerate() {
                        let d = d * scale;
                        axpy(d, hidden, &mut gh.w[c * hd..(c + 1) * hd]);
                        gh.b[c] += d;
                        axpy(d, &head.w[c * hd..(c + 1) * hd], dh);
                    }
                }
            }
            // Sorted summation keeps the loss exactly invariant to sample order.
            losses.sort_by(f64::total_cmp);
            total += task_weight * losses.iter().sum::<f64>() / tb.rows.len() as f64;
        }

        if let Some(grad) = grad.as_mut() {
            let d = self.config.input_dim;
            for group in &groups {
                for (k, &r) in group.rows.iter().enumerate() {
                    let x = batch.features.row(r);
                    let hidden = &group.hidden[k * hd..(k + 1) * hd];
                    let dh = &group.dh[k * hd..(k + 1) * hd];
                    for j in 0..hd {
                        let da = dh[j] * (1.0 - hidden[j] * hidden[j]);
                        if da != 0.0 {
                            axpy(da, x, &mut grad.shared_w[j * d..(j + 1) * d]);
                            grad.shared_b[j] += da;
                        }
                    }
                }
            }
        }
        Ok((total, grad))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MultitaskModel = serde_json::from_str(text)?;
        MultitaskModel::from_parts(raw.config, raw.params)
    }

    /// Writes a JSON checkpoint with the config and flat parameter arrays.
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::UnreadableFile {
            path: path.to_path_buf(),
            source,
        })?;
        MultitaskModel::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtlnet::AdamState;

    fn small(tasks: Vec<usize>, seed: u64) -> MultitaskModel {
        let mut cfg = ModelConfig::new(6, 4, tasks);
        cfg.seed = seed;
        MultitaskModel::init(cfg).unwrap()
    }

    fn zeroed(model: &MultitaskModel) -> MultitaskModel {
        let params = model.params().zeros_like();
        MultitaskModel::from_parts(model.config().clone(), params).unwrap()
    }

    #[test]
    fn init_is_deterministic_with_zero_biases() {
        let a = small(vec![5, 3], 11);
        assert_eq!(a, small(vec![5, 3], 11));
        assert_ne!(a, small(vec![5, 3], 12));
        assert!(a.params().shared_b.iter().all(|&b| b == 0.0));
        assert!(a.params().heads.iter().flat_map(|h| &h.b).all(|&b| b == 0.0));
        let limit = (6.0f64 / 10.0).sqrt();
        assert!(a.params().shared_w.iter().all(|w| w.abs() <= limit));
    }

    #[test]
    fn rejects_zero_hidden() {
        let cfg = ModelConfig::new(6, 0, vec![5]);
        assert!(matches!(MultitaskModel::init(cfg), Err(Error::InvalidConfig(_))));
        assert!(MultitaskModel::init(ModelConfig::new(6, 4, vec![])).is_err());
    }

    #[test]
    fn forward_is_a_distribution() {
        let m = small(vec![5], 1);
        let p = m.forward(&[0.3, -2.0, 1.0, 0.0, 5.0, -0.1], 0).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(p.iter().all(|&x| x > 0.0));
        assert!(matches!(m.forward(&[0.0; 6], 1), Err(Error::UnknownTask(1))));
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = zeroed(&small(vec![5], 1));
        for p in m.forward(&[1.0; 6], 0).unwrap() {
            assert!((p - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_ignores_logit_shift() {
        let mut m = small(vec![4], 3);
        let x = [0.5, 0.1, -0.3, 0.9, 0.0, 0.2];
        let before = m.forward(&x, 0).unwrap();
        m.params_mut().heads[0].b.iter_mut().for_each(|b| *b += 7.0);
        let after = m.forward(&x, 0).unwrap();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn features() -> Features {
        Features::from_rows(
            6,
            (0..8).map(|i| (0..6).map(|j| ((i * 7 + j * 3) % 5) as f64 / 5.0 - 0.4).collect()),
        )
        .unwrap()
    }

    #[test]
    fn uniform_loss_is_ln_c() {
        let m = zeroed(&small(vec![5], 1));
        let f = features();
        let batch = Batch {
            features: &f,
            tasks: vec![TaskBatch {
                task: 0,
                rows: vec![0, 1, 2],
                labels: vec![0, 3, 4],
            }],
        };
        assert!((m.batch_loss(&batch).unwrap() - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn task_losses_add_up() {
        let m = small(vec![3, 3], 5);
        let f = features();
        let one = |task| TaskBatch {
            task,
            rows: vec![0, 2, 5],
            labels: vec![1, 0, 2],
        };
        let single = m.batch_loss(&Batch { features: &f, tasks: vec![one(0)] }).unwrap();
        let mut tied = small(vec![3, 3], 5);
        let head = tied.params().heads[0].clone();
        tied.params_mut().heads[1] = head;
        let both = tied.batch_loss(&Batch { features: &f, tasks: vec![one(0), one(1)] }).unwrap();
        assert!((both - 2.0 * single).abs() < 1e-12);

        let mut mean_cfg = tied.config().clone();
        mean_cfg.loss_norm = LossNorm::Mean;
        let mean = MultitaskModel::from_parts(mean_cfg, tied.params().clone()).unwrap();
        let avg = mean.batch_loss(&Batch { features: &f, tasks: vec![one(0), one(1)] }).unwrap();
        assert!((avg - single).abs() < 1e-12);
    }

    /// Inputs are one-hot, the encoder saturates towards the sign pattern and
    /// the head reads it back with a large gain.
    fn perfect_model() -> (MultitaskModel, Features, Vec<usize>) {
        let cfg = ModelConfig::new(3, 3, vec![3]);
        let mut m = MultitaskModel::init(cfg).unwrap();
        let p = m.params_mut();
        p.shared_w = vec![20.0, 0.0, 0.0, 0.0, 20.0, 0.0, 0.0, 0.0, 20.0];
        p.shared_b = vec![-10.0; 3];
        p.heads[0].w = vec![60.0, 0.0, 0.0, 0.0, 60.0, 0.0, 0.0, 0.0, 60.0];
        let f = Features::from_rows(3, [vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]])
            .unwrap();
        (m, f, vec![0, 1, 2])
    }

    #[test]
    fn perfect_fit_has_zero_loss_and_gradient() {
        let (m, f, labels) = perfect_model();
        let batch = Batch {
            features: &f,
            tasks: vec![TaskBatch { task: 0, rows: vec![0, 1, 2], labels: labels.clone() }],
        };
        assert!(m.batch_loss(&batch).unwrap() < 1e-12);
        assert!(m.gradients(&batch).unwrap().norm() <= 1e-6);
        assert_eq!(m.predict(&f, &[0, 1, 2], 0).unwrap(), labels);
    }

    #[test]
    fn zero_model_predicts_first_label() {
        let m = zeroed(&small(vec![4], 2));
        let f = features();
        let rows: Vec<usize> = (0..f.len()).collect();
        assert_eq!(m.predict(&f, &rows, 0).unwrap(), vec![0; f.len()]);
        assert!(matches!(m.predict(&f, &rows, 3), Err(Error::UnknownTask(3))));
    }

    #[test]
    fn heads_ignore_other_tasks_data() {
        let m = small(vec![3, 3], 8);
        let f = features();
        let a = TaskBatch { task: 0, rows: vec![0, 1, 2], labels: vec![2, 1, 0] };
        let b = TaskBatch { task: 1, rows: vec![3, 4], labels: vec![0, 0] };
        let empty_b = TaskBatch { task: 1, rows: vec![], labels: vec![] };
        let g_both = m.gradients(&Batch { features: &f, tasks: vec![a.clone(), b] }).unwrap();
        let g_zeroed = m.gradients(&Batch { features: &f, tasks: vec![a, empty_b] }).unwrap();
        assert_eq!(g_both.heads[0], g_zeroed.heads[0]);
        assert!(g_zeroed.heads[1].w.iter().chain(&g_zeroed.heads[1].b).all(|&g| g == 0.0));
    }

    #[test]
    fn rejects_bad_batches() {
        let m = small(vec![3], 8);
        let f = features();
        let bad_label = TaskBatch { task: 0, rows: vec![0], labels: vec![3] };
        assert!(m.batch_loss(&Batch { features: &f, tasks: vec![bad_label] }).is_err());
        let ragged = TaskBatch { task: 0, rows: vec![0, 1], labels: vec![0] };
        assert!(m.batch_loss(&Batch { features: &f, tasks: vec![ragged] }).is_err());
        assert!(matches!(
            m.batch_loss(&Batch { features: &f, tasks: vec![] }),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn checkpoint_round_trip() {
        let m = small(vec![5, 2], 4);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        m.save(&path).unwrap();
        assert_eq!(MultitaskModel::load(&path).unwrap(), m);
    }

    #[test]
    fn adam_state_matches_parameter_shape() {
        let m = small(vec![5, 2], 4);
        let s = AdamState::new(m.params());
        assert_eq!(s.step_count(), 0);
    }
}
