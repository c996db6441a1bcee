use crate::corpus::{
    convert_io_to_iob2, embed_window, load_vectors, synth, window_at, EmbeddingTable, LabeledCorpus,
    Scheme,
};
use crate::mtlnet::{span_f1, train, Features, ModelConfig, MultitaskModel, TrainingSet};
use crate::tasksim::simulate_tasks;
use crate::{seed, Error, Result};

use super::{Cell, ExperimentRecord, SweepGrid};

/// Held-out tail size when the grid does not set one.
const DEFAULT_EVAL_TOKENS: usize = 2000;

/// Everything a sweep shares between cells: features, labels and the
/// held-out evaluation sentences.
#[derive(Debug, Clone)]
pub struct SweepContext {
    grid: SweepGrid,
    labels: Vec<String>,
    /// IO label index of each training token, in corpus order.
    train_labels: Vec<usize>,
    /// Training windows first, then evaluation windows.
    features: Features,
    train_rows: usize,
    /// Gold IOB2 labels of each evaluation sentence.
    eval_gold: Vec<Vec<String>>,
}

impl SweepContext {
    pub fn new(grid: &SweepGrid) -> Result<Self> {
        grid.validate()?;
        let corpus = match &grid.corpus {
            Some(path) => LabeledCorpus::read(path, Scheme::Iob1)?,
            None => synth::bundled(),
        };
        let table = match &grid.model.vectors {
            Some(path) => load_vectors(path)?,
            None => EmbeddingTable::hashed(grid.model.embedding_dim, grid.seed),
        }
        .with_seed(seed::derive(grid.seed, &[seed::fnv1a(b"embedding")]));
        Self::build(grid, &corpus, &table)
    }

    fn build(grid: &SweepGrid, corpus: &LabeledCorpus, table: &EmbeddingTable) -> Result<Self> {
        let io = match corpus.scheme() {
            Scheme::Io => corpus.clone(),
            _ => corpus.convert_iob_to_io()?,
        };
        let total = corpus.token_count();
        let want_eval = grid
            .eval_tokens
            .unwrap_or_else(|| DEFAULT_EVAL_TOKENS.min(total / 5))
            .max(1);

        let sentences = corpus.sentences();
        let mut first_eval = sentences.len();
        let mut eval_tokens = 0;
        while first_eval > 0 && eval_tokens < want_eval {
            first_eval -= 1;
            eval_tokens += sentences[first_eval].len();
        }
        let available = total - eval_tokens;
        let needed = grid
            .cells()
            .iter()
            .map(|c| c.n.max(c.synthetic_tokens()))
            .max()
            .unwrap_or(0);
        if needed > available {
            return Err(Error::NotEnoughTokens {
                requested: needed,
                available,
            });
        }

        let positions = (0..first_eval)
            .flat_map(|s| (0..sentences[s].len()).map(move |p| (s, p)))
            .take(needed)
            .chain((first_eval..sentences.len()).flat_map(|s| (0..sentences[s].len()).map(move |p| (s, p))));
        let mut features = Features::new(7 * table.dim());
        for (s, p) in positions {
            features.push(&embed_window(&window_at(&io, s, p), table))?;
        }
        let train_labels = io.label_indices().into_iter().take(needed).collect();
        Ok(SweepContext {
            grid: grid.clone(),
            labels: io.label_set().to_vec(),
            train_labels,
            features,
            train_rows: needed,
            eval_gold: (first_eval..sentences.len()).map(|s| corpus.sentence_iob2(s)).collect(),
        })
    }

    /// Context over an explicit corpus and embedding table instead of the
    /// grid's own sources.
    pub fn with_corpus(grid: &SweepGrid, corpus: &LabeledCorpus, table: &EmbeddingTable) -> Result<Self> {
        grid.validate()?;
        Self::build(grid, corpus, table)
    }

    pub fn grid(&self) -> &SweepGrid {
        &self.grid
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn eval_token_count(&self) -> usize {
        self.eval_gold.iter().map(Vec::len).sum()
    }

    /// Trains one model on the cell's data and returns its span F1 on the
    /// held-out sentences, plus the AMI of each synthetic task.
    fn run_once(&self, cell: &Cell, run_seed: u64) -> Result<(f64, Vec<f64>)> {
        let m = &self.grid.model;
        let n_syn = cell.synthetic_tokens();
        let ts = simulate_tasks(
            &self.train_labels,
            &self.labels,
            cell.tasks,
            n_syn,
            &vec![cell.alpha; cell.tasks - 1],
            seed::derive(run_seed, &[0]),
        )?;
        let data = TrainingSet::from_task_set(&self.features, &ts, cell.n)?;
        let mut config = ModelConfig::new(
            self.features.dim(),
            m.hidden_dim,
            vec![self.labels.len(); cell.tasks],
        );
        config.seed = seed::derive(run_seed, &[1]);
        config.epochs = m.epochs;
        config.batch_size = m.batch_size;
        config.adam = m.adam;
        config.loss_norm = m.loss_norm;
        let mut model = MultitaskModel::init(config)?;
        train(&mut model, &data)?;

        let eval_rows: Vec<usize> = (self.train_rows..self.features.len()).collect();
        let predicted = model.predict(&self.features, &eval_rows, 0)?;
        let mut pred = Vec::with_capacity(self.eval_gold.len());
        let mut at = 0;
        for gold in &self.eval_gold {
            let io: Vec<String> = predicted[at..at + gold.len()]
                .iter()
                .map(|&k| self.labels[k].clone())
                .collect();
            pred.push(convert_io_to_iob2(&io));
            at += gold.len();
        }
        let f1 = span_f1(&self.eval_gold, &pred)?.f1;
        Ok((f1, ts.ami))
    }
}

/// Runs every repetition of one cell and averages them.
pub fn run_cell(ctx: &SweepContext, cell: &Cell) -> Result<ExperimentRecord> {
    let runs = ctx.grid.runs;
    let cell_seed = cell.seed(ctx.grid.seed);
    let mut f1s = Vec::with_capacity(runs);
    let mut ami_tasks = vec![0.0; cell.tasks - 1];
    for r in 0..runs {
        let (f1, ami) = ctx.run_once(cell, seed::derive(cell_seed, &[r as u64]))?;
        f1s.push(f1);
        for (acc, a) in ami_tasks.iter_mut().zip(ami) {
            *acc += a / runs as f64;
        }
    }
    let f1_mean = f1s.iter().sum::<f64>() / runs as f64;
    let f1_std = (f1s.iter().map(|f| (f - f1_mean).powi(2)).sum::<f64>() / runs as f64).sqrt();
    let ami = if ami_tasks.is_empty() {
        0.0
    } else {
        ami_tasks.iter().sum::<f64>() / ami_tasks.len() as f64
    };
    Ok(ExperimentRecord {
        n: cell.n,
        n_syn: cell.n_syn,
        tasks: cell.tasks,
        alpha: cell.alpha,
        ami,
        f1_mean,
        f1_std,
        runs,
        seed: cell_seed,
        ami_tasks,
    })
}
