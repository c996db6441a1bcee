use std::path::Path;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Balanced,
    Unbalanced,
}

impl Schema {
    pub fn header(self) -> &'static [&'static str] {
        match self {
            Schema::Balanced => &["n", "T", "alpha", "ami", "f1_mean", "f1_std", "runs", "seed", "ami_tasks"],
            Schema::Unbalanced => &[
                "n_ner", "n_syn", "T", "alpha", "ami", "f1_mean", "f1_std", "runs", "seed", "ami_tasks",
            ],
        }
    }
}

/// Outcome of one sweep cell averaged over its runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    /// Real-task tokens (`n_ner` in unbalanced sets).
    pub n: usize,
    pub n_syn: Option<usize>,
    pub tasks: usize,
    pub alpha: f64,
    /// Mean measured AMI over synthetic tasks and runs; 0 without synthetic tasks.
    pub ami: f64,
    pub f1_mean: f64,
    /// Population standard deviation over runs.
    pub f1_std: f64,
    pub runs: usize,
    pub seed: u64,
    /// Per-synthetic-task AMI averaged over runs.
    pub ami_tasks: Vec<f64>,
}

impl ExperimentRecord {
    /// Value of a named numeric column.
    pub fn column(&self, name: &str) -> Result<f64> {
        Ok(match (name, self.n_syn) {
            ("n", None) | ("n_ner", Some(_)) => self.n as f64,
            ("n_syn", Some(s)) => s as f64,
            ("T", _) => self.tasks as f64,
            ("alpha", _) => self.alpha,
            ("ami", _) => self.ami,
            ("f1_mean", _) => self.f1_mean,
            ("f1_std", _) => self.f1_std,
            ("runs", _) => self.runs as f64,
            _ => return Err(Error::UnknownColumn(name.to_string())),
        })
    }

    fn fields(&self) -> Vec<String> {
        let ami_tasks = self
            .ami_tasks
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(";");
        let mut out = vec![self.n.to_string()];
        out.extend(self.n_syn.map(|s| s.to_string()));
        out.extend([
            self.tasks.to_string(),
            self.alpha.to_string(),
            self.ami.to_string(),
            self.f1_mean.to_string(),
            self.f1_std.to_string(),
            self.runs.to_string(),
            self.seed.to_string(),
            ami_tasks,
        ]);
        out
    }
}

/// Records of one sweep, all with the same schema.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordSet {
    pub schema: Schema,
    pub records: Vec<ExperimentRecord>,
}

impl RecordSet {
    pub fn new(schema: Schema) -> Self {
        RecordSet {
            schema,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.schema.header())?;
        for r in &self.records {
            w.write_record(r.fields())?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Parses CSV text. With `expect` set, a file of the other schema is an error.
    pub fn from_csv(text: &str, expect: Option<Schema>) -> Result<RecordSet> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        let has = |c: &str| headers.iter().any(|h| h == c);
        let schema = if has("n_ner") || has("n_syn") {
            Schema::Unbalanced
        } else {
            Schema::Balanced
        };
        if let Some(e) = expect.filter(|&e| e != schema) {
            return Err(Error::SchemaMismatch(format!(
                "expected a {e:?} record file, found {schema:?} columns"
            )));
        }
        let required = &schema.header()[..schema.header().len() - 1];
        let index = |c: &str| headers.iter().position(|h| h == c);
        if let Some(missing) = required.iter().find(|c| index(c).is_none()) {
            return Err(Error::SchemaMismatch(format!("missing column {missing:?}")));
        }
        let col = |c: &str| index(c).expect("checked above");
        let mut set = RecordSet::new(schema);
        for (line, row) in reader.records().enumerate() {
            let row = row?;
            let field = |c: &str| row.get(col(c)).unwrap_or("");
            let bad = |c: &str| {
                Error::SchemaMismatch(format!("row {}: bad value {:?} in {c}", line + 2, field(c)))
            };
            let int = |c: &str| field(c).parse::<usize>().map_err(|_| bad(c));
            let real = |c: &str| field(c).parse::<f64>().map_err(|_| bad(c));
            let ami_tasks = match index("ami_tasks").and_then(|i| row.get(i)) {
                None | Some("") => Vec::new(),
                Some(s) => s
                    .split(';')
                    .map(|v| v.parse::<f64>().map_err(|_| bad("ami_tasks")))
                    .collect::<Result<_>>()?,
            };
            let (n, n_syn) = match schema {
                Schema::Balanced => (int("n")?, None),
                Schema::Unbalanced => (int("n_ner")?, Some(int("n_syn")?)),
            };
            set.records.push(ExperimentRecord {
                n,
                n_syn,
                tasks: int("T")?,
                alpha: real("alpha")?,
                ami: real("ami")?,
                f1_mean: real("f1_mean")?,
                f1_std: real("f1_std")?,
                runs: int("runs")?,
                seed: field("seed").parse().map_err(|_| bad("seed"))?,
                ami_tasks,
            });
        }
        Ok(set)
    }

    /// One row of the named columns per record.
    pub fn columns(&self, names: &[&str]) -> Result<Vec<Vec<f64>>> {
        self.records
            .iter()
            .map(|r| names.iter().map(|c| r.column(c)).collect())
            .collect()
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        self.records.iter().map(|r| r.column(name)).collect()
    }
}

pub fn save_records(rs: &RecordSet, path: &Path) -> Result<()> {
    std::fs::write(path, rs.to_csv()?)?;
    Ok(())
}

pub fn load_records(path: &Path, expect: Option<Schema>) -> Result<RecordSet> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })?;
    RecordSet::from_csv(&text, expect)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample(schema: Schema) -> RecordSet {
        let records = (0..4)
            .map(|i| ExperimentRecord {
                n: 1000 * (i + 1),
                n_syn: (schema == Schema::Unbalanced).then_some(5000),
                tasks: 2,
                alpha: 0.1 + 0.2 * i as f64,
                ami: 0.123456789012345 * i as f64,
                f1_mean: 0.5 + 0.01 * i as f64,
                f1_std: 0.02,
                runs: 5,
                seed: u64::MAX - i as u64,
                ami_tasks: if i == 0 { vec![] } else { vec![0.1, 1.0 / 3.0] },
            })
            .collect();
        RecordSet { schema, records }
    }

    #[test]
    fn csv_round_trip() {
        for schema in [Schema::Balanced, Schema::Unbalanced] {
            let rs = sample(schema);
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("r.csv");
            save_records(&rs, &path).unwrap();
            assert_eq!(load_records(&path, Some(schema)).unwrap(), rs);
        }
    }

    #[test]
    fn header_matches_interface() {
        let text = sample(Schema::Balanced).to_csv().unwrap();
        assert!(text.starts_with("n,T,alpha,ami,f1_mean,f1_std,runs,seed,ami_tasks\n"));
        let text = sample(Schema::Unbalanced).to_csv().unwrap();
        assert!(text.starts_with("n_ner,n_syn,T,alpha,ami,f1_mean,f1_std,runs,seed"));
    }

    #[test]
    fn missing_ami_column() {
        let text = "n,T,alpha,f1_mean,f1_std,runs,seed\n1000,2,0.9,0.5,0.0,5,1\n";
        assert!(matches!(RecordSet::from_csv(text, None), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn aux_column_is_optional() {
        let text = "n,T,alpha,ami,f1_mean,f1_std,runs,seed\n1000,2,0.9,0.7,0.5,0,5,1\n";
        let rs = RecordSet::from_csv(text, Some(Schema::Balanced)).unwrap();
        assert!(rs.records[0].ami_tasks.is_empty());
    }

    #[test]
    fn schema_tag_is_checked() {
        let text = sample(Schema::Balanced).to_csv().unwrap();
        assert!(matches!(
            RecordSet::from_csv(&text, Some(Schema::Unbalanced)),
            Err(Error::SchemaMismatch(_))
        ));
    }

    #[test]
    fn named_columns() {
        let rs = sample(Schema::Balanced);
        assert_eq!(rs.columns(&["n", "T", "ami"]).unwrap()[1].len(), 3);
        assert!(matches!(rs.column("bogus"), Err(Error::UnknownColumn(_))));
        assert!(rs.column("n_ner").is_err());
        assert_eq!(sample(Schema::Unbalanced).column("n_syn").unwrap()[0], 5000.0);
    }
}
