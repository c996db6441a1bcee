//! Synthetic related tasks and the information measures used to grade them.

mod info;
mod simulate;

pub use info::{
    adjusted_mutual_information, contingency, entropy, expected_mutual_information,
    mutual_information, ContingencyTable,
};
pub use simulate::{generate_label_matrix, simulate_tasks, LabelMatrix, TaskSet};
