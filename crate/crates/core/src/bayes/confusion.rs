use std::fmt::{self, Write as _};

/// Rows are the true labels of the test documents, columns the labels the
/// classifier assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        ConfusionMatrix {
            labels,
            counts: vec![vec![0; n]; n],
        }
    }

    pub fn record(&mut self, actual: usize, predicted: usize) {
        self.counts[actual][predicted] += 1;
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn count(&self, actual: usize, predicted: usize) -> u64 {
        self.counts[actual][predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Fraction of test documents on the diagonal; 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.correct() as f64 / total as f64
        }
    }

    /// True when every document sits on the diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.correct() == self.total()
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label_width = self.labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        let width = self
            .counts
            .iter()
            .flatten()
            .map(|c| c.to_string().len())
            .chain([label_width, 6])
            .max()
            .unwrap_or(6);
        let head = label_width.max(16);
        let mut line = format!("{:head$}", "actual\\predicted");
        for l in &self.labels {
            let _ = write!(line, "  {l:>width$}");
        }
        writeln!(f, "{}", line.trim_end())?;
        for (label, row) in self.labels.iter().zip(&self.counts) {
            let mut line = format!("{label:head$}");
            for c in row {
                let _ = write!(line, "  {c:>width$}");
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
