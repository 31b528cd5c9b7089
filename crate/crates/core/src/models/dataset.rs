use crate::error::{Error, Result};

/// Discrete-choice observations with case-specific covariates.
///
/// `chosen` holds alternative indices in `1..=J`; alternative 1 is the
/// reference category. Covariates are stored row-major, `n × K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceDataset {
    alternatives: usize,
    covariates: usize,
    x: Vec<f64>,
    chosen: Vec<usize>,
    labels: Vec<String>,
    covariate_names: Vec<String>,
}

impl ChoiceDataset {
    pub fn new(alternatives: usize, covariates: usize, x: Vec<f64>, chosen: Vec<usize>) -> Result<Self> {
        if alternatives < 2 {
            return Err(Error::Argument(format!(
                "need at least 2 alternatives, got {alternatives}"
            )));
        }
        let n = chosen.len();
        if n == 0 {
            return Err(Error::Argument("dataset has no observations".into()));
        }
        if x.len() != n * covariates {
            return Err(Error::Argument(format!(
                "covariate block has {} values, expected {n} x {covariates}",
                x.len()
            )));
        }
        if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!(
                "non-finite covariate at observation {}, column {}",
                pos / covariates.max(1),
                pos % covariates.max(1)
            )));
        }
        if let Some((i, &c)) = chosen
            .iter()
            .enumerate()
            .find(|(_, &c)| c < 1 || c > alternatives)
        {
            return Err(Error::Argument(format!(
                "observation {i}: chosen alternative {c} outside 1..={alternatives}"
            )));
        }
        Ok(ChoiceDataset {
            alternatives,
            covariates,
            x,
            chosen,
            labels: (1..=alternatives).map(|j| j.to_string()).collect(),
            covariate_names: (1..=covariates).map(|k| format!("x{k}")).collect(),
        })
    }

    /// Replaces the alternative labels; `labels[j - 1]` names alternative `j`.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.alternatives {
            return Err(Error::Argument(format!(
                "{} labels for {} alternatives",
                labels.len(),
                self.alternatives
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_covariate_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.covariates {
            return Err(Error::Argument(format!(
                "{} names for {} covariates",
                names.len(),
                self.covariates
            )));
        }
        self.covariate_names = names;
        Ok(self)
    }

    pub fn n_obs(&self) -> usize {
        self.chosen.len()
    }

    pub fn alternatives(&self) -> usize {
        self.alternatives
    }

    pub fn covariates(&self) -> usize {
        self.covariates
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.covariates..(i + 1) * self.covariates]
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    /// A dataset made of the given observations (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut x = Vec::with_capacity(indices.len() * self.covariates);
        for &i in indices {
            x.extend_from_slice(self.row(i));
        }
        ChoiceDataset {
            alternatives: self.alternatives,
            covariates: self.covariates,
            x,
            chosen: indices.iter().map(|&i| self.chosen[i]).collect(),
            labels: self.labels.clone(),
            covariate_names: self.covariate_names.clone(),
        }
    }

    /// Share of observations choosing each alternative.
    pub fn shares(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.alternatives];
        for &c in &self.chosen {
            counts[c - 1] += 1;
        }
        counts
            .into_iter()
            .map(|c| c as f64 / self.n_obs() as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ChoiceDataset::new(1, 0, vec![], vec![1]).is_err());
        assert!(ChoiceDataset::new(2, 1, vec![], vec![]).is_err());
        assert!(ChoiceDataset::new(2, 1, vec![0.0], vec![3]).is_err());
        assert!(ChoiceDataset::new(2, 1, vec![0.0], vec![0]).is_err());
        assert!(ChoiceDataset::new(2, 1, vec![f64::NAN], vec![1]).is_err());
        assert!(ChoiceDataset::new(2, 2, vec![0.0], vec![1]).is_err());
        assert!(ChoiceDataset::new(2, 0, vec![], vec![1, 2]).is_ok());
    }

    #[test]
    fn select_repeats_rows() {
        let d = ChoiceDataset::new(3, 2, vec![1.0, 2.0, 3.0, 4.0], vec![2, 3]).unwrap();
        let s = d.select(&[1, 1, 0]);
        assert_eq!(s.chosen(), &[3, 3, 2]);
        assert_eq!(s.row(2), &[1.0, 2.0]);
        assert_eq!(s.shares(), vec![0.0, 1.0 / 3.0, 2.0 / 3.0]);
    }
}
