use std::fmt;

use crate::error::{Error, Result};

/// Largest Hilbert-space dimension the engine accepts.
pub const MAX_DIMENSION: usize = 16;

/// Ordered set of named levels spanning a small Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelBasis {
    labels: Vec<String>,
}

impl LevelBasis {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidBasis("basis has no levels".into()));
        }
        if labels.len() > MAX_DIMENSION {
            return Err(Error::InvalidBasis(format!(
                "dimension {} exceeds the maximum of {MAX_DIMENSION}",
                labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidBasis(format!("duplicate level label `{l}`")));
            }
        }
        Ok(LevelBasis { labels })
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidBasis(format!("no level named `{label}`")))
    }

    /// Product basis `self ⊗ other`, labels joined as `"a,b"`, first factor slowest.
    pub fn tensor(&self, other: &LevelBasis) -> Result<LevelBasis> {
        let labels = self
            .labels
            .iter()
            .flat_map(|a| other.labels.iter().map(move |b| format!("{a},{b}")));
        LevelBasis::new(labels)
    }
}

impl fmt::Display for LevelBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_oversize() {
        assert!(LevelBasis::new(["0", "1", "0"]).is_err());
        assert!(LevelBasis::new(Vec::<String>::new()).is_err());
        assert!(LevelBasis::new((0..17).map(|i| i.to_string())).is_err());
        assert_eq!(LevelBasis::new((0..16).map(|i| i.to_string())).unwrap().dimension(), 16);
    }

    #[test]
    fn tensor_labels() {
        let a = LevelBasis::new(["0", "1", "r"]).unwrap();
        let ab = a.tensor(&a).unwrap();
        assert_eq!(ab.dimension(), 9);
        assert_eq!(ab.index_of("1,r").unwrap(), 5);
        assert_eq!(ab.index_of("r,r").unwrap(), 8);
    }
}
