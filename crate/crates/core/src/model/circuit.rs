use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{GstError, Result};

/// Where a circuit sits in the `F_j g_k^p H_i` plaquette layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStructure {
    pub prep_fiducial: usize,
    pub germ: usize,
    pub power: usize,
    pub meas_fiducial: usize,
}

/// An ordered sequence of gate labels, applied left to right.
///
/// Equality, ordering and hashing only consider the label sequence; the
/// optional structure is an annotation.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Circuit {
    labels: Vec<String>,
    structure: Option<CircuitStructure>,
}

impl Circuit {
    pub fn empty() -> Self {
        Circuit::default()
    }

    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Circuit { labels: labels.into_iter().map(Into::into).collect(), structure: None }
    }

    pub fn with_structure(mut self, s: CircuitStructure) -> Self {
        self.structure = Some(s);
        self
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure(&self) -> Option<CircuitStructure> {
        self.structure
    }

    pub fn depth(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn concat(&self, other: &Circuit) -> Circuit {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Circuit { labels, structure: None }
    }

    pub fn repeat(&self, times: usize) -> Circuit {
        let mut labels = Vec::with_capacity(self.labels.len() * times);
        for _ in 0..times {
            labels.extend(self.labels.iter().cloned());
        }
        Circuit { labels, structure: None }
    }

    /// Parse the text form produced by `Display` (`{}` or `Gx.Gy.Gi`).
    pub fn parse(s: &str) -> Result<Circuit> {
        let s = s.trim();
        if s == "{}" || s.is_empty() {
            return Ok(Circuit::empty());
        }
        let labels: Vec<&str> = s.split('.').collect();
        if labels.iter().any(|l| l.is_empty() || l.contains(char::is_whitespace)) {
            return Err(GstError::Parse(format!("malformed circuit `{s}`")));
        }
        Ok(Circuit::new(labels))
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.labels.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{}", self.labels.join("."))
        }
    }
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for Circuit {}

impl Hash for Circuit {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.labels.hash(state);
    }
}

impl PartialOrd for Circuit {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Circuit {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.labels.cmp(&other.labels)
    }
}

impl From<Vec<String>> for Circuit {
    fn from(labels: Vec<String>) -> Self {
        Circuit { labels, structure: None }
    }
}

impl From<Circuit> for Vec<String> {
    fn from(c: Circuit) -> Self {
        c.labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for c in [Circuit::empty(), Circuit::new(["Gx"]), Circuit::new(["Gx", "Gy", "Gi"])] {
            assert_eq!(Circuit::parse(&c.to_string()).unwrap(), c);
        }
    }

    #[test]
    fn structure_does_not_affect_identity() {
        let a = Circuit::new(["Gx"]);
        let b = a.clone().with_structure(CircuitStructure {
            prep_fiducial: 0,
            germ: 1,
            power: 1,
            meas_fiducial: 2,
        });
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(Circuit::parse("Gx..Gy").is_err());
    }
}
