use serde::Serialize;

use kgraph_core::document::ConfigOverrides;
use kgraph_core::{DegreeVector, KGraphError, Result, DEFAULT_ENUMERATION_CAP};

/// Analysis settings after merging defaults, the document's `config` block
/// and command-line flags, in that order of precedence (flags win).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub tol: f64,
    /// Per-coordinate bound `B` of the search box `(B, …, B)`.
    pub search_bound: i64,
    pub radius: usize,
    pub metric_r: f64,
    pub seed: u64,
    pub enumeration_cap: u64,
    /// Degree for `enumerate` and `measure`; `e = (1, …, 1)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<DegreeVector>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol: 1e-12,
            search_bound: 8,
            radius: 2,
            metric_r: 0.5,
            seed: 0,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            degree: None,
        }
    }
}

impl Config {
    pub fn apply(mut self, o: &ConfigOverrides) -> Self {
        if let Some(v) = o.tol {
            self.tol = v;
        }
        if let Some(v) = o.search_bound {
            self.search_bound = v;
        }
        if let Some(v) = o.radius {
            self.radius = v;
        }
        if let Some(v) = o.metric_r {
            self.metric_r = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.enumeration_cap {
            self.enumeration_cap = v;
        }
        self
    }

    pub fn check(&self, k: usize) -> Result<()> {
        let bad = |m: String| Err(KGraphError::InvalidParameter(m));
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if self.search_bound < 1 {
            return bad(format!("search bound must be at least 1, got {}", self.search_bound));
        }
        if self.radius < 1 {
            return bad("radius must be at least 1".into());
        }
        if !(self.metric_r > 0.0 && self.metric_r < 1.0) {
            return bad(format!("metric r must lie in (0, 1), got {}", self.metric_r));
        }
        if self.enumeration_cap < 1 {
            return bad("enumeration cap must be at least 1".into());
        }
        if let Some(d) = &self.degree {
            if d.k() != k {
                return Err(KGraphError::DegreeMismatch(format!(
                    "--degree {d} has rank {}, graph has k = {k}",
                    d.k()
                )));
            }
            if !d.is_nonneg() {
                return Err(KGraphError::DegreeMismatch(format!(
                    "--degree {d} has a negative component"
                )));
            }
        }
        Ok(())
    }

    pub fn degree_or_ones(&self, k: usize) -> DegreeVector {
        self.degree.clone().unwrap_or_else(|| DegreeVector::ones(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_document() {
        let doc = ConfigOverrides {
            radius: Some(3),
            seed: Some(7),
            ..Default::default()
        };
        let flags = ConfigOverrides {
            seed: Some(9),
            ..Default::default()
        };
        let c = Config::default().apply(&doc).apply(&flags);
        assert_eq!((c.radius, c.seed, c.tol), (3, 9, 1e-12));
    }

    #[test]
    fn rejects_bad_values() {
        let c = Config {
            metric_r: 1.5,
            ..Config::default()
        };
        assert!(matches!(c.check(2), Err(KGraphError::InvalidParameter(_))));
        let c = Config {
            degree: Some(DegreeVector::from([1])),
            ..Config::default()
        };
        assert!(matches!(c.check(2), Err(KGraphError::DegreeMismatch(_))));
        assert!(Config::default().check(2).is_ok());
    }
}
