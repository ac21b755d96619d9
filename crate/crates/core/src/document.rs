//! The JSON spec document: a skeleton plus optional analysis overrides.
//!
//! ```json
//! {
//!   "k": 2,
//!   "vertices": ["v"],
//!   "edges": [{"id": "b", "color": 0, "range": "v", "source": "v"},
//!             {"id": "r", "color": 1, "range": "v", "source": "v"}],
//!   "squares": [{"pair": [0, 1], "left": ["b", "r"], "right": ["r", "b"]}],
//!   "config": {"radius": 2}
//! }
//! ```
//!
//! A square `{left: [f, g], right: [gp, fp]}` states `f·g = gp·fp`.

use serde::{Deserialize, Serialize};

use crate::error::{KGraphError, Result};
use crate::skeleton::{Skeleton, SkeletonBuilder};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub color: usize,
    pub range: String,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareSpec {
    pub pair: [usize; 2],
    pub left: [String; 2],
    pub right: [String; 2],
}

/// Per-document overrides of the analysis defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ConfigOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration_cap: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub k: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub squares: Vec<SquareSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigOverrides>,
}

/// Parses a document; syntax errors carry line and column.
pub fn parse_spec(text: &str) -> Result<SpecDocument> {
    serde_json::from_str(text).map_err(|e| KGraphError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses a document and resolves it to a skeleton. Semantic errors name the
/// offending field, e.g. `squares[3].left[1]`.
pub fn parse_skeleton(text: &str) -> Result<Skeleton> {
    parse_spec(text)?.to_skeleton()
}

impl SpecDocument {
    pub fn to_skeleton(&self) -> Result<Skeleton> {
        let mut b = SkeletonBuilder::new(self.k).vertices(self.vertices.iter().cloned());
        for e in &self.edges {
            b = b.edge(e.id.clone(), e.color, e.range.clone(), e.source.clone());
        }
        for s in &self.squares {
            b = b.square(
                (s.pair[0], s.pair[1]),
                [&s.left[0], &s.left[1]],
                [&s.right[0], &s.right[1]],
            );
        }
        b.build()
    }

    pub fn from_skeleton(sk: &Skeleton) -> SpecDocument {
        SpecDocument {
            k: sk.k(),
            vertices: sk.vertex_ids().to_vec(),
            edges: sk
                .edges()
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.clone(),
                    color: e.color,
                    range: sk.vertex_id(e.range).to_owned(),
                    source: sk.vertex_id(e.source).to_owned(),
                })
                .collect(),
            squares: sk
                .squares()
                .iter()
                .flat_map(|t| {
                    t.entries.iter().map(move |s| SquareSpec {
                        pair: [t.colors.0, t.colors.1],
                        left: [sk.edge_id(s.left.0).to_owned(), sk.edge_id(s.left.1).to_owned()],
                        right: [sk.edge_id(s.right.0).to_owned(), sk.edge_id(s.right.1).to_owned()],
                    })
                })
                .collect(),
            config: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}
