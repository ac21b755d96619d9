//! Import of plain directed graphs as 1-graph spec documents.
//!
//! One edge per line, `u v` or `id u v`, for an edge `u → v`. A directed path
//! walks edges head to tail, while morphisms compose right to left, so the
//! edge becomes a morphism with `s = u` and `r = v`. Blank lines and lines
//! starting with `#` are ignored. Vertices are listed in order of first
//! appearance; unnamed edges are called `e0`, `e1`, ….

use kgraph_core::document::{EdgeSpec, SpecDocument};
use kgraph_core::{KGraphError, Result};

pub fn import_digraph(text: &str) -> Result<SpecDocument> {
    let mut vertices: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (id, u, v) = match fields.as_slice() {
            [u, v] => (format!("e{}", edges.len()), *u, *v),
            [id, u, v] => ((*id).to_owned(), *u, *v),
            _ => {
                return Err(KGraphError::Parse {
                    line: n + 1,
                    column: 1,
                    message: format!("expected `u v` or `id u v`, got {} fields", fields.len()),
                })
            }
        };
        for w in [u, v] {
            if !vertices.iter().any(|x| x == w) {
                vertices.push(w.to_owned());
            }
        }
        edges.push(EdgeSpec {
            id,
            color: 0,
            range: v.to_owned(),
            source: u.to_owned(),
        });
    }
    Ok(SpecDocument {
        k: 1,
        vertices,
        edges,
        squares: Vec::new(),
        config: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use kgraph_core::KGraph;

    #[test]
    fn edge_direction() {
        let doc = import_digraph("# two-cycle\nu v\nf v u\n").unwrap();
        assert_eq!(doc.vertices, ["u", "v"]);
        assert_eq!((doc.edges[0].source.as_str(), doc.edges[0].range.as_str()), ("u", "v"));
        assert_eq!(doc.edges[1].id, "f");
        let kg = KGraph::new(doc.to_skeleton().unwrap()).unwrap();
        // u → v → u walks e0 then f; as a morphism that is f·e0
        let m = kg.morphism_from_ids(&["f", "e0"]).unwrap();
        assert_eq!(kg.skeleton().vertex_id(m.source()), "u");
    }

    #[test]
    fn bad_line_is_located() {
        let err = import_digraph("u v\nu\n").unwrap_err();
        assert!(matches!(err, KGraphError::Parse { line: 2, .. }));
    }
}
