use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::skeleton::{Edge, Skeleton, SquareEntry};

/// A single way in which a skeleton fails to present a k-graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A square entry uses an edge of the wrong color for its table.
    WrongColor { pair: (usize, usize), entry: [String; 4] },
    /// One side of a square entry is not a composable pair.
    NotComposable { pair: (usize, usize), entry: [String; 4] },
    /// `r(f) ≠ r(g′)` or `s(g) ≠ s(f′)`.
    EndpointMismatch { pair: (usize, usize), entry: [String; 4] },
    /// A composable pair `(f, g)` has no entry.
    NotTotal { pair: (usize, usize), left: [String; 2] },
    /// A composable pair `(f, g)` has more than one entry.
    NotFunction { pair: (usize, usize), left: [String; 2] },
    /// Two entries share the same image `(g′, f′)`.
    NotInjective {
        pair: (usize, usize),
        right: [String; 2],
        lefts: Vec<[String; 2]>,
    },
    /// A composable pair `(g′, f′)` is not the image of any entry.
    NotSurjective { pair: (usize, usize), right: [String; 2] },
    /// The two ways of sorting a three-colored word disagree.
    CubeInconsistent {
        colors: (usize, usize, usize),
        word: [String; 3],
        route_a: [String; 3],
        route_b: [String; 3],
    },
    /// Some vertex receives (or emits) no edge of some color.
    StandingAssumption {
        color: usize,
        vertex: String,
        missing: &'static str,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongColor { pair, entry } => {
                write!(f, "square {pair:?} entry {entry:?}: edge colors do not match the table")
            }
            Violation::NotComposable { pair, entry } => {
                write!(f, "square {pair:?} entry {entry:?}: a side is not composable")
            }
            Violation::EndpointMismatch { pair, entry } => {
                write!(
                    f,
                    "square {pair:?} entry {entry:?}: ranges/sources of the two sides differ"
                )
            }
            Violation::NotTotal { pair, left } => {
                write!(f, "square {pair:?}: composable pair {left:?} has no entry (not total)")
            }
            Violation::NotFunction { pair, left } => {
                write!(f, "square {pair:?}: pair {left:?} has several entries")
            }
            Violation::NotInjective { pair, right, lefts } => {
                write!(
                    f,
                    "square {pair:?}: {right:?} is the image of {lefts:?} (not injective)"
                )
            }
            Violation::NotSurjective { pair, right } => {
                write!(
                    f,
                    "square {pair:?}: composable pair {right:?} is not hit (not surjective)"
                )
            }
            Violation::CubeInconsistent {
                colors,
                word,
                route_a,
                route_b,
            } => write!(
                f,
                "cube {colors:?}: word {word:?} resolves to {route_a:?} and to {route_b:?}"
            ),
            Violation::StandingAssumption { color, vertex, missing } => {
                write!(f, "vertex {vertex:?} has no color-{color} edge with {missing} at it")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Number of square entries examined.
    pub square_entries: usize,
    /// Number of three-colored words checked for cube consistency.
    pub cube_words: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every square table is a total bijection with compatible
/// endpoints, that the cube condition holds for every triple of colors, and
/// that every vertex receives and emits edges of every color.
pub fn validate_skeleton(sk: &Skeleton) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut tables_ok = true;

    for table in sk.squares() {
        report.square_entries += table.entries.len();
        let before = report.violations.len();
        check_table(sk, table.colors, &table.entries, &mut report.violations);
        if report.violations.len() > before {
            tables_ok = false;
        }
    }

    if tables_ok && sk.k() >= 3 {
        check_cubes(sk, &mut report);
    }

    for color in 0..sk.k() {
        for v in sk.vertices() {
            let has_range = sk.edges_of_color(color).any(|e| sk.edge(e).range == v);
            let has_source = sk.edges_of_color(color).any(|e| sk.edge(e).source == v);
            if !has_range {
                report.violations.push(Violation::StandingAssumption {
                    color,
                    vertex: sk.vertex_id(v).to_owned(),
                    missing: "range",
                });
            }
            if !has_source {
                report.violations.push(Violation::StandingAssumption {
                    color,
                    vertex: sk.vertex_id(v).to_owned(),
                    missing: "source",
                });
            }
        }
    }
    report
}

fn ids2(sk: &Skeleton, p: (Edge, Edge)) -> [String; 2] {
    [sk.edge_id(p.0).to_owned(), sk.edge_id(p.1).to_owned()]
}

fn ids4(sk: &Skeleton, s: &SquareEntry) -> [String; 4] {
    [
        sk.edge_id(s.left.0).to_owned(),
        sk.edge_id(s.left.1).to_owned(),
        sk.edge_id(s.right.0).to_owned(),
        sk.edge_id(s.right.1).to_owned(),
    ]
}

fn check_table(sk: &Skeleton, pair: (usize, usize), entries: &[SquareEntry], out: &mut Vec<Violation>) {
    let (i, j) = pair;
    let composable = |a: Edge, b: Edge| sk.edge(a).source == sk.edge(b).range;

    let mut by_left: HashMap<(Edge, Edge), usize> = HashMap::new();
    let mut by_right: HashMap<(Edge, Edge), Vec<(Edge, Edge)>> = HashMap::new();
    for s in entries {
        let (f, g) = s.left;
        let (gp, fp) = s.right;
        if sk.color(f) != i || sk.color(g) != j || sk.color(gp) != j || sk.color(fp) != i {
            out.push(Violation::WrongColor {
                pair,
                entry: ids4(sk, s),
            });
            continue;
        }
        if !composable(f, g) || !composable(gp, fp) {
            out.push(Violation::NotComposable {
                pair,
                entry: ids4(sk, s),
            });
            continue;
        }
        if sk.edge(f).range != sk.edge(gp).range || sk.edge(g).source != sk.edge(fp).source {
            out.push(Violation::EndpointMismatch {
                pair,
                entry: ids4(sk, s),
            });
        }
        *by_left.entry(s.left).or_default() += 1;
        by_right.entry(s.right).or_default().push(s.left);
    }

    for f in sk.edges_of_color(i) {
        for g in sk.edges_of_color(j) {
            if !composable(f, g) {
                continue;
            }
            match by_left.get(&(f, g)).copied().unwrap_or(0) {
                0 => out.push(Violation::NotTotal {
                    pair,
                    left: ids2(sk, (f, g)),
                }),
                1 => {}
                _ => out.push(Violation::NotFunction {
                    pair,
                    left: ids2(sk, (f, g)),
                }),
            }
        }
    }
    for gp in sk.edges_of_color(j) {
        for fp in sk.edges_of_color(i) {
            if !composable(gp, fp) {
                continue;
            }
            match by_right.get(&(gp, fp)) {
                None => out.push(Violation::NotSurjective {
                    pair,
                    right: ids2(sk, (gp, fp)),
                }),
                Some(lefts) => {
                    let distinct: HashSet<_> = lefts.iter().collect();
                    if distinct.len() > 1 {
                        let mut lefts: Vec<_> = distinct.into_iter().map(|l| ids2(sk, *l)).collect();
                        lefts.sort();
                        out.push(Violation::NotInjective {
                            pair,
                            right: ids2(sk, (gp, fp)),
                            lefts,
                        });
                    }
                }
            }
        }
    }
}

/// Both directions of every square, keyed by the adjacent pair being swapped.
pub(crate) fn swap_table(sk: &Skeleton) -> HashMap<(Edge, Edge), (Edge, Edge)> {
    let mut swap = HashMap::new();
    for t in sk.squares() {
        for s in &t.entries {
            swap.insert(s.left, s.right);
            swap.insert(s.right, s.left);
        }
    }
    swap
}

fn check_cubes(sk: &Skeleton, report: &mut ValidationReport) {
    let swap = swap_table(sk);
    let sw = |w: &mut [Edge; 3], pos: usize| -> bool {
        match swap.get(&(w[pos], w[pos + 1])) {
            Some(&(a, b)) => {
                w[pos] = a;
                w[pos + 1] = b;
                true
            }
            None => false,
        }
    };
    let k = sk.k();
    for c0 in 0..k {
        for c1 in c0 + 1..k {
            for c2 in c1 + 1..k {
                for f in sk.edges_of_color(c0) {
                    for g in sk.edges_of_color(c1) {
                        if sk.edge(f).source != sk.edge(g).range {
                            continue;
                        }
                        for h in sk.edges_of_color(c2) {
                            if sk.edge(g).source != sk.edge(h).range {
                                continue;
                            }
                            report.cube_words += 1;
                            let mut a = [f, g, h];
                            let mut b = [f, g, h];
                            let ok_a = sw(&mut a, 0) && sw(&mut a, 1) && sw(&mut a, 0);
                            let ok_b = sw(&mut b, 1) && sw(&mut b, 0) && sw(&mut b, 1);
                            if !(ok_a && ok_b) || a != b {
                                let ids = |w: &[Edge; 3]| {
                                    [
                                        sk.edge_id(w[0]).to_owned(),
                                        sk.edge_id(w[1]).to_owned(),
                                        sk.edge_id(w[2]).to_owned(),
                                    ]
                                };
                                report.violations.push(Violation::CubeInconsistent {
                                    colors: (c0, c1, c2),
                                    word: ids(&[f, g, h]),
                                    route_a: ids(&a),
                                    route_b: ids(&b),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::SkeletonBuilder;

    fn g3_with(entries: &[([&str; 2], [&str; 2])]) -> Skeleton {
        let mut b = SkeletonBuilder::new(2)
            .vertex("v")
            .edge("b1", 0, "v", "v")
            .edge("b2", 0, "v", "v")
            .edge("r1", 1, "v", "v")
            .edge("r2", 1, "v", "v");
        for (l, r) in entries {
            b = b.square((0, 1), *l, *r);
        }
        b.build().unwrap()
    }

    const G3_SQUARES: [([&str; 2], [&str; 2]); 4] = [
        (["b1", "r1"], ["r1", "b1"]),
        (["b1", "r2"], ["r2", "b1"]),
        (["b2", "r1"], ["r1", "b2"]),
        (["b2", "r2"], ["r2", "b2"]),
    ];

    #[test]
    fn g3_is_valid() {
        let report = validate_skeleton(&g3_with(&G3_SQUARES));
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(report.square_entries, 4);
    }

    #[test]
    fn collision_is_not_injective() {
        let mut sq = G3_SQUARES;
        // (b1,r1) now maps to the image of (b1,r2)
        sq[0].1 = ["r2", "b1"];
        let report = validate_skeleton(&g3_with(&sq));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotInjective { .. })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotSurjective { .. })));
    }

    #[test]
    fn missing_entry_is_not_total() {
        let report = validate_skeleton(&g3_with(&G3_SQUARES[..3]));
        assert_eq!(
            report.violations,
            vec![
                Violation::NotTotal {
                    pair: (0, 1),
                    left: ["b2".into(), "r2".into()]
                },
                Violation::NotSurjective {
                    pair: (0, 1),
                    right: ["r2".into(), "b2".into()]
                },
            ]
        );
    }

    #[test]
    fn wrong_color_entry() {
        let mut sq = G3_SQUARES.to_vec();
        sq.push((["r1", "b1"], ["b1", "r1"]));
        let report = validate_skeleton(&g3_with(&sq));
        assert!(matches!(report.violations[0], Violation::WrongColor { .. }));
    }

    #[test]
    fn k1_needs_no_squares() {
        let sk = SkeletonBuilder::new(1)
            .vertex("v")
            .edge("alpha", 0, "v", "v")
            .edge("beta", 0, "v", "v")
            .build()
            .unwrap();
        assert!(validate_skeleton(&sk).is_valid());
    }

    #[test]
    fn standing_assumption_violation_names_vertex() {
        let sk = SkeletonBuilder::new(1)
            .vertices(["u", "v"])
            .edge("a", 0, "u", "v")
            .build()
            .unwrap();
        let report = validate_skeleton(&sk);
        assert_eq!(report.violations.len(), 2);
        assert!(report
            .violations
            .iter()
            .all(|v| matches!(v, Violation::StandingAssumption { .. })));
    }

    #[test]
    fn endpoint_mismatch_detected() {
        // two vertices, color 0 loop at each, color 1 swaps them
        let sk = SkeletonBuilder::new(2)
            .vertices(["u", "v"])
            .edge("fu", 0, "u", "u")
            .edge("fv", 0, "v", "v")
            .edge("guv", 1, "u", "v")
            .edge("gvu", 1, "v", "u")
            // fu·guv runs v -> u; gvu·fu runs u -> v
            .square((0, 1), ["fu", "guv"], ["gvu", "fu"])
            .square((0, 1), ["fv", "gvu"], ["guv", "fv"])
            .build()
            .unwrap();
        let report = validate_skeleton(&sk);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::EndpointMismatch { .. })));

        let sk = sk
            .to_builder()
            .square((0, 1), ["fu", "guv"], ["guv", "fu"])
            .build()
            .unwrap();
        let report = validate_skeleton(&sk);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotComposable { .. })));
    }
}
