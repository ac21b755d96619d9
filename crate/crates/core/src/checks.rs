//! The invariant battery: every algebraic, spectral, measure-theoretic and
//! dynamical identity the library is expected to satisfy, evaluated
//! exhaustively (or, past a size limit, on seeded samples) for one graph.
//!
//! Each check compares two independent computations where one exists, e.g.
//! vertex matrices against enumeration counts, or the Parry formula against
//! sums over extensions.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::construct::opposite_graph;
use crate::degree::DegreeVector;
use crate::dynamics::{
    all_windows, bracket, distance, local_product_enum, mixing_lag_with_threshold, shift, MetricParams, Window,
};
use crate::error::{KGraphError, Result};
use crate::kgraph::{count_to_u64, normal_colors, KGraph, Morphism};
use crate::measure::{
    base_measure, conditional_measure, fiber_measure, haar_weight, haar_weight_along, parry_measure, trace_eval,
    CylinderSet, DiagonalFunction, Side,
};
use crate::relations::{
    asymptotic_equiv, opposite_window, restriction_map, semidirect_compose, stable_class, stable_equiv, unstable_equiv,
    unstable_equiv_via_opposite, GroupoidElement,
};
use crate::skeleton::Vertex;
use crate::spectral::{
    af_multiplicities, classify_connectivity, generator_matrix, perron_data, vertex_matrix, PerronData, VertexMatrix,
};

/// Tolerance for identities involving Perron data.
pub const MEASURE_TOL: f64 = 1e-9;

/// Pair (and triple) loops run exhaustively up to this many items and fall
/// back to seeded sampling beyond it.
const EXHAUSTIVE_PAIRS: usize = 1 << 17;
const EXHAUSTIVE_TRIPLES: usize = 1 << 25;
const SAMPLES: usize = 20_000;
/// Relation checks sweep every shift and every offset per pair.
const RELATION_SAMPLES: usize = 4_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckConfig {
    /// Window radius `N` for the dynamics and relation checks.
    pub radius: usize,
    pub metric_r: f64,
    /// Perron tolerance; eigen-equations are held to `10·tol`.
    pub tol: f64,
    pub seed: u64,
    /// Per-coordinate bound for factorization and associativity.
    pub split_depth: i64,
    /// Per-coordinate bound for cylinder degrees in measure checks.
    pub cylinder_depth: i64,
    /// Per-coordinate bound for `p, q` in the semigroup law.
    pub matrix_depth: i64,
    /// `|mᵢ|` bound for shift conjugation in the relation checks.
    pub relation_shift: i64,
    pub mixing_pairs: usize,
    pub confluence_words: usize,
    pub search_bound: i64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            radius: 2,
            metric_r: 0.5,
            tol: crate::spectral::DEFAULT_TOL,
            seed: 0,
            split_depth: 2,
            cylinder_depth: 3,
            matrix_depth: 3,
            relation_shift: 1,
            mixing_pairs: 20,
            confluence_words: 200,
            search_bound: crate::spectral::DEFAULT_SEARCH_BOUND,
        }
    }
}

impl CheckConfig {
    /// The default depths, lowered until the largest enumerations they imply
    /// stay below `budget` morphisms (windows at radius `N` count as
    /// `|Λ^{2Ne}|`). Never goes below depth 1.
    pub fn scaled(kg: &KGraph, budget: u64) -> Self {
        let d = Self::default();
        let fits =
            |depth: i64| count_to_u64(&kg.count(&DegreeVector::splat(kg.k(), depth))).is_some_and(|c| c <= budget);
        let largest = |max: i64| (1..=max).rev().find(|&j| fits(j)).unwrap_or(1);
        CheckConfig {
            split_depth: largest(d.split_depth),
            cylinder_depth: largest(d.cylinder_depth),
            radius: (1..=d.radius as i64).rev().find(|&n| fits(2 * n)).unwrap_or(1) as usize,
            ..d
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Tally {
    name: &'static str,
    cases: u64,
    failures: u64,
    first: Option<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            failures: 0,
            first: None,
            notes: Vec::new(),
        }
    }

    fn case(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(detail());
            }
        }
    }

    fn close(&mut self, what: &str, lhs: f64, rhs: f64, tol: f64) {
        let ok = (lhs - rhs).abs() <= tol * rhs.abs().max(1.0);
        self.case(ok, || format!("{what}: {lhs:.15e} vs {rhs:.15e}"));
    }

    fn note(&mut self, n: impl Into<String>) {
        let n = n.into();
        if !self.notes.contains(&n) {
            self.notes.push(n);
        }
    }

    fn error(&mut self, e: &KGraphError) {
        self.failures += 1;
        self.first.get_or_insert_with(|| format!("error: {e}"));
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name.to_owned(),
            passed: self.failures == 0,
            cases: self.cases,
            failures: self.failures,
            counterexample: self.first,
            note: if self.notes.is_empty() {
                None
            } else {
                Some(self.notes.join("; "))
            },
        }
    }
}

fn run(name: &'static str, body: impl FnOnce(&mut Tally) -> Result<()>) -> CheckOutcome {
    let mut t = Tally::new(name);
    if let Err(e) = body(&mut t) {
        t.error(&e);
    }
    t.finish()
}

/// Memoized `Λⁿ`, also split by range and by source.
pub struct Paths<'a> {
    kg: &'a KGraph,
    all: HashMap<DegreeVector, Rc<Vec<Morphism>>>,
    by_range: HashMap<(DegreeVector, Vertex), Rc<Vec<Morphism>>>,
    by_source: HashMap<(DegreeVector, Vertex), Rc<Vec<Morphism>>>,
}

impl<'a> Paths<'a> {
    pub fn new(kg: &'a KGraph) -> Self {
        Paths {
            kg,
            all: HashMap::new(),
            by_range: HashMap::new(),
            by_source: HashMap::new(),
        }
    }

    pub fn all(&mut self, n: &DegreeVector) -> Result<Rc<Vec<Morphism>>> {
        if let Some(v) = self.all.get(n) {
            return Ok(v.clone());
        }
        let v = Rc::new(self.kg.enumerate_morphisms(n)?);
        self.all.insert(n.clone(), v.clone());
        Ok(v)
    }

    pub fn with_range(&mut self, n: &DegreeVector, v: Vertex) -> Result<Rc<Vec<Morphism>>> {
        let key = (n.clone(), v);
        if let Some(p) = self.by_range.get(&key) {
            return Ok(p.clone());
        }
        let p: Vec<Morphism> = self.all(n)?.iter().filter(|m| m.range() == v).cloned().collect();
        let p = Rc::new(p);
        self.by_range.insert(key, p.clone());
        Ok(p)
    }

    pub fn with_source(&mut self, n: &DegreeVector, v: Vertex) -> Result<Rc<Vec<Morphism>>> {
        let key = (n.clone(), v);
        if let Some(p) = self.by_source.get(&key) {
            return Ok(p.clone());
        }
        let p: Vec<Morphism> = self.all(n)?.iter().filter(|m| m.source() == v).cloned().collect();
        let p = Rc::new(p);
        self.by_source.insert(key, p.clone());
        Ok(p)
    }
}

fn cube(k: usize, d: i64) -> Vec<DegreeVector> {
    DegreeVector::box_iter(&DegreeVector::zero(k), &DegreeVector::splat(k, d)).collect()
}

fn ids(kg: &KGraph, m: &Morphism) -> String {
    if m.is_identity() {
        format!("id_{}", kg.skeleton().vertex_id(m.range()))
    } else {
        kg.word_ids(m).join("·")
    }
}

// ---------------------------------------------------------------- path algebra

/// Composition is a bijection `Λ^{n1} ×_s Λ^{n2} → Λ^{n1+n2}` for every
/// split of every `n ≤ depth·e`, and `factorize` inverts it.
pub fn check_factorization(kg: &KGraph, depth: i64) -> CheckOutcome {
    run("factorization", |t| {
        let mut paths = Paths::new(kg);
        for n in cube(kg.k(), depth) {
            let target: HashSet<Morphism> = paths.all(&n)?.iter().cloned().collect();
            for n1 in DegreeVector::box_iter(&DegreeVector::zero(kg.k()), &n) {
                let n2 = &n - &n1;
                let mut seen = HashSet::with_capacity(target.len());
                let left = paths.all(&n1)?;
                for a in left.iter() {
                    for b in paths.with_range(&n2, a.source())?.iter() {
                        let c = kg.compose(a, b)?;
                        let fresh = seen.insert(c.clone());
                        t.case(fresh && target.contains(&c), || {
                            format!(
                                "{} · {} = {} is repeated or outside Λ^{n}",
                                ids(kg, a),
                                ids(kg, b),
                                ids(kg, &c)
                            )
                        });
                    }
                }
                t.case(seen.len() == target.len(), || {
                    format!(
                        "split {n1} + {n2}: {} compositions for |Λ^{n}| = {}",
                        seen.len(),
                        target.len()
                    )
                });
                for lam in &target {
                    let (f1, f2) = kg.factorize(lam, &n1, &n2)?;
                    let ok = f1.degree() == &n1 && f2.degree() == &n2 && kg.compose(&f1, &f2)? == *lam;
                    t.case(ok, || {
                        format!("factorize({}, {n1}, {n2}) does not recompose", ids(kg, lam))
                    });
                }
            }
        }
        Ok(())
    })
}

/// `(λμ)ν = λ(μν)` for composable triples of total degree `≤ depth·e`.
pub fn check_associativity(kg: &KGraph, depth: i64) -> CheckOutcome {
    run("associativity", |t| {
        let mut paths = Paths::new(kg);
        let k = kg.k();
        let top = DegreeVector::splat(k, depth);
        for d1 in cube(k, depth) {
            for d2 in DegreeVector::box_iter(&DegreeVector::zero(k), &(&top - &d1)) {
                let rest = &(&top - &d1) - &d2;
                for d3 in DegreeVector::box_iter(&DegreeVector::zero(k), &rest) {
                    for a in paths.all(&d1)?.iter() {
                        for b in paths.with_range(&d2, a.source())?.iter() {
                            let ab = kg.compose(a, b)?;
                            for c in paths.with_range(&d3, b.source())?.iter() {
                                let lhs = kg.compose(&ab, c)?;
                                let rhs = kg.compose(a, &kg.compose(b, c)?)?;
                                t.case(lhs == rhs, || {
                                    format!(
                                        "({}·{})·{} != {}·({}·{})",
                                        ids(kg, a),
                                        ids(kg, b),
                                        ids(kg, c),
                                        ids(kg, a),
                                        ids(kg, b),
                                        ids(kg, c)
                                    )
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    })
}

/// A random composable word read left to right, `len` edges of random colors.
pub fn random_word<R: Rng + ?Sized>(kg: &KGraph, rng: &mut R, len: usize) -> Vec<crate::skeleton::Edge> {
    let mut v = Vertex(rng.random_range(0..kg.vertex_count()));
    let mut word = Vec::with_capacity(len);
    for _ in 0..len {
        let c = rng.random_range(0..kg.k());
        let e = *kg.edges_with_range(c, v).choose(rng).expect("standing assumption");
        word.push(e);
        v = kg.skeleton().edge(e).source;
    }
    word
}

/// Normalizing a word by square swaps in random orders always yields the same
/// normal form.
pub fn check_normal_form_confluence(kg: &KGraph, words: usize, seed: u64) -> CheckOutcome {
    run("normal_form_confluence", |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let color = |e: crate::skeleton::Edge| kg.skeleton().color(e);
        for _ in 0..words {
            let len = rng.random_range(1..=6);
            let word = random_word(kg, &mut rng, len);
            let reference = kg.normalize(&word);
            // scramble by random legal swaps, then sort by random bubble steps
            let mut w = word.clone();
            for _ in 0..3 * len {
                if len < 2 {
                    break;
                }
                let p = rng.random_range(0..len - 1);
                kg.swap_at(&mut w, p);
            }
            loop {
                let descents: Vec<usize> = (0..w.len().saturating_sub(1))
                    .filter(|&p| color(w[p]) > color(w[p + 1]))
                    .collect();
                let Some(&p) = descents.choose(&mut rng) else { break };
                kg.swap_at(&mut w, p);
            }
            t.case(w == reference, || {
                format!(
                    "{:?} sorted to {:?}, normal form {:?}",
                    kg.skeleton().word_ids(&word),
                    kg.skeleton().word_ids(&w),
                    kg.skeleton().word_ids(&reference)
                )
            });
        }
        Ok(())
    })
}

/// Λ^op is a degree-preserving involution with `|Λ_op^p| = |Λ^p|ᵀ`.
pub fn check_opposite(kg: &KGraph, depth: i64) -> CheckOutcome {
    run("opposite_graph", |t| {
        let op = opposite_graph(kg)?;
        let back = opposite_graph(&op)?;
        t.case(back.skeleton() == kg.skeleton(), || "(Λ^op)^op differs from Λ".into());
        let mut paths = Paths::new(kg);
        for p in cube(kg.k(), depth) {
            t.case(vertex_matrix(&op, &p) == vertex_matrix(kg, &p).transpose(), || {
                format!("|Λ_op^{p}| is not the transpose of |Λ^{p}|")
            });
            for lam in paths.all(&p)?.iter() {
                let o = op.opposite_of(lam);
                let ok = o.degree() == lam.degree()
                    && o.range() == lam.source()
                    && o.source() == lam.range()
                    && kg.opposite_of(&o) == *lam;
                t.case(ok, || format!("op transport of {}", ids(kg, lam)));
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- spectral

/// `|Λ^{p+q}| = |Λ^p||Λ^q|` exactly for `p, q ≤ depth·e`.
pub fn check_semigroup(kg: &KGraph, depth: i64) -> CheckOutcome {
    run("semigroup", |t| {
        let k = kg.k();
        let mut mats: HashMap<DegreeVector, VertexMatrix> = HashMap::new();
        for p in cube(k, 2 * depth) {
            let m = vertex_matrix(kg, &p);
            mats.insert(p, m);
        }
        for p in cube(k, depth) {
            for q in cube(k, depth) {
                let ok = mats[&(&p + &q)] == mats[&p].mul(&mats[&q]);
                t.case(ok, || format!("|Λ^{{{p}+{q}}}| != |Λ^{p}||Λ^{q}|"));
            }
        }
        Ok(())
    })
}

pub fn check_generator_commutation(kg: &KGraph) -> CheckOutcome {
    run("generator_commutation", |t| {
        if kg.k() < 2 {
            t.note("rank 1: no pair of colors");
        }
        let gens: Vec<VertexMatrix> = (0..kg.k()).map(|c| generator_matrix(kg, c)).collect();
        for i in 0..kg.k() {
            for j in i + 1..kg.k() {
                t.case(gens[i].mul(&gens[j]) == gens[j].mul(&gens[i]), || {
                    format!("generators {i} and {j} do not commute")
                });
            }
        }
        Ok(())
    })
}

/// Vertex matrices agree with counts obtained by enumeration.
pub fn check_matrix_counts(kg: &KGraph, depth: i64) -> CheckOutcome {
    run("matrix_counts", |t| {
        let n = kg.vertex_count();
        for p in cube(kg.k(), depth) {
            let mut counts = vec![vec![0u64; n]; n];
            for m in kg.enumerate_morphisms(&p)? {
                counts[m.range().0][m.source().0] += 1;
            }
            let mat = vertex_matrix(kg, &p).to_u64_rows();
            t.case(mat.as_ref() == Some(&counts), || {
                format!("|Λ^{p}| = {mat:?}, enumeration gives {counts:?}")
            });
        }
        Ok(())
    })
}

/// Positivity, normalization and the eigen-equations for `p ≤ depth·e`.
pub fn check_perron(kg: &KGraph, pd: &PerronData, depth: i64, tol: f64) -> CheckOutcome {
    run("perron", |t| {
        t.case(pd.t.iter().all(|&x| x > 0.0), || format!("t = {:?} not positive", pd.t));
        t.case(pd.a.iter().chain(&pd.b).all(|&x| x > 0.0), || {
            "a or b not strictly positive".into()
        });
        let norm: f64 = pd.a.iter().zip(&pd.b).map(|(a, b)| a * b).sum();
        t.case((norm - 1.0).abs() <= 1e-12, || format!("Σ a b = {norm:.17}"));
        for p in cube(kg.k(), depth) {
            let dev = pd.eigen_deviation(kg, &p);
            t.case(dev <= 10.0 * tol, || {
                format!("eigen-equation deviation {dev:e} at p = {p}")
            });
        }
        Ok(())
    })
}

/// AF tower block dimensions propagate through `|Λⁿ|`, and the
/// multiplicities and dimensions match enumeration counts.
pub fn check_af(kg: &KGraph, depth: i64) -> CheckOutcome {
    run("af_tower", |t| {
        let nv = kg.vertex_count();
        let mut paths = Paths::new(kg);
        for m in cube(kg.k(), depth) {
            let by_source: Vec<u64> = (0..nv)
                .map(|v| paths.with_source(&m, Vertex(v)).map(|p| p.len() as u64))
                .collect::<Result<_>>()?;
            for n in cube(kg.k(), depth) {
                let af = af_multiplicities(kg, &m, &n);
                t.case(af.consistent, || format!("blockDims at {m}+{n} != |Λ^{n}|ᵀ·blockDims"));
                let dims: Vec<u64> = af
                    .block_dims
                    .iter()
                    .map(|d| count_to_u64(d).unwrap_or(u64::MAX))
                    .collect();
                t.case(dims == by_source, || {
                    format!("blockDims at {m} = {dims:?}, enumeration {by_source:?}")
                });
                let mut mult = vec![vec![0u64; nv]; nv];
                for lam in paths.all(&n)?.iter() {
                    mult[lam.range().0][lam.source().0] += 1;
                }
                t.case(af.multiplicity.to_u64_rows().as_ref() == Some(&mult), || {
                    format!("multiplicity at n = {n} differs from path counts {mult:?}")
                });
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- measure

/// Right and left expansion: `μ(Z(λ, n)) = Σ_ν μ(Z(λν, n)) = Σ_ν μ(Z(νλ, n − m))`
/// for `d(λ) ≤ depth·e` and `m ≤ ext·e`.
pub fn check_expansion(kg: &KGraph, pd: &PerronData, depth: i64, ext: i64) -> CheckOutcome {
    run("expansion", |t| {
        let mut paths = Paths::new(kg);
        let zero = DegreeVector::zero(kg.k());
        for d in cube(kg.k(), depth) {
            for lam in paths.all(&d)?.iter() {
                let base = parry_measure(kg, pd, &CylinderSet::new(lam.clone(), zero.clone()))?.value;
                for m in cube(kg.k(), ext) {
                    let mut right = 0.0;
                    for nu in paths.with_range(&m, lam.source())?.iter() {
                        right += parry_measure(kg, pd, &CylinderSet::new(kg.compose(lam, nu)?, zero.clone()))?.value;
                    }
                    let mut left = 0.0;
                    for nu in paths.with_source(&m, lam.range())?.iter() {
                        left += parry_measure(kg, pd, &CylinderSet::new(kg.compose(nu, lam)?, -&m))?.value;
                    }
                    t.close(
                        &format!("right expansion of {} by {m}", ids(kg, lam)),
                        right,
                        base,
                        MEASURE_TOL,
                    );
                    t.close(
                        &format!("left expansion of {} by {m}", ids(kg, lam)),
                        left,
                        base,
                        MEASURE_TOL,
                    );
                }
            }
        }
        Ok(())
    })
}

/// `Σ_v μ(Z(v, 0)) = 1`, and the cylinders of each degree `≤ e` partition.
pub fn check_total_mass(kg: &KGraph, pd: &PerronData) -> CheckOutcome {
    run("total_mass", |t| {
        let mut total = 0.0;
        for v in kg.vertices() {
            total += parry_measure(kg, pd, &CylinderSet::at_origin(kg.identity(v)))?.value;
        }
        t.close("Σ_v μ(Z(v,0))", total, 1.0, 1e-12);
        for n in cube(kg.k(), 1) {
            let mut s = 0.0;
            for lam in kg.enumerate_morphisms(&n)? {
                s += parry_measure(kg, pd, &CylinderSet::at_origin(lam))?.value;
            }
            t.close(&format!("Σ over Λ^{n}"), s, 1.0, MEASURE_TOL);
        }
        Ok(())
    })
}

/// `μ(Z(λ⁻λ⁺, −d(λ⁻))) = μ_s(λ⁻)·μ_u(λ⁺)` at every anchor and for every
/// `d(λ±) ≤ N·e`, and the products over all matched pairs of a fixed depth
/// sum to `μ(Z(v, 0))`.
pub fn check_product_decomposition(kg: &KGraph, pd: &PerronData, radius: usize) -> CheckOutcome {
    run("product_decomposition", |t| {
        let mut paths = Paths::new(kg);
        let degrees = cube(kg.k(), radius as i64);
        for v in kg.vertices() {
            let anchor = parry_measure(kg, pd, &CylinderSet::at_origin(kg.identity(v)))?.value;
            for dm in &degrees {
                for dp in &degrees {
                    let mut sum = 0.0;
                    for past in paths.with_source(dm, v)?.iter() {
                        let s = conditional_measure(kg, pd, Side::Stable, past)?.value;
                        for fut in paths.with_range(dp, v)?.iter() {
                            let u = conditional_measure(kg, pd, Side::Unstable, fut)?.value;
                            let whole = CylinderSet::new(kg.compose(past, fut)?, -dm);
                            let mu = parry_measure(kg, pd, &whole)?.value;
                            t.close(
                                &format!("μ_s({})·μ_u({})", ids(kg, past), ids(kg, fut)),
                                s * u,
                                mu,
                                MEASURE_TOL,
                            );
                            sum += s * u;
                        }
                    }
                    t.close(
                        &format!("fiber product at {} for ({dm}, {dp})", kg.skeleton().vertex_id(v)),
                        sum,
                        anchor,
                        MEASURE_TOL,
                    );
                }
            }
        }
        Ok(())
    })
}

/// `μ_s = tᵖ μ_s^{σᵖx} ∘ σᵖ` on stable cylinders of degree `≤ depth·e`, for
/// `p ≤ e` and every tail `x(0, p)`, plus the chain rule `p` then `q`.
pub fn check_haar_scaling(kg: &KGraph, pd: &PerronData, depth: i64) -> CheckOutcome {
    run("haar_scaling", |t| {
        let mut paths = Paths::new(kg);
        let units = cube(kg.k(), 1);
        for d in cube(kg.k(), depth) {
            for lam in paths.all(&d)?.iter() {
                let direct = conditional_measure(kg, pd, Side::Stable, lam)?.value;
                for p in &units {
                    let formula = haar_weight(kg, pd, p, lam)?.value;
                    t.close(
                        &format!("haar_weight({p}, {})", ids(kg, lam)),
                        formula,
                        direct,
                        MEASURE_TOL,
                    );
                    for tail in paths.with_range(p, lam.source())?.iter() {
                        let along = haar_weight_along(kg, pd, lam, tail)?.value;
                        t.close(
                            &format!("shifted mass of {} along {}", ids(kg, lam), ids(kg, tail)),
                            along,
                            direct,
                            MEASURE_TOL,
                        );
                        let longer = kg.compose(lam, tail)?;
                        for q in &units {
                            for tail2 in paths.with_range(q, tail.source())?.iter() {
                                let stepwise = pd.t_pow(p) * haar_weight_along(kg, pd, &longer, tail2)?.value;
                                let joint = haar_weight_along(kg, pd, lam, &kg.compose(tail, tail2)?)?.value;
                                t.close(
                                    &format!("σ^{p} then σ^{q} on {}", ids(kg, lam)),
                                    stepwise,
                                    direct,
                                    MEASURE_TOL,
                                );
                                t.close(
                                    &format!("σ^{{{p}+{q}}} on {}", ids(kg, lam)),
                                    joint,
                                    direct,
                                    MEASURE_TOL,
                                );
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    })
}

/// `μ(Z(λ, n))` computed as a sum over all right extensions by `Λ^e`.
fn expanded_mass(kg: &KGraph, pd: &PerronData, paths: &mut Paths<'_>, c: &CylinderSet) -> Result<f64> {
    let e = DegreeVector::ones(kg.k());
    let mut s = 0.0;
    for nu in paths.with_range(&e, c.lambda.source())?.iter() {
        s += parry_measure(kg, pd, &CylinderSet::new(kg.compose(&c.lambda, nu)?, c.offset.clone()))?.value;
    }
    Ok(s)
}

/// `τ_s(β_sⁿ f) = tⁿ τ_s(f)` for `|nᵢ| ≤ bound` on a seeded random
/// combination of cylinders of degree `≤ e`; the transported side is
/// evaluated through right extensions.
pub fn check_trace_scaling(kg: &KGraph, pd: &PerronData, bound: i64, seed: u64) -> CheckOutcome {
    run("trace_scaling", |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut paths = Paths::new(kg);
        let mut f = DiagonalFunction::zero();
        for d in cube(kg.k(), 1) {
            for lam in paths.all(&d)?.iter() {
                let offset = DegreeVector::new((0..kg.k()).map(|_| rng.random_range(-2..=2)).collect());
                f = f.plus(rng.random_range(-1.0..1.0), CylinderSet::new(lam.clone(), offset));
            }
        }
        let base = trace_eval(kg, pd, &f)?;
        let k = kg.k();
        for n in DegreeVector::box_iter(&DegreeVector::splat(k, -bound), &DegreeVector::splat(k, bound)) {
            let g = f.beta_s(pd, &n);
            let mut lhs = 0.0;
            for (c, cyl) in &g.terms {
                lhs += c * expanded_mass(kg, pd, &mut paths, cyl)?;
            }
            t.close(&format!("τ_s(β_s^{n} f)"), lhs, pd.t_pow(&n) * base, MEASURE_TOL);
        }
        Ok(())
    })
}

/// `∫ h dμ = ∫ μ_{s,p}(h) dν_{s,p}` for `h = 1_{Z(λ, p − m)}` with `λ = λ⁻λ⁺`,
/// `d(λ⁻) = m`, over `d(λ) ≤ depth·e` and `p ≤ e`.
pub fn check_disintegration(kg: &KGraph, pd: &PerronData, depth: i64) -> CheckOutcome {
    run("disintegration", |t| {
        let mut paths = Paths::new(kg);
        for d in cube(kg.k(), depth) {
            for lam in paths.all(&d)?.iter() {
                for m in DegreeVector::box_iter(&DegreeVector::zero(kg.k()), &d) {
                    let (past, fut) = kg.factorize(lam, &m, &(&d - &m))?;
                    for p in cube(kg.k(), 1) {
                        let whole = parry_measure(kg, pd, &CylinderSet::new(lam.clone(), &p - &m))?.value;
                        let split = fiber_measure(kg, pd, &p, &past)?.value * base_measure(kg, pd, &p, &fut)?.value;
                        t.close(
                            &format!("disintegration of {} at {m}, p = {p}", ids(kg, lam)),
                            split,
                            whole,
                            MEASURE_TOL,
                        );
                    }
                }
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- windows

/// All windows of radius `N`, indexed by body.
pub struct WindowUniverse<'a> {
    kg: &'a KGraph,
    radius: usize,
    windows: Vec<Window>,
    index: HashMap<Morphism, usize>,
    shifts: Vec<DegreeVector>,
    /// `shifted[i][s] = σ^{shifts[s]} windows[i]`.
    shifted: Vec<Vec<Window>>,
}

impl<'a> WindowUniverse<'a> {
    pub fn new(kg: &'a KGraph, radius: usize) -> Result<Self> {
        let windows = all_windows(kg, radius)?;
        let index = windows.iter().enumerate().map(|(i, w)| (w.body().clone(), i)).collect();
        let s = radius as i64 - 1;
        let k = kg.k();
        let shifts: Vec<DegreeVector> =
            DegreeVector::box_iter(&DegreeVector::splat(k, -s), &DegreeVector::splat(k, s)).collect();
        let shifted = windows
            .iter()
            .map(|w| shifts.iter().map(|n| shift(kg, w, n)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Ok(WindowUniverse {
            kg,
            radius,
            windows,
            index,
            shifts,
            shifted,
        })
    }

    fn shift_index(&self, n: &DegreeVector) -> usize {
        self.shifts.iter().position(|s| s == n).expect("shift inside the box")
    }

    fn shifted(&self, i: usize, s: usize) -> &Window {
        &self.shifted[i][s]
    }

    pub fn top(&self) -> &[Window] {
        &self.windows
    }

    fn id_of(&self, w: &Window) -> usize {
        self.index[w.body()]
    }

    /// Shifts with `|nᵢ| ≤ N − 1`.
    fn shifts(&self) -> Vec<DegreeVector> {
        self.shifts.clone()
    }
}

fn pair_indices(n: usize, rng: &mut ChaCha8Rng) -> (Vec<(usize, usize)>, bool) {
    pair_sample(n, rng, SAMPLES)
}

fn pair_sample(n: usize, rng: &mut ChaCha8Rng, samples: usize) -> (Vec<(usize, usize)>, bool) {
    if n * n <= EXHAUSTIVE_PAIRS {
        ((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(), true)
    } else {
        (
            (0..samples)
                .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
                .collect(),
            false,
        )
    }
}

fn sampled_note(t: &mut Tally, exhaustive: bool, what: &str) {
    sampled_note_n(t, exhaustive, what, SAMPLES);
}

fn sampled_note_n(t: &mut Tally, exhaustive: bool, what: &str, samples: usize) {
    if !exhaustive {
        t.note(format!("{what} sampled ({samples} seeded draws)"));
    }
}

/// Blocks read from the window grid agree with factorization of the body,
/// and nested diagonal blocks recompose: `x(−q, q) = x(−q, −p)·x(−p, p)·x(p, q)`.
pub fn check_window_blocks(u: &WindowUniverse<'_>) -> CheckOutcome {
    run("window_blocks", |t| {
        let kg = u.kg;
        let n = u.radius as i64;
        let k = kg.k();
        let half = DegreeVector::splat(k, n);
        let ws = u.top();
        let step = (ws.len() / 64).max(1);
        if step > 1 {
            t.note(format!("every {step}th window"));
        }
        for w in ws.iter().step_by(step) {
            for m in DegreeVector::box_iter(&-&half, &half) {
                for e in DegreeVector::box_iter(&m, &half) {
                    let via_grid = w.block(kg, &m, &e)?;
                    let via_factor = kg.block(w.body(), &(&m + &half), &(&e + &half))?;
                    t.case(via_grid == via_factor, || format!("{w:?}: block ({m}, {e})"));
                }
            }
            for p in 0..n {
                for q in p + 1..=n {
                    let (pp, qq) = (DegreeVector::splat(k, p), DegreeVector::splat(k, q));
                    let outer = w.block(kg, &-&qq, &qq)?;
                    let glued = kg.compose(
                        &kg.compose(&w.block(kg, &-&qq, &-&pp)?, &w.block(kg, &-&pp, &pp)?)?,
                        &w.block(kg, &pp, &qq)?,
                    )?;
                    t.case(outer == glued, || format!("{w:?}: nesting {p} ⊂ {q}"));
                }
            }
        }
        Ok(())
    })
}

/// `σᵐσⁿ = σ^{n+m}` where defined, compared on the common radius.
pub fn check_shift_semigroup(u: &WindowUniverse<'_>) -> CheckOutcome {
    run("shift_semigroup", |t| {
        let kg = u.kg;
        let shifts = u.shifts();
        for w in u.top() {
            t.case(shift(kg, w, &DegreeVector::zero(kg.k()))? == *w, || {
                format!("σ⁰ moves {w:?}")
            });
            for n in &shifts {
                let sn = shift(kg, w, n)?;
                for m in &shifts {
                    if m.max_abs() as usize >= sn.radius() {
                        continue;
                    }
                    let lhs = shift(kg, &sn, m)?;
                    let rhs = shift(kg, w, &(n + m))?;
                    let r = lhs.radius().min(rhs.radius());
                    t.case(lhs.restrict(kg, r)? == rhs.restrict(kg, r)?, || {
                        format!("{w:?}: σ^{m}σ^{n}")
                    });
                }
            }
        }
        Ok(())
    })
}

/// Distinct windows are separated by `ρ ≥ r` after some shift `|nᵢ| ≤ N − 1`.
pub fn check_expansiveness(u: &WindowUniverse<'_>, params: &MetricParams, seed: u64) -> CheckOutcome {
    run("expansiveness", |t| {
        let ws = u.top();
        let shifts = u.shifts();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pairs, exhaustive) = pair_indices(ws.len(), &mut rng);
        sampled_note(t, exhaustive, "pairs");
        if ws.len() < 2 {
            t.note("a single window: nothing to separate");
        }
        for (i, j) in pairs {
            if i == j {
                continue;
            }
            let mut separated = false;
            for s in 0..shifts.len() {
                if distance(u.shifted(i, s), u.shifted(j, s), params)?.rho >= params.r() {
                    separated = true;
                    break;
                }
            }
            t.case(separated, || format!("{:?} and {:?} never separate", ws[i], ws[j]));
        }
        Ok(())
    })
}

/// `ρ(σ^{je}y, σ^{je}z) ≤ rʲ ρ(y, z)` when `y, z` share the future, and the
/// mirrored bound with `σ^{−je}` when they share the past.
pub fn check_contraction(u: &WindowUniverse<'_>, params: &MetricParams, seed: u64) -> CheckOutcome {
    run("contraction", |t| {
        let kg = u.kg;
        let ws = u.top();
        let k = kg.k();
        let zero = DegreeVector::zero(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pairs, exhaustive) = pair_indices(ws.len(), &mut rng);
        sampled_note(t, exhaustive, "pairs");
        for (i, j) in pairs {
            let (y, z) = (&ws[i], &ws[j]);
            let share_future = stable_equiv(y, z, &zero)?;
            let share_past = unstable_equiv(y, z, &zero)?;
            if !share_future && !share_past {
                continue;
            }
            let rho = distance(y, z, params)?.rho;
            for jj in 1..u.radius as i64 {
                let bound = params.r().powi(jj as i32) * rho;
                let step = DegreeVector::splat(k, jj);
                if share_future {
                    let d = distance(&shift(kg, y, &step)?, &shift(kg, z, &step)?, params)?.rho;
                    t.case(d <= bound * (1.0 + 1e-12), || {
                        format!("σ^{{{jj}e}} on {y:?}, {z:?}: {d} > {bound}")
                    });
                }
                if share_past {
                    let d = distance(&shift(kg, y, &-&step)?, &shift(kg, z, &-&step)?, params)?.rho;
                    t.case(d <= bound * (1.0 + 1e-12), || {
                        format!("σ^{{-{jj}e}} on {y:?}, {z:?}: {d} > {bound}")
                    });
                }
            }
        }
        Ok(())
    })
}

const NO_BRACKET: u32 = u32::MAX;

/// `[x,x] = x`, `[[x,y],z] = [x,z]`, `[x,[y,z]] = [x,z]`, uniqueness of the
/// bracket, and `[σⁿx, σⁿy] = σⁿ[x,y]` for pairs that agree on the box
/// between `0` and `n`.
pub fn check_bracket_axioms(u: &WindowUniverse<'_>, seed: u64) -> CheckOutcome {
    run("bracket_axioms", |t| {
        let kg = u.kg;
        let ws = u.top();
        let n = ws.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // bracket table over all same-center pairs
        let mut table = vec![NO_BRACKET; if n * n <= EXHAUSTIVE_PAIRS { n * n } else { 0 }];
        let lookup = |table: &Vec<u32>, i: usize, j: usize| -> Result<Option<usize>> {
            if !table.is_empty() {
                let v = table[i * n + j];
                return Ok((v != NO_BRACKET).then_some(v as usize));
            }
            match bracket(kg, &ws[i], &ws[j]) {
                Ok(b) => Ok(Some(u.id_of(&b))),
                Err(KGraphError::NotBracketable) => Ok(None),
                Err(e) => Err(e),
            }
        };
        if !table.is_empty() {
            for i in 0..n {
                for j in 0..n {
                    if ws[i].center() == ws[j].center() {
                        table[i * n + j] = u.id_of(&bracket(kg, &ws[i], &ws[j])?) as u32;
                    }
                }
            }
        }
        // uniqueness: (past, future) determines the window
        let mut halves: HashMap<(Morphism, Morphism), Vec<usize>> = HashMap::new();
        for (i, w) in ws.iter().enumerate() {
            halves.entry((w.past(kg), w.future(kg))).or_default().push(i);
        }
        for i in 0..n {
            t.case(lookup(&table, i, i)? == Some(i), || {
                format!("[x,x] != x for {:?}", ws[i])
            });
        }
        let (pairs, exhaustive) = pair_indices(n, &mut rng);
        sampled_note(t, exhaustive, "pairs");
        for &(i, j) in &pairs {
            let Some(b) = lookup(&table, i, j)? else { continue };
            let hits = halves.get(&(ws[i].past(kg), ws[j].future(kg)));
            t.case(hits.map(|h| h.as_slice()) == Some(&[b][..]), || {
                format!("F_x ∩ E_y is not {{[x,y]}} for {:?}, {:?}", ws[i], ws[j])
            });
        }
        // triples
        let triple = |t: &mut Tally, i: usize, j: usize, l: usize| -> Result<()> {
            let (Some(xy), Some(yz), Some(xz)) = (lookup(&table, i, j)?, lookup(&table, j, l)?, lookup(&table, i, l)?)
            else {
                return Ok(());
            };
            t.case(lookup(&table, xy, l)? == Some(xz), || {
                format!("[[x,y],z] != [x,z] for {:?}, {:?}, {:?}", ws[i], ws[j], ws[l])
            });
            t.case(lookup(&table, i, yz)? == Some(xz), || {
                format!("[x,[y,z]] != [x,z] for {:?}, {:?}, {:?}", ws[i], ws[j], ws[l])
            });
            Ok(())
        };
        if n * n * n <= EXHAUSTIVE_TRIPLES {
            for i in 0..n {
                for j in 0..n {
                    if ws[i].center() != ws[j].center() {
                        continue;
                    }
                    for l in 0..n {
                        triple(t, i, j, l)?;
                    }
                }
            }
        } else {
            t.note(format!("triples sampled ({SAMPLES} seeded draws)"));
            for _ in 0..SAMPLES {
                let (i, j, l) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                triple(t, i, j, l)?;
            }
        }
        // equivariance; brackets of shifted windows are memoized per radius
        let zero = DegreeVector::zero(kg.k());
        let mut lower: HashMap<usize, (HashMap<Morphism, usize>, HashMap<(usize, usize), Window>)> = HashMap::new();
        let mut literal_failures = 0u64;
        for &(i, j) in &pairs {
            let Some(b) = lookup(&table, i, j)? else { continue };
            for (si, s) in u.shifts.iter().enumerate() {
                if s.is_zero() {
                    continue;
                }
                let (sx, sy) = (u.shifted(i, si), u.shifted(j, si));
                if sx.center() != sy.center() {
                    continue;
                }
                let (index, memo) = match lower.entry(sx.radius()) {
                    std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                    std::collections::hash_map::Entry::Vacant(e) => {
                        let ws_r = all_windows(kg, sx.radius())?;
                        let index = ws_r.iter().enumerate().map(|(i, w)| (w.body().clone(), i)).collect();
                        e.insert((index, HashMap::new()))
                    }
                };
                let key = (index[sx.body()], index[sy.body()]);
                let lhs = match memo.get(&key) {
                    Some(w) => w,
                    None => {
                        let w = bracket(kg, sx, sy)?;
                        memo.entry(key).or_insert(w)
                    }
                };
                let rhs = u.shifted(b, si);
                let lo = DegreeVector::min(s, &zero);
                let hi = DegreeVector::max(s, &zero);
                if ws[i].agrees_on(&ws[j], &lo, &hi)? {
                    t.case(lhs == rhs, || {
                        format!("[σ^{s}x, σ^{s}y] != σ^{s}[x,y] for {:?}, {:?}", ws[i], ws[j])
                    });
                } else if lhs != rhs {
                    literal_failures += 1;
                }
            }
        }
        if literal_failures > 0 {
            t.note(format!(
                "{literal_failures} shifted pairs with equal centers but different blocks between 0 and n have [σⁿx, σⁿy] != σⁿ[x,y]"
            ));
        }
        Ok(())
    })
}

/// `E × F ≅ Z(v, 0)` at every vertex and every radius `≤ N`.
pub fn check_local_product(kg: &KGraph, radius: usize) -> CheckOutcome {
    run("local_product", |t| {
        for v in kg.vertices() {
            for r in 1..=radius {
                let lp = local_product_enum(kg, v, r)?;
                t.case(lp.check, || {
                    format!(
                        "at {} radius {r}: |E| = {}, |F| = {}, windows = {}",
                        kg.skeleton().vertex_id(v),
                        lp.e_fiber.len(),
                        lp.f_fiber.len(),
                        lp.windows
                    )
                });
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- relations

/// Stable sets grow upward and unstable sets downward in the box.
pub fn check_stable_nesting(u: &WindowUniverse<'_>, seed: u64) -> CheckOutcome {
    run("stable_nesting", |t| {
        let ws = u.top();
        let k = u.kg.k();
        let half = DegreeVector::splat(k, u.radius as i64);
        let points: Vec<DegreeVector> = DegreeVector::box_iter(&-&half, &half).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pairs, exhaustive) = pair_indices(ws.len(), &mut rng);
        sampled_note(t, exhaustive, "pairs");
        for (i, j) in pairs {
            let (x, y) = (&ws[i], &ws[j]);
            for m in &points {
                let s = stable_equiv(x, y, m)?;
                let un = unstable_equiv(x, y, m)?;
                for c in 0..k {
                    let up = m + &DegreeVector::unit(k, c);
                    if s && x.contains(&up) {
                        t.case(stable_equiv(x, y, &up)?, || {
                            format!("stable at {m} but not {up}: {x:?}, {y:?}")
                        });
                    }
                    let down = m - &DegreeVector::unit(k, c);
                    if un && x.contains(&down) {
                        t.case(unstable_equiv(x, y, &down)?, || {
                            format!("unstable at {m} but not {down}: {x:?}, {y:?}")
                        });
                    }
                }
            }
        }
        Ok(())
    })
}

/// The stable class enumerator returns exactly the windows that are stable
/// from `m`.
pub fn check_stable_class(u: &WindowUniverse<'_>) -> CheckOutcome {
    run("stable_class", |t| {
        let kg = u.kg;
        let ws = u.top();
        let half = DegreeVector::splat(kg.k(), u.radius as i64);
        let step = (ws.len() / 16).max(1);
        if step > 1 {
            t.note(format!("every {step}th window"));
        }
        for x in ws.iter().step_by(step) {
            for m in DegreeVector::box_iter(&-&half, &half) {
                let class = match stable_class(kg, x, &m) {
                    Ok(c) => c,
                    Err(KGraphError::BoundExceeded { .. }) => {
                        t.note(format!("classes above the enumeration cap skipped from {m}"));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let class: HashSet<usize> = class.iter().map(|w| u.id_of(w)).collect();
                let direct: HashSet<usize> = ws
                    .iter()
                    .enumerate()
                    .filter(|(_, y)| stable_equiv(x, y, &m).unwrap_or(false))
                    .map(|(i, _)| i)
                    .collect();
                t.case(class == direct, || format!("stable class of {x:?} from {m}"));
            }
        }
        Ok(())
    })
}

/// `(x, y) ∈ G_{s,m+n} ⇔ (σᵐx, σᵐy) ∈ G_{s,n}`, and
/// `(x, y) ∈ G_{s,m} ⇔ π(σᵐx) = π(σᵐy)`. The shifted windows only see
/// `[m − N′e, m + N′e]` with `N′ = N − max|mᵢ|`, so the left-hand sides are
/// read as agreement up to `m + N′e`; for `m = je`, `j ≥ 0` this is the
/// stable relation itself.
pub fn check_shift_relations(u: &WindowUniverse<'_>, bound: i64, seed: u64) -> (CheckOutcome, CheckOutcome) {
    let kg = u.kg;
    let k = kg.k();
    let ws = u.top();
    let b = bound.min(u.radius as i64 - 1).max(0);
    let shifts: Vec<DegreeVector> =
        DegreeVector::box_iter(&DegreeVector::splat(k, -b), &DegreeVector::splat(k, b)).collect();
    let shift_ids: Vec<usize> = shifts.iter().map(|m| u.shift_index(m)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pairs, exhaustive) = pair_sample(ws.len(), &mut rng, RELATION_SAMPLES);
    let conj = run("shift_conjugation", |t| {
        sampled_note_n(t, exhaustive, "pairs", RELATION_SAMPLES);
        for &(i, j) in &pairs {
            let (x, y) = (&ws[i], &ws[j]);
            for m in &shifts {
                let si = u.shift_index(m);
                let (sx, sy) = (u.shifted(i, si), u.shifted(j, si));
                let rr = DegreeVector::splat(k, sx.radius() as i64);
                let end = m + &rr;
                for n in DegreeVector::box_iter(&-&rr, &rr) {
                    let lhs = x.agrees_on(y, &(m + &n), &end)?;
                    let rhs = stable_equiv(sx, sy, &n)?;
                    t.case(lhs == rhs, || format!("G_s at {m}+{n} vs shifted at {n}: {x:?}, {y:?}"));
                }
                if m.is_nonneg() && m.components().iter().all(|&c| c == m.get(0)) {
                    t.case(x.agrees_on(y, m, &end)? == stable_equiv(x, y, m)?, || {
                        format!("truncated and full stable relation differ at {m}: {x:?}, {y:?}")
                    });
                }
            }
        }
        Ok(())
    });
    let fibered = run("fibered_product", |t| {
        sampled_note_n(t, exhaustive, "pairs", RELATION_SAMPLES);
        for &(i, j) in &pairs {
            let (x, y) = (&ws[i], &ws[j]);
            for (m, si) in shifts.iter().zip(&shift_ids) {
                let (sx, sy) = (u.shifted(i, *si), u.shifted(j, *si));
                let end = m + &DegreeVector::splat(k, sx.radius() as i64);
                let lhs = x.agrees_on(y, m, &end)?;
                let rhs = restriction_map(kg, sx) == restriction_map(kg, sy);
                t.case(lhs == rhs, || {
                    format!("π∘σ^{m} characterization fails for {x:?}, {y:?}")
                });
            }
        }
        Ok(())
    });
    (conj, fibered)
}

/// `x ∼_a y` at `m` iff stable at `m` and unstable at `−m`, the unstable
/// half computed through Λ^op.
pub fn check_asymptotic(u: &WindowUniverse<'_>, op: &KGraph, seed: u64) -> CheckOutcome {
    run("asymptotic", |t| {
        let ws = u.top();
        let half = DegreeVector::splat(u.kg.k(), u.radius as i64);
        let offsets: Vec<DegreeVector> = DegreeVector::box_iter(&DegreeVector::zero(u.kg.k()), &half).collect();
        let ops: Vec<Window> = ws.iter().map(|w| opposite_window(op, w)).collect::<Result<_>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pairs, exhaustive) = pair_indices(ws.len(), &mut rng);
        sampled_note(t, exhaustive, "pairs");
        if let Some(&(i, j)) = pairs.iter().find(|(i, j)| i != j) {
            let m = DegreeVector::zero(u.kg.k());
            let direct = unstable_equiv_via_opposite(op, &ws[i], &ws[j], &m)?;
            t.case(direct == stable_equiv(&ops[i], &ops[j], &m)?, || {
                "cached opposite windows disagree".into()
            });
        }
        for (i, j) in pairs {
            let (x, y) = (&ws[i], &ws[j]);
            for m in &offsets {
                let a = asymptotic_equiv(x, y, m)?;
                // unstable from −m, read in Λ^op as stable from m
                let both = stable_equiv(x, y, m)? && stable_equiv(&ops[i], &ops[j], m)?;
                t.case(a == both, || format!("asymptotic at {m} for {x:?}, {y:?}"));
            }
        }
        Ok(())
    })
}

/// `(x^op)^op = x`, and `x ∼_s y ⇔ x^op ∼_u y^op` with offsets negated.
pub fn check_opposite_involution(u: &WindowUniverse<'_>, op: &KGraph, seed: u64) -> CheckOutcome {
    run("opposite_involution", |t| {
        let kg = u.kg;
        let ws = u.top();
        let ops: Vec<Window> = ws.iter().map(|w| opposite_window(op, w)).collect::<Result<_>>()?;
        for (w, o) in ws.iter().zip(&ops) {
            t.case(opposite_window(kg, o)? == *w, || format!("(x^op)^op != x for {w:?}"));
        }
        let half = DegreeVector::splat(kg.k(), u.radius as i64);
        let points: Vec<DegreeVector> = DegreeVector::box_iter(&-&half, &half).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pairs, exhaustive) = pair_indices(ws.len(), &mut rng);
        sampled_note(t, exhaustive, "pairs");
        for (i, j) in pairs {
            for m in &points {
                let s = stable_equiv(&ws[i], &ws[j], m)?;
                let s_op = unstable_equiv(&ops[i], &ops[j], &-m)?;
                let un = unstable_equiv(&ws[i], &ws[j], m)?;
                let un_op = stable_equiv(&ops[i], &ops[j], &-m)?;
                t.case(s == s_op && un == un_op, || {
                    format!("op swap at {m} for {:?}, {:?}", ws[i], ws[j])
                });
            }
        }
        Ok(())
    })
}

/// Unit and inverse laws in `G_s ⋊ ℤᵏ` for all pairs sharing the future with
/// shifts small enough to undo inside the box, then units, inverses and
/// associativity on seeded radius-7 windows with `|nᵢ| ≤ 1`.
pub fn check_semidirect(u: &WindowUniverse<'_>, seed: u64) -> CheckOutcome {
    run("semidirect", |t| {
        let kg = u.kg;
        let ws = u.top();
        let k = kg.k();
        // σ^{−n}σⁿ needs 2|n| < N
        let shifts: Vec<DegreeVector> = u
            .shifts()
            .into_iter()
            .filter(|n| 2 * n.max_abs() < u.radius as i64)
            .collect();
        let mut classes: HashMap<Morphism, Vec<usize>> = HashMap::new();
        for (i, w) in ws.iter().enumerate() {
            classes.entry(w.future(kg)).or_default().push(i);
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for members in classes.values() {
            for &i in members {
                for &j in members {
                    pairs.push((i, j));
                }
            }
        }
        pairs.sort_unstable();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if pairs.len() > SAMPLES {
            pairs = pairs.choose_multiple(&mut rng, SAMPLES).copied().collect();
            t.note(format!("pairs sampled ({SAMPLES} seeded draws)"));
        }
        for &(i, j) in &pairs {
            for n in &shifts {
                group_laws(t, kg, &ws[i], &ws[j], n)?;
            }
        }
        // associativity needs room for three shifts, so it runs on sampled
        // windows of radius 7 sharing one future
        let big = 7usize;
        let half = DegreeVector::splat(k, big as i64);
        let units: Vec<DegreeVector> =
            DegreeVector::box_iter(&DegreeVector::splat(k, -1), &DegreeVector::ones(k)).collect();
        for _ in 0..100 {
            let future = random_path(kg, &mut rng, &half, None)?;
            let pick = |rng: &mut ChaCha8Rng| -> Result<Window> {
                let past = random_path(kg, rng, &half, Some(future.range()))?;
                crate::dynamics::make_window(kg, kg.compose(&past, &future)?, big)
            };
            let (x, y, z, w) = (pick(&mut rng)?, pick(&mut rng)?, pick(&mut rng)?, pick(&mut rng)?);
            let n = units.choose(&mut rng).expect("nonempty").clone();
            let m = units.choose(&mut rng).expect("nonempty").clone();
            let p = units.choose(&mut rng).expect("nonempty").clone();
            let nm = &n + &m;
            group_laws(t, kg, &x, &y, &n)?;
            let g1 = GroupoidElement::new(x, y.clone(), n.clone())?;
            let g2 = GroupoidElement::new(shift(kg, &y, &n)?, shift(kg, &z, &n)?, m.clone())?;
            let g3 = GroupoidElement::new(shift(kg, &z, &nm)?, shift(kg, &w, &nm)?, p.clone())?;
            let lhs = semidirect_compose(kg, &semidirect_compose(kg, &g1, &g2)?, &g3)?;
            let rhs = semidirect_compose(kg, &g1, &semidirect_compose(kg, &g2, &g3)?)?;
            t.case(lhs.agrees_with(kg, &rhs)?, || {
                format!("(g₁g₂)g₃ != g₁(g₂g₃) for n = {n}, m = {m}, p = {p}")
            });
        }
        Ok(())
    })
}

fn group_laws(t: &mut Tally, kg: &KGraph, x: &Window, y: &Window, n: &DegreeVector) -> Result<()> {
    let g = GroupoidElement::new(x.clone(), y.clone(), n.clone())?;
    let left = semidirect_compose(kg, &GroupoidElement::unit(x.clone()), &g)?;
    t.case(left.agrees_with(kg, &g)?, || {
        format!("left unit fails on (({x:?}, {y:?}), {n})")
    });
    let sy = shift(kg, y, n)?;
    let right = semidirect_compose(kg, &g, &GroupoidElement::unit(sy.clone()))?;
    t.case(right.agrees_with(kg, &g)?, || {
        format!("right unit fails on (({x:?}, {y:?}), {n})")
    });
    let inv = GroupoidElement::new(sy, shift(kg, x, n)?, -n)?;
    let prod = semidirect_compose(kg, &g, &inv)?;
    t.case(prod.agrees_with(kg, &GroupoidElement::unit(x.clone()))?, || {
        format!("g·g⁻¹ is not a unit for (({x:?}, {y:?}), {n})")
    });
    Ok(())
}

/// A uniformly chosen edge at each step of a normal-form word of degree `d`,
/// built backwards from `source` when given, otherwise forwards from a random
/// vertex.
pub fn random_path<R: Rng + ?Sized>(
    kg: &KGraph,
    rng: &mut R,
    d: &DegreeVector,
    source: Option<Vertex>,
) -> Result<Morphism> {
    let colors: Vec<usize> = normal_colors(d).collect();
    if colors.is_empty() {
        let v = source.unwrap_or_else(|| Vertex(rng.random_range(0..kg.vertex_count())));
        return Ok(kg.identity(v));
    }
    let mut word = Vec::with_capacity(colors.len());
    match source {
        Some(mut v) => {
            for &c in colors.iter().rev() {
                let e = *kg.edges_with_source(c, v).choose(rng).expect("standing assumption");
                word.push(e);
                v = kg.skeleton().edge(e).range;
            }
            word.reverse();
        }
        None => {
            let mut v = Vertex(rng.random_range(0..kg.vertex_count()));
            for &c in &colors {
                let e = *kg.edges_with_range(c, v).choose(rng).expect("standing assumption");
                word.push(e);
                v = kg.skeleton().edge(e).source;
            }
        }
    }
    kg.morphism_from_word(&word)
}

/// For seeded random cylinder pairs, every `q ∈ [Q, Q + 2e]` is witnessed.
pub fn check_mixing(kg: &KGraph, pairs: usize, search_bound: i64, seed: u64) -> CheckOutcome {
    run("mixing_lag", |t| {
        let conn = classify_connectivity(kg, &DegreeVector::splat(kg.k(), search_bound));
        let Some(threshold) = conn.primitivity_threshold.filter(|_| conn.primitive) else {
            t.note("not primitive within the search bound; nothing to check");
            return Ok(());
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut paths = Paths::new(kg);
        let degrees = cube(kg.k(), 2);
        let draw = |rng: &mut ChaCha8Rng, paths: &mut Paths<'_>| -> Result<CylinderSet> {
            let d = &degrees[rng.random_range(0..degrees.len())];
            let all = paths.all(d)?;
            let lam = all[rng.random_range(0..all.len())].clone();
            let off = DegreeVector::new((0..kg.k()).map(|_| rng.random_range(-2..=2)).collect());
            Ok(CylinderSet::new(lam, off))
        };
        for _ in 0..pairs {
            let u = draw(&mut rng, &mut paths)?;
            let v = draw(&mut rng, &mut paths)?;
            let lag = mixing_lag_with_threshold(kg, &threshold, &u, &v)?;
            let expected = &(&(&threshold + v.lambda.degree()) + &v.offset) - &u.offset;
            t.case(lag.verified && lag.q == expected, || {
                format!(
                    "U = Z({}, {}), V = Z({}, {}): Q = {}",
                    ids(kg, &u.lambda),
                    u.offset,
                    ids(kg, &v.lambda),
                    v.offset,
                    lag.q
                )
            });
        }
        Ok(())
    })
}

/// Runs every check in a fixed order.
pub fn run_suite(kg: &KGraph, cfg: &CheckConfig) -> SuiteReport {
    let mut checks = vec![
        check_factorization(kg, cfg.split_depth),
        check_associativity(kg, cfg.split_depth),
        check_normal_form_confluence(kg, cfg.confluence_words, cfg.seed),
        check_opposite(kg, cfg.split_depth),
        check_semigroup(kg, cfg.matrix_depth),
        check_generator_commutation(kg),
        check_matrix_counts(kg, cfg.split_depth),
        check_af(kg, cfg.split_depth),
    ];
    match perron_data(kg, cfg.tol) {
        Ok(pd) => {
            checks.push(check_perron(kg, &pd, cfg.matrix_depth, cfg.tol));
            checks.push(check_expansion(kg, &pd, cfg.cylinder_depth, cfg.split_depth));
            checks.push(check_total_mass(kg, &pd));
            checks.push(check_product_decomposition(kg, &pd, cfg.radius));
            checks.push(check_haar_scaling(kg, &pd, cfg.cylinder_depth));
            checks.push(check_trace_scaling(kg, &pd, 2, cfg.seed));
            checks.push(check_disintegration(kg, &pd, cfg.cylinder_depth));
        }
        Err(e) => checks.push(run("perron", |_| Err(e))),
    }
    let params = MetricParams::new(cfg.metric_r);
    match (WindowUniverse::new(kg, cfg.radius), params, opposite_graph(kg)) {
        (Ok(u), Ok(params), Ok(op)) => {
            checks.push(check_window_blocks(&u));
            checks.push(check_shift_semigroup(&u));
            checks.push(check_expansiveness(&u, &params, cfg.seed));
            checks.push(check_contraction(&u, &params, cfg.seed));
            checks.push(check_bracket_axioms(&u, cfg.seed));
            checks.push(check_local_product(kg, cfg.radius));
            checks.push(check_stable_nesting(&u, cfg.seed));
            checks.push(check_stable_class(&u));
            let (conj, fib) = check_shift_relations(&u, cfg.relation_shift, cfg.seed);
            checks.push(conj);
            checks.push(fib);
            checks.push(check_asymptotic(&u, &op, cfg.seed));
            checks.push(check_opposite_involution(&u, &op, cfg.seed));
            checks.push(check_semidirect(&u, cfg.seed));
        }
        (u, p, o) => {
            let e = u.err().or(p.err()).or(o.err()).expect("one input failed");
            checks.push(run("windows", |_| Err(e)));
        }
    }
    checks.push(check_mixing(kg, cfg.mixing_pairs, cfg.search_bound, cfg.seed));
    SuiteReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn suite_passes_on_examples() {
        for kg in [catalog::g1(), catalog::g2(), catalog::g3(), catalog::g4()] {
            let report = run_suite(&kg, &CheckConfig::default());
            for c in &report.checks {
                assert!(c.passed, "{c:?}");
                assert!(c.cases > 0 || c.note.is_some(), "{c:?}");
            }
        }
    }

    #[test]
    fn literal_equivariance_fails_on_g1() {
        let g1 = catalog::g1();
        let x = crate::dynamics::make_window(&g1, g1.morphism_from_ids(&["alpha"; 4]).unwrap(), 2).unwrap();
        let y = crate::dynamics::make_window(&g1, g1.morphism_from_ids(&["beta"; 4]).unwrap(), 2).unwrap();
        let one = DegreeVector::from([1]);
        let lhs = bracket(&g1, &shift(&g1, &x, &one).unwrap(), &shift(&g1, &y, &one).unwrap()).unwrap();
        let rhs = shift(&g1, &bracket(&g1, &x, &y).unwrap(), &one).unwrap();
        assert_eq!(g1.word_ids(lhs.body()), ["alpha", "beta"]);
        assert_eq!(g1.word_ids(rhs.body()), ["beta", "beta"]);
    }

    #[test]
    fn broken_measure_is_caught() {
        let g2 = catalog::g2();
        let mut pd = perron_data(&g2, 1e-12).unwrap();
        pd.a[0] *= 1.001;
        assert!(!check_expansion(&g2, &pd, 1, 1).passed);
        assert!(!check_perron(&g2, &pd, 1, 1e-12).passed);
    }
}
