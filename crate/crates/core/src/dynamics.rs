//! Two-sided paths truncated to a symmetric box: shift, metric, bracket,
//! local product structure and mixing.
//!
//! A window of radius `N` is the block `x(−Ne, Ne)`. Anything that would read
//! outside the box fails with an error instead of padding.

use std::collections::HashSet;
use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degree::DegreeVector;
use crate::error::{KGraphError, Result};
use crate::grid::PathGrid;
use crate::kgraph::{normal_colors, KGraph, Morphism};
use crate::measure::CylinderSet;
use crate::skeleton::{Edge, Vertex};
use crate::spectral::{classify_connectivity, vertex_matrix, PerronData, DEFAULT_SEARCH_BOUND};

/// Parameter `r ∈ (0, 1)` of the metric `ρ(x, y) = r^h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricParams {
    r: f64,
}

impl MetricParams {
    pub fn new(r: f64) -> Result<Self> {
        if r > 0.0 && r < 1.0 {
            Ok(MetricParams { r })
        } else {
            Err(KGraphError::InvalidParameter(format!(
                "metric parameter r = {r} is not in (0, 1)"
            )))
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams { r: 0.5 }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Window {
    radius: usize,
    body: Morphism,
    grid: PathGrid,
}

impl fmt::Debug for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Window{{N={}, {:?}}}", self.radius, self.body)
    }
}

/// `x(−Ne, Ne) = body`. The degree of `body` must be `2Ne`.
pub fn make_window(kg: &KGraph, body: Morphism, radius: usize) -> Result<Window> {
    let want = DegreeVector::splat(kg.k(), 2 * radius as i64);
    if body.degree() != &want {
        return Err(KGraphError::DegreeMismatch(format!(
            "window body has degree {}, radius {radius} needs {want}",
            body.degree()
        )));
    }
    if radius == 0 {
        return Err(KGraphError::InvalidParameter("window radius must be positive".into()));
    }
    let grid = PathGrid::new(kg, &body);
    Ok(Window { radius, body, grid })
}

fn from_grid(kg: &KGraph, grid: PathGrid, radius: usize) -> Window {
    let zero = DegreeVector::zero(kg.k());
    let word = grid.block_word(&zero, grid.dims());
    let body = kg.morphism_from_word(&word).expect("grid words are composable");
    Window { radius, body, grid }
}

impl Window {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn body(&self) -> &Morphism {
        &self.body
    }

    pub fn grid(&self) -> &PathGrid {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.body.degree().k()
    }

    fn half(&self) -> DegreeVector {
        DegreeVector::splat(self.k(), self.radius as i64)
    }

    /// Whether `m` lies in `[−Ne, Ne]`.
    pub fn contains(&self, m: &DegreeVector) -> bool {
        m.k() == self.k() && m.max_abs() <= self.radius as i64
    }

    fn to_grid(&self, m: &DegreeVector) -> Result<DegreeVector> {
        if !self.contains(m) {
            return Err(KGraphError::OutOfBox {
                coord: m.to_string(),
                radius: self.radius,
            });
        }
        Ok(m + &self.half())
    }

    /// `x(0) = s(x(−Ne, 0)) = r(x(0, Ne))`.
    pub fn center(&self) -> Vertex {
        self.grid.vertex_at(&self.half())
    }

    pub fn vertex_at(&self, m: &DegreeVector) -> Result<Vertex> {
        Ok(self.grid.vertex_at(&self.to_grid(m)?))
    }

    /// `x(m, n)` for `−Ne ≤ m ≤ n ≤ Ne`.
    pub fn block(&self, kg: &KGraph, m: &DegreeVector, n: &DegreeVector) -> Result<Morphism> {
        let (gm, gn) = (self.to_grid(m)?, self.to_grid(n)?);
        if !m.le(n) {
            return Err(KGraphError::DegreeMismatch(format!("block ({m}, {n}) has m > n")));
        }
        let word = self.grid.block_word(&gm, &gn);
        if word.is_empty() {
            return Ok(kg.identity(self.grid.vertex_at(&gm)));
        }
        kg.morphism_from_word(&word)
    }

    /// `x(−Ne, 0)`.
    pub fn past(&self, kg: &KGraph) -> Morphism {
        let zero = DegreeVector::zero(self.k());
        self.block(kg, &-self.half(), &zero).expect("inside box")
    }

    /// `x(0, Ne)`.
    pub fn future(&self, kg: &KGraph) -> Morphism {
        let zero = DegreeVector::zero(self.k());
        self.block(kg, &zero, &self.half()).expect("inside box")
    }

    /// Whether `x(m, n) = y(m, n)`; both boxes must contain `[m, n]`.
    pub fn agrees_on(&self, other: &Window, m: &DegreeVector, n: &DegreeVector) -> Result<bool> {
        let (a, b) = (self.to_grid(m)?, other.to_grid(m)?);
        self.to_grid(n)?;
        other.to_grid(n)?;
        Ok(self.grid.blocks_equal(&a, &other.grid, &b, &(n - m)))
    }

    /// The same path seen in the smaller box of radius `radius`.
    pub fn restrict(&self, kg: &KGraph, radius: usize) -> Result<Window> {
        if radius == 0 || radius > self.radius {
            return Err(KGraphError::InvalidParameter(format!(
                "cannot restrict radius {} to {radius}",
                self.radius
            )));
        }
        if radius == self.radius {
            return Ok(self.clone());
        }
        let d = (self.radius - radius) as i64;
        let lo = DegreeVector::splat(self.k(), d);
        let hi = DegreeVector::splat(self.k(), d + 2 * radius as i64);
        Ok(from_grid(kg, self.grid.sub_grid(&lo, &hi), radius))
    }

    pub fn to_record(&self, kg: &KGraph) -> WindowRecord {
        WindowRecord {
            radius: self.radius,
            body: kg.word_ids(&self.body),
            graph: kg.fingerprint().to_owned(),
        }
    }
}

/// Serialized form of a window: radius, body edge ids and graph fingerprint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub radius: usize,
    pub body: Vec<String>,
    pub graph: String,
}

impl WindowRecord {
    pub fn to_window(&self, kg: &KGraph) -> Result<Window> {
        if self.graph != kg.fingerprint() {
            return Err(KGraphError::GraphMismatch(format!(
                "window recorded for {} read with graph {}",
                self.graph,
                kg.fingerprint()
            )));
        }
        let ids: Vec<&str> = self.body.iter().map(String::as_str).collect();
        make_window(kg, kg.morphism_from_ids(&ids)?, self.radius)
    }
}

/// `σⁿ x` seen in the largest box that fits: radius `N − max|nᵢ|`.
pub fn shift(kg: &KGraph, w: &Window, n: &DegreeVector) -> Result<Window> {
    if n.k() != w.k() {
        return Err(KGraphError::DegreeMismatch(format!("shift {n} has the wrong rank")));
    }
    let reach = n.max_abs() as usize;
    if reach >= w.radius {
        return Err(KGraphError::RadiusExhausted {
            shift: n.to_string(),
            radius: w.radius,
        });
    }
    if reach == 0 {
        return Ok(w.clone());
    }
    let radius = w.radius - reach;
    let r = DegreeVector::splat(w.k(), radius as i64);
    let lo = w.to_grid(&(n - &r))?;
    let hi = w.to_grid(&(n + &r))?;
    Ok(from_grid(kg, w.grid.sub_grid(&lo, &hi), radius))
}

/// `h = 0` when the centers differ, otherwise `1 + max{j : x(−je, je) = y(−je, je)}`.
/// Full agreement is reported as `indistinguishable` with `rho = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Distance {
    pub h: u64,
    pub indistinguishable: bool,
    pub rho: f64,
}

pub fn distance(x: &Window, y: &Window, params: &MetricParams) -> Result<Distance> {
    if x.radius != y.radius {
        return Err(KGraphError::RadiusMismatch(x.radius, y.radius));
    }
    if x.center() != y.center() {
        return Ok(Distance {
            h: 0,
            indistinguishable: false,
            rho: 1.0,
        });
    }
    let mut agree = 0;
    for j in 1..=x.radius {
        let r = DegreeVector::splat(x.k(), j as i64);
        if !x.agrees_on(y, &-&r, &r)? {
            break;
        }
        agree = j;
    }
    let h = 1 + agree as u64;
    if agree == x.radius {
        return Ok(Distance {
            h,
            indistinguishable: true,
            rho: 0.0,
        });
    }
    Ok(Distance {
        h,
        indistinguishable: false,
        rho: params.r.powi(h as i32),
    })
}

/// `[x, y]`: the past of `x` followed by the future of `y`.
pub fn bracket(kg: &KGraph, x: &Window, y: &Window) -> Result<Window> {
    if x.radius != y.radius {
        return Err(KGraphError::RadiusMismatch(x.radius, y.radius));
    }
    if x.center() != y.center() {
        return Err(KGraphError::NotBracketable);
    }
    let body = kg.compose(&x.past(kg), &y.future(kg))?;
    make_window(kg, body, x.radius)
}

/// All windows of radius `radius`, in body order.
pub fn all_windows(kg: &KGraph, radius: usize) -> Result<Vec<Window>> {
    let d = DegreeVector::splat(kg.k(), 2 * radius as i64);
    kg.enumerate_morphisms(&d)?
        .into_iter()
        .map(|body| make_window(kg, body, radius))
        .collect()
}

/// Local product structure at a vertex: past halves (the `E` fiber, degree
/// `Ne` with source `v`) times future halves (the `F` fiber, range `v`)
/// against the windows centered at `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalProduct {
    pub vertex: Vertex,
    pub radius: usize,
    pub e_fiber: Vec<Morphism>,
    pub f_fiber: Vec<Morphism>,
    pub windows: usize,
    pub check: bool,
}

pub fn local_product_enum(kg: &KGraph, v: Vertex, radius: usize) -> Result<LocalProduct> {
    let half = DegreeVector::splat(kg.k(), radius as i64);
    let e_fiber = kg.enumerate_with_source(&half, v)?;
    let f_fiber = kg.enumerate_with_range(&half, v)?;
    let centered: HashSet<Morphism> = kg
        .enumerate_morphisms(&(&half + &half))?
        .into_iter()
        .filter(|body| {
            kg.factorize(body, &half, &half)
                .map(|(p, _)| p.source() == v)
                .unwrap_or(false)
        })
        .collect();
    let mut glued = HashSet::with_capacity(e_fiber.len() * f_fiber.len());
    for past in &e_fiber {
        for future in &f_fiber {
            glued.insert(kg.compose(past, future)?);
        }
    }
    let check = e_fiber.len() * f_fiber.len() == centered.len() && glued == centered;
    Ok(LocalProduct {
        vertex: v,
        radius,
        windows: centered.len(),
        e_fiber,
        f_fiber,
        check,
    })
}

/// `Q = M + d(ν) + n − ℓ` for `U = Z(λ, ℓ)`, `V = Z(ν, n)`, and whether every
/// `q ∈ [Q, Q + 2e]` was witnessed by a path `ν·λ′·λ` with `λ′ ∈ Λ^{M+q−Q}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingLag {
    pub q: DegreeVector,
    pub threshold: DegreeVector,
    pub verified: bool,
    /// Connecting paths `λ′` (edge ids), one per tested `q`, in box order.
    pub connectors: Vec<Vec<String>>,
}

pub fn mixing_lag(kg: &KGraph, u: &CylinderSet, v: &CylinderSet) -> Result<MixingLag> {
    let conn = classify_connectivity(kg, &DegreeVector::splat(kg.k(), DEFAULT_SEARCH_BOUND));
    match conn.primitivity_threshold {
        Some(m) if conn.primitive => mixing_lag_with_threshold(kg, &m, u, v),
        _ => Err(KGraphError::NotPrimitive),
    }
}

pub fn mixing_lag_with_threshold(
    kg: &KGraph,
    threshold: &DegreeVector,
    u: &CylinderSet,
    v: &CylinderSet,
) -> Result<MixingLag> {
    let (lambda, ell) = (&u.lambda, &u.offset);
    let (nu, n) = (&v.lambda, &v.offset);
    let q = &(&(threshold + nu.degree()) + n) - ell;
    let zero = DegreeVector::zero(kg.k());
    let mut verified = true;
    let mut connectors = Vec::new();
    for extra in DegreeVector::box_iter(&zero, &DegreeVector::splat(kg.k(), 2)) {
        let link_degree = threshold + &extra;
        let link = kg
            .enumerate_with_range(&link_degree, nu.source())?
            .into_iter()
            .find(|l| l.source() == lambda.range());
        let Some(link) = link else {
            verified = false;
            connectors.push(Vec::new());
            continue;
        };
        // νλ′λ placed at offset n − q: ν sits at n − q and λ must land at ℓ.
        let path = kg.compose(&kg.compose(nu, &link)?, lambda)?;
        let at_nu = kg.block(&path, &zero, nu.degree())?;
        let start = nu.degree() + &link_degree;
        let at_lambda = kg.block(&path, &start, path.degree())?;
        let lands = &(&(n - &(&q + &extra)) + &start) == ell;
        verified &= at_nu == *nu && at_lambda == *lambda && lands;
        connectors.push(kg.word_ids(&link));
    }
    Ok(MixingLag {
        q,
        threshold: threshold.clone(),
        verified,
        connectors,
    })
}

/// Distribution of randomly drawn window bodies.
#[derive(Clone, Copy, Debug)]
pub enum Sampling<'a> {
    /// Uniform over `Λ^{2Ne}`.
    Uniform,
    /// Proportional to the Parry measure of the body cylinder.
    Parry(&'a PerronData),
}

/// Draws `count` windows edge by edge along the normal-form color sequence.
pub fn sample_windows<R: Rng + ?Sized>(
    kg: &KGraph,
    radius: usize,
    count: usize,
    mode: Sampling<'_>,
    rng: &mut R,
) -> Result<Vec<Window>> {
    let k = kg.k();
    let d = DegreeVector::splat(k, 2 * radius as i64);
    let colors: Vec<usize> = normal_colors(&d).collect();
    // completions[i][v]: number of normal-form tails of colors[i..] from v
    let mut completions = Vec::with_capacity(colors.len() + 1);
    let mut rest = d.clone();
    for &c in &colors {
        completions.push(row_sums(kg, &rest));
        rest = &rest - &DegreeVector::unit(k, c);
    }
    completions.push(vec![1.0; kg.vertex_count()]);
    let weights_for = |i: usize, v: Vertex| -> Vec<f64> {
        let edges = kg.edges_with_range(colors[i], v);
        edges
            .iter()
            .map(|e| {
                let s = kg.skeleton().edge(*e).source;
                match mode {
                    Sampling::Uniform => completions[i + 1][s.0],
                    Sampling::Parry(pd) => pd.b(s),
                }
            })
            .collect()
    };
    let start: Vec<f64> = match mode {
        Sampling::Uniform => completions[0].clone(),
        Sampling::Parry(pd) => kg.vertices().map(|v| pd.a(v) * pd.b(v)).collect(),
    };
    let bad = |e: rand::distr::weighted::Error| KGraphError::InvalidParameter(format!("sampling weights: {e}"));
    let start_dist = WeightedIndex::new(&start).map_err(bad)?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut v = Vertex(start_dist.sample(rng));
        let mut word: Vec<Edge> = Vec::with_capacity(colors.len());
        for i in 0..colors.len() {
            let edges = kg.edges_with_range(colors[i], v);
            let pick = WeightedIndex::new(weights_for(i, v)).map_err(bad)?.sample(rng);
            word.push(edges[pick]);
            v = kg.skeleton().edge(edges[pick]).source;
        }
        out.push(make_window(kg, kg.morphism_from_word(&word)?, radius)?);
    }
    Ok(out)
}

fn row_sums(kg: &KGraph, d: &DegreeVector) -> Vec<f64> {
    use num_traits::ToPrimitive;
    let m = vertex_matrix(kg, d);
    (0..kg.vertex_count())
        .map(|u| m.row_sum(u).to_f64().unwrap_or(f64::INFINITY))
        .collect()
}
