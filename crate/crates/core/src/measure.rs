//! The Parry measure on two-sided paths and the functionals derived from it.
//!
//! Every evaluator returns a [`MeasureValue`] whose [`FormulaTrace`] lists the
//! factors used, so the value can be recomputed from the trace alone.

use serde::{Deserialize, Serialize};

use crate::degree::DegreeVector;
use crate::error::{KGraphError, Result};
use crate::kgraph::{KGraph, Morphism};
use crate::skeleton::Vertex;
use crate::spectral::PerronData;

/// `Z(λ, n) = {x : x(n, n + d(λ)) = λ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CylinderSet {
    pub lambda: Morphism,
    pub offset: DegreeVector,
}

impl CylinderSet {
    pub fn new(lambda: Morphism, offset: DegreeVector) -> Self {
        CylinderSet { lambda, offset }
    }

    /// `Z(λ, 0)`.
    pub fn at_origin(lambda: Morphism) -> Self {
        let k = lambda.degree().k();
        CylinderSet::new(lambda, DegreeVector::zero(k))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Stable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexFactor {
    pub vertex: String,
    pub value: f64,
}

/// `value = Π_e t^e · a · b`, absent factors counting as 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormulaTrace {
    pub t_exponents: Vec<DegreeVector>,
    pub a_factor: Option<VertexFactor>,
    pub b_factor: Option<VertexFactor>,
}

impl FormulaTrace {
    pub fn reconstruct(&self, pd: &PerronData) -> f64 {
        let t: f64 = self.t_exponents.iter().map(|e| pd.t_pow(e)).product();
        let a = self.a_factor.as_ref().map_or(1.0, |f| f.value);
        let b = self.b_factor.as_ref().map_or(1.0, |f| f.value);
        t * a * b
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub trace: FormulaTrace,
}

fn check_graph(kg: &KGraph, pd: &PerronData) -> Result<()> {
    if pd.graph != kg.fingerprint() {
        return Err(KGraphError::GraphMismatch(format!(
            "Perron data for {} used with graph {}",
            pd.graph,
            kg.fingerprint()
        )));
    }
    Ok(())
}

fn check_morphism(kg: &KGraph, m: &Morphism) -> Result<()> {
    if m.degree().k() != kg.k() || m.range().0 >= kg.vertex_count() || m.source().0 >= kg.vertex_count() {
        return Err(KGraphError::GraphMismatch(format!(
            "{m:?} is not a morphism of this graph"
        )));
    }
    Ok(())
}

fn a_factor(kg: &KGraph, pd: &PerronData, v: Vertex) -> Option<VertexFactor> {
    Some(VertexFactor {
        vertex: kg.skeleton().vertex_id(v).to_owned(),
        value: pd.a(v),
    })
}

fn b_factor(kg: &KGraph, pd: &PerronData, v: Vertex) -> Option<VertexFactor> {
    Some(VertexFactor {
        vertex: kg.skeleton().vertex_id(v).to_owned(),
        value: pd.b(v),
    })
}

fn finish(pd: &PerronData, trace: FormulaTrace) -> MeasureValue {
    MeasureValue {
        value: trace.reconstruct(pd),
        trace,
    }
}

/// `μ(Z(λ, n)) = t^{−d(λ)} a(r(λ)) b(s(λ))`, independent of `n`.
pub fn parry_measure(kg: &KGraph, pd: &PerronData, c: &CylinderSet) -> Result<MeasureValue> {
    check_graph(kg, pd)?;
    check_morphism(kg, &c.lambda)?;
    if c.offset.k() != kg.k() {
        return Err(KGraphError::DegreeMismatch(format!(
            "offset {} has the wrong rank",
            c.offset
        )));
    }
    let lam = &c.lambda;
    Ok(finish(
        pd,
        FormulaTrace {
            t_exponents: vec![-lam.degree()],
            a_factor: a_factor(kg, pd, lam.range()),
            b_factor: b_factor(kg, pd, lam.source()),
        },
    ))
}

/// Mass of the stable fiber cylinder `Z⁻(λ, x)` (`s(λ) = x(0)`), which is
/// `t^{−d(λ)} a(r(λ))`, or of the unstable fiber cylinder `Z⁺(λ, x)`
/// (`r(λ) = x(0)`), which is `t^{−d(λ)} b(s(λ))`.
pub fn conditional_measure(kg: &KGraph, pd: &PerronData, side: Side, lambda: &Morphism) -> Result<MeasureValue> {
    check_graph(kg, pd)?;
    check_morphism(kg, lambda)?;
    let (a, b) = match side {
        Side::Stable => (a_factor(kg, pd, lambda.range()), None),
        Side::Unstable => (None, b_factor(kg, pd, lambda.source())),
    };
    Ok(finish(
        pd,
        FormulaTrace {
            t_exponents: vec![-lambda.degree()],
            a_factor: a,
            b_factor: b,
        },
    ))
}

/// `ν_{s,p}(Z(ν)) = t^{−p} t^{−d(ν)} b(s(ν))`.
///
/// Paired with the fiber measures `μ_{s,p}`, which give the cylinder
/// `{y : y(p − d(λ), p) = λ}` mass `t^p t^{−d(λ)} a(r(λ))`, this satisfies
/// `∫ h dμ = ∫ μ_{s,p}(h) dν_{s,p}` on cylinder indicators.
pub fn base_measure(kg: &KGraph, pd: &PerronData, p: &DegreeVector, nu: &Morphism) -> Result<MeasureValue> {
    check_graph(kg, pd)?;
    check_morphism(kg, nu)?;
    check_nonneg(kg, p)?;
    Ok(finish(
        pd,
        FormulaTrace {
            t_exponents: vec![-p, -nu.degree()],
            a_factor: None,
            b_factor: b_factor(kg, pd, nu.source()),
        },
    ))
}

/// Fiber mass `t^p t^{−d(λ)} a(r(λ))` of `μ_{s,p}`; see [`base_measure`].
pub fn fiber_measure(kg: &KGraph, pd: &PerronData, p: &DegreeVector, lambda: &Morphism) -> Result<MeasureValue> {
    check_graph(kg, pd)?;
    check_morphism(kg, lambda)?;
    check_nonneg(kg, p)?;
    Ok(finish(
        pd,
        FormulaTrace {
            t_exponents: vec![p.clone(), -lambda.degree()],
            a_factor: a_factor(kg, pd, lambda.range()),
            b_factor: None,
        },
    ))
}

/// `t^p · μ_s^{σ^p x}(σ^p Z⁻(λ, x))`. The shifted set is a stable cylinder of
/// degree `d(λ) + p` with range `r(λ)`.
pub fn haar_weight(kg: &KGraph, pd: &PerronData, p: &DegreeVector, lambda: &Morphism) -> Result<MeasureValue> {
    check_graph(kg, pd)?;
    check_morphism(kg, lambda)?;
    check_nonneg(kg, p)?;
    Ok(finish(
        pd,
        FormulaTrace {
            t_exponents: vec![p.clone(), -(lambda.degree() + p)],
            a_factor: a_factor(kg, pd, lambda.range()),
            b_factor: None,
        },
    ))
}

/// [`haar_weight`] evaluated on an explicit shifted cylinder: `tail` is
/// `x(0, p)`, so `σ^p Z⁻(λ, x) = Z⁻(λ·tail, σ^p x)`.
pub fn haar_weight_along(kg: &KGraph, pd: &PerronData, lambda: &Morphism, tail: &Morphism) -> Result<MeasureValue> {
    let extended = kg.compose(lambda, tail)?;
    let shifted = conditional_measure(kg, pd, Side::Stable, &extended)?;
    let mut trace = shifted.trace;
    trace.t_exponents.insert(0, tail.degree().clone());
    Ok(finish(pd, trace))
}

fn check_nonneg(kg: &KGraph, p: &DegreeVector) -> Result<()> {
    if p.k() != kg.k() || !p.is_nonneg() {
        return Err(KGraphError::DegreeMismatch(format!("{p} is not in N^{}", kg.k())));
    }
    Ok(())
}

/// A locally constant function on the unit space, `Σ cᵢ · 1_{Z(λᵢ, nᵢ)}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagonalFunction {
    pub terms: Vec<(f64, CylinderSet)>,
}

impl DiagonalFunction {
    pub fn zero() -> Self {
        DiagonalFunction::default()
    }

    pub fn indicator(c: CylinderSet) -> Self {
        DiagonalFunction { terms: vec![(1.0, c)] }
    }

    pub fn plus(mut self, coeff: f64, c: CylinderSet) -> Self {
        self.terms.push((coeff, c));
        self
    }

    /// `β_sⁿ f`: each cylinder moved to offset `offset − n`, coefficients
    /// scaled by `tⁿ`.
    pub fn beta_s(&self, pd: &PerronData, n: &DegreeVector) -> DiagonalFunction {
        let scale = pd.t_pow(n);
        DiagonalFunction {
            terms: self
                .terms
                .iter()
                .map(|(c, cyl)| (c * scale, CylinderSet::new(cyl.lambda.clone(), &cyl.offset - n)))
                .collect(),
        }
    }
}

/// `τ_s(f) = ∫ f dμ`.
pub fn trace_eval(kg: &KGraph, pd: &PerronData, f: &DiagonalFunction) -> Result<f64> {
    let mut total = 0.0;
    for (c, cyl) in &f.terms {
        total += c * parry_measure(kg, pd, cyl)?.value;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::spectral::{perron_data, DEFAULT_TOL};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn g1_cylinder() {
        let g1 = catalog::g1();
        let pd = perron_data(&g1, DEFAULT_TOL).unwrap();
        let lam = g1.morphism_from_ids(&["alpha", "beta", "alpha"]).unwrap();
        for n in [-3, 0, 5] {
            let c = CylinderSet::new(lam.clone(), DegreeVector::from([n]));
            let m = parry_measure(&g1, &pd, &c).unwrap();
            assert!(close(m.value, 0.125, 1e-12));
            assert_eq!(m.trace.reconstruct(&pd), m.value);
        }
    }

    #[test]
    fn g2_loop_cylinder() {
        let g2 = catalog::g2();
        let pd = perron_data(&g2, DEFAULT_TOL).unwrap();
        let lam = g2.morphism_from_ids(&["uu"]).unwrap();
        let m = parry_measure(&g2, &pd, &CylinderSet::at_origin(lam)).unwrap();
        assert!(close(m.value, 0.4472136, 1e-7), "{}", m.value);
        assert!(close(m.value, 1.0 / 5f64.sqrt(), 1e-12));
    }

    #[test]
    fn identities_sum_to_one() {
        for kg in [catalog::g1(), catalog::g2(), catalog::g3(), catalog::g4()] {
            let pd = perron_data(&kg, DEFAULT_TOL).unwrap();
            let total: f64 = kg
                .vertices()
                .map(|v| {
                    parry_measure(&kg, &pd, &CylinderSet::at_origin(kg.identity(v)))
                        .unwrap()
                        .value
                })
                .sum();
            assert!(close(total, 1.0, 1e-12));
        }
    }

    #[test]
    fn g1_conditionals() {
        let g1 = catalog::g1();
        let pd = perron_data(&g1, DEFAULT_TOL).unwrap();
        let alpha = g1.morphism_from_ids(&["alpha"]).unwrap();
        assert!(close(
            conditional_measure(&g1, &pd, Side::Stable, &alpha).unwrap().value,
            0.5,
            1e-12
        ));
        for m in 0..=3 {
            let mass: f64 = g1
                .enumerate_with_source(&DegreeVector::from([m]), Vertex(0))
                .unwrap()
                .iter()
                .map(|l| conditional_measure(&g1, &pd, Side::Stable, l).unwrap().value)
                .sum();
            assert!(close(mass, 1.0, 1e-12));
        }
    }

    #[test]
    fn fiber_masses_are_a_and_b() {
        let g2 = catalog::g2();
        let pd = perron_data(&g2, DEFAULT_TOL).unwrap();
        for v in g2.vertices() {
            for m in 0..=3 {
                let d = DegreeVector::from([m]);
                let s: f64 = g2
                    .enumerate_with_source(&d, v)
                    .unwrap()
                    .iter()
                    .map(|l| conditional_measure(&g2, &pd, Side::Stable, l).unwrap().value)
                    .sum();
                let u: f64 = g2
                    .enumerate_with_range(&d, v)
                    .unwrap()
                    .iter()
                    .map(|l| conditional_measure(&g2, &pd, Side::Unstable, l).unwrap().value)
                    .sum();
                assert!(close(s, pd.a(v), 1e-12) && close(u, pd.b(v), 1e-12));
            }
        }
    }

    #[test]
    fn base_measure_values() {
        let g1 = catalog::g1();
        let pd = perron_data(&g1, DEFAULT_TOL).unwrap();
        let zero = DegreeVector::from([0]);
        let alpha = g1.morphism_from_ids(&["alpha"]).unwrap();
        assert!(close(base_measure(&g1, &pd, &zero, &alpha).unwrap().value, 0.5, 1e-12));
        assert!(close(
            base_measure(&g1, &pd, &zero, &g1.identity(Vertex(0))).unwrap().value,
            1.0,
            1e-12
        ));

        let g2 = catalog::g2();
        let pd2 = perron_data(&g2, DEFAULT_TOL).unwrap();
        let uu = g2.morphism_from_ids(&["uu"]).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let expected = pd2.b(Vertex(0)) / phi;
        assert!(close(
            base_measure(&g2, &pd2, &zero, &uu).unwrap().value,
            expected,
            1e-12
        ));
    }

    #[test]
    fn disintegration_oracle_on_g2() {
        // ∫ 1_{Z(λν, −d(λ))} dμ = ∫ μ_{s,p}(·) dν_{s,p}: the integrand is
        // μ_{s,p} of the fiber cylinder of λ, constant on Z(ν).
        let g2 = catalog::g2();
        let pd = perron_data(&g2, DEFAULT_TOL).unwrap();
        for p in 0..=2 {
            let p = DegreeVector::from([p]);
            for dl in 0..=2 {
                for dn in 0..=2 {
                    for lam in g2.enumerate_morphisms(&DegreeVector::from([dl])).unwrap() {
                        for nu in g2
                            .enumerate_with_range(&DegreeVector::from([dn]), lam.source())
                            .unwrap()
                        {
                            let whole = g2.compose(&lam, &nu).unwrap();
                            let mu = parry_measure(&g2, &pd, &CylinderSet::at_origin(whole)).unwrap().value;
                            let fib = fiber_measure(&g2, &pd, &p, &lam).unwrap().value;
                            let base = base_measure(&g2, &pd, &p, &nu).unwrap().value;
                            assert!(close(mu, fib * base, 1e-12));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn haar_weight_values() {
        let g1 = catalog::g1();
        let pd = perron_data(&g1, DEFAULT_TOL).unwrap();
        let alpha = g1.morphism_from_ids(&["alpha"]).unwrap();
        let one = DegreeVector::from([1]);
        let w = haar_weight(&g1, &pd, &one, &alpha).unwrap();
        assert!(close(w.value, 0.5, 1e-12));
        assert_eq!(w.trace.t_exponents, vec![one.clone(), DegreeVector::from([-2])]);
        let beta = g1.morphism_from_ids(&["beta"]).unwrap();
        assert!(close(
            haar_weight_along(&g1, &pd, &alpha, &beta).unwrap().value,
            0.5,
            1e-12
        ));
        let zero = DegreeVector::from([0]);
        assert_eq!(
            haar_weight(&g1, &pd, &zero, &alpha).unwrap().value,
            conditional_measure(&g1, &pd, Side::Stable, &alpha).unwrap().value
        );
    }

    #[test]
    fn trace_examples() {
        let g1 = catalog::g1();
        let pd = perron_data(&g1, DEFAULT_TOL).unwrap();
        let v = CylinderSet::at_origin(g1.identity(Vertex(0)));
        assert!(close(
            trace_eval(&g1, &pd, &DiagonalFunction::indicator(v.clone())).unwrap(),
            1.0,
            1e-12
        ));
        assert_eq!(trace_eval(&g1, &pd, &DiagonalFunction::zero()).unwrap(), 0.0);
        let f = DiagonalFunction::zero()
            .plus(1.0, CylinderSet::at_origin(g1.morphism_from_ids(&["alpha"]).unwrap()))
            .plus(-1.0, CylinderSet::at_origin(g1.morphism_from_ids(&["beta"]).unwrap()));
        assert!(close(trace_eval(&g1, &pd, &f).unwrap(), 0.0, 1e-12));
        let n = DegreeVector::from([2]);
        let g = DiagonalFunction::indicator(v).beta_s(&pd, &n);
        assert!(close(trace_eval(&g1, &pd, &g).unwrap(), 4.0, 1e-12));
    }

    #[test]
    fn mismatched_data_is_rejected() {
        let pd = perron_data(&catalog::g1(), DEFAULT_TOL).unwrap();
        let g3 = catalog::g3();
        let c = CylinderSet::at_origin(g3.identity(Vertex(0)));
        assert!(matches!(
            parry_measure(&g3, &pd, &c),
            Err(KGraphError::GraphMismatch(_))
        ));
    }
}
