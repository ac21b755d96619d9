//! Stable, unstable and asymptotic equivalence at window scale, the
//! restriction to one-sided paths, and composition in `G_s ⋊ ℤᵏ`.
//!
//! A window-scale `true` certifies agreement inside the box only.

use crate::degree::DegreeVector;
use crate::dynamics::{make_window, shift, Window};
use crate::error::{KGraphError, Result};
use crate::kgraph::{KGraph, Morphism};

/// Largest stable class [`stable_class`] will enumerate.
pub const STABLE_CLASS_CAP: u64 = 10_000;

fn same_radius(x: &Window, y: &Window) -> Result<()> {
    if x.radius() != y.radius() {
        return Err(KGraphError::RadiusMismatch(x.radius(), y.radius()));
    }
    Ok(())
}

fn in_box(x: &Window, m: &DegreeVector) -> Result<()> {
    if !x.contains(m) {
        return Err(KGraphError::OutOfBox {
            coord: m.to_string(),
            radius: x.radius(),
        });
    }
    Ok(())
}

/// `x(m, n) = y(m, n)` for all `m ≤ n ≤ Ne`.
pub fn stable_equiv(x: &Window, y: &Window, m: &DegreeVector) -> Result<bool> {
    same_radius(x, y)?;
    in_box(x, m)?;
    let top = DegreeVector::splat(x.k(), x.radius() as i64);
    x.agrees_on(y, m, &top)
}

/// `x(m, n) = y(m, n)` for all `−Ne ≤ m ≤ n ≤ n₀`.
pub fn unstable_equiv(x: &Window, y: &Window, n0: &DegreeVector) -> Result<bool> {
    same_radius(x, y)?;
    in_box(x, n0)?;
    let bottom = DegreeVector::splat(x.k(), -(x.radius() as i64));
    x.agrees_on(y, &bottom, n0)
}

/// `x^op`, with `x^op(m, n) = x(−n, −m)^op`, as a window of `op`.
pub fn opposite_window(op: &KGraph, x: &Window) -> Result<Window> {
    make_window(op, op.opposite_of(x.body()), x.radius())
}

/// [`unstable_equiv`] computed as `x^op ∼_s y^op` from `−n₀` in Λ^op.
pub fn unstable_equiv_via_opposite(op: &KGraph, x: &Window, y: &Window, n0: &DegreeVector) -> Result<bool> {
    same_radius(x, y)?;
    in_box(x, n0)?;
    stable_equiv(&opposite_window(op, x)?, &opposite_window(op, y)?, &-n0)
}

/// Agreement on both tails: `x(m, n) = y(m, n)` and `x(−n, −m) = y(−n, −m)`
/// for all `m ≤ n ≤ Ne`, with `m ≥ 0`.
pub fn asymptotic_equiv(x: &Window, y: &Window, m: &DegreeVector) -> Result<bool> {
    if !m.is_nonneg() {
        return Err(KGraphError::DegreeMismatch(format!(
            "asymptotic offset {m} must be nonnegative"
        )));
    }
    Ok(stable_equiv(x, y, m)? && unstable_equiv(x, y, &-m)?)
}

/// A one-sided path truncated to `[0, Ne]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OneSidedWindow {
    pub radius: usize,
    pub body: Morphism,
}

impl OneSidedWindow {
    /// `σ^p` for `0 ≤ p`, keeping the longest block that fits: `N − max pᵢ`.
    pub fn shift(&self, kg: &KGraph, p: &DegreeVector) -> Result<OneSidedWindow> {
        let reach = p.max_abs() as usize;
        if !p.is_nonneg() || reach >= self.radius {
            return Err(KGraphError::RadiusExhausted {
                shift: p.to_string(),
                radius: self.radius,
            });
        }
        let radius = self.radius - reach;
        let end = p + &DegreeVector::splat(p.k(), radius as i64);
        Ok(OneSidedWindow {
            radius,
            body: kg.block(&self.body, p, &end)?,
        })
    }
}

/// `π(x) = x(0, Ne)`.
pub fn restriction_map(kg: &KGraph, x: &Window) -> OneSidedWindow {
    OneSidedWindow {
        radius: x.radius(),
        body: x.future(kg),
    }
}

/// `((x, y), n) ∈ G_s ⋊ ℤᵏ` at window scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidElement {
    pub x: Window,
    pub y: Window,
    pub n: DegreeVector,
}

impl GroupoidElement {
    /// Requires equal radii and `x ∼_s y` from some point of the box, which at
    /// window scale means agreement at the corner `Ne`.
    pub fn new(x: Window, y: Window, n: DegreeVector) -> Result<Self> {
        same_radius(&x, &y)?;
        let corner = DegreeVector::splat(x.k(), x.radius() as i64);
        if !stable_equiv(&x, &y, &corner)? {
            return Err(KGraphError::NotComposableInGroupoid(
                "windows are not stably related anywhere in the box".into(),
            ));
        }
        Ok(GroupoidElement { x, y, n })
    }

    /// `((x, x), 0)`.
    pub fn unit(x: Window) -> Self {
        let k = x.k();
        GroupoidElement {
            y: x.clone(),
            x,
            n: DegreeVector::zero(k),
        }
    }

    pub fn radius(&self) -> usize {
        self.x.radius()
    }

    pub fn restrict(&self, kg: &KGraph, radius: usize) -> Result<Self> {
        Ok(GroupoidElement {
            x: self.x.restrict(kg, radius)?,
            y: self.y.restrict(kg, radius)?,
            n: self.n.clone(),
        })
    }

    /// Equality after restricting both elements to the smaller radius.
    pub fn agrees_with(&self, kg: &KGraph, other: &GroupoidElement) -> Result<bool> {
        let r = self.radius().min(other.radius());
        Ok(self.n == other.n && self.restrict(kg, r)? == other.restrict(kg, r)?)
    }
}

/// `((x, y), n) · ((σⁿy, σⁿz), m) = ((x, z), n + m)`.
///
/// The second factor is given as `((y′, w), m)`; it is composable when `y′`
/// agrees with `σⁿy` on their common box, and then `z = σ^{−n} w`. The result
/// lives at the largest radius where all of this is defined.
pub fn semidirect_compose(kg: &KGraph, g: &GroupoidElement, h: &GroupoidElement) -> Result<GroupoidElement> {
    let refuse = |why: String| KGraphError::NotComposableInGroupoid(why);
    let sy = shift(kg, &g.y, &g.n).map_err(|e| refuse(format!("σⁿy: {e}")))?;
    let r = sy.radius().min(h.x.radius());
    if sy.restrict(kg, r)? != h.x.restrict(kg, r)? {
        return Err(refuse(format!("y′ differs from σ^{} y", g.n)));
    }
    let z = shift(kg, &h.y, &-&g.n).map_err(|e| refuse(format!("σ^{{-n}}w: {e}")))?;
    let r = g.x.radius().min(z.radius());
    GroupoidElement::new(g.x.restrict(kg, r)?, z.restrict(kg, r)?, &g.n + &h.n)
}

/// All windows `y` of the same radius with `y(m, Ne) = x(m, Ne)`.
pub fn stable_class(kg: &KGraph, x: &Window, m: &DegreeVector) -> Result<Vec<Window>> {
    in_box(x, m)?;
    let half = DegreeVector::splat(x.k(), x.radius() as i64);
    let tail = x.block(kg, m, &half)?;
    let head_degree = m + &half;
    let heads = kg
        .clone()
        .with_cap(STABLE_CLASS_CAP)
        .enumerate_with_source(&head_degree, tail.range())?;
    heads
        .iter()
        .map(|alpha| make_window(kg, kg.compose(alpha, &tail)?, x.radius()))
        .collect()
}
