//! The horospherical product `H_p ⋈ H_q`: pairs `(x_p, x_q)` with
//! `h_p(x_p) + h_q(x_q) = 0`, height `h(x) = h_p(x_p)`, and path length
//! `sum N(d_p, d_q)` for an admissible norm `N`.

use std::fmt;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::ledger::{ConstantsLedger, ThresholdId};
use crate::norms::AdmissibleNorm;
use crate::plane::golden_min;
use crate::scalar::{BigScalar, Rounding};
use crate::space::{relative_distance, Space};

/// Samples per bridge segment on continuous components.
pub const BRIDGE_SAMPLES: usize = 2001;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HoroPoint<P, Q> {
    pub p: P,
    pub q: Q,
}

impl<P, Q> HoroPoint<P, Q> {
    /// Unchecked constructor; see [`HoroSpace::make_point`].
    pub fn raw(p: P, q: Q) -> Self {
        HoroPoint { p, q }
    }
}

#[derive(Debug, Clone)]
pub struct HoroSpace<L: Space, R: Space> {
    left: L,
    right: R,
    norm: AdmissibleNorm,
    ledger: ConstantsLedger,
}

impl<L: Space, R: Space> HoroSpace<L, R> {
    /// Ledger `delta` is the larger component constant, `c_norm` the norm's.
    pub fn new(left: L, right: R, norm: AdmissibleNorm) -> Result<Self> {
        let delta = left.delta().clone().max(right.delta().clone());
        let ledger = ConstantsLedger::new(delta, norm.c_n().clone())?;
        Ok(HoroSpace {
            left,
            right,
            norm,
            ledger,
        })
    }

    /// Uses an explicit ledger `delta`, which must dominate both components.
    pub fn with_delta(left: L, right: R, norm: AdmissibleNorm, delta: BigScalar) -> Result<Self> {
        if &delta < left.delta() || &delta < right.delta() {
            return Err(GeomError::InvalidConstant {
                name: "delta",
                value: delta.to_string(),
            });
        }
        let ledger = ConstantsLedger::new(delta, norm.c_n().clone())?;
        Ok(HoroSpace {
            left,
            right,
            norm,
            ledger,
        })
    }

    pub fn left(&self) -> &L {
        &self.left
    }

    pub fn right(&self) -> &R {
        &self.right
    }

    pub fn norm(&self) -> &AdmissibleNorm {
        &self.norm
    }

    pub fn ledger(&self) -> &ConstantsLedger {
        &self.ledger
    }

    pub fn tolerance(&self) -> f64 {
        self.left.tolerance().max(self.right.tolerance())
    }

    pub fn make_point(&self, p: L::Point, q: R::Point) -> Result<HoroPoint<L::Point, R::Point>> {
        let (left, right) = (self.left.height(&p), self.right.height(&q));
        let sum = left + right;
        if sum.abs() > self.tolerance() {
            return Err(GeomError::HeightSum { left, right, sum });
        }
        Ok(HoroPoint { p, q })
    }

    pub fn base_point(&self) -> HoroPoint<L::Point, R::Point> {
        HoroPoint {
            p: self.left.base_point(),
            q: self.right.base_point(),
        }
    }

    pub fn height(&self, x: &HoroPoint<L::Point, R::Point>) -> f64 {
        self.left.height(&x.p)
    }

    pub fn delta_h(&self, x: &HoroPoint<L::Point, R::Point>, y: &HoroPoint<L::Point, R::Point>) -> f64 {
        (self.height(x) - self.height(y)).abs()
    }

    pub fn dr_p(&self, x: &HoroPoint<L::Point, R::Point>, y: &HoroPoint<L::Point, R::Point>) -> f64 {
        relative_distance(&self.left, &x.p, &y.p)
    }

    pub fn dr_q(&self, x: &HoroPoint<L::Point, R::Point>, y: &HoroPoint<L::Point, R::Point>) -> f64 {
        relative_distance(&self.right, &x.q, &y.q)
    }

    /// `Δh + d_r(x_p, y_p) + d_r(x_q, y_q)`.
    pub fn coarse_distance(&self, x: &HoroPoint<L::Point, R::Point>, y: &HoroPoint<L::Point, R::Point>) -> f64 {
        self.delta_h(x, y) + self.dr_p(x, y) + self.dr_q(x, y)
    }

    /// Component distances `(d_p, d_q)`.
    pub fn component_distances(
        &self,
        x: &HoroPoint<L::Point, R::Point>,
        y: &HoroPoint<L::Point, R::Point>,
    ) -> (f64, f64) {
        (self.left.distance(&x.p, &y.p), self.right.distance(&x.q, &y.q))
    }

    pub fn step_length(&self, x: &HoroPoint<L::Point, R::Point>, y: &HoroPoint<L::Point, R::Point>) -> f64 {
        let (a, b) = self.component_distances(x, y);
        self.norm.raw(a, b)
    }

    pub fn path_length(&self, path: &[HoroPoint<L::Point, R::Point>]) -> f64 {
        path.windows(2).map(|w| self.step_length(&w[0], &w[1])).sum()
    }

    /// Component path lengths `(l_p, l_q)`.
    pub fn component_lengths(&self, path: &[HoroPoint<L::Point, R::Point>]) -> (f64, f64) {
        path.windows(2).fold((0.0, 0.0), |(lp, lq), w| {
            let (a, b) = self.component_distances(&w[0], &w[1]);
            (lp + a, lq + b)
        })
    }

    /// `V(t) = (V_p(t), V_q(-t))`.
    pub fn vertical_at(
        &self,
        v: &ProductVertical<L::Point, R::Point>,
        t: f64,
    ) -> Result<HoroPoint<L::Point, R::Point>> {
        Ok(HoroPoint {
            p: self.left.vertical_at(&v.p_anchor, t).map_err(discrete_height)?,
            q: self.right.vertical_at(&v.q_anchor, -t).map_err(discrete_height)?,
        })
    }

    pub fn vertical_through(&self, x: &HoroPoint<L::Point, R::Point>) -> ProductVertical<L::Point, R::Point> {
        ProductVertical {
            p_anchor: x.p.clone(),
            q_anchor: x.q.clone(),
        }
    }

    /// Heights at which both components can be sampled between `lo` and
    /// `hi`: the coarser of the two component grids.
    pub fn height_grid(&self, lo: f64, hi: f64) -> Vec<f64> {
        let gl = self.left.height_grid(lo, hi);
        let mut gr: Vec<f64> = self.right.height_grid(-hi, -lo).into_iter().map(|t| -t).collect();
        gr.reverse();
        if gr.len() < gl.len() {
            gr
        } else {
            gl
        }
    }

    /// `inf_t N(d_p(w_p, V_p(t)), d_q(w_q, V_q(-t)))`, scanning the heights
    /// that can attain the infimum.
    pub fn distance_to_vertical(
        &self,
        anchor: &ProductVertical<L::Point, R::Point>,
        w: &HoroPoint<L::Point, R::Point>,
    ) -> f64 {
        let h = self.height(w);
        let eval = |t: f64| -> Option<f64> {
            let v = self.vertical_at(anchor, t).ok()?;
            Some(self.step_length(&v, w))
        };
        let Some(at_h) = eval(h) else {
            return f64::INFINITY;
        };
        // N(a, b) >= (a + b) / 2 >= |t - h(w)|, so farther heights cannot win.
        let (lo, hi) = (h - at_h, h + at_h);
        if self.left.discrete() || self.right.discrete() {
            return self
                .height_grid(lo, hi)
                .into_iter()
                .filter_map(eval)
                .fold(at_h, f64::min);
        }
        // Distance to a geodesic is convex along it, and so is its image under
        // a monotone convex norm.
        let (_, best) = golden_min(lo, hi, |t| eval(t).unwrap_or(f64::INFINITY));
        best.min(at_h)
    }

    /// Points of the vertical through `anchor` for the heights from `from` to
    /// `to`, both included.
    fn vertical_run(
        &self,
        anchor_p: &L::Point,
        anchor_q: &R::Point,
        from: f64,
        to: f64,
    ) -> Result<Vec<HoroPoint<L::Point, R::Point>>> {
        let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
        let mut grid = self.height_grid(lo, hi);
        if grid.is_empty() || grid[0] != lo {
            grid.insert(0, lo);
        }
        if *grid.last().expect("nonempty") != hi {
            grid.push(hi);
        }
        if from > to {
            grid.reverse();
        }
        grid.into_iter()
            .map(|t| {
                Ok(HoroPoint {
                    p: self.left.vertical_at(anchor_p, t).map_err(discrete_height)?,
                    q: self.right.vertical_at(anchor_q, -t).map_err(discrete_height)?,
                })
            })
            .collect()
    }

    /// Moves the q part along its geodesic from `start.q` to `target_q` while
    /// the p part follows its vertical to keep heights opposite.
    fn bridge_q(
        &self,
        start: &HoroPoint<L::Point, R::Point>,
        target_q: &R::Point,
    ) -> Result<Vec<HoroPoint<L::Point, R::Point>>> {
        if &start.q == target_q {
            return Ok(vec![start.clone()]);
        }
        self.right
            .geodesic(&start.q, target_q, BRIDGE_SAMPLES)
            .into_iter()
            .map(|q| {
                let p = self
                    .left
                    .vertical_at(&start.p, -self.right.height(&q))
                    .map_err(discrete_height)?;
                Ok(HoroPoint { p, q })
            })
            .collect()
    }

    fn bridge_p(
        &self,
        start: &HoroPoint<L::Point, R::Point>,
        target_p: &L::Point,
    ) -> Result<Vec<HoroPoint<L::Point, R::Point>>> {
        if &start.p == target_p {
            return Ok(vec![start.clone()]);
        }
        self.left
            .geodesic(&start.p, target_p, BRIDGE_SAMPLES)
            .into_iter()
            .map(|p| {
                let q = self
                    .right
                    .vertical_at(&start.q, -self.left.height(&p))
                    .map_err(discrete_height)?;
                Ok(HoroPoint { p, q })
            })
            .collect()
    }

    /// Five-piece path from `x` to `y`: down the vertical of `x` until the q
    /// parts can merge, across, up until the p parts can merge, across, and
    /// down to `y`. On trees both crossings are empty and the length equals
    /// the coarse distance.
    pub fn build_path(
        &self,
        x: &HoroPoint<L::Point, R::Point>,
        y: &HoroPoint<L::Point, R::Point>,
    ) -> Result<PathPlan<L::Point, R::Point>> {
        let reversed = self.height(x) > self.height(y);
        let (x, y) = if reversed { (y, x) } else { (x, y) };
        let (hx, hy) = (self.height(x), self.height(y));
        let (drp, drq) = (self.dr_p(x, y), self.dr_q(x, y));
        let low = hx - drq / 2.0;
        let high = hy + drp / 2.0;

        let descend = self.vertical_run(&x.p, &x.q, hx, low)?;
        let a1 = descend.last().expect("nonempty run").clone();
        let target_q = self.right.vertical_at(&y.q, -low).map_err(discrete_height)?;
        let bridge_low = self.bridge_q(&a1, &target_q)?;
        let a2 = bridge_low.last().expect("nonempty bridge").clone();
        let ascend = self.vertical_run(&x.p, &y.q, low, high)?;
        let a3 = ascend.last().expect("nonempty run").clone();
        let target_p = self.left.vertical_at(&y.p, high).map_err(discrete_height)?;
        let bridge_high = self.bridge_p(&a3, &target_p)?;
        let a4 = bridge_high.last().expect("nonempty bridge").clone();
        let finish = self.vertical_run(&y.p, &y.q, high, hy)?;

        let segments: Vec<PathSegment<L::Point, R::Point>> = [
            (SegmentRole::Descend, descend),
            (SegmentRole::BridgeLow, bridge_low),
            (SegmentRole::Ascend, ascend),
            (SegmentRole::BridgeHigh, bridge_high),
            (SegmentRole::DescendToTarget, finish),
        ]
        .into_iter()
        .map(|(role, points)| PathSegment {
            role,
            length: self.path_length(&points),
            points,
        })
        .collect();
        let total_length = segments.iter().map(|s| s.length).sum();
        Ok(PathPlan {
            segments,
            corners: [a1, a2, a3, a4],
            total_length,
            coarse: hy - hx + drp + drq,
            reversed,
        })
    }

    /// Exact comparison `l_N(plan) <= coarse + 1152 delta C_N`.
    pub fn certify_plan(&self, plan: &PathPlan<L::Point, R::Point>) -> Result<PlanCertificate> {
        let slack = 1e-9 * (1.0 + plan.total_length);
        let lhs = BigScalar::bracket(plan.total_length, slack, Rounding::Up)
            .ok_or_else(|| GeomError::Precondition("non-finite path length".into()))?;
        let coarse = BigScalar::bracket(plan.coarse, 1e-9 * (1.0 + plan.coarse), Rounding::Down)
            .ok_or_else(|| GeomError::Precondition("non-finite coarse distance".into()))?;
        let rhs = &coarse + &self.ledger.threshold(ThresholdId::DeltaX1152Cn);
        Ok(PlanCertificate {
            length: plan.total_length,
            coarse: plan.coarse,
            holds: lhs <= rhs,
            rhs_log2: rhs.log2_approx(),
        })
    }

    pub fn format_point(&self, x: &HoroPoint<L::Point, R::Point>) -> String {
        format!("{}|{}", self.left.format_point(&x.p), self.right.format_point(&x.q))
    }
}

fn discrete_height(e: GeomError) -> GeomError {
    match e {
        GeomError::NonIntegralHeight(t) => GeomError::Unsupported(format!(
            "height {t} is needed on a discrete tree component; continuous crossings need continuous components"
        )),
        other => other,
    }
}

/// Height-parametrized product vertical `V(t) = (V_p(t), V_q(-t))`, where
/// `V_p` and `V_q` are the component verticals through the two anchors. The
/// anchors need not form a point of the product.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVertical<P, Q> {
    pub p_anchor: P,
    pub q_anchor: Q,
}

impl<P: Clone, Q: Clone> ProductVertical<P, Q> {
    pub fn new(p_anchor: P, q_anchor: Q) -> Self {
        ProductVertical { p_anchor, q_anchor }
    }

    pub fn at<L: Space<Point = P>, R: Space<Point = Q>>(
        &self,
        space: &HoroSpace<L, R>,
        t: f64,
    ) -> Result<HoroPoint<P, Q>> {
        space.vertical_at(self, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentRole {
    Descend,
    BridgeLow,
    Ascend,
    BridgeHigh,
    DescendToTarget,
}

impl fmt::Display for SegmentRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SegmentRole::Descend => "descend",
            SegmentRole::BridgeLow => "bridge_low",
            SegmentRole::Ascend => "ascend",
            SegmentRole::BridgeHigh => "bridge_high",
            SegmentRole::DescendToTarget => "descend_to_target",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSegment<P, Q> {
    pub role: SegmentRole,
    pub points: Vec<HoroPoint<P, Q>>,
    pub length: f64,
}

/// Output of [`HoroSpace::build_path`], oriented from the lower endpoint to
/// the higher one; `reversed` records whether that swapped the input.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPlan<P, Q> {
    pub segments: Vec<PathSegment<P, Q>>,
    pub corners: [HoroPoint<P, Q>; 4],
    pub total_length: f64,
    pub coarse: f64,
    pub reversed: bool,
}

impl<P: Clone + PartialEq, Q: Clone + PartialEq> PathPlan<P, Q> {
    /// The concatenated point sequence from the original `x` to `y`.
    pub fn points(&self) -> Vec<HoroPoint<P, Q>> {
        let mut out: Vec<HoroPoint<P, Q>> = Vec::new();
        for seg in &self.segments {
            for pt in &seg.points {
                if out.last() != Some(pt) {
                    out.push(pt.clone());
                }
            }
        }
        if self.reversed {
            out.reverse();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanCertificate {
    pub length: f64,
    pub coarse: f64,
    pub holds: bool,
    pub rhs_log2: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::{PlanePoint, PlaneSpace};
    use crate::tree::{TreeSpace, TreeVertex};

    fn dl(p: u32, q: u32) -> HoroSpace<TreeSpace, TreeSpace> {
        HoroSpace::new(
            TreeSpace::new(p).unwrap(),
            TreeSpace::new(q).unwrap(),
            AdmissibleNorm::l1(),
        )
        .unwrap()
    }

    fn tv(h: i64, digits: &[(i64, u32)]) -> TreeVertex {
        TreeVertex::new(h, digits.iter().copied()).unwrap()
    }

    #[test]
    fn height_sum_is_enforced() {
        let s = dl(2, 2);
        assert!(s.make_point(tv(0, &[]), tv(0, &[])).is_ok());
        match s.make_point(tv(1, &[]), tv(0, &[])) {
            Err(GeomError::HeightSum { sum, .. }) => assert_eq!(sum, 1.0),
            other => panic!("{other:?}"),
        }
        let treebolic = HoroSpace::new(PlaneSpace::new(), TreeSpace::new(2).unwrap(), AdmissibleNorm::l1()).unwrap();
        assert!(treebolic
            .make_point(PlanePoint::new(0.0, 2.0).unwrap(), tv(-2, &[(-2, 1)]))
            .is_ok());
    }

    #[test]
    fn coarse_examples() {
        let s = dl(2, 2);
        let o = s.base_point();
        let y = s.make_point(tv(0, &[(0, 1)]), tv(0, &[])).unwrap();
        assert_eq!(s.coarse_distance(&o, &y), 2.0);
        let z = s.make_point(tv(2, &[]), tv(-2, &[(-2, 1)])).unwrap();
        assert_eq!(s.coarse_distance(&o, &z), 2.0);
        assert_eq!(s.coarse_distance(&o, &o), 0.0);
    }

    #[test]
    fn tree_plan_is_exact() {
        let s = dl(2, 3);
        let x = s.make_point(tv(-1, &[(-1, 1), (1, 1)]), tv(1, &[(2, 2)])).unwrap();
        let y = s.make_point(tv(1, &[(3, 1)]), tv(-1, &[(-1, 1), (0, 2)])).unwrap();
        for (a, b) in [(&x, &y), (&y, &x)] {
            let plan = s.build_path(a, b).unwrap();
            assert_eq!(plan.total_length, s.coarse_distance(a, b));
            assert_eq!(plan.corners[0], plan.corners[1]);
            assert_eq!(plan.corners[2], plan.corners[3]);
            let pts = plan.points();
            assert_eq!(&pts[0], a);
            assert_eq!(pts.last().unwrap(), b);
            assert_eq!(pts.len() as f64 - 1.0, plan.total_length);
            for w in pts.windows(2) {
                assert_eq!(s.component_distances(&w[0], &w[1]), (1.0, 1.0));
            }
            assert!(s.certify_plan(&plan).unwrap().holds);
        }
    }

    #[test]
    fn trivial_plan() {
        let s = dl(2, 2);
        let o = s.base_point();
        let plan = s.build_path(&o, &o).unwrap();
        assert_eq!(plan.total_length, 0.0);
        assert_eq!(plan.points(), vec![o]);
    }

    #[test]
    fn product_vertical() {
        let s = dl(2, 2);
        let v = s.vertical_through(&s.base_point());
        assert_eq!(v.at(&s, 3.0).unwrap(), HoroPoint::raw(tv(3, &[]), tv(-3, &[])));
        let path: Vec<_> = (0..=5).map(|t| v.at(&s, t as f64).unwrap()).collect();
        assert_eq!(s.path_length(&path), 5.0);
        assert_eq!(v.at(&s, 0.0).unwrap(), s.base_point());
    }

    #[test]
    fn plane_plan_is_certified() {
        let s = HoroSpace::new(PlaneSpace::new(), PlaneSpace::new(), AdmissibleNorm::lr(2.0).unwrap()).unwrap();
        let x = s
            .make_point(PlanePoint::new(0.0, 0.0).unwrap(), PlanePoint::new(0.0, 0.0).unwrap())
            .unwrap();
        let y = s
            .make_point(PlanePoint::new(4.0, 0.0).unwrap(), PlanePoint::new(4.0, 0.0).unwrap())
            .unwrap();
        let plan = s.build_path(&x, &y).unwrap();
        let pts = plan.points();
        for w in pts.windows(2) {
            assert!(s.component_distances(&w[0], &w[1]).0 < 0.01);
        }
        for pt in &pts {
            assert!((s.left().height(&pt.p) + s.right().height(&pt.q)).abs() < 1e-9);
        }
        assert!(s.certify_plan(&plan).unwrap().holds);
    }

    #[test]
    fn distance_to_vertical_in_dl() {
        let s = dl(2, 2);
        let o = s.base_point();
        let y = s.make_point(tv(0, &[(0, 1)]), tv(0, &[])).unwrap();
        let v = s.vertical_through(&o);
        assert_eq!(s.distance_to_vertical(&v, &o), 0.0);
        assert_eq!(s.distance_to_vertical(&v, &y), 1.0);
        let lifted = ProductVertical::new(tv(-2, &[(-2, 1)]), tv(-3, &[(-1, 1)]));
        assert_eq!(s.distance_to_vertical(&lifted, &lifted.at(&s, 1.0).unwrap()), 0.0);
        assert_eq!(lifted.at(&s, -2.0).unwrap().q, tv(2, &[]));
    }
}
