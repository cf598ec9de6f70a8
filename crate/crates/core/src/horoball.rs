//! Length lower bounds for paths that avoid horoballs in a single component,
//! their certification on measured paths, and the desk-scale exponential law.

use std::fmt;
use std::str::FromStr;

use serde_json::json;

use crate::error::{GeomError, Result};
use crate::plane::{CappedPath, PlanePoint, PlaneSpace};
use crate::scalar::{BigScalar, Rounding};
use crate::space::{height_extremes, polyline_length, relative_distance, Space};
use crate::tree::{TreeSpace, TreeVertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    Amande,
    BelowSameHeight,
    BelowAndReach,
    BackwardsControl,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [
        BoundKind::Amande,
        BoundKind::BelowSameHeight,
        BoundKind::BelowAndReach,
        BoundKind::BackwardsControl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Amande => "AMANDE",
            BoundKind::BelowSameHeight => "BELOW_SAME_HEIGHT",
            BoundKind::BelowAndReach => "BELOW_AND_REACH",
            BoundKind::BackwardsControl => "BACKWARDS_CONTROL",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                GeomError::Precondition(format!(
                    "unknown bound kind `{s}`; expected one of AMANDE, BELOW_SAME_HEIGHT, BELOW_AND_REACH, BACKWARDS_CONTROL"
                ))
            })
    }
}

fn nonnegative(name: &str, v: &BigScalar) -> Result<()> {
    if v.is_negative() {
        Err(GeomError::Hypothesis(vec![format!(
            "{name} must be >= 0, got {}",
            v.to_f64()
        )]))
    } else {
        Ok(())
    }
}

fn check_delta(delta: &BigScalar) -> Result<()> {
    if *delta < BigScalar::one() {
        return Err(GeomError::InvalidConstant {
            name: "delta",
            value: delta.to_string(),
        });
    }
    Ok(())
}

fn amande_rounded(
    delta: &BigScalar,
    dh_x_x0: &BigScalar,
    dh_y_y0: &BigScalar,
    d_x0_y0: &BigScalar,
    round: Rounding,
) -> Result<BigScalar> {
    check_delta(delta)?;
    nonnegative("dh(x, x0)", dh_x_x0)?;
    nonnegative("dh(y, y0)", dh_y_y0)?;
    let floor = delta * 768;
    if *d_x0_y0 <= floor {
        return Err(GeomError::Hypothesis(vec![format!(
            "d(x0, y0) = {} must exceed 768 delta = {}",
            d_x0_y0.to_f64(),
            floor.to_f64()
        )]));
    }
    let e = d_x0_y0.div(&(delta * 2)) - BigScalar::from_int(386);
    let expo = BigScalar::pow2_rational(&e, round);
    Ok(dh_x_x0 + dh_y_y0 + expo - delta * 24)
}

/// `dh(x,x0) + dh(y,y0) + 2^-386 2^(d/(2 delta)) - 24 delta`, never above the
/// exact value.
pub fn amande_bound(
    delta: &BigScalar,
    dh_x_x0: &BigScalar,
    dh_y_y0: &BigScalar,
    d_x0_y0: &BigScalar,
) -> Result<BigScalar> {
    amande_rounded(delta, dh_x_x0, dh_y_y0, d_x0_y0, Rounding::Down)
}

fn below_same_height_rounded(
    delta: &BigScalar,
    d_xy: &BigScalar,
    delta_h: &BigScalar,
    round: Rounding,
) -> Result<BigScalar> {
    check_delta(delta)?;
    nonnegative("d(x, y)", d_xy)?;
    let floor = delta * 555;
    if *delta_h <= floor {
        return Err(GeomError::Hypothesis(vec![format!(
            "Delta H = {} must exceed 555 delta = {}",
            delta_h.to_f64(),
            floor.to_f64()
        )]));
    }
    let e = delta_h.div(delta) - BigScalar::from_int(530);
    let expo = BigScalar::pow2_rational(&e, round);
    Ok(d_xy + &expo - delta_h * 2 - delta * 24)
}

/// `d(x,y) + 2^-530 2^(dH/delta) - 2 dH - 24 delta`.
pub fn below_same_height_bound(delta: &BigScalar, d_xy: &BigScalar, delta_h: &BigScalar) -> Result<BigScalar> {
    below_same_height_rounded(delta, d_xy, delta_h, Rounding::Down)
}

fn below_and_reach_rounded(
    delta: &BigScalar,
    dh_x_m: &BigScalar,
    d_xy: &BigScalar,
    delta_h: &BigScalar,
    round: Rounding,
) -> Result<BigScalar> {
    check_delta(delta)?;
    nonnegative("dh(x, m)", dh_x_m)?;
    nonnegative("d(x, y)", d_xy)?;
    let e = delta_h.div(delta) - BigScalar::from_int(850);
    let expo = BigScalar::pow2_rational(&e, round);
    let linear = (delta_h * 2).max(BigScalar::zero());
    Ok(dh_x_m * 2 + d_xy.clone() + expo - BigScalar::one() - linear - delta * 1700)
}

/// `2 dh(x,m) + d(x,y) + 2^-850 2^(dH/delta) - 1 - max(0, 2 dH) - 1700 delta`.
/// `dH` may be negative.
pub fn below_and_reach_bound(
    delta: &BigScalar,
    dh_x_m: &BigScalar,
    d_xy: &BigScalar,
    delta_h: &BigScalar,
) -> Result<BigScalar> {
    below_and_reach_rounded(delta, dh_x_m, d_xy, delta_h, Rounding::Down)
}

/// `|d_r(V1(t1 + D/2 - t), V2(t2 + D/2 - t)) - 2t|` where
/// `D = d_r(V1(t1), V2(t2))`, for `0 <= t <= D/2`.
pub fn backwards_control_residual<S: Space>(
    space: &S,
    v1: &S::Point,
    v2: &S::Point,
    t1: f64,
    t2: f64,
    t: f64,
) -> Result<f64> {
    let a = space.vertical_at(v1, t1)?;
    let b = space.vertical_at(v2, t2)?;
    let half = 0.5 * relative_distance(space, &a, &b);
    let tol = space.tolerance();
    if !(t >= -tol && t <= half + tol) {
        return Err(GeomError::Precondition(format!("t = {t} outside [0, {half}]")));
    }
    let a = space.vertical_at(v1, t1 + half - t)?;
    let b = space.vertical_at(v2, t2 + half - t)?;
    Ok((relative_distance(space, &a, &b) - 2.0 * t).abs())
}

/// Geometric data a certified path is measured against.
#[derive(Debug, Clone)]
pub enum CapContext<P> {
    /// Paths from `x` to `y` staying below the height `t0` of
    /// `x0 = V_x(t0)`, `y0 = V_y(t0)`.
    Amande { x: P, y: P, t0: f64 },
    /// Paths from `x` to `y` whose top is at least `delta_h` below
    /// `h(y) + d_r(x,y)/2`.
    BelowSameHeight { x: P, y: P, delta_h: f64 },
    /// Paths from `x` to `y` whose lowest point has the height of `m`; the
    /// lowest path point is used when `m` is `None`.
    BelowAndReach { x: P, y: P, m: Option<P> },
    /// Two verticals through `v1`, `v2`, starting times and the parameter.
    BackwardsControl { v1: P, v2: P, t1: f64, t2: f64, t: f64 },
}

impl<P> CapContext<P> {
    pub fn kind(&self) -> BoundKind {
        match self {
            CapContext::Amande { .. } => BoundKind::Amande,
            CapContext::BelowSameHeight { .. } => BoundKind::BelowSameHeight,
            CapContext::BelowAndReach { .. } => BoundKind::BelowAndReach,
            CapContext::BackwardsControl { .. } => BoundKind::BackwardsControl,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    pub kind: BoundKind,
    /// Measured side, rounded against the verdict.
    pub lhs: BigScalar,
    pub rhs: BigScalar,
    pub holds: bool,
    /// `log2(lhs - rhs)`, `-inf` when the bound fails or is tight.
    pub slack_log2: f64,
    pub hypothesis_report: Vec<String>,
}

impl BoundCertificate {
    fn new(kind: BoundKind, lhs: BigScalar, rhs: BigScalar, hypothesis_report: Vec<String>) -> Self {
        let holds = lhs >= rhs;
        let gap = &lhs - &rhs;
        let slack_log2 = if gap.is_negative() || gap.is_zero() {
            f64::NEG_INFINITY
        } else {
            gap.log2_approx()
        };
        BoundCertificate {
            kind,
            lhs,
            rhs,
            holds,
            slack_log2,
            hypothesis_report,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let finite = |v: f64| {
            if v.is_finite() {
                json!(v)
            } else {
                serde_json::Value::Null
            }
        };
        let rhs_log2 = if self.rhs.is_negative() || self.rhs.is_zero() {
            serde_json::Value::Null
        } else {
            finite(self.rhs.log2_approx())
        };
        json!({
            "kind": self.kind.name(),
            "lhs": self.lhs.to_f64(),
            "rhs": self.rhs.to_f64(),
            "rhs_log2": rhs_log2,
            "rhs_negative": self.rhs.is_negative(),
            "holds": self.holds,
            "slack_log2": finite(self.slack_log2),
            "hypothesis_report": self.hypothesis_report,
        })
    }
}

fn exact(v: f64, what: &str) -> Result<BigScalar> {
    BigScalar::from_f64(v).ok_or_else(|| GeomError::Precondition(format!("{what} is not finite")))
}

fn slack_of<S: Space>(space: &S, v: f64) -> f64 {
    if space.discrete() {
        0.0
    } else {
        space.tolerance().max(1e-9) * (1.0 + v.abs())
    }
}

/// Rejects paths that are empty, do not join `x` to `y`, or jump.
fn check_path<S: Space>(space: &S, path: &[S::Point], x: &S::Point, y: &S::Point, failures: &mut Vec<String>) {
    let (Some(first), Some(last)) = (path.first(), path.last()) else {
        failures.push("path is empty".into());
        return;
    };
    let tol = slack_of(space, 1.0);
    if space.distance(first, x) > tol {
        failures.push(format!(
            "path starts at {} instead of {}",
            space.format_point(first),
            space.format_point(x)
        ));
    }
    if space.distance(last, y) > tol {
        failures.push(format!(
            "path ends at {} instead of {}",
            space.format_point(last),
            space.format_point(y)
        ));
    }
    if space.discrete() {
        if let Some(i) = path.windows(2).position(|w| space.distance(&w[0], &w[1]) != 1.0) {
            failures.push(format!("path is not connected between steps {i} and {}", i + 1));
        }
    }
}

/// Length and extremal heights of a path, as certified inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMeasure {
    pub length: f64,
    /// Highest point of the whole path, not only of its samples.
    pub h_plus: f64,
    pub h_minus: f64,
}

impl PathMeasure {
    /// Polyline through `path` with geodesic steps; each step contributes
    /// the top of its geodesic.
    pub fn of_polyline<S: Space>(space: &S, path: &[S::Point]) -> Option<Self> {
        let (_, _, h_minus, _) = height_extremes(space, path)?;
        let h_plus = path
            .windows(2)
            .map(|w| space.segment_top(&w[0], &w[1]))
            .fold(space.height(&path[0]), f64::max);
        Some(PathMeasure {
            length: polyline_length(space, path),
            h_plus,
            h_minus,
        })
    }
}

fn backwards_certificate<S: Space>(space: &S, ctx: &CapContext<S::Point>) -> Option<Result<BoundCertificate>> {
    let CapContext::BackwardsControl { v1, v2, t1, t2, t } = ctx else {
        return None;
    };
    Some((|| {
        let r = backwards_control_residual(space, v1, v2, *t1, *t2, *t)
            .map_err(|e| GeomError::Hypothesis(vec![e.to_string()]))?;
        let report = vec![format!("0 <= t = {t} <= d_r/2")];
        let rhs = BigScalar::bracket(r, slack_of(space, r), Rounding::Up)
            .ok_or_else(|| GeomError::Precondition("non-finite residual".into()))?;
        Ok(BoundCertificate::new(
            BoundKind::BackwardsControl,
            space.delta() * 288,
            rhs,
            report,
        ))
    })())
}

fn endpoints<P>(ctx: &CapContext<P>) -> (&P, &P) {
    match ctx {
        CapContext::Amande { x, y, .. }
        | CapContext::BelowSameHeight { x, y, .. }
        | CapContext::BelowAndReach { x, y, .. } => (x, y),
        CapContext::BackwardsControl { v1, v2, .. } => (v1, v2),
    }
}

/// Checks the hypotheses of `ctx` on the polyline `path` (geodesic steps
/// between consecutive points) and compares its length with the bound.
/// Every hypothesis failure is listed in the error.
pub fn certify_capped_path<S: Space>(
    space: &S,
    path: &[S::Point],
    ctx: &CapContext<S::Point>,
) -> Result<BoundCertificate> {
    if let Some(c) = backwards_certificate(space, ctx) {
        return c;
    }
    let (x, y) = endpoints(ctx);
    let mut failures = Vec::new();
    check_path(space, path, x, y, &mut failures);
    if !failures.is_empty() {
        return Err(GeomError::Hypothesis(failures));
    }
    let measure = PathMeasure::of_polyline(space, path).expect("nonempty path");
    certify_measured(space, measure, ctx)
}

/// Same as [`certify_capped_path`] for a member of the capped plane family,
/// measured exactly along its horocycle piece.
pub fn certify_capped_plane_path(
    space: &PlaneSpace,
    path: &CappedPath,
    ctx: &CapContext<PlanePoint>,
) -> Result<BoundCertificate> {
    if let Some(c) = backwards_certificate(space, ctx) {
        return c;
    }
    let (x, y) = endpoints(ctx);
    let mut failures = Vec::new();
    check_path(space, &[path.start, path.end], x, y, &mut failures);
    if !failures.is_empty() {
        return Err(GeomError::Hypothesis(failures));
    }
    let measure = PathMeasure {
        length: path.length,
        h_plus: path.h_plus,
        h_minus: path.h_minus(),
    };
    certify_measured(space, measure, ctx)
}

fn certify_measured<S: Space>(space: &S, measure: PathMeasure, ctx: &CapContext<S::Point>) -> Result<BoundCertificate> {
    let delta = space.delta().clone();
    let kind = ctx.kind();
    let (x, y) = endpoints(ctx);
    let mut failures = Vec::new();
    let mut report = vec!["path joins x to y".to_string()];
    let PathMeasure {
        length,
        h_plus,
        h_minus,
    } = measure;
    let lhs = BigScalar::bracket(length, slack_of(space, length), Rounding::Down)
        .ok_or_else(|| GeomError::Precondition("non-finite path length".into()))?;
    let (hx, hy) = (space.height(x), space.height(y));

    let rhs = match ctx {
        CapContext::Amande { t0, .. } => {
            let t0 = *t0;
            if t0 < hx.max(hy) {
                failures.push(format!("t0 = {t0} below max(h(x), h(y)) = {}", hx.max(hy)));
            }
            if h_plus > t0 + slack_of(space, t0) {
                failures.push(format!("path top {h_plus} above the cap t0 = {t0}"));
            }
            let x0 = space.vertical_at(x, t0)?;
            let y0 = space.vertical_at(y, t0)?;
            let d0 = space.distance(&x0, &y0);
            let d0_low = BigScalar::bracket(d0, slack_of(space, d0), Rounding::Down).unwrap();
            if d0_low <= &delta * 768 {
                failures.push(format!("d(x0, y0) = {d0} not above 768 delta"));
            }
            if !failures.is_empty() {
                return Err(GeomError::Hypothesis(failures));
            }
            report.push(format!("h+ = {h_plus} <= t0 = {t0}"));
            report.push(format!("d(x0, y0) = {d0} > 768 delta"));
            let up = |v: f64| BigScalar::bracket(v, slack_of(space, v), Rounding::Up).unwrap();
            let d0_up = up(d0);
            amande_rounded(&delta, &up(t0 - hx), &up(t0 - hy), &d0_up, Rounding::Up)?
        }
        CapContext::BelowSameHeight { delta_h, .. } => {
            let dr = relative_distance(space, x, y);
            let cap = hx.max(hy) + 0.5 * dr - delta_h;
            if h_plus > cap + slack_of(space, cap) {
                failures.push(format!("path top {h_plus} above h(y) + d_r/2 - Delta H = {cap}"));
            }
            let dh = exact(*delta_h, "Delta H")?;
            if dh <= &delta * 555 {
                failures.push(format!("Delta H = {delta_h} not above 555 delta"));
            }
            if !failures.is_empty() {
                return Err(GeomError::Hypothesis(failures));
            }
            report.push(format!("h+ = {h_plus} <= {cap}"));
            report.push(format!("Delta H = {delta_h} > 555 delta"));
            let d = space.distance(x, y);
            let d_up = BigScalar::bracket(d, slack_of(space, d), Rounding::Up).unwrap();
            below_same_height_rounded(&delta, &d_up, &dh, Rounding::Up)?
        }
        CapContext::BelowAndReach { m, .. } => {
            let hm = m.as_ref().map(|m| space.height(m)).unwrap_or(h_minus);
            let (lo, hi) = if hx <= hy { (hx, hy) } else { (hy, hx) };
            if hm > lo + slack_of(space, lo) {
                failures.push(format!("h(m) = {hm} above min(h(x), h(y)) = {lo}"));
            }
            if (h_minus - hm).abs() > slack_of(space, hm) {
                failures.push(format!("path bottom {h_minus} differs from h(m) = {hm}"));
            }
            if !failures.is_empty() {
                return Err(GeomError::Hypothesis(failures));
            }
            report.push(format!("h- = h(m) = {hm}"));
            let dr = relative_distance(space, x, y);
            let big_h = hi + 0.5 * dr - h_plus;
            let d = space.distance(x, y);
            let up = |v: f64| BigScalar::bracket(v, slack_of(space, v), Rounding::Up).unwrap();
            // dH is measured; take the larger value over both ends of its bracket.
            let dh_up = up(big_h);
            below_and_reach_rounded(
                &delta,
                &up(lo - hm).max(BigScalar::zero()),
                &up(d),
                &dh_up,
                Rounding::Up,
            )?
            .max(below_and_reach_rounded(
                &delta,
                &up(lo - hm).max(BigScalar::zero()),
                &up(d),
                &BigScalar::bracket(big_h, slack_of(space, big_h), Rounding::Down).unwrap(),
                Rounding::Up,
            )?)
        }
        CapContext::BackwardsControl { .. } => unreachable!(),
    };
    Ok(BoundCertificate::new(kind, lhs, rhs, report))
}

/// Whether `y` can be reached from `x` by a path of the tree that never rises
/// above `cap`, searching exhaustively inside the ball of radius `radius`
/// around `x`.
pub fn tree_cap_reachable(space: &TreeSpace, x: &TreeVertex, y: &TreeVertex, cap: i64, radius: i64) -> Result<bool> {
    let ball = space.generate_ball(x, radius)?;
    let (Some(s), Some(t)) = (ball.index_of(x), ball.index_of(y)) else {
        return Err(GeomError::OutsideBall(space.serialize(y)));
    };
    let mut seen = vec![false; ball.len()];
    let mut stack = Vec::new();
    if x.height() <= cap {
        seen[s] = true;
        stack.push(s);
    }
    while let Some(i) = stack.pop() {
        if i == t {
            return Ok(true);
        }
        for &j in &ball.adjacency[i] {
            if !seen[j] && ball.vertices[j].height() <= cap {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    Ok(false)
}

/// One point of the exponential-law sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpLawPoint {
    pub delta_h: f64,
    /// Capped length minus the geodesic length.
    pub excess: f64,
    pub capped_length: f64,
    pub certificate: BoundCertificate,
    /// Same-height certificate when its hypothesis is met.
    pub same_height: Option<BoundCertificate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpLawReport {
    pub dx: f64,
    pub points: Vec<ExpLawPoint>,
    /// Least-squares slope of `ln(excess)` against the deficit.
    pub slope: f64,
    pub intercept: f64,
    /// Sweep points whose same-height hypothesis failed.
    pub skipped_same_height: usize,
}

impl ExpLawReport {
    pub fn all_hold(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.certificate.holds && p.same_height.as_ref().is_none_or(|c| c.holds))
    }
}

/// Least-squares line through `(x, y)` pairs as `(slope, intercept)`.
pub fn fit_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

pub const DEFAULT_LAW_DX: f64 = 2.0 * 22026.465794806718;

/// Caps the geodesic from `(0,0)` to `(dx,0)` at `deficits` below its top,
/// measures the excess length and fits `ln(excess)` against the deficit.
pub fn exponential_law(space: &PlaneSpace, dx: f64, deficits: &[f64]) -> Result<ExpLawReport> {
    if deficits.len() < 2 {
        return Err(GeomError::Precondition("the sweep needs at least two deficits".into()));
    }
    let u = PlanePoint::new(0.0, 0.0)?;
    let v = PlanePoint::new(dx, 0.0)?;
    let top = crate::plane::geodesic_max_height(&u, &v);
    let geodesic = space.distance(&u, &v);
    let mut points = Vec::with_capacity(deficits.len());
    let mut skipped = 0;
    for &dh in deficits {
        if !(dh > 0.0 && dh <= top) {
            return Err(GeomError::Precondition(format!("deficit {dh} outside (0, {top}]")));
        }
        let capped = space.capped_min_length(&u, &v, top - dh)?;
        let certificate =
            certify_capped_plane_path(space, &capped, &CapContext::BelowAndReach { x: u, y: v, m: None })?;
        let same_height = match certify_capped_plane_path(
            space,
            &capped,
            &CapContext::BelowSameHeight {
                x: u,
                y: v,
                delta_h: 0.5 * geodesic - capped.cap,
            },
        ) {
            Ok(c) => Some(c),
            Err(GeomError::Hypothesis(_)) => {
                skipped += 1;
                None
            }
            Err(e) => return Err(e),
        };
        points.push(ExpLawPoint {
            delta_h: dh,
            excess: capped.length - geodesic,
            capped_length: capped.length,
            certificate,
            same_height,
        });
    }
    let samples: Vec<(f64, f64)> = points.iter().map(|p| (p.delta_h, p.excess.ln())).collect();
    let (slope, intercept) = fit_line(&samples).ok_or_else(|| GeomError::Precondition("degenerate sweep".into()))?;
    Ok(ExpLawReport {
        dx,
        points,
        slope,
        intercept,
        skipped_same_height: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> BigScalar {
        BigScalar::from_int(n)
    }

    #[test]
    fn amande_examples() {
        let one = BigScalar::one();
        assert_eq!(amande_bound(&one, &s(5), &s(5), &s(800)).unwrap(), s(16370));
        let tiny = amande_bound(&one, &s(5), &s(5), &s(769)).unwrap();
        let want = BigScalar::pow2(-2) * BigScalar::pow2_rational(&BigScalar::from_ratio(1, 2), Rounding::Down);
        assert_eq!(tiny, &s(-14) + &want);
        assert!(matches!(
            amande_bound(&one, &s(5), &s(5), &s(768)),
            Err(GeomError::Hypothesis(_))
        ));
    }

    #[test]
    fn same_height_examples() {
        let one = BigScalar::one();
        let v = below_same_height_bound(&one, &s(100), &s(600)).unwrap();
        assert_eq!(v, BigScalar::pow2(70) + s(100 - 1224));
        let w = below_same_height_bound(&one, &s(0), &s(556)).unwrap();
        assert_eq!(w, BigScalar::pow2(26) - s(1136));
        assert!(below_same_height_bound(&one, &s(0), &s(555)).is_err());
    }

    #[test]
    fn reach_examples() {
        let one = BigScalar::one();
        let v = below_and_reach_bound(&one, &s(0), &s(10), &s(0)).unwrap();
        assert_eq!(v, BigScalar::pow2(-850) + s(10 - 1 - 1700));
        let w = below_and_reach_bound(&one, &s(3), &s(10), &s(900)).unwrap();
        assert_eq!(w, BigScalar::pow2(50) + s(6 + 10 - 1 - 1800 - 1700));
        let neg = below_and_reach_bound(&one, &s(0), &s(0), &s(-4)).unwrap();
        assert_eq!(neg, BigScalar::pow2(-854) - s(1701));
    }

    #[test]
    fn fractional_exponent_is_a_lower_bound() {
        let one = BigScalar::one();
        let d = BigScalar::from_ratio(15381, 20);
        let v = amande_bound(&one, &s(0), &s(0), &d).unwrap();
        let exact = 2f64.powf(769.05 / 2.0 - 386.0) - 24.0;
        assert!(v.to_f64() <= exact);
        assert!(exact - v.to_f64() < 1e-8);
    }

    #[test]
    fn tree_residual_vanishes() {
        let t = TreeSpace::new(2).unwrap();
        let a = TreeVertex::root();
        let b = TreeVertex::new(0, [(0, 1)]).unwrap();
        for tt in [0.0, 1.0] {
            assert_eq!(backwards_control_residual(&t, &a, &b, 0.0, 0.0, tt).unwrap(), 0.0);
        }
        assert!(backwards_control_residual(&t, &a, &b, 0.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn plane_residual_small() {
        let p = PlaneSpace::new();
        let a = PlanePoint::new(0.0, 0.0).unwrap();
        let b = PlanePoint::new(2.0, 0.0).unwrap();
        let half = 0.5 * relative_distance(&p, &a, &b);
        for k in 0..=10 {
            let r = backwards_control_residual(&p, &a, &b, 0.0, 0.0, half * k as f64 / 10.0).unwrap();
            assert!(r < 288.0);
        }
        assert!(backwards_control_residual(&p, &a, &b, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn truncated_path_is_rejected() {
        let p = PlaneSpace::new();
        let u = PlanePoint::new(0.0, 0.0).unwrap();
        let v = PlanePoint::new(50.0, 0.0).unwrap();
        let mut path = p.capped_min_length(&u, &v, 2.0).unwrap().sample(64);
        path.truncate(path.len() - 5);
        let err = certify_capped_path(&p, &path, &CapContext::BelowAndReach { x: u, y: v, m: None }).unwrap_err();
        assert!(matches!(err, GeomError::Hypothesis(ref v) if v.iter().any(|m| m.contains("ends at"))));
    }

    #[test]
    fn amande_on_far_plane_points() {
        let p = PlaneSpace::new();
        let u = PlanePoint::new(0.0, 0.0).unwrap();
        let v = PlanePoint::new(2.0 * 400f64.sinh(), 0.0).unwrap();
        let capped = p.capped_min_length(&u, &v, 0.0).unwrap();
        let ctx = CapContext::Amande { x: u, y: v, t0: 0.0 };
        let c = certify_capped_plane_path(&p, &capped, &ctx).unwrap();
        assert!(c.holds);
        assert!((c.rhs.log2_approx() - 14.0).abs() < 0.01);
        assert!((c.lhs.to_f64() - capped.length).abs() <= 1e-6 * capped.length);
        // Straight chords across the horocycle rise far above the cap.
        let err = certify_capped_path(&p, &capped.sample(64), &ctx).unwrap_err();
        assert!(matches!(err, GeomError::Hypothesis(ref v) if v.iter().any(|m| m.contains("above the cap"))));
    }

    #[test]
    fn tree_cap_below_confluence_blocks() {
        let t = TreeSpace::new(2).unwrap();
        let x = TreeVertex::new(0, [(0, 1)]).unwrap();
        let y = TreeVertex::new(-1, [(-1, 1)]).unwrap();
        let h = t.confluence_level(&x, &y);
        assert_eq!(h, 1);
        assert!(!tree_cap_reachable(&t, &x, &y, h - 1, 6).unwrap());
        assert!(tree_cap_reachable(&t, &x, &y, h, 6).unwrap());
    }

    #[test]
    fn line_fit() {
        let pts: Vec<_> = (0..5).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        let (a, b) = fit_line(&pts).unwrap();
        assert!((a - 3.0).abs() < 1e-12 && (b + 1.0).abs() < 1e-12);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in BoundKind::ALL {
            assert_eq!(k.name().parse::<BoundKind>().unwrap(), k);
        }
        assert!("nope".parse::<BoundKind>().is_err());
    }
}
