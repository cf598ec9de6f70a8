//! The log model of the hyperbolic plane, `ds^2 = dz^2 + e^{-2z} dx^2`.
//!
//! The upward end is `z -> +inf` and the height of `(x, z)` is `z`. With the
//! substitution `y = e^z` this is the upper half-plane, where geodesics are
//! vertical lines and Euclidean semicircles centred on the real axis.

use std::fmt;

use crate::error::{GeomError, Result};
use crate::scalar::BigScalar;
use crate::space::Space;

/// Largest admissible `|z|`; beyond it `e^z` leaves double range.
pub const MAX_ABS_HEIGHT: f64 = 700.0;

const GOLDEN_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub z: f64,
}

impl PlanePoint {
    pub fn new(x: f64, z: f64) -> Result<Self> {
        if !x.is_finite() || !z.is_finite() {
            return Err(GeomError::Precondition(format!("non-finite plane point ({x}, {z})")));
        }
        if z.abs() > MAX_ABS_HEIGHT {
            return Err(GeomError::Overflow(z));
        }
        Ok(PlanePoint { x, z })
    }

    pub fn serialize(&self) -> String {
        format!("P({},{})", self.x, self.z)
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Closed-form distance, evaluated in a cancellation-free form of
/// `arccosh(1 + (dx^2 + (e^{z_u} - e^{z_v})^2) / (2 e^{z_u + z_v}))`.
pub fn plane_distance(u: &PlanePoint, v: &PlanePoint) -> f64 {
    let horiz = (v.x - u.x) * (-(u.z + v.z) / 2.0).exp() / 2.0;
    let vert = ((u.z - v.z) / 2.0).sinh();
    2.0 * horiz.hypot(vert).asinh()
}

/// Half-plane semicircle carrying a non-vertical geodesic.
#[derive(Debug, Clone, Copy)]
struct Arc {
    center: f64,
    radius: f64,
}

fn arc_through(u: &PlanePoint, v: &PlanePoint) -> Option<Arc> {
    let dx = v.x - u.x;
    if dx == 0.0 {
        return None;
    }
    let (bu, bv) = (u.z.exp(), v.z.exp());
    let center = (u.x + v.x) / 2.0 + (bv - bu) * (bv + bu) / (2.0 * dx);
    let radius = (u.x - center).hypot(bu);
    Some(Arc { center, radius })
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Maximal height of the geodesic `[u, v]`.
pub fn geodesic_max_height(u: &PlanePoint, v: &PlanePoint) -> f64 {
    match arc_through(u, v) {
        None => u.z.max(v.z),
        Some(arc) => {
            // The apex lies on the segment only if the endpoints straddle the centre.
            if (u.x - arc.center) * (v.x - arc.center) <= 0.0 {
                arc.radius.ln()
            } else {
                u.z.max(v.z)
            }
        }
    }
}

/// Point at arc length `s` from `u` towards `v`.
///
/// Moves `u` to `i`, where the geodesic is the image of `i e^s` under a
/// rotation about `i`, and evaluates everything in logarithms so that
/// far-apart or very high endpoints keep full precision; the far half is
/// walked from `v`.
pub fn plane_geodesic_point(u: &PlanePoint, v: &PlanePoint, s: f64) -> PlanePoint {
    let d = plane_distance(u, v);
    if s > 0.5 * d {
        return geodesic_from(v, u, d - s);
    }
    geodesic_from(u, v, s)
}

fn geodesic_from(u: &PlanePoint, v: &PlanePoint, s: f64) -> PlanePoint {
    let dx = v.x - u.x;
    if dx == 0.0 {
        let dir = if v.z >= u.z { 1.0 } else { -1.0 };
        return PlanePoint {
            x: u.x,
            z: u.z + dir * s,
        };
    }
    // v seen from u: (X, Y) = ((v.x - u.x) / y_u, y_v / y_u), scaled by m.
    let lx = dx.abs().ln() - u.z;
    let ly = v.z - u.z;
    let lm = lx.max(ly).max(0.0);
    let ln_a = std::f64::consts::LN_2 + lx - 2.0 * lm;
    let b = (2.0 * (lx - lm)).exp() + (2.0 * (ly - lm)).exp() - (-2.0 * lm).exp();
    let n = ln_a.exp().hypot(b);
    // sin^2 and cos^2 of the rotation angle, in logs.
    let (ln_sin2, ln_cos2) = if b >= 0.0 {
        (2.0 * ln_a - (2.0 * n * (n + b)).ln(), ((n + b) / (2.0 * n)).ln())
    } else {
        (((n - b) / (2.0 * n)).ln(), 2.0 * ln_a - (2.0 * n * (n - b)).ln())
    };
    let s = s.max(0.0);
    let ln_den = log_add_exp(ln_cos2 - 2.0 * s, ln_sin2);
    let z = u.z - s - ln_den;
    let ln_shift = u.z + 0.5 * (ln_sin2 + ln_cos2) + (-(-2.0 * s).exp_m1()).ln() - ln_den;
    PlanePoint {
        x: u.x + dx.signum() * ln_shift.exp(),
        z,
    }
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_min(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    if b - a <= 0.0 {
        return (a, f(a));
    }
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
        if b - a <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
    }
    let candidates = [(lo, f(lo)), (hi, f(hi)), (c, fc), (d, fd)];
    candidates.into_iter().fold(
        (lo, f64::INFINITY),
        |best, cand| if cand.1 < best.1 { cand } else { best },
    )
}

/// The log-model plane with its declared hyperbolicity constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSpace {
    delta: BigScalar,
}

impl Default for PlaneSpace {
    fn default() -> Self {
        PlaneSpace {
            delta: BigScalar::one(),
        }
    }
}

impl PlaneSpace {
    pub fn new() -> Self {
        PlaneSpace::default()
    }

    pub fn with_delta(delta: BigScalar) -> Result<Self> {
        if delta < BigScalar::one() {
            return Err(GeomError::InvalidConstant {
                name: "delta",
                value: delta.to_string(),
            });
        }
        Ok(PlaneSpace { delta })
    }

    /// Shortest path from `u` to `v` among the paths that stay at height
    /// `<= cap`, within the family "geodesic up to the horocycle `z = cap`,
    /// along the horocycle, geodesic down". The two switch points are
    /// refined by golden-section search. This is an upper bound on the true
    /// constrained infimum; without an active cap it is the geodesic itself.
    pub fn capped_min_length(&self, u: &PlanePoint, v: &PlanePoint, cap: f64) -> Result<CappedPath> {
        if u == v {
            return Err(GeomError::Precondition("capped path needs distinct endpoints".into()));
        }
        if cap < u.z.max(v.z) {
            return Err(GeomError::Precondition(format!(
                "cap {cap} below endpoint heights ({}, {})",
                u.z, v.z
            )));
        }
        let top = geodesic_max_height(u, v);
        if top <= cap {
            return Ok(CappedPath {
                start: *u,
                end: *v,
                cap,
                switch: None,
                length: plane_distance(u, v),
                h_plus: top,
            });
        }
        // Orient left to right; the family is mirror symmetric.
        let flip = v.x < u.x;
        let (a, b) = if flip {
            (PlanePoint { x: -u.x, z: u.z }, PlanePoint { x: -v.x, z: v.z })
        } else {
            (*u, *v)
        };
        let y_cap = cap.exp();
        let reach = |p: &PlanePoint| (y_cap * y_cap - (2.0 * p.z).exp()).max(0.0).sqrt();
        let (lo1, hi1) = (a.x, a.x + reach(&a));
        let (lo2, hi2) = (b.x - reach(&b), b.x);
        let at_cap = |s: f64| PlanePoint { x: s, z: cap };
        let f1 = |s: f64| plane_distance(&a, &at_cap(s)) - s / y_cap;
        let f2 = |s: f64| plane_distance(&at_cap(s), &b) + s / y_cap;
        let (mut s1, _) = golden_min(lo1, hi1, f1);
        let (mut s2, _) = golden_min(lo2, hi2, f2);
        if s1 > s2 {
            let (lo, hi) = (lo1.max(lo2), hi1.min(hi2));
            if lo > hi {
                return Err(GeomError::Precondition(
                    "no admissible switch point under the cap".into(),
                ));
            }
            let (s, _) = golden_min(lo, hi, |s| {
                plane_distance(&a, &at_cap(s)) + plane_distance(&at_cap(s), &b)
            });
            s1 = s;
            s2 = s;
        }
        let length = plane_distance(&a, &at_cap(s1)) + (s2 - s1) / y_cap + plane_distance(&at_cap(s2), &b);
        let h_plus = cap
            .max(geodesic_max_height(&a, &at_cap(s1)))
            .max(geodesic_max_height(&at_cap(s2), &b));
        let (s1, s2) = if flip { (-s1, -s2) } else { (s1, s2) };
        Ok(CappedPath {
            start: *u,
            end: *v,
            cap,
            switch: Some((s1, s2)),
            length,
            h_plus,
        })
    }
}

/// Member of the capped path family returned by
/// [`PlaneSpace::capped_min_length`].
#[derive(Debug, Clone, PartialEq)]
pub struct CappedPath {
    pub start: PlanePoint,
    pub end: PlanePoint,
    pub cap: f64,
    /// Horocycle entry and exit abscissae, `None` when the geodesic is
    /// already below the cap.
    pub switch: Option<(f64, f64)>,
    pub length: f64,
    /// Highest point of the pieces, which exceeds `cap` only by the error of
    /// the switch-point search.
    pub h_plus: f64,
}

impl CappedPath {
    /// Samples along the pieces, `per_piece` points each.
    pub fn sample(&self, per_piece: usize) -> Vec<PlanePoint> {
        let n = per_piece.max(2);
        let seg = |a: &PlanePoint, b: &PlanePoint| {
            let d = plane_distance(a, b);
            (0..n)
                .map(|i| plane_geodesic_point(a, b, d * i as f64 / (n - 1) as f64))
                .collect::<Vec<_>>()
        };
        match self.switch {
            None => seg(&self.start, &self.end),
            Some((s1, s2)) => {
                let p1 = PlanePoint { x: s1, z: self.cap };
                let p2 = PlanePoint { x: s2, z: self.cap };
                let mut out = seg(&self.start, &p1);
                out.extend((1..n).map(|i| PlanePoint {
                    x: s1 + (s2 - s1) * i as f64 / (n - 1) as f64,
                    z: self.cap,
                }));
                out.extend(seg(&p2, &self.end).into_iter().skip(1));
                out
            }
        }
    }

    /// Lowest height of the path; the geodesic pieces only rise away from
    /// their lower endpoint, so it is attained at an endpoint.
    pub fn h_minus(&self) -> f64 {
        self.start.z.min(self.end.z)
    }
}

impl Space for PlaneSpace {
    type Point = PlanePoint;

    fn segment_top(&self, x: &PlanePoint, y: &PlanePoint) -> f64 {
        geodesic_max_height(x, y)
    }

    fn delta(&self) -> &BigScalar {
        &self.delta
    }

    fn base_point(&self) -> PlanePoint {
        PlanePoint { x: 0.0, z: 0.0 }
    }

    fn distance(&self, x: &PlanePoint, y: &PlanePoint) -> f64 {
        plane_distance(x, y)
    }

    fn height(&self, x: &PlanePoint) -> f64 {
        x.z
    }

    fn vertical_at(&self, anchor: &PlanePoint, t: f64) -> Result<PlanePoint> {
        PlanePoint::new(anchor.x, t)
    }

    fn geodesic_point(&self, x: &PlanePoint, y: &PlanePoint, s: f64) -> Result<PlanePoint> {
        let d = plane_distance(x, y);
        if s < -1e-9 || s > d + 1e-9 {
            return Err(GeomError::Precondition(format!("arc length {s} outside [0, {d}]")));
        }
        Ok(plane_geodesic_point(x, y, s.clamp(0.0, d)))
    }

    fn geodesic(&self, x: &PlanePoint, y: &PlanePoint, samples: usize) -> Vec<PlanePoint> {
        let n = samples.max(2);
        let d = plane_distance(x, y);
        let mut out: Vec<PlanePoint> = (0..n)
            .map(|i| plane_geodesic_point(x, y, d * i as f64 / (n - 1) as f64))
            .collect();
        out[0] = *x;
        out[n - 1] = *y;
        out
    }

    fn distance_to_vertical(&self, anchor: &PlanePoint, w: &PlanePoint) -> f64 {
        ((w.x - anchor.x).abs() * (-w.z).exp()).asinh()
    }

    fn distance_to_geodesic(&self, u: &PlanePoint, v: &PlanePoint, w: &PlanePoint) -> f64 {
        let d = plane_distance(u, v);
        golden_min(0.0, d, |s| plane_distance(w, &plane_geodesic_point(u, v, s))).1
    }

    fn height_grid(&self, lo: f64, hi: f64) -> Vec<f64> {
        if hi < lo {
            return Vec::new();
        }
        let n = (((hi - lo) / 1e-3).ceil() as usize).clamp(1, 200_000);
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    }

    fn tolerance(&self) -> f64 {
        1e-9
    }

    fn format_point(&self, x: &PlanePoint) -> String {
        x.serialize()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, z: f64) -> PlanePoint {
        PlanePoint::new(x, z).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert!((plane_distance(&p(0.0, 0.0), &p(0.0, 5.0)) - 5.0).abs() < 1e-12);
        assert!((plane_distance(&p(0.0, 0.0), &p(2.0, 0.0)) - 3f64.acosh()).abs() < 1e-12);
        assert_eq!(plane_distance(&p(1.5, -2.0), &p(1.5, -2.0)), 0.0);
    }

    #[test]
    fn distance_grows_like_twice_log() {
        let dx = 1e8;
        let d = plane_distance(&p(0.0, 0.0), &p(dx, 0.0));
        assert!((d / (2.0 * dx.ln()) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn overflow_guard() {
        assert!(matches!(PlanePoint::new(0.0, 701.0), Err(GeomError::Overflow(_))));
        assert!(PlanePoint::new(0.0, -700.0).is_ok());
    }

    #[test]
    fn max_height_examples() {
        assert!((geodesic_max_height(&p(0.0, 0.0), &p(2.0, 0.0)) - 2f64.sqrt().ln()).abs() < 1e-12);
        assert_eq!(geodesic_max_height(&p(0.0, 0.0), &p(0.0, 5.0)), 5.0);
    }

    #[test]
    fn geodesic_point_near_far_endpoints() {
        let u = p(0.0, 0.0);
        for v in [p(2.0 * 600f64.exp(), 0.0), p(1e19, 44.0), p(-3e5, -2.0)] {
            let d = plane_distance(&u, &v);
            assert!(plane_distance(&plane_geodesic_point(&u, &v, 0.0), &u) < 1e-12);
            let near = plane_geodesic_point(&u, &v, 1e-3);
            assert!((plane_distance(&u, &near) - 1e-3).abs() < 1e-12);
            let end = plane_geodesic_point(&u, &v, d);
            assert!(plane_distance(&end, &v) < 1e-6 * d.max(1.0));
        }
    }

    #[test]
    fn geodesic_point_hits_endpoint() {
        let (u, v) = (p(-1.0, 0.3), p(2.5, -0.7));
        let d = plane_distance(&u, &v);
        let end = plane_geodesic_point(&u, &v, d);
        assert!(plane_distance(&end, &v) < 1e-9);
        let mid = plane_geodesic_point(&u, &v, d / 2.0);
        assert!((plane_distance(&u, &mid) - d / 2.0).abs() < 1e-9);
        assert!((plane_distance(&mid, &v) - d / 2.0).abs() < 1e-9);
    }

    #[test]
    fn capped_inactive_returns_geodesic() {
        let s = PlaneSpace::new();
        let c = s.capped_min_length(&p(0.0, 0.0), &p(2.0, 0.0), 1.0).unwrap();
        assert!(c.switch.is_none());
        assert!((c.length - 3f64.acosh()).abs() < 1e-12);
    }

    #[test]
    fn capped_is_monotone_in_cap() {
        let s = PlaneSpace::new();
        let (u, v) = (p(0.0, 0.0), p(200.0, 0.0));
        let mut last = f64::INFINITY;
        for i in 0..20 {
            let cap = 0.25 * i as f64;
            let l = s.capped_min_length(&u, &v, cap).unwrap().length;
            assert!(l <= last + 1e-9, "cap {cap}: {l} > {last}");
            last = l;
        }
        assert!((last - plane_distance(&u, &v)).abs() < 1e-9);
    }

    #[test]
    fn capped_rejects_low_cap() {
        let s = PlaneSpace::new();
        assert!(s.capped_min_length(&p(0.0, 1.0), &p(3.0, 0.0), 0.5).is_err());
        assert!(s.capped_min_length(&p(0.0, 1.0), &p(0.0, 1.0), 2.0).is_err());
    }

    #[test]
    fn capped_samples_stay_below_cap() {
        let s = PlaneSpace::new();
        let c = s.capped_min_length(&p(0.0, 0.0), &p(1000.0, 0.5), 3.0).unwrap();
        let pts = c.sample(64);
        assert!(pts.iter().all(|q| q.z <= 3.0 + 1e-9));
        assert!(plane_distance(&pts[0], &p(0.0, 0.0)) < 1e-9);
        assert!(plane_distance(pts.last().unwrap(), &p(1000.0, 0.5)) < 1e-6);
        let chords: f64 = pts.windows(2).map(|w| plane_distance(&w[0], &w[1])).sum();
        assert!(chords <= c.length + 1e-6);
    }

    #[test]
    fn serialization_round_trip_text() {
        assert_eq!(p(7.2, -1.5).serialize(), "P(7.2,-1.5)");
        assert_eq!(p(0.0, 2.0).serialize(), "P(0,2)");
    }
}
