//! Pointed hyperbolic components with a distinguished boundary direction.
//!
//! A component fixes a base point `w` and an end `a`; the height of `x` is
//! minus the Busemann function of `a` normalized at `w`. Vertical geodesics
//! are parametrized by height, so `h(V(t)) = t`.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::scalar::BigScalar;

/// Contract shared by every concrete component (end-pointed tree, log-model
/// plane).
pub trait Space {
    type Point: Clone + PartialEq + std::fmt::Debug;

    /// Declared hyperbolicity constant (>= 1).
    fn delta(&self) -> &BigScalar;

    fn base_point(&self) -> Self::Point;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    fn height(&self, x: &Self::Point) -> f64;

    /// Largest height on the geodesic `[x, y]`.
    fn segment_top(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// Point of the vertical geodesic through `anchor` at height `t`.
    ///
    /// Above the anchor this is the unique upward ray; below it each
    /// component uses a canonical descent.
    fn vertical_at(&self, anchor: &Self::Point, t: f64) -> Result<Self::Point>;

    /// Point at arc length `s` from `x` along the geodesic `[x, y]`.
    fn geodesic_point(&self, x: &Self::Point, y: &Self::Point, s: f64) -> Result<Self::Point>;

    /// Sampled geodesic; trees return the exact vertex sequence and ignore
    /// `samples`.
    fn geodesic(&self, x: &Self::Point, y: &Self::Point, samples: usize) -> Vec<Self::Point>;

    /// Distance from `w` to the whole vertical line through `anchor`.
    fn distance_to_vertical(&self, anchor: &Self::Point, w: &Self::Point) -> f64;

    /// Distance from `w` to the geodesic segment `[u, v]`.
    fn distance_to_geodesic(&self, u: &Self::Point, v: &Self::Point, w: &Self::Point) -> f64;

    /// Height grid used when scanning along a vertical between `lo` and `hi`.
    fn height_grid(&self, lo: f64, hi: f64) -> Vec<f64>;

    /// Absolute tolerance for identities that are exact on discrete spaces.
    fn tolerance(&self) -> f64;

    /// Whether heights are restricted to the integers.
    fn discrete(&self) -> bool {
        false
    }

    fn format_point(&self, x: &Self::Point) -> String;
}

pub fn delta_h<S: Space>(space: &S, x: &S::Point, y: &S::Point) -> f64 {
    (space.height(x) - space.height(y)).abs()
}

/// `d(x, y) - |h(x) - h(y)|`, clamped at zero against rounding.
pub fn relative_distance<S: Space>(space: &S, x: &S::Point, y: &S::Point) -> f64 {
    (space.distance(x, y) - delta_h(space, x, y)).max(0.0)
}

/// A vertical geodesic: an anchor point plus the height parametrization.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalGeodesic<P> {
    pub anchor: P,
}

impl<P: Clone> VerticalGeodesic<P> {
    pub fn new(anchor: P) -> Self {
        VerticalGeodesic { anchor }
    }

    pub fn at<S: Space<Point = P>>(&self, space: &S, t: f64) -> Result<P> {
        space.vertical_at(&self.anchor, t)
    }
}

pub fn vertical_through<S: Space>(_space: &S, x: &S::Point) -> VerticalGeodesic<S::Point> {
    VerticalGeodesic::new(x.clone())
}

/// Witness points of the maximal-height estimate for a geodesic `[x, y]`
/// with `h(x) <= h(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lem0Witnesses<P> {
    /// Geodesic point at arc length `dh + d_r / 2` from `x`.
    pub z: P,
    /// `V_x` at height `h(y) + d_r / 2`.
    pub x1: P,
    /// `V_y` at the same height.
    pub y1: P,
    /// `h(y) + d_r / 2 - 96 delta`.
    pub hplus_lower: BigScalar,
    pub relative_distance: f64,
}

impl<P> Lem0Witnesses<P> {
    pub fn to_json<S: Space<Point = P>>(&self, space: &S) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out {
            z: String,
            x1: String,
            y1: String,
            hplus_lower: String,
            hplus_lower_f64: f64,
        }
        serde_json::to_value(Out {
            z: space.format_point(&self.z),
            x1: space.format_point(&self.x1),
            y1: space.format_point(&self.y1),
            hplus_lower: self.hplus_lower.to_string(),
            hplus_lower_f64: self.hplus_lower.to_f64(),
        })
        .expect("witnesses serialize")
    }
}

fn check_orientation<S: Space>(space: &S, x: &S::Point, y: &S::Point) -> Result<(f64, f64)> {
    let (hx, hy) = (space.height(x), space.height(y));
    if hx > hy + space.tolerance() {
        return Err(GeomError::Orientation { h_x: hx, h_y: hy });
    }
    Ok((hx, hy))
}

pub fn lem0_witnesses<S: Space>(space: &S, x: &S::Point, y: &S::Point) -> Result<Lem0Witnesses<S::Point>> {
    let (hx, hy) = check_orientation(space, x, y)?;
    let dr = relative_distance(space, x, y);
    let z = space.geodesic_point(x, y, (hy - hx) + dr / 2.0)?;
    let top = hy + dr / 2.0;
    let x1 = space.vertical_at(x, top)?;
    let y1 = space.vertical_at(y, top)?;
    let top_exact = BigScalar::from_f64(top).ok_or_else(|| GeomError::Precondition("non-finite height".into()))?;
    let hplus_lower = &top_exact - &(space.delta() * 96);
    Ok(Lem0Witnesses {
        z,
        x1,
        y1,
        hplus_lower,
        relative_distance: dr,
    })
}

/// `|d_r(x, y) - d(x', y)|` with `x' = V_x(h(y))`.
pub fn same_height_projection_gap<S: Space>(space: &S, x: &S::Point, y: &S::Point) -> Result<f64> {
    let (_, hy) = check_orientation(space, x, y)?;
    let x_proj = space.vertical_at(x, hy)?;
    Ok((relative_distance(space, x, y) - space.distance(&x_proj, y)).abs())
}

/// Maximal and minimal heights of a component path, with smallest-index
/// argmax/argmin.
pub fn height_extremes<S: Space>(space: &S, path: &[S::Point]) -> Option<(f64, usize, f64, usize)> {
    let mut it = path.iter().enumerate();
    let (_, first) = it.next()?;
    let h0 = space.height(first);
    let (mut hi, mut hi_i, mut lo, mut lo_i) = (h0, 0, h0, 0);
    for (i, p) in it {
        let h = space.height(p);
        if h > hi {
            hi = h;
            hi_i = i;
        }
        if h < lo {
            lo = h;
            lo_i = i;
        }
    }
    Some((hi, hi_i, lo, lo_i))
}

/// Sum of consecutive distances.
pub fn polyline_length<S: Space>(space: &S, path: &[S::Point]) -> f64 {
    path.windows(2).map(|w| space.distance(&w[0], &w[1])).sum()
}
