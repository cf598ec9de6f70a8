//! Exhaustive checks over the valid pairs of a Diestel-Leader ball.

use serde::Serialize;

use crate::dl::{coarse_int, dl_neighbors, dl_space, DlGraph, DlSpace, DEFAULT_GEODESIC_BUDGET};
use crate::error::Result;
use crate::geodesy::{
    classify_shape, classify_type, dead_end_census, is_coarse_dead_end, monotone_decomposition, pattern_string,
    type_flags, verify_height_bounds, CensusRow, DeadEnd, MonotoneSegment,
};
use crate::scalar::BigScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicScope {
    /// Distances only.
    None,
    /// Analyse the lexicographically first geodesic of each pair.
    First,
    /// Analyse every geodesic of each pair.
    All,
}

#[derive(Debug, Clone, Copy)]
pub struct CensusOptions {
    pub scope: GeodesicScope,
    pub geodesic_budget: usize,
    /// Emit one row per pair.
    pub rows: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            scope: GeodesicScope::First,
            geodesic_budget: DEFAULT_GEODESIC_BUDGET,
            rows: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CensusSummary {
    pub p: u32,
    pub q: u32,
    pub radius: i64,
    pub vertices: usize,
    pub pairs: usize,
    /// Pairs with BFS distance equal to the coarse formula.
    pub exact_matches: usize,
    /// Pairs whose built path has the BFS length.
    pub plan_matches: usize,
    pub geodesics: usize,
    /// Geodesics whose extremal heights equal the predictions.
    pub height_exact: usize,
    pub height_certified: usize,
    /// Geodesics with at most three alternating monotone pieces.
    pub shape_ok: usize,
    pub max_kappa_eff: f64,
    pub shape_certified: usize,
    /// Geodesics with at most two pieces, the pieces of geodesic lines.
    pub line_shaped: usize,
    /// Line-shaped geodesics typed `Hp` or `Hq`, with both exactly when
    /// vertical.
    pub typed_ok: usize,
    /// Three-piece geodesics and the largest scale needed to type them.
    pub three_piece: usize,
    pub three_piece_type_scale: f64,
    pub dead_ends: usize,
    pub dead_end_recheck_ok: bool,
    pub failures: Vec<String>,
}

impl CensusSummary {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct CensusReport {
    pub summary: CensusSummary,
    pub rows: Vec<CensusRow>,
    pub dead_ends: Vec<DeadEnd>,
}

fn alternating(segments: &[MonotoneSegment]) -> bool {
    segments.len() <= 3 && segments.windows(2).all(|w| w[0].label != w[1].label)
}

const MAX_LISTED_FAILURES: usize = 20;

fn fail(summary: &mut CensusSummary, msg: String) {
    if summary.failures.len() < MAX_LISTED_FAILURES {
        summary.failures.push(msg);
    }
}

/// Ball of `DL(p, q)` plus the exhaustive census over its valid pairs
/// `i < j`.
pub fn dl_census(p: u32, q: u32, radius: i64, vertex_budget: usize, opts: CensusOptions) -> Result<CensusReport> {
    let g = DlGraph::ball_with_budget(p, q, radius, vertex_budget)?;
    let space = dl_space(p, q)?;
    census_on(&g, &space, opts)
}

pub fn census_on(g: &DlGraph, space: &DlSpace, opts: CensusOptions) -> Result<CensusReport> {
    let mut s = CensusSummary {
        p: g.p,
        q: g.q,
        radius: g.radius,
        vertices: g.len(),
        dead_end_recheck_ok: true,
        ..Default::default()
    };
    let zero = BigScalar::zero();
    let mut rows = Vec::new();
    for i in 0..g.len() {
        let dist = g.bfs_from(i);
        for j in i + 1..g.len() {
            if !g.margin_ok(i, j) {
                continue;
            }
            s.pairs += 1;
            let d = dist[j].expect("margin rule keeps the pair connected");
            let coarse = g.coarse(i, j);
            if d == coarse {
                s.exact_matches += 1;
            } else {
                fail(
                    &mut s,
                    format!("{} -> {}: bfs {d} != coarse {coarse}", g.serialize(i), g.serialize(j)),
                );
            }
            if opts.scope == GeodesicScope::None {
                continue;
            }
            let (x, y) = (g.point(i), g.point(j));
            let plan = space.build_path(x, y)?;
            if plan.total_length == d as f64 {
                s.plan_matches += 1;
            } else {
                fail(
                    &mut s,
                    format!(
                        "{} -> {}: built path {} != bfs {d}",
                        g.serialize(i),
                        g.serialize(j),
                        plan.total_length
                    ),
                );
            }
            let geodesics = g.geodesics_between(i, j, opts.geodesic_budget)?;
            let take = if opts.scope == GeodesicScope::All {
                geodesics.len()
            } else {
                1
            };
            for (k, idx) in geodesics.iter().take(take).enumerate() {
                let path = g.path_points(idx);
                s.geodesics += 1;
                let hb = verify_height_bounds(space, &path, Some(d as f64))?;
                if hb.low_deviation == 0.0 && hb.high_deviation == 0.0 {
                    s.height_exact += 1;
                } else {
                    fail(
                        &mut s,
                        format!(
                            "{} -> {}: height deviations {} / {}",
                            g.serialize(i),
                            g.serialize(j),
                            hb.low_deviation,
                            hb.high_deviation
                        ),
                    );
                }
                if hb.certified {
                    s.height_certified += 1;
                }
                let segments = monotone_decomposition(space, &path, &zero);
                if alternating(&segments) {
                    s.shape_ok += 1;
                } else {
                    fail(
                        &mut s,
                        format!(
                            "{} -> {}: pattern {}",
                            g.serialize(i),
                            g.serialize(j),
                            pattern_string(&segments)
                        ),
                    );
                }
                let shape = classify_shape(space, &path)?;
                s.max_kappa_eff = s.max_kappa_eff.max(shape.kappa_eff);
                if shape.certified {
                    s.shape_certified += 1;
                }
                let ty = classify_type(space, &path, 0.0, 1)?;
                if segments.len() <= 2 {
                    s.line_shaped += 1;
                    let vertical = segments.len() == 1;
                    let both = ty.is_hp_type && ty.is_hq_type;
                    if (ty.is_hp_type || ty.is_hq_type) && both == vertical {
                        s.typed_ok += 1;
                    } else {
                        fail(
                            &mut s,
                            format!(
                                "{} -> {}: type flags {}",
                                g.serialize(i),
                                g.serialize(j),
                                type_flags(&ty)
                            ),
                        );
                    }
                } else {
                    s.three_piece += 1;
                    s.three_piece_type_scale = s.three_piece_type_scale.max(ty.hp_kappa.min(ty.hq_kappa));
                }
                if opts.rows && k == 0 {
                    rows.push(CensusRow {
                        x: g.serialize(i),
                        y: g.serialize(j),
                        bfs_dist: d,
                        coarse_dist: coarse,
                        hplus: hb.h_plus,
                        hminus: hb.h_minus,
                        pattern: pattern_string(&segments),
                        type_flags: type_flags(&ty),
                        kappa_eff: shape.kappa_eff,
                        dead_end: is_coarse_dead_end(g, i, j),
                    });
                }
            }
        }
    }
    if s.max_kappa_eff != 0.0 {
        let k = s.max_kappa_eff;
        fail(&mut s, format!("kappa_eff reached {k}"));
    }
    let dead_ends = if g.radius >= 3 { dead_end_census(g)? } else { Vec::new() };
    s.dead_ends = dead_ends.len();
    // Recheck with the closed-form distance on the full neighbourhood.
    let origin = g.point(0);
    for de in &dead_ends {
        let v = g
            .vertices
            .iter()
            .position(|x| space.format_point(x) == de.vertex)
            .expect("dead end lies in the ball");
        let dv = coarse_int(origin, g.point(v));
        let escapes = dl_neighbors(g.p, g.q, g.point(v))
            .iter()
            .any(|n| coarse_int(origin, n) > dv);
        if dv != de.depth || escapes {
            s.dead_end_recheck_ok = false;
            fail(&mut s, format!("dead end {} fails the neighbour recheck", de.vertex));
        }
    }
    Ok(CensusReport {
        summary: s,
        rows,
        dead_ends,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::DEFAULT_VERTEX_BUDGET;

    #[test]
    fn small_census_passes() {
        let r = dl_census(2, 2, 3, DEFAULT_VERTEX_BUDGET, CensusOptions::default()).unwrap();
        let s = &r.summary;
        assert!(s.passes(), "{:?}", s.failures);
        assert_eq!(s.exact_matches, s.pairs);
        assert_eq!(s.plan_matches, s.pairs);
        assert_eq!(r.rows.len(), s.pairs);
    }

    #[test]
    fn radius_zero_is_trivial() {
        let r = dl_census(2, 3, 0, DEFAULT_VERTEX_BUDGET, CensusOptions::default()).unwrap();
        assert_eq!(r.summary.vertices, 1);
        assert_eq!(r.summary.pairs, 0);
        assert!(r.summary.passes());
    }

    #[test]
    fn budget_is_enforced() {
        assert!(dl_census(2, 2, 5, 10, CensusOptions::default()).is_err());
    }
}
