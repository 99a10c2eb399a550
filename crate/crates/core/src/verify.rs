//! Self-checks shared by the command line and the test suites. Each report
//! carries the raw numbers and a pass flag.

use rand::Rng;
use serde::Serialize;

use crate::combinatorics::{
    bkar_sides, cayley_degree_count, connecting_terms, count_compatible_pairs, degrees, enumerate_forest_selections,
    enumerate_matchings, labeled_trees, matching_count, partition_join, trees_by_edge_subsets, PerfectMatching, P_HARD_CAP,
};
use crate::error::Result;
use crate::integrator::{brute_force_coefficient, coefficient, Budget, CoefficientEstimate, Method, Mode};
use crate::jump::{estimate_moment_mc, moment_closed_form};
use crate::kernel::Kernel;
use crate::quad::{integrate, QuadOptions};
use crate::rng::{domain, stream, subdomain};

/// Exact-branch threshold for the forest identity.
pub const BKAR_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct MomentCase {
    pub times: Vec<f64>,
    pub closed_form: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub cases: Vec<MomentCase>,
    pub passed: usize,
    pub required: usize,
    pub pass: bool,
}

/// Random increasing tuples (`q ∈ 1..=6`, times in `(0, 3)`), each checked
/// against the closed form within 3 standard errors; at least 90% must pass.
pub fn moment_suite(tuples: usize, samples: u64, seed: u64) -> Result<MomentReport> {
    let mut cases = Vec::with_capacity(tuples);
    for i in 0..tuples {
        let mut rng = stream(seed, domain::TUPLES, i as u64);
        let q = rng.random_range(1..=6);
        let mut times: Vec<f64> = (0..q).map(|_| rng.random_range(0.0..3.0)).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let closed_form = moment_closed_form(&times)?;
        let est = estimate_moment_mc(&times, samples, seed.wrapping_add(1 + i as u64))?;
        let pass = (est.value - closed_form).abs() <= 3.0 * est.std_error;
        cases.push(MomentCase {
            times,
            closed_form,
            estimate: est.value,
            std_error: est.std_error,
            pass,
        });
    }
    let passed = cases.iter().filter(|c| c.pass).count();
    let required = (tuples * 9).div_ceil(10);
    Ok(MomentReport {
        cases,
        passed,
        required,
        pass: passed >= required,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BkarReport {
    pub p: usize,
    pub trials: usize,
    pub max_residual: f64,
    /// Disjoint (1 = 1) and overlapping (0 = 0) two-interval cases, exactly.
    pub analytic_cases: bool,
    pub pass: bool,
}

/// Forest identity at random matchings and random times.
pub fn bkar_suite(p: usize, trials: usize, seed: u64, p_max: usize) -> Result<BkarReport> {
    let matchings = enumerate_matchings(p, p_max)?;
    let mut max_residual: f64 = 0.0;
    for i in 0..trials {
        let mut rng = stream(seed, subdomain(domain::BKAR, p as u64), i as u64);
        let m = &matchings[rng.random_range(0..matchings.len())];
        let t: Vec<f64> = (0..p)
            .flat_map(|_| {
                let s: f64 = rng.random_range(0.0..2.0);
                [s, s + rng.random_range(0.05..1.5)]
            })
            .collect();
        let (lhs, rhs) = bkar_sides(m, &t)?;
        max_residual = max_residual.max((lhs - rhs).abs());
    }
    let base = PerfectMatching::base(2);
    let analytic_cases = bkar_sides(&base, &[0.0, 1.0, 2.0, 3.0])? == (1.0, 1.0) && bkar_sides(&base, &[0.0, 2.0, 1.0, 3.0])? == (0.0, 0.0);
    Ok(BkarReport {
        p,
        trials,
        max_residual,
        analytic_cases,
        pass: analytic_cases && max_residual < BKAR_TOLERANCE,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusLevel {
    pub p: usize,
    pub matchings: u64,
    pub expected_matchings: u64,
    pub even_supports: bool,
    pub connecting_pairs: u64,
    /// Connecting pairs found again by filtering all forest selections.
    pub connecting_pairs_filtered: u64,
    pub per_tree_max: u64,
    pub bound: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CayleyLevel {
    pub p: usize,
    pub trees: usize,
    pub degree_classes: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub levels: Vec<CensusLevel>,
    pub cayley: Vec<CayleyLevel>,
    pub pass: bool,
}

/// Counts for one order `p`: matchings, connecting pairs, and the largest
/// number of pairs compatible with a single spanning tree.
pub fn census_level(p: usize, p_max: usize) -> Result<CensusLevel> {
    let matchings = enumerate_matchings(p, p_max)?;
    let even_supports = matchings
        .iter()
        .all(|m| partition_join(m).supports().iter().all(|s| s.len() % 2 == 0));
    let connecting_pairs = connecting_terms(p, p_max)?.len() as u64;
    let mut filtered = 0;
    for m in &matchings {
        for f in enumerate_forest_selections(m, false)? {
            if f.len() + 1 == partition_join(m).len() {
                filtered += 1;
            }
        }
    }
    let mut per_tree_max = 0;
    for tree in labeled_trees(p) {
        per_tree_max = per_tree_max.max(count_compatible_pairs(&tree, p, p_max)?);
    }
    let bound = 4u64.pow(p as u32);
    let expected_matchings = matching_count(p);
    Ok(CensusLevel {
        p,
        matchings: matchings.len() as u64,
        expected_matchings,
        even_supports,
        connecting_pairs,
        connecting_pairs_filtered: filtered,
        per_tree_max,
        bound,
        pass: matchings.len() as u64 == expected_matchings && even_supports && filtered == connecting_pairs && per_tree_max < bound,
    })
}

/// Degree-sequence tree counts by exhaustive enumeration.
pub fn cayley_level(p: usize) -> CayleyLevel {
    use std::collections::HashMap;
    let trees = trees_by_edge_subsets(p);
    let mut tally: HashMap<Vec<usize>, u64> = HashMap::new();
    for t in &trees {
        *tally.entry(degrees(t, p)).or_default() += 1;
    }
    let pass = tally.iter().all(|(d, &n)| cayley_degree_count(d) == n);
    CayleyLevel {
        p,
        trees: trees.len(),
        degree_classes: tally.len(),
        pass,
    }
}

pub fn census_suite(p_max: usize) -> Result<CensusReport> {
    let levels = (1..=p_max).map(|p| census_level(p, p_max)).collect::<Result<Vec<_>>>()?;
    let cayley: Vec<CayleyLevel> = (1..=P_HARD_CAP).map(cayley_level).collect();
    let pass = levels.iter().all(|l| l.pass) && cayley.iter().all(|c| c.pass);
    Ok(CensusReport { levels, cayley, pass })
}

#[derive(Debug, Clone, Serialize)]
pub struct ResummationCase {
    pub horizon: f64,
    pub p: usize,
    pub brute_force: CoefficientEstimate,
    /// `𝒞₁` for p = 1, `𝒞₂/2 + 𝒞₁²/2` for p = 2.
    pub predicted: f64,
    pub predicted_error: f64,
    pub z_score: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResummationReport {
    pub cases: Vec<ResummationCase>,
    /// Relative gap between nested 2-D quadrature of `𝒞₁(T)` and its 1-D
    /// reduction `∫_0^T (T − s) e^{−2s} h(s) ds`.
    pub quadrature_cross_check: Vec<f64>,
    pub pass: bool,
}

/// Taylor coefficients of `Z(α, T)` at orders 1 and 2 against the
/// exponential of the connected coefficients.
pub fn resummation_suite(kernel: &Kernel, horizons: &[f64], samples: u64, seed: u64) -> Result<ResummationReport> {
    let mut cases = Vec::new();
    let mut cross = Vec::new();
    for (i, &horizon) in horizons.iter().enumerate() {
        let s = seed.wrapping_add(100 * i as u64);
        let budget = Budget {
            samples,
            seed: s,
            rel_tol: 1e-8,
            ..Budget::default()
        };
        let mode = Mode::finite(horizon);
        let c1 = coefficient(1, 2, kernel, mode, Method::Quadrature, &budget)?;
        let reduced = integrate(
            |x| (horizon - x) * (-2.0 * x).exp() * kernel.h(x),
            0.0,
            horizon,
            &[],
            QuadOptions::rel(1e-12),
        )
        .value;
        let c2 = coefficient(2, 2, kernel, mode, Method::MonteCarlo, &budget)?;
        let z1 = brute_force_coefficient(1, horizon, kernel, samples, s + 1)?;
        let z2 = brute_force_coefficient(2, horizon, kernel, samples, s + 2)?;
        cross.push(if reduced == 0.0 { c1.value.abs() } else { ((c1.value - reduced) / reduced).abs() });
        let predicted2 = c2.value / 2.0 + c1.value * c1.value / 2.0;
        for (p, z, predicted, err) in [(1, z1, c1.value, c1.total_error()), (2, z2, predicted2, c2.statistical_error / 2.0)] {
            let sigma = z.statistical_error.hypot(err);
            let z_score = if sigma > 0.0 { (z.value - predicted) / sigma } else { 0.0 };
            cases.push(ResummationCase {
                horizon,
                p,
                brute_force: z,
                predicted,
                predicted_error: err,
                z_score,
                pass: z_score.abs() <= 3.0,
            });
        }
    }
    let pass = cases.iter().all(|c| c.pass) && cross.iter().all(|&r| r <= 1e-4);
    Ok(ResummationReport {
        cases,
        quadrature_cross_check: cross,
        pass,
    })
}
