use super::{enumerate_forest_selections, ClusterTerm, PerfectMatching};
use crate::error::{Error, Result};

/// Closed-interval overlap of base pairs `a` and `b` under times `t`.
#[inline]
pub fn overlaps(t: &[f64], a: usize, b: usize) -> bool {
    t[2 * a] <= t[2 * b + 1] && t[2 * b] <= t[2 * a + 1]
}

/// Both sides of the hardcore forest identity at fixed times:
/// `Π_{A<B} 1{t_A ∩ t_B = ∅}` and
/// `Σ_F (−1)^{|F|} Π_F 1{overlap} ∫ dv Π_{∉F} (1 − r 1{overlap})`.
pub fn bkar_sides(matching: &PerfectMatching, t: &[f64]) -> Result<(f64, f64)> {
    let p = matching.p();
    if t.len() != 2 * p {
        return Err(Error::Argument(format!("expected {} times, got {}", 2 * p, t.len())));
    }
    if (0..p).any(|j| !(t[2 * j] < t[2 * j + 1])) {
        return Err(Error::Argument("each base pair needs t_start < t_end".into()));
    }
    let overlap = |a: usize, b: usize| overlaps(t, a, b);
    let disjoint = (0..p).all(|a| (a + 1..p).all(|b| !overlap(a, b)));
    let lhs = if disjoint { 1.0 } else { 0.0 };
    let mut rhs = 0.0;
    for f in enumerate_forest_selections(matching, false)? {
        let term = ClusterTerm::new(matching.clone(), f)?;
        if term.forest_overlaps(overlap) {
            rhs += term.sign() * term.v_integrated_hardcore(overlap);
        }
    }
    Ok((lhs, rhs))
}

/// `|LHS − RHS|` of the forest identity.
pub fn verify_bkar_identity(matching: &PerfectMatching, t: &[f64]) -> Result<f64> {
    let (lhs, rhs) = bkar_sides(matching, t)?;
    Ok((lhs - rhs).abs())
}
