//! Cluster-term integrands and the connected coefficients `c_p` (pinned) and
//! `𝒞_p(T)` (finite horizon).

mod brute;
mod quadrature;
mod sampler;

pub use brute::brute_force_coefficient;
pub use quadrature::integrate_term_quadrature;
pub use sampler::{integrate_term_mc, sample_term};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{connecting_terms, overlaps, ClusterTerm, InterpolationAssignment};
use crate::error::{Error, Result};
use crate::kernel::Kernel;

/// Integration domain for the times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One point fixed at 0, the others over the whole line.
    Pinned { point: usize },
    /// All times in `[0, T]`.
    FiniteT { horizon: f64 },
}

impl Mode {
    pub fn pinned() -> Self {
        Mode::Pinned { point: 0 }
    }

    pub fn finite(horizon: f64) -> Self {
        Mode::FiniteT { horizon }
    }

    pub fn horizon(&self) -> Option<f64> {
        match *self {
            Mode::FiniteT { horizon } => Some(horizon),
            Mode::Pinned { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

/// Work limits for one coefficient evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Monte Carlo samples per term.
    pub samples: u64,
    pub seed: u64,
    /// Relative tolerance for each quadrature level.
    pub rel_tol: f64,
    /// Panel limit for each quadrature level.
    pub max_intervals: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            samples: 100_000,
            seed: 0,
            rel_tol: 1e-6,
            max_intervals: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientEstimate {
    pub value: f64,
    pub statistical_error: f64,
    /// Accumulated quadrature error estimate (absolute).
    pub quadrature_tolerance: f64,
    pub method: Method,
    pub p: usize,
    pub finite_t: Option<f64>,
    /// False when the quadrature hit its panel limit before the tolerance.
    pub converged: bool,
    pub terms: usize,
}

impl CoefficientEstimate {
    /// Statistical and quadrature error added in quadrature.
    pub fn total_error(&self) -> f64 {
        self.statistical_error.hypot(self.quadrature_tolerance)
    }
}

/// One term's contribution, for per-term reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermEstimate {
    pub matching: Vec<(usize, usize)>,
    pub forest: Vec<(usize, usize)>,
    pub estimate: CoefficientEstimate,
}

#[inline]
fn ordered(t: &[f64], p: usize) -> bool {
    (0..p).all(|j| t[2 * j] < t[2 * j + 1])
}

/// Everything in the integrand except the interpolated hardcore factors and
/// the overlap indicators of `F`: the sign, the interval weights
/// `e^{−2(t_{2j+1} − t_{2j})}` and the kernel factors over `P`.
#[inline]
fn smooth_part(term: &ClusterTerm, t: &[f64], kernel: &Kernel) -> f64 {
    let p = term.p();
    let mut value = term.sign();
    let mut length = 0.0;
    for j in 0..p {
        length += t[2 * j + 1] - t[2 * j];
    }
    value *= (-2.0 * length).exp();
    for (a, b) in term.matching().pairs() {
        value *= kernel.h(t[a] - t[b]);
    }
    value
}

/// Integrand of a cluster term at times `t` and interpolation parameters `v`.
pub fn term_integrand(term: &ClusterTerm, t: &[f64], v: &InterpolationAssignment, kernel: &Kernel) -> Result<f64> {
    let p = term.p();
    if t.len() != 2 * p || v.values().len() != term.forest().len() {
        return Err(Error::Argument("time or interpolation vector has the wrong length".into()));
    }
    if !ordered(t, p) {
        return Ok(0.0);
    }
    let overlap = |a, b| overlaps(t, a, b);
    if !term.forest_overlaps(overlap) {
        return Ok(0.0);
    }
    Ok(smooth_part(term, t, kernel) * term.hardcore_factor(v.values(), overlap))
}

/// Integrand with the `v` integral over `[0, 1]^F` already performed.
pub fn term_integrand_v_integrated(term: &ClusterTerm, t: &[f64], kernel: &Kernel) -> f64 {
    let p = term.p();
    debug_assert_eq!(t.len(), 2 * p);
    if !ordered(t, p) {
        return 0.0;
    }
    let overlap = |a, b| overlaps(t, a, b);
    if !term.forest_overlaps(overlap) {
        return 0.0;
    }
    let hard = term.v_integrated_hardcore(overlap);
    if hard == 0.0 {
        return 0.0;
    }
    smooth_part(term, t, kernel) * hard
}

/// Integral of one connecting term.
pub fn integrate_term(term: &ClusterTerm, term_index: u64, kernel: &Kernel, mode: Mode, method: Method, budget: &Budget) -> Result<CoefficientEstimate> {
    match mode {
        Mode::Pinned { point } => {
            if point >= 2 * term.p() {
                return Err(Error::Argument(format!("pinned point {point} out of range")));
            }
            if !term.is_connecting() {
                return Err(Error::Structure("pinned integral of a non-connecting term diverges".into()));
            }
        }
        Mode::FiniteT { horizon } => {
            if !(horizon > 0.0 && horizon.is_finite()) {
                return Err(Error::Argument("horizon must be positive and finite".into()));
            }
        }
    }
    match method {
        Method::Quadrature => integrate_term_quadrature(term, kernel, mode, budget),
        Method::MonteCarlo => integrate_term_mc(term, term_index, kernel, mode, budget),
    }
}

/// Sum over all connecting terms of order `p`, each term separately.
pub fn coefficient_terms(p: usize, p_max: usize, kernel: &Kernel, mode: Mode, method: Method, budget: &Budget) -> Result<Vec<TermEstimate>> {
    let terms = connecting_terms(p, p_max)?;
    terms
        .iter()
        .enumerate()
        .map(|(i, term)| {
            let estimate = integrate_term(term, i as u64, kernel, mode, method, budget)?;
            Ok(TermEstimate {
                matching: term.matching().pairs().collect(),
                forest: term.forest().micro_edges().to_vec(),
                estimate,
            })
        })
        .collect()
}

/// Combine per-term estimates (errors in quadrature, quadrature errors added).
pub fn combine(p: usize, mode: Mode, method: Method, terms: &[TermEstimate]) -> CoefficientEstimate {
    let mut value = 0.0;
    let mut var = 0.0;
    let mut quad = 0.0;
    let mut converged = true;
    for t in terms {
        value += t.estimate.value;
        var += t.estimate.statistical_error.powi(2);
        quad += t.estimate.quadrature_tolerance;
        converged &= t.estimate.converged;
    }
    CoefficientEstimate {
        value,
        statistical_error: var.sqrt(),
        quadrature_tolerance: quad,
        method,
        p,
        finite_t: mode.horizon(),
        converged,
        terms: terms.len(),
    }
}

/// `c_p` (pinned) or `𝒞_p(T)`: the sum over all connecting `(P, F)`.
pub fn coefficient(p: usize, p_max: usize, kernel: &Kernel, mode: Mode, method: Method, budget: &Budget) -> Result<CoefficientEstimate> {
    let terms = coefficient_terms(p, p_max, kernel, mode, method, budget)?;
    Ok(combine(p, mode, method, &terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{ForestSelection, PerfectMatching};
    use crate::kernel::KernelSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kernel() -> Kernel {
        Kernel::new(KernelSpec::indicator(1.0)).unwrap()
    }

    #[test]
    fn p1_integrand() {
        let k = kernel();
        let term = ClusterTerm::new(PerfectMatching::base(1), ForestSelection::empty()).unwrap();
        let v = InterpolationAssignment::new(vec![]).unwrap();
        let s = 0.8;
        let value = term_integrand(&term, &[0.0, s], &v, &k).unwrap();
        assert!((value - (-2.0 * s).exp() * k.h(s)).abs() < 1e-15);
        assert_eq!(term_integrand(&term, &[0.5, 0.2], &v, &k).unwrap(), 0.0);
    }

    #[test]
    fn sign_and_translation_invariance() {
        let k = kernel();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for term in connecting_terms(3, 4).unwrap() {
            let v = InterpolationAssignment::new((0..term.forest().len()).map(|_| rng.random()).collect()).unwrap();
            for _ in 0..20 {
                // heavily overlapping intervals so forest indicators hold
                let t: Vec<f64> = (0..3).flat_map(|_| [rng.random_range(0.0..0.5), rng.random_range(1.0..2.0)]).collect();
                let a = term_integrand(&term, &t, &v, &k).unwrap();
                let shifted: Vec<f64> = t.iter().map(|x| x + 3.7).collect();
                let b = term_integrand(&term, &shifted, &v, &k).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
                if a != 0.0 {
                    assert_eq!(a.signum(), term.sign());
                }
                let c = term_integrand_v_integrated(&term, &t, &k);
                let d = term_integrand_v_integrated(&term, &shifted, &k);
                assert!((c - d).abs() <= 1e-12 * c.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn non_connecting_pinned_is_structure_error() {
        let term = ClusterTerm::new(PerfectMatching::base(2), ForestSelection::empty()).unwrap();
        let r = integrate_term(&term, 0, &kernel(), Mode::pinned(), Method::Quadrature, &Budget::default());
        assert!(matches!(r, Err(Error::Structure(_))));
    }

    #[test]
    fn p2_census_signs() {
        let k = kernel();
        let terms = coefficient_terms(2, 4, &k, Mode::pinned(), Method::Quadrature, &Budget::default()).unwrap();
        assert_eq!(terms.len(), 3);
        let negative: Vec<_> = terms.iter().filter(|t| t.estimate.value < 0.0).collect();
        assert_eq!(negative.len(), 1);
        assert_eq!(negative[0].forest, vec![(0, 1)]);
    }
}
