//! Importance sampling of a connecting term along its opened spanning tree.
//!
//! Interval lengths are drawn from `Exp(2)`, the displacement across each
//! surviving `P` edge from `h / ‖h‖₁`, and the start of a child joined by a
//! forest edge uniformly over the window where it overlaps its parent. The
//! weight is the integrand over this density, without the sign.

use rand::Rng;
use rand_distr::Exp1;

use super::{Budget, CoefficientEstimate, Method, Mode};
use crate::combinatorics::{open_cycles, overlaps, ClusterTerm, OpenedStructure, TreeEdgeKind};
use crate::error::Result;
use crate::kernel::Kernel;
use crate::rng::{domain, stream, subdomain};
use crate::stats::batched_mean;

/// Draw one configuration into `t` and return its (unsigned) weight.
pub fn sample_term<R: Rng + ?Sized>(
    term: &ClusterTerm,
    opened: &OpenedStructure,
    kernel: &Kernel,
    horizon: Option<f64>,
    rng: &mut R,
    t: &mut [f64],
) -> Result<f64> {
    let p = term.p();
    let length = |rng: &mut R| -> f64 {
        let e: f64 = rng.sample(Exp1);
        0.5 * e
    };
    let mut weight = 0.5f64.powi(p as i32);
    let start = match horizon {
        Some(h) => {
            weight *= h;
            rng.random::<f64>() * h
        }
        None => 0.0,
    };
    t[0] = start;
    t[1] = start + length(rng);
    for edge in &opened.tree {
        let child_len = length(rng);
        let c = edge.child;
        match edge.kind {
            TreeEdgeKind::Matching { parent_point, child_point } => {
                let at = t[parent_point] + kernel.sample_displacement(rng)?;
                weight *= kernel.norm_l1();
                if child_point % 2 == 0 {
                    t[2 * c] = at;
                    t[2 * c + 1] = at + child_len;
                } else {
                    t[2 * c + 1] = at;
                    t[2 * c] = at - child_len;
                }
            }
            TreeEdgeKind::Forest => {
                let parent = edge.parent;
                let (ps, pe) = (t[2 * parent], t[2 * parent + 1]);
                let window = pe - ps + child_len;
                let s = ps - child_len + rng.random::<f64>() * window;
                weight *= window;
                t[2 * c] = s;
                t[2 * c + 1] = s + child_len;
            }
        }
    }
    if let Some(h) = horizon {
        if t.iter().any(|&x| !(0.0..=h).contains(&x)) {
            return Ok(0.0);
        }
    }
    for &(a, b) in &opened.deleted {
        weight *= kernel.h(t[a] - t[b]);
    }
    if weight == 0.0 {
        return Ok(0.0);
    }
    Ok(weight * term.v_integrated_hardcore(|a, b| overlaps(t, a, b)))
}

/// Monte Carlo integral of one connecting term.
pub fn integrate_term_mc(term: &ClusterTerm, term_index: u64, kernel: &Kernel, mode: Mode, budget: &Budget) -> Result<CoefficientEstimate> {
    let opened = open_cycles(term)?;
    let horizon = mode.horizon();
    let p = term.p();
    let (value, error) = if kernel.is_zero() {
        (0.0, 0.0)
    } else {
        let dom = subdomain(domain::CLUSTER_TERM, term_index);
        let m = batched_mean(budget.samples, |i| {
            let mut rng = stream(budget.seed, dom, i);
            let mut t = [0.0; 32];
            sample_term(term, &opened, kernel, horizon, &mut rng, &mut t[..2 * p]).unwrap_or(f64::NAN)
        })?;
        (term.sign() * m.mean, m.std_error)
    };
    Ok(CoefficientEstimate {
        value,
        statistical_error: error,
        quadrature_tolerance: 0.0,
        method: Method::MonteCarlo,
        p,
        finite_t: horizon,
        converged: true,
        terms: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{connecting_terms, ForestSelection, PerfectMatching};
    use crate::integrator::integrate_term_quadrature;
    use crate::kernel::KernelSpec;

    fn kernel() -> Kernel {
        Kernel::new(KernelSpec::indicator(1.0)).unwrap()
    }

    fn budget(samples: u64) -> Budget {
        Budget {
            samples,
            seed: 17,
            ..Budget::default()
        }
    }

    #[test]
    fn p1_pinned_matches_closed_form() {
        let c1 = 4.0 * std::f64::consts::PI * (1.0 - 2.0 * 1.5f64.ln());
        let term = ClusterTerm::new(PerfectMatching::base(1), ForestSelection::empty()).unwrap();
        let r = integrate_term_mc(&term, 0, &kernel(), Mode::pinned(), &budget(200_000)).unwrap();
        assert!((r.value - c1).abs() < 4.0 * r.statistical_error, "{} ± {}", r.value, r.statistical_error);
        assert!(r.statistical_error < 0.01 * c1);
    }

    #[test]
    fn p2_terms_match_quadrature() {
        let k = kernel();
        for (i, term) in connecting_terms(2, 4).unwrap().iter().enumerate() {
            let mc = integrate_term_mc(term, i as u64, &k, Mode::pinned(), &budget(200_000)).unwrap();
            let quad = integrate_term_quadrature(term, &k, Mode::pinned(), &Budget::default()).unwrap();
            assert!(
                (mc.value - quad.value).abs() < 4.0 * mc.statistical_error + 1e-6 * quad.value.abs(),
                "term {i}: {} ± {} vs {}",
                mc.value,
                mc.statistical_error,
                quad.value
            );
        }
    }

    #[test]
    fn finite_t_p1_matches_quadrature() {
        let k = kernel();
        let term = ClusterTerm::new(PerfectMatching::base(1), ForestSelection::empty()).unwrap();
        let quad = integrate_term_quadrature(&term, &k, Mode::finite(3.0), &Budget::default()).unwrap();
        let mc = integrate_term_mc(&term, 0, &k, Mode::finite(3.0), &budget(200_000)).unwrap();
        assert!((mc.value - quad.value).abs() < 4.0 * mc.statistical_error);
    }

    #[test]
    fn sampled_configurations_are_admissible() {
        let k = kernel();
        for term in connecting_terms(3, 4).unwrap() {
            let opened = open_cycles(&term).unwrap();
            let mut rng = stream(1, 99, 0);
            let mut t = vec![0.0; 6];
            for _ in 0..200 {
                let w = sample_term(&term, &opened, &k, None, &mut rng, &mut t).unwrap();
                assert!(w >= 0.0 && w.is_finite());
                assert_eq!(t[0], 0.0);
                assert!((0..3).all(|j| t[2 * j] < t[2 * j + 1]));
                assert!(term.forest_overlaps(|a, b| overlaps(&t, a, b)));
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let term = ClusterTerm::new(PerfectMatching::base(1), ForestSelection::empty()).unwrap();
        let a = integrate_term_mc(&term, 0, &kernel(), Mode::pinned(), &budget(5000)).unwrap();
        let b = integrate_term_mc(&term, 0, &kernel(), Mode::pinned(), &budget(5000)).unwrap();
        assert_eq!(a, b);
    }
}
