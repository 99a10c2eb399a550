//! Nested adaptive quadrature over the free times, `v` integrated exactly.

use std::cell::Cell;

use super::{term_integrand_v_integrated, Budget, CoefficientEstimate, Method, Mode};
use crate::combinatorics::ClusterTerm;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::quad::{integrate, QuadOptions};

/// Largest number of free time coordinates handled by nested quadrature.
pub const MAX_QUADRATURE_DIMS: usize = 3;

struct Nested<'a> {
    term: &'a ClusterTerm,
    kernel: &'a Kernel,
    free: Vec<usize>,
    fixed: Vec<usize>,
    range: (f64, f64),
    outer: QuadOptions,
    inner: QuadOptions,
    evaluations: Cell<usize>,
    converged: Cell<bool>,
}

impl Nested<'_> {
    fn level(&self, depth: usize, t: &[f64; 6]) -> (f64, f64) {
        let n = 2 * self.term.p();
        if depth == self.free.len() {
            self.evaluations.set(self.evaluations.get() + 1);
            return (term_integrand_v_integrated(self.term, &t[..n], self.kernel), 0.0);
        }
        let coord = self.free[depth];
        let mut breaks: Vec<f64> = self.fixed.iter().chain(&self.free[..depth]).map(|&i| t[i]).collect();
        breaks.sort_by(f64::total_cmp);
        let opts = if depth == 0 { self.outer } else { self.inner };
        let r = integrate(
            |x| {
                let mut local = *t;
                local[coord] = x;
                self.level(depth + 1, &local).0
            },
            self.range.0,
            self.range.1,
            &breaks,
            opts,
        );
        if !r.converged {
            self.converged.set(false);
        }
        (r.value, r.error)
    }
}

/// Integral of one term by nested Gauss-Kronrod quadrature, with breakpoints
/// at every already-fixed time (where all indicator jumps and kernel kinks sit).
pub fn integrate_term_quadrature(term: &ClusterTerm, kernel: &Kernel, mode: Mode, budget: &Budget) -> Result<CoefficientEstimate> {
    let n = 2 * term.p();
    let (free, fixed, range): (Vec<usize>, Vec<usize>, (f64, f64)) = match mode {
        Mode::Pinned { point } => ((0..n).filter(|&i| i != point).collect(), vec![point], (f64::NEG_INFINITY, f64::INFINITY)),
        Mode::FiniteT { horizon } => ((0..n).collect(), vec![], (0.0, horizon)),
    };
    if free.len() > MAX_QUADRATURE_DIMS {
        return Err(Error::Argument(format!(
            "quadrature handles at most {MAX_QUADRATURE_DIMS} free times, this term has {}; use monte_carlo",
            free.len()
        )));
    }
    let outer = QuadOptions {
        rel_tol: budget.rel_tol,
        abs_tol: 1e-300,
        max_intervals: budget.max_intervals,
    };
    let inner = QuadOptions {
        rel_tol: budget.rel_tol * 0.1,
        ..outer
    };
    let nested = Nested {
        term,
        kernel,
        free,
        fixed,
        range,
        outer,
        inner,
        evaluations: Cell::new(0),
        converged: Cell::new(true),
    };
    let (value, error) = if kernel.is_zero() {
        (0.0, 0.0)
    } else {
        nested.level(0, &[0.0; 6])
    };
    Ok(CoefficientEstimate {
        value,
        statistical_error: 0.0,
        quadrature_tolerance: error.max(budget.rel_tol * value.abs()),
        method: Method::Quadrature,
        p: term.p(),
        finite_t: mode.horizon(),
        converged: nested.converged.get(),
        terms: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{ForestSelection, PerfectMatching};
    use crate::kernel::KernelSpec;

    fn kernel() -> Kernel {
        Kernel::new(KernelSpec::indicator(1.0)).unwrap()
    }

    fn c1_exact() -> f64 {
        4.0 * std::f64::consts::PI * (1.0 - 2.0 * 1.5f64.ln())
    }

    /// `∫_0^∞ x e^{−2x} h(x) dx`
    fn m1_exact() -> f64 {
        4.0 * std::f64::consts::PI * (1.5f64.ln() - 1.0 / 3.0)
    }

    #[test]
    fn pinned_c1() {
        let term = ClusterTerm::new(PerfectMatching::base(1), ForestSelection::empty()).unwrap();
        let r = integrate_term_quadrature(&term, &kernel(), Mode::pinned(), &Budget::default()).unwrap();
        assert!((r.value - c1_exact()).abs() < 1e-8 * c1_exact(), "{}", r.value);
        // pinning the other end gives the same
        let r = integrate_term_quadrature(&term, &kernel(), Mode::Pinned { point: 1 }, &Budget::default()).unwrap();
        assert!((r.value - c1_exact()).abs() < 1e-8 * c1_exact());
    }

    #[test]
    fn finite_t_c1() {
        // ∫∫_{0<t0<t1<T} e^{−2s} h(s) = ∫_0^T (T − s) e^{−2s} h(s) ds
        let k = kernel();
        let horizon = 2.0;
        let oracle = integrate(|s| (horizon - s) * (-2.0 * s).exp() * k.h(s), 0.0, horizon, &[], QuadOptions::rel(1e-12)).value;
        let term = ClusterTerm::new(PerfectMatching::base(1), ForestSelection::empty()).unwrap();
        let r = integrate_term_quadrature(&term, &k, Mode::finite(horizon), &Budget::default()).unwrap();
        assert!((r.value - oracle).abs() < 1e-7 * oracle);
    }

    #[test]
    fn p2_forest_term_closed_form() {
        let base = PerfectMatching::base(2);
        let f = ForestSelection::new(&base, &[(0, 1)]).unwrap();
        let term = ClusterTerm::new(base, f).unwrap();
        let r = integrate_term_quadrature(&term, &kernel(), Mode::pinned(), &Budget::default()).unwrap();
        let expected = -2.0 * m1_exact() * c1_exact();
        assert!((r.value - expected).abs() < 1e-5 * expected.abs(), "{} vs {expected}", r.value);
        assert!(r.converged);
    }

    #[test]
    fn zero_kernel_and_dimension_limit() {
        let zero = Kernel::new(KernelSpec::HTable { points: vec![[0.0, 0.0], [1.0, 0.0]] }).unwrap();
        let term = ClusterTerm::new(PerfectMatching::base(1), ForestSelection::empty()).unwrap();
        assert_eq!(integrate_term_quadrature(&term, &zero, Mode::pinned(), &Budget::default()).unwrap().value, 0.0);
        let m = PerfectMatching::from_pairs(2, &[(0, 2), (1, 3)]).unwrap();
        let term = ClusterTerm::new(m, ForestSelection::empty()).unwrap();
        assert!(integrate_term_quadrature(&term, &kernel(), Mode::finite(2.0), &Budget::default()).is_err());
    }
}
