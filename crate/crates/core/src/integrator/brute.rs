//! Direct Monte Carlo of the order-`α^p` Taylor coefficient of `Z(α, T)`.

use rand::Rng;

use super::{CoefficientEstimate, Method};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::rng::{domain, stream};
use crate::stats::batched_mean;

/// Largest order for the brute-force estimator.
pub const BRUTE_FORCE_MAX_P: usize = 3;

/// `(1/2)^p / p! ∫_{[0,T]^{2p}} Π_j h(t_{2j+1} − t_{2j}) E[X(t_1)⋯X(t_{2p})]`,
/// with uniform times and the moment evaluated in closed form.
pub fn brute_force_coefficient(p: usize, horizon: f64, kernel: &Kernel, samples: u64, seed: u64) -> Result<CoefficientEstimate> {
    if p == 0 {
        return Err(Error::Argument("p must be >= 1".into()));
    }
    if p > BRUTE_FORCE_MAX_P {
        return Err(Error::Resource { p, limit: BRUTE_FORCE_MAX_P });
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Argument("horizon must be positive and finite".into()));
    }
    let n = 2 * p;
    let factorial: f64 = (1..=p).map(|k| k as f64).product();
    let scale = 0.5f64.powi(p as i32) * horizon.powi(n as i32) / factorial;
    let (value, error) = if kernel.is_zero() {
        (0.0, 0.0)
    } else {
        let m = batched_mean(samples, |i| {
            let mut rng = stream(seed, domain::BRUTE_FORCE, i);
            let mut t = [0.0; 2 * BRUTE_FORCE_MAX_P];
            let t = &mut t[..n];
            for x in t.iter_mut() {
                *x = rng.random::<f64>() * horizon;
            }
            let mut value = 1.0;
            for j in 0..p {
                value *= kernel.h(t[2 * j + 1] - t[2 * j]);
            }
            t.sort_by(f64::total_cmp);
            let gaps: f64 = (0..p).map(|j| t[2 * j + 1] - t[2 * j]).sum();
            value * (-2.0 * gaps).exp()
        })?;
        (scale * m.mean, scale * m.std_error)
    };
    Ok(CoefficientEstimate {
        value,
        statistical_error: error,
        quadrature_tolerance: 0.0,
        method: Method::MonteCarlo,
        p,
        finite_t: Some(horizon),
        converged: true,
        terms: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;
    use crate::quad::{integrate, QuadOptions};

    #[test]
    fn p1_matches_quadrature() {
        let k = Kernel::new(KernelSpec::indicator(1.0)).unwrap();
        let horizon = 2.0;
        // (1/2) ∫∫ h(t1 − t0) e^{−2|t1 − t0|} = ∫_0^T (T − s) h(s) e^{−2s} ds
        let oracle = integrate(|s| (horizon - s) * k.h(s) * (-2.0 * s).exp(), 0.0, horizon, &[], QuadOptions::rel(1e-12)).value;
        let r = brute_force_coefficient(1, horizon, &k, 400_000, 3).unwrap();
        assert!((r.value - oracle).abs() < 4.0 * r.statistical_error, "{} ± {} vs {oracle}", r.value, r.statistical_error);
    }

    #[test]
    fn limits_and_zero_kernel() {
        let k = Kernel::new(KernelSpec::indicator(1.0)).unwrap();
        assert!(matches!(brute_force_coefficient(4, 1.0, &k, 10, 0), Err(Error::Resource { .. })));
        let zero = Kernel::new(KernelSpec::HTable { points: vec![[0.0, 0.0], [1.0, 0.0]] }).unwrap();
        assert_eq!(brute_force_coefficient(2, 1.0, &zero, 10, 0).unwrap().value, 0.0);
    }
}
