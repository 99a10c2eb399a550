//! The ±1 jump process `X(t) = B·(-1)^{N(t)}` with unit-rate flips and a
//! symmetric random initial sign, the Monte Carlo estimator of
//! `Z(α, T) = E[exp((α/2) ∫∫ X(t) X(s) h(t - s) dt ds)]`, and the
//! closed-form moments `E[X(t₁)⋯X(t_q)]`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::rng::{self, domain};
use crate::stats::{batched_mean, MCEstimate};

/// One realization of the jump process on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinPath {
    initial_sign: i8,
    jump_times: Vec<f64>,
    horizon: f64,
}

impl SpinPath {
    pub fn new(initial_sign: i8, jump_times: Vec<f64>, horizon: f64) -> Result<Self> {
        if initial_sign != 1 && initial_sign != -1 {
            return Err(Error::Argument(format!("initial sign must be ±1, got {initial_sign}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Argument(format!("horizon must be positive, got {horizon}")));
        }
        if jump_times.iter().any(|&t| !(t > 0.0 && t < horizon))
            || jump_times.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Argument(
                "jump times must be strictly increasing inside (0, horizon)".into(),
            ));
        }
        Ok(SpinPath {
            initial_sign,
            jump_times,
            horizon,
        })
    }

    pub fn initial_sign(&self) -> i8 {
        self.initial_sign
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Spin at `t`: `B·(-1)^{#jumps ≤ t}`.
    pub fn spin_at(&self, t: f64) -> i8 {
        let n = self.jump_times.partition_point(|&j| j <= t);
        if n.is_multiple_of(2) {
            self.initial_sign
        } else {
            -self.initial_sign
        }
    }

    /// Constant-spin segments `(start, end, spin)` covering `[0, horizon]`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, i8)> + '_ {
        let n = self.jump_times.len();
        (0..=n).map(move |i| {
            let start = if i == 0 { 0.0 } else { self.jump_times[i - 1] };
            let end = if i == n { self.horizon } else { self.jump_times[i] };
            let spin = if i % 2 == 0 {
                self.initial_sign
            } else {
                -self.initial_sign
            };
            (start, end, spin)
        })
    }

    pub fn flipped(&self) -> SpinPath {
        SpinPath {
            initial_sign: -self.initial_sign,
            ..self.clone()
        }
    }
}

/// Sample a path on `[0, horizon]` by accumulating unit exponential waiting times.
pub fn sample_path<R: Rng + ?Sized>(horizon: f64, rng: &mut R) -> Result<SpinPath> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Argument(format!("horizon must be positive, got {horizon}")));
    }
    let initial_sign = if rng.random::<bool>() { 1 } else { -1 };
    let mut jump_times = Vec::new();
    let mut t = 0.0;
    loop {
        let wait: f64 = Exp1.sample(rng);
        t += wait;
        if t >= horizon {
            break;
        }
        jump_times.push(t);
    }
    Ok(SpinPath {
        initial_sign,
        jump_times,
        horizon,
    })
}

/// `∫₀^T ∫₀^T X(t) X(s) h(t - s) dt ds` for one path.
///
/// The spin profile is a signed sum of indicators, so its distributional
/// derivative is a sum of point masses `w_a δ(τ_a)` at the path breakpoints
/// (`0`, the jumps, `T`). With `Φ'' = h` the double integral collapses to
/// `-Σ_{a,b} w_a w_b Φ(τ_a - τ_b)`, one `Φ` call per breakpoint pair.
pub fn interaction_action(path: &SpinPath, kernel: &Kernel) -> f64 {
    let jumps = &path.jump_times;
    let n = jumps.len();
    let point = |a: usize| -> f64 {
        if a == 0 {
            0.0
        } else if a == n + 1 {
            path.horizon
        } else {
            jumps[a - 1]
        }
    };
    // Weights relative to the initial sign (the action is even in B).
    let weight = |a: usize| -> f64 {
        let parity = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
        if a == 0 {
            1.0
        } else if a == n + 1 {
            // -σ_n, σ_n = (-1)^n
            if n.is_multiple_of(2) {
                -1.0
            } else {
                1.0
            }
        } else {
            2.0 * parity
        }
    };
    let mut total = 0.0;
    for b in 1..n + 2 {
        let tb = point(b);
        let wb = weight(b);
        let mut row = 0.0;
        for a in 0..b {
            row += weight(a) * kernel.phi(tb - point(a));
        }
        total += wb * row;
    }
    -2.0 * total
}

/// Monte Carlo estimate of `Z(α, T)` over `samples` independent paths.
///
/// Sample `i` uses the stream keyed by `(seed, i)`, so the estimate is
/// bit-identical for any thread count.
pub fn estimate_z(alpha: f64, horizon: f64, kernel: &Kernel, samples: u64, seed: u64) -> Result<MCEstimate> {
    if !alpha.is_finite() {
        return Err(Error::Argument(format!("alpha must be finite, got {alpha}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Argument(format!("horizon must be positive, got {horizon}")));
    }
    let m = batched_mean(samples, |i| {
        let mut r = rng::stream(seed, domain::PATH, i);
        let path = sample_path(horizon, &mut r).expect("validated horizon");
        let exponent = 0.5 * alpha * interaction_action(&path, kernel);
        if exponent > 700.0 {
            f64::INFINITY
        } else {
            exponent.exp()
        }
    })
    .map_err(|e| match e {
        Error::EstimateUnreliable(_) => Error::EstimateUnreliable(format!(
            "exp((α/2)·action) overflowed for α = {alpha}, T = {horizon}"
        )),
        other => other,
    })?;
    Ok(MCEstimate {
        value: m.mean,
        std_error: m.std_error,
        samples,
        seed,
    })
}

fn check_increasing(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Argument("need at least one time".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument(
            "times must be finite, nonnegative and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `E[X(t₁)⋯X(t_q)]` for increasing times: zero for odd `q`, otherwise
/// `exp(-2[(t₂ - t₁) + (t₄ - t₃) + ⋯])`.
pub fn moment_closed_form(times: &[f64]) -> Result<f64> {
    check_increasing(times)?;
    if times.len() % 2 == 1 {
        return Ok(0.0);
    }
    let gaps: f64 = times.chunks_exact(2).map(|c| c[1] - c[0]).sum();
    Ok((-2.0 * gaps).exp())
}

/// Monte Carlo estimate of `E[X(t₁)⋯X(t_q)]` by direct path simulation.
pub fn estimate_moment_mc(times: &[f64], samples: u64, seed: u64) -> Result<MCEstimate> {
    check_increasing(times)?;
    let last = *times.last().unwrap();
    let horizon = if last > 0.0 { last * (1.0 + 1e-12) + 1e-12 } else { 1.0 };
    let m = batched_mean(samples, |i| {
        let mut r = rng::stream(seed, domain::MOMENT, i);
        let path = sample_path(horizon, &mut r).expect("positive horizon");
        times.iter().map(|&t| path.spin_at(t) as f64).product()
    })?;
    Ok(MCEstimate {
        value: m.mean,
        std_error: m.std_error,
        samples,
        seed,
    })
}
