//! The effective pair interaction `h(s)` obtained by integrating out the
//! bosons, together with its norms, its even second antiderivative `Φ` and an
//! inverse-CDF sampler for the normalized density `h(s) / ‖h‖₁`.
//!
//! Three sources are supported:
//!
//! * `indicator`: `|f(k)|² = 1{|k| ≤ Λ}` with massless dispersion, for which
//!   `h(s) = 4π (1 - e^{-Λ|s|}(1 + Λ|s|)) / s²`;
//! * `radial_table`: a tabulated radial `|f(k)|²`, linearly interpolated and
//!   zero outside the table, with `h(s) = 4π ∫ k |f(k)|² e^{-|s|k} dk`;
//! * `h_table`: `h(|s|)` itself, linearly interpolated, constant below the
//!   first abscissa and zero beyond the last.
//!
//! `Φ` is tabulated once on a geometric grid and interpolated with quintic
//! Hermite polynomials matching `Φ`, `Φ'` and `Φ'' = h` at every node.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Fraction of `‖h‖₁` allowed in the tail beyond the last grid node.
const TAIL_FRACTION: f64 = 1e-12;
const GRID_RATIO: f64 = 1.05;
/// First nonzero grid node, in units of the kernel's natural time scale.
const GRID_START: f64 = 1e-3;
const GRID_CAP: f64 = 1e18;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `|f(k)|² = 1{|k| ≤ cutoff}` with `ω(k) = |k|`.
    #[serde(alias = "builtin_indicator")]
    Indicator { cutoff: f64 },
    /// Samples `(k, |f(k)|²)` of a radial form factor, massless dispersion.
    RadialTable { points: Vec<[f64; 2]> },
    /// Samples `(s, h(s))` for `s ≥ 0`.
    HTable { points: Vec<[f64; 2]> },
}

impl KernelSpec {
    pub fn indicator(cutoff: f64) -> Self {
        KernelSpec::Indicator { cutoff }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: KernelSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Indicator { cutoff } => {
                if !(cutoff.is_finite() && *cutoff > 0.0) {
                    return Err(Error::Config(format!(
                        "indicator cutoff must be finite and > 0, got {cutoff}"
                    )));
                }
            }
            KernelSpec::RadialTable { points } | KernelSpec::HTable { points } => {
                validate_table(points)?;
            }
        }
        Ok(())
    }
}

fn validate_table(points: &[[f64; 2]]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::Config("a table needs at least two points".into()));
    }
    for &[x, y] in points {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Config("table entries must be finite".into()));
        }
        if x < 0.0 {
            return Err(Error::Config(format!("negative abscissa {x}")));
        }
        if y < 0.0 {
            return Err(Error::Config(format!("negative value {y} at {x}")));
        }
    }
    if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
        return Err(Error::Config(
            "table abscissae must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Source {
    Indicator { cutoff: f64 },
    Radial { k: Vec<f64>, f2: Vec<f64> },
    Table { s: Vec<f64>, h: Vec<f64> },
}

/// `(1 - e^{-x}(1 + x)) / x²` for `x ≥ 0`.
fn indicator_profile(x: f64) -> f64 {
    if x < 0.5 {
        // Σ_{m≥2} (-1)^m (m-1) x^{m-2} / m!
        let mut term = 0.5; // m = 2
        let mut sum = term;
        let mut m = 2.0;
        loop {
            let next = -term * x * m / ((m + 1.0) * (m - 1.0));
            term = next;
            m += 1.0;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (-(-x).exp_m1() - x * (-x).exp()) / (x * x)
    }
}

impl Source {
    fn h(&self, s: f64) -> f64 {
        let s = s.abs();
        match self {
            Source::Indicator { cutoff } => 4.0 * PI * cutoff * cutoff * indicator_profile(cutoff * s),
            Source::Radial { k, f2 } => {
                let mut total = 0.0;
                for i in 0..k.len() - 1 {
                    let (k0, k1, y0, y1) = (k[i], k[i + 1], f2[i], f2[i + 1]);
                    if y0 == 0.0 && y1 == 0.0 {
                        continue;
                    }
                    let slope = (y1 - y0) / (k1 - k0);
                    // e^{-sk} concentrates within a few 1/s of k0 for large s
                    let breaks: Vec<f64> = [1.0, 4.0, 16.0, 64.0]
                        .iter()
                        .map(|m| k0 + m / s)
                        .filter(|b| *b < k1)
                        .collect();
                    let r = quad::integrate(
                        |kk| kk * (y0 + slope * (kk - k0)) * (-s * kk).exp(),
                        k0,
                        k1,
                        &breaks,
                        QuadOptions::rel(1e-13),
                    );
                    total += r.value;
                }
                4.0 * PI * total
            }
            Source::Table { s: xs, h } => {
                if s <= xs[0] {
                    return h[0];
                }
                let last = xs.len() - 1;
                if s >= xs[last] {
                    return 0.0;
                }
                let i = xs.partition_point(|&x| x <= s) - 1;
                let w = (s - xs[i]) / (xs[i + 1] - xs[i]);
                h[i] + w * (h[i + 1] - h[i])
            }
        }
    }
}

/// An immutable, shareable interaction kernel.
#[derive(Debug, Clone)]
pub struct Kernel {
    spec: KernelSpec,
    source: Source,
    norm_inf: f64,
    norm_l1: f64,
    tolerance: f64,
    // Φ tabulation: nodes start at 0.
    nodes: Vec<f64>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    ddphi: Vec<f64>,
}

impl Kernel {
    pub fn new(spec: KernelSpec) -> Result<Self> {
        Self::build(spec, DEFAULT_TOLERANCE)
    }

    /// Build a kernel whose derived quantities are accurate to `tol` relative.
    pub fn build(spec: KernelSpec, tol: f64) -> Result<Self> {
        spec.validate()?;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::Argument(format!("tolerance must be in (0, 1), got {tol}")));
        }
        let (source, norm_inf, norm_l1, scale, table_nodes) = match &spec {
            KernelSpec::Indicator { cutoff } => {
                let c = *cutoff;
                (
                    Source::Indicator { cutoff: c },
                    2.0 * PI * c * c,
                    8.0 * PI * c,
                    1.0 / c,
                    Vec::new(),
                )
            }
            KernelSpec::RadialTable { points } => {
                let k: Vec<f64> = points.iter().map(|p| p[0]).collect();
                let f2: Vec<f64> = points.iter().map(|p| p[1]).collect();
                // ‖h‖₁ = 8π ∫ |f|² dk and h(0) = 4π ∫ k |f|² dk, exact for
                // piecewise linear |f|².
                let mut l1 = 0.0;
                let mut first = 0.0;
                for i in 0..k.len() - 1 {
                    let dk = k[i + 1] - k[i];
                    l1 += 0.5 * dk * (f2[i] + f2[i + 1]);
                    first += dk * (k[i] * (2.0 * f2[i] + f2[i + 1]) + k[i + 1] * (f2[i] + 2.0 * f2[i + 1])) / 6.0;
                }
                let k_max = *k.last().unwrap();
                (
                    Source::Radial { k, f2 },
                    4.0 * PI * first,
                    8.0 * PI * l1,
                    1.0 / k_max,
                    Vec::new(),
                )
            }
            KernelSpec::HTable { points } => {
                let s: Vec<f64> = points.iter().map(|p| p[0]).collect();
                let h: Vec<f64> = points.iter().map(|p| p[1]).collect();
                let mut half = s[0] * h[0];
                for i in 0..s.len() - 1 {
                    half += 0.5 * (s[i + 1] - s[i]) * (h[i] + h[i + 1]);
                }
                let max = h.iter().copied().fold(0.0, f64::max);
                let nodes = s.clone();
                (Source::Table { s, h }, max, 2.0 * half, 0.0, nodes)
            }
        };
        if !norm_l1.is_finite() || !norm_inf.is_finite() {
            return Err(Error::Divergence("kernel norms are not finite".into()));
        }

        let mut kernel = Kernel {
            spec,
            source,
            norm_inf,
            norm_l1,
            tolerance: tol,
            nodes: Vec::new(),
            phi: Vec::new(),
            dphi: Vec::new(),
            ddphi: Vec::new(),
        };
        kernel.tabulate(scale, &table_nodes)?;
        Ok(kernel)
    }

    fn tabulate(&mut self, scale: f64, table_nodes: &[f64]) -> Result<()> {
        let mut nodes = vec![0.0];
        if !table_nodes.is_empty() {
            // h is piecewise linear: Φ is exactly cubic between table nodes.
            nodes.extend(table_nodes.iter().copied().filter(|&x| x > 0.0));
        }
        let half_l1 = 0.5 * self.norm_l1;
        let opts = QuadOptions::rel((self.tolerance * 1e-4).max(1e-14));

        let mut phi = vec![0.0];
        let mut dphi = vec![0.0];
        let mut ddphi = vec![self.source.h(0.0)];

        let step = |x0: f64, x1: f64, p: f64, dp: f64| -> (f64, f64) {
            let src = &self.source;
            let dh = quad::integrate(|u| src.h(u), x0, x1, &[], opts).value;
            let dm = quad::integrate(|u| (x1 - u) * src.h(u), x0, x1, &[], opts).value;
            (p + dp * (x1 - x0) + dm, dp + dh)
        };

        if table_nodes.is_empty() {
            if half_l1 == 0.0 {
                nodes.push(1.0);
                phi.push(0.0);
                dphi.push(0.0);
                ddphi.push(0.0);
            } else {
                let mut x = GRID_START * scale;
                let (mut p, mut dp) = (0.0, 0.0);
                let mut prev = 0.0;
                loop {
                    let (np, ndp) = step(prev, x, p, dp);
                    p = np;
                    dp = ndp;
                    nodes.push(x);
                    phi.push(p);
                    dphi.push(dp);
                    ddphi.push(self.source.h(x));
                    if half_l1 - dp <= TAIL_FRACTION * half_l1 {
                        break;
                    }
                    if x > GRID_CAP {
                        return Err(Error::Divergence(format!(
                            "∫h did not converge to ‖h‖₁/2 = {half_l1} by s = {x:e} (reached {dp})"
                        )));
                    }
                    prev = x;
                    x *= GRID_RATIO;
                }
            }
        } else {
            let Source::Table { s: xs, h: hs } = &self.source else {
                unreachable!("table nodes only come from h tables")
            };
            let left_limit = |x: f64| hs[xs.partition_point(|&n| n < x)];
            let (mut p, mut dp) = (0.0, 0.0);
            for w in nodes.windows(2) {
                let (np, ndp) = step(w[0], w[1], p, dp);
                p = np;
                dp = ndp;
                phi.push(p);
                dphi.push(dp);
                // Φ'' jumps to 0 past the last node; the polynomial needs the left limit.
                ddphi.push(left_limit(w[1]));
            }
            if nodes.len() == 1 {
                nodes.push(1.0);
                phi.push(0.0);
                dphi.push(0.0);
                ddphi.push(0.0);
            }
        }
        self.nodes = nodes;
        self.phi = phi;
        self.dphi = dphi;
        self.ddphi = ddphi;
        Ok(())
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// `‖h‖_∞`
    pub fn norm_inf(&self) -> f64 {
        self.norm_inf
    }

    /// `‖h‖₁`
    pub fn norm_l1(&self) -> f64 {
        self.norm_l1
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn is_zero(&self) -> bool {
        self.norm_l1 == 0.0 && self.norm_inf == 0.0
    }

    /// `h(s)`; even and nonnegative.
    #[inline]
    pub fn h(&self, s: f64) -> f64 {
        self.source.h(s)
    }

    /// Largest tabulated abscissa of `Φ`; beyond it `Φ` is continued linearly.
    pub fn grid_end(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    #[inline]
    fn segment(&self, x: f64) -> Option<usize> {
        let last = self.nodes.len() - 1;
        if x >= self.nodes[last] {
            None
        } else {
            Some(self.nodes.partition_point(|&n| n <= x) - 1)
        }
    }

    #[inline]
    fn hermite_coeffs(&self, i: usize) -> (f64, [f64; 6]) {
        let dx = self.nodes[i + 1] - self.nodes[i];
        let y0 = self.phi[i];
        let d0 = dx * self.dphi[i];
        let s0 = dx * dx * self.ddphi[i];
        let y1 = self.phi[i + 1];
        let d1 = dx * self.dphi[i + 1];
        let s1 = dx * dx * self.ddphi[i + 1];
        let a = y1 - y0 - d0 - 0.5 * s0;
        let b = d1 - d0 - s0;
        let c = s1 - s0;
        (
            dx,
            [
                y0,
                d0,
                0.5 * s0,
                10.0 * a - 4.0 * b + 0.5 * c,
                -15.0 * a + 7.0 * b - c,
                6.0 * a - 3.0 * b + 0.5 * c,
            ],
        )
    }

    /// The even second antiderivative `Φ(x) = ∫₀^{|x|} (|x| - u) h(u) du`.
    #[inline]
    pub fn phi(&self, x: f64) -> f64 {
        let x = x.abs();
        match self.segment(x) {
            Some(i) => {
                let (dx, c) = self.hermite_coeffs(i);
                let t = (x - self.nodes[i]) / dx;
                c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))))
            }
            None => {
                let last = self.nodes.len() - 1;
                self.phi[last] + self.dphi[last] * (x - self.nodes[last])
            }
        }
    }

    /// `Φ'(x) = sign(x) ∫₀^{|x|} h`.
    pub fn phi_prime(&self, x: f64) -> f64 {
        let ax = x.abs();
        let v = match self.segment(ax) {
            Some(i) => {
                let (dx, c) = self.hermite_coeffs(i);
                let t = (ax - self.nodes[i]) / dx;
                (c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])))) / dx
            }
            None => *self.dphi.last().unwrap(),
        };
        v.copysign(x)
    }

    /// `∫_a^b dt ∫_c^d ds h(t - s)`.
    pub fn rectangle_mass(&self, a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
        if a > b || c > d {
            return Err(Error::Argument(format!(
                "reversed rectangle bounds [{a}, {b}] x [{c}, {d}]"
            )));
        }
        Ok(self.rectangle_mass_unchecked(a, b, c, d))
    }

    #[inline]
    pub(crate) fn rectangle_mass_unchecked(&self, a: f64, b: f64, c: f64, d: f64) -> f64 {
        self.phi(b - c) - self.phi(a - c) - self.phi(b - d) + self.phi(a - d)
    }

    /// Draw a signed displacement with density `h(s) / ‖h‖₁`.
    pub fn sample_displacement<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        if self.norm_l1 == 0.0 {
            return Err(Error::Sampling);
        }
        let u: f64 = rng.random();
        let negative: bool = rng.random();
        let target = u * 0.5 * self.norm_l1;
        let magnitude = self.invert_half_cdf(target);
        Ok(if negative { -magnitude } else { magnitude })
    }

    /// Solve `Φ'(x) = target` for `x ≥ 0`.
    fn invert_half_cdf(&self, target: f64) -> f64 {
        let last = self.nodes.len() - 1;
        if target >= self.dphi[last] {
            return self.nodes[last];
        }
        let i = self.dphi.partition_point(|&v| v <= target).saturating_sub(1).min(last - 1);
        let (dx, c) = self.hermite_coeffs(i);
        let d1 = |t: f64| (c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])))) / dx;
        let d2 = |t: f64| (2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]))) / (dx * dx);
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut t = 0.5;
        let eps = 1e-14 * self.norm_l1;
        for _ in 0..100 {
            let g = d1(t) - target;
            if g.abs() <= eps {
                break;
            }
            if g > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let slope = d2(t) * dx;
            let newton = t - g / slope;
            t = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-16 {
                break;
            }
        }
        self.nodes[i] + t * dx
    }
}
