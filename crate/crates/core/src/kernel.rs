//! The kernel equation and the propagation speed bound.
//!
//! For density `ν`, speed `v` and turn rate `τ`, the kernel set is the
//! curve of points `(ρ, θ)` with
//!
//! ```text
//! 1/Y_D(ρ, θ) = A(ρ),    A(ρ) = τ + 2vν Ξ_D(ρ) / (1 − ν Ψ_D(ρ))
//! ```
//!
//! and the speed bound is the smallest ratio `θ/ρ` along it. `A` has a
//! pole at the radius `ρ*` where `ν Ψ_D(ρ*) = 1`, so the search runs over
//! `(0, ρ*)`. For `ν ≥ 1/V_D` the pole reaches the origin and no finite
//! bound exists.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{bisect, minimize_log_grid};
use crate::specfun::{self, Dim, X_MAX};

/// Points in the coarse log-spaced scan of `θ(ρ)/ρ`.
pub const SCAN_POINTS: usize = 2000;
/// Left edge of the scan as a fraction of the pole radius.
pub const SCAN_LEFT_FRACTION: f64 = 1e-6;
/// Right edge of the scan as a fraction of the pole radius.
pub const SCAN_RIGHT_FRACTION: f64 = 1.0 - 1e-9;
/// Relative tolerance of the golden-section refinement.
pub const REFINE_REL_TOL: f64 = 1e-10;
/// Tolerance of `|K_D(ρ, θ)| / max(1, τ + θ)` for a point to count as on
/// the kernel.
pub const KERNEL_TOL: f64 = 1e-9;

/// Inputs of the analytical model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: Dim,
    /// Nodes per unit D-volume.
    pub nu: f64,
    /// Node speed.
    pub v: f64,
    /// Direction-change rate.
    pub tau: f64,
}

impl ModelParams {
    pub fn new(d: Dim, nu: f64, v: f64, tau: f64) -> Result<Self> {
        let p = ModelParams { d, nu, v, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::config(format!(
                "nu must be finite and >= 0, got {}",
                self.nu
            )));
        }
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::config(format!(
                "v must be finite and > 0, got {}",
                self.v
            )));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::config(format!(
                "tau must be finite and >= 0, got {}",
                self.tau
            )));
        }
        Ok(())
    }

    pub fn is_above_threshold(&self) -> bool {
        self.nu >= self.d.density_threshold()
    }
}

/// A `(ρ, θ)` pair: `ρ` is an inverse distance, `θ` an inverse time.
///
/// `theta_lo` is a low-order correction (`θ = theta + theta_lo` exactly)
/// that is non-zero only for 3-D points pressed against the light cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub rho: f64,
    pub theta: f64,
    #[serde(default)]
    pub theta_lo: f64,
}

impl KernelPoint {
    pub fn new(rho: f64, theta: f64) -> Self {
        KernelPoint {
            rho,
            theta,
            theta_lo: 0.0,
        }
    }

    pub fn ratio(&self) -> f64 {
        (self.theta + self.theta_lo) / self.rho
    }

    pub fn is_on_kernel(&self, params: &ModelParams) -> Result<bool> {
        let res = kernel_residual(params, *self)?;
        Ok(res.abs() < KERNEL_TOL * (params.tau + self.theta).max(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Finite,
    /// `ν ≥ 1/V_D`.
    Unbounded,
    /// `ν = 0` with `τ > 0`: `θ/ρ → 0` as `ρ → 0`, so the bound is a
    /// zero speed, attained only in the limit.
    DegenerateZeroDensity,
}

impl BoundStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundStatus::Finite => "finite",
            BoundStatus::Unbounded => "unbounded",
            BoundStatus::DegenerateZeroDensity => "degenerate_zero_density",
        }
    }
}

/// Result of minimizing `θ/ρ` over the kernel set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedBound {
    pub status: BoundStatus,
    /// `θ₀/ρ₀` when finite; `+inf` when unbounded; 0 for the degenerate case.
    pub speed: f64,
    /// `1/speed`; 0 when unbounded, `+inf` for the degenerate case.
    pub slowness: f64,
    /// Minimizer on the kernel. `None` when the infimum is only reached
    /// in a limit (`ν = 0`) or no bound exists.
    pub argmin: Option<KernelPoint>,
}

impl SpeedBound {
    fn unbounded() -> Self {
        SpeedBound {
            status: BoundStatus::Unbounded,
            speed: f64::INFINITY,
            slowness: 0.0,
            argmin: None,
        }
    }

    fn finite(speed: f64, argmin: Option<KernelPoint>) -> Self {
        SpeedBound {
            status: BoundStatus::Finite,
            speed,
            slowness: 1.0 / speed,
            argmin,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.status == BoundStatus::Finite
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= X_MAX) {
        return Err(Error::domain(format!(
            "rho must lie in (0, {X_MAX}], got {rho}"
        )));
    }
    Ok(())
}

/// Relay part of the coupling, `A(ρ) − τ = 2vν Ξ_D(ρ) / (1 − ν Ψ_D(ρ))`.
fn relay_term(params: &ModelParams, rho: f64) -> Result<f64> {
    if params.nu == 0.0 {
        return Ok(0.0);
    }
    let denom = 1.0 - params.nu * specfun::psi(params.d, rho)?;
    if !(denom > 0.0) {
        return Err(Error::domain(format!(
            "rho = {rho} is beyond the kernel pole (1 - nu*Psi = {denom})"
        )));
    }
    Ok(2.0 * params.v * params.nu * specfun::xi(params.d, rho)? / denom)
}

/// `A(ρ) = τ + 2vν Ξ_D(ρ) / (1 − ν Ψ_D(ρ))`, so that the kernel reads
/// `1/Y_D(ρ, θ) = A(ρ)`. `ρ = 0` is accepted and gives the limit.
pub fn coupling(params: &ModelParams, rho: f64) -> Result<f64> {
    if !(0.0..=X_MAX).contains(&rho) {
        return Err(Error::domain(format!(
            "rho must lie in [0, {X_MAX}], got {rho}"
        )));
    }
    if params.is_above_threshold() {
        return Err(threshold_error(params));
    }
    Ok(params.tau + relay_term(params, rho)?)
}

fn threshold_error(params: &ModelParams) -> Error {
    Error::ThresholdExceeded {
        nu: params.nu,
        threshold: params.d.density_threshold(),
    }
}

/// Radius `ρ*` of the pole of `A`, where `ν Ψ_D(ρ*) = 1`.
///
/// Returns `+inf` for `ν = 0`. When the pole lies beyond the overflow
/// guard (only for `ν` below about `1e-300`) the guard `X_MAX` is returned.
pub fn pole_rho(params: &ModelParams) -> Result<f64> {
    if params.is_above_threshold() {
        return Err(threshold_error(params));
    }
    if params.nu == 0.0 {
        return Ok(f64::INFINITY);
    }
    let excess = |rho: f64| params.nu * specfun::psi(params.d, rho).unwrap_or(f64::INFINITY) - 1.0;
    let mut hi = 1.0_f64;
    while excess(hi) < 0.0 {
        if hi >= X_MAX {
            return Ok(X_MAX);
        }
        hi = (2.0 * hi).min(X_MAX);
    }
    Ok(bisect(excess, 0.0, hi, 1e-13))
}

/// Error-free sum: `a + b == s + e` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `u coth u − 1`, accurate for small `u`.
fn ucoth_minus_one(u: f64) -> f64 {
    if u < 1e-150 {
        return 0.0;
    }
    u * u * u * specfun::ball_profile(u) / u.sinh()
}

/// Kernel point for `D = 3`, where the inversion is `τ + θ = ρv coth(ρv/A)`.
///
/// Once `ρv/A` is large the root sits within `2ρv e^{-2ρv/A}` of the light
/// cone `τ + θ = ρv`; there `θ` is carried as `(ρv − τ) + gap` in two
/// words so the gap keeps its relative precision.
fn kernel_point3(rho: f64, v: f64, tau: f64, r: f64) -> KernelPoint {
    let a = tau + r;
    let b = rho * v;
    if b < 1e-8 {
        return KernelPoint::new(rho, r);
    }
    let u = b / a;
    if u < 1.0 {
        return KernelPoint::new(rho, r + a * ucoth_minus_one(u));
    }
    let decay = (-2.0 * u).exp();
    let gap = 2.0 * b * decay / -(-2.0 * u).exp_m1();
    let b_lo = rho.mul_add(v, -b);
    let (hi1, e1) = two_sum(b, -tau);
    let (hi, e2) = two_sum(hi1, gap);
    let lo = e1 + e2 + b_lo;
    let (theta, theta_lo) = two_sum(hi, lo);
    KernelPoint {
        rho,
        theta,
        theta_lo,
    }
}

/// Point `(ρ, θ(ρ))` on the kernel, for `0 < ρ < ρ*`, validated against
/// [`kernel_residual`].
pub fn solve_kernel_point(params: &ModelParams, rho: f64) -> Result<KernelPoint> {
    check_rho(rho)?;
    if params.is_above_threshold() {
        return Err(threshold_error(params));
    }
    let r = relay_term(params, rho)?;
    let (v, tau) = (params.v, params.tau);
    let b = rho * v;
    let a = tau + r;

    // Written so that no difference of nearly equal terms appears when
    // θ is small compared with τ.
    let point = match params.d.get() {
        1 => {
            let s = (a * a + 4.0 * b * b).sqrt();
            let theta = if tau >= r {
                2.0 * (r * tau + b * b) / (s + tau - r)
            } else {
                0.5 * (r - tau + s)
            };
            KernelPoint::new(rho, theta)
        }
        2 => {
            let s = (a * a + b * b).sqrt();
            KernelPoint::new(rho, (r * (r + 2.0 * tau) + b * b) / (s + tau))
        }
        _ => kernel_point3(rho, v, tau, r),
    };

    if !point.is_on_kernel(params)? {
        return Err(Error::domain(format!(
            "kernel root at rho = {rho} failed validation (residual {})",
            kernel_residual(params, point)?
        )));
    }
    Ok(point)
}

/// The unique `θ > 0` with `(ρ, θ)` on the kernel, for `0 < ρ < ρ*`.
pub fn theta_of_rho(params: &ModelParams, rho: f64) -> Result<f64> {
    Ok(solve_kernel_point(params, rho)?.theta)
}

/// `K_D(ρ, θ) = 1/Y_D(ρ, θ) − A(ρ)`; zero on the kernel.
///
/// `1/Y_D` is evaluated from the light-cone gap `τ + θ − ρv`, formed
/// without rounding error, so the residual stays meaningful where the
/// kernel approaches `τ + θ = ρv`.
pub fn kernel_residual(params: &ModelParams, p: KernelPoint) -> Result<f64> {
    check_rho(p.rho)?;
    if !p.theta.is_finite() {
        return Err(Error::domain(format!(
            "theta must be finite, got {}",
            p.theta
        )));
    }
    let (v, tau) = (params.v, params.tau);
    let b = p.rho * v;
    let b_lo = p.rho.mul_add(v, -b);
    let (s, e) = two_sum(tau, p.theta);
    let gap = (s - b) + (e + p.theta_lo - b_lo);
    if gap < 0.0 {
        return Err(Error::domain(format!(
            "carry transform requires tau + theta > rho * v (gap {gap})"
        )));
    }
    let inv_y = match params.d.get() {
        1 => gap * (2.0 * b + gap) / (b + gap),
        2 => (gap * (2.0 * b + gap)).sqrt(),
        _ => {
            if b < 1e-8 {
                b + gap
            } else if gap == 0.0 {
                0.0
            } else {
                2.0 * b / (2.0 * b / gap).ln_1p()
            }
        }
    };
    Ok(inv_y - coupling(params, p.rho)?)
}

fn search_interval(params: &ModelParams) -> Result<(f64, f64)> {
    let pole = pole_rho(params)?;
    Ok((SCAN_LEFT_FRACTION * pole, SCAN_RIGHT_FRACTION * pole))
}

/// Upper bound on the information propagation speed: `min θ/ρ` over the
/// kernel set.
pub fn speed_bound(params: &ModelParams) -> Result<SpeedBound> {
    params.validate()?;
    if params.is_above_threshold() {
        return Ok(SpeedBound::unbounded());
    }
    if params.nu == 0.0 {
        // θ(ρ)/ρ = v exactly when τ = 0, and tends to 0 as ρ → 0 when τ > 0.
        return Ok(if params.tau == 0.0 {
            SpeedBound::finite(params.v, None)
        } else {
            SpeedBound {
                status: BoundStatus::DegenerateZeroDensity,
                speed: 0.0,
                slowness: f64::INFINITY,
                argmin: None,
            }
        });
    }

    let (lo, hi) = search_interval(params)?;
    let objective = |rho: f64| match theta_of_rho(params, rho) {
        Ok(theta) => theta / rho,
        Err(_) => f64::INFINITY,
    };
    let (rho, _) = minimize_log_grid(objective, lo, hi, SCAN_POINTS, REFINE_REL_TOL)
        .ok_or_else(|| Error::domain("no admissible point on the kernel"))?;
    let argmin = solve_kernel_point(params, rho)?;
    Ok(SpeedBound::finite(argmin.ratio(), Some(argmin)))
}

/// Speed bounds along a density grid, evaluated in parallel.
pub fn sweep(d: Dim, v: f64, tau: f64, nu_grid: &[f64]) -> Result<Vec<(f64, SpeedBound)>> {
    nu_grid
        .par_iter()
        .map(|&nu| {
            let params = ModelParams::new(d, nu, v, tau)?;
            Ok((nu, speed_bound(&params)?))
        })
        .collect()
}

/// Slowness (`1/speed`) along a density grid; 0 where the bound is
/// unbounded.
pub fn slowness_sweep(d: Dim, v: f64, tau: f64, nu_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    Ok(sweep(d, v, tau, nu_grid)?
        .into_iter()
        .map(|(nu, b)| (nu, b.slowness))
        .collect())
}

fn require_planar(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if params.d != Dim::TWO {
        return Err(Error::config("the sparse asymptotics are for D = 2"));
    }
    if params.is_above_threshold() {
        return Err(threshold_error(params));
    }
    Ok(())
}

/// Sparse random-walk asymptote `v √(2ν H(0)/τ)` with
/// `H(0) = 4πv / (1 − πν)`.
pub fn asymptotic_speed_random_walk(params: &ModelParams) -> Result<f64> {
    require_planar(params)?;
    if !(params.tau > 0.0) {
        return Err(Error::config("random-walk asymptote needs tau > 0"));
    }
    let h0 = 4.0 * PI * params.v / (1.0 - PI * params.nu);
    Ok(params.v * (2.0 * params.nu * h0 / params.tau).sqrt())
}

/// `H₁(ρ) = 4πν I₀(ρ) / (1 − πν (2/ρ) I₁(ρ))`.
fn billiard_coupling(nu: f64, rho: f64) -> Result<f64> {
    let denom = 1.0 - PI * nu * 2.0 * specfun::bessel_i1(rho)? / rho;
    if !(denom > 0.0) {
        return Err(Error::domain("beyond kernel pole"));
    }
    Ok(4.0 * PI * nu * specfun::bessel_i0(rho)? / denom)
}

/// Billiard (`τ = 0`) speed bound in the form `v √(1 + (H₁(ρ₀)/ρ₀)²)`,
/// with `ρ₀` minimizing `H₁(ρ)/ρ`.
pub fn asymptotic_speed_billiard(params: &ModelParams) -> Result<f64> {
    require_planar(params)?;
    if params.tau != 0.0 {
        return Err(Error::config("billiard form needs tau = 0"));
    }
    if params.nu == 0.0 {
        return Ok(params.v);
    }
    let (lo, hi) = search_interval(params)?;
    let objective = |rho: f64| billiard_coupling(params.nu, rho).map_or(f64::INFINITY, |h| h / rho);
    let (_, ratio) = minimize_log_grid(objective, lo, hi, SCAN_POINTS, REFINE_REL_TOL)
        .ok_or_else(|| Error::domain("no admissible point for H1(rho)/rho"))?;
    Ok(params.v * (1.0 + ratio * ratio).sqrt())
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(d: Dim, nu: f64, v: f64, tau: f64) -> ModelParams {
        ModelParams::new(d, nu, v, tau).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(Dim::TWO, -0.1, 1.0, 0.0).is_err());
        assert!(ModelParams::new(Dim::TWO, 0.1, 0.0, 0.0).is_err());
        assert!(ModelParams::new(Dim::TWO, 0.1, 1.0, -1.0).is_err());
        assert!(ModelParams::new(Dim::TWO, f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn coupling_examples() {
        assert_eq!(coupling(&p(Dim::TWO, 0.0, 1.0, 0.1), 1.0).unwrap(), 0.1);
        // 2·0.05·2π·I0(1) / (1 − 0.05·2π·I1(1))
        let expected = 0.1 * 2.0 * PI * 1.2660658777520082 / (1.0 - 0.1 * PI * 0.5651591039924851);
        assert_relative_eq!(
            coupling(&p(Dim::TWO, 0.05, 1.0, 0.0), 1.0).unwrap(),
            expected,
            max_relative = 1e-13
        );
        assert_relative_eq!(expected, 0.967223079872538668, max_relative = 1e-14);
        assert_relative_eq!(
            coupling(&p(Dim::ONE, 0.1, 1.0, 0.0), 0.0).unwrap(),
            0.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn coupling_beyond_pole_errors() {
        let params = p(Dim::TWO, 0.1, 1.0, 0.0);
        let pole = pole_rho(&params).unwrap();
        assert!(coupling(&params, pole * 1.01).is_err());
        assert!(theta_of_rho(&params, pole * 1.01).is_err());
    }

    #[test]
    fn pole_rho_edge_cases() {
        assert_eq!(
            pole_rho(&p(Dim::TWO, 0.0, 1.0, 0.0)).unwrap(),
            f64::INFINITY
        );
        assert!(matches!(
            pole_rho(&p(Dim::TWO, 1.0 / PI, 1.0, 0.0)),
            Err(Error::ThresholdExceeded { .. })
        ));
        let near = pole_rho(&p(Dim::TWO, 1.0 / PI - 1e-9, 1.0, 0.0)).unwrap();
        assert!(near > 0.0 && near < 1e-3);
    }

    #[test]
    fn theta_without_relays_is_pure_motion() {
        assert_relative_eq!(
            theta_of_rho(&p(Dim::TWO, 0.0, 1.0, 0.0), 2.0).unwrap(),
            2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn theta_2d_example() {
        let params = p(Dim::TWO, 0.05, 1.0, 0.0);
        let a = coupling(&params, 1.0).unwrap();
        let theta = theta_of_rho(&params, 1.0).unwrap();
        assert_relative_eq!(theta, (a * a + 1.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(theta, 1.391229846660184083, max_relative = 1e-14);
    }

    #[test]
    fn residual_examples() {
        let k = |d, nu, tau, rho, theta| {
            kernel_residual(&p(d, nu, 1.0, tau), KernelPoint::new(rho, theta)).unwrap()
        };
        assert_relative_eq!(
            k(Dim::TWO, 0.0, 0.0, 1.0, 2.0),
            3f64.sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(k(Dim::ONE, 0.0, 1.0, 1.0, 1.0), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn theta_roots_have_small_residual() {
        for d in [Dim::ONE, Dim::TWO, Dim::THREE] {
            for &(nu_frac, tau) in &[(0.01, 0.0), (0.3, 0.1), (0.9, 2.0)] {
                let params = p(d, nu_frac * d.density_threshold(), 1.3, tau);
                let pole = pole_rho(&params).unwrap();
                for i in 1..50 {
                    let rho = pole * i as f64 / 50.0;
                    let point = solve_kernel_point(&params, rho).unwrap();
                    assert!(point.theta > 0.0);
                    assert!(point.is_on_kernel(&params).unwrap());
                }
            }
        }
    }

    #[test]
    fn theta3_small_density_random_walk() {
        // θ ≪ τ: the stable forms must still resolve θ to full precision.
        let params = p(Dim::THREE, 1e-6, 1.0, 0.1);
        let rho = 1e-3;
        let theta = theta_of_rho(&params, rho).unwrap();
        let direct = KernelPoint::new(rho, theta);
        assert!(direct.is_on_kernel(&params).unwrap());
        assert!(theta > 0.0 && theta < 1e-3);
    }

    #[test]
    fn speed_bound_threshold_and_degenerate() {
        assert_eq!(
            speed_bound(&p(Dim::TWO, 0.5, 1.0, 0.0)).unwrap().status,
            BoundStatus::Unbounded
        );
        let zero = speed_bound(&p(Dim::TWO, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(zero.status, BoundStatus::Finite);
        assert_eq!(zero.speed, 1.0);
        assert!(zero.argmin.is_none());
        let walk = speed_bound(&p(Dim::TWO, 0.0, 1.0, 0.1)).unwrap();
        assert_eq!(walk.status, BoundStatus::DegenerateZeroDensity);
        assert_eq!(walk.speed, 0.0);
    }

    #[test]
    fn speed_bound_speed_equals_argmin_ratio() {
        let b = speed_bound(&p(Dim::TWO, 0.1, 1.0, 0.1)).unwrap();
        let argmin = b.argmin.unwrap();
        assert_relative_eq!(b.speed, argmin.theta / argmin.rho, max_relative = 1e-12);
        assert_relative_eq!(b.slowness * b.speed, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn sparse_billiard_close_to_node_speed() {
        let s = speed_bound(&p(Dim::TWO, 1e-4, 1.0, 0.0)).unwrap().speed;
        assert!((1.0..=1.0 + 1e-4).contains(&s), "{s}");
    }

    #[test]
    fn asymptotic_forms() {
        assert_eq!(
            asymptotic_speed_random_walk(&p(Dim::TWO, 0.0, 1.0, 0.1)).unwrap(),
            0.0
        );
        let one = asymptotic_speed_random_walk(&p(Dim::TWO, 1e-4, 1.0, 0.1)).unwrap();
        let expected = (2e-4 * 4.0 * PI / (1.0 - PI * 1e-4) / 0.1).sqrt();
        assert_relative_eq!(one, expected, max_relative = 1e-15);
        assert_relative_eq!(one, 0.15857, max_relative = 1e-4);
        let two = asymptotic_speed_random_walk(&p(Dim::TWO, 1e-4, 2.0, 0.1)).unwrap();
        assert_relative_eq!(two, 2.0 * 2f64.sqrt() * one, max_relative = 1e-14);

        assert_eq!(
            asymptotic_speed_billiard(&p(Dim::TWO, 0.0, 1.0, 0.0)).unwrap(),
            1.0
        );
        let b = asymptotic_speed_billiard(&p(Dim::TWO, 1e-3, 1.0, 0.0)).unwrap();
        assert!(b > 1.0 && b - 1.0 < 1e-4);

        assert!(asymptotic_speed_random_walk(&p(Dim::TWO, 1e-4, 1.0, 0.0)).is_err());
        assert!(asymptotic_speed_billiard(&p(Dim::TWO, 1e-4, 1.0, 0.1)).is_err());
        assert!(asymptotic_speed_billiard(&p(Dim::ONE, 1e-4, 1.0, 0.0)).is_err());
    }

    #[test]
    fn slowness_sweep_zero_at_threshold() {
        let rows = slowness_sweep(Dim::TWO, 1.0, 0.1, &[1e-3, 1.0 / PI]).unwrap();
        assert!(rows[0].1 > 0.0);
        assert_eq!(rows[1].1, 0.0);
    }
}
