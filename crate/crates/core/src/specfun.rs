//! Special functions used by the kernel equation.
//!
//! The Laplace transforms of a unit emission vector (`xi`), of a point
//! uniform in the unit ball (`psi`) and of a constant-speed carry segment
//! (`y`) are given in closed form for dimensions 1, 2 and 3. Dimension 2
//! needs the modified Bessel functions `I_0` and `I_1`, evaluated here by
//! their power series.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest argument accepted by the hyperbolic and Bessel evaluations.
/// `exp` overflows just above 709.
pub const X_MAX: f64 = 700.0;

/// Cap on the number of series terms. At `X_MAX` the terms peak near
/// `k = 350` and fall below the stopping threshold before 1000.
const MAX_TERMS: usize = 1000;

/// Relative size of the next term at which a series is truncated.
const SERIES_EPS: f64 = 1e-16;

/// Below this radius `psi` and the `sinh(x)/x` family use Taylor series.
const SMALL_RHO: f64 = 1e-4;

/// Below this value of `rho * v` the 3-D carry transform returns its limit.
const SMALL_RHO_V: f64 = 1e-8;

/// Spatial dimension of the network domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Dim(u8);

impl Dim {
    pub const ONE: Dim = Dim(1);
    pub const TWO: Dim = Dim(2);
    pub const THREE: Dim = Dim(3);

    pub fn new(value: u8) -> Result<Self> {
        match value {
            1..=3 => Ok(Dim(value)),
            _ => Err(Error::config(format!(
                "dimension must be 1, 2 or 3, got {value}"
            ))),
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Volume of the unit ball, `V_D`: 2, π and 4π/3.
    pub fn unit_ball_volume(self) -> f64 {
        match self.0 {
            1 => 2.0,
            2 => PI,
            _ => 4.0 * PI / 3.0,
        }
    }

    /// Density `1/V_D` at and above which the speed bound is infinite.
    pub fn density_threshold(self) -> f64 {
        1.0 / self.unit_ball_volume()
    }
}

impl TryFrom<u8> for Dim {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Dim::new(value)
    }
}

impl From<Dim> for u8 {
    fn from(d: Dim) -> u8 {
        d.0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn check_arg(name: &str, x: f64) -> Result<()> {
    if !(0.0..=X_MAX).contains(&x) {
        return Err(Error::domain(format!(
            "{name} requires 0 <= x <= {X_MAX}, got {x}"
        )));
    }
    Ok(())
}

/// Sums `first * Σ_k c_k` where `c_0 = 1` and
/// `c_{k+1} = c_k * q / ((k + 1) * (k + 1 + order))`.
fn bessel_like_series(q: f64, order: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + 1.0 + order));
        sum += term;
        if term < SERIES_EPS * sum {
            break;
        }
    }
    sum
}

/// Modified Bessel function of the first kind, order 0.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check_arg("bessel_i0", x)?;
    Ok(bessel_like_series(0.25 * x * x, 0.0))
}

/// Modified Bessel function of the first kind, order 1.
pub fn bessel_i1(x: f64) -> Result<f64> {
    check_arg("bessel_i1", x)?;
    Ok(0.5 * x * bessel_like_series(0.25 * x * x, 1.0))
}

/// `I_1(x) / x`, finite at the origin where it equals 1/2.
fn bessel_i1_over_x(x: f64) -> f64 {
    0.5 * bessel_like_series(0.25 * x * x, 1.0)
}

/// `sinh(x) / x`.
fn sinhc(x: f64) -> f64 {
    if x < SMALL_RHO {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// `(x cosh x - sinh x) / x^3`, equal to 1/3 at the origin.
///
/// The closed form loses about `2 log10(1/x)` digits to cancellation, so
/// the series `Σ_{k≥1} 2k x^{2k-2} / (2k+1)!` is used below `x = 1`.
pub(crate) fn ball_profile(x: f64) -> f64 {
    if x < 1.0 {
        let x2 = x * x;
        // term_k = 2k x^{2k-2} / (2k+1)!, term_1 = 1/3
        let mut fact_part = 1.0 / 6.0; // x^{2k-2} / (2k+1)!
        let mut sum = 2.0 * fact_part;
        for k in 2..40 {
            let kf = k as f64;
            fact_part *= x2 / ((2.0 * kf) * (2.0 * kf + 1.0));
            let term = 2.0 * kf * fact_part;
            sum += term;
            if term < SERIES_EPS * sum {
                break;
            }
        }
        sum
    } else {
        (x * x.cosh() - x.sinh()) / (x * x * x)
    }
}

fn check_rho(name: &str, rho: f64) -> Result<()> {
    if !(0.0..=X_MAX).contains(&rho) {
        return Err(Error::domain(format!(
            "{name} requires 0 <= rho <= {X_MAX}, got {rho}"
        )));
    }
    Ok(())
}

/// Laplace transform of a uniformly oriented unit vector, per unit density:
/// `Ξ_D(ρ)`.
pub fn xi(d: Dim, rho: f64) -> Result<f64> {
    check_rho("xi", rho)?;
    Ok(match d.0 {
        1 => 2.0 * rho.cosh(),
        2 => 2.0 * PI * bessel_like_series(0.25 * rho * rho, 0.0),
        _ => 4.0 * PI * sinhc(rho),
    })
}

/// Laplace transform of a point uniform in the unit ball, per unit
/// density: `Ψ_D(ρ)`. `Ψ_D(0) = V_D`.
pub fn psi(d: Dim, rho: f64) -> Result<f64> {
    check_rho("psi", rho)?;
    Ok(match d.0 {
        1 => 2.0 * sinhc(rho),
        2 => 2.0 * PI * bessel_i1_over_x(rho),
        _ => 4.0 * PI * ball_profile(rho),
    })
}

fn check_carry_domain(rho: f64, theta: f64, v: f64, tau: f64, closed: bool) -> Result<(f64, f64)> {
    if !(rho >= 0.0) || !(v >= 0.0) || !(tau >= 0.0) || !theta.is_finite() {
        return Err(Error::domain(format!(
            "carry transform needs rho, v, tau >= 0 and finite theta \
             (rho={rho}, theta={theta}, v={v}, tau={tau})"
        )));
    }
    let x = tau + theta;
    let b = rho * v;
    if !(x > b || (closed && x == b && x > 0.0)) {
        return Err(Error::domain(format!(
            "carry transform requires tau + theta > rho * v, got {x} <= {b}"
        )));
    }
    Ok((x, b))
}

/// Laplace transform factor `Y_D(ρ, θ)` of a constant-speed carry segment
/// interrupted at rate `τ`.
pub fn y(d: Dim, rho: f64, theta: f64, v: f64, tau: f64) -> Result<f64> {
    let (x, b) = check_carry_domain(rho, theta, v, tau, false)?;
    Ok(match d.0 {
        1 => x / ((x - b) * (x + b)),
        2 => 1.0 / ((x - b) * (x + b)).sqrt(),
        _ => {
            if b < SMALL_RHO_V {
                1.0 / x
            } else {
                // log((x + b)/(x - b)) / (2b) == atanh(b/x) / b
                (b / x).atanh() / b
            }
        }
    })
}

/// `1 / Y_D(ρ, θ)`, the left-hand term of the kernel equation. Unlike
/// `y`, this is finite (zero) on the boundary `τ + θ = ρv`.
pub fn inv_y(d: Dim, rho: f64, theta: f64, v: f64, tau: f64) -> Result<f64> {
    let (x, b) = check_carry_domain(rho, theta, v, tau, true)?;
    if x == b {
        return Ok(0.0);
    }
    Ok(match d.0 {
        1 => (x - b) * (x + b) / x,
        2 => ((x - b) * (x + b)).sqrt(),
        _ => {
            if b < SMALL_RHO_V {
                x
            } else {
                b / (b / x).atanh()
            }
        }
    })
}
