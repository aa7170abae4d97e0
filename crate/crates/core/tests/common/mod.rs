//! Reference implementations used by the integration tests. They share no
//! code with the library: special functions are summed in big-integer
//! fixed point, kernel roots come from plain bisection and the bound from
//! a dense scan.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Fractional bits of the fixed-point representation.
pub const FRAC_BITS: u64 = 320;

fn one() -> BigInt {
    BigInt::from(1) << FRAC_BITS
}

/// Exact fixed-point image of a finite double.
pub fn to_fixed(x: f64) -> BigInt {
    assert!(x.is_finite());
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let m = BigInt::from(mant);
    let shift = e + FRAC_BITS as i64;
    let v = if shift >= 0 {
        m << shift as u64
    } else {
        m >> (-shift) as u64
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn ldexp(x: f64, k: i64) -> f64 {
    let mut r = x;
    let mut k = k;
    while k > 1000 {
        r *= 2f64.powi(1000);
        k -= 1000;
    }
    while k < -1000 {
        r *= 2f64.powi(-1000);
        k += 1000;
    }
    r * 2f64.powi(k as i32)
}

/// Nearest double (to within one rounding) of a value with `scale_bits`
/// fractional bits.
pub fn from_fixed_scaled(n: &BigInt, scale_bits: u64) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let neg = n.is_negative();
    let a = n.abs();
    let bits = a.bits();
    let shift = bits.saturating_sub(64);
    let top = (a >> shift).to_u64().expect("fits in 64 bits") as f64;
    let r = ldexp(top, shift as i64 - scale_bits as i64);
    if neg {
        -r
    } else {
        r
    }
}

pub fn from_fixed(n: &BigInt) -> f64 {
    from_fixed_scaled(n, FRAC_BITS)
}

fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> FRAC_BITS
}

/// Σ_k t_k with t_0 = 1 and t_k = t_{k-1} · q / den(k), all in fixed point.
fn ratio_series(q: &BigInt, den: impl Fn(u64) -> u64) -> BigInt {
    let mut term = one();
    let mut sum = term.clone();
    for k in 1.. {
        term = mul(&term, q) / BigInt::from(den(k));
        if term.is_zero() {
            break;
        }
        sum += &term;
    }
    sum
}

pub fn i0(x: f64) -> f64 {
    let h = to_fixed(x) >> 1u32;
    let q = mul(&h, &h);
    from_fixed(&ratio_series(&q, |k| k * k))
}

/// `I1(x) / x`.
fn i1_over_x_fixed(x: f64) -> BigInt {
    let h = to_fixed(x) >> 1u32;
    let q = mul(&h, &h);
    ratio_series(&q, |k| k * (k + 1)) >> 1u32
}

pub fn i1(x: f64) -> f64 {
    from_fixed(&mul(&i1_over_x_fixed(x), &to_fixed(x)))
}

fn cosh_fixed(x: f64) -> BigInt {
    let f = to_fixed(x);
    ratio_series(&mul(&f, &f), |k| (2 * k - 1) * (2 * k))
}

/// `sinh(x) / x`.
fn sinhc_fixed(x: f64) -> BigInt {
    let f = to_fixed(x);
    ratio_series(&mul(&f, &f), |k| (2 * k) * (2 * k + 1))
}

/// `(x cosh x - sinh x) / x³ = Σ_{j≥0} (2j+2) x^{2j} / (2j+3)!`.
fn ball_fixed(x: f64) -> BigInt {
    let f = to_fixed(x);
    let q = mul(&f, &f);
    let mut s = one() / BigInt::from(6);
    let mut sum = s.clone() * 2;
    for j in 1u64.. {
        s = mul(&s, &q) / BigInt::from((2 * j + 2) * (2 * j + 3));
        if s.is_zero() {
            break;
        }
        sum += &s * BigInt::from(2 * j + 2);
    }
    sum
}

pub fn xi(d: u8, rho: f64) -> f64 {
    match d {
        1 => 2.0 * from_fixed(&cosh_fixed(rho)),
        2 => 2.0 * PI * i0(rho),
        _ => 4.0 * PI * from_fixed(&sinhc_fixed(rho)),
    }
}

pub fn psi(d: u8, rho: f64) -> f64 {
    match d {
        1 => 2.0 * from_fixed(&sinhc_fixed(rho)),
        2 => 2.0 * PI * from_fixed(&i1_over_x_fixed(rho)),
        _ => 4.0 * PI * from_fixed(&ball_fixed(rho)),
    }
}

/// Carrier transform for `x = τ + θ`, `b = ρ v`, evaluated exactly in
/// fixed point (D3 by the arctanh power series, valid for `b/x < 1`).
pub fn y(d: u8, rho: f64, theta: f64, v: f64, tau: f64) -> f64 {
    let x = to_fixed(tau) + to_fixed(theta);
    let b = mul(&to_fixed(rho), &to_fixed(v));
    assert!(x > b, "outside the light cone");
    let s = one();
    match d {
        1 => {
            let den = (&x - &b) * (&x + &b);
            from_fixed(&((&x * &s * &s) / den))
        }
        2 => {
            let den = ((&x - &b) * (&x + &b)).sqrt();
            from_fixed(&((&s * &s) / den))
        }
        _ => {
            if b.is_zero() {
                return from_fixed(&((&s * &s) / x));
            }
            let u = (&b << FRAC_BITS) / &x;
            let u2 = mul(&u, &u);
            let mut p = u.clone();
            let mut sum = u;
            for k in 1u64.. {
                p = mul(&p, &u2);
                let t = &p / BigInt::from(2 * k + 1);
                if t.is_zero() {
                    break;
                }
                sum += t;
            }
            from_fixed(&((sum << FRAC_BITS) / b))
        }
    }
}

pub fn threshold(d: u8) -> f64 {
    match d {
        1 => 0.5,
        2 => 1.0 / PI,
        _ => 1.0 / (4.0 * PI / 3.0),
    }
}

/// Transmission-relay coupling `τ + 2 v ν Ξ / (1 - ν Ψ)`.
pub fn coupling(d: u8, nu: f64, v: f64, tau: f64, rho: f64) -> f64 {
    tau + 2.0 * v * nu * xi(d, rho) / (1.0 - nu * psi(d, rho))
}

/// Plain double-precision `1/Y` straight from the carrier formulas.
fn inv_y_direct(d: u8, x: f64, b: f64) -> f64 {
    match d {
        1 => (x - b) * (x + b) / x,
        2 => ((x - b) * (x + b)).sqrt(),
        _ => {
            if b == 0.0 {
                x
            } else {
                b / (b / x).atanh()
            }
        }
    }
}

/// Kernel root θ(ρ) by bisection of `1/Y(τ + θ) = A(ρ)` in θ.
pub fn theta_bisect(d: u8, nu: f64, v: f64, tau: f64, rho: f64) -> f64 {
    let a = coupling(d, nu, v, tau, rho);
    let b = rho * v;
    let f = |theta: f64| inv_y_direct(d, tau + theta, b) - a;
    let mut lo = (b - tau).max(0.0);
    let mut hi = lo.max(1.0);
    // NaN (at the light cone) also means "not yet bracketed".
    while f(hi).is_nan() || f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 || !f(mid).is_finite() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest ρ with `ν Ψ(ρ) = 1`, by bisection.
pub fn pole(d: u8, nu: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while nu * psi(d, hi) < 1.0 {
        hi *= 2.0;
        if hi > 700.0 {
            return 700.0;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if nu * psi(d, mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Minimum of θ(ρ)/ρ by a dense log scan followed by repeated local
/// rescans. Returns `(speed, rho)` where speed is the minimum.
pub fn speed_scan(d: u8, nu: f64, v: f64, tau: f64) -> (f64, f64) {
    let top = pole(d, nu);
    let ratio = |rho: f64| theta_bisect(d, nu, v, tau, rho) / rho;
    let (mut lo, mut hi) = ((1e-6 * top).ln(), (top * (1.0 - 1e-9)).ln());
    let mut best = (f64::INFINITY, top);
    for _ in 0..6 {
        let n = 400;
        let step = (hi - lo) / n as f64;
        let mut best_i = 0;
        for i in 0..=n {
            let rho = (lo + step * i as f64).exp();
            let r = ratio(rho);
            if r < best.0 {
                best = (r, rho);
                best_i = i;
            }
        }
        let centre = lo + step * best_i as f64;
        lo = centre - step;
        hi = (centre + step).min((top * (1.0 - 1e-9)).ln());
    }
    best
}

/// Informed set after closing `informed` over the graph linking nodes at
/// distance `<= range`, by breadth-first search.
pub fn bfs_closure(points: &[[f64; 3]], dim: usize, range: f64, informed: &[bool]) -> Vec<bool> {
    let mut out = informed.to_vec();
    let mut queue: VecDeque<usize> = (0..points.len()).filter(|&i| informed[i]).collect();
    while let Some(i) = queue.pop_front() {
        for j in 0..points.len() {
            if out[j] {
                continue;
            }
            let dist2: f64 = (0..dim)
                .map(|k| (points[i][k] - points[j][k]).powi(2))
                .sum();
            if dist2.sqrt() <= range {
                out[j] = true;
                queue.push_back(j);
            }
        }
    }
    out
}
