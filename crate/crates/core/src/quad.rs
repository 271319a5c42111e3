//! Composite Gauss–Legendre quadrature with panel doubling, plus the cosine
//! substitution s = m + r·cosθ used for integrands with square-root behavior
//! at the interval endpoints.
//!
//! No adaptive subdivision: panel counts double on a fixed schedule until two
//! successive values agree, so results are bit-reproducible across runs.

use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const GL_N: usize = 32;
const MAX_PANELS: usize = 4096;

pub const DEFAULT_RTOL: f64 = 1e-11;
const ATOL: f64 = 1e-12;

/// Nodes and weights of the 32-point Gauss–Legendre rule on [-1, 1].
fn gl32() -> &'static [(f64, f64); GL_N] {
    static CELL: OnceLock<[(f64, f64); GL_N]> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = [(0.0, 0.0); GL_N];
        let n = GL_N;
        for (k, slot) in out.iter_mut().enumerate() {
            // Newton iteration on P_n from the Chebyshev-based initial guess.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_and_deriv(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_and_deriv(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            *slot = (x, w);
        }
        out
    })
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl_sum_complex(f: &impl Fn(f64) -> Complex64, a: f64, b: f64, panels: usize) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        for &(x, w) in gl32().iter() {
            acc += w * f(mid + half * x);
        }
    }
    acc * ((b - a) / (2.0 * panels as f64))
}

fn converge_complex(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    rtol: f64,
    what: &'static str,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut panels = 1usize;
    let mut prev = gl_sum_complex(&f, a, b, panels);
    loop {
        panels *= 2;
        let cur = gl_sum_complex(&f, a, b, panels);
        let diff = (cur - prev).norm();
        if diff <= rtol * cur.norm() + ATOL {
            return Ok(cur);
        }
        if panels >= MAX_PANELS {
            return Err(Error::Quadrature {
                what,
                achieved: diff / cur.norm().max(1.0),
                requested: rtol,
            });
        }
        prev = cur;
    }
}

/// ∫_a^b f(x) dx for a smooth complex-valued integrand.
pub fn integrate_complex(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    rtol: f64,
    what: &'static str,
) -> Result<Complex64> {
    converge_complex(f, a, b, rtol, what)
}

/// ∫_a^b f(x) dx for a smooth real-valued integrand.
pub fn integrate_real(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rtol: f64,
    what: &'static str,
) -> Result<f64> {
    converge_complex(|x| Complex64::new(f(x), 0.0), a, b, rtol, what).map(|v| v.re)
}

/// ∫ f(z) dz along the straight segment from z0 to z1.
pub fn integrate_segment(
    f: impl Fn(Complex64) -> Complex64,
    z0: Complex64,
    z1: Complex64,
    rtol: f64,
    what: &'static str,
) -> Result<Complex64> {
    let d = z1 - z0;
    converge_complex(|t| f(z0 + t * d) * d, 0.0, 1.0, rtol, what)
}

/// Endpoint exponent of the cosine-substituted rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pow {
    MinusHalf,
    Zero,
    PlusHalf,
}

impl Pow {
    fn val(self) -> f64 {
        match self {
            Pow::MinusHalf => -0.5,
            Pow::Zero => 0.0,
            Pow::PlusHalf => 0.5,
        }
    }
}

/// ∫_a^b f(s)·(s−a)^pa·(b−s)^pb ds with pa, pb ∈ {−1/2, 0, 1/2}.
///
/// Substituting s = m + r·cosθ turns the kernel into
/// (2r)^(pa+pb)·2r·sin(θ/2)^(1+2pb)·cos(θ/2)^(1+2pa), analytic on [0, π],
/// so plain Gauss–Legendre panels in θ converge spectrally. `f` itself must
/// be smooth on the closed interval and is only evaluated in the interior.
pub fn sqrt_kernel(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    pa: Pow,
    pb: Pow,
    rtol: f64,
    what: &'static str,
) -> Result<f64> {
    debug_assert!(a < b, "sqrt_kernel needs a < b, got [{a}, {b}]");
    let m = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let (ea, eb) = (pa.val(), pb.val());
    let scale = 2.0 * r * (2.0 * r).powf(ea + eb);
    let g = |theta: f64| {
        let s = m + r * theta.cos();
        let half = 0.5 * theta;
        let k = half.sin().powf(1.0 + 2.0 * eb) * half.cos().powf(1.0 + 2.0 * ea);
        Complex64::new(scale * k * f(s), 0.0)
    };
    converge_complex(g, 0.0, std::f64::consts::PI, rtol, what).map(|v| v.re)
}
