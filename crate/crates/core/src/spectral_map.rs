//! Background geometry: Joukowsky maps between the spectral parameter λ and
//! the uniformizing variables z (right background) and ζ (left background),
//! the two phase functions, and the four critical rays
//! ξ_cr,1 < ξ'_cr,1 < ξ'_cr < ξ_cr that split the (n, t) half-plane.
//!
//! Conventions: λ = (z + 1/z)/2 = b + a(ζ + 1/ζ) with |z| ≤ 1, |ζ| ≤ 1.
//! The square root in z(λ) = λ − √(λ²−1) behaves like +λ at infinity, so
//! z → 0 as λ → ∞ and the branch is continuous off [−1, 1].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, Pow};
use crate::Side;

/// Left background constants (a, b) plus the z-images of the left band edges.
///
/// The left band is [b−2a, b+2a]; the shock condition b + 2a < −1 puts it
/// strictly below the right band [−1, 1]. Then q = z(b−2a) and q1 = z(b+2a)
/// satisfy −1 < q1 < q < 0.
#[derive(Debug, Clone, Copy)]
pub struct BackgroundParams {
    pub a: f64,
    pub b: f64,
    pub q: f64,
    pub q1: f64,
}

impl BackgroundParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a <= 0.0 {
            return Err(Error::InvalidBackground(format!(
                "need finite a > 0, got a = {a}, b = {b}"
            )));
        }
        if b + 2.0 * a >= -1.0 {
            return Err(Error::InvalidBackground(format!(
                "shock condition b + 2a < -1 violated: b + 2a = {}",
                b + 2.0 * a
            )));
        }
        let q = z_of_lambda(Complex64::new(b - 2.0 * a, 0.0)).re;
        let q1 = z_of_lambda(Complex64::new(b + 2.0 * a, 0.0)).re;
        debug_assert!(-1.0 < q1 && q1 < q && q < 0.0);
        Ok(Self { a, b, q, q1 })
    }

    /// Left edge of the left band, λ(q) = b − 2a.
    pub fn lambda_q(&self) -> f64 {
        self.b - 2.0 * self.a
    }

    /// Right edge of the left band, λ(q1) = b + 2a.
    pub fn lambda_q1(&self) -> f64 {
        self.b + 2.0 * self.a
    }
}

/// Dimensionless velocities n/t of the four critical rays.
#[derive(Debug, Clone, Copy)]
pub struct CriticalRays {
    pub xi_cr: f64,
    pub xi_cr_prime: f64,
    pub xi_cr1_prime: f64,
    pub xi_cr1: f64,
}

/// √(λ²−1) with the branch that behaves like +λ at infinity (cut on [−1,1]).
fn sqrt_band(lam: Complex64) -> Complex64 {
    (lam - 1.0).sqrt() * (lam + 1.0).sqrt()
}

/// z(λ) = λ − √(λ²−1), the |z| ≤ 1 root of (z + 1/z)/2 = λ, computed in the
/// cancellation-free form 1/(λ + √(λ²−1)).
pub fn z_of_lambda(lam: Complex64) -> Complex64 {
    assert!(
        lam.re.is_finite() && lam.im.is_finite(),
        "z_of_lambda: non-finite λ"
    );
    1.0 / (lam + sqrt_band(lam))
}

/// λ(z) = (z + 1/z)/2.
pub fn lambda_of_z(z: Complex64) -> Complex64 {
    0.5 * (z + 1.0 / z)
}

/// ζ(λ): the |ζ| ≤ 1 root of b + a(ζ + 1/ζ) = λ.
pub fn zeta_of_lambda(lam: Complex64, p: &BackgroundParams) -> Complex64 {
    assert!(
        lam.re.is_finite() && lam.im.is_finite(),
        "zeta_of_lambda: non-finite λ"
    );
    let w = (lam - p.b) / (2.0 * p.a);
    1.0 / (w + sqrt_band(w))
}

/// ζ on the left band, evaluated from one side of the z-cut [q1, q].
///
/// For z on the open interval (q1, q), λ(z∓i0) = λ ± i0 lands on the left
/// band, where ζ is unimodular: ζ(λ+i0) = exp(−i·arccos w), w = (λ−b)/(2a).
pub fn zeta_on_band_z(z: f64, side: Side, p: &BackgroundParams) -> Complex64 {
    debug_assert!(p.q1 < z && z < p.q, "z = {z} not inside (q1, q)");
    let lam = 0.5 * (z + 1.0 / z);
    // clamp against roundoff at the band edges
    let w = ((lam - p.b) / (2.0 * p.a)).clamp(-1.0, 1.0);
    let phi = w.acos();
    match side {
        // z − i0 maps to λ + i0 because dλ/dz < 0 inside the unit disk
        Side::Plus => Complex64::from_polar(1.0, -phi),
        Side::Minus => Complex64::from_polar(1.0, phi),
    }
}

/// Right phase function Φ(z, ξ) = (z − 1/z)/2 + ξ·Log z (principal log).
///
/// Odd under z → 1/z. The combination e^{2tΦ} = z^{2n}·e^{t(z−1/z)} is
/// single-valued for integer n = tξ.
pub fn phase_right(z: Complex64, xi: f64) -> Complex64 {
    assert!(z.norm() > 0.0, "phase_right: z = 0 rejected");
    0.5 * (z - 1.0 / z) + xi * z.ln()
}

/// Left phase function Φ_ℓ(z, ξ) = a(1/ζ − ζ) − ξ·Log ζ with ζ = ζ(λ(z)).
pub fn phase_left(z: Complex64, xi: f64, p: &BackgroundParams) -> Complex64 {
    let zeta = zeta_of_lambda(lambda_of_z(z), p);
    assert!(zeta.norm() > 0.0, "phase_left: ζ = 0 rejected");
    p.a * (1.0 / zeta - zeta) - xi * zeta.ln()
}

/// The four critical rays.
///
/// ξ_cr and ξ_cr,1 have closed forms; the primed values are moment ratios of
/// Q(λ) and Q₁(λ) over [b+2a, −1], whose (λ+1)^{∓1/2} endpoint behavior is
/// absorbed by the cosine substitution.
pub fn critical_rays(p: &BackgroundParams) -> Result<CriticalRays> {
    let (a, b) = (p.a, p.b);

    let m = 2.0 * a - b;
    let xi_cr = (m * m - 1.0).sqrt() / (m + (m * m - 1.0).sqrt()).ln();

    let d1 = (1.0 - b) * (1.0 - b) - 4.0 * a * a;
    let xi_cr1 = d1.sqrt() / ((2.0 * a).ln() - (1.0 - b + d1.sqrt()).ln());

    // Q(λ)  = √((λ−b−2a) / ((λ−b+2a)(λ²−1)))  =  (λ−A)^{1/2} (B−λ)^{−1/2} u(λ)
    // Q₁(λ) = √((λ+1) / (((λ−b)²−4a²)(λ−1)))  =  (λ−A)^{−1/2} (B−λ)^{1/2} u(λ)
    // on (A, B) = (b+2a, −1), with the shared smooth factor
    // u(λ) = ((λ−b+2a)(1−λ))^{−1/2}.
    let lo = b + 2.0 * a;
    let hi = -1.0;
    let u = move |lam: f64| 1.0 / ((lam - b + 2.0 * a) * (1.0 - lam)).sqrt();
    let rtol = quad::DEFAULT_RTOL;

    let den = quad::sqrt_kernel(u, lo, hi, Pow::PlusHalf, Pow::MinusHalf, rtol, "∫Q dλ")?;
    let num = quad::sqrt_kernel(
        |lam| lam * u(lam),
        lo,
        hi,
        Pow::PlusHalf,
        Pow::MinusHalf,
        rtol,
        "∫λQ dλ",
    )?;
    let xi_cr_prime = -2.0 * a - num / den;

    let den1 = quad::sqrt_kernel(u, lo, hi, Pow::MinusHalf, Pow::PlusHalf, rtol, "∫Q₁ dλ")?;
    let num1 = quad::sqrt_kernel(
        |lam| lam * u(lam),
        lo,
        hi,
        Pow::MinusHalf,
        Pow::PlusHalf,
        rtol,
        "∫λQ₁ dλ",
    )?;
    let xi_cr1_prime = b + 1.0 - num1 / den1;

    let rays = CriticalRays {
        xi_cr,
        xi_cr_prime,
        xi_cr1_prime,
        xi_cr1,
    };
    if !(rays.xi_cr1 < rays.xi_cr1_prime
        && rays.xi_cr1_prime < rays.xi_cr_prime
        && rays.xi_cr_prime < rays.xi_cr)
    {
        return Err(Error::Branch(format!(
            "critical ray ordering violated: {rays:?}"
        )));
    }
    Ok(rays)
}
