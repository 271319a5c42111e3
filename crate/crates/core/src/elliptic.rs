//! Genus-1 machinery on the surface of ℛ(z) = √((z−q)(z−y)(z−1/y)(z−1/q))
//! for a fixed Whitham edge: the normalized holomorphic differential
//! dz/(Γℛ) and its periods, the Abel map A(z) = ∫_q^z dz/(Γℛ) with one-sided
//! boundary values, the Riemann theta function, the third-kind data
//! (λ_h, Λ, U), and the quasi-momentum frequency ratio.
//!
//! The branch of ℛ is the product of principal square roots, which is
//! analytic exactly off the two cuts [1/q, 1/y] ∪ [y, q] and satisfies
//! ℛ(1) > 0, ℛ(−1) < 0, ℛ(1/z) = ℛ(z)/z². The homology convention follows
//! the cut structure: the a-cycle encircles the gap [1/y, y], the b-cycle
//! the cut [y, q], so that Γ > 0 and τ ∈ iℝ₊.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gfunction::{GData, WhithamEdge};
use crate::quad::{self, Pow};
use crate::Side;

/// ℛ(z) with the branch fixed by ℛ(1) > 0 and ℛ(−1) < 0.
pub fn cal_r(z: Complex64, e: &[f64; 4]) -> Complex64 {
    (z - e[0]).sqrt() * (z - e[1]).sqrt() * (z - e[2]).sqrt() * (z - e[3]).sqrt()
}

/// One-sided boundary values on the open cuts; ℛ₋ = −ℛ₊ there.
pub fn cal_r_side(s: f64, side: Side, e: &[f64; 4]) -> Result<Complex64> {
    let v = if e[2] < s && s < e[3] {
        // right cut: ℛ(s+i0) = +i·√pos
        ((s - e[2]) * (e[3] - s) * (s - e[1]) * (s - e[0])).sqrt()
    } else if e[0] < s && s < e[1] {
        // left cut: ℛ(s+i0) = −i·√pos
        -((s - e[0]) * (e[1] - s) * (e[2] - s) * (e[3] - s)).sqrt()
    } else {
        return Err(Error::Data(format!("cal_r_side: {s} is not on an open cut")));
    };
    Ok(match side {
        Side::Minus => Complex64::new(0.0, v),
        Side::Plus => Complex64::new(0.0, -v),
    })
}

/// Everything the asymptotics need about the surface at one ξ.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceData {
    pub edge: WhithamEdge,
    /// branch points [1/q, 1/y, y, q]
    pub e: [f64; 4],
    /// a-period of dz/ℛ (positive)
    pub gamma: f64,
    /// b-period of the normalized differential, purely imaginary, Im τ > 0
    pub tau: Complex64,
    /// band period B = Im g₊(y)
    pub b_period: f64,
    /// zero of the third-kind differential, λ_h = (h + 1/h)/2
    pub lambda_h: f64,
    /// b-period Λ of the third-kind differential, purely imaginary
    pub big_lambda: Complex64,
    /// U = −2iB − ξΛ, purely imaginary
    pub u_period: Complex64,
    pub a_infinity: Complex64,
    pub a_zero: Complex64,
}

/// Γ and τ by quadrature over the gap and the cut.
pub fn surface_periods(edge: &WhithamEdge) -> Result<(f64, Complex64)> {
    let e = edge.branch_points();
    let rtol = quad::DEFAULT_RTOL;
    let gamma = 2.0
        * quad::sqrt_kernel(
            move |s| 1.0 / ((s - e[0]) * (e[3] - s)).sqrt(),
            e[1],
            e[2],
            Pow::MinusHalf,
            Pow::MinusHalf,
            rtol,
            "gamma period",
        )?;
    if gamma <= 0.0 {
        return Err(Error::Branch(format!("Γ = {gamma} must be positive")));
    }
    let k_cut = quad::sqrt_kernel(
        move |s| 1.0 / ((s - e[1]) * (s - e[0])).sqrt(),
        e[2],
        e[3],
        Pow::MinusHalf,
        Pow::MinusHalf,
        rtol,
        "tau period",
    )?;
    let tau = Complex64::new(0.0, 2.0 * k_cut / gamma);
    if tau.im <= 0.0 {
        return Err(Error::Branch(format!("Im τ = {} must be positive", tau.im)));
    }
    Ok((gamma, tau))
}

impl SurfaceData {
    pub fn build(gd: &GData) -> Result<Self> {
        let edge = gd.edge;
        let e = edge.branch_points();
        let (gamma, tau) = surface_periods(&edge)?;
        let rtol = quad::DEFAULT_RTOL;

        // λ_h from the a-normalization ∮_a (s + 1/s − 2λ_h) ds/ℛ = 0;
        // a-cycle integrals reduce to 2∫ over the gap against 1/√pos.
        let gap_weight = move |s: f64| 1.0 / ((s - e[0]) * (e[3] - s)).sqrt();
        let num = quad::sqrt_kernel(
            move |s| (s + 1.0 / s) * gap_weight(s),
            e[1],
            e[2],
            Pow::MinusHalf,
            Pow::MinusHalf,
            rtol,
            "lambda_h numerator",
        )?;
        let lambda_h = num / gamma;

        // Λ = 2∫_y^q (s + 1/s − 2λ_h) ds/ℛ_side ∈ iℝ, with the side fixed so
        // that the Abel-map identity A(∞) = A(0) − Λ/(4πi) holds
        let cut_int = quad::sqrt_kernel(
            move |s| (s + 1.0 / s - 2.0 * lambda_h) / ((s - e[1]) * (s - e[0])).sqrt(),
            e[2],
            e[3],
            Pow::MinusHalf,
            Pow::MinusHalf,
            rtol,
            "Lambda period",
        )?;
        let big_lambda = Complex64::new(0.0, 2.0 * cut_int);
        let u_period = Complex64::new(0.0, -2.0 * gd.b_period) - edge.xi * big_lambda;

        let a_zero = abel_real_right(0.0, gamma, &e)?;
        let a_one = abel_real_right(1.0, gamma, &e)?;
        let tail = quad::integrate_real(
            move |u| 1.0 / cal_r(Complex64::new(u, 0.0), &e).re,
            0.0,
            1.0,
            rtol,
            "abel tail to infinity",
        )?;
        let a_infinity = a_one + Complex64::new(tail / gamma, 0.0);

        let surface = Self {
            edge,
            e,
            gamma,
            tau,
            b_period: gd.b_period,
            lambda_h,
            big_lambda,
            u_period,
            a_infinity,
            a_zero,
        };
        surface.validate()?;
        Ok(surface)
    }

    fn validate(&self) -> Result<()> {
        if self.big_lambda.re.abs() > 1e-10 {
            return Err(Error::Branch(format!(
                "Re Λ = {} should vanish",
                self.big_lambda.re
            )));
        }
        if self.u_period.re.abs() > 1e-10 {
            return Err(Error::Branch(format!(
                "Re U = {} should vanish",
                self.u_period.re
            )));
        }
        let lhs = Complex64::new(0.0, 2.0 * self.b_period)
            + self.edge.xi * self.big_lambda
            + self.u_period;
        if lhs.norm() > 1e-12 {
            return Err(Error::Branch(format!("2iB + ξΛ + U = {lhs} should vanish")));
        }
        Ok(())
    }

    /// Abel map A(z) = ∫_q^z dz/(Γℛ) on ℂ \ [1/q, q], single-valued there.
    ///
    /// Real targets right of q integrate along the axis; complex targets go
    /// through the anchor ±i picked by the sign of Im z.
    pub fn abel(&self, z: Complex64) -> Result<Complex64> {
        let e = &self.e;
        // far field: A(z) = A(∞) − ∫_0^{1/z} du/(Γℛ(u)); the segment stays
        // inside |u| < |q|/2 where ℛ is analytic and ≈ 1
        if z.norm() > 2.0 / e[3].abs() {
            let gamma = self.gamma;
            let e_own = *e;
            let tail = quad::integrate_segment(
                move |u| 1.0 / (gamma * cal_r(u, &e_own)),
                Complex64::new(0.0, 0.0),
                1.0 / z,
                quad::DEFAULT_RTOL,
                "abel far field",
            )?;
            return Ok(self.a_infinity - tail);
        }
        if z.im == 0.0 {
            if z.re >= e[3] {
                return abel_real_right(z.re, self.gamma, e);
            }
            if z.re < e[0] {
                // A(1/q) = 1/2 plus the stretch beyond the left cut, where ℛ > 0
                let inc = quad::sqrt_kernel(
                    move |u| 1.0 / ((e[1] - u) * (e[2] - u) * (e[3] - u)).sqrt(),
                    z.re,
                    e[0],
                    Pow::Zero,
                    Pow::MinusHalf,
                    quad::DEFAULT_RTOL,
                    "abel beyond left cut",
                )?;
                return Ok(Complex64::new(0.5 - inc / self.gamma, 0.0));
            }
            return Err(Error::Data(format!(
                "abel: z = {} lies on [1/q, q]; use abel_side",
                z.re
            )));
        }
        let c = 0.5 * e[3];
        let base = abel_real_right(c, self.gamma, e)?;
        let anchor = if z.im > 0.0 {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(0.0, -1.0)
        };
        let gamma = self.gamma;
        let e_own = *e;
        let f = move |s: Complex64| 1.0 / (gamma * cal_r(s, &e_own));
        let leg1 = quad::integrate_segment(f, Complex64::new(c, 0.0), anchor, quad::DEFAULT_RTOL, "abel leg 1")?;
        let leg2 = quad::integrate_segment(f, anchor, z, quad::DEFAULT_RTOL, "abel leg 2")?;
        Ok(base + leg1 + leg2)
    }

    /// One-sided boundary values of A on [1/q, q].
    pub fn abel_side(&self, s: f64, side: Side) -> Result<Complex64> {
        let e = &self.e;
        if !(e[0] <= s && s <= e[3]) {
            return Err(Error::Data(format!("abel_side: {s} outside [1/q, q]")));
        }
        let rtol = quad::DEFAULT_RTOL;
        let gamma = self.gamma;
        let tau = self.tau;

        // right cut [y, q]: A₊(s) = −(i/Γ)∫_s^q du/√pos_cut
        if s > e[2] {
            let val = if s == e[3] {
                0.0
            } else {
                quad::sqrt_kernel(
                    move |u| 1.0 / ((u - e[2]) * (u - e[1]) * (u - e[0])).sqrt(),
                    s,
                    e[3],
                    Pow::Zero,
                    Pow::MinusHalf,
                    rtol,
                    "abel cut",
                )? / gamma
            };
            return Ok(match side {
                Side::Plus => Complex64::new(0.0, -val),
                Side::Minus => Complex64::new(0.0, val),
            });
        }

        // gap [1/y, y]: A₊(s) = −τ/2 + ρ(s), ρ real increasing leftward
        if s >= e[1] {
            let rho = self.gap_rho(s)?;
            return Ok(match side {
                Side::Plus => Complex64::new(rho, 0.0) - tau / 2.0,
                Side::Minus => Complex64::new(rho, 0.0) + tau / 2.0,
            });
        }

        // left cut [1/q, 1/y]: continue below the axis from A₊(1/y) = 1/2 − τ/2
        let val = if s == e[0] {
            quad::sqrt_kernel(
                move |u| 1.0 / ((e[2] - u) * (e[3] - u)).sqrt(),
                e[0],
                e[1],
                Pow::MinusHalf,
                Pow::MinusHalf,
                rtol,
                "abel left cut full",
            )? / gamma
        } else {
            quad::sqrt_kernel(
                move |u| 1.0 / ((u - e[0]) * (e[2] - u) * (e[3] - u)).sqrt(),
                s,
                e[1],
                Pow::Zero,
                Pow::MinusHalf,
                rtol,
                "abel left cut",
            )? / gamma
        };
        Ok(match side {
            Side::Plus => Complex64::new(0.5, 0.0) - tau / 2.0 + Complex64::new(0.0, val),
            Side::Minus => Complex64::new(0.5, 0.0) + tau / 2.0 - Complex64::new(0.0, val),
        })
    }

    /// ρ(s) = Re(A₊(s) + τ/2) on the gap: 0 at y, 1/2 at 1/y, monotone.
    ///
    /// The integral runs from whichever gap edge is closer, so the kernel
    /// always absorbs the nearby inverse square root.
    pub fn gap_rho(&self, s: f64) -> Result<f64> {
        let e = &self.e;
        if !(e[1] <= s && s <= e[2]) {
            return Err(Error::Data(format!("gap_rho: {s} outside the gap")));
        }
        if s == e[2] {
            return Ok(0.0);
        }
        if s == e[1] {
            return Ok(0.5);
        }
        let rtol = quad::DEFAULT_RTOL;
        let mid = 0.5 * (e[1] + e[2]);
        if s >= mid {
            let val = quad::sqrt_kernel(
                move |u| 1.0 / ((u - e[1]) * (u - e[0]) * (e[3] - u)).sqrt(),
                s,
                e[2],
                Pow::Zero,
                Pow::MinusHalf,
                rtol,
                "gap rho",
            )?;
            Ok(val / self.gamma)
        } else {
            let val = quad::sqrt_kernel(
                move |u| 1.0 / ((e[2] - u) * (u - e[0]) * (e[3] - u)).sqrt(),
                e[1],
                s,
                Pow::MinusHalf,
                Pow::Zero,
                rtol,
                "gap rho complement",
            )?;
            Ok(0.5 - val / self.gamma)
        }
    }

    /// Inverse of ρ on the gap by bisection.
    pub fn gap_point_for_rho(&self, rho_target: f64) -> Result<f64> {
        let e = &self.e;
        debug_assert!((0.0..=0.5).contains(&rho_target));
        let (mut lo, mut hi) = (e[1], e[2]); // ρ(lo) = 1/2, ρ(hi) = 0
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let r = self.gap_rho(mid)?;
            if r > rho_target {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo).abs() < 1e-15 * hi.abs().max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Frequency ratio of the quasi-momentum: increment over the right band
    /// [−1, 1] divided by the increment over the left band [b−2a, λ_y].
    pub fn frequency_ratio(&self) -> Result<f64> {
        let e = self.e;
        let lambda_h = self.lambda_h;
        // right band: z = e^{iθ}, ℛ(e^{iθ}) = e^{iθ}·ρ_c(θ) with ρ_c real
        let right = quad::integrate_real(
            move |th| {
                let z = Complex64::from_polar(1.0, th);
                let rho_c = (cal_r(z, &e) / z).re;
                2.0 * (th.cos() - lambda_h) / rho_c
            },
            0.0,
            std::f64::consts::PI,
            quad::DEFAULT_RTOL,
            "right band increment",
        )?;
        // left band: the cut [y, q] against 1/√pos_cut; both expressions are
        // the band increments of the same differential (λ − λ_h)dλ/√R
        let left = quad::sqrt_kernel(
            move |s| (s + 1.0 / s - 2.0 * lambda_h) / ((s - e[1]) * (s - e[0])).sqrt(),
            e[2],
            e[3],
            Pow::MinusHalf,
            Pow::MinusHalf,
            quad::DEFAULT_RTOL,
            "left band increment",
        )?;
        let r = (right / left).abs();
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::Branch(format!("frequency ratio r = {r}")));
        }
        Ok(r)
    }
}

/// A(x) for real x ≥ q along the axis, where ℛ > 0.
fn abel_real_right(x: f64, gamma: f64, e: &[f64; 4]) -> Result<Complex64> {
    debug_assert!(x >= e[3]);
    if x == e[3] {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let e_own = *e;
    let val = quad::sqrt_kernel(
        move |u| 1.0 / ((u - e_own[2]) * (u - e_own[1]) * (u - e_own[0])).sqrt(),
        e[3],
        x,
        Pow::MinusHalf,
        Pow::Zero,
        quad::DEFAULT_RTOL,
        "abel real axis",
    )?;
    Ok(Complex64::new(val / gamma, 0.0))
}

/// Riemann theta function θ(v | τ_eff) = Σ exp(πik²τ_eff + 2πikv),
/// truncated where the Gaussian tail falls below 1e−16.
#[derive(Debug, Clone, Copy)]
pub struct ThetaParams {
    pub tau_eff: Complex64,
    pub k_max: i64,
}

impl ThetaParams {
    pub fn new(tau_eff: Complex64) -> Result<Self> {
        if tau_eff.im <= 0.0 {
            return Err(Error::Data(format!(
                "theta modulus needs Im τ > 0, got {tau_eff}"
            )));
        }
        let k_max = ((16.0 * std::f64::consts::LN_10 / (std::f64::consts::PI * tau_eff.im))
            .sqrt()
            .ceil() as i64)
            + 2;
        Ok(Self { tau_eff, k_max })
    }
}

/// θ(v | τ_eff): 1-periodicity reduces Re v, and the summation window is
/// recentered at round(Im v / Im τ) so large imaginary parts stay accurate.
pub fn theta(v: Complex64, tp: &ThetaParams) -> Complex64 {
    let v_red = Complex64::new(v.re - v.re.round(), v.im);
    let kc = (v_red.im / tp.tau_eff.im).round() as i64;
    let i_pi = Complex64::new(0.0, std::f64::consts::PI);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (kc - tp.k_max)..=(kc + tp.k_max) {
        let kf = k as f64;
        acc += (i_pi * (kf * kf * tp.tau_eff + 2.0 * kf * v_red)).exp();
    }
    acc
}
