//! The ξ-dependent g-function: the Whitham edge y(ξ) from the vanishing
//! moment condition, Q(z) and P(s), g(z) by quadrature along cut-avoiding
//! polylines, the band period B, and sign diagnostics for Re g.
//!
//! Branch bookkeeping. With e1 = 1/q < e2 = 1/y < e3 = y < e4 = q all
//! negative, ℛ(z) = √Π(z−e_k) (product of principal square roots) is analytic
//! off the two cuts (e1, e2) ∪ (e3, e4), positive on (q, ∞), negative on the
//! gap (e2, e3), with ℛ(s+i0) = +i√|ℛ²| on (e3, e4) and −i√|ℛ²| on (e1, e2).
//! Then Q(z) = (z−y)(z−1/y)/ℛ(z) is the even square root with Q > 0 on
//! (q, ∞), and everything on the real line reduces to integrals with
//! (s−A)^{±1/2}(B−s)^{±1/2} kernels handled by the cosine substitution.
//!
//! g itself carries a ξ·log branch at the origin (residue ξ of ½PQ/s), the
//! same one the phase Φ has. Off the real axis g is evaluated along
//! 1 → ±i → z, which places that branch on the negative real axis like the
//! principal logarithm; boundary values on the cuts and the gap are anchored
//! at g(−1 ± i0) and marched with side-tagged integrands.

use num_complex::Complex64;

use crate::elliptic::cal_r;
use crate::error::{Error, Result};
use crate::quad::{self, Pow};
use crate::spectral_map::{critical_rays, BackgroundParams};
use crate::Side;

/// Moving spectral edge of the modulation zone at velocity ξ.
#[derive(Debug, Clone, Copy)]
pub struct WhithamEdge {
    pub params: BackgroundParams,
    pub xi: f64,
    pub y: f64,
    pub lambda_y: f64,
}

impl WhithamEdge {
    /// Branch points in ascending order: [1/q, 1/y, y, q].
    pub fn branch_points(&self) -> [f64; 4] {
        [
            1.0 / self.params.q,
            1.0 / self.y,
            self.y,
            self.params.q,
        ]
    }

    /// P(s) = s + 1/s + 2ξ + (λ_y − λ_q).
    pub fn p_factor(&self, s: f64) -> f64 {
        s + 1.0 / s + 2.0 * self.xi + self.lambda_y - self.params.lambda_q()
    }

    fn p_factor_c(&self, s: Complex64) -> Complex64 {
        s + 1.0 / s + 2.0 * self.xi + self.lambda_y - self.params.lambda_q()
    }
}

/// Edge plus the band period B = Im g₊(y) > 0.
#[derive(Debug, Clone, Copy)]
pub struct GData {
    pub edge: WhithamEdge,
    pub b_period: f64,
}

/// Q(z) = √(((z−y)(z−1/y)) / ((z−q)(z−1/q))): even under z ↦ 1/z, positive
/// on (q, +∞), cuts on [q, y] ∪ [1/y, 1/q].
pub fn q_factor(z: Complex64, edge: &WhithamEdge) -> Result<Complex64> {
    let e = edge.branch_points();
    if z.im == 0.0 && on_open_cut(z.re, &e) {
        return Err(Error::Data(format!(
            "q_factor: z = {} lies on an open cut; use q_factor_boundary with a side tag",
            z.re
        )));
    }
    Ok((z - e[2]) * (z - e[1]) / cal_r(z, &e))
}

fn on_open_cut(s: f64, e: &[f64; 4]) -> bool {
    (e[0] < s && s < e[1]) || (e[2] < s && s < e[3])
}

/// Boundary values Q(s ∓ i0) on the open cuts (Plus side is below).
pub fn q_factor_boundary(s: f64, side: Side, edge: &WhithamEdge) -> Result<Complex64> {
    let e = edge.branch_points();
    if !on_open_cut(s, &e) {
        return Err(Error::Data(format!("q_factor_boundary: {s} is not on a cut")));
    }
    let v = if s > e[2] {
        // right cut (y, q): Q₊ = +i √((s−y)(s−1/y) / ((q−s)(s−1/q)))
        ((s - e[2]) * (s - e[1]) / ((e[3] - s) * (s - e[0]))).sqrt()
    } else {
        // left cut (1/q, 1/y): Q₊ = −i √((y−s)(1/y−s) / ((s−1/q)(q−s)))
        -((e[2] - s) * (e[1] - s) / ((s - e[0]) * (e[3] - s))).sqrt()
    };
    let q_plus = Complex64::new(0.0, v);
    Ok(match side {
        Side::Plus => q_plus,
        Side::Minus => -q_plus,
    })
}

/// Moment condition M(y) = ∫_{−1}^{y} P(s) Q(s) ds/s whose root defines y(ξ).
pub fn whitham_moment(y: f64, xi: f64, p: &BackgroundParams) -> Result<f64> {
    let trial = WhithamEdge {
        params: *p,
        xi,
        y,
        lambda_y: 0.5 * (y + 1.0 / y),
    };
    let e = trial.branch_points();
    // On the gap Q = √((y−s)(s−1/y)) / √((s−1/q)(q−s)) ≥ 0.
    let f = move |s: f64| {
        trial.p_factor(s) * (s - e[1]).sqrt() / (s * ((s - e[0]) * (e[3] - s)).sqrt())
    };
    quad::sqrt_kernel(f, -1.0, e[2], Pow::Zero, Pow::PlusHalf, quad::DEFAULT_RTOL, "whitham moment")
}

/// Solve the moment condition for y ∈ (q1, q).
///
/// The admissible window is [ξ'_cr + eps, ξ_cr − eps]; uniqueness of the root
/// is guaranteed unique, so multiple sign changes abort instead of picking one.
pub fn solve_whitham_edge(xi: f64, p: &BackgroundParams, eps: f64) -> Result<WhithamEdge> {
    let rays = critical_rays(p)?;
    let (lo, hi) = (rays.xi_cr_prime + eps, rays.xi_cr - eps);
    if !(xi >= lo && xi <= hi) {
        return Err(Error::XiOutOfRange { xi, lo, hi });
    }

    // bracket on 64 Chebyshev nodes of (q1, q)
    let (mut ya, mut yb) = (f64::NAN, f64::NAN);
    let mut prev: Option<(f64, f64)> = None;
    let mut brackets = 0;
    let n = 64;
    for k in 0..n {
        let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
        let y = 0.5 * (p.q1 + p.q) - 0.5 * (p.q - p.q1) * theta.cos();
        let m = whitham_moment(y, xi, p)?;
        if let Some((y0, m0)) = prev {
            if m0 == 0.0 || m0 * m < 0.0 {
                ya = y0;
                yb = y;
                brackets += 1;
            }
        }
        prev = Some((y, m));
    }
    if brackets == 0 {
        return Err(Error::Bracket(format!(
            "no sign change of the Whitham moment for xi = {xi}"
        )));
    }
    if brackets > 1 {
        return Err(Error::Bracket(format!(
            "moment condition has {brackets} sign changes for xi = {xi}; expected a unique root"
        )));
    }

    let mut ma = whitham_moment(ya, xi, p)?;
    for _ in 0..200 {
        let ym = 0.5 * (ya + yb);
        let mm = whitham_moment(ym, xi, p)?;
        if ma * mm <= 0.0 {
            yb = ym;
        } else {
            ya = ym;
            ma = mm;
        }
        if (yb - ya).abs() < 1e-15 * ya.abs() {
            break;
        }
    }
    let y = 0.5 * (ya + yb);
    let residual = whitham_moment(y, xi, p)?;
    if residual.abs() > 1e-10 {
        return Err(Error::Bracket(format!(
            "Whitham edge residual {residual:e} exceeds 1e-10 at xi = {xi}"
        )));
    }
    Ok(WhithamEdge {
        params: *p,
        xi,
        y,
        lambda_y: 0.5 * (y + 1.0 / y),
    })
}

/// Band period B > 0, half the constant imaginary jump of g across the gap:
/// g₊(y) = +iB in the normalization with g(q) = 0. Equals
/// (1/2)|∫_q^y P Q_side ds/s| = (1/2)∫_y^q P(s)|Q(s)| ds/s on this data.
pub fn band_period(edge: &WhithamEdge) -> Result<f64> {
    let e = edge.branch_points();
    let f = move |s: f64| edge.p_factor(s) * (s - e[1]).sqrt() / (s * (s - e[0]).sqrt());
    let raw = quad::sqrt_kernel(
        f,
        e[2],
        e[3],
        Pow::PlusHalf,
        Pow::MinusHalf,
        quad::DEFAULT_RTOL,
        "band period",
    )?;
    let b = 0.5 * raw;
    if b <= 0.0 {
        return Err(Error::Branch(format!("band period B = {b} must be positive")));
    }
    Ok(b)
}

impl GData {
    pub fn new(edge: WhithamEdge) -> Result<Self> {
        let b_period = band_period(&edge)?;
        Ok(Self { edge, b_period })
    }
}

/// g(z) = (1/2)∫_1^z P(s)Q(s) ds/s along 1 → ±i → z (anchor picked by the
/// sign of Im z), off the real axis and away from the cuts.
pub fn g_eval(z: Complex64, gd: &GData) -> Result<Complex64> {
    let edge = &gd.edge;
    let e = edge.branch_points();
    if z.im == 0.0 {
        if on_open_cut(z.re, &e) || (e[1] < z.re && z.re < e[2]) {
            return Err(Error::Data(format!(
                "g_eval: z = {} lies on [1/q, q]; use g_boundary",
                z.re
            )));
        }
        if z.re <= 0.0 && !(z.re < e[0]) {
            // the only remaining real points in (e4, 0]: evaluate on the
            // principal-branch side via the lower anchor for continuity with
            // the Log z convention of the phase
            return g_real_right_of_q(z.re, gd);
        }
    }
    let integrand = |s: Complex64| 0.5 * edge.p_factor_c(s) * q_complex(s, &e) / s;
    let one = Complex64::new(1.0, 0.0);
    if z.im == 0.0 && z.re > 0.0 {
        return quad::integrate_segment(integrand, one, z, quad::DEFAULT_RTOL, "g real leg");
    }
    let anchor = if z.im >= 0.0 {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(0.0, -1.0)
    };
    let leg1 = quad::integrate_segment(integrand, one, anchor, quad::DEFAULT_RTOL, "g leg 1")?;
    let leg2 = quad::integrate_segment(integrand, anchor, z, quad::DEFAULT_RTOL, "g leg 2")?;
    Ok(leg1 + leg2)
}

fn q_complex(z: Complex64, e: &[f64; 4]) -> Complex64 {
    (z - e[2]) * (z - e[1]) / cal_r(z, e)
}

/// g on the real segment (q, 0), reached through the lower half plane; the
/// endpoint q itself carries the (s−q)^{−1/2} kernel.
fn g_real_right_of_q(x: f64, gd: &GData) -> Result<Complex64> {
    let edge = &gd.edge;
    let e = edge.branch_points();
    let c = 0.5 * e[3]; // midpoint of (q, 0)
    let integrand = |s: Complex64| 0.5 * edge.p_factor_c(s) * q_complex(s, &e) / s;
    let one = Complex64::new(1.0, 0.0);
    let anchor = Complex64::new(0.0, -1.0);
    let cc = Complex64::new(c, 0.0);
    let g_c = quad::integrate_segment(integrand, one, anchor, quad::DEFAULT_RTOL, "g leg 1")?
        + quad::integrate_segment(integrand, anchor, cc, quad::DEFAULT_RTOL, "g leg c")?;
    if x == c {
        return Ok(g_c);
    }
    // On (q, 0): Q = √((s−e3)(s−e2)) / √((s−e1)(s−e4)), real and positive.
    let f = move |s: f64| {
        0.5 * edge.p_factor(s) * ((s - e[2]) * (s - e[1])).sqrt()
            / (s * ((s - e[0]).sqrt()))
    };
    let tail = if x == e[3] {
        -quad::sqrt_kernel(f, e[3], c, Pow::MinusHalf, Pow::Zero, quad::DEFAULT_RTOL, "g to q")?
    } else if x < c {
        -quad::sqrt_kernel(
            move |s| f(s) / (s - e[3]).sqrt(),
            x,
            c,
            Pow::Zero,
            Pow::Zero,
            quad::DEFAULT_RTOL,
            "g on (q,0)",
        )?
    } else {
        quad::sqrt_kernel(
            move |s| f(s) / (s - e[3]).sqrt(),
            c,
            x,
            Pow::Zero,
            Pow::Zero,
            quad::DEFAULT_RTOL,
            "g on (q,0)",
        )?
    };
    Ok(g_c + tail)
}

/// One-sided boundary values of g on [1/q, q] (cuts and gap).
///
/// Anchored at g(−1 ± i0) computed by polyline, then marched along the real
/// axis with the side-tagged integrands: the increment is real on the gap and
/// purely imaginary on the cuts. The ± labels here follow the
/// normalization with B > 0, i.e. the Plus side of g is reached from above;
/// this orients [q, y] left-to-right, mirroring the band-side convention of
/// the scattering data.
pub fn g_boundary(s: f64, side: Side, gd: &GData) -> Result<Complex64> {
    let edge = &gd.edge;
    let e = edge.branch_points();
    if !(e[0] <= s && s <= e[3]) {
        return Err(Error::Data(format!("g_boundary: {s} outside [1/q, q]")));
    }
    let anchor_im = match side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
    };
    let integrand = |t: Complex64| 0.5 * edge.p_factor_c(t) * q_complex(t, &e) / t;
    let one = Complex64::new(1.0, 0.0);
    let anch = Complex64::new(0.0, anchor_im);
    let minus_one = Complex64::new(-1.0, 0.0);
    // normalize to the branch with g(q) = 0: the polyline value carries the
    // half-turn ±iπξ of the ξ·log branch at the origin, a constant that
    // cancels in Re g and in the gap jump
    let g_m1 = quad::integrate_segment(integrand, one, anch, quad::DEFAULT_RTOL, "g leg 1")?
        + quad::integrate_segment(integrand, anch, minus_one, quad::DEFAULT_RTOL, "g leg -1")?
        - Complex64::new(0.0, anchor_im * std::f64::consts::PI * edge.xi);

    // real increment along the gap from −1 toward the target (or toward the
    // junction y / 1/y when s sits on a cut)
    let gap_target = s.clamp(e[1], e[2]);
    let gap_inc = gap_increment(gap_target, edge, &e)?;
    if s >= e[1] && s <= e[2] {
        return Ok(g_m1 + gap_inc);
    }

    // imaginary increment along the cut from its inner edge; from above,
    // Q(u+i0) = −i|Q| on [y, q] and +i|Q| on [1/q, 1/y]
    let cut_inc = if s > e[2] {
        let f = move |u: f64| {
            0.5 * edge.p_factor(u) * (u - e[1]).sqrt() / (u * ((e[3] - u) * (u - e[0])).sqrt())
        };
        let val = if s == e[3] {
            quad::sqrt_kernel(
                move |u| 0.5 * edge.p_factor(u) * (u - e[1]).sqrt() / (u * (u - e[0]).sqrt()),
                e[2],
                e[3],
                Pow::PlusHalf,
                Pow::MinusHalf,
                quad::DEFAULT_RTOL,
                "g cut full",
            )?
        } else {
            quad::sqrt_kernel(f, e[2], s, Pow::PlusHalf, Pow::Zero, quad::DEFAULT_RTOL, "g cut")?
        };
        match side {
            Side::Plus => Complex64::new(0.0, -val),
            Side::Minus => Complex64::new(0.0, val),
        }
    } else {
        // ∫_{1/y}^{s} = −∫_s^{1/y} turns the leftward march into val below;
        // |Q| on this cut is √((y−u)(1/y−u)) / √((u−1/q)(q−u))
        let f = move |u: f64| {
            0.5 * edge.p_factor(u) * (e[2] - u).sqrt() / (u * ((u - e[0]) * (e[3] - u)).sqrt())
        };
        let val = if s == e[0] {
            quad::sqrt_kernel(
                move |u| 0.5 * edge.p_factor(u) * (e[2] - u).sqrt() / (u * (e[3] - u).sqrt()),
                e[0],
                e[1],
                Pow::MinusHalf,
                Pow::PlusHalf,
                quad::DEFAULT_RTOL,
                "g left cut full",
            )?
        } else {
            quad::sqrt_kernel(f, s, e[1], Pow::Zero, Pow::PlusHalf, quad::DEFAULT_RTOL, "g left cut")?
        };
        match side {
            Side::Plus => Complex64::new(0.0, -val),
            Side::Minus => Complex64::new(0.0, val),
        }
    };
    Ok(g_m1 + gap_inc + cut_inc)
}

/// Real gap increment (1/2)∫_{−1}^{v} P Q ds/s for v ∈ [1/y, y].
fn gap_increment(v: f64, edge: &WhithamEdge, e: &[f64; 4]) -> Result<Complex64> {
    if v == -1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let val = if v > -1.0 {
        let f = move |s: f64| {
            0.5 * edge.p_factor(s) * (s - e[1]).sqrt() / (s * ((s - e[0]) * (e[3] - s)).sqrt())
        };
        if v == e[2] {
            quad::sqrt_kernel(
                move |s| 0.5 * edge.p_factor(s) * (s - e[1]).sqrt() / (s * ((s - e[0]) * (e[3] - s)).sqrt()),
                -1.0,
                e[2],
                Pow::Zero,
                Pow::PlusHalf,
                quad::DEFAULT_RTOL,
                "gap inc to y",
            )?
        } else {
            quad::sqrt_kernel(
                move |s| f(s) * (e[2] - s).sqrt(),
                -1.0,
                v,
                Pow::Zero,
                Pow::Zero,
                quad::DEFAULT_RTOL,
                "gap inc",
            )?
        }
    } else {
        // leftward: ∫_{−1}^{v} = −∫_v^{−1}
        let f = move |s: f64| {
            0.5 * edge.p_factor(s) * (e[2] - s).sqrt() / (s * ((s - e[0]) * (e[3] - s)).sqrt())
        };
        if v == e[1] {
            -quad::sqrt_kernel(
                move |s| 0.5 * edge.p_factor(s) * (e[2] - s).sqrt() / (s * ((s - e[0]) * (e[3] - s)).sqrt()),
                e[1],
                -1.0,
                Pow::PlusHalf,
                Pow::Zero,
                quad::DEFAULT_RTOL,
                "gap inc to 1/y",
            )?
        } else {
            -quad::sqrt_kernel(
                move |s| f(s) * (s - e[1]).sqrt(),
                v,
                -1.0,
                Pow::Zero,
                Pow::Zero,
                quad::DEFAULT_RTOL,
                "gap inc left",
            )?
        }
    };
    Ok(Complex64::new(val, 0.0))
}

/// Sample sign(Re g) on a polar grid, plus the two real nodal points y, 1/y.
#[derive(Debug, Clone)]
pub struct SignatureReport {
    /// (Re z, Im z, sign of Re g)
    pub samples: Vec<(f64, f64, i8)>,
    pub nodal: (f64, f64),
}

pub fn signature_report(gd: &GData, n_r: usize, n_theta: usize) -> Result<SignatureReport> {
    let mut samples = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        let r = 0.15 + 1.6 * (i as f64 + 0.5) / n_r as f64;
        for j in 0..n_theta {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_theta as f64;
            let z = Complex64::from_polar(r, th);
            if z.im.abs() < 1e-3 {
                continue;
            }
            let g = g_eval(z, gd)?;
            let s = if g.re > 0.0 { 1 } else if g.re < 0.0 { -1 } else { 0 };
            samples.push((z.re, z.im, s));
        }
    }
    Ok(SignatureReport {
        samples,
        nodal: (gd.edge.y, 1.0 / gd.edge.y),
    })
}
