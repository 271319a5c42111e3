//! Scattering data for steplike initial profiles: Jost solutions, the
//! Wronskian W(z), the band density χ(z) on [q1, q], eigenvalues in the
//! spectral gaps, resonance flags at the band edges, and the Blaschke factor
//! that removes eigenvalues in (q, 0) from the phase-shift integral.
//!
//! For the exact pure step (no perturbation window) everything collapses to
//! closed forms: W(z) = a·ζ(z) − 1/(2z), and the second-sheet Wronskian is
//! the same expression with ζ replaced by 1/ζ. A finite perturbation window
//! is handled by the exact three-term recurrence from outside the window.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral_map::{zeta_of_lambda, zeta_on_band_z, BackgroundParams};
use crate::Side;

/// Default |W| threshold below which a band edge is flagged resonant.
pub const TOL_RES: f64 = 1e-9;

/// Compactly supported deviation from the pure step on n ∈ [n0, n0+len).
#[derive(Debug, Clone)]
pub struct Window {
    pub n0: i64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Window {
    pub fn n_end(&self) -> i64 {
        self.n0 + self.a.len() as i64
    }
}

/// Steplike initial data: pure step backgrounds outside a finite window.
#[derive(Debug, Clone)]
pub struct StepData {
    pub params: BackgroundParams,
    pub window: Option<Window>,
}

impl StepData {
    /// The exact pure step a(n) = 1/2, b(n) = 0 for n ≥ 0 and
    /// a(n) = a, b(n) = b for n < 0.
    pub fn pure_step(params: BackgroundParams) -> Self {
        Self {
            params,
            window: None,
        }
    }

    pub fn with_window(params: BackgroundParams, window: Window) -> Result<Self> {
        if window.a.len() != window.b.len() {
            return Err(Error::Data(
                "window a and b arrays must have equal length".into(),
            ));
        }
        if window.a.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::Data("window requires a(n) > 0".into()));
        }
        Ok(Self {
            params,
            window: Some(window),
        })
    }

    /// Coefficient a(n, 0).
    pub fn a_at(&self, n: i64) -> f64 {
        if let Some(w) = &self.window {
            if n >= w.n0 && n < w.n_end() {
                return w.a[(n - w.n0) as usize];
            }
        }
        if n >= 0 {
            0.5
        } else {
            self.params.a
        }
    }

    /// Coefficient b(n, 0).
    pub fn b_at(&self, n: i64) -> f64 {
        if let Some(w) = &self.window {
            if n >= w.n0 && n < w.n_end() {
                return w.b[(n - w.n0) as usize];
            }
        }
        if n >= 0 {
            0.0
        } else {
            self.params.b
        }
    }

    /// First site from which the data equal the right background in every row.
    fn right_edge(&self) -> i64 {
        match &self.window {
            Some(w) => w.n_end().max(0) + 1,
            None => 1,
        }
    }

    /// Last site up to which the data equal the left background in every row.
    fn left_edge(&self) -> i64 {
        match &self.window {
            Some(w) => w.n0.min(0) - 1,
            None => -1,
        }
    }
}

/// Wronskian of the Jost solutions at t = 0,
/// W(z) = a(n−1)(ψℓ(n−1)ψ(n) − ψℓ(n)ψ(n−1)).
///
/// Pure step: W(z) = a·ζ(z) − 1/(2z). With a window, the Jost solutions are
/// built by the three-term recurrence from the background regions.
pub fn wronskian(z: Complex64, data: &StepData) -> Complex64 {
    match data.window {
        None => {
            let zeta = zeta_of_lambda(lambda(z), &data.params);
            data.params.a * zeta - 0.5 / z
        }
        Some(_) => wronskian_at_site(z, data, 0, false),
    }
}

/// Wronskian with ζ replaced by 1/ζ (the second-sheet value of the left
/// branch); enters χ through W·W̄.
pub fn wronskian_second(z: Complex64, data: &StepData) -> Complex64 {
    match data.window {
        None => {
            let zeta = zeta_of_lambda(lambda(z), &data.params);
            data.params.a / zeta - 0.5 / z
        }
        Some(_) => wronskian_at_site(z, data, 0, true),
    }
}

fn lambda(z: Complex64) -> Complex64 {
    0.5 * (z + 1.0 / z)
}

/// Recurrence evaluation of the Wronskian at a chosen site. Site-independence
/// is a correctness check on the recurrences, not a free parameter.
pub fn wronskian_at_site(z: Complex64, data: &StepData, site: i64, second_sheet: bool) -> Complex64 {
    let mut zeta = zeta_of_lambda(lambda(z), &data.params);
    if second_sheet {
        zeta = 1.0 / zeta;
    }
    wronskian_with_zeta(z, zeta, data, site)
}

/// χ(z) on the open band (q1, q), purely imaginary with Im χ > 0.
///
/// Two routes are evaluated and must agree to 1e−12:
/// the |T|² route χ = −2a(ζ−1/ζ)/(z−1/z)·|T|² with T = (z−1/z)/(2W), and the
/// analytic-continuation route χ = −a(ζ−1/ζ)(z−1/z)/(2·W·W̄). Their agreement
/// pins the unimodular branch of ζ(λ+i0).
pub fn chi_on_band(z: f64, data: &StepData) -> Result<Complex64> {
    let p = &data.params;
    if !(p.q1 < z && z < p.q) {
        return Err(Error::Data(format!(
            "chi_on_band: z = {z} not strictly inside (q1, q) = ({}, {})",
            p.q1, p.q
        )));
    }
    let zeta = zeta_on_band_z(z, Side::Plus, p);
    let zc = Complex64::new(z, 0.0);
    let w = wronskian_banded(zc, zeta, data);
    let wbar = wronskian_banded(zc, 1.0 / zeta, data);
    let zmz = zc - 1.0 / zc;

    let t = zmz / (2.0 * w);
    let chi_t = -2.0 * p.a * (zeta - 1.0 / zeta) / zmz * t.norm_sqr();
    let chi_x = -p.a * (zeta - 1.0 / zeta) * zmz / (2.0 * w * wbar);

    if (chi_t - chi_x).norm() > 1e-12 * chi_x.norm().max(1.0) {
        return Err(Error::Branch(format!(
            "χ routes disagree at z = {z}: {chi_t} vs {chi_x}"
        )));
    }
    if chi_x.im <= 0.0 {
        return Err(Error::Data(format!(
            "χ must have positive imaginary part on the band, got {chi_x} at z = {z}"
        )));
    }
    Ok(chi_x)
}

/// Wronskian on the band with an explicitly chosen unimodular ζ.
fn wronskian_banded(z: Complex64, zeta: Complex64, data: &StepData) -> Complex64 {
    match data.window {
        None => data.params.a * zeta - 0.5 / z,
        Some(_) => wronskian_with_zeta(z, zeta, data, 0),
    }
}

fn wronskian_with_zeta(z: Complex64, zeta: Complex64, data: &StepData, site: i64) -> Complex64 {
    let lam = lambda(z);

    // ψ(z, n) = z^n in the pure right region, extended downward by
    // a(n−1)ψ(n−1) = (λ − b(n))ψ(n) − a(n)ψ(n+1)
    let nr = data.right_edge().max(site + 1);
    let mut psi_hi = z.powi(nr as i32 + 1); // ψ(nr + 1)
    let mut psi = z.powi(nr as i32); // ψ(nr)
    let mut n = nr;
    while n > site - 1 {
        let prev = ((lam - data.b_at(n)) * psi - data.a_at(n) * psi_hi) / data.a_at(n - 1);
        psi_hi = psi;
        psi = prev;
        n -= 1;
    }
    let (psi_m1, psi_0) = (psi, psi_hi); // ψ(site−1), ψ(site)

    // ψℓ(z, n) = ζ^{−n} in the pure left region, extended upward by
    // a(n)ψℓ(n+1) = (λ − b(n))ψℓ(n) − a(n−1)ψℓ(n−1)
    let nl = data.left_edge().min(site - 2);
    let mut psl_lo = zeta.powi(-(nl as i32 - 1)); // ψℓ(nl − 1)
    let mut psl = zeta.powi(-(nl as i32)); // ψℓ(nl)
    let mut m = nl;
    while m < site {
        let next = ((lam - data.b_at(m)) * psl - data.a_at(m - 1) * psl_lo) / data.a_at(m);
        psl_lo = psl;
        psl = next;
        m += 1;
    }

    data.a_at(site - 1) * (psl_lo * psi_0 - psl * psi_m1)
}

/// All eigenvalues as z-values in ((−1, 0) ∪ (0, 1)) \ [q1, q]: sign changes
/// of the real-valued Wronskian on the three real gap segments, refined by
/// bisection. The count must be stable under 10³ → 10⁴ grid refinement.
pub fn find_eigenvalues(data: &StepData) -> Result<Vec<f64>> {
    let p = &data.params;
    let margin = 1e-6;
    let segments = [
        (-1.0 + margin, p.q1 - margin),
        (p.q + margin, -1e-4),
        (1e-4, 1.0 - margin),
    ];

    let w_real = |z: f64| -> Result<f64> {
        let w = wronskian(Complex64::new(z, 0.0), data);
        if w.im.abs() > 1e-9 * w.norm().max(1.0) {
            return Err(Error::Branch(format!(
                "Wronskian not real at z = {z} on a gap segment: {w}"
            )));
        }
        Ok(w.re)
    };

    let scan = |n_grid: usize| -> Result<Vec<f64>> {
        let mut roots = Vec::new();
        for &(lo, hi) in &segments {
            if !(lo < hi) {
                continue;
            }
            let mut prev_z = lo;
            let mut prev_w = w_real(lo)?;
            for k in 1..=n_grid {
                let zk = lo + (hi - lo) * k as f64 / n_grid as f64;
                let wk = w_real(zk)?;
                if prev_w == 0.0 {
                    roots.push(prev_z);
                } else if prev_w * wk < 0.0 {
                    let (mut a0, mut b0) = (prev_z, zk);
                    let (mut fa, _fb) = (prev_w, wk);
                    for _ in 0..80 {
                        let m = 0.5 * (a0 + b0);
                        let fm = w_real(m)?;
                        if fa * fm <= 0.0 {
                            b0 = m;
                        } else {
                            a0 = m;
                            fa = fm;
                        }
                        if b0 - a0 < 1e-13 {
                            break;
                        }
                    }
                    roots.push(0.5 * (a0 + b0));
                }
                prev_z = zk;
                prev_w = wk;
            }
        }
        Ok(roots)
    };

    let coarse = scan(1000)?;
    let fine = scan(10_000)?;
    if coarse.len() != fine.len() {
        return Err(Error::Data(format!(
            "eigenvalue count unstable under grid refinement: {} vs {}",
            coarse.len(),
            fine.len()
        )));
    }
    Ok(fine)
}

/// Blaschke product over the eigenvalues lying in (q, 0):
/// Π(z) = ∏ |z_j| (z − 1/z_j)/(z − z_j). Empty product is 1; Π(0) > 0 and
/// Π(1/z) = 1/Π(z).
pub fn blaschke(z: Complex64, eigenvalues: &[f64], p: &BackgroundParams) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for &zj in eigenvalues {
        if p.q < zj && zj < 0.0 {
            prod *= zj.abs() * (z - 1.0 / zj) / (z - zj);
        }
    }
    prod
}

/// Everything the downstream phase machinery needs about one dataset:
/// eigenvalues, resonance flags, and evaluators for W and χ.
#[derive(Debug, Clone)]
pub struct ScatteringSummary {
    pub data: StepData,
    pub eigenvalues: Vec<f64>,
    pub resonance: ResonanceReport,
}

impl ScatteringSummary {
    pub fn build(data: StepData, tol_res: f64) -> Result<Self> {
        let eigenvalues = find_eigenvalues(&data)?;
        let resonance = resonance_status(&data, tol_res);
        Ok(Self {
            data,
            eigenvalues,
            resonance,
        })
    }

    pub fn wronskian(&self, z: Complex64) -> Complex64 {
        wronskian(z, &self.data)
    }

    pub fn chi(&self, z: f64) -> Result<Complex64> {
        chi_on_band(z, &self.data)
    }

    pub fn blaschke(&self, z: Complex64) -> Complex64 {
        blaschke(z, &self.eigenvalues, &self.data.params)
    }
}

/// Resonance flags and |W| diagnostics at the four band edges, in the order
/// (−1, 1, q, q1).
#[derive(Debug, Clone, Copy)]
pub struct ResonanceReport {
    pub edges: [f64; 4],
    pub w_abs: [f64; 4],
    pub resonant: [bool; 4],
}

pub fn resonance_status(data: &StepData, tol: f64) -> ResonanceReport {
    let p = &data.params;
    let edges = [-1.0, 1.0, p.q, p.q1];
    let mut w_abs = [0.0; 4];
    let mut resonant = [false; 4];
    for (k, &e) in edges.iter().enumerate() {
        let w = wronskian(Complex64::new(e, 0.0), data).norm();
        w_abs[k] = w;
        resonant[k] = w < tol;
    }
    ResonanceReport {
        edges,
        w_abs,
        resonant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> BackgroundParams {
        BackgroundParams::new(1.0, -4.0).unwrap()
    }

    /// Transfer-matrix oracle with a wide safety margin on the cutoff sites.
    fn wronskian_oracle(z: Complex64, data: &StepData) -> Complex64 {
        let lam = lambda(z);
        let zeta = zeta_of_lambda(lam, &data.params);
        let n0 = 50i64;
        let mut psi_hi = z.powi(n0 as i32 + 1);
        let mut psi = z.powi(n0 as i32);
        let mut n = n0;
        while n > -1 {
            let prev = ((lam - data.b_at(n)) * psi - data.a_at(n) * psi_hi) / data.a_at(n - 1);
            psi_hi = psi;
            psi = prev;
            n -= 1;
        }
        let (psi_m1, psi_0) = (psi, psi_hi);
        let mut psl_lo = zeta.powi(n0 as i32 + 1);
        let mut psl = zeta.powi(n0 as i32);
        let mut m = -n0;
        while m < 0 {
            let next = ((lam - data.b_at(m)) * psl - data.a_at(m - 1) * psl_lo) / data.a_at(m);
            psl_lo = psl;
            psl = next;
            m += 1;
        }
        data.a_at(-1) * (psl_lo * psi_0 - psl * psi_m1)
    }

    #[test]
    fn pure_step_wronskian_closed_form_matches_recurrence() {
        let data = StepData::pure_step(params());
        let q = data.params.q;
        // W(q) = −1 − 1/(2q), ζ(q) = −1
        let wq = wronskian(Complex64::new(q, 0.0), &data);
        let oracle = wronskian_oracle(Complex64::new(q, 0.0), &data);
        // ζ(λ(q)) sits at a band edge, so the closed form is met to √ε only
        let exact = -1.0 - 0.5 / q;
        assert!(
            (wq.re - exact).abs() < 1e-6 && wq.im.abs() < 1e-6,
            "W(q) = {wq} vs {exact}"
        );
        assert!((wq - oracle).norm() < 1e-9, "closed {wq} vs oracle {oracle}");
        assert!((wq.re - 4.958039892).abs() < 1e-6, "W(q) = {}", wq.re);

        // W(1) = ζ(1) − 1/2 for a = 1
        let w1 = wronskian(Complex64::new(1.0, 0.0), &data);
        let o1 = wronskian_oracle(Complex64::new(1.0, 0.0), &data);
        let zeta1 = (5.0 - 21f64.sqrt()) / 2.0;
        assert!((w1.re - (zeta1 - 0.5)).abs() < 1e-12);
        assert!((w1 - o1).norm() < 1e-9);
        assert!((w1.re - (-0.291288)).abs() < 1e-6);
    }

    #[test]
    fn wronskian_site_independent_with_window() {
        let w = Window {
            n0: -2,
            a: vec![1.0, 0.7, 0.9, 0.5, 0.6],
            b: vec![-4.0, -3.1, 0.4, 0.2, 0.0],
        };
        let data = StepData::with_window(params(), w).unwrap();
        for z in [
            Complex64::new(0.31, 0.22),
            Complex64::new(-0.47, 0.05),
            Complex64::new(0.8, -0.4),
        ] {
            let w0 = wronskian_at_site(z, &data, 0, false);
            let w5 = wronskian_at_site(z, &data, 5, false);
            let wm3 = wronskian_at_site(z, &data, -3, false);
            assert!((w0 - w5).norm() < 1e-12 * w0.norm().max(1.0), "{w0} vs {w5}");
            assert!((w0 - wm3).norm() < 1e-12 * w0.norm().max(1.0));
        }
    }

    #[test]
    fn chi_is_purely_imaginary_positive() {
        let data = StepData::pure_step(params());
        let mid = 0.5 * (data.params.q + data.params.q1);
        let chi = chi_on_band(mid, &data).unwrap();
        assert!(chi.re.abs() < 1e-12 * chi.norm());
        assert!(chi.im > 0.0);
        // phase: arg χ = π/2 across the open band
        for k in 1..20 {
            let z = data.params.q1 + (data.params.q - data.params.q1) * k as f64 / 20.0;
            let c = chi_on_band(z, &data).unwrap();
            assert!((c.arg() - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        }
    }

    #[test]
    fn chi_vanishes_like_sqrt_at_nonresonant_edge() {
        let data = StepData::pure_step(params());
        let q = data.params.q;
        // |χ(q − d)| / √d should approach a constant as d → 0
        let c1 = chi_on_band(q - 1e-4, &data).unwrap().im / 1e-4f64.sqrt();
        let c2 = chi_on_band(q - 1e-6, &data).unwrap().im / 1e-6f64.sqrt();
        assert!((c1 - c2).abs() < 0.02 * c1.abs(), "c1 = {c1}, c2 = {c2}");
    }

    #[test]
    fn chi_rejected_at_edges() {
        let data = StepData::pure_step(params());
        assert!(chi_on_band(data.params.q, &data).is_err());
        assert!(chi_on_band(data.params.q1, &data).is_err());
    }

    #[test]
    fn pure_step_has_no_eigenvalues() {
        let data = StepData::pure_step(params());
        let eig = find_eigenvalues(&data).unwrap();
        assert!(eig.is_empty(), "unexpected eigenvalues: {eig:?}");
    }

    /// Sturm-sequence count of eigenvalues of a symmetric tridiagonal matrix
    /// below x (diagonal d, off-diagonal e).
    fn sturm_count_below(d: &[f64], e: &[f64], x: f64) -> usize {
        let mut count = 0;
        let mut q = d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..d.len() {
            let denom = if q == 0.0 { 1e-300 } else { q };
            q = d[i] - x - e[i - 1] * e[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn window_eigenvalue_matches_truncated_jacobi_oracle() {
        // raise one bound state above the right band with a positive bump
        let w = Window {
            n0: 0,
            a: vec![0.5],
            b: vec![2.0],
        };
        let data = StepData::with_window(params(), w).unwrap();
        let eig = find_eigenvalues(&data).unwrap();
        assert_eq!(eig.len(), 1, "eigenvalues: {eig:?}");
        let zj = eig[0];
        assert!(zj > 0.0 && zj < 1.0);
        let wj = wronskian(Complex64::new(zj, 0.0), &data).norm();
        assert!(wj < 1e-10, "W at eigenvalue = {wj}");
        // eigenvalues never inside [q1, q] or at ±1
        assert!(!(data.params.q1..=data.params.q).contains(&zj));

        // oracle: truncated Jacobi matrix on [−N, N]
        let n = 300i64;
        let sites: Vec<i64> = (-n..=n).collect();
        let d: Vec<f64> = sites.iter().map(|&k| data.b_at(k)).collect();
        let e: Vec<f64> = sites[..sites.len() - 1]
            .iter()
            .map(|&k| data.a_at(k))
            .collect();
        let lam_j = 0.5 * (zj + 1.0 / zj);
        let below = sturm_count_below(&d, &e, lam_j - 1e-6);
        let above = sturm_count_below(&d, &e, lam_j + 1e-6);
        assert_eq!(
            above - below,
            1,
            "truncated Jacobi matrix should have exactly one eigenvalue near λ = {lam_j}"
        );
    }

    #[test]
    fn blaschke_symmetry_and_empty_product() {
        let p = params();
        assert_eq!(
            blaschke(Complex64::new(0.3, 0.1), &[], &p),
            Complex64::new(1.0, 0.0)
        );
        let eigs = [-0.05, 0.4]; // only −0.05 lies in (q, 0)
        let pi0 = blaschke(Complex64::new(0.0, 0.0), &eigs, &p);
        assert!(pi0.re > 0.0 && pi0.im.abs() < 1e-15);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let z = Complex64::new(rng() * 2.0 - 1.0, rng() * 2.0 - 1.0);
            if z.norm() < 1e-2 {
                continue;
            }
            let prod = blaschke(z, &eigs, &p) * blaschke(1.0 / z, &eigs, &p);
            assert!((prod - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn summary_bundles_the_dataset() {
        let summary = ScatteringSummary::build(StepData::pure_step(params()), TOL_RES).unwrap();
        assert!(summary.eigenvalues.is_empty());
        assert!(summary.resonance.resonant.iter().all(|&r| !r));
        let mid = 0.5 * (summary.data.params.q + summary.data.params.q1);
        assert!(summary.chi(mid).unwrap().im > 0.0);
        assert_eq!(
            summary.blaschke(Complex64::new(0.3, 0.0)),
            Complex64::new(1.0, 0.0)
        );
        assert!(summary.wronskian(Complex64::new(0.5, 0.0)).norm() > 0.0);
    }

    #[test]
    fn pure_step_edges_nonresonant() {
        let data = StepData::pure_step(params());
        let rep = resonance_status(&data, TOL_RES);
        assert!(rep.resonant.iter().all(|&r| !r), "{rep:?}");
        assert!((rep.w_abs[2] - 4.958).abs() < 1e-3);
    }

    #[test]
    fn random_backgrounds_nonresonant_at_q() {
        let mut state = 0x123456789abcdefu64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let a = 0.3 + 2.0 * rng();
            let b = -1.0 - 2.0 * a - 0.1 - 4.0 * rng();
            let p = BackgroundParams::new(a, b).unwrap();
            let data = StepData::pure_step(p);
            let rep = resonance_status(&data, TOL_RES);
            assert!(!rep.resonant[2], "resonant at q for a={a}, b={b}");
        }
    }

    #[test]
    fn tuned_window_is_resonant_at_q() {
        // one-parameter family: deepen b(0); an eigenvalue dives through the
        // bottom edge λ(q) = b − 2a, where W(q) changes sign
        let p = params();
        let wq = |c: f64| -> f64 {
            let w = Window {
                n0: 0,
                a: vec![0.5],
                b: vec![c],
            };
            let data = StepData::with_window(p, w).unwrap();
            wronskian(Complex64::new(p.q, 0.0), &data).re
        };
        let (mut lo, mut hi) = (0.0, -40.0);
        let flo = wq(lo);
        assert!(
            flo * wq(hi) < 0.0,
            "no sign change of W(q) on the family: {} vs {}",
            flo,
            wq(hi)
        );
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if flo * wq(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let c_star = 0.5 * (lo + hi);
        let data = StepData::with_window(
            p,
            Window {
                n0: 0,
                a: vec![0.5],
                b: vec![c_star],
            },
        )
        .unwrap();
        let rep = resonance_status(&data, 1e-6);
        assert!(rep.resonant[2], "expected resonance at q: {rep:?}");
    }
}
