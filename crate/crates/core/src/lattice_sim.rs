//! Direct numerical integration of the Toda lattice
//!
//!   ḃ(n) = 2(a(n)² − a(n−1)²),   ȧ(n) = a(n)(b(n+1) − b(n))
//!
//! from steplike initial data on a truncated domain. The boundary cells are
//! frozen at their background values; the domain is sized from the critical
//! rays so no disturbance reaches the edges before t_final. Classical RK4
//! with a fixed step keeps runs bit-reproducible; accuracy is established by
//! a step-halving study rather than an error controller.

use crate::error::{Error, Result};
use crate::spectral_map::{critical_rays, BackgroundParams};

const MAX_SITES: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct LatticeState {
    pub n_min: i64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
    pub params: BackgroundParams,
}

impl LatticeState {
    pub fn n_max(&self) -> i64 {
        self.n_min + self.a.len() as i64 - 1
    }

    pub fn idx(&self, n: i64) -> usize {
        debug_assert!(n >= self.n_min && n <= self.n_max());
        (n - self.n_min) as usize
    }

    pub fn a_at(&self, n: i64) -> f64 {
        self.a[self.idx(n)]
    }

    pub fn b_at(&self, n: i64) -> f64 {
        self.b[self.idx(n)]
    }

    /// a(n)² + a(n−1)², the quantity the trace formulas predict.
    pub fn a_sq_sum(&self, n: i64) -> f64 {
        let an = self.a_at(n);
        let am = self.a_at(n - 1);
        an * an + am * am
    }
}

/// Default margin beyond the ballistic cone.
pub fn default_pad(t_final: f64) -> f64 {
    50.0 + 10.0 * t_final.max(0.0).sqrt()
}

/// Pure-step initial state on a domain wide enough for evolution up to
/// t_final: n_max ≥ ξ_cr·t_final + pad and n_min ≤ ξ_cr,1·t_final − pad.
pub fn init_steplike(p: &BackgroundParams, t_final: f64, pad: Option<f64>) -> Result<LatticeState> {
    let rays = critical_rays(p)?;
    let pad = pad.unwrap_or_else(|| default_pad(t_final));
    let n_max = (rays.xi_cr * t_final + pad).ceil() as i64;
    let n_min = (rays.xi_cr1 * t_final - pad).floor() as i64;
    let len = (n_max - n_min + 1) as usize;
    if len > MAX_SITES {
        return Err(Error::DomainTooLarge {
            sites: len,
            limit: MAX_SITES,
        });
    }
    let mut a = vec![0.5; len];
    let mut b = vec![0.0; len];
    for n in n_min..0 {
        a[(n - n_min) as usize] = p.a;
        b[(n - n_min) as usize] = p.b;
    }
    Ok(LatticeState {
        n_min,
        a,
        b,
        t: 0.0,
        params: *p,
    })
}

fn rhs(a: &[f64], b: &[f64], da: &mut [f64], db: &mut [f64], sign: f64) {
    let len = a.len();
    da[0] = 0.0;
    db[0] = 0.0;
    da[len - 1] = 0.0;
    db[len - 1] = 0.0;
    for n in 1..len - 1 {
        db[n] = sign * 2.0 * (a[n] * a[n] - a[n - 1] * a[n - 1]);
        da[n] = sign * a[n] * (b[n + 1] - b[n]);
    }
}

/// Evolve in place to t_target with classical RK4 at fixed step dt; the final
/// partial step is shortened to land on t_target exactly. t_target < t runs
/// the time-reversed system.
pub fn evolve_to(state: &mut LatticeState, t_target: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::Data(format!("evolve_to needs dt > 0, got {dt}")));
    }
    let span = t_target - state.t;
    if span == 0.0 {
        return Ok(());
    }
    let sign = span.signum();
    let total = span.abs();
    let len = state.a.len();

    let mut k1a = vec![0.0; len];
    let mut k1b = vec![0.0; len];
    let mut k2a = vec![0.0; len];
    let mut k2b = vec![0.0; len];
    let mut k3a = vec![0.0; len];
    let mut k3b = vec![0.0; len];
    let mut k4a = vec![0.0; len];
    let mut k4b = vec![0.0; len];
    let mut ta = vec![0.0; len];
    let mut tb = vec![0.0; len];

    let mut done = 0.0;
    while done < total {
        let h = dt.min(total - done);
        rhs(&state.a, &state.b, &mut k1a, &mut k1b, sign);
        stage(&state.a, &k1a, 0.5 * h, &mut ta);
        stage(&state.b, &k1b, 0.5 * h, &mut tb);
        rhs(&ta, &tb, &mut k2a, &mut k2b, sign);
        stage(&state.a, &k2a, 0.5 * h, &mut ta);
        stage(&state.b, &k2b, 0.5 * h, &mut tb);
        rhs(&ta, &tb, &mut k3a, &mut k3b, sign);
        stage(&state.a, &k3a, h, &mut ta);
        stage(&state.b, &k3b, h, &mut tb);
        rhs(&ta, &tb, &mut k4a, &mut k4b, sign);

        let c = h / 6.0;
        for n in 0..len {
            state.a[n] += c * (k1a[n] + 2.0 * k2a[n] + 2.0 * k3a[n] + k4a[n]);
            state.b[n] += c * (k1b[n] + 2.0 * k2b[n] + 2.0 * k3b[n] + k4b[n]);
        }
        done += h;
        state.t += sign * h;

        if let Some(bad) = state.a.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::Instability {
                n: state.n_min + bad as i64,
                t: state.t,
                dt,
            });
        }
    }
    Ok(())
}

fn stage(base: &[f64], k: &[f64], h: f64, out: &mut [f64]) {
    for n in 0..base.len() {
        out[n] = base[n] + h * k[n];
    }
}

/// Largest n with |b(n)| > threshold; locates the right wavefront.
pub fn front_detect(state: &LatticeState, threshold: f64) -> i64 {
    for n in (state.n_min..=state.n_max()).rev() {
        if state.b_at(n).abs() > threshold {
            return n;
        }
    }
    state.n_min - 1
}
