//! Linear stability of spatially homogeneous stationary solutions.
//!
//! A constant profile `p0` is stationary iff the reduced right-hand side
//! vanishes on the diagonal, `F(p0, p0) = 0`. Perturbations `p0 + D`
//! evolve to first order by `dD/dt = M J*D + N D` with
//! `M = dF/dr`, `N = dF/ds` evaluated at `(p0, p0)`, giving the
//! dispersion relation `lambda(k) = M Jhat(k) + N` mode by mode.

use crate::game::CoordinationParams;
use crate::ide::{reduced_f, Kappa, ReducedFamily};
use crate::kernel::{FourierCoeffs, Kernel};
use crate::response::logistic;
use crate::{Error, Result};

/// A root of `F(p, p) = 0` found by the scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryRoot {
    pub p: f64,
    pub residual: f64,
    /// Set when the root sits in a near-tangency (merged pair closer than
    /// 1e-4, or a touch point without sign change).
    pub degenerate: bool,
}

/// All spatially homogeneous stationary solutions of a reduced dynamic.
#[derive(Debug, Clone)]
pub struct StationaryReport {
    pub roots: Vec<StationaryRoot>,
}

impl StationaryReport {
    pub fn root_values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.p).collect()
    }
}

const SCAN_POINTS: usize = 10_000;

/// Scan `[0, 1]` for sign changes of `F(p, p)`, refine each by bisection
/// to 1e-12, and include boundary roots. Adjacent roots closer than 1e-4
/// merge into a single root flagged degenerate.
pub fn stationary_homogeneous(
    family: ReducedFamily,
    kappa: Kappa,
    params: &CoordinationParams,
) -> StationaryReport {
    let d = |p: f64| reduced_f(family, kappa, params, p, p);
    let mut roots: Vec<StationaryRoot> = Vec::new();

    for endpoint in [0.0, 1.0] {
        let r = d(endpoint);
        if r.abs() <= 1e-10 {
            roots.push(StationaryRoot { p: endpoint, residual: r.abs(), degenerate: false });
        }
    }

    let step = 1.0 / SCAN_POINTS as f64;
    let mut prev_p = 0.0;
    let mut prev_v = d(0.0);
    for i in 1..=SCAN_POINTS {
        let p = i as f64 * step;
        let v = d(p);
        if prev_v == 0.0 && prev_p > 0.0 && prev_p < 1.0 {
            roots.push(StationaryRoot { p: prev_p, residual: 0.0, degenerate: false });
        } else if prev_v * v < 0.0 {
            let (mut lo, mut hi) = (prev_p, p);
            let (mut flo, _) = (prev_v, v);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                let fm = d(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
                if hi - lo < 1e-13 {
                    break;
                }
            }
            let root = 0.5 * (lo + hi);
            roots.push(StationaryRoot { p: root, residual: d(root).abs(), degenerate: false });
        }
        prev_p = p;
        prev_v = v;
    }

    // Touch points: grid values vanishing to 1e-9 away from found roots.
    for i in 0..=SCAN_POINTS {
        let p = i as f64 * step;
        if d(p).abs() < 1e-9 && roots.iter().all(|r| (r.p - p).abs() > 1e-3) {
            roots.push(StationaryRoot { p, residual: d(p).abs(), degenerate: true });
        }
    }

    roots.sort_by(|a, b| a.p.total_cmp(&b.p));
    let mut merged: Vec<StationaryRoot> = Vec::new();
    for r in roots {
        match merged.last_mut() {
            Some(last) if (r.p - last.p).abs() < 1e-4 => {
                last.p = 0.5 * (last.p + r.p);
                last.residual = last.residual.max(r.residual);
                last.degenerate = true;
            }
            _ => merged.push(r),
        }
    }
    StationaryReport { roots: merged }
}

/// Critical payoff scale of the logit dynamics: the `beta` at which the
/// fixed-point count of `p = l(beta (p - zeta))` changes from one to
/// three, located by bisection on the tangency condition
/// `beta p (1 - p) = 1` along the branch that merges.
pub fn critical_beta(zeta: f64) -> f64 {
    assert!(zeta > 0.0 && zeta < 1.0, "zeta must lie in (0, 1)");
    if (zeta - 0.5).abs() < 1e-14 {
        return 4.0;
    }
    // Tangency candidate on the merging side: low-p branch for zeta < 1/2.
    let q = |beta: f64| {
        let s = (1.0 - 4.0 / beta).max(0.0).sqrt();
        if zeta < 0.5 {
            0.5 * (1.0 - s)
        } else {
            0.5 * (1.0 + s)
        }
    };
    let gap = |beta: f64| {
        let qq = q(beta);
        logistic(beta * (qq - zeta)) - qq
    };
    // gap > 0 just above beta = 4 (for zeta < 1/2), < 0 for large beta.
    let mut lo = 4.0 + 1e-9;
    let mut hi = 8.0;
    while gap(hi).signum() == gap(lo).signum() {
        hi *= 2.0;
        assert!(hi < 1e6, "tangency bracket not found for zeta = {zeta}");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid).signum() == gap(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Analytic derivatives `(M, N) = (dF/dr, dF/ds)` of the reduced
/// right-hand side at the diagonal point `(p0, p0)`.
pub fn reduced_derivatives(
    family: ReducedFamily,
    kappa: Kappa,
    p0: f64,
    params: &CoordinationParams,
) -> (f64, f64) {
    let beta = params.beta;
    let gap = params.payoff_gap(p0);
    match family {
        ReducedFamily::Replicator => {
            let (f_plus, f_minus) = (kappa.f(gap), kappa.f(-gap));
            let (df_plus, df_minus) = (kappa.df(gap), kappa.df(-gap));
            let m = (1.0 - p0) * f_plus
                + p0 * f_minus
                + beta * p0 * (1.0 - p0) * (df_plus + df_minus);
            let n = -p0 * f_plus - (1.0 - p0) * f_minus;
            (m, n)
        }
        ReducedFamily::Logit => {
            let l = logistic(gap);
            (beta * l * (1.0 - l), -1.0)
        }
    }
}

/// Closed-form dispersion values where the paper tabulates them:
/// replicator at `p in {0, zeta, 1}` and logit at any stationary root.
pub fn closed_form_lambda(
    family: ReducedFamily,
    kappa: Kappa,
    p0: f64,
    params: &CoordinationParams,
    jhat_k: f64,
) -> Option<f64> {
    let beta = params.beta;
    let zeta = params.zeta;
    match family {
        ReducedFamily::Logit => Some(beta * (1.0 - p0) * p0 * jhat_k - 1.0),
        ReducedFamily::Replicator => {
            if p0.abs() < 1e-9 {
                Some(kappa.f(-beta * zeta) * jhat_k - kappa.f(beta * zeta))
            } else if (p0 - 1.0).abs() < 1e-9 {
                Some(kappa.f(beta * (zeta - 1.0)) * jhat_k - kappa.f(beta * (1.0 - zeta)))
            } else if (p0 - zeta).abs() < 1e-9 {
                let f0 = kappa.f_zero();
                Some((f0 + beta * zeta * (1.0 - zeta)) * jhat_k - f0)
            } else {
                None
            }
        }
    }
}

/// Mode-wise growth rates of perturbations around a stationary root.
#[derive(Debug, Clone)]
pub struct DispersionTable {
    pub p0: f64,
    pub m: f64,
    pub n: f64,
    /// `Jhat(k)` for `k = 0..=k_max`.
    pub jhat: Vec<f64>,
    /// `lambda(k)` for `k = 0..=k_max`.
    pub lambda: Vec<f64>,
}

impl DispersionTable {
    pub fn k_max(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn lambda_at(&self, k: i64) -> f64 {
        self.lambda[k.unsigned_abs() as usize]
    }

    /// Linearly stable iff every mode decays.
    pub fn is_stable(&self) -> bool {
        self.lambda.iter().all(|&l| l < 0.0)
    }

    /// Mode indices with positive growth.
    pub fn unstable_modes(&self) -> Vec<usize> {
        self.lambda
            .iter()
            .enumerate()
            .filter_map(|(k, &l)| (l > 0.0).then_some(k))
            .collect()
    }
}

/// Dispersion relation `lambda(k) = M Jhat(k) + N` for `k = 0..=k_max`.
///
/// `p0` must satisfy `|F(p0, p0)| <= 1e-8`. The analytic path is
/// cross-checked against the tabulated closed forms where those apply.
pub fn dispersion(
    family: ReducedFamily,
    kappa: Kappa,
    p0: f64,
    params: &CoordinationParams,
    jhat: &FourierCoeffs,
    k_max: usize,
) -> Result<DispersionTable> {
    let residual = reduced_f(family, kappa, params, p0, p0).abs();
    if residual > 1e-8 {
        return Err(Error::NotAStationaryRoot { p0, residual });
    }
    let (m, n) = reduced_derivatives(family, kappa, p0, params);
    let mut jh = Vec::with_capacity(k_max + 1);
    let mut lambda = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max as i64 {
        let j = jhat.at(k);
        let l = m * j + n;
        if let Some(closed) = closed_form_lambda(family, kappa, p0, params, j) {
            if (closed - l).abs() > 1e-8 {
                return Err(Error::DispersionMismatch { k, closed, general: l });
            }
        }
        jh.push(j);
        lambda.push(l);
    }
    Ok(DispersionTable { p0, m, n, jhat: jh, lambda })
}

/// Exact modal solution of the linearized equation
/// `dD/dt = M J*D + N D` on a 1-D periodic grid: each DFT mode of the
/// initial perturbation is scaled by `exp((M Jhat(k) + N) t)`.
pub fn linear_ide_solution(m: f64, n: f64, jhat: &FourierCoeffs, g0: &[f64], t: f64) -> Vec<f64> {
    let len = g0.len();
    let tau = std::f64::consts::TAU;
    // Forward DFT.
    let mut re = vec![0.0; len];
    let mut im = vec![0.0; len];
    for (k, (rk, ik)) in re.iter_mut().zip(im.iter_mut()).enumerate() {
        for (j, &g) in g0.iter().enumerate() {
            let phase = tau * k as f64 * j as f64 / len as f64;
            *rk += g * phase.cos();
            *ik -= g * phase.sin();
        }
    }
    // Mode-wise growth, then inverse DFT.
    for k in 0..len {
        let signed = if k <= len / 2 { k as i64 } else { k as i64 - len as i64 };
        let growth = ((m * jhat.at(signed) + n) * t).exp();
        re[k] *= growth;
        im[k] *= growth;
    }
    let mut out = vec![0.0; len];
    for (j, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in 0..len {
            let phase = tau * k as f64 * j as f64 / len as f64;
            acc += re[k] * phase.cos() - im[k] * phase.sin();
        }
        *o = acc / len as f64;
    }
    out
}

/// Reaction term and density-dependent diffusion coefficient of the PDE
/// approximation `df/dt = F(f, f) + (eps^2 / 2) J2 M(f) Lap f`.
pub struct PdeApprox {
    family: ReducedFamily,
    kappa: Kappa,
    params: CoordinationParams,
    /// Kernel second moment.
    pub j2: f64,
    /// Interaction-range scale of the rescaled kernel.
    pub eps: f64,
}

impl PdeApprox {
    /// `F(f, f)`.
    pub fn reaction(&self, f: f64) -> f64 {
        reduced_f(self.family, self.kappa, &self.params, f, f)
    }

    /// `(eps^2 / 2) J2 M(f)` with `M(f) = dF/dr` at `(f, f)`.
    pub fn diffusion(&self, f: f64) -> f64 {
        let (m, _) = reduced_derivatives(self.family, self.kappa, f, &self.params);
        0.5 * self.eps * self.eps * self.j2 * m
    }
}

pub fn pde_coefficients(
    family: ReducedFamily,
    kappa: Kappa,
    params: &CoordinationParams,
    kernel: &Kernel,
    eps: f64,
) -> PdeApprox {
    PdeApprox { family, kappa, params: *params, j2: kernel.second_moment(), eps }
}
