//! Bidifferentials on the torus and their values at ramification points.
//!
//! In the `zeta` frame:
//! `W = p(zeta_P - zeta_Q) + eta1/omega`,
//! `Omega = W - pi / (Im mu) (1 / 2 omega)^2`,
//! `B = pi / (Im mu) (1 / 2 omega) conj(1 / 2 omega)`.
//!
//! The real double treats `lambda` and `lambda-bar` as independent. A
//! [`DoubleCovering`] stores the covering built from `lambda` and the covering
//! built from `conj(lambda-tilde)`; every anti-holomorphic quantity is the
//! conjugate of the latter, so all data is holomorphic in `(lambda, lambda-tilde)`
//! and central differences in either block give complex partial derivatives.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfn::Lattice;
use crate::torus_cover::{
    covering_from_branch_points, covering_near, local_frame, local_frame_near, BranchTriple,
    LocalFrame, TorusCovering,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Kernel coefficient in the stated local frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: C64,
}

/// Rotation coefficients over `{1, 2, 3, 1-bar, 2-bar, 3-bar}` and diagonal constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationData {
    pub beta: [[C64; 6]; 6],
    /// Regularized diagonal of `Omega` at `P_i` in the `x_i` frame.
    pub omega_diag: [C64; 3],
    /// Regularized diagonal of `W` at `P_i` in the `x_i` frame.
    pub s_diag: [C64; 3],
    /// Anti-holomorphic counterparts of `omega_diag`.
    pub omega_diag_bar: [C64; 3],
}

/// `W(P, Q) / (d zeta_P d zeta_Q)`.
pub fn w_kernel(cov: &TorusCovering, zeta_p: C64, zeta_q: C64) -> Result<KernelValue> {
    let p = cov.lattice.p(zeta_p - zeta_q)?;
    Ok(KernelValue {
        value: p + cov.eta1_over_omega(),
    })
}

/// `Omega(P, Q) / (d zeta_P d zeta_Q)`.
pub fn schiffer_kernel(cov: &TorusCovering, zeta_p: C64, zeta_q: C64) -> Result<KernelValue> {
    let w = w_kernel(cov, zeta_p, zeta_q)?.value;
    Ok(KernelValue {
        value: w - PI / (4.0 * cov.omega * cov.omega * cov.im_mu()),
    })
}

/// `B(P, Q-bar) / (d zeta_P d zeta-bar_Q)`; constant on the torus.
pub fn bergman_kernel(cov: &TorusCovering, _zeta_p: C64, _zeta_q_conj: C64) -> KernelValue {
    KernelValue {
        value: PI / (4.0 * cov.omega * cov.omega.conj() * cov.im_mu()),
    }
}

/// Trapezoid integral of a periodic integrand `g(zeta)` along `base + s * period`, `s in [0, 1]`.
pub fn cycle_integral<G>(g: &G, base: C64, period: C64, nodes: usize) -> Result<C64>
where
    G: Fn(C64) -> Result<C64>,
{
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..nodes {
        acc += g(base + period * (j as f64 / nodes as f64))?;
    }
    Ok(acc * period / nodes as f64)
}

/// Inverse of an odd series `x = u (c1 + c3 u^2 + c5 u^4 + c7 u^6)`,
/// returned as `u = x (b1 + b3 x^2 + b5 x^4 + b7 x^6)`.
pub fn invert_odd_series(c: [C64; 4]) -> Result<[C64; 4]> {
    if c[0].norm() == 0.0 {
        return Err(Error::Degeneracy("leading series coefficient vanishes".into()));
    }
    // fixed point q(s) = 1 / P(s q(s)^2), s = x^2, one order per sweep
    let mut q = [C64::new(0.0, 0.0); 4];
    q[0] = 1.0 / c[0];
    for _ in 0..4 {
        let w = poly_mul(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)], &poly_mul(&q, &q));
        let pw = poly_compose(&c, &w);
        q = poly_recip(&pw);
    }
    Ok(q)
}

fn poly_mul(a: &[C64; 4], b: &[C64; 4]) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    for i in 0..4 {
        for j in 0..4 - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// `p(w(s))` truncated, assuming `w(0) = 0`.
fn poly_compose(p: &[C64; 4], w: &[C64; 4]) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    let mut pow = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    for coef in p.iter() {
        for k in 0..4 {
            out[k] += coef * pow[k];
        }
        pow = poly_mul(&pow, w);
    }
    out
}

fn poly_recip(a: &[C64; 4]) -> [C64; 4] {
    let mut r = [C64::new(0.0, 0.0); 4];
    r[0] = 1.0 / a[0];
    for n in 1..4 {
        let mut s = C64::new(0.0, 0.0);
        for k in 1..=n {
            s += a[k] * r[n - k];
        }
        r[n] = -s / a[0];
    }
    r
}

/// Taylor coefficients `p^(2k)(zeta_i) / (2k)!`, `k = 1..4`, from `p'' = 6 p^2 - g2 / 2`.
fn even_taylor_at_half_period(e_i: C64, g2: C64) -> [C64; 4] {
    let mut d = [C64::new(0.0, 0.0); 9];
    d[0] = e_i;
    d[2] = 6.0 * e_i * e_i - g2 / 2.0;
    for n in 1..=6 {
        let mut s = C64::new(0.0, 0.0);
        for k in 0..=n {
            s += binom(n, k) * d[k] * d[n - k];
        }
        d[n + 2] = 6.0 * s;
    }
    let fact = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
    [d[2] / fact(2), d[4] / fact(4), d[6] / fact(6), d[8] / fact(8)]
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Series of `sqrt(1 + r1 s + r2 s^2 + r3 s^3)`.
fn sqrt_series(r: [C64; 4]) -> [C64; 4] {
    // r[0] == 1
    let mut s = [C64::new(0.0, 0.0); 4];
    s[0] = C64::new(1.0, 0.0);
    for n in 1..4 {
        let mut acc = r[n];
        for k in 1..n {
            acc -= s[k] * s[n - k];
        }
        s[n] = acc / 2.0;
    }
    s
}

/// Schwarzian `{zeta, x}` at `P_i` for `x = sqrt(lambda - lambda_i)`, and the frame factor it implies.
pub fn ramification_schwarzian(cov: &TorusCovering, i: usize) -> Result<(C64, C64)> {
    let g2 = 2.0 * cov.e.iter().map(|v| v * v).sum::<C64>();
    let a = even_taylor_at_half_period(cov.e[i], g2);
    // x = sqrt(a2) u sqrt(1 + (a4/a2) u^2 + ...)
    let root = a[0].sqrt();
    let ratios = [C64::new(1.0, 0.0), a[1] / a[0], a[2] / a[0], a[3] / a[0]];
    let sq = sqrt_series(ratios);
    let b = invert_odd_series(sq.map(|v| v * root))?;
    Ok((6.0 * b[1] / b[0], b[0]))
}

/// Genus-one covering of the real double with independent holomorphic and anti-holomorphic blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleCovering {
    pub hol: TorusCovering,
    pub anti: TorusCovering,
    pub frame: LocalFrame,
    pub frame_anti: LocalFrame,
}

impl DoubleCovering {
    pub fn from_covering(cov: &TorusCovering) -> Result<Self> {
        let frame = local_frame(cov)?;
        Ok(DoubleCovering {
            hol: *cov,
            anti: *cov,
            frame,
            frame_anti: frame,
        })
    }

    pub fn from_branch_points(b: &BranchTriple) -> Result<Self> {
        Self::from_covering(&covering_from_branch_points(b)?)
    }

    /// Covering at `(lambda, lambda_tilde)` continued from `self` (permutations and frame signs).
    pub fn perturbed(&self, lambda: [C64; 3], lambda_tilde: [C64; 3]) -> Result<Self> {
        let hol = covering_near(&BranchTriple::new(lambda)?, &self.hol)?;
        let anti = covering_near(&BranchTriple::new(lambda_tilde.map(|v| v.conj()))?, &self.anti)?;
        Ok(DoubleCovering {
            frame: local_frame_near(&hol, &self.frame)?,
            frame_anti: local_frame_near(&anti, &self.frame_anti)?,
            hol,
            anti,
        })
    }

    /// Coordinates `(lambda_1..3, lambda-tilde_1..3)`.
    pub fn coords(&self) -> [C64; 6] {
        let l = self.hol.lambda;
        let t = self.anti.lambda.map(|v| v.conj());
        [l[0], l[1], l[2], t[0], t[1], t[2]]
    }

    /// Perturb coordinate `k` in `0..6` by `h`.
    pub fn shifted(&self, k: usize, h: C64) -> Result<Self> {
        let mut x = self.coords();
        x[k] += h;
        self.at(x)
    }

    pub fn at(&self, x: [C64; 6]) -> Result<Self> {
        self.perturbed([x[0], x[1], x[2]], [x[3], x[4], x[5]])
    }

    pub fn mu(&self) -> C64 {
        self.hol.mu.value()
    }

    pub fn mu_bar(&self) -> C64 {
        self.anti.mu.value().conj()
    }

    /// `(mu - mu_bar) / 2i`, complexified.
    pub fn im_mu(&self) -> C64 {
        (self.mu() - self.mu_bar()) / (2.0 * I)
    }

    pub fn omega(&self) -> C64 {
        self.hol.omega
    }

    pub fn omega_bar(&self) -> C64 {
        self.anti.omega.conj()
    }

    fn h1(&self) -> C64 {
        self.hol.eta1_over_omega()
    }

    fn h1_bar(&self) -> C64 {
        self.anti.eta1_over_omega().conj()
    }

    /// `pi / (4 omega^2 Im mu)`.
    pub fn correction(&self) -> C64 {
        PI / (4.0 * self.omega() * self.omega() * self.im_mu())
    }

    pub fn correction_bar(&self) -> C64 {
        PI / (4.0 * self.omega_bar() * self.omega_bar() * self.im_mu())
    }

    /// Constant Bergman coefficient `pi / (4 omega omega_bar Im mu)`.
    pub fn bergman(&self) -> C64 {
        PI / (4.0 * self.omega() * self.omega_bar() * self.im_mu())
    }

    pub fn f(&self) -> [C64; 3] {
        self.frame.dzeta_dx
    }

    pub fn f_bar(&self) -> [C64; 3] {
        self.frame_anti.dzeta_dx.map(|v| v.conj())
    }

    /// `Omega / (d zeta d zeta)` in the holomorphic block.
    pub fn schiffer(&self, zp: C64, zq: C64) -> Result<C64> {
        Ok(self.hol.lattice.p(zp - zq)? + self.h1() - self.correction())
    }

    /// Conjugate-block Schiffer kernel at anti-block points.
    pub fn schiffer_bar(&self, zp: C64, zq: C64) -> Result<C64> {
        Ok(self.anti.lattice.p(zp - zq)?.conj() + self.h1_bar() - self.correction_bar())
    }

    pub fn rotation(&self) -> Result<RotationData> {
        let f = self.f();
        let fb = self.f_bar();
        let e = self.hol.e;
        let eb = self.anti.e.map(|v| v.conj());
        let (h1, h1b) = (self.h1(), self.h1_bar());
        let (corr, corrb, bc) = (self.correction(), self.correction_bar(), self.bergman());
        let mut beta = [[C64::new(0.0, 0.0); 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    // p(zeta_i - zeta_j) = e_k for the third index
                    let k = 3 - i - j;
                    beta[i][j] = 0.5 * f[i] * f[j] * (e[k] + h1 - corr);
                    beta[i + 3][j + 3] = 0.5 * fb[i] * fb[j] * (eb[k] + h1b - corrb);
                }
                beta[i][j + 3] = 0.5 * f[i] * fb[j] * bc;
                beta[j + 3][i] = beta[i][j + 3];
            }
        }
        let mut s_diag = [C64::new(0.0, 0.0); 3];
        let mut omega_diag = [C64::new(0.0, 0.0); 3];
        let mut omega_diag_bar = [C64::new(0.0, 0.0); 3];
        for i in 0..3 {
            let (schw, _) = ramification_schwarzian(&self.hol, i)?;
            s_diag[i] = h1 * f[i] * f[i] + schw / 6.0;
            omega_diag[i] = s_diag[i] - corr * f[i] * f[i];
            let (schw_b, _) = ramification_schwarzian(&self.anti, i)?;
            let fa = self.frame_anti.dzeta_dx[i];
            let s_anti = self.anti.eta1_over_omega() * fa * fa + schw_b / 6.0;
            omega_diag_bar[i] = s_anti.conj() - corrb * fb[i] * fb[i];
        }
        Ok(RotationData {
            beta,
            omega_diag,
            s_diag,
            omega_diag_bar,
        })
    }

    /// `(H_i, H_i-bar)`: `H_i = 1/2 sum_{j != i} beta_ij^2 (lambda_i - lambda_j)` over all six indices.
    pub fn hamiltonians(&self) -> Result<([C64; 3], [C64; 3])> {
        let rot = self.rotation()?;
        let x = self.coords();
        let mut h = [C64::new(0.0, 0.0); 6];
        for (i, hi) in h.iter_mut().enumerate() {
            for j in 0..6 {
                if j != i {
                    *hi += 0.5 * rot.beta[i][j] * rot.beta[i][j] * (x[i] - x[j]);
                }
            }
        }
        Ok(([h[0], h[1], h[2]], [h[3], h[4], h[5]]))
    }
}

/// Rotation data of a covering on the real double.
pub fn rotation_data(cov: &TorusCovering) -> Result<RotationData> {
    DoubleCovering::from_covering(cov)?.rotation()
}

/// `(H_i, H_i-bar)` of a covering.
pub fn hamiltonians(cov: &TorusCovering) -> Result<([C64; 3], [C64; 3])> {
    DoubleCovering::from_covering(cov)?.hamiltonians()
}

/// Regularized diagonal of `W` at `P_i` by a Richardson-extrapolated numeric limit.
///
/// Uses the pair `x_P = eps`, `x_Q = -eps` on the two sheets over `lambda_i + eps^2`.
pub fn diagonal_limit_estimate(cov: &TorusCovering, i: usize, eps: f64) -> Result<C64> {
    let frame = local_frame(cov)?;
    let fi = frame.dzeta_dx[i];
    let zi = cov.ram_points[i];
    let sample = |h: f64| -> Result<C64> {
        let x = C64::new(h, 0.0);
        let zp = cov.solve_zeta(cov.lambda[i] + x * x, zi + x * fi)?;
        let zq = 2.0 * zi - zp;
        let (_, p1p, _) = cov.lattice.p_all(zp)?;
        let (_, p1q, _) = cov.lattice.p_all(zq)?;
        let dp = 2.0 * x / p1p;
        let dq = -2.0 * x / p1q;
        let w = w_kernel(cov, zp, zq)?.value;
        Ok(w * dp * dq - 1.0 / (4.0 * x * x))
    };
    richardson(&sample, eps)
}

/// `1/2 Omega(P_i, P_j)` in the `x_i, x_j` frames by a numeric limit, `i != j`.
pub fn rotation_limit_estimate(cov: &TorusCovering, i: usize, j: usize, eps: f64) -> Result<C64> {
    let frame = local_frame(cov)?;
    let f = frame.dzeta_dx;
    let near = |k: usize, h: f64| -> Result<(C64, C64)> {
        let x = C64::new(h, 0.0);
        let z = cov.solve_zeta(cov.lambda[k] + x * x, cov.ram_points[k] + x * f[k])?;
        let (_, p1, _) = cov.lattice.p_all(z)?;
        Ok((z, 2.0 * x / p1))
    };
    let sample = |h: f64| -> Result<C64> {
        let (zp, dp) = near(i, h)?;
        let (zq, dq) = near(j, 0.7 * h)?;
        Ok(0.5 * schiffer_kernel(cov, zp, zq)?.value * dp * dq)
    };
    richardson(&sample, eps)
}

fn richardson<G>(g: &G, eps: f64) -> Result<C64>
where
    G: Fn(f64) -> Result<C64>,
{
    // error series in even powers of eps
    let mut t = [g(eps)?, g(eps / 2.0)?, g(eps / 4.0)?, g(eps / 8.0)?];
    let mut factor = 4.0;
    for level in 1..4 {
        for k in 0..4 - level {
            t[k] = (factor * t[k + 1] - t[k]) / (factor - 1.0);
        }
        factor *= 4.0;
    }
    Ok(t[0])
}

/// Residuals of the flatness system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    /// `max |d_k beta_ij - beta_ik beta_kj|` over distinct `i, j, k`.
    pub flat1: f64,
    /// `max |sum_k d_k beta_ij|`.
    pub flat2: f64,
    /// `max |E(beta_ij) + beta_ij|`.
    pub euler: f64,
    pub step: f64,
    pub precision_warning: bool,
}

/// Central-difference partials `d beta / d x_k` for all six coordinates.
fn beta_partials(dc: &DoubleCovering, h: f64) -> Result<[[[C64; 6]; 6]; 6]> {
    let mut out = [[[C64::new(0.0, 0.0); 6]; 6]; 6];
    for (k, dk) in out.iter_mut().enumerate() {
        let bp = dc.shifted(k, C64::new(h, 0.0))?.rotation()?.beta;
        let bm = dc.shifted(k, C64::new(-h, 0.0))?.rotation()?.beta;
        for i in 0..6 {
            for j in 0..6 {
                dk[i][j] = (bp[i][j] - bm[i][j]) / (2.0 * h);
            }
        }
    }
    Ok(out)
}

fn max_abs_beta(beta: &[[C64; 6]; 6]) -> f64 {
    beta.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
}

fn flat1_residual(beta: &[[C64; 6]; 6], d: &[[[C64; 6]; 6]; 6]) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            for k in 0..6 {
                if i != j && j != k && i != k {
                    r = r.max((d[k][i][j] - beta[i][k] * beta[k][j]).norm());
                }
            }
        }
    }
    r
}

/// Flatness of the diagonal metric with rotation coefficients `beta` at the real double of `b`.
pub fn check_flatness(b: &BranchTriple, step: f64) -> Result<FlatnessReport> {
    let dc = DoubleCovering::from_branch_points(b)?;
    let scale = b
        .lambda
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let h = step * scale;
    let beta = dc.rotation()?.beta;
    let d = beta_partials(&dc, h)?;
    let flat1 = flat1_residual(&beta, &d);
    let mut flat2: f64 = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            if i != j {
                let s: C64 = (0..6).map(|k| d[k][i][j]).sum();
                flat2 = flat2.max(s.norm());
            }
        }
    }
    // Euler field: d/d eps beta((1 + eps) x) at eps = 0
    let x = dc.coords();
    let bp = dc.at(x.map(|v| v * (1.0 + step)))?.rotation()?.beta;
    let bm = dc.at(x.map(|v| v * (1.0 - step)))?.rotation()?.beta;
    let mut euler: f64 = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            if i != j {
                let eb = (bp[i][j] - bm[i][j]) / (2.0 * step);
                euler = euler.max((eb + beta[i][j]).norm());
            }
        }
    }
    // step halving: truncation ~ |d(h) - d(h/2)|, roundoff ~ eps |beta| / h
    let d_half = beta_partials(&dc, h / 2.0)?;
    let mut trunc: f64 = 0.0;
    for k in 0..6 {
        for i in 0..6 {
            for j in 0..6 {
                trunc = trunc.max((d[k][i][j] - d_half[k][i][j]).norm());
            }
        }
    }
    let roundoff = 10.0 * f64::EPSILON * max_abs_beta(&beta) / h;
    Ok(FlatnessReport {
        flat1,
        flat2,
        euler,
        step: h,
        precision_warning: roundoff > trunc,
    })
}

/// Residuals of the variational formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RauchReport {
    /// `max_j |d mu / d lambda_j - pi i omega_1(P_j)^2|`.
    pub rauch: f64,
    /// `max_j |d mu / d lambda-bar_j|`.
    pub rauch_bar: f64,
    /// The four variation lines for `Omega(P, Q)` and `B(P, Q-bar)`.
    pub omega_holo: f64,
    pub omega_anti: f64,
    pub bergman_holo: f64,
    pub bergman_anti: f64,
    pub step: f64,
    pub precision_warning: bool,
}

/// Kernels at fixed points `P`, `Q` given by their `lambda` values.
struct KernelProbe {
    lambda_p: C64,
    lambda_q: C64,
    zeta_p: C64,
    zeta_q: C64,
}

struct ProbeValues {
    omega_pq: C64,
    bergman_pq: C64,
    omega_p_j: [C64; 3],
    omega_q_j: [C64; 3],
    b_p_jbar: [C64; 3],
    b_q_jbar: [C64; 3],
    b_j_qbar: [C64; 3],
    omegabar_q_j: [C64; 3],
}

impl KernelProbe {
    fn new(cov: &TorusCovering) -> Result<Self> {
        let zeta_p = 0.37 * cov.omega + 0.21 * cov.omega_prime;
        let zeta_q = -0.18 * cov.omega + 0.43 * cov.omega_prime;
        Ok(KernelProbe {
            lambda_p: crate::torus_cover::lambda_map(cov, zeta_p)?,
            lambda_q: crate::torus_cover::lambda_map(cov, zeta_q)?,
            zeta_p,
            zeta_q,
        })
    }

    /// Kernels in `lambda` frames at `P`, `Q` and in `x_j` frames at ramification points.
    fn eval(&self, dc: &DoubleCovering) -> Result<ProbeValues> {
        let zp = dc.hol.solve_zeta(self.lambda_p, self.zeta_p)?;
        let zq = dc.hol.solve_zeta(self.lambda_q, self.zeta_q)?;
        let zq_anti = dc.anti.solve_zeta(self.lambda_q, self.zeta_q)?;
        let (_, dp, _) = dc.hol.lattice.p_all(zp)?;
        let (_, dq, _) = dc.hol.lattice.p_all(zq)?;
        let (_, dq_anti, _) = dc.anti.lattice.p_all(zq_anti)?;
        let dq_bar = dq_anti.conj();
        let f = dc.f();
        let fb = dc.f_bar();
        let bc = dc.bergman();
        let mut v = ProbeValues {
            omega_pq: dc.schiffer(zp, zq)? / (dp * dq),
            bergman_pq: bc / (dp * dq_bar),
            omega_p_j: [C64::new(0.0, 0.0); 3],
            omega_q_j: [C64::new(0.0, 0.0); 3],
            b_p_jbar: [C64::new(0.0, 0.0); 3],
            b_q_jbar: [C64::new(0.0, 0.0); 3],
            b_j_qbar: [C64::new(0.0, 0.0); 3],
            omegabar_q_j: [C64::new(0.0, 0.0); 3],
        };
        for j in 0..3 {
            let zj = dc.hol.ram_points[j];
            let zj_anti = dc.anti.ram_points[j];
            v.omega_p_j[j] = dc.schiffer(zp, zj)? * f[j] / dp;
            v.omega_q_j[j] = dc.schiffer(zq, zj)? * f[j] / dq;
            v.b_p_jbar[j] = bc * fb[j] / dp;
            v.b_q_jbar[j] = bc * fb[j] / dq;
            v.b_j_qbar[j] = bc * f[j] / dq_bar;
            v.omegabar_q_j[j] = dc.schiffer_bar(zq_anti, zj_anti)? * fb[j] / dq_bar;
        }
        Ok(v)
    }
}

/// Variational formulas for `mu`, `Omega` and `B` by central differences.
pub fn check_rauch(b: &BranchTriple, step: f64) -> Result<RauchReport> {
    let dc = DoubleCovering::from_branch_points(b)?;
    let scale = b
        .lambda
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let h = step * scale;
    let probe = KernelProbe::new(&dc.hol)?;
    let base = probe.eval(&dc)?;
    let f = dc.f();
    let two_omega = 2.0 * dc.omega();
    let mut rep = RauchReport {
        rauch: 0.0,
        rauch_bar: 0.0,
        omega_holo: 0.0,
        omega_anti: 0.0,
        bergman_holo: 0.0,
        bergman_anti: 0.0,
        step: h,
        precision_warning: false,
    };
    let mut trunc: f64 = 0.0;
    for k in 0..6 {
        let j = k % 3;
        let diff = |hh: f64| -> Result<(C64, C64, C64)> {
            let p = dc.shifted(k, C64::new(hh, 0.0))?;
            let m = dc.shifted(k, C64::new(-hh, 0.0))?;
            let (vp, vm) = (probe.eval(&p)?, probe.eval(&m)?);
            Ok((
                (p.mu() - m.mu()) / (2.0 * hh),
                (vp.omega_pq - vm.omega_pq) / (2.0 * hh),
                (vp.bergman_pq - vm.bergman_pq) / (2.0 * hh),
            ))
        };
        let (dmu, domega, dberg) = diff(h)?;
        let (dmu2, domega2, dberg2) = diff(h / 2.0)?;
        trunc = trunc
            .max((dmu - dmu2).norm())
            .max((domega - domega2).norm())
            .max((dberg - dberg2).norm());
        if k < 3 {
            let w1 = f[j] / two_omega;
            rep.rauch = rep.rauch.max((dmu - PI * I * w1 * w1).norm());
            let line1 = 0.5 * base.omega_p_j[j] * base.omega_q_j[j];
            rep.omega_holo = rep.omega_holo.max((domega - line1).norm());
            let line3 = 0.5 * base.omega_p_j[j] * base.b_j_qbar[j];
            rep.bergman_holo = rep.bergman_holo.max((dberg - line3).norm());
        } else {
            rep.rauch_bar = rep.rauch_bar.max(dmu.norm());
            let line2 = 0.5 * base.b_p_jbar[j] * base.b_q_jbar[j];
            rep.omega_anti = rep.omega_anti.max((domega - line2).norm());
            let line4 = 0.5 * base.b_p_jbar[j] * base.omegabar_q_j[j];
            rep.bergman_anti = rep.bergman_anti.max((dberg - line4).norm());
        }
    }
    let mag = base.omega_pq.norm().max(base.bergman_pq.norm()).max(1.0);
    rep.precision_warning = 10.0 * f64::EPSILON * mag / h > trunc;
    Ok(rep)
}

/// `max |Omega - Omega'|, |B - B'|` where primes use the basis `(omega', -omega)`.
pub fn basis_independence_residual(cov: &TorusCovering, zeta_p: C64, zeta_q: C64) -> Result<f64> {
    let swapped: Lattice = cov.lattice_swapped()?;
    let om = schiffer_kernel(cov, zeta_p, zeta_q)?.value;
    let b = bergman_kernel(cov, zeta_p, zeta_q).value;
    let w2 = swapped.omega;
    let im2 = swapped.mu.value().im;
    let om2 = swapped.p(zeta_p - zeta_q)? + swapped.eta1 / w2 - PI / (4.0 * w2 * w2 * im2);
    let b2 = PI / (4.0 * w2 * w2.conj() * im2);
    Ok((om - om2).norm().max((b - b2).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_inversion_roundtrip() {
        let c = [
            C64::new(1.3, 0.2),
            C64::new(-0.4, 0.1),
            C64::new(0.25, -0.3),
            C64::new(0.05, 0.02),
        ];
        let b = invert_odd_series(c).unwrap();
        // compose x(u(x)) for small x and compare
        let x = C64::new(0.01, 0.004);
        let s = x * x;
        let u = x * (b[0] + s * (b[1] + s * (b[2] + s * b[3])));
        let uu = u * u;
        let back = u * (c[0] + uu * (c[1] + uu * (c[2] + uu * c[3])));
        assert!((back - x).norm() < 1e-14);
    }

    #[test]
    fn schwarzian_closed_form() {
        let b = BranchTriple::new([C64::new(0.9, 0.3), C64::new(-0.4, 0.6), C64::new(-0.2, -0.8)])
            .unwrap();
        let cov = covering_from_branch_points(&b).unwrap();
        for i in 0..3 {
            let (schw, b1) = ramification_schwarzian(&cov, i).unwrap();
            let p2 = cov.p2_at_ramification(i);
            assert!((b1 * b1 - 2.0 / p2).norm() < 1e-13);
            // {zeta, x} = -3 a4 / a2^2 with a2 = p''/2, a4 = e_i a2
            let expect = -6.0 * cov.e[i] / p2;
            assert!((schw - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn bergman_is_constant() {
        let cov = covering_from_branch_points(&BranchTriple::lemniscatic()).unwrap();
        let a = bergman_kernel(&cov, C64::new(0.1, 0.2), C64::new(0.3, -0.1)).value;
        let b = bergman_kernel(&cov, C64::new(-0.5, 0.7), C64::new(0.0, 0.4)).value;
        assert_eq!(a, b);
    }
}
