//! Elliptic and modular special functions.
//!
//! Jacobi `theta1` is taken in the pi-periodic normalization
//! `theta1(z) = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1) z)` with nome `q = exp(i pi mu)`.
//! In that normalization the Chazy solution reads
//! `gamma(mu) = (pi / 3i) theta1'''(0) / theta1'(0) = 4 d/dmu log eta(mu)`.
//!
//! The Weierstrass functions refer to the lattice `2 omega Z + 2 omega' Z`
//! and are evaluated through theta quotients after reduction of the argument
//! into the fundamental cell.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cauchy;
use crate::error::{Error, Result};

pub type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Period ratio of a torus, `Im mu > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Modulus(C64);

impl Modulus {
    pub fn new(mu: C64) -> Result<Self> {
        if !(mu.im > 0.0) || !mu.re.is_finite() {
            return Err(Error::Domain(format!(
                "modulus must lie in the upper half-plane, got {mu}"
            )));
        }
        Ok(Modulus(mu))
    }

    pub fn value(self) -> C64 {
        self.0
    }

    /// Nome `q = exp(i pi mu)`.
    pub fn nome(self) -> C64 {
        (I * PI * self.0).exp()
    }
}

/// Truncation controls for q-series and products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub max_terms: usize,
    pub tail_tolerance: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            max_terms: 64,
            tail_tolerance: 1e-16,
        }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 4 || !(self.tail_tolerance > 0.0) {
            return Err(Error::Domain(format!(
                "invalid series config: max_terms={} tail_tolerance={}",
                self.max_terms, self.tail_tolerance
            )));
        }
        Ok(())
    }

    fn small(&self, term: f64, sum: f64) -> bool {
        term < self.tail_tolerance * sum.max(1.0)
    }
}

/// Order-`deriv_order` z-derivative of `theta1(z | mu)`, `deriv_order <= 3`.
pub fn theta1(z: C64, mu: Modulus, deriv_order: u32, cfg: &SeriesConfig) -> Result<C64> {
    cfg.validate()?;
    if deriv_order > 3 {
        return Err(Error::Domain(format!(
            "theta1 derivative order {deriv_order} not supported"
        )));
    }
    if z == C64::new(0.0, 0.0) {
        return theta1_at_zero(mu, deriv_order, cfg);
    }
    let tau = mu.value();
    // sin^(k)(w) = (i^k e^{iw} - (-i)^k e^{-iw}) / 2i
    let ik = I.powu(deriv_order);
    let mik = (-I).powu(deriv_order);
    // terms grow while (2n+1)|Im z| outpaces the Gaussian decay
    let n_peak = (z.im.abs() / (PI * tau.im) - 0.5).max(0.0);
    let mut sum = C64::new(0.0, 0.0);
    for n in 0..cfg.max_terms {
        let nf = n as f64;
        let m = 2.0 * nf + 1.0;
        let a = I * PI * tau * (nf + 0.5) * (nf + 0.5);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let bracket = ik * (a + I * m * z).exp() - mik * (a - I * m * z).exp();
        let term = bracket / I * (sign * m.powi(deriv_order as i32));
        sum += term;
        if nf > n_peak && cfg.small(term.norm(), sum.norm()) {
            return Ok(sum);
        }
    }
    Err(Error::Precision(format!(
        "theta1 series not converged after {} terms (mu = {tau})",
        cfg.max_terms
    )))
}

fn theta1_at_zero(mu: Modulus, k: u32, cfg: &SeriesConfig) -> Result<C64> {
    if k % 2 == 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let q = mu.nome();
    let q14 = (I * PI * mu.value() * 0.25).exp();
    // q^{n(n+1)} by recurrence
    let mut qn = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    let sgn_k = if k == 3 { -1.0 } else { 1.0 };
    for n in 0..cfg.max_terms {
        let m = 2.0 * n as f64 + 1.0;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = qn * (sign * m.powi(k as i32));
        sum += term;
        if cfg.small((term * q14).norm(), (sum * q14).norm()) && n > 0 {
            return Ok(sum * q14 * (2.0 * sgn_k));
        }
        qn *= q.powu(2 * (n as u32 + 1));
    }
    Err(Error::Precision(format!(
        "theta1 series at zero not converged (mu = {})",
        mu.value()
    )))
}

/// Dedekind eta `q^{1/12} prod (1 - q^{2n})`, `q = exp(i pi mu)`.
pub fn dedekind_eta(mu: Modulus, cfg: &SeriesConfig) -> Result<C64> {
    cfg.validate()?;
    let q2 = mu.nome() * mu.nome();
    let mut prod = C64::new(1.0, 0.0);
    let mut qn = q2;
    for _ in 0..cfg.max_terms {
        prod *= C64::new(1.0, 0.0) - qn;
        if cfg.small(qn.norm(), 1.0) {
            return Ok((I * PI * mu.value() / 12.0).exp() * prod);
        }
        qn *= q2;
    }
    Err(Error::Precision(format!(
        "eta product not converged (mu = {})",
        mu.value()
    )))
}

/// `log eta(mu)` continued analytically from the product: `i pi mu / 12 + sum log(1 - q^{2n})`.
pub fn log_dedekind_eta(mu: Modulus, cfg: &SeriesConfig) -> Result<C64> {
    cfg.validate()?;
    let q2 = mu.nome() * mu.nome();
    let mut sum = I * PI * mu.value() / 12.0;
    let mut qn = q2;
    for _ in 0..cfg.max_terms {
        sum += (C64::new(1.0, 0.0) - qn).ln();
        if cfg.small(qn.norm(), 1.0) {
            return Ok(sum);
        }
        qn *= q2;
    }
    Err(Error::Precision(format!(
        "log eta series not converged (mu = {})",
        mu.value()
    )))
}

/// Solution of the Chazy equation, `gamma(i) = i`.
pub fn gamma_chazy(mu: Modulus, cfg: &SeriesConfig) -> Result<C64> {
    let t1 = theta1(C64::new(0.0, 0.0), mu, 1, cfg)?;
    let t3 = theta1(C64::new(0.0, 0.0), mu, 3, cfg)?;
    Ok(C64::new(PI, 0.0) / (3.0 * I) * t3 / t1)
}

/// `|gamma''' - 6 gamma gamma'' + 9 gamma'^2|` with mu-derivatives by Cauchy quadrature.
pub fn chazy_residual(mu: Modulus, cfg: &SeriesConfig) -> Result<f64> {
    let r = (0.5 * mu.value().im).min(0.05);
    let g = |m: C64| gamma_chazy(Modulus::new(m)?, cfg);
    let g0 = g(mu.value())?;
    let d = cauchy::derivative_1d(&g, mu.value(), 3, r, 32)?;
    let (g1, g2, g3) = (d[1], d[2], d[3]);
    Ok((g3 - 6.0 * g0 * g2 + 9.0 * g1 * g1).norm())
}

fn eisenstein(mu: Modulus, power: i32, cfg: &SeriesConfig) -> Result<C64> {
    let q2 = mu.nome() * mu.nome();
    let mut qn = q2;
    let mut sum = C64::new(0.0, 0.0);
    for n in 1..=cfg.max_terms {
        let term = qn / (C64::new(1.0, 0.0) - qn) * (n as f64).powi(power);
        sum += term;
        if cfg.small(term.norm(), sum.norm()) {
            return Ok(sum);
        }
        qn *= q2;
    }
    Err(Error::Precision(format!(
        "Eisenstein series not converged (mu = {})",
        mu.value()
    )))
}

/// Normalized Eisenstein series `E4` and `E6`.
pub fn eisenstein_e4_e6(mu: Modulus, cfg: &SeriesConfig) -> Result<(C64, C64)> {
    let e4 = 1.0 + 240.0 * eisenstein(mu, 3, cfg)?;
    let e6 = 1.0 - 504.0 * eisenstein(mu, 5, cfg)?;
    Ok((e4, e6))
}

/// Lattice `2 omega Z + 2 omega' Z` with cached modular data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub omega: C64,
    pub omega_prime: C64,
    pub mu: Modulus,
    /// `zeta(omega)`
    pub eta1: C64,
    pub g2: C64,
    pub g3: C64,
    pub cfg: SeriesConfig,
}

impl Lattice {
    pub fn new(omega: C64, omega_prime: C64, cfg: &SeriesConfig) -> Result<Self> {
        if omega.norm() == 0.0 || !omega.re.is_finite() || !omega.im.is_finite() {
            return Err(Error::Domain("degenerate lattice: omega = 0".into()));
        }
        let mu = Modulus::new(omega_prime / omega)
            .map_err(|_| Error::Domain("degenerate lattice: Im(omega'/omega) <= 0".into()))?;
        let gamma = gamma_chazy(mu, cfg)?;
        let eta1 = -I * PI * gamma / (4.0 * omega);
        let (e4, e6) = eisenstein_e4_e6(mu, cfg)?;
        let k = C64::new(PI, 0.0) / (2.0 * omega);
        let k2 = k * k;
        let g2 = 4.0 / 3.0 * k2 * k2 * e4;
        let g3 = 8.0 / 27.0 * k2 * k2 * k2 * e6;
        Ok(Lattice {
            omega,
            omega_prime,
            mu,
            eta1,
            g2,
            g3,
            cfg: *cfg,
        })
    }

    /// `zeta(omega') = (eta1 omega' - i pi / 2) / omega` (Legendre relation).
    pub fn eta2(&self) -> C64 {
        (self.eta1 * self.omega_prime - I * PI / 2.0) / self.omega
    }

    /// Reduce `z` into the cell `2 omega (x + mu y)`, `|x|, |y| <= 1/2`; returns `z / (2 omega)`.
    fn reduced_unit(&self, z: C64) -> C64 {
        let tau = self.mu.value();
        let mut u = z / (2.0 * self.omega);
        let ny = (u.im / tau.im).round();
        u -= tau * ny;
        let nx = (u.re - u.im / tau.im * tau.re).round();
        u - nx
    }

    /// `(p, p', p'')` at `z`.
    pub fn p_all(&self, z: C64) -> Result<(C64, C64, C64)> {
        let u = self.reduced_unit(z);
        if u.norm() < 1e-13 {
            return Err(Error::Pole(format!("z = {z} is a lattice point")));
        }
        let v = u * PI;
        let th0 = theta1(v, self.mu, 0, &self.cfg)?;
        let th1 = theta1(v, self.mu, 1, &self.cfg)?;
        let th2 = theta1(v, self.mu, 2, &self.cfg)?;
        let th3 = theta1(v, self.mu, 3, &self.cfg)?;
        let l1 = th1 / th0;
        let l2 = th2 / th0 - l1 * l1;
        let l3 = th3 / th0 - 3.0 * th2 * th1 / (th0 * th0) + 2.0 * l1 * l1 * l1;
        let k = C64::new(PI, 0.0) / (2.0 * self.omega);
        let p = -self.eta1 / self.omega - k * k * l2;
        let p1 = -k * k * k * l3;
        let p2 = 6.0 * p * p - self.g2 / 2.0;
        Ok((p, p1, p2))
    }

    pub fn p(&self, z: C64) -> Result<C64> {
        Ok(self.p_all(z)?.0)
    }
}

/// Weierstrass `p`, `p'` or `p''` for the lattice `2 omega Z + 2 omega' Z`.
pub fn weierstrass_p(z: C64, omega: C64, omega_prime: C64, deriv_order: u32) -> Result<C64> {
    let lat = Lattice::new(omega, omega_prime, &SeriesConfig::default())?;
    let (p, p1, p2) = lat.p_all(z)?;
    match deriv_order {
        0 => Ok(p),
        1 => Ok(p1),
        2 => Ok(p2),
        _ => Err(Error::Domain(format!(
            "weierstrass_p derivative order {deriv_order} not supported"
        ))),
    }
}

/// `eta1 = zeta(omega)`, so that the integral of `p` over one `2 omega` period is `-2 eta1`.
pub fn weierstrass_zeta_eta1(omega: C64, omega_prime: C64) -> Result<C64> {
    Ok(Lattice::new(omega, omega_prime, &SeriesConfig::default())?.eta1)
}

/// Lattice invariants `(g2, g3)`.
pub fn lattice_invariants(omega: C64, omega_prime: C64) -> Result<(C64, C64)> {
    let lat = Lattice::new(omega, omega_prime, &SeriesConfig::default())?;
    Ok((lat.g2, lat.g3))
}

/// Carlson symmetric integral `R_F(x, y, z)` by duplication.
pub fn carlson_rf(x: C64, y: C64, z: C64) -> Result<C64> {
    const TOL: f64 = 1e-14;
    let zeros = [x, y, z].iter().filter(|v| v.norm() == 0.0).count();
    if zeros > 1 {
        return Err(Error::Domain("R_F with more than one zero argument".into()));
    }
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + z) / 3.0;
    let q = (3.0 * TOL).powf(-1.0 / 6.0)
        * (a0 - x).norm().max((a0 - y).norm()).max((a0 - z).norm());
    let mut a = a0;
    let mut scale = 1.0;
    for _ in 0..100 {
        if scale * q < a.norm() {
            let xx = 1.0 - x / a;
            let yy = 1.0 - y / a;
            let zz = -xx - yy;
            let e2 = xx * yy - zz * zz;
            let e3 = xx * yy * zz;
            return Ok((1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0)
                / a.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        x = (x + lam) / 4.0;
        y = (y + lam) / 4.0;
        z = (z + lam) / 4.0;
        a = (a + lam) / 4.0;
        scale /= 4.0;
    }
    Err(Error::Precision("R_F duplication did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn theta_values_at_origin() {
        let cfg = SeriesConfig::default();
        let mu = Modulus::new(I).unwrap();
        assert_eq!(theta1(c(0.0, 0.0), mu, 0, &cfg).unwrap(), c(0.0, 0.0));
        assert_eq!(theta1(c(0.0, 0.0), mu, 2, &cfg).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn theta_zero_path_matches_general_path() {
        let cfg = SeriesConfig::default();
        let mu = Modulus::new(c(0.2, 0.9)).unwrap();
        let tiny = c(1e-9, 0.0);
        let d1 = theta1(tiny, mu, 1, &cfg).unwrap();
        let d1_0 = theta1(c(0.0, 0.0), mu, 1, &cfg).unwrap();
        assert!((d1 - d1_0).norm() < 1e-12);
        let d3 = theta1(tiny, mu, 3, &cfg).unwrap();
        let d3_0 = theta1(c(0.0, 0.0), mu, 3, &cfg).unwrap();
        assert!((d3 - d3_0).norm() < 1e-10);
    }

    #[test]
    fn theta_prime_is_twice_eta_cubed() {
        let cfg = SeriesConfig::default();
        let mu = Modulus::new(c(-0.3, 1.2)).unwrap();
        let t1 = theta1(c(0.0, 0.0), mu, 1, &cfg).unwrap();
        let eta = dedekind_eta(mu, &cfg).unwrap();
        assert!((t1 - 2.0 * eta * eta * eta).norm() < 1e-13);
    }

    #[test]
    fn domain_and_precision_errors() {
        let cfg = SeriesConfig::default();
        assert!(matches!(Modulus::new(c(0.0, -1.0)), Err(Error::Domain(_))));
        let tight = SeriesConfig {
            max_terms: 4,
            tail_tolerance: 1e-16,
        };
        let mu = Modulus::new(c(0.0, 0.02)).unwrap();
        assert!(matches!(
            theta1(c(0.3, 0.0), mu, 0, &tight),
            Err(Error::Precision(_))
        ));
        assert!(matches!(
            theta1(c(0.3, 0.0), Modulus::new(I).unwrap(), 4, &cfg),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gamma_at_i() {
        let g = gamma_chazy(Modulus::new(I).unwrap(), &SeriesConfig::default()).unwrap();
        assert!((g - I).norm() < 1e-12);
    }

    #[test]
    fn log_eta_consistent() {
        let cfg = SeriesConfig::default();
        let mu = Modulus::new(c(0.4, 0.8)).unwrap();
        let e = dedekind_eta(mu, &cfg).unwrap();
        let le = log_dedekind_eta(mu, &cfg).unwrap();
        assert!((le.exp() - e).norm() < 1e-14);
    }

    #[test]
    fn rf_equal_arguments() {
        assert!((carlson_rf(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!((carlson_rf(c(4.0, 0.0), c(4.0, 0.0), c(4.0, 0.0)).unwrap() - 0.5).norm() < 1e-15);
        assert!(carlson_rf(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn lemniscatic_invariants() {
        // omega = K(1/2) for e = (1, 0, -1)
        let omega = c(1.311_028_777_146_059_9, 0.0);
        let (g2, g3) = lattice_invariants(omega, omega * I).unwrap();
        assert!((g2 - 4.0).norm() < 1e-12);
        assert!(g3.norm() < 1e-12);
    }

    #[test]
    fn pole_error() {
        let omega = c(1.0, 0.0);
        let err = weierstrass_p(c(2.0, 0.0), omega, c(0.0, 1.0), 0);
        assert!(matches!(err, Err(Error::Pole(_))));
    }
}
