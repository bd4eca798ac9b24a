//! The four Frobenius structures on the genus-one Hurwitz space: flat
//! coordinates, constant metrics and quasihomogeneity data.
//!
//! Period integrals of `lambda d zeta = (p + c) d zeta` reduce to the
//! Weierstrass constants: over the a-cycle `A = 2 omega c - 2 eta1`, over the
//! b-cycle `B = 2 omega' c - 2 eta2`, where `eta2 = (eta1 omega' - i pi / 2) / omega`.
//! The reduction is independent of the base point of the integral.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::DoubleCovering;
use crate::torus_cover::{covering_from_branch_points, BranchTriple, TorusCovering};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Smallest admissible `|sigma|` for the combined differential.
pub const SIGMA_MIN: f64 = 1e-6;

fn tpi() -> C64 {
    2.0 * PI * I
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    HoloS,
    DoubleS,
    DoubleT,
    DoubleCombo,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::HoloS, Kind::DoubleS, Kind::DoubleT, Kind::DoubleCombo];

    pub fn name(self) -> &'static str {
        match self {
            Kind::HoloS => "holo-s",
            Kind::DoubleS => "double-s",
            Kind::DoubleT => "double-t",
            Kind::DoubleCombo => "double-combo",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown kind '{s}' (expected holo-s, double-s, double-t or double-combo)")))
    }
}

/// Choice of primary differential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureKind {
    pub kind: Kind,
    /// Weight of the t-type part; used only by `DoubleCombo`.
    pub sigma: C64,
}

impl StructureKind {
    pub fn new(kind: Kind, sigma: C64) -> Result<Self> {
        if kind == Kind::DoubleCombo && !(sigma.norm() >= SIGMA_MIN) {
            return Err(Error::Domain(format!(
                "sigma = {sigma} too close to 0 for the combined differential"
            )));
        }
        Ok(StructureKind { kind, sigma })
    }

    pub fn holo_s() -> Self {
        StructureKind { kind: Kind::HoloS, sigma: C64::new(0.0, 0.0) }
    }

    pub fn double_s() -> Self {
        StructureKind { kind: Kind::DoubleS, sigma: C64::new(0.0, 0.0) }
    }

    pub fn double_t() -> Self {
        StructureKind { kind: Kind::DoubleT, sigma: C64::new(0.0, 0.0) }
    }

    pub fn double_combo(sigma: C64) -> Result<Self> {
        Self::new(Kind::DoubleCombo, sigma)
    }

    /// The four structures with `sigma = 1` for the combination.
    pub fn all_default() -> [StructureKind; 4] {
        [
            Self::holo_s(),
            Self::double_s(),
            Self::double_t(),
            StructureKind { kind: Kind::DoubleCombo, sigma: C64::new(1.0, 0.0) },
        ]
    }

    pub fn dim(&self) -> usize {
        if self.kind == Kind::HoloS {
            3
        } else {
            6
        }
    }
}

/// Flat coordinates `t_1 .. t_n`; `t_1` is the marked coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatCoords {
    pub kind: StructureKind,
    pub t: Vec<C64>,
}

/// Constant metric in flat coordinates (symmetric; off-diagonal slots hold half the coefficient).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantMetric {
    pub eta: Vec<Vec<C64>>,
}

impl ConstantMetric {
    pub fn matrix(&self) -> DMatrix<C64> {
        let n = self.eta.len();
        DMatrix::from_fn(n, n, |i, j| self.eta[i][j])
    }

    /// Infinity-norm condition number.
    pub fn condition_number(&self) -> f64 {
        let m = self.matrix();
        match m.clone().try_inverse() {
            Some(inv) => inf_norm(&m) * inf_norm(&inv),
            None => f64::INFINITY,
        }
    }
}

pub(crate) fn inf_norm(m: &DMatrix<C64>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Quasihomogeneity data: `E = sum nu_A t_A d/dt_A`, `E(F) = nu_F F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerData {
    pub nu: Vec<f64>,
    pub nu_f: f64,
    pub charge: f64,
}

/// Flat coordinates at the real double of `cov`.
pub fn flat_coordinates(cov: &TorusCovering, kind: &StructureKind) -> Result<FlatCoords> {
    flat_coordinates_double(&DoubleCovering::from_covering(cov)?, kind)
}

/// Flat coordinates as holomorphic functions of `(lambda, lambda-tilde)`.
///
/// Real parts `Re X` become `(X + X~) / 2` with `X~` the conjugate-block expression,
/// which agrees with `Re X` on the real slice.
pub fn flat_coordinates_double(dc: &DoubleCovering, kind: &StructureKind) -> Result<FlatCoords> {
    let hol = &dc.hol;
    let anti = &dc.anti;
    let w = hol.omega;
    let wb = anti.omega.conj();
    let mu = dc.mu();
    let mub = dc.mu_bar();
    let c = hol.c;
    let a_per = 2.0 * w * c - 2.0 * hol.lattice.eta1;
    let b_per = 2.0 * hol.omega_prime * c - 2.0 * hol.lattice.eta2();
    let a_per_bar = (2.0 * anti.omega * anti.c - 2.0 * anti.lattice.eta1).conj();
    let b_per_bar = (2.0 * anti.omega_prime * anti.c - 2.0 * anti.lattice.eta2()).conj();
    let t = match kind.kind {
        Kind::HoloS => vec![hol.eta1_over_omega() - c, 1.0 / w, mu / tpi()],
        Kind::DoubleS => {
            let k = mub / (mu - mub);
            let kb = mu / (mub - mu);
            vec![
                0.5 * (k * a_per / w + kb * a_per_bar / wb),
                mub / ((mub - mu) * w),
                mu * mub / (tpi() * (mub - mu)),
                0.5 * (k * b_per / w + kb * b_per_bar / wb),
                mu / ((mu - mub) * wb),
                mub / (tpi() * (mub - mu)),
            ]
        }
        Kind::DoubleT => vec![
            0.5 * (b_per / ((mub - mu) * w) + b_per_bar / ((mu - mub) * wb)),
            1.0 / ((mu - mub) * w),
            mu / (tpi() * (mu - mub)),
            0.5 * (a_per / ((mub - mu) * w) + a_per_bar / ((mu - mub) * wb)),
            1.0 / ((mub - mu) * wb),
            1.0 / (tpi() * (mu - mub)),
        ],
        Kind::DoubleCombo => {
            let sigma = kind.sigma;
            if !(sigma.norm() >= SIGMA_MIN) {
                return Err(Error::Domain("sigma too close to 0".into()));
            }
            let a = (mub - sigma) / (mub - mu);
            let b = (sigma - mu) / (mub - mu);
            let s = a * a_per / (2.0 * w) + b * a_per_bar / (2.0 * wb);
            let tt = a * b_per / (2.0 * w) + b * b_per_bar / (2.0 * wb);
            // marked coordinate normalized so that the unit field is -d/dt1
            vec![
                -0.5 * (s + tt / sigma),
                a / w,
                a * mu / tpi(),
                -0.5 * (s - tt / sigma),
                b / wb,
                a / tpi(),
            ]
        }
    };
    Ok(FlatCoords { kind: *kind, t })
}

/// Flat coordinates straight from branch points.
pub fn flat_coordinates_from_branch(b: &BranchTriple, kind: &StructureKind) -> Result<FlatCoords> {
    flat_coordinates(&covering_from_branch_points(b)?, kind)
}

fn put(eta: &mut [Vec<C64>], a: usize, b: usize, v: C64) {
    if a == b {
        eta[a][a] += v;
    } else {
        eta[a][b] += v / 2.0;
        eta[b][a] += v / 2.0;
    }
}

/// The constant metric in closed form, e.g. `1/2 dt2^2 - 2 dt1 dt3` for `HoloS`.
pub fn constant_metric(kind: &StructureKind) -> ConstantMetric {
    let n = kind.dim();
    let mut eta = vec![vec![C64::new(0.0, 0.0); n]; n];
    let r = |v: f64| C64::new(v, 0.0);
    match kind.kind {
        Kind::HoloS => {
            put(&mut eta, 1, 1, r(0.5));
            put(&mut eta, 0, 2, r(-2.0));
        }
        Kind::DoubleS => {
            put(&mut eta, 1, 1, r(0.5));
            put(&mut eta, 4, 4, r(0.5));
            put(&mut eta, 0, 2, r(-2.0));
            put(&mut eta, 3, 5, r(2.0));
        }
        Kind::DoubleT => {
            put(&mut eta, 1, 1, r(0.5));
            put(&mut eta, 4, 4, r(0.5));
            put(&mut eta, 0, 5, r(2.0));
            put(&mut eta, 2, 3, r(-2.0));
        }
        Kind::DoubleCombo => {
            let s = kind.sigma;
            put(&mut eta, 1, 1, r(0.5));
            put(&mut eta, 4, 4, r(0.5));
            put(&mut eta, 0, 2, r(-1.0));
            put(&mut eta, 0, 5, s);
            put(&mut eta, 2, 3, r(-1.0));
            put(&mut eta, 3, 5, -s);
        }
    }
    ConstantMetric { eta }
}

/// Quasihomogeneity coefficients; the charge is 1 and `nu_F = 3 - charge = 2` for every kind.
pub fn euler_data(kind: &StructureKind) -> EulerData {
    let nu = match kind.kind {
        Kind::HoloS => vec![1.0, 0.5, 0.0],
        _ => vec![1.0, 0.5, 0.0, 1.0, 0.5, 0.0],
    };
    let charge = 1.0;
    EulerData { nu, nu_f: 3.0 - charge, charge }
}

/// Values of the primary differential at the ramification points in the `x_i` frames.
///
/// Returns `(Phi_10(P_i), Phi_01(P_i))`; the second list is empty for `HoloS`.
pub fn primary_values(dc: &DoubleCovering, kind: &StructureKind) -> (Vec<C64>, Vec<C64>) {
    let mu = dc.mu();
    let mub = dc.mu_bar();
    let two_w = 2.0 * dc.omega();
    let two_wb = 2.0 * dc.omega_bar();
    let f = dc.f();
    let fb = dc.f_bar();
    let (a, b) = match kind.kind {
        Kind::HoloS => return (f.iter().map(|v| v / two_w).collect(), Vec::new()),
        Kind::DoubleS => (mub / (mub - mu), -mu / (mub - mu)),
        Kind::DoubleT => (1.0 / (mu - mub), -1.0 / (mu - mub)),
        Kind::DoubleCombo => ((mub - kind.sigma) / (mub - mu), (kind.sigma - mu) / (mub - mu)),
    };
    (
        f.iter().map(|v| a * v / two_w).collect(),
        fb.iter().map(|v| b * v / two_wb).collect(),
    )
}

/// Pullback of a constant metric to branch-point coordinates `(lambda, lambda-tilde)` by central differences.
pub fn pullback_metric(
    b: &BranchTriple,
    kind: &StructureKind,
    eta: &ConstantMetric,
    step: f64,
) -> Result<DMatrix<C64>> {
    let dc = DoubleCovering::from_branch_points(b)?;
    let m = if kind.kind == Kind::HoloS { 3 } else { 6 };
    let n = kind.dim();
    let mut jac = DMatrix::<C64>::zeros(n, m);
    for k in 0..m {
        let tp = flat_coordinates_double(&dc.shifted(k, C64::new(step, 0.0))?, kind)?.t;
        let tm = flat_coordinates_double(&dc.shifted(k, C64::new(-step, 0.0))?, kind)?.t;
        for a in 0..n {
            jac[(a, k)] = (tp[a] - tm[a]) / (2.0 * step);
        }
    }
    Ok(jac.transpose() * eta.matrix() * jac)
}

/// Canonical diagonal metric `1/2 Phi(P_i)^2` in `(lambda, lambda-tilde)`.
pub fn canonical_metric(b: &BranchTriple, kind: &StructureKind) -> Result<Vec<C64>> {
    let dc = DoubleCovering::from_branch_points(b)?;
    let (p10, p01) = primary_values(&dc, kind);
    Ok(p10.iter().chain(p01.iter()).map(|v| 0.5 * v * v).collect())
}

/// Response of the flat coordinates to a simultaneous shift of all branch points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftResponse {
    /// `(t_A(lambda + delta) - t_A(lambda - delta)) / (2 delta)`.
    pub response: Vec<C64>,
    /// `max_A |response_A + delta_{A,1}|`.
    pub residual: f64,
}

/// Unit field check: the marked coordinate decreases at unit rate, the others stay fixed.
pub fn check_unit_field(b: &BranchTriple, kind: &StructureKind, delta: f64) -> Result<ShiftResponse> {
    let cov = covering_from_branch_points(b)?;
    let dc = DoubleCovering::from_covering(&cov)?;
    let x = dc.coords();
    let tp = flat_coordinates_double(&dc.at(x.map(|v| v + delta))?, kind)?.t;
    let tm = flat_coordinates_double(&dc.at(x.map(|v| v - delta))?, kind)?.t;
    let response: Vec<C64> = tp.iter().zip(&tm).map(|(p, m)| (p - m) / (2.0 * delta)).collect();
    let residual = response
        .iter()
        .enumerate()
        .map(|(a, r)| (r + if a == 0 { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    Ok(ShiftResponse { response, residual })
}

/// Euler field check on coordinates: `d/d eps t_A((1 + eps) lambda) = nu_A t_A`; relative residual.
pub fn check_euler_scaling(b: &BranchTriple, kind: &StructureKind, eps: f64) -> Result<f64> {
    let dc = DoubleCovering::from_branch_points(b)?;
    let x = dc.coords();
    let t0 = flat_coordinates_double(&dc, kind)?.t;
    let tp = flat_coordinates_double(&dc.at(x.map(|v| v * (1.0 + eps)))?, kind)?.t;
    let tm = flat_coordinates_double(&dc.at(x.map(|v| v * (1.0 - eps)))?, kind)?.t;
    let nu = euler_data(kind).nu;
    Ok((0..t0.len())
        .map(|a| ((tp[a] - tm[a]) / (2.0 * eps) - nu[a] * t0[a]).norm() / t0[a].norm().max(1.0))
        .fold(0.0, f64::max))
}

/// `(mu, mu-bar)` recovered from the flat coordinates.
pub fn recover_moduli(fc: &FlatCoords) -> (C64, Option<C64>) {
    let t = &fc.t;
    match fc.kind.kind {
        Kind::HoloS => (tpi() * t[2], None),
        Kind::DoubleS => (t[2] / t[5], Some(tpi() * t[2] / (tpi() * t[5] - 1.0))),
        Kind::DoubleT => (t[2] / t[5], Some((tpi() * t[2] - 1.0) / (tpi() * t[5]))),
        Kind::DoubleCombo => (
            t[2] / t[5],
            Some((fc.kind.sigma - tpi() * t[2]) / (1.0 - tpi() * t[5])),
        ),
    }
}

/// Residual of the reality constraints satisfied on the coordinate image.
///
/// `DoubleS`: `t1, t3, t4` real, `t5 = conj t2`, `conj t6 = t6 - 1/(2 pi i)`.
/// `DoubleT`: `t1, t4, t6` real, `t5 = conj t2`, `conj t3 = t3 - 1/(2 pi i)`.
pub fn image_constraint_residual(fc: &FlatCoords) -> f64 {
    let t = &fc.t;
    let shift = 1.0 / tpi();
    match fc.kind.kind {
        Kind::DoubleS => [
            t[0].im.abs(),
            t[2].im.abs(),
            t[3].im.abs(),
            (t[4] - t[1].conj()).norm(),
            (t[5].conj() - t[5] + shift).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max),
        Kind::DoubleT => [
            t[0].im.abs(),
            t[3].im.abs(),
            t[5].im.abs(),
            (t[4] - t[1].conj()).norm(),
            (t[2].conj() - t[2] + shift).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max),
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parsing() {
        assert_eq!("double-t".parse::<Kind>().unwrap(), Kind::DoubleT);
        assert!(matches!("double-x".parse::<Kind>(), Err(Error::Usage(_))));
    }

    #[test]
    fn sigma_guard() {
        assert!(StructureKind::double_combo(C64::new(1e-7, 0.0)).is_err());
        assert!(StructureKind::double_combo(C64::new(1.0, 0.0)).is_ok());
    }

    #[test]
    fn metric_entries() {
        let h = constant_metric(&StructureKind::holo_s());
        assert_eq!(h.eta[1][1], C64::new(0.5, 0.0));
        assert_eq!(h.eta[0][2], C64::new(-1.0, 0.0));
        let c = constant_metric(&StructureKind::double_combo(C64::new(1.0, 0.0)).unwrap());
        assert_eq!(c.eta[0][5], C64::new(0.5, 0.0));
        for k in StructureKind::all_default() {
            let m = constant_metric(&k);
            for i in 0..k.dim() {
                for j in 0..k.dim() {
                    assert_eq!(m.eta[i][j], m.eta[j][i]);
                }
            }
            assert!(m.condition_number().is_finite());
        }
    }

    #[test]
    fn euler_charge_relation() {
        for k in StructureKind::all_default() {
            let e = euler_data(&k);
            assert_eq!(e.nu_f, 3.0 - e.charge);
            assert_eq!(e.nu_f, 2.0);
            assert_eq!(e.nu.len(), k.dim());
        }
    }

    #[test]
    fn holo_t3_at_lemniscatic() {
        let fc = flat_coordinates_from_branch(&BranchTriple::lemniscatic(), &StructureKind::holo_s())
            .unwrap();
        assert!((fc.t[2] - C64::new(1.0 / (2.0 * PI), 0.0)).norm() < 1e-12);
    }
}
