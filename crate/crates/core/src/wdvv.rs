//! Verification layer: WDVV, associativity, metric and Euler checks, Getzler
//! constants and tau-function relations, each producing a [`VerificationReport`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cauchy::{self, DerivativeEngine};
use crate::error::{Error, Result};
use crate::frobenius::{
    check_unit_field, constant_metric, euler_data, flat_coordinates, flat_coordinates_double, inf_norm,
    primary_values, Kind, StructureKind,
};
use crate::kernels::{check_flatness, check_rauch, DoubleCovering};
use crate::prepotential::{
    eval_f, eval_g, gamma_terms, gradient_f, gradient_g, modular_arguments, singular_distance,
    singular_distance_g, third_tensor, GVariant, PrepotentialPoint, ThirdTensor, MIN_MODULAR_IM,
};
use crate::torus_cover::{covering_from_branch_points, covering_near, local_frame, local_frame_near, BranchTriple};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default tolerance for WDVV, Euler and Getzler checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;
/// Default tolerance for finite-difference kernel checks.
pub const FD_TOLERANCE: f64 = 1e-6;
/// Largest admissible condition number of `F_1`.
pub const MAX_CONDITION: f64 = 1e8;
/// Residuals below this are roundoff; robustness ratios ignore them.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Where a check was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckPoint {
    Flat(PrepotentialPoint),
    Branch(BranchTriple),
}

/// Outcome of one check. `passed` holds iff every entry of `residuals` is within `tolerance`;
/// `info` carries measured quantities that are reported but not asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub kind: Option<StructureKind>,
    pub point: CheckPoint,
    pub residuals: BTreeMap<String, f64>,
    pub info: BTreeMap<String, f64>,
    pub notes: BTreeMap<String, String>,
    pub tolerance: f64,
    pub passed: bool,
    pub engine_config: Option<DerivativeEngine>,
    pub seed: u64,
}

impl VerificationReport {
    pub fn new(check_name: &str, kind: Option<StructureKind>, point: CheckPoint, tolerance: f64) -> Self {
        VerificationReport {
            check_name: check_name.to_string(),
            kind,
            point,
            residuals: BTreeMap::new(),
            info: BTreeMap::new(),
            notes: BTreeMap::new(),
            tolerance,
            passed: true,
            engine_config: None,
            seed: 0,
        }
    }

    pub fn residual(&mut self, name: &str, value: f64) -> &mut Self {
        self.residuals.insert(name.to_string(), value);
        self.update();
        self
    }

    pub fn with_engine(mut self, eng: &DerivativeEngine) -> Self {
        self.engine_config = Some(*eng);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Largest residual (0 when there are none).
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().cloned().fold(0.0, f64::max)
    }

    fn update(&mut self) {
        self.passed = self.residuals.values().all(|r| *r <= self.tolerance);
    }
}

/// Third-derivative tensor with the inverse of `F_1`.
struct Structure {
    tensor: ThirdTensor,
    f1_inv: DMatrix<C64>,
    condition: f64,
}

fn structure(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine) -> Result<Structure> {
    let tensor = third_tensor(kind, p, eng)?;
    let f1 = &tensor.f[0];
    let f1_inv = f1
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("F_1 is singular".into()))?;
    let condition = inf_norm(f1) * inf_norm(&f1_inv);
    if !(condition < MAX_CONDITION) {
        return Err(Error::Conditioning(format!(
            "F_1 condition number {condition:.3e} exceeds {MAX_CONDITION:.0e}"
        )));
    }
    Ok(Structure { tensor, f1_inv, condition })
}

/// `d^3 F / dt_1 dt_l dt_m` only.
fn f1_matrix(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine) -> Result<DMatrix<C64>> {
    let r = eng.radius_for(singular_distance(kind, &p.t))?;
    let n = p.t.len();
    let f = |x: &[C64]| eval_f(kind, x);
    let mut m = DMatrix::zeros(n, n);
    for l in 0..n {
        for k in l..n {
            let mut mi = vec![0usize; n];
            mi[0] += 1;
            mi[l] += 1;
            mi[k] += 1;
            let v = cauchy::derivative(&f, &p.t, &mi, r, eng)?;
            m[(l, k)] = v;
            m[(k, l)] = v;
        }
    }
    Ok(m)
}

/// A second point for the `F_1` constancy residual, moved by a deterministic relative offset.
fn companion_point(kind: &StructureKind, p: &PrepotentialPoint) -> Option<PrepotentialPoint> {
    for scale in [0.08, 0.04, 0.02] {
        let t: Vec<C64> = p
            .t
            .iter()
            .enumerate()
            .map(|(a, v)| v * (1.0 + scale * C64::from_polar(1.0, 1.3 * a as f64 + 0.4)))
            .collect();
        if eval_f(kind, &t).is_ok() && singular_distance(kind, &t) > 1e-3 {
            return Some(PrepotentialPoint::new(t));
        }
    }
    None
}

fn wdvv_from(s: &Structure) -> f64 {
    let f = &s.tensor.f;
    let n = f.len();
    let mut r: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let a = &f[i] * &s.f1_inv * &f[j];
            let b = &f[j] * &s.f1_inv * &f[i];
            let norm = inf_norm(&(a - b));
            r = r.max(norm / (inf_norm(&f[i]) * inf_norm(&f[j])).max(1.0));
        }
    }
    r
}

/// `c^k_{ij} = sum_n (F_1^{-1})_{kn} F_{ijn}`, indexed `[i][j][k]`.
fn structure_constants(s: &Structure) -> Vec<Vec<Vec<C64>>> {
    let f = &s.tensor.f;
    let n = f.len();
    let mut c = vec![vec![vec![C64::new(0.0, 0.0); n]; n]; n];
    for i in 0..n {
        let m = &s.f1_inv * &f[i];
        for j in 0..n {
            for k in 0..n {
                c[i][j][k] = m[(k, j)];
            }
        }
    }
    c
}

fn associativity_from(c: &[Vec<Vec<C64>>]) -> (f64, f64) {
    let n = c.len();
    let cmax = c.iter().flatten().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let mut assoc: f64 = 0.0;
    let mut comm: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                comm = comm.max((c[i][j][k] - c[j][i][k]).norm());
                for l in 0..n {
                    let mut lhs = C64::new(0.0, 0.0);
                    let mut rhs = C64::new(0.0, 0.0);
                    for m in 0..n {
                        lhs += c[i][j][m] * c[m][k][l];
                        rhs += c[j][k][m] * c[m][i][l];
                    }
                    assoc = assoc.max((lhs - rhs).norm());
                }
            }
        }
    }
    (assoc / (cmax * cmax).max(1.0), comm)
}

fn metric_sign(f1: &DMatrix<C64>, eta: &DMatrix<C64>) -> (f64, f64) {
    let plus = inf_norm(&(f1 - eta));
    let minus = inf_norm(&(f1 + eta));
    if minus <= plus {
        (-1.0, minus)
    } else {
        (1.0, plus)
    }
}

/// WDVV residual `max_{i,j} |F_i F_1^{-1} F_j - F_j F_1^{-1} F_i| / max(1, |F_i||F_j|)`.
pub fn wdvv_residual(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine) -> Result<VerificationReport> {
    let s = structure(kind, p, eng)?;
    Ok(wdvv_report(kind, p, eng, &s))
}

fn wdvv_report(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine, s: &Structure) -> VerificationReport {
    let mut rep = VerificationReport::new("wdvv", Some(*kind), CheckPoint::Flat(p.clone()), DEFAULT_TOLERANCE)
        .with_engine(eng);
    rep.residual("wdvv", wdvv_from(s));
    rep.residual("tensor_symmetry", s.tensor.symmetry_residual);
    rep.info.insert("f1_condition".into(), s.condition);
    rep.info.insert("radius".into(), s.tensor.radius);
    match companion_point(kind, p).map(|q| f1_matrix(kind, &q, eng)) {
        Some(Ok(f1q)) => {
            rep.residual("f1_constancy", inf_norm(&(&s.tensor.f[0] - f1q)));
        }
        _ => {
            rep.notes.insert("f1_constancy".into(), "no admissible companion point".into());
        }
    }
    rep
}

/// `F_1` against the constant metric up to a global sign, which is recorded.
pub fn f1_metric_check(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine) -> Result<VerificationReport> {
    let s = structure(kind, p, eng)?;
    Ok(f1_report(kind, p, eng, &s))
}

fn f1_report(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine, s: &Structure) -> VerificationReport {
    let eta = constant_metric(kind).matrix();
    let f1 = &s.tensor.f[0];
    let (sign, res) = metric_sign(f1, &eta);
    let mut rep = VerificationReport::new("f1_metric", Some(*kind), CheckPoint::Flat(p.clone()), DEFAULT_TOLERANCE)
        .with_engine(eng);
    rep.residual("f1_vs_metric", res);
    let n = f1.nrows();
    rep.residual("f1_inverse", inf_norm(&(&s.f1_inv * f1 - DMatrix::<C64>::identity(n, n))));
    rep.info.insert("sign".into(), sign);
    rep
}

/// Associativity of `c^k_{ij}`, commutativity and the unit axiom for `e = -d/dt_1`.
pub fn associativity_check(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine) -> Result<VerificationReport> {
    let s = structure(kind, p, eng)?;
    Ok(associativity_report(kind, p, eng, &s))
}

fn associativity_report(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine, s: &Structure) -> VerificationReport {
    let c = structure_constants(s);
    let (assoc, comm) = associativity_from(&c);
    let mut rep = VerificationReport::new("associativity", Some(*kind), CheckPoint::Flat(p.clone()), DEFAULT_TOLERANCE)
        .with_engine(eng);
    rep.residual("associativity", assoc);
    rep.residual("commutativity", comm);
    // product through the constant metric: c_eta = eta^{-1} F_i; e = -d/dt1 must act as identity
    let eta = constant_metric(kind).matrix();
    let n = eta.nrows();
    match eta.try_inverse() {
        Some(eta_inv) => {
            let act = -(eta_inv * &s.tensor.f[0]);
            rep.residual("unit_axiom", inf_norm(&(act - DMatrix::<C64>::identity(n, n))));
        }
        None => {
            rep.residual("unit_axiom", f64::INFINITY);
        }
    }
    rep
}

/// Scaling `t_A -> kappa^{nu_A} t_A` with principal powers.
pub fn scaled_point(kind: &StructureKind, t: &[C64], kappa: C64) -> Vec<C64> {
    let nu = euler_data(kind).nu;
    t.iter().zip(&nu).map(|(v, n)| v * kappa.powf(*n)).collect()
}

/// `|E(F) - 2F| / max(1, |F|)` and the integrated form `F(kappa^nu t) = kappa^2 F(t)`.
pub fn euler_check(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine) -> Result<VerificationReport> {
    let f = eval_f(kind, &p.t)?;
    let grad = gradient_f(kind, p, eng)?;
    let ed = euler_data(kind);
    let ef: C64 = (0..p.t.len()).map(|a| ed.nu[a] * p.t[a] * grad[a]).sum();
    let mut rep = VerificationReport::new("euler", Some(*kind), CheckPoint::Flat(p.clone()), DEFAULT_TOLERANCE)
        .with_engine(eng);
    rep.residual("euler", (ef - ed.nu_f * f).norm() / f.norm().max(1.0));
    let mut scaling: f64 = 0.0;
    for kappa in [C64::new(1.7, 0.0), C64::new(2.0, 0.0), C64::new(1.0, 1.0)] {
        let fk = eval_f(kind, &scaled_point(kind, &p.t, kappa))?;
        let target = kappa * kappa * f;
        scaling = scaling.max((fk - target).norm() / target.norm().max(1.0));
    }
    rep.residual("scaling", scaling);
    Ok(rep)
}

/// Getzler constant `-1/4 sum_A (1 - nu_A - d/2)^2 + d n / 48` with `d = 1`.
pub fn getzler_constant(kind: &StructureKind) -> f64 {
    let ed = euler_data(kind);
    let d = ed.charge;
    let n = ed.nu.len() as f64;
    -0.25 * ed.nu.iter().map(|v| (1.0 - v - d / 2.0).powi(2)).sum::<f64>() + d * n / 48.0
}

fn euler_of_g(kind: &StructureKind, p: &PrepotentialPoint, variant: GVariant, eng: &DerivativeEngine) -> Result<C64> {
    let nu = euler_data(kind).nu;
    // coordinates with nu_A = 0 do not contribute
    let active: Vec<usize> = (0..nu.len()).filter(|&a| nu[a] != 0.0).collect();
    let g = gradient_g(kind, p, variant, &active, eng)?;
    Ok(active.iter().map(|&a| nu[a] * p.t[a] * g[a]).sum())
}

/// `|E(G) - C|` with the constant from [`getzler_constant`]; both `t6` exponents for `DoubleT`.
pub fn getzler_check(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine) -> Result<VerificationReport> {
    let c = getzler_constant(kind);
    let nu = euler_data(kind).nu;
    let active: Vec<usize> = (0..nu.len()).filter(|&a| nu[a] != 0.0).collect();
    let mut rep = VerificationReport::new("getzler", Some(*kind), CheckPoint::Flat(p.clone()), DEFAULT_TOLERANCE)
        .with_engine(eng);
    let dist = singular_distance_g(kind, &p.t, GVariant::HalfPower, &active);
    if dist < 1e-3 {
        rep.notes.insert("branch_cut".into(), format!("logarithm cut within {dist:.3e} of the point"));
    }
    let eg = euler_of_g(kind, p, GVariant::HalfPower, eng)?;
    rep.residual("getzler", (eg - c).norm());
    rep.info.insert("constant".into(), c);
    if kind.kind == Kind::DoubleT {
        let eg2 = euler_of_g(kind, p, GVariant::ThreeQuarterPower, eng)?;
        rep.residual("getzler_three_quarter_exponent", (eg2 - c).norm());
        rep.notes.insert(
            "t6_exponent".into(),
            "nu_6 = 0, so both t6 exponents give the same E(G)".into(),
        );
    }
    Ok(rep)
}

/// Wrap the imaginary part of a difference of logarithms into `(-pi/8, pi/8]`.
fn unwrap_log_difference(d: C64) -> C64 {
    let period = PI / 4.0;
    let im = d.im - period * (d.im / period).round();
    C64::new(d.re, im)
}

/// `tau` relations at the real double of `b`: `H_i = Omega_i / 4`, closure of `d_j Omega_i`,
/// `d log Im mu = -1/2 Sigma_i`, and conjugate symmetry of `d Im mu`.
pub fn tau_relation_check(b: &BranchTriple, step: f64) -> Result<VerificationReport> {
    let dc = DoubleCovering::from_branch_points(b)?;
    let scale = b.lambda.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let h = step * scale;
    let rot = dc.rotation()?;
    let (hh, hb) = dc.hamiltonians()?;
    let omega_all = |r: &crate::kernels::RotationData| -> [C64; 6] {
        [
            r.omega_diag[0],
            r.omega_diag[1],
            r.omega_diag[2],
            r.omega_diag_bar[0],
            r.omega_diag_bar[1],
            r.omega_diag_bar[2],
        ]
    };
    let om = omega_all(&rot);
    let om_scale = om.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let mut ham: f64 = 0.0;
    for i in 0..3 {
        ham = ham.max((hh[i] - 0.25 * om[i]).norm()).max((hb[i] - 0.25 * om[i + 3]).norm());
    }
    let mut d = [[C64::new(0.0, 0.0); 6]; 6];
    let mut dlog = [C64::new(0.0, 0.0); 6];
    let mut dim = [C64::new(0.0, 0.0); 6];
    for j in 0..6 {
        let p = dc.shifted(j, C64::new(h, 0.0))?;
        let m = dc.shifted(j, C64::new(-h, 0.0))?;
        let (op, omm) = (omega_all(&p.rotation()?), omega_all(&m.rotation()?));
        for i in 0..6 {
            d[i][j] = (op[i] - omm[i]) / (2.0 * h);
        }
        dlog[j] = (p.im_mu() / m.im_mu()).ln() / (2.0 * h);
        dim[j] = (p.im_mu() - m.im_mu()) / (2.0 * h);
    }
    let d_scale = d.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let mut closure: f64 = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            closure = closure.max((d[i][j] - d[j][i]).norm() / d_scale);
        }
    }
    let f = dc.f();
    let fb = dc.f_bar();
    let mut log_im: f64 = 0.0;
    for i in 0..3 {
        let sigma = -dc.correction() * f[i] * f[i];
        let sigma_bar = -dc.correction_bar() * fb[i] * fb[i];
        log_im = log_im
            .max((dlog[i] + 0.5 * sigma).norm())
            .max((dlog[i + 3] + 0.5 * sigma_bar).norm());
    }
    let mut conj: f64 = 0.0;
    for i in 0..3 {
        conj = conj.max((dim[i + 3] - dim[i].conj()).norm());
    }
    let mut rep = VerificationReport::new("tau_relations", None, CheckPoint::Branch(*b), FD_TOLERANCE);
    rep.residual("hamiltonian_quarter_omega", ham / om_scale);
    rep.residual("omega_closure", closure);
    rep.residual("log_im_mu", log_im);
    rep.residual("im_mu_conjugate", conj);
    rep.info.insert("step".into(), h);
    Ok(rep)
}

/// Compare `dG/d lambda_i` on the coordinate image with `H_i - (1/24) d log J / d lambda_i`,
/// `J = 2^{-3} prod Phi_10(P_i) Phi_01(P_i)`. Derivatives are Wirtinger derivatives of the
/// real-slice functions.
pub fn g_tau_consistency(b: &BranchTriple, kind: &StructureKind, variant: GVariant, step: f64) -> Result<VerificationReport> {
    let cov0 = covering_from_branch_points(b)?;
    let frame0 = local_frame(&cov0)?;
    let dc0 = DoubleCovering::from_covering(&cov0)?;
    let scale = b.lambda.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let h = step * scale;
    let real_slice = |l: [C64; 3]| -> Result<DoubleCovering> {
        let cov = covering_near(&BranchTriple::new(l)?, &cov0)?;
        let frame = local_frame_near(&cov, &frame0)?;
        Ok(DoubleCovering { hol: cov, anti: cov, frame, frame_anti: frame })
    };
    let g_at = |l: [C64; 3]| -> Result<C64> {
        let t = flat_coordinates_double(&real_slice(l)?, kind)?.t;
        eval_g(kind, &t, variant)
    };
    let factors = |l: [C64; 3]| -> Result<Vec<C64>> {
        let dc = real_slice(l)?;
        let (p10, p01) = primary_values(&dc, kind);
        Ok(p10.into_iter().chain(p01).collect())
    };
    let lam = b.lambda;
    let shift = |i: usize, d: C64| {
        let mut l = lam;
        l[i] += d;
        l
    };
    // logarithmic differences taken as logs of ratios to stay on one branch
    let log_diff = |i: usize, d: C64, which: &dyn Fn([C64; 3]) -> Result<Vec<C64>>| -> Result<C64> {
        let p = which(shift(i, d))?;
        let m = which(shift(i, -d))?;
        Ok(p.iter().zip(&m).map(|(a, b)| (a / b).ln()).sum())
    };
    let ham = if kind.kind == Kind::HoloS {
        holomorphic_hamiltonians(&dc0)?
    } else {
        dc0.hamiltonians()?.0
    };
    let mut worst: f64 = 0.0;
    let mut mags: f64 = 0.0;
    for i in 0..3 {
        let dg = {
            let dx = unwrap_log_difference(g_at(shift(i, C64::new(h, 0.0)))? - g_at(shift(i, C64::new(-h, 0.0)))?);
            let dy = unwrap_log_difference(g_at(shift(i, C64::new(0.0, h)))? - g_at(shift(i, C64::new(0.0, -h)))?);
            0.5 * (dx - I * dy) / (2.0 * h)
        };
        let dlogj = {
            let dx = log_diff(i, C64::new(h, 0.0), &factors)?;
            let dy = log_diff(i, C64::new(0.0, h), &factors)?;
            0.5 * (dx - I * dy) / (2.0 * h)
        };
        let rhs = ham[i] - dlogj / 24.0;
        worst = worst.max((dg - rhs).norm());
        mags = mags.max(dg.norm());
    }
    let name = match variant {
        GVariant::HalfPower => "g_tau_consistency",
        GVariant::ThreeQuarterPower => "g_tau_consistency_three_quarter_exponent",
    };
    let mut rep = VerificationReport::new(name, Some(*kind), CheckPoint::Branch(*b), FD_TOLERANCE);
    rep.residual("dg_vs_tau", worst / mags.max(1.0));
    rep.info.insert("step".into(), h);
    Ok(rep)
}

/// `H_i` built from the holomorphic rotation coefficients of `W` (no anti-holomorphic block).
fn holomorphic_hamiltonians(dc: &DoubleCovering) -> Result<[C64; 3]> {
    let cov = &dc.hol;
    let f = dc.f();
    let h1 = cov.eta1_over_omega();
    let mut h = [C64::new(0.0, 0.0); 3];
    for (i, hi) in h.iter_mut().enumerate() {
        for j in 0..3 {
            if j != i {
                let beta = 0.5 * f[i] * f[j] * (cov.e[3 - i - j] + h1);
                *hi += 0.5 * beta * beta * (cov.lambda[i] - cov.lambda[j]);
            }
        }
    }
    Ok(h)
}

/// Realness of `F` and `G` on the coordinate image of `b`, and the conjugate pair of gamma-terms.
///
/// For `DoubleT`, `log t6` adds a constant imaginary part, so `G` is tested through `G(b) - G(reference)`.
pub fn realness_check(b: &BranchTriple, kind: &StructureKind, reference: &BranchTriple) -> Result<VerificationReport> {
    let t = flat_coordinates(&covering_from_branch_points(b)?, kind)?.t;
    let f = eval_f(kind, &t)?;
    let g = eval_g(kind, &t, GVariant::HalfPower)?;
    let mut rep = VerificationReport::new("realness", Some(*kind), CheckPoint::Branch(*b), 1e-9);
    rep.residual("im_f", f.im.abs() / f.norm().max(1.0));
    let g_im = if kind.kind == Kind::DoubleT {
        let t0 = flat_coordinates(&covering_from_branch_points(reference)?, kind)?.t;
        (g - eval_g(kind, &t0, GVariant::HalfPower)?).im.abs()
    } else {
        g.im.abs()
    };
    rep.residual("im_g", g_im / g.norm().max(1.0));
    if matches!(kind.kind, Kind::DoubleS | Kind::DoubleT) {
        let (a, c) = gamma_terms(kind, &t)?;
        rep.residual("gamma_terms_conjugate", (a - c.conj()).norm() / a.norm().max(1.0));
    }
    Ok(rep)
}

/// Unit field: shifting all branch points by `delta` moves `t_1` at rate `-1` and fixes the rest.
pub fn unit_field_check(b: &BranchTriple, kind: &StructureKind, delta: f64) -> Result<VerificationReport> {
    let r = check_unit_field(b, kind, delta)?;
    let mut rep = VerificationReport::new("unit_field", Some(*kind), CheckPoint::Branch(*b), DEFAULT_TOLERANCE);
    rep.residual("shift_response", r.residual);
    Ok(rep)
}

/// Flatness of the rotation coefficients as a report.
pub fn flatness_report(b: &BranchTriple, step: f64) -> Result<VerificationReport> {
    let r = check_flatness(b, step)?;
    let mut rep = VerificationReport::new("flatness", None, CheckPoint::Branch(*b), FD_TOLERANCE);
    rep.residual("flat1", r.flat1);
    rep.residual("flat2", r.flat2);
    rep.residual("euler", r.euler);
    rep.info.insert("step".into(), r.step);
    if r.precision_warning {
        rep.notes.insert("precision".into(), "roundoff dominates truncation at this step".into());
    }
    Ok(rep)
}

/// Variational formulas for `mu`, the Schiffer and Bergman kernels as a report.
pub fn rauch_report(b: &BranchTriple, step: f64) -> Result<VerificationReport> {
    let r = check_rauch(b, step)?;
    let mut rep = VerificationReport::new("rauch", None, CheckPoint::Branch(*b), FD_TOLERANCE);
    rep.residual("rauch", r.rauch);
    rep.residual("rauch_bar", r.rauch_bar);
    rep.residual("omega_holo", r.omega_holo);
    rep.residual("omega_anti", r.omega_anti);
    rep.residual("bergman_holo", r.bergman_holo);
    rep.residual("bergman_anti", r.bergman_anti);
    rep.info.insert("step".into(), r.step);
    if r.precision_warning {
        rep.notes.insert("precision".into(), "roundoff dominates truncation at this step".into());
    }
    Ok(rep)
}

/// Random branch triple with moderate modulus, drawn from `rng`.
pub fn random_triple(rng: &mut ChaCha8Rng) -> BranchTriple {
    loop {
        let mut l = [C64::new(0.0, 0.0); 3];
        for v in l.iter_mut() {
            *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let Ok(b) = BranchTriple::new(l) else { continue };
        let sep = [(l[0] - l[1]).norm(), (l[1] - l[2]).norm(), (l[0] - l[2]).norm()];
        if sep.iter().any(|s| *s < 0.3) {
            continue;
        }
        match covering_from_branch_points(&b) {
            Ok(cov) if (0.6..=2.5).contains(&cov.im_mu()) => return b,
            _ => continue,
        }
    }
}

fn admissible(kind: &StructureKind, t: &[C64]) -> bool {
    if eval_f(kind, t).is_err() {
        return false;
    }
    if modular_arguments(kind, t).iter().any(|(_, a)| a.im <= MIN_MODULAR_IM) {
        return false;
    }
    let nu = euler_data(kind).nu;
    let active: Vec<usize> = (0..nu.len()).filter(|&a| nu[a] != 0.0).collect();
    singular_distance(kind, t) > 0.01
        && singular_distance_g(kind, t, GVariant::HalfPower, &active) > 0.01
        && eval_g(kind, t, GVariant::HalfPower).is_ok()
}

/// Seeded sample points: images of random triples with each coordinate perturbed by a
/// complex factor `1 + u`, `|u| <= 0.1`.
pub fn sample_points(kind: &StructureKind, count: usize, seed: u64) -> Result<Vec<PrepotentialPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 1000 * count.max(1) {
            return Err(Error::Domain("could not draw admissible sample points".into()));
        }
        let b = random_triple(&mut rng);
        let Ok(fc) = flat_coordinates(&covering_from_branch_points(&b)?, kind) else { continue };
        let t: Vec<C64> = fc
            .t
            .iter()
            .map(|v| {
                let r = 0.1 * rng.gen::<f64>().sqrt();
                let a = rng.gen_range(0.0..2.0 * PI);
                v * (1.0 + C64::from_polar(r, a))
            })
            .collect();
        if admissible(kind, &t) {
            out.push(PrepotentialPoint::new(t));
        }
    }
    Ok(out)
}

/// WDVV, metric, associativity, Euler and Getzler reports at one point, sharing one tensor.
pub fn point_suite(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine, seed: u64) -> Result<Vec<VerificationReport>> {
    let s = structure(kind, p, eng)?;
    let reps = vec![
        wdvv_report(kind, p, eng, &s),
        f1_report(kind, p, eng, &s),
        associativity_report(kind, p, eng, &s),
        euler_check(kind, p, eng)?,
        getzler_check(kind, p, eng)?,
    ];
    Ok(reps.into_iter().map(|r| r.with_seed(seed)).collect())
}

/// Every residual of `base` compared with reruns at doubled nodes and halved radius.
///
/// Residuals above the roundoff floor must stay within a factor of 10; the report's residual is
/// the largest violation ratio divided by 10 (passes at tolerance 1). Third derivatives on a
/// circle of radius `r` carry roundoff of order `eps |F| / r^3`, so the floor is
/// `max(NOISE_FLOOR, 100 eps |F| / r^3)` at the smaller of the two radii.
pub fn robustness_check(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine) -> Result<VerificationReport> {
    let base = wdvv_residual(kind, p, eng)?;
    let r0 = eng.radius_for(singular_distance(kind, &p.t))?;
    let f_scale = eval_f(kind, &p.t)?.norm().max(1.0);
    let floor = |r: f64| NOISE_FLOOR.max(100.0 * f64::EPSILON * f_scale / r.powi(3));
    let variants = [
        ("nodes_doubled", eng.with_nodes(eng.nodes * 2), r0),
        ("radius_halved", eng.with_radius(Some(0.5 * r0)), 0.5 * r0),
    ];
    let mut rep = VerificationReport::new("engine_robustness", Some(*kind), CheckPoint::Flat(p.clone()), 1.0)
        .with_engine(eng);
    for (name, e, r) in variants {
        let other = wdvv_residual(kind, p, &e)?;
        let fl = floor(r.min(r0));
        let mut worst: f64 = 0.0;
        for (k, v) in &base.residuals {
            let w = other.residuals.get(k).copied().unwrap_or(0.0);
            let (a, b) = (v.max(fl), w.max(fl));
            worst = worst.max(a.max(b) / a.min(b));
        }
        rep.residual(name, worst / 10.0);
        rep.info.insert(format!("{name}_floor"), fl);
    }
    Ok(rep)
}
