//! Closed-form prepotentials and G-functions of the four structures, and their
//! derivatives by Cauchy quadrature.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use crate::cauchy::{derivative_1d, CrossScheme, DerivativeEngine};
use crate::cauchy;
use crate::error::{Error, Result};
use crate::frobenius::{Kind, StructureKind};
use crate::specialfn::{gamma_chazy, log_dedekind_eta, Modulus, SeriesConfig};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Relative distance to a singular locus below which evaluation is refused.
pub const SINGULARITY_TOLERANCE: f64 = 1e-3;

/// Smallest admissible imaginary part of a gamma or eta argument for sample points.
pub const MIN_MODULAR_IM: f64 = 0.05;

fn tpi() -> C64 {
    2.0 * PI * I
}

/// Which `t6` exponent the `DoubleT` G-function uses to use (`t6^{-1/2}` or `t6^{-3/4}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GVariant {
    /// `t6^{-1/2}`.
    HalfPower,
    /// `t6^{-3/4}`.
    ThreeQuarterPower,
}

/// A point in flat coordinates, all entries independent complex variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepotentialPoint {
    pub t: Vec<C64>,
}

impl PrepotentialPoint {
    pub fn new(t: Vec<C64>) -> Self {
        PrepotentialPoint { t }
    }
}

fn check_len(kind: &StructureKind, t: &[C64]) -> Result<()> {
    if t.len() != kind.dim() {
        return Err(Error::Domain(format!(
            "{} expects {} coordinates, got {}",
            kind.kind,
            kind.dim(),
            t.len()
        )));
    }
    Ok(())
}

/// Arguments of gamma (and eta) in the closed forms, with labels.
pub fn modular_arguments(kind: &StructureKind, t: &[C64]) -> Vec<(&'static str, C64)> {
    match kind.kind {
        Kind::HoloS => vec![("2 pi i t3", tpi() * t[2])],
        Kind::DoubleS => vec![
            ("t3/t6", t[2] / t[5]),
            ("2 pi i t3/(1 - 2 pi i t6)", tpi() * t[2] / (1.0 - tpi() * t[5])),
        ],
        Kind::DoubleT => vec![
            ("t3/t6", t[2] / t[5]),
            ("(1 - 2 pi i t3)/(2 pi i t6)", (1.0 - tpi() * t[2]) / (tpi() * t[5])),
        ],
        Kind::DoubleCombo => vec![
            ("t3/t6", t[2] / t[5]),
            (
                "(2 pi i t3 - sigma)/(1 - 2 pi i t6)",
                (tpi() * t[2] - kind.sigma) / (1.0 - tpi() * t[5]),
            ),
        ],
    }
}

/// Expressions whose zeros are poles of `F`, with their reference scales.
fn singular_loci(kind: &StructureKind, t: &[C64]) -> Vec<(&'static str, C64, f64)> {
    let scale36 = t.get(2).map_or(0.0, |v| v.norm()).max(t.get(5).map_or(0.0, |v| v.norm()));
    match kind.kind {
        Kind::HoloS => Vec::new(),
        Kind::DoubleS => vec![
            ("t3", t[2], scale36),
            ("t6", t[5], scale36),
            ("2 pi i t6 - 1", tpi() * t[5] - 1.0, 1.0),
        ],
        Kind::DoubleT => vec![("t6", t[5], scale36)],
        Kind::DoubleCombo => vec![
            ("t6", t[5], scale36),
            ("t3 - sigma t6", t[2] - kind.sigma * t[5], scale36),
            ("2 pi i t6 - 1", tpi() * t[5] - 1.0, 1.0),
        ],
    }
}

fn check_domain(kind: &StructureKind, t: &[C64]) -> Result<()> {
    check_len(kind, t)?;
    for (name, v, scale) in singular_loci(kind, t) {
        if !(v.norm() > SINGULARITY_TOLERANCE * scale) {
            return Err(Error::Domain(format!(
                "point within singularity tolerance of {name} = 0"
            )));
        }
    }
    for (idx, (name, a)) in modular_arguments(kind, t).into_iter().enumerate() {
        if gamma_coefficient_vanishes(t, idx) {
            continue;
        }
        if !(a.im > 0.0) {
            return Err(Error::Domain(format!(
                "gamma argument {name} = {a} is not in the upper half-plane"
            )));
        }
    }
    Ok(())
}

fn gamma(mu: C64, cfg: &SeriesConfig) -> Result<C64> {
    gamma_chazy(Modulus::new(mu)?, cfg)
}

/// The `idx`-th gamma-term carries the factor `t2^4` (first) or `t5^4` (second).
fn gamma_coefficient_vanishes(t: &[C64], idx: usize) -> bool {
    let c = if idx == 0 { t[1] } else { t[4] };
    c == C64::new(0.0, 0.0)
}

/// `gamma` at the `idx`-th modular argument; an exactly vanishing coefficient makes the
/// term zero without evaluating `gamma`, whose argument may then lie outside its domain.
fn gamma_term(t: &[C64], args: &[(&'static str, C64)], idx: usize, cfg: &SeriesConfig) -> Result<C64> {
    if gamma_coefficient_vanishes(t, idx) {
        return Ok(C64::new(0.0, 0.0));
    }
    gamma(args[idx].1, cfg)
}

/// Prepotential of the given structure.
pub fn eval_f(kind: &StructureKind, t: &[C64]) -> Result<C64> {
    eval_f_with(kind, t, &SeriesConfig::default())
}

pub fn eval_f_with(kind: &StructureKind, t: &[C64], cfg: &SeriesConfig) -> Result<C64> {
    check_domain(kind, t)?;
    let k = tpi();
    let pii = PI * I;
    let args = modular_arguments(kind, t);
    match kind.kind {
        Kind::HoloS => {
            let (t1, t2, t3) = (t[0], t[1], t[2]);
            let g = gamma_term(t, &args, 0, cfg)?;
            Ok(-0.25 * t1 * t2 * t2 + 0.5 * t1 * t1 * t3 - pii / 32.0 * t2.powu(4) * g)
        }
        Kind::DoubleS => {
            let (t1, t2, t3, t4, t5, t6) = (t[0], t[1], t[2], t[3], t[4], t[5]);
            let g1 = gamma_term(t, &args, 0, cfg)?;
            let g2 = gamma_term(t, &args, 1, cfg)?;
            let ik = 1.0 / k;
            let poly = -0.25 * t1 * t2 * t2 - 0.25 * t1 * t5 * t5 + 0.5 * t1 * t1 * t3
                - 0.5 * t1 * t4 * (2.0 * t6 - ik);
            let inv3 = (0.25 * t2 * t2 * t4 * (t6 - ik)
                + 0.25 * t4 * t5 * t5 * t6
                + 0.5 * t4 * t4 * t6 * (t6 - ik)
                + t2 * t2 * t5 * t5 / 16.0)
                / t3;
            let q2 = t2.powu(4) / 32.0
                * (-1.0 / (4.0 * pii) / (t6 * t6) * g1 + 1.0 / t3 - ik / (t3 * t6));
            let d = k * t6 - 1.0;
            let q5 = t5.powu(4) / 32.0 * (-pii / (d * d) * g2 + 1.0 / t3 + 1.0 / (t3 * d));
            Ok(poly + inv3 + q2 + q5)
        }
        Kind::DoubleT => {
            let (t1, t2, t3, t4, t5, t6) = (t[0], t[1], t[2], t[3], t[4], t[5]);
            let g1 = gamma_term(t, &args, 0, cfg)?;
            let g2 = gamma_term(t, &args, 1, cfg)?;
            let ik = 1.0 / k;
            let line1 = -0.25 * t1 * t2 * t2 - 0.25 * t1 * t5 * t5
                + 0.5 * t1 * t4 * (2.0 * t3 - ik)
                - 0.5 * t1 * t1 * t6
                - 0.5 * t3 * (t3 - ik) * t4 * t4 / t6
                - t2 * t2 * t5 * t5 / (16.0 * t6);
            let line2 = -t2.powu(4) / (32.0 * t6) - t2.powu(4) / (128.0 * pii * t6 * t6) * g1
                + t3 * t4 * t5 * t5 / (4.0 * t6);
            let line3 = -t5.powu(4) / (32.0 * t6) - t5.powu(4) / (128.0 * pii * t6 * t6) * g2
                + (t3 - ik) * t4 * t2 * t2 / (4.0 * t6);
            Ok(line1 + line2 + line3)
        }
        Kind::DoubleCombo => {
            let (t1, t2, t3, t4, t5, t6) = (t[0], t[1], t[2], t[3], t[4], t[5]);
            let s = kind.sigma;
            let g1 = gamma_term(t, &args, 0, cfg)?;
            let g2 = gamma_term(t, &args, 1, cfg)?;
            let d = k * t6 - 1.0;
            let p = t1 + t4;
            let m = t1 - t4;
            let inner = (t2 * t2 + t5 * t5) * t6 / 2.0 - t2 * t2 / (4.0 * pii) - p * t3 * t6
                + p * t3 / k
                + s * m * t6 * t6
                - s * m * t6 / k;
            Ok(-t2.powu(4) / (64.0 * pii * t6 * t6) * g1
                - pii / 16.0 * t5.powu(4) / (d * d) * g2
                - t2 * t2 / t6 * p / (8.0 * pii)
                - s / (8.0 * pii) * (t1 * t1 - t4 * t4)
                + t3 / t6 * p * p / (8.0 * pii)
                + pii / (2.0 * t6 * (t3 - s * t6) * d) * inner * inner)
        }
    }
}

/// The `DoubleT` prepotential in an alternative term grouping, written out separately.
pub fn eval_f_double_t_grouped(t: &[C64]) -> Result<C64> {
    let kind = StructureKind::double_t();
    check_domain(&kind, t)?;
    let cfg = SeriesConfig::default();
    let (t1, t2, t3, t4, t5, t6) = (t[0], t[1], t[2], t[3], t[4], t[5]);
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let c = 1.0 / two_pi_i;
    let zero = C64::new(0.0, 0.0);
    let gl = if t2 == zero { zero } else { gamma(t3 / t6, &cfg)? };
    let gr = if t5 == zero { zero } else { gamma((1.0 - two_pi_i * t3) / (two_pi_i * t6), &cfg)? };
    let t2sq = t2 * t2;
    let t5sq = t5 * t5;
    let mut f = -(t1 * t2sq) / 4.0;
    f -= t1 * t5sq / 4.0;
    f += t1 * t4 * (2.0 * t3 - c) / 2.0;
    f -= t1 * t1 * t6 / 2.0;
    f -= t3 * (t3 - c) * (t4 * t4 / t6) / 2.0;
    f -= (t2sq * t5sq / t6) / 16.0;
    f -= t2sq * t2sq / (t6 * 32.0);
    f -= (t2sq * t2sq / (t6 * t6)) * gl / (C64::new(0.0, 128.0 * PI));
    f += t3 * t4 * t5sq / (t6 * 4.0);
    f -= t5sq * t5sq / (t6 * 32.0);
    f -= (t5sq * t5sq / (t6 * t6)) * gr / (C64::new(0.0, 128.0 * PI));
    f += (t3 - c) * t4 * t2sq / (t6 * 4.0);
    Ok(f)
}

/// The two gamma-terms of a double prepotential, in display order.
pub fn gamma_terms(kind: &StructureKind, t: &[C64]) -> Result<(C64, C64)> {
    check_domain(kind, t)?;
    let cfg = SeriesConfig::default();
    let args = modular_arguments(kind, t);
    let pii = PI * I;
    let (t2, t5, t6) = (t[1], t[4], t[5]);
    match kind.kind {
        Kind::DoubleT => Ok((
            -t2.powu(4) / (32.0 * t6) - t2.powu(4) / (128.0 * pii * t6 * t6) * gamma(args[0].1, &cfg)?,
            -t5.powu(4) / (32.0 * t6) - t5.powu(4) / (128.0 * pii * t6 * t6) * gamma(args[1].1, &cfg)?,
        )),
        Kind::DoubleS => {
            let d = tpi() * t6 - 1.0;
            Ok((
                t2.powu(4) / 32.0 * (-1.0 / (4.0 * pii) / (t6 * t6) * gamma(args[0].1, &cfg)?),
                t5.powu(4) / 32.0 * (-pii / (d * d) * gamma(args[1].1, &cfg)?),
            ))
        }
        _ => Err(Error::Domain("gamma_terms is defined for double-s and double-t".into())),
    }
}

/// Arguments of the principal logarithms in `G`, with labels.
pub fn g_log_arguments(kind: &StructureKind, t: &[C64], variant: GVariant) -> Vec<(&'static str, C64)> {
    let mut v = match kind.kind {
        Kind::HoloS => vec![("t2", t[1])],
        _ => vec![("t2 t5", t[1] * t[4])],
    };
    match kind.kind {
        Kind::HoloS => {}
        Kind::DoubleS => v.push(("2 pi i t3/(t6 (2 pi i t6 - 1))", tpi() * t[2] / (t[5] * (tpi() * t[5] - 1.0)))),
        Kind::DoubleT => {
            let _ = variant;
            v.push(("t6", t[5]));
        }
        Kind::DoubleCombo => v.push((
            "(t3 - sigma t6)/(t6 (1 - 2 pi i t6))",
            (t[2] - kind.sigma * t[5]) / (t[5] * (1.0 - tpi() * t[5])),
        )),
    }
    v
}

/// Genus-one G-function with additive constant 0; powers via principal logarithms.
pub fn eval_g(kind: &StructureKind, t: &[C64], variant: GVariant) -> Result<C64> {
    check_len(kind, t)?;
    let cfg = SeriesConfig::default();
    let le = |m: C64| -> Result<C64> { log_dedekind_eta(Modulus::new(m)?, &cfg) };
    let logs = g_log_arguments(kind, t, variant);
    for (name, a) in &logs {
        if a.norm() == 0.0 {
            return Err(Error::Domain(format!("G: logarithm argument {name} vanishes")));
        }
    }
    let args = modular_arguments(kind, t);
    match kind.kind {
        Kind::HoloS => Ok(-(le(args[0].1)? + logs[0].1.ln() / 8.0)),
        Kind::DoubleS | Kind::DoubleCombo => Ok(-(le(args[0].1)?
            + le(args[1].1)?
            + logs[0].1.ln() / 8.0
            + logs[1].1.ln() / 2.0)),
        Kind::DoubleT => {
            let ex = match variant {
                GVariant::HalfPower => -0.5,
                GVariant::ThreeQuarterPower => -0.75,
            };
            Ok(-(le(args[0].1)? + le(args[1].1)? + logs[0].1.ln() / 8.0 + ex * logs[1].1.ln()))
        }
    }
}

/// Linearized distance in `t` from `p` to the nearest point where an expression
/// vanishes (poles) or a modular argument reaches the real axis.
pub fn singular_distance(kind: &StructureKind, t: &[C64]) -> f64 {
    let n = t.len();
    let h = 1e-7;
    let grad_l1 = |g: &dyn Fn(&[C64]) -> C64| -> f64 {
        let mut s = 0.0;
        for k in 0..n {
            let mut tp = t.to_vec();
            let mut tm = t.to_vec();
            tp[k] += h;
            tm[k] -= h;
            s += ((g(&tp) - g(&tm)) / (2.0 * h)).norm();
        }
        s
    };
    let mut d = f64::INFINITY;
    let n_loci = singular_loci(kind, t).len();
    for idx in 0..n_loci {
        let g = |x: &[C64]| singular_loci(kind, x)[idx].1;
        let gr = grad_l1(&g);
        if gr > 0.0 {
            d = d.min(g(t).norm() / gr);
        }
    }
    let n_args = modular_arguments(kind, t).len();
    for idx in 0..n_args {
        let g = |x: &[C64]| modular_arguments(kind, x)[idx].1;
        let gr = grad_l1(&g);
        if gr > 0.0 {
            d = d.min(g(t).im.max(0.0) / gr);
        }
    }
    d
}

/// Like [`singular_distance`] but also keeping clear of the logarithm cuts in `G`.
pub fn singular_distance_g(kind: &StructureKind, t: &[C64], variant: GVariant, active: &[usize]) -> f64 {
    let mut d = singular_distance(kind, t);
    let h = 1e-7;
    let n_logs = g_log_arguments(kind, t, variant).len();
    for idx in 0..n_logs {
        let g = |x: &[C64]| g_log_arguments(kind, x, variant)[idx].1;
        let mut gr = 0.0;
        for &k in active {
            let mut tp = t.to_vec();
            let mut tm = t.to_vec();
            tp[k] += h;
            tm[k] -= h;
            gr += ((g(&tp) - g(&tm)) / (2.0 * h)).norm();
        }
        if gr > 0.0 {
            let z = g(t);
            let cut = if z.re >= 0.0 { z.norm() } else { z.im.abs() };
            d = d.min(cut / gr);
        }
    }
    d
}

/// Single partial derivative of `F` with the engine's radius policy.
pub fn derivative(
    kind: &StructureKind,
    p: &PrepotentialPoint,
    multi_index: &[usize],
    eng: &DerivativeEngine,
) -> Result<C64> {
    let r = eng.radius_for(singular_distance(kind, &p.t))?;
    cauchy::derivative(&|x: &[C64]| eval_f(kind, x), &p.t, multi_index, r, eng)
}

/// Generic partial derivative of a user function at `p` with circles of radius `r`.
pub fn derivative_of<F>(f: &F, p: &PrepotentialPoint, multi_index: &[usize], r: f64, eng: &DerivativeEngine) -> Result<C64>
where
    F: Fn(&[C64]) -> Result<C64>,
{
    cauchy::derivative(f, &p.t, multi_index, r, eng)
}

/// Third derivatives `(F_i)_{lm} = d^3 F / dt_i dt_l dt_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThirdTensor {
    pub f: Vec<DMatrix<C64>>,
    /// Largest deviation between index permutations before symmetrization.
    pub symmetry_residual: f64,
    pub radius: f64,
}

/// All third partials of `F`, assembled into symmetric matrices.
pub fn third_tensor(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine) -> Result<ThirdTensor> {
    check_domain(kind, &p.t)?;
    let r = eng.radius_for(singular_distance(kind, &p.t))?;
    let n = p.t.len();
    let f = |x: &[C64]| eval_f(kind, x);
    let mut tens = vec![vec![vec![C64::new(0.0, 0.0); n]; n]; n];
    let mut sym: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                let mut mi = vec![0usize; n];
                mi[a] += 1;
                mi[b] += 1;
                mi[c] += 1;
                let v = match eng.cross_scheme {
                    CrossScheme::NestedCauchy => cauchy::derivative(&f, &p.t, &mi, r, eng)?,
                    CrossScheme::MixedCentral => {
                        // the lead variable is a choice: average the two extreme choices
                        let v1 = cauchy::derivative(&f, &p.t, &mi, r, eng)?;
                        let v2 = mixed_with_lead_last(&f, &p.t, &mi, r, eng)?;
                        sym = sym.max((v1 - v2).norm());
                        0.5 * (v1 + v2)
                    }
                };
                for (i, j, k) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                    tens[i][j][k] = v;
                }
            }
        }
    }
    let f = (0..n)
        .map(|i| DMatrix::from_fn(n, n, |l, m| tens[i][l][m]))
        .collect();
    Ok(ThirdTensor {
        f,
        symmetry_residual: sym,
        radius: r,
    })
}

fn mixed_with_lead_last<F>(f: &F, t: &[C64], mi: &[usize], r: f64, eng: &DerivativeEngine) -> Result<C64>
where
    F: Fn(&[C64]) -> Result<C64>,
{
    // reversing coordinates changes which variable the scheme picks as lead
    let n = t.len();
    let rev_t: Vec<C64> = t.iter().rev().copied().collect();
    let rev_mi: Vec<usize> = mi.iter().rev().copied().collect();
    let g = |x: &[C64]| {
        let back: Vec<C64> = x.iter().rev().copied().collect();
        debug_assert_eq!(back.len(), n);
        f(&back)
    };
    cauchy::derivative(&g, &rev_t, &rev_mi, r, eng)
}

/// Gradient of `F` by pure Cauchy derivatives.
pub fn gradient_f(kind: &StructureKind, p: &PrepotentialPoint, eng: &DerivativeEngine) -> Result<Vec<C64>> {
    let r = eng.radius_for(singular_distance(kind, &p.t))?;
    let f = |x: &[C64]| eval_f(kind, x);
    gradient(&f, &p.t, r, eng, &(0..p.t.len()).collect::<Vec<_>>())
}

/// Partial derivatives of `G` in the listed coordinates (others reported as zero).
pub fn gradient_g(
    kind: &StructureKind,
    p: &PrepotentialPoint,
    variant: GVariant,
    active: &[usize],
    eng: &DerivativeEngine,
) -> Result<Vec<C64>> {
    let r = eng.radius_for(singular_distance_g(kind, &p.t, variant, active))?;
    let g = |x: &[C64]| eval_g(kind, x, variant);
    gradient(&g, &p.t, r, eng, active)
}

fn gradient<F>(f: &F, t: &[C64], r: f64, eng: &DerivativeEngine, active: &[usize]) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<C64>,
{
    let n = t.len();
    let mut g = vec![C64::new(0.0, 0.0); n];
    for &k in active {
        let mut mi = vec![0usize; n];
        mi[k] = 1;
        g[k] = cauchy::derivative(f, t, &mi, r, eng)?;
    }
    Ok(g)
}
