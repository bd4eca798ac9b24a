//! Numerical differentiation of holomorphic functions by Cauchy-integral
//! quadrature (trapezoid rule on circles).
//!
//! For a single variable,
//! `f^(k)(z) ~ k! / (N r^k) sum_j f(z + r w^j) w^{-jk}`, `w = exp(2 pi i / N)`,
//! with aliasing error of order `(r / R)^N` where `R` is the distance to the
//! nearest singularity. Mixed partials use a tensor product of circles
//! (`NestedCauchy`) or central differences of lower-order Cauchy derivatives
//! (`MixedCentral`).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossScheme {
    NestedCauchy,
    MixedCentral,
}

/// Engine configuration. `radius = None` selects
/// `min(max_radius, distance / 2)` from the caller-supplied singularity distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEngine {
    pub radius: Option<f64>,
    pub max_radius: f64,
    pub nodes: usize,
    pub cross_scheme: CrossScheme,
    /// Step for `MixedCentral` differences, relative to the circle radius.
    pub central_step: f64,
}

impl Default for DerivativeEngine {
    fn default() -> Self {
        DerivativeEngine {
            radius: None,
            max_radius: 0.05,
            nodes: 32,
            cross_scheme: CrossScheme::NestedCauchy,
            central_step: 0.02,
        }
    }
}

impl DerivativeEngine {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 16 || !self.nodes.is_power_of_two() {
            return Err(Error::Domain(format!(
                "engine nodes must be a power of two >= 16, got {}",
                self.nodes
            )));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) {
                return Err(Error::Domain(format!("engine radius must be positive, got {r}")));
            }
        }
        Ok(())
    }

    /// Radius to use at a point whose nearest singularity is `distance` away.
    pub fn radius_for(&self, distance: f64) -> Result<f64> {
        self.validate()?;
        match self.radius {
            Some(r) if r >= distance => Err(Error::Domain(format!(
                "engine radius {r} exceeds the singularity distance {distance:.3e}"
            ))),
            Some(r) => Ok(r),
            None => {
                if !(distance > 0.0) {
                    return Err(Error::Domain("point lies on a singular locus".into()));
                }
                Ok(self.max_radius.min(0.5 * distance))
            }
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn with_radius(mut self, radius: Option<f64>) -> Self {
        self.radius = radius;
        self
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

fn roots(n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect()
}

/// All derivatives `f, f', ..., f^(kmax)` at `z` from one circle.
pub fn derivative_1d<F>(f: &F, z: C64, kmax: usize, r: f64, nodes: usize) -> Result<Vec<C64>>
where
    F: Fn(C64) -> Result<C64>,
{
    let w = roots(nodes);
    let vals: Vec<C64> = w.iter().map(|wj| f(z + r * wj)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let mut s = C64::new(0.0, 0.0);
        for (j, v) in vals.iter().enumerate() {
            s += v * w[(nodes - (j * k) % nodes) % nodes];
        }
        out.push(s * (factorial(k) / (nodes as f64 * r.powi(k as i32))));
    }
    Ok(out)
}

/// Partial derivative of total order `sum(multi_index)` of `f` at `p`, using circles of radius `r`.
pub fn derivative<F>(
    f: &F,
    p: &[C64],
    multi_index: &[usize],
    r: f64,
    eng: &DerivativeEngine,
) -> Result<C64>
where
    F: Fn(&[C64]) -> Result<C64>,
{
    eng.validate()?;
    if multi_index.len() != p.len() {
        return Err(Error::Domain("multi-index length does not match the point".into()));
    }
    let active: Vec<(usize, usize)> = multi_index
        .iter()
        .enumerate()
        .filter(|(_, &o)| o > 0)
        .map(|(v, &o)| (v, o))
        .collect();
    match active.len() {
        0 => f(p),
        1 => pure(f, p, active[0], r, eng.nodes),
        _ => match eng.cross_scheme {
            CrossScheme::NestedCauchy => nested(f, p, &active, r, eng.nodes),
            CrossScheme::MixedCentral => mixed_central(f, p, &active, r, eng),
        },
    }
}

fn pure<F>(f: &F, p: &[C64], (var, order): (usize, usize), r: f64, nodes: usize) -> Result<C64>
where
    F: Fn(&[C64]) -> Result<C64>,
{
    let g = |z: C64| {
        let mut y = p.to_vec();
        y[var] = z;
        f(&y)
    };
    let d = derivative_1d(&g, p[var], order, r, nodes)?;
    Ok(d[order])
}

fn nested<F>(f: &F, p: &[C64], active: &[(usize, usize)], r: f64, nodes: usize) -> Result<C64>
where
    F: Fn(&[C64]) -> Result<C64>,
{
    let w = roots(nodes);
    let dims = active.len();
    let mut idx = vec![0usize; dims];
    let mut x = p.to_vec();
    let mut acc = C64::new(0.0, 0.0);
    loop {
        let mut weight = C64::new(1.0, 0.0);
        for (d, &(var, order)) in active.iter().enumerate() {
            let j = idx[d];
            x[var] = p[var] + r * w[j];
            weight *= w[(nodes - (j * order) % nodes) % nodes];
        }
        acc += f(&x)? * weight;
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < nodes {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == dims {
                let mut scale = 1.0;
                for &(_, order) in active {
                    scale *= factorial(order) / (nodes as f64 * r.powi(order as i32));
                }
                return Ok(acc * scale);
            }
        }
    }
}

fn mixed_central<F>(
    f: &F,
    p: &[C64],
    active: &[(usize, usize)],
    r: f64,
    eng: &DerivativeEngine,
) -> Result<C64>
where
    F: Fn(&[C64]) -> Result<C64>,
{
    // highest-order variable by Cauchy, the rest by fourth-order central differences
    let (lead_pos, _) = active
        .iter()
        .enumerate()
        .max_by_key(|(_, &(_, o))| o)
        .expect("at least two active variables");
    let lead = active[lead_pos];
    let rest: Vec<(usize, usize)> = active
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != lead_pos)
        .map(|(_, a)| *a)
        .collect();
    let h = eng.central_step * r;
    central(&|q: &[C64]| pure(f, q, lead, r, eng.nodes), p, &rest, h)
}

fn central<G>(g: &G, p: &[C64], rest: &[(usize, usize)], h: f64) -> Result<C64>
where
    G: Fn(&[C64]) -> Result<C64>,
{
    let Some((&(var, order), tail)) = rest.split_first() else {
        return g(p);
    };
    let inner = |q: &[C64]| central(g, q, tail, h);
    let at = |s: f64| -> Result<C64> {
        let mut q = p.to_vec();
        q[var] += s * h;
        inner(&q)
    };
    // fourth-order stencils
    match order {
        1 => Ok((-at(2.0)? + 8.0 * at(1.0)? - 8.0 * at(-1.0)? + at(-2.0)?) / (12.0 * h)),
        2 => Ok((-at(2.0)? + 16.0 * at(1.0)? - 30.0 * at(0.0)? + 16.0 * at(-1.0)? - at(-2.0)?)
            / (12.0 * h * h)),
        _ => Err(Error::Domain(
            "mixed_central supports order <= 2 in secondary variables".into(),
        )),
    }
}
