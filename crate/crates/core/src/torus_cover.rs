//! Two-sheeted genus-one coverings `lambda(zeta) = p(zeta) + c` parametrized by
//! their three finite branch points.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfn::{carlson_rf, Lattice, Modulus, SeriesConfig};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default relative separation below which branch points count as coincident.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

const ROUNDTRIP_TOLERANCE: f64 = 1e-10;

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Three finite, pairwise distinct branch points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchTriple {
    pub lambda: [C64; 3],
}

impl BranchTriple {
    pub fn new(lambda: [C64; 3]) -> Result<Self> {
        Self::with_tolerance(lambda, DEGENERACY_TOLERANCE)
    }

    pub fn with_tolerance(lambda: [C64; 3], tol: f64) -> Result<Self> {
        if lambda.iter().any(|l| !l.re.is_finite() || !l.im.is_finite()) {
            return Err(Error::Domain("branch points must be finite".into()));
        }
        let d = [
            (lambda[0] - lambda[1]).norm(),
            (lambda[1] - lambda[2]).norm(),
            (lambda[0] - lambda[2]).norm(),
        ];
        let scale = d.iter().cloned().fold(0.0, f64::max);
        let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
        if scale == 0.0 || min <= tol * scale {
            return Err(Error::Degeneracy(format!(
                "branch points {lambda:?} are (nearly) coincident"
            )));
        }
        Ok(BranchTriple { lambda })
    }

    pub fn lemniscatic() -> Self {
        BranchTriple {
            lambda: [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        }
    }

    pub fn equianharmonic() -> Self {
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        BranchTriple {
            lambda: [C64::new(1.0, 0.0), w, w * w],
        }
    }

    /// `lambda_k -> a lambda_k + b`.
    pub fn affine(&self, a: C64, b: C64) -> Result<Self> {
        Self::new(self.lambda.map(|l| a * l + b))
    }
}

/// Torus data of the covering; labels follow the input order:
/// `lambda_1 <-> omega`, `lambda_2 <-> omega + omega'`, `lambda_3 <-> omega'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusCovering {
    pub omega: C64,
    pub omega_prime: C64,
    pub c: C64,
    pub mu: Modulus,
    pub e: [C64; 3],
    pub ram_points: [C64; 3],
    pub lambda: [C64; 3],
    /// Label permutation used for the period integrals; reused by nearby coverings.
    pub perm: [usize; 3],
    pub lattice: Lattice,
}

/// `d zeta / d x_i` at the ramification points, `x_i = sqrt(lambda - lambda_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalFrame {
    pub dzeta_dx: [C64; 3],
}

fn on_cut(m: C64) -> bool {
    m.im.abs() <= 1e-12 * (1.0 + m.norm()) && (m.re <= 0.0 || m.re >= 1.0)
}

struct Candidate {
    perm: [usize; 3],
    big_omega: C64,
    big_omega_prime: C64,
}

/// `(omega, omega')`: the half-periods whose classes carry `e[0]` and `e[2]`, with `Im(omega'/omega) > 0`.
fn label_periods(cand: &Candidate) -> (C64, C64) {
    let half = |label: usize| -> C64 {
        if cand.perm[0] == label {
            cand.big_omega
        } else if cand.perm[2] == label {
            cand.big_omega_prime
        } else {
            cand.big_omega + cand.big_omega_prime
        }
    };
    let omega = half(0);
    let mut omega_prime = half(2);
    if (omega_prime / omega).im < 0.0 {
        omega_prime = -omega_prime;
    }
    (omega, omega_prime)
}

fn candidate(e: &[C64; 3], perm: [usize; 3], cfg: &SeriesConfig) -> Option<(Candidate, f64)> {
    let ee = [e[perm[0]], e[perm[1]], e[perm[2]]];
    let m = (ee[1] - ee[2]) / (ee[0] - ee[2]);
    if on_cut(m) {
        return None;
    }
    let s = (ee[0] - ee[2]).sqrt();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let w = carlson_rf(zero, one - m, one).ok()? / s;
    let wp = I * carlson_rf(zero, m, one).ok()? / s;
    let lat = Lattice::new(w, wp, cfg).ok()?;
    let scale = e.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let err = (lat.p(w).ok()? - ee[0]).norm()
        + (lat.p(wp).ok()? - ee[2]).norm()
        + (lat.p(w + wp).ok()? - ee[1]).norm();
    if !(err <= ROUNDTRIP_TOLERANCE * scale) {
        return None;
    }
    Some((
        Candidate {
            perm,
            big_omega: w,
            big_omega_prime: wp,
        },
        lat.mu.value().im,
    ))
}

/// Build the covering for `b`, choosing the best-conditioned period integrals.
pub fn covering_from_branch_points(b: &BranchTriple) -> Result<TorusCovering> {
    covering_with_config(b, None, &SeriesConfig::default())
}

/// Like [`covering_from_branch_points`] but reusing the permutation of a nearby covering.
/// The sign of `(omega, omega')` is also continued from the reference.
pub fn covering_near(b: &BranchTriple, reference: &TorusCovering) -> Result<TorusCovering> {
    build(b, Some(reference.perm), Some(reference.omega), &reference.lattice.cfg)
}

pub fn covering_with_config(
    b: &BranchTriple,
    perm: Option<[usize; 3]>,
    cfg: &SeriesConfig,
) -> Result<TorusCovering> {
    build(b, perm, None, cfg)
}

fn build(
    b: &BranchTriple,
    perm: Option<[usize; 3]>,
    reference_omega: Option<C64>,
    cfg: &SeriesConfig,
) -> Result<TorusCovering> {
    let lambda = b.lambda;
    let c = (lambda[0] + lambda[1] + lambda[2]) / 3.0;
    let e = lambda.map(|l| l - c);
    let finals: Vec<(Candidate, C64, C64)> = match perm {
        Some(p) => candidate(&e, p, cfg).into_iter().collect::<Vec<_>>(),
        None => PERMUTATIONS.iter().filter_map(|&p| candidate(&e, p, cfg)).collect::<Vec<_>>(),
    }
    .into_iter()
    .map(|(cand, _)| {
        let (w, wp) = label_periods(&cand);
        (cand, w, wp)
    })
    .collect();
    // largest Im mu of the labelled basis; near-ties go to the earlier permutation
    let mut best: Option<&(Candidate, C64, C64)> = None;
    for f in &finals {
        let im = (f.2 / f.1).im;
        match best {
            Some(b) if im <= (b.2 / b.1).im * (1.0 + 1e-9) => {}
            _ => best = Some(f),
        }
    }
    let (best, mut omega, mut omega_prime) = match best {
        Some((c, w, wp)) => (c, *w, *wp),
        None => {
            return Err(Error::Precision(format!("no admissible period integrals for {lambda:?}")));
        }
    };
    // the square root in the period integrals can flip both signs under perturbation
    if let Some(r) = reference_omega {
        if (omega + r).norm() < (omega - r).norm() {
            omega = -omega;
            omega_prime = -omega_prime;
        }
    }
    let lattice = Lattice::new(omega, omega_prime, cfg)?;
    let ram_points = [omega, omega + omega_prime, omega_prime];
    let scale = e.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    for k in 0..3 {
        let err = (lattice.p(ram_points[k])? - e[k]).norm();
        if !(err <= ROUNDTRIP_TOLERANCE * scale) {
            return Err(Error::Precision(format!(
                "roundtrip failed at branch point {k}: error {err:.3e}"
            )));
        }
    }
    Ok(TorusCovering {
        omega,
        omega_prime,
        c,
        mu: lattice.mu,
        e,
        ram_points,
        lambda,
        perm: best.perm,
        lattice,
    })
}

impl TorusCovering {
    /// `p''(zeta_i) = 2 (e_i - e_j)(e_i - e_k)`.
    pub fn p2_at_ramification(&self, i: usize) -> C64 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        2.0 * (self.e[i] - self.e[j]) * (self.e[i] - self.e[k])
    }

    /// `eta1 / omega`, the constant making the a-period of `W` vanish.
    pub fn eta1_over_omega(&self) -> C64 {
        self.lattice.eta1 / self.omega
    }

    pub fn im_mu(&self) -> f64 {
        self.mu.value().im
    }

    /// Same torus with the basis `(omega, omega') -> (omega', -omega)`.
    pub fn lattice_swapped(&self) -> Result<Lattice> {
        Lattice::new(self.omega_prime, -self.omega, &self.lattice.cfg)
    }

    /// Point with `lambda(zeta) = target`, by Newton iteration from `zeta0`.
    pub fn solve_zeta(&self, target: C64, zeta0: C64) -> Result<C64> {
        let mut z = zeta0;
        let mut prev = f64::INFINITY;
        for _ in 0..50 {
            let (p, p1, _) = self.lattice.p_all(z)?;
            let dz = (p + self.c - target) / p1;
            let step = dz.norm();
            // near a ramification point p' is small and roundoff stalls the step above 1e-15
            if step >= prev && step <= 1e-8 * (1.0 + z.norm()) {
                return Ok(z);
            }
            z -= dz;
            if step <= 1e-15 * (1.0 + z.norm()) {
                return Ok(z);
            }
            prev = step;
        }
        Err(Error::Precision(format!("Newton solve for lambda = {target} did not converge")))
    }
}

/// `lambda(zeta) = p(zeta) + c`.
pub fn lambda_map(cov: &TorusCovering, zeta: C64) -> Result<C64> {
    Ok(cov.lattice.p(zeta)? + cov.c)
}

/// Frame factors `sqrt(2 / p''(zeta_i))` on the principal branch.
pub fn local_frame(cov: &TorusCovering) -> Result<LocalFrame> {
    let mut f = [C64::new(0.0, 0.0); 3];
    for (i, fi) in f.iter_mut().enumerate() {
        let p2 = cov.p2_at_ramification(i);
        if p2.norm() == 0.0 {
            return Err(Error::Degeneracy(format!("p'' vanishes at ramification point {i}")));
        }
        let r = 2.0 / p2;
        // signed zeros would pick the lower lip of the principal cut
        *fi = C64::new(r.re + 0.0, r.im + 0.0).sqrt();
    }
    Ok(LocalFrame { dzeta_dx: f })
}

/// Frame factors continued from `reference`: each square root takes the sign nearest to it.
pub fn local_frame_near(cov: &TorusCovering, reference: &LocalFrame) -> Result<LocalFrame> {
    let mut fr = local_frame(cov)?;
    for (f, r) in fr.dzeta_dx.iter_mut().zip(reference.dzeta_dx.iter()) {
        if (*f + r).norm() < (*f - r).norm() {
            *f = -*f;
        }
    }
    Ok(fr)
}
