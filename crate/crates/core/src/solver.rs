//! Rayleigh–Ritz approximation of the fundamental tone on a 2-D star domain
//! for the free plate (`int u^2` in the denominator) and the Steklov plate
//! (`int_{boundary} u^2`), with energy `int |D^2 u|^2 + tau |D u|^2`.
//!
//! The trial space is all polynomials of total degree `<= d`, spanned by
//! tensor Legendre products `P_p(x/s) P_q(y/s)` with `s` the largest boundary
//! radius. Basis functions are ordered by total degree, so the degree `d - 2`
//! system is a leading block of the degree `d` one.

use crate::domain::StarDomain;
use crate::error::{Error, Result};
use crate::par;
use crate::quadrature::GaussLegendre;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Mutex, OnceLock};

pub const MIN_DEGREE: usize = 4;
pub const MAX_DEGREE: usize = 30;
/// Degree of the Steklov disk reference.
pub const REFERENCE_DEGREE: usize = 24;

const RAYS: usize = 512;
const RADIAL_NODES: usize = 40;
const BOUNDARY_POINTS: usize = 2048;
const RAYS_PER_CHUNK: usize = 16;
/// Relative eigenvalue cut-off of the scaled Gram matrix.
const GRAM_DROP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Neumann,
    Steklov,
}

impl std::str::FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "neumann" => Ok(Self::Neumann),
            "steklov" => Ok(Self::Steklov),
            _ => Err(Error::InvalidInput(format!("unknown problem {s:?}"))),
        }
    }
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Neumann => "neumann",
            Self::Steklov => "steklov",
        })
    }
}

/// Stiffness, mass and domain Gram matrices in the raw Legendre basis.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub basis_degree: usize,
    pub n_basis: usize,
    pub problem: Problem,
    pub tau: f64,
    /// Length scale `s` of the Legendre arguments.
    pub scale: f64,
    pub stiffness: DMatrix<f64>,
    /// `int_Omega u v` for the free plate, `int_{boundary} u v` for Steklov.
    pub mass: DMatrix<f64>,
    /// `int_Omega u v`, used to orthonormalise the basis.
    pub gram: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneEstimate {
    pub lambda2: f64,
    /// Next Ritz value above `lambda2`.
    pub lambda3: f64,
    pub basis_degree: usize,
    /// `lambda2(d - 2) - lambda2(d)`.
    pub delta_prev: f64,
    pub problem: Problem,
}

/// Number of polynomials of total degree `<= d` in two variables.
pub fn basis_size(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

/// Position of `P_p(x/s) P_q(y/s)` in the basis.
pub fn basis_index(p: usize, q: usize) -> usize {
    let n = p + q;
    n * (n + 1) / 2 + q
}

/// `P_k(t)`, `P_k'(t)`, `P_k''(t)` for `k = 0..=d`.
fn legendre_table(d: usize, t: f64, out: &mut [[f64; 3]]) {
    out[0] = [1.0, 0.0, 0.0];
    if d == 0 {
        return;
    }
    out[1] = [t, 1.0, 0.0];
    for k in 1..d {
        let kf = k as f64;
        let p = ((2.0 * kf + 1.0) * t * out[k][0] - kf * out[k - 1][0]) / (kf + 1.0);
        let dp = out[k - 1][1] + (2.0 * kf + 1.0) * out[k][0];
        let ddp = out[k - 1][2] + (2.0 * kf + 1.0) * out[k][1];
        out[k + 1] = [p, dp, ddp];
    }
}

/// Accumulates `c += a^T a` for a row-major `rows x n` block.
fn add_gram(c: &mut [f64], a: &[f64], rows: usize, n: usize) {
    if rows == 0 {
        return;
    }
    // SAFETY: `a` holds `rows * n` and `c` holds `n * n` elements; the
    // strides describe exactly those row-major layouts.
    unsafe {
        matrixmultiply::dgemm(
            n,
            rows,
            n,
            1.0,
            a.as_ptr(),
            1,
            n as isize,
            a.as_ptr(),
            n as isize,
            1,
            1.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

struct Evaluator {
    degree: usize,
    n: usize,
    scale: f64,
    px: Vec<[f64; 3]>,
    py: Vec<[f64; 3]>,
}

impl Evaluator {
    fn new(degree: usize, scale: f64) -> Self {
        Self {
            degree,
            n: basis_size(degree),
            scale,
            px: vec![[0.0; 3]; degree + 1],
            py: vec![[0.0; 3]; degree + 1],
        }
    }

    fn load(&mut self, x: f64, y: f64) {
        legendre_table(self.degree, x / self.scale, &mut self.px);
        legendre_table(self.degree, y / self.scale, &mut self.py);
    }

    /// Energy rows `[u_xx, sqrt2 u_xy, u_yy, sqrt(tau) u_x, sqrt(tau) u_y]`
    /// times `sqrt(w)`, and the value row times `sqrt(w)`.
    fn energy_rows(&mut self, x: f64, y: f64, w: f64, tau: f64, energy: &mut [f64], value: &mut [f64]) {
        self.load(x, y);
        let sw = w.sqrt();
        let inv = 1.0 / self.scale;
        let (c1, c2) = (sw * inv * tau.sqrt(), sw * inv * inv);
        let n = self.n;
        for total in 0..=self.degree {
            for q in 0..=total {
                let p = total - q;
                let j = basis_index(p, q);
                let (a, b) = (self.px[p], self.py[q]);
                energy[j] = c2 * a[2] * b[0];
                energy[n + j] = c2 * std::f64::consts::SQRT_2 * a[1] * b[1];
                energy[2 * n + j] = c2 * a[0] * b[2];
                energy[3 * n + j] = c1 * a[1] * b[0];
                energy[4 * n + j] = c1 * a[0] * b[1];
                value[j] = sw * a[0] * b[0];
            }
        }
    }

    fn value_row(&mut self, x: f64, y: f64, w: f64, out: &mut [f64]) {
        self.load(x, y);
        let sw = w.sqrt();
        for total in 0..=self.degree {
            for q in 0..=total {
                let p = total - q;
                out[basis_index(p, q)] = sw * self.px[p][0] * self.py[q][0];
            }
        }
    }
}

fn to_matrix(n: usize, data: Vec<f64>) -> DMatrix<f64> {
    let m = DMatrix::from_row_slice(n, n, &data);
    // Symmetrise against summation-order noise.
    (&m + m.transpose()) * 0.5
}

/// Assembles the raw Galerkin matrices on `d` at polynomial degree `degree`.
pub fn assemble(d: &StarDomain, tau: f64, degree: usize, problem: Problem) -> Result<GalerkinSystem> {
    if !(MIN_DEGREE..=MAX_DEGREE).contains(&degree) {
        return Err(Error::InvalidInput(format!(
            "degree {degree} outside [{MIN_DEGREE}, {MAX_DEGREE}]"
        )));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("tau = {tau} must be positive")));
    }
    let n = basis_size(degree);
    let scale = d.max_radius();
    let rule = GaussLegendre::new(RADIAL_NODES);
    let h = TAU / RAYS as f64;

    let chunks = par::map_ordered(RAYS / RAYS_PER_CHUNK, |chunk| {
        let rows = RAYS_PER_CHUNK * RADIAL_NODES;
        let mut energy = vec![0.0; 5 * rows * n];
        let mut value = vec![0.0; rows * n];
        let mut eval = Evaluator::new(degree, scale);
        let mut row = 0;
        for i in chunk * RAYS_PER_CHUNK..(chunk + 1) * RAYS_PER_CHUNK {
            let theta = h * i as f64;
            let (s, c) = theta.sin_cos();
            for (t, w) in rule.mapped(0.0, d.radius(theta)) {
                let (e, v) = (&mut energy[5 * row * n..5 * (row + 1) * n], &mut value[row * n..(row + 1) * n]);
                eval.energy_rows(t * c, t * s, w * t * h, tau, e, v);
                row += 1;
            }
        }
        let mut k = vec![0.0; n * n];
        let mut g = vec![0.0; n * n];
        add_gram(&mut k, &energy, 5 * rows, n);
        add_gram(&mut g, &value, rows, n);
        (k, g)
    });
    let mut k = vec![0.0; n * n];
    let mut g = vec![0.0; n * n];
    for (kc, gc) in chunks {
        k.iter_mut().zip(&kc).for_each(|(a, b)| *a += b);
        g.iter_mut().zip(&gc).for_each(|(a, b)| *a += b);
    }
    if k.iter().chain(&g).any(|v| !v.is_finite()) {
        return Err(Error::Quadrature("domain assembly"));
    }
    let stiffness = to_matrix(n, k);
    let gram = to_matrix(n, g);
    let mass = match problem {
        Problem::Neumann => gram.clone(),
        Problem::Steklov => {
            let hb = TAU / BOUNDARY_POINTS as f64;
            let mut rows = vec![0.0; BOUNDARY_POINTS * n];
            let mut eval = Evaluator::new(degree, scale);
            for i in 0..BOUNDARY_POINTS {
                let theta = hb * i as f64;
                let (s, c) = theta.sin_cos();
                let r = d.radius(theta);
                let arc = r.hypot(d.radius_prime(theta));
                eval.value_row(r * c, r * s, arc * hb, &mut rows[i * n..(i + 1) * n]);
            }
            let mut m = vec![0.0; n * n];
            add_gram(&mut m, &rows, BOUNDARY_POINTS, n);
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::Quadrature("boundary assembly"));
            }
            to_matrix(n, m)
        }
    };
    Ok(GalerkinSystem { basis_degree: degree, n_basis: n, problem, tau, scale, stiffness, mass, gram })
}

impl GalerkinSystem {
    /// The system restricted to the polynomials of degree `<= degree`.
    pub fn truncated(&self, degree: usize) -> Self {
        let n = basis_size(degree.min(self.basis_degree));
        let block = |m: &DMatrix<f64>| m.view((0, 0), (n, n)).into_owned();
        Self {
            basis_degree: degree.min(self.basis_degree),
            n_basis: n,
            problem: self.problem,
            tau: self.tau,
            scale: self.scale,
            stiffness: block(&self.stiffness),
            mass: block(&self.mass),
            gram: block(&self.gram),
        }
    }

    /// Positive Ritz values in ascending order, the zero mode excluded.
    pub fn ritz_values(&self) -> Result<Vec<f64>> {
        let n = self.n_basis;
        // Orthonormal basis of the trial space in the domain L^2 product,
        // from the eigenvectors of the Jacobi-scaled Gram matrix.
        let dscale = DVector::from_iterator(n, self.gram.diagonal().iter().map(|g| 1.0 / g.sqrt()));
        let scaled = DMatrix::from_fn(n, n, |i, j| dscale[i] * self.gram[(i, j)] * dscale[j]);
        let eig = SymmetricEigen::new(scaled);
        let top = eig.eigenvalues.max();
        let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > GRAM_DROP * top).collect();
        if keep.is_empty() {
            return Err(Error::DegenerateGram);
        }
        let q = DMatrix::from_fn(n, keep.len(), |i, c| {
            let k = keep[c];
            dscale[i] * eig.eigenvectors[(i, k)] / eig.eigenvalues[k].sqrt()
        });
        let kq = q.transpose() * &self.stiffness * &q;
        let mq = q.transpose() * &self.mass * &q;

        // Deflate the constant (basis function 0): restrict to the complement of
        // w = Q^T M e_0 through a Householder reflector.
        let w = q.transpose() * self.mass.column(0);
        let r = w.len();
        let mut v = w.clone();
        let norm = w.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateGram);
        }
        v[0] += norm.copysign(w[0]);
        let vv = v.dot(&v);
        let householder = DMatrix::identity(r, r) - (&v * v.transpose()) * (2.0 / vv);
        let z = householder.columns(1, r - 1).into_owned();
        let kz = sym(z.transpose() * &kq * &z);
        let mz = sym(z.transpose() * &mq * &z);

        // K = L L^T; the largest eigenvalues nu of L^-1 M L^-T are 1/lambda.
        // Directions without boundary mass give nu = 0 and drop out.
        let chol = kz.clone().cholesky().ok_or(Error::NoConvergence {
            what: "stiffness factorisation",
            iterations: 0,
        })?;
        let l = chol.l();
        let linv_m = l
            .solve_lower_triangular(&mz)
            .ok_or(Error::NoConvergence { what: "triangular solve", iterations: 0 })?;
        let c = l
            .solve_lower_triangular(&linv_m.transpose())
            .ok_or(Error::NoConvergence { what: "triangular solve", iterations: 0 })?;
        let nu = SymmetricEigen::new(sym(c)).eigenvalues;
        let nu_max = nu.max();
        let mut lambdas: Vec<f64> =
            nu.iter().filter(|&&x| x > 1e-14 * nu_max).map(|&x| 1.0 / x).collect();
        lambdas.sort_by(f64::total_cmp);
        if lambdas.is_empty() {
            return Err(Error::NoConvergence { what: "eigensolve", iterations: 0 });
        }
        Ok(lambdas)
    }

    pub fn tone(&self) -> Result<ToneEstimate> {
        let ritz = self.ritz_values()?;
        let previous = self.truncated(self.basis_degree - 2).ritz_values()?;
        Ok(ToneEstimate {
            lambda2: ritz[0],
            lambda3: ritz.get(1).copied().unwrap_or(f64::INFINITY),
            basis_degree: self.basis_degree,
            delta_prev: previous[0] - ritz[0],
            problem: self.problem,
        })
    }
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Galerkin fundamental tone of `d` at the given degree.
pub fn fundamental_tone(d: &StarDomain, tau: f64, degree: usize, problem: Problem) -> Result<ToneEstimate> {
    assemble(d, tau, degree, problem)?.tone()
}

/// Positive Ritz values of `d` at the given degree.
pub fn ritz_values(d: &StarDomain, tau: f64, degree: usize, problem: Problem) -> Result<Vec<f64>> {
    assemble(d, tau, degree, problem)?.ritz_values()
}

/// Tone of the unit disk at the reference degree, computed once per `tau`
/// and problem.
pub fn disk_reference(tau: f64, problem: Problem) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, Problem), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (tau.to_bits(), problem);
    if let Some(v) = cache.lock().expect("cache lock").get(&key) {
        return Ok(*v);
    }
    let v = fundamental_tone(&StarDomain::unit_disk(), tau, REFERENCE_DEGREE, problem)?.lambda2;
    cache.lock().expect("cache lock").insert(key, v);
    Ok(v)
}
