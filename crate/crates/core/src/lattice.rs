//! Global parameters and coordinate bookkeeping between the real torus
//! `T_N = R^{2d} / (N Z^d × Z^d)` and the complex torus
//! `T_Ω = C^d / Λ`, `Λ = -iΩZ^d + iZ^d`.
//!
//! A time-frequency point `(x, ξ)` maps to `z = -i(Ωx/N + ξ)`. In these
//! coordinates the lattice is axis aligned (`x` mod `N`, `ξ` mod 1), so all
//! reductions happen on the real side and complex representatives are derived.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default absolute tolerance for integer-nearness of lattice coefficients.
pub const DEFAULT_LATTICE_TOL: f64 = 1e-9;

/// Dimension `d`, samples per axis `N` and a Siegel matrix `Ω`.
///
/// Construction validates symmetry of `Ω` and positive definiteness of
/// `Im Ω`; every value of this type is therefore usable as-is.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborParams {
    d: usize,
    n: usize,
    omega: DMatrix<C64>,
    re: DMatrix<f64>,
    im: DMatrix<f64>,
    im_inv: DMatrix<f64>,
    lambda_min: f64,
    lambda_max: f64,
    det_im: f64,
}

/// On-disk form: `{"d": int, "N": int, "omega_re": [[..]], "omega_im": [[..]]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ParamsFile {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub omega_re: Vec<Vec<f64>>,
    pub omega_im: Vec<Vec<f64>>,
}

impl GaborParams {
    /// Validate and build. Fails with `NonSymmetric` or `NotPositiveDefinite`.
    pub fn new(d: usize, n: usize, omega: DMatrix<C64>) -> Result<Self> {
        validate(d, n, omega)
    }

    /// `d = 1` convenience constructor with `Ω = re + i·im`.
    pub fn one_dim(n: usize, re: f64, im: f64) -> Result<Self> {
        Self::new(1, n, DMatrix::from_element(1, 1, C64::new(re, im)))
    }

    /// `Ω = i·I_d`.
    pub fn imaginary_identity(d: usize, n: usize) -> Result<Self> {
        let omega = DMatrix::from_fn(d, d, |i, j| if i == j { C64::i() } else { C64::new(0.0, 0.0) });
        Self::new(d, n, omega)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> &DMatrix<C64> {
        &self.omega
    }

    /// `Re Ω`.
    pub fn re(&self) -> &DMatrix<f64> {
        &self.re
    }

    /// `Im Ω`.
    pub fn im(&self) -> &DMatrix<f64> {
        &self.im
    }

    /// `(Im Ω)^{-1}`, which is also the matrix of the Chern form.
    pub fn im_inv(&self) -> &DMatrix<f64> {
        &self.im_inv
    }

    /// Smallest eigenvalue of `Im Ω`.
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    /// Largest eigenvalue of `Im Ω`.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn det_im(&self) -> f64 {
        self.det_im
    }

    /// `N^d`, the dimension of `S_N`.
    pub fn dim(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_purely_imaginary(&self) -> bool {
        self.re.iter().all(|v| *v == 0.0)
    }

    /// Same `Ω` and `d` with a different number of samples per axis.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("N must be positive".into()));
        }
        let mut p = self.clone();
        p.n = n;
        Ok(p)
    }

    /// `Ω·v` for a real vector.
    pub fn omega_times(&self, v: &[f64]) -> Vec<C64> {
        (0..self.d).map(|i| (0..self.d).map(|j| self.omega[(i, j)] * v[j]).sum()).collect()
    }

    /// `vᵀΩv` for a real vector.
    pub fn quad_form(&self, v: &[f64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.d {
            for j in 0..self.d {
                acc += self.omega[(i, j)] * (v[i] * v[j]);
            }
        }
        acc
    }

    /// `vᵀ(Im Ω)v` for a real vector.
    pub fn im_quad_form(&self, v: &[f64]) -> f64 {
        quad(&self.im, v)
    }

    pub fn to_file(&self) -> ParamsFile {
        let rows = |m: &DMatrix<f64>| (0..self.d).map(|i| (0..self.d).map(|j| m[(i, j)]).collect()).collect();
        ParamsFile { d: self.d, n: self.n, omega_re: rows(&self.re), omega_im: rows(&self.im) }
    }

    pub fn from_file(file: &ParamsFile) -> Result<Self> {
        let d = file.d;
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == d && m.iter().all(|r| r.len() == d);
        if !shape_ok(&file.omega_re) || !shape_ok(&file.omega_im) {
            return Err(Error::InvalidDimension(format!("omega_re and omega_im must be {d}x{d}")));
        }
        let omega = DMatrix::from_fn(d, d, |i, j| C64::new(file.omega_re[i][j], file.omega_im[i][j]));
        Self::new(d, file.n, omega)
    }
}

impl Serialize for GaborParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaborParams {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let file = ParamsFile::deserialize(de)?;
        GaborParams::from_file(&file).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn quad(m: &DMatrix<f64>, v: &[f64]) -> f64 {
    let d = v.len();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += m[(i, j)] * v[i] * v[j];
        }
    }
    acc
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// Check both Siegel invariants and precompute the derived matrices.
pub fn validate(d: usize, n: usize, omega: DMatrix<C64>) -> Result<GaborParams> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidDimension(format!("d and N must be positive (d={d}, N={n})")));
    }
    if omega.nrows() != d || omega.ncols() != d {
        return Err(Error::InvalidDimension(format!("omega is {}x{}, expected {d}x{d}", omega.nrows(), omega.ncols())));
    }
    if omega.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidDimension("omega has non-finite entries".into()));
    }
    let scale = omega.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let mut residual = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            residual = residual.max((omega[(i, j)] - omega[(j, i)]).norm());
        }
    }
    let bound = 1e-12 * scale;
    if residual > bound {
        return Err(Error::NonSymmetric { residual, bound });
    }
    // exact symmetrization of the tiny residual
    let omega = DMatrix::from_fn(d, d, |i, j| (omega[(i, j)] + omega[(j, i)]) * 0.5);
    let re = omega.map(|v| v.re);
    let im = omega.map(|v| v.im);
    let eig = im.clone().symmetric_eigen();
    let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let lambda_max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(lambda_min > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: lambda_min });
    }
    let det_im = eig.eigenvalues.iter().product();
    let im_inv = im.clone().try_inverse().ok_or(Error::SingularSystem { det: det_im })?;
    Ok(GaborParams { d, n, omega, re, im, im_inv, lambda_min, lambda_max, det_im })
}

/// A point of `T_N`: time `x ∈ [0,N)^d`, frequency `ξ ∈ [0,1)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TFPoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl TFPoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Self {
        TFPoint { x, xi }
    }

    /// The DGT sample `(k, l)` sits at `(x, ξ) = (k, l/N)`.
    pub fn from_sample(k: &[usize], l: &[usize], n: usize) -> Self {
        TFPoint { x: k.iter().map(|&v| v as f64).collect(), xi: l.iter().map(|&v| v as f64 / n as f64).collect() }
    }

    /// Reduce modulo the periods (`N` in time, 1 in frequency).
    pub fn reduced(&self, n: usize) -> Self {
        let nf = n as f64;
        TFPoint {
            x: self.x.iter().map(|&v| v.rem_euclid(nf)).collect(),
            xi: self.xi.iter().map(|&v| v.rem_euclid(1.0)).collect(),
        }
    }
}

/// A representative of a point of `C^d / Λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub z: Vec<C64>,
}

/// `z = -i(Ωx/N + ξ)`.
pub fn to_complex(p: &TFPoint, params: &GaborParams) -> ComplexPoint {
    let nf = params.n() as f64;
    let a: Vec<f64> = p.x.iter().map(|v| v / nf).collect();
    ComplexPoint { z: from_box_coords(&a, &p.xi, params) }
}

/// Inverse of [`to_complex`]; returns the unreduced `(x, ξ)`.
pub fn from_complex(z: &ComplexPoint, params: &GaborParams) -> Result<TFPoint> {
    if z.z.len() != params.d() {
        return Err(Error::InvalidDimension(format!("expected {} components, got {}", params.d(), z.z.len())));
    }
    let (a, b) = box_coords(&z.z, params);
    let nf = params.n() as f64;
    Ok(TFPoint { x: a.iter().map(|v| v * nf).collect(), xi: b })
}

/// Real coordinates `(a, b)` with `z = -i(Ωa + b)`.
pub fn box_coords(z: &[C64], params: &GaborParams) -> (Vec<f64>, Vec<f64>) {
    // iz = Ωa + b, so Im(iz) = (Im Ω) a and Re(iz) = (Re Ω) a + b
    let iz: Vec<C64> = z.iter().map(|v| C64::i() * v).collect();
    let im_part: Vec<f64> = iz.iter().map(|v| v.im).collect();
    let a = mat_vec(params.im_inv(), &im_part);
    let ra = mat_vec(params.re(), &a);
    let b = (0..z.len()).map(|i| iz[i].re - ra[i]).collect();
    (a, b)
}

/// `-i(Ωa + b)`.
pub fn from_box_coords(a: &[f64], b: &[f64], params: &GaborParams) -> Vec<C64> {
    let oa = params.omega_times(a);
    oa.iter().zip(b).map(|(w, bi)| -C64::i() * (w + bi)).collect()
}

/// Representative of `z` with box coordinates in `[0,1)^{2d}`.
pub fn reduce_to_box(z: &[C64], params: &GaborParams) -> Vec<C64> {
    let (a, b) = box_coords(z, params);
    let a: Vec<f64> = a.iter().map(|v| v.rem_euclid(1.0)).collect();
    let b: Vec<f64> = b.iter().map(|v| v.rem_euclid(1.0)).collect();
    from_box_coords(&a, &b, params)
}

/// Result of a lattice membership test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    /// Integer witness `(a, b)` in units of `scale`: `z ≈ scale·(-iΩa + ib)`.
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    /// Max distance of the solved coefficients to the nearest scaled integers,
    /// in units of `scale`.
    pub residual: f64,
}

/// Is `z = -iΩa + ib` with `a, b ∈ scale·Z^d` (within `tol`)?
pub fn dual_lattice_member(z: &[C64], params: &GaborParams, scale: f64, tol: f64) -> Membership {
    // iz = Ωa - b  =>  Im(iz) = (Im Ω) a,  b = (Re Ω) a - Re(iz)
    let iz: Vec<C64> = z.iter().map(|v| C64::i() * v).collect();
    let im_part: Vec<f64> = iz.iter().map(|v| v.im).collect();
    let a = mat_vec(params.im_inv(), &im_part);
    let ra = mat_vec(params.re(), &a);
    let b: Vec<f64> = (0..z.len()).map(|i| ra[i] - iz[i].re).collect();
    let mut residual = 0.0_f64;
    let mut round = |v: &f64| {
        let s = v / scale;
        let r = s.round();
        residual = residual.max((s - r).abs());
        r as i64
    };
    let ai: Vec<i64> = a.iter().map(&mut round).collect();
    let bi: Vec<i64> = b.iter().map(&mut round).collect();
    Membership { member: residual <= tol, a: ai, b: bi, residual }
}

/// The lattice vector `-iΩa + ib` for integer `a, b`.
pub fn lattice_vector(a: &[i64], b: &[i64], params: &GaborParams) -> Vec<C64> {
    let af: Vec<f64> = a.iter().map(|&v| v as f64).collect();
    let oa = params.omega_times(&af);
    oa.iter().zip(b).map(|(w, &bi)| -C64::i() * w + C64::i() * bi as f64).collect()
}
