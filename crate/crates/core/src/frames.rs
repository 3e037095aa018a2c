//! Frame certification for finite sample sets `D ⊂ I_N × I_N`.
//!
//! The numerical oracle is the singular value decomposition of the analysis
//! matrix `M_{j,n} = h_N[n - k_j] e^{2πi l_jᵀn/N}`. For `d = 1` and `K = N`
//! distinct samples the algebraic predicate is
//! `Σ_j z_j - N z₀ ∈ Λ  ⇔  no frame`, with `z₀` the zero of `ϑ₁(i·, Ω)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::IndexSpace;
use crate::lattice::{dual_lattice_member, to_complex, ComplexPoint, GaborParams, TFPoint, C64, DEFAULT_LATTICE_TOL};
use crate::quadrature::chunked_map_reduce;
use crate::theta::{theta_zero_1d, weighted_theta_magnitude};
use crate::transforms::{periodize_sample, Signal, WindowSpec};

/// Default relative threshold on `A / B`.
pub const DEFAULT_FRAME_TAU: f64 = 1e-7;
/// Upper limit on the number of subsets in an exhaustive scan.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub k: Vec<usize>,
    pub l: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub n: usize,
    pub d: usize,
    pub samples: Vec<Sample>,
    pub distinct: bool,
    pub complex_images: Vec<ComplexPoint>,
}

impl PointSet {
    pub fn new(samples: Vec<Sample>, params: &GaborParams) -> Result<Self> {
        let (n, d) = (params.n(), params.d());
        for (j, s) in samples.iter().enumerate() {
            if s.k.len() != d || s.l.len() != d {
                return Err(Error::InvalidDimension(format!(
                    "sample {j} does not have {d} time and {d} frequency indices"
                )));
            }
            if s.k.iter().chain(&s.l).any(|&v| v >= n) {
                return Err(Error::SampleOutOfRange(format!(
                    "sample {j} = ({:?}, {:?}) has an index ≥ N = {n}",
                    s.k, s.l
                )));
            }
        }
        let space = IndexSpace::new(n, d);
        let mut keys: Vec<usize> =
            samples.iter().map(|s| space.flatten(&s.k) * space.len() + space.flatten(&s.l)).collect();
        keys.sort_unstable();
        let distinct = keys.windows(2).all(|w| w[0] != w[1]);
        let complex_images = samples.iter().map(|s| to_complex(&TFPoint::from_sample(&s.k, &s.l, n), params)).collect();
        Ok(PointSet { n, d, samples, distinct, complex_images })
    }

    /// `d = 1` convenience: pairs `(k, l)`.
    pub fn from_pairs(pairs: &[(usize, usize)], params: &GaborParams) -> Result<Self> {
        Self::new(pairs.iter().map(|&(k, l)| Sample { k: vec![k], l: vec![l] }).collect(), params)
    }

    /// Samples from flat time-frequency indices `k_flat · N^d + l_flat`.
    pub fn from_flat(flat: &[usize], params: &GaborParams) -> Result<Self> {
        let space = IndexSpace::new(params.n(), params.d());
        let len = space.len();
        Self::new(
            flat.iter().map(|&f| Sample { k: space.unflatten(f / len), l: space.unflatten(f % len) }).collect(),
            params,
        )
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingGuarantees {
    pub frame_by_count: bool,
    pub no_frame_by_count: bool,
    pub interpolation_by_count: bool,
    /// Interval `[1/K, (d!/K)^{1/d}]` for the Seshadri constant.
    pub seshadri_lower: f64,
    pub seshadri_upper: f64,
}

pub fn counting_guarantees(k: usize, params: &GaborParams) -> CountingGuarantees {
    let d = params.d();
    let n = params.n();
    let kf = k as f64;
    let d_fact: f64 = (1..=d).map(|v| v as f64).product();
    CountingGuarantees {
        frame_by_count: d == 1 && k > n,
        no_frame_by_count: k < params.dim() || (d == 1 && k < n),
        interpolation_by_count: n > d * k,
        seshadri_lower: 1.0 / kf,
        seshadri_upper: (d_fact / kf).powf(1.0 / d as f64),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityResult {
    pub applicable: bool,
    pub no_frame: bool,
    /// `s = Σ z_j - N z₀` as `[re, im]` pairs.
    pub s: Vec<[f64; 2]>,
    /// Integer coefficients `(a, b)` with `s ≈ -iΩa + ib`.
    pub witness_a: Vec<i64>,
    pub witness_b: Vec<i64>,
    pub residual: f64,
    /// `N` even, `N | Σk` and `N | Σl`.
    pub integer_form: bool,
}

/// Algebraic no-frame test for `d = 1`, `K = N` distinct samples.
pub fn parity_predicate(points: &PointSet, params: &GaborParams) -> Result<ParityResult> {
    check_parity_applicable(points, params)?;
    let z0 = theta_zero_1d(params)?;
    parity_predicate_with_zero(points, params, z0.z[0])
}

fn check_parity_applicable(points: &PointSet, params: &GaborParams) -> Result<()> {
    if params.d() != 1 {
        return Err(Error::NotApplicable(format!("parity predicate needs d = 1, got d = {}", params.d())));
    }
    if points.len() != params.n() {
        return Err(Error::NotApplicable(format!(
            "parity predicate needs K = N = {}, got K = {}",
            params.n(),
            points.len()
        )));
    }
    if !points.distinct {
        return Err(Error::NotApplicable("parity predicate needs distinct samples".into()));
    }
    Ok(())
}

/// [`parity_predicate`] with a precomputed zero `z₀`.
pub fn parity_predicate_with_zero(points: &PointSet, params: &GaborParams, z0: C64) -> Result<ParityResult> {
    check_parity_applicable(points, params)?;
    let n = params.n();
    let sum: C64 = points.complex_images.iter().map(|c| c.z[0]).sum();
    let s = sum - z0 * n as f64;
    let m = dual_lattice_member(&[s], params, 1.0, DEFAULT_LATTICE_TOL);
    let sk: usize = points.samples.iter().map(|p| p.k[0]).sum();
    let sl: usize = points.samples.iter().map(|p| p.l[0]).sum();
    let integer_form = n.is_multiple_of(2) && sk.is_multiple_of(n) && sl.is_multiple_of(n);
    if integer_form != m.member {
        return Err(Error::Inconsistent(format!(
            "lattice membership ({}, residual {:e}) disagrees with the integer form ({integer_form})",
            m.member, m.residual
        )));
    }
    Ok(ParityResult {
        applicable: true,
        no_frame: m.member,
        s: vec![[s.re, s.im]],
        witness_a: m.a,
        witness_b: m.b,
        residual: m.residual,
        integer_form,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub k: usize,
    pub dim: usize,
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    pub is_frame: bool,
    /// Singular values of the analysis matrix, descending.
    pub singular_values: Vec<f64>,
    pub parity: Option<ParityResult>,
    /// Why the parity predicate was skipped, if it was.
    pub parity_skipped: Option<String>,
    pub guarantees: CountingGuarantees,
}

/// `M_{j,n} = h_N[n - k_j] e^{2πi l_jᵀn/N}`.
pub fn analysis_matrix(points: &PointSet, window: &Signal) -> DMatrix<C64> {
    let space = window.space();
    let len = space.len();
    let nf = space.n as f64;
    DMatrix::from_fn(points.len(), len, |j, n| {
        let s = &points.samples[j];
        let kf = space.flatten(&s.k);
        let lf = space.flatten(&s.l);
        let ph = (space.dot(lf, n) % space.n) as f64 / nf;
        window.coeffs()[space.sub(n, kf)] * C64::from_polar(1.0, 2.0 * PI * ph)
    })
}

/// Squared extreme singular values `(A, B)` and all singular values.
pub fn frame_constants(points: &PointSet, window: &Signal) -> Result<(f64, f64, Vec<f64>)> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let m = analysis_matrix(points, window);
    let mut sv: Vec<f64> = m.singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let b = sv[0] * sv[0];
    let a = if points.len() < window.len() { 0.0 } else { sv[sv.len() - 1].powi(2) };
    Ok((a, b, sv))
}

pub fn frame_bounds(points: &PointSet, window: &WindowSpec, params: &GaborParams) -> Result<FrameReport> {
    frame_bounds_with(points, window, params, DEFAULT_FRAME_TAU, None)
}

/// Frame bounds with an explicit threshold and an optional precomputed `z₀`.
pub fn frame_bounds_with(
    points: &PointSet,
    window: &WindowSpec,
    params: &GaborParams,
    tau: f64,
    z0: Option<C64>,
) -> Result<FrameReport> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let h = periodize_sample(window)?;
    if h.space() != IndexSpace::new(params.n(), params.d()) {
        return Err(Error::ShapeMismatch { expected: params.dim(), got: h.len() });
    }
    let (a, b, singular_values) = frame_constants(points, &h)?;
    let (parity, parity_skipped) = match check_parity_applicable(points, params) {
        Err(e) => (None, Some(e.to_string())),
        Ok(()) => {
            let z0 = match z0 {
                Some(z) => z,
                None => theta_zero_1d(params)?.z[0],
            };
            (Some(parity_predicate_with_zero(points, params, z0)?), None)
        }
    };
    Ok(FrameReport {
        k: points.len(),
        dim: params.dim(),
        a,
        b,
        tau,
        is_frame: a > tau * b,
        singular_values,
        parity,
        parity_skipped,
        guarantees: counting_guarantees(points.len(), params),
    })
}

/// Translates for the no-frame witness: `t_i = z_i - z₀` for the first
/// `min(K, N-1)` samples, zeros up to `N - 1` entries, and a balancing point
/// so that the translates sum to zero.
pub fn translates_from_zero(points: &PointSet, z0: &[C64], params: &GaborParams) -> Vec<Vec<C64>> {
    let n = params.n();
    let d = params.d();
    let mut t: Vec<Vec<C64>> = Vec::with_capacity(n);
    for c in points.complex_images.iter().take(n.saturating_sub(1)) {
        t.push(c.z.iter().zip(z0).map(|(a, b)| a - b).collect());
    }
    while t.len() + 1 < n {
        t.push(vec![C64::new(0.0, 0.0); d]);
    }
    let bal: Vec<C64> = (0..d).map(|i| -t.iter().map(|v| v[i]).sum::<C64>()).collect();
    t.push(bal);
    t
}

/// For each sample, `min_i |ϑ₁(i(z_j - t_i))| e^{-φ₁(z_j - t_i)/2}`.
///
/// Samples where this vanishes lie on the divisor of the section
/// `Π_i ϑ₁(i(z - t_i))` of `L^{⊗N}`, which exists when `Σ t_i ∈ Λ`.
pub fn zero_set_diagnostic(points: &PointSet, translates: &[Vec<C64>], params: &GaborParams) -> Result<Vec<f64>> {
    let d = params.d();
    if translates.len() != params.n() {
        return Err(Error::Invalid(format!("expected N = {} translates, got {}", params.n(), translates.len())));
    }
    if translates.iter().any(|t| t.len() != d) {
        return Err(Error::InvalidDimension(format!("translates must have {d} components")));
    }
    let sum: Vec<C64> = (0..d).map(|i| translates.iter().map(|t| t[i]).sum()).collect();
    let m = dual_lattice_member(&sum, params, 1.0, DEFAULT_LATTICE_TOL);
    if !m.member {
        return Err(Error::TranslateSumNotInDualLattice { residual: m.residual });
    }
    points
        .complex_images
        .iter()
        .map(|c| {
            let mut best = f64::INFINITY;
            for t in translates {
                let w: Vec<C64> = c.z.iter().zip(t).map(|(a, b)| a - b).collect();
                best = best.min(weighted_theta_magnitude(&w, params)?);
            }
            Ok(best)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScanMode {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub samples: Vec<Sample>,
    pub oracle_frame: bool,
    pub predicate_frame: bool,
    /// `sqrt(A / B)`.
    pub sigma_min_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// Lower edge of `log10(A / B)`; `-inf` collects exact zeros.
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub mode: ScanMode,
    pub tau: f64,
    pub total: usize,
    pub oracle_frames: usize,
    pub oracle_non_frames: usize,
    pub predicate_applicable: usize,
    pub both_frame: usize,
    pub both_no_frame: usize,
    pub predicate_frame_oracle_no: usize,
    pub predicate_no_oracle_frame: usize,
    pub count_frame_violations: usize,
    pub count_no_frame_violations: usize,
    pub disagreements: Vec<Disagreement>,
    pub margin_histogram: Vec<HistogramBin>,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}

fn all_subsets(total: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > total {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < total - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn random_subsets(total: usize, k: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut v = rand::seq::index::sample(&mut rng, total, k).into_vec();
            v.sort_unstable();
            v
        })
        .collect()
}

struct Outcome {
    a: f64,
    b: f64,
    predicate_frame: Option<bool>,
}

/// Run the SVD oracle, the parity predicate (where applicable) and the
/// counting guarantees over distinct `K`-subsets of `I_N × I_N`.
pub fn scan_subsets(params: &GaborParams, k: usize, mode: ScanMode) -> Result<ScanReport> {
    scan_subsets_with(params, k, mode, DEFAULT_FRAME_TAU)
}

pub fn scan_subsets_with(params: &GaborParams, k: usize, mode: ScanMode, tau: f64) -> Result<ScanReport> {
    if k == 0 {
        return Err(Error::EmptyPointSet);
    }
    let total = params.dim() * params.dim();
    if k > total {
        return Err(Error::Invalid(format!("K = {k} exceeds the {total} available samples")));
    }
    let subsets = match mode {
        ScanMode::Exhaustive => {
            let count = binomial(total as u128, k as u128);
            if count > EXHAUSTIVE_LIMIT {
                return Err(Error::TooManySubsets { count, limit: EXHAUSTIVE_LIMIT });
            }
            all_subsets(total, k)
        }
        ScanMode::Random { count, seed } => random_subsets(total, k, count, seed),
    };
    let h = periodize_sample(&WindowSpec::Gaussian(params.clone()))?;
    let applicable = params.d() == 1 && k == params.n();
    let z0 = if applicable { Some(theta_zero_1d(params)?.z[0]) } else { None };
    let outcomes = chunked_map_reduce(
        subsets.len(),
        64,
        |range| -> Result<Vec<Outcome>> {
            let mut out = Vec::with_capacity(range.len());
            for i in range {
                let pts = PointSet::from_flat(&subsets[i], params)?;
                let (a, b, _) = frame_constants(&pts, &h)?;
                let predicate_frame = match z0 {
                    Some(z) => Some(!parity_predicate_with_zero(&pts, params, z)?.no_frame),
                    None => None,
                };
                out.push(Outcome { a, b, predicate_frame });
            }
            Ok(out)
        },
        Ok(Vec::with_capacity(subsets.len())),
        |acc, part| {
            let mut acc = acc?;
            acc.extend(part?);
            Ok(acc)
        },
    )?;
    let guarantees = counting_guarantees(k, params);
    let mut report = ScanReport {
        n: params.n(),
        d: params.d(),
        k,
        mode,
        tau,
        total: outcomes.len(),
        oracle_frames: 0,
        oracle_non_frames: 0,
        predicate_applicable: 0,
        both_frame: 0,
        both_no_frame: 0,
        predicate_frame_oracle_no: 0,
        predicate_no_oracle_frame: 0,
        count_frame_violations: 0,
        count_no_frame_violations: 0,
        disagreements: Vec::new(),
        margin_histogram: margin_bins(),
    };
    for (subset, o) in subsets.iter().zip(&outcomes) {
        let ratio = if o.b > 0.0 { o.a / o.b } else { 0.0 };
        let oracle = o.a > tau * o.b;
        if oracle {
            report.oracle_frames += 1;
        } else {
            report.oracle_non_frames += 1;
        }
        if guarantees.frame_by_count && !oracle {
            report.count_frame_violations += 1;
        }
        if guarantees.no_frame_by_count && oracle {
            report.count_no_frame_violations += 1;
        }
        bin_ratio(&mut report.margin_histogram, ratio);
        if let Some(pred) = o.predicate_frame {
            report.predicate_applicable += 1;
            match (pred, oracle) {
                (true, true) => report.both_frame += 1,
                (false, false) => report.both_no_frame += 1,
                (true, false) => report.predicate_frame_oracle_no += 1,
                (false, true) => report.predicate_no_oracle_frame += 1,
            }
            if pred != oracle {
                report.disagreements.push(Disagreement {
                    samples: PointSet::from_flat(subset, params)?.samples,
                    oracle_frame: oracle,
                    predicate_frame: pred,
                    sigma_min_rel: ratio.sqrt(),
                });
            }
        }
    }
    Ok(report)
}

fn margin_bins() -> Vec<HistogramBin> {
    let mut bins = vec![HistogramBin { lo: f64::NEG_INFINITY, hi: -17.0, count: 0 }];
    for e in -17..0 {
        bins.push(HistogramBin { lo: e as f64, hi: (e + 1) as f64, count: 0 });
    }
    bins
}

fn bin_ratio(bins: &mut [HistogramBin], ratio: f64) {
    let l = if ratio > 0.0 { ratio.log10() } else { f64::NEG_INFINITY };
    let idx = bins.iter().position(|b| l >= b.lo && l < b.hi).unwrap_or(bins.len() - 1);
    bins[idx].count += 1;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(p: &GaborParams) -> WindowSpec {
        WindowSpec::Gaussian(p.clone())
    }

    #[test]
    fn counting_examples() {
        let g = counting_guarantees(5, &GaborParams::one_dim(4, 0.0, 1.0).unwrap());
        assert!(g.frame_by_count && !g.no_frame_by_count);
        let g = counting_guarantees(4, &GaborParams::one_dim(5, 0.0, 1.0).unwrap());
        assert!(g.interpolation_by_count && g.no_frame_by_count);
        let g = counting_guarantees(8, &GaborParams::imaginary_identity(2, 3).unwrap());
        assert!(g.no_frame_by_count);
        assert!((g.seshadri_upper - (2.0f64 / 8.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn full_sampling_is_tight() {
        let p = GaborParams::one_dim(3, 0.2, 1.1).unwrap();
        let flat: Vec<usize> = (0..9).collect();
        let pts = PointSet::from_flat(&flat, &p).unwrap();
        let r = frame_bounds(&pts, &gaussian(&p), &p).unwrap();
        let h = periodize_sample(&gaussian(&p)).unwrap();
        let expect = 3.0 * h.norm_sq();
        assert!((r.a - expect).abs() < 1e-12 * expect && (r.b - expect).abs() < 1e-12 * expect);
        assert!(r.parity.is_none());
    }

    #[test]
    fn no_frame_quadruple() {
        let p = GaborParams::one_dim(4, 0.0, 1.0).unwrap();
        let pts = PointSet::from_pairs(&[(0, 0), (1, 1), (2, 3), (1, 0)], &p).unwrap();
        let r = frame_bounds(&pts, &gaussian(&p), &p).unwrap();
        assert!(!r.is_frame);
        assert!(r.a / r.b < 1e-20, "A/B = {}", r.a / r.b);
        assert!(r.parity.unwrap().no_frame);
    }

    #[test]
    fn tilted_pair_is_frame() {
        let p = GaborParams::one_dim(2, 0.5, 1.0).unwrap();
        let pts = PointSet::from_pairs(&[(0, 0), (1, 1)], &p).unwrap();
        let par = parity_predicate(&pts, &p).unwrap();
        assert!(!par.no_frame);
        let r = frame_bounds(&pts, &gaussian(&p), &p).unwrap();
        assert!(r.is_frame);
    }

    #[test]
    fn not_applicable_cases() {
        let p = GaborParams::one_dim(3, 0.0, 1.0).unwrap();
        let pts = PointSet::from_pairs(&[(0, 0), (0, 0), (1, 2)], &p).unwrap();
        assert!(matches!(parity_predicate(&pts, &p), Err(Error::NotApplicable(_))));
        let pts = PointSet::from_pairs(&[(0, 0), (1, 2)], &p).unwrap();
        assert!(matches!(parity_predicate(&pts, &p), Err(Error::NotApplicable(_))));
        assert!(matches!(PointSet::from_pairs(&[(3, 0)], &p), Err(Error::SampleOutOfRange(_))));
        let empty = PointSet::from_pairs(&[], &p).unwrap();
        assert!(matches!(frame_bounds(&empty, &gaussian(&p), &p), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(all_subsets(4, 2).len(), 6);
        assert_eq!(binomial(16, 4), 1820);
        assert_eq!(all_subsets(16, 4).len(), 1820);
        let r = random_subsets(36, 7, 3, 9);
        assert_eq!(r, random_subsets(36, 7, 3, 9));
        assert!(r.iter().all(|s| s.len() == 7 && s.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn too_many_subsets() {
        let p = GaborParams::one_dim(8, 0.0, 1.0).unwrap();
        assert!(matches!(scan_subsets(&p, 8, ScanMode::Exhaustive), Err(Error::TooManySubsets { .. })));
    }

    #[test]
    fn diagnostic_on_constructed_point() {
        let p = GaborParams::one_dim(3, 0.2, 1.3).unwrap();
        let z0 = theta_zero_1d(&p).unwrap().z[0];
        let t = C64::new(0.37, -0.21);
        let pts = PointSet {
            n: 3,
            d: 1,
            samples: vec![],
            distinct: true,
            complex_images: vec![ComplexPoint { z: vec![z0 + t] }],
        };
        let tr = vec![vec![t], vec![C64::new(0.0, 0.0)], vec![-t]];
        let dist = zero_set_diagnostic(&pts, &tr, &p).unwrap();
        assert!(dist[0] < 1e-10);
        let bad = vec![vec![t], vec![C64::new(0.0, 0.0)], vec![C64::new(0.0, 0.0)]];
        assert!(matches!(zero_set_diagnostic(&pts, &bad, &p), Err(Error::TranslateSumNotInDualLattice { .. })));
    }
}
