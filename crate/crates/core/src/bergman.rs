//! Coefficient-level model of A²_α(B_N).
//!
//! The measure `dv_α` is normalized to total mass 1, which gives
//! `<z^k, z^k> = k! Γ(N+α+1) / Γ(N+|k|+α+1)` and `<z^k, z^m> = 0` for
//! `k != m`. [`mc_moment`] estimates the same integrals by sampling the
//! ball, independently of the closed form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::special::{ln_gamma, log_factorial_multi, LogValue};

/// Dimension `N >= 1` and weight `α > -1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpaceParams {
    dim: usize,
    alpha: f64,
}

impl SpaceParams {
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidParams("N must be >= 1".into()));
        }
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(Error::InvalidParams("alpha must be > -1".into()));
        }
        Ok(SpaceParams { dim, alpha })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ln Γ(N + α + 1 + degree)`.
    pub(crate) fn ln_gamma_shifted(&self, degree: u64) -> f64 {
        ln_gamma(self.dim as f64 + self.alpha + 1.0 + degree as f64)
    }
}

/// `||z^k||² = k! Γ(N+α+1) / Γ(N+|k|+α+1)`.
pub fn monomial_norm_sq(k: &MultiIndex, p: &SpaceParams) -> Result<LogValue> {
    k.check_dim(p.dim())?;
    Ok(LogValue::from_ln(
        log_factorial_multi(k) + p.ln_gamma_shifted(0) - p.ln_gamma_shifted(k.degree()),
    ))
}

/// Normalizing factor of `e_k = basis_coeff(k) · z^k`.
pub fn basis_coeff(k: &MultiIndex, p: &SpaceParams) -> Result<LogValue> {
    Ok(monomial_norm_sq(k, p)?.sqrt().recip())
}

/// Monte Carlo estimate of `<z^k, z^m>`.
///
/// `value` / `standard_error` describe the real part, `imag` /
/// `imag_standard_error` the imaginary part. The standard error is the
/// sample standard deviation over `sqrt(samples)` (zero when `samples == 1`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub imag: f64,
    pub imag_standard_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MomentEstimate {
    pub fn modulus(&self) -> f64 {
        self.value.hypot(self.imag)
    }

    pub fn combined_standard_error(&self) -> f64 {
        self.standard_error.hypot(self.imag_standard_error)
    }

    /// `(value - expected) / standard_error`; zero for an exact hit with
    /// zero error, infinite for a miss with zero error.
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = self.value - expected;
        if self.standard_error > 0.0 {
            diff / self.standard_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }
}

/// Generator for draw number `index` under `seed`.
///
/// Every draw owns a ChaCha stream, so a sample set is the same no matter
/// how draws are split between workers.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A point of `B_N` distributed by the normalized `v_α`.
///
/// `|z|²` is `Beta(N, α+1)`; the direction is uniform on the unit sphere of
/// `C^N` (normalized complex Gaussian vector), which also randomizes phases.
pub fn sample_ball<R: Rng + ?Sized>(p: &SpaceParams, rng: &mut R) -> Vec<Complex64> {
    let radial = Beta::new(p.dim() as f64, p.alpha() + 1.0).expect("valid Beta parameters");
    let t: f64 = radial.sample(rng);
    let mut dir: Vec<Complex64> = (0..p.dim())
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    let norm = dir.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = t.sqrt() / norm;
    for z in &mut dir {
        *z *= scale;
    }
    dir
}

/// Per-coordinate `(ln |z_i|, arg z_i)` for a fixed set of draws.
#[derive(Clone, Debug)]
pub struct BallSample {
    dim: usize,
    log_radius: Vec<f64>,
    angle: Vec<f64>,
}

impl BallSample {
    pub fn draw(p: &SpaceParams, samples: u64, seed: u64) -> Self {
        let dim = p.dim();
        let points: Vec<Vec<Complex64>> = (0..samples)
            .into_par_iter()
            .map(|i| sample_ball(p, &mut draw_rng(seed, i)))
            .collect();
        let mut log_radius = Vec::with_capacity(points.len() * dim);
        let mut angle = Vec::with_capacity(points.len() * dim);
        for z in points.iter().flatten() {
            log_radius.push(z.norm().ln());
            angle.push(z.arg());
        }
        BallSample {
            dim,
            log_radius,
            angle,
        }
    }

    pub fn len(&self) -> usize {
        self.log_radius.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.log_radius.is_empty()
    }

    /// `z^k conj(z)^m` at draw `i`, accumulated as modulus and phase so high
    /// degrees near the boundary do not underflow piecewise.
    fn integrand(&self, i: usize, k: &[u32], m: &[u32]) -> (f64, f64) {
        let base = i * self.dim;
        let mut log_mod = 0.0;
        let mut phase = 0.0;
        for c in 0..self.dim {
            let power = k[c] + m[c];
            if power > 0 {
                log_mod += f64::from(power) * self.log_radius[base + c];
            }
            let turn = i64::from(k[c]) - i64::from(m[c]);
            if turn != 0 {
                phase += turn as f64 * self.angle[base + c];
            }
        }
        let modulus = log_mod.exp();
        if phase == 0.0 {
            (modulus, 0.0)
        } else {
            (modulus * phase.cos(), modulus * phase.sin())
        }
    }

    pub fn estimate(&self, k: &MultiIndex, m: &MultiIndex, seed: u64) -> Result<MomentEstimate> {
        k.check_dim(self.dim)?;
        m.check_dim(self.dim)?;
        let mut re = Welford::default();
        let mut im = Welford::default();
        for i in 0..self.len() {
            let (a, b) = self.integrand(i, k.entries(), m.entries());
            re.push(a);
            im.push(b);
        }
        Ok(MomentEstimate {
            value: re.mean,
            standard_error: re.standard_error(),
            imag: im.mean,
            imag_standard_error: im.standard_error(),
            samples: self.len() as u64,
            seed,
        })
    }
}

#[derive(Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn standard_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        (self.m2.max(0.0) / (n - 1.0)).sqrt() / n.sqrt()
    }
}

/// Estimate `<z^k, z^m>` for many pairs from one sample set.
pub fn mc_moments(
    pairs: &[(MultiIndex, MultiIndex)],
    p: &SpaceParams,
    samples: u64,
    seed: u64,
) -> Result<Vec<MomentEstimate>> {
    if samples < 1 {
        return Err(Error::Precondition("samples must be >= 1".into()));
    }
    for (k, m) in pairs {
        k.check_dim(p.dim())?;
        m.check_dim(p.dim())?;
    }
    let draws = BallSample::draw(p, samples, seed);
    pairs
        .par_iter()
        .map(|(k, m)| draws.estimate(k, m, seed))
        .collect()
}

/// Estimate `<z^k, z^m> = ∫ z^k conj(z)^m dv_α`.
pub fn mc_moment(
    k: &MultiIndex,
    m: &MultiIndex,
    p: &SpaceParams,
    samples: u64,
    seed: u64,
) -> Result<MomentEstimate> {
    let mut out = mc_moments(&[(k.clone(), m.clone())], p, samples, seed)?;
    Ok(out.pop().expect("one pair"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn params(n: usize, a: f64) -> SpaceParams {
        SpaceParams::new(n, a).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SpaceParams::new(0, 0.0).is_err());
        assert_eq!(
            SpaceParams::new(2, -1.5),
            Err(Error::InvalidParams("alpha must be > -1".into()))
        );
        assert!(SpaceParams::new(2, -1.0).is_err());
        assert!(SpaceParams::new(1, -0.5).is_ok());
    }

    #[test]
    fn norm_examples() {
        let p = params(2, 0.0);
        assert_eq!(monomial_norm_sq(&mi(&[0, 0]), &p).unwrap().value(), 1.0);
        assert!((monomial_norm_sq(&mi(&[1, 0]), &p).unwrap().value() - 1.0 / 3.0).abs() < 1e-15);
        // 2! 1! Γ(4) / Γ(7) = 12 / 720
        let p1 = params(2, 1.0);
        let v = monomial_norm_sq(&mi(&[2, 1]), &p1).unwrap().value();
        assert!((v - 1.0 / 60.0).abs() < 1e-16);
    }

    #[test]
    fn norm_dimension_mismatch() {
        assert!(monomial_norm_sq(&mi(&[1, 0, 0]), &params(2, 0.0)).is_err());
    }

    #[test]
    fn basis_coeff_examples() {
        let p = params(2, 0.0);
        assert!((basis_coeff(&mi(&[0, 0]), &p).unwrap().value() - 1.0).abs() < 1e-15);
        assert!((basis_coeff(&mi(&[0, 0, 0]), &params(3, 2.7)).unwrap().value() - 1.0).abs() < 1e-15);
        assert!((basis_coeff(&mi(&[1, 0]), &p).unwrap().value() - 3f64.sqrt()).abs() < 1e-14);
        assert!((basis_coeff(&mi(&[1, 1]), &p).unwrap().value() - 12f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn basis_coeff_inverts_norm() {
        for p in [params(2, 0.0), params(3, 1.5), params(4, -0.5)] {
            for k in crate::lattice::enumerate_upto(p.dim(), 40).iter().step_by(7) {
                let b = basis_coeff(k, &p).unwrap();
                let nrm = monomial_norm_sq(k, &p).unwrap();
                assert!((b.squared() * nrm).rel_diff(LogValue::ONE) <= 1e-12);
            }
        }
    }

    #[test]
    fn constant_integrand_is_exact() {
        for p in [params(2, 0.0), params(3, 4.0)] {
            let est = mc_moment(&mi(&vec![0; p.dim()]), &mi(&vec![0; p.dim()]), &p, 1000, 9).unwrap();
            assert_eq!(est.value, 1.0);
            assert_eq!(est.standard_error, 0.0);
            assert_eq!(est.imag, 0.0);
        }
    }

    #[test]
    fn diagonal_moment_matches_closed_form() {
        let p = params(2, 0.0);
        let est = mc_moment(&mi(&[1, 0]), &mi(&[1, 0]), &p, 100_000, 42).unwrap();
        assert!((est.value - 1.0 / 3.0).abs() <= 5.0 * est.standard_error, "{est:?}");
        assert_eq!(est.imag, 0.0);
    }

    #[test]
    fn off_diagonal_moment_vanishes() {
        let p = params(2, 0.0);
        let est = mc_moment(&mi(&[1, 0]), &mi(&[0, 1]), &p, 100_000, 42).unwrap();
        assert!(est.value.abs() <= 5.0 * est.standard_error);
        assert!(est.modulus() <= 5.0 * est.combined_standard_error());
    }

    #[test]
    fn estimates_are_deterministic() {
        let p = params(3, 1.5);
        let a = mc_moment(&mi(&[1, 2, 0]), &mi(&[0, 1, 1]), &p, 5000, 7).unwrap();
        let b = mc_moment(&mi(&[1, 2, 0]), &mi(&[0, 1, 1]), &p, 5000, 7).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.standard_error.to_bits(), b.standard_error.to_bits());
        let c = mc_moment(&mi(&[1, 2, 0]), &mi(&[0, 1, 1]), &p, 5000, 8).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn samples_lie_in_ball() {
        let p = params(2, 0.0);
        for i in 0..10_000 {
            let z = sample_ball(&p, &mut draw_rng(1, i));
            let t: f64 = z.iter().map(|c| c.norm_sqr()).sum();
            assert!(t > 0.0 && t < 1.0);
        }
    }

    #[test]
    fn radial_and_coordinate_means() {
        let p = params(2, 0.0);
        let n = 100_000u64;
        let mut t_acc = Welford::default();
        let mut z1_acc = Welford::default();
        for i in 0..n {
            let z = sample_ball(&p, &mut draw_rng(3, i));
            t_acc.push(z.iter().map(|c| c.norm_sqr()).sum());
            z1_acc.push(z[0].norm_sqr());
        }
        // Beta(2, 1) mean is N / (N + α + 1) = 2/3
        assert!((t_acc.mean - 2.0 / 3.0).abs() <= 5.0 * t_acc.standard_error());
        assert!((z1_acc.mean - 1.0 / 3.0).abs() <= 5.0 * z1_acc.standard_error());
    }

    #[test]
    fn zero_samples_rejected() {
        let p = params(2, 0.0);
        assert!(mc_moment(&mi(&[0, 0]), &mi(&[0, 0]), &p, 0, 1).is_err());
    }

    #[test]
    fn z_score_edge_cases() {
        let est = MomentEstimate {
            value: 1.0,
            standard_error: 0.0,
            imag: 0.0,
            imag_standard_error: 0.0,
            samples: 1,
            seed: 0,
        };
        assert_eq!(est.z_score(1.0), 0.0);
        assert_eq!(est.z_score(0.5), f64::INFINITY);
    }
}
