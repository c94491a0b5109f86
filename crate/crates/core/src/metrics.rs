//! PAR measures, empirical distributions and ball-volume diagnostics.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::dft::UnitaryDft;
use crate::error::{Error, Result};
use crate::model::ValidatedConfig;
use crate::precoder::DesignOperators;
use crate::scalar::{norm_sqr, to_f64, Real, C};

/// `10 log10(x)`.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn check_len<T: Real>(x: &[C<T>], cfg: &ValidatedConfig) -> Result<()> {
    if x.len() != cfg.signal_len() {
        return Err(Error::Length {
            expected: cfg.signal_len(),
            got: x.len(),
        });
    }
    Ok(())
}

fn block_par<T: Real>(block: &[C<T>]) -> Option<f64> {
    let mut peak = 0.0f64;
    let mut energy = 0.0f64;
    for z in block {
        let p = to_f64(z.norm_sqr());
        peak = peak.max(p);
        energy += p;
    }
    (energy > 0.0).then(|| block.len() as f64 * peak / energy)
}

/// Per-antenna PAR `K max_k |x_ik|^2 / sum_k |x_ik|^2` of an antenna-major
/// time-domain signal (linear scale).
///
/// # Errors
/// `Length` if `x_time.len() != M K`; `ZeroSignal(i)` if antenna `i` is silent.
pub fn par_per_antenna<T: Real>(x_time: &[C<T>], cfg: &ValidatedConfig) -> Result<Vec<f64>> {
    check_len(x_time, cfg)?;
    x_time
        .chunks(cfg.k())
        .enumerate()
        .map(|(i, b)| block_par(b).ok_or(Error::ZeroSignal(i)))
        .collect()
}

/// PAR of the whole stacked signal, `M K ||x||_inf^2 / ||x||^2` (linear scale).
///
/// # Errors
/// `Length` on a size mismatch; `ZeroSignal(0)` if the signal is zero.
pub fn par_stacked<T: Real>(x_time: &[C<T>], cfg: &ValidatedConfig) -> Result<f64> {
    check_len(x_time, cfg)?;
    block_par(x_time).ok_or(Error::ZeroSignal(0))
}

fn peak_sq<T: Real>(t: &[C<T>], gamma: T, ops: &DesignOperators<T>) -> f64 {
    let mut x = ops.transmit(t, gamma.sqrt());
    UnitaryDft::new(ops.subcarriers()).inverse_blocks(&mut x);
    x.iter().map(|z| to_f64(z.norm_sqr())).fold(0.0, f64::max)
}

/// Relaxed PAR of the design `(t, gamma)`:
/// `M K ||Q (G t + sqrt(gamma) b)||_inf^2 / (gamma K P_s + (P_s / d_sum) ||t||^2)`,
/// where the denominator is the symbol-averaged transmit energy.
pub fn relaxed_measure<T: Real>(
    t: &[C<T>],
    gamma: T,
    ops: &DesignOperators<T>,
    cfg: &ValidatedConfig,
) -> f64 {
    let (m, k, ps) = (cfg.m() as f64, cfg.k() as f64, cfg.signal_power());
    let g = to_f64(gamma);
    let den = g * k * ps + ps / cfg.d_sum() as f64 * to_f64(norm_sqr(t));
    m * k * peak_sq(t, gamma, ops) / den
}

/// Ball-boundary approximation of [`relaxed_measure`]:
/// `M ||Q (G t + sqrt(gamma) b)||_inf^2 / P_s`. It coincides with the relaxed
/// measure when `||t||^2 = d_sum K (1 - gamma)`.
pub fn approx_measure<T: Real>(
    t: &[C<T>],
    gamma: T,
    ops: &DesignOperators<T>,
    cfg: &ValidatedConfig,
) -> f64 {
    cfg.m() as f64 * peak_sq(t, gamma, ops) / cfg.signal_power()
}

/// PAR summary of one solved draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParReport {
    /// Per-antenna PAR, linear.
    pub per_antenna: Vec<f64>,
    /// PAR of the stacked signal, linear.
    pub stacked_relaxed: f64,
    pub relaxed_measure: f64,
    pub approx_measure: f64,
    pub gamma_hat: f64,
    /// `-10 log10(gamma_hat)`.
    pub snr_cost_db: f64,
}

impl ParReport {
    /// Evaluates every measure for the transmitted time-domain signal `x_time`
    /// produced by the design `(t, gamma)`.
    ///
    /// # Errors
    /// As [`par_per_antenna`].
    pub fn new<T: Real>(
        x_time: &[C<T>],
        t: &[C<T>],
        gamma: T,
        ops: &DesignOperators<T>,
        cfg: &ValidatedConfig,
    ) -> Result<Self> {
        let g = to_f64(gamma);
        Ok(Self {
            per_antenna: par_per_antenna(x_time, cfg)?,
            stacked_relaxed: par_stacked(x_time, cfg)?,
            relaxed_measure: relaxed_measure(t, gamma, ops, cfg),
            approx_measure: approx_measure(t, gamma, ops, cfg),
            gamma_hat: g,
            snr_cost_db: -to_db(g),
        })
    }
}

/// Sorted sample set with counting estimators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    sorted_samples: Vec<f64>,
}

impl EmpiricalDistribution {
    /// # Errors
    /// `EmptySample` for no samples; `Range` if any sample is NaN.
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Range("NaN sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self {
            sorted_samples: samples,
        })
    }

    pub fn n(&self) -> usize {
        self.sorted_samples.len()
    }

    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted_samples
    }

    fn count_below(&self, x: f64) -> usize {
        self.sorted_samples.partition_point(|&s| s < x)
    }

    /// `#{s >= x} / n`.
    pub fn ccdf(&self, x: f64) -> f64 {
        (self.n() - self.count_below(x)) as f64 / self.n() as f64
    }

    /// `#{s <= x} / n`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted_samples.partition_point(|&s| s <= x) as f64 / self.n() as f64
    }

    /// `#{s < x} / n`, the complement of [`Self::ccdf`].
    pub fn cdf_strict(&self, x: f64) -> f64 {
        self.count_below(x) as f64 / self.n() as f64
    }

    /// Largest sample `x` with `ccdf(x) >= p`, for `p` in `(0, 1]`.
    pub fn ccdf_point(&self, p: f64) -> f64 {
        let n = self.n();
        let tail = ((p * n as f64).ceil() as usize).clamp(1, n);
        self.sorted_samples[n - tail]
    }

    pub fn min(&self) -> f64 {
        self.sorted_samples[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted_samples[self.n() - 1]
    }

    /// `(x, ccdf(x))` at every distinct sample value.
    pub fn ccdf_curve(&self) -> Vec<(f64, f64)> {
        self.curve(|s, i| (s, (self.n() - i) as f64 / self.n() as f64), true)
    }

    /// `(x, cdf(x))` at every distinct sample value.
    pub fn cdf_curve(&self) -> Vec<(f64, f64)> {
        self.curve(|s, i| (s, (i + 1) as f64 / self.n() as f64), false)
    }

    fn curve(&self, f: impl Fn(f64, usize) -> (f64, f64), first: bool) -> Vec<(f64, f64)> {
        let s = &self.sorted_samples;
        (0..s.len())
            .filter(|&i| {
                if first {
                    i == 0 || s[i - 1] != s[i]
                } else {
                    i + 1 == s.len() || s[i + 1] != s[i]
                }
            })
            .map(|i| f(s[i], i))
            .collect()
    }
}

/// `#{s >= x} / n`.
///
/// # Errors
/// `EmptySample` if `samples` is empty.
pub fn empirical_ccdf(samples: &[f64], x: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(samples.iter().filter(|&&s| s >= x).count() as f64 / samples.len() as f64)
}

/// `#{s <= x} / n`.
///
/// # Errors
/// `EmptySample` if `samples` is empty.
pub fn empirical_cdf(samples: &[f64], x: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(samples.iter().filter(|&&s| s <= x).count() as f64 / samples.len() as f64)
}

/// Sample mean and unbiased variance (zero variance for a single sample).
pub fn mean_variance(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = if x.len() > 1 {
        x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Natural log of the volume of the real `m`-ball of radius `r`,
/// `ln(pi^(m/2) r^m / Gamma(m/2 + 1))`.
pub fn ball_volume(m: usize, r: f64) -> f64 {
    let m = m as f64;
    0.5 * m * std::f64::consts::PI.ln() + m * r.ln() - ln_gamma(0.5 * m + 1.0)
}

/// Fraction of an `m`-ball's volume inside the concentric ball of radius
/// scaled by `1 - eps`: `(1 - eps)^m`.
pub fn shell_ratio(m: usize, eps: f64) -> f64 {
    (m as f64 * (-eps).ln_1p()).exp()
}

/// Width proxy `sqrt((1 - gamma) / (c_sum^2 d_sum K))` of the shell that holds
/// most of the feasible design vectors.
pub fn annulus_width(c_sigma: usize, d_sigma: usize, k: usize, gamma: f64) -> f64 {
    ((1.0 - gamma).max(0.0) / ((c_sigma * c_sigma * d_sigma * k) as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bd::bd_decompose;
    use crate::model::{gen_channels, gen_symbols, validate_config, SystemConfig};
    use crate::precoder::build_design_operators;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(m: usize, k: usize) -> ValidatedConfig {
        validate_config(&SystemConfig::new(
            m,
            2,
            2,
            k,
            vec![1, 1],
            vec![m / 2 - 1, m / 2 - 1],
            1.8,
        ))
        .unwrap()
    }

    fn naive_par(block: &[C<f64>]) -> f64 {
        let mut peak = 0.0;
        let mut sum = 0.0;
        for z in block {
            let p = z.re * z.re + z.im * z.im;
            if p > peak {
                peak = p;
            }
            sum += p;
        }
        block.len() as f64 * peak / sum
    }

    fn random_signal(n: usize, seed: u64) -> Vec<C<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    }

    #[test]
    fn constant_envelope_has_unit_par() {
        let v = cfg(4, 16);
        let x: Vec<C<f64>> = (0..64)
            .map(|i| C::from_polar(2.0, i as f64 * 0.37))
            .collect();
        for p in par_per_antenna(&x, &v).unwrap() {
            assert!((p - 1.0).abs() < 1e-14);
        }
        assert!((par_stacked(&x, &v).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn impulse_has_par_equal_to_length() {
        let v = cfg(4, 16);
        let mut x = vec![C::new(0.0, 0.0); 64];
        for i in 0..4 {
            x[i * 16 + 3] = C::new(1.0, -1.0);
        }
        for p in par_per_antenna(&x, &v).unwrap() {
            assert!((p - 16.0).abs() < 1e-12);
        }
        let mut y = vec![C::new(0.0, 0.0); 64];
        y[17] = C::new(0.0, 3.0);
        assert!((par_stacked(&y, &v).unwrap() - 64.0).abs() < 1e-12);
    }

    #[test]
    fn random_signal_matches_loop() {
        let v = cfg(4, 32);
        let x = random_signal(128, 1);
        let p = par_per_antenna(&x, &v).unwrap();
        for (i, pi) in p.iter().enumerate() {
            assert!((pi - naive_par(&x[i * 32..(i + 1) * 32])).abs() < 1e-12);
        }
        assert!((par_stacked(&x, &v).unwrap() - naive_par(&x)).abs() < 1e-12);
    }

    #[test]
    fn stacked_par_dominates_scaled_antenna_par() {
        let v = cfg(4, 32);
        let x = random_signal(128, 2);
        let total: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let stacked = par_stacked(&x, &v).unwrap();
        for (i, p) in par_per_antenna(&x, &v).unwrap().iter().enumerate() {
            let share: f64 = x[i * 32..(i + 1) * 32]
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                / total;
            assert!(stacked >= p * share * 4.0 - 1e-12);
        }
    }

    #[test]
    fn silent_antenna_is_reported() {
        let v = cfg(4, 8);
        let mut x = random_signal(32, 3);
        for z in &mut x[16..24] {
            *z = C::new(0.0, 0.0);
        }
        assert!(matches!(par_per_antenna(&x, &v), Err(Error::ZeroSignal(2))));
        assert!(matches!(
            par_stacked(&vec![C::new(0.0, 0.0); 32], &v),
            Err(Error::ZeroSignal(0))
        ));
        assert!(matches!(
            par_stacked(&x[..5], &v),
            Err(Error::Length { .. })
        ));
    }

    proptest! {
        #[test]
        fn par_is_scale_invariant(seed in 0u64..1000, re in -5.0f64..5.0, im in -5.0f64..5.0) {
            prop_assume!(re * re + im * im > 1e-6);
            let v = cfg(4, 16);
            let x = random_signal(64, seed);
            let a = C::new(re, im);
            let y: Vec<C<f64>> = x.iter().map(|z| z * a).collect();
            let p1 = par_per_antenna(&x, &v).unwrap();
            let p2 = par_per_antenna(&y, &v).unwrap();
            for (u, w) in p1.iter().zip(&p2) {
                prop_assert!((u - w).abs() < 1e-10 * u);
            }
            let s1 = par_stacked(&x, &v).unwrap();
            let s2 = par_stacked(&y, &v).unwrap();
            prop_assert!((s1 - s2).abs() < 1e-10 * s1);
        }
    }

    fn ops_instance(seed: u64) -> (ValidatedConfig, DesignOperators<f64>) {
        let v =
            validate_config(&SystemConfig::new(4, 2, 2, 32, vec![1, 1], vec![1, 1], 1.8)).unwrap();
        let ch = gen_channels::<f64>(&v, seed);
        let f = bd_decompose(&ch, &v).unwrap();
        let s = gen_symbols::<f64>(&v, seed + 1).unwrap();
        let ops = build_design_operators(&f, &s, &v).unwrap();
        (v, ops)
    }

    #[test]
    fn measures_agree_without_design_vector() {
        let (v, ops) = ops_instance(1);
        let t = vec![C::new(0.0, 0.0); v.design_dim()];
        let r = relaxed_measure(&t, 1.0, &ops, &v);
        let a = approx_measure(&t, 1.0, &ops, &v);
        let mut qb = ops.b.clone();
        UnitaryDft::new(v.k()).inverse_blocks(&mut qb);
        let peak = qb.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        let direct = (v.m() * v.k()) as f64 * peak / (v.k() as f64 * v.signal_power());
        assert!((r - direct).abs() < 1e-12 * direct);
        assert!((r - a).abs() < 1e-12 * a);
    }

    #[test]
    fn measures_agree_on_ball_boundary() {
        let (v, ops) = ops_instance(2);
        let gamma = 0.9;
        let mut t = random_signal(v.design_dim(), 5);
        let target = (v.d_sum() * v.k()) as f64 * (1.0 - gamma);
        let f = (target / norm_sqr(&t)).sqrt();
        t.iter_mut().for_each(|z| *z *= f);
        let r = relaxed_measure(&t, gamma, &ops, &v);
        let a = approx_measure(&t, gamma, &ops, &v);
        assert!((r - a).abs() < 1e-12 * a);
    }

    #[test]
    fn interior_discrepancy_matches_ball_fill() {
        let (v, ops) = ops_instance(3);
        for (i, gamma) in [0.6, 0.85, 0.97].into_iter().enumerate() {
            let mut t = random_signal(v.design_dim(), 10 + i as u64);
            let radius2 = (v.d_sum() * v.k()) as f64 * (1.0 - gamma);
            let fill = 0.3 + 0.2 * i as f64;
            let f = (fill * radius2 / norm_sqr(&t)).sqrt();
            t.iter_mut().for_each(|z| *z *= f);
            let r = relaxed_measure(&t, gamma, &ops, &v);
            let a = approx_measure(&t, gamma, &ops, &v);
            let bound = (1.0 - norm_sqr(&t) / radius2) * (1.0 - gamma);
            assert!((r - a).abs() / r <= bound * (1.0 + 1e-10) + 1e-14);
        }
    }

    #[test]
    fn ccdf_small_examples() {
        let s = [1.0, 2.0, 3.0];
        assert!((empirical_ccdf(&s, 2.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(empirical_ccdf(&s, 0.0).unwrap(), 1.0);
        assert_eq!(empirical_cdf(&s, 2.0).unwrap(), 2.0 / 3.0);
        assert!(matches!(empirical_ccdf(&[], 1.0), Err(Error::EmptySample)));
        assert!(matches!(empirical_cdf(&[], 1.0), Err(Error::EmptySample)));
        assert!(matches!(
            EmpiricalDistribution::new(vec![]),
            Err(Error::EmptySample)
        ));
        let d = EmpiricalDistribution::new(s.to_vec()).unwrap();
        for x in [0.5, 1.0, 1.5, 2.0, 3.0, 3.5] {
            assert_eq!(d.ccdf(x) + d.cdf_strict(x), 1.0);
        }
    }

    #[test]
    fn distribution_matches_scan_on_many_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        let d = EmpiricalDistribution::new(s.clone()).unwrap();
        for i in 0..50 {
            let x = i as f64 / 49.0;
            let scan_ge = s.iter().filter(|&&v| v >= x).count() as f64 / s.len() as f64;
            let scan_le = s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
            assert_eq!(d.ccdf(x), scan_ge);
            assert_eq!(d.cdf(x), scan_le);
            assert_eq!(empirical_ccdf(&s, x).unwrap(), scan_ge);
        }
    }

    #[test]
    fn ccdf_point_and_curves() {
        let s: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let d = EmpiricalDistribution::new(s).unwrap();
        assert_eq!(d.ccdf_point(0.01), 100.0);
        assert_eq!(d.ccdf_point(0.1), 91.0);
        assert!(d.ccdf(d.ccdf_point(0.05)) >= 0.05);
        let d2 = EmpiricalDistribution::new(vec![1.0, 1.0, 2.0]).unwrap();
        assert_eq!(d2.ccdf_curve(), vec![(1.0, 1.0), (2.0, 1.0 / 3.0)]);
        assert_eq!(d2.cdf_curve(), vec![(1.0, 2.0 / 3.0), (2.0, 1.0)]);
    }

    #[test]
    fn uniform_samples_pass_ks_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 5000;
        let d = EmpiricalDistribution::new((0..n).map(|_| rng.random::<f64>()).collect()).unwrap();
        let ks = d
            .sorted_samples()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                ((i + 1) as f64 / n as f64 - x)
                    .abs()
                    .max((x - i as f64 / n as f64).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks <= 1.36 / (n as f64).sqrt(), "ks {ks}");
    }

    #[test]
    fn ball_volume_small_cases() {
        assert!((ball_volume(2, 1.0).exp() - std::f64::consts::PI).abs() < 1e-12);
        assert!((ball_volume(3, 2.0).exp() - 4.0 / 3.0 * std::f64::consts::PI * 8.0).abs() < 1e-10);
        assert!((ball_volume(1, 1.5).exp() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn unit_ball_volume_vanishes() {
        let mut last = ball_volume(10, 1.0);
        for m in 11..=10_000 {
            let v = ball_volume(m, 1.0);
            assert!(v < last, "m={m}");
            last = v;
        }
        assert!(last < -10_000.0);
    }

    #[test]
    fn shell_ratio_values() {
        assert_eq!(shell_ratio(100, 0.0), 1.0);
        let mut direct = 1.0f64;
        for _ in 0..512 {
            direct *= 0.99;
        }
        assert!((shell_ratio(512, 0.01) - direct).abs() <= 1e-12 * direct);
        assert!((direct - 5.83e-3).abs() < 1e-5);
        let r: Vec<f64> = [100, 1000, 10_000]
            .iter()
            .map(|&m| shell_ratio(m, 0.01))
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2] && r[2] < 1e-40);
    }

    #[test]
    fn annulus_width_scaling() {
        let w1 = annulus_width(2, 2, 64, 0.9);
        let w2 = annulus_width(2, 2, 256, 0.9);
        assert!((w1 / w2 - 2.0).abs() < 1e-12);
        assert_eq!(annulus_width(2, 2, 64, 1.0), 0.0);
        let mut last = f64::INFINITY;
        for c in 1..20 {
            let w = annulus_width(c, 2, 128, 0.8);
            assert!(w < last);
            last = w;
        }
    }
}
