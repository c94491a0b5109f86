//! Scenario configuration, random channels and symbols, and the
//! frequency-to-time mapping of the transmit signal.
//!
//! Transmit vectors are stored antenna-major: sample `k` of antenna `i` lives
//! at index `i * K + k` of a length-`M K` buffer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dft::UnitaryDft;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::{lit, Real, C};

/// Default lower bound on the SNR-retention ratio.
pub const DEFAULT_GAMMA_FLOOR: f64 = 0.5 + 1e-9;

const STREAM_CHANNEL: u64 = 0;
const STREAM_SYMBOLS: u64 = 1;

/// All scenario parameters. Field names in JSON follow the conventional
/// symbols (`M`, `N`, `J`, `K`, `d`, `c`, `P_s`, `sigma2`, `zeta`,
/// `gamma_floor`, `constellation`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Transmit antennas.
    #[serde(rename = "M")]
    pub antennas: usize,
    /// Receive antennas per user.
    #[serde(rename = "N")]
    pub rx_antennas: usize,
    /// Number of users.
    #[serde(rename = "J")]
    pub users: usize,
    /// Number of subcarriers.
    #[serde(rename = "K")]
    pub subcarriers: usize,
    /// Data streams per user.
    #[serde(rename = "d")]
    pub streams: Vec<usize>,
    /// Redundant spatial dimensions per user.
    #[serde(rename = "c")]
    pub redundancy: Vec<usize>,
    /// Total signal power per subcarrier (linear).
    #[serde(rename = "P_s", default = "default_power")]
    pub signal_power: f64,
    /// Noise variance, only used for SNR reporting.
    #[serde(default = "default_power")]
    pub sigma2: f64,
    /// Target peak-to-average power ratio (linear).
    pub zeta: f64,
    #[serde(default = "default_gamma_floor")]
    pub gamma_floor: f64,
    #[serde(default = "default_constellation")]
    pub constellation: String,
}

fn default_power() -> f64 {
    1.0
}

fn default_gamma_floor() -> f64 {
    DEFAULT_GAMMA_FLOOR
}

fn default_constellation() -> String {
    "16qam".to_string()
}

impl SystemConfig {
    /// Scenario with default power, noise, floor and 16-QAM symbols.
    pub fn new(
        m: usize,
        n: usize,
        j: usize,
        k: usize,
        d: Vec<usize>,
        c: Vec<usize>,
        zeta: f64,
    ) -> Self {
        Self {
            antennas: m,
            rx_antennas: n,
            users: j,
            subcarriers: k,
            streams: d,
            redundancy: c,
            signal_power: default_power(),
            sigma2: default_power(),
            zeta,
            gamma_floor: DEFAULT_GAMMA_FLOOR,
            constellation: default_constellation(),
        }
    }

    /// Dimension of the interference null space, `M - (J - 1) N`.
    pub fn null_dim(&self) -> usize {
        self.antennas
            .saturating_sub(self.users.saturating_sub(1) * self.rx_antennas)
    }
}

/// A configuration that passed [`validate_config`], with derived sizes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidatedConfig {
    cfg: SystemConfig,
    q: usize,
    d_sum: usize,
    c_sum: usize,
    d_offsets: Vec<usize>,
    c_offsets: Vec<usize>,
}

impl ValidatedConfig {
    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }
    pub fn m(&self) -> usize {
        self.cfg.antennas
    }
    pub fn n(&self) -> usize {
        self.cfg.rx_antennas
    }
    pub fn j(&self) -> usize {
        self.cfg.users
    }
    pub fn k(&self) -> usize {
        self.cfg.subcarriers
    }
    pub fn d(&self) -> &[usize] {
        &self.cfg.streams
    }
    pub fn c(&self) -> &[usize] {
        &self.cfg.redundancy
    }
    /// `M - (J - 1) N`.
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn d_sum(&self) -> usize {
        self.d_sum
    }
    pub fn c_sum(&self) -> usize {
        self.c_sum
    }
    /// Complex dimension of the design variable, `c_sum * d_sum * K`.
    pub fn design_dim(&self) -> usize {
        self.c_sum * self.d_sum * self.cfg.subcarriers
    }
    /// Index of user `j`'s first stream in the stacked stream vector.
    pub fn stream_offset(&self, j: usize) -> usize {
        self.d_offsets[j]
    }
    /// Index of user `j`'s first redundant column in the stacked null-space block.
    pub fn redundancy_offset(&self, j: usize) -> usize {
        self.c_offsets[j]
    }
    pub fn zeta(&self) -> f64 {
        self.cfg.zeta
    }
    pub fn signal_power(&self) -> f64 {
        self.cfg.signal_power
    }
    pub fn gamma_floor(&self) -> f64 {
        self.cfg.gamma_floor
    }
    /// Length of a stacked transmit buffer, `M K`.
    pub fn signal_len(&self) -> usize {
        self.cfg.antennas * self.cfg.subcarriers
    }
    /// Amplitude bound `sqrt(zeta P_s / M)` on every time-domain sample.
    pub fn peak_bound(&self) -> f64 {
        (self.cfg.zeta * self.cfg.signal_power / self.cfg.antennas as f64).sqrt()
    }
}

fn dim_err(msg: String) -> Error {
    Error::Dimension(msg)
}

/// Checks every dimension and range constraint and derives the sizes used by
/// the rest of the pipeline.
pub fn validate_config(cfg: &SystemConfig) -> Result<ValidatedConfig> {
    let (m, n, j, k) = (cfg.antennas, cfg.rx_antennas, cfg.users, cfg.subcarriers);
    if m == 0 || n == 0 || j == 0 {
        return Err(dim_err(format!(
            "M, N, J must be positive (M={m}, N={n}, J={j})"
        )));
    }
    if k < 2 {
        return Err(dim_err(format!("K >= 2 required, got K={k}")));
    }
    if cfg.streams.len() != j {
        return Err(dim_err(format!(
            "len(d) = J required, got {} for J={j}",
            cfg.streams.len()
        )));
    }
    if cfg.redundancy.len() != j {
        return Err(dim_err(format!(
            "len(c) = J required, got {} for J={j}",
            cfg.redundancy.len()
        )));
    }
    if j >= 2 && (j - 1) * n >= m {
        return Err(dim_err(format!(
            "(J-1)N < M required, got ({j}-1)*{n} >= {m}"
        )));
    }
    if j == 1 && n > m {
        return Err(dim_err(format!(
            "N <= M required for J=1, got N={n} > M={m}"
        )));
    }
    let q = m - (j - 1) * n;
    for (u, &dj) in cfg.streams.iter().enumerate() {
        if dj == 0 || dj > n {
            return Err(dim_err(format!(
                "1 <= d_{u} <= N={n} required, got d_{u}={dj}"
            )));
        }
    }
    let d_sum: usize = cfg.streams.iter().sum();
    if d_sum >= m {
        return Err(dim_err(format!(
            "d_sum < M required, got d_sum={d_sum} >= M={m}"
        )));
    }
    for (u, (&cj, &dj)) in cfg.redundancy.iter().zip(&cfg.streams).enumerate() {
        let max = q.saturating_sub(dj);
        if cj == 0 || cj > max {
            return Err(dim_err(format!(
                "1 <= c_{u} <= M-(J-1)N-d_{u} = {max} required, got c_{u}={cj}"
            )));
        }
    }
    if !(cfg.zeta > 1.0) || !cfg.zeta.is_finite() {
        return Err(Error::Range(format!("zeta > 1 required, got {}", cfg.zeta)));
    }
    if !(cfg.signal_power > 0.0) || !cfg.signal_power.is_finite() {
        return Err(Error::Range(format!(
            "P_s > 0 required, got {}",
            cfg.signal_power
        )));
    }
    if !(cfg.sigma2 > 0.0) || !cfg.sigma2.is_finite() {
        return Err(Error::Range(format!(
            "sigma2 > 0 required, got {}",
            cfg.sigma2
        )));
    }
    if !(cfg.gamma_floor > 0.5 && cfg.gamma_floor < 1.0) {
        return Err(Error::Range(format!(
            "gamma_floor in (0.5, 1) required, got {}",
            cfg.gamma_floor
        )));
    }
    let offsets = |v: &[usize]| {
        let mut acc = 0;
        v.iter()
            .map(|&x| {
                let o = acc;
                acc += x;
                o
            })
            .collect::<Vec<_>>()
    };
    Ok(ValidatedConfig {
        cfg: cfg.clone(),
        q,
        d_sum,
        c_sum: cfg.redundancy.iter().sum(),
        d_offsets: offsets(&cfg.streams),
        c_offsets: offsets(&cfg.redundancy),
    })
}

/// Per-subcarrier, per-user channel matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization<T: Real> {
    users: usize,
    subcarriers: usize,
    /// `N x M` blocks indexed `k * J + j`.
    blocks: Vec<CMat<T>>,
    pub seed: u64,
}

impl<T: Real> ChannelRealization<T> {
    /// Wraps explicit channel matrices given as `blocks[k][j]`.
    ///
    /// # Errors
    /// `Dimension` if the nesting or block shapes disagree with `cfg`.
    pub fn from_blocks(
        cfg: &ValidatedConfig,
        blocks: Vec<Vec<CMat<T>>>,
        seed: u64,
    ) -> Result<Self> {
        if blocks.len() != cfg.k() || blocks.iter().any(|b| b.len() != cfg.j()) {
            return Err(dim_err(
                "channel blocks must be K lists of J matrices".into(),
            ));
        }
        let flat: Vec<CMat<T>> = blocks.into_iter().flatten().collect();
        if flat.iter().any(|h| h.shape() != (cfg.n(), cfg.m())) {
            return Err(dim_err(format!(
                "channel blocks must be {}x{}",
                cfg.n(),
                cfg.m()
            )));
        }
        Ok(Self {
            users: cfg.j(),
            subcarriers: cfg.k(),
            blocks: flat,
            seed,
        })
    }

    /// Channel of user `j` on subcarrier `k` (both zero-based).
    #[inline]
    pub fn h(&self, k: usize, j: usize) -> &CMat<T> {
        &self.blocks[k * self.users + j]
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }
}

/// Draws i.i.d. unit-variance circularly symmetric Gaussian channels.
pub fn gen_channels<T: Real>(cfg: &ValidatedConfig, seed: u64) -> ChannelRealization<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_CHANNEL);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut blocks = Vec::with_capacity(cfg.k() * cfg.j());
    for _ in 0..cfg.k() * cfg.j() {
        blocks.push(CMat::from_fn(cfg.n(), cfg.m(), |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C::new(lit(re * scale), lit(im * scale))
        }));
    }
    ChannelRealization {
        users: cfg.j(),
        subcarriers: cfg.k(),
        blocks,
        seed,
    }
}

/// Symbol alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constellation {
    /// Square 16-QAM with unit average energy.
    Qam16,
}

impl Constellation {
    /// Parses a descriptor such as `"16qam"`, `"16-QAM"` or `"qam16"`.
    pub fn parse(desc: &str) -> Result<Self> {
        let norm: String = desc
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "16qam" | "qam16" => Ok(Self::Qam16),
            _ => Err(Error::UnsupportedConstellation(desc.to_string())),
        }
    }

    /// Alphabet points with unit average energy.
    pub fn points(self) -> Vec<C<f64>> {
        match self {
            Self::Qam16 => {
                let levels = [-3.0, -1.0, 1.0, 3.0];
                let s = 1.0 / 10f64.sqrt();
                let mut pts = Vec::with_capacity(16);
                for &re in &levels {
                    for &im in &levels {
                        pts.push(C::new(re * s, im * s));
                    }
                }
                pts
            }
        }
    }
}

/// Stacked per-subcarrier symbol vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolBlock<T: Real> {
    /// `K` vectors of length `d_sum`.
    pub s: Vec<Vec<C<T>>>,
    pub seed: u64,
}

impl<T: Real> SymbolBlock<T> {
    /// User `j`'s streams on subcarrier `k`.
    pub fn user_slice<'a>(&'a self, cfg: &ValidatedConfig, k: usize, j: usize) -> &'a [C<T>] {
        let o = cfg.stream_offset(j);
        &self.s[k][o..o + cfg.d()[j]]
    }
}

/// Draws uniform constellation symbols scaled to covariance `(P_s / d_sum) I`.
///
/// # Errors
/// `UnsupportedConstellation` for an unknown descriptor.
pub fn gen_symbols<T: Real>(cfg: &ValidatedConfig, seed: u64) -> Result<SymbolBlock<T>> {
    let pts = Constellation::parse(&cfg.config().constellation)?.points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_SYMBOLS);
    let amp = (cfg.signal_power() / cfg.d_sum() as f64).sqrt();
    let s = (0..cfg.k())
        .map(|_| {
            (0..cfg.d_sum())
                .map(|_| {
                    let p = pts[rng.random_range(0..pts.len())];
                    C::new(lit(p.re * amp), lit(p.im * amp))
                })
                .collect()
        })
        .collect();
    Ok(SymbolBlock { s, seed })
}

/// Frequency- and time-domain transmit buffers.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalBundle<T: Real> {
    pub x_freq: Vec<C<T>>,
    pub x_time: Vec<C<T>>,
}

impl<T: Real> SignalBundle<T> {
    /// Builds the bundle from an antenna-major frequency buffer.
    pub fn from_freq(x_freq: Vec<C<T>>, cfg: &ValidatedConfig) -> Result<Self> {
        let x_time = to_time_domain(&x_freq, cfg)?;
        Ok(Self { x_freq, x_time })
    }
}

/// Applies a unitary `K`-point inverse DFT to each antenna block.
///
/// # Errors
/// `Length` if `x_freq.len() != M K`.
pub fn to_time_domain<T: Real>(x_freq: &[C<T>], cfg: &ValidatedConfig) -> Result<Vec<C<T>>> {
    if x_freq.len() != cfg.signal_len() {
        return Err(Error::Length {
            expected: cfg.signal_len(),
            got: x_freq.len(),
        });
    }
    let mut out = x_freq.to_vec();
    UnitaryDft::new(cfg.k()).inverse_blocks(&mut out);
    Ok(out)
}

/// Deterministic per-trial seed derived from a master seed (SplitMix64).
pub fn trial_seed(master: u64, trial_id: u64) -> u64 {
    let mut z =
        master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(trial_id.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
