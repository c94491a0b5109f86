//! The peak-constrained SNR-retention program
//!
//! ```text
//! maximize gamma
//! subject to  ||t||^2 <= a (1 - gamma),                 a = d_sum K
//!             |(Q (G t + (1 + gamma)/2 b))_i| <= rho,   rho = sqrt(zeta P_s / M)
//!             gamma_floor <= gamma <= 1
//! ```
//!
//! # Reduced coordinates
//!
//! On subcarrier `k`, `G_k = F_ddot_k S_k` with `S_k = [s_1 I, ..., s_d I]` and
//! `S_k S_k^H = ||s_k||^2 I`. Writing `F_ddot_k = U_k Sigma_k V_k^H` (thin SVD,
//! rank `r_k`), `G_k = U_k (||s_k|| Sigma_k) W_k` where `W_k = V_k^H S_k / ||s_k||`
//! has orthonormal rows. Any component of `t_k` orthogonal to the rows of `W_k`
//! leaves the transmit signal unchanged and only consumes ball budget, so the
//! program is solved over `e_k = W_k t_k` (length `r_k`) and lifted back with
//! `t_k = W_k^H e_k`, which preserves the norm. This is an exact equivalence.
//!
//! # Certificates
//!
//! For any multiplier `y` on the sample constraints, weak duality gives
//!
//! ```text
//! gamma <= rho ||y||_1 + max_gamma [ gamma - (1 + gamma)/2 Re<y, Qb>
//!                                     + sqrt(a (1 - gamma)) ||A^H y|| ]
//! ```
//!
//! where `A` is the reduced operator; the inner maximum has a closed form. Both
//! solvers return a multiplier estimate, and the status of every solve is
//! decided from this bound: the gap to it certifies optimality, and a bound below
//! `gamma_floor` certifies infeasibility.

mod admm;
mod ipm;

use std::time::Instant;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::dft::UnitaryDft;
use crate::linalg::{rank_tol, svd, CMat};
use crate::model::ValidatedConfig;
use crate::precoder::DesignOperators;
use crate::scalar::{czero, from_usize, lit, norm_sqr, to_f64, Real, C};

use admm::solve_admm;
use ipm::solve_ipm;

/// Outcome of a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// Feasible within tolerance and certified optimal within the gap tolerance.
    Optimal,
    /// Certified: no point with `gamma >= gamma_floor` exists.
    Infeasible,
    /// Iteration budget exhausted; the returned point is feasible for the ball
    /// and sample constraints but its optimality is not certified.
    MaxIterations,
}

/// Which algorithm to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// ADMM first; dense interior point as a fallback for small problems.
    #[default]
    Auto,
    /// Primal-dual interior point with dense normal equations.
    Ipm,
    /// Matrix-free ADMM.
    Admm,
}

/// Solver settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Interior-point iteration limit.
    pub max_iter: usize,
    /// Relative tolerance on sample-constraint violation.
    pub tol_feas: f64,
    /// Relative tolerance on the certified duality gap.
    pub tol_gap: f64,
    /// Absolute tolerance on ball-constraint violation.
    pub tol_ball: f64,
    pub method: Method,
    /// ADMM iteration limit.
    pub admm_max_iter: usize,
    /// Dimensionless ADMM penalty; the working penalty is this value divided
    /// by `K zeta P_s`.
    pub admm_penalty: f64,
    /// Largest real dimension `2 n + 1` for which `Auto` may fall back to the
    /// dense interior-point method.
    pub ipm_dense_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol_feas: 1e-7,
            tol_gap: 1e-6,
            tol_ball: 1e-6,
            method: Method::Auto,
            admm_max_iter: 20_000,
            admm_penalty: 7.0,
            ipm_dense_limit: 1100,
        }
    }
}

/// Reduced description of one subcarrier.
#[derive(Clone, Debug)]
struct ReducedBlock<T: Real> {
    /// `M x r` orthonormal columns spanning the range of `G_k`.
    basis: CMat<T>,
    /// `r` singular values of `G_k`.
    gains: Vec<T>,
    /// `c_sum x r` right singular vectors of `F_ddot_k`.
    coeff: CMat<T>,
    /// `s_k / ||s_k||`.
    sym_dir: Vec<C<T>>,
}

/// One instance of the program, with its operators.
#[derive(Clone, Debug)]
pub struct SocpProblem<T: Real> {
    antennas: usize,
    subcarriers: usize,
    c_sum: usize,
    d_sum: usize,
    blocks: Vec<ReducedBlock<T>>,
    offsets: Vec<usize>,
    reduced_dim: usize,
    g_blocks: Vec<CMat<T>>,
    /// Original BD transmit vector, antenna-major frequency domain.
    b_freq: Vec<C<T>>,
    /// `Q b`, the time-domain BD signal.
    pub offset: Vec<C<T>>,
    /// `rho = sqrt(zeta P_s / M)`.
    pub peak_bound: T,
    /// `a = d_sum K`.
    pub ball_coeff: T,
    /// `(gamma_floor, 1)`.
    pub gamma_bounds: (T, T),
    zeta: T,
    signal_power: T,
    dft: UnitaryDft<T>,
}

/// Builds the program for one channel/symbol draw.
pub fn build_problem<T: Real>(ops: &DesignOperators<T>, cfg: &ValidatedConfig) -> SocpProblem<T> {
    let (m, k_n) = (cfg.m(), cfg.k());
    let tol = rank_tol::<T>();
    let mut blocks = Vec::with_capacity(k_n);
    let mut offsets = Vec::with_capacity(k_n + 1);
    let mut n = 0;
    for k in 0..k_n {
        offsets.push(n);
        let s = &ops.symbols.s[k];
        let s_norm = norm_sqr(s).sqrt();
        let fdd = &ops.f_ddot_blocks[k];
        let dec = svd(fdd);
        let r = if s_norm > T::zero() {
            dec.rank(tol).min(m)
        } else {
            0
        };
        let basis = dec.u.columns(0, r);
        let gains = dec.s[..r].iter().map(|&x| x * s_norm).collect();
        let coeff = dec.v.columns(0, r);
        let sym_dir = if s_norm > T::zero() {
            s.iter().map(|z| z / s_norm).collect()
        } else {
            vec![czero(); s.len()]
        };
        n += r;
        blocks.push(ReducedBlock {
            basis,
            gains,
            coeff,
            sym_dir,
        });
    }
    offsets.push(n);
    let dft = UnitaryDft::new(k_n);
    let mut offset = ops.b.clone();
    dft.inverse_blocks(&mut offset);
    let floor = lit::<T>(cfg.gamma_floor());
    SocpProblem {
        antennas: m,
        subcarriers: k_n,
        c_sum: cfg.c_sum(),
        d_sum: cfg.d_sum(),
        blocks,
        offsets,
        reduced_dim: n,
        g_blocks: ops.g_blocks.clone(),
        b_freq: ops.b.clone(),
        offset,
        peak_bound: lit(cfg.peak_bound()),
        ball_coeff: from_usize::<T>(cfg.d_sum() * k_n),
        gamma_bounds: (floor, T::one()),
        zeta: lit(cfg.zeta()),
        signal_power: lit(cfg.signal_power()),
        dft,
    }
}

impl<T: Real> SocpProblem<T> {
    /// Complex dimension of the design vector `t`.
    pub fn m(&self) -> usize {
        self.c_sum * self.d_sum * self.subcarriers
    }

    /// Complex dimension of the reduced variable.
    pub fn reduced_dim(&self) -> usize {
        self.reduced_dim
    }

    /// Number of time-domain samples, each carrying one 3-dimensional cone.
    pub fn sample_count(&self) -> usize {
        self.antennas * self.subcarriers
    }

    /// Cones in the real reformulation: one per sample plus the ball.
    pub fn cone_count(&self) -> usize {
        self.sample_count() + 1
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    /// `Q G t`, time domain, antenna-major.
    pub fn apply(&self, t: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(t.len(), self.m(), "design vector length");
        let w = self.c_sum * self.d_sum;
        let k_n = self.subcarriers;
        let mut out = vec![czero(); self.antennas * k_n];
        for (k, g) in self.g_blocks.iter().enumerate() {
            for (i, z) in g.mul_vec(&t[k * w..(k + 1) * w]).into_iter().enumerate() {
                out[i * k_n + k] = z;
            }
        }
        self.dft.inverse_blocks(&mut out);
        out
    }

    /// `G^H Q^H y`.
    pub fn apply_adjoint(&self, y: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(y.len(), self.sample_count(), "sample vector length");
        let k_n = self.subcarriers;
        let mut f = y.to_vec();
        self.dft.forward_blocks(&mut f);
        let mut out = Vec::with_capacity(self.m());
        for (k, g) in self.g_blocks.iter().enumerate() {
            let fk: Vec<C<T>> = (0..self.antennas).map(|i| f[i * k_n + k]).collect();
            out.extend(g.adjoint_mul_vec(&fk));
        }
        out
    }

    /// Reduced forward operator `A e`, time domain.
    pub fn forward_reduced(&self, e: &[C<T>]) -> Vec<C<T>> {
        let mut out = vec![czero(); self.sample_count()];
        self.forward_reduced_into(e, &mut out);
        out
    }

    pub(crate) fn forward_reduced_into(&self, e: &[C<T>], out: &mut [C<T>]) {
        debug_assert_eq!(e.len(), self.reduced_dim);
        let k_n = self.subcarriers;
        out.iter_mut().for_each(|z| *z = czero());
        for (k, blk) in self.blocks.iter().enumerate() {
            let ek = &e[self.offsets[k]..self.offsets[k + 1]];
            for (rho, (&ev, &gv)) in ek.iter().zip(&blk.gains).enumerate() {
                let coef = ev * gv;
                for (i, &u) in blk.basis.col(rho).iter().enumerate() {
                    out[i * k_n + k] = out[i * k_n + k] + u * coef;
                }
            }
        }
        self.dft.inverse_blocks(out);
    }

    /// Reduced adjoint `A^H y`.
    pub fn adjoint_reduced(&self, y: &[C<T>]) -> Vec<C<T>> {
        let mut f = y.to_vec();
        self.dft.forward_blocks(&mut f);
        let mut out = vec![czero(); self.reduced_dim];
        self.project_freq(&f, &mut out);
        for (k, blk) in self.blocks.iter().enumerate() {
            for (o, &g) in out[self.offsets[k]..self.offsets[k + 1]]
                .iter_mut()
                .zip(&blk.gains)
            {
                *o = *o * g;
            }
        }
        out
    }

    /// `U_k^H f_k` for every subcarrier of an antenna-major frequency buffer.
    pub(crate) fn project_freq(&self, f: &[C<T>], out: &mut [C<T>]) {
        let k_n = self.subcarriers;
        for (k, blk) in self.blocks.iter().enumerate() {
            for (rho, o) in out[self.offsets[k]..self.offsets[k + 1]]
                .iter_mut()
                .enumerate()
            {
                let mut acc = czero();
                for (i, u) in blk.basis.col(rho).iter().enumerate() {
                    acc = acc + u.conj() * f[i * k_n + k];
                }
                *o = acc;
            }
        }
    }

    /// Maps a reduced vector to the design vector `t` (norm preserving).
    pub fn lift(&self, e: &[C<T>]) -> Vec<C<T>> {
        let c = self.c_sum;
        let mut t = Vec::with_capacity(self.m());
        for (k, blk) in self.blocks.iter().enumerate() {
            let ek = &e[self.offsets[k]..self.offsets[k + 1]];
            let ve = if ek.is_empty() {
                vec![czero(); c]
            } else {
                blk.coeff.mul_vec(ek)
            };
            for s in &blk.sym_dir {
                let sc = s.conj();
                t.extend(ve.iter().map(|v| v * sc));
            }
        }
        t
    }

    /// Orthogonal projection of `t` onto reduced coordinates; `lift(project(t))`
    /// is the component of `t` that affects the transmit signal.
    pub fn project(&self, t: &[C<T>]) -> Vec<C<T>> {
        let c = self.c_sum;
        let w = c * self.d_sum;
        let mut e = Vec::with_capacity(self.reduced_dim);
        for (k, blk) in self.blocks.iter().enumerate() {
            let tk = &t[k * w..(k + 1) * w];
            let mut acc = vec![czero(); c];
            for (i, s) in blk.sym_dir.iter().enumerate() {
                for (a, &x) in acc.iter_mut().zip(&tk[i * c..(i + 1) * c]) {
                    *a = *a + x * s;
                }
            }
            e.extend(blk.coeff.adjoint_mul_vec(&acc));
        }
        e
    }

    /// Time-domain signal `Q (G t + (1 + gamma)/2 b)` entering the sample cones.
    pub fn relaxed_signal(&self, t: &[C<T>], gamma: T) -> Vec<C<T>> {
        let beta = lit::<T>(0.5) * (T::one() + gamma);
        let mut x = self.apply(t);
        for (xi, ci) in x.iter_mut().zip(&self.offset) {
            *xi = *xi + *ci * beta;
        }
        x
    }

    fn reduced_signal(&self, e: &[C<T>], gamma: T) -> Vec<C<T>> {
        let beta = lit::<T>(0.5) * (T::one() + gamma);
        let mut x = self.forward_reduced(e);
        for (xi, ci) in x.iter_mut().zip(&self.offset) {
            *xi = *xi + *ci * beta;
        }
        x
    }

    pub(crate) fn b_freq(&self) -> &[C<T>] {
        &self.b_freq
    }

    pub(crate) fn gains(&self, k: usize) -> &[T] {
        &self.blocks[k].gains
    }

    pub(crate) fn dft(&self) -> &UnitaryDft<T> {
        &self.dft
    }

    /// Working ADMM penalty for a dimensionless setting.
    pub(crate) fn penalty_scale(&self) -> T {
        T::one() / (from_usize::<T>(self.subcarriers) * self.zeta * self.signal_power)
    }

    /// Weak-duality upper bound on the optimal `gamma` from a multiplier `y`
    /// on the sample constraints, over `gamma` in `gamma_bounds`. The
    /// multiplier is rescaled by the best non-negative factor first.
    pub fn dual_bound(&self, y: &[C<T>]) -> T {
        let l1: T = y.iter().map(|z| z.norm()).sum();
        let r: T = y
            .iter()
            .zip(&self.offset)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let nrm = norm_sqr(&self.adjoint_reduced(y)).sqrt();
        self.scaled_bound(l1, r, nrm)
    }

    fn bound_at(&self, s: T, l1: T, r: T, nrm: T) -> T {
        let (lo, hi) = self.gamma_bounds;
        let half = lit::<T>(0.5);
        let a = self.ball_coeff;
        let p = T::one() - half * s * r;
        let nn = s * nrm;
        let g = if p <= T::zero() {
            lo
        } else {
            let g = T::one() - a * nn * nn / (lit::<T>(4.0) * p * p);
            g.max(lo).min(hi)
        };
        s * self.peak_bound * l1 + g * p - half * s * r
            + nn * (a * (T::one() - g)).max(T::zero()).sqrt()
    }

    fn scaled_bound(&self, l1: T, r: T, nrm: T) -> T {
        let f = |s: T| self.bound_at(s, l1, r, nrm);
        let mut best = f(T::one()).min(f(T::zero()));
        if !(l1 > T::zero()) {
            return best;
        }
        let mut hi = T::one();
        while f(hi + hi) < f(hi) && hi < lit(1e12) {
            hi = hi + hi;
        }
        hi = hi + hi;
        let mut lo = T::zero();
        let ratio = lit::<T>(0.618_033_988_749_894_9);
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..200 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = f(x2);
            }
            if hi - lo <= T::epsilon() * hi {
                break;
            }
        }
        best = best.min(f1).min(f2);
        best
    }

    /// Scales a reduced point onto the sample constraints.
    ///
    /// With `theta = min(1, rho / max |x_i|)`, the point `(theta e,
    /// theta (1 + gamma) - 1)` maps to `theta x`, so every sample bound holds,
    /// and its ball budget only grows.
    fn polish(&self, e: &[C<T>], gamma: T) -> (Vec<C<T>>, T) {
        let x = self.reduced_signal(e, gamma);
        let peak = x.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        if peak <= self.peak_bound {
            return (e.to_vec(), gamma);
        }
        let theta = self.peak_bound / peak;
        let e2 = e.iter().map(|z| z * theta).collect();
        (e2, theta * (T::one() + gamma) - T::one())
    }
}

/// Result of a solve.
#[derive(Clone, Debug)]
pub struct SocpSolution<T: Real> {
    pub gamma_hat: T,
    /// Design vector, subcarrier-major with `T_k` columns stacked.
    pub t_hat: Vec<C<T>>,
    pub status: SolveStatus,
    /// Largest relative violation of the sample or ball constraints.
    pub primal_residual: T,
    /// Certified gap `upper_bound - gamma_hat`.
    pub gap: T,
    /// Certified upper bound on the optimal `gamma`.
    pub upper_bound: T,
    pub iterations: usize,
    pub wall_time: f64,
    /// Algorithm that produced the returned point.
    pub method: Method,
    /// Multiplier estimate on the sample constraints.
    pub dual: Vec<C<T>>,
}

impl<T: Real> SocpSolution<T> {
    /// Placeholder with no point and trivial bounds.
    pub fn empty() -> Self {
        Self {
            gamma_hat: T::zero(),
            t_hat: Vec::new(),
            status: SolveStatus::MaxIterations,
            primal_residual: T::zero(),
            gap: T::infinity(),
            upper_bound: T::one(),
            iterations: 0,
            wall_time: 0.0,
            method: Method::Auto,
            dual: Vec::new(),
        }
    }
}

/// Raw output of one algorithm run, before certification.
#[derive(Clone, Debug)]
pub(crate) struct Candidate<T: Real> {
    pub e: Vec<C<T>>,
    pub gamma: T,
    pub dual: Vec<C<T>>,
    pub iterations: usize,
}

/// Polished point with its certificate.
#[derive(Clone, Debug)]
pub(crate) struct Certified<T: Real> {
    pub e: Vec<C<T>>,
    pub gamma: T,
    pub bound: T,
    pub dual: Vec<C<T>>,
}

impl<T: Real> Certified<T> {
    pub fn gap(&self) -> T {
        self.bound - self.gamma
    }

    pub fn is_optimal(&self, floor: T, tol_gap: T) -> bool {
        self.gamma >= floor && self.gap() <= tol_gap * T::one().max(Float::abs(self.gamma))
    }

    pub fn is_infeasible(&self, floor: T) -> bool {
        self.bound < floor
    }
}

pub(crate) fn certify<T: Real>(p: &SocpProblem<T>, c: &Candidate<T>) -> Certified<T> {
    let (e, gamma) = p.polish(&c.e, c.gamma);
    let bound = if c.dual.is_empty() {
        T::one()
    } else {
        p.dual_bound(&c.dual)
    };
    Certified {
        e,
        gamma: gamma.min(T::one()),
        bound,
        dual: c.dual.clone(),
    }
}

/// Solves the program with the configured method.
///
/// The returned point always satisfies the sample and ball constraints to
/// rounding error. Its status comes from the dual certificate: `Optimal` when
/// the gap is within `tol_gap`, `Infeasible` when the bound is below the floor,
/// `MaxIterations` otherwise.
pub fn solve<T: Real>(problem: &SocpProblem<T>, opts: &SolverOptions) -> SocpSolution<T> {
    let start = Instant::now();
    let floor = problem.gamma_bounds.0;
    let tol_gap = lit::<T>(opts.tol_gap);

    let (cert, iterations, method) = if problem.reduced_dim == 0 {
        let cand = Candidate {
            e: Vec::new(),
            gamma: T::one(),
            dual: vec![czero(); problem.sample_count()],
            iterations: 0,
        };
        (certify(problem, &cand), 0, opts.method)
    } else {
        match opts.method {
            Method::Admm => {
                let c = solve_admm(problem, opts);
                let it = c.iterations;
                (certify(problem, &c), it, Method::Admm)
            }
            Method::Ipm => {
                let c = solve_ipm(problem, opts);
                let it = c.iterations;
                (certify(problem, &c), it, Method::Ipm)
            }
            Method::Auto => {
                let c = solve_admm(problem, opts);
                let mut it = c.iterations;
                let mut cert = certify(problem, &c);
                let mut used = Method::Admm;
                let settled = cert.is_optimal(floor, tol_gap) || cert.is_infeasible(floor);
                if !settled && 2 * problem.reduced_dim < opts.ipm_dense_limit {
                    let c2 = solve_ipm(problem, opts);
                    it += c2.iterations;
                    let cert2 = certify(problem, &c2);
                    let bound = cert.bound.min(cert2.bound);
                    if cert2.gamma > cert.gamma {
                        cert = cert2;
                        used = Method::Ipm;
                    }
                    cert.bound = bound;
                }
                (cert, it, used)
            }
        }
    };

    let status = if cert.is_infeasible(floor) {
        SolveStatus::Infeasible
    } else if cert.is_optimal(floor, tol_gap) {
        SolveStatus::Optimal
    } else {
        SolveStatus::MaxIterations
    };
    let t_hat = problem.lift(&cert.e);
    let gamma = cert.gamma;
    let mut sol = SocpSolution {
        gamma_hat: gamma,
        t_hat,
        status,
        primal_residual: T::zero(),
        gap: cert.bound - gamma,
        upper_bound: cert.bound,
        iterations,
        wall_time: 0.0,
        method,
        dual: cert.dual,
    };
    let report = check_kkt(problem, &sol);
    let ball_rel = report.ball_residual / to_f64(problem.ball_coeff);
    sol.primal_residual = lit(report.peak_residual.max(ball_rel).max(0.0));
    sol.wall_time = start.elapsed().as_secs_f64();
    sol
}

/// Constraint residuals and optimality measures of a solution.
#[derive(Clone, Debug, Serialize)]
pub struct KktReport {
    /// `(max_i |x_i| - rho) / rho`; non-positive when satisfied.
    pub peak_residual: f64,
    /// `||t||^2 - a (1 - gamma)`; non-positive when satisfied.
    pub ball_residual: f64,
    /// `max(gamma_floor - gamma, gamma - 1)`; non-positive when satisfied.
    pub box_residual: f64,
    /// `sum_i (rho |y_i| - Re(conj(y_i) x_i)) / (rho ||y||_1)`; zero under exact
    /// complementary slackness.
    pub complementarity: f64,
    /// Certified upper bound on the optimal `gamma`.
    pub upper_bound: f64,
    /// `upper_bound - gamma`.
    pub gap: f64,
}

impl KktReport {
    /// True if every residual is within the tolerances of `opts`.
    pub fn passes(&self, opts: &SolverOptions, gamma: f64) -> bool {
        self.peak_residual <= opts.tol_feas
            && self.ball_residual <= opts.tol_ball
            && self.box_residual <= 1e-12
            && self.gap <= opts.tol_gap * gamma.abs().max(1.0)
    }
}

/// Evaluates every constraint at `(gamma_hat, t_hat)` through the full
/// (unreduced) operator, plus complementarity and the certified gap from the
/// stored multiplier.
///
/// The sign convention is `residual <= 0` for a satisfied constraint.
pub fn check_kkt<T: Real>(problem: &SocpProblem<T>, solution: &SocpSolution<T>) -> KktReport {
    let g = solution.gamma_hat;
    let rho = problem.peak_bound;
    let x = problem.relaxed_signal(&solution.t_hat, g);
    let peak = x.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let ball = norm_sqr(&solution.t_hat) - problem.ball_coeff * (T::one() - g);
    let (lo, hi) = problem.gamma_bounds;
    let boxr = (lo - g).max(g - hi);
    let (compl, bound) = if solution.dual.len() == x.len() {
        let l1: T = solution.dual.iter().map(|z| z.norm()).sum();
        let slack: T = solution
            .dual
            .iter()
            .zip(&x)
            .map(|(y, xi)| rho * y.norm() - (y.conj() * xi).re)
            .sum();
        let compl = if l1 > T::zero() {
            slack / (rho * l1)
        } else {
            T::zero()
        };
        (compl, problem.dual_bound(&solution.dual))
    } else {
        (T::zero(), T::one())
    };
    KktReport {
        peak_residual: to_f64((peak - rho) / rho),
        ball_residual: to_f64(ball),
        box_residual: to_f64(boxr),
        complementarity: to_f64(compl),
        upper_bound: to_f64(bound),
        gap: to_f64(bound - g),
    }
}
