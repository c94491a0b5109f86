//! ADMM on the splitting `w = A e + (1 + gamma)/2 Qb`, with `w` confined to the
//! product of sample disks.
//!
//! The `(e, gamma)` update minimizes `-gamma + sigma/2 ||A e + beta c - v||^2`
//! over the ball. Because `A` is unitary-times-diagonal per subcarrier, that
//! reduces to a one-dimensional convex problem in `gamma` whose inner problem
//! in `e` is a diagonal trust-region problem (solved by Newton on the secular
//! equation). The outer derivative is monotone, so a bracketed root search
//! finds the exact minimizer.
//!
//! The iteration runs on the extended range `gamma >= -1`, where `(e, gamma) =
//! (0, -1)` is always feasible, so infeasible instances still converge and are
//! then recognized from the dual bound.

use num_traits::Float;

use super::{certify, Candidate, Certified, SocpProblem, SolverOptions};
use crate::scalar::{czero, lit, Real, C};

const CHECK_EVERY: usize = 10;
const BALANCE_EVERY: usize = 20;
const BALANCE_RATIO: f64 = 10.0;

/// Data of the `(e, gamma)` subproblem for one iteration.
struct GammaStep<'a, T: Real> {
    sig: &'a [T],
    g: &'a [C<T>],
    h: &'a [C<T>],
    a: T,
    sigma: T,
    bperp2: T,
    fpb: T,
}

/// Solves `min ||Sigma e - z||^2` subject to `||e||^2 <= r2` and returns the
/// multiplier `lam` with `e = Sigma z / (Sigma^2 + lam)`.
fn secular<T: Real>(sig: &[T], z: &[C<T>], r2: T, lam_warm: T) -> T {
    let f = |lam: T| {
        let mut v = T::zero();
        let mut d = T::zero();
        for (&s, zi) in sig.iter().zip(z) {
            let w = s * s * zi.norm_sqr();
            let den = s * s + lam;
            let q = w / (den * den);
            v = v + q;
            d = d + q / den;
        }
        (v, -(d + d))
    };
    let (f0, _) = f(T::zero());
    if f0 <= r2 {
        return T::zero();
    }
    let inv_r = T::one() / r2.sqrt();
    let mut lam = if lam_warm > T::zero() && lam_warm.is_finite() && f(lam_warm).0 >= r2 {
        lam_warm
    } else {
        T::zero()
    };
    let tiny = lit::<T>(4.0) * T::epsilon();
    for _ in 0..100 {
        let (v, d) = f(lam);
        let psi = T::one() / v.sqrt() - inv_r;
        let dpsi = -lit::<T>(0.5) * d / (v * v.sqrt());
        if !(dpsi > T::zero()) {
            break;
        }
        let step = psi / dpsi;
        lam = lam - step;
        if Float::abs(step) <= tiny * lam.max(T::min_positive_value()) {
            break;
        }
    }
    lam.max(T::zero())
}

impl<T: Real> GammaStep<'_, T> {
    /// Derivative of the reduced objective at `gamma`; fills `e` and returns
    /// the updated secular multiplier.
    fn eval(&self, gamma: T, lam_warm: T, z: &mut [C<T>], e: &mut [C<T>]) -> (T, T) {
        let half = lit::<T>(0.5);
        let beta = half * (T::one() + gamma);
        for ((zi, gi), hi) in z.iter_mut().zip(self.g).zip(self.h) {
            *zi = gi - hi * beta;
        }
        let r2 = self.a * (T::one() - gamma);
        let lam = if r2 <= T::zero() {
            let any = z
                .iter()
                .zip(self.sig)
                .any(|(zi, &s)| s * zi.norm() > T::zero());
            if any {
                e.iter_mut().for_each(|x| *x = czero());
                return (T::infinity(), T::infinity());
            }
            T::zero()
        } else {
            secular(self.sig, z, r2, lam_warm)
        };
        let mut inner = T::zero();
        for (((ei, zi), &s), hi) in e.iter_mut().zip(z.iter()).zip(self.sig).zip(self.h) {
            *ei = zi * (s / (s * s + lam));
            let resid = *ei * s - zi;
            inner = inner + (resid.conj() * hi).re;
        }
        let d =
            -T::one() + half * self.sigma * (inner + beta * self.bperp2 - self.fpb + lam * self.a);
        (d, lam)
    }

    /// Minimizes over `gamma` in `[lo, 1]`, starting the bracket search at
    /// `guess`. Leaves the minimizing `e` in `e`.
    fn solve(
        &self,
        lo: T,
        guess: T,
        step_hint: T,
        lam: &mut T,
        z: &mut [C<T>],
        e: &mut [C<T>],
    ) -> T {
        let hi = T::one();
        let guess = guess.max(lo).min(hi);
        let (fg, lg) = self.eval(guess, *lam, z, e);
        *lam = lg;
        if fg == T::zero() {
            return guess;
        }
        let mut delta = step_hint.max(lit(1e-8));
        let (mut a, mut fa, mut b, mut fb);
        if fg < T::zero() {
            a = guess;
            fa = fg;
            loop {
                if a >= hi {
                    return hi;
                }
                let cand = (a + delta).min(hi);
                let (fc, lc) = self.eval(cand, *lam, z, e);
                if fc >= T::zero() {
                    b = cand;
                    fb = fc;
                    break;
                }
                *lam = lc;
                a = cand;
                fa = fc;
                if cand >= hi {
                    return hi;
                }
                delta = delta * lit(4.0);
            }
        } else {
            b = guess;
            fb = fg;
            loop {
                if b <= lo {
                    self.eval(lo, T::zero(), z, e);
                    return lo;
                }
                let cand = (b - delta).max(lo);
                let (fc, lc) = self.eval(cand, *lam, z, e);
                if fc <= T::zero() {
                    a = cand;
                    fa = fc;
                    *lam = lc;
                    break;
                }
                b = cand;
                fb = fc;
                if cand <= lo {
                    return lo;
                }
                delta = delta * lit(4.0);
            }
        }
        let lam_a = *lam;
        let tol = lit::<T>(8.0) * T::epsilon();
        let mut side = 0i8;
        let mut x = a;
        for _ in 0..200 {
            let mut cand = if fb.is_finite() {
                (a * fb - b * fa) / (fb - fa)
            } else {
                lit::<T>(0.5) * (a + b)
            };
            if !(cand > a && cand < b) {
                cand = lit::<T>(0.5) * (a + b);
            }
            let (fc, lc) = self.eval(cand, lam_a, z, e);
            x = cand;
            if fc == T::zero() {
                *lam = lc;
                return x;
            }
            if fc < T::zero() {
                a = cand;
                fa = fc;
                if side == -1 && fb.is_finite() {
                    fb = fb * lit(0.5);
                }
                side = -1;
            } else {
                b = cand;
                fb = fc;
                if side == 1 {
                    fa = fa * lit(0.5);
                }
                side = 1;
            }
            *lam = lc;
            if b - a <= tol * (T::one() + Float::abs(b)) {
                break;
            }
        }
        if x != a {
            let (_, lc) = self.eval(a, lam_a, z, e);
            *lam = lc;
        }
        a
    }
}

/// Runs ADMM and returns the best certified point seen.
pub(crate) fn solve_admm<T: Real>(p: &SocpProblem<T>, opts: &SolverOptions) -> Candidate<T> {
    let n = p.reduced_dim();
    let mk = p.sample_count();
    let k_n = p.subcarriers();
    let rho = p.peak_bound;
    let floor = p.gamma_bounds.0;
    let tol_gap = lit::<T>(opts.tol_gap);
    let lo_ext = -T::one();
    let mut sigma = lit::<T>(opts.admm_penalty) * p.penalty_scale();

    let sig: Vec<T> = (0..k_n).flat_map(|k| p.gains(k).iter().copied()).collect();
    let mut h = vec![czero(); n];
    p.project_freq(p.b_freq(), &mut h);
    let bb: T = p.b_freq().iter().map(|z| z.norm_sqr()).sum();
    let hh: T = h.iter().map(|z| z.norm_sqr()).sum();
    let bperp2 = (bb - hh).max(T::zero());

    let mut w = vec![czero(); mk];
    let mut u = vec![czero(); mk];
    let mut v = vec![czero(); mk];
    let mut x = vec![czero(); mk];
    let mut g = vec![czero(); n];
    let mut z = vec![czero(); n];
    let mut e = vec![czero(); n];
    let mut gamma = T::one();
    let mut lam = T::zero();
    let mut step_hint = lit::<T>(1e-2);

    let mut best: Option<Certified<T>> = None;
    let mut best_bound = T::infinity();
    let mut best_dual: Vec<C<T>> = vec![czero(); mk];
    let mut iterations = 0;

    for it in 1..=opts.admm_max_iter.max(1) {
        iterations = it;
        for ((vi, wi), ui) in v.iter_mut().zip(&w).zip(&u) {
            *vi = wi - ui;
        }
        p.dft().forward_blocks(&mut v);
        p.project_freq(&v, &mut g);
        let fb: C<T> = v
            .iter()
            .zip(p.b_freq())
            .fold(czero(), |acc, (f, b)| acc + f.conj() * b);
        let gh: C<T> = g
            .iter()
            .zip(&h)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * b);
        let step = GammaStep {
            sig: &sig,
            g: &g,
            h: &h,
            a: p.ball_coeff,
            sigma,
            bperp2,
            fpb: (fb - gh).re,
        };
        let new_gamma = step.solve(lo_ext, gamma, step_hint, &mut lam, &mut z, &mut e);
        step_hint = (Float::abs(new_gamma - gamma) * lit(2.0)).max(lit(1e-10));
        gamma = new_gamma;

        p.forward_reduced_into(&e, &mut x);
        let beta = lit::<T>(0.5) * (T::one() + gamma);
        for (xi, ci) in x.iter_mut().zip(&p.offset) {
            *xi = *xi + *ci * beta;
        }
        let mut r2 = T::zero();
        let mut s2 = T::zero();
        let mut x2 = T::zero();
        let mut w2 = T::zero();
        let mut u2 = T::zero();
        for ((wi, ui), xi) in w.iter_mut().zip(u.iter_mut()).zip(&x) {
            let target = *xi + *ui;
            let mag = target.norm();
            let new_w = if mag > rho {
                target * (rho / mag)
            } else {
                target
            };
            let r = *xi - new_w;
            s2 = s2 + (new_w - *wi).norm_sqr();
            *wi = new_w;
            *ui = *ui + r;
            r2 = r2 + r.norm_sqr();
            x2 = x2 + xi.norm_sqr();
            w2 = w2 + new_w.norm_sqr();
            u2 = u2 + ui.norm_sqr();
        }

        if it % CHECK_EVERY == 0 || it == opts.admm_max_iter {
            let dual: Vec<C<T>> = u.iter().map(|z| z * sigma).collect();
            let cand = Candidate {
                e: e.clone(),
                gamma,
                dual,
                iterations: it,
            };
            let cert = certify(p, &cand);
            if cert.bound < best_bound {
                best_bound = cert.bound;
                best_dual = cand.dual;
            }
            let improves = best.as_ref().is_none_or(|b| cert.gamma > b.gamma);
            if improves {
                best = Some(cert);
            }
            let b = best.as_ref().expect("set above");
            let gap = best_bound - b.gamma;
            let done_opt = b.gamma >= floor && gap <= tol_gap * T::one().max(Float::abs(b.gamma));
            if done_opt || best_bound < floor {
                break;
            }
        }

        if it % BALANCE_EVERY == 0 {
            let pr = r2.sqrt() / x2.sqrt().max(w2.sqrt()).max(T::min_positive_value());
            let dr = sigma * s2.sqrt() / (sigma * u2.sqrt()).max(T::min_positive_value());
            let ratio = lit::<T>(BALANCE_RATIO);
            let two = lit::<T>(2.0);
            if pr > ratio * dr {
                sigma = sigma * two;
                u.iter_mut().for_each(|z| *z = *z / two);
            } else if dr > ratio * pr {
                sigma = sigma / two;
                u.iter_mut().for_each(|z| *z = *z * two);
            }
        }
    }

    let best = best.unwrap_or_else(|| {
        certify(
            p,
            &Candidate {
                e: e.clone(),
                gamma,
                dual: u.iter().map(|z| z * sigma).collect(),
                iterations,
            },
        )
    });
    Candidate {
        e: best.e,
        gamma: best.gamma,
        dual: best_dual,
        iterations,
    }
}
