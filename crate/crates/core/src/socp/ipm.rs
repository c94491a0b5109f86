//! Primal-dual interior-point method (Mehrotra predictor-corrector with
//! Nesterov-Todd scaling) on the real conic form of the reduced program.
//!
//! Variables are `x = (gamma, Re e, Im e)`; constraints read `G x + s = h` with
//! `s` in a product of cones laid out as
//!
//! * two non-negative slacks `1 - gamma` and `gamma + 1` (the extended range,
//!   so that `(e, gamma) = (0, -1 + eps)` is strictly feasible),
//! * the ball `||e||^2 <= a (1 - gamma)` as the second-order cone
//!   `(a (1 - gamma) + 1, a (1 - gamma) - 1, 2 e)`,
//! * one three-dimensional cone `(rho, Re x_i, Im x_i)` per time sample.
//!
//! The normal matrix `G^T W^{-2} G` is formed densely; the sample cones
//! contribute two rank-one rows each and the ball a diagonal plus rank-two term.

use super::{Candidate, SocpProblem, SolverOptions};
use crate::linalg::{cholesky_in_place, cholesky_solve};
use crate::scalar::{czero, lit, Real, C};

/// Scaling data of one second-order cone: `W = beta (2 v v^T - J)`.
#[derive(Clone, Debug)]
struct SocScaling<T> {
    beta: T,
    v: Vec<T>,
}

impl<T: Real> SocScaling<T> {
    /// Nesterov-Todd scaling for interior `s`, `z`.
    fn new(s: &[T], z: &[T]) -> Self {
        let half = lit::<T>(0.5);
        let sd = soc_det(s).sqrt();
        let zd = soc_det(z).sqrt();
        let sb: Vec<T> = s.iter().map(|&x| x / sd).collect();
        let zb: Vec<T> = z.iter().map(|&x| x / zd).collect();
        let dot: T = sb.iter().zip(&zb).map(|(a, b)| *a * *b).sum();
        let g = (half * (T::one() + dot)).sqrt();
        let mut w: Vec<T> = Vec::with_capacity(s.len());
        w.push((sb[0] + zb[0]) / (g + g));
        for i in 1..s.len() {
            w.push((sb[i] - zb[i]) / (g + g));
        }
        let den = (lit::<T>(2.0) * (w[0] + T::one())).sqrt();
        let mut v = w;
        v[0] = v[0] + T::one();
        for x in v.iter_mut() {
            *x = *x / den;
        }
        Self {
            beta: (sd / zd).sqrt(),
            v,
        }
    }

    /// `W u`.
    fn apply(&self, u: &[T], out: &mut [T]) {
        let vu: T = self.v.iter().zip(u).map(|(a, b)| *a * *b).sum();
        let two = lit::<T>(2.0);
        for (i, o) in out.iter_mut().enumerate() {
            let ju = if i == 0 { u[0] } else { -u[i] };
            *o = self.beta * (two * self.v[i] * vu - ju);
        }
    }

    /// `W^{-1} u = (2 Jv (Jv)^T u - J u) / beta`.
    fn apply_inv(&self, u: &[T], out: &mut [T]) {
        let jvu: T = self
            .v
            .iter()
            .zip(u)
            .enumerate()
            .map(|(i, (a, b))| if i == 0 { *a * *b } else { -*a * *b })
            .sum();
        let two = lit::<T>(2.0);
        for (i, o) in out.iter_mut().enumerate() {
            let (jv, ju) = if i == 0 {
                (self.v[0], u[0])
            } else {
                (-self.v[i], -u[i])
            };
            *o = (two * jv * jvu - ju) / self.beta;
        }
    }
}

fn soc_det<T: Real>(u: &[T]) -> T {
    let n1: T = u[1..].iter().map(|x| *x * *x).sum::<T>().sqrt();
    (u[0] - n1) * (u[0] + n1)
}

/// Jordan product `u o w = (u^T w, u0 w1 + w0 u1)`.
fn soc_prod<T: Real>(u: &[T], w: &[T], out: &mut [T]) {
    out[0] = u.iter().zip(w).map(|(a, b)| *a * *b).sum();
    for i in 1..u.len() {
        out[i] = u[0] * w[i] + w[0] * u[i];
    }
}

/// Solves `l o x = r` for `x`.
fn soc_div<T: Real>(l: &[T], r: &[T], out: &mut [T]) {
    let det = soc_det(l);
    let l1r1: T = l[1..].iter().zip(&r[1..]).map(|(a, b)| *a * *b).sum();
    let x0 = (l[0] * r[0] - l1r1) / det;
    out[0] = x0;
    for i in 1..l.len() {
        out[i] = (r[i] - x0 * l[i]) / l[0];
    }
}

/// Largest `alpha` keeping `u + alpha d` in the second-order cone.
fn soc_max_step<T: Real>(u: &[T], d: &[T]) -> T {
    let a = d[0] * d[0] - d[1..].iter().map(|x| *x * *x).sum::<T>();
    let b = u[0] * d[0] - u[1..].iter().zip(&d[1..]).map(|(x, y)| *x * *y).sum::<T>();
    let c = soc_det(u);
    let mut best = T::infinity();
    if d[0] < T::zero() {
        best = -u[0] / d[0];
    }
    // roots of a t^2 + 2 b t + c
    if a == T::zero() {
        if b < T::zero() {
            best = best.min(-c / (b + b));
        }
        return best;
    }
    let disc = b * b - a * c;
    if disc < T::zero() {
        return best;
    }
    let sq = disc.sqrt();
    let q = -(b + if b >= T::zero() { sq } else { -sq });
    let cands = [q / a, if q != T::zero() { c / q } else { T::infinity() }];
    for r in cands {
        if r > T::zero() {
            best = best.min(r);
        }
    }
    best
}

struct Layout {
    /// Complex reduced dimension.
    n: usize,
    samples: usize,
}

impl Layout {
    fn nv(&self) -> usize {
        2 * self.n + 1
    }
    fn ball(&self) -> usize {
        2
    }
    fn ball_len(&self) -> usize {
        2 * self.n + 2
    }
    fn peak(&self, i: usize) -> usize {
        2 + self.ball_len() + 3 * i
    }
    fn total(&self) -> usize {
        2 + self.ball_len() + 3 * self.samples
    }
    fn degree(&self) -> usize {
        2 + 1 + self.samples
    }
}

struct Dense<T> {
    /// Sample-major real and imaginary parts of the reduced operator.
    are: Vec<T>,
    aim: Vec<T>,
    /// `Qb / 2`.
    half_c: Vec<C<T>>,
}

impl<T: Real> Dense<T> {
    fn build(p: &SocpProblem<T>) -> Self {
        let n = p.reduced_dim();
        let ns = p.sample_count();
        let mut are = vec![T::zero(); ns * n];
        let mut aim = vec![T::zero(); ns * n];
        let mut unit = vec![czero(); n];
        let mut col = vec![czero(); ns];
        for j in 0..n {
            unit[j] = C::new(T::one(), T::zero());
            p.forward_reduced_into(&unit, &mut col);
            unit[j] = czero();
            for (i, z) in col.iter().enumerate() {
                are[i * n + j] = z.re;
                aim[i * n + j] = z.im;
            }
        }
        let half = lit::<T>(0.5);
        Self {
            are,
            aim,
            half_c: p.offset.iter().map(|z| z * half).collect(),
        }
    }
}

struct Ipm<'a, T: Real> {
    lay: Layout,
    a: T,
    rho: T,
    lo: T,
    dense: &'a Dense<T>,
}

impl<T: Real> Ipm<'_, T> {
    /// `G x`.
    fn g_mul(&self, x: &[T], out: &mut [T]) {
        let n = self.lay.n;
        let gamma = x[0];
        let (u, v) = (&x[1..1 + n], &x[1 + n..]);
        out[0] = gamma;
        out[1] = -gamma;
        let b = self.lay.ball();
        out[b] = self.a * gamma;
        out[b + 1] = self.a * gamma;
        let two = lit::<T>(2.0);
        for j in 0..n {
            out[b + 2 + j] = -two * u[j];
            out[b + 2 + n + j] = -two * v[j];
        }
        for i in 0..self.lay.samples {
            let ar = &self.dense.are[i * n..(i + 1) * n];
            let ai = &self.dense.aim[i * n..(i + 1) * n];
            let mut re = self.dense.half_c[i].re * gamma;
            let mut im = self.dense.half_c[i].im * gamma;
            for j in 0..n {
                re = re + ar[j] * u[j] - ai[j] * v[j];
                im = im + ai[j] * u[j] + ar[j] * v[j];
            }
            let o = self.lay.peak(i);
            out[o] = T::zero();
            out[o + 1] = -re;
            out[o + 2] = -im;
        }
    }

    /// `G^T z`.
    fn gt_mul(&self, z: &[T], out: &mut [T]) {
        let n = self.lay.n;
        let b = self.lay.ball();
        let two = lit::<T>(2.0);
        out.iter_mut().for_each(|x| *x = T::zero());
        out[0] = z[0] - z[1] + self.a * (z[b] + z[b + 1]);
        for j in 0..n {
            out[1 + j] = -two * z[b + 2 + j];
            out[1 + n + j] = -two * z[b + 2 + n + j];
        }
        for i in 0..self.lay.samples {
            let o = self.lay.peak(i);
            let (z1, z2) = (z[o + 1], z[o + 2]);
            let ar = &self.dense.are[i * n..(i + 1) * n];
            let ai = &self.dense.aim[i * n..(i + 1) * n];
            out[0] = out[0] - (self.dense.half_c[i].re * z1 + self.dense.half_c[i].im * z2);
            for j in 0..n {
                out[1 + j] = out[1 + j] - (ar[j] * z1 + ai[j] * z2);
                out[1 + n + j] = out[1 + n + j] - (-ai[j] * z1 + ar[j] * z2);
            }
        }
    }

    fn h_vec(&self) -> Vec<T> {
        let mut h = vec![T::zero(); self.lay.total()];
        h[0] = T::one();
        h[1] = -self.lo;
        let b = self.lay.ball();
        h[b] = self.a + T::one();
        h[b + 1] = self.a - T::one();
        for i in 0..self.lay.samples {
            let o = self.lay.peak(i);
            h[o] = self.rho;
            h[o + 1] = self.dense.half_c[i].re;
            h[o + 2] = self.dense.half_c[i].im;
        }
        h
    }

    /// Cone slices: (offset, length) of every second-order cone.
    fn socs(&self) -> Vec<(usize, usize)> {
        let mut v = vec![(self.lay.ball(), self.lay.ball_len())];
        v.extend((0..self.lay.samples).map(|i| (self.lay.peak(i), 3)));
        v
    }
}

/// Scaling for the whole cone product.
struct Scaling<T> {
    /// `sqrt(s / z)` of the two non-negative slacks.
    nn: [T; 2],
    soc: Vec<SocScaling<T>>,
}

impl<T: Real> Scaling<T> {
    fn apply(&self, socs: &[(usize, usize)], u: &[T], out: &mut [T], inverse: bool) {
        for i in 0..2 {
            out[i] = if inverse {
                u[i] / self.nn[i]
            } else {
                u[i] * self.nn[i]
            };
        }
        for (sc, &(o, l)) in self.soc.iter().zip(socs) {
            if inverse {
                sc.apply_inv(&u[o..o + l], &mut out[o..o + l]);
            } else {
                sc.apply(&u[o..o + l], &mut out[o..o + l]);
            }
        }
    }
}

fn max_step<T: Real>(socs: &[(usize, usize)], u: &[T], d: &[T]) -> T {
    let mut a = T::infinity();
    for i in 0..2 {
        if d[i] < T::zero() {
            a = a.min(-u[i] / d[i]);
        }
    }
    for &(o, l) in socs {
        a = a.min(soc_max_step(&u[o..o + l], &d[o..o + l]));
    }
    a
}

fn jordan_prod<T: Real>(socs: &[(usize, usize)], u: &[T], w: &[T], out: &mut [T]) {
    for i in 0..2 {
        out[i] = u[i] * w[i];
    }
    for &(o, l) in socs {
        soc_prod(&u[o..o + l], &w[o..o + l], &mut out[o..o + l]);
    }
}

fn jordan_div<T: Real>(socs: &[(usize, usize)], l: &[T], r: &[T], out: &mut [T]) {
    for i in 0..2 {
        out[i] = r[i] / l[i];
    }
    for &(o, n) in socs {
        soc_div(&l[o..o + n], &r[o..o + n], &mut out[o..o + n]);
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Multiplier on the sample constraints in the complex form:
/// `y_i = -(z_i1 + i z_i2)`.
fn sample_dual<T: Real>(lay: &Layout, z: &[T]) -> Vec<C<T>> {
    (0..lay.samples)
        .map(|i| {
            let o = lay.peak(i);
            C::new(-z[o + 1], -z[o + 2])
        })
        .collect()
}

/// Runs the interior-point method.
pub(crate) fn solve_ipm<T: Real>(p: &SocpProblem<T>, opts: &SolverOptions) -> Candidate<T> {
    let dense = Dense::build(p);
    let ipm = Ipm {
        lay: Layout {
            n: p.reduced_dim(),
            samples: p.sample_count(),
        },
        a: p.ball_coeff,
        rho: p.peak_bound,
        lo: -T::one(),
        dense: &dense,
    };
    let lay = &ipm.lay;
    let (n, nv, tot) = (lay.n, lay.nv(), lay.total());
    let socs = ipm.socs();
    let h = ipm.h_vec();
    let mut cvec = vec![T::zero(); nv];
    cvec[0] = -T::one();

    // Strictly feasible primal start: e = 0 and beta small enough that every
    // sample sits at half the bound.
    let cmax = p.offset.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let half = lit::<T>(0.5);
    let beta0 = if cmax > T::zero() {
        half.min(half * p.peak_bound / cmax)
    } else {
        half
    };
    let mut x = vec![T::zero(); nv];
    x[0] = beta0 + beta0 - T::one();
    let mut s = vec![T::zero(); tot];
    ipm.g_mul(&x, &mut s);
    for (si, hi) in s.iter_mut().zip(&h) {
        *si = *hi - *si;
    }
    let mut z = vec![T::zero(); tot];
    z[0] = T::one();
    z[1] = T::one();
    for &(o, _) in &socs {
        z[o] = T::one();
    }

    let deg = lit::<T>(lay.degree() as f64);
    let mut iterations = 0;
    let mut tmp = vec![T::zero(); tot];
    let mut tmp2 = vec![T::zero(); tot];
    let mut rx = vec![T::zero(); nv];
    let mut rz = vec![T::zero(); tot];
    let mut hmat = vec![T::zero(); nv * nv];
    let mut ycols = vec![T::zero(); 2 * lay.samples * nv];
    let gap_tol = lit::<T>(opts.tol_gap * 1e-2);
    let cert_tol = lit::<T>(opts.tol_gap * 0.1);
    let mut best_bound = T::infinity();
    let mut best_dual = vec![czero(); lay.samples];
    let res_tol = lit::<T>(opts.tol_feas * 1e-2);

    for it in 0..opts.max_iter {
        iterations = it + 1;
        // residuals
        ipm.gt_mul(&z, &mut rx);
        for (r, c) in rx.iter_mut().zip(&cvec) {
            *r = *r + *c;
        }
        ipm.g_mul(&x, &mut rz);
        for ((r, si), hi) in rz.iter_mut().zip(&s).zip(&h) {
            *r = *r + *si - *hi;
        }
        let gap = dot(&s, &z);
        let mu = gap / deg;
        let dres = rx.iter().map(|v| *v * *v).sum::<T>().sqrt();
        let pres = rz.iter().map(|v| *v * *v).sum::<T>().sqrt() / (T::one() + dot(&h, &h).sqrt());
        let y = sample_dual(lay, &z);
        let bound = p.dual_bound(&y);
        if !(bound >= best_bound) {
            best_bound = bound;
            best_dual = y;
        }
        let certified = best_bound - x[0] <= cert_tol * T::one().max(x[0].abs());
        if (gap <= gap_tol && dres <= res_tol && pres <= res_tol) || (certified && pres <= res_tol)
        {
            break;
        }

        // scaling
        let scaling = Scaling {
            nn: [(s[0] / z[0]).sqrt(), (s[1] / z[1]).sqrt()],
            soc: socs
                .iter()
                .map(|&(o, l)| SocScaling::new(&s[o..o + l], &z[o..o + l]))
                .collect(),
        };
        let mut lambda = vec![T::zero(); tot];
        scaling.apply(&socs, &z, &mut lambda, false);

        // normal matrix G^T W^{-2} G
        hmat.iter_mut().for_each(|v| *v = T::zero());
        hmat[0] = z[0] / s[0] + z[1] / s[1];
        {
            let sc = &scaling.soc[0];
            let inv_b2 = T::one() / (sc.beta * sc.beta);
            let vv: T = sc.v.iter().map(|x| *x * *x).sum();
            // p = G_b^T J v, q = G_b^T v
            let b = &sc.v;
            let mut pv = vec![T::zero(); nv];
            let mut qv = vec![T::zero(); nv];
            pv[0] = ipm.a * (b[0] - b[1]);
            qv[0] = ipm.a * (b[0] + b[1]);
            let two = lit::<T>(2.0);
            for j in 0..2 * n {
                pv[1 + j] = two * b[2 + j];
                qv[1 + j] = -two * b[2 + j];
            }
            let four_vv = lit::<T>(4.0) * vv;
            hmat[0] = hmat[0] + inv_b2 * two * ipm.a * ipm.a;
            for j in 1..nv {
                hmat[j * nv + j] = hmat[j * nv + j] + inv_b2 * lit::<T>(4.0);
            }
            for r in 0..nv {
                for c in 0..=r {
                    let add = four_vv * pv[r] * pv[c] - two * (pv[r] * qv[c] + qv[r] * pv[c]);
                    hmat[r * nv + c] = hmat[r * nv + c] + inv_b2 * add;
                }
            }
        }
        let rows = 2 * lay.samples;
        for i in 0..lay.samples {
            let sc = &scaling.soc[1 + i];
            let inv_b2 = T::one() / (sc.beta * sc.beta);
            let vv: T = sc.v.iter().map(|x| *x * *x).sum();
            let kappa = inv_b2 * lit::<T>(4.0) * (vv + T::one());
            let (v1, v2) = (sc.v[1], sc.v[2]);
            let d11 = inv_b2 + kappa * v1 * v1;
            let d12 = kappa * v1 * v2;
            let d22 = inv_b2 + kappa * v2 * v2;
            let l11 = d11.sqrt();
            let l21 = d12 / l11;
            let l22 = (d22 - l21 * l21).max(T::zero()).sqrt();
            let ar = &dense.are[i * n..(i + 1) * n];
            let ai = &dense.aim[i * n..(i + 1) * n];
            let hc = dense.half_c[i];
            // P = [hc.re, ar, -ai], R = [hc.im, ai, ar]
            let r1 = 2 * i;
            let r2 = 2 * i + 1;
            ycols[r1] = l11 * hc.re + l21 * hc.im;
            ycols[r2] = l22 * hc.im;
            for j in 0..n {
                ycols[(1 + j) * rows + r1] = l11 * ar[j] + l21 * ai[j];
                ycols[(1 + j) * rows + r2] = l22 * ai[j];
                ycols[(1 + n + j) * rows + r1] = -l11 * ai[j] + l21 * ar[j];
                ycols[(1 + n + j) * rows + r2] = l22 * ar[j];
            }
        }
        for r in 0..nv {
            let yr = &ycols[r * rows..(r + 1) * rows];
            for c in 0..=r {
                let yc = &ycols[c * rows..(c + 1) * rows];
                hmat[r * nv + c] = hmat[r * nv + c] + dot(yr, yc);
            }
        }
        let diag_max = (0..nv).map(|j| hmat[j * nv + j]).fold(T::zero(), T::max);
        let mut reg = diag_max * lit::<T>(1e-15);
        let mut factor = hmat.clone();
        loop {
            for j in 0..nv {
                factor[j * nv + j] = hmat[j * nv + j] + reg;
            }
            for r in 0..nv {
                for c in 0..r {
                    factor[r * nv + c] = hmat[r * nv + c];
                }
            }
            if cholesky_in_place(&mut factor, nv).is_ok() {
                break;
            }
            reg = if reg == T::zero() {
                T::epsilon()
            } else {
                reg * lit(100.0)
            };
            if !(reg < diag_max) {
                break;
            }
        }

        // Newton solve for right-hand sides (bx, bz): returns (dx, dz).
        let solve =
            |bx: &[T], bz: &[T], dx: &mut [T], dz: &mut [T], work: &mut [T], work2: &mut [T]| {
                // work = W^{-2} bz
                scaling.apply(&socs, bz, work2, true);
                scaling.apply(&socs, work2, work, true);
                let mut rhs = vec![T::zero(); nv];
                ipm.gt_mul(work, &mut rhs);
                for (r, b) in rhs.iter_mut().zip(bx) {
                    *r = *r + *b;
                }
                cholesky_solve(&factor, nv, &mut rhs);
                dx.copy_from_slice(&rhs);
                ipm.g_mul(dx, work);
                for (w, b) in work.iter_mut().zip(bz) {
                    *w = *w - *b;
                }
                scaling.apply(&socs, work, work2, true);
                scaling.apply(&socs, work2, dz, true);
            };

        let mut ds_a = vec![T::zero(); tot];
        let mut dz_a = vec![T::zero(); tot];
        let mut dx_a = vec![T::zero(); nv];
        let bx: Vec<T> = rx.iter().map(|v| -*v).collect();

        // predictor
        let mut rc = vec![T::zero(); tot];
        jordan_prod(&socs, &lambda, &lambda, &mut rc);
        rc.iter_mut().for_each(|v| *v = -*v);
        let step_dirs =
            |rc: &[T], dx: &mut [T], dz: &mut [T], ds: &mut [T], tmp: &mut [T], tmp2: &mut [T]| {
                let mut rhs_s = vec![T::zero(); tot];
                jordan_div(&socs, &lambda, rc, &mut rhs_s);
                let mut w_rhs = vec![T::zero(); tot];
                scaling.apply(&socs, &rhs_s, &mut w_rhs, false);
                let bz: Vec<T> = rz.iter().zip(&w_rhs).map(|(r, w)| -*r - *w).collect();
                solve(&bx, &bz, dx, dz, tmp, tmp2);
                let mut wdz = vec![T::zero(); tot];
                scaling.apply(&socs, dz, &mut wdz, false);
                for (t, (a, b)) in tmp.iter_mut().zip(rhs_s.iter().zip(&wdz)) {
                    *t = *a - *b;
                }
                scaling.apply(&socs, tmp, ds, false);
            };
        step_dirs(&rc, &mut dx_a, &mut dz_a, &mut ds_a, &mut tmp, &mut tmp2);
        let alpha_a = max_step(&socs, &s, &ds_a)
            .min(max_step(&socs, &z, &dz_a))
            .min(T::one());
        let s_aff: Vec<T> = s
            .iter()
            .zip(&ds_a)
            .map(|(a, b)| *a + alpha_a * *b)
            .collect();
        let z_aff: Vec<T> = z
            .iter()
            .zip(&dz_a)
            .map(|(a, b)| *a + alpha_a * *b)
            .collect();
        let mu_aff = dot(&s_aff, &z_aff) / deg;
        let ratio = (mu_aff / mu).max(T::zero()).min(T::one());
        let sigma = ratio * ratio * ratio;

        // corrector
        let mut ws = vec![T::zero(); tot];
        let mut wz = vec![T::zero(); tot];
        scaling.apply(&socs, &ds_a, &mut ws, true);
        scaling.apply(&socs, &dz_a, &mut wz, false);
        let mut corr = vec![T::zero(); tot];
        jordan_prod(&socs, &ws, &wz, &mut corr);
        jordan_prod(&socs, &lambda, &lambda, &mut rc);
        for (r, c) in rc.iter_mut().zip(&corr) {
            *r = -*r - *c;
        }
        let smu = sigma * mu;
        rc[0] = rc[0] + smu;
        rc[1] = rc[1] + smu;
        for &(o, _) in &socs {
            rc[o] = rc[o] + smu;
        }
        let mut dx = vec![T::zero(); nv];
        let mut dz = vec![T::zero(); tot];
        let mut ds = vec![T::zero(); tot];
        step_dirs(&rc, &mut dx, &mut dz, &mut ds, &mut tmp, &mut tmp2);
        let amax = max_step(&socs, &s, &ds).min(max_step(&socs, &z, &dz));
        let alpha = (lit::<T>(0.99) * amax).min(T::one());
        let finite = dx.iter().chain(&ds).chain(&dz).all(|v| v.is_finite());
        if !finite || !(alpha > T::zero()) || !alpha.is_finite() {
            break;
        }
        for (a, b) in x.iter_mut().zip(&dx) {
            *a = *a + alpha * *b;
        }
        for (a, b) in s.iter_mut().zip(&ds) {
            *a = *a + alpha * *b;
        }
        for (a, b) in z.iter_mut().zip(&dz) {
            *a = *a + alpha * *b;
        }
    }

    let e: Vec<C<T>> = (0..n).map(|j| C::new(x[1 + j], x[1 + n + j])).collect();
    let y = sample_dual(lay, &z);
    let dual = if p.dual_bound(&y) < best_bound {
        y
    } else {
        best_dual
    };
    // The ball slack of the final iterate can be marginally negative in
    // floating point; pull e back onto the ball if needed.
    let r2 = p.ball_coeff * (T::one() - x[0]);
    let n2: T = e.iter().map(|z| z.norm_sqr()).sum();
    let e = if n2 > r2 && n2 > T::zero() {
        let f = (r2.max(T::zero()) / n2).sqrt();
        e.into_iter().map(|z| z * f).collect()
    } else {
        e
    };
    Candidate {
        e,
        gamma: x[0],
        dual,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nt_scaling_maps_z_and_s_to_same_point() {
        let s: [f64; 4] = [2.0, 0.3, -0.5, 0.7];
        let z = [1.5, -0.4, 0.2, 0.1];
        let sc = SocScaling::new(&s, &z);
        let mut wz = [0.0; 4];
        let mut winv_s = [0.0; 4];
        sc.apply(&z, &mut wz);
        sc.apply_inv(&s, &mut winv_s);
        for (a, b) in wz.iter().zip(&winv_s) {
            assert!((a - b).abs() < 1e-13, "{wz:?} vs {winv_s:?}");
        }
        let mut back = [0.0; 4];
        sc.apply_inv(&wz, &mut back);
        for (a, b) in back.iter().zip(&z) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn jordan_division_inverts_product() {
        let l: [f64; 3] = [2.0, 0.5, -0.3];
        let x: [f64; 3] = [0.7, 0.1, 0.9];
        let mut r = [0.0; 3];
        soc_prod(&l, &x, &mut r);
        let mut y = [0.0; 3];
        soc_div(&l, &r, &mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn cone_step_reaches_boundary() {
        let u: [f64; 3] = [1.0, 0.0, 0.0];
        let d = [0.0, 1.0, 0.0];
        assert!((soc_max_step(&u, &d) - 1.0).abs() < 1e-15);
        let d2 = [1.0, 0.5, 0.0];
        assert!(soc_max_step(&u, &d2).is_infinite());
        let d3 = [-1.0, 0.0, 0.0];
        assert!((soc_max_step(&u, &d3) - 1.0).abs() < 1e-15);
    }
}
