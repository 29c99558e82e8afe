//! Displacement parameters `βⱼ(t)` of the Lewis-Riesenfeld eigenstates and
//! the phases they accumulate.
//!
//! The equations of motion are `iħβ̇ⱼ = λⱼβⱼ + 2fⱼ`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;
use ode_solvers::continuous_output_model::ContinuousOutputModel;
use ode_solvers::{Dopri5, SVector, System};
use serde::Serialize;

use crate::canonical::{build_q, derived_params, drive_terms, normal_frequencies};
use crate::error::{Error, Result};
use crate::schedule::OscillatorConfig;

/// Instantaneous mode frequencies, drive couplings and zero-point shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub lambda: [f64; 2],
    pub f: [Complex64; 2],
    pub g: f64,
}

pub trait BetaSystem {
    fn coefficients(&self, t: f64) -> Result<Coefficients>;
    fn hbar(&self) -> f64;

    fn lambda(&self, t: f64) -> Result<[f64; 2]> {
        Ok(self.coefficients(t)?.lambda)
    }
}

impl BetaSystem for OscillatorConfig {
    fn coefficients(&self, t: f64) -> Result<Coefficients> {
        let snap = self.at(t)?;
        let nm = build_q(&derived_params(&snap.osc, &snap.nc)?)?;
        let d = drive_terms(&nm, &snap.drives, &snap.nc);
        Ok(Coefficients { lambda: [nm.lambda1(), nm.lambda2()], f: [d.f1, d.f2], g: d.g })
    }
    fn hbar(&self) -> f64 {
        self.hbar
    }

    fn lambda(&self, t: f64) -> Result<[f64; 2]> {
        let snap = self.at(t)?;
        let (l1, l2) = normal_frequencies(&derived_params(&snap.osc, &snap.nc)?)?;
        Ok([l1, l2])
    }
}

/// Time-independent coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSystem {
    pub lambda: [f64; 2],
    pub f: [Complex64; 2],
    pub hbar: f64,
}

impl BetaSystem for ConstantSystem {
    fn coefficients(&self, _t: f64) -> Result<Coefficients> {
        Ok(Coefficients { lambda: self.lambda, f: self.f, g: 0.5 * (self.lambda[0] + self.lambda[1]) })
    }
    fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// `β̇ = −(i/ħ)(λβ + 2f)`.
pub fn beta_rate(c: &Coefficients, beta: [Complex64; 2], hbar: f64) -> [Complex64; 2] {
    let k = Complex64::new(0.0, -1.0 / hbar);
    [0, 1].map(|j| k * (beta[j] * c.lambda[j] + c.f[j] * 2.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaTrajectory {
    pub times: Vec<f64>,
    pub beta: Vec<[Complex64; 2]>,
    pub beta_dot: Vec<[Complex64; 2]>,
    /// `Ωⱼ(t) = ∫λⱼ dτ` from the start of the trajectory.
    pub omega: Vec<[f64; 2]>,
    pub coefficients: Vec<Coefficients>,
    pub hbar: f64,
}

type State = SVector<f64, 6>;

struct Rhs<'a, S: BetaSystem> {
    sys: &'a S,
    t0: f64,
    failure: &'a RefCell<Option<Error>>,
}

impl<S: BetaSystem> System<f64, State> for Rhs<'_, S> {
    fn system(&self, tau: f64, y: &State, dy: &mut State) {
        match self.sys.coefficients(self.t0 + tau) {
            Ok(c) => {
                let b = [Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])];
                let r = beta_rate(&c, b, self.sys.hbar());
                *dy = State::from([r[0].re, r[0].im, r[1].re, r[1].im, c.lambda[0], c.lambda[1]]);
            }
            Err(e) => {
                self.failure.borrow_mut().get_or_insert(e);
                dy.fill(0.0);
            }
        }
    }

    fn solout(&mut self, _t: f64, _y: &State, _dy: &State) -> bool {
        self.failure.borrow().is_some()
    }
}

/// Adaptive Dormand-Prince 5(4) integration with output every `dt`.
pub fn integrate_beta<S: BetaSystem>(
    sys: &S,
    beta0: [Complex64; 2],
    t_span: (f64, f64),
    dt: f64,
    tol: f64,
) -> Result<BetaTrajectory> {
    let (t0, t1) = t_span;
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::Validation(format!("tolerance {tol:e} outside [1e-12, 1e-4]")));
    }
    if !(t1 > t0) || !(dt > 0.0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::Validation(format!("bad time grid [{t0}, {t1}] step {dt}")));
    }
    let y0 = State::from([beta0[0].re, beta0[0].im, beta0[1].re, beta0[1].im, 0.0, 0.0]);
    // The solver works in elapsed time so the dense output stays on `t0 + i·dt`.
    let failure = RefCell::new(None);
    let rhs = Rhs { sys, t0, failure: &failure };
    let span = t1 - t0;
    let mut solver = Dopri5::new(rhs, 0.0, span, dt, y0, tol, tol * 1e-2);
    let mut dense = ContinuousOutputModel::default();
    let outcome = solver.integrate_with_continuous_output_model(&mut dense);
    let reached = solver.x_out().last().map_or(t0, |x| t0 + x);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(Error::Integration { t: reached, reason: e.to_string() });
    }
    if let Err(e) = outcome {
        return Err(Error::Integration { t: reached, reason: e.to_string() });
    }
    let steps = (span / dt * (1.0 + 1e-12)).floor() as usize;
    let mut times: Vec<f64> = (0..=steps).map(|i| t0 + i as f64 * dt).collect();
    if t1 - times[steps] > 1e-9 * dt {
        times.push(t1);
    } else {
        times[steps] = t1;
    }
    let mut ys = Vec::with_capacity(times.len());
    for t in &times {
        let y = if *t == t0 { Some(y0) } else { dense.evaluate((t - t0).min(span)) };
        ys.push(y.ok_or(Error::Integration { t: *t, reason: "outside dense output".into() })?);
    }
    let mut traj = BetaTrajectory {
        times: Vec::with_capacity(times.len()),
        beta: Vec::with_capacity(times.len()),
        beta_dot: Vec::with_capacity(times.len()),
        omega: Vec::with_capacity(times.len()),
        coefficients: Vec::with_capacity(times.len()),
        hbar: sys.hbar(),
    };
    for (t, y) in times.iter().zip(ys.iter()) {
        let c = sys.coefficients(*t).map_err(|e| Error::Integration { t: *t, reason: e.to_string() })?;
        let b = [Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])];
        if !b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Integration { t: *t, reason: "non-finite state".into() });
        }
        traj.times.push(*t);
        traj.beta_dot.push(beta_rate(&c, b, sys.hbar()));
        traj.beta.push(b);
        traj.omega.push([y[4], y[5]]);
        traj.coefficients.push(c);
    }
    Ok(traj)
}

impl BetaTrajectory {
    /// Cubic Hermite interpolation on the stored samples and derivatives.
    pub fn beta_at(&self, t: f64) -> Option<[Complex64; 2]> {
        let (first, last) = (*self.times.first()?, *self.times.last()?);
        if t < first || t > last {
            return None;
        }
        let i = self.times.partition_point(|&x| x <= t).clamp(1, self.times.len() - 1);
        let (ta, tb) = (self.times[i - 1], self.times[i]);
        let h = tb - ta;
        let s = (t - ta) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Some([0, 1].map(|j| {
            self.beta[i - 1][j] * h00
                + self.beta_dot[i - 1][j] * (h10 * h)
                + self.beta[i][j] * h01
                + self.beta_dot[i][j] * (h11 * h)
        }))
    }

    /// Keeps samples with `time ≤ t`.
    pub fn truncated(&self, t: f64) -> BetaTrajectory {
        let n = self.times.partition_point(|&x| x <= t + 1e-12 * t.abs().max(1.0));
        BetaTrajectory {
            times: self.times[..n].to_vec(),
            beta: self.beta[..n].to_vec(),
            beta_dot: self.beta_dot[..n].to_vec(),
            omega: self.omega[..n].to_vec(),
            coefficients: self.coefficients[..n].to_vec(),
            hbar: self.hbar,
        }
    }

    /// `Σⱼ[λⱼ|βⱼ|² + 2ℜ(fⱼβⱼ*) + ħℑ(β̇ⱼβⱼ*)]` at sample `i`.
    pub fn constraint_at(&self, i: usize) -> f64 {
        let c = &self.coefficients[i];
        (0..2)
            .map(|j| {
                let b = self.beta[i][j];
                c.lambda[j] * b.norm_sqr()
                    + 2.0 * (c.f[j] * b.conj()).re
                    + self.hbar * (self.beta_dot[i][j] * b.conj()).im
            })
            .sum()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,re_beta1,im_beta1,re_beta2,im_beta2,omega1,omega2,constraint_residual")?;
        for i in 0..self.times.len() {
            let b = &self.beta[i];
            let o = &self.omega[i];
            let row = [self.times[i], b[0].re, b[0].im, b[1].re, b[1].im, o[0], o[1], self.constraint_at(i).abs()];
            let cells: Vec<String> = row.iter().map(|v| crate::fmt_float(*v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Largest absolute constraint violation over the trajectory.
pub fn constraint_residual(traj: &BetaTrajectory) -> f64 {
    (0..traj.times.len()).map(|i| traj.constraint_at(i).abs()).fold(0.0, f64::max)
}

/// Composite Simpson rule on a non-uniform grid.
pub fn simpson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
    }
    let intervals = n - 1;
    let paired = intervals - intervals % 2;
    let mut s = 0.0;
    let mut i = 0;
    while i < paired {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        s += hs / 6.0 * ((2.0 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
        i += 2;
    }
    if intervals % 2 == 1 {
        let k = n - 1;
        let h0 = x[k - 1] - x[k - 2];
        let h1 = x[k] - x[k - 1];
        let a = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let b = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let e = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        s += a * y[k] + b * y[k - 1] - e * y[k - 2];
    }
    s
}

/// `φ⁽ᵍ⁾ = −Σⱼ∫ℑ(β̇ⱼβⱼ*)dτ` over the whole trajectory.
pub fn geometric_phase(traj: &BetaTrajectory) -> f64 {
    let y: Vec<f64> = (0..traj.times.len())
        .map(|i| (0..2).map(|j| (traj.beta_dot[i][j] * traj.beta[i][j].conj()).im).sum())
        .collect();
    -simpson(&traj.times, &y)
}

/// `φ⁽ᵈ⁾ = −(1/ħ)∫[g + Σₖ(λₖnₖ + λₖ|βₖ|² + 2ℜ(fₖβₖ*))]dτ` over the whole trajectory.
pub fn dynamic_phase(traj: &BetaTrajectory, n1: u32, n2: u32) -> f64 {
    let n = [n1 as f64, n2 as f64];
    let y: Vec<f64> = (0..traj.times.len())
        .map(|i| {
            let c = &traj.coefficients[i];
            c.g + (0..2)
                .map(|k| {
                    let b = traj.beta[i][k];
                    c.lambda[k] * (n[k] + b.norm_sqr()) + 2.0 * (c.f[k] * b.conj()).re
                })
                .sum::<f64>()
        })
        .collect();
    -simpson(&traj.times, &y) / traj.hbar
}

/// Phase bookkeeping for the eigenstate labelled `(n₁, n₂)`; the invariant
/// family indices `l₁ = l₂ = 0` are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub t: f64,
    pub n1: u32,
    pub n2: u32,
    pub l1: u32,
    pub l2: u32,
    pub phi_geometric: f64,
    pub phi_dynamic: f64,
    pub phi_total: f64,
}

pub fn phases(traj: &BetaTrajectory, n1: u32, n2: u32) -> PhaseRecord {
    let g = geometric_phase(traj);
    let d = dynamic_phase(traj, n1, n2);
    PhaseRecord {
        t: traj.times.last().copied().unwrap_or(0.0),
        n1,
        n2,
        l1: 0,
        l2: 0,
        phi_geometric: g,
        phi_dynamic: d,
        phi_total: g + d,
    }
}

const PANEL: f64 = 0.25;
const QUAD_TOL: f64 = 1e-14;

fn panels(a: f64, b: f64) -> Vec<f64> {
    let n = ((b - a) / PANEL).ceil().max(1.0) as usize;
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

fn integrate_real(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let out = quadrature::integrate(&f, a, b, tol);
    if !out.integral.is_finite() || out.error_estimate > 1e3 * tol.max(1e-15) {
        return Err(Error::Quadrature(format!(
            "on [{a}, {b}]: estimate {:e} after {} evaluations",
            out.error_estimate, out.num_function_evaluations
        )));
    }
    Ok(out.integral)
}

/// `βⱼ(t) = e^{−iΩⱼ/ħ}[βⱼ₀ − (2i/ħ)∫fⱼe^{iΩⱼ/ħ}dτ]` by nested quadrature
/// on `[t0, t]`.
pub fn beta_quadrature<S: BetaSystem>(sys: &S, beta0: [Complex64; 2], t0: f64, t: f64) -> Result<[Complex64; 2]> {
    let hbar = sys.hbar();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let record = |r: Result<()>| {
        if let Err(e) = r {
            failure.borrow_mut().get_or_insert(e);
        }
    };
    let lambda = |tau: f64, j: usize| match sys.lambda(tau) {
        Ok(l) => l[j],
        Err(e) => {
            record(Err(e));
            0.0
        }
    };
    let check = || failure.borrow_mut().take().map_or(Ok(()), Err);

    let knots = panels(t0, t);
    let mut omega_at_knot = vec![[0.0; 2]; knots.len()];
    for p in 1..knots.len() {
        let prev = omega_at_knot[p - 1];
        for (j, o) in omega_at_knot[p].iter_mut().enumerate() {
            *o = prev[j] + integrate_real(|s| lambda(s, j), knots[p - 1], knots[p], QUAD_TOL)?;
        }
        check()?;
    }
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for j in 0..2 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 1..knots.len() {
            let (a, b) = (knots[p - 1], knots[p]);
            let base = omega_at_knot[p - 1][j];
            // The real and imaginary passes visit the same nodes.
            let cache: RefCell<HashMap<u64, Complex64>> = RefCell::new(HashMap::new());
            let integrand = |s: f64| -> Complex64 {
                if let Some(v) = cache.borrow().get(&s.to_bits()) {
                    return *v;
                }
                let v = match sys.coefficients(s) {
                    Ok(c) => {
                        let omega = base + quadrature::integrate(|u| lambda(u, j), a, s, QUAD_TOL).integral;
                        c.f[j] * Complex64::from_polar(1.0, omega / hbar)
                    }
                    Err(e) => {
                        record(Err(e));
                        Complex64::new(0.0, 0.0)
                    }
                };
                cache.borrow_mut().insert(s.to_bits(), v);
                v
            };
            let re = integrate_real(|s| integrand(s).re, a, b, QUAD_TOL)?;
            let im = integrate_real(|s| integrand(s).im, a, b, QUAD_TOL)?;
            check()?;
            acc += Complex64::new(re, im);
        }
        let total = omega_at_knot.last().map_or(0.0, |o| o[j]);
        let phase = Complex64::from_polar(1.0, -total / hbar);
        out[j] = phase * (beta0[j] - Complex64::new(0.0, 2.0 / hbar) * acc);
    }
    Ok(out)
}
