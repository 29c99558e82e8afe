//! Sign changes of Ps along a grid, refined by bisection.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    SeparableToEntangled,
    EntangledToSeparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    pub t: f64,
    pub direction: Direction,
}

/// A maximal stretch of grid points sharing one sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignRun {
    pub separable: bool,
    pub t_start: f64,
    pub t_end: f64,
    pub len: usize,
}

fn separable(ps: f64) -> bool {
    ps >= 0.0
}

pub fn sign_runs(t: &[f64], ps: &[f64]) -> Vec<SignRun> {
    let mut runs: Vec<SignRun> = Vec::new();
    for (&ti, &p) in t.iter().zip(ps) {
        match runs.last_mut() {
            Some(r) if r.separable == separable(p) => {
                r.t_end = ti;
                r.len += 1;
            }
            _ => runs.push(SignRun { separable: separable(p), t_start: ti, t_end: ti, len: 1 }),
        }
    }
    runs
}

/// Brackets every sign change in `ps` and bisects `f` inside it until the
/// bracket is narrower than `refine_tol`.
pub fn find_transitions<F>(t: &[f64], ps: &[f64], f: F, refine_tol: f64) -> Result<Vec<Transition>>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(refine_tol > 0.0) {
        return Err(Error::Validation(format!("refine_tol must be positive, got {refine_tol}")));
    }
    if t.len() != ps.len() {
        return Err(Error::Validation("grid and Ps series differ in length".into()));
    }
    if let Some(p) = ps.iter().find(|p| !p.is_finite()) {
        return Err(Error::Validation(format!("non-finite Ps {p} in series")));
    }
    let mut out = Vec::new();
    for i in 1..t.len() {
        let (sa, sb) = (separable(ps[i - 1]), separable(ps[i]));
        if sa == sb {
            continue;
        }
        let (mut a, mut b) = (t[i - 1], t[i]);
        while b - a > refine_tol {
            let m = 0.5 * (a + b);
            if separable(f(m)?) == sa {
                a = m;
            } else {
                b = m;
            }
        }
        let direction = if sa { Direction::SeparableToEntangled } else { Direction::EntangledToSeparable };
        out.push(Transition { t: 0.5 * (a + b), direction });
    }
    Ok(out)
}
