//! The two coupled LC-circuit models and their linear time evolution.
//!
//! `Psi = (Q1, Q2, dQ1/dt, dQ2/dt)` obeys `dPsi/dt = L Psi`; the formal Hamiltonian of
//! system S is `H_S = i L_S`.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{mat_exp, CMatrix};

pub type State = [Complex64; 4];

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Parameters `(alpha, mu, gamma)` of system S.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitParamsS {
    pub alpha: f64,
    pub mu: f64,
    pub gamma: f64,
}

impl CircuitParamsS {
    pub fn new(alpha: f64, mu: f64, gamma: f64) -> Result<Self> {
        check_finite(&[alpha, mu, gamma])?;
        Ok(Self { alpha, mu, gamma })
    }
}

/// Parameters `(b, d, r)` of system T.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitParamsT {
    pub b: f64,
    pub d: f64,
    pub r: f64,
}

impl CircuitParamsT {
    pub fn new(b: f64, d: f64, r: f64) -> Result<Self> {
        check_finite(&[b, d, r])?;
        Ok(Self { b, d, r })
    }
}

/// Generator `L_S` of system S.
pub fn build_ls(p: CircuitParamsS) -> CMatrix {
    let CircuitParamsS { alpha, mu, gamma } = p;
    CMatrix::from_real_rows(&[
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-alpha, mu * alpha, gamma, 0.0],
        [mu * alpha, -alpha, 0.0, -gamma],
    ])
    .expect("finite 4x4")
}

/// `H_S = i L_S`.
pub fn h_s(p: CircuitParamsS) -> CMatrix {
    build_ls(p).scale(Complex64::i())
}

/// The symmetric, non-Hermitian `H_T`, entry for entry.
pub fn build_ht(p: CircuitParamsT) -> CMatrix {
    let z = Complex64::new(0.0, 0.0);
    let br = Complex64::new(p.b, p.r);
    let dr = Complex64::new(p.d, p.r);
    let dm = Complex64::new(p.d, -p.r);
    let h = CMatrix::from_rows(&[[z, br, dr, z], [br, z, z, dm], [dr, z, z, dm], [z, dm, dm, z]])
        .expect("finite 4x4");
    debug_assert_eq!(h, h.transpose());
    h
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
}

pub const CSV_HEADER: &str = "t,re_Q1,im_Q1,re_Q2,im_Q2,re_dQ1,im_dQ1,re_dQ2,im_dQ2";

impl Trajectory {
    pub fn last(&self) -> Option<(f64, &State)> {
        Some((*self.times.last()?, self.states.last()?))
    }

    /// CSV with [`CSV_HEADER`] and 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(w, "{t:.16e}")?;
            for z in s {
                write!(w, ",{:.16e},{:.16e}", z.re, z.im)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `n` evenly spaced times from 0 to `t_end` inclusive.
pub fn uniform_grid(t_end: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidTimes);
    }
    let h = t_end / (n - 1) as f64;
    Ok((0..n).map(|j| if j + 1 == n { t_end } else { j as f64 * h }).collect())
}

/// `Psi(t_j) = exp(L t_j) psi0` for every grid time.
pub fn evolve(l: &CMatrix, psi0: &State, times: &[f64]) -> Result<Trajectory> {
    if l.rows() != 4 || l.cols() != 4 {
        return Err(Error::DimensionMismatch("evolve expects a 4x4 generator".into()));
    }
    let increasing = times.windows(2).all(|w| w[1] > w[0]);
    if times.is_empty() || !increasing || !(times[0] >= 0.0) || !times.iter().all(|t| t.is_finite()) {
        return Err(Error::InvalidTimes);
    }
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        if t == 0.0 {
            states.push(*psi0);
            continue;
        }
        let prop = mat_exp(l, t).map_err(|e| match e {
            Error::Overflow => Error::EvolutionOverflow { t },
            other => other,
        })?;
        let v = prop.mul_vec(psi0)?;
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::EvolutionOverflow { t });
        }
        states.push([v[0], v[1], v[2], v[3]]);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
    })
}

/// Largest `|(Psi(t+h) - Psi(t-h)) / 2h - L Psi(t)|` over interior points of a uniform grid.
pub fn derivative_check(traj: &Trajectory, l: &CMatrix) -> Result<f64> {
    let n = traj.times.len();
    if n < 3 || traj.states.len() != n {
        return Err(Error::GridTooCoarse);
    }
    let h = (traj.times[n - 1] - traj.times[0]) / (n - 1) as f64;
    let uniform = traj
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
    if !uniform {
        return Err(Error::InvalidTimes);
    }
    let mut worst: f64 = 0.0;
    for j in 1..n - 1 {
        let rhs = l.mul_vec(&traj.states[j])?;
        for k in 0..4 {
            let fd = (traj.states[j + 1][k] - traj.states[j - 1][k]) / (2.0 * h);
            worst = worst.max((fd - rhs[k]).norm());
        }
    }
    Ok(worst)
}
