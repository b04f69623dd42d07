//! Pseudofermion pair of the damped two-level atom, its biorthogonal eigenbases and
//! metric operators, and the similarity to an ordinary fermion mode.
//!
//! Scalar products are antilinear in the first slot.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    anticommutator, inner, inverse, outer, psd_sqrt, vec_max_abs_diff, CMatrix,
};

/// Absolute tolerance used for the built-in postcondition checks, scaled by the size of
/// the operators involved.
const CHECK_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure_close(name: &str, got: &CMatrix, want: &CMatrix, tol: f64) -> Result<()> {
    let deviation = got.max_abs_diff(want);
    if deviation <= tol {
        Ok(())
    } else {
        Err(Error::CrossCheckFailure {
            name: name.to_owned(),
            deviation,
        })
    }
}

/// `(theta, delta, |omega|)` with `omega = |omega| e^{i theta}` and
/// `Omega = sqrt(|omega|² - delta²) > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudofermionParams {
    theta: f64,
    delta: f64,
    omega_abs: f64,
}

impl PseudofermionParams {
    pub fn new(theta: f64, delta: f64, omega_abs: f64) -> Result<Self> {
        let finite = theta.is_finite() && delta.is_finite() && omega_abs.is_finite();
        if !finite || omega_abs <= delta.abs() {
            return Err(Error::DegenerateParams { delta, omega_abs });
        }
        Ok(Self {
            theta,
            delta,
            omega_abs,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn omega_abs(&self) -> f64 {
        self.omega_abs
    }

    /// The complex coupling `|omega| e^{i theta}`.
    pub fn omega(&self) -> Complex64 {
        Complex64::from_polar(self.omega_abs, self.theta)
    }

    /// `Omega = sqrt(|omega|² - delta²)`.
    pub fn big_omega(&self) -> f64 {
        ((self.omega_abs - self.delta) * (self.omega_abs + self.delta)).sqrt()
    }

    /// Rough magnitude of the pair's entries, used to scale check tolerances.
    fn scale(&self) -> f64 {
        (self.omega_abs / self.big_omega()).max(1.0)
    }
}

/// Operators with `{a, b} = I`, `a² = b² = 0` and in general `b != a*`.
#[derive(Clone, Copy, Debug)]
pub struct PseudofermionPair {
    pub a: CMatrix,
    pub b: CMatrix,
    pub params: PseudofermionParams,
}

impl PseudofermionPair {
    /// Largest entry error among `{a,b} - I`, `a²`, `b²`.
    pub fn algebra_defect(&self) -> f64 {
        pair_defect(&self.a, &self.b)
    }
}

/// Largest entry error among `{a,b} - I`, `a²`, `b²` for any pair of square matrices.
pub fn pair_defect(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.rows();
    let id = CMatrix::identity(n).expect("valid size");
    let anti = anticommutator(a, b).map_or(f64::INFINITY, |m| m.max_abs_diff(&id));
    let zero = CMatrix::zeros(n, n).expect("valid size");
    anti.max((a * a).max_abs_diff(&zero)).max((b * b).max_abs_diff(&zero))
}

pub fn make_pf_pair(p: PseudofermionParams) -> Result<PseudofermionPair> {
    let om = p.big_omega();
    let w = p.omega_abs;
    let d = p.delta;
    let e_pos = Complex64::from_polar(1.0, p.theta);
    let e_neg = e_pos.conj();
    let a = CMatrix::from_rows(&[
        [c(-w, 0.0), -e_neg * c(om, d)],
        [e_pos * c(om, -d), c(w, 0.0)],
    ])?
    .scale_re(0.5 / om);
    let b = CMatrix::from_rows(&[
        [c(-w, 0.0), e_neg * c(om, -d)],
        [-e_pos * c(om, d), c(w, 0.0)],
    ])?
    .scale_re(0.5 / om);
    let defect = pair_defect(&a, &b);
    if defect > CHECK_TOL * p.scale().powi(2) {
        return Err(Error::CrossCheckFailure {
            name: "pseudofermion relations".into(),
            deviation: defect,
        });
    }
    Ok(PseudofermionPair { a, b, params: p })
}

/// `H_eff = ½ [[-i delta, conj(omega)], [omega, i delta]]`, checked against `Omega (ba - ½ I)`.
pub fn h_eff(p: PseudofermionParams) -> Result<CMatrix> {
    let w = p.omega();
    let h = CMatrix::from_rows(&[[c(0.0, -p.delta), w.conj()], [w, c(0.0, p.delta)]])?.scale_re(0.5);
    let pair = make_pf_pair(p)?;
    let via_pair = h_eff_from_pair(&pair);
    ensure_close("H_eff", &h, &via_pair, CHECK_TOL * p.scale().powi(2) * p.big_omega().max(1.0))?;
    Ok(h)
}

/// `Omega (b a - ½ I)`.
pub fn h_eff_from_pair(pair: &PseudofermionPair) -> CMatrix {
    let half = CMatrix::identity(2).expect("2x2").scale_re(0.5);
    ((pair.b * pair.a) - half).scale_re(pair.params.big_omega())
}

/// `N = b a` and `N* = a* b*`.
pub fn number_ops(pair: &PseudofermionPair) -> (CMatrix, CMatrix) {
    let n = pair.b * pair.a;
    let n_star = pair.a.adjoint() * pair.b.adjoint();
    debug_assert!(n_star.approx_eq(&n.adjoint(), 1e-12 * pair.params.scale().powi(2)));
    (n, n_star)
}

#[derive(Clone, Copy, Debug)]
pub struct MuOperators {
    pub mu1: CMatrix,
    pub mu2: CMatrix,
    pub mu3: CMatrix,
}

impl MuOperators {
    pub fn as_array(&self) -> [CMatrix; 3] {
        [self.mu1, self.mu2, self.mu3]
    }

    pub fn max_abs_diff(&self, other: &MuOperators) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array().iter())
            .map(|(x, y)| x.max_abs_diff(y))
            .fold(0.0, f64::max)
    }
}

/// `mu1 = b + a`, `mu2 = i(b - a)`, `mu3 = ab - ba` from the pair.
pub fn mu_from_pair(pair: &PseudofermionPair) -> MuOperators {
    let (a, b) = (&pair.a, &pair.b);
    MuOperators {
        mu1: b + a,
        mu2: (b - a).scale(Complex64::i()),
        mu3: (a * b) - (b * a),
    }
}

/// Closed-form entries of the three mu matrices.
///
/// `mu2` carries `-i e^{i theta}` in its lower-left entry, which is what `i(b - a)`
/// evaluates to; [`mu2_printed`] keeps the commonly quoted `+i e^{i theta}` variant.
pub fn mu_closed_form(p: PseudofermionParams) -> MuOperators {
    let om = p.big_omega();
    let w = p.omega_abs;
    let d = p.delta;
    let e_pos = Complex64::from_polar(1.0, p.theta);
    let e_neg = e_pos.conj();
    let i = Complex64::i();
    let mu1 = CMatrix::from_rows(&[[c(-w, 0.0), -i * d * e_neg], [-i * d * e_pos, c(w, 0.0)]])
        .expect("2x2")
        .scale_re(1.0 / om);
    let mu2 = CMatrix::from_rows(&[[c(0.0, 0.0), i * e_neg], [-i * e_pos, c(0.0, 0.0)]]).expect("2x2");
    let mu3 = CMatrix::from_rows(&[[i * d, -w * e_neg], [-w * e_pos, -i * d]])
        .expect("2x2")
        .scale_re(1.0 / om);
    MuOperators { mu1, mu2, mu3 }
}

/// `i [[0, e^{-i theta}], [e^{i theta}, 0]]`. It squares to `-I`, whereas `i(b - a)`
/// squares to `+I` for every pseudofermion pair, so the two never agree.
pub fn mu2_printed(p: PseudofermionParams) -> CMatrix {
    let i = Complex64::i();
    let e_pos = Complex64::from_polar(1.0, p.theta);
    CMatrix::from_rows(&[[c(0.0, 0.0), i * e_pos.conj()], [i * e_pos, c(0.0, 0.0)]]).expect("2x2")
}

/// Mu operators from the pair, cross-checked entrywise against the closed forms.
pub fn mu_ops(p: PseudofermionParams) -> Result<MuOperators> {
    let from_pair = mu_from_pair(&make_pf_pair(p)?);
    let closed = mu_closed_form(p);
    let deviation = from_pair.max_abs_diff(&closed);
    if deviation > CHECK_TOL * p.scale().powi(2) {
        return Err(Error::CrossCheckFailure {
            name: "mu closed forms".into(),
            deviation,
        });
    }
    Ok(from_pair)
}

pub type Vec2 = [Complex64; 2];

/// Biorthonormal eigenbases of `N` and `N*` with the metric operators that map one onto
/// the other.
#[derive(Clone, Copy, Debug)]
pub struct BiorthogonalSystem {
    pub phi0: Vec2,
    pub phi1: Vec2,
    pub psi0: Vec2,
    pub psi1: Vec2,
    pub k: Complex64,
    pub kprime: Complex64,
    pub s_phi: CMatrix,
    pub s_psi: CMatrix,
}

impl BiorthogonalSystem {
    pub fn phi(&self, n: usize) -> &Vec2 {
        [&self.phi0, &self.phi1][n]
    }

    pub fn psi(&self, n: usize) -> &Vec2 {
        [&self.psi0, &self.psi1][n]
    }

    /// `max |<phi_j, psi_l> - delta_jl|`.
    pub fn biorthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..2 {
            for l in 0..2 {
                let want = if j == l { 1.0 } else { 0.0 };
                worst = worst.max((inner(self.phi(j), self.psi(l)) - want).norm());
            }
        }
        worst
    }
}

fn apply2(m: &CMatrix, v: &Vec2) -> Vec2 {
    let out = m.mul_vec(v).expect("2x2 acting on C^2");
    [out[0], out[1]]
}

fn scale2(s: Complex64, v: Vec2) -> Vec2 {
    [s * v[0], s * v[1]]
}

/// Builds the system for the gauge `k > 0`, `|k| = |k'|`.
///
/// `<phi0, psi0> = conj(k) k' (1 + (Omega + i delta)² / |omega|²)` only fixes the product
/// `conj(k) k'`; that factor is complex once `delta != 0`, so `k` and `k'` cannot both be
/// real. Splitting its modulus evenly keeps `k = k' = 1/sqrt(2)` at `delta = 0`.
pub fn biorthogonal_system(p: PseudofermionParams) -> Result<BiorthogonalSystem> {
    let pair = make_pf_pair(p)?;
    let om = p.big_omega();
    let w = p.omega_abs;
    let d = p.delta;
    let e_pos = Complex64::from_polar(1.0, p.theta);

    let norm_factor = 1.0 + c(om, d) * c(om, d) / (w * w);
    if !(norm_factor.norm() > f64::EPSILON) || !norm_factor.norm().is_finite() {
        return Err(Error::NormalizationFailure);
    }
    let k = c(1.0 / norm_factor.norm().sqrt(), 0.0);
    let kprime = 1.0 / (k * norm_factor);

    let phi0 = scale2(k, [c(1.0, 0.0), -e_pos * c(om, -d) / w]);
    let psi0 = scale2(kprime, [c(1.0, 0.0), -e_pos * c(om, d) / w]);
    if (inner(&phi0, &psi0) - 1.0).norm() > 1e-10 {
        return Err(Error::NormalizationFailure);
    }

    let phi1 = apply2(&pair.b, &phi0);
    let psi1 = apply2(&pair.a.adjoint(), &psi0);
    let phi1_closed = scale2(k, [c(-om, d) / w, -e_pos]);
    let psi1_closed = scale2(kprime, [c(-om, -d) / w, -e_pos]);
    let dev = vec_max_abs_diff(&phi1, &phi1_closed).max(vec_max_abs_diff(&psi1, &psi1_closed));
    if dev > 1e-10 * p.scale() {
        return Err(Error::CrossCheckFailure {
            name: "phi1/psi1 closed forms".into(),
            deviation: dev,
        });
    }

    let s_phi = outer(&phi0, &phi0)? + outer(&phi1, &phi1)?;
    let s_psi = outer(&psi0, &psi0)? + outer(&psi1, &psi1)?;
    let (s_phi_closed, s_psi_closed) = metric_closed_form(p, k);
    let tol = 1e-10 * p.scale().powi(2);
    ensure_close("S_phi closed form", &s_phi, &s_phi_closed, tol)?;
    ensure_close("S_psi closed form", &s_psi, &s_psi_closed, tol)?;

    Ok(BiorthogonalSystem {
        phi0,
        phi1,
        psi0,
        psi1,
        k,
        kprime,
        s_phi,
        s_psi,
    })
}

/// Closed forms of the two metric operators in terms of `|k|`.
pub fn metric_closed_form(p: PseudofermionParams, k: Complex64) -> (CMatrix, CMatrix) {
    let om = p.big_omega();
    let w = p.omega_abs;
    let d = p.delta;
    let e_pos = Complex64::from_polar(1.0, p.theta);
    let e_neg = e_pos.conj();
    let k2 = k.norm_sqr();
    let one = c(1.0, 0.0);
    let s_phi = CMatrix::from_rows(&[[one, c(0.0, -d / w) * e_neg], [c(0.0, d / w) * e_pos, one]])
        .expect("2x2")
        .scale_re(2.0 * k2);
    let s_psi = CMatrix::from_rows(&[[one, c(0.0, d / w) * e_neg], [c(0.0, -d / w) * e_pos, one]])
        .expect("2x2")
        .scale_re(w * w / (2.0 * k2 * om * om));
    (s_phi, s_psi)
}

/// A canonical fermion mode `c` and the positive similarity `T` with `a = T c T⁻¹`.
#[derive(Clone, Copy, Debug)]
pub struct Fermionization {
    pub c: CMatrix,
    pub t: CMatrix,
    pub t_inv: CMatrix,
}

/// `T = S_phi^{1/2}` and `c = T⁻¹ a T`; CAR and the similarity back to `(a, b)` are
/// checked before returning.
pub fn fermionize(pair: &PseudofermionPair, sys: &BiorthogonalSystem) -> Result<Fermionization> {
    let t = psd_sqrt(&sys.s_phi)?;
    let t_inv = inverse(&t)?;
    let c_op = (t_inv * pair.a) * t;
    let cd = c_op.adjoint();
    let tol = 1e-10 * pair.params.scale().powi(2);

    let car = pair_defect(&c_op, &cd);
    if car > tol {
        return Err(Error::CrossCheckFailure {
            name: "CAR for c".into(),
            deviation: car,
        });
    }
    ensure_close("a = T c T^-1", &((t * c_op) * t_inv), &pair.a, tol)?;
    ensure_close("b = T c* T^-1", &((t * cd) * t_inv), &pair.b, tol)?;
    Ok(Fermionization { c: c_op, t, t_inv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues_2x2;
    use crate::pauli::{to_matrix, PauliElement};
    use std::f64::consts::FRAC_PI_2;

    fn pm(s: &str) -> CMatrix {
        to_matrix(&s.parse::<PauliElement>().unwrap())
    }

    fn special() -> PseudofermionParams {
        PseudofermionParams::new(FRAC_PI_2, 0.0, 1.0).unwrap()
    }

    #[test]
    fn rejects_exceptional_point() {
        assert!(matches!(
            PseudofermionParams::new(0.0, 1.0, 1.0),
            Err(Error::DegenerateParams { .. })
        ));
        assert!(PseudofermionParams::new(0.0, -2.0, 1.0).is_err());
        assert!(PseudofermionParams::new(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn pair_at_the_special_point() {
        let pair = make_pf_pair(special()).unwrap();
        let a = CMatrix::from_rows(&[[c(-1.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(1.0, 0.0)]])
            .unwrap()
            .scale_re(0.5);
        let b = CMatrix::from_rows(&[[c(-1.0, 0.0), c(0.0, -1.0)], [c(0.0, -1.0), c(1.0, 0.0)]])
            .unwrap()
            .scale_re(0.5);
        assert!(pair.a.approx_eq(&a, 1e-15));
        assert!(pair.b.approx_eq(&b, 1e-15));
    }

    #[test]
    fn h_eff_examples() {
        let p = PseudofermionParams::new(0.0, 0.0, 2.0).unwrap();
        assert!(h_eff(p).unwrap().approx_eq(&pm("X"), 1e-15));
        let p = PseudofermionParams::new(1.1, 0.4, 1.3).unwrap();
        let ev = eigenvalues_2x2(&h_eff(p).unwrap()).unwrap();
        let half = p.big_omega() / 2.0;
        assert!((ev[0] - c(-half, 0.0)).norm() < 1e-12);
        assert!((ev[1] - c(half, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn number_operator() {
        let pair = make_pf_pair(special()).unwrap();
        let (n, n_star) = number_ops(&pair);
        let want = CMatrix::from_rows(&[[c(1.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(1.0, 0.0)]])
            .unwrap()
            .scale_re(0.5);
        assert!(n.approx_eq(&want, 1e-15));
        assert!(n_star.approx_eq(&n.adjoint(), 1e-15));

        let p = PseudofermionParams::new(2.0, -0.3, 0.9).unwrap();
        let pair = make_pf_pair(p).unwrap();
        let (n, _) = number_ops(&pair);
        assert!((n * n).approx_eq(&n, 1e-12));
        let sys = biorthogonal_system(p).unwrap();
        let n_phi0 = n.mul_vec(&sys.phi0).unwrap();
        let n_phi1 = n.mul_vec(&sys.phi1).unwrap();
        assert!(n_phi0.iter().all(|z| z.norm() < 1e-12));
        assert!(vec_max_abs_diff(&n_phi1, &sys.phi1) < 1e-12);
    }

    #[test]
    fn mu_special_points() {
        let mu = mu_ops(special()).unwrap();
        assert!(mu.mu1.approx_eq(&pm("-Z"), 1e-14));
        assert!(mu.mu2.approx_eq(&pm("X"), 1e-14));
        assert!(mu.mu3.approx_eq(&pm("-Y"), 1e-14));
        // mu1 mu2 = i(ab - ba) = i mu3 holds identically.
        assert!((mu.mu1 * mu.mu2).approx_eq(&mu.mu3.scale(Complex64::i()), 1e-14));
        assert!(mu2_printed(special()).approx_eq(&pm("iY"), 1e-15));

        let mu = mu_ops(PseudofermionParams::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        assert!(mu.mu1.approx_eq(&pm("-Z"), 1e-14));
        assert!(mu.mu2.approx_eq(&pm("-Y"), 1e-14));
        assert!(mu.mu3.approx_eq(&pm("-X"), 1e-14));
        assert!(mu2_printed(PseudofermionParams::new(0.0, 0.0, 1.0).unwrap()).approx_eq(&pm("iX"), 1e-15));
    }

    #[test]
    fn mu_operators_square_to_identity() {
        let id = CMatrix::identity(2).unwrap();
        for (theta, delta, w) in [(0.3, 0.2, 1.0), (2.9, -0.7, 0.8), (5.0, 0.0, 2.0)] {
            let p = PseudofermionParams::new(theta, delta, w).unwrap();
            for m in mu_ops(p).unwrap().as_array() {
                assert!((m * m).approx_eq(&id, 1e-12));
            }
            let printed = mu2_printed(p);
            assert!((printed * printed).approx_eq(&id.scale_re(-1.0), 1e-15));
        }
    }

    #[test]
    fn biorthogonal_special_point() {
        let sys = biorthogonal_system(special()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(vec_max_abs_diff(&sys.phi0, &[c(r, 0.0), c(0.0, -r)]) < 1e-15);
        assert!(vec_max_abs_diff(&sys.phi1, &[c(-r, 0.0), c(0.0, -r)]) < 1e-15);
        let id = CMatrix::identity(2).unwrap();
        assert!(sys.s_phi.approx_eq(&id, 1e-15));
        assert!(sys.s_psi.approx_eq(&id, 1e-15));
        assert!((sys.k - sys.kprime).norm() < 1e-15);
    }

    #[test]
    fn biorthogonal_generic_point() {
        let p = PseudofermionParams::new(0.7, 0.55, 1.2).unwrap();
        let pair = make_pf_pair(p).unwrap();
        let sys = biorthogonal_system(p).unwrap();
        assert!(sys.biorthogonality_defect() < 1e-12);
        assert!(pair.a.mul_vec(&sys.phi0).unwrap().iter().all(|z| z.norm() < 1e-12));
        assert!(pair.b.adjoint().mul_vec(&sys.psi0).unwrap().iter().all(|z| z.norm() < 1e-12));
        let (n, n_star) = number_ops(&pair);
        assert!((sys.s_psi * n).approx_eq(&(n_star * sys.s_psi), 1e-12));
        assert!((sys.s_phi * sys.s_psi).approx_eq(&CMatrix::identity(2).unwrap(), 1e-12));
        assert!((sys.k.norm() - sys.kprime.norm()).abs() < 1e-12);
    }

    #[test]
    fn fermionization() {
        let pair = make_pf_pair(special()).unwrap();
        let sys = biorthogonal_system(special()).unwrap();
        let f = fermionize(&pair, &sys).unwrap();
        assert!(f.t.approx_eq(&CMatrix::identity(2).unwrap(), 1e-14));
        assert!(f.c.approx_eq(&pair.a, 1e-14));

        let p = PseudofermionParams::new(4.0, -0.8, 1.0).unwrap();
        let pair = make_pf_pair(p).unwrap();
        let sys = biorthogonal_system(p).unwrap();
        let f = fermionize(&pair, &sys).unwrap();
        let n0 = f.c.adjoint() * f.c;
        let ev = eigenvalues_2x2(&n0).unwrap();
        assert!((ev[0]).norm() < 1e-12 && (ev[1] - 1.0).norm() < 1e-12);
        let half = CMatrix::identity(2).unwrap().scale_re(0.5);
        let h0 = (n0 - half).scale_re(p.big_omega());
        let back = (f.t * h0) * f.t_inv;
        assert!(back.approx_eq(&h_eff(p).unwrap(), 1e-9));
    }
}
