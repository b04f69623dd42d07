//! The twelve 4×4 matrices `X_1 … X_12`, their exact commutant, and the two-qubit lift
//! of the pseudofermion pair.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::circuits::{build_ht, build_ls, CircuitParamsS, CircuitParamsT};
use crate::error::{Error, Result};
use crate::linalg::{
    commutator, exact_rank, kron, null_space, span_decompose, CMatrix, ExactComplex,
    SpanDecomposition,
};
use crate::pauli::{
    from_matrix, generate_group, group_commutator, is_central_product, p2,
    standard_two_qubit_generators, PauliElement,
};
use crate::pseudofermion::{make_pf_pair, mu_ops, pair_defect, PseudofermionParams};
use crate::report::Report;

/// Entry codes: 0, ±1, and ±2 for ±i.
const X_CODES: [[i8; 16]; 12] = [
    [0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, -2, 0, 0, 0, 0, -2, 2, 0, 0, 0, 0, 2, 0, 0],
    [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1],
    [1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1],
    [0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0],
    [0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0],
    [0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0],
    [0, 0, -2, 0, 0, 0, 0, 2, 2, 0, 0, 0, 0, -2, 0, 0],
    [0, 0, 0, -2, 0, 0, -2, 0, 0, 2, 0, 0, 2, 0, 0, 0],
    [1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, -1, 0],
    [0, 0, 1, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0, -1, 0, 0],
];

fn decode(code: i8) -> (i64, i64) {
    match code {
        2 => (0, 1),
        -2 => (0, -1),
        x => (x as i64, 0),
    }
}

/// A 4×4 matrix over the Gaussian rationals, row-major.
pub type ExactMatrix4 = Vec<ExactComplex>;

#[derive(Clone, Debug)]
pub struct XBasis {
    pub mats: [CMatrix; 12],
    pub exact: [ExactMatrix4; 12],
    pub pauli_ids: [PauliElement; 12],
}

impl XBasis {
    /// `X_j` with the usual 1-based index.
    pub fn x(&self, j: usize) -> &CMatrix {
        &self.mats[j - 1]
    }
}

/// Builds the twelve matrices and checks that each is a Pauli element and that they are
/// linearly independent.
pub fn x_matrices() -> XBasis {
    let exact: [ExactMatrix4; 12] = X_CODES.map(|codes| {
        codes
            .iter()
            .map(|&c| {
                let (re, im) = decode(c);
                ExactComplex::from_ints(re, im)
            })
            .collect()
    });
    let mats = X_CODES.map(|codes| {
        let entries: Vec<Complex64> = codes
            .iter()
            .map(|&c| {
                let (re, im) = decode(c);
                Complex64::new(re as f64, im as f64)
            })
            .collect();
        CMatrix::from_row_major(4, 4, &entries).expect("4x4 literal")
    });
    let pauli_ids = mats.map(|m| from_matrix(&m).expect("every X_j is a Pauli element"));
    assert_eq!(exact_rank(&exact, 16), 12, "X_j must be linearly independent");
    XBasis {
        mats,
        exact,
        pauli_ids,
    }
}

/// Exact commutant: dimension and a basis of 4×4 matrices.
#[derive(Clone, Debug)]
pub struct Commutant {
    pub dim: usize,
    pub basis: Vec<ExactMatrix4>,
    /// Rows in the stacked system (16 per input matrix).
    pub equations: usize,
}

/// Rows of the linear map `M -> M X - X M` on row-major `vec(M)`.
pub fn commutator_map_rows(x: &[ExactComplex]) -> Vec<Vec<ExactComplex>> {
    let mut rows = Vec::with_capacity(16);
    for r in 0..4 {
        for s in 0..4 {
            let mut row = vec![ExactComplex::zero(); 16];
            for q in 0..4 {
                // M[r][q] X[q][s]
                row[4 * r + q] = &row[4 * r + q] + &x[4 * q + s];
            }
            for p in 0..4 {
                // - X[r][p] M[p][s]
                row[4 * p + s] = &row[4 * p + s] - &x[4 * r + p];
            }
            rows.push(row);
        }
    }
    rows
}

fn to_exact(m: &CMatrix) -> Result<ExactMatrix4> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::DimensionMismatch("commutant inputs must be 4x4".into()));
    }
    m.entries()
        .iter()
        .map(|z| ExactComplex::from_gaussian_f64(*z).ok_or_else(|| Error::NonGaussianEntries(format!("{z}"))))
        .collect()
}

/// Dimension of `{M : [M, X] = 0 for all X in mats}`, by exact elimination.
pub fn commutant_dimension(mats: &[CMatrix]) -> Result<Commutant> {
    let mut system = Vec::with_capacity(16 * mats.len());
    for m in mats {
        system.extend(commutator_map_rows(&to_exact(m)?));
    }
    let basis: Vec<ExactMatrix4> = null_space(&system, 16);
    Ok(Commutant {
        dim: basis.len(),
        basis,
        equations: system.len(),
    })
}

/// `L_S = sum alpha_k X_k` by least squares.
pub fn decompose_ls(p: CircuitParamsS) -> Result<SpanDecomposition> {
    span_decompose(&x_matrices().mats, &build_ls(p))
}

/// `H_T = sum beta_k X_k` by least squares.
pub fn decompose_ht(p: CircuitParamsT) -> Result<SpanDecomposition> {
    span_decompose(&x_matrices().mats, &build_ht(p))
}

fn slots(pairs: &[(usize, Complex64)]) -> [Complex64; 12] {
    let mut out = [Complex64::new(0.0, 0.0); 12];
    for &(k, v) in pairs {
        out[k - 1] = v;
    }
    out
}

/// Coefficient list for `L_S` as usually quoted, with `alpha_9 = -alpha mu / (2i)`.
pub fn ls_printed_coefficients(p: CircuitParamsS) -> [Complex64; 12] {
    let i = Complex64::i();
    let am = p.alpha * p.mu;
    slots(&[
        (1, Complex64::new((1.0 - p.alpha) / 2.0, 0.0)),
        (2, i * (1.0 + p.alpha) / 2.0),
        (4, Complex64::new(p.gamma / 2.0, 0.0)),
        (7, Complex64::new(am / 2.0, 0.0)),
        (9, -am / (2.0 * i)),
        (10, Complex64::new(-p.gamma / 2.0, 0.0)),
    ])
}

/// Hilbert–Schmidt projections `tr(X_k* L_S) / 4`, worked by hand:
/// identical to the quoted list except `alpha_9 = alpha mu / (2i)`.
pub fn ls_derived_coefficients(p: CircuitParamsS) -> [Complex64; 12] {
    let mut c = ls_printed_coefficients(p);
    c[8] = -c[8];
    c
}

/// Coefficient list for `H_T` as usually quoted: slots 1, 5, 6, 11.
pub fn ht_printed_coefficients(p: CircuitParamsT) -> [Complex64; 12] {
    let i = Complex64::i();
    slots(&[
        (1, Complex64::new(p.d, 0.0)),
        (5, Complex64::new((p.b + p.d) / 2.0, 0.0)),
        (6, i * p.r),
        (11, Complex64::new((p.b - p.d) / 2.0, p.r)),
    ])
}

/// Projections of the displayed `H_T`: slots 1, 5, 11, 12. `X_6` is antisymmetric and
/// `H_T` symmetric, so slot 6 vanishes and the `ir` lands on `X_12`.
pub fn ht_derived_coefficients(p: CircuitParamsT) -> [Complex64; 12] {
    slots(&[
        (1, Complex64::new(p.d, 0.0)),
        (5, Complex64::new((p.b + p.d) / 2.0, 0.0)),
        (11, Complex64::new((p.b - p.d) / 2.0, p.r)),
        (12, Complex64::new(0.0, p.r)),
    ])
}

/// `A = a⊗I`, `B = b⊗I`, `Ã = I⊗a`, `B̃ = I⊗b`.
#[derive(Clone, Copy, Debug)]
pub struct LiftedPair {
    pub a: CMatrix,
    pub b: CMatrix,
    pub a_tilde: CMatrix,
    pub b_tilde: CMatrix,
    pub params: PseudofermionParams,
}

impl LiftedPair {
    /// Largest `|[P, Q]|` over `P in {A, B}`, `Q in {Ã, B̃}`.
    pub fn cross_commutator_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in [&self.a, &self.b] {
            for q in [&self.a_tilde, &self.b_tilde] {
                worst = worst.max(commutator(p, q).expect("4x4").max_abs());
            }
        }
        worst
    }
}

pub fn lifted_pf(p: PseudofermionParams) -> Result<LiftedPair> {
    let pair = make_pf_pair(p)?;
    let id = CMatrix::identity(2)?;
    let lifted = LiftedPair {
        a: kron(&pair.a, &id)?,
        b: kron(&pair.b, &id)?,
        a_tilde: kron(&id, &pair.a)?,
        b_tilde: kron(&id, &pair.b)?,
        params: p,
    };
    let tol = 1e-12 * (p.omega_abs() / p.big_omega()).max(1.0).powi(2);
    let defect = pair_defect(&lifted.a, &lifted.b)
        .max(pair_defect(&lifted.a_tilde, &lifted.b_tilde))
        .max(lifted.cross_commutator_defect());
    if defect > tol {
        return Err(Error::CrossCheckFailure {
            name: "lifted pseudofermion relations".into(),
            deviation: defect,
        });
    }
    Ok(lifted)
}

/// `Γ_μ = {mu_k ⊗ I}` and `Γ_ν = {I ⊗ mu_k}`.
#[derive(Clone, Copy, Debug)]
pub struct GammaSets {
    pub mu: [CMatrix; 3],
    pub nu: [CMatrix; 3],
}

/// Builds both sets twice, by lifting the 2×2 mu operators and from the lifted pair
/// (`B + A`, `i(B - A)`, `AB - BA` and likewise with tildes), and requires agreement.
pub fn gamma_sets(p: PseudofermionParams) -> Result<GammaSets> {
    let mu = mu_ops(p)?;
    let id = CMatrix::identity(2)?;
    let mut by_kron_mu = [CMatrix::identity(4)?; 3];
    let mut by_kron_nu = by_kron_mu;
    for (k, m) in mu.as_array().iter().enumerate() {
        by_kron_mu[k] = kron(m, &id)?;
        by_kron_nu[k] = kron(&id, m)?;
    }
    let l = lifted_pf(p)?;
    let i = Complex64::i();
    let from_lift = |a: &CMatrix, b: &CMatrix| [b + a, (b - a).scale(i), (a * b) - (b * a)];
    let lift_mu = from_lift(&l.a, &l.b);
    let lift_nu = from_lift(&l.a_tilde, &l.b_tilde);
    let tol = 1e-12 * (p.omega_abs() / p.big_omega()).max(1.0).powi(2);
    for (name, x, y) in [("Gamma_mu", &by_kron_mu, &lift_mu), ("Gamma_nu", &by_kron_nu, &lift_nu)] {
        let deviation = x
            .iter()
            .zip(y.iter())
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        if deviation > tol {
            return Err(Error::CrossCheckFailure {
                name: name.into(),
                deviation,
            });
        }
    }
    Ok(GammaSets {
        mu: by_kron_mu,
        nu: by_kron_nu,
    })
}

/// Per-identity deviations of the six operator expressions for `X_1 … X_6`.
#[derive(Clone, Debug)]
pub struct XRealization {
    /// `(name, expression, X_j, max |expression - X_j|)`.
    pub identities: Vec<(&'static str, CMatrix, CMatrix, f64)>,
}

/// Evaluates `X1 = i(AB-BA)`, `X2 = BA-AB`, `X3 = -(B+A)`, `X4 = -(B̃+Ã)`,
/// `X5 = i(ÃB̃-B̃Ã)`, `X6 = i(B̃Ã-ÃB̃)` at `theta = pi/2`, `delta = 0`.
pub fn x_realization(p: PseudofermionParams) -> Result<XRealization> {
    if (p.theta() - FRAC_PI_2).abs() > 1e-12 || p.delta() != 0.0 {
        return Err(Error::WrongParameterPoint {
            theta: p.theta(),
            delta: p.delta(),
        });
    }
    let l = lifted_pf(p)?;
    let x = x_matrices();
    let i = Complex64::i();
    let (a, b, at, bt) = (&l.a, &l.b, &l.a_tilde, &l.b_tilde);
    let exprs: [(&'static str, CMatrix); 6] = [
        ("X1", ((a * b) - (b * a)).scale(i)),
        ("X2", (b * a) - (a * b)),
        ("X3", -(b + a)),
        ("X4", -(bt + at)),
        ("X5", ((at * bt) - (bt * at)).scale(i)),
        ("X6", ((bt * at) - (at * bt)).scale(i)),
    ];
    let identities = exprs
        .into_iter()
        .enumerate()
        .map(|(k, (name, e))| {
            let target = *x.x(k + 1);
            let dev = e.max_abs_diff(&target);
            (name, e, target, dev)
        })
        .collect();
    Ok(XRealization { identities })
}

/// One check per identity at tolerance 1e-12. `X_1` and `X_5` are checked through
/// `i(B - A)` and `i(B̃ - Ã)`; the commutator forms square to `-I` and are reported as INFO.
pub fn verify_x_realization(p: PseudofermionParams) -> Result<Report> {
    let real = x_realization(p)?;
    let l = lifted_pf(p)?;
    let i = Complex64::i();
    let mut report = Report::new();
    for (name, _, target, dev) in &real.identities {
        match *name {
            "X1" => {
                report.tol("x_realization_X1", (l.b - l.a).scale(i).max_abs_diff(target), 1e-12);
                report.info("x_realization_X1_commutator_form", *dev);
            }
            "X5" => {
                let e = (l.b_tilde - l.a_tilde).scale(i);
                report.tol("x_realization_X5", e.max_abs_diff(target), 1e-12);
                report.info("x_realization_X5_commutator_form", *dev);
            }
            _ => {
                report.tol(format!("x_realization_{name}"), *dev, 1e-12);
            }
        }
    }
    Ok(report)
}

/// Symbolic check that `X_1 … X_6` generate the two-qubit Pauli group and that it is the
/// central product of `U = <Γ_μ>` and `V = <Γ_ν>` at `(pi/2, 0, 1)`.
pub fn verify_p2_generation() -> Report {
    let mut report = Report::new();
    let x = x_matrices();
    let full = p2();
    let gen = generate_group(&x.pauli_ids[..6]).expect("uniform two-qubit generators");
    report.flag("p2_order_64", full.order() == 64);
    report.flag("x1_to_x6_generate_order_64", gen.order() == 64);
    report.flag("x1_to_x6_group_equals_p2", gen.elements() == full.elements());
    let std_gen = generate_group(&standard_two_qubit_generators()).expect("literal");
    report.flag("standard_lifts_generate_p2", std_gen.elements() == full.elements());

    let p = PseudofermionParams::new(FRAC_PI_2, 0.0, 1.0).expect("valid point");
    let ids = gamma_sets(p).and_then(|g| {
        let conv = |ms: &[CMatrix; 3]| -> Result<Vec<PauliElement>> { ms.iter().map(from_matrix).collect() };
        Ok((conv(&g.mu)?, conv(&g.nu)?))
    });
    let Ok((mu_ids, nu_ids)) = ids else {
        report.flag("gamma_sets_are_pauli", false);
        return report;
    };
    report.flag("gamma_sets_are_pauli", true);
    let u = generate_group(&mu_ids).expect("two-qubit");
    let v = generate_group(&nu_ids).expect("two-qubit");
    report.flag("U_order_16", u.order() == 16);
    report.flag("V_order_16", v.order() == 16);
    let trivial = mu_ids.iter().all(|g| {
        nu_ids
            .iter()
            .all(|h| group_commutator(g, h).map(|c| c.is_identity()).unwrap_or(false))
    });
    report.flag("UV_generator_commutators_trivial", trivial);
    let cp = is_central_product(&full, &u, &v);
    report.flag("p2_central_product_UV", matches!(cp, Ok(ref o) if o.holds && o.product_size == 64));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::anticommutator;

    fn pid(s: &str) -> PauliElement {
        s.parse().unwrap()
    }

    #[test]
    fn identities_of_the_twelve() {
        let x = x_matrices();
        let want = [
            "XI", "YI", "ZI", "IZ", "IX", "iIY", "XX", "YZ", "YX", "ZZ", "ZX", "XZ",
        ];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(x.pauli_ids[k], pid(w), "X{}", k + 1);
        }
        let diag = |v: [f64; 4]| CMatrix::diag(&v.map(|r| Complex64::new(r, 0.0))).unwrap();
        assert_eq!(*x.x(3), diag([1.0, 1.0, -1.0, -1.0]));
        assert_eq!(*x.x(10), diag([1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn mixed_relations() {
        let x = x_matrices();
        let zero = CMatrix::zeros(4, 4).unwrap();
        assert_eq!(anticommutator(x.x(1), x.x(2)).unwrap(), zero);
        assert_eq!(anticommutator(x.x(1), x.x(3)).unwrap(), zero);
        assert_eq!(commutator(x.x(2), x.x(4)).unwrap(), zero);
        assert_eq!(commutator(x.x(2), x.x(5)).unwrap(), zero);
    }

    #[test]
    fn commutant_cases() {
        let x = x_matrices();
        let all = commutant_dimension(&x.mats).unwrap();
        assert_eq!(all.dim, 1);
        assert_eq!(all.equations, 192);
        let id: ExactMatrix4 = (0..16)
            .map(|k| if k % 5 == 0 { ExactComplex::one() } else { ExactComplex::zero() })
            .collect();
        assert_eq!(all.basis[0], id);

        assert_eq!(commutant_dimension(&[]).unwrap().dim, 16);
        assert_eq!(commutant_dimension(&[*x.x(3)]).unwrap().dim, 8);

        let half = CMatrix::identity(4).unwrap().scale_re(0.5);
        assert!(matches!(
            commutant_dimension(&[half]),
            Err(Error::NonGaussianEntries(_))
        ));
    }

    #[test]
    fn commutator_map_matches_float_commutator() {
        let x = x_matrices();
        let m: Vec<Complex64> = (0..16).map(|k| Complex64::new(k as f64, (k * k % 7) as f64)).collect();
        let mm = CMatrix::from_row_major(4, 4, &m).unwrap();
        for j in 1..=12 {
            let rows = commutator_map_rows(&x.exact[j - 1]);
            let lhs: Vec<Complex64> = rows
                .iter()
                .map(|r| r.iter().zip(&m).map(|(a, b)| a.to_f64() * b).sum())
                .collect();
            let rhs = commutator(&mm, x.x(j)).unwrap();
            assert!(lhs.iter().zip(rhs.entries()).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn decompositions() {
        let d = span_decompose(&x_matrices().mats, x_matrices().x(7)).unwrap();
        assert!(d.residual < 1e-14);
        assert_eq!(d.nonzero_slots(1e-12), vec![6]);
        assert!((d.coefficients[6] - 1.0).norm() < 1e-14);

        let d = decompose_ls(CircuitParamsS::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(d.nonzero_slots(1e-12), vec![1]);
        assert!((d.coefficients[1] - Complex64::i()).norm() < 1e-14);

        let d = span_decompose(&x_matrices().mats, &CMatrix::identity(4).unwrap()).unwrap();
        assert!(d.residual > 0.5);

        let p = CircuitParamsS::new(1.3, -0.4, 0.7).unwrap();
        let d = decompose_ls(p).unwrap();
        let derived = ls_derived_coefficients(p);
        for k in 0..12 {
            assert!((d.coefficients[k] - derived[k]).norm() < 1e-13, "slot {}", k + 1);
        }
        assert!((ls_printed_coefficients(p)[8] + derived[8]).norm() < 1e-15);

        let t = CircuitParamsT::new(1.0, 1.0, 1.0).unwrap();
        let d = decompose_ht(t).unwrap();
        assert!(d.residual < 1e-12);
        assert_eq!(d.nonzero_slots(1e-12), vec![0, 4, 10, 11]);
        let derived = ht_derived_coefficients(t);
        for k in 0..12 {
            assert!((d.coefficients[k] - derived[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn lifted_pair_relations() {
        let p = PseudofermionParams::new(0.4, 0.3, 1.1).unwrap();
        let l = lifted_pf(p).unwrap();
        let id = CMatrix::identity(4).unwrap();
        assert!(anticommutator(&l.a, &l.b).unwrap().approx_eq(&id, 1e-12));
        assert!(commutator(&l.a, &l.b_tilde).unwrap().max_abs() < 1e-12);
        assert!((l.a * l.a).max_abs() < 1e-12);
    }

    #[test]
    fn gamma_sets_at_the_special_point() {
        let p = PseudofermionParams::new(FRAC_PI_2, 0.0, 1.0).unwrap();
        let g = gamma_sets(p).unwrap();
        let x = x_matrices();
        assert!(g.mu[0].approx_eq(&-x.x(3), 1e-15));
        assert!(g.nu[0].approx_eq(&-x.x(4), 1e-15));
        let l = lifted_pf(p).unwrap();
        assert!((l.b + l.a).approx_eq(&-x.x(3), 1e-15));
    }

    #[test]
    fn realization_report() {
        for w in [0.5, 1.0, 2.5] {
            let p = PseudofermionParams::new(FRAC_PI_2, 0.0, w).unwrap();
            let r = verify_x_realization(p).unwrap();
            assert!(r.all_passed(), "{r}");
            for k in 1..=6 {
                assert!(r.get(&format!("x_realization_X{k}")).unwrap().max_abs_error < 1e-12);
            }
            // i(AB - BA) squares to -I and cannot equal X⊗I.
            assert!(r.get("x_realization_X1_commutator_form").unwrap().max_abs_error > 1.0);
            assert!(r.get("x_realization_X5_commutator_form").unwrap().max_abs_error > 1.0);
        }
        let off = PseudofermionParams::new(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(verify_x_realization(off), Err(Error::WrongParameterPoint { .. })));
    }

    #[test]
    fn p2_generation_report() {
        let r = verify_p2_generation();
        assert!(r.all_passed(), "{r}");
        assert!(r.get("p2_order_64").is_some());
    }
}
