//! Seeded invariant suites behind `pfpauli verify`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuits::{
    build_ht, build_ls, derivative_check, evolve, h_s, uniform_grid, CircuitParamsS,
    CircuitParamsT, State, Trajectory,
};
use crate::error::{Error, Result};
use crate::linalg::{
    anticommutator, commutator, exact_apply, exact_rank, inverse, kron, linear_combination,
    mat_exp, null_space, psd_sqrt, span_decompose, spectral_norm, vec_max_abs_diff, vec_norm,
    CMatrix, ExactComplex,
};
use crate::pauli::{
    from_matrix, generate_group, p1, p2, pauli_mul, to_matrix, PauliElement,
};
use crate::pseudofermion::{
    biorthogonal_system, fermionize, h_eff, make_pf_pair, mu2_printed, mu_ops, number_ops,
    PseudofermionParams, Vec2,
};
use crate::report::{Report, Status};
use crate::xbasis::{
    commutant_dimension, decompose_ht, decompose_ls, gamma_sets, ht_derived_coefficients,
    ht_printed_coefficients, lifted_pf, ls_derived_coefficients, ls_printed_coefficients,
    verify_p2_generation, verify_x_realization, x_matrices,
};

pub const DEFAULT_SEED: u64 = 42;
/// Random parameter triples per pseudofermion run.
pub const PF_CASES: usize = 1000;
/// Random `(alpha, mu, gamma)` / `(b, d, r)` triples per decomposition run.
pub const DECOMPOSITION_CASES: usize = 100;
/// Random systems compared against the Runge–Kutta oracle.
pub const DYNAMICS_CASES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    All,
    Pseudofermion,
    Xbasis,
    Group,
    Circuits,
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Scope::All,
            "pseudofermion" => Scope::Pseudofermion,
            "xbasis" => Scope::Xbasis,
            "group" => Scope::Group,
            "circuits" => Scope::Circuits,
            _ => return Err(Error::Parse(format!("unknown scope {s:?}"))),
        })
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::All => "all",
            Scope::Pseudofermion => "pseudofermion",
            Scope::Xbasis => "xbasis",
            Scope::Group => "group",
            Scope::Circuits => "circuits",
        })
    }
}

/// Runs the suites for `scope`. Every randomized suite draws from its own stream derived
/// from `seed`, so a scope's output does not depend on which other scopes ran.
pub fn run(scope: Scope, seed: u64) -> Report {
    let mut report = Report::new();
    let want = |s: Scope| scope == Scope::All || scope == s;
    if scope == Scope::All {
        report.extend(linalg_suite(&mut stream(seed, 0)));
    }
    if want(Scope::Group) {
        report.extend(group_suite());
    }
    if want(Scope::Pseudofermion) {
        report.extend(pseudofermion_suite(&mut stream(seed, 1)));
    }
    if want(Scope::Xbasis) {
        report.extend(xbasis_suite(&mut stream(seed, 2)));
    }
    if want(Scope::Circuits) {
        report.extend(circuits_suite(&mut stream(seed, 3)));
    }
    report
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Worst error per named check across many cases, in first-seen order.
#[derive(Default)]
struct Tally {
    entries: Vec<(String, f64, f64)>,
}

impl Tally {
    fn record(&mut self, name: &str, err: f64, tol: f64) {
        match self.entries.iter_mut().find(|e| e.0 == name) {
            Some(e) => {
                if err.is_nan() || err > e.1 {
                    e.1 = err;
                }
            }
            None => self.entries.push((name.to_owned(), err, tol)),
        }
    }

    fn extend(&mut self, checks: &[(&'static str, f64, f64)]) {
        for (n, e, t) in checks {
            self.record(n, *e, *t);
        }
    }

    fn into_report(self) -> Report {
        let mut r = Report::new();
        for (name, err, tol) in self.entries {
            r.tol(name, err, tol);
        }
        r
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let v: Vec<Complex64> = (0..n * n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    CMatrix::from_row_major(n, n, &v).expect("finite")
}

fn linalg_suite(rng: &mut ChaCha8Rng) -> Report {
    let mut t = Tally::default();
    for _ in 0..50 {
        let a = random_matrix(rng, 2);
        let b = random_matrix(rng, 2);
        let d = random_matrix(rng, 2);
        let id = CMatrix::identity(2).unwrap();
        let left = kron(&kron(&a, &b).unwrap(), &d).unwrap();
        let right = kron(&a, &kron(&b, &d).unwrap()).unwrap();
        t.record("kron_associative", left.max_abs_diff(&right), 1e-14);
        let ab = kron(&a, &b).unwrap();
        let p = kron(&a, &id).unwrap() * kron(&id, &b).unwrap();
        let q = kron(&id, &b).unwrap() * kron(&a, &id).unwrap();
        t.record("kron_mixed_product", ab.max_abs_diff(&p).max(ab.max_abs_diff(&q)), 1e-14);

        let x = random_matrix(rng, 4);
        let y = random_matrix(rng, 4);
        let comm = commutator(&x, &y).unwrap() + commutator(&y, &x).unwrap();
        let anti = anticommutator(&x, &y).unwrap().max_abs_diff(&anticommutator(&y, &x).unwrap());
        t.record("commutator_antisymmetric", comm.max_abs().max(anti), 1e-14);

        let s: f64 = rng.gen_range(-1.0..1.0);
        let u: f64 = rng.gen_range(-1.0..1.0);
        let scale = 10.0 / (x.norm_inf() * (s.abs() + u.abs()));
        let (s, u) = (s * scale.min(1.0), u * scale.min(1.0));
        let lhs = mat_exp(&x, s).and_then(|es| Ok(es * mat_exp(&x, u)?));
        let err = match (lhs, mat_exp(&x, s + u)) {
            (Ok(l), Ok(r)) => l.max_abs_diff(&r) / r.max_abs().max(1.0),
            _ => f64::INFINITY,
        };
        t.record("expm_semigroup", err, 1e-9);

        let h = x * x.adjoint() + CMatrix::identity(4).unwrap().scale_re(0.1);
        let err = psd_sqrt(&h)
            .map(|r| (r * r).max_abs_diff(&h))
            .unwrap_or(f64::INFINITY);
        t.record("psd_sqrt_squares_back", err, 1e-10);

        let basis: Vec<CMatrix> = (0..5).map(|_| random_matrix(rng, 4)).collect();
        let target = random_matrix(rng, 4);
        let err = span_decompose(&basis, &target)
            .and_then(|d| {
                let back = linear_combination(&basis, &d.coefficients)?;
                Ok(((back - target).norm_fro() - d.residual).abs())
            })
            .unwrap_or(f64::INFINITY);
        t.record("span_residual_consistent", err, 1e-12);
    }
    let mut report = t.into_report();

    let rows: Vec<Vec<ExactComplex>> = (0..3)
        .map(|_| {
            (0..5)
                .map(|_| ExactComplex::from_ints(rng.gen_range(-3..=3), rng.gen_range(-3..=3)))
                .collect()
        })
        .collect();
    let ns = null_space(&rows, 5);
    let exact_zero = ns.len() + exact_rank(&rows, 5) == 5
        && ns.iter().all(|v| exact_apply(&rows, v).iter().all(ExactComplex::is_zero));
    report.flag("null_space_exact", exact_zero);
    report
}

fn group_suite() -> Report {
    let mut report = Report::new();
    report.flag("p1_order_16", p1().order() == 16);
    report.extend(verify_p2_generation());

    let all = PauliElement::enumerate(2).expect("two qubits");
    let mut assoc = true;
    for a in &all {
        for b in &all {
            let ab = pauli_mul(a, b).unwrap();
            for d in &all {
                assoc &= pauli_mul(&ab, d).unwrap() == pauli_mul(a, &pauli_mul(b, d).unwrap()).unwrap();
            }
        }
    }
    report.flag("pauli_mul_associative_p2", assoc);
    let id = PauliElement::identity(2).unwrap();
    report.flag(
        "pauli_mul_identity_unit",
        all.iter().all(|a| pauli_mul(a, &id).unwrap() == *a && pauli_mul(&id, a).unwrap() == *a),
    );
    let mut hom: f64 = 0.0;
    for a in &all {
        for b in &all {
            let lhs = to_matrix(&pauli_mul(a, b).unwrap());
            hom = hom.max(lhs.max_abs_diff(&(to_matrix(a) * to_matrix(b))));
        }
    }
    report.tol("to_matrix_homomorphism", hom, 0.0);
    report.flag(
        "from_matrix_roundtrip",
        all.iter().all(|a| from_matrix(&to_matrix(a)).ok() == Some(*a)),
    );
    report.flag(
        "element_orders_divide_4",
        all.iter().all(|a| {
            let a2 = pauli_mul(a, a).unwrap();
            pauli_mul(&a2, &a2).unwrap().is_identity()
        }),
    );
    let centre = p2().center();
    let scalars: Vec<PauliElement> = (0..4).map(|k| id.with_extra_phase(k)).collect();
    report.flag(
        "p2_center_is_scalars",
        centre.len() == 4 && scalars.iter().all(|s| centre.contains(s)),
    );
    let gens = crate::pauli::standard_two_qubit_generators();
    let mut rev = gens.clone();
    rev.reverse();
    report.flag(
        "generation_order_independent",
        generate_group(&gens).unwrap().elements() == generate_group(&rev).unwrap().elements(),
    );
    report
}

fn sample_pf(rng: &mut ChaCha8Rng) -> PseudofermionParams {
    loop {
        let theta = rng.gen_range(0.0..TAU);
        let delta = rng.gen_range(-1.0..1.0);
        let w = rng.gen_range(f64::abs(delta) + 0.1..3.0);
        if let Ok(p) = PseudofermionParams::new(theta, delta, w) {
            return p;
        }
    }
}

fn apply2(m: &CMatrix, v: &Vec2) -> Vec2 {
    let out = m.mul_vec(v).expect("2x2");
    [out[0], out[1]]
}

fn scaled(s: f64, v: &Vec2) -> Vec2 {
    [v[0] * s, v[1] * s]
}

/// Every pseudofermion invariant at one parameter point as `(name, error, tolerance)`.
pub fn pseudofermion_point(p: PseudofermionParams) -> Result<Vec<(&'static str, f64, f64)>> {
    let pair = make_pf_pair(p)?;
    let id = CMatrix::identity(2)?;
    let (a, b) = (&pair.a, &pair.b);
    let mut out = Vec::new();
    out.push(("pf_anticommutator", anticommutator(a, b)?.max_abs_diff(&id), 1e-12));
    out.push(("pf_nilpotent", (a * a).max_abs().max((b * b).max_abs()), 1e-12));

    let l = lifted_pf(p)?;
    let id4 = CMatrix::identity(4)?;
    let lifted = anticommutator(&l.a, &l.b)?
        .max_abs_diff(&id4)
        .max(anticommutator(&l.a_tilde, &l.b_tilde)?.max_abs_diff(&id4))
        .max((l.a * l.a).max_abs())
        .max((l.b * l.b).max_abs())
        .max((l.a_tilde * l.a_tilde).max_abs())
        .max((l.b_tilde * l.b_tilde).max_abs());
    out.push(("pf_lifted_pairs", lifted, 1e-12));
    out.push(("pf_lifted_cross_commute", l.cross_commutator_defect(), 1e-12));

    let om = p.big_omega();
    let h = h_eff(p)?;
    let (n, nstar) = number_ops(&pair);
    let from_n = (n - id.scale_re(0.5)).scale_re(om);
    out.push(("h_eff_from_number_op", h.max_abs_diff(&from_n), 1e-12));

    let mu = mu_ops(p)?;
    let sq = mu.as_array().iter().map(|m| (m * m).max_abs_diff(&id)).fold(0.0, f64::max);
    out.push(("mu_square_to_identity", sq, 1e-9));
    gamma_sets(p)?;

    let sys = biorthogonal_system(p)?;
    out.push(("biorthogonality", sys.biorthogonality_defect(), 1e-9));
    out.push(("metric_inverse_pair", (sys.s_phi * sys.s_psi).max_abs_diff(&id), 1e-9));
    let inter = (sys.s_psi * n)
        .max_abs_diff(&(nstar * sys.s_psi))
        .max((sys.s_phi * nstar).max_abs_diff(&(n * sys.s_phi)));
    out.push(("metric_intertwining", inter, 1e-9));
    let hd = h.adjoint();
    let eig = [
        vec_max_abs_diff(&apply2(&h, &sys.phi0), &scaled(-om / 2.0, &sys.phi0)),
        vec_max_abs_diff(&apply2(&h, &sys.phi1), &scaled(om / 2.0, &sys.phi1)),
        vec_max_abs_diff(&apply2(&hd, &sys.psi0), &scaled(-om / 2.0, &sys.psi0)),
        vec_max_abs_diff(&apply2(&hd, &sys.psi1), &scaled(om / 2.0, &sys.psi1)),
    ];
    out.push(("h_eff_eigen_relations", eig.into_iter().fold(0.0, f64::max), 1e-9));
    let over = |s: &CMatrix, u: &Vec2, v: &Vec2| {
        let bound = vec_norm(u).powi(2) + vec_norm(v).powi(2);
        spectral_norm(s).map(|nrm| (nrm - bound).max(0.0)).unwrap_or(f64::INFINITY)
    };
    let bound = over(&sys.s_phi, &sys.phi0, &sys.phi1).max(over(&sys.s_psi, &sys.psi0, &sys.psi1));
    out.push(("metric_norm_bound", bound, 1e-12));
    let ad = a.adjoint();
    let ladder = vec_norm(&apply2(&(b * b), &sys.phi0)).max(vec_norm(&apply2(&(ad * ad), &sys.psi0)));
    out.push(("ladder_terminates", ladder, 1e-12));
    let mut maps: f64 = 0.0;
    for k in 0..2 {
        maps = maps
            .max(vec_max_abs_diff(&apply2(&sys.s_phi, sys.psi(k)), sys.phi(k)))
            .max(vec_max_abs_diff(&apply2(&sys.s_psi, sys.phi(k)), sys.psi(k)));
    }
    out.push(("metric_maps_bases", maps, 1e-10));

    let f = fermionize(&pair, &sys)?;
    let cd = f.c.adjoint();
    let car = anticommutator(&f.c, &cd)?
        .max_abs_diff(&id)
        .max((f.c * f.c).max_abs());
    out.push(("fermion_car", car, 1e-10));
    let h0 = ((cd * f.c) - id.scale_re(0.5)).scale_re(om);
    let back = (f.t * h0) * f.t_inv;
    out.push(("fermion_similarity_h_eff", back.max_abs_diff(&h), 1e-9));
    let tinv = inverse(&f.t)?;
    out.push(("fermion_t_inverse", tinv.max_abs_diff(&f.t_inv), 1e-10));
    Ok(out)
}

/// Checks for one user-supplied point, names prefixed with `prefix`.
pub fn pseudofermion_point_report(p: PseudofermionParams, prefix: &str) -> Report {
    let mut r = Report::new();
    match pseudofermion_point(p) {
        Ok(checks) => {
            r.flag(format!("{prefix}pf_construction"), true);
            for (n, e, t) in checks {
                r.tol(format!("{prefix}{n}"), e, t);
            }
        }
        Err(_) => {
            r.flag(format!("{prefix}pf_construction"), false);
        }
    }
    r
}

fn pm(s: &str) -> CMatrix {
    to_matrix(&s.parse::<PauliElement>().expect("literal"))
}

fn pseudofermion_suite(rng: &mut ChaCha8Rng) -> Report {
    let mut t = Tally::default();
    let mut failures = 0usize;
    for _ in 0..PF_CASES {
        match pseudofermion_point(sample_pf(rng)) {
            Ok(checks) => t.extend(&checks),
            Err(_) => failures += 1,
        }
    }
    let mut report = Report::new();
    report.flag("pf_construction", failures == 0);
    report.extend(t.into_report());

    for (label, theta, want, printed) in [
        ("pi2", FRAC_PI_2, ["-Z", "X", "-Y"], "-iY"),
        ("zero", 0.0, ["-Z", "-Y", "-X"], "iX"),
    ] {
        let p = PseudofermionParams::new(theta, 0.0, 1.0).expect("valid point");
        let name = format!("mu_special_{label}");
        match mu_ops(p) {
            Ok(mu) => {
                let want = [pm(want[0]), pm(want[1]), pm(want[2])];
                let err = mu
                    .as_array()
                    .iter()
                    .zip(&want)
                    .map(|(m, w)| m.max_abs_diff(w))
                    .fold(0.0, f64::max);
                report.tol(name, err, 1e-14);
                report.info(
                    format!("mu2_printed_special_{label}_vs_definition"),
                    mu.mu2.max_abs_diff(&pm(printed)),
                );
                report.info(
                    format!("mu2_printed_closed_form_{label}_vs_definition"),
                    mu.mu2.max_abs_diff(&mu2_printed(p)),
                );
            }
            Err(_) => {
                report.flag(name, false);
            }
        }
    }
    let sq = PseudofermionParams::new(PI / 3.0, 0.4, 1.2)
        .map(|p| (mu2_printed(p) * mu2_printed(p)).max_abs_diff(&CMatrix::identity(2).unwrap().scale_re(-1.0)))
        .unwrap_or(f64::INFINITY);
    report.info("mu2_printed_squares_to_minus_identity", sq);
    report
}

fn nonzero_slots(c: &[Complex64; 12]) -> Vec<usize> {
    (0..12).filter(|&k| c[k] != Complex64::new(0.0, 0.0)).collect()
}

fn xbasis_suite(rng: &mut ChaCha8Rng) -> Report {
    let mut report = Report::new();
    let x = x_matrices();
    report.flag("x_rank_12", exact_rank(&x.exact, 16) == 12);
    report.flag(
        "x_pauli_ids_roundtrip",
        x.pauli_ids.iter().zip(&x.mats).all(|(p, m)| to_matrix(p) == *m),
    );
    let zero = CMatrix::zeros(4, 4).unwrap();
    let rel = [
        anticommutator(x.x(1), x.x(2)),
        anticommutator(x.x(1), x.x(3)),
        commutator(x.x(2), x.x(4)),
        commutator(x.x(2), x.x(5)),
    ];
    report.flag("x_mixed_relations", rel.iter().all(|r| matches!(r, Ok(m) if *m == zero)));

    match commutant_dimension(&x.mats) {
        Ok(cm) => {
            let id: Vec<ExactComplex> = (0..16)
                .map(|k| if k % 5 == 0 { ExactComplex::one() } else { ExactComplex::zero() })
                .collect();
            report.flag("commutant_all_x_dim_1", cm.dim == 1 && cm.equations == 192);
            report.flag("commutant_all_x_identity", cm.basis.first() == Some(&id));
        }
        Err(_) => {
            report.flag("commutant_all_x_dim_1", false);
            report.flag("commutant_all_x_identity", false);
        }
    }
    report.flag("commutant_empty_dim_16", matches!(commutant_dimension(&[]), Ok(c) if c.dim == 16));
    report.flag("commutant_x3_dim_8", matches!(commutant_dimension(&[*x.x(3)]), Ok(c) if c.dim == 8));

    let mut t = Tally::default();
    let mut ls_slots = true;
    let mut printed_ls: [f64; 12] = [0.0; 12];
    for _ in 0..DECOMPOSITION_CASES {
        let p = CircuitParamsS::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            .expect("finite");
        let derived = ls_derived_coefficients(p);
        let printed = ls_printed_coefficients(p);
        match decompose_ls(p) {
            Ok(d) => {
                t.record("ls_residual", d.residual, 1e-12);
                ls_slots &= d.nonzero_slots(1e-12) == vec![0, 1, 3, 6, 8, 9];
                let diff = (0..12).map(|k| (d.coefficients[k] - derived[k]).norm()).fold(0.0, f64::max);
                t.record("ls_coefficients", diff, 1e-12);
                for k in 0..12 {
                    printed_ls[k] = printed_ls[k].max((d.coefficients[k] - printed[k]).norm());
                }
            }
            Err(_) => t.record("ls_residual", f64::INFINITY, 1e-12),
        }
    }
    let mut ht_slots = true;
    let mut printed_ht: [f64; 12] = [0.0; 12];
    for _ in 0..DECOMPOSITION_CASES {
        let p = CircuitParamsT::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            .expect("finite");
        let derived = ht_derived_coefficients(p);
        let printed = ht_printed_coefficients(p);
        match decompose_ht(p) {
            Ok(d) => {
                t.record("ht_residual", d.residual, 1e-12);
                ht_slots &= d.nonzero_slots(1e-12) == nonzero_slots(&derived);
                let diff = (0..12).map(|k| (d.coefficients[k] - derived[k]).norm()).fold(0.0, f64::max);
                t.record("ht_coefficients", diff, 1e-12);
                for k in 0..12 {
                    printed_ht[k] = printed_ht[k].max((d.coefficients[k] - printed[k]).norm());
                }
            }
            Err(_) => t.record("ht_residual", f64::INFINITY, 1e-12),
        }
    }
    let r = t.into_report();
    report.extend(r);
    report.flag("ls_nonzero_slots", ls_slots);
    report.flag("ht_nonzero_slots", ht_slots);
    for (label, diffs) in [("ls", printed_ls), ("ht", printed_ht)] {
        for (k, d) in diffs.iter().enumerate() {
            if *d > 1e-12 {
                report.info(format!("{label}_printed_slot{}_diff", k + 1), *d);
            }
        }
    }
    let id = CMatrix::identity(4).unwrap();
    report.flag(
        "identity_outside_x_span",
        matches!(span_decompose(&x.mats, &id), Ok(d) if d.residual > 0.5),
    );

    let mut worst: Vec<(String, Status, f64)> = Vec::new();
    for w in [0.5, 1.0, 2.5] {
        let p = PseudofermionParams::new(FRAC_PI_2, 0.0, w).expect("valid point");
        match verify_x_realization(p) {
            Ok(r) => {
                for ch in r.checks {
                    match worst.iter_mut().find(|e| e.0 == ch.name) {
                        Some(e) => {
                            e.2 = e.2.max(ch.max_abs_error);
                            if ch.status == Status::Fail {
                                e.1 = Status::Fail;
                            }
                        }
                        None => worst.push((ch.name, ch.status, ch.max_abs_error)),
                    }
                }
            }
            Err(_) => worst.push(("x_realization".into(), Status::Fail, f64::INFINITY)),
        }
    }
    for (n, s, e) in worst {
        report.push(n, s, e);
    }
    report
}

/// Step-doubling RK4 on a 4×4 linear system, extrapolated, sampled every `h`.
fn rk4_oracle(l: &CMatrix, psi0: &State, h: f64, n: usize) -> Vec<State> {
    let f = |y: &State| -> State {
        let v = l.mul_vec(y).expect("4x4");
        [v[0], v[1], v[2], v[3]]
    };
    let step = |y: &State, dt: f64| -> State {
        let axpy = |k: &State, s: f64| -> State { std::array::from_fn(|i| y[i] + k[i] * s) };
        let k1 = f(y);
        let k2 = f(&axpy(&k1, dt / 2.0));
        let k3 = f(&axpy(&k2, dt / 2.0));
        let k4 = f(&axpy(&k3, dt));
        std::array::from_fn(|i| y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0))
    };
    let mut y = *psi0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(y);
    let mut m = 1usize;
    for _ in 0..n {
        loop {
            let mut coarse = y;
            for _ in 0..m {
                coarse = step(&coarse, h / m as f64);
            }
            let mut fine = y;
            for _ in 0..2 * m {
                fine = step(&fine, h / (2 * m) as f64);
            }
            let gap = (0..4).map(|i| (coarse[i] - fine[i]).norm()).fold(0.0, f64::max);
            let size = fine.iter().map(|z| z.norm()).fold(1.0, f64::max);
            if gap <= 1e-14 * size || m >= 64 {
                y = std::array::from_fn(|i| fine[i] + (fine[i] - coarse[i]) / 15.0);
                break;
            }
            m *= 2;
        }
        out.push(y);
    }
    out
}

fn max_state_diff(a: &[State], b: &[State]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| (0..4).map(move |i| (x[i] - y[i]).norm()))
        .fold(0.0, f64::max)
}

fn run_traj(l: &CMatrix, psi0: &State, t_end: f64, n: usize) -> Result<Trajectory> {
    evolve(l, psi0, &uniform_grid(t_end, n)?)
}

fn circuits_suite(rng: &mut ChaCha8Rng) -> Report {
    let mut report = Report::new();
    let e1: State = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];

    let l = build_ls(CircuitParamsS::new(0.0, 5.0, 7.0).unwrap());
    let want = CMatrix::from_real_rows(&[
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 7.0, 0.0],
        [0.0, 0.0, 0.0, -7.0],
    ])
    .unwrap();
    report.flag("ls_layout", l == want);
    let ht = build_ht(CircuitParamsT::new(1.0, 0.5, 0.2).unwrap());
    report.flag("ht_symmetric", ht == ht.transpose());
    report.flag("ht_not_hermitian", ht.hermitian_defect() > 0.0);
    let mut hs_ok = true;
    for _ in 0..20 {
        let mut alpha: f64 = rng.gen_range(-1.0..1.0);
        if alpha == 0.0 {
            alpha = 0.5;
        }
        let p = CircuitParamsS::new(alpha, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).unwrap();
        hs_ok &= h_s(p).hermitian_defect() > 0.0;
    }
    report.flag("hs_not_hermitian", hs_ok);

    let osc = build_ls(CircuitParamsS::new(1.0, 0.0, 0.0).unwrap());
    let err = evolve(&osc, &e1, &[0.0, TAU])
        .map(|tr| vec_max_abs_diff(&tr.states[1], &e1))
        .unwrap_or(f64::INFINITY);
    report.tol("oscillator_period", err, 1e-8);
    report.flag(
        "evolve_t0_exact",
        matches!(evolve(&osc, &e1, &[0.0]), Ok(tr) if tr.states[0] == e1),
    );

    let mut energy: f64 = 0.0;
    for _ in 0..5 {
        let alpha = rng.gen_range(0.1..2.0);
        let l = build_ls(CircuitParamsS::new(alpha, 0.0, 0.0).unwrap());
        let psi: State = std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let e = |s: &State| alpha * (s[0].norm_sqr() + s[1].norm_sqr()) + s[2].norm_sqr() + s[3].norm_sqr();
        match run_traj(&l, &psi, 20.0, 2001) {
            Ok(tr) => {
                let e0 = e(&psi);
                energy = tr.states.iter().map(|s| (e(s) - e0).abs()).fold(energy, f64::max);
            }
            Err(_) => energy = f64::INFINITY,
        }
    }
    report.tol("oscillator_energy_conserved", energy, 1e-8);

    let mut lin: f64 = 0.0;
    for _ in 0..5 {
        let p = CircuitParamsS::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).unwrap();
        let l = build_ls(p);
        let u: State = std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let v: State = std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let w: State = std::array::from_fn(|i| u[i] + v[i]);
        let res = (|| -> Result<f64> {
            let (tu, tv, tw) = (run_traj(&l, &u, 5.0, 51)?, run_traj(&l, &v, 5.0, 51)?, run_traj(&l, &w, 5.0, 51)?);
            let sum: Vec<State> = tu.states.iter().zip(&tv.states).map(|(a, b)| std::array::from_fn(|i| a[i] + b[i])).collect();
            Ok(max_state_diff(&sum, &tw.states))
        })();
        lin = lin.max(res.unwrap_or(f64::INFINITY));
    }
    report.tol("evolve_linear", lin, 1e-10);

    let dc = |l: &CMatrix, t_end: f64, n: usize| {
        run_traj(l, &e1, t_end, n)
            .and_then(|tr| derivative_check(&tr, l))
            .unwrap_or(f64::INFINITY)
    };
    report.tol("derivative_check_oscillator", dc(&osc, 10.0, 10001), 1e-5);
    let generic = build_ls(CircuitParamsS::new(1.0, 0.5, 0.1).unwrap());
    report.tol("derivative_check_generic", dc(&generic, 5.0, 5001), 1e-4);
    let zero = CMatrix::zeros(4, 4).unwrap();
    report.tol("derivative_check_constant", dc(&zero, 1.0, 101), 0.0);

    let mut dev: f64 = 0.0;
    for _ in 0..DYNAMICS_CASES {
        let p = CircuitParamsS::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).unwrap();
        let l = build_ls(p);
        match run_traj(&l, &e1, 10.0, 10001) {
            Ok(tr) => dev = dev.max(max_state_diff(&tr.states, &rk4_oracle(&l, &e1, 1e-3, 10000))),
            Err(_) => dev = f64::INFINITY,
        }
    }
    report.tol("evolve_vs_rk4", dev, 1e-6);
    report
}
