//! Exact Gaussian-rational arithmetic and null spaces.
//!
//! Elimination runs over Gaussian integers (fraction-free): each row is cleared of
//! denominators up front, rows are combined as `p * r - r[c] * pivot_row`, and the
//! integer content of every updated row is divided out to keep coefficients small.
//! Rationals only reappear when the kernel vectors are read off.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Complex number with exact rational components, kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_f64(&self) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        num_complex::Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Exact conversion of a float pair whose components are integers.
    pub fn from_gaussian_f64(z: num_complex::Complex64) -> Option<Self> {
        let ok = |x: f64| x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15;
        if ok(z.re) && ok(z.im) {
            Some(Self::from_ints(z.re as i64, z.im as i64))
        } else {
            None
        }
    }
}

impl fmt::Debug for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", self.re, sign, self.im.abs())
            }
        }
    }
}

impl Add for &ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &ExactComplex {
    type Output = ExactComplex;
    /// Panics on division by zero.
    fn div(self, rhs: &ExactComplex) -> ExactComplex {
        let den = rhs.norm_sqr();
        assert!(!den.is_zero(), "division by exact zero");
        let num = self * &rhs.conj();
        ExactComplex::new(num.re / &den, num.im / den)
    }
}

impl Neg for &ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex::new(-self.re.clone(), -self.im.clone())
    }
}

impl Add for ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: ExactComplex) -> ExactComplex {
        &self + &rhs
    }
}

impl Sub for ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: ExactComplex) -> ExactComplex {
        &self - &rhs
    }
}

impl Mul for ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: ExactComplex) -> ExactComplex {
        &self * &rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn sub(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    fn to_exact(&self) -> ExactComplex {
        ExactComplex::new(
            BigRational::from_integer(self.re.clone()),
            BigRational::from_integer(self.im.clone()),
        )
    }
}

/// Scales an exact row by the lcm of its denominators.
fn clear_denominators(row: &[ExactComplex]) -> Vec<GaussInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, z| {
        acc.lcm(z.re.denom()).lcm(z.im.denom())
    });
    row.iter()
        .map(|z| {
            let re = &z.re * BigRational::from_integer(lcm.clone());
            let im = &z.im * BigRational::from_integer(lcm.clone());
            GaussInt {
                re: re.to_integer(),
                im: im.to_integer(),
            }
        })
        .collect()
}

fn remove_content(row: &mut [GaussInt]) {
    let g = row
        .iter()
        .fold(BigInt::zero(), |acc, z| acc.gcd(&z.re).gcd(&z.im));
    if g.is_zero() || g.is_one() {
        return;
    }
    for z in row.iter_mut() {
        z.re = &z.re / &g;
        z.im = &z.im / &g;
    }
}

/// Reduced echelon form over the Gaussian integers: pivot columns and the reduced rows.
fn reduce(rows: &[Vec<ExactComplex>], cols: usize) -> (Vec<usize>, Vec<Vec<GaussInt>>) {
    let mut m: Vec<Vec<GaussInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..cols {
        let Some(p) = (next..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(next, p);
        let pivot_row = m[next].clone();
        let pv = pivot_row[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == next || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, pr) in row.iter_mut().zip(&pivot_row) {
                *x = pv.mul(x).sub(&factor.mul(pr));
            }
            remove_content(row);
        }
        pivots.push(c);
        next += 1;
        if next == m.len() {
            break;
        }
    }
    m.truncate(next);
    (pivots, m)
}

/// Exact rank of a `rows.len() x cols` matrix.
pub fn rank(rows: &[Vec<ExactComplex>], cols: usize) -> usize {
    reduce(rows, cols).0.len()
}

/// Basis of the right null space `{x : M x = 0}`, one vector per free column.
///
/// Each basis vector carries a 1 in its free column and zeros in the other free columns.
pub fn null_space(rows: &[Vec<ExactComplex>], cols: usize) -> Vec<Vec<ExactComplex>> {
    assert!(cols >= 1, "null space of a map with no columns");
    assert!(rows.iter().all(|r| r.len() == cols), "ragged exact matrix");
    let (pivots, reduced) = reduce(rows, cols);
    let free = (0..cols).filter(|c| !pivots.contains(c));
    free.map(|f| {
        let mut v = vec![ExactComplex::zero(); cols];
        v[f] = ExactComplex::one();
        for (row, &pc) in reduced.iter().zip(&pivots) {
            let coeff = row[f].to_exact();
            if !coeff.is_zero() {
                v[pc] = &(-&coeff) / &row[pc].to_exact();
            }
        }
        v
    })
    .collect()
}

/// Exact matrix-vector product, used to certify kernels.
pub fn apply(rows: &[Vec<ExactComplex>], v: &[ExactComplex]) -> Vec<ExactComplex> {
    rows.iter()
        .map(|r| {
            r.iter()
                .zip(v)
                .fold(ExactComplex::zero(), |acc, (a, b)| &acc + &(a * b))
        })
        .collect()
}
