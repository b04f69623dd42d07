//! Exact Pauli group algebra on one and two qubits.
//!
//! An element is `i^phase` times a tensor word over `{I, X, Y, Z}`. The pair packs into
//! a single byte, which is what the closure routine hashes.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron, CMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    fn from_bits(b: u8) -> Letter {
        Self::ALL[(b & 3) as usize]
    }

    pub fn matrix(self) -> CMatrix {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let rows = match self {
            Letter::I => [[l, o], [o, l]],
            Letter::X => [[o, l], [l, o]],
            Letter::Y => [[o, -i], [i, o]],
            Letter::Z => [[l, o], [o, -l]],
        };
        CMatrix::from_rows(&rows).expect("2x2 literal")
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// `LETTER_PRODUCT[a][b] = (p, c)` with `a b = i^p c`.
///
/// Read off `X = iZY`, `Y = iXZ`, `Z = iYX` and `X² = Y² = Z² = I`: `ZY = -iX`,
/// `XZ = -iY`, `YX = -iZ`, and the reversed orders pick up `+i`.
const LETTER_PRODUCT: [[(u8, Letter); 4]; 4] = {
    use Letter::*;
    [
        [(0, I), (0, X), (0, Y), (0, Z)],
        [(0, X), (0, I), (1, Z), (3, Y)],
        [(0, Y), (3, Z), (0, I), (1, X)],
        [(0, Z), (1, Y), (3, X), (0, I)],
    ]
};

pub fn letter_product(a: Letter, b: Letter) -> (u8, Letter) {
    LETTER_PRODUCT[a as usize][b as usize]
}

/// `i^phase` times a word of `n` letters, `n` in `{1, 2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliElement {
    n: u8,
    phase: u8,
    word: [Letter; 2],
}

impl PauliElement {
    pub fn new(phase: u8, word: &[Letter]) -> Result<Self> {
        match word.len() {
            1 => Ok(Self {
                n: 1,
                phase: phase % 4,
                word: [word[0], Letter::I],
            }),
            2 => Ok(Self {
                n: 2,
                phase: phase % 4,
                word: [word[0], word[1]],
            }),
            k => Err(Error::UnsupportedQubits(k)),
        }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(0, &vec![Letter::I; n])
    }

    pub fn qubits(&self) -> usize {
        self.n as usize
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn word(&self) -> &[Letter] {
        &self.word[..self.n as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.word().iter().all(|&l| l == Letter::I)
    }

    /// Packed canonical key: bits 0-1 phase, then two bits per letter, then the qubit count.
    pub fn key(&self) -> u8 {
        self.phase | (self.word[0] as u8) << 2 | (self.word[1] as u8) << 4 | (self.n - 1) << 6
    }

    pub fn from_key(key: u8) -> Self {
        Self {
            n: ((key >> 6) & 1) + 1,
            phase: key & 3,
            word: [Letter::from_bits(key >> 2), Letter::from_bits(key >> 4)],
        }
    }

    /// Every word squares to the identity, so the inverse only negates the phase.
    pub fn inverse(&self) -> Self {
        Self {
            phase: (4 - self.phase) % 4,
            ..*self
        }
    }

    /// `i^k` times this element.
    pub fn with_extra_phase(&self, k: u8) -> Self {
        Self {
            phase: (self.phase + k) % 4,
            ..*self
        }
    }

    /// `self ⊗ other` for two single-qubit elements.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.n != 1 || other.n != 1 {
            return Err(Error::UnsupportedQubits(self.qubits() + other.qubits()));
        }
        Self::new(self.phase + other.phase, &[self.word[0], other.word[0]])
    }

    /// Every element of the full Pauli group on `n` qubits, in key order.
    pub fn enumerate(n: usize) -> Result<Vec<Self>> {
        if !(1..=2).contains(&n) {
            return Err(Error::UnsupportedQubits(n));
        }
        let letters = n as u32;
        let mut out = Vec::with_capacity(4usize.pow(letters + 1));
        for w in 0..4u8.pow(letters) {
            let word: Vec<Letter> = (0..n).map(|q| Letter::from_bits(w >> (2 * q))).collect();
            for p in 0..4 {
                out.push(Self::new(p, &word)?);
            }
        }
        out.sort();
        Ok(out)
    }
}

impl PartialOrd for PauliElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PauliElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for PauliElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        let word: String = self.word().iter().map(|l| l.as_char()).collect();
        write!(f, "{prefix}{word}")
    }
}

impl fmt::Debug for PauliElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses `[+|-][i]LETTERS`, e.g. `-iYX`.
impl FromStr for PauliElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, rest) = match s.as_bytes().first() {
            Some(b'+') => (false, &s[1..]),
            Some(b'-') => (true, &s[1..]),
            _ => (false, s),
        };
        let (imaginary, letters) = match rest.strip_prefix('i') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let word = letters
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                other => Err(Error::Parse(format!("bad Pauli letter {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if word.is_empty() {
            return Err(Error::Parse(format!("empty Pauli word in {s:?}")));
        }
        let phase = 2 * negative as u8 + imaginary as u8;
        Self::new(phase, &word)
    }
}

pub fn pauli_mul(a: &PauliElement, b: &PauliElement) -> Result<PauliElement> {
    if a.n != b.n {
        return Err(Error::QubitMismatch(a.qubits(), b.qubits()));
    }
    let mut phase = a.phase + b.phase;
    let mut word = [Letter::I; 2];
    for q in 0..a.n as usize {
        let (p, l) = letter_product(a.word[q], b.word[q]);
        phase += p;
        word[q] = l;
    }
    Ok(PauliElement {
        n: a.n,
        phase: phase % 4,
        word,
    })
}

/// `i^phase` times the Kronecker product of the letter matrices.
pub fn to_matrix(e: &PauliElement) -> CMatrix {
    let mut m = e.word[0].matrix();
    if e.n == 2 {
        m = kron(&m, &e.word[1].matrix()).expect("4x4 fits");
    }
    m.scale(Complex64::i().powu(e.phase as u32))
}

/// Recognises a 2×2 or 4×4 matrix as a Pauli element, entrywise within 1e-10.
pub fn from_matrix(m: &CMatrix) -> Result<PauliElement> {
    let n = match (m.rows(), m.cols()) {
        (2, 2) => 1,
        (4, 4) => 2,
        _ => return Err(Error::NotPauli),
    };
    PauliElement::enumerate(n)?
        .into_iter()
        .find(|e| to_matrix(e).approx_eq(m, 1e-10))
        .ok_or(Error::NotPauli)
}

/// Parses a generator list: one element per line, blank lines and `#` comments skipped.
pub fn parse_generators(text: &str) -> Result<Vec<PauliElement>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

/// A subgroup of the Pauli group, stored as its full element set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMatrixGroup {
    elements: BTreeSet<PauliElement>,
    generators: Vec<PauliElement>,
}

impl FiniteMatrixGroup {
    pub fn elements(&self) -> &BTreeSet<PauliElement> {
        &self.elements
    }

    pub fn generators(&self) -> &[PauliElement] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: &PauliElement) -> bool {
        self.elements.contains(e)
    }

    pub fn qubits(&self) -> usize {
        self.generators.first().map_or(1, PauliElement::qubits)
    }

    /// Elements commuting with the whole group.
    pub fn center(&self) -> BTreeSet<PauliElement> {
        self.elements
            .iter()
            .filter(|z| {
                self.elements
                    .iter()
                    .all(|g| pauli_mul(z, g).ok() == pauli_mul(g, z).ok())
            })
            .copied()
            .collect()
    }
}

/// Breadth-first closure of `generators` under multiplication.
pub fn generate_group(generators: &[PauliElement]) -> Result<FiniteMatrixGroup> {
    let first = generators.first().ok_or(Error::EmptyGenerators)?;
    if let Some(bad) = generators.iter().find(|g| g.n != first.n) {
        return Err(Error::QubitMismatch(first.qubits(), bad.qubits()));
    }
    let identity = PauliElement::identity(first.qubits())?;
    let mut seen: HashSet<u8> = HashSet::from([identity.key()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = pauli_mul(&x, g)?;
            if seen.insert(y.key()) {
                queue.push_back(y);
            }
        }
    }
    Ok(FiniteMatrixGroup {
        elements: seen.into_iter().map(PauliElement::from_key).collect(),
        generators: generators.to_vec(),
    })
}

/// `u⁻¹ v⁻¹ u v`.
pub fn group_commutator(u: &PauliElement, v: &PauliElement) -> Result<PauliElement> {
    let left = pauli_mul(&u.inverse(), &v.inverse())?;
    pauli_mul(&pauli_mul(&left, u)?, v)
}

/// Why a central-product check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CentralProductWitness {
    /// `u` and `v` do not commute.
    NonCommuting(PauliElement, PauliElement),
    /// `g` is not of the form `u v`.
    Uncovered(PauliElement),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralProductOutcome {
    pub holds: bool,
    pub witness: Option<CentralProductWitness>,
    /// `|{u v}|`.
    pub product_size: usize,
}

/// Whether `g` is the internal central product of `u` and `v`: `G = UV` and `[U, V] = 1`.
pub fn is_central_product(
    g: &FiniteMatrixGroup,
    u: &FiniteMatrixGroup,
    v: &FiniteMatrixGroup,
) -> Result<CentralProductOutcome> {
    for sub in [u, v] {
        if let Some(e) = sub.elements.iter().find(|e| !g.contains(e)) {
            return Err(Error::NotSubgroup(*e));
        }
    }
    let mut witness = None;
    'outer: for a in &u.elements {
        for b in &v.elements {
            if !group_commutator(a, b)?.is_identity() {
                witness = Some(CentralProductWitness::NonCommuting(*a, *b));
                break 'outer;
            }
        }
    }
    let mut products = BTreeSet::new();
    for a in &u.elements {
        for b in &v.elements {
            products.insert(pauli_mul(a, b)?);
        }
    }
    if witness.is_none() {
        if let Some(missing) = g.elements.iter().find(|e| !products.contains(e)) {
            witness = Some(CentralProductWitness::Uncovered(*missing));
        }
    }
    Ok(CentralProductOutcome {
        holds: witness.is_none(),
        witness,
        product_size: products.len(),
    })
}

/// The one-qubit Pauli group `<X, Y, Z>`.
pub fn p1() -> FiniteMatrixGroup {
    let gens: Vec<PauliElement> = ["X", "Y", "Z"].iter().map(|s| s.parse().expect("literal")).collect();
    generate_group(&gens).expect("valid generators")
}

/// Generators `X⊗I, Y⊗I, Z⊗I, I⊗X, I⊗Y, I⊗Z`.
pub fn standard_two_qubit_generators() -> Vec<PauliElement> {
    ["XI", "YI", "ZI", "IX", "IY", "IZ"]
        .iter()
        .map(|s| s.parse().expect("literal"))
        .collect()
}

/// The two-qubit Pauli group.
pub fn p2() -> FiniteMatrixGroup {
    generate_group(&standard_two_qubit_generators()).expect("valid generators")
}
