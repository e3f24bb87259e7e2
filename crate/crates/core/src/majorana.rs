//! Phased products of Majorana operators and qubit Pauli letters.
//!
//! Each fermion site `i` carries two Majoranas, `γ_i` and `γ̃_i`, with
//! `p_i† = (γ_i + iγ̃_i)/2`. They are flattened into one index
//! `η = 2i` (γ) and `η = 2i + 1` (γ̃).
//!
//! A [`MajoranaQubitString`] stands for `phase · η_a η_b ⋯ · P_q1 P_q2 ⋯`
//! with the Majorana indices strictly ascending. Qubit letters commute with
//! every Majorana since they live on a separate register.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MajoranaError {
    #[error("fermion site {site} out of range for {n_modes} modes")]
    SiteOutOfRange { site: usize, n_modes: usize },
    #[error("cannot parse operator string {0:?}")]
    Parse(String),
}

/// A fourth root of unity, stored as the power of `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// Recovers a phase from a complex number that is (close to) a fourth root of unity.
    pub fn from_complex(z: C64, tol: f64) -> Option<Phase> {
        (0..4)
            .map(Phase)
            .find(|p| (p.to_complex() - z).norm() < tol)
    }

    fn token(self) -> &'static str {
        ["+1", "+i", "-1", "-i"][self.0 as usize]
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MajoranaKind {
    Gamma,
    GammaTilde,
}

/// One Majorana operator on a fermion site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MajoranaIndex {
    pub site: usize,
    pub kind: MajoranaKind,
}

impl MajoranaIndex {
    pub fn gamma(site: usize) -> Self {
        Self {
            site,
            kind: MajoranaKind::Gamma,
        }
    }

    pub fn gamma_tilde(site: usize) -> Self {
        Self {
            site,
            kind: MajoranaKind::GammaTilde,
        }
    }

    pub fn flatten(self) -> usize {
        2 * self.site + matches!(self.kind, MajoranaKind::GammaTilde) as usize
    }

    pub fn unflatten(eta: usize) -> Self {
        let kind = if eta.is_multiple_of(2) {
            MajoranaKind::Gamma
        } else {
            MajoranaKind::GammaTilde
        };
        Self {
            site: eta / 2,
            kind,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Neg for Phase {
    type Output = Phase;

    fn neg(self) -> Phase {
        Phase((self.0 + 2) % 4)
    }
}

impl Pauli {
    /// Product of two letters as `(phase, letter)`; `None` means identity.
    pub fn product(self, rhs: Pauli) -> (Phase, Option<Pauli>) {
        use Pauli::*;
        match (self, rhs) {
            (a, b) if a == b => (Phase::ONE, None),
            (X, Y) => (Phase::I, Some(Z)),
            (Y, X) => (Phase::MINUS_I, Some(Z)),
            (Y, Z) => (Phase::I, Some(X)),
            (Z, Y) => (Phase::MINUS_I, Some(X)),
            (Z, X) => (Phase::I, Some(Y)),
            (X, Z) => (Phase::MINUS_I, Some(Y)),
            _ => unreachable!(),
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Multiplies letter maps `a · b`, returning the accumulated phase.
fn mul_letters(
    a: &BTreeMap<usize, Pauli>,
    b: &BTreeMap<usize, Pauli>,
) -> (Phase, BTreeMap<usize, Pauli>) {
    let mut out = a.clone();
    let mut phase = Phase::ONE;
    for (&q, &pb) in b {
        match out.get(&q) {
            None => {
                out.insert(q, pb);
            }
            Some(&pa) => {
                let (ph, r) = pa.product(pb);
                phase = phase * ph;
                match r {
                    Some(l) => {
                        out.insert(q, l);
                    }
                    None => {
                        out.remove(&q);
                    }
                }
            }
        }
    }
    (phase, out)
}

/// Number of qubits on which both maps carry different letters.
fn letter_clashes(a: &BTreeMap<usize, Pauli>, b: &BTreeMap<usize, Pauli>) -> usize {
    a.iter()
        .filter(|(q, pa)| b.get(q).is_some_and(|pb| pb != *pa))
        .count()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MajoranaQubitString {
    phase: Phase,
    majoranas: Vec<usize>,
    paulis: BTreeMap<usize, Pauli>,
}

/// Whether two strings commute or anticommute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Commutation {
    Commutes,
    Anticommutes,
}

impl MajoranaQubitString {
    pub fn identity() -> Self {
        Self {
            phase: Phase::ONE,
            majoranas: Vec::new(),
            paulis: BTreeMap::new(),
        }
    }

    /// Sorts an arbitrary Majorana product into ascending order.
    ///
    /// Each swap of two distinct neighbours contributes a sign, equal
    /// neighbours cancel because `η² = 1`.
    pub fn canonicalize(factors: &[usize], phase: Phase) -> Self {
        let mut v = factors.to_vec();
        let mut swaps = 0usize;
        // insertion sort counts transpositions of distinct elements only
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                swaps += 1;
                j -= 1;
            }
        }
        let mut out: Vec<usize> = Vec::with_capacity(v.len());
        for x in v {
            if out.last() == Some(&x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        let phase = if swaps % 2 == 1 { -phase } else { phase };
        Self {
            phase,
            majoranas: out,
            paulis: BTreeMap::new(),
        }
    }

    pub fn from_majoranas(factors: &[MajoranaIndex], phase: Phase) -> Self {
        let etas: Vec<usize> = factors.iter().map(|m| m.flatten()).collect();
        Self::canonicalize(&etas, phase)
    }

    pub fn gamma(site: usize) -> Self {
        Self::canonicalize(&[2 * site], Phase::ONE)
    }

    pub fn gamma_tilde(site: usize) -> Self {
        Self::canonicalize(&[2 * site + 1], Phase::ONE)
    }

    /// `Zf_i = 1 − 2n_i = −iγ̃_iγ_i = iγ_iγ̃_i`.
    pub fn parity(site: usize) -> Self {
        Self::canonicalize(&[2 * site, 2 * site + 1], Phase::I)
    }

    pub fn pauli(qubit: usize, letter: Pauli) -> Self {
        let mut paulis = BTreeMap::new();
        paulis.insert(qubit, letter);
        Self {
            phase: Phase::ONE,
            majoranas: Vec::new(),
            paulis,
        }
    }

    pub fn with_paulis(mut self, letters: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let extra: BTreeMap<usize, Pauli> = letters.into_iter().collect();
        let (ph, l) = mul_letters(&self.paulis, &extra);
        self.phase = self.phase * ph;
        self.paulis = l;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Same product with sites and qubits renamed; reordering signs are tracked.
    pub fn relabeled(&self, site: impl Fn(usize) -> usize, qubit: impl Fn(usize) -> usize) -> Self {
        let etas: Vec<usize> = self
            .majoranas
            .iter()
            .map(|&e| 2 * site(e / 2) + e % 2)
            .collect();
        let mut out = Self::canonicalize(&etas, self.phase);
        out.paulis = self.paulis.iter().map(|(&q, &l)| (qubit(q), l)).collect();
        out
    }

    pub fn majoranas(&self) -> &[usize] {
        &self.majoranas
    }

    pub fn paulis(&self) -> &BTreeMap<usize, Pauli> {
        &self.paulis
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn scaled(mut self, phase: Phase) -> Self {
        self.phase = self.phase * phase;
        self
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.majoranas.is_empty() && self.paulis.is_empty()
    }

    /// Fermionic strings have odd Majorana weight.
    pub fn is_fermionic(&self) -> bool {
        self.majoranas.len() % 2 == 1
    }

    pub fn weight(&self) -> usize {
        self.majoranas.len()
    }

    /// Highest fermion site touched, plus one.
    pub fn fermion_extent(&self) -> usize {
        self.majoranas.last().map_or(0, |&e| e / 2 + 1)
    }

    pub fn qubit_extent(&self) -> usize {
        self.paulis.keys().next_back().map_or(0, |&q| q + 1)
    }

    /// The string with the sign of the phase dropped, used as a term key.
    pub fn unphased(&self) -> Self {
        Self {
            phase: Phase::ONE,
            ..self.clone()
        }
    }

    pub fn adjoint(&self) -> Self {
        // reversing k Majoranas costs k(k-1)/2 transpositions
        let k = self.majoranas.len();
        let mut phase = self.phase.conj();
        if (k * k.saturating_sub(1) / 2) % 2 == 1 {
            phase = -phase;
        }
        Self {
            phase,
            majoranas: self.majoranas.clone(),
            paulis: self.paulis.clone(),
        }
    }

    /// True when the string equals its adjoint.
    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn multiply(&self, rhs: &Self) -> Self {
        let mut factors = self.majoranas.clone();
        factors.extend_from_slice(&rhs.majoranas);
        let mut out = Self::canonicalize(&factors, self.phase * rhs.phase);
        let (ph, letters) = mul_letters(&self.paulis, &rhs.paulis);
        out.phase = out.phase * ph;
        out.paulis = letters;
        out
    }

    pub fn commutation(&self, rhs: &Self) -> Commutation {
        let a = self.majoranas.len();
        let b = rhs.majoranas.len();
        let overlap = self
            .majoranas
            .iter()
            .filter(|e| rhs.majoranas.binary_search(e).is_ok())
            .count();
        let sign = a * b + overlap + letter_clashes(&self.paulis, &rhs.paulis);
        if sign.is_multiple_of(2) {
            Commutation::Commutes
        } else {
            Commutation::Anticommutes
        }
    }

    pub fn commutes_with(&self, rhs: &Self) -> bool {
        self.commutation(rhs) == Commutation::Commutes
    }
}

impl Mul for &MajoranaQubitString {
    type Output = MajoranaQubitString;
    fn mul(self, rhs: &MajoranaQubitString) -> MajoranaQubitString {
        self.multiply(rhs)
    }
}

impl fmt::Display for MajoranaQubitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} *", self.phase.token())?;
        if self.majoranas.is_empty() && self.paulis.is_empty() {
            return write!(f, " 1");
        }
        for &e in &self.majoranas {
            let m = MajoranaIndex::unflatten(e);
            match m.kind {
                MajoranaKind::Gamma => write!(f, " g{}", m.site)?,
                MajoranaKind::GammaTilde => write!(f, " gt{}", m.site)?,
            }
        }
        if !self.paulis.is_empty() {
            write!(f, " |")?;
            for (q, l) in &self.paulis {
                write!(f, " {}:q{}", l.letter(), q)?;
            }
        }
        Ok(())
    }
}

impl FromStr for MajoranaQubitString {
    type Err = MajoranaError;

    /// Parses the text form, e.g. `-i * g0 gt2 | X:q1`. Factors need not be sorted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MajoranaError::Parse(s.to_string());
        let (head, rest) = s.split_once('*').ok_or_else(bad)?;
        let phase = match head.trim() {
            "+1" | "1" => Phase::ONE,
            "+i" | "i" => Phase::I,
            "-1" => Phase::MINUS_ONE,
            "-i" => Phase::MINUS_I,
            _ => return Err(bad()),
        };
        let (maj, pau) = match rest.split_once('|') {
            Some((m, p)) => (m, p),
            None => (rest, ""),
        };
        let mut etas = Vec::new();
        for tok in maj.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let eta = if let Some(n) = tok.strip_prefix("gt") {
                2 * n.parse::<usize>().map_err(|_| bad())? + 1
            } else if let Some(n) = tok.strip_prefix('g') {
                2 * n.parse::<usize>().map_err(|_| bad())?
            } else {
                return Err(bad());
            };
            etas.push(eta);
        }
        let mut out = Self::canonicalize(&etas, phase);
        let mut letters = Vec::new();
        for tok in pau.split_whitespace() {
            let (l, q) = tok.split_once(":q").ok_or_else(bad)?;
            let letter = match l {
                "X" => Pauli::X,
                "Y" => Pauli::Y,
                "Z" => Pauli::Z,
                _ => return Err(bad()),
            };
            letters.push((q.parse::<usize>().map_err(|_| bad())?, letter));
        }
        for (q, l) in letters {
            out = out.multiply(&Self::pauli(q, l));
        }
        Ok(out)
    }
}

impl Serialize for MajoranaQubitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MajoranaQubitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A linear combination of strings with complex coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorSum {
    terms: Vec<(C64, MajoranaQubitString)>,
}

const MERGE_TOL: f64 = 1e-14;

impl OperatorSum {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn from_string(s: MajoranaQubitString) -> Self {
        let mut out = Self::zero();
        out.add_term(C64::new(1.0, 0.0), s);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (C64, MajoranaQubitString)>) -> Self {
        let mut out = Self::zero();
        for (c, s) in terms {
            out.add_term(c, s);
        }
        out
    }

    /// Adds `c · s`, folding the string phase into the coefficient.
    pub fn add_term(&mut self, c: C64, s: MajoranaQubitString) {
        let c = c * s.phase().to_complex();
        let key = s.unphased();
        if let Some(pos) = self.terms.iter().position(|(_, t)| *t == key) {
            self.terms[pos].0 += c;
            if self.terms[pos].0.norm() < MERGE_TOL {
                self.terms.remove(pos);
            }
        } else if c.norm() >= MERGE_TOL {
            self.terms.push((c, key));
        }
    }

    pub fn terms(&self) -> &[(C64, MajoranaQubitString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, s)| (k * c, s.clone())))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (c, s) in &rhs.terms {
            out.add_term(*c, s.clone());
        }
        out
    }

    pub fn multiply(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (a, sa) in &self.terms {
            for (b, sb) in &rhs.terms {
                out.add_term(a * b, sa.multiply(sb));
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(c, s)| (c.conj(), s.adjoint())))
    }

    /// If the sum is a single string with a unit-phase coefficient, returns it.
    pub fn as_single(&self, tol: f64) -> Option<MajoranaQubitString> {
        match self.terms.as_slice() {
            [(c, s)] => Phase::from_complex(*c, tol).map(|p| s.clone().with_phase(p)),
            _ => None,
        }
    }

    /// Largest coefficient difference between two sums.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        let diff = self.add(&rhs.scale(C64::new(-1.0, 0.0)));
        diff.terms.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max)
    }

    pub fn fermion_extent(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, s)| s.fermion_extent())
            .max()
            .unwrap_or(0)
    }

    pub fn qubit_extent(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, s)| s.qubit_extent())
            .max()
            .unwrap_or(0)
    }

    /// `p_i† = (γ_i + iγ̃_i)/2`.
    pub fn creation(site: usize) -> Self {
        Self::from_terms([
            (C64::new(0.5, 0.0), MajoranaQubitString::gamma(site)),
            (C64::new(0.0, 0.5), MajoranaQubitString::gamma_tilde(site)),
        ])
    }

    /// `p_i = (γ_i − iγ̃_i)/2`.
    pub fn annihilation(site: usize) -> Self {
        Self::creation(site).adjoint()
    }

    /// `n_i = (1 + iγ̃_iγ_i)/2`.
    pub fn number(site: usize) -> Self {
        Self::from_terms([
            (C64::new(0.5, 0.0), MajoranaQubitString::identity()),
            (C64::new(-0.5, 0.0), MajoranaQubitString::parity(site)),
        ])
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, s)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.12}{:+.12}i)[{}]", c.re, c.im, s)?;
        }
        Ok(())
    }
}

/// A phased tensor product of qubit Pauli letters.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    pub phase: C64,
    pub letters: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self {
            phase: C64::new(1.0, 0.0),
            letters: BTreeMap::new(),
        }
    }

    pub fn multiply(&self, rhs: &Self) -> Self {
        let (ph, letters) = mul_letters(&self.letters, &rhs.letters);
        Self {
            phase: self.phase * rhs.phase * ph.to_complex(),
            letters,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.im.abs() < 1e-12
    }
}

/// Jordan-Wigner image of a string on `n_qubits` qubit wires followed by
/// `n_modes` fermion wires.
///
/// Fermion mode `i` becomes wire `n_qubits + i`, with occupation stored as
/// bit 1. Then `γ_i → (∏_{j<i} Z_j) X_i` and `γ̃_i → −(∏_{j<i} Z_j) Y_i`.
pub fn jordan_wigner(
    s: &MajoranaQubitString,
    n_qubits: usize,
    n_modes: usize,
) -> Result<PauliString, MajoranaError> {
    if s.fermion_extent() > n_modes {
        return Err(MajoranaError::SiteOutOfRange {
            site: s.fermion_extent() - 1,
            n_modes,
        });
    }
    let mut out = PauliString {
        phase: s.phase().to_complex(),
        letters: BTreeMap::new(),
    };
    for &eta in s.majoranas() {
        let m = MajoranaIndex::unflatten(eta);
        let mut letters: BTreeMap<usize, Pauli> =
            (0..m.site).map(|j| (n_qubits + j, Pauli::Z)).collect();
        let (phase, letter) = match m.kind {
            MajoranaKind::Gamma => (C64::new(1.0, 0.0), Pauli::X),
            MajoranaKind::GammaTilde => (C64::new(-1.0, 0.0), Pauli::Y),
        };
        letters.insert(n_qubits + m.site, letter);
        out = out.multiply(&PauliString { phase, letters });
    }
    for (&q, &l) in s.paulis() {
        if q >= n_qubits {
            return Err(MajoranaError::SiteOutOfRange {
                site: q,
                n_modes: n_qubits,
            });
        }
        let mut letters = BTreeMap::new();
        letters.insert(q, l);
        out = out.multiply(&PauliString {
            phase: C64::new(1.0, 0.0),
            letters,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> MajoranaQubitString {
        s.parse().unwrap()
    }

    #[test]
    fn swap_gives_sign() {
        let s = MajoranaQubitString::canonicalize(&[1, 0], Phase::ONE);
        assert_eq!(s.phase(), Phase::MINUS_ONE);
        assert_eq!(s.majoranas(), &[0, 1]);
    }

    #[test]
    fn square_cancels() {
        let s = MajoranaQubitString::canonicalize(&[0, 0], Phase::ONE);
        assert_eq!(s, MajoranaQubitString::identity());
    }

    #[test]
    fn repeated_factor_sign() {
        // η3 η0 η3 = −η0 η3 η3 = −η0
        let s = MajoranaQubitString::canonicalize(&[3, 0, 3], Phase::I);
        assert_eq!(s.phase(), Phase::MINUS_I);
        assert_eq!(s.majoranas(), &[0]);
    }

    #[test]
    fn gamma_tilde_anticommute_on_site() {
        let a = MajoranaQubitString::gamma(1);
        let b = MajoranaQubitString::gamma_tilde(1);
        assert_eq!(a.commutation(&b), Commutation::Anticommutes);
        let c = parse("+1 * g1 gt1");
        let d = parse("+1 * g2 gt2");
        assert_eq!(c.commutation(&d), Commutation::Commutes);
    }

    #[test]
    fn self_product_is_identity() {
        let g = MajoranaQubitString::gamma(1);
        assert_eq!(g.multiply(&g), MajoranaQubitString::identity());
        let s = parse("-i * g0 gt2 g3 | X:q1 Z:q0");
        assert_eq!(s.multiply(&s.adjoint()), MajoranaQubitString::identity());
    }

    #[test]
    fn text_round_trip() {
        for t in ["-i * g0 gt2 | X:q1", "+1 * 1", "+i * gt0 g1", "-1 * | Z:q3"] {
            assert_eq!(parse(t).to_string(), t);
        }
    }

    #[test]
    fn parity_matches_number() {
        // Zf = 1 − 2n
        let n = OperatorSum::number(2);
        let zf = OperatorSum::from_terms([(C64::new(1.0, 0.0), MajoranaQubitString::identity())])
            .add(&n.scale(C64::new(-2.0, 0.0)));
        assert!(zf.max_abs_diff(&OperatorSum::from_string(MajoranaQubitString::parity(2))) < 1e-14);
    }

    #[test]
    fn creation_products() {
        let cd = OperatorSum::creation(0);
        let c = OperatorSum::annihilation(0);
        assert!(cd.multiply(&cd).is_empty());
        assert!(cd.multiply(&c).max_abs_diff(&OperatorSum::number(0)) < 1e-14);
    }

    #[test]
    fn jw_first_mode_has_no_tail() {
        let p = jordan_wigner(&MajoranaQubitString::gamma(0), 0, 2).unwrap();
        assert_eq!(
            p.letters.into_iter().collect::<Vec<_>>(),
            vec![(0, Pauli::X)]
        );
    }

    #[test]
    fn jw_parity_is_z() {
        let p = jordan_wigner(&MajoranaQubitString::parity(0), 0, 1).unwrap();
        assert!((p.phase - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(p.letters.get(&0), Some(&Pauli::Z));
    }

    #[test]
    fn jw_out_of_range() {
        assert!(jordan_wigner(&MajoranaQubitString::gamma(3), 0, 2).is_err());
    }

    #[test]
    fn flatten_round_trip() {
        for eta in 0..40 {
            assert_eq!(MajoranaIndex::unflatten(eta).flatten(), eta);
        }
    }
}
