//! Majorana stabilizer codes: the fermionic repetition code and the
//! triangular color codes obtained from weakly self-dual CSS codes.

mod circuits;
mod logical;
mod memory;
mod theorem;

pub use circuits::*;
pub use logical::*;
pub use memory::*;
pub use theorem::*;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::CliffordError;
use crate::gf2::{Bits, StabilizerGroup};
use crate::majorana::{Commutation, MajoranaQubitString as Mqs, OperatorSum, Phase};
use crate::sim::SimError;
use crate::C64;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("repetition code needs at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("color code distance must be odd and at least 3, got {0}")]
    BadDistance(usize),
    #[error("CSS input must have an odd number of sites, got {0}")]
    EvenSites(usize),
    #[error("check row {0} has odd weight")]
    OddCheck(usize),
    #[error("code invariant violated: {0}")]
    Invariant(String),
    #[error("blocks differ in size: {0} vs {1}")]
    Mismatch(usize, usize),
    #[error("syndrome {0} is not correctable")]
    Uncorrectable(String),
    #[error("{0} is not supported for this code")]
    Unsupported(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CodeFamily {
    Repetition { n: usize },
    Color { d: usize },
    Css,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plaquette {
    pub sites: Vec<usize>,
    pub color: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layout {
    Chain,
    Triangular {
        coords: Vec<(i64, i64)>,
        plaquettes: Vec<Plaquette>,
    },
    Unstructured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerCode {
    pub family: CodeFamily,
    pub n_sites: usize,
    pub generators: Vec<Mqs>,
    pub logical_gamma: Mqs,
    pub logical_gamma_tilde: Mqs,
    pub layout: Layout,
}

/// Steane check rows, shared by both CSS halves.
pub const STEANE_CHECKS: [[u8; 7]; 3] = [
    [0, 0, 0, 1, 1, 1, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1],
];

pub fn steane_checks() -> Vec<Bits> {
    STEANE_CHECKS.iter().map(|r| r.to_vec()).collect()
}

/// Sites `0..n` with `iγ̃_kγ_{k+1}` generators; logicals `γ_0` and `γ̃_{n−1}`.
pub fn build_repetition(n: usize) -> Result<StabilizerCode, CodeError> {
    if n < 2 {
        return Err(CodeError::TooFewSites(n));
    }
    let generators = (0..n - 1)
        .map(|k| Mqs::canonicalize(&[2 * k + 1, 2 * k + 2], Phase::I))
        .collect();
    let code = StabilizerCode {
        family: CodeFamily::Repetition { n },
        n_sites: n,
        generators,
        logical_gamma: Mqs::gamma(0),
        logical_gamma_tilde: Mqs::gamma_tilde(n - 1),
        layout: Layout::Chain,
    };
    code.check()?;
    Ok(code)
}

/// Hermitian sign for an even product of `w` distinct Majoranas: `i^{w/2}`.
fn hermitian_sign(w: usize) -> Phase {
    Phase::from_power((w / 2) as i64)
}

fn product(etas: impl IntoIterator<Item = usize>) -> Mqs {
    let v: Vec<usize> = etas.into_iter().collect();
    Mqs::canonicalize(&v, Phase::ONE)
}

/// Smallest phase in `{1, i}` making the string Hermitian.
fn hermitian(s: Mqs) -> Mqs {
    if s.is_hermitian() {
        s
    } else {
        s.scaled(Phase::I)
    }
}

/// Qubit `Z` checks become `γ` products and `X` checks become `γ̃` products.
pub fn from_css(x_checks: &[Bits], z_checks: &[Bits]) -> Result<StabilizerCode, CodeError> {
    let n = x_checks
        .iter()
        .chain(z_checks)
        .map(|r| r.len())
        .max()
        .unwrap_or(0);
    if n % 2 == 0 {
        return Err(CodeError::EvenSites(n));
    }
    let mut generators = Vec::new();
    for (offset, rows) in [(0usize, z_checks), (1, x_checks)] {
        for (k, row) in rows.iter().enumerate() {
            let support: Vec<usize> = (0..n).filter(|&i| row.get(i) == Some(&1)).collect();
            if support.len() % 2 == 1 {
                return Err(CodeError::OddCheck(k));
            }
            let s = product(support.iter().map(|&i| 2 * i + offset));
            generators.push(s.scaled(hermitian_sign(support.len())));
        }
    }
    let code = StabilizerCode {
        family: CodeFamily::Css,
        n_sites: n,
        generators,
        logical_gamma: hermitian(product((0..n).map(|i| 2 * i))),
        logical_gamma_tilde: hermitian(product((0..n).map(|i| 2 * i + 1))),
        layout: Layout::Unstructured,
    };
    code.check()?;
    Ok(code)
}

type Point = (i64, i64);

/// Triangular patch: points `x, y ≥ 0, x + y ≤ 3(d−1)/2`; points with
/// `x − y + 1 ≡ 0 (mod 3)` are plaquette centres, the rest are sites.
fn color_lattice(d: usize) -> (Vec<Point>, Vec<(Point, Vec<usize>)>) {
    let l = (3 * (d - 1) / 2) as i64;
    let pts: Vec<(i64, i64)> = (0..=l)
        .flat_map(|y| (0..=l - y).map(move |x| (x, y)))
        .collect();
    let is_face = |p: &(i64, i64)| (p.0 - p.1 + 1).rem_euclid(3) == 0;
    let sites: Vec<(i64, i64)> = pts.iter().filter(|p| !is_face(p)).copied().collect();
    let index = |p: (i64, i64)| sites.iter().position(|&s| s == p);
    let nbrs = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];
    let mut faces = Vec::new();
    for f in pts.iter().filter(|p| is_face(p)) {
        let mut support: Vec<usize> = nbrs
            .iter()
            .filter_map(|(dx, dy)| index((f.0 + dx, f.1 + dy)))
            .collect();
        support.sort_unstable();
        if support.len() >= 4 {
            faces.push((*f, support));
        }
    }
    (sites, faces)
}

/// Lattice relabelling that turns the d = 3 plaquettes into the Steane rows.
const STEANE_RELABEL: [usize; 7] = [0, 2, 1, 6, 5, 4, 3];

pub fn build_color_code(d: usize) -> Result<StabilizerCode, CodeError> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(CodeError::BadDistance(d));
    }
    let (mut coords, faces) = color_lattice(d);
    let n = coords.len();
    let mut plaquettes: Vec<Plaquette> = faces
        .iter()
        .map(|(c, s)| Plaquette {
            sites: s.clone(),
            color: c.0.rem_euclid(3) as u8,
        })
        .collect();
    if d == 3 {
        let mut relabeled = vec![(0, 0); n];
        for (old, &new) in STEANE_RELABEL.iter().enumerate() {
            relabeled[new] = coords[old];
        }
        coords = relabeled;
        for p in &mut plaquettes {
            p.sites = p.sites.iter().map(|&s| STEANE_RELABEL[s]).collect();
            p.sites.sort_unstable();
        }
        let rows = steane_checks();
        plaquettes.sort_by_key(|p| rows.iter().position(|r| p.sites.iter().all(|&s| r[s] == 1)));
    }
    let checks: Vec<Bits> = plaquettes
        .iter()
        .map(|p| (0..n).map(|i| u8::from(p.sites.contains(&i))).collect())
        .collect();
    let mut code = from_css(&checks, &checks)?;
    code.family = CodeFamily::Color { d };
    code.layout = Layout::Triangular { coords, plaquettes };
    Ok(code)
}

impl StabilizerCode {
    pub fn n_generators(&self) -> usize {
        self.generators.len()
    }

    /// Checks Hermiticity, commutation and logical-operator relations.
    pub fn check(&self) -> Result<(), CodeError> {
        let bad = |m: String| Err(CodeError::Invariant(m));
        if self.generators.len() + 1 != self.n_sites {
            return bad(format!(
                "{} generators for {} sites",
                self.generators.len(),
                self.n_sites
            ));
        }
        for (k, g) in self.generators.iter().enumerate() {
            if !g.is_hermitian() || g.multiply(g) != Mqs::identity() {
                return bad(format!("generator {k} is not a Hermitian involution"));
            }
            for h in &self.generators[k + 1..] {
                if !g.commutes_with(h) {
                    return bad(format!("generator {k} anticommutes with {h}"));
                }
            }
            for l in [&self.logical_gamma, &self.logical_gamma_tilde] {
                if !g.commutes_with(l) {
                    return bad(format!("generator {k} anticommutes with logical {l}"));
                }
            }
        }
        for l in [&self.logical_gamma, &self.logical_gamma_tilde] {
            if l.weight() % 2 == 0 || !l.is_hermitian() {
                return bad(format!("logical {l} must be Hermitian with odd weight"));
            }
        }
        if self.logical_gamma.commutation(&self.logical_gamma_tilde) != Commutation::Anticommutes {
            return bad("logicals commute".into());
        }
        let group = self.group(0);
        if group.rank() != self.generators.len() {
            return bad("generators are dependent".into());
        }
        Ok(())
    }

    /// Copy acting on sites `offset..offset + n_sites`.
    pub fn shifted(&self, offset: usize) -> StabilizerCode {
        let sh = |s: &Mqs| s.relabeled(|i| i + offset, |q| q);
        StabilizerCode {
            generators: self.generators.iter().map(sh).collect(),
            logical_gamma: sh(&self.logical_gamma),
            logical_gamma_tilde: sh(&self.logical_gamma_tilde),
            ..self.clone()
        }
    }

    /// The site range the code acts on, as the largest site index + 1.
    pub fn site_extent(&self) -> usize {
        self.generators
            .iter()
            .chain([&self.logical_gamma, &self.logical_gamma_tilde])
            .map(|s| s.fermion_extent())
            .max()
            .unwrap_or(0)
    }

    pub fn group(&self, n_qubits: usize) -> StabilizerGroup {
        StabilizerGroup::new(&self.generators, self.site_extent(), n_qubits)
    }

    /// One bit per generator, set where the error anticommutes with it.
    pub fn syndrome_of(&self, error: &Mqs) -> Vec<u8> {
        self.generators
            .iter()
            .map(|g| u8::from(!g.commutes_with(error)))
            .collect()
    }

    /// `Zf^L = −iγ̃^Lγ^L`.
    pub fn logical_parity(&self) -> Mqs {
        self.logical_gamma_tilde
            .multiply(&self.logical_gamma)
            .scaled(Phase::MINUS_I)
    }

    /// `c† = (γ^L + iγ̃^L)/2`.
    pub fn logical_creation(&self) -> OperatorSum {
        OperatorSum::from_terms([
            (C64::new(0.5, 0.0), self.logical_gamma.clone()),
            (C64::new(0.0, 0.5), self.logical_gamma_tilde.clone()),
        ])
    }

    pub fn logical_annihilation(&self) -> OperatorSum {
        self.logical_creation().adjoint()
    }

    /// Sign `s` with `∏_i Zf_i = s · Zf^L` on the codespace.
    pub fn transversal_parity_sign(&self) -> Phase {
        let lo = self.site_extent() - self.n_sites;
        let total =
            (lo..lo + self.n_sites).fold(Mqs::identity(), |acc, i| acc.multiply(&Mqs::parity(i)));
        let ratio = total.multiply(&self.logical_parity());
        self.group(0)
            .membership(&ratio)
            .expect("total parity is logical parity times a stabilizer")
    }

    /// γ-type plaquette supports (empty for non-CSS codes).
    pub fn plaquettes(&self) -> &[Plaquette] {
        match &self.layout {
            Layout::Triangular { plaquettes, .. } => plaquettes,
            _ => &[],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_generators_and_logicals() {
        let c = build_repetition(3).unwrap();
        let shown: Vec<String> = c.generators.iter().map(|g| g.to_string()).collect();
        assert_eq!(shown, ["+i * gt0 g1", "+i * gt1 g2"]);
        assert_eq!(c.logical_gamma, Mqs::gamma(0));
        assert_eq!(c.logical_gamma_tilde, Mqs::gamma_tilde(2));
        for n in 2..=8 {
            build_repetition(n).unwrap().check().unwrap();
        }
        assert!(matches!(
            build_repetition(1),
            Err(CodeError::TooFewSites(1))
        ));
    }

    #[test]
    fn steane_from_css() {
        let c = from_css(&steane_checks(), &steane_checks()).unwrap();
        assert_eq!((c.n_sites, c.generators.len()), (7, 6));
        assert_eq!(c.generators[0].to_string(), "-1 * g3 g4 g5 g6");
        assert!(matches!(
            from_css(&[vec![1, 1]], &[vec![1, 1]]),
            Err(CodeError::EvenSites(2))
        ));
    }

    #[test]
    fn color_code_sizes() {
        for (d, n) in [(3, 7), (5, 19), (7, 37)] {
            let c = build_color_code(d).unwrap();
            assert_eq!(c.n_sites, n);
            assert_eq!(n, (3 * d * d + 1) / 4);
        }
        assert!(build_color_code(4).is_err());
        assert!(build_color_code(1).is_err());
    }

    #[test]
    fn color_d3_matches_steane_group() {
        let c = build_color_code(3).unwrap();
        let s = from_css(&steane_checks(), &steane_checks()).unwrap();
        assert!(c.group(0).same_group(&s.group(0)));
    }

    #[test]
    fn self_dual_under_tilde_swap() {
        let c = build_color_code(5).unwrap();
        let grp = c.group(0);
        for g in &c.generators {
            let etas: Vec<usize> = g.majoranas().iter().map(|e| e ^ 1).collect();
            let dual = Mqs::canonicalize(&etas, g.phase());
            assert_eq!(grp.membership(&dual), Some(Phase::ONE));
        }
    }

    #[test]
    fn plaquette_coloring_is_proper() {
        let c = build_color_code(5).unwrap();
        let ps = c.plaquettes();
        for (a, p) in ps.iter().enumerate() {
            for q in &ps[a + 1..] {
                if p.sites.iter().any(|s| q.sites.contains(s)) {
                    assert_ne!(p.color, q.color);
                }
            }
        }
    }

    #[test]
    fn single_majorana_syndromes_distinct_on_steane() {
        let c = build_color_code(3).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for eta in 0..14 {
            let s = c.syndrome_of(&Mqs::canonicalize(&[eta], Phase::ONE));
            assert!(s.contains(&1));
            assert!(seen.insert(s));
        }
    }

    #[test]
    fn transversal_parity_sign_for_n_mod_4() {
        assert_eq!(
            build_color_code(3).unwrap().transversal_parity_sign(),
            Phase::MINUS_ONE
        );
        assert_eq!(
            build_color_code(5).unwrap().transversal_parity_sign(),
            Phase::MINUS_ONE
        );
    }
}
