//! Linear algebra over GF(2) on 0/1 byte vectors, plus the binary picture of
//! Majorana-qubit strings used for stabilizer-group bookkeeping.

use crate::majorana::{MajoranaQubitString as Mqs, OperatorSum, Pauli, Phase};

pub type Bits = Vec<u8>;

/// Rank of a set of equal-length rows.
pub fn rank(rows: &[Bits]) -> usize {
    let mut m: Vec<Bits> = rows.to_vec();
    let width = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..m.len()).find(|&k| m[k][col] == 1) else {
            continue;
        };
        m.swap(r, p);
        for k in 0..m.len() {
            if k != r && m[k][col] == 1 {
                let pivot = m[r].clone();
                xor_into(&mut m[k], &pivot);
            }
        }
        r += 1;
    }
    r
}

pub fn xor_into(a: &mut [u8], b: &[u8]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

pub fn dot(a: &[u8], b: &[u8]) -> u8 {
    a.iter().zip(b).fold(0, |acc, (x, y)| acc ^ (x & y))
}

/// Finds `x` with `Σ_k x_k columns[k] = target`, if one exists.
pub fn solve(columns: &[Bits], target: &[u8]) -> Option<Bits> {
    let n = columns.len();
    let h = target.len();
    // augmented rows: [A | t]
    let mut rows: Vec<Bits> = (0..h)
        .map(|i| {
            let mut r: Bits = columns.iter().map(|c| c[i]).collect();
            r.push(target[i]);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..h).find(|&k| rows[k][col] == 1) else {
            continue;
        };
        rows.swap(r, p);
        for k in 0..h {
            if k != r && rows[k][col] == 1 {
                let pivot = rows[r].clone();
                xor_into(&mut rows[k], &pivot);
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[n] == 1) {
        return None;
    }
    let mut x = vec![0u8; n];
    for (k, &col) in pivots.iter().enumerate() {
        x[col] = rows[k][n];
    }
    Some(x)
}

/// Majorana bits (2 per site) followed by qubit (x, z) bits.
pub fn string_bits(s: &Mqs, n_sites: usize, n_qubits: usize) -> Bits {
    let mut b = vec![0u8; 2 * n_sites + 2 * n_qubits];
    for &eta in s.majoranas() {
        b[eta] ^= 1;
    }
    for (&q, &l) in s.paulis() {
        let (x, z) = match l {
            Pauli::X => (1, 0),
            Pauli::Y => (1, 1),
            Pauli::Z => (0, 1),
        };
        b[2 * n_sites + 2 * q] ^= x;
        b[2 * n_sites + 2 * q + 1] ^= z;
    }
    b
}

/// Abelian group generated by commuting Hermitian strings, kept in reduced
/// row-echelon form so every string has a unique representative modulo it.
#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    n_sites: usize,
    n_qubits: usize,
    rows: Vec<(usize, Bits, Mqs)>,
}

impl StabilizerGroup {
    pub fn new(generators: &[Mqs], n_sites: usize, n_qubits: usize) -> Self {
        let mut g = Self {
            n_sites,
            n_qubits,
            rows: Vec::new(),
        };
        for s in generators {
            g.insert(s);
        }
        g
    }

    fn insert(&mut self, s: &Mqs) {
        let (bits, s) = self.reduce_bits(s);
        let Some(pivot) = bits.iter().position(|&b| b == 1) else {
            return;
        };
        for (_, rb, rs) in &mut self.rows {
            if rb[pivot] == 1 {
                xor_into(rb, &bits);
                *rs = rs.multiply(&s);
            }
        }
        self.rows.push((pivot, bits, s));
    }

    fn reduce_bits(&self, s: &Mqs) -> (Bits, Mqs) {
        let mut bits = string_bits(s, self.n_sites, self.n_qubits);
        let mut s = s.clone();
        for (p, rb, rs) in &self.rows {
            if bits[*p] == 1 {
                xor_into(&mut bits, rb);
                s = s.multiply(rs);
            }
        }
        (bits, s)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Representative of `s` acting identically on the +1 eigenspace.
    pub fn reduce(&self, s: &Mqs) -> Mqs {
        self.reduce_bits(s).1
    }

    /// The sign with which `s` lies in the group, if it does.
    pub fn membership(&self, s: &Mqs) -> Option<Phase> {
        let r = self.reduce(s);
        r.is_identity_up_to_phase().then(|| r.phase())
    }

    pub fn reduce_sum(&self, o: &OperatorSum) -> OperatorSum {
        OperatorSum::from_terms(o.terms().iter().map(|(c, s)| {
            let r = self.reduce(s);
            (*c * r.phase().to_complex(), r.with_phase(Phase::ONE))
        }))
    }

    /// Whether two operators agree on the common +1 eigenspace.
    pub fn equivalent(&self, a: &OperatorSum, b: &OperatorSum) -> f64 {
        self.reduce_sum(a).max_abs_diff(&self.reduce_sum(b))
    }

    pub fn same_group(&self, other: &StabilizerGroup) -> bool {
        self.rank() == other.rank()
            && other
                .rows
                .iter()
                .all(|(_, _, s)| self.membership(s) == Some(Phase::ONE))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_rank() {
        let cols = vec![vec![1, 0, 1], vec![0, 1, 1]];
        assert_eq!(solve(&cols, &[1, 1, 0]), Some(vec![1, 1]));
        assert_eq!(solve(&cols, &[1, 0, 0]), None);
        assert_eq!(rank(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]), 2);
    }

    #[test]
    fn membership_tracks_sign() {
        let g: Mqs = "+i * gt0 g1".parse().unwrap();
        let grp = StabilizerGroup::new(std::slice::from_ref(&g), 2, 0);
        assert_eq!(grp.membership(&g), Some(Phase::ONE));
        assert_eq!(
            grp.membership(&g.scaled(Phase::MINUS_ONE)),
            Some(Phase::MINUS_ONE)
        );
        assert_eq!(grp.membership(&Mqs::gamma(0)), None);
        // γ̃0 and iγ1 agree on the codespace
        let a = Mqs::gamma_tilde(0);
        let b = Mqs::gamma(1).scaled(Phase::I);
        let sa = OperatorSum::from_string(a);
        let sb = OperatorSum::from_string(b);
        assert!(grp.equivalent(&sa, &sb) < 1e-12);
    }
}
