//! Linear-inversion state tomography on a small labelled subspace.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::dense::{self, Matrix};
use crate::sim::{SimError, StateVector};
use crate::C64;

#[derive(Debug, Error)]
pub enum TomographyError {
    #[error("settings fix only {rank} of {needed} real parameters")]
    Insufficient { rank: usize, needed: usize },
    #[error("setting {setting} gives {got} populations for a {dim}-label subspace")]
    Shape {
        setting: usize,
        got: usize,
        dim: usize,
    },
    #[error("rotation {0} leaks out of the subspace (weight {1:.3e})")]
    Leaks(usize, f64),
    #[error("rotation {0} is not a pure gate circuit")]
    NotUnitary(usize),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// One measurement setting: the rotation assumed to act on the subspace
/// before a population readout, and the populations seen.
#[derive(Clone, Debug)]
pub struct Setting {
    pub rotation: Matrix,
    pub populations: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixOnSubspace {
    pub labels: Vec<String>,
    /// row-major
    pub matrix: Vec<Vec<C64>>,
}

impl DensityMatrixOnSubspace {
    pub fn to_matrix(&self) -> Matrix {
        let k = self.matrix.len();
        DMatrix::from_fn(k, k, |r, c| self.matrix[r][c])
    }

    pub fn fidelity_with(&self, psi: &[C64]) -> f64 {
        let m = self.to_matrix();
        let v = DVector::from_column_slice(psi);
        (v.adjoint() * m * &v)[(0, 0)].re
    }

    pub fn trace(&self) -> f64 {
        (0..self.matrix.len()).map(|k| self.matrix[k][k].re).sum()
    }
}

/// Hermitian basis: `E_kk`, then `E_rc + E_cr` and `i(E_rc − E_cr)` for `r < c`.
fn hermitian_basis(k: usize) -> Vec<Matrix> {
    let zero = C64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(k * k);
    for d in 0..k {
        let mut m = DMatrix::from_element(k, k, zero);
        m[(d, d)] = C64::new(1.0, 0.0);
        out.push(m);
    }
    for r in 0..k {
        for c in r + 1..k {
            let mut re = DMatrix::from_element(k, k, zero);
            re[(r, c)] = C64::new(1.0, 0.0);
            re[(c, r)] = C64::new(1.0, 0.0);
            out.push(re);
            let mut im = DMatrix::from_element(k, k, zero);
            im[(r, c)] = C64::new(0.0, -1.0);
            im[(c, r)] = C64::new(0.0, 1.0);
            out.push(im);
        }
    }
    out
}

/// Least-squares Hermitian `ρ` with `⟨l|R_s ρ R_s†|l⟩ = p_s[l]`.
pub fn reconstruct(
    labels: &[String],
    settings: &[Setting],
) -> Result<DensityMatrixOnSubspace, TomographyError> {
    let k = labels.len();
    let basis = hermitian_basis(k);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (s, setting) in settings.iter().enumerate() {
        if setting.populations.len() != k || setting.rotation.nrows() != k {
            return Err(TomographyError::Shape {
                setting: s,
                got: setting.populations.len(),
                dim: k,
            });
        }
        let images: Vec<Matrix> = basis
            .iter()
            .map(|b| &setting.rotation * b * setting.rotation.adjoint())
            .collect();
        for (l, p) in setting.populations.iter().enumerate() {
            rows.push(images.iter().map(|m| m[(l, l)].re).collect::<Vec<f64>>());
            rhs.push(*p);
        }
    }
    let a = DMatrix::from_fn(rows.len(), k * k, |r, c| rows[r][c]);
    let svd = a.svd(true, true);
    let rank = svd.rank(1e-9);
    if rank < k * k {
        return Err(TomographyError::Insufficient {
            rank,
            needed: k * k,
        });
    }
    let x = svd
        .solve(&DVector::from_vec(rhs), 1e-12)
        .expect("both factors computed");
    let rho = basis.iter().zip(x.iter()).fold(
        DMatrix::from_element(k, k, C64::new(0.0, 0.0)),
        |acc, (b, w)| acc + b * C64::new(*w, 0.0),
    );
    Ok(DensityMatrixOnSubspace {
        labels: labels.to_vec(),
        matrix: (0..k)
            .map(|r| (0..k).map(|c| rho[(r, c)]).collect())
            .collect(),
    })
}

fn label_of(state: &StateVector, idx: usize) -> String {
    let regs = state.registers();
    let mut s = String::new();
    for q in 0..regs.n_qubits {
        s.push(char::from(b'0' + state.qubit_bit(idx, q)));
    }
    for f in 0..regs.n_fermions {
        s.push(char::from(b'0' + state.fermion_bit(idx, f)));
    }
    s
}

/// Runs `prepare` from the vacuum, then each rotation, and reconstructs the
/// state on the basis indices `subspace`. The rotation each setting is
/// assumed to perform is its exact unitary restricted to the subspace.
pub fn subspace_tomography(
    prepare: &Circuit,
    rotations: &[Circuit],
    subspace: &[usize],
) -> Result<DensityMatrixOnSubspace, TomographyError> {
    let mut base = StateVector::vacuum(&prepare.registers);
    base.apply_circuit(prepare)?;
    let labels: Vec<String> = subspace.iter().map(|&i| label_of(&base, i)).collect();
    let mut settings = Vec::new();
    for (s, rot) in rotations.iter().enumerate() {
        let u = dense::circuit_unitary(rot).ok_or(TomographyError::NotUnitary(s))?;
        let restricted = DMatrix::from_fn(subspace.len(), subspace.len(), |r, c| {
            u[(subspace[r], subspace[c])]
        });
        let leak = subspace
            .iter()
            .map(|&c| 1.0 - subspace.iter().map(|&r| u[(r, c)].norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max);
        if leak > 1e-9 {
            return Err(TomographyError::Leaks(s, leak));
        }
        let mut st = base.clone();
        st.apply_circuit(rot)?;
        let populations = subspace
            .iter()
            .map(|&i| st.amplitudes()[i].norm_sqr())
            .collect();
        settings.push(Setting {
            rotation: restricted,
            populations,
        });
    }
    reconstruct(&labels, &settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, Registers};

    fn two_mode_subspace(regs: &Registers) -> Vec<usize> {
        let probe = StateVector::vacuum(regs);
        let find = |b: u8| {
            (0..dense::dim(regs))
                .find(|&x| probe.fermion_bit(x, 0) == b && probe.fermion_bit(x, 1) == b)
                .unwrap()
        };
        vec![find(0), find(1)]
    }

    fn settings(regs: &Registers) -> Vec<Circuit> {
        let none = Circuit::new(regs.clone());
        let mut a = Circuit::new(regs.clone());
        a.gate(Gate::Braid { i: 0, j: 1 });
        let mut b = Circuit::new(regs.clone());
        b.gate(Gate::Sf { f: 0 }).gate(Gate::Braid { i: 0, j: 1 });
        vec![none, a, b]
    }

    #[test]
    fn vacuum_reconstructs_to_its_projector() {
        let regs = Registers::new(0, 2);
        let rho = subspace_tomography(
            &Circuit::new(regs.clone()),
            &settings(&regs),
            &two_mode_subspace(&regs),
        )
        .unwrap();
        assert_eq!(rho.labels, vec!["00", "11"]);
        assert!((rho.matrix[0][0].re - 1.0).abs() < 1e-9);
        assert!(rho.matrix[1][1].norm() < 1e-9 && rho.matrix[0][1].norm() < 1e-9);
    }

    #[test]
    fn reconstruction_matches_projection() {
        let regs = Registers::new(0, 2);
        let mut prep = Circuit::new(regs.clone());
        prep.gate(Gate::BraidAngle {
            i: 0,
            j: 1,
            angle: crate::circuit::Angle::radians(0.7),
        })
        .gate(Gate::Tf { f: 1 });
        let sub = two_mode_subspace(&regs);
        let rho = subspace_tomography(&prep, &settings(&regs), &sub).unwrap();
        let mut s = StateVector::vacuum(&regs);
        s.apply_circuit(&prep).unwrap();
        let a = s.amplitudes();
        for r in 0..2 {
            for c in 0..2 {
                assert!((rho.matrix[r][c] - a[sub[r]] * a[sub[c]].conj()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn one_setting_is_not_enough() {
        let regs = Registers::new(0, 2);
        let r = subspace_tomography(
            &Circuit::new(regs.clone()),
            &settings(&regs)[..1],
            &two_mode_subspace(&regs),
        );
        assert!(matches!(r, Err(TomographyError::Insufficient { .. })));
    }
}
