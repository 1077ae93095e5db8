//! Full-rank Z-lattices in rational ambient space: covolume, dual lattice,
//! subgroup index, canonical bases.
//!
//! Lattices are stored as square rational matrices whose rows span the
//! lattice. Every constructor canonicalizes through the Hermite form of the
//! denominator-cleared basis, so two lattices are equal iff their stored
//! bases are equal. Embedded real-valued lattices (period lattices) live in
//! floating point and are compared with tolerances by their callers; the
//! exact machinery here never mixes with them.

use crate::matrix::{IntMatrix, MatrixError, Rat, RatMatrix};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("lattice basis must be full rank")]
    RankDeficient,
    #[error("pairing form is degenerate")]
    DegeneratePairing,
    #[error("pairing gram matrix is not {0}")]
    WrongSymmetry(&'static str),
    #[error("vector {0:?} of the claimed sublattice is not contained in the superlattice")]
    NotContained(Vec<String>),
    #[error("index computation disagreement: determinant ratio {det} vs elementary divisors {snf}")]
    IndexMismatch { det: BigInt, snf: BigInt },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Canonical row basis of the row span: unique for a given lattice.
pub fn canonical_row_basis(generators: &RatMatrix) -> Result<RatMatrix, LatticeError> {
    let n = generators.ncols();
    if generators.nrows() < n {
        return Err(LatticeError::RankDeficient);
    }
    let (scaled, d) = generators.to_integer_scaled();
    let (h, _) = scaled.hnf();
    let m = h.nrows();
    // Full column rank leaves the basis in the last n rows; everything above
    // must be zero.
    for i in 0..m - n {
        if (0..n).any(|j| !h[(i, j)].is_zero()) {
            return Err(LatticeError::RankDeficient);
        }
    }
    let mut rows = Vec::with_capacity(n);
    let dr = Rat::from_integer(d);
    for k in 0..n {
        let i = m - n + k;
        if h[(i, k)].is_zero() {
            return Err(LatticeError::RankDeficient);
        }
        rows.push((0..n).map(|j| Rat::from_integer(h[(i, j)].clone()) / &dr).collect());
    }
    Ok(RatMatrix::from_rows(rows))
}

/// Is `v` in the Z-span of the rows of `basis`? `basis` must be square and
/// invertible.
pub fn member_of_row_span(basis: &RatMatrix, v: &[Rat]) -> bool {
    let inv = match basis.try_inverse() {
        Ok(m) => m,
        Err(_) => return false,
    };
    inv.mul_row_vec(v).iter().all(Rat::is_integer)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegerLattice {
    basis: RatMatrix,
}

impl IntegerLattice {
    /// Canonicalize a square full-rank basis.
    pub fn new(basis: RatMatrix) -> Result<Self, LatticeError> {
        if basis.nrows() != basis.ncols() {
            return Err(LatticeError::RankDeficient);
        }
        Ok(IntegerLattice { basis: canonical_row_basis(&basis)? })
    }

    /// Canonicalize the span of an (possibly overdetermined) generator list.
    pub fn from_generators(generators: RatMatrix) -> Result<Self, LatticeError> {
        Ok(IntegerLattice { basis: canonical_row_basis(&generators)? })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        member_of_row_span(&self.basis, v)
    }

    pub fn scale(&self, c: &Rat) -> Result<Self, LatticeError> {
        IntegerLattice::new(self.basis.scale(c))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SymmetryKind {
    Symmetric,
    Antisymmetric,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairingForm {
    gram: RatMatrix,
    kind: SymmetryKind,
}

impl PairingForm {
    pub fn symmetric(gram: RatMatrix) -> Result<Self, LatticeError> {
        Self::check(&gram, SymmetryKind::Symmetric)?;
        Ok(PairingForm { gram, kind: SymmetryKind::Symmetric })
    }

    pub fn antisymmetric(gram: RatMatrix) -> Result<Self, LatticeError> {
        Self::check(&gram, SymmetryKind::Antisymmetric)?;
        Ok(PairingForm { gram, kind: SymmetryKind::Antisymmetric })
    }

    fn check(gram: &RatMatrix, kind: SymmetryKind) -> Result<(), LatticeError> {
        let n = gram.nrows();
        for i in 0..n {
            for j in 0..n {
                let ok = match kind {
                    SymmetryKind::Symmetric => gram[(i, j)] == gram[(j, i)],
                    SymmetryKind::Antisymmetric => gram[(i, j)] == -gram[(j, i)].clone(),
                };
                if !ok {
                    return Err(LatticeError::WrongSymmetry(match kind {
                        SymmetryKind::Symmetric => "symmetric",
                        SymmetryKind::Antisymmetric => "antisymmetric",
                    }));
                }
            }
        }
        Ok(())
    }

    pub fn dot(n: usize) -> Self {
        PairingForm { gram: RatMatrix::identity(n), kind: SymmetryKind::Symmetric }
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    pub fn eval(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let gy = self.gram.transpose().mul_row_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }
}

/// `|det(basis)|`, exact.
pub fn covolume(l: &IntegerLattice) -> Rat {
    l.basis.det().abs()
}

/// `{ x : P(x, v) integral for all v in L }`, exact.
///
/// With row-vector convention `P(x, y) = x G y^T`, a basis of the dual is
/// `(G B^T)^{-1}` taken as rows.
pub fn dual(l: &IntegerLattice, p: &PairingForm) -> Result<IntegerLattice, LatticeError> {
    let gbt = p.gram.mul(&l.basis.transpose());
    let d = gbt.try_inverse().map_err(|_| LatticeError::DegeneratePairing)?;
    IntegerLattice::new(d)
}

/// Index of `l_sub` in `l_sup`, with containment checked exactly and the
/// determinant route cross-checked against the Smith elementary divisors.
pub fn index(l_sub: &IntegerLattice, l_sup: &IntegerLattice) -> Result<BigInt, LatticeError> {
    let inv = l_sup.basis.try_inverse().map_err(|_| LatticeError::RankDeficient)?;
    let coords = l_sub.basis.mul(&inv);
    let n = coords.nrows();
    for i in 0..n {
        if coords.row(i).iter().any(|x| !x.is_integer()) {
            let witness = l_sub.basis.row(i).iter().map(|x| x.to_string()).collect();
            return Err(LatticeError::NotContained(witness));
        }
    }
    let c = IntMatrix::from_fn(n, n, |i, j| coords[(i, j)].to_integer());
    let via_det = c.det().abs();
    let via_snf: BigInt =
        c.elementary_divisors().iter().fold(BigInt::from(1), |acc, d| acc * d.abs());
    if via_det != via_snf {
        return Err(LatticeError::IndexMismatch { det: via_det, snf: via_snf });
    }
    Ok(via_det)
}

/// Covolume of a real-embedded lattice given as rows of a square matrix.
pub fn covolume_real(basis: &nalgebra::DMatrix<f64>) -> f64 {
    basis.determinant().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rat, rat_frac};
    use num_traits::One;
    use proptest::prelude::*;

    fn lat(rows: Vec<Vec<i64>>) -> IntegerLattice {
        IntegerLattice::new(RatMatrix::from_rows(
            rows.into_iter().map(|r| r.into_iter().map(rat).collect()).collect(),
        ))
        .unwrap()
    }

    #[test]
    fn covolume_examples() {
        assert_eq!(covolume(&lat(vec![vec![1, 0], vec![0, 1]])), rat(1));
        assert_eq!(covolume(&lat(vec![vec![2, 0], vec![0, 3]])), rat(6));
    }

    #[test]
    fn rank_deficient_rejected() {
        let res = IntegerLattice::new(RatMatrix::from_rows(vec![
            vec![rat(1), rat(2)],
            vec![rat(2), rat(4)],
        ]));
        assert!(res.is_err());
    }

    #[test]
    fn dual_of_zn_is_zn() {
        let l = lat(vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(dual(&l, &PairingForm::dot(2)).unwrap(), l);
    }

    #[test]
    fn dual_of_2z_is_half_z() {
        let l = lat(vec![vec![2]]);
        let d = dual(&l, &PairingForm::dot(1)).unwrap();
        assert_eq!(d.basis()[(0, 0)], rat_frac(1, 2));
        // Dual of dual returns the original lattice exactly.
        assert_eq!(dual(&d, &PairingForm::dot(1)).unwrap(), l);
    }

    #[test]
    fn degenerate_pairing_rejected() {
        let l = lat(vec![vec![1, 0], vec![0, 1]]);
        let g = PairingForm::symmetric(RatMatrix::from_rows(vec![
            vec![rat(1), rat(0)],
            vec![rat(0), rat(0)],
        ]))
        .unwrap();
        assert_eq!(dual(&l, &g).unwrap_err(), LatticeError::DegeneratePairing);
    }

    #[test]
    fn index_examples() {
        let z2 = lat(vec![vec![1, 0], vec![0, 1]]);
        let two_z2 = lat(vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(index(&two_z2, &z2).unwrap(), BigInt::from(4));
        assert_eq!(index(&z2, &z2).unwrap(), BigInt::one());
    }

    #[test]
    fn index_non_containment_names_witness() {
        let l = lat(vec![vec![1, 0], vec![0, 1]]);
        let m = lat(vec![vec![3, 0], vec![0, 3]]);
        match index(&l, &m).unwrap_err() {
            LatticeError::NotContained(w) => assert_eq!(w.len(), 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn pairing_symmetry_validated() {
        let g = RatMatrix::from_rows(vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]]);
        assert!(PairingForm::symmetric(g.clone()).is_ok());
        assert!(PairingForm::antisymmetric(g).is_err());
    }

    proptest! {
        // vol(L) * vol(dual L) = 1 exactly under the dot pairing.
        #[test]
        fn covolume_times_dual_covolume_is_one(
            a in -6i64..=6, b in -6i64..=6, c in -6i64..=6, d in -6i64..=6,
            da in 1i64..=4, db in 1i64..=4,
        ) {
            let m = RatMatrix::from_rows(vec![
                vec![rat_frac(a, da), rat_frac(b, db)],
                vec![rat_frac(c, db), rat_frac(d, da)],
            ]);
            prop_assume!(!m.det().is_zero());
            let l = IntegerLattice::new(m).unwrap();
            let dl = dual(&l, &PairingForm::dot(2)).unwrap();
            prop_assert_eq!(covolume(&l) * covolume(&dl), Rat::one());
            // And dual is an involution.
            prop_assert_eq!(dual(&dl, &PairingForm::dot(2)).unwrap(), l);
        }

        // Covolume is invariant under unimodular basis change.
        #[test]
        fn covolume_unimodular_invariant(
            a in -6i64..=6, b in -6i64..=6, c in -6i64..=6, d in -6i64..=6,
            s in -3i64..=3,
        ) {
            let m = RatMatrix::from_rows(vec![
                vec![rat(a), rat(b)],
                vec![rat(c), rat(d)],
            ]);
            prop_assume!(!m.det().is_zero());
            let u = RatMatrix::from_rows(vec![vec![rat(1), rat(s)], vec![rat(0), rat(1)]]);
            let l1 = IntegerLattice::new(m.clone()).unwrap();
            let l2 = IntegerLattice::new(u.mul(&m)).unwrap();
            prop_assert_eq!(l1.clone(), l2.clone());
            prop_assert_eq!(covolume(&l1), covolume(&l2));
        }
    }
}
