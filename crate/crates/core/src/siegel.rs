//! Siegel upper half space, period lattices, Riemann form, and the
//! Faltings/Petersson metric comparison.
//!
//! Points carry one symmetric complex `r x r` block per real place of the
//! base field; all metric quantities are products over places, and the
//! period lattice of each place is embedded in `R^{2r}` for the covolume
//! cross-check. The integer Riemann form on lattice coordinates
//! `(alpha, beta)` is `E = -alpha . beta' + alpha' . beta`; its positive
//! orientation (the sign with positive associated Hermitian form) is
//! determined at check time and recorded, not silently substituted.

use nalgebra::{Cholesky, DMatrix};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SiegelError {
    #[error("matrix block {0} is not symmetric")]
    NotSymmetric(usize),
    #[error("imaginary part of block {0} is not positive definite")]
    NotPositiveDefinite(usize),
    #[error("matrix is not symplectic: |M^T J M - J| = {0:.3e}")]
    NotSymplectic(f64),
    #[error("CZ + D is singular at place {0}")]
    SingularDenominator(usize),
    #[error("Riemann axioms fail: {0}")]
    AxiomFailure(String),
    #[error("covolume cross-check residual {0:.3e} exceeds tolerance: embedded basis disagrees with det Y")]
    CovolumeMismatch(f64),
}

pub const NUMERIC_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SiegelPoint {
    blocks: Vec<DMatrix<Complex64>>,
}

impl SiegelPoint {
    pub fn new(blocks: Vec<DMatrix<Complex64>>) -> Result<Self, SiegelError> {
        assert!(!blocks.is_empty());
        let r = blocks[0].nrows();
        for (idx, z) in blocks.iter().enumerate() {
            assert_eq!(z.nrows(), r);
            assert_eq!(z.ncols(), r);
            let defect = (z - z.transpose()).iter().map(|c| c.norm()).fold(0.0, f64::max);
            if defect > NUMERIC_TOL {
                return Err(SiegelError::NotSymmetric(idx));
            }
            let y = z.map(|c| c.im);
            if Cholesky::new(symmetrize(&y)).is_none() {
                return Err(SiegelError::NotPositiveDefinite(idx));
            }
        }
        Ok(SiegelPoint { blocks })
    }

    pub fn r(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn places(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> &DMatrix<Complex64> {
        &self.blocks[i]
    }

    pub fn x_block(&self, i: usize) -> DMatrix<f64> {
        self.blocks[i].map(|c| c.re)
    }

    pub fn y_block(&self, i: usize) -> DMatrix<f64> {
        self.blocks[i].map(|c| c.im)
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// `i I_r` at every place.
pub fn diagonal_point(r: usize, places: usize) -> SiegelPoint {
    let block = DMatrix::from_fn(r, r, |i, j| {
        if i == j { Complex64::new(0.0, 1.0) } else { Complex64::zero() }
    });
    SiegelPoint::new(vec![block; places]).expect("iI is a Siegel point")
}

/// Seeded sample: `Y = M M^T + eps I` with entries of `M` uniform in
/// `[-1, 1]`, `eps = 1e-3`; `X` random symmetric with entries in `[-1, 1]`.
pub fn random_point(r: usize, places: usize, rng: &mut impl Rng) -> SiegelPoint {
    random_point_conditioned(r, places, 1e-3, rng)
}

/// Same sampler with an explicit ridge. The metric identities are
/// scale-free, so sweeps use the small default ridge; absolute-defect checks
/// (the antilinear-part identity) sample with a larger one to keep
/// `Y^{-1}` well conditioned.
pub fn random_point_conditioned(
    r: usize,
    places: usize,
    eps: f64,
    rng: &mut impl Rng,
) -> SiegelPoint {
    let blocks = (0..places)
        .map(|_| {
            let m = DMatrix::from_fn(r, r, |_, _| rng.gen_range(-1.0..=1.0));
            let y = &m * m.transpose() + DMatrix::identity(r, r) * eps;
            let mut x = DMatrix::zeros(r, r);
            for i in 0..r {
                for j in 0..=i {
                    let v = rng.gen_range(-1.0..=1.0);
                    x[(i, j)] = v;
                    x[(j, i)] = v;
                }
            }
            DMatrix::from_fn(r, r, |i, j| Complex64::new(x[(i, j)], y[(i, j)]))
        })
        .collect();
    SiegelPoint::new(blocks).expect("construction yields symmetric PD imaginary part")
}

#[derive(Clone, Debug)]
pub struct SymplecticMatrix {
    m: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self, SiegelError> {
        let n = m.nrows();
        assert_eq!(n % 2, 0);
        assert_eq!(m.ncols(), n);
        let j = standard_j(n / 2);
        let defect = (m.transpose() * &j * &m - &j).abs().max();
        if defect > NUMERIC_TOL {
            return Err(SiegelError::NotSymplectic(defect));
        }
        Ok(SymplecticMatrix { m })
    }

    pub fn identity(r: usize) -> Self {
        SymplecticMatrix { m: DMatrix::identity(2 * r, 2 * r) }
    }

    /// The involution `[[0, I], [-I, 0]]`.
    pub fn inversion(r: usize) -> Self {
        let mut m = DMatrix::zeros(2 * r, 2 * r);
        for i in 0..r {
            m[(i, r + i)] = 1.0;
            m[(r + i, i)] = -1.0;
        }
        SymplecticMatrix { m }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix { m: &self.m * &other.m }
    }

    fn abcd(&self, r: usize) -> [DMatrix<f64>; 4] {
        let sub = |ri: usize, ci: usize| DMatrix::from_fn(r, r, |i, j| self.m[(ri + i, ci + j)]);
        [sub(0, 0), sub(0, r), sub(r, 0), sub(r, r)]
    }
}

pub fn standard_j(r: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * r, 2 * r);
    for i in 0..r {
        j[(i, r + i)] = 1.0;
        j[(r + i, i)] = -1.0;
    }
    j
}

/// Random symplectic matrix from the generators
/// `[[A, 0], [0, A^{-T}]] [[I, B], [0, I]] [[I, 0], [C, I]]` with `B`, `C`
/// symmetric.
pub fn random_symplectic(r: usize, rng: &mut impl Rng) -> SymplecticMatrix {
    let a = loop {
        let cand: DMatrix<f64> = DMatrix::from_fn(r, r, |_, _| rng.gen_range(-1.0..=1.0));
        if cand.determinant().abs() > 0.2 {
            break cand;
        }
    };
    let mut sym = |_: ()| {
        let mut b = DMatrix::zeros(r, r);
        for i in 0..r {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..=1.0);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        b
    };
    let b = sym(());
    let c = sym(());
    let a_inv_t = a.clone().try_inverse().expect("det bounded away from zero").transpose();
    let n = 2 * r;
    let mut d_block = DMatrix::zeros(n, n);
    let mut s_block = DMatrix::identity(n, n);
    let mut t_block = DMatrix::identity(n, n);
    for i in 0..r {
        for j in 0..r {
            d_block[(i, j)] = a[(i, j)];
            d_block[(r + i, r + j)] = a_inv_t[(i, j)];
            s_block[(i, r + j)] = b[(i, j)];
            t_block[(r + i, j)] = c[(i, j)];
        }
    }
    SymplecticMatrix::new(d_block * s_block * t_block).expect("generator product is symplectic")
}

/// Fractional-linear action `(AZ + B)(CZ + D)^{-1}` on one place's block.
pub fn act(
    gamma: &SymplecticMatrix,
    z: &SiegelPoint,
    place: usize,
) -> Result<SiegelPoint, SiegelError> {
    let r = z.r();
    let [a, b, c, d] = gamma.abcd(r);
    let cx = |m: &DMatrix<f64>| m.map(|v| Complex64::new(v, 0.0));
    let zb = z.block(place);
    let num = cx(&a) * zb + cx(&b);
    let den = cx(&c) * zb + cx(&d);
    let den_inv = den.try_inverse().ok_or(SiegelError::SingularDenominator(place))?;
    let mut blocks = z.blocks.clone();
    blocks[place] = num * den_inv;
    SiegelPoint::new(blocks)
}

/// The integer Riemann form on lattice coordinates:
/// `E((alpha, beta), (alpha', beta')) = -alpha . beta' + alpha' . beta`.
pub fn riemann_form(theta1: &[BigInt], theta2: &[BigInt]) -> BigInt {
    let r = theta1.len() / 2;
    assert_eq!(theta1.len(), 2 * r);
    assert_eq!(theta2.len(), 2 * r);
    let mut acc = BigInt::zero();
    for k in 0..r {
        acc -= &theta1[k] * &theta2[r + k];
        acc += &theta2[k] * &theta1[r + k];
    }
    acc
}

/// Gram matrix of the Riemann form on the standard basis of `Z^{2r}`.
pub fn riemann_gram(r: usize) -> crate::matrix::IntMatrix {
    crate::matrix::IntMatrix::from_fn(2 * r, 2 * r, |i, j| {
        let e = |t: usize| {
            (0..2 * r).map(|s| if s == t { BigInt::from(1) } else { BigInt::zero() }).collect::<Vec<_>>()
        };
        riemann_form(&e(i), &e(j))
    })
}

/// Real lattice coordinates `(alpha, beta)` of `v in C^r` with respect to
/// `Lambda_Z (x) R`: `v = alpha Z + beta`.
pub fn lattice_coords(
    x: &DMatrix<f64>,
    y_inv: &DMatrix<f64>,
    v: &[Complex64],
) -> (Vec<f64>, Vec<f64>) {
    let r = v.len();
    let im = DMatrix::from_fn(1, r, |_, j| v[j].im);
    let re = DMatrix::from_fn(1, r, |_, j| v[j].re);
    let alpha = &im * y_inv;
    let beta = &re - &alpha * x;
    ((0..r).map(|j| alpha[(0, j)]).collect(), (0..r).map(|j| beta[(0, j)]).collect())
}

/// Real-bilinear extension of the Riemann form to `C^r` at one place.
pub struct ExtendedForm {
    x: DMatrix<f64>,
    y_inv: DMatrix<f64>,
    /// +1 for the displayed form, -1 when the positive orientation is `-E`.
    pub sign: f64,
}

impl ExtendedForm {
    pub fn new(z: &SiegelPoint, place: usize) -> Self {
        let x = z.x_block(place);
        let y_inv = z.y_block(place).try_inverse().expect("Y positive definite");
        ExtendedForm { x, y_inv, sign: 1.0 }
    }

    pub fn eval(&self, u: &[Complex64], v: &[Complex64]) -> f64 {
        let (au, bu) = lattice_coords(&self.x, &self.y_inv, u);
        let (av, bv) = lattice_coords(&self.x, &self.y_inv, v);
        let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(a, b)| a * b).sum::<f64>();
        self.sign * (-dot(&au, &bv) + dot(&av, &bu))
    }
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub min_margin: f64,
    pub max_compat_defect: f64,
    /// True when the positive Hermitian form belongs to `-E` rather than the
    /// displayed `E`.
    pub orientation_flipped: bool,
}

/// Check `E(ix, iy) = E(x, y)` (relative defect) and positivity of
/// `E(ix, x)` on random samples, orienting the sign of `E` so the margin is
/// positive and recording the flip.
pub fn riemann_axioms(
    z: &SiegelPoint,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<AxiomReport, SiegelError> {
    let r = z.r();
    let mut raw_margins: Vec<(f64, Vec<Complex64>)> = Vec::new();
    let mut compat = 0.0f64;
    for place in 0..z.places() {
        let form = ExtendedForm::new(z, place);
        for _ in 0..samples.max(1) {
            let v: Vec<Complex64> = (0..r)
                .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect();
            let w: Vec<Complex64> = (0..r)
                .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect();
            let iv: Vec<Complex64> = v.iter().map(|c| Complex64::new(-c.im, c.re)).collect();
            let iw: Vec<Complex64> = w.iter().map(|c| Complex64::new(-c.im, c.re)).collect();
            let a = form.eval(&iv, &iw);
            let b = form.eval(&v, &w);
            // Relative defect: the form values scale with |Y^{-1}|, so the
            // comparison follows the relative-tolerance convention for
            // real-valued lattice data.
            compat = compat.max((a - b).abs() / 1f64.max(a.abs()).max(b.abs()));
            let norm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            if norm2 > 1e-6 {
                raw_margins.push((form.eval(&iv, &v), v));
            }
        }
    }
    if compat > NUMERIC_TOL {
        return Err(SiegelError::AxiomFailure(format!(
            "compatibility defect {compat:.3e} exceeds {NUMERIC_TOL:.1e}"
        )));
    }
    let all_pos = raw_margins.iter().all(|(m, _)| *m > 0.0);
    let all_neg = raw_margins.iter().all(|(m, _)| *m < 0.0);
    if !all_pos && !all_neg {
        let (m, witness) = raw_margins
            .iter()
            .min_by(|(a, _), (b, _)| a.abs().total_cmp(&b.abs()))
            .expect("samples nonempty");
        return Err(SiegelError::AxiomFailure(format!(
            "neither E nor -E is positive: margin {m:.3e} at witness vector {witness:?}"
        )));
    }
    let raw_margins: Vec<f64> = raw_margins.into_iter().map(|(m, _)| m).collect();
    let flipped = all_neg;
    let min_margin = raw_margins
        .iter()
        .map(|&m| if flipped { -m } else { m })
        .fold(f64::INFINITY, f64::min);
    Ok(AxiomReport { min_margin, max_compat_defect: compat, orientation_flipped: flipped })
}

/// Rows of the embedded period lattice of one place in `R^{2r}`: the rows of
/// `Z`, then the standard vectors.
pub fn embedded_period_lattice(z: &SiegelPoint, place: usize) -> DMatrix<f64> {
    let r = z.r();
    let zb = z.block(place);
    DMatrix::from_fn(2 * r, 2 * r, |i, j| {
        if i < r {
            if j < r {
                zb[(i, j)].re
            } else {
                zb[(i, j - r)].im
            }
        } else if j == i - r {
            1.0
        } else {
            0.0
        }
    })
}

#[derive(Clone, Debug)]
pub struct FaltingsValue {
    /// `prod_i det(Y_i) / pi^{g r}`.
    pub value: f64,
    /// The same quantity through the embedded-lattice covolume.
    pub covolume_route: f64,
    pub residual: f64,
}

/// Squared Faltings norm of the canonical holomorphic frame, with the
/// determinant and covolume routes cross-checked.
pub fn faltings_norm_sq(z: &SiegelPoint) -> Result<FaltingsValue, SiegelError> {
    let r = z.r();
    let g = z.places();
    let mut dets = 1.0;
    let mut covols = 1.0;
    for place in 0..g {
        dets *= z.y_block(place).determinant();
        covols *= crate::lattice::covolume_real(&embedded_period_lattice(z, place));
    }
    let value = dets / PI.powi((g * r) as i32);
    let covolume_route =
        2.0f64.powi((g * r) as i32) / (2.0 * PI).powi((g * r) as i32) * covols;
    let residual = (value - covolume_route).abs() / value.abs();
    if residual > NUMERIC_TOL {
        return Err(SiegelError::CovolumeMismatch(residual));
    }
    Ok(FaltingsValue { value, covolume_route, residual })
}

/// Petersson norm of the dualizing frame:
/// `2^{g r (r+1) / 2} prod_i det(Y_i)^{(r+1)/2}`.
pub fn petersson_norm(z: &SiegelPoint) -> f64 {
    let r = z.r() as f64;
    let g = z.places() as f64;
    let mut prod = 1.0;
    for place in 0..z.places() {
        prod *= z.y_block(place).determinant().powf((r + 1.0) / 2.0);
    }
    2.0f64.powf(g * r * (r + 1.0) / 2.0) * prod
}

/// Relative residual of the metric comparison: the Faltings norm of the
/// `(r+1)`-st tensor power of the holomorphic frame against
/// `|2 pi i|^{-g r (r+1)/2}` times the Petersson norm.
pub fn verify_main(z: &SiegelPoint) -> Result<f64, SiegelError> {
    let r = z.r() as f64;
    let g = z.places() as f64;
    let fal = faltings_norm_sq(z)?;
    let lhs = fal.value.powf((r + 1.0) / 2.0);
    let rhs = (2.0 * PI).powf(-g * r * (r + 1.0) / 2.0) * petersson_norm(z);
    Ok((lhs - rhs).abs() / rhs)
}
