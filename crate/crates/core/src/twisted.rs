//! Quaternionic period lattices `sigma(O_B)(tau, 1)^t`, their Riemann form
//! through `mu`, the covolume identity against `Nm(d_B)`, and the twisted
//! metric comparison.
//!
//! Volume normalization: the Lebesgue covolume of the embedded lattice in
//! `R^{4g}` carries a factor `d_F^2` from the field embedding (the four
//! coordinate slots each contribute `sqrt(d_F)`). All identities below are
//! stated for the normalized covolume `|det| / d_F^2`, which is the product
//! over places of the per-place factors; the raw determinant is kept and
//! cross-checked so the normalization stays visible in reports.

use crate::fixture::Fixture;
use crate::matrix::{Rat, RatMatrix};
use crate::quaternion::{QuatElement, QuatError, QuatOrder, QuaternionAlgebra};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TwistedError {
    #[error("tau must have positive imaginary part at every place")]
    NotUpperHalfPlane,
    #[error("embedded lattice is numerically rank deficient (|det| = {0:.3e})")]
    RankDeficient(f64),
    #[error("Riemann axioms fail: {0}")]
    AxiomFailure(String),
    #[error(transparent)]
    Quat(#[from] QuatError),
}

pub const NUMERIC_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct TwistedPoint {
    taus: Vec<Complex64>,
}

impl TwistedPoint {
    pub fn new(taus: Vec<Complex64>) -> Result<Self, TwistedError> {
        if taus.is_empty() || taus.iter().any(|t| t.im <= 0.0) {
            return Err(TwistedError::NotUpperHalfPlane);
        }
        Ok(TwistedPoint { taus })
    }

    pub fn places(&self) -> usize {
        self.taus.len()
    }

    pub fn tau(&self, i: usize) -> Complex64 {
        self.taus[i]
    }

    pub fn im_product_sq(&self) -> f64 {
        self.taus.iter().map(|t| t.im * t.im).product()
    }
}

/// Seeded sample with `Re` in `[-1, 1]` and `Im` in `[0.2, 2.2]`.
pub fn random_point(places: usize, rng: &mut impl Rng) -> TwistedPoint {
    TwistedPoint::new(
        (0..places)
            .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(0.2..=2.2)))
            .collect(),
    )
    .expect("sampled imaginary parts positive")
}

/// The period lattice of an order at `tau`, embedded in `R^{4g}`.
///
/// Row `u` holds, place by place, the real and imaginary parts of the two
/// complex coordinates of `sigma(beta_u) (tau_i, 1)^t`.
#[derive(Clone, Debug)]
pub struct TwistedLattice {
    basis: DMatrix<f64>,
    raw_covolume: f64,
    d_f: f64,
}

impl TwistedLattice {
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Lebesgue covolume of the embedded basis.
    pub fn raw_covolume(&self) -> f64 {
        self.raw_covolume
    }

    /// Covolume normalized by `d_F^2`: the product-over-places value entering
    /// every metric identity.
    pub fn covolume(&self) -> f64 {
        self.raw_covolume / (self.d_f * self.d_f)
    }
}

/// Splitting data of an order, independent of `tau`: computing the real
/// matrices `sigma_i(beta_u)` involves exact root refinement, so sweeps over
/// many sample points share one family.
#[derive(Clone, Debug)]
pub struct TwistedFamily {
    places: usize,
    /// `split[u][i] = sigma_{i+1}(beta_u)`.
    split: Vec<Vec<nalgebra::Matrix2<f64>>>,
    d_f: f64,
}

impl TwistedFamily {
    pub fn new(
        alg: &QuaternionAlgebra,
        order: &QuatOrder,
        digits: u32,
    ) -> Result<Self, TwistedError> {
        let g = alg.degree();
        let split = order
            .basis()
            .iter()
            .map(|beta| (1..=g).map(|place| alg.split(beta, place, digits)).collect())
            .collect::<Result<Vec<Vec<_>>, _>>()?;
        let d_f = alg.field.discriminant().to_f64().unwrap_or(f64::NAN);
        Ok(TwistedFamily { places: g, split, d_f })
    }

    pub fn places(&self) -> usize {
        self.places
    }

    pub fn lattice_at(&self, tau: &TwistedPoint) -> Result<TwistedLattice, TwistedError> {
        let g = self.places;
        assert_eq!(tau.places(), g, "tau must have one coordinate per real place");
        let n = 4 * g;
        let mut basis = DMatrix::zeros(n, n);
        for (u, mats) in self.split.iter().enumerate() {
            for (i, m) in mats.iter().enumerate() {
                let t = tau.tau(i);
                let z1 = Complex64::new(m[(0, 0)], 0.0) * t + Complex64::new(m[(0, 1)], 0.0);
                let z2 = Complex64::new(m[(1, 0)], 0.0) * t + Complex64::new(m[(1, 1)], 0.0);
                basis[(u, 4 * i)] = z1.re;
                basis[(u, 4 * i + 1)] = z1.im;
                basis[(u, 4 * i + 2)] = z2.re;
                basis[(u, 4 * i + 3)] = z2.im;
            }
        }
        let raw = basis.determinant().abs();
        if raw < 1e-12 {
            return Err(TwistedError::RankDeficient(raw));
        }
        Ok(TwistedLattice { basis, raw_covolume: raw, d_f: self.d_f })
    }
}

pub fn build_twisted_lattice(
    alg: &QuaternionAlgebra,
    order: &QuatOrder,
    tau: &TwistedPoint,
    digits: u32,
) -> Result<TwistedLattice, TwistedError> {
    TwistedFamily::new(alg, order, digits)?.lattice_at(tau)
}

/// Exact Riemann form `E(beta, beta') = Tr_{F/Q}(trd(mu^{-1} beta beta'^*))`.
pub fn riemann_form(
    alg: &QuaternionAlgebra,
    mu: &QuatElement,
    beta: &QuatElement,
    beta2: &QuatElement,
) -> Result<Rat, TwistedError> {
    let mu_inv = alg.inv(mu)?;
    let prod = alg.mul(&mu_inv, &alg.mul(beta, &alg.conj(beta2)));
    Ok(alg.field.trace(&alg.trd(&prod)))
}

/// Gram matrix of the Riemann form on the order basis, exact.
pub fn riemann_gram(
    alg: &QuaternionAlgebra,
    order: &QuatOrder,
    mu: &QuatElement,
) -> Result<RatMatrix, TwistedError> {
    let n = order.basis().len();
    let mut gram = RatMatrix::zeros(n, n);
    for u in 0..n {
        for v in 0..n {
            gram[(u, v)] = riemann_form(alg, mu, &order.basis()[u], &order.basis()[v])?;
        }
    }
    Ok(gram)
}

#[derive(Clone, Debug)]
pub struct TwistedAxiomReport {
    pub min_margin: f64,
    pub max_compat_defect: f64,
    /// True when the positive form is `-E`, i.e. the fixture's `mu` gets
    /// flipped for positivity.
    pub orientation_flipped: bool,
    /// Exactly alternating and integral on the order basis.
    pub integral_on_order: bool,
}

/// Real-bilinear extension of the twisted Riemann form to `C^{2g}` through
/// the lattice embedding.
pub struct TwistedExtendedForm {
    basis_inv: DMatrix<f64>,
    gram: DMatrix<f64>,
    pub sign: f64,
}

impl TwistedExtendedForm {
    pub fn new(
        alg: &QuaternionAlgebra,
        order: &QuatOrder,
        mu: &QuatElement,
        lattice: &TwistedLattice,
    ) -> Result<Self, TwistedError> {
        let gram_exact = riemann_gram(alg, order, mu)?;
        let n = gram_exact.nrows();
        let gram =
            DMatrix::from_fn(n, n, |i, j| gram_exact[(i, j)].to_f64().unwrap_or(f64::NAN));
        let basis_inv = lattice
            .basis()
            .clone()
            .try_inverse()
            .ok_or(TwistedError::RankDeficient(0.0))?;
        Ok(TwistedExtendedForm { basis_inv, gram, sign: 1.0 })
    }

    fn coords(&self, v: &[Complex64]) -> DMatrix<f64> {
        let n = 2 * v.len();
        let real = DMatrix::from_fn(1, n, |_, j| if j % 2 == 0 { v[j / 2].re } else { v[j / 2].im });
        real * &self.basis_inv
    }

    pub fn eval(&self, u: &[Complex64], v: &[Complex64]) -> f64 {
        let cu = self.coords(u);
        let cv = self.coords(v);
        (&cu * &self.gram * cv.transpose())[(0, 0)] * self.sign
    }
}

/// Check alternation and integrality exactly on the order basis, then
/// compatibility (relative defect) and positivity of the extended form on
/// samples, orienting the sign and recording the flip.
pub fn riemann_axioms(
    alg: &QuaternionAlgebra,
    order: &QuatOrder,
    mu: &QuatElement,
    tau: &TwistedPoint,
    samples: usize,
    rng: &mut impl Rng,
    digits: u32,
) -> Result<TwistedAxiomReport, TwistedError> {
    let gram = riemann_gram(alg, order, mu)?;
    let n = gram.nrows();
    let mut integral = true;
    for u in 0..n {
        if !gram[(u, u)].is_zero() {
            return Err(TwistedError::AxiomFailure(format!(
                "E(b{u}, b{u}) = {} is nonzero",
                gram[(u, u)]
            )));
        }
        for v in 0..n {
            if gram[(u, v)] != -gram[(v, u)].clone() {
                return Err(TwistedError::AxiomFailure("form is not alternating".into()));
            }
            if !gram[(u, v)].is_integer() {
                integral = false;
            }
        }
    }
    let lattice = build_twisted_lattice(alg, order, tau, digits)?;
    let form = TwistedExtendedForm::new(alg, order, mu, &lattice)?;
    let dim = 2 * alg.degree();
    let mut margins = Vec::new();
    let mut compat = 0.0f64;
    for _ in 0..samples.max(1) {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        let w: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        let iv: Vec<Complex64> = v.iter().map(|c| Complex64::new(-c.im, c.re)).collect();
        let iw: Vec<Complex64> = w.iter().map(|c| Complex64::new(-c.im, c.re)).collect();
        let a = form.eval(&iv, &iw);
        let b = form.eval(&v, &w);
        // Relative defect, as for the Siegel form: values scale with the
        // lattice-basis inverse.
        compat = compat.max((a - b).abs() / 1f64.max(a.abs()).max(b.abs()));
        if v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-6 {
            margins.push((form.eval(&iv, &v), v));
        }
    }
    if compat > NUMERIC_TOL {
        return Err(TwistedError::AxiomFailure(format!(
            "compatibility defect {compat:.3e} exceeds {NUMERIC_TOL:.1e}"
        )));
    }
    let all_pos = margins.iter().all(|(m, _)| *m > 0.0);
    let all_neg = margins.iter().all(|(m, _)| *m < 0.0);
    if !all_pos && !all_neg {
        let (m, witness) = margins
            .iter()
            .min_by(|(a, _), (b, _)| a.abs().total_cmp(&b.abs()))
            .expect("samples nonempty");
        return Err(TwistedError::AxiomFailure(format!(
            "neither E nor -E is positive: margin {m:.3e} at witness vector {witness:?}"
        )));
    }
    let margins: Vec<f64> = margins.into_iter().map(|(m, _)| m).collect();
    let flipped = all_neg;
    let min_margin =
        margins.iter().map(|&m| if flipped { -m } else { m }).fold(f64::INFINITY, f64::min);
    Ok(TwistedAxiomReport {
        min_margin,
        max_compat_defect: compat,
        orientation_flipped: flipped,
        integral_on_order: integral,
    })
}

#[derive(Clone, Debug)]
pub struct VolumeCheck {
    /// Relative residual of `covolume = Nm(d_B) prod Im(tau_i)^2`.
    pub residual: f64,
    /// Relative residual of the raw determinant against
    /// `d_F^2 Nm(d_B) prod Im(tau_i)^2`.
    pub raw_residual: f64,
    pub covolume: f64,
}

/// Covolume identity for the twisted period lattice.
pub fn verify_volume(
    family: &TwistedFamily,
    d_b_norm: f64,
    tau: &TwistedPoint,
) -> Result<VolumeCheck, TwistedError> {
    let lattice = family.lattice_at(tau)?;
    let expect = d_b_norm * tau.im_product_sq();
    let residual = (lattice.covolume() - expect).abs() / expect;
    let d_f2 = lattice.d_f * lattice.d_f;
    let raw_residual = (lattice.raw_covolume() - d_f2 * expect).abs() / (d_f2 * expect);
    Ok(VolumeCheck { residual, raw_residual, covolume: lattice.covolume() })
}

/// Petersson norm of the dualizing frame: `2^g prod Im(tau_i)`.
pub fn petersson_norm(tau: &TwistedPoint) -> f64 {
    2.0f64.powi(tau.places() as i32) * tau.taus.iter().map(|t| t.im).product::<f64>()
}

/// Squared Faltings norm of the holomorphic frame: normalized covolume over
/// `pi^{2g}`.
pub fn faltings_norm_sq(
    family: &TwistedFamily,
    tau: &TwistedPoint,
) -> Result<f64, TwistedError> {
    let lattice = family.lattice_at(tau)?;
    Ok(lattice.covolume() / PI.powi(2 * tau.places() as i32))
}

/// Relative residual of the twisted metric comparison:
/// `Fal^2 = (Nm(d_B) / |2 pi i|^{2g}) Pet^2`.
pub fn verify_main(
    family: &TwistedFamily,
    d_b_norm: f64,
    tau: &TwistedPoint,
) -> Result<f64, TwistedError> {
    let g = tau.places() as i32;
    let lhs = faltings_norm_sq(family, tau)?;
    let pet = petersson_norm(tau);
    let rhs = d_b_norm / (2.0 * PI).powi(2 * g) * pet * pet;
    Ok((lhs - rhs).abs() / rhs)
}

/// Family of a loaded fixture.
pub fn fixture_family(fx: &Fixture, digits: u32) -> Result<TwistedFamily, TwistedError> {
    TwistedFamily::new(&fx.algebra, &fx.order, digits)
}

pub fn fixture_volume(
    fx: &Fixture,
    tau: &TwistedPoint,
    digits: u32,
) -> Result<VolumeCheck, TwistedError> {
    verify_volume(&fixture_family(fx, digits)?, fx.d_b_norm.to_f64().unwrap(), tau)
}

pub fn fixture_main(fx: &Fixture, tau: &TwistedPoint, digits: u32) -> Result<f64, TwistedError> {
    verify_main(&fixture_family(fx, digits)?, fx.d_b_norm.to_f64().unwrap(), tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::load_builtin;
    use crate::number_field::DEFAULT_DIGITS;
    use crate::sampling::rng_for;

    fn tau_i(g: usize) -> TwistedPoint {
        TwistedPoint::new(vec![Complex64::new(0.0, 1.0); g]).unwrap()
    }

    #[test]
    fn split_lattice_at_i_has_unit_covolume() {
        let fx = load_builtin("split-q").unwrap();
        let l = build_twisted_lattice(&fx.algebra, &fx.order, &tau_i(1), DEFAULT_DIGITS).unwrap();
        assert!((l.covolume() - 1.0).abs() < 1e-12, "covolume {}", l.covolume());
    }

    #[test]
    fn covolume_scales_quartically_in_imaginary_part() {
        let fx = load_builtin("split-q").unwrap();
        let t = 1.9;
        let tau = TwistedPoint::new(vec![Complex64::new(0.0, t)]).unwrap();
        let l = build_twisted_lattice(&fx.algebra, &fx.order, &tau, DEFAULT_DIGITS).unwrap();
        assert!((l.covolume() - t * t).abs() / (t * t) < 1e-12);
    }

    #[test]
    fn division_lattice_at_i_has_covolume_d_b() {
        let fx = load_builtin("division-q").unwrap();
        let l = build_twisted_lattice(&fx.algebra, &fx.order, &tau_i(1), DEFAULT_DIGITS).unwrap();
        assert!((l.covolume() - 6.0).abs() < 1e-10, "covolume {}", l.covolume());
    }

    #[test]
    fn riemann_form_alternating_integral_on_fixtures() {
        for name in ["split-q", "division-q", "real-quadratic"] {
            let fx = load_builtin(name).unwrap();
            let gram = riemann_gram(&fx.algebra, &fx.order, &fx.mu).unwrap();
            let n = gram.nrows();
            for u in 0..n {
                assert!(gram[(u, u)].is_zero(), "{name}: diagonal");
                for v in 0..n {
                    assert_eq!(gram[(u, v)], -gram[(v, u)].clone(), "{name}: alternating");
                    assert!(gram[(u, v)].is_integer(), "{name}: integral at ({u}, {v})");
                }
            }
        }
    }

    #[test]
    fn axioms_hold_on_fixtures() {
        for name in ["split-q", "division-q", "real-quadratic"] {
            let fx = load_builtin(name).unwrap();
            let g = fx.algebra.degree();
            let mut rng = rng_for(31, &format!("test/twisted/axioms/{name}"));
            let tau = random_point(g, &mut rng);
            let rep =
                riemann_axioms(&fx.algebra, &fx.order, &fx.mu, &tau, 60, &mut rng, DEFAULT_DIGITS)
                    .unwrap();
            assert!(rep.min_margin > 0.0, "{name}: margin {}", rep.min_margin);
            assert!(rep.max_compat_defect < 1e-10, "{name}");
            assert!(rep.integral_on_order, "{name}");
        }
    }

    #[test]
    fn negating_mu_flips_orientation() {
        let fx = load_builtin("split-q").unwrap();
        let mut rng = rng_for(37, "test/twisted/flip");
        let tau = tau_i(1);
        let rep1 = riemann_axioms(&fx.algebra, &fx.order, &fx.mu, &tau, 40, &mut rng, 30).unwrap();
        let neg_mu = fx.algebra.neg(&fx.mu);
        let mut rng = rng_for(37, "test/twisted/flip");
        let rep2 =
            riemann_axioms(&fx.algebra, &fx.order, &neg_mu, &tau, 40, &mut rng, 30).unwrap();
        assert_ne!(rep1.orientation_flipped, rep2.orientation_flipped);
        assert!(rep1.min_margin > 0.0 && rep2.min_margin > 0.0);
    }

    #[test]
    fn volume_identity_split_fixture() {
        let fx = load_builtin("split-q").unwrap();
        let check = fixture_volume(&fx, &tau_i(1), DEFAULT_DIGITS).unwrap();
        assert!(check.residual < 1e-12);
        assert!(check.raw_residual < 1e-12);
    }

    #[test]
    fn volume_identity_on_samples() {
        for name in ["division-q", "real-quadratic"] {
            let fx = load_builtin(name).unwrap();
            let family = fixture_family(&fx, DEFAULT_DIGITS).unwrap();
            let d_b = fx.d_b_norm.to_f64().unwrap();
            let g = fx.algebra.degree();
            let mut rng = rng_for(41, &format!("test/twisted/vol/{name}"));
            for _ in 0..50 {
                let tau = random_point(g, &mut rng);
                let check = verify_volume(&family, d_b, &tau).unwrap();
                assert!(check.residual < 1e-10, "{name}: residual {}", check.residual);
                assert!(check.raw_residual < 1e-10, "{name}");
            }
        }
    }

    #[test]
    fn main_identity_closed_form_split() {
        // M2(Z) at tau = i: Fal^2 = 1/pi^2 and the right side matches.
        let fx = load_builtin("split-q").unwrap();
        let family = fixture_family(&fx, DEFAULT_DIGITS).unwrap();
        let lhs = faltings_norm_sq(&family, &tau_i(1)).unwrap();
        assert!((lhs - 1.0 / (PI * PI)).abs() < 1e-12);
        assert!(fixture_main(&fx, &tau_i(1), DEFAULT_DIGITS).unwrap() < 1e-12);
    }

    #[test]
    fn main_identity_on_samples() {
        for name in ["split-q", "division-q", "real-quadratic"] {
            let fx = load_builtin(name).unwrap();
            let family = fixture_family(&fx, DEFAULT_DIGITS).unwrap();
            let d_b = fx.d_b_norm.to_f64().unwrap();
            let g = fx.algebra.degree();
            let mut rng = rng_for(43, &format!("test/twisted/main/{name}"));
            for _ in 0..100 {
                let tau = random_point(g, &mut rng);
                let r = verify_main(&family, d_b, &tau).unwrap();
                assert!(r < 1e-10, "{name}: residual {r}");
            }
        }
    }

    #[test]
    fn scaled_lattices_of_fixtures_are_unimodular() {
        use crate::quaternion::{is_unimodular, scaled_unimodular_lattice};
        for name in ["split-q", "division-q", "real-quadratic"] {
            let fx = load_builtin(name).unwrap();
            let a_pure = fx.scaling_pure.clone().unwrap();
            let scaled = scaled_unimodular_lattice(&fx.algebra, &fx.order, &a_pure).unwrap();
            assert!(is_unimodular(&scaled).unwrap(), "{name}");
        }
    }

    #[test]
    fn bad_tau_rejected() {
        assert_eq!(
            TwistedPoint::new(vec![Complex64::new(0.0, -1.0)]).unwrap_err(),
            TwistedError::NotUpperHalfPlane
        );
    }
}
