//! Quaternion algebras `(a, b / F)` over a totally real field: exact ring
//! arithmetic, canonical and twisted involutions, orders, reduced
//! discriminants, and archimedean splittings into `M_2(R)`.
//!
//! Conventions: elements are written `x + y i + z j + w k` with `i^2 = a`,
//! `j^2 = b`, `ij = -ji = k`. The ambient rational coordinate space for
//! lattice work is `Q^{4g}`, a quaternion coordinate slot (one of `1, i, j,
//! k`) major, integral-basis coordinates of the field minor.

use crate::lattice::{self, IntegerLattice, LatticeError, PairingForm};
use crate::matrix::{Rat, RatMatrix};
use crate::number_field::{FieldElement, FieldError, FractionalIdeal, TotallyRealField};
use nalgebra::Matrix2;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuatError {
    #[error("structure constants a, b must be nonzero")]
    ZeroStructureConstant,
    #[error("algebra is not split at place {0}: both a and b are negative there")]
    NotSplitAtPlace(usize),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("mu^2 is not in the base field")]
    MuSquareNotInField,
    #[error("mu^2 is not totally negative")]
    MuSquareNotTotallyNegative,
    #[error("element is not a pure quaternion")]
    NotPure,
    #[error("order basis must have 4g elements of full rank")]
    OrderRank,
    #[error("order does not contain 1")]
    OrderMissingOne,
    #[error("order is not closed under multiplication: basis product {0} x {1} escapes the lattice")]
    OrderNotClosed(usize, usize),
    #[error("order data inconsistent: trace gram determinant is not a perfect square under the declared normalization")]
    DiscriminantNotSquare,
    #[error("pairing values are all zero")]
    DegenerateScaling,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuatElement {
    pub coords: [FieldElement; 4],
}

#[derive(Clone, Debug)]
pub struct QuaternionAlgebra {
    pub field: TotallyRealField,
    a: FieldElement,
    b: FieldElement,
}

impl QuaternionAlgebra {
    pub fn new(
        field: TotallyRealField,
        a: FieldElement,
        b: FieldElement,
    ) -> Result<Self, QuatError> {
        if field.is_zero(&a) || field.is_zero(&b) {
            return Err(QuatError::ZeroStructureConstant);
        }
        Ok(QuaternionAlgebra { field, a, b })
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn element(&self, coords: [FieldElement; 4]) -> QuatElement {
        QuatElement { coords }
    }

    pub fn zero(&self) -> QuatElement {
        QuatElement { coords: std::array::from_fn(|_| self.field.zero()) }
    }

    pub fn one(&self) -> QuatElement {
        let mut e = self.zero();
        e.coords[0] = self.field.one();
        e
    }

    /// Basis unit `1, i, j, k` for `slot = 0..4`.
    pub fn unit(&self, slot: usize) -> QuatElement {
        let mut e = self.zero();
        e.coords[slot] = self.field.one();
        e
    }

    pub fn scalar(&self, x: &FieldElement) -> QuatElement {
        let mut e = self.zero();
        e.coords[0] = x.clone();
        e
    }

    pub fn is_zero(&self, q: &QuatElement) -> bool {
        q.coords.iter().all(|c| self.field.is_zero(c))
    }

    pub fn add(&self, p: &QuatElement, q: &QuatElement) -> QuatElement {
        QuatElement {
            coords: std::array::from_fn(|s| self.field.add(&p.coords[s], &q.coords[s])),
        }
    }

    pub fn sub(&self, p: &QuatElement, q: &QuatElement) -> QuatElement {
        QuatElement {
            coords: std::array::from_fn(|s| self.field.sub(&p.coords[s], &q.coords[s])),
        }
    }

    pub fn neg(&self, q: &QuatElement) -> QuatElement {
        QuatElement { coords: std::array::from_fn(|s| self.field.neg(&q.coords[s])) }
    }

    pub fn scale(&self, q: &QuatElement, c: &FieldElement) -> QuatElement {
        QuatElement { coords: std::array::from_fn(|s| self.field.mul(&q.coords[s], c)) }
    }

    pub fn mul(&self, p: &QuatElement, q: &QuatElement) -> QuatElement {
        let f = &self.field;
        let (x1, y1, z1, w1) = (&p.coords[0], &p.coords[1], &p.coords[2], &p.coords[3]);
        let (x2, y2, z2, w2) = (&q.coords[0], &q.coords[1], &q.coords[2], &q.coords[3]);
        let a = &self.a;
        let b = &self.b;
        let ab = f.mul(a, b);
        let x = f.sub(
            &f.add(&f.mul(x1, x2), &f.mul(a, &f.mul(y1, y2))),
            &f.sub(&f.mul(&ab, &f.mul(w1, w2)), &f.mul(b, &f.mul(z1, z2))),
        );
        let y = f.add(
            &f.add(&f.mul(x1, y2), &f.mul(y1, x2)),
            &f.mul(b, &f.sub(&f.mul(w1, z2), &f.mul(z1, w2))),
        );
        let z = f.add(
            &f.add(&f.mul(x1, z2), &f.mul(z1, x2)),
            &f.mul(a, &f.sub(&f.mul(y1, w2), &f.mul(w1, y2))),
        );
        let w = f.add(
            &f.add(&f.mul(x1, w2), &f.mul(w1, x2)),
            &f.sub(&f.mul(y1, z2), &f.mul(z1, y2)),
        );
        QuatElement { coords: [x, y, z, w] }
    }

    /// Canonical involution `beta* = trd(beta) - beta`.
    pub fn conj(&self, q: &QuatElement) -> QuatElement {
        QuatElement {
            coords: [
                q.coords[0].clone(),
                self.field.neg(&q.coords[1]),
                self.field.neg(&q.coords[2]),
                self.field.neg(&q.coords[3]),
            ],
        }
    }

    pub fn trd(&self, q: &QuatElement) -> FieldElement {
        self.field.add(&q.coords[0], &q.coords[0])
    }

    /// `nrd = x^2 - a y^2 - b z^2 + ab w^2`.
    pub fn nrd(&self, q: &QuatElement) -> FieldElement {
        let f = &self.field;
        let sq = |t: &FieldElement| f.mul(t, t);
        let ab = f.mul(&self.a, &self.b);
        let mut n = sq(&q.coords[0]);
        n = f.sub(&n, &f.mul(&self.a, &sq(&q.coords[1])));
        n = f.sub(&n, &f.mul(&self.b, &sq(&q.coords[2])));
        f.add(&n, &f.mul(&ab, &sq(&q.coords[3])))
    }

    pub fn is_pure(&self, q: &QuatElement) -> bool {
        self.field.is_zero(&q.coords[0])
    }

    pub fn inv(&self, q: &QuatElement) -> Result<QuatElement, QuatError> {
        let n = self.nrd(q);
        let ninv = self.field.inv(&n).map_err(|_| QuatError::NotInvertible)?;
        Ok(self.scale(&self.conj(q), &ninv))
    }

    /// `(conjugate, reduced trace, reduced norm)`, with `beta beta* = nrd`
    /// verified exactly.
    pub fn conj_trd_nrd(&self, q: &QuatElement) -> (QuatElement, FieldElement, FieldElement) {
        let c = self.conj(q);
        let t = self.trd(q);
        let n = self.nrd(q);
        debug_assert_eq!(self.mul(q, &c), self.scalar(&n));
        (c, t, n)
    }

    /// True when the algebra splits at every real place
    /// (at each place `sigma(a) > 0` or `sigma(b) > 0`).
    pub fn is_totally_indefinite(&self) -> Result<bool, QuatError> {
        for place in 1..=self.degree() {
            let sa = self.field.sign_at_place(&self.a, place)?;
            let sb = self.field.sign_at_place(&self.b, place)?;
            if sa != Ordering::Greater && sb != Ordering::Greater {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Splitting `B (x) R -> M_2(R)` at one real place.
    ///
    /// With `s = sqrt(sigma(a)) > 0` the generators map to
    /// `i -> [[s, 0], [0, -s]]`, `j -> [[0, sigma(b)], [1, 0]]`; when only
    /// `sigma(b) > 0`, the roles of `a` and `b` are swapped internally. The
    /// formula is pinned so reports reproduce bit-for-bit at fixed precision.
    pub fn split(
        &self,
        q: &QuatElement,
        place: usize,
        digits: u32,
    ) -> Result<Matrix2<f64>, QuatError> {
        let f = &self.field;
        let sa = f.sign_at_place(&self.a, place)?;
        let sb = f.sign_at_place(&self.b, place)?;
        let x = f.embed_f64(&q.coords[0], place, digits)?;
        let y = f.embed_f64(&q.coords[1], place, digits)?;
        let z = f.embed_f64(&q.coords[2], place, digits)?;
        let w = f.embed_f64(&q.coords[3], place, digits)?;
        let av = f.embed_f64(&self.a, place, digits)?;
        let bv = f.embed_f64(&self.b, place, digits)?;
        let id = Matrix2::identity();
        let (mi, mj) = if sa == Ordering::Greater {
            let s = av.sqrt();
            (Matrix2::new(s, 0.0, 0.0, -s), Matrix2::new(0.0, bv, 1.0, 0.0))
        } else if sb == Ordering::Greater {
            let t = bv.sqrt();
            (Matrix2::new(0.0, av, 1.0, 0.0), Matrix2::new(t, 0.0, 0.0, -t))
        } else {
            return Err(QuatError::NotSplitAtPlace(place));
        };
        let mk = mi * mj;
        Ok(id * x + mi * y + mj * z + mk * w)
    }

    /// Validate `mu`: invertible, `mu^2` in `F` and totally negative.
    /// Returns `mu^2` as a field element.
    pub fn mu_square(&self, mu: &QuatElement) -> Result<FieldElement, QuatError> {
        if self.field.is_zero(&self.nrd(mu)) {
            return Err(QuatError::NotInvertible);
        }
        let sq = self.mul(mu, mu);
        if !(1..4).all(|s| self.field.is_zero(&sq.coords[s])) {
            return Err(QuatError::MuSquareNotInField);
        }
        let mu2 = sq.coords[0].clone();
        if !self.field.is_totally_negative(&mu2)? {
            return Err(QuatError::MuSquareNotTotallyNegative);
        }
        Ok(mu2)
    }

    /// Twisted involution `beta -> mu^{-1} beta* mu`.
    pub fn mu_involution(
        &self,
        q: &QuatElement,
        mu: &QuatElement,
    ) -> Result<QuatElement, QuatError> {
        self.mu_square(mu)?;
        let mu_inv = self.inv(mu)?;
        Ok(self.mul(&self.mul(&mu_inv, &self.conj(q)), mu))
    }

    /// Coordinates in `Q^{4g}`, quaternion slot major.
    pub fn ambient_coords(&self, q: &QuatElement) -> Vec<Rat> {
        let mut v = Vec::with_capacity(4 * self.degree());
        for s in 0..4 {
            v.extend(q.coords[s].coords.iter().cloned());
        }
        v
    }

    pub fn element_from_ambient(&self, v: &[Rat]) -> QuatElement {
        let g = self.degree();
        assert_eq!(v.len(), 4 * g);
        QuatElement {
            coords: std::array::from_fn(|s| {
                self.field.element(v[s * g..(s + 1) * g].to_vec()).expect("degree-g block")
            }),
        }
    }

    /// The ambient basis quaternion at flat index `idx = slot * g + t`.
    fn ambient_unit(&self, idx: usize) -> QuatElement {
        let g = self.degree();
        let mut e = self.zero();
        e.coords[idx / g].coords[idx % g] = Rat::one();
        e
    }

    /// Gram matrix of `(u, v) -> Tr_{F/Q}(trd(u v*))` on the ambient basis.
    pub fn trace_pairing_gram(&self) -> PairingForm {
        let n = 4 * self.degree();
        let gram = RatMatrix::from_fn(n, n, |u, v| {
            let eu = self.ambient_unit(u);
            let ev = self.ambient_unit(v);
            self.field.trace(&self.trd(&self.mul(&eu, &self.conj(&ev))))
        });
        PairingForm::symmetric(gram).expect("trd(uv*) is symmetric")
    }
}

/// A fixture-supplied order, given by a Z-basis of `4g` elements.
#[derive(Clone, Debug)]
pub struct QuatOrder {
    basis: Vec<QuatElement>,
    lattice: IntegerLattice,
}

impl QuatOrder {
    pub fn new(alg: &QuaternionAlgebra, basis: Vec<QuatElement>) -> Result<Self, QuatError> {
        let n = 4 * alg.degree();
        if basis.len() != n {
            return Err(QuatError::OrderRank);
        }
        let rows: Vec<Vec<Rat>> = basis.iter().map(|q| alg.ambient_coords(q)).collect();
        let lattice = IntegerLattice::new(RatMatrix::from_rows(rows))
            .map_err(|_| QuatError::OrderRank)?;
        let order = QuatOrder { basis, lattice };
        if !order.contains(alg, &alg.one()) {
            return Err(QuatError::OrderMissingOne);
        }
        for u in 0..n {
            for v in 0..n {
                let prod = alg.mul(&order.basis[u], &order.basis[v]);
                if !order.contains(alg, &prod) {
                    return Err(QuatError::OrderNotClosed(u, v));
                }
            }
        }
        Ok(order)
    }

    pub fn basis(&self) -> &[QuatElement] {
        &self.basis
    }

    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    pub fn contains(&self, alg: &QuaternionAlgebra, q: &QuatElement) -> bool {
        self.lattice.contains(&alg.ambient_coords(q))
    }
}

/// Result of the trace-gram discriminant computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedDiscriminant {
    /// `sqrt |det Tr(trd(b_i b_j))|`, always `Nm(d_B) * d_F^2`.
    pub gram_sqrt: BigInt,
    /// `Nm_{F/Q}(d_B)`: the square root above divided by `d_F^2`.
    pub norm: BigInt,
}

/// Reduced discriminant of an order from the trace gram of its basis.
///
/// Over `Q` this is the usual `d(O) = sqrt |det trd(b_i b_j)|`; over a field
/// of degree `g` the `Q`-gram picks up a factor `d_F^2` which is divided
/// back out, and the result is `Nm(d_B)`.
pub fn reduced_discriminant(
    alg: &QuaternionAlgebra,
    order: &QuatOrder,
) -> Result<ReducedDiscriminant, QuatError> {
    let n = order.basis().len();
    let gram = RatMatrix::from_fn(n, n, |u, v| {
        alg.field.trace(&alg.trd(&alg.mul(&order.basis()[u], &order.basis()[v])))
    });
    let det = gram.det().abs();
    if !det.is_integer() {
        return Err(QuatError::DiscriminantNotSquare);
    }
    let det = det.to_integer();
    let s = det.sqrt();
    if &s * &s != det {
        return Err(QuatError::DiscriminantNotSquare);
    }
    let df = alg.field.discriminant();
    let df2 = &df * &df;
    let (q, r) = s.div_rem(&df2);
    if !r.is_zero() {
        return Err(QuatError::DiscriminantNotSquare);
    }
    Ok(ReducedDiscriminant { gram_sqrt: s, norm: q })
}

/// The scaled symplectic lattice attached to a pure form element: the ideal
/// `l` of pairing values, the lattice `l^{-1} D_F^{-1} O`, and the pairing
/// `psi(u, v) = Tr(trd(a u v*))` on the ambient space.
#[derive(Debug)]
pub struct ScaledLattice {
    pub lattice: IntegerLattice,
    pub pairing: PairingForm,
    pub value_ideal: FractionalIdeal,
}

pub fn scaled_unimodular_lattice(
    alg: &QuaternionAlgebra,
    order: &QuatOrder,
    a_pure: &QuatElement,
) -> Result<ScaledLattice, QuatError> {
    let f = &alg.field;
    if !alg.is_pure(a_pure) || !(1..4).any(|s| !f.is_zero(&a_pure.coords[s])) {
        return Err(QuatError::NotPure);
    }
    let g = f.degree();
    let n = order.basis().len();
    // Ideal generated by the pairing values trd(a u v*).
    let mut gen_rows: Vec<Vec<Rat>> = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let t = alg.trd(&alg.mul(
                a_pure,
                &alg.mul(&order.basis()[u], &alg.conj(&order.basis()[v])),
            ));
            if f.is_zero(&t) {
                continue;
            }
            for s in 0..g {
                let mut e = f.zero();
                e.coords[s] = Rat::one();
                gen_rows.push(f.mul(&t, &e).coords);
            }
        }
    }
    if gen_rows.is_empty() {
        return Err(QuatError::DegenerateScaling);
    }
    let value_ideal = FractionalIdeal::from_generators(f, RatMatrix::from_rows(gen_rows))?;
    let scaling = value_ideal.inverse(f)?.mul(f, &f.codifferent());
    // Lattice l^{-1} D_F^{-1} * O.
    let mut rows = Vec::with_capacity(g * n);
    for x in scaling.elements(f) {
        for q in order.basis() {
            rows.push(alg.ambient_coords(&alg.scale(q, &x)));
        }
    }
    let lattice = IntegerLattice::from_generators(RatMatrix::from_rows(rows))?;
    // Pairing gram on the ambient basis.
    let dim = 4 * g;
    let gram = RatMatrix::from_fn(dim, dim, |u, v| {
        let eu = alg.ambient_unit(u);
        let ev = alg.ambient_unit(v);
        f.trace(&alg.trd(&alg.mul(a_pure, &alg.mul(&eu, &alg.conj(&ev)))))
    });
    let pairing = PairingForm::antisymmetric(gram)
        .expect("trd(a u v*) with pure a is alternating");
    Ok(ScaledLattice { lattice, pairing, value_ideal })
}

/// Exact self-duality check for a scaled lattice.
pub fn is_unimodular(scaled: &ScaledLattice) -> Result<bool, QuatError> {
    let d = lattice::dual(&scaled.lattice, &scaled.pairing)?;
    Ok(d == scaled.lattice)
}

// ---- Hilbert-symbol oracle over Q ----

fn legendre(a: &BigInt, p: &BigInt) -> i32 {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - BigInt::one()) / BigInt::from(2);
    let r = a.modpow(&e, p);
    if r.is_one() {
        1
    } else {
        -1
    }
}

fn rational_valuation_and_unit(x: &Rat, p: &BigInt) -> (i64, BigInt, BigInt) {
    // x = p^v * (un/ud) with un, ud coprime to p.
    let mut v = 0i64;
    let mut un = x.numer().clone();
    let mut ud = x.denom().clone();
    while (&un % p).is_zero() {
        un /= p;
        v += 1;
    }
    while (&ud % p).is_zero() {
        ud /= p;
        v -= 1;
    }
    (v, un, ud)
}

/// Unit part of `x` at `p` as a residue modulo `m` (with `gcd(denom, m) = 1`).
fn unit_mod(un: &BigInt, ud: &BigInt, m: &BigInt) -> BigInt {
    let udm = ud.mod_floor(m);
    let inv = mod_inverse(&udm, m).expect("denominator invertible");
    (un.mod_floor(m) * inv).mod_floor(m)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Hilbert symbol `(a, b)_p` over `Q` for a finite prime `p`.
pub fn hilbert_symbol(a: &Rat, b: &Rat, p: &BigInt) -> i32 {
    assert!(!a.is_zero() && !b.is_zero());
    let (alpha, an, ad) = rational_valuation_and_unit(a, p);
    let (beta, bn, bd) = rational_valuation_and_unit(b, p);
    if *p == BigInt::from(2) {
        let eight = BigInt::from(8);
        let u = unit_mod(&an, &ad, &eight);
        let v = unit_mod(&bn, &bd, &eight);
        let eps = |x: &BigInt| ((x - BigInt::one()) / BigInt::from(2)).mod_floor(&BigInt::from(2));
        let omega =
            |x: &BigInt| ((x * x - BigInt::one()) / eight.clone()).mod_floor(&BigInt::from(2));
        let expo = eps(&u) * eps(&v)
            + BigInt::from(alpha) * omega(&v)
            + BigInt::from(beta) * omega(&u);
        if expo.mod_floor(&BigInt::from(2)).is_zero() {
            1
        } else {
            -1
        }
    } else {
        let u = unit_mod(&an, &ad, p);
        let v = unit_mod(&bn, &bd, p);
        let eps_p = ((p - BigInt::one()) / BigInt::from(2)).mod_floor(&BigInt::from(2));
        let mut sign = 1i32;
        if alpha % 2 != 0 && beta % 2 != 0 && !eps_p.is_zero() {
            sign = -sign;
        }
        if beta % 2 != 0 {
            sign *= legendre(&u, p);
        }
        if alpha % 2 != 0 {
            sign *= legendre(&v, p);
        }
        sign
    }
}

fn small_prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            out.push(p.clone());
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

/// Finite primes of `Q` where `(a, b)` ramifies.
pub fn ramified_primes_q(a: &Rat, b: &Rat) -> Vec<BigInt> {
    let mut candidates = vec![BigInt::from(2)];
    for x in [a, b] {
        for part in [x.numer(), x.denom()] {
            for p in small_prime_factors(part) {
                if !candidates.contains(&p) {
                    candidates.push(p);
                }
            }
        }
    }
    candidates.sort();
    candidates.into_iter().filter(|p| hilbert_symbol(a, b, p) == -1).collect()
}

/// Discriminant of `(a, b / Q)` as the product of ramified finite primes:
/// the independent oracle used to validate fixture-declared values.
pub fn discriminant_q(a: &Rat, b: &Rat) -> BigInt {
    ramified_primes_q(a, b).into_iter().fold(BigInt::one(), |acc, p| acc * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rat, rat_frac};
    use crate::number_field::DEFAULT_DIGITS;
    use rand::Rng;
    use rand::SeedableRng;

    fn q_algebra(a: i64, b: i64) -> QuaternionAlgebra {
        let f = TotallyRealField::rationals();
        let a = f.from_rat(rat(a));
        let b = f.from_rat(rat(b));
        QuaternionAlgebra::new(f, a, b).unwrap()
    }

    fn qel(alg: &QuaternionAlgebra, c: [i64; 4]) -> QuatElement {
        let coords = std::array::from_fn(|s| alg.field.from_rat(rat(c[s])));
        alg.element(coords)
    }

    /// The Hamilton quaternions `(-1, -1 / Q)` with the Hurwitz order.
    fn hurwitz() -> (QuaternionAlgebra, QuatOrder) {
        let alg = q_algebra(-1, -1);
        let omega = alg.element(std::array::from_fn(|_| alg.field.from_rat(rat_frac(1, 2))));
        let basis = vec![alg.one(), alg.unit(1), alg.unit(2), omega];
        let order = QuatOrder::new(&alg, basis).unwrap();
        (alg, order)
    }

    /// `M_2(Z)` inside the split presentation `(1, 1 / Q)`.
    fn m2z() -> (QuaternionAlgebra, QuatOrder) {
        let alg = q_algebra(1, 1);
        let h = |c: [i64; 4]| {
            alg.element(std::array::from_fn(|s| alg.field.from_rat(rat_frac(c[s], 2))))
        };
        let basis = vec![h([1, 1, 0, 0]), h([1, -1, 0, 0]), h([0, 0, 1, 1]), h([0, 0, 1, -1])];
        let order = QuatOrder::new(&alg, basis).unwrap();
        (alg, order)
    }

    #[test]
    fn conj_trd_nrd_examples() {
        let alg = q_algebra(-1, -1);
        let one = alg.one();
        let (c, t, n) = alg.conj_trd_nrd(&one);
        assert_eq!(c, one);
        assert_eq!(t, alg.field.from_rat(rat(2)));
        assert_eq!(n, alg.field.one());
        let b = qel(&alg, [1, 1, 0, 0]); // 1 + i
        let (c, t, n) = alg.conj_trd_nrd(&b);
        assert_eq!(c, qel(&alg, [1, -1, 0, 0]));
        assert_eq!(t, alg.field.from_rat(rat(2)));
        assert_eq!(n, alg.field.from_rat(rat(2)));
    }

    #[test]
    fn trace_is_symmetric_and_norm_multiplicative() {
        let alg = q_algebra(-1, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let mut draw = || qel(&alg, std::array::from_fn(|_| rng.gen_range(-4..=4)));
            let b = draw();
            let c = draw();
            let bc = alg.mul(&b, &c);
            let cb = alg.mul(&c, &b);
            assert_eq!(alg.trd(&bc), alg.trd(&cb));
            assert_eq!(
                alg.nrd(&bc),
                alg.field.mul(&alg.nrd(&b), &alg.nrd(&c))
            );
        }
    }

    #[test]
    fn split_is_a_ring_homomorphism() {
        let alg = q_algebra(-1, 3);
        assert!(alg.is_totally_indefinite().unwrap());
        let one = alg.split(&alg.one(), 1, DEFAULT_DIGITS).unwrap();
        assert!((one - Matrix2::identity()).norm() < 1e-12);
        // split(i)^2 = a * identity.
        let mi = alg.split(&alg.unit(1), 1, DEFAULT_DIGITS).unwrap();
        assert!((mi * mi - Matrix2::identity() * -1.0).norm() < 1e-10);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let mut draw = || qel(&alg, std::array::from_fn(|_| rng.gen_range(-3..=3)));
            let b = draw();
            let c = draw();
            let sb = alg.split(&b, 1, DEFAULT_DIGITS).unwrap();
            let sc = alg.split(&c, 1, DEFAULT_DIGITS).unwrap();
            let sbc = alg.split(&alg.mul(&b, &c), 1, DEFAULT_DIGITS).unwrap();
            assert!((sb * sc - sbc).norm() < 1e-10);
            // det(split(b)) = nrd(b), trace(split(b)) = trd(b).
            let nrd = alg.field.embed_f64(&alg.nrd(&b), 1, 20).unwrap();
            let trd = alg.field.embed_f64(&alg.trd(&b), 1, 20).unwrap();
            assert!((sb.determinant() - nrd).abs() <= 1e-10 * (1.0 + nrd.abs()));
            assert!((sb.trace() - trd).abs() <= 1e-10 * (1.0 + trd.abs()));
        }
    }

    #[test]
    fn split_rejects_definite_algebra() {
        let alg = q_algebra(-1, -1);
        assert!(!alg.is_totally_indefinite().unwrap());
        assert_eq!(
            alg.split(&alg.one(), 1, DEFAULT_DIGITS).unwrap_err(),
            QuatError::NotSplitAtPlace(1)
        );
    }

    #[test]
    fn mu_involution_is_an_involution() {
        let alg = q_algebra(-1, -1);
        let mu = alg.unit(1); // mu = i, mu^2 = -1
        assert_eq!(alg.mu_square(&mu).unwrap(), alg.field.from_rat(rat(-1)));
        // Scalars are fixed.
        let s = alg.scalar(&alg.field.from_rat(rat(7)));
        assert_eq!(alg.mu_involution(&s, &mu).unwrap(), s);
        // beta = j maps to  mu^{-1} (-j) mu = j for mu = i.
        let j = alg.unit(2);
        assert_eq!(alg.mu_involution(&j, &mu).unwrap(), j);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let b = qel(&alg, std::array::from_fn(|_| rng.gen_range(-5..=5)));
            let once = alg.mu_involution(&b, &mu).unwrap();
            let twice = alg.mu_involution(&once, &mu).unwrap();
            assert_eq!(twice, b);
        }
        // A mu with mu^2 not totally negative is rejected.
        let bad = alg.one();
        assert_eq!(alg.mu_involution(&bad, &bad).unwrap_err(), QuatError::MuSquareNotTotallyNegative);
    }

    #[test]
    fn hurwitz_discriminant_is_two() {
        let (alg, order) = hurwitz();
        let d = reduced_discriminant(&alg, &order).unwrap();
        assert_eq!(d.norm, BigInt::from(2));
        assert_eq!(d.gram_sqrt, BigInt::from(2));
    }

    #[test]
    fn m2z_discriminant_is_one() {
        let (alg, order) = m2z();
        let d = reduced_discriminant(&alg, &order).unwrap();
        assert_eq!(d.norm, BigInt::one());
    }

    #[test]
    fn discriminant_invariant_under_basis_change() {
        let (alg, order) = hurwitz();
        // Change basis by a unimodular transform: b0 + b1, b1, b2, b3 + b0.
        let b = order.basis();
        let nb = vec![
            alg.add(&b[0], &b[1]),
            b[1].clone(),
            b[2].clone(),
            alg.add(&b[3], &b[0]),
        ];
        let order2 = QuatOrder::new(&alg, nb).unwrap();
        assert_eq!(
            reduced_discriminant(&alg, &order).unwrap(),
            reduced_discriminant(&alg, &order2).unwrap()
        );
    }

    #[test]
    fn hurwitz_dual_index_is_discriminant_squared() {
        let (alg, order) = hurwitz();
        let pairing = alg.trace_pairing_gram();
        let dual = lattice::dual(order.lattice(), &pairing).unwrap();
        let idx = lattice::index(order.lattice(), &dual).unwrap();
        assert_eq!(idx, BigInt::from(4)); // d_B^2 = 2^2
    }

    #[test]
    fn hilbert_symbol_oracle() {
        // (-1, -1) ramifies exactly at 2 (and infinity).
        assert_eq!(discriminant_q(&rat(-1), &rat(-1)), BigInt::from(2));
        // (1, 1) is split everywhere.
        assert_eq!(discriminant_q(&rat(1), &rat(1)), BigInt::one());
        // (-1, 3) ramifies at 2 and 3.
        assert_eq!(
            ramified_primes_q(&rat(-1), &rat(3)),
            vec![BigInt::from(2), BigInt::from(3)]
        );
        assert_eq!(discriminant_q(&rat(-1), &rat(3)), BigInt::from(6));
        // (2, 3) also gives discriminant 6.
        assert_eq!(discriminant_q(&rat(2), &rat(3)), BigInt::from(6));
        // Denominators are handled: (-1, 3/4) ~ (-1, 3).
        assert_eq!(discriminant_q(&rat(-1), &rat_frac(3, 4)), BigInt::from(6));
    }

    #[test]
    fn scaled_lattice_m2z_is_unimodular() {
        let (alg, order) = m2z();
        // a_pure = mu^{-1} = -k with mu = k.
        let a_pure = alg.neg(&alg.unit(3));
        let scaled = scaled_unimodular_lattice(&alg, &order, &a_pure).unwrap();
        // Value ideal is all of Z, so the lattice is the order itself.
        assert_eq!(scaled.value_ideal, alg.field.ring_of_integers());
        assert_eq!(&scaled.lattice, order.lattice());
        assert!(is_unimodular(&scaled).unwrap());
        // psi alternating on basis vectors and integral on the lattice.
        for u in order.basis() {
            let cu = alg.ambient_coords(u);
            assert!(scaled.pairing.eval(&cu, &cu).is_zero());
            for v in order.basis() {
                let cv = alg.ambient_coords(v);
                assert!(scaled.pairing.eval(&cu, &cv).is_integer());
            }
        }
    }

    #[test]
    fn scaled_lattice_rejects_non_pure() {
        let (alg, order) = m2z();
        let err = scaled_unimodular_lattice(&alg, &order, &alg.one()).unwrap_err();
        assert_eq!(err, QuatError::NotPure);
    }

    #[test]
    fn bad_order_rejected() {
        let alg = q_algebra(-1, -1);
        // Missing 1: scaled copy of the standard basis.
        let basis = vec![
            qel(&alg, [2, 0, 0, 0]),
            qel(&alg, [0, 1, 0, 0]),
            qel(&alg, [0, 0, 1, 0]),
            qel(&alg, [0, 0, 0, 1]),
        ];
        assert_eq!(QuatOrder::new(&alg, basis).unwrap_err(), QuatError::OrderMissingOne);
        // Not closed: replace k by k/2... the lattice Z + Zi + Zj + Z(k/2)
        // contains 1 but (k/2)^2 = -1/4 escapes.
        let basis = vec![
            alg.one(),
            alg.unit(1),
            alg.unit(2),
            alg.element(std::array::from_fn(|s| {
                alg.field.from_rat(if s == 3 { rat_frac(1, 2) } else { rat(0) })
            })),
        ];
        assert!(matches!(QuatOrder::new(&alg, basis).unwrap_err(), QuatError::OrderNotClosed(..)));
    }
}
