//! Exact arithmetic in a totally real number field.
//!
//! A field is described by a monic integer minimal polynomial of degree `g`
//! together with a basis of the ring of integers written in the power basis.
//! Elements carry coordinates with respect to that integral basis and all
//! ring operations are exact rational arithmetic. The real embeddings are
//! the `g` real roots of the minimal polynomial, isolated by Sturm's theorem
//! and sorted ascending, so place indices are deterministic.

use crate::lattice::{self, IntegerLattice, PairingForm};
use crate::matrix::{parse_rat, Rat, RatMatrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use thiserror::Error;

pub const DEFAULT_DIGITS: u32 = 40;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("minimal polynomial must be monic of degree >= 1")]
    BadMinPoly,
    #[error("polynomial has {found} distinct real roots, expected {expected}: field is not totally real")]
    NotTotallyReal { found: usize, expected: usize },
    #[error("integral basis matrix is singular")]
    SingularBasis,
    #[error("place index {0} out of range 1..={1}")]
    PlaceOutOfRange(usize, usize),
    #[error("requested {requested} digits exceeds configured maximum {max}")]
    PrecisionExceeded { requested: u32, max: u32 },
    #[error("division by zero field element")]
    DivisionByZero,
    #[error("sign of embedding could not be determined (is the minimal polynomial squarefree?)")]
    SignUndetermined,
    #[error("fractional ideal basis is not full rank")]
    IdealRankDeficient,
    #[error("lattice is not stable under multiplication by the ring of integers")]
    NotAnIdeal,
    #[error("zero ideal has no inverse")]
    ZeroIdeal,
    #[error("element coordinate vector has wrong length")]
    BadCoords,
}

/// Coordinates with respect to the integral basis of the ambient field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldElement {
    pub coords: Vec<Rat>,
}

impl FieldElement {
    pub fn from_strs(coords: &[&str]) -> Result<Self, crate::matrix::MatrixError> {
        Ok(FieldElement { coords: coords.iter().map(|s| parse_rat(s)).collect::<Result<_, _>>()? })
    }
}

#[derive(Clone, Debug)]
struct RootInterval {
    lo: Rat,
    hi: Rat,
    exact: bool,
}

#[derive(Clone, Debug)]
pub struct TotallyRealField {
    degree: usize,
    /// Monic minimal polynomial, ascending coefficients, length `degree + 1`.
    min_poly: Vec<BigInt>,
    /// Rows express the integral basis in the power basis.
    basis_in_power: RatMatrix,
    power_in_basis: RatMatrix,
    roots: Vec<RootInterval>,
    max_digits: u32,
}

impl TotallyRealField {
    pub fn new(
        min_poly: Vec<BigInt>,
        basis_in_power: RatMatrix,
        max_digits: u32,
    ) -> Result<Self, FieldError> {
        let degree = min_poly.len().saturating_sub(1);
        if degree == 0 || min_poly.last().map(|c| !c.is_one()).unwrap_or(true) {
            return Err(FieldError::BadMinPoly);
        }
        if basis_in_power.nrows() != degree || basis_in_power.ncols() != degree {
            return Err(FieldError::SingularBasis);
        }
        let power_in_basis =
            basis_in_power.try_inverse().map_err(|_| FieldError::SingularBasis)?;
        let poly: Vec<Rat> = min_poly.iter().map(|c| Rat::from_integer(c.clone())).collect();
        let roots = isolate_real_roots(&poly);
        if roots.len() != degree {
            return Err(FieldError::NotTotallyReal { found: roots.len(), expected: degree });
        }
        Ok(TotallyRealField {
            degree,
            min_poly,
            basis_in_power,
            power_in_basis,
            roots,
            max_digits,
        })
    }

    /// The rational field, presented as a degree-1 field.
    pub fn rationals() -> Self {
        TotallyRealField::new(
            vec![BigInt::zero(), BigInt::one()],
            RatMatrix::identity(1),
            DEFAULT_DIGITS,
        )
        .expect("Q is totally real")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn max_digits(&self) -> u32 {
        self.max_digits
    }

    pub fn element(&self, coords: Vec<Rat>) -> Result<FieldElement, FieldError> {
        if coords.len() != self.degree {
            return Err(FieldError::BadCoords);
        }
        Ok(FieldElement { coords })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coords: vec![Rat::zero(); self.degree] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rat(Rat::one())
    }

    /// The rational `c` as a field element (`c * 1`).
    pub fn from_rat(&self, c: Rat) -> FieldElement {
        // 1 in the power basis is e_0; move it to integral-basis coordinates.
        let mut power = vec![Rat::zero(); self.degree];
        power[0] = c;
        FieldElement { coords: self.power_in_basis.mul_row_vec(&power) }
    }

    pub fn is_zero(&self, x: &FieldElement) -> bool {
        x.coords.iter().all(Rat::is_zero)
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement {
            coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement {
            coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement { coords: x.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, x: &FieldElement, c: &Rat) -> FieldElement {
        FieldElement { coords: x.coords.iter().map(|a| a * c).collect() }
    }

    fn to_power(&self, x: &FieldElement) -> Vec<Rat> {
        self.basis_in_power.mul_row_vec(&x.coords)
    }

    fn element_from_power(&self, p: &[Rat]) -> FieldElement {
        FieldElement { coords: self.power_in_basis.mul_row_vec(p) }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let a = self.to_power(x);
        let b = self.to_power(y);
        let mut prod = vec![Rat::zero(); 2 * self.degree - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                prod[i + j] += ai * bj;
            }
        }
        // Reduce modulo the monic minimal polynomial.
        for k in (self.degree..prod.len()).rev() {
            if prod[k].is_zero() {
                continue;
            }
            let c = prod[k].clone();
            for (s, ms) in self.min_poly.iter().enumerate().take(self.degree) {
                let sub = &c * Rat::from_integer(ms.clone());
                prod[k - self.degree + s] -= sub;
            }
            prod[k] = Rat::zero();
        }
        self.element_from_power(&prod[..self.degree])
    }

    /// Matrix of multiplication by `x` acting on integral-basis coordinates
    /// (row vector times matrix convention).
    pub fn mult_matrix(&self, x: &FieldElement) -> RatMatrix {
        let mut rows = Vec::with_capacity(self.degree);
        for i in 0..self.degree {
            let mut e = self.zero();
            e.coords[i] = Rat::one();
            rows.push(self.mul(x, &e).coords);
        }
        RatMatrix::from_rows(rows)
    }

    pub fn trace(&self, x: &FieldElement) -> Rat {
        let m = self.mult_matrix(x);
        (0..self.degree).map(|i| m[(i, i)].clone()).sum()
    }

    pub fn norm(&self, x: &FieldElement) -> Rat {
        self.mult_matrix(x).det()
    }

    pub fn trace_norm(&self, x: &FieldElement) -> (Rat, Rat) {
        (self.trace(x), self.norm(x))
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        if self.is_zero(x) {
            return Err(FieldError::DivisionByZero);
        }
        // Solve y * M_x = 1; the multiplication matrix is invertible for x != 0.
        let m = self.mult_matrix(x);
        let inv = m.try_inverse().map_err(|_| FieldError::DivisionByZero)?;
        Ok(FieldElement { coords: inv.mul_row_vec(&self.one().coords) })
    }

    fn check_place(&self, place: usize) -> Result<usize, FieldError> {
        if place == 0 || place > self.degree {
            return Err(FieldError::PlaceOutOfRange(place, self.degree));
        }
        Ok(place - 1)
    }

    fn min_poly_rat(&self) -> Vec<Rat> {
        self.min_poly.iter().map(|c| Rat::from_integer(c.clone())).collect()
    }

    /// `sigma_place(x)` as an exact rational with absolute error below
    /// `10^-digits`. Deterministic for fixed `digits`.
    pub fn embed(&self, x: &FieldElement, place: usize, digits: u32) -> Result<Rat, FieldError> {
        if digits > self.max_digits {
            return Err(FieldError::PrecisionExceeded { requested: digits, max: self.max_digits });
        }
        let idx = self.check_place(place)?;
        let q = self.to_power(x);
        let tol = pow10_inv(digits);
        let root = &self.roots[idx];
        if root.exact {
            return Ok(poly_eval(&q, &root.lo));
        }
        let lip = lipschitz_bound(&q, &root.lo, &root.hi);
        if lip.is_zero() {
            // Constant coordinate polynomial.
            return Ok(poly_eval(&q, &root.lo));
        }
        let mp = self.min_poly_rat();
        let mut lo = root.lo.clone();
        let mut hi = root.hi.clone();
        while &lip * (&hi - &lo) >= tol {
            bisect_step(&mp, &mut lo, &mut hi);
        }
        let mid = (&lo + &hi) / rat2();
        Ok(poly_eval(&q, &mid))
    }

    pub fn embed_f64(&self, x: &FieldElement, place: usize, digits: u32) -> Result<f64, FieldError> {
        // Beyond ~17 digits the f64 conversion dominates the error anyway.
        let d = digits.min(20);
        Ok(self.embed(x, place, d)?.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact sign of `sigma_place(x)`.
    pub fn sign_at_place(&self, x: &FieldElement, place: usize) -> Result<Ordering, FieldError> {
        let idx = self.check_place(place)?;
        if self.is_zero(x) {
            return Ok(Ordering::Equal);
        }
        let q = self.to_power(x);
        let root = &self.roots[idx];
        if root.exact {
            return Ok(poly_eval(&q, &root.lo).cmp(&Rat::zero()));
        }
        let mp = self.min_poly_rat();
        let mut lo = root.lo.clone();
        let mut hi = root.hi.clone();
        for round in 0.. {
            let lip = lipschitz_bound(&q, &lo, &hi);
            let mid = (&lo + &hi) / rat2();
            let val = poly_eval(&q, &mid);
            let radius = &lip * (&hi - &lo) / rat2();
            if val.abs() > radius {
                return Ok(val.cmp(&Rat::zero()));
            }
            if round == 8 {
                // The value may be exactly zero at this root; decide via gcd
                // with the minimal polynomial.
                let g = poly_gcd(&q, &mp);
                if g.len() > 1 && sturm_count(&sturm_chain(&g), &lo, &hi) > 0 {
                    return Ok(Ordering::Equal);
                }
            }
            if round > 4 * (self.max_digits as usize + 16) {
                return Err(FieldError::SignUndetermined);
            }
            bisect_step(&mp, &mut lo, &mut hi);
        }
        unreachable!()
    }

    pub fn is_totally_positive(&self, x: &FieldElement) -> Result<bool, FieldError> {
        for place in 1..=self.degree {
            if self.sign_at_place(x, place)? != Ordering::Greater {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_totally_negative(&self, x: &FieldElement) -> Result<bool, FieldError> {
        for place in 1..=self.degree {
            if self.sign_at_place(x, place)? != Ordering::Less {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Gram matrix of the trace pairing `(x, y) -> Tr(xy)` on the integral basis.
    pub fn trace_gram(&self) -> RatMatrix {
        RatMatrix::from_fn(self.degree, self.degree, |i, j| {
            let mut ei = self.zero();
            ei.coords[i] = Rat::one();
            let mut ej = self.zero();
            ej.coords[j] = Rat::one();
            self.trace(&self.mul(&ei, &ej))
        })
    }

    /// Field discriminant `d_F = |det Tr(b_i b_j)|`.
    pub fn discriminant(&self) -> BigInt {
        let d = self.trace_gram().det().abs();
        debug_assert!(d.is_integer());
        d.to_integer()
    }

    /// Dual of the ring of integers under the trace pairing, as a fractional
    /// ideal. Computed through the generic dual-lattice machinery.
    pub fn codifferent(&self) -> FractionalIdeal {
        let o_f = IntegerLattice::new(RatMatrix::identity(self.degree)).expect("unit lattice");
        let pairing = PairingForm::symmetric(self.trace_gram()).expect("trace form symmetric");
        let dual = lattice::dual(&o_f, &pairing).expect("trace pairing nondegenerate");
        FractionalIdeal::new_unchecked(dual.basis().clone())
    }

    pub fn ring_of_integers(&self) -> FractionalIdeal {
        FractionalIdeal::new_unchecked(RatMatrix::identity(self.degree))
    }
}

fn rat2() -> Rat {
    Rat::from_integer(BigInt::from(2))
}

fn pow10_inv(digits: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::from(10u32).pow(digits))
}

// ---- polynomial helpers (ascending coefficients, exact rationals) ----

fn poly_trim(p: &mut Vec<Rat>) {
    while p.len() > 1 && p.last().map(Rat::is_zero).unwrap_or(false) {
        p.pop();
    }
}

fn poly_eval(p: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_derivative(p: &[Rat]) -> Vec<Rat> {
    if p.len() <= 1 {
        return vec![Rat::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Rat::from_integer(BigInt::from(k)))
        .collect()
}

fn poly_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut bb = b.to_vec();
    poly_trim(&mut bb);
    let db = bb.len() - 1;
    let lead = bb[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let c = &r[dr] / &lead;
        for k in 0..=db {
            let sub = &c * &bb[k];
            r[dr - db + k] -= sub;
        }
        poly_trim(&mut r);
        if dr == db {
            break;
        }
    }
    r
}

fn poly_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    // Normalize to monic for stable comparisons.
    if let Some(l) = x.last().cloned() {
        if !l.is_zero() {
            for c in &mut x {
                *c /= &l;
            }
        }
    }
    x
}

fn sturm_chain(p: &[Rat]) -> Vec<Vec<Rat>> {
    let mut chain = vec![p.to_vec(), poly_derivative(p)];
    poly_trim(&mut chain[0]);
    poly_trim(&mut chain[1]);
    loop {
        let n = chain.len();
        let r = poly_rem(&chain[n - 2], &chain[n - 1]);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        chain.push(r.iter().map(|c| -c).collect());
    }
    chain
}

fn sign_variations_at(chain: &[Vec<Rat>], x: &Rat) -> usize {
    let mut count = 0;
    let mut prev: Option<Ordering> = None;
    for p in chain {
        let s = poly_eval(p, x).cmp(&Rat::zero());
        if s == Ordering::Equal {
            continue;
        }
        if let Some(ps) = prev {
            if ps != s {
                count += 1;
            }
        }
        prev = Some(s);
    }
    count
}

/// Distinct real roots in the half-open interval `(lo, hi]`.
fn sturm_count(chain: &[Vec<Rat>], lo: &Rat, hi: &Rat) -> usize {
    sign_variations_at(chain, lo).saturating_sub(sign_variations_at(chain, hi))
}

/// Narrow `(lo, hi)` around a single root of `p`, avoiding hitting roots at
/// the split point.
fn bisect_step(p: &[Rat], lo: &mut Rat, hi: &mut Rat) {
    let width = &*hi - &*lo;
    for k in [4i64, 3, 5, 2, 6, 1, 7] {
        let mid = &*lo + &width * Rat::new(BigInt::from(k), BigInt::from(8));
        let v = poly_eval(p, &mid);
        if v.is_zero() {
            continue;
        }
        let s_lo = poly_eval(p, lo).cmp(&Rat::zero());
        if s_lo == Ordering::Equal {
            // lo itself is a root only in degenerate inputs; shrink from above.
            *hi = mid;
            return;
        }
        if v.cmp(&Rat::zero()) != s_lo {
            *hi = mid;
        } else {
            *lo = mid;
        }
        return;
    }
    // Every candidate split point is a root: impossible for a nonzero
    // polynomial of the degrees handled here.
    unreachable!("no valid bisection point");
}

fn lipschitz_bound(q: &[Rat], lo: &Rat, hi: &Rat) -> Rat {
    let m = if lo.abs() > hi.abs() { lo.abs() } else { hi.abs() };
    let m = if m < Rat::one() { Rat::one() } else { m };
    let dq = poly_derivative(q);
    let mut bound = Rat::zero();
    let mut mk = Rat::one();
    for c in dq.iter() {
        bound += c.abs() * &mk;
        mk *= &m;
    }
    bound
}

/// Isolating intervals for the distinct real roots of `p`, ascending.
fn isolate_real_roots(p: &[Rat]) -> Vec<RootInterval> {
    let mut poly = p.to_vec();
    poly_trim(&mut poly);
    let deg = poly.len() - 1;
    if deg == 1 {
        let root = -&poly[0] / &poly[1];
        return vec![RootInterval { lo: root.clone(), hi: root, exact: true }];
    }
    let chain = sturm_chain(&poly);
    // Cauchy bound: all real roots lie in (-m, m).
    let lead = poly.last().unwrap().clone();
    let mut m = Rat::one();
    for c in poly.iter().take(deg) {
        let candidate = Rat::one() + (c / &lead).abs();
        if candidate > m {
            m = candidate;
        }
    }
    let mut intervals = Vec::new();
    let mut queue = vec![(-m.clone(), m.clone())];
    let mut guard = 0usize;
    while let Some((lo, hi)) = queue.pop() {
        guard += 1;
        if guard > 10_000 {
            break;
        }
        let count = sturm_count(&chain, &lo, &hi);
        if count == 0 {
            continue;
        }
        // An exact root at the right endpoint of a tiny interval.
        if count == 1 {
            if poly_eval(&poly, &hi).is_zero() {
                intervals.push(RootInterval { lo: hi.clone(), hi: hi.clone(), exact: true });
                continue;
            }
            intervals.push(RootInterval { lo, hi, exact: false });
            continue;
        }
        let width = &hi - &lo;
        let mut split = None;
        for k in [4i64, 3, 5, 2, 6, 1, 7] {
            let mid = &lo + &width * Rat::new(BigInt::from(k), BigInt::from(8));
            if !poly_eval(&poly, &mid).is_zero() {
                split = Some(mid);
                break;
            }
        }
        match split {
            Some(mid) => {
                queue.push((lo, mid.clone()));
                queue.push((mid, hi));
            }
            None => {
                // Pathological; give up on this branch.
            }
        }
    }
    intervals.sort_by(|a, b| a.lo.cmp(&b.lo));
    intervals
}

/// A full-rank lattice in the field, stored as integral-basis coordinates of
/// a Z-basis (rows), kept in Hermite-canonical form so equality is plain
/// matrix comparison.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FractionalIdeal {
    zbasis: RatMatrix,
}

impl FractionalIdeal {
    /// Canonicalize and validate stability under the ring of integers.
    pub fn new(field: &TotallyRealField, zbasis: RatMatrix) -> Result<Self, FieldError> {
        let ideal = Self::from_generators(field, zbasis)?;
        for i in 0..field.degree() {
            let mut b = field.zero();
            b.coords[i] = Rat::one();
            for k in 0..field.degree() {
                let v = field
                    .element(ideal.zbasis.row_vec(k))
                    .expect("basis row has field degree");
                let prod = field.mul(&b, &v);
                if !ideal.contains(&prod) {
                    return Err(FieldError::NotAnIdeal);
                }
            }
        }
        Ok(ideal)
    }

    /// Canonical lattice spanned by the rows, without the O_F-stability check.
    pub fn from_generators(
        _field: &TotallyRealField,
        generators: RatMatrix,
    ) -> Result<Self, FieldError> {
        let canon = lattice::canonical_row_basis(&generators)
            .map_err(|_| FieldError::IdealRankDeficient)?;
        Ok(FractionalIdeal { zbasis: canon })
    }

    pub(crate) fn new_unchecked(zbasis: RatMatrix) -> Self {
        let canon = lattice::canonical_row_basis(&zbasis).expect("full-rank ideal basis");
        FractionalIdeal { zbasis: canon }
    }

    pub fn zbasis(&self) -> &RatMatrix {
        &self.zbasis
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        lattice::member_of_row_span(&self.zbasis, &x.coords)
    }

    pub fn mul(&self, field: &TotallyRealField, other: &FractionalIdeal) -> FractionalIdeal {
        let g = field.degree();
        let mut rows = Vec::with_capacity(g * g);
        for i in 0..g {
            let xi = field.element(self.zbasis.row_vec(i)).unwrap();
            for j in 0..g {
                let yj = field.element(other.zbasis.row_vec(j)).unwrap();
                rows.push(field.mul(&xi, &yj).coords);
            }
        }
        FractionalIdeal::new_unchecked(RatMatrix::from_rows(rows))
    }

    /// `{ x in F : x * self lies in O_F }`, computed by an exact linear
    /// membership solve through the Smith normal form.
    pub fn inverse(&self, field: &TotallyRealField) -> Result<FractionalIdeal, FieldError> {
        let g = field.degree();
        // Stack multiplication matrices of the basis elements: x is in the
        // inverse iff stacked * x^T is integral.
        let mut blocks = Vec::with_capacity(g);
        for j in 0..g {
            let vj = field.element(self.zbasis.row_vec(j)).map_err(|_| FieldError::ZeroIdeal)?;
            // Row-vector convention: coords(x * vj) = coords(x) * M. The
            // membership condition is on each product, i.e. M^T x^T integral.
            blocks.push(field.mult_matrix(&vj).transpose());
        }
        let refs: Vec<&RatMatrix> = blocks.iter().collect();
        let stacked = RatMatrix::stack(&refs);
        let (n, d) = stacked.to_integer_scaled();
        let (s, _, v) = n.snf();
        let mut basis_rows = Vec::with_capacity(g);
        for t in 0..g {
            let st = s[(t, t)].clone();
            if st.is_zero() {
                return Err(FieldError::IdealRankDeficient);
            }
            let scale = Rat::new(d.clone(), st);
            let col: Vec<Rat> =
                (0..g).map(|i| Rat::from_integer(v[(i, t)].clone()) * &scale).collect();
            basis_rows.push(col);
        }
        Ok(FractionalIdeal::new_unchecked(RatMatrix::from_rows(basis_rows)))
    }

    /// Scale a field element by each basis generator: convenience for ideal
    /// times lattice constructions.
    pub fn elements(&self, field: &TotallyRealField) -> Vec<FieldElement> {
        (0..field.degree()).map(|i| field.element(self.zbasis.row_vec(i)).unwrap()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rat, rat_frac};

    fn sqrt2_field() -> TotallyRealField {
        // x^2 - 2, integral basis (1, sqrt2) = power basis.
        TotallyRealField::new(
            vec![BigInt::from(-2), BigInt::zero(), BigInt::one()],
            RatMatrix::identity(2),
            DEFAULT_DIGITS,
        )
        .unwrap()
    }

    fn sqrt2(f: &TotallyRealField) -> FieldElement {
        f.element(vec![rat(0), rat(1)]).unwrap()
    }

    #[test]
    fn rationals_is_degree_one() {
        let q = TotallyRealField::rationals();
        assert_eq!(q.degree(), 1);
        let x = q.from_rat(rat_frac(3, 2));
        assert_eq!(q.embed(&x, 1, 10).unwrap(), rat_frac(3, 2));
    }

    #[test]
    fn not_totally_real_rejected() {
        // x^2 + 1 has no real roots.
        let res = TotallyRealField::new(
            vec![BigInt::one(), BigInt::zero(), BigInt::one()],
            RatMatrix::identity(2),
            DEFAULT_DIGITS,
        );
        assert_eq!(res.unwrap_err(), FieldError::NotTotallyReal { found: 0, expected: 2 });
    }

    #[test]
    fn embed_one_is_one() {
        let f = sqrt2_field();
        for place in 1..=2 {
            assert_eq!(f.embed(&f.one(), place, 30).unwrap(), rat(1));
        }
    }

    #[test]
    fn embed_sqrt2_both_places() {
        let f = sqrt2_field();
        let s = sqrt2(&f);
        let lo = f.embed(&s, 1, 30).unwrap();
        let hi = f.embed(&s, 2, 30).unwrap();
        // Places sorted ascending: -sqrt2 then +sqrt2.
        assert!(lo < rat(0) && hi > rat(0));
        let tol = Rat::new(BigInt::one(), BigInt::from(10u32).pow(28));
        let two = rat(2);
        assert!((&lo * &lo - &two).abs() < tol);
        assert!((&hi * &hi - &two).abs() < tol);
        // 10^-30 accuracy against each other.
        assert!((lo + hi).abs() < tol);
    }

    #[test]
    fn embed_is_additive() {
        let f = sqrt2_field();
        let x = f.element(vec![rat_frac(1, 3), rat(2)]).unwrap();
        let y = f.element(vec![rat(5), rat_frac(-7, 2)]).unwrap();
        let tol = Rat::new(BigInt::one(), BigInt::from(10u64).pow(12));
        for place in 1..=2 {
            let lhs = f.embed(&f.add(&x, &y), place, 20).unwrap();
            let rhs = f.embed(&x, place, 20).unwrap() + f.embed(&y, place, 20).unwrap();
            assert!((lhs - rhs).abs() < tol.clone() * rat(3));
        }
    }

    #[test]
    fn embed_is_multiplicative() {
        let f = sqrt2_field();
        let x = f.element(vec![rat_frac(2, 3), rat(1)]).unwrap();
        let y = f.element(vec![rat(-1), rat_frac(5, 2)]).unwrap();
        let digits: u32 = 20;
        let tol = Rat::new(BigInt::one(), BigInt::from(10u64).pow(digits - 1));
        for place in 1..=2 {
            let lhs = f.embed(&f.mul(&x, &y), place, digits).unwrap();
            let rhs = f.embed(&x, place, digits).unwrap()
                * f.embed(&y, place, digits).unwrap();
            let scale = Rat::one() + rhs.abs();
            assert!((lhs - &rhs).abs() / scale < tol.clone() * rat(20));
        }
    }

    #[test]
    fn trace_norm_match_embedding_sums() {
        let f = sqrt2_field();
        let x = f.element(vec![rat_frac(3, 4), rat_frac(-2, 5)]).unwrap();
        let (tr, nm) = f.trace_norm(&x);
        let e1 = f.embed(&x, 1, 25).unwrap();
        let e2 = f.embed(&x, 2, 25).unwrap();
        let tol = Rat::new(BigInt::one(), BigInt::from(10u64).pow(20));
        assert!((tr - (&e1 + &e2)).abs() < tol);
        assert!((nm - (&e1 * &e2)).abs() < tol);
    }

    #[test]
    fn codifferent_dual_of_dual_is_ring_of_integers() {
        use crate::lattice::{dual, IntegerLattice, PairingForm};
        let f = sqrt2_field();
        let pairing = PairingForm::symmetric(f.trace_gram()).unwrap();
        let o_f = IntegerLattice::new(RatMatrix::identity(2)).unwrap();
        let cod = dual(&o_f, &pairing).unwrap();
        assert_eq!(cod.basis(), f.codifferent().zbasis());
        let back = dual(&cod, &pairing).unwrap();
        assert_eq!(back, o_f);
    }

    #[test]
    fn precision_limit_enforced() {
        let f = sqrt2_field();
        let err = f.embed(&f.one(), 1, DEFAULT_DIGITS + 1).unwrap_err();
        assert!(matches!(err, FieldError::PrecisionExceeded { .. }));
        assert_eq!(f.embed(&f.one(), 3, 10).unwrap_err(), FieldError::PlaceOutOfRange(3, 2));
        assert_eq!(f.embed(&f.one(), 0, 10).unwrap_err(), FieldError::PlaceOutOfRange(0, 2));
    }

    #[test]
    fn trace_norm_examples() {
        let f = sqrt2_field();
        let s = sqrt2(&f);
        assert_eq!(f.trace_norm(&s), (rat(0), rat(-2)));
        assert_eq!(f.trace_norm(&f.one()), (rat(2), rat(1)));
        let x = f.element(vec![rat(3), rat(1)]).unwrap(); // 3 + sqrt2
        assert_eq!(f.trace_norm(&x), (rat(6), rat(7)));
    }

    #[test]
    fn inverse_element() {
        let f = sqrt2_field();
        let x = f.element(vec![rat(3), rat(1)]).unwrap();
        let xi = f.inv(&x).unwrap();
        assert_eq!(f.mul(&x, &xi), f.one());
        assert!(f.inv(&f.zero()).is_err());
    }

    #[test]
    fn codifferent_of_q_is_z() {
        let q = TotallyRealField::rationals();
        assert_eq!(q.codifferent(), q.ring_of_integers());
        assert_eq!(q.discriminant(), BigInt::one());
    }

    #[test]
    fn codifferent_of_sqrt2() {
        let f = sqrt2_field();
        assert_eq!(f.discriminant(), BigInt::from(8));
        let cod = f.codifferent();
        // Dual-lattice oracle on the Gram diag(2, 4): expect (1/2, sqrt2/4).
        let expect = FractionalIdeal::new_unchecked(RatMatrix::from_rows(vec![
            vec![rat_frac(1, 2), rat(0)],
            vec![rat(0), rat_frac(1, 4)],
        ]));
        assert_eq!(cod, expect);
        // Tr(x*y) integral for x in O_F, y in the codifferent.
        for i in 0..2 {
            let mut b = f.zero();
            b.coords[i] = rat(1);
            for y in cod.elements(&f) {
                assert!(f.trace(&f.mul(&b, &y)).is_integer());
            }
        }
        // Dual of dual returns O_F: the codifferent of the codifferent under
        // the ideal inverse route.
        let inv = cod.inverse(&f).unwrap();
        let back = inv.inverse(&f).unwrap();
        assert_eq!(back, cod);
    }

    #[test]
    fn ideal_product_and_inverse() {
        let f = sqrt2_field();
        // I = (3, 1 + sqrt2) * O_F as a Z-lattice: generated by
        // 3, 3sqrt2, 1 + sqrt2, (1 + sqrt2) sqrt2 = 2 + sqrt2.
        let gens = RatMatrix::from_rows(vec![
            vec![rat(3), rat(0)],
            vec![rat(0), rat(3)],
            vec![rat(1), rat(1)],
            vec![rat(2), rat(1)],
        ]);
        let i = FractionalIdeal::from_generators(&f, gens).unwrap();
        let iinv = i.inverse(&f).unwrap();
        let prod = i.mul(&f, &iinv);
        assert_eq!(prod, f.ring_of_integers());
        // O_F * O_F = O_F.
        let of = f.ring_of_integers();
        assert_eq!(of.mul(&f, &of), of);
    }

    #[test]
    fn rational_ideal_product() {
        let q = TotallyRealField::rationals();
        let two = FractionalIdeal::new_unchecked(RatMatrix::from_rows(vec![vec![rat(2)]]));
        let half = FractionalIdeal::new_unchecked(RatMatrix::from_rows(vec![vec![rat_frac(1, 2)]]));
        assert_eq!(two.mul(&q, &half), q.ring_of_integers());
        assert_eq!(two.inverse(&q).unwrap(), half);
    }

    #[test]
    fn sign_at_place_exact() {
        let f = sqrt2_field();
        let s = sqrt2(&f);
        assert_eq!(f.sign_at_place(&s, 1).unwrap(), Ordering::Less);
        assert_eq!(f.sign_at_place(&s, 2).unwrap(), Ordering::Greater);
        assert!(f.is_totally_positive(&f.from_rat(rat(5))).unwrap());
        assert!(!f.is_totally_positive(&s).unwrap());
        assert!(f.is_totally_negative(&f.from_rat(rat(-1))).unwrap());
    }
}
