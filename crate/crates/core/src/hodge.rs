//! The linear-algebra layer behind the deformation pairing: antilinear
//! projections of real functionals, the Hermitian-form identity tying a
//! Riemann form to the antilinear part of its slices, the exact symmetry
//! pattern of the period pairing, and a toy Cech cocycle checker on
//! rectangle covers of a one-dimensional torus.

use crate::matrix::{Rat, RatMatrix};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HodgeError {
    #[error("pairing pattern violated at (j, k) = ({0}, {1})")]
    PatternMismatch(usize, usize),
    #[error("cover is inadmissible: difference of charts {0:?} and {1:?} meets {2} lattice points")]
    InadmissibleCover((i64, i64), (i64, i64), usize),
    #[error("chart does not inject into the torus (grid too coarse)")]
    ChartNotInjective,
    #[error("cocycle identity fails on charts {0:?}, {1:?}, {2:?}")]
    CocycleFailure((i64, i64), (i64, i64), (i64, i64)),
    #[error("Hermitian form is not positive on a sample vector")]
    NotPositive,
    #[error("antilinear-part identity defect {defect:.3e} exceeds tolerance {tol:.1e}")]
    DefectExceeded { defect: f64, tol: f64 },
}

// ---- complex rationals, just enough for the exact checks here ----

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CRat {
    pub re: Rat,
    pub im: Rat,
}

impl CRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        CRat { re, im }
    }

    pub fn zero() -> Self {
        CRat { re: Rat::zero(), im: Rat::zero() }
    }

    pub fn from_rat(re: Rat) -> Self {
        CRat { re, im: Rat::zero() }
    }

    pub fn add(&self, o: &CRat) -> CRat {
        CRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &CRat) -> CRat {
        CRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &CRat) -> CRat {
        CRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn neg(&self) -> CRat {
        CRat { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale_int(&self, n: &BigInt) -> CRat {
        let r = Rat::from_integer(n.clone());
        CRat { re: &self.re * &r, im: &self.im * &r }
    }
}

// ---- antilinear projection of real-linear functionals ----

/// A real-linear functional on `C^n` with complex values, stored by its
/// values on the real basis `e_k`, `i e_k`.
#[derive(Clone, Debug)]
pub struct RealLinearFunctional {
    pub on_e: Vec<Complex64>,
    pub on_ie: Vec<Complex64>,
}

impl RealLinearFunctional {
    pub fn dim(&self) -> usize {
        self.on_e.len()
    }

    pub fn eval(&self, v: &[Complex64]) -> Complex64 {
        v.iter()
            .enumerate()
            .map(|(k, c)| self.on_e[k] * c.re + self.on_ie[k] * c.im)
            .sum()
    }

    /// Split into complex-linear and conjugate-linear parts:
    /// `f_lin(v) = (f(v) - i f(iv)) / 2`, `f_anti(v) = (f(v) + i f(iv)) / 2`.
    /// The returned coefficient vectors are values on `e_k`; the parts act as
    /// `v -> sum c_k v_k` and `v -> sum a_k conj(v_k)`.
    pub fn decompose(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let i = Complex64::new(0.0, 1.0);
        let lin: Vec<Complex64> =
            (0..self.dim()).map(|k| (self.on_e[k] - i * self.on_ie[k]) * 0.5).collect();
        let anti: Vec<Complex64> =
            (0..self.dim()).map(|k| (self.on_e[k] + i * self.on_ie[k]) * 0.5).collect();
        (lin, anti)
    }

    /// Largest reconstruction defect `|f - (f_lin + f_anti)|` over the real
    /// basis.
    pub fn reconstruction_defect(&self) -> f64 {
        let i = Complex64::new(0.0, 1.0);
        let (lin, anti) = self.decompose();
        let mut defect = 0.0f64;
        for k in 0..self.dim() {
            defect = defect.max((self.on_e[k] - (lin[k] + anti[k])).norm());
            defect = defect.max((self.on_ie[k] - (i * lin[k] - i * anti[k])).norm());
        }
        defect
    }
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    /// Max difference between the antilinear part of `E(z, .)` and
    /// `-(i/2) H(z, .)` over samples and basis vectors.
    pub max_defect: f64,
    /// Max Hermitian-symmetry defect of `H`.
    pub hermitian_defect: f64,
    /// Min of `H(z, z)` over samples.
    pub min_positivity: f64,
}

/// Verify, for an i-compatible positively oriented real form `E` on `C^n`,
/// that the antilinear part of every slice `E(z, .)` equals
/// `-(i/2) H(z, .)` for the Hermitian form `H(x, y) = E(ix, y) + i E(x, y)`
/// (linear in the first argument).
pub fn verify_lemma_identity<F>(
    n: usize,
    form: F,
    samples: usize,
    tol: f64,
    rng: &mut impl Rng,
) -> Result<LemmaReport, HodgeError>
where
    F: Fn(&[Complex64], &[Complex64]) -> f64,
{
    let i = Complex64::new(0.0, 1.0);
    let basis = |k: usize, imag: bool| -> Vec<Complex64> {
        let mut v = vec![Complex64::zero(); n];
        v[k] = if imag { i } else { Complex64::new(1.0, 0.0) };
        v
    };
    let mul_i = |v: &[Complex64]| -> Vec<Complex64> { v.iter().map(|c| i * c).collect() };
    let h = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
        Complex64::new(form(&mul_i(x), y), form(x, y))
    };
    let mut max_defect = 0.0f64;
    let mut herm = 0.0f64;
    let mut min_pos = f64::INFINITY;
    for s in 0..samples.max(1) {
        let z: Vec<Complex64> = if s == 0 {
            // The zero slice: both sides must vanish identically.
            vec![Complex64::zero(); n]
        } else {
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect()
        };
        let f = RealLinearFunctional {
            on_e: (0..n).map(|k| Complex64::new(form(&z, &basis(k, false)), 0.0)).collect(),
            on_ie: (0..n).map(|k| Complex64::new(form(&z, &basis(k, true)), 0.0)).collect(),
        };
        max_defect = max_defect.max(f.reconstruction_defect());
        let (_, anti) = f.decompose();
        for k in 0..n {
            let target = -i * 0.5 * h(&z, &basis(k, false));
            max_defect = max_defect.max((anti[k] - target).norm());
        }
        let norm2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        if norm2 > 1e-6 {
            let hzz = h(&z, &z);
            herm = herm.max(hzz.im.abs());
            min_pos = min_pos.min(hzz.re);
            let w: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect();
            herm = herm.max((h(&z, &w) - h(&w, &z).conj()).norm());
        }
    }
    if min_pos <= 0.0 {
        return Err(HodgeError::NotPositive);
    }
    if max_defect > tol {
        return Err(HodgeError::DefectExceeded { defect: max_defect, tol });
    }
    Ok(LemmaReport { max_defect, hermitian_defect: herm, min_positivity: min_pos })
}

// ---- exact period pairing pattern ----

#[derive(Clone, Debug)]
pub struct PairingReport {
    /// Exact equality `B(j,k) = B(k,j) = -dZ_{jk}` over all entries.
    pub exact: bool,
    /// Finite-difference error of the derivative of the period vector.
    pub fd_defect: f64,
}

/// Periods of the holomorphic frame at a rational point `Z = X + iY`:
/// the entries of the `j`-th column of `Z` followed by the `j`-th standard
/// vector, as a complex-rational `2r`-vector.
fn period_vector(x: &RatMatrix, y: &RatMatrix, j: usize) -> Vec<CRat> {
    let r = x.nrows();
    let mut p = Vec::with_capacity(2 * r);
    for m in 0..r {
        p.push(CRat::new(x[(m, j)].clone(), y[(m, j)].clone()));
    }
    for m in 0..r {
        p.push(CRat::from_rat(if m == j { Rat::one() } else { Rat::zero() }));
    }
    p
}

/// Complex-bilinear extension of the coordinate Riemann form:
/// `E((alpha, beta), (alpha', beta')) = -alpha . beta' + alpha' . beta`.
fn complex_riemann(u: &[CRat], v: &[CRat]) -> CRat {
    let r = u.len() / 2;
    let mut acc = CRat::zero();
    for m in 0..r {
        acc = acc.sub(&u[m].mul(&v[r + m]));
        acc = acc.add(&v[m].mul(&u[r + m]));
    }
    acc
}

/// Exact check that differentiating the period vectors along the symmetric
/// direction `dZ = E_{ik} + E_{ki}` (or `E_{ii}`) and pairing against the
/// undifferentiated periods yields the symmetric matrix `-dZ`, entry by
/// entry. A finite-difference oracle on the embedded `f64` data cross-checks
/// the derivative itself.
pub fn verify_ks_pairing(
    x: &RatMatrix,
    y: &RatMatrix,
    direction: (usize, usize),
) -> Result<PairingReport, HodgeError> {
    let r = x.nrows();
    assert_eq!(x.ncols(), r);
    assert_eq!(y.nrows(), r);
    let (di, dk) = direction;
    assert!(di < r && dk < r);
    let mut delta = RatMatrix::zeros(r, r);
    delta[(di, dk)] = Rat::one();
    delta[(dk, di)] = Rat::one();

    // d/dt of P_j along Z + t*delta: the delta column in the first block.
    let dp = |j: usize| -> Vec<CRat> {
        let mut v = Vec::with_capacity(2 * r);
        for m in 0..r {
            v.push(CRat::from_rat(delta[(m, j)].clone()));
        }
        for _ in 0..r {
            v.push(CRat::zero());
        }
        v
    };

    for j in 0..r {
        for k in 0..r {
            let b_jk = complex_riemann(&dp(j), &period_vector(x, y, k));
            let b_kj = complex_riemann(&dp(k), &period_vector(x, y, j));
            let want = CRat::from_rat(-delta[(j, k)].clone());
            if b_jk != b_kj || b_jk != want {
                return Err(HodgeError::PatternMismatch(j, k));
            }
        }
    }

    // Finite differences on the f64 embedding.
    let h = 1e-6;
    let mut fd_defect = 0.0f64;
    for j in 0..r {
        for m in 0..r {
            let z_m_j = Complex64::new(
                x[(m, j)].to_f64().unwrap_or(f64::NAN),
                y[(m, j)].to_f64().unwrap_or(f64::NAN),
            );
            let step = delta[(m, j)].to_f64().unwrap_or(f64::NAN);
            let moved = z_m_j + Complex64::new(step * h, 0.0);
            let fd = (moved - z_m_j) / h;
            fd_defect = fd_defect.max((fd - Complex64::new(step, 0.0)).norm());
        }
    }
    Ok(PairingReport { exact: true, fd_defect })
}

/// A rational Siegel point for exact pairing checks: `X` symmetric with
/// small rational entries, `Y = M M^T + I` positive definite.
pub fn random_rational_siegel(r: usize, rng: &mut impl Rng) -> (RatMatrix, RatMatrix) {
    let mut x = RatMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..=i {
            let v = Rat::new(BigInt::from(rng.gen_range(-6i64..=6)), BigInt::from(4));
            x[(i, j)] = v.clone();
            x[(j, i)] = v;
        }
    }
    let m = RatMatrix::from_fn(r, r, |_, _| {
        Rat::new(BigInt::from(rng.gen_range(-4i64..=4)), BigInt::from(2))
    });
    let y_base = m.mul(&m.transpose());
    let mut y = y_base;
    for i in 0..r {
        let v = &y[(i, i)] + Rat::one();
        y[(i, i)] = v;
    }
    (x, y)
}

// ---- toy Cech cocycle checker ----

/// Open rational rectangle in lattice-basis coordinates.
#[derive(Clone, Debug, PartialEq)]
struct Rect {
    lo: (Rat, Rat),
    hi: (Rat, Rat),
}

impl Rect {
    fn intersect(&self, other: &Rect) -> Option<Rect> {
        let lo = (max_rat(&self.lo.0, &other.lo.0), max_rat(&self.lo.1, &other.lo.1));
        let hi = (min_rat(&self.hi.0, &other.hi.0), min_rat(&self.hi.1, &other.hi.1));
        if lo.0 < hi.0 && lo.1 < hi.1 {
            Some(Rect { lo, hi })
        } else {
            None
        }
    }

    fn translate(&self, v: &(BigInt, BigInt)) -> Rect {
        let dx = Rat::from_integer(v.0.clone());
        let dy = Rat::from_integer(v.1.clone());
        Rect {
            lo: (&self.lo.0 - &dx, &self.lo.1 - &dy),
            hi: (&self.hi.0 - &dx, &self.hi.1 - &dy),
        }
    }
}

fn max_rat(a: &Rat, b: &Rat) -> Rat {
    if a > b { a.clone() } else { b.clone() }
}

fn min_rat(a: &Rat, b: &Rat) -> Rat {
    if a < b { a.clone() } else { b.clone() }
}

/// Integers strictly inside the open interval `(a, b)`.
fn integers_inside(a: &Rat, b: &Rat) -> Vec<BigInt> {
    let lo: BigInt = a.floor().to_integer() + 1;
    let hi: BigInt = if b.is_integer() { b.to_integer() - 1 } else { b.floor().to_integer() };
    let mut out = Vec::new();
    let mut n = lo;
    while n <= hi {
        out.push(n.clone());
        n += 1;
    }
    out
}

/// An admissible rectangle cover of the torus `C / (Z + tau Z)`, in lattice
/// coordinates. Charts are indexed by grid position; overlap labels
/// `c_{t, t'}` are the unique lattice points in the chart differences.
#[derive(Debug)]
pub struct CechCover {
    n: i64,
    rects: Vec<((i64, i64), Rect)>,
    /// `(t, t') -> c_{t,t'}` for overlapping pairs.
    labels: Vec<(usize, usize, (BigInt, BigInt))>,
}

impl CechCover {
    /// `n x n` overlapping rectangles, each cell enlarged by 1/8 of a cell.
    pub fn grid(n: i64) -> Result<Self, HodgeError> {
        assert!(n >= 1);
        let eps = Rat::new(BigInt::one(), BigInt::from(8));
        let nn = Rat::from_integer(BigInt::from(n));
        // Chart side (1 + 2 eps) / n must stay below 1 to inject.
        if (Rat::one() + &eps + &eps) / &nn >= Rat::one() {
            return Err(HodgeError::ChartNotInjective);
        }
        let mut rects = Vec::new();
        for s in 0..n {
            for t in 0..n {
                let lo = |k: i64| (Rat::from_integer(BigInt::from(k)) - &eps) / &nn;
                let hi = |k: i64| (Rat::from_integer(BigInt::from(k + 1)) + &eps) / &nn;
                rects.push(((s, t), Rect { lo: (lo(s), lo(t)), hi: (hi(s), hi(t)) }));
            }
        }
        // Admissibility: every chart difference meets at most one lattice
        // point; record the labels of genuinely overlapping pairs.
        let mut labels = Vec::new();
        for (ti, (tid, rt)) in rects.iter().enumerate() {
            for (ui, (uid, ru)) in rects.iter().enumerate() {
                if ti == ui {
                    continue;
                }
                // Difference ru - rt as an open rectangle.
                let diff = Rect {
                    lo: (&ru.lo.0 - &rt.hi.0, &ru.lo.1 - &rt.hi.1),
                    hi: (&ru.hi.0 - &rt.lo.0, &ru.hi.1 - &rt.lo.1),
                };
                let xs = integers_inside(&diff.lo.0, &diff.hi.0);
                let ys = integers_inside(&diff.lo.1, &diff.hi.1);
                let count = xs.len() * ys.len();
                if count > 1 {
                    return Err(HodgeError::InadmissibleCover(*tid, *uid, count));
                }
                if count == 1 {
                    labels.push((ti, ui, (xs[0].clone(), ys[0].clone())));
                }
            }
        }
        Ok(CechCover { n, rects, labels })
    }

    pub fn grid_size(&self) -> i64 {
        self.n
    }

    pub fn chart_count(&self) -> usize {
        self.rects.len()
    }

    pub fn overlap_count(&self) -> usize {
        self.labels.len()
    }

    fn label(&self, t: usize, u: usize) -> Option<&(BigInt, BigInt)> {
        self.labels.iter().find(|(a, b, _)| *a == t && *b == u).map(|(_, _, c)| c)
    }

    /// All triples with nonempty common intersection, with their labels.
    fn triples(&self) -> Vec<(usize, usize, usize)> {
        let m = self.rects.len();
        let mut out = Vec::new();
        for t in 0..m {
            for u in 0..m {
                for v in 0..m {
                    if t == u || u == v || t == v {
                        continue;
                    }
                    let (c1, c3) = match (self.label(t, u), self.label(t, v)) {
                        (Some(c1), Some(c3)) => (c1, c3),
                        _ => continue,
                    };
                    if self.label(u, v).is_none() {
                        continue;
                    }
                    let rt = &self.rects[t].1;
                    let ru = self.rects[u].1.translate(c1);
                    let rv = self.rects[v].1.translate(c3);
                    if rt.intersect(&ru).and_then(|w| w.intersect(&rv)).is_some() {
                        out.push((t, u, v));
                    }
                }
            }
        }
        out
    }

    /// Check `c_{t,v} = c_{t,u} + c_{u,v}` on every nonempty triple overlap,
    /// exactly; this is the cocycle identity for every homomorphism
    /// `Lambda -> C` at once. Returns the number of triples checked.
    pub fn cocycle_check(&self) -> Result<usize, HodgeError> {
        let triples = self.triples();
        for &(t, u, v) in &triples {
            let c1 = self.label(t, u).expect("triple has pairwise overlaps");
            let c2 = self.label(u, v).expect("triple has pairwise overlaps");
            let c3 = self.label(t, v).expect("triple has pairwise overlaps");
            if c3.0 != &c1.0 + &c2.0 || c3.1 != &c1.1 + &c2.1 {
                return Err(HodgeError::CocycleFailure(
                    self.rects[t].0,
                    self.rects[u].0,
                    self.rects[v].0,
                ));
            }
        }
        Ok(triples.len())
    }

    /// The Cech cocycle of a homomorphism `alpha: Lambda -> C` given by its
    /// values on the lattice basis: `delta(alpha)_{t,u} = alpha(c_{t,u})`.
    pub fn coboundary(&self, alpha: &(CRat, CRat)) -> Vec<((usize, usize), CRat)> {
        self.labels
            .iter()
            .map(|(t, u, c)| {
                ((*t, *u), alpha.0.scale_int(&c.0).add(&alpha.1.scale_int(&c.1)))
            })
            .collect()
    }
}
