//! Fixture ingestion and validation.
//!
//! A fixture bundles a totally real field, a quaternion algebra with a
//! fixture-supplied order, the polarization element `mu`, the declared
//! discriminant generator, and an optional pure scaling element for the
//! unimodular lattice construction. Exact rationals are serialized as
//! strings `"p/q"`. Every invariant declared by the underlying modules is
//! revalidated on load; the first violation aborts with a message naming
//! the precondition.

use crate::matrix::{parse_rat, Rat, RatMatrix};
use crate::number_field::{FieldElement, FractionalIdeal, TotallyRealField, DEFAULT_DIGITS};
use crate::quaternion::{
    discriminant_q, reduced_discriminant, QuatElement, QuatOrder, QuaternionAlgebra,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture JSON is malformed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("fixture violates precondition `{precondition}`: {detail}")]
    Invalid { precondition: &'static str, detail: String },
    #[error("unknown built-in fixture {0:?} (available: {1})")]
    UnknownBuiltin(String, String),
}

fn invalid(precondition: &'static str, detail: impl ToString) -> FixtureError {
    FixtureError::Invalid { precondition, detail: detail.to_string() }
}

#[derive(Deserialize)]
struct FieldBlock {
    min_poly: Vec<String>,
    integral_basis: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct QuatBlock {
    a: Vec<String>,
    b: Vec<String>,
    order_basis: Vec<Vec<String>>,
    mu: Vec<String>,
    #[serde(rename = "d_B")]
    d_b: Vec<String>,
    scaling_pure: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct FixtureFile {
    name: String,
    #[serde(default)]
    comment: String,
    field: FieldBlock,
    quaternion: QuatBlock,
}

/// A loaded and fully validated fixture.
#[derive(Debug)]
pub struct Fixture {
    pub name: String,
    pub comment: String,
    pub algebra: QuaternionAlgebra,
    pub order: QuatOrder,
    pub mu: QuatElement,
    /// Declared generator of the discriminant ideal.
    pub d_b: FieldElement,
    /// `|Nm(d_B)|` of the declared generator.
    pub d_b_norm: BigInt,
    pub scaling_pure: Option<QuatElement>,
}

const SPLIT_Q: &str = include_str!("../fixtures/split_q.json");
const DIVISION_Q: &str = include_str!("../fixtures/division_q.json");
const REAL_QUADRATIC: &str = include_str!("../fixtures/real_quadratic.json");

pub const BUILTIN_NAMES: [&str; 3] = ["split-q", "division-q", "real-quadratic"];

pub fn builtin_source(name: &str) -> Option<&'static str> {
    match name {
        "split-q" => Some(SPLIT_Q),
        "division-q" => Some(DIVISION_Q),
        "real-quadratic" => Some(REAL_QUADRATIC),
        _ => None,
    }
}

pub fn load_builtin(name: &str) -> Result<Fixture, FixtureError> {
    let src = builtin_source(name).ok_or_else(|| {
        FixtureError::UnknownBuiltin(name.to_string(), BUILTIN_NAMES.join(", "))
    })?;
    load_str(src)
}

fn parse_rats(strings: &[String], what: &'static str) -> Result<Vec<Rat>, FixtureError> {
    strings.iter().map(|s| parse_rat(s).map_err(|e| invalid(what, e))).collect()
}

fn parse_element(
    field: &TotallyRealField,
    strings: &[String],
    what: &'static str,
) -> Result<FieldElement, FixtureError> {
    let coords = parse_rats(strings, what)?;
    field.element(coords).map_err(|e| invalid(what, e))
}

fn parse_quat(
    alg: &QuaternionAlgebra,
    strings: &[String],
    what: &'static str,
) -> Result<QuatElement, FixtureError> {
    let g = alg.degree();
    if strings.len() != 4 * g {
        return Err(invalid(what, format!("expected 4g = {} coordinates", 4 * g)));
    }
    let coords = parse_rats(strings, what)?;
    Ok(alg.element_from_ambient(&coords))
}

/// Principal fractional ideal generated by a field element.
fn principal_ideal(
    field: &TotallyRealField,
    x: &FieldElement,
) -> Result<FractionalIdeal, FixtureError> {
    let g = field.degree();
    let mut rows = Vec::with_capacity(g);
    for s in 0..g {
        let mut e = field.zero();
        e.coords[s] = Rat::one();
        rows.push(field.mul(x, &e).coords);
    }
    FractionalIdeal::from_generators(field, RatMatrix::from_rows(rows))
        .map_err(|e| invalid("principal ideal generator must be nonzero", e))
}

fn is_squarefree(n: &BigInt) -> bool {
    let mut n = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            n /= &p;
            if (&n % &p).is_zero() {
                return false;
            }
        }
        p += 1;
    }
    true
}

pub fn load_str(src: &str) -> Result<Fixture, FixtureError> {
    let file: FixtureFile = serde_json::from_str(src)?;
    let g = file.field.min_poly.len().saturating_sub(1);

    let min_poly: Vec<BigInt> = file
        .field
        .min_poly
        .iter()
        .map(|s| {
            let r = parse_rat(s).map_err(|e| invalid("min_poly coefficients are integers", e))?;
            if !r.is_integer() {
                return Err(invalid("min_poly coefficients are integers", s.clone()));
            }
            Ok(r.to_integer())
        })
        .collect::<Result<_, _>>()?;
    if file.field.integral_basis.len() != g
        || file.field.integral_basis.iter().any(|row| row.len() != g)
    {
        return Err(invalid("integral_basis is a g x g matrix", format!("g = {g}")));
    }
    let basis_rows: Vec<Vec<Rat>> = file
        .field
        .integral_basis
        .iter()
        .map(|row| parse_rats(row, "integral_basis entries are rationals"))
        .collect::<Result<_, _>>()?;
    let field =
        TotallyRealField::new(min_poly, RatMatrix::from_rows(basis_rows), DEFAULT_DIGITS)
            .map_err(|e| invalid("field is totally real with invertible integral basis", e))?;

    // The integral basis must span a ring containing 1.
    let o_f = field.ring_of_integers();
    if !o_f.contains(&field.one()) {
        return Err(invalid("integral basis spans a ring containing 1", "1 not in the span"));
    }
    for i in 0..g {
        for j in 0..g {
            let mut bi = field.zero();
            bi.coords[i] = Rat::one();
            let mut bj = field.zero();
            bj.coords[j] = Rat::one();
            if !o_f.contains(&field.mul(&bi, &bj)) {
                return Err(invalid(
                    "integral basis is multiplicatively closed",
                    format!("basis product {i} x {j} escapes the span"),
                ));
            }
        }
    }

    let a = parse_element(&field, &file.quaternion.a, "structure constant a")?;
    let b = parse_element(&field, &file.quaternion.b, "structure constant b")?;
    let algebra = QuaternionAlgebra::new(field, a, b)
        .map_err(|e| invalid("structure constants are nonzero", e))?;

    if !algebra
        .is_totally_indefinite()
        .map_err(|e| invalid("signs of a, b determinable at every place", e))?
    {
        return Err(invalid(
            "algebra is totally indefinite",
            "some real place has both a and b negative",
        ));
    }

    if file.quaternion.order_basis.len() != 4 * algebra.degree() {
        return Err(invalid(
            "order basis has 4g elements",
            format!("got {}", file.quaternion.order_basis.len()),
        ));
    }
    let basis: Vec<QuatElement> = file
        .quaternion
        .order_basis
        .iter()
        .map(|row| parse_quat(&algebra, row, "order basis coordinates"))
        .collect::<Result<_, _>>()?;
    let order = QuatOrder::new(&algebra, basis)
        .map_err(|e| invalid("order is a full-rank ring containing 1", e))?;

    let mu = parse_quat(&algebra, &file.quaternion.mu, "mu coordinates")?;
    if !order.contains(&algebra, &mu) {
        return Err(invalid("mu lies in the order", "membership test failed"));
    }
    let mu2 = algebra
        .mu_square(&mu)
        .map_err(|e| invalid("mu^2 lies in F and is totally negative", e))?;

    let d_b = parse_element(&algebra.field, &file.quaternion.d_b, "d_B coordinates")?;
    if algebra.field.is_zero(&d_b) {
        return Err(invalid("d_B is nonzero", "zero generator"));
    }
    let ideal_mu2 = principal_ideal(&algebra.field, &mu2)?;
    let ideal_db = principal_ideal(&algebra.field, &d_b)?;
    if ideal_mu2 != ideal_db {
        return Err(invalid(
            "(mu^2) equals (d_B) as ideals",
            "Hermite forms of the two principal ideals differ",
        ));
    }

    let d_b_norm = {
        let n = algebra.field.norm(&d_b).abs();
        if !n.is_integer() {
            return Err(invalid("d_B is integral", "norm is not an integer"));
        }
        n.to_integer()
    };

    // Discriminant validation: the trace-gram route must match the declared
    // generator, and over Q the Hilbert-symbol oracle must agree too.
    let disc = reduced_discriminant(&algebra, &order)
        .map_err(|e| invalid("order trace gram has square determinant", e))?;
    if disc.norm != d_b_norm {
        return Err(invalid(
            "order discriminant matches declared d_B",
            format!("trace gram gives Nm(d_B) = {}, declared {}", disc.norm, d_b_norm),
        ));
    }
    if algebra.degree() == 1 {
        let av = algebra.a().coords[0].clone();
        let bv = algebra.b().coords[0].clone();
        let oracle = discriminant_q(&av, &bv);
        if oracle != d_b_norm {
            return Err(invalid(
                "declared d_B matches the Hilbert-symbol oracle",
                format!("oracle gives {oracle}, declared {d_b_norm}"),
            ));
        }
        if !is_squarefree(&d_b_norm) {
            return Err(invalid("d_B is squarefree over Q", d_b_norm.to_string()));
        }
    }

    let scaling_pure = match &file.quaternion.scaling_pure {
        None => None,
        Some(strings) => {
            let q = parse_quat(&algebra, strings, "scaling element coordinates")?;
            if !algebra.is_pure(&q) || algebra.is_zero(&q) {
                return Err(invalid(
                    "scaling element is a nonzero pure quaternion",
                    "reduced trace must vanish",
                ));
            }
            Some(q)
        }
    };

    Ok(Fixture {
        name: file.name,
        comment: file.comment,
        algebra,
        order,
        mu,
        d_b,
        d_b_norm,
        scaling_pure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load_and_validate() {
        for name in BUILTIN_NAMES {
            let f = load_builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(f.name, name);
            assert!(f.scaling_pure.is_some());
        }
        assert!(matches!(load_builtin("nope"), Err(FixtureError::UnknownBuiltin(..))));
    }

    #[test]
    fn declared_discriminants() {
        assert_eq!(load_builtin("split-q").unwrap().d_b_norm, BigInt::one());
        assert_eq!(load_builtin("division-q").unwrap().d_b_norm, BigInt::from(6));
        assert_eq!(load_builtin("real-quadratic").unwrap().d_b_norm, BigInt::one());
    }

    #[test]
    fn non_totally_negative_mu_is_named() {
        // Tamper with the split fixture: mu = j has mu^2 = 1 > 0.
        let src = SPLIT_Q.replace(
            "\"mu\": [\"0\", \"0\", \"0\", \"1\"]",
            "\"mu\": [\"0\", \"0\", \"1\", \"0\"]",
        );
        let err = load_str(&src).unwrap_err();
        match err {
            FixtureError::Invalid { precondition, .. } => {
                assert!(precondition.contains("totally negative"), "{precondition}");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn wrong_declared_discriminant_is_rejected() {
        let src = DIVISION_Q.replace("\"d_B\": [\"6\"]", "\"d_B\": [\"2\"]");
        let err = load_str(&src).unwrap_err();
        assert!(matches!(err, FixtureError::Invalid { .. }));
    }

    #[test]
    fn definite_algebra_is_rejected() {
        let src = DIVISION_Q.replace("\"b\": [\"3\"]", "\"b\": [\"-3\"]");
        let err = load_str(&src).unwrap_err();
        match err {
            FixtureError::Invalid { precondition, .. } => {
                assert!(precondition.contains("totally indefinite"), "{precondition}");
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
