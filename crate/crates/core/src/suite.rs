//! Orchestration: run selected check families deterministically under a
//! seed and assemble a report.
//!
//! Randomness discipline: one labeled substream per check and per sample
//! index, so adding or reordering checks never changes any other check's
//! samples, and parallel sweeps merge by index into the sequential result.

use crate::fixture::{load_builtin, load_str, Fixture, FixtureError};
use crate::hodge;
use crate::lattice;
use crate::local;
use crate::number_field::DEFAULT_DIGITS;
use crate::quaternion;
use crate::report::{CheckRecord, VerificationReport};
use crate::sampling::{map_samples, rng_for, rng_for_sample};
use crate::siegel;
use crate::twisted;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use std::time::Instant;

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const LEMMA_TOL: f64 = 1e-12;
pub const FD_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalSide {
    Both,
    Good,
    Bad,
}

#[derive(Clone, Debug)]
pub enum Selection {
    Siegel { r: usize, g: usize },
    TwistedBuiltin { name: String },
    TwistedSource { source: String },
    Local { p: u64, k: u32, side: LocalSide },
    LemmaApp,
    KsPairing { r: usize },
    Cech { grid: i64 },
    All,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub digits: u32,
    pub samples: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, digits: DEFAULT_DIGITS, samples: 100 }
    }
}

/// Execute the selected suites. Fixture problems abort (the caller maps them
/// to exit code 2); individual check failures are recorded, not raised.
pub fn run_suite(
    selections: &[Selection],
    opts: RunOptions,
) -> Result<VerificationReport, FixtureError> {
    let mut report = VerificationReport::new(opts.seed, opts.digits);
    for sel in expand(selections) {
        let records = match &sel {
            Selection::Siegel { r, g } => siegel_checks(*r, *g, opts),
            Selection::TwistedBuiltin { name } => twisted_checks(&load_builtin(name)?, opts),
            Selection::TwistedSource { source } => twisted_checks(&load_str(source)?, opts),
            Selection::Local { p, k, side } => local_checks(*p, *k, *side),
            Selection::LemmaApp => lemma_checks(opts)?,
            Selection::KsPairing { r } => ks_pairing_checks(*r, opts),
            Selection::Cech { grid } => cech_checks(*grid),
            Selection::All => unreachable!("expanded"),
        };
        report.extend(records);
    }
    report.finalize();
    report.checks.dedup_by(|a, b| a.id == b.id);
    Ok(report)
}

fn expand(selections: &[Selection]) -> Vec<Selection> {
    let mut out = Vec::new();
    for sel in selections {
        match sel {
            Selection::All => {
                for (r, g) in [(1, 1), (2, 1), (3, 1), (1, 2)] {
                    out.push(Selection::Siegel { r, g });
                }
                for name in crate::fixture::BUILTIN_NAMES {
                    out.push(Selection::TwistedBuiltin { name: name.to_string() });
                }
                for (p, k) in [(5, 2), (5, 3), (13, 2), (13, 3)] {
                    out.push(Selection::Local { p, k, side: LocalSide::Both });
                }
                out.push(Selection::LemmaApp);
                for r in 1..=3 {
                    out.push(Selection::KsPairing { r });
                }
                out.push(Selection::Cech { grid: 3 });
            }
            other => out.push(other.clone()),
        }
    }
    out
}

fn timed(record: CheckRecord, start: Instant) -> CheckRecord {
    let mut r = record;
    r.runtime_ms = Some(start.elapsed().as_millis());
    r
}

// ---- Siegel family ----

fn siegel_checks(r: usize, g: usize, opts: RunOptions) -> Vec<CheckRecord> {
    let params =
        format!("r={r} g={g} samples={} seed={} digits={}", opts.samples, opts.seed, opts.digits);
    let tag = format!("r{r}g{g}");
    let mut out = Vec::new();

    // Metric identity and covolume cross-check on the same sample points.
    let start = Instant::now();
    let label = format!("siegel/main/{tag}");
    let per_sample: Vec<Result<(f64, f64), siegel::SiegelError>> =
        map_samples(opts.samples, |i| {
            let mut rng = rng_for_sample(opts.seed, &label, i);
            let z = siegel::random_point(r, g, &mut rng);
            let fal = siegel::faltings_norm_sq(&z)?;
            let main = siegel::verify_main(&z)?;
            Ok((main, fal.residual))
        });
    match per_sample.into_iter().collect::<Result<Vec<_>, _>>() {
        Err(e) => {
            out.push(timed(CheckRecord::failed(format!("siegel/main/{tag}"), &params, &e), start));
            out.push(timed(CheckRecord::failed(format!("siegel/covolume/{tag}"), &params, &e), start));
        }
        Ok(pairs) => {
            let mains: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let covs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let max_main = mains.iter().cloned().fold(0.0, f64::max);
            let max_cov = covs.iter().cloned().fold(0.0, f64::max);
            out.push(timed(
                CheckRecord::residual_check(
                    format!("siegel/main/{tag}"),
                    &params,
                    max_main,
                    RESIDUAL_TOL,
                )
                .with_samples(mains),
                start,
            ));
            out.push(timed(
                CheckRecord::residual_check(
                    format!("siegel/covolume/{tag}"),
                    &params,
                    max_cov,
                    RESIDUAL_TOL,
                )
                .with_samples(covs),
                start,
            ));
        }
    }

    // Riemann axioms: positivity margin and i-compatibility.
    let start = Instant::now();
    let label = format!("siegel/axioms/{tag}");
    let id = label.clone();
    let points = opts.samples.clamp(1, 20);
    let results: Vec<Result<siegel::AxiomReport, siegel::SiegelError>> =
        map_samples(points, |i| {
            let mut rng = rng_for_sample(opts.seed, &label, i);
            let z = siegel::random_point(r, g, &mut rng);
            siegel::riemann_axioms(&z, 10, &mut rng)
        });
    match results.into_iter().collect::<Result<Vec<_>, _>>() {
        Err(e) => out.push(timed(CheckRecord::failed(id, &params, &e), start)),
        Ok(reports) => {
            let min_margin = reports.iter().map(|a| a.min_margin).fold(f64::INFINITY, f64::min);
            let compat = reports.iter().map(|a| a.max_compat_defect).fold(0.0, f64::max);
            let flipped = reports.iter().filter(|a| a.orientation_flipped).count();
            let consistent = flipped == 0 || flipped == reports.len();
            let ok = min_margin > 0.0 && compat <= RESIDUAL_TOL && consistent;
            let note = format!(
                "min positivity margin {:.3e}; oriented form {}",
                min_margin,
                if flipped > 0 { "-E" } else { "E" }
            );
            let mut rec = CheckRecord::residual_check(id, &params, compat, RESIDUAL_TOL)
                .with_note(note);
            if !ok {
                rec.status = crate::report::CheckStatus::Fail;
                rec.witness = Some("positivity or orientation consistency failed".into());
            }
            out.push(timed(rec, start));
        }
    }

    // Symplectic action: composition law on random points.
    let start = Instant::now();
    let label = format!("siegel/act/{tag}");
    let id = label.clone();
    let n = opts.samples.clamp(1, 25);
    let defects: Vec<Result<f64, siegel::SiegelError>> = map_samples(n, |i| {
        let mut rng = rng_for_sample(opts.seed, &label, i);
        let z = siegel::random_point(r, g, &mut rng);
        let g1 = siegel::random_symplectic(r, &mut rng);
        let g2 = siegel::random_symplectic(r, &mut rng);
        let place = 0;
        let lhs = siegel::act(&g1.compose(&g2), &z, place)?;
        let rhs = siegel::act(&g1, &siegel::act(&g2, &z, place)?, place)?;
        Ok((lhs.block(place) - rhs.block(place))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max))
    });
    match defects.into_iter().collect::<Result<Vec<_>, _>>() {
        Err(e) => out.push(timed(CheckRecord::failed(id, &params, &e), start)),
        Ok(ds) => {
            let max = ds.into_iter().fold(0.0, f64::max);
            out.push(timed(CheckRecord::residual_check(id, &params, max, RESIDUAL_TOL), start));
        }
    }

    out
}

// ---- twisted family ----

fn twisted_checks(fx: &Fixture, opts: RunOptions) -> Vec<CheckRecord> {
    let name = fx.name.clone();
    let g = fx.algebra.degree();
    let params = format!(
        "fixture={name} g={g} samples={} seed={} digits={}",
        opts.samples, opts.seed, opts.digits
    );
    let d_b_norm = fx.d_b_norm.to_f64().unwrap_or(f64::NAN);
    let mut out = Vec::new();

    let family = match twisted::fixture_family(fx, opts.digits) {
        Ok(f) => f,
        Err(e) => {
            out.push(CheckRecord::failed(format!("twisted/family/{name}"), &params, e));
            return out;
        }
    };

    // Covolume identity.
    let start = Instant::now();
    let label = format!("twisted/volume/{name}");
    let id = label.clone();
    let results: Vec<Result<(f64, f64), twisted::TwistedError>> =
        map_samples(opts.samples, |i| {
            let mut rng = rng_for_sample(opts.seed, &label, i);
            let tau = twisted::random_point(g, &mut rng);
            let v = twisted::verify_volume(&family, d_b_norm, &tau)?;
            Ok((v.residual, v.raw_residual))
        });
    match results.into_iter().collect::<Result<Vec<_>, _>>() {
        Err(e) => out.push(timed(CheckRecord::failed(id, &params, &e), start)),
        Ok(pairs) => {
            let max = pairs.iter().map(|p| p.0.max(p.1)).fold(0.0, f64::max);
            let d_f = fx.algebra.field.discriminant();
            out.push(timed(
                CheckRecord::residual_check(id, &params, max, RESIDUAL_TOL).with_note(format!(
                    "covolume normalized by d_F^2 = {}; d_B^g read as Nm(d_B) = {}",
                    &d_f * &d_f,
                    fx.d_b_norm
                )),
                start,
            ));
        }
    }

    // Metric identity.
    let start = Instant::now();
    let label = format!("twisted/main/{name}");
    let id = label.clone();
    let results: Vec<Result<f64, twisted::TwistedError>> = map_samples(opts.samples, |i| {
        let mut rng = rng_for_sample(opts.seed, &label, i);
        let tau = twisted::random_point(g, &mut rng);
        twisted::verify_main(&family, d_b_norm, &tau)
    });
    match results.into_iter().collect::<Result<Vec<_>, _>>() {
        Err(e) => out.push(timed(CheckRecord::failed(id, &params, &e), start)),
        Ok(rs) => {
            let max = rs.into_iter().fold(0.0, f64::max);
            out.push(timed(CheckRecord::residual_check(id, &params, max, RESIDUAL_TOL), start));
        }
    }

    // Riemann axioms: exact alternation/integrality, sampled positivity.
    let start = Instant::now();
    let label = format!("twisted/axioms/{name}");
    let id = label.clone();
    let mut rng = rng_for(opts.seed, &label);
    let tau = twisted::random_point(g, &mut rng);
    match twisted::riemann_axioms(&fx.algebra, &fx.order, &fx.mu, &tau, 50, &mut rng, opts.digits)
    {
        Err(e) => out.push(timed(CheckRecord::failed(id, &params, &e), start)),
        Ok(rep) => {
            let ok = rep.min_margin > 0.0
                && rep.max_compat_defect <= RESIDUAL_TOL
                && rep.integral_on_order;
            let mut rec =
                CheckRecord::residual_check(id, &params, rep.max_compat_defect, RESIDUAL_TOL)
                    .with_note(format!(
                        "min positivity margin {:.3e}; oriented form {}; integral on order: {}",
                        rep.min_margin,
                        if rep.orientation_flipped { "-E (mu sign flipped)" } else { "E" },
                        rep.integral_on_order
                    ));
            if !ok {
                rec.status = crate::report::CheckStatus::Fail;
                rec.witness = Some("positivity or integrality failed".into());
            }
            out.push(timed(rec, start));
        }
    }

    // Unimodularity of the scaled lattice, exact.
    let start = Instant::now();
    let id = format!("twisted/unimodular/{name}");
    match &fx.scaling_pure {
        None => out.push(timed(
            CheckRecord::failed(id, &params, "fixture supplies no scaling element"),
            start,
        )),
        Some(a_pure) => {
            let rec = match quaternion::scaled_unimodular_lattice(&fx.algebra, &fx.order, a_pure)
                .and_then(|s| Ok((quaternion::is_unimodular(&s)?, s)))
            {
                Err(e) => CheckRecord::failed(id, &params, e),
                Ok((ok, _)) => CheckRecord::exact_check(id, &params, ok),
            };
            out.push(timed(rec, start));
        }
    }

    // Dual-lattice index under the Q-trace pairing: Nm(d_B)^2 over Q, and
    // Nm(d_B)^2 d_F^4 in general (the codifferent enters once per ambient
    // coordinate slot; only the global form is well posed).
    let start = Instant::now();
    let id = format!("twisted/dual-index/{name}");
    let rec = (|| -> Result<CheckRecord, Box<dyn std::error::Error>> {
        let pairing = fx.algebra.trace_pairing_gram();
        let dual = lattice::dual(fx.order.lattice(), &pairing)?;
        let idx = lattice::index(fx.order.lattice(), &dual)?;
        let d_f = fx.algebra.field.discriminant();
        let want = &fx.d_b_norm * &fx.d_b_norm * d_f.pow(4);
        Ok(CheckRecord::exact_check(id.clone(), &params, idx == want)
            .with_note(format!("index {idx}, expected Nm(d_B)^2 d_F^4 = {want}")))
    })()
    .unwrap_or_else(|e| CheckRecord::failed(format!("twisted/dual-index/{name}"), &params, e));
    out.push(timed(rec, start));

    out
}

// ---- local lemmas ----

fn local_checks(p: u64, k: u32, side: LocalSide) -> Vec<CheckRecord> {
    let params = format!("p={p} k={k}");
    let tag = format!("p{p}k{k}");
    let mut out = Vec::new();

    if matches!(side, LocalSide::Both | LocalSide::Bad) {
        let start = Instant::now();
        let id = format!("local/classify/{tag}");
        let rec = match local::TruncatedUnramified::new(p, k)
            .and_then(|ring| local::classify_modules(&ring))
        {
            Err(e) => CheckRecord::failed(id, &params, e),
            Ok(cls) => CheckRecord::exact_check(
                id,
                &params,
                cls.witness == (false, true) && cls.no_isomorphism,
            )
            .with_note("j surjective on e1 for T' only; Hom(T, T') all singular"),
        };
        out.push(timed(rec, start));

        let start = Instant::now();
        let id = format!("local/hom/{tag}");
        let rec = match local::TruncatedUnramified::new(p, k).and_then(|ring| {
            let cls = local::classify_modules(&ring)?;
            local::hom_module(&ring, &cls.t_prime, &cls.t)
        }) {
            Err(e) => CheckRecord::failed(id, &params, e),
            Ok(h) => CheckRecord::exact_check(id, &params, h.is_free_rank_one)
                .with_note("basis pair (1, p) up to a unit".to_string()),
        };
        out.push(timed(rec, start));

        let start = Instant::now();
        let id = format!("local/bad/{tag}");
        let rec = match local::verify_bad_prime(p, k) {
            Err(e) => CheckRecord::failed(id, &params, e),
            Ok(rep) => CheckRecord::exact_check(
                id,
                &params,
                rep.image_matches && rep.det_valuation == 1,
            )
            .with_note(format!(
                "image = e1 T + p e2 T; det image has valuation {} (p det T)",
                rep.det_valuation
            )),
        };
        out.push(timed(rec, start));
    }

    if matches!(side, LocalSide::Both | LocalSide::Good) {
        let start = Instant::now();
        let id = format!("local/good/{tag}");
        let rec = match local::verify_good_prime(p, k) {
            Err(e) => CheckRecord::failed(id, &params, e),
            Ok(rep) => CheckRecord::exact_check(
                id,
                &params,
                rep.det_index_one && rep.eps_swaps_components && rep.hom_rank_one,
            )
            .with_note("determinant map index 1".to_string()),
        };
        out.push(timed(rec, start));
    }

    out
}

// ---- antilinear-part identity and friends ----

fn orient_siegel(z: &siegel::SiegelPoint, place: usize) -> siegel::ExtendedForm {
    let mut form = siegel::ExtendedForm::new(z, place);
    let r = z.r();
    let mut probe = vec![Complex64::new(0.0, 0.0); r];
    probe[0] = Complex64::new(1.0, 0.0);
    let iprobe: Vec<Complex64> = probe.iter().map(|c| Complex64::new(-c.im, c.re)).collect();
    if form.eval(&iprobe, &probe) < 0.0 {
        form.sign = -1.0;
    }
    form
}

fn lemma_checks(opts: RunOptions) -> Result<Vec<CheckRecord>, FixtureError> {
    let mut out = Vec::new();
    let params = format!("seed={} digits={}", opts.seed, opts.digits);

    // Reconstruction of random real-linear functionals.
    let start = Instant::now();
    let label = "lemma-app/decompose";
    let defects: Vec<f64> = map_samples(50, |i| {
        let mut rng = rng_for_sample(opts.seed, label, i);
        let n = 3;
        let f = hodge::RealLinearFunctional {
            on_e: (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect(),
            on_ie: (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect(),
        };
        f.reconstruction_defect()
    });
    let max = defects.into_iter().fold(0.0, f64::max);
    out.push(timed(CheckRecord::residual_check(label, &params, max, 1e-14), start));

    // Siegel families r = 1, 2: 10 points x 5 slice samples.
    for r in [1usize, 2] {
        let start = Instant::now();
        let label = format!("lemma-app/siegel-r{r}");
        let id = label.clone();
        let results: Vec<Result<f64, hodge::HodgeError>> = map_samples(10, |i| {
            let mut rng = rng_for_sample(opts.seed, &label, i);
            let z = siegel::random_point_conditioned(r, 1, 0.5, &mut rng);
            let form = orient_siegel(&z, 0);
            let rep =
                hodge::verify_lemma_identity(r, |u, v| form.eval(u, v), 5, LEMMA_TOL, &mut rng)?;
            Ok(rep.max_defect)
        });
        let rec = match results.into_iter().collect::<Result<Vec<_>, _>>() {
            Err(e) => CheckRecord::failed(id, &params, e),
            Ok(ds) => {
                let max = ds.into_iter().fold(0.0, f64::max);
                CheckRecord::residual_check(id, &params, max, LEMMA_TOL)
                    .with_note("50 slice samples; Hermitian form oriented positive")
            }
        };
        out.push(timed(rec, start));
    }

    // Twisted families: each built-in fixture.
    for name in crate::fixture::BUILTIN_NAMES {
        let fx = load_builtin(name)?;
        let g = fx.algebra.degree();
        let start = Instant::now();
        let label = format!("lemma-app/twisted-{name}");
        let id = label.clone();
        let rec = (|| -> Result<CheckRecord, twisted::TwistedError> {
            let family = twisted::fixture_family(&fx, opts.digits)?;
            let mut max = 0.0f64;
            for i in 0..5usize {
                let mut rng = rng_for_sample(opts.seed, &label, i);
                let tau = twisted::random_point(g, &mut rng);
                let lattice = family.lattice_at(&tau)?;
                let mut form =
                    twisted::TwistedExtendedForm::new(&fx.algebra, &fx.order, &fx.mu, &lattice)?;
                let mut probe = vec![Complex64::new(0.0, 0.0); 2 * g];
                probe[0] = Complex64::new(1.0, 0.0);
                let iprobe: Vec<Complex64> =
                    probe.iter().map(|c| Complex64::new(-c.im, c.re)).collect();
                if form.eval(&iprobe, &probe) < 0.0 {
                    form.sign = -1.0;
                }
                let rep = hodge::verify_lemma_identity(
                    2 * g,
                    |u, v| form.eval(u, v),
                    10,
                    LEMMA_TOL,
                    &mut rng,
                )
                .map_err(|e| twisted::TwistedError::AxiomFailure(e.to_string()))?;
                max = max.max(rep.max_defect);
            }
            Ok(CheckRecord::residual_check(id.clone(), &params, max, LEMMA_TOL)
                .with_note("50 slice samples; Hermitian form oriented positive"))
        })()
        .unwrap_or_else(|e| {
            CheckRecord::failed(format!("lemma-app/twisted-{name}"), &params, e)
        });
        out.push(timed(rec, start));
    }

    Ok(out)
}

// ---- period pairing pattern ----

fn ks_pairing_checks(r: usize, opts: RunOptions) -> Vec<CheckRecord> {
    let params = format!("r={r} seed={}", opts.seed);
    let label = format!("ks-pairing/r{r}");
    let mut out = Vec::new();
    let start = Instant::now();
    let mut exact_ok = true;
    let mut witness = None;
    let mut fd = 0.0f64;
    for i in 0..10usize {
        let mut rng = rng_for_sample(opts.seed, &label, i);
        let (x, y) = hodge::random_rational_siegel(r, &mut rng);
        for di in 0..r {
            for dk in di..r {
                match hodge::verify_ks_pairing(&x, &y, (di, dk)) {
                    Ok(rep) => fd = fd.max(rep.fd_defect),
                    Err(e) => {
                        exact_ok = false;
                        witness.get_or_insert_with(|| e.to_string());
                    }
                }
            }
        }
    }
    let mut rec = CheckRecord::exact_check(format!("ks-pairing/exact/r{r}"), &params, exact_ok)
        .with_note("pairing matrix equals -dZ, symmetric, 10 rational points, all directions");
    rec.witness = witness;
    out.push(timed(rec, start));
    let start = Instant::now();
    out.push(timed(
        CheckRecord::residual_check(format!("ks-pairing/fd/r{r}"), &params, fd, FD_TOL)
            .with_note("finite-difference derivative of period vectors, h = 1e-6"),
        start,
    ));
    out
}

// ---- Cech cover ----

fn cech_checks(grid: i64) -> Vec<CheckRecord> {
    let params = format!("grid={grid}");
    let mut out = Vec::new();
    let start = Instant::now();
    let id_adm = format!("cech/admissible/grid{grid}");
    let cover = match hodge::CechCover::grid(grid) {
        Err(e) => {
            out.push(timed(CheckRecord::failed(id_adm, &params, e), start));
            return out;
        }
        Ok(c) => {
            out.push(timed(
                CheckRecord::exact_check(id_adm, &params, true).with_note(format!(
                    "{} charts, {} labeled overlaps",
                    c.chart_count(),
                    c.overlap_count()
                )),
                start,
            ));
            c
        }
    };

    let start = Instant::now();
    let id = format!("cech/cocycle/grid{grid}");
    let rec = match cover.cocycle_check() {
        Err(e) => CheckRecord::failed(id, &params, e),
        Ok(triples) => CheckRecord::exact_check(id, &params, triples > 0)
            .with_note(format!("{triples} triple overlaps checked exactly")),
    };
    out.push(timed(rec, start));

    let start = Instant::now();
    let id = format!("cech/additivity/grid{grid}");
    let a = (
        hodge::CRat::new(crate::matrix::rat_frac(1, 2), crate::matrix::rat(1)),
        hodge::CRat::new(crate::matrix::rat(-2), crate::matrix::rat_frac(3, 4)),
    );
    let b = (
        hodge::CRat::new(crate::matrix::rat(3), crate::matrix::rat(0)),
        hodge::CRat::new(crate::matrix::rat_frac(1, 3), crate::matrix::rat(5)),
    );
    let sum = (a.0.add(&b.0), a.1.add(&b.1));
    let da = cover.coboundary(&a);
    let db = cover.coboundary(&b);
    let dsum = cover.coboundary(&sum);
    let zero = (hodge::CRat::zero(), hodge::CRat::zero());
    let zero_ok = cover.coboundary(&zero).iter().all(|(_, v)| *v == hodge::CRat::zero());
    let additive = da
        .iter()
        .zip(&db)
        .zip(&dsum)
        .all(|(((ka, va), (kb, vb)), (ks, vs))| ka == kb && ka == ks && va.add(vb) == *vs);
    out.push(timed(
        CheckRecord::exact_check(id, &params, zero_ok && additive)
            .with_note("coboundary is additive and kills the zero homomorphism"),
        start,
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_selection_gives_empty_report() {
        let r = run_suite(&[], RunOptions::default()).unwrap();
        assert!(r.checks.is_empty());
        assert!(r.all_passed());
    }

    #[test]
    fn siegel_small_run_passes_and_is_deterministic() {
        let opts = RunOptions { seed: 7, digits: 40, samples: 10 };
        let sel = [Selection::Siegel { r: 1, g: 1 }];
        let r1 = run_suite(&sel, opts).unwrap();
        let r2 = run_suite(&sel, opts).unwrap();
        assert!(r1.all_passed(), "{}", r1.to_text_table());
        assert_eq!(r1.to_json(), r2.to_json());
    }

    #[test]
    fn local_run_passes() {
        let r = run_suite(
            &[Selection::Local { p: 5, k: 2, side: LocalSide::Both }],
            RunOptions::default(),
        )
        .unwrap();
        assert!(r.all_passed(), "{}", r.to_text_table());
        assert_eq!(r.checks.len(), 4);
    }

    #[test]
    fn cech_run_passes() {
        let r = run_suite(&[Selection::Cech { grid: 3 }], RunOptions::default()).unwrap();
        assert!(r.all_passed(), "{}", r.to_text_table());
    }

    #[test]
    fn unknown_fixture_is_a_fixture_error() {
        let res = run_suite(
            &[Selection::TwistedBuiltin { name: "nope".into() }],
            RunOptions::default(),
        );
        assert!(res.is_err());
    }
}
