//! Consistency suites behind the command-line `verify` command and the
//! acceptance test target.
//!
//! Each check returns a [`CriterionReport`] with a stable identifier, so
//! runs are diffable.  Everything is deterministic for a fixed seed; the
//! numeric tolerances default to the documented contract values
//! (`1e-9` for algebraic identities, `1e-6` for integrated quantities)
//! and can be overridden for exploration but not loosened silently: the
//! defaults are what the acceptance suite pins.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::analytic::{
    curvature_probe, default_period, holonomy_probe, riemann_theta, theta_parity_probe,
    ParityVerdict, PeriodData, ThetaSeriesParams,
};
use crate::appell_humbert::{
    alpha_from_theta, factor_of_automorphy, is_real_datum, tensor, AHDatum,
};
use crate::klein::{
    enumerate_types, picard_involution, standard_model, validate_type, RealCurveModel,
    TopologicalType,
};
use crate::lattice::{
    determinant, eigenlattice, quotient_group, smith_normal_form, Int, IntegerMatrix,
    SymplecticLattice, Vector,
};
use crate::rng::SplitMix64;
use crate::stiefel_whitney::{
    component_group, sw_table, tau_fixed_basis, w_class, w_row, RealComponent,
};
use crate::theta_form::{enumerate_theta, is_real_theta, QuadraticFormZ2, Z2Vector};

/// Which checks to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lattice,
    Theta,
    AppellHumbert,
    StiefelWhitney,
    Analytic,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Suite> {
        match name {
            "lattice" => Some(Suite::Lattice),
            "theta" => Some(Suite::Theta),
            "ah" => Some(Suite::AppellHumbert),
            "sw" => Some(Suite::StiefelWhitney),
            "analytic" => Some(Suite::Analytic),
            "all" => Some(Suite::All),
            _ => None,
        }
    }
}

/// Tolerances and seeds for a verification run.
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Bound for algebraic identities evaluated in floating point.
    pub identity_tol: f64,
    /// Bound for integrated quantities.
    pub integration_tol: f64,
    pub theta_params: ThetaSeriesParams,
    pub curvature_grid: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 2024,
            identity_tol: 1e-9,
            integration_tol: 1e-6,
            theta_params: ThetaSeriesParams::default(),
            curvature_grid: 1e-2,
        }
    }
}

/// Outcome of a single named check.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.detail,
            self.seconds
        )
    }
}

fn run_check(
    id: &'static str,
    name: &'static str,
    f: impl FnOnce() -> (bool, String),
) -> CriterionReport {
    let start = Instant::now();
    let (passed, detail) = f();
    CriterionReport {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs a suite and returns one report per check.
///
/// `Suite::All` concatenates every suite and appends a total-runtime check.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Vec<CriterionReport> {
    let start = Instant::now();
    let mut reports = Vec::new();
    match suite {
        Suite::Lattice => lattice_suite(cfg, &mut reports),
        Suite::Theta => theta_suite(cfg, &mut reports),
        Suite::AppellHumbert => ah_suite(cfg, &mut reports),
        Suite::StiefelWhitney => sw_suite(cfg, &mut reports),
        Suite::Analytic => analytic_suite(cfg, &mut reports),
        Suite::All => {
            theta_suite(cfg, &mut reports);
            lattice_suite(cfg, &mut reports);
            sw_suite(cfg, &mut reports);
            ah_suite(cfg, &mut reports);
            analytic_suite(cfg, &mut reports);
            let elapsed = start.elapsed().as_secs_f64();
            let all_passed = reports.iter().all(|r| r.passed);
            reports.push(CriterionReport {
                id: "full-suite",
                name: "aggregate run within the time budget",
                passed: all_passed && elapsed <= 300.0,
                detail: format!(
                    "{} checks, {} failed, {elapsed:.1}s of 300s budget",
                    reports.len(),
                    reports.iter().filter(|r| !r.passed).count()
                ),
                seconds: elapsed,
            });
        }
    }
    reports
}

fn real_models(g_max: u32) -> Vec<RealCurveModel> {
    enumerate_types(g_max)
        .into_iter()
        .filter(|t| t.has_real_points())
        .map(|t| standard_model(t).expect("standard model must exist"))
        .collect()
}

fn int_box(dim: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut current = vec![-bound; dim];
    loop {
        out.push(current.clone());
        let mut pos = 0;
        loop {
            if pos == dim {
                return out;
            }
            current[pos] += 1;
            if current[pos] <= bound {
                break;
            }
            current[pos] = -bound;
            pos += 1;
        }
    }
}

fn to_i64_matrix(m: &IntegerMatrix) -> Vec<Vec<i64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_i64().unwrap()).collect())
        .collect()
}

fn matvec_i64(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn cup_pairing_i64(g: usize, u: &[i64], v: &[i64]) -> i64 {
    (0..g).map(|i| u[i] * v[g + i] - u[g + i] * v[i]).sum()
}

fn to_int_vec(v: &[i64]) -> Vector {
    v.iter().map(|&x| Int::from(x)).collect()
}

// ---------------------------------------------------------------------------
// theta suite

fn theta_suite(cfg: &VerifyConfig, reports: &mut Vec<CriterionReport>) {
    let _ = cfg;
    reports.push(run_check(
        "theta-census",
        "2^{2g} theta forms up to genus 6",
        || {
            let start = Instant::now();
            for g in 0..=6usize {
                let mut seen: Vec<u32> = enumerate_theta(g).map(|q| q.basis_mask()).collect();
                let count = seen.len();
                seen.sort_unstable();
                seen.dedup();
                if count != 1 << (2 * g) || seen.len() != count {
                    return (false, format!("genus {g}: {count} forms"));
                }
            }
            let elapsed = start.elapsed().as_secs_f64();
            (
                elapsed < 5.0,
                format!("all counts exact up to genus 6 in {elapsed:.2}s (budget 5s)"),
            )
        },
    ));

    reports.push(run_check(
        "arf-census",
        "even/odd counts up to genus 4",
        || {
            for g in 1..=4usize {
                let even = enumerate_theta(g).filter(|q| q.arf() == 0).count() as i64;
                let odd = enumerate_theta(g).filter(|q| q.arf() == 1).count() as i64;
                let expected_even = (1i64 << (g - 1)) * ((1 << g) + 1);
                let expected_odd = (1i64 << (g - 1)) * ((1 << g) - 1);
                if even != expected_even || odd != expected_odd {
                    return (false, format!("genus {g}: {even} even, {odd} odd"));
                }
            }
            (true, "2^{g-1}(2^g +- 1) split holds for g <= 4".into())
        },
    ));

    reports.push(run_check(
        "riemann-mumford",
        "quadratic relation, exhaustive up to genus 3",
        || {
            for g in 0..=3usize {
                for q in enumerate_theta(g) {
                    for x in 0u32..1 << (2 * g) {
                        for y in 0u32..1 << (2 * g) {
                            let vx = Z2Vector::new(g, x).unwrap();
                            let vy = Z2Vector::new(g, y).unwrap();
                            let lhs = q.eval(&vx.add(&vy));
                            let rhs = (q.eval(&vx) + q.eval(&vy) + vx.pairing(&vy)) % 2;
                            if lhs != rhs {
                                return (false, format!("violation at g={g}"));
                            }
                        }
                    }
                }
            }
            (
                true,
                "q(x+y) = q(x) + q(y) + x.y for every form, g <= 3".into(),
            )
        },
    ));

    reports.push(run_check(
        "arf-zero-count",
        "zero-count characterization up to genus 3",
        || {
            for g in 1..=3usize {
                for q in enumerate_theta(g) {
                    let zeros = (0u32..1 << (2 * g))
                        .filter(|&m| q.eval(&Z2Vector::new(g, m).unwrap()) == 0)
                        .count() as i64;
                    let expected = (1i64 << (2 * g - 1))
                        + (1i64 << (g - 1)) * if q.arf() == 0 { 1 } else { -1 };
                    if zeros != expected {
                        return (false, format!("genus {g} form {:?}", q.basis_values()));
                    }
                }
            }
            (true, "#q^{-1}(0) = 2^{2g-1} + 2^{g-1}(-1)^{arf}".into())
        },
    ));

    reports.push(run_check(
        "torsor-action",
        "translations act freely and transitively, genus <= 2",
        || {
            for g in 0..=2usize {
                for q in enumerate_theta(g) {
                    let mut seen: Vec<u32> = (0..1u32 << (2 * g))
                        .map(|m| q.translate(&Z2Vector::new(g, m).unwrap()).basis_mask())
                        .collect();
                    seen.sort_unstable();
                    seen.dedup();
                    if seen.len() != 1 << (2 * g) {
                        return (false, format!("orbit of {:?} collapses", q.basis_values()));
                    }
                    for m in 0..1u32 << (2 * g) {
                        let eta = Z2Vector::new(g, m).unwrap();
                        if q.translate(&eta).arf() != (q.arf() + q.eval(&eta)) % 2 {
                            return (false, "arf shift law fails".into());
                        }
                    }
                }
            }
            (
                true,
                "orbits exhaust all forms; arf shifts by q(eta)".into(),
            )
        },
    ));
}

// ---------------------------------------------------------------------------
// lattice suite

fn lattice_suite(cfg: &VerifyConfig, reports: &mut Vec<CriterionReport>) {
    reports.push(run_check(
        "type-census",
        "genus <= 1 topological types",
        || {
            let expected = vec![
                TopologicalType::new(0, 1, 0),
                TopologicalType::new(0, 0, 1),
                TopologicalType::new(1, 2, 0),
                TopologicalType::new(1, 0, 1),
                TopologicalType::new(1, 1, 1),
            ];
            let found = enumerate_types(1);
            if found != expected {
                return (false, format!("{found:?}"));
            }
            // closure: re-validating emitted types succeeds, everything else fails
            for g in 0..=4u32 {
                for n in 0..=g + 2 {
                    for a in 0..=1u8 {
                        let emitted = enumerate_types(4).contains(&TopologicalType::new(g, n, a));
                        if emitted != validate_type(g, n, a) {
                            return (false, format!("census not closed at ({g},{n},{a})"));
                        }
                    }
                }
            }
            (
                true,
                "exactly the five genus <= 1 types; census closed".into(),
            )
        },
    ));

    let seed = cfg.seed;
    reports.push(run_check(
        "snf-reproduction",
        "U M V = D on seeded matrices",
        || {
            let mut rng = SplitMix64::new(seed);
            for trial in 0..200 {
                let rows = rng.int_in(0..=5) as usize;
                let cols = rng.int_in(0..=5) as usize;
                let entries: Vec<Int> = (0..rows * cols)
                    .map(|_| Int::from(rng.int_in(-20..=20)))
                    .collect();
                let m = IntegerMatrix::new(rows, cols, entries).unwrap();
                let snf = smith_normal_form(&m);
                if snf.u.mul(&m).mul(&snf.v) != snf.d {
                    return (false, format!("trial {trial}: U M V != D"));
                }
                if determinant(&snf.u).abs() != Int::one()
                    || determinant(&snf.v).abs() != Int::one()
                {
                    return (false, format!("trial {trial}: transform not unimodular"));
                }
                let diag = snf.diagonal();
                for i in 0..diag.len() {
                    if diag[i].is_negative() {
                        return (false, format!("trial {trial}: negative divisor"));
                    }
                    if i + 1 < diag.len()
                        && !diag[i].is_zero()
                        && !(&diag[i + 1] % &diag[i]).is_zero()
                    {
                        return (false, format!("trial {trial}: divisibility broken"));
                    }
                }
            }
            (true, "200 seeded matrices reproduce exactly".into())
        },
    ));

    reports.push(run_check(
        "quotient-order",
        "full-rank quotient order equals |det|",
        || {
            let mut rng = SplitMix64::new(seed ^ 0x51AB);
            let mut tested = 0;
            while tested < 100 {
                let entries: Vec<Int> = (0..9).map(|_| Int::from(rng.int_in(-3..=3))).collect();
                let m = IntegerMatrix::new(3, 3, entries).unwrap();
                let det = determinant(&m);
                if det.is_zero() || det.abs() > Int::from(256) {
                    continue;
                }
                tested += 1;
                let gens: Vec<Vector> = (0..3).map(|j| m.column(j)).collect();
                let q = quotient_group(&gens, 3).unwrap();
                if q.order != det.abs()
                    || q.coset_representatives.len() != q.order.to_usize().unwrap()
                {
                    return (false, format!("mismatch at det {det}"));
                }
            }
            (
                true,
                "100 seeded full-rank sublattices agree with |det|".into(),
            )
        },
    ));

    reports.push(run_check(
        "eigenlattice-ranks",
        "eigensublattice ranks and saturation, genus <= 6",
        || {
            for model in real_models(6) {
                let g = model.genus();
                let iota = model.iota_star();
                let plus = eigenlattice(iota, 1);
                let minus = eigenlattice(iota, -1);
                if plus.len() + minus.len() != 2 * g || plus.len() != g {
                    return (
                        false,
                        format!("rank split fails for {}", model.topological_type()),
                    );
                }
                for basis in [&plus, &minus] {
                    if basis.is_empty() {
                        continue;
                    }
                    let m = IntegerMatrix::from_columns(basis, 2 * g);
                    if !smith_normal_form(&m).diagonal().iter().all(Int::is_one) {
                        return (
                            false,
                            format!(
                                "eigensublattice not saturated for {}",
                                model.topological_type()
                            ),
                        );
                    }
                }
            }
            (
                true,
                "rank g + g split, both saturated, all models g <= 6".into(),
            )
        },
    ));

    reports.push(run_check(
        "model-involution-axioms",
        "emitted involutions satisfy both axioms, genus <= 6",
        || {
            for model in real_models(6) {
                let t = model.iota_star().matrix();
                let g = model.genus();
                if !t.mul(t).is_identity() {
                    return (false, format!("T^2 != I for {}", model.topological_type()));
                }
                let e = SymplecticLattice::new(g).cup_form();
                if t.transpose().mul(&e).mul(t) != e.neg() {
                    return (
                        false,
                        format!("T^t E T != -E for {}", model.topological_type()),
                    );
                }
                let r = crate::lattice::rank_mod2(model.h_block());
                if r != (g + 1) - model.circle_count() {
                    return (
                        false,
                        format!("rank_2(H) wrong for {}", model.topological_type()),
                    );
                }
            }
            (true, "T^2 = I, T^t E T = -E, rank_2(H) = g + 1 - n".into())
        },
    ));
}

// ---------------------------------------------------------------------------
// Appell-Humbert suite

fn ah_suite(cfg: &VerifyConfig, reports: &mut Vec<CriterionReport>) {
    reports.push(run_check(
        "semicharacter-two-route",
        "closed form vs basis extension on the coefficient box, genus <= 2",
        || {
            for g in 0..=2usize {
                for q in enumerate_theta(g) {
                    let datum = alpha_from_theta(&q);
                    for coeffs in int_box(2 * g, 2) {
                        let lambda = to_int_vec(&coeffs);
                        let via_extension = datum.alpha().angle(&lambda);
                        let reduced = Z2Vector::from_lattice_vector(&lambda);
                        let via_formula = num_rational::BigRational::new(
                            Int::from(q.eval(&reduced)),
                            Int::from(2),
                        );
                        if via_extension != via_formula {
                            return (false, format!("disagreement at g={g}, lambda={coeffs:?}"));
                        }
                    }
                }
            }
            (
                true,
                "(-1)^{q} equals the semi-character extension on [-2,2]^{2g}".into(),
            )
        },
    ));

    let seed = cfg.seed;
    let tol = cfg.identity_tol;
    reports.push(run_check(
        "cocycle",
        "factor-of-automorphy cocycle on 100 seeded triples, genus <= 2",
        || {
            let mut rng = SplitMix64::new(seed ^ 0xC0C);
            let mut worst: f64 = 0.0;
            for g in 1..=2usize {
                let model = real_models(g as u32)
                    .into_iter()
                    .find(|m| m.genus() == g)
                    .unwrap();
                let period = default_period(&model).unwrap();
                let datum = alpha_from_theta(&QuadraticFormZ2::zero(g));
                for _ in 0..50 {
                    // signed basis vectors keep the magnitudes small enough
                    // for an absolute comparison
                    let mut l = vec![Int::zero(); 2 * g];
                    let mut m_ = vec![Int::zero(); 2 * g];
                    l[rng.int_in(0..=(2 * g as i64 - 1)) as usize] =
                        Int::from(if rng.int_in(0..=1) == 0 { 1 } else { -1 });
                    m_[rng.int_in(0..=(2 * g as i64 - 1)) as usize] =
                        Int::from(if rng.int_in(0..=1) == 0 { 1 } else { -1 });
                    let v: Vec<Complex64> = (0..g)
                        .map(|_| Complex64::new(rng.f64_in(-0.25, 0.25), rng.f64_in(-0.25, 0.25)))
                        .collect();
                    let sum: Vector = l.iter().zip(&m_).map(|(a, b)| a + b).collect();
                    let v_shift: Vec<Complex64> = {
                        let mc = period.to_complex(&m_);
                        v.iter().zip(&mc).map(|(a, b)| a + b).collect()
                    };
                    let lhs = factor_of_automorphy(&datum, &period, &sum, &v).unwrap();
                    let rhs = factor_of_automorphy(&datum, &period, &l, &v_shift).unwrap()
                        * factor_of_automorphy(&datum, &period, &m_, &v).unwrap();
                    worst = worst.max((lhs - rhs).norm());
                }
            }
            (
                worst <= tol,
                format!("max |a(l+m,v) - a(l,v+m) a(m,v)| = {worst:.3e} (tol {tol:.0e})"),
            )
        },
    ));

    reports.push(run_check(
        "semicharacter-splits",
        "extension rule on random decompositions (exact)",
        || {
            let mut rng = SplitMix64::new(seed ^ 0x5EED);
            for g in 1..=3usize {
                let datum = alpha_from_theta(&QuadraticFormZ2::from_mask(g, 0b11).unwrap());
                for _ in 0..100 {
                    let l: Vector = (0..2 * g).map(|_| Int::from(rng.int_in(-4..=4))).collect();
                    let m: Vector = (0..2 * g).map(|_| Int::from(rng.int_in(-4..=4))).collect();
                    let sum: Vector = l.iter().zip(&m).map(|(a, b)| a + b).collect();
                    let mut pairing = Int::zero();
                    for (i, li) in l.iter().enumerate() {
                        for (j, mj) in m.iter().enumerate() {
                            pairing += li * mj * &datum.form()[(i, j)];
                        }
                    }
                    let lhs = datum.alpha().angle(&sum);
                    let mut rhs = datum.alpha().angle(&l)
                        + datum.alpha().angle(&m)
                        + num_rational::BigRational::new(pairing, Int::from(2));
                    rhs -= rhs.floor();
                    if lhs != rhs {
                        return (false, format!("split identity fails at g={g}"));
                    }
                }
            }
            (
                true,
                "alpha(l+m) = alpha(l) alpha(m) e^{pi i E(l,m)} exactly".into(),
            )
        },
    ));

    reports.push(run_check(
        "tensor-structure",
        "duals, flat twists, and the translation intertwiner, genus <= 2",
        || {
            for g in 0..=2usize {
                for q in enumerate_theta(g) {
                    let datum = alpha_from_theta(&q);
                    if tensor(&datum, &datum.dual()).unwrap() != AHDatum::trivial(g) {
                        return (false, "dual does not invert".into());
                    }
                    for mask in 0..1u32 << (2 * g) {
                        let eta = Z2Vector::new(g, mask).unwrap();
                        let lhs = alpha_from_theta(&q.translate(&eta));
                        let rhs = tensor(&datum, &AHDatum::flat_order_two(&eta)).unwrap();
                        if lhs != rhs {
                            return (false, "translation is not a flat twist".into());
                        }
                    }
                }
                // flat order-two characters are pairwise distinct
                let mut seen = Vec::new();
                for mask in 0..1u32 << (2 * g) {
                    let d = AHDatum::flat_order_two(&Z2Vector::new(g, mask).unwrap());
                    if seen.contains(&d) {
                        return (false, "flat characters collide".into());
                    }
                    seen.push(d);
                }
            }
            (
                true,
                "group laws and the flat-twist intertwiner hold, g <= 2".into(),
            )
        },
    ));

    reports.push(run_check(
        "real-datum-signs",
        "real descriptors take values +-1 on the fixed lattice, genus <= 3",
        || {
            let half = num_rational::BigRational::new(Int::one(), Int::from(2));
            for model in real_models(3) {
                let tau = picard_involution(&model);
                for q in enumerate_theta(model.genus()) {
                    if !is_real_theta(&q, &model) {
                        continue;
                    }
                    let datum = alpha_from_theta(&q);
                    if !is_real_datum(&datum, &tau) {
                        return (
                            false,
                            format!(
                                "realness criteria disagree for {}",
                                model.topological_type()
                            ),
                        );
                    }
                    for b in tau_fixed_basis(&tau) {
                        let angle = datum.alpha().angle(&b);
                        if !angle.is_zero() && angle != half {
                            return (false, "non-sign value on a fixed vector".into());
                        }
                    }
                }
            }
            (
                true,
                "alpha(L^tau) inside {+1, -1} for every real theta descriptor".into(),
            )
        },
    ));
}

// ---------------------------------------------------------------------------
// Stiefel-Whitney suite

fn sw_suite(cfg: &VerifyConfig, reports: &mut Vec<CriterionReport>) {
    reports.push(run_check(
        "picard-components",
        "component count 2^{n-1}, genus <= 8",
        || {
            let start = Instant::now();
            for t in enumerate_types(8) {
                if !t.has_real_points() {
                    continue;
                }
                let model = match standard_model(t) {
                    Ok(m) => m,
                    Err(e) => return (false, format!("model for {t} failed: {e}")),
                };
                let comps = match component_group(&picard_involution(&model)) {
                    Ok(c) => c,
                    Err(e) => return (false, format!("components for {t} failed: {e}")),
                };
                if comps.len() != 1usize << (t.circles - 1) {
                    return (false, format!("{t}: {} components", comps.len()));
                }
                if !comps[0].is_identity() {
                    return (false, format!("{t}: identity component not first"));
                }
            }
            let elapsed = start.elapsed().as_secs_f64();
            (
                elapsed < 30.0,
                format!("every type with g <= 8 in {elapsed:.2}s (budget 30s)"),
            )
        },
    ));

    let seed = cfg.seed;
    reports.push(run_check(
        "sw-coherence",
        "norm compatibility over the coefficient box, genus <= 3",
        || {
            for model in real_models(3) {
                let g = model.genus();
                let tau = picard_involution(&model);
                let tau_i64 = to_i64_matrix(tau.matrix());
                let comps = match component_group(&tau) {
                    Ok(c) => c,
                    Err(e) => return (false, format!("{e}")),
                };
                let basis = tau_fixed_basis(&tau);
                let basis_solver = if basis.is_empty() {
                    None
                } else {
                    Some(smith_normal_form(&IntegerMatrix::from_columns(&basis, 2 * g)))
                };
                let real_qs: Vec<QuadraticFormZ2> = enumerate_theta(g)
                    .filter(|q| is_real_theta(q, &model))
                    .collect();
                let tables: Vec<_> = real_qs
                    .iter()
                    .map(|q| sw_table(&model, q).expect("table must build"))
                    .collect();
                let comp_i64: Vec<Vec<i64>> = comps
                    .iter()
                    .map(|c| c.two_mu().iter().map(|x| x.to_i64().unwrap()).collect())
                    .collect();

                for lambda in int_box(2 * g, 2) {
                    let tau_lambda = matvec_i64(&tau_i64, &lambda);
                    let norm = cup_pairing_i64(g, &lambda, &tau_lambda).rem_euclid(2) as u8;
                    let moved: Vec<i64> =
                        lambda.iter().zip(&tau_lambda).map(|(a, b)| a + b).collect();
                    // expand lambda + tau lambda in the fixed basis
                    let coords_mod2: Vec<u8> = match &basis_solver {
                        None => {
                            if moved.iter().any(|&x| x != 0) {
                                return (false, "fixed vector escaped rank-zero lattice".into());
                            }
                            Vec::new()
                        }
                        Some(snf) => match snf.solve(&to_int_vec(&moved)) {
                            Some(c) => c
                                .iter()
                                .map(|x| x.mod_floor(&Int::from(2)).to_u8().unwrap())
                                .collect(),
                            None => {
                                return (false, "lambda + tau lambda escaped L^tau".into())
                            }
                        },
                    };
                    let shifts: Vec<u8> = comp_i64
                        .iter()
                        .map(|mu2| cup_pairing_i64(g, mu2, &moved).rem_euclid(2) as u8)
                        .collect();
                    for table in &tables {
                        let w0: u8 = table.components[0]
                            .row
                            .iter()
                            .zip(&coords_mod2)
                            .map(|(r, c)| r & c)
                            .fold(0, |acc, b| acc ^ b);
                        for shift in &shifts {
                            if (w0 + shift) % 2 != norm {
                                return (
                                    false,
                                    format!(
                                        "norm mismatch for {} at lambda {lambda:?}",
                                        model.topological_type()
                                    ),
                                );
                            }
                        }
                    }
                }

                // representative independence: shift each doubled
                // representative by (1 - tau) of seeded lattice vectors
                let mut rng = SplitMix64::new(seed ^ 0x1D0);
                for (qi, q) in real_qs.iter().enumerate() {
                    let datum = alpha_from_theta(q);
                    for (ci, comp) in comps.iter().enumerate() {
                        for _ in 0..2 {
                            let nu: Vec<i64> =
                                (0..2 * g).map(|_| rng.int_in(-3..=3)).collect();
                            let tau_nu = matvec_i64(&tau_i64, &nu);
                            let shifted: Vector = comp
                                .two_mu()
                                .iter()
                                .zip(nu.iter().zip(&tau_nu))
                                .map(|(base, (a, b))| base + Int::from(a - b))
                                .collect();
                            let alt = RealComponent::with_representative(shifted, &tau)
                                .expect("shifted representative stays anti-invariant");
                            let row_alt = w_class(&datum, &tau, &alt).unwrap();
                            if row_alt != tables[qi].components[ci].row {
                                return (
                                    false,
                                    format!(
                                        "row depends on representative for {}",
                                        model.topological_type()
                                    ),
                                );
                            }
                        }
                    }
                }
            }
            (
                true,
                "rows agree with E(lambda, tau lambda) mod 2 on [-2,2]^{2g}; representative independent"
                    .into(),
            )
        },
    ));

    reports.push(run_check(
        "torsor-equivariance",
        "tables shift by the eta pairing, genus <= 2 exhaustive",
        || {
            for model in real_models(2) {
                let g = model.genus();
                let iota = model.iota_star().matrix();
                let t2: Vec<u32> = (0..2 * g)
                    .map(|i| {
                        let col: Vec<Int> = (0..2 * g).map(|r| iota[(r, i)].clone()).collect();
                        Z2Vector::from_lattice_vector(&col).bits()
                    })
                    .collect();
                for mask in 0u32..1 << (2 * g) {
                    let image = (0..2 * g).fold(0u32, |acc, i| {
                        if (mask >> i) & 1 == 1 {
                            acc ^ t2[i]
                        } else {
                            acc
                        }
                    });
                    if image != mask {
                        continue;
                    }
                    let eta = Z2Vector::new(g, mask).unwrap();
                    for q in enumerate_theta(g) {
                        if !is_real_theta(&q, &model) {
                            continue;
                        }
                        let base = sw_table(&model, &q).unwrap();
                        let shifted = sw_table(&model, &q.translate(&eta)).unwrap();
                        for (b_row, s_row) in base.components.iter().zip(&shifted.components) {
                            for (k, basis_vec) in base.tau_basis.iter().enumerate() {
                                let pair = Z2Vector::from_lattice_vector(basis_vec).pairing(&eta);
                                if (b_row.row[k] + pair) % 2 != s_row.row[k] {
                                    return (
                                        false,
                                        format!("row shift fails for {}", model.topological_type()),
                                    );
                                }
                            }
                            for (k, c) in base.circle_classes.iter().enumerate() {
                                let pair = Z2Vector::from_lattice_vector(c).pairing(&eta);
                                if (b_row.circle_values[k] + pair) % 2 != s_row.circle_values[k] {
                                    return (false, "circle value shift fails".into());
                                }
                            }
                        }
                        for (k, c) in base.circle_classes.iter().enumerate() {
                            let pair = Z2Vector::from_lattice_vector(c).pairing(&eta);
                            if (base.spin_data[k] + pair) % 2 != shifted.spin_data[k] {
                                return (false, "spin shift fails".into());
                            }
                        }
                    }
                }
            }
            (
                true,
                "row, circle, and spin shifts all equal the eta pairing".into(),
            )
        },
    ));

    reports.push(run_check(
        "circle-generation",
        "generation and identity-row reconstruction, genus <= 6",
        || {
            for model in real_models(6) {
                if !crate::klein::circle_generation_check(&model) {
                    return (
                        false,
                        format!("generation fails for {}", model.topological_type()),
                    );
                }
                let g = model.genus();
                if g == 0 {
                    continue;
                }
                let tau = picard_involution(&model);
                let basis = tau_fixed_basis(&tau);
                // columns: circle classes then (1 - iota*) of the standard basis
                let mut columns: Vec<Vector> = model.circle_classes().to_vec();
                let mut nu_vectors: Vec<Vector> = Vec::new();
                for i in 0..2 * g {
                    let mut s = vec![Int::zero(); 2 * g];
                    s[i] = Int::one();
                    let image = model.iota_star().apply(&s);
                    columns.push(s.iter().zip(&image).map(|(a, b)| a - b).collect());
                    nu_vectors.push(s);
                }
                let solver = smith_normal_form(&IntegerMatrix::from_columns(&columns, 2 * g));
                let n = model.circle_count();
                // decomposition of each basis vector, reused for every form
                let mut decompositions = Vec::new();
                for b in &basis {
                    match solver.solve(b) {
                        Some(x) => decompositions.push(x),
                        None => {
                            return (
                                false,
                                format!(
                                    "fixed basis vector not generated for {}",
                                    model.topological_type()
                                ),
                            )
                        }
                    }
                }
                // the norm value E(nu, tau nu) mod 2 does not depend on the
                // form, so compute it once per basis vector with any real
                // descriptor for this model
                let witness = enumerate_theta(g)
                    .find(|q| is_real_theta(q, &model))
                    .expect("every model fixes some theta form");
                let witness_datum = alpha_from_theta(&witness);
                let mut norm_parts = Vec::with_capacity(basis.len());
                for x in &decompositions {
                    let mut nu = vec![Int::zero(); 2 * g];
                    for (k, coeff) in x[n..].iter().enumerate() {
                        for (slot, e) in nu.iter_mut().zip(&nu_vectors[k]) {
                            *slot += coeff * e;
                        }
                    }
                    match crate::stiefel_whitney::norm_value(&witness_datum, &tau, &nu) {
                        Ok(v) => norm_parts.push(v),
                        Err(e) => return (false, format!("norm value failed: {e}")),
                    }
                }
                // identity-row values at the fixed basis and at the
                // circle classes, in one batched evaluation per form
                let mut eval_points: Vec<Vector> = basis.clone();
                eval_points.extend(model.circle_classes().iter().cloned());
                let identity = RealComponent::identity(2 * g);
                for q in enumerate_theta(g) {
                    if !is_real_theta(&q, &model) {
                        continue;
                    }
                    let datum = alpha_from_theta(&q);
                    let values = match w_row(&datum, &tau, &identity, &eval_points) {
                        Ok(v) => v,
                        Err(e) => return (false, format!("row evaluation failed: {e}")),
                    };
                    let (row0, circle0) = values.split_at(basis.len());
                    for (j, x) in decompositions.iter().enumerate() {
                        let mut acc = norm_parts[j];
                        for (i, coeff) in x[..n].iter().enumerate() {
                            let bit = coeff.mod_floor(&Int::from(2)).to_u8().unwrap();
                            acc ^= bit & circle0[i];
                        }
                        if acc != row0[j] {
                            return (
                                false,
                                format!(
                                    "reconstruction fails for {} at basis {j}",
                                    model.topological_type()
                                ),
                            );
                        }
                    }
                }
            }
            (
                true,
                "circle values plus norm values rebuild the identity row, g <= 6".into(),
            )
        },
    ));
}

// ---------------------------------------------------------------------------
// analytic suite

fn analytic_suite(cfg: &VerifyConfig, reports: &mut Vec<CriterionReport>) {
    reports.push(run_check(
        "period-invariants",
        "complex structures for all models, genus <= 3",
        || {
            for model in real_models(3) {
                if let Err(e) = default_period(&model) {
                    return (false, format!("{}: {e}", model.topological_type()));
                }
                let g = model.genus();
                let stretched: Vec<Vec<f64>> = (0..g)
                    .map(|i| {
                        (0..g)
                            .map(|j| if i == j { 1.0 + i as f64 } else { 0.0 })
                            .collect()
                    })
                    .collect();
                if let Err(e) = crate::analytic::complex_structure(&model, stretched) {
                    return (false, format!("{}: {e}", model.topological_type()));
                }
            }
            (
                true,
                "J^2 = -I, type (1,1), positivity, conjugation integral".into(),
            )
        },
    ));

    let params = cfg.theta_params;
    let int_tol = cfg.integration_tol;
    let seed = cfg.seed;
    reports.push(run_check(
        "holonomy",
        "loop holonomy equals the conjugate semi-character, genus <= 2",
        || {
            let start = Instant::now();
            let mut worst: f64 = 0.0;
            let mut conjugate_misses = 0usize;
            let mut plain_hits = 0usize;
            let mut checked = 0usize;
            for model in real_models(2) {
                let g = model.genus();
                if g == 0 {
                    continue;
                }
                let period = default_period(&model).unwrap();
                let mut rng = SplitMix64::new(seed ^ 0x401);
                for q in enumerate_theta(g) {
                    if !is_real_theta(&q, &model) {
                        continue;
                    }
                    let datum = alpha_from_theta(&q);
                    let mut lambdas: Vec<Vector> = (0..2 * g)
                        .map(|i| {
                            let mut v = vec![Int::zero(); 2 * g];
                            v[i] = Int::one();
                            v
                        })
                        .collect();
                    for _ in 0..20 {
                        let v: Vector =
                            (0..2 * g).map(|_| Int::from(rng.int_in(-2..=2))).collect();
                        lambdas.push(v);
                    }
                    for lambda in &lambdas {
                        let hol = match holonomy_probe(&datum, &period, lambda, &params) {
                            Ok(h) => h,
                            Err(e) => return (false, format!("probe failed: {e}")),
                        };
                        let expected = datum.alpha().value(lambda).conj();
                        let dev = (hol - expected).norm();
                        worst = worst.max(dev);
                        checked += 1;
                        if dev > int_tol {
                            conjugate_misses += 1;
                            if (hol - expected.conj()).norm() <= int_tol {
                                plain_hits += 1;
                            }
                        }
                    }
                }
            }
            let elapsed = start.elapsed().as_secs_f64();
            if conjugate_misses > 0 {
                // distinguish a systematic orientation flip from noise
                if conjugate_misses == plain_hits {
                    return (
                        false,
                        format!(
                            "holonomy matches the plain character on {plain_hits} loops: global sign flip"
                        ),
                    );
                }
                return (
                    false,
                    format!("{conjugate_misses} of {checked} loops off by more than {int_tol:.0e}"),
                );
            }
            (
                elapsed < 60.0,
                format!(
                    "{checked} loops within {worst:.2e} of conj(alpha) in {elapsed:.1}s (budget 60s)"
                ),
            )
        },
    ));

    let grid = cfg.curvature_grid;
    reports.push(run_check(
        "curvature",
        "Chern-connection curvature matches the alternating form",
        || {
            let flat = AHDatum::trivial(1);
            let square = PeriodData::square_torus(1).unwrap();
            let flat_dev = curvature_probe(&flat, &square, grid).unwrap();
            if flat_dev > 1e-12 {
                return (false, format!("flat deviation {flat_dev:.3e}"));
            }
            let mut details = vec![format!("flat {flat_dev:.1e}")];
            let cases: Vec<(&str, AHDatum, PeriodData)> = vec![
                ("g1", alpha_from_theta(&QuadraticFormZ2::zero(1)), square),
                (
                    "g2",
                    alpha_from_theta(&QuadraticFormZ2::zero(2)),
                    default_period(&standard_model(TopologicalType::new(2, 1, 0)).unwrap())
                        .unwrap(),
                ),
            ];
            for (label, datum, period) in &cases {
                let coarse = curvature_probe(datum, period, grid).unwrap();
                let fine = curvature_probe(datum, period, grid / 2.0).unwrap();
                if coarse > 1e-3 {
                    return (
                        false,
                        format!("{label}: deviation {coarse:.3e} at step {grid:.0e}"),
                    );
                }
                if coarse / fine < 3.0 {
                    return (
                        false,
                        format!("{label}: halving improved only {coarse:.2e} -> {fine:.2e}"),
                    );
                }
                details.push(format!("{label} {coarse:.1e} -> {fine:.1e}"));
            }
            (true, details.join(", "))
        },
    ));

    reports.push(run_check(
        "theta-null-parity",
        "analytic vanishing equals Arf parity, genus <= 3",
        || {
            for g in 1..=3usize {
                let period = match PeriodData::census_period(g) {
                    Ok(p) => p,
                    Err(e) => return (false, format!("census period failed: {e}")),
                };
                for q in enumerate_theta(g) {
                    match theta_parity_probe(&q, &period, &params) {
                        ParityVerdict::Match => {}
                        ParityVerdict::Mismatch => {
                            return (
                                false,
                                format!("mismatch at g={g}, bits {:?}", q.basis_values()),
                            )
                        }
                        ParityVerdict::Inconclusive(mag) => {
                            return (false, format!("inconclusive magnitude {mag:.3e} at g={g}"))
                        }
                    }
                    // quantitative gap: vanishing nulls far below threshold,
                    // nonvanishing ones at least 1e-2
                    let bits = q.basis_values();
                    let b2: Vec<u8> = bits[..g].to_vec();
                    let a2: Vec<u8> = bits[g..].to_vec();
                    let zero = vec![Complex64::zero(); g];
                    let mag = riemann_theta(&a2, &b2, &zero, &period, &params).norm();
                    if q.arf() == 1 && mag >= params.zero_threshold {
                        return (false, format!("odd null too large: {mag:.3e}"));
                    }
                    if q.arf() == 0 && mag < 1e-2 {
                        return (false, format!("even null too small: {mag:.3e}"));
                    }
                }
            }
            (
                true,
                "all 2^{2g} characteristics match, g <= 3, with a quantitative gap".into(),
            )
        },
    ));

    reports.push(run_check(
        "theta-truncation",
        "radius 6 vs 8 stability",
        || {
            let coarse_params =
                ThetaSeriesParams::new(6, params.zero_threshold, params.integration_steps).unwrap();
            let mut worst: f64 = 0.0;
            for g in 1..=3usize {
                let period = PeriodData::census_period(g).unwrap();
                for q in enumerate_theta(g) {
                    let bits = q.basis_values();
                    let b2: Vec<u8> = bits[..g].to_vec();
                    let a2: Vec<u8> = bits[g..].to_vec();
                    let zero = vec![Complex64::zero(); g];
                    let lo = riemann_theta(&a2, &b2, &zero, &period, &coarse_params);
                    let hi = riemann_theta(&a2, &b2, &zero, &period, &params);
                    worst = worst.max((lo - hi).norm());
                }
            }
            (
                worst <= 1e-10,
                format!("max |theta_6 - theta_8| = {worst:.3e} over all nulls, g <= 3"),
            )
        },
    ));
}
