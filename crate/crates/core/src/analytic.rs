#![allow(clippy::needless_range_loop)]

//! Floating-point verification layer.
//!
//! The exact modules never touch floats; everything here exists to
//! cross-check them numerically: period matrices compatible with the real
//! structure, Riemann theta series with half-integer characteristics,
//! holonomy of the Chern connection along lattice loops, and the curvature
//! normalization of that connection.
//!
//! Numeric contracts use three tolerance tiers: `1e-12` for structural
//! identities assembled directly from the data, `1e-9` for algebraic
//! identities evaluated in floating point, and `1e-6` for integrated
//! quantities.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::appell_humbert::AHDatum;
use crate::klein::RealCurveModel;
use crate::lattice::{Int, IntegerMatrix, SymplecticLattice};
use crate::rng::SplitMix64;
use crate::theta_form::QuadraticFormZ2;

/// Tolerance for identities that hold exactly up to assembly rounding.
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for algebraic identities evaluated in binary64.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Tolerance for integrated quantities (holonomy).
pub const INTEGRATION_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("metric block must be symmetric positive definite")]
    NotPositiveDefinite,
    #[error("metric block must be a symmetric {0}x{0} matrix")]
    BadMetricShape(usize),
    #[error("assembled complex structure violates a structural identity: {0}")]
    StructuralIdentity(String),
    #[error("alternating form is not compatible with the complex structure (deviation {0:.3e})")]
    IncompatibleComplexStructure(f64),
    #[error("form must be skew-symmetric of size 2g x 2g")]
    NotAlternating,
    #[error("genus mismatch: expected {expected}, found {found}")]
    GenusMismatch { expected: usize, found: usize },
    #[error("truncation radius must be at least 1")]
    BadTruncationRadius,
    #[error("thresholds and step counts must be positive")]
    BadParams,
    #[error("integration with {0} steps is too coarse to converge")]
    TooFewSteps(usize),
    #[error("grid step must be positive and at most 1")]
    BadGridStep,
}

/// Parameters of the series and integration probes.
#[derive(Clone, Copy, Debug)]
pub struct ThetaSeriesParams {
    /// Sup-norm bound on summation indices.
    pub truncation_radius: i64,
    /// Magnitudes below this count as a vanishing theta-null.
    pub zero_threshold: f64,
    /// Step count for holonomy integration.
    pub integration_steps: usize,
}

impl ThetaSeriesParams {
    pub fn new(
        truncation_radius: i64,
        zero_threshold: f64,
        integration_steps: usize,
    ) -> Result<Self, AnalyticError> {
        if truncation_radius < 1 {
            return Err(AnalyticError::BadTruncationRadius);
        }
        if zero_threshold <= 0.0 || integration_steps == 0 {
            return Err(AnalyticError::BadParams);
        }
        Ok(ThetaSeriesParams {
            truncation_radius,
            zero_threshold,
            integration_steps,
        })
    }
}

impl Default for ThetaSeriesParams {
    fn default() -> Self {
        ThetaSeriesParams {
            truncation_radius: 8,
            zero_threshold: 1e-8,
            integration_steps: 10_000,
        }
    }
}

type RealMat = Vec<Vec<f64>>;

fn mat_zeros(r: usize, c: usize) -> RealMat {
    vec![vec![0.0; c]; r]
}

fn mat_mul(a: &RealMat, b: &RealMat) -> RealMat {
    let (n, k) = (a.len(), b.len());
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = mat_zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            let av = a[i][l];
            if av == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += av * b[l][j];
            }
        }
    }
    out
}

/// Gauss-Jordan inverse with partial pivoting; the matrices here are tiny.
fn mat_inv(a: &RealMat) -> Option<RealMat> {
    let n = a.len();
    let mut work: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| work[i][col].abs().partial_cmp(&work[j][col].abs()).unwrap())?;
        if work[pivot][col].abs() < 1e-14 {
            return None;
        }
        work.swap(col, pivot);
        let p = work[col][col];
        for j in 0..2 * n {
            work[col][j] /= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = work[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..2 * n {
                work[i][j] -= factor * work[col][j];
            }
        }
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn cholesky_is_spd(y: &RealMat) -> bool {
    let n = y.len();
    let mut l = mat_zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = y[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= STRUCTURAL_TOL {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

fn int_matrix_to_f64(m: &IntegerMatrix) -> RealMat {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_f64().unwrap()).collect())
        .collect()
}

/// A complex structure on the rank-`2g` lattice compatible with a model's
/// real structure.
///
/// The period matrix is `Z = H/2 + iY` in the fixed basis: the first `g`
/// lattice vectors map to the standard basis of `C^g` and `f_j` maps to the
/// `j`-th column of `Z`.  With this choice complex conjugation acts on
/// lattice coordinates exactly as `[[I, H], [0, -I]]`, so the model's
/// involution is anti-holomorphic on the torus for every positive `Y`.
#[derive(Clone, Debug)]
pub struct PeriodData {
    genus: usize,
    h_block: IntegerMatrix,
    y: RealMat,
    z: Vec<Vec<Complex64>>,
    j: RealMat,
}

impl PeriodData {
    pub fn new(h_block: IntegerMatrix, y: RealMat) -> Result<Self, AnalyticError> {
        let g = h_block.rows();
        if h_block.cols() != g || !h_block.is_symmetric() {
            return Err(AnalyticError::BadMetricShape(g));
        }
        if y.len() != g || y.iter().any(|row| row.len() != g) {
            return Err(AnalyticError::BadMetricShape(g));
        }
        for i in 0..g {
            for j in 0..g {
                if (y[i][j] - y[j][i]).abs() > STRUCTURAL_TOL {
                    return Err(AnalyticError::NotPositiveDefinite);
                }
            }
        }
        if g > 0 && !cholesky_is_spd(&y) {
            return Err(AnalyticError::NotPositiveDefinite);
        }

        // x = H/2 is exactly representable: entries are 0 or 0.5
        let mut x = mat_zeros(g, g);
        for i in 0..g {
            for j in 0..g {
                x[i][j] = h_block[(i, j)].to_f64().unwrap() / 2.0;
            }
        }
        let y_inv = if g == 0 {
            mat_zeros(0, 0)
        } else {
            mat_inv(&y).ok_or(AnalyticError::NotPositiveDefinite)?
        };

        // multiplication by i in lattice coordinates
        let xyinv = mat_mul(&x, &y_inv);
        let xyinvx = mat_mul(&xyinv, &x);
        let yinvx = mat_mul(&y_inv, &x);
        let mut j_mat = mat_zeros(2 * g, 2 * g);
        for r in 0..g {
            for c in 0..g {
                j_mat[r][c] = -xyinv[r][c];
                j_mat[r][g + c] = -y[r][c] - xyinvx[r][c];
                j_mat[g + r][c] = y_inv[r][c];
                j_mat[g + r][g + c] = yinvx[r][c];
            }
        }

        let z = (0..g)
            .map(|i| {
                (0..g)
                    .map(|jj| Complex64::new(x[i][jj], y[i][jj]))
                    .collect()
            })
            .collect();

        let period = PeriodData {
            genus: g,
            h_block,
            y,
            z,
            j: j_mat,
        };
        period.validate()?;
        Ok(period)
    }

    /// The square torus `Z = iI`.
    pub fn square_torus(genus: usize) -> Result<Self, AnalyticError> {
        let y = (0..genus)
            .map(|i| (0..genus).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        PeriodData::new(IntegerMatrix::zeros(genus, genus), y)
    }

    /// Reference period for the theta-null census: `Z = iY` with `Y` the
    /// tridiagonal matrix `2I + (subdiagonal and superdiagonal 1)`.
    ///
    /// Product tori such as `Z = iI` lie on the divisor where some even
    /// theta-null vanishes (for `g = 2` the characteristic pairing the two
    /// odd one-dimensional factors), which would confuse the parity census.
    /// The tridiagonal metric stays off that locus for the small genera the
    /// census runs at; the suite checks the nonzero nulls quantitatively.
    pub fn census_period(genus: usize) -> Result<Self, AnalyticError> {
        let y = (0..genus)
            .map(|i| {
                (0..genus)
                    .map(|j| {
                        if i == j {
                            2.0
                        } else if i.abs_diff(j) == 1 {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        PeriodData::new(IntegerMatrix::zeros(genus, genus), y)
    }

    fn validate(&self) -> Result<(), AnalyticError> {
        let g = self.genus;
        let n = 2 * g;

        // J^2 = -I
        let jj = mat_mul(&self.j, &self.j);
        for r in 0..n {
            for c in 0..n {
                let expect = if r == c { -1.0 } else { 0.0 };
                if (jj[r][c] - expect).abs() > STRUCTURAL_TOL {
                    return Err(AnalyticError::StructuralIdentity(format!(
                        "J^2 deviates from -I by {:.3e}",
                        (jj[r][c] - expect).abs()
                    )));
                }
            }
        }

        // J^t E J = E (the cup form has type (1,1))
        let e = int_matrix_to_f64(&SymplecticLattice::new(g).cup_form());
        let jt: RealMat = (0..n)
            .map(|i| (0..n).map(|j| self.j[j][i]).collect())
            .collect();
        let jtej = mat_mul(&mat_mul(&jt, &e), &self.j);
        for r in 0..n {
            for c in 0..n {
                if (jtej[r][c] - e[r][c]).abs() > STRUCTURAL_TOL {
                    return Err(AnalyticError::StructuralIdentity(format!(
                        "J does not preserve the cup form (deviation {:.3e})",
                        (jtej[r][c] - e[r][c]).abs()
                    )));
                }
            }
        }

        // positivity of E(v, Jv) on random unit vectors
        let mut rng = SplitMix64::new(0xA11CE);
        for _ in 0..20 {
            if n == 0 {
                break;
            }
            let mut v: Vec<f64> = (0..n).map(|_| rng.f64_in(-1.0, 1.0)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-3 {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            let jv: Vec<f64> = (0..n)
                .map(|r| (0..n).map(|c| self.j[r][c] * v[c]).sum())
                .collect();
            let mut pairing = 0.0;
            for r in 0..n {
                for c in 0..n {
                    pairing += v[r] * e[r][c] * jv[c];
                }
            }
            if pairing <= IDENTITY_TOL {
                return Err(AnalyticError::StructuralIdentity(format!(
                    "E(v, Jv) = {pairing:.3e} is not positive"
                )));
            }
        }

        // conjugation acts on lattice coordinates as [[I, H], [0, -I]]
        let conj = self.conjugation_lattice_matrix();
        for r in 0..n {
            for c in 0..n {
                let rounded = conj[r][c].round();
                if (conj[r][c] - rounded).abs() > IDENTITY_TOL {
                    return Err(AnalyticError::StructuralIdentity(
                        "conjugation matrix is not integral".into(),
                    ));
                }
                let expected = if r < g && c < g {
                    if r == c {
                        1.0
                    } else {
                        0.0
                    }
                } else if r < g {
                    self.h_block[(r, c - g)].to_f64().unwrap()
                } else if c >= g {
                    if r == c {
                        -1.0
                    } else {
                        0.0
                    }
                } else {
                    0.0
                };
                if rounded != expected {
                    return Err(AnalyticError::StructuralIdentity(
                        "conjugation matrix differs from the model involution".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Matrix of `z -> conj(z)` in lattice coordinates, assembled
    /// numerically from the period map.
    pub fn conjugation_lattice_matrix(&self) -> RealMat {
        let g = self.genus;
        let n = 2 * g;
        // real period map R = [[I, X], [0, Y]] on (x, y) coordinates
        let mut r_mat = mat_zeros(n, n);
        for i in 0..g {
            r_mat[i][i] = 1.0;
            for j in 0..g {
                r_mat[i][g + j] = self.z[i][j].re;
                r_mat[g + i][g + j] = self.z[i][j].im;
            }
        }
        let r_inv = match mat_inv(&r_mat) {
            Some(inv) => inv,
            None => return mat_zeros(n, n),
        };
        let mut conj_real = mat_zeros(n, n);
        for i in 0..g {
            conj_real[i][i] = 1.0;
            conj_real[g + i][g + i] = -1.0;
        }
        mat_mul(&r_inv, &mat_mul(&conj_real, &r_mat))
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn h_block(&self) -> &IntegerMatrix {
        &self.h_block
    }

    pub fn metric(&self) -> &RealMat {
        &self.y
    }

    pub fn period_matrix(&self) -> &Vec<Vec<Complex64>> {
        &self.z
    }

    pub fn complex_structure_matrix(&self) -> &RealMat {
        &self.j
    }

    /// Image `x + Z y` of a lattice vector in `C^g`.
    pub fn to_complex(&self, v: &[Int]) -> Vec<Complex64> {
        let g = self.genus;
        assert_eq!(v.len(), 2 * g, "lattice vector length mismatch");
        (0..g)
            .map(|i| {
                let mut p = Complex64::new(v[i].to_f64().unwrap(), 0.0);
                for jj in 0..g {
                    p += self.z[i][jj] * v[g + jj].to_f64().unwrap();
                }
                p
            })
            .collect()
    }
}

/// Period data for a model, with metric block `y` (`Z = H/2 + iY`).
pub fn complex_structure(model: &RealCurveModel, y: RealMat) -> Result<PeriodData, AnalyticError> {
    PeriodData::new(model.h_block().clone(), y)
}

/// Period data for a model with the identity metric.
pub fn default_period(model: &RealCurveModel) -> Result<PeriodData, AnalyticError> {
    let g = model.genus();
    let y = (0..g)
        .map(|i| (0..g).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    complex_structure(model, y)
}

/// Hermitian form on `C^g` recovered from an alternating lattice form and
/// the complex structure: `H(v, w) = E(v, Jw) + iE(v, w)`, conjugate-linear
/// in the first argument.  The imaginary part restricted to the lattice is
/// `E` again, which callers should treat as the defining property.
pub fn hermitian_from_alt(
    e: &IntegerMatrix,
    period: &PeriodData,
) -> Result<Vec<Vec<Complex64>>, AnalyticError> {
    let g = period.genus();
    if !e.is_skew_symmetric() || e.rows() != 2 * g {
        return Err(AnalyticError::NotAlternating);
    }
    let ef = int_matrix_to_f64(e);
    let n = 2 * g;
    // type (1,1): J^t E J = E
    let jt: RealMat = (0..n)
        .map(|i| (0..n).map(|j| period.j[j][i]).collect())
        .collect();
    let jtej = mat_mul(&mat_mul(&jt, &ef), &period.j);
    let mut dev: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            dev = dev.max((jtej[r][c] - ef[r][c]).abs());
        }
    }
    if dev > IDENTITY_TOL {
        return Err(AnalyticError::IncompatibleComplexStructure(dev));
    }
    let mut h = vec![vec![Complex64::zero(); g]; g];
    for i in 0..g {
        for jj in 0..g {
            let mut e_i_jej = 0.0;
            for k in 0..n {
                e_i_jej += ef[i][k] * period.j[k][jj];
            }
            h[i][jj] = Complex64::new(e_i_jej, ef[i][jj]);
        }
    }
    Ok(h)
}

/// `H(u, w) = sum conj(u_i) H_ij w_j`.
pub fn hermitian_pairing(h: &[Vec<Complex64>], u: &[Complex64], w: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::zero();
    for (i, ui) in u.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            acc += ui.conj() * h[i][j] * wj;
        }
    }
    acc
}

/// Riemann theta series with half-integer characteristics.
///
/// `a2`, `b2` are doubled characteristics with entries in `{0, 1}`; the
/// value is the truncated sum over `|m|_inf <= R` of
/// `exp(pi i (m+a)^t Z (m+a) + 2 pi i (m+a)^t (z+b))`.
///
/// Truncation error: for `Y >= y0 I` the omitted terms are dominated by a
/// Gaussian tail, at most `(2R+3)^g exp(-pi y0 (R - 1/2)^2)`, so the sum
/// converges rapidly as `R` grows.
pub fn riemann_theta(
    a2: &[u8],
    b2: &[u8],
    z: &[Complex64],
    period: &PeriodData,
    params: &ThetaSeriesParams,
) -> Complex64 {
    let g = period.genus();
    assert_eq!(a2.len(), g, "characteristic length mismatch");
    assert_eq!(b2.len(), g, "characteristic length mismatch");
    assert_eq!(z.len(), g, "argument length mismatch");
    debug_assert!(a2.iter().chain(b2).all(|&c| c <= 1));
    let r = params.truncation_radius;
    if g == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut total = Complex64::zero();
    let mut m = vec![-r; g];
    let pi = std::f64::consts::PI;
    loop {
        let shifted: Vec<f64> = (0..g).map(|i| m[i] as f64 + a2[i] as f64 / 2.0).collect();
        let mut quad = Complex64::zero();
        for i in 0..g {
            for j in 0..g {
                quad += period.z[i][j] * shifted[i] * shifted[j];
            }
        }
        let mut linear = Complex64::zero();
        for i in 0..g {
            linear += (z[i] + b2[i] as f64 / 2.0) * shifted[i];
        }
        let exponent = Complex64::new(0.0, pi) * quad + Complex64::new(0.0, 2.0 * pi) * linear;
        total += exponent.exp();

        let mut pos = 0;
        loop {
            if pos == g {
                return total;
            }
            m[pos] += 1;
            if m[pos] <= r {
                break;
            }
            m[pos] = -r;
            pos += 1;
        }
    }
}

/// Outcome of comparing a theta-null magnitude with the Arf invariant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParityVerdict {
    /// Vanishing of the theta-null agrees with the Arf parity.
    Match,
    /// Definite disagreement.
    Mismatch,
    /// Magnitude falls between the zero threshold and 100x the threshold.
    Inconclusive(f64),
}

/// Compares the analytic theta-null attached to a theta form with its Arf
/// invariant.
///
/// The form maps to the characteristic with `2b_i = q(e_i)`, `2a_i = q(f_i)`;
/// then the reference form `x.y + (2b).x + (2a).y` reproduces `q` and
/// `arf(q) = 4 a.b mod 2`, so the null must vanish exactly for odd forms.
pub fn theta_parity_probe(
    q: &QuadraticFormZ2,
    period: &PeriodData,
    params: &ThetaSeriesParams,
) -> ParityVerdict {
    let g = q.genus();
    assert_eq!(period.genus(), g, "genus mismatch");
    let bits = q.basis_values();
    let b2: Vec<u8> = bits[..g].to_vec();
    let a2: Vec<u8> = bits[g..].to_vec();
    let zero = vec![Complex64::zero(); g];
    let magnitude = riemann_theta(&a2, &b2, &zero, period, params).norm();
    let vanishes = magnitude < params.zero_threshold;
    let definitely_nonzero = magnitude > 100.0 * params.zero_threshold;
    if !vanishes && !definitely_nonzero {
        return ParityVerdict::Inconclusive(magnitude);
    }
    if vanishes == (q.arf() == 1) {
        ParityVerdict::Match
    } else {
        ParityVerdict::Mismatch
    }
}

/// Holonomy of the Chern connection along the lattice loop through `lambda`.
///
/// The connection comes from the canonical metric weight `exp(-pi H(v, v))`
/// in the automorphy trivialization, so the parallel-transport exponent is
/// the midpoint-rule integral of `pi H(v(t), dv)` along the straight path,
/// and the loop closes up through the factor of automorphy at the endpoint.
/// The result approximates the conjugate semi-character value.
pub fn holonomy_probe(
    datum: &AHDatum,
    period: &PeriodData,
    lambda: &[Int],
    params: &ThetaSeriesParams,
) -> Result<Complex64, AnalyticError> {
    if params.integration_steps < 4 {
        return Err(AnalyticError::TooFewSteps(params.integration_steps));
    }
    let g = datum.genus();
    if period.genus() != g {
        return Err(AnalyticError::GenusMismatch {
            expected: g,
            found: period.genus(),
        });
    }
    let h = hermitian_from_alt(datum.form(), period)?;
    let lambda_c = period.to_complex(lambda);
    let steps = params.integration_steps;
    let pi = std::f64::consts::PI;
    let mut exponent = Complex64::zero();
    for k in 0..steps {
        let t_mid = (k as f64 + 0.5) / steps as f64;
        let v_mid: Vec<Complex64> = lambda_c.iter().map(|c| c * t_mid).collect();
        let delta: Vec<Complex64> = lambda_c.iter().map(|c| c / steps as f64).collect();
        exponent += pi * hermitian_pairing(&h, &v_mid, &delta);
    }
    let transport = exponent.exp();
    let zero_point = vec![Complex64::zero(); g];
    let closing = crate::appell_humbert::factor_of_automorphy(datum, period, lambda, &zero_point)?;
    Ok(transport / closing)
}

/// Maximum deviation of the plaquette-estimated curvature from the
/// alternating form, i.e. of `i/2pi F` from the harmonic representative of
/// the first Chern class.
///
/// Transport around small parallelograms spanned by scaled lattice basis
/// directions is discretized with an explicit-midpoint update per substep of
/// length `grid_step`; the truncation of the exponential gives a genuine
/// second-order error, so the deviation shrinks as `O(grid_step^2)`.
pub fn curvature_probe(
    datum: &AHDatum,
    period: &PeriodData,
    grid_step: f64,
) -> Result<f64, AnalyticError> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(AnalyticError::BadGridStep);
    }
    let g = datum.genus();
    if period.genus() != g {
        return Err(AnalyticError::GenusMismatch {
            expected: g,
            found: period.genus(),
        });
    }
    if g == 0 {
        return Ok(0.0);
    }
    let h = hermitian_from_alt(datum.form(), period)?;
    let pi = std::f64::consts::PI;

    // plaquette scale: keep |E| * rho^2 < 1/2 so the principal logarithm
    // recovers the loop exponent unambiguously
    let mut max_e: f64 = 1.0;
    for i in 0..2 * g {
        for j in 0..2 * g {
            max_e = max_e.max(datum.form()[(i, j)].to_f64().unwrap().abs());
        }
    }
    let rho = (0.4 / max_e).sqrt().min(0.25);

    let basis_c: Vec<Vec<Complex64>> = (0..2 * g)
        .map(|i| {
            let mut v = vec![Int::zero(); 2 * g];
            v[i] = Int::from(1);
            period.to_complex(&v)
        })
        .collect();

    let transport_leg = |start: &[Complex64], leg: &[Complex64]| -> Complex64 {
        let len = leg.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let nsub = (len / grid_step).ceil().max(1.0) as usize;
        let delta: Vec<Complex64> = leg.iter().map(|c| c / nsub as f64).collect();
        let mut acc = Complex64::new(1.0, 0.0);
        for k in 0..nsub {
            let t0 = k as f64 / nsub as f64;
            let tm = (k as f64 + 0.5) / nsub as f64;
            let v0: Vec<Complex64> = start.iter().zip(leg).map(|(s, l)| s + l * t0).collect();
            let vm: Vec<Complex64> = start.iter().zip(leg).map(|(s, l)| s + l * tm).collect();
            let f0 = pi * hermitian_pairing(&h, &v0, &delta);
            let fm = pi * hermitian_pairing(&h, &vm, &delta);
            // explicit midpoint step for psi' = f psi
            acc *= Complex64::new(1.0, 0.0) + fm + 0.5 * fm * f0;
        }
        acc
    };

    let base_points: Vec<Vec<Complex64>> = vec![
        vec![Complex64::zero(); g],
        basis_c.iter().fold(vec![Complex64::zero(); g], |acc, b| {
            acc.iter().zip(b).map(|(a, x)| a + 0.1 * x).collect()
        }),
    ];

    let lat_e = datum.form();
    let mut max_dev: f64 = 0.0;
    for i in 0..2 * g {
        for j in i + 1..2 * g {
            let a: Vec<Complex64> = basis_c[i].iter().map(|c| c * rho).collect();
            let b: Vec<Complex64> = basis_c[j].iter().map(|c| c * rho).collect();
            for base in &base_points {
                let p_a: Vec<Complex64> = base.iter().zip(&a).map(|(p, x)| p + x).collect();
                let p_ab: Vec<Complex64> = p_a.iter().zip(&b).map(|(p, x)| p + x).collect();
                let p_b: Vec<Complex64> = base.iter().zip(&b).map(|(p, x)| p + x).collect();
                let neg = |v: &[Complex64]| -> Vec<Complex64> { v.iter().map(|c| -c).collect() };
                let loop_value = transport_leg(base, &a)
                    * transport_leg(&p_a, &b)
                    * transport_leg(&p_ab, &neg(&a))
                    * transport_leg(&p_b, &neg(&b));
                let estimated = loop_value.ln() / Complex64::new(0.0, 2.0 * pi * rho * rho);
                let expected = lat_e[(i, j)].to_f64().unwrap();
                max_dev = max_dev.max((estimated - expected).norm());
            }
        }
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appell_humbert::{alpha_from_theta, AHDatum, SemiCharacter};
    use crate::klein::{enumerate_types, standard_model, TopologicalType};
    use crate::theta_form::enumerate_theta;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn vec_i64(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn square_torus_g1() {
        let p = PeriodData::square_torus(1).unwrap();
        assert_eq!(p.period_matrix()[0][0], Complex64::new(0.0, 1.0));
        let j = p.complex_structure_matrix();
        assert!((j[0][0]).abs() < 1e-15 && (j[0][1] + 1.0).abs() < 1e-15);
        assert!((j[1][0] - 1.0).abs() < 1e-15 && (j[1][1]).abs() < 1e-15);
    }

    #[test]
    fn period_invariants_for_standard_models() {
        for tt in enumerate_types(3) {
            if !tt.has_real_points() {
                continue;
            }
            let model = standard_model(tt).unwrap();
            // identity metric and a stretched one
            default_period(&model).unwrap();
            let g = model.genus();
            let y: Vec<Vec<f64>> = (0..g)
                .map(|i| {
                    (0..g)
                        .map(|j| if i == j { 1.0 + i as f64 } else { 0.0 })
                        .collect()
                })
                .collect();
            complex_structure(&model, y).unwrap();
        }
    }

    #[test]
    fn non_positive_metric_is_rejected() {
        let h = IntegerMatrix::zeros(1, 1);
        assert_eq!(
            PeriodData::new(h, vec![vec![-1.0]]).unwrap_err(),
            AnalyticError::NotPositiveDefinite
        );
    }

    #[test]
    fn hermitian_form_examples() {
        let p = PeriodData::square_torus(1).unwrap();
        let e = SymplecticLattice::new(1).cup_form();
        let h = hermitian_from_alt(&e, &p).unwrap();
        assert!((h[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        // doubling the form doubles the Hermitian matrix
        let h2 = hermitian_from_alt(&e.add(&e), &p).unwrap();
        assert!((h2[0][0] - 2.0 * h[0][0]).norm() < 1e-12);

        // imaginary part reproduces the form on lattice vectors
        for tt in [TopologicalType::new(1, 1, 1), TopologicalType::new(2, 1, 0)] {
            let model = standard_model(tt).unwrap();
            let p = default_period(&model).unwrap();
            let g = model.genus();
            let e = SymplecticLattice::new(g).cup_form();
            let h = hermitian_from_alt(&e, &p).unwrap();
            for i in 0..2 * g {
                for j in 0..2 * g {
                    let mut u = vec![Int::zero(); 2 * g];
                    let mut w = vec![Int::zero(); 2 * g];
                    u[i] = Int::from(1);
                    w[j] = Int::from(1);
                    let val = hermitian_pairing(&h, &p.to_complex(&u), &p.to_complex(&w));
                    assert!(
                        (val.im - e[(i, j)].to_f64().unwrap()).abs() < 1e-9,
                        "Im H != E at ({i},{j}) for {tt}"
                    );
                }
            }
        }
    }

    #[test]
    fn theta_series_reference_values() {
        let p = PeriodData::square_torus(1).unwrap();
        let params = ThetaSeriesParams::default();
        let zero = [Complex64::zero()];

        // independent 1-dimensional oracle: sum exp(-pi m^2)
        let oracle: f64 = (-20..=20i64)
            .map(|m| (-std::f64::consts::PI * (m * m) as f64).exp())
            .sum();
        let val = riemann_theta(&[0], &[0], &zero, &p, &params);
        assert!((val.re - oracle).abs() < 1e-12 && val.im.abs() < 1e-12);
        assert!((val.re - 1.08643481121).abs() < 1e-9);

        // odd characteristic vanishes by exact cancellation
        let odd = riemann_theta(&[1], &[1], &zero, &p, &params);
        assert!(odd.norm() < 1e-10, "odd theta-null = {odd}");
    }

    #[test]
    fn theta_parity_law_at_random_arguments() {
        let p = PeriodData::square_torus(2).unwrap();
        let params = ThetaSeriesParams::default();
        let mut rng = SplitMix64::new(11);
        for a2 in [[0u8, 0], [1, 0], [1, 1]] {
            for b2 in [[0u8, 0], [0, 1], [1, 1]] {
                let z: Vec<Complex64> = (0..2)
                    .map(|_| Complex64::new(rng.f64_in(-0.4, 0.4), rng.f64_in(-0.4, 0.4)))
                    .collect();
                let minus_z: Vec<Complex64> = z.iter().map(|c| -c).collect();
                let lhs = riemann_theta(&a2, &b2, &minus_z, &p, &params);
                let dot = a2
                    .iter()
                    .zip(&b2)
                    .map(|(&x, &y)| (x * y) as i32)
                    .sum::<i32>();
                let sign = if dot % 2 == 0 { 1.0 } else { -1.0 };
                let rhs = sign * riemann_theta(&a2, &b2, &z, &p, &params);
                assert!(
                    (lhs - rhs).norm() < 1e-9,
                    "parity law fails at {a2:?} {b2:?}"
                );
            }
        }
    }

    #[test]
    fn theta_null_census_matches_arf() {
        for g in 1..=2usize {
            let p = PeriodData::census_period(g).unwrap();
            let params = ThetaSeriesParams::default();
            let mut vanished = 0;
            for q in enumerate_theta(g) {
                match theta_parity_probe(&q, &p, &params) {
                    ParityVerdict::Match => {}
                    other => panic!("probe returned {other:?} for bits {:?}", q.basis_values()),
                }
                if q.arf() == 1 {
                    vanished += 1;
                }
            }
            assert_eq!(vanished, (1 << (g - 1)) * ((1 << g) - 1));
        }
    }

    #[test]
    fn product_period_lies_on_an_even_null_divisor() {
        // at Z = iI_2 the even characteristic pairing two odd factors has a
        // vanishing null, so the census must avoid product periods
        let p = PeriodData::square_torus(2).unwrap();
        let params = ThetaSeriesParams::default();
        let q = QuadraticFormZ2::from_bits(2, &[1, 1, 1, 1]).unwrap();
        assert_eq!(q.arf(), 0);
        assert_eq!(theta_parity_probe(&q, &p, &params), ParityVerdict::Mismatch);
    }

    #[test]
    fn holonomy_of_flat_data() {
        let params = ThetaSeriesParams::default();
        let p = PeriodData::square_torus(1).unwrap();

        let trivial = AHDatum::trivial(1);
        let hol = holonomy_probe(&trivial, &p, &vec_i64(&[1, 0]), &params).unwrap();
        assert!((hol - Complex64::new(1.0, 0.0)).norm() < 1e-9);

        // a flat character with angle 1/3 on e transports to angle -1/3
        let mut angles = vec![BigRational::zero(); 2];
        angles[0] = BigRational::new(BigInt::from(1), BigInt::from(3));
        let alpha = SemiCharacter::new(angles, IntegerMatrix::zeros(2, 2)).unwrap();
        let datum = AHDatum::new(IntegerMatrix::zeros(2, 2), alpha).unwrap();
        let hol = holonomy_probe(&datum, &p, &vec_i64(&[1, 0]), &params).unwrap();
        let expected = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI / 3.0);
        assert!((hol - expected).norm() < 1e-6);
    }

    #[test]
    fn holonomy_matches_conjugate_character_for_theta_data() {
        let params = ThetaSeriesParams::default();
        let model = standard_model(TopologicalType::new(1, 2, 0)).unwrap();
        let p = default_period(&model).unwrap();
        for q in enumerate_theta(1) {
            let datum = alpha_from_theta(&q);
            for lambda in [vec_i64(&[1, 0]), vec_i64(&[0, 1]), vec_i64(&[2, -1])] {
                let hol = holonomy_probe(&datum, &p, &lambda, &params).unwrap();
                let expected = datum.alpha().value(&lambda).conj();
                assert!(
                    (hol - expected).norm() < 1e-6,
                    "q={:?} lambda={lambda:?} hol={hol} expected={expected}",
                    q.basis_values()
                );
            }
        }
    }

    #[test]
    fn too_few_integration_steps_is_flagged() {
        let p = PeriodData::square_torus(1).unwrap();
        let params = ThetaSeriesParams::new(8, 1e-8, 2).unwrap();
        let err = holonomy_probe(&AHDatum::trivial(1), &p, &vec_i64(&[1, 0]), &params).unwrap_err();
        assert_eq!(err, AnalyticError::TooFewSteps(2));
    }

    #[test]
    fn curvature_probe_flat_and_theta() {
        let p = PeriodData::square_torus(1).unwrap();
        let flat = AHDatum::trivial(1);
        assert!(curvature_probe(&flat, &p, 1e-2).unwrap() <= 1e-12);

        let datum = alpha_from_theta(&QuadraticFormZ2::zero(1));
        let coarse = curvature_probe(&datum, &p, 1e-2).unwrap();
        assert!(coarse <= 1e-3, "coarse deviation {coarse:.3e}");
        let fine = curvature_probe(&datum, &p, 5e-3).unwrap();
        assert!(
            coarse / fine >= 3.0,
            "halving the step only improved {coarse:.3e} -> {fine:.3e}"
        );
    }

    #[test]
    fn incompatible_form_is_rejected() {
        // an alternating form that is not type (1,1) for the square torus of
        // genus 2: pair e1 with e2 instead of a symplectic partner
        let p = PeriodData::square_torus(2).unwrap();
        let mut e = IntegerMatrix::zeros(4, 4);
        e[(0, 1)] = Int::from(1);
        e[(1, 0)] = Int::from(-1);
        assert!(matches!(
            hermitian_from_alt(&e, &p),
            Err(AnalyticError::IncompatibleComplexStructure(_))
        ));
    }
}
