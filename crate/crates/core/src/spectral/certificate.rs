use super::matrix::{kernel_vector, ones, solve, solve_f64};
use super::scc::scc_decomposition;
use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Largest dimension for which the exact solvers are attempted.
pub const EXACT_SOLVE_LIMIT: usize = 64;

/// Iteration cap of the bisection fallback.
const BISECTION_CAP: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// `M v < λ v` with `v > 0`: proves `λ(M) < λ`.
    Upper,
    /// `M v ≥ λ v` with `v ≥ 0`, `v ≠ 0`: proves `λ(M) ≥ λ`.
    Lower,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Upper => "UPPER",
            BoundKind::Lower => "LOWER",
        }
    }
}

/// A vector witnessing a one-sided bound on the spectral radius.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCertificate<S> {
    pub kind: BoundKind,
    pub bound: S,
    pub witness: Vec<S>,
}

impl<S: Scalar> SpectralCertificate<S> {
    /// Re-checks the defining inequalities in the scalar's own arithmetic.
    pub fn verify(&self, m: &Matrix<S>) -> bool {
        let v = &self.witness;
        if v.len() != m.dim() {
            return false;
        }
        let mv = m.mul_vec(v);
        let lv = v.iter().map(|x| self.bound.clone() * x.clone());
        match self.kind {
            BoundKind::Upper => {
                self.bound > S::zero()
                    && v.iter().all(|x| *x > S::zero())
                    && mv.iter().zip(lv).all(|(a, b)| *a < b)
            }
            BoundKind::Lower => {
                v.iter().all(|x| *x >= S::zero())
                    && v.iter().any(|x| *x > S::zero())
                    && mv.iter().zip(lv).all(|(a, b)| *a >= b)
            }
        }
    }
}

fn checked<S: Scalar>(
    m: &Matrix<S>,
    kind: BoundKind,
    bound: &S,
    witness: Vec<S>,
) -> Option<SpectralCertificate<S>> {
    let c = SpectralCertificate {
        kind,
        bound: bound.clone(),
        witness,
    };
    c.verify(m).then_some(c)
}

fn from_floats<S: Scalar>(v: &[f64]) -> Option<Vec<S>> {
    v.iter().map(|x| S::from_f64(*x)).collect()
}

fn shifted_f64(rows: &[Vec<f64>], mu: f64) -> Vec<Vec<f64>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, x)| if i == j { mu - x } else { -x })
                .collect()
        })
        .collect()
}

fn shifted<S: Scalar>(m: &Matrix<S>, mu: &S) -> Vec<Vec<S>> {
    m.rows()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, x)| {
                    if i == j {
                        mu.clone() - x.clone()
                    } else {
                        -x.clone()
                    }
                })
                .collect()
        })
        .collect()
}

/// Searches for `v > 0` with `M v < λ v`.
///
/// The candidate is `v = (λI − M)⁻¹ 1`, which is positive exactly when
/// `λ > λ(M)`. It is proposed in floating point and, if that does not pass
/// the exact re-check, solved exactly (up to [`EXACT_SOLVE_LIMIT`]). `None` is
/// inconclusive for inexact scalars and large matrices; otherwise it means
/// `λ ≤ λ(M)`.
pub fn certify_upper<S: Scalar>(m: &Matrix<S>, lambda: &S) -> Option<SpectralCertificate<S>> {
    if *lambda <= S::zero() {
        return None;
    }
    let n = m.dim();
    if n == 0 {
        return checked(m, BoundKind::Upper, lambda, Vec::new());
    }
    let a = shifted_f64(&m.to_f64(), lambda.to_f64());
    if let Some(vf) = solve_f64(&a, &ones(n)) {
        if vf.iter().all(|x| *x > 0.0) {
            if let Some(c) = from_floats(&vf).and_then(|v| checked(m, BoundKind::Upper, lambda, v)) {
                return Some(c);
            }
        }
    }
    if S::EXACT && n <= EXACT_SOLVE_LIMIT {
        let v = solve(&shifted(m, lambda), &ones(n))?;
        return checked(m, BoundKind::Upper, lambda, v);
    }
    None
}

/// Searches for a nonzero `v ≥ 0` with `M v ≥ λ v`.
///
/// The all-ones vector is tried first. Further candidates are built on each
/// irreducible block and padded with zeros:
/// the block's all-ones vector, the floating-point Perron vector, a floating-point
/// resolvent vector just above the block's radius, and an exact kernel
/// vector of `B − λI`. Every candidate is re-checked on the full matrix.
pub fn certify_lower<S: Scalar>(m: &Matrix<S>, lambda: &S) -> Option<SpectralCertificate<S>> {
    let n = m.dim();
    if n == 0 {
        return None;
    }
    if let Some(c) = checked(m, BoundKind::Lower, lambda, ones(n)) {
        return Some(c);
    }
    let decomposition = scc_decomposition(m);
    for block in decomposition.blocks.iter().filter(|b| !b.is_trivial()) {
        for local in lower_candidates(&block.matrix, lambda) {
            let mut v = vec![S::zero(); n];
            for (x, &i) in local.into_iter().zip(&block.indices) {
                v[i] = x;
            }
            if let Some(c) = checked(m, BoundKind::Lower, lambda, v) {
                return Some(c);
            }
        }
    }
    None
}

fn lower_candidates<S: Scalar>(b: &Matrix<S>, lambda: &S) -> Vec<Vec<S>> {
    let k = b.dim();
    let mut out = vec![ones(k)];
    let rows = b.to_f64();
    let (rho, perron) = perron_f64(&rows);
    out.extend(from_floats(&perron));
    let mu = rho * (1.0 + 1e-9) + 1e-12;
    if let Some(v) = solve_f64(&shifted_f64(&rows, mu), &ones(k)) {
        let scale = v.iter().cloned().fold(0.0, f64::max);
        if scale > 0.0 {
            let v: Vec<f64> = v.iter().map(|x| x / scale).collect();
            out.extend(from_floats(&v));
        }
    }
    if S::EXACT && k <= EXACT_SOLVE_LIMIT {
        if let Some(v) = kernel_vector(&shifted(b, lambda)) {
            if v.iter().all(|x| *x <= S::zero()) {
                out.push(v.into_iter().map(|x| -x).collect());
            } else {
                out.push(v);
            }
        }
    }
    out
}

/// Floating-point Perron root and nonnegative eigenvector (max-norm 1) by
/// power iteration on `M + I`.
pub fn perron_f64(rows: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = rows.len();
    if n == 0 {
        return (0.0, Vec::new());
    }
    let mut v = vec![1.0; n];
    for _ in 0..200_000 {
        let mut w: Vec<f64> = rows
            .iter()
            .zip(&v)
            .map(|(r, vi)| r.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>() + vi)
            .collect();
        let norm = w.iter().cloned().fold(0.0, f64::max);
        if norm == 0.0 {
            return (0.0, v);
        }
        w.iter_mut().for_each(|x| *x /= norm);
        let delta = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = w;
        if delta < 1e-15 {
            break;
        }
    }
    // Collatz-Wielandt ratios over the support
    let mv: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().zip(&v).map(|(a, x)| a * x).sum())
        .collect();
    let ratios: Vec<f64> = mv
        .iter()
        .zip(&v)
        .filter(|(_, x)| **x > 1e-300)
        .map(|(a, x)| a / x)
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    ((lo + hi) / 2.0, v)
}

/// Certified enclosure of the spectral radius.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralEstimate<S> {
    pub lower: S,
    /// Strict upper bound: `λ(M) < upper`.
    pub upper: S,
    /// Midpoint of the interval, or the exact value when known.
    pub estimate: f64,
    /// Set when the radius is determined exactly.
    pub exact: Option<S>,
    /// Absent when `lower` is 0.
    pub lower_certificate: Option<SpectralCertificate<S>>,
    pub upper_certificate: Option<SpectralCertificate<S>>,
}

impl<S: Scalar> SpectralEstimate<S> {
    pub fn contains(&self, x: &S) -> bool {
        *x >= self.lower && *x < self.upper
    }

    pub fn width(&self) -> S {
        self.upper.clone() - self.lower.clone()
    }

    /// `λ(M) < 1`, decided by the upper certificate.
    pub fn certifies_below_one(&self) -> bool {
        self.upper <= S::one() && self.upper_certificate.is_some()
    }
}

struct BlockInterval<S> {
    lower: S,
    upper: S,
    exact: Option<S>,
    lower_witness: Option<SpectralCertificate<S>>,
}

/// Encloses `λ(M)` in `[lower, upper)` with `upper − lower ≤ tol`.
///
/// Works block by block over the strongly connected components and takes
/// the maximum. Each block's interval is centred on a floating-point Perron
/// estimate and certified; if that fails, certified bisection takes over.
pub fn spectral_radius_estimate<S: Scalar>(m: &Matrix<S>, tol: f64) -> Result<SpectralEstimate<S>> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidMatrix(format!("tolerance must be positive, got {tol}")));
    }
    let n = m.dim();
    if n == 0 {
        return Ok(SpectralEstimate {
            lower: S::zero(),
            upper: S::zero(),
            estimate: 0.0,
            exact: Some(S::zero()),
            lower_certificate: None,
            upper_certificate: None,
        });
    }
    let half = S::from_f64(tol / 2.0).ok_or_else(|| Error::InvalidMatrix("tolerance not representable".into()))?;
    let decomposition = scc_decomposition(m);
    let mut intervals = Vec::new();
    for block in decomposition.blocks.iter().filter(|b| !b.is_trivial()) {
        let mut iv = block_interval(&block.matrix, tol)?;
        // lift the block witness to the full index set
        iv.lower_witness = iv.lower_witness.map(|c| {
            let mut v = vec![S::zero(); n];
            for (x, &i) in c.witness.into_iter().zip(&block.indices) {
                v[i] = x;
            }
            SpectralCertificate { witness: v, ..c }
        });
        intervals.push(iv);
    }
    let (lower, lower_certificate) = match intervals
        .iter()
        .max_by(|a, b| scalar::cmp(&a.lower, &b.lower))
    {
        Some(iv) => (iv.lower.clone(), iv.lower_witness.clone()),
        None => (S::zero(), None),
    };
    let upper = if intervals.is_empty() {
        half
    } else {
        intervals
            .iter()
            .map(|iv| iv.upper.clone())
            .fold(S::zero(), scalar::max_of)
    };
    let exact = if intervals.is_empty() {
        Some(S::zero())
    } else {
        intervals
            .iter()
            .filter_map(|iv| iv.exact.clone())
            .max_by(scalar::cmp)
            .filter(|x| intervals.iter().all(|iv| iv.exact.is_some() || iv.upper <= *x))
    };
    let upper_certificate = certify_upper(m, &upper);
    if upper_certificate.is_none() {
        return Err(Error::Nonconvergence(format!("no upper certificate at {upper}")));
    }
    if let Some(c) = &lower_certificate {
        if !c.verify(m) {
            return Err(Error::Internal("lifted lower certificate failed re-check".into()));
        }
    }
    let estimate = match &exact {
        Some(x) => x.to_f64(),
        None => (lower.to_f64() + upper.to_f64()) / 2.0,
    };
    Ok(SpectralEstimate {
        lower,
        upper,
        estimate,
        exact,
        lower_certificate,
        upper_certificate,
    })
}

fn block_interval<S: Scalar>(b: &Matrix<S>, tol: f64) -> Result<BlockInterval<S>> {
    let k = b.dim();
    let half = S::from_f64(tol / 2.0).expect("finite tolerance");
    let quarter = S::from_f64(tol / 4.0).expect("finite tolerance");
    // constant row sums r: the all-ones vector is a positive eigenvector
    let sums = b.row_sums();
    if sums.iter().all(|s| *s == sums[0]) {
        let r = sums[0].clone();
        return Ok(BlockInterval {
            lower: r.clone(),
            upper: r.clone() + half,
            exact: Some(r.clone()),
            lower_witness: checked(b, BoundKind::Lower, &r, ones(k)),
        });
    }
    let (rho, _) = perron_f64(&b.to_f64());
    if let Some(c) = S::from_f64(rho) {
        let lo = c.clone() - quarter.clone();
        let hi = c + quarter;
        let lower_witness = if lo > S::zero() { certify_lower(b, &lo) } else { None };
        let lower_ok = lo <= S::zero() || lower_witness.is_some();
        if lower_ok && certify_upper(b, &hi).is_some() {
            return Ok(BlockInterval {
                lower: scalar::max_of(lo, S::zero()),
                upper: hi,
                exact: None,
                lower_witness,
            });
        }
    }
    bisect(b, tol)
}

fn bisect<S: Scalar>(b: &Matrix<S>, tol: f64) -> Result<BlockInterval<S>> {
    let tol_s = S::from_f64(tol).expect("finite tolerance");
    let two = scalar::two::<S>();
    let mut lo = S::zero();
    let mut lower_witness = None;
    let mut hi = b
        .row_sums()
        .into_iter()
        .fold(S::zero(), scalar::max_of)
        + S::one();
    if certify_upper(b, &hi).is_none() {
        return Err(Error::Nonconvergence(format!("no upper certificate at {hi}")));
    }
    for _ in 0..BISECTION_CAP {
        if hi.clone() - lo.clone() <= tol_s {
            return Ok(BlockInterval {
                lower: lo,
                upper: hi,
                exact: None,
                lower_witness,
            });
        }
        let mid = (lo.clone() + hi.clone()) / two.clone();
        if certify_upper(b, &mid).is_some() {
            hi = mid;
        } else if let Some(c) = certify_lower(b, &mid) {
            lo = mid;
            lower_witness = Some(c);
        } else {
            // both sides inconclusive near the radius: try a point further down
            let probe = (lo.clone() + mid) / two.clone();
            if let Some(c) = certify_lower(b, &probe) {
                lo = probe;
                lower_witness = Some(c);
            } else {
                return Err(Error::Nonconvergence(format!(
                    "no certificate on either side of {probe}"
                )));
            }
        }
    }
    Err(Error::Nonconvergence(format!(
        "interval [{lo}, {hi}] still wider than {tol} after {BISECTION_CAP} steps"
    )))
}
