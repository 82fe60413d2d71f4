//! Oracles that share no code with the library algorithms under test.
#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use rand::Rng;
use shishikura::spectral::Matrix;
use shishikura::tree::{EdgeId, TreePoint};
use shishikura::fixtures::{fig2_toy, persian_carpet};
use shishikura::graft::{graft_sites, self_graft, BranchChoice, GraftResult, GraftSpec};
use shishikura::orbits::{periodic_orbits, PeriodicOrbit};
use shishikura::{Rational, Scalar, TreeMap};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// Coefficients low degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_int(k as i64))
                .collect(),
        )
        .trim()
    }

    /// Quotient and remainder of `self / d`.
    fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.0[dd].clone();
        let mut r = self.clone().trim();
        let mut quot = vec![Rational::zero(); r.0.len().max(1)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let f = r.0[rd].clone() / &lead;
            for k in 0..=dd {
                let t = &f * &d.0[k];
                r.0[rd - dd + k] -= t;
            }
            quot[rd - dd] = f;
            r = r.trim();
        }
        (Poly(quot).trim(), r)
    }

    fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone().trim(), other.clone().trim());
        while b.degree().is_some() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// Same roots, all simple.
    fn square_free(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.clone().trim();
        }
        self.div_rem(&g).0
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c.clone()).collect())
    }
}

/// `det(xI - M)` by Faddeev-LeVerrier.
pub fn char_poly(m: &Matrix<Rational>) -> Poly {
    let n = m.dim();
    let a = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::zero();
                for l in 0..n {
                    s += &a[i][l] * &mk[l][j];
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        mk = next;
        let mut tr = Rational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &mk[l][i];
            }
        }
        coeffs[n - k] = -tr / Rational::from_int(k as i64);
    }
    Poly(coeffs)
}

fn sign_changes(seq: &[Poly], x: &Rational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|p| p.eval(x))
        .filter(|v| !v.is_zero())
        .map(|v| if v.is_positive() { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn sturm(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![p.clone(), p.derivative()];
    while seq.last().and_then(Poly::degree).is_some_and(|d| d > 0) {
        let k = seq.len();
        let r = seq[k - 2].rem(&seq[k - 1]).neg();
        if r.degree().is_none() {
            break;
        }
        seq.push(r);
    }
    seq
}

/// Largest real root of `p` to within `2^-bits`, by Sturm counting and exact
/// bisection. `None` if `p` has no real root.
pub fn largest_real_root(p: &Poly, bits: u32) -> Option<(Rational, Rational)> {
    let p = p.clone().trim().square_free();
    let d = p.degree()?;
    if d == 0 {
        return None;
    }
    // Cauchy bound.
    let lead = p.0[d].abs();
    let bound = Rational::one() + p.0[..d].iter().map(|c| c.abs() / &lead).fold(Rational::zero(), |a, b| if b > a { b } else { a });
    let seq = sturm(&p);
    let above = |x: &Rational| sign_changes(&seq, x) - sign_changes(&seq, &bound);
    let mut lo = -bound.clone() - Rational::one();
    let mut hi = bound.clone();
    if above(&lo) == 0 {
        return None;
    }
    let eps = Rational::new(1.into(), num_bigint::BigInt::from(1u8) << bits);
    let two = Rational::from_int(2);
    // isolate the largest root, then bisect on the sign of p alone
    while above(&lo) > 1 {
        let mid = (&lo + &hi) / &two;
        if above(&mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if p.eval(&hi).is_zero() {
        return Some((hi.clone(), hi));
    }
    let hi_positive = p.eval(&hi).is_positive();
    while &hi - &lo > eps {
        let mid = (&lo + &hi) / &two;
        let v = p.eval(&mid);
        if v.is_zero() {
            return Some((mid.clone(), mid));
        }
        if v.is_positive() == hi_positive {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((lo, hi))
}

/// Spectral radius of a nonnegative matrix: its largest real eigenvalue, or
/// 0 for an empty matrix.
pub fn perron_root(m: &Matrix<Rational>) -> (Rational, Rational) {
    if m.dim() == 0 {
        return (Rational::zero(), Rational::zero());
    }
    largest_real_root(&char_poly(m), 48).expect("nonnegative matrices have a real eigenvalue")
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize, density: f64) -> Matrix<Rational> {
    let rows = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    if rng.gen_bool(density) {
                        q(rng.gen_range(1..=6), rng.gen_range(1..=4))
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows).unwrap()
}

/// Number of primitive necklaces of total length `n` over letters with the
/// given lengths (letters are distinct even when lengths agree).
pub fn necklace_count(lengths: &[usize], n: usize) -> usize {
    fn words(lengths: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for (i, &l) in lengths.iter().enumerate() {
            if l <= left {
                cur.push(i);
                words(lengths, left - l, cur, out);
                cur.pop();
            }
        }
    }
    let mut all = Vec::new();
    words(lengths, n, &mut Vec::new(), &mut all);
    all.iter()
        .filter(|w| {
            let k = w.len();
            (1..k).all(|r| {
                let rot: Vec<usize> = w[r..].iter().chain(&w[..r]).copied().collect();
                rot > **w
            })
        })
        .count()
}

/// Points `x ∉ X0` with `τ^n(x) = x`, found on every piece between
/// consecutive points of `τ^{-n}(X0)`.
pub fn fixed_points_of_iterate(tm: &TreeMap, n: usize) -> Vec<TreePoint<Rational>> {
    let tree = tm.tree();
    let xn = tm.refine(n).unwrap();
    let mut out = Vec::new();
    for (e, _) in tree.edges() {
        let mut ts = xn.coordinates_on(tree, e);
        ts.push(Rational::zero());
        ts.push(Rational::one());
        ts.sort();
        ts.dedup();
        for w in ts.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let fa = tm.iterate(&tree.point(e, a.clone()), n);
            let fb = tm.iterate(&tree.point(e, b.clone()), n);
            let (Some(ca), Some(cb)) = (tree.coordinate_on(&fa, e), tree.coordinate_on(&fb, e)) else {
                continue;
            };
            // the piece covers e iff its ends go to the two ends of e
            if (ca.clone() - cb.clone()).abs() != Rational::one() {
                continue;
            }
            let s = (&cb - &ca) / (b - a);
            assert!(s != Rational::one(), "identity piece on {e}");
            let t = (&ca - &s * a) / (Rational::one() - &s);
            if &t > a && &t < b {
                out.push(tree.point(EdgeId(e.0), t));
            }
        }
    }
    out
}

/// Orbits of least period `n`, each as its sorted point labels.
pub fn brute_force_orbits(tm: &TreeMap, n: usize) -> Vec<Vec<String>> {
    let tree = tm.tree();
    let fixed = fixed_points_of_iterate(tm, n);
    let mut orbits: Vec<Vec<String>> = fixed
        .iter()
        .filter(|x| (1..n).all(|d| !n.is_multiple_of(d) || tm.iterate(x, d) != **x))
        .map(|x| {
            let mut pts: Vec<String> = (0..n).map(|k| tree.point_label(&tm.iterate(x, k))).collect();
            pts.sort();
            pts
        })
        .collect();
    orbits.sort();
    orbits.dedup();
    orbits
}

pub fn orbit(tm: &TreeMap, id: &str, max: usize) -> PeriodicOrbit<Rational> {
    periodic_orbits(tm, max).unwrap().into_iter().find(|o| o.id == id).unwrap()
}

pub fn fig2_graft() -> GraftResult<Rational> {
    let tm = fig2_toy::<Rational>();
    let o = orbit(&tm, "fp1", 1);
    self_graft(&GraftSpec::new(tm, o, BranchChoice::parse("right").unwrap()).unwrap()).unwrap()
}

pub fn carpet_grafts() -> Vec<GraftResult<Rational>> {
    let tm = persian_carpet::<Rational>();
    let o = orbit(&tm, "p3-1", 3);
    graft_sites(&tm, &o)
        .unwrap()
        .into_iter()
        .map(|site| self_graft(&GraftSpec::new(tm.clone(), o.clone(), site).unwrap()).unwrap())
        .collect()
}

pub fn least_period(tm: &TreeMap, x: &shishikura::Point, cap: usize) -> Option<usize> {
    let mut y = tm.evaluate(x);
    for n in 1..=cap {
        if y == *x {
            return Some(n);
        }
        y = tm.evaluate(&y);
    }
    None
}
