//! One line per acceptance criterion. Exits nonzero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use common::{
    carpet_grafts, fig2_graft, largest_real_root, least_period, necklace_count, perron_root, q, random_matrix, Poly,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shishikura::fixtures::{fig2_toy, persian_carpet, persian_carpet_with_marks};
use shishikura::graft::{choose_graft, verify_graft, CheckKind, CheckStatus, Region};
use shishikura::orbits::{cantor_analysis, periodic_orbits, OrbitClass};
use shishikura::spectral::{
    certify_lower, certify_upper, count_matrix, matrix_power, spectral_radius_estimate, transition_matrix, BoundKind,
    Matrix, SpectralCertificate,
};
use shishikura::tree::EdgeId;
use shishikura::{Estimate, Rational, Scalar, TreeMap};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rows(spec: &[&[(i64, i64)]]) -> Vec<Vec<Rational>> {
    spec.iter().map(|r| r.iter().map(|&(n, d)| q(n, d)).collect()).collect()
}

fn contains(est: &Estimate, root: &(Rational, Rational)) -> bool {
    est.lower <= root.1 && root.0 < est.upper
}

fn matrix_reproduction() -> Outcome {
    let m = transition_matrix(&persian_carpet::<Rational>());
    let o = (0, 1);
    let expected = rows(&[&[o, (2, 1), o, (1, 1)], &[o, o, (1, 2), o], &[(1, 2), o, o, o], &[o, (1, 1), o, o]]);
    ensure(m.rows() == expected, format!("M =\n{m}"))?;
    let cube = rows(&[
        &[(1, 2), o, (1, 2), o],
        &[o, (1, 2), o, (1, 4)],
        &[o, (1, 2), (1, 2), o],
        &[(1, 4), o, o, o],
    ]);
    let m3 = matrix_power(&m, 3);
    ensure(m3.rows() == cube, format!("M^3 =\n{m3}"))?;
    Ok("M and M^3 match entry for entry".into())
}

fn contraction_verdict() -> Outcome {
    let m = transition_matrix(&persian_carpet::<Rational>());
    let m3 = matrix_power(&m, 3);
    let c = certify_upper(&m3, &q(1, 1)).ok_or("no UPPER certificate for M^3 at 1")?;
    ensure(c.verify(&m3), "certificate for M^3 does not verify")?;
    let v = vec![q(7, 2), q(2, 1), q(3, 1), q(1, 1)];
    let chain = v[3].clone() / q(2, 1) < v[1] && v[1] < v[2] && v[2] < v[0] && v[0] < v[3].clone() * q(4, 1);
    ensure(chain, "v = (7/2, 2, 3, 1) violates the inequality chain")?;
    let hand = SpectralCertificate { kind: BoundKind::Upper, bound: q(1, 1), witness: v };
    ensure(hand.verify(&m3), "v = (7/2, 2, 3, 1) is not accepted")?;
    let root = largest_real_root(&Poly(vec![q(-1, 4), q(-1, 2), q(0, 1), q(0, 1), q(1, 1)]), 60).unwrap();
    let est = spectral_radius_estimate(&m, 1e-6).map_err(|e| e.to_string())?;
    ensure(est.width() <= q(1, 1_000_000), format!("interval width {}", est.width().to_f64()))?;
    ensure(contains(&est, &root), "interval misses the quartic root")?;
    ensure((est.estimate - root.0.to_f64()).abs() <= 1e-6, "estimate off by more than 1e-6")?;
    ensure(est.certifies_below_one(), "no certificate below 1")?;
    Ok(format!(
        "lambda(M) in [{:.9}, {:.9}), root of the quartic {:.10}",
        est.lower.to_f64(),
        est.upper.to_f64(),
        root.0.to_f64()
    ))
}

fn cantor_status() -> Outcome {
    let tm = persian_carpet::<Rational>();
    let r = cantor_analysis(&tm, 6).map_err(|e| e.to_string())?;
    ensure(r.status, "status is false")?;
    let w = r.witness.as_ref().ok_or("no witness")?;
    ensure(w.edges == (0..4).map(EdgeId).collect::<Vec<_>>(), "witness is not the full 4-edge block")?;
    let c = count_matrix(&tm);
    ensure(w.certificate.kind == BoundKind::Lower && w.certificate.bound >= q(5, 4), "witness bound below 5/4")?;
    ensure(w.certificate.verify(&c), "witness certificate does not verify")?;
    let at = certify_lower(&c, &q(5, 4)).ok_or("no LOWER certificate at 5/4")?;
    ensure(at.verify(&c), "5/4 certificate does not verify")?;
    let root = largest_real_root(&Poly(vec![q(-1, 1), q(-2, 1), q(0, 1), q(0, 1), q(1, 1)]), 60).unwrap();
    let est = spectral_radius_estimate(&c, 1e-6).map_err(|e| e.to_string())?;
    ensure(contains(&est, &root) && est.width() <= q(1, 1_000_000), "count interval misses the quartic root")?;
    Ok(format!(
        "Cantor true, LOWER bound {:.6} >= 5/4, lambda(C) in [{:.9}, {:.9})",
        w.certificate.bound.to_f64(),
        est.lower.to_f64(),
        est.upper.to_f64()
    ))
}

fn orbit_enumeration() -> Outcome {
    let tm = persian_carpet::<Rational>();
    let t = tm.tree();
    let upto3 = periodic_orbits(&tm, 3).map_err(|e| e.to_string())?;
    let rep3: Vec<_> = upto3.iter().filter(|o| o.class == OrbitClass::Repelling).collect();
    ensure(rep3.len() == 1, format!("{} repelling orbits up to period 3", rep3.len()))?;
    let o = rep3[0];
    ensure(o.period == 3 && o.slope == q(-3, 1), "period-3 orbit has wrong period or multiplier")?;
    ensure(o.points.contains(&t.point(EdgeId(2), q(1, 2))), "period-3 orbit misses 1/2 on e2")?;
    let upto6 = periodic_orbits(&tm, 6).map_err(|e| e.to_string())?;
    ensure(
        upto6.iter().any(|o| o.period == 6 && o.class == OrbitClass::Repelling && o.points.contains(&t.point(EdgeId(2), q(4, 5)))),
        "no period-6 orbit through 4/5 on e2",
    )?;
    // every cycle returns to e2 through one of three loops, of lengths 3, 3 and 4
    let oracle = necklace_count(&[3, 3, 4], 21);
    let at21: Vec<_> = periodic_orbits(&tm, 21).map_err(|e| e.to_string())?.into_iter().filter(|o| o.period == 21).collect();
    let rep21 = at21.iter().filter(|o| o.class == OrbitClass::Repelling).count();
    ensure(rep21 >= 1, "no repelling period-21 orbit")?;
    ensure(rep21 == oracle && at21.len() == oracle, format!("{rep21} repelling period-21 orbits, oracle {oracle}"))?;
    Ok(format!("period 3 and 6 orbits found, {rep21} repelling period-21 orbits = necklace count {oracle}"))
}

fn grafting_fidelity() -> Outcome {
    let g = fig2_graft();
    let t = g.grafted.tree();
    let x0: Vec<&str> = t.vertices().map(|(_, v)| v.name.as_str()).collect();
    ensure(x0 == ["a", "b", "x0", "theta0(b)"], format!("X'0 = {x0:?}"))?;
    let table: Vec<(String, String)> = g
        .grafted
        .x1()
        .iter()
        .map(|p| (g.grafted.marked_label(p).unwrap_or_default(), t.point_label(&g.grafted.evaluate(p))))
        .collect();
    let expected: Vec<(String, String)> = [
        ("a", "a"),
        ("x0'", "x0"),
        ("b-1", "b"),
        ("x0", "x0"),
        ("b", "theta0(b)"),
        ("theta0(a-1)", "a"),
        ("theta0(x0'')", "x0"),
        ("theta0(b)", "b"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    ensure(table == expected, format!("X'1 table = {table:?}"))?;
    let src = g.source.tree();
    let r = g.refined.map.tree();
    let mut coords = Vec::new();
    for (e, _) in r.edges() {
        for m in g.refined.map.marks(e) {
            if m.label.starts_with("x0'") {
                coords.push(g.refined.embed(src, &r.point(e, m.t.clone())).t);
            }
        }
    }
    ensure(coords == [q(1, 6), q(5, 6)], format!("new points at {coords:?}"))?;
    Ok("X'0, the 8-entry X'1 table and coordinates 1/6, 5/6 reproduced".into())
}

fn iterated_grafting() -> Outcome {
    for g in carpet_grafts() {
        let m = transition_matrix(&g.grafted);
        let c = certify_upper(&m, &q(1, 1)).ok_or("grafted map has no certificate below 1")?;
        ensure(c.verify(&m), "grafted certificate does not verify")?;
        let n = g.grafted.count_julia_cycles().map_err(|e| e.to_string())?;
        ensure(n == 2, format!("N = {n} after one graft"))?;
        let report = verify_graft(&g).map_err(|e| e.to_string())?;
        ensure(report.status(CheckKind::Grouping) == CheckStatus::Pass, report.get(CheckKind::Grouping).detail.clone())?;
        ensure(cantor_analysis(&g.grafted, 4).map_err(|e| e.to_string())?.status, "grafted map is not Cantor")?;
    }
    let mut tm = persian_carpet::<Rational>();
    let mut ns = vec![tm.count_julia_cycles().map_err(|e| e.to_string())?];
    let mut periods = Vec::new();
    for _ in 0..4 {
        let g = choose_graft(&tm, 36).map_err(|e| e.to_string())?;
        ensure(verify_graft(&g).map_err(|e| e.to_string())?.passed(), "a graft check failed")?;
        periods.push(g.period());
        tm = g.grafted;
        let m = transition_matrix(&tm);
        ensure(certify_upper(&m, &q(1, 1)).is_some_and(|c| c.verify(&m)), "lambda < 1 not certified")?;
        ns.push(tm.count_julia_cycles().map_err(|e| e.to_string())?);
    }
    ensure(ns == [1, 2, 3, 4, 5], format!("N sequence {ns:?}"))?;
    Ok(format!("N = {ns:?} along orbit periods {periods:?}, lambda < 1 certified at every stage"))
}

fn monotone_and_block_maximum(rng: &mut ChaCha8Rng) -> Result<(), String> {
    const TOL: f64 = 2e-6;
    let est = |m: &Matrix<Rational>| spectral_radius_estimate(m, TOL).map_err(|e| e.to_string());
    for k in 0..200 {
        let density = rng.gen_range(0.15..0.8);
        let a = random_matrix(rng, 1 + k % 6, density);
        let extra = random_matrix(rng, a.dim(), 0.3);
        let b = Matrix::from_rows(
            a.rows()
                .iter()
                .zip(extra.rows())
                .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
                .collect(),
        )
        .unwrap();
        let (ea, eb) = (est(&a)?, est(&b)?);
        ensure(ea.width().to_f64() <= TOL && eb.width().to_f64() <= TOL, "interval too wide")?;
        ensure(contains(&ea, &perron_root(&a)) && contains(&eb, &perron_root(&b)), format!("oracle outside interval\n{a}"))?;
        ensure(ea.lower < eb.upper, format!("monotonicity violated\n{a}\n{b}"))?;
    }
    for k in 0..200 {
        let (n, l) = (1 + k % 4, 1 + (k / 4) % 4);
        let a = random_matrix(rng, n, 0.5);
        let b = random_matrix(rng, l, 0.5);
        let c = random_matrix(rng, n + l, 0.5);
        let rows = (0..n + l)
            .map(|i| {
                (0..n + l)
                    .map(|j| match (i < n, j < n) {
                        (true, true) => a.get(i, j).clone(),
                        (false, false) => b.get(i - n, j - n).clone(),
                        (true, false) => c.get(i, j).clone(),
                        (false, true) => q(0, 1),
                    })
                    .collect()
            })
            .collect();
        let m = Matrix::from_rows(rows).unwrap();
        let (em, ea, eb) = (est(&m)?, est(&a)?, est(&b)?);
        let lo = if ea.lower > eb.lower { &ea.lower } else { &eb.lower };
        let hi = if ea.upper > eb.upper { &ea.upper } else { &eb.upper };
        ensure(em.lower < *hi && *lo < em.upper, format!("block maximum violated\n{m}"))?;
        ensure(contains(&em, &perron_root(&m)), format!("oracle outside interval\n{m}"))?;
    }
    Ok(())
}

/// Transition and count matrices, Cantor status, orbit ids and classes.
type Invariants = (Matrix<Rational>, Matrix<Rational>, bool, Vec<(String, OrbitClass)>);

fn invariants(tm: &TreeMap) -> Result<Invariants, String> {
    let orbits = periodic_orbits(tm, 9).map_err(|e| e.to_string())?;
    Ok((
        transition_matrix(tm),
        count_matrix(tm),
        cantor_analysis(tm, 4).map_err(|e| e.to_string())?.status,
        orbits.into_iter().map(|o| (o.id, o.class)).collect(),
    ))
}

fn placement_invariance() -> Result<(), String> {
    let carpet = persian_carpet::<Rational>();
    ensure(
        invariants(&persian_carpet_with_marks(q(1, 4), q(1, 2)))? == invariants(&carpet)?,
        "carpet invariants depend on placement",
    )?;
    let toy = fig2_toy::<Rational>();
    let moved = toy.with_mark_positions(&[vec![q(1, 4), q(1, 2)]]).map_err(|e| e.to_string())?;
    ensure(invariants(&moved)? == invariants(&toy)?, "toy invariants depend on placement")
}

fn recovery_and_bookkeeping() -> Result<(usize, usize), String> {
    let mut grafts = carpet_grafts();
    grafts.push(fig2_graft());
    let (mut points, mut cycles) = (0, 0);
    for g in &grafts {
        let p = g.period();
        for x in g.source.refine(2).map_err(|e| e.to_string())?.iter() {
            let y = g.embed_source(x);
            if g.region(&y) == Region::Branch {
                points += 1;
                ensure(
                    g.grafted.iterate(&y, p + 1) == g.embed_source(&g.source.evaluate(x)),
                    format!("recovery fails at {x}"),
                )?;
            }
        }
        for o in periodic_orbits(&g.source, 6).map_err(|e| e.to_string())? {
            if o.points.is_empty() || o.points.iter().any(|x| g.orbit_points.contains(x)) {
                continue;
            }
            let period = least_period(&g.source, &o.points[0], o.period).ok_or("orbit point is not periodic")?;
            let k = o.points[..period].iter().filter(|x| g.region(&g.embed_source(x)) == Region::Branch).count();
            let expected = period + k * p;
            let got = least_period(&g.grafted, &g.embed_source(&o.points[0]), 10 * expected);
            ensure(got == Some(expected), format!("orbit {}: period {got:?}, expected {expected}", o.id))?;
            cycles += 1;
        }
    }
    Ok((points, cycles))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    monotone_and_block_maximum(&mut rng).map_err(|e| format!("(i) {e}"))?;
    placement_invariance().map_err(|e| format!("(ii) {e}"))?;
    let (points, cycles) = recovery_and_bookkeeping().map_err(|e| format!("(iii/iv) {e}"))?;
    Ok(format!(
        "(i) 200 + 200 random matrices, (ii) both fixtures, (iii) {points} level-2 points in B, (iv) {cycles} source cycles"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("matrix reproduction", matrix_reproduction),
        ("contraction verdict", contraction_verdict),
        ("Cantor status", cantor_status),
        ("orbit enumeration", orbit_enumeration),
        ("grafting fidelity", grafting_fidelity),
        ("iterated grafting", iterated_grafting),
        ("property suites", property_suites),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
