//! Acceptance suite: one line per criterion (and sub-check), then a summary.
//! Runs as a plain binary so the lines always reach the output.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use demazure::{
    make_fgl, Bindings, CartanType, FglKind, Gcm, HeckeMaps, Lattice, Monomial, Param, PowerSeries, Q, Scalar,
    TwistedContext,
};

const N: u32 = 8;

struct Suite {
    lines: Vec<(String, bool)>,
}

impl Suite {
    fn record(&mut self, id: &str, what: &str, ok: bool, note: String) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("[{verdict}] {id:<4} {what}{}", if note.is_empty() { String::new() } else { format!(" -- {note}") });
        self.lines.push((id.to_string(), ok));
    }

    fn timed(&mut self, id: &str, what: &str, budget: Duration, start: Instant) {
        let t = start.elapsed();
        self.record(id, &format!("{what} runtime"), t < budget, format!("{t:.2?} (budget {budget:?})"));
    }
}

fn gcm(m: &[&[i64]]) -> Gcm {
    Gcm::new(m.iter().map(|r| r.to_vec()).collect()).unwrap()
}

fn a2() -> Gcm {
    gcm(&[&[2, -1], &[-1, 2]])
}
fn b2() -> Gcm {
    gcm(&[&[2, -2], &[-1, 2]])
}
fn g2() -> Gcm {
    gcm(&[&[2, -1], &[-3, 2]])
}
fn a1xa1() -> Gcm {
    gcm(&[&[2, 0], &[0, 2]])
}
fn a1aff() -> Gcm {
    gcm(&[&[2, -2], &[-2, 2]])
}

fn hyperbolic(order: u32) -> demazure::FormalGroupLaw {
    make_fgl(FglKind::Hyperbolic, &Bindings::new(), order).unwrap()
}

fn context(law: &demazure::FormalGroupLaw, g: &Gcm, m: u32) -> TwistedContext {
    TwistedContext::new(law, &Lattice::root_lattice(g), N, TwistedContext::margin_for(m)).unwrap()
}

fn criterion_1(s: &mut Suite) {
    let start = Instant::now();
    let law = hyperbolic(10);
    let ax = law.check_axioms();
    s.record(
        "1a",
        "hyperbolic law: unit, commutativity, associativity to order 10 (symbolic mu1, mu2)",
        ax.passed() && ax.checked_to >= 10,
        format!("{ax:?}"),
    );
    // The inverse as printed: -sum (-mu1)^n u^{n+1}.
    let mu1 = Scalar::param(Param::Mu1);
    let printed = PowerSeries::from_terms(
        1,
        10,
        (0..10).map(|n| (Monomial::new(&[n + 1]), mu1.neg().pow(n).neg())).collect(),
    );
    let (agree, _) = law.formal_inverse().agrees_with(&printed);
    s.record(
        "1b",
        "formal inverse equals -sum (-mu1)^n u^(n+1) termwise to order 10",
        agree,
        format!("computed inverse: {}", law.formal_inverse()),
    );
    let residual = law.inverse_residual();
    println!(
        "       note: F(u, inverse(u)) vanishes to degree {}: {}",
        residual.reliable(),
        residual.is_zero_to_reliable()
    );
    s.timed("1c", "FGL suite", Duration::from_secs(10), start);
}

fn criterion_2(s: &mut Suite) {
    let start = Instant::now();
    let law = hyperbolic(N);
    for (name, g, m) in [("A2", a2(), 3), ("B2", b2(), 4), ("G2", g2(), 6)] {
        let ctx = context(&law, &g, m);
        let r = ctx.verify_kappas().unwrap();
        let failed: Vec<_> = r.details.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k.clone()).collect();
        s.record(
            "2",
            &format!("{name}: kappa_i = mu1, kappa_ij = kappa_ji = mu2{}", if m == 6 { ", xi = 3 mu2^2" } else { "" }),
            r.holds,
            format!("{} checks, certified to {:?}, failed {failed:?}", r.details.len(), r.certified_order),
        );
    }
    s.timed("2", "kappa identities", Duration::from_secs(300), start);
}

fn criterion_3(s: &mut Suite) {
    let law = hyperbolic(N);
    for (name, g, m) in [("A1xA1", a1xa1(), 2), ("A2", a2(), 3), ("B2", b2(), 4), ("G2", g2(), 6)] {
        let ctx = context(&law, &g, m);
        let quad = (0..2).all(|i| ctx.verify_quadratic(i).unwrap().holds);
        s.record("3a", &format!("{name}: X_i^2 = mu1 X_i"), quad, String::new());
        let r = ctx.verify_braid(0, 1).unwrap();
        let cert = r.certified_order.unwrap_or(i64::MAX);
        s.record(
            "3b",
            &format!("{name}: m={m} hyperbolic braid identity, residual zero in the delta basis, certified >= N-6"),
            r.holds && cert >= N as i64 - 6,
            format!("certified to {cert}, {} residual terms", r.residual_terms),
        );
        let samples = ctx.monomial_samples(3);
        let mut ok = true;
        let mut cert = i64::MAX;
        for i in 0..2 {
            let r = ctx.verify_commutation(&ctx.simple(i), &samples).unwrap();
            ok &= r.holds;
            cert = cert.min(r.certified_order.unwrap_or(i64::MAX));
        }
        s.record(
            "3c",
            &format!("{name}: gamma X_a = X_a s_a(gamma) + D_a(gamma) for all {} monomials of degree <= 3", samples.len()),
            ok,
            format!("certified to {cert}"),
        );
    }
    let ctx = TwistedContext::new(&law, &Lattice::root_lattice(&a1aff()), N, 16).unwrap();
    let r = ctx.verify_independence(6).unwrap();
    s.record(
        "3d",
        "A1(1), m=inf: X_w for distinct w up to length 6 are independent (triangular solve succeeds)",
        r.holds,
        format!("{} elements, certified to {:?}", r.details.len() / 2, r.certified_order),
    );
}

fn criterion_4(s: &mut Suite) {
    let additive = Bindings::new().with(Param::Mu1, Scalar::zero()).with(Param::Mu2, Scalar::zero());
    let multiplicative = Bindings::new().with(Param::Mu2, Scalar::zero());
    for (label, b) in [("mu1 = mu2 = 0", additive), ("mu2 = 0", multiplicative)] {
        let law = make_fgl(FglKind::Hyperbolic, &b, N).unwrap();
        for (name, g, m) in [("A2", a2(), 3usize), ("B2", b2(), 4), ("G2", g2(), 6)] {
            let ctx = context(&law, &g, m as u32);
            let kappas = ctx.verify_kappas().unwrap();
            let zero = kappas.eta.iter().filter(|(k, _)| k.starts_with("kappa_") && k.contains(',')).all(|(_, v)| v.starts_with('0'));
            let word = |a: usize, b: usize| -> Vec<usize> { (0..m).map(|k| if k % 2 == 0 { a } else { b }).collect() };
            let diff = ctx.sub(&ctx.x_word(&word(1, 0)), &ctx.x_word(&word(0, 1)));
            let (plain, cert) = diff.is_zero();
            s.record(
                "4",
                &format!("{label}, {name}: kappa_ij = 0 and braid relation holds without correction"),
                kappas.holds && zero && plain,
                format!("certified to {cert:?}"),
            );
        }
    }
}

fn criterion_5(s: &mut Suite) {
    let start = Instant::now();
    let law = make_fgl(FglKind::Hyperbolic, &Bindings::hecke(), N).unwrap();
    for (name, g, m) in [("A1(1)", a1aff(), 2), ("A2", a2(), 3), ("B2", b2(), 4), ("G2", g2(), 6)] {
        let extra = TwistedContext::margin_for(m).max(9);
        let ctx = TwistedContext::new(&law, &Lattice::root_lattice(&g), N, extra).unwrap();
        let maps = HeckeMaps::new(&ctx);
        let rel = maps.verify_relation_images().unwrap();
        s.record("5a", &format!("{name}: psi kills every defining relation"), rel.holds, format!("{:?}", rel.failures));
        let iso = maps.verify_iso(5).unwrap();
        s.record(
            "5b",
            &format!("{name}: psi.phi and phi.psi are identities on generators and words of length <= 5"),
            iso.holds,
            format!("{} checks, certified to {:?}, failures {:?}", iso.checked, iso.certified_order, iso.failures),
        );
    }
    s.timed("5c", "Hecke isomorphism", Duration::from_secs(600), start);
}

fn criterion_6(s: &mut Suite) {
    let law = make_fgl(FglKind::Hyperbolic, &Bindings::affine_hecke(), N).unwrap();
    for (name, g) in [("A2", a2()), ("B2", b2())] {
        let ctx = context(&law, &g, 4);
        let r = HeckeMaps::new(&ctx).verify_affine(3).unwrap();
        let cert = r.certified_order.unwrap_or(i64::MAX);
        s.record(
            "6",
            &format!("{name}: gamma T_i - T_i s_i(gamma) = (1 - t x_i) D_i(gamma), monomials of degree <= 3, certified >= N-4"),
            r.holds && cert >= N as i64 - 4,
            format!("{} checks, certified to {cert}", r.checked),
        );
    }
}

fn lambda(n: i64) -> Lattice {
    let d = 4 * n;
    let b = vec![vec![Q::ONE, Q::new(1 + 2 * n, d)], vec![Q::ZERO, Q::new(1, d)]];
    Lattice::from_b(&a1aff(), &b).unwrap()
}

fn criterion_7(s: &mut Suite) {
    let start = Instant::now();
    let c13 = lambda(1).compare(&lambda(3)).unwrap();
    let c39 = lambda(3).compare(&lambda(9)).unwrap();
    s.record(
        "7a",
        "Lambda_1 < Lambda_3 < Lambda_9 (strict)",
        c13.first_in_second && !c13.second_in_first && c39.first_in_second && !c39.second_in_first,
        String::new(),
    );
    let range: Vec<i64> = (1..=12).flat_map(|k| [k, -k]).collect();
    let mut mismatches = Vec::new();
    for &m in &range {
        for &n in &range {
            let expect = n % m == 0 && (n / m) % 2 != 0;
            let got = lambda(m).compare(&lambda(n)).unwrap().first_in_second;
            if got != expect {
                mismatches.push((m, n));
            }
        }
    }
    s.record(
        "7b",
        "Lambda_m in Lambda_n exactly when n/m is an odd integer, n, m in +-1..+-12",
        mismatches.is_empty(),
        format!("{} pairs, mismatches {mismatches:?}", range.len() * range.len()),
    );
    let orders: Vec<i64> = (1..=6).map(|n| lambda(n).quotient_by_root_lattice().iter().product()).collect();
    s.record(
        "7c",
        "|Lambda_n / root lattice| = 4n for n = 1..6 (Smith normal form)",
        orders.iter().zip(1..).all(|(&o, n)| o == 4 * n),
        format!("{orders:?}"),
    );
    s.timed("7d", "lattice suite", Duration::from_secs(5), start);
}

fn criterion_8(s: &mut Suite) {
    let start = Instant::now();
    let g2aff = gcm(&[&[2, -1, 0], &[-1, 2, -1], &[0, -3, 2]]);
    let cases: Vec<(&str, Gcm, CartanType)> = vec![
        ("A1(1)", a1aff(), CartanType::Affine { labels: vec![1, 1] }),
        ("G2(1)", g2aff, CartanType::Affine { labels: vec![1, 2, 3] }),
        ("[[2,-4],[-4,2]]", gcm(&[&[2, -4], &[-4, 2]]), CartanType::Indefinite),
        ("A2", a2(), CartanType::Finite),
    ];
    for (name, g, want) in cases {
        let got = g.classify().unwrap();
        s.record("8", &format!("{name} classifies as {want:?}"), got == want, format!("{got:?}"));
    }
    s.timed("8", "classification", Duration::from_secs(1), start);
}

/// `A_l^(1)` on the basis `d*, alpha_0, ..., alpha_{l-1}, delta/m`.
fn a_affine_delta_over(l: usize, m: i64) -> Lattice {
    let n = l + 1;
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        a[i][i] = 2;
        if l == 1 {
            a[i][1 - i] = -2;
        } else {
            a[i][(i + 1) % n] = -1;
            a[i][(i + n - 1) % n] = -1;
        }
    }
    let g = Gcm::new(a.clone()).unwrap();
    let dim = n + 1;
    let mut roots = vec![vec![0i64; dim]; n];
    for (i, r) in roots.iter_mut().enumerate().take(l) {
        r[1 + i] = 1;
    }
    for k in 0..l {
        roots[l][1 + k] = -1;
    }
    roots[l][dim - 1] = m;
    let coroots: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut c = vec![0i64; dim];
            c[0] = i64::from(i == 0);
            for k in 0..l {
                c[1 + k] = a[i][k];
            }
            c
        })
        .collect();
    Lattice::from_roots(&g, &roots, &coroots).unwrap()
}

/// `G_2^(1)` on the basis `delta/m, alpha_1, alpha_2`.
fn g2_affine_delta_over(m: i64) -> Lattice {
    let g = gcm(&[&[2, -1, 0], &[-1, 2, -1], &[0, -3, 2]]);
    let roots = vec![vec![m, -2, -3], vec![0, 1, 0], vec![0, 0, 1]];
    let coroots = vec![vec![0, -1, 0], vec![0, 2, -1], vec![0, -3, 2]];
    Lattice::from_roots(&g, &roots, &coroots).unwrap()
}

fn criterion_9(s: &mut Suite) {
    let mut fails = Vec::new();
    for l in 1..=3 {
        for m in 1..=6 {
            if !a_affine_delta_over(l, m).check_fdl().passed() {
                fails.push(format!("A{l}(1) m={m}"));
            }
        }
    }
    s.record("9a", "A_l(1) lattices with delta/m (l = 1..3, m = 1..6) pass FDL1 and FDL2", fails.is_empty(), format!("{fails:?}"));
    let fails: Vec<i64> = (1..=12).filter(|&m| !g2_affine_delta_over(m).check_fdl().passed()).collect();
    s.record("9b", "G2(1) lattices with delta/m (m = 1..12) pass FDL1 and FDL2", fails.is_empty(), format!("{fails:?}"));
    let ind = Lattice::from_roots(&gcm(&[&[2, -4], &[-4, 2]]), &vec![vec![1, 0], vec![-1, 2]], &vec![vec![2, -1], vec![-4, -1]]).unwrap();
    s.record("9c", "indefinite example (basis alpha_1, (alpha_1 + alpha_2)/2) passes", ind.check_fdl().passed(), String::new());
    let rwl = Lattice::from_roots(&a1aff(), &vec![vec![0, -2, 1], vec![0, 2, 0]], &vec![vec![1, -1, 0], vec![0, 1, 0]]).unwrap();
    let r = rwl.check_fdl();
    s.record(
        "9d",
        "restricted weight lattice counterexample fails FDL1",
        !r.fdl1.iter().all(|&b| b),
        format!("{r:?}"),
    );
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags; a name filter that matches nothing
    // here skips the suite.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if args.iter().any(|a| !"acceptance".contains(a.as_str())) {
        return ExitCode::SUCCESS;
    }
    let mut s = Suite { lines: Vec::new() };
    let start = Instant::now();
    criterion_1(&mut s);
    criterion_2(&mut s);
    criterion_3(&mut s);
    criterion_4(&mut s);
    criterion_5(&mut s);
    criterion_6(&mut s);
    criterion_7(&mut s);
    criterion_8(&mut s);
    criterion_9(&mut s);
    let failed: Vec<&str> = s.lines.iter().filter(|(_, ok)| !ok).map(|(id, _)| id.as_str()).collect();
    println!(
        "acceptance: {} checks, {} failed {:?} ({:.1?})",
        s.lines.len(),
        failed.len(),
        failed,
        start.elapsed()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
