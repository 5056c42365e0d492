//! Relation checks for a law that is not in the hyperbolic family, where the
//! correction classes are genuine power series and the orientation of
//! non-simply-laced pairs matters.

use demazure::{law_from_logarithm, make_fgl, Bindings, FglKind, Gcm, Lattice, Monomial, PowerSeries, Scalar, TwistedContext};

/// `exp(log u + log v)` with `log x = x + x^2 + 3x^3 - 2x^5`.
fn generic_law(order: u32) -> demazure::FormalGroupLaw {
    let log = PowerSeries::from_terms(
        1,
        order,
        vec![
            (Monomial::new(&[1]), Scalar::one()),
            (Monomial::new(&[2]), Scalar::one()),
            (Monomial::new(&[3]), Scalar::from_int(3)),
            (Monomial::new(&[5]), Scalar::from_int(-2)),
        ],
    );
    law_from_logarithm(&log).unwrap()
}

fn ctx(a: Vec<Vec<i64>>, law: &demazure::FormalGroupLaw, n: u32, extra: u32) -> TwistedContext {
    TwistedContext::new(law, &Lattice::root_lattice(&Gcm::new(a).unwrap()), n, extra).unwrap()
}

#[test]
fn generic_law_is_not_hyperbolic() {
    let law = generic_law(8);
    assert!(law.check_axioms().passed());
    let c = ctx(vec![vec![2, -1], vec![-1, 2]], &law, 6, 4);
    let k = c.qf_reduce(&c.qf_kappa_pair(&[1, 0], &[0, 1]).unwrap());
    assert!(k.denominator().is_empty());
    // kappa_{i,j} has a nonzero linear term for this law
    assert!(k.numerator().terms().iter().any(|(m, _)| m.degree() == 1));
}

#[test]
fn generic_braid_relations_both_orientations() {
    let law = generic_law(16);
    for a in [
        vec![vec![2, -1], vec![-1, 2]],
        vec![vec![2, -2], vec![-1, 2]],
        vec![vec![2, -1], vec![-2, 2]],
    ] {
        let c = ctx(a.clone(), &law, 6, 6);
        let r = c.verify_braid(0, 1).unwrap();
        assert!(r.holds, "{a:?}: {:?}", r.details);
        assert!(r.details.iter().any(|(k, _)| k.ends_with("regular")));
    }
}

#[test]
fn generic_order_six() {
    // the length-one coefficients sit over fourteen root factors, so the
    // working margin has to be large for the comparison to mean anything
    let law = generic_law(18);
    for a in [vec![vec![2, -3], vec![-1, 2]], vec![vec![2, -1], vec![-3, 2]]] {
        let c = ctx(a.clone(), &law, 5, 12);
        let r = c.verify_braid(0, 1).unwrap();
        assert!(r.holds, "{a:?}: {:?}", r.details);
        assert!(r.certified_order.unwrap() >= 1, "{a:?}: {:?}", r.certified_order);
        assert!(r.eta.contains_key("0") && r.eta.contains_key("1"));
        assert_eq!(r.details.get("eta_ij = xi_ij"), Some(&true));
        assert_eq!(r.details.get("eta_ji = -xi_ji"), Some(&true));
    }
}

#[test]
fn delta_in_x_basis() {
    let law = make_fgl(FglKind::Hyperbolic, &Bindings::new(), 6).unwrap();
    let c = ctx(vec![vec![2, -1], vec![-1, 2]], &law, 6, 4);
    for i in 0..2 {
        let s = c.weyl().generator(i);
        let x = c.to_x_basis(&c.delta(&s), 2).unwrap();
        assert_eq!(x.support().len(), 2);
        assert!(c.qf_eq(x.get(&[]).unwrap(), &c.qf_one()).0);
        assert!(c.qf_eq(x.get(&[i]).unwrap(), &c.qf_x(&c.simple(i)).neg()).0);
    }
}

#[test]
fn x_basis_of_order_three_difference() {
    let law = make_fgl(FglKind::Hyperbolic, &Bindings::new(), 6).unwrap();
    let c = ctx(vec![vec![2, -1], vec![-1, 2]], &law, 6, 4);
    let lhs = c.sub(&c.x_word(&[1, 0, 1]), &c.x_word(&[0, 1, 0]));
    let mu2 = c.qf_scalar("mu2".parse().unwrap());
    for x in [c.to_x_basis(&lhs, 3).unwrap(), c.to_x_basis_right(&lhs, 3).unwrap()] {
        assert_eq!(x.support(), vec![vec![0], vec![1]]);
        assert!(c.qf_eq(x.get(&[0]).unwrap(), &mu2).0);
        assert!(c.qf_eq(x.get(&[1]).unwrap(), &mu2.neg()).0);
    }
}

#[test]
fn commutation_on_lattice_other_than_root_lattice() {
    // weight lattice of A2 on the fundamental weights
    let g = Gcm::new(vec![vec![2, -1], vec![-1, 2]]).unwrap();
    let lat = Lattice::from_roots(&g, &vec![vec![2, -1], vec![-1, 2]], &vec![vec![1, 0], vec![0, 1]]).unwrap();
    let law = make_fgl(FglKind::Hyperbolic, &Bindings::new(), 6).unwrap();
    let c = TwistedContext::new(&law, &lat, 6, 4).unwrap();
    let samples = c.monomial_samples(2);
    for i in 0..2 {
        assert!(c.verify_commutation(&c.simple(i), &samples).unwrap().holds);
        assert!(c.verify_quadratic(i).unwrap().holds);
    }
    assert!(c.verify_braid(0, 1).unwrap().holds);
}
