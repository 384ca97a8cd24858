//! Property tests over randomly chosen built-in families.

#![allow(clippy::needless_range_loop)]

use drg_core::duality::{dual_structure, krein_parameters, qpoly_orderings_direct};
use drg_core::graph::{
    bose_mesner, build_family, check_drg, filtration_qpoly_check, subconstituent, verify_identities, Family,
};
use drg_core::tmodules::{decompose, DecomposeOptions, ModuleInvariants};
use drg_core::{
    intersection_numbers, spectral_data, spectral_intersection_numbers, IntersectionArray, Rational, Tolerance,
};
use num_traits::Zero;
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Closed-form arrays of the built-in families.
fn closed_form(f: Family) -> IntersectionArray {
    let (b, c): (Vec<i64>, Vec<i64>) = match f.normalized() {
        Family::Hypercube { d } => ((0..d).map(|i| (d - i) as i64).collect(), (1..=d).map(|i| i as i64).collect()),
        Family::Hamming { d, q } => (
            (0..d).map(|i| ((d - i) * (q - 1)) as i64).collect(),
            (1..=d).map(|i| i as i64).collect(),
        ),
        Family::Johnson { n, k } => (
            (0..k).map(|i| ((k - i) * (n - k - i)) as i64).collect(),
            (1..=k).map(|i| (i * i) as i64).collect(),
        ),
        Family::Cycle { n } => {
            let d = n / 2;
            let b = (0..d).map(|i| if i == 0 { 2 } else { 1 }).collect();
            let c = (1..=d).map(|i| if i == d && n % 2 == 0 { 2 } else { 1 }).collect();
            (b, c)
        }
    };
    IntersectionArray::from_integers(&b, &c).unwrap()
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        (3usize..=6).prop_map(|d| Family::Hypercube { d }),
        (3usize..=4, 3usize..=4).prop_map(|(d, q)| Family::Hamming { d, q }),
        (6usize..=10).prop_flat_map(|n| (Just(n), 3usize..=n / 2)).prop_map(|(n, k)| Family::Johnson { n, k }),
        (7usize..=31).prop_map(|n| Family::Cycle { n }),
    ]
}

fn small_family() -> impl Strategy<Value = Family> {
    prop_oneof![
        (3usize..=5).prop_map(|d| Family::Hypercube { d }),
        Just(Family::Hamming { d: 3, q: 3 }),
        (6usize..=8).prop_map(|n| Family::Johnson { n, k: 3 }),
        (7usize..=12).prop_map(|n| Family::Cycle { n }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn intersection_number_invariants_hold_exactly(f in family()) {
        let ia = closed_form(f);
        let d = ia.diameter();
        let p = intersection_numbers(&ia);
        let k = ia.valencies();
        for h in 0..=d {
            for i in 0..=d {
                for j in 0..=d {
                    prop_assert_eq!(p.get(h, i, j), p.get(h, j, i));
                    let lhs = &k[h] * p.get(h, i, j);
                    prop_assert_eq!(&lhs, &(&k[i] * p.get(i, j, h)));
                    prop_assert_eq!(&lhs, &(&k[j] * p.get(j, h, i)));
                    let top = h.max(i).max(j);
                    let rest = h + i + j - top;
                    if top > rest {
                        prop_assert!(p.get(h, i, j).is_zero());
                    } else if top == rest {
                        prop_assert!(!p.get(h, i, j).is_zero());
                    }
                }
                let sum: Rational = (0..=d).map(|i2| p.get(h, i2, i).clone()).sum();
                prop_assert_eq!(&sum, &k[i]);
                let delta = if h == i { Rational::from_integer(1.into()) } else { Rational::zero() };
                prop_assert_eq!(p.get(h, 0, i), &delta);
                let diag = if h == i { k[h].clone() } else { Rational::zero() };
                prop_assert_eq!(p.get(0, h, i), &diag);
            }
        }
    }

    #[test]
    fn spectral_invariants(f in family()) {
        let ia = closed_form(f);
        let sp = spectral_data(&ia, &tol()).unwrap();
        let d = ia.diameter();
        let scale = sp.theta.iter().fold(1.0_f64, |m, t| m.max(t.abs()));
        for i in 0..=d {
            for j in 0..i {
                prop_assert!((sp.theta[i] - sp.theta[j]).abs() > tol().bound(scale));
            }
            for j in 0..=d {
                prop_assert!(sp.u[i][j].abs() <= 1.0 + 1e-9);
            }
            prop_assert!(sp.terminal[i].abs() < 1e-8, "terminal residual {}", sp.terminal[i]);
        }
        let exact = intersection_numbers(&ia);
        let spectral = spectral_intersection_numbers(&sp);
        for h in 0..=d {
            for i in 0..=d {
                for j in 0..=d {
                    prop_assert!((exact.get_f64(h, i, j) - spectral[h][i][j]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn duality_invariants(f in family()) {
        let ia = closed_form(f);
        let sp = spectral_data(&ia, &tol()).unwrap();
        let natural: Vec<usize> = (0..=ia.diameter()).collect();
        let krein = krein_parameters(&ia, &sp, &natural).unwrap();
        prop_assert!(krein.invariants.min_entry >= -1e-8);
        for qp in qpoly_orderings_direct(&ia, &sp, &tol()).unwrap() {
            let ds = dual_structure(&ia, &sp, &qp, &tol()).unwrap();
            prop_assert!(ds.aw_duality_residual < 1e-8);
            prop_assert!((ds.td.beta - ds.td.beta_star).abs() < 1e-8);
        }
    }

    #[test]
    fn graph_engine_invariants(f in family()) {
        let g = build_family(f).unwrap();
        prop_assume!(g.n() <= 256);
        let ia = check_drg(&g).array().unwrap().unwrap();
        prop_assert_eq!(&ia, &closed_form(f));
        let alg = bose_mesner(&g, &ia, &tol()).unwrap();
        for e in &alg.residuals.entries {
            if e.name.starts_with("sum E") || e.name.starts_with("E_") {
                prop_assert!(e.max_abs < 1e-9, "{} = {:e}", e.name, e.max_abs);
            }
        }
        let sub = subconstituent(&g, &alg, 0, &tol()).unwrap();
        let r = verify_identities(&alg, &sub, &tol()).unwrap();
        let bad: Vec<_> = r.failures().map(|e| e.name.clone()).collect();
        prop_assert!(bad.is_empty(), "{:?}", bad);
    }

    #[test]
    fn filtration_matches_direct_detector(f in small_family()) {
        let g = build_family(f).unwrap();
        let ia = check_drg(&g).array().unwrap().unwrap();
        let sp = spectral_data(&ia, &tol()).unwrap();
        let alg = bose_mesner(&g, &ia, &tol()).unwrap();
        let direct: Vec<Vec<usize>> = qpoly_orderings_direct(&ia, &sp, &tol()).unwrap().into_iter().map(|q| q.perm).collect();
        let d = ia.diameter();
        let mut rest: Vec<usize> = (1..=d).collect();
        let mut perms = Vec::new();
        permutations(&mut rest, 0, &mut perms);
        for tail in perms {
            let mut perm = vec![0];
            perm.extend(tail);
            let q = filtration_qpoly_check(&alg, &perm, &tol()).unwrap().qpoly;
            prop_assert_eq!(q, direct.contains(&perm), "{:?}", perm);
        }
    }
}

fn permutations(xs: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == xs.len() {
        out.push(xs.clone());
        return;
    }
    for i in start..xs.len() {
        xs.swap(start, i);
        permutations(xs, start + 1, out);
        xs.swap(start, i);
    }
}

fn module_family() -> impl Strategy<Value = Family> {
    prop_oneof![
        (3usize..=5).prop_map(|d| Family::Hypercube { d }),
        Just(Family::Hamming { d: 3, q: 3 }),
        Just(Family::Johnson { n: 7, k: 3 }),
        (7usize..=10).prop_map(|n| Family::Cycle { n }),
    ]
}

fn tuples(f: Family, x: usize, seed: u64) -> (Vec<(usize, ModuleInvariants)>, bool) {
    let g = build_family(f).unwrap();
    let ia = check_drg(&g).array().unwrap().unwrap();
    let sp = spectral_data(&ia, &tol()).unwrap();
    let qp = qpoly_orderings_direct(&ia, &sp, &tol()).unwrap().remove(0);
    let alg = bose_mesner(&g, &ia, &tol()).unwrap().reordered(&qp.perm).unwrap();
    let sub = subconstituent(&g, &alg, x, &tol()).unwrap();
    let dec = decompose(&alg, &sub, &DecomposeOptions { seed, ..Default::default() }, &tol()).unwrap();
    let t = dec.modules.iter().map(|m| (m.dim(), m.invariants())).collect();
    (t, dec.residuals.all_pass())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn decomposition_accounting_and_determinism(f in module_family(), seed in any::<u64>()) {
        let (a, ok) = tuples(f, 0, seed);
        prop_assert!(ok);
        let (b, _) = tuples(f, 0, seed);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn decomposition_independent_of_base_vertex(f in module_family(), x in any::<prop::sample::Index>(), seed in 0u64..4) {
        let n = build_family(f).unwrap().n();
        let mut base = tuples(f, 0, seed).0;
        let (mut other, ok) = tuples(f, x.index(n), seed);
        prop_assert!(ok);
        base.sort();
        other.sort();
        prop_assert_eq!(base, other);
    }
}
