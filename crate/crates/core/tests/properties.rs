use gclab_core::conditions::{variance_expansion, LagCovariance};
use gclab_core::empirical::{bracket_sup_bound, empirical_measure, ks_sup_deviation, Observable};
use gclab_core::entropy::{bracket_net_halflines, shatters, ClosedIntervals};
use gclab_core::generators::Marginal;
use gclab_core::inequalities::BivariatePair;
use gclab_core::Path;
use proptest::prelude::*;

fn unit_path() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 1..200)
}

proptest! {
    #[test]
    fn empirical_measure_is_linear(xs in unit_path(), a in -3.0f64..3.0, b in -3.0f64..3.0, t in 0.0f64..1.0) {
        let path = Path::from_values(xs);
        let f = Observable::half_line(t);
        let g = Observable::new("square", |x| x * x);
        let lhs = empirical_measure(&path, &Observable::combine(a, &f, b, &g)).unwrap();
        let rhs = a * empirical_measure(&path, &f).unwrap() + b * empirical_measure(&path, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn empirical_measure_is_monotone(xs in unit_path(), s in 0.0f64..1.0, d in 0.0f64..1.0) {
        let path = Path::from_values(xs);
        let lo = empirical_measure(&path, &Observable::half_line(s)).unwrap();
        let hi = empirical_measure(&path, &Observable::half_line(s + d)).unwrap();
        prop_assert!(lo <= hi);
    }

    #[test]
    fn ks_matches_brute_force(xs in prop::collection::vec(0.0f64..1.0, 1..120), ties in 0usize..5) {
        let mut xs = xs;
        for k in 0..ties.min(xs.len() - 1) {
            xs[k + 1] = xs[0];
        }
        let n = xs.len() as f64;
        let mut brute: f64 = 0.0;
        for &x in &xs {
            let le = xs.iter().filter(|v| **v <= x).count() as f64 / n;
            let lt = xs.iter().filter(|v| **v < x).count() as f64 / n;
            brute = brute.max((le - x).abs()).max((lt - x).abs());
        }
        let got = ks_sup_deviation(&Path::from_values(xs), &Marginal::standard_uniform()).unwrap();
        prop_assert!((got - brute).abs() <= 1e-15);
    }

    #[test]
    fn bracket_bound_dominates_ks(xs in unit_path(), eps in 0.01f64..1.0) {
        let path = Path::from_values(xs);
        let u = Marginal::standard_uniform();
        let net = bracket_net_halflines(&u, eps).unwrap();
        let ks = ks_sup_deviation(&path, &u).unwrap();
        let bound = bracket_sup_bound(&path, &net.net).unwrap();
        prop_assert!(bound >= ks);
        prop_assert!(bound - ks <= eps + 1e-12);
    }

    #[test]
    fn variance_expansion_is_double_sum(g0 in 0.0f64..1.0, rest in prop::collection::vec(-1.0f64..1.0, 0..40)) {
        let mut g = vec![g0];
        g.extend(rest);
        let gamma = LagCovariance::from_table(g.clone()).unwrap();
        for q in 1..=g.len() {
            let mut brute = 0.0;
            for i in 0..q {
                for j in 0..q {
                    brute += g[i.abs_diff(j)];
                }
            }
            prop_assert!((variance_expansion(&gamma, q).unwrap() - brute).abs() <= 1e-10);
        }
    }

    #[test]
    fn shattering_passes_to_subsets(pts in prop::collection::btree_set(-50i32..50, 1..5), drop in 0usize..5) {
        let pts: Vec<f64> = pts.into_iter().map(f64::from).collect();
        if shatters(&pts, &ClosedIntervals).unwrap() {
            let mut sub = pts.clone();
            sub.remove(drop % pts.len());
            prop_assert!(shatters(&sub, &ClosedIntervals).unwrap());
        }
    }

    #[test]
    fn associated_gaussian_h_is_nonnegative(rho in 0.0f64..=1.0, x in -4.0f64..4.0, y in -4.0f64..4.0) {
        let pair = BivariatePair::gaussian(rho).unwrap();
        prop_assert!(pair.h(x, y) >= -1e-14);
    }
}
