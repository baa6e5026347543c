use proptest::prelude::*;

use shiftlab::families::diagonal::diagonal_equivalence;
use shiftlab::families::example46::{build_example46, example46_verdicts, h};
use shiftlab::families::fig2::{build_fig2_family, fig2_subnormal, Subnormality};
use shiftlab::families::quasinormal::build_quasinormal_from_row;
use shiftlab::families::{build_diagonal_core, build_drury_arveson, build_tensor};
use shiftlab::lattice::DiagramSpec;
use shiftlab::positivity::{certifying_window, componentwise_hyponormal, k_hyponormal};
use shiftlab::spectra::da::toral_gap_formula;
use shiftlab::transforms::{ats_member, toral_commutes, weight_gap};
use shiftlab::{AtomicMeasure1D, LatticeWindow, WeightDiagram, WeightSeq};

const W: LatticeWindow = LatticeWindow::new(6, 6);

fn weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1f64..2.0, 1..=len)
}

fn nondecreasing(len: usize) -> impl Strategy<Value = Vec<f64>> {
    weights(len).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v
    })
}

fn seq(v: &[f64]) -> WeightSeq {
    WeightSeq::eventually_constant(v).unwrap()
}

fn potential() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 9), 9)
}

/// Commuting diagrams of several shapes; gauges reach every commuting
/// weight pattern on the box.
fn commuting() -> impl Strategy<Value = WeightDiagram> {
    prop_oneof![
        (weights(6), weights(6)).prop_map(|(s, t)| build_tensor(seq(&s), seq(&t))),
        weights(8).prop_map(|w| build_diagonal_core(seq(&w))),
        potential().prop_map(|p| build_drury_arveson().gauge(p).unwrap()),
        (weights(4), weights(4), potential())
            .prop_map(|(s, t, p)| build_tensor(seq(&s), seq(&t)).gauge(p).unwrap()),
    ]
}

fn measure() -> impl Strategy<Value = AtomicMeasure1D> {
    prop::collection::vec((0.05f64..1.0, 0.05f64..3.0), 1..=4).prop_map(|pairs| {
        let total: f64 = pairs.iter().map(|p| p.0).sum();
        let pairs: Vec<(f64, f64)> = pairs.iter().map(|&(m, t)| (m / total, t)).collect();
        AtomicMeasure1D::from_pairs(&pairs).unwrap()
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_are_path_independent(d in commuting()) {
        prop_assert!(d.check_commutativity(W.grow(1)).holds(1e-12));
        for k in W.points() {
            prop_assert!(rel(d.moment(k), d.moment_up_first(k)) < 1e-12);
            prop_assert!(rel(d.moment(k.right()) / d.moment(k), d.alpha(k).powi(2)) < 1e-12);
        }
    }

    #[test]
    fn restrict_composes(d in commuting(), i in 0usize..4, j in 0usize..4, i2 in 0usize..4, j2 in 0usize..4) {
        let twice = d.restrict(i, j).restrict(i2, j2);
        let once = d.restrict(i + i2, j + j2);
        prop_assert_eq!(twice.window_values(W), once.window_values(W));
    }

    #[test]
    fn flat_is_fixed_by_both_transforms(a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let flat = build_tensor(WeightSeq::constant(a).unwrap(), WeightSeq::constant(b).unwrap());
        prop_assert_eq!(flat.toral().window_values(W), flat.window_values(W));
        prop_assert_eq!(flat.spherical().window_values(W), flat.window_values(W));
    }

    #[test]
    fn spherical_keeps_commutativity(d in commuting()) {
        prop_assert!(d.spherical().check_commutativity(W).max_rel < 1e-10);
    }

    #[test]
    fn toral_commutes_when_condition_holds(d in commuting()) {
        if toral_commutes(&d, W).holds(1e-12) {
            let shrunk = W.shrink().unwrap();
            prop_assert!(d.toral().check_commutativity(shrunk).max_rel < 1e-10);
        }
    }

    #[test]
    fn ats_matches_transform_gap(d in prop_oneof![
        weights(8).prop_map(|w| build_diagonal_core(seq(&w))),
        commuting(),
    ]) {
        let shrunk = W.shrink().unwrap();
        let gap = weight_gap(&d.toral(), &d.spherical(), shrunk);
        prop_assert_eq!(ats_member(&d, W), gap < 1e-10, "gap {}", gap);
    }

    #[test]
    fn spherical_preserves_componentwise_hyponormality(d in prop_oneof![
        (nondecreasing(6), nondecreasing(6)).prop_map(|(s, t)| build_tensor(seq(&s), seq(&t))),
        nondecreasing(8).prop_map(|w| build_diagonal_core(seq(&w))),
        (0.05f64..0.95, 0.05f64..0.95).prop_map(|(x, y)| build_example46(x, y).unwrap()),
    ]) {
        prop_assert!(componentwise_hyponormal(&d, W));
        prop_assert!(componentwise_hyponormal(&d.spherical(), W.shrink().unwrap()));
    }

    #[test]
    fn scaling_keeps_verdicts(d in commuting(), a in 0.1f64..10.0, b in 0.1f64..10.0, k in 1usize..=3) {
        let w = LatticeWindow::new(3, 3);
        let base = k_hyponormal(&d, k, w);
        let scaled = k_hyponormal(&d.scaled(a, b).unwrap(), k, w);
        // verdicts within rounding of the PSD threshold are not comparable
        prop_assume!(base.min_eigenvalue.abs() > 1e-8 && scaled.min_eigenvalue.abs() > 1e-8);
        prop_assert_eq!(base.holds, scaled.holds);
    }

    #[test]
    fn one_hyponormal_implies_monotone(d in commuting()) {
        let w = LatticeWindow::new(4, 4);
        if k_hyponormal(&d, 1, w).holds {
            prop_assert!(componentwise_hyponormal(&d, w));
        }
    }

    #[test]
    fn diagonal_core_matches_hankel(w in prop::collection::vec(0.2f64..1.5, 1..=7), k in 1usize..=3) {
        let e = diagonal_equivalence(&seq(&w), k).unwrap();
        prop_assert!(e.agree, "{:?}", e);
    }

    #[test]
    fn toral_keeps_hyponormality_on_diagonal_cores(w in nondecreasing(7)) {
        let d = build_diagonal_core(seq(&w));
        let cw = certifying_window(&d).unwrap();
        prop_assert!(k_hyponormal(&d, 1, cw).holds);
        let t = d.toral();
        let tw = certifying_window(&t).unwrap();
        prop_assert!(k_hyponormal(&t, 1, tw).holds);
    }

    #[test]
    fn backward_extension_prepends(xi in measure(), f in 0.05f64..1.0) {
        let alpha0 = f / xi.rho().unwrap().sqrt();
        let ext = xi.backward_extension(alpha0).unwrap();
        let w_ext = ext.weights(6).unwrap();
        let w = xi.weights(5).unwrap();
        prop_assert!(rel(w_ext[0], alpha0) < 1e-12);
        for j in 0..5 {
            prop_assert!(rel(w_ext[j + 1], w[j]) < 1e-12);
        }
        prop_assert!((ext.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subnormal_fig2_is_three_hyponormal(p in 0.3f64..2.0, fx in 0.1f64..1.0, fa in 0.1f64..1.0) {
        // flat tails need a single atom; an atom at 0 makes rho infinite
        let xi = AtomicMeasure1D::dirac(p).unwrap();
        let rho = xi.rho().unwrap();
        let x0 = fx / rho.sqrt();
        let a = fa / rho.sqrt();
        let v = fig2_subnormal(x0, a, &xi).unwrap();
        prop_assume!(v.verdict == Subnormality::Subnormal && (1.0 - v.value).abs() > 1e-9);
        let d = build_fig2_family(x0, a, &xi).unwrap();
        let cw = certifying_window(&d).unwrap();
        for k in 1..=3 {
            let r = k_hyponormal(&d, k, cw);
            prop_assert!(r.holds && r.certifying, "k={} {:?}", k, r.first_failure);
        }
    }

    #[test]
    fn example46_hyponormal_verdict_matches(x in 0.01f64..0.99, y in 0.01f64..0.99) {
        prop_assume!((x - h(y)).abs() > 1e-6);
        let d = build_example46(x, y).unwrap();
        let cw = certifying_window(&d).unwrap();
        prop_assert_eq!(k_hyponormal(&d, 1, cw).holds, example46_verdicts(x, y).unwrap().hyponormal);
    }

    #[test]
    fn quasinormal_is_three_hyponormal(c in 0.2f64..0.95, f in 0.1f64..1.0) {
        let d = build_quasinormal_from_row(seq(&[f * c, c]), 1.0).unwrap();
        let w = LatticeWindow::new(4, 4);
        prop_assert!(d.check_commutativity(w).holds(1e-12));
        for k in 1..=3 {
            let r = k_hyponormal(&d, k, w);
            prop_assert!(r.holds, "k={} {:?} {}", k, r.first_failure, r.min_eigenvalue);
        }
    }

    #[test]
    fn built_diagrams_commute(s in weights(5), t in weights(5), x in 0.05f64..0.95, y in 0.05f64..0.95) {
        for d in [
            build_tensor(seq(&s), seq(&t)),
            build_diagonal_core(seq(&s)),
            build_drury_arveson(),
            build_example46(x, y).unwrap(),
            WeightDiagram::from_spec(DiagramSpec::Fig2 { x0: x, a: y, omega: seq(&t) }).unwrap(),
        ] {
            prop_assert!(d.check_commutativity(W).max_abs <= 1e-12);
        }
    }
}

#[test]
fn da_toral_bound_up_to_ten_thousand() {
    for n in 1..=10_000usize {
        let m = (0..=n).map(|k| toral_gap_formula(n, k)).fold(0.0, f64::max);
        assert!(m * 4.0 * (n as f64 + 2.0) <= 1.0 + 1e-12, "n={n}");
    }
}
