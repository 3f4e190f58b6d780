//! Property tests of the structural identities the checks rely on.

use std::sync::OnceLock;

use proptest::prelude::*;

use mmd_extension::dirichlet::{
    capacity_and_potential, energy, energy_and_measure, heat_kernel, heat_semigroup, partition_of_unity, poincare_sup,
    spectrum,
};
use mmd_extension::domains::{DomainDecomposition, DomainSpec};
use mmd_extension::extension::{extend, ExtensionOperator};
use mmd_extension::mmspace::{CatalogSpec, Edge, Space, VertexSet};
use mmd_extension::reflection::build_reflection;
use mmd_extension::whitney::{build_whitney, fuzz_sides, whitney_graph, Side};

/// Connected weighted graph: a random spanning tree plus extra edges.
fn weighted_graph() -> impl Strategy<Value = Space> {
    (3usize..10)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(any::<prop::sample::Index>(), n - 1),
                prop::collection::vec((0..n, 0..n, 0.2f64..3.0), 0..n),
                prop::collection::vec(0.2f64..3.0, n - 1),
                prop::collection::vec(0.5f64..2.0, n),
            )
        })
        .prop_map(|(n, parents, extra, w, m)| {
            let mut edges: Vec<Edge> =
                (1..n).map(|v| Edge::new(parents[v - 1].index(v), v, 1.0, w[v - 1])).collect();
            for (a, b, c) in extra {
                let (a, b) = (a.min(b), a.max(b));
                if a != b && !edges.iter().any(|e| (e.u.min(e.v), e.u.max(e.v)) == (a, b)) {
                    edges.push(Edge::new(a, b, 1.0, c));
                }
            }
            Space::new(n, edges, m).unwrap()
        })
}

fn graph_and_function() -> impl Strategy<Value = (Space, Vec<f64>)> {
    weighted_graph().prop_flat_map(|s| {
        let n = s.len();
        (Just(s), prop::collection::vec(-2.0f64..2.0, n))
    })
}

struct Fixture {
    space: Space,
    dom: DomainDecomposition,
    op: ExtensionOperator,
}

fn half_grid() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let spec = CatalogSpec::grid(17, 17);
        let space = Space::from_catalog(&spec).unwrap();
        let dom = DomainSpec::HalfGrid.build(&spec, &space).unwrap();
        let eps = 1.0 / 30.0;
        let cr = build_whitney(&space, &dom, Side::Interior, eps).unwrap();
        let cs = build_whitney(&space, &dom, Side::Exterior, eps).unwrap();
        let refl = build_reflection(&space, &dom, &cr, &cs, 2.0).unwrap();
        let part = partition_of_unity(&space, &dom, &cs).unwrap();
        let op = ExtensionOperator::new(&dom, &cr, &refl, &part).unwrap();
        Fixture { space, dom, op }
    })
}

fn on_u(fx: &Fixture, vals: &[f64]) -> Vec<f64> {
    let u = fx.dom.u.as_slice();
    let mut f = vec![0.0; fx.space.len()];
    for (k, &v) in u.iter().enumerate() {
        f[v] = vals[k % vals.len()];
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heat_kernel_is_symmetric_conservative_and_positive(s in weighted_graph(), t in 0.05f64..5.0) {
        let k = heat_kernel(&s, t).unwrap();
        for x in 0..s.len() {
            prop_assert!((k.row_mass(&s, x) - 1.0).abs() < 1e-10);
            for y in 0..s.len() {
                prop_assert!((k.get(x, y) - k.get(y, x)).abs() < 1e-10);
                prop_assert!(k.get(x, y) > -1e-12);
            }
        }
    }

    #[test]
    fn heat_kernel_semigroup(s in weighted_graph(), t in 0.05f64..2.0, r in 0.05f64..2.0) {
        let (a, b, ab) = (heat_kernel(&s, t).unwrap(), heat_kernel(&s, r).unwrap(), heat_kernel(&s, t + r).unwrap());
        let m = s.measure();
        for x in 0..s.len() {
            for y in 0..s.len() {
                let conv: f64 = (0..s.len()).map(|z| a.get(x, z) * b.get(z, y) * m[z]).sum();
                prop_assert!((conv - ab.get(x, y)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn uniformization_matches_spectral_kernel((s, f) in graph_and_function(), t in 0.05f64..3.0) {
        let k = heat_kernel(&s, t).unwrap();
        let pf = heat_semigroup(&s, &f, t).unwrap();
        let m = s.measure();
        for x in 0..s.len() {
            let direct: f64 = (0..s.len()).map(|y| k.get(x, y) * f[y] * m[y]).sum();
            prop_assert!((direct - pf[x]).abs() < 1e-9, "{} vs {}", direct, pf[x]);
        }
    }

    #[test]
    fn spectral_identity((s, f) in graph_and_function()) {
        let spec = spectrum(&s).unwrap();
        let c = spec.coefficients(&s, &f);
        let spectral: f64 = spec.values.iter().zip(&c).map(|(l, a)| l * a * a).sum();
        let l2: f64 = f.iter().zip(s.measure()).map(|(v, m)| v * v * m).sum();
        let parseval: f64 = c.iter().map(|a| a * a).sum();
        prop_assert!((spectral - energy(&s, &f)).abs() < 1e-9 * (1.0 + spectral));
        prop_assert!((parseval - l2).abs() < 1e-9 * (1.0 + l2));
    }

    #[test]
    fn energy_measure_and_scaling((s, f) in graph_and_function(), a in -3.0f64..3.0, c in -5.0f64..5.0) {
        let em = energy_and_measure(&s, &f, None).unwrap();
        let e = energy(&s, &f);
        prop_assert!((em.total - e).abs() < 1e-12 * (1.0 + e));
        prop_assert!((em.of_set(0..s.len()) - e).abs() < 1e-12 * (1.0 + e));
        let g: Vec<f64> = f.iter().map(|v| a * v + c).collect();
        prop_assert!((energy(&s, &g) - a * a * e).abs() < 1e-10 * (1.0 + e));
    }

    #[test]
    fn poincare_sup_dominates_every_quotient((s, f) in graph_and_function()) {
        let all = VertexSet::all(s.len());
        let sup = poincare_sup(&s, &all, &all).unwrap();
        let m = s.measure();
        let mean = f.iter().zip(m).map(|(v, w)| v * w).sum::<f64>() / s.total_measure();
        let var: f64 = f.iter().zip(m).map(|(v, w)| w * (v - mean).powi(2)).sum();
        let e = energy(&s, &f);
        prop_assume!(e > 1e-9);
        prop_assert!(var / e <= sup * (1.0 + 1e-9));
        // The gap of the full generator gives the same supremum.
        let gap = spectrum(&s).unwrap().spectral_gap();
        prop_assert!((sup * gap - 1.0).abs() < 1e-8);
    }

    #[test]
    fn capacity_is_minimal_energy((s, f) in graph_and_function()) {
        let n = s.len();
        let plate = VertexSet::new(n, [0]);
        let shell = VertexSet::new(n, 0..n - 1);
        let cap = capacity_and_potential(&s, &plate, &shell).unwrap();
        let mut g = f.clone();
        g[0] = 1.0;
        g[n - 1] = 0.0;
        prop_assert!(cap.capacity <= energy(&s, &g) * (1.0 + 1e-10) + 1e-12);
        prop_assert!(cap.potential.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn rnet_is_separated_and_maximal(r in 0.5f64..6.0, seed in 0usize..100) {
        let s = Space::from_catalog(&CatalogSpec::gasket(3)).unwrap();
        let all = VertexSet::all(s.len());
        let order: Vec<usize> = (0..s.len()).map(|k| (k * 37 + seed) % s.len()).collect();
        let net = s.rnet(&all, r, &order).unwrap();
        for (i, &a) in net.iter().enumerate() {
            for &b in &net[i + 1..] {
                prop_assert!(s.distance(a, b) >= r);
            }
        }
        for v in 0..s.len() {
            prop_assert!(net.iter().any(|&a| s.distance(a, v) < r));
        }
    }

    #[test]
    fn doubling_bounds_volume_comparison(x in 0usize..289, y in 0usize..289, r in 1.0f64..6.0, k in 1.1f64..3.0) {
        let s = Space::from_catalog(&CatalogSpec::grid(17, 17)).unwrap();
        let all = VertexSet::all(s.len());
        let d = s.doubling_constant_exhaustive(&all).unwrap();
        let rr = 0.5 * r;
        for z in [x, y] {
            let big = s.mass(s.ball(z, r).unwrap().members);
            let small = s.mass(s.ball(z, rr).unwrap().members);
            prop_assert!(big <= d.constant * small * (1.0 + 1e-12));
        }
        let (lhs, rhs) = s.volume_comparison(&all, d, x, y, r, k * r).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn fuzz_lemma(vals in prop::collection::vec(-3.0f64..3.0, 8), ms in prop::collection::vec(0.5f64..2.0, 8), l in 1usize..4) {
        let s = Space::from_catalog(&CatalogSpec::path(20)).unwrap();
        let dom = DomainDecomposition::new(&s, VertexSet::new(21, 1..20)).unwrap();
        let cover = build_whitney(&s, &dom, Side::Interior, 0.1).unwrap();
        let g = whitney_graph(&s, &cover);
        let f: Vec<f64> = (0..g.len()).map(|k| vals[k % 8]).collect();
        let m: Vec<f64> = (0..g.len()).map(|k| ms[k % 8]).collect();
        let (lhs, rhs) = fuzz_sides(&g, &m, &f, l);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn extension_restricts_and_is_linear(
        a in prop::collection::vec(-1.0f64..1.0, 1..40),
        b in prop::collection::vec(-1.0f64..1.0, 1..40),
        s in -2.0f64..2.0,
    ) {
        let fx = half_grid();
        let (f, g) = (on_u(fx, &a), on_u(fx, &b));
        let (ef, eg) = (extend(&fx.space, &fx.op, &f).unwrap(), extend(&fx.space, &fx.op, &g).unwrap());
        let comb: Vec<f64> = f.iter().zip(&g).map(|(x, y)| x + s * y).collect();
        let ec = extend(&fx.space, &fx.op, &comb).unwrap();
        for v in 0..fx.space.len() {
            if fx.dom.u.contains(v) {
                prop_assert_eq!(ef[v], f[v]);
            }
            prop_assert!((ec[v] - ef[v] - s * eg[v]).abs() < 1e-12);
        }
    }

    #[test]
    fn extension_is_markov(a in prop::collection::vec(0.0f64..1.0, 1..40)) {
        let fx = half_grid();
        let f = on_u(fx, &a);
        let ef = extend(&fx.space, &fx.op, &f).unwrap();
        prop_assert!(ef.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
    }
}
