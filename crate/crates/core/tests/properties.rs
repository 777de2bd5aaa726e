mod common;

use graph_recon::gen::{self, InstanceSpec, Structure, WeightKind};
use graph_recon::graph::{self, Vertex, WeightedGraph};
use graph_recon::oracle::{OracleError, OracleSession, PairQuery};
use graph_recon::recon::{find_connected_components, lbl_r, NoProbe, ReconConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
    (2usize..20).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 1.0f64..20.0), 0..3 * n).prop_map(move |raw| {
            let mut seen = std::collections::HashSet::new();
            let edges: Vec<_> = raw
                .into_iter()
                .filter(|&(u, v, _)| u != v && seen.insert((u.min(v), u.max(v))))
                .collect();
            WeightedGraph::new(n, edges).unwrap()
        })
    })
}

fn arb_thresholds() -> impl Strategy<Value = (f64, f64)> {
    (1.0f64..25.0, 1.0f64..25.0).prop_map(|(a, b)| (a.min(b), a.max(b)))
}

fn le_with_slack(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * b.abs().max(1.0)
}

#[derive(Debug, Clone)]
enum Op {
    W(Vertex, Vertex, f64),
    D(Vertex, Vertex, f64),
    C(Vertex, Vec<Vertex>, f64),
    Batch(bool, Vec<Vertex>, Vec<Vertex>, f64),
}

fn arb_ops(n: usize) -> impl Strategy<Value = Vec<Op>> {
    let v = 0..n;
    let thr = prop::sample::select(vec![1.0, 2.0, 3.5, 8.0]);
    let op = prop_oneof![
        (v.clone(), v.clone(), thr.clone()).prop_map(|(a, b, t)| Op::W(a, b, t)),
        (v.clone(), v.clone(), thr.clone()).prop_map(|(a, b, t)| Op::D(a, b, t)),
        (v.clone(), prop::collection::vec(v.clone(), 0..5), thr.clone()).prop_map(|(a, s, t)| Op::C(a, s, t)),
        (
            any::<bool>(),
            prop::collection::vec(v.clone(), 0..4),
            prop::collection::vec(v, 0..4),
            thr
        )
            .prop_map(|(w, a, b, t)| Op::Batch(w, a, b, t)),
    ];
    prop::collection::vec(op, 0..40)
}

/// Applies `ops`, returning the answers and the number of charges each
/// successful op should cost.
fn replay(s: &mut OracleSession<'_>, ops: &[Op]) -> (Vec<String>, u64) {
    let mut answers = Vec::new();
    let mut expected = 0u64;
    for op in ops {
        let out = match op {
            Op::W(a, b, t) => s.q_w(*a, *b, *t).map(|x| {
                expected += 1;
                format!("{x}")
            }),
            Op::D(a, b, t) => s.q_d(*a, *b, *t).map(|x| {
                expected += 1;
                format!("{x}")
            }),
            Op::C(a, set, t) => s.q_c(*a, set.iter().copied(), *t).map(|x| {
                expected += 1;
                format!("{x}")
            }),
            Op::Batch(w, a, b, t) => {
                let kind = if *w { PairQuery::Weight } else { PairQuery::Distance };
                s.batch_query(kind, a, b, *t).map(|table| {
                    let same = a.iter().map(|x| b.iter().filter(|y| *y == x).count()).sum::<usize>();
                    expected += (a.len() * b.len() - if *w { same } else { 0 }) as u64;
                    format!("{:?}", table.values)
                })
            }
        };
        answers.push(match out {
            Ok(x) => x,
            Err(e) => format!("err {e}"),
        });
    }
    (answers, expected)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn layers_shrink_as_threshold_grows(g in arb_graph(), (lo, hi) in arb_thresholds()) {
        let a = graph::layer(&g, lo).unwrap();
        let b = graph::layer(&g, hi).unwrap();
        let wide: std::collections::HashSet<_> = a.edges().map(|e| (e.u, e.v)).collect();
        for e in b.edges() {
            prop_assert!(wide.contains(&(e.u, e.v)));
            prop_assert!(e.w >= hi);
        }
    }

    #[test]
    fn layer_distances_form_a_metric(g in arb_graph(), thr in 1.0f64..20.0) {
        let view = graph::layer(&g, thr).unwrap();
        let n = g.n();
        let rows: Vec<Vec<f64>> = (0..n).map(|v| graph::dijkstra(&view, v)).collect();
        for u in 0..n {
            prop_assert_eq!(rows[u][u], 0.0);
            for v in 0..n {
                prop_assert!(le_with_slack(rows[u][v], rows[v][u]) && le_with_slack(rows[v][u], rows[u][v]));
                for w in 0..n {
                    prop_assert!(le_with_slack(rows[u][w], rows[u][v] + rows[v][w]));
                }
            }
        }
    }

    #[test]
    fn distances_grow_with_threshold(g in arb_graph(), (lo, hi) in arb_thresholds()) {
        let mut s = OracleSession::new(&g);
        let n = g.n();
        for u in 0..n {
            for v in 0..n {
                let a = s.q_d(u, v, lo).unwrap();
                let b = s.q_d(u, v, hi).unwrap();
                prop_assert!(le_with_slack(a, b));
            }
        }
    }

    #[test]
    fn components_agree_with_finite_distances(g in arb_graph(), thr in 1.0f64..20.0) {
        let view = graph::layer(&g, thr).unwrap();
        let labels = graph::component_labels(&view);
        let uf = graph::union_find_labels(&view);
        for u in 0..g.n() {
            let row = graph::dijkstra(&view, u);
            for v in 0..g.n() {
                prop_assert_eq!(labels[u] == labels[v], row[v].is_finite());
                prop_assert_eq!(uf[u] == uf[v], row[v].is_finite());
            }
        }
    }

    #[test]
    fn pair_queries_are_symmetric(g in arb_graph(), thr in 1.0f64..20.0) {
        let mut s = OracleSession::new(&g);
        for u in 0..g.n() {
            for v in 0..g.n() {
                if u != v {
                    prop_assert_eq!(s.q_w(u, v, thr).unwrap(), s.q_w(v, u, thr).unwrap());
                }
                let (a, b) = (s.q_d(u, v, thr).unwrap(), s.q_d(v, u, thr).unwrap());
                prop_assert!(le_with_slack(a, b) && le_with_slack(b, a));
            }
        }
    }

    #[test]
    fn ledger_counts_every_issued_query_and_replays(
        (g, ops) in arb_graph().prop_flat_map(|g| { let n = g.n(); (Just(g), arb_ops(n)) })
    ) {
        let mut s1 = OracleSession::new(&g).with_shadow();
        let (a1, expected) = replay(&mut s1, &ops);
        prop_assert_eq!(s1.ledger().cumulative_total(), expected);
        prop_assert_eq!(
            s1.ledger().qw() + s1.ledger().qd() + s1.ledger().qc(),
            expected
        );
        prop_assert_eq!(s1.shadow_report().unwrap().mismatches, 0);
        let mut s2 = OracleSession::new(&g);
        let (a2, _) = replay(&mut s2, &ops);
        prop_assert_eq!(a1, a2);
        prop_assert_eq!(s1.ledger(), s2.ledger());
    }

    #[test]
    fn exhausted_budget_charges_nothing(g in arb_graph(), budget in 0u64..30) {
        let mut s = OracleSession::new(&g);
        s.set_budget(Some(budget));
        let all: Vec<Vertex> = (0..g.n()).collect();
        let mut spent = 0;
        loop {
            let before = s.ledger().clone();
            match s.batch_query(PairQuery::Distance, &all[..1], &all, 1.0) {
                Ok(_) => spent += g.n() as u64,
                Err(OracleError::BudgetExhausted { .. }) => {
                    prop_assert_eq!(s.ledger(), &before);
                    break;
                }
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
        prop_assert!(spent <= budget);
        prop_assert_eq!(s.ledger().attempt_total(), spent);
    }

    #[test]
    fn generator_respects_degree_cap_and_is_reproducible(
        n in 2usize..300,
        d in 2usize..9,
        k in 1usize..5,
        alpha in prop::sample::select(vec![1.5, 2.0, 3.0]),
        seed in any::<u64>(),
    ) {
        let k = k.min(n);
        let spec = if k == 1 { InstanceSpec::connected(n, d, alpha, seed) } else { InstanceSpec::multi(n, d, k, alpha, seed) };
        let g = gen::gen_graph(&spec).unwrap();
        prop_assert!(g.max_degree() <= d);
        prop_assert_eq!(graph::components(&graph::layer(&g, 1.0).unwrap()).len(), k);
        prop_assert!(g.edges().iter().all(|e| e.w >= 1.0));
        let again = gen::gen_graph(&spec).unwrap();
        prop_assert_eq!(&g, &again);
        prop_assert_eq!(WeightedGraph::from_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn component_queries_within_bound(g in arb_graph(), thr in 1.0f64..20.0) {
        let mut s = OracleSession::new(&g);
        let v: Vec<Vertex> = (0..g.n()).collect();
        let comps = find_connected_components(&mut s, &v, thr).unwrap();
        let k = comps.len();
        let log = (usize::BITS - (k - 1).leading_zeros()) as u64; // ceil(log2 k)
        prop_assert!(s.ledger().qc() <= g.n() as u64 * (1 + log));
        if k == 1 {
            prop_assert_eq!(s.ledger().qc(), g.n() as u64 - 1);
        }
        let mut got: Vec<Vec<Vertex>> = comps.into_iter().map(|mut c| { c.sort_unstable(); c }).collect();
        got.sort();
        prop_assert_eq!(got, graph::components(&graph::layer(&g, thr).unwrap()));
    }

    #[test]
    fn lbl_r_is_exact_on_generated_instances(
        n in 5usize..160,
        d in 3usize..7,
        k in 1usize..4,
        alpha in prop::sample::select(vec![1.5, 2.0, 3.0]),
        seed in any::<u64>(),
    ) {
        let spec = InstanceSpec {
            structure: if k == 1 { Structure::Connected } else { Structure::MultiComponent },
            k,
            ..InstanceSpec::connected(n, d, alpha, seed)
        };
        let g = gen::gen_graph(&spec).unwrap();
        let mut s = OracleSession::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let v: Vec<Vertex> = (0..n).collect();
        let r = lbl_r(&mut s, &v, &ReconConfig::default(), &mut rng, &mut NoProbe).unwrap();
        prop_assert_eq!(r.edges, common::truth(&g));
        prop_assert_eq!(r.ledger.cumulative_total(), s.ledger().cumulative_total());
    }

    #[test]
    fn uniform_and_fixed_weights_stay_in_range(n in 2usize..100, cap in 1.0f64..4.0, seed in any::<u64>()) {
        let spec = InstanceSpec { weight_model: WeightKind::UniformTruncated, w_cap: Some(cap), ..InstanceSpec::connected(n, 4, 2.0, seed) };
        let g = gen::gen_graph(&spec).unwrap();
        prop_assert!(g.edges().iter().all(|e| e.w >= 1.0 && e.w <= cap));
        let spec = InstanceSpec { weight_model: WeightKind::Fixed, w_cap: None, ..spec };
        let g = gen::gen_graph(&spec).unwrap();
        prop_assert!(g.edges().iter().all(|e| e.w == 1.0));
    }
}
