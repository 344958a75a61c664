mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{accessible_oracle, load_fixtures, reachable_meta_oracle, rng, sccs_oracle};
use mmtk_core::foundation::detect_def_cycles;
use mmtk_core::kernel::{Object, QName, SymbolDecl, Theory, TheoryGraph};
use rand::Rng;

/// Random meta-forests: chains, diamonds-as-shared-roots, orphan theories.
fn random_graph(seed: u64) -> TheoryGraph {
    let mut r = rng(seed);
    let n = r.gen_range(1..=12usize);
    let mut g = TheoryGraph::default();
    for i in 0..n {
        // Meta must point at an earlier theory (keeps the graph well-founded
        // here; cycle handling is tested separately).
        let meta = if i > 0 && r.gen_bool(0.7) {
            Some(format!("T{}", r.gen_range(0..i)))
        } else {
            None
        };
        let mut th = Theory::new(format!("T{i}"), meta);
        for s in 0..r.gen_range(0..4usize) {
            th.body.push(SymbolDecl::plain(format!("c{i}_{s}")));
        }
        g.push_theory(th);
    }
    g
}

#[test]
fn meta_chain_matches_reachability_oracle() {
    for seed in 0..200u64 {
        let g = random_graph(seed);
        for th in g.theories() {
            let chain: Vec<_> = g
                .meta_chain(&th.name)
                .unwrap()
                .iter()
                .map(|t| t.name.clone())
                .collect();
            let oracle = reachable_meta_oracle(&g, &th.name).unwrap();
            assert_eq!(chain, oracle, "seed {seed}, theory {}", th.name);
        }
        assert!(g.meta_chain("nope").is_err());
    }
}

#[test]
fn accessibility_matches_oracle() {
    for seed in 0..120u64 {
        let g = random_graph(seed);
        let all: Vec<QName> = g
            .theories()
            .flat_map(|t| t.body.iter().map(|d| (t.name.clone(), d.name.clone())))
            .collect();
        for th in g.theories() {
            let acc = g.accessible_symbols(&th.name).unwrap();
            let oracle = accessible_oracle(&g, &th.name).unwrap();
            assert_eq!(acc, oracle, "seed {seed}, theory {}", th.name);
            let acc_set: BTreeSet<_> = acc.iter().cloned().collect();
            for q in &all {
                assert_eq!(
                    g.is_accessible(&th.name, &q.0, &q.1).unwrap(),
                    acc_set.contains(q),
                    "seed {seed}: {q:?} from {}",
                    th.name
                );
            }
        }
    }
}

#[test]
fn meta_cycles_are_rejected() {
    let mut g = TheoryGraph::default();
    g.push_theory(Theory::new("A", Some("B".into())));
    g.push_theory(Theory::new("B", Some("A".into())));
    assert!(g.meta_chain("A").is_err());
    assert!(g.meta_chain("B").is_err());
    let mut g2 = TheoryGraph::default();
    g2.push_theory(Theory::new("A", Some("A".into())));
    assert!(g2.meta_chain("A").is_err());
}

#[test]
fn accessibility_is_shadowing_free() {
    // Same symbol name in meta and child: both remain accessible under
    // their qualified names.
    let (g, _) = load_fixtures(&["peano.mmtx"]);
    assert!(g.is_accessible("cicNat", "CIC", "arrow").unwrap());
    assert!(g.is_accessible("cicNat", "LF", "arrow").unwrap());
    assert!(!g.is_accessible("zfNat", "CIC", "arrow").unwrap());
    // Chain order is root-first.
    let chain: Vec<_> = g.meta_chain("zfNat").unwrap().iter().map(|t| t.name.as_str()).collect::<Vec<_>>();
    assert_eq!(chain, ["LF", "SOL", "ZF", "zfNat"]);
}

/// Random definiens graphs with seeded cycles: the kernel's detector must
/// agree with an independent SCC computation.
#[test]
fn def_cycles_match_scc_oracle() {
    for seed in 0..150u64 {
        let mut r = rng(seed * 7 + 1);
        let n = r.gen_range(1..=10usize);
        let mut g = TheoryGraph::default();
        let mut th = Theory::new("D", None);
        // Defs reference arbitrary symbols (earlier or later): cycles happen.
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        for i in 0..n {
            let def = if r.gen_bool(0.65) {
                let j = r.gen_range(0..n);
                Some(Object::sym("D", names[j].clone()))
            } else {
                None
            };
            th.body.push(SymbolDecl { name: names[i].clone(), ty: None, def });
        }
        g.push_theory(th);

        let kernel = detect_def_cycles(&g);

        let nodes: Vec<QName> = names.iter().map(|n| ("D".to_string(), n.clone())).collect();
        let mut edges: BTreeMap<QName, BTreeSet<QName>> = BTreeMap::new();
        let th = g.theory("D").unwrap();
        for d in &th.body {
            if let Some(def) = &d.def {
                let mentions: BTreeSet<QName> = def
                    .symbols()
                    .into_iter()
                    .filter(|q| nodes.contains(q))
                    .collect();
                edges.insert(("D".to_string(), d.name.clone()), mentions);
            }
        }
        let oracle = sccs_oracle(&nodes, &edges);
        assert_eq!(kernel, oracle, "seed {seed}");
    }
}

#[test]
fn def_cycle_multi_member_and_self_loop() {
    let mut g = TheoryGraph::default();
    let mut th = Theory::new("D", None);
    th.body.push(SymbolDecl { name: "a".into(), ty: None, def: Some(Object::sym("D", "b")) });
    th.body.push(SymbolDecl { name: "b".into(), ty: None, def: Some(Object::sym("D", "a")) });
    th.body.push(SymbolDecl { name: "s".into(), ty: None, def: Some(Object::sym("D", "s")) });
    th.body.push(SymbolDecl { name: "ok".into(), ty: None, def: Some(Object::sym("D", "a")) });
    g.push_theory(th);
    let cycles = detect_def_cycles(&g);
    assert_eq!(
        cycles,
        vec![
            vec![("D".to_string(), "a".to_string()), ("D".to_string(), "b".to_string())],
            vec![("D".to_string(), "s".to_string())],
        ]
    );
}

#[test]
fn fixture_graphs_are_acyclic() {
    let (g, _) = load_fixtures(&["peano.mmtx", "tg.mmtx", "structural.mmtx"]);
    assert!(detect_def_cycles(&g).is_empty());
}
