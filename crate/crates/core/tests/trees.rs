mod common;

use common::*;
use proptest::prelude::*;
use treelab::trees::{build_truncation, build_truncation_with_cap, contract_k, LeafRule, TreeSpec};
use treelab::{Distribution, ErrorKind};

fn gw(support: &[f64], weights: &[f64], seed: u64, conditioned: bool) -> TreeSpec {
    TreeSpec::GaltonWatson { offspring: law(support, weights), seed, conditioned }
}

#[test]
fn spine_levels_double() {
    let spec = TreeSpec::SpineWithLeaves { leaves: LeafRule::default() };
    let t = build_truncation(&spec, 3).unwrap();
    assert_eq!(t.level_sizes(), vec![1, 2, 4, 8]);
    let t = build_truncation(&spec, 12).unwrap();
    for (k, &m) in t.level_sizes().iter().enumerate() {
        assert_eq!(m, 1 << k);
    }
    assert_eq!(t.extendable_frontier().count(), 1);
    assert_eq!(spec.exact_branching_number(), Some(1.0));
}

#[test]
fn spine_contraction_has_one_live_vertex() {
    let spec = TreeSpec::SpineWithLeaves { leaves: LeafRule::default() };
    let t = build_truncation(&spec, 4).unwrap();
    let c = contract_k(&t, 2).unwrap();
    assert_eq!(c.tree.truncation_depth(), 2);
    assert_eq!(c.tree.extendable_frontier().count(), 1);
    let live: Vec<u64> = {
        let lineage = c.tree.lineage();
        (0..=2).map(|k| c.tree.level(k).filter(|&v| lineage[v as usize]).count() as u64).collect()
    };
    assert_eq!(live, vec![1, 1, 1]);
    assert!(contract_k(&t, 3).is_err());
}

#[test]
fn parent_list_text_and_json_agree() {
    let text = "# a small tree\n-1 0 0 1 1\n2 # continued\ndead: 3\n";
    let from_text = TreeSpec::from_parent_list(text).unwrap();
    let json = r#"{"kind": "explicit", "parents": [-1, 0, 0, 1, 1, 2], "dead_ends": [3]}"#;
    let from_json = TreeSpec::from_json(json).unwrap();
    assert_eq!(from_text, from_json);
    let t = build_truncation(&from_text, 2).unwrap();
    assert_eq!(t.level_sizes(), vec![1, 2, 3]);
    assert_eq!(t.extendable_frontier().count(), 2);
    let round: TreeSpec = serde_json::from_str(&serde_json::to_string(&from_json).unwrap()).unwrap();
    assert_eq!(round, from_json);
}

#[test]
fn malformed_specs_are_config_errors() {
    for bad in [
        r#"{"kind": "explicit", "parents": [-1, 0, 5]}"#,
        r#"{"kind": "explicit", "parents": [-1, -1]}"#,
        r#"{"kind": "explicit", "parents": [1, 0]}"#,
        r#"{"kind": "homogeneous", "b": 0}"#,
        r#"{"kind": "mystery"}"#,
        r#"{"kind": "homogeneous""#,
    ] {
        let e = TreeSpec::from_json(bad).unwrap_err();
        assert_eq!(e.kind(), ErrorKind::Config, "{bad}");
    }
    assert!(TreeSpec::from_parent_list("-1 zero").is_err());
    // a leaf above the truncation depth must be declared dead
    let spec = TreeSpec::Explicit { parents: vec![-1, 0, 0, 1], dead_ends: vec![] };
    assert!(build_truncation(&spec, 2).is_err());
}

#[test]
fn vertex_budget_is_a_resource_error() {
    let e = build_truncation_with_cap(&TreeSpec::Homogeneous { b: 2 }, 10, 100).unwrap_err();
    assert_eq!(e.kind(), ErrorKind::Resource);
}

#[test]
fn subcritical_conditioning_is_unsupported() {
    let spec = gw(&[0.0, 1.0], &[0.5, 0.5], 1, true);
    let e = build_truncation(&spec, 40).unwrap_err();
    assert_eq!(e.kind(), ErrorKind::Unsupported);
    // unconditioned trees may die out
    let t = build_truncation(&gw(&[0.0, 1.0], &[0.5, 0.5], 1, false), 40).unwrap();
    assert!(!t.has_extendable_frontier());
}

#[test]
fn galton_watson_mean_level_size() {
    // E[M_n] = 1.5^n for offspring uniform on {1, 2}
    let n = 10;
    let sizes: Vec<f64> = (0..300)
        .map(|seed| {
            let t = build_truncation(&gw(&[1.0, 2.0], &[0.5, 0.5], seed, true), n).unwrap();
            t.level(n).len() as f64
        })
        .collect();
    let (mean, se) = mean_stderr(&sizes);
    assert!((mean - 1.5f64.powi(n as i32)).abs() <= 3.0 * se, "{mean} ± {se}");
}

fn spec_strategy() -> impl Strategy<Value = TreeSpec> {
    prop_oneof![
        (1u32..4).prop_map(|b| TreeSpec::Homogeneous { b }),
        (0u64..3).prop_map(|c| TreeSpec::SpineWithLeaves { leaves: LeafRule::Constant { count: c } }),
        Just(TreeSpec::SpineWithLeaves { leaves: LeafRule::default() }),
        any::<u64>().prop_map(|seed| TreeSpec::GaltonWatson {
            offspring: Distribution::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.2, 0.3, 0.3, 0.2]).unwrap(),
            seed,
            conditioned: false,
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prefixes_are_consistent(spec in spec_strategy(), n in 1u32..8, cut in 0u32..8) {
        let m = cut.min(n);
        let deep = build_truncation(&spec, n).unwrap();
        let shallow = build_truncation(&spec, m).unwrap();
        prop_assert_eq!(deep.prefix(m).unwrap(), shallow);
        deep.validate().unwrap();
    }

    #[test]
    fn contraction_subsamples_levels(b in 1u32..4, j in 1u32..4, k in 1u32..4) {
        let t = build_truncation(&TreeSpec::Homogeneous { b }, j * k).unwrap();
        let c = contract_k(&t, k).unwrap();
        c.tree.validate().unwrap();
        let sizes = t.level_sizes();
        let expect: Vec<u64> = (0..=j).map(|i| sizes[(i * k) as usize]).collect();
        prop_assert_eq!(c.tree.level_sizes(), expect);
        for v in 1..c.tree.len() as u32 {
            let seg = c.segment(&t, v);
            prop_assert_eq!(seg.len(), k as usize);
            prop_assert_eq!(*seg.last().unwrap(), c.origin[v as usize]);
            prop_assert_eq!(t.parent(seg[0]), Some(c.origin[c.tree.parent(v).unwrap() as usize]));
        }
    }

    #[test]
    fn random_explicit_trees_validate(seed in any::<u64>(), n in 2usize..40) {
        let (spec, t) = random_small_tree(&mut rng(seed), n);
        t.validate().unwrap();
        prop_assert_eq!(t.len(), n);
        let json = serde_json::to_string(&spec).unwrap();
        prop_assert_eq!(TreeSpec::from_json(&json).unwrap(), spec);
    }
}
