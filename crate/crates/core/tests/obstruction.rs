mod support;

use bpmc::obstruction::{
    cp_image, enumerate_indices, mc, mc_2p2_explicit, mc_to_validity, mc_via_inverse, McOptions,
    MultiIndex,
};
use bpmc::powerop::PowerOpData;
use bpmc::reduction::Reducer;
use bpmc::ring::{parse_polynomial, parse_series, Basis, TruncatedSeries};
use bpmc::FglContext;

fn assert_agree(a: &TruncatedSeries, b: &TruncatedSeries) {
    let v = a.validity().min(b.validity());
    let (a, b) = (a.truncate(v), b.truncate(v));
    assert!(
        a.agrees_with(&b),
        "first difference at {:?}\n{}\n{}",
        a.first_disagreement(&b),
        a,
        b
    );
}

#[test]
fn three_routes_agree() {
    for (p, n, k) in [(2, 2, 9), (3, 4, 13), (5, 8, 30)] {
        let ctx = FglContext::new(p, k).unwrap();
        let data = PowerOpData::compute(&ctx, n).unwrap();
        let reducer = Reducer::from_context(&ctx).unwrap();
        let full = McOptions {
            force_full: true,
            ..Default::default()
        };
        let sum = mc(&ctx, &data, &reducer, n, &full).unwrap();
        let raw = sum.raw.clone().unwrap();
        let inverse = mc_via_inverse(&ctx, &data, n).unwrap();
        assert!(
            raw.validity() >= p,
            "p = {}: validity {}",
            p,
            raw.validity()
        );
        assert_agree(&raw, &inverse);
        let explicit = mc_2p2_explicit(&ctx, &data).unwrap();
        if p == 2 {
            assert_agree(&raw, &explicit);
        }
        let a = sum.reduced.series;
        let b = reducer.canonical_rep(&explicit).unwrap().series;
        assert_agree(&a, &b);
    }
}

#[test]
fn sparseness_holds_without_the_shortcut() {
    let ctx = FglContext::new(3, 13).unwrap();
    let data = PowerOpData::compute(&ctx, 5).unwrap();
    let reducer = Reducer::from_context(&ctx).unwrap();
    let full = McOptions {
        force_full: true,
        ..Default::default()
    };
    for n in [1, 3, 5] {
        let r = mc(&ctx, &data, &reducer, n, &full).unwrap();
        assert!(r.raw.is_some());
        assert!(r.reduced.series.validity() >= 3);
        assert!(r.reduced.is_zero(), "MC_{} ≡ {}", n, r.reduced.series);
        let short = mc(&ctx, &data, &reducer, n, &McOptions::default()).unwrap();
        assert!(short.by_sparseness());
    }
}

#[test]
fn odd_a_i_are_divisible_by_the_p_series() {
    let ctx = FglContext::new(3, 13).unwrap();
    let data = PowerOpData::compute(&ctx, 4).unwrap();
    let reducer = Reducer::from_context(&ctx).unwrap();
    for i in [1, 3] {
        let a = data.a_v(&ctx, i).unwrap();
        assert!(
            reducer.divisible_by_p_series(&a).unwrap(),
            "a_{} = {}",
            i,
            a
        );
    }
    for i in [0, 2, 4] {
        let a = data.a_v(&ctx, i).unwrap();
        assert!(
            !reducer.divisible_by_p_series(&a).unwrap(),
            "a_{} = {}",
            i,
            a
        );
    }
}

#[test]
fn mu_matches_symbolic_expansion() {
    for n in -8..=8 {
        let checked = support::check_mu(n).unwrap();
        // partitions of 0, 1, ..., 6
        assert_eq!(checked, 1 + 1 + 2 + 3 + 5 + 7 + 11);
    }
}

#[test]
fn index_enumeration_is_complete() {
    // every ᾱ with |ᾱ|' = n - (p^j - 1), nothing else
    for (p, n) in [(2, 6), (3, 6), (5, 6), (2, 5), (7, 6)] {
        let mut got: Vec<MultiIndex> = enumerate_indices(n, p)
            .into_iter()
            .map(|(a, _)| a)
            .collect();
        let mut want: Vec<MultiIndex> = support::small_indices()
            .into_iter()
            .map(|(a, _)| a)
            .filter(|a| {
                let w = a.weighted_size();
                w <= n && bpmc::obstruction::cp_degrees(p, n).contains(&(n - w))
            })
            .collect();
        got.sort();
        want.sort();
        assert_eq!(got, want, "p = {}, n = {}", p, n);
    }
}

#[test]
fn cp_images() {
    let ctx = FglContext::new(2, 7).unwrap();
    assert_eq!(
        cp_image(&ctx, 1).unwrap(),
        parse_polynomial("v1", Basis::V).unwrap()
    );
    assert!(cp_image(&ctx, 2).unwrap().is_zero());
    // [CP^3] = 4 l2 = v1^3 + 2 v2
    assert_eq!(
        cp_image(&ctx, 3).unwrap(),
        parse_polynomial("v1^3 + 2 v2", Basis::V).unwrap()
    );
}

#[test]
fn produced_series_are_homogeneous() {
    for (p, k, n) in [(2, 13, 5), (3, 25, 4)] {
        let ctx = FglContext::new(p, k).unwrap();
        let data = PowerOpData::compute(&ctx, n).unwrap();
        let reducer = Reducer::from_context(&ctx).unwrap();
        for i in 0..=n as usize {
            let a = data.a_v(&ctx, i).unwrap();
            assert!(a.weight().is_some());
            a.check_homogeneity().unwrap();
        }
        let r = mc(
            &ctx,
            &data,
            &reducer,
            n,
            &McOptions {
                force_full: true,
                ..Default::default()
            },
        )
        .unwrap();
        let raw = r.raw.unwrap();
        assert!(raw.weight().is_some());
        raw.check_homogeneity().unwrap();
        r.reduced.series.check_homogeneity().unwrap();
    }
}

#[test]
fn leading_terms_at_five() {
    let reducer = Reducer::new(5);
    let run = mc_to_validity(5, 8, 93, &reducer, &McOptions::default()).unwrap();
    let want = parse_series(
        "3 v1^16 ξ^88 + (4 v1^17 + v1^11 v2) ξ^92 + O(ξ)^93",
        5,
        Basis::V,
    )
    .unwrap();
    assert_eq!(run.result.reduced.series.validity(), 93);
    assert_agree(&run.result.reduced.series, &want);
    let (j, c) = run.result.certificate.unwrap();
    assert_eq!((j, c.to_string()), (88, "3 v1^16".to_string()));
}
