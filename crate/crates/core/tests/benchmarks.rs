use mmnlearn_core::bench::{
    binary_counter, counter_with_init, is_dormant_name, mqtt_lighting, BenchmarkSpec,
};
use mmnlearn_core::{Mmn, Moore, Symbol};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn edge(m: &Mmn, src: &str, dst: &str) -> usize {
    let net = m.network();
    let (s, d) = (net.node_id(src).unwrap(), net.node_id(dst).unwrap());
    net.edges()
        .iter()
        .position(|e| e.src == s && e.dst == d)
        .unwrap()
}

/// Each gap is the number of zeros following a 1; gaps of at least `k`
/// let the carries settle.
fn counting_word(k: usize, gaps: &[usize]) -> Vec<Symbol> {
    let mut w = vec![Symbol(0); k];
    for &g in gaps {
        w.push(Symbol(1));
        w.extend(std::iter::repeat_n(Symbol(0), k + g));
    }
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn counter_counts_well_separated_ones(
        k in 1usize..=6,
        gaps in proptest::collection::vec(0usize..4, 0..12),
    ) {
        let w = counting_word(k, &gaps);
        prop_assume!(w.len() <= 60 && gaps.len() < (1 << k));
        let m = binary_counter(k);
        let bits = m.outputs().decode(*m.trace(&w).last().unwrap());
        let value: usize = bits.iter().enumerate().map(|(j, b)| (b.0 as usize) << j).sum();
        prop_assert_eq!(value, gaps.len());
        // the integer counter agrees at every settled point, too
        let mut ones = 0;
        let trace = m.trace(&w);
        for (t, s) in w.iter().enumerate() {
            if s.0 == 1 {
                ones += 1;
            }
            let settled = t + 1 >= k && w[t + 1 - k..=t].iter().all(|s| s.0 == 0);
            if settled {
                let bits = m.outputs().decode(trace[t + 1]);
                let v: usize = bits.iter().enumerate().map(|(j, b)| (b.0 as usize) << j).sum();
                prop_assert_eq!(v, ones);
            }
        }
    }
}

#[test]
fn broker_forwards_two_phase_publications_only_after_release() {
    let m = mqtt_lighting();
    let from_motion = edge(&m, "motion", "broker");
    let to_light = edge(&m, "broker", "light");
    let pub_alpha = m.network().edges()[from_motion].alphabet.clone();
    let fwd_alpha = m.network().edges()[to_light].alphabet.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = m.inputs().len() as u32;
    let mut forwards = 0;
    for _ in 0..10_000 {
        let len = rng.random_range(1..=40);
        let w: Vec<Symbol> = (0..len).map(|_| Symbol(rng.random_range(0..n))).collect();
        let ticks = m.simulate(&w).unwrap();
        let sent = m.edge_trace(&ticks, from_motion).unwrap();
        let fwd = m.edge_trace(&ticks, to_light).unwrap();
        for (t, f) in fwd.iter().enumerate() {
            let value = fwd_alpha.name(*f);
            if value != "motion" && value != "no_motion" {
                continue;
            }
            forwards += 1;
            let names: Vec<String> = sent[..t].iter().map(|s| pub_alpha.name(*s)).collect();
            let published = names.iter().rposition(|s| s.starts_with("PubQoS2"));
            let p = published.expect("a forward needs a publication");
            assert!(
                names[p + 1..].iter().any(|s| s == "PubRel"),
                "forwarded {value} at tick {t} before release: {names:?}"
            );
        }
    }
    assert!(forwards > 0);
}

#[test]
fn light_is_on_only_for_motion_in_the_dark() {
    let m = mqtt_lighting();
    let to_light = edge(&m, "broker", "light");
    let alpha = m.network().edges()[to_light].alphabet.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = m.inputs().len() as u32;
    for _ in 0..500 {
        let w: Vec<Symbol> = (0..60).map(|_| Symbol(rng.random_range(0..n))).collect();
        let ticks = m.simulate(&w).unwrap();
        let fwd = m.edge_trace(&ticks, to_light).unwrap();
        let out = m.trace(&w);
        let (mut dark, mut motion) = (true, false);
        for t in 0..out.len() {
            assert_eq!(m.outputs().name(out[t]) == "ON", dark && motion, "tick {t}");
            match alpha.name(fwd[t]).as_str() {
                "bright" => dark = false,
                "dark" => dark = true,
                "motion" => motion = true,
                "no_motion" => motion = false,
                _ => {}
            }
        }
    }
}

#[test]
fn dormant_halves_are_never_emitted() {
    for seed in 0..20 {
        for top in ["path3", "star2", "compl3"] {
            let m: Mmn = format!("rand:{top}:rich:seed={seed}:mean=4")
                .parse::<BenchmarkSpec>()
                .unwrap()
                .build();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = m.inputs().len() as u32;
            for _ in 0..50 {
                let w: Vec<Symbol> = (0..30).map(|_| Symbol(rng.random_range(0..n))).collect();
                let ticks = m.simulate(&w).unwrap();
                for e in 0..m.network().edges().len() {
                    if let Some(trace) = m.edge_trace(&ticks, e) {
                        let alpha = &m.network().edges()[e].alphabet;
                        assert!(trace.iter().all(|s| !is_dormant_name(&alpha.name(*s))));
                    }
                }
            }
        }
    }
}

#[test]
fn generated_benchmarks_are_deterministic_and_complete() {
    for spec in [
        "rand:compl3:lean:seed=5",
        "rand:star3:rich:seed=5:mean=4",
        "rand:path5:lean:seed=1",
    ] {
        let spec: BenchmarkSpec = spec.parse().unwrap();
        let (a, b) = (spec.build(), spec.build());
        assert_eq!(a.components(), b.components());
        assert!(a.components().iter().all(|c| c.is_complete()));
        assert_eq!(a.num_components(), spec.expected_components());
    }
    let other: BenchmarkSpec = "rand:compl3:lean:seed=6".parse().unwrap();
    let first: BenchmarkSpec = "rand:compl3:lean:seed=5".parse().unwrap();
    assert_ne!(first.build().components(), other.build().components());
}

#[test]
fn fixed_benchmarks_have_their_shapes() {
    let m = binary_counter(5);
    assert_eq!(m.total_states(), 15);
    assert!(m.components().iter().all(|c| c.num_states() == 3));
    let m = counter_with_init();
    assert_eq!(m.num_components(), 2);
    assert_eq!(mqtt_lighting().total_states(), 37);
}
