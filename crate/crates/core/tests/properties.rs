use coded_shuffle::analysis::{counts_flcd, load_flcd3, load_uncoded};
use coded_shuffle::bits::{concat_segments, xor_segments};
use coded_shuffle::simnet::predict_vs_measure;
use coded_shuffle::terasort::{balanced_cuts, design_boundaries, map_hash, Record};
use coded_shuffle::{BitString, BuildOptions, IvSizeProfile, NetworkConfig, Ratio, SchemeParams};
use num_bigint::BigInt;
use proptest::prelude::*;

fn bits(max_len: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 0..max_len).prop_map(BitString::from_iter)
}

fn same_len_pair() -> impl Strategy<Value = (BitString, BitString, BitString)> {
    (0usize..200).prop_flat_map(|n| {
        let v = || prop::collection::vec(any::<bool>(), n).prop_map(BitString::from_iter);
        (v(), v(), v())
    })
}

/// Feasible `(K, r)` for the general flexible design with small `K`.
fn flcd_config() -> impl Strategy<Value = (usize, usize)> {
    (4usize..=12).prop_flat_map(|k| (Just(k), 2..=k / 2))
}

proptest! {
    #[test]
    fn xor_is_an_involution((a, b, c) in same_len_pair()) {
        let ab = xor_segments(&[a.clone(), b.clone()]).unwrap();
        prop_assert_eq!(xor_segments(&[ab.clone(), b.clone()]).unwrap(), a.clone());
        prop_assert_eq!(xor_segments(&[b.clone(), a.clone()]).unwrap(), ab.clone());
        let left = xor_segments(&[ab, c.clone()]).unwrap();
        let bc = xor_segments(&[b, c]).unwrap();
        prop_assert_eq!(left, xor_segments(&[a.clone(), bc]).unwrap());
        let zero = BitString::zeros(a.len());
        prop_assert_eq!(xor_segments(&[a.clone(), zero]).unwrap(), a);
    }

    #[test]
    fn slicing_and_concatenation_round_trip(s in bits(300), cuts in prop::collection::vec(any::<prop::sample::Index>(), 0..6)) {
        let mut points: Vec<u64> = cuts.iter().map(|i| i.index(s.len() as usize + 1) as u64).collect();
        points.push(0);
        points.push(s.len());
        points.sort_unstable();
        let pieces: Vec<BitString> = points.windows(2).map(|w| s.slice(w[0]..w[1]).unwrap()).collect();
        prop_assert_eq!(concat_segments(&pieces), s);
    }

    #[test]
    fn write_then_read_back(base in bits(200), piece in bits(64), at in any::<prop::sample::Index>()) {
        prop_assume!(piece.len() <= base.len());
        let offset = at.index((base.len() - piece.len()) as usize + 1) as u64;
        let mut out = base.clone();
        out.write_at(offset, &piece).unwrap();
        prop_assert_eq!(out.slice(offset..offset + piece.len()).unwrap(), piece.clone());
        prop_assert_eq!(out.slice(0..offset).unwrap(), base.slice(0..offset).unwrap());
        let end = offset + piece.len();
        prop_assert_eq!(out.slice(end..base.len()).unwrap(), base.slice(end..base.len()).unwrap());
    }

    #[test]
    fn three_node_load_never_beats_one_sixth(t in prop::array::uniform3(1u64..10_000)) {
        let load = load_flcd3(t).unwrap();
        let sixth = Ratio::new(BigInt::from(1), BigInt::from(6));
        prop_assert!(load <= sixth);
        prop_assert_eq!(load == sixth, t[0] == t[1] && t[1] == t[2]);
    }

    #[test]
    fn three_node_simulation_is_exact(t in prop::array::uniform3(1u64..12), seed in any::<u64>()) {
        let params = SchemeParams::Flcd3 { sizes: t, scale: 1 };
        let c = predict_vs_measure(&params, &BuildOptions::default(), seed).unwrap();
        prop_assert!(c.exact() && c.decode_ok);
    }

    #[test]
    fn general_design_plan_is_sound((k, r) in flcd_config(), base in 1u64..4, seed in any::<u64>()) {
        let params = SchemeParams::FlcdGeneral { nodes: k, load: r, base_t1: base };
        let scheme = params.build(&BuildOptions::default()).unwrap();
        scheme.validate().unwrap();
        prop_assert_eq!(scheme.files() as u128, counts_flcd(k, r).unwrap().0);

        // each node maps N/m̂ or N/⌊m⌋ files, by class
        let cfg = NetworkConfig::new(k, r).unwrap();
        for node in 0..k {
            let want = if node < cfg.k1() { cfg.m_hat() } else { cfg.floor_m() };
            prop_assert_eq!(scheme.placement.files_of(node).len() * want, scheme.files());
        }
        let c = predict_vs_measure(&params, &BuildOptions::default(), seed).unwrap();
        prop_assert!(c.exact() && c.decode_ok);
    }

    #[test]
    fn binomial_design_is_exact(k in 3usize..=7, r_pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let r = 1 + r_pick.index(k - 1);
        let params = SchemeParams::Lmya { nodes: k, load: r, iv_bits: 1 };
        let c = predict_vs_measure(&params, &BuildOptions::default(), seed).unwrap();
        prop_assert!(c.exact() && c.decode_ok);
    }

    #[test]
    fn uncoded_load_matches_closed_form(
        plan in prop::collection::vec((1usize..5, 1u64..9), 2..6),
        seed in any::<u64>(),
    ) {
        let (file_counts, iv_sizes): (Vec<usize>, Vec<u64>) = plan.into_iter().unzip();
        let predicted = load_uncoded(&file_counts, &iv_sizes).unwrap();
        let params = SchemeParams::Uncoded { file_counts, iv_sizes };
        let c = predict_vs_measure(&params, &BuildOptions::default(), seed).unwrap();
        prop_assert_eq!(c.measured, predicted);
    }

    #[test]
    fn balanced_cuts_cover_demands_at_minimum_length(v in prop::collection::vec(0u64..500, 2..7)) {
        let cuts = balanced_cuts(&v);
        let p = v.len();
        for t in 0..p {
            prop_assert_eq!(cuts[t][t], 0);
            prop_assert_eq!(cuts[t].iter().sum::<u64>(), v[t]);
        }
        let total: u64 = (0..p).map(|s| (0..p).map(|t| cuts[t][s]).max().unwrap()).sum();
        let bound = v.iter().sum::<u64>().div_ceil(p as u64 - 1).max(*v.iter().max().unwrap());
        prop_assert_eq!(total, bound);
    }

    #[test]
    fn boundaries_tile_the_key_space(sizes in prop::collection::vec(1u64..50, 1..20), z in 20u32..=65536) {
        let profile = IvSizeProfile::new(sizes.clone()).unwrap();
        let spec = design_boundaries(z, &profile).unwrap();
        let widths = spec.widths();
        prop_assert_eq!(widths.iter().sum::<u32>(), z);
        prop_assert!(widths.iter().all(|&w| w >= 1));
        let total: u64 = sizes.iter().sum();
        let all_positive = sizes.iter().all(|&t| u64::from(z) * t >= total);
        if all_positive {
            for (w, t) in widths.iter().zip(&sizes) {
                let exact = f64::from(z) * *t as f64 / total as f64;
                prop_assert!((f64::from(*w) - exact).abs() < 1.0);
            }
        }
    }

    #[test]
    fn hashing_preserves_every_record(keys in prop::collection::vec(any::<u16>(), 0..300)) {
        let profile = IvSizeProfile::new(vec![1, 2, 3, 4]).unwrap();
        let spec = design_boundaries(1 << 16, &profile).unwrap();
        let records: Vec<Record> = keys.iter().map(|&key| Record { key, value: [key; 9] }).collect();
        let bins = map_hash(&records, &spec).unwrap();
        prop_assert_eq!(bins.iter().map(Vec::len).sum::<usize>(), records.len());
        for (k, bin) in bins.iter().enumerate() {
            prop_assert!(bin.iter().all(|r| spec.range(k).contains(&u32::from(r.key))));
        }
    }

    #[test]
    fn records_round_trip(key in any::<u16>(), value in prop::array::uniform9(any::<u16>())) {
        let r = Record { key, value };
        prop_assert_eq!(Record::from_bytes(&r.to_bytes()), r);
    }
}
