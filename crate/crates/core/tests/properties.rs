use proptest::prelude::*;

use sct_core::allocation::{
    allocate_budgets, decode_side_info, encode_side_info, select_mode, BandSection, BudgetParams, Mode, SideInfo,
};
use sct_core::correction::{inpaint_feature_map, CorrectionContext, ErrorMask};
use sct_core::digital::entropy::{decode_blocks, decode_blocks_dpcm, encode_blocks, encode_blocks_dpcm, QBlock};
use sct_core::digital::quant::{dequantize, quantize};
use sct_core::digital::{decode_info_bits, pack_blocks, ChannelCode, ConvK7};
use sct_core::semantics::{FeatureMap, SemanticLabelMap, COEFFS_PER_BLOCK};

fn qblock() -> impl Strategy<Value = QBlock> {
    prop::collection::vec(prop_oneof![6 => Just(0i32), 3 => -40i32..40, 1 => -40_000i32..40_000], COEFFS_PER_BLOCK)
        .prop_map(|v| v.try_into().unwrap())
}

fn label_map() -> impl Strategy<Value = SemanticLabelMap> {
    (1usize..12, 1usize..12, 1usize..5).prop_flat_map(|(cols, rows, n)| {
        prop::collection::vec(0..n as u8, cols * rows)
            .prop_map(move |raw| SemanticLabelMap::new(cols, rows, raw, n).unwrap())
    })
}

proptest! {
    #[test]
    fn entropy_round_trip(blocks in prop::collection::vec(qblock(), 0..12)) {
        let plain = decode_blocks(&encode_blocks(&blocks), blocks.len());
        prop_assert_eq!(plain.decoded, blocks.len());
        prop_assert_eq!(&plain.blocks, &blocks);
        let dpcm = decode_blocks_dpcm(&encode_blocks_dpcm(&blocks), blocks.len());
        prop_assert_eq!(&dpcm.blocks, &blocks);
    }

    #[test]
    fn packets_decode_on_a_clean_link(blocks in prop::collection::vec(qblock(), 1..30), limit in 16usize..600) {
        let packets = pack_blocks(3, &blocks, limit);
        let bits: Vec<bool> = packets.iter().flat_map(|p| p.to_bits()).collect();
        let dec = decode_info_bits(&bits, 3, blocks.len());
        let covered: usize = packets.iter().map(|p| p.n_blocks).sum();
        for (i, b) in blocks.iter().enumerate() {
            prop_assert_eq!(dec.mask[i], i >= covered);
            if i < covered {
                prop_assert_eq!(&dec.blocks[i], b);
            }
        }
        prop_assert_eq!(dec.crc_failures, 0);
    }

    #[test]
    fn side_info_round_trip(labels in label_map(), seed in any::<u8>(), n_vars in 0usize..64) {
        let n = labels.num_labels();
        let info = SideInfo {
            fills: (0..n).map(|l| seed.wrapping_mul(l as u8 + 1)).collect(),
            bands: vec![BandSection { label: 0, vars: vec![seed; n_vars] }],
            labels,
        };
        prop_assert_eq!(decode_side_info(&encode_side_info(&info)), Ok(info));
    }

    #[test]
    fn quantizer_error_bound(x in -5000.0f64..5000.0, k in 0usize..41) {
        let step = 0.25 * 2f64.powf(k as f64 / 4.0);
        let q = quantize(x, step);
        prop_assert!((x - dequantize(q, step)).abs() <= step + 1e-9);
        if q == 0 {
            prop_assert!(x.abs() < step);
        }
    }

    #[test]
    fn viterbi_inverts_a_clean_encoder(info in prop::collection::vec(any::<bool>(), 0..400)) {
        let llrs: Vec<f64> = ConvK7.encode(&info).iter().map(|&b| if b { -1.0 } else { 1.0 }).collect();
        prop_assert_eq!(ConvK7.decode(&llrs), info);
    }

    #[test]
    fn budgets_respected(
        scores in prop::collection::vec(0.0f64..50.0, 1..10),
        budget in 0usize..5000,
        side in 0usize..300,
        selective in any::<bool>(),
    ) {
        let mut scored: Vec<(u8, f64)> = scores.iter().enumerate().map(|(i, &s)| (i as u8, s)).collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mode = if selective { Mode::Selective } else { Mode::Overall };
        if let Ok(plan) = allocate_budgets(&scored, budget, side, mode, BudgetParams::default()) {
            prop_assert!(plan.symbols_used() + plan.side_info_symbols <= budget);
            for e in &plan.entries {
                prop_assert!(!e.dropped || e.n_symbols == 0);
            }
        }
        let scaled: Vec<f64> = scores.iter().map(|s| s * 7.5).collect();
        prop_assert_eq!(select_mode(&scores, 0.5), select_mode(&scaled, 0.5));
    }

    #[test]
    fn inpainting_leaves_trusted_blocks_alone(
        labels in label_map(),
        flags_seed in any::<u64>(),
        fill in any::<u8>(),
    ) {
        let (cols, rows) = (labels.cols(), labels.rows());
        let mut fm = FeatureMap::zeros(cols, rows);
        for (i, b) in fm.blocks.iter_mut().enumerate() {
            for (k, c) in b.iter_mut().enumerate() {
                *c = ((i * 31 + k * 7) % 97) as f64 - 48.0;
            }
        }
        let mask = ErrorMask {
            cols,
            rows,
            flags: (0..cols * rows).map(|i| (flags_seed >> (i % 64)) & 1 == 1).collect(),
        };
        let ctx = CorrectionContext { fills: Some(vec![fill; labels.num_labels()]), labels };
        let out = inpaint_feature_map(&fm, &mask, &ctx);
        prop_assert_eq!(&out, &inpaint_feature_map(&fm, &mask, &ctx));
        for i in 0..cols * rows {
            if !mask.flags[i] {
                prop_assert_eq!(out.blocks[i], fm.blocks[i]);
            }
        }
    }
}
