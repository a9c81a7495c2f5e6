//! Encoder/decoder agreement on arbitrary (not just planner-produced) plans.

use compact_core::delta::{decode_tokens, encode_tokens};
use compact_core::segment::{block_count, block_len};
use compact_core::{EmissionPlan, PlanItem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Walk blocks in order and mesh each full block with a random unconsumed
/// full partner inside the 64-block window with probability `p_mesh`.
fn random_plan(rng: &mut ChaCha8Rng, n: usize, p_mesh: f64) -> EmissionPlan {
    let blocks = block_count(n);
    let mut consumed = vec![false; blocks];
    let mut items = Vec::new();
    for b in 0..blocks {
        if consumed[b] {
            continue;
        }
        consumed[b] = true;
        let window: Vec<(usize, usize)> = (b + 1..blocks)
            .filter(|&p| !consumed[p])
            .take(64)
            .enumerate()
            .filter(|&(_, p)| block_len(p, n) == 16)
            .collect();
        if block_len(b, n) == 16 && !window.is_empty() && rng.random_bool(p_mesh) {
            let (ordinal, partner) = window[rng.random_range(0..window.len())];
            consumed[partner] = true;
            items.push(PlanItem::Mesh {
                block: b,
                partner,
                offset_code: ordinal as u8,
            });
        } else {
            items.push(PlanItem::Plain(b));
        }
    }
    EmissionPlan::from_items(items, blocks)
}

#[test]
fn random_streams_and_plans_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..1000 {
        let n = rng.random_range(1..3000usize);
        let smooth = case % 2 == 0;
        let mut v = rng.random_range(0..4096i32);
        let stream: Vec<u16> = (0..n)
            .map(|_| {
                if smooth {
                    v = (v + rng.random_range(-80..=80)).rem_euclid(4096);
                    v as u16
                } else {
                    rng.random_range(0..4096)
                }
            })
            .collect();
        let plan = random_plan(&mut rng, n, [0.0, 0.3, 0.9][case % 3]);
        plan.validate(n).unwrap();
        for qoi in [true, false] {
            let bytes = encode_tokens(&plan, &stream, qoi).unwrap();
            if !qoi {
                assert_eq!(bytes.len(), 2 * n + plan.mesh_count());
            }
            assert_eq!(
                decode_tokens(&bytes, n as u32, 1, plan.block_count()).unwrap(),
                stream
            );
        }
    }
}

#[test]
fn reparsed_tokens_never_use_reserved_prefixes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.random_range(1..2000usize);
        let stream: Vec<u16> = (0..n).map(|_| rng.random_range(0..4096)).collect();
        let plan = random_plan(&mut rng, n, 0.5);
        let bytes = encode_tokens(&plan, &stream, true).unwrap();
        let mut pos = 0;
        while pos < bytes.len() {
            let (tok, used) = compact_core::delta::Token::read(&bytes, pos).unwrap();
            assert_eq!(used, tok.encoded_len());
            assert!(bytes[pos] >> 5 != 0b110 && bytes[pos] >> 4 != 0b1111);
            pos += used;
        }
    }
}
