use compact_core::delta::{decode_tokens, encode_tokens};
use compact_core::{plan_segmentation, EmissionPlan, PipelineConfig, PlanItem};

fn plain(stream: &[u16]) -> Vec<u8> {
    encode_tokens(&EmissionPlan::all_plain(stream.len()), stream, true).unwrap()
}

#[test]
fn single_pixel_goldens() {
    assert_eq!(plain(&[0]), [0x3F]);
    assert_eq!(plain(&[65]), [0xE8, 0x40]);
}

#[test]
fn mesh_flag_golden() {
    let plan = EmissionPlan::from_items(
        vec![PlanItem::Mesh {
            block: 0,
            partner: 1,
            offset_code: 0,
        }],
        2,
    );
    let bytes = encode_tokens(&plan, &[7; 32], true).unwrap();
    assert_eq!(bytes[0], 0x80);
}

/// Blocks: 0/126 alternating, flat 1000, flat 63. The planner meshes the
/// first and third block (partner ordinal 2) and leaves the middle plain.
fn mesh_fixture_stream() -> Vec<u16> {
    let mut s: Vec<u16> = (0..16).map(|i| if i % 2 == 0 { 0 } else { 126 }).collect();
    s.extend([1000; 16]);
    s.extend([63; 16]);
    s
}

#[rustfmt::skip]
const MESH_FIXTURE_TOKENS: [u8; 50] = [
    0x81,
    0x3F, 0x7E,
    0x7E, 0x00, 0x00, 0x7E, 0x7E, 0x00, 0x00, 0x7E,
    0x7E, 0x00, 0x00, 0x7E, 0x7E, 0x00, 0x00, 0x7E,
    0x7E, 0x00, 0x00, 0x7E, 0x7E, 0x00, 0x00, 0x7E,
    0x7E, 0x00, 0x00, 0x7E,
    0x7E, 0x00,
    // 1000 after 63: delta 937, 937 + 2047 = 0xBA8
    0xEB, 0xA8,
    0x3F, 0x3F, 0x3F, 0x3F, 0x3F, 0x3F, 0x3F, 0x3F,
    0x3F, 0x3F, 0x3F, 0x3F, 0x3F, 0x3F, 0x3F,
];

#[test]
fn frozen_48_pixel_mesh() {
    let stream = mesh_fixture_stream();
    let plan = plan_segmentation(&stream, &PipelineConfig::canonical()).unwrap();
    assert_eq!(
        plan.items(),
        &[
            PlanItem::Mesh {
                block: 0,
                partner: 2,
                offset_code: 1
            },
            PlanItem::Plain(1)
        ]
    );
    let bytes = encode_tokens(&plan, &stream, true).unwrap();
    assert_eq!(bytes, MESH_FIXTURE_TOKENS);
    assert_eq!(decode_tokens(&bytes, 48, 1, 3).unwrap(), stream);
}
