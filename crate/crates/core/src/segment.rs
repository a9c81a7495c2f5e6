//! Block segmentation and meshing.
//!
//! The traversal-ordered stream is cut into 16-pixel blocks. A block whose
//! count of large deltas exceeds the difficulty threshold searches the next
//! unconsumed blocks for a partner; interlacing the two pixel runs is kept
//! when it saves at least two token bytes, one of which pays for the mesh
//! flag. Partners are consumed and never revisited.

use crate::config::{PipelineConfig, BLOCK_SIZE, SEARCH_WINDOW};
use crate::delta::{is_short, modular_delta, wrap_delta, FULL_MAX, FULL_MIN};
use crate::error::{Error, Result};

/// Minimum token-byte saving for a mesh: the flag byte plus one.
pub const MIN_MESH_SAVING: usize = 2;

/// Large-difference indicator: 1 when `delta` needs a two-byte token.
pub fn large_difference(delta: i32) -> Result<u32> {
    if !(FULL_MIN..=FULL_MAX).contains(&delta) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    Ok(u32::from(delta <= -64 || delta >= 65))
}

/// Count of large differences over a run, plus one for the initial pixel.
pub fn cld(pixels: &[u16]) -> Result<u32> {
    if pixels.is_empty() {
        return Err(Error::EmptyInput);
    }
    pixels.windows(2).try_fold(1, |acc, w| {
        Ok(acc + large_difference(modular_delta(w[1], w[0])?)?)
    })
}

/// `counts[i]` is the number of large deltas among stream positions `[0, i)`.
/// Position 0 is compared against an implicit predecessor of 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixArray {
    counts: Vec<u32>,
}

impl PrefixArray {
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Number of stream positions covered.
    pub fn len(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Large deltas among positions `[start, end)`.
    pub fn range_count(&self, start: usize, end: usize) -> u32 {
        self.counts[end] - self.counts[start]
    }

    pub fn block_count(&self) -> usize {
        block_count(self.len())
    }
}

pub fn build_prefix(stream: &[u16]) -> Result<PrefixArray> {
    if stream.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts = Vec::with_capacity(stream.len() + 1);
    counts.push(0);
    let mut prev = 0u16;
    let mut total = 0u32;
    for &s in stream {
        total += large_difference(modular_delta(s, prev)?)?;
        counts.push(total);
        prev = s;
    }
    Ok(PrefixArray { counts })
}

/// Large deltas inside block `block` of `block_size` pixels.
pub fn block_large_count(prefix: &PrefixArray, block: usize, block_size: usize) -> Result<u32> {
    let n = prefix.len();
    let blocks = n.div_ceil(block_size);
    if block >= blocks {
        return Err(Error::IndexOutOfRange {
            index: block,
            len: blocks,
        });
    }
    let start = block * block_size;
    Ok(prefix.range_count(start, (start + block_size).min(n)))
}

pub fn is_difficult(large_count: u32, block_size: usize) -> bool {
    large_count as usize > block_size / 2
}

/// Alternate the pixels of two full blocks: `a0 b0 a1 b1 ...`.
pub fn mesh_interlace(a: &[u16], b: &[u16]) -> Result<Vec<u16>> {
    if a.len() != BLOCK_SIZE || b.len() != BLOCK_SIZE {
        return Err(Error::PartialBlock);
    }
    Ok(a.iter().zip(b).flat_map(|(&x, &y)| [x, y]).collect())
}

/// Split an interlaced run back into its two blocks.
pub fn mesh_deinterlace(meshed: &[u16]) -> Result<(Vec<u16>, Vec<u16>)> {
    if meshed.len() != 2 * BLOCK_SIZE {
        return Err(Error::PartialBlock);
    }
    Ok((
        meshed.iter().step_by(2).copied().collect(),
        meshed.iter().skip(1).step_by(2).copied().collect(),
    ))
}

/// Token bytes needed for `pixels` when the pixel before them is `prev_context`.
pub fn simulate_cost(pixels: &[u16], prev_context: u16) -> usize {
    cost_of(pixels.iter().copied(), prev_context)
}

fn cost_of(pixels: impl Iterator<Item = u16>, mut prev: u16) -> usize {
    pixels
        .map(|p| {
            let d = wrap_delta(p, prev);
            prev = p;
            if is_short(d) {
                1
            } else {
                2
            }
        })
        .sum()
}

pub fn block_count(stream_len: usize) -> usize {
    stream_len.div_ceil(BLOCK_SIZE)
}

/// Pixels in `block`; only the final block can be short.
pub fn block_len(block: usize, stream_len: usize) -> usize {
    (stream_len - block * BLOCK_SIZE).min(BLOCK_SIZE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanItem {
    Plain(usize),
    /// `partner` is the `offset_code + 1`-th block after `block` that had not
    /// been emitted or consumed when this item was planned.
    Mesh {
        block: usize,
        partner: usize,
        offset_code: u8,
    },
}

impl PlanItem {
    pub fn block(&self) -> usize {
        match *self {
            PlanItem::Plain(b) | PlanItem::Mesh { block: b, .. } => b,
        }
    }
}

/// The order in which blocks, alone or meshed, are serialized.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EmissionPlan {
    items: Vec<PlanItem>,
    block_count: usize,
}

impl EmissionPlan {
    pub fn all_plain(stream_len: usize) -> Self {
        let block_count = block_count(stream_len);
        Self {
            items: (0..block_count).map(PlanItem::Plain).collect(),
            block_count,
        }
    }

    /// Wrap items as-is; [`EmissionPlan::validate`] checks them.
    pub fn from_items(items: Vec<PlanItem>, block_count: usize) -> Self {
        Self { items, block_count }
    }

    pub fn items(&self) -> &[PlanItem] {
        &self.items
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn mesh_count(&self) -> usize {
        self.items
            .iter()
            .filter(|i| matches!(i, PlanItem::Mesh { .. }))
            .count()
    }

    /// Stream positions in emission order, excluding flag bytes.
    pub fn emission_order(&self, stream_len: usize) -> Vec<usize> {
        let mut order = Vec::with_capacity(stream_len);
        for item in &self.items {
            match *item {
                PlanItem::Plain(b) => {
                    let start = b * BLOCK_SIZE;
                    order.extend(start..start + block_len(b, stream_len));
                }
                PlanItem::Mesh { block, partner, .. } => {
                    for i in 0..BLOCK_SIZE {
                        order.push(block * BLOCK_SIZE + i);
                        order.push(partner * BLOCK_SIZE + i);
                    }
                }
            }
        }
        order
    }

    /// Check that a decoder walking blocks in order would reproduce this plan
    /// for a stream of `stream_len` pixels.
    pub fn validate(&self, stream_len: usize) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidPlan(msg));
        if self.block_count != block_count(stream_len) {
            return invalid(format!(
                "{} blocks declared for a {stream_len}-pixel stream",
                self.block_count
            ));
        }
        let mut covered = vec![false; self.block_count];
        let mut next_uncovered = 0;
        for item in &self.items {
            while next_uncovered < self.block_count && covered[next_uncovered] {
                next_uncovered += 1;
            }
            let block = item.block();
            if block != next_uncovered {
                return invalid(format!(
                    "item for block {block} where block {next_uncovered} comes next"
                ));
            }
            covered[block] = true;
            if let PlanItem::Mesh {
                partner,
                offset_code,
                ..
            } = *item
            {
                if offset_code as usize >= SEARCH_WINDOW {
                    return invalid(format!("offset code {offset_code} exceeds 6 bits"));
                }
                let resolved = (block + 1..self.block_count)
                    .filter(|&p| !covered[p])
                    .nth(offset_code as usize);
                if resolved != Some(partner) {
                    return invalid(format!(
                        "offset code {offset_code} from block {block} does not reach block {partner}"
                    ));
                }
                if block_len(block, stream_len) != BLOCK_SIZE
                    || block_len(partner, stream_len) != BLOCK_SIZE
                {
                    return invalid(format!("mesh {block}+{partner} uses a partial block"));
                }
                covered[partner] = true;
            }
        }
        if let Some(missing) = covered.iter().position(|&c| !c) {
            return invalid(format!("block {missing} is never emitted"));
        }
        Ok(())
    }
}

/// Choose which difficult blocks to mesh and with whom.
///
/// Candidates are the full blocks among the next `search_window` unconsumed
/// blocks. The saving of a candidate is
/// `cost(block) + cost(partner) - cost(interlaced)`, where the block and the
/// interlaced run are costed after the last emitted pixel and the partner
/// after its own predecessor in the stream. The best saving wins, ties go to
/// the nearest candidate, and nothing below [`MIN_MESH_SAVING`] is accepted.
pub fn plan_segmentation(stream: &[u16], config: &PipelineConfig) -> Result<EmissionPlan> {
    if stream.is_empty() {
        return Err(Error::EmptyInput);
    }
    config.validate()?;
    // without short deltas every pixel costs two bytes and no mesh can pay off
    if !config.segmentation_enabled || !config.qoi_short_deltas_enabled {
        return Ok(EmissionPlan::all_plain(stream.len()));
    }

    let n = stream.len();
    let prefix = build_prefix(stream)?;
    let blocks = block_count(n);
    let full_blocks = n / BLOCK_SIZE;
    let block_px = |b: usize| &stream[b * BLOCK_SIZE..b * BLOCK_SIZE + block_len(b, n)];

    let mut consumed = vec![false; blocks];
    let mut items = Vec::with_capacity(blocks);
    let mut last_emitted = 0u16;

    for block in 0..blocks {
        if consumed[block] {
            continue;
        }
        consumed[block] = true;
        let pixels = block_px(block);
        let difficult = block < full_blocks
            && prefix.range_count(block * BLOCK_SIZE, (block + 1) * BLOCK_SIZE) as usize
                > config.difficulty_threshold;

        let mut best: Option<(usize, usize, u8)> = None; // (saving, partner, offset code)
        if difficult {
            let alone = simulate_cost(pixels, last_emitted);
            let candidates = (block + 1..blocks)
                .filter(|&p| !consumed[p])
                .take(config.search_window)
                .enumerate();
            for (ordinal, partner) in candidates {
                if partner >= full_blocks {
                    continue;
                }
                let other = block_px(partner);
                let partner_alone = simulate_cost(other, stream[partner * BLOCK_SIZE - 1]);
                let meshed = cost_of(
                    pixels.iter().zip(other).flat_map(|(&a, &b)| [a, b]),
                    last_emitted,
                );
                let saving = (alone + partner_alone).saturating_sub(meshed);
                if saving >= MIN_MESH_SAVING && best.is_none_or(|(s, _, _)| saving > s) {
                    best = Some((saving, partner, ordinal as u8));
                }
            }
        }

        match best {
            Some((_, partner, offset_code)) => {
                consumed[partner] = true;
                items.push(PlanItem::Mesh {
                    block,
                    partner,
                    offset_code,
                });
                last_emitted = stream[partner * BLOCK_SIZE + BLOCK_SIZE - 1];
            }
            None => {
                items.push(PlanItem::Plain(block));
                last_emitted = *pixels.last().expect("blocks are non-empty");
            }
        }
    }

    Ok(EmissionPlan {
        items,
        block_count: blocks,
    })
}
