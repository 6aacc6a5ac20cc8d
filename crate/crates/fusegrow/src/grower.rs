//! Best-first seed growing.
//!
//! Seeds are scored and pushed onto a max-priority queue. Repeatedly the best
//! seed is drawn and, in each of the four pixel directions, three candidates
//! covering a disparity range of one pixel around the seed's disparity are
//! scored. The best candidate per direction becomes a match — and a new
//! seed — when its score reaches the threshold and both of its pixels are
//! still unmatched. Matching is one-to-one in both images and only a small
//! fraction of the disparity space is ever visited.

use std::collections::BinaryHeap;

use crate::imaging::{extract_window_into, DisparityMap, GrayImage, PriorMap};
use crate::seeding::SeedCorrespondence;
use crate::similarity::SimilarityParams;

/// Queue entry ordered by score; ties pop the lexicographically smallest
/// `(v, u, u')` so growth is fully deterministic.
#[derive(Debug, Clone, Copy, PartialEq)]
struct QueueEntry {
    score: f64,
    seed: SeedCorrespondence,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.seed.key().cmp(&self.seed.key()))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of one growth run: the disparity map plus the matching masks and
/// search-effort counters.
#[derive(Debug, Clone)]
pub struct MatchState {
    /// Output disparities; a left pixel is valid exactly when it is matched.
    pub disparity: DisparityMap,
    right_matched: Vec<bool>,
    /// Similarity evaluations spent on neighborhood candidates (at most 12
    /// per queue pop).
    pub eval_count: u64,
    /// Similarity evaluations spent scoring the initial seeds.
    pub initial_scoring_evals: u64,
    pub queue_pops: u64,
    pub seeds_enqueued: u64,
    pub matches_accepted: u64,
}

impl MatchState {
    fn new(width: usize, height: usize) -> Self {
        Self {
            disparity: DisparityMap::new_invalid(width, height),
            right_matched: vec![false; width * height],
            eval_count: 0,
            initial_scoring_evals: 0,
            queue_pops: 0,
            seeds_enqueued: 0,
            matches_accepted: 0,
        }
    }

    #[inline]
    pub fn left_matched(&self, u: usize, v: usize) -> bool {
        self.disparity.is_valid(u, v)
    }

    #[inline]
    pub fn right_matched(&self, u: usize, v: usize) -> bool {
        self.right_matched[v * self.disparity.width() + u]
    }
}

/// Aggregate counters for the complexity accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthStats {
    pub matched_pixels: u64,
    pub total_pixels: u64,
    /// Matched fraction of all left pixels.
    pub density: f64,
    pub eval_count: u64,
    pub initial_scoring_evals: u64,
    pub queue_pops: u64,
    pub evals_per_match: f64,
}

/// Summarizes the counters of a finished growth run.
pub fn grown_statistics(state: &MatchState) -> GrowthStats {
    let matched = state.disparity.valid_count() as u64;
    let total = (state.disparity.width() * state.disparity.height()) as u64;
    GrowthStats {
        matched_pixels: matched,
        total_pixels: total,
        density: matched as f64 / total as f64,
        eval_count: state.eval_count,
        initial_scoring_evals: state.initial_scoring_evals,
        queue_pops: state.queue_pops,
        evals_per_match: if matched == 0 {
            0.0
        } else {
            state.eval_count as f64 / matched as f64
        },
    }
}

struct Scorer<'a> {
    left: &'a GrayImage,
    right: &'a GrayImage,
    prior: &'a PriorMap,
    params: &'a SimilarityParams,
    margin: i64,
    width: i64,
    height: i64,
    wl: Vec<f64>,
    wr: Vec<f64>,
}

impl<'a> Scorer<'a> {
    /// Scores candidate `(u, u', v)`, or `None` when a pixel is out of
    /// bounds, a window would clip the border, or the disparity is negative.
    #[inline]
    fn score(&mut self, u: i64, u_prime: i64, v: i64) -> Option<f64> {
        if u < u_prime {
            return None; // negative disparity leaves canonical space
        }
        let m = self.margin;
        if u < m || u >= self.width - m || u_prime < m || u_prime >= self.width - m {
            return None;
        }
        if v < m || v >= self.height - m {
            return None;
        }
        let n = self.params.window;
        extract_window_into(self.left, u, v, n, &mut self.wl);
        extract_window_into(self.right, u_prime, v, n, &mut self.wr);
        let d = (u - u_prime) as f64;
        let prior = self.prior.get(u as usize, v as usize).map(f64::from);
        Some(self.params.score(&self.wl, &self.wr, d, prior))
    }
}

/// Grows a dense disparity map from the seeds.
///
/// Initial seeds are scored and enqueued but never written to the output;
/// only grown candidates become matches. The prior map may be everywhere
/// invalid (it is only consulted by the fused statistic). `tau` is the
/// acceptance threshold on the similarity score.
pub fn grow(
    left: &GrayImage,
    right: &GrayImage,
    seeds: &[SeedCorrespondence],
    prior: &PriorMap,
    params: &SimilarityParams,
    tau: f64,
) -> MatchState {
    assert!(
        left.width() == right.width() && left.height() == right.height(),
        "rectified images must have equal size"
    );
    assert!(
        prior.width() == left.width() && prior.height() == left.height(),
        "prior map must match the image size"
    );
    params.validate().expect("invalid similarity parameters");

    let (width, height) = (left.width(), left.height());
    let mut state = MatchState::new(width, height);
    let mut scorer = Scorer {
        left,
        right,
        prior,
        params,
        margin: (params.window / 2) as i64,
        width: width as i64,
        height: height as i64,
        wl: Vec::new(),
        wr: Vec::new(),
    };

    let mut queue: BinaryHeap<QueueEntry> = BinaryHeap::with_capacity(seeds.len());
    for s in seeds {
        if let Some(score) = scorer.score(i64::from(s.u), i64::from(s.u_prime), i64::from(s.v)) {
            state.initial_scoring_evals += 1;
            queue.push(QueueEntry { score, seed: *s });
            state.seeds_enqueued += 1;
        }
    }

    while let Some(entry) = queue.pop() {
        state.queue_pops += 1;
        let s = entry.seed;
        let (u, up, v) = (i64::from(s.u), i64::from(s.u_prime), i64::from(s.v));
        let d = s.disparity();

        // A popped seed expands only while it still represents a live
        // correspondence: either nothing at its pixels has been matched, or
        // the match at its pixels is its own. Seeds superseded by a better
        // match do nothing.
        let li = (v as usize) * width + u as usize;
        let left_ok = state.disparity.validity()[li];
        let right_ok = state.right_matched[(v as usize) * width + up as usize];
        let own = left_ok
            && right_ok
            && state.disparity.get(u as usize, v as usize) == Some(d as f32);
        let fresh = !left_ok && !right_ok;
        if !(own || fresh) {
            continue;
        }

        // Four directions; three candidates each, disparity within one pixel
        // of the seed's.
        let neighborhoods: [[(i64, i64, i64); 3]; 4] = [
            [(u - 1, up - 2, v), (u - 1, up - 1, v), (u - 1, up, v)],
            [(u + 1, up, v), (u + 1, up + 1, v), (u + 1, up + 2, v)],
            [(u, up - 1, v - 1), (u, up, v - 1), (u, up + 1, v - 1)],
            [(u, up - 1, v + 1), (u, up, v + 1), (u, up + 1, v + 1)],
        ];

        for candidates in &neighborhoods {
            let mut best: Option<(f64, (i64, i64, i64))> = None;
            for &(cu, cup, cv) in candidates {
                if let Some(score) = scorer.score(cu, cup, cv) {
                    state.eval_count += 1;
                    // Strictly-greater keeps the earliest candidate on ties.
                    if best.is_none_or(|(bs, _)| score > bs) {
                        best = Some((score, (cu, cup, cv)));
                    }
                }
            }
            let Some((score, (cu, cup, cv))) = best else {
                continue;
            };
            if score < tau {
                continue;
            }
            let (cu_us, cup_us, cv_us) = (cu as usize, cup as usize, cv as usize);
            if state.disparity.is_valid(cu_us, cv_us) || state.right_matched[cv_us * width + cup_us]
            {
                continue;
            }
            state.disparity.set(cu_us, cv_us, (cu - cup) as f32);
            state.right_matched[cv_us * width + cup_us] = true;
            state.matches_accepted += 1;
            queue.push(QueueEntry {
                score,
                seed: SeedCorrespondence::new(cu as u32, cup as u32, cv as u32),
            });
        }
    }

    state
}
