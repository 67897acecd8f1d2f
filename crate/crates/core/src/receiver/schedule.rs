//! Sliding estimation windows and time-domain combining neighbourhoods.

use std::ops::Range;

use crate::error::{Error, Result};

/// Window layout over `K` slots.
///
/// Window `τ` (1-based) covers `{k : (τ-D)·W ≤ k ≤ τ·W - 1}` clipped to
/// `0..K`, so consecutive windows share `(D-1)·W` slots and each contributes
/// at most `W` new ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSchedule {
    pub num_slots: usize,
    /// `W`
    pub window: usize,
    /// `D`
    pub overlap: usize,
    /// `G`
    pub neighborhood: usize,
    pub tau_max: usize,
    windows: Vec<Range<usize>>,
}

impl WindowSchedule {
    pub fn new(num_slots: usize, window: usize, overlap: usize, neighborhood: usize) -> Result<Self> {
        if num_slots == 0 || window == 0 {
            return Err(Error::config("slot count and window length must be positive"));
        }
        if overlap == 0 {
            return Err(Error::config("window depth D must be at least 1"));
        }
        if !neighborhood.is_multiple_of(2) {
            return Err(Error::config(format!("neighbourhood size G = {neighborhood} must be even")));
        }
        if !num_slots.is_multiple_of(window) {
            log::debug!("window length {window} does not divide {num_slots} slots; clipping the last window");
        }
        let tau_max = num_slots.div_ceil(window) + overlap - 1;
        let windows = (1..=tau_max)
            .map(|tau| {
                let start = tau.saturating_sub(overlap) * window;
                let end = (tau * window).min(num_slots);
                start..end
            })
            .collect();
        Ok(Self { num_slots, window, overlap, neighborhood, tau_max, windows })
    }

    /// `K_τ`.
    pub fn window_slots(&self, tau: usize) -> Range<usize> {
        self.windows[tau - 1].clone()
    }

    /// `K_τ⁺ = K_τ \ K_{τ-1}`.
    pub fn new_slots(&self, tau: usize) -> Range<usize> {
        let w = self.window_slots(tau);
        let prev_end = if tau > 1 { self.windows[tau - 2].end } else { 0 };
        prev_end.max(w.start)..w.end
    }

    /// `K_τ ∩ K_{τ-1}`: slots already estimated that remain in the window.
    pub fn carried_slots(&self, tau: usize) -> Range<usize> {
        let w = self.window_slots(tau);
        w.start..self.new_slots(tau).start
    }

    /// `K̆_τ = ∪_{t ≤ τ} K_t`, always a prefix of the frame.
    pub fn cumulative_slots(&self, tau: usize) -> Range<usize> {
        0..self.windows[tau - 1].end
    }

    /// `S_{k,τ} = {s ∈ K̆_τ \ {k} : k - G/2 ≤ s ≤ k + G/2}` in ascending order.
    pub fn neighbors(&self, k: usize, tau: usize) -> Vec<usize> {
        let half = self.neighborhood / 2;
        let end = self.cumulative_slots(tau).end;
        (k.saturating_sub(half)..(k + half + 1).min(end)).filter(|&s| s != k).collect()
    }
}
