use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AdamState, ControllerError};

const INIT_SCALE: f64 = 0.1;

/// Offsets of each parameter block inside the flat vector.
///
/// With `L` library tokens, `H` hidden units and `V = L + 1` input symbols
/// (index `L` is EMPTY):
/// `parent_emb` V×H, `sibling_emb` V×H, `w_hh` H×H (row = output unit),
/// `b_h` H, `w_out` L×H, `b_out` L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamLayout {
    pub library_size: usize,
    pub hidden_size: usize,
    pub parent_emb: usize,
    pub sibling_emb: usize,
    pub w_hh: usize,
    pub b_h: usize,
    pub w_out: usize,
    pub b_out: usize,
    pub total: usize,
}

impl ParamLayout {
    pub fn new(library_size: usize, hidden_size: usize) -> Self {
        let (l, h) = (library_size, hidden_size);
        let v = l + 1;
        let parent_emb = 0;
        let sibling_emb = parent_emb + v * h;
        let w_hh = sibling_emb + v * h;
        let b_h = w_hh + h * h;
        let w_out = b_h + h;
        let b_out = w_out + l * h;
        let total = b_out + l;
        ParamLayout { library_size, hidden_size, parent_emb, sibling_emb, w_hh, b_h, w_out, b_out, total }
    }

    /// Input index meaning "no parent" / "no sibling".
    pub fn empty(&self) -> usize {
        self.library_size
    }
}

/// Policy parameters plus optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct Controller {
    pub(super) layout: ParamLayout,
    pub(super) params: Vec<f64>,
    pub(super) adam: AdamState,
}

impl Controller {
    pub fn new(library_size: usize, hidden_size: usize, seed: u64) -> Result<Self, ControllerError> {
        if library_size == 0 || hidden_size == 0 {
            return Err(ControllerError::ZeroSize { library_size, hidden_size });
        }
        let layout = ParamLayout::new(library_size, hidden_size);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = vec![0.0; layout.total];
        for p in &mut params[..layout.w_out] {
            *p = rng.random_range(-INIT_SCALE..=INIT_SCALE);
        }
        Ok(Controller { layout, params, adam: AdamState::new(layout.total) })
    }

    pub(super) fn from_parts(layout: ParamLayout, params: Vec<f64>, adam: AdamState) -> Self {
        Controller { layout, params, adam }
    }

    pub fn layout(&self) -> ParamLayout {
        self.layout
    }

    pub fn library_size(&self) -> usize {
        self.layout.library_size
    }

    pub fn hidden_size(&self) -> usize {
        self.layout.hidden_size
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Direct access for tests and warm starts. Values must stay finite.
    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn optimizer(&self) -> &AdamState {
        &self.adam
    }
}
