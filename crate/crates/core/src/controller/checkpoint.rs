use serde::{Deserialize, Serialize};

use super::{AdamState, Controller, ControllerError, ParamLayout};

pub const CHECKPOINT_FORMAT: &str = "fuzzy-dsr-controller";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    library_size: usize,
    hidden_size: usize,
    params: Vec<f64>,
    optimizer: AdamState,
}

impl Controller {
    /// JSON with a shape header. Floats are written with round-trip
    /// precision, so [`Controller::from_checkpoint_json`] restores the exact
    /// bits.
    pub fn to_checkpoint_json(&self) -> String {
        let ck = Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: VERSION,
            library_size: self.layout.library_size,
            hidden_size: self.layout.hidden_size,
            params: self.params.clone(),
            optimizer: self.adam.clone(),
        };
        serde_json::to_string(&ck).expect("checkpoint serializes")
    }

    pub fn from_checkpoint_json(text: &str) -> Result<Controller, ControllerError> {
        let ck: Checkpoint = serde_json::from_str(text)?;
        let bad = |m: String| Err(ControllerError::Checkpoint(m));
        if ck.format != CHECKPOINT_FORMAT {
            return bad(format!("unknown format {:?}", ck.format));
        }
        if ck.version != VERSION {
            return bad(format!("unsupported version {}", ck.version));
        }
        if ck.library_size == 0 || ck.hidden_size == 0 {
            return bad("zero-sized shape".into());
        }
        let layout = ParamLayout::new(ck.library_size, ck.hidden_size);
        let opt = &ck.optimizer;
        if ck.params.len() != layout.total || opt.m.len() != layout.total || opt.v.len() != layout.total {
            return bad(format!(
                "expected {} parameters for shape ({}, {})",
                layout.total, ck.library_size, ck.hidden_size
            ));
        }
        if ck.params.iter().chain(&opt.m).any(|x| !x.is_finite()) || opt.v.iter().any(|x| !(x.is_finite() && *x >= 0.0))
        {
            return bad("non-finite or negative entries".into());
        }
        Ok(Controller::from_parts(layout, ck.params, ck.optimizer))
    }
}
