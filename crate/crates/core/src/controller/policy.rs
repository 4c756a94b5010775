use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{Controller, ControllerError, ParamLayout};
use crate::expr::{ConstraintConfig, Library, SlotState, TokenId, Traversal};

/// One sampled traversal with per-step statistics in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub traversal: Traversal,
    pub step_log_probs: Vec<f64>,
    pub step_entropies: Vec<f64>,
    pub total_log_prob: f64,
    pub total_entropy: f64,
}

/// Diagnostics from one [`Controller::gradient_step`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub objective: f64,
    pub grad_norm: f64,
    /// False when the gradient was exactly zero and the update was skipped.
    pub updated: bool,
}

/// Tracks the parent and left sibling of the next open slot.
struct Frame {
    token: TokenId,
    arity: usize,
    filled: usize,
    last_child: Option<TokenId>,
}

struct Context {
    stack: Vec<Frame>,
    empty: usize,
}

impl Context {
    fn new(empty: usize) -> Self {
        Context { stack: Vec::new(), empty }
    }

    fn inputs(&self) -> (usize, usize) {
        match self.stack.last() {
            None => (self.empty, self.empty),
            Some(f) => (f.token, f.last_child.unwrap_or(self.empty)),
        }
    }

    fn push(&mut self, token: TokenId, arity: usize) {
        if let Some(top) = self.stack.last_mut() {
            top.filled += 1;
            top.last_child = Some(token);
        }
        if arity > 0 {
            self.stack.push(Frame { token, arity, filled: 0, last_child: None });
        }
        while self.stack.last().is_some_and(|f| f.filled == f.arity) {
            self.stack.pop();
        }
    }
}

/// Everything the backward pass needs from one step.
struct StepRecord {
    parent: usize,
    sibling: usize,
    h: Vec<f64>,
    mask: Vec<bool>,
    probs: Vec<f64>,
    log_probs: Vec<f64>,
    entropy: f64,
    token: TokenId,
}

struct Forward {
    records: Vec<StepRecord>,
    traversal: Traversal,
}

impl Controller {
    fn check_library(&self, lib: &Library) -> Result<(), ControllerError> {
        if lib.len() != self.layout.library_size {
            return Err(ControllerError::LibraryMismatch { expected: self.layout.library_size, got: lib.len() });
        }
        Ok(())
    }

    /// Recurrent cell: returns the new hidden state.
    fn cell(&self, parent: usize, sibling: usize, h_prev: &[f64]) -> Vec<f64> {
        let ParamLayout { hidden_size: h, parent_emb, sibling_emb, w_hh, b_h, .. } = self.layout;
        let p = &self.params;
        let ep = &p[parent_emb + parent * h..][..h];
        let es = &p[sibling_emb + sibling * h..][..h];
        (0..h)
            .map(|i| {
                let row = &p[w_hh + i * h..][..h];
                let rec: f64 = row.iter().zip(h_prev).map(|(w, x)| w * x).sum();
                (ep[i] + es[i] + p[b_h + i] + rec).tanh()
            })
            .collect()
    }

    /// Masked softmax over the output head. Returns (probs, log_probs,
    /// entropy); masked entries have probability 0 and log-prob -inf.
    fn head(&self, h_vec: &[f64], mask: &[bool]) -> (Vec<f64>, Vec<f64>, f64) {
        let ParamLayout { library_size: l, hidden_size: h, w_out, b_out, .. } = self.layout;
        let p = &self.params;
        let mut logits = vec![f64::NEG_INFINITY; l];
        let mut max = f64::NEG_INFINITY;
        for j in (0..l).filter(|&j| mask[j]) {
            let row = &p[w_out + j * h..][..h];
            let z = p[b_out + j] + row.iter().zip(h_vec).map(|(w, x)| w * x).sum::<f64>();
            logits[j] = z;
            max = max.max(z);
        }
        let sum: f64 = logits.iter().filter(|z| z.is_finite()).map(|z| (z - max).exp()).sum();
        let lse = max + sum.ln();
        let mut probs = vec![0.0; l];
        let mut log_probs = vec![f64::NEG_INFINITY; l];
        let mut entropy = 0.0;
        for j in (0..l).filter(|&j| mask[j]) {
            log_probs[j] = logits[j] - lse;
            probs[j] = log_probs[j].exp();
            entropy -= probs[j] * log_probs[j];
        }
        (probs, log_probs, entropy.max(0.0))
    }

    /// Runs the policy, picking each token with `choose`.
    fn forward(
        &self,
        lib: &Library,
        cfg: &ConstraintConfig,
        mut choose: impl FnMut(usize, &[f64], &[bool]) -> Result<TokenId, ControllerError>,
    ) -> Result<Forward, ControllerError> {
        self.check_library(lib)?;
        let mut ctx = Context::new(self.layout.empty());
        let mut state = SlotState::start();
        let mut h = vec![0.0; self.layout.hidden_size];
        let mut records = Vec::new();
        let mut tokens = Vec::new();
        while !state.is_complete() {
            let step = records.len();
            let mut mask = vec![false; lib.len()];
            state.fill_mask(lib, cfg, &mut mask);
            if !mask.iter().any(|&m| m) {
                return Err(ControllerError::EmptyMask { step });
            }
            let (parent, sibling) = ctx.inputs();
            h = self.cell(parent, sibling, &h);
            let (probs, log_probs, entropy) = self.head(&h, &mask);
            let token = choose(step, &probs, &mask)?;
            if !mask.get(token).copied().unwrap_or(false) {
                return Err(ControllerError::Unreachable { step, token });
            }
            let kind = lib.kind(token)?;
            state.advance(kind);
            ctx.push(token, kind.arity());
            tokens.push(token);
            records.push(StepRecord { parent, sibling, h: h.clone(), mask, probs, log_probs, entropy, token });
        }
        Ok(Forward { records, traversal: Traversal::new(tokens) })
    }

    pub fn sample<R: RngCore + ?Sized>(
        &self,
        lib: &Library,
        cfg: &ConstraintConfig,
        rng: &mut R,
    ) -> Result<Trajectory, ControllerError> {
        let fwd = self.forward(lib, cfg, |_, probs, mask| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut last = 0;
            for (j, &p) in probs.iter().enumerate() {
                if !mask[j] {
                    continue;
                }
                last = j;
                acc += p;
                if u < acc {
                    return Ok(j);
                }
            }
            // Rounding left u above the final cumulative sum.
            Ok(last)
        })?;
        Ok(trajectory(fwd))
    }

    /// Replays `t` under the current parameters.
    pub fn evaluate_traversal(
        &self,
        t: &Traversal,
        lib: &Library,
        cfg: &ConstraintConfig,
    ) -> Result<Trajectory, ControllerError> {
        Ok(trajectory(self.replay(t, lib, cfg)?))
    }

    fn replay(&self, t: &Traversal, lib: &Library, cfg: &ConstraintConfig) -> Result<Forward, ControllerError> {
        let tokens = t.tokens();
        let fwd = self.forward(lib, cfg, |step, _, _| {
            tokens
                .get(step)
                .copied()
                .ok_or(ControllerError::Expr(crate::expr::ExprError::IncompleteTraversal { open: 1 }))
        })?;
        if fwd.traversal.len() != tokens.len() {
            return Err(
                crate::expr::ExprError::DanglingTokens { at: fwd.traversal.len() - 1, len: tokens.len() }.into()
            );
        }
        Ok(fwd)
    }

    pub fn log_prob_and_grad(
        &self,
        t: &Traversal,
        lib: &Library,
        cfg: &ConstraintConfig,
    ) -> Result<(f64, Vec<f64>), ControllerError> {
        let fwd = self.replay(t, lib, cfg)?;
        let mut grad = vec![0.0; self.layout.total];
        self.backward(&fwd, 1.0, 0.0, &mut grad);
        Ok((fwd.records.iter().map(|r| r.log_probs[r.token]).sum(), grad))
    }

    /// Summed step entropy of `t` and its gradient.
    pub fn entropy_and_grad(
        &self,
        t: &Traversal,
        lib: &Library,
        cfg: &ConstraintConfig,
    ) -> Result<(f64, Vec<f64>), ControllerError> {
        let fwd = self.replay(t, lib, cfg)?;
        let mut grad = vec![0.0; self.layout.total];
        self.backward(&fwd, 0.0, 1.0, &mut grad);
        Ok((fwd.records.iter().map(|r| r.entropy).sum(), grad))
    }

    /// Adds the gradient of `w_logp * sum log p + w_ent * sum H` to `grad`.
    fn backward(&self, fwd: &Forward, w_logp: f64, w_ent: f64, grad: &mut [f64]) {
        let ParamLayout { library_size: l, hidden_size: h, parent_emb, sibling_emb, w_hh, b_h, w_out, b_out, .. } =
            self.layout;
        let p = &self.params;
        let zeros = vec![0.0; h];
        let mut dh_next = vec![0.0; h];
        let mut dz = vec![0.0; l];
        let mut dh = vec![0.0; h];
        let mut da = vec![0.0; h];
        for (t, rec) in fwd.records.iter().enumerate().rev() {
            let h_prev = if t == 0 { &zeros } else { &fwd.records[t - 1].h };
            for (j, dzj) in dz.iter_mut().enumerate() {
                *dzj = if rec.mask[j] {
                    let pj = rec.probs[j];
                    let onehot = if j == rec.token { 1.0 } else { 0.0 };
                    let ent = if pj > 0.0 { -pj * (rec.log_probs[j] + rec.entropy) } else { 0.0 };
                    w_logp * (onehot - pj) + w_ent * ent
                } else {
                    0.0
                };
            }
            dh.copy_from_slice(&dh_next);
            for j in (0..l).filter(|&j| dz[j] != 0.0) {
                grad[b_out + j] += dz[j];
                let row = &p[w_out + j * h..][..h];
                let grow = &mut grad[w_out + j * h..][..h];
                for i in 0..h {
                    grow[i] += dz[j] * rec.h[i];
                    dh[i] += row[i] * dz[j];
                }
            }
            for i in 0..h {
                da[i] = dh[i] * (1.0 - rec.h[i] * rec.h[i]);
                grad[parent_emb + rec.parent * h + i] += da[i];
                grad[sibling_emb + rec.sibling * h + i] += da[i];
                grad[b_h + i] += da[i];
            }
            dh_next.fill(0.0);
            for i in 0..h {
                if da[i] == 0.0 {
                    continue;
                }
                let row = &p[w_hh + i * h..][..h];
                let grow = &mut grad[w_hh + i * h..][..h];
                for k in 0..h {
                    grow[k] += da[i] * h_prev[k];
                    dh_next[k] += row[k] * da[i];
                }
            }
        }
    }

    /// One Adam ascent step on
    /// `mean_i(advantages[i] * log p(t_i) + entropy_weight * H(t_i))`.
    /// An exactly-zero gradient leaves parameters and optimizer state
    /// untouched.
    pub fn gradient_step(
        &mut self,
        lib: &Library,
        cfg: &ConstraintConfig,
        trajectories: &[Trajectory],
        advantages: &[f64],
        learning_rate: f64,
        entropy_weight: f64,
    ) -> Result<StepStats, ControllerError> {
        if trajectories.len() != advantages.len() {
            return Err(ControllerError::LengthMismatch {
                trajectories: trajectories.len(),
                advantages: advantages.len(),
            });
        }
        if let Some((index, &value)) = advantages.iter().enumerate().find(|(_, a)| !(**a >= 0.0 && a.is_finite())) {
            return Err(ControllerError::BadAdvantage { index, value });
        }
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(ControllerError::InvalidHyperparameter(format!("learning rate {learning_rate}")));
        }
        if !(entropy_weight >= 0.0 && entropy_weight.is_finite()) {
            return Err(ControllerError::InvalidHyperparameter(format!("entropy weight {entropy_weight}")));
        }
        if trajectories.is_empty() {
            return Ok(StepStats { objective: 0.0, grad_norm: 0.0, updated: false });
        }
        let scale = 1.0 / trajectories.len() as f64;
        let mut grad = vec![0.0; self.layout.total];
        let mut objective = 0.0;
        for (traj, &adv) in trajectories.iter().zip(advantages) {
            if adv == 0.0 && entropy_weight == 0.0 {
                continue;
            }
            let fwd = self.replay(&traj.traversal, lib, cfg)?;
            let logp: f64 = fwd.records.iter().map(|r| r.log_probs[r.token]).sum();
            let ent: f64 = fwd.records.iter().map(|r| r.entropy).sum();
            objective += scale * (adv * logp + entropy_weight * ent);
            self.backward(&fwd, scale * adv, scale * entropy_weight, &mut grad);
        }
        let non_finite = grad.iter().filter(|g| !g.is_finite()).count();
        if non_finite > 0 {
            return Err(ControllerError::NonFiniteGradient { non_finite, total: grad.len() });
        }
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm == 0.0 {
            return Ok(StepStats { objective, grad_norm, updated: false });
        }
        self.adam.ascend(&mut self.params, &grad, learning_rate);
        Ok(StepStats { objective, grad_norm, updated: true })
    }
}

fn trajectory(fwd: Forward) -> Trajectory {
    let step_log_probs: Vec<f64> = fwd.records.iter().map(|r| r.log_probs[r.token]).collect();
    let step_entropies: Vec<f64> = fwd.records.iter().map(|r| r.entropy).collect();
    Trajectory {
        total_log_prob: step_log_probs.iter().sum(),
        total_entropy: step_entropies.iter().sum(),
        traversal: fwd.traversal,
        step_log_probs,
        step_entropies,
    }
}
