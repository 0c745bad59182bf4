//! Bounded loss matrices over binary outcomes and finitely many actions.

use crate::rational::Rat;
use std::fmt;

/// Loss matrix with entries in [0, 1]. Row `y` holds the loss of action `y`
/// against outcome 0 and outcome 1, in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LossMatrix {
    actions: Vec<[Rat; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LossError {
    TooFewActions(usize),
    OutOfRange { action: usize, outcome: bool, value: Rat },
    NotTwoActions(usize),
    ZeroThresholdDenominator,
}

impl fmt::Display for LossError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossError::TooFewActions(n) => write!(f, "need at least 2 actions, got {}", n),
            LossError::OutOfRange { action, outcome, value } => {
                write!(f, "loss({}, action {}) = {} outside [0, 1]", u8::from(*outcome), action, value)
            }
            LossError::NotTwoActions(n) => {
                write!(f, "threshold form needs exactly 2 actions, got {}", n)
            }
            LossError::ZeroThresholdDenominator => {
                write!(f, "threshold undefined: action losses do not cross")
            }
        }
    }
}

impl std::error::Error for LossError {}

impl LossMatrix {
    pub fn new(actions: Vec<[Rat; 2]>) -> Result<Self, LossError> {
        if actions.len() < 2 {
            return Err(LossError::TooFewActions(actions.len()));
        }
        for (y, row) in actions.iter().enumerate() {
            for (x, value) in row.iter().enumerate() {
                if value < &Rat::zero() || value > &Rat::one() {
                    return Err(LossError::OutOfRange {
                        action: y,
                        outcome: x == 1,
                        value: value.clone(),
                    });
                }
            }
        }
        Ok(LossMatrix { actions })
    }

    /// 0-1 loss: action y against outcome x costs [x != y].
    pub fn error_loss() -> Self {
        LossMatrix {
            actions: vec![[Rat::zero(), Rat::one()], [Rat::one(), Rat::zero()]],
        }
    }

    /// Three actions: match-the-outcome (costs x), a flat hedge (costs `flat`
    /// regardless), and a discounted bet on outcome 1 (costs (2/3)(1-x)).
    pub fn three_action(flat: Rat) -> Result<Self, LossError> {
        LossMatrix::new(vec![
            [Rat::zero(), Rat::one()],
            [flat.clone(), flat],
            [Rat::new(2, 3), Rat::zero()],
        ])
    }

    /// Same matrix with `extra` useless actions of constant loss 1 appended.
    pub fn with_padding(&self, extra: usize) -> Self {
        let mut actions = self.actions.clone();
        actions.extend(std::iter::repeat_with(|| [Rat::one(), Rat::one()]).take(extra));
        LossMatrix { actions }
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn loss(&self, outcome: bool, action: usize) -> &Rat {
        &self.actions[action][usize::from(outcome)]
    }

    /// Per-outcome sets of loss-minimizing actions.
    fn argmin_actions(&self, outcome: bool) -> Vec<usize> {
        let best = (0..self.num_actions())
            .map(|y| self.loss(outcome, y))
            .min()
            .expect("at least two actions");
        (0..self.num_actions()).filter(|&y| self.loss(outcome, y) == best).collect()
    }

    /// True iff no single action is simultaneously optimal for both outcomes,
    /// so that prediction quality actually matters.
    pub fn is_non_degenerate(&self) -> bool {
        let zero_best = self.argmin_actions(false);
        self.argmin_actions(true).iter().all(|y| !zero_best.contains(y))
    }

    /// Rescale every entry to a*loss + b. The result must stay within [0, 1].
    pub fn affine(&self, a: &Rat, b: &Rat) -> Result<Self, LossError> {
        LossMatrix::new(
            self.actions
                .iter()
                .map(|row| [a * &row[0] + b, a * &row[1] + b])
                .collect(),
        )
    }

    /// For a two-action matrix, the posterior-on-1 threshold above which
    /// action 1 has the lower expected loss:
    /// (l(0,1) - l(0,0)) / (l(0,1) - l(0,0) + l(1,0) - l(1,1)).
    pub fn gamma_threshold(&self) -> Result<Rat, LossError> {
        if self.num_actions() != 2 {
            return Err(LossError::NotTwoActions(self.num_actions()));
        }
        let rise0 = self.loss(false, 1) - self.loss(false, 0);
        let rise1 = self.loss(true, 0) - self.loss(true, 1);
        let denom = &rise0 + &rise1;
        if denom.is_zero() {
            return Err(LossError::ZeroThresholdDenominator);
        }
        Ok(rise0 / denom)
    }
}
