//! Dependency-breaking variables as exact joint tables.
//!
//! [`MultiTable`] realizes the k-player construction, where each free
//! coordinate reveals the collapsed questions of all but one uniformly chosen
//! player. [`TwoPlayerTable`] realizes the anchor-weighted two-player
//! variant, whose marginal on every coordinate is again `μ`.

mod multi;
pub mod pmf;
mod rounding;
mod twoplayer;

use crate::game::AnchorSets;

pub use multi::{build_table_multi, LocalSamplingReport, MultiTable};
pub use pmf::{check_trivial_lemma, tv, Joint, Kernel, Pmf, TrivialLemmaCheck};
pub use rounding::{rounding_strategy_multi, RoundingCheck, RoundingStrategy};
pub use twoplayer::{
    branch_sums, build_table_twoplayer, AnswerEntry, AnswerModel, AutoTable, BranchSum, DeterministicAnswers,
    MarginalCheck, Side, TwoPlayerTable,
};

/// Code of the collapsed anchor symbol in table columns.
pub const BOT: u32 = u32::MAX;
/// Code of the hidden slot of `M_i` (the excluded player).
pub const HIDDEN: u32 = u32::MAX - 1;

/// One player's collapsed question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Collapsed {
    Plain(usize),
    Anchor,
}

/// Replaces anchor questions by `⊥`, coordinatewise.
pub fn collapse(x: &[usize], anchors: &AnchorSets) -> Vec<Collapsed> {
    x.iter()
        .enumerate()
        .map(|(t, &q)| {
            if anchors.contains(t, q) {
                Collapsed::Anchor
            } else {
                Collapsed::Plain(q)
            }
        })
        .collect()
}

/// One checked inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundCheck {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// A reported quantity with the scaling argument of its unstated bound.
///
/// `value` is `None` when a conditional it needs has zero mass.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportedQuantity {
    pub name: String,
    pub value: Option<f64>,
    pub scale: f64,
}
