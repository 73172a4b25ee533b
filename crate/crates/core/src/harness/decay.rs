use std::io::Write;

use num_traits::One;

use super::report::number;
use crate::anchoring::{classical_decay_bound, DecayBoundParams};
use crate::error::{Error, Result};
use crate::game::{classical_value, is_anchored, Budget, Game};
use crate::repetition::repeated_classical_value;
use crate::scalar::{format_rational, pow, rational_to_f64, Rational};

/// One row of a decay curve.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayRecord {
    pub n: usize,
    pub value: Rational,
    /// Decay bound for anchored games; `None` when the game carries no anchors.
    pub bound: Option<f64>,
    /// `val(G)^n`.
    pub product_lower: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve {
    pub records: Vec<DecayRecord>,
    /// First `n` whose value exceeded the budget.
    pub truncated_at: Option<usize>,
}

/// Exact `val(G^n)` for `n` in `lo..=hi`, stopping at the first budget failure.
///
/// Each row is checked against `val(G)^n ≤ val(G^n) ≤ min(1, previous)` and,
/// for anchored games, against the decay bound wherever it is below 1.
pub fn run_decay(game: &Game, lo: usize, hi: usize, budget: Budget) -> Result<DecayCurve> {
    if lo == 0 || lo > hi {
        return Err(Error::Config(format!("invalid n range {lo}..={hi}")));
    }
    let base = classical_value(game, budget)?.value;
    let alpha = game.anchors().and_then(|a| {
        let (ok, alpha) = is_anchored(game, a);
        ok.then(|| rational_to_f64(&alpha))
    });
    let mut records = Vec::new();
    let mut previous = Rational::one();
    let mut truncated_at = None;
    for n in lo..=hi {
        let value = match repeated_classical_value(game, n, budget) {
            Ok(sol) => sol.value,
            Err(Error::BudgetExceeded { .. } | Error::SizeLimit { .. }) => {
                truncated_at = Some(n);
                break;
            }
            Err(e) => return Err(e),
        };
        let product_lower = pow(&base, n);
        if value < product_lower || value > previous {
            return Err(Error::CheckFailed(format!(
                "sandwich violated at n={n}: {} <= {} <= {} fails",
                format_rational(&product_lower),
                format_rational(&value),
                format_rational(&previous)
            )));
        }
        let bound = match alpha {
            Some(a) => {
                let p = DecayBoundParams::for_game(game.k(), a, rational_to_f64(&base), game.answer_space(), n as u64)?;
                Some(classical_decay_bound(&p))
            }
            None => None,
        };
        if let Some(b) = bound {
            if b < 1.0 && rational_to_f64(&value) > b {
                return Err(Error::CheckFailed(format!("decay bound {b} below value at n={n}")));
            }
        }
        previous = value.clone();
        records.push(DecayRecord {
            n,
            value,
            bound,
            product_lower,
        });
    }
    Ok(DecayCurve { records, truncated_at })
}

impl DecayCurve {
    /// CSV with columns `n, exact, float, bound, product_lower`; a budget stop
    /// appends the row `n, truncated, , , `.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "exact", "float", "bound", "product_lower"])?;
        for r in &self.records {
            w.write_record([
                r.n.to_string(),
                format_rational(&r.value),
                rational_to_f64(&r.value).to_string(),
                r.bound.map(number).unwrap_or_default(),
                format_rational(&r.product_lower),
            ])?;
        }
        if let Some(n) = self.truncated_at {
            w.write_record([n.to_string(), "truncated".into(), String::new(), String::new(), String::new()])?;
        }
        w.flush()?;
        Ok(())
    }
}
