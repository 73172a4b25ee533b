use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};

use super::Game;
use crate::error::{Error, Result};
use crate::scalar::rational_to_f64;

/// Default cap on LP variables `p(a|x)`.
pub const NS_VARIABLE_LIMIT: usize = 50_000;

/// Non-signaling value with the default size limit.
pub fn nonsignaling_value(game: &Game) -> Result<f64> {
    nonsignaling_value_with_limit(game, NS_VARIABLE_LIMIT)
}

/// Maximizes `Σ μ(x) V(x,a) p(a|x)` over the non-signaling polytope.
///
/// Constraints: `p ≥ 0`, `Σ_a p(a|x) = 1` for every `x`, and for every
/// player `t` the marginal on the other players' answers does not depend on
/// `x^t`. Single-player marginal conditions imply the condition for every
/// subset of players.
pub fn nonsignaling_value_with_limit(game: &Game, limit: usize) -> Result<f64> {
    let qs = game.question_shape();
    let as_ = game.answer_shape();
    let nx = qs.size();
    let na = as_.size();
    let vars = nx.saturating_mul(na);
    if vars > limit {
        return Err(Error::SizeLimit {
            what: "non-signaling LP variables",
            required: vars.to_string(),
            limit: limit as u64,
        });
    }
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let mut p = Vec::with_capacity(vars);
    for x in 0..nx {
        let mu = rational_to_f64(game.mu(x));
        for a in 0..na {
            let c = if game.accepts(x, a) { mu } else { 0.0 };
            p.push(lp.add_var(c, (0.0, 1.0)));
        }
    }
    let var = |x: usize, a: usize| p[x * na + a];

    for x in 0..nx {
        let mut e = LinearExpr::empty();
        for a in 0..na {
            e.add(var(x, a), 1.0);
        }
        lp.add_constraint(e, ComparisonOp::Eq, 1.0);
    }

    for t in 0..game.k() {
        let qt = qs.radices()[t];
        let at = as_.radices()[t];
        for x in 0..nx {
            // Chain consecutive questions of player t; equality propagates.
            if qs.digit(x, t) + 1 >= qt {
                continue;
            }
            let x2 = x + qs.stride(t);
            for a in 0..na {
                if as_.digit(a, t) != 0 {
                    continue;
                }
                let mut e = LinearExpr::empty();
                for d in 0..at {
                    let ad = a + d * as_.stride(t);
                    e.add(var(x, ad), 1.0);
                    e.add(var(x2, ad), -1.0);
                }
                lp.add_constraint(e, ComparisonOp::Eq, 0.0);
            }
        }
    }

    let sol = lp.solve().map_err(|e| Error::Lp(e.to_string()))?;
    Ok(sol.objective())
}
