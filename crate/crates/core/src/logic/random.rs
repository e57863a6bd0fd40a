//! Seeded random formulas for property checks and the reduction harness.

use rand::Rng;

use super::formula::{Formula, VarId};

/// Draws a formula over variables `0..num_vars` with nesting at most `depth`.
///
/// Every variable is mentioned at least once: variables the random tree
/// missed are collected into one extra clause joined to it.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, num_vars: u32, depth: u32) -> Formula {
    let body = random_tree(rng, num_vars, depth);
    let missing: Vec<VarId> = (0..num_vars)
        .map(VarId)
        .filter(|v| !body.vars().contains(v))
        .collect();
    if missing.is_empty() {
        return body;
    }
    let tail = Formula::Or(
        missing
            .into_iter()
            .map(|v| Formula::lit(v, rng.gen_bool(0.5)))
            .collect(),
    );
    if rng.gen_bool(0.5) {
        body.and(tail)
    } else {
        body.or(tail)
    }
}

fn random_tree<R: Rng + ?Sized>(rng: &mut R, num_vars: u32, depth: u32) -> Formula {
    if depth == 0 || num_vars == 0 || rng.gen_bool(0.25) {
        if num_vars == 0 {
            return if rng.gen_bool(0.5) {
                Formula::True
            } else {
                Formula::False
            };
        }
        return Formula::lit(VarId(rng.gen_range(0..num_vars)), rng.gen_bool(0.5));
    }
    match rng.gen_range(0..5) {
        0 => random_tree(rng, num_vars, depth - 1).not(),
        1 | 2 => {
            let k = rng.gen_range(2..=3);
            let children = (0..k).map(|_| random_tree(rng, num_vars, depth - 1)).collect();
            if rng.gen_bool(0.5) {
                Formula::And(children)
            } else {
                Formula::Or(children)
            }
        }
        3 => random_tree(rng, num_vars, depth - 1).implies(random_tree(rng, num_vars, depth - 1)),
        _ => random_tree(rng, num_vars, depth - 1).iff(random_tree(rng, num_vars, depth - 1)),
    }
}

/// Disjunction of the minterms selected by bit `k` of `table`, for a
/// function of `vars.len()` variables (bit `i` of `k` gives `vars[i]`).
pub fn truth_table_formula(vars: &[VarId], table: u64) -> Formula {
    let rows = 1u64 << vars.len();
    let minterms: Vec<Formula> = (0..rows)
        .filter(|k| (table >> k) & 1 == 1)
        .map(|k| {
            Formula::And(
                vars.iter()
                    .enumerate()
                    .map(|(i, &v)| Formula::lit(v, (k >> i) & 1 == 1))
                    .collect(),
            )
        })
        .collect();
    if minterms.is_empty() {
        Formula::False
    } else {
        Formula::Or(minterms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_and_covering() {
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let f = random_formula(&mut a, 6, 4);
            assert_eq!(f, random_formula(&mut b, 6, 4));
            assert_eq!(f.vars().len(), 6);
        }
    }

    #[test]
    fn truth_tables_are_exact() {
        let vars = [VarId(0), VarId(1)];
        for table in 0..16u64 {
            let f = truth_table_formula(&vars, table);
            for k in 0..4u64 {
                assert_eq!(f.eval_bits(k), (table >> k) & 1 == 1);
            }
        }
    }
}
