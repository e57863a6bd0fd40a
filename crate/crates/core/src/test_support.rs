use proptest::prelude::*;

use crate::logic::{Formula, VarId};

pub(crate) fn arb_formula(num_vars: u32, depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        8 => (0..num_vars).prop_map(|i| Formula::Var(VarId(i))),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(depth, 32, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.iff(b)),
        ]
    })
}

use crate::circuit::{Circuit, CircuitBuilder};

/// `a + (1 - a) * b` over leaves (a, b).
pub(crate) fn loose_circuit() -> Circuit {
    let mut b = CircuitBuilder::new(2);
    let a = b.leaf(0);
    let bl = b.leaf(1);
    let na = b.one_minus(a);
    let m = b.mul([na, bl]);
    let out = b.add([a, m]);
    b.finish(vec![out]).unwrap()
}
