use crate::syntax::{parse_formula, Formula, Vocabulary};

const LEAF_X: &str = "!(E y. lt(x,y))";
const ROOT_Z: &str = "!(E y. lt(y,z))";

/// `phi(x,y)`: `y` follows `x` in the depth-first left-to-right order.
pub fn chi_successor() -> Formula {
    let first_child = format!("!{LEAF_X} & ltch(x,y) & !(E z. slt(z,y))");
    let next_sibling = format!("{LEAF_X} & sltns(x,y)");
    let climb = format!(
        "{LEAF_X} & !(E z. slt(x,z)) & \
         (E z. (lt(z,x) & sltns(z,y) & !(E w. (lt(w,x) & lt(z,w) & (E u. sltns(w,u))))))"
    );
    let text = format!("({first_child}) | ({next_sibling}) | ({climb})");
    parse_formula(&text, &Vocabulary::tree(0)).expect("successor formula parses")
}

/// Closed sentence true exactly on the trees whose depth-first walk from
/// the root reaches a last node.
pub fn chi_finiteness() -> Formula {
    let step = chi_successor();
    let root = parse_formula(ROOT_Z, &Vocabulary::tree(0)).expect("root formula parses");
    let reach = Formula::tc("x", "y", step.clone(), "z", "u");
    let beyond = Formula::exists(
        "u1",
        Formula::and(
            Formula::not(Formula::eq("u", "u1")),
            Formula::tc("x", "y", step, "u", "u1"),
        ),
    );
    Formula::exists(
        "u",
        Formula::exists("z", Formula::conj([root, reach, Formula::not(beyond)])),
    )
}
