use treelogic::eval::*;
use treelogic::structure::*;
use treelogic::syntax::*;
use treelogic::transforms::*;

fn v() -> Vocabulary {
    let mut v = Vocabulary::tree(2);
    v.add("P", 1).unwrap();
    v.add("Q", 1).unwrap();
    v
}

fn p(s: &str) -> Formula {
    parse_formula(s, &v()).unwrap_or_else(|e| panic!("{s}: {e}"))
}

#[test]
fn translation_examples() {
    assert_eq!(lfp_to_mso(&p("P1(x)")), p("P1(x)"));
    assert_eq!(
        render_formula(&lfp_to_mso(&p("lfp[X,x](P1(x))(y)"))),
        "A2 X. ((A x. (P1(x) -> X(x))) -> X(y))"
    );
    assert_eq!(
        tc_to_lfp(&p("tc[x,y](lt(x,y))(u,v)")),
        p("lfp[X,y](y = u | E x. (X(x) & lt(x,y)))(v)")
    );
    // Nested closures get distinct set variables, inner first.
    let nested = tc_to_lfp(&p("tc[x,y](tc[a,b](lt(a,b))(x,y))(u,v)"));
    assert_eq!(
        nested,
        p("lfp[X1,y](y = u | E x. (X1(x) & lfp[X,b](b = x | E a. (X(a) & lt(a,b)))(y)))(v)")
    );
    // The start point coinciding with y forces a rename.
    let clash = tc_to_lfp(&p("tc[x,y](lt(x,y))(y,v)"));
    assert_eq!(clash, p("lfp[X,y1](y1 = y | E x. (X(x) & lt(x,y1)))(v)"));
}

#[test]
fn relativization_examples() {
    assert_eq!(
        relativize(&p("E y. P(y)"), &p("Q(x)"), "x").unwrap(),
        p("E y. (Q(y) & P(y))")
    );
    assert_eq!(
        relativize(&p("lt(a,b)"), &p("Q(x)"), "x").unwrap(),
        p("lt(a,b)")
    );
    assert!(matches!(
        relativize(&p("P(z)"), &p("Q(x) & P1(z)"), "x"),
        Err(TransformError::SharedVariable(_))
    ));
    assert!(matches!(
        relativize(&p("P(z)"), &p("Q(y)"), "x"),
        Err(TransformError::NotFree { .. })
    ));
    // A bound clash with the guard is renamed away.
    let r = relativize(&p("E x. P(x)"), &p("Q(x)"), "x").unwrap();
    assert_eq!(r, p("E x1. (Q(x1) & P(x1))"));
    assert_eq!(
        relativize(&p("E2 Y. Y(a)"), &p("Q(x)"), "x").unwrap(),
        p("E2 Y. ((A x. (Y(x) -> Q(x))) & Y(a))")
    );
    assert_eq!(
        relativize(&p("tc[y,z](lt(y,z))(u,v)"), &p("Q(x)"), "x").unwrap(),
        p("tc[y,z](lt(y,z) & Q(y) & Q(z))(u,v)")
    );
    assert_eq!(
        relativize(&p("lfp[X,y](X(y))(u)"), &p("Q(x)"), "x").unwrap(),
        p("lfp[X,y](X(y) & Q(y))(u)")
    );
}

#[test]
fn axiom_examples() {
    let b = Bindings::new();
    assert_eq!(
        render_formula(&axiom_instance(AxiomId::T4, &b).unwrap()),
        "E x. A y. (lt(x,y) | x = y)"
    );
    let ind = axiom_instance(AxiomId::Ind, &b.clone().with_formula("phi", p("P1(x)"))).unwrap();
    assert_eq!(
        ind,
        p("(A x. ((A y. (lt(x,y) | slt(x,y) -> P1(y))) -> P1(x))) -> A x. P1(x)")
    );
    let fo2 = Bindings::new()
        .with_formula("phi", p("E y. lt(x,y)"))
        .with_var("x", "x")
        .with_var("t", "y");
    match axiom_instance(AxiomId::Fo2, &fo2) {
        Err(TransformError::SideCondition(c)) => assert!(c.contains("substitutable")),
        other => panic!("{other:?}"),
    }
    let fo5 = Bindings::new().with_var("x", "x");
    assert_eq!(axiom_instance(AxiomId::Fo5, &fo5).unwrap(), p("x = x"));
    assert!(axiom_instance(AxiomId::Fo2, &Bindings::new()).is_err());
}

#[test]
fn schema_side_conditions() {
    let fo4 = Bindings::new()
        .with_formula("phi", p("P1(x)"))
        .with_var("x", "x");
    assert!(axiom_instance(AxiomId::Fo4, &fo4).is_err());
    let fo6 = Bindings::new()
        .with_var("x", "x")
        .with_var("y", "y")
        .with_formula("phi", p("lt(x,x)"))
        .with_formula("psi", p("lt(y,x)"));
    assert_eq!(
        axiom_instance(AxiomId::Fo6, &fo6).unwrap(),
        p("x = y -> lt(x,x) -> lt(y,x)")
    );
    let bad6 = fo6.clone().with_formula("psi", p("lt(x,y) & true"));
    assert!(axiom_instance(AxiomId::Fo6, &bad6).is_err());
    let comp = Bindings::new()
        .with_var("X", "X")
        .with_var("x", "x")
        .with_formula("phi", p("X(x)"));
    assert!(axiom_instance(AxiomId::Comp, &comp).is_err());
    let mso1 = Bindings::new()
        .with_var("X", "X")
        .with_formula("phi", p("E2 Y. (X(x) & Y(x))"))
        .with_var("T", "Y");
    assert!(axiom_instance(AxiomId::Mso1, &mso1).is_err());
    let mso1p = mso1.clone().with_pred("T", "P1");
    assert_eq!(
        axiom_instance(AxiomId::Mso1, &mso1p).unwrap(),
        p("(A2 X. E2 Y. (X(x) & Y(x))) -> E2 Y. (P1(x) & Y(x))")
    );
    let lfp = Bindings::new()
        .with_var("X", "X")
        .with_var("x", "x")
        .with_var("y", "y")
        .with_formula("phi", p("!X(x)"))
        .with_formula("psi", p("P1(x)"));
    assert!(axiom_instance(AxiomId::Lfpax, &lfp).is_err());
}

#[test]
fn tc_and_lfp_schemas() {
    let tc = Bindings::new()
        .with_var("x", "x")
        .with_var("y", "y")
        .with_var("u", "u")
        .with_var("v", "v")
        .with_formula("phi", p("lt(x,y)"))
        .with_formula("psi", p("P1(w)"))
        .with_var("w", "w");
    assert_eq!(
        axiom_instance(AxiomId::Tcax, &tc).unwrap(),
        p("tc[x,y](lt(x,y))(u,v) -> P1(u) & (A x. A y. (P1(x) & lt(x,y) -> P1(y))) -> P1(v)")
    );
    let lfp = Bindings::new()
        .with_var("X", "X")
        .with_var("x", "x")
        .with_var("y", "y")
        .with_formula("phi", p("P1(x) | E z. (lt(z,x) & X(z))"))
        .with_formula("psi", p("P2(x)"));
    assert_eq!(
        axiom_instance(AxiomId::Lfpax, &lfp).unwrap(),
        p("lfp[X,x](P1(x) | E z. (lt(z,x) & X(z)))(y) -> (A x. ((P1(x) | E z. (lt(z,x) & P2(z))) -> P2(x))) -> P2(y)")
    );
}

#[test]
fn tree_axioms_hold_on_trees() {
    let docs = [
        r#"{"tree": {}}"#,
        r#"{"tree": {"children": [{}, {}, {"children": [{}, {}]}]}}"#,
        r#"{"tree": {"children": [{"children": [{"children": [{}]}]}]}}"#,
    ];
    for d in docs {
        let f = parse_structure(d, None).unwrap();
        for id in AxiomId::TREE {
            let phi = axiom_instance(id, &Bindings::new()).unwrap();
            assert!(eval_closed(&f, &phi).unwrap(), "{id} on {d}");
        }
        assert!(eval_closed(&f, &chi_finiteness()).unwrap());
    }
}

#[test]
fn chi_shape() {
    let chi = chi_finiteness();
    assert!(free_variables(&chi).is_empty());
    assert!(chi.check_logic(LogicId::Fotc1).is_ok());
    assert_eq!(quantifier_depth(&chi), 8);
    assert_eq!(chi, chi_finiteness());
    // On a chain the successor is the child.
    let c = parse_structure(r#"{"tree": {"children": [{"children": [{}]}]}}"#, None).unwrap();
    let succ = chi_successor();
    let holds = |a, b| eval(&c, &Assignment::new().elem("x", a).elem("y", b), &succ).unwrap();
    assert!(holds(0, 1) && holds(1, 2) && !holds(0, 2) && !holds(2, 0));
}

#[test]
fn chi_fails_without_a_last_node() {
    // A 2-cycle in the successor: every node has a next sibling.
    let mut f = Frame::new(Vocabulary::tree(0), 2).unwrap();
    f.add_tuple("slt", &[0, 1]).unwrap();
    f.add_tuple("slt", &[1, 0]).unwrap();
    assert!(!eval_closed(&f, &chi_finiteness()).unwrap());
}

#[test]
fn axiom_ids_parse() {
    for id in AxiomId::ALL {
        assert_eq!(id.name().parse::<AxiomId>().unwrap(), id);
    }
    assert!("FO9".parse::<AxiomId>().is_err());
}
