use treelogic::eval::*;
use treelogic::structure::*;
use treelogic::syntax::*;
use treelogic::transforms::*;

const CHAIN3: &str = r#"{"tree": {"label": [], "children": [{"children": [{"children": []}]}]}}"#;
const FORK: &str = r#"{"tree": {"children": [{"label": ["P1"]}, {"children": [{}]}]}}"#;

fn load(s: &str) -> Frame {
    parse_structure(s, None).unwrap()
}

fn p(s: &str, f: &Frame) -> Formula {
    parse_formula(s, f.vocab()).unwrap()
}

/// Independent transitive closure by repeated squaring over edge lists.
fn closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for &(a, b) in edges {
        m[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if m[i][k] && m[k][j] {
                    m[i][j] = true;
                }
            }
        }
    }
    m
}

#[test]
fn json_examples() {
    let one = parse_structure(r#"{"n":1,"rel":{},"admissible":"full"}"#, None).unwrap();
    assert_eq!(one.size(), 1);
    assert!(one.is_full());
    assert!(matches!(
        parse_structure(r#"{"n":0,"rel":{},"admissible":"full"}"#, None),
        Err(StructureError::EmptyDomain)
    ));
    let c = load(CHAIN3);
    let oracle = closure(3, &[(0, 1), (1, 2)]);
    for a in 0..3 {
        for b in 0..3 {
            assert_eq!(c.holds("lt", &[a, b]), oracle[a][b], "{a} {b}");
        }
    }
    assert!(c.holds("R", &[0]) && !c.holds("R", &[1]));
    let back = frame_from_json(&frame_to_json(&c), None).unwrap();
    assert_eq!(back, c);
    assert!(parse_structure(r#"{"vocab":["r/2"],"n":2,"rel":{"r":[[0,2]]}}"#, None).is_err());
    assert!(parse_structure(r#"{"vocab":["r/2"],"n":2,"rel":{"q":[[0,1]]}}"#, None).is_err());
}

#[test]
fn tree_checks() {
    let c = load(CHAIN3);
    assert!(check_tree_shape(&c));
    assert!(check_tree_axioms(&c).unwrap().all());
    let f = load(FORK);
    assert!(check_tree_shape(&f));
    assert!(check_tree_axioms(&f).unwrap().all());
    let one = load(r#"{"tree": {}}"#);
    assert!(check_tree_axioms(&one).unwrap().all());

    let mut cyc = Frame::new(Vocabulary::tree(0), 2).unwrap();
    cyc.add_tuple("lt", &[0, 1]).unwrap();
    cyc.add_tuple("lt", &[1, 0]).unwrap();
    assert!(!check_tree_shape(&cyc));

    let two = Frame::new(Vocabulary::tree(0), 2).unwrap();
    let report = check_tree_axioms(&two).unwrap();
    assert!(report.failed().contains(&AxiomId::T4));
    assert!(!check_tree_shape(&two));
}

#[test]
fn substructures() {
    let mut f = Frame::new(Vocabulary::tree(1), 3).unwrap();
    f.add_tuple("lt", &[0, 1]).unwrap();
    f.set_admissible(Admissible::Listed(vec![
        ElemSet::singleton(0),
        ElemSet::from_iter([1, 2]),
    ]))
    .unwrap();
    let (all, _) = f.substructure(f.domain()).unwrap();
    assert_eq!(all, f);
    let (sub, old) = f.substructure(ElemSet::singleton(1)).unwrap();
    assert_eq!(old, vec![1]);
    let fam: Vec<ElemSet> = sub.admissible_sets().collect();
    assert_eq!(fam.len(), 2);
    assert!(fam.contains(&ElemSet::EMPTY) && fam.contains(&ElemSet::singleton(0)));
    let a = ElemSet::from_iter([0, 2]);
    let (s1, _) = f.substructure(a).unwrap();
    let (s2, _) = s1.substructure(s1.domain()).unwrap();
    assert_eq!(s1, s2);
    assert!(f.substructure(ElemSet::EMPTY).is_err());
}

#[test]
fn subforests() {
    let c = load(CHAIN3);
    let whole = subforest_at(&c, 0).unwrap();
    assert_eq!(whole, c);
    let leaf = subforest_at(&c, 2).unwrap();
    assert_eq!(leaf.size(), 1);
    assert!(leaf.holds("R", &[0]));

    // Root 0 with children 1 (P1) and 2, and 3 below 2.
    let f = load(FORK);
    let s = subforest_at(&f, 1).unwrap();
    assert_eq!(s.size(), 3);
    assert!(check_forest_shape(&s));
    let roots: Vec<usize> = (0..3).filter(|&x| s.holds("R", &[x])).collect();
    assert_eq!(roots.len(), 2);
    // Compare with { x | E z. (a <=sib z & z <= x) } computed by the evaluator.
    let phi = p("E z. ((slt(a,z) | a = z) & (lt(z,x) | z = x))", &f);
    let members: Vec<usize> = (0..4)
        .filter(|&x| eval(&f, &Assignment::new().elem("a", 1).elem("x", x), &phi).unwrap())
        .collect();
    assert_eq!(members, vec![1, 2, 3]);
    assert_eq!(canonical_tree_code(&s).unwrap(), "(P1)(())");
    assert!(subforest_at(&f, 9).is_err());
}

#[test]
fn canonical_codes() {
    let t = load(r#"{"tree": {"label":["P1"]}}"#);
    assert_eq!(canonical_tree_code(&t).unwrap(), "(P1)");
    let f = load(FORK);
    let g = f.permute(&[3, 2, 1, 0]);
    assert_eq!(
        canonical_tree_code(&f).unwrap(),
        canonical_tree_code(&g).unwrap()
    );
}

#[test]
fn eval_examples() {
    let c = load(CHAIN3);
    let g = Assignment::new();
    assert!(eval(&c, &g, &Formula::Top).unwrap());
    let tc = p("tc[x,y](ltch(x,y))(u,v)", &c);
    let at = |u, v| Assignment::new().elem("u", u).elem("v", v);
    assert!(eval(&c, &at(0, 2), &tc).unwrap());
    assert!(!eval(&c, &at(2, 0), &tc).unwrap());
    assert!(eval(&c, &at(1, 1), &tc).unwrap());
    assert!(eval_tc_path(&c, &at(0, 2), &tc).unwrap());
    assert!(!eval_tc_path(&c, &at(2, 0), &tc).unwrap());
    assert!(eval_tc_path(&c, &at(2, 2), &tc).unwrap());
    let empty = p("lfp[X,x](X(x))(y)", &c);
    let top = p("lfp[X,x](true)(y)", &c);
    for y in 0..3 {
        let g = Assignment::new().elem("y", y);
        assert!(!eval(&c, &g, &empty).unwrap());
        assert!(!eval_lfp_kleene(&c, &g, &empty).unwrap());
        assert!(eval(&c, &g, &top).unwrap());
        assert!(eval_lfp_kleene(&c, &g, &top).unwrap());
    }
    assert!(matches!(
        eval(&c, &g, &p("lt(x,x)", &c)),
        Err(EvalError::Unbound(_))
    ));
    assert!(eval_closed(&c, &chi_finiteness()).unwrap());
}

#[test]
fn eval_respects_admissible_family() {
    let mut f = Frame::new(Vocabulary::tree(1), 2).unwrap();
    f.add_tuple("P1", &[0]).unwrap();
    let comp = p("E2 X. A x. (X(x) <-> P1(x))", &f);
    assert!(eval_closed(&f, &comp).unwrap());
    f.set_admissible(Admissible::Listed(vec![ElemSet::EMPTY, ElemSet::full(2)]))
        .unwrap();
    assert!(!eval_closed(&f, &comp).unwrap());
    let g = Assignment::new().set("X", ElemSet::singleton(0));
    assert!(matches!(
        eval(&f, &g, &p("X(x)", &f)),
        Err(EvalError::NotAdmissible { .. }) | Err(EvalError::Unbound(_))
    ));
    assert!(matches!(
        eval_tc_path(
            &f,
            &Assignment::new().elem("u", 0).elem("v", 1),
            &p("tc[x,y](lt(x,y))(u,v)", &f)
        ),
        Err(EvalError::NotStandard)
    ));
    let mut checker = Checker::new(&f, &p("A2 X. (X(x) | !X(x))", &f)).unwrap();
    checker.enable_trace();
    assert!(checker.eval(&Assignment::new().elem("x", 0)).unwrap());
    assert!(checker.trace().iter().all(|s| f.is_admissible(*s)));
    assert!(!checker.trace().is_empty());
}

#[test]
fn assignment_parsing() {
    let g = Assignment::parse("x=0, X={1,2}").unwrap();
    assert_eq!(g.elems["x"], 0);
    assert_eq!(g.sets["X"], ElemSet::from_iter([1, 2]));
    assert!(Assignment::parse("x=").is_err());
}
