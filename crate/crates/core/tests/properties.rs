use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treelogic::eval::*;
use treelogic::structure::*;
use treelogic::syntax::*;
use treelogic::testkit::*;
use treelogic::transforms::*;

const LOGICS: [LogicId; 4] = [LogicId::Fo, LogicId::Mso, LogicId::Fotc1, LogicId::Folfp1];

fn cfg(seed: u64, logic: LogicId, max_depth: usize) -> GenConfig {
    GenConfig {
        seed,
        max_size: 5,
        max_depth,
        max_ops: 5,
        logic,
        ..GenConfig::default()
    }
}

/// Polarity walk kept apart from the library's own.
fn occurrences(f: &Formula, x: &str, negated: bool, out: &mut Vec<bool>) {
    match f {
        Formula::In(s, _) if s == x => out.push(negated),
        Formula::Not(a) => occurrences(a, x, !negated, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            occurrences(a, x, negated, out);
            occurrences(b, x, negated, out);
        }
        Formula::Implies(a, b) => {
            occurrences(a, x, !negated, out);
            occurrences(b, x, negated, out);
        }
        Formula::Exists(_, a) | Formula::Forall(_, a) => occurrences(a, x, negated, out),
        Formula::ExistsSet(s, a) | Formula::ForallSet(s, a) if s != x => {
            occurrences(a, x, negated, out)
        }
        Formula::Tc { body, .. } => occurrences(body, x, negated, out),
        Formula::Lfp { set, body, .. } | Formula::Gfp { set, body, .. } if set != x => {
            occurrences(body, x, negated, out)
        }
        _ => {}
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn render_parse_round_trip(seed in any::<u64>(), li in 0usize..4, depth in 0usize..=6) {
        let c = cfg(seed, LOGICS[li], depth);
        let mut g = Generator::new(c.clone());
        let f = g.formula(&["a", "b"], &["Y"]);
        let text = render_formula(&f);
        let back = parse_formula(&text, &c.vocab).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, f);
    }

    #[test]
    fn random_formulas_respect_their_config(seed in any::<u64>(), li in 0usize..4, depth in 0usize..=3) {
        let f = random_formula(&cfg(seed, LOGICS[li], depth));
        prop_assert!(quantifier_depth(&f) <= depth);
        prop_assert!(f.check_logic(LOGICS[li]).is_ok());
        prop_assert!(free_variables(&f).is_empty());
    }

    #[test]
    fn nnf_keeps_depth(seed in any::<u64>(), li in 0usize..4) {
        let f = random_formula(&cfg(seed, LOGICS[li], 3));
        prop_assert_eq!(quantifier_depth(&nnf_gfp(&f)), quantifier_depth(&f));
    }

    #[test]
    fn nnf_keeps_truth(seed in any::<u64>(), li in 0usize..4) {
        let c = cfg(seed, LOGICS[li], 2);
        let mut g = Generator::new(c);
        let frame = g.frame();
        let f = g.sentence();
        prop_assert_eq!(eval_closed(&frame, &f).unwrap(), eval_closed(&frame, &nnf_gfp(&f)).unwrap());
    }

    #[test]
    fn positivity_matches_a_polarity_walk(seed in any::<u64>(), li in 0usize..4) {
        let mut g = Generator::new(cfg(seed, LOGICS[li], 3));
        let f = g.formula(&["a"], &["Y"]);
        let mut occ = Vec::new();
        occurrences(&f, "Y", false, &mut occ);
        prop_assert_eq!(check_positive(&f, "Y"), occ.iter().all(|n| !n));
    }

    #[test]
    fn fixpoint_bodies_are_positive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = Vocabulary::tree(1);
        let body = FormulaGen::new(&v, LogicId::Folfp1).lfp_body(&mut rng, 2, 4, "X", "x", &["p"]);
        prop_assert!(check_positive(&body, "X"));
    }

    #[test]
    fn trivial_substitution_is_identity(seed in any::<u64>(), li in 0usize..4) {
        let mut g = Generator::new(cfg(seed, LOGICS[li], 3));
        let f = g.formula(&["a", "b"], &[]);
        prop_assert_eq!(substitute(&f, "a", "a").unwrap(), f.clone());
        // Substituting a variable that is not free changes nothing.
        prop_assert_eq!(substitute(&f, "zz", "a").unwrap(), f);
    }

    #[test]
    fn substitution_agrees_with_reassignment(seed in any::<u64>(), li in 0usize..4) {
        let mut g = Generator::new(cfg(seed, LOGICS[li], 2));
        let frame = g.frame();
        let f = g.formula(&["a", "b"], &[]);
        let n = frame.size();
        let eb = g.rng().gen_range(0..n);
        let sub = substitute_renaming(&f, "a", "b");
        let lhs = eval(&frame, &Assignment::new().elem("b", eb), &sub).unwrap();
        let rhs = eval(&frame, &Assignment::new().elem("a", eb).elem("b", eb), &f).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tc_closure_matches_reachability(seed in any::<u64>()) {
        let c = cfg(seed, LogicId::Fotc1, 1);
        let mut g = Generator::new(c.clone());
        let frame = g.frame();
        let body = FormulaGen::new(&c.vocab, LogicId::Fotc1).tc_body(g.rng(), 1, 3, "x", "y");
        let phi = Formula::tc("x", "y", body, "u", "v");
        for u in 0..frame.size() {
            for v in 0..frame.size() {
                let a = Assignment::new().elem("u", u).elem("v", v);
                prop_assert_eq!(eval(&frame, &a, &phi).unwrap(), eval_tc_path(&frame, &a, &phi).unwrap());
            }
        }
    }

    #[test]
    fn fixpoints_match_kleene_iteration(seed in any::<u64>(), least in any::<bool>()) {
        let c = cfg(seed, LogicId::Folfp1, 1);
        let mut g = Generator::new(c.clone());
        let frame = g.frame();
        let body = FormulaGen::new(&c.vocab, LogicId::Folfp1).lfp_body(g.rng(), 1, 3, "X", "x", &[]);
        let phi = if least { Formula::lfp("X", "x", body, "y") } else { Formula::gfp("X", "x", body, "y") };
        for y in 0..frame.size() {
            let a = Assignment::new().elem("y", y);
            prop_assert_eq!(eval(&frame, &a, &phi).unwrap(), eval_lfp_kleene(&frame, &a, &phi).unwrap());
        }
    }

    #[test]
    fn translations_preserve_truth(seed in any::<u64>(), tc in any::<bool>()) {
        let logic = if tc { LogicId::Fotc1 } else { LogicId::Folfp1 };
        let mut g = Generator::new(cfg(seed, logic, 2));
        let frame = g.frame();
        let f = g.formula(&["a"], &[]);
        let a = Assignment::new().elem("a", g.rng().gen_range(0..frame.size()));
        let truth = eval(&frame, &a, &f).unwrap();
        let mso = if tc { lfp_to_mso(&tc_to_lfp(&f)) } else { lfp_to_mso(&f) };
        prop_assert!(mso.check_logic(LogicId::Mso).is_ok());
        prop_assert_eq!(eval(&frame, &a, &mso).unwrap(), truth);
        if tc {
            let lfp = tc_to_lfp(&f);
            prop_assert!(lfp.check_logic(LogicId::Folfp1).is_ok());
            prop_assert_eq!(eval(&frame, &a, &lfp).unwrap(), truth);
        }
    }

    #[test]
    fn relativization_lemma(seed in any::<u64>(), li in 0usize..4) {
        let logic = LOGICS[li];
        let c = cfg(seed, logic, 2);
        let mut g = Generator::new(c.clone());
        let frame = g.frame();
        let phi = g.formula(&["a"], &[]);
        let psi = FormulaGen::new(&c.vocab, LogicId::Fo).generate(g.rng(), 1, 2, &["w"], &[]);
        let Ok(rel) = relativize(&phi, &psi, "w") else {
            return Ok(());
        };
        let a_set: ElemSet = (0..frame.size())
            .filter(|&e| eval(&frame, &Assignment::new().elem("w", e), &psi).unwrap())
            .collect();
        prop_assume!(!a_set.is_empty());
        let members = a_set.to_vec();
        let ea = *members.choose(g.rng()).unwrap();
        let (sub, old) = frame.substructure(a_set).unwrap();
        let new_a = old.iter().position(|&o| o == ea).unwrap();
        prop_assert_eq!(
            eval(&frame, &Assignment::new().elem("a", ea), &rel).unwrap(),
            eval(&sub, &Assignment::new().elem("a", new_a), &phi).unwrap()
        );
    }

    #[test]
    fn canonical_codes_ignore_numbering(seed in any::<u64>()) {
        let mut g = Generator::new(cfg(seed, LogicId::Fo, 1));
        let t = g.tree().into_frame();
        let mut perm: Vec<usize> = (0..t.size()).collect();
        perm.shuffle(g.rng());
        prop_assert_eq!(canonical_tree_code(&t).unwrap(), canonical_tree_code(&t.permute(&perm)).unwrap());
    }
}

#[test]
fn generators_are_reproducible() {
    let c = cfg(42, LogicId::Mso, 2);
    assert_eq!(random_frame(&c), random_frame(&c));
    assert_eq!(random_formula(&c), random_formula(&c));
    assert_eq!(random_tree(&c).into_frame(), random_tree(&c).into_frame());
    let mut a = Generator::new(c.clone());
    let mut b = Generator::new(c);
    for _ in 0..20 {
        assert_eq!(a.frame(), b.frame());
        assert_eq!(a.sentence(), b.sentence());
    }
}

#[test]
fn random_trees_satisfy_the_axioms() {
    for seed in 0..200 {
        let t = random_tree(&GenConfig {
            seed,
            max_size: 9,
            ..GenConfig::default()
        });
        assert!(check_tree_shape(t.frame()));
        let report = check_tree_axioms(t.frame()).unwrap();
        assert!(report.all(), "seed {seed}: {:?}", report.failed());
    }
}

#[test]
fn near_trees_fail_their_target_axiom() {
    let mut g = Generator::new(GenConfig {
        seed: 9,
        max_size: 7,
        ..GenConfig::default()
    });
    for _ in 0..10 {
        for v in Violation::ALL {
            let f = g.near_tree(v);
            assert!(!check_tree_shape(&f), "{v:?}");
            let failed = check_tree_axioms(&f).unwrap().failed();
            assert!(
                failed.iter().any(|a| a.name() == v.target()),
                "{v:?} failed {failed:?}"
            );
        }
    }
    // The T2 damage touches nothing but irreflexivity and what depends on it.
    let f = g.near_tree(Violation::LtReflexive);
    let failed = check_tree_axioms(&f).unwrap().failed();
    assert!(failed.contains(&AxiomId::T2));
    assert!(!failed.contains(&AxiomId::T6) && !failed.contains(&AxiomId::T7));
}

#[test]
fn enumeration_examples() {
    let v = Vocabulary::new([("P1".to_string(), 1)]).unwrap();
    let zero = enumerate_formulas(&v, &EnumConfig::new(LogicId::Fo, 0, 1)).unwrap();
    assert!(zero.contains(&Formula::Top));
    assert!(zero.iter().all(|f| quantifier_depth(f) == 0));
    for (logic, n) in [(LogicId::Fo, 2), (LogicId::Mso, 1)] {
        let fs = enumerate_formulas(&v, &EnumConfig::new(logic, n, 2)).unwrap();
        let distinct: std::collections::HashSet<String> = fs.iter().map(render_formula).collect();
        assert_eq!(distinct.len(), fs.len());
        assert!(fs
            .iter()
            .all(|f| free_variables(f).is_empty() && quantifier_depth(f) <= n));
        assert!(fs.iter().all(|f| f.check_logic(logic).is_ok()));
    }
    assert_eq!(
        enumerate_formulas(&v, &EnumConfig::new(LogicId::Fotc1, 1, 1)),
        Err(EnumError::Logic)
    );
    let mut tiny = EnumConfig::new(LogicId::Mso, 2, 3);
    tiny.max_formulas = 10;
    assert_eq!(enumerate_formulas(&v, &tiny), Err(EnumError::Budget(10)));
}

#[test]
fn canonical_code_examples() {
    let v = Vocabulary::tree(1);
    let one = tree_from_parents(&v, &[None], &[vec!["P1".into()]]).unwrap();
    assert_eq!(canonical_tree_code(&one).unwrap(), "(P1)");
    let a = tree_from_parents(
        &v,
        &[None, Some(0), Some(0)],
        &[vec![], vec!["P1".into()], vec![]],
    )
    .unwrap();
    let b = tree_from_parents(
        &v,
        &[None, Some(0), Some(0)],
        &[vec![], vec![], vec!["P1".into()]],
    )
    .unwrap();
    assert_ne!(
        canonical_tree_code(&a).unwrap(),
        canonical_tree_code(&b).unwrap()
    );
    let mut broken = a.clone();
    broken.add_tuple("lt", &[1, 0]).unwrap();
    assert!(canonical_tree_code(&broken).is_err());
}
