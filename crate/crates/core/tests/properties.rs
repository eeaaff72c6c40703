use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use rdfforge_core::analysis::{classify_properties, discover_classes, Cardinality, Range};
use rdfforge_core::rdf::{parse_turtle, skolemize, to_turtle, Graph, Iri, Literal, Skolemizer, Term, Triple};
use rdfforge_core::rql::{parse_rql, Comparison, Expr, Op};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

fn iri(s: &str) -> Iri {
    Iri::new(format!("urn:t:{s}")).unwrap()
}

fn typing() -> impl Strategy<Value = Triple> {
    ((0..6u8), 0..2u8).prop_map(|(s, c)| Triple::new(Term::Iri(iri(&format!("r{s}"))), Iri::new(RDF_TYPE).unwrap(), Term::Iri(iri(&format!("C{c}")))))
}

fn fact() -> impl Strategy<Value = Triple> {
    let resource = (0..6u8).prop_map(|i| Term::Iri(iri(&format!("r{i}"))));
    let object = prop_oneof![
        3 => (0..6u8).prop_map(|i| Term::Iri(iri(&format!("r{i}")))),
        1 => (0..3u8).prop_map(|i| Term::Literal(Literal::plain(format!("v{i}")))),
        1 => (0..2u8).prop_map(|i| Term::Literal(Literal::lang_tagged(format!("w{i}"), "en"))),
    ];
    (resource, 0..2u8, object).prop_map(|(s, p, o)| Triple::new(s, iri(&format!("p{p}")), o))
}

/// Statements over 6 resources, 2 classes, 2 predicates and a few literals.
fn statement() -> impl Strategy<Value = Triple> {
    prop_oneof![1 => typing(), 3 => fact()]
}

fn profiles(g: &Graph) -> HashMap<(Iri, Iri, Range), Cardinality> {
    let c = discover_classes(g);
    classify_properties(g, &c)
        .profiles
        .into_iter()
        .map(|p| ((p.property, p.domain, p.range), p.cardinality))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    // a typing statement moves statements between ranges, so the added
    // statement is a non-type one
    fn cardinality_never_decreases(base in prop::collection::vec(statement(), 0..30), extra in fact()) {
        let g: Graph = base.iter().cloned().collect();
        let mut bigger = g.clone();
        bigger.insert(extra);
        let before = profiles(&g);
        let after = profiles(&bigger);
        for (key, card) in before {
            let new = after[&key];
            prop_assert!(card.le(new), "{key:?}: {card:?} -> {new:?}");
        }
    }

    #[test]
    fn profiles_are_witnessed(stmts in prop::collection::vec(statement(), 0..40)) {
        let g: Graph = stmts.into_iter().collect();
        let c = discover_classes(&g);
        for p in classify_properties(&g, &c).profiles {
            let witnessed = g.iter().any(|t| {
                t.predicate == p.property
                    && t.subject.as_iri().is_some_and(|s| c.types_of(s).is_some_and(|ts| ts.contains(&p.domain)))
            });
            prop_assert!(witnessed, "{:?}", p);
        }
    }

    #[test]
    fn rdf_type_is_many_to_many(stmts in prop::collection::vec(statement(), 1..40)) {
        let g: Graph = stmts.into_iter().collect();
        let c = discover_classes(&g);
        for p in classify_properties(&g, &c).profiles.iter().filter(|p| p.property.as_str() == RDF_TYPE) {
            prop_assert_eq!(p.cardinality, Cardinality::ManyToMany);
        }
    }

    #[test]
    fn turtle_round_trip(stmts in prop::collection::vec(statement(), 0..40)) {
        let g: Graph = stmts.into_iter().collect();
        prop_assert_eq!(parse_turtle(&to_turtle(&g)).unwrap(), g);
    }

    #[test]
    fn skolemization_preserves_size(n in 0..20usize, shared in 0..5usize) {
        let mut g = Graph::new();
        for i in 0..n {
            g.insert(Triple::new(Term::Blank(format!("b{}", i % (shared + 1))), iri("p"), Term::Literal(Literal::plain(i.to_string()))));
            g.insert(Triple::new(Term::Iri(iri("x")), iri("q"), Term::Blank(format!("b{i}"))));
        }
        let s = skolemize(&g);
        prop_assert_eq!(s.len(), g.len());
        prop_assert!(!s.has_blank_nodes());
        prop_assert_eq!(skolemize(&s), s.clone());
        let d = Skolemizer::new("http://a.example", true);
        prop_assert_eq!(d.apply(&g), d.apply(&g));
    }
}

fn selector() -> impl Strategy<Value = String> {
    "[a-z][a-zA-Z0-9_]{0,8}"
}

fn arg() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-zA-Z0-9.:-]{1,6}",
        any::<i32>().prop_map(|i| i.to_string()),
        // anything, including separators, quotes and the empty string
        ".{0,6}",
    ]
}

fn comparison() -> impl Strategy<Value = Expr> {
    (selector(), prop::sample::select(Op::ALL.to_vec()), prop::collection::vec(arg(), 1..4)).prop_map(|(selector, op, mut args)| {
        if !op.takes_list() {
            args.truncate(1);
        }
        Expr::Comparison(Comparison { selector, op, args })
    })
}

pub fn rql_expr() -> impl Strategy<Value = Expr> {
    comparison().prop_recursive(4, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::And),
            prop::collection::vec(inner, 2..4).prop_map(Expr::Or),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rql_print_parse_identity(e in rql_expr()) {
        let printed = e.to_string();
        prop_assert_eq!(parse_rql(&printed).unwrap(), e, "{}", printed);
    }
}

#[test]
fn multityped_subject_yields_one_profile_per_domain() {
    let g = parse_turtle("@prefix ex: <urn:t:> . ex:a a ex:C0 , ex:C1 ; ex:p0 \"x\" .").unwrap();
    let c = discover_classes(&g);
    let domains: BTreeSet<Iri> =
        classify_properties(&g, &c).entity_profiles().map(|p| p.domain.clone()).collect();
    assert_eq!(domains.len(), 2);
}
