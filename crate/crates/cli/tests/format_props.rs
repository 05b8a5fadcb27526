use proptest::prelude::*;

use ratsynth::commands::{generate, GenOptions};
use ratsynth::format::{parse_instance_str, parse_text, Document};

fn gen_options() -> impl Strategy<Value = GenOptions> {
    (
        1usize..=5,
        0usize..=2,
        1usize..=3,
        prop::sample::select(vec!["reach", "safe", "buchi", "cobuchi", "muller"]),
        any::<u64>(),
        prop::sample::select(vec![0.0, 0.25, 0.5, 1.0]),
    )
        .prop_map(|(states, agents, actions, class, seed, density)| GenOptions {
            states,
            agents,
            actions,
            class: class.to_string(),
            seed,
            density,
            json: false,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn generated_instances_round_trip(opts in gen_options()) {
        let text = generate(&opts).unwrap();
        prop_assert_eq!(&generate(&opts).unwrap(), &text);
        let inst = parse_instance_str(&text, false).unwrap();
        let doc = Document::from_instance(&inst.game, &inst.objectives);
        let again = parse_instance_str(&doc.to_text(), false).unwrap();
        prop_assert_eq!(&again.game, &inst.game);
        prop_assert_eq!(again.objectives.objectives(), inst.objectives.objectives());
        let json = generate(&GenOptions { json: true, ..opts }).unwrap();
        let from_json = parse_instance_str(&json, true).unwrap();
        prop_assert_eq!(&from_json.game, &inst.game);
    }

    #[test]
    fn parser_never_panics(text in "[a-z0-9é→ ()*,>#\n-]{0,200}") {
        let _ = parse_text(&text);
        let _ = parse_instance_str(&text, false);
    }

    #[test]
    fn mutated_instances_fail_cleanly(opts in gen_options(), cut in any::<prop::sample::Index>(), junk in "[a-z(),* ]{0,6}") {
        let text = generate(&opts).unwrap();
        let at = cut.index(text.len() + 1);
        let mutated = format!("{}{junk}{}", &text[..at], &text[at..]);
        if let Err(e) = parse_instance_str(&mutated, false) {
            prop_assert!(!e.message.is_empty());
            prop_assert!(e.line <= mutated.lines().count());
        }
    }
}
