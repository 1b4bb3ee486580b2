//! Witnesses must survive a serde round trip and still replay through the
//! public rule functions, so a verdict can be handed to a skeptic as data.

use sybilvote::{
    check_liveness_binary, default_grid, exhaustive_safety_binary, less_conservative_check,
    min_safe_delta, AltId, AuditVerdict, BinaryLivenessWitness, BinaryProfile, BinaryRule,
    BinarySafetyWitness, Delta, DeltaPolicy, ParamRule, ParameterDominanceWitness, Property,
};

fn roundtrip<T>(value: &T) -> T
where
    T: serde::Serialize + serde::de::DeserializeOwned,
{
    let json = serde_json::to_string(value).unwrap();
    serde_json::from_str(&json).unwrap()
}

fn honest_restriction(w: &BinarySafetyWitness) -> BinaryProfile {
    let votes = w.votes.votes();
    BinaryProfile::new(
        w.electorate
            .genuine_positions()
            .into_iter()
            .map(|i| votes[i])
            .collect(),
    )
}

#[test]
fn binary_safety_verdict_roundtrips_and_replays() {
    let verdict: AuditVerdict<BinarySafetyWitness> =
        exhaustive_safety_binary(DeltaPolicy::Fixed(Delta::zero()), BinaryRule::Majority, 4, None, 1 << 12)
            .unwrap();
    assert!(!verdict.holds);

    let json = serde_json::to_value(&verdict).unwrap();
    assert_eq!(json["property"], "safety");
    assert_eq!(json["holds"], false);

    let back: AuditVerdict<BinarySafetyWitness> = serde_json::from_value(json).unwrap();
    assert_eq!(back, verdict);

    let w = back.witness.unwrap();
    assert_eq!(w.rule.apply(&w.votes).unwrap().winners, w.rule_winners);
    assert_eq!(
        w.base.apply(&honest_restriction(&w)).unwrap().winners,
        w.base_winners
    );
    assert!(!w.rule_winners.is_subset(&w.base_winners));
}

#[test]
fn binary_liveness_witness_roundtrips_and_replays() {
    let sigma = "1/3".parse().unwrap();
    let rule = BinaryRule::Supermajority {
        delta: min_safe_delta(sigma),
    };
    let verdict = check_liveness_binary(rule, sigma, 9, 1 << 12).unwrap();
    assert!(!verdict.holds);

    let w: BinaryLivenessWitness = roundtrip(&verdict.witness.unwrap());
    assert_eq!(w.electorate.sybil_count() as usize, w.sybil_votes.len());
    let replay = w.rule.apply(&w.attempted).unwrap();
    assert_eq!(replay.winners, w.rule_winners);
    assert!(replay.keeps(&AltId::reality()));
}

#[test]
fn dominance_witness_roundtrips_and_replays() {
    let sigma = "0".parse().unwrap();
    let verdict = less_conservative_check(
        ParamRule::SimpleUpdate { sigma },
        ParamRule::SuppressOuter { sigma },
        4,
        &default_grid(),
        1 << 16,
    )
    .unwrap();
    assert!(!verdict.holds);

    let w: ParameterDominanceWitness = roundtrip(&verdict.witness.unwrap());
    assert_eq!(w.rule_a.apply(&w.profile).unwrap(), w.output_a);
    assert_eq!(w.rule_b.apply(&w.profile).unwrap(), w.output_b);
    let (r, a, b) = (w.profile.reality, w.output_a, w.output_b);
    assert!(!((r <= b && b <= a) || (a <= b && b <= r)));
}

#[test]
fn property_names_are_stable() {
    for (p, name) in [
        (Property::Safety, "safety"),
        (Property::Liveness, "liveness"),
        (Property::LessConservative, "less-conservative"),
    ] {
        assert_eq!(p.to_string(), name);
        assert_eq!(name.parse::<Property>().unwrap(), p);
    }
    assert_eq!(
        serde_json::to_value(Property::LessConservative).unwrap(),
        serde_json::json!("less_conservative")
    );
}
