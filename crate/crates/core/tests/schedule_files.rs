use c0dyn::witness::{build_schedule, WitnessSchedule};
use serde_json::Value;

fn tamper(text: &str, line: usize, key: &str, value: Value) -> String {
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut v: Value = serde_json::from_str(&lines[line]).unwrap();
    v[key] = value;
    lines[line] = v.to_string();
    lines.join("\n")
}

#[test]
fn jsonl_round_trip() {
    let s = build_schedule(3, 2).unwrap();
    let text = s.to_jsonl();
    assert_eq!(text.lines().count(), 6);
    let back = WitnessSchedule::from_jsonl(&text).unwrap();
    assert_eq!(back, s);
    assert!(back.verify().is_empty());
}

#[test]
fn tampered_index_is_caught() {
    let s = build_schedule(3, 2).unwrap();
    let text = s.to_jsonl();
    let (line, _) = s.entries().enumerate().max_by_key(|(_, e)| e.n).unwrap();
    assert!(s.entries().nth(line).unwrap().n > 1);
    let bad = tamper(&text, line, "n", Value::from(1u64));
    let violations = WitnessSchedule::from_jsonl(&bad).unwrap().verify();
    assert_eq!(violations.len(), 1);
}

#[test]
fn tampered_slack_is_caught() {
    let s = build_schedule(3, 2).unwrap();
    let text = s.to_jsonl();
    let bad = tamper(&text, 0, "slack", Value::from("0/1"));
    assert!(!WitnessSchedule::from_jsonl(&bad).unwrap().verify().is_empty());
    let bad = tamper(&text, 0, "enclosure_hi", Value::from("1/1"));
    assert!(!WitnessSchedule::from_jsonl(&bad).unwrap().verify().is_empty());
}

#[test]
fn malformed_files_are_rejected() {
    let s = build_schedule(2, 2).unwrap();
    let text = s.to_jsonl();
    let partial: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    assert!(WitnessSchedule::from_jsonl(&partial).is_err());
    assert!(WitnessSchedule::from_jsonl("{\"k\": 1}\n").is_err());
    assert!(WitnessSchedule::from_jsonl("not json\n").is_err());
}
