#![allow(dead_code)]

use std::collections::BTreeMap;

use bellgame::model::{CorrelationInequality, Label, NonlocalGame, Scenario, SettingVec, WinningSet};
use rand::Rng;

/// Parties 1..=3, inputs 1..=3 per party, outcomes 2..=3 per input, some
/// zero-probability inputs.
pub fn random_game<R: Rng>(rng: &mut R) -> NonlocalGame {
    let parties = rng.gen_range(1..=3);
    let alphabets: Vec<Vec<Vec<Label>>> = (0..parties)
        .map(|_| {
            let inputs = rng.gen_range(1..=3);
            (0..inputs)
                .map(|_| {
                    let k = rng.gen_range(2..=3);
                    let offset: Label = rng.gen_range(-2..=2);
                    (0..k).map(|l| l + offset).collect()
                })
                .collect()
        })
        .collect();
    let scenario = Scenario::new(alphabets).unwrap();
    let inputs = scenario.setting_vectors();
    let mut weights: Vec<f64> = inputs
        .iter()
        .map(|_| if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.05..1.0) })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        weights[0] = 1.0;
    }
    let total: f64 = weights.iter().sum();
    let mut distribution = BTreeMap::new();
    let mut table = BTreeMap::new();
    for (s, w) in inputs.into_iter().zip(weights) {
        let set: WinningSet = scenario
            .outcome_tuples(&s)
            .into_iter()
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        distribution.insert(s.clone(), w / total);
        table.insert(s, set);
    }
    NonlocalGame::new(scenario, distribution, table).unwrap()
}

/// Parties 2..=3, inputs 1..=3, coefficients and bound on a quarter-integer grid.
pub fn random_correlation<R: Rng>(rng: &mut R) -> CorrelationInequality {
    let parties = rng.gen_range(2..=3);
    let settings: Vec<usize> = (0..parties).map(|_| rng.gen_range(1..=3)).collect();
    let mut coeffs: BTreeMap<SettingVec, f64> = BTreeMap::new();
    for s in bellgame::model::setting_vectors(&settings) {
        coeffs.insert(s, rng.gen_range(-8..=8) as f64 / 4.0);
    }
    if coeffs.values().all(|&c| c == 0.0) {
        *coeffs.values_mut().next().unwrap() = 1.0;
    }
    let abs_sum: f64 = coeffs.values().map(|c| c.abs()).sum();
    let bound = (rng.gen_range(1..=(4.0 * abs_sum) as i64)) as f64 / 4.0;
    CorrelationInequality::new(settings, coeffs, bound).unwrap()
}

const TOKENS: &[&str] = &[
    "0", "1", "-1", "2", "0.5", "1e308", "-0", "nan", "inf", "(", ")", ",", ":", "#", "v2", "bound", "coeff",
    "weight", "prob", "win", "alphabet", "parties", "settings", "smin", "smax", "18446744073709551616", "\t",
];

/// One random edit of `text`: character insert/delete, line swap/duplicate/
/// delete, or a token replacement.
pub fn mutate<R: Rng>(text: &str, rng: &mut R) -> String {
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    if lines.is_empty() {
        return TOKENS[rng.gen_range(0..TOKENS.len())].to_string();
    }
    let i = rng.gen_range(0..lines.len());
    match rng.gen_range(0..6) {
        0 => {
            let chars: Vec<char> = lines[i].chars().collect();
            if !chars.is_empty() {
                let k = rng.gen_range(0..chars.len());
                lines[i] = chars[..k].iter().chain(&chars[k + 1..]).collect();
            }
        }
        1 => {
            let mut chars: Vec<char> = lines[i].chars().collect();
            let k = rng.gen_range(0..=chars.len());
            chars.insert(k, char::from(rng.gen_range(0x20u8..0x7f)));
            lines[i] = chars.into_iter().collect();
        }
        2 => {
            let j = rng.gen_range(0..lines.len());
            lines.swap(i, j);
        }
        3 => {
            let l = lines[i].clone();
            lines.insert(i, l);
        }
        4 => {
            lines.remove(i);
        }
        _ => {
            let mut words: Vec<String> = lines[i].split(' ').map(str::to_string).collect();
            let k = rng.gen_range(0..words.len());
            words[k] = TOKENS[rng.gen_range(0..TOKENS.len())].to_string();
            lines[i] = words.join(" ");
        }
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
