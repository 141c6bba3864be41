#![no_main]

use libfuzzer_sys::fuzz_target;
use tierlab::reference;
use tierlab::scenario::{ScenarioConfig, ScenarioError};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = ScenarioConfig::from_toml(text, |name| {
        let key = name.strip_prefix("../").map_or_else(|| format!("scenario/{name}"), str::to_string);
        reference::embedded(&key).map(str::to_string).ok_or_else(|| ScenarioError::InvalidConfig(name.to_string()))
    });
});
