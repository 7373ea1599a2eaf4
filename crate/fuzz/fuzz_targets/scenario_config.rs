#![no_main]

use libfuzzer_sys::fuzz_target;

// Scenario configurations are untrusted input: parsing, preset resolution
// and validation must never panic, and anything that validates must
// support grid construction.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = beliefdyn::config::scenario_from_toml(text) {
        let _ = spec.s_zeta();
        let _ = spec.support_radius();
        let _ = beliefdyn::numerics::make_grid(&spec, 8, 8);
    }
});
