#![no_main]

use libfuzzer_sys::fuzz_target;

// Density CSVs come back from users via `mc --validate-against`; the
// reader must reject malformed input without panicking, and accepted
// fields must survive basic queries and a write round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(field) = beliefdyn::csvio::density_from_csv(text) {
        let _ = field.mass();
        let _ = field.belief_marginal();
        let again = beliefdyn::csvio::density_to_csv(&field);
        let back = beliefdyn::csvio::density_from_csv(&again).expect("round trip must parse");
        assert_eq!(back.values(), field.values());
    }
});
