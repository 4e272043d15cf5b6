#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(loaded) = ctxcat::io::parse_poset(text) {
            let again =
                ctxcat::io::poset_to_json(&loaded.poset, &loaded.observables, &loaded.tolerance)
                    .expect("a parsed poset serializes");
            assert!(ctxcat::io::parse_poset(&again).is_ok());
        }
    }
});
