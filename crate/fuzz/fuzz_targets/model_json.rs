#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(model) = ctxcat::io::parse_model(text) else {
        return;
    };
    // keep enumeration cheap: only small models go further
    if model.available.observables().len() <= 4 && model.available.dim() <= 8 {
        if let Ok(poset) = model.enumerate() {
            let _ = model.registry(&poset);
        }
    }
});
