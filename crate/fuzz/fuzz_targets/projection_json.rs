#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let tol = ctxcat::ToleranceConfig::default();
        if let Ok(p) = ctxcat::io::parse_projection(text, &tol) {
            assert!(p.rank() <= p.dim());
        }
    }
});
