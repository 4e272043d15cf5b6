#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let (rows, cols) = (data[0] as usize % 8, data[1] as usize % 8);
    if let Ok(tables) = ctxcat::io::ingest_datasheets(&data[2..], rows, cols) {
        for t in &tables {
            assert_eq!(t.values.len(), rows * cols);
        }
    }
});
