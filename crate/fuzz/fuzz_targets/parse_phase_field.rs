#![no_main]

use std::sync::Arc;

use libfuzzer_sys::fuzz_target;
use sympoisson::geometry::Chart;
use sympoisson::pw::PhaseField;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let chart = Arc::new(Chart::standard(2));
        let _ = PhaseField::parse(&chart, s);
    }
});
