#![no_main]

use libfuzzer_sys::fuzz_target;
use sympoisson::io::parse_point_list;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(v) = parse_point_list(s) {
            assert!(v.iter().all(|x| x.is_finite()));
        }
    }
});
