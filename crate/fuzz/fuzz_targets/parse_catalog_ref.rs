#![no_main]

use libfuzzer_sys::fuzz_target;
use sympoisson::io::CatalogRef;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(r) = CatalogRef::parse(s) {
            assert_eq!(CatalogRef::parse(&r.to_string()).as_ref(), Ok(&r));
        }
    }
});
