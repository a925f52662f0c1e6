#![no_main]

use libfuzzer_sys::fuzz_target;
use sympoisson::io::StructureFile;
use sympoisson::sampling::Sampling;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(file) = StructureFile::parse(s) {
            let again = StructureFile::parse(&file.to_string()).expect("rendering re-parses");
            assert_eq!(again.to_string(), file.to_string());
            let _ = file.build(&Sampling::default().with_count(2));
        }
    }
});
