#![no_main]

use libfuzzer_sys::fuzz_target;
use sympoisson::expr::{parse, parse_with_names};

// The first byte picks the arity; parsed fields must also print and re-parse.
fuzz_target!(|data: &[u8]| {
    let Some((&arity, rest)) = data.split_first() else {
        return;
    };
    if let Ok(s) = std::str::from_utf8(rest) {
        let arity = usize::from(arity % 5);
        if let Ok(f) = parse(s, arity) {
            let names: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
            let printed = f.expr().display(&names).to_string();
            let _ = parse_with_names(&printed, &names).expect("printed form re-parses");
            let _ = f.evaluate(&vec![0.5; arity]);
        }
        let names = ["x".to_string(), "y".to_string()];
        let _ = parse_with_names(s, &names);
    }
});
