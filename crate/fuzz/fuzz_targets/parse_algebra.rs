#![no_main]
use libfuzzer_sys::fuzz_target;
use nilgeom::io;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(alg) = io::parse_algebra(s) {
        let again = io::parse_algebra(&io::algebra_to_json(&alg)).expect("written algebra reparses");
        assert_eq!(again, alg);
    }
});
