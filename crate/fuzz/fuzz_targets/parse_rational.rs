#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(r) = nilgeom::scalar::parse_rational(s) {
            // Printed form must read back to the same value.
            let back = nilgeom::scalar::parse_rational(&nilgeom::io::scalar_string(&r)).unwrap();
            assert_eq!(back, r);
        }
    }
});
