#![no_main]
use libfuzzer_sys::fuzz_target;
use nilgeom::{curvature, decomposition::witt_decompose, io};

// Anything that parses and validates must decompose and support curvature
// evaluation without panicking.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(alg) = io::parse_algebra(s) else { return };
    if alg.dim() > 8 || !alg.validate().is_valid() {
        return;
    }
    let frame = witt_decompose(&alg).expect("valid algebra has a Witt frame");
    frame.check(&alg, 0.0).expect("frame fits");
    let _ = curvature::is_flat(&alg, 0.0);
});
