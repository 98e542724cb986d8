#![no_main]
use libfuzzer_sys::fuzz_target;
use nilgeom::{bundled, decomposition::witt_decompose, io};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let alg = bundled::lookup("quaternionic7").unwrap();
    let frame = witt_decompose(&alg).unwrap().to_float();
    if let Ok(file) = io::parse_ivp(s, &frame) {
        assert!(file.ivp.velocity().iter().all(|c| c.is_finite()));
        let text = io::ivp_to_value(&file.ivp, file.times.as_deref()).to_string();
        io::parse_ivp(&text, &frame).expect("written ivp reparses");
    }
});
