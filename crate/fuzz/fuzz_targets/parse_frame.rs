#![no_main]
use libfuzzer_sys::fuzz_target;
use nilgeom::{bundled, io};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let alg = bundled::lookup("quaternionic7(1,-1,1)").unwrap();
    if let Ok(frame) = io::parse_frame(s, &alg) {
        assert_eq!(frame.dim(), alg.dim());
        io::parse_frame(&io::frame_to_json(&frame), &alg).expect("written frame reparses");
    }
});
