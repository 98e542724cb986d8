#![no_main]
use libfuzzer_sys::fuzz_target;
use nilgeom::{bundled, io};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    for name in ["heisenberg3", "flat-u-group"] {
        let alg = bundled::lookup(name).unwrap();
        if let Ok((_, lattice)) = io::parse_lattice(s, &alg) {
            io::parse_lattice(&io::lattice_to_json(&lattice), &alg).expect("written lattice reparses");
        }
    }
});
