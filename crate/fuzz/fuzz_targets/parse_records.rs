#![no_main]
use libfuzzer_sys::fuzz_target;
use nilgeom::io;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(records) = io::parse_records(s) {
        let again = io::parse_records(&io::records_to_json(&records)).expect("written records reparse");
        assert_eq!(again, records);
    }
});
