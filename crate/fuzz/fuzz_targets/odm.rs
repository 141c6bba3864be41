#![no_main]

use libfuzzer_sys::fuzz_target;
use tierlab::odm::{parse_odm, ODM_HEADER};
use tierlab::reference;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let h = reference::italy_areas();
    let Ok(parsed) = parse_odm(text, &h) else { return };
    let mut out = format!("{ODM_HEADER}\n").into_bytes();
    for r in &parsed.records {
        r.write_line(&mut out).unwrap();
    }
    let again = parse_odm(std::str::from_utf8(&out).unwrap(), &h).unwrap();
    assert!(again.rejects.is_empty());
    assert_eq!(again.records, parsed.records);
});
