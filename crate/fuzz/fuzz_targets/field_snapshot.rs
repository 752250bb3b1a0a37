#![no_main]

use fracdrift::io::{decode_field_snapshot, encode_field_snapshot};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((field, provenance)) = decode_field_snapshot(data) {
        let bytes = encode_field_snapshot(&field, &provenance).expect("decoded field re-encodes");
        let (again, prov_again) = decode_field_snapshot(&bytes).expect("re-encoded snapshot decodes");
        assert_eq!(again.spec, field.spec);
        assert_eq!(prov_again, provenance);
        assert!(again.values.iter().zip(&field.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
});
