#![no_main]

use irgd_bench::trace_io::{audit_csv_bytes, parse_audit_csv, parse_trace_csv, trace_csv_bytes};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = parse_trace_csv(data) {
        assert!(records.windows(2).all(|w| w[0].k < w[1].k));
        let bytes = trace_csv_bytes(&records);
        let again = parse_trace_csv(&bytes).expect("written trace parses");
        assert_eq!(trace_csv_bytes(&again), bytes);
    }
    if let Ok(records) = parse_audit_csv(data) {
        let bytes = audit_csv_bytes(&records);
        let again = parse_audit_csv(&bytes).expect("written audit parses");
        assert_eq!(audit_csv_bytes(&again), bytes);
    }
});
