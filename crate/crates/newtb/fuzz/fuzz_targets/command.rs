#![no_main]

use libfuzzer_sys::fuzz_target;

// Long inputs can legitimately ask for long computations; keep lines short.
fuzz_target!(|data: &[u8]| {
    if data.len() > 160 {
        return;
    }
    let Ok(line) = std::str::from_utf8(data) else { return };
    if line.contains("selftest") || line.contains("svg") || line.contains("orbit") {
        return;
    }
    let failure = match newtb_cli::execute_line(line) {
        Ok(report) => report.failure,
        Err(e) => Some(e),
    };
    if let Some(e) = failure {
        assert_ne!(e.exit_code(), 3, "invariant violated on `{line}`: {e}");
    }
});
