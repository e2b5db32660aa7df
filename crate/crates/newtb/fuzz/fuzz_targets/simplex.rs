#![no_main]

use libfuzzer_sys::fuzz_target;
use newtb::building::SimplexB;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(x) = s.parse::<SimplexB>() {
        let again: SimplexB = x.to_string().parse().expect("printed form parses");
        assert_eq!(again, x);
    }
});
