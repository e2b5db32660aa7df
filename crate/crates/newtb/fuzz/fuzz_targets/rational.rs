#![no_main]

use libfuzzer_sys::fuzz_target;
use newtb::rational::{parse_rational, parse_rational_list, ExtRational};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_rational(s) {
        assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }
    if let Ok(x) = s.parse::<ExtRational>() {
        assert_eq!(x.to_string().parse::<ExtRational>().unwrap(), x);
    }
    let _ = parse_rational_list(s);
});
