#![no_main]

use libfuzzer_sys::fuzz_target;

// The config parser must never panic on any input; a successful parse must
// produce a config that survives its own canonical echo.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = cylmode::config::parse_config(text) {
        let echo = cfg.echo();
        let _ = cylmode::report::run_id(&echo);
    }
});
