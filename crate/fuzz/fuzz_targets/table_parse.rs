#![no_main]

use libfuzzer_sys::fuzz_target;

// Tabulated-potential CSV: parsing must never panic, and any accepted table
// must build a potential whose profile evaluates finitely on its own grid.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(rows) = cylmode::config::parse_table(text) else {
        return;
    };
    if rows.len() > 4096 {
        return;
    }
    if let Ok(v) = cylmode::potential::Potential::tabulated(vec![rows]) {
        let g = v.grid().clone();
        for i in [0, g.len() / 2, g.len() - 1] {
            let t = g.t(i);
            assert!(v.value(0.0, t).is_finite());
            assert!(v.sym_deriv(t).is_finite());
        }
    }
});
