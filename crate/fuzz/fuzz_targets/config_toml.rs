#![no_main]

use fracdrift_cli::config::{Overrides, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = RunConfig::from_toml(text) else { return };
    if let Ok(resolved) = cfg.resolve(&Overrides::default()) {
        // the emitted provenance block must parse back to the same configuration
        let again = RunConfig::from_toml(&resolved.to_toml()).expect("resolved config re-parses");
        assert_eq!(again, resolved);
    }
});
