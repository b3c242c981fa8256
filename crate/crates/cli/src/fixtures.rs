//! Code descriptions shipped with the binary.

pub const ZOO: [(&str, &str); 21] = [
    ("01_96_12_4", include_str!("../fixtures/zoo/01_96_12_4.toml")),
    ("02_96_12_4", include_str!("../fixtures/zoo/02_96_12_4.toml")),
    ("03_96_12_8", include_str!("../fixtures/zoo/03_96_12_8.toml")),
    ("04_96_44_4", include_str!("../fixtures/zoo/04_96_44_4.toml")),
    ("05_144_6_4", include_str!("../fixtures/zoo/05_144_6_4.toml")),
    ("06_144_12_8", include_str!("../fixtures/zoo/06_144_12_8.toml")),
    ("07_144_40_4", include_str!("../fixtures/zoo/07_144_40_4.toml")),
    ("08_192_12_4", include_str!("../fixtures/zoo/08_192_12_4.toml")),
    ("09_216_12_12", include_str!("../fixtures/zoo/09_216_12_12.toml")),
    ("10_240_12_8", include_str!("../fixtures/zoo/10_240_12_8.toml")),
    ("11_288_6_6", include_str!("../fixtures/zoo/11_288_6_6.toml")),
    ("12_288_52_4", include_str!("../fixtures/zoo/12_288_52_4.toml")),
    ("13_324_18_9", include_str!("../fixtures/zoo/13_324_18_9.toml")),
    ("14_360_30_6", include_str!("../fixtures/zoo/14_360_30_6.toml")),
    ("15_384_80_4", include_str!("../fixtures/zoo/15_384_80_4.toml")),
    ("16_486_18_9", include_str!("../fixtures/zoo/16_486_18_9.toml")),
    ("17_486_24_12", include_str!("../fixtures/zoo/17_486_24_12.toml")),
    ("18_486_66_9", include_str!("../fixtures/zoo/18_486_66_9.toml")),
    ("19_576_64_6", include_str!("../fixtures/zoo/19_576_64_6.toml")),
    ("20_648_60_9", include_str!("../fixtures/zoo/20_648_60_9.toml")),
    ("21_768_12_12", include_str!("../fixtures/zoo/21_768_12_12.toml")),
];

pub const FAMILIES: [(&str, &str); 10] = [
    ("bb_756_16", include_str!("../fixtures/families/bb_756_16.toml")),
    ("bga_16_2_4", include_str!("../fixtures/families/bga_16_2_4.toml")),
    ("c2_450_32_8", include_str!("../fixtures/families/c2_450_32_8.toml")),
    ("cxr_240_8_8", include_str!("../fixtures/families/cxr_240_8_8.toml")),
    ("gb_70_8_10", include_str!("../fixtures/families/gb_70_8_10.toml")),
    ("haah_1024_30", include_str!("../fixtures/families/haah_1024_30.toml")),
    ("lacross_98_18_4", include_str!("../fixtures/families/lacross_98_18_4.toml")),
    ("mb_48_4_6", include_str!("../fixtures/families/mb_48_4_6.toml")),
    ("toric4d_96_6_4", include_str!("../fixtures/families/toric4d_96_6_4.toml")),
    ("tt_72_6_6", include_str!("../fixtures/families/tt_72_6_6.toml")),
];

use crate::config::BuildConfig;

fn parse(name: &str, text: &str) -> BuildConfig {
    BuildConfig::from_toml(text, name).expect("bundled fixtures are valid")
}

/// Code zoo entries in table order.
pub fn zoo() -> Vec<BuildConfig> {
    ZOO.iter().map(|(n, t)| parse(n, t)).collect()
}

/// A bundled fixture by file stem, e.g. `"tt_72_6_6"` or `"01_96_12_4"`.
pub fn by_stem(stem: &str) -> Option<BuildConfig> {
    ZOO.iter().chain(FAMILIES.iter()).find(|(n, _)| *n == stem).map(|(n, t)| parse(n, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse_and_match_size() {
        for (name, text) in ZOO.iter().chain(FAMILIES.iter()) {
            let cfg = parse(name, text);
            let code = cfg.build().unwrap();
            assert_eq!(Some(code.n), cfg.expected.as_ref().and_then(|e| e.n), "{name}");
        }
        assert_eq!(zoo().len(), 21);
        assert!(by_stem("tt_72_6_6").is_some());
    }
}
