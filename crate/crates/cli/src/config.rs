//! Optional TOML configuration.
//!
//! ```toml
//! max_group_order = 50000
//! ```

use std::path::Path;

use orbit_rank::permgroup::GroupConfig;

pub fn load(path: Option<&Path>) -> Result<GroupConfig, String> {
    let Some(path) = path else { return Ok(GroupConfig::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse(text: &str) -> Result<GroupConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        assert_eq!(parse("").unwrap(), GroupConfig::default());
        assert_eq!(parse("max_group_order = 7").unwrap().max_group_order, 7);
        assert!(parse("max_group_order = \"many\"").is_err());
    }
}
