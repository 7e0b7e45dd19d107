use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use osfp_core::cardgame::{ActionLayout, GameConfig};
use osfp_core::policy::TabularPolicy;

use crate::args::{GameArgs, Preset};

/// Bad flags or unreadable inputs; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Writes to `path`, or stdout when it is `None` or `-`.
pub fn write_output(path: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        _ => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

pub fn json(value: &impl serde::Serialize) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(value)?;
    s.push(b'\n');
    Ok(s)
}

pub fn game_config(g: &GameArgs) -> Result<GameConfig> {
    let mut c = match (&g.config, g.preset) {
        (Some(path), _) => GameConfig::parse(&read_input(path)?).map_err(|e| usage(e.to_string()))?,
        (None, Preset::Tiny) => GameConfig::tiny(),
        (None, Preset::Small) => GameConfig::small(),
        (None, Preset::Default) => GameConfig::default(),
    };
    if let Some(s) = g.game_seed {
        c.rng_seed = s;
    }
    c.validate().map_err(|e| usage(e.to_string()))?;
    Ok(c)
}

/// Loads a policy file, or a fresh uniform policy for `uniform`.
pub fn policy(spec: &str, config: &GameConfig) -> Result<TabularPolicy> {
    let size = ActionLayout::new(config).size();
    if spec == "uniform" {
        return Ok(TabularPolicy::new(size));
    }
    let p = TabularPolicy::parse(&read_input(Path::new(spec))?).map_err(|e| usage(format!("{spec}: {e}")))?;
    if p.action_size() != size {
        return Err(usage(format!(
            "{spec}: policy has {} actions but the game has {size}",
            p.action_size()
        )));
    }
    Ok(p)
}
