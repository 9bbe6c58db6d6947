//! Golden tables shipped with the binary, overridable from a directory.

use std::path::Path;

use bpmc::ring::SeriesJson;

use crate::CliError;

/// Environment variable naming a directory of golden `*.json` files that
/// replaces the embedded set.
pub const GOLDEN_DIR_ENV: &str = "BPMC_GOLDEN_DIR";

macro_rules! embedded {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../golden/", $name)))),*]
    };
}

const EMBEDDED: &[(&str, &str)] = embedded!(
    "p2_reduced_pseries.json",
    "p2_mc1.json",
    "p2_mc2.json",
    "p2_mc3.json",
    "p2_mc4.json",
    "p2_mc5.json",
    "p3_reduced_pseries.json",
    "p3_mc2.json",
    "p3_mc4.json",
    "p5_mc8.json",
    "p7_mc12.json",
    "p11_mc20.json",
    "p13_mc24.json",
);

#[derive(Clone, Debug)]
pub struct Golden {
    pub name: String,
    pub table: SeriesJson,
}

impl Golden {
    /// `p2`, `p3`, ... from the table's prime.
    pub fn suite(&self) -> String {
        format!("p{}", self.table.prime)
    }

    pub fn describe(&self) -> String {
        match (self.table.quantity.as_deref(), self.table.n) {
            (Some("mc"), Some(n)) => format!("MC_{} at p = {}", n, self.table.prime),
            (Some("reduced-pseries"), _) => format!("⟨{}⟩ξ", self.table.prime),
            (q, _) => format!("{} at p = {}", q.unwrap_or("?"), self.table.prime),
        }
    }
}

fn parse(name: &str, text: &str) -> Result<Golden, CliError> {
    let table = SeriesJson::from_json(text)
        .map_err(|e| CliError::Validation(format!("golden file {}: {}", name, e)))?;
    Ok(Golden {
        name: name.to_string(),
        table,
    })
}

/// Loads the golden tables: from `$BPMC_GOLDEN_DIR` when set, else the
/// embedded copies.
pub fn load() -> Result<Vec<Golden>, CliError> {
    match std::env::var_os(GOLDEN_DIR_ENV) {
        Some(dir) => load_dir(Path::new(&dir)),
        None => embedded(),
    }
}

/// The tables compiled into the binary.
pub fn embedded() -> Result<Vec<Golden>, CliError> {
    EMBEDDED.iter().map(|(n, t)| parse(n, t)).collect()
}

pub fn load_dir(dir: &Path) -> Result<Vec<Golden>, CliError> {
    let io = |e: std::io::Error| CliError::Validation(format!("{}: {}", dir.display(), e));
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    names
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(io)?;
            parse(&p.file_name().unwrap_or_default().to_string_lossy(), &text)
        })
        .collect()
}
