//! Class group memo under `$PRINCHEB_CACHE`, keyed by a hash of the field
//! and the search options. Entries are re-verified when loaded.

use std::fs;
use std::path::PathBuf;

use princheb::numberfield::{class_group_with, CachedClassGroup, ClassGroupData, ClassGroupOptions, FieldDescription};
use sha2::{Digest, Sha256};

use crate::error::CliError;

fn cache_path(k: &FieldDescription, opts: &ClassGroupOptions) -> Option<PathBuf> {
    let dir = std::env::var_os("PRINCHEB_CACHE")?;
    let key = serde_json::json!({
        "name": k.name(),
        "min_poly": k.min_poly(),
        "integral_basis": k.integral_basis(),
        "class_number": k.known_class_number(),
        "box": opts.initial_box,
        "doublings": opts.doublings,
    });
    let digest = Sha256::digest(key.to_string().as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    Some(PathBuf::from(dir).join(format!("classgroup-{}.json", &hex[..32])))
}

pub fn class_group_cached(k: &FieldDescription, opts: &ClassGroupOptions) -> Result<ClassGroupData, CliError> {
    let path = cache_path(k, opts);
    if let Some(path) = &path {
        if let Ok(text) = fs::read_to_string(path) {
            let loaded = serde_json::from_str::<CachedClassGroup>(&text)
                .map_err(|e| e.to_string())
                .and_then(|c| ClassGroupData::from_cached(k, &c).map_err(|e| e.to_string()));
            match loaded {
                Ok(cg) => return Ok(cg),
                Err(e) => eprintln!("warning: ignoring cache entry {}: {e}", path.display()),
            }
        }
    }
    let cg = class_group_with(k, opts)?;
    if let Some(path) = &path {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let text = serde_json::to_string(&cg.to_cached(k)).expect("cache entry serializes");
        fs::write(path, text)?;
    }
    Ok(cg)
}
