//! Published reference tables of the six bicubic families, bundled as
//! count-sequence files with SHA-256 checksums.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::ensemble::EnsembleTag;
use crate::error::{Error, Result};
use crate::sequence::CountSequence;

const FILES: [(EnsembleTag, &str, &str); 6] = [
    (EnsembleTag::Z, "z.json", include_str!("../data/golden/z.json")),
    (EnsembleTag::Y, "y.json", include_str!("../data/golden/y.json")),
    (EnsembleTag::X, "x.json", include_str!("../data/golden/x.json")),
    (EnsembleTag::W, "w.json", include_str!("../data/golden/w.json")),
    (EnsembleTag::V, "v.json", include_str!("../data/golden/v.json")),
    (EnsembleTag::U, "u.json", include_str!("../data/golden/u.json")),
];

const CHECKSUMS: &str = include_str!("../data/golden/SHA256SUMS");

pub const CHECKSUM_FILE: &str = "SHA256SUMS";

pub fn file_name(tag: EnsembleTag) -> &'static str {
    FILES.iter().find(|f| f.0 == tag).map(|f| f.1).unwrap()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses `<hex>  <file>` lines.
pub fn parse_checksums(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| {
            let mut parts = l.split_whitespace();
            Some((parts.nth(1)?.to_string(), l.split_whitespace().next()?.to_ascii_lowercase()))
        })
        .collect()
}

fn verify(name: &str, text: &str, sums: &BTreeMap<String, String>) -> Result<()> {
    let want = sums.get(name).ok_or_else(|| Error::Parse(format!("no checksum listed for {name}")))?;
    let got = sha256_hex(text.as_bytes());
    if &got != want {
        return Err(Error::Parse(format!("checksum mismatch for {name}: expected {want}, got {got}")));
    }
    Ok(())
}

/// The bundled table of one family, checksum-verified.
pub fn table(tag: EnsembleTag) -> Result<CountSequence> {
    let (_, name, text) = FILES.iter().find(|f| f.0 == tag).unwrap();
    verify(name, text, &parse_checksums(CHECKSUMS))?;
    let seq = CountSequence::from_json(text)?;
    if seq.id.tag != tag || !seq.id.colored {
        return Err(Error::Parse(format!("{name} holds the wrong ensemble")));
    }
    Ok(seq)
}

/// All six bundled tables.
pub fn all_tables() -> Result<Vec<CountSequence>> {
    EnsembleTag::ALL.iter().map(|&t| table(t)).collect()
}

/// Writes the bundled tables and their checksum file into `dir`.
pub fn export(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Parse(e.to_string()))?;
    for (_, name, text) in FILES {
        fs::write(dir.join(name), text).map_err(|e| Error::Parse(e.to_string()))?;
    }
    fs::write(dir.join(CHECKSUM_FILE), CHECKSUMS).map_err(|e| Error::Parse(e.to_string()))
}

/// Loads one family's table from a directory laid out like the bundled
/// data; the file is verified against the directory's checksum list when
/// one is present.
pub fn load_from_dir(dir: &Path, tag: EnsembleTag) -> Result<CountSequence> {
    let name = file_name(tag);
    let text = fs::read_to_string(dir.join(name)).map_err(|e| Error::Parse(format!("{name}: {e}")))?;
    if let Ok(sums) = fs::read_to_string(dir.join(CHECKSUM_FILE)) {
        verify(name, &text, &parse_checksums(&sums))?;
    }
    CountSequence::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn bundled_tables_load() {
        let lens: Vec<(usize, usize)> = all_tables().unwrap().iter().map(|s| (s.start(), s.end() - 1)).collect();
        assert_eq!(lens, [(1, 28), (0, 16), (0, 17), (1, 18), (2, 21), (2, 17)]);
    }

    #[test]
    fn spot_values() {
        let z = table(EnsembleTag::Z).unwrap();
        assert_eq!(z.get(28).unwrap(), &"2490299924154166673782584".parse::<BigUint>().unwrap());
        let v = table(EnsembleTag::V).unwrap();
        assert_eq!(v.get(6).unwrap(), &BigUint::from(5534u32));
        let u = table(EnsembleTag::U).unwrap();
        assert_eq!(u.get(2).unwrap(), &BigUint::from(1u8));
    }

    #[test]
    fn tampering_is_detected() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path();
        export(dir).unwrap();
        assert!(load_from_dir(dir, EnsembleTag::W).is_ok());
        let path = dir.join("w.json");
        let text = fs::read_to_string(&path).unwrap().replace("\"972\"", "\"973\"");
        fs::write(&path, text).unwrap();
        assert!(load_from_dir(dir, EnsembleTag::W).is_err());
    }
}
