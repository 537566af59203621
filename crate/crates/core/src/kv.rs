//! Plain `key = value` files used for scenarios, coefficient sets and
//! simulation sidecars.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are
//! case-insensitive and stored lower-cased; a repeated key is an error.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read(text.as_bytes())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut kv = KeyValues::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected `key = value`, found `{trimmed}`"),
                });
            };
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "empty key".into(),
                });
            }
            if kv.get(&key).is_some() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
            kv.entries.push((key, value.trim().to_string()));
        }
        Ok(kv)
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        let key = key.to_ascii_lowercase();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        let key = key.to_ascii_lowercase();
        self.entries
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        let raw = self.get(key).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("missing key `{key}`"),
        })?;
        raw.parse::<f64>().map_err(|_| Error::Parse {
            line: 0,
            message: format!("`{key}` is not a number: `{raw}`"),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_string().as_bytes())?;
        Ok(())
    }
}

impl std::fmt::Display for KeyValues {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut buf = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(buf, "{k} = {v}");
        }
        f.write_str(&buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let kv = KeyValues::parse("# scenario\n\nAlpha = 0.3\nbeta=500\n  gamma =  15 \n").unwrap();
        assert_eq!(kv.require_f64("alpha").unwrap(), 0.3);
        assert_eq!(kv.require_f64("BETA").unwrap(), 500.0);
        assert_eq!(kv.get("gamma"), Some("15"));
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(matches!(
            KeyValues::parse("a = 1\na = 2"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            KeyValues::parse("just words"),
            Err(Error::Parse { line: 1, .. })
        ));
        let kv = KeyValues::parse("a = x").unwrap();
        assert!(kv.require_f64("a").is_err());
        assert!(kv.require_f64("b").is_err());
    }

    #[test]
    fn display_round_trips() {
        let mut kv = KeyValues::new();
        kv.insert("a1", 1.698);
        kv.insert("label", "Suburban");
        kv.insert("a1", 2.5);
        let back = KeyValues::parse(&kv.to_string()).unwrap();
        assert_eq!(back, kv);
        assert_eq!(back.require_f64("a1").unwrap(), 2.5);
    }
}
