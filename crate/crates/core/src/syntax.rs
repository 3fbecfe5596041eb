//! Parser for the `name:arg,arg,key=value,...` mini-syntax shared by the
//! measure, exponent and test-function descriptions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Descriptor<'a> {
    pub name: &'a str,
    positional: Vec<&'a str>,
    named: Vec<(&'a str, &'a str)>,
    used: std::cell::RefCell<Vec<&'a str>>,
}

impl<'a> Descriptor<'a> {
    pub fn parse(text: &'a str) -> Result<Self> {
        let text = text.trim();
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (text, ""),
        };
        if name.is_empty() {
            return Err(Error::Parse(format!("missing name in `{text}`")));
        }
        let mut positional = Vec::new();
        let mut named = Vec::new();
        for part in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match part.split_once('=') {
                Some((k, v)) => named.push((k.trim(), v.trim())),
                None => {
                    if !named.is_empty() {
                        return Err(Error::Parse(format!(
                            "positional argument `{part}` after named ones in `{text}`"
                        )));
                    }
                    positional.push(part)
                }
            }
        }
        Ok(Self {
            name,
            positional,
            named,
            used: Default::default(),
        })
    }

    pub fn positional(&self) -> &[&'a str] {
        &self.positional
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        let hit = self.named.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        if let Some((k, _)) = self.named.iter().find(|(k, _)| *k == key) {
            self.used.borrow_mut().push(k);
        }
        hit
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    pub fn required(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| Error::Parse(format!("`{}` requires `{key}=`", self.name)))
    }

    /// Rejects named keys that were never looked up.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        for (k, _) in &self.named {
            if !used.contains(k) {
                return Err(Error::Parse(format!("unknown key `{k}` for `{}`", self.name)));
            }
        }
        Ok(())
    }
}

pub(crate) fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{key}`: cannot parse `{v}` as a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("`{key}`: value `{v}` is not finite")));
    }
    Ok(x)
}
