use std::fmt::Debug;

use super::ScenarioError;

pub const REPORT_SCHEMA: &str = "finedomain-report/1";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, String)>,
}

impl Section {
    pub fn put(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    /// Floats use the shortest text that reads back to the same value.
    pub fn put_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.put(key, format!("{value:?}"))
    }

    pub fn put_debug(&mut self, key: &str, value: impl Debug) -> &mut Self {
        self.put(key, format!("{value:?}"))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|e| e.0 == key).map(|e| e.1.as_str())
    }
}

/// Sectioned `key = value` text; the first line names the schema.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertificateReport {
    pub sections: Vec<Section>,
}

impl CertificateReport {
    pub fn section(&mut self, name: impl Into<String>) -> &mut Section {
        self.sections.push(Section { name: name.into(), entries: Vec::new() });
        self.sections.last_mut().unwrap()
    }

    pub fn find(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.find(section).and_then(|s| s.get(key))
    }

    /// Sections whose name starts with `prefix`.
    pub fn sections_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Section> + 'a {
        self.sections.iter().filter(move |s| s.name.starts_with(prefix))
    }

    pub fn passed(&self) -> bool {
        self.get("verdict", "pass") == Some("true")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{REPORT_SCHEMA}\n");
        for sec in &self.sections {
            s.push_str(&format!("\n[{}]\n", sec.name));
            for (k, v) in &sec.entries {
                s.push_str(&format!("{k} = {v}\n"));
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(REPORT_SCHEMA) {
            return Err(ScenarioError::Artifact(format!("report does not start with '{REPORT_SCHEMA}'")));
        }
        let mut r = CertificateReport::default();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            if let Some(name) = line.trim().strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                r.section(name);
            } else {
                // Values may be empty, so split on " =" and drop one space.
                let (k, v) = line
                    .split_once(" =")
                    .map(|(k, v)| (k, v.strip_prefix(' ').unwrap_or(v)))
                    .ok_or_else(|| ScenarioError::Artifact(format!("malformed report line '{line}'")))?;
                r.sections
                    .last_mut()
                    .ok_or_else(|| ScenarioError::Artifact("entry before any section".into()))?
                    .put(k, v);
            }
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut r = CertificateReport::default();
        r.section("scenario").put("name", "x").put_f64("h", 1.0 / 3.0);
        r.section("verdict").put("pass", true).put("failures", "");
        let back = CertificateReport::parse(&r.to_text()).unwrap();
        assert_eq!(back, r);
        assert!(back.passed());
        assert_eq!(back.get("scenario", "h").unwrap().parse::<f64>().unwrap(), 1.0 / 3.0);
        assert!(CertificateReport::parse("nope\n").is_err());
    }
}
